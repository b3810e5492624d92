//! Double-slit decoherence of a free Brownian particle in an Ohmic bath.
//!
//! Closed forms for the probability density behind the slits, its
//! attenuation factors and characteristic timescales, a brute-force
//! quadrature oracle for the density, and grid density matrices for the
//! off-diagonal measure `a_OD`. Units: `hbar = k_B = 1`.
//!
//! Everything is generic over the float type; the `*64` / `*32` aliases
//! below fix it.

pub mod correlators;
pub mod densmat;
pub mod error;
pub mod grid;
pub mod interference;
pub mod oracle;
pub mod quadrature;
pub mod scalar;

pub use correlators::{correlator, timescales, width_squared, BathCorrelators, Scale, ScenarioParams, Timescales};
pub use densmat::{
    closed_form_a_od, free_unitary_evolve, initial_density_matrix, off_diagonal_norm, DensityMatrixGrid,
    OffDiagonalNorm, Part,
};
pub use error::{Error, Result};
pub use grid::{sample_points, Spacing, UniformGrid};
pub use interference::{
    attenuation_a2, attenuation_flo, classical_density, interference_amplitude, profile, saturation_a_inf,
    single_slit_density, total_density, Snapshot, SpatialProfile,
};
pub use oracle::{oracle_density, OracleConfig, OracleValue};
pub use scalar::Real;

pub type ScenarioParams64 = ScenarioParams<f64>;
pub type ScenarioParams32 = ScenarioParams<f32>;
pub type BathCorrelators64 = BathCorrelators<f64>;
pub type BathCorrelators32 = BathCorrelators<f32>;
pub type Timescales64 = Timescales<f64>;
pub type Timescales32 = Timescales<f32>;
pub type Snapshot64 = Snapshot<f64>;
pub type Snapshot32 = Snapshot<f32>;
pub type SpatialProfile64 = SpatialProfile<f64>;
pub type SpatialProfile32 = SpatialProfile<f32>;
pub type DensityMatrixGrid64 = DensityMatrixGrid<f64>;
pub type DensityMatrixGrid32 = DensityMatrixGrid<f32>;
pub type OracleConfig64 = OracleConfig<f64>;
pub type OracleConfig32 = OracleConfig<f32>;
pub type UniformGrid64 = UniformGrid<f64>;
pub type UniformGrid32 = UniformGrid<f32>;
