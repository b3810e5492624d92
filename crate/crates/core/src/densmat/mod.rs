//! Reduced density matrix of the thermal double-slit state on a grid.
//!
//! The prepared state is
//!
//! ```text
//! rho(x, x') = (N/2) exp(-(x - x')^2 / (2 lambda^2)) sum_{i,j} psi_i(x) psi_j(x')
//! psi_i(x)   = (2 pi sigma^2)^(-1/4) exp(-(x - c_i)^2 / (4 sigma^2)),  c_i = +/- d/2
//! ```
//!
//! Every `(i, j)` term is a two-variable Gaussian, and stays one under free
//! evolution, so matrices at any time are sampled from closed forms rather
//! than propagated on the grid.

mod gaussian;

use std::fmt;
use std::io::{self, Write};

use ndarray::Array2;
use num_complex::Complex;
use rayon::prelude::*;

use crate::correlators::{Scale, ScenarioParams};
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::interference::SlitPreparation;
use crate::scalar::{CompensatedSum, Real};

pub use gaussian::GaussianTerm;

/// Default number of grid points per axis.
pub const DEFAULT_MATRIX_POINTS: usize = 1024;
/// Envelope standard deviations kept on each side of an evolved grid.
pub const ENVELOPE_SPAN: f64 = 8.0;
/// `sigma / lambda` at which the narrow-slit closed form for `a_OD` is flagged.
pub const NARROW_SLIT_LIMIT: f64 = 0.2;

/// Which index pairs `(i, j)` of the slit sum a matrix holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Full,
    /// Same-slit pairs, `i = j`.
    Classical,
    /// Cross-slit pairs, `i = -j`.
    Interference,
}

impl Part {
    pub fn name(self) -> &'static str {
        match self {
            Part::Full => "full",
            Part::Classical => "classical",
            Part::Interference => "interference",
        }
    }

    fn includes(self, i: Slit, j: Slit) -> bool {
        match self {
            Part::Full => true,
            Part::Classical => i == j,
            Part::Interference => i != j,
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slit {
    Upper,
    Lower,
}

impl Slit {
    fn center<F: Real>(self, d: F) -> F {
        match self {
            Slit::Upper => d * F::lit(0.5),
            Slit::Lower => -d * F::lit(0.5),
        }
    }
}

/// Thermal weighting of the prepared state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialState {
    /// Boltzmann-weighted momenta, coherence length `lambda_th`; needs `T > 0`.
    Thermal,
    /// Pure two-slit wave function; ignores the temperature.
    ZeroTemperature,
}

/// Density matrix sampled on a square grid.
#[derive(Debug, Clone)]
pub struct DensityMatrixGrid<F> {
    grid: UniformGrid<F>,
    values: Array2<Complex<F>>,
    part: Part,
    time: F,
    params: ScenarioParams<F>,
    state: InitialState,
    initial_terms: Vec<GaussianTerm<F>>,
}

impl<F: Real> DensityMatrixGrid<F> {
    /// Shared axis of `x` and `x'`.
    pub fn grid(&self) -> &UniformGrid<F> {
        &self.grid
    }

    pub fn step(&self) -> F {
        self.grid.step()
    }

    /// `rho[(i, j)] = rho(x_i, x'_j)`.
    pub fn values(&self) -> &Array2<Complex<F>> {
        &self.values
    }

    pub fn part(&self) -> Part {
        self.part
    }

    pub fn time(&self) -> F {
        self.time
    }

    pub fn params(&self) -> &ScenarioParams<F> {
        &self.params
    }

    pub fn state(&self) -> InitialState {
        self.state
    }

    pub fn diagonal(&self) -> Vec<Complex<F>> {
        self.values.diag().to_vec()
    }

    /// `h sum_i rho(x_i, x_i)`.
    pub fn trace(&self) -> Complex<F> {
        let h = self.step();
        let re: CompensatedSum<F> = self.values.diag().iter().map(|v| v.re).collect();
        let im: CompensatedSum<F> = self.values.diag().iter().map(|v| v.im).collect();
        Complex::new(re.total(), im.total()) * h
    }

    /// Largest `|rho(x, x') - conj(rho(x', x))|`.
    pub fn hermiticity_defect(&self) -> F {
        let n = self.grid.len();
        let mut worst = F::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self.values[(i, j)] - self.values[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Strict local maxima of `|rho|` over the 8-neighbourhood that exceed
    /// `threshold * max |rho|`, as `(x, x', |rho|)`, in grid order.
    pub fn peaks(&self, threshold: F) -> Vec<(F, F, F)> {
        let n = self.grid.len();
        let abs = self.values.mapv(|v| v.norm());
        let max = abs.iter().copied().fold(F::zero(), F::max);
        let mut out = Vec::new();
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                let v = abs[(i, j)];
                if v < threshold * max {
                    continue;
                }
                let is_peak = (i - 1..=i + 1)
                    .flat_map(|a| (j - 1..=j + 1).map(move |b| (a, b)))
                    .filter(|&(a, b)| (a, b) != (i, j))
                    .all(|(a, b)| abs[(a, b)] < v);
                if is_peak {
                    out.push((self.grid.point(i), self.grid.point(j), v));
                }
            }
        }
        out
    }

    /// Writes `x,x_prime,re,im` rows for every `stride`-th grid point.
    pub fn write_csv<W: Write>(&self, mut out: W, stride: usize) -> io::Result<()> {
        let stride = stride.max(1);
        writeln!(out, "x,x_prime,re,im")?;
        let n = self.grid.len();
        for i in (0..n).step_by(stride) {
            for j in (0..n).step_by(stride) {
                let v = self.values[(i, j)];
                writeln!(
                    out,
                    "{:e},{:e},{:e},{:e}",
                    self.grid.point(i),
                    self.grid.point(j),
                    v.re,
                    v.im
                )?;
            }
        }
        Ok(())
    }

    /// The closed-form terms of this matrix at its current time.
    pub fn terms(&self) -> Vec<GaussianTerm<F>> {
        let mass = self.params.mass();
        self.initial_terms
            .iter()
            .map(|term| term.evolve_free(mass, self.time))
            .collect()
    }
}

fn required_half_span<F: Real>(params: &ScenarioParams<F>, state: InitialState) -> F {
    let base = params.slit_separation() * F::lit(0.5) + F::lit(6.0) * params.slit_width();
    match (state, params.thermal_wavelength_sq()) {
        (InitialState::Thermal, Scale::Finite(l2)) => base + F::lit(3.0) * l2.sqrt(),
        _ => base,
    }
}

/// Default grid: [`DEFAULT_MATRIX_POINTS`] points on `+/-(d/2 + 6 sigma + 3 lambda)`.
pub fn default_matrix_grid<F: Real>(params: &ScenarioParams<F>, state: InitialState) -> Result<UniformGrid<F>> {
    UniformGrid::symmetric(required_half_span(params, state), DEFAULT_MATRIX_POINTS)
}

fn initial_terms<F: Real>(params: &ScenarioParams<F>, part: Part, state: InitialState) -> Result<Vec<GaussianTerm<F>>> {
    let inv_l2 = match (state, params.thermal_wavelength_sq()) {
        (InitialState::ZeroTemperature, _) => F::zero(),
        (InitialState::Thermal, Scale::Finite(l2)) => F::one() / l2,
        (InitialState::Thermal, Scale::Unbounded) => {
            return Err(Error::InvalidParameter {
                name: "temperature",
                value: params.temperature().as_f64(),
                invariant: "T > 0 for the thermal state (use the zero-temperature state)",
            })
        }
    };
    let s2 = params.slit_width() * params.slit_width();
    let d = params.slit_separation();
    let ln_pref = SlitPreparation::new(params).ln_normalization() - F::LN_2()
        - F::lit(0.5) * (F::lit(2.0) * F::PI() * s2).ln();
    let diag = Complex::from(inv_l2 + F::one() / (s2 + s2));
    let off = Complex::from(-inv_l2);
    let slits = [Slit::Upper, Slit::Lower];
    let mut terms = Vec::new();
    for i in slits {
        for j in slits {
            if !part.includes(i, j) {
                continue;
            }
            let (ci, cj) = (i.center(d), j.center(d));
            terms.push(GaussianTerm {
                ln_c: Complex::from(ln_pref - (ci * ci + cj * cj) / (F::lit(4.0) * s2)),
                b: [Complex::from(ci / (s2 + s2)), Complex::from(cj / (s2 + s2))],
                m11: diag,
                m12: off,
                m22: diag,
            });
        }
    }
    Ok(terms)
}

fn sample<F: Real>(terms: &[GaussianTerm<F>], grid: &UniformGrid<F>) -> Array2<Complex<F>> {
    let n = grid.len();
    let xs = grid.points();
    let rows: Vec<Complex<F>> = xs
        .par_iter()
        .flat_map_iter(|&x| {
            xs.iter().map(move |&xp| {
                terms
                    .iter()
                    .fold(Complex::new(F::zero(), F::zero()), |acc, term| acc + term.value(x, xp))
            })
        })
        .collect();
    Array2::from_shape_vec((n, n), rows).expect("row-major samples fill the matrix")
}

/// Prepared thermal state at `t = 0`, restricted to `part`.
pub fn initial_density_matrix<F: Real>(
    params: &ScenarioParams<F>,
    grid: &UniformGrid<F>,
    part: Part,
) -> Result<DensityMatrixGrid<F>> {
    initial_density_matrix_with(params, grid, part, InitialState::Thermal)
}

pub fn initial_density_matrix_with<F: Real>(
    params: &ScenarioParams<F>,
    grid: &UniformGrid<F>,
    part: Part,
    state: InitialState,
) -> Result<DensityMatrixGrid<F>> {
    let terms = initial_terms(params, part, state)?;
    let half = required_half_span(params, state);
    if !grid.covers(-half, half) {
        return Err(Error::GridTooSmall {
            what: "density-matrix grid must span +/-(d/2 + 6 sigma + 3 lambda_th)",
            captured: (grid.hi() - grid.lo()).as_f64(),
            required: (half + half).as_f64(),
        });
    }
    Ok(DensityMatrixGrid {
        grid: *grid,
        values: sample(&terms, grid),
        part,
        time: F::zero(),
        params: *params,
        state,
        initial_terms: terms,
    })
}

fn check_dissipationless<F: Real>(rho: &DensityMatrixGrid<F>) -> Result<()> {
    if rho.params.friction() != F::zero() {
        return Err(Error::UnsupportedRegime(
            "free unitary evolution of the density matrix requires gamma = 0",
        ));
    }
    Ok(())
}

/// Evolves `rho` by `t` under the free Hamiltonian. The grid keeps its point
/// count and widens to hold [`ENVELOPE_SPAN`] envelope standard deviations
/// of every term of the full matrix; it never shrinks, so `t = 0`
/// reproduces the input.
pub fn free_unitary_evolve<F: Real>(rho: &DensityMatrixGrid<F>, t: F) -> Result<DensityMatrixGrid<F>> {
    check_dissipationless(rho)?;
    check_time(t)?;
    let mass = rho.params.mass();
    let total = rho.time + t;
    let span = F::lit(ENVELOPE_SPAN);
    // sized from all four terms so that every part lands on the same grid
    let needed = initial_terms(&rho.params, Part::Full, rho.state)?
        .iter()
        .map(|term| {
            let (center, std) = term.evolve_free(mass, total).envelope();
            (center[0].abs() + span * std[0]).max(center[1].abs() + span * std[1])
        })
        .fold(F::zero(), F::max);
    let half = needed.max(rho.grid.hi()).max(-rho.grid.lo());
    let grid = if rho.grid.covers(-needed, needed) {
        rho.grid
    } else {
        UniformGrid::symmetric(half, rho.grid.len())?
    };
    free_unitary_evolve_on(rho, t, &grid)
}

/// As [`free_unitary_evolve`] but sampled on a caller-supplied grid.
pub fn free_unitary_evolve_on<F: Real>(
    rho: &DensityMatrixGrid<F>,
    t: F,
    grid: &UniformGrid<F>,
) -> Result<DensityMatrixGrid<F>> {
    check_dissipationless(rho)?;
    check_time(t)?;
    let total = rho.time + t;
    let evolved = DensityMatrixGrid {
        grid: *grid,
        values: Array2::zeros((0, 0)),
        time: total,
        ..rho.clone()
    };
    let values = sample(&evolved.terms(), grid);
    Ok(DensityMatrixGrid { values, ..evolved })
}

fn check_time<F: Real>(t: F) -> Result<()> {
    if !(t >= F::zero() && t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "time",
            value: t.as_f64(),
            invariant: "t >= 0 and finite",
        });
    }
    Ok(())
}

/// Hilbert-Schmidt size of the interference part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffDiagonalNorm<F> {
    /// `|a_OD|^2 = h^2 sum |rho_int|^2`.
    pub norm_sq: F,
    pub a_od: F,
    /// Bound on the grid error of `norm_sq`: the change against the grid
    /// with twice the spacing, plus a rounding allowance.
    pub error_estimate: F,
}

fn hilbert_schmidt<F: Real>(values: &Array2<Complex<F>>, stride: usize, h: F) -> F {
    let rows: Vec<usize> = (0..values.nrows()).step_by(stride).collect();
    let row_sums: Vec<F> = rows
        .par_iter()
        .map(|&i| {
            values
                .row(i)
                .iter()
                .step_by(stride)
                .map(|v| v.norm_sqr())
                .collect::<CompensatedSum<F>>()
                .total()
        })
        .collect();
    let total: CompensatedSum<F> = row_sums.into_iter().collect();
    total.total() * h * h
}

fn expect_part<F: Real>(rho: &DensityMatrixGrid<F>, part: Part) -> Result<()> {
    if rho.part != part {
        return Err(Error::PartMismatch {
            expected: part.name(),
            found: rho.part.name(),
        });
    }
    Ok(())
}

/// `a_OD` of an interference-part matrix.
pub fn off_diagonal_norm<F: Real>(rho_int: &DensityMatrixGrid<F>) -> Result<OffDiagonalNorm<F>> {
    expect_part(rho_int, Part::Interference)?;
    Ok(hs_norm(rho_int))
}

fn hs_norm<F: Real>(rho: &DensityMatrixGrid<F>) -> OffDiagonalNorm<F> {
    let h = rho.step();
    let fine = hilbert_schmidt(&rho.values, 1, h);
    let coarse = if rho.grid.len() >= 3 {
        hilbert_schmidt(&rho.values, 2, h + h)
    } else {
        fine
    };
    let rounding = F::lit(100.0) * F::epsilon() * fine;
    OffDiagonalNorm {
        norm_sq: fine,
        a_od: fine.sqrt(),
        error_estimate: (fine - coarse).abs() + rounding,
    }
}

/// `sqrt(Tr rho_int rho_int^dagger / Tr rho_cl rho_cl^dagger)`; tends to
/// `exp(-d^2 / (2 lambda^2))` for narrow slits, without the `1/sqrt 2`.
pub fn normalized_off_diagonal<F: Real>(rho_int: &DensityMatrixGrid<F>, rho_cl: &DensityMatrixGrid<F>) -> Result<F> {
    expect_part(rho_int, Part::Interference)?;
    expect_part(rho_cl, Part::Classical)?;
    Ok((hs_norm(rho_int).norm_sq / hs_norm(rho_cl).norm_sq).sqrt())
}

/// Narrow-slit closed form of `a_OD`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormAod<F> {
    /// `exp(-d^2 / (2 lambda^2)) / sqrt 2`.
    pub value: F,
    /// `a_inf / sqrt 2`, which `value` approaches as `sigma -> 0`.
    pub saturation_over_sqrt2: F,
    /// False once `sigma >= 0.2 lambda`.
    pub valid: bool,
}

pub fn closed_form_a_od<F: Real>(params: &ScenarioParams<F>) -> ClosedFormAod<F> {
    let d2 = params.slit_separation() * params.slit_separation();
    let s2 = params.slit_width() * params.slit_width();
    let inv_sqrt2 = F::FRAC_1_SQRT_2();
    match params.thermal_wavelength_sq() {
        Scale::Finite(l2) => ClosedFormAod {
            value: inv_sqrt2 * (-d2 / (l2 + l2)).exp(),
            saturation_over_sqrt2: inv_sqrt2 * (-d2 / (F::lit(8.0) * s2 + l2 + l2)).exp(),
            valid: params.slit_width() < F::lit(NARROW_SLIT_LIMIT) * l2.sqrt(),
        },
        Scale::Unbounded => ClosedFormAod {
            value: inv_sqrt2,
            saturation_over_sqrt2: inv_sqrt2,
            valid: true,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interference::total_density;
    use crate::quadrature::{integrate_2d, QuadratureConfig};
    use std::f64::consts::PI;

    fn params(sigma_over_d: f64) -> ScenarioParams<f64> {
        ScenarioParams::dimensionless(sigma_over_d, 1.0, 0.0).unwrap()
    }

    fn small_grid(p: &ScenarioParams<f64>) -> UniformGrid<f64> {
        UniformGrid::symmetric(required_half_span(p, InitialState::Thermal), 257).unwrap()
    }

    #[test]
    fn initial_diagonal_is_slit_density() {
        let p = params(0.05);
        let g = small_grid(&p);
        let rho = initial_density_matrix(&p, &g, Part::Full).unwrap();
        let prep = SlitPreparation::new(&p);
        for (i, v) in rho.diagonal().iter().enumerate() {
            let a = prep.amplitude(g.point(i));
            assert!((v.re - a * a).abs() <= 1e-12 * (a * a).max(1e-300));
            assert_eq!(v.im, 0.0);
        }
        assert!((rho.trace().re - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cross_peak_ratio() {
        let p = params(0.05);
        let terms_int = initial_terms(&p, Part::Interference, InitialState::Thermal).unwrap();
        let terms_cl = initial_terms(&p, Part::Classical, InitialState::Thermal).unwrap();
        let eval = |ts: &[GaussianTerm<f64>], x: f64, y: f64| ts.iter().map(|t| t.value(x, y)).sum::<Complex<f64>>();
        let ratio = eval(&terms_int, 0.5, -0.5).re / eval(&terms_cl, 0.5, 0.5).re;
        assert!((ratio - (-0.5_f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn parts_are_hermitian_and_add_up() {
        let p = params(0.05);
        let g = small_grid(&p);
        let full = initial_density_matrix(&p, &g, Part::Full).unwrap();
        let cl = initial_density_matrix(&p, &g, Part::Classical).unwrap();
        let int = initial_density_matrix(&p, &g, Part::Interference).unwrap();
        for m in [&full, &cl, &int] {
            assert!(m.hermiticity_defect() <= 1e-12);
        }
        let t = 0.07;
        let (full, cl, int) = (
            free_unitary_evolve(&full, t).unwrap(),
            free_unitary_evolve(&cl, t).unwrap(),
            free_unitary_evolve(&int, t).unwrap(),
        );
        let scale = full.values().iter().map(|v| v.norm()).fold(0.0, f64::max);
        for m in [&full, &cl, &int] {
            assert!(m.hermiticity_defect() <= 1e-12 * scale);
        }
        let sum = cl.values() + int.values();
        for (a, b) in sum.iter().zip(full.values()) {
            assert!((a - b).norm() <= 1e-13 * scale);
        }
        assert!(full.diagonal().iter().all(|v| v.re >= 0.0));
    }

    #[test]
    fn zero_temperature_needs_flag() {
        let p = ScenarioParams::dimensionless(0.05, 0.0, 0.0).unwrap();
        let g = UniformGrid::symmetric(1.0, 129).unwrap();
        assert!(matches!(
            initial_density_matrix(&p, &g, Part::Full),
            Err(Error::InvalidParameter { name: "temperature", .. })
        ));
        let rho = initial_density_matrix_with(&p, &g, Part::Interference, InitialState::ZeroTemperature).unwrap();
        let a = off_diagonal_norm(&rho).unwrap().a_od;
        // pure state: Tr rho_int^2 = 2 (N/2)^2 (1 + overlap^2)
        let n = SlitPreparation::new(&p).normalization();
        let overlap = (-50.0_f64).exp();
        assert!((a - (0.5 * n * n * (1.0 + overlap * overlap)).sqrt()).abs() < 1e-10);
    }

    #[test]
    fn grid_must_cover_coherence_length() {
        let p = params(0.05);
        let g = UniformGrid::symmetric(1.0, 129).unwrap();
        assert!(matches!(initial_density_matrix(&p, &g, Part::Full), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn wrong_part_rejected() {
        let p = params(0.05);
        let rho = initial_density_matrix(&p, &small_grid(&p), Part::Classical).unwrap();
        assert_eq!(
            off_diagonal_norm(&rho).unwrap_err(),
            Error::PartMismatch { expected: "interference", found: "classical" }
        );
    }

    #[test]
    fn dissipative_evolution_unsupported() {
        let p = ScenarioParams::dimensionless(0.05, 1.0, 0.3).unwrap();
        let rho = initial_density_matrix(&p, &small_grid(&p), Part::Full).unwrap();
        assert!(matches!(free_unitary_evolve(&rho, 0.1), Err(Error::UnsupportedRegime(_))));
    }

    #[test]
    fn zero_time_is_identity() {
        let p = params(0.05);
        let rho = initial_density_matrix(&p, &small_grid(&p), Part::Full).unwrap();
        let same = free_unitary_evolve(&rho, 0.0).unwrap();
        assert_eq!(same.grid(), rho.grid());
        for (a, b) in same.values().iter().zip(rho.values()) {
            assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn evolved_diagonal_matches_closed_form_density() {
        let p = params(0.05);
        let rho = initial_density_matrix(&p, &small_grid(&p), Part::Full).unwrap();
        let t = 0.1;
        let ev = free_unitary_evolve(&rho, t).unwrap();
        for (i, v) in ev.diagonal().iter().enumerate() {
            let x = ev.grid().point(i);
            let exact = total_density(&p, x, t).unwrap();
            if exact > 1e-200 {
                assert!(((v.re - exact) / exact).abs() < 1e-8, "x={x}");
            }
        }
    }

    #[test]
    fn evolution_matches_discretized_propagator() {
        // rho(x, x', t) = int int K(x, y) rho0(y, y') K*(x', y') dy dy'
        let p = params(0.05);
        let terms = initial_terms(&p, Part::Full, InitialState::Thermal).unwrap();
        let t = 0.05;
        let a = 1.0 / t;
        let rho0 = |y: f64, yp: f64| terms.iter().map(|term| term.value(y, yp)).sum::<Complex<f64>>();
        let cfg = QuadratureConfig { abs_tol: 1e-9, rel_tol: 1e-9, max_intervals: 4000, initial_panels: 16 };
        for &(x, xp) in &[(0.1, -0.2), (0.4, 0.45)] {
            let direct = integrate_2d(
                |y, yp| {
                    let phase = 0.5 * a * ((x - y) * (x - y) - (xp - yp) * (xp - yp));
                    Ok(rho0(y, yp) * Complex::new(0.0, phase).exp() * (a / (2.0 * PI)))
                },
                (-1.0, 1.0),
                (-1.0, 1.0),
                &cfg,
            )
            .unwrap()
            .value;
            let closed: Complex<f64> = terms.iter().map(|term| term.evolve_free(1.0, t).value(x, xp)).sum();
            assert!((direct - closed).norm() < 1e-7 * closed.norm(), "{direct} vs {closed}");
        }
    }

    #[test]
    fn split_consistency_and_trace_preservation() {
        let p = params(0.05);
        let g = small_grid(&p);
        let n = SlitPreparation::new(&p).normalization();
        for &t in &[0.0, 0.1, 0.3] {
            let cl = free_unitary_evolve(&initial_density_matrix(&p, &g, Part::Classical).unwrap(), t).unwrap();
            let int = free_unitary_evolve(&initial_density_matrix(&p, &g, Part::Interference).unwrap(), t).unwrap();
            let full = free_unitary_evolve(&initial_density_matrix(&p, &g, Part::Full).unwrap(), t).unwrap();
            assert!((cl.trace().re - n).abs() < 1e-8);
            assert!((int.trace().re - (1.0 - n)).abs() < 1e-8);
            assert!((full.trace().re - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn four_peaks_at_slit_pairs() {
        let p = params(0.05);
        let rho = initial_density_matrix(&p, &small_grid(&p), Part::Full).unwrap();
        let peaks = rho.peaks(1e-3);
        assert_eq!(peaks.len(), 4);
        let h = rho.step();
        for (x, xp, _) in peaks {
            assert!((x.abs() - 0.5).abs() <= h && (xp.abs() - 0.5).abs() <= h);
        }
    }

    #[test]
    fn a_od_falls_with_temperature() {
        let mut last = f64::INFINITY;
        for &temp in &[0.5, 1.0, 4.0] {
            let p = ScenarioParams::dimensionless(0.01, temp, 0.0).unwrap();
            let g = UniformGrid::symmetric(required_half_span(&p, InitialState::Thermal), 513).unwrap();
            let a = off_diagonal_norm(&initial_density_matrix(&p, &g, Part::Interference).unwrap())
                .unwrap()
                .a_od;
            assert!(a < last);
            last = a;
        }
    }

    #[test]
    fn refinement_within_error_estimate() {
        let p = params(0.01);
        let g = UniformGrid::symmetric(required_half_span(&p, InitialState::Thermal), 513).unwrap();
        let coarse = off_diagonal_norm(&initial_density_matrix(&p, &g, Part::Interference).unwrap()).unwrap();
        let fine = off_diagonal_norm(&initial_density_matrix(&p, &g.refined(), Part::Interference).unwrap()).unwrap();
        assert!((fine.norm_sq - coarse.norm_sq).abs() <= coarse.error_estimate);
    }

    #[test]
    fn closed_form_limits() {
        let c = closed_form_a_od(&params(0.05));
        assert!((c.value - (-0.5_f64).exp() / 2.0_f64.sqrt()).abs() < 1e-15);
        assert!(c.valid);
        let cold = closed_form_a_od(&ScenarioParams::dimensionless(0.05, 0.0, 0.0).unwrap());
        assert_eq!(cold.value, std::f64::consts::FRAC_1_SQRT_2);
        let wide = closed_form_a_od(&ScenarioParams::dimensionless(0.25, 1.0, 0.0).unwrap());
        assert!(!wide.valid);
    }

    #[test]
    fn normalized_variant_drops_sqrt2() {
        let p = params(0.01);
        let g = UniformGrid::symmetric(required_half_span(&p, InitialState::Thermal), 513).unwrap();
        let int = initial_density_matrix(&p, &g, Part::Interference).unwrap();
        let cl = initial_density_matrix(&p, &g, Part::Classical).unwrap();
        let r = normalized_off_diagonal(&int, &cl).unwrap();
        assert!((r - (-0.5_f64).exp()).abs() < 1e-3);
    }

    #[test]
    fn csv_export_has_header_and_rows() {
        let p = params(0.05);
        let rho = initial_density_matrix(&p, &small_grid(&p), Part::Full).unwrap();
        let mut buf = Vec::new();
        rho.write_csv(&mut buf, 64).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,x_prime,re,im"));
        assert_eq!(lines.count(), 5 * 5);
    }
}
