//! Brute-force recomputation of `P(x, t)` by two-dimensional quadrature of
//! the propagation integral
//!
//! ```text
//! P(x_f, t) = int dX int dq J0(X, x_f + q, t) alpha*(q - X/2) alpha(q + X/2)
//! J0(X, Y, t) = exp(i X Y / (2A) + X^2 Q / (4 A^2)) / (4 pi A)
//! ```
//!
//! Nothing here uses the closed-form width or densities; only the bath
//! correlators `A`, `Q` and the slit preparation enter.
//!
//! The two-point function splits into four shifted copies of the single-slit
//! kernel `t1(X, q) = exp(-q^2/(2 sigma^2) - X^2/(8 sigma^2)) / sqrt(2 pi sigma^2)`.
//! Each term's log-integrand is a quadratic form in `(X, q)`, hence entire,
//! so the integration contour is moved through its complex saddle point
//! before integrating numerically. On the moved contour the integrand is a
//! non-oscillating-at-scale Gaussian of unit peak, which keeps the relative
//! accuracy even where `P` is thirty orders below its maximum and the
//! real-axis integrand would cancel catastrophically.

use num_complex::Complex;
use rayon::prelude::*;

use crate::correlators::{correlator, BathCorrelators, ScenarioParams};
use crate::error::{Error, Result};
use crate::interference::{total_density, SlitPreparation};
use crate::quadrature::{integrate_2d, QuadratureConfig};
use crate::scalar::Real;

/// Settings of an oracle evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig<F> {
    pub quadrature: QuadratureConfig<F>,
    /// Half-width of the integration box, in standard deviations of the
    /// integrand envelope along each axis.
    pub truncation: F,
    /// Largest admissible `|Im P| / |Re P|`.
    pub residue_tolerance: F,
}

impl<F: Real> Default for OracleConfig<F> {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig {
                abs_tol: F::zero(),
                rel_tol: F::lit(1e-12),
                max_intervals: 200,
                initial_panels: 4,
            },
            truncation: F::lit(8.0),
            residue_tolerance: F::lit(1e-9),
        }
    }
}

impl<F: Real> OracleConfig<F> {
    pub fn with_tolerance(mut self, rel_tol: F) -> Self {
        self.quadrature.rel_tol = rel_tol;
        self
    }

    pub fn with_budget(mut self, max_intervals: usize) -> Self {
        self.quadrature.max_intervals = max_intervals;
        self
    }
}

/// One value of the diagonal propagation function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorSample<F> {
    /// Coordinate difference `X`.
    pub x_diff: F,
    /// Propagated coordinate `Y`.
    pub y: F,
    pub t: F,
    pub value: Complex<F>,
}

fn checked_correlators<F: Real>(params: &ScenarioParams<F>, t: F) -> Result<BathCorrelators<F>> {
    let corr = correlator(params, t)?;
    if !(corr.a > F::zero()) {
        return Err(Error::SingularTime);
    }
    Ok(corr)
}

/// `ln J0` at complex arguments.
fn ln_j0<F: Real>(corr: &BathCorrelators<F>, x_diff: Complex<F>, y: Complex<F>) -> Complex<F> {
    let a = corr.a;
    let i = Complex::new(F::zero(), F::one());
    let pref = -(F::lit(4.0) * F::PI() * a).ln();
    i * x_diff * y / (a + a) + x_diff * x_diff * (corr.q / (F::lit(4.0) * a * a)) + pref
}

/// `J0(X, Y, t)`; singular at `t = 0`, where `P(x, 0) = |alpha(x)|^2` instead.
pub fn j0<F: Real>(params: &ScenarioParams<F>, x_diff: F, y: F, t: F) -> Result<PropagatorSample<F>> {
    let corr = checked_correlators(params, t)?;
    let value = ln_j0(&corr, Complex::from(x_diff), Complex::from(y)).exp();
    Ok(PropagatorSample { x_diff, y, t, value })
}

/// The four shifted copies of the single-slit kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelTerm {
    /// `t1(X, q - d/2)`: both amplitudes through the slit at `+d/2`.
    ClassicalUpper,
    /// `t1(X, q + d/2)`: both amplitudes through the slit at `-d/2`.
    ClassicalLower,
    /// `t1(X - d, q)`.
    InterferenceMinus,
    /// `t1(X + d, q)`.
    InterferencePlus,
}

impl KernelTerm {
    pub const ALL: [KernelTerm; 4] = [
        KernelTerm::ClassicalUpper,
        KernelTerm::ClassicalLower,
        KernelTerm::InterferenceMinus,
        KernelTerm::InterferencePlus,
    ];

    /// `(dX, dq)` such that the term is `t1(X + dX, q + dq)`.
    pub fn shift<F: Real>(self, d: F) -> (F, F) {
        let half = d * F::lit(0.5);
        match self {
            KernelTerm::ClassicalUpper => (F::zero(), -half),
            KernelTerm::ClassicalLower => (F::zero(), half),
            KernelTerm::InterferenceMinus => (-d, F::zero()),
            KernelTerm::InterferencePlus => (d, F::zero()),
        }
    }

    pub fn is_interference(self) -> bool {
        matches!(self, KernelTerm::InterferenceMinus | KernelTerm::InterferencePlus)
    }
}

fn ln_t1<F: Real>(sigma: F, x_diff: Complex<F>, q: Complex<F>) -> Complex<F> {
    let s2 = sigma * sigma;
    -q * q / (s2 + s2) - x_diff * x_diff / (F::lit(8.0) * s2)
        - F::lit(0.5) * (F::lit(2.0) * F::PI() * s2).ln()
}

/// Single-slit kernel `t1(X, q) = alpha_1*(q - X/2) alpha_1(q + X/2)`.
pub fn base_kernel<F: Real>(params: &ScenarioParams<F>, x_diff: F, q: F) -> F {
    ln_t1(params.slit_width(), Complex::from(x_diff), Complex::from(q)).re.exp()
}

/// The four kernel terms at one point, each carrying the `N/2` prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelDecomposition<F> {
    /// In the order of [`KernelTerm::ALL`].
    pub terms: [F; 4],
    pub sum: F,
}

pub fn kernel_decomposition<F: Real>(params: &ScenarioParams<F>, x_diff: F, q: F) -> KernelDecomposition<F> {
    let half_n = SlitPreparation::new(params).normalization() * F::lit(0.5);
    let d = params.slit_separation();
    let terms = KernelTerm::ALL.map(|term| {
        let (dx, dq) = term.shift(d);
        half_n * base_kernel(params, x_diff + dx, q + dq)
    });
    KernelDecomposition {
        terms,
        sum: terms.iter().copied().sum(),
    }
}

/// `alpha*(q - X/2) alpha(q + X/2)` evaluated directly from the slit amplitude.
pub fn two_point_function<F: Real>(params: &ScenarioParams<F>, x_diff: F, q: F) -> F {
    let prep = SlitPreparation::new(params);
    let half = x_diff * F::lit(0.5);
    prep.amplitude(q - half) * prep.amplitude(q + half)
}

/// Initial state fed through the propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preparation {
    DoubleSlit,
    /// A single normalized Gaussian slit of width `sigma` at the origin.
    SingleSlit,
}

/// Oracle density and its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue<F> {
    pub x: F,
    pub t: F,
    /// `Re` of the summed terms.
    pub density: F,
    /// `Im` of the summed terms; zero up to quadrature error.
    pub imaginary_residue: F,
    /// Sum of the quadrature error bounds of the terms.
    pub error_bound: F,
    /// Contribution of the two classical terms.
    pub classical: F,
    /// Contribution of the two interference terms.
    pub interference: F,
}

struct Term<F> {
    value: Complex<F>,
    error: F,
}

/// Integrates `exp(ln_j0(X, x_f + q) + ln_weight + ln_t1(X + dX, q + dq))`.
fn integrate_term<F: Real>(
    corr: &BathCorrelators<F>,
    sigma: F,
    x_f: F,
    shift: (F, F),
    ln_weight: F,
    cfg: &OracleConfig<F>,
) -> Result<Term<F>> {
    let (dx, dq) = shift;
    let s2 = sigma * sigma;
    let a = corr.a;
    let i = Complex::new(F::zero(), F::one());
    let ln_f = |x: Complex<F>, q: Complex<F>| {
        ln_j0(corr, x, q + x_f) + ln_weight + ln_t1(sigma, x + dx, q + dq)
    };
    // ln f = c + b.z - z.M.z / 2 with z = (X, q)
    let m_xx = F::one() / (F::lit(4.0) * s2) - corr.q / (F::lit(2.0) * a * a);
    let m_qq = F::one() / s2;
    let m_xq = -i / (a + a);
    let b_x = i * (x_f / (a + a)) - dx / (F::lit(4.0) * s2);
    let b_q = Complex::from(-dq / s2);
    let det = Complex::from(m_xx * m_qq) - m_xq * m_xq;
    let sx = (b_x * m_qq - m_xq * b_q) / det;
    let sq = (b_q * m_xx - m_xq * b_x) / det;
    let peak = ln_f(sx, sq);

    let hx = cfg.truncation / m_xx.sqrt();
    let hq = cfg.truncation / m_qq.sqrt();
    // Inner integrals far out along X cancel to almost nothing, so accuracy
    // is measured against the area under the unit-peak envelope.
    let envelope = F::lit(2.0) * F::PI() / (m_xx * m_qq).sqrt();
    let quad = QuadratureConfig {
        abs_tol: cfg.quadrature.abs_tol.max(cfg.quadrature.rel_tol * envelope),
        ..cfg.quadrature
    };
    let est = integrate_2d(
        |u, v| Ok((ln_f(sx + u, sq + v) - peak).exp()),
        (-hx, hx),
        (-hq, hq),
        &quad,
    )?;
    let scale = peak.exp();
    Ok(Term {
        value: scale * est.value,
        error: scale.norm() * est.error,
    })
}

/// `P(x_f, t)` by quadrature of the propagation integral.
pub fn oracle_density<F: Real>(
    params: &ScenarioParams<F>,
    x_f: F,
    t: F,
    cfg: &OracleConfig<F>,
) -> Result<OracleValue<F>> {
    oracle_density_with(params, x_f, t, Preparation::DoubleSlit, cfg)
}

pub fn oracle_density_with<F: Real>(
    params: &ScenarioParams<F>,
    x_f: F,
    t: F,
    preparation: Preparation,
    cfg: &OracleConfig<F>,
) -> Result<OracleValue<F>> {
    let corr = checked_correlators(params, t)?;
    let sigma = params.slit_width();
    let zero = Complex::new(F::zero(), F::zero());
    let (mut classical, mut interference, mut error) = (zero, zero, F::zero());
    match preparation {
        Preparation::SingleSlit => {
            let term = integrate_term(&corr, sigma, x_f, (F::zero(), F::zero()), F::zero(), cfg)?;
            classical = term.value;
            error = term.error;
        }
        Preparation::DoubleSlit => {
            let ln_weight = SlitPreparation::new(params).ln_normalization() - F::LN_2();
            let d = params.slit_separation();
            for kind in KernelTerm::ALL {
                let term = integrate_term(&corr, sigma, x_f, kind.shift(d), ln_weight, cfg)?;
                if kind.is_interference() {
                    interference += term.value;
                } else {
                    classical += term.value;
                }
                error += term.error;
            }
        }
    }
    let total = classical + interference;
    if total.im.abs() > cfg.residue_tolerance * total.re.abs() + error {
        return Err(Error::NonRealResult {
            residue: total.im.as_f64(),
            density: total.re.as_f64(),
        });
    }
    Ok(OracleValue {
        x: x_f,
        t,
        density: total.re,
        imaginary_residue: total.im,
        error_bound: error,
        classical: classical.re,
        interference: interference.re,
    })
}

/// Oracle at many positions, evaluated in parallel; order follows `xs`.
pub fn oracle_profile<F: Real>(
    params: &ScenarioParams<F>,
    xs: &[F],
    t: F,
    preparation: Preparation,
    cfg: &OracleConfig<F>,
) -> Result<Vec<OracleValue<F>>> {
    xs.par_iter()
        .map(|&x| oracle_density_with(params, x, t, preparation, cfg))
        .collect()
}

/// One comparison of the oracle against the closed-form density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificationRow<F> {
    pub x: F,
    pub t: F,
    pub closed_form: F,
    pub oracle: F,
    pub rel_err: F,
    /// False where the closed form lies below `1e-30` of its maximum over
    /// the sampled positions; such rows are reported but not judged.
    pub judged: bool,
}

/// Cutoff below which a density is too small to be judged.
pub const CERTIFICATION_FLOOR: f64 = 1e-30;

/// Compares the oracle with [`total_density`] at `xs` for one time.
pub fn certify<F: Real>(
    params: &ScenarioParams<F>,
    xs: &[F],
    t: F,
    cfg: &OracleConfig<F>,
) -> Result<Vec<CertificationRow<F>>> {
    let oracle = oracle_profile(params, xs, t, Preparation::DoubleSlit, cfg)?;
    let closed = xs
        .iter()
        .map(|&x| total_density(params, x, t))
        .collect::<Result<Vec<F>>>()?;
    let peak = closed.iter().copied().fold(F::zero(), F::max);
    Ok(xs
        .iter()
        .zip(oracle.iter().zip(&closed))
        .map(|(&x, (o, &c))| CertificationRow {
            x,
            t,
            closed_form: c,
            oracle: o.density,
            rel_err: ((o.density - c) / c).abs(),
            judged: c > F::lit(CERTIFICATION_FLOOR) * peak,
        })
        .collect())
}

/// Positions used by the certification suite: `count` points spanning
/// `+/-(d/2 + 6 w(t))`, computed from the propagator moments alone.
pub fn certification_points<F: Real>(params: &ScenarioParams<F>, t: F, count: usize) -> Result<Vec<F>> {
    let corr = correlator(params, t)?;
    let s2 = params.slit_width() * params.slit_width();
    // second moment of the single-slit packet
    let spread = (s2 + corr.a * corr.a / s2 - (corr.q + corr.q)).sqrt();
    let half = params.slit_separation() * F::lit(0.5) + F::lit(6.0) * spread;
    crate::grid::sample_points(-half, half, count, crate::grid::Spacing::Linear)
}
