//! Probability density behind the double slit and the attenuation factors
//! derived from it.
//!
//! The density decomposes as
//!
//! ```text
//! P(x,t) = P_cl(x,t) + P_int(x,t) cos(x d A / (2 sigma^2 w^2))
//! P_cl   = (P_cl^+ + P_cl^-) / 2,       P_cl^(+/-) = N P_1(x +/- d/2, t)
//! P_1    = exp(-x^2 / (2 w^2)) / sqrt(2 pi w^2)
//! P_int  = N exp(-[x^2 + d^2 (sigma^2 - 2Q) / (4 sigma^2)] / (2 w^2)) / sqrt(2 pi w^2)
//! ```
//!
//! At short times every part is of order `exp(-d^2 / (8 sigma^2))`, far below
//! what a linear representation resolves for narrow slits, so all parts are
//! evaluated as logarithms first and the attenuation factors are formed as
//! differences of logarithms.

use rayon::prelude::*;

use crate::correlators::{correlator, timescales, BathCorrelators, Scale, ScenarioParams};
use crate::error::{Error, Result};
use crate::grid::UniformGrid;
use crate::scalar::{ln_cosh, Real};

/// Points in the default spatial grid.
pub const DEFAULT_PROFILE_POINTS: usize = 2048;
/// Largest admissible deviation of the grid-integrated probability from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// Two-Gaussian transmission function of the double slit,
/// `alpha(x) = sqrt(N) (8 pi sigma^2)^(-1/4) (exp(-(x-d/2)^2/4sigma^2) + exp(-(x+d/2)^2/4sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitPreparation<F> {
    sigma: F,
    separation: F,
    ln_norm: F,
}

impl<F: Real> SlitPreparation<F> {
    pub fn new(params: &ScenarioParams<F>) -> Self {
        let sigma = params.slit_width();
        let separation = params.slit_separation();
        Self {
            sigma,
            separation,
            ln_norm: -overlap_exponent(sigma, separation).exp().ln_1p(),
        }
    }

    /// `N = (1 + exp(-d^2 / (8 sigma^2)))^-1`.
    pub fn normalization(&self) -> F {
        self.ln_norm.exp()
    }

    pub fn ln_normalization(&self) -> F {
        self.ln_norm
    }

    /// Transmission amplitude `alpha(x)`.
    pub fn amplitude(&self, x: F) -> F {
        let four_s2 = F::lit(4.0) * self.sigma * self.sigma;
        let half_d = self.separation * F::lit(0.5);
        let pref = (F::lit(0.5) * self.ln_norm).exp()
            / (F::lit(8.0) * F::PI() * self.sigma * self.sigma).powf(F::lit(0.25));
        pref * ((-(x - half_d).powi(2) / four_s2).exp() + (-(x + half_d).powi(2) / four_s2).exp())
    }
}

/// `-d^2 / (8 sigma^2)`, the log of the initial overlap of the slit Gaussians.
fn overlap_exponent<F: Real>(sigma: F, d: F) -> F {
    -d * d / (F::lit(8.0) * sigma * sigma)
}

/// Classical (non-interfering) density and its two single-slit halves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalDensity<F> {
    /// `P_cl = (P_cl^+ + P_cl^-) / 2`.
    pub total: F,
    /// `P_cl^+ = N P_1(x + d/2)`, the packet from the slit at `-d/2`.
    pub plus: F,
    /// `P_cl^- = N P_1(x - d/2)`, the packet from the slit at `+d/2`.
    pub minus: F,
}

/// Closed-form density evaluator frozen at one time.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<F> {
    params: ScenarioParams<F>,
    corr: BathCorrelators<F>,
    ln_norm: F,
}

impl<F: Real> Snapshot<F> {
    pub fn new(params: &ScenarioParams<F>, t: F) -> Result<Self> {
        Ok(Self {
            params: *params,
            corr: correlator(params, t)?,
            ln_norm: SlitPreparation::new(params).ln_normalization(),
        })
    }

    pub fn time(&self) -> F {
        self.corr.time
    }

    pub fn correlators(&self) -> &BathCorrelators<F> {
        &self.corr
    }

    pub fn width_sq(&self) -> F {
        self.corr.width_sq
    }

    fn two_w2(&self) -> F {
        self.corr.width_sq + self.corr.width_sq
    }

    fn ln_gauss_norm(&self) -> F {
        -F::lit(0.5) * (F::lit(2.0) * F::PI() * self.corr.width_sq).ln()
    }

    /// Shared part of `ln P_cl` and `ln P_int`: `ln N - ln sqrt(2 pi w^2) - (x^2 + d^2/4)/(2 w^2)`.
    fn ln_common(&self, x: F) -> F {
        let d = self.params.slit_separation();
        self.ln_norm + self.ln_gauss_norm() - (x * x + d * d * F::lit(0.25)) / self.two_w2()
    }

    pub fn ln_single_slit(&self, x: F) -> F {
        self.ln_gauss_norm() - x * x / self.two_w2()
    }

    /// Single-slit density `P_1(x, t)`.
    pub fn single_slit(&self, x: F) -> F {
        self.ln_single_slit(x).exp()
    }

    /// `(ln P_cl^+, ln P_cl^-, ln P_cl)`.
    pub fn ln_classical(&self, x: F) -> (F, F, F) {
        let half_d = self.params.slit_separation() * F::lit(0.5);
        let plus = self.ln_norm + self.ln_single_slit(x + half_d);
        let minus = self.ln_norm + self.ln_single_slit(x - half_d);
        // (P+ + P-)/2 = N/sqrt(2 pi w^2) exp(-(x^2 + d^2/4)/2w^2) cosh(x d / 2w^2)
        let total = self.ln_common(x) + ln_cosh(x * self.params.slit_separation() / self.two_w2());
        (plus, minus, total)
    }

    pub fn classical(&self, x: F) -> ClassicalDensity<F> {
        let (plus, minus, total) = self.ln_classical(x);
        ClassicalDensity {
            total: total.exp(),
            plus: plus.exp(),
            minus: minus.exp(),
        }
    }

    /// `ln P_int`. The exponent `-[x^2 + d^2 (sigma^2 - 2Q)/(4 sigma^2)]/(2 w^2)`
    /// is split as `-(x^2 + d^2/4)/(2 w^2) + Q d^2 / (4 sigma^2 w^2)` so that
    /// `P_int <= P_cl` holds exactly in floating point.
    pub fn ln_interference_amplitude(&self, x: F) -> F {
        self.ln_common(x) + self.ln_attenuation_flo()
    }

    /// Envelope of the interference term, `P_int(x, t)`.
    pub fn interference_amplitude(&self, x: F) -> F {
        self.ln_interference_amplitude(x).exp()
    }

    /// `x d A / (2 sigma^2 w^2)`; identically zero at `t = 0`.
    pub fn fringe_phase(&self, x: F) -> F {
        let s2 = self.params.slit_width() * self.params.slit_width();
        x * self.params.slit_separation() * self.corr.a / (s2 * self.two_w2())
    }

    /// Full density `P(x, t)`.
    pub fn total(&self, x: F) -> F {
        let (_, _, ln_cl) = self.ln_classical(x);
        ln_cl.exp() + self.interference_amplitude(x) * self.fringe_phase(x).cos()
    }

    /// `ln a_FLO = ln P_int(0,t) - ln P_cl(0,t)`.
    pub fn ln_attenuation_flo(&self) -> F {
        let d = self.params.slit_separation();
        let s = self.params.slit_width();
        // ln P_int(0) - ln P_cl(0): the common parts cancel and ln cosh(0) = 0
        self.corr.q * d * d / (F::lit(4.0) * s * s * self.corr.width_sq)
    }

    /// `ln a_2 = ln P_int(0,t) - ln N - ln P_1(0,t)`.
    pub fn ln_attenuation_a2(&self) -> F {
        self.ln_interference_amplitude(F::zero()) - self.ln_norm - self.ln_single_slit(F::zero())
    }

    /// Position-dependent form `P_int(x) / sqrt(P_cl^+(x) P_cl^-(x))`;
    /// algebraically independent of `x` and equal to `a_FLO`.
    pub fn attenuation_flo_at(&self, x: F) -> F {
        let (plus, minus, _) = self.ln_classical(x);
        (self.ln_interference_amplitude(x) - F::lit(0.5) * (plus + minus)).exp()
    }
}

pub fn single_slit_density<F: Real>(params: &ScenarioParams<F>, x: F, t: F) -> Result<F> {
    Ok(Snapshot::new(params, t)?.single_slit(x))
}

pub fn classical_density<F: Real>(params: &ScenarioParams<F>, x: F, t: F) -> Result<ClassicalDensity<F>> {
    Ok(Snapshot::new(params, t)?.classical(x))
}

pub fn interference_amplitude<F: Real>(params: &ScenarioParams<F>, x: F, t: F) -> Result<F> {
    Ok(Snapshot::new(params, t)?.interference_amplitude(x))
}

pub fn fringe_phase<F: Real>(params: &ScenarioParams<F>, x: F, t: F) -> Result<F> {
    Ok(Snapshot::new(params, t)?.fringe_phase(x))
}

pub fn total_density<F: Real>(params: &ScenarioParams<F>, x: F, t: F) -> Result<F> {
    Ok(Snapshot::new(params, t)?.total(x))
}

/// FLO attenuation factor `a_FLO(t) = P_int(0,t) / P_cl(0,t)`.
pub fn attenuation_flo<F: Real>(params: &ScenarioParams<F>, t: F) -> Result<F> {
    Ok(Snapshot::new(params, t)?.ln_attenuation_flo().exp())
}

/// Alternative attenuation factor `a_2(t) = P_int(0,t) / (N P_1(0,t))`.
pub fn attenuation_a2<F: Real>(params: &ScenarioParams<F>, t: F) -> Result<F> {
    Ok(Snapshot::new(params, t)?.ln_attenuation_a2().exp())
}

pub fn ln_attenuation_flo<F: Real>(params: &ScenarioParams<F>, t: F) -> Result<F> {
    Ok(Snapshot::new(params, t)?.ln_attenuation_flo())
}

pub fn ln_attenuation_a2<F: Real>(params: &ScenarioParams<F>, t: F) -> Result<F> {
    Ok(Snapshot::new(params, t)?.ln_attenuation_a2())
}

/// Late-time value `a_inf = exp(-d^2 / (8 sigma^2 + 2 lambda_th^2))` shared
/// by both attenuation factors at zero friction; 1 at `T = 0`.
pub fn saturation_a_inf<F: Real>(params: &ScenarioParams<F>) -> F {
    let d = params.slit_separation();
    let s = params.slit_width();
    match params.thermal_wavelength_sq() {
        Scale::Finite(l2) => (-d * d / (F::lit(8.0) * s * s + l2 + l2)).exp(),
        Scale::Unbounded => F::one(),
    }
}

/// `ln` of the long-time law `exp(-t / (t_dec (1 + t / t_s)))`.
pub fn ln_longtime_attenuation<F: Real>(params: &ScenarioParams<F>, t: F) -> Result<F> {
    let ts = timescales(params);
    match (ts.t_dec, ts.t_s) {
        (Scale::Finite(t_dec), Scale::Finite(t_s)) => {
            if !(t >= F::zero()) {
                return Err(Error::InvalidParameter {
                    name: "time",
                    value: t.as_f64(),
                    invariant: "t >= 0 and finite",
                });
            }
            Ok(-t / (t_dec * (F::one() + t / t_s)))
        }
        _ => Err(Error::UnsupportedRegime(
            "long-time attenuation law needs gamma > 0 and T > 0",
        )),
    }
}

/// Long-time asymptote of `a_2` and `a_FLO` for a dissipative bath.
pub fn longtime_attenuation<F: Real>(params: &ScenarioParams<F>, t: F) -> Result<F> {
    Ok(ln_longtime_attenuation(params, t)?.exp())
}

/// Attenuation factors sampled on a time axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AttenuationSeries<F> {
    pub times: Vec<F>,
    pub a_flo: Vec<F>,
    pub a_2: Vec<F>,
    pub ln_a_flo: Vec<F>,
    pub ln_a_2: Vec<F>,
}

pub fn attenuation_series<F: Real>(params: &ScenarioParams<F>, times: &[F]) -> Result<AttenuationSeries<F>> {
    let mut series = AttenuationSeries {
        times: times.to_vec(),
        a_flo: Vec::with_capacity(times.len()),
        a_2: Vec::with_capacity(times.len()),
        ln_a_flo: Vec::with_capacity(times.len()),
        ln_a_2: Vec::with_capacity(times.len()),
    };
    for &t in times {
        let snap = Snapshot::new(params, t)?;
        let (lf, l2) = (snap.ln_attenuation_flo(), snap.ln_attenuation_a2());
        series.ln_a_flo.push(lf);
        series.ln_a_2.push(l2);
        series.a_flo.push(lf.exp());
        series.a_2.push(l2.exp());
    }
    Ok(series)
}

/// Density and its decomposition sampled on a spatial grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialProfile<F> {
    pub time: F,
    pub grid: UniformGrid<F>,
    pub x: Vec<F>,
    pub total: Vec<F>,
    pub classical: Vec<F>,
    pub classical_plus: Vec<F>,
    pub classical_minus: Vec<F>,
    pub interference: Vec<F>,
    pub phase: Vec<F>,
    pub ln_classical: Vec<F>,
    pub ln_interference: Vec<F>,
    /// Trapezoid integral of `total` over the grid.
    pub integral: F,
}

/// Default grid: [`DEFAULT_PROFILE_POINTS`] points over
/// `+/- (5 max(w(t), d) + d/2)`, so that both packets keep five widths of
/// margin to the grid edge.
pub fn default_grid<F: Real>(params: &ScenarioParams<F>, t: F) -> Result<UniformGrid<F>> {
    let w = correlator(params, t)?.width_sq.sqrt();
    let d = params.slit_separation();
    UniformGrid::symmetric(F::lit(5.0) * w.max(d) + F::lit(0.5) * d, DEFAULT_PROFILE_POINTS)
}

/// Samples `P(x, t)` and its parts on `grid`.
///
/// Fails with [`Error::GridTooSmall`] when the grid misses more than
/// [`NORMALIZATION_TOLERANCE`] of the probability, and with
/// [`Error::GridUnderresolved`] when aliasing of the fringes pushes the
/// integral above one by more than that.
pub fn profile<F: Real>(params: &ScenarioParams<F>, t: F, grid: &UniformGrid<F>) -> Result<SpatialProfile<F>> {
    let snap = Snapshot::new(params, t)?;
    let x = grid.points();
    let samples: Vec<[F; 7]> = x
        .par_iter()
        .map(|&xi| {
            let (lp, lm, lc) = snap.ln_classical(xi);
            let li = snap.ln_interference_amplitude(xi);
            let phase = snap.fringe_phase(xi);
            let (cl, int) = (lc.exp(), li.exp());
            [cl + int * phase.cos(), cl, lp.exp(), lm.exp(), int, phase, lc]
        })
        .collect();
    let col = |k: usize| samples.iter().map(|s| s[k]).collect::<Vec<F>>();
    let total = col(0);
    let integral = grid.trapezoid(&total);
    let tol = F::lit(NORMALIZATION_TOLERANCE).max(F::lit(32.0) * F::epsilon());
    if integral < F::one() - tol {
        return Err(Error::GridTooSmall {
            what: "integrated probability below 1 - 1e-6; widen the spatial grid",
            captured: integral.as_f64(),
            required: (F::one() - tol).as_f64(),
        });
    }
    if integral > F::one() + tol {
        return Err(Error::GridUnderresolved {
            captured: integral.as_f64(),
            excess: tol.as_f64(),
        });
    }
    Ok(SpatialProfile {
        time: t,
        grid: *grid,
        classical: col(1),
        classical_plus: col(2),
        classical_minus: col(3),
        interference: col(4),
        phase: col(5),
        ln_classical: col(6),
        ln_interference: x.iter().map(|&xi| snap.ln_interference_amplitude(xi)).collect(),
        x,
        total,
        integral,
    })
}
