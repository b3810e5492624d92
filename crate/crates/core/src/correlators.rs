//! Scenario parameters, bath correlation functions and characteristic
//! timescales of the free Brownian particle in an Ohmic bath.
//!
//! Units: `hbar = k_B = 1`. A scenario is fixed by the particle mass `m`,
//! the slit separation `d`, the slit width `sigma`, the bath temperature
//! `T` and the friction coefficient `gamma`. Energies are naturally measured
//! in `E = 1/(m d^2)`, times in `1/E`.
//!
//! The position autocorrelator `<(x(t) - x(0)) x(0)> = Q(t) + i A(t)` is
//! evaluated in the weak-damping limit `gamma << T`:
//!
//! ```text
//! A(t) = (1 - exp(-gamma t)) / (2 m gamma)
//! Q(t) = -(T / (m gamma)) (t - (1 - exp(-gamma t)) / gamma)
//! ```
//!
//! reducing to `A = t/(2m)`, `Q = -T t^2/(2m)` at `gamma = 0`.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest admissible `sigma / d`.
pub const MAX_WIDTH_RATIO: f64 = 0.25;
/// Above this `sigma / d` the `d >> sigma` approximations degrade noticeably.
pub const WARN_WIDTH_RATIO: f64 = 0.1;

/// A timescale or length that may be infinite.
///
/// Timescales such as the decoherence time diverge when the temperature or
/// the friction vanish. They are reported as `Unbounded` instead of an
/// IEEE infinity so that downstream arithmetic never silently overflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scale<F> {
    Finite(F),
    Unbounded,
}

impl<F: Real> Scale<F> {
    pub fn finite(self) -> Option<F> {
        match self {
            Scale::Finite(v) => Some(v),
            Scale::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, Scale::Unbounded)
    }

    /// Value in units of `unit` (stays unbounded when unbounded).
    pub fn in_units_of(self, unit: F) -> Scale<F> {
        match self {
            Scale::Finite(v) => Scale::Finite(v / unit),
            Scale::Unbounded => Scale::Unbounded,
        }
    }

    /// IEEE view, `+inf` for unbounded values.
    pub fn to_float(self) -> F {
        self.finite().unwrap_or_else(F::infinity)
    }
}

impl<F: Real> fmt::Display for Scale<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scale::Finite(v) => write!(f, "{v:e}"),
            Scale::Unbounded => f.write_str("unbounded"),
        }
    }
}

/// Physical inputs of a double-slit scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioParams<F> {
    mass: F,
    slit_separation: F,
    slit_width: F,
    temperature: F,
    friction: F,
}

fn check<F: Real>(
    name: &'static str,
    value: F,
    ok: bool,
    invariant: &'static str,
) -> Result<()> {
    if value.is_finite() && ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: value.as_f64(),
            invariant,
        })
    }
}

impl<F: Real> ScenarioParams<F> {
    /// Builds a scenario from dimensional quantities.
    pub fn new(mass: F, slit_separation: F, slit_width: F, temperature: F, friction: F) -> Result<Self> {
        let zero = F::zero();
        check("mass", mass, mass > zero, "m > 0 and finite")?;
        check(
            "slit_separation",
            slit_separation,
            slit_separation > zero,
            "d > 0 and finite",
        )?;
        check("slit_width", slit_width, slit_width > zero, "sigma > 0 and finite")?;
        check(
            "slit_width",
            slit_width,
            slit_width <= F::lit(MAX_WIDTH_RATIO) * slit_separation,
            "sigma / d <= 0.25 (slits must be well separated)",
        )?;
        check(
            "temperature",
            temperature,
            temperature >= zero,
            "T >= 0 and finite",
        )?;
        check("friction", friction, friction >= zero, "gamma >= 0 and finite")?;
        check(
            "friction",
            friction,
            friction == zero || friction < temperature,
            "gamma < T whenever gamma > 0 (weak-damping correlators)",
        )?;
        let params = Self {
            mass,
            slit_separation,
            slit_width,
            temperature,
            friction,
        };
        for w in params.warnings() {
            log::warn!("{w}");
        }
        Ok(params)
    }

    /// Scenario in natural units `m = d = 1` from the three free ratios.
    pub fn dimensionless(sigma_over_d: F, temperature_over_e: F, friction_over_e: F) -> Result<Self> {
        Self::with_units(F::one(), F::one(), sigma_over_d, temperature_over_e, friction_over_e)
    }

    /// Scenario with explicit mass and slit separation; `T` and `gamma` are
    /// given in units of `E = 1/(m d^2)`.
    pub fn with_units(
        mass: F,
        slit_separation: F,
        sigma_over_d: F,
        temperature_over_e: F,
        friction_over_e: F,
    ) -> Result<Self> {
        check("mass", mass, mass > F::zero(), "m > 0 and finite")?;
        check(
            "slit_separation",
            slit_separation,
            slit_separation > F::zero(),
            "d > 0 and finite",
        )?;
        let e = F::one() / (mass * slit_separation * slit_separation);
        Self::new(
            mass,
            slit_separation,
            sigma_over_d * slit_separation,
            temperature_over_e * e,
            friction_over_e * e,
        )
    }

    pub fn with_temperature(&self, temperature: F) -> Result<Self> {
        Self::new(self.mass, self.slit_separation, self.slit_width, temperature, self.friction)
    }

    pub fn with_friction(&self, friction: F) -> Result<Self> {
        Self::new(self.mass, self.slit_separation, self.slit_width, self.temperature, friction)
    }

    pub fn with_slit_width(&self, slit_width: F) -> Result<Self> {
        Self::new(self.mass, self.slit_separation, slit_width, self.temperature, self.friction)
    }

    pub fn mass(&self) -> F {
        self.mass
    }

    pub fn slit_separation(&self) -> F {
        self.slit_separation
    }

    /// Slit width parameter `sigma` (each slit transmits a Gaussian of width `2 sigma`).
    pub fn slit_width(&self) -> F {
        self.slit_width
    }

    pub fn temperature(&self) -> F {
        self.temperature
    }

    pub fn friction(&self) -> F {
        self.friction
    }

    /// Energy unit `E = 1/(m d^2)`.
    pub fn energy_scale(&self) -> F {
        F::one() / (self.mass * self.slit_separation * self.slit_separation)
    }

    pub fn sigma_over_d(&self) -> F {
        self.slit_width / self.slit_separation
    }

    pub fn temperature_over_e(&self) -> F {
        self.temperature / self.energy_scale()
    }

    pub fn friction_over_e(&self) -> F {
        self.friction / self.energy_scale()
    }

    /// `lambda_th^2 = 1/(m T)`, unbounded at `T = 0`.
    pub fn thermal_wavelength_sq(&self) -> Scale<F> {
        if self.temperature > F::zero() {
            Scale::Finite(F::one() / (self.mass * self.temperature))
        } else {
            Scale::Unbounded
        }
    }

    /// Non-fatal concerns about the parameter set.
    pub fn warnings(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.sigma_over_d() > F::lit(WARN_WIDTH_RATIO) {
            out.push("sigma / d > 0.1: closed forms assume d >> sigma");
        }
        out
    }
}

/// Bath correlation functions at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BathCorrelators<F> {
    /// Elapsed time since the slit measurement.
    pub time: F,
    /// Imaginary part of the position autocorrelator, `A(t) >= 0`.
    pub a: F,
    /// Real part of the position autocorrelator, `Q(t) <= 0`.
    pub q: F,
    /// Wave-packet width squared `w^2 = sigma^2 + A^2/sigma^2 - 2Q`.
    pub width_sq: F,
}

impl<F: Real> BathCorrelators<F> {
    /// Thermal spreading parameter `s(t) = -2 Q(t)`.
    pub fn spreading(&self) -> F {
        -(self.q + self.q)
    }

    /// `[x(t1), x(t1 + t)] / i = 2 A(t)`.
    pub fn commutator(&self) -> F {
        self.a + self.a
    }
}

/// Below this value of `gamma t` the correlators are evaluated from their
/// Taylor series. The crossover balances the truncation error of the
/// four-term series (`~ (gamma t)^4 / 360`) against the cancellation in
/// `gamma t - (1 - exp(-gamma t))` (`~ eps / (gamma t)`).
fn series_threshold<F: Real>() -> F {
    (F::lit(360.0) * F::epsilon()).powf(F::lit(0.2))
}

/// `A(t)` and `Q(t)` of the weak-damping Ohmic bath.
pub fn correlator<F: Real>(params: &ScenarioParams<F>, t: F) -> Result<BathCorrelators<F>> {
    if !(t >= F::zero()) || !t.is_finite() {
        return Err(Error::InvalidParameter {
            name: "time",
            value: t.as_f64(),
            invariant: "t >= 0 and finite",
        });
    }
    let m = params.mass;
    let temp = params.temperature;
    let gamma = params.friction;
    let half = F::lit(0.5);
    let free_a = t * half / m;
    let (a, q) = if gamma == F::zero() {
        (free_a, -temp * t * t * half / m)
    } else {
        let x = gamma * t;
        if x < series_threshold() {
            // (1 - e^-x)/x and (x - 1 + e^-x)/x^2 to four terms
            let a_series = F::one() - x * half + x * x / F::lit(6.0) - x * x * x / F::lit(24.0);
            let q_series =
                half - x / F::lit(6.0) + x * x / F::lit(24.0) - x * x * x / F::lit(120.0);
            (free_a * a_series, -temp * t * t / m * q_series)
        } else {
            let decayed = -(-x).exp_m1();
            (
                decayed / (F::lit(2.0) * m * gamma),
                -(temp / (m * gamma)) * (t - decayed / gamma),
            )
        }
    };
    let sigma_sq = params.slit_width * params.slit_width;
    let width_sq = sigma_sq + a * a / sigma_sq - (q + q);
    Ok(BathCorrelators {
        time: t,
        a,
        q,
        width_sq,
    })
}

/// `w(t)^2 = sigma^2 + A(t)^2 / sigma^2 - 2 Q(t)`.
pub fn width_squared<F: Real>(params: &ScenarioParams<F>, t: F) -> Result<F> {
    Ok(correlator(params, t)?.width_sq)
}

/// Characteristic timescales of a scenario, all in units of inverse energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timescales<F> {
    /// Time for the two slit wave packets to overlap, `2 m sigma d`.
    pub t_mix: F,
    /// Onset of quantum spreading, `t_mix sigma / d = 2 m sigma^2`.
    pub t_spread: F,
    /// Exponential decoherence time `lambda_th^2 / (d^2 gamma)`.
    pub t_dec: Scale<F>,
    /// Saturation time `t_dec d^2 / (8 sigma^2)`.
    pub t_s: Scale<F>,
    /// Gaussian short-time decay constant `sigma^2 m^(1/2) / (d T^(1/2))`.
    pub tau_flo: Scale<F>,
    /// Thermal wavelength `(m T)^(-1/2)`.
    pub thermal_wavelength: Scale<F>,
}

pub fn timescales<F: Real>(params: &ScenarioParams<F>) -> Timescales<F> {
    let m = params.mass;
    let d = params.slit_separation;
    let sigma = params.slit_width;
    let two = F::lit(2.0);
    let t_mix = two * m * sigma * d;
    let t_spread = two * m * sigma * sigma;
    let (tau_flo, thermal_wavelength) = match params.thermal_wavelength_sq() {
        Scale::Finite(l2) => (
            Scale::Finite(sigma * sigma * m.sqrt() / (d * params.temperature.sqrt())),
            Scale::Finite(l2.sqrt()),
        ),
        Scale::Unbounded => (Scale::Unbounded, Scale::Unbounded),
    };
    let (t_dec, t_s) = match params.thermal_wavelength_sq() {
        Scale::Finite(l2) if params.friction > F::zero() => {
            let t_dec = l2 / (d * d * params.friction);
            (
                Scale::Finite(t_dec),
                Scale::Finite(t_dec * d * d / (F::lit(8.0) * sigma * sigma)),
            )
        }
        _ => (Scale::Unbounded, Scale::Unbounded),
    };
    Timescales {
        t_mix,
        t_spread,
        t_dec,
        t_s,
        tau_flo,
        thermal_wavelength,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn weak() -> ScenarioParams<f64> {
        ScenarioParams::dimensionless(0.05, 1.0, 0.3).unwrap()
    }

    #[test]
    fn correlators_vanish_at_zero() {
        let p = ScenarioParams::dimensionless(0.05, 1.0, 0.0).unwrap();
        let c = correlator(&p, 0.0).unwrap();
        assert_eq!((c.a, c.q), (0.0, 0.0));
        let c = correlator(&weak(), 0.0).unwrap();
        assert_eq!((c.a, c.q), (0.0, 0.0));
    }

    #[test]
    fn free_correlators_at_tenth() {
        let p = ScenarioParams::dimensionless(0.05, 1.0, 0.0).unwrap();
        let c = correlator(&p, 0.1).unwrap();
        assert_relative_eq!(c.a, 0.05, max_relative = 1e-15);
        assert_relative_eq!(c.q, -0.005, max_relative = 1e-15);
        assert_relative_eq!(c.spreading(), 0.01, max_relative = 1e-15);
        assert_relative_eq!(c.commutator(), 0.1, max_relative = 1e-15);
    }

    #[test]
    fn small_gamma_t_matches_fourth_order_taylor() {
        // Taylor expansions of the weak-damping forms in x = gamma t, written
        // out independently of the implementation.
        let p = weak();
        let (m, temp, g) = (1.0, 1.0, 0.3);
        for &t in &[1e-9, 3e-7, 2e-6, 1e-5, 4e-4, 3e-3, 1e-2, 3e-2] {
            let x: f64 = g * t;
            let a_ref = t / (2.0 * m) * (1.0 - x / 2.0 + x * x / 6.0 - x.powi(3) / 24.0 + x.powi(4) / 120.0);
            let q_ref = -temp * t * t / m
                * (0.5 - x / 6.0 + x * x / 24.0 - x.powi(3) / 120.0 + x.powi(4) / 720.0);
            let c = correlator(&p, t).unwrap();
            assert_relative_eq!(c.a, a_ref, max_relative = 1e-10);
            assert_relative_eq!(c.q, q_ref, max_relative = 1e-10);
        }
    }

    #[test]
    fn width_examples() {
        let cold = ScenarioParams::dimensionless(0.05, 0.0, 0.0).unwrap();
        let t_mix = timescales(&cold).t_mix;
        assert_relative_eq!(width_squared(&cold, 0.0).unwrap(), 0.0025, max_relative = 1e-15);
        assert_relative_eq!(width_squared(&cold, t_mix).unwrap(), 1.0025, max_relative = 1e-14);
        let warm = ScenarioParams::dimensionless(0.05, 1.0, 0.0).unwrap();
        assert_relative_eq!(width_squared(&warm, t_mix).unwrap(), 1.0125, max_relative = 1e-14);
    }

    #[test]
    fn timescale_examples() {
        let ts = timescales(&weak());
        assert_relative_eq!(ts.tau_flo.finite().unwrap() / ts.t_mix, 0.025, max_relative = 1e-14);
        assert_relative_eq!(ts.t_spread / ts.t_mix, 0.05, max_relative = 1e-15);
        assert_relative_eq!(ts.t_dec.finite().unwrap(), 1.0 / 0.3, max_relative = 1e-14);
        assert_relative_eq!(ts.t_s.finite().unwrap(), 50.0 / 0.3, max_relative = 1e-14);
        assert_relative_eq!(ts.thermal_wavelength.finite().unwrap(), 1.0);

        let free = ScenarioParams::dimensionless(0.05, 1.0, 0.0).unwrap();
        let ts = timescales(&free);
        assert!(ts.t_dec.is_unbounded() && ts.t_s.is_unbounded());
        assert!(ts.tau_flo.finite().is_some());

        let cold = ScenarioParams::dimensionless(0.05, 0.0, 0.0).unwrap();
        let ts = timescales(&cold);
        assert!(ts.tau_flo.is_unbounded() && ts.thermal_wavelength.is_unbounded());
        assert_eq!(ts.t_mix, 0.1);
        assert_eq!(ts.t_dec.to_string(), "unbounded");
    }

    #[test]
    fn parameter_validation_names_invariant() {
        let err = ScenarioParams::dimensionless(0.05, 0.1, 0.3).unwrap_err();
        assert!(err.to_string().contains("gamma < T"), "{err}");
        let err = ScenarioParams::dimensionless(0.3, 1.0, 0.0).unwrap_err();
        assert!(err.to_string().contains("sigma / d <= 0.25"), "{err}");
        let err = ScenarioParams::new(-1.0, 1.0, 0.05, 1.0, 0.0).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "mass", .. }));
        assert!(ScenarioParams::new(1.0, 1.0, 0.05, f64::NAN, 0.0).is_err());
        assert!(correlator(&weak(), -1.0).is_err());
        assert!(correlator(&weak(), f64::INFINITY).is_err());
    }

    #[test]
    fn wide_slits_warn() {
        let p = ScenarioParams::dimensionless(0.2, 1.0, 0.0).unwrap();
        assert_eq!(p.warnings().len(), 1);
        assert!(weak().warnings().is_empty());
    }

    #[test]
    fn friction_saturates_commutator() {
        let p = weak();
        let c = correlator(&p, 1e4).unwrap();
        assert_relative_eq!(c.a, 1.0 / (2.0 * 0.3), max_relative = 1e-12);
    }

    #[test]
    fn single_precision_path() {
        let p = ScenarioParams::<f32>::dimensionless(0.05, 1.0, 0.3).unwrap();
        let p64 = weak();
        for &t in &[1e-4_f32, 0.05, 0.5, 20.0] {
            let c = correlator(&p, t).unwrap();
            let c64 = correlator(&p64, t as f64).unwrap();
            assert_relative_eq!(c.a as f64, c64.a, max_relative = 1e-5);
            assert_relative_eq!(c.q as f64, c64.q, max_relative = 1e-5);
        }
    }

    fn valid_params() -> impl Strategy<Value = ScenarioParams<f64>> {
        (0.01f64..0.25, 0.0f64..5.0, 0.0f64..1.0, 0.1f64..10.0, 0.1f64..10.0).prop_map(
            |(ratio, temp, gfrac, m, d)| {
                ScenarioParams::with_units(m, d, ratio, temp, gfrac * temp).unwrap()
            },
        )
    }

    proptest! {
        #[test]
        fn spreading_is_monotone(p in valid_params(), a in 0.0f64..20.0, b in 0.0f64..20.0) {
            let t_mix = timescales(&p).t_mix;
            let (t1, t2) = if a < b { (a, b) } else { (b, a) };
            let w1 = width_squared(&p, t1 * t_mix).unwrap();
            let w2 = width_squared(&p, t2 * t_mix).unwrap();
            prop_assert!(w2 >= w1 * (1.0 - 1e-14));
            prop_assert!(w1 >= p.slit_width().powi(2));
        }

        #[test]
        fn correlator_signs_and_bounds(p in valid_params(), s in 0.0f64..1e3) {
            let t = s * timescales(&p).t_mix;
            let c = correlator(&p, t).unwrap();
            prop_assert!(c.q <= 0.0);
            prop_assert!(c.a >= 0.0);
            if p.friction() > 0.0 {
                prop_assert!(c.a <= 1.0 / (2.0 * p.mass() * p.friction()) * (1.0 + 1e-14));
            }
        }

        #[test]
        fn vanishing_friction_is_continuous(s in 0.0f64..10.0, temp in 0.0f64..3.0) {
            let tiny = ScenarioParams::dimensionless(0.05, temp.max(1e-8), 1e-9).unwrap();
            let zero = ScenarioParams::dimensionless(0.05, temp.max(1e-8), 0.0).unwrap();
            let t = s * timescales(&zero).t_mix;
            let a = correlator(&tiny, t).unwrap();
            let b = correlator(&zero, t).unwrap();
            prop_assert!((a.a - b.a).abs() <= 1e-6 * b.a.abs());
            prop_assert!((a.q - b.q).abs() <= 1e-6 * b.q.abs());
        }

        #[test]
        fn dimensionless_ratios_are_scale_free(
            ratio in 0.01f64..0.25, temp in 0.01f64..5.0, gfrac in 0.0f64..1.0,
            m in 0.05f64..20.0, d in 0.05f64..20.0,
        ) {
            let unit = ScenarioParams::dimensionless(ratio, temp, gfrac * temp).unwrap();
            let scaled = ScenarioParams::with_units(m, d, ratio, temp, gfrac * temp).unwrap();
            let (tu, ts) = (timescales(&unit), timescales(&scaled));
            let r = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
            prop_assert!(r(ts.t_mix / ts.t_spread, tu.t_mix / tu.t_spread));
            prop_assert!(r(ts.tau_flo.finite().unwrap() / ts.t_mix, tu.tau_flo.finite().unwrap() / tu.t_mix));
            let wu = width_squared(&unit, tu.t_mix).unwrap();
            let ws = width_squared(&scaled, ts.t_mix).unwrap() / (d * d);
            prop_assert!(r(ws, wu));
        }
    }
}
