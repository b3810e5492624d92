//! Globally adaptive Gauss-Kronrod (G10/K21) quadrature for complex-valued
//! integrands, and its nested two-dimensional extension.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_109_033,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod abscissae
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and budget of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig<F> {
    pub abs_tol: F,
    pub rel_tol: F,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
    /// Equal panels the interval is split into before adapting.
    pub initial_panels: usize,
}

impl<F: Real> Default for QuadratureConfig<F> {
    fn default() -> Self {
        Self {
            abs_tol: F::zero(),
            rel_tol: F::lit(1e-11),
            max_intervals: 400,
            initial_panels: 4,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate<F> {
    pub value: Complex<F>,
    pub error: F,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<F> {
    a: F,
    b: F,
    value: Complex<F>,
    error: F,
}

fn kronrod<F, G>(f: &mut G, a: F, b: F) -> Result<Panel<F>>
where
    F: Real,
    G: FnMut(F) -> Result<Complex<F>>,
{
    let half = F::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let f_center = f(center)?;
    let mut kron = f_center * F::lit(WGK[10]);
    let mut gauss = Complex::new(F::zero(), F::zero());
    let mut fv = [(Complex::new(F::zero(), F::zero()), Complex::new(F::zero(), F::zero())); 10];
    let mut res_abs = f_center.norm() * F::lit(WGK[10]);
    for (j, slot) in fv.iter_mut().enumerate() {
        let dx = half_len * F::lit(XGK[j]);
        let (lo, hi) = (f(center - dx)?, f(center + dx)?);
        let w = F::lit(WGK[j]);
        kron += (lo + hi) * w;
        res_abs += (lo.norm() + hi.norm()) * w;
        if j % 2 == 1 {
            gauss += (lo + hi) * F::lit(WG[j / 2]);
        }
        *slot = (lo, hi);
    }
    let mean = kron * half;
    let mut res_asc = (f_center - mean).norm() * F::lit(WGK[10]);
    for (j, (lo, hi)) in fv.iter().enumerate() {
        res_asc += ((*lo - mean).norm() + (*hi - mean).norm()) * F::lit(WGK[j]);
    }
    let scale = half_len.abs();
    let value = kron * half_len;
    let res_abs = res_abs * scale;
    let res_asc = res_asc * scale;
    let mut error = ((kron - gauss) * half_len).norm();
    // QUADPACK error rescaling
    if res_asc > F::zero() && error > F::zero() {
        let ratio = (F::lit(200.0) * error / res_asc).powf(F::lit(1.5));
        error = res_asc * ratio.min(F::one());
    }
    let floor = F::lit(50.0) * F::epsilon() * res_abs;
    if res_abs > F::min_positive_value() / (F::lit(50.0) * F::epsilon()) {
        error = error.max(floor);
    }
    Ok(Panel { a, b, value, error })
}

/// Integrates `f` over `[a, b]`, subdividing the panel with the largest
/// error estimate until `error <= max(abs_tol, rel_tol |I|)`.
///
/// Deterministic: the sequence of subdivisions depends only on `f`, the
/// interval and the configuration.
pub fn integrate<F, G>(mut f: G, a: F, b: F, cfg: &QuadratureConfig<F>) -> Result<Estimate<F>>
where
    F: Real,
    G: FnMut(F) -> Result<Complex<F>>,
{
    let n0 = cfg.initial_panels.max(1);
    let mut panels = Vec::with_capacity(cfg.max_intervals.max(n0) + 1);
    for k in 0..n0 {
        let lo = (a * F::count(n0 - k) + b * F::count(k)) / F::count(n0);
        let hi = (a * F::count(n0 - k - 1) + b * F::count(k + 1)) / F::count(n0);
        panels.push(kronrod(&mut f, lo, hi)?);
    }
    loop {
        let value: Complex<F> = panels
            .iter()
            .fold(Complex::new(F::zero(), F::zero()), |acc, p| acc + p.value);
        let error: F = panels.iter().map(|p| p.error).sum();
        let target = cfg.abs_tol.max(cfg.rel_tol * value.norm());
        if error <= target {
            return Ok(Estimate {
                value,
                error,
                intervals: panels.len(),
            });
        }
        if panels.len() >= cfg.max_intervals {
            return Err(Error::Convergence {
                estimate: value.norm().as_f64(),
                error_bound: error.as_f64(),
                budget: cfg.max_intervals,
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -F::one()), |(bi, be), (i, p)| if p.error > be { (i, p.error) } else { (bi, be) });
        let p = panels.swap_remove(worst);
        let mid = F::lit(0.5) * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            // interval exhausted floating point resolution
            return Err(Error::Convergence {
                estimate: value.norm().as_f64(),
                error_bound: error.as_f64(),
                budget: cfg.max_intervals,
            });
        }
        panels.push(kronrod(&mut f, p.a, mid)?);
        panels.push(kronrod(&mut f, mid, p.b)?);
    }
}

/// Nested 2-D integral `int_{x0}^{x1} dx int_{y0}^{y1} dy f(x, y)`.
///
/// The inner integral runs at a tenth of the outer relative tolerance so
/// that its errors do not dominate the outer estimate.
pub fn integrate_2d<F, G>(
    f: G,
    x_range: (F, F),
    y_range: (F, F),
    cfg: &QuadratureConfig<F>,
) -> Result<Estimate<F>>
where
    F: Real,
    G: Fn(F, F) -> Result<Complex<F>>,
{
    let inner_cfg = QuadratureConfig {
        abs_tol: cfg.abs_tol * F::lit(0.1) / (x_range.1 - x_range.0),
        rel_tol: cfg.rel_tol * F::lit(0.1),
        ..*cfg
    };
    let mut inner_error = F::zero();
    let outer = integrate(
        |x| {
            let est = integrate(|y| f(x, y), y_range.0, y_range.1, &inner_cfg)?;
            inner_error = inner_error.max(est.error);
            Ok(est.value)
        },
        x_range.0,
        x_range.1,
        cfg,
    )?;
    Ok(Estimate {
        error: outer.error + inner_error * (x_range.1 - x_range.0),
        ..outer
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type C = Complex<f64>;

    #[test]
    fn polynomial_exact() {
        let est = integrate(|x: f64| Ok(C::new(x.powi(5) - 3.0 * x, 0.0)), -1.0, 2.0, &Default::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - 1.5 * (4.0 - 1.0);
        assert!((est.value.re - exact).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_gaussian_matches_fourier_transform() {
        // int exp(-x^2/2 + i k x) dx = sqrt(2 pi) exp(-k^2/2)
        for &k in &[0.0, 1.0, 5.0, 20.0] {
            let cfg = QuadratureConfig { abs_tol: 1e-13, rel_tol: 1e-12, max_intervals: 2000, ..Default::default() };
            let est = integrate(|x: f64| Ok(C::new(0.0, k * x).exp() * (-x * x / 2.0).exp()), -12.0, 12.0, &cfg);
            let exact = (2.0 * PI).sqrt() * (-k * k / 2.0).exp();
            let est = est.unwrap();
            assert!((est.value.re - exact).abs() < 1e-12 * (2.0 * PI).sqrt(), "k={k}");
            assert!(est.value.im.abs() < 1e-12);
        }
    }

    #[test]
    fn two_dimensional_gaussian() {
        let cfg = QuadratureConfig { rel_tol: 1e-11, ..Default::default() };
        let est = integrate_2d(
            |x: f64, y: f64| Ok(C::new(-(x * x + x * y + y * y), 0.3 * x * y).exp()),
            (-9.0, 9.0),
            (-9.0, 9.0),
            &cfg,
        )
        .unwrap();
        // 2 pi / sqrt(det M) with M = [[2, 1 - 0.3i], [1 - 0.3i, 2]]
        let det = C::new(4.0, 0.0) - C::new(1.0, -0.3).powi(2);
        let exact = C::new(2.0 * PI, 0.0) / det.sqrt();
        assert!((est.value - exact).norm() < 1e-10 * exact.norm());
    }

    #[test]
    fn budget_exhaustion_reports_estimate() {
        let cfg = QuadratureConfig { rel_tol: 1e-14, max_intervals: 2, initial_panels: 1, ..Default::default() };
        let err = integrate(|x: f64| Ok(C::new((50.0 * x).sin(), 0.0)), 0.0, 10.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::Convergence { budget: 2, .. }));
    }

    #[test]
    fn integrand_errors_propagate() {
        let err = integrate(|_x: f64| Err(Error::SingularTime), 0.0, 1.0, &Default::default()).unwrap_err();
        assert_eq!(err, Error::SingularTime);
    }
}
