use decoherence::interference::{default_grid, Snapshot};
use decoherence::{
    attenuation_a2, closed_form_a_od, profile, saturation_a_inf, timescales, total_density, ScenarioParams32,
    ScenarioParams64,
};

fn pair(sigma: f64, temp: f64, gamma: f64) -> (ScenarioParams32, ScenarioParams64) {
    (
        ScenarioParams32::dimensionless(sigma as f32, temp as f32, gamma as f32).unwrap(),
        ScenarioParams64::dimensionless(sigma, temp, gamma).unwrap(),
    )
}

#[test]
fn timescales_agree_across_precisions() {
    let (p32, p64) = pair(0.05, 1.0, 0.3);
    let (a, b) = (timescales(&p32), timescales(&p64));
    assert!((a.t_mix as f64 - b.t_mix).abs() < 1e-6 * b.t_mix);
    let ratio = a.tau_flo.finite().unwrap() / a.t_mix;
    assert!((ratio - 0.025).abs() < 4.0 * f32::EPSILON * 0.025);
    assert!((a.t_s.finite().unwrap() as f64 / b.t_s.finite().unwrap() - 1.0).abs() < 1e-5);
}

#[test]
fn density_agrees_across_precisions() {
    let (p32, p64) = pair(0.05, 1.0, 0.3);
    let t = timescales(&p64).t_mix;
    for x in [-1.0, -0.3, 0.0, 0.05, 0.5, 1.2] {
        let lo = total_density(&p32, x as f32, t as f32).unwrap() as f64;
        let hi = total_density(&p64, x, t).unwrap();
        assert!((lo - hi).abs() < 1e-4 * hi, "x = {x}: {lo} vs {hi}");
    }
}

#[test]
fn log_domain_keeps_tiny_attenuation_representable() {
    // a_2(0) ~ 1.9e-22 lies far below f32 rounding of 1 but well above its
    // underflow threshold
    let (p32, p64) = pair(0.05, 1.0, 0.3);
    let lo = attenuation_a2(&p32, 0.0).unwrap() as f64;
    let hi = attenuation_a2(&p64, 0.0).unwrap();
    assert!(lo > 0.0 && (lo - hi).abs() < 1e-4 * hi);
    let snap = Snapshot::new(&p32, 1e-4).unwrap();
    assert!(snap.ln_attenuation_a2().is_finite());
}

#[test]
fn single_precision_profile_is_normalized() {
    let (p32, _) = pair(0.05, 1.0, 0.0);
    let t = timescales(&p32).t_mix;
    let grid = default_grid(&p32, t).unwrap();
    let prof = profile(&p32, t, &grid).unwrap();
    assert!((prof.integral - 1.0).abs() < 1e-5);
}

#[test]
fn saturation_and_coherence_closed_forms() {
    let (p32, p64) = pair(0.01, 1.0, 0.0);
    assert!((saturation_a_inf(&p32) as f64 - saturation_a_inf(&p64)).abs() < 1e-6);
    let (a, b) = (closed_form_a_od(&p32), closed_form_a_od(&p64));
    assert!((a.value as f64 - b.value).abs() < 1e-6);
    assert_eq!(a.valid, b.valid);
}
