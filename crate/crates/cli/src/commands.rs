//! Subcommand implementations.

use std::io::Write;

use decoherence::densmat::{
    default_matrix_grid, initial_density_matrix_with, normalized_off_diagonal, InitialState,
};
use decoherence::interference::{
    attenuation_series, default_grid, ln_longtime_attenuation, profile, saturation_a_inf,
};
use decoherence::oracle::{certification_points, oracle_density_with, Preparation, CERTIFICATION_FLOOR};
use decoherence::{
    closed_form_a_od, free_unitary_evolve, off_diagonal_norm, single_slit_density,
    timescales, total_density, Error, Part, Scale, UniformGrid,
};
use rayon::prelude::*;

use crate::config::{Format, RunConfig, TimeGridSpec, TimeScale};
use crate::error::{CliError, Result};
use crate::figures::{self, FigureId, FigureSpec, FREE, THERMAL, WEAK_DISSIPATION};
use crate::output::{num, short, Output, Table};
use crate::svg::{Axis, Heatmap, LinePlot, Series};

/// Worst accepted relative error of the oracle against the closed form.
pub const ORACLE_LIMIT: f64 = 1e-6;
/// Same, for the single-slit reduction.
pub const SINGLE_SLIT_LIMIT: f64 = 1e-8;
/// Worst accepted relative drift of `|a_OD|^2` in the unitary sweep.
pub const DRIFT_LIMIT: f64 = 1e-6;
/// Times of the oracle suite, in units of `t_mix`.
pub const ORACLE_TIMES: [f64; 5] = [0.1, 0.3, 1.0, 3.0, 10.0];
pub const ORACLE_POINTS: usize = 41;

fn scale_text(s: Scale<f64>, fmt: fn(f64) -> String) -> String {
    match s {
        Scale::Finite(v) => fmt(v),
        Scale::Unbounded => "unbounded".into(),
    }
}

pub fn timescales_report(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let p = cfg.params()?;
    let ts = timescales(&p);
    let rows: [(&str, Scale<f64>, &str); 6] = [
        ("t_mix", Scale::Finite(ts.t_mix), "packet overlap time 2 m sigma d"),
        ("t_spread", Scale::Finite(ts.t_spread), "onset of spreading 2 m sigma^2"),
        ("tau_flo", ts.tau_flo, "short-time Gaussian decay constant"),
        ("t_dec", ts.t_dec, "exponential decoherence time"),
        ("t_s", ts.t_s, "saturation time"),
        ("thermal_wavelength", ts.thermal_wavelength, "(m T)^(-1/2)"),
    ];
    let mut report = format!("scenario: {}\n", cfg.describe());
    for w in p.warnings() {
        report.push_str(&format!("warning: {w}\n"));
    }
    let mut table = Table::new(
        "timescales",
        [
            ("quantity", "name"),
            ("value", "value in units of 1/E (length in units of d)"),
            ("over_t_mix", "value / t_mix"),
        ],
    );
    report.push_str(&format!("{:<19} {:<16} {:<16} {}\n", "quantity", "value", "value / t_mix", "meaning"));
    for (name, value, note) in rows {
        let ratio = (name != "thermal_wavelength").then(|| value.in_units_of(ts.t_mix));
        report.push_str(&format!(
            "{name:<19} {:<16} {:<16} {note}\n",
            scale_text(value, short),
            ratio.map_or_else(|| "-".to_string(), |r| scale_text(r, short)),
        ));
        table.rows.push(vec![
            name.to_string(),
            scale_text(value, num),
            ratio.map_or_else(|| "-".to_string(), |r| scale_text(r, num)),
        ]);
    }
    let a_inf = saturation_a_inf(&p);
    report.push_str(&format!("{:<19} {:<16} {:<16} saturated attenuation factor\n", "a_inf", short(a_inf), "-"));
    table.rows.push(vec!["a_inf".into(), num(a_inf), "-".into()]);
    stdout
        .write_all(report.as_bytes())
        .map_err(|e| CliError::io("<stdout>", e))?;
    if cfg.out_given && cfg.wants(Format::Csv) {
        Output::new(&cfg.out, cfg.describe())?.table(&table)?;
    }
    Ok(())
}

pub fn figure(id: FigureId, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let spec = FigureSpec::defaults(id).with_overrides(cfg);
    let written = figures::generate(&spec, cfg)?;
    for path in written {
        writeln!(stdout, "wrote {}", path.display()).map_err(|e| CliError::io("<stdout>", e))?;
    }
    Ok(())
}

/// `P(x, t)` and its parts at one time (in units of `t_mix`).
pub fn profile_cmd(cfg: &RunConfig, time: f64, stdout: &mut dyn Write) -> Result<()> {
    let p = cfg.params()?;
    let d = p.slit_separation();
    let t = time * timescales(&p).t_mix;
    let grid = match (cfg.x_span, cfg.x_count) {
        (Some(span), n) => UniformGrid::symmetric(span * d, n.unwrap_or(2048))?,
        (None, Some(n)) => UniformGrid::symmetric(default_grid(&p, t)?.hi(), n)?,
        (None, None) => default_grid(&p, t)?,
    };
    let pr = profile(&p, t, &grid)?;
    let mut out = Output::new(&cfg.out, format!("profile t={time} t_mix; {}", cfg.describe()))?;
    let mut table = Table::new(
        "profile",
        [
            ("x", "position in units of d"),
            ("P", "total density in units of 1/d"),
            ("P_cl", "non-interfering part"),
            ("P_int", "interference envelope"),
            ("phase", "fringe phase in radians"),
            ("P_cl_plus", "packet from the slit at -d/2"),
            ("P_cl_minus", "packet from the slit at +d/2"),
        ],
    );
    for i in 0..pr.x.len() {
        table.push_numbers(&[
            pr.x[i] / d,
            pr.total[i] * d,
            pr.classical[i] * d,
            pr.interference[i] * d,
            pr.phase[i],
            pr.classical_plus[i] * d,
            pr.classical_minus[i] * d,
        ]);
    }
    if cfg.wants(Format::Csv) {
        out.table(&table)?;
    }
    if cfg.wants(Format::Svg) {
        let pts = |v: &[f64]| pr.x.iter().zip(v).map(|(&x, &y)| (x / d, y * d)).collect();
        let svg = LinePlot {
            title: format!("P(x, {time} t_mix)"),
            x_label: "x / d".into(),
            y_label: "P d".into(),
            x_axis: Axis::Linear,
            y_axis: Axis::Linear,
            series: vec![
                Series::new("P", pts(&pr.total)),
                Series::new("P_cl", pts(&pr.classical)).dashed(),
            ],
        }
        .render();
        out.raw("profile.svg", &svg)?;
    }
    writeln!(stdout, "integral of P over the grid: {}", num(pr.integral)).map_err(|e| CliError::io("<stdout>", e))?;
    for path in out.written() {
        writeln!(stdout, "wrote {}", path.display()).map_err(|e| CliError::io("<stdout>", e))?;
    }
    Ok(())
}

const ATTENUATION_DEFAULT: TimeGridSpec = TimeGridSpec {
    min: Some(1e-3),
    max: Some(1e2),
    count: Some(400),
    scale: Some(TimeScale::Log),
};

/// `a_FLO`, `a_2` and the asymptotic laws on a time axis.
pub fn attenuation_cmd(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<()> {
    let p = cfg.params()?;
    let ts = timescales(&p);
    let times = cfg.times(ATTENUATION_DEFAULT)?;
    let abs: Vec<f64> = times.iter().map(|k| k * ts.t_mix).collect();
    let series = attenuation_series(&p, &abs)?;
    let long_time = ts.t_dec.finite().is_some();
    let mut columns = vec![
        ("t", "time in units of t_mix"),
        ("a_FLO", "P_int(0, t) / P_cl(0, t)"),
        ("a_2", "fringe contrast factor a_2(t)"),
        ("ln_a_FLO", "natural log of a_FLO"),
        ("ln_a_2", "natural log of a_2"),
        ("gaussian_law", "exp(-t^2 / (8 tau_FLO^2)), 1 at T = 0"),
    ];
    if long_time {
        columns.push(("long_time_law", "exp(-t / (t_dec (1 + t / t_s)))"));
    }
    let mut table = Table::new("attenuation", columns);
    for i in 0..times.len() {
        let t = abs[i];
        let gaussian = match ts.tau_flo {
            Scale::Finite(tau) => (-t * t / (8.0 * tau * tau)).exp(),
            Scale::Unbounded => 1.0,
        };
        let mut row = vec![
            times[i],
            series.a_flo[i],
            series.a_2[i],
            series.ln_a_flo[i],
            series.ln_a_2[i],
            gaussian,
        ];
        if long_time {
            row.push(ln_longtime_attenuation(&p, t)?.exp());
        }
        table.push_numbers(&row);
    }
    let mut out = Output::new(&cfg.out, cfg.describe())?;
    if cfg.wants(Format::Csv) {
        out.table(&table)?;
    }
    if cfg.wants(Format::Svg) {
        let pts = |v: &[f64]| times.iter().copied().zip(v.iter().copied()).collect();
        let svg = LinePlot {
            title: "Attenuation factors".into(),
            x_label: "t / t_mix".into(),
            y_label: "a".into(),
            x_axis: Axis::Log,
            y_axis: Axis::Log,
            series: vec![
                Series::new("a_2", pts(&series.a_2)),
                Series::new("a_FLO", pts(&series.a_flo)).dashed(),
            ],
        }
        .render();
        out.raw("attenuation.svg", &svg)?;
    }
    for path in out.written() {
        writeln!(stdout, "wrote {}", path.display()).map_err(|e| CliError::io("<stdout>", e))?;
    }
    Ok(())
}

struct OracleRow {
    x: f64,
    t: f64,
    closed: f64,
    oracle: std::result::Result<(f64, f64), Error>,
}

/// Oracle against closed form over the canonical parameter sets, or the
/// configured bath when one was given.
pub fn oracle_check(cfg: &RunConfig, single_slit: bool, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let baths = if cfg.bath_overridden {
        vec![figures::Bath::new(cfg.temperature, cfg.gamma)]
    } else {
        vec![FREE, THERMAL, WEAK_DISSIPATION]
    };
    let slices: Vec<f64> = if cfg.time == TimeGridSpec::default() {
        ORACLE_TIMES.to_vec()
    } else {
        cfg.times(TimeGridSpec {
            min: Some(ORACLE_TIMES[0]),
            max: Some(ORACLE_TIMES[4]),
            count: Some(ORACLE_TIMES.len()),
            scale: Some(TimeScale::Log),
        })?
    };
    let count = cfg.x_count.unwrap_or(ORACLE_POINTS);
    let (preparation, limit, mode) = if single_slit {
        (Preparation::SingleSlit, SINGLE_SLIT_LIMIT, "single-slit")
    } else {
        (Preparation::DoubleSlit, ORACLE_LIMIT, "double-slit")
    };
    let oracle_cfg = cfg.oracle_config();
    let mut out = Output::new(&cfg.out, format!("oracle-check {mode}; {}", cfg.describe()))?;
    let mut worst: f64 = 0.0;
    let mut failures = 0usize;
    let mut judged = 0usize;
    for bath in baths {
        let p = cfg.params_with(bath.temperature, bath.gamma)?;
        let t_mix = timescales(&p).t_mix;
        let mut points = Vec::new();
        for &k in &slices {
            let t = k * t_mix;
            for x in certification_points(&p, t, count)? {
                points.push((x, t));
            }
        }
        let rows: Vec<OracleRow> = points
            .par_iter()
            .map(|&(x, t)| {
                let closed = if single_slit {
                    single_slit_density(&p, x, t)
                } else {
                    total_density(&p, x, t)
                };
                let oracle = closed.clone().and_then(|_| {
                    oracle_density_with(&p, x, t, preparation, &oracle_cfg).map(|v| (v.density, v.error_bound))
                });
                OracleRow {
                    x,
                    t,
                    closed: closed.unwrap_or(f64::NAN),
                    oracle,
                }
            })
            .collect();
        let mut table = Table::new(
            format!("oracle_{}{}", bath.tag(), if single_slit { "_single" } else { "" }),
            [
                ("x", "position in units of d"),
                ("t", "time in units of t_mix"),
                ("closed_form", "closed-form density"),
                ("oracle", "quadrature density, nan where the quadrature failed"),
                ("rel_err", "|oracle - closed_form| / closed_form"),
                ("judged", "1 if the point counts towards the verdict"),
                ("error_bound", "quadrature error bound"),
            ],
        );
        let d = p.slit_separation();
        let mut peaks = std::collections::HashMap::new();
        for r in &rows {
            let e = peaks.entry(r.t.to_bits()).or_insert(0.0f64);
            *e = e.max(r.closed);
        }
        for r in &rows {
            let is_judged = r.closed > CERTIFICATION_FLOOR * peaks[&r.t.to_bits()];
            let (oracle, bound, rel) = match &r.oracle {
                Ok((v, b)) => (*v, *b, ((v - r.closed) / r.closed).abs()),
                Err(e) => {
                    failures += 1;
                    writeln!(stderr, "{} x={} t={} t_mix: {e}", bath.tag(), num(r.x / d), num(r.t / t_mix))
                        .map_err(|e| CliError::io("<stderr>", e))?;
                    (f64::NAN, f64::NAN, f64::NAN)
                }
            };
            if is_judged && r.oracle.is_ok() {
                judged += 1;
                worst = worst.max(rel);
            }
            table.rows.push(vec![
                num(r.x / d),
                num(r.t / t_mix),
                num(r.closed),
                num(oracle),
                num(rel),
                if is_judged { "1" } else { "0" }.into(),
                num(bound),
            ]);
        }
        out.table(&table)?;
    }
    writeln!(
        stdout,
        "{mode} oracle: max rel err {} over {judged} judged points, {failures} quadrature failures (limit {})",
        short(worst),
        short(limit)
    )
    .map_err(|e| CliError::io("<stdout>", e))?;
    if failures > 0 {
        return Err(CliError::Numerical(format!(
            "{failures} oracle points failed to converge; raise --quadrature-budget or --tolerance"
        )));
    }
    if worst >= limit {
        return Err(CliError::Numerical(format!(
            "oracle disagrees with the closed form: max rel err {} >= {}",
            num(worst),
            num(limit)
        )));
    }
    Ok(())
}

/// Density matrices, `a_OD` and the unitary invariance sweep.
pub fn densmat_cmd(cfg: &RunConfig, points: usize, zero_temperature: bool, stdout: &mut dyn Write) -> Result<()> {
    let p = cfg.params()?;
    if p.friction() != 0.0 {
        return Err(Error::UnsupportedRegime("density-matrix evolution is implemented for gamma = 0 only").into());
    }
    let state = if zero_temperature || p.temperature() == 0.0 {
        InitialState::ZeroTemperature
    } else {
        InitialState::Thermal
    };
    let base = default_matrix_grid(&p, state)?;
    let grid = UniformGrid::symmetric(base.hi(), points)?;
    let full = initial_density_matrix_with(&p, &grid, Part::Full, state)?;
    let cl = initial_density_matrix_with(&p, &grid, Part::Classical, state)?;
    let int = initial_density_matrix_with(&p, &grid, Part::Interference, state)?;
    let norm = off_diagonal_norm(&int)?;
    let normalized = normalized_off_diagonal(&int, &cl)?;
    let closed = closed_form_a_od(&p);
    let closed_value = if state == InitialState::ZeroTemperature {
        std::f64::consts::FRAC_1_SQRT_2
    } else {
        closed.value
    };

    let t_mix = timescales(&p).t_mix;
    let sweep_times = cfg.times(TimeGridSpec {
        min: Some(0.0),
        max: Some(5.0),
        count: Some(11),
        scale: Some(TimeScale::Linear),
    })?;
    let sweep = sweep_times
        .iter()
        .map(|&k| {
            let ev = free_unitary_evolve(&int, k * t_mix)?;
            Ok((k, off_diagonal_norm(&ev)?.norm_sq))
        })
        .collect::<Result<Vec<_>>>()?;
    let drift = sweep
        .iter()
        .map(|(_, n)| ((n - norm.norm_sq) / norm.norm_sq).abs())
        .fold(0.0, f64::max);

    let meta = format!("densmat state={state:?} points={points}; {}", cfg.describe());
    let mut out = Output::new(&cfg.out, meta)?;
    let mut summary = Table::new(
        "densmat_summary",
        [("quantity", "name"), ("value", "value")],
    );
    let entries: [(&str, f64); 9] = [
        ("a_od_grid", norm.a_od),
        ("a_od_grid_error", norm.error_estimate / (2.0 * norm.a_od)),
        ("a_od_closed_form", closed_value),
        ("a_od_closed_form_valid", if closed.valid { 1.0 } else { 0.0 }),
        ("a_od_saturation_over_sqrt2", closed.saturation_over_sqrt2),
        ("a_od_normalized", normalized),
        ("trace_full", full.trace().re),
        ("hermiticity_defect", full.hermiticity_defect()),
        ("sweep_max_rel_drift", drift),
    ];
    for (name, value) in entries {
        summary.rows.push(vec![name.into(), num(value)]);
    }
    let mut sweep_table = Table::new(
        "densmat_sweep",
        [
            ("t", "time in units of t_mix"),
            ("a_od_sq", "|a_OD|^2 of the evolved interference part"),
            ("rel_drift", "relative change against t = 0"),
        ],
    );
    for &(k, n) in &sweep {
        sweep_table.push_numbers(&[k, n, ((n - norm.norm_sq) / norm.norm_sq).abs()]);
    }
    let stride = points.div_ceil(128).max(1);
    if cfg.wants(Format::Csv) {
        out.table(&summary)?;
        out.table(&sweep_table)?;
        for rho in [&full, &int] {
            let mut bytes = format!("# {}; {}\n", crate::output::ARTIFACT_VERSION, out.meta()).into_bytes();
            rho.write_csv(&mut bytes, stride)
                .map_err(|e| CliError::io(out.dir().join("densmat"), e))?;
            let text = String::from_utf8(bytes).expect("csv is utf-8");
            out.raw(&format!("densmat_{}.csv", rho.part().name()), &text)?;
        }
    }
    if cfg.wants(Format::Svg) {
        let values = full.values();
        let rows: Vec<Vec<f64>> = (0..values.nrows())
            .step_by(stride)
            .map(|i| (0..values.ncols()).step_by(stride).map(|j| values[[i, j]].norm()).collect())
            .collect();
        let d = p.slit_separation();
        let svg = Heatmap {
            title: "|rho(x, x')| at t = 0".into(),
            x_label: "x' / d".into(),
            y_label: "x / d".into(),
            x_range: (grid.lo() / d, grid.hi() / d),
            y_range: (grid.lo() / d, grid.hi() / d),
            values: rows,
        }
        .render();
        out.raw("densmat_full.svg", &svg)?;
    }
    let report = format!(
        "a_OD (grid)        {} +/- {}\na_OD (closed form) {}{}\nmax |a_OD|^2 drift over the sweep: {}\n",
        short(norm.a_od),
        short(norm.error_estimate / (2.0 * norm.a_od)),
        short(closed_value),
        if closed.valid { "" } else { " (narrow-slit condition sigma < 0.2 lambda_th violated)" },
        short(drift)
    );
    stdout.write_all(report.as_bytes()).map_err(|e| CliError::io("<stdout>", e))?;
    if drift >= DRIFT_LIMIT {
        return Err(CliError::Numerical(format!(
            "|a_OD|^2 drifted by {} under unitary evolution (limit {})",
            num(drift),
            num(DRIFT_LIMIT)
        )));
    }
    Ok(())
}
