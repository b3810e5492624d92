//! Figure data: fixed parameter sets and time slices, CSV per curve, optional SVG.

use std::fmt;

use clap::ValueEnum;
use decoherence::interference::{attenuation_series, default_grid, profile, Snapshot};
use decoherence::{timescales, ScenarioParams, UniformGrid};
use rayon::prelude::*;

use crate::config::{Format, RunConfig, TimeGridSpec, TimeScale};
use crate::error::Result;
use crate::output::{Output, Table};
use crate::svg::{Axis, Heatmap, LinePlot, Series};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FigureId {
    #[value(name = "1a")]
    Surface,
    #[value(name = "1b")]
    FringeComparison,
    #[value(name = "2")]
    Envelopes,
    #[value(name = "3")]
    OriginDensities,
    #[value(name = "4")]
    Attenuation,
    #[value(name = "4-inset")]
    AttenuationInset,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Surface,
        FigureId::FringeComparison,
        FigureId::Envelopes,
        FigureId::OriginDensities,
        FigureId::Attenuation,
        FigureId::AttenuationInset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Surface => "1a",
            FigureId::FringeComparison => "1b",
            FigureId::Envelopes => "2",
            FigureId::OriginDensities => "3",
            FigureId::Attenuation => "4",
            FigureId::AttenuationInset => "4-inset",
        }
    }

    /// File stem shared by the CSV and SVG outputs.
    pub fn stem(self) -> String {
        format!("figure{}", self.name().replace('-', "_"))
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Bath of one curve, in units of `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bath {
    pub temperature: f64,
    pub gamma: f64,
}

impl Bath {
    pub const fn new(temperature: f64, gamma: f64) -> Self {
        Self { temperature, gamma }
    }

    /// Column-safe tag, e.g. `T1_g0.3`.
    pub fn tag(self) -> String {
        format!("T{}_g{}", self.temperature, self.gamma)
    }

    pub fn label(self) -> String {
        format!("T = {} E, gamma = {} E", self.temperature, self.gamma)
    }
}

pub const WEAK_DISSIPATION: Bath = Bath::new(1.0, 0.3);
pub const FREE: Bath = Bath::new(0.0, 0.0);
pub const THERMAL: Bath = Bath::new(1.0, 0.0);

/// Default parameter sets and sampling of one figure. Times are in units of
/// `t_mix`, `x_span` in units of `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSpec {
    pub id: FigureId,
    pub baths: Vec<Bath>,
    /// Time axis for curves against time.
    pub time_axis: Option<TimeGridSpec>,
    /// Fixed slices for profiles against x.
    pub slices: Vec<f64>,
    pub x_span: Option<f64>,
    pub x_count: Option<usize>,
}

const ATTENUATION_AXIS: TimeGridSpec = TimeGridSpec {
    min: Some(1e-3),
    max: Some(1e2),
    count: Some(400),
    scale: Some(TimeScale::Log),
};

impl FigureSpec {
    pub fn defaults(id: FigureId) -> Self {
        let base = Self {
            id,
            baths: vec![WEAK_DISSIPATION],
            time_axis: None,
            slices: Vec::new(),
            x_span: None,
            x_count: None,
        };
        match id {
            FigureId::Surface => Self {
                time_axis: Some(TimeGridSpec {
                    min: Some(0.0),
                    max: Some(3.0),
                    count: Some(61),
                    scale: Some(TimeScale::Linear),
                }),
                x_span: Some(4.0),
                x_count: Some(401),
                ..base
            },
            FigureId::FringeComparison => Self {
                baths: vec![WEAK_DISSIPATION, FREE],
                slices: vec![1.0],
                ..base
            },
            FigureId::Envelopes => Self {
                slices: vec![0.1, 0.3, 1.0],
                ..base
            },
            FigureId::OriginDensities | FigureId::Attenuation => Self {
                baths: vec![THERMAL],
                time_axis: Some(ATTENUATION_AXIS),
                ..base
            },
            FigureId::AttenuationInset => Self {
                baths: vec![FREE, THERMAL, WEAK_DISSIPATION],
                time_axis: Some(ATTENUATION_AXIS),
                ..base
            },
        }
    }

    /// Applies the run's overrides. A bath given on the command line or in
    /// the config file replaces the default of single-bath figures only.
    pub fn with_overrides(mut self, cfg: &RunConfig) -> Self {
        if cfg.bath_overridden && self.baths.len() == 1 {
            self.baths = vec![Bath::new(cfg.temperature, cfg.gamma)];
        }
        self.x_span = cfg.x_span.or(self.x_span);
        self.x_count = cfg.x_count.or(self.x_count);
        self
    }
}

fn params(cfg: &RunConfig, bath: Bath) -> Result<ScenarioParams<f64>> {
    cfg.params_with(bath.temperature, bath.gamma)
}

fn meta(cfg: &RunConfig, spec: &FigureSpec) -> String {
    let baths: Vec<String> = spec.baths.iter().map(|b| b.tag()).collect();
    format!(
        "figure {}; baths {}; sigma_over_d={} mass={} slit_separation={}",
        spec.id,
        baths.join(" "),
        cfg.sigma_over_d,
        cfg.mass,
        cfg.slit_separation
    )
}

/// Spatial grid from the flags, else `fallback`.
fn x_grid(spec: &FigureSpec, d: f64, fallback: impl FnOnce() -> Result<UniformGrid<f64>>) -> Result<UniformGrid<f64>> {
    match (spec.x_span, spec.x_count) {
        (Some(span), count) => Ok(UniformGrid::symmetric(span * d, count.unwrap_or(2048))?),
        (None, Some(count)) => {
            let g = fallback()?;
            Ok(UniformGrid::symmetric(g.hi(), count)?)
        }
        (None, None) => fallback(),
    }
}

/// Generates one figure; returns the paths written.
pub fn generate(spec: &FigureSpec, cfg: &RunConfig) -> Result<Vec<std::path::PathBuf>> {
    let mut out = Output::new(&cfg.out, meta(cfg, spec))?;
    match spec.id {
        FigureId::Surface => surface(spec, cfg, &mut out)?,
        FigureId::FringeComparison => fringe_comparison(spec, cfg, &mut out)?,
        FigureId::Envelopes => envelopes(spec, cfg, &mut out)?,
        FigureId::OriginDensities => origin_densities(spec, cfg, &mut out)?,
        FigureId::Attenuation => attenuation(spec, cfg, &mut out)?,
        FigureId::AttenuationInset => attenuation_inset(spec, cfg, &mut out)?,
    }
    Ok(out.written().to_vec())
}

fn times(spec: &FigureSpec, cfg: &RunConfig) -> Result<Vec<f64>> {
    cfg.times(spec.time_axis.unwrap_or_default())
}

fn emit_svg(cfg: &RunConfig, out: &mut Output, name: &str, svg: impl FnOnce() -> String) -> Result<()> {
    if cfg.wants(Format::Svg) {
        out.raw(&format!("{name}.svg"), &svg())?;
    }
    Ok(())
}

fn emit_csv(cfg: &RunConfig, out: &mut Output, table: &Table) -> Result<()> {
    if cfg.wants(Format::Csv) {
        out.table(table)?;
    }
    Ok(())
}

fn surface(spec: &FigureSpec, cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let p = params(cfg, spec.baths[0])?;
    let d = p.slit_separation();
    let t_mix = timescales(&p).t_mix;
    let ts = times(spec, cfg)?;
    let grid = UniformGrid::symmetric(spec.x_span.unwrap_or(4.0) * d, spec.x_count.unwrap_or(401))?;
    let xs = grid.points();
    let rows: Vec<Vec<f64>> = ts
        .par_iter()
        .map(|&k| {
            let snap = Snapshot::new(&p, k * t_mix)?;
            Ok(xs.iter().map(|&x| snap.total(x) * d).collect())
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(
        spec.id.stem(),
        [
            ("t", "time in units of t_mix"),
            ("x", "position in units of d"),
            ("P", "probability density P(x, t) in units of 1/d"),
        ],
    );
    for (&k, row) in ts.iter().zip(&rows) {
        for (&x, &v) in xs.iter().zip(row) {
            table.push_numbers(&[k, x / d, v]);
        }
    }
    emit_csv(cfg, out, &table)?;
    emit_svg(cfg, out, &spec.id.stem(), || {
        Heatmap {
            title: format!("P(x, t), {}", spec.baths[0].label()),
            x_label: "x / d".into(),
            y_label: "t / t_mix".into(),
            x_range: (grid.lo() / d, grid.hi() / d),
            y_range: (ts[0], ts[ts.len() - 1]),
            values: rows.clone(),
        }
        .render()
    })
}

fn fringe_comparison(spec: &FigureSpec, cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let scenarios = spec
        .baths
        .iter()
        .map(|&b| params(cfg, b))
        .collect::<Result<Vec<_>>>()?;
    let d = scenarios[0].slit_separation();
    let k = spec.slices[0];
    let t = k * timescales(&scenarios[0]).t_mix;
    let grid = x_grid(spec, d, || Ok(default_grid(&scenarios[0], t)?))?;
    let profiles = scenarios
        .iter()
        .map(|p| Ok(profile(p, t, &grid)?))
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec![("x".to_string(), "position in units of d".to_string())];
    for b in &spec.baths {
        columns.push((format!("P_{}", b.tag()), format!("P(x, {k} t_mix) for {} in units of 1/d", b.label())));
    }
    let mut table = Table::new(spec.id.stem(), columns);
    for (i, &x) in grid.points().iter().enumerate() {
        let mut row = vec![x / d];
        row.extend(profiles.iter().map(|pr| pr.total[i] * d));
        table.push_numbers(&row);
    }
    emit_csv(cfg, out, &table)?;
    emit_svg(cfg, out, &spec.id.stem(), || {
        let series = spec
            .baths
            .iter()
            .zip(&profiles)
            .enumerate()
            .map(|(j, (b, pr))| {
                let s = Series::new(b.label(), pr.x.iter().zip(&pr.total).map(|(&x, &v)| (x / d, v * d)).collect());
                if j == 0 {
                    s.dashed()
                } else {
                    s
                }
            })
            .collect();
        LinePlot {
            title: format!("P(x, {k} t_mix)"),
            x_label: "x / d".into(),
            y_label: "P d".into(),
            x_axis: Axis::Linear,
            y_axis: Axis::Linear,
            series,
        }
        .render()
    })
}

fn envelopes(spec: &FigureSpec, cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let p = params(cfg, spec.baths[0])?;
    let d = p.slit_separation();
    let t_mix = timescales(&p).t_mix;
    for &k in &spec.slices {
        let t = k * t_mix;
        let grid = x_grid(spec, d, || Ok(default_grid(&p, t)?))?;
        let pr = profile(&p, t, &grid)?;
        let name = format!("{}_t{k}", spec.id.stem());
        let mut table = Table::new(
            name.clone(),
            [
                ("x", "position in units of d"),
                ("P", "total density P(x, t) in units of 1/d"),
                ("P_cl", "non-interfering part P_cl(x, t)"),
                ("P_cl_minus_P_int", "lower envelope P_cl - P_int"),
                ("P_cl_plus_P_int", "upper envelope P_cl + P_int"),
            ],
        );
        for i in 0..pr.x.len() {
            let (cl, int) = (pr.classical[i], pr.interference[i]);
            table.push_numbers(&[pr.x[i] / d, pr.total[i] * d, cl * d, (cl - int) * d, (cl + int) * d]);
        }
        emit_csv(cfg, out, &table)?;
        emit_svg(cfg, out, &name, || {
            let col = |f: &dyn Fn(usize) -> f64| (0..pr.x.len()).map(|i| (pr.x[i] / d, f(i) * d)).collect();
            LinePlot {
                title: format!("P(x, {k} t_mix), {}", spec.baths[0].label()),
                x_label: "x / d".into(),
                y_label: "P d".into(),
                x_axis: Axis::Linear,
                y_axis: Axis::Linear,
                series: vec![
                    Series::new("P", col(&|i| pr.total[i])),
                    Series::new("P_cl - P_int", col(&|i| pr.classical[i] - pr.interference[i])).dashed(),
                    Series::new("P_cl + P_int", col(&|i| pr.classical[i] + pr.interference[i])).dashed(),
                ],
            }
            .render()
        })?;
    }
    Ok(())
}

fn origin_densities(spec: &FigureSpec, cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let p = params(cfg, spec.baths[0])?;
    let d = p.slit_separation();
    let t_mix = timescales(&p).t_mix;
    let ts = times(spec, cfg)?;
    let rows: Vec<[f64; 4]> = ts
        .par_iter()
        .map(|&k| {
            let snap = Snapshot::new(&p, k * t_mix)?;
            let cl = snap.classical(0.0).total;
            let int = snap.interference_amplitude(0.0);
            Ok([k, cl * d, int * d, snap.ln_attenuation_flo().exp()])
        })
        .collect::<Result<_>>()?;
    let mut table = Table::new(
        spec.id.stem(),
        [
            ("t", "time in units of t_mix"),
            ("P_cl", "P_cl(0, t) in units of 1/d"),
            ("P_int", "P_int(0, t) in units of 1/d"),
            ("a_FLO", "P_int(0, t) / P_cl(0, t)"),
        ],
    );
    for row in &rows {
        table.push_numbers(row);
    }
    emit_csv(cfg, out, &table)?;
    emit_svg(cfg, out, &spec.id.stem(), || {
        let col = |j: usize| rows.iter().map(|r| (r[0], r[j])).collect();
        LinePlot {
            title: format!("Densities at x = 0, {}", spec.baths[0].label()),
            x_label: "t / t_mix".into(),
            y_label: "value".into(),
            x_axis: Axis::Log,
            y_axis: Axis::Log,
            series: vec![
                Series::new("P_cl(0, t) d", col(1)).dashed(),
                Series::new("P_int(0, t) d", col(2)),
                Series::new("a_FLO", col(3)).dashed(),
            ],
        }
        .render()
    })
}

fn attenuation(spec: &FigureSpec, cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let p = params(cfg, spec.baths[0])?;
    let t_mix = timescales(&p).t_mix;
    let ts = times(spec, cfg)?;
    let abs: Vec<f64> = ts.iter().map(|k| k * t_mix).collect();
    let series = attenuation_series(&p, &abs)?;
    let mut table = Table::new(
        spec.id.stem(),
        [
            ("t", "time in units of t_mix"),
            ("a_2", "attenuation factor a_2(t)"),
            ("a_FLO", "attenuation factor a_FLO(t)"),
        ],
    );
    for ((&k, &a2), &flo) in ts.iter().zip(&series.a_2).zip(&series.a_flo) {
        table.push_numbers(&[k, a2, flo]);
    }
    emit_csv(cfg, out, &table)?;
    emit_svg(cfg, out, &spec.id.stem(), || {
        let col = |v: &[f64]| ts.iter().copied().zip(v.iter().copied()).collect();
        LinePlot {
            title: format!("Attenuation factors, {}", spec.baths[0].label()),
            x_label: "t / t_mix".into(),
            y_label: "a".into(),
            x_axis: Axis::Log,
            y_axis: Axis::Log,
            series: vec![
                Series::new("a_2", col(&series.a_2)),
                Series::new("a_FLO", col(&series.a_flo)).dashed(),
            ],
        }
        .render()
    })
}

fn attenuation_inset(spec: &FigureSpec, cfg: &RunConfig, out: &mut Output) -> Result<()> {
    let ts = times(spec, cfg)?;
    let curves = spec
        .baths
        .par_iter()
        .map(|&b| {
            let p = params(cfg, b)?;
            let t_mix = timescales(&p).t_mix;
            let abs: Vec<f64> = ts.iter().map(|k| k * t_mix).collect();
            Ok(attenuation_series(&p, &abs)?.a_2)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec![("t".to_string(), "time in units of t_mix".to_string())];
    for b in &spec.baths {
        columns.push((format!("a_2_{}", b.tag()), format!("a_2(t) for {}", b.label())));
    }
    let mut table = Table::new(spec.id.stem(), columns);
    for (i, &k) in ts.iter().enumerate() {
        let mut row = vec![k];
        row.extend(curves.iter().map(|c| c[i]));
        table.push_numbers(&row);
    }
    emit_csv(cfg, out, &table)?;
    emit_svg(cfg, out, &spec.id.stem(), || {
        LinePlot {
            title: "a_2(t)".into(),
            x_label: "t / t_mix".into(),
            y_label: "a_2".into(),
            x_axis: Axis::Log,
            y_axis: Axis::Log,
            series: spec
                .baths
                .iter()
                .zip(&curves)
                .map(|(b, c)| Series::new(b.label(), ts.iter().copied().zip(c.iter().copied()).collect()))
                .collect(),
        }
        .render()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_baths_and_slices() {
        let s = FigureSpec::defaults(FigureId::FringeComparison);
        assert_eq!(s.baths, vec![WEAK_DISSIPATION, FREE]);
        assert_eq!(s.slices, vec![1.0]);
        assert_eq!(FigureSpec::defaults(FigureId::Envelopes).slices, vec![0.1, 0.3, 1.0]);
        assert_eq!(FigureSpec::defaults(FigureId::OriginDensities).baths, vec![THERMAL]);
        assert_eq!(
            FigureSpec::defaults(FigureId::AttenuationInset).baths,
            vec![FREE, THERMAL, WEAK_DISSIPATION]
        );
        assert_eq!(FigureSpec::defaults(FigureId::Attenuation).time_axis, Some(ATTENUATION_AXIS));
    }

    #[test]
    fn bath_override_only_touches_single_bath_figures() {
        let cfg = RunConfig {
            bath_overridden: true,
            gamma: 0.1,
            ..RunConfig::default()
        };
        let one = FigureSpec::defaults(FigureId::Attenuation).with_overrides(&cfg);
        assert_eq!(one.baths, vec![Bath::new(1.0, 0.1)]);
        let many = FigureSpec::defaults(FigureId::AttenuationInset).with_overrides(&cfg);
        assert_eq!(many.baths.len(), 3);
    }

    #[test]
    fn stems() {
        assert_eq!(FigureId::AttenuationInset.stem(), "figure4_inset");
        assert_eq!(FigureId::Surface.stem(), "figure1a");
    }
}
