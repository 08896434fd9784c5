//! Limit-regime scans over parameter grids.

use std::collections::BTreeMap;
use std::time::Instant;

use anyhow::{bail, Result};
use rayon::prelude::*;
use serde::Serialize;
use zetatherm::ergopt::{DeviationFunction, InfMethod};
use zetatherm::zeta::{truncated_sums, Truncated, ZetaMeasure, ZetaParams};
use zetatherm_symbolic::{LocallyConstantPotential, Word};

use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Regime {
    /// Zeta measures on a grid of `c` and `s`.
    #[value(name = "fixed-c-s-to-1")]
    FixedCSToOne,
    /// Zeta measures along `s = 1 − L/c`.
    #[value(name = "L-schedule")]
    LSchedule,
    /// Truncated measures with `N = ⌈c^exp⌉` or explicit `N`.
    #[value(name = "N-over-c")]
    NOverC,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::FixedCSToOne => "fixed-c-s-to-1",
            Regime::LSchedule => "L-schedule",
            Regime::NOverC => "N-over-c",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    Pi,
    Eta,
}

impl From<Kind> for Truncated {
    fn from(kind: Kind) -> Self {
        match kind {
            Kind::Pi => Truncated::Pi,
            Kind::Eta => Truncated::Eta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub regime: &'static str,
    pub c: f64,
    pub s: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "L")]
    pub l: Option<f64>,
    pub cylinder: String,
    pub value: f64,
    pub rate: f64,
    #[serde(rename = "inf_I")]
    pub inf_i: f64,
    pub certified: bool,
    pub n_used: usize,
    pub tail_bound: f64,
    pub wall_ms: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub regime: Regime,
    pub grid: Grid,
    pub cylinders: Vec<Word>,
    pub kind: Kind,
    pub rel_tol: f64,
    pub n_cap: usize,
    pub timing: bool,
}

#[derive(Debug, Clone, Copy)]
enum Point {
    Zeta { c: f64, s: f64, l: Option<f64> },
    Truncated { c: f64, n: usize },
}

fn points(config: &ScanConfig) -> Result<Vec<Point>> {
    let grid = &config.grid;
    let mut points = Vec::new();
    match config.regime {
        Regime::FixedCSToOne => {
            grid.check_keys(&["c", "s"])?;
            for &c in grid.require("c")? {
                for &s in grid.require("s")? {
                    points.push(Point::Zeta { c, s, l: None });
                }
            }
        }
        Regime::LSchedule => {
            grid.check_keys(&["c", "L"])?;
            for &l in grid.require("L")? {
                for &c in grid.require("c")? {
                    points.push(Point::Zeta { c, s: 1.0 - l / c, l: Some(l) });
                }
            }
        }
        Regime::NOverC => {
            grid.check_keys(&["c", "N", "exp"])?;
            let cs = grid.require("c")?;
            match (grid.get("N"), grid.get("exp")) {
                (Some(_), Some(_)) => bail!("give either N or exp, not both"),
                (Some(ns), None) => {
                    for &c in cs {
                        for &n in ns {
                            if n < 1.0 || n.fract() != 0.0 {
                                bail!("N must be a positive integer, got {n}");
                            }
                            points.push(Point::Truncated { c, n: n as usize });
                        }
                    }
                }
                (None, exps) => {
                    for &c in cs {
                        for &e in exps.unwrap_or(&[0.5]) {
                            if !(c > 0.0) {
                                bail!("c must be positive, got {c}");
                            }
                            points.push(Point::Truncated { c, n: c.powf(e).ceil().max(1.0) as usize });
                        }
                    }
                }
            }
        }
    }
    Ok(points)
}

fn evaluate(
    f: &LocallyConstantPotential,
    config: &ScanConfig,
    infs: &BTreeMap<String, f64>,
    point: Point,
) -> Result<Vec<Row>> {
    let start = Instant::now();
    let d = f.spec().d();
    let mut rows: Vec<Row> = match point {
        Point::Zeta { c, s, l } => {
            let params = ZetaParams::new(c, s)?.with_rel_tol(config.rel_tol)?.with_n_cap(config.n_cap)?;
            let measures = ZetaMeasure::new(f, params)?.measures(&config.cylinders)?;
            config
                .cylinders
                .iter()
                .zip(measures)
                .map(|(w, m)| Row {
                    regime: config.regime.name(),
                    c,
                    s: Some(s),
                    n: None,
                    l: Some(l.unwrap_or(c * (1.0 - s))),
                    cylinder: w.to_text(d),
                    value: m.value,
                    rate: m.log_value / c,
                    inf_i: infs[&w.to_text(d)],
                    certified: m.certified,
                    n_used: m.n_used,
                    tail_bound: m.tail_bound,
                    wall_ms: None,
                })
                .collect()
        }
        Point::Truncated { c, n } => {
            let sums = truncated_sums(f, config.kind.into(), c, n, &config.cylinders)?;
            config
                .cylinders
                .iter()
                .enumerate()
                .map(|(i, w)| Row {
                    regime: config.regime.name(),
                    c,
                    s: None,
                    n: Some(n),
                    l: None,
                    cylinder: w.to_text(d),
                    value: sums.measure(i),
                    rate: sums.log_measure(i) / c,
                    inf_i: infs[&w.to_text(d)],
                    certified: true,
                    n_used: n,
                    tail_bound: 0.0,
                    wall_ms: None,
                })
                .collect()
        }
    };
    if config.timing {
        let ms = start.elapsed().as_millis() as u64;
        rows.iter_mut().for_each(|r| r.wall_ms = Some(ms));
    }
    Ok(rows)
}

/// Evaluates every grid point in parallel and returns rows sorted by `(c, cylinder)`,
/// keeping grid order among ties.
pub fn run_scan(f: &LocallyConstantPotential, config: &ScanConfig) -> Result<Vec<Row>> {
    let d = f.spec().d();
    let dev = DeviationFunction::new(f);
    let mut infs = BTreeMap::new();
    for w in &config.cylinders {
        infs.insert(w.to_text(d), dev.inf_cylinder(w, InfMethod::Exact)?);
    }
    let points = points(config)?;
    let per_point: Vec<Vec<Row>> = points
        .par_iter()
        .map(|&p| evaluate(f, config, &infs, p))
        .collect::<Result<_>>()?;
    let mut rows: Vec<Row> = per_point.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.c.total_cmp(&b.c).then_with(|| a.cylinder.cmp(&b.cylinder)));
    Ok(rows)
}

pub fn write_csv<W: std::io::Write>(rows: &[Row], out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    if rows.is_empty() {
        writer.write_record([
            "regime", "c", "s", "N", "L", "cylinder", "value", "rate", "inf_I", "certified", "n_used",
            "tail_bound", "wall_ms",
        ])?;
    }
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}
