//! Phase-diagram sweep over `(theta, c)` on the `b = 0` branch.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use sosgibbs::{classify_point, theta_critical, BranchPattern, ModelParams, Regime, RootFindConfig};

use crate::args::{Format, SweepArgs};
use crate::format::{json, machine, machine_opt};
use crate::{pick_format, scan_config, CliError};

pub const SCHEMA: &str = "sosgibbs-sweep v1";
pub const COLUMNS: &str = "theta,c,k,d,theta_c,c_star_1,c_star_2,N_predicted,N_found,regime";
pub const MAX_POINTS: usize = 10_000_000;

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub steps: usize,
    pub c_values: Vec<usize>,
    pub k: usize,
    pub cfg: RootFindConfig,
}

impl SweepSpec {
    pub fn thetas(&self) -> Vec<f64> {
        let span = self.theta_hi - self.theta_lo;
        (0..self.steps)
            .map(|i| self.theta_lo + span * i as f64 / (self.steps - 1) as f64)
            .collect()
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.theta_lo > 0.0 && self.theta_lo < self.theta_hi && self.theta_hi.is_finite()) || self.steps < 2 {
            return Err(CliError::Usage("theta range needs 0 < lo < hi and steps >= 2".into()));
        }
        if self.c_values.is_empty() {
            return Err(CliError::Usage("no c values".into()));
        }
        if let Some(c) = self.c_values.iter().find(|&&c| c > self.k) {
            return Err(CliError::Usage(format!("c = {c} exceeds k = {}", self.k)));
        }
        if self.steps.saturating_mul(self.c_values.len()) > MAX_POINTS {
            return Err(CliError::Usage(format!("sweep exceeds {MAX_POINTS} points")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub theta: f64,
    pub c: usize,
    pub k: usize,
    pub d: usize,
    pub theta_c: Option<f64>,
    pub c_star_1: Option<f64>,
    pub c_star_2: Option<f64>,
    #[serde(rename = "N_predicted")]
    pub n_predicted: usize,
    #[serde(rename = "N_found")]
    pub n_found: usize,
    pub regime: &'static str,
}

fn evaluate(theta: f64, c: usize, spec: &SweepSpec) -> Result<SweepRow, CliError> {
    let k = spec.k;
    let d = k - c;
    let params = ModelParams::three_state(theta, k)?;
    let rep = classify_point(&BranchPattern::new(k, 0, c, d), &params, &spec.cfg)?;
    let crit = rep.criticals.as_ref();
    Ok(SweepRow {
        theta,
        c,
        k,
        d,
        theta_c: if d >= 2 { Some(theta_critical(d)?) } else { None },
        c_star_1: crit.and_then(|s| s.c_star_1),
        c_star_2: crit.and_then(|s| s.c_star_2),
        n_predicted: rep.n_solutions_predicted,
        n_found: rep.n_solutions_found,
        regime: rep.regime.as_str(),
    })
}

/// Rows in `theta`-outer, `c`-inner order whatever the number of workers.
pub fn sweep_rows(spec: &SweepSpec, workers: Option<usize>) -> Result<Vec<SweepRow>, CliError> {
    spec.validate()?;
    let points: Vec<(f64, usize)> = spec
        .thetas()
        .into_iter()
        .flat_map(|t| spec.c_values.iter().map(move |&c| (t, c)))
        .collect();
    let work = || points.par_iter().map(|&(t, c)| evaluate(t, c, spec)).collect::<Result<Vec<_>, _>>();
    match workers {
        None => work(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?
            .install(work),
    }
}

pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut s = String::with_capacity(rows.len() * 160);
    let _ = writeln!(s, "# {SCHEMA}");
    let _ = writeln!(s, "{COLUMNS}");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            machine(r.theta),
            r.c,
            r.k,
            r.d,
            machine_opt(r.theta_c),
            machine_opt(r.c_star_1),
            machine_opt(r.c_star_2),
            r.n_predicted,
            r.n_found,
            r.regime
        );
    }
    s
}

#[derive(Serialize)]
struct SweepJson<'a> {
    schema: &'static str,
    rows: &'a [SweepRow],
}

pub fn render_json(rows: &[SweepRow]) -> Result<String, CliError> {
    Ok(json(&SweepJson { schema: SCHEMA, rows })?)
}

pub fn run(args: &SweepArgs) -> Result<String, CliError> {
    let fmt = pick_format(&args.output, Format::Csv, &[Format::Csv, Format::Json])?;
    let (theta_lo, theta_hi, steps) = args.theta;
    let spec = SweepSpec {
        theta_lo,
        theta_hi,
        steps,
        c_values: args.c.0.clone(),
        k: args.k,
        cfg: scan_config(&args.scan),
    };
    let rows = sweep_rows(&spec, args.workers)?;
    match fmt {
        Format::Json => render_json(&rows),
        _ => Ok(render_csv(&rows)),
    }
}

/// Regime column back to the enum, for readers of the CSV.
pub fn parse_regime(s: &str) -> Option<Regime> {
    match s {
        "UNIQUE" => Some(Regime::Unique),
        "BOUNDARY_PAIR" => Some(Regime::BoundaryPair),
        "TRIPLE" => Some(Regime::Triple),
        _ => None,
    }
}
