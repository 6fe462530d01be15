//! Command-line grammar.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sosgibbs::{BranchPattern, PrefactorConvention, RootSplit};

#[derive(Debug, Parser)]
#[command(name = "sosgibbs", version, about = "Boundary-law fixed points and Gibbs-measure checks for the three-state SOS model on Cayley trees")]
pub struct Cli {
    /// Flat key = value file mirroring the long flags; flags given on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thresholds of the b = 0 branch at one temperature.
    #[command(args_override_self = true)]
    Criticals(CriticalsArgs),
    /// Solve one of the reduced fixed-point systems.
    #[command(args_override_self = true)]
    Solve(SolveArgs),
    /// Predicted and found solution counts over a (theta, c) grid, b = 0 branch.
    #[command(args_override_self = true)]
    Sweep(SweepArgs),
    /// Exact-enumeration compatibility check of the solved fields on a finite ball.
    #[command(name = "verify-tree", args_override_self = true)]
    VerifyTree(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Ti,
    Periodic,
    BNonzero,
    BZero,
    Eq23,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    K,
    D,
}

impl From<ConventionArg> for PrefactorConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::K => PrefactorConvention::KOverHStar,
            ConventionArg::D => PrefactorConvention::DOverHStar,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RootLabel {
    H,
    L,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long)]
    pub theta: f64,
    /// Branching: every vertex has k + 1 neighbours.
    #[arg(long)]
    pub k: usize,
    /// Highest spin value; the solvers need m = 2.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Fixed root-scan window `lo:hi:points` (default: analytic enclosure).
    #[arg(long, value_parser = parse_scan, value_name = "LO:HI:POINTS", allow_hyphen_values = true)]
    pub scan: Option<(f64, f64, usize)>,
    /// Residual tolerance for accepting a root.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct CriticalsArgs {
    #[arg(long)]
    pub d: usize,
    /// A number, or `critical` for theta_c(d) itself.
    #[arg(long, value_parser = parse_theta_or_critical)]
    pub theta: ThetaArg,
    /// Order used for h* and the k/h* prefactor (default: d).
    #[arg(long)]
    pub k: Option<usize>,
    /// Use this h* instead of the default root of h = k f(h).
    #[arg(long, allow_hyphen_values = true)]
    pub h_star: Option<f64>,
    /// Convention listed first and used for the headline c* values.
    #[arg(long, value_enum, default_value = "k")]
    pub convention: ConventionArg,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaArg {
    Value(f64),
    Critical,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_parser = parse_pattern, value_name = "A,B,C,D")]
    pub pattern: Option<BranchPattern>,
    /// c for the b = 0 branch (d = k - c).
    #[arg(long)]
    pub c: Option<usize>,
    /// Zero-based index of h* among the ascending roots of h = k f(h).
    #[arg(long)]
    pub h_star_index: Option<usize>,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// `lo:hi:steps`, endpoints included.
    #[arg(long, value_parser = parse_theta_range, value_name = "LO:HI:STEPS")]
    pub theta: (f64, f64, usize),
    /// `0,1,3` or an inclusive range `0:4`.
    #[arg(long, value_parser = parse_c_values)]
    pub c: CValues,
    #[arg(long)]
    pub k: usize,
    /// Thread count for evaluating grid points (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CValues(pub Vec<usize>);

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_parser = parse_pattern, value_name = "A,B,C,D")]
    pub pattern: BranchPattern,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "h")]
    pub root_label: RootLabel,
    /// How many of the root's k + 1 children carry h and l (default: pattern plus one of the root's own label).
    #[arg(long, value_parser = parse_root_split, value_name = "H,L")]
    pub root_split: Option<RootSplit>,
    /// Shift both field values by this amount (or along a seeded random direction with --seed).
    #[arg(long, allow_hyphen_values = true)]
    pub perturb: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub scan: ScanArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_list<T: std::str::FromStr>(s: &str, sep: char, n: usize, what: &str) -> Result<Vec<T>, String> {
    let parts: Vec<&str> = s.split(sep).map(str::trim).collect();
    if parts.len() != n {
        return Err(format!("{what}: expected {n} values separated by '{sep}', got {s:?}"));
    }
    parts
        .iter()
        .map(|p| p.parse::<T>().map_err(|_| format!("{what}: cannot parse {p:?}")))
        .collect()
}

pub fn parse_pattern(s: &str) -> Result<BranchPattern, String> {
    let v: Vec<usize> = parse_list(s, ',', 4, "pattern")?;
    Ok(BranchPattern::new(v[0], v[1], v[2], v[3]))
}

pub fn parse_root_split(s: &str) -> Result<RootSplit, String> {
    let v: Vec<usize> = parse_list(s, ',', 2, "root split")?;
    Ok(RootSplit { h: v[0], l: v[1] })
}

pub fn parse_scan(s: &str) -> Result<(f64, f64, usize), String> {
    let v: Vec<&str> = s.split(':').collect();
    if v.len() != 3 {
        return Err(format!("scan: expected lo:hi:points, got {s:?}"));
    }
    let lo: f64 = v[0].trim().parse().map_err(|_| format!("scan: bad lo {:?}", v[0]))?;
    let hi: f64 = v[1].trim().parse().map_err(|_| format!("scan: bad hi {:?}", v[1]))?;
    let n: usize = v[2].trim().parse().map_err(|_| format!("scan: bad point count {:?}", v[2]))?;
    Ok((lo, hi, n))
}

pub fn parse_theta_range(s: &str) -> Result<(f64, f64, usize), String> {
    let (lo, hi, steps) = parse_scan(s).map_err(|e| e.replace("scan", "theta range"))?;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
        return Err(format!("theta range: need 0 < lo < hi, got {lo}:{hi}"));
    }
    if steps < 2 {
        return Err(format!("theta range: need steps >= 2, got {steps}"));
    }
    Ok((lo, hi, steps))
}

pub fn parse_c_values(s: &str) -> Result<CValues, String> {
    if let Some((a, b)) = s.split_once(':') {
        let a: usize = a.trim().parse().map_err(|_| format!("c range: bad start {a:?}"))?;
        let b: usize = b.trim().parse().map_err(|_| format!("c range: bad end {b:?}"))?;
        if a > b {
            return Err(format!("c range: start {a} > end {b}"));
        }
        return Ok(CValues((a..=b).collect()));
    }
    let v: Result<Vec<usize>, _> = s.split(',').map(|p| p.trim().parse::<usize>()).collect();
    match v {
        Ok(v) if !v.is_empty() => Ok(CValues(v)),
        _ => Err(format!("c values: expected a list like 0,1,2 or a range like 0:4, got {s:?}")),
    }
}

pub fn parse_theta_or_critical(s: &str) -> Result<ThetaArg, String> {
    if s.eq_ignore_ascii_case("critical") {
        return Ok(ThetaArg::Critical);
    }
    s.parse::<f64>()
        .map(ThetaArg::Value)
        .map_err(|_| format!("theta: expected a number or `critical`, got {s:?}"))
}
