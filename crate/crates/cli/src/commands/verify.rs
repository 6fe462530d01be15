//! Exact-enumeration check of solved fields on a finite ball.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sosgibbs::{
    assign_fields, build_tree, check_compatibility, classify_point, exact_mu_n, root_marginal, BranchPattern, Label,
    ModelParams, Regime, RootSplit,
};

use crate::args::{Format, RootLabel, VerifyArgs};
use crate::format::{human, json};
use crate::{pick_format, scan_config, CliError};

#[derive(Debug, Serialize)]
pub struct SolutionCheck {
    pub h2: f64,
    pub l2: f64,
    pub deviation: f64,
    pub perturbation: Option<(f64, f64)>,
    pub perturbed_deviation: Option<f64>,
    pub root_marginal: [f64; 3],
}

#[derive(Debug, Serialize)]
pub struct PairDistance {
    pub i: usize,
    pub j: usize,
    pub sup_distance: f64,
}

#[derive(Debug, Serialize)]
pub struct VerifyOut {
    pub theta: f64,
    pub k: usize,
    pub n: usize,
    pub pattern: BranchPattern,
    pub root_label: Label,
    pub root_split: RootSplit,
    pub regime: Regime,
    pub solutions: Vec<SolutionCheck>,
    pub pairwise: Vec<PairDistance>,
}

pub fn run(args: &VerifyArgs) -> Result<String, CliError> {
    let fmt = pick_format(&args.output, Format::Human, &[Format::Human, Format::Json])?;
    let out = verify(args)?;
    match fmt {
        Format::Json => Ok(json(&out)?),
        _ => Ok(render_human(&out)),
    }
}

pub fn verify(args: &VerifyArgs) -> Result<VerifyOut, CliError> {
    let params = ModelParams::new(args.model.theta, args.model.k, args.model.m)?;
    let pattern = args.pattern;
    let label = match args.root_label {
        RootLabel::H => Label::HBar,
        RootLabel::L => Label::LBar,
    };
    let split = args.root_split.unwrap_or_else(|| RootSplit::default_for(&pattern, label));
    let tree = build_tree(params.k, args.n)?;
    let rep = classify_point(&pattern, &params, &scan_config(&args.scan))?;
    let mut rng = args.seed.map(ChaCha8Rng::seed_from_u64);

    let mut solutions = Vec::with_capacity(rep.solutions.len());
    for root in &rep.solutions.roots {
        let (h2, l2) = (root.field.h2, root.field.l2);
        let fields = assign_fields(&tree, &pattern, h2, l2, label, Some(split))?;
        let deviation = check_compatibility(&tree, &fields, params.theta)?;
        let dist = exact_mu_n(&tree, &fields, params.theta)?;
        let perturbation = args.perturb.map(|delta| match rng.as_mut() {
            Some(r) => {
                let angle = r.gen_range(0.0..TAU);
                (delta * angle.cos(), delta * angle.sin())
            }
            None => (delta, delta),
        });
        let perturbed_deviation = match perturbation {
            Some((dh, dl)) => Some(check_compatibility(&tree, &fields.perturbed(dh, dl), params.theta)?),
            None => None,
        };
        solutions.push(SolutionCheck {
            h2,
            l2,
            deviation,
            perturbation,
            perturbed_deviation,
            root_marginal: root_marginal(&dist),
        });
    }

    let mut pairwise = Vec::new();
    for i in 0..solutions.len() {
        for j in i + 1..solutions.len() {
            let (a, b) = (&solutions[i].root_marginal, &solutions[j].root_marginal);
            let sup_distance = (0..3).map(|s| (a[s] - b[s]).abs()).fold(0.0, f64::max);
            pairwise.push(PairDistance { i, j, sup_distance });
        }
    }
    Ok(VerifyOut {
        theta: params.theta,
        k: params.k,
        n: args.n,
        pattern,
        root_label: label,
        root_split: split,
        regime: rep.regime,
        solutions,
        pairwise,
    })
}

fn render_human(o: &VerifyOut) -> String {
    let p = &o.pattern;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "theta {}  k {}  n {}  pattern {},{},{},{}  root split {},{}  regime {}",
        human(o.theta),
        o.k,
        o.n,
        p.a,
        p.b,
        p.c,
        p.d,
        o.root_split.h,
        o.root_split.l,
        o.regime.as_str()
    );
    for (i, sol) in o.solutions.iter().enumerate() {
        let m = sol.root_marginal;
        let _ = writeln!(
            s,
            "solution {}: h2 = {}  l2 = {}  deviation = {}  root marginal = ({}, {}, {})",
            i + 1,
            human(sol.h2),
            human(sol.l2),
            human(sol.deviation),
            human(m[0]),
            human(m[1]),
            human(m[2])
        );
        if let (Some((dh, dl)), Some(dev)) = (sol.perturbation, sol.perturbed_deviation) {
            let _ = writeln!(s, "  perturbed by ({}, {}): deviation = {}", human(dh), human(dl), human(dev));
        }
    }
    for pd in &o.pairwise {
        let _ = writeln!(s, "sup distance {}-{}: {}", pd.i + 1, pd.j + 1, human(pd.sup_distance));
    }
    s
}
