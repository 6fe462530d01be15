use std::fmt::Write as _;

use serde::Serialize;
use sosgibbs::{
    classify_point, family_tag, solve_b_zero, solve_non_ti, solve_periodic, solve_ti,
    BranchPattern, FamilyTag, HStarChoice, ModelParams, Regime, RootTag, SolutionReport, Stability,
};

use crate::args::{Format, Mode, SolveArgs};
use crate::format::{human, json};
use crate::{pick_format, scan_config, CliError};

#[derive(Debug, Serialize)]
struct RootOut {
    h2: f64,
    l2: f64,
    residual: f64,
    derivative: f64,
    stability: Stability,
    tag: Option<RootTag>,
    family: FamilyTag,
}

#[derive(Debug, Serialize)]
struct Prediction {
    regime: Regime,
    n_predicted: usize,
    n_found: usize,
    rule: &'static str,
    condition_value: Option<f64>,
}

#[derive(Debug, Serialize)]
struct SolveOut {
    mode: &'static str,
    theta: f64,
    k: usize,
    pattern: BranchPattern,
    equation: &'static str,
    roots: Vec<RootOut>,
    regime_note: String,
    warnings: Vec<String>,
    diagnostics: Vec<(String, f64)>,
    prediction: Option<Prediction>,
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Ti => "ti",
        Mode::Periodic => "periodic",
        Mode::BNonzero => "b-nonzero",
        Mode::BZero => "b-zero",
        Mode::Eq23 => "eq23",
    }
}

fn need_pattern(args: &SolveArgs) -> Result<BranchPattern, CliError> {
    args.pattern
        .ok_or_else(|| CliError::Usage(format!("--mode {} needs --pattern a,b,c,d", mode_name(args.mode))))
}

pub fn run(args: &SolveArgs) -> Result<String, CliError> {
    let fmt = pick_format(&args.output, Format::Human, &[Format::Human, Format::Json])?;
    let params = ModelParams::new(args.model.theta, args.model.k, args.model.m)?;
    let cfg = scan_config(&args.scan);
    let k = params.k;

    let (pattern, report, prediction): (BranchPattern, SolutionReport, Option<Prediction>) = match args.mode {
        Mode::Ti => (BranchPattern::new(k, 0, k, 0), solve_ti(&params, &cfg)?, None),
        Mode::Periodic => (BranchPattern::new(0, k, k, 0), solve_periodic(&params, &cfg)?, None),
        Mode::BNonzero => {
            let pat = need_pattern(args)?;
            let (rep, pred) = classified(&pat, &params, &cfg)?;
            (pat, rep, Some(pred))
        }
        Mode::BZero => {
            let c = match (args.c, args.pattern) {
                (Some(c), _) => c,
                (None, Some(p)) if p.b == 0 => p.c,
                (None, Some(_)) => return Err(CliError::Usage("--mode b-zero needs a pattern with b = 0".into())),
                (None, None) => return Err(CliError::Usage("--mode b-zero needs --c".into())),
            };
            if c > k {
                return Err(CliError::Usage(format!("c = {c} exceeds k = {k}")));
            }
            let pat = BranchPattern::new(k, 0, c, k - c);
            if let Some(p) = args.pattern {
                if p != pat {
                    return Err(CliError::Usage(format!("pattern {p:?} disagrees with --c {c}")));
                }
            }
            match args.h_star_index {
                None => {
                    let (rep, pred) = classified(&pat, &params, &cfg)?;
                    (pat, rep, Some(pred))
                }
                Some(i) => (pat, solve_b_zero(&params, c, HStarChoice::Index(i), &cfg)?, None),
            }
        }
        Mode::Eq23 => {
            let pat = need_pattern(args)?;
            (pat, solve_non_ti(&pat, &params, &cfg)?, None)
        }
    };

    let roots = report
        .roots
        .iter()
        .map(|r| RootOut {
            h2: r.field.h2,
            l2: r.field.l2,
            residual: r.residual,
            derivative: r.derivative,
            stability: r.stability,
            tag: r.tag,
            family: family_tag(&pattern, r.field.h2, r.field.l2),
        })
        .collect();
    let out = SolveOut {
        mode: mode_name(args.mode),
        theta: params.theta,
        k,
        pattern,
        equation: report.equation,
        roots,
        regime_note: report.regime_note,
        warnings: report.warnings,
        diagnostics: report.diagnostics,
        prediction,
    };
    match fmt {
        Format::Json => Ok(json(&out)?),
        _ => Ok(render_human(&out)),
    }
}

fn classified(
    pat: &BranchPattern,
    params: &ModelParams,
    cfg: &sosgibbs::RootFindConfig,
) -> Result<(SolutionReport, Prediction), CliError> {
    let rep = classify_point(pat, params, cfg)?;
    let pred = Prediction {
        regime: rep.regime,
        n_predicted: rep.n_solutions_predicted,
        n_found: rep.n_solutions_found,
        rule: rep.theorem_applied,
        condition_value: rep.condition_value,
    };
    Ok((rep.solutions, pred))
}

fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
        Stability::Marginal => "marginal",
    }
}

fn family_name(f: FamilyTag) -> &'static str {
    match f {
        FamilyTag::TranslationInvariant => "translation-invariant",
        FamilyTag::Periodic => "periodic",
        FamilyTag::NonperiodicNew => "non-periodic",
    }
}

fn render_human(o: &SolveOut) -> String {
    let p = &o.pattern;
    let mut s = String::new();
    let _ = writeln!(
        s,
        "mode {}  theta {}  k {}  pattern {},{},{},{}",
        o.mode,
        human(o.theta),
        o.k,
        p.a,
        p.b,
        p.c,
        p.d
    );
    let _ = writeln!(s, "equation: {}", o.equation);
    for (i, r) in o.roots.iter().enumerate() {
        let tag = match r.tag {
            Some(RootTag::KnownSubcase) => "  known sub-case",
            Some(RootTag::New) => "  new",
            _ => "",
        };
        let _ = writeln!(
            s,
            "root {}: h2 = {}  l2 = {}  residual = {}  derivative = {}  {}  {}{}",
            i + 1,
            human(r.h2),
            human(r.l2),
            human(r.residual),
            human(r.derivative),
            stability_name(r.stability),
            family_name(r.family),
            tag
        );
    }
    for (name, v) in &o.diagnostics {
        let _ = writeln!(s, "{name} = {}", human(*v));
    }
    if let Some(pr) = &o.prediction {
        let _ = writeln!(
            s,
            "prediction: {} ({} solution(s), {}); found {}",
            pr.regime.as_str(),
            pr.n_predicted,
            pr.rule,
            pr.n_found
        );
    }
    let _ = writeln!(s, "note: {}", o.regime_note);
    for w in &o.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    s
}
