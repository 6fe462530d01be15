use std::fmt::Write as _;

use serde::Serialize;
use sosgibbs::criticals::BOUNDARY_TOL;
use sosgibbs::{theta_critical, CriticalSet, PrefactorConvention};

use super::default_h_star;
use crate::args::{CriticalsArgs, Format, ThetaArg};
use crate::format::{human, human_opt, json};
use crate::{pick_format, scan_config, CliError};

pub const UNIQUE_NOTE: &str = "unique-solution regime; no critical pair";

#[derive(Debug, Serialize)]
struct CriticalsOut {
    theta: f64,
    d: usize,
    k: usize,
    h_star: Option<f64>,
    regime_note: String,
    prefactor_note: String,
    selected: PrefactorConvention,
    k_over_h_star: CriticalSet,
    d_over_h_star: CriticalSet,
}

pub fn run(args: &CriticalsArgs) -> Result<String, CliError> {
    let fmt = pick_format(&args.output, Format::Human, &[Format::Human, Format::Json])?;
    let d = args.d;
    let theta_c = theta_critical(d)?;
    let theta = match args.theta {
        ThetaArg::Value(t) => t,
        ThetaArg::Critical => theta_c,
    };
    let k = args.k.unwrap_or(d);
    if k < d {
        return Err(CliError::Usage(format!("k = {k} must be at least d = {d}")));
    }
    let h_star = match args.h_star {
        Some(h) => h,
        None => default_h_star(theta, k, &scan_config(&args.scan))?,
    };
    let h = (h_star != 0.0).then_some(h_star);
    let with_k = CriticalSet::evaluate(theta, k, d, h, PrefactorConvention::KOverHStar)?;
    let with_d = CriticalSet::evaluate(theta, k, d, h, PrefactorConvention::DOverHStar)?;

    let regime_note = if theta > theta_c + BOUNDARY_TOL {
        UNIQUE_NOTE.to_string()
    } else if with_k.x1.is_some() && with_k.x1 == with_k.x2 {
        "x1 = x2: theta is at theta_c and the two critical values coincide".to_string()
    } else if h.is_none() {
        "h* = 0: critical field values undefined".to_string()
    } else {
        "three solutions for c strictly between c*_1 and c*_2".to_string()
    };
    let prefactor_note = if k == d {
        "k = d: the k/h* and d/h* prefactors agree".to_string()
    } else {
        format!(
            "inconsistent prefactor: the critical values are quoted with both k/h* and d/h*, which differ for k = {k} != d = {d}; solution counts follow k/h*"
        )
    };
    let selected: PrefactorConvention = args.convention.into();
    let out = CriticalsOut {
        theta,
        d,
        k,
        h_star: Some(h_star),
        regime_note,
        prefactor_note,
        selected,
        k_over_h_star: with_k,
        d_over_h_star: with_d,
    };
    match fmt {
        Format::Json => Ok(json(&out)?),
        _ => Ok(render_human(&out)),
    }
}

fn render_human(o: &CriticalsOut) -> String {
    let c = &o.k_over_h_star;
    let mut s = String::new();
    let _ = writeln!(s, "theta    {}", human(o.theta));
    let _ = writeln!(s, "d        {}", o.d);
    let _ = writeln!(s, "k        {}", o.k);
    let _ = writeln!(s, "theta_c  {}", human(c.theta_c));
    let _ = writeln!(s, "zeta     {}", human(c.zeta));
    let _ = writeln!(s, "D        {}", human(c.discriminant));
    let _ = writeln!(s, "x1       {}", human_opt(c.x1));
    let _ = writeln!(s, "x2       {}", human_opt(c.x2));
    let _ = writeln!(s, "eta1     {}", human_opt(c.eta1));
    let _ = writeln!(s, "eta2     {}", human_opt(c.eta2));
    let _ = writeln!(s, "h*       {}", human_opt(o.h_star));
    let order = match o.selected {
        PrefactorConvention::KOverHStar => [(&o.k_over_h_star, "k/h*"), (&o.d_over_h_star, "d/h*")],
        PrefactorConvention::DOverHStar => [(&o.d_over_h_star, "d/h*"), (&o.k_over_h_star, "k/h*")],
    };
    for (set, name) in order {
        let _ = writeln!(
            s,
            "c*_1, c*_2 ({name})  {}  {}{}",
            human_opt(set.c_star_1),
            human_opt(set.c_star_2),
            if set.c_star_reversed { "  (h* < 0: order flipped)" } else { "" }
        );
    }
    let _ = writeln!(s, "note: {}", o.regime_note);
    let _ = writeln!(s, "note: {}", o.prefactor_note);
    s
}
