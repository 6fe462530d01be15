//! Fixed points of the reduced boundary-law systems.
//!
//! Each solver turns its system into a scalar equation, scans an enclosure
//! of the roots for sign changes, refines by bisection and then checks the
//! full two-component residual of every candidate before reporting it.

mod scan;

use serde::Serialize;

pub use scan::{bracketed_roots, RootFindConfig};

use crate::error::{Result, SosError};
use crate::model::{reduced_rhs_unchecked, BranchPattern, Kernel, ModelParams, ReducedField};

/// Band around 1 in which a map derivative is called marginal.
pub const STABILITY_TOL: f64 = 1e-9;

/// Two fields closer than this are the same translation-invariant field.
pub const DIAGONAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Marginal,
}

impl Stability {
    pub fn from_derivative(der: f64) -> Self {
        let m = der.abs();
        if m > 1.0 + STABILITY_TOL {
            Stability::Unstable
        } else if m < 1.0 - STABILITY_TOL {
            Stability::Stable
        } else {
            Stability::Marginal
        }
    }
}

/// Solver-specific label attached to a root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootTag {
    /// `h2 = l2`.
    TranslationInvariant,
    /// Two-periodic pair with `h2 != l2`.
    Periodic,
    /// Solves `h2 = 2 f(h2)` and `l2 = 2 f(l2)` as well.
    KnownSubcase,
    /// A solution outside that sub-case.
    New,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Root {
    pub field: ReducedField,
    /// Sup-norm residual of the two-component system the solver targets.
    pub residual: f64,
    /// Derivative of the scalar fixed-point map at the root.
    pub derivative: f64,
    pub stability: Stability,
    pub tag: Option<RootTag>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionReport {
    pub equation: &'static str,
    pub roots: Vec<Root>,
    pub regime_note: String,
    pub warnings: Vec<String>,
    /// Named scalar diagnostics (`h_star`, `g_prime_at_ti`, ...).
    pub diagnostics: Vec<(String, f64)>,
}

impl SolutionReport {
    fn new(equation: &'static str) -> Self {
        SolutionReport {
            equation,
            roots: Vec::new(),
            regime_note: String::new(),
            warnings: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn fields(&self) -> Vec<ReducedField> {
        self.roots.iter().map(|r| r.field).collect()
    }

    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    fn push(&mut self, field: ReducedField, residual: f64, derivative: f64, cfg: &RootFindConfig) {
        if residual <= cfg.tol_residual {
            self.roots.push(Root {
                field,
                residual,
                derivative,
                stability: Stability::from_derivative(derivative),
                tag: None,
            });
        } else {
            self.warnings.push(format!(
                "dropped candidate ({:.6e}, {:.6e}): residual {:.3e} above tolerance",
                field.h2, field.l2, residual
            ));
        }
    }

    fn require_nonempty(self) -> Result<Self> {
        if self.roots.is_empty() {
            return Err(SosError::ScanWindow(format!(
                "no root of {} found; widen the scan window or refine the grid",
                self.equation
            )));
        }
        Ok(self)
    }
}

/// Which root of `h = k f(h)` to use as `h*` on the `b = 0` branch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HStarChoice {
    /// Middle root when there are three, smallest otherwise.
    #[default]
    Default,
    /// Zero-based index into the ascending root list.
    Index(usize),
}

fn require_b_nonzero(pattern: &BranchPattern) -> Result<()> {
    if pattern.b == 0 {
        return Err(SosError::contract("b = 0: use the b = 0 solver"));
    }
    Ok(())
}

fn phi_unchecked(h2: f64, p: &BranchPattern, kern: &Kernel) -> f64 {
    (p.cross() * kern.f(h2) + p.d as f64 * h2) / p.b as f64
}

fn psi_unchecked(h2: f64, p: &BranchPattern, kern: &Kernel) -> f64 {
    p.a as f64 * kern.f(h2) + p.b as f64 * kern.f(phi_unchecked(h2, p, kern))
}

fn psi_derivative_unchecked(h2: f64, p: &BranchPattern, kern: &Kernel) -> f64 {
    let dfh = kern.df(h2);
    p.a as f64 * dfh + (p.cross() * dfh + p.d as f64) * kern.df(phi_unchecked(h2, p, kern))
}

fn check_branch(pattern: &BranchPattern, params: &ModelParams) -> Result<()> {
    params.require_three_state()?;
    pattern.check(params)?;
    require_b_nonzero(pattern)
}

fn check_finite(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(SosError::domain(format!("argument must be finite, got {x}")));
    }
    Ok(())
}

/// `phi(h2) = ((bc - ad) f(h2) + d h2) / b`: the `l2` that makes the first
/// equation of the reduced system hold.
pub fn phi_of(h2: f64, pattern: &BranchPattern, params: &ModelParams) -> Result<f64> {
    check_branch(pattern, params)?;
    check_finite(h2)?;
    Ok(phi_unchecked(h2, pattern, &params.kernel()))
}

/// `psi(h2) = a f(h2) + b f(phi(h2))`; its fixed points are the `b != 0` solutions.
pub fn psi_of(h2: f64, pattern: &BranchPattern, params: &ModelParams) -> Result<f64> {
    check_branch(pattern, params)?;
    check_finite(h2)?;
    Ok(psi_unchecked(h2, pattern, &params.kernel()))
}

pub fn psi_derivative(h2: f64, pattern: &BranchPattern, params: &ModelParams) -> Result<f64> {
    check_branch(pattern, params)?;
    check_finite(h2)?;
    Ok(psi_derivative_unchecked(h2, pattern, &params.kernel()))
}

/// All fixed points of `psi`, lifted to `(h2, phi(h2))`.
pub fn solve_b_nonzero(pattern: &BranchPattern, params: &ModelParams, cfg: &RootFindConfig) -> Result<SolutionReport> {
    check_branch(pattern, params)?;
    cfg.validate()?;
    let kern = params.kernel();
    let (lo, hi) = kern.range();
    let k = params.k as f64;
    let window = cfg.window_for(k * lo, k * hi);

    let mut report = SolutionReport::new("h2 = a f(h2) + b f(phi(h2))");
    for h2 in bracketed_roots(|h| h - psi_unchecked(h, pattern, &kern), &window)? {
        let field = ReducedField { h2, l2: phi_unchecked(h2, pattern, &kern) };
        let residual = system_residual(&field, pattern, &kern);
        report.push(field, residual, psi_derivative_unchecked(h2, pattern, &kern), cfg);
    }

    let expanding = report.roots.iter().filter(|r| r.derivative > 1.0 + STABILITY_TOL).count();
    let flipping = report.roots.iter().filter(|r| r.derivative < -1.0 - STABILITY_TOL).count();
    if expanding > 0 && report.len() < 3 {
        report.warnings.push(format!(
            "a root with psi' > 1 forces at least three fixed points but only {} were found; check the scan window",
            report.len()
        ));
    }
    if flipping > 0 && report.len() < 3 {
        report.warnings.push(
            "a root with psi' < -1 is unstable but only flanked by a 2-cycle of psi, not by further fixed points"
                .to_string(),
        );
    }
    report.regime_note = format!("{} fixed point(s) of psi; {} unstable", report.len(), expanding + flipping);
    report.require_nonempty()
}

/// `g(x) = ((1 + x) / (zeta + x))^d`.
pub fn g_of(x: f64, zeta: f64, d: usize) -> Result<f64> {
    check_g_args(x, zeta)?;
    Ok(g_unchecked(x, zeta, d))
}

/// `g'(x) = g(x) d (zeta - 1) / ((zeta + x)(1 + x))`.
pub fn g_derivative(x: f64, zeta: f64, d: usize) -> Result<f64> {
    check_g_args(x, zeta)?;
    Ok(g_unchecked(x, zeta, d) * d as f64 * (zeta - 1.0) / ((zeta + x) * (1.0 + x)))
}

fn check_g_args(x: f64, zeta: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SosError::domain(format!("g needs x >= 0, got {x}")));
    }
    if !(zeta > 0.0) || !zeta.is_finite() {
        return Err(SosError::domain(format!("g needs zeta > 0, got {zeta}")));
    }
    Ok(())
}

pub(crate) fn g_unchecked(x: f64, zeta: f64, d: usize) -> f64 {
    ((1.0 + x) / (zeta + x)).powi(d as i32)
}

pub(crate) fn ti_roots(params: &ModelParams, cfg: &RootFindConfig) -> Result<Vec<f64>> {
    params.require_three_state()?;
    cfg.validate()?;
    let kern = params.kernel();
    let (lo, hi) = kern.range();
    let k = params.k as f64;
    let window = cfg.window_for(k * lo, k * hi);
    let roots = bracketed_roots(|h| h - k * kern.f(h), &window)?;
    Ok(roots.into_iter().filter(|&h| (h - k * kern.f(h)).abs() <= cfg.tol_residual).collect())
}

/// Translation-invariant fields: every root of `h = k f(h)`.
pub fn solve_ti(params: &ModelParams, cfg: &RootFindConfig) -> Result<SolutionReport> {
    let kern = params.kernel();
    let k = params.k as f64;
    let mut report = SolutionReport::new("h = k f(h)");
    for h in ti_roots(params, cfg)? {
        let residual = (h - k * kern.f(h)).abs();
        report.push(ReducedField { h2: h, l2: h }, residual, k * kern.df(h), cfg);
    }
    for r in &mut report.roots {
        r.tag = Some(RootTag::TranslationInvariant);
    }
    report.regime_note = if params.theta > 1.0 {
        "theta > 1: k f is decreasing, the root is unique".to_string()
    } else {
        format!("{} translation-invariant root(s)", report.len())
    };
    report.require_nonempty()
}

/// Two-periodic fields (`a = d = 0`): roots of `h2 = g(g(h2))` with `g = k f`,
/// paired as `(h2, g(h2))`.
pub fn solve_periodic(params: &ModelParams, cfg: &RootFindConfig) -> Result<SolutionReport> {
    params.require_three_state()?;
    cfg.validate()?;
    let kern = params.kernel();
    let k = params.k as f64;
    let g = |h: f64| k * kern.f(h);
    let (lo, hi) = kern.range();
    let window = cfg.window_for(k * lo, k * hi);

    let mut report = SolutionReport::new("h2 = g(g(h2)), g = k f");
    for h2 in bracketed_roots(|h| h - g(g(h)), &window)? {
        let l2 = g(h2);
        let residual = (h2 - g(l2)).abs().max((l2 - g(h2)).abs());
        let derivative = k * kern.df(h2) * k * kern.df(l2);
        report.push(ReducedField { h2, l2 }, residual, derivative, cfg);
    }
    for r in &mut report.roots {
        r.tag = Some(if (r.field.h2 - r.field.l2).abs() < DIAGONAL_TOL {
            RootTag::TranslationInvariant
        } else {
            RootTag::Periodic
        });
    }

    let ti: Vec<f64> = report
        .roots
        .iter()
        .filter(|r| r.tag == Some(RootTag::TranslationInvariant))
        .map(|r| r.field.h2)
        .collect();
    for &h in &ti {
        report.diagnostics.push(("g_prime_at_ti".to_string(), k * kern.df(h)));
    }
    let periodic = report.len() - ti.len();
    report.regime_note = match ti.as_slice() {
        [h] => {
            let gp = k * kern.df(*h);
            format!(
                "g'(h*) = {gp:.6e} ({}); {periodic} periodic root(s)",
                if gp < -1.0 { "< -1" } else { ">= -1" }
            )
        }
        _ => format!("{} translation-invariant and {periodic} periodic root(s)", ti.len()),
    };
    report.require_nonempty()
}

/// `b = 0` branch: `h*` solves `h = k f(h)`, then every root `l2` of
/// `l2 = d f(l2) + c h* / k` with `d = k - c`.
pub fn solve_b_zero(params: &ModelParams, c: usize, choice: HStarChoice, cfg: &RootFindConfig) -> Result<SolutionReport> {
    params.require_three_state()?;
    cfg.validate()?;
    if c > params.k {
        return Err(SosError::contract(format!("c = {c} exceeds k = {}", params.k)));
    }
    let hs = ti_roots(params, cfg)?;
    let h_star = pick_h_star(&hs, choice)?;
    let mut report = solve_l2_given_h(params, c, h_star, cfg)?;
    report.diagnostics.push(("h_star_candidates".to_string(), hs.len() as f64));
    report.require_nonempty()
}

pub(crate) fn pick_h_star(hs: &[f64], choice: HStarChoice) -> Result<f64> {
    let idx = match choice {
        HStarChoice::Default if hs.len() == 3 => 1,
        HStarChoice::Default => 0,
        HStarChoice::Index(i) => i,
    };
    hs.get(idx).copied().ok_or_else(|| {
        if hs.is_empty() {
            SosError::ScanWindow("no root of h = k f(h) found".to_string())
        } else {
            SosError::contract(format!("h* index {idx} out of range: only {} root(s)", hs.len()))
        }
    })
}

fn solve_l2_given_h(params: &ModelParams, c: usize, h_star: f64, cfg: &RootFindConfig) -> Result<SolutionReport> {
    let kern = params.kernel();
    let k = params.k as f64;
    let d = params.k - c;
    let df = d as f64;
    let shift = c as f64 * h_star / k;
    let (lo, hi) = kern.range();
    let window = cfg.window_for(df * lo + shift, df * hi + shift);

    let mut report = SolutionReport::new("l2 = d f(l2) + c h*/k");
    let h_res = (h_star - k * kern.f(h_star)).abs();
    let fh = kern.f(h_star);
    for l2 in bracketed_roots(|l| l - df * kern.f(l) - shift, &window)? {
        let residual = h_res.max((l2 - df * kern.f(l2) - c as f64 * fh).abs());
        report.push(ReducedField { h2: h_star, l2 }, residual, df * kern.df(l2), cfg);
    }

    // Same count through x = e^{l2} / (2 theta), eta x = g(x).
    let theta = params.theta;
    let zeta = (1.0 + theta * theta) / (2.0 * theta * theta);
    let ln_eta = (2.0f64).ln() + (df + 1.0) * theta.ln() - shift;
    let x_form = |l: f64| {
        let ln_x = l - (2.0 * theta).ln();
        let x = ln_x.exp();
        // sign of eta x - g(x), compared in logs
        (ln_eta + ln_x) - df * ((1.0 + x).ln() - (zeta + x).ln())
    };
    let x_count = bracketed_roots(x_form, &window)?.len();
    if x_count != report.len() {
        report
            .warnings
            .push(format!("eta x = g(x) form has {x_count} root(s), direct form {}", report.len()));
    }

    let positive = report.roots.iter().filter(|r| r.field.l2 > 0.0).count();
    report.diagnostics.push(("h_star".to_string(), h_star));
    report.diagnostics.push(("positive_l2".to_string(), positive as f64));
    report.regime_note = format!("{} root(s) in l2 ({} with l2 > 0) for h* = {:.6e}", report.len(), positive, h_star);
    Ok(report)
}

/// Patterns with `a = c + 2`, `d = b + 2`. Every root is tagged by whether it
/// also solves `h2 = 2 f(h2)` and `l2 = 2 f(l2)`.
pub fn solve_non_ti(pattern: &BranchPattern, params: &ModelParams, cfg: &RootFindConfig) -> Result<SolutionReport> {
    params.require_three_state()?;
    pattern.check(params)?;
    if pattern.a != pattern.c + 2 || pattern.d != pattern.b + 2 {
        return Err(SosError::contract(format!(
            "pattern ({},{},{},{}) needs a = c + 2 and d = b + 2",
            pattern.a, pattern.b, pattern.c, pattern.d
        )));
    }
    let kern = params.kernel();
    let mut report = if pattern.b != 0 {
        solve_b_nonzero(pattern, params, cfg)?
    } else {
        // b = 0 forces a = k: collect the l2 roots over every h*.
        let mut all = SolutionReport::new("l2 = c f(h*) + 2 f(l2), h* = k f(h*)");
        for h_star in ti_roots(params, cfg)? {
            let sub = solve_l2_given_h(params, pattern.c, h_star, cfg)?;
            all.roots.extend(sub.roots);
            all.warnings.extend(sub.warnings);
        }
        all.require_nonempty()?
    };
    report.equation = "h2 = (c+2) f(h2) + b f(l2), l2 = c f(h2) + (b+2) f(l2)";
    let mut new = 0;
    for r in &mut report.roots {
        let (h2, l2) = (r.field.h2, r.field.l2);
        let known = (h2 - 2.0 * kern.f(h2)).abs() < DIAGONAL_TOL && (l2 - 2.0 * kern.f(l2)).abs() < DIAGONAL_TOL;
        if !known {
            new += 1;
        }
        r.tag = Some(if known { RootTag::KnownSubcase } else { RootTag::New });
    }
    report.regime_note = format!("{} root(s), {} outside the h2 = 2f(h2), l2 = 2f(l2) sub-case", report.len(), new);
    Ok(report)
}

fn system_residual(r: &ReducedField, p: &BranchPattern, kern: &Kernel) -> f64 {
    let img = reduced_rhs_unchecked(r, p, kern);
    img.sup_distance(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{kernel_f, reduced_rhs};

    fn params(theta: f64, k: usize) -> ModelParams {
        ModelParams::three_state(theta, k).unwrap()
    }

    #[test]
    fn phi_without_coupling() {
        let pat = BranchPattern::new(1, 1, 1, 1);
        let p = params(0.4, 2);
        assert!((phi_of(0.7, &pat, &p).unwrap() - 0.7).abs() < 1e-15);
        let pat = BranchPattern::new(1, 2, 2, 1);
        let p = params(1.0, 3);
        assert!((phi_of(3.0, &pat, &p).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn b_zero_is_rejected_on_psi_path() {
        let pat = BranchPattern::new(3, 0, 1, 2);
        let p = params(0.5, 3);
        assert!(matches!(psi_of(0.0, &pat, &p), Err(SosError::Contract(_))));
        assert!(matches!(phi_of(0.0, &pat, &p), Err(SosError::Contract(_))));
        assert!(matches!(solve_b_nonzero(&pat, &p, &RootFindConfig::default()), Err(SosError::Contract(_))));
    }

    #[test]
    fn psi_is_zero_at_theta_one() {
        let pat = BranchPattern::new(1, 2, 0, 3);
        let p = params(1.0, 3);
        for h in [-5.0, 0.0, 2.0] {
            assert_eq!(psi_of(h, &pat, &p).unwrap(), 0.0);
            assert_eq!(psi_derivative(h, &pat, &p).unwrap(), 0.0);
        }
        let rep = solve_b_nonzero(&pat, &p, &RootFindConfig::default()).unwrap();
        assert_eq!(rep.len(), 1);
        assert!(rep.roots[0].field.h2.abs() < 1e-12 && rep.roots[0].field.l2.abs() < 1e-12);
    }

    #[test]
    fn g_limits() {
        assert!((g_of(0.0, 2.5, 3).unwrap() - 2.5f64.powi(-3)).abs() < 1e-15);
        assert!((g_of(1e9, 2.5, 3).unwrap() - 1.0).abs() < 1e-6);
        assert_eq!(g_of(4.2, 1.0, 5).unwrap(), 1.0);
        assert_eq!(g_derivative(4.2, 1.0, 5).unwrap(), 0.0);
        assert!(matches!(g_of(-0.1, 2.0, 2), Err(SosError::Domain(_))));
    }

    #[test]
    fn ti_degenerate_and_ferro() {
        let rep = solve_ti(&params(1.0, 3), &RootFindConfig::default()).unwrap();
        assert_eq!(rep.len(), 1);
        assert!(rep.roots[0].field.h2.abs() < 1e-12);
        for theta in [1.1, 2.0, 7.5, 60.0] {
            assert_eq!(solve_ti(&params(theta, 4), &RootFindConfig::default()).unwrap().len(), 1);
        }
    }

    #[test]
    fn b_zero_roots_solve_system() {
        let p = params(0.05, 4);
        let rep = solve_b_zero(&p, 1, HStarChoice::Default, &RootFindConfig::default()).unwrap();
        let pat = BranchPattern::new(4, 0, 1, 3);
        for r in &rep.roots {
            let img = reduced_rhs(&r.field, &pat, &p).unwrap();
            assert!(img.sup_distance(&r.field) < 1e-10);
        }
        assert!(rep.warnings.is_empty(), "{:?}", rep.warnings);
    }

    #[test]
    fn b_zero_index_out_of_range() {
        let p = params(2.0, 3);
        let err = solve_b_zero(&p, 1, HStarChoice::Index(2), &RootFindConfig::default()).unwrap_err();
        assert!(matches!(err, SosError::Contract(_)));
        assert!(solve_b_zero(&p, 4, HStarChoice::Default, &RootFindConfig::default()).is_err());
    }

    #[test]
    fn b_zero_c_zero_reduces_to_d_fold_equation() {
        let p = params(0.1, 3);
        let rep = solve_b_zero(&p, 0, HStarChoice::Default, &RootFindConfig::default()).unwrap();
        for r in &rep.roots {
            let l = r.field.l2;
            assert!((l - 3.0 * kernel_f(l, 0.1).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn non_ti_contract() {
        let p = params(0.3, 4);
        let bad = BranchPattern::new(2, 2, 2, 2);
        assert!(matches!(solve_non_ti(&bad, &p, &RootFindConfig::default()), Err(SosError::Contract(_))));
        let ok = BranchPattern::new(3, 1, 1, 3);
        let rep = solve_non_ti(&ok, &p, &RootFindConfig::default()).unwrap();
        assert!(rep.roots.iter().all(|r| r.tag.is_some()));
    }

    #[test]
    fn non_ti_with_b_zero() {
        // a = c + 2 and d = b + 2 with b = 0: k = a, c = k - 2, d = 2
        let p = params(0.2, 4);
        let pat = BranchPattern::new(4, 0, 2, 2);
        let rep = solve_non_ti(&pat, &p, &RootFindConfig::default()).unwrap();
        for r in &rep.roots {
            let img = reduced_rhs(&r.field, &pat, &p).unwrap();
            assert!(img.sup_distance(&r.field) < 1e-10);
        }
    }

    #[test]
    fn degenerate_non_ti() {
        let p = params(1.0, 4);
        let pat = BranchPattern::new(3, 1, 1, 3);
        let rep = solve_non_ti(&pat, &p, &RootFindConfig::default()).unwrap();
        assert_eq!(rep.len(), 1);
        assert_eq!(rep.roots[0].tag, Some(RootTag::KnownSubcase));
    }

    #[test]
    fn stability_bands() {
        assert_eq!(Stability::from_derivative(1.5), Stability::Unstable);
        assert_eq!(Stability::from_derivative(-1.5), Stability::Unstable);
        assert_eq!(Stability::from_derivative(0.3), Stability::Stable);
        assert_eq!(Stability::from_derivative(1.0 + 1e-12), Stability::Marginal);
    }

    #[test]
    fn m_other_than_two_is_rejected() {
        let p = ModelParams::new(0.5, 2, 3).unwrap();
        assert!(matches!(solve_ti(&p, &RootFindConfig::default()), Err(SosError::Contract(_))));
        assert!(matches!(solve_periodic(&p, &RootFindConfig::default()), Err(SosError::Contract(_))));
    }
}
