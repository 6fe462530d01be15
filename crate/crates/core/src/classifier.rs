//! Solution-count regimes.
//!
//! On the `b = 0` branch the count is exact (1, 2 or 3 roots of the second
//! equation, decided by `theta_c` and the critical field values). On the
//! `b != 0` branch only a lower bound is available: an expanding fixed point
//! of `psi` (`psi' > 1`) is flanked by two more.

use serde::Serialize;

use crate::criticals::{c_star_bounds, theta_critical, CriticalSet, PrefactorConvention, BOUNDARY_TOL};
use crate::error::{Result, SosError};
use crate::model::{BranchPattern, ModelParams};
use crate::solvers::{
    psi_derivative, psi_of, solve_b_nonzero, solve_b_zero, HStarChoice, RootFindConfig, SolutionReport,
    DIAGONAL_TOL, STABILITY_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Unique,
    BoundaryPair,
    Triple,
}

impl Regime {
    fn from_count(n: usize) -> Self {
        match n {
            0 | 1 => Regime::Unique,
            2 => Regime::BoundaryPair,
            _ => Regime::Triple,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Unique => "UNIQUE",
            Regime::BoundaryPair => "BOUNDARY_PAIR",
            Regime::Triple => "TRIPLE",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyTag {
    TranslationInvariant,
    Periodic,
    NonperiodicNew,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub regime: Regime,
    pub n_solutions_predicted: usize,
    pub n_solutions_found: usize,
    pub theorem_applied: &'static str,
    pub criticals: Option<CriticalSet>,
    /// `psi'` at the fixed point that decided the prediction (`b != 0` only).
    pub condition_value: Option<f64>,
    pub family_tags: Vec<FamilyTag>,
    pub solutions: SolutionReport,
}

/// Number of roots of `l2 = d f(l2) + c h*/k` (all real `l2`, i.e. all `x > 0`).
pub fn count_n(theta: f64, c: f64, k: usize, d: usize, h_star: f64) -> Result<usize> {
    count_n_with(theta, c, k, d, h_star, PrefactorConvention::KOverHStar, BOUNDARY_TOL)
}

pub fn count_n_with(
    theta: f64,
    c: f64,
    k: usize,
    d: usize,
    h_star: f64,
    convention: PrefactorConvention,
    tol: f64,
) -> Result<usize> {
    let tc = theta_critical(d)?;
    if !(theta.is_finite() && theta > 0.0) {
        return Err(SosError::domain(format!("theta must be finite and > 0, got {theta}")));
    }
    if theta >= 1.0 {
        return Err(SosError::regime(format!("theta = {theta} >= 1 gives zeta <= 1; count is for theta < 1")));
    }
    if h_star == 0.0 || !h_star.is_finite() {
        return Err(SosError::Degenerate(format!("h* = {h_star}")));
    }
    if theta >= tc - tol {
        return Ok(1);
    }
    let cs = c_star_bounds(theta, k, d, h_star, convention)?;
    let near = |cstar: f64| (c - cstar).abs() < tol * cstar.abs().max(1.0);
    Ok(if near(cs.c1) || near(cs.c2) {
        2
    } else if cs.c1 < c && c < cs.c2 {
        3
    } else {
        1
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Th1Check {
    /// `|psi'(h2*)| > 1`.
    pub satisfied: bool,
    /// `|psi'(h2*)|`.
    pub value: f64,
    pub derivative: f64,
    /// `psi'(h2*) > 1`, the case in which two further fixed points are guaranteed.
    pub implies_triple: bool,
}

/// Instability test at a fixed point `h2*` of `psi`.
pub fn check_th1_condition(pattern: &BranchPattern, params: &ModelParams, h2_star: f64) -> Result<Th1Check> {
    let residual = (h2_star - psi_of(h2_star, pattern, params)?).abs();
    if residual > 1e-9 {
        return Err(SosError::contract(format!(
            "h2* = {h2_star} is not a fixed point of psi (residual {residual:.3e})"
        )));
    }
    let der = psi_derivative(h2_star, pattern, params)?;
    Ok(Th1Check {
        satisfied: der.abs() > 1.0 + STABILITY_TOL,
        value: der.abs(),
        derivative: der,
        implies_triple: der > 1.0 + STABILITY_TOL,
    })
}

/// Family of a solution `(h2, l2)` under `pattern`.
pub fn family_tag(pattern: &BranchPattern, h2: f64, l2: f64) -> FamilyTag {
    if (h2 - l2).abs() < DIAGONAL_TOL {
        FamilyTag::TranslationInvariant
    } else if pattern.a == 0 && pattern.d == 0 {
        FamilyTag::Periodic
    } else {
        FamilyTag::NonperiodicNew
    }
}

/// Runs the solver matching the pattern and sets the prediction against what it found.
pub fn classify_point(pattern: &BranchPattern, params: &ModelParams, cfg: &RootFindConfig) -> Result<RegimeReport> {
    params.require_three_state()?;
    pattern.check(params)?;

    let (predicted, theorem, criticals, condition, solutions) = if pattern.b == 0 {
        let sol = solve_b_zero(params, pattern.c, HStarChoice::Default, cfg)?;
        let h_star = sol.diagnostic("h_star").expect("b = 0 report carries h*");
        let d = pattern.d;
        let (predicted, theorem) = if d < 2 {
            (1, "b=0: d < 2, g has no inflection")
        } else if params.theta >= 1.0 {
            (1, "b=0: theta >= 1, g non-increasing")
        } else if params.is_degenerate() || h_star == 0.0 {
            (1, "b=0: h* = 0")
        } else {
            (count_n(params.theta, pattern.c as f64, params.k, d, h_star)?, "b=0: critical-field trichotomy")
        };
        let criticals = if d >= 2 {
            let h = (h_star != 0.0).then_some(h_star);
            Some(CriticalSet::evaluate(params.theta, params.k, d, h, PrefactorConvention::KOverHStar)?)
        } else {
            None
        };
        (predicted, theorem, criticals, None, sol)
    } else {
        let sol = solve_b_nonzero(pattern, params, cfg)?;
        let decisive = sol
            .roots
            .iter()
            .map(|r| r.derivative)
            .fold(None, |best: Option<f64>, v| match best {
                Some(b) if b >= v => Some(b),
                _ => Some(v),
            });
        let expanding = decisive.is_some_and(|v| v > 1.0 + STABILITY_TOL);
        let predicted = if expanding { 3 } else { 1 };
        (predicted, "b!=0: expanding fixed point of psi", None, decisive, sol)
    };

    let family_tags = solutions
        .roots
        .iter()
        .map(|r| family_tag(pattern, r.field.h2, r.field.l2))
        .collect();
    Ok(RegimeReport {
        regime: Regime::from_count(predicted),
        n_solutions_predicted: predicted,
        n_solutions_found: solutions.len(),
        theorem_applied: theorem,
        criticals,
        condition_value: condition,
        family_tags,
        solutions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn above_threshold_is_unique() {
        let tc = theta_critical(3).unwrap();
        assert_eq!(count_n(tc + 0.01, 1.0, 4, 3, 2.0).unwrap(), 1);
        assert_eq!(count_n(0.99, 1.0, 4, 3, 2.0).unwrap(), 1);
    }

    #[test]
    fn errors() {
        assert!(matches!(count_n(0.1, 1.0, 4, 3, 0.0), Err(SosError::Degenerate(_))));
        assert!(matches!(count_n(1.5, 1.0, 4, 3, 1.0), Err(SosError::Regime(_))));
        assert!(matches!(count_n(0.1, 1.0, 4, 1, 1.0), Err(SosError::Domain(_))));
    }

    #[test]
    fn interior_and_boundary() {
        let cs = c_star_bounds(0.05, 5, 3, 3.0, PrefactorConvention::KOverHStar).unwrap();
        let mid = 0.5 * (cs.c1 + cs.c2);
        assert_eq!(count_n(0.05, mid, 5, 3, 3.0).unwrap(), 3);
        assert_eq!(count_n(0.05, cs.c1, 5, 3, 3.0).unwrap(), 2);
        assert_eq!(count_n(0.05, cs.c2, 5, 3, 3.0).unwrap(), 2);
        assert_eq!(count_n(0.05, cs.c2 + 1.0, 5, 3, 3.0).unwrap(), 1);
        assert_eq!(count_n(0.05, cs.c1 - 1.0, 5, 3, 3.0).unwrap(), 1);
    }

    #[test]
    fn degenerate_point_is_unique() {
        let p = ModelParams::three_state(1.0, 3).unwrap();
        for pat in [BranchPattern::new(3, 0, 1, 2), BranchPattern::new(1, 2, 2, 1)] {
            let rep = classify_point(&pat, &p, &RootFindConfig::default()).unwrap();
            assert_eq!(rep.regime, Regime::Unique);
            assert_eq!(rep.n_solutions_found, 1);
        }
    }

    #[test]
    fn symmetric_ferro_is_unique_and_ti() {
        let p = ModelParams::three_state(2.5, 4).unwrap();
        let rep = classify_point(&BranchPattern::new(3, 1, 3, 1), &p, &RootFindConfig::default()).unwrap();
        assert_eq!(rep.regime, Regime::Unique);
        assert_eq!(rep.n_solutions_found, 1);
        assert!(rep.family_tags.iter().all(|t| *t == FamilyTag::TranslationInvariant));
    }

    #[test]
    fn th1_rejects_non_fixed_point() {
        let p = ModelParams::three_state(0.3, 3).unwrap();
        let pat = BranchPattern::new(1, 2, 1, 2);
        assert!(matches!(check_th1_condition(&pat, &p, 7.0), Err(SosError::Contract(_))));
    }

    #[test]
    fn th1_at_theta_one() {
        let p = ModelParams::three_state(1.0, 3).unwrap();
        let pat = BranchPattern::new(1, 2, 1, 2);
        let chk = check_th1_condition(&pat, &p, 0.0).unwrap();
        assert!(!chk.satisfied);
        assert_eq!(chk.value, 0.0);
    }
}
