//! Closed-form thresholds of the `b = 0` branch.
//!
//! With `x = e^{l2} / (2 theta)` the second equation becomes `eta x = g(x)`,
//! `g(x) = ((1 + x)/(zeta + x))^d`. More than one intersection exists iff the
//! ray can be tangent to `g`, i.e. iff `x g'(x) = g(x)` has a positive root;
//! that tangency condition is the quadratic
//! `x^2 + (2 - (zeta - 1)(d - 1)) x + zeta = 0`.

use serde::Serialize;

use crate::error::{Result, SosError};
use crate::solvers::g_unchecked;

/// Default absolute band for boundary comparisons (`theta` vs `theta_c`, `c` vs `c*`).
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Prefactor in front of `ln(2 theta^{d+1} / eta_i)` in the critical field values.
///
/// `KOverHStar` follows from `eta = 2 theta^{d+1} e^{-c h*/k}` and is what the
/// root count actually obeys; `DOverHStar` is kept because the same formula
/// also circulates with `d` in place of `k`. The two coincide when `c = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PrefactorConvention {
    #[default]
    KOverHStar,
    DOverHStar,
}

impl PrefactorConvention {
    pub fn factor(self, k: usize, d: usize) -> f64 {
        match self {
            PrefactorConvention::KOverHStar => k as f64,
            PrefactorConvention::DOverHStar => d as f64,
        }
    }
}

/// Sorted critical field values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CStar {
    pub c1: f64,
    pub c2: f64,
    /// `h* < 0` flips the order of the raw formulas; `(c1, c2)` is sorted anyway.
    pub reversed: bool,
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return Err(SosError::domain(format!("d must be >= 2, got {d}")));
    }
    Ok(())
}

/// `zeta(theta) = (1 + theta^2) / (2 theta^2)`.
pub fn zeta_of(theta: f64) -> Result<f64> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(SosError::domain(format!("theta must be finite and > 0, got {theta}")));
    }
    Ok((1.0 + theta * theta) / (2.0 * theta * theta))
}

/// `theta_c(d) = (d - 1) / sqrt(d^2 + 6d + 1)`, always in `(0, 1)`.
pub fn theta_critical(d: usize) -> Result<f64> {
    check_d(d)?;
    let d = d as f64;
    Ok((d - 1.0) / (d * d + 6.0 * d + 1.0).sqrt())
}

/// `((d + 1)/(d - 1))^2`, the value of `zeta` at `theta_c`.
pub fn zeta_critical(d: usize) -> Result<f64> {
    check_d(d)?;
    let r = (d as f64 + 1.0) / (d as f64 - 1.0);
    Ok(r * r)
}

/// `D(zeta, d) = (2 - (zeta - 1)(d - 1))^2 - 4 zeta`.
pub fn discriminant(zeta: f64, d: usize) -> Result<f64> {
    check_d(d)?;
    if !zeta.is_finite() {
        return Err(SosError::domain("zeta must be finite"));
    }
    let t = 2.0 - (zeta - 1.0) * (d as f64 - 1.0);
    Ok(t * t - 4.0 * zeta)
}

/// Roots `x1 <= x2` of the tangency quadratic. They are positive whenever they exist.
pub fn quadratic_roots(zeta: f64, d: usize) -> Result<(f64, f64)> {
    check_d(d)?;
    if !(zeta.is_finite() && zeta > 1.0) {
        return Err(SosError::regime(format!(
            "zeta = {zeta} <= 1: no critical pair; unique-solution regime"
        )));
    }
    let zc = zeta_critical(d)?;
    let dm1 = d as f64 - 1.0;
    // factored form: no cancellation near zeta_c
    let mut disc = (zeta - 1.0) * dm1 * dm1 * (zeta - zc);
    if disc < 0.0 {
        if zeta - zc >= -1e-12 * zc {
            disc = 0.0;
        } else {
            return Err(SosError::regime(format!(
                "negative discriminant (zeta = {zeta} < {zc}): no critical pair; unique-solution regime"
            )));
        }
    }
    let b = (zeta - 1.0) * dm1 - 2.0;
    if disc == 0.0 {
        return Ok((0.5 * b, 0.5 * b));
    }
    let x2 = 0.5 * (b + disc.sqrt());
    Ok((zeta / x2, x2))
}

/// `eta_i = g(x_i) / x_i`, sorted so that `eta1 <= eta2`.
pub fn eta_values(zeta: f64, d: usize) -> Result<(f64, f64)> {
    let (x1, x2) = quadratic_roots(zeta, d)?;
    let e1 = g_unchecked(x1, zeta, d) / x1;
    let e2 = g_unchecked(x2, zeta, d) / x2;
    Ok(if e1 <= e2 { (e1, e2) } else { (e2, e1) })
}

/// Critical field values `c*_1 <= c*_2`; the solution count of the `b = 0`
/// second equation is 3 strictly between them.
pub fn c_star_bounds(
    theta: f64,
    k: usize,
    d: usize,
    h_star: f64,
    convention: PrefactorConvention,
) -> Result<CStar> {
    let zeta = zeta_of(theta)?;
    let tc = theta_critical(d)?;
    if theta > tc + BOUNDARY_TOL {
        return Err(SosError::regime(format!(
            "theta = {theta} > theta_c = {tc}: unique-solution regime; no critical pair"
        )));
    }
    if h_star == 0.0 || !h_star.is_finite() {
        return Err(SosError::Degenerate(format!("h* = {h_star}: critical field values undefined")));
    }
    let (eta1, eta2) = eta_values(zeta, d)?;
    let pref = convention.factor(k, d) / h_star;
    let ln_top = 2f64.ln() + (d as f64 + 1.0) * theta.ln();
    let c1 = pref * (ln_top - eta2.ln());
    let c2 = pref * (ln_top - eta1.ln());
    Ok(if c1 <= c2 {
        CStar { c1, c2, reversed: false }
    } else {
        CStar { c1: c2, c2: c1, reversed: true }
    })
}

/// Everything the thresholds depend on at one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalSet {
    pub theta: f64,
    pub k: usize,
    pub d: usize,
    pub theta_c: f64,
    pub zeta: f64,
    pub discriminant: f64,
    pub x1: Option<f64>,
    pub x2: Option<f64>,
    pub eta1: Option<f64>,
    pub eta2: Option<f64>,
    pub h_star: Option<f64>,
    pub c_star_1: Option<f64>,
    pub c_star_2: Option<f64>,
    pub c_star_reversed: bool,
    pub prefactor_convention: PrefactorConvention,
}

impl CriticalSet {
    /// Quantities that do not exist in the current regime are `None`.
    pub fn evaluate(
        theta: f64,
        k: usize,
        d: usize,
        h_star: Option<f64>,
        convention: PrefactorConvention,
    ) -> Result<Self> {
        let zeta = zeta_of(theta)?;
        let theta_c = theta_critical(d)?;
        let disc = discriminant(zeta, d)?;
        let roots = quadratic_roots(zeta, d).ok();
        let etas = eta_values(zeta, d).ok();
        let cs = h_star.and_then(|h| c_star_bounds(theta, k, d, h, convention).ok());
        Ok(CriticalSet {
            theta,
            k,
            d,
            theta_c,
            zeta,
            discriminant: disc,
            x1: roots.map(|r| r.0),
            x2: roots.map(|r| r.1),
            eta1: etas.map(|e| e.0),
            eta2: etas.map(|e| e.1),
            h_star,
            c_star_1: cs.map(|c| c.c1),
            c_star_2: cs.map(|c| c.c2),
            c_star_reversed: cs.map(|c| c.reversed).unwrap_or(false),
            prefactor_convention: convention,
        })
    }

    pub fn has_critical_pair(&self) -> bool {
        self.x1.is_some()
    }
}
