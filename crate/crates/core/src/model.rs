//! Model parameters, the recursion kernel and the boundary-law operators.
//!
//! Every log-ratio below is evaluated either as a difference of
//! log-sum-exps or, for the scalar kernel, after dividing numerator and
//! denominator by `e^x` on the right half-line, so nothing overflows for
//! arguments far beyond `|x| = 700` where the textbook form does.

use serde::Serialize;

use crate::error::{Result, SosError};

/// `ln(sum_i e^{t_i})` without overflow.
pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Temperature-like parameter, tree order and spin count.
///
/// `theta = exp(J * beta)`; the ferro/antiferro distinction lives entirely in
/// `theta < 1` vs. `theta > 1`. Spins take values `0..=m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub theta: f64,
    pub k: usize,
    pub m: usize,
}

impl ModelParams {
    pub fn new(theta: f64, k: usize, m: usize) -> Result<Self> {
        check_theta(theta)?;
        if k < 1 {
            return Err(SosError::domain(format!("tree order k must be >= 1, got {k}")));
        }
        if m < 1 {
            return Err(SosError::domain(format!("m must be >= 1, got {m}")));
        }
        Ok(ModelParams { theta, k, m })
    }

    /// Three-state model (`m = 2`), the only case the solvers analyse.
    pub fn three_state(theta: f64, k: usize) -> Result<Self> {
        Self::new(theta, k, 2)
    }

    /// Builds the parameters from a coupling constant and inverse temperature.
    pub fn from_coupling(j: f64, beta: f64, k: usize, m: usize) -> Result<Self> {
        Self::new((j * beta).exp(), k, m)
    }

    /// `theta == 1`: every kernel vanishes identically.
    pub fn is_degenerate(&self) -> bool {
        self.theta == 1.0
    }

    pub(crate) fn require_three_state(&self) -> Result<()> {
        if self.m != 2 {
            return Err(SosError::contract(format!(
                "this operation is only defined for m = 2, got m = {}",
                self.m
            )));
        }
        Ok(())
    }

    pub(crate) fn kernel(&self) -> Kernel {
        Kernel::new_unchecked(self.theta)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta.is_finite() && theta > 0.0) {
        return Err(SosError::domain(format!("theta must be finite and > 0, got {theta}")));
    }
    Ok(())
}

/// The construction integers: an `h`-vertex sends `h` to `a` children and
/// `l` to `b` children; an `l`-vertex sends `h` to `c` and `l` to `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BranchPattern {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl BranchPattern {
    pub fn new(a: usize, b: usize, c: usize, d: usize) -> Self {
        BranchPattern { a, b, c, d }
    }

    /// Pattern with `b = k - a`, `d = k - c`.
    pub fn for_order(k: usize, a: usize, c: usize) -> Result<Self> {
        if a > k || c > k {
            return Err(SosError::contract(format!("a = {a}, c = {c} must not exceed k = {k}")));
        }
        Ok(BranchPattern { a, b: k - a, c, d: k - c })
    }

    pub fn order(&self) -> usize {
        self.a + self.b
    }

    pub fn check(&self, params: &ModelParams) -> Result<()> {
        if self.a + self.b != params.k || self.c + self.d != params.k {
            return Err(SosError::contract(format!(
                "pattern ({},{},{},{}) needs a+b = c+d = k = {}",
                self.a, self.b, self.c, self.d, params.k
            )));
        }
        Ok(())
    }

    /// `bc - ad`, the coefficient that couples the two equations.
    pub fn cross(&self) -> f64 {
        self.b as f64 * self.c as f64 - self.a as f64 * self.d as f64
    }
}

/// Full boundary field `(h1, h2, l1, l2)` in the order of the four-equation system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldVector {
    pub h1: f64,
    pub h2: f64,
    pub l1: f64,
    pub l2: f64,
}

impl FieldVector {
    pub fn new(h1: f64, h2: f64, l1: f64, l2: f64) -> Result<Self> {
        let v = FieldVector { h1, h2, l1, l2 };
        if !v.is_finite() {
            return Err(SosError::domain("field components must be finite"));
        }
        Ok(v)
    }

    pub fn is_finite(&self) -> bool {
        self.h1.is_finite() && self.h2.is_finite() && self.l1.is_finite() && self.l2.is_finite()
    }

    pub fn on_invariant_set(&self) -> bool {
        self.h1 == 0.0 && self.l1 == 0.0
    }

    pub fn sup_distance(&self, other: &FieldVector) -> f64 {
        (self.h1 - other.h1)
            .abs()
            .max((self.h2 - other.h2).abs())
            .max((self.l1 - other.l1).abs())
            .max((self.l2 - other.l2).abs())
    }
}

/// `(h2, l2)` on the invariant set `h1 = l1 = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedField {
    pub h2: f64,
    pub l2: f64,
}

impl ReducedField {
    pub fn new(h2: f64, l2: f64) -> Result<Self> {
        if !(h2.is_finite() && l2.is_finite()) {
            return Err(SosError::domain("field components must be finite"));
        }
        Ok(ReducedField { h2, l2 })
    }

    pub fn lift(&self) -> FieldVector {
        FieldVector { h1: 0.0, h2: self.h2, l1: 0.0, l2: self.l2 }
    }

    pub fn sup_distance(&self, other: &ReducedField) -> f64 {
        (self.h2 - other.h2).abs().max((self.l2 - other.l2).abs())
    }
}

/// `f(., theta)` and its first two derivatives with `theta` validated once.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Kernel {
    theta: f64,
    ln_theta: f64,
    ln_two_theta: f64,
    ln_theta_sq_plus_one: f64,
}

impl Kernel {
    pub(crate) fn new_unchecked(theta: f64) -> Self {
        Kernel {
            theta,
            ln_theta: theta.ln(),
            ln_two_theta: (2.0 * theta).ln(),
            ln_theta_sq_plus_one: (theta * theta).ln_1p(),
        }
    }

    pub(crate) fn f(&self, x: f64) -> f64 {
        let t = self.theta;
        if t == 1.0 {
            return 0.0;
        }
        // divide through by e^x on the right half-line so nothing overflows
        // and no large offset cancels
        if x >= 0.0 {
            let u = (-x).exp();
            (2.0 * t * u).ln_1p() - (t + (t * t + 1.0) * u).ln()
        } else {
            let e = x.exp();
            (e + 2.0 * t).ln() - (t * t + 1.0 + t * e).ln()
        }
    }

    pub(crate) fn df(&self, x: f64) -> f64 {
        let t = self.theta;
        if t == 1.0 {
            return 0.0;
        }
        let t2m1 = t * t - 1.0;
        if x >= 0.0 {
            let u = (-x).exp();
            -t2m1 * u / ((1.0 + 2.0 * t * u) * (t + (t * t + 1.0) * u))
        } else {
            let e = x.exp();
            -t2m1 * e / ((e + 2.0 * t) * (t * t + t * e + 1.0))
        }
    }

    pub(crate) fn d2f(&self, x: f64) -> f64 {
        let t = self.theta;
        if t == 1.0 {
            return 0.0;
        }
        let t2m1 = t * t - 1.0;
        let s = 2.0 * t * t + 2.0;
        if x >= 0.0 {
            let u = (-x).exp();
            let a = 1.0 + 2.0 * t * u;
            let b = t + (t * t + 1.0) * u;
            t * t2m1 * (1.0 - s * u * u) * u / (a * a * b * b)
        } else {
            let e = x.exp();
            let a = e + 2.0 * t;
            let b = t * t + t * e + 1.0;
            t * t2m1 * (e * e - s) * e / (a * a * b * b)
        }
    }

    /// Infimum and supremum of `f` over the real line.
    pub(crate) fn range(&self) -> (f64, f64) {
        let at_plus_inf = -self.ln_theta;
        let at_minus_inf = self.ln_two_theta - self.ln_theta_sq_plus_one;
        (at_plus_inf.min(at_minus_inf), at_plus_inf.max(at_minus_inf))
    }
}

fn checked_kernel(x: f64, theta: f64) -> Result<Kernel> {
    check_theta(theta)?;
    if !x.is_finite() {
        return Err(SosError::domain(format!("kernel argument must be finite, got {x}")));
    }
    Ok(Kernel::new_unchecked(theta))
}

/// `f(x, theta) = ln((e^x + 2 theta) / (theta^2 + theta e^x + 1))`.
pub fn kernel_f(x: f64, theta: f64) -> Result<f64> {
    Ok(checked_kernel(x, theta)?.f(x))
}

/// `f'(x) = -e^x (theta^2 - 1) / ((e^x + 2 theta)(theta^2 + theta e^x + 1))`.
pub fn kernel_f_derivative(x: f64, theta: f64) -> Result<f64> {
    Ok(checked_kernel(x, theta)?.df(x))
}

pub fn kernel_f_second(x: f64, theta: f64) -> Result<f64> {
    Ok(checked_kernel(x, theta)?.d2f(x))
}

/// The point `x* = ln(2 theta^2 + 2) / 2` where `f''` changes sign.
pub fn inflection_point(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(0.5 * (2.0 * theta * theta + 2.0).ln())
}

/// Bounds `(inf f, sup f)`; the kernel never attains either.
pub fn kernel_range(theta: f64) -> Result<(f64, f64)> {
    check_theta(theta)?;
    Ok(Kernel::new_unchecked(theta).range())
}

/// The boundary-law map `F(h, m, theta)` for general `m`.
///
/// `h = (h_0, .., h_{m-1})` is the gauge-reduced field (the `m`-th component
/// already subtracted). Component `i` is
/// `ln[(sum_j theta^|i-j| e^{h_j} + theta^{m-i}) / (sum_j theta^{m-j} e^{h_j} + 1)]`.
pub fn map_f(h: &[f64], params: &ModelParams) -> Result<Vec<f64>> {
    let m = params.m;
    if h.len() != m {
        return Err(SosError::contract(format!("map_f expects {m} components, got {}", h.len())));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(SosError::domain("map_f arguments must be finite"));
    }
    if params.is_degenerate() {
        return Ok(vec![0.0; m]);
    }
    let ln_t = params.theta.ln();
    let mut terms = Vec::with_capacity(m + 1);

    terms.extend(h.iter().enumerate().map(|(j, hj)| (m - j) as f64 * ln_t + hj));
    terms.push(0.0);
    let ln_den = log_sum_exp(&terms);

    let out = (0..m)
        .map(|i| {
            terms.clear();
            terms.extend(h.iter().enumerate().map(|(j, hj)| i.abs_diff(j) as f64 * ln_t + hj));
            terms.push((m - i) as f64 * ln_t);
            log_sum_exp(&terms) - ln_den
        })
        .collect();
    Ok(out)
}

/// Right-hand side of the four-equation fixed-point system for `m = 2`.
pub fn operator_w(v: &FieldVector, pattern: &BranchPattern, params: &ModelParams) -> Result<FieldVector> {
    params.require_three_state()?;
    pattern.check(params)?;
    if !v.is_finite() {
        return Err(SosError::domain("field components must be finite"));
    }
    let fh = map_f(&[v.h1, v.h2], params)?;
    let fl = map_f(&[v.l1, v.l2], params)?;
    let (a, b, c, d) = (pattern.a as f64, pattern.b as f64, pattern.c as f64, pattern.d as f64);
    Ok(FieldVector {
        h1: a * fh[0] + b * fl[0],
        h2: a * fh[1] + b * fl[1],
        l1: c * fh[0] + d * fl[0],
        l2: c * fh[1] + d * fl[1],
    })
}

/// `(a f(h2) + b f(l2), c f(h2) + d f(l2))`: the operator restricted to `h1 = l1 = 0`.
pub fn reduced_rhs(r: &ReducedField, pattern: &BranchPattern, params: &ModelParams) -> Result<ReducedField> {
    params.require_three_state()?;
    pattern.check(params)?;
    if !(r.h2.is_finite() && r.l2.is_finite()) {
        return Err(SosError::domain("field components must be finite"));
    }
    Ok(reduced_rhs_unchecked(r, pattern, &params.kernel()))
}

pub(crate) fn reduced_rhs_unchecked(r: &ReducedField, p: &BranchPattern, kern: &Kernel) -> ReducedField {
    let fh = kern.f(r.h2);
    let fl = kern.f(r.l2);
    ReducedField {
        h2: p.a as f64 * fh + p.b as f64 * fl,
        l2: p.c as f64 * fh + p.d as f64 * fl,
    }
}
