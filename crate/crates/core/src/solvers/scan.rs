use serde::Serialize;

use crate::error::{Result, SosError};

/// Grid and tolerance settings shared by every scalar root search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RootFindConfig {
    pub scan_lo: f64,
    pub scan_hi: f64,
    pub scan_points: usize,
    /// Bisection stops once the bracket is narrower than this.
    pub tol_x: f64,
    /// A root is only reported when its defining equation holds to this.
    pub tol_residual: f64,
    pub max_iter: usize,
    /// Replace `[scan_lo, scan_hi]` by the analytic enclosure of the roots of
    /// the equation being solved (the kernel is bounded, so every fixed
    /// point lies in a known interval).
    pub auto_window: bool,
}

impl Default for RootFindConfig {
    fn default() -> Self {
        RootFindConfig {
            scan_lo: -40.0,
            scan_hi: 40.0,
            scan_points: 20_001,
            tol_x: 1e-13,
            tol_residual: 1e-10,
            max_iter: 200,
            auto_window: true,
        }
    }
}

impl RootFindConfig {
    /// Fixed scan window; disables the automatic enclosure.
    pub fn with_window(mut self, lo: f64, hi: f64, points: usize) -> Self {
        self.scan_lo = lo;
        self.scan_hi = hi;
        self.scan_points = points;
        self.auto_window = false;
        self
    }

    pub fn with_points(mut self, points: usize) -> Self {
        self.scan_points = points;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scan_lo.is_finite() && self.scan_hi.is_finite() && self.scan_lo < self.scan_hi) {
            return Err(SosError::contract(format!(
                "scan window [{}, {}] must be finite with lo < hi",
                self.scan_lo, self.scan_hi
            )));
        }
        if self.scan_points < 100 {
            return Err(SosError::contract(format!(
                "scan_points must be >= 100, got {}",
                self.scan_points
            )));
        }
        if !(self.tol_x > 0.0 && self.tol_residual > 0.0) {
            return Err(SosError::contract("tolerances must be positive"));
        }
        if self.max_iter == 0 {
            return Err(SosError::contract("max_iter must be positive"));
        }
        Ok(())
    }

    /// The window a solver should scan given an enclosure `[lo, hi]` of its roots.
    pub(crate) fn window_for(&self, lo: f64, hi: f64) -> RootFindConfig {
        let mut cfg = *self;
        if self.auto_window {
            cfg.scan_lo = lo - 1.0;
            cfg.scan_hi = hi + 1.0;
        }
        cfg
    }
}

/// Every root of `residual` on the configured grid.
///
/// Sign changes between neighbouring nodes are refined by bisection. Nodes
/// whose residual is already below `tol_residual` and local minima of
/// `|residual|` that touch zero without crossing (double roots at tangency)
/// are refined by a golden-section search on `|residual|`. Roots closer than
/// `10 * tol_x` are merged; the result is sorted ascending.
pub fn bracketed_roots<F>(residual: F, cfg: &RootFindConfig) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    cfg.validate()?;
    let n = cfg.scan_points;
    let step = (cfg.scan_hi - cfg.scan_lo) / (n - 1) as f64;
    let node = |i: usize| {
        if i + 1 == n {
            cfg.scan_hi
        } else {
            cfg.scan_lo + step * i as f64
        }
    };
    let values: Vec<f64> = (0..n).map(|i| residual(node(i))).collect();
    let sign = |v: f64| -> i8 {
        if v.is_nan() {
            i8::MIN
        } else if v.abs() <= cfg.tol_residual {
            0
        } else if v > 0.0 {
            1
        } else {
            -1
        }
    };
    let signs: Vec<i8> = values.iter().map(|&v| sign(v)).collect();

    let mut roots: Vec<(f64, f64)> = Vec::new();
    let mut push = |x: f64| {
        let r = residual(x);
        if r.is_finite() {
            roots.push((x, r.abs()));
        }
    };

    let mut i = 0;
    while i < n {
        if signs[i] == 0 {
            // run of near-zero nodes
            let start = i;
            while i + 1 < n && signs[i + 1] == 0 {
                i += 1;
            }
            let left = start.checked_sub(1);
            let right = if i + 1 < n { Some(i + 1) } else { None };
            let lo = node(left.unwrap_or(start));
            let hi = node(right.unwrap_or(i));
            match (left, right) {
                (Some(l), Some(r)) if signs[l] * signs[r] < 0 && signs[l] != i8::MIN && signs[r] != i8::MIN => {
                    push(bisect(&residual, lo, hi, values[l], cfg));
                }
                _ => push(golden_min_abs(&residual, lo, hi, cfg)),
            }
        } else if i + 1 < n && signs[i + 1] != 0 {
            let (s0, s1) = (signs[i], signs[i + 1]);
            if s0 != i8::MIN && s1 != i8::MIN && s0 != s1 {
                push(bisect(&residual, node(i), node(i + 1), values[i], cfg));
            } else if s0 == s1 && i > 0 && signs[i - 1] == s0 {
                let (a, b, c) = (values[i - 1].abs(), values[i].abs(), values[i + 1].abs());
                if b <= a && b < c {
                    let x = golden_min_abs(&residual, node(i - 1), node(i + 1), cfg);
                    if residual(x).abs() <= cfg.tol_residual {
                        push(x);
                    }
                }
            }
        }
        i += 1;
    }

    roots.sort_by(|a, b| a.0.total_cmp(&b.0));
    let radius = 10.0 * cfg.tol_x;
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(roots.len());
    for (x, r) in roots {
        match merged.last_mut() {
            Some(last) if (x - last.0).abs() < radius => {
                if r < last.1 {
                    *last = (x, r);
                }
            }
            _ => merged.push((x, r)),
        }
    }
    Ok(merged.into_iter().map(|(x, _)| x).collect())
}

fn bisect<F: Fn(f64) -> f64>(residual: &F, mut lo: f64, mut hi: f64, f_lo: f64, cfg: &RootFindConfig) -> f64 {
    let lo_positive = f_lo > 0.0;
    for _ in 0..cfg.max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= cfg.tol_x || mid <= lo || mid >= hi {
            break;
        }
        let fm = residual(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn golden_min_abs<F: Fn(f64) -> f64>(residual: &F, mut lo: f64, mut hi: f64, cfg: &RootFindConfig) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = residual(x1).abs();
    let mut f2 = residual(x2).abs();
    for _ in 0..cfg.max_iter {
        if hi - lo <= cfg.tol_x {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = residual(x1).abs();
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = residual(x2).abs();
        }
    }
    if f1 <= f2 {
        x1
    } else {
        x2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(lo: f64, hi: f64) -> RootFindConfig {
        RootFindConfig::default().with_window(lo, hi, 1001)
    }

    #[test]
    fn linear() {
        let r = bracketed_roots(|x| x, &cfg(-1.0, 1.0)).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].abs() < 1e-12);
    }

    #[test]
    fn cubic_with_roots_on_nodes() {
        let r = bracketed_roots(|x| x * x * x - x, &cfg(-2.0, 2.0)).unwrap();
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn cubic_off_grid() {
        let r = bracketed_roots(|x| (x - 0.123) * (x + 1.377) * (x - 1.611), &cfg(-2.0, 2.0)).unwrap();
        assert_eq!(r.len(), 3);
        assert!((r[0] + 1.377).abs() < 1e-12);
        assert!((r[1] - 0.123).abs() < 1e-12);
        assert!((r[2] - 1.611).abs() < 1e-12);
    }

    #[test]
    fn double_root_is_found_once() {
        let r = bracketed_roots(|x| (x - 0.3001) * (x - 0.3001), &cfg(-1.0, 1.0)).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 0.3001).abs() < 1e-5);
    }

    #[test]
    fn no_root_is_empty() {
        assert!(bracketed_roots(|x| x * x + 1.0, &cfg(-3.0, 3.0)).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(bracketed_roots(|x| x, &cfg(1.0, -1.0)).is_err());
        assert!(bracketed_roots(|x| x, &RootFindConfig::default().with_window(-1.0, 1.0, 10)).is_err());
    }
}
