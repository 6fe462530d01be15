#![allow(dead_code)]

/// Central difference with one Richardson step; error O(h^4).
pub fn richardson<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

/// Relative agreement with an absolute floor for values near zero.
pub fn close(a: f64, b: f64, rel: f64, floor: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(floor)
}

/// Sign changes and exact zeros of `r` on a uniform grid of `points` nodes.
pub fn dense_sign_changes<F: Fn(f64) -> f64>(r: F, lo: f64, hi: f64, points: usize) -> usize {
    let step = (hi - lo) / (points - 1) as f64;
    let mut count = 0;
    let mut prev = r(lo);
    if prev == 0.0 {
        count += 1;
    }
    for i in 1..points {
        let cur = r(lo + step * i as f64);
        if cur == 0.0 {
            count += 1;
        } else if prev != 0.0 && (prev < 0.0) != (cur < 0.0) {
            count += 1;
        }
        prev = cur;
    }
    count
}

/// The kernel written out directly from its definition, no rescaling.
pub fn naive_f(x: f64, theta: f64) -> f64 {
    let e = x.exp();
    ((e + 2.0 * theta) / (theta * theta + theta * e + 1.0)).ln()
}
