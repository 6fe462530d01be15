//! Number rendering: 6 significant digits for people, 17 for machines.

/// `%g`-style with 6 significant digits.
pub fn human(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        trim_zeros(&format!("{:.*}", (5 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// 17 significant digits, enough to reproduce the `f64` exactly.
pub fn machine(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn machine_opt(x: Option<f64>) -> String {
    x.map(machine).unwrap_or_default()
}

pub fn human_opt(x: Option<f64>) -> String {
    x.map(human).unwrap_or_else(|| "-".to_string())
}

/// Pretty JSON via `serde_json::Value`, so parsing and re-emitting gives the same bytes.
pub fn json<T: serde::Serialize>(value: &T) -> serde_json::Result<String> {
    let v = serde_json::to_value(value)?;
    let mut s = serde_json::to_string_pretty(&v)?;
    s.push('\n');
    Ok(s)
}
