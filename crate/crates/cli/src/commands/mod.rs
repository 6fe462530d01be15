pub mod criticals;
pub mod solve;
pub mod sweep;
pub mod verify;

use sosgibbs::{solve_ti, ModelParams, RootFindConfig};

use crate::CliError;

/// Default `h*`: middle root of `h = k f(h)` when there are three, else the smallest.
pub(crate) fn default_h_star(theta: f64, k: usize, cfg: &RootFindConfig) -> Result<f64, CliError> {
    let params = ModelParams::three_state(theta, k)?;
    let roots = solve_ti(&params, cfg)?.roots;
    let idx = if roots.len() == 3 { 1 } else { 0 };
    Ok(roots[idx].field.h2)
}
