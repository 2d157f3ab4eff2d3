use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Observed convergence order from errors at successive resolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedOrder {
    pub steps: Vec<f64>,
    pub errors: Vec<f64>,
    /// `ln(e_i / e_{i+1}) / ln(h_i / h_{i+1})` for each refinement.
    pub pairwise: Vec<f64>,
    /// Least-squares slope of `ln e` against `ln h`.
    pub order: f64,
}

/// `p` from `(h, error)` pairs, coarsest first. Errors must decrease
/// strictly under refinement.
pub fn convergence_order(levels: &[(f64, f64)]) -> Result<ObservedOrder> {
    if levels.len() < 3 {
        return invalid("convergence order needs at least three resolutions");
    }
    for w in levels.windows(2) {
        let ((h0, e0), (h1, e1)) = (w[0], w[1]);
        if !(h1 < h0) {
            return Err(Error::NotAsymptotic(format!(
                "resolutions must refine strictly (h = {h0} then {h1})"
            )));
        }
        if !(e1 < e0) || !(e1 > 0.0) {
            return Err(Error::NotAsymptotic(format!(
                "errors do not decrease under refinement ({e0:e} at h = {h0}, {e1:e} at h = {h1})"
            )));
        }
    }
    let pairwise = levels
        .windows(2)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect();
    let xs: Vec<f64> = levels.iter().map(|l| l.0.ln()).collect();
    let ys: Vec<f64> = levels.iter().map(|l| l.1.ln()).collect();
    let (_, order) = crate::numerics::fit_line(&xs, &ys)?;
    Ok(ObservedOrder {
        steps: levels.iter().map(|l| l.0).collect(),
        errors: levels.iter().map(|l| l.1).collect(),
        pairwise,
        order,
    })
}
