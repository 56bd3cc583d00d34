//! One-sample Kolmogorov–Smirnov test against Uniform(0, 1), used to check
//! that p-values are calibrated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Kolmogorov survival function `Q(λ) = 2 Σ_{j≥1} (−1)^{j−1} e^{−2 j² λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Dual series, fast for small λ.
        let y = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let sum: f64 = (0..50)
            .map(|k| {
                let j = (2 * k + 1) as f64;
                (j * j * y).exp()
            })
            .sum();
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum).clamp(0.0, 1.0)
    } else {
        let sum: f64 = (1..100)
            .map(|j| {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp()
            })
            .sum();
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Tests `values` against Uniform(0, 1) using the asymptotic distribution
/// with the Stephens small-sample correction.
pub fn ks_uniformity(values: &[f64]) -> Result<KsResult> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::param("values", format!("{v} outside [0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len() as f64;
    let statistic = sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| ((i + 1) as f64 / m - x).max(x - i as f64 / m))
        .fold(0.0, f64::max);
    let root = m.sqrt();
    let lambda = (root + 0.12 + 0.11 / root) * statistic;
    Ok(KsResult {
        statistic,
        p_value: kolmogorov_q(lambda),
    })
}
