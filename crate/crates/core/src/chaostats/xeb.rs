use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::{OutcomeDistribution, SampleSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XebEstimate {
    pub fidelity: f64,
    pub stderr: f64,
    pub sample_count: usize,
}

/// Linear cross-entropy fidelity `2^n · mean_i p(x_i) − 1`, with the
/// standard error of the mean.
pub fn xeb_estimate(s: &SampleSet, ideal: &OutcomeDistribution) -> Result<XebEstimate> {
    if s.n() != ideal.n() {
        return Err(Error::DimensionMismatch {
            expected: ideal.n(),
            actual: s.n(),
        });
    }
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let scale = (1u64 << s.n()) as f64;
    let p = ideal.probabilities();
    let values: Vec<f64> = s
        .outcomes()
        .iter()
        .map(|&x| scale * p[x as usize])
        .collect();
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    Ok(XebEstimate {
        fidelity: mean - 1.0,
        stderr: (var / m).sqrt(),
        sample_count: values.len(),
    })
}

pub fn xeb_fidelity(s: &SampleSet, ideal: &OutcomeDistribution) -> Result<f64> {
    Ok(xeb_estimate(s, ideal)?.fidelity)
}
