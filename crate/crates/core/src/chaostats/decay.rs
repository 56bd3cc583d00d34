//! Straight-line fit of `log(W_d^noisy / W_d^ref)` against degree.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use super::degree::DegreeProfileEstimate;
use crate::error::{Error, Result};
use crate::walsh::DegreeProfile;

/// A weight enters the fit only above this many standard errors.
pub const FLOOR_SIGMAS: f64 = 10.0;
/// Absolute floor for weights with no reported error.
pub const WEIGHT_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub label: Option<String>,
    pub degrees: Vec<usize>,
    pub log_ratios: Vec<f64>,
    pub log_ratio_stderr: Vec<f64>,
    /// Requested degrees that fell below the floor.
    pub excluded: Vec<usize>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// `exp(slope / 2)`.
    pub effective_rho: f64,
}

impl DecayFit {
    /// True when no log ratio rises above an earlier degree's by more than
    /// `sigmas` combined standard errors.
    pub fn is_monotone_nonincreasing(&self, sigmas: f64) -> bool {
        let mut points: Vec<(usize, f64, f64)> = self
            .degrees
            .iter()
            .zip(&self.log_ratios)
            .zip(&self.log_ratio_stderr)
            .map(|((&d, &r), &e)| (d, r, e))
            .collect();
        points.sort_by_key(|p| p.0);
        points.iter().enumerate().all(|(i, &(di, ri, ei))| {
            points[i + 1..]
                .iter()
                .filter(|p| p.0 > di)
                .all(|&(_, rj, ej)| rj <= ri + sigmas * (ei * ei + ej * ej).sqrt())
        })
    }
}

fn usable(w: f64, se: f64) -> bool {
    w > WEIGHT_FLOOR && w > FLOOR_SIGMAS * se
}

struct Point {
    degree: usize,
    log_ratio: f64,
    stderr: f64,
}

fn points(
    noisy: &DegreeProfileEstimate,
    reference: &DegreeProfileEstimate,
    degrees: &RangeInclusive<usize>,
) -> Result<(Vec<Point>, Vec<usize>)> {
    if noisy.n != reference.n {
        return Err(Error::DimensionMismatch {
            expected: reference.n,
            actual: noisy.n,
        });
    }
    let top = noisy.max_degree().min(reference.max_degree());
    if degrees.is_empty() || *degrees.end() > top {
        return Err(Error::param(
            "degrees",
            format!("{degrees:?} not within estimated degrees 0..={top}"),
        ));
    }
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for d in degrees.clone() {
        let (wn, sn) = (noisy.weights[d], noisy.stderr[d]);
        let (wr, sr) = (reference.weights[d], reference.stderr[d]);
        if usable(wn, sn) && usable(wr, sr) {
            kept.push(Point {
                degree: d,
                log_ratio: (wn / wr).ln(),
                stderr: ((sn / wn).powi(2) + (sr / wr).powi(2)).sqrt(),
            });
        } else {
            excluded.push(d);
        }
    }
    Ok((kept, excluded))
}

fn least_squares(
    points: Vec<Point>,
    excluded: Vec<usize>,
    label: Option<String>,
) -> Result<DecayFit> {
    let mut distinct: Vec<usize> = points.iter().map(|p| p.degree).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::Insufficient(format!(
            "decay fit needs at least 2 usable degrees, got {}",
            distinct.len()
        )));
    }
    let m = points.len() as f64;
    let mx = points.iter().map(|p| p.degree as f64).sum::<f64>() / m;
    let my = points.iter().map(|p| p.log_ratio).sum::<f64>() / m;
    let sxx: f64 = points.iter().map(|p| (p.degree as f64 - mx).powi(2)).sum();
    let sxy: f64 = points
        .iter()
        .map(|p| (p.degree as f64 - mx) * (p.log_ratio - my))
        .sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = points.iter().map(|p| (p.log_ratio - my).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.log_ratio - intercept - slope * p.degree as f64).powi(2))
        .sum();
    let r_squared = if ss_tot <= f64::EPSILON * f64::EPSILON {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(DecayFit {
        label,
        degrees: points.iter().map(|p| p.degree).collect(),
        log_ratios: points.iter().map(|p| p.log_ratio).collect(),
        log_ratio_stderr: points.iter().map(|p| p.stderr).collect(),
        excluded,
        slope,
        intercept,
        r_squared,
        effective_rho: (slope / 2.0).exp(),
    })
}

/// Fits a noisy estimate against an exact reference profile.
pub fn decay_fit(
    noisy: &DegreeProfileEstimate,
    reference: &DegreeProfile,
    degrees: RangeInclusive<usize>,
) -> Result<DecayFit> {
    let reference = DegreeProfileEstimate::exact(reference, reference.n)?;
    decay_fit_estimates(noisy, &reference, degrees)
}

/// Fits two estimates; a degree is dropped unless both weights clear the
/// floor.
pub fn decay_fit_estimates(
    noisy: &DegreeProfileEstimate,
    reference: &DegreeProfileEstimate,
    degrees: RangeInclusive<usize>,
) -> Result<DecayFit> {
    let (kept, excluded) = points(noisy, reference, &degrees)?;
    least_squares(kept, excluded, None)
}

/// One line through the points of several `(noisy, reference)` pairs, as
/// when several circuits share a noise level.
pub fn decay_fit_pooled(
    pairs: &[(DegreeProfileEstimate, DegreeProfileEstimate)],
    degrees: RangeInclusive<usize>,
) -> Result<DecayFit> {
    let mut all = Vec::new();
    let mut excluded = Vec::new();
    for (noisy, reference) in pairs {
        let (kept, dropped) = points(noisy, reference, &degrees)?;
        all.extend(kept);
        excluded.extend(dropped);
    }
    excluded.sort_unstable();
    excluded.dedup();
    least_squares(all, excluded, Some("pooled".into()))
}
