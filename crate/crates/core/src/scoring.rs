//! Per-region utilities, the composite acquisition score and softmax
//! region selection.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{non_dominated_indices, Bounds, History, Normalizer};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hypervolume::{hv, point_hv_contribution, regional_hv_contribution};
use crate::partition::LeafSet;

/// Reference coordinate used for hypervolumes of min-max normalized objectives.
pub const NORMALIZED_REFERENCE: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreWeights {
    pub alpha_max: f64,
    pub alpha_min: f64,
    pub beta1: f64,
    pub beta2: f64,
    /// Evaluation horizon `T` of the annealing schedule.
    pub horizon: usize,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        Self {
            alpha_max: 1.0,
            alpha_min: 0.01,
            beta1: 0.5,
            beta2: 0.5,
            horizon: 50,
        }
    }
}

impl ScoreWeights {
    pub fn validate(&self) -> Result<()> {
        if (self.beta1 + self.beta2 - 1.0).abs() > 1e-9 || self.beta1 < 0.0 || self.beta2 < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "beta1 + beta2 must equal 1 with both non-negative, got {} + {}",
                self.beta1, self.beta2
            )));
        }
        if !(0.0 <= self.alpha_min && self.alpha_min <= self.alpha_max) {
            return Err(Error::InvalidConfig(format!(
                "need 0 <= alpha_min <= alpha_max, got {} and {}",
                self.alpha_min, self.alpha_max
            )));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidConfig(
                "score horizon must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionScore {
    pub psi_hv: f64,
    pub psi_vol: f64,
    pub psi_ucbv: f64,
    pub composite: f64,
    pub probability: f64,
}

pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Geometric mean of the region's side lengths, measured with the domain
/// rescaled to the unit hypercube.
pub fn psi_vol(region: &Bounds, domain: &Bounds) -> f64 {
    let d = domain.dim();
    let log_sum: f64 = (0..d)
        .map(|i| (region.width(i) / domain.width(i)).ln())
        .sum();
    (log_sum / d as f64).exp()
}

/// Variance-aware exploration bonus over the members' HV contributions.
/// `t` counts evaluations and `k_t` leaves.
pub fn psi_ucbv(contributions: &[f64], t: usize, k_t: usize) -> f64 {
    let n = contributions.len();
    if n == 0 || t == 0 || k_t == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let mean = contributions.iter().sum::<f64>() / nf;
    let var = contributions
        .iter()
        .map(|c| (c - mean).powi(2))
        .sum::<f64>()
        / nf;
    let log_term = (t as f64 / (k_t as f64 * nf)).ln().max(0.0);
    (2.0 * var * log_term / nf).sqrt()
}

pub fn composite_score(
    psi_hv: f64,
    psi_vol: f64,
    psi_ucbv: f64,
    alpha_t: f64,
    weights: &ScoreWeights,
) -> f64 {
    sigmoid(psi_hv)
        + alpha_t * (weights.beta1 * sigmoid(psi_vol) + weights.beta2 * sigmoid(psi_ucbv))
}

/// Cosine annealing from `alpha_max` at `t = 0` to `alpha_min` at `t = horizon`;
/// `t` beyond the horizon stays at `alpha_min`.
pub fn alpha_schedule(t: usize, horizon: usize, alpha_max: f64, alpha_min: f64) -> f64 {
    if t == 0 {
        return alpha_max;
    }
    if t >= horizon {
        return alpha_min;
    }
    let phase = std::f64::consts::PI * t as f64 / horizon as f64;
    alpha_min + 0.5 * (alpha_max - alpha_min) * (1.0 + phase.cos())
}

pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Draws `k` distinct region indices, each draw proportional to the softmax
/// mass of the regions not yet chosen. Panics if `k` exceeds the region count.
pub fn select_regions<R: Rng + ?Sized>(scores: &[f64], k: usize, rng: &mut R) -> Vec<usize> {
    assert!(
        k <= scores.len(),
        "cannot select {k} regions out of {}",
        scores.len()
    );
    let mut weights = softmax(scores);
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        let dist = WeightedIndex::new(&weights).expect("remaining softmax mass is positive");
        let j = dist.sample(rng);
        chosen.push(j);
        weights[j] = 0.0;
    }
    chosen
}

/// Everything the engine records about one scoring pass.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafScoring {
    pub scores: Vec<RegionScore>,
    pub alpha_t: f64,
    /// Hypervolume of the normalized front under the internal reference point.
    pub scoring_hv: f64,
}

/// Scores every leaf against the history's normalized Pareto front.
/// `t` is the evaluation count.
pub fn score_leaves(
    leaves: &LeafSet<'_>,
    history: &History,
    domain: &Bounds,
    t: usize,
    weights: &ScoreWeights,
    exec: Exec,
) -> Result<LeafScoring> {
    let objectives = history.objectives();
    let normalizer = Normalizer::fit(&objectives);
    let normalized: Vec<Vec<f64>> = objectives.iter().map(|y| normalizer.apply(y)).collect();
    let m = normalized[0].len();
    let reference = vec![NORMALIZED_REFERENCE; m];

    let front = non_dominated_indices(&normalized);
    let front_points: Vec<&[f64]> = front.iter().map(|&i| normalized[i].as_slice()).collect();
    let scoring_hv = hv(&front_points, &reference)?;

    // Per-observation contribution; dominated observations contribute zero.
    let mut contribution = vec![0.0; normalized.len()];
    let mut front_position = vec![None; normalized.len()];
    let front_contributions = exec.map_range(front.len(), |p| {
        point_hv_contribution(&front_points, &reference, p)
    });
    for (p, (&i, c)) in front.iter().zip(front_contributions).enumerate() {
        contribution[i] = c?;
        front_position[i] = Some(p);
    }

    let k_t = leaves.len();
    let alpha_t = alpha_schedule(t, weights.horizon, weights.alpha_max, weights.alpha_min);
    let partial = exec.map(&leaves.leaves, |leaf| -> Result<(f64, f64, f64)> {
        let on_front: Vec<usize> = leaf
            .members
            .iter()
            .filter_map(|&i| front_position[i])
            .collect();
        let psi_hv = regional_hv_contribution(&front_points, &reference, &on_front)?;
        let member_contributions: Vec<f64> =
            leaf.members.iter().map(|&i| contribution[i]).collect();
        Ok((
            psi_hv,
            psi_vol(&leaf.bounds, domain),
            psi_ucbv(&member_contributions, t, k_t),
        ))
    });
    let mut composites = Vec::with_capacity(k_t);
    let mut parts = Vec::with_capacity(k_t);
    for p in partial {
        let (h, v, u) = p?;
        composites.push(composite_score(h, v, u, alpha_t, weights));
        parts.push((h, v, u));
    }
    let probabilities = softmax(&composites);
    let scores = parts
        .into_iter()
        .zip(composites)
        .zip(probabilities)
        .map(
            |(((psi_hv, psi_vol, psi_ucbv), composite), probability)| RegionScore {
                psi_hv,
                psi_vol,
                psi_ucbv,
                composite,
                probability,
            },
        )
        .collect();
    Ok(LeafScoring {
        scores,
        alpha_t,
        scoring_hv,
    })
}
