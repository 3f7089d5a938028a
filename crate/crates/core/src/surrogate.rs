//! Objective prediction for the candidate pool and greedy batch selection by
//! predicted hypervolume.

use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::Benchmark;
use crate::domain::{non_dominated_indices, DecisionVector, History, Normalizer, ObjectiveVector};
use crate::error::{Error, Result};
use crate::hypervolume::hv;
use crate::scoring::NORMALIZED_REFERENCE;
use crate::usage::Usage;

/// Prediction attempts before the engine falls back to a random batch.
pub const PREDICTION_ATTEMPTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PredictorKind {
    Llm,
    OracleMock,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedCandidate {
    pub x: DecisionVector,
    pub y_hat: ObjectiveVector,
}

/// Objective predictor for a pool of candidates.
pub trait Predictor: Send + Sync {
    fn kind(&self) -> PredictorKind;

    /// One prediction per pool element, in pool order.
    fn predict(
        &self,
        pool: &[DecisionVector],
        history: &History,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<ObjectiveVector>>;

    /// Usage accumulated since the previous call.
    fn drain_usage(&self) -> Usage {
        Usage::default()
    }
}

/// Returns the benchmark's noise-free objective values.
#[derive(Debug, Clone, Copy)]
pub struct OraclePredictor {
    pub benchmark: Benchmark,
}

impl Predictor for OraclePredictor {
    fn kind(&self) -> PredictorKind {
        PredictorKind::OracleMock
    }

    fn predict(
        &self,
        pool: &[DecisionVector],
        _history: &History,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<ObjectiveVector>> {
        pool.iter()
            .map(|x| self.benchmark.evaluate_noiseless(x))
            .collect()
    }
}

/// Predictions for `pool`, checked for count, arity and finiteness.
pub fn predict(
    pool: &[DecisionVector],
    history: &History,
    m: usize,
    predictor: &dyn Predictor,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<PredictedCandidate>> {
    let predictions = predictor.predict(pool, history, rng)?;
    if predictions.len() != pool.len() {
        return Err(Error::SurrogateResponse(format!(
            "expected {} predictions, got {}",
            pool.len(),
            predictions.len()
        )));
    }
    if let Some(bad) = predictions.iter().find(|y| y.len() != m || !y.is_finite()) {
        return Err(Error::SurrogateResponse(format!(
            "malformed prediction {:?}",
            bad.0
        )));
    }
    Ok(pool
        .iter()
        .cloned()
        .zip(predictions)
        .map(|(x, y_hat)| PredictedCandidate { x, y_hat })
        .collect())
}

/// Greedy batch of pool indices maximizing the predicted hypervolume
/// together with the history's front.
///
/// Objectives are min-max normalized over history and predictions jointly;
/// the internal reference point closes the boxes. Ties go to the earlier
/// pool entry. Returns `min(b, pool.len())` distinct indices.
pub fn select_batch<P: AsRef<[f64]>>(
    predicted: &[P],
    history_objectives: &[P],
    b: usize,
) -> Result<Vec<usize>> {
    if predicted.len() <= b {
        return Ok((0..predicted.len()).collect());
    }
    let all: Vec<&[f64]> = history_objectives
        .iter()
        .chain(predicted)
        .map(|p| p.as_ref())
        .collect();
    let normalizer = Normalizer::fit(&all);
    let hist: Vec<Vec<f64>> = history_objectives
        .iter()
        .map(|y| normalizer.apply(y.as_ref()))
        .collect();
    let pool: Vec<Vec<f64>> = predicted
        .iter()
        .map(|y| normalizer.apply(y.as_ref()))
        .collect();
    let reference = vec![NORMALIZED_REFERENCE; pool[0].len()];

    let mut current: Vec<Vec<f64>> = non_dominated_indices(&hist)
        .into_iter()
        .map(|i| hist[i].clone())
        .collect();
    let mut base = hv(&current, &reference)?;
    let mut chosen: Vec<usize> = Vec::with_capacity(b);
    for _ in 0..b {
        let mut best: Option<(usize, f64)> = None;
        for (i, y) in pool.iter().enumerate() {
            if chosen.contains(&i) {
                continue;
            }
            current.push(y.clone());
            let gain = hv(&current, &reference)? - base;
            current.pop();
            if best.is_none_or(|(_, g)| gain > g) {
                best = Some((i, gain));
            }
        }
        let (i, gain) = best.expect("pool larger than batch");
        chosen.push(i);
        current.push(pool[i].clone());
        base += gain;
    }
    Ok(chosen)
}

/// `min(b, n)` distinct indices drawn uniformly, in draw order.
pub fn random_batch<R: Rng + ?Sized>(n: usize, b: usize, rng: &mut R) -> Vec<usize> {
    sample(rng, n, b.min(n)).into_vec()
}

/// Predicted hypervolume of history plus the chosen candidates, using the
/// same normalization as [`select_batch`].
pub fn predicted_batch_hv<P: AsRef<[f64]>>(
    predicted: &[P],
    history_objectives: &[P],
    chosen: &[usize],
) -> Result<f64> {
    let all: Vec<&[f64]> = history_objectives
        .iter()
        .chain(predicted)
        .map(|p| p.as_ref())
        .collect();
    let normalizer = Normalizer::fit(&all);
    let mut points: Vec<Vec<f64>> = history_objectives
        .iter()
        .map(|y| normalizer.apply(y.as_ref()))
        .collect();
    points.extend(
        chosen
            .iter()
            .map(|&i| normalizer.apply(predicted[i].as_ref())),
    );
    let reference = vec![NORMALIZED_REFERENCE; all[0].len()];
    hv(&points, &reference)
}
