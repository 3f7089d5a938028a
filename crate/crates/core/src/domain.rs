//! Value types shared by every stage of the optimizer, plus the Pareto
//! primitives (dominance, non-dominated filtering, objective normalization).
//!
//! All objectives follow the minimization convention.

use std::collections::HashSet;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the decision space, in problem units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DecisionVector(pub Vec<f64>);

/// Raw objective values of one evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectiveVector(pub Vec<f64>);

macro_rules! vector_newtype {
    ($name:ident) => {
        impl Deref for $name {
            type Target = [f64];
            fn deref(&self) -> &[f64] {
                &self.0
            }
        }

        impl AsRef<[f64]> for $name {
            fn as_ref(&self) -> &[f64] {
                &self.0
            }
        }

        impl From<Vec<f64>> for $name {
            fn from(v: Vec<f64>) -> Self {
                Self(v)
            }
        }

        impl $name {
            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|v| v.is_finite())
            }
        }
    };
}

vector_newtype!(DecisionVector);
vector_newtype!(ObjectiveVector);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub x: DecisionVector,
    pub y: ObjectiveVector,
    pub trial_index: usize,
}

/// Axis-aligned box. The root domain requires `lower < upper` in every
/// dimension; partition leaves may be degenerate (`lower == upper`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "bounds need matching non-empty lower/upper, got {} and {}",
                lower.len(),
                upper.len()
            )));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(l, u)| !(l.is_finite() && u.is_finite() && l <= u))
        {
            return Err(Error::InvalidConfig(format!(
                "malformed bounds {lower:?} / {upper:?}"
            )));
        }
        Ok(Self { lower, upper })
    }

    /// Root-domain constructor: every side must have positive width.
    pub fn domain(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let b = Self::new(lower, upper)?;
        if b.lower.iter().zip(&b.upper).any(|(l, u)| l >= u) {
            return Err(Error::InvalidConfig(
                "domain bounds must satisfy lower < upper".into(),
            ));
        }
        Ok(b)
    }

    pub fn unit(d: usize) -> Self {
        Self {
            lower: vec![0.0; d],
            upper: vec![1.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    /// Closed-box membership.
    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (l, u))| v.is_finite() && *l <= *v && *v <= *u)
    }

    /// Maps `x` into the unit hypercube spanned by `self`.
    pub fn to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, v)| (v - self.lower[i]) / self.width(i))
            .collect()
    }

    /// Euclidean length of the box diagonal.
    pub fn diameter(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.width(i).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Append-only observation log.
#[derive(Debug, Clone, Default)]
pub struct History {
    observations: Vec<Observation>,
    keys: HashSet<String>,
    allow_reevaluation: bool,
}

impl History {
    pub fn new() -> Self {
        Self::default()
    }

    /// A history that accepts repeated decision vectors.
    pub fn permitting_reevaluation() -> Self {
        Self {
            allow_reevaluation: true,
            ..Self::default()
        }
    }

    pub fn push(&mut self, obs: Observation) -> Result<()> {
        if let Some(last) = self.observations.last() {
            if obs.trial_index < last.trial_index {
                return Err(Error::InvalidConfig(format!(
                    "trial index {} precedes {}",
                    obs.trial_index, last.trial_index
                )));
            }
        }
        let key = wire::decision_key(&obs.x);
        if !self.keys.insert(key) && !self.allow_reevaluation {
            return Err(Error::InvalidConfig(format!(
                "decision vector {:?} already observed",
                obs.x.0
            )));
        }
        self.observations.push(obs);
        Ok(())
    }

    /// Whether `x` matches an observed decision vector at wire precision.
    pub fn contains_key(&self, key: &str) -> bool {
        self.keys.contains(key)
    }

    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn objectives(&self) -> Vec<&[f64]> {
        self.observations.iter().map(|o| &o.y[..]).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Observation> {
        self.observations.iter()
    }
}

impl FromIterator<Observation> for History {
    /// Builds a history that permits re-evaluations; used for fixtures and replay.
    fn from_iter<I: IntoIterator<Item = Observation>>(iter: I) -> Self {
        let mut h = History::permitting_reevaluation();
        for o in iter {
            h.push(o).expect("observations must be in trial order");
        }
        h
    }
}

/// `a` Pareto-dominates `b` (minimization). Panics on length mismatch.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(
        a.len(),
        b.len(),
        "dominance check between vectors of different length"
    );
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Indices (ascending) of the points not dominated by any other point.
/// Objective-space duplicates are all kept.
pub fn non_dominated_indices<P: AsRef<[f64]>>(points: &[P]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| lexicographic(points[i].as_ref(), points[j].as_ref()));
    // Any dominator sorts strictly earlier, and by transitivity some kept
    // point dominates every dominated one.
    let mut front: Vec<usize> = Vec::new();
    for i in order {
        let p = points[i].as_ref();
        if !front.iter().any(|&f| dominates(points[f].as_ref(), p)) {
            front.push(i);
        }
    }
    front.sort_unstable();
    front
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Indices of the history's Pareto-optimal observations.
pub fn pareto_front(history: &History) -> Vec<usize> {
    non_dominated_indices(&history.objectives())
}

/// Per-objective min-max scaling with bounds taken from a reference set.
#[derive(Debug, Clone, PartialEq)]
pub struct Normalizer {
    min: Vec<f64>,
    max: Vec<f64>,
}

impl Normalizer {
    pub fn fit<P: AsRef<[f64]>>(vectors: &[P]) -> Self {
        assert!(!vectors.is_empty(), "cannot fit a normalizer on no vectors");
        let m = vectors[0].as_ref().len();
        let mut min = vec![f64::INFINITY; m];
        let mut max = vec![f64::NEG_INFINITY; m];
        for v in vectors {
            for (i, &x) in v.as_ref().iter().enumerate() {
                min[i] = min[i].min(x);
                max[i] = max[i].max(x);
            }
        }
        Self { min, max }
    }

    /// Degenerate objectives (zero range) map to 0.5.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .enumerate()
            .map(|(i, &x)| {
                let range = self.max[i] - self.min[i];
                if range > 0.0 {
                    (x - self.min[i]) / range
                } else {
                    0.5
                }
            })
            .collect()
    }
}

pub fn normalize_objectives<P: AsRef<[f64]>>(vectors: &[P]) -> Vec<Vec<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let n = Normalizer::fit(vectors);
    vectors.iter().map(|v| n.apply(v.as_ref())).collect()
}

/// Numeric text formats shared by prompts and duplicate detection.
pub mod wire {
    /// Decision variables: 6 significant digits, trailing zeros trimmed.
    pub fn format_decision(v: f64) -> String {
        if v == 0.0 || !v.is_finite() {
            return python_float(if v.is_finite() { 0.0 } else { v }, 1);
        }
        let magnitude = v.abs().log10().floor() as i32;
        let decimals = (5 - magnitude).clamp(0, 17) as usize;
        python_float(v, decimals)
    }

    /// Objective values: 3 decimal places, trailing zeros trimmed.
    pub fn format_objective(v: f64) -> String {
        python_float(v, 3)
    }

    /// Fixed-decimal rendering with trailing zeros dropped, keeping one
    /// fractional digit (`2.0`, `1.18`, `-0.725`).
    fn python_float(v: f64, decimals: usize) -> String {
        if !v.is_finite() {
            return format!("{v}");
        }
        let mut s = format!("{v:.decimals$}");
        if s.contains('.') {
            while s.ends_with('0') {
                s.pop();
            }
            if s.ends_with('.') {
                s.push('0');
            }
        } else {
            s.push_str(".0");
        }
        if s == "-0.0" {
            s = "0.0".to_string();
        }
        s
    }

    /// Equality key for duplicate and re-observation checks.
    pub fn decision_key(x: &[f64]) -> String {
        x.iter()
            .map(|&v| format_decision(v))
            .collect::<Vec<_>>()
            .join(",")
    }
}
