//! The optimization loops: partition-guided search and the global baseline
//! that prompts over the whole domain.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::benchmarks::Benchmark;
use crate::domain::{
    pareto_front, wire, Bounds, DecisionVector, History, ObjectiveVector, Observation,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::hypervolume::hv;
use crate::partition::{build_tree, leaf_threshold, LeafSummary};
use crate::sampler::{
    generate_candidates, random_in_region, CandidateProposal, GenerationSettings, Generator,
    GeneratorKind, MockGenerator, RandomGenerator, RegionTask, RejectionStats,
    DEFAULT_RETRY_BUDGET,
};
use crate::scoring::{score_leaves, select_regions, RegionScore, ScoreWeights};
use crate::surrogate::{
    predict, random_batch, select_batch, OraclePredictor, PredictedCandidate, Predictor,
    PredictorKind, PREDICTION_ATTEMPTS,
};
use crate::usage::Usage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Mohollm,
    Global,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub benchmark: Benchmark,
    pub mode: Mode,
    pub generator: GeneratorKind,
    pub predictor: PredictorKind,
    pub seed: u64,
    /// Total true-function evaluations, initial design included.
    pub budget: usize,
    pub init: usize,
    pub batch: usize,
    pub regions: usize,
    pub candidates: usize,
    pub m0: usize,
    pub lambda: f64,
    pub alpha_max: f64,
    pub alpha_min: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub prompt_variant: String,
    pub endpoint: Option<String>,
    pub model: Option<String>,
    pub temperature: f64,
    /// Most recent observations shown to model-backed generators.
    pub icl_cap: usize,
    pub retry_budget: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            benchmark: Benchmark::BraninCurrin,
            mode: Mode::Mohollm,
            generator: GeneratorKind::Random,
            predictor: PredictorKind::None,
            seed: 0,
            budget: 50,
            init: 5,
            batch: 4,
            regions: 5,
            candidates: 5,
            m0: 5,
            lambda: 2.0,
            alpha_max: 1.0,
            alpha_min: 0.01,
            beta1: 0.5,
            beta2: 0.5,
            prompt_variant: "context".to_string(),
            endpoint: None,
            model: None,
            temperature: 1.0,
            icl_cap: 100,
            retry_budget: DEFAULT_RETRY_BUDGET,
        }
    }
}

impl RunConfig {
    pub fn weights(&self) -> ScoreWeights {
        ScoreWeights {
            alpha_max: self.alpha_max,
            alpha_min: self.alpha_min,
            beta1: self.beta1,
            beta2: self.beta2,
            horizon: self.budget.max(1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.init == 0 {
            return fail("init must be at least 1".into());
        }
        if self.batch == 0 || self.regions == 0 || self.candidates == 0 {
            return fail("batch, regions and candidates must be at least 1".into());
        }
        if self.budget < self.init {
            return fail(format!(
                "budget {} is smaller than the initial design {}",
                self.budget, self.init
            ));
        }
        if self.m0 < 2 {
            return fail(format!("m0 must be at least 2, got {}", self.m0));
        }
        if self.lambda.is_nan() || self.lambda < 0.0 {
            return fail(format!("lambda must be non-negative, got {}", self.lambda));
        }
        if self.temperature.is_nan() || self.temperature < 0.0 {
            return fail(format!(
                "temperature must be non-negative, got {}",
                self.temperature
            ));
        }
        self.weights().validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluatedPoint {
    pub x: DecisionVector,
    pub y: ObjectiveVector,
}

/// One line of the run log. Trial 0 is the initial design and carries the
/// run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Cumulative evaluation count after this trial.
    pub evaluations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
    pub leaf_threshold: Option<usize>,
    pub leaves: Vec<LeafSummary>,
    pub scores: Vec<RegionScore>,
    pub alpha_t: Option<f64>,
    pub selected_regions: Vec<usize>,
    pub proposals: Vec<CandidateProposal>,
    pub rejections: RejectionStats,
    pub predictions: Vec<PredictedCandidate>,
    /// Pool indices of the evaluated batch.
    pub batch: Vec<usize>,
    pub evaluated: Vec<EvaluatedPoint>,
    /// Normalized-space front hypervolume used while scoring this trial.
    pub scoring_hv: Option<f64>,
    /// Reporting hypervolume after each evaluation of this trial.
    pub hv_trace: Vec<f64>,
    pub reporting_hv: f64,
    pub icl_divergence: Option<f64>,
    pub usage: Usage,
    /// Fewer accepted candidates than the batch size.
    pub short: bool,
    /// Surrogate failed and the batch was drawn at random.
    pub degraded: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub config: RunConfig,
    pub trials: Vec<TrialRecord>,
    pub history: Vec<Observation>,
    /// Pareto-optimal observations of the final history.
    pub final_front: Vec<Observation>,
}

impl RunRecord {
    pub fn evaluations(&self) -> usize {
        self.history.len()
    }

    pub fn final_hv(&self) -> f64 {
        self.trials.last().map_or(0.0, |t| t.reporting_hv)
    }

    pub fn rejections(&self) -> RejectionStats {
        let mut total = RejectionStats::default();
        for t in &self.trials {
            total += t.rejections;
        }
        total
    }

    pub fn usage(&self) -> Usage {
        self.trials.iter().map(|t| t.usage).sum()
    }
}

/// Receives each trial record as soon as it is complete.
pub trait RecordSink {
    fn record(&mut self, trial: &TrialRecord) -> Result<()>;
}

impl RecordSink for Vec<TrialRecord> {
    fn record(&mut self, trial: &TrialRecord) -> Result<()> {
        self.push(trial.clone());
        Ok(())
    }
}

/// Discards records.
pub struct NullSink;

impl RecordSink for NullSink {
    fn record(&mut self, _trial: &TrialRecord) -> Result<()> {
        Ok(())
    }
}

/// Generator and predictor wiring for a run. A missing predictor selects
/// the batch uniformly at random from the pool.
#[derive(Clone, Copy)]
pub struct Components<'a> {
    pub generator: &'a dyn Generator,
    pub predictor: Option<&'a dyn Predictor>,
    pub exec: Exec,
}

/// Builds the network-free generator and predictor named in `config`.
/// Generator and optional predictor owned by a run.
pub type Boxed = (Box<dyn Generator>, Option<Box<dyn Predictor>>);

pub fn local_components(config: &RunConfig) -> Result<Boxed> {
    let generator: Box<dyn Generator> = match config.generator {
        GeneratorKind::Random => Box::new(RandomGenerator),
        GeneratorKind::Mock => Box::new(MockGenerator::default()),
        GeneratorKind::Llm => {
            return Err(Error::InvalidConfig(
                "the llm generator needs a model client".into(),
            ));
        }
    };
    let predictor: Option<Box<dyn Predictor>> = match config.predictor {
        PredictorKind::None => None,
        PredictorKind::OracleMock => Some(Box::new(OraclePredictor {
            benchmark: config.benchmark,
        })),
        PredictorKind::Llm => {
            return Err(Error::InvalidConfig(
                "the llm predictor needs a model client".into(),
            ));
        }
    };
    Ok((generator, predictor))
}

/// Mean distance from each proposal to its nearest history point, both
/// mapped into the unit hypercube of `domain`. Zero for no proposals.
pub fn icl_divergence<P: AsRef<[f64]>>(proposals: &[P], history: &History, domain: &Bounds) -> f64 {
    if proposals.is_empty() || history.is_empty() {
        return 0.0;
    }
    let seen: Vec<Vec<f64>> = history.iter().map(|o| domain.to_unit(&o.x)).collect();
    let total: f64 = proposals
        .iter()
        .map(|p| {
            let s = domain.to_unit(p.as_ref());
            seen.iter()
                .map(|h| {
                    h.iter()
                        .zip(&s)
                        .map(|(a, b)| (a - b).powi(2))
                        .sum::<f64>()
                        .sqrt()
                })
                .fold(f64::INFINITY, f64::min)
        })
        .sum();
    total / proposals.len() as f64
}

pub fn run(
    config: &RunConfig,
    components: Components<'_>,
    sink: &mut dyn RecordSink,
) -> Result<RunRecord> {
    match config.mode {
        Mode::Mohollm => run_mohollm(config, components, sink),
        Mode::Global => run_global(config, components, sink),
    }
}

pub fn run_mohollm(
    config: &RunConfig,
    components: Components<'_>,
    sink: &mut dyn RecordSink,
) -> Result<RunRecord> {
    Loop::new(config, components)?.execute(Mode::Mohollm, sink)
}

pub fn run_global(
    config: &RunConfig,
    components: Components<'_>,
    sink: &mut dyn RecordSink,
) -> Result<RunRecord> {
    Loop::new(config, components)?.execute(Mode::Global, sink)
}

struct Loop<'a> {
    config: &'a RunConfig,
    components: Components<'a>,
    domain: Bounds,
    reference: Vec<f64>,
    m: usize,
    rng: ChaCha8Rng,
    history: History,
    trials: Vec<TrialRecord>,
}

impl<'a> Loop<'a> {
    fn new(config: &'a RunConfig, components: Components<'a>) -> Result<Self> {
        config.validate()?;
        let spec = config.benchmark.spec();
        Ok(Self {
            config,
            components,
            domain: spec.domain,
            m: spec.m,
            reference: spec.reference_point,
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            history: History::new(),
            trials: Vec::new(),
        })
    }

    fn execute(mut self, mode: Mode, sink: &mut dyn RecordSink) -> Result<RunRecord> {
        self.initial_design(sink)?;
        let mut trial = 1;
        while self.history.len() < self.config.budget {
            let record = self.trial(trial, mode)?;
            sink.record(&record)?;
            self.trials.push(record);
            trial += 1;
        }
        let history = self.history.observations().to_vec();
        let final_front = pareto_front(&self.history)
            .into_iter()
            .map(|i| history[i].clone())
            .collect();
        Ok(RunRecord {
            config: self.config.clone(),
            trials: self.trials,
            history,
            final_front,
        })
    }

    fn initial_design(&mut self, sink: &mut dyn RecordSink) -> Result<()> {
        let mut xs: Vec<DecisionVector> = Vec::with_capacity(self.config.init);
        let mut keys = HashSet::new();
        while xs.len() < self.config.init {
            let x = random_in_region(&self.domain, &mut self.rng);
            if keys.insert(wire::decision_key(&x)) {
                xs.push(x);
            }
        }
        let evaluated = self.evaluate(&xs, 0)?;
        let mut config = self.config.clone();
        config.endpoint = config.endpoint.map(|e| redact_endpoint(&e));
        let record = TrialRecord {
            trial: 0,
            evaluations: self.history.len(),
            config: Some(config),
            leaf_threshold: None,
            leaves: Vec::new(),
            scores: Vec::new(),
            alpha_t: None,
            selected_regions: Vec::new(),
            proposals: Vec::new(),
            rejections: RejectionStats::default(),
            predictions: Vec::new(),
            batch: Vec::new(),
            hv_trace: evaluated.1,
            reporting_hv: self.reporting_hv()?,
            evaluated: evaluated.0,
            scoring_hv: None,
            icl_divergence: None,
            usage: Usage::default(),
            short: false,
            degraded: false,
        };
        sink.record(&record)?;
        self.trials.push(record);
        Ok(())
    }

    fn trial(&mut self, trial: usize, mode: Mode) -> Result<TrialRecord> {
        let config = self.config;
        let t = self.history.len();
        let completed_trials = trial - 1;

        let (m_t, tree) = match mode {
            Mode::Mohollm => {
                let m_t = leaf_threshold(completed_trials, config.m0, config.lambda);
                (
                    Some(m_t),
                    Some(build_tree(&self.history, &self.domain, m_t)?),
                )
            }
            Mode::Global => (None, None),
        };
        let leaves = tree.as_ref().map(|tr| tr.leaves());

        let mut scores = Vec::new();
        let mut alpha_t = None;
        let mut scoring_hv = None;
        let mut selected = Vec::new();
        let all_members: Vec<usize> = (0..self.history.len()).collect();
        let tasks: Vec<RegionTask<'_>> = match &leaves {
            Some(leaves) => {
                let scoring = score_leaves(
                    leaves,
                    &self.history,
                    &self.domain,
                    t,
                    &config.weights(),
                    self.components.exec,
                )?;
                let composites: Vec<f64> = scoring.scores.iter().map(|s| s.composite).collect();
                let k = config.regions.min(leaves.len());
                selected = select_regions(&composites, k, &mut self.rng);
                scores = scoring.scores;
                alpha_t = Some(scoring.alpha_t);
                scoring_hv = Some(scoring.scoring_hv);
                selected
                    .iter()
                    .map(|&j| RegionTask {
                        index: j,
                        bounds: &leaves.leaves[j].bounds,
                        members: &leaves.leaves[j].members,
                    })
                    .collect()
            }
            None => vec![RegionTask {
                index: 0,
                bounds: &self.domain,
                members: &all_members,
            }],
        };

        let settings = GenerationSettings {
            per_region: config.candidates,
            retry_budget: config.retry_budget,
            exec: self.components.exec,
        };
        let generated = generate_candidates(
            &tasks,
            &self.domain,
            &self.history,
            self.components.generator,
            settings,
            &mut self.rng,
        )?;
        let mut pool: Vec<DecisionVector> = generated.accepted().map(|p| p.x.clone()).collect();
        if pool.is_empty() {
            // Every selected region is exhausted; keep the budget moving.
            pool.push(self.fresh_domain_point());
        }
        let icl = icl_divergence(&pool, &self.history, &self.domain);

        let (predictions, batch, degraded) = self.choose_batch(&pool)?;
        let short = pool.len() < config.batch;
        let chosen: Vec<DecisionVector> = batch.iter().map(|&i| pool[i].clone()).collect();
        let (evaluated, hv_trace) = self.evaluate(&chosen, trial)?;

        let mut usage = self.components.generator.drain_usage();
        if let Some(p) = self.components.predictor {
            usage += p.drain_usage();
        }
        Ok(TrialRecord {
            trial,
            evaluations: self.history.len(),
            config: None,
            leaf_threshold: m_t,
            leaves: leaves.map(|l| l.summaries()).unwrap_or_default(),
            scores,
            alpha_t,
            selected_regions: selected,
            proposals: generated.proposals,
            rejections: generated.stats,
            predictions,
            batch,
            evaluated,
            scoring_hv,
            reporting_hv: hv_trace.last().copied().unwrap_or(0.0),
            hv_trace,
            icl_divergence: Some(icl),
            usage,
            short,
            degraded,
        })
    }

    fn fresh_domain_point(&mut self) -> DecisionVector {
        loop {
            let x = random_in_region(&self.domain, &mut self.rng);
            if !self.history.contains_key(&wire::decision_key(&x)) {
                return x;
            }
        }
    }

    fn choose_batch(
        &mut self,
        pool: &[DecisionVector],
    ) -> Result<(Vec<PredictedCandidate>, Vec<usize>, bool)> {
        let b = self.config.batch;
        let Some(predictor) = self.components.predictor else {
            return Ok((
                Vec::new(),
                random_batch(pool.len(), b, &mut self.rng),
                false,
            ));
        };
        for _ in 0..PREDICTION_ATTEMPTS {
            match predict(pool, &self.history, self.m, predictor, &mut self.rng) {
                Ok(predictions) => {
                    let predicted: Vec<&[f64]> = predictions.iter().map(|p| &p.y_hat[..]).collect();
                    let batch = select_batch(&predicted, &self.history.objectives(), b)?;
                    return Ok((predictions, batch, false));
                }
                Err(Error::SurrogateResponse(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        Ok((Vec::new(), random_batch(pool.len(), b, &mut self.rng), true))
    }

    /// Evaluates `xs` (in parallel under [`Exec::Parallel`]) and appends
    /// them to the history in order. Returns the points and the reporting
    /// hypervolume after each one.
    fn evaluate(
        &mut self,
        xs: &[DecisionVector],
        trial: usize,
    ) -> Result<(Vec<EvaluatedPoint>, Vec<f64>)> {
        let seeds: Vec<u64> = xs.iter().map(|_| self.rng.random()).collect();
        let benchmark = self.config.benchmark;
        let ys = self.components.exec.map_range(xs.len(), |i| {
            benchmark.evaluate(&xs[i], &mut ChaCha8Rng::seed_from_u64(seeds[i]))
        });
        let mut points = Vec::with_capacity(xs.len());
        let mut trace = Vec::with_capacity(xs.len());
        for (x, y) in xs.iter().zip(ys) {
            let y = y?;
            self.history.push(Observation {
                x: x.clone(),
                y: y.clone(),
                trial_index: trial,
            })?;
            trace.push(self.reporting_hv()?);
            points.push(EvaluatedPoint { x: x.clone(), y });
        }
        Ok((points, trace))
    }

    fn reporting_hv(&self) -> Result<f64> {
        hv(&self.history.objectives(), &self.reference)
    }
}

/// Strips credentials and query strings from an endpoint URL before it is logged.
fn redact_endpoint(endpoint: &str) -> String {
    let without_query = endpoint.split(['?', '#']).next().unwrap_or_default();
    match without_query.split_once("://") {
        Some((scheme, rest)) => {
            let host_part = rest.rsplit_once('@').map_or(rest, |(_, h)| h);
            format!("{scheme}://{host_part}")
        }
        None => without_query.to_string(),
    }
}
