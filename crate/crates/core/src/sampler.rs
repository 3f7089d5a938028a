//! Candidate generation inside selected regions: the generator interface,
//! proposal validation, rejection accounting and the bounded retry loop.

use std::collections::{HashSet, VecDeque};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{wire, Bounds, DecisionVector, History};
use crate::error::Result;
use crate::exec::Exec;
use crate::usage::Usage;

/// Default number of regeneration rounds per region before falling back to
/// uniform in-region sampling.
pub const DEFAULT_RETRY_BUDGET: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    Llm,
    Random,
    Mock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalStatus {
    Accepted,
    Duplicate,
    Reobserved,
    OutOfRegion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateProposal {
    pub x: DecisionVector,
    /// Position of the source region in the trial's leaf list.
    pub source_region: usize,
    pub generator: GeneratorKind,
    pub status: ProposalStatus,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectionStats {
    pub proposed: usize,
    pub duplicate: usize,
    pub reobserved: usize,
    pub out_of_region: usize,
}

impl RejectionStats {
    pub fn accepted(&self) -> usize {
        self.proposed - self.duplicate - self.reobserved - self.out_of_region
    }

    pub fn record(&mut self, status: ProposalStatus) {
        self.proposed += 1;
        match status {
            ProposalStatus::Accepted => {}
            ProposalStatus::Duplicate => self.duplicate += 1,
            ProposalStatus::Reobserved => self.reobserved += 1,
            ProposalStatus::OutOfRegion => self.out_of_region += 1,
        }
    }
}

impl std::ops::AddAssign for RejectionStats {
    fn add_assign(&mut self, rhs: Self) {
        self.proposed += rhs.proposed;
        self.duplicate += rhs.duplicate;
        self.reobserved += rhs.reobserved;
        self.out_of_region += rhs.out_of_region;
    }
}

/// What a generator sees when asked for candidates.
#[derive(Debug, Clone, Copy)]
pub struct GenerationRequest<'a> {
    pub region: &'a Bounds,
    pub domain: &'a Bounds,
    pub history: &'a History,
    /// History indices lying in the region.
    pub region_members: &'a [usize],
    pub count: usize,
}

/// Source of candidate decision vectors.
///
/// Implementations may return fewer or more vectors than requested and may
/// ignore the region; every proposal is validated by the caller. Only
/// unrecoverable transport failures should surface as errors.
pub trait Generator: Send + Sync {
    fn kind(&self) -> GeneratorKind;

    fn propose(
        &self,
        request: &GenerationRequest<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<DecisionVector>>;

    /// Usage accumulated since the previous call.
    fn drain_usage(&self) -> Usage {
        Usage::default()
    }
}

/// Uniform sample over the box; degenerate sides yield their fixed value.
pub fn random_in_region<R: Rng + ?Sized>(region: &Bounds, rng: &mut R) -> DecisionVector {
    DecisionVector(
        region
            .lower
            .iter()
            .zip(&region.upper)
            .map(|(&l, &u)| if u > l { rng.random_range(l..=u) } else { l })
            .collect(),
    )
}

/// Uniform proposals inside the requested region.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomGenerator;

impl Generator for RandomGenerator {
    fn kind(&self) -> GeneratorKind {
        GeneratorKind::Random
    }

    fn propose(
        &self,
        request: &GenerationRequest<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<DecisionVector>> {
        Ok((0..request.count)
            .map(|_| random_in_region(request.region, rng))
            .collect())
    }
}

/// Deterministic stand-in for a model-backed generator: perturbs observed
/// points of the region and occasionally strays outside it, so runs exercise
/// every validation path without network access.
#[derive(Debug, Clone, Copy)]
pub struct MockGenerator {
    /// Jitter scale as a fraction of the region's side length.
    pub jitter: f64,
    /// Probability that a proposal is drawn from the whole domain instead.
    pub stray_probability: f64,
}

impl Default for MockGenerator {
    fn default() -> Self {
        Self {
            jitter: 0.25,
            stray_probability: 0.1,
        }
    }
}

impl Generator for MockGenerator {
    fn kind(&self) -> GeneratorKind {
        GeneratorKind::Mock
    }

    fn propose(
        &self,
        request: &GenerationRequest<'_>,
        rng: &mut ChaCha8Rng,
    ) -> Result<Vec<DecisionVector>> {
        let region = request.region;
        let proposals = (0..request.count)
            .map(|_| {
                if rng.random::<f64>() < self.stray_probability {
                    return random_in_region(request.domain, rng);
                }
                if request.region_members.is_empty() {
                    return random_in_region(region, rng);
                }
                let anchor = &request.history.observations()
                    [request.region_members[rng.random_range(0..request.region_members.len())]]
                .x;
                DecisionVector(
                    anchor
                        .iter()
                        .enumerate()
                        .map(|(i, &v)| {
                            v + self.jitter * region.width(i) * (2.0 * rng.random::<f64>() - 1.0)
                        })
                        .collect(),
                )
            })
            .collect();
        Ok(proposals)
    }
}

/// Replays canned responses in order, then returns nothing.
#[derive(Debug, Default)]
pub struct ScriptedGenerator {
    responses: Mutex<VecDeque<Vec<DecisionVector>>>,
}

impl ScriptedGenerator {
    pub fn new<I, V>(responses: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: IntoIterator<Item = Vec<f64>>,
    {
        let responses = responses
            .into_iter()
            .map(|r| r.into_iter().map(DecisionVector).collect())
            .collect();
        Self {
            responses: Mutex::new(responses),
        }
    }

    pub fn remaining(&self) -> usize {
        self.responses.lock().unwrap().len()
    }
}

impl Generator for ScriptedGenerator {
    fn kind(&self) -> GeneratorKind {
        GeneratorKind::Mock
    }

    fn propose(
        &self,
        _request: &GenerationRequest<'_>,
        _rng: &mut ChaCha8Rng,
    ) -> Result<Vec<DecisionVector>> {
        Ok(self
            .responses
            .lock()
            .unwrap()
            .pop_front()
            .unwrap_or_default())
    }
}

/// Classifies a proposal. Precedence: out-of-region, reobserved, duplicate.
/// `batch` holds wire keys of proposals already accepted this trial.
pub fn validate(
    x: &[f64],
    region: &Bounds,
    history: &History,
    batch: &HashSet<String>,
) -> ProposalStatus {
    if !region.contains(x) {
        return ProposalStatus::OutOfRegion;
    }
    let key = wire::decision_key(x);
    if history.contains_key(&key) {
        ProposalStatus::Reobserved
    } else if batch.contains(&key) {
        ProposalStatus::Duplicate
    } else {
        ProposalStatus::Accepted
    }
}

/// One region's share of a generation round.
#[derive(Debug, Clone, Copy)]
pub struct RegionTask<'a> {
    pub index: usize,
    pub bounds: &'a Bounds,
    pub members: &'a [usize],
}

/// Outcome of candidate generation over a trial's selected regions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Generated {
    /// Every proposal in validation order, with its status.
    pub proposals: Vec<CandidateProposal>,
    pub stats: RejectionStats,
}

impl Generated {
    pub fn accepted(&self) -> impl Iterator<Item = &CandidateProposal> {
        self.proposals
            .iter()
            .filter(|p| p.status == ProposalStatus::Accepted)
    }
}

/// Settings for [`generate_candidates`].
#[derive(Debug, Clone, Copy)]
pub struct GenerationSettings {
    pub per_region: usize,
    pub retry_budget: usize,
    pub exec: Exec,
}

/// Random fallback draws allowed per missing slot before giving up on a
/// region that cannot hold a fresh point.
const FALLBACK_ATTEMPTS: usize = 64;

/// Collects up to `per_region` accepted proposals from each region.
///
/// First-round generator calls fan out across regions; validation happens
/// in region order against one shared batch, followed by up to
/// `retry_budget` regeneration rounds per region and a uniform in-region
/// fallback for any slots still empty.
pub fn generate_candidates(
    regions: &[RegionTask<'_>],
    domain: &Bounds,
    history: &History,
    generator: &dyn Generator,
    settings: GenerationSettings,
    rng: &mut ChaCha8Rng,
) -> Result<Generated> {
    let n = settings.per_region;
    let mut region_rngs: Vec<ChaCha8Rng> = regions
        .iter()
        .map(|_| ChaCha8Rng::seed_from_u64(rng.random()))
        .collect();
    let ask = |task: &RegionTask<'_>, count: usize, rng: &mut ChaCha8Rng| {
        let request = GenerationRequest {
            region: task.bounds,
            domain,
            history,
            region_members: task.members,
            count,
        };
        generator.propose(&request, rng)
    };

    let seeds: Vec<u64> = region_rngs.iter_mut().map(|r| r.random()).collect();
    let first_round = settings.exec.map_range(regions.len(), |j| {
        ask(&regions[j], n, &mut ChaCha8Rng::seed_from_u64(seeds[j]))
    });

    let mut out = Generated::default();
    let mut batch: HashSet<String> = HashSet::new();
    let admit = |out: &mut Generated,
                 batch: &mut HashSet<String>,
                 task: &RegionTask<'_>,
                 x: DecisionVector,
                 kind| {
        let status = validate(&x, task.bounds, history, batch);
        if status == ProposalStatus::Accepted {
            batch.insert(wire::decision_key(&x));
        }
        out.stats.record(status);
        out.proposals.push(CandidateProposal {
            x,
            source_region: task.index,
            generator: kind,
            status,
        });
        status == ProposalStatus::Accepted
    };

    for ((task, first), local_rng) in regions.iter().zip(first_round).zip(region_rngs.iter_mut()) {
        let mut accepted = 0;
        let mut pending = first?;
        let mut round = 0;
        loop {
            for x in pending.into_iter().take(n - accepted) {
                if admit(&mut out, &mut batch, task, x, generator.kind()) {
                    accepted += 1;
                }
            }
            if accepted == n || round == settings.retry_budget {
                break;
            }
            round += 1;
            pending = ask(task, n - accepted, local_rng)?;
        }
        let mut attempts = 0;
        while accepted < n && attempts < FALLBACK_ATTEMPTS * n {
            attempts += 1;
            let x = random_in_region(task.bounds, local_rng);
            if admit(&mut out, &mut batch, task, x, GeneratorKind::Random) {
                accepted += 1;
            }
        }
    }
    Ok(out)
}
