//! Model-backed candidate generator and objective predictor.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;

use mohollm::sampler::{GenerationRequest, Generator, GeneratorKind};
use mohollm::surrogate::{Predictor, PredictorKind};
use mohollm::{DecisionVector, Error, History, ObjectiveVector, Usage};

use crate::client::Completion;
use crate::error::LlmError;
use crate::parse::{parse_candidate_list, parse_prediction_list, Field};
use crate::prompt::PromptBuilder;

fn hard_failure(e: LlmError) -> Error {
    match e {
        LlmError::Template(msg) => Error::InvalidConfig(msg),
        other => Error::GeneratorUnavailable(other.to_string()),
    }
}

/// Asks the model for candidates inside a region. Unparseable replies count
/// as empty proposals so the sampler's retry budget applies.
pub struct LlmGenerator {
    client: Arc<dyn Completion>,
    prompts: Arc<PromptBuilder>,
    schema: Vec<Field>,
}

impl LlmGenerator {
    pub fn new(client: Arc<dyn Completion>, prompts: Arc<PromptBuilder>) -> Self {
        let schema = prompts.variable_names.iter().map(Field::float).collect();
        Self {
            client,
            prompts,
            schema,
        }
    }
}

impl Generator for LlmGenerator {
    fn kind(&self) -> GeneratorKind {
        GeneratorKind::Llm
    }

    fn propose(
        &self,
        request: &GenerationRequest<'_>,
        _rng: &mut ChaCha8Rng,
    ) -> mohollm::Result<Vec<DecisionVector>> {
        let prompt = self
            .prompts
            .sampler_prompt(
                request.region,
                request.history.observations(),
                request.count,
            )
            .map_err(hard_failure)?;
        let (reply, _) = self.client.complete(&prompt).map_err(hard_failure)?;
        Ok(parse_candidate_list(&reply, &self.schema, request.count).unwrap_or_default())
    }

    fn drain_usage(&self) -> Usage {
        self.client.drain_usage()
    }
}

/// Asks the model to predict objectives for the pool. Malformed replies
/// surface as surrogate errors, which the engine retries.
pub struct LlmPredictor {
    client: Arc<dyn Completion>,
    prompts: Arc<PromptBuilder>,
}

impl LlmPredictor {
    pub fn new(client: Arc<dyn Completion>, prompts: Arc<PromptBuilder>) -> Self {
        Self { client, prompts }
    }
}

impl Predictor for LlmPredictor {
    fn kind(&self) -> PredictorKind {
        PredictorKind::Llm
    }

    fn predict(
        &self,
        pool: &[DecisionVector],
        history: &History,
        _rng: &mut ChaCha8Rng,
    ) -> mohollm::Result<Vec<ObjectiveVector>> {
        let prompt = self
            .prompts
            .surrogate_prompt(pool, history.observations())
            .map_err(hard_failure)?;
        let (reply, _) = self.client.complete(&prompt).map_err(hard_failure)?;
        parse_prediction_list(&reply, self.prompts.m, pool.len())
            .map_err(|e| Error::SurrogateResponse(e.to_string()))
    }

    fn drain_usage(&self) -> Usage {
        self.client.drain_usage()
    }
}
