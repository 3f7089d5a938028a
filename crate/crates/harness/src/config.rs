//! Run configuration from an optional TOML file plus command-line overrides.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;

use mohollm::engine::local_components;
use mohollm::sampler::{Generator, GeneratorKind};
use mohollm::surrogate::{Predictor, PredictorKind};
use mohollm::{Benchmark, Mode, RunConfig};
use mohollm_llm::{
    ChatClient, ClientConfig, Completion, LlmGenerator, LlmPredictor, PriceTable, PromptBuilder,
    Variant,
};

use crate::HarnessError;

pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1";
pub const DEFAULT_MODEL: &str = "gpt-4o-mini";

fn parse_benchmark(s: &str) -> Result<Benchmark, String> {
    Benchmark::from_name(s).map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    match s {
        "mohollm" => Ok(Mode::Mohollm),
        "global" => Ok(Mode::Global),
        _ => Err(format!("unknown mode `{s}` (expected mohollm or global)")),
    }
}

fn parse_generator(s: &str) -> Result<GeneratorKind, String> {
    match s {
        "llm" => Ok(GeneratorKind::Llm),
        "random" => Ok(GeneratorKind::Random),
        "mock" => Ok(GeneratorKind::Mock),
        _ => Err(format!(
            "unknown generator `{s}` (expected llm, random or mock)"
        )),
    }
}

fn parse_predictor(s: &str) -> Result<PredictorKind, String> {
    match s.replace('_', "-").as_str() {
        "llm" => Ok(PredictorKind::Llm),
        "oracle-mock" => Ok(PredictorKind::OracleMock),
        "none" => Ok(PredictorKind::None),
        _ => Err(format!(
            "unknown predictor `{s}` (expected llm, oracle-mock or none)"
        )),
    }
}

fn parse_variant(s: &str) -> Result<String, String> {
    s.parse::<Variant>()
        .map(|v| v.name().to_string())
        .map_err(|e| e.to_string())
}

/// Flags shared by `run` and the per-job invocations of `sweep`.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with run settings; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_benchmark)]
    pub benchmark: Option<Benchmark>,
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    #[arg(long, value_parser = parse_generator)]
    pub generator: Option<GeneratorKind>,
    #[arg(long, value_parser = parse_predictor)]
    pub predictor: Option<PredictorKind>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub init: Option<usize>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub regions: Option<usize>,
    #[arg(long)]
    pub candidates: Option<usize>,
    #[arg(long)]
    pub m0: Option<usize>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub alpha_max: Option<f64>,
    #[arg(long)]
    pub alpha_min: Option<f64>,
    #[arg(long)]
    pub beta1: Option<f64>,
    #[arg(long)]
    pub beta2: Option<f64>,
    #[arg(long, value_parser = parse_variant)]
    pub prompt_variant: Option<String>,
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Directory of `<role>_<variant>.txt` files replacing the builtin prompts.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// JSON price overrides, `{"model": {"input": .., "output": ..}}` per million tokens.
    #[arg(long)]
    pub prices: Option<PathBuf>,
    /// Output root; the run writes into a subdirectory named after it.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write directly into `--out` instead of a named subdirectory.
    #[arg(long)]
    pub exact_out: bool,
    /// Replace outputs of a previous run in the same directory.
    #[arg(long)]
    pub overwrite: bool,
    /// Disable data-parallel inner loops.
    #[arg(long)]
    pub sequential: bool,
}

/// Reads a run configuration file; unknown keys are rejected.
pub fn load_config_file(path: &Path) -> Result<RunConfig, HarnessError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HarnessError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let table: toml::Table = toml::from_str(&text)
        .map_err(|e| HarnessError::Usage(format!("{}: {e}", path.display())))?;
    config_from_table(table, &path.display().to_string())
}

/// Deserializes a settings table over the defaults; unknown keys are rejected.
pub fn config_from_table(table: toml::Table, origin: &str) -> Result<RunConfig, HarnessError> {
    let bad = |e: String| HarnessError::Usage(format!("{origin}: {e}"));
    let known = serde_json::to_value(RunConfig::default()).expect("config serializes");
    if let Some(key) = table.keys().find(|k| known.get(k.as_str()).is_none()) {
        return Err(bad(format!("unknown key `{key}`")));
    }
    table
        .try_into()
        .map_err(|e: toml::de::Error| bad(e.to_string()))
}

/// Fills model defaults when a model-backed component is used, then validates.
pub fn finalize(mut c: RunConfig) -> Result<RunConfig, HarnessError> {
    if c.generator == GeneratorKind::Llm || c.predictor == PredictorKind::Llm {
        c.endpoint
            .get_or_insert_with(|| DEFAULT_ENDPOINT.to_string());
        c.model.get_or_insert_with(|| DEFAULT_MODEL.to_string());
    }
    parse_variant(&c.prompt_variant).map_err(HarnessError::Usage)?;
    c.validate()
        .map_err(|e| HarnessError::Usage(e.to_string()))?;
    Ok(c)
}

impl RunArgs {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> Result<RunConfig, HarnessError> {
        let mut c = match &self.config {
            Some(path) => load_config_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field.clone() { c.$field = v; })*
            };
        }
        apply!(
            benchmark,
            mode,
            generator,
            predictor,
            seed,
            budget,
            init,
            batch,
            regions,
            candidates,
            m0,
            lambda,
            alpha_max,
            alpha_min,
            beta1,
            beta2,
            prompt_variant,
            temperature
        );
        if self.endpoint.is_some() {
            c.endpoint = self.endpoint.clone();
        }
        if self.model.is_some() {
            c.model = self.model.clone();
        }
        finalize(c)
    }
}

/// Generator and predictor for a run; model-backed ones share one client.
pub struct Wiring {
    pub generator: Box<dyn Generator>,
    pub predictor: Option<Box<dyn Predictor>>,
}

pub fn wire(
    config: &RunConfig,
    templates: Option<&Path>,
    prices: Option<&Path>,
) -> Result<Wiring, HarnessError> {
    let uses_model =
        config.generator == GeneratorKind::Llm || config.predictor == PredictorKind::Llm;
    if !uses_model {
        let (generator, predictor) =
            local_components(config).map_err(|e| HarnessError::Usage(e.to_string()))?;
        return Ok(Wiring {
            generator,
            predictor,
        });
    }
    let prices = match prices {
        Some(p) => PriceTable::with_overrides(p).map_err(|e| HarnessError::Usage(e.to_string()))?,
        None => PriceTable::default(),
    };
    let mut client_config = ClientConfig::new(
        config.endpoint.as_deref().unwrap_or(DEFAULT_ENDPOINT),
        config.model.as_deref().unwrap_or(DEFAULT_MODEL),
    );
    client_config.temperature = config.temperature;
    let client: Arc<dyn Completion> = Arc::new(
        ChatClient::from_env(client_config, prices)
            .map_err(|e| HarnessError::Usage(e.to_string()))?,
    );
    let variant: Variant = config
        .prompt_variant
        .parse()
        .map_err(|e: mohollm_llm::LlmError| HarnessError::Usage(e.to_string()))?;
    let prompts = Arc::new(
        PromptBuilder::new(&config.benchmark.spec(), variant, templates, config.icl_cap)
            .map_err(|e| HarnessError::Usage(e.to_string()))?,
    );
    let local = RunConfig {
        generator: if config.generator == GeneratorKind::Llm {
            GeneratorKind::Random
        } else {
            config.generator
        },
        predictor: if config.predictor == PredictorKind::Llm {
            PredictorKind::None
        } else {
            config.predictor
        },
        ..config.clone()
    };
    let (mut generator, mut predictor) =
        local_components(&local).map_err(|e| HarnessError::Usage(e.to_string()))?;
    if config.generator == GeneratorKind::Llm {
        generator = Box::new(LlmGenerator::new(client.clone(), prompts.clone()));
    }
    if config.predictor == PredictorKind::Llm {
        predictor = Some(Box::new(LlmPredictor::new(client, prompts)));
    }
    Ok(Wiring {
        generator,
        predictor,
    })
}

/// `schaffer_n1_mohollm_random_none_seed0`
pub fn run_name(config: &RunConfig) -> String {
    let mode = match config.mode {
        Mode::Mohollm => "mohollm",
        Mode::Global => "global",
    };
    let generator = match config.generator {
        GeneratorKind::Llm => "llm",
        GeneratorKind::Random => "random",
        GeneratorKind::Mock => "mock",
    };
    let predictor = match config.predictor {
        PredictorKind::Llm => "llm",
        PredictorKind::OracleMock => "oracle_mock",
        PredictorKind::None => "none",
    };
    format!(
        "{}_{mode}_{generator}_{predictor}_seed{}",
        config.benchmark.name(),
        config.seed
    )
}
