//! Per-model token prices in dollars per million tokens.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LlmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Price {
    pub input: f64,
    pub output: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PriceTable {
    /// Lowercase model name to price.
    pub models: BTreeMap<String, Price>,
}

impl Default for PriceTable {
    fn default() -> Self {
        let rows = [
            ("gemini-2.0-flash", 0.10, 0.40),
            ("gemma-2-2b", 0.10, 0.10),
            ("gemma-2-9b", 0.10, 0.10),
            ("gpt-4o-mini", 0.15, 0.60),
            ("gpt-oss-120b", 0.60, 0.60),
            ("llama-3.1-8b", 0.10, 0.10),
            ("llama-3.3-70b", 0.60, 0.60),
            ("qwen3-32b", 0.60, 0.60),
        ];
        Self {
            models: rows
                .into_iter()
                .map(|(name, input, output)| (name.to_string(), Price { input, output }))
                .collect(),
        }
    }
}

impl PriceTable {
    /// Defaults with entries from a JSON object `{"model": {"input": .., "output": ..}}` layered on top.
    pub fn with_overrides(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let extra: BTreeMap<String, Price> = serde_json::from_str(&text)
            .map_err(|e| LlmError::Payload(format!("price table {}: {e}", path.display())))?;
        let mut table = Self::default();
        table
            .models
            .extend(extra.into_iter().map(|(k, v)| (k.to_lowercase(), v)));
        Ok(table)
    }

    /// Exact name match, else the longest known name contained in `model`
    /// (so `meta-llama/Llama-3.3-70B-Instruct` prices as `llama-3.3-70b`).
    pub fn lookup(&self, model: &str) -> Option<Price> {
        let model = model.to_lowercase();
        self.models.get(&model).copied().or_else(|| {
            self.models
                .iter()
                .filter(|(name, _)| model.contains(name.as_str()))
                .max_by_key(|(name, _)| name.len())
                .map(|(_, p)| *p)
        })
    }

    /// Dollar cost of a request; unknown models cost nothing.
    pub fn cost(&self, model: &str, prompt_tokens: u64, completion_tokens: u64) -> f64 {
        self.lookup(model).map_or(0.0, |p| {
            (prompt_tokens as f64 * p.input + completion_tokens as f64 * p.output) / 1_000_000.0
        })
    }
}
