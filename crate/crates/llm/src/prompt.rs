//! Prompt variables rendered from optimizer state.

use std::collections::HashMap;
use std::path::Path;

use mohollm::domain::wire::{format_decision, format_objective};
use mohollm::{BenchmarkSpec, Bounds, DecisionVector, Observation};

use crate::error::Result;
use crate::template::{render_prompt, PromptTemplate, Role, Variant};

/// Default number of history observations shown to the model.
pub const DEFAULT_ICL_CAP: usize = 100;

/// `F1 (lower is better), F2 (lower is better), ...`
pub fn metrics(m: usize) -> String {
    (1..=m)
        .map(|k| format!("F{k} (lower is better)"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// One `name: range(float([lo, hi]))` line per variable, braced.
pub fn format_constraints(names: &[String], region: &Bounds) -> String {
    let lines: Vec<String> = names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            format!(
                "  {n}: range(float([{}, {}]))",
                format_decision(region.lower[i]),
                format_decision(region.upper[i])
            )
        })
        .collect();
    format!("{{\n{}\n}}", lines.join(",\n"))
}

/// `{"x": -3.142, "y": -0.725}`
pub fn format_configuration(names: &[String], x: &[f64]) -> String {
    let fields: Vec<String> = names
        .iter()
        .zip(x)
        .map(|(n, v)| {
            format!(
                "{}: {}",
                serde_json::Value::String(n.clone()),
                format_decision(*v)
            )
        })
        .collect();
    format!("{{{}}}", fields.join(", "))
}

/// `F1: 13.327, F2: 0.096`
pub fn format_objectives(y: &[f64]) -> String {
    y.iter()
        .enumerate()
        .map(|(k, v)| format!("F{}: {}", k + 1, format_objective(*v)))
        .collect::<Vec<_>>()
        .join(", ")
}

/// The `cap` most recent observations in chronological order, each
/// followed by a blank line.
pub fn format_icl_examples(names: &[String], history: &[Observation], cap: usize) -> String {
    let start = history.len().saturating_sub(cap);
    history[start..]
        .iter()
        .map(|o| {
            format!(
                "Configuration: {}\n{}\n\n",
                format_configuration(names, &o.x),
                format_objectives(&o.y)
            )
        })
        .collect()
}

/// `1: {'x': -2.742, 'y': 0.474}` per candidate, newline separated.
pub fn format_candidates(names: &[String], pool: &[DecisionVector]) -> String {
    pool.iter()
        .enumerate()
        .map(|(i, x)| {
            let fields: Vec<String> = names
                .iter()
                .zip(&x.0)
                .map(|(n, v)| format!("'{n}': {}", format_decision(*v)))
                .collect();
            format!("{}: {{{}}}", i + 1, fields.join(", "))
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// `{"x": $x, "y": $y}`
pub fn sampler_response_format(names: &[String]) -> String {
    let fields: Vec<String> = names.iter().map(|n| format!("\"{n}\": ${n}")).collect();
    format!("{{{}}}", fields.join(", "))
}

/// `{"F1": $F1, "F2": $F2}`
pub fn surrogate_response_format(m: usize) -> String {
    let fields: Vec<String> = (1..=m).map(|k| format!("\"F{k}\": $F{k}")).collect();
    format!("{{{}}}", fields.join(", "))
}

/// Problem context followed by a blank line, or nothing.
pub fn description_block(description: Option<&str>) -> String {
    description.map(|d| format!("{d}\n\n")).unwrap_or_default()
}

/// Renders sampler and surrogate prompts for one benchmark.
#[derive(Debug, Clone)]
pub struct PromptBuilder {
    pub sampler: PromptTemplate,
    pub surrogate: PromptTemplate,
    pub variable_names: Vec<String>,
    pub m: usize,
    pub description: Option<String>,
    pub icl_cap: usize,
}

impl PromptBuilder {
    pub fn new(
        spec: &BenchmarkSpec,
        variant: Variant,
        template_dir: Option<&Path>,
        icl_cap: usize,
    ) -> Result<Self> {
        Ok(Self {
            sampler: PromptTemplate::load(template_dir, Role::Sampler, variant)?,
            surrogate: PromptTemplate::load(template_dir, Role::Surrogate, variant)?,
            variable_names: spec.variable_names.clone(),
            m: spec.m,
            description: spec.description.map(str::to_string),
            icl_cap,
        })
    }

    fn common(&self, history: &[Observation]) -> HashMap<&'static str, String> {
        HashMap::from([
            ("metrics", metrics(self.m)),
            (
                "description",
                description_block(self.description.as_deref()),
            ),
            (
                "region_ICL_examples",
                format_icl_examples(&self.variable_names, history, self.icl_cap),
            ),
        ])
    }

    pub fn sampler_prompt(
        &self,
        region: &Bounds,
        history: &[Observation],
        count: usize,
    ) -> Result<String> {
        let mut vars = self.common(history);
        vars.insert(
            "region_constraints",
            format_constraints(&self.variable_names, region),
        );
        vars.insert("target_number_of_candidates", count.to_string());
        vars.insert(
            "candidate_sampler_response_format",
            sampler_response_format(&self.variable_names),
        );
        render_prompt(&self.sampler, &vars)
    }

    pub fn surrogate_prompt(
        &self,
        pool: &[DecisionVector],
        history: &[Observation],
    ) -> Result<String> {
        let mut vars = self.common(history);
        vars.insert(
            "target_architectures",
            format_candidates(&self.variable_names, pool),
        );
        vars.insert(
            "surrogate_model_response_format",
            surrogate_response_format(self.m),
        );
        render_prompt(&self.surrogate, &vars)
    }
}
