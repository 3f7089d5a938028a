//! Prompt templates with `$name` placeholders.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LlmError, Result};

/// Placeholders a template may reference.
pub const PLACEHOLDERS: [&str; 8] = [
    "metrics",
    "region_constraints",
    "region_ICL_examples",
    "target_number_of_candidates",
    "candidate_sampler_response_format",
    "target_architectures",
    "surrogate_model_response_format",
    "description",
];

/// Alternative spellings accepted in user-supplied templates.
const ALIASES: [(&str, &str); 3] = [
    ("input_boundaries", "region_constraints"),
    ("ICL_examples", "region_ICL_examples"),
    ("Region_ICL_examples", "region_ICL_examples"),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Context,
    NoContext,
    Minimal,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Context, Variant::NoContext, Variant::Minimal];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Context => "context",
            Variant::NoContext => "no_context",
            Variant::Minimal => "minimal",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = LlmError;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s.replace('-', "_"))
            .ok_or_else(|| LlmError::Template(format!("unknown prompt variant `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Sampler,
    Surrogate,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Sampler => "sampler",
            Role::Surrogate => "surrogate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptTemplate {
    pub body: String,
    pub variant: Variant,
    pub role: Role,
}

impl PromptTemplate {
    /// Checks that every placeholder in `body` is a known one.
    pub fn new(body: impl Into<String>, variant: Variant, role: Role) -> Result<Self> {
        let body = body.into();
        for (name, _) in scan(&body) {
            if canonical(name).is_none() {
                return Err(LlmError::Template(format!("unknown placeholder `${name}`")));
            }
        }
        Ok(Self {
            body,
            variant,
            role,
        })
    }

    /// The template shipped with the crate.
    pub fn builtin(role: Role, variant: Variant) -> Self {
        let body = match (role, variant) {
            (Role::Sampler, Variant::Context) => include_str!("../templates/sampler_context.txt"),
            (Role::Sampler, Variant::NoContext) => {
                include_str!("../templates/sampler_no_context.txt")
            }
            (Role::Sampler, Variant::Minimal) => include_str!("../templates/sampler_minimal.txt"),
            (Role::Surrogate, Variant::Context) => {
                include_str!("../templates/surrogate_context.txt")
            }
            (Role::Surrogate, Variant::NoContext) => {
                include_str!("../templates/surrogate_no_context.txt")
            }
            (Role::Surrogate, Variant::Minimal) => {
                include_str!("../templates/surrogate_minimal.txt")
            }
        };
        Self {
            body: body.to_string(),
            variant,
            role,
        }
    }

    /// `<dir>/<role>_<variant>.txt` when present, otherwise the builtin.
    pub fn load(dir: Option<&Path>, role: Role, variant: Variant) -> Result<Self> {
        if let Some(dir) = dir {
            let path = dir.join(format!("{}_{}.txt", role.name(), variant.name()));
            if path.exists() {
                return Self::new(std::fs::read_to_string(path)?, variant, role);
            }
        }
        Ok(Self::builtin(role, variant))
    }

    /// Canonical names of the placeholders in the body, in first-use order.
    pub fn placeholders(&self) -> Vec<&'static str> {
        let mut out: Vec<&'static str> = Vec::new();
        for (name, _) in scan(&self.body) {
            if let Some(c) = canonical(name) {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
        out
    }
}

fn canonical(name: &str) -> Option<&'static str> {
    PLACEHOLDERS
        .iter()
        .copied()
        .find(|p| *p == name)
        .or_else(|| ALIASES.iter().find(|(a, _)| *a == name).map(|(_, c)| *c))
}

/// `(name, byte offset of '$')` for every `$identifier` in `body`.
fn scan(body: &str) -> Vec<(&str, usize)> {
    let bytes = body.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'$'
            && i + 1 < bytes.len()
            && (bytes[i + 1].is_ascii_alphabetic() || bytes[i + 1] == b'_')
        {
            let start = i + 1;
            let mut end = start;
            while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            out.push((&body[start..end], i));
            i = end;
        } else {
            i += 1;
        }
    }
    out
}

/// Single-pass substitution; substituted text is never rescanned.
///
/// Every placeholder in the template must have a value in `vars`, keyed by
/// canonical name.
pub fn render_prompt(template: &PromptTemplate, vars: &HashMap<&str, String>) -> Result<String> {
    let body = &template.body;
    let mut out = String::with_capacity(body.len() * 2);
    let mut cursor = 0;
    for (name, at) in scan(body) {
        let key = canonical(name)
            .ok_or_else(|| LlmError::Template(format!("unknown placeholder `${name}`")))?;
        let value = vars
            .get(key)
            .ok_or_else(|| LlmError::Template(format!("no value for placeholder `${name}`")))?;
        out.push_str(&body[cursor..at]);
        out.push_str(value);
        cursor = at + 1 + name.len();
    }
    out.push_str(&body[cursor..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(pairs: &[(&'static str, &str)]) -> HashMap<&'static str, String> {
        pairs.iter().map(|(k, v)| (*k, v.to_string())).collect()
    }

    #[test]
    fn builtins_use_known_placeholders() {
        for role in [Role::Sampler, Role::Surrogate] {
            for variant in Variant::ALL {
                let t = PromptTemplate::builtin(role, variant);
                assert!(PromptTemplate::new(t.body.clone(), variant, role).is_ok());
                assert_eq!(
                    t.placeholders().contains(&"description"),
                    variant == Variant::Context
                );
            }
        }
    }

    #[test]
    fn substitution_is_single_pass() {
        let t = PromptTemplate::new("a $metrics b $description", Variant::Context, Role::Sampler)
            .unwrap();
        let out = render_prompt(
            &t,
            &vars(&[("metrics", "$description"), ("description", "D")]),
        )
        .unwrap();
        assert_eq!(out, "a $description b D");
    }

    #[test]
    fn missing_value_is_an_error() {
        let t = PromptTemplate::builtin(Role::Sampler, Variant::Minimal);
        let err = render_prompt(&t, &vars(&[("metrics", "F1")])).unwrap_err();
        assert!(matches!(err, LlmError::Template(_)));
    }

    #[test]
    fn unknown_placeholder_rejected_and_aliases_accepted() {
        assert!(PromptTemplate::new("$nonsense", Variant::Minimal, Role::Sampler).is_err());
        let t = PromptTemplate::new(
            "$Region_ICL_examples|$input_boundaries|$ 5",
            Variant::Minimal,
            Role::Sampler,
        )
        .unwrap();
        let out = render_prompt(
            &t,
            &vars(&[("region_ICL_examples", "E"), ("region_constraints", "C")]),
        )
        .unwrap();
        assert_eq!(out, "E|C|$ 5");
    }

    #[test]
    fn minimal_has_no_problem_description() {
        for role in [Role::Sampler, Role::Surrogate] {
            assert!(!PromptTemplate::builtin(role, Variant::Minimal)
                .body
                .contains("Problem Description"));
            assert!(PromptTemplate::builtin(role, Variant::NoContext)
                .body
                .contains("Problem Description"));
        }
    }

    #[test]
    fn variant_names_round_trip() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert_eq!("no-context".parse::<Variant>().unwrap(), Variant::NoContext);
        assert!("verbose".parse::<Variant>().is_err());
    }
}
