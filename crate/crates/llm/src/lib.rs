//! Language-model candidate generation and objective prediction for the
//! `mohollm` optimizer: prompt templates, an OpenAI-compatible
//! chat-completion client, reply parsing and token cost accounting.

pub mod agents;
pub mod client;
pub mod error;
pub mod parse;
pub mod pricing;
pub mod prompt;
pub mod template;

pub use agents::{LlmGenerator, LlmPredictor};
pub use client::{ChatClient, ClientConfig, Completion};
pub use error::{LlmError, Result};
pub use pricing::PriceTable;
pub use prompt::PromptBuilder;
pub use template::{render_prompt, PromptTemplate, Role, Variant};
