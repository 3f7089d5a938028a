//! Extraction of JSON lists from free-form model replies.

use std::ops::Range;

use serde_json::{Map, Value};

use mohollm::{DecisionVector, ObjectiveVector};

use crate::error::{LlmError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Float,
    /// Integral numbers only.
    Int,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    pub name: String,
    pub kind: FieldKind,
}

impl Field {
    pub fn float(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            kind: FieldKind::Float,
        }
    }
}

fn parse_error(message: impl Into<String>, span: Range<usize>) -> LlmError {
    LlmError::Parse {
        message: message.into(),
        span,
    }
}

/// The first `[` in `text` that starts a well-formed JSON array, with the
/// array's byte span. Prose, markdown fences and malformed brackets before
/// it are skipped.
pub fn first_json_array(text: &str) -> Result<(Vec<Value>, Range<usize>)> {
    let mut first_failure: Option<(String, usize)> = None;
    for (start, _) in text.match_indices('[') {
        let mut stream = serde_json::Deserializer::from_str(&text[start..]).into_iter::<Value>();
        match stream.next() {
            Some(Ok(Value::Array(items))) => {
                let end = start + stream.byte_offset();
                return Ok((items, start..end));
            }
            Some(Err(e)) if first_failure.is_none() => first_failure = Some((e.to_string(), start)),
            _ => {}
        }
    }
    Err(match first_failure {
        Some((message, start)) => parse_error(
            format!("no well-formed JSON array ({message})"),
            start..text.len(),
        ),
        None => parse_error("no JSON array found", 0..text.len()),
    })
}

fn object_fields<'a>(
    item: &'a Value,
    index: usize,
    span: &Range<usize>,
) -> Result<&'a Map<String, Value>> {
    item.as_object().ok_or_else(|| {
        parse_error(
            format!("element {index} is not an object: {item}"),
            span.clone(),
        )
    })
}

fn number(value: &Value, field: &str, index: usize, span: &Range<usize>) -> Result<f64> {
    value.as_f64().filter(|v| v.is_finite()).ok_or_else(|| {
        parse_error(
            format!("element {index}: field `{field}` is not a number: {value}"),
            span.clone(),
        )
    })
}

/// Keys of `object` must equal `expected` as a set.
fn check_keys(
    object: &Map<String, Value>,
    expected: &[&str],
    index: usize,
    span: &Range<usize>,
) -> Result<()> {
    let unexpected: Vec<&String> = object
        .keys()
        .filter(|k| !expected.contains(&k.as_str()))
        .collect();
    let missing: Vec<&&str> = expected
        .iter()
        .filter(|k| !object.contains_key(**k))
        .collect();
    if unexpected.is_empty() && missing.is_empty() {
        Ok(())
    } else {
        Err(parse_error(
            format!(
                "element {index}: unexpected fields {unexpected:?}, missing fields {missing:?}"
            ),
            span.clone(),
        ))
    }
}

/// Decision vectors in schema field order. Fewer than `expected` elements
/// are accepted; extra elements are dropped.
pub fn parse_candidate_list(
    text: &str,
    schema: &[Field],
    expected: usize,
) -> Result<Vec<DecisionVector>> {
    let (items, span) = first_json_array(text)?;
    let names: Vec<&str> = schema.iter().map(|f| f.name.as_str()).collect();
    let mut out = Vec::with_capacity(items.len().min(expected));
    for (index, item) in items.iter().enumerate().take(expected) {
        let object = object_fields(item, index, &span)?;
        check_keys(object, &names, index, &span)?;
        let mut x = Vec::with_capacity(schema.len());
        for field in schema {
            let v = number(&object[&field.name], &field.name, index, &span)?;
            if field.kind == FieldKind::Int && v.fract() != 0.0 {
                return Err(parse_error(
                    format!("element {index}: field `{}` is not an integer", field.name),
                    span,
                ));
            }
            x.push(v);
        }
        out.push(DecisionVector(x));
    }
    Ok(out)
}

/// Objective vectors keyed `F1..FM`; the count must equal `expected`.
pub fn parse_prediction_list(
    text: &str,
    m: usize,
    expected: usize,
) -> Result<Vec<ObjectiveVector>> {
    let (items, span) = first_json_array(text)?;
    if items.len() != expected {
        return Err(parse_error(
            format!("expected {expected} predictions, got {}", items.len()),
            span,
        ));
    }
    let keys: Vec<String> = (1..=m).map(|k| format!("F{k}")).collect();
    let names: Vec<&str> = keys.iter().map(String::as_str).collect();
    items
        .iter()
        .enumerate()
        .map(|(index, item)| {
            let object = object_fields(item, index, &span)?;
            check_keys(object, &names, index, &span)?;
            let y = names
                .iter()
                .map(|k| number(&object[*k], k, index, &span))
                .collect::<Result<Vec<f64>>>()?;
            Ok(ObjectiveVector(y))
        })
        .collect()
}
