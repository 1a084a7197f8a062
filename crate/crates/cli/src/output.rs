//! Result envelopes. Every JSON float is rewritten with 17 significant
//! digits; non-finite values are emitted as `null`.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{Map, Number, Value};

use crate::config::RunConfig;
use crate::error::CliError;

pub const TOOL: &str = "hotqubit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct ResultEnvelope<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub timestamp_unix: u64,
    pub payload: Value,
}

impl<'a> ResultEnvelope<'a> {
    pub fn new<P: Serialize>(
        command: &'a str,
        config: &'a RunConfig,
        payload: &P,
    ) -> Result<Self, CliError> {
        let timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Ok(Self {
            tool: TOOL,
            version: VERSION,
            command,
            config,
            timestamp_unix,
            payload: to_value(payload)?,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let v = to_value(self)?;
        let mut text = serde_json::to_string_pretty(&v)?;
        text.push('\n');
        fs::write(path, text)?;
        Ok(())
    }
}

/// Serializes to a JSON value with normalized float formatting.
pub fn to_value<T: Serialize + ?Sized>(v: &T) -> Result<Value, CliError> {
    let mut v = serde_json::to_value(v)?;
    normalize(&mut v);
    Ok(v)
}

fn normalize(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            *v = n.as_f64().map_or(Value::Null, float);
        }
        Value::Array(a) => a.iter_mut().for_each(normalize),
        Value::Object(o) => o.values_mut().for_each(normalize),
        _ => {}
    }
}

/// A float as a JSON number with 17 significant digits.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    format!("{x:.16e}")
        .parse::<Number>()
        .map_or(Value::Null, Value::Number)
}

/// Map of fitted names to values, preserving order.
pub fn named(pairs: impl IntoIterator<Item = (String, f64)>) -> Value {
    Value::Object(
        pairs
            .into_iter()
            .map(|(k, v)| (k, float(v)))
            .collect::<Map<_, _>>(),
    )
}
