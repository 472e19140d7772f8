use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::LabError;

/// Top level of a config file. `params` is checked against the experiment's own schema.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sieve_cache: Option<PathBuf>,
    #[serde(default)]
    pub params: Value,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Schema(e.to_string()))
    }
}

/// Deserializes `params` into `T`, filling defaults, and returns the resolved value too.
pub fn resolve<T: DeserializeOwned + Serialize>(params: &Value) -> Result<(T, Value), LabError> {
    let v = match params {
        Value::Null => Value::Object(Default::default()),
        v => v.clone(),
    };
    let p: T = serde_json::from_value(v).map_err(|e| LabError::Schema(format!("params: {e}")))?;
    let resolved = serde_json::to_value(&p)?;
    Ok((p, resolved))
}
