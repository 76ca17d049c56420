use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::CodeSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstructionRule {
    Standard,
    New,
}

/// On-disk TOML form of a [`CodeSpec`] plus the parameters that produced it.
///
/// ```toml
/// n = 3
/// rate = 0.5
/// rule = "standard"
/// channel = "bec"
/// parameter = 0.5
/// seed = 0
/// info_set = [3, 5, 6, 7]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeSpecFile {
    pub n: usize,
    pub rate: f64,
    pub rule: ConstructionRule,
    /// Design channel: `"bec"` or `"awgn"`.
    pub channel: String,
    /// Erasure probability for `bec`, noise std-dev for `awgn`.
    pub parameter: f64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leaf_threshold: Option<usize>,
    pub info_set: Vec<usize>,
}

impl CodeSpecFile {
    pub fn from_spec(
        spec: &CodeSpec,
        rule: ConstructionRule,
        channel: &str,
        parameter: f64,
        seed: u64,
    ) -> Self {
        CodeSpecFile {
            n: spec.n(),
            rate: spec.rate(),
            rule,
            channel: channel.to_string(),
            parameter,
            seed,
            leaf_threshold: None,
            info_set: spec.info_set().to_vec(),
        }
    }

    /// Validates the record and returns the code it describes.
    pub fn to_spec(&self) -> Result<CodeSpec> {
        let spec = CodeSpec::new(self.n, self.info_set.iter().copied())?;
        let expected = (self.rate * spec.len() as f64).round() as usize;
        if expected != spec.k() {
            return Err(Error::Parse {
                what: "code spec",
                detail: format!(
                    "rate {} implies K = {expected} but info_set has {} entries",
                    self.rate,
                    spec.k()
                ),
            });
        }
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("code spec serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            what: "code spec",
            detail: e.to_string(),
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }
}
