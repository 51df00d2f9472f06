use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorrelatedCode, Permutation};
use crate::error::{Error, Result};

/// JSON description of a correlated code: the base codebook CSV, the
/// channel spec its decoder uses, and the weighted permutations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelatedManifest {
    pub base_code: String,
    pub channel_spec: String,
    pub delta: f64,
    pub permutations: Vec<Permutation>,
    pub weights: Vec<f64>,
}

impl CorrelatedManifest {
    pub fn from_code(cc: &CorrelatedCode, base_code: impl Into<String>, channel_spec: impl Into<String>) -> Self {
        Self {
            base_code: base_code.into(),
            channel_spec: channel_spec.into(),
            delta: cc.base.params().delta,
            permutations: cc.perms.clone(),
            weights: cc.weights.probs().to_vec(),
        }
    }

    /// Pretty JSON with each permutation on a single line.
    pub fn to_json_string(&self) -> Result<String> {
        let mut s = String::from("{\n");
        s += &format!("  \"base_code\": {},\n", serde_json::to_string(&self.base_code)?);
        s += &format!("  \"channel_spec\": {},\n", serde_json::to_string(&self.channel_spec)?);
        s += &format!("  \"delta\": {},\n", serde_json::to_string(&self.delta)?);
        s += "  \"permutations\": [\n";
        let lines: Vec<String> =
            self.permutations.iter().map(|p| serde_json::to_string(p).map(|l| format!("    {l}"))).collect::<std::result::Result<_, _>>()?;
        s += &lines.join(",\n");
        s += "\n  ],\n";
        s += &format!("  \"weights\": {}\n}}\n", serde_json::to_string(&self.weights)?);
        Ok(s)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text).map_err(|e| Error::SpecFile(format!("manifest: {e}")))?;
        if m.permutations.len() != m.weights.len() {
            return Err(Error::SpecFile("manifest: permutations and weights differ in length".into()));
        }
        Ok(m)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}
