//! JSON channel-spec files:
//! `{"A": 2, "B": ["0","1"], "C": 2, "states": [{"name": "s0", "W": [[..]], "V": [[..]]}]}`
//! with an optional `"compound"` list of legitimate matrices.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AvwcSpec, CavwcSpec};
use crate::error::{Error, Result};
use crate::prob::Channel;

/// An alphabet given either by its size or by its letter labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Alphabet {
    Size(usize),
    Labels(Vec<String>),
}

impl Alphabet {
    pub fn size(&self) -> usize {
        match self {
            Alphabet::Size(n) => *n,
            Alphabet::Labels(l) => l.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateEntry {
    pub name: String,
    #[serde(rename = "W")]
    pub w: Vec<Vec<f64>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<f64>>,
}

/// Raw file contents, before validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(rename = "A")]
    pub a: Alphabet,
    #[serde(rename = "B")]
    pub b: Alphabet,
    #[serde(rename = "C")]
    pub c: Alphabet,
    pub states: Vec<StateEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compound: Option<Vec<Vec<Vec<f64>>>>,
}

/// A validated spec file.
#[derive(Clone, Debug, PartialEq)]
pub struct SpecDocument {
    pub avwc: AvwcSpec,
    pub names: Vec<String>,
    pub compound: Option<Vec<Channel>>,
    pub raw: SpecFile,
}

fn matrix(rows: &[Vec<f64>], inputs: usize, outputs: usize, what: &str) -> Result<Channel> {
    if rows.len() != inputs {
        return Err(Error::SpecFile(format!("{what}: {} rows, expected {inputs}", rows.len())));
    }
    for (a, row) in rows.iter().enumerate() {
        if row.len() != outputs {
            return Err(Error::SpecFile(format!(
                "{what}: row {a} has {} entries, expected {outputs}",
                row.len()
            )));
        }
    }
    Channel::new(rows.to_vec()).map_err(|e| Error::SpecFile(format!("{what}: {e}")))
}

impl SpecFile {
    pub fn validate(self) -> Result<SpecDocument> {
        let (na, nb, nc) = (self.a.size(), self.b.size(), self.c.size());
        if na == 0 || nb == 0 || nc == 0 {
            return Err(Error::SpecFile("alphabets must be non-empty".into()));
        }
        if self.states.is_empty() {
            return Err(Error::SpecFile("no states".into()));
        }
        let mut legit = Vec::new();
        let mut eaves = Vec::new();
        for st in &self.states {
            legit.push(matrix(&st.w, na, nb, &format!("state '{}' W", st.name))?);
            eaves.push(matrix(&st.v, na, nc, &format!("state '{}' V", st.name))?);
        }
        let compound = match &self.compound {
            None => None,
            Some(list) if list.is_empty() => return Err(Error::SpecFile("empty compound list".into())),
            Some(list) => Some(
                list.iter()
                    .enumerate()
                    .map(|(i, m)| matrix(m, na, nb, &format!("compound[{i}]")))
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        Ok(SpecDocument {
            avwc: AvwcSpec::new(legit, eaves)?,
            names: self.states.iter().map(|s| s.name.clone()).collect(),
            compound,
            raw: self,
        })
    }
}

impl SpecDocument {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let raw: SpecFile = serde_json::from_str(text).map_err(|e| Error::SpecFile(e.to_string()))?;
        raw.validate()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text).map_err(|e| match e {
            Error::SpecFile(m) => Error::SpecFile(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Builds a document from an in-memory spec with default names.
    pub fn from_avwc(avwc: &AvwcSpec) -> Self {
        let rows = |c: &Channel| c.rows().map(<[f64]>::to_vec).collect::<Vec<_>>();
        let states = avwc
            .legit()
            .iter()
            .zip(avwc.eaves())
            .enumerate()
            .map(|(i, (w, v))| StateEntry { name: format!("s{i}"), w: rows(w), v: rows(v) })
            .collect();
        let raw = SpecFile {
            a: Alphabet::Size(avwc.input_size()),
            b: Alphabet::Size(avwc.legit_output_size()),
            c: Alphabet::Size(avwc.eaves_output_size()),
            states,
            compound: None,
        };
        raw.validate().expect("valid by construction")
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.raw)?)
    }

    /// The compound list if present, otherwise the legitimate state family.
    pub fn cavwc(&self) -> CavwcSpec {
        match &self.compound {
            Some(c) => CavwcSpec::new(c.clone(), self.avwc.eaves().to_vec()).expect("validated"),
            None => self.avwc.as_cavwc(),
        }
    }
}
