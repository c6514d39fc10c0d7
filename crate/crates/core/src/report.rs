//! Shared pieces of the machine-readable reports.

use serde::Serialize;

/// Serializes exact integers as decimal strings.
pub mod decimal {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u128, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u128, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Like [`decimal`] for `Vec<u128>`.
pub mod decimal_vec {
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &[u128], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}

/// One named pass/fail line of a verification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<serde_json::Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: serde_json::Value) -> Self {
        Self { name: name.into(), passed, detail, counterexample: None }
    }

    pub fn with_counterexample(mut self, ce: Option<serde_json::Value>) -> Self {
        self.counterexample = ce;
        self
    }
}
