//! Report envelopes and CSV helpers shared by the command-line front end.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Wrapper written around every JSON report.
#[derive(Debug, Clone, Serialize)]
pub struct ReportEnvelope {
    pub analysis: String,
    /// SHA-256 of the inputs (configuration text and flags), hex encoded.
    pub input_digest: String,
    pub parameters: Value,
    pub result: Value,
    /// Known disagreements between reference values and this model.
    pub notes: Vec<String>,
}

pub fn input_digest(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        // length prefix keeps ("ab", "c") and ("a", "bc") apart
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}

impl ReportEnvelope {
    pub fn new(
        analysis: &str,
        digest: String,
        parameters: &impl Serialize,
        result: &impl Serialize,
        notes: Vec<String>,
    ) -> Result<Self> {
        Ok(Self {
            analysis: analysis.to_string(),
            input_digest: digest,
            parameters: serde_json::to_value(parameters)?,
            result: serde_json::to_value(result)?,
            notes,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// CSV text with a header row and numeric rows.
pub fn numeric_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
