//! Text encodings shared by every subcommand.

use serde::Serialize;

use crate::error::CliError;

/// Fixed 17-significant-digit scientific form; parses back to the same `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn optional(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

/// Builds a CSV document with LF line endings.
#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn with_header(columns: &[&str]) -> Self {
        let mut csv = Csv::default();
        csv.row(columns.iter().map(|c| c.to_string()));
        csv
    }

    pub fn row(&mut self, fields: impl IntoIterator<Item = String>) {
        let fields: Vec<String> = fields.into_iter().collect();
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Failure(format!("serialization failed: {e}")))?;
    text.push('\n');
    Ok(text)
}
