use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::CliError;

pub const VERSION: &str = concat!("borelcalc ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Flat numeric table for CSV output. Every command puts its error
/// estimate in the last column.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (k, x) in row.iter().enumerate() {
                if k > 0 {
                    out.push(',');
                }
                write!(out, "{x:e}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Output of one command before it is written out.
#[derive(Clone, Debug)]
pub struct Report {
    pub results: Value,
    pub diagnostics: Value,
    pub table: Table,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub version: String,
    pub config: Value,
    pub results: Value,
    pub diagnostics: Value,
}

impl Envelope {
    pub fn new(config: Value, report: &Report) -> Self {
        Envelope {
            version: VERSION.to_string(),
            config: strip_nulls(config),
            results: report.results.clone(),
            diagnostics: report.diagnostics.clone(),
        }
    }
}

fn strip_nulls(v: Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(m.into_iter().filter(|(_, v)| !v.is_null()).map(|(k, v)| (k, strip_nulls(v))).collect()),
        other => other,
    }
}

/// Where and how to write a report, from `--out` and `--format`.
///
/// `--out` is `-` (stdout), `json` or `csv` (stdout in that format), or a
/// file path whose extension picks the format when `--format` is absent.
pub fn destination(out: Option<&str>, format: Option<Format>) -> (Option<String>, Format) {
    match out.unwrap_or("-") {
        "-" => (None, format.unwrap_or(Format::Json)),
        "json" => (None, format.unwrap_or(Format::Json)),
        "csv" => (None, format.unwrap_or(Format::Csv)),
        path => {
            let inferred = if path.to_ascii_lowercase().ends_with(".csv") { Format::Csv } else { Format::Json };
            (Some(path.to_string()), format.unwrap_or(inferred))
        }
    }
}

pub fn render(envelope: &Envelope, table: &Table, format: Format) -> Result<String, CliError> {
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(envelope).map_err(|e| CliError::Domain(e.into()))?;
            s.push('\n');
            s
        }
        Format::Csv => table.to_csv(),
    })
}

pub fn emit(text: &str, path: Option<&str>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Domain(e.into())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Domain(e.into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(vec!["t", "re", "im", "error"]);
        assert_eq!(t.to_csv(), "t,re,im,error\n");
    }

    #[test]
    fn csv_values_roundtrip() {
        let mut t = Table::new(vec!["x", "error"]);
        t.push(vec![0.1 + 0.2, 1e-300]);
        let csv = t.to_csv();
        let line = csv.lines().nth(1).unwrap();
        let back: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(back, vec![0.1 + 0.2, 1e-300]);
    }

    #[test]
    fn destination_rules() {
        assert_eq!(destination(None, None), (None, Format::Json));
        assert_eq!(destination(Some("csv"), None), (None, Format::Csv));
        assert_eq!(destination(Some("a/b.CSV"), None), (Some("a/b.CSV".into()), Format::Csv));
        assert_eq!(destination(Some("b.json"), Some(Format::Csv)), (Some("b.json".into()), Format::Csv));
    }

    #[test]
    fn envelope_drops_unset_config_fields() {
        let report = Report { results: json!([1.5]), diagnostics: json!({}), table: Table::default() };
        let env = Envelope::new(json!({"command": "apply", "symbol": "exp", "fn": null}), &report);
        assert_eq!(env.config, json!({"command": "apply", "symbol": "exp"}));
        let text = render(&env, &report.table, Format::Json).unwrap();
        let back: Envelope = serde_json::from_str(&text).unwrap();
        assert_eq!(back, env);
    }
}
