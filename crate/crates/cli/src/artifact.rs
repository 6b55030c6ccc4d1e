//! The emitted artifact: a provenance header, optional summary fields and one table.

use bergman_hs::output::{json_f64, sig17, sig6};
use clap::ValueEnum;
use serde_json::{Map, Value};

const TOOL: &str = "bergman-hs";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    /// Aligned columns with 6 significant digits.
    Table,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Table => "table",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn machine_text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => sig17(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn human_text(&self) -> String {
        match self {
            Cell::Num(v) => sig6(*v),
            other => other.machine_text(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(v) => json_f64(*v),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// Result of one command, before rendering.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(&'static str, Cell)>,
    /// False when a validation or acceptance check failed.
    pub passed: bool,
}

impl Artifact {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Artifact {
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
            passed: true,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Everything echoed ahead of the results.
pub struct Header<'a> {
    pub command: &'a str,
    pub config: &'a [(&'static str, String)],
    pub generated_at: Option<u64>,
}

pub fn render(format: Format, header: &Header<'_>, artifact: &Artifact) -> String {
    match format {
        Format::Json => render_json(header, artifact),
        Format::Csv => render_csv(header, artifact),
        Format::Table => render_table(header, artifact),
    }
}

fn render_json(header: &Header<'_>, artifact: &Artifact) -> String {
    let mut root = Map::new();
    root.insert("tool".into(), Value::from(TOOL));
    root.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    root.insert("command".into(), Value::from(header.command));
    let config: Map<String, Value> = header
        .config
        .iter()
        .map(|(k, v)| (k.to_string(), Value::from(v.as_str())))
        .collect();
    root.insert("config".into(), Value::Object(config));
    if let Some(t) = header.generated_at {
        root.insert("generated_at".into(), Value::from(t));
    }
    if !artifact.summary.is_empty() {
        let summary: Map<String, Value> = artifact
            .summary
            .iter()
            .map(|(k, v)| (k.to_string(), v.json()))
            .collect();
        root.insert("summary".into(), Value::Object(summary));
    }
    let results: Vec<Value> = artifact
        .rows
        .iter()
        .map(|row| {
            Value::Object(
                artifact
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect(),
            )
        })
        .collect();
    root.insert("results".into(), Value::Array(results));
    let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("JSON values serialize");
    text.push('\n');
    text
}

fn comment_header(header: &Header<'_>, artifact: &Artifact, human: bool) -> String {
    let mut out = format!(
        "# {TOOL} {}\n# command: {}\n",
        env!("CARGO_PKG_VERSION"),
        header.command
    );
    for (k, v) in header.config {
        out.push_str(&format!("# config.{k}: {v}\n"));
    }
    if let Some(t) = header.generated_at {
        out.push_str(&format!("# generated_at: {t}\n"));
    }
    for (k, v) in &artifact.summary {
        let text = if human { v.human_text() } else { v.machine_text() };
        out.push_str(&format!("# summary.{k}: {text}\n"));
    }
    out
}

fn render_csv(header: &Header<'_>, artifact: &Artifact) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&artifact.columns).expect("in-memory write");
    for row in &artifact.rows {
        w.write_record(row.iter().map(Cell::machine_text))
            .expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8");
    comment_header(header, artifact, false) + &body
}

fn render_table(header: &Header<'_>, artifact: &Artifact) -> String {
    let cells: Vec<Vec<String>> = artifact
        .rows
        .iter()
        .map(|r| r.iter().map(Cell::human_text).collect())
        .collect();
    let widths: Vec<usize> = artifact
        .columns
        .iter()
        .enumerate()
        .map(|(i, c)| {
            cells
                .iter()
                .map(|r| r[i].chars().count())
                .chain([c.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |items: Vec<&str>| -> String {
        let padded: Vec<String> = items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}", w = *w))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = comment_header(header, artifact, true);
    out.push_str(&line(artifact.columns.clone()));
    for r in &cells {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Vec<(&'static str, String)>, Artifact) {
        let config = vec![("domain", "ellipsoid:1,1".to_string())];
        let mut a = Artifact::new(vec!["gamma", "value"]);
        a.push(vec!["0,0".into(), Cell::Num(1.0 / 3.0)]);
        a.summary.push(("all_passed", true.into()));
        (config, a)
    }

    #[test]
    fn csv_quotes_multi_index_fields() {
        let (config, a) = sample();
        let h = Header {
            command: "norms",
            config: &config,
            generated_at: None,
        };
        let text = render(Format::Csv, &h, &a);
        assert!(text.contains("# config.domain: ellipsoid:1,1\n"));
        assert!(text.ends_with("gamma,value\n\"0,0\",3.3333333333333331e-1\n"));
    }

    #[test]
    fn json_carries_seventeen_digits_and_no_timestamp_when_absent() {
        let (config, a) = sample();
        let h = Header {
            command: "norms",
            config: &config,
            generated_at: None,
        };
        let v: Value = serde_json::from_str(&render(Format::Json, &h, &a)).unwrap();
        assert!(v.get("generated_at").is_none());
        assert_eq!(v["results"][0]["value"].to_string(), "3.3333333333333331e-1");
        assert_eq!(v["summary"]["all_passed"], Value::Bool(true));
    }

    #[test]
    fn table_uses_six_digits() {
        let (config, a) = sample();
        let h = Header {
            command: "norms",
            config: &config,
            generated_at: Some(5),
        };
        let text = render(Format::Table, &h, &a);
        assert!(text.contains("# generated_at: 5\n"));
        assert!(text.contains("0,0    0.333333\n"));
    }
}
