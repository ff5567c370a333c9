//! Tabular artifacts with deterministic CSV and JSON emission.
//!
//! Every float is rendered once through [`fmt_num`] (12 significant
//! digits); the JSON emission stores the value reparsed from that string,
//! so both formats carry bit-identical numbers.

use std::io::Write;
use std::path::Path;

use serde_json::json;

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<i32> for Cell {
    fn from(v: i32) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// One output artifact: `# key = value` echo lines, a column header and
/// data rows.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
    }
}

/// 12 significant digits, scientific; the one formatting used everywhere.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.11e}")
}

/// The exact numeric value an emitted cell carries after rounding.
pub fn rounded(v: f64) -> f64 {
    fmt_num(v).parse().expect("formatted float reparses")
}

fn cell_str(c: &Cell) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => fmt_num(*v),
        Cell::Text(v) => v.clone(),
    }
}

pub fn to_csv(table: &Table) -> String {
    let mut out = String::new();
    for (k, v) in &table.meta {
        out.push_str(&format!("# {k} = {v}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(cell_str).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn to_json(table: &Table) -> String {
    let meta: Vec<serde_json::Value> = table
        .meta
        .iter()
        .map(|(k, v)| json!([k, v]))
        .collect();
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|row| {
            let cells: Vec<serde_json::Value> = row
                .iter()
                .map(|c| match c {
                    Cell::Int(v) => json!(v),
                    Cell::Num(v) => json!(rounded(*v)),
                    Cell::Text(v) => json!(v),
                })
                .collect();
            json!(cells)
        })
        .collect();
    let doc = json!({
        "meta": meta,
        "columns": table.columns,
        "rows": rows,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
    s.push('\n');
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn render(&self, table: &Table) -> String {
        match self {
            OutputFormat::Csv => to_csv(table),
            OutputFormat::Json => to_json(table),
        }
    }

    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format '{other}' (expected csv or json)")),
        }
    }
}

/// Writes `content` to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent() {
                if !dir.as_os_str().is_empty() {
                    std::fs::create_dir_all(dir)?;
                }
            }
            std::fs::write(p, content)
        }
        None => std::io::stdout().write_all(content.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_carry_identical_numbers() {
        let mut t = Table::new(&["l1", "value"]);
        t.meta("wbar_p", 1.0);
        t.row(vec![Cell::Int(0), Cell::Num(0.123456789012345)]);
        let csv = to_csv(&t);
        let json = to_json(&t);
        let csv_val: f64 = csv
            .lines()
            .last()
            .unwrap()
            .split(',')
            .nth(1)
            .unwrap()
            .parse()
            .unwrap();
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        let json_val = doc["rows"][0][1].as_f64().unwrap();
        assert_eq!(csv_val.to_bits(), json_val.to_bits());
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.5344892926352), "5.34489292635e-1");
        assert_eq!(fmt_num(-1.0 / 3.0), "-3.33333333333e-1");
    }
}
