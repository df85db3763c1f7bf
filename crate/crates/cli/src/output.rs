//! CSV and JSON emission. CSV uses LF line endings and `{:.16e}` numbers,
//! which round-trip through `f64::from_str`.

use std::fmt::Write as _;

use nrloop::gaussian::LogBase;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Axis, Format, ScenarioConfig};
use crate::metrics::{Cell, Metric};

/// Rows of a sweep: axis values followed by metric cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub config: ScenarioConfig,
    pub axes: Vec<Axis>,
    pub metrics: Vec<Metric>,
    pub rows: Vec<Vec<Cell>>,
}

fn log_suffix(base: LogBase) -> &'static str {
    match base {
        LogBase::E => "[ln]",
        LogBase::Two => "[log2]",
    }
}

impl Table {
    pub fn header(&self) -> Vec<String> {
        let axes = self.axes.iter().map(|a| match a {
            Axis::Phi => "phi[rad]".to_string(),
            a => a.name().to_string(),
        });
        let metrics = self.metrics.iter().map(|m| {
            if m.is_logarithmic() {
                format!("{m}{}", log_suffix(self.config.log_base))
            } else {
                m.name()
            }
        });
        axes.chain(metrics).collect()
    }

    fn columns(&self) -> Vec<String> {
        self.axes
            .iter()
            .map(|a| a.name().to_string())
            .chain(self.metrics.iter().map(|m| m.name()))
            .collect()
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = csv_line(&self.header());
                for row in &self.rows {
                    out += &csv_line(&row.iter().map(Cell::to_string).collect::<Vec<_>>());
                }
                out
            }
            Format::Json => {
                let v = json!({
                    "command": self.command,
                    "log_base": self.config.log_base,
                    "columns": self.columns(),
                    "rows": self.rows,
                    "config": self.config,
                });
                pretty(&v)
            }
        }
    }
}

/// A key/value report for the single-shot subcommands.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub entries: Vec<(String, Field)>,
}

#[derive(Debug, Clone)]
pub enum Field {
    Cell(Cell),
    Int(u64),
    Text(String),
    Row(Vec<Field>),
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Cell(Cell::Num(x))
    }
}

impl From<usize> for Field {
    fn from(n: usize) -> Self {
        Field::Int(n as u64)
    }
}

impl From<u64> for Field {
    fn from(n: u64) -> Self {
        Field::Int(n)
    }
}

impl From<bool> for Field {
    fn from(b: bool) -> Self {
        Field::Cell(Cell::Bool(b))
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Text(s)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_string())
    }
}

impl Serialize for Field {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Field::Cell(c) => c.serialize(s),
            Field::Int(n) => s.serialize_u64(*n),
            Field::Text(t) => s.serialize_str(t),
            Field::Row(r) => r.serialize(s),
        }
    }
}

impl Field {
    fn csv_cells(&self, out: &mut Vec<String>) {
        match self {
            Field::Cell(c) => out.push(c.to_string()),
            Field::Int(n) => out.push(n.to_string()),
            Field::Text(t) => out.push(t.clone()),
            Field::Row(r) => r.iter().for_each(|f| f.csv_cells(out)),
        }
    }
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.into(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<Field>) {
        self.entries.push((key.into(), value.into()));
    }

    pub fn push_row(&mut self, key: impl Into<String>, values: impl IntoIterator<Item = f64>) {
        let row = values.into_iter().map(Field::from).collect();
        self.entries.push((key.into(), Field::Row(row)));
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut out = csv_line(&["quantity".to_string(), "value".to_string()]);
                for (k, v) in &self.entries {
                    let mut cells = vec![k.clone()];
                    v.csv_cells(&mut cells);
                    out += &csv_line(&cells);
                }
                out
            }
            Format::Json => {
                let mut map = serde_json::Map::new();
                map.insert("command".into(), Value::String(self.command.clone()));
                for (k, v) in &self.entries {
                    map.insert(k.clone(), serde_json::to_value(v).expect("plain data"));
                }
                pretty(&Value::Object(map))
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_line(cells: &[String]) -> String {
    let mut line = String::new();
    for (i, c) in cells.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        let _ = write!(line, "{}", csv_field(c));
    }
    line.push('\n');
    line
}
