//! CSV and JSON writers for result tables.

use std::io::Write;

use serde_json::{json, Map, Value};

use crate::config::Format;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    B(bool),
    S(String),
}

impl Cell {
    /// Floats carry 17 significant digits so values round-trip.
    pub fn to_csv(&self) -> String {
        match self {
            Cell::F(x) if x.is_nan() => "nan".into(),
            Cell::F(x) => format!("{x:.16e}"),
            Cell::I(i) => i.to_string(),
            Cell::B(b) => b.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::F(x) if x.is_finite() => json!(x),
            Cell::F(_) => Value::Null,
            Cell::I(i) => json!(i),
            Cell::B(b) => json!(b),
            Cell::S(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        Cell::F(x.unwrap_or(f64::NAN))
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::I(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::B(b)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `key: value` header lines.
    pub metadata: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table { columns: columns.to_vec(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }
}

/// Identification shared by every record of a run.
#[derive(Clone, Debug)]
pub struct RunInfo {
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    pub config_json: String,
}

/// `#` header lines, then one record per row. Each record starts with the
/// config hash and seed. Nothing time-dependent is written, so equal inputs
/// give byte-identical files.
pub fn write_csv(w: &mut dyn Write, table: &Table, info: &RunInfo) -> std::io::Result<()> {
    writeln!(w, "# oto-clock {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# experiment: {}", info.experiment)?;
    writeln!(w, "# config_hash: {}", info.config_hash)?;
    writeln!(w, "# seed: {}", info.seed)?;
    writeln!(w, "# config: {}", info.config_json)?;
    for (k, v) in &table.metadata {
        writeln!(w, "# {k}: {v}")?;
    }
    let mut csv = csv::Writer::from_writer(w);
    let header = ["config_hash", "seed"].into_iter().chain(table.columns.iter().copied());
    csv.write_record(header)?;
    let seed = info.seed.to_string();
    for row in &table.rows {
        let cells = [info.config_hash.clone(), seed.clone()].into_iter().chain(row.iter().map(Cell::to_csv));
        csv.write_record(cells)?;
    }
    csv.flush()
}

/// The same records with full metadata, including the wall-clock runtime.
pub fn write_json(w: &mut dyn Write, table: &Table, info: &RunInfo, runtime_seconds: f64) -> std::io::Result<()> {
    let records: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let mut m = Map::new();
            m.insert("config_hash".into(), json!(info.config_hash));
            m.insert("seed".into(), json!(info.seed));
            for (c, v) in table.columns.iter().zip(row) {
                m.insert((*c).into(), v.to_json());
            }
            Value::Object(m)
        })
        .collect();
    let meta: Map<String, Value> = table.metadata.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
    let doc = json!({
        "library_version": env!("CARGO_PKG_VERSION"),
        "experiment": info.experiment,
        "config_hash": info.config_hash,
        "seed": info.seed,
        "config": serde_json::from_str::<Value>(&info.config_json).unwrap_or(Value::Null),
        "metadata": meta,
        "runtime_seconds": runtime_seconds,
        "columns": table.columns,
        "records": records,
    });
    serde_json::to_writer_pretty(&mut *w, &doc)?;
    writeln!(w)
}

pub fn write(
    w: &mut dyn Write,
    format: Format,
    table: &Table,
    info: &RunInfo,
    runtime_seconds: f64,
) -> std::io::Result<()> {
    match format {
        Format::Csv => write_csv(w, table, info),
        Format::Json => write_json(w, table, info, runtime_seconds),
    }
}
