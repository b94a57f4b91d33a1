use serde_json::{json, Value};
use surfgw::rat::{self, Rat};
use surfgw::series::json as sjson;
use surfgw::{BiSeries, Error, QLaurent};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A command result in both output shapes.
pub struct Report {
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(command: &str, mut body: Value) -> Self {
        let obj = body.as_object_mut().expect("report bodies are objects");
        obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
        obj.insert("command".into(), json!(command));
        Report {
            json: body,
            header: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.header = header;
        self.rows = rows;
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.json).expect("JSON values serialize");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut s = self.header.join(",");
                s.push('\n');
                for row in &self.rows {
                    s.push_str(
                        &row.iter()
                            .map(|c| csv_field(c))
                            .collect::<Vec<_>>()
                            .join(","),
                    );
                    s.push('\n');
                }
                s
            }
        }
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn r(x: &Rat) -> String {
    rat::to_string(x)
}

pub fn q_series(s: &QLaurent, var: &str) -> (Value, Vec<Vec<String>>) {
    let rows = s
        .coefficients()
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != rat::rat(0))
        .map(|(i, c)| vec![(s.valuation() + i as i64).to_string(), r(c)])
        .collect();
    (
        serde_json::to_value(sjson::univariate(s, var)).expect("series serialize"),
        rows,
    )
}

pub fn bi_series(s: &BiSeries) -> (Value, Vec<Vec<String>>) {
    let mut rows = Vec::new();
    for (i, inner) in s.z_coefficients().iter().enumerate() {
        for (j, c) in inner.coefficients().iter().enumerate() {
            if *c != rat::rat(0) {
                rows.push(vec![
                    (s.z_valuation() + i as i64).to_string(),
                    (inner.valuation() + j as i64).to_string(),
                    r(c),
                ]);
            }
        }
    }
    (
        serde_json::to_value(sjson::bivariate(s)).expect("series serialize"),
        rows,
    )
}

/// Process exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::InvalidInput(_) => 2,
        Error::InsufficientPrecision { .. } => 3,
        _ => 4,
    }
}
