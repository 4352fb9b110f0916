use qprior::io::{fmt17, to_json};
use qprior::Error;
use serde::Serialize;

use crate::Format;

/// A command result, renderable as JSON or as a `section,key,value` CSV.
pub trait Report: Serialize {
    fn rows(&self) -> Vec<Row>;

    fn render(&self, format: Format) -> Result<String, Error> {
        match format {
            Format::Json => {
                let mut s = to_json(self);
                s.push('\n');
                Ok(s)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::data(format!("writing CSV: {e}"));
                w.write_record(["section", "key", "value"]).map_err(io)?;
                for r in self.rows() {
                    w.write_record([&r.section, &r.key, &r.value]).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::data(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Error::data(e.to_string()))
            }
        }
    }
}

pub struct Row {
    pub section: String,
    pub key: String,
    pub value: String,
}

pub fn row(section: &str, key: impl ToString, value: impl ToString) -> Row {
    Row {
        section: section.to_string(),
        key: key.to_string(),
        value: value.to_string(),
    }
}

pub fn num(section: &str, key: impl ToString, value: f64) -> Row {
    row(section, key, fmt17(value))
}

/// Open interval ends print as empty fields.
pub fn bound(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}
