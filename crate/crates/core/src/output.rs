//! Structured output for the command-line front end.
//!
//! Every command produces an [`OutputRecord`]. Big integers and fractions are
//! always rendered as decimal strings so consumers never round through floats.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Csv,
}

/// Serializes a big integer as its decimal string.
pub fn decimal<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// One command invocation and its results.
#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub results: serde_json::Value,
    pub status: String,
    pub exit_code: i32,
}

impl OutputRecord {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("records serialize");
        s.push('\n');
        s
    }
}

/// Writes `header` and `rows` as CSV.
pub fn csv_table<R, I>(header: &[&str], rows: I) -> String
where
    R: IntoIterator,
    R::Item: AsRef<str>,
    I: IntoIterator<Item = R>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        let fields: Vec<String> = row.into_iter().map(|f| f.as_ref().to_string()).collect();
        w.write_record(&fields).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}
