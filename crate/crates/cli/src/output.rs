//! Result documents and flat tables.
//!
//! Numbers are written with 17 significant digits in scientific notation so
//! that a document round-trips every `f64` exactly. Non-finite values become
//! the strings `"inf"`, `"-inf"` and `"nan"`.

use serde::Serialize;
use serde_json::value::RawValue;
use symdyn_info::{ExtReal, LogBase};

use crate::job::SCHEMA_VERSION;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Real(f64),
    Ext(ExtReal),
    Vector(Vec<f64>),
    Count(usize),
    Flag(bool),
}

/// One output number (or vector) and the operation that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub quantity: String,
    pub operation: &'static str,
    /// Sweep index, e.g. the cylinder or orbit length.
    pub index: Option<usize>,
    /// Information quantities are converted to the requested base.
    pub information: bool,
    pub value: Value,
}

impl Entry {
    pub fn new(quantity: &str, operation: &'static str, value: Value) -> Self {
        Entry {
            quantity: quantity.to_string(),
            operation,
            index: None,
            information: false,
            value,
        }
    }

    /// Same as [`Entry::new`] but marked as an information quantity (nats).
    pub fn info(quantity: &str, operation: &'static str, value: Value) -> Self {
        Entry {
            information: true,
            ..Entry::new(quantity, operation, value)
        }
    }

    pub fn at(mut self, index: usize) -> Self {
        self.index = Some(index);
        self
    }

    fn converted(&self, base: LogBase) -> Value {
        if !self.information {
            return self.value.clone();
        }
        match &self.value {
            Value::Real(x) => Value::Real(base.from_nats(*x)),
            Value::Ext(x) => Value::Ext(x.in_base(base)),
            Value::Vector(v) => Value::Vector(v.iter().map(|x| base.from_nats(*x)).collect()),
            other => other.clone(),
        }
    }
}

pub fn format_number(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn json_number(x: f64) -> String {
    if x.is_finite() {
        format_number(x)
    } else {
        format!("\"{}\"", format_number(x))
    }
}

fn ext_to_f64(x: ExtReal) -> f64 {
    match x {
        ExtReal::Finite(v) => v,
        ExtReal::PosInf => f64::INFINITY,
    }
}

fn json_value(v: &Value) -> String {
    match v {
        Value::Real(x) => json_number(*x),
        Value::Ext(x) => json_number(ext_to_f64(*x)),
        Value::Vector(xs) => {
            let parts: Vec<String> = xs.iter().map(|x| json_number(*x)).collect();
            format!("[{}]", parts.join(","))
        }
        Value::Count(n) => n.to_string(),
        Value::Flag(b) => b.to_string(),
    }
}

#[derive(Serialize)]
struct EntryDoc<'a> {
    quantity: &'a str,
    operation: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    base: Option<&'static str>,
    value: Box<RawValue>,
}

#[derive(Serialize)]
struct ResultDoc<'a> {
    schema_version: u32,
    command: &'a str,
    status: &'static str,
    seed: u64,
    base: &'static str,
    results: Vec<EntryDoc<'a>>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<&'a str>,
    message: String,
}

#[derive(Serialize)]
struct ErrorDoc<'a> {
    schema_version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    command: Option<&'a str>,
    status: &'static str,
    error: ErrorBody<'a>,
}

pub fn render_results(command: &str, seed: u64, base: LogBase, entries: &[Entry]) -> String {
    let results = entries
        .iter()
        .map(|e| EntryDoc {
            quantity: &e.quantity,
            operation: e.operation,
            index: e.index,
            base: e.information.then(|| base.label()),
            value: RawValue::from_string(json_value(&e.converted(base)))
                .expect("formatted numbers are valid JSON"),
        })
        .collect();
    let doc = ResultDoc {
        schema_version: SCHEMA_VERSION,
        command,
        status: "ok",
        seed,
        base: base.label(),
        results,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("result document serializes");
    s.push('\n');
    s
}

pub fn render_error(command: Option<&str>, err: &CliError) -> String {
    let doc = ErrorDoc {
        schema_version: SCHEMA_VERSION,
        command,
        status: "error",
        error: ErrorBody {
            kind: err.kind(),
            source: err.source_name(),
            message: err.to_string(),
        },
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("error document serializes");
    s.push('\n');
    s
}

/// Flat table with one row per scalar; vectors expand to one row per
/// component with the component number in `component`.
pub fn write_table<W: std::io::Write>(
    out: W,
    base: LogBase,
    entries: &[Entry],
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["quantity", "operation", "index", "component", "value"])?;
    for e in entries {
        let index = e.index.map(|i| i.to_string()).unwrap_or_default();
        let mut row = |component: String, value: String| {
            w.write_record([&e.quantity, e.operation, &index, &component, &value])
        };
        match e.converted(base) {
            Value::Real(x) => row(String::new(), format_number(x))?,
            Value::Ext(x) => row(String::new(), format_number(ext_to_f64(x)))?,
            Value::Count(n) => row(String::new(), n.to_string())?,
            Value::Flag(b) => row(String::new(), b.to_string())?,
            Value::Vector(xs) => {
                for (c, x) in xs.iter().enumerate() {
                    row(c.to_string(), format_number(*x))?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}
