use serde::Serialize;
use serde_json::{Map, Value};

use hemi::{Error, Result};

use crate::{Cli, Format};

pub struct Output {
    pub text: String,
    pub passed: bool,
}

/// A number that survives JSON: ±inf and NaN become strings.
pub fn num(x: f64) -> Value {
    if x == 0.0 {
        Value::from(0.0)
    } else if x.is_finite() {
        serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
    } else if x.is_nan() {
        Value::String("nan".into())
    } else if x > 0.0 {
        Value::String("inf".into())
    } else {
        Value::String("-inf".into())
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Schema(e.to_string()))
}

/// The JSON document: command, seed, tolerance, then the payload.
pub fn envelope(cli: &Cli, command: &str, passed: bool, result: Value) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(command.into()));
    m.insert("seed".into(), Value::from(cli.seed));
    m.insert("tol".into(), num(cli.tol));
    m.insert("passed".into(), Value::Bool(passed));
    m.insert("result".into(), result);
    Value::Object(m)
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Rows of flat objects as CSV, columns in first-row order.
pub fn csv_table(rows: &[Value]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let Some(Value::Object(first)) = rows.first() else {
        return Ok(String::new());
    };
    let header: Vec<&String> = first.keys().collect();
    w.write_record(header.iter().map(|h| h.as_str())).map_err(|e| Error::Schema(e.to_string()))?;
    for r in rows {
        let rec: Vec<String> = header.iter().map(|h| r.get(h.as_str()).map(cell).unwrap_or_default()).collect();
        w.write_record(&rec).map_err(|e| Error::Schema(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Schema(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Schema(e.to_string()))
}

/// JSON document, or the CSV table when `--format csv` is set.
pub fn finish(cli: &Cli, command: &str, passed: bool, result: Value, rows: Vec<Value>) -> Result<Output> {
    let text = match cli.format {
        Format::Json => {
            let doc = envelope(cli, command, passed, result);
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Error::Schema(e.to_string()))?;
            s.push('\n');
            s
        }
        Format::Csv => csv_table(&rows)?,
    };
    Ok(Output { text, passed })
}
