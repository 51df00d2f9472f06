use std::io::Write;

use avwc_core::code::round_sig;
use serde::Serialize;
use serde_json::Value;

pub const DIGITS: usize = 12;

pub enum Artifact {
    Csv(String),
    Json(Value),
    /// Already formatted.
    Text(String),
}

impl Artifact {
    pub fn json<T: Serialize>(value: &T) -> serde_json::Result<Self> {
        Ok(Self::Json(serde_json::to_value(value)?))
    }

    pub fn write_to<W: Write>(self, mut w: W) -> std::io::Result<()> {
        match self {
            Self::Csv(s) | Self::Text(s) => w.write_all(s.as_bytes()),
            Self::Json(v) => {
                let text = serde_json::to_string_pretty(&round_value(v)).map_err(std::io::Error::other)?;
                writeln!(w, "{text}")
            }
        }
    }
}

pub fn csv_number(x: f64) -> String {
    format!("{}", round_sig(x, DIGITS))
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap_or(0.0), DIGITS);
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}
