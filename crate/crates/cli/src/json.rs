//! Canonical JSON: fixed key order, floats as `%.12e`, non-finite as null.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

/// `%.12e` as printed by C: twelve mantissa digits, signed two-digit
/// exponent.
pub fn sci(v: f64) -> String {
    let s = format!("{v:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn float(v: f64) -> Value {
    if v.is_finite() {
        Value::Number(Number::from_str(&sci(v)).expect("valid number literal"))
    } else {
        Value::Null
    }
}

pub fn floats(vs: &[f64]) -> Value {
    Value::Array(vs.iter().copied().map(float).collect())
}

/// Object builder that keeps insertion order.
#[derive(Default)]
pub struct Obj(Map<String, Value>);

impl Obj {
    pub fn new() -> Self {
        Obj(Map::new())
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.to_owned(), value.into());
        self
    }

    pub fn num(self, key: &str, v: f64) -> Self {
        self.with(key, float(v))
    }
}

impl From<Obj> for Value {
    fn from(o: Obj) -> Value {
        Value::Object(o.0)
    }
}

pub fn render(doc: &Value) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable document");
    s.push('\n');
    s
}
