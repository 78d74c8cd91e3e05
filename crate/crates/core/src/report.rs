//! Pass/fail checks and byte-stable JSON output.
//!
//! Object keys are written in sorted order and every floating-point number is
//! printed with 17 significant digits, so a fixed configuration always yields
//! the same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{Map, Number, Value};

/// One measured quantity compared against a threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `value <= threshold` (NaN fails).
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value <= threshold,
            detail: None,
        }
    }

    /// Passes when `value >= threshold`.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            pass: value >= threshold,
            detail: None,
        }
    }

    /// A check that was not applicable; counts as passed.
    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            value: 0.0,
            threshold: 0.0,
            pass: true,
            detail: Some(format!("skipped: {}", reason.into())),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("value".into(), num(self.value));
        m.insert("threshold".into(), num(self.threshold));
        m.insert("pass".into(), Value::Bool(self.pass));
        if let Some(d) = &self.detail {
            m.insert("detail".into(), Value::String(d.clone()));
        }
        Value::Object(m)
    }
}

/// JSON number for finite floats; non-finite values become strings.
pub fn num(v: f64) -> Value {
    match Number::from_f64(v) {
        Some(n) => Value::Number(n),
        None if v.is_nan() => Value::String("NaN".into()),
        None if v > 0.0 => Value::String("Infinity".into()),
        None => Value::String("-Infinity".into()),
    }
}

pub fn num_array(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

/// Result of one CLI command.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub checks: Vec<Check>,
    pub data: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self { command: command.into(), ..Default::default() }
    }

    pub fn push(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn extend<I: IntoIterator<Item = Check>>(&mut self, checks: I) {
        self.checks.extend(checks);
    }

    pub fn insert(&mut self, key: impl Into<String>, v: Value) {
        self.data.insert(key.into(), v);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert("pass".into(), Value::Bool(self.all_pass()));
        m.insert(
            "checks".into(),
            Value::Array(self.checks.iter().map(Check::to_value).collect()),
        );
        m.insert(
            "data".into(),
            Value::Object(self.data.iter().map(|(k, v)| (k.clone(), v.clone())).collect()),
        );
        Value::Object(m)
    }

    pub fn to_json(&self) -> String {
        to_stable_json(&self.to_value())
    }
}

/// Pretty JSON with sorted keys and `{:.16e}` floats.
pub fn to_stable_json(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, indent: usize) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                write!(out, "{i}").unwrap();
            } else if let Some(u) = n.as_u64() {
                write!(out, "{u}").unwrap();
            } else {
                write!(out, "{:.16e}", n.as_f64().unwrap_or(f64::NAN)).unwrap();
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(a) => {
            if a.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(m) => {
            if m.is_empty() {
                out.push_str("{}");
                return;
            }
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &m[*k], indent + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits_and_keys_sort() {
        let v = json!({"b": 0.1, "a": [1, 2.5], "c": {"z": true, "y": null}});
        let s = to_stable_json(&v);
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("2.5000000000000000e0"));
        assert!(s.contains("    1,"));
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64().unwrap(), 0.1);
    }

    #[test]
    fn checks_and_report() {
        let mut r = Report::new("demo");
        r.push(Check::at_most("small", 1e-12, 1e-10));
        r.push(Check::at_most("nan", f64::NAN, 1.0));
        r.push(Check::skipped("wave", "degenerate"));
        assert!(!r.all_pass());
        assert_eq!(r.failures().len(), 1);
        let s = r.to_json();
        assert!(s.contains("\"NaN\""));
        assert_eq!(s, r.to_json());
    }
}
