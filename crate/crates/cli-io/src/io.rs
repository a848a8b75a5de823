use std::path::Path;

use amalgam_engine::Certificate;
use instances::{SiteDescriptor, SiteHandle};
use serde_json::{json, Value};
use simplex_core::json::{chain_from_value, chain_to_value, to_canonical_string};
use simplex_core::{Chain, ShellView};

/// Exit-coded failure of a command.
#[derive(Debug)]
pub enum Failure {
    /// a checked property does not hold
    Property(String),
    /// unreadable or malformed input
    Input(String),
    /// an enumeration went over --cap
    Cap(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Property(_) => 1,
            Failure::Input(_) => 2,
            Failure::Cap(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Property(m) | Failure::Input(m) | Failure::Cap(m) => m,
        }
    }
}

pub fn input<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(e.to_string())
}

/// `--site` is a short descriptor (`parity:4`, `groupoid:S3`, …), inline
/// JSON, or a path to a JSON file holding either.
pub fn load_site(arg: &str) -> Result<SiteHandle, Failure> {
    let text = if Path::new(arg).is_file() { std::fs::read_to_string(arg).map_err(input)? } else { arg.to_string() };
    let text = text.trim();
    let desc = match serde_json::from_str::<Value>(text) {
        Ok(Value::String(s)) => SiteDescriptor::parse(&s),
        Ok(v @ Value::Object(_)) => SiteDescriptor::parse(&v.to_string()),
        _ => SiteDescriptor::parse(text),
    }
    .map_err(input)?;
    desc.build().map_err(input)
}

pub fn read_json(path: &str) -> Result<Value, Failure> {
    let text = if path == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(input)?
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

pub fn read_chain(path: &str) -> Result<Chain, Failure> {
    chain_from_value(&read_json(path)?).map_err(input)
}

pub fn cert_to_value(c: &Certificate) -> Value {
    json!({ "note": c.note, "target": chain_to_value(&c.target), "bounding": chain_to_value(&c.bounding) })
}

/// Reads a certificate without checking it.
pub fn cert_from_value(v: &Value) -> Result<Certificate, Failure> {
    let target = chain_from_value(v.get("target").ok_or_else(|| Failure::Input("certificate without target".into()))?).map_err(input)?;
    let bounding = chain_from_value(v.get("bounding").ok_or_else(|| Failure::Input("certificate without bounding".into()))?).map_err(input)?;
    let note = v.get("note").and_then(Value::as_str).unwrap_or("").to_string();
    Ok(Certificate { target, bounding, note })
}

pub fn shell_to_value(s: &ShellView) -> Value {
    json!({ "sign": s.sign, "chain": chain_to_value(&s.chain()) })
}

/// Writes canonical JSON to `out`, or stdout when absent.
pub fn emit(out: Option<&str>, v: &Value) -> Result<(), Failure> {
    let text = to_canonical_string(v);
    match out {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| Failure::Input(format!("{p}: {e}"))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
