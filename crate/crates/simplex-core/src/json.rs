//! Canonical JSON: sorted keys, subsets keyed by comma-joined support values.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::chain::Chain;
use crate::elem::{ClosedSet, Embedding};
use crate::mask::Mask;
use crate::simplex::{Simplex, Transitions};
use crate::CoreError;

fn key(f: &Simplex, m: Mask) -> String {
    f.values_of(m).iter().map(u32::to_string).collect::<Vec<_>>().join(",")
}

fn parse_key(support: &[u32], s: &str) -> Result<Mask, CoreError> {
    let mut m: Mask = 0;
    if s.is_empty() {
        return Ok(0);
    }
    for part in s.split(',') {
        let x: u32 = part.trim().parse().map_err(|_| CoreError::Json(format!("bad subset key {s:?}")))?;
        let i = support.binary_search(&x).map_err(|_| CoreError::Json(format!("key {s:?} leaves the support")))?;
        m |= 1 << i;
    }
    Ok(m)
}

fn bad(e: impl std::fmt::Display) -> CoreError {
    CoreError::Json(e.to_string())
}

pub fn simplex_to_value(f: &Simplex) -> Value {
    let mut faces = Map::new();
    for (m, cs) in f.faces().iter().enumerate() {
        faces.insert(key(f, m as Mask), serde_json::to_value(cs).expect("closed sets serialize"));
    }
    let mut trans = Map::new();
    for (&(u, v), e) in f.transitions() {
        trans.insert(format!("{}|{}", key(f, u), key(f, v)), serde_json::to_value(e).expect("maps serialize"));
    }
    json!({ "support": f.support(), "faces": faces, "transitions": trans })
}

pub fn simplex_from_value(v: &Value) -> Result<Simplex, CoreError> {
    let support: Vec<u32> = serde_json::from_value(v.get("support").cloned().ok_or_else(|| bad("missing support"))?).map_err(bad)?;
    let n = support.len();
    if n > crate::mask::MAX_SUPPORT {
        return Err(CoreError::SupportTooLarge(n));
    }
    let faces_v = v.get("faces").and_then(Value::as_object).ok_or_else(|| bad("missing faces"))?;
    let mut faces: Vec<Option<ClosedSet>> = vec![None; 1 << n];
    for (k, cs) in faces_v {
        let m = parse_key(&support, k)?;
        faces[m as usize] = Some(serde_json::from_value(cs.clone()).map_err(bad)?);
    }
    let faces: Vec<ClosedSet> = faces.into_iter().collect::<Option<_>>().ok_or_else(|| bad("a face is missing"))?;
    let trans_v = v.get("transitions").and_then(Value::as_object).ok_or_else(|| bad("missing transitions"))?;
    let mut trans = Transitions::new();
    for (k, e) in trans_v {
        let (a, b) = k.split_once('|').ok_or_else(|| bad(format!("bad pair key {k:?}")))?;
        let e: Embedding = serde_json::from_value(e.clone()).map_err(bad)?;
        trans.insert((parse_key(&support, a)?, parse_key(&support, b)?), e);
    }
    Simplex::from_parts(support, faces, trans)
}

pub fn chain_to_value(c: &Chain) -> Value {
    let terms: Vec<Value> = c.terms().map(|(f, k)| json!({ "coef": k, "simplex": simplex_to_value(f) })).collect();
    json!({ "dim": c.dim(), "terms": terms })
}

pub fn chain_from_value(v: &Value) -> Result<Chain, CoreError> {
    let dim = v.get("dim").and_then(Value::as_i64).ok_or_else(|| bad("missing dim"))? as i32;
    let terms = v.get("terms").and_then(Value::as_array).ok_or_else(|| bad("missing terms"))?;
    let mut parsed = Vec::with_capacity(terms.len());
    for t in terms {
        let k = t.get("coef").and_then(Value::as_i64).ok_or_else(|| bad("missing coef"))?;
        parsed.push((simplex_from_value(t.get("simplex").ok_or_else(|| bad("missing simplex"))?)?, k));
    }
    Chain::from_terms(dim, parsed.iter().map(|(f, k)| (f, *k)))
}

/// serde_json keeps object keys sorted, so this is canonical.
pub fn to_canonical_string(v: &Value) -> String {
    serde_json::to_string(v).expect("values serialize")
}

pub fn chain_to_string(c: &Chain) -> String {
    to_canonical_string(&chain_to_value(c))
}

pub fn chain_from_str(s: &str) -> Result<Chain, CoreError> {
    chain_from_value(&serde_json::from_str(s).map_err(bad)?)
}

pub fn simplex_to_string(f: &Simplex) -> String {
    to_canonical_string(&simplex_to_value(f))
}

pub fn simplex_from_str(s: &str) -> Result<Simplex, CoreError> {
    simplex_from_value(&serde_json::from_str(s).map_err(bad)?)
}

/// Convenience for callers holding several chains under names.
pub fn named_chains(items: &[(&str, &Chain)]) -> Value {
    let m: BTreeMap<String, Value> = items.iter().map(|(k, c)| (k.to_string(), chain_to_value(c))).collect();
    serde_json::to_value(m).expect("maps serialize")
}
