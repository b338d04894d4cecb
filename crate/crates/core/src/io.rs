//! JSON input formats: polytopes, coefficient vectors, pencils and tuples of
//! exact numbers. Numbers are exact strings; floats are rejected.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::deformation::Pencil;
use crate::error::{Error, Result};
use crate::field::GaussianRational as G;
use crate::laurent::CoefficientVector;
use crate::lattice::LatticePoint;
use crate::polytope::{polytope_from_divisor, LatticePolytope, ToricDivisorData};

/// Version tag carried by every report.
pub const REPORT_SCHEMA: &str = "torhyp-report/1";

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(format!("malformed JSON: {e}")))
}

fn int(v: &Value, what: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| parse_err(format!("{what}: expected an integer, got {v}")))
}

fn int_vec(v: &Value, what: &str) -> Result<Vec<i64>> {
    v.as_array().ok_or_else(|| parse_err(format!("{what}: expected an array")))?.iter().map(|x| int(x, what)).collect()
}

fn point_list(v: &Value, what: &str) -> Result<Vec<LatticePoint>> {
    v.as_array()
        .ok_or_else(|| parse_err(format!("{what}: expected an array of points")))?
        .iter()
        .map(|p| int_vec(p, what).map(LatticePoint))
        .collect()
}

/// An exact number: a string such as `"3/4+1/2i"`, or a JSON integer.
pub fn exact_number(v: &Value) -> Result<G> {
    match v {
        Value::String(s) => s.parse::<G>().map_err(|e| parse_err(format!("{s:?}: {e}"))),
        Value::Number(n) if n.is_i64() => Ok(G::from_i64(n.as_i64().expect("checked"))),
        Value::Number(n) => Err(parse_err(format!("{n}: floating-point numbers are not accepted, use an exact string"))),
        other => Err(parse_err(format!("{other}: expected an exact number string"))),
    }
}

pub fn polytope_from_json(v: &Value) -> Result<LatticePolytope> {
    let obj = v.as_object().ok_or_else(|| parse_err("polytope: expected an object"))?;
    if let Some(verts) = obj.get("vertices") {
        return LatticePolytope::from_vertices(&point_list(verts, "vertices")?);
    }
    let rays = point_list(obj.get("rays").ok_or_else(|| parse_err("polytope: needs \"rays\" or \"vertices\""))?, "rays")?;
    let offsets = int_vec(obj.get("offsets").ok_or_else(|| parse_err("polytope: missing \"offsets\""))?, "offsets")?;
    polytope_from_divisor(&ToricDivisorData { rays, offsets })
}

/// `{"[i,j]": "coefficient", ...}`.
pub fn coefficients_from_json(v: &Value) -> Result<CoefficientVector<G>> {
    let obj = v.as_object().ok_or_else(|| parse_err("coefficients: expected an object"))?;
    let mut entries = BTreeMap::new();
    let mut rank = None;
    for (k, c) in obj {
        let key = parse_json(k).and_then(|kv| int_vec(&kv, "coefficient key"))
            .map_err(|_| parse_err(format!("coefficient key {k:?}: expected an integer array such as \"[1,0]\"")))?;
        if *rank.get_or_insert(key.len()) != key.len() {
            return Err(parse_err(format!("coefficient key {k:?} has the wrong length")));
        }
        entries.insert(LatticePoint(key), exact_number(c)?);
    }
    let rank = rank.ok_or_else(|| parse_err("coefficients: empty"))?;
    CoefficientVector::new(rank, &(), entries)
}

/// `{"base": {...}, "direction": {...}}`.
pub fn pencil_from_json(v: &Value) -> Result<Pencil> {
    let base = coefficients_from_json(v.get("base").ok_or_else(|| parse_err("pencil: missing \"base\""))?)?;
    let dir = coefficients_from_json(v.get("direction").ok_or_else(|| parse_err("pencil: missing \"direction\""))?)?;
    Pencil::new(&base, &dir)
}

pub fn numbers_from_json(v: &Value) -> Result<Vec<G>> {
    v.as_array().ok_or_else(|| parse_err("expected an array of exact numbers"))?.iter().map(exact_number).collect()
}

pub fn points_from_json(v: &Value) -> Result<Vec<LatticePoint>> {
    point_list(v, "point set")
}

/// A lattice point written as `"[1,0]"` or `"1,0"`.
pub fn point_from_str(s: &str) -> Result<LatticePoint> {
    let t = s.trim();
    let t = if t.starts_with('[') { t.to_string() } else { format!("[{t}]") };
    int_vec(&parse_json(&t)?, "point").map(LatticePoint)
}
