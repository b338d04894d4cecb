//! Worked examples: quadrics and cubics on projective spaces and the
//! Hirzebruch trapezoids. Each case returns a deterministic JSON report.

use serde_json::{json, Value};

use crate::config::{build_configuration, check_embedding_conditions, enumerate_hyperplanes};
use crate::deformation::{exception_set, Pencil};
use crate::error::{Error, Result};
use crate::field::GaussianRational as G;
use crate::hyperbolicity::certify_embedding;
use crate::io::REPORT_SCHEMA;
use crate::laurent::CoefficientVector;
use crate::lattice::LatticePoint;
use crate::polytope::{polytope_from_divisor, standard, Face, LatticePolytope};

pub const CASE_NAMES: [&str; 5] = ["p2-2h", "p2-3h", "p3-3h-small", "p3-3h-full", "hirzebruch:<l>"];

fn pt(v: &[i64]) -> LatticePoint {
    LatticePoint(v.to_vec())
}

fn ones(points: &[LatticePoint]) -> CoefficientVector<G> {
    CoefficientVector::from_pairs(points[0].rank(), &(), points.iter().map(|p| (p.clone(), G::from_i64(1))))
        .expect("distinct points")
}

/// Deterministic nonzero small integers.
fn sample_coefficients(points: &[LatticePoint], seed: u64) -> CoefficientVector<G> {
    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let vals = points.iter().map(|p| {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        let v = (s % 19) as i64 - 9;
        (p.clone(), G::from_i64(if v == 0 { 10 } else { v }))
    });
    CoefficientVector::from_pairs(points[0].rank(), &(), vals.collect::<Vec<_>>()).expect("distinct points")
}

pub fn p2(d: i64) -> LatticePolytope {
    polytope_from_divisor(&standard::projective_space(2, d)).expect("simplex")
}

pub fn p3(d: i64) -> LatticePolytope {
    polytope_from_divisor(&standard::projective_space(3, d)).expect("simplex")
}

/// Eight points of the cubic simplex on which every nonzero choice of
/// coefficients is certified.
pub fn p3_small_support() -> Vec<LatticePoint> {
    [[0, 0, 0], [3, 0, 0], [0, 3, 0], [0, 0, 3], [1, 0, 0], [0, 2, 0], [2, 0, 1], [0, 1, 2]].iter().map(|v| pt(v)).collect()
}

/// The quadric pencil `x²+y²+z² + b₁yz + b₂xz + t·xy`.
pub fn conic_pencil(b1: i64, b2: i64) -> Pencil {
    let base = CoefficientVector::from_pairs(
        2,
        &(),
        [
            (pt(&[0, 0]), G::from_i64(1)),
            (pt(&[2, 0]), G::from_i64(1)),
            (pt(&[0, 2]), G::from_i64(1)),
            (pt(&[0, 1]), G::from_i64(b1)),
            (pt(&[1, 0]), G::from_i64(b2)),
            (pt(&[1, 1]), G::from_i64(0)),
        ],
    )
    .expect("distinct points");
    let dir = CoefficientVector::from_pairs(2, &(), [(pt(&[1, 1]), G::from_i64(1))]).expect("one point");
    Pencil::new(&base, &dir).expect("not proportional")
}

/// `x ≥ 0, 0 ≤ y ≤ 2, x + l·y ≤ 2l+2`.
pub fn hirzebruch_polytope(l: i64) -> Result<LatticePolytope> {
    polytope_from_divisor(&standard::hirzebruch(l, 2 * l + 2, 2))
}

/// The triangle `x, y ≥ 0, x + l·y ≤ a` of the weighted projective plane.
pub fn weighted_triangle(l: i64, a: i64) -> Result<LatticePolytope> {
    polytope_from_divisor(&crate::polytope::ToricDivisorData {
        rays: vec![pt(&[1, 0]), pt(&[0, 1]), pt(&[-1, -l])],
        offsets: vec![0, 0, a],
    })
}

pub fn hirzebruch_support(l: i64) -> Vec<LatticePoint> {
    vec![pt(&[0, 0]), pt(&[0, 1]), pt(&[0, 2]), pt(&[2 + 2 * l, 0]), pt(&[2 + l, 1]), pt(&[2, 2])]
}

/// Name of a Hirzebruch trapezoid edge by its supporting halfspace.
pub fn hirzebruch_edge_name(p: &LatticePolytope, face: &Face, l: i64) -> String {
    if face.dim != 1 {
        return p.describe_face(face);
    }
    let normal = face.active_halfspaces.iter().map(|&i| p.halfspaces()[i].normal.coords().to_vec()).next();
    match normal.as_deref() {
        Some([0, -1]) => "top edge".into(),
        Some([0, 1]) => "bottom edge".into(),
        Some([1, 0]) => "left edge".into(),
        Some([x, y]) if *x == -1 && *y == -l => "slanted edge".into(),
        _ => p.describe_face(face),
    }
}

fn base_report(case: &str, source: &str) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(REPORT_SCHEMA));
    m.insert("case".into(), json!(case));
    m.insert("source".into(), json!(source));
    m
}

fn hyperplane_counts(points: &[LatticePoint], r: usize) -> Result<(usize, Vec<(usize, usize)>)> {
    let cfg = build_configuration(points, r)?;
    let hs = enumerate_hyperplanes(&cfg)?;
    let mut hist = std::collections::BTreeMap::new();
    for h in &hs {
        *hist.entry(h.fiber_count()).or_insert(0usize) += 1;
    }
    Ok((hs.len(), hist.into_iter().collect()))
}

/// Run a named case. `check` narrows the report to one quantity
/// (`hyperplanes` is the only narrowed check).
pub fn run_case(name: &str, check: Option<&str>) -> Result<Value> {
    if let Some(c) = check {
        if c != "hyperplanes" {
            return Err(Error::Parse(format!("unknown check {c:?} (known: hyperplanes)")));
        }
    }
    match name {
        "p2-2h" => p2_2h(check),
        "p2-3h" => full_simplex_case(name, &p2(3), 2, check, "cubic curves on the projective plane"),
        "p3-3h-full" => full_simplex_case(name, &p3(3), 3, check, "cubic surfaces in projective 3-space, full support"),
        "p3-3h-small" => p3_small(check),
        _ => match name.strip_prefix("hirzebruch:").map(str::parse::<i64>) {
            Some(Ok(l)) if l >= 1 => hirzebruch(l),
            _ => Err(Error::Parse(format!("unknown case {name:?} (known: {})", CASE_NAMES.join(", ")))),
        },
    }
}

fn p2_2h(check: Option<&str>) -> Result<Value> {
    let p = p2(2);
    let pts = p.lattice_points();
    let (count, hist) = hyperplane_counts(&pts, 2)?;
    let mut m = base_report("p2-2h", "quadric curves on the projective plane");
    if check.is_some() {
        m.insert("count".into(), json!(count));
        return Ok(Value::Object(m));
    }
    let cert = certify_embedding(&p, &ones(&pts), 1)?;
    let e = exception_set(&p, &conic_pencil(1, 2))?;
    m.insert("lattice_points".into(), json!(pts.len()));
    m.insert("hyperplanes".into(), json!(count));
    m.insert("fiber_count_histogram".into(), json!(hist));
    m.insert("all_ones".into(), json!(cert.overall));
    m.insert(
        "pencil".into(),
        json!({
            "base": "x^2+y^2+z^2+yz+2xz",
            "direction": "xy",
            "exceptions": e.count_with_multiplicity,
            "includes_infinity": e.includes_infinity,
            "factors": e.defining_polynomials,
        }),
    );
    Ok(Value::Object(m))
}

fn full_simplex_case(name: &str, p: &LatticePolytope, r: usize, check: Option<&str>, source: &str) -> Result<Value> {
    let pts = p.lattice_points();
    let (count, hist) = hyperplane_counts(&pts, r)?;
    let l4 = hist.iter().find(|(l, _)| *l == 4).map_or(0, |(_, n)| *n);
    let mut m = base_report(name, source);
    if check.is_some() {
        m.insert("count".into(), json!(count));
        if r == 3 {
            m.insert("l4_count".into(), json!(l4));
        }
        return Ok(Value::Object(m));
    }
    let cfg = build_configuration(&pts, r)?;
    let cond = check_embedding_conditions(p, &cfg, 1)?;
    m.insert("lattice_points".into(), json!(pts.len()));
    m.insert("hyperplanes".into(), json!(count));
    m.insert("fiber_count_histogram".into(), json!(hist));
    if r == 3 {
        m.insert("l4_count".into(), json!(l4));
    }
    m.insert("conditions".into(), json!(if cond.overall { "PASS".to_string() } else { "FAIL".to_string() }));
    if r == 2 {
        let cert = certify_embedding(p, &sample_coefficients(&pts, 1), 1)?;
        m.insert("sample".into(), json!(cert.overall));
    }
    Ok(Value::Object(m))
}

fn p3_small(check: Option<&str>) -> Result<Value> {
    let p = p3(3);
    let pts = p3_small_support();
    let (count, hist) = hyperplane_counts(&pts, 3)?;
    let mut m = base_report("p3-3h-small", "cubic surfaces in projective 3-space, eight-point support");
    m.insert("hyperplanes".into(), json!(count));
    if check.is_some() {
        return Ok(Value::Object(m));
    }
    let samples = 4;
    let mut certified = certify_embedding(&p, &ones(&pts), 1)?.is_certified();
    for seed in 1..samples {
        certified &= certify_embedding(&p, &sample_coefficients(&pts, seed), 1)?.is_certified();
    }
    m.insert("fiber_count_histogram".into(), json!(hist));
    m.insert("samples".into(), json!(samples));
    m.insert("all_nonzero_certified".into(), json!(certified));
    Ok(Value::Object(m))
}

fn conditions_verdict(p: &LatticePolytope, pts: &[LatticePoint], l: i64) -> Result<String> {
    let cfg = build_configuration(pts, 2)?;
    let report = check_embedding_conditions(p, &cfg, 1)?;
    Ok(match report.first_failure() {
        None => "PASS".into(),
        Some(f) => format!("FAIL({})", hirzebruch_edge_name(p, &f.face, l)),
    })
}

fn hirzebruch(l: i64) -> Result<Value> {
    let p = hirzebruch_polytope(l)?;
    let s = hirzebruch_support(l);
    let s_drop: Vec<LatticePoint> = s.iter().filter(|q| q.coords() != [2, 2]).cloned().collect();
    let mut m = base_report(&format!("hirzebruch:{l}"), "Hirzebruch surface, trapezoid with a = 2l+2, b = 2");
    m.insert("lattice_points".into(), json!(p.lattice_points().len()));
    m.insert("support".into(), json!(s.iter().map(|q| q.to_string()).collect::<Vec<_>>()));
    m.insert("conditions".into(), json!(conditions_verdict(&p, &s, l)?));
    m.insert("conditions_after_drop".into(), json!(conditions_verdict(&p, &s_drop, l)?));
    let refusal = match weighted_triangle(l, 2 * l + 1).and_then(|t| t.require_integral().map(|_| t)) {
        Ok(_) => "ACCEPTED".to_string(),
        Err(Error::NonIntegralPolytope(v)) => format!("REFUSED(non-integral vertex {v})"),
        Err(e) => return Err(e),
    };
    m.insert("odd_triangle".into(), json!(refusal));
    Ok(Value::Object(m))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        let r = run_case("p2-3h", Some("hyperplanes")).unwrap();
        assert_eq!(r["count"], 12);
        let r = run_case("p2-3h", None).unwrap();
        assert_eq!(r["lattice_points"], 10);
        assert_eq!(r["hyperplanes"], 12);
        let r = run_case("p3-3h-small", None).unwrap();
        assert_eq!(r["hyperplanes"], 16);
        assert_eq!(r["all_nonzero_certified"], true);
        assert!(matches!(run_case("p9", None), Err(Error::Parse(_))));
    }

    #[test]
    fn hirzebruch_cases() {
        for l in [1, 2] {
            let r = run_case(&format!("hirzebruch:{l}"), None).unwrap();
            assert_eq!(r["conditions"], "PASS");
            assert_eq!(r["conditions_after_drop"], "FAIL(top edge)");
        }
        let r = run_case("hirzebruch:2", None).unwrap();
        assert!(r["odd_triangle"].as_str().unwrap().starts_with("REFUSED"));
    }
}
