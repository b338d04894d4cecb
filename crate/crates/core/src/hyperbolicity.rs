//! Membership in the bad loci `Y_S` and `Y′_S`, face restrictions, the
//! face-wise embedding certificate, and the bounded subtorus search.

use serde::Serialize;

use crate::config::{
    build_configuration, check_embedding_conditions, checked_faces, enumerate_hyperplanes, DifferenceHyperplane,
    PointConfiguration, ConditionReport,
};
use crate::error::{Error, Result};
use crate::exec::{par_map, par_try_map};
use crate::field::{ArithResult, Field, GaussianRational as G};
use crate::laurent::{fiber_decomposition, CoefficientVector, LaurentPolynomial};
use crate::lattice::{splitting_along, LatticePoint};
use crate::polytope::{k_subsets, Face, LatticePolytope};
use crate::solver::{has_solution, solve_system, SolveResult, VariableDomain};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Locus {
    #[serde(rename = "Y")]
    Y,
    #[serde(rename = "Y'")]
    YPrime,
}

impl Locus {
    /// Number of fiber polynomials allowed to be nonzero at the witness.
    pub fn spared(self) -> usize {
        match self {
            Locus::Y => 1,
            Locus::YPrime => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Locus::Y => "Y",
            Locus::YPrime => "Y'",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MembershipVerdict {
    In,
    Out,
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipWitness {
    pub normal: LatticePoint,
    pub fiber_values: Vec<i64>,
    /// 1-based positions of the spared fibers.
    pub spared: Vec<usize>,
    pub result: SolveResult,
}

#[derive(Clone, Debug, Serialize)]
pub struct MembershipReport {
    pub verdict: MembershipVerdict,
    pub locus: Locus,
    pub face: Option<String>,
    pub witnesses: Vec<MembershipWitness>,
    pub hyperplanes_checked: usize,
    pub warnings: Vec<String>,
}

impl MembershipReport {
    pub fn is_in(&self) -> bool {
        self.verdict == MembershipVerdict::In
    }
}

/// A hit: hyperplane index and the 0-based spared fiber positions.
#[derive(Clone, Debug)]
pub(crate) struct Hit {
    pub hyperplane: usize,
    pub spared: Vec<usize>,
}

pub(crate) fn poly_is_zero_checked<F: Field>(q: &LaurentPolynomial<F>) -> ArithResult<bool> {
    for c in q.terms().values() {
        if !c.is_zero_checked()? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Spared sets (0-based, at most `spare` positions) for which the remaining
/// fiber polynomials have a common torus zero.
pub(crate) fn fiber_hits<F: Field>(
    qs: &[LaurentPolynomial<F>],
    spare: usize,
    exhaustive: bool,
) -> ArithResult<Vec<Vec<usize>>> {
    let n_vars = qs.first().map_or(0, |q| q.n_vars());
    let mut nonzero = Vec::new();
    let mut monomials = Vec::new();
    for (k, q) in qs.iter().enumerate() {
        if !poly_is_zero_checked(q)? {
            nonzero.push(k);
            if q.is_monomial() {
                monomials.push(k);
            }
        }
    }
    // a nonzero monomial has no torus zero, so it must be spared
    if monomials.len() > spare {
        return Ok(Vec::new());
    }
    if nonzero.len() <= spare {
        let mut spared = nonzero.clone();
        for k in 0..qs.len() {
            if spared.len() >= spare {
                break;
            }
            if !spared.contains(&k) {
                spared.push(k);
            }
        }
        spared.sort_unstable();
        return Ok(vec![spared]);
    }
    let dom = VariableDomain::torus(n_vars);
    let mut hits = Vec::new();
    for sub in k_subsets(nonzero.len(), spare) {
        let spared: Vec<usize> = sub.iter().map(|&i| nonzero[i]).collect();
        if !monomials.iter().all(|m| spared.contains(m)) {
            continue;
        }
        let system: Vec<LaurentPolynomial<F>> =
            nonzero.iter().filter(|k| !spared.contains(k)).map(|&k| qs[k].clone()).collect();
        if has_solution(&system, &dom)? {
            hits.push(spared);
            if !exhaustive {
                break;
            }
        }
    }
    Ok(hits)
}

/// Hyperplanes in search order: `l_H` ascending, then by normal.
pub(crate) fn search_order(mut hs: Vec<DifferenceHyperplane>) -> Vec<DifferenceHyperplane> {
    hs.sort_by(|a, b| (a.fiber_count(), &a.normal).cmp(&(b.fiber_count(), &b.normal)));
    hs
}

/// Configuration and hyperplanes of a coefficient vector, in search order.
pub(crate) fn membership_setup<F: Field>(a: &CoefficientVector<F>) -> Result<(PointConfiguration, Vec<DifferenceHyperplane>)> {
    let cfg = a.configuration()?;
    if cfg.span_dim() != a.rank() {
        return Err(Error::DegenerateConfiguration(format!(
            "support spans dimension {} < {}",
            cfg.span_dim(),
            a.rank()
        )));
    }
    let hs = if a.rank() == 0 { Vec::new() } else { search_order(enumerate_hyperplanes(&cfg)?) };
    Ok((cfg, hs))
}

/// All hits over the given hyperplanes (first one only unless `exhaustive`).
pub(crate) fn locus_hits<F: Field>(
    a: &CoefficientVector<F>,
    cfg: &PointConfiguration,
    hs: &[DifferenceHyperplane],
    locus: Locus,
    exhaustive: bool,
) -> ArithResult<Vec<Hit>> {
    if a.rank() == 0 {
        // a single point: the restriction is defined, hence outside
        return Ok(Vec::new());
    }
    let per_h = par_try_map(hs, |h| {
        let fs = fiber_decomposition(a, cfg, h).expect("configuration is full-dimensional");
        fiber_hits(&fs.polys, locus.spared(), exhaustive)
    })?;
    let mut out = Vec::new();
    for (i, spared_sets) in per_h.into_iter().enumerate() {
        for spared in spared_sets {
            out.push(Hit { hyperplane: i, spared });
            if !exhaustive {
                return Ok(out);
            }
        }
    }
    Ok(out)
}

fn witness_for(
    a: &CoefficientVector<G>,
    cfg: &PointConfiguration,
    h: &DifferenceHyperplane,
    spared: &[usize],
) -> Result<MembershipWitness> {
    let fs = fiber_decomposition(a, cfg, h)?;
    let system: Vec<LaurentPolynomial<G>> =
        fs.polys.iter().enumerate().filter(|(k, _)| !spared.contains(k)).map(|(_, q)| q.clone()).collect();
    let result = solve_system(&system, &VariableDomain::torus(a.rank() - 1))?;
    debug_assert!(result.exists());
    Ok(MembershipWitness {
        normal: h.normal.clone(),
        fiber_values: h.fiber_values.clone(),
        spared: spared.iter().map(|k| k + 1).collect(),
        result,
    })
}

fn report_from_hits(
    a: &CoefficientVector<G>,
    cfg: &PointConfiguration,
    hs: &[DifferenceHyperplane],
    hits: &[Hit],
    locus: Locus,
) -> Result<MembershipReport> {
    let witnesses =
        hits.iter().map(|hit| witness_for(a, cfg, &hs[hit.hyperplane], &hit.spared)).collect::<Result<Vec<_>>>()?;
    let mut warnings = Vec::new();
    if locus == Locus::YPrime {
        let need = a.rank() + 2;
        if let Some(h) = hs.iter().find(|h| h.fiber_count() < need) {
            warnings.push(format!("hyperplane {} has l_H = {} < {need}", h.normal, h.fiber_count()));
        }
    }
    Ok(MembershipReport {
        verdict: if witnesses.is_empty() { MembershipVerdict::Out } else { MembershipVerdict::In },
        locus,
        face: None,
        witnesses,
        hyperplanes_checked: hs.len(),
        warnings,
    })
}

/// Membership of `a` (with `S` = its keys) in `Y_S` or `Y′_S`.
pub fn check_membership(a: &CoefficientVector<G>, locus: Locus, exhaustive: bool) -> Result<MembershipReport> {
    if a.is_all_zero() {
        return Err(Error::InvalidInput("coefficient vector is identically zero".into()));
    }
    let (cfg, hs) = membership_setup(a)?;
    let hits = locus_hits(a, &cfg, &hs, locus, exhaustive)?;
    report_from_hits(a, &cfg, &hs, &hits, locus)
}

pub fn check_membership_y(a: &CoefficientVector<G>) -> Result<MembershipReport> {
    check_membership(a, Locus::Y, false)
}

pub fn check_membership_yprime(a: &CoefficientVector<G>) -> Result<MembershipReport> {
    check_membership(a, Locus::YPrime, false)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Restriction<F: Field = G> {
    Defined(CoefficientVector<F>),
    Undefined,
}

/// Keep the entries on `face`, in a lattice basis of the face's direction
/// space with the face origin at 0. `Undefined` if all kept entries vanish.
pub fn restrict_to_face<F: Field>(
    a: &CoefficientVector<F>,
    p: &LatticePolytope,
    face: &Face,
) -> Result<Restriction<F>> {
    match restrict_entries(a, p, face)? {
        Some(b) if !b.is_all_zero() => Ok(Restriction::Defined(b)),
        _ => Ok(Restriction::Undefined),
    }
}

/// The entries on `face` in face-local coordinates, zeros included
/// (`None` if no key lies on the face).
pub(crate) fn restrict_entries<F: Field>(
    a: &CoefficientVector<F>,
    p: &LatticePolytope,
    face: &Face,
) -> Result<Option<CoefficientVector<F>>> {
    let kept: Vec<(LatticePoint, F)> =
        a.entries().iter().filter(|(k, _)| p.on_face(face, k)).map(|(k, c)| (k.clone(), c.clone())).collect();
    if kept.is_empty() {
        return Ok(None);
    }
    if face.dim == p.rank() {
        return Ok(Some(CoefficientVector::from_pairs(p.rank(), a.ctx(), kept)?));
    }
    let basis = p.face_direction_basis(face);
    let origin = p.face_origin(face);
    let k = face.dim;
    let s = splitting_along(&basis, p.rank())?;
    let local = kept.into_iter().map(|(e, c)| (LatticePoint(s.map(&e.sub(&origin)).coords()[..k].to_vec()), c));
    Ok(Some(CoefficientVector::from_pairs(k, a.ctx(), local)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Overall {
    Certified,
    NotCertified,
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceCertificate {
    pub face: Face,
    pub description: String,
    pub defined: bool,
    pub report: Option<MembershipReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingCertificate {
    pub overall: Overall,
    pub strength: u8,
    pub conditions: ConditionReport,
    pub faces: Vec<FaceCertificate>,
    pub refused_faces: Vec<String>,
}

impl EmbeddingCertificate {
    pub fn is_certified(&self) -> bool {
        self.overall == Overall::Certified
    }
}

/// Face-wise certificate at strength 1 (`Y`) or 2 (`Y′`).
pub fn certify_embedding(p: &LatticePolytope, a: &CoefficientVector<G>, strength: u8) -> Result<EmbeddingCertificate> {
    certify_embedding_with(p, a, strength, false)
}

pub fn certify_embedding_with(
    p: &LatticePolytope,
    a: &CoefficientVector<G>,
    strength: u8,
    exhaustive: bool,
) -> Result<EmbeddingCertificate> {
    p.require_integral()?;
    if a.rank() != p.rank() {
        return Err(Error::InvalidInput(format!("coefficients have rank {}, polytope {}", a.rank(), p.rank())));
    }
    let cfg = build_configuration(&a.support(), p.rank())?;
    let conditions = check_embedding_conditions(p, &cfg, strength)?;
    if let Some(bad) = conditions.first_failure() {
        let msg = format!(
            "{}: {} support points, min l_H = {}, need {}",
            bad.description,
            bad.points_on_face,
            bad.min_fibers.map_or("-".to_string(), |m| m.to_string()),
            bad.required
        );
        return Err(if strength == 2 && check_embedding_conditions(p, &cfg, 1)?.overall {
            Error::StrengthConditionsNotMet(msg)
        } else {
            Error::ConditionsNotMet(msg)
        });
    }
    let locus = if strength == 1 { Locus::Y } else { Locus::YPrime };
    let faces: Vec<Face> = checked_faces(p).into_iter().cloned().collect();
    let results = par_map(&faces, |face| -> Result<FaceCertificate> {
        let description = p.describe_face(face);
        match restrict_to_face(a, p, face)? {
            Restriction::Undefined => Ok(FaceCertificate { face: face.clone(), description, defined: false, report: None }),
            Restriction::Defined(b) => {
                let mut report = check_membership(&b, locus, exhaustive)?;
                report.face = Some(description.clone());
                Ok(FaceCertificate { face: face.clone(), description, defined: true, report: Some(report) })
            }
        }
    });
    let faces = results.into_iter().collect::<Result<Vec<_>>>()?;
    let refused_faces: Vec<String> = faces.iter().filter(|f| !f.defined).map(|f| f.description.clone()).collect();
    let ok = refused_faces.is_empty() && faces.iter().all(|f| f.report.as_ref().is_some_and(|r| !r.is_in()));
    Ok(EmbeddingCertificate {
        overall: if ok { Overall::Certified } else { Overall::NotCertified },
        strength,
        conditions,
        faces,
        refused_faces,
    })
}

/// Canonical primitive vectors of length `r` with entries in `[-bound, bound]`.
pub fn bounded_weights(r: usize, bound: i64) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    let mut cur = vec![-bound; r];
    loop {
        let w = LatticePoint(cur.clone());
        if !w.is_zero() && w.is_primitive() && w.canonical_primitive() == w {
            out.push(w);
        }
        let mut k = r;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < bound {
                cur[k] += 1;
                for c in cur.iter_mut().skip(k + 1) {
                    *c = -bound;
                }
                break;
            }
        }
    }
}

/// Search one-parameter subtori `s ↦ c·s^w` with `|w_i| ≤ weight_bound`:
/// IN iff for some `w` and torus `c` the restriction of the polynomial is
/// zero or a single term, i.e. all but one `w`-group vanish at `c`.
pub fn bounded_subtorus_oracle(a: &CoefficientVector<G>, weight_bound: i64) -> Result<MembershipReport> {
    let r = a.rank();
    if !(2..=3).contains(&r) {
        return Err(Error::UnsupportedRank(r));
    }
    let cfg = a.configuration()?;
    if cfg.span_dim() != r {
        return Err(Error::DegenerateConfiguration(format!("support spans dimension {} < {r}", cfg.span_dim())));
    }
    let ws = bounded_weights(r, weight_bound);
    let hs: Vec<DifferenceHyperplane> =
        ws.iter().map(|w| DifferenceHyperplane::from_functional(&cfg, w)).collect::<Result<Vec<_>>>()?;
    let hits = locus_hits(a, &cfg, &hs, Locus::Y, false)?;
    report_from_hits(a, &cfg, &hs, &hits, Locus::Y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{polytope_from_divisor, standard};

    /// Labels: a3 (0,0), b2 (1,0), a1 (2,0), b1 (0,1), b3 (1,1), a2 (0,2).
    fn p2_2h(a1: i64, a2: i64, a3: i64, b1: i64, b2: i64, b3: i64) -> CoefficientVector<G> {
        CoefficientVector::from_pairs(
            2,
            &(),
            [
                ([0, 0], a3),
                ([1, 0], b2),
                ([2, 0], a1),
                ([0, 1], b1),
                ([1, 1], b3),
                ([0, 2], a2),
            ]
            .into_iter()
            .map(|(k, v)| (LatticePoint(k.to_vec()), G::from_i64(v))),
        )
        .unwrap()
    }

    /// The six explicit conditions for the conic case.
    fn conic_in_y(a1: i64, a2: i64, a3: i64, b1: i64, b2: i64, b3: i64) -> bool {
        a1 == 0
            || a2 == 0
            || a3 == 0
            || a1 * b1 * b1 + a2 * b2 * b2 == b1 * b2 * b3
            || a2 * b2 * b2 + a3 * b3 * b3 == b1 * b2 * b3
            || a3 * b3 * b3 + a1 * b1 * b1 == b1 * b2 * b3
    }

    #[test]
    fn conic_examples() {
        assert!(check_membership_y(&p2_2h(1, 1, 1, 1, 1, 2)).unwrap().is_in());
        assert!(check_membership_y(&p2_2h(0, 1, 1, 1, 1, 1)).unwrap().is_in());
        let out = check_membership_y(&p2_2h(1, 1, 1, 1, 1, 1)).unwrap();
        assert!(!out.is_in());
        assert_eq!(out.hyperplanes_checked, 6);
    }

    #[test]
    fn conic_matches_explicit_conditions() {
        let vals = [-2, -1, 0, 1, 2];
        let mut n = 0;
        for &a1 in &[1, 2, 0] {
            for &b1 in &vals {
                for &b2 in &vals {
                    for &b3 in &vals {
                        let got = check_membership_y(&p2_2h(a1, 1, 1, b1, b2, b3)).unwrap().is_in();
                        assert_eq!(got, conic_in_y(a1, 1, 1, b1, b2, b3), "a1={a1} b=({b1},{b2},{b3})");
                        n += 1;
                    }
                }
            }
        }
        assert_eq!(n, 375);
    }

    #[test]
    fn witnesses_verify() {
        let a = p2_2h(1, 1, 1, 1, 1, 2);
        let rep = check_membership(&a, Locus::Y, true).unwrap();
        assert!(!rep.witnesses.is_empty());
        for w in &rep.witnesses {
            assert!(w.result.exists());
        }
    }

    #[test]
    fn single_fiber_support_is_in_yprime() {
        let a = CoefficientVector::from_strings(2, &[(&[0, 0], "1"), (&[1, 0], "2"), (&[0, 1], "3")]).unwrap();
        assert!(check_membership_yprime(&a).unwrap().is_in());
    }

    #[test]
    fn restriction_to_faces() {
        let p = polytope_from_divisor(&standard::projective_space(2, 2)).unwrap();
        let a = p2_2h(1, 2, 3, 4, 5, 6);
        let top = p.top_face();
        assert_eq!(restrict_to_face(&a, &p, top).unwrap(), Restriction::Defined(a.clone()));
        let bottom = p
            .enumerate_faces()
            .iter()
            .find(|f| f.dim == 1 && p.face_lattice_points(f).iter().all(|q| q[1] == 0))
            .unwrap();
        match restrict_to_face(&a, &p, bottom).unwrap() {
            Restriction::Defined(b) => {
                assert_eq!(b.rank(), 1);
                let mut vals: Vec<String> = b.entries().values().map(|c| c.to_string()).collect();
                vals.sort();
                assert_eq!(vals, vec!["1", "3", "5"]);
            }
            Restriction::Undefined => panic!("restriction should be defined"),
        }
        let z = p2_2h(0, 1, 0, 1, 0, 1);
        assert_eq!(restrict_to_face(&z, &p, bottom).unwrap(), Restriction::Undefined);
    }

    #[test]
    fn certify_conic() {
        let p = polytope_from_divisor(&standard::projective_space(2, 2)).unwrap();
        let cert = certify_embedding(&p, &p2_2h(1, 1, 1, 1, 1, 1), 1).unwrap();
        assert!(cert.is_certified());
        let cert = certify_embedding(&p, &p2_2h(1, 1, 1, 1, 1, 2), 1).unwrap();
        assert!(!cert.is_certified());
        // strength 2 needs l_H >= dim + 2 = 4 on the triangle, which fails
        assert!(matches!(certify_embedding(&p, &p2_2h(1, 1, 1, 1, 1, 1), 2), Err(Error::StrengthConditionsNotMet(_))));
    }

    #[test]
    fn oracle_examples() {
        assert!(!bounded_subtorus_oracle(&p2_2h(1, 1, 1, 1, 1, 1), 8).unwrap().is_in());
        assert!(bounded_subtorus_oracle(&p2_2h(0, 1, 1, 1, 2, 3), 8).unwrap().is_in());
        assert_eq!(bounded_weights(2, 1).len(), 4);
    }
}
