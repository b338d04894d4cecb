//! Pencils of divisors and their exception sets, single-coefficient
//! deformations, and similar deformations with multiplicative rank.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::algebraic::{isolate_roots, AlgebraicNumber};
use crate::bipoly::BiPoly;
use crate::config::{
    build_configuration, check_embedding_conditions, checked_faces, enumerate_hyperplanes, DifferenceHyperplane,
};
use crate::error::{Error, Result};
use crate::exec::{par_map, par_try_map};
use crate::ext::{split_components, Ext};
use crate::field::{ArithResult, Field, GaussianRational as G};
use crate::hyperbolicity::{
    certify_embedding, locus_hits, membership_setup, restrict_entries, search_order, Locus,
};
use crate::laurent::{fiber_decomposition, CoefficientVector, LaurentPolynomial};
use crate::lattice::{hermite_normal_form, IntegerMatrix, LatticePoint};
use crate::polytope::{Face, LatticePolytope};
use crate::ring::formal_resultant;
use crate::solver::{has_solution, project_onto_first, Domain, Projection, VariableDomain};
use crate::upoly::UPoly;

fn ser_poly<S: Serializer>(p: &UPoly<G>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string_in("t"))
}

/// `a(s:t) = s·α + t·β` on a common support.
#[derive(Clone, Debug, PartialEq)]
pub struct Pencil {
    base: CoefficientVector<G>,
    direction: CoefficientVector<G>,
}

impl Pencil {
    pub fn new(base: &CoefficientVector<G>, direction: &CoefficientVector<G>) -> Result<Self> {
        if base.rank() != direction.rank() {
            return Err(Error::NotAPencil("base and direction have different ranks".into()));
        }
        let b = base.zero_extend(&direction.support());
        let d = direction.zero_extend(&base.support());
        if b.is_all_zero() || d.is_all_zero() {
            return Err(Error::NotAPencil("base or direction vanishes".into()));
        }
        let (k0, c0) = b.entries().iter().find(|(_, c)| !c.is_zero()).expect("nonzero entry");
        let ratio = d.get(k0).expect("same keys").div(c0)?;
        if b.entries().iter().all(|(k, c)| d.get(k).expect("same keys") == &c.mul(&ratio)) {
            return Err(Error::NotAPencil("base and direction are proportional".into()));
        }
        Ok(Pencil { base: b, direction: d })
    }

    pub fn base(&self) -> &CoefficientVector<G> {
        &self.base
    }

    pub fn direction(&self) -> &CoefficientVector<G> {
        &self.direction
    }

    /// `α + t·β`.
    pub fn at(&self, t: &G) -> CoefficientVector<G> {
        self.base.add_scaled(&self.direction, t)
    }

    /// The chart around `t = ∞`: `β + s·α`.
    pub fn reversed(&self) -> Pencil {
        Pencil { base: self.direction.clone(), direction: self.base.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExceptionFactor {
    #[serde(serialize_with = "ser_poly")]
    pub polynomial: UPoly<G>,
    pub multiplicity: usize,
}

/// Exceptional parameters found for one (face, hyperplane, spared fiber),
/// or for the face restriction becoming undefined (`normal = None`).
#[derive(Clone, Debug, Serialize)]
pub struct ExceptionContribution {
    pub face: String,
    pub normal: Option<LatticePoint>,
    pub spared: Vec<usize>,
    pub factors: Vec<ExceptionFactor>,
}

impl ExceptionContribution {
    pub fn degree(&self) -> usize {
        self.factors.iter().map(|f| f.polynomial.deg() * f.multiplicity).sum()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExceptionSet {
    pub contributions: Vec<ExceptionContribution>,
    /// Pairwise coprime square-free factors with multiplicity.
    pub defining_polynomials: Vec<ExceptionFactor>,
    pub roots: Vec<AlgebraicNumber>,
    pub includes_infinity: bool,
    pub infinity_multiplicity: usize,
    pub count_with_multiplicity: usize,
    pub distinct_count: usize,
}

impl ExceptionSet {
    /// Product of the defining polynomials with multiplicity.
    pub fn exception_polynomial(&self) -> UPoly<G> {
        self.defining_polynomials.iter().fold(UPoly::one(&()), |acc, f| acc.mul(&f.polynomial.pow(f.multiplicity)))
    }
}

/// Merge square-free factor lists: each root keeps its largest
/// multiplicity. Factors are refined to a coprime basis, then grouped by
/// multiplicity.
pub fn merge_factors<'a>(lists: impl IntoIterator<Item = &'a ExceptionFactor>) -> Result<Vec<ExceptionFactor>> {
    let mut basis: Vec<(UPoly<G>, usize)> = Vec::new();
    for f in lists {
        let mut pending = vec![(f.polynomial.squarefree_part()?, f.multiplicity)];
        while let Some((q, k)) = pending.pop() {
            if q.deg() == 0 {
                continue;
            }
            let mut split = None;
            for (i, (p, _)) in basis.iter().enumerate() {
                let g = p.gcd(&q)?;
                if g.deg() > 0 {
                    split = Some((i, g));
                    break;
                }
            }
            match split {
                None => basis.push((q, k)),
                Some((i, g)) => {
                    let (p, m) = basis.remove(i);
                    let p_rest = p.exact_div(&g)?.monic()?;
                    if p_rest.deg() > 0 {
                        basis.push((p_rest, m));
                    }
                    pending.push((q.exact_div(&g)?.monic()?, k));
                    basis.push((g.monic()?, m.max(k)));
                }
            }
        }
    }
    let mut grouped: BTreeMap<usize, UPoly<G>> = BTreeMap::new();
    for (p, k) in basis {
        let e = grouped.entry(k).or_insert_with(|| UPoly::one(&()));
        *e = e.mul(&p);
    }
    Ok(grouped.into_iter().map(|(k, p)| ExceptionFactor { polynomial: p, multiplicity: k }).collect())
}

// ---------------------------------------------------------------------------
// Parameter sets of (t, u) systems
// ---------------------------------------------------------------------------

/// Lift a fiber polynomial in `u` to `(t, u)`, multiplied by `t^k`.
fn lift(q: &LaurentPolynomial<G>, k: i64) -> LaurentPolynomial<G> {
    let n = q.n_vars() + 1;
    LaurentPolynomial::from_terms(
        n,
        &(),
        q.terms().iter().map(|(e, c)| {
            let mut v = vec![k];
            v.extend_from_slice(e.coords());
            (LatticePoint(v), c.clone())
        }),
    )
}

/// `Σ` coefficient of a polynomial whose `u`-support is a single exponent,
/// as a polynomial in `t`.
fn monomial_coefficient(q: &LaurentPolynomial<G>) -> Option<UPoly<G>> {
    let mut exps = q.terms().keys().map(|e| e.coords()[1..].to_vec());
    let first = exps.next()?;
    if exps.any(|e| e != first) {
        return None;
    }
    let mut coeffs = Vec::new();
    for (e, c) in q.terms() {
        let k = e[0] as usize;
        if coeffs.len() <= k {
            coeffs.resize(k + 1, G::zero(&()));
        }
        coeffs[k] = c.clone();
    }
    Some(UPoly::new(&(), coeffs))
}

/// Parameter values `t ∈ ℂ` for which the system in `(t, u)` (with `u` in
/// the torus) has a solution: `None` if all but finitely many do.
fn parameter_set(system: &[LaurentPolynomial<G>]) -> Result<Option<Vec<ExceptionFactor>>> {
    let Some(first) = system.first() else {
        return Ok(None);
    };
    let m = first.n_vars() - 1;
    match m {
        0 => {
            let mut g = UPoly::zero(&());
            for p in system {
                g = g.gcd(&p.to_upoly(true))?;
            }
            if g.is_zero() {
                return Ok(None);
            }
            Ok(Some(factor_list(&g, 1)?))
        }
        1 => {
            let mut trace = Vec::new();
            match project_onto_first(system, [Domain::Affine, Domain::NonZero], &mut trace)? {
                Projection::Infinite(_) => Ok(None),
                Projection::Finite(comps) => Ok(Some(
                    comps
                        .into_iter()
                        .map(|c| ExceptionFactor { polynomial: c.modulus, multiplicity: c.multiplicity })
                        .collect(),
                )),
            }
        }
        2 => parameter_set_two_unknowns(system),
        _ => Err(Error::DimensionTooHigh(m + 1)),
    }
}

fn factor_list(g: &UPoly<G>, mult: usize) -> Result<Vec<ExceptionFactor>> {
    if g.deg() == 0 {
        return Ok(Vec::new());
    }
    Ok(g.squarefree_decomposition()?
        .into_iter()
        .map(|(p, k)| ExceptionFactor { polynomial: p, multiplicity: k * mult })
        .collect())
}

/// Coefficient rows in `u₂` (index `var`), each a polynomial in `(t, u₁)`.
fn tri_rows(p: &LaurentPolynomial<G>, elim: usize) -> Vec<BiPoly<G>> {
    let keep = 3 - elim; // the other unknown (1 or 2)
    let q = p.clear_monomials(&[true, false, false]);
    let mut rows: Vec<Vec<(usize, usize, G)>> = Vec::new();
    for (e, c) in q.terms() {
        let j = e[elim] as usize;
        if rows.len() <= j {
            rows.resize(j + 1, Vec::new());
        }
        rows[j].push((e[0] as usize, e[keep] as usize, c.clone()));
    }
    rows.into_iter().map(|r| BiPoly::from_terms(&(), r)).collect()
}

/// Polynomial in `t` vanishing wherever the system has a solution with
/// `u` in the torus: `u_elim` is eliminated against a pivot, then `u` by
/// pairwise resultants. `None` if every such resultant vanishes.
fn chain_candidates(polys: &[LaurentPolynomial<G>], elim: usize) -> Result<Option<UPoly<G>>> {
    let rows: Vec<Vec<BiPoly<G>>> = polys.iter().map(|p| tri_rows(p, elim)).collect();
    // pivot: the polynomial of least positive degree in u_elim
    let Some(pivot) = (0..rows.len()).filter(|&i| rows[i].len() > 1).min_by_key(|&i| (rows[i].len(), i)) else {
        return Ok(None);
    };
    let a = &rows[pivot];
    let mut eliminated: Vec<BiPoly<G>> = Vec::new();
    for (i, b) in rows.iter().enumerate() {
        if b.len() == 1 {
            eliminated.push(b[0].clone());
        } else if i != pivot {
            eliminated.push(formal_resultant(&(), a, a.len() - 1, b, b.len() - 1)?);
        }
    }
    let mut cleaned = Vec::new();
    for e in eliminated {
        if e.is_zero() {
            continue;
        }
        let ky = e.y_power()?;
        let q = e.divide_monomial(0, ky);
        if !cleaned.contains(&q) {
            cleaned.push(q);
        }
    }
    let mut cand: Option<UPoly<G>> = None;
    let mut absorb = |r: UPoly<G>| -> Result<()> {
        if !r.is_zero() {
            cand = Some(match cand.take() {
                None => r,
                Some(c) => c.gcd(&r)?,
            });
        }
        Ok(())
    };
    for (i, a) in cleaned.iter().enumerate() {
        if a.deg_y() == 0 {
            absorb(a.row(0))?;
            continue;
        }
        for b in cleaned[i + 1..].iter().filter(|b| b.deg_y() > 0) {
            absorb(a.resultant_y(b)?)?;
        }
    }
    Ok(match cand {
        Some(c) if c.deg() == 0 => Some(UPoly::one(&())),
        Some(c) => Some(c.monic()?),
        None => None,
    })
}

fn specialize(p: &LaurentPolynomial<G>, ctx: &std::sync::Arc<crate::ext::ExtCtx<G>>) -> LaurentPolynomial<Ext<G>> {
    let theta = Ext::generator(ctx);
    let mut out = LaurentPolynomial::zero(p.n_vars() - 1, ctx);
    for (e, c) in p.terms() {
        let coeff = Ext::from_gaussian(ctx, c).mul(&theta.pow(e[0] as u64));
        out.add_term(LatticePoint(e.coords()[1..].to_vec()), coeff);
    }
    out
}

/// Keep the parts of `candidates` over which the specialized system has a
/// torus solution.
fn verify_candidates(system: &[LaurentPolynomial<G>], candidates: &UPoly<G>) -> Result<Vec<ExceptionFactor>> {
    if candidates.deg() == 0 {
        return Ok(Vec::new());
    }
    let m = system[0].n_vars() - 1;
    let dom = VariableDomain::torus(m);
    let sq = candidates.squarefree_part()?;
    let parts = split_components(&sq, |ctx| {
        let spec: Vec<LaurentPolynomial<Ext<G>>> = system.iter().map(|p| specialize(p, ctx)).collect();
        has_solution(&spec, &dom)
    })?;
    Ok(parts
        .into_iter()
        .filter(|(_, ok)| *ok)
        .map(|(p, _)| ExceptionFactor { polynomial: p, multiplicity: 1 })
        .collect())
}

fn parameter_set_two_unknowns(system: &[LaurentPolynomial<G>]) -> Result<Option<Vec<ExceptionFactor>>> {
    // polynomials monomial in u force their t-coefficient to vanish
    let mut forced: Option<UPoly<G>> = None;
    let mut rest = Vec::new();
    for p in system {
        match monomial_coefficient(p) {
            Some(c) => forced = Some(forced.map_or(Ok(c.clone()), |f: UPoly<G>| f.gcd(&c))?),
            None => rest.push(p.clone()),
        }
    }
    if let Some(f) = forced {
        if f.is_zero() {
            return parameter_set_two_unknowns(&rest).map(|o| o.or(Some(Vec::new())));
        }
        let f = if f.deg() == 0 { f } else { f.monic()? };
        if rest.is_empty() {
            return Ok(Some(factor_list(&f, 1)?));
        }
        return Ok(Some(verify_candidates(system, &f)?));
    }
    if rest.len() <= 1 {
        return Ok(None);
    }
    // candidates are a superset; exact verification removes spurious roots
    let mut candidates = chain_candidates(&rest, 2)?;
    if candidates.is_none() {
        candidates = chain_candidates(&rest, 1)?;
    }
    match candidates {
        Some(c) => Ok(Some(verify_candidates(&rest, &c)?)),
        None => {
            // every elimination has a positive-dimensional projection: test a
            // few parameters directly
            for t0 in [G::from_ratio(7, 3), G::from_ratio(-11, 5), G::from_ratio(13, 17)] {
                let spec: Vec<LaurentPolynomial<G>> = rest.iter().map(|p| specialize_at(p, &t0)).collect();
                if has_solution(&spec, &VariableDomain::torus(2))? {
                    return Ok(None);
                }
            }
            Err(Error::SolverFailure("could not isolate exceptional parameters".into()))
        }
    }
}

fn specialize_at(p: &LaurentPolynomial<G>, t: &G) -> LaurentPolynomial<G> {
    let mut out = LaurentPolynomial::zero(p.n_vars() - 1, &());
    for (e, c) in p.terms() {
        let v = if e[0] >= 0 { c.mul(&t.pow(e[0] as u64)) } else { c.mul(&t.pow((-e[0]) as u64).inv().expect("t != 0")) };
        out.add_term(LatticePoint(e.coords()[1..].to_vec()), v);
    }
    out
}

// ---------------------------------------------------------------------------
// Exception sets
// ---------------------------------------------------------------------------

type HyperplaneFilter<'a> = &'a (dyn Fn(&DifferenceHyperplane) -> bool + Sync);

/// Contributions of one face; `filter` restricts the hyperplanes examined.
fn face_contributions(
    p: &LatticePolytope,
    pencil: &Pencil,
    face: &Face,
    filter: HyperplaneFilter<'_>,
) -> Result<Vec<ExceptionContribution>> {
    let description = p.describe_face(face);
    let (Some(ra), Some(rb)) = (restrict_entries(pencil.base(), p, face)?, restrict_entries(pencil.direction(), p, face)?)
    else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    // the restriction is undefined where every entry vanishes
    let mut g = UPoly::zero(&());
    for (k, a) in ra.entries() {
        let b = rb.get(k).cloned().unwrap_or_else(|| G::zero(&()));
        g = g.gcd(&UPoly::from_gaussians(vec![a.clone(), b]))?;
    }
    if !g.is_zero() && g.deg() > 0 {
        out.push(ExceptionContribution {
            face: description.clone(),
            normal: None,
            spared: Vec::new(),
            factors: factor_list(&g, 1)?,
        });
    }
    if face.dim == 0 {
        return Ok(out);
    }
    let cfg = build_configuration(&ra.support(), face.dim)?;
    if cfg.span_dim() < face.dim {
        return Ok(out);
    }
    let hs: Vec<DifferenceHyperplane> =
        search_order(enumerate_hyperplanes(&cfg)?).into_iter().filter(|h| filter(h)).collect();
    let per_h = par_try_map(&hs, |h| -> Result<Vec<ExceptionContribution>> {
        let fa = fiber_decomposition(&ra, &cfg, h)?.polys;
        let fb = fiber_decomposition(&rb, &cfg, h)?.polys;
        let qs: Vec<LaurentPolynomial<G>> = fa.iter().zip(&fb).map(|(a, b)| lift(a, 0).add(&lift(b, 1))).collect();
        let nonzero: Vec<usize> = (0..qs.len()).filter(|&k| !qs[k].is_zero()).collect();
        if nonzero.len() <= 1 {
            return Err(Error::BaseInBadLocus(format!("{description}: every member of the pencil is in Y")));
        }
        let mut contribs = Vec::new();
        for &j in &nonzero {
            let system: Vec<LaurentPolynomial<G>> = nonzero.iter().filter(|&&k| k != j).map(|&k| qs[k].clone()).collect();
            match parameter_set(&system)? {
                None => {
                    return Err(Error::BaseInBadLocus(format!(
                        "{description}, hyperplane {}: all but finitely many members are in Y",
                        h.normal
                    )))
                }
                Some(factors) if !factors.is_empty() => contribs.push(ExceptionContribution {
                    face: description.clone(),
                    normal: Some(h.normal.clone()),
                    spared: vec![j + 1],
                    factors,
                }),
                Some(_) => {}
            }
        }
        Ok(contribs)
    })?;
    out.extend(per_h.into_iter().flatten());
    Ok(out)
}

fn all_contributions(p: &LatticePolytope, pencil: &Pencil) -> Result<Vec<ExceptionContribution>> {
    let faces: Vec<Face> = checked_faces(p).into_iter().cloned().collect();
    let all = &|_: &DifferenceHyperplane| true;
    let per_face = par_map(&faces, |f| face_contributions(p, pencil, f, all));
    Ok(per_face.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}

/// Exceptional members `t ∈ ℙ¹` of the pencil `α + t·β` (strength 1).
pub fn exception_set(p: &LatticePolytope, pencil: &Pencil) -> Result<ExceptionSet> {
    if pencil.base().rank() != p.rank() {
        return Err(Error::InvalidInput("pencil and polytope have different ranks".into()));
    }
    let base_cert = certify_embedding(p, pencil.base(), 1)?;
    if !base_cert.is_certified() {
        return Err(Error::BaseInBadLocus("the base member is not certified".into()));
    }
    let contributions = all_contributions(p, pencil)?;
    let defining_polynomials = merge_factors(contributions.iter().flat_map(|c| c.factors.iter()))?;
    let infinity_multiplicity = infinity_multiplicity(p, pencil)?;
    let finite: usize = defining_polynomials.iter().map(|f| f.polynomial.deg() * f.multiplicity).sum();
    let mut roots: Vec<AlgebraicNumber> = Vec::new();
    for f in &defining_polynomials {
        roots.extend(isolate_roots(&f.polynomial));
    }
    let distinct = defining_polynomials.iter().map(|f| f.polynomial.deg()).sum::<usize>()
        + usize::from(infinity_multiplicity > 0);
    Ok(ExceptionSet {
        contributions,
        defining_polynomials,
        roots,
        includes_infinity: infinity_multiplicity > 0,
        infinity_multiplicity,
        count_with_multiplicity: finite + infinity_multiplicity,
        distinct_count: distinct,
    })
}

/// Multiplicity of `t = ∞`, read off at `s = 0` in the chart `β + s·α`.
fn infinity_multiplicity(p: &LatticePolytope, pencil: &Pencil) -> Result<usize> {
    let beta = pencil.direction();
    let faces: Vec<Face> = checked_faces(p).into_iter().cloned().collect();
    let mut bad = false;
    for f in &faces {
        match restrict_entries(beta, p, f)? {
            Some(b) if !b.is_all_zero() => {
                let (cfg, hs) = membership_setup(&b)?;
                if !locus_hits(&b, &cfg, &hs, Locus::Y, false)?.is_empty() {
                    bad = true;
                }
            }
            _ => return Ok(1),
        }
        if bad {
            break;
        }
    }
    if !bad {
        return Ok(0);
    }
    let rev = pencil.reversed();
    let mut mult = 0;
    for f in &faces {
        let all = &|_: &DifferenceHyperplane| true;
        for c in face_contributions(p, &rev, f, all)? {
            for fac in &c.factors {
                if fac.polynomial.coeff(0).is_zero() {
                    mult = mult.max(fac.multiplicity);
                }
            }
        }
    }
    Ok(mult.max(1))
}

#[derive(Clone, Debug, Serialize)]
pub struct HyperplaneDegree {
    pub normal: LatticePoint,
    pub fiber_count: usize,
    pub degree: usize,
    pub factors: Vec<ExceptionFactor>,
}

/// Degree (with multiplicity) of the exceptional parameters contributed by
/// each selected hyperplane of `face`, without the base-point check.
pub fn hyperplane_exception_degrees(
    p: &LatticePolytope,
    pencil: &Pencil,
    face: &Face,
    filter: HyperplaneFilter<'_>,
) -> Result<Vec<HyperplaneDegree>> {
    let contribs = face_contributions(p, pencil, face, filter)?;
    let ra = restrict_entries(pencil.base(), p, face)?.ok_or_else(|| Error::InvalidInput("face has no support".into()))?;
    let cfg = build_configuration(&ra.support(), face.dim)?;
    let hs: Vec<DifferenceHyperplane> =
        search_order(enumerate_hyperplanes(&cfg)?).into_iter().filter(|h| filter(h)).collect();
    hs.iter()
        .map(|h| {
            let factors = merge_factors(
                contribs.iter().filter(|c| c.normal.as_ref() == Some(&h.normal)).flat_map(|c| c.factors.iter()),
            )?;
            let degree = factors.iter().map(|f| f.polynomial.deg() * f.multiplicity).sum();
            Ok(HyperplaneDegree { normal: h.normal.clone(), fiber_count: h.fiber_count(), degree, factors })
        })
        .collect()
}

/// Is `α + θ·β` in `Y` on some face (or undefined there), for every root
/// `θ` of `modulus`?
pub fn pencil_in_locus_at(p: &LatticePolytope, pencil: &Pencil, modulus: &UPoly<G>) -> Result<bool> {
    let faces: Vec<Face> = checked_faces(p).into_iter().cloned().collect();
    let mut setups = Vec::new();
    for f in &faces {
        if let Some(ra) = restrict_entries(pencil.base(), p, f)? {
            let rb = restrict_entries(pencil.direction(), p, f)?.expect("same keys");
            let cfg = build_configuration(&ra.support(), f.dim)?;
            let hs = if f.dim == 0 || cfg.span_dim() < f.dim { Vec::new() } else { search_order(enumerate_hyperplanes(&cfg)?) };
            setups.push((ra, rb, cfg, hs));
        }
    }
    let parts = split_components(&modulus.squarefree_part()?, |ctx| -> ArithResult<bool> {
        let theta = Ext::generator(ctx);
        for (ra, rb, cfg, hs) in &setups {
            let a = ra.map(ctx, |c| Ext::from_gaussian(ctx, c));
            let b = rb.map(ctx, |c| Ext::from_gaussian(ctx, c));
            let v = a.add_scaled(&b, &theta);
            let mut undefined = true;
            for c in v.entries().values() {
                if !c.is_zero_checked()? {
                    undefined = false;
                    break;
                }
            }
            if undefined || (!hs.is_empty() && !locus_hits(&v, cfg, hs, Locus::Y, false)?.is_empty()) {
                return Ok(true);
            }
        }
        Ok(false)
    })?;
    Ok(parts.iter().all(|(_, ok)| *ok))
}

// ---------------------------------------------------------------------------
// Single-coefficient deformations
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct DeformationEntry {
    pub face: String,
    pub normal: LatticePoint,
    /// 1-based fiber containing `I₀` (`None` if `I₀` is not on the face).
    pub varying_fiber: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeformationCertificate {
    pub verdict: String,
    pub varying_point: LatticePoint,
    pub entries: Vec<DeformationEntry>,
}

/// Certify that every member of `t·z^{I₀} + Σ_{I≠I₀} a_I z^I` is outside `Y`
/// on every face, from `a ∉ Y′`: only the fiber through `I₀` depends on `t`.
pub fn verify_single_coefficient_deformation(
    p: &LatticePolytope,
    a: &CoefficientVector<G>,
    i0: &LatticePoint,
) -> Result<DeformationCertificate> {
    if i0.rank() != p.rank() || !p.contains(i0) {
        return Err(Error::InvalidInput(format!("{i0} is not a lattice point of the polytope")));
    }
    let a = a.zero_extend(std::slice::from_ref(i0));
    let cfg = build_configuration(&a.support(), p.rank())?;
    let cond = check_embedding_conditions(p, &cfg, 2)?;
    if let Some(bad) = cond.first_failure() {
        return Err(Error::StrengthConditionsNotMet(format!(
            "{}: min l_H = {}, need {}",
            bad.description,
            bad.min_fibers.map_or("-".to_string(), |m| m.to_string()),
            bad.required
        )));
    }
    let cert = certify_embedding(p, &a, 2)?;
    if !cert.is_certified() {
        let face = cert
            .faces
            .iter()
            .find(|f| !f.defined || f.report.as_ref().is_some_and(|r| r.is_in()))
            .map_or(String::new(), |f| f.description.clone());
        return Err(Error::BaseInYprime(face));
    }
    let mut entries = Vec::new();
    for face in checked_faces(p) {
        let description = p.describe_face(face);
        let Some(r) = restrict_entries(&a, p, face)? else { continue };
        if face.dim == 0 {
            continue;
        }
        let fcfg = build_configuration(&r.support(), face.dim)?;
        // the marker vector e_{I₀} restricted to the face locates I₀ locally
        let marker = CoefficientVector::from_pairs(p.rank(), &(), vec![(i0.clone(), G::one(&()))])?;
        let local = restrict_entries(&marker, p, face)?.map(|m| m.support()[0].clone());
        let pos = local.as_ref().and_then(|q| fcfg.index_of(q));
        for h in search_order(enumerate_hyperplanes(&fcfg)?) {
            let varying = pos.and_then(|i| h.fibers.iter().position(|f| f.contains(&i)).map(|k| k + 1));
            entries.push(DeformationEntry { face: description.clone(), normal: h.normal.clone(), varying_fiber: varying });
        }
    }
    Ok(DeformationCertificate { verdict: "ALL_T_SAFE".into(), varying_point: i0.clone(), entries })
}

// ---------------------------------------------------------------------------
// Multiplicative rank and similar deformations
// ---------------------------------------------------------------------------

fn ser_rats<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

fn ser_matrix<S: Serializer>(m: &IntegerMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq((0..m.rows()).map(|i| m.row(i).iter().map(|x| x.to_string()).collect::<Vec<_>>()))
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplicativeProfile {
    #[serde(serialize_with = "ser_rats")]
    pub lambda: Vec<BigRational>,
    pub rank: usize,
    #[serde(serialize_with = "ser_rats")]
    pub generators: Vec<BigRational>,
    /// `λ_i = Π_j μ_j^{c_ij}`.
    #[serde(serialize_with = "ser_matrix")]
    pub exponent_matrix: IntegerMatrix,
}

impl MultiplicativeProfile {
    /// Recompute `Π_j μ_j^{c_ij}` exactly.
    pub fn reconstruct(&self) -> Vec<BigRational> {
        (0..self.lambda.len())
            .map(|i| {
                self.generators.iter().enumerate().fold(BigRational::one(), |acc, (j, mu)| {
                    acc * rat_pow(mu, self.exponent_matrix[(i, j)].to_i64().expect("small exponent"))
                })
            })
            .collect()
    }
}

pub(crate) fn rat_pow(x: &BigRational, e: i64) -> BigRational {
    let p = num_traits::pow(x.clone(), e.unsigned_abs() as usize);
    if e < 0 {
        p.recip()
    } else {
        p
    }
}

fn positive_rational(z: &G) -> Result<BigRational> {
    if !z.im.is_zero() {
        return Err(Error::NonRationalInput(format!("{z} is not real")));
    }
    if !z.re.is_positive() {
        return Err(Error::NonRationalInput(format!("{z} is not positive")));
    }
    Ok(z.re.clone())
}

/// Pairwise coprime integers `> 1` in which every input factors.
pub fn coprime_base(values: &[BigInt]) -> Vec<BigInt> {
    let mut base: Vec<BigInt> = values.iter().filter(|v| **v > BigInt::one()).cloned().collect();
    loop {
        base.sort();
        base.dedup();
        let mut changed = false;
        'scan: for i in 0..base.len() {
            for j in i + 1..base.len() {
                let g = base[i].gcd(&base[j]);
                if g > BigInt::one() {
                    let (a, b) = (&base[i] / &g, &base[j] / &g);
                    let mut next: Vec<BigInt> =
                        base.iter().enumerate().filter(|(k, _)| *k != i && *k != j).map(|(_, v)| v.clone()).collect();
                    next.extend([g, a, b].into_iter().filter(|v| *v > BigInt::one()));
                    base = next;
                    changed = true;
                    break 'scan;
                }
            }
        }
        if !changed {
            return base;
        }
    }
}

fn exponent_over(mut n: BigInt, base: &[BigInt]) -> Vec<i64> {
    base.iter()
        .map(|b| {
            let mut e = 0;
            while (&n % b).is_zero() {
                n /= b;
                e += 1;
            }
            e
        })
        .collect()
}

/// Rank of the multiplicative group generated by positive rationals.
pub fn multiplicative_rank(lambda: &[G]) -> Result<MultiplicativeProfile> {
    let lam: Vec<BigRational> = lambda.iter().map(positive_rational).collect::<Result<_>>()?;
    let mut ints = Vec::new();
    for l in &lam {
        ints.push(l.numer().clone());
        ints.push(l.denom().clone());
    }
    let base = coprime_base(&ints);
    let rows: Vec<Vec<i64>> = lam
        .iter()
        .map(|l| {
            let a = exponent_over(l.numer().clone(), &base);
            let b = exponent_over(l.denom().clone(), &base);
            a.iter().zip(&b).map(|(x, y)| x - y).collect()
        })
        .collect();
    let n = lam.len();
    if base.is_empty() {
        return Ok(MultiplicativeProfile {
            lambda: lam,
            rank: 0,
            generators: Vec::new(),
            exponent_matrix: IntegerMatrix::zeros(n, 0),
        });
    }
    let e = IntegerMatrix::from_rows(&rows);
    let (h, u) = hermite_normal_form(&e);
    let rank = (0..h.rows()).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
    let generators: Vec<BigRational> = (0..rank)
        .map(|j| {
            base.iter().enumerate().fold(BigRational::one(), |acc, (q, b)| {
                acc * rat_pow(&BigRational::from_integer(b.clone()), h[(j, q)].to_i64().expect("small exponent"))
            })
        })
        .collect();
    // E = U⁻¹·H, so the coordinates are the first `rank` columns of U⁻¹
    let uinv = u.unimodular_inverse().expect("unimodular");
    let mut c = IntegerMatrix::zeros(n, rank);
    for i in 0..n {
        for j in 0..rank {
            c[(i, j)] = uinv[(i, j)].clone();
        }
    }
    Ok(MultiplicativeProfile { lambda: lam, rank, generators, exponent_matrix: c })
}

/// `Λ_i(s:t) = Π_j ((s + μ_j t)/(s + t))^{c_ij}`.
#[derive(Clone, Debug, Serialize)]
pub struct SimilarDeformationPlan {
    pub profile: MultiplicativeProfile,
    /// Exceptional points `(s:t) = (−μ:1)`, including `μ = 1`.
    #[serde(serialize_with = "ser_rats")]
    pub exception_points: Vec<BigRational>,
    pub exception_count: usize,
    pub formula_applies: bool,
    pub endpoints_verified: bool,
}

impl SimilarDeformationPlan {
    /// `Λ_i(s:t)` exactly (`None` at a pole).
    pub fn lambda_at(&self, i: usize, s: &BigRational, t: &BigRational) -> Option<BigRational> {
        let den = s + t;
        let mut acc = BigRational::one();
        for (j, mu) in self.profile.generators.iter().enumerate() {
            let e = self.profile.exponent_matrix[(i, j)].to_i64().expect("small exponent");
            if e == 0 {
                continue;
            }
            let num = s + mu * t;
            if (num.is_zero() && e > 0) || (den.is_zero() && e < 0) {
                return Some(BigRational::zero());
            }
            if num.is_zero() || den.is_zero() {
                return None;
            }
            acc *= rat_pow(&(num / &den), e);
        }
        Some(acc)
    }

    /// Coefficients `a_I·Λ(s:t)^I` of the deformed hypersurface.
    pub fn coefficients_at(&self, a: &CoefficientVector<G>, s: &BigRational, t: &BigRational) -> Result<CoefficientVector<G>> {
        let lam: Vec<G> = (0..self.profile.lambda.len())
            .map(|i| {
                self.lambda_at(i, s, t)
                    .filter(|v| !v.is_zero())
                    .map(G::from_rational)
                    .ok_or_else(|| Error::InvalidInput("exceptional parameter".into()))
            })
            .collect::<Result<_>>()?;
        Ok(a.rescale_torus(&lam)?)
    }
}

pub fn plan_similar_deformation(a: &CoefficientVector<G>, lambda: &[G]) -> Result<SimilarDeformationPlan> {
    if a.rank() != lambda.len() {
        return Err(Error::InvalidInput(format!("λ has {} entries, rank is {}", lambda.len(), a.rank())));
    }
    let profile = multiplicative_rank(lambda)?;
    let formula_applies = profile.rank > 0;
    let mut points: Vec<BigRational> = Vec::new();
    let n = profile.lambda.len();
    let mut pole_at_one = false;
    for i in 0..n {
        let mut total = 0i64;
        for (j, mu) in profile.generators.iter().enumerate() {
            let e = profile.exponent_matrix[(i, j)].to_i64().expect("small exponent");
            if e != 0 {
                points.push(-mu.clone());
            }
            total += e;
        }
        if total != 0 {
            pole_at_one = true;
        }
    }
    if pole_at_one {
        points.push(-BigRational::one());
    }
    points.sort();
    points.dedup();
    let mut plan = SimilarDeformationPlan {
        exception_count: points.len(),
        exception_points: points,
        profile,
        formula_applies,
        endpoints_verified: false,
    };
    let (one, zero) = (BigRational::one(), BigRational::zero());
    plan.endpoints_verified = (0..n).all(|i| {
        plan.lambda_at(i, &one, &zero) == Some(one.clone())
            && plan.lambda_at(i, &zero, &one).as_ref() == Some(&plan.profile.lambda[i])
    });
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::{polytope_from_divisor, standard};

    fn conic(b1: i64, b2: i64, b3: &str) -> CoefficientVector<G> {
        CoefficientVector::from_strings(
            2,
            &[(&[0, 0], "1"), (&[1, 0], &b2.to_string()), (&[2, 0], "1"), (&[0, 1], &b1.to_string()), (&[1, 1], b3), (&[0, 2], "1")],
        )
        .unwrap()
    }

    #[test]
    fn conic_pencil_has_six_exceptions() {
        let p = polytope_from_divisor(&standard::projective_space(2, 2)).unwrap();
        let base = conic(1, 2, "0");
        let dir = CoefficientVector::from_strings(2, &[(&[1, 1], "1")]).unwrap();
        let pencil = Pencil::new(&base, &dir).unwrap();
        let e = exception_set(&p, &pencil).unwrap();
        assert_eq!(e.count_with_multiplicity, 6, "{:#?}", e.defining_polynomials);
        assert!(e.includes_infinity);
        let expect = UPoly::from_i64s(&(), &[-5, 2])
            .monic()
            .unwrap()
            .mul(&UPoly::from_i64s(&(), &[4, -2, 1]))
            .mul(&UPoly::from_i64s(&(), &[1, -2, 1]));
        assert_eq!(e.exception_polynomial(), expect);
        for f in &e.defining_polynomials {
            assert!(pencil_in_locus_at(&p, &pencil, &f.polynomial).unwrap());
        }
        let t = G::from_ratio(3, 7);
        assert!(!pencil_in_locus_at(&p, &pencil, &UPoly::from_gaussians(vec![t.neg(), G::from_i64(1)])).unwrap());
    }

    #[test]
    fn pencil_validation() {
        let base = conic(1, 2, "0");
        assert!(matches!(Pencil::new(&base, &base.scale(&G::from_i64(3))), Err(Error::NotAPencil(_))));
        let zero = CoefficientVector::from_strings(2, &[(&[1, 1], "0")]).unwrap();
        assert!(matches!(Pencil::new(&base, &zero), Err(Error::NotAPencil(_))));
    }

    #[test]
    fn multiplicative_examples() {
        let g = |v: &[i64]| v.iter().map(|&x| G::from_i64(x)).collect::<Vec<_>>();
        assert_eq!(multiplicative_rank(&g(&[1, 1, 1])).unwrap().rank, 0);
        let p = multiplicative_rank(&g(&[2, 4])).unwrap();
        assert_eq!(p.rank, 1);
        assert_eq!(p.generators, vec![BigRational::from_integer(2.into())]);
        assert_eq!(multiplicative_rank(&g(&[2, 3])).unwrap().rank, 2);
        let p = multiplicative_rank(&[G::from_ratio(6, 35), G::from_ratio(10, 21), G::from_i64(4)]).unwrap();
        assert_eq!(p.reconstruct(), p.lambda);
        assert!(matches!(multiplicative_rank(&g(&[-2])), Err(Error::NonRationalInput(_))));
        assert!(matches!(multiplicative_rank(&[G::i()]), Err(Error::NonRationalInput(_))));
    }

    #[test]
    fn similar_plans() {
        let a = CoefficientVector::from_strings(2, &[(&[0, 0], "1"), (&[1, 0], "1"), (&[0, 1], "1")]).unwrap();
        let g = |v: &[i64]| v.iter().map(|&x| G::from_i64(x)).collect::<Vec<_>>();
        let plan = plan_similar_deformation(&a, &g(&[2, 4])).unwrap();
        assert_eq!(plan.exception_count, 2);
        assert!(plan.endpoints_verified);
        let plan = plan_similar_deformation(&a, &g(&[2, 3])).unwrap();
        assert_eq!(plan.exception_count, 3);
        let plan = plan_similar_deformation(&a, &g(&[1, 1])).unwrap();
        assert!(!plan.formula_applies);
        assert_eq!(plan.exception_count, 0);
    }

    fn cubic() -> CoefficientVector<G> {
        let pts: [(&[i64], &str); 10] = [
            (&[0, 0], "1"), (&[1, 0], "2"), (&[2, 0], "-3"), (&[3, 0], "5"), (&[0, 1], "7"),
            (&[1, 1], "1"), (&[2, 1], "11"), (&[0, 2], "-2"), (&[1, 2], "13"), (&[0, 3], "3"),
        ];
        CoefficientVector::from_strings(2, &pts).unwrap()
    }

    #[test]
    fn single_coefficient_deformation_is_safe() {
        let p = polytope_from_divisor(&standard::projective_space(2, 3)).unwrap();
        let a = cubic();
        let i0 = LatticePoint(vec![1, 1]);
        let cert = verify_single_coefficient_deformation(&p, &a, &i0).unwrap();
        assert_eq!(cert.verdict, "ALL_T_SAFE");
        assert!(cert.entries.iter().any(|e| e.varying_fiber.is_some()));
        let base = a.zero_extend(std::slice::from_ref(&i0));
        let e0 = CoefficientVector::from_strings(2, &[(&[1, 1], "1")]).unwrap();
        let e = exception_set(&p, &Pencil::new(&base, &e0).unwrap()).unwrap();
        assert!(e.defining_polynomials.is_empty(), "{:?}", e.defining_polynomials);
    }

    #[test]
    fn coprime_base_refines() {
        let b = coprime_base(&[BigInt::from(12), BigInt::from(18), BigInt::from(35)]);
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                assert_eq!(b[i].gcd(&b[j]), BigInt::one());
            }
        }
        assert!(b.contains(&BigInt::from(2)) && b.contains(&BigInt::from(3)));
    }
}
