//! Exact common-zero decisions for Laurent systems in at most two variables,
//! each ranging over ℂ* or ℂ.
//!
//! Bivariate systems are reduced by gcd splitting (positive-dimensional
//! parts), a resultant in one variable, square-free factorization of the
//! eliminant, and dynamic evaluation over `F[x]/(factor)`: the system is
//! specialized to `L[y]` and its gcd tells whether a fiber point exists.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebraic::{approx_roots, closest_root, isolate_roots, AlgebraicNumber};
use crate::bipoly::BiPoly;
use crate::error::{Error, Result};
use crate::ext::{split_components, Ext, ExtCtx};
use crate::field::{ArithResult, Field, GaussianRational as G};
use crate::laurent::LaurentPolynomial;
use crate::lattice::LatticePoint;
use crate::ring::bareiss_det;
use crate::upoly::UPoly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Domain {
    /// ℂ*
    NonZero,
    /// ℂ
    Affine,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableDomain(pub Vec<Domain>);

impl VariableDomain {
    pub fn torus(n: usize) -> Self {
        VariableDomain(vec![Domain::NonZero; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn affine_flags(&self) -> Vec<bool> {
        self.0.iter().map(|d| *d == Domain::Affine).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    SolutionExists,
    NoSolution,
}

/// A point given triangularly: `x` is any root of `x_modulus`, and `y` any
/// root of `y_fiber` (coefficients are polynomials in `x`, reduced modulo
/// `x_modulus`). `order[0]` is the original index of `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct TriangularWitness {
    pub order: Vec<usize>,
    pub x_modulus: UPoly<G>,
    pub y_fiber: Option<Vec<UPoly<G>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub witness: Option<Vec<AlgebraicNumber>>,
    pub certificate: Vec<String>,
    #[serde(skip)]
    pub exact_witness: Option<TriangularWitness>,
}

impl SolveResult {
    pub fn exists(&self) -> bool {
        self.verdict == Verdict::SolutionExists
    }

    fn none(certificate: Vec<String>) -> Self {
        SolveResult { verdict: Verdict::NoSolution, witness: None, certificate, exact_witness: None }
    }

    /// Exactly check that the triangular witness annihilates `system`.
    pub fn verify(&self, system: &[LaurentPolynomial<G>], dom: &VariableDomain) -> bool {
        let Some(w) = &self.exact_witness else {
            return self.verdict == Verdict::NoSolution || system.iter().all(|p| p.is_zero());
        };
        verify_triangular(w, system, dom).unwrap_or(false)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::SolutionExists => "SOLUTION_EXISTS",
            Verdict::NoSolution => "NO_SOLUTION",
        })
    }
}

fn verify_triangular(w: &TriangularWitness, system: &[LaurentPolynomial<G>], dom: &VariableDomain) -> ArithResult<bool> {
    let ctx = ExtCtx::new(&w.x_modulus)?;
    let n = dom.len();
    for p in system {
        if n == 1 {
            if !p.to_upoly(dom.0[0] == Domain::Affine).rem(&w.x_modulus)?.is_zero() {
                return Ok(false);
            }
            continue;
        }
        let q = reorder(p, &w.order);
        let flags = [dom.0[w.order[0]] == Domain::Affine, dom.0[w.order[1]] == Domain::Affine];
        let b = q.to_bipoly(flags).to_ext(&ctx);
        match &w.y_fiber {
            None => {
                // y = 1
                let one = Ext::one(&ctx);
                if !b.eval(&one).is_zero() {
                    return Ok(false);
                }
            }
            Some(rows) if rows.len() == 2 => {
                // y = −c₀/c₁ with c₁ a unit modulo the x-modulus
                let b = q.to_bipoly(flags);
                let y_torus = dom.0[w.order[1]] == Domain::NonZero;
                if w.x_modulus.gcd(&rows[1])?.deg() > 0
                    || (y_torus && w.x_modulus.gcd(&rows[0])?.deg() > 0)
                    || !homogenized_value(&b, &rows[0], &rows[1], &w.x_modulus)?.is_zero()
                {
                    return Ok(false);
                }
            }
            Some(rows) => {
                let fiber = UPoly::new(&ctx, rows.iter().map(|r| Ext::from_poly(&ctx, r)).collect());
                if !b.rem(&fiber)?.is_zero() {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

fn reorder<F: Field>(p: &LaurentPolynomial<F>, order: &[usize]) -> LaurentPolynomial<F> {
    LaurentPolynomial::from_terms(
        p.n_vars(),
        p.ctx(),
        p.terms().iter().map(|(e, c)| (LatticePoint(order.iter().map(|&i| e[i]).collect()), c.clone())),
    )
}

// ---------------------------------------------------------------------------
// Generic elimination engine
// ---------------------------------------------------------------------------

/// One piece of the projection onto `x`: every root of `modulus` carries a
/// fiber point, given by the roots of `fiber` (`None`: any `y`).
#[derive(Clone, Debug)]
pub(crate) struct Component<F: Field> {
    pub modulus: UPoly<F>,
    pub multiplicity: usize,
    pub fiber: Option<UPoly<Ext<F>>>,
}

#[derive(Clone, Debug)]
pub(crate) enum Projection<F: Field> {
    /// All but finitely many `x` carry a solution. `Some(p)`: the solutions
    /// include the curve `p = 0`; `None`: the whole domain.
    Infinite(Option<BiPoly<F>>),
    Finite(Vec<Component<F>>),
}

impl<F: Field> Projection<F> {
    pub fn is_empty(&self) -> bool {
        matches!(self, Projection::Finite(c) if c.is_empty())
    }
}

struct Eliminator<'a> {
    dom: [Domain; 2],
    exists: bool,
    trace: &'a mut Vec<String>,
}

impl Eliminator<'_> {
    fn prepare<F: Field>(&self, p: &BiPoly<F>) -> ArithResult<Option<BiPoly<F>>> {
        let mut p = p.clone();
        p.normalize_checked()?;
        if p.is_zero() {
            return Ok(None);
        }
        let kx = if self.dom[0] == Domain::NonZero { p.x_power()? } else { 0 };
        let ky = if self.dom[1] == Domain::NonZero { p.y_power()? } else { 0 };
        let mut q = p.divide_monomial(kx, ky);
        q.normalize_checked()?;
        Ok(Some(q))
    }

    fn solve_set<F: Field>(&mut self, polys: Vec<BiPoly<F>>) -> ArithResult<Projection<F>> {
        let mut ps = Vec::with_capacity(polys.len());
        for p in &polys {
            if let Some(q) = self.prepare(p)? {
                if q.is_constant() {
                    self.trace.push("nonzero constant in system".into());
                    return Ok(Projection::Finite(Vec::new()));
                }
                if !ps.contains(&q) {
                    ps.push(q);
                }
            }
        }
        if ps.is_empty() {
            self.trace.push("system vanishes identically".into());
            return Ok(Projection::Infinite(None));
        }
        ps.sort_by_key(|p| (p.deg_y(), p.deg_x(), p.term_count()));
        if ps.len() == 1 {
            let p = ps.pop().expect("one element");
            if p.deg_y() > 0 {
                self.trace.push(format!("single curve of y-degree {}", p.deg_y()));
                return Ok(Projection::Infinite(Some(p)));
            }
            let r = p.row(0);
            return self.finite(r, std::slice::from_ref(&p));
        }
        let g = ps[0].gcd(&ps[1])?;
        if !g.is_constant() {
            self.trace.push(format!("common factor of bidegree ({}, {}) split off", g.deg_x(), g.deg_y()));
            let rest = ps[2..].to_vec();
            let a0 = ps[0].exact_div(&g)?;
            let a1 = ps[1].exact_div(&g)?;
            let mut branch_a = vec![g];
            branch_a.extend(rest.iter().cloned());
            let first = self.solve_set(branch_a)?;
            if self.exists && !first.is_empty() {
                return Ok(first);
            }
            let mut branch_b = vec![a0, a1];
            branch_b.extend(rest);
            let second = self.solve_set(branch_b)?;
            return Ok(merge(first, second));
        }
        let mut r = pair_eliminant(&ps[0], &ps[1])?;
        self.trace.push(format!("Res_y of y-degrees {} and {}: degree {}", ps[0].deg_y(), ps[1].deg_y(), r.deg()));
        if self.exists && ps.len() > 2 {
            // every pairwise eliminant vanishes on the projection
            for (i, j) in (0..ps.len()).flat_map(|i| (i + 1..ps.len()).map(move |j| (i, j))).skip(1).take(5) {
                r = r.gcd(&pair_eliminant(&ps[i], &ps[j])?)?;
            }
            self.trace.push(format!("gcd of pairwise eliminants: degree {}", r.deg()));
        }
        self.finite(r, &ps)
    }

    fn finite<F: Field>(&mut self, r: UPoly<F>, ps: &[BiPoly<F>]) -> ArithResult<Projection<F>> {
        let mut r = r;
        r.normalize_checked()?;
        if r.is_zero() {
            // cannot happen for coprime inputs; treat the eliminant as vacuous
            return Ok(Projection::Infinite(None));
        }
        if self.dom[0] == Domain::NonZero {
            r = r.strip_x_power()?.1;
        }
        if r.deg() == 0 {
            self.trace.push("eliminant has no admissible roots".into());
            return Ok(Projection::Finite(Vec::new()));
        }
        let y_torus = self.dom[1] == Domain::NonZero;
        if self.exists && ps.len() >= 2 {
            if let Some(c) = linear_fiber_component(&r, ps, y_torus)? {
                self.trace.push(format!("component of degree {} with a rational fiber point", c.modulus.deg()));
                return Ok(Projection::Finite(vec![c]));
            }
        }
        let mut out = Vec::new();
        for (rk, k) in r.squarefree_decomposition()? {
            let comps = split_components(&rk, |ctx| fiber_gcd(ctx, ps, y_torus))?;
            for (m, fib) in comps {
                match fib {
                    Some(fiber) => {
                        self.trace.push(format!(
                            "component of degree {} (multiplicity {k}): fiber {}",
                            m.deg(),
                            fiber.as_ref().map_or("unconstrained".to_string(), |g| format!("of degree {}", g.deg()))
                        ));
                        out.push(Component { modulus: m, multiplicity: k, fiber });
                        if self.exists {
                            return Ok(Projection::Finite(out));
                        }
                    }
                    None => self.trace.push(format!("component of degree {} (multiplicity {k}): empty fiber", m.deg())),
                }
            }
        }
        Ok(Projection::Finite(out))
    }
}

/// First subresultant `s₁(x)·y + s₀(x)` of `p` and `q` in `y`; the linear
/// one itself when either has `y`-degree 1.
fn first_subresultant<F: Field>(p: &BiPoly<F>, q: &BiPoly<F>) -> ArithResult<Option<[UPoly<F>; 2]>> {
    let (dp, dq) = (p.deg_y(), q.deg_y());
    if dp == 0 || dq == 0 {
        return Ok(None);
    }
    if dp == 1 || dq == 1 {
        let l = if dp == 1 { p } else { q };
        return Ok(Some([l.row(0), l.row(1)]));
    }
    // rows y^k·p (k < dq-1) and y^k·q (k < dp-1); columns y^(dp+dq-2) … y^0
    let cols = dp + dq - 1;
    let zero = UPoly::zero(p.ctx());
    let mut rows = Vec::new();
    for (f, df, shifts) in [(p, dp, dq - 1), (q, dq, dp - 1)] {
        for k in 0..shifts {
            let mut row = vec![zero.clone(); cols];
            for e in 0..=df {
                row[cols - 1 - (e + k)] = f.row(e);
            }
            rows.push(row);
        }
    }
    let minor = |last: usize| -> ArithResult<UPoly<F>> {
        let m = rows
            .iter()
            .map(|row| row[..cols - 2].iter().chain(std::iter::once(&row[last])).cloned().collect())
            .collect();
        bareiss_det(p.ctx(), m)
    };
    Ok(Some([minor(cols - 1)?, minor(cols - 2)?]))
}

/// Existence shortcut: roots of the eliminant where `y = −s₀/s₁` (from the
/// first subresultant of the first two polynomials) is an exact common
/// zero of the whole system. `None` when no such root is certified.
///
/// Everything stays inversion-free: `p(x, −s₀/s₁)` is tested through its
/// homogenization `s₁^d · p(x, −s₀/s₁)` modulo the eliminant.
fn linear_fiber_component<F: Field>(r: &UPoly<F>, ps: &[BiPoly<F>], y_torus: bool) -> ArithResult<Option<Component<F>>> {
    let Some([s0, s1]) = first_subresultant(&ps[0], &ps[1])? else {
        return Ok(None);
    };
    if s1.is_zero() || (y_torus && s0.is_zero()) {
        return Ok(None);
    }
    let mut m = r.monic()?;
    m = remove_common(m, &s1)?;
    if y_torus {
        m = remove_common(m, &s0)?;
    }
    for p in ps {
        if m.deg() == 0 {
            return Ok(None);
        }
        let v = homogenized_value(p, &s0, &s1, &m)?;
        if !v.is_zero() {
            m = m.gcd(&v)?;
        }
    }
    if m.deg() == 0 {
        return Ok(None);
    }
    let ctx = ExtCtx::new(&m)?;
    let fiber = UPoly::new(&ctx, vec![Ext::from_poly(&ctx, &s0.rem(&m)?), Ext::from_poly(&ctx, &s1.rem(&m)?)]);
    Ok(Some(Component { modulus: m, multiplicity: 1, fiber: Some(fiber) }))
}

/// Divide out of `m` every root it shares with `s`.
fn remove_common<F: Field>(mut m: UPoly<F>, s: &UPoly<F>) -> ArithResult<UPoly<F>> {
    loop {
        let g = m.gcd(s)?;
        if g.deg() == 0 {
            return Ok(m);
        }
        m = m.exact_div(&g)?.monic()?;
    }
}

/// `Σ pⱼ(x)·(−s₀)ʲ·s₁^(d−j) mod m`, where `d` is the `y`-degree of `p`.
fn homogenized_value<F: Field>(p: &BiPoly<F>, s0: &UPoly<F>, s1: &UPoly<F>, m: &UPoly<F>) -> ArithResult<UPoly<F>> {
    let (ns0, s1) = (s0.neg().rem(m)?, s1.rem(m)?);
    let d = p.deg_y();
    let mut acc = p.row(d).rem(m)?;
    let mut s1_pow = UPoly::one(m.ctx());
    for j in (0..d).rev() {
        s1_pow = s1_pow.mul(&s1).rem(m)?;
        acc = acc.mul(&ns0).add(&p.row(j).mul(&s1_pow)).rem(m)?;
    }
    Ok(acc)
}

/// Polynomial in `x` vanishing on the projection of `V(p, q)`.
fn pair_eliminant<F: Field>(p: &BiPoly<F>, q: &BiPoly<F>) -> ArithResult<UPoly<F>> {
    if p.deg_y() == 0 {
        Ok(p.row(0))
    } else if q.deg_y() == 0 {
        Ok(q.row(0))
    } else {
        p.resultant_y(q)
    }
}

/// Gcd of the specialized system in `L[y]`. `Some(None)`: every polynomial
/// vanishes on the component; `Some(Some(g))`: the admissible roots of `g`.
#[allow(clippy::type_complexity)]
fn fiber_gcd<F: Field>(
    ctx: &std::sync::Arc<ExtCtx<F>>,
    ps: &[BiPoly<F>],
    y_torus: bool,
) -> ArithResult<Option<Option<UPoly<Ext<F>>>>> {
    let mut g = UPoly::<Ext<F>>::zero(ctx);
    for p in ps {
        let mut q = p.to_ext(ctx);
        q.normalize_checked()?;
        g = g.gcd(&q)?;
        if g.deg() == 0 && !g.is_zero() {
            return Ok(None);
        }
    }
    if g.is_zero() {
        return Ok(Some(None));
    }
    if y_torus {
        g = g.strip_x_power()?.1;
    }
    Ok((g.deg() > 0).then_some(Some(g)))
}

fn merge<F: Field>(a: Projection<F>, b: Projection<F>) -> Projection<F> {
    match (a, b) {
        (Projection::Infinite(p), _) | (_, Projection::Infinite(p)) => Projection::Infinite(p),
        (Projection::Finite(mut x), Projection::Finite(y)) => {
            x.extend(y);
            Projection::Finite(x)
        }
    }
}

fn max_degree<F: Field>(system: &[LaurentPolynomial<F>], var: usize) -> i64 {
    system
        .iter()
        .map(|p| {
            let es: Vec<i64> = p.terms().keys().map(|e| e[var]).collect();
            match (es.iter().min(), es.iter().max()) {
                (Some(lo), Some(hi)) => hi - lo,
                _ => 0,
            }
        })
        .max()
        .unwrap_or(0)
}

/// Project the solution set of a two-variable system onto variable 0.
pub(crate) fn project_onto_first<F: Field>(
    system: &[LaurentPolynomial<F>],
    dom: [Domain; 2],
    trace: &mut Vec<String>,
) -> ArithResult<Projection<F>> {
    let flags = [dom[0] == Domain::Affine, dom[1] == Domain::Affine];
    let polys = system.iter().map(|p| p.to_bipoly(flags)).collect();
    project_bipolys(polys, dom, trace)
}

/// Projection onto `x` of the common zeros of bivariate polynomials.
pub(crate) fn project_bipolys<F: Field>(
    polys: Vec<BiPoly<F>>,
    dom: [Domain; 2],
    trace: &mut Vec<String>,
) -> ArithResult<Projection<F>> {
    Eliminator { dom, exists: false, trace }.solve_set(polys)
}

/// Does the system (0, 1 or 2 variables) have a solution in the domain?
pub(crate) fn has_solution<F: Field>(system: &[LaurentPolynomial<F>], dom: &VariableDomain) -> ArithResult<bool> {
    let mut trace = Vec::new();
    match dom.len() {
        0 => {
            for p in system {
                for c in p.terms().values() {
                    if !c.is_zero_checked()? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        1 => Ok(system.is_empty() || univariate_gcd(system, dom.0[0])?.is_some()),
        2 => Ok(!exists_projection(system, dom, &mut trace)?.1.is_empty()),
        n => panic!("has_solution called with {n} variables"),
    }
}

/// Admissible part of the gcd of a nonempty univariate system: `None` if
/// there is no root in the domain, `Some(zero)` if everything vanishes.
fn univariate_gcd<F: Field>(system: &[LaurentPolynomial<F>], dom: Domain) -> ArithResult<Option<UPoly<F>>> {
    let affine = dom == Domain::Affine;
    let Some(first) = system.first() else {
        return Ok(None);
    };
    let mut g = UPoly::zero(first.ctx());
    for p in system {
        let mut q = p.to_upoly(affine);
        q.normalize_checked()?;
        g = g.gcd(&q)?;
        if g.deg() == 0 && !g.is_zero() {
            return Ok(None);
        }
    }
    if g.is_zero() {
        return Ok(Some(g));
    }
    if !affine {
        g = g.strip_x_power()?.1;
    }
    Ok((g.deg() > 0).then_some(g))
}

/// Exists-mode projection after choosing the elimination variable: returns
/// the variable order used (`order[0]` plays `x`) and the projection.
fn exists_projection<F: Field>(
    system: &[LaurentPolynomial<F>],
    dom: &VariableDomain,
    trace: &mut Vec<String>,
) -> ArithResult<(Vec<usize>, Projection<F>)> {
    // eliminate (treat as `y`) the variable of lower max-degree
    let order = if max_degree(system, 0) < max_degree(system, 1) { vec![1, 0] } else { vec![0, 1] };
    trace.push(format!("eliminating u{}", order[1] + 1));
    let sys: Vec<LaurentPolynomial<F>> = system.iter().map(|p| reorder(p, &order)).collect();
    let d = [dom.0[order[0]], dom.0[order[1]]];
    let flags = [d[0] == Domain::Affine, d[1] == Domain::Affine];
    let polys = sys.iter().map(|p| p.to_bipoly(flags)).collect();
    let proj = Eliminator { dom: d, exists: true, trace }.solve_set(polys)?;
    Ok((order, proj))
}

// ---------------------------------------------------------------------------
// Public interface over ℚ(i)
// ---------------------------------------------------------------------------

fn exact_point(v: G) -> AlgebraicNumber {
    let p = UPoly::from_gaussians(vec![v.neg(), G::from_i64(1)]);
    isolate_roots(&p).pop().expect("linear polynomial has a root")
}

pub fn solve_zero_vars(system: &[G]) -> SolveResult {
    if system.iter().all(|c| c.is_zero()) {
        SolveResult {
            verdict: Verdict::SolutionExists,
            witness: Some(Vec::new()),
            certificate: vec![format!("all {} constants vanish", system.len())],
            exact_witness: None,
        }
    } else {
        SolveResult::none(vec!["nonzero constant in system".into()])
    }
}

fn check_vars(system: &[LaurentPolynomial<G>], dom: &VariableDomain, n: usize) -> Result<()> {
    if dom.len() != n {
        return Err(Error::InvalidInput(format!("domain has {} variables, expected {n}", dom.len())));
    }
    if let Some(p) = system.iter().find(|p| p.n_vars() != n) {
        return Err(Error::InvalidInput(format!("polynomial in {} variables, expected {n}", p.n_vars())));
    }
    Ok(())
}

pub fn solve_univariate(system: &[LaurentPolynomial<G>], dom: &VariableDomain) -> Result<SolveResult> {
    check_vars(system, dom, 1)?;
    if system.is_empty() || system.iter().all(|p| p.is_zero()) {
        return Ok(SolveResult {
            verdict: Verdict::SolutionExists,
            witness: Some(vec![exact_point(G::from_i64(1))]),
            certificate: vec!["system vanishes identically".into()],
            exact_witness: Some(TriangularWitness {
                order: vec![0],
                x_modulus: UPoly::from_i64s(&(), &[-1, 1]),
                y_fiber: None,
            }),
        });
    }
    match univariate_gcd(system, dom.0[0])? {
        None => Ok(SolveResult::none(vec!["gcd has no admissible root".into()])),
        Some(g) => {
            let g = g.squarefree_part()?;
            let root = isolate_roots(&g).into_iter().next().expect("positive degree");
            Ok(SolveResult {
                verdict: Verdict::SolutionExists,
                witness: Some(vec![root]),
                certificate: vec![format!("gcd = {}", g.to_string_in("u"))],
                exact_witness: Some(TriangularWitness { order: vec![0], x_modulus: g, y_fiber: None }),
            })
        }
    }
}

pub fn solve_bivariate(system: &[LaurentPolynomial<G>], dom: &VariableDomain) -> Result<SolveResult> {
    if dom.len() > 2 || system.iter().any(|p| p.n_vars() > 2) {
        return Err(Error::DimensionTooHigh(dom.len().max(system.iter().map(|p| p.n_vars()).max().unwrap_or(0))));
    }
    check_vars(system, dom, 2)?;
    let mut trace = Vec::new();
    let (order, proj) = exists_projection(system, dom, &mut trace)?;
    let d = [dom.0[order[0]], dom.0[order[1]]];
    let (point, tri) = match proj {
        Projection::Finite(comps) if comps.is_empty() => return Ok(SolveResult::none(trace)),
        Projection::Finite(comps) => component_witness(&comps[0]),
        Projection::Infinite(None) => {
            let one = G::from_i64(1);
            let tri = TriangularWitness { order: order.clone(), x_modulus: UPoly::from_i64s(&(), &[-1, 1]), y_fiber: None };
            (Some((exact_point(one.clone()), exact_point(one))), tri)
        }
        Projection::Infinite(Some(p)) => {
            let (x, y, tri) = curve_witness(&p, d);
            (Some((x, y)), tri)
        }
    };
    if point.is_none() {
        trace.push(format!("witness kept in triangular form (degree {})", tri.x_modulus.deg()));
    }
    let witness = point.map(|(x, y)| if order[0] == 1 { vec![y, x] } else { vec![x, y] });
    let tri = TriangularWitness { order, ..tri };
    let result = SolveResult { verdict: Verdict::SolutionExists, witness, certificate: trace, exact_witness: Some(tri) };
    debug_assert!(result.verify(system, dom), "witness fails exact verification");
    Ok(result)
}

/// Decide a system in 0, 1 or 2 variables.
pub fn solve_system(system: &[LaurentPolynomial<G>], dom: &VariableDomain) -> Result<SolveResult> {
    match dom.len() {
        0 => {
            let consts: Vec<G> =
                system.iter().map(|p| p.terms().values().fold(G::zero(&()), |a, c| a.add(c))).collect();
            Ok(solve_zero_vars(&consts))
        }
        1 => solve_univariate(system, dom),
        2 => solve_bivariate(system, dom),
        n => Err(Error::DimensionTooHigh(n)),
    }
}

/// Components above this degree keep only the exact triangular witness:
/// isolating their roots costs far more than deciding existence.
const WITNESS_DEGREE_CAP: usize = 12;

fn component_witness(c: &Component<G>) -> (Option<(AlgebraicNumber, AlgebraicNumber)>, TriangularWitness) {
    let rows: Option<Vec<UPoly<G>>> = c.fiber.as_ref().map(|f| f.coeffs().iter().map(|e| e.rep().clone()).collect());
    let tri = TriangularWitness { order: vec![0, 1], x_modulus: c.modulus.clone(), y_fiber: rows.clone() };
    if c.modulus.deg() > WITNESS_DEGREE_CAP {
        return (None, tri);
    }
    let m = c.modulus.squarefree_part().expect("exact over Q(i)");
    let x = isolate_roots(&m).swap_remove(0);
    let Some(rows) = rows else {
        return (Some((x, exact_point(G::from_i64(1)))), tri);
    };
    let ry = if rows.len() == 2 {
        // y = −c₀/c₁ lies in F[x]/(m); its minimal polynomial is square-free
        let (g, s, _) = rows[1].xgcd(&m).expect("exact over Q(i)");
        let inv = s.scale(&g.coeff(0).inv().expect("c₁ is a unit modulo m"));
        let y0 = rows[0].neg().mul(&inv).rem(&m).expect("monic modulus");
        minimal_polynomial(&y0, &m)
    } else {
        // Res_x(m, G̃) as a polynomial in y
        let lifted = BiPoly::new(&(), rows.clone());
        let m_t = BiPoly::new(&(), m.coeffs().iter().map(|a| UPoly::constant(&(), a.clone())).collect());
        let ry = m_t.resultant_y(&lifted.transpose()).expect("exact over Q(i)");
        ry.squarefree_part().expect("exact over Q(i)")
    };
    let x0 = x.approx();
    let coeffs: Vec<Complex64> = rows.iter().map(|r| eval_complex(r, x0)).collect();
    let target = approx_roots(&coeffs)
        .into_iter()
        .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(Complex64::new(1.0, 0.0));
    let y = closest_root(&ry, target).expect("resultant has roots");
    (Some((x, y)), tri)
}

/// Minimal polynomial of `y mod m` over Q(i): the first linear dependency
/// among `1, y, y², …` in `Q(i)[x]/(m)`.
fn minimal_polynomial(y: &UPoly<G>, m: &UPoly<G>) -> UPoly<G> {
    let n = m.deg();
    let zero = G::from_i64(0);
    let y = y.rem(m).expect("monic modulus");
    // reduced rows: (pivot, vector, combination of powers)
    let mut basis: Vec<(usize, Vec<G>, Vec<G>)> = Vec::new();
    let mut power = UPoly::one(&());
    for k in 0..=n {
        let mut v: Vec<G> = (0..n).map(|i| power.coeff(i)).collect();
        let mut combo = vec![zero.clone(); n + 1];
        combo[k] = G::from_i64(1);
        for (piv, bv, bc) in &basis {
            if v[*piv].is_zero() {
                continue;
            }
            let f = v[*piv].div(&bv[*piv]).expect("nonzero pivot");
            for (a, b) in v.iter_mut().zip(bv) {
                *a = a.sub(&f.mul(b));
            }
            for (a, b) in combo.iter_mut().zip(bc) {
                *a = a.sub(&f.mul(b));
            }
        }
        match v.iter().position(|c| !c.is_zero()) {
            None => return UPoly::from_gaussians(combo).monic().expect("nonzero combination"),
            Some(piv) => basis.push((piv, v, combo)),
        }
        power = power.mul(&y).rem(m).expect("monic modulus");
    }
    unreachable!("n + 1 vectors in an n-dimensional space are dependent")
}

fn eval_complex(p: &UPoly<G>, z: Complex64) -> Complex64 {
    p.coeffs().iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_complex())
}

fn curve_witness(p: &BiPoly<G>, d: [Domain; 2]) -> (AlgebraicNumber, AlgebraicNumber, TriangularWitness) {
    for k in 1..=64i64 {
        for x0 in [k, -k] {
            let x0 = G::from_i64(x0);
            let mut q = p.eval_x(&x0);
            q.normalize_checked().expect("exact over Q(i)");
            if d[1] == Domain::NonZero && !q.is_zero() {
                q = q.strip_x_power().expect("exact over Q(i)").1;
            }
            if q.deg() == 0 {
                continue;
            }
            let q = q.squarefree_part().expect("exact over Q(i)");
            let y = isolate_roots(&q).into_iter().next().expect("positive degree");
            let tri = TriangularWitness {
                order: vec![0, 1],
                x_modulus: UPoly::from_gaussians(vec![x0.neg(), G::from_i64(1)]),
                y_fiber: Some(q.coeffs().iter().map(|c| UPoly::constant(&(), c.clone())).collect()),
            };
            return (exact_point(x0), y, tri);
        }
    }
    unreachable!("a curve of positive y-degree has points over small integers")
}

/// Sylvester resultant with respect to `var`. The other variables stay
/// symbolic; exponents of `var` are first shifted to start at 0.
pub fn resultant<F: Field>(p: &LaurentPolynomial<F>, q: &LaurentPolynomial<F>, var: usize) -> LaurentPolynomial<F> {
    let n = p.n_vars();
    let ctx = p.ctx().clone();
    let split = |f: &LaurentPolynomial<F>| -> Vec<LaurentPolynomial<F>> {
        let lo = f.terms().keys().map(|e| e[var]).min().unwrap_or(0);
        let hi = f.terms().keys().map(|e| e[var]).max().unwrap_or(0);
        let mut rows = vec![LaurentPolynomial::zero(n, &ctx); (hi - lo + 1) as usize];
        for (e, c) in f.terms() {
            let mut e2 = e.clone();
            e2.0[var] = 0;
            rows[(e[var] - lo) as usize].add_term(e2, c.clone());
        }
        rows
    };
    if p.is_zero() || q.is_zero() {
        return LaurentPolynomial::zero(n, &ctx);
    }
    let a = split(p);
    let b = split(q);
    let (da, db) = (a.len() - 1, b.len() - 1);
    if da == 0 && db == 0 {
        return LaurentPolynomial::constant(n, &ctx, F::one(&ctx));
    }
    let size = da + db;
    let zero = LaurentPolynomial::zero(n, &ctx);
    let mut m = vec![vec![zero.clone(); size]; size];
    for r in 0..db {
        for k in 0..=da {
            m[r][r + k] = a[da - k].clone();
        }
    }
    for r in 0..da {
        for k in 0..=db {
            m[db + r][r + k] = b[db - k].clone();
        }
    }
    det_division_free(&m, &zero)
}

/// Determinant by dynamic programming over column subsets (no division).
fn det_division_free<F: Field>(m: &[Vec<LaurentPolynomial<F>>], zero: &LaurentPolynomial<F>) -> LaurentPolynomial<F> {
    let n = m.len();
    assert!(n <= 24, "Sylvester matrix too large for symbolic determinant");
    let mut dp: std::collections::HashMap<u32, LaurentPolynomial<F>> = std::collections::HashMap::new();
    dp.insert(0, LaurentPolynomial::constant(zero.n_vars(), zero.ctx(), F::one(zero.ctx())));
    for row in m.iter() {
        let mut next: std::collections::HashMap<u32, LaurentPolynomial<F>> = std::collections::HashMap::new();
        for (mask, acc) in &dp {
            for (c, entry) in row.iter().enumerate() {
                if mask & (1 << c) != 0 || entry.is_zero() {
                    continue;
                }
                let above = (mask >> (c + 1)).count_ones();
                let mut term = acc.mul(entry);
                if above % 2 == 1 {
                    term = term.neg();
                }
                let slot = next.entry(mask | (1 << c)).or_insert_with(|| zero.clone());
                *slot = slot.add(&term);
            }
        }
        next.retain(|_, v| !v.is_zero());
        dp = next;
    }
    dp.remove(&((1u32 << n) - 1)).unwrap_or_else(|| zero.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lp(n: usize, terms: &[(&[i64], i64)]) -> LaurentPolynomial<G> {
        LaurentPolynomial::from_terms(n, &(), terms.iter().map(|(e, c)| (LatticePoint(e.to_vec()), G::from_i64(*c))))
    }

    #[test]
    fn zero_vars() {
        assert!(solve_zero_vars(&[G::zero_value(), G::zero_value()]).exists());
        assert!(!solve_zero_vars(&[G::one_value()]).exists());
        assert!(solve_zero_vars(&[]).exists());
    }

    #[test]
    fn univariate_examples() {
        let d = VariableDomain::torus(1);
        let r = solve_univariate(&[lp(1, &[(&[1], 1), (&[0], -1)]), lp(1, &[(&[1], 1), (&[0], 1)])], &d).unwrap();
        assert!(!r.exists());
        let sys = [lp(1, &[(&[2], 1), (&[0], -1)]), lp(1, &[(&[1], 1), (&[0], -1)])];
        let r = solve_univariate(&sys, &d).unwrap();
        assert!(r.exists());
        assert_eq!(r.witness.as_ref().unwrap()[0].exact_value(), Some(G::from_i64(1)));
        assert!(r.verify(&sys, &d));
        assert!(!solve_univariate(&[lp(1, &[(&[1], 1)])], &d).unwrap().exists());
        let aff = VariableDomain(vec![Domain::Affine]);
        assert!(solve_univariate(&[lp(1, &[(&[1], 1)])], &aff).unwrap().exists());
    }

    #[test]
    fn bivariate_examples() {
        let d = VariableDomain::torus(2);
        let sys = [lp(2, &[(&[1, 1], 1), (&[0, 0], -1)]), lp(2, &[(&[1, 0], 1), (&[0, 1], -1)])];
        let r = solve_bivariate(&sys, &d).unwrap();
        assert!(r.exists());
        assert!(r.verify(&sys, &d));
        let w = r.witness.unwrap();
        assert!((w[0].approx() - w[1].approx()).norm() < 1e-9);
        assert!((w[0].approx().norm() - 1.0).abs() < 1e-9);

        let sys = [lp(2, &[(&[1, 0], 1), (&[0, 1], -1)]), lp(2, &[(&[1, 0], 1), (&[0, 1], 1)])];
        assert!(!solve_bivariate(&sys, &d).unwrap().exists());

        let sys = [lp(2, &[(&[2, 0], 1), (&[0, 2], 1)]), lp(2, &[(&[1, 0], 1), (&[0, 0], -1)])];
        let r = solve_bivariate(&sys, &d).unwrap();
        assert!(r.exists());
        assert!(r.verify(&sys, &d));
        let w = r.witness.unwrap();
        assert!((w[0].approx() - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!((w[1].approx().norm() - 1.0).abs() < 1e-9 && w[1].approx().re.abs() < 1e-9);
    }

    #[test]
    fn bivariate_positive_dimensional() {
        let d = VariableDomain::torus(2);
        // (u1 - u2)(u1 + 1) and (u1 - u2)(u2 - 3): the line u1 = u2 is common
        let l = lp(2, &[(&[1, 0], 1), (&[0, 1], -1)]);
        let a = l.mul(&lp(2, &[(&[1, 0], 1), (&[0, 0], 1)]));
        let b = l.mul(&lp(2, &[(&[0, 1], 1), (&[0, 0], -3)]));
        let r = solve_bivariate(&[a.clone(), b.clone()], &d).unwrap();
        assert!(r.exists());
        assert!(r.verify(&[a, b], &d));
        // the line u1 = 0 only: no torus point
        let a = lp(2, &[(&[1, 1], 1), (&[1, 0], 1)]);
        let b = lp(2, &[(&[1, 0], 1), (&[2, 0], 2)]);
        let r = solve_bivariate(&[a, b], &d).unwrap();
        assert!(r.exists(), "u1 = -1/2, u2 = -1");
    }

    #[test]
    fn bivariate_needs_splitting() {
        // u1^2 = 2 and u2 = u1 + sqrt-ish coupling, plus a constraint that
        // holds only on one conjugate: u2^2 - 2 u2 u1 ... use (u1 - u2)(u1 + u2 - 1)
        let d = VariableDomain::torus(2);
        let a = lp(2, &[(&[2, 0], 1), (&[0, 0], -2)]);
        let b = lp(2, &[(&[0, 1], 1), (&[1, 0], -1)]);
        let c = lp(2, &[(&[0, 1], 1), (&[0, 0], -1)]);
        assert!(!solve_bivariate(&[a.clone(), b.clone(), c], &d).unwrap().exists());
        let r = solve_bivariate(&[a.clone(), b.clone()], &d).unwrap();
        assert!(r.verify(&[a, b], &d));
    }

    #[test]
    fn resultant_examples() {
        // Res_u(u - a, u - b) = a - b, with a, b as variables 1, 2
        let p = lp(3, &[(&[1, 0, 0], 1), (&[0, 1, 0], -1)]);
        let q = lp(3, &[(&[1, 0, 0], 1), (&[0, 0, 1], -1)]);
        assert_eq!(resultant(&p, &q, 0), lp(3, &[(&[0, 1, 0], 1), (&[0, 0, 1], -1)]));
        // Res_u(Au^2 + Bu + C, 2Au + B) = -A (B^2 - 4AC)
        let f = lp(4, &[(&[2, 1, 0, 0], 1), (&[1, 0, 1, 0], 1), (&[0, 0, 0, 1], 1)]);
        let g = lp(4, &[(&[1, 1, 0, 0], 2), (&[0, 0, 1, 0], 1)]);
        let expect = lp(4, &[(&[0, 1, 2, 0], -1), (&[0, 2, 0, 1], 4)]);
        assert_eq!(resultant(&f, &g, 0), expect);
    }

    #[test]
    fn too_many_vars() {
        let p = lp(3, &[(&[1, 0, 0], 1)]);
        assert!(matches!(solve_bivariate(&[p], &VariableDomain::torus(3)), Err(Error::DimensionTooHigh(3))));
    }
}
