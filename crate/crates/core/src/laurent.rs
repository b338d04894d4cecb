//! Sparse Laurent polynomials, coefficient vectors `(a_I)_{I∈S}`, and the
//! fiber polynomials `Q_{H,i}` obtained after the monomial change of
//! variables along a hyperplane.

use std::collections::BTreeMap;
use std::fmt;

use crate::bipoly::BiPoly;
use crate::config::{build_configuration, DifferenceHyperplane, PointConfiguration};
use crate::error::{Error, Result};
use crate::field::{ArithResult, Field, GaussianRational};
use crate::lattice::{LatticePoint, LatticeSplitting};
use crate::upoly::UPoly;

#[derive(Clone)]
pub struct LaurentPolynomial<F: Field = GaussianRational> {
    n_vars: usize,
    terms: BTreeMap<LatticePoint, F>,
    ctx: F::Ctx,
}

impl<F: Field> PartialEq for LaurentPolynomial<F> {
    fn eq(&self, other: &Self) -> bool {
        self.n_vars == other.n_vars && self.terms == other.terms
    }
}

impl<F: Field> fmt::Debug for LaurentPolynomial<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent{:?}", self.terms)
    }
}

impl<F: Field> LaurentPolynomial<F> {
    pub fn zero(n_vars: usize, ctx: &F::Ctx) -> Self {
        LaurentPolynomial { n_vars, terms: BTreeMap::new(), ctx: ctx.clone() }
    }

    pub fn from_terms(n_vars: usize, ctx: &F::Ctx, terms: impl IntoIterator<Item = (LatticePoint, F)>) -> Self {
        let mut p = Self::zero(n_vars, ctx);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn monomial(ctx: &F::Ctx, exp: LatticePoint, c: F) -> Self {
        Self::from_terms(exp.rank(), ctx, [(exp, c)])
    }

    pub fn constant(n_vars: usize, ctx: &F::Ctx, c: F) -> Self {
        Self::from_terms(n_vars, ctx, [(LatticePoint::zero(n_vars), c)])
    }

    /// Add `c·u^exp` in place.
    pub fn add_term(&mut self, exp: LatticePoint, c: F) {
        assert_eq!(exp.rank(), self.n_vars, "exponent length mismatch");
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&exp);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn terms(&self) -> &BTreeMap<LatticePoint, F> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(LatticePoint::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn neg(&self) -> Self {
        Self::from_terms(self.n_vars, &self.ctx, self.terms.iter().map(|(e, c)| (e.clone(), c.neg())))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut p = Self::zero(self.n_vars, &self.ctx);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                p.add_term(e1.add(e2), c1.mul(c2));
            }
        }
        p
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::from_terms(self.n_vars, &self.ctx, self.terms.iter().map(|(e, a)| (e.clone(), a.mul(c))))
    }

    pub fn mul_monomial(&self, exp: &LatticePoint) -> Self {
        Self::from_terms(self.n_vars, &self.ctx, self.terms.iter().map(|(e, c)| (e.add(exp), c.clone())))
    }

    /// Evaluate at a point; negative exponents need the coordinates to be units.
    pub fn eval(&self, point: &[F]) -> ArithResult<F> {
        assert_eq!(point.len(), self.n_vars);
        let mut acc = F::zero(&self.ctx);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e.coords()) {
                if k >= 0 {
                    t = t.mul(&x.pow(k as u64));
                } else {
                    t = t.mul(&x.inv()?.pow((-k) as u64));
                }
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// `z^I ↦ u^{Φ(I)}`.
    pub fn substitute_monomial(&self, phi: &LatticeSplitting) -> Self {
        Self::from_terms(self.n_vars, &self.ctx, self.terms.iter().map(|(e, c)| (phi.map(e), c.clone())))
    }

    /// Per-variable minimum exponent (zeros for the zero polynomial).
    pub fn min_exponents(&self) -> Vec<i64> {
        let mut m = vec![i64::MAX; self.n_vars];
        for e in self.terms.keys() {
            for (j, &x) in e.coords().iter().enumerate() {
                m[j] = m[j].min(x);
            }
        }
        m.into_iter().map(|x| if x == i64::MAX { 0 } else { x }).collect()
    }

    /// Multiply by the monomial that makes every exponent nonnegative. For a
    /// torus variable (`affine[j] == false`) the minimum exponent becomes 0,
    /// which also removes any monomial factor; for an affine variable only
    /// negative exponents are cleared.
    pub fn clear_monomials(&self, affine: &[bool]) -> Self {
        let shift: Vec<i64> = self
            .min_exponents()
            .iter()
            .zip(affine)
            .map(|(&m, &aff)| if aff { -(m.min(0)) } else { -m })
            .collect();
        self.mul_monomial(&LatticePoint(shift))
    }

    pub fn to_upoly(&self, affine: bool) -> UPoly<F> {
        assert_eq!(self.n_vars, 1);
        let p = self.clear_monomials(&[affine]);
        let deg = p.terms.keys().map(|e| e[0]).max().unwrap_or(0) as usize;
        let mut v = vec![F::zero(&self.ctx); deg + 1];
        for (e, c) in &p.terms {
            v[e[0] as usize] = c.clone();
        }
        UPoly::new(&self.ctx, v)
    }

    /// Variable 0 becomes `x`, variable 1 becomes `y`.
    pub fn to_bipoly(&self, affine: [bool; 2]) -> BiPoly<F> {
        assert_eq!(self.n_vars, 2);
        let p = self.clear_monomials(&affine);
        BiPoly::from_terms(&self.ctx, p.terms.iter().map(|(e, c)| (e[0] as usize, e[1] as usize, c.clone())))
    }

    pub fn map<G: Field>(&self, ctx: &G::Ctx, f: impl Fn(&F) -> G) -> LaurentPolynomial<G> {
        LaurentPolynomial::from_terms(self.n_vars, ctx, self.terms.iter().map(|(e, c)| (e.clone(), f(c))))
    }
}

impl LaurentPolynomial<GaussianRational> {
    /// Render with the given variable names, terms in lexicographic exponent order.
    pub fn to_string_with(&self, vars: &[&str]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (e, c) in &self.terms {
            let mono: Vec<String> = e
                .coords()
                .iter()
                .zip(vars)
                .filter(|(&k, _)| k != 0)
                .map(|(&k, v)| if k == 1 { v.to_string() } else { format!("{v}^{k}") })
                .collect();
            let cs = c.to_string();
            let cs = if c.is_real() { cs } else { format!("({cs})") };
            parts.push(if mono.is_empty() {
                cs
            } else if cs == "1" {
                mono.join("*")
            } else {
                format!("{cs}*{}", mono.join("*"))
            });
        }
        parts.join(" + ")
    }
}

impl fmt::Display for LaurentPolynomial<GaussianRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.n_vars).map(|i| format!("u{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        write!(f, "{}", self.to_string_with(&refs))
    }
}

/// `(a_I)_{I∈S}`; the keys are the configuration `S` (explicit zeros allowed).
#[derive(Clone)]
pub struct CoefficientVector<F: Field = GaussianRational> {
    rank: usize,
    entries: BTreeMap<LatticePoint, F>,
    ctx: F::Ctx,
}

impl<F: Field> PartialEq for CoefficientVector<F> {
    fn eq(&self, other: &Self) -> bool {
        self.rank == other.rank && self.entries == other.entries
    }
}

impl<F: Field> fmt::Debug for CoefficientVector<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coeffs{:?}", self.entries)
    }
}

impl<F: Field> CoefficientVector<F> {
    pub fn new(rank: usize, ctx: &F::Ctx, entries: BTreeMap<LatticePoint, F>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("empty coefficient vector".into()));
        }
        if let Some(bad) = entries.keys().find(|k| k.rank() != rank) {
            return Err(Error::InvalidInput(format!("exponent {bad} does not have length {rank}")));
        }
        Ok(CoefficientVector { rank, entries, ctx: ctx.clone() })
    }

    pub fn from_pairs(rank: usize, ctx: &F::Ctx, pairs: impl IntoIterator<Item = (LatticePoint, F)>) -> Result<Self> {
        Self::new(rank, ctx, pairs.into_iter().collect())
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entries(&self) -> &BTreeMap<LatticePoint, F> {
        &self.entries
    }

    pub fn get(&self, i: &LatticePoint) -> Option<&F> {
        self.entries.get(i)
    }

    pub fn support(&self) -> Vec<LatticePoint> {
        self.entries.keys().cloned().collect()
    }

    pub fn nonzero_support(&self) -> Vec<LatticePoint> {
        self.entries.iter().filter(|(_, c)| !c.is_zero()).map(|(k, _)| k.clone()).collect()
    }

    pub fn is_all_zero(&self) -> bool {
        self.entries.values().all(F::is_zero)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn configuration(&self) -> Result<PointConfiguration> {
        build_configuration(&self.support(), self.rank)
    }

    pub fn polynomial(&self) -> LaurentPolynomial<F> {
        LaurentPolynomial::from_terms(self.rank, &self.ctx, self.entries.iter().map(|(k, c)| (k.clone(), c.clone())))
    }

    pub fn map<G: Field>(&self, ctx: &G::Ctx, f: impl Fn(&F) -> G) -> CoefficientVector<G> {
        CoefficientVector { rank: self.rank, entries: self.entries.iter().map(|(k, c)| (k.clone(), f(c))).collect(), ctx: ctx.clone() }
    }

    pub fn scale(&self, c: &F) -> Self {
        self.map(&self.ctx, |a| a.mul(c))
    }

    /// `a_I ↦ a_I·λ^I` for a torus point `λ`.
    pub fn rescale_torus(&self, lambda: &[F]) -> ArithResult<Self> {
        let mut entries = BTreeMap::new();
        for (k, c) in &self.entries {
            let m = LaurentPolynomial::monomial(&self.ctx, k.clone(), c.clone());
            entries.insert(k.clone(), m.eval(lambda)?);
        }
        Ok(CoefficientVector { rank: self.rank, entries, ctx: self.ctx.clone() })
    }

    /// Extend by explicit zeros on `points` not already present.
    pub fn zero_extend(&self, points: &[LatticePoint]) -> Self {
        let mut entries = self.entries.clone();
        for p in points {
            entries.entry(p.clone()).or_insert_with(|| F::zero(&self.ctx));
        }
        CoefficientVector { rank: self.rank, entries, ctx: self.ctx.clone() }
    }

    /// `self + t·other` on the union of supports.
    pub fn add_scaled(&self, other: &Self, t: &F) -> Self {
        let mut entries = self.entries.clone();
        for (k, c) in &other.entries {
            let e = entries.entry(k.clone()).or_insert_with(|| F::zero(&self.ctx));
            *e = e.add(&c.mul(t));
        }
        CoefficientVector { rank: self.rank, entries, ctx: self.ctx.clone() }
    }
}

impl CoefficientVector<GaussianRational> {
    pub fn from_strings(rank: usize, pairs: &[(&[i64], &str)]) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (k, v) in pairs {
            entries.insert(LatticePoint(k.to_vec()), v.parse::<GaussianRational>()?);
        }
        Self::new(rank, &(), entries)
    }
}

/// `Q_{H,1..l_H}` in `r−1` variables, indexed by ascending fiber value.
#[derive(Clone, Debug)]
pub struct FiberSystem<F: Field = GaussianRational> {
    pub hyperplane: DifferenceHyperplane,
    pub polys: Vec<LaurentPolynomial<F>>,
}

/// Group `Σ a_I z^I` by `φ_H`, in the coordinates of the splitting along `H`.
/// `config` must be the configuration of `a`'s keys.
pub fn fiber_decomposition<F: Field>(
    a: &CoefficientVector<F>,
    config: &PointConfiguration,
    h: &DifferenceHyperplane,
) -> Result<FiberSystem<F>> {
    let r = a.rank();
    if config.span_dim() != r {
        return Err(Error::DegenerateConfiguration(format!(
            "configuration spans dimension {} < {r}",
            config.span_dim()
        )));
    }
    let mut polys = Vec::with_capacity(h.fibers.len());
    for (fiber, &d) in h.fibers.iter().zip(&h.fiber_values) {
        let mut q = LaurentPolynomial::zero(r - 1, a.ctx());
        for &idx in fiber {
            let point = &config.points()[idx];
            let image = h.splitting.map(&config.local_points()[idx]);
            debug_assert_eq!(image[r - 1], d);
            let c = a.get(point).cloned().unwrap_or_else(|| F::zero(a.ctx()));
            q.add_term(LatticePoint(image.coords()[..r - 1].to_vec()), c);
        }
        polys.push(q);
    }
    Ok(FiberSystem { hyperplane: h.clone(), polys })
}
