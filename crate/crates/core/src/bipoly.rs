//! Bivariate polynomials `F[x][y]`, stored as a vector of `x`-polynomials
//! indexed by the `y`-degree.

use std::fmt;
use std::sync::Arc;

use crate::ext::{Ext, ExtCtx};
use crate::field::{ArithResult, Field};
use crate::ring::formal_resultant;
use crate::upoly::UPoly;

#[derive(Clone)]
pub struct BiPoly<F: Field> {
    rows: Vec<UPoly<F>>,
    ctx: F::Ctx,
}

impl<F: Field> PartialEq for BiPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
    }
}

impl<F: Field> fmt::Debug for BiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiPoly{:?}", self.rows)
    }
}

impl<F: Field> BiPoly<F> {
    pub fn new(ctx: &F::Ctx, rows: Vec<UPoly<F>>) -> Self {
        let mut p = BiPoly { rows, ctx: ctx.clone() };
        p.trim();
        p
    }

    pub fn zero(ctx: &F::Ctx) -> Self {
        BiPoly { rows: Vec::new(), ctx: ctx.clone() }
    }

    pub fn one(ctx: &F::Ctx) -> Self {
        Self::new(ctx, vec![UPoly::one(ctx)])
    }

    /// From `(x exponent, y exponent, coefficient)` triples (exponents ≥ 0).
    pub fn from_terms(ctx: &F::Ctx, terms: impl IntoIterator<Item = (usize, usize, F)>) -> Self {
        let mut rows: Vec<Vec<F>> = Vec::new();
        for (i, j, c) in terms {
            if rows.len() <= j {
                rows.resize(j + 1, Vec::new());
            }
            if rows[j].len() <= i {
                rows[j].resize(i + 1, F::zero(ctx));
            }
            rows[j][i] = rows[j][i].add(&c);
        }
        Self::new(ctx, rows.into_iter().map(|r| UPoly::new(ctx, r)).collect())
    }

    /// A polynomial in `x` only.
    pub fn from_x(p: UPoly<F>) -> Self {
        let ctx = p.ctx().clone();
        Self::new(&ctx, vec![p])
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn rows(&self) -> &[UPoly<F>] {
        &self.rows
    }

    pub fn row(&self, j: usize) -> UPoly<F> {
        self.rows.get(j).cloned().unwrap_or_else(|| UPoly::zero(&self.ctx))
    }

    fn trim(&mut self) {
        while self.rows.last().is_some_and(UPoly::is_zero) {
            self.rows.pop();
        }
    }

    /// Make the `y`-degree reliable: the top row is nonzero on every component.
    pub fn normalize_checked(&mut self) -> ArithResult<()> {
        self.trim();
        if let Some(top) = self.rows.last_mut() {
            top.normalize_checked()?;
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn deg_y(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    pub fn deg_x(&self) -> usize {
        self.rows.iter().map(UPoly::deg).max().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.rows.len() <= 1 && self.rows.first().map_or(true, UPoly::is_constant)
    }

    pub fn lc_y(&self) -> UPoly<F> {
        self.rows.last().cloned().unwrap_or_else(|| UPoly::zero(&self.ctx))
    }

    pub fn term_count(&self) -> usize {
        self.rows.iter().map(|r| r.coeffs().iter().filter(|c| !c.is_zero()).count()).sum()
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.rows.len().max(o.rows.len());
        Self::new(&self.ctx, (0..n).map(|j| self.row(j).add(&o.row(j))).collect())
    }

    pub fn neg(&self) -> Self {
        BiPoly { rows: self.rows.iter().map(UPoly::neg).collect(), ctx: self.ctx.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.ctx);
        }
        let mut rows = vec![UPoly::zero(&self.ctx); self.rows.len() + o.rows.len() - 1];
        for (i, a) in self.rows.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.rows.iter().enumerate() {
                rows[i + j] = rows[i + j].add(&a.mul(b));
            }
        }
        Self::new(&self.ctx, rows)
    }

    pub fn scale_x(&self, c: &UPoly<F>) -> Self {
        Self::new(&self.ctx, self.rows.iter().map(|r| r.mul(c)).collect())
    }

    fn shift_y(&self, k: usize) -> Self {
        let mut rows = vec![UPoly::zero(&self.ctx); k];
        rows.extend(self.rows.iter().cloned());
        Self::new(&self.ctx, rows)
    }

    /// Swap the roles of `x` and `y`.
    pub fn transpose(&self) -> Self {
        let dx = self.deg_x();
        let mut rows = vec![vec![F::zero(&self.ctx); self.rows.len()]; dx + 1];
        for (j, r) in self.rows.iter().enumerate() {
            for (i, c) in r.coeffs().iter().enumerate() {
                rows[i][j] = c.clone();
            }
        }
        Self::new(&self.ctx, rows.into_iter().map(|r| UPoly::new(&self.ctx, r)).collect())
    }

    pub fn eval(&self, x: &F, y: &F) -> F {
        self.eval_x(x).eval(y)
    }

    /// Specialize `x`; result is a polynomial in `y`.
    pub fn eval_x(&self, x: &F) -> UPoly<F> {
        UPoly::new(&self.ctx, self.rows.iter().map(|r| r.eval(x)).collect())
    }

    /// Reduce the `x`-coefficients into `F[x]/(m)`; result is a polynomial in `y`
    /// over the extension.
    pub fn to_ext(&self, ctx: &Arc<ExtCtx<F>>) -> UPoly<Ext<F>> {
        UPoly::new(ctx, self.rows.iter().map(|r| Ext::from_poly(ctx, r)).collect())
    }

    /// Largest `k` with `y^k | self`, checked.
    pub fn y_power(&self) -> ArithResult<usize> {
        let mut k = 0;
        while k < self.rows.len() {
            let mut r = self.rows[k].clone();
            r.normalize_checked()?;
            if !r.is_zero() {
                return Ok(k);
            }
            k += 1;
        }
        Ok(0)
    }

    /// Largest `k` with `x^k | self`, checked.
    pub fn x_power(&self) -> ArithResult<usize> {
        let mut best = usize::MAX;
        for r in &self.rows {
            if r.is_zero() {
                continue;
            }
            let (k, _) = r.strip_x_power()?;
            best = best.min(k);
        }
        Ok(if best == usize::MAX { 0 } else { best })
    }

    /// Divide by `x^kx y^ky` (caller guarantees divisibility).
    pub fn divide_monomial(&self, kx: usize, ky: usize) -> Self {
        let rows = self.rows[ky.min(self.rows.len())..]
            .iter()
            .map(|r| UPoly::new(&self.ctx, r.coeffs().iter().skip(kx).cloned().collect()))
            .collect();
        Self::new(&self.ctx, rows)
    }

    /// Monic gcd of the `x`-coefficient rows.
    pub fn content(&self) -> ArithResult<UPoly<F>> {
        let mut g = UPoly::zero(&self.ctx);
        for r in &self.rows {
            g = g.gcd(r)?;
            if g.deg() == 0 && !g.is_zero() {
                break;
            }
        }
        Ok(g)
    }

    pub fn primitive_part(&self) -> ArithResult<Self> {
        let c = self.content()?;
        if c.is_zero() {
            return Ok(self.clone());
        }
        self.div_x(&c)
    }

    /// Divide every row by `c` exactly.
    pub fn div_x(&self, c: &UPoly<F>) -> ArithResult<Self> {
        let rows = self.rows.iter().map(|r| r.exact_div(c)).collect::<ArithResult<Vec<_>>>()?;
        Ok(Self::new(&self.ctx, rows))
    }

    /// Pseudo-remainder with respect to `y`.
    pub fn prem(&self, b: &Self) -> ArithResult<Self> {
        let mut b = b.clone();
        b.normalize_checked()?;
        let db = b.deg_y();
        let lb = b.lc_y();
        let mut r = self.clone();
        r.normalize_checked()?;
        while !r.is_zero() && r.deg_y() >= db {
            let lr = r.lc_y();
            let k = r.deg_y() - db;
            r = r.scale_x(&lb).sub(&b.shift_y(k).scale_x(&lr));
            r.normalize_checked()?;
        }
        Ok(r)
    }

    /// Exact division in `F[x][y]`.
    pub fn exact_div(&self, b: &Self) -> ArithResult<Self> {
        let mut b = b.clone();
        b.normalize_checked()?;
        let db = b.deg_y();
        let lb = b.lc_y();
        let mut r = self.clone();
        r.normalize_checked()?;
        let mut q = Self::zero(&self.ctx);
        while !r.is_zero() {
            debug_assert!(r.deg_y() >= db, "inexact bivariate division");
            if r.deg_y() < db {
                break;
            }
            let k = r.deg_y() - db;
            let c = r.lc_y().exact_div(&lb)?;
            let term = Self::from_x(c).shift_y(k);
            r = r.sub(&term.mul(&b));
            r.normalize_checked()?;
            q = q.add(&term);
        }
        Ok(q)
    }

    /// Gcd in `F[x][y]`, normalized so the leading `x`-coefficient of the
    /// leading `y`-row is 1.
    pub fn gcd(&self, o: &Self) -> ArithResult<Self> {
        let mut a = self.clone();
        let mut b = o.clone();
        a.normalize_checked()?;
        b.normalize_checked()?;
        if a.is_zero() {
            return b.make_monic();
        }
        if b.is_zero() {
            return a.make_monic();
        }
        let c = a.content()?.gcd(&b.content()?)?;
        let mut pa = a.primitive_part()?;
        let mut pb = b.primitive_part()?;
        if pa.deg_y() < pb.deg_y() {
            std::mem::swap(&mut pa, &mut pb);
        }
        while !pb.is_zero() {
            if pb.deg_y() == 0 {
                pa = Self::one(&self.ctx);
                break;
            }
            let r = pa.prem(&pb)?;
            pa = pb;
            pb = if r.is_zero() { r } else { r.primitive_part()? };
            pb.normalize_checked()?;
        }
        if pa.deg_y() == 0 {
            pa = Self::one(&self.ctx);
        }
        pa.scale_x(&c).make_monic()
    }

    /// Scale so that the leading coefficient is 1.
    pub fn make_monic(&self) -> ArithResult<Self> {
        let mut p = self.clone();
        p.normalize_checked()?;
        if p.is_zero() {
            return Ok(p);
        }
        let inv = p.lc_y().lc().inv()?;
        Ok(p.scale_x(&UPoly::constant(&self.ctx, inv)))
    }

    /// `Res_y(self, o)` as a polynomial in `x`.
    pub fn resultant_y(&self, o: &Self) -> ArithResult<UPoly<F>> {
        let mut a = self.clone();
        let mut b = o.clone();
        a.normalize_checked()?;
        b.normalize_checked()?;
        if a.is_zero() || b.is_zero() {
            return Ok(UPoly::zero(&self.ctx));
        }
        formal_resultant(&self.ctx, &a.rows, a.deg_y(), &b.rows, b.deg_y())
    }

    pub fn map<G: Field>(&self, ctx: &G::Ctx, f: impl Fn(&F) -> G + Copy) -> BiPoly<G> {
        BiPoly::new(ctx, self.rows.iter().map(|r| r.map(ctx, f)).collect())
    }
}
