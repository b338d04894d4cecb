//! Dense univariate polynomials over a [`Field`], coefficients low to high.
//!
//! Trailing zeros are stripped structurally. When the coefficient ring is an
//! extension that may split, call [`UPoly::normalize_checked`] before trusting
//! the degree; everything here that needs a true degree does so.

use std::fmt;

use crate::field::{ArithError, ArithResult, Field, GaussianRational};
use crate::ring::formal_resultant;

#[derive(Clone)]
pub struct UPoly<F: Field> {
    coeffs: Vec<F>,
    ctx: F::Ctx,
}

impl<F: Field> PartialEq for UPoly<F> {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
    }
}

impl<F: Field> fmt::Debug for UPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UPoly{:?}", self.coeffs)
    }
}

impl<F: Field> UPoly<F> {
    pub fn new(ctx: &F::Ctx, coeffs: Vec<F>) -> Self {
        let mut p = UPoly { coeffs, ctx: ctx.clone() };
        p.trim();
        p
    }

    pub fn zero(ctx: &F::Ctx) -> Self {
        UPoly { coeffs: Vec::new(), ctx: ctx.clone() }
    }

    pub fn one(ctx: &F::Ctx) -> Self {
        Self::constant(ctx, F::one(ctx))
    }

    pub fn constant(ctx: &F::Ctx, c: F) -> Self {
        Self::new(ctx, vec![c])
    }

    /// `c·x^k`
    pub fn monomial(ctx: &F::Ctx, c: F, k: usize) -> Self {
        let mut v = vec![F::zero(ctx); k];
        v.push(c);
        Self::new(ctx, v)
    }

    pub fn x(ctx: &F::Ctx) -> Self {
        Self::monomial(ctx, F::one(ctx), 1)
    }

    pub fn from_i64s(ctx: &F::Ctx, cs: &[i64]) -> Self {
        Self::new(ctx, cs.iter().map(|&c| F::from_i64(ctx, c)).collect())
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<F> {
        self.coeffs
    }

    /// Coefficient of `x^i` (zero past the end).
    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(|| F::zero(&self.ctx))
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Strip leading coefficients that vanish, then make sure the leading
    /// coefficient is a unit (raises on a zero divisor).
    pub fn normalize_checked(&mut self) -> ArithResult<()> {
        self.trim();
        if let Some(lc) = self.coeffs.last() {
            lc.assert_unit()?;
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Structural degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `deg 0 = 0` (zero polynomial also reports 0).
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lc(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(|| F::zero(&self.ctx))
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let v = (0..n)
            .map(|i| match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::new(&self.ctx, v)
    }

    pub fn neg(&self) -> Self {
        UPoly { coeffs: self.coeffs.iter().map(F::neg).collect(), ctx: self.ctx.clone() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(&self.ctx);
        }
        let mut v = vec![F::zero(&self.ctx); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = v[i + j].add(&a.mul(b));
            }
        }
        Self::new(&self.ctx, v)
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(&self.ctx, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut v = vec![F::zero(&self.ctx); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(&self.ctx, v)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &F) -> F {
        let mut acc = F::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Substitute a polynomial for the variable.
    pub fn compose(&self, q: &Self) -> Self {
        let mut acc = Self::zero(&self.ctx);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(q).add(&Self::constant(&self.ctx, c.clone()));
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul(&F::from_i64(&self.ctx, i as i64)))
            .collect();
        Self::new(&self.ctx, v)
    }

    pub fn monic(&self) -> ArithResult<Self> {
        let mut p = self.clone();
        p.normalize_checked()?;
        if p.is_zero() {
            return Ok(p);
        }
        let inv = p.lc().inv()?;
        Ok(p.scale(&inv))
    }

    /// Euclidean division; the divisor's leading coefficient must be a unit.
    pub fn divrem(&self, b: &Self) -> ArithResult<(Self, Self)> {
        let mut b = b.clone();
        b.normalize_checked()?;
        if b.is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        let inv = b.lc().inv()?;
        let db = b.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= db {
            return Ok((Self::zero(&self.ctx), self.clone()));
        }
        let mut q = vec![F::zero(&self.ctx); r.len() - db];
        for k in (0..q.len()).rev() {
            let c = r[k + db].mul(&inv);
            if !c.is_zero() {
                for (j, bj) in b.coeffs.iter().enumerate() {
                    r[k + j] = r[k + j].sub(&c.mul(bj));
                }
            }
            q[k] = c;
        }
        r.truncate(db);
        Ok((Self::new(&self.ctx, q), Self::new(&self.ctx, r)))
    }

    pub fn rem(&self, b: &Self) -> ArithResult<Self> {
        Ok(self.divrem(b)?.1)
    }

    /// Division known to be exact.
    pub fn exact_div(&self, b: &Self) -> ArithResult<Self> {
        let (q, r) = self.divrem(b)?;
        debug_assert!(r.is_zero(), "inexact polynomial division");
        Ok(q)
    }

    /// Does `b` divide `self`?
    pub fn divides_into(&self, b: &Self) -> ArithResult<bool> {
        let mut r = self.rem(b)?;
        r.normalize_checked()?;
        Ok(r.is_zero())
    }

    /// Monic gcd (zero iff both inputs are zero).
    pub fn gcd(&self, o: &Self) -> ArithResult<Self> {
        let mut a = self.clone();
        let mut b = o.clone();
        a.normalize_checked()?;
        b.normalize_checked()?;
        if crate::modp::certified_coprime(&a, &b) {
            return Ok(Self::one(&self.ctx));
        }
        // monic remainders keep coefficient growth in check
        while !b.is_zero() {
            let r = a.rem(&b)?.monic()?;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Extended gcd: `(g, s, t)` with `s·self + t·o = g`, `g` monic.
    pub fn xgcd(&self, o: &Self) -> ArithResult<(Self, Self, Self)> {
        let ctx = &self.ctx;
        let (mut r0, mut r1) = (self.clone(), o.clone());
        r0.normalize_checked()?;
        r1.normalize_checked()?;
        let (mut s0, mut s1) = (Self::one(ctx), Self::zero(ctx));
        let (mut t0, mut t1) = (Self::zero(ctx), Self::one(ctx));
        while !r1.is_zero() {
            let (q, mut r) = r0.divrem(&r1)?;
            r.normalize_checked()?;
            let mut s = s0.sub(&q.mul(&s1));
            let mut t = t0.sub(&q.mul(&t1));
            if !r.is_zero() {
                // monic remainders keep coefficient growth in check
                let inv = r.lc().inv()?;
                r = r.scale(&inv);
                s = s.scale(&inv);
                t = t.scale(&inv);
            }
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        if r0.is_zero() {
            return Ok((r0, s0, t0));
        }
        let inv = r0.lc().inv()?;
        Ok((r0.scale(&inv), s0.scale(&inv), t0.scale(&inv)))
    }

    /// Largest `k` with `x^k | self`, and `self / x^k`. Low coefficients are
    /// tested with the checked zero test.
    pub fn strip_x_power(&self) -> ArithResult<(usize, Self)> {
        let mut k = 0;
        while k < self.coeffs.len() && self.coeffs[k].is_zero_checked()? {
            k += 1;
        }
        if k == self.coeffs.len() {
            return Ok((0, self.clone()));
        }
        Ok((k, Self::new(&self.ctx, self.coeffs[k..].to_vec())))
    }

    /// Square-free part, monic.
    pub fn squarefree_part(&self) -> ArithResult<Self> {
        let p = self.monic()?;
        if p.deg() == 0 {
            return Ok(p);
        }
        let g = p.gcd(&p.derivative())?;
        p.exact_div(&g)?.monic()
    }

    /// Yun's square-free decomposition: pairs `(a_i, i)` with `self = lc·∏ a_i^i`,
    /// `a_i` monic, square-free, pairwise coprime, nonconstant.
    pub fn squarefree_decomposition(&self) -> ArithResult<Vec<(Self, usize)>> {
        let f = self.monic()?;
        let mut out = Vec::new();
        if f.deg() == 0 {
            return Ok(out);
        }
        let fp = f.derivative();
        let a0 = f.gcd(&fp)?;
        let mut b = f.exact_div(&a0)?;
        let c = fp.exact_div(&a0)?;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            b.normalize_checked()?;
            if b.deg() == 0 {
                break;
            }
            let a = b.gcd(&d)?;
            b = b.exact_div(&a)?;
            let c = d.exact_div(&a)?;
            d = c.sub(&b.derivative());
            if a.deg() > 0 {
                out.push((a, i));
            }
            i += 1;
        }
        Ok(out)
    }

    /// Sylvester resultant with respect to the structural degrees.
    pub fn resultant(&self, o: &Self) -> ArithResult<F> {
        let mut a = self.clone();
        let mut b = o.clone();
        a.normalize_checked()?;
        b.normalize_checked()?;
        if a.is_zero() || b.is_zero() {
            return Ok(F::zero(&self.ctx));
        }
        formal_resultant(&self.ctx, &a.coeffs, a.deg(), &b.coeffs, b.deg())
    }

    pub fn map<G: Field>(&self, ctx: &G::Ctx, f: impl Fn(&F) -> G) -> UPoly<G> {
        UPoly::new(ctx, self.coeffs.iter().map(f).collect())
    }
}

impl UPoly<GaussianRational> {
    pub fn from_gaussians(cs: Vec<GaussianRational>) -> Self {
        Self::new(&(), cs)
    }

    /// Human-readable form in the variable `var`, highest degree first.
    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mut cs = c.to_string();
            let negative = c.is_real() && c.re < num_rational::BigRational::from_integer(0.into());
            if negative {
                cs = cs[1..].to_string();
            }
            let complex = !c.is_real();
            if complex {
                cs = format!("({cs})");
            }
            if out.is_empty() {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let mono = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&cs);
            } else if cs == "1" {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{cs}*{mono}"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaussianRational as G;

    fn p(cs: &[i64]) -> UPoly<G> {
        UPoly::from_i64s(&(), cs)
    }

    #[test]
    fn arithmetic() {
        let a = p(&[-1, 1]);
        let b = p(&[1, 1]);
        assert_eq!(a.mul(&b), p(&[-1, 0, 1]));
        let (q, r) = p(&[-1, 0, 1]).divrem(&a).unwrap();
        assert_eq!(q, b);
        assert!(r.is_zero());
        assert_eq!(p(&[1, 2, 3]).derivative(), p(&[2, 6]));
        assert_eq!(p(&[1, 1]).compose(&p(&[0, 0, 1])), p(&[1, 0, 1]));
    }

    #[test]
    fn gcds() {
        assert_eq!(p(&[-1, 1]).gcd(&p(&[1, 1])).unwrap(), p(&[1]));
        assert_eq!(p(&[-1, 0, 1]).gcd(&p(&[-2, 2])).unwrap(), p(&[-1, 1]));
        let (g, s, t) = p(&[-1, 0, 1]).xgcd(&p(&[2, 1])).unwrap();
        assert_eq!(g, p(&[1]));
        assert_eq!(s.mul(&p(&[-1, 0, 1])).add(&t.mul(&p(&[2, 1]))), g);
    }

    #[test]
    fn yun() {
        // (x-1)^2 (x+2)^3 x
        let f = p(&[-1, 1]).pow(2).mul(&p(&[2, 1]).pow(3)).mul(&p(&[0, 1]));
        let dec = f.squarefree_decomposition().unwrap();
        assert_eq!(dec, vec![(p(&[0, 1]), 1), (p(&[-1, 1]), 2), (p(&[2, 1]), 3)]);
        assert_eq!(f.squarefree_part().unwrap(), p(&[0, 1]).mul(&p(&[-1, 1])).mul(&p(&[2, 1])));
    }

    #[test]
    fn resultants() {
        // Res(x^2 - 1, x - 2) = 3 up to sign convention: det [[1,0,-1],[1,-2,0],[0,1,-2]]
        let r = p(&[-1, 0, 1]).resultant(&p(&[-2, 1])).unwrap();
        assert_eq!(r, G::from_i64(3));
        assert!(p(&[-1, 1]).resultant(&p(&[-1, 0, 1])).unwrap().is_zero());
    }

    #[test]
    fn strip_and_print() {
        let (k, q) = p(&[0, 0, 3, 1]).strip_x_power().unwrap();
        assert_eq!(k, 2);
        assert_eq!(q, p(&[3, 1]));
        assert_eq!(p(&[4, -2, 1]).to_string_in("t"), "t^2 - 2*t + 4");
    }
}
