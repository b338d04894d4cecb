//! Fraction-free determinants over exact rings (fields and polynomial rings).

use crate::field::{ArithResult, Field};
use crate::bipoly::BiPoly;
use crate::upoly::UPoly;

/// Commutative ring where divisions used by Bareiss elimination are exact.
pub trait ExactRing: Clone + Send + Sync {
    type Ctx: Clone;
    fn ring_zero(ctx: &Self::Ctx) -> Self;
    fn ring_one(ctx: &Self::Ctx) -> Self;
    fn ring_is_zero_checked(&self) -> ArithResult<bool>;
    fn ring_add(&self, o: &Self) -> Self;
    fn ring_sub(&self, o: &Self) -> Self;
    fn ring_mul(&self, o: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    /// `self / o`, where the division is known to be exact.
    fn ring_exact_div(&self, o: &Self) -> ArithResult<Self>;
}

impl<F: Field> ExactRing for F {
    type Ctx = F::Ctx;
    fn ring_zero(ctx: &F::Ctx) -> Self {
        F::zero(ctx)
    }
    fn ring_one(ctx: &F::Ctx) -> Self {
        F::one(ctx)
    }
    fn ring_is_zero_checked(&self) -> ArithResult<bool> {
        self.is_zero_checked()
    }
    fn ring_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn ring_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn ring_neg(&self) -> Self {
        self.neg()
    }
    fn ring_exact_div(&self, o: &Self) -> ArithResult<Self> {
        self.div(o)
    }
}

impl<F: Field> ExactRing for UPoly<F> {
    type Ctx = F::Ctx;
    fn ring_zero(ctx: &F::Ctx) -> Self {
        UPoly::zero(ctx)
    }
    fn ring_one(ctx: &F::Ctx) -> Self {
        UPoly::one(ctx)
    }
    fn ring_is_zero_checked(&self) -> ArithResult<bool> {
        let mut p = self.clone();
        p.normalize_checked()?;
        Ok(p.is_zero())
    }
    fn ring_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn ring_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn ring_neg(&self) -> Self {
        self.neg()
    }
    fn ring_exact_div(&self, o: &Self) -> ArithResult<Self> {
        self.exact_div(o)
    }
}

impl<F: Field> ExactRing for BiPoly<F> {
    type Ctx = F::Ctx;
    fn ring_zero(ctx: &F::Ctx) -> Self {
        BiPoly::zero(ctx)
    }
    fn ring_one(ctx: &F::Ctx) -> Self {
        BiPoly::one(ctx)
    }
    fn ring_is_zero_checked(&self) -> ArithResult<bool> {
        let mut p = self.clone();
        p.normalize_checked()?;
        Ok(p.is_zero())
    }
    fn ring_add(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn ring_sub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn ring_neg(&self) -> Self {
        self.neg()
    }
    fn ring_exact_div(&self, o: &Self) -> ArithResult<Self> {
        self.exact_div(o)
    }
}

/// Determinant by Bareiss elimination with row pivoting.
pub fn bareiss_det<R: ExactRing>(ctx: &R::Ctx, mut m: Vec<Vec<R>>) -> ArithResult<R> {
    let n = m.len();
    if n == 0 {
        return Ok(R::ring_one(ctx));
    }
    let mut negate = false;
    let mut prev = R::ring_one(ctx);
    for k in 0..n {
        let mut pivot = None;
        for i in k..n {
            if !m[i][k].ring_is_zero_checked()? {
                pivot = Some(i);
                break;
            }
        }
        let Some(p) = pivot else {
            return Ok(R::ring_zero(ctx));
        };
        if p != k {
            m.swap(p, k);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i][j].ring_mul(&m[k][k]).ring_sub(&m[i][k].ring_mul(&m[k][j]));
                m[i][j] = v.ring_exact_div(&prev)?;
            }
        }
        prev = m[k][k].clone();
    }
    let d = m[n - 1][n - 1].clone();
    Ok(if negate { d.ring_neg() } else { d })
}

/// Sylvester matrix of `a` (formal degree `da`) and `b` (formal degree `db`),
/// coefficients given low to high. Missing high coefficients count as zero.
pub fn sylvester<R: ExactRing>(ctx: &R::Ctx, a: &[R], da: usize, b: &[R], db: usize) -> Vec<Vec<R>> {
    let n = da + db;
    let coef = |p: &[R], i: usize| p.get(i).cloned().unwrap_or_else(|| R::ring_zero(ctx));
    let mut rows = Vec::with_capacity(n);
    for r in 0..db {
        let mut row = vec![R::ring_zero(ctx); n];
        for k in 0..=da {
            row[r + k] = coef(a, da - k);
        }
        rows.push(row);
    }
    for r in 0..da {
        let mut row = vec![R::ring_zero(ctx); n];
        for k in 0..=db {
            row[r + k] = coef(b, db - k);
        }
        rows.push(row);
    }
    rows
}

/// Resultant with explicit formal degrees.
pub fn formal_resultant<R: ExactRing>(ctx: &R::Ctx, a: &[R], da: usize, b: &[R], db: usize) -> ArithResult<R> {
    if da == 0 && db == 0 {
        return Ok(R::ring_one(ctx));
    }
    bareiss_det(ctx, sylvester(ctx, a, da, b, db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GaussianRational as G;

    fn gi(n: i64) -> G {
        G::from_i64(n)
    }

    #[test]
    fn det_small() {
        let m = vec![vec![gi(2), gi(1)], vec![gi(7), gi(4)]];
        assert_eq!(bareiss_det(&(), m).unwrap(), gi(1));
        let m = vec![vec![gi(0), gi(1)], vec![gi(1), gi(0)]];
        assert_eq!(bareiss_det(&(), m).unwrap(), gi(-1));
        let m = vec![vec![gi(1), gi(2)], vec![gi(2), gi(4)]];
        assert_eq!(bareiss_det(&(), m).unwrap(), gi(0));
    }

    #[test]
    fn resultant_linear() {
        // Res(u - 3, u - 5) = 3 - 5 with this convention (a first).
        let a = vec![gi(-3), gi(1)];
        let b = vec![gi(-5), gi(1)];
        let r = formal_resultant(&(), &a, 1, &b, 1).unwrap();
        assert_eq!(r, gi(-2));
    }
}
