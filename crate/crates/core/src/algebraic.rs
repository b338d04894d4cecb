//! Algebraic numbers over ℚ(i): a square-free defining polynomial plus a
//! rational box containing exactly one of its roots.
//!
//! Roots are located numerically (Aberth iteration in `f64`) and then
//! certified exactly: for a degree-`n` polynomial there is a root within
//! `n·|f(z)/f'(z)|` of any `z`, so `n` pairwise disjoint boxes around such
//! disks isolate all roots.

use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::field::{rat_to_f64, ArithResult, Field, GaussianRational as G};
use crate::upoly::UPoly;

#[derive(Clone, PartialEq, Eq, Serialize)]
pub struct RationalBox {
    #[serde(serialize_with = "ser_rat")]
    pub re_lo: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub re_hi: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub im_lo: BigRational,
    #[serde(serialize_with = "ser_rat")]
    pub im_hi: BigRational,
}

fn ser_rat<S: serde::Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl RationalBox {
    fn around(c: &G, rad: &BigRational) -> Self {
        RationalBox { re_lo: &c.re - rad, re_hi: &c.re + rad, im_lo: &c.im - rad, im_hi: &c.im + rad }
    }

    fn point(c: &G) -> Self {
        RationalBox { re_lo: c.re.clone(), re_hi: c.re.clone(), im_lo: c.im.clone(), im_hi: c.im.clone() }
    }

    pub fn disjoint(&self, o: &Self) -> bool {
        self.re_hi < o.re_lo || o.re_hi < self.re_lo || self.im_hi < o.im_lo || o.im_hi < self.im_lo
    }

    pub fn contains_box(&self, o: &Self) -> bool {
        self.re_lo <= o.re_lo && o.re_hi <= self.re_hi && self.im_lo <= o.im_lo && o.im_hi <= self.im_hi
    }

    pub fn contains(&self, z: &G) -> bool {
        self.re_lo <= z.re && z.re <= self.re_hi && self.im_lo <= z.im && z.im <= self.im_hi
    }

    pub fn center(&self) -> G {
        let two = BigRational::from_integer(2.into());
        G::new((&self.re_lo + &self.re_hi) / &two, (&self.im_lo + &self.im_hi) / &two)
    }

    pub fn width(&self) -> BigRational {
        (&self.re_hi - &self.re_lo).max(&self.im_hi - &self.im_lo)
    }

    /// Does the box exclude the origin?
    pub fn excludes_zero(&self) -> bool {
        let z = BigRational::zero();
        self.re_lo > z || self.re_hi < z || self.im_lo > z || self.im_hi < z
    }
}

impl fmt::Debug for RationalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]x[{}, {}]", self.re_lo, self.re_hi, self.im_lo, self.im_hi)
    }
}

#[derive(Clone, PartialEq, Serialize)]
pub struct AlgebraicNumber {
    #[serde(serialize_with = "ser_poly")]
    pub min_poly: UPoly<G>,
    pub isolating_box: RationalBox,
}

fn ser_poly<S: serde::Serializer>(p: &UPoly<G>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string_in("x"))
}

impl fmt::Debug for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AlgebraicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.approx();
        write!(f, "root of {} near {:.6}{:+.6}i", self.min_poly.to_string_in("x"), z.re, z.im)
    }
}

impl AlgebraicNumber {
    pub fn approx(&self) -> Complex64 {
        self.isolating_box.center().to_complex()
    }

    /// Exact rational value, when the box has collapsed to a point.
    pub fn exact_value(&self) -> Option<G> {
        (self.isolating_box.re_lo == self.isolating_box.re_hi && self.isolating_box.im_lo == self.isolating_box.im_hi)
            .then(|| self.isolating_box.center())
    }

    pub fn is_nonzero(&self) -> bool {
        !self.min_poly.coeff(0).is_zero() || self.min_poly.deg() == 0
    }

    /// Shrink the box until its width is below `2^-bits`, keeping isolation.
    pub fn refine(&mut self, bits: u32) {
        let target = BigRational::new(BigRational::one().numer().clone(), num_bigint::BigInt::one() << bits as usize);
        let n = self.min_poly.deg();
        let mut prec = 64u32;
        let mut c = self.isolating_box.center();
        let mut guard = 0;
        while self.isolating_box.width() > target && guard < 200 {
            guard += 1;
            prec = (prec * 2).min(bits + 64);
            c = newton_step(&self.min_poly, &c, prec).unwrap_or(c);
            if let Some(rad) = root_radius(&self.min_poly, &c, n) {
                let b = RationalBox::around(&c, &rad);
                if self.isolating_box.contains_box(&b) {
                    self.isolating_box = b;
                }
            }
        }
    }
}

/// One exact Newton step rounded to a dyadic grid of `bits` bits.
fn newton_step(f: &UPoly<G>, z: &G, bits: u32) -> ArithResult<G> {
    let fz = f.eval(z);
    let dz = f.derivative().eval(z);
    let next = z.sub(&fz.div(&dz)?);
    Ok(round_dyadic(&next, bits))
}

fn round_dyadic(z: &G, bits: u32) -> G {
    let scale = BigRational::from_integer(num_bigint::BigInt::one() << bits as usize);
    let r = |x: &BigRational| (x * &scale).round() / &scale;
    G::new(r(&z.re), r(&z.im))
}

/// Rational upper bound on `n·|f(z)/f'(z)|` (`None` if `f'(z) = 0`).
fn root_radius(f: &UPoly<G>, z: &G, n: usize) -> Option<BigRational> {
    let fz = f.eval(z);
    if fz.is_zero() {
        return Some(BigRational::zero());
    }
    let dz = f.derivative().eval(z);
    if dz.is_zero() {
        return None;
    }
    let nn = BigRational::from_integer((n as i64).into());
    let rad2 = &nn * &nn * fz.norm_sqr() / dz.norm_sqr();
    Some(sqrt_upper(&rad2))
}

/// A rational `s ≥ sqrt(x)` within a small factor.
fn sqrt_upper(x: &BigRational) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    let approx = rat_to_f64(x).sqrt();
    let mut s = if approx.is_finite() && approx > 0.0 {
        BigRational::from_float(approx * 1.0001).unwrap_or_else(BigRational::one)
    } else {
        // below f64 range: work with the bit length
        let bits = x.denom().bits() as i64 - x.numer().bits() as i64;
        BigRational::new(BigRational::one().numer().clone(), num_bigint::BigInt::one() << ((bits / 2 - 1).max(0) as usize))
    };
    while &(&s * &s) < x {
        s = &s * BigRational::from_integer(2.into());
    }
    s
}

/// Approximate all complex roots of a polynomial with complex coefficients
/// (low to high) by Aberth–Ehrlich iteration.
pub fn approx_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|z| z.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lc = c[n];
    let c: Vec<Complex64> = c.iter().map(|z| z / lc).collect();
    // Cauchy-type bound for initial radius
    let rad = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let rad = rad.min(1e6);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(rad * 0.5 + 0.1, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    let eval = |x: Complex64| -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            d = d * x + p;
            p = p * x + a;
        }
        (p, d)
    };
    for _ in 0..2000 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, d) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / d;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * s);
            if w.is_finite() {
                z[i] -= w;
                max_step = max_step.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    z
}

fn to_complex_coeffs(p: &UPoly<G>) -> Vec<Complex64> {
    p.coeffs().iter().map(G::to_complex).collect()
}

/// Isolate all roots of `p` (made square-free first).
pub fn isolate_roots(p: &UPoly<G>) -> Vec<AlgebraicNumber> {
    let f = p.squarefree_part().expect("field arithmetic over Q(i)");
    let n = f.deg();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        let root = f.coeff(0).neg().div(&f.coeff(1)).expect("monic");
        return vec![AlgebraicNumber { min_poly: f, isolating_box: RationalBox::point(&root) }];
    }
    let approx = approx_roots(&to_complex_coeffs(&f));
    let mut centers: Vec<G> = approx.iter().map(|z| G::from_complex_dyadic(*z, 52)).collect();
    let mut prec = 64u32;
    for _round in 0..12 {
        let radii: Option<Vec<BigRational>> = centers.iter().map(|c| root_radius(&f, c, n)).collect();
        if let Some(radii) = radii {
            let boxes: Vec<RationalBox> = centers.iter().zip(&radii).map(|(c, r)| RationalBox::around(c, r)).collect();
            let ok = (0..n).all(|i| (i + 1..n).all(|j| boxes[i].disjoint(&boxes[j])));
            if ok {
                let mut out: Vec<AlgebraicNumber> =
                    boxes.into_iter().map(|b| AlgebraicNumber { min_poly: f.clone(), isolating_box: b }).collect();
                out.sort_by(|a, b| {
                    let (za, zb) = (a.approx(), b.approx());
                    (za.re, za.im).partial_cmp(&(zb.re, zb.im)).unwrap_or(std::cmp::Ordering::Equal)
                });
                return out;
            }
        }
        prec *= 2;
        centers = centers.iter().map(|c| newton_step(&f, c, prec).unwrap_or_else(|_| c.clone())).collect();
    }
    panic!("root isolation did not converge for {}", f.to_string_in("x"));
}

/// The isolated root of `p` closest to `target`.
pub fn closest_root(p: &UPoly<G>, target: Complex64) -> Option<AlgebraicNumber> {
    isolate_roots(p).into_iter().min_by(|a, b| {
        (a.approx() - target).norm().partial_cmp(&(b.approx() - target).norm()).unwrap_or(std::cmp::Ordering::Equal)
    })
}

/// Does the box exclude zero, or is the polynomial's constant term nonzero?
pub fn is_nonzero_root(a: &AlgebraicNumber) -> bool {
    !a.min_poly.coeff(0).is_zero() || a.isolating_box.excludes_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> UPoly<G> {
        UPoly::from_i64s(&(), cs)
    }

    #[test]
    fn isolate_simple() {
        let roots = isolate_roots(&p(&[-2, 0, 1]));
        assert_eq!(roots.len(), 2);
        assert!((roots[0].approx().re + std::f64::consts::SQRT_2).abs() < 1e-9);
        assert!(roots[0].isolating_box.disjoint(&roots[1].isolating_box));
        let roots = isolate_roots(&p(&[1, 0, 1]));
        assert_eq!(roots.len(), 2);
        assert!((roots[1].approx().im - 1.0).abs() < 1e-9);
    }

    #[test]
    fn isolate_repeated_and_linear() {
        let f = p(&[-1, 1]).pow(3).mul(&p(&[2, 1]));
        let roots = isolate_roots(&f);
        assert_eq!(roots.len(), 2);
        let r = isolate_roots(&p(&[-3, 2]));
        assert_eq!(r[0].exact_value(), Some(G::from_ratio(3, 2)));
    }

    #[test]
    fn isolate_clustered() {
        // roots 1, 1 + 1/1000, 2, and ±i
        let f = p(&[-1, 1]).mul(&p(&[-1001, 1000])).mul(&p(&[-2, 1])).mul(&p(&[1, 0, 1]));
        let roots = isolate_roots(&f);
        assert_eq!(roots.len(), 5);
        for i in 0..5 {
            for j in i + 1..5 {
                assert!(roots[i].isolating_box.disjoint(&roots[j].isolating_box));
            }
        }
    }

    #[test]
    fn refine_shrinks() {
        let mut r = isolate_roots(&p(&[-2, 0, 1])).pop().unwrap();
        r.refine(80);
        let w = rat_to_f64(&r.isolating_box.width());
        assert!(w < 1e-20, "{w}");
        let c = r.isolating_box.center();
        assert!((rat_to_f64(&c.re) - std::f64::consts::SQRT_2).abs() < 1e-15);
    }
}
