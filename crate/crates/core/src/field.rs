//! Coefficient fields.
//!
//! [`GaussianRational`] is the base field ℚ(i). Algebraic extensions are built in
//! [`crate::ext`]; those are products of fields in general, so inversion is
//! fallible and reports the zero divisor it ran into.

use std::any::Any;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Raised by inversion in a ring that is not a field.
#[derive(Clone, thiserror::Error)]
pub enum ArithError {
    #[error("division by zero")]
    DivisionByZero,
    /// The modulus of extension `ext_id` has the nontrivial monic factor `factor`
    /// (a `UPoly` over the extension's base field).
    #[error("zero divisor in extension {ext_id}")]
    ZeroDivisor { ext_id: u64, factor: Arc<dyn Any + Send + Sync> },
}

impl fmt::Debug for ArithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArithError::DivisionByZero => write!(f, "DivisionByZero"),
            ArithError::ZeroDivisor { ext_id, .. } => write!(f, "ZeroDivisor(ext {ext_id})"),
        }
    }
}

pub type ArithResult<T> = std::result::Result<T, ArithError>;

/// A commutative ring with exact arithmetic in which every element is either
/// zero, a unit, or detectably a zero divisor.
pub trait Field: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    type Ctx: Clone + fmt::Debug + Send + Sync + 'static;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_gaussian(ctx: &Self::Ctx, g: &GaussianRational) -> Self;
    /// Structural zero test (exact; the representation is canonical).
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> ArithResult<Self>;

    fn assert_unit(&self) -> ArithResult<()> {
        self.inv().map(|_| ())
    }

    /// Zero test that is valid on every component: a structurally nonzero
    /// element that is a zero divisor raises instead of answering.
    fn is_zero_checked(&self) -> ArithResult<bool> {
        if self.is_zero() {
            Ok(true)
        } else {
            self.assert_unit()?;
            Ok(false)
        }
    }

    fn from_i64(ctx: &Self::Ctx, n: i64) -> Self {
        Self::from_gaussian(ctx, &GaussianRational::from_i64(n))
    }

    fn is_one(&self) -> bool {
        *self == Self::one(&self.ctx())
    }

    fn div(&self, other: &Self) -> ArithResult<Self> {
        Ok(self.mul(&other.inv()?))
    }

    /// Image in `F_p` under `i ↦ iota` (`iota² ≡ −1`), when defined.
    fn mod_image(&self, _p: u64, _iota: u64) -> Option<u64> {
        None
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// An element `re + im·i` of ℚ(i).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussianRational { re, im }
    }

    pub fn from_i64(n: i64) -> Self {
        GaussianRational { re: BigRational::from_integer(n.into()), im: BigRational::zero() }
    }

    pub fn from_rational(re: BigRational) -> Self {
        GaussianRational { re, im: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(num.into(), den.into()))
    }

    pub fn i() -> Self {
        GaussianRational { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn zero_value() -> Self {
        Self::from_i64(0)
    }

    pub fn one_value() -> Self {
        Self::from_i64(1)
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussianRational { re: self.re.clone(), im: -&self.im }
    }

    /// |z|² as an exact rational.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(rat_to_f64(&self.re), rat_to_f64(&self.im))
    }

    /// Nearest dyadic rational with denominator `2^bits` (per component).
    pub fn from_complex_dyadic(z: Complex64, bits: u32) -> Self {
        GaussianRational { re: f64_to_dyadic(z.re, bits), im: f64_to_dyadic(z.im, bits) }
    }
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Huge numerators/denominators: scale through bit lengths.
        let n = r.numer();
        let d = r.denom();
        let shift = n.bits().max(d.bits()) as i64 - 60;
        if shift <= 0 {
            return 0.0;
        }
        let ns = n >> shift as usize;
        let ds = d >> shift as usize;
        ns.to_f64().unwrap_or(0.0) / ds.to_f64().unwrap_or(1.0)
    })
}

pub(crate) fn f64_to_dyadic(x: f64, bits: u32) -> BigRational {
    if !x.is_finite() {
        return BigRational::zero();
    }
    let scale = 2f64.powi(bits.min(1000) as i32);
    let scaled = (x * scale).round();
    let num = BigInt::from(scaled as i128);
    BigRational::new(num, BigInt::one() << bits as usize)
}

impl Field for GaussianRational {
    type Ctx = ();

    fn ctx(&self) {}

    fn mod_image(&self, p: u64, iota: u64) -> Option<u64> {
        let pb = BigInt::from(p);
        let reduce = |q: &BigRational| -> Option<u64> {
            let d = (q.denom() % &pb).to_u64()?;
            if d == 0 {
                return None;
            }
            let n = q.numer().mod_floor(&pb).to_u64()?;
            Some((n as u128 * crate::modp::pow_mod(d, p - 2, p) as u128 % p as u128) as u64)
        };
        let (re, im) = (reduce(&self.re)?, reduce(&self.im)?);
        Some(((re as u128 + im as u128 * iota as u128) % p as u128) as u64)
    }

    fn zero(_: &()) -> Self {
        Self::zero_value()
    }

    fn one(_: &()) -> Self {
        Self::one_value()
    }

    fn from_gaussian(_: &(), g: &GaussianRational) -> Self {
        g.clone()
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn add(&self, o: &Self) -> Self {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    fn sub(&self, o: &Self) -> Self {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn mul(&self, o: &Self) -> Self {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussianRational { re: &self.re * &o.re, im: BigRational::zero() };
        }
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }

    fn neg(&self) -> Self {
        GaussianRational { re: -&self.re, im: -&self.im }
    }

    fn inv(&self) -> ArithResult<Self> {
        if Field::is_zero(self) {
            return Err(ArithError::DivisionByZero);
        }
        let n = self.norm_sqr();
        Ok(GaussianRational { re: &self.re / &n, im: -&self.im / &n })
    }

    fn is_zero_checked(&self) -> ArithResult<bool> {
        Ok(Field::is_zero(self))
    }
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return write!(f, "{}", fmt_rat(&self.re));
        }
        let im_abs = self.im.abs();
        let im_part = if im_abs.is_one() { "i".to_string() } else { format!("{}*i", fmt_rat(&im_abs)) };
        if self.re.is_zero() {
            if self.im.is_negative() {
                write!(f, "-{im_part}")
            } else {
                write!(f, "{im_part}")
            }
        } else {
            let sign = if self.im.is_negative() { '-' } else { '+' };
            write!(f, "{}{sign}{im_part}", fmt_rat(&self.re))
        }
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    let s = s.trim();
    if s.is_empty() || s.contains(['.', 'e', 'E']) {
        return Err(bad());
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Parse an imaginary part written as `i`, `-i`, `r*i`, `r/s*i`.
fn parse_imag(s: &str) -> Result<BigRational, Error> {
    let body = s.trim().strip_suffix('i').ok_or_else(|| Error::Parse(format!("bad imaginary part {s:?}")))?;
    let body = body.trim_end().strip_suffix('*').unwrap_or(body).trim();
    match body {
        "" | "+" => Ok(BigRational::one()),
        "-" => Ok(-BigRational::one()),
        b => {
            let b = b.strip_prefix('+').unwrap_or(b);
            parse_rational(b)
        }
    }
}

impl FromStr for GaussianRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(Error::Parse("empty coefficient".into()));
        }
        if !t.ends_with('i') {
            return Ok(GaussianRational::from_rational(parse_rational(&t)?));
        }
        // Split at the last sign that is not leading and does not follow '/'.
        let bytes = t.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && bytes[k - 1] != b'/' && bytes[k - 1] != b'*');
        match split {
            Some(k) => Ok(GaussianRational { re: parse_rational(&t[..k])?, im: parse_imag(&t[k..])? }),
            None => Ok(GaussianRational { re: BigRational::zero(), im: parse_imag(&t)? }),
        }
    }
}

impl Serialize for GaussianRational {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GaussianRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
