//! Coprimality certificates by reduction modulo primes `p ≡ 1 (mod 4)`,
//! where `i` maps to a square root of `−1`.
//!
//! If `p` misses every denominator and both leading coefficients, and the
//! images are coprime in `F_p[x]`, the inputs are coprime over `ℚ(i)`: by
//! Gauss's lemma a common factor would survive the reduction.

use std::sync::OnceLock;

use crate::field::Field;
use crate::upoly::UPoly;

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, p);
        }
        b = mul_mod(b, b, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for 32-bit inputs.
fn is_prime(n: u64) -> bool {
    if n < 2 || n.is_multiple_of(2) {
        return n == 2;
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7] {
        if a % n == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primes `p ≡ 1 (mod 4)` below `2³¹`, each with a square root of `−1`.
pub(crate) fn primes() -> &'static [(u64, u64)] {
    static PRIMES: OnceLock<Vec<(u64, u64)>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut out = Vec::new();
        let mut n = (1u64 << 31) - 1;
        while out.len() < 3 {
            if n % 4 == 1 && is_prime(n) {
                let iota = (2..)
                    .map(|a| pow_mod(a, (n - 1) / 4, n))
                    .find(|t| mul_mod(*t, *t, n) == n - 1)
                    .expect("a quadratic non-residue exists");
                out.push((n, iota));
            }
            n -= 1;
        }
        out
    })
}

fn image<F: Field>(a: &UPoly<F>, p: u64, iota: u64) -> Option<Vec<u64>> {
    let mut v: Vec<u64> = a.coeffs().iter().map(|c| c.mod_image(p, iota)).collect::<Option<_>>()?;
    // the leading coefficient must survive
    if v.last().is_none_or(|c| *c == 0) {
        return None;
    }
    while v.last() == Some(&0) {
        v.pop();
    }
    Some(v)
}

fn rem_mod(a: &mut Vec<u64>, b: &[u64], p: u64) {
    let db = b.len() - 1;
    let inv = pow_mod(b[db], p - 2, p);
    while a.len() > db {
        let c = mul_mod(*a.last().expect("nonempty"), inv, p);
        let off = a.len() - 1 - db;
        for (j, bj) in b.iter().enumerate() {
            a[off + j] = (a[off + j] + p - mul_mod(c, *bj, p)) % p;
        }
        a.pop();
        while a.last() == Some(&0) {
            a.pop();
        }
    }
}

fn gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> usize {
    while !b.is_empty() {
        rem_mod(&mut a, &b, p);
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// `true` only when `a` and `b` are certified coprime; `false` means unknown.
pub(crate) fn certified_coprime<F: Field>(a: &UPoly<F>, b: &UPoly<F>) -> bool {
    if a.is_zero() || b.is_zero() {
        return false;
    }
    if a.deg() == 0 || b.deg() == 0 {
        return true;
    }
    for &(p, iota) in primes() {
        let (Some(x), Some(y)) = (image(a, p, iota), image(b, p, iota)) else {
            continue;
        };
        if gcd_degree(x, y, p) == 0 {
            return true;
        }
    }
    false
}
