//! Exact integer linear algebra over the character lattice.
//!
//! Everything here works with arbitrary-precision integers. Hermite and Smith
//! normal forms are computed with explicit unimodular transforms so that the
//! callers can build changes of monomial variables `z^I = u^{Φ(I)}`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An exponent vector `I ∈ M ≅ ℤ^r`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn new(coords: Vec<i64>) -> Self {
        LatticePoint(coords)
    }

    pub fn zero(rank: usize) -> Self {
        LatticePoint(vec![0; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        LatticePoint(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn dot(&self, other: &LatticePoint) -> i64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// Gcd of the coordinates (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &c| g.gcd(&c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    /// Divide by the content and flip so that the first nonzero entry is positive.
    pub fn canonical_primitive(&self) -> LatticePoint {
        let g = self.content();
        if g == 0 {
            return self.clone();
        }
        let mut v: Vec<i64> = self.0.iter().map(|c| c / g).collect();
        if let Some(first) = v.iter().find(|&&c| c != 0) {
            if *first < 0 {
                v.iter_mut().for_each(|c| *c = -*c);
            }
        }
        LatticePoint(v)
    }
}

impl fmt::Debug for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for LatticePoint {
    fn from(v: Vec<i64>) -> Self {
        LatticePoint(v)
    }
}

/// Dense row-major matrix of big integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl fmt::Debug for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_string()).collect())
            .collect();
        write!(f, "{rows:?}")
    }
}

impl std::ops::Index<(usize, usize)> for IntegerMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntegerMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl IntegerMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntegerMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix rows");
            for (j, x) in row.iter().enumerate() {
                m[(i, j)] = x.clone().into();
            }
        }
        m
    }

    pub fn from_points(points: &[LatticePoint], rank: usize) -> Self {
        let mut m = Self::zeros(points.len(), rank);
        for (i, p) in points.iter().enumerate() {
            for (j, &x) in p.coords().iter().enumerate() {
                m[(i, j)] = BigInt::from(x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Row `i` as a lattice point; panics if an entry does not fit in `i64`.
    pub fn row_point(&self, i: usize) -> LatticePoint {
        LatticePoint(self.row(i).iter().map(|x| x.to_i64().expect("entry overflows i64")).collect())
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntegerMatrix) -> IntegerMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Matrix-vector product with a lattice point (column vector).
    pub fn apply(&self, v: &LatticePoint) -> LatticePoint {
        assert_eq!(self.cols, v.rank());
        LatticePoint(
            (0..self.rows)
                .map(|i| {
                    let s: BigInt = (0..self.cols).map(|j| &self[(i, j)] * v.0[j]).sum();
                    s.to_i64().expect("image overflows i64")
                })
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] -= q * row[src]
    fn row_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let t = q * &self[(src, j)];
            self[(dst, j)] -= t;
        }
    }

    /// col[dst] -= q * col[src]
    fn col_sub(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let t = q * &self[(i, src)];
            self[(i, dst)] -= t;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }

    /// Determinant of a square matrix (fraction-free Bareiss elimination).
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !m[(i, k)].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                m.swap_rows(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)]) / &prev;
                    m[(i, j)] = v;
                }
            }
            prev = m[(k, k)].clone();
        }
        sign * &m[(n - 1, n - 1)]
    }

    /// Rank over ℚ.
    pub fn rank(&self) -> usize {
        let (h, _) = hermite_normal_form(self);
        (0..h.rows).filter(|&i| h.row(i).iter().any(|x| !x.is_zero())).count()
    }

    /// Inverse of a unimodular matrix, `None` if the matrix is not unimodular.
    pub fn unimodular_inverse(&self) -> Option<IntegerMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let (h, u) = hermite_normal_form(self);
        if h == IntegerMatrix::identity(self.rows) {
            Some(u)
        } else {
            None
        }
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U` unimodular and
/// `U·A = H`. Pivots are positive, entries above a pivot lie in `[0, pivot)`,
/// and zero rows sit at the bottom.
pub fn hermite_normal_form(a: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix) {
    let mut h = a.clone();
    let mut u = IntegerMatrix::identity(a.rows);
    let mut pivot_row = 0;
    for col in 0..a.cols {
        if pivot_row == a.rows {
            break;
        }
        loop {
            // Smallest nonzero entry at or below the pivot row.
            let best = (pivot_row..a.rows)
                .filter(|&i| !h[(i, col)].is_zero())
                .min_by(|&x, &y| h[(x, col)].abs().cmp(&h[(y, col)].abs()));
            let Some(best) = best else { break };
            h.swap_rows(best, pivot_row);
            u.swap_rows(best, pivot_row);
            let mut done = true;
            for i in pivot_row + 1..a.rows {
                if h[(i, col)].is_zero() {
                    continue;
                }
                let q = h[(i, col)].div_floor(&h[(pivot_row, col)]);
                h.row_sub(i, pivot_row, &q);
                u.row_sub(i, pivot_row, &q);
                if !h[(i, col)].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
            u.negate_row(pivot_row);
        }
        for i in 0..pivot_row {
            let q = h[(i, col)].div_floor(&h[(pivot_row, col)]);
            h.row_sub(i, pivot_row, &q);
            u.row_sub(i, pivot_row, &q);
        }
        pivot_row += 1;
    }
    (h, u)
}

/// Smith normal form: returns `(U, D, V)` with `U·A·V = D`, `U` and `V`
/// unimodular, `D` diagonal with nonnegative entries `d₁ | d₂ | …`.
pub fn smith_normal_form(a: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix, IntegerMatrix) {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntegerMatrix::identity(m);
    let mut v = IntegerMatrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else {
                // Remaining block is zero.
                return finish_snf(u, d, v);
            };
            d.swap_rows(t, bi);
            u.swap_rows(t, bi);
            d.swap_cols(t, bj);
            v.swap_cols(t, bj);
            let mut clean = true;
            for i in t + 1..m {
                let q = d[(i, t)].div_floor(&d[(t, t)]);
                d.row_sub(i, t, &q);
                u.row_sub(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = d[(t, j)].div_floor(&d[(t, t)]);
                d.col_sub(j, t, &q);
                v.col_sub(j, t, &q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: fold a violating row into row t.
            let pivot = d[(t, t)].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(&d[(i, j)] % &pivot).is_zero()));
            match bad {
                Some(i) => {
                    let minus_one = -BigInt::one();
                    d.row_sub(t, i, &minus_one);
                    u.row_sub(t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    finish_snf(u, d, v)
}

fn finish_snf(
    mut u: IntegerMatrix,
    mut d: IntegerMatrix,
    v: IntegerMatrix,
) -> (IntegerMatrix, IntegerMatrix, IntegerMatrix) {
    for t in 0..d.rows.min(d.cols) {
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    (u, d, v)
}

/// Diagonal of a Smith form as a vector.
pub fn elementary_divisors(a: &IntegerMatrix) -> Vec<BigInt> {
    let (_, d, _) = smith_normal_form(a);
    (0..d.rows.min(d.cols)).map(|i| d[(i, i)].clone()).collect()
}

/// Canonical basis (HNF rows) of the saturation of the lattice spanned by
/// `generators` inside `ℤ^rank`.
pub fn saturate(generators: &[LatticePoint], rank: usize) -> Vec<LatticePoint> {
    if generators.is_empty() || generators.iter().all(LatticePoint::is_zero) {
        return Vec::new();
    }
    let a = IntegerMatrix::from_points(generators, rank);
    let (_, d, v) = smith_normal_form(&a);
    let k = (0..d.rows.min(d.cols)).filter(|&i| !d[(i, i)].is_zero()).count();
    let v_inv = v.unimodular_inverse().expect("smith transform is unimodular");
    let mut rows = IntegerMatrix::zeros(k, rank);
    for i in 0..k {
        for j in 0..rank {
            rows[(i, j)] = v_inv[(i, j)].clone();
        }
    }
    let (h, _) = hermite_normal_form(&rows);
    (0..k).map(|i| h.row_point(i)).collect()
}

/// True when the points are independent and span a saturated sublattice.
pub fn is_saturated_basis(basis: &[LatticePoint], rank: usize) -> bool {
    if basis.is_empty() {
        return true;
    }
    let divisors = elementary_divisors(&IntegerMatrix::from_points(basis, rank));
    divisors.len() == basis.len() && divisors.iter().all(One::is_one)
}

/// A unimodular change of coordinates `Φ` adapted to a saturated sublattice:
/// `forward` maps the `i`-th sublattice basis vector to `e_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSplitting {
    pub forward: IntegerMatrix,
    pub inverse: IntegerMatrix,
    pub sub_rank: usize,
}

impl LatticeSplitting {
    pub fn identity(rank: usize) -> Self {
        LatticeSplitting {
            forward: IntegerMatrix::identity(rank),
            inverse: IntegerMatrix::identity(rank),
            sub_rank: rank,
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.forward.rows()
    }

    pub fn map(&self, p: &LatticePoint) -> LatticePoint {
        self.forward.apply(p)
    }

    pub fn unmap(&self, p: &LatticePoint) -> LatticePoint {
        self.inverse.apply(p)
    }

    /// Negate the last coordinate of the target.
    pub(crate) fn flip_last(&mut self) {
        let r = self.forward.rows();
        self.forward.negate_row(r - 1);
        self.inverse.negate_col(r - 1);
    }
}

/// Build `Φ` whose first `k` coordinates span the sublattice with basis `sub_basis`.
pub fn splitting_along(sub_basis: &[LatticePoint], ambient_rank: usize) -> Result<LatticeSplitting> {
    let k = sub_basis.len();
    if k > ambient_rank || sub_basis.iter().any(|p| p.rank() != ambient_rank) {
        return Err(Error::InvalidInput(format!(
            "sub-basis of size {k} does not live in rank {ambient_rank}"
        )));
    }
    if k == 0 {
        let mut s = LatticeSplitting::identity(ambient_rank);
        s.sub_rank = 0;
        return Ok(s);
    }
    if !is_saturated_basis(sub_basis, ambient_rank) {
        return Err(Error::NotSaturated(format!("{sub_basis:?}")));
    }
    let bt = IntegerMatrix::from_points(sub_basis, ambient_rank).transpose();
    let (_, u) = hermite_normal_form(&bt);
    let inverse = u.unimodular_inverse().expect("hnf transform is unimodular");
    Ok(LatticeSplitting { forward: u, inverse, sub_rank: k })
}

/// Basis of the kernel lattice `{v : ⟨normal, v⟩ = 0}` for a primitive normal.
pub fn orthogonal_lattice(normal: &LatticePoint) -> Vec<LatticePoint> {
    let r = normal.rank();
    let col = IntegerMatrix::from_points(std::slice::from_ref(normal), r).transpose();
    let (_, u) = hermite_normal_form(&col);
    (1..r).map(|i| u.row_point(i)).collect()
}

/// Generalized cross product: a vector orthogonal to the `k-1` rows given in `ℤ^k`
/// (entries are the signed maximal minors). Zero iff the rows are dependent.
pub fn orthogonal_complement_vector(rows: &[LatticePoint], k: usize) -> LatticePoint {
    assert_eq!(rows.len() + 1, k);
    let mut out = Vec::with_capacity(k);
    for skip in 0..k {
        let minor: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.coords().iter().enumerate().filter(|&(j, _)| j != skip).map(|(_, &x)| x).collect())
            .collect();
        let det = if minor.is_empty() {
            BigInt::one()
        } else {
            IntegerMatrix::from_rows(&minor).determinant()
        };
        let det = det.to_i64().expect("minor overflows i64");
        out.push(if skip % 2 == 0 { det } else { -det });
    }
    LatticePoint(out)
}


impl std::ops::Index<usize> for LatticePoint {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}
