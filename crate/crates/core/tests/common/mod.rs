//! Shared generators, independent oracles and property checks for the
//! integration suites.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torhyp::config::{build_configuration, enumerate_hyperplanes};
use torhyp::deformation::multiplicative_rank;
use torhyp::field::{Field, GaussianRational as G};
use torhyp::hyperbolicity::{bounded_subtorus_oracle, check_membership_y, check_membership_yprime};
use torhyp::laurent::{CoefficientVector, LaurentPolynomial};
use torhyp::lattice::LatticePoint;
use torhyp::polytope::{polytope_from_divisor, standard};
use torhyp::solver::{solve_system, VariableDomain};

pub type CaseResult = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pt(v: &[i64]) -> LatticePoint {
    LatticePoint(v.to_vec())
}

/// Gaussian rational with numerators and denominators in `[-bound, bound]`.
pub fn gaussian(r: &mut impl Rng, bound: i64) -> G {
    let re = BigRational::new(r.gen_range(-bound..=bound).into(), r.gen_range(1..=bound).into());
    let im = BigRational::new(r.gen_range(-bound..=bound).into(), r.gen_range(1..=bound).into());
    G::new(re, if r.gen_bool(0.5) { im } else { BigRational::zero() })
}

pub fn nonzero_gaussian(r: &mut impl Rng, bound: i64) -> G {
    loop {
        let g = gaussian(r, bound);
        if !g.is_zero() {
            return g;
        }
    }
}

pub fn small_int(r: &mut impl Rng, bound: i64) -> G {
    let v = r.gen_range(1..=bound) * if r.gen_bool(0.5) { 1 } else { -1 };
    G::from_i64(v)
}

pub fn simplex_points(r: usize, d: i64) -> Vec<LatticePoint> {
    polytope_from_divisor(&standard::projective_space(r, d)).expect("simplex").lattice_points()
}

/// Conic labels: a3 (0,0), b2 (1,0), a1 (2,0), b1 (0,1), b3 (1,1), a2 (0,2).
pub fn conic(a: [&G; 3], b: [&G; 3]) -> CoefficientVector<G> {
    CoefficientVector::from_pairs(
        2,
        &(),
        [
            (pt(&[0, 0]), a[2].clone()),
            (pt(&[1, 0]), b[1].clone()),
            (pt(&[2, 0]), a[0].clone()),
            (pt(&[0, 1]), b[0].clone()),
            (pt(&[1, 1]), b[2].clone()),
            (pt(&[0, 2]), a[1].clone()),
        ],
    )
    .expect("distinct points")
}

/// The six explicit conditions describing the bad locus of conics.
pub fn conic_in_y_explicit(a: [&G; 3], b: [&G; 3]) -> bool {
    let [a1, a2, a3] = a;
    let [b1, b2, b3] = b;
    let bbb = b1.mul(b2).mul(b3);
    let t1 = a1.mul(&b1.mul(b1));
    let t2 = a2.mul(&b2.mul(b2));
    let t3 = a3.mul(&b3.mul(b3));
    a1.is_zero()
        || a2.is_zero()
        || a3.is_zero()
        || t1.add(&t2) == bbb
        || t2.add(&t3) == bbb
        || t3.add(&t1) == bbb
}

/// A random conic, biased towards the bad locus: a third generic, a third
/// with a vanishing square coefficient, a third on one of the three
/// quadrics.
pub fn random_conic(r: &mut impl Rng) -> ([G; 3], [G; 3]) {
    let mut a = [nonzero_gaussian(r, 20), nonzero_gaussian(r, 20), nonzero_gaussian(r, 20)];
    let b = [nonzero_gaussian(r, 20), nonzero_gaussian(r, 20), nonzero_gaussian(r, 20)];
    match r.gen_range(0..3) {
        0 => {}
        1 => a[r.gen_range(0..3)] = G::from_i64(0),
        _ => {
            // solve a_k b_k² + a_{k+1} b_{k+1}² = b1 b2 b3 for a_{k+1}
            let k = r.gen_range(0..3);
            let k1 = (k + 1) % 3;
            let bbb = b[0].mul(&b[1]).mul(&b[2]);
            let rest = bbb.sub(&a[k].mul(&b[k].mul(&b[k])));
            a[k1] = rest.div(&b[k1].mul(&b[k1])).expect("nonzero b");
        }
    }
    (a, b)
}

// ---------------------------------------------------------------------------
// Numeric oracle for bivariate torus systems
// ---------------------------------------------------------------------------

struct NumPoly {
    terms: Vec<(f64, f64, Complex64)>,
}

impl NumPoly {
    fn from(p: &LaurentPolynomial<G>) -> Self {
        let scale = p.terms().values().map(|c| c.to_complex().norm()).fold(0.0, f64::max);
        NumPoly {
            terms: p
                .terms()
                .iter()
                .map(|(e, c)| (e.coords()[0] as f64, e.coords()[1] as f64, c.to_complex() / scale))
                .collect(),
        }
    }

    /// Value, gradient and total term magnitude in logarithmic coordinates
    /// `x = e^{s₁}, y = e^{s₂}`.
    fn eval(&self, s: [Complex64; 2]) -> (Complex64, [Complex64; 2], f64) {
        let mut v = Complex64::zero();
        let mut g = [Complex64::zero(); 2];
        let mut w = 0.0;
        for &(a, b, c) in &self.terms {
            let m = c * (s[0] * a + s[1] * b).exp();
            v += m;
            g[0] += m * a;
            g[1] += m * b;
            w += m.norm();
        }
        (v, g, w)
    }
}

/// Damped Gauss-Newton from a grid of starts in logarithmic coordinates.
pub fn numeric_has_torus_solution(system: &[LaurentPolynomial<G>]) -> bool {
    let polys: Vec<NumPoly> = system.iter().filter(|p| !p.is_zero()).map(NumPoly::from).collect();
    if polys.is_empty() {
        return true;
    }
    let res = [-1.5, -0.75, 0.0, 0.75, 1.5];
    let ims: Vec<f64> = (0..8).map(|k| k as f64 * std::f64::consts::FRAC_PI_4).collect();
    for &r1 in &res {
        for &i1 in ims.iter() {
            for &r2 in &res {
                for &i2 in ims.iter() {
                    if newton(&polys, [Complex64::new(r1, i1), Complex64::new(r2, i2)]) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

fn newton(polys: &[NumPoly], mut s: [Complex64; 2]) -> bool {
    let mut mu = 1e-3;
    // residuals relative to the term magnitudes at the current iterate, so
    // cancellation error stays bounded
    let weighted = |t: [Complex64; 2], w: &[f64]| polys.iter().zip(w).map(|(p, w)| (p.eval(t).0 / w).norm_sqr()).sum::<f64>();
    let converged = |s: [Complex64; 2]| {
        let w: Vec<f64> = polys.iter().map(|p| p.eval(s).2).collect();
        weighted(s, &w) < 1e-24 && s.iter().all(|z| z.re.abs() < 25.0)
    };
    for _ in 0..120 {
        let evals: Vec<_> = polys.iter().map(|p| p.eval(s)).collect();
        let w: Vec<f64> = evals.iter().map(|e| e.2).collect();
        let f = weighted(s, &w);
        if f < 1e-24 {
            return s.iter().all(|z| z.re.abs() < 25.0);
        }
        // normal equations (JᴴJ + μI) δ = −JᴴF
        let mut a = [[Complex64::zero(); 2]; 2];
        let mut rhs = [Complex64::zero(); 2];
        for (v, g, w) in &evals {
            let (v, g) = (v / w, [g[0] / w, g[1] / w]);
            for i in 0..2 {
                rhs[i] -= g[i].conj() * v;
                for j in 0..2 {
                    a[i][j] += g[i].conj() * g[j];
                }
            }
        }
        let step = |mu: f64| {
            let a00 = a[0][0] + mu;
            let a11 = a[1][1] + mu;
            let det = a00 * a11 - a[0][1] * a[1][0];
            if det.norm() < 1e-300 {
                return None;
            }
            Some([(rhs[0] * a11 - a[0][1] * rhs[1]) / det, (a00 * rhs[1] - a[1][0] * rhs[0]) / det])
        };
        let mut improved = false;
        for _ in 0..12 {
            let Some(d) = step(mu) else { break };
            let t = [s[0] + d[0], s[1] + d[1]];
            if t.iter().any(|z| !z.re.is_finite() || z.re.abs() > 40.0) {
                mu *= 10.0;
                continue;
            }
            if weighted(t, &w) < f {
                s = t;
                mu = (mu / 10.0).max(1e-15);
                improved = true;
                break;
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    converged(s)
}

/// Random bivariate Laurent system, optionally with a planted torus zero.
pub fn random_bivariate_system(r: &mut impl Rng) -> Vec<LaurentPolynomial<G>> {
    let n = *[1usize, 2, 2, 3, 3].choose(r).expect("nonempty");
    let planted = r.gen_bool(0.4);
    let point = [
        [G::from_i64(1), G::from_i64(-1), G::from_i64(2), G::from_ratio(1, 2), G::i(), G::from_ratio(-2, 3)]
            .choose(r)
            .expect("nonempty")
            .clone(),
        [G::from_i64(1), G::from_i64(-2), G::from_ratio(1, 3), G::i().neg(), G::from_i64(3)]
            .choose(r)
            .expect("nonempty")
            .clone(),
    ];
    (0..n)
        .map(|_| {
            let k = r.gen_range(2..=4);
            let mut terms: Vec<(LatticePoint, G)> = Vec::new();
            while terms.len() < k {
                let e = pt(&[r.gen_range(-3..=3), r.gen_range(-3..=3)]);
                if terms.iter().all(|(f, _)| *f != e) {
                    terms.push((e, small_int(r, 5)));
                }
            }
            let mut p = LaurentPolynomial::from_terms(2, &(), terms.clone());
            if planted {
                let v = p.eval(&point).expect("torus point");
                let (e0, c0) = &terms[0];
                let m0 = LaurentPolynomial::monomial(&(), e0.clone(), G::from_i64(1)).eval(&point).expect("torus point");
                let fix = c0.sub(&v.div(&m0).expect("nonzero monomial"));
                p = LaurentPolynomial::from_terms(
                    2,
                    &(),
                    std::iter::once((e0.clone(), fix)).chain(terms[1..].iter().cloned()),
                );
            }
            p
        })
        .collect()
}

pub fn solver_vs_numeric_case(seed: u64) -> CaseResult {
    let mut r = rng(seed);
    let system = random_bivariate_system(&mut r);
    let dom = VariableDomain::torus(2);
    let exact = solve_system(&system, &dom).map_err(|e| format!("seed {seed}: {e}"))?;
    if !exact.verify(&system, &dom) {
        return Err(format!("seed {seed}: witness does not annihilate the system"));
    }
    let numeric = numeric_has_torus_solution(&system);
    if exact.exists() != numeric {
        let shown: Vec<String> = system.iter().map(|p| p.to_string()).collect();
        return Err(format!("seed {seed}: exact {} vs numeric {numeric} on {shown:?}", exact.verdict));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Combinatorial and membership properties
// ---------------------------------------------------------------------------

fn random_points(r: &mut impl Rng, n: usize, hi: i64) -> Vec<LatticePoint> {
    let mut pts: Vec<LatticePoint> = Vec::new();
    while pts.len() < n {
        let p = pt(&[r.gen_range(0..=hi), r.gen_range(0..=hi)]);
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

/// Adding a point to a configuration with `l_H ≥ r+1` everywhere keeps it so.
/// Returns `Ok(false)` when the sampled configuration misses the hypothesis.
pub fn monotonicity_case(seed: u64) -> Result<bool, String> {
    let mut r = rng(seed);
    let n = r.gen_range(4..=9);
    let s = random_points(&mut r, n, 6);
    let cfg = build_configuration(&s, 2).map_err(|e| e.to_string())?;
    if cfg.span_dim() != 2 {
        return Ok(false);
    }
    let hs = enumerate_hyperplanes(&cfg).map_err(|e| e.to_string())?;
    if hs.iter().any(|h| h.fiber_count() < 3) {
        return Ok(false);
    }
    let extra = loop {
        let p = pt(&[r.gen_range(0..=6), r.gen_range(0..=6)]);
        if !s.contains(&p) {
            break p;
        }
    };
    let mut s2 = s.clone();
    s2.push(extra.clone());
    let cfg2 = build_configuration(&s2, 2).map_err(|e| e.to_string())?;
    for h in enumerate_hyperplanes(&cfg2).map_err(|e| e.to_string())? {
        if h.fiber_count() < 3 {
            return Err(format!("seed {seed}: adding {extra} to {s:?} gives l_H = {} along {}", h.fiber_count(), h.normal));
        }
    }
    Ok(true)
}

/// Random coefficients on a random spanning subset of the cubic triangle,
/// with some entries set to zero.
pub fn random_sparse_cubic(r: &mut impl Rng) -> CoefficientVector<G> {
    let all = simplex_points(2, 3);
    loop {
        let mut pts = all.clone();
        pts.shuffle(r);
        pts.truncate(r.gen_range(3..=8));
        let cfg = build_configuration(&pts, 2).expect("points");
        if cfg.span_dim() != 2 {
            continue;
        }
        let zeros = r.gen_range(0..=2);
        let entries: Vec<(LatticePoint, G)> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), if i < zeros { G::from_i64(0) } else { small_int(r, 4) }))
            .collect();
        let a = CoefficientVector::from_pairs(2, &(), entries).expect("distinct points");
        if !a.is_all_zero() {
            return a;
        }
    }
}

pub fn zero_padding_case(seed: u64) -> CaseResult {
    let mut r = rng(seed);
    let a = random_sparse_cubic(&mut r);
    let padded = a.zero_extend(&simplex_points(2, 3));
    let v1 = check_membership_y(&a).map_err(|e| e.to_string())?.is_in();
    let v2 = check_membership_y(&padded).map_err(|e| e.to_string())?.is_in();
    if v1 != v2 {
        return Err(format!("seed {seed}: Y_S gives {v1}, padded gives {v2} for {:?}", a.entries()));
    }
    Ok(())
}

fn within(normal: &LatticePoint, bound: i64) -> bool {
    normal.coords().iter().all(|c| c.abs() <= bound)
}

pub fn oracle_case(seed: u64) -> CaseResult {
    let mut r = rng(seed);
    let a = loop {
        let n = r.gen_range(3..=6);
        let pts = random_points(&mut r, n, 3);
        let cfg = build_configuration(&pts, 2).expect("points");
        if cfg.span_dim() != 2 {
            continue;
        }
        let zeros = r.gen_range(0..=1);
        let entries: Vec<(LatticePoint, G)> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), if i < zeros { G::from_i64(0) } else { small_int(&mut r, 3) }))
            .collect();
        break CoefficientVector::from_pairs(2, &(), entries).expect("distinct points");
    };
    let structured = check_membership_y(&a).map_err(|e| e.to_string())?;
    let oracle = bounded_subtorus_oracle(&a, 8).map_err(|e| e.to_string())?;
    if oracle.is_in() && !structured.is_in() {
        return Err(format!("seed {seed}: oracle IN, structured OUT for {:?}", a.entries()));
    }
    let comparable = structured.witnesses.first().map_or(true, |w| within(&w.normal, 8));
    if comparable && structured.is_in() != oracle.is_in() {
        return Err(format!("seed {seed}: structured {:?} vs oracle {:?}", structured.verdict, oracle.verdict));
    }
    Ok(())
}

pub fn similarity_case(seed: u64) -> CaseResult {
    let mut r = rng(seed);
    let a = if r.gen_bool(0.5) {
        let (x, y) = random_conic(&mut r);
        conic([&x[0], &x[1], &x[2]], [&y[0], &y[1], &y[2]])
    } else {
        random_sparse_cubic(&mut r)
    };
    let lambda = [nonzero_gaussian(&mut r, 5), nonzero_gaussian(&mut r, 5)];
    let b = a.rescale_torus(&lambda).map_err(|e| e.to_string())?;
    let y = |v: &CoefficientVector<G>| check_membership_y(v).map(|m| m.is_in()).map_err(|e| e.to_string());
    let yp = |v: &CoefficientVector<G>| check_membership_yprime(v).map(|m| m.is_in()).map_err(|e| e.to_string());
    if y(&a)? != y(&b)? || yp(&a)? != yp(&b)? {
        return Err(format!("seed {seed}: rescaling by {lambda:?} changes a verdict"));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Multiplicative rank by brute force
// ---------------------------------------------------------------------------

const PRIMES: [i64; 3] = [2, 3, 5];

fn rational_from_exponents(e: &[i64]) -> BigRational {
    let mut q = BigRational::one();
    for (p, &k) in PRIMES.iter().zip(e) {
        let base = BigRational::from_integer(BigInt::from(*p));
        let pw = num_traits::pow(base, k.unsigned_abs() as usize);
        q *= if k < 0 { pw.recip() } else { pw };
    }
    q
}

/// Random positive rationals generated by at most three random elements,
/// with every exponent in `[-3, 3]`.
pub fn random_lambda(r: &mut impl Rng) -> (Vec<G>, Vec<Vec<i64>>) {
    loop {
        let k = r.gen_range(0..=3);
        let gens: Vec<Vec<i64>> = (0..k).map(|_| (0..3).map(|_| r.gen_range(-1..=1)).collect()).collect();
        let n = r.gen_range(1..=4);
        let exps: Vec<Vec<i64>> = (0..n)
            .map(|_| {
                let c: Vec<i64> = (0..k).map(|_| r.gen_range(-1..=1)).collect();
                (0..3).map(|q| (0..k).map(|j| c[j] * gens[j][q]).sum()).collect()
            })
            .collect();
        if exps.iter().flatten().all(|x| x.abs() <= 3) {
            let lam = exps.iter().map(|e| G::from_rational(rational_from_exponents(e))).collect();
            return (lam, exps);
        }
    }
}

/// Is `v` an integer combination of `gens`? (`gens` has at most two rows.)
fn in_integer_span(v: &[i64], gens: &[Vec<i64>]) -> bool {
    match gens {
        [] => v.iter().all(|&x| x == 0),
        [g] => {
            let Some(i) = g.iter().position(|&x| x != 0) else { return v.iter().all(|&x| x == 0) };
            if v[i] % g[i] != 0 {
                return false;
            }
            let c = v[i] / g[i];
            v.iter().zip(g).all(|(a, b)| *a == c * b)
        }
        [g, h] => {
            // try every 2x2 minor for a unique rational solution
            for i in 0..3 {
                for j in i + 1..3 {
                    let det = g[i] * h[j] - g[j] * h[i];
                    if det == 0 {
                        continue;
                    }
                    let n1 = v[i] * h[j] - v[j] * h[i];
                    let n2 = g[i] * v[j] - g[j] * v[i];
                    if n1 % det != 0 || n2 % det != 0 {
                        return false;
                    }
                    let (c1, c2) = (n1 / det, n2 / det);
                    return (0..3).all(|q| v[q] == c1 * g[q] + c2 * h[q]);
                }
            }
            // dependent generators
            in_integer_span(v, &gens[..1]) || in_integer_span(v, &gens[1..])
        }
        _ => unreachable!("at most two generators"),
    }
}

/// Smallest number of generators found by brute force over a pool of
/// candidate exponent vectors: tries every set of size 0, 1, 2; `3` if none
/// works (exponent vectors live in a rank-3 lattice).
pub fn brute_force_generator_count(exps: &[Vec<i64>]) -> usize {
    let mut pool: Vec<Vec<i64>> = exps.to_vec();
    for a in exps {
        for b in exps {
            pool.push(a.iter().zip(b).map(|(x, y)| x - y).collect());
        }
    }
    for a in -3..=3 {
        for b in -3..=3 {
            for c in -3..=3 {
                if (a, b, c) != (0, 0, 0) {
                    pool.push(vec![a, b, c]);
                }
            }
        }
    }
    pool.retain(|v| v.iter().any(|&x| x != 0));
    pool.sort();
    pool.dedup();
    let ok = |gens: &[Vec<i64>]| exps.iter().all(|e| in_integer_span(e, gens));
    if ok(&[]) {
        return 0;
    }
    if pool.iter().any(|g| ok(std::slice::from_ref(g))) {
        return 1;
    }
    for i in 0..pool.len() {
        for j in i + 1..pool.len() {
            if ok(&[pool[i].clone(), pool[j].clone()]) {
                return 2;
            }
        }
    }
    3
}

pub fn multrank_case(seed: u64) -> CaseResult {
    let mut r = rng(seed);
    let (lam, exps) = random_lambda(&mut r);
    let profile = multiplicative_rank(&lam).map_err(|e| e.to_string())?;
    let brute = brute_force_generator_count(&exps);
    if profile.rank != brute {
        return Err(format!("seed {seed}: rank {} vs brute force {brute} for {exps:?}", profile.rank));
    }
    if profile.reconstruct() != profile.lambda {
        return Err(format!("seed {seed}: exponent matrix does not reconstruct λ"));
    }
    Ok(())
}
