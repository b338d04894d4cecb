//! Divisor polytopes `P_D = ⋂ {u : ⟨m_ρ, u⟩ ≥ −a_ρ}` in rank 1..=3.
//!
//! Everything is brute force over small subsets of halfspaces, which is fine
//! at the sizes that show up for surfaces and threefolds.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{orthogonal_complement_vector, saturate, IntegerMatrix, LatticePoint};

pub const MAX_RANK: usize = 3;

/// Rays `m_ρ` and offsets `a_ρ` of a toric divisor `D = Σ a_ρ D_ρ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricDivisorData {
    pub rays: Vec<LatticePoint>,
    pub offsets: Vec<i64>,
}

/// `⟨normal, u⟩ ≥ −offset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Halfspace {
    pub normal: LatticePoint,
    pub offset: i64,
    pub redundant: bool,
}

impl Halfspace {
    fn slack(&self, u: &[BigRational]) -> BigRational {
        let dot: BigRational =
            self.normal.coords().iter().zip(u).map(|(&m, x)| x * BigRational::from_integer(m.into())).sum();
        dot + BigRational::from_integer(self.offset.into())
    }

    fn slack_int(&self, u: &LatticePoint) -> i64 {
        self.normal.dot(u) + self.offset
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Face {
    pub dim: usize,
    pub vertex_indices: Vec<usize>,
    pub active_halfspaces: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct LatticePolytope {
    rank: usize,
    halfspaces: Vec<Halfspace>,
    vertices: Vec<Vec<BigRational>>,
    faces: Vec<Face>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Unique solution of a square rational system, if any.
fn solve_square(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = a.len();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(p, c);
        b.swap(p, c);
        let inv = BigRational::from_integer(1.into()) / &a[c][c];
        for j in c..n {
            a[c][j] = &a[c][j] * &inv;
        }
        b[c] = &b[c] * &inv;
        for i in 0..n {
            if i == c || a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].clone();
            for j in c..n {
                let v = &a[c][j] * &f;
                a[i][j] -= v;
            }
            let v = &b[c] * &f;
            b[i] -= v;
        }
    }
    Some(b)
}

/// Rank over ℚ of a list of rational vectors.
pub(crate) fn rational_rank(rows: &[Vec<BigRational>]) -> usize {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(p, rank);
        for i in 0..m.len() {
            if i == rank || m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &m[rank][c];
            for j in c..cols {
                let v = &m[rank][j] * &f;
                m[i][j] -= v;
            }
        }
        rank += 1;
    }
    rank
}

/// Affine dimension of a point set (`None` when empty).
pub(crate) fn affine_dim(points: &[Vec<BigRational>]) -> Option<usize> {
    let first = points.first()?;
    let diffs: Vec<Vec<BigRational>> =
        points[1..].iter().map(|p| p.iter().zip(first).map(|(a, b)| a - b).collect()).collect();
    Some(rational_rank(&diffs))
}

pub(crate) fn affine_dim_points(points: &[LatticePoint]) -> Option<usize> {
    let v: Vec<Vec<BigRational>> = points.iter().map(|p| p.coords().iter().map(|&c| rat(c)).collect()).collect();
    affine_dim(&v)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    subsets(n, k)
}

/// Build `P_D` from toric data.
pub fn polytope_from_divisor(data: &ToricDivisorData) -> Result<LatticePolytope> {
    if data.rays.len() != data.offsets.len() {
        return Err(Error::InvalidInput(format!(
            "{} rays but {} offsets",
            data.rays.len(),
            data.offsets.len()
        )));
    }
    let r = data.rays.first().map(LatticePoint::rank).ok_or_else(|| Error::InvalidInput("no rays".into()))?;
    if r == 0 || r > MAX_RANK {
        return Err(Error::UnsupportedRank(r));
    }
    let mut seen = BTreeSet::new();
    for ray in &data.rays {
        if ray.rank() != r {
            return Err(Error::InvalidInput(format!("ray {ray} has the wrong length")));
        }
        if !ray.is_primitive() {
            return Err(Error::InvalidInput(format!("ray {ray} is not primitive")));
        }
        if !seen.insert(ray.clone()) {
            return Err(Error::InvalidInput(format!("ray {ray} is repeated")));
        }
    }
    let halfspaces = data
        .rays
        .iter()
        .zip(&data.offsets)
        .map(|(m, &a)| Halfspace { normal: m.clone(), offset: a, redundant: false })
        .collect();
    LatticePolytope::from_halfspaces(r, halfspaces)
}

impl LatticePolytope {
    fn from_halfspaces(r: usize, mut halfspaces: Vec<Halfspace>) -> Result<Self> {
        let normals: Vec<LatticePoint> = halfspaces.iter().map(|h| h.normal.clone()).collect();
        let rank_normals = IntegerMatrix::from_points(&normals, r).rank();

        // Vertices: feasible unique intersections of r tight halfspaces.
        let mut vertices: Vec<Vec<BigRational>> = Vec::new();
        if rank_normals == r {
            for sub in subsets(halfspaces.len(), r) {
                let a: Vec<Vec<BigRational>> =
                    sub.iter().map(|&i| halfspaces[i].normal.coords().iter().map(|&c| rat(c)).collect()).collect();
                let b: Vec<BigRational> = sub.iter().map(|&i| rat(-halfspaces[i].offset)).collect();
                let Some(u) = solve_square(a, b) else { continue };
                if halfspaces.iter().all(|h| !h.slack(&u).is_negative()) && !vertices.contains(&u) {
                    vertices.push(u);
                }
            }
        }
        if rank_normals < r {
            return Err(Error::UnboundedPolytope);
        }
        if vertices.is_empty() {
            return Err(Error::EmptyPolytope);
        }
        // Recession cone must be trivial.
        for sub in subsets(halfspaces.len(), r - 1) {
            let rows: Vec<LatticePoint> = sub.iter().map(|&i| halfspaces[i].normal.clone()).collect();
            let d = orthogonal_complement_vector(&rows, r);
            if d.is_zero() {
                continue;
            }
            for sign in [1i64, -1] {
                let dd = LatticePoint(d.coords().iter().map(|c| c * sign).collect());
                if halfspaces.iter().all(|h| h.normal.dot(&dd) >= 0) {
                    return Err(Error::UnboundedPolytope);
                }
            }
        }
        vertices.sort();
        let dim = affine_dim(&vertices).unwrap_or(0);
        if dim < r {
            return Err(Error::LowerDimensionalPolytope { dim, rank: r });
        }
        for h in halfspaces.iter_mut() {
            let tight: Vec<Vec<BigRational>> = vertices.iter().filter(|v| h.slack(v).is_zero()).cloned().collect();
            h.redundant = affine_dim(&tight).map_or(true, |d| d + 1 < r);
        }
        let mut p = LatticePolytope { rank: r, halfspaces, vertices, faces: Vec::new() };
        p.faces = p.compute_faces();
        Ok(p)
    }

    /// Convex hull of integral points, converted to halfspace form.
    pub fn from_vertices(points: &[LatticePoint]) -> Result<Self> {
        let r = points.first().map(LatticePoint::rank).ok_or_else(|| Error::InvalidInput("no vertices".into()))?;
        if r == 0 || r > MAX_RANK {
            return Err(Error::UnsupportedRank(r));
        }
        if points.iter().any(|p| p.rank() != r) {
            return Err(Error::InvalidInput("vertices of mixed length".into()));
        }
        let dim = affine_dim_points(points).unwrap_or(0);
        if dim < r {
            return Err(Error::LowerDimensionalPolytope { dim, rank: r });
        }
        let mut facets: Vec<Halfspace> = Vec::new();
        for sub in subsets(points.len(), r) {
            let base = &points[sub[0]];
            let diffs: Vec<LatticePoint> = sub[1..].iter().map(|&i| points[i].sub(base)).collect();
            let n = if r == 1 { LatticePoint(vec![1]) } else { orthogonal_complement_vector(&diffs, r) };
            if n.is_zero() {
                continue;
            }
            let n = n.canonical_primitive();
            let c = n.dot(base);
            let vals: Vec<i64> = points.iter().map(|p| n.dot(p) - c).collect();
            let normal = if vals.iter().all(|&v| v >= 0) {
                n
            } else if vals.iter().all(|&v| v <= 0) {
                LatticePoint(n.coords().iter().map(|x| -x).collect())
            } else {
                continue;
            };
            let offset = -normal.dot(base);
            if !facets.iter().any(|f| f.normal == normal) {
                facets.push(Halfspace { normal, offset, redundant: false });
            }
        }
        Self::from_halfspaces(r, facets)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.rank
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn facet_halfspaces(&self) -> Vec<&Halfspace> {
        self.halfspaces.iter().filter(|h| !h.redundant).collect()
    }

    pub fn vertices(&self) -> &[Vec<BigRational>] {
        &self.vertices
    }

    pub fn is_integral(&self) -> bool {
        self.vertices.iter().all(|v| v.iter().all(BigRational::is_integer))
    }

    /// First non-integral vertex, formatted, if any.
    pub fn non_integral_vertex(&self) -> Option<String> {
        self.vertices.iter().find(|v| !v.iter().all(BigRational::is_integer)).map(|v| format_rational_point(v))
    }

    pub fn require_integral(&self) -> Result<()> {
        match self.non_integral_vertex() {
            Some(v) => Err(Error::NonIntegralPolytope(v)),
            None => Ok(()),
        }
    }

    /// Integral vertices as lattice points (panics on a rational vertex).
    pub fn vertex_points(&self) -> Vec<LatticePoint> {
        self.vertices
            .iter()
            .map(|v| LatticePoint(v.iter().map(|c| c.to_integer().to_i64().expect("integral vertex")).collect()))
            .collect()
    }

    pub fn contains(&self, u: &LatticePoint) -> bool {
        u.rank() == self.rank && self.halfspaces.iter().all(|h| h.slack_int(u) >= 0)
    }

    fn compute_faces(&self) -> Vec<Face> {
        let all: BTreeSet<usize> = (0..self.vertices.len()).collect();
        let mut sets: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
        for h in self.halfspaces.iter().filter(|h| !h.redundant) {
            let s: BTreeSet<usize> = (0..self.vertices.len()).filter(|&i| h.slack(&self.vertices[i]).is_zero()).collect();
            sets.insert(s);
        }
        loop {
            let current: Vec<BTreeSet<usize>> = sets.iter().cloned().collect();
            let mut grew = false;
            for i in 0..current.len() {
                for j in i + 1..current.len() {
                    let s: BTreeSet<usize> = current[i].intersection(&current[j]).cloned().collect();
                    if !s.is_empty() && sets.insert(s) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        sets.insert(all);
        let mut faces: Vec<Face> = sets
            .into_iter()
            .map(|s| {
                let vertex_indices: Vec<usize> = s.into_iter().collect();
                let pts: Vec<Vec<BigRational>> = vertex_indices.iter().map(|&i| self.vertices[i].clone()).collect();
                let active_halfspaces = (0..self.halfspaces.len())
                    .filter(|&k| pts.iter().all(|v| self.halfspaces[k].slack(v).is_zero()))
                    .collect();
                Face { dim: affine_dim(&pts).unwrap_or(0), vertex_indices, active_halfspaces }
            })
            .collect();
        faces.sort_by(|a, b| (a.dim, &a.vertex_indices).cmp(&(b.dim, &b.vertex_indices)));
        faces
    }

    /// The full face lattice minus the empty face, sorted by dimension.
    pub fn enumerate_faces(&self) -> &[Face] {
        &self.faces
    }

    /// The face equal to `P` itself.
    pub fn top_face(&self) -> &Face {
        self.faces.last().expect("nonempty face list")
    }

    /// Integral points of `P`, lexicographic.
    pub fn lattice_points(&self) -> Vec<LatticePoint> {
        let r = self.rank;
        let lo: Vec<i64> =
            (0..r).map(|j| self.vertices.iter().map(|v| v[j].floor().to_integer()).min().unwrap().to_i64().unwrap()).collect();
        let hi: Vec<i64> =
            (0..r).map(|j| self.vertices.iter().map(|v| v[j].ceil().to_integer()).max().unwrap().to_i64().unwrap()).collect();
        let mut out = Vec::new();
        let mut cur = lo.clone();
        loop {
            let p = LatticePoint(cur.clone());
            if self.contains(&p) {
                out.push(p);
            }
            // odometer, last coordinate fastest
            let mut k = r;
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    for j in k + 1..r {
                        cur[j] = lo[j];
                    }
                    break;
                }
            }
        }
    }

    pub fn on_face(&self, face: &Face, u: &LatticePoint) -> bool {
        self.contains(u) && face.active_halfspaces.iter().all(|&k| self.halfspaces[k].slack_int(u) == 0)
    }

    pub fn face_lattice_points(&self, face: &Face) -> Vec<LatticePoint> {
        self.lattice_points().into_iter().filter(|u| self.on_face(face, u)).collect()
    }

    /// Saturated basis of the direction lattice of an integral face.
    pub fn face_direction_basis(&self, face: &Face) -> Vec<LatticePoint> {
        let verts = self.vertex_points();
        let base = &verts[face.vertex_indices[0]];
        let diffs: Vec<LatticePoint> = face.vertex_indices[1..].iter().map(|&i| verts[i].sub(base)).collect();
        saturate(&diffs, self.rank)
    }

    /// Lattice point of `face` used as the origin of face-local coordinates.
    pub fn face_origin(&self, face: &Face) -> LatticePoint {
        self.vertex_points()[face.vertex_indices[0]].clone()
    }

    /// Short description such as `edge (0,2)-(2,2)`.
    pub fn describe_face(&self, face: &Face) -> String {
        let kind = match (face.dim, self.rank) {
            (d, r) if d == r => "polytope",
            (0, _) => "vertex",
            (1, _) => "edge",
            (2, _) => "facet",
            _ => "face",
        };
        let verts: Vec<String> = face.vertex_indices.iter().map(|&i| format_rational_point(&self.vertices[i])).collect();
        format!("{kind} {}", verts.join("-"))
    }

    /// Outward-facing normal labels are left to callers; this returns the
    /// non-redundant halfspaces that contain `face`.
    pub fn face_facets(&self, face: &Face) -> Vec<&Halfspace> {
        face.active_halfspaces.iter().map(|&k| &self.halfspaces[k]).filter(|h| !h.redundant).collect()
    }
}

pub fn format_rational_point(v: &[BigRational]) -> String {
    let parts: Vec<String> = v
        .iter()
        .map(|c| if c.is_integer() { c.numer().to_string() } else { format!("{}/{}", c.numer(), c.denom()) })
        .collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "face(dim {}, vertices {:?})", self.dim, self.vertex_indices)
    }
}

/// Standard examples used across tests, the casebook and benches.
pub mod standard {
    use super::*;

    /// `d·H` on ℙ^r: the simplex `u ≥ 0, Σu ≤ d`.
    pub fn projective_space(r: usize, d: i64) -> ToricDivisorData {
        let mut rays: Vec<LatticePoint> = (0..r)
            .map(|i| {
                let mut v = vec![0; r];
                v[i] = 1;
                LatticePoint(v)
            })
            .collect();
        rays.push(LatticePoint(vec![-1; r]));
        let mut offsets = vec![0; r];
        offsets.push(d);
        ToricDivisorData { rays, offsets }
    }

    /// Hirzebruch surface `ℍ_l` with `x ≥ 0, y ≥ 0, y ≤ b, x + l·y ≤ a`.
    pub fn hirzebruch(l: i64, a: i64, b: i64) -> ToricDivisorData {
        ToricDivisorData {
            rays: vec![
                LatticePoint(vec![1, 0]),
                LatticePoint(vec![0, 1]),
                LatticePoint(vec![0, -1]),
                LatticePoint(vec![-1, -l]),
            ],
            offsets: vec![0, 0, b, a],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::standard::*;
    use super::*;

    fn verts(p: &LatticePolytope) -> Vec<String> {
        p.vertices().iter().map(|v| format_rational_point(v)).collect()
    }

    #[test]
    fn p2_triangle() {
        let p = polytope_from_divisor(&projective_space(2, 2)).unwrap();
        assert_eq!(verts(&p), vec!["(0,0)", "(0,2)", "(2,0)"]);
        assert_eq!(p.lattice_points().len(), 6);
        let p3 = polytope_from_divisor(&projective_space(2, 3)).unwrap();
        assert_eq!(p3.lattice_points().len(), 10);
        let counts = count_by_dim(&p);
        assert_eq!(counts, vec![3, 3, 1]);
    }

    fn count_by_dim(p: &LatticePolytope) -> Vec<usize> {
        (0..=p.rank()).map(|d| p.enumerate_faces().iter().filter(|f| f.dim == d).count()).collect()
    }

    #[test]
    fn trapezoid() {
        let p = polytope_from_divisor(&hirzebruch(1, 4, 2)).unwrap();
        assert_eq!(verts(&p), vec!["(0,0)", "(0,2)", "(2,2)", "(4,0)"]);
        assert_eq!(count_by_dim(&p), vec![4, 4, 1]);
        let top = p
            .enumerate_faces()
            .iter()
            .find(|f| f.dim == 1 && p.face_facets(f).iter().any(|h| h.normal == LatticePoint(vec![0, -1])))
            .unwrap();
        let pts = p.face_lattice_points(top);
        assert_eq!(pts, vec![LatticePoint(vec![0, 2]), LatticePoint(vec![1, 2]), LatticePoint(vec![2, 2])]);
    }

    #[test]
    fn tetrahedron_faces() {
        let p = polytope_from_divisor(&projective_space(3, 3)).unwrap();
        assert_eq!(count_by_dim(&p), vec![4, 6, 4, 1]);
        assert_eq!(p.lattice_points().len(), 20);
    }

    #[test]
    fn empty_and_unbounded() {
        let d = ToricDivisorData { rays: vec![LatticePoint(vec![1]), LatticePoint(vec![-1])], offsets: vec![0, -1] };
        assert!(matches!(polytope_from_divisor(&d), Err(Error::EmptyPolytope)));
        let d = ToricDivisorData { rays: vec![LatticePoint(vec![1, 0]), LatticePoint(vec![0, 1])], offsets: vec![0, 0] };
        assert!(matches!(polytope_from_divisor(&d), Err(Error::UnboundedPolytope)));
        let d = ToricDivisorData { rays: vec![LatticePoint(vec![1])], offsets: vec![0] };
        assert!(matches!(polytope_from_divisor(&d), Err(Error::UnboundedPolytope)));
    }

    #[test]
    fn rank_one_segment() {
        let d = ToricDivisorData { rays: vec![LatticePoint(vec![1]), LatticePoint(vec![-1])], offsets: vec![0, 1] };
        let p = polytope_from_divisor(&d).unwrap();
        assert_eq!(p.lattice_points(), vec![LatticePoint(vec![0]), LatticePoint(vec![1])]);
        assert_eq!(count_by_dim(&p), vec![2, 1]);
    }

    #[test]
    fn rational_vertex_is_kept_but_flagged() {
        // weighted triangle x ≥ 0, y ≥ 0, x + 2y ≤ 5
        let d = ToricDivisorData {
            rays: vec![LatticePoint(vec![1, 0]), LatticePoint(vec![0, 1]), LatticePoint(vec![-1, -2])],
            offsets: vec![0, 0, 5],
        };
        let p = polytope_from_divisor(&d).unwrap();
        assert!(!p.is_integral());
        assert!(matches!(p.require_integral(), Err(Error::NonIntegralPolytope(_))));
    }

    #[test]
    fn redundant_halfspace_flagged() {
        let mut d = projective_space(2, 2);
        d.rays.push(LatticePoint(vec![-1, 0]));
        d.offsets.push(5);
        let p = polytope_from_divisor(&d).unwrap();
        assert!(p.halfspaces()[3].redundant);
        assert_eq!(p.facet_halfspaces().len(), 3);
    }

    #[test]
    fn from_vertices_matches() {
        let pts = vec![LatticePoint(vec![0, 0]), LatticePoint(vec![4, 0]), LatticePoint(vec![2, 2]), LatticePoint(vec![0, 2])];
        let p = LatticePolytope::from_vertices(&pts).unwrap();
        let q = polytope_from_divisor(&hirzebruch(1, 4, 2)).unwrap();
        assert_eq!(p.vertices(), q.vertices());
        assert_eq!(p.lattice_points(), q.lattice_points());
    }

    #[test]
    fn lower_dimensional_rejected() {
        let pts = vec![LatticePoint(vec![0, 0]), LatticePoint(vec![2, 0])];
        assert!(matches!(LatticePolytope::from_vertices(&pts), Err(Error::LowerDimensionalPolytope { .. })));
    }
}
