//! Point configurations `S`, their difference arrangements `H_S`, fiber
//! counts `l_H`, and the combinatorial conditions on faces.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::par_map;
use crate::lattice::{
    orthogonal_complement_vector, orthogonal_lattice, saturate, splitting_along, LatticeSplitting, LatticePoint,
};
use crate::polytope::{affine_dim_points, k_subsets, Face, LatticePolytope};

#[derive(Clone, Debug)]
pub struct PointConfiguration {
    points: Vec<LatticePoint>,
    ambient_rank: usize,
    span_basis: Vec<LatticePoint>,
    splitting: LatticeSplitting,
    local: Vec<LatticePoint>,
}

/// A hyperplane `H` of `V_S`, given by a primitive functional `φ_H` in the
/// configuration's local coordinates.
#[derive(Clone, Debug, Serialize)]
pub struct DifferenceHyperplane {
    pub normal: LatticePoint,
    pub fiber_values: Vec<i64>,
    /// Point indices (into the configuration) grouped by fiber value.
    pub fibers: Vec<Vec<usize>>,
    #[serde(skip)]
    pub splitting: LatticeSplitting,
}

impl DifferenceHyperplane {
    pub fn fiber_count(&self) -> usize {
        self.fiber_values.len()
    }

    /// Build the quotient data for an arbitrary primitive functional `w` on
    /// local coordinates (used by the subtorus search too).
    pub fn from_functional(config: &PointConfiguration, w: &LatticePoint) -> Result<Self> {
        let k = config.span_dim();
        if w.rank() != k || !w.is_primitive() {
            return Err(Error::InvalidInput(format!("functional {w} is not primitive in rank {k}")));
        }
        let splitting = quotient_splitting(w)?;
        let mut groups: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for (i, p) in config.local.iter().enumerate() {
            groups.entry(w.dot(p)).or_default().push(i);
        }
        let (fiber_values, fibers) = groups.into_iter().unzip();
        Ok(DifferenceHyperplane { normal: w.clone(), fiber_values, fibers, splitting })
    }
}

/// A splitting of `ℤ^k` whose last coordinate is `⟨w, ·⟩` and whose first
/// `k-1` coordinates span `w^⊥ ∩ ℤ^k`.
pub fn quotient_splitting(w: &LatticePoint) -> Result<LatticeSplitting> {
    let k = w.rank();
    let kernel = orthogonal_lattice(w);
    let mut s = splitting_along(&kernel, k)?;
    let last = |s: &LatticeSplitting| -> Vec<i64> {
        (0..k).map(|j| s.forward[(k - 1, j)].to_i64().expect("small entries")).collect()
    };
    if last(&s) != w.coords() {
        s.flip_last();
    }
    debug_assert_eq!(last(&s), w.coords());
    Ok(s)
}

/// Build `S` with its saturated difference span.
pub fn build_configuration(points: &[LatticePoint], r: usize) -> Result<PointConfiguration> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty point configuration".into()));
    }
    if points.iter().any(|p| p.rank() != r) {
        return Err(Error::InvalidInput(format!("point of wrong length for rank {r}")));
    }
    let distinct: BTreeSet<&LatticePoint> = points.iter().collect();
    if distinct.len() != points.len() {
        return Err(Error::InvalidInput("repeated point in configuration".into()));
    }
    let base = &points[0];
    let diffs: Vec<LatticePoint> = points[1..].iter().map(|p| p.sub(base)).collect();
    let span_basis = saturate(&diffs, r);
    let k = span_basis.len();
    let (splitting, local) = if k == r {
        (LatticeSplitting::identity(r), points.to_vec())
    } else {
        let s = splitting_along(&span_basis, r)?;
        let local = points.iter().map(|p| LatticePoint(s.map(&p.sub(base)).coords()[..k].to_vec())).collect();
        (s, local)
    };
    Ok(PointConfiguration { points: points.to_vec(), ambient_rank: r, span_basis, splitting, local })
}

impl PointConfiguration {
    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn span_basis(&self) -> &[LatticePoint] {
        &self.span_basis
    }

    pub fn span_dim(&self) -> usize {
        self.span_basis.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.span_dim() == self.ambient_rank
    }

    /// Coordinates of the points in a basis of `V_S ∩ M` (the points
    /// themselves when `S` is full-dimensional).
    pub fn local_points(&self) -> &[LatticePoint] {
        &self.local
    }

    pub fn splitting(&self) -> &LatticeSplitting {
        &self.splitting
    }

    pub fn index_of(&self, p: &LatticePoint) -> Option<usize> {
        self.points.iter().position(|q| q == p)
    }

    /// Primitive directions of `𝓛_S ∖ {0}` in local coordinates, canonical sign, sorted.
    pub fn difference_directions(&self) -> Vec<LatticePoint> {
        let mut set = BTreeSet::new();
        for i in 0..self.local.len() {
            for j in i + 1..self.local.len() {
                set.insert(self.local[j].sub(&self.local[i]).canonical_primitive());
            }
        }
        set.into_iter().collect()
    }
}

/// All hyperplanes of `V_S` spanned by differences, sorted by normal.
pub fn enumerate_hyperplanes(s: &PointConfiguration) -> Result<Vec<DifferenceHyperplane>> {
    let k = s.span_dim();
    if k == 0 {
        return Err(Error::DegenerateConfiguration("span of S is zero-dimensional".into()));
    }
    let normals: Vec<LatticePoint> = if k == 1 {
        vec![LatticePoint(vec![1])]
    } else {
        // Hyperplanes spanned by differences from a common point of S, i.e.
        // directions of affine hyperplanes through k independent points.
        let local = s.local_points();
        let mut set = BTreeSet::new();
        for sub in k_subsets(local.len(), k) {
            let rows: Vec<LatticePoint> = sub[1..].iter().map(|&i| local[i].sub(&local[sub[0]])).collect();
            let n = orthogonal_complement_vector(&rows, k);
            if !n.is_zero() {
                set.insert(n.canonical_primitive());
            }
        }
        set.into_iter().collect()
    };
    par_map(&normals, |n| DifferenceHyperplane::from_functional(s, n)).into_iter().collect()
}

/// `l_H = |φ_H(S − x)|`.
pub fn fiber_count(_s: &PointConfiguration, h: &DifferenceHyperplane) -> usize {
    h.fiber_count()
}

#[derive(Clone, Debug, Serialize)]
pub struct FaceConditionEntry {
    pub face: Face,
    pub description: String,
    pub points_on_face: usize,
    pub condition1_ok: bool,
    pub worst_normal: Option<LatticePoint>,
    pub min_fibers: Option<usize>,
    pub required: usize,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub strength: u8,
    pub entries: Vec<FaceConditionEntry>,
    pub overall: bool,
}

impl ConditionReport {
    pub fn first_failure(&self) -> Option<&FaceConditionEntry> {
        self.entries.iter().find(|e| !e.ok)
    }
}

/// Faces on which conditions are imposed: positive-dimensional ones, plus
/// vertices when the rank is 1.
pub fn checked_faces(p: &LatticePolytope) -> Vec<&Face> {
    p.enumerate_faces().iter().filter(|f| f.dim >= 1 || p.rank() == 1).collect()
}

pub fn check_strength(strength: u8) -> Result<()> {
    if strength == 1 || strength == 2 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("strength must be 1 or 2, got {strength}")))
    }
}

/// Check that `S ⊆ P ∩ M`.
pub fn check_subset(p: &LatticePolytope, points: &[LatticePoint]) -> Result<()> {
    for q in points {
        if q.rank() != p.rank() {
            return Err(Error::InvalidInput(format!("point {q} has the wrong length")));
        }
        if !p.contains(q) {
            return Err(Error::InvalidInput(format!("point {q} is not in the polytope")));
        }
    }
    Ok(())
}

/// Face-by-face combinatorial conditions at the given strength.
pub fn check_embedding_conditions(p: &LatticePolytope, s: &PointConfiguration, strength: u8) -> Result<ConditionReport> {
    check_strength(strength)?;
    p.require_integral()?;
    if s.ambient_rank() != p.rank() {
        return Err(Error::InvalidInput("configuration and polytope have different ranks".into()));
    }
    check_subset(p, s.points())?;
    let faces = checked_faces(p);
    let entries = par_map(&faces, |face| face_entry(p, s, face, strength));
    let entries = entries.into_iter().collect::<Result<Vec<_>>>()?;
    let overall = entries.iter().all(|e| e.ok);
    Ok(ConditionReport { strength, entries, overall })
}

fn face_entry(p: &LatticePolytope, s: &PointConfiguration, face: &Face, strength: u8) -> Result<FaceConditionEntry> {
    let on_face: Vec<LatticePoint> = s.points().iter().filter(|q| p.on_face(face, q)).cloned().collect();
    let required = face.dim + strength as usize;
    let mut entry = FaceConditionEntry {
        face: face.clone(),
        description: p.describe_face(face),
        points_on_face: on_face.len(),
        condition1_ok: false,
        worst_normal: None,
        min_fibers: None,
        required,
        ok: false,
    };
    if on_face.is_empty() || affine_dim_points(&on_face) != Some(face.dim) {
        return Ok(entry);
    }
    entry.condition1_ok = true;
    if face.dim == 0 {
        entry.ok = true;
        return Ok(entry);
    }
    let cfg = build_configuration(&on_face, p.rank())?;
    let hs = enumerate_hyperplanes(&cfg)?;
    let worst = hs.iter().min_by_key(|h| (h.fiber_count(), h.normal.clone()));
    if let Some(h) = worst {
        entry.min_fibers = Some(h.fiber_count());
        entry.worst_normal = Some(h.normal.clone());
        entry.ok = h.fiber_count() >= required;
    }
    Ok(entry)
}
