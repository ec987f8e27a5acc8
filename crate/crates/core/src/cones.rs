//! Finite unions of polyhedral cones and the projection algebra on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrangement::{Arrangement, PieceSigns, CELL_BUDGET};
use crate::error::{dim_err, Result, VakError};
use crate::geometry::ConvexPolyhedron;
use crate::linalg::{self, Mat};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct ConeUnion<S: Scalar = f64> {
    dim: usize,
    pieces: Vec<ConvexPolyhedron<S>>,
}

/// Outcome of a two-sided containment test.
#[derive(Debug, Clone, PartialEq)]
pub struct EqualityCertificate<S> {
    pub equal: bool,
    /// A direction in one union but not the other, with the side it came
    /// from (`1` = first union, `2` = second).
    pub witness: Option<(u8, Vec<S>)>,
}

impl<S: Scalar> ConeUnion<S> {
    /// Union of the given cones; empty pieces are dropped and pieces
    /// contained in another are removed.
    pub fn new(dim: usize, pieces: Vec<ConvexPolyhedron<S>>) -> Result<Self> {
        let mut kept: Vec<ConvexPolyhedron<S>> = Vec::new();
        for p in pieces {
            if p.dim() != dim {
                return Err(dim_err("cone piece", dim, p.dim()));
            }
            if p.is_empty() {
                continue;
            }
            p.require_cone()?;
            kept.push(p);
        }
        Ok(Self::canonicalize(dim, kept))
    }

    fn canonicalize(dim: usize, pieces: Vec<ConvexPolyhedron<S>>) -> Self {
        let mut out: Vec<ConvexPolyhedron<S>> = Vec::new();
        'next: for p in pieces {
            for q in &out {
                if q.contains_polyhedron(&p) {
                    continue 'next;
                }
            }
            out.retain(|q| !p.contains_polyhedron(q));
            out.push(p);
        }
        ConeUnion { dim, pieces: out }
    }

    /// The empty set (no pieces).
    pub fn empty(dim: usize) -> Self {
        ConeUnion { dim, pieces: vec![] }
    }

    /// `{0}`.
    pub fn zero(dim: usize) -> Self {
        ConeUnion { dim, pieces: vec![ConvexPolyhedron::origin(dim)] }
    }

    pub fn full(dim: usize) -> Self {
        ConeUnion { dim, pieces: vec![ConvexPolyhedron::universe(dim)] }
    }

    pub fn from_cone(p: ConvexPolyhedron<S>) -> Result<Self> {
        let d = p.dim();
        Self::new(d, vec![p])
    }

    /// Single convex cone from generators.
    pub fn from_generators(dim: usize, rays: Mat<S>, lineality: Mat<S>) -> Result<Self> {
        Self::from_cone(ConvexPolyhedron::cone(dim, rays, lineality)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn pieces(&self) -> &[ConvexPolyhedron<S>] {
        &self.pieces
    }
    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }
    /// `{0}` (nonempty with no nonzero direction).
    pub fn is_zero(&self) -> bool {
        !self.pieces.is_empty() && self.pieces.iter().all(|p| p.is_trivial_cone())
    }

    pub fn contains(&self, z: &[S]) -> bool {
        self.pieces.iter().any(|p| p.contains(z))
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(dim_err("union", self.dim, other.dim));
        }
        let mut p = self.pieces.clone();
        p.extend(other.pieces.iter().cloned());
        Ok(Self::canonicalize(self.dim, p))
    }

    pub fn union_all(dim: usize, parts: impl IntoIterator<Item = Self>) -> Result<Self> {
        let mut p = Vec::new();
        for u in parts {
            if u.dim != dim {
                return Err(dim_err("union", dim, u.dim));
            }
            p.extend(u.pieces);
        }
        Ok(Self::canonicalize(dim, p))
    }

    /// Image under a linear map.
    pub fn linear_image(&self, m: &[Vec<S>]) -> Result<Self> {
        let pieces = self.pieces.iter().map(|p| p.linear_image(m)).collect::<Result<Vec<_>>>()?;
        Self::new(m.len(), pieces)
    }

    /// Output coordinate `i` is input coordinate `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        ConeUnion { dim: self.dim, pieces: self.pieces.iter().map(|p| p.permute(perm)).collect() }
    }

    /// Intersection of every piece with a cone.
    pub fn intersect_cone(&self, k: &ConvexPolyhedron<S>) -> Result<Self> {
        let pieces = self.pieces.iter().map(|p| p.intersect_raw(k).map(|x| x.canonical())).collect::<Result<Vec<_>>>()?;
        Self::new(self.dim, pieces)
    }

    /// Rays and `±` lineality directions of every piece.
    pub fn generators(&self) -> Mat<S> {
        let mut g: Mat<S> = Vec::new();
        for p in &self.pieces {
            for v in p.cone_generators() {
                if !g.iter().any(|x| linalg::vec_eq(x, &v)) {
                    g.push(v);
                }
            }
        }
        g
    }

    pub fn convert<T: Scalar>(&self) -> ConeUnion<T> {
        ConeUnion { dim: self.dim, pieces: self.pieces.iter().map(|p| p.convert::<T>().canonical()).collect() }
    }

    /// Whether a convex cone lies inside the union. Returns a witness
    /// direction of `q` outside the union otherwise.
    pub fn covers(&self, q: &ConvexPolyhedron<S>) -> Result<Option<Vec<S>>> {
        if q.is_empty() {
            return Ok(None);
        }
        if self.pieces.iter().any(|p| p.contains_polyhedron(q)) {
            return Ok(None);
        }
        // quick generator screen
        for g in q.cone_generators() {
            if !self.contains(&g) {
                return Ok(Some(g));
            }
        }
        if self.pieces.is_empty() {
            return Ok(Some(linalg::zeros(self.dim)));
        }
        let mut arr = Arrangement::new();
        let signs: Vec<PieceSigns> = self.pieces.iter().map(|p| arr.add_piece(p)).collect();
        // a partial cell already inside a fully decided piece needs no refinement
        let prune = |s: &[i8]| signs.iter().any(|ps| ps.decided(s.len()) && ps.compatible(s));
        let cells = arr.cells(q, &prune, CELL_BUDGET)?;
        for c in cells {
            if !signs.iter().any(|ps| ps.compatible(&c.signs)) {
                let mut w = c.point;
                S::normalize_dir(&mut w);
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    /// `self ⊆ other`, with a witness when not.
    pub fn subset_of(&self, other: &Self) -> Result<Option<Vec<S>>> {
        if self.dim != other.dim {
            return Err(dim_err("containment", self.dim, other.dim));
        }
        for p in &self.pieces {
            if let Some(w) = other.covers(p)? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

/// Two-sided set equality of cone unions with a violating direction.
pub fn cone_union_equal<S: Scalar>(k1: &ConeUnion<S>, k2: &ConeUnion<S>) -> Result<EqualityCertificate<S>> {
    if let Some(w) = k1.subset_of(k2)? {
        return Ok(EqualityCertificate { equal: false, witness: Some((1, w)) });
    }
    if let Some(w) = k2.subset_of(k1)? {
        return Ok(EqualityCertificate { equal: false, witness: Some((2, w)) });
    }
    Ok(EqualityCertificate { equal: true, witness: None })
}

pub fn cone_member<S: Scalar>(k: &ConeUnion<S>, z: &[S]) -> Result<bool> {
    if z.len() != k.dim() {
        return Err(dim_err("point", k.dim(), z.len()));
    }
    Ok(k.contains(z))
}

/// Nearest point of the convex cone `t` to `z`.
pub fn project_onto_convex_cone<S: Scalar>(t: &ConvexPolyhedron<S>, z: &[S]) -> Result<Vec<S>> {
    t.require_cone()?;
    t.project_point(z)
}

/// Moreau decomposition `z = p + q` with `p` the projection onto `t` and `q`
/// the projection onto its polar.
pub fn moreau_decomposition<S: Scalar>(t: &ConvexPolyhedron<S>, z: &[S]) -> Result<(Vec<S>, Vec<S>)> {
    let p = project_onto_convex_cone(t, z)?;
    let q = linalg::sub(z, &p);
    Ok((p, q))
}

/// Image of `k` under `(y, r) ↦ (proj_t(y), r)` where `t` acts on the
/// leading `t.dim()` coordinates. Exact: on each face `G` of `t` the
/// projection is the orthogonal projector onto `span G` over the cell
/// `G + (t° ∩ (span G)^⊥)`.
pub fn project_cone_union<S: Scalar>(t: &ConvexPolyhedron<S>, k: &ConeUnion<S>) -> Result<ConeUnion<S>> {
    t.require_cone()?;
    let n = t.dim();
    if k.dim() < n {
        return Err(dim_err("cone union dimension", n, k.dim()));
    }
    let r = k.dim() - n;
    let cells = projection_cells(t)?;
    let mut images = Vec::new();
    for (cell, proj) in &cells {
        let lifted = lift_cone(cell, r)?;
        let map = block_diag(proj, r);
        for piece in k.pieces() {
            let inter = piece.intersect_raw(&lifted)?;
            if inter.is_empty() {
                continue;
            }
            images.push(inter.linear_image(&map)?);
        }
    }
    ConeUnion::new(k.dim(), images)
}

/// The linearity cells of `proj_t` with their projector matrices.
pub fn projection_cells<S: Scalar>(t: &ConvexPolyhedron<S>) -> Result<Vec<(ConvexPolyhedron<S>, Mat<S>)>> {
    let n = t.dim();
    let tgens = t.cone_generators();
    let mut out = Vec::new();
    for f in t.faces()? {
        let face = t.face_polyhedron(&f.active_inequality_indices)?;
        let fgens = face.cone_generators();
        let proj = linalg::projector(&fgens, n);
        let basis: Mat<S> = {
            let idx = linalg::independent_rows(&fgens, n);
            idx.iter().map(|&i| fgens[i].clone()).collect()
        };
        let normal_part = ConvexPolyhedron::cone_from_hrep(n, tgens.clone(), basis)?;
        let mut gens = fgens.clone();
        gens.extend(normal_part.cone_generators());
        let cell = ConvexPolyhedron::cone(n, gens, vec![])?;
        out.push((cell, proj));
    }
    Ok(out)
}

fn lift_cone<S: Scalar>(c: &ConvexPolyhedron<S>, r: usize) -> Result<ConvexPolyhedron<S>> {
    if r == 0 {
        return Ok(c.clone());
    }
    Ok(c.product(&ConvexPolyhedron::universe(r)))
}

fn block_diag<S: Scalar>(p: &Mat<S>, r: usize) -> Mat<S> {
    let n = p.len();
    let mut m = vec![linalg::zeros::<S>(n + r); n + r];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = p[i][j].clone();
        }
    }
    for i in 0..r {
        m[n + i][n + i] = S::one();
    }
    m
}

/// Default number of sampled directions per side.
pub const HAUSDORFF_SAMPLES: usize = 10_000;

/// Hausdorff distance between `k1 ∩ S` and `k2 ∩ S` (unit sphere),
/// estimated on sampled directions with exact per-piece nearest points.
pub fn sphere_hausdorff(k1: &ConeUnion<f64>, k2: &ConeUnion<f64>) -> Result<f64> {
    sphere_hausdorff_with(k1, k2, HAUSDORFF_SAMPLES, 0)
}

pub fn sphere_hausdorff_with(k1: &ConeUnion<f64>, k2: &ConeUnion<f64>, samples: usize, seed: u64) -> Result<f64> {
    if k1.dim() != k2.dim() {
        return Err(dim_err("sphere_hausdorff", k1.dim(), k2.dim()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s1 = sphere_samples(k1, samples, &mut rng)?;
    let s2 = sphere_samples(k2, samples, &mut rng)?;
    let d12 = s1.iter().map(|p| sphere_distance(p, k2, &s2)).fold(0.0, f64::max);
    let d21 = s2.iter().map(|p| sphere_distance(p, k1, &s1)).fold(0.0, f64::max);
    Ok(d12.max(d21))
}

/// Sampled unit directions of each nontrivial piece, tagged by piece.
fn sphere_samples(k: &ConeUnion<f64>, total: usize, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, Vec<f64>)>> {
    let live: Vec<usize> = (0..k.pieces().len()).filter(|&i| !k.pieces()[i].is_trivial_cone()).collect();
    if live.is_empty() {
        return Err(VakError::EmptyCone);
    }
    let per = total.div_ceil(live.len());
    let mut out = Vec::with_capacity(per * live.len());
    for &i in &live {
        let gens: Mat<f64> = k.pieces()[i].cone_generators().into_iter().map(|g| linalg::normalized(&g)).collect();
        for g in &gens {
            out.push((i, g.clone()));
        }
        for _ in 0..per.saturating_sub(gens.len()) {
            let mut v = linalg::zeros::<f64>(k.dim());
            for g in &gens {
                let w: f64 = rng.gen::<f64>().powi(3);
                v = linalg::axpy(&v, &w, g);
            }
            let norm = linalg::norm_f64(&v);
            if norm > 1e-12 {
                out.push((i, v.iter().map(|x| x / norm).collect()));
            }
        }
    }
    Ok(out)
}

fn sphere_distance(p: &(usize, Vec<f64>), k: &ConeUnion<f64>, samples: &[(usize, Vec<f64>)]) -> f64 {
    let p = &p.1;
    let mut best = f64::INFINITY;
    for (i, piece) in k.pieces().iter().enumerate() {
        if piece.is_trivial_cone() {
            continue;
        }
        let q = piece.project_point(p).unwrap_or_else(|_| linalg::zeros(p.len()));
        let nq = linalg::norm_f64(&q);
        let d = if nq > 1e-12 {
            let u: Vec<f64> = q.iter().map(|x| x / nq).collect();
            linalg::norm_f64(&linalg::sub(p, &u))
        } else {
            // p is in the polar of the piece: fall back to sampled directions
            samples.iter().filter(|s| s.0 == i).map(|s| linalg::norm_f64(&linalg::sub(p, &s.1))).fold(f64::INFINITY, f64::min)
        };
        best = best.min(d);
    }
    best
}
