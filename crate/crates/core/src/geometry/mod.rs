//! Convex polyhedra with both descriptions: `{z : A z ≤ b, C z = d}` and
//! `conv V + cone R + span L`.

mod dd;
mod faces;
mod qp;

pub use faces::FaceDescriptor;

use std::sync::OnceLock;

use crate::error::{dim_err, Result, VakError};
use crate::linalg::{self, dot, Mat};
use crate::lp::{self, LpOutcome};
use crate::scalar::Scalar;

/// Generator description of a polyhedron.
#[derive(Debug, Clone, PartialEq)]
pub struct VRep<S> {
    pub vertices: Mat<S>,
    pub rays: Mat<S>,
    pub lineality: Mat<S>,
}

#[derive(Debug, Clone)]
pub struct ConvexPolyhedron<S: Scalar = f64> {
    dim: usize,
    a: Mat<S>,
    b: Vec<S>,
    c: Mat<S>,
    d: Vec<S>,
    empty: bool,
    vrep: OnceLock<VRep<S>>,
}

impl<S: Scalar> ConvexPolyhedron<S> {
    /// `{z : A z ≤ b, C z = d}`. Rows are normalized and trivial rows
    /// dropped; emptiness is decided by a feasibility LP.
    pub fn from_hrep(dim: usize, a: Mat<S>, b: Vec<S>, c: Mat<S>, d: Vec<S>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(dim_err("inequality right-hand side", a.len(), b.len()));
        }
        if c.len() != d.len() {
            return Err(dim_err("equality right-hand side", c.len(), d.len()));
        }
        if let Some(r) = a.iter().chain(c.iter()).find(|r| r.len() != dim) {
            return Err(dim_err("constraint row length", dim, r.len()));
        }
        let mut p = Self::raw(dim, a, b, c, d);
        if !p.empty {
            p.empty = lp::feasible_point(dim, &p.a, &p.b, &p.c, &p.d).is_none();
        }
        if p.empty {
            return Ok(Self::empty(dim));
        }
        Ok(p)
    }

    /// Normalize rows without any feasibility check.
    fn raw(dim: usize, a: Mat<S>, b: Vec<S>, c: Mat<S>, d: Vec<S>) -> Self {
        let mut empty = false;
        let mut na: Mat<S> = Vec::with_capacity(a.len());
        let mut nb: Vec<S> = Vec::with_capacity(b.len());
        for (mut row, mut rhs) in a.into_iter().zip(b) {
            if linalg::is_zero_vec(&row) {
                if rhs.is_neg() {
                    empty = true;
                }
                continue;
            }
            S::normalize_row(&mut row, &mut rhs);
            if !na.iter().zip(&nb).any(|(r, v)| linalg::vec_eq(r, &row) && v.approx_eq(&rhs)) {
                na.push(row);
                nb.push(rhs);
            }
        }
        let mut nc: Mat<S> = Vec::with_capacity(c.len());
        let mut nd: Vec<S> = Vec::with_capacity(d.len());
        for (mut row, mut rhs) in c.into_iter().zip(d) {
            if linalg::is_zero_vec(&row) {
                if !rhs.is_zero() {
                    empty = true;
                }
                continue;
            }
            // orient the first nonzero coefficient positively
            if row.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_neg()) {
                row = linalg::neg(&row);
                rhs = -rhs;
            }
            S::normalize_row(&mut row, &mut rhs);
            if !nc.iter().zip(&nd).any(|(r, v)| linalg::vec_eq(r, &row) && v.approx_eq(&rhs)) {
                nc.push(row);
                nd.push(rhs);
            }
        }
        ConvexPolyhedron { dim, a: na, b: nb, c: nc, d: nd, empty, vrep: OnceLock::new() }
    }

    /// `conv(vertices) + cone(rays) + span(lineality)`; empty when there
    /// are no vertices. The stored H-representation is minimal.
    pub fn from_vrep(dim: usize, vertices: Mat<S>, rays: Mat<S>, lineality: Mat<S>) -> Result<Self> {
        if let Some(r) = vertices.iter().chain(rays.iter()).chain(lineality.iter()).find(|r| r.len() != dim) {
            return Err(dim_err("generator length", dim, r.len()));
        }
        if vertices.is_empty() {
            return Ok(Self::empty(dim));
        }
        let v = VRep { vertices, rays, lineality };
        let (a, b, c, d) = dd::v_to_h(dim, &v);
        Ok(Self::raw(dim, a, b, c, d))
    }

    /// Cone generated by `rays` and `lineality`.
    pub fn cone(dim: usize, rays: Mat<S>, lineality: Mat<S>) -> Result<Self> {
        Self::from_vrep(dim, vec![linalg::zeros(dim)], rays, lineality)
    }

    /// Cone `{z : A z ≤ 0, C z = 0}`.
    pub fn cone_from_hrep(dim: usize, a: Mat<S>, c: Mat<S>) -> Result<Self> {
        let (na, nc) = (a.len(), c.len());
        Self::from_hrep(dim, a, vec![S::zero(); na], c, vec![S::zero(); nc])
    }

    /// Canonical empty set.
    pub fn empty(dim: usize) -> Self {
        ConvexPolyhedron { dim, a: vec![], b: vec![], c: vec![], d: vec![], empty: true, vrep: OnceLock::new() }
    }

    pub fn universe(dim: usize) -> Self {
        Self::raw(dim, vec![], vec![], vec![], vec![])
    }

    pub fn origin(dim: usize) -> Self {
        Self::point(&linalg::zeros(dim))
    }

    pub fn point(p: &[S]) -> Self {
        let n = p.len();
        Self::raw(n, vec![], vec![], linalg::identity(n), p.to_vec())
    }

    /// Linear span of `basis`.
    pub fn subspace(dim: usize, basis: Mat<S>) -> Result<Self> {
        Self::cone(dim, vec![], basis)
    }

    /// Nonnegative orthant.
    pub fn orthant(dim: usize) -> Self {
        let a = (0..dim).map(|i| linalg::neg(&linalg::unit::<S>(dim, i))).collect();
        Self::raw(dim, a, vec![S::zero(); dim], vec![], vec![])
    }

    /// Box `lo ≤ z ≤ hi`.
    pub fn boxed(lo: &[S], hi: &[S]) -> Result<Self> {
        let n = lo.len();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..n {
            a.push(linalg::unit(n, i));
            b.push(hi[i].clone());
            a.push(linalg::neg(&linalg::unit::<S>(n, i)));
            b.push(-lo[i].clone());
        }
        Self::from_hrep(n, a, b, vec![], vec![])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn is_empty(&self) -> bool {
        self.empty
    }
    pub fn a(&self) -> &Mat<S> {
        &self.a
    }
    pub fn b(&self) -> &[S] {
        &self.b
    }
    pub fn c(&self) -> &Mat<S> {
        &self.c
    }
    pub fn d(&self) -> &[S] {
        &self.d
    }

    /// Generators, computed on first use. Empty polyhedra have no vertices.
    pub fn vrep(&self) -> &VRep<S> {
        self.vrep.get_or_init(|| {
            if self.empty {
                return VRep { vertices: vec![], rays: vec![], lineality: vec![] };
            }
            dd::h_to_v(self.dim, &self.a, &self.b, &self.c, &self.d)
                .unwrap_or(VRep { vertices: vec![], rays: vec![], lineality: vec![] })
        })
    }

    /// Both representations populated (the V-representation is cached).
    pub fn dd_convert(&self) -> &Self {
        self.vrep();
        self
    }

    /// Rebuild the H-representation from generators, yielding a minimal one.
    pub fn canonical(&self) -> Self {
        if self.empty {
            return Self::empty(self.dim);
        }
        let v = self.vrep().clone();
        if v.vertices.is_empty() {
            return Self::empty(self.dim);
        }
        let (a, b, c, d) = dd::v_to_h(self.dim, &v);
        let p = Self::raw(self.dim, a, b, c, d);
        let _ = p.vrep.set(v);
        p
    }

    pub fn contains(&self, z: &[S]) -> bool {
        if self.empty || z.len() != self.dim {
            return false;
        }
        self.a.iter().zip(&self.b).all(|(r, b)| !(dot(r, z) - b.clone()).is_pos())
            && self.c.iter().zip(&self.d).all(|(r, d)| (dot(r, z) - d.clone()).is_zero())
    }

    /// Membership of a direction in the recession cone.
    pub fn contains_direction(&self, w: &[S]) -> bool {
        self.a.iter().all(|r| !dot(r, w).is_pos()) && self.c.iter().all(|r| dot(r, w).is_zero())
    }

    /// `other ⊆ self`, decided on the generators of `other`.
    pub fn contains_polyhedron(&self, other: &Self) -> bool {
        if other.empty {
            return true;
        }
        if self.empty {
            return false;
        }
        let v = other.vrep();
        v.vertices.iter().all(|p| self.contains(p))
            && v.rays.iter().all(|r| self.contains_direction(r))
            && v.lineality.iter().all(|l| self.contains_direction(l) && self.contains_direction(&linalg::neg(l)))
    }

    pub fn set_equal(&self, other: &Self) -> bool {
        self.dim == other.dim && self.contains_polyhedron(other) && other.contains_polyhedron(self)
    }

    /// True when the polyhedron is a nonempty cone (its only vertex is the origin).
    pub fn is_cone(&self) -> bool {
        if self.empty {
            return false;
        }
        if self.b.iter().all(|x| x.is_zero()) && self.d.iter().all(|x| x.is_zero()) {
            return true;
        }
        let v = self.vrep();
        v.vertices.len() == 1 && linalg::is_zero_vec(&v.vertices[0])
    }

    pub(crate) fn require_cone(&self) -> Result<()> {
        if self.is_cone() {
            Ok(())
        } else {
            Err(VakError::NotACone("polyhedron has a vertex other than the origin".into()))
        }
    }

    /// `{0}` (for cones) — no rays and no lineality.
    pub fn is_trivial_cone(&self) -> bool {
        let v = self.vrep();
        !self.empty && v.rays.is_empty() && v.lineality.is_empty()
    }

    /// Cone generators: rays followed by `±` lineality directions.
    pub fn cone_generators(&self) -> Mat<S> {
        let v = self.vrep();
        let mut g = v.rays.clone();
        for l in &v.lineality {
            g.push(l.clone());
            g.push(linalg::neg(l));
        }
        g
    }

    pub fn is_bounded(&self) -> bool {
        let v = self.vrep();
        v.rays.is_empty() && v.lineality.is_empty()
    }

    /// A point in the relative interior (`None` when empty).
    pub fn relative_interior_point(&self) -> Option<Vec<S>> {
        if self.empty {
            return None;
        }
        let v = self.vrep();
        let k = S::from_i64(v.vertices.len() as i64);
        let mut p = linalg::zeros(self.dim);
        for x in &v.vertices {
            p = linalg::add(&p, x);
        }
        p = p.into_iter().map(|x| x / k.clone()).collect();
        for r in &v.rays {
            p = linalg::add(&p, r);
        }
        Some(p)
    }

    /// Dimension of the affine hull (−1 encoded as `None` for the empty set).
    pub fn affine_dim(&self) -> Option<usize> {
        if self.empty {
            return None;
        }
        let v = self.vrep();
        let mut dirs: Mat<S> = v.vertices.iter().skip(1).map(|x| linalg::sub(x, &v.vertices[0])).collect();
        dirs.extend(v.rays.iter().cloned());
        dirs.extend(v.lineality.iter().cloned());
        Some(linalg::rank(&dirs, self.dim))
    }

    /// Intersection; constraints are concatenated and redundant rows removed.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(dim_err("intersect", self.dim, other.dim));
        }
        if self.empty || other.empty {
            return Ok(Self::empty(self.dim));
        }
        let mut a = self.a.clone();
        a.extend(other.a.iter().cloned());
        let mut b = self.b.clone();
        b.extend(other.b.iter().cloned());
        let mut c = self.c.clone();
        c.extend(other.c.iter().cloned());
        let mut d = self.d.clone();
        d.extend(other.d.iter().cloned());
        let p = Self::from_hrep(self.dim, a, b, c, d)?;
        Ok(p.remove_redundant())
    }

    /// Intersection without redundancy removal (cheaper; same set).
    pub fn intersect_raw(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(dim_err("intersect", self.dim, other.dim));
        }
        if self.empty || other.empty {
            return Ok(Self::empty(self.dim));
        }
        let mut a = self.a.clone();
        a.extend(other.a.iter().cloned());
        let mut b = self.b.clone();
        b.extend(other.b.iter().cloned());
        let mut c = self.c.clone();
        c.extend(other.c.iter().cloned());
        let mut d = self.d.clone();
        d.extend(other.d.iter().cloned());
        Self::from_hrep(self.dim, a, b, c, d)
    }

    /// Drop inequality rows implied by the others (one LP per row), turn
    /// implicit equalities into explicit ones and reduce the equalities to an
    /// independent set.
    pub fn remove_redundant(&self) -> Self {
        if self.empty {
            return Self::empty(self.dim);
        }
        let n = self.dim;
        let mut c = self.c.clone();
        let mut d = self.d.clone();
        let mut a: Mat<S> = Vec::new();
        let mut b: Vec<S> = Vec::new();
        // implicit equalities: max −a_i·z equals −b_i
        for (i, row) in self.a.iter().enumerate() {
            match lp::maximize(&linalg::neg(row), &self.a, &self.b, &self.c, &self.d) {
                LpOutcome::Optimal { value, .. } if (value.clone() + self.b[i].clone()).is_zero() => {
                    c.push(row.clone());
                    d.push(self.b[i].clone());
                }
                _ => {
                    a.push(row.clone());
                    b.push(self.b[i].clone());
                }
            }
        }
        let keep = linalg::independent_rows(&c, n);
        let c: Mat<S> = keep.iter().map(|&i| c[i].clone()).collect();
        let d: Vec<S> = keep.iter().map(|&i| d[i].clone()).collect();
        let mut i = 0;
        while i < a.len() {
            let row = a[i].clone();
            let bi = b[i].clone();
            let mut ra = a.clone();
            let mut rb = b.clone();
            ra.remove(i);
            rb.remove(i);
            ra.push(row.clone());
            rb.push(bi.clone() + S::one());
            let redundant = match lp::maximize(&row, &ra, &rb, &c, &d) {
                LpOutcome::Optimal { value, .. } => !(value - bi).is_pos(),
                _ => false,
            };
            if redundant {
                a.remove(i);
                b.remove(i);
            } else {
                i += 1;
            }
        }
        let p = Self::raw(n, a, b, c, d);
        if let Some(v) = self.vrep.get() {
            let _ = p.vrep.set(v.clone());
        }
        p
    }

    /// `{M z + c : z ∈ P}`, computed on generators.
    pub fn affine_image(&self, m: &[Vec<S>], c: &[S]) -> Result<Self> {
        if m.iter().any(|r| r.len() != self.dim) {
            return Err(dim_err("map columns", self.dim, m.first().map_or(0, |r| r.len())));
        }
        if m.len() != c.len() {
            return Err(dim_err("offset length", m.len(), c.len()));
        }
        let out = m.len();
        if self.empty {
            return Ok(Self::empty(out));
        }
        let v = self.vrep();
        let vertices = v.vertices.iter().map(|p| linalg::add(&linalg::mat_vec(m, p), c)).collect();
        let mut rays: Mat<S> = Vec::new();
        let mut lin: Mat<S> = Vec::new();
        for r in &v.rays {
            let img = linalg::mat_vec(m, r);
            if !linalg::is_zero_vec(&img) {
                rays.push(img);
            }
        }
        for l in &v.lineality {
            let img = linalg::mat_vec(m, l);
            if !linalg::is_zero_vec(&img) {
                lin.push(img);
            }
        }
        Self::from_vrep(out, vertices, rays, lin)
    }

    /// Image under a linear map.
    pub fn linear_image(&self, m: &[Vec<S>]) -> Result<Self> {
        self.affine_image(m, &linalg::zeros(m.len()))
    }

    pub fn minkowski_sum(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(dim_err("minkowski_sum", self.dim, other.dim));
        }
        if self.empty || other.empty {
            return Ok(Self::empty(self.dim));
        }
        let (v, w) = (self.vrep(), other.vrep());
        let mut vertices = Vec::new();
        for p in &v.vertices {
            for q in &w.vertices {
                vertices.push(linalg::add(p, q));
            }
        }
        let rays = v.rays.iter().chain(&w.rays).cloned().collect();
        let lin = v.lineality.iter().chain(&w.lineality).cloned().collect();
        Self::from_vrep(self.dim, vertices, rays, lin)
    }

    /// `{v : ⟨v, z⟩ ≤ 0 ∀ z ∈ K}`; generators of `K` become the rows.
    pub fn polar_cone(&self) -> Result<Self> {
        self.require_cone()?;
        let v = self.vrep();
        Self::cone_from_hrep(self.dim, v.rays.clone(), v.lineality.clone())
    }

    /// `P × Q`.
    pub fn product(&self, other: &Self) -> Self {
        let n = self.dim + other.dim;
        if self.empty || other.empty {
            return Self::empty(n);
        }
        let pad = |r: &Vec<S>, before: usize, after: usize| {
            let mut v = linalg::zeros(before);
            v.extend(r.iter().cloned());
            v.extend(linalg::zeros::<S>(after));
            v
        };
        let mut a: Mat<S> = self.a.iter().map(|r| pad(r, 0, other.dim)).collect();
        a.extend(other.a.iter().map(|r| pad(r, self.dim, 0)));
        let b = self.b.iter().chain(&other.b).cloned().collect();
        let mut c: Mat<S> = self.c.iter().map(|r| pad(r, 0, other.dim)).collect();
        c.extend(other.c.iter().map(|r| pad(r, self.dim, 0)));
        let d = self.d.iter().chain(&other.d).cloned().collect();
        Self::raw(n, a, b, c, d)
    }

    /// `R^before × P × R^after`.
    pub fn lift(&self, before: usize, after: usize) -> Self {
        Self::universe(before).product(self).product(&Self::universe(after))
    }

    /// Tangent cone at a member `x`: the active rows with zero right-hand side.
    pub fn tangent_cone_at(&self, x: &[S]) -> Self {
        let act: Mat<S> = self
            .a
            .iter()
            .zip(&self.b)
            .filter(|(r, b)| (dot(r, x) - (*b).clone()).is_zero())
            .map(|(r, _)| r.clone())
            .collect();
        let nc = self.c.len();
        Self::raw(self.dim, act.clone(), vec![S::zero(); act.len()], self.c.clone(), vec![S::zero(); nc])
    }

    /// Indices of inequality rows active at `x`.
    pub fn active_rows(&self, x: &[S]) -> Vec<usize> {
        (0..self.a.len()).filter(|&i| (dot(&self.a[i], x) - self.b[i].clone()).is_zero()).collect()
    }

    /// The face where the given inequality rows hold with equality.
    pub fn face_polyhedron(&self, active: &[usize]) -> Result<Self> {
        let mut c = self.c.clone();
        let mut d = self.d.clone();
        for &i in active {
            c.push(self.a[i].clone());
            d.push(self.b[i].clone());
        }
        Self::from_hrep(self.dim, self.a.clone(), self.b.clone(), c, d)
    }

    /// Largest violation `max(a·z − b, |c·z − d|)` over rows; `≤ 0` inside.
    pub fn max_violation(&self, z: &[S]) -> S {
        let mut worst = S::from_i64(-1_000_000_000);
        for (r, b) in self.a.iter().zip(&self.b) {
            let v = dot(r, z) - b.clone();
            if v > worst {
                worst = v;
            }
        }
        for (r, d) in self.c.iter().zip(&self.d) {
            let v = (dot(r, z) - d.clone()).abs();
            if v > worst {
                worst = v;
            }
        }
        if self.a.is_empty() && self.c.is_empty() {
            return S::zero();
        }
        worst
    }

    /// Convert to another scalar type (through `f64`).
    pub fn convert<T: Scalar>(&self) -> ConvexPolyhedron<T> {
        let cv = |m: &Mat<S>| -> Mat<T> { m.iter().map(|r| linalg::convert_vec(r)).collect() };
        let mut p = ConvexPolyhedron::<T>::raw(self.dim, cv(&self.a), linalg::convert_vec(&self.b), cv(&self.c), linalg::convert_vec(&self.d));
        p.empty = self.empty;
        if p.empty {
            return ConvexPolyhedron::<T>::empty(self.dim);
        }
        p
    }

    /// Permute coordinates: output coordinate `i` is input coordinate `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        let pr = |r: &Vec<S>| -> Vec<S> { perm.iter().map(|&j| r[j].clone()).collect() };
        let mut p = Self::raw(
            self.dim,
            self.a.iter().map(pr).collect(),
            self.b.clone(),
            self.c.iter().map(pr).collect(),
            self.d.clone(),
        );
        p.empty = self.empty;
        if let Some(v) = self.vrep.get() {
            let _ = p.vrep.set(VRep {
                vertices: v.vertices.iter().map(pr).collect(),
                rays: v.rays.iter().map(pr).collect(),
                lineality: v.lineality.iter().map(pr).collect(),
            });
        }
        p
    }
}

impl<S: Scalar> PartialEq for ConvexPolyhedron<S> {
    fn eq(&self, other: &Self) -> bool {
        self.set_equal(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn q(v: i64) -> BigRational {
        BigRational::from_i64(v)
    }

    fn unit_square() -> ConvexPolyhedron {
        ConvexPolyhedron::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap()
    }

    #[test]
    fn square_round_trip() {
        let p = unit_square();
        assert_eq!(p.vrep().vertices.len(), 4);
        let c = p.canonical();
        assert_eq!(c.a().len(), 4);
        assert!(c.set_equal(&p));
    }

    #[test]
    fn orthant_generators() {
        let p = ConvexPolyhedron::<f64>::orthant(2);
        let v = p.vrep();
        assert_eq!(v.vertices, vec![vec![0.0, 0.0]]);
        assert_eq!(v.rays.len(), 2);
    }

    #[test]
    fn triangle_exact_vertices() {
        let a = vec![vec![q(1), q(1)], vec![q(1), q(-1)], vec![q(-1), q(0)]];
        let p = ConvexPolyhedron::from_hrep(2, a, vec![q(1), q(1), q(0)], vec![], vec![]).unwrap();
        let mut vs = p.vrep().vertices.clone();
        vs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(vs, vec![vec![q(0), q(-1)], vec![q(0), q(1)], vec![q(1), q(0)]]);
    }

    #[test]
    fn intersect_orthant_with_halfspace() {
        let o = ConvexPolyhedron::<f64>::orthant(2);
        let h = ConvexPolyhedron::from_hrep(2, vec![vec![1.0, 0.0]], vec![1.0], vec![], vec![]).unwrap();
        let r = o.intersect(&h).unwrap();
        assert_eq!(r.a().len(), 3);
        assert!(r.contains(&[1.0, 5.0]) && !r.contains(&[1.5, 0.0]));
    }

    #[test]
    fn disjoint_boxes_are_empty() {
        let b1 = ConvexPolyhedron::boxed(&[0.0], &[1.0]).unwrap();
        let b2 = ConvexPolyhedron::boxed(&[2.0], &[3.0]).unwrap();
        assert!(b1.intersect(&b2).unwrap().is_empty());
    }

    #[test]
    fn implicit_equality_detected() {
        let a = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]];
        let p = ConvexPolyhedron::from_hrep(2, a, vec![0.0, 0.0, 1.0], vec![], vec![]).unwrap().remove_redundant();
        assert_eq!(p.c().len(), 1);
        assert_eq!(p.a().len(), 1);
    }

    #[test]
    fn polar_examples() {
        let o = ConvexPolyhedron::<f64>::orthant(2);
        let p = o.polar_cone().unwrap();
        assert!(p.contains(&[-1.0, -2.0]) && !p.contains(&[1.0, 0.0]));
        let line = ConvexPolyhedron::<f64>::subspace(3, vec![vec![1.0, 0.0, 0.0]]).unwrap();
        let perp = line.polar_cone().unwrap();
        assert_eq!(perp.vrep().lineality.len(), 2);
        let k = ConvexPolyhedron::cone(2, vec![vec![q(1), q(0)], vec![q(1), q(1)]], vec![]).unwrap();
        let kp = k.polar_cone().unwrap();
        let expected = ConvexPolyhedron::cone(2, vec![vec![q(0), q(-1)], vec![q(-1), q(1)]], vec![]).unwrap();
        assert!(kp.set_equal(&expected));
    }

    #[test]
    fn polar_of_non_cone_errors() {
        assert!(matches!(unit_square().polar_cone(), Err(VakError::NotACone(_))));
    }

    #[test]
    fn projection_of_cube() {
        let cube = ConvexPolyhedron::boxed(&[0.0; 3], &[1.0; 3]).unwrap();
        let m = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]];
        let sq = cube.linear_image(&m).unwrap();
        assert!(sq.set_equal(&unit_square()));
    }

    #[test]
    fn interval_sum() {
        let i = ConvexPolyhedron::boxed(&[q(0)], &[q(1)]).unwrap();
        let s = i.minkowski_sum(&i).unwrap();
        assert!(s.set_equal(&ConvexPolyhedron::boxed(&[q(0)], &[q(2)]).unwrap()));
        let z = ConvexPolyhedron::origin(1);
        assert!(i.minkowski_sum(&z).unwrap().set_equal(&i));
    }

    #[test]
    fn dimension_mismatch_reported() {
        let r = ConvexPolyhedron::<f64>::from_hrep(2, vec![vec![1.0]], vec![0.0], vec![], vec![]);
        assert!(matches!(r, Err(VakError::DimensionMismatch(_))));
    }
}
