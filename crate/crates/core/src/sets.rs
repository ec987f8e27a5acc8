//! Closed sets given as finite unions of convex polyhedra, and their
//! tangent, regular normal and limiting normal cones.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arrangement::{Arrangement, PieceSigns, CELL_BUDGET};
use crate::cones::ConeUnion;
use crate::error::{dim_err, Result, VakError};
use crate::geometry::ConvexPolyhedron;
use crate::linalg::{self, dot, Mat};
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct FiniteUnionSet<S: Scalar = f64> {
    dim: usize,
    pieces: Vec<ConvexPolyhedron<S>>,
}

/// A relatively open cell of the local stratification at a point, with a
/// representative point of the set inside it.
#[derive(Debug, Clone)]
pub struct LocalCell<S> {
    pub signs: Vec<i8>,
    /// Direction from the base point (zero for the point's own cell).
    pub direction: Vec<S>,
    pub point: Vec<S>,
}

/// Limiting normal cone together with how it was obtained.
#[derive(Debug, Clone)]
pub struct NormalConeResult<S: Scalar> {
    pub cone: ConeUnion<S>,
    pub cells: usize,
    pub warning: Option<String>,
}

impl<S: Scalar> FiniteUnionSet<S> {
    pub fn new(dim: usize, pieces: Vec<ConvexPolyhedron<S>>) -> Result<Self> {
        if let Some(p) = pieces.iter().find(|p| p.dim() != dim) {
            return Err(dim_err("set piece", dim, p.dim()));
        }
        Ok(FiniteUnionSet { dim, pieces: pieces.into_iter().filter(|p| !p.is_empty()).collect() })
    }

    pub fn from_polyhedron(p: ConvexPolyhedron<S>) -> Self {
        let dim = p.dim();
        FiniteUnionSet { dim, pieces: if p.is_empty() { vec![] } else { vec![p] } }
    }

    pub fn empty(dim: usize) -> Self {
        FiniteUnionSet { dim, pieces: vec![] }
    }

    pub fn universe(dim: usize) -> Self {
        Self::from_polyhedron(ConvexPolyhedron::universe(dim))
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

    pub fn contains(&self, x: &[S]) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    /// A single convex piece, or a union one of whose pieces contains the rest.
    pub fn as_convex(&self) -> Option<ConvexPolyhedron<S>> {
        self.pieces.iter().find(|p| self.pieces.iter().all(|q| p.contains_polyhedron(q))).cloned()
    }

    /// `self × R^after` placed after `before` free coordinates.
    pub fn lift(&self, before: usize, after: usize) -> Self {
        FiniteUnionSet { dim: before + self.dim + after, pieces: self.pieces.iter().map(|p| p.lift(before, after)).collect() }
    }

    /// Pairwise intersection of pieces.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(dim_err("intersect", self.dim, other.dim));
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            for q in &other.pieces {
                let r = p.intersect(q)?;
                if !r.is_empty() && !pieces.iter().any(|x: &ConvexPolyhedron<S>| x.set_equal(&r)) {
                    pieces.push(r);
                }
            }
        }
        Ok(FiniteUnionSet { dim: self.dim, pieces })
    }

    pub fn convert<T: Scalar>(&self) -> FiniteUnionSet<T> {
        FiniteUnionSet { dim: self.dim, pieces: self.pieces.iter().map(|p| p.convert()).filter(|p: &ConvexPolyhedron<T>| !p.is_empty()).collect() }
    }

    fn containing(&self, x: &[S]) -> Vec<&ConvexPolyhedron<S>> {
        self.pieces.iter().filter(|p| p.contains(x)).collect()
    }

    /// `T_C(x)`: union over pieces containing `x` of their tangent cones.
    /// Empty when `x ∉ C`.
    pub fn tangent_cone_at(&self, x: &[S]) -> Result<ConeUnion<S>> {
        if x.len() != self.dim {
            return Err(dim_err("point", self.dim, x.len()));
        }
        let pieces = self.containing(x).into_iter().map(|p| p.tangent_cone_at(x)).collect();
        ConeUnion::new(self.dim, pieces)
    }

    /// `N̂_C(x)`: the polar of the tangent cone, i.e. the intersection of the
    /// pieces' polars. The empty polyhedron when `x ∉ C`.
    pub fn regular_normal_cone_at(&self, x: &[S]) -> Result<ConvexPolyhedron<S>> {
        if x.len() != self.dim {
            return Err(dim_err("point", self.dim, x.len()));
        }
        let here = self.containing(x);
        if here.is_empty() {
            return Ok(ConvexPolyhedron::empty(self.dim));
        }
        let mut rows: Mat<S> = Vec::new();
        let mut eqs: Mat<S> = Vec::new();
        for p in here {
            let t = p.tangent_cone_at(x);
            let v = t.vrep();
            rows.extend(v.rays.iter().cloned());
            eqs.extend(v.lineality.iter().cloned());
        }
        Ok(ConvexPolyhedron::cone_from_hrep(self.dim, rows, eqs)?.canonical())
    }

    /// Radius below which the set near `x` coincides with `x + T_C(x)`:
    /// a lower bound from inactive-row slacks and from the distance to
    /// pieces not containing `x` (rows measured in the 1-norm).
    pub fn local_radius(&self, x: &[S]) -> S {
        let mut best: Option<S> = None;
        let mut consider = |v: S| {
            if v.is_pos() && best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        };
        for p in &self.pieces {
            if p.contains(x) {
                for (r, b) in p.a().iter().zip(p.b()) {
                    let slack = b.clone() - dot(r, x);
                    if slack.is_pos() {
                        consider(slack / norm1(r));
                    }
                }
            } else {
                let mut viol = S::zero();
                for (r, b) in p.a().iter().zip(p.b()) {
                    let v = (dot(r, x) - b.clone()) / norm1(r);
                    if v > viol {
                        viol = v;
                    }
                }
                for (r, d) in p.c().iter().zip(p.d()) {
                    let v = (dot(r, x) - d.clone()).abs() / norm1(r);
                    if v > viol {
                        viol = v;
                    }
                }
                consider(viol);
            }
        }
        let r = best.unwrap_or_else(S::one);
        if r > S::one() {
            S::one()
        } else {
            r
        }
    }

    /// Cells of the arrangement generated by the tangent-cone rows at `x`
    /// (plus `extra` hyperplanes through the origin) that lie in `T_C(x)`,
    /// each with a representative `x + ε·d/‖d‖₁` where `ε` is a quarter of
    /// the local radius times `eps_scale`.
    pub fn local_cells(&self, x: &[S], extra: &[Vec<S>], eps_scale: &S, budget: usize) -> Result<Vec<LocalCell<S>>> {
        let tangent: Vec<ConvexPolyhedron<S>> = self.containing(x).into_iter().map(|p| p.tangent_cone_at(x)).collect();
        if tangent.is_empty() {
            return Ok(vec![]);
        }
        let mut arr = Arrangement::new();
        let signs: Vec<PieceSigns> = tangent.iter().map(|t| arr.add_piece(t)).collect();
        for e in extra {
            arr.add(e, &S::zero());
        }
        let prune = |s: &[i8]| !signs.iter().any(|ps| ps.compatible(s));
        let cells = arr.cells(&ConvexPolyhedron::universe(self.dim), &prune, budget)?;
        let eps = self.local_radius(x) * eps_scale.clone() / S::from_i64(4);
        Ok(cells
            .into_iter()
            .map(|c| {
                let d = c.point;
                let n1 = norm1(&d);
                let point = if n1.is_zero() { x.to_vec() } else { linalg::axpy(x, &(eps.clone() / n1), &d) };
                LocalCell { signs: c.signs, direction: d, point }
            })
            .collect())
    }

    /// `N_C(x)`, exact: union of regular normal cones at one representative
    /// per local cell (including `x` itself).
    pub fn limiting_normal_cone_at(&self, x: &[S]) -> Result<ConeUnion<S>> {
        self.limiting_normal_cone_with(x, &S::one(), CELL_BUDGET)
    }

    pub fn limiting_normal_cone_with(&self, x: &[S], eps_scale: &S, budget: usize) -> Result<ConeUnion<S>> {
        if x.len() != self.dim {
            return Err(dim_err("point", self.dim, x.len()));
        }
        if !self.contains(x) {
            return Ok(ConeUnion::empty(self.dim));
        }
        let cells = self.local_cells(x, &[], eps_scale, budget)?;
        let mut cones: Vec<ConvexPolyhedron<S>> = Vec::new();
        for c in &cells {
            let n = self.regular_normal_cone_at(&c.point)?;
            if !cones.iter().any(|k| k.set_equal(&n)) {
                cones.push(n);
            }
        }
        ConeUnion::new(self.dim, cones)
    }

    /// Exact limiting normal cone, degrading to a sampled outer-limit
    /// estimate (with a warning) when the cell budget is exceeded.
    pub fn limiting_normal_cone_or_sampled(&self, x: &[S], budget: usize, samples: usize, seed: u64) -> Result<NormalConeResult<S>> {
        match self.limiting_normal_cone_with(x, &S::one(), budget) {
            Ok(cone) => Ok(NormalConeResult { cells: 0, cone, warning: None }),
            Err(VakError::ScaleExceeded(msg)) => {
                let cone = self.sampled_limiting_normal_cone(x, samples, seed)?;
                Ok(NormalConeResult { cone, cells: 0, warning: Some(format!("exact enumeration abandoned ({msg}); sampled estimate")) })
            }
            Err(e) => Err(e),
        }
    }

    /// Outer-limit estimate from regular normal cones at random nearby points.
    pub fn sampled_limiting_normal_cone(&self, x: &[S], samples: usize, seed: u64) -> Result<ConeUnion<S>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eps = self.local_radius(x) / S::from_i64(4);
        let tangent: Vec<ConvexPolyhedron<S>> = self.containing(x).into_iter().map(|p| p.tangent_cone_at(x)).collect();
        let mut cones: Vec<ConvexPolyhedron<S>> = vec![self.regular_normal_cone_at(x)?];
        for k in 0..samples {
            let t = &tangent[k % tangent.len().max(1)];
            let gens = t.cone_generators();
            if gens.is_empty() {
                continue;
            }
            let mut d = linalg::zeros::<S>(self.dim);
            for g in &gens {
                // sparse random conic combination reaches lower-dimensional strata
                if rng.gen_bool(0.5) {
                    d = linalg::axpy(&d, &S::from_f64(rng.gen_range(0.1..1.0)), g);
                }
            }
            let n1 = norm1(&d);
            if n1.is_zero() {
                continue;
            }
            let y = linalg::axpy(x, &(eps.clone() / n1), &d);
            let n = self.regular_normal_cone_at(&y)?;
            if !cones.iter().any(|c| c.set_equal(&n)) {
                cones.push(n);
            }
        }
        ConeUnion::new(self.dim, cones)
    }
}

pub(crate) fn norm1<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::zero(), |acc, x| acc + x.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::cone_union_equal;

    fn axes() -> FiniteUnionSet {
        let xaxis = ConvexPolyhedron::subspace(2, vec![vec![1.0, 0.0]]).unwrap();
        let yaxis = ConvexPolyhedron::subspace(2, vec![vec![0.0, 1.0]]).unwrap();
        FiniteUnionSet::new(2, vec![xaxis, yaxis]).unwrap()
    }

    #[test]
    fn interior_point_has_full_tangent_and_zero_normal() {
        let c = FiniteUnionSet::from_polyhedron(ConvexPolyhedron::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap());
        let t = c.tangent_cone_at(&[0.5, 0.5]).unwrap();
        assert!(cone_union_equal(&t, &ConeUnion::full(2)).unwrap().equal);
        assert!(c.regular_normal_cone_at(&[0.5, 0.5]).unwrap().is_trivial_cone());
    }

    #[test]
    fn orthant_normals() {
        let c = FiniteUnionSet::from_polyhedron(ConvexPolyhedron::<f64>::orthant(2));
        let n = c.regular_normal_cone_at(&[0.0, 0.0]).unwrap();
        assert!(n.contains(&[-1.0, -3.0]) && !n.contains(&[1.0, 0.0]));
        let lim = c.limiting_normal_cone_at(&[0.0, 0.0]).unwrap();
        assert!(cone_union_equal(&lim, &ConeUnion::from_cone(n).unwrap()).unwrap().equal);
    }

    #[test]
    fn axes_union_normals() {
        let c = axes();
        assert!(c.regular_normal_cone_at(&[0.0, 0.0]).unwrap().is_trivial_cone());
        let lim = c.limiting_normal_cone_at(&[0.0, 0.0]).unwrap();
        assert!(lim.contains(&[1.0, 0.0]) && lim.contains(&[0.0, -1.0]));
        assert!(!lim.contains(&[1.0, 1.0]));
    }

    #[test]
    fn point_outside_gives_empty_cones() {
        let c = axes();
        assert!(c.tangent_cone_at(&[1.0, 1.0]).unwrap().is_empty());
        assert!(c.regular_normal_cone_at(&[1.0, 1.0]).unwrap().is_empty());
        assert!(c.limiting_normal_cone_at(&[1.0, 1.0]).unwrap().is_empty());
    }
}
