//! Set-valued mappings represented by their graphs, and positively
//! homogeneous maps (coderivatives) represented by cone-union graphs.
//!
//! Coderivative graphs are stored in `(u*, x*)` order. The sign flip
//! `(x*, −u*) ∈ N` happens in [`PosHomMap::from_normal_cone`] only.

use crate::cones::{cone_union_equal, project_cone_union, ConeUnion, EqualityCertificate};
use crate::error::{dim_err, Result, VakError};
use crate::expr::Expr;
use crate::geometry::ConvexPolyhedron;
use crate::linalg::{self, Mat};
use crate::scalar::Scalar;
use crate::sets::FiniteUnionSet;

/// `S: R^n ⇉ R^m` with a finite union of polyhedra as graph in `R^{n+m}`.
#[derive(Debug, Clone)]
pub struct PolyMap<S: Scalar = f64> {
    n: usize,
    m: usize,
    graph: FiniteUnionSet<S>,
}

impl<S: Scalar> PolyMap<S> {
    pub fn new(n: usize, m: usize, graph: FiniteUnionSet<S>) -> Result<Self> {
        if graph.dim() != n + m {
            return Err(dim_err("graph", n + m, graph.dim()));
        }
        Ok(PolyMap { n, m, graph })
    }

    pub fn from_pieces(n: usize, m: usize, pieces: Vec<ConvexPolyhedron<S>>) -> Result<Self> {
        Self::new(n, m, FiniteUnionSet::new(n + m, pieces)?)
    }

    /// `x ↦ {M x + c}`.
    pub fn affine(mat: &[Vec<S>], c: &[S]) -> Result<Self> {
        let m = mat.len();
        let n = mat.first().map_or(0, |r| r.len());
        let rows: Mat<S> = (0..m)
            .map(|i| {
                let mut r = linalg::neg(&mat[i]);
                r.extend(linalg::unit::<S>(m, i));
                r
            })
            .collect();
        let g = ConvexPolyhedron::from_hrep(n + m, vec![], vec![], rows, c.to_vec())?;
        Self::from_pieces(n, m, vec![g])
    }

    pub fn input_dim(&self) -> usize {
        self.n
    }
    pub fn output_dim(&self) -> usize {
        self.m
    }
    pub fn graph(&self) -> &FiniteUnionSet<S> {
        &self.graph
    }

    pub fn contains(&self, x: &[S], u: &[S]) -> bool {
        self.graph.contains(&concat(x, u))
    }

    /// Whether every graph piece is convex and one of them holds the rest.
    pub fn is_graph_convex(&self) -> bool {
        self.graph.as_convex().is_some()
    }

    /// `gph S ∩ (X × R^m)`.
    pub fn restrict(&self, x: &FiniteUnionSet<S>) -> Result<Self> {
        if x.dim() != self.n {
            return Err(dim_err("restriction set", self.n, x.dim()));
        }
        let graph = self.graph.intersect(&x.lift(0, self.m))?;
        Ok(PolyMap { n: self.n, m: self.m, graph })
    }

    /// `S(x)` as a union of polyhedra in `R^m`.
    pub fn evaluate(&self, x: &[S]) -> Result<FiniteUnionSet<S>> {
        if x.len() != self.n {
            return Err(dim_err("point", self.n, x.len()));
        }
        let mut pieces = Vec::new();
        for p in self.graph.pieces() {
            let split = |rows: &Mat<S>, rhs: &[S]| -> (Mat<S>, Vec<S>) {
                rows.iter()
                    .zip(rhs)
                    .map(|(r, b)| (r[self.n..].to_vec(), b.clone() - linalg::dot(&r[..self.n], x)))
                    .unzip()
            };
            let (a, b) = split(p.a(), p.b());
            let (c, d) = split(p.c(), p.d());
            pieces.push(ConvexPolyhedron::from_hrep(self.m, a, b, c, d)?);
        }
        FiniteUnionSet::new(self.m, pieces)
    }

    fn check_point(&self, x: &[S], u: &[S]) -> Result<Vec<S>> {
        if x.len() != self.n {
            return Err(dim_err("point", self.n, x.len()));
        }
        if u.len() != self.m {
            return Err(dim_err("value", self.m, u.len()));
        }
        let z = concat(x, u);
        if !self.graph.contains(&z) {
            return Err(VakError::PointNotOnGraph);
        }
        Ok(z)
    }

    /// Limiting coderivative `D*S(x̄|ū)`.
    pub fn coderivative(&self, x: &[S], u: &[S]) -> Result<PosHomMap<S>> {
        let z = self.check_point(x, u)?;
        PosHomMap::from_normal_cone(self.n, self.m, &self.graph.limiting_normal_cone_at(&z)?)
    }

    /// Regular coderivative `D̂*S(x̄|ū)`.
    pub fn regular_coderivative(&self, x: &[S], u: &[S]) -> Result<PosHomMap<S>> {
        let z = self.check_point(x, u)?;
        let n = ConeUnion::from_cone(self.graph.regular_normal_cone_at(&z)?)?;
        PosHomMap::from_normal_cone(self.n, self.m, &n)
    }

    /// `S2 ∘ S1` with `self = S1`. The flag reports a piece whose
    /// intermediate variable is unbounded (local boundedness may fail).
    pub fn compose_graphs(&self, s2: &PolyMap<S>) -> Result<(PolyMap<S>, bool)> {
        if self.m != s2.n {
            return Err(dim_err("composition inner dimension", self.m, s2.n));
        }
        let (n, k, m) = (self.n, self.m, s2.m);
        let select: Mat<S> = (0..n).map(|i| linalg::unit(n + k + m, i)).chain((0..m).map(|j| linalg::unit(n + k + m, n + k + j))).collect();
        let mut pieces = Vec::new();
        let mut unbounded = false;
        for p1 in self.graph.pieces() {
            for p2 in s2.graph.pieces() {
                let joint = p1.lift(0, m).intersect_raw(&p2.lift(n, 0))?;
                if joint.is_empty() {
                    continue;
                }
                let v = joint.vrep();
                unbounded |= v.rays.iter().chain(&v.lineality).any(|r| !linalg::is_zero_vec(&r[n..n + k]));
                pieces.push(joint.linear_image(&select)?);
            }
        }
        Ok((PolyMap::from_pieces(n, m, pieces)?, unbounded))
    }

    pub fn convert<T: Scalar>(&self) -> PolyMap<T> {
        PolyMap { n: self.n, m: self.m, graph: self.graph.convert() }
    }
}

/// `(S_1 + … + S_p)(x)` as a union of Minkowski sums.
pub fn sum_graph<S: Scalar>(maps: &[PolyMap<S>], x: &[S]) -> Result<FiniteUnionSet<S>> {
    let first = maps.first().ok_or_else(|| VakError::DimensionMismatch("empty sum".into()))?;
    let m = first.m;
    let mut acc: Vec<ConvexPolyhedron<S>> = vec![ConvexPolyhedron::origin(m)];
    for s in maps {
        if s.n != first.n || s.m != m {
            return Err(VakError::DimensionMismatch("summands must share input and output dimensions".into()));
        }
        let val = s.evaluate(x)?;
        let mut next = Vec::new();
        for a in &acc {
            for b in val.pieces() {
                next.push(a.minkowski_sum(b)?);
            }
        }
        acc = next;
    }
    FiniteUnionSet::new(m, acc)
}

/// Graph locally given by smooth inequalities `h_i(x, u) ≤ 0`.
#[derive(Debug, Clone)]
pub struct SmoothGraphMap {
    pub n: usize,
    pub m: usize,
    pub inequalities: Vec<Expr>,
    pub center: Vec<f64>,
    pub radius: f64,
}

/// Activity tolerance for smooth constraints.
pub const ACTIVE_TOL: f64 = 1e-9;

impl SmoothGraphMap {
    pub fn new(n: usize, m: usize, inequalities: Vec<Expr>, center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.len() != n + m {
            return Err(dim_err("validity center", n + m, center.len()));
        }
        for h in &inequalities {
            let (mx, mu) = h.max_indices();
            if mx > n || mu > m {
                return Err(VakError::DimensionMismatch(format!("inequality '{h}' uses variables outside x1..x{n}, u1..u{m}")));
            }
        }
        Ok(SmoothGraphMap { n, m, inequalities, center, radius })
    }

    pub fn values(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.inequalities.iter().map(|h| h.eval(z, self.n)).collect()
    }

    pub fn contains(&self, x: &[f64], u: &[f64]) -> bool {
        self.values(&concat(x, u)).map(|v| v.iter().all(|&h| h <= ACTIVE_TOL)).unwrap_or(false)
    }

    pub fn gradients(&self, z: &[f64]) -> Result<Mat<f64>> {
        self.inequalities.iter().map(|h| h.grad(z, self.n).map(|(_, g)| g)).collect()
    }

    /// Pairs `(i, j)` with `h_i + h_j ≡ 0`, i.e. one equality split in two.
    pub fn complementary_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let k = self.inequalities.len();
        for i in 0..k {
            for j in i + 1..k {
                let s = Expr::Add(Box::new(self.inequalities[i].clone()), Box::new(self.inequalities[j].clone()));
                if let Some((c, q)) = s.linear_form(self.n, self.m) {
                    if c.iter().all(num::Zero::is_zero) && num::Zero::is_zero(&q) {
                        out.push((i, j));
                        continue;
                    }
                }
                if is_negation(&self.inequalities[i], &self.inequalities[j]) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Whether the graph is polyhedral (all inequalities affine).
    pub fn is_affine(&self) -> bool {
        self.inequalities.iter().all(Expr::is_affine)
    }

    /// Exact polyhedral graph when every inequality is affine.
    pub fn to_polymap<S: Scalar>(&self) -> Option<Result<PolyMap<S>>> {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for h in &self.inequalities {
            let (c, k) = h.linear_form(self.n, self.m)?;
            a.push(c.iter().map(crate::manifold::convert_rational::<S>).collect());
            b.push(-crate::manifold::convert_rational::<S>(&k));
        }
        Some(ConvexPolyhedron::from_hrep(self.n + self.m, a, b, vec![], vec![]).and_then(|g| PolyMap::from_pieces(self.n, self.m, vec![g])))
    }
}

fn is_negation(a: &Expr, b: &Expr) -> bool {
    match (a, b) {
        (Expr::Neg(x), y) | (y, Expr::Neg(x)) => x.as_ref() == y,
        (Expr::Sub(p, q), Expr::Sub(r, s)) => p == s && q == r,
        _ => false,
    }
}

/// A positively homogeneous map `R^m ⇉ R^n` (from `u*` to `x*`) with a
/// cone-union graph in `(u*, x*)` coordinates.
#[derive(Debug, Clone)]
pub struct PosHomMap<S: Scalar = f64> {
    m: usize,
    n: usize,
    graph: ConeUnion<S>,
}

impl<S: Scalar> PosHomMap<S> {
    pub fn new(m: usize, n: usize, graph: ConeUnion<S>) -> Result<Self> {
        if graph.dim() != m + n {
            return Err(dim_err("coderivative graph", m + n, graph.dim()));
        }
        Ok(PosHomMap { m, n, graph })
    }

    /// `{(u*, x*) : (x*, −u*) ∈ N}` for a cone `N ⊆ R^n × R^m`.
    pub fn from_normal_cone(n: usize, m: usize, normal: &ConeUnion<S>) -> Result<Self> {
        if normal.dim() != n + m {
            return Err(dim_err("normal cone", n + m, normal.dim()));
        }
        let mut flip = vec![linalg::zeros::<S>(n + m); n + m];
        for j in 0..m {
            flip[j][n + j] = -S::one();
        }
        for i in 0..n {
            flip[m + i][i] = S::one();
        }
        Self::new(m, n, normal.linear_image(&flip)?)
    }

    /// Back to normal-cone coordinates `(x*, w) = (x*, −u*)`.
    pub fn to_normal_cone(&self) -> Result<ConeUnion<S>> {
        let (m, n) = (self.m, self.n);
        let mut back = vec![linalg::zeros::<S>(n + m); n + m];
        for i in 0..n {
            back[i][m + i] = S::one();
        }
        for j in 0..m {
            back[n + j][j] = -S::one();
        }
        self.graph.linear_image(&back)
    }

    pub fn input_dim(&self) -> usize {
        self.m
    }
    pub fn output_dim(&self) -> usize {
        self.n
    }
    pub fn graph(&self) -> &ConeUnion<S> {
        &self.graph
    }

    pub fn contains(&self, ustar: &[S], xstar: &[S]) -> bool {
        self.graph.contains(&concat(ustar, xstar))
    }

    /// `H(u*)` as a union of polyhedra in `R^n` (empty when `u* ∉ dom H`).
    pub fn eval(&self, ustar: &[S]) -> Result<FiniteUnionSet<S>> {
        if ustar.len() != self.m {
            return Err(dim_err("u*", self.m, ustar.len()));
        }
        let as_map = PolyMap::new(self.m, self.n, FiniteUnionSet::new(self.m + self.n, self.graph.pieces().to_vec())?)?;
        as_map.evaluate(ustar)
    }

    /// `H(0)`, a cone union in `R^n`.
    pub fn at_zero(&self) -> Result<ConeUnion<S>> {
        let drop: Mat<S> = (0..self.n).map(|i| linalg::unit(self.m + self.n, self.m + i)).collect();
        self.graph.intersect_cone(&self.zero_block(0, self.m)?)?.linear_image(&drop)
    }

    /// `H^{-1}(0)`, a cone union in `R^m`.
    pub fn preimage_of_zero(&self) -> Result<ConeUnion<S>> {
        let drop: Mat<S> = (0..self.m).map(|i| linalg::unit(self.m + self.n, i)).collect();
        self.graph.intersect_cone(&self.zero_block(self.m, self.n)?)?.linear_image(&drop)
    }

    /// The subspace of `R^{m+n}` where coordinates `start..start+len` vanish.
    fn zero_block(&self, start: usize, len: usize) -> Result<ConvexPolyhedron<S>> {
        let rows: Mat<S> = (start..start + len).map(|i| linalg::unit(self.m + self.n, i)).collect();
        ConvexPolyhedron::cone_from_hrep(self.m + self.n, vec![], rows)
    }

    /// `H(0) = {0}`, decided exactly.
    pub fn zero_at_zero(&self) -> Result<bool> {
        Ok(self.at_zero()?.pieces().iter().all(|p| p.is_trivial_cone()))
    }

    /// `u* ↦ proj_T(H(u*))` with `T` a convex cone in `R^n`.
    pub fn project_output(&self, t: &ConvexPolyhedron<S>) -> Result<Self> {
        if t.dim() != self.n {
            return Err(dim_err("tangent cone", self.n, t.dim()));
        }
        let to_front = self.output_first();
        let projected = project_cone_union(t, &self.graph.permute(&to_front))?;
        Self::new(self.m, self.n, projected.permute(&self.input_first()))
    }

    /// `u* ↦ H(u*) ∩ T`.
    pub fn intersect_output(&self, t: &ConvexPolyhedron<S>) -> Result<Self> {
        if t.dim() != self.n {
            return Err(dim_err("tangent cone", self.n, t.dim()));
        }
        let lifted = t.lift(self.m, 0);
        Self::new(self.m, self.n, self.graph.intersect_cone(&lifted)?)
    }

    // permutation taking (u*, x*) to (x*, u*)
    fn output_first(&self) -> Vec<usize> {
        (self.m..self.m + self.n).chain(0..self.m).collect()
    }
    fn input_first(&self) -> Vec<usize> {
        (self.n..self.n + self.m).chain(0..self.n).collect()
    }

    /// `u* ↦ H(−u*)`; relates the flipped and unflipped conventions.
    pub fn reflect_input(&self) -> Result<Self> {
        let mut r = linalg::identity::<S>(self.m + self.n);
        for (j, row) in r.iter_mut().enumerate().take(self.m) {
            row[j] = -S::one();
        }
        Self::new(self.m, self.n, self.graph.linear_image(&r)?)
    }

    /// `u* ↦ ⋃_{w* ∈ self(u*)} then(w*)`.
    pub fn compose(&self, then: &PosHomMap<S>) -> Result<Self> {
        if self.n != then.m {
            return Err(dim_err("composition inner dimension", self.n, then.m));
        }
        let (m, k, n) = (self.m, self.n, then.n);
        let select: Mat<S> = (0..m).map(|i| linalg::unit(m + k + n, i)).chain((0..n).map(|j| linalg::unit(m + k + n, m + k + j))).collect();
        let mut pieces = Vec::new();
        for p in self.graph.pieces() {
            for q in then.graph.pieces() {
                let joint = p.lift(0, n).intersect_raw(&q.lift(m, 0))?;
                if !joint.is_empty() {
                    pieces.push(joint.linear_image(&select)?);
                }
            }
        }
        Self::new(m, n, ConeUnion::new(m + n, pieces)?)
    }

    /// `u* ↦ H_1(u*) + … + H_p(u*)`.
    pub fn sum(maps: &[PosHomMap<S>]) -> Result<Self> {
        let first = maps.first().ok_or_else(|| VakError::DimensionMismatch("empty sum".into()))?;
        let (m, n) = (first.m, first.n);
        if maps.iter().any(|h| h.m != m || h.n != n) {
            return Err(VakError::DimensionMismatch("summands must share dimensions".into()));
        }
        let mut acc = first.clone();
        for h in &maps[1..] {
            // (y, a, b) with (y, a) ∈ acc, (y, b) ∈ h, mapped to (y, a + b)
            let dim = m + 2 * n;
            let mut add: Mat<S> = (0..m).map(|i| linalg::unit(dim, i)).collect();
            for i in 0..n {
                let mut r = linalg::zeros::<S>(dim);
                r[m + i] = S::one();
                r[m + n + i] = S::one();
                add.push(r);
            }
            let mut pieces = Vec::new();
            for p in acc.graph.pieces() {
                let pl = p.lift(0, n);
                for q in h.graph.pieces() {
                    let ql = embed_skip(q, m, n);
                    let joint = pl.intersect_raw(&ql)?;
                    if !joint.is_empty() {
                        pieces.push(joint.linear_image(&add)?);
                    }
                }
            }
            acc = Self::new(m, n, ConeUnion::new(m + n, pieces)?)?;
        }
        Ok(acc)
    }

    /// Two-sided graph equality.
    pub fn equal(&self, other: &Self) -> Result<EqualityCertificate<S>> {
        if self.m != other.m || self.n != other.n {
            return Err(dim_err("coderivative graph", self.m + self.n, other.m + other.n));
        }
        cone_union_equal(&self.graph, &other.graph)
    }

    pub fn convert<T: Scalar>(&self) -> PosHomMap<T> {
        PosHomMap { m: self.m, n: self.n, graph: self.graph.convert() }
    }
}

/// Embed a polyhedron over `(y, b)` (`y ∈ R^m`) into `(y, a, b)` with a
/// free `a ∈ R^n` block.
fn embed_skip<S: Scalar>(q: &ConvexPolyhedron<S>, m: usize, n: usize) -> ConvexPolyhedron<S> {
    // lift to (y, b, a) then reorder to (y, a, b)
    let lifted = q.lift(0, n);
    let dim = m + 2 * n;
    let perm: Vec<usize> = (0..m).chain(m + n..dim).chain(m..m + n).collect();
    lifted.permute(&perm)
}

pub(crate) fn concat<S: Clone>(a: &[S], b: &[S]) -> Vec<S> {
    let mut v = a.to_vec();
    v.extend_from_slice(b);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthant_map() -> PolyMap {
        PolyMap::from_pieces(1, 1, vec![ConvexPolyhedron::orthant(2)]).unwrap()
    }

    #[test]
    fn coderivative_of_orthant_graph() {
        let d = orthant_map().coderivative(&[0.0], &[0.0]).unwrap();
        // N = R²₋ in (x*, w); u* = −w ≥ 0, x* ≤ 0
        assert!(d.contains(&[1.0], &[-2.0]));
        assert!(!d.contains(&[-1.0], &[-2.0]));
        assert!(!d.contains(&[1.0], &[2.0]));
    }

    #[test]
    fn evaluate_slices_the_graph() {
        let s = orthant_map();
        let v = s.evaluate(&[1.0]).unwrap();
        assert!(v.contains(&[5.0]) && !v.contains(&[-1.0]));
        assert!(s.evaluate(&[-1.0]).unwrap().is_empty());
    }

    #[test]
    fn compose_with_identity() {
        let s = orthant_map();
        let id = PolyMap::affine(&[vec![1.0]], &[0.0]).unwrap();
        let (c, unbounded) = s.compose_graphs(&id).unwrap();
        assert!(!unbounded || c.graph().pieces().len() == 1);
        assert!(c.contains(&[1.0], &[2.0]) && !c.contains(&[-1.0], &[2.0]));
    }

    #[test]
    fn sum_of_two_epigraphs() {
        let up = |k: f64| {
            let g = ConvexPolyhedron::from_hrep(2, vec![vec![k, -1.0]], vec![0.0], vec![], vec![]).unwrap();
            PolyMap::from_pieces(1, 1, vec![g]).unwrap()
        };
        let s = sum_graph(&[up(1.0), up(-1.0)], &[3.0]).unwrap();
        assert!(s.contains(&[0.0]) && !s.contains(&[-0.5]));
    }

    #[test]
    fn poshom_zero_tests() {
        let g = ConeUnion::from_generators(2, vec![], vec![vec![0.0, 1.0]]).unwrap();
        let h = PosHomMap::new(1, 1, g).unwrap();
        assert!(!h.zero_at_zero().unwrap());
        let id = ConeUnion::from_generators(2, vec![], vec![vec![1.0, 1.0]]).unwrap();
        let h = PosHomMap::new(1, 1, id).unwrap();
        assert!(h.zero_at_zero().unwrap());
        let twice = h.compose(&h).unwrap();
        assert!(twice.contains(&[2.0], &[2.0]));
        let s = PosHomMap::sum(&[h.clone(), h]).unwrap();
        assert!(s.contains(&[1.0], &[2.0]) && !s.contains(&[1.0], &[1.0]));
    }

    #[test]
    fn flip_round_trip() {
        let n = ConeUnion::from_generators(2, vec![vec![-1.0, 1.0]], vec![]).unwrap();
        let h = PosHomMap::from_normal_cone(1, 1, &n).unwrap();
        assert!(h.contains(&[-1.0], &[-1.0]));
        let back = h.to_normal_cone().unwrap();
        assert!(cone_union_equal(&back, &n).unwrap().equal);
    }
}
