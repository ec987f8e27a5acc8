//! Smooth manifolds `X = {x : F(x) = 0}` described by expression charts.

use nalgebra::{DMatrix, DVector};

use crate::error::{dim_err, Result, VakError};
use crate::expr::Expr;
use crate::geometry::ConvexPolyhedron;
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Smallest admissible singular value of the Jacobian.
pub const RANK_TOL: f64 = 1e-8;
/// Residual below which a point counts as on the manifold.
pub const ON_MANIFOLD_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct ManifoldChart {
    n: usize,
    components: Vec<Expr>,
    center: Vec<f64>,
    radius: f64,
}

impl ManifoldChart {
    pub fn new(n: usize, components: Vec<Expr>, center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.len() != n {
            return Err(dim_err("chart center", n, center.len()));
        }
        if components.len() > n {
            return Err(VakError::DimensionMismatch(format!("{} equations in R^{n}", components.len())));
        }
        for c in &components {
            let (mx, mu) = c.max_indices();
            if mx > n || mu > 0 {
                return Err(VakError::DimensionMismatch(format!("chart component '{c}' uses variables outside x1..x{n}")));
            }
        }
        Ok(ManifoldChart { n, components, center, radius })
    }

    /// Chart valid on all of `R^n`.
    pub fn global(n: usize, components: Vec<Expr>) -> Result<Self> {
        Self::new(n, components, vec![0.0; n], f64::INFINITY)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }
    pub fn codim(&self) -> usize {
        self.components.len()
    }
    pub fn dim(&self) -> usize {
        self.n - self.components.len()
    }
    pub fn components(&self) -> &[Expr] {
        &self.components
    }
    pub fn center(&self) -> &[f64] {
        &self.center
    }
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn in_region(&self, x: &[f64]) -> bool {
        x.len() == self.n && crate::linalg::norm_f64(&crate::linalg::sub(x, &self.center)) <= self.radius
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n {
            return Err(dim_err("point", self.n, x.len()));
        }
        if !self.in_region(x) {
            return Err(VakError::OutsideValidityRegion);
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        self.components.iter().map(|c| c.eval(x, self.n)).collect()
    }

    pub fn residual(&self, x: &[f64]) -> Result<f64> {
        Ok(self.value(x)?.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    pub fn on_manifold(&self, x: &[f64]) -> bool {
        self.residual(x).map(|r| r <= ON_MANIFOLD_TOL).unwrap_or(false)
    }

    fn raw_jacobian(&self, x: &[f64]) -> Result<Mat<f64>> {
        self.components.iter().map(|c| c.grad(x, self.n).map(|(_, g)| g)).collect()
    }

    /// `∇F(x)`, rows indexed by components. Errors when rank is deficient.
    pub fn jacobian(&self, x: &[f64]) -> Result<Mat<f64>> {
        self.check(x)?;
        let j = self.raw_jacobian(x)?;
        let k = j.len();
        if k > 0 {
            let m = to_dmatrix(&j, self.n);
            let smin = m.singular_values().iter().cloned().fold(f64::INFINITY, f64::min);
            if smin <= RANK_TOL {
                return Err(VakError::RankDeficient(format!("smallest singular value {smin:.3e} of the Jacobian at {x:?}")));
            }
        }
        Ok(j)
    }

    /// `T_X(x) = ker ∇F(x)` as a lineality-only cone.
    pub fn tangent_space(&self, x: &[f64]) -> Result<ConvexPolyhedron<f64>> {
        let j = self.jacobian(x)?;
        ConvexPolyhedron::cone_from_hrep(self.n, vec![], j)
    }

    /// Orthonormal basis of the tangent space.
    pub fn tangent_basis(&self, x: &[f64]) -> Result<Mat<f64>> {
        let p = self.tangent_projector(x)?;
        Ok(orthonormal_range(&p, self.n, self.dim()))
    }

    /// Orthonormal basis of the normal space `range ∇F(x)*`.
    pub fn normal_basis(&self, x: &[f64]) -> Result<Mat<f64>> {
        let j = self.jacobian(x)?;
        let k = j.len();
        if k == 0 {
            return Ok(vec![]);
        }
        let m = to_dmatrix(&j, self.n).transpose();
        let q = m.qr().q();
        Ok((0..k).map(|c| q.column(c).iter().cloned().collect()).collect())
    }

    /// `I − ∇F*(∇F ∇F*)⁻¹∇F`.
    pub fn tangent_projector(&self, x: &[f64]) -> Result<Mat<f64>> {
        let j = self.jacobian(x)?;
        let n = self.n;
        if j.is_empty() {
            return Ok(crate::linalg::identity(n));
        }
        let jm = to_dmatrix(&j, n);
        let gram = &jm * jm.transpose();
        let inv = gram.try_inverse().ok_or_else(|| VakError::RankDeficient("singular Gram matrix".into()))?;
        let p = DMatrix::identity(n, n) - jm.transpose() * inv * &jm;
        // symmetrize away rounding
        let p = (&p + p.transpose()) * 0.5;
        Ok(from_dmatrix(&p))
    }

    /// `‖w − P(x)w‖` for the unit chord `w = (y − x)/‖y − x‖`.
    pub fn chord_tangency_defect(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        let diff = crate::linalg::sub(y, x);
        let len = crate::linalg::norm_f64(&diff);
        if len < 1e-12 {
            return Err(VakError::DegenerateChord);
        }
        let w: Vec<f64> = diff.iter().map(|v| v / len).collect();
        let p = self.tangent_projector(x)?;
        let pw = crate::linalg::mat_vec(&p, &w);
        Ok(crate::linalg::norm_f64(&crate::linalg::sub(&w, &pw)))
    }

    /// Gauss–Newton (minimum-norm step) pull of `z` onto the manifold.
    pub fn retract(&self, z: &[f64]) -> Result<Vec<f64>> {
        let mut x = z.to_vec();
        for _ in 0..100 {
            let f = DVector::from_vec(self.value(&x)?);
            if f.norm() <= 1e-13 {
                break;
            }
            let j = to_dmatrix(&self.raw_jacobian(&x)?, self.n);
            let step = j.clone().svd(true, true).solve(&f, 1e-12).map_err(|e| VakError::RankDeficient(e.to_string()))?;
            for (xi, s) in x.iter_mut().zip(step.iter()) {
                *xi -= s;
            }
        }
        if !self.on_manifold(&x) {
            return Err(VakError::RankDeficient("Newton retraction did not converge".into()));
        }
        Ok(x)
    }

    /// All components have degree at most one.
    pub fn is_affine(&self) -> bool {
        self.components.iter().all(Expr::is_affine)
    }

    /// Exact polyhedral form `{x : F(x) = 0}` of an affine chart.
    pub fn as_polyhedron<S: Scalar>(&self) -> Option<Result<ConvexPolyhedron<S>>> {
        let mut c = Vec::new();
        let mut d = Vec::new();
        for e in &self.components {
            let (coef, k) = e.linear_form(self.n, 0)?;
            c.push(coef.iter().map(convert_rational::<S>).collect());
            d.push(-convert_rational::<S>(&k));
        }
        Some(ConvexPolyhedron::from_hrep(self.n, vec![], vec![], c, d))
    }
}

pub(crate) fn convert_rational<S: Scalar>(q: &num::BigRational) -> S {
    S::parse_literal(&format!("{}/{}", q.numer(), q.denom())).unwrap_or_else(|| S::from_f64(num::ToPrimitive::to_f64(q).unwrap_or(0.0)))
}

pub(crate) fn to_dmatrix(m: &[Vec<f64>], cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m.len(), cols, |i, j| m[i][j])
}

pub(crate) fn from_dmatrix(m: &DMatrix<f64>) -> Mat<f64> {
    (0..m.nrows()).map(|i| m.row(i).iter().cloned().collect()).collect()
}

/// Orthonormal basis of the range of a symmetric projector of known rank.
fn orthonormal_range(p: &[Vec<f64>], n: usize, rank: usize) -> Mat<f64> {
    let eig = to_dmatrix(p, n).symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    idx.into_iter().take(rank).map(|c| eig.eigenvectors.column(c).iter().cloned().collect()).collect()
}
