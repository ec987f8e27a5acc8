//! Euclidean projection onto a polyhedron by a primal active-set method.
//! Every step solves a linear system, so rational inputs give exact answers.

use super::ConvexPolyhedron;
use crate::error::{Result, VakError};
use crate::linalg::{self, dot, Mat};
use crate::lp;
use crate::scalar::Scalar;

impl<S: Scalar> ConvexPolyhedron<S> {
    /// Nearest point of the polyhedron to `z`.
    pub fn project_point(&self, z: &[S]) -> Result<Vec<S>> {
        if z.len() != self.dim {
            return Err(crate::error::dim_err("point", self.dim, z.len()));
        }
        if self.is_empty() {
            return Err(VakError::EmptySet);
        }
        if self.contains(z) {
            return Ok(z.to_vec());
        }
        let n = self.dim;
        let mut x = lp::feasible_point(n, &self.a, &self.b, &self.c, &self.d).ok_or(VakError::EmptySet)?;
        let eq_idx = linalg::independent_rows(&self.c, n);
        let mut work: Vec<usize> = Vec::new();
        // inequality rows already tight at the start are added only as they block
        for _ in 0..10_000 {
            let rows: Mat<S> = eq_idx.iter().map(|&i| self.c[i].clone()).chain(work.iter().map(|&i| self.a[i].clone())).collect();
            let rhs: Vec<S> = eq_idx.iter().map(|&i| self.d[i].clone()).chain(work.iter().map(|&i| self.b[i].clone())).collect();
            let (target, mu) = equality_projection(&rows, &rhs, z, n);
            let p = linalg::sub(&target, &x);
            if !linalg::is_zero_vec(&p) {
                let mut alpha = S::one();
                let mut block: Option<usize> = None;
                for i in 0..self.a.len() {
                    if work.contains(&i) {
                        continue;
                    }
                    let ap = dot(&self.a[i], &p);
                    if ap.is_pos() {
                        let step = (self.b[i].clone() - dot(&self.a[i], &x)) / ap;
                        if step < alpha {
                            alpha = step;
                            block = Some(i);
                        }
                    }
                }
                let alpha = if alpha.is_neg() { S::zero() } else { alpha };
                x = linalg::axpy(&x, &alpha, &p);
                match block {
                    Some(i) => work.push(i),
                    None => x = target,
                }
                continue;
            }
            // stationary on the working set: check inequality multipliers
            let ineq_mu = &mu[eq_idx.len()..];
            match ineq_mu.iter().position(|m| m.is_neg()) {
                Some(k) => {
                    work.remove(k);
                }
                None => return Ok(x),
            }
        }
        Err(VakError::ScaleExceeded("active-set iteration limit".into()))
    }

    /// Euclidean distance to the polyhedron (`+∞` when empty).
    pub fn distance_f64(&self, z: &[S]) -> f64 {
        match self.project_point(z) {
            Ok(p) => linalg::norm_f64(&linalg::sub(z, &p)),
            Err(_) => f64::INFINITY,
        }
    }

    /// Squared distance, exact in rational mode (`None` when empty).
    pub fn distance_sq(&self, z: &[S]) -> Option<S> {
        let p = self.project_point(z).ok()?;
        let r = linalg::sub(z, &p);
        Some(dot(&r, &r))
    }
}

/// Minimizer of `½‖x − z‖²` on `{rows·x = rhs}` (rows independent) and the
/// multipliers `μ` with `x = z − rowsᵀμ`.
fn equality_projection<S: Scalar>(rows: &[Vec<S>], rhs: &[S], z: &[S], n: usize) -> (Vec<S>, Vec<S>) {
    if rows.is_empty() {
        return (z.to_vec(), vec![]);
    }
    let k = rows.len();
    let gram: Mat<S> = rows.iter().map(|r| rows.iter().map(|s| dot(r, s)).collect()).collect();
    let g: Vec<S> = rows.iter().zip(rhs).map(|(r, h)| dot(r, z) - h.clone()).collect();
    let mu = linalg::solve(&gram, &g, k).unwrap_or_else(|| linalg::zeros(k));
    let mut x = z.to_vec();
    for (r, m) in rows.iter().zip(&mu) {
        x = linalg::axpy(&x, &(-m.clone()), r);
    }
    debug_assert_eq!(x.len(), n);
    (x, mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    #[test]
    fn orthant_projection() {
        let o = ConvexPolyhedron::<f64>::orthant(2);
        assert_eq!(o.project_point(&[-1.0, 1.0]).unwrap(), vec![0.0, 1.0]);
        assert_eq!(o.project_point(&[2.0, 3.0]).unwrap(), vec![2.0, 3.0]);
    }

    #[test]
    fn exact_projection_onto_halfplane() {
        let q = |v: i64| BigRational::from_i64(v);
        let h = ConvexPolyhedron::from_hrep(2, vec![vec![q(1), q(1)]], vec![q(0)], vec![], vec![]).unwrap();
        let p = h.project_point(&[q(1), q(0)]).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(p, vec![half.clone(), -half]);
    }

    #[test]
    fn empty_distance_is_infinite() {
        let e = ConvexPolyhedron::<f64>::empty(2);
        assert!(e.distance_f64(&[0.0, 0.0]).is_infinite());
        assert_eq!(e.project_point(&[0.0, 0.0]), Err(VakError::EmptySet));
    }
}
