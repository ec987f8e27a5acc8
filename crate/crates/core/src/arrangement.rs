//! Sign-cell enumeration for hyperplane arrangements restricted to a
//! polyhedron. Each cell is relatively open and carries a witness point.

use crate::error::{Result, VakError};
use crate::geometry::ConvexPolyhedron;
use crate::linalg::{self, dot, Mat};
use crate::lp;
use crate::scalar::Scalar;

/// Default cap on the number of cells.
pub const CELL_BUDGET: usize = 50_000;

/// Hyperplanes `normal·z = offset`, deduplicated up to orientation.
#[derive(Debug, Clone, Default)]
pub struct Arrangement<S> {
    pub normals: Mat<S>,
    pub offsets: Vec<S>,
}

/// How a convex piece's constraints read on the arrangement:
/// `(hyperplane, orientation, is_equality)`; the constraint is
/// `orientation·(normal·z − offset) ≤ 0` (or `= 0`).
#[derive(Debug, Clone, Default)]
pub struct PieceSigns {
    pub rows: Vec<(usize, i8, bool)>,
}

impl PieceSigns {
    /// Whether a (possibly partial) sign vector is consistent with the piece.
    /// Hyperplanes beyond `signs.len()` are treated as undecided.
    pub fn compatible(&self, signs: &[i8]) -> bool {
        self.rows.iter().all(|&(h, o, eq)| {
            if h >= signs.len() {
                return true;
            }
            let s = signs[h] * o;
            if eq {
                s == 0
            } else {
                s <= 0
            }
        })
    }

    /// Whether all of the piece's hyperplanes have been decided.
    pub fn decided(&self, len: usize) -> bool {
        self.rows.iter().all(|&(h, _, _)| h < len)
    }
}

#[derive(Debug, Clone)]
pub struct Cell<S> {
    pub signs: Vec<i8>,
    pub point: Vec<S>,
}

impl<S: Scalar> Arrangement<S> {
    pub fn new() -> Self {
        Arrangement { normals: vec![], offsets: vec![] }
    }

    pub fn len(&self) -> usize {
        self.normals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// Insert `normal·z = offset`; returns its index and the orientation of
    /// the stored copy relative to the input.
    pub fn add(&mut self, normal: &[S], offset: &S) -> Option<(usize, i8)> {
        if linalg::is_zero_vec(normal) {
            return None;
        }
        let mut n = normal.to_vec();
        let mut o = offset.clone();
        S::normalize_row(&mut n, &mut o);
        let neg_n = linalg::neg(&n);
        let neg_o = -o.clone();
        for (i, (m, p)) in self.normals.iter().zip(&self.offsets).enumerate() {
            if linalg::vec_eq(m, &n) && p.approx_eq(&o) {
                return Some((i, 1));
            }
            if linalg::vec_eq(m, &neg_n) && p.approx_eq(&neg_o) {
                return Some((i, -1));
            }
        }
        self.normals.push(n);
        self.offsets.push(o);
        Some((self.normals.len() - 1, 1))
    }

    /// Register every constraint row of a polyhedron.
    pub fn add_piece(&mut self, p: &ConvexPolyhedron<S>) -> PieceSigns {
        let mut rows = Vec::new();
        for (a, b) in p.a().iter().zip(p.b()) {
            if let Some((h, o)) = self.add(a, b) {
                rows.push((h, o, false));
            }
        }
        for (c, d) in p.c().iter().zip(p.d()) {
            if let Some((h, o)) = self.add(c, d) {
                rows.push((h, o, true));
            }
        }
        PieceSigns { rows }
    }

    pub fn sign_of(&self, k: usize, z: &[S]) -> i8 {
        (dot(&self.normals[k], z) - self.offsets[k].clone()).sign()
    }

    /// Nonempty cells `{z ∈ base : sign(normal_k·z − offset_k) = σ_k}`.
    /// `prune` sees partial sign vectors and may discard a cell together
    /// with all its refinements.
    pub fn cells(&self, base: &ConvexPolyhedron<S>, prune: &dyn Fn(&[i8]) -> bool, budget: usize) -> Result<Vec<Cell<S>>> {
        if base.is_empty() {
            return Ok(vec![]);
        }
        let n = base.dim();
        let start = match lp::feasible_point(n, base.a(), base.b(), base.c(), base.d()) {
            Some(x) => x,
            None => return Ok(vec![]),
        };
        // keep a relative-interior point of the base so strict cells are found
        let start = base.relative_interior_point().unwrap_or(start);
        let mut cells = vec![Cell { signs: vec![], point: start }];
        for k in 0..self.len() {
            let mut next = Vec::with_capacity(cells.len() * 2);
            for cell in cells {
                let s0 = self.sign_of(k, &cell.point);
                for s in [-1i8, 0, 1] {
                    let mut signs = cell.signs.clone();
                    signs.push(s);
                    if prune(&signs) {
                        continue;
                    }
                    if s == s0 {
                        next.push(Cell { signs, point: cell.point.clone() });
                        continue;
                    }
                    if let Some(point) = self.witness(base, &signs) {
                        next.push(Cell { signs, point });
                    }
                }
                if next.len() > budget {
                    return Err(VakError::ScaleExceeded(format!("arrangement exceeds {budget} cells")));
                }
            }
            cells = next;
        }
        Ok(cells)
    }

    /// A point of the cell with the given (prefix) sign vector, if nonempty.
    pub fn witness(&self, base: &ConvexPolyhedron<S>, signs: &[i8]) -> Option<Vec<S>> {
        let n = base.dim();
        let mut a: Mat<S> = base.a().clone();
        let mut b: Vec<S> = base.b().to_vec();
        let mut strict = vec![false; a.len()];
        let mut c: Mat<S> = base.c().clone();
        let mut d: Vec<S> = base.d().to_vec();
        for (k, &s) in signs.iter().enumerate() {
            match s {
                0 => {
                    c.push(self.normals[k].clone());
                    d.push(self.offsets[k].clone());
                }
                1 => {
                    a.push(linalg::neg(&self.normals[k]));
                    b.push(-self.offsets[k].clone());
                    strict.push(true);
                }
                _ => {
                    a.push(self.normals[k].clone());
                    b.push(self.offsets[k].clone());
                    strict.push(true);
                }
            }
        }
        lp::strict_point(n, &a, &b, &strict, &c, &d).map(|(x, _)| x)
    }
}

/// Face-closure order on cells of a central arrangement: `lower` lies in
/// the closure of `upper`.
pub fn in_closure(lower: &[i8], upper: &[i8]) -> bool {
    lower.iter().zip(upper).all(|(&l, &u)| l == 0 || l == u)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_lines_through_origin() {
        let mut arr = Arrangement::<f64>::new();
        arr.add(&[1.0, 0.0], &0.0);
        arr.add(&[0.0, 1.0], &0.0);
        arr.add(&[-2.0, 0.0], &0.0); // duplicate up to orientation
        assert_eq!(arr.len(), 2);
        let cells = arr.cells(&ConvexPolyhedron::universe(2), &|_| false, 100).unwrap();
        // 4 quadrants, 4 half-axes, origin
        assert_eq!(cells.len(), 9);
    }

    #[test]
    fn restricted_to_base() {
        let mut arr = Arrangement::<f64>::new();
        arr.add(&[1.0, 0.0], &0.0);
        let cells = arr.cells(&ConvexPolyhedron::orthant(2), &|_| false, 100).unwrap();
        // {x1 > 0} and {x1 = 0} within the orthant
        assert_eq!(cells.len(), 2);
    }

    #[test]
    fn closure_order() {
        assert!(in_closure(&[0, 1], &[1, 1]));
        assert!(!in_closure(&[-1, 1], &[1, 1]));
    }
}
