//! Dense linear algebra over any [`Scalar`]. Matrices are row lists.

use crate::scalar::Scalar;

pub type Mat<S> = Vec<Vec<S>>;

pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc + x.clone() * y.clone();
    }
    acc
}

pub fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale<S: Scalar>(a: &[S], k: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * k.clone()).collect()
}

pub fn neg<S: Scalar>(a: &[S]) -> Vec<S> {
    a.iter().map(|x| -x.clone()).collect()
}

/// `a + k·b`
pub fn axpy<S: Scalar>(a: &[S], k: &S, b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + k.clone() * y.clone()).collect()
}

pub fn zeros<S: Scalar>(n: usize) -> Vec<S> {
    vec![S::zero(); n]
}

pub fn unit<S: Scalar>(n: usize, i: usize) -> Vec<S> {
    let mut v = zeros(n);
    v[i] = S::one();
    v
}

pub fn identity<S: Scalar>(n: usize) -> Mat<S> {
    (0..n).map(|i| unit(n, i)).collect()
}

pub fn is_zero_vec<S: Scalar>(a: &[S]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn vec_eq<S: Scalar>(a: &[S], b: &[S]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.approx_eq(y))
}

pub fn norm_f64<S: Scalar>(a: &[S]) -> f64 {
    a.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
}

pub fn normalized<S: Scalar>(a: &[S]) -> Vec<S> {
    let mut v = a.to_vec();
    S::normalize_dir(&mut v);
    v
}

pub fn mat_vec<S: Scalar>(m: &[Vec<S>], v: &[S]) -> Vec<S> {
    m.iter().map(|row| dot(row, v)).collect()
}

pub fn transpose<S: Scalar>(m: &[Vec<S>], ncols: usize) -> Mat<S> {
    (0..ncols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>], bcols: usize) -> Mat<S> {
    let bt = transpose(b, bcols);
    a.iter().map(|r| bt.iter().map(|c| dot(r, c)).collect()).collect()
}

pub fn to_f64_vec<S: Scalar>(a: &[S]) -> Vec<f64> {
    a.iter().map(|x| x.to_f64()).collect()
}

pub fn from_f64_vec<S: Scalar>(a: &[f64]) -> Vec<S> {
    a.iter().map(|x| S::from_f64(*x)).collect()
}

pub fn convert_vec<S: Scalar, T: Scalar>(a: &[S]) -> Vec<T> {
    a.iter().map(|x| T::from_f64(x.to_f64())).collect()
}

/// Reduced row echelon form; returns the reduced rows (zero rows dropped)
/// and the pivot column of each.
pub fn rref<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> (Mat<S>, Vec<usize>) {
    let mut m: Mat<S> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        // largest magnitude pivot keeps the float path stable
        let mut best: Option<usize> = None;
        for i in r..m.len() {
            if !m[i][col].is_zero() {
                match best {
                    None => best = Some(i),
                    Some(b) if m[i][col].abs() > m[b][col].abs() => best = Some(i),
                    _ => {}
                }
            }
        }
        let Some(p) = best else { continue };
        m.swap(r, p);
        let pv = m[r][col].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() / pv.clone();
        }
        m[r][col] = S::one();
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let pr = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    *x = x.clone() - f.clone() * y.clone();
                }
                m[i][col] = S::zero();
            }
        }
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    if !S::EXACT {
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                if x.is_zero() {
                    *x = S::zero();
                }
            }
        }
    }
    (m, pivots)
}

pub fn rank<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : rows·x = 0}`.
pub fn nullspace<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Mat<S> {
    let (r, pivots) = rref(rows, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = zeros(ncols);
        v[free] = S::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -r[i][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Some solution of `a·x = b`, or `None` when inconsistent.
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S], ncols: usize) -> Option<Vec<S>> {
    let aug: Mat<S> = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = zeros(ncols);
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[i][ncols].clone();
    }
    Some(x)
}

/// Indices of a maximal linearly independent subset of `rows`, greedy in order.
pub fn independent_rows<S: Scalar>(rows: &[Vec<S>], ncols: usize) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut basis: Mat<S> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        basis.push(r.clone());
        if rank(&basis, ncols) == basis.len() {
            chosen.push(i);
        } else {
            basis.pop();
        }
    }
    chosen
}

/// Orthogonal projector onto the row space of `basis` (rows need not be
/// independent).
pub fn projector<S: Scalar>(basis: &[Vec<S>], n: usize) -> Mat<S> {
    let idx = independent_rows(basis, n);
    let b: Mat<S> = idx.iter().map(|&i| basis[i].clone()).collect();
    if b.is_empty() {
        return vec![zeros(n); n];
    }
    let k = b.len();
    let gram: Mat<S> = b.iter().map(|r| b.iter().map(|s| dot(r, s)).collect()).collect();
    // coefficients C with gram·C = B, then P = Bᵀ C
    let mut cols: Vec<Vec<S>> = Vec::with_capacity(n);
    for j in 0..n {
        let rhs: Vec<S> = b.iter().map(|r| r[j].clone()).collect();
        cols.push(solve(&gram, &rhs, k).expect("gram matrix of independent rows is invertible"));
    }
    let mut p = vec![zeros::<S>(n); n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = S::zero();
            for t in 0..k {
                acc = acc + b[t][i].clone() * cols[j][t].clone();
            }
            p[i][j] = acc;
        }
    }
    p
}

/// Projector onto the orthogonal complement of the row space of `basis`.
pub fn complement_projector<S: Scalar>(basis: &[Vec<S>], n: usize) -> Mat<S> {
    let p = projector(basis, n);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let id = if i == j { S::one() } else { S::zero() };
                    id - p[i][j].clone()
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn q(v: i64) -> BigRational {
        BigRational::from_i64(v)
    }

    #[test]
    fn nullspace_of_plane() {
        let rows = vec![vec![q(1), q(1), q(1)]];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(dot(&rows[0], v).is_zero());
        }
    }

    #[test]
    fn solve_detects_inconsistency() {
        let a = vec![vec![1.0, 1.0], vec![2.0, 2.0]];
        assert!(solve(&a, &[1.0, 3.0], 2).is_none());
        let x = solve(&a, &[1.0, 2.0], 2).unwrap();
        assert!((x[0] + x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_is_exact_for_rationals() {
        let p = projector(&[vec![q(1), q(1)]], 2);
        let half = BigRational::new(1.into(), 2.into());
        assert!(p.iter().flatten().all(|x| *x == half));
        let c = complement_projector(&[vec![q(0), q(3)]], 2);
        assert_eq!(c, vec![vec![q(1), q(0)], vec![q(0), q(0)]]);
    }
}
