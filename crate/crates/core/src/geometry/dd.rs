//! Double description: extreme rays and lineality of `{y : M y ≥ 0, E y = 0}`,
//! plus the H↔V conversions built on it.

use fixedbitset::FixedBitSet;

use super::VRep;
use crate::linalg::{self, dot, Mat};
use crate::scalar::Scalar;

pub(crate) struct ConeGens<S> {
    pub rays: Mat<S>,
    pub lineality: Mat<S>,
}

struct Ray<S> {
    v: Vec<S>,
    zeros: FixedBitSet,
}

/// Generators of `{y ∈ R^dim : ineq·y ≥ 0, eq·y = 0}`. Rays are returned
/// modulo the lineality space (orthogonal to it) and normalized.
pub(crate) fn dd_cone<S: Scalar>(dim: usize, ineq: &[Vec<S>], eq: &[Vec<S>]) -> ConeGens<S> {
    let total = eq.len() + ineq.len();
    let mut lin: Mat<S> = linalg::identity(dim);
    let mut rays: Vec<Ray<S>> = Vec::new();
    let constraints: Vec<(&Vec<S>, bool)> = eq.iter().map(|r| (r, true)).chain(ineq.iter().map(|r| (r, false))).collect();

    for (k, (row, is_eq)) in constraints.iter().enumerate() {
        let vals: Vec<S> = lin.iter().map(|l| dot(row, l)).collect();
        if let Some(p) = vals.iter().position(|v| !v.is_zero()) {
            let mut l0 = lin.remove(p);
            let mut a0 = vals[p].clone();
            if a0.is_neg() {
                l0 = linalg::neg(&l0);
                a0 = -a0;
            }
            let vals: Vec<S> = lin.iter().map(|l| dot(row, l)).collect();
            for (l, v) in lin.iter_mut().zip(vals) {
                if !v.is_zero() {
                    *l = linalg::axpy(l, &(-(v / a0.clone())), &l0);
                }
            }
            for r in rays.iter_mut() {
                let v = dot(row, &r.v);
                if !v.is_zero() {
                    r.v = linalg::axpy(&r.v, &(-(v / a0.clone())), &l0);
                    S::normalize_dir(&mut r.v);
                }
                r.zeros.insert(k);
            }
            if !*is_eq {
                let mut zeros = FixedBitSet::with_capacity(total);
                zeros.insert_range(0..k);
                S::normalize_dir(&mut l0);
                rays.push(Ray { v: l0, zeros });
            }
            continue;
        }

        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut next: Vec<Ray<S>> = Vec::new();
        let vals: Vec<S> = rays.iter().map(|r| dot(row, &r.v)).collect();
        for (i, v) in vals.iter().enumerate() {
            match v.sign() {
                1 => pos.push(i),
                -1 => neg.push(i),
                _ => {}
            }
        }
        let pointed_dim = dim - lin.len();
        let mut new_rays: Vec<Ray<S>> = Vec::new();
        for &p in &pos {
            for &nidx in &neg {
                let mut common = rays[p].zeros.clone();
                common.intersect_with(&rays[nidx].zeros);
                if common.count_ones(..) + 2 < pointed_dim {
                    continue;
                }
                let adjacent = rays.iter().enumerate().all(|(i, r)| i == p || i == nidx || !common.is_subset(&r.zeros));
                if !adjacent {
                    continue;
                }
                let vp = vals[p].clone();
                let vn = vals[nidx].clone();
                // vp > 0 > vn: combination vp·n − vn·p lies on the hyperplane
                let mut v = linalg::sub(&linalg::scale(&rays[nidx].v, &vp), &linalg::scale(&rays[p].v, &vn));
                S::normalize_dir(&mut v);
                if linalg::is_zero_vec(&v) {
                    continue;
                }
                let mut zeros = common;
                zeros.insert(k);
                new_rays.push(Ray { v, zeros });
            }
        }
        for (i, r) in rays.into_iter().enumerate() {
            match vals[i].sign() {
                0 => {
                    let mut r = r;
                    r.zeros.insert(k);
                    next.push(r);
                }
                1 if !*is_eq => next.push(r),
                _ => {}
            }
        }
        next.extend(new_rays);
        rays = dedup_rays(next);
    }

    // canonical lineality basis and rays orthogonal to it
    let (lin_r, _) = linalg::rref(&lin, dim);
    let mut lineality: Mat<S> = lin_r;
    for l in lineality.iter_mut() {
        S::normalize_dir(l);
    }
    let comp = if lineality.is_empty() { None } else { Some(linalg::complement_projector(&lineality, dim)) };
    let mut out: Mat<S> = Vec::new();
    for r in rays {
        let mut v = match &comp {
            Some(p) => linalg::mat_vec(p, &r.v),
            None => r.v,
        };
        S::normalize_dir(&mut v);
        if !linalg::is_zero_vec(&v) && !out.iter().any(|o| linalg::vec_eq(o, &v)) {
            out.push(v);
        }
    }
    ConeGens { rays: out, lineality }
}

fn dedup_rays<S: Scalar>(rays: Vec<Ray<S>>) -> Vec<Ray<S>> {
    let mut out: Vec<Ray<S>> = Vec::with_capacity(rays.len());
    for r in rays {
        if let Some(o) = out.iter_mut().find(|o| linalg::vec_eq(&o.v, &r.v)) {
            o.zeros.union_with(&r.zeros);
        } else {
            out.push(r);
        }
    }
    out
}

/// Vertices, rays and lineality of `{A z ≤ b, C z = d}`; `None` when empty.
pub(crate) fn h_to_v<S: Scalar>(dim: usize, a: &[Vec<S>], b: &[S], c: &[Vec<S>], d: &[S]) -> Option<VRep<S>> {
    // homogenize with y = (t, z): b t − A z ≥ 0, d t − C z = 0, t ≥ 0
    let mut ineq: Mat<S> = Vec::with_capacity(a.len() + 1);
    let mut t_row = linalg::zeros(dim + 1);
    t_row[0] = S::one();
    ineq.push(t_row);
    for (row, bi) in a.iter().zip(b) {
        let mut r = Vec::with_capacity(dim + 1);
        r.push(bi.clone());
        r.extend(row.iter().map(|x| -x.clone()));
        ineq.push(r);
    }
    let eq: Mat<S> = c
        .iter()
        .zip(d)
        .map(|(row, di)| {
            let mut r = Vec::with_capacity(dim + 1);
            r.push(di.clone());
            r.extend(row.iter().map(|x| -x.clone()));
            r
        })
        .collect();
    let gens = dd_cone(dim + 1, &ineq, &eq);
    let lineality: Mat<S> = gens.lineality.iter().map(|l| l[1..].to_vec()).collect();
    let comp = if lineality.is_empty() { None } else { Some(linalg::complement_projector(&lineality, dim)) };
    let mut vertices: Mat<S> = Vec::new();
    let mut rays: Mat<S> = Vec::new();
    for r in &gens.rays {
        if r[0].is_pos() {
            let t = r[0].clone();
            let mut v: Vec<S> = r[1..].iter().map(|x| x.clone() / t.clone()).collect();
            if let Some(p) = &comp {
                v = linalg::mat_vec(p, &v);
            }
            if !vertices.iter().any(|o| linalg::vec_eq(o, &v)) {
                vertices.push(v);
            }
        } else {
            let mut v = r[1..].to_vec();
            S::normalize_dir(&mut v);
            if !linalg::is_zero_vec(&v) && !rays.iter().any(|o| linalg::vec_eq(o, &v)) {
                rays.push(v);
            }
        }
    }
    if vertices.is_empty() {
        return None;
    }
    Some(VRep { vertices, rays, lineality })
}

/// Minimal H-representation `(A, b, C, d)` of `conv V + cone R + span L`.
/// `V` must be nonempty.
#[allow(clippy::type_complexity)]
pub(crate) fn v_to_h<S: Scalar>(dim: usize, v: &VRep<S>) -> (Mat<S>, Vec<S>, Mat<S>, Vec<S>) {
    // valid inequalities (β, α): β − α·v ≥ 0, −α·r ≥ 0, α·l = 0
    let mut ineq: Mat<S> = Vec::new();
    for p in &v.vertices {
        let mut r = Vec::with_capacity(dim + 1);
        r.push(S::one());
        r.extend(p.iter().map(|x| -x.clone()));
        ineq.push(r);
    }
    for ray in &v.rays {
        let mut r = Vec::with_capacity(dim + 1);
        r.push(S::zero());
        r.extend(ray.iter().map(|x| -x.clone()));
        ineq.push(r);
    }
    let eq: Mat<S> = v
        .lineality
        .iter()
        .map(|l| {
            let mut r = Vec::with_capacity(dim + 1);
            r.push(S::zero());
            r.extend(l.iter().cloned());
            r
        })
        .collect();
    let gens = dd_cone(dim + 1, &ineq, &eq);
    let mut c = Vec::new();
    let mut d = Vec::new();
    for l in &gens.lineality {
        let mut alpha = l[1..].to_vec();
        if linalg::is_zero_vec(&alpha) {
            continue;
        }
        let mut beta = l[0].clone();
        S::normalize_row(&mut alpha, &mut beta);
        c.push(alpha);
        d.push(beta);
    }
    // reduce facet normals modulo the equalities so that rows are canonical
    // on the affine hull; rows that vanish are implied by the equalities
    let gram: Mat<S> = c.iter().map(|x| c.iter().map(|y| dot(x, y)).collect()).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for r in &gens.rays {
        let mut alpha = r[1..].to_vec();
        let mut beta = r[0].clone();
        if !c.is_empty() {
            let rhs: Vec<S> = c.iter().map(|ci| dot(ci, &alpha)).collect();
            let mu = linalg::solve(&gram, &rhs, c.len()).expect("equality rows are independent");
            for (i, m) in mu.iter().enumerate() {
                alpha = linalg::axpy(&alpha, &(-m.clone()), &c[i]);
                beta = beta - m.clone() * d[i].clone();
            }
        }
        if linalg::is_zero_vec(&alpha) {
            continue;
        }
        S::normalize_row(&mut alpha, &mut beta);
        if !a.iter().zip(&b).any(|(x, y): (&Vec<S>, &S)| linalg::vec_eq(x, &alpha) && y.approx_eq(&beta)) {
            a.push(alpha);
            b.push(beta);
        }
    }
    (a, b, c, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthant_rays() {
        let g = dd_cone::<f64>(2, &[vec![1.0, 0.0], vec![0.0, 1.0]], &[]);
        assert_eq!(g.rays.len(), 2);
        assert!(g.lineality.is_empty());
    }

    #[test]
    fn halfplane_has_lineality() {
        let g = dd_cone::<f64>(2, &[vec![1.0, 0.0]], &[]);
        assert_eq!(g.rays, vec![vec![1.0, 0.0]]);
        assert_eq!(g.lineality.len(), 1);
    }

    #[test]
    fn square_vertices() {
        let a = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        let v = h_to_v(2, &a, &[1.0, 1.0, 0.0, 0.0], &[], &[]).unwrap();
        assert_eq!(v.vertices.len(), 4);
        assert!(v.rays.is_empty());
    }

    #[test]
    fn infeasible_is_none() {
        let a = vec![vec![1.0], vec![-1.0]];
        assert!(h_to_v(1, &a, &[0.0, -1.0], &[], &[]).is_none());
    }
}
