use std::collections::{BTreeSet, VecDeque};

use super::ConvexPolyhedron;
use crate::error::{Result, VakError};
use crate::linalg::{self, dot};
use crate::scalar::Scalar;

/// Default cap on the number of enumerated faces.
pub const FACE_BUDGET: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FaceDescriptor<S> {
    /// Inequality rows (of the polyhedron's H-representation) tight on the face.
    pub active_inequality_indices: Vec<usize>,
    pub affine_hull_dim: usize,
    pub relative_interior_point: Vec<S>,
}

impl<S: Scalar> ConvexPolyhedron<S> {
    /// Every nonempty face, the polyhedron itself first.
    pub fn faces(&self) -> Result<Vec<FaceDescriptor<S>>> {
        self.faces_with_budget(FACE_BUDGET)
    }

    pub fn faces_with_budget(&self, budget: usize) -> Result<Vec<FaceDescriptor<S>>> {
        if self.is_empty() {
            return Ok(vec![]);
        }
        let v = self.vrep().clone();
        let m = self.a.len();
        // tight[i] = (vertex indices, ray indices) on which row i is tight
        let tight_v: Vec<BTreeSet<usize>> = (0..m)
            .map(|i| (0..v.vertices.len()).filter(|&k| (dot(&self.a[i], &v.vertices[k]) - self.b[i].clone()).is_zero()).collect())
            .collect();
        let tight_r: Vec<BTreeSet<usize>> = (0..m)
            .map(|i| (0..v.rays.len()).filter(|&k| dot(&self.a[i], &v.rays[k]).is_zero()).collect())
            .collect();
        let closure = |verts: &BTreeSet<usize>, rays: &BTreeSet<usize>| -> Vec<usize> {
            (0..m).filter(|&i| verts.is_subset(&tight_v[i]) && rays.is_subset(&tight_r[i])).collect()
        };
        let all_v: BTreeSet<usize> = (0..v.vertices.len()).collect();
        let all_r: BTreeSet<usize> = (0..v.rays.len()).collect();

        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut out = Vec::new();
        let mut queue: VecDeque<(BTreeSet<usize>, BTreeSet<usize>)> = VecDeque::new();
        let root = closure(&all_v, &all_r);
        seen.insert(root.clone());
        queue.push_back((all_v, all_r));
        while let Some((fv, fr)) = queue.pop_front() {
            let active = closure(&fv, &fr);
            out.push(self.describe(&v, &fv, &fr, active.clone()));
            if out.len() > budget {
                return Err(VakError::ScaleExceeded(format!("face lattice exceeds {budget} nodes")));
            }
            for j in 0..m {
                if active.contains(&j) {
                    continue;
                }
                let nv: BTreeSet<usize> = fv.intersection(&tight_v[j]).cloned().collect();
                if nv.is_empty() {
                    continue;
                }
                let nr: BTreeSet<usize> = fr.intersection(&tight_r[j]).cloned().collect();
                let act = closure(&nv, &nr);
                if seen.insert(act) {
                    queue.push_back((nv, nr));
                }
            }
        }
        Ok(out)
    }

    fn describe(
        &self,
        v: &super::VRep<S>,
        fv: &BTreeSet<usize>,
        fr: &BTreeSet<usize>,
        active: Vec<usize>,
    ) -> FaceDescriptor<S> {
        let verts: Vec<&Vec<S>> = fv.iter().map(|&k| &v.vertices[k]).collect();
        let k = S::from_i64(verts.len() as i64);
        let mut p = linalg::zeros(self.dim);
        for x in &verts {
            p = linalg::add(&p, x);
        }
        p = p.into_iter().map(|x| x / k.clone()).collect();
        for &r in fr {
            p = linalg::add(&p, &v.rays[r]);
        }
        let mut dirs: Vec<Vec<S>> = verts.iter().skip(1).map(|x| linalg::sub(x, verts[0])).collect();
        dirs.extend(fr.iter().map(|&r| v.rays[r].clone()));
        dirs.extend(v.lineality.iter().cloned());
        FaceDescriptor {
            active_inequality_indices: active,
            affine_hull_dim: linalg::rank(&dirs, self.dim),
            relative_interior_point: p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_faces() {
        let p = ConvexPolyhedron::boxed(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let f = p.faces().unwrap();
        assert_eq!(f.len(), 9);
        assert_eq!(f.iter().filter(|x| x.affine_hull_dim == 1).count(), 4);
        assert_eq!(f.iter().filter(|x| x.affine_hull_dim == 0).count(), 4);
    }

    #[test]
    fn orthant_faces() {
        let f = ConvexPolyhedron::<f64>::orthant(2).faces().unwrap();
        assert_eq!(f.len(), 4);
    }

    #[test]
    fn budget_enforced() {
        let p = ConvexPolyhedron::boxed(&[0.0; 3], &[1.0; 3]).unwrap();
        assert!(matches!(p.faces_with_budget(5), Err(VakError::ScaleExceeded(_))));
    }
}
