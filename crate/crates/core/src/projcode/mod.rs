//! Projectional coderivatives `D*_X S(x̄|ū)`: the outer limit of
//! `proj_{T_X(x)×R^m} N_{gph S|_X}(x, u)` as `(x, u) → (x̄, ū)` along the
//! restricted graph.

mod sampled;

use std::collections::BTreeMap;

pub use sampled::{projcode_sampled, Restriction, SampledSource, SamplingConfig};

use crate::arrangement::{in_closure, CELL_BUDGET};
use crate::cones::{project_cone_union, ConeUnion, EqualityCertificate};
use crate::error::{dim_err, Result, VakError};
use crate::expr::Expr;
use crate::geometry::ConvexPolyhedron;
use crate::linalg::{self, Mat};
use crate::manifold::ManifoldChart;
use crate::maps::{concat, PolyMap, PosHomMap};
use crate::scalar::Scalar;
use crate::sets::FiniteUnionSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    ExactPolyhedral,
    ManifoldFixedPoint,
    Sampled,
}

#[derive(Debug, Clone)]
pub struct ProjCodeResult<S: Scalar = f64> {
    pub map: PosHomMap<S>,
    pub route: Route,
    pub diagnostics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

/// Tangent cone of a restriction set at `x`, required to be convex.
pub(crate) fn convex_tangent<S: Scalar>(x_set: &FiniteUnionSet<S>, x: &[S]) -> Result<ConvexPolyhedron<S>> {
    let t = x_set.tangent_cone_at(x)?;
    match t.pieces() {
        [] => Err(VakError::PointNotOnGraph),
        [one] => Ok(one.clone()),
        _ => Err(VakError::NonconvexTangent),
    }
}

/// Exact outer limit for polyhedral `S` and `X`.
///
/// Near `(x̄, ū)` the restricted graph coincides with its tangent cone, so
/// the local cells of the arrangement formed by the graph's and `X`'s
/// tangent rows carry constant regular normal cones and constant `T_X`.
/// At a point of cell `c0` the limiting normal cone is the union of the
/// regular cones of all cells `c1` whose closure contains `c0`; projecting
/// with `T_X` of `c0` and taking the union over `c0` gives the outer limit.
pub fn projcode_polyhedral<S: Scalar>(s: &PolyMap<S>, x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S]) -> Result<ProjCodeResult<S>> {
    let (n, m) = (s.input_dim(), s.output_dim());
    if x_set.dim() != n {
        return Err(dim_err("restriction set", n, x_set.dim()));
    }
    if xbar.len() != n || ubar.len() != m {
        return Err(dim_err("reference point", n + m, xbar.len() + ubar.len()));
    }
    let restricted = s.restrict(x_set)?;
    let z = concat(xbar, ubar);
    if !restricted.graph().contains(&z) {
        return Err(VakError::PointNotOnGraph);
    }
    let g = restricted.graph();

    // X's tangent rows become extra hyperplanes so T_X is constant per cell
    let mut extra: Mat<S> = Vec::new();
    for p in x_set.pieces().iter().filter(|p| p.contains(xbar)) {
        let t = p.tangent_cone_at(xbar);
        for r in t.a().iter().chain(t.c()) {
            let mut row = r.clone();
            row.extend(linalg::zeros::<S>(m));
            extra.push(row);
        }
    }
    let rg = g.local_radius(&z);
    let rx = x_set.local_radius(xbar);
    let scale = if rx < rg { rx / rg } else { S::one() };
    let cells = g.local_cells(&z, &extra, &scale, CELL_BUDGET)?;

    let mut tangents: Vec<ConvexPolyhedron<S>> = Vec::new();
    let mut normals: Vec<ConvexPolyhedron<S>> = Vec::new();
    let mut t_of = Vec::with_capacity(cells.len());
    let mut k_of = Vec::with_capacity(cells.len());
    for c in &cells {
        let t = convex_tangent(x_set, &c.point[..n])?;
        let k = g.regular_normal_cone_at(&c.point)?;
        t_of.push(index_of(&mut tangents, t));
        k_of.push(index_of(&mut normals, k));
    }
    let mut done = std::collections::BTreeSet::new();
    let mut images = Vec::new();
    for (i0, c0) in cells.iter().enumerate() {
        for (i1, c1) in cells.iter().enumerate() {
            if !in_closure(&c0.signs, &c1.signs) || !done.insert((t_of[i0], k_of[i1])) {
                continue;
            }
            let k = ConeUnion::from_cone(normals[k_of[i1]].clone())?;
            images.push(project_cone_union(&tangents[t_of[i0]], &k)?);
        }
    }
    let union = ConeUnion::union_all(n + m, images)?;
    let map = PosHomMap::from_normal_cone(n, m, &union)?;
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("cells".into(), cells.len() as f64);
    diagnostics.insert("projected_pairs".into(), done.len() as f64);
    Ok(ProjCodeResult { map, route: Route::ExactPolyhedral, diagnostics, warnings: vec![] })
}

fn index_of<S: Scalar>(pool: &mut Vec<ConvexPolyhedron<S>>, p: ConvexPolyhedron<S>) -> usize {
    match pool.iter().position(|q| q.set_equal(&p)) {
        Some(i) => i,
        None => {
            pool.push(p);
            pool.len() - 1
        }
    }
}

/// Both fixed-point forms on a manifold restriction set.
#[derive(Debug, Clone)]
pub struct FixedPointForms<S: Scalar = f64> {
    /// `proj_{T_X(x̄)} D*S|_X(x̄|ū)`.
    pub projection: PosHomMap<S>,
    /// `D*S|_X(x̄|ū) ∩ T_X(x̄)`.
    pub intersection: PosHomMap<S>,
    pub certificate: EqualityCertificate<S>,
}

/// Fixed-point forms for an already computed restricted coderivative.
pub fn fixed_point_forms<S: Scalar>(restricted: &PosHomMap<S>, tangent: &ConvexPolyhedron<S>) -> Result<FixedPointForms<S>> {
    let projection = restricted.project_output(tangent)?;
    let intersection = restricted.intersect_output(tangent)?;
    let certificate = projection.equal(&intersection)?;
    if !certificate.equal {
        return Err(VakError::FormsDisagree(format!("witness {:?}", certificate.witness.as_ref().map(|w| linalg::to_f64_vec(&w.1)))));
    }
    Ok(FixedPointForms { projection, intersection, certificate })
}

/// Fixed-point route for a polyhedral map on an affine chart: the
/// restricted coderivative is computed exactly, then projected and
/// intersected with the tangent space; the two forms must agree.
pub fn projcode_manifold_fixed_point<S: Scalar>(
    s: &PolyMap<S>,
    chart: &ManifoldChart,
    xbar: &[S],
    ubar: &[S],
) -> Result<(ProjCodeResult<S>, FixedPointForms<S>)> {
    let x_poly = chart
        .as_polyhedron::<S>()
        .ok_or_else(|| VakError::UnsupportedRestrictionSet("exact fixed-point route needs an affine chart".into()))??;
    // full-rank check at the reference point
    chart.jacobian(&linalg::to_f64_vec(xbar))?;
    if !x_poly.contains(xbar) {
        return Err(VakError::PointNotOnGraph);
    }
    let x_set = FiniteUnionSet::from_polyhedron(x_poly.clone());
    let restricted = s.restrict(&x_set)?.coderivative(xbar, ubar)?;
    let tangent = x_poly.tangent_cone_at(xbar);
    let forms = fixed_point_forms(&restricted, &tangent)?;
    let result = ProjCodeResult { map: forms.projection.clone(), route: Route::ManifoldFixedPoint, diagnostics: BTreeMap::new(), warnings: vec![] };
    Ok((result, forms))
}

/// Jacobian of a smooth single-valued `F` in the `x` variables.
pub(crate) fn smooth_jacobian(f: &[Expr], x: &[f64]) -> Result<Mat<f64>> {
    f.iter().map(|e| e.grad(x, x.len()).map(|(_, g)| g)).collect()
}

/// `proj_{T_X(x̄)}(∇F(x̄)ᵀ y)` for smooth single-valued `F` on a manifold.
pub fn projcode_smooth_single_valued(f: &[Expr], chart: &ManifoldChart, xbar: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    if y.len() != f.len() {
        return Err(dim_err("y", f.len(), y.len()));
    }
    let p = chart.tangent_projector(xbar)?;
    let j = smooth_jacobian(f, xbar)?;
    let jt_y = linalg::mat_vec(&linalg::transpose(&j, xbar.len()), y);
    Ok(linalg::mat_vec(&p, &jt_y))
}

/// The whole map `y ↦ proj_{T_X(x̄)}(∇F(x̄)ᵀ y)` as a subspace graph.
pub fn smooth_single_valued_map(f: &[Expr], chart: &ManifoldChart, xbar: &[f64]) -> Result<PosHomMap<f64>> {
    let m = f.len();
    let n = xbar.len();
    let mut lin = Vec::new();
    for j in 0..m {
        let e = linalg::unit::<f64>(m, j);
        lin.push(concat(&e, &projcode_smooth_single_valued(f, chart, xbar, &e)?));
    }
    PosHomMap::new(m, n, ConeUnion::from_generators(m + n, vec![], lin)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_point_reduces_to_coderivative() {
        let s = PolyMap::from_pieces(1, 1, vec![ConvexPolyhedron::from_hrep(2, vec![vec![1.0, -1.0]], vec![0.0], vec![], vec![]).unwrap()]).unwrap();
        let x = FiniteUnionSet::from_polyhedron(ConvexPolyhedron::boxed(&[-1.0], &[1.0]).unwrap());
        let pc = projcode_polyhedral(&s, &x, &[0.0], &[0.0]).unwrap();
        let cd = s.coderivative(&[0.0], &[0.0]).unwrap();
        assert!(pc.map.equal(&cd).unwrap().equal);
    }

    #[test]
    fn smooth_single_valued_on_circle() {
        let chart = ManifoldChart::global(2, vec![Expr::parse("(- (+ (pow x1 2) (pow x2 2)) 1)").unwrap()]).unwrap();
        let f = vec![Expr::parse("(+ x1 x2)").unwrap()];
        let v = projcode_smooth_single_valued(&f, &chart, &[1.0, 0.0], &[3.0]).unwrap();
        assert!(v[0].abs() < 1e-12 && (v[1] - 3.0).abs() < 1e-12);
    }
}
