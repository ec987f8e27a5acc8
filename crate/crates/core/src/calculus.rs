//! Chain and sum rules for projectional coderivatives: constraint
//! qualifications, right-hand sides, and inclusion/equality certificates
//! against the directly computed left-hand side.

use serde::Serialize;

use crate::arrangement::{Arrangement, CELL_BUDGET};
use crate::cones::{cone_union_equal, ConeUnion};
use crate::error::{dim_err, Result, VakError};
use crate::expr::Expr;
use crate::geometry::ConvexPolyhedron;
use crate::linalg::{self, Mat};
use crate::maps::{concat, PolyMap, PosHomMap};
use crate::projcode::{self, projcode_polyhedral, smooth_jacobian, Restriction};
use crate::scalar::Scalar;
use crate::sets::FiniteUnionSet;

#[derive(Debug, Clone)]
pub struct RuleReport<S: Scalar = f64> {
    pub cq_holds: bool,
    /// A nonzero element of the CQ intersection when it fails.
    pub cq_witness: Option<Vec<S>>,
    pub rhs: Option<PosHomMap<S>>,
    pub lhs: Option<PosHomMap<S>>,
    pub inclusion_holds: Option<bool>,
    /// A lhs direction outside rhs when the inclusion fails.
    pub inclusion_witness: Option<Vec<S>>,
    /// Only populated under the hypotheses that make the rule an equation.
    pub equality_holds: Option<bool>,
    /// Intermediate points `w̄` (chain) or decompositions `(u_1, …, u_p)`.
    pub intermediate_points: Vec<Vec<S>>,
    /// Hypotheses taken from the caller rather than verified.
    pub assumptions: Vec<String>,
}

impl<S: Scalar> RuleReport<S> {
    fn failed_cq(witness: Option<Vec<S>>, points: Vec<Vec<S>>, assumptions: Vec<String>) -> Self {
        RuleReport {
            cq_holds: false,
            cq_witness: witness,
            rhs: None,
            lhs: None,
            inclusion_holds: None,
            inclusion_witness: None,
            equality_holds: None,
            intermediate_points: points,
            assumptions,
        }
    }

    /// Floating-point view for serialization.
    pub fn summary(&self) -> RuleSummary {
        let gens = |h: &Option<PosHomMap<S>>| h.as_ref().map(|h| h.graph().convert::<f64>().generators());
        RuleSummary {
            cq_holds: self.cq_holds,
            cq_witness: self.cq_witness.as_ref().map(|w| linalg::to_f64_vec(w)),
            rhs_generators: gens(&self.rhs),
            lhs_generators: gens(&self.lhs),
            inclusion_holds: self.inclusion_holds,
            inclusion_witness: self.inclusion_witness.as_ref().map(|w| linalg::to_f64_vec(w)),
            equality_holds: self.equality_holds,
            intermediate_points: self.intermediate_points.iter().map(|p| linalg::to_f64_vec(p)).collect(),
            assumptions: self.assumptions.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RuleSummary {
    pub cq_holds: bool,
    pub cq_witness: Option<Vec<f64>>,
    pub rhs_generators: Option<Mat<f64>>,
    pub lhs_generators: Option<Mat<f64>>,
    pub inclusion_holds: Option<bool>,
    pub inclusion_witness: Option<Vec<f64>>,
    pub equality_holds: Option<bool>,
    pub intermediate_points: Vec<Vec<f64>>,
    pub assumptions: Vec<String>,
}

const OSC_ASSUMED: &str = "outer semicontinuity of the component maps is taken from the representation (closed polyhedral graphs)";

/// `{w : (w, ū) ∈ gph S}` for a polyhedral map.
fn inverse_image<S: Scalar>(s: &PolyMap<S>, u: &[S]) -> Result<FiniteUnionSet<S>> {
    let (n, m) = (s.input_dim(), s.output_dim());
    let perm: Vec<usize> = (n..n + m).chain(0..n).collect();
    let flipped: Vec<ConvexPolyhedron<S>> = s.graph().pieces().iter().map(|p| p.permute(&perm)).collect();
    PolyMap::from_pieces(m, n, flipped)?.evaluate(u)
}

/// Slice rows of every piece of `gph S` at a fixed leading (or trailing)
/// block, as hyperplanes on the free block.
fn slice_rows<S: Scalar>(s: &PolyMap<S>, fixed: &[S], fixed_first: bool) -> Vec<(Vec<S>, S)> {
    let k = fixed.len();
    let mut out = Vec::new();
    for p in s.graph().pieces() {
        for (row, rhs) in p.a().iter().zip(p.b()).chain(p.c().iter().zip(p.d())) {
            let (fix, free) = if fixed_first { (&row[..k], &row[k..]) } else { (&row[row.len() - k..], &row[..row.len() - k]) };
            out.push((free.to_vec(), rhs.clone() - linalg::dot(fix, fixed)));
        }
    }
    out
}

/// One point per relatively open cell of the arrangement cut out by `rows`
/// on `base`. Normal cones of the sliced graphs are constant on each cell,
/// so unions over a continuum reduce to unions over these points.
fn cell_representatives<S: Scalar>(base: &ConvexPolyhedron<S>, rows: &[(Vec<S>, S)]) -> Result<Vec<Vec<S>>> {
    let mut arr = Arrangement::new();
    for (a, b) in rows {
        arr.add(a, b);
    }
    Ok(arr.cells(base, &|_| false, CELL_BUDGET)?.into_iter().map(|c| c.point).collect())
}

fn bounded_pieces<S: Scalar>(set: &FiniteUnionSet<S>) -> bool {
    set.pieces().iter().all(|p| p.is_bounded())
}

fn nonzero_in<S: Scalar>(k: &ConeUnion<S>) -> Option<Vec<S>> {
    k.generators().into_iter().find(|g| !linalg::is_zero_vec(g))
}

fn intersect_unions<S: Scalar>(a: &ConeUnion<S>, b: &ConeUnion<S>) -> Result<ConeUnion<S>> {
    let parts = b.pieces().iter().map(|q| a.intersect_cone(q)).collect::<Result<Vec<_>>>()?;
    ConeUnion::union_all(a.dim(), parts)
}

/// Intermediate set `S1|_X(x̄) ∩ S2⁻¹(ū)` and its cell representatives.
fn chain_intermediates<S: Scalar>(s1: &PolyMap<S>, s2: &PolyMap<S>, x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S]) -> Result<Vec<Vec<S>>> {
    if s1.output_dim() != s2.input_dim() {
        return Err(dim_err("composition inner dimension", s1.output_dim(), s2.input_dim()));
    }
    if !x_set.contains(xbar) {
        return Err(VakError::PointNotOnGraph);
    }
    let w_set = s1.evaluate(xbar)?.intersect(&inverse_image(s2, ubar)?)?;
    if w_set.is_empty() {
        return Err(VakError::PointNotOnGraph);
    }
    if !bounded_pieces(&w_set) {
        return Err(VakError::UnboundedIntermediate);
    }
    let mut rows = slice_rows(s1, xbar, true);
    rows.extend(slice_rows(s2, ubar, false));
    let mut reps: Vec<Vec<S>> = Vec::new();
    for piece in w_set.pieces() {
        for w in cell_representatives(piece, &rows)? {
            if !reps.iter().any(|r| linalg::vec_eq(r, &w)) {
                reps.push(w);
            }
        }
    }
    Ok(reps)
}

/// `D*S2(w̄|ū)(0) ∩ D*_X S1(x̄|w̄)⁻¹(0) = {0}` at every intermediate point.
/// Returns the intermediate points and the first violating direction.
pub fn chain_cq_check<S: Scalar>(s1: &PolyMap<S>, s2: &PolyMap<S>, x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S]) -> Result<(bool, Option<Vec<S>>, Vec<Vec<S>>)> {
    let reps = chain_intermediates(s1, s2, x_set, xbar, ubar)?;
    for w in &reps {
        let d2 = s2.coderivative(w, ubar)?.at_zero()?;
        let d1 = projcode_polyhedral(s1, x_set, xbar, w)?.map.preimage_of_zero()?;
        if let Some(v) = nonzero_in(&intersect_unions(&d2, &d1)?) {
            return Ok((false, Some(v), reps));
        }
    }
    Ok((true, None, reps))
}

/// `⋃_{w̄} D*_X S1(x̄|w̄) ∘ D*S2(w̄|ū)` (apply `D*S2` first).
pub fn chain_rhs<S: Scalar>(s1: &PolyMap<S>, s2: &PolyMap<S>, x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S]) -> Result<PosHomMap<S>> {
    let reps = chain_intermediates(s1, s2, x_set, xbar, ubar)?;
    chain_rhs_at(s1, s2, x_set, xbar, ubar, &reps)
}

fn chain_rhs_at<S: Scalar>(s1: &PolyMap<S>, s2: &PolyMap<S>, x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S], reps: &[Vec<S>]) -> Result<PosHomMap<S>> {
    let (m, n) = (s2.output_dim(), s1.input_dim());
    let mut parts = Vec::new();
    for w in reps {
        let outer = s2.coderivative(w, ubar)?;
        let inner = projcode_polyhedral(s1, x_set, xbar, w)?.map;
        parts.push(outer.compose(&inner)?.graph().clone());
    }
    PosHomMap::new(m, n, ConeUnion::union_all(m + n, parts)?)
}

/// Composition of already computed pieces, `inner ∘ outer` in the order
/// `y ↦ inner(outer(y))`; used when one factor is only available sampled.
pub fn chain_rhs_from_parts<S: Scalar>(outer: &PosHomMap<S>, inner: &PosHomMap<S>) -> Result<PosHomMap<S>> {
    outer.compose(inner)
}

fn compare<S: Scalar>(report: &mut RuleReport<S>, lhs: PosHomMap<S>, rhs: PosHomMap<S>, equality_applies: bool) -> Result<()> {
    let w = lhs.graph().subset_of(rhs.graph())?;
    report.inclusion_holds = Some(w.is_none());
    report.inclusion_witness = w;
    if equality_applies {
        report.equality_holds = Some(cone_union_equal(lhs.graph(), rhs.graph())?.equal);
    }
    report.lhs = Some(lhs);
    report.rhs = Some(rhs);
    Ok(())
}

fn is_affine_set<S: Scalar>(x: &FiniteUnionSet<S>) -> bool {
    matches!(x.pieces(), [p] if p.a().is_empty())
}

/// Chain rule for `S = S2 ∘ S1` relative to `X`: CQ, rhs, the exact lhs
/// `D*_X S(x̄|ū)`, and the inclusion. Equality is checked only when
/// `S1|_X` and `S2` are graph-convex and `X` is affine.
pub fn chain_verify<S: Scalar>(s1: &PolyMap<S>, s2: &PolyMap<S>, x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S]) -> Result<RuleReport<S>> {
    let assumptions = vec![OSC_ASSUMED.to_string()];
    let (cq, witness, reps) = chain_cq_check(s1, s2, x_set, xbar, ubar)?;
    if !cq {
        return Ok(RuleReport::failed_cq(witness, reps, assumptions));
    }
    let rhs = chain_rhs_at(s1, s2, x_set, xbar, ubar, &reps)?;
    let (composed, _) = s1.restrict(x_set)?.compose_graphs(s2)?;
    let lhs = projcode_polyhedral(&composed, x_set, xbar, ubar)?.map;
    let equality = s1.restrict(x_set)?.is_graph_convex() && s2.is_graph_convex() && is_affine_set(x_set);
    let mut report = RuleReport { cq_holds: true, intermediate_points: reps, assumptions, ..RuleReport::failed_cq(None, vec![], vec![]) };
    compare(&mut report, lhs, rhs, equality)?;
    Ok(report)
}

/// `∇F(x̄)ᵀz + N_X(x̄)`: an affine offset plus a cone union.
#[derive(Debug, Clone)]
pub struct ShiftedConeUnion {
    pub offset: Vec<f64>,
    pub cone: ConeUnion<f64>,
}

impl ShiftedConeUnion {
    pub fn contains(&self, v: &[f64]) -> bool {
        self.cone.contains(&linalg::sub(v, &self.offset))
    }
}

/// Coderivative of a smooth single-valued `F` restricted to `X`.
pub fn restricted_singlevalued_coderivative(f: &[Expr], x: &Restriction, xbar: &[f64], z: &[f64]) -> Result<ShiftedConeUnion> {
    if z.len() != f.len() {
        return Err(dim_err("z", f.len(), z.len()));
    }
    let n = xbar.len();
    let j = smooth_jacobian(f, xbar)?;
    let offset = linalg::mat_vec(&linalg::transpose(&j, n), z);
    let cone = match x {
        Restriction::Polyhedral(set) => {
            if !set.contains(xbar) {
                return Err(VakError::PointNotOnGraph);
            }
            set.limiting_normal_cone_at(xbar)?
        }
        Restriction::Chart(chart) => {
            if !chart.on_manifold(xbar) {
                return Err(VakError::PointNotOnGraph);
            }
            ConeUnion::from_cone(ConvexPolyhedron::subspace(n, chart.normal_basis(xbar)?)?)?
        }
    };
    Ok(ShiftedConeUnion { offset, cone })
}

/// Inner composition `S = S0 ∘ F` with affine `F(x) = Ax + c` relative
/// to a polyhedral `X`. `D*_X F(x̄)` is computed exactly as the projectional
/// coderivative of the affine map.
pub fn inner_composition_verify<S: Scalar>(s0: &PolyMap<S>, a: &[Vec<S>], c: &[S], x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S]) -> Result<RuleReport<S>> {
    let f = PolyMap::affine(a, c)?;
    if f.output_dim() != s0.input_dim() {
        return Err(dim_err("inner map output", s0.input_dim(), f.output_dim()));
    }
    let fx = linalg::add(&linalg::mat_vec(a, xbar), c);
    let mut assumptions = vec![OSC_ASSUMED.to_string()];
    let d_f = projcode_polyhedral(&f, x_set, xbar, &fx)?.map;
    let d_s0 = s0.coderivative(&fx, ubar)?;
    if let Some(v) = nonzero_in(&intersect_unions(&d_s0.at_zero()?, &d_f.preimage_of_zero()?)?) {
        return Ok(RuleReport::failed_cq(Some(v), vec![fx], assumptions));
    }
    let rhs = d_s0.compose(&d_f)?;
    let (composed, _) = f.restrict(x_set)?.compose_graphs(s0)?;
    let lhs = projcode_polyhedral(&composed, x_set, xbar, ubar)?.map;
    // regularity of zF|_X holds for affine F on convex X; S0 is regular when graph-convex
    let equality = s0.is_graph_convex() && is_affine_set(x_set);
    if equality {
        assumptions.push("regularity of zF|_X certified by affinity of F and convexity of X".into());
    }
    let mut report = RuleReport { cq_holds: true, intermediate_points: vec![fx], assumptions, ..RuleReport::failed_cq(None, vec![], vec![]) };
    compare(&mut report, lhs, rhs, equality)?;
    Ok(report)
}

/// Graph of `S_1 + … + S_p` as a polyhedral map.
pub fn sum_map<S: Scalar>(maps: &[PolyMap<S>]) -> Result<PolyMap<S>> {
    let first = maps.first().ok_or_else(|| VakError::DimensionMismatch("empty sum".into()))?;
    let (n, m) = (first.input_dim(), first.output_dim());
    if maps.iter().any(|s| s.input_dim() != n || s.output_dim() != m) {
        return Err(VakError::DimensionMismatch("summands must share dimensions".into()));
    }
    // (x, u_1, …, u_p) ↦ (x, Σ u_i)
    let p = maps.len();
    let dim = n + p * m;
    let mut map: Mat<S> = (0..n).map(|i| linalg::unit(dim, i)).collect();
    for j in 0..m {
        let mut r = linalg::zeros::<S>(dim);
        for i in 0..p {
            r[n + i * m + j] = S::one();
        }
        map.push(r);
    }
    let mut joint: Vec<ConvexPolyhedron<S>> = vec![ConvexPolyhedron::universe(n)];
    for (i, s) in maps.iter().enumerate() {
        let mut next = Vec::new();
        for acc in &joint {
            for piece in s.graph().pieces() {
                // piece over (x, u_i) embedded into (x, u_1, …, u_i)
                let lifted = piece.lift(0, 0);
                let mut perm: Vec<usize> = (0..n).collect();
                perm.extend((n + m..n + m + i * m).chain(n..n + m));
                let embedded = lifted.lift(0, i * m).permute(&perm);
                let joined = acc.lift(0, m).intersect_raw(&embedded)?;
                if !joined.is_empty() {
                    next.push(joined);
                }
            }
        }
        joint = next;
    }
    let pieces = joint.iter().map(|p| p.linear_image(&map)).collect::<Result<Vec<_>>>()?;
    PolyMap::from_pieces(n, m, pieces)
}

/// Decompositions `(u_1, …, u_p)` with `u_i ∈ S_i(x̄)`, `Σu_i = ū`, one per
/// cell of the slice arrangement.
fn decompositions<S: Scalar>(maps: &[PolyMap<S>], x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S]) -> Result<Vec<Vec<S>>> {
    if !x_set.contains(xbar) {
        return Err(VakError::PointNotOnGraph);
    }
    let m = ubar.len();
    let p = maps.len();
    let dim = p * m;
    let sum_rows: Mat<S> = (0..m)
        .map(|j| {
            let mut r = linalg::zeros::<S>(dim);
            for i in 0..p {
                r[i * m + j] = S::one();
            }
            r
        })
        .collect();
    let sum_set = ConvexPolyhedron::from_hrep(dim, vec![], vec![], sum_rows, ubar.to_vec())?;
    let mut bases: Vec<ConvexPolyhedron<S>> = vec![ConvexPolyhedron::universe(0)];
    let mut rows: Vec<(Vec<S>, S)> = Vec::new();
    for (i, s) in maps.iter().enumerate() {
        let values = s.evaluate(xbar)?;
        bases = bases.iter().flat_map(|b| values.pieces().iter().map(move |v| b.product(v))).collect();
        for (a, off) in slice_rows(s, xbar, true) {
            let mut r = linalg::zeros::<S>(dim);
            r[i * m..(i + 1) * m].clone_from_slice(&a);
            rows.push((r, off));
        }
    }
    let mut reps: Vec<Vec<S>> = Vec::new();
    for b in bases {
        let piece = b.intersect(&sum_set)?;
        if piece.is_empty() {
            continue;
        }
        if !piece.is_bounded() {
            return Err(VakError::UnboundedDecomposition);
        }
        for r in cell_representatives(&piece, &rows)? {
            if !reps.iter().any(|q| linalg::vec_eq(q, &r)) {
                reps.push(r);
            }
        }
    }
    if reps.is_empty() {
        return Err(VakError::PointNotOnGraph);
    }
    Ok(reps)
}

/// `{(v_1, …, v_p) : v_i ∈ K_i, Σ v_i ∈ L}` is `{0}`; returns a violating
/// tuple otherwise.
fn tuple_cq<S: Scalar>(ks: &[ConeUnion<S>], l: &ConeUnion<S>, n: usize) -> Result<Option<Vec<S>>> {
    let p = ks.len();
    let dim = p * n;
    let mut products: Vec<ConvexPolyhedron<S>> = vec![ConvexPolyhedron::universe(0)];
    for k in ks {
        products = products.iter().flat_map(|a| k.pieces().iter().map(move |q| a.product(q))).collect();
    }
    let sum_of = |row: &Vec<S>| -> Vec<S> { (0..dim).map(|c| row[c % n].clone()).collect() };
    for prod in &products {
        for lp in l.pieces() {
            let a: Mat<S> = lp.a().iter().map(sum_of).collect();
            let c: Mat<S> = lp.c().iter().map(sum_of).collect();
            let cone = ConvexPolyhedron::cone_from_hrep(dim, a, c)?;
            let meet = prod.intersect(&cone)?;
            if !meet.is_trivial_cone() {
                if let Some(v) = meet.cone_generators().into_iter().find(|g| !linalg::is_zero_vec(g)) {
                    return Ok(Some(v));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SumRule {
    One,
    Two,
}

fn sum_rule<S: Scalar>(rule: SumRule, maps: &[PolyMap<S>], x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S]) -> Result<RuleReport<S>> {
    let first = maps.first().ok_or_else(|| VakError::DimensionMismatch("empty sum".into()))?;
    let (n, m) = (first.input_dim(), first.output_dim());
    if x_set.dim() != n {
        return Err(dim_err("restriction set", n, x_set.dim()));
    }
    let assumptions = vec![OSC_ASSUMED.to_string()];
    let reps = decompositions(maps, x_set, xbar, ubar)?;
    let tangent = projcode::convex_tangent(x_set, xbar)?;
    let normal = x_set.limiting_normal_cone_at(xbar)?;
    let restricted: Vec<PolyMap<S>> = maps.iter().map(|s| s.restrict(x_set)).collect::<Result<_>>()?;
    let mut parts = Vec::new();
    for rep in &reps {
        let cods = (0..maps.len())
            .map(|i| {
                let ui = &rep[i * m..(i + 1) * m];
                match rule {
                    SumRule::One => maps[i].coderivative(xbar, ui),
                    SumRule::Two => restricted[i].coderivative(xbar, ui),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let at_zero = cods.iter().map(|h| h.at_zero()).collect::<Result<Vec<_>>>()?;
        let cq_target = match rule {
            SumRule::One => normal.linear_image(&linalg::identity::<S>(n).iter().map(|r| linalg::neg(r)).collect::<Mat<S>>())?,
            SumRule::Two => ConeUnion::zero(n),
        };
        if let Some(v) = tuple_cq(&at_zero, &cq_target, n)? {
            return Ok(RuleReport::failed_cq(Some(v), reps, assumptions));
        }
        let mut summands = cods;
        if rule == SumRule::One {
            // y ↦ N_X(x̄) for every y
            let mut pieces = Vec::new();
            for q in normal.pieces() {
                pieces.push(ConvexPolyhedron::universe(m).product(q));
            }
            summands.push(PosHomMap::new(m, n, ConeUnion::new(m + n, pieces)?)?);
        }
        parts.push(PosHomMap::sum(&summands)?.project_output(&tangent)?.graph().clone());
    }
    let rhs = PosHomMap::new(m, n, ConeUnion::union_all(m + n, parts)?)?;
    let lhs = projcode_polyhedral(&sum_map(&restricted)?, x_set, xbar, ubar)?.map;
    let convex = restricted.iter().all(|s| s.is_graph_convex());
    let equality = match rule {
        SumRule::One => convex && x_set.as_convex().is_some(),
        SumRule::Two => convex && is_affine_set(x_set),
    };
    let mut report = RuleReport { cq_holds: true, intermediate_points: reps, assumptions, ..RuleReport::failed_cq(None, vec![], vec![]) };
    compare(&mut report, lhs, rhs, equality)?;
    Ok(report)
}

/// Sum rule with `X` kept apart from the summands: CQ through
/// `Σ v_i ∈ −N_X(x̄)`, rhs `⋃ proj_{T_X(x̄)}(Σ D*S_i(x̄|u_i) + N_X(x̄))`.
pub fn sum_rule_1<S: Scalar>(maps: &[PolyMap<S>], x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S]) -> Result<RuleReport<S>> {
    sum_rule(SumRule::One, maps, x_set, xbar, ubar)
}

/// Sum rule with every summand restricted to `X`: CQ through
/// `Σ v_i = 0`, rhs `⋃ proj_{T_X(x̄)}(Σ D*S_i|_X(x̄|u_i))`.
pub fn sum_rule_2<S: Scalar>(maps: &[PolyMap<S>], x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S]) -> Result<RuleReport<S>> {
    sum_rule(SumRule::Two, maps, x_set, xbar, ubar)
}

/// `D*_X F` for an affine `F`, checked against the direct formula on a
/// sample of inputs; exposed for the outer-composition corollary.
pub fn linear_coderivative<S: Scalar>(a: &[Vec<S>]) -> Result<PosHomMap<S>> {
    let m = a.len();
    let n = a.first().map_or(0, |r| r.len());
    let at = linalg::transpose(a, n);
    let lin: Mat<S> = (0..m).map(|j| concat(&linalg::unit::<S>(m, j), &at.iter().map(|r| r[j].clone()).collect::<Vec<_>>())).collect();
    PosHomMap::new(m, n, ConeUnion::from_generators(m + n, vec![], lin)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: i64) -> crate::Rational {
        <crate::Rational as Scalar>::from_i64(v)
    }

    #[test]
    fn sum_map_of_two_halflines_is_constant() {
        let s1 = PolyMap::from_pieces(1, 1, vec![ConvexPolyhedron::from_hrep(2, vec![vec![q(1), q(-1)]], vec![q(0)], vec![], vec![]).unwrap()]).unwrap();
        let s2 = PolyMap::from_pieces(1, 1, vec![ConvexPolyhedron::from_hrep(2, vec![vec![q(-1), q(-1)]], vec![q(0)], vec![], vec![]).unwrap()]).unwrap();
        let s = sum_map(&[s1, s2]).unwrap();
        let expected = ConvexPolyhedron::from_hrep(2, vec![vec![q(0), q(-1)]], vec![q(0)], vec![], vec![]).unwrap();
        assert!(s.graph().pieces()[0].set_equal(&expected));
    }

    #[test]
    fn linear_coderivative_is_transpose() {
        let h = linear_coderivative(&[vec![1.0, 2.0]]).unwrap();
        assert!(h.contains(&[1.0], &[1.0, 2.0]));
        assert!(!h.contains(&[1.0], &[2.0, 1.0]));
    }

    #[test]
    fn offset_on_half_line() {
        let x = Restriction::Polyhedral(FiniteUnionSet::from_polyhedron(ConvexPolyhedron::orthant(1)));
        let r = restricted_singlevalued_coderivative(&[Expr::parse("x1").unwrap()], &x, &[0.0], &[1.0]).unwrap();
        assert!(r.contains(&[1.0]) && r.contains(&[-3.0]) && !r.contains(&[1.5]));
    }
}
