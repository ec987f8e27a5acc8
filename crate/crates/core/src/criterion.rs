//! Outer norms, the generalized Mordukhovich criterion, the equivalence
//! battery, modulus scans and a brute-force Lipschitz oracle.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arrangement::CELL_BUDGET;
use crate::cones::{cone_union_equal, project_cone_union, ConeUnion};
use crate::error::{Result, VakError};
use crate::geometry::ConvexPolyhedron;
use crate::linalg::{self, Mat};
use crate::lp::{self, LpOutcome};
use crate::maps::{concat, PolyMap, PosHomMap, SmoothGraphMap, ACTIVE_TOL};
use crate::projcode::{self, projcode_polyhedral, projcode_sampled, ProjCodeResult, Restriction, Route, SampledSource, SamplingConfig};
use crate::scalar::Scalar;
use crate::sets::FiniteUnionSet;

/// Support-enumeration budget per piece.
pub const OUTER_NORM_MAX_GENERATORS: usize = 14;
/// Random conic combinations used for the sampled lower bound.
pub const OUTER_NORM_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    EigenActiveSet,
    SampledBound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OuterNormResult {
    pub finite: bool,
    /// `f64::INFINITY` when not finite.
    pub value: f64,
    /// `(u*, x*)` attaining the value (or a ray `(0, x*)` when infinite).
    pub witness_ray: Option<Vec<f64>>,
    pub method: NormMethod,
    /// Largest ratio seen over random conic combinations.
    pub sampled_lower_bound: f64,
}

/// `|H|⁺ = sup{‖x*‖ : x* ∈ H(u*), ‖u*‖ ≤ 1}`.
///
/// Finiteness is decided exactly by an LP over each piece's generators.
/// The value maximizes `‖Xλ‖²/‖Yλ‖²` over `λ ≥ 0`: on every support with
/// independent `Y`-columns the interior stationary points are generalized
/// eigenvectors with positive entries, and the maximum sits on one of them.
pub fn outer_norm<S: Scalar>(h: &PosHomMap<S>) -> Result<OuterNormResult> {
    let m = h.input_dim();
    let mut best = 0.0f64;
    let mut witness: Option<Vec<f64>> = None;
    let mut gens_per_piece = Vec::new();
    for piece in h.graph().pieces() {
        let gens = piece.cone_generators();
        if let Some(ray) = vertical_ray(&gens, m) {
            return Ok(OuterNormResult {
                finite: false,
                value: f64::INFINITY,
                witness_ray: Some(linalg::to_f64_vec(&ray)),
                method: NormMethod::EigenActiveSet,
                sampled_lower_bound: f64::INFINITY,
            });
        }
        let g: Mat<f64> = gens.iter().map(|v| linalg::to_f64_vec(v)).collect();
        if g.len() > OUTER_NORM_MAX_GENERATORS {
            return Err(VakError::ScaleExceeded(format!("{} generators in one piece (limit {OUTER_NORM_MAX_GENERATORS})", g.len())));
        }
        if let Some((v, w)) = piece_norm(&g, m) {
            if v > best || witness.is_none() {
                best = best.max(v);
                witness = Some(w);
            }
        }
        gens_per_piece.push(g);
    }
    let bound = sampled_bound(&gens_per_piece, m, OUTER_NORM_SAMPLES, 0);
    Ok(OuterNormResult { finite: true, value: best, witness_ray: witness, method: NormMethod::EigenActiveSet, sampled_lower_bound: bound })
}

/// Lower bound only, for maps beyond the enumeration budget.
pub fn outer_norm_sampled<S: Scalar>(h: &PosHomMap<S>, samples: usize, seed: u64) -> Result<OuterNormResult> {
    let m = h.input_dim();
    let mut gens = Vec::new();
    for piece in h.graph().pieces() {
        let g = piece.cone_generators();
        if let Some(ray) = vertical_ray(&g, m) {
            return Ok(OuterNormResult { finite: false, value: f64::INFINITY, witness_ray: Some(linalg::to_f64_vec(&ray)), method: NormMethod::SampledBound, sampled_lower_bound: f64::INFINITY });
        }
        gens.push(g.iter().map(|v| linalg::to_f64_vec(v)).collect());
    }
    let b = sampled_bound(&gens, m, samples, seed);
    Ok(OuterNormResult { finite: true, value: b, witness_ray: None, method: NormMethod::SampledBound, sampled_lower_bound: b })
}

/// A conic combination `(0, x*)` with `x* ≠ 0`, found by LPs
/// `max ±x*_i  s.t.  λ ≥ 0, Σλ = 1, Yλ = 0`.
fn vertical_ray<S: Scalar>(gens: &[Vec<S>], m: usize) -> Option<Vec<S>> {
    let k = gens.len();
    if k == 0 {
        return None;
    }
    let dim = gens[0].len();
    let a: Mat<S> = (0..k).map(|j| linalg::neg(&linalg::unit::<S>(k, j))).collect();
    let b = linalg::zeros::<S>(k);
    let mut ce: Mat<S> = (0..m).map(|i| gens.iter().map(|g| g[i].clone()).collect()).collect();
    let mut de = linalg::zeros::<S>(m);
    ce.push(vec![S::one(); k]);
    de.push(S::one());
    for i in m..dim {
        for sign in [S::one(), -S::one()] {
            let c: Vec<S> = gens.iter().map(|g| g[i].clone() * sign.clone()).collect();
            if let LpOutcome::Optimal { x, value } = lp::maximize(&c, &a, &b, &ce, &de) {
                if value.is_pos() {
                    let mut ray = linalg::zeros::<S>(dim);
                    for (l, g) in x.iter().zip(gens) {
                        ray = linalg::axpy(&ray, l, g);
                    }
                    return Some(ray);
                }
            }
        }
    }
    None
}

fn piece_norm(gens: &[Vec<f64>], m: usize) -> Option<(f64, Vec<f64>)> {
    let k = gens.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |val: f64, lam: &[f64], support: &[usize]| {
        let mut z = linalg::zeros::<f64>(gens[0].len());
        for (l, &j) in lam.iter().zip(support) {
            z = linalg::axpy(&z, l, &gens[j]);
        }
        let ny = linalg::norm_f64(&z[..m]);
        if ny <= 1e-12 {
            return;
        }
        let z: Vec<f64> = z.iter().map(|v| v / ny).collect();
        if best.as_ref().is_none_or(|(b, _)| val > *b) {
            best = Some((val, z));
        }
    };
    for size in 1..=k.min(m) {
        for support in combinations(k, size) {
            let y = DMatrix::from_fn(m, size, |i, c| gens[support[c]][i]);
            let x = DMatrix::from_fn(gens[0].len() - m, size, |i, c| gens[support[c]][m + i]);
            let bmat = y.transpose() * &y;
            let amat = x.transpose() * &x;
            let Some(chol) = bmat.clone().cholesky() else { continue };
            if bmat.determinant().abs() < 1e-14 {
                continue;
            }
            let linv = chol.l().try_inverse()?;
            let c = &linv * amat * linv.transpose();
            let c = (&c + c.transpose()) * 0.5;
            let eig = c.symmetric_eigen();
            for e in 0..size {
                let v = eig.eigenvectors.column(e);
                let lam = linv.transpose() * v;
                let sign = if lam.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
                let lam: Vec<f64> = lam.iter().map(|l| l * sign).collect();
                let scale = lam.iter().fold(0.0f64, |a, l| a.max(l.abs()));
                if lam.iter().all(|l| *l >= -1e-10 * scale) {
                    consider(eig.eigenvalues[e].max(0.0).sqrt(), &lam, &support);
                }
            }
        }
    }
    best
}

fn combinations(k: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, k: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            rec(i + 1, k, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k, size, &mut Vec::new(), &mut out);
    out
}

fn sampled_bound(pieces: &[Mat<f64>], m: usize, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    let nonempty: Vec<&Mat<f64>> = pieces.iter().filter(|g| !g.is_empty()).collect();
    if nonempty.is_empty() {
        return 0.0;
    }
    for s in 0..samples {
        let g = nonempty[s % nonempty.len()];
        let mut z = linalg::zeros::<f64>(g[0].len());
        for v in g.iter() {
            // sparse combinations reach faces as well as interiors
            if rng.gen_bool(0.6) {
                z = linalg::axpy(&z, &rng.gen::<f64>(), v);
            }
        }
        let ny = linalg::norm_f64(&z[..m]);
        if ny > 1e-9 {
            best = best.max(linalg::norm_f64(&z[m..]) / ny);
        }
    }
    best
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReport {
    pub route: Route,
    pub lipschitz_like: bool,
    /// `lip_X S(x̄|ū)` (`+∞` when not Lipschitz-like).
    pub modulus: f64,
    pub outer_norm: OuterNormResult,
    /// Labeled booleans; the battery fills `b`–`f`.
    pub checks: BTreeMap<String, bool>,
    pub oracle_estimate: Option<f64>,
    pub witnesses: BTreeMap<String, Vec<f64>>,
    pub warnings: Vec<String>,
}

fn report_from<S: Scalar>(pc: &ProjCodeResult<S>, mut warnings: Vec<String>) -> Result<CriterionReport> {
    let zero_ok = pc.map.zero_at_zero()?;
    let norm = outer_norm(&pc.map)?;
    let mut witnesses = BTreeMap::new();
    if !zero_ok {
        if let Some(g) = pc.map.at_zero()?.generators().into_iter().find(|g| !linalg::is_zero_vec(g)) {
            witnesses.insert("zero_input_ray".into(), linalg::to_f64_vec(&g));
        }
    }
    warnings.extend(pc.warnings.iter().cloned());
    let mut checks = BTreeMap::new();
    checks.insert("f".into(), zero_ok);
    checks.insert("c".into(), norm.finite);
    Ok(CriterionReport {
        route: pc.route,
        lipschitz_like: zero_ok,
        modulus: if zero_ok { norm.value } else { f64::INFINITY },
        outer_norm: norm,
        checks,
        oracle_estimate: None,
        witnesses,
        warnings,
    })
}

/// Criterion for polyhedral `S` and `X` via the exact outer limit.
pub fn glm_criterion_polyhedral<S: Scalar>(s: &PolyMap<S>, x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S]) -> Result<CriterionReport> {
    let mut warnings = Vec::new();
    if x_set.as_convex().is_none() {
        warnings.push("restriction set is not convex: the criterion theorems do not cover it".into());
    }
    let pc = match projcode_polyhedral(s, x_set, xbar, ubar) {
        Err(VakError::NonconvexTangent) => {
            return Err(VakError::UnsupportedRestrictionSet("tangent cone of the restriction set is not convex at a nearby point".into()))
        }
        r => r?,
    };
    report_from(&pc, warnings)
}

/// Criterion for curved data via the sampling route.
pub fn glm_criterion_sampled(source: SampledSource<'_>, restriction: &Restriction, xbar: &[f64], ubar: &[f64], cfg: &SamplingConfig) -> Result<CriterionReport> {
    let pc = projcode_sampled(source, restriction, xbar, ubar, cfg)?;
    let mut warnings = vec!["sampled route: rays are certified limits, completeness is best-effort".to_string()];
    if let Restriction::Polyhedral(x) = restriction {
        if x.as_convex().is_none() {
            warnings.push("restriction set is not convex: the criterion theorems do not cover it".into());
        }
    }
    report_from(&pc, warnings)
}

/// Items (b)–(f) of the equivalence theorem on an affine restriction set,
/// each evaluated on its own.
pub fn equivalence_battery<S: Scalar>(s: &PolyMap<S>, x_affine: &ConvexPolyhedron<S>, xbar: &[S], ubar: &[S]) -> Result<CriterionReport> {
    let n = s.input_dim();
    if x_affine.is_empty() || !x_affine.b().is_empty() {
        return Err(VakError::UnsupportedRestrictionSet("battery needs an affine restriction set (equalities only)".into()));
    }
    let x_set = FiniteUnionSet::from_polyhedron(x_affine.clone());
    let tangent = x_affine.tangent_cone_at(xbar);
    let normal = ConeUnion::from_cone(tangent.polar_cone()?)?;
    let restricted = s.restrict(&x_set)?.coderivative(xbar, ubar)?;
    let at_zero = restricted.at_zero()?;

    let mut checks = BTreeMap::new();
    let mut witnesses = BTreeMap::new();
    // (b) proj_T D*S|_X(0) = {0}
    let b = restricted.project_output(&tangent)?.zero_at_zero()?;
    checks.insert("b".to_string(), b);
    // (d) D*S|_X(0) ∩ T = {0}
    let d_cone = at_zero.intersect_cone(&tangent)?;
    let d = d_cone.pieces().iter().all(|p| p.is_trivial_cone());
    if !d {
        if let Some(w) = d_cone.generators().into_iter().find(|g| !linalg::is_zero_vec(g)) {
            witnesses.insert("d".into(), linalg::to_f64_vec(&w));
        }
    }
    checks.insert("d".to_string(), d);
    // (e) D*S|_X(0) = N_X(x̄)
    let e_cert = cone_union_equal(&at_zero, &normal)?;
    if let Some((_, w)) = &e_cert.witness {
        witnesses.insert("e".into(), linalg::to_f64_vec(w));
    }
    checks.insert("e".to_string(), e_cert.equal);
    // (f) D*_X S(0) = {0} through the exact outer limit
    let pc = projcode_polyhedral(s, &x_set, xbar, ubar)?;
    let f = pc.map.zero_at_zero()?;
    checks.insert("f".to_string(), f);
    // (c) finite outer norm (generator LP, not the zero-slice test)
    let norm = outer_norm(&pc.map)?;
    checks.insert("c".to_string(), norm.finite);
    if let (false, Some(w)) = (norm.finite, &norm.witness_ray) {
        witnesses.insert("c".into(), w.clone());
    }
    let all: Vec<bool> = checks.values().cloned().collect();
    let mut warnings = Vec::new();
    if all.iter().any(|&v| v != all[0]) {
        warnings.push("battery booleans disagree".into());
    }
    debug_assert_eq!(tangent.dim(), n);
    Ok(CriterionReport {
        route: Route::ExactPolyhedral,
        lipschitz_like: f,
        modulus: if f { norm.value } else { f64::INFINITY },
        outer_norm: norm,
        checks,
        oracle_estimate: None,
        witnesses,
        warnings,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanViolation {
    pub point: Vec<f64>,
    pub local_norm: f64,
    /// `(u*, x*)` with `‖proj_T x*‖ > κ‖u*‖`.
    pub ray: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanReport {
    pub kappa: f64,
    pub points: usize,
    pub max_local_norm: f64,
    pub violations: Vec<ScanViolation>,
}

/// Checks `‖proj_{T_X(x)} x*‖ ≤ κ‖u*‖` for `x* ∈ D̂*S|_X(x|u)(u*)` at one
/// representative of every local cell within `radius` of the reference
/// pair. Each check is exact: the outer norm of the projected regular
/// coderivative is compared with `κ`.
pub fn modulus_inequality_scan<S: Scalar>(s: &PolyMap<S>, x_set: &FiniteUnionSet<S>, xbar: &[S], ubar: &[S], kappa: f64, radius: f64) -> Result<ScanReport> {
    let (n, m) = (s.input_dim(), s.output_dim());
    let restricted = s.restrict(x_set)?;
    let z = concat(xbar, ubar);
    if !restricted.graph().contains(&z) {
        return Err(VakError::PointNotOnGraph);
    }
    let g = restricted.graph();
    let rg = g.local_radius(&z);
    let rx = x_set.local_radius(xbar);
    let lim = S::from_f64(4.0 * radius);
    let mut r = if rx < rg { rx } else { rg.clone() };
    if lim < r {
        r = lim;
    }
    let scale = r / rg;
    let cells = g.local_cells(&z, &[], &scale, CELL_BUDGET)?;
    let mut report = ScanReport { kappa, points: cells.len(), max_local_norm: 0.0, violations: vec![] };
    for c in cells {
        let x = &c.point[..n];
        let t = projcode::convex_tangent(x_set, x)?;
        let k = ConeUnion::from_cone(g.regular_normal_cone_at(&c.point)?)?;
        let projected = project_cone_union(&t, &k)?;
        let h = PosHomMap::from_normal_cone(n, m, &projected)?;
        let norm = outer_norm(&h)?;
        report.max_local_norm = report.max_local_norm.max(norm.value);
        if norm.value > kappa + 1e-9 {
            report.violations.push(ScanViolation { point: linalg::to_f64_vec(&c.point), local_norm: norm.value, ray: norm.witness_ray.unwrap_or_default() });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy)]
pub enum OracleSource<'a> {
    Poly(&'a PolyMap<f64>),
    Smooth(&'a SmoothGraphMap),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleResult {
    pub estimate: f64,
    pub pairs_used: usize,
    pub empty_slices: usize,
}

/// Lower estimate of `lip_X S(x̄|ū)` from sampled pairs `x, x′ ∈ X ∩ B_ρ(x̄)`
/// and `u′ ∈ S(x′) ∩ B_σ(ū)`: the largest `d(u′, S(x))/‖x′ − x‖`.
#[allow(clippy::too_many_arguments)]
pub fn lip_oracle(source: OracleSource<'_>, restriction: &Restriction, xbar: &[f64], ubar: &[f64], rho: f64, sigma: f64, pairs: usize, seed: u64) -> Result<OracleResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = OracleResult { estimate: 0.0, pairs_used: 0, empty_slices: 0 };
    let mut attempts = 0;
    while out.pairs_used < pairs && attempts < 20 * pairs.max(1) {
        attempts += 1;
        let (Some(x), Some(x2)) = (sample_in_x(restriction, xbar, rho, &mut rng)?, sample_in_x(restriction, xbar, rho, &mut rng)?) else { continue };
        let dx = linalg::norm_f64(&linalg::sub(&x2, &x));
        if dx < 1e-12 {
            continue;
        }
        let target = linalg::add(ubar, &ball_point(&mut rng, ubar.len(), sigma));
        let Some(u2) = project_onto_value(source, &x2, &target)? else {
            out.empty_slices += 1;
            continue;
        };
        if linalg::norm_f64(&linalg::sub(&u2, ubar)) > sigma {
            out.empty_slices += 1;
            continue;
        }
        let mut cands = vec![u2];
        if let OracleSource::Poly(p) = source {
            cands.extend(box_vertices(p, &x2, ubar, sigma)?);
        }
        for u2 in cands {
            let Some(p) = project_onto_value(source, &x, &u2)? else { continue };
            let d = linalg::norm_f64(&linalg::sub(&u2, &p));
            out.estimate = out.estimate.max(d / dx);
        }
        out.pairs_used += 1;
    }
    Ok(out)
}

/// Vertices of `S(x′) ∩ (ū + σ/√m·[−1, 1]^m)`: the distance to a convex
/// piece of `S(x)` is convex in `u′`, so these carry the sup over the box.
fn box_vertices(s: &PolyMap<f64>, x2: &[f64], ubar: &[f64], sigma: f64) -> Result<Vec<Vec<f64>>> {
    let h = sigma / (ubar.len() as f64).sqrt();
    let lo: Vec<f64> = ubar.iter().map(|u| u - h).collect();
    let hi: Vec<f64> = ubar.iter().map(|u| u + h).collect();
    let bx = ConvexPolyhedron::boxed(&lo, &hi)?;
    let mut out = Vec::new();
    for piece in s.evaluate(x2)?.pieces() {
        out.extend(piece.intersect(&bx)?.vrep().vertices.iter().cloned());
    }
    Ok(out)
}

fn ball_point(rng: &mut ChaCha8Rng, dim: usize, r: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if linalg::norm_f64(&v) <= 1.0 {
            return v.iter().map(|x| x * r).collect();
        }
    }
}

fn sample_in_x(r: &Restriction, xbar: &[f64], rho: f64, rng: &mut ChaCha8Rng) -> Result<Option<Vec<f64>>> {
    let z = linalg::add(xbar, &ball_point(rng, xbar.len(), rho));
    let p = match r {
        Restriction::Polyhedral(x) => nearest(x.pieces(), &z)?,
        Restriction::Chart(c) => c.retract(&z).ok(),
    };
    Ok(p.filter(|p| linalg::norm_f64(&linalg::sub(p, xbar)) <= rho))
}

fn nearest(pieces: &[ConvexPolyhedron<f64>], z: &[f64]) -> Result<Option<Vec<f64>>> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for p in pieces {
        let q = p.project_point(z)?;
        let d = linalg::norm_f64(&linalg::sub(&q, z));
        if best.as_ref().is_none_or(|(b, _)| d < *b) {
            best = Some((d, q));
        }
    }
    Ok(best.map(|b| b.1))
}

/// Nearest point of `S(x)` to `v` (exact for polyhedral maps; Gauss–Newton
/// on the violated constraints for smooth ones).
fn project_onto_value(source: OracleSource<'_>, x: &[f64], v: &[f64]) -> Result<Option<Vec<f64>>> {
    match source {
        OracleSource::Poly(p) => nearest(p.evaluate(x)?.pieces(), v),
        OracleSource::Smooth(g) => Ok(smooth_project(g, x, v)),
    }
}

fn smooth_project(g: &SmoothGraphMap, x: &[f64], v: &[f64]) -> Option<Vec<f64>> {
    let n = g.n;
    let mut u = v.to_vec();
    for _ in 0..100 {
        let z = concat(x, &u);
        let vals = g.values(&z).ok()?;
        let viol: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.0).collect();
        if viol.iter().all(|&i| vals[i] <= ACTIVE_TOL * 1e-3) {
            return Some(u);
        }
        let grads = g.gradients(&z).ok()?;
        let j = DMatrix::from_fn(viol.len(), g.m, |r, c| grads[viol[r]][n + c]);
        let f = nalgebra::DVector::from_iterator(viol.len(), viol.iter().map(|&i| vals[i]));
        let step = j.svd(true, true).solve(&f, 1e-14).ok()?;
        for (ui, s) in u.iter_mut().zip(step.iter()) {
            *ui -= s;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(rays: Vec<Vec<f64>>, lin: Vec<Vec<f64>>) -> PosHomMap {
        PosHomMap::new(1, 1, ConeUnion::from_generators(2, rays, lin).unwrap()).unwrap()
    }

    #[test]
    fn identity_has_norm_one() {
        let r = outer_norm(&map(vec![], vec![vec![1.0, 1.0]])).unwrap();
        assert!(r.finite && (r.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vertical_line_is_infinite() {
        let r = outer_norm(&map(vec![], vec![vec![0.0, 1.0]])).unwrap();
        assert!(!r.finite && r.value.is_infinite());
    }

    #[test]
    fn two_ray_union() {
        let g = ConeUnion::new(
            2,
            vec![ConvexPolyhedron::cone(2, vec![vec![1.0, 0.0]], vec![]).unwrap(), ConvexPolyhedron::cone(2, vec![vec![1.0, -1.0]], vec![]).unwrap()],
        )
        .unwrap();
        let r = outer_norm(&PosHomMap::new(1, 1, g).unwrap()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        let w = r.witness_ray.unwrap();
        assert!((w[0] - 1.0).abs() < 1e-12 && (w[1] + 1.0).abs() < 1e-12);
        assert!(r.sampled_lower_bound <= r.value + 1e-6);
    }

    #[test]
    fn conic_interior_maximum() {
        // cone spanned by (1,0,0) and (0,1,1) in (u*1, u*2, x*): sup at λ=(0,1)
        let g = ConeUnion::from_generators(3, vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]], vec![]).unwrap();
        let h = PosHomMap::new(2, 1, g).unwrap();
        let r = outer_norm(&h).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }
}
