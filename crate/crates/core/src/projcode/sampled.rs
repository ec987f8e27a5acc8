//! Sampling estimator of the projectional coderivative for curved data.
//!
//! Graph points are drawn on each active-set stratum inside annuli
//! `[γr, r]` with `r = r0·γ^j`. At every sample the regular normal cone is
//! projected exactly; unit generator directions are clustered per stratum
//! and only clusters that persist over the three smallest radii are kept.
//! Every emitted ray is thus a limit direction; completeness is
//! best-effort.

use std::collections::BTreeMap;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr_free::gaussian;

use super::{convex_tangent, ProjCodeResult, Route};
use crate::cones::{project_cone_union, ConeUnion};
use crate::error::{dim_err, Result, VakError};
use crate::expr::Expr;
use crate::geometry::ConvexPolyhedron;
use crate::linalg::{self, Mat};
use crate::manifold::{to_dmatrix, ManifoldChart, RANK_TOL};
use crate::maps::{concat, PolyMap, PosHomMap, SmoothGraphMap};
use crate::sets::FiniteUnionSet;

#[derive(Debug, Clone, Copy)]
pub enum SampledSource<'a> {
    Smooth(&'a SmoothGraphMap),
    Poly(&'a PolyMap<f64>),
}

#[derive(Debug, Clone)]
pub enum Restriction {
    Polyhedral(FiniteUnionSet<f64>),
    Chart(ManifoldChart),
}

impl Restriction {
    fn dim(&self) -> usize {
        match self {
            Restriction::Polyhedral(x) => x.dim(),
            Restriction::Chart(c) => c.ambient_dim(),
        }
    }

    fn tangent(&self, x: &[f64]) -> Result<ConvexPolyhedron<f64>> {
        match self {
            Restriction::Polyhedral(s) => convex_tangent(s, x),
            Restriction::Chart(c) => c.tangent_space(x),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SamplingConfig {
    pub r0: f64,
    pub gamma: f64,
    /// Radii `r0·γ^j` for `j = 0..=levels`.
    pub levels: usize,
    pub points_per_radius: usize,
    pub seed: u64,
    pub angle_tol_deg: f64,
    /// Minimum cluster size at each of the three smallest radii.
    pub min_support: usize,
    /// Representative components below this are set to zero.
    pub snap_tol: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { r0: 0.1, gamma: 0.1, levels: 6, points_per_radius: 60, seed: 0, angle_tol_deg: 2.0, min_support: 2, snap_tol: 1e-6 }
    }
}

const FEAS_TOL: f64 = 1e-8;

/// A graph constraint over `z = (x, u)`: smooth, or affine `a·z − b`.
#[derive(Debug, Clone)]
enum Constraint {
    Smooth(Expr),
    Affine(Vec<f64>, f64),
}

impl Constraint {
    fn eval(&self, z: &[f64], n: usize) -> Result<f64> {
        match self {
            Constraint::Smooth(e) => e.eval(z, n),
            Constraint::Affine(a, b) => Ok(linalg::dot(a, z) - b),
        }
    }
    fn grad(&self, z: &[f64], n: usize) -> Result<Vec<f64>> {
        match self {
            Constraint::Smooth(e) => e.grad(z, n).map(|(_, g)| g),
            Constraint::Affine(a, _) => Ok(a.clone()),
        }
    }
    /// Normalized affine form, for duplicate detection.
    fn affine_key(&self, n: usize, len: usize) -> Option<Vec<f64>> {
        let (a, b) = match self {
            Constraint::Affine(a, b) => (a.clone(), *b),
            Constraint::Smooth(e) => {
                let (c, k) = e.linear_form(n, len - n)?;
                let conv = |q: &num::BigRational| num::ToPrimitive::to_f64(q).unwrap_or(f64::NAN);
                (c.iter().map(conv).collect(), -conv(&k))
            }
        };
        let norm = linalg::norm_f64(&a);
        if norm == 0.0 {
            return None;
        }
        let mut key: Vec<f64> = a.iter().map(|v| v / norm).collect();
        key.push(b / norm);
        Some(key)
    }
}

struct System {
    n: usize,
    len: usize,
    ineqs: Vec<Constraint>,
    eqs: Vec<Constraint>,
    /// Rows of the restriction set among `ineqs` (index, row over `x`).
    x_rows: Vec<(usize, Vec<f64>)>,
    x_eqs: Mat<f64>,
}

impl System {
    fn build(g: &SmoothGraphMap, r: &Restriction, warnings: &mut Vec<String>) -> Result<Self> {
        let (n, m) = (g.n, g.m);
        let len = n + m;
        let pairs = g.complementary_pairs();
        let mut eqs: Vec<Constraint> = Vec::new();
        let mut skip = vec![false; g.inequalities.len()];
        for &(i, j) in &pairs {
            if skip[i] || skip[j] {
                continue;
            }
            skip[i] = true;
            skip[j] = true;
            eqs.push(Constraint::Smooth(g.inequalities[i].clone()));
        }
        let mut ineqs: Vec<Constraint> = g.inequalities.iter().enumerate().filter(|(i, _)| !skip[*i]).map(|(_, e)| Constraint::Smooth(e.clone())).collect();
        let mut x_rows = Vec::new();
        let mut x_eqs = Vec::new();
        match r {
            Restriction::Polyhedral(x) => {
                let p = x.as_convex().ok_or_else(|| VakError::UnsupportedRestrictionSet("sampling needs a convex polyhedral restriction set".into()))?;
                for (a, b) in p.a().iter().zip(p.b()) {
                    let c = Constraint::Affine(lift_row(a, m), *b);
                    let key = c.affine_key(n, len);
                    match ineqs.iter().position(|q| q.affine_key(n, len).zip(key.as_ref()).is_some_and(|(k1, k2)| linalg::vec_eq(&k1, k2))) {
                        Some(i) => x_rows.push((i, a.clone())),
                        None => {
                            x_rows.push((ineqs.len(), a.clone()));
                            ineqs.push(c);
                        }
                    }
                }
                for (c, d) in p.c().iter().zip(p.d()) {
                    eqs.push(Constraint::Affine(lift_row(c, m), *d));
                    x_eqs.push(c.clone());
                }
            }
            Restriction::Chart(chart) => {
                for e in chart.components() {
                    eqs.push(Constraint::Smooth(e.clone()));
                }
            }
        }
        if !pairs.is_empty() {
            warnings.push(format!("{} complementary inequality pair(s) treated as equalities", pairs.len()));
        }
        Ok(System { n, len, ineqs, eqs, x_rows, x_eqs })
    }

    /// `T_X` on the stratum where exactly `idx` is active.
    fn tangent(&self, r: &Restriction, idx: &[usize], z: &[f64]) -> Result<ConvexPolyhedron<f64>> {
        match r {
            Restriction::Chart(c) => c.tangent_space(&z[..self.n]),
            Restriction::Polyhedral(_) => {
                let rows = self.x_rows.iter().filter(|(i, _)| idx.contains(i)).map(|(_, a)| a.clone()).collect();
                ConvexPolyhedron::cone_from_hrep(self.n, rows, self.x_eqs.clone())
            }
        }
    }

    fn residual(&self, idx: &[usize], z: &[f64]) -> Result<DVector<f64>> {
        let mut v: Vec<f64> = idx.iter().map(|&i| self.ineqs[i].eval(z, self.n)).collect::<Result<_>>()?;
        for e in &self.eqs {
            v.push(e.eval(z, self.n)?);
        }
        Ok(DVector::from_vec(v))
    }

    fn gradients(&self, idx: &[usize], z: &[f64]) -> Result<(Mat<f64>, Mat<f64>)> {
        let rays = idx.iter().map(|&i| self.ineqs[i].grad(z, self.n)).collect::<Result<_>>()?;
        let lin = self.eqs.iter().map(|e| e.grad(z, self.n)).collect::<Result<_>>()?;
        Ok((rays, lin))
    }

    /// Gauss–Newton with minimum-norm steps onto `{h_idx = 0, eqs = 0}`.
    fn newton(&self, idx: &[usize], start: &[f64], tol: f64) -> Option<Vec<f64>> {
        let mut z = start.to_vec();
        if idx.is_empty() && self.eqs.is_empty() {
            return Some(z);
        }
        for _ in 0..60 {
            let f = self.residual(idx, &z).ok()?;
            if f.norm() <= tol {
                return Some(z);
            }
            let (mut rows, lin) = self.gradients(idx, &z).ok()?;
            rows.extend(lin);
            let j = to_dmatrix(&rows, self.len);
            let step = j.svd(true, true).solve(&f, 1e-14).ok()?;
            for (zi, s) in z.iter_mut().zip(step.iter()) {
                *zi -= s;
            }
            if z.iter().any(|v| !v.is_finite()) {
                return None;
            }
        }
        let f = self.residual(idx, &z).ok()?;
        (f.norm() <= tol).then_some(z)
    }

    fn licq(&self, idx: &[usize], z: &[f64]) -> Result<bool> {
        Ok(self.sigma_min(idx, z)? > RANK_TOL)
    }

    fn sigma_min(&self, idx: &[usize], z: &[f64]) -> Result<f64> {
        let (mut rows, lin) = self.gradients(idx, z)?;
        rows.extend(lin);
        if rows.is_empty() {
            return Ok(f64::INFINITY);
        }
        if rows.len() > self.len {
            return Ok(0.0);
        }
        let sv = to_dmatrix(&rows, self.len).singular_values();
        Ok(sv.iter().cloned().fold(f64::INFINITY, f64::min))
    }

    fn normal_cone(&self, idx: &[usize], z: &[f64]) -> Result<ConvexPolyhedron<f64>> {
        let (rays, lin) = self.gradients(idx, z)?;
        ConvexPolyhedron::cone(self.len, rays, lin)
    }

    /// `proj_{T × R^m}` of the normal cone for a subspace tangent `t`.
    fn projected_normal_cone(&self, idx: &[usize], z: &[f64], t: &ConvexPolyhedron<f64>) -> Result<ConvexPolyhedron<f64>> {
        let p = linalg::projector(&t.cone_generators(), self.n);
        let image = |g: Vec<f64>| -> Option<Vec<f64>> {
            let mut v = linalg::mat_vec(&p, &g[..self.n]);
            v.extend_from_slice(&g[self.n..]);
            // below the sample's certified accuracy the image is round-off
            (linalg::norm_f64(&v) > 1e-6 * linalg::norm_f64(&g)).then_some(v)
        };
        let (rays, lin) = self.gradients(idx, z)?;
        ConvexPolyhedron::cone(self.len, rays.into_iter().filter_map(image).collect(), lin.into_iter().filter_map(image).collect())
    }
}

fn lift_row(a: &[f64], m: usize) -> Vec<f64> {
    let mut r = a.to_vec();
    r.resize(r.len() + m, 0.0);
    r
}

/// One accepted sample: stratum label, `T_X` there and the regular
/// normal cone of the restricted graph.
struct Sample {
    stratum: usize,
    tangent: ConvexPolyhedron<f64>,
    normal: ConvexPolyhedron<f64>,
    /// Image under `proj_{T_X}` when `T_X` is a subspace, built from the raw
    /// gradients so that nearly cancelled generators do not survive.
    projected: Option<ConvexPolyhedron<f64>>,
}

#[derive(Default)]
struct Stats {
    attempts: usize,
    accepted: usize,
    converged: usize,
    licq_dropped: usize,
    uncertified: usize,
}

/// Lower approximation of `D*_X S(x̄|ū)` from persistent sampled limits.
pub fn projcode_sampled(source: SampledSource<'_>, restriction: &Restriction, xbar: &[f64], ubar: &[f64], cfg: &SamplingConfig) -> Result<ProjCodeResult<f64>> {
    let (n, m) = match source {
        SampledSource::Smooth(g) => (g.n, g.m),
        SampledSource::Poly(p) => (p.input_dim(), p.output_dim()),
    };
    if restriction.dim() != n {
        return Err(dim_err("restriction set", n, restriction.dim()));
    }
    if xbar.len() != n || ubar.len() != m {
        return Err(dim_err("reference point", n + m, xbar.len() + ubar.len()));
    }
    if cfg.levels < 2 || !(0.0 < cfg.gamma && cfg.gamma < 1.0) || cfg.r0 <= 0.0 {
        return Err(VakError::InsufficientSamples("need at least three radii with 0 < γ < 1".into()));
    }
    let zbar = concat(xbar, ubar);
    let mut warnings = Vec::new();
    let mut stats = Stats::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let radii: Vec<f64> = (0..=cfg.levels).map(|j| cfg.r0 * cfg.gamma.powi(j as i32)).collect();

    let (samples, reference) = match source {
        SampledSource::Smooth(g) => smooth_samples(g, restriction, &zbar, &radii, cfg, &mut rng, &mut stats, &mut warnings)?,
        SampledSource::Poly(p) => poly_samples(p, restriction, &zbar, &radii, cfg, &mut rng, &mut stats)?,
    };

    let t_bar = restriction.tangent(xbar)?;
    let mut images: Vec<ConeUnion<f64>> = Vec::new();
    if let Some(k) = reference {
        images.push(project_cone_union(&t_bar, &ConeUnion::from_cone(k)?)?);
    }

    // directions per (stratum, level), projected with the tangent at the sample
    let last = radii.len() - 1;
    let tracked = [last - 2, last - 1, last];
    let mut dirs: BTreeMap<(usize, usize), Vec<Vec<f64>>> = BTreeMap::new();
    let mut pieces_at_last: Vec<(usize, Vec<Vec<f64>>)> = Vec::new();
    for (level, level_samples) in samples.iter().enumerate() {
        if !tracked.contains(&level) {
            continue;
        }
        for s in level_samples {
            let family = s.stratum;
            {
                let proj = match &s.projected {
                    Some(p) => ConeUnion::from_cone(p.clone())?,
                    None => project_cone_union(&s.tangent, &ConeUnion::from_cone(s.normal.clone())?)?,
                };
                for piece in proj.pieces() {
                    let gens: Vec<Vec<f64>> = piece.cone_generators().iter().map(|g| linalg::normalized(g)).collect();
                    dirs.entry((family, level)).or_default().extend(gens.iter().cloned());
                    if level == last {
                        pieces_at_last.push((family, gens));
                    }
                }
            }
        }
    }
    if stats.accepted == 0 && images.is_empty() {
        return Err(VakError::InsufficientSamples("no graph points were sampled near the reference pair".into()));
    }

    let tol = cfg.angle_tol_deg.to_radians();
    let mut clusters: BTreeMap<usize, Vec<Cluster>> = BTreeMap::new();
    let families: std::collections::BTreeSet<usize> = dirs.keys().map(|k| k.0).collect();
    let mut dropped_clusters = 0usize;
    for fam in families {
        let per_level: Vec<Vec<Cluster>> = tracked.iter().map(|&l| cluster(dirs.get(&(fam, l)).map_or(&[][..], |v| v), tol)).collect();
        let mut keep = Vec::new();
        for c in &per_level[2] {
            let persists = per_level[..2].iter().all(|lvl| lvl.iter().any(|d| d.support >= cfg.min_support && angle(&d.rep, &c.rep) <= tol));
            if persists && c.support >= cfg.min_support {
                keep.push(c.clone());
            } else {
                dropped_clusters += 1;
            }
        }
        clusters.insert(fam, keep);
    }

    // pieces: distinct persistent-cluster signatures at the smallest radius
    let mut signatures: std::collections::BTreeSet<(usize, Vec<usize>)> = std::collections::BTreeSet::new();
    for (fam, gens) in &pieces_at_last {
        let cl = &clusters[fam];
        let mut sig = Vec::new();
        let mut ok = true;
        for g in gens {
            match cl.iter().position(|c| angle(&c.rep, g) <= tol) {
                Some(i) => sig.push(i),
                None => ok = false,
            }
        }
        if ok {
            sig.sort_unstable();
            sig.dedup();
            signatures.insert((*fam, sig));
        }
    }
    let mut cone_pieces = Vec::new();
    for (fam, sig) in &signatures {
        let rays: Mat<f64> = sig.iter().map(|&i| snap(&clusters[fam][i].rep, cfg.snap_tol)).collect();
        cone_pieces.push(ConvexPolyhedron::cone(n + m, rays, vec![])?);
    }
    images.push(ConeUnion::new(n + m, cone_pieces)?);
    let union = ConeUnion::union_all(n + m, images)?;
    let map = PosHomMap::from_normal_cone(n, m, &union)?;

    if stats.converged > 0 && stats.licq_dropped * 10 > stats.converged {
        warnings.push(format!("{} of {} samples dropped for LICQ failure; result may be unreliable", stats.licq_dropped, stats.converged));
    }
    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("attempts".into(), stats.attempts as f64);
    diagnostics.insert("accepted".into(), stats.accepted as f64);
    diagnostics.insert("licq_dropped".into(), stats.licq_dropped as f64);
    diagnostics.insert("uncertified".into(), stats.uncertified as f64);
    diagnostics.insert("persistent_pieces".into(), signatures.len() as f64);
    diagnostics.insert("dropped_clusters".into(), dropped_clusters as f64);
    diagnostics.insert("smallest_radius".into(), radii[last]);
    Ok(ProjCodeResult { map, route: Route::Sampled, diagnostics, warnings })
}

type Sampled = (Vec<Vec<Sample>>, Option<ConvexPolyhedron<f64>>);

#[allow(clippy::too_many_arguments)]
fn smooth_samples(
    g: &SmoothGraphMap,
    restriction: &Restriction,
    zbar: &[f64],
    radii: &[f64],
    cfg: &SamplingConfig,
    rng: &mut ChaCha8Rng,
    stats: &mut Stats,
    warnings: &mut Vec<String>,
) -> Result<Sampled> {
    let sys = System::build(g, restriction, warnings)?;
    let n = sys.n;
    let vals: Vec<f64> = sys.ineqs.iter().map(|c| c.eval(zbar, n)).collect::<Result<_>>()?;
    let eq_ok = sys.eqs.iter().map(|c| c.eval(zbar, n)).collect::<Result<Vec<f64>>>()?.iter().all(|v| v.abs() <= FEAS_TOL);
    if vals.iter().any(|&v| v > FEAS_TOL) || !eq_ok {
        return Err(VakError::PointNotOnGraph);
    }
    let active: Vec<usize> = (0..vals.len()).filter(|&i| vals[i].abs() <= FEAS_TOL).collect();
    if active.len() > 12 {
        return Err(VakError::ScaleExceeded(format!("{} active constraints", active.len())));
    }
    let reference = if sys.licq(&active, zbar)? {
        Some(sys.normal_cone(&active, zbar)?)
    } else {
        warnings.push("constraint gradients are dependent at the reference pair; its own cone is covered only through limits".into());
        None
    };
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut level = Vec::new();
        for mask in 0u32..(1 << active.len()) {
            let idx: Vec<usize> = active.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &i)| i).collect();
            for _ in 0..cfg.points_per_radius {
                stats.attempts += 1;
                let d = random_unit(rng, sys.len);
                let rho = rng.gen_range(cfg.gamma * r..=r);
                let start = linalg::axpy(zbar, &rho, &d);
                let tol = (1e-9 * r).max(1e-15);
                let Some(z) = sys.newton(&idx, &start, tol) else { continue };
                let dist = linalg::norm_f64(&linalg::sub(&z, zbar));
                if !(dist >= 0.5 * cfg.gamma * r && dist <= 2.0 * r) {
                    continue;
                }
                // remaining constraints strictly inactive
                let ok = (0..sys.ineqs.len()).filter(|i| !idx.contains(i)).all(|i| sys.ineqs[i].eval(&z, n).map(|v| v < -1e-3 * tol).unwrap_or(false));
                if !ok {
                    continue;
                }
                if let Restriction::Chart(c) = restriction {
                    if !c.in_region(&z[..n]) {
                        continue;
                    }
                }
                stats.converged += 1;
                let sigma = sys.sigma_min(&idx, &z)?;
                if sigma <= RANK_TOL {
                    stats.licq_dropped += 1;
                    continue;
                }
                // ‖h‖/σ_min bounds the distance to the stratum; nearly
                // dependent gradients make a small residual meaningless
                if sys.residual(&idx, &z)?.norm() / sigma > 1e-6 * r {
                    stats.uncertified += 1;
                    continue;
                }
                stats.accepted += 1;
                let tangent = sys.tangent(restriction, &idx, &z)?;
                let projected = match restriction {
                    Restriction::Chart(_) => Some(sys.projected_normal_cone(&idx, &z, &tangent)?),
                    Restriction::Polyhedral(_) => None,
                };
                level.push(Sample { stratum: mask as usize, tangent, normal: sys.normal_cone(&idx, &z)?, projected });
            }
        }
        out.push(level);
    }
    Ok((out, reference))
}

fn poly_samples(
    p: &PolyMap<f64>,
    restriction: &Restriction,
    zbar: &[f64],
    radii: &[f64],
    cfg: &SamplingConfig,
    rng: &mut ChaCha8Rng,
    stats: &mut Stats,
) -> Result<Sampled> {
    let n = p.input_dim();
    let x_set = match restriction {
        Restriction::Polyhedral(x) => x.clone(),
        Restriction::Chart(c) => FiniteUnionSet::from_polyhedron(
            c.as_polyhedron::<f64>().ok_or_else(|| VakError::UnsupportedRestrictionSet("polyhedral maps need a polyhedral or affine restriction".into()))??,
        ),
    };
    let g = p.restrict(&x_set)?;
    let graph = g.graph();
    if !graph.contains(zbar) {
        return Err(VakError::PointNotOnGraph);
    }
    // strata: relative interiors of the faces of each piece's tangent cone.
    // Near the reference pair the data coincide with their tangent cones, so
    // cones at a sample are evaluated at its unit direction (scale-free).
    let local = FiniteUnionSet::new(graph.dim(), graph.pieces().iter().filter(|q| q.contains(zbar)).map(|q| q.tangent_cone_at(zbar)).collect())?;
    let tx = convex_tangent(&x_set, &zbar[..n])?;
    let mut strata: Vec<Mat<f64>> = Vec::new();
    for t in local.pieces() {
        for f in t.faces()? {
            strata.push(t.face_polyhedron(&f.active_inequality_indices)?.cone_generators());
        }
    }
    let reference = Some(graph.regular_normal_cone_at(zbar)?);
    let mut out = Vec::with_capacity(radii.len());
    for _ in radii {
        let mut level = Vec::new();
        for (si, gens) in strata.iter().enumerate() {
            if gens.is_empty() {
                continue;
            }
            for _ in 0..cfg.points_per_radius {
                stats.attempts += 1;
                let mut d = linalg::zeros::<f64>(graph.dim());
                for gv in gens {
                    d = linalg::axpy(&d, &rng.gen_range(0.1..1.0), gv);
                }
                let norm = linalg::norm_f64(&d);
                if norm == 0.0 {
                    continue;
                }
                let d: Vec<f64> = d.iter().map(|v| v / norm).collect();
                stats.converged += 1;
                if !local.contains(&d) {
                    continue;
                }
                stats.accepted += 1;
                level.push(Sample { stratum: si, tangent: tx.tangent_cone_at(&d[..n]), normal: local.regular_normal_cone_at(&d)?, projected: None });
            }
        }
        out.push(level);
    }
    Ok((out, reference))
}

#[derive(Debug, Clone)]
struct Cluster {
    rep: Vec<f64>,
    sum: Vec<f64>,
    support: usize,
}

/// Greedy angular clustering in canonical (lexicographic) input order.
fn cluster(dirs: &[Vec<f64>], tol: f64) -> Vec<Cluster> {
    let mut sorted: Vec<&Vec<f64>> = dirs.iter().collect();
    sorted.sort_by(|a, b| a.iter().zip(b.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal));
    let mut out: Vec<Cluster> = Vec::new();
    for d in sorted {
        match out.iter_mut().find(|c| angle(&c.rep, d) <= tol) {
            Some(c) => {
                c.sum = linalg::add(&c.sum, d);
                c.support += 1;
                c.rep = linalg::normalized(&c.sum);
            }
            None => out.push(Cluster { rep: d.clone(), sum: d.clone(), support: 1 }),
        }
    }
    out
}

fn angle(a: &[f64], b: &[f64]) -> f64 {
    linalg::dot(a, b).clamp(-1.0, 1.0).acos()
}

fn snap(v: &[f64], tol: f64) -> Vec<f64> {
    let s: Vec<f64> = v.iter().map(|&x| if x.abs() < tol { 0.0 } else { x }).collect();
    linalg::normalized(&s)
}

fn random_unit(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| gaussian(rng)).collect();
        let n = linalg::norm_f64(&v);
        if n > 1e-12 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

mod rand_distr_free {
    use rand::Rng;

    /// Standard normal draw (Box–Muller).
    pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cones::sphere_hausdorff;

    #[test]
    fn tanh_epigraph_relative_to_halfline() {
        let g = SmoothGraphMap::new(1, 1, vec![Expr::parse("(- u1 (tanh x1))").unwrap()], vec![0.0, 0.0], 1.0).unwrap();
        let x = Restriction::Polyhedral(FiniteUnionSet::from_polyhedron(ConvexPolyhedron::orthant(1)));
        let r = projcode_sampled(SampledSource::Smooth(&g), &x, &[0.0], &[0.0], &SamplingConfig::default()).unwrap();
        // (u*, x*) graph: R₋×{0} ∪ R₊(−1,−1)
        let expected = ConeUnion::new(
            2,
            vec![ConvexPolyhedron::cone(2, vec![vec![-1.0, 0.0]], vec![]).unwrap(), ConvexPolyhedron::cone(2, vec![vec![-1.0, -1.0]], vec![]).unwrap()],
        )
        .unwrap();
        let d = sphere_hausdorff(r.map.graph(), &expected).unwrap();
        assert!(d <= 0.05, "hausdorff {d}");
    }
}
