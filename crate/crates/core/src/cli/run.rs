//! Command dispatch and report assembly.

use serde::Serialize;
use serde_json::{json, Value};

use super::schema::{mat_of, vec_of, ChartSpec, Command, MapKind, MapSpec, Params, PolySpec, ProblemDocument, SetSpec, SumRuleChoice, SCHEMA_VERSION};
use crate::calculus::{chain_verify, sum_rule_1, sum_rule_2, RuleReport};
use crate::cones::ConeUnion;
use crate::criterion::{self, lip_oracle, outer_norm, outer_norm_sampled, OracleSource};
use crate::error::{Result, VakError};
use crate::expr::Expr;
use crate::geometry::ConvexPolyhedron;
use crate::manifold::ManifoldChart;
use crate::maps::{PolyMap, PosHomMap, SmoothGraphMap};
use crate::projcode::{projcode_sampled, Restriction, SampledSource, SamplingConfig};
use crate::projcode::{self, ProjCodeResult};
use crate::scalar::{Rational, Scalar, FLOAT_TOL};
use crate::sets::FiniteUnionSet;

/// Settings that come from the command line rather than the document.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub exact: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Reproducibility {
    pub seed: u64,
    pub exact: bool,
    pub library_version: &'static str,
    pub float_tolerance: f64,
    pub params: Params,
    pub sampling: SamplingConfig,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u64,
    pub command: &'static str,
    pub route: String,
    pub result: Value,
    pub warnings: Vec<String>,
    pub reproducibility: Reproducibility,
    /// Cone unions available for plotting, labeled.
    #[serde(skip)]
    pub cones: Vec<(String, ConeUnion<f64>)>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Machine-readable error report.
pub fn error_json(command: Option<Command>, err: &VakError) -> String {
    let details: Vec<Value> = match err {
        VakError::SchemaViolation(list) => list.iter().map(|(p, m)| json!({ "pointer": p, "message": m })).collect(),
        _ => vec![],
    };
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command.map(|c| c.name()),
        "error": { "code": err.code(), "message": err.to_string(), "details": details },
    });
    serde_json::to_string_pretty(&v).expect("error serializes")
}

struct Outcome {
    route: String,
    result: Value,
    warnings: Vec<String>,
    cones: Vec<(String, ConeUnion<f64>)>,
}

impl Outcome {
    fn new(route: &str, result: Value) -> Self {
        Outcome { route: route.into(), result, warnings: vec![], cones: vec![] }
    }
    fn cone(mut self, label: &str, k: ConeUnion<f64>) -> Self {
        self.cones.push((label.into(), k));
        self
    }
}

pub fn run_command(doc: &ProblemDocument, opts: &RunOptions) -> Result<Report> {
    let mut doc = doc.clone();
    if let Some(seed) = opts.seed {
        doc.query.seed = seed;
    }
    doc.query.exact |= opts.exact;
    let exact = doc.query.exact;
    let cmd = doc.query.command;
    let mut out = if uses_polyhedral_route(&doc) {
        if exact {
            run_polyhedral::<Rational>(&doc)?
        } else {
            run_polyhedral::<f64>(&doc)?
        }
    } else {
        let mut o = run_float(&doc)?;
        if exact {
            o.warnings.push("exact mode does not apply to this route; floating-point arithmetic was used".into());
        }
        o
    };
    out.warnings.sort();
    out.warnings.dedup();
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command: cmd.name(),
        route: out.route,
        result: out.result,
        warnings: out.warnings,
        reproducibility: Reproducibility {
            seed: doc.query.seed,
            exact,
            library_version: env!("CARGO_PKG_VERSION"),
            float_tolerance: FLOAT_TOL,
            params: doc.query.params.clone(),
            sampling: doc.sampling(),
        },
        cones: out.cones,
    })
}

fn schema_err(at: &str, msg: impl Into<String>) -> VakError {
    VakError::SchemaViolation(vec![(at.into(), msg.into())])
}

fn is_polyhedral(m: &MapSpec) -> bool {
    match &m.kind {
        MapKind::Polyhedral { .. } | MapKind::Affine { .. } | MapKind::Cone { .. } => true,
        MapKind::Inequalities { inequalities, .. } => inequalities.iter().all(|e| Expr::parse(e).map(|e| e.is_affine()).unwrap_or(false)),
        MapKind::Function { .. } => false,
    }
}

fn restriction_is_polyhedral(doc: &ProblemDocument) -> bool {
    match doc.query.restriction.as_deref() {
        None => true,
        Some(name) => doc.set(name).is_some() || doc.chart(name).is_some_and(|c| chart_of(c).map(|c| c.is_affine()).unwrap_or(false)),
    }
}

/// Exact-capable route: everything polyhedral, no sampling requested.
fn uses_polyhedral_route(doc: &ProblemDocument) -> bool {
    let q = &doc.query;
    match q.command {
        Command::Cone | Command::Normalcone => q.set.as_deref().is_some_and(|s| doc.set(s).is_some()),
        Command::Oracle => false,
        _ => !q.params.sampled && restriction_is_polyhedral(doc) && q.maps.iter().all(|m| doc.map(m).is_some_and(is_polyhedral)),
    }
}

// ---- builders ----

fn poly_of<S: Scalar>(p: &PolySpec, dim: usize) -> Result<ConvexPolyhedron<S>> {
    match p {
        PolySpec::H { a, b, c, d } => ConvexPolyhedron::from_hrep(dim, mat_of(a), vec_of(b), mat_of(c), vec_of(d)),
        PolySpec::V { vertices, rays, lineality } => {
            let mut v: Vec<Vec<S>> = mat_of(vertices);
            if v.is_empty() && !(rays.is_empty() && lineality.is_empty()) {
                v.push(vec![S::zero(); dim]);
            }
            ConvexPolyhedron::from_vrep(dim, v, mat_of(rays), mat_of(lineality))
        }
    }
}

fn pieces_of<S: Scalar>(pieces: &[PolySpec], dim: usize) -> Result<Vec<ConvexPolyhedron<S>>> {
    pieces.iter().map(|p| poly_of(p, dim)).collect()
}

fn set_of<S: Scalar>(s: &SetSpec) -> Result<FiniteUnionSet<S>> {
    FiniteUnionSet::new(s.dim, pieces_of(&s.pieces, s.dim)?)
}

/// Every polyhedron a document declares: set pieces, graph pieces of
/// polyhedral, affine and cone maps.
pub fn document_polyhedra<S: Scalar>(doc: &ProblemDocument) -> Result<Vec<ConvexPolyhedron<S>>> {
    let mut out = Vec::new();
    for s in &doc.sets {
        out.extend(pieces_of::<S>(&s.pieces, s.dim)?);
    }
    for m in &doc.maps {
        match &m.kind {
            MapKind::Polyhedral { pieces } | MapKind::Cone { pieces } => out.extend(pieces_of::<S>(pieces, m.n + m.m)?),
            MapKind::Affine { .. } => out.extend(polymap_of::<S>(m)?.graph().pieces().iter().cloned()),
            _ => {}
        }
    }
    Ok(out)
}

fn exprs(list: &[String]) -> Result<Vec<Expr>> {
    list.iter().map(|e| Expr::parse(e)).collect()
}

fn chart_of(c: &ChartSpec) -> Result<ManifoldChart> {
    let center = c.center.as_ref().map(|v| vec_of(v)).unwrap_or_else(|| vec![0.0; c.dim]);
    let radius = c.radius.as_ref().map(|r| r.f64()).unwrap_or(f64::INFINITY);
    ManifoldChart::new(c.dim, exprs(&c.components)?, center, radius)
}

fn polymap_of<S: Scalar>(m: &MapSpec) -> Result<PolyMap<S>> {
    match &m.kind {
        MapKind::Polyhedral { pieces } => PolyMap::from_pieces(m.n, m.m, pieces_of(pieces, m.n + m.m)?),
        MapKind::Affine { matrix, offset } => PolyMap::affine(&mat_of(matrix), &vec_of(offset)),
        MapKind::Inequalities { .. } => smooth_of(m, None)?
            .to_polymap()
            .unwrap_or_else(|| Err(VakError::UnsupportedRestrictionSet(format!("map '{}' is not polyhedral", m.name)))),
        _ => Err(schema_err("/maps", format!("map '{}' is not a set-valued polyhedral map", m.name))),
    }
}

fn cone_map_of<S: Scalar>(m: &MapSpec) -> Result<PosHomMap<S>> {
    match &m.kind {
        MapKind::Cone { pieces } => PosHomMap::new(m.n, m.m, ConeUnion::new(m.n + m.m, pieces_of(pieces, m.n + m.m)?)?),
        _ => Err(schema_err("/maps", format!("map '{}' is not a cone map", m.name))),
    }
}

fn smooth_of(m: &MapSpec, point: Option<(&[f64], &[f64])>) -> Result<SmoothGraphMap> {
    let MapKind::Inequalities { inequalities, center, radius } = &m.kind else {
        return Err(schema_err("/maps", format!("map '{}' has no inequality description", m.name)));
    };
    let center = match (center, point) {
        (Some(c), _) => vec_of(c),
        (None, Some((x, u))) => x.iter().chain(u).copied().collect(),
        (None, None) => vec![0.0; m.n + m.m],
    };
    let radius = radius.as_ref().map(|r| r.f64()).unwrap_or(f64::INFINITY);
    SmoothGraphMap::new(m.n, m.m, exprs(inequalities)?, center, radius)
}

fn first_map(doc: &ProblemDocument) -> Result<&MapSpec> {
    doc.query.maps.first().and_then(|n| doc.map(n)).ok_or_else(|| schema_err("/query/maps", "missing map"))
}

fn restriction_set<S: Scalar>(doc: &ProblemDocument, n: usize) -> Result<FiniteUnionSet<S>> {
    match doc.query.restriction.as_deref() {
        None => Ok(FiniteUnionSet::universe(n)),
        Some(name) => match (doc.set(name), doc.chart(name)) {
            (Some(s), _) => set_of(s),
            (None, Some(c)) => {
                let chart = chart_of(c)?;
                let p = chart.as_polyhedron::<S>().ok_or_else(|| VakError::UnsupportedRestrictionSet(format!("chart '{name}' is not affine")))??;
                Ok(FiniteUnionSet::from_polyhedron(p))
            }
            _ => Err(schema_err("/query/restriction", format!("unknown restriction '{name}'"))),
        },
    }
}

fn restriction_float(doc: &ProblemDocument, n: usize) -> Result<Restriction> {
    match doc.query.restriction.as_deref().and_then(|name| doc.chart(name)) {
        Some(c) => Ok(Restriction::Chart(chart_of(c)?)),
        None => Ok(Restriction::Polyhedral(restriction_set::<f64>(doc, n)?)),
    }
}

// ---- serialization helpers ----

fn num_json<S: Scalar>(x: &S) -> Value {
    if S::EXACT {
        Value::String(x.to_literal())
    } else {
        json!(x.to_f64())
    }
}

fn vec_json<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(num_json).collect())
}

fn mat_json<S: Scalar>(m: &[Vec<S>]) -> Value {
    Value::Array(m.iter().map(|r| vec_json(r)).collect())
}

/// Cone union as generator lists, one entry per piece.
pub fn cone_json<S: Scalar>(k: &ConeUnion<S>) -> Value {
    let pieces: Vec<Value> = k
        .pieces()
        .iter()
        .map(|p| {
            let v = p.vrep();
            json!({ "rays": mat_json(&v.rays), "lineality": mat_json(&v.lineality) })
        })
        .collect();
    json!({ "dim": k.dim(), "empty": k.is_empty(), "pieces": pieces })
}

fn map_json<S: Scalar>(h: &PosHomMap<S>) -> Result<Value> {
    Ok(json!({
        "input_dim": h.input_dim(),
        "output_dim": h.output_dim(),
        "coordinates": "(input, output)",
        "graph": cone_json(h.graph()),
        "value_at_zero": cone_json(&h.at_zero()?),
        "zero_at_zero": h.zero_at_zero()?,
    }))
}

fn projcode_json<S: Scalar>(pc: &ProjCodeResult<S>) -> Result<Value> {
    Ok(json!({ "map": map_json(&pc.map)?, "diagnostics": pc.diagnostics }))
}

fn rule_json<S: Scalar>(r: &RuleReport<S>) -> Value {
    serde_json::to_value(r.summary()).expect("rule summary serializes")
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializes")
}

fn route_name(r: projcode::Route) -> String {
    to_value(&r).as_str().unwrap_or_default().to_string()
}

fn rule_cones<S: Scalar>(r: &RuleReport<S>, o: Outcome) -> Outcome {
    let mut o = o;
    if let Some(l) = &r.lhs {
        o = o.cone("lhs", l.graph().convert());
    }
    if let Some(h) = &r.rhs {
        o = o.cone("rhs", h.graph().convert());
    }
    o
}

// ---- polyhedral (exact-capable) commands ----

fn run_polyhedral<S: Scalar>(doc: &ProblemDocument) -> Result<Outcome> {
    let q = &doc.query;
    let x: Vec<S> = vec_of(&q.point.x);
    let u: Vec<S> = vec_of(&q.point.u);
    match q.command {
        Command::Cone | Command::Normalcone => {
            let name = q.set.as_deref().unwrap_or_default();
            let set = set_of::<S>(doc.set(name).ok_or_else(|| schema_err("/query/set", "unknown set"))?)?;
            if !set.contains(&x) {
                return Err(VakError::PointNotOnGraph);
            }
            if q.command == Command::Cone {
                let t = set.tangent_cone_at(&x)?;
                let o = Outcome::new("exact-polyhedral", json!({ "tangent_cone": cone_json(&t), "convex": t.pieces().len() <= 1 }));
                return Ok(o.cone("tangent_cone", t.convert()));
            }
            let reg = ConeUnion::from_cone(set.regular_normal_cone_at(&x)?)?;
            let lim = set.limiting_normal_cone_or_sampled(&x, q.params.cell_budget, q.params.cone_samples, q.seed)?;
            let mut o = Outcome::new(
                if lim.warning.is_some() { "sampled" } else { "exact-polyhedral" },
                json!({ "regular_normal_cone": cone_json(&reg), "limiting_normal_cone": cone_json(&lim.cone), "cells": lim.cells }),
            );
            o.warnings.extend(lim.warning);
            Ok(o.cone("limiting_normal_cone", lim.cone.convert()).cone("regular_normal_cone", reg.convert()))
        }
        Command::Coderivative => {
            let s = polymap_of::<S>(first_map(doc)?)?;
            let d = s.coderivative(&x, &u)?;
            let r = s.regular_coderivative(&x, &u)?;
            let o = Outcome::new("exact-polyhedral", json!({ "coderivative": map_json(&d)?, "regular_coderivative": map_json(&r)? }));
            Ok(o.cone("coderivative", d.graph().convert()))
        }
        Command::Projcode | Command::Criterion | Command::Outernorm => {
            let spec = first_map(doc)?;
            if let MapKind::Cone { .. } = spec.kind {
                if q.command != Command::Outernorm {
                    return Err(schema_err("/query/maps/0", "cone maps are only accepted by outernorm"));
                }
                let h = cone_map_of::<S>(spec)?;
                return outernorm_outcome(&h, "given", q);
            }
            let s = polymap_of::<S>(spec)?;
            let chart = q.restriction.as_deref().and_then(|r| doc.chart(r));
            let x_set = restriction_set::<S>(doc, s.input_dim())?;
            match q.command {
                Command::Projcode => {
                    if let Some(c) = chart {
                        let (pc, forms) = projcode::projcode_manifold_fixed_point(&s, &chart_of(c)?, &x, &u)?;
                        let mut v = projcode_json(&pc)?;
                        v["fixed_point_forms"] = json!({
                            "projection": map_json(&forms.projection)?,
                            "intersection": map_json(&forms.intersection)?,
                            "agree": forms.certificate.equal,
                        });
                        let o = Outcome::new(&route_name(pc.route), v);
                        return Ok(o.cone("projcode", pc.map.graph().convert()));
                    }
                    let pc = projcode::projcode_polyhedral(&s, &x_set, &x, &u)?;
                    let mut o = Outcome::new(&route_name(pc.route), projcode_json(&pc)?);
                    o.warnings.extend(pc.warnings.iter().cloned());
                    Ok(o.cone("projcode", pc.map.graph().convert()))
                }
                Command::Criterion => {
                    let mut rep = criterion::glm_criterion_polyhedral(&s, &x_set, &x, &u)?;
                    let pc = projcode::projcode_polyhedral(&s, &x_set, &x, &u)?;
                    if q.params.oracle_pairs > 0 {
                        let sf = s.convert::<f64>();
                        let xr = Restriction::Polyhedral(x_set.convert());
                        let or = lip_oracle(OracleSource::Poly(&sf), &xr, &crate::linalg::to_f64_vec(&x), &crate::linalg::to_f64_vec(&u), q.params.rho, q.params.sigma, q.params.oracle_pairs, q.seed)?;
                        rep.oracle_estimate = Some(or.estimate);
                    }
                    let mut o = Outcome::new(&route_name(rep.route), criterion_json(&rep));
                    o.warnings.extend(rep.warnings.iter().cloned());
                    Ok(o.cone("projcode", pc.map.graph().convert()))
                }
                _ => {
                    let pc = projcode::projcode_polyhedral(&s, &x_set, &x, &u)?;
                    outernorm_outcome(&pc.map, &route_name(pc.route), q)
                }
            }
        }
        Command::Battery => {
            let s = polymap_of::<S>(first_map(doc)?)?;
            let x_set = restriction_set::<S>(doc, s.input_dim())?;
            let xa = x_set.as_convex().ok_or_else(|| VakError::UnsupportedRestrictionSet("the battery needs a convex (affine) restriction set".into()))?;
            let rep = criterion::equivalence_battery(&s, &xa, &x, &u)?;
            let all_equal = rep.checks.values().all(|&b| b) || rep.checks.values().all(|&b| !b);
            let mut v = criterion_json(&rep);
            v["all_equal"] = json!(all_equal);
            let mut o = Outcome::new(&route_name(rep.route), v);
            o.warnings.extend(rep.warnings.iter().cloned());
            Ok(o)
        }
        Command::Chain => {
            let s1 = polymap_of::<S>(doc.map(&q.maps[0]).expect("validated"))?;
            let s2 = polymap_of::<S>(doc.map(&q.maps[1]).expect("validated"))?;
            let x_set = restriction_set::<S>(doc, s1.input_dim())?;
            let r = chain_verify(&s1, &s2, &x_set, &x, &u)?;
            Ok(rule_cones(&r, Outcome::new("exact-polyhedral", rule_json(&r))))
        }
        Command::Sum => {
            let maps: Vec<PolyMap<S>> = q.maps.iter().map(|n| polymap_of::<S>(doc.map(n).expect("validated"))).collect::<Result<_>>()?;
            let x_set = restriction_set::<S>(doc, maps[0].input_dim())?;
            let mut v = serde_json::Map::new();
            let mut o = Outcome::new("exact-polyhedral", Value::Null);
            if matches!(q.params.rule, SumRuleChoice::One | SumRuleChoice::Both) {
                let r = sum_rule_1(&maps, &x_set, &x, &u)?;
                v.insert("rule_1".into(), rule_json(&r));
                o = rule_cones(&r, o);
            }
            if matches!(q.params.rule, SumRuleChoice::Two | SumRuleChoice::Both) {
                let r = sum_rule_2(&maps, &x_set, &x, &u)?;
                v.insert("rule_2".into(), rule_json(&r));
                if q.params.rule == SumRuleChoice::Two {
                    o = rule_cones(&r, o);
                }
            }
            o.result = Value::Object(v);
            Ok(o)
        }
        Command::Oracle => unreachable!("oracle always runs in floating point"),
    }
}

/// `+∞` has no JSON spelling; it is written as the string `"inf"`.
fn inf_or(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("inf")
    }
}

fn norm_json(r: &criterion::OuterNormResult) -> Value {
    let mut v = to_value(r);
    v["value"] = inf_or(r.value);
    v["sampled_lower_bound"] = inf_or(r.sampled_lower_bound);
    v
}

fn criterion_json(rep: &criterion::CriterionReport) -> Value {
    let mut v = to_value(rep);
    v["modulus"] = inf_or(rep.modulus);
    v["outer_norm"] = norm_json(&rep.outer_norm);
    v
}

fn outernorm_outcome<S: Scalar>(h: &PosHomMap<S>, route: &str, q: &super::schema::Query) -> Result<Outcome> {
    let exact = outer_norm(h)?;
    let sampled = outer_norm_sampled(h, q.params.norm_samples, q.seed)?;
    let v = json!({ "outer_norm": norm_json(&exact), "sampled": norm_json(&sampled), "map": map_json(h)? });
    Ok(Outcome::new(route, v).cone("map", h.graph().convert()))
}

// ---- floating-point commands (sampled, smooth, oracle) ----

fn run_float(doc: &ProblemDocument) -> Result<Outcome> {
    let q = &doc.query;
    let x: Vec<f64> = vec_of(&q.point.x);
    let u: Vec<f64> = vec_of(&q.point.u);
    let cfg = doc.sampling();
    match q.command {
        Command::Cone | Command::Normalcone => {
            let name = q.set.as_deref().unwrap_or_default();
            let chart = chart_of(doc.chart(name).ok_or_else(|| schema_err("/query/set", "unknown set or chart"))?)?;
            if !chart.on_manifold(&x) {
                return Err(VakError::PointNotOnGraph);
            }
            let (label, k) = if q.command == Command::Cone {
                ("tangent_cone", ConeUnion::from_cone(chart.tangent_space(&x)?)?)
            } else {
                ("normal_cone", ConeUnion::from_cone(ConvexPolyhedron::subspace(chart.ambient_dim(), chart.normal_basis(&x)?)?)?)
            };
            Ok(Outcome::new("manifold-chart", json!({ label: cone_json(&k) })).cone(label, k))
        }
        Command::Oracle => {
            let spec = first_map(doc)?;
            let xr = restriction_float(doc, spec.n)?;
            let (poly, smooth);
            let source = if is_polyhedral(spec) && !matches!(spec.kind, MapKind::Cone { .. }) {
                poly = polymap_of::<f64>(spec)?;
                OracleSource::Poly(&poly)
            } else {
                smooth = smooth_of(spec, Some((&x, &u)))?;
                OracleSource::Smooth(&smooth)
            };
            let r = lip_oracle(source, &xr, &x, &u, q.params.rho, q.params.sigma, q.params.pairs, q.seed)?;
            let mut o = Outcome::new("oracle", to_value(&r));
            if r.pairs_used < q.params.pairs {
                o.warnings.push(format!("only {} of {} pairs could be sampled", r.pairs_used, q.params.pairs));
            }
            Ok(o)
        }
        Command::Projcode | Command::Criterion | Command::Outernorm | Command::Coderivative => {
            let spec = first_map(doc)?;
            if let MapKind::Function { components } = &spec.kind {
                return smooth_single_valued(doc, spec, components, &x);
            }
            let xr = if q.command == Command::Coderivative { Restriction::Polyhedral(FiniteUnionSet::universe(spec.n)) } else { restriction_float(doc, spec.n)? };
            let (poly, smooth);
            let source = if is_polyhedral(spec) {
                poly = polymap_of::<f64>(spec)?;
                SampledSource::Poly(&poly)
            } else {
                smooth = smooth_of(spec, Some((&x, &u)))?;
                SampledSource::Smooth(&smooth)
            };
            match q.command {
                Command::Criterion => {
                    let mut rep = criterion::glm_criterion_sampled(source, &xr, &x, &u, &cfg)?;
                    if q.params.oracle_pairs > 0 {
                        let os = match source {
                            SampledSource::Poly(p) => OracleSource::Poly(p),
                            SampledSource::Smooth(s) => OracleSource::Smooth(s),
                        };
                        rep.oracle_estimate = Some(lip_oracle(os, &xr, &x, &u, q.params.rho, q.params.sigma, q.params.oracle_pairs, q.seed)?.estimate);
                    }
                    let pc = projcode_sampled(source, &xr, &x, &u, &cfg)?;
                    let mut o = Outcome::new(&route_name(rep.route), criterion_json(&rep));
                    o.warnings.extend(rep.warnings.iter().cloned());
                    Ok(o.cone("projcode", pc.map.graph().clone()))
                }
                _ => {
                    let pc = projcode_sampled(source, &xr, &x, &u, &cfg)?;
                    if q.command == Command::Outernorm {
                        let mut o = outernorm_outcome(&pc.map, &route_name(pc.route), q)?;
                        o.warnings.extend(pc.warnings.iter().cloned());
                        return Ok(o);
                    }
                    let key = if q.command == Command::Coderivative { "coderivative" } else { "projcode" };
                    let mut o = Outcome::new(&route_name(pc.route), json!({ key: projcode_json(&pc)? }));
                    o.warnings.extend(pc.warnings.iter().cloned());
                    Ok(o.cone(key, pc.map.graph().clone()))
                }
            }
        }
        Command::Battery | Command::Chain | Command::Sum => Err(VakError::UnsupportedRestrictionSet(format!(
            "{} needs polyhedral maps and a polyhedral or affine restriction set",
            q.command.name()
        ))),
    }
}

/// `y ↦ proj_{T_X(x̄)} ∇F(x̄)ᵀy` for a smooth single-valued map on a chart.
fn smooth_single_valued(doc: &ProblemDocument, spec: &MapSpec, components: &[String], x: &[f64]) -> Result<Outcome> {
    let q = &doc.query;
    if q.command != Command::Projcode && q.command != Command::Outernorm {
        return Err(VakError::UnsupportedRestrictionSet(format!("{} does not accept function maps", q.command.name())));
    }
    let chart = match q.restriction.as_deref() {
        None => ManifoldChart::global(spec.n, vec![])?,
        Some(name) => chart_of(doc.chart(name).ok_or_else(|| VakError::UnsupportedRestrictionSet("function maps need a chart restriction".into()))?)?,
    };
    if !chart.on_manifold(x) {
        return Err(VakError::PointNotOnGraph);
    }
    let f = exprs(components)?;
    let h = projcode::smooth_single_valued_map(&f, &chart, x)?;
    if q.command == Command::Outernorm {
        return outernorm_outcome(&h, "smooth-single-valued", q);
    }
    let mut v = json!({ "projcode": { "map": map_json(&h)? } });
    if let Some(y) = &q.params.y {
        let y: Vec<f64> = vec_of(y);
        v["value"] = json!(projcode::projcode_smooth_single_valued(&f, &chart, x, &y)?);
    }
    Ok(Outcome::new("smooth-single-valued", v).cone("projcode", h.graph().clone()))
}
