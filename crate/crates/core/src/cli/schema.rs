//! Problem documents: a versioned JSON schema, validated in one pass so
//! that every error is reported with its JSON pointer.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Result, VakError};
use crate::projcode::SamplingConfig;
use crate::scalar::{Rational, Scalar};

pub const SCHEMA_VERSION: u64 = 1;

/// A numeric literal kept in its source spelling (`3`, `-0.25`, `2/7`),
/// so that exact mode reads the same value the author wrote.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Num(pub String);

impl Num {
    pub fn get<S: Scalar>(&self) -> S {
        // validated on parse for both scalar types
        S::parse_literal(&self.0).expect("validated literal")
    }
    pub fn f64(&self) -> f64 {
        self.get::<f64>()
    }
}

pub fn vec_of<S: Scalar>(v: &[Num]) -> Vec<S> {
    v.iter().map(Num::get).collect()
}

pub fn mat_of<S: Scalar>(m: &[Vec<Num>]) -> Vec<Vec<S>> {
    m.iter().map(|r| vec_of(r)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum PolySpec {
    H {
        #[serde(rename = "A")]
        a: Vec<Vec<Num>>,
        b: Vec<Num>,
        #[serde(rename = "C")]
        c: Vec<Vec<Num>>,
        d: Vec<Num>,
    },
    V { vertices: Vec<Vec<Num>>, rays: Vec<Vec<Num>>, lineality: Vec<Vec<Num>> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SetSpec {
    pub name: String,
    pub dim: usize,
    pub pieces: Vec<PolySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartSpec {
    pub name: String,
    pub dim: usize,
    pub components: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<Num>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MapKind {
    /// Graph pieces in `(x, u)` coordinates.
    Polyhedral { pieces: Vec<PolySpec> },
    /// `u = A x + c`.
    Affine { matrix: Vec<Vec<Num>>, offset: Vec<Num> },
    /// Graph `{h_i(x, u) ≤ 0}` valid on a ball around `center`.
    Inequalities {
        inequalities: Vec<String>,
        #[serde(skip_serializing_if = "Option::is_none")]
        center: Option<Vec<Num>>,
        #[serde(skip_serializing_if = "Option::is_none")]
        radius: Option<Num>,
    },
    /// Smooth single-valued `F(x)`.
    Function { components: Vec<String> },
    /// Positively homogeneous map given by its graph cone in `(u*, x*)`.
    Cone { pieces: Vec<PolySpec> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapSpec {
    pub name: String,
    pub n: usize,
    pub m: usize,
    #[serde(flatten)]
    pub kind: MapKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Cone,
    Normalcone,
    Coderivative,
    Projcode,
    Criterion,
    Battery,
    Chain,
    Sum,
    Oracle,
    Outernorm,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Cone,
        Command::Normalcone,
        Command::Coderivative,
        Command::Projcode,
        Command::Criterion,
        Command::Battery,
        Command::Chain,
        Command::Sum,
        Command::Oracle,
        Command::Outernorm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Cone => "cone",
            Command::Normalcone => "normalcone",
            Command::Coderivative => "coderivative",
            Command::Projcode => "projcode",
            Command::Criterion => "criterion",
            Command::Battery => "battery",
            Command::Chain => "chain",
            Command::Sum => "sum",
            Command::Oracle => "oracle",
            Command::Outernorm => "outernorm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Point {
    pub x: Vec<Num>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub u: Vec<Num>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumRuleChoice {
    One,
    Two,
    Both,
}

/// Optional knobs; every field has a documented default.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Params {
    /// Force the sampled route even for polyhedral maps.
    pub sampled: bool,
    pub rho: f64,
    pub sigma: f64,
    pub pairs: usize,
    /// Also run the oracle after `criterion` when positive.
    pub oracle_pairs: usize,
    pub rule: SumRuleChoice,
    /// Outer-norm Monte-Carlo sample count.
    pub norm_samples: usize,
    /// Cell budget for limiting normal cones before sampling takes over.
    pub cell_budget: usize,
    pub cone_samples: usize,
    /// `y` for the smooth single-valued formula.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<Num>>,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            sampled: false,
            rho: 0.1,
            sigma: 0.1,
            pairs: 10_000,
            oracle_pairs: 0,
            rule: SumRuleChoice::Both,
            norm_samples: 10_000,
            cell_budget: 4096,
            cone_samples: 2000,
            y: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Query {
    pub command: Command,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restriction: Option<String>,
    pub point: Point,
    pub seed: u64,
    pub exact: bool,
    pub params: Params,
    pub sampling: SamplingConfigEq,
}

/// Sampling budgets; serialized in full so a report pins its environment.
#[derive(Debug, Clone, Serialize)]
#[serde(transparent)]
pub struct SamplingConfigEq(pub SamplingConfig);

impl PartialEq for SamplingConfigEq {
    fn eq(&self, other: &Self) -> bool {
        serde_json::to_value(&self.0).ok() == serde_json::to_value(&other.0).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemDocument {
    pub schema_version: u64,
    pub sets: Vec<SetSpec>,
    pub charts: Vec<ChartSpec>,
    pub maps: Vec<MapSpec>,
    pub query: Query,
}

impl ProblemDocument {
    pub fn set(&self, name: &str) -> Option<&SetSpec> {
        self.sets.iter().find(|s| s.name == name)
    }
    pub fn chart(&self, name: &str) -> Option<&ChartSpec> {
        self.charts.iter().find(|s| s.name == name)
    }
    pub fn map(&self, name: &str) -> Option<&MapSpec> {
        self.maps.iter().find(|s| s.name == name)
    }
    pub fn sampling(&self) -> SamplingConfig {
        let mut cfg = self.query.sampling.0.clone();
        cfg.seed = self.query.seed;
        cfg
    }

    /// Canonical serialization; parsing it gives back the same document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

/// Error collector keyed by JSON pointer.
struct Ctx {
    errors: Vec<(String, String)>,
}

fn ptr(base: &str, key: &str) -> String {
    format!("{base}/{}", key.replace('~', "~0").replace('/', "~1"))
}

impl Ctx {
    fn err(&mut self, at: &str, msg: impl Into<String>) {
        let at = if at.is_empty() { "/".to_string() } else { at.to_string() };
        self.errors.push((at, msg.into()));
    }

    fn obj<'a>(&mut self, v: &'a Value, at: &str) -> Option<&'a Map<String, Value>> {
        match v {
            Value::Object(o) => Some(o),
            _ => {
                self.err(at, "expected an object");
                None
            }
        }
    }

    fn unknown_keys(&mut self, o: &Map<String, Value>, at: &str, allowed: &[&str]) {
        for k in o.keys() {
            if !allowed.contains(&k.as_str()) {
                self.err(&ptr(at, k), "unknown field");
            }
        }
    }

    fn required<'a>(&mut self, o: &'a Map<String, Value>, at: &str, key: &str) -> Option<&'a Value> {
        let v = o.get(key);
        if v.is_none() {
            self.err(&ptr(at, key), "missing required field");
        }
        v
    }

    fn usize_at(&mut self, v: &Value, at: &str) -> Option<usize> {
        match v.as_u64() {
            Some(k) => Some(k as usize),
            None => {
                self.err(at, "expected a non-negative integer");
                None
            }
        }
    }

    fn req_usize(&mut self, o: &Map<String, Value>, at: &str, key: &str) -> Option<usize> {
        let v = self.required(o, at, key)?;
        self.usize_at(v, &ptr(at, key))
    }

    fn opt_usize(&mut self, o: &Map<String, Value>, at: &str, key: &str, default: usize) -> usize {
        o.get(key).and_then(|v| self.usize_at(v, &ptr(at, key))).unwrap_or(default)
    }

    fn opt_f64(&mut self, o: &Map<String, Value>, at: &str, key: &str, default: f64) -> f64 {
        match o.get(key) {
            None => default,
            Some(v) => self.num(v, &ptr(at, key)).map(|n| n.f64()).unwrap_or(default),
        }
    }

    fn opt_bool(&mut self, o: &Map<String, Value>, at: &str, key: &str, default: bool) -> bool {
        match o.get(key) {
            None => default,
            Some(Value::Bool(b)) => *b,
            Some(_) => {
                self.err(&ptr(at, key), "expected a boolean");
                default
            }
        }
    }

    fn string_at(&mut self, v: &Value, at: &str) -> Option<String> {
        match v {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.err(at, "expected a string");
                None
            }
        }
    }

    fn req_string(&mut self, o: &Map<String, Value>, at: &str, key: &str) -> Option<String> {
        let v = self.required(o, at, key)?;
        self.string_at(v, &ptr(at, key))
    }

    fn opt_string(&mut self, o: &Map<String, Value>, at: &str, key: &str) -> Option<String> {
        o.get(key).and_then(|v| self.string_at(v, &ptr(at, key)))
    }

    fn array<'a>(&mut self, v: &'a Value, at: &str) -> Option<&'a Vec<Value>> {
        match v {
            Value::Array(a) => Some(a),
            _ => {
                self.err(at, "expected an array");
                None
            }
        }
    }

    fn num(&mut self, v: &Value, at: &str) -> Option<Num> {
        let text = match v {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.trim().to_string(),
            _ => {
                self.err(at, "expected a number or a numeric string");
                return None;
            }
        };
        match (f64::parse_literal(&text), Rational::parse_literal(&text)) {
            (Some(x), Some(_)) if x.is_finite() => Some(Num(text)),
            _ => {
                self.err(at, format!("'{text}' is not a finite numeric literal"));
                None
            }
        }
    }

    fn vector(&mut self, v: &Value, at: &str, len: Option<usize>) -> Option<Vec<Num>> {
        let a = self.array(v, at)?;
        if let Some(len) = len {
            if a.len() != len {
                self.err(at, format!("expected {len} entries, found {}", a.len()));
                return None;
            }
        }
        let out: Vec<Option<Num>> = a.iter().enumerate().map(|(i, x)| self.num(x, &format!("{at}/{i}"))).collect();
        out.into_iter().collect()
    }

    fn matrix(&mut self, v: &Value, at: &str, cols: Option<usize>) -> Option<Vec<Vec<Num>>> {
        let a = self.array(v, at)?;
        let rows: Vec<Option<Vec<Num>>> = a.iter().enumerate().map(|(i, r)| self.vector(r, &format!("{at}/{i}"), cols)).collect();
        rows.into_iter().collect()
    }

    fn opt_matrix(&mut self, o: &Map<String, Value>, at: &str, key: &str, cols: usize) -> Option<Vec<Vec<Num>>> {
        match o.get(key) {
            None => Some(vec![]),
            Some(v) => self.matrix(v, &ptr(at, key), Some(cols)),
        }
    }

    fn opt_vector(&mut self, o: &Map<String, Value>, at: &str, key: &str, len: usize) -> Option<Vec<Num>> {
        match o.get(key) {
            None => Some(vec![]),
            Some(v) => self.vector(v, &ptr(at, key), Some(len)),
        }
    }

    fn poly(&mut self, v: &Value, at: &str, dim: usize) -> Option<PolySpec> {
        let o = self.obj(v, at)?;
        let is_v = ["vertices", "rays", "lineality"].iter().any(|k| o.contains_key(*k));
        let is_h = ["A", "b", "C", "d"].iter().any(|k| o.contains_key(*k));
        if is_v && is_h {
            self.err(at, "mixes constraint (A, b, C, d) and generator (vertices, rays, lineality) fields");
            return None;
        }
        if is_v {
            self.unknown_keys(o, at, &["vertices", "rays", "lineality"]);
            let vertices = self.opt_matrix(o, at, "vertices", dim);
            let rays = self.opt_matrix(o, at, "rays", dim);
            let lineality = self.opt_matrix(o, at, "lineality", dim);
            return Some(PolySpec::V { vertices: vertices?, rays: rays?, lineality: lineality? });
        }
        self.unknown_keys(o, at, &["A", "b", "C", "d"]);
        let a = self.opt_matrix(o, at, "A", dim);
        let c = self.opt_matrix(o, at, "C", dim);
        let b = a.as_ref().and_then(|a| self.opt_vector(o, at, "b", a.len()));
        let d = c.as_ref().and_then(|c| self.opt_vector(o, at, "d", c.len()));
        Some(PolySpec::H { a: a?, b: b?, c: c?, d: d? })
    }

    fn pieces(&mut self, o: &Map<String, Value>, at: &str, dim: Option<usize>) -> Option<Vec<PolySpec>> {
        let v = self.required(o, at, "pieces")?;
        let at = ptr(at, "pieces");
        let a = self.array(v, &at)?;
        let dim = dim?;
        let out: Vec<Option<PolySpec>> = a.iter().enumerate().map(|(i, p)| self.poly(p, &format!("{at}/{i}"), dim)).collect();
        out.into_iter().collect()
    }

    fn exprs(&mut self, o: &Map<String, Value>, at: &str, key: &str) -> Option<Vec<String>> {
        let v = self.required(o, at, key)?;
        let at = ptr(at, key);
        let a = self.array(v, &at)?;
        let mut out = Vec::new();
        let mut ok = true;
        for (i, e) in a.iter().enumerate() {
            let here = format!("{at}/{i}");
            match self.string_at(e, &here) {
                Some(s) => match crate::expr::Expr::parse(&s) {
                    Ok(_) => out.push(s),
                    Err(err) => {
                        self.err(&here, err.to_string());
                        ok = false;
                    }
                },
                None => ok = false,
            }
        }
        ok.then_some(out)
    }

    fn set(&mut self, v: &Value, at: &str) -> Option<SetSpec> {
        let o = self.obj(v, at)?;
        self.unknown_keys(o, at, &["name", "dim", "pieces"]);
        let name = self.req_string(o, at, "name");
        let dim = self.req_usize(o, at, "dim");
        let pieces = self.pieces(o, at, dim);
        Some(SetSpec { name: name?, dim: dim?, pieces: pieces? })
    }

    fn chart(&mut self, v: &Value, at: &str) -> Option<ChartSpec> {
        let o = self.obj(v, at)?;
        self.unknown_keys(o, at, &["name", "dim", "components", "center", "radius"]);
        let name = self.req_string(o, at, "name");
        let dim = self.req_usize(o, at, "dim");
        let components = self.exprs(o, at, "components");
        let center = match (o.get("center"), dim) {
            (Some(c), Some(d)) => Some(self.vector(c, &ptr(at, "center"), Some(d))),
            _ => None,
        };
        let radius = o.get("radius").map(|r| self.num(r, &ptr(at, "radius")));
        Some(ChartSpec { name: name?, dim: dim?, components: components?, center: transpose(center)?, radius: transpose(radius)? })
    }

    fn map(&mut self, v: &Value, at: &str) -> Option<MapSpec> {
        let o = self.obj(v, at)?;
        let name = self.req_string(o, at, "name");
        let n = self.req_usize(o, at, "n");
        let m = self.req_usize(o, at, "m");
        let kind = self.req_string(o, at, "kind");
        let common = ["name", "n", "m", "kind"];
        let with = |extra: &[&'static str]| common.iter().chain(extra).copied().collect::<Vec<_>>();
        let dims = n.zip(m);
        let kind = match kind.as_deref() {
            Some("polyhedral") => {
                self.unknown_keys(o, at, &with(&["pieces"]));
                self.pieces(o, at, dims.map(|(n, m)| n + m)).map(|pieces| MapKind::Polyhedral { pieces })
            }
            Some("cone") => {
                self.unknown_keys(o, at, &with(&["pieces"]));
                self.pieces(o, at, dims.map(|(n, m)| n + m)).map(|pieces| MapKind::Cone { pieces })
            }
            Some("affine") => {
                self.unknown_keys(o, at, &with(&["matrix", "offset"]));
                let (matrix, offset) = match (self.required(o, at, "matrix"), dims) {
                    (Some(a), Some((n, m))) => {
                        let mat = self.matrix(a, &ptr(at, "matrix"), Some(n));
                        if let Some(mat) = &mat {
                            if mat.len() != m {
                                self.err(&ptr(at, "matrix"), format!("expected {m} rows, found {}", mat.len()));
                            }
                        }
                        let off = match o.get("offset") {
                            Some(c) => self.vector(c, &ptr(at, "offset"), Some(m)),
                            None => Some(vec![Num("0".into()); m]),
                        };
                        (mat.filter(|mat| mat.len() == m), off)
                    }
                    _ => (None, None),
                };
                matrix.zip(offset).map(|(matrix, offset)| MapKind::Affine { matrix, offset })
            }
            Some("inequalities") => {
                self.unknown_keys(o, at, &with(&["inequalities", "center", "radius"]));
                let inequalities = self.exprs(o, at, "inequalities");
                let center = match (o.get("center"), dims) {
                    (Some(c), Some((n, m))) => Some(self.vector(c, &ptr(at, "center"), Some(n + m))),
                    _ => None,
                };
                let radius = o.get("radius").map(|r| self.num(r, &ptr(at, "radius")));
                match (inequalities, transpose(center), transpose(radius)) {
                    (Some(inequalities), Some(center), Some(radius)) => Some(MapKind::Inequalities { inequalities, center, radius }),
                    _ => None,
                }
            }
            Some("function") => {
                self.unknown_keys(o, at, &with(&["components"]));
                let components = self.exprs(o, at, "components");
                if let (Some(c), Some(m)) = (&components, m) {
                    if c.len() != m {
                        self.err(&ptr(at, "components"), format!("expected {m} components, found {}", c.len()));
                        return None;
                    }
                }
                components.map(|components| MapKind::Function { components })
            }
            Some(other) => {
                self.err(&ptr(at, "kind"), format!("unknown map kind '{other}' (polyhedral, affine, inequalities, function, cone)"));
                None
            }
            None => None,
        };
        Some(MapSpec { name: name?, n: n?, m: m?, kind: kind? })
    }

    fn params(&mut self, v: Option<&Value>, at: &str) -> Params {
        let mut p = Params::default();
        let Some(v) = v else { return p };
        let Some(o) = self.obj(v, at) else { return p };
        self.unknown_keys(o, at, &["sampled", "rho", "sigma", "pairs", "oracle_pairs", "rule", "norm_samples", "cell_budget", "cone_samples", "y"]);
        p.sampled = self.opt_bool(o, at, "sampled", p.sampled);
        p.rho = self.opt_f64(o, at, "rho", p.rho);
        p.sigma = self.opt_f64(o, at, "sigma", p.sigma);
        p.pairs = self.opt_usize(o, at, "pairs", p.pairs);
        p.oracle_pairs = self.opt_usize(o, at, "oracle_pairs", p.oracle_pairs);
        p.norm_samples = self.opt_usize(o, at, "norm_samples", p.norm_samples);
        p.cell_budget = self.opt_usize(o, at, "cell_budget", p.cell_budget);
        p.cone_samples = self.opt_usize(o, at, "cone_samples", p.cone_samples);
        if let Some(r) = o.get("rule") {
            p.rule = match r.as_str() {
                Some("one") => SumRuleChoice::One,
                Some("two") => SumRuleChoice::Two,
                Some("both") => SumRuleChoice::Both,
                _ => {
                    self.err(&ptr(at, "rule"), "expected one of 'one', 'two', 'both'");
                    p.rule
                }
            };
        }
        if let Some(y) = o.get("y") {
            p.y = self.vector(y, &ptr(at, "y"), None);
        }
        for (key, val) in [("rho", p.rho), ("sigma", p.sigma)] {
            if val <= 0.0 {
                self.err(&ptr(at, key), "must be positive");
            }
        }
        p
    }

    fn sampling(&mut self, v: Option<&Value>, at: &str) -> SamplingConfig {
        let Some(v) = v else { return SamplingConfig::default() };
        if self.obj(v, at).is_none() {
            return SamplingConfig::default();
        }
        match serde_json::from_value::<SamplingConfig>(v.clone()) {
            Ok(c) => c,
            Err(e) => {
                self.err(at, e.to_string());
                SamplingConfig::default()
            }
        }
    }
}

fn transpose<T>(v: Option<Option<T>>) -> Option<Option<T>> {
    match v {
        None => Some(None),
        Some(None) => None,
        Some(Some(t)) => Some(Some(t)),
    }
}

/// Parse and validate a problem document, collecting every error.
pub fn parse_problem(text: &str) -> Result<ProblemDocument> {
    let root: Value = serde_json::from_str(text).map_err(|e| VakError::SchemaViolation(vec![("/".into(), format!("invalid JSON: {e}"))]))?;
    let mut cx = Ctx { errors: vec![] };
    let doc = parse_root(&mut cx, &root);
    match doc {
        Some(d) if cx.errors.is_empty() => Ok(d),
        _ => {
            if cx.errors.is_empty() {
                cx.err("", "invalid document");
            }
            Err(VakError::SchemaViolation(cx.errors))
        }
    }
}

fn parse_root(cx: &mut Ctx, root: &Value) -> Option<ProblemDocument> {
    let o = cx.obj(root, "")?;
    cx.unknown_keys(o, "", &["schema_version", "sets", "charts", "maps", "query"]);
    let version = cx.required(o, "", "schema_version").and_then(|v| v.as_u64().or_else(|| {
        cx.err("/schema_version", "expected an integer");
        None
    }));
    if let Some(v) = version {
        if v != SCHEMA_VERSION {
            cx.err("/schema_version", format!("unsupported version {v}, this build reads {SCHEMA_VERSION}"));
        }
    }
    let list = |key: &str, cx: &mut Ctx| -> Vec<(String, Value)> {
        match o.get(key) {
            None => vec![],
            Some(v) => cx.array(v, &format!("/{key}")).map(|a| a.iter().enumerate().map(|(i, x)| (format!("/{key}/{i}"), x.clone())).collect()).unwrap_or_default(),
        }
    };
    let set_vals = list("sets", cx);
    let chart_vals = list("charts", cx);
    let map_vals = list("maps", cx);
    let sets: Vec<Option<SetSpec>> = set_vals.iter().map(|(at, v)| cx.set(v, at)).collect();
    let charts: Vec<Option<ChartSpec>> = chart_vals.iter().map(|(at, v)| cx.chart(v, at)).collect();
    let maps: Vec<Option<MapSpec>> = map_vals.iter().map(|(at, v)| cx.map(v, at)).collect();

    // names are unique across sets, charts and maps
    let mut seen = BTreeSet::new();
    let names = sets
        .iter()
        .zip(&set_vals)
        .filter_map(|(s, (at, _))| s.as_ref().map(|s| (s.name.clone(), at.clone())))
        .chain(charts.iter().zip(&chart_vals).filter_map(|(s, (at, _))| s.as_ref().map(|s| (s.name.clone(), at.clone()))))
        .chain(maps.iter().zip(&map_vals).filter_map(|(s, (at, _))| s.as_ref().map(|s| (s.name.clone(), at.clone()))))
        .collect::<Vec<_>>();
    for (name, at) in names {
        if !seen.insert(name.clone()) {
            cx.err(&format!("{at}/name"), format!("duplicate name '{name}'"));
        }
    }

    // the query is checked against whatever parsed, so its errors are reported too
    let complete = sets.iter().all(Option::is_some) && charts.iter().all(Option::is_some) && maps.iter().all(Option::is_some);
    let sets: Vec<SetSpec> = sets.into_iter().flatten().collect();
    let charts: Vec<ChartSpec> = charts.into_iter().flatten().collect();
    let maps: Vec<MapSpec> = maps.into_iter().flatten().collect();
    let qv = cx.required(o, "", "query")?;
    let query = parse_query(cx, qv, &sets, &charts, &maps)?;
    complete.then_some(ProblemDocument { schema_version: SCHEMA_VERSION, sets, charts, maps, query })
}

fn parse_query(cx: &mut Ctx, v: &Value, sets: &[SetSpec], charts: &[ChartSpec], maps: &[MapSpec]) -> Option<Query> {
    let at = "/query";
    let o = cx.obj(v, at)?;
    cx.unknown_keys(o, at, &["command", "set", "maps", "restriction", "point", "seed", "exact", "params", "sampling"]);
    let command = cx.req_string(o, at, "command").and_then(|c| match Command::ALL.iter().find(|k| k.name() == c) {
        Some(k) => Some(*k),
        None => {
            cx.err("/query/command", format!("unknown command '{c}'"));
            None
        }
    });
    let set = cx.opt_string(o, at, "set");
    let restriction = cx.opt_string(o, at, "restriction");
    let map_names: Vec<String> = match o.get("maps") {
        None => vec![],
        Some(v) => cx
            .array(v, "/query/maps")
            .map(|a| a.iter().enumerate().filter_map(|(i, s)| cx.string_at(s, &format!("/query/maps/{i}"))).collect())
            .unwrap_or_default(),
    };
    let seed = o.get("seed").and_then(|v| v.as_u64().or_else(|| {
        cx.err("/query/seed", "expected a non-negative integer");
        None
    }));
    let exact = cx.opt_bool(o, at, "exact", false);
    let params = cx.params(o.get("params"), "/query/params");
    let sampling = cx.sampling(o.get("sampling"), "/query/sampling");

    // name resolution and dimensions
    let mut found_maps = Vec::new();
    for (i, name) in map_names.iter().enumerate() {
        match maps.iter().find(|m| &m.name == name) {
            Some(m) => found_maps.push(m),
            None => cx.err(&format!("/query/maps/{i}"), format!("no map named '{name}'")),
        }
    }
    let set_spec = set.as_ref().and_then(|name| {
        let s = sets.iter().find(|s| &s.name == name).map(|s| s.dim).or_else(|| charts.iter().find(|c| &c.name == name).map(|c| c.dim));
        if s.is_none() {
            cx.err("/query/set", format!("no set or chart named '{name}'"));
        }
        s
    });
    let restriction_dim = restriction.as_ref().and_then(|name| {
        let d = sets.iter().find(|s| &s.name == name).map(|s| s.dim).or_else(|| charts.iter().find(|c| &c.name == name).map(|c| c.dim));
        if d.is_none() {
            cx.err("/query/restriction", format!("no set or chart named '{name}'"));
        }
        d
    });

    let (xdim, udim) = match (command, found_maps.first()) {
        (Some(Command::Cone | Command::Normalcone), _) => {
            if set.is_none() {
                cx.err("/query/set", "missing required field");
            }
            (set_spec, Some(0))
        }
        (Some(cmd), first) => {
            if map_names.is_empty() {
                cx.err("/query/maps", "missing required field");
            }
            let want = match cmd {
                Command::Chain => 2,
                Command::Sum => 0,
                _ => 1,
            };
            if want > 0 && !map_names.is_empty() && map_names.len() != want {
                cx.err("/query/maps", format!("{} expects {want} map(s), found {}", cmd.name(), map_names.len()));
            }
            match cmd {
                Command::Chain if found_maps.len() == 2 => {
                    let (s1, s2) = (found_maps[0], found_maps[1]);
                    if s1.m != s2.n {
                        cx.err("/query/maps/1", format!("inner map has output dimension {}, outer map input dimension {}", s1.m, s2.n));
                    }
                    (Some(s1.n), Some(s2.m))
                }
                Command::Sum => {
                    if let Some(f) = first {
                        for (i, s) in found_maps.iter().enumerate() {
                            if s.n != f.n || s.m != f.m {
                                cx.err(&format!("/query/maps/{i}"), "summands must share dimensions");
                            }
                        }
                    }
                    (first.map(|f| f.n), first.map(|f| f.m))
                }
                _ => (first.map(|f| f.n), first.map(|f| f.m)),
            }
        }
        (None, _) => (None, None),
    };
    if let (Some(rd), Some(xd)) = (restriction_dim, xdim) {
        if rd != xd {
            cx.err("/query/restriction", format!("restriction lives in R^{rd}, map input in R^{xd}"));
        }
    }
    let point = match cx.required(o, at, "point").and_then(|p| cx.obj(p, "/query/point")) {
        Some(p) => {
            cx.unknown_keys(p, "/query/point", &["x", "u"]);
            let x = cx.required(p, "/query/point", "x").and_then(|x| cx.vector(x, "/query/point/x", xdim));
            let u = match (p.get("u"), udim) {
                (Some(u), d) => cx.vector(u, "/query/point/u", d),
                (None, Some(0)) => Some(vec![]),
                (None, _) => {
                    cx.err("/query/point/u", "missing required field");
                    None
                }
            };
            x.zip(u).map(|(x, u)| Point { x, u })
        }
        None => None,
    };
    Some(Query {
        command: command?,
        set,
        maps: map_names,
        restriction,
        point: point?,
        seed: seed.unwrap_or(0),
        exact,
        params,
        sampling: SamplingConfigEq(sampling),
    })
}
