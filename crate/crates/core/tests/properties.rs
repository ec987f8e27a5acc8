//! Property tests for the invariants each module promises.

mod common;

use common::{battery_instance, q, random_map, zeros};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vak::arrangement::CELL_BUDGET;
use vak::calculus::sum_rule_1;
use vak::cones::{moreau_decomposition, project_onto_convex_cone};
use vak::expr::Expr;
use vak::linalg;
use vak::manifold::ManifoldChart;
use vak::maps::{PolyMap, PosHomMap};
use vak::projcode::{fixed_point_forms, projcode_manifold_fixed_point, projcode_polyhedral};
use vak::sets::FiniteUnionSet;
use vak::{cone_union_equal, project_cone_union, ConeUnion, ConvexPolyhedron, Rational, Scalar};

type Mat = Vec<Vec<i64>>;

fn qm(m: &Mat) -> Vec<Vec<Rational>> {
    m.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
}

fn fm(m: &Mat) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect()
}

fn int_rows(rows: std::ops::RangeInclusive<usize>, cols: usize) -> impl Strategy<Value = Mat> {
    prop::collection::vec(prop::collection::vec(-2i64..=2, cols), rows)
}

fn dim_and_rows(rows: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (usize, Mat)> {
    (2usize..=3).prop_flat_map(move |d| (Just(d), int_rows(rows.clone(), d)))
}

fn equal<S: Scalar>(a: &ConeUnion<S>, b: &ConeUnion<S>) -> bool {
    cone_union_equal(a, b).unwrap().equal
}

fn covered<S: Scalar>(a: &ConeUnion<S>, b: &ConeUnion<S>) -> bool {
    a.subset_of(b).unwrap().is_none()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

// ---- geometry ----

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn double_description_round_trips((d, a) in dim_and_rows(1..=5), b in prop::collection::vec(-1i64..=2, 5)) {
        let b: Vec<Rational> = b[..a.len()].iter().map(|&v| q(v)).collect();
        let p = ConvexPolyhedron::from_hrep(d, qm(&a), b, vec![], vec![]).unwrap();
        prop_assume!(!p.is_empty());
        let v = p.vrep().clone();
        let back = ConvexPolyhedron::from_vrep(d, v.vertices.clone(), v.rays.clone(), v.lineality.clone()).unwrap();
        prop_assert!(back.set_equal(&p));
        for x in &v.vertices {
            prop_assert!(p.contains(x));
        }
        for r in v.rays.iter().chain(&v.lineality) {
            prop_assert!(p.contains_direction(r));
        }
        // and the float path agrees
        let pf = p.convert::<f64>();
        let vf = pf.vrep().clone();
        let backf = ConvexPolyhedron::from_vrep(d, vf.vertices, vf.rays, vf.lineality).unwrap();
        prop_assert!(backf.set_equal(&pf));
    }

    #[test]
    fn polar_is_an_involution((d, rays) in dim_and_rows(1..=4), lin in int_rows(0..=1, 3)) {
        let lin: Mat = lin.iter().map(|r| r[..d].to_vec()).collect();
        let k = ConvexPolyhedron::cone(d, qm(&rays), qm(&lin)).unwrap();
        let back = k.polar_cone().unwrap().polar_cone().unwrap();
        prop_assert!(back.set_equal(&k));
        let kf = k.convert::<f64>();
        prop_assert!(kf.polar_cone().unwrap().polar_cone().unwrap().set_equal(&kf));
    }

    #[test]
    fn projection_is_idempotent_and_beats_a_grid(a in int_rows(1..=3, 2), b in prop::collection::vec(0i64..=2, 3), z in prop::collection::vec(-5.0f64..5.0, 2)) {
        let mut rows = fm(&a);
        let mut rhs: Vec<f64> = b[..a.len()].iter().map(|&v| v as f64).collect();
        for i in 0..2 {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; 2];
                e[i] = s;
                rows.push(e);
                rhs.push(2.0);
            }
        }
        let p = ConvexPolyhedron::from_hrep(2, rows, rhs, vec![], vec![]).unwrap();
        prop_assume!(!p.is_empty());
        let x = p.project_point(&z).unwrap();
        let again = p.project_point(&x).unwrap();
        prop_assert!(linalg::norm_f64(&linalg::sub(&x, &again)) <= 1e-10);
        prop_assert!(p.max_violation(&x) <= 1e-9);
        let dist = p.distance_f64(&z);
        prop_assert!((dist - linalg::norm_f64(&linalg::sub(&z, &x))).abs() <= 1e-10);
        // every feasible grid point is at least as far away
        let steps = 80;
        let mut best = f64::INFINITY;
        for i in 0..=steps {
            for j in 0..=steps {
                let g = [-2.0 + 4.0 * i as f64 / steps as f64, -2.0 + 4.0 * j as f64 / steps as f64];
                if p.contains(&g) {
                    best = best.min(linalg::norm_f64(&linalg::sub(&z, &g)));
                }
            }
        }
        prop_assert!(dist <= best + 1e-6, "{dist} > grid {best}");
    }
}

// ---- cones ----

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn moreau_identity((d, rays) in dim_and_rows(1..=4), zs in prop::collection::vec(prop::collection::vec(-3.0f64..3.0, 3), 20)) {
        let t = ConvexPolyhedron::cone(d, fm(&rays), vec![]).unwrap();
        for z in zs {
            let z = &z[..d];
            let (p, r) = moreau_decomposition(&t, z).unwrap();
            let resid = linalg::sub(&linalg::sub(z, &p), &r);
            prop_assert!(linalg::norm_f64(&resid) <= 1e-10);
            prop_assert!(linalg::dot(&p, &r) <= 1e-10);
            prop_assert!(t.contains(&p));
        }
    }

    #[test]
    fn cone_projection_commutes_with_scaling((d, t_rays) in dim_and_rows(1..=3), k1 in int_rows(1..=3, 3), k2 in int_rows(1..=2, 3), lambda in 1i64..=5, mu in 1i64..=3) {
        let cut = |m: &Mat| -> Mat { m.iter().map(|r| r[..d].to_vec()).collect() };
        let t = ConvexPolyhedron::cone(d, qm(&t_rays), vec![]).unwrap();
        let scale = Rational::from_i64(lambda) / Rational::from_i64(mu);
        let union = |s: &Rational| -> ConeUnion<Rational> {
            let pieces = [cut(&k1), cut(&k2)]
                .iter()
                .map(|g| ConvexPolyhedron::cone(d, qm(g).iter().map(|r| linalg::scale(r, s)).collect(), vec![]).unwrap())
                .collect();
            ConeUnion::new(d, pieces).unwrap()
        };
        let a = project_cone_union(&t, &union(&Rational::one())).unwrap();
        let b = project_cone_union(&t, &union(&scale)).unwrap();
        prop_assert!(equal(&a, &b));
    }

    #[test]
    fn subspace_projection_is_the_projector_image((d, basis) in dim_and_rows(1..=2), k in int_rows(1..=3, 4), r in 0usize..=1) {
        prop_assume!(linalg::rank(&qm(&basis), d) > 0);
        let t = ConvexPolyhedron::subspace(d, qm(&basis)).unwrap();
        let gens: Mat = k.iter().map(|row| row[..d + r].to_vec()).collect();
        let kk = ConeUnion::from_generators(d + r, qm(&gens), vec![]).unwrap();
        let p = linalg::projector(&qm(&basis), d);
        // block diagonal: projector on x, identity on the trailing coordinates
        let full: Vec<Vec<Rational>> = (0..d + r)
            .map(|i| (0..d + r).map(|j| if i < d && j < d { p[i][j].clone() } else if i == j { q(1) } else { q(0) }).collect())
            .collect();
        let image = kk.linear_image(&full).unwrap();
        prop_assert!(equal(&project_cone_union(&t, &kk).unwrap(), &image));
    }
}

// ---- sets ----

fn union_through_origin(pieces: &[(Mat, Vec<i64>)]) -> FiniteUnionSet<Rational> {
    let ps = pieces
        .iter()
        .map(|(a, b)| ConvexPolyhedron::from_hrep(2, qm(a), b[..a.len()].iter().map(|&v| q(v)).collect(), vec![], vec![]).unwrap())
        .filter(|p| !p.is_empty())
        .collect();
    FiniteUnionSet::new(2, ps).unwrap()
}

fn pieces_strategy(max: usize) -> impl Strategy<Value = Vec<(Mat, Vec<i64>)>> {
    prop::collection::vec((int_rows(1..=3, 2), prop::collection::vec(0i64..=1, 3)), 1..=max)
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn regular_normals_sit_inside_limiting_normals(pieces in pieces_strategy(3)) {
        let c = union_through_origin(&pieces);
        let x = zeros(2);
        prop_assume!(c.contains(&x));
        let reg = ConeUnion::from_cone(c.regular_normal_cone_at(&x).unwrap()).unwrap();
        let lim = c.limiting_normal_cone_at(&x).unwrap();
        prop_assert!(covered(&reg, &lim));
    }

    #[test]
    fn convex_sets_have_one_normal_cone(pieces in pieces_strategy(1)) {
        let c = union_through_origin(&pieces);
        let x = zeros(2);
        prop_assume!(c.contains(&x));
        let reg = ConeUnion::from_cone(c.regular_normal_cone_at(&x).unwrap()).unwrap();
        prop_assert!(equal(&reg, &c.limiting_normal_cone_at(&x).unwrap()));
    }

    #[test]
    fn tangent_and_regular_normal_are_polar(pieces in pieces_strategy(3)) {
        let c = union_through_origin(&pieces);
        let x = zeros(2);
        prop_assume!(c.contains(&x));
        let normal = c.regular_normal_cone_at(&x).unwrap();
        let tangent = c.tangent_cone_at(&x).unwrap();
        let mut polar = ConvexPolyhedron::universe(2);
        for t in tangent.pieces() {
            polar = polar.intersect(&t.polar_cone().unwrap()).unwrap();
        }
        prop_assert!(polar.set_equal(&normal));
        let back = normal.polar_cone().unwrap();
        for t in tangent.pieces() {
            prop_assert!(back.contains_polyhedron(t));
        }
    }

    #[test]
    fn limiting_normals_are_stable_under_halved_localization(pieces in pieces_strategy(3)) {
        let c = union_through_origin(&pieces);
        let x = zeros(2);
        prop_assume!(c.contains(&x));
        let full = c.limiting_normal_cone_with(&x, &q(1), CELL_BUDGET).unwrap();
        let half = c.limiting_normal_cone_with(&x, &(q(1) / q(2)), CELL_BUDGET).unwrap();
        prop_assert!(equal(&full, &half));
    }
}

// ---- manifold ----

fn ellipse(a: u32, b: u32) -> ManifoldChart {
    let e = format!("(- (+ (* {a} (pow x1 2)) (* {b} (pow x2 2))) 1)");
    ManifoldChart::global(2, vec![Expr::parse(&e).unwrap()]).unwrap()
}

fn ellipse_point(a: u32, b: u32, th: f64) -> Vec<f64> {
    vec![th.cos() / (a as f64).sqrt(), th.sin() / (b as f64).sqrt()]
}

/// Great circle of the unit sphere in the plane `x1 + x2 + x3 = 0`.
fn great_circle() -> ManifoldChart {
    let comps = ["(- (+ (+ (pow x1 2) (pow x2 2)) (pow x3 2)) 1)", "(+ (+ x1 x2) x3)"];
    ManifoldChart::global(3, comps.iter().map(|e| Expr::parse(e).unwrap()).collect()).unwrap()
}

fn great_circle_point(th: f64) -> Vec<f64> {
    let (s2, s6) = (2f64.sqrt(), 6f64.sqrt());
    (0..3).map(|i| th.cos() * [1.0 / s2, -1.0 / s2, 0.0][i] + th.sin() * [1.0 / s6, 1.0 / s6, -2.0 / s6][i]).collect()
}

#[derive(Debug, Clone)]
enum Curve {
    Ellipse(u32, u32),
    GreatCircle,
}

impl Curve {
    fn chart(&self) -> ManifoldChart {
        match *self {
            Curve::Ellipse(a, b) => ellipse(a, b),
            Curve::GreatCircle => great_circle(),
        }
    }
    fn at(&self, th: f64) -> Vec<f64> {
        match *self {
            Curve::Ellipse(a, b) => ellipse_point(a, b, th),
            Curve::GreatCircle => great_circle_point(th),
        }
    }
}

fn curves() -> impl Strategy<Value = Curve> {
    prop_oneof![(1u32..=4, 1u32..=4).prop_map(|(a, b)| Curve::Ellipse(a, b)), Just(Curve::GreatCircle)]
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn tangent_and_normal_spaces_are_complementary(c in curves(), th in 0.0f64..std::f64::consts::TAU) {
        let (chart, x) = (c.chart(), c.at(th));
        let n = x.len();
        prop_assert!(chart.on_manifold(&x));
        let u = chart.tangent_basis(&x).unwrap();
        let v = chart.normal_basis(&x).unwrap();
        for a in &u {
            for b in &v {
                prop_assert!(linalg::dot(a, b).abs() <= 1e-10);
            }
        }
        prop_assert_eq!(linalg::rank(&u, n) + linalg::rank(&v, n), n);
    }

    #[test]
    fn tangent_projector_is_continuous(c in curves(), th in 0.0f64..std::f64::consts::TAU, z in prop::collection::vec(-3.0f64..3.0, 3), dz in prop::collection::vec(-1.0f64..1.0, 3)) {
        let (chart, x) = (c.chart(), c.at(th));
        let n = x.len();
        let z = &z[..n];
        let p = linalg::mat_vec(&chart.tangent_projector(&x).unwrap(), z);
        for k in [1e-8, 1e-9, 1e-10] {
            let xk = c.at(th + k);
            prop_assert!(linalg::norm_f64(&linalg::sub(&xk, &x)) <= 1e-8 * 2.0);
            let zk = linalg::axpy(z, &k, &dz[..n]);
            let pk = linalg::mat_vec(&chart.tangent_projector(&xk).unwrap(), &zk);
            prop_assert!(linalg::norm_f64(&linalg::sub(&pk, &p)) <= 1e-6);
        }
    }

    #[test]
    fn tangent_projector_matches_cone_projection(c in curves(), th in 0.0f64..std::f64::consts::TAU, z in prop::collection::vec(-3.0f64..3.0, 3)) {
        let (chart, x) = (c.chart(), c.at(th));
        let z = &z[..x.len()];
        let by_matrix = linalg::mat_vec(&chart.tangent_projector(&x).unwrap(), z);
        let by_cone = project_onto_convex_cone(&chart.tangent_space(&x).unwrap(), z).unwrap();
        prop_assert!(linalg::norm_f64(&linalg::sub(&by_matrix, &by_cone)) <= 1e-10);
    }
}

// ---- maps ----

fn random_box_map(seed: u64) -> (PolyMap<Rational>, usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 1 + (seed % 2) as usize;
    let k = 1 + (seed / 2 % 2) as usize;
    (random_map(&mut rng, n, k, false), n, k)
}

fn unit_box(n: usize) -> FiniteUnionSet<Rational> {
    FiniteUnionSet::from_polyhedron(ConvexPolyhedron::boxed(&vec![q(-1); n], &vec![q(1); n]).unwrap())
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn regular_coderivative_is_inside_the_limiting_one(seed in any::<u64>()) {
        let (s, n, k) = random_box_map(seed);
        let reg = s.regular_coderivative(&zeros(n), &zeros(k)).unwrap();
        let lim = s.coderivative(&zeros(n), &zeros(k)).unwrap();
        prop_assert!(covered(reg.graph(), lim.graph()));
    }

    #[test]
    fn coderivative_graphs_are_cones(seed in any::<u64>(), lambda in 1i64..=7, mu in 1i64..=7) {
        let (s, n, k) = random_box_map(seed);
        let d = s.coderivative(&zeros(n), &zeros(k)).unwrap();
        let t = Rational::from_i64(lambda) / Rational::from_i64(mu);
        for g in d.graph().generators() {
            prop_assert!(d.graph().contains(&linalg::scale(&g, &t)));
        }
    }

    #[test]
    fn restriction_is_invisible_at_interior_points(seed in any::<u64>()) {
        let (s, n, k) = random_box_map(seed);
        let whole = s.coderivative(&zeros(n), &zeros(k)).unwrap();
        let restricted = s.restrict(&unit_box(n)).unwrap().coderivative(&zeros(n), &zeros(k)).unwrap();
        prop_assert!(whole.equal(&restricted).unwrap().equal);
    }

    #[test]
    fn inverse_at_zero_inclusion(seed in 0u64..10_000) {
        let (s, x, n, m) = battery_instance(seed);
        let x = FiniteUnionSet::from_polyhedron(x);
        let restricted = s.restrict(&x).unwrap().coderivative(&zeros(n), &zeros(m)).unwrap();
        let projected = projcode_polyhedral(&s, &x, &zeros(n), &zeros(m)).unwrap().map;
        prop_assert!(covered(&restricted.preimage_of_zero().unwrap(), &projected.preimage_of_zero().unwrap()));
    }
}

// ---- projcode ----

fn chart_of_subspace(x: &ConvexPolyhedron<Rational>, n: usize) -> Option<ManifoldChart> {
    if x.c().is_empty() {
        return None;
    }
    let term = |row: &Vec<Rational>| -> String {
        row.iter().enumerate().fold("0".to_string(), |acc, (i, c)| format!("(+ {acc} (* {} x{}))", c.to_literal(), i + 1))
    };
    let rows = x.c();
    let idx = linalg::independent_rows(rows, n);
    ManifoldChart::global(n, idx.iter().map(|&i| Expr::parse(&term(&rows[i])).unwrap()).collect()).ok()
}

proptest! {
    #![proptest_config(config(32))]

    #[test]
    fn fixed_point_forms_on_affine_restrictions(seed in 0u64..10_000) {
        let (s, x, n, m) = battery_instance(seed);
        let xs = FiniteUnionSet::from_polyhedron(x.clone());
        let restricted = s.restrict(&xs).unwrap().coderivative(&zeros(n), &zeros(m)).unwrap();
        let tangent = x.tangent_cone_at(&zeros(n));
        // the projection and intersection forms agree (an error otherwise)
        let forms = fixed_point_forms(&restricted, &tangent).unwrap();
        // and equal the outer limit computed over nearby points
        let outer = projcode_polyhedral(&s, &xs, &zeros(n), &zeros(m)).unwrap().map;
        prop_assert!(outer.equal(&forms.projection).unwrap().equal);
    }

    #[test]
    fn routes_agree_on_affine_charts(seed in 0u64..10_000) {
        let (s, x, n, m) = battery_instance(seed);
        let Some(chart) = chart_of_subspace(&x, n) else { return Ok(()) };
        let (via_chart, _) = projcode_manifold_fixed_point(&s, &chart, &zeros(n), &zeros(m)).unwrap();
        let exact = projcode_polyhedral(&s, &FiniteUnionSet::from_polyhedron(x), &zeros(n), &zeros(m)).unwrap();
        prop_assert!(via_chart.map.equal(&exact.map).unwrap().equal);
    }

    #[test]
    fn projectional_coderivatives_are_homogeneous(seed in 0u64..10_000, lambda in 1i64..=9, mu in 1i64..=9) {
        let (s, x, n, m) = battery_instance(seed);
        let map = projcode_polyhedral(&s, &FiniteUnionSet::from_polyhedron(x), &zeros(n), &zeros(m)).unwrap().map;
        let t = Rational::from_i64(lambda) / Rational::from_i64(mu);
        for g in map.graph().generators() {
            prop_assert!(map.graph().contains(&linalg::scale(&g, &t)));
        }
    }
}

// ---- calculus ----

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn normal_space_shift_is_invisible_after_projection(seed in 0u64..10_000) {
        let (s, x, n, m) = battery_instance(seed);
        let xs = FiniteUnionSet::from_polyhedron(x.clone());
        let h = s.restrict(&xs).unwrap().coderivative(&zeros(n), &zeros(m)).unwrap();
        let tangent = x.tangent_cone_at(&zeros(n));
        let normal = tangent.polar_cone().unwrap();
        let shift = PosHomMap::new(m, n, ConeUnion::new(m + n, vec![ConvexPolyhedron::universe(m).product(&normal)]).unwrap()).unwrap();
        let shifted = PosHomMap::sum(&[h.clone(), shift]).unwrap();
        let a = h.project_output(&tangent).unwrap();
        let b = shifted.project_output(&tangent).unwrap();
        prop_assert!(a.equal(&b).unwrap().equal);
    }

    #[test]
    fn sum_rule_certificates_recheck(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed % 2) as usize;
        let maps = [random_map(&mut rng, n, 1, true), random_map(&mut rng, n, 1, true)];
        let x = common::random_affine_set(&mut rng, n);
        let r = sum_rule_1(&maps, &x, &zeros(n), &zeros(1)).unwrap();
        if r.inclusion_holds == Some(true) {
            let (lhs, rhs) = (r.lhs.as_ref().unwrap(), r.rhs.as_ref().unwrap());
            for g in lhs.graph().generators() {
                prop_assert!(rhs.graph().contains(&g));
            }
        }
        if !r.cq_holds {
            prop_assert!(r.rhs.is_none() && r.cq_witness.is_some());
        }
    }
}
