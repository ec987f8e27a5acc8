//! Plot data for cone unions of ambient dimension at most 3: one polyline
//! per piece, tracing the piece's boundary on the unit sphere through the
//! origin.

use std::f64::consts::PI;

use serde::Serialize;

use super::run::Report;
use crate::cones::ConeUnion;
use crate::error::{Result, VakError};
use crate::geometry::ConvexPolyhedron;
use crate::linalg::{self, Mat};

/// Points per radian along arcs.
const ARC_DENSITY: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotFormat {
    Csv,
    Json,
}

impl PlotFormat {
    /// `.json` gives JSON, anything else CSV.
    pub fn from_path(p: &std::path::Path) -> Self {
        match p.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => PlotFormat::Json,
            _ => PlotFormat::Csv,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Series {
    pub label: String,
    pub piece: usize,
    pub points: Mat<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlotData {
    pub dim: usize,
    pub series: Vec<Series>,
}

pub fn plot_data(cones: &[(String, ConeUnion<f64>)]) -> Result<PlotData> {
    let dim = cones.iter().map(|(_, k)| k.dim()).max().unwrap_or(0);
    if dim > 3 {
        return Err(VakError::DimensionTooHigh(dim));
    }
    let mut series = Vec::new();
    for (label, k) in cones {
        for (i, p) in k.pieces().iter().enumerate() {
            let mut points = piece_polyline(p);
            for q in &mut points {
                q.resize(dim, 0.0);
            }
            series.push(Series { label: label.clone(), piece: i, points });
        }
    }
    Ok(PlotData { dim, series })
}

pub fn emit_plot_data(report: &Report, format: PlotFormat) -> Result<String> {
    let data = plot_data(&report.cones)?;
    Ok(match format {
        PlotFormat::Json => serde_json::to_string_pretty(&data).expect("plot serializes"),
        PlotFormat::Csv => {
            let mut out = String::from("label,piece,point");
            for j in 0..data.dim {
                out.push_str(&format!(",c{}", j + 1));
            }
            out.push('\n');
            for s in &data.series {
                for (k, p) in s.points.iter().enumerate() {
                    out.push_str(&format!("{},{},{}", s.label, s.piece, k));
                    for c in p {
                        out.push_str(&format!(",{c}"));
                    }
                    out.push('\n');
                }
            }
            out
        }
    })
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = linalg::norm_f64(v);
    v.iter().map(|x| x / n).collect()
}

/// Great-circle arc from `a` to `b` (unit, not antipodal), endpoints included.
fn arc(a: &[f64], b: &[f64]) -> Mat<f64> {
    let cos = linalg::dot(a, b).clamp(-1.0, 1.0);
    let theta = cos.acos();
    let steps = ((theta * ARC_DENSITY).ceil() as usize).max(1);
    (0..=steps)
        .map(|k| {
            let t = k as f64 / steps as f64;
            if theta < 1e-12 {
                return a.to_vec();
            }
            let (wa, wb) = (((1.0 - t) * theta).sin() / theta.sin(), (t * theta).sin() / theta.sin());
            a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
        })
        .collect()
}

/// Arc through the chain `points`, dropping the duplicated joints.
fn chain(points: &[Vec<f64>]) -> Mat<f64> {
    let mut out: Mat<f64> = vec![points[0].clone()];
    for w in points.windows(2) {
        out.extend(arc(&w[0], &w[1]).into_iter().skip(1));
    }
    out
}

/// Orthonormal basis of the span of `vs`.
fn span_basis(vs: &[Vec<f64>]) -> Mat<f64> {
    let mut basis: Mat<f64> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for b in &basis {
            let c = linalg::dot(&w, b);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        if linalg::norm_f64(&w) > 1e-9 {
            basis.push(unit(&w));
        }
    }
    basis
}

fn piece_polyline(p: &ConvexPolyhedron<f64>) -> Mat<f64> {
    let v = p.vrep();
    let rays: Mat<f64> = v.rays.iter().map(|r| unit(r)).collect();
    let lin: Mat<f64> = v.lineality.iter().map(|l| unit(l)).collect();
    let d = p.dim();
    let origin = vec![0.0; d];
    let gens: Mat<f64> = rays.iter().cloned().chain(lin.iter().cloned()).chain(lin.iter().map(|l| linalg::neg(l))).collect();
    let basis = span_basis(&gens);
    match basis.len() {
        0 => vec![origin],
        1 => {
            let b = &basis[0];
            let (mut lo, mut hi) = (0.0f64, 0.0f64);
            for g in &gens {
                let t = linalg::dot(g, b);
                lo = lo.min(t);
                hi = hi.max(t);
            }
            let at = |t: f64| b.iter().map(|x| x * t).collect::<Vec<_>>();
            let mut out = Vec::new();
            if lo < -0.5 {
                out.push(at(-1.0));
            }
            out.push(origin);
            if hi > 0.5 {
                out.push(at(1.0));
            }
            out
        }
        2 => {
            // work in the plane's coordinates, then lift
            let (e1, e2) = (&basis[0], &basis[1]);
            let lift = |(c1, c2): (f64, f64)| e1.iter().zip(e2).map(|(a, b)| c1 * a + c2 * b).collect::<Vec<_>>();
            let planar: Vec<(f64, f64)> = gens.iter().map(|g| (linalg::dot(g, e1), linalg::dot(g, e2))).collect();
            match planar_interval(&planar, lin.len()) {
                None => (0..=(2.0 * PI * ARC_DENSITY) as usize)
                    .map(|k| {
                        let t = 2.0 * PI * k as f64 / (2.0 * PI * ARC_DENSITY).floor();
                        lift((t.cos(), t.sin()))
                    })
                    .collect(),
                Some((a0, a1)) => {
                    let steps = (((a1 - a0) * ARC_DENSITY).ceil() as usize).max(1);
                    let mut out = vec![origin.clone()];
                    out.extend((0..=steps).map(|k| {
                        let t = a0 + (a1 - a0) * k as f64 / steps as f64;
                        lift((t.cos(), t.sin()))
                    }));
                    out.push(origin);
                    out
                }
            }
        }
        _ => {
            if lin.is_empty() {
                // pointed: the cross-section is a polygon with the rays as vertices
                let axis = unit(&rays.iter().fold(vec![0.0; d], |acc, r| linalg::add(&acc, r)));
                let tb = span_basis(&[axis.clone(), vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]);
                let mut order: Vec<(f64, Vec<f64>)> = rays.iter().map(|r| (linalg::dot(r, &tb[2]).atan2(linalg::dot(r, &tb[1])), r.clone())).collect();
                order.sort_by(|a, b| a.0.total_cmp(&b.0));
                let mut ring: Mat<f64> = order.into_iter().map(|(_, r)| r).collect();
                ring.push(ring[0].clone());
                let mut out = vec![origin];
                out.extend(chain(&ring));
                out
            } else {
                // non-pointed: star of generators through the origin
                let mut out = vec![origin.clone()];
                for g in &gens {
                    out.push(g.clone());
                    out.push(origin.clone());
                }
                out
            }
        }
    }
}

/// Angular interval `[a0, a1]` covered by a planar cone, `None` for the
/// whole plane.
fn planar_interval(gens: &[(f64, f64)], lineality: usize) -> Option<(f64, f64)> {
    if lineality >= 2 {
        return None;
    }
    let angles: Vec<f64> = gens.iter().map(|(x, y)| y.atan2(*x)).collect();
    // the cone is the shortest arc covering all generator angles: find the
    // largest gap between consecutive angles and start just after it
    let mut sorted = angles.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    if sorted.len() == 1 {
        return Some((sorted[0], sorted[0]));
    }
    let k = sorted.len();
    let (mut best, mut start) = (-1.0, 0);
    for i in 0..k {
        let gap = if i + 1 < k { sorted[i + 1] - sorted[i] } else { sorted[0] + 2.0 * PI - sorted[k - 1] };
        if gap > best {
            best = gap;
            start = (i + 1) % k;
        }
    }
    let a0 = sorted[start];
    let a1 = a0 + (2.0 * PI - best);
    if best < 1e-9 {
        return None;
    }
    Some((a0, a1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cone(rays: Mat<f64>, lin: Mat<f64>) -> ConeUnion<f64> {
        let d = rays.first().or(lin.first()).map_or(2, |r| r.len());
        ConeUnion::from_generators(d, rays, lin).unwrap()
    }

    #[test]
    fn single_ray_is_two_points() {
        let d = plot_data(&[("k".into(), cone(vec![vec![3.0, 4.0]], vec![]))]).unwrap();
        assert_eq!(d.series.len(), 1);
        let pts = &d.series[0].points;
        assert_eq!(pts.len(), 2);
        assert!((pts[1][0] - 0.6).abs() < 1e-12 && (pts[1][1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn empty_cone_is_header_only() {
        let d = plot_data(&[("k".into(), ConeUnion::<f64>::empty(2))]).unwrap();
        assert!(d.series.is_empty());
    }

    #[test]
    fn quadrant_arc_stays_inside() {
        let d = plot_data(&[("k".into(), cone(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![]))]).unwrap();
        let pts = &d.series[0].points;
        assert_eq!(pts.first().unwrap(), &vec![0.0, 0.0]);
        assert_eq!(pts.last().unwrap(), &vec![0.0, 0.0]);
        for p in &pts[1..pts.len() - 1] {
            assert!(p[0] >= -1e-12 && p[1] >= -1e-12);
            assert!((linalg::norm_f64(p) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn half_plane_spans_pi() {
        let d = plot_data(&[("k".into(), cone(vec![vec![0.0, 1.0]], vec![vec![1.0, 0.0]]))]).unwrap();
        let pts = &d.series[0].points;
        for p in &pts[1..pts.len() - 1] {
            assert!(p[1] >= -1e-9);
        }
        assert!(pts.iter().any(|p| (p[0] - 1.0).abs() < 1e-9) && pts.iter().any(|p| (p[0] + 1.0).abs() < 1e-9));
    }

    #[test]
    fn four_dimensional_cones_are_rejected() {
        let k = cone(vec![vec![1.0, 0.0, 0.0, 0.0]], vec![]);
        assert!(matches!(plot_data(&[("k".into(), k)]), Err(VakError::DimensionTooHigh(4))));
    }
}
