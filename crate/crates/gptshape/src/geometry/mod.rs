//! Closed-curve representation, a parametric shape library, point-cloud
//! ingestion and resampling, point-in-loop tests, and Hausdorff distance.

pub mod shapes;
pub mod spline;

pub use shapes::{make_shape, CirclesPart, ShapeSpec};

use spline::PeriodicSpline;
use thiserror::Error;

/// Default tolerance at which a query point counts as lying on a loop.
pub const DEFAULT_ON_BOUNDARY_TOL: f64 = 1e-6;

/// Inputs with more points than this are stride-decimated before spline
/// fitting.
const MAX_SPLINE_INPUT: usize = 2048;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("need at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },
    #[error("need at least 16 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("degenerate input: total loop length is zero")]
    DegenerateLoop,
    #[error("point set is empty")]
    EmptySet,
    #[error("invalid shape parameter: {0}")]
    InvalidShape(String),
    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Closed discretized curve with per-node differential data and arclength
/// quadrature weights. Orientation is always counterclockwise.
#[derive(Debug, Clone)]
pub struct BoundaryCurve {
    nodes: Vec<[f64; 2]>,
    tangents: Vec<[f64; 2]>,
    normals: Vec<[f64; 2]>,
    curvature: Vec<f64>,
    weights: Vec<f64>,
    closed: bool,
}

impl BoundaryCurve {
    pub(crate) fn from_parts(
        nodes: Vec<[f64; 2]>,
        tangents: Vec<[f64; 2]>,
        normals: Vec<[f64; 2]>,
        curvature: Vec<f64>,
        weights: Vec<f64>,
    ) -> Result<Self, GeometryError> {
        let n = nodes.len();
        if n < 16 {
            return Err(GeometryError::TooFewNodes(n));
        }
        debug_assert!(tangents.len() == n && normals.len() == n);
        debug_assert!(curvature.len() == n && weights.len() == n);
        debug_assert!(
            signed_area(&nodes) > 0.0,
            "boundary curve must be counterclockwise"
        );
        Ok(Self {
            nodes,
            tangents,
            normals,
            curvature,
            weights,
            closed: true,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn tangents(&self) -> &[[f64; 2]] {
        &self.tangents
    }

    pub fn normals(&self) -> &[[f64; 2]] {
        &self.normals
    }

    pub fn curvature(&self) -> &[f64] {
        &self.curvature
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn perimeter(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.nodes)
    }
}

pub fn signed_area(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    let mut acc = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        acc += pts[i][0] * pts[j][1] - pts[j][0] * pts[i][1];
    }
    0.5 * acc
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Periodic-spline fit of an ordered closed loop, resampled to `n` nodes
/// uniformly in arclength. Inputs with negative signed area are reversed;
/// oversize inputs are stride-decimated deterministically.
pub fn resample(points: &[[f64; 2]], n: usize) -> Result<BoundaryCurve, GeometryError> {
    if n < 16 {
        return Err(GeometryError::TooFewNodes(n));
    }
    // drop an explicit closing point and consecutive duplicates
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(points.len());
    for &p in points {
        if pts.last().map_or(true, |q| dist(*q, p) > 1e-14) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && dist(pts[0], *pts.last().unwrap()) <= 1e-14 {
        pts.pop();
    }
    if pts.len() < 8 {
        return Err(GeometryError::TooFewPoints {
            min: 8,
            got: pts.len(),
        });
    }
    let total_chord: f64 = (0..pts.len())
        .map(|i| dist(pts[i], pts[(i + 1) % pts.len()]))
        .sum();
    if total_chord <= 0.0 {
        return Err(GeometryError::DegenerateLoop);
    }
    if pts.len() > MAX_SPLINE_INPUT {
        let stride = pts.len().div_ceil(MAX_SPLINE_INPUT);
        pts = pts.iter().step_by(stride).copied().collect();
    }
    if signed_area(&pts) < 0.0 {
        pts[1..].reverse();
    }

    let sp = PeriodicSpline::fit(&pts);
    let table = sp.arclength_table(16);
    let total = *table.1.last().unwrap();
    let ds = total / n as f64;

    let mut nodes = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    let weights = vec![ds; n];
    let kappa_cap = 1.0 / ds;
    for k in 0..n {
        let t = sp.param_at_arclength(k as f64 * ds, &table);
        let p = sp.eval(t);
        let d1 = sp.deriv(t);
        let d2 = sp.deriv2(t);
        let speed = d1[0].hypot(d1[1]).max(1e-300);
        let tan = [d1[0] / speed, d1[1] / speed];
        let mut kappa = (d1[0] * d2[1] - d1[1] * d2[0]) / (speed * speed * speed);
        kappa = kappa.clamp(-kappa_cap, kappa_cap);
        nodes.push(p);
        tangents.push(tan);
        // outward normal for a counterclockwise curve
        normals.push([tan[1], -tan[0]]);
        curvature.push(kappa);
    }
    BoundaryCurve::from_parts(nodes, tangents, normals, curvature, weights)
}

/// Hausdorff distance between two discrete point sets.
pub fn hausdorff(a: &[[f64; 2]], b: &[[f64; 2]]) -> Result<f64, GeometryError> {
    if a.is_empty() || b.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let directed = |from: &[[f64; 2]], to: &[[f64; 2]]| {
        from.iter()
            .map(|p| {
                to.iter()
                    .map(|q| dist(*p, *q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Hausdorff distance between two closed polylines, measuring point-to-segment
/// distances. Unlike the point-set version this does not suffer a sampling
/// floor at the node spacing scale.
pub fn hausdorff_loops(a: &[[f64; 2]], b: &[[f64; 2]]) -> Result<f64, GeometryError> {
    if a.is_empty() || b.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let directed = |from: &[[f64; 2]], to: &[[f64; 2]]| {
        from.iter()
            .map(|p| distance_to_loop(to, *p))
            .fold(0.0f64, f64::max)
    };
    Ok(directed(a, b).max(directed(b, a)))
}

/// Distance from `q` to the closed polyline through `pts`.
pub fn distance_to_loop(pts: &[[f64; 2]], q: [f64; 2]) -> f64 {
    let n = pts.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let ab = [b[0] - a[0], b[1] - a[1]];
        let aq = [q[0] - a[0], q[1] - a[1]];
        let len2 = ab[0] * ab[0] + ab[1] * ab[1];
        let t = if len2 > 0.0 {
            ((aq[0] * ab[0] + aq[1] * ab[1]) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let proj = [a[0] + t * ab[0], a[1] + t * ab[1]];
        best = best.min(dist(q, proj));
    }
    best
}

/// Winding-number containment test. Points within `tol_on` of the loop count
/// as contained.
pub fn contains_point(loop_pts: &[[f64; 2]], q: [f64; 2], tol_on: f64) -> bool {
    if loop_pts.len() < 3 {
        return false;
    }
    if distance_to_loop(loop_pts, q) <= tol_on {
        return true;
    }
    let n = loop_pts.len();
    let mut angle = 0.0;
    for i in 0..n {
        let a = loop_pts[i];
        let b = loop_pts[(i + 1) % n];
        let u = [a[0] - q[0], a[1] - q[1]];
        let v = [b[0] - q[0], b[1] - q[1]];
        let cross = u[0] * v[1] - u[1] * v[0];
        let dot = u[0] * v[0] + u[1] * v[1];
        angle += cross.atan2(dot);
    }
    angle.abs() > std::f64::consts::PI
}

/// Reads a two-column `x,y` point list; a non-numeric first line is treated as
/// a header.
pub fn read_points_csv(path: &std::path::Path) -> Result<Vec<[f64; 2]>, GeometryError> {
    let text = std::fs::read_to_string(path)?;
    parse_points_csv(&text)
}

pub fn parse_points_csv(text: &str) -> Result<Vec<[f64; 2]>, GeometryError> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split(',').map(str::trim);
        let (Some(xs), Some(ys)) = (cols.next(), cols.next()) else {
            return Err(GeometryError::CsvParse {
                line: lineno + 1,
                msg: "expected two comma-separated columns".into(),
            });
        };
        match (xs.parse::<f64>(), ys.parse::<f64>()) {
            (Ok(x), Ok(y)) => out.push([x, y]),
            _ if lineno == 0 => continue, // header
            _ => {
                return Err(GeometryError::CsvParse {
                    line: lineno + 1,
                    msg: format!("cannot parse '{xs}','{ys}' as numbers"),
                })
            }
        }
    }
    Ok(out)
}

pub fn write_points_csv(path: &std::path::Path, pts: &[[f64; 2]]) -> Result<(), GeometryError> {
    let mut s = String::from("x,y\n");
    for p in pts {
        s.push_str(&format!("{},{}\n", p[0], p[1]));
    }
    std::fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn circle_pts(n: usize, cx: f64, cy: f64, r: f64) -> Vec<[f64; 2]> {
        (0..n)
            .map(|i| {
                let th = 2.0 * PI * i as f64 / n as f64;
                [cx + r * th.cos(), cy + r * th.sin()]
            })
            .collect()
    }

    #[test]
    fn resample_dense_circle_radial_deviation() {
        let pts = circle_pts(10_000, 0.0, 0.0, 1.0);
        let c = resample(&pts, 256).unwrap();
        assert_eq!(c.len(), 256);
        for p in c.nodes() {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-6);
        }
        assert!((c.perimeter() - 2.0 * PI).abs() < 1e-4);
        assert!(c.signed_area() > 0.0);
    }

    #[test]
    fn resample_rejects_too_few_points() {
        let square = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        assert!(matches!(
            resample(&square, 64),
            Err(GeometryError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn resample_is_idempotent() {
        let pts = circle_pts(512, 0.3, -0.2, 1.3);
        let a = resample(&pts, 256).unwrap();
        let b = resample(a.nodes(), 256).unwrap();
        for (p, q) in a.nodes().iter().zip(b.nodes()) {
            assert!(
                super::dist(*p, *q) < 1e-8,
                "node moved by {}",
                super::dist(*p, *q)
            );
        }
    }

    #[test]
    fn resample_normalizes_orientation() {
        let mut pts = circle_pts(100, 0.0, 0.0, 1.0);
        pts.reverse();
        let c = resample(&pts, 64).unwrap();
        assert!(c.signed_area() > 0.0);
    }

    #[test]
    fn resample_normals_point_outward() {
        let pts = circle_pts(512, 2.0, 1.0, 1.5);
        let c = resample(&pts, 128).unwrap();
        for (p, nv) in c.nodes().iter().zip(c.normals()) {
            let radial = [(p[0] - 2.0) / 1.5, (p[1] - 1.0) / 1.5];
            let d = nv[0] * radial[0] + nv[1] * radial[1];
            assert!(d > 0.99, "normal not outward: dot {d}");
        }
        for k in c.curvature() {
            assert!((k - 1.0 / 1.5).abs() < 1e-2);
        }
    }

    #[test]
    fn hausdorff_examples() {
        let a = circle_pts(512, 0.0, 0.0, 1.0);
        assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);

        let b = circle_pts(512, 0.0, 0.0, 2.0);
        let d = hausdorff(&a, &b).unwrap();
        assert!((d - 1.0).abs() < 1e-3, "concentric circles: {d}");

        assert!(matches!(hausdorff(&a, &[]), Err(GeometryError::EmptySet)));
    }

    #[test]
    fn hausdorff_circle_vs_inscribed_square_brute_force() {
        // Dense brute-force oracle: unit circle vs the inscribed axis-aligned
        // square with corners on the circle. The analytic value is
        // 1 - 1/sqrt(2) (circle point at angle pi/4 vs square edge midpoint).
        let n = 100_000usize;
        let m = 317; // sqrt-sized side sampling for the oracle sets
        let circle = circle_pts(n, 0.0, 0.0, 1.0);
        let h = 1.0 / 2.0f64.sqrt();
        let mut square = Vec::new();
        for i in 0..m {
            let t = -h + 2.0 * h * i as f64 / m as f64;
            square.push([t, h]);
            square.push([t, -h]);
            square.push([h, t]);
            square.push([-h, t]);
        }
        let d = hausdorff(&circle, &square).unwrap();
        let expected = 1.0 - h;
        assert!((d - expected).abs() < 1e-3, "got {d}, expected {expected}");
    }

    #[test]
    fn contains_point_examples() {
        let c = circle_pts(256, 0.0, 0.0, 1.0);
        assert!(contains_point(&c, [0.0, 0.0], DEFAULT_ON_BOUNDARY_TOL));
        assert!(!contains_point(&c, [5.0, 5.0], DEFAULT_ON_BOUNDARY_TOL));

        let shifted = circle_pts(256, 1.0, 0.0, 1.0);
        // the origin lies on the boundary; on-tolerance must accept it
        assert!(contains_point(&shifted, [0.0, 0.0], 1e-3));
    }

    /// Even-odd crossing-number oracle.
    fn crossing_contains(pts: &[[f64; 2]], q: [f64; 2]) -> bool {
        let n = pts.len();
        let mut inside = false;
        for i in 0..n {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            if (a[1] > q[1]) != (b[1] > q[1]) {
                let x = a[0] + (q[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if q[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    proptest! {
        #[test]
        fn winding_agrees_with_crossing_number(
            cx in -1.0f64..1.0,
            cy in -1.0f64..1.0,
            r in 0.2f64..2.0,
            qx in -4.0f64..4.0,
            qy in -4.0f64..4.0,
        ) {
            let loop_pts = circle_pts(64, cx, cy, r);
            let q = [qx, qy];
            // skip queries near the boundary where the tol_on rule differs
            prop_assume!((super::dist(q, [cx, cy]) - r).abs() > 0.05);
            prop_assert_eq!(
                contains_point(&loop_pts, q, DEFAULT_ON_BOUNDARY_TOL),
                crossing_contains(&loop_pts, q)
            );
        }

        #[test]
        fn hausdorff_symmetry_and_triangle(
            seed in 0u64..1000,
        ) {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut gen = |k: usize| -> Vec<[f64; 2]> {
                (0..k).map(|_| [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]).collect()
            };
            let a = gen(12);
            let b = gen(9);
            let c = gen(15);
            let dab = hausdorff(&a, &b).unwrap();
            let dba = hausdorff(&b, &a).unwrap();
            prop_assert!((dab - dba).abs() < 1e-15);
            prop_assert!(dab >= 0.0);
            let dac = hausdorff(&a, &c).unwrap();
            let dcb = hausdorff(&c, &b).unwrap();
            prop_assert!(dab <= dac + dcb + 1e-12);
        }
    }

    #[test]
    fn csv_round_trip_with_header() {
        let text = "x,y\n0.5,1.5\n-2,3\n";
        let pts = parse_points_csv(text).unwrap();
        assert_eq!(pts, vec![[0.5, 1.5], [-2.0, 3.0]]);
        let no_header = "0.5,1.5\n-2,3\n";
        assert_eq!(parse_points_csv(no_header).unwrap(), pts);
    }
}
