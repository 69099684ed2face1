//! Parametric shape library. Every shape is translated so that its boundary
//! passes through the origin and is traversed counterclockwise.

use super::{BoundaryCurve, GeometryError};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Which part of a pair of overlapping circles forms the domain boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CirclesPart {
    /// Outer outline of the union ("conjoined circles").
    Union,
    /// Intersection of the two disks.
    Lens,
    /// First disk minus the second.
    Crescent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShapeSpec {
    /// Semi-axes `a`, `b`; centered at `(a, 0)` so the origin is on the boundary.
    Ellipse { a: f64, b: f64 },
    /// Circle of radius `r` centered at `(r, 0)`.
    CircleThroughOrigin { radius: f64 },
    /// Two circles with center separation `separation`; the configuration is
    /// translated so the upper circle-circle intersection point is the origin.
    TwoOverlappingCircles {
        r1: f64,
        r2: f64,
        separation: f64,
        part: CirclesPart,
    },
    /// Disk of radius `radius` centered at `(radius, 0)` with an open sector
    /// of the given angle removed, the mouth facing away from the origin.
    DiskWithMissingSector { radius: f64, sector_angle: f64 },
    /// Axis-aligned square with one corner at the origin and sinusoidal
    /// perturbations of the sides, vanishing at the corners.
    SquareSinusoidalSides {
        side: f64,
        amplitude: f64,
        periods: usize,
    },
    /// Polar curve `r(t) = radius (1 + amplitude cos(petals t))`, translated
    /// so the point at `t = pi` is the origin.
    Flower {
        radius: f64,
        amplitude: f64,
        petals: usize,
    },
}

/// Piecewise-analytic boundary segment.
enum Piece {
    /// Circular arc traversed from `th0` to `th1` (decreasing means clockwise).
    Arc {
        center: [f64; 2],
        r: f64,
        th0: f64,
        th1: f64,
    },
    Line {
        a: [f64; 2],
        b: [f64; 2],
    },
    /// Straight side from `a` to `b` with a sinusoidal offset along `out`.
    SinSide {
        a: [f64; 2],
        b: [f64; 2],
        out: [f64; 2],
        amp: f64,
        waves: usize,
    },
}

impl Piece {
    fn point(&self, u: f64) -> [f64; 2] {
        match *self {
            Piece::Arc { center, r, th0, th1 } => {
                let th = th0 + u * (th1 - th0);
                [center[0] + r * th.cos(), center[1] + r * th.sin()]
            }
            Piece::Line { a, b } => [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])],
            Piece::SinSide { a, b, out, amp, waves } => {
                let s = amp * (PI * waves as f64 * u).sin();
                [
                    a[0] + u * (b[0] - a[0]) + s * out[0],
                    a[1] + u * (b[1] - a[1]) + s * out[1],
                ]
            }
        }
    }

    fn deriv(&self, u: f64) -> [f64; 2] {
        match *self {
            Piece::Arc { r, th0, th1, .. } => {
                let dth = th1 - th0;
                let th = th0 + u * dth;
                [-r * dth * th.sin(), r * dth * th.cos()]
            }
            Piece::Line { a, b } => [b[0] - a[0], b[1] - a[1]],
            Piece::SinSide { a, b, out, amp, waves } => {
                let w = PI * waves as f64;
                let ds = amp * w * (w * u).cos();
                [b[0] - a[0] + ds * out[0], b[1] - a[1] + ds * out[1]]
            }
        }
    }

    fn deriv2(&self, u: f64) -> [f64; 2] {
        match *self {
            Piece::Arc { r, th0, th1, .. } => {
                let dth = th1 - th0;
                let th = th0 + u * dth;
                [-r * dth * dth * th.cos(), -r * dth * dth * th.sin()]
            }
            Piece::Line { .. } => [0.0, 0.0],
            Piece::SinSide { out, amp, waves, .. } => {
                let w = PI * waves as f64;
                let d2 = -amp * w * w * (w * u).sin();
                [d2 * out[0], d2 * out[1]]
            }
        }
    }

    fn length(&self) -> f64 {
        match *self {
            Piece::Arc { r, th0, th1, .. } => r * (th1 - th0).abs(),
            Piece::Line { a, b } => (b[0] - a[0]).hypot(b[1] - a[1]),
            Piece::SinSide { .. } => {
                // composite Simpson on the speed
                let m = 256;
                let h = 1.0 / m as f64;
                let speed = |u: f64| {
                    let d = self.deriv(u);
                    d[0].hypot(d[1])
                };
                let mut acc = 0.0;
                for k in 0..m {
                    let a = k as f64 * h;
                    acc += h / 6.0 * (speed(a) + 4.0 * speed(a + 0.5 * h) + speed(a + h));
                }
                acc
            }
        }
    }
}

fn curvature_from(d1: [f64; 2], d2: [f64; 2]) -> f64 {
    let speed = d1[0].hypot(d1[1]).max(1e-300);
    (d1[0] * d2[1] - d1[1] * d2[0]) / (speed * speed * speed)
}

/// Builds a curve from a smooth global parametrization on `[0, 2pi)` with
/// trapezoidal (periodic-uniform) quadrature weights.
fn sample_smooth(
    n: usize,
    pos: impl Fn(f64) -> [f64; 2],
    d1f: impl Fn(f64) -> [f64; 2],
    d2f: impl Fn(f64) -> [f64; 2],
) -> Result<BoundaryCurve, GeometryError> {
    let dt = 2.0 * PI / n as f64;
    let mut nodes = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64 * dt;
        let p = pos(t);
        let d1 = d1f(t);
        let d2 = d2f(t);
        let speed = d1[0].hypot(d1[1]);
        let tan = [d1[0] / speed, d1[1] / speed];
        nodes.push(p);
        tangents.push(tan);
        normals.push([tan[1], -tan[0]]);
        curvature.push(curvature_from(d1, d2));
        weights.push(speed * dt);
    }
    BoundaryCurve::from_parts(nodes, tangents, normals, curvature, weights)
}

/// Builds a curve from a counterclockwise piece list with per-piece midpoint
/// quadrature. Corner points fall between nodes.
fn sample_pieces(n: usize, pieces: &[Piece]) -> Result<BoundaryCurve, GeometryError> {
    let lengths: Vec<f64> = pieces.iter().map(Piece::length).collect();
    let total: f64 = lengths.iter().sum();
    let mut counts: Vec<usize> = lengths
        .iter()
        .map(|l| ((l / total) * n as f64).round().max(2.0) as usize)
        .collect();
    // adjust the longest piece so counts sum to exactly n
    let assigned: usize = counts.iter().sum();
    let longest = lengths
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .unwrap();
    if assigned != n {
        let delta = n as i64 - assigned as i64;
        let adjusted = counts[longest] as i64 + delta;
        if adjusted < 2 {
            return Err(GeometryError::TooFewNodes(n));
        }
        counts[longest] = adjusted as usize;
    }

    let mut nodes = Vec::with_capacity(n);
    let mut tangents = Vec::with_capacity(n);
    let mut normals = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for (piece, &cnt) in pieces.iter().zip(&counts) {
        let du = 1.0 / cnt as f64;
        for j in 0..cnt {
            let u = (j as f64 + 0.5) * du;
            let p = piece.point(u);
            let d1 = piece.deriv(u);
            let d2 = piece.deriv2(u);
            let speed = d1[0].hypot(d1[1]);
            let tan = [d1[0] / speed, d1[1] / speed];
            nodes.push(p);
            tangents.push(tan);
            normals.push([tan[1], -tan[0]]);
            curvature.push(curvature_from(d1, d2));
            weights.push(speed * du);
        }
    }
    BoundaryCurve::from_parts(nodes, tangents, normals, curvature, weights)
}

fn angle_of(p: [f64; 2], center: [f64; 2]) -> f64 {
    (p[1] - center[1]).atan2(p[0] - center[0])
}

/// Smallest representative of `th` strictly greater than `reference`.
fn unwrap_above(th: f64, reference: f64) -> f64 {
    let mut t = th;
    while t <= reference {
        t += 2.0 * PI;
    }
    t
}

/// Geometry of two overlapping circles translated so the upper intersection
/// point is at the origin: returns (c1, c2, q_bot).
fn circle_pair(
    r1: f64,
    r2: f64,
    sep: f64,
) -> Result<([f64; 2], [f64; 2], [f64; 2]), GeometryError> {
    if r1 <= 0.0 || r2 <= 0.0 || sep <= 0.0 {
        return Err(GeometryError::InvalidShape(
            "circle radii and separation must be positive".into(),
        ));
    }
    let axial = (sep * sep + r1 * r1 - r2 * r2) / (2.0 * sep);
    let h2 = r1 * r1 - axial * axial;
    if h2 <= 0.0 {
        return Err(GeometryError::InvalidShape(format!(
            "circles r1={r1}, r2={r2}, separation={sep} do not overlap"
        )));
    }
    let h = h2.sqrt();
    // centers before translation: (-sep/2, 0) and (sep/2, 0); upper
    // intersection at (-sep/2 + axial, h) which we move to the origin.
    let qx = -sep / 2.0 + axial;
    let c1 = [-sep / 2.0 - qx, -h];
    let c2 = [sep / 2.0 - qx, -h];
    let q_bot = [0.0, -2.0 * h];
    Ok((c1, c2, q_bot))
}

/// Samples the boundary described by `spec` at `n_nodes` nodes.
pub fn make_shape(spec: &ShapeSpec, n_nodes: usize) -> Result<BoundaryCurve, GeometryError> {
    if n_nodes < 16 {
        return Err(GeometryError::TooFewNodes(n_nodes));
    }
    let n = n_nodes;
    match *spec {
        ShapeSpec::Ellipse { a, b } => {
            if a <= 0.0 || b <= 0.0 {
                return Err(GeometryError::InvalidShape(
                    "ellipse semi-axes must be positive".into(),
                ));
            }
            sample_smooth(
                n,
                |t| [a + a * t.cos(), b * t.sin()],
                |t| [-a * t.sin(), b * t.cos()],
                |t| [-a * t.cos(), -b * t.sin()],
            )
        }
        ShapeSpec::CircleThroughOrigin { radius } => {
            if radius <= 0.0 {
                return Err(GeometryError::InvalidShape(
                    "circle radius must be positive".into(),
                ));
            }
            let r = radius;
            sample_smooth(
                n,
                |t| [r + r * t.cos(), r * t.sin()],
                |t| [-r * t.sin(), r * t.cos()],
                |t| [-r * t.cos(), -r * t.sin()],
            )
        }
        ShapeSpec::Flower {
            radius,
            amplitude,
            petals,
        } => {
            if radius <= 0.0 || amplitude < 0.0 || amplitude >= 1.0 || petals == 0 {
                return Err(GeometryError::InvalidShape(
                    "flower needs radius > 0, 0 <= amplitude < 1, petals >= 1".into(),
                ));
            }
            let k = petals as f64;
            let r = move |t: f64| radius * (1.0 + amplitude * (k * t).cos());
            let rp = move |t: f64| -radius * amplitude * k * (k * t).sin();
            let rpp = move |t: f64| -radius * amplitude * k * k * (k * t).cos();
            let cx = r(PI);
            sample_smooth(
                n,
                move |t| [cx + r(t) * t.cos(), r(t) * t.sin()],
                move |t| {
                    [
                        rp(t) * t.cos() - r(t) * t.sin(),
                        rp(t) * t.sin() + r(t) * t.cos(),
                    ]
                },
                move |t| {
                    [
                        rpp(t) * t.cos() - 2.0 * rp(t) * t.sin() - r(t) * t.cos(),
                        rpp(t) * t.sin() + 2.0 * rp(t) * t.cos() - r(t) * t.sin(),
                    ]
                },
            )
        }
        ShapeSpec::TwoOverlappingCircles {
            r1,
            r2,
            separation,
            part,
        } => {
            let (c1, c2, q_bot) = circle_pair(r1, r2, separation)?;
            let q_top = [0.0, 0.0];
            let top1 = angle_of(q_top, c1);
            let bot1 = angle_of(q_bot, c1);
            let top2 = angle_of(q_top, c2);
            let bot2 = angle_of(q_bot, c2);
            let pieces = match part {
                CirclesPart::Union => vec![
                    // major arc of the first circle, over the far side
                    Piece::Arc {
                        center: c1,
                        r: r1,
                        th0: top1,
                        th1: unwrap_above(bot1, top1),
                    },
                    Piece::Arc {
                        center: c2,
                        r: r2,
                        th0: bot2,
                        th1: unwrap_above(top2, bot2),
                    },
                ],
                CirclesPart::Lens => vec![
                    // inner arc of the second circle down, inner arc of the
                    // first circle back up
                    Piece::Arc {
                        center: c2,
                        r: r2,
                        th0: top2,
                        th1: unwrap_above(bot2, top2),
                    },
                    Piece::Arc {
                        center: c1,
                        r: r1,
                        th0: bot1,
                        th1: unwrap_above(top1, bot1),
                    },
                ],
                CirclesPart::Crescent => vec![
                    Piece::Arc {
                        center: c1,
                        r: r1,
                        th0: top1,
                        th1: unwrap_above(bot1, top1),
                    },
                    // concave return along the second circle
                    Piece::Arc {
                        center: c2,
                        r: r2,
                        th0: unwrap_above(bot2, top2),
                        th1: top2,
                    },
                ],
            };
            sample_pieces(n, &pieces)
        }
        ShapeSpec::DiskWithMissingSector {
            radius,
            sector_angle,
        } => {
            if radius <= 0.0 {
                return Err(GeometryError::InvalidShape(
                    "disk radius must be positive".into(),
                ));
            }
            if !(sector_angle > 0.0 && sector_angle < 2.0 * PI) {
                return Err(GeometryError::InvalidShape(
                    "sector angle must lie in (0, 2pi)".into(),
                ));
            }
            let r = radius;
            let center = [r, 0.0];
            let half = sector_angle / 2.0;
            let mouth_hi = [r + r * half.cos(), r * half.sin()];
            let mouth_lo = [r + r * half.cos(), -r * half.sin()];
            let pieces = vec![
                Piece::Arc {
                    center,
                    r,
                    th0: half,
                    th1: 2.0 * PI - half,
                },
                Piece::Line {
                    a: mouth_lo,
                    b: center,
                },
                Piece::Line {
                    a: center,
                    b: mouth_hi,
                },
            ];
            sample_pieces(n, &pieces)
        }
        ShapeSpec::SquareSinusoidalSides {
            side,
            amplitude,
            periods,
        } => {
            if side <= 0.0 || amplitude < 0.0 || amplitude >= side / 2.0 || periods == 0 {
                return Err(GeometryError::InvalidShape(
                    "square needs side > 0, 0 <= amplitude < side/2, periods >= 1".into(),
                ));
            }
            let s = side;
            let corners = [[0.0, 0.0], [s, 0.0], [s, s], [0.0, s]];
            let outs = [[0.0, -1.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]];
            let pieces: Vec<Piece> = (0..4)
                .map(|i| Piece::SinSide {
                    a: corners[i],
                    b: corners[(i + 1) % 4],
                    out: outs[i],
                    amp: amplitude,
                    waves: periods,
                })
                .collect();
            sample_pieces(n, &pieces)
        }
    }
}
