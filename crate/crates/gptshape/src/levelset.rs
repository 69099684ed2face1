//! Level-set geometry of a boundary polynomial: Hamiltonian tracing of
//! `{P = 0}`, bifurcation (singular) points, and segmentation points on small
//! circles around them.

use crate::poly2d::Poly2;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LevelsetError {
    #[error("start point is not on the zero level set: |P| = {0:.3e}")]
    StartOffLevelSet(f64),
    #[error("segmentation circle grew past the cap radius {0} without finding branches")]
    SegmentationStalled(f64),
}

/// The divergence-free field `(-dP/dy, dP/dx)` tangent to level sets of `P`.
pub fn hamiltonian(p: &Poly2, x: [f64; 2]) -> [f64; 2] {
    let g = p.gradient(x);
    [-g[1], g[0]]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceConfig {
    /// Arclength step of the unit-speed integrator.
    pub t_step: f64,
    /// Radius at which a target point counts as reached.
    pub tol_po: f64,
    /// Sup-norm escape bound.
    pub bound: f64,
    pub max_steps: usize,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            t_step: 1e-3,
            tol_po: 1e-2,
            bound: 10.0,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// Came within `tol_po` of a target point.
    Target,
    /// Left the sup-norm box of half-width `bound`.
    Escaped,
    /// Hit a singular point: the field vanished or the tangent turned sharply
    /// within one step.
    Stagnation,
    MaxSteps,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceResult {
    pub polyline: Vec<[f64; 2]>,
    /// Index into the target list, when `terminated_by == Target`.
    pub hit_target: Option<usize>,
    pub arclength: f64,
    pub terminated_by: Termination,
}

const FIELD_ZERO_TOL: f64 = 1e-12;
/// Per-step rotation of the displacement direction beyond which the trace is
/// treated as having crossed a singular point.
const MAX_TURN_RAD: f64 = 0.35;
/// A unit-speed RK4 step should advance by nearly the full step length; the
/// stages cancel each other out near a singular point, so a collapsed
/// displacement is treated as stagnation.
const MIN_STEP_FRACTION: f64 = 0.5;
const NEWTON_LEVEL_TOL: f64 = 1e-10;
/// Target detection only arms after this multiple of `tol_po` in arclength,
/// so a trace can leave its own starting point.
const ARM_FACTOR: f64 = 5.0;

fn unit_field(p: &Poly2, x: [f64; 2], dir: f64) -> Option<[f64; 2]> {
    let h = hamiltonian(p, x);
    let n = h[0].hypot(h[1]);
    if n < FIELD_ZERO_TOL {
        return None;
    }
    Some([dir * h[0] / n, dir * h[1] / n])
}

/// Pulls `x` back onto `{P = 0}` with at most two Newton steps.
fn project(p: &Poly2, mut x: [f64; 2]) -> [f64; 2] {
    for _ in 0..2 {
        let v = p.eval(x);
        if v.abs() < NEWTON_LEVEL_TOL {
            break;
        }
        let g = p.gradient(x);
        let g2 = g[0] * g[0] + g[1] * g[1];
        if g2 < FIELD_ZERO_TOL {
            break;
        }
        x[0] -= v * g[0] / g2;
        x[1] -= v * g[1] / g2;
    }
    x
}

/// Unit-speed RK4 trace of the level set through `start` in direction
/// `dir = +-1`, stopping at the first of: a target point, the escape bound, a
/// singular point, or the step cap.
pub fn trace(
    p: &Poly2,
    start: [f64; 2],
    dir: f64,
    targets: &[[f64; 2]],
    cfg: &TraceConfig,
) -> TraceResult {
    let mut x = start;
    let mut polyline = vec![x];
    let mut arclength = 0.0;
    let mut prev_tangent: Option<[f64; 2]> = None;
    let h = cfg.t_step;
    let arm = ARM_FACTOR * cfg.tol_po;

    for _ in 0..cfg.max_steps {
        let f1 = match unit_field(p, x, dir) {
            Some(f) => f,
            None => {
                return TraceResult {
                    polyline,
                    hit_target: None,
                    arclength,
                    terminated_by: Termination::Stagnation,
                }
            }
        };
        let at = |k: [f64; 2], c: f64| [x[0] + c * k[0], x[1] + c * k[1]];
        let stages = (|| {
            let f2 = unit_field(p, at(f1, 0.5 * h), dir)?;
            let f3 = unit_field(p, at(f2, 0.5 * h), dir)?;
            let f4 = unit_field(p, at(f3, h), dir)?;
            Some((f2, f3, f4))
        })();
        let (f2, f3, f4) = match stages {
            Some(s) => s,
            None => {
                return TraceResult {
                    polyline,
                    hit_target: None,
                    arclength,
                    terminated_by: Termination::Stagnation,
                }
            }
        };
        let next = project(
            p,
            [
                x[0] + h / 6.0 * (f1[0] + 2.0 * f2[0] + 2.0 * f3[0] + f4[0]),
                x[1] + h / 6.0 * (f1[1] + 2.0 * f2[1] + 2.0 * f3[1] + f4[1]),
            ],
        );

        let step = [next[0] - x[0], next[1] - x[1]];
        let ds = step[0].hypot(step[1]);
        if ds < MIN_STEP_FRACTION * h {
            return TraceResult {
                polyline,
                hit_target: None,
                arclength,
                terminated_by: Termination::Stagnation,
            };
        }
        let tangent = [step[0] / ds, step[1] / ds];
        if let Some(t0) = prev_tangent {
            let dot: f64 = (t0[0] * tangent[0] + t0[1] * tangent[1]).clamp(-1.0, 1.0);
            if dot.acos() > MAX_TURN_RAD {
                return TraceResult {
                    polyline,
                    hit_target: None,
                    arclength,
                    terminated_by: Termination::Stagnation,
                };
            }
        }
        arclength += ds;
        x = next;
        polyline.push(x);
        prev_tangent = Some(tangent);

        if x[0].abs() > cfg.bound || x[1].abs() > cfg.bound {
            return TraceResult {
                polyline,
                hit_target: None,
                arclength,
                terminated_by: Termination::Escaped,
            };
        }
        if arclength >= arm {
            for (i, t) in targets.iter().enumerate() {
                if (x[0] - t[0]).hypot(x[1] - t[1]) < cfg.tol_po {
                    return TraceResult {
                        polyline,
                        hit_target: Some(i),
                        arclength,
                        terminated_by: Termination::Target,
                    };
                }
            }
        }
    }
    TraceResult {
        polyline,
        hit_target: None,
        arclength,
        terminated_by: Termination::MaxSteps,
    }
}

/// Traces from `start` and reports the closed loop if the level set returns to
/// `start` without meeting a singular point. `None` signals that `{P = 0}` is
/// not a single smooth loop through `start`.
pub fn check_loop(p: &Poly2, start: [f64; 2], cfg: &TraceConfig) -> Option<Vec<[f64; 2]>> {
    let result = trace(p, start, 1.0, &[start], cfg);
    match result.terminated_by {
        Termination::Target => {
            let mut loop_pts = result.polyline;
            loop_pts.push(start);
            Some(loop_pts)
        }
        _ => None,
    }
}

const GRID_RESOLUTION: usize = 64;
const NEWTON_MAX_ITERS: usize = 50;
const GRAD_ZERO_TOL: f64 = 1e-12;
/// Relaxation cap: the on-level tolerance is doubled at most this many times.
const TOL_DOUBLINGS: usize = 10;

/// Critical points of `P` on its zero level set, found by Newton iteration on
/// `grad P = 0` from a uniform grid over `[-half_width, half_width]^2`.
///
/// `non_smooth` marks that the level set is known to have singular points
/// (e.g. the kernel polynomial factors); in that case the on-level tolerance
/// `tol_bif` is doubled, up to a cap, until at least two points emerge.
pub fn bifurcation_points(
    p: &Poly2,
    half_width: f64,
    tol_bif: f64,
    tol_cluster: f64,
    non_smooth: bool,
) -> Vec<[f64; 2]> {
    // scale-invariant level test: P is only determined up to a constant
    let scale = p.coeff_norm_inf().max(f64::MIN_POSITIVE);

    let mut critical: Vec<[f64; 2]> = Vec::new();
    let n = GRID_RESOLUTION;
    for i in 0..n {
        for j in 0..n {
            let mut x = [
                -half_width + 2.0 * half_width * (i as f64 + 0.5) / n as f64,
                -half_width + 2.0 * half_width * (j as f64 + 0.5) / n as f64,
            ];
            let mut converged = false;
            for _ in 0..NEWTON_MAX_ITERS {
                let g = p.gradient(x);
                if g[0].hypot(g[1]) < GRAD_ZERO_TOL * scale {
                    converged = true;
                    break;
                }
                let h = p.hessian(x);
                let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
                if det.abs() < 1e-300 {
                    break;
                }
                let dx = (h[1][1] * g[0] - h[0][1] * g[1]) / det;
                let dy = (h[0][0] * g[1] - h[1][0] * g[0]) / det;
                x[0] -= dx;
                x[1] -= dy;
                if !x[0].is_finite() || !x[1].is_finite() {
                    break;
                }
                if dx.hypot(dy) < 1e-14 {
                    let g = p.gradient(x);
                    converged = g[0].hypot(g[1]) < 1e-8 * scale;
                    break;
                }
            }
            if converged && x[0].abs() <= half_width && x[1].abs() <= half_width {
                critical.push(x);
            }
        }
    }

    let cluster = |pts: &[[f64; 2]]| -> Vec<[f64; 2]> {
        let mut out: Vec<[f64; 2]> = Vec::new();
        for &q in pts {
            if !out
                .iter()
                .any(|r| (r[0] - q[0]).hypot(r[1] - q[1]) < tol_cluster)
            {
                out.push(q);
            }
        }
        out
    };

    let mut tol = tol_bif;
    for relax in 0..=TOL_DOUBLINGS {
        let on_level: Vec<[f64; 2]> = critical
            .iter()
            .copied()
            .filter(|&q| p.eval(q).abs() < tol * scale)
            .collect();
        let mut pts = cluster(&on_level);
        if !non_smooth || pts.len() >= 2 || relax == TOL_DOUBLINGS {
            pts.sort_by(|a, b| (a[1], a[0]).partial_cmp(&(b[1], b[0])).unwrap());
            return pts;
        }
        tol *= 2.0;
    }
    unreachable!()
}

/// A branch intersection on the probe circle around a bifurcation point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SegPoint {
    pub point: [f64; 2],
    /// Index into the bifurcation point list.
    pub parent: usize,
    /// Probe circle radius that produced this point.
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SegmentationConfig {
    pub r_ini: f64,
    pub r_step: f64,
    /// Number of equispaced angular samples on the probe circle.
    pub samples: usize,
    /// Probe radius cap, as a multiple of `r_ini`.
    pub r_cap_factor: f64,
}

impl Default for SegmentationConfig {
    fn default() -> Self {
        Self {
            r_ini: 0.05,
            r_step: 0.01,
            samples: 1000,
            r_cap_factor: 1000.0,
        }
    }
}

/// Intersections of `{P = 0}` with a small circle around each bifurcation
/// point: sign changes over the angular samples, sharpened by bisection. The
/// probe radius grows from `r_ini` until at least four branches appear.
pub fn segmentation_points(
    p: &Poly2,
    bifurcations: &[[f64; 2]],
    cfg: &SegmentationConfig,
) -> Result<Vec<SegPoint>, LevelsetError> {
    let scale = p.coeff_norm_inf().max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    for (parent, &b) in bifurcations.iter().enumerate() {
        let mut r = cfg.r_ini;
        let cap = cfg.r_cap_factor * cfg.r_ini;
        loop {
            let pts = circle_crossings(p, b, r, cfg.samples, scale);
            if pts.len() >= 4 {
                out.extend(pts.into_iter().map(|point| SegPoint {
                    point,
                    parent,
                    radius: r,
                }));
                break;
            }
            r += cfg.r_step;
            if r > cap {
                return Err(LevelsetError::SegmentationStalled(cap));
            }
        }
    }
    Ok(out)
}

fn circle_crossings(
    p: &Poly2,
    center: [f64; 2],
    r: f64,
    samples: usize,
    scale: f64,
) -> Vec<[f64; 2]> {
    let at = |th: f64| -> [f64; 2] { [center[0] + r * th.cos(), center[1] + r * th.sin()] };
    let vals: Vec<f64> = (0..samples)
        .map(|k| p.eval(at(2.0 * PI * k as f64 / samples as f64)))
        .collect();
    let mut points = Vec::new();
    for k in 0..samples {
        let th0 = 2.0 * PI * k as f64 / samples as f64;
        let th1 = 2.0 * PI * (k + 1) as f64 / samples as f64;
        let (v0, v1) = (vals[k], vals[(k + 1) % samples]);
        if v0 == 0.0 {
            points.push(at(th0));
            continue;
        }
        if v0 * v1 < 0.0 {
            // bisection on the angle
            let (mut a, mut b, mut va) = (th0, th1, v0);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let vm = p.eval(at(mid));
                if vm.abs() < 1e-10 * scale || b - a < 1e-15 {
                    break;
                }
                if va * vm < 0.0 {
                    b = mid;
                } else {
                    a = mid;
                    va = vm;
                }
            }
            points.push(at(0.5 * (a + b)));
        }
    }
    points
}
