//! Arc graph on segmentation points: directed level-set arcs and trivial gap
//! arcs, elementary circuit enumeration, admissibility filtering, and assembly
//! of candidate boundary loops.

use crate::geometry::{contains_point, hausdorff};
use crate::levelset::{trace, SegPoint, Termination, TraceConfig};
use crate::poly2d::Poly2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("circuit enumeration exceeded the cap of {0} circuits; graph too tangled")]
    TooManyCircuits(usize),
    #[error("circuit is not closed: gap {0:.3e} exceeds tolerance")]
    OpenLoop(f64),
    #[error("circuit references arc {0} which does not exist")]
    BadArcId(usize),
    #[error("empty circuit")]
    EmptyCircuit,
}

/// Direction tag of an arc: 0 = trivial gap arc across a bifurcation point,
/// 1 = positive Hamiltonian direction, 2 = negative (reverse of a dir-1 arc).
pub type Dir = u8;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Arc {
    /// Segmentation point indices.
    pub from: usize,
    pub to: usize,
    pub dir: Dir,
    /// Points from `from` to `to`; for trivial arcs just the two endpoints.
    pub polyline: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcGraph {
    pub vertices: Vec<SegPoint>,
    pub arcs: Vec<Arc>,
}

impl ArcGraph {
    /// Index of the reversed arc (same endpoints swapped; dir 1 <-> 2,
    /// trivial <-> trivial).
    pub fn reverse_of(&self, id: usize) -> Option<usize> {
        let a = &self.arcs[id];
        let want_dir = match a.dir {
            0 => 0,
            1 => 2,
            2 => 1,
            _ => return None,
        };
        self.arcs
            .iter()
            .position(|b| b.from == a.to && b.to == a.from && b.dir == want_dir)
    }
}

/// An elementary circuit as an ordered list of arc ids.
pub type Circuit = Vec<usize>;

const ARC_DEDUP_HAUSDORFF: f64 = 1e-3;

/// Builds the arc graph: all trivial arcs between distinct segmentation
/// points of the same bifurcation point, plus level-set arcs found by tracing
/// from each segmentation point in the positive direction (the reverse arc is
/// added without re-tracing). Escaping or stagnating traces are skipped and
/// reported in the diagnostics.
pub fn find_arcs(
    p: &Poly2,
    segs: &[SegPoint],
    cfg: &TraceConfig,
) -> (ArcGraph, Vec<String>) {
    let mut arcs = Vec::new();
    let mut diagnostics = Vec::new();

    for (i, a) in segs.iter().enumerate() {
        for (j, b) in segs.iter().enumerate() {
            if i != j && a.parent == b.parent {
                arcs.push(Arc {
                    from: i,
                    to: j,
                    dir: 0,
                    polyline: vec![a.point, b.point],
                });
            }
        }
    }

    let targets: Vec<[f64; 2]> = segs.iter().map(|s| s.point).collect();
    for (i, s) in segs.iter().enumerate() {
        let result = trace(p, s.point, 1.0, &targets, cfg);
        match result.terminated_by {
            Termination::Target => {
                let j = result.hit_target.expect("target termination carries index");
                let mut polyline = result.polyline;
                polyline.push(segs[j].point);
                let duplicate = arcs.iter().any(|a: &Arc| {
                    a.dir == 1
                        && a.from == i
                        && a.to == j
                        && hausdorff(&a.polyline, &polyline)
                            .map(|d| d < ARC_DEDUP_HAUSDORFF)
                            .unwrap_or(false)
                });
                if duplicate {
                    diagnostics.push(format!("duplicate level arc {i} -> {j} skipped"));
                    continue;
                }
                let mut reversed = polyline.clone();
                reversed.reverse();
                arcs.push(Arc {
                    from: i,
                    to: j,
                    dir: 1,
                    polyline,
                });
                arcs.push(Arc {
                    from: j,
                    to: i,
                    dir: 2,
                    polyline: reversed,
                });
            }
            Termination::Stagnation => {
                diagnostics.push(format!(
                    "trace from segmentation point {i} ran into a singular point after arclength {:.3e}; skipped",
                    result.arclength
                ));
            }
            Termination::Escaped => {
                diagnostics.push(format!(
                    "trace from segmentation point {i} escaped the bound; skipped"
                ));
            }
            Termination::MaxSteps => {
                diagnostics.push(format!(
                    "trace from segmentation point {i} exhausted the step cap; skipped"
                ));
            }
        }
    }

    (
        ArcGraph {
            vertices: segs.to_vec(),
            arcs,
        },
        diagnostics,
    )
}

pub const CIRCUIT_CAP: usize = 1_000_000;

/// All elementary circuits (closed walks with no repeated vertex) of the
/// directed multigraph, as arc-id lists. Each circuit appears once, rooted at
/// its smallest vertex; a traversal and its reverse are distinct circuits.
pub fn elementary_circuits(
    n_vertices: usize,
    arcs: &[Arc],
) -> Result<Vec<Circuit>, TopologyError> {
    let mut out: Vec<Circuit> = Vec::new();
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n_vertices];
    for (id, a) in arcs.iter().enumerate() {
        if a.from != a.to {
            adjacency[a.from].push(id);
        }
    }

    for root in 0..n_vertices {
        // restrict to the strongly connected component of `root` within the
        // subgraph on vertices >= root, so dead branches are never entered
        let scc = scc_of(root, n_vertices, arcs);
        if !scc[root] {
            continue;
        }
        let mut on_path = vec![false; n_vertices];
        on_path[root] = true;
        let mut path: Circuit = Vec::new();
        dfs_circuits(
            root,
            root,
            &adjacency,
            arcs,
            &scc,
            &mut on_path,
            &mut path,
            &mut out,
        )?;
    }
    Ok(out)
}

/// Membership mask of the strongly connected component containing `root` in
/// the subgraph induced by vertices `>= root`.
fn scc_of(root: usize, n: usize, arcs: &[Arc]) -> Vec<bool> {
    let reach = |forward: bool| -> Vec<bool> {
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for a in arcs {
                let (src, dst) = if forward { (a.from, a.to) } else { (a.to, a.from) };
                if src == v && dst >= root && dst < n && !seen[dst] {
                    seen[dst] = true;
                    stack.push(dst);
                }
            }
        }
        seen
    };
    let fwd = reach(true);
    let bwd = reach(false);
    fwd.iter().zip(&bwd).map(|(&f, &b)| f && b).collect()
}

#[allow(clippy::too_many_arguments)]
fn dfs_circuits(
    root: usize,
    v: usize,
    adjacency: &[Vec<usize>],
    arcs: &[Arc],
    scc: &[bool],
    on_path: &mut Vec<bool>,
    path: &mut Circuit,
    out: &mut Vec<Circuit>,
) -> Result<(), TopologyError> {
    for &edge in &adjacency[v] {
        let w = arcs[edge].to;
        if w < root || !scc[w] {
            continue;
        }
        if w == root {
            path.push(edge);
            out.push(path.clone());
            path.pop();
            if out.len() >= CIRCUIT_CAP {
                return Err(TopologyError::TooManyCircuits(CIRCUIT_CAP));
            }
            continue;
        }
        if on_path[w] {
            continue;
        }
        on_path[w] = true;
        path.push(edge);
        dfs_circuits(root, w, adjacency, arcs, scc, on_path, path, out)?;
        path.pop();
        on_path[w] = false;
    }
    Ok(())
}

/// Canonical form of a circuit under rotation and traversal reversal: the
/// lexicographically smallest arc-id rotation of either direction.
pub fn canonical_form(graph: &ArcGraph, circuit: &[usize]) -> Vec<usize> {
    let rotations = |seq: &[usize]| -> Vec<usize> {
        let n = seq.len();
        (0..n)
            .map(|s| {
                let mut r: Vec<usize> = Vec::with_capacity(n);
                r.extend_from_slice(&seq[s..]);
                r.extend_from_slice(&seq[..s]);
                r
            })
            .min()
            .unwrap_or_default()
    };
    let forward = rotations(circuit);
    let reversed: Option<Vec<usize>> = circuit
        .iter()
        .rev()
        .map(|&id| graph.reverse_of(id))
        .collect();
    match reversed {
        Some(r) => forward.min(rotations(&r)),
        None => forward,
    }
}

/// Applies the admissibility filters in order: minimum length 4; maximum
/// length `2 |B|`; the provisional polygon must contain (or pass through) the
/// origin; at most two visited vertices per bifurcation point (a circuit must
/// not cross the same bifurcation point twice); canonical dedup of rotations
/// and reversals.
pub fn filter_circuits(
    graph: &ArcGraph,
    circuits: &[Circuit],
    n_bifurcations: usize,
    origin_tol: f64,
) -> Vec<Circuit> {
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut out = Vec::new();
    for c in circuits {
        if c.len() < 4 || c.len() > 2 * n_bifurcations {
            continue;
        }
        // the blend across a bifurcation point cuts the corner at the scale of
        // the probe radius, so the on-boundary tolerance covers that gap
        let probe_r = c
            .iter()
            .map(|&id| graph.vertices[graph.arcs[id].from].radius)
            .fold(0.0f64, f64::max);
        let polygon = provisional_polygon(graph, c);
        if !contains_point(&polygon, [0.0, 0.0], origin_tol.max(2.0 * probe_r)) {
            continue;
        }
        let mut visits = vec![0usize; n_bifurcations];
        for &id in c {
            visits[graph.vertices[graph.arcs[id].from].parent] += 1;
        }
        if visits.iter().any(|&v| v > 2) {
            continue;
        }
        let canon = canonical_form(graph, c);
        if seen.contains(&canon) {
            continue;
        }
        seen.push(canon);
        out.push(c.clone());
    }
    out
}

fn provisional_polygon(graph: &ArcGraph, circuit: &[usize]) -> Vec<[f64; 2]> {
    let mut polygon = Vec::new();
    for &id in circuit {
        let poly = &graph.arcs[id].polyline;
        polygon.extend_from_slice(&poly[..poly.len() - 1]);
    }
    polygon
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainCandidate {
    pub loop_points: Vec<[f64; 2]>,
    pub circuit: Circuit,
    /// Relative tensor discrepancy, filled in by ranking.
    pub score: Option<f64>,
}

/// Converts an admissible circuit into a closed boundary loop. Traced arcs
/// contribute their polylines; trivial gap arcs are bridged with a cubic
/// Hermite blend matching positions and one-sided tangents of the adjacent
/// arcs. The concatenation must close within `tol`.
pub fn construct_domain(
    graph: &ArcGraph,
    circuit: &[usize],
    t_step: f64,
    tol: f64,
) -> Result<DomainCandidate, TopologyError> {
    if circuit.is_empty() {
        return Err(TopologyError::EmptyCircuit);
    }
    for &id in circuit {
        if id >= graph.arcs.len() {
            return Err(TopologyError::BadArcId(id));
        }
    }
    let n = circuit.len();
    let arc = |k: usize| &graph.arcs[circuit[k % n]];
    for k in 0..n {
        let gap = end_of(arc(k))
            .iter()
            .zip(&start_of(arc(k + 1)))
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        if gap > tol {
            return Err(TopologyError::OpenLoop(gap));
        }
    }

    let mut loop_points: Vec<[f64; 2]> = Vec::new();
    for k in 0..n {
        let a = arc(k);
        let pts = if a.dir == 0 {
            let prev = arc(k + n - 1);
            let next = arc(k + 1);
            hermite_blend(
                a.polyline[0],
                *a.polyline.last().unwrap(),
                outgoing_tangent(prev).unwrap_or_else(|| chord_dir(a)),
                incoming_tangent(next).unwrap_or_else(|| chord_dir(a)),
                t_step,
            )
        } else {
            a.polyline.clone()
        };
        // drop the shared junction point
        let skip = usize::from(!loop_points.is_empty());
        loop_points.extend_from_slice(&pts[skip..]);
    }
    // close the loop exactly
    if let Some(&first) = loop_points.first() {
        *loop_points.last_mut().unwrap() = first;
    }
    Ok(DomainCandidate {
        loop_points,
        circuit: circuit.to_vec(),
        score: None,
    })
}

fn start_of(a: &Arc) -> [f64; 2] {
    a.polyline[0]
}

fn end_of(a: &Arc) -> [f64; 2] {
    *a.polyline.last().unwrap()
}

fn chord_dir(a: &Arc) -> [f64; 2] {
    let (s, e) = (start_of(a), end_of(a));
    let d = [e[0] - s[0], e[1] - s[1]];
    let n = d[0].hypot(d[1]).max(1e-300);
    [d[0] / n, d[1] / n]
}

/// Unit tangent at the end of a traced arc, `None` for trivial arcs.
fn outgoing_tangent(a: &Arc) -> Option<[f64; 2]> {
    if a.dir == 0 || a.polyline.len() < 2 {
        return None;
    }
    let m = a.polyline.len();
    let d = [
        a.polyline[m - 1][0] - a.polyline[m - 2][0],
        a.polyline[m - 1][1] - a.polyline[m - 2][1],
    ];
    let n = d[0].hypot(d[1]).max(1e-300);
    Some([d[0] / n, d[1] / n])
}

fn incoming_tangent(a: &Arc) -> Option<[f64; 2]> {
    if a.dir == 0 || a.polyline.len() < 2 {
        return None;
    }
    let d = [
        a.polyline[1][0] - a.polyline[0][0],
        a.polyline[1][1] - a.polyline[0][1],
    ];
    let n = d[0].hypot(d[1]).max(1e-300);
    Some([d[0] / n, d[1] / n])
}

/// Cubic Hermite segment from `p0` to `p1` with unit end tangents scaled to
/// the chord length, sampled at roughly `t_step` spacing.
fn hermite_blend(
    p0: [f64; 2],
    p1: [f64; 2],
    t0: [f64; 2],
    t1: [f64; 2],
    t_step: f64,
) -> Vec<[f64; 2]> {
    let chord = (p1[0] - p0[0]).hypot(p1[1] - p0[1]);
    let samples = ((chord / t_step).ceil() as usize).clamp(2, 10_000);
    let m0 = [t0[0] * chord, t0[1] * chord];
    let m1 = [t1[0] * chord, t1[1] * chord];
    (0..=samples)
        .map(|k| {
            let s = k as f64 / samples as f64;
            let (s2, s3) = (s * s, s * s * s);
            let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
            let h10 = s3 - 2.0 * s2 + s;
            let h01 = -2.0 * s3 + 3.0 * s2;
            let h11 = s3 - s2;
            [
                h00 * p0[0] + h10 * m0[0] + h01 * p1[0] + h11 * m1[0],
                h00 * p0[1] + h10 * m0[1] + h01 * p1[1] + h11 * m1[1],
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levelset::{bifurcation_points, segmentation_points, SegmentationConfig};
    use crate::poly2d::circle_poly;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    /// Two unit circles with the upper crossing translated to the origin.
    fn fixture_poly() -> Poly2 {
        let h = (1.0f64 - 0.09).sqrt();
        circle_poly([-0.3, -h], 1.0).mul(&circle_poly([0.3, -h], 1.0))
    }

    fn fixture_graph() -> (ArcGraph, Vec<String>) {
        let p = fixture_poly();
        let bifs = bifurcation_points(&p, 3.0, 1e-6, 1e-4, true);
        assert_eq!(bifs.len(), 2);
        let segs = segmentation_points(&p, &bifs, &SegmentationConfig::default()).unwrap();
        assert_eq!(segs.len(), 8);
        find_arcs(&p, &segs, &TraceConfig::default())
    }

    fn simple_arcs(edges: &[(usize, usize)]) -> Vec<Arc> {
        edges
            .iter()
            .map(|&(from, to)| Arc {
                from,
                to,
                dir: 1,
                polyline: vec![[from as f64, 0.0], [to as f64, 0.0]],
            })
            .collect()
    }

    /// Independent circuit oracle: enumerates vertex sequences whose first
    /// element is the minimum, keeps those that close into a cycle, and
    /// expands every parallel-edge combination into an edge-id list.
    fn brute_force_circuits(n: usize, arcs: &[Arc]) -> BTreeSet<Vec<usize>> {
        fn emit(seq: &[usize], arcs: &[Arc], out: &mut BTreeSet<Vec<usize>>) {
            let full: Vec<usize> = seq.iter().copied().chain([seq[0]]).collect();
            let mut edge_seqs: Vec<Vec<usize>> = vec![Vec::new()];
            for w in full.windows(2) {
                let options: Vec<usize> = arcs
                    .iter()
                    .enumerate()
                    .filter(|(_, a)| a.from == w[0] && a.to == w[1])
                    .map(|(id, _)| id)
                    .collect();
                if options.is_empty() {
                    return;
                }
                edge_seqs = edge_seqs
                    .into_iter()
                    .flat_map(|s| {
                        options.iter().map(move |&id| {
                            let mut s2 = s.clone();
                            s2.push(id);
                            s2
                        })
                    })
                    .collect();
            }
            out.extend(edge_seqs);
        }

        fn extend(seq: &mut Vec<usize>, n: usize, arcs: &[Arc], out: &mut BTreeSet<Vec<usize>>) {
            if seq.len() >= 2 {
                emit(seq, arcs, out);
            }
            for v in seq[0] + 1..n {
                if seq.contains(&v) {
                    continue;
                }
                seq.push(v);
                extend(seq, n, arcs, out);
                seq.pop();
            }
        }

        let mut out = BTreeSet::new();
        for start in 0..n {
            extend(&mut vec![start], n, arcs, &mut out);
        }
        out
    }

    #[test]
    fn triangle_has_one_circuit() {
        let arcs = simple_arcs(&[(0, 1), (1, 2), (2, 0)]);
        let circuits = elementary_circuits(3, &arcs).unwrap();
        assert_eq!(circuits, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn bidirectional_k3_has_five_circuits() {
        let arcs = simple_arcs(&[(0, 1), (1, 0), (1, 2), (2, 1), (0, 2), (2, 0)]);
        let circuits = elementary_circuits(3, &arcs).unwrap();
        assert_eq!(circuits.len(), 5, "{circuits:?}");
    }

    #[test]
    fn circuits_match_brute_force_on_random_digraphs() {
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.random_range(2..=8);
            let mut edges = Vec::new();
            for from in 0..n {
                for to in 0..n {
                    if from != to && rng.random_range(0.0..1.0) < 0.3 {
                        edges.push((from, to));
                    }
                }
            }
            let arcs = simple_arcs(&edges);
            let found: BTreeSet<Vec<usize>> = elementary_circuits(n, &arcs)
                .unwrap()
                .into_iter()
                .collect();
            let expected = brute_force_circuits(n, &arcs);
            assert_eq!(found, expected, "seed {seed}, n {n}, edges {edges:?}");
        }
    }

    #[test]
    fn fixture_arc_counts() {
        let (graph, diagnostics) = fixture_graph();
        let trivial = graph.arcs.iter().filter(|a| a.dir == 0).count();
        let level1 = graph.arcs.iter().filter(|a| a.dir == 1).count();
        let level2 = graph.arcs.iter().filter(|a| a.dir == 2).count();
        assert_eq!(trivial, 24);
        assert_eq!(level1, 4, "diagnostics: {diagnostics:?}");
        assert_eq!(level2, 4);
        // each traced arc is found from exactly one endpoint; the other four
        // traces run into a crossing and are skipped with a note
        assert_eq!(diagnostics.len(), 4, "{diagnostics:?}");
    }

    #[test]
    fn every_level_arc_has_its_reverse() {
        let (graph, _) = fixture_graph();
        for (id, a) in graph.arcs.iter().enumerate() {
            if a.dir != 0 {
                let rev = graph.reverse_of(id).expect("reverse arc missing");
                assert_ne!(rev, id);
                assert_eq!(graph.arcs[rev].from, a.to);
            }
        }
    }

    #[test]
    fn no_segmentation_points_no_arcs() {
        let p = circle_poly([1.0, 0.0], 1.0);
        let (graph, diagnostics) = find_arcs(&p, &[], &TraceConfig::default());
        assert!(graph.arcs.is_empty() && diagnostics.is_empty());
    }

    #[test]
    fn fixture_yields_six_admissible_circuit_classes() {
        let (graph, _) = fixture_graph();
        let circuits = elementary_circuits(graph.vertices.len(), &graph.arcs).unwrap();
        let kept = filter_circuits(&graph, &circuits, 2, 1e-6);
        assert_eq!(kept.len(), 6, "kept {} circuits", kept.len());
        for c in &kept {
            assert_eq!(c.len(), 4);
            let levels = c.iter().filter(|&&id| graph.arcs[id].dir != 0).count();
            assert_eq!(levels, 2, "each class alternates level and gap arcs");
        }
    }

    #[test]
    fn filtering_is_idempotent() {
        let (graph, _) = fixture_graph();
        let circuits = elementary_circuits(graph.vertices.len(), &graph.arcs).unwrap();
        let once = filter_circuits(&graph, &circuits, 2, 1e-6);
        let twice = filter_circuits(&graph, &once, 2, 1e-6);
        assert_eq!(once, twice);
    }

    #[test]
    fn reversed_traversal_is_deduplicated() {
        let (graph, _) = fixture_graph();
        let circuits = elementary_circuits(graph.vertices.len(), &graph.arcs).unwrap();
        let kept = filter_circuits(&graph, &circuits, 2, 1e-6);
        for c in &kept {
            let reversed: Option<Vec<usize>> =
                c.iter().rev().map(|&id| graph.reverse_of(id)).collect();
            let reversed = reversed.unwrap();
            let mut with_reverse: Vec<Circuit> = kept.clone();
            with_reverse.push(reversed);
            let filtered = filter_circuits(&graph, &with_reverse, 2, 1e-6);
            assert_eq!(filtered.len(), kept.len());
        }
    }

    #[test]
    fn short_circuits_are_removed() {
        let (graph, _) = fixture_graph();
        // a trivial 2-cycle within one bifurcation point
        let a = graph.arcs.iter().position(|a| a.dir == 0).unwrap();
        let b = graph.reverse_of(a).unwrap();
        let kept = filter_circuits(&graph, &[vec![a, b]], 2, 1e-6);
        assert!(kept.is_empty());
    }

    #[test]
    fn constructed_domains_lie_on_the_level_set() {
        let p = fixture_poly();
        let (graph, _) = fixture_graph();
        let circuits = elementary_circuits(graph.vertices.len(), &graph.arcs).unwrap();
        let kept = filter_circuits(&graph, &circuits, 2, 1e-6);
        for c in &kept {
            let cand = construct_domain(&graph, c, 1e-3, 1e-6).unwrap();
            let first = cand.loop_points[0];
            let last = *cand.loop_points.last().unwrap();
            assert_eq!(first, last, "loop not closed");
            // points on traced portions satisfy P ~ 0; blends deviate only
            // near the crossings, within the probe radius
            let r = graph.vertices[0].radius;
            for q in &cand.loop_points {
                let near_crossing = q[0].hypot(q[1]) < 4.0 * r
                    || (q[0] - 0.0).hypot(q[1] + 2.0 * (1.0f64 - 0.09).sqrt()) < 4.0 * r;
                if !near_crossing {
                    assert!(p.eval(*q).abs() < 1e-6, "P = {} off level set at {q:?}", p.eval(*q));
                }
            }
        }
    }

    #[test]
    fn domain_areas_cover_the_expected_classes() {
        use crate::geometry::signed_area;
        let (graph, _) = fixture_graph();
        let circuits = elementary_circuits(graph.vertices.len(), &graph.arcs).unwrap();
        let kept = filter_circuits(&graph, &circuits, 2, 1e-6);
        let mut areas: Vec<f64> = kept
            .iter()
            .map(|c| {
                signed_area(&construct_domain(&graph, c, 1e-3, 1e-6).unwrap().loop_points).abs()
            })
            .collect();
        areas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // lens, two crescents (equal), two disks (equal), union
        let d = 0.6;
        let lens = 2.0 * (d / 2.0f64).acos() - d * (1.0 - d * d / 4.0).sqrt();
        let disk = std::f64::consts::PI;
        let crescent = disk - lens;
        let union = 2.0 * disk - lens;
        let mut expected = [lens, crescent, crescent, disk, disk, union];
        expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, e) in areas.iter().zip(expected) {
            assert!((a - e).abs() < 0.02, "areas {areas:?} vs expected {expected:?}");
        }
    }

    #[test]
    fn open_circuit_is_rejected() {
        let arcs = simple_arcs(&[(0, 1), (1, 2), (2, 0)]);
        let graph = ArcGraph {
            vertices: vec![
                SegPoint { point: [0.0, 0.0], parent: 0, radius: 0.05 },
                SegPoint { point: [1.0, 0.0], parent: 0, radius: 0.05 },
                SegPoint { point: [2.0, 0.0], parent: 1, radius: 0.05 },
            ],
            arcs,
        };
        // arcs 0 and 2 do not share an endpoint position in sequence 0,2
        let err = construct_domain(&graph, &[0, 2], 1e-3, 1e-6).unwrap_err();
        assert!(matches!(err, TopologyError::OpenLoop(_)));
    }
}
