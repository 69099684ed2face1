//! End-to-end shape recovery from a tesselated GPT: kernel polynomial, level
//! set topology, candidate construction, ranking, and the noise-stability
//! experiment. Everything here is single-threaded and seeded, so identical
//! inputs produce byte-identical artifacts.

use crate::export::{write_svg, SvgLayer};
use crate::geometry::{
    hausdorff_loops, resample, write_points_csv, GeometryError,
};
use crate::inversion::{recover_coefficients, InversionError, RecoveredPoly};
use crate::levelset::{
    bifurcation_points, check_loop, segmentation_points, LevelsetError, SegPoint,
    SegmentationConfig, TraceConfig,
};
use crate::nptensor::{assemble_np, tgpt, Contrast, NpError, TgptMatrix};
use crate::topology::{
    construct_domain, elementary_circuits, filter_circuits, find_arcs, ArcGraph, Circuit,
    DomainCandidate, TopologyError,
};
use nalgebra::DMatrix;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("inversion stage: {0}")]
    Inversion(#[from] InversionError),
    #[error("level-set stage: {0}")]
    Levelset(#[from] LevelsetError),
    #[error("topology stage: {0}")]
    Topology(#[from] TopologyError),
    #[error("geometry stage: {0}")]
    Geometry(#[from] GeometryError),
    #[error("forward stage: {0}")]
    Forward(#[from] NpError),
    #[error("artifact output: {0}")]
    Io(#[from] std::io::Error),
    #[error("artifact serialization: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RecoveryConfig {
    pub trace: TraceConfig,
    pub segmentation: SegmentationConfig,
    /// On-level tolerance for accepting a critical point as a bifurcation.
    pub tol_bif: f64,
    /// Merge radius for duplicate bifurcation points.
    pub tol_cluster: f64,
    /// Half-width of the search box for bifurcation points.
    pub box_half_width: f64,
    /// Base on-boundary tolerance of the origin-containment filter.
    pub origin_tol: f64,
    /// Candidate loops are resampled to this many arclength-uniform nodes
    /// before forward evaluation.
    pub resample_nodes: usize,
    /// Contrast used for the ranking forward solves.
    pub lambda: f64,
    /// Skip the forward-solve ranking stage (scores stay unset).
    pub skip_ranking: bool,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        Self {
            trace: TraceConfig::default(),
            segmentation: SegmentationConfig::default(),
            tol_bif: 1e-6,
            tol_cluster: 1e-4,
            box_half_width: 3.0,
            origin_tol: 1e-6,
            resample_nodes: 1 << 10,
            lambda: 1.0,
            skip_ranking: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecoveryOutcome {
    pub recovery: RecoveredPoly,
    /// True when the level set was a single smooth loop and the topology
    /// stages were skipped.
    pub smooth_loop: bool,
    pub bifurcations: Vec<[f64; 2]>,
    pub segmentation: Vec<SegPoint>,
    pub graph: Option<ArcGraph>,
    pub admissible_circuits: Vec<Circuit>,
    /// Candidates in ranked order (best first) when ranking ran; construction
    /// order otherwise.
    pub candidates: Vec<DomainCandidate>,
    pub diagnostics: Vec<String>,
}

fn dump_json<T: Serialize>(outdir: Option<&Path>, name: &str, value: &T) -> Result<(), PipelineError> {
    if let Some(dir) = outdir {
        std::fs::create_dir_all(dir)?;
        let file = std::fs::File::create(dir.join(name))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), value)?;
    }
    Ok(())
}

/// Full inverse pipeline on a measured tensor: recover the boundary
/// polynomial, trace its zero set, and assemble ranked domain candidates.
/// Intermediate artifacts are written into `outdir` when given.
pub fn recover_domain(
    t: &TgptMatrix,
    cfg: &RecoveryConfig,
    outdir: Option<&Path>,
) -> Result<RecoveryOutcome, PipelineError> {
    let recovery = recover_coefficients(t)?;
    dump_json(outdir, "polynomial.json", &recovery)?;
    let p = &recovery.poly;
    let mut diagnostics = Vec::new();
    if recovery.diagnostics.ambiguous {
        diagnostics.push("kernel direction is ambiguous; recovery may be unreliable".into());
    }

    // the boundary passes through the origin, so a smooth level set can be
    // traced from there directly
    if let Some(loop_points) = check_loop(p, [0.0, 0.0], &cfg.trace) {
        let mut candidates = vec![DomainCandidate {
            loop_points,
            circuit: Vec::new(),
            score: None,
        }];
        if !cfg.skip_ranking {
            diagnostics.extend(rank_domains(&mut candidates, t, cfg)?);
        }
        write_candidate_artifacts(outdir, &candidates)?;
        let outcome = RecoveryOutcome {
            recovery,
            smooth_loop: true,
            bifurcations: Vec::new(),
            segmentation: Vec::new(),
            graph: None,
            admissible_circuits: Vec::new(),
            candidates,
            diagnostics,
        };
        dump_json(outdir, "outcome.json", &outcome)?;
        return Ok(outcome);
    }

    let bifurcations = bifurcation_points(p, cfg.box_half_width, cfg.tol_bif, cfg.tol_cluster, true);
    dump_json(outdir, "bifurcations.json", &bifurcations)?;
    let segmentation = segmentation_points(p, &bifurcations, &cfg.segmentation)?;
    dump_json(outdir, "segmentation.json", &segmentation)?;

    let (graph, arc_diags) = find_arcs(p, &segmentation, &cfg.trace);
    diagnostics.extend(arc_diags);
    dump_json(outdir, "arc_graph.json", &graph)?;

    let circuits = elementary_circuits(graph.vertices.len(), &graph.arcs)?;
    let admissible = filter_circuits(&graph, &circuits, bifurcations.len(), cfg.origin_tol);
    dump_json(outdir, "circuits.json", &admissible)?;
    if admissible.is_empty() {
        diagnostics.push("no admissible candidate".into());
    }

    let mut candidates = Vec::new();
    for (k, c) in admissible.iter().enumerate() {
        match construct_domain(&graph, c, cfg.trace.t_step, cfg.trace.tol_po) {
            Ok(cand) => candidates.push(cand),
            Err(e) => diagnostics.push(format!("circuit {k} could not be constructed: {e}")),
        }
    }
    // geometric dedup: distinct circuits occasionally assemble the same loop
    let mut unique: Vec<DomainCandidate> = Vec::new();
    for cand in candidates {
        let dup = unique.iter().any(|u| {
            hausdorff_loops(&u.loop_points, &cand.loop_points)
                .map(|d| d < 1e-3)
                .unwrap_or(false)
        });
        if dup {
            diagnostics.push("duplicate candidate loop dropped".into());
        } else {
            unique.push(cand);
        }
    }
    let mut candidates = unique;

    if !cfg.skip_ranking {
        diagnostics.extend(rank_domains(&mut candidates, t, cfg)?);
    }
    write_candidate_artifacts(outdir, &candidates)?;

    let outcome = RecoveryOutcome {
        recovery,
        smooth_loop: false,
        bifurcations,
        segmentation,
        graph: Some(graph),
        admissible_circuits: admissible,
        candidates,
        diagnostics,
    };
    dump_json(outdir, "outcome.json", &outcome)?;
    Ok(outcome)
}

fn write_candidate_artifacts(
    outdir: Option<&Path>,
    candidates: &[DomainCandidate],
) -> Result<(), PipelineError> {
    let Some(dir) = outdir else { return Ok(()) };
    std::fs::create_dir_all(dir)?;
    for (k, cand) in candidates.iter().enumerate() {
        write_points_csv(&dir.join(format!("candidate_{k}.csv")), &cand.loop_points)?;
        write_svg(
            &dir.join(format!("candidate_{k}.svg")),
            &[SvgLayer::loop_(cand.loop_points.clone(), "black")],
        )?;
    }
    Ok(())
}

/// The first-order sub-tensor (row blocks of degree 1 and 2 against column
/// block of degree 1) used for ranking: the leading 5x2 corner.
pub fn first_order_block(t: &TgptMatrix) -> DMatrix<f64> {
    t.entries().view((0, 0), (5, 2)).into_owned()
}

/// Scores every candidate by the relative Frobenius discrepancy between its
/// first-order forward tensor and the reference, then sorts ascending (ties
/// keep construction order). Candidates whose forward solve fails are pushed
/// to the end with a diagnostic rather than aborting the ranking.
pub fn rank_domains(
    candidates: &mut Vec<DomainCandidate>,
    t_ref: &TgptMatrix,
    cfg: &RecoveryConfig,
) -> Result<Vec<String>, PipelineError> {
    let reference = first_order_block(t_ref);
    let ref_norm = reference.norm();
    let contrast = Contrast::new(cfg.lambda)?;
    let mut diagnostics = Vec::new();
    for (k, cand) in candidates.iter_mut().enumerate() {
        let result = resample(&cand.loop_points, cfg.resample_nodes)
            .map_err(PipelineError::from)
            .and_then(|curve| assemble_np(&curve).map_err(PipelineError::from))
            .and_then(|op| tgpt(&op, &contrast, 1).map_err(PipelineError::from));
        match result {
            Ok(t_c) => {
                cand.score = Some((first_order_block(&t_c) - &reference).norm() / ref_norm);
            }
            Err(e) => {
                cand.score = None;
                diagnostics.push(format!("candidate {k} could not be scored: {e}"));
            }
        }
    }
    // stable sort: scored ascending, unscored last in construction order
    candidates.sort_by(|a, b| match (a.score, b.score) {
        (Some(x), Some(y)) => x.partial_cmp(&y).unwrap(),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    Ok(diagnostics)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityConfig {
    /// Noise levels; 0 is allowed and gives the resolution floor.
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub recovery: RecoveryConfig,
}

impl Default for StabilityConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![0.0, 1e-6, 1e-4, 1e-2],
            trials: 10,
            seed: 0,
            recovery: RecoveryConfig {
                skip_ranking: true,
                ..RecoveryConfig::default()
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityRecord {
    pub epsilon: f64,
    pub trial: usize,
    /// Boundary Hausdorff distance of the best candidate to the truth;
    /// `None` when recovery failed at this noise level.
    pub hausdorff: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub records: Vec<StabilityRecord>,
    /// `(epsilon, median hausdorff)` over successful trials, in input order.
    pub medians: Vec<(f64, f64)>,
    /// Log-log least-squares slope over the positive noise levels.
    pub slope: Option<f64>,
    /// Noiseless reconstruction error, when 0 is among the levels.
    pub floor: Option<f64>,
}

/// Perturbs the tensor with i.i.d. Gaussian noise scaled to a Frobenius norm
/// of `epsilon * |T|_F`, re-runs the recovery, and measures the boundary
/// Hausdorff distance of the best candidate against `truth`.
pub fn stability_experiment(
    t_ref: &TgptMatrix,
    truth: &[[f64; 2]],
    cfg: &StabilityConfig,
) -> StabilityReport {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let base_norm = t_ref.entries().norm();
    let (rows, cols) = (t_ref.rows(), t_ref.cols());

    let mut records = Vec::new();
    let mut medians = Vec::new();
    for &eps in &cfg.epsilons {
        let mut distances = Vec::new();
        let trials = if eps == 0.0 { 1 } else { cfg.trials };
        for trial in 0..trials {
            let noisy = if eps == 0.0 {
                t_ref.clone()
            } else {
                let g: DMatrix<f64> = DMatrix::from_fn(rows, cols, |_, _| {
                    StandardNormal.sample(&mut rng)
                });
                let scale = eps * base_norm / g.norm().max(f64::MIN_POSITIVE);
                TgptMatrix::new(
                    t_ref.d(),
                    t_ref.lambda(),
                    t_ref.entries() + g * scale,
                )
                .expect("shape unchanged by perturbation")
            };
            let hausdorff = recover_domain(&noisy, &cfg.recovery, None)
                .ok()
                .and_then(|outcome| outcome.candidates.into_iter().next())
                .and_then(|best| hausdorff_loops(&best.loop_points, truth).ok());
            records.push(StabilityRecord {
                epsilon: eps,
                trial,
                hausdorff,
            });
            if let Some(d) = hausdorff {
                distances.push(d);
            }
        }
        if !distances.is_empty() {
            distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
            medians.push((eps, distances[distances.len() / 2]));
        }
    }

    let floor = medians
        .iter()
        .find(|(e, _)| *e == 0.0)
        .map(|&(_, d)| d);
    let fit: Vec<(f64, f64)> = medians
        .iter()
        .filter(|(e, d)| *e > 0.0 && *d > 0.0)
        .map(|&(e, d)| (e.ln(), d.ln()))
        .collect();
    let slope = if fit.len() >= 2 {
        let n = fit.len() as f64;
        let (sx, sy): (f64, f64) = fit.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let (sxx, sxy): (f64, f64) = fit
            .iter()
            .fold((0.0, 0.0), |(a, b), (x, y)| (a + x * x, b + x * y));
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    } else {
        None
    };

    StabilityReport {
        records,
        medians,
        slope,
        floor,
    }
}
