//! Command-line front end: forward GPT computation, shape recovery from a
//! tensor, the end-to-end demo pipeline, circuit enumeration, and the noise
//! stability experiment.

use clap::{Args, Parser, Subcommand};
use gptshape::geometry::{make_shape, ShapeSpec};
use gptshape::nptensor::{assemble_np, tgpt, Contrast, TgptMatrix};
use gptshape::pipeline::{
    recover_domain, stability_experiment, RecoveryConfig, StabilityConfig,
};
use gptshape::topology::{elementary_circuits, filter_circuits, ArcGraph};
use std::error::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gptshape", version, about = "generalized polarization tensors and shape recovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ContrastArgs {
    /// Spectral parameter lambda (|lambda| > 1/2).
    #[arg(long, default_value_t = 1.0, conflicts_with = "conductivity")]
    lambda: f64,
    /// Conductivity k, converted to lambda = (k+1)/(2(k-1)).
    #[arg(long)]
    conductivity: Option<f64>,
}

impl ContrastArgs {
    fn contrast(&self) -> Result<Contrast, Box<dyn Error>> {
        Ok(match self.conductivity {
            Some(k) => Contrast::from_conductivity(k)?,
            None => Contrast::new(self.lambda)?,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute the tesselated GPT of a parametric shape.
    Forward {
        /// Shape spec as JSON, or @file to read it from a file.
        #[arg(long)]
        shape: String,
        /// Boundary discretization nodes.
        #[arg(long, default_value_t = 512)]
        nodes: usize,
        /// Tensor order d.
        #[arg(short, long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        contrast: ContrastArgs,
        /// Output JSON path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the raw entries as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Recover domain candidates from a tensor JSON file.
    Recover {
        /// Tensor JSON path.
        #[arg(long)]
        input: PathBuf,
        /// Directory for stage artifacts.
        #[arg(long)]
        outdir: Option<PathBuf>,
        #[command(flatten)]
        contrast: ContrastArgs,
        /// Skip the forward-solve ranking of candidates.
        #[arg(long)]
        no_rank: bool,
    },
    /// Forward computation, optional noise, and recovery in one run.
    Pipeline {
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 512)]
        nodes: usize,
        #[arg(short, long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        contrast: ContrastArgs,
        /// Relative Frobenius noise level added to the tensor.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        outdir: Option<PathBuf>,
        #[arg(long)]
        no_rank: bool,
    },
    /// Enumerate and filter elementary circuits of an arc-graph JSON file.
    Circuits {
        #[arg(long)]
        input: PathBuf,
        /// Output JSON path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Noise stability experiment on a parametric shape.
    Stability {
        #[arg(long)]
        shape: String,
        #[arg(long, default_value_t = 512)]
        nodes: usize,
        #[arg(short, long, default_value_t = 2)]
        order: usize,
        #[command(flatten)]
        contrast: ContrastArgs,
        /// Noise levels (repeatable).
        #[arg(long = "epsilon", default_values_t = vec![0.0, 1e-6, 1e-4, 1e-2])]
        epsilons: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_shape(arg: &str) -> Result<ShapeSpec, Box<dyn Error>> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)?,
        None => arg.to_string(),
    };
    Ok(serde_json::from_str(&text)?)
}

fn write_or_print<T: serde::Serialize>(
    value: &T,
    out: Option<&PathBuf>,
) -> Result<(), Box<dyn Error>> {
    let text = serde_json::to_string_pretty(value)?;
    match out {
        Some(path) => std::fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn forward_tensor(
    shape: &str,
    nodes: usize,
    order: usize,
    contrast: &Contrast,
) -> Result<TgptMatrix, Box<dyn Error>> {
    let spec = parse_shape(shape)?;
    let curve = make_shape(&spec, nodes)?;
    let op = assemble_np(&curve)?;
    Ok(tgpt(&op, contrast, order)?)
}

/// Exit code used when the recovered kernel direction is ambiguous.
const EXIT_AMBIGUOUS: u8 = 3;

fn run_recover(
    t: &TgptMatrix,
    cfg: &RecoveryConfig,
    outdir: Option<&PathBuf>,
) -> Result<ExitCode, Box<dyn Error>> {
    let outcome = recover_domain(t, cfg, outdir.map(|p| p.as_path()))?;
    for d in &outcome.diagnostics {
        eprintln!("note: {d}");
    }
    println!(
        "degree {} polynomial recovered; gap ratio {:.3e}",
        outcome.recovery.poly.degree(),
        outcome.recovery.diagnostics.gap_ratio
    );
    if outcome.smooth_loop {
        println!("level set is a single smooth loop");
    } else {
        println!(
            "{} bifurcation points, {} segmentation points, {} admissible circuits",
            outcome.bifurcations.len(),
            outcome.segmentation.len(),
            outcome.admissible_circuits.len()
        );
    }
    for (k, c) in outcome.candidates.iter().enumerate() {
        match c.score {
            Some(s) => println!("candidate {k}: score {s:.6e}"),
            None => println!("candidate {k}: unscored"),
        }
    }
    if outcome.recovery.diagnostics.ambiguous {
        eprintln!("error: kernel direction is ambiguous");
        return Ok(ExitCode::from(EXIT_AMBIGUOUS));
    }
    Ok(ExitCode::SUCCESS)
}

fn run() -> Result<ExitCode, Box<dyn Error>> {
    let cli = Cli::parse();
    match cli.command {
        Command::Forward {
            shape,
            nodes,
            order,
            contrast,
            out,
            csv,
        } => {
            let t = forward_tensor(&shape, nodes, order, &contrast.contrast()?)?;
            if let Some(path) = csv {
                std::fs::write(path, t.to_csv())?;
            }
            write_or_print(&t, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Recover {
            input,
            outdir,
            contrast,
            no_rank,
        } => {
            let t: TgptMatrix = serde_json::from_str(&std::fs::read_to_string(input)?)?;
            let cfg = RecoveryConfig {
                lambda: contrast.contrast()?.lambda(),
                skip_ranking: no_rank,
                ..RecoveryConfig::default()
            };
            run_recover(&t, &cfg, outdir.as_ref())
        }
        Command::Pipeline {
            shape,
            nodes,
            order,
            contrast,
            noise,
            seed,
            outdir,
            no_rank,
        } => {
            let contrast = contrast.contrast()?;
            let t = forward_tensor(&shape, nodes, order, &contrast)?;
            let t = if noise > 0.0 {
                perturbed(&t, noise, seed)
            } else {
                t
            };
            let cfg = RecoveryConfig {
                lambda: contrast.lambda(),
                skip_ranking: no_rank,
                ..RecoveryConfig::default()
            };
            run_recover(&t, &cfg, outdir.as_ref())
        }
        Command::Circuits { input, out } => {
            let graph: ArcGraph = serde_json::from_str(&std::fs::read_to_string(input)?)?;
            let circuits = elementary_circuits(graph.vertices.len(), &graph.arcs)?;
            let n_bifs = graph
                .vertices
                .iter()
                .map(|v| v.parent + 1)
                .max()
                .unwrap_or(0);
            let admissible = filter_circuits(&graph, &circuits, n_bifs, 1e-6);
            println!(
                "{} elementary circuits, {} admissible",
                circuits.len(),
                admissible.len()
            );
            write_or_print(&admissible, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Stability {
            shape,
            nodes,
            order,
            contrast,
            epsilons,
            trials,
            seed,
            out,
        } => {
            let contrast = contrast.contrast()?;
            let t = forward_tensor(&shape, nodes, order, &contrast)?;
            let spec = parse_shape(&shape)?;
            let truth = make_shape(&spec, 2048)?.nodes().to_vec();
            let cfg = StabilityConfig {
                epsilons,
                trials,
                seed,
                recovery: RecoveryConfig {
                    lambda: contrast.lambda(),
                    skip_ranking: true,
                    ..RecoveryConfig::default()
                },
            };
            let report = stability_experiment(&t, &truth, &cfg);
            if let (Some(floor), Some(slope)) = (report.floor, report.slope) {
                println!("floor {floor:.3e}, log-log slope {slope:.3}");
            }
            write_or_print(&report, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn perturbed(t: &TgptMatrix, noise: f64, seed: u64) -> TgptMatrix {
    use rand_chacha::rand_core::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let g: nalgebra::DMatrix<f64> =
        nalgebra::DMatrix::from_fn(t.rows(), t.cols(), |_, _| StandardNormal.sample(&mut rng));
    let scale = noise * t.entries().norm() / g.norm().max(f64::MIN_POSITIVE);
    TgptMatrix::new(t.d(), t.lambda(), t.entries() + g * scale)
        .expect("perturbation preserves shape")
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
