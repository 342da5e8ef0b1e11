use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dcdfm::harness::{parse_experiment_spec, ExperimentId, ExperimentSpec, ParamsFile};
use dcdfm::metrics::{bound_report, error_rate};
use dcdfm::model::{build_omega, gamma_bound, sample_adjacency_with, WeightedAdjacency};
use dcdfm::netio::{self, Manifest};
use dcdfm::{detect, run_real_noise, run_simulation, summarize, Error, KMeansConfig, Method};

#[derive(Parser)]
#[command(name = "dcdfm", version, about = "Degree-corrected spectral community detection for weighted networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the expectation matrix or a sampled adjacency matrix as CSV.
    Generate {
        /// key=value model description.
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Write the expectation matrix instead of a sample.
        #[arg(long)]
        omega: bool,
        /// Overrides the seed in the params file for sampling.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        labels_out: Option<PathBuf>,
        #[arg(long)]
        theta_out: Option<PathBuf>,
    },
    /// Detect communities in a matrix CSV or GML network.
    Detect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "ndfa")]
        method: Method,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        /// Output label file, one 1-based label per line.
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth label file; prints the error rate when given.
        #[arg(long)]
        truth: Option<PathBuf>,
    },
    /// Run a simulation sweep and write per-replicate errors as CSV.
    Simulate {
        #[arg(long, conflicts_with = "spec", required_unless_present = "spec")]
        experiment: Option<ExperimentId>,
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Per-value means and standard errors; defaults to `<out>.summary.csv`.
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        replicates: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        restarts: Option<usize>,
        /// Run replicates on one thread.
        #[arg(long)]
        serial: bool,
    },
    /// Noise sweep on a real network listed in a manifest.
    Realdata {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        dataset: String,
        /// Comma-separated noise variances.
        #[arg(long, default_value = "0,0.01,0.02,0.03,0.04,0.05,0.06,0.07,0.08,0.09,0.1,0.11,0.12,0.13,0.14,0.15,0.16,0.17,0.18,0.19,0.2")]
        sigma2w_grid: String,
        #[arg(long, default_value_t = 50)]
        replicates: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
        #[arg(long)]
        serial: bool,
    },
    /// Evaluate the consistency-bound quantities for a model and a matrix.
    Bound {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
        /// Overrides the analytic variance scale of the distribution.
        #[arg(long)]
        gamma: Option<f64>,
    },
}

fn summary_path(out: &Path, summary: Option<PathBuf>) -> PathBuf {
    summary.unwrap_or_else(|| {
        let stem = out.file_stem().map_or("results".into(), |s| s.to_string_lossy().into_owned());
        out.with_file_name(format!("{stem}.summary.csv"))
    })
}

fn read_adjacency(path: &Path) -> Result<WeightedAdjacency, Error> {
    let bytes = std::fs::read(path)?;
    let is_gml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gml"));
    if is_gml {
        Ok(netio::parse_gml("input", &bytes)?.adjacency)
    } else {
        WeightedAdjacency::new(netio::parse_matrix_csv(&bytes)?)
    }
}

fn run(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Generate {
            params,
            out,
            omega,
            seed,
            labels_out,
            theta_out,
        } => {
            let pf = ParamsFile::parse(&std::fs::read_to_string(&params)?)?;
            let expectation = build_omega(&pf.params);
            let m = if omega {
                expectation
            } else {
                let seed = seed.unwrap_or(pf.seed);
                sample_adjacency_with(&expectation, &pf.distribution, seed, pf.domain)?.into_matrix()
            };
            netio::write_matrix_csv(&out, &m)?;
            if let Some(p) = labels_out {
                std::fs::write(p, netio::format_labels(pf.params.labeling()))?;
            }
            if let Some(p) = theta_out {
                let lines: String = pf.params.theta().values().iter().map(|t| format!("{t:.16e}\n")).collect();
                std::fs::write(p, lines)?;
            }
        }
        Command::Detect {
            input,
            k,
            method,
            seed,
            restarts,
            out,
            truth,
        } => {
            let a = read_adjacency(&input)?;
            let config = KMeansConfig::new(k, seed).with_restarts(restarts);
            let det = detect(&a, method, &config)?;
            std::fs::write(&out, netio::format_labels(&det.labeling))?;
            println!("method={}", det.method);
            let eigs: Vec<String> = det.embedding.eigenvalues.iter().map(|v| v.to_string()).collect();
            println!("eigenvalues={}", eigs.join(","));
            println!("kmeans_objective={}", det.kmeans.objective);
            println!("kmeans_iterations={}", det.kmeans.iterations_used);
            println!("degenerate_rows={}", det.degenerate_rows.len());
            if det.is_degenerate() {
                eprintln!(
                    "warning: degenerate embedding for {} of {} nodes",
                    det.degenerate_rows.len(),
                    a.n()
                );
            }
            if let Some(t) = truth {
                let truth = netio::read_labels(&std::fs::read(t)?)?;
                println!("error_rate={}", error_rate(&det.labeling, &truth)?);
            }
        }
        Command::Simulate {
            experiment,
            spec,
            out,
            summary,
            replicates,
            seed,
            restarts,
            serial,
        } => {
            let mut s: ExperimentSpec = match (experiment, spec) {
                (_, Some(path)) => parse_experiment_spec(&std::fs::read_to_string(path)?)?,
                (Some(id), None) => ExperimentSpec::preset(id).ok_or_else(|| {
                    Error::InvalidConfig(format!("{id} is not a simulation preset"))
                })?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            if let Some(r) = replicates {
                s.replicates = r;
            }
            if let Some(seed) = seed {
                s.base_seed = seed;
            }
            if let Some(r) = restarts {
                s.restarts = r;
            }
            let records = run_simulation(&s, !serial)?;
            netio::write_results_csv(&out, &records)?;
            netio::write_summary_csv(&summary_path(&out, summary), &summarize(&records))?;
        }
        Command::Realdata {
            manifest,
            dataset,
            sigma2w_grid,
            replicates,
            seed,
            restarts,
            out,
            summary,
            serial,
        } => {
            let grid: Vec<f64> = sigma2w_grid
                .split(',')
                .map(|s| s.trim().parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| Error::InvalidConfig(format!("bad --sigma2w-grid `{sigma2w_grid}`")))?;
            let m = Manifest::read(&manifest)?;
            if !m.available(&dataset) {
                println!("dataset={dataset} status=skipped reason=file-not-available");
                return Ok(());
            }
            let ds = m.load(&dataset)?;
            let records = run_real_noise(&ds, &grid, replicates, seed, restarts, !serial)?;
            netio::write_results_csv(&out, &records)?;
            netio::write_summary_csv(&summary_path(&out, summary), &summarize(&records))?;
            println!("dataset={dataset} status=ok n={}", ds.n());
        }
        Command::Bound {
            params,
            matrix,
            gamma,
        } => {
            let pf = ParamsFile::parse(&std::fs::read_to_string(&params)?)?;
            let a = WeightedAdjacency::new(netio::read_matrix_csv(&matrix)?)?;
            let gamma = gamma.unwrap_or_else(|| gamma_bound(&pf.distribution, &pf.params));
            let report = bound_report(&a, &pf.params, gamma)?;
            for (k, v) in report.fields() {
                println!("{k}={v}");
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_io() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
