use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ising_lb::bounds::{self, BoundReport, FanoInputs};
use ising_lb::ensembles::{
    build_dregular, build_edge_bounded, build_girth, build_path_length, build_path_restricted,
    read_ensemble_dir, validate_ensemble, write_ensemble_dir, EnsembleKind, HardEnsemble,
};
use ising_lb::er;
use ising_lb::experiment::{run_experiment, write_result_csv, write_result_json, ExperimentConfig};
use ising_lb::ising::{infer_exact, kl_exact, IsingModel};
use ising_lb::paths::max_disjoint_paths;
use ising_lb::{Error, Graph};

#[derive(Parser)]
#[command(name = "ising-lb", version, about = "Sample-complexity lower bounds for Ising graph learning")]
struct Cli {
    /// Output format for numeric results.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Brute-force quantities of a single model.
    Exact {
        #[command(subcommand)]
        what: ExactCmd,
    },
    /// Closed-form bounds and sample-complexity thresholds.
    Bound {
        #[command(subcommand)]
        what: BoundCmd,
    },
    /// Build a hard hypothesis family and write it to a directory.
    Construct {
        #[command(subcommand)]
        class: ConstructCmd,
    },
    /// Check structural claims: connectivity certificates or whole families.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Run an empirical decoding experiment from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Write the per-n table here as CSV.
        #[arg(long)]
        out_csv: Option<PathBuf>,
        /// Write the full result here as JSON.
        #[arg(long)]
        out_json: Option<PathBuf>,
    },
    /// Dense random-graph bounds and diagnostics.
    Er {
        #[command(subcommand)]
        what: ErCmd,
    },
}

#[derive(Subcommand)]
enum ExactCmd {
    /// Log partition function.
    Z(ModelArgs),
    /// Pair correlation.
    Corr {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0)]
        s: usize,
        #[arg(long, default_value_t = 1)]
        t: usize,
    },
    /// KL divergence between two models with the same coupling.
    Kl {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        other: PathBuf,
        #[arg(long)]
        lambda: f64,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    lambda: f64,
}

#[derive(Subcommand)]
enum BoundCmd {
    /// Correlation lower bound for an (l,d)-connected pair.
    LdCorr {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        d: usize,
    },
    /// KL upper bound for a pair differing in sym-diff edges, each
    /// (l,d)-connected.
    LdKl {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 1)]
        sym_diff: usize,
    },
    /// KL upper bound for single-edge differences.
    Hamming1 {
        #[arg(long)]
        lambda: f64,
    },
    PathRestricted {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        eta: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        delta: f64,
    },
    PathLength {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        eta: usize,
        #[arg(long)]
        gamma: usize,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        delta: f64,
    },
    Girth {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        g: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        delta: f64,
    },
    Dregular {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        delta: f64,
    },
    EdgeBounded {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Single-center threshold (or counting threshold with --class-size-ln).
    Fano {
        #[arg(long)]
        delta: f64,
        #[arg(long, conflicts_with_all = ["hypotheses", "rho"])]
        class_size_ln: Option<f64>,
        #[arg(long, requires = "class_size_ln")]
        p: Option<usize>,
        #[arg(long)]
        hypotheses: Option<u64>,
        #[arg(long)]
        rho: Option<f64>,
        /// Also report the error floor at this sample count.
        #[arg(long)]
        n: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Connectivity,
    Hamming1,
}

impl From<KindArg> for EnsembleKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Connectivity => EnsembleKind::Connectivity,
            KindArg::Hamming1 => EnsembleKind::Hamming1,
        }
    }
}

#[derive(Subcommand)]
enum ConstructCmd {
    PathRestricted {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        eta: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Connectivity)]
        kind: KindArg,
        #[arg(long)]
        out: PathBuf,
    },
    PathLength {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        eta: usize,
        #[arg(long)]
        gamma: usize,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Connectivity)]
        kind: KindArg,
        #[arg(long)]
        out: PathBuf,
    },
    Girth {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        g: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = KindArg::Connectivity)]
        kind: KindArg,
        #[arg(long)]
        out: PathBuf,
    },
    Dregular {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
    EdgeBounded {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Certify that a vertex pair is (l,d)-connected.
    LdConnect {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        d: usize,
    },
    /// Re-validate a family previously written by `construct`.
    Ensemble {
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum ErCmd {
    Bound {
        #[command(flatten)]
        params: ErParamsArgs,
    },
    Regime {
        #[command(flatten)]
        params: ErParamsArgs,
    },
    /// Structural diagnostics of a dense graph (file or freshly sampled).
    Diagnose {
        #[arg(long, conflicts_with = "p")]
        graph: Option<PathBuf>,
        #[arg(long)]
        p: Option<usize>,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Sample {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ErParamsArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    c: f64,
    #[arg(long)]
    lambda: f64,
    #[arg(long, default_value_t = 0.01)]
    p_avg: f64,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
}

impl ErParamsArgs {
    fn build(&self) -> er::ERParams {
        er::ERParams {
            p: self.p,
            c: self.c,
            lambda: self.lambda,
            p_avg_target: self.p_avg,
            epsilon: self.epsilon,
        }
    }
}

fn load_model(args: &ModelArgs) -> Result<IsingModel, Error> {
    let text = std::fs::read_to_string(&args.graph)?;
    IsingModel::new(Graph::parse(&text)?, args.lambda)
}

fn emit_scalar(format: Format, name: &str, value: f64) {
    match format {
        Format::Json => println!("{}", serde_json::json!({ name: value })),
        Format::Csv => println!("{name}\n{value}"),
    }
}

fn emit_json<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).unwrap());
}

fn emit_report(format: Format, r: &BoundReport) {
    match format {
        Format::Json => emit_json(r),
        Format::Csv => {
            println!("term,value,log_value,overflow");
            for t in &r.term_values {
                println!("{},{},{},{}", t.name, t.value, t.log_value, t.overflow);
            }
            println!("n_threshold,{},{},false", r.n_threshold, r.log_n_threshold);
        }
    }
}

fn construct_summary(e: &HardEnsemble, out: &PathBuf) -> Result<(), Error> {
    write_ensemble_dir(e, out)?;
    emit_json(&serde_json::json!({
        "out": out,
        "members": e.members.len(),
        "rho": e.rho,
        "lambda": e.lambda,
        "class": e.class_tag,
        "kind": e.kind,
        "params": e.params,
    }));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    let format = cli.format;
    match cli.command {
        Command::Exact { what } => match what {
            ExactCmd::Z(model) => {
                let inf = infer_exact(&load_model(&model)?)?;
                emit_scalar(format, "log_partition", inf.log_partition);
            }
            ExactCmd::Corr { model, s, t } => {
                let inf = infer_exact(&load_model(&model)?)?;
                let p = inf.correlations.len();
                if s >= p || t >= p || s == t {
                    return Err(Error::InvalidArgument(format!(
                        "pair ({s},{t}) invalid for {p} vertices"
                    )));
                }
                emit_scalar(format, "correlation", inf.correlation(s, t));
            }
            ExactCmd::Kl { graph, other, lambda } => {
                let m1 = IsingModel::new(Graph::parse(&std::fs::read_to_string(&graph)?)?, lambda)?;
                let m2 = IsingModel::new(Graph::parse(&std::fs::read_to_string(&other)?)?, lambda)?;
                emit_scalar(format, "kl", kl_exact(&m1, &m2)?);
            }
        },
        Command::Bound { what } => match what {
            BoundCmd::LdCorr { lambda, l, d } => {
                emit_scalar(format, "corr_lower_bound", bounds::corr_lower_bound_ld(lambda, l, d)?);
            }
            BoundCmd::LdKl { lambda, l, d, sym_diff } => {
                emit_scalar(
                    format,
                    "kl_upper_bound",
                    bounds::kl_upper_bound_ld(lambda, l, d, sym_diff)?,
                );
            }
            BoundCmd::Hamming1 { lambda } => {
                emit_scalar(format, "kl_upper_bound", bounds::kl_upper_bound_hamming1(lambda)?);
            }
            BoundCmd::PathRestricted { p, eta, lambda, delta } => {
                emit_report(format, &bounds::threshold_path_restricted(p, eta, lambda, delta)?);
            }
            BoundCmd::PathLength { p, eta, gamma, nu, lambda, delta } => {
                emit_report(
                    format,
                    &bounds::threshold_path_length(p, eta, gamma, nu, lambda, delta)?,
                );
            }
            BoundCmd::Girth { p, g, d, nu, lambda, delta } => {
                emit_report(format, &bounds::threshold_girth(p, g, d, nu, lambda, delta)?);
            }
            BoundCmd::Dregular { p, d, lambda, delta } => {
                emit_report(format, &bounds::threshold_dregular(p, d, lambda, delta)?);
            }
            BoundCmd::EdgeBounded { p, k, lambda, delta } => {
                emit_report(format, &bounds::threshold_edge_bounded(p, k, lambda, delta)?);
            }
            BoundCmd::Fano { delta, class_size_ln, p, hypotheses, rho, n } => {
                let report = match (class_size_ln, hypotheses, rho) {
                    (Some(size_ln), None, None) => {
                        let p = p.ok_or_else(|| {
                            Error::InvalidArgument("--p is required with --class-size-ln".into())
                        })?;
                        bounds::fano_counting_threshold(size_ln, p, delta)?
                    }
                    (None, Some(count), Some(radius)) => {
                        bounds::fano_single_center_threshold(FanoInputs {
                            hypothesis_count: count,
                            kl_radius: radius,
                            target_error: delta,
                        })?
                    }
                    _ => {
                        return Err(Error::InvalidArgument(
                            "provide either --class-size-ln/--p or --hypotheses/--rho".into(),
                        ))
                    }
                };
                emit_report(format, &report);
                if let (Some(n), Some(count), Some(radius)) = (n, hypotheses, rho) {
                    emit_scalar(format, "error_floor", bounds::fano_error_floor(n, radius, count));
                }
            }
        },
        Command::Construct { class } => match class {
            ConstructCmd::PathRestricted { p, eta, lambda, kind, out } => {
                construct_summary(&build_path_restricted(p, eta, lambda, kind.into())?, &out)?;
            }
            ConstructCmd::PathLength { p, eta, gamma, nu, lambda, kind, out } => {
                construct_summary(
                    &build_path_length(p, eta, gamma, nu, lambda, kind.into())?,
                    &out,
                )?;
            }
            ConstructCmd::Girth { p, g, d, nu, lambda, kind, out } => {
                construct_summary(&build_girth(p, g, d, nu, lambda, kind.into())?, &out)?;
            }
            ConstructCmd::Dregular { p, d, lambda, out } => {
                construct_summary(&build_dregular(p, d, lambda)?, &out)?;
            }
            ConstructCmd::EdgeBounded { p, k, lambda, out } => {
                construct_summary(&build_edge_bounded(p, k, lambda)?, &out)?;
            }
        },
        Command::Verify { what } => match what {
            VerifyCmd::LdConnect { graph, s, t, l, d } => {
                let g = Graph::parse(&std::fs::read_to_string(&graph)?)?;
                let (found, cert) = max_disjoint_paths(&g, s, t, l)?;
                emit_json(&serde_json::json!({
                    "connected": found >= d,
                    "required": d,
                    "found": found,
                    "max_len": l,
                    "certificate": cert,
                }));
            }
            VerifyCmd::Ensemble { dir } => {
                let e = read_ensemble_dir(&dir)?;
                let report = validate_ensemble(&e);
                emit_json(&serde_json::json!({
                    "clean": report.is_clean(),
                    "report": report,
                }));
            }
        },
        Command::Simulate { config, out_csv, out_json } => {
            let cfg: ExperimentConfig =
                serde_json::from_str(&std::fs::read_to_string(&config)?)?;
            let dir = cfg.ensemble_dir.clone().ok_or_else(|| {
                Error::InvalidArgument("config must set ensemble_dir".into())
            })?;
            let e = read_ensemble_dir(std::path::Path::new(&dir))?;
            let result = run_experiment(&e, &cfg)?;
            if let Some(path) = &out_csv {
                write_result_csv(&result, path)?;
            }
            if let Some(path) = &out_json {
                write_result_json(&result, path)?;
            }
            match format {
                Format::Json => emit_json(&result),
                Format::Csv => print!("{}", ising_lb::experiment::result_to_csv(&result)),
            }
        }
        Command::Er { what } => match what {
            ErCmd::Bound { params } => emit_json(&er::er_lower_bound(&params.build())?),
            ErCmd::Regime { params } => {
                let regime = er::er_regime(&params.build());
                emit_json(&serde_json::json!({
                    "regime": regime,
                    "sample_scale": er::regime_sample_scale(regime),
                }));
            }
            ErCmd::Diagnose { graph, p, c, epsilon, gamma, seed } => {
                let g = match (graph, p) {
                    (Some(path), None) => Graph::parse(&std::fs::read_to_string(&path)?)?,
                    (None, Some(p)) => er::sample_er_graph(p, c, seed)?,
                    _ => {
                        return Err(Error::InvalidArgument(
                            "provide exactly one of --graph or --p".into(),
                        ))
                    }
                };
                emit_json(&er::er_structure_diagnostics(&g, c, epsilon, gamma));
            }
            ErCmd::Sample { p, c, seed, out } => {
                let g = er::sample_er_graph(p, c, seed)?;
                match out {
                    Some(path) => {
                        std::fs::write(&path, g.to_edgelist())?;
                        emit_json(&serde_json::json!({
                            "out": path,
                            "edges": g.num_edges(),
                        }));
                    }
                    None => print!("{}", g.to_edgelist()),
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Capacity(_) | Error::BudgetExhausted(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}
