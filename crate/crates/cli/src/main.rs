use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qlrap::io::{
    format_number, parse_spectrum, read_config, read_state_file, state_file_json, write_text,
    Basis, Config, MatrixFile, NamedBasis, SpectrumFile, StateFile,
};
use qlrap::linalg::DensityMatrix;
use qlrap::pca::{extract_principal_components, misordering_demo, optimize, MisorderingReport};
use qlrap::random::{random_density, rng};
use qlrap::solver::{solve, trace_family, SolverWarning};
use qlrap::sweep::{sweep, SweepGrid};
use qlrap::verify::{run_battery, ExactClosedForm};
use qlrap::{Error, Metric};

#[derive(Parser)]
#[command(
    name = "qlrap",
    version,
    about = "Closest low-rank quantum states under Hilbert-Schmidt and trace distance"
)]
struct Cli {
    /// JSON file overriding tolerances and optimizer/oracle settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    Hs,
    Trace,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Hs => Metric::HilbertSchmidt,
            MetricArg::Trace => Metric::Trace,
        }
    }
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct StateSource {
    /// State file (JSON matrix or spectrum shorthand).
    #[arg(long)]
    input: Option<PathBuf>,

    /// Comma-separated eigenvalues in the computational basis, e.g. 0.41,0.39,0.2,0
    #[arg(long)]
    spectrum: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form optimum for one state.
    Solve {
        #[command(flatten)]
        source: StateSource,
        #[arg(long)]
        rank: usize,
        #[arg(long, value_enum, default_value_t = MetricArg::Hs)]
        metric: MetricArg,
        /// Write the optimal state here as a state file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cross-check the closed forms against the oracles on seeded instances.
    Verify {
        /// Grid oracle resolution.
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Instances per dimension.
        #[arg(long)]
        instances: Option<usize>,
        /// Write the machine-readable report here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Distance landscape over the two leading candidate eigenvalues (CSV).
    Sweep {
        #[command(flatten)]
        source: StateSource,
        #[arg(long, value_enum, default_value_t = MetricArg::Hs)]
        metric: MetricArg,
        /// Points per axis.
        #[arg(long, default_value_t = 201)]
        resolution: usize,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Variational principal component analysis on a simulated purification.
    Pca {
        #[command(flatten)]
        source: StateSource,
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
        /// Write the run record (JSON) here.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Write the cost history (CSV) here.
        #[arg(long)]
        history: Option<PathBuf>,
    },
    /// Random density matrix of exact rank.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Exit status 1: invalid input or failed verification. 2: budget or convergence.
enum Failure {
    Invalid(String),
    Budget(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded(_) | Error::NoConvergence { .. } => {
                Failure::Budget(e.to_string())
            }
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Budget(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CmdResult {
    let config = match &cli.config {
        Some(path) => read_config(path)?,
        None => Config::default(),
    };
    let fmt = cli.format;
    match cli.command {
        Command::Solve {
            source,
            rank,
            metric,
            output,
        } => cmd_solve(
            &config,
            fmt,
            &source,
            rank,
            metric.into(),
            output.as_deref(),
        ),
        Command::Verify {
            resolution,
            seed,
            instances,
            output,
        } => cmd_verify(config, fmt, resolution, seed, instances, output.as_deref()),
        Command::Sweep {
            source,
            metric,
            resolution,
            output,
        } => cmd_sweep(
            &config,
            &source,
            metric.into(),
            resolution,
            output.as_deref(),
        ),
        Command::Pca {
            source,
            rank,
            seed,
            max_iters,
            restarts,
            output,
            history,
        } => {
            let mut opt = config.optimizer;
            if let Some(s) = seed {
                opt.seed = s;
            }
            if let Some(m) = max_iters {
                opt.max_iters = m;
            }
            if let Some(r) = restarts {
                opt.restarts = r;
            }
            let config = Config {
                optimizer: opt,
                ..config
            };
            cmd_pca(
                &config,
                fmt,
                &source,
                rank,
                output.as_deref(),
                history.as_deref(),
            )
        }
        Command::Random {
            dim,
            rank,
            seed,
            output,
        } => cmd_random(&config, dim, rank, seed, output.as_deref()),
    }
}

fn load_state(source: &StateSource, config: &Config) -> Result<DensityMatrix<f64>, Failure> {
    let file = match (&source.input, &source.spectrum) {
        (Some(path), _) => read_state_file(path)?,
        (None, Some(text)) => StateFile::Spectrum(SpectrumFile {
            spectrum: parse_spectrum(text)?,
            basis: Basis::Named(NamedBasis::Computational),
            label: None,
            seed: None,
        }),
        (None, None) => {
            return Err(Failure::Invalid(
                "one of --input or --spectrum is required".into(),
            ))
        }
    };
    Ok(file.to_density(&config.tolerances)?)
}

fn emit(text: &str, destination: Option<&Path>) -> CmdResult {
    match destination {
        Some(path) => Ok(write_text(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialise");
    s.push('\n');
    s
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| format_number(v))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Serialize)]
struct FamilyReport {
    lower_bounds: Vec<f64>,
    slack: f64,
}

#[derive(Serialize)]
struct SolveReport {
    metric: Metric,
    rank_bound: usize,
    distance: f64,
    truncated_weight: f64,
    normalization_shift: f64,
    input_spectrum: Vec<f64>,
    sigma_spectrum: Vec<f64>,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace_family: Option<FamilyReport>,
}

fn cmd_solve(
    config: &Config,
    fmt: Format,
    source: &StateSource,
    rank: usize,
    metric: Metric,
    output: Option<&Path>,
) -> CmdResult {
    let tol = &config.tolerances;
    let rho = load_state(source, config)?;
    let sol = solve(&rho, rank, metric, tol)?;
    let family = match metric {
        Metric::Trace => {
            let f = trace_family(&rho, rank, tol)?;
            Some(FamilyReport {
                lower_bounds: f.lower_bounds().to_vec(),
                slack: f.slack(),
            })
        }
        Metric::HilbertSchmidt => None,
    };
    let report = SolveReport {
        metric,
        rank_bound: rank,
        distance: sol.distance_star,
        truncated_weight: sol.truncated_weight,
        normalization_shift: sol.normalization_shift(),
        input_spectrum: rho.eigenvalues().to_vec(),
        sigma_spectrum: sol.sigma_star.eigenvalues().to_vec(),
        warnings: sol.warnings.iter().map(SolverWarning::to_string).collect(),
        trace_family: family,
    };
    if let Some(path) = output {
        let file = StateFile::Matrix(MatrixFile::from_matrix(
            sol.sigma_star.matrix(),
            Some(format!("optimal rank-{rank} approximation ({metric})")),
            None,
        ));
        write_text(path, &state_file_json(&file))?;
    }
    match fmt {
        Format::Json => print!("{}", json(&report)),
        Format::Text => {
            println!("metric: {}", report.metric);
            println!("rank bound: {}", report.rank_bound);
            println!("input spectrum: {}", join(&report.input_spectrum));
            println!("optimal spectrum: {}", join(&report.sigma_spectrum));
            println!("distance: {}", format_number(report.distance));
            println!(
                "truncated weight: {}",
                format_number(report.truncated_weight)
            );
            println!(
                "normalization shift: {}",
                format_number(report.normalization_shift)
            );
            if let Some(f) = &report.trace_family {
                println!(
                    "optimal family: diagonal in the leading {rank} eigenvectors, eigenvalues >= [{}], slack {}",
                    join(&f.lower_bounds),
                    format_number(f.slack)
                );
            }
            for w in &report.warnings {
                println!("warning: {w}");
            }
        }
    }
    Ok(())
}

fn cmd_verify(
    mut config: Config,
    fmt: Format,
    resolution: Option<usize>,
    seed: Option<u64>,
    instances: Option<usize>,
    output: Option<&Path>,
) -> CmdResult {
    if let Some(r) = resolution {
        config.grid.resolution = r;
    }
    if let Some(s) = seed {
        config.battery.seed = s;
    }
    if let Some(n) = instances {
        config.battery.instances = n;
    }
    let report = run_battery(
        &ExactClosedForm,
        &config.battery,
        &config.grid,
        &config.descent,
        &config.tolerances,
    )?;
    if let Some(path) = output {
        write_text(path, &json(&report))?;
    }
    match fmt {
        Format::Json => print!("{}", json(&report)),
        Format::Text => {
            println!("instances: {}", report.instances);
            let t = &report.tallies;
            for (name, tally) in [
                ("grid gap", &t.grid_gap),
                ("descent gap", &t.descent_gap),
                ("hs uniqueness", &t.hs_uniqueness),
                ("trace family", &t.trace_family),
                ("monotonicity", &t.monotonicity),
                ("rotation", &t.rotation),
            ] {
                println!(
                    "{name}: {} runs, {} failures, worst {}",
                    tally.runs,
                    tally.failures,
                    format_number(tally.worst)
                );
            }
            let m = &report.majorization;
            println!(
                "majorization (d={}): {} trials, min margin {}",
                m.dim,
                m.trials,
                format_number(m.min_margin)
            );
            for f in &report.failures {
                println!(
                    "FAIL {} metric={} d={} R={} seed={:?} spectrum=[{}]: {}",
                    f.check,
                    f.metric.map_or("-".to_string(), |m| m.to_string()),
                    f.instance.dim,
                    f.instance.rank_bound,
                    f.instance.seed,
                    join(&f.instance.spectrum),
                    f.detail
                );
            }
            println!("{}", if report.passed { "PASS" } else { "FAIL" });
        }
    }
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Invalid(format!(
            "{} check(s) failed{}",
            report.failures.len(),
            if report.majorization.passed {
                ""
            } else {
                " and the majorization audit failed"
            }
        )))
    }
}

fn cmd_sweep(
    config: &Config,
    source: &StateSource,
    metric: Metric,
    resolution: usize,
    output: Option<&Path>,
) -> CmdResult {
    let rho = load_state(source, config)?;
    let s = sweep(
        &rho,
        &SweepGrid::unit(resolution, metric),
        &config.tolerances,
    )?;
    emit(&s.to_csv(), output)
}

#[derive(Serialize)]
struct PcaReport {
    run: qlrap::pca::VariationalRecord,
    principal_components: Vec<PrincipalComponentReport>,
    order_ambiguous: bool,
    eigenvalue_shifts: Vec<f64>,
    misordering: MisorderingSummary,
}

#[derive(Serialize)]
struct PrincipalComponentReport {
    value: f64,
    overlap_with_input: f64,
    vector: Vec<[f64; 2]>,
}

#[derive(Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
enum MisorderingSummary {
    Found {
        weights: Vec<f64>,
        swapped: (usize, usize),
        trace_distance: f64,
        hs_distance: f64,
        hs_optimum: f64,
    },
    NoMisorderedMember {
        slack: f64,
        min_gap: f64,
    },
}

fn cmd_pca(
    config: &Config,
    fmt: Format,
    source: &StateSource,
    rank: usize,
    output: Option<&Path>,
    history: Option<&Path>,
) -> CmdResult {
    let tol = &config.tolerances;
    let rho = load_state(source, config)?;
    let run = optimize(&rho, rank, &config.optimizer, tol)?;
    let pcs = extract_principal_components(&run.final_state, rank, tol)?;
    let overlaps = pcs.overlaps_with(&rho)?;
    let shifts = qlrap::pca::eigenvalue_shifts(&rho, &run.final_state, rank)?;
    let misordering = match misordering_demo(&rho, rank, config.optimizer.seed, tol)? {
        MisorderingReport::Found(m) => MisorderingSummary::Found {
            weights: m.weights,
            swapped: m.swapped,
            trace_distance: m.trace_distance,
            hs_distance: m.hs_distance,
            hs_optimum: m.hs_optimum,
        },
        MisorderingReport::NoMisorderedMember { slack, min_gap } => {
            MisorderingSummary::NoMisorderedMember { slack, min_gap }
        }
    };
    let report = PcaReport {
        run: run.record(),
        principal_components: pcs
            .components
            .iter()
            .zip(&overlaps)
            .map(|(p, &o)| PrincipalComponentReport {
                value: p.value,
                overlap_with_input: o,
                vector: p.vector.iter().map(|z| [z.re, z.im]).collect(),
            })
            .collect(),
        order_ambiguous: pcs.order_ambiguous,
        eigenvalue_shifts: shifts,
        misordering,
    };
    if let Some(path) = output {
        write_text(path, &json(&report))?;
    }
    if let Some(path) = history {
        write_text(path, &run.cost_history_csv())?;
    }
    match fmt {
        Format::Json => print!("{}", json(&report)),
        Format::Text => {
            let r = &report.run;
            println!("converged: {}", r.converged);
            println!(
                "iterations: {} (best of {} restarts: #{})",
                r.iterations, r.restarts, r.best_restart
            );
            println!("final cost: {}", format_number(r.final_cost));
            println!(
                "closed-form optimum: {}",
                format_number(r.closed_form_distance)
            );
            println!("gap: {}", format_number(r.closed_form_gap));
            println!("final spectrum: {}", join(&r.final_spectrum));
            println!("eigenvalue shifts: {}", join(&report.eigenvalue_shifts));
            let o: Vec<f64> = report
                .principal_components
                .iter()
                .map(|p| p.overlap_with_input)
                .collect();
            println!("principal component overlaps: {}", join(&o));
            if report.order_ambiguous {
                println!(
                    "warning: principal component order is ambiguous (degenerate eigenvalues)"
                );
            }
            match &report.misordering {
                MisorderingSummary::Found {
                    weights,
                    swapped,
                    trace_distance,
                    ..
                } => println!(
                    "trace-distance hazard: optimal member [{}] swaps components {} and {} at distance {}",
                    join(weights),
                    swapped.0 + 1,
                    swapped.1 + 1,
                    format_number(*trace_distance)
                ),
                MisorderingSummary::NoMisorderedMember { slack, min_gap } => println!(
                    "trace-distance hazard: none (slack {} does not exceed gap {})",
                    format_number(*slack),
                    format_number(*min_gap)
                ),
            }
        }
    }
    if run.converged {
        Ok(())
    } else {
        Err(Failure::Budget(format!(
            "optimizer did not reach the closed-form optimum (gap {})",
            format_number(run.closed_form_gap)
        )))
    }
}

fn cmd_random(
    config: &Config,
    dim: usize,
    rank: usize,
    seed: u64,
    output: Option<&Path>,
) -> CmdResult {
    let rho = random_density::<f64, _>(dim, rank, &mut rng(seed), &config.tolerances)?;
    let file = StateFile::Matrix(MatrixFile::from_matrix(
        rho.matrix(),
        Some(format!("random rank-{rank} state")),
        Some(seed),
    ));
    emit(&state_file_json(&file), output)
}
