use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use graphflow::analysis::{convergence_study, reports_to_csv, StudyOptions, TauRule};
use graphflow::checks;
use graphflow::io::{write_timeseries_csv, SnapshotWriter, TimeseriesRecorder};
use graphflow::mesh::mesh_size;
use graphflow::problems::ProblemSpec;
use graphflow::scheme::{run, SchemeConfig};

mod config;

use config::{parse_config, resolve, RunConfig, Settings, TauSetting, UsageError, OUT_ENV};

#[derive(Parser, Debug)]
#[command(
    name = "graphflow",
    version,
    about = "Forced mean curvature flow of graphs coupled to surface diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convergence study against the exact solution over a range of levels.
    Converge(CommonArgs),
    /// Single simulation writing VTK snapshots and a time series.
    Run(CommonArgs),
    /// Invariant suites of every module.
    Check {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// example1, example2, contact-angle, digm-planar or digm-wave.
    #[arg(long)]
    problem: Option<String>,
    /// Refinement level for `run`.
    #[arg(long)]
    level: Option<String>,
    /// Inclusive level range `a:b` for `converge`.
    #[arg(long)]
    levels: Option<String>,
    /// Final time override.
    #[arg(long = "T")]
    t_final: Option<String>,
    /// Time step: `h2` or a positive number.
    #[arg(long)]
    tau: Option<String>,
    /// Output directory (default: $GRAPHFLOW_OUT, then ./graphflow-out).
    #[arg(long)]
    out: Option<String>,
    /// Relative residual tolerance of the linear solver.
    #[arg(long)]
    tol: Option<String>,
    /// Wavy initial profile: literal or continuous.
    #[arg(long = "ic2-variant")]
    ic2_variant: Option<String>,
    /// File of `key = value` lines; flags take precedence.
    #[arg(long)]
    config: Option<String>,
}

impl CommonArgs {
    fn settings(&self) -> Settings {
        let pairs = [
            ("problem", &self.problem),
            ("level", &self.level),
            ("levels", &self.levels),
            ("T", &self.t_final),
            ("tau", &self.tau),
            ("out", &self.out),
            ("tol", &self.tol),
            ("ic2-variant", &self.ic2_variant),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }

    fn resolve(&self) -> Result<RunConfig, UsageError> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| UsageError(format!("cannot read {path}: {e}")))?;
                parse_config(&text)?
            }
            None => Settings::new(),
        };
        resolve(&self.settings(), &file, std::env::var(OUT_ENV).ok())
    }
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

fn numerical(e: impl std::fmt::Display) -> Failure {
    Failure::Numerical(e.to_string())
}

fn problem_of(cfg: &RunConfig) -> Result<ProblemSpec, Failure> {
    ProblemSpec::by_key(&cfg.problem, cfg.ic2).map_err(|e| Failure::Usage(e.to_string()))
}

fn create_out(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Usage(format!("cannot create {}: {e}", dir.display())))
}

fn converge(args: &CommonArgs) -> Result<(), Failure> {
    let cfg = args.resolve()?;
    let problem = problem_of(&cfg)?;
    if problem.exact.is_none() {
        return Err(Failure::Usage(format!(
            "problem `{}` has no exact solution; converge needs example1 or example2",
            cfg.problem
        )));
    }
    create_out(&cfg.out)?;
    let opts = StudyOptions {
        tau_rule: match cfg.tau {
            TauSetting::HSquared => TauRule::HSquared,
            TauSetting::Value(v) => TauRule::Fixed(v),
        },
        t_final: cfg.t_final,
        solver_tol: cfg.tol,
        ..StudyOptions::default()
    };
    let study = convergence_study(&problem, &cfg.levels, &opts);
    let csv = reports_to_csv(&study.reports);
    let path = cfg.out.join(format!("convergence_{}.csv", cfg.problem));
    fs::write(&path, &csv)
        .map_err(|e| numerical(format!("cannot write {}: {e}", path.display())))?;
    print!("{csv}");
    eprintln!("wrote {}", path.display());
    if study.failures.is_empty() {
        Ok(())
    } else {
        let msgs: Vec<String> = study
            .failures
            .iter()
            .map(|(l, e)| format!("level {l}: {e}"))
            .collect();
        Err(Failure::Numerical(msgs.join("\n")))
    }
}

fn simulate(args: &CommonArgs) -> Result<(), Failure> {
    let cfg = args.resolve()?;
    let problem = problem_of(&cfg)?;
    let mesh = problem
        .domain
        .mesh(cfg.level)
        .map_err(|e| Failure::Usage(e.to_string()))?;
    let h = mesh_size(&mesh);
    let tau = match cfg.tau {
        TauSetting::HSquared => h * h,
        TauSetting::Value(v) => v,
    };
    let mut scheme = SchemeConfig::new(tau, cfg.t_final.unwrap_or(problem.t_final));
    scheme.solver_tol = cfg.tol;
    let steps = scheme.steps().map_err(|e| Failure::Usage(e.to_string()))?;
    create_out(&cfg.out)?;
    let prefix = format!("{}_level{}", cfg.problem, cfg.level);
    let mut snapshots = SnapshotWriter::new(&cfg.out, &prefix, steps);
    let mut series = TimeseriesRecorder::new();
    let outcome = run(&problem, &mesh, scheme, &mut [&mut snapshots, &mut series]);
    let csv_path = cfg.out.join(format!("{prefix}_timeseries.csv"));
    write_timeseries_csv(series.records(), &csv_path).map_err(numerical)?;
    let summary = outcome.map_err(numerical)?;
    println!(
        "{}: level {}, h = {:.4e}, tau = {:.4e}, {} steps to t = {}",
        cfg.problem, cfg.level, h, tau, summary.steps, summary.final_state.t
    );
    println!(
        "wrote {} snapshots and {}",
        snapshots.written().len(),
        csv_path.display()
    );
    Ok(())
}

fn check(seed: u64) -> Result<(), Failure> {
    let report = checks::run_all(seed);
    for r in &report.results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        if r.detail.is_empty() {
            println!("{status} {}::{}", r.suite, r.name);
        } else {
            println!("{status} {}::{} ({})", r.suite, r.name, r.detail);
        }
    }
    println!("{} passed, {} failed", report.passed(), report.failed());
    if report.all_passed() {
        Ok(())
    } else {
        Err(Failure::Numerical(format!(
            "{} checks failed",
            report.failed()
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Converge(args) => converge(args),
        Command::Run(args) => simulate(args),
        Command::Check { seed } => check(*seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun `graphflow --help` for usage.");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
