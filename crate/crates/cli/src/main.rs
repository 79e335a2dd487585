use clap::{Parser, Subcommand, ValueEnum};
use decsim_cli::{
    analyze, mesh_info, parse_config, run::format_report, simulate, solve, AnalyzeOptions,
    CliError, RunOptions, SimulationConfig,
};
use decsim_core::StudyProblem;
use std::path::PathBuf;
use std::process::ExitCode;

/// Wave, heat, Laplace and Poisson equations on triangulated surfaces via
/// discrete exterior calculus.
#[derive(Parser)]
#[command(name = "decsim", version, about)]
struct Cli {
    /// Seed for all randomized internals (power iteration start vector).
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Override the [output] dir from the config file.
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,

    /// Suppress progress and warning logs.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a wave or heat simulation, emitting snapshot frames.
    Simulate {
        /// Run configuration file.
        config: Option<PathBuf>,
        /// Alternative way to pass the configuration file.
        #[arg(long = "config", value_name = "PATH")]
        config_flag: Option<PathBuf>,
    },
    /// Solve the Laplace or Poisson equation directly.
    Solve {
        config: Option<PathBuf>,
        #[arg(long = "config", value_name = "PATH")]
        config_flag: Option<PathBuf>,
    },
    /// Report stability bounds, spectrum estimates and optional
    /// convergence studies.
    Analyze {
        config: Option<PathBuf>,
        #[arg(long = "config", value_name = "PATH")]
        config_flag: Option<PathBuf>,
        /// Run a refinement study and emit convergence.csv.
        #[arg(long)]
        convergence: bool,
        /// Study problem; defaults to the problem matching the mesh.
        #[arg(long, value_enum)]
        problem: Option<ProblemArg>,
        /// Number of refinement levels for the study.
        #[arg(long, default_value_t = 3)]
        levels: u32,
        /// Dump the assembled operator as "row col value" triplets.
        #[arg(long, value_name = "PATH")]
        dump_operator: Option<PathBuf>,
    },
    /// Load a mesh file and print its quality report.
    MeshInfo {
        /// Mesh file (.off or .obj).
        mesh: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Flat,
    Sphere,
}

impl From<ProblemArg> for StudyProblem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Flat => StudyProblem::FlatStandingWave,
            ProblemArg::Sphere => StudyProblem::SphereHarmonicWave,
        }
    }
}

fn resolve_config(
    positional: Option<PathBuf>,
    flag: Option<PathBuf>,
) -> Result<SimulationConfig, CliError> {
    let path = match (positional, flag) {
        (Some(_), Some(_)) => {
            return Err(CliError::Setup(
                "give the config either as a positional argument or via --config, not both".into(),
            ))
        }
        (Some(p), None) | (None, Some(p)) => p,
        (None, None) => return Err(CliError::Setup("no config file given".into())),
    };
    Ok(parse_config(&path)?)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.quiet {
            log::LevelFilter::Error
        } else {
            log::LevelFilter::Info
        })
        .format_timestamp(None)
        .init();

    let opts = RunOptions {
        seed: cli.seed,
        output_dir: cli.output_dir.clone(),
        quiet: cli.quiet,
    };

    match dispatch(cli.command, &opts) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let mut source = std::error::Error::source(&err);
            while let Some(cause) = source {
                eprintln!("  caused by: {cause}");
                source = cause.source();
            }
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn dispatch(command: Command, opts: &RunOptions) -> Result<ExitCode, CliError> {
    match command {
        Command::Simulate {
            config,
            config_flag,
        } => {
            let config = resolve_config(config, config_flag)?;
            let (_series, summary) = simulate(&config, opts)?;
            println!("{summary}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            config,
            config_flag,
        } => {
            let config = resolve_config(config, config_flag)?;
            let (_series, report) = solve(&config, opts)?;
            println!("{}", report.summary);
            println!(
                "solver:     {} iterations, relative residual {:.3e}{}",
                report.iterations,
                report.residual,
                if report.gauge_fixed {
                    " (gauge fixed: solution determined up to a constant)"
                } else {
                    ""
                }
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze {
            config,
            config_flag,
            convergence,
            problem,
            levels,
            dump_operator,
        } => {
            let config = resolve_config(config, config_flag)?;
            let analyze_opts = AnalyzeOptions {
                convergence,
                problem: problem.map(Into::into),
                levels,
                dump_operator,
            };
            let report = analyze(&config, opts, &analyze_opts)?;
            for line in &report.lines {
                println!("{line}");
            }
            if let Some(rows) = &report.convergence {
                println!("level        h            dt            error_max     order");
                for r in rows {
                    match r.observed_order {
                        Some(o) => println!(
                            "{:<5}  {:<12.6e} {:<12.6e}  {:<12.6e}  {:.3}",
                            r.level, r.h, r.dt, r.error_max, o
                        ),
                        None => println!(
                            "{:<5}  {:<12.6e} {:<12.6e}  {:<12.6e}  -",
                            r.level, r.h, r.dt, r.error_max
                        ),
                    }
                }
            }
            if let Some(err) = report.spectrum_failure {
                return Err(CliError::Analysis(err));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::MeshInfo { mesh } => {
            let report = mesh_info(&mesh)?;
            print!("{}", format_report(&report));
            Ok(ExitCode::SUCCESS)
        }
    }
}
