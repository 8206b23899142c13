use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use qubopath::Scheme;
use qubopath_cli::pipeline::{
    self, Failure, FailureKind, InputKind, Limits, Method, OutputFormat, SolverOptions, VAR_CAP_ENV,
};
use qubopath_cli::service::{self, ServiceConfig};

/// Compile pathfinding problems into QUBO and Ising models.
#[derive(Parser)]
#[command(name = "qubopath", version)]
struct Cli {
    /// Maximum number of compiled variables.
    #[arg(long, global = true, env = VAR_CAP_ENV)]
    var_cap: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a problem and write the chosen artifact.
    Generate(GenerateArgs),
    /// Compare variable counts across the three encodings.
    SuggestEncoding(SuggestArgs),
    /// Compile and solve with brute force or simulated annealing.
    Solve(SolveArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Problem file (JSON spec, or TSPLib with --tsplib).
    #[arg(long)]
    input: PathBuf,
    /// Read the input as a TSPLib file.
    #[arg(long)]
    tsplib: bool,
    /// Print the service's JSON response body instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Overrides the encoding in the spec.
    #[arg(long)]
    encoding: Option<Scheme>,
    /// One of poly, qubo, qubo-matrix, ising.
    #[arg(long, default_value = "qubo")]
    format: OutputFormat,
    /// Write the artifact here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress the variable-count summary.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct SuggestArgs {
    #[command(flatten)]
    input: InputArgs,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    encoding: Option<Scheme>,
    /// One of auto, brute, anneal.
    #[arg(long, default_value = "auto")]
    method: Method,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Annealing sweeps per restart.
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Suppress the timing summary.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    /// Largest accepted request body in bytes.
    #[arg(long, default_value_t = 4 * 1024 * 1024)]
    body_limit: usize,
    /// Compute budget per request in seconds.
    #[arg(long, default_value_t = 30.0)]
    timeout_secs: f64,
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| {
        Failure::new(
            FailureKind::Input,
            "E_IO",
            format!("cannot read {}: {e}", path.display()),
        )
    })
}

fn input_kind(args: &InputArgs) -> InputKind {
    if args.tsplib {
        InputKind::Tsplib
    } else {
        InputKind::Json
    }
}

/// Writes the successful output; `Err` carries a failure to report.
fn run(cli: Cli) -> Result<(), (Failure, bool)> {
    let limits = Limits {
        variable_cap: cli.var_cap.unwrap_or(Limits::default().variable_cap),
        ..Limits::default()
    };
    match cli.command {
        Command::Generate(a) => {
            let json = a.input.json;
            let g = (|| {
                let bytes = read_input(&a.input.input)?;
                let spec = pipeline::load_spec(&bytes, input_kind(&a.input), a.encoding)?;
                pipeline::generate(&spec, a.format, &limits)
            })()
            .map_err(|f| (f, json))?;
            let text = if json {
                g.to_json()
            } else {
                g.artifact.clone()
            };
            match &a.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| {
                    let f = Failure::new(
                        FailureKind::Input,
                        "E_IO",
                        format!("cannot write {}: {e}", path.display()),
                    );
                    (f, json)
                })?,
                None => print!("{text}"),
            }
            if !a.quiet {
                if a.out.is_some() {
                    println!("{}", g.summary());
                } else {
                    eprintln!("{}", g.summary());
                }
            }
        }
        Command::SuggestEncoding(a) => {
            let json = a.input.json;
            let s = (|| {
                let bytes = read_input(&a.input.input)?;
                let spec = pipeline::load_spec(&bytes, input_kind(&a.input), None)?;
                pipeline::suggest(&spec, &limits)
            })()
            .map_err(|f| (f, json))?;
            print!("{}", if json { s.to_json() } else { s.to_table() });
        }
        Command::Solve(a) => {
            let json = a.input.json;
            let options = SolverOptions {
                method: a.method,
                seed: a.seed,
                steps: a.steps,
                restarts: a.restarts,
                ..SolverOptions::default()
            };
            let s = (|| {
                let bytes = read_input(&a.input.input)?;
                let spec = pipeline::load_spec(&bytes, input_kind(&a.input), a.encoding)?;
                pipeline::solve(&spec, &options, &limits)
            })()
            .map_err(|f| (f, json))?;
            print!("{}", if json { s.to_json() } else { s.to_report() });
            if !a.quiet {
                eprintln!("{}", s.summary());
            }
        }
        Command::Serve(a) => {
            let config = ServiceConfig {
                limits,
                body_limit: a.body_limit,
                timeout: Duration::from_secs_f64(a.timeout_secs),
            };
            serve(&a.host, a.port, config).map_err(|e| {
                (
                    Failure::new(FailureKind::Internal, "E_SERVE", format!("{e:#}")),
                    false,
                )
            })?;
        }
    }
    Ok(())
}

fn serve(host: &str, port: u16, config: ServiceConfig) -> anyhow::Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(async {
        let listener = tokio::net::TcpListener::bind((host, port)).await?;
        eprintln!("listening on http://{}", listener.local_addr()?);
        axum::serve(listener, service::router(config))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err((failure, json)) => {
            if json {
                print!("{}", failure.to_json());
            } else {
                eprint!("{}", failure.to_text());
            }
            let _ = std::io::stdout().flush();
            ExitCode::from(failure.exit_code() as u8)
        }
    }
}
