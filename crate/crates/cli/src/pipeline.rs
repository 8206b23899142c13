//! Request-scoped operations and the exact text of every response.

use std::fmt::Write as _;
use std::str::FromStr;

use qubopath::assembly::{suggest_encoding_with_cap, DEFAULT_VARIABLE_CAP};
use qubopath::fmt_num::format_g17;
use qubopath::solvers::DEFAULT_BRUTE_FORCE_CAP;
use qubopath::{
    brute_force, compile_with_cap, parse_spec, parse_tsplib, serialize_artifact,
    simulated_annealing, to_qubo_matrix, AnnealSchedule, ArtifactFormat, CompileError,
    CompiledProblem, DecodedSolution, Diagnostic, OutputError, ProblemSpec, Scheme, SchemeCount,
    SolveError, SolveResult, SpecError,
};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: &str = "1";

/// Environment variable that overrides [`Limits::variable_cap`].
pub const VAR_CAP_ENV: &str = "QUBOPATH_VAR_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Upper bound on compiled variables (primaries plus auxiliaries).
    pub variable_cap: usize,
    pub brute_force_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            variable_cap: DEFAULT_VARIABLE_CAP,
            brute_force_cap: DEFAULT_BRUTE_FORCE_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputKind {
    #[default]
    Json,
    Tsplib,
}

impl FromStr for InputKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(InputKind::Json),
            "tsplib" => Ok(InputKind::Tsplib),
            other => Err(format!(
                "unknown input kind '{other}' (expected json or tsplib)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    /// The quadratic cost polynomial as text.
    Poly,
    /// Sparse upper-triangular QUBO entries.
    #[default]
    Qubo,
    /// Dense upper-triangular QUBO matrix.
    QuboMatrix,
    /// Ising fields and couplings.
    Ising,
}

impl OutputFormat {
    pub const NAMES: [&'static str; 4] = ["poly", "qubo", "qubo-matrix", "ising"];

    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Poly => "poly",
            OutputFormat::Qubo => "qubo",
            OutputFormat::QuboMatrix => "qubo-matrix",
            OutputFormat::Ising => "ising",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "poly" => Ok(OutputFormat::Poly),
            "qubo" => Ok(OutputFormat::Qubo),
            "qubo-matrix" => Ok(OutputFormat::QuboMatrix),
            "ising" => Ok(OutputFormat::Ising),
            other => Err(format!(
                "unknown format '{other}' (expected one of {})",
                OutputFormat::NAMES.join(", ")
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FailureKind {
    /// Unreadable, malformed, or invalid input.
    Input,
    Compile,
    Solve,
    Timeout,
    TooLarge,
    Internal,
}

/// A structured error shared by the CLI and the service.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub kind: FailureKind,
    pub code: String,
    pub message: String,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    schema_version: &'static str,
    error: ErrorDetail<'a>,
}

#[derive(Serialize)]
struct ErrorDetail<'a> {
    code: &'a str,
    message: &'a str,
    diagnostics: &'a [Diagnostic],
}

impl Failure {
    pub fn new(kind: FailureKind, code: &str, message: impl Into<String>) -> Self {
        Failure {
            kind,
            code: code.to_string(),
            message: message.into(),
            diagnostics: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            FailureKind::Input => 1,
            _ => 2,
        }
    }

    pub fn http_status(&self) -> u16 {
        match self.kind {
            FailureKind::Input => 400,
            FailureKind::Compile | FailureKind::Solve => 422,
            FailureKind::Timeout => 408,
            FailureKind::TooLarge => 413,
            FailureKind::Internal => 500,
        }
    }

    pub fn to_json(&self) -> String {
        render_json(&ErrorBody {
            schema_version: SCHEMA_VERSION,
            error: ErrorDetail {
                code: &self.code,
                message: &self.message,
                diagnostics: &self.diagnostics,
            },
        })
    }

    /// Human-readable form: the message, then one line per diagnostic.
    pub fn to_text(&self) -> String {
        let mut out = format!("error[{}]: {}\n", self.code, self.message);
        for d in &self.diagnostics {
            let _ = writeln!(out, "  {d}");
        }
        out
    }
}

impl From<SpecError> for Failure {
    fn from(e: SpecError) -> Self {
        Failure {
            kind: FailureKind::Input,
            code: e.code().to_string(),
            message: e.to_string(),
            diagnostics: e.diagnostics(),
        }
    }
}

impl From<CompileError> for Failure {
    fn from(e: CompileError) -> Self {
        match e {
            CompileError::Invalid(diagnostics) => Failure {
                kind: FailureKind::Input,
                code: "E_SEMANTIC".into(),
                message: "problem specification is invalid".into(),
                diagnostics,
            },
            CompileError::VariableCap { .. } => {
                Failure::new(FailureKind::Compile, "E_VARIABLE_CAP", e.to_string())
            }
            CompileError::Encoding(_) => {
                Failure::new(FailureKind::Compile, "E_ENCODING", e.to_string())
            }
        }
    }
}

impl From<OutputError> for Failure {
    fn from(e: OutputError) -> Self {
        Failure::new(FailureKind::Compile, "E_OUTPUT", e.to_string())
    }
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        let code = match e {
            SolveError::CapExceeded { .. } => "E_BRUTE_FORCE_CAP",
            SolveError::AssignmentLength { .. } => "E_ASSIGNMENT",
        };
        Failure::new(FailureKind::Solve, code, e.to_string())
    }
}

fn render_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("response bodies serialize");
    s.push('\n');
    s
}

/// Parses a problem and applies an optional encoding override.
pub fn load_spec(
    input: &[u8],
    kind: InputKind,
    encoding: Option<Scheme>,
) -> Result<ProblemSpec, Failure> {
    let mut spec = match kind {
        InputKind::Json => parse_spec(input)?,
        InputKind::Tsplib => parse_tsplib(input)?,
    };
    if let Some(scheme) = encoding {
        spec.encoding = spec.encoding.with_scheme(scheme);
    }
    Ok(spec)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub scheme: Scheme,
    pub primary: usize,
    pub auxiliary: usize,
    pub total: usize,
    pub couplings: usize,
}

impl Counts {
    fn of(c: &CompiledProblem) -> Self {
        Counts {
            scheme: c.registry.scheme(),
            primary: c.registry.n_primary(),
            auxiliary: c.registry.n_auxiliary(),
            total: c.n_variables(),
            couplings: c
                .polynomial
                .terms()
                .filter(|(m, _)| m.degree() == 2)
                .count(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Generated {
    pub schema_version: &'static str,
    pub format: OutputFormat,
    pub counts: Counts,
    /// The artifact exactly as `generate --out` writes it.
    pub artifact: String,
}

impl Generated {
    pub fn summary(&self) -> String {
        format!(
            "primary={} auxiliary={} total={}",
            self.counts.primary, self.counts.auxiliary, self.counts.total
        )
    }

    pub fn to_json(&self) -> String {
        render_json(self)
    }
}

pub fn generate(
    spec: &ProblemSpec,
    format: OutputFormat,
    limits: &Limits,
) -> Result<Generated, Failure> {
    let c = compile_with_cap(spec, limits.variable_cap)?;
    let artifact = match format {
        OutputFormat::Poly => format!("{}\n", c.polynomial),
        OutputFormat::Qubo => {
            serialize_artifact(&to_qubo_matrix(&c)?, ArtifactFormat::CoordinateList)
        }
        OutputFormat::QuboMatrix => {
            serialize_artifact(&to_qubo_matrix(&c)?, ArtifactFormat::MatrixText)
        }
        OutputFormat::Ising => serialize_artifact(&to_qubo_matrix(&c)?, ArtifactFormat::IsingText),
    };
    Ok(Generated {
        schema_version: SCHEMA_VERSION,
        format,
        counts: Counts::of(&c),
        artifact,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Suggestion {
    pub schema_version: &'static str,
    /// Ascending by total; capped schemes last.
    pub counts: Vec<SchemeCount>,
}

impl Suggestion {
    pub fn to_json(&self) -> String {
        render_json(self)
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<12} {:>8} {:>10} {:>8} {:>10}\n",
            "scheme", "primary", "auxiliary", "total", "couplings"
        );
        let opt = |v: Option<usize>| v.map_or_else(|| "cap".to_string(), |v| v.to_string());
        for c in &self.counts {
            let _ = writeln!(
                out,
                "{:<12} {:>8} {:>10} {:>8} {:>10}",
                c.scheme.name(),
                c.primary,
                opt(c.auxiliary),
                opt(c.total),
                opt(c.couplings)
            );
        }
        out
    }
}

pub fn suggest(spec: &ProblemSpec, limits: &Limits) -> Result<Suggestion, Failure> {
    Ok(Suggestion {
        schema_version: SCHEMA_VERSION,
        counts: suggest_encoding_with_cap(spec, limits.variable_cap)?,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Brute force when the problem fits under the cap, annealing otherwise.
    #[default]
    Auto,
    Brute,
    Anneal,
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Method::Auto),
            "brute" => Ok(Method::Brute),
            "anneal" => Ok(Method::Anneal),
            other => Err(format!(
                "unknown method '{other}' (expected auto, brute or anneal)"
            )),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub method: Method,
    pub seed: u64,
    pub steps: Option<usize>,
    pub restarts: Option<usize>,
    pub cooling: Option<f64>,
    pub initial_temperature: Option<f64>,
}

impl SolverOptions {
    fn schedule(&self) -> AnnealSchedule {
        let d = AnnealSchedule::default();
        AnnealSchedule {
            initial_temperature: self.initial_temperature,
            cooling: self.cooling.unwrap_or(d.cooling),
            steps: self.steps.unwrap_or(d.steps),
            restarts: self.restarts.unwrap_or(d.restarts),
        }
    }
}

/// Solver outcome; wall time stays out of the JSON body so identical requests
/// produce identical bytes.
#[derive(Clone, Debug, PartialEq)]
pub struct Solved {
    pub result: SolveResult,
    pub n_variables: usize,
}

#[derive(Serialize)]
struct SolveBody<'a> {
    schema_version: &'static str,
    method: &'a str,
    seed: Option<u64>,
    iterations: u64,
    restarts: Option<usize>,
    variables: usize,
    energy: f64,
    assignment: String,
    feasible: bool,
    solution: &'a DecodedSolution,
}

impl Solved {
    pub fn to_json(&self) -> String {
        let r = &self.result;
        render_json(&SolveBody {
            schema_version: SCHEMA_VERSION,
            method: &r.metadata.method,
            seed: r.metadata.seed,
            iterations: r.metadata.iterations,
            restarts: r.metadata.restarts,
            variables: self.n_variables,
            energy: r.energy,
            assignment: r
                .assignment
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect(),
            feasible: r.solution.feasible,
            solution: &r.solution,
        })
    }

    pub fn summary(&self) -> String {
        let m = &self.result.metadata;
        format!(
            "method={} variables={} iterations={} wall_time_ms={:.1}",
            m.method, self.n_variables, m.iterations, m.wall_time_ms
        )
    }

    /// Decoded paths, weights, and the per-constraint report.
    pub fn to_report(&self) -> String {
        let s = &self.result.solution;
        let mut out = String::new();
        if !s.feasible {
            out.push_str("no satisfying assignment found; best penalty breakdown\n");
        }
        for p in &s.paths {
            let mut stops: Vec<String> = p
                .positions
                .iter()
                .map(|v| v.map_or_else(|| "?".to_string(), |v| format!("v{v}")))
                .collect();
            if p.loops {
                stops.push(stops[0].clone());
            }
            let weight = match p.weight {
                Some(w) => format_g17(w),
                None => "invalid".into(),
            };
            let _ = writeln!(
                out,
                "path {}: {} (weight {weight})",
                p.path,
                stops.join(" -> ")
            );
        }
        let total = s.total_weight.map_or_else(|| "n/a".to_string(), format_g17);
        let _ = writeln!(out, "total weight: {total}");
        let _ = writeln!(out, "energy: {}", format_g17(self.result.energy));
        out.push_str("constraints:\n");
        for c in &s.constraints {
            let status = match (c.penalty_factor, c.satisfied) {
                (None, _) => "objective",
                (Some(_), true) => "ok",
                (Some(_), false) => "violated",
            };
            let implicit = if c.implicit { " (implicit)" } else { "" };
            let weighted = match c.penalty_factor {
                Some(f) => format!(
                    "penalty {} x {} = {}",
                    format_g17(c.penalty),
                    format_g17(f),
                    format_g17(c.penalty * f)
                ),
                None => format!("value {}", format_g17(c.penalty)),
            };
            let _ = writeln!(out, "  [{status}] {}{implicit}: {weighted}", c.description);
        }
        out
    }
}

pub fn solve(
    spec: &ProblemSpec,
    options: &SolverOptions,
    limits: &Limits,
) -> Result<Solved, Failure> {
    let c = compile_with_cap(spec, limits.variable_cap)?;
    let n = c.n_variables();
    let brute = match options.method {
        Method::Brute => true,
        Method::Anneal => false,
        Method::Auto => n <= limits.brute_force_cap,
    };
    let result = if brute {
        brute_force(&c, limits.brute_force_cap, None)?
    } else {
        simulated_annealing(&c, &options.schedule(), options.seed)
    };
    Ok(Solved {
        result,
        n_variables: n,
    })
}
