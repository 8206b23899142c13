//! Problem input: the JSON problem format, a TSPLib subset, and validation.

mod json;
mod tsplib;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::Constraint;
use crate::encodings::EncodingSettings;
use crate::graph::Graph;

pub use json::{parse_spec, serialize_spec};
pub use tsplib::{parse_tsplib, MAX_DIMENSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Minimize,
    Maximize,
}

/// A complete, validated problem instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub graph: Graph,
    pub encoding: EncodingSettings,
    pub constraints: Vec<Constraint>,
    pub objective: Option<Objective>,
    /// Penalty factor per constraint, keyed by index into `constraints`.
    pub penalty_overrides: BTreeMap<usize, f64>,
    /// Add a path-validity constraint for every path not already covered.
    pub implicit_path_is_valid: bool,
}

impl ProblemSpec {
    pub fn new(graph: Graph, encoding: EncodingSettings) -> Self {
        ProblemSpec {
            graph,
            encoding,
            constraints: Vec::new(),
            objective: None,
            penalty_overrides: BTreeMap::new(),
            implicit_path_is_valid: true,
        }
    }

    pub fn with_constraint(mut self, c: Constraint) -> Self {
        self.constraints.push(c);
        self
    }

    pub fn with_objective(mut self, objective: Objective) -> Self {
        self.objective = Some(objective);
        self
    }

    /// Makes every selector explicit so equal problems compare equal.
    pub fn resolve_defaults(&mut self) {
        let n_paths = self.encoding.n_paths;
        for c in &mut self.constraints {
            c.resolve_defaults(&self.graph, n_paths);
        }
    }

    /// The constraint list with the objective appended as an `optimize_weight` entry.
    pub fn constraint_list(&self) -> Vec<Constraint> {
        let mut out = self.constraints.clone();
        if let Some(obj) = self.objective {
            out.push(Constraint::OptimizeWeight {
                paths: Some((1..=self.encoding.n_paths).collect()),
                maximize: obj == Objective::Maximize,
            });
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub location: String,
    pub message: String,
}

impl Diagnostic {
    fn error(code: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code: code.to_string(),
            location: location.into(),
            message: message.into(),
        }
    }

    fn warning(code: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            ..Diagnostic::error(code, location, message)
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{sev}[{}] {}: {}",
            self.code, self.location, self.message
        )
    }
}

/// Why an input could not be turned into a [`ProblemSpec`].
#[derive(Clone, Debug, PartialEq, Error)]
pub enum SpecError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error at {location}: {message}")]
    Schema { location: String, message: String },
    #[error("{} semantic error(s): {}", .0.iter().filter(|d| d.is_error()).count(), summarize(.0))]
    Semantic(Vec<Diagnostic>),
    #[error("unsupported {keyword} `{value}`")]
    Unsupported { keyword: String, value: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .filter(|d| d.is_error())
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl SpecError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SpecError::Syntax { .. } => "E_SYNTAX",
            SpecError::Schema { .. } => "E_SCHEMA",
            SpecError::Semantic(_) => "E_SEMANTIC",
            SpecError::Unsupported { .. } => "E_UNSUPPORTED",
            SpecError::Dimension(_) => "E_DIMENSION",
        }
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            SpecError::Semantic(d) => d.clone(),
            SpecError::Syntax { line, column, .. } => vec![Diagnostic::error(
                self.code(),
                format!("line {line}, column {column}"),
                self.to_string(),
            )],
            SpecError::Schema { location, message } => {
                vec![Diagnostic::error(
                    self.code(),
                    location.clone(),
                    message.clone(),
                )]
            }
            _ => vec![Diagnostic::error(self.code(), "input", self.to_string())],
        }
    }
}

/// Checks every reference in the spec; an empty result means it compiles cleanly.
pub fn validate(spec: &ProblemSpec) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let n = spec.graph.n_vertices();
    let enc = &spec.encoding;
    if enc.n_paths == 0 {
        out.push(Diagnostic::error(
            "E_PATHS",
            "encoding.n_paths",
            "must be at least 1",
        ));
    }
    if enc.max_path_length == 0 {
        out.push(Diagnostic::error(
            "E_LENGTH",
            "encoding.max_path_length",
            "must be at least 1",
        ));
    }
    if enc.loops.len() != enc.n_paths {
        out.push(Diagnostic::error(
            "E_LOOPS",
            "encoding.loops",
            format!("has {} entries for {} paths", enc.loops.len(), enc.n_paths),
        ));
    }
    let loops = |p: usize| enc.loops.get(p.wrapping_sub(1)).copied().unwrap_or(false);

    for (k, c) in spec.constraints.iter().enumerate() {
        let at = |field: &str| format!("constraints[{k}].{field}");
        let check_path = |out: &mut Vec<Diagnostic>, p: usize, field: &str| {
            if p == 0 || p > enc.n_paths {
                out.push(Diagnostic::error(
                    "E_PATH_RANGE",
                    at(field),
                    format!("path {p} does not exist (1..={})", enc.n_paths),
                ));
            }
        };
        let check_vertex = |out: &mut Vec<Diagnostic>, v: usize, field: &str| {
            if v == 0 || v > n {
                out.push(Diagnostic::error(
                    "E_VERTEX_RANGE",
                    at(field),
                    format!("vertex {v} does not exist (1..={n})"),
                ));
            }
        };
        if let Some(Some(paths)) = c.path_selector() {
            for &p in paths {
                check_path(&mut out, p, "paths");
            }
        }
        match c {
            Constraint::PositionIs {
                path,
                position,
                vertices,
            } => {
                check_path(&mut out, *path, "path");
                for &v in vertices {
                    check_vertex(&mut out, v, "vertices");
                }
                let len = enc.max_path_length;
                if *position == len + 1 && loops(*path) {
                    out.push(Diagnostic::warning(
                        "W_WRAPAROUND",
                        at("position"),
                        format!("position {position} wraps around to position 1 on a looping path"),
                    ));
                } else if *position == 0 || *position > len {
                    out.push(Diagnostic::error(
                        "E_POSITION_RANGE",
                        at("position"),
                        format!("position {position} is outside 1..={len}"),
                    ));
                }
            }
            Constraint::VerticesAtLeastOnce { vertices, .. }
            | Constraint::VerticesExactlyOnce { vertices, .. }
            | Constraint::VerticesAtMostOnce { vertices, .. } => {
                for &v in vertices.iter().flatten() {
                    check_vertex(&mut out, v, "vertices");
                }
            }
            Constraint::EdgesAtLeastOnce { edges, .. }
            | Constraint::EdgesExactlyOnce { edges, .. }
            | Constraint::EdgesAtMostOnce { edges, .. } => {
                for &(u, v) in edges.iter().flatten() {
                    check_vertex(&mut out, u, "edges");
                    check_vertex(&mut out, v, "edges");
                    if (1..=n).contains(&u) && (1..=n).contains(&v) && !spec.graph.has_edge(u, v) {
                        out.push(Diagnostic::error(
                            "E_NO_EDGE",
                            at("edges"),
                            format!("(v{u}, v{v}) is not an edge of the graph"),
                        ));
                    }
                }
            }
            Constraint::Precedence { before, after, .. } => {
                check_vertex(&mut out, *before, "before");
                check_vertex(&mut out, *after, "after");
                if before == after {
                    out.push(Diagnostic::error(
                        "E_PRECEDENCE_SELF",
                        at("after"),
                        "a vertex cannot precede itself",
                    ));
                }
            }
            Constraint::PathsShareNoVertices { paths }
            | Constraint::PathsShareNoEdges { paths } => {
                let count = paths.as_ref().map_or(enc.n_paths, Vec::len);
                if count < 2 {
                    out.push(Diagnostic::warning(
                        "W_TRIVIAL",
                        at("paths"),
                        "fewer than two paths selected; the constraint has no effect",
                    ));
                }
            }
            _ => {}
        }
    }
    for (&k, &p) in &spec.penalty_overrides {
        let loc = format!("penalty_overrides.{k}");
        if k >= spec.constraints.len() {
            out.push(Diagnostic::error(
                "E_OVERRIDE_INDEX",
                loc,
                format!("there is no constraint {k}"),
            ));
        } else if !(p.is_finite() && p > 0.0) {
            out.push(Diagnostic::error(
                "E_OVERRIDE_VALUE",
                loc,
                "penalty factors must be positive and finite",
            ));
        } else if spec.constraints[k].is_objective() {
            out.push(Diagnostic::warning(
                "W_OVERRIDE_OBJECTIVE",
                loc,
                "objectives are not penalized; the override is ignored",
            ));
        }
    }
    out
}
