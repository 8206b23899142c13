//! Lowering of semantic path constraints to penalty polynomials.
//!
//! Every builder is written against the indicator polynomials of
//! [`crate::encodings`], so the same code serves all three encodings. On
//! encoding-valid assignments a builder evaluates to 0 when its constraint
//! holds and to at least 1 when it does not.
//!
//! Paths are identified by 1-based ids here, as in problem files.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::encodings::{column_validity_penalty, edge_indicator, indicator, VariableRegistry};
use crate::error::EncodingError;
use crate::graph::Graph;
use crate::pbpoly::{product, Polynomial};

pub type Edge = (usize, usize);

/// One of the twelve supported constraints. `None` selectors mean "all".
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Constraint {
    PathIsValid {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<usize>>,
    },
    PositionIs {
        path: usize,
        position: usize,
        vertices: Vec<usize>,
    },
    VerticesAtLeastOnce {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<usize>>,
    },
    VerticesExactlyOnce {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<usize>>,
    },
    VerticesAtMostOnce {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        vertices: Option<Vec<usize>>,
    },
    EdgesAtLeastOnce {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edges: Option<Vec<Edge>>,
    },
    EdgesExactlyOnce {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edges: Option<Vec<Edge>>,
    },
    EdgesAtMostOnce {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        edges: Option<Vec<Edge>>,
    },
    PathsShareNoVertices {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<usize>>,
    },
    PathsShareNoEdges {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<usize>>,
    },
    /// `after` may not appear before `before` has been visited.
    Precedence {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<usize>>,
        before: usize,
        after: usize,
    },
    OptimizeWeight {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        paths: Option<Vec<usize>>,
        #[serde(default)]
        maximize: bool,
    },
}

/// Which of the three multiplicities a vertex/edge constraint asks for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    AtLeastOnce,
    ExactlyOnce,
    AtMostOnce,
}

impl Constraint {
    pub fn is_objective(&self) -> bool {
        matches!(self, Constraint::OptimizeWeight { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Constraint::PathIsValid { .. } => "path_is_valid",
            Constraint::PositionIs { .. } => "position_is",
            Constraint::VerticesAtLeastOnce { .. } => "vertices_at_least_once",
            Constraint::VerticesExactlyOnce { .. } => "vertices_exactly_once",
            Constraint::VerticesAtMostOnce { .. } => "vertices_at_most_once",
            Constraint::EdgesAtLeastOnce { .. } => "edges_at_least_once",
            Constraint::EdgesExactlyOnce { .. } => "edges_exactly_once",
            Constraint::EdgesAtMostOnce { .. } => "edges_at_most_once",
            Constraint::PathsShareNoVertices { .. } => "paths_share_no_vertices",
            Constraint::PathsShareNoEdges { .. } => "paths_share_no_edges",
            Constraint::Precedence { .. } => "precedence",
            Constraint::OptimizeWeight { .. } => "optimize_weight",
        }
    }

    /// The path selector, if this constraint has one.
    pub fn path_selector(&self) -> Option<&Option<Vec<usize>>> {
        match self {
            Constraint::PositionIs { .. } => None,
            Constraint::PathIsValid { paths }
            | Constraint::VerticesAtLeastOnce { paths, .. }
            | Constraint::VerticesExactlyOnce { paths, .. }
            | Constraint::VerticesAtMostOnce { paths, .. }
            | Constraint::EdgesAtLeastOnce { paths, .. }
            | Constraint::EdgesExactlyOnce { paths, .. }
            | Constraint::EdgesAtMostOnce { paths, .. }
            | Constraint::PathsShareNoVertices { paths }
            | Constraint::PathsShareNoEdges { paths }
            | Constraint::Precedence { paths, .. }
            | Constraint::OptimizeWeight { paths, .. } => Some(paths),
        }
    }

    /// Replaces every `None` selector with the explicit full set.
    pub fn resolve_defaults(&mut self, g: &Graph, n_paths: usize) {
        let all_paths = || Some((1..=n_paths).collect::<Vec<_>>());
        let all_vertices = || Some(g.vertices().collect::<Vec<_>>());
        let all_edges = || Some(g.edges().map(|(u, v, _)| (u, v)).collect::<Vec<_>>());
        match self {
            Constraint::PositionIs { .. } => {}
            Constraint::PathIsValid { paths }
            | Constraint::PathsShareNoVertices { paths }
            | Constraint::PathsShareNoEdges { paths }
            | Constraint::Precedence { paths, .. }
            | Constraint::OptimizeWeight { paths, .. } => {
                paths.get_or_insert_with(|| all_paths().unwrap());
            }
            Constraint::VerticesAtLeastOnce { paths, vertices }
            | Constraint::VerticesExactlyOnce { paths, vertices }
            | Constraint::VerticesAtMostOnce { paths, vertices } => {
                paths.get_or_insert_with(|| all_paths().unwrap());
                vertices.get_or_insert_with(|| all_vertices().unwrap());
            }
            Constraint::EdgesAtLeastOnce { paths, edges }
            | Constraint::EdgesExactlyOnce { paths, edges }
            | Constraint::EdgesAtMostOnce { paths, edges } => {
                paths.get_or_insert_with(|| all_paths().unwrap());
                edges.get_or_insert_with(|| all_edges().unwrap());
            }
        }
    }
}

fn fmt_ids(prefix: &str, ids: &[usize]) -> String {
    ids.iter()
        .map(|v| format!("{prefix}{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn fmt_paths(paths: &Option<Vec<usize>>) -> String {
    match paths {
        None => "all paths".to_string(),
        Some(p) => format!("paths {{{}}}", fmt_ids("", p)),
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |vs: &Option<Vec<usize>>| match vs {
            None => "all vertices".to_string(),
            Some(v) => format!("{{{}}}", fmt_ids("v", v)),
        };
        let edges = |es: &Option<Vec<Edge>>| match es {
            None => "all edges".to_string(),
            Some(e) => format!(
                "{{{}}}",
                e.iter()
                    .map(|(u, v)| format!("(v{u},v{v})"))
                    .collect::<Vec<_>>()
                    .join(",")
            ),
        };
        match self {
            Constraint::PathIsValid { paths } => write!(f, "path_is_valid [{}]", fmt_paths(paths)),
            Constraint::PositionIs {
                path,
                position,
                vertices,
            } => write!(
                f,
                "position_is [path {path}, position {position} in {{{}}}]",
                fmt_ids("v", vertices)
            ),
            Constraint::VerticesAtLeastOnce { paths, vertices }
            | Constraint::VerticesExactlyOnce { paths, vertices }
            | Constraint::VerticesAtMostOnce { paths, vertices } => {
                write!(
                    f,
                    "{} [{} on {}]",
                    self.kind(),
                    set(vertices),
                    fmt_paths(paths)
                )
            }
            Constraint::EdgesAtLeastOnce { paths, edges: e }
            | Constraint::EdgesExactlyOnce { paths, edges: e }
            | Constraint::EdgesAtMostOnce { paths, edges: e } => {
                write!(f, "{} [{} on {}]", self.kind(), edges(e), fmt_paths(paths))
            }
            Constraint::PathsShareNoVertices { paths }
            | Constraint::PathsShareNoEdges { paths } => {
                write!(f, "{} [{}]", self.kind(), fmt_paths(paths))
            }
            Constraint::Precedence {
                paths,
                before,
                after,
            } => write!(
                f,
                "precedence [v{before} before v{after} on {}]",
                fmt_paths(paths)
            ),
            Constraint::OptimizeWeight { paths, maximize } => write!(
                f,
                "{} weight [{}]",
                if *maximize { "maximize" } else { "minimize" },
                fmt_paths(paths)
            ),
        }
    }
}

/// Converts a 1-based path id into a registry path index.
fn path_index(reg: &VariableRegistry, path: usize) -> Result<usize, EncodingError> {
    if path == 0 || path > reg.n_paths() {
        return Err(EncodingError::PathOutOfRange {
            path,
            n_paths: reg.n_paths(),
        });
    }
    Ok(path - 1)
}

fn selected(
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
) -> Result<Vec<usize>, EncodingError> {
    match paths {
        None => Ok((0..reg.n_paths()).collect()),
        Some(ids) => ids.iter().map(|&p| path_index(reg, p)).collect(),
    }
}

fn vertex_set(g: &Graph, vertices: &Option<Vec<usize>>) -> Vec<usize> {
    vertices.clone().unwrap_or_else(|| g.vertices().collect())
}

fn edge_set(g: &Graph, edges: &Option<Vec<Edge>>) -> Vec<Edge> {
    edges
        .clone()
        .unwrap_or_else(|| g.edges().map(|(u, v, _)| (u, v)).collect())
}

/// Positions `j` such that `(j, j + 1)` is a step of the path.
fn step_positions(reg: &VariableRegistry, path: usize) -> std::ops::RangeInclusive<usize> {
    let n = reg.path_length();
    if reg.loops(path) {
        1..=n
    } else {
        1..=n.saturating_sub(1)
    }
}

/// `Σ_j Φ_{v,j}`: how often `v` occurs in the path.
fn occurrences(reg: &VariableRegistry, path: usize, v: usize) -> Result<Polynomial, EncodingError> {
    (1..=reg.path_length())
        .map(|j| indicator(reg, path, j, v))
        .sum()
}

/// `Σ_j Ψ_{e,j}`: how often edge `(u, v)` is traversed.
fn traversals(
    reg: &VariableRegistry,
    path: usize,
    (u, v): Edge,
) -> Result<Polynomial, EncodingError> {
    step_positions(reg, path)
        .map(|j| edge_indicator(reg, path, j, u, v))
        .sum()
}

/// `Σ_{j<j'} f(j)·f(j')` over the given polynomials.
fn pairwise_products(items: &[Polynomial]) -> Polynomial {
    let mut out = Polynomial::zero();
    for (a, pa) in items.iter().enumerate() {
        for pb in &items[a + 1..] {
            out += pa * pb;
        }
    }
    out
}

/// The two halves of the path-validity penalty: encoding rules and edge existence.
pub fn path_is_valid_parts(
    g: &Graph,
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
) -> Result<(Polynomial, Polynomial), EncodingError> {
    let mut encoding = Polynomial::zero();
    let mut edges = Polynomial::zero();
    let non_edges: Vec<Edge> = g.non_edges().collect();
    for i in selected(reg, paths)? {
        for j in 1..=reg.path_length() {
            encoding += column_validity_penalty(reg, i, j)?;
        }
        for j in step_positions(reg, i) {
            for &(u, v) in &non_edges {
                edges += edge_indicator(reg, i, j, u, v)?;
            }
        }
    }
    Ok((encoding, edges))
}

pub fn build_path_is_valid(
    g: &Graph,
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
) -> Result<Polynomial, EncodingError> {
    let (encoding, edges) = path_is_valid_parts(g, reg, paths)?;
    Ok(encoding + edges)
}

pub fn build_position_is(
    reg: &VariableRegistry,
    path: usize,
    position: usize,
    allowed: &[usize],
) -> Result<Polynomial, EncodingError> {
    let i = path_index(reg, path)?;
    let hit: Polynomial = allowed
        .iter()
        .map(|&v| indicator(reg, i, position, v))
        .sum::<Result<_, _>>()?;
    Ok(hit.complement().square())
}

pub fn build_vertices(
    g: &Graph,
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
    vertices: &Option<Vec<usize>>,
    multiplicity: Multiplicity,
) -> Result<Polynomial, EncodingError> {
    let mut out = Polynomial::zero();
    for i in selected(reg, paths)? {
        for v in vertex_set(g, vertices) {
            let phis = (1..=reg.path_length())
                .map(|j| indicator(reg, i, j, v))
                .collect::<Result<Vec<_>, _>>()?;
            out += match multiplicity {
                Multiplicity::AtLeastOnce => product(phis.iter().map(Polynomial::complement)),
                Multiplicity::ExactlyOnce => {
                    phis.into_iter().sum::<Polynomial>().complement().square()
                }
                Multiplicity::AtMostOnce => pairwise_products(&phis),
            };
        }
    }
    Ok(out)
}

pub fn build_vertices_at_least_once(
    g: &Graph,
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
    vertices: &Option<Vec<usize>>,
) -> Result<Polynomial, EncodingError> {
    build_vertices(g, reg, paths, vertices, Multiplicity::AtLeastOnce)
}

pub fn build_vertices_exactly_once(
    g: &Graph,
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
    vertices: &Option<Vec<usize>>,
) -> Result<Polynomial, EncodingError> {
    build_vertices(g, reg, paths, vertices, Multiplicity::ExactlyOnce)
}

pub fn build_vertices_at_most_once(
    g: &Graph,
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
    vertices: &Option<Vec<usize>>,
) -> Result<Polynomial, EncodingError> {
    build_vertices(g, reg, paths, vertices, Multiplicity::AtMostOnce)
}

pub fn build_edges(
    g: &Graph,
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
    edges: &Option<Vec<Edge>>,
    multiplicity: Multiplicity,
) -> Result<Polynomial, EncodingError> {
    let mut out = Polynomial::zero();
    for i in selected(reg, paths)? {
        for (u, v) in edge_set(g, edges) {
            let psis = step_positions(reg, i)
                .map(|j| edge_indicator(reg, i, j, u, v))
                .collect::<Result<Vec<_>, _>>()?;
            out += match multiplicity {
                Multiplicity::AtLeastOnce => product(psis.iter().map(Polynomial::complement)),
                Multiplicity::ExactlyOnce => {
                    psis.into_iter().sum::<Polynomial>().complement().square()
                }
                Multiplicity::AtMostOnce => pairwise_products(&psis),
            };
        }
    }
    Ok(out)
}

fn path_pairs(ids: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    ids.iter()
        .enumerate()
        .flat_map(move |(k, &a)| ids[k + 1..].iter().map(move |&b| (a, b)))
}

pub fn build_paths_share_no_vertices(
    g: &Graph,
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
) -> Result<Polynomial, EncodingError> {
    let ids = selected(reg, paths)?;
    let mut out = Polynomial::zero();
    for (a, b) in path_pairs(&ids) {
        for v in g.vertices() {
            out += &occurrences(reg, a, v)? * &occurrences(reg, b, v)?;
        }
    }
    Ok(out)
}

pub fn build_paths_share_no_edges(
    g: &Graph,
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
) -> Result<Polynomial, EncodingError> {
    let ids = selected(reg, paths)?;
    let mut out = Polynomial::zero();
    for (a, b) in path_pairs(&ids) {
        for (u, v, _) in g.edges() {
            out += &traversals(reg, a, (u, v))? * &traversals(reg, b, (u, v))?;
        }
    }
    Ok(out)
}

/// Counts occurrences of `after` with no earlier occurrence of `before`.
pub fn build_precedence(
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
    before: usize,
    after: usize,
) -> Result<Polynomial, EncodingError> {
    let mut out = Polynomial::zero();
    for i in selected(reg, paths)? {
        // prefix = ∏_{j' < j} (1 - Φ_{before, j'})
        let mut prefix = Polynomial::constant(1.0);
        for j in 1..=reg.path_length() {
            out += &indicator(reg, i, j, after)? * &prefix;
            prefix = &prefix * &indicator(reg, i, j, before)?.complement();
        }
    }
    Ok(out)
}

pub fn build_optimize_weight(
    g: &Graph,
    reg: &VariableRegistry,
    paths: &Option<Vec<usize>>,
    maximize: bool,
) -> Result<Polynomial, EncodingError> {
    let mut out = Polynomial::zero();
    for i in selected(reg, paths)? {
        for j in step_positions(reg, i) {
            for (u, v, w) in g.edges() {
                out += edge_indicator(reg, i, j, u, v)?.scale(w);
            }
        }
    }
    Ok(if maximize { out.scale(-1.0) } else { out })
}

/// Lowers any constraint to its penalty (or objective) polynomial.
pub fn lower(
    g: &Graph,
    reg: &VariableRegistry,
    c: &Constraint,
) -> Result<Polynomial, EncodingError> {
    match c {
        Constraint::PathIsValid { paths } => build_path_is_valid(g, reg, paths),
        Constraint::PositionIs {
            path,
            position,
            vertices,
        } => build_position_is(reg, *path, *position, vertices),
        Constraint::VerticesAtLeastOnce { paths, vertices } => {
            build_vertices(g, reg, paths, vertices, Multiplicity::AtLeastOnce)
        }
        Constraint::VerticesExactlyOnce { paths, vertices } => {
            build_vertices(g, reg, paths, vertices, Multiplicity::ExactlyOnce)
        }
        Constraint::VerticesAtMostOnce { paths, vertices } => {
            build_vertices(g, reg, paths, vertices, Multiplicity::AtMostOnce)
        }
        Constraint::EdgesAtLeastOnce { paths, edges } => {
            build_edges(g, reg, paths, edges, Multiplicity::AtLeastOnce)
        }
        Constraint::EdgesExactlyOnce { paths, edges } => {
            build_edges(g, reg, paths, edges, Multiplicity::ExactlyOnce)
        }
        Constraint::EdgesAtMostOnce { paths, edges } => {
            build_edges(g, reg, paths, edges, Multiplicity::AtMostOnce)
        }
        Constraint::PathsShareNoVertices { paths } => build_paths_share_no_vertices(g, reg, paths),
        Constraint::PathsShareNoEdges { paths } => build_paths_share_no_edges(g, reg, paths),
        Constraint::Precedence {
            paths,
            before,
            after,
        } => build_precedence(reg, paths, *before, *after),
        Constraint::OptimizeWeight { paths, maximize } => {
            build_optimize_weight(g, reg, paths, *maximize)
        }
    }
}

/// A lower bound of the constraint's penalty over *all* binary assignments.
///
/// Zero whenever indicators stay in {0, 1}; for domain-wall encodings the
/// non-square constraints can dip below zero on broken columns.
pub fn penalty_floor(reg: &VariableRegistry, c: &Constraint, lowered: &Polynomial) -> f64 {
    if reg.scheme().indicators_nonnegative() {
        return 0.0;
    }
    match c {
        Constraint::PositionIs { .. }
        | Constraint::VerticesExactlyOnce { .. }
        | Constraint::EdgesExactlyOnce { .. } => 0.0,
        _ => lowered.lower_bound().min(0.0),
    }
}
