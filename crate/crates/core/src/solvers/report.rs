//! Decoding solver output and checking it against constraint semantics.
//!
//! [`check_constraint`] works on decoded vertex sequences and never touches
//! the penalty polynomials, so it can catch lowering mistakes.

use serde::{Deserialize, Serialize};

use crate::assembly::CompiledProblem;
use crate::constraints::{Constraint, Edge};
use crate::encodings::decode_assignment;
use crate::error::SolveError;
use crate::graph::{path_weight, Graph, Path};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodedPath {
    /// 1-based path id.
    pub path: usize,
    /// Vertex per position; `None` marks an invalid column.
    pub positions: Vec<Option<usize>>,
    pub loops: bool,
    /// Every position decodes and every step is an edge.
    pub valid: bool,
    pub weight: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub kind: String,
    pub description: String,
    pub implicit: bool,
    /// Factor applied in the compiled cost; `None` for objectives.
    pub penalty_factor: Option<f64>,
    /// Value of the unweighted constraint polynomial (the objective value for objectives).
    pub penalty: f64,
    /// Verdict of the semantic checker; objectives are always satisfied.
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodedSolution {
    pub paths: Vec<DecodedPath>,
    pub constraints: Vec<ConstraintReport>,
    /// Sum of path weights when every path is valid.
    pub total_weight: Option<f64>,
    /// All paths valid and all hard constraints satisfied.
    pub feasible: bool,
}

impl DecodedSolution {
    pub fn to_paths(&self) -> Option<Vec<Path>> {
        self.paths
            .iter()
            .map(|p| {
                p.positions
                    .iter()
                    .copied()
                    .collect::<Option<Vec<_>>>()
                    .map(|vs| Path::new(vs, p.loops))
            })
            .collect()
    }

    pub fn violated(&self) -> impl Iterator<Item = &ConstraintReport> {
        self.constraints.iter().filter(|c| !c.satisfied)
    }
}

pub fn decode_and_report(
    c: &CompiledProblem,
    assignment: &[bool],
) -> Result<DecodedSolution, SolveError> {
    let expected = c.registry.len();
    if assignment.len() != expected {
        return Err(SolveError::AssignmentLength {
            expected,
            got: assignment.len(),
        });
    }
    let decoded = decode_assignment(&c.registry, assignment);
    let loops = c.registry.settings().loops.clone();
    let paths: Vec<DecodedPath> = decoded
        .iter()
        .enumerate()
        .map(|(i, positions)| {
            let full: Option<Vec<usize>> = positions.iter().copied().collect();
            let weight = full.and_then(|vs| path_weight(&c.graph, &Path::new(vs, loops[i])).ok());
            DecodedPath {
                path: i + 1,
                positions: positions.clone(),
                loops: loops[i],
                valid: weight.is_some(),
                weight,
            }
        })
        .collect();

    let constraints: Vec<ConstraintReport> = c
        .constraints
        .iter()
        .map(|k| ConstraintReport {
            kind: k.constraint.kind().to_string(),
            description: k.constraint.to_string(),
            implicit: k.implicit,
            penalty_factor: k.penalty,
            penalty: k.lowered.evaluate(assignment).expect("length checked"),
            satisfied: check_constraint(&c.graph, &decoded, &loops, &k.constraint),
        })
        .collect();
    let total_weight = paths.iter().map(|p| p.weight).sum::<Option<f64>>();
    let feasible = paths
        .iter()
        .all(|p| p.positions.iter().all(Option::is_some))
        && constraints.iter().all(|r| r.satisfied);
    Ok(DecodedSolution {
        paths,
        constraints,
        total_weight,
        feasible,
    })
}

fn chosen(ids: &Option<Vec<usize>>, n_paths: usize) -> Vec<usize> {
    ids.clone()
        .unwrap_or_else(|| (1..=n_paths).collect())
        .into_iter()
        .map(|p| p - 1)
        .collect()
}

/// Consecutive `(from, to)` pairs actually traversed; steps touching an invalid column are skipped.
fn steps(positions: &[Option<usize>], loops: bool) -> Vec<Edge> {
    let n = positions.len();
    let count = if loops { n } else { n.saturating_sub(1) };
    (0..count)
        .filter_map(|j| match (positions[j], positions[(j + 1) % n]) {
            (Some(u), Some(v)) => Some((u, v)),
            _ => None,
        })
        .collect()
}

fn count_vertex(positions: &[Option<usize>], v: usize) -> usize {
    positions.iter().filter(|&&p| p == Some(v)).count()
}

fn count_edge(steps: &[Edge], e: Edge) -> usize {
    steps.iter().filter(|&&s| s == e).count()
}

/// Checks one constraint directly on decoded positions.
pub fn check_constraint(
    g: &Graph,
    decoded: &[Vec<Option<usize>>],
    loops: &[bool],
    c: &Constraint,
) -> bool {
    let n_paths = decoded.len();
    let all_vertices = || g.vertices().collect::<Vec<_>>();
    let all_edges = || g.edges().map(|(u, v, _)| (u, v)).collect::<Vec<_>>();
    match c {
        Constraint::PathIsValid { paths } => chosen(paths, n_paths).into_iter().all(|i| {
            let pos = &decoded[i];
            pos.iter().all(Option::is_some)
                && steps(pos, loops[i]).iter().all(|&(u, v)| g.has_edge(u, v))
        }),
        Constraint::PositionIs {
            path,
            position,
            vertices,
        } => {
            let pos = &decoded[path - 1];
            let j = if *position == pos.len() + 1 {
                1
            } else {
                *position
            };
            pos[j - 1].is_some_and(|v| vertices.contains(&v))
        }
        Constraint::VerticesAtLeastOnce { paths, vertices }
        | Constraint::VerticesExactlyOnce { paths, vertices }
        | Constraint::VerticesAtMostOnce { paths, vertices } => {
            let set = vertices.clone().unwrap_or_else(all_vertices);
            chosen(paths, n_paths).into_iter().all(|i| {
                set.iter().all(|&v| {
                    let k = count_vertex(&decoded[i], v);
                    match c {
                        Constraint::VerticesAtLeastOnce { .. } => k >= 1,
                        Constraint::VerticesExactlyOnce { .. } => k == 1,
                        _ => k <= 1,
                    }
                })
            })
        }
        Constraint::EdgesAtLeastOnce { paths, edges }
        | Constraint::EdgesExactlyOnce { paths, edges }
        | Constraint::EdgesAtMostOnce { paths, edges } => {
            let set = edges.clone().unwrap_or_else(all_edges);
            chosen(paths, n_paths).into_iter().all(|i| {
                let s = steps(&decoded[i], loops[i]);
                set.iter().all(|&e| {
                    let k = count_edge(&s, e);
                    match c {
                        Constraint::EdgesAtLeastOnce { .. } => k >= 1,
                        Constraint::EdgesExactlyOnce { .. } => k == 1,
                        _ => k <= 1,
                    }
                })
            })
        }
        Constraint::PathsShareNoVertices { paths } => {
            let ids = chosen(paths, n_paths);
            ids.iter().enumerate().all(|(k, &a)| {
                ids[k + 1..].iter().all(|&b| {
                    decoded[a]
                        .iter()
                        .flatten()
                        .all(|v| !decoded[b].contains(&Some(*v)))
                })
            })
        }
        Constraint::PathsShareNoEdges { paths } => {
            let ids = chosen(paths, n_paths);
            ids.iter().enumerate().all(|(k, &a)| {
                let sa = steps(&decoded[a], loops[a]);
                ids[k + 1..].iter().all(|&b| {
                    let sb = steps(&decoded[b], loops[b]);
                    sa.iter().all(|e| !g.has_edge(e.0, e.1) || !sb.contains(e))
                })
            })
        }
        Constraint::Precedence {
            paths,
            before,
            after,
        } => chosen(paths, n_paths).into_iter().all(|i| {
            let mut seen_before = false;
            for &p in &decoded[i] {
                if p == Some(*after) && !seen_before {
                    return false;
                }
                if p == Some(*before) {
                    seen_before = true;
                }
            }
            true
        }),
        Constraint::OptimizeWeight { .. } => true,
    }
}
