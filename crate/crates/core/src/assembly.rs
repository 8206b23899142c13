//! Combines lowered constraints into one quadratic cost function.
//!
//! Hard constraints are weighted by `P = 1 + B`, where `B` is the total
//! absolute coefficient mass of the objective. Under domain-wall encodings
//! some penalties dip below zero on assignments with broken columns, so the
//! column-validity part of path validity is additionally weighted by the sum
//! of those possible dips.

use rayon::prelude::*;
use serde::Serialize;

use crate::constraints::{lower, path_is_valid_parts, penalty_floor, Constraint};
use crate::encodings::{bit_width, EncodingSettings, Scheme, VariableRegistry};
use crate::error::CompileError;
use crate::graph::Graph;
use crate::io::{validate, ProblemSpec};
use crate::pbpoly::Polynomial;
use crate::quadratize::quadratize_capped;

/// Default upper bound on the number of binary variables.
pub const DEFAULT_VARIABLE_CAP: usize = 4096;

/// One entry of the compiled constraint list.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledConstraint {
    pub constraint: Constraint,
    /// Added automatically rather than listed in the spec.
    pub implicit: bool,
    /// Weight in the final sum; `None` for objectives.
    pub penalty: Option<f64>,
    /// Weight of the column-validity part, for path-validity constraints.
    pub validity_penalty: Option<f64>,
    /// Unweighted polynomial over primary variables.
    pub lowered: Polynomial,
}

impl CompiledConstraint {
    pub fn is_objective(&self) -> bool {
        self.penalty.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledProblem {
    pub graph: Graph,
    pub registry: VariableRegistry,
    /// Final cost, degree <= 2, constant term included.
    pub polynomial: Polynomial,
    pub constraints: Vec<CompiledConstraint>,
    /// Objective swing bound `B`.
    pub objective_bound: f64,
}

impl CompiledProblem {
    pub fn n_variables(&self) -> usize {
        self.registry.len()
    }

    pub fn offset(&self) -> f64 {
        self.polynomial.constant_term()
    }

    pub fn default_penalty(&self) -> f64 {
        1.0 + self.objective_bound
    }
}

pub fn compile(spec: &ProblemSpec) -> Result<CompiledProblem, CompileError> {
    compile_with_cap(spec, DEFAULT_VARIABLE_CAP)
}

pub fn compile_with_cap(spec: &ProblemSpec, cap: usize) -> Result<CompiledProblem, CompileError> {
    let diags = validate(spec);
    if diags.iter().any(|d| d.is_error()) {
        return Err(CompileError::Invalid(diags));
    }
    let n = spec.graph.n_vertices();
    let enc = &spec.encoding;
    if primary_count(enc, n).is_none_or(|p| p > cap) {
        return Err(CompileError::VariableCap { cap });
    }
    let mut registry = VariableRegistry::new(enc.clone(), n)?;

    let mut listed: Vec<(Constraint, bool)> = spec
        .constraint_list()
        .into_iter()
        .map(|c| (c, false))
        .collect();
    if spec.implicit_path_is_valid {
        let mut covered = vec![false; enc.n_paths];
        for (c, _) in &listed {
            if let Constraint::PathIsValid { paths } = c {
                match paths {
                    None => covered.iter_mut().for_each(|c| *c = true),
                    Some(ps) => ps.iter().for_each(|&p| covered[p - 1] = true),
                }
            }
        }
        let missing: Vec<usize> = (1..=enc.n_paths).filter(|&p| !covered[p - 1]).collect();
        if !missing.is_empty() {
            listed.push((
                Constraint::PathIsValid {
                    paths: Some(missing),
                },
                true,
            ));
        }
    }

    let g = &spec.graph;
    let mut objective = Polynomial::zero();
    let mut lowered = Vec::with_capacity(listed.len());
    for (c, _) in &listed {
        let p = lower(g, &registry, c)?;
        if c.is_objective() {
            objective += &p;
        }
        lowered.push(p);
    }
    let bound = objective.abs_coefficient_sum();
    let default_penalty = 1.0 + bound;

    // Hard parts other than column validity, with their weights.
    let mut weighted = Vec::new();
    // Column-validity parts, weighted after the dip total is known.
    let mut validity = Vec::new();
    let mut dips = 0.0;
    let mut compiled = Vec::with_capacity(listed.len());
    for (k, ((c, implicit), p)) in listed.into_iter().zip(lowered).enumerate() {
        if c.is_objective() {
            compiled.push(CompiledConstraint {
                constraint: c,
                implicit,
                penalty: None,
                validity_penalty: None,
                lowered: p,
            });
            continue;
        }
        let overridden = if implicit {
            None
        } else {
            spec.penalty_overrides.get(&k).copied()
        };
        let weight = overridden.unwrap_or(default_penalty);
        if let Constraint::PathIsValid { paths } = &c {
            let (columns, edges) = path_is_valid_parts(g, &registry, paths)?;
            dips += weight * -penalty_floor(&registry, &c, &edges);
            validity.push((compiled.len(), columns, weight));
            weighted.push((edges, weight));
        } else {
            dips += weight * -penalty_floor(&registry, &c, &p);
            weighted.push((p.clone(), weight));
        }
        compiled.push(CompiledConstraint {
            constraint: c,
            implicit,
            penalty: Some(weight),
            validity_penalty: None,
            lowered: p,
        });
    }

    let mut total = objective;
    for (p, w) in &weighted {
        total += p.scale(*w);
    }
    for (idx, columns, weight) in validity {
        let w = weight + dips;
        compiled[idx].validity_penalty = Some(w);
        total += columns.scale(w);
    }
    let polynomial = quadratize_capped(&total, &mut registry, Some(cap))?;
    Ok(CompiledProblem {
        graph: spec.graph.clone(),
        registry,
        polynomial,
        constraints: compiled,
        objective_bound: bound,
    })
}

/// Primary variable count, `None` on overflow.
fn primary_count(enc: &EncodingSettings, n: usize) -> Option<usize> {
    let width = match enc.scheme {
        Scheme::OneHot | Scheme::DomainWall => n,
        Scheme::Binary => bit_width(n),
    };
    enc.n_paths
        .checked_mul(enc.max_path_length)?
        .checked_mul(width)
}

/// Variable totals for one scheme.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SchemeCount {
    pub scheme: Scheme,
    pub primary: usize,
    /// `None` when the compile hit the variable cap.
    pub auxiliary: Option<usize>,
    pub total: Option<usize>,
    /// Nonzero quadratic couplings; breaks ties between equal totals.
    pub couplings: Option<usize>,
}

/// Compiles under every scheme and ranks by total variable count, ascending.
///
/// Equal totals are ordered by fewer couplings, then by scheme order.
/// Schemes that exceed the cap are listed last.
pub fn suggest_encoding(spec: &ProblemSpec) -> Result<Vec<SchemeCount>, CompileError> {
    suggest_encoding_with_cap(spec, DEFAULT_VARIABLE_CAP)
}

pub fn suggest_encoding_with_cap(
    spec: &ProblemSpec,
    cap: usize,
) -> Result<Vec<SchemeCount>, CompileError> {
    let results: Vec<_> = Scheme::ALL
        .par_iter()
        .map(|&scheme| {
            let mut variant = spec.clone();
            variant.encoding = spec.encoding.with_scheme(scheme);
            let primary =
                primary_count(&variant.encoding, spec.graph.n_vertices()).unwrap_or(usize::MAX);
            match compile_with_cap(&variant, cap) {
                Ok(c) => Ok(SchemeCount {
                    scheme,
                    primary: c.registry.n_primary(),
                    auxiliary: Some(c.registry.n_auxiliary()),
                    total: Some(c.registry.len()),
                    couplings: Some(
                        c.polynomial
                            .terms()
                            .filter(|(m, _)| m.degree() == 2)
                            .count(),
                    ),
                }),
                Err(CompileError::VariableCap { .. }) => Ok(SchemeCount {
                    scheme,
                    primary,
                    auxiliary: None,
                    total: None,
                    couplings: None,
                }),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut counts = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    counts.sort_by_key(|c| {
        (
            c.total.is_none(),
            c.total,
            c.couplings,
            Scheme::ALL.iter().position(|&s| s == c.scheme),
        )
    });
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::{count_primary_variables, encode_paths};
    use crate::graph::{enumerate_paths, path_weight, Path};
    use crate::io::Objective;

    fn sample_graph() -> Graph {
        Graph::new(vec![
            vec![0.0, 2.0, 6.0, 6.0, 2.0],
            vec![5.0, 0.0, 1.0, 7.0, 8.0],
            vec![7.0, 3.0, 0.0, 5.0, 4.0],
            vec![4.0, 8.0, 1.0, 0.0, 3.0],
            vec![9.0, 6.0, 7.0, 2.0, 0.0],
        ])
        .unwrap()
    }

    fn tsp(g: Graph, scheme: Scheme) -> ProblemSpec {
        let n = g.n_vertices();
        let mut spec = ProblemSpec::new(g, EncodingSettings::single(scheme, n, true))
            .with_constraint(Constraint::VerticesExactlyOnce {
                paths: None,
                vertices: None,
            })
            .with_objective(Objective::Minimize);
        spec.resolve_defaults();
        spec
    }

    #[test]
    fn empty_spec_compiles_to_primaries_only() {
        let mut spec = ProblemSpec::new(sample_graph(), EncodingSettings::single(Scheme::OneHot, 3, false));
        spec.implicit_path_is_valid = false;
        let c = compile(&spec).unwrap();
        assert!(c.polynomial.is_zero());
        assert_eq!(c.n_variables(), 15);
    }

    #[test]
    fn tsp_bound_matches_weight_mass() {
        let c = compile(&tsp(sample_graph(), Scheme::OneHot)).unwrap();
        // every edge weight appears once per step position: 5 · 96
        assert_eq!(c.objective_bound, 480.0);
        assert_eq!(c.default_penalty(), 481.0);
        assert_eq!(c.registry.n_auxiliary(), 0);
        assert!(c.constraints.iter().any(|k| k.implicit));
    }

    #[test]
    fn feasible_cost_is_tour_weight_plus_constant() {
        let c = compile(&tsp(sample_graph(), Scheme::OneHot)).unwrap();
        let offsets: Vec<f64> = enumerate_paths(&c.graph, 5, true, true)
            .iter()
            .map(|p| {
                let bits = encode_paths(&c.registry, std::slice::from_ref(p)).unwrap();
                c.polynomial.evaluate(&bits).unwrap() - path_weight(&c.graph, p).unwrap()
            })
            .collect();
        assert!(offsets.iter().all(|&o| o == offsets[0]));
    }

    #[test]
    fn invalid_specs_do_not_compile() {
        let spec = ProblemSpec::new(sample_graph(), EncodingSettings::single(Scheme::OneHot, 3, false))
            .with_constraint(Constraint::Precedence {
                paths: None,
                before: 9,
                after: 1,
            });
        assert!(matches!(compile(&spec), Err(CompileError::Invalid(d)) if d.len() == 1));
    }

    #[test]
    fn cap_covers_primaries() {
        let spec = tsp(sample_graph(), Scheme::OneHot);
        assert_eq!(
            compile_with_cap(&spec, 10),
            Err(CompileError::VariableCap { cap: 10 })
        );
    }

    #[test]
    fn constraint_free_suggestion_matches_formulas() {
        let mut spec = ProblemSpec::new(sample_graph(), EncodingSettings::single(Scheme::OneHot, 5, false));
        spec.implicit_path_is_valid = false;
        let counts = suggest_encoding(&spec).unwrap();
        for c in &counts {
            let settings = spec.encoding.with_scheme(c.scheme);
            assert_eq!(c.total, Some(count_primary_variables(&settings, 5)));
        }
        assert_eq!(counts[0].scheme, Scheme::Binary);
    }

    #[test]
    fn suggestion_counts_equal_actual_compiles() {
        let spec = tsp(sample_graph().restrict(4), Scheme::OneHot);
        for count in suggest_encoding(&spec).unwrap() {
            let mut variant = spec.clone();
            variant.encoding = spec.encoding.with_scheme(count.scheme);
            assert_eq!(count.total, Some(compile(&variant).unwrap().n_variables()));
        }
    }

    #[test]
    fn overrides_replace_the_default_factor() {
        let mut spec = tsp(sample_graph(), Scheme::OneHot);
        spec.penalty_overrides.insert(0, 1000.0);
        let c = compile(&spec).unwrap();
        assert_eq!(c.constraints[0].penalty, Some(1000.0));
        let implicit = c.constraints.iter().find(|k| k.implicit).unwrap();
        assert_eq!(implicit.penalty, Some(481.0));
    }

    #[test]
    fn compiled_cost_is_quadratic_for_every_scheme() {
        for scheme in Scheme::ALL {
            let c = compile(&tsp(sample_graph().restrict(3), scheme)).unwrap();
            assert!(c.polynomial.degree() <= 2, "{scheme}");
            let p = Path::closed(vec![1, 2, 3]);
            assert!(encode_paths(&c.registry, &[p]).is_ok());
        }
    }
}
