use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::error::Category;

use super::{validate, Objective, ProblemSpec, SpecError};
use crate::constraints::Constraint;
use crate::encodings::{EncodingSettings, Scheme};
use crate::graph::Graph;

/// Larger path counts are rejected before any per-path allocation.
const MAX_PATHS: usize = 1024;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDoc {
    graph: GraphDoc,
    encoding: EncodingDoc,
    #[serde(default)]
    constraints: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    objective: Option<Objective>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    penalty_overrides: BTreeMap<String, f64>,
    #[serde(default = "default_true")]
    implicit_path_is_valid: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    adjacency: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EncodingDoc {
    scheme: Scheme,
    #[serde(default = "default_one")]
    n_paths: usize,
    max_path_length: usize,
    #[serde(default)]
    loops: Option<Vec<bool>>,
}

fn default_true() -> bool {
    true
}

fn default_one() -> usize {
    1
}

fn schema(location: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Schema {
        location: location.into(),
        message: message.into(),
    }
}

/// Parses and validates a JSON problem document.
///
/// Selectors left out in the document (`paths`, `vertices`, `edges`) are
/// resolved to explicit lists, so the result serializes canonically.
pub fn parse_spec(bytes: &[u8]) -> Result<ProblemSpec, SpecError> {
    let doc: SpecDoc = serde_json::from_slice(bytes).map_err(|e| match e.classify() {
        Category::Data => schema(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        ),
        _ => SpecError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        },
    })?;

    let graph = Graph::new(doc.graph.adjacency).map_err(|e| {
        use crate::error::GraphError::*;
        let location = match &e {
            NotSquare { row, .. } | NonZeroDiagonal(row) | NonFinite(row, _) => {
                format!("graph.adjacency row {row}")
            }
            _ => "graph.adjacency".to_string(),
        };
        schema(location, e.to_string())
    })?;

    let enc = doc.encoding;
    if enc.n_paths > MAX_PATHS {
        return Err(schema(
            "encoding.n_paths",
            format!(
                "{} paths requested, at most {MAX_PATHS} supported",
                enc.n_paths
            ),
        ));
    }
    let loops = enc.loops.unwrap_or_else(|| vec![false; enc.n_paths]);
    let encoding = EncodingSettings::new(enc.scheme, enc.n_paths, enc.max_path_length, loops);

    let mut penalty_overrides = BTreeMap::new();
    for (key, value) in doc.penalty_overrides {
        let index: usize = key.parse().map_err(|_| {
            schema(
                format!("penalty_overrides.{key}"),
                "keys must be constraint indices (0-based integers)",
            )
        })?;
        penalty_overrides.insert(index, value);
    }

    let mut spec = ProblemSpec {
        graph,
        encoding,
        constraints: doc.constraints,
        objective: doc.objective,
        penalty_overrides,
        implicit_path_is_valid: doc.implicit_path_is_valid,
    };
    let diags = validate(&spec);
    if diags.iter().any(|d| d.is_error()) {
        return Err(SpecError::Semantic(diags));
    }
    spec.resolve_defaults();
    Ok(spec)
}

/// Canonical pretty-printed JSON; `parse_spec` inverts it.
pub fn serialize_spec(spec: &ProblemSpec) -> String {
    let doc = SpecDoc {
        graph: GraphDoc {
            adjacency: spec.graph.adjacency(),
        },
        encoding: EncodingDoc {
            scheme: spec.encoding.scheme,
            n_paths: spec.encoding.n_paths,
            max_path_length: spec.encoding.max_path_length,
            loops: Some(spec.encoding.loops.clone()),
        },
        constraints: spec.constraints.clone(),
        objective: spec.objective,
        penalty_overrides: spec
            .penalty_overrides
            .iter()
            .map(|(k, v)| (k.to_string(), *v))
            .collect(),
        implicit_path_is_valid: spec.implicit_path_is_valid,
    };
    serde_json::to_string_pretty(&doc).expect("spec documents always serialize")
}



#[cfg(test)]
mod schema_document {
    use std::collections::BTreeSet;

    use super::*;

    #[test]
    fn schema_lists_exactly_the_supported_constraint_types() {
        let path = concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../schema/problem.schema.json"
        );
        let schema: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        let listed: BTreeSet<String> = schema["properties"]["constraints"]["items"]["oneOf"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| {
                c["properties"]["type"]["const"]
                    .as_str()
                    .unwrap()
                    .to_string()
            })
            .collect();
        let samples = [
            r#"{"type": "path_is_valid"}"#,
            r#"{"type": "position_is", "path": 1, "position": 1, "vertices": [1]}"#,
            r#"{"type": "vertices_at_least_once"}"#,
            r#"{"type": "vertices_exactly_once"}"#,
            r#"{"type": "vertices_at_most_once"}"#,
            r#"{"type": "edges_at_least_once"}"#,
            r#"{"type": "edges_exactly_once"}"#,
            r#"{"type": "edges_at_most_once"}"#,
            r#"{"type": "paths_share_no_vertices"}"#,
            r#"{"type": "paths_share_no_edges"}"#,
            r#"{"type": "precedence", "before": 1, "after": 2}"#,
            r#"{"type": "optimize_weight"}"#,
        ];
        let accepted: BTreeSet<String> = samples
            .iter()
            .map(|s| {
                serde_json::from_str::<Constraint>(s)
                    .unwrap()
                    .kind()
                    .to_string()
            })
            .collect();
        assert_eq!(listed, accepted);
    }
}
