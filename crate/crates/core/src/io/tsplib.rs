//! The TSPLib subset: `TSP` and `SOP` instances with explicit full matrices
//! or `EUC_2D` coordinates.
//!
//! `EUC_2D` distances are rounded to the nearest integer as TSPLib prescribes,
//! which can change which tour is optimal. Some SOP files repeat the dimension
//! as the first token of the matrix; that extra token is skipped when the
//! count is exactly one too many and it equals the dimension.

use std::collections::BTreeMap;

use super::{validate, Objective, ProblemSpec, SpecError};
use crate::constraints::Constraint;
use crate::encodings::{EncodingSettings, Scheme};
use crate::graph::Graph;

/// Largest accepted `DIMENSION`.
pub const MAX_DIMENSION: usize = 2048;

const HEADER_KEYS: &[&str] = &[
    "NAME",
    "COMMENT",
    "TYPE",
    "DIMENSION",
    "EDGE_WEIGHT_TYPE",
    "EDGE_WEIGHT_FORMAT",
    "NODE_COORD_TYPE",
    "DISPLAY_DATA_TYPE",
];

#[derive(Clone, Copy, PartialEq)]
enum Section {
    EdgeWeights,
    NodeCoords,
}

struct Token<'a> {
    line: usize,
    text: &'a str,
}

fn unsupported(keyword: &str, value: &str) -> SpecError {
    SpecError::Unsupported {
        keyword: keyword.to_string(),
        value: value.to_string(),
    }
}

fn number(tok: &Token<'_>) -> Result<f64, SpecError> {
    match tok.text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(SpecError::Syntax {
            line: tok.line,
            column: 1,
            message: format!("expected a finite number, found `{}`", tok.text),
        }),
    }
}

/// Parses a TSPLib file and lowers it to a problem spec.
pub fn parse_tsplib(bytes: &[u8]) -> Result<ProblemSpec, SpecError> {
    let text = std::str::from_utf8(bytes).map_err(|e| SpecError::Syntax {
        line: 1 + bytes[..e.valid_up_to()]
            .iter()
            .filter(|&&b| b == b'\n')
            .count(),
        column: 1,
        message: "input is not valid UTF-8".into(),
    })?;

    let mut headers: BTreeMap<&str, &str> = BTreeMap::new();
    let mut sections: BTreeMap<u8, Vec<Token<'_>>> = BTreeMap::new();
    let mut current: Option<Section> = None;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        let starts_alpha = trimmed.starts_with(|c: char| c.is_ascii_alphabetic());
        if !starts_alpha {
            match current {
                Some(s) => sections
                    .entry(s as u8)
                    .or_default()
                    .extend(trimmed.split_whitespace().map(|text| Token { line, text })),
                None => {
                    return Err(SpecError::Syntax {
                        line,
                        column: 1,
                        message: "data outside of any section".into(),
                    })
                }
            }
            continue;
        }
        current = None;
        let (key, value) = match trimmed.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => {
                let mut parts = trimmed.splitn(2, char::is_whitespace);
                (
                    parts.next().unwrap_or(""),
                    parts.next().unwrap_or("").trim(),
                )
            }
        };
        match key {
            "EOF" => break,
            "EDGE_WEIGHT_SECTION" => current = Some(Section::EdgeWeights),
            "NODE_COORD_SECTION" => current = Some(Section::NodeCoords),
            k if k.ends_with("_SECTION") => return Err(unsupported("section", k)),
            k if HEADER_KEYS.contains(&k) => {
                if headers.insert(k, value).is_some() && k != "COMMENT" {
                    return Err(SpecError::Syntax {
                        line,
                        column: 1,
                        message: format!("{k} given twice"),
                    });
                }
            }
            k => return Err(unsupported("keyword", k)),
        }
    }

    let kind = headers.get("TYPE").copied().unwrap_or("");
    if kind != "TSP" && kind != "SOP" {
        return Err(unsupported("TYPE", kind));
    }
    let dim_text = headers
        .get("DIMENSION")
        .ok_or_else(|| SpecError::Dimension("DIMENSION is missing".into()))?;
    let n: usize = dim_text
        .parse()
        .map_err(|_| SpecError::Dimension(format!("`{dim_text}` is not a vertex count")))?;
    if n == 0 || n > MAX_DIMENSION {
        return Err(SpecError::Dimension(format!(
            "{n} vertices outside the supported range 1..={MAX_DIMENSION}"
        )));
    }
    if let Some(&t) = headers.get("NODE_COORD_TYPE") {
        if t != "TWOD_COORDS" {
            return Err(unsupported("NODE_COORD_TYPE", t));
        }
    }

    let weight_type = headers.get("EDGE_WEIGHT_TYPE").copied().unwrap_or("");
    let mut matrix = match weight_type {
        "EXPLICIT" => {
            let format = headers.get("EDGE_WEIGHT_FORMAT").copied().unwrap_or("");
            if format != "FULL_MATRIX" {
                return Err(unsupported("EDGE_WEIGHT_FORMAT", format));
            }
            let tokens = sections
                .remove(&(Section::EdgeWeights as u8))
                .unwrap_or_default();
            explicit_matrix(n, &tokens)?
        }
        "EUC_2D" => {
            let tokens = sections
                .remove(&(Section::NodeCoords as u8))
                .unwrap_or_default();
            euclidean_matrix(n, &tokens)?
        }
        other => return Err(unsupported("EDGE_WEIGHT_TYPE", other)),
    };

    let mut precedences = Vec::new();
    for (i, row) in matrix.iter_mut().enumerate() {
        row[i] = 0.0;
        if kind == "SOP" {
            for (j, w) in row.iter_mut().enumerate() {
                if *w == -1.0 {
                    precedences.push((j + 1, i + 1));
                    *w = 0.0;
                }
            }
        }
    }
    let graph = Graph::new(matrix).map_err(|e| SpecError::Schema {
        location: "EDGE_WEIGHT_SECTION".into(),
        message: e.to_string(),
    })?;

    let mut spec = if kind == "TSP" {
        ProblemSpec::new(graph, EncodingSettings::single(Scheme::OneHot, n, true)).with_constraint(
            Constraint::VerticesExactlyOnce {
                paths: None,
                vertices: None,
            },
        )
    } else {
        let mut spec = ProblemSpec::new(graph, EncodingSettings::single(Scheme::OneHot, n, false))
            .with_constraint(Constraint::VerticesExactlyOnce {
                paths: None,
                vertices: None,
            })
            .with_constraint(Constraint::PositionIs {
                path: 1,
                position: 1,
                vertices: vec![1],
            })
            .with_constraint(Constraint::PositionIs {
                path: 1,
                position: n,
                vertices: vec![n],
            });
        for (before, after) in precedences {
            spec = spec.with_constraint(Constraint::Precedence {
                paths: None,
                before,
                after,
            });
        }
        spec
    }
    .with_objective(Objective::Minimize);
    spec.resolve_defaults();
    let diags = validate(&spec);
    if diags.iter().any(|d| d.is_error()) {
        return Err(SpecError::Semantic(diags));
    }
    Ok(spec)
}

fn explicit_matrix(n: usize, tokens: &[Token<'_>]) -> Result<Vec<Vec<f64>>, SpecError> {
    let mut tokens = tokens;
    if tokens.len() == n * n + 1 && tokens[0].text.parse::<usize>() == Ok(n) {
        tokens = &tokens[1..];
    }
    if tokens.len() != n * n {
        return Err(SpecError::Dimension(format!(
            "EDGE_WEIGHT_SECTION has {} entries, expected {}",
            tokens.len(),
            n * n
        )));
    }
    let values = tokens.iter().map(number).collect::<Result<Vec<_>, _>>()?;
    Ok(values.chunks(n).map(<[f64]>::to_vec).collect())
}

fn euclidean_matrix(n: usize, tokens: &[Token<'_>]) -> Result<Vec<Vec<f64>>, SpecError> {
    if tokens.len() != 3 * n {
        return Err(SpecError::Dimension(format!(
            "NODE_COORD_SECTION has {} entries, expected {} (id x y per node)",
            tokens.len(),
            3 * n
        )));
    }
    let mut coords: Vec<Option<(f64, f64)>> = vec![None; n];
    for node in tokens.chunks(3) {
        let id = node[0]
            .text
            .parse::<usize>()
            .ok()
            .filter(|id| (1..=n).contains(id));
        let Some(id) = id else {
            return Err(SpecError::Syntax {
                line: node[0].line,
                column: 1,
                message: format!("node id `{}` outside 1..={n}", node[0].text),
            });
        };
        if coords[id - 1].is_some() {
            return Err(SpecError::Syntax {
                line: node[0].line,
                column: 1,
                message: format!("node {id} listed twice"),
            });
        }
        coords[id - 1] = Some((number(&node[1])?, number(&node[2])?));
    }
    let coords: Vec<(f64, f64)> = coords
        .into_iter()
        .map(|c| c.expect("all ids seen"))
        .collect();
    Ok(coords
        .iter()
        .map(|&(x1, y1)| {
            coords
                .iter()
                .map(|&(x2, y2)| ((x1 - x2).hypot(y1 - y2) + 0.5).floor())
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1_ROWS: &str = "0 2 6 6 2\n5 0 1 7 8\n7 3 0 5 4\n4 8 1 0 3\n9 6 7 2 0\n";

    fn tsp_file() -> String {
        format!(
            "NAME: sample_graph\nTYPE: TSP\nDIMENSION: 5\nEDGE_WEIGHT_TYPE: EXPLICIT\n\
             EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n{FIG1_ROWS}EOF\n"
        )
    }

    #[test]
    fn tsp_lowers_to_a_cycle_over_all_vertices() {
        let spec = parse_tsplib(tsp_file().as_bytes()).unwrap();
        assert_eq!(spec.graph.weight(5, 1), 9.0);
        assert_eq!(
            spec.encoding,
            EncodingSettings::single(Scheme::OneHot, 5, true)
        );
        assert_eq!(spec.objective, Some(Objective::Minimize));
        assert_eq!(
            spec.constraints,
            vec![Constraint::VerticesExactlyOnce {
                paths: Some(vec![1]),
                vertices: Some(vec![1, 2, 3, 4, 5]),
            }]
        );
    }

    #[test]
    fn crlf_and_compact_headers_are_accepted() {
        let text = tsp_file().replace(": ", ":").replace('\n', "\r\n");
        assert_eq!(
            parse_tsplib(text.as_bytes()).unwrap(),
            parse_tsplib(tsp_file().as_bytes()).unwrap()
        );
    }

    #[test]
    fn sop_minus_one_entries_become_precedences() {
        let rows = "0 -1 6 6 2\n5 0 1 7 8\n-1 3 0 5 4\n4 8 1 0 -1\n9 6 7 2 0\n";
        let text = format!(
            "TYPE: SOP\nDIMENSION: 5\nEDGE_WEIGHT_TYPE: EXPLICIT\n\
             EDGE_WEIGHT_FORMAT: FULL_MATRIX\nEDGE_WEIGHT_SECTION\n5\n{rows}EOF\n"
        );
        let spec = parse_tsplib(text.as_bytes()).unwrap();
        let mut found: Vec<(usize, usize)> = spec
            .constraints
            .iter()
            .filter_map(|c| match c {
                Constraint::Precedence { before, after, .. } => Some((*before, *after)),
                _ => None,
            })
            .collect();
        found.sort();
        assert_eq!(found, vec![(1, 3), (2, 1), (5, 4)]);
        assert!(!spec.graph.has_edge(1, 2));
        assert!(!spec.encoding.loops[0]);
    }

    #[test]
    fn euclidean_distances_round_to_nearest() {
        let text = "TYPE: TSP\nDIMENSION: 3\nEDGE_WEIGHT_TYPE: EUC_2D\nNODE_COORD_SECTION\n\
                    1 0 0\n2 3 4\n3 1.2 1.2\nEOF\n";
        let spec = parse_tsplib(text.as_bytes()).unwrap();
        assert_eq!(spec.graph.weight(1, 2), 5.0);
        // sqrt(2.88) = 1.697
        assert_eq!(spec.graph.weight(1, 3), 2.0);
        assert_eq!(spec.graph.weight(3, 1), 2.0);
    }

    #[test]
    fn unsupported_inputs_are_named() {
        let cvrp = "TYPE: CVRP\nDIMENSION: 3\n";
        assert_eq!(
            parse_tsplib(cvrp.as_bytes()),
            Err(SpecError::Unsupported {
                keyword: "TYPE".into(),
                value: "CVRP".into()
            })
        );
        let lower = tsp_file().replace("FULL_MATRIX", "LOWER_ROW");
        assert_eq!(
            parse_tsplib(lower.as_bytes()).unwrap_err().code(),
            "E_UNSUPPORTED"
        );
        let tour = tsp_file().replace("EOF", "TOUR_SECTION\n1\n");
        assert_eq!(
            parse_tsplib(tour.as_bytes()).unwrap_err().code(),
            "E_UNSUPPORTED"
        );
    }

    #[test]
    fn dimension_mismatches_are_reported() {
        let short = tsp_file().replace("9 6 7 2 0\n", "");
        assert_eq!(
            parse_tsplib(short.as_bytes()).unwrap_err().code(),
            "E_DIMENSION"
        );
        let huge = tsp_file().replace("DIMENSION: 5", "DIMENSION: 99999999999");
        assert_eq!(
            parse_tsplib(huge.as_bytes()).unwrap_err().code(),
            "E_DIMENSION"
        );
    }
}
