//! Directed weighted graphs and paths over them.
//!
//! Vertices are 1-based everywhere in this API. A weight of `0` means "no edge",
//! so zero-weight edges cannot be expressed.

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    weights: Vec<f64>,
}

impl Graph {
    pub fn new(adjacency: Vec<Vec<f64>>) -> Result<Self, GraphError> {
        let n = adjacency.len();
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut weights = Vec::with_capacity(n * n);
        for (r, row) in adjacency.into_iter().enumerate() {
            if row.len() != n {
                return Err(GraphError::NotSquare {
                    row: r + 1,
                    len: row.len(),
                    expected: n,
                });
            }
            for (c, w) in row.into_iter().enumerate() {
                if !w.is_finite() {
                    return Err(GraphError::NonFinite(r + 1, c + 1));
                }
                if r == c && w != 0.0 {
                    return Err(GraphError::NonZeroDiagonal(r + 1));
                }
                weights.push(w);
            }
        }
        Ok(Graph { n, weights })
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.n
    }

    /// Weight of `u -> v`, `0` if absent. Panics on out-of-range vertices.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        assert!((1..=self.n).contains(&u) && (1..=self.n).contains(&v));
        self.weights[(u - 1) * self.n + (v - 1)]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.weight(u, v) != 0.0
    }

    /// All edges `(u, v, w)` in row-major order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (1..=self.n).flat_map(move |u| {
            (1..=self.n).filter_map(move |v| {
                let w = self.weight(u, v);
                (w != 0.0).then_some((u, v, w))
            })
        })
    }

    /// Ordered pairs `(u, v)` that are not edges, including `u == v`.
    pub fn non_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..=self.n).flat_map(move |u| {
            (1..=self.n).filter_map(move |v| (!self.has_edge(u, v)).then_some((u, v)))
        })
    }

    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    pub fn adjacency(&self) -> Vec<Vec<f64>> {
        self.weights.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    /// The subgraph induced by the first `k` vertices.
    pub fn restrict(&self, k: usize) -> Graph {
        let k = k.clamp(1, self.n);
        let adjacency = (1..=k)
            .map(|u| (1..=k).map(|v| self.weight(u, v)).collect())
            .collect();
        Graph::new(adjacency).expect("restriction of a valid graph")
    }
}

/// A sequence of vertices, optionally closed by an edge from last back to first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Path {
    pub vertices: Vec<usize>,
    #[serde(default)]
    pub loops: bool,
}

impl Path {
    pub fn new(vertices: Vec<usize>, loops: bool) -> Self {
        Path { vertices, loops }
    }

    pub fn open(vertices: Vec<usize>) -> Self {
        Path::new(vertices, false)
    }

    pub fn closed(vertices: Vec<usize>) -> Self {
        Path::new(vertices, true)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Consecutive vertex pairs, plus the wrap pair when the path loops.
    pub fn steps(&self) -> Vec<(usize, usize)> {
        let mut steps: Vec<_> = self.vertices.windows(2).map(|w| (w[0], w[1])).collect();
        if self.loops && self.vertices.len() > 1 {
            steps.push((*self.vertices.last().unwrap(), self.vertices[0]));
        }
        steps
    }
}

impl std::fmt::Display for Path {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let body = self
            .vertices
            .iter()
            .map(|v| format!("v{v}"))
            .collect::<Vec<_>>()
            .join(" -> ");
        if self.loops && !self.vertices.is_empty() {
            write!(f, "{body} -> v{}", self.vertices[0])
        } else {
            f.write_str(&body)
        }
    }
}

fn check_vertices(g: &Graph, p: &Path) -> Result<(), GraphError> {
    match p.vertices.iter().find(|&&v| v == 0 || v > g.n) {
        Some(&vertex) => Err(GraphError::VertexOutOfRange { vertex, n: g.n }),
        None => Ok(()),
    }
}

/// Total weight along the path; fails on the first missing edge.
pub fn path_weight(g: &Graph, p: &Path) -> Result<f64, GraphError> {
    check_vertices(g, p)?;
    p.steps().into_iter().try_fold(0.0, |acc, (u, v)| {
        let w = g.weight(u, v);
        if w == 0.0 {
            Err(GraphError::MissingEdge(u, v))
        } else {
            Ok(acc + w)
        }
    })
}

pub fn is_valid_path(g: &Graph, p: &Path) -> bool {
    check_vertices(g, p).is_ok() && p.steps().into_iter().all(|(u, v)| g.has_edge(u, v))
}

/// Every valid path with exactly `length` vertices, in lexicographic order.
pub fn enumerate_paths(g: &Graph, length: usize, loops: bool, simple: bool) -> Vec<Path> {
    let mut out = Vec::new();
    if length == 0 || (simple && length > g.n) {
        return out;
    }
    let mut stack = Vec::with_capacity(length);
    let mut used = vec![false; g.n + 1];
    extend_paths(g, length, loops, simple, &mut stack, &mut used, &mut out);
    out
}

fn extend_paths(
    g: &Graph,
    length: usize,
    loops: bool,
    simple: bool,
    stack: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Path>,
) {
    if stack.len() == length {
        let closes = !loops || length == 1 || g.has_edge(*stack.last().unwrap(), stack[0]);
        if closes {
            out.push(Path::new(stack.clone(), loops));
        }
        return;
    }
    for v in g.vertices() {
        if simple && used[v] {
            continue;
        }
        if let Some(&last) = stack.last() {
            if !g.has_edge(last, v) {
                continue;
            }
        }
        stack.push(v);
        used[v] = true;
        extend_paths(g, length, loops, simple, stack, used, out);
        used[v] = false;
        stack.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_graph() -> Graph {
        Graph::new(vec![
            vec![0.0, 2.0, 6.0, 6.0, 2.0],
            vec![5.0, 0.0, 1.0, 7.0, 8.0],
            vec![7.0, 3.0, 0.0, 5.0, 4.0],
            vec![4.0, 8.0, 1.0, 0.0, 3.0],
            vec![9.0, 6.0, 7.0, 2.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn single_vertex_path_weighs_nothing() {
        assert_eq!(path_weight(&sample_graph(), &Path::open(vec![3])).unwrap(), 0.0);
        assert!(is_valid_path(&sample_graph(), &Path::open(vec![1])));
    }

    #[test]
    fn sample_path_weights() {
        let g = sample_graph();
        let verts = vec![4, 2, 5, 1, 3];
        // A[4][2] + A[2][5] + A[5][1] + A[1][3]
        let open = 8.0 + 8.0 + 9.0 + 6.0;
        assert_eq!(path_weight(&g, &Path::open(verts.clone())).unwrap(), open);
        // closing edge v3 -> v4 is A[3][4] = 5
        assert_eq!(
            path_weight(&g, &Path::closed(verts.clone())).unwrap(),
            open + 5.0
        );
        assert!(is_valid_path(&g, &Path::closed(verts)));
    }

    #[test]
    fn self_steps_are_invalid() {
        let g = sample_graph();
        assert!(!is_valid_path(&g, &Path::open(vec![2, 2])));
        assert_eq!(
            path_weight(&g, &Path::open(vec![1, 2, 2])),
            Err(GraphError::MissingEdge(2, 2))
        );
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(
            Graph::new(vec![vec![0.0, 1.0], vec![1.0]]),
            Err(GraphError::NotSquare { row: 2, .. })
        ));
        assert_eq!(
            Graph::new(vec![vec![1.0]]),
            Err(GraphError::NonZeroDiagonal(1))
        );
        assert_eq!(Graph::new(vec![]), Err(GraphError::Empty));
    }

    #[test]
    fn enumeration_counts() {
        let g = sample_graph();
        assert_eq!(enumerate_paths(&g, 1, false, false).len(), 5);
        // complete digraph: every permutation is a Hamiltonian cycle order
        let cycles = enumerate_paths(&g, 5, true, true);
        assert_eq!(cycles.len(), 120);
        assert!(cycles.windows(2).all(|w| w[0].vertices < w[1].vertices));
        let two = Graph::new(vec![vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(
            enumerate_paths(&two, 2, false, false),
            vec![Path::open(vec![1, 2])]
        );
    }

    #[test]
    fn enumeration_matches_validity_filter() {
        let g = Graph::new(vec![
            vec![0.0, 1.0, 0.0, 2.0],
            vec![0.0, 0.0, 3.0, 0.0],
            vec![1.5, 0.0, 0.0, 1.0],
            vec![0.0, 4.0, 0.0, 0.0],
        ])
        .unwrap();
        for length in 1..=4 {
            for loops in [false, true] {
                for simple in [false, true] {
                    let mut brute = Vec::new();
                    for code in 0..4usize.pow(length as u32) {
                        let verts: Vec<usize> = (0..length)
                            .map(|k| code / 4usize.pow(k as u32) % 4 + 1)
                            .collect();
                        let p = Path::new(verts.clone(), loops);
                        let distinct = {
                            let mut s = verts.clone();
                            s.sort();
                            s.dedup();
                            s.len() == verts.len()
                        };
                        if is_valid_path(&g, &p) && (!simple || distinct) {
                            brute.push(p);
                        }
                    }
                    brute.sort_by(|a, b| a.vertices.cmp(&b.vertices));
                    assert_eq!(enumerate_paths(&g, length, loops, simple), brute);
                }
            }
        }
    }

    #[test]
    fn weight_is_additive_under_concatenation() {
        let g = sample_graph();
        let a = Path::open(vec![4, 2, 5]);
        let b = Path::open(vec![5, 1, 3]);
        let ab = Path::open(vec![4, 2, 5, 1, 3]);
        assert_eq!(
            path_weight(&g, &a).unwrap() + path_weight(&g, &b).unwrap(),
            path_weight(&g, &ab).unwrap()
        );
    }
}
