//! Path encodings: how a tuple of fixed-length paths becomes a binary vector.
//!
//! Three layouts are supported. For every `(path, position, vertex)` the
//! encoding supplies an indicator polynomial that is 1 exactly when the vertex
//! sits at that position; all constraints are written against these indicators
//! and never look at the underlying bits directly.
//!
//! * one-hot: one variable per `(position, vertex)`, the set bit names the vertex.
//! * domain wall: one variable per `(position, vertex)`, the column is `1^k 0^(n-k)`
//!   and `k` names the vertex.
//! * binary: `bit_width(n)` variables per position holding the vertex id, LSB first.
//!   Value 0 and values above `n` are invalid.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::EncodingError;
use crate::graph::Path;
use crate::pbpoly::{product, Polynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    OneHot,
    DomainWall,
    Binary,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::OneHot, Scheme::DomainWall, Scheme::Binary];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::OneHot => "one_hot",
            Scheme::DomainWall => "domain_wall",
            Scheme::Binary => "binary",
        }
    }

    /// Whether every indicator lies in {0, 1} on *all* assignments, valid or not.
    ///
    /// Domain-wall indicators are differences and reach -1 on broken columns.
    pub fn indicators_nonnegative(self) -> bool {
        !matches!(self, Scheme::DomainWall)
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "one_hot" => Ok(Scheme::OneHot),
            "domain_wall" => Ok(Scheme::DomainWall),
            "binary" => Ok(Scheme::Binary),
            other => Err(format!(
                "unknown encoding `{other}` (expected one_hot, domain_wall or binary)"
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingSettings {
    pub scheme: Scheme,
    pub n_paths: usize,
    pub max_path_length: usize,
    /// One flag per path.
    pub loops: Vec<bool>,
}

impl EncodingSettings {
    pub fn new(scheme: Scheme, n_paths: usize, max_path_length: usize, loops: Vec<bool>) -> Self {
        EncodingSettings {
            scheme,
            n_paths,
            max_path_length,
            loops,
        }
    }

    pub fn single(scheme: Scheme, max_path_length: usize, loops: bool) -> Self {
        Self::new(scheme, 1, max_path_length, vec![loops])
    }

    pub fn with_scheme(&self, scheme: Scheme) -> Self {
        EncodingSettings {
            scheme,
            ..self.clone()
        }
    }

    pub fn check(&self) -> Result<(), EncodingError> {
        if self.n_paths == 0 {
            return Err(EncodingError::InvalidSettings(
                "n_paths must be at least 1".into(),
            ));
        }
        if self.max_path_length == 0 {
            return Err(EncodingError::InvalidSettings(
                "max_path_length must be at least 1".into(),
            ));
        }
        if self.loops.len() != self.n_paths {
            return Err(EncodingError::InvalidSettings(format!(
                "loops has {} entries for {} paths",
                self.loops.len(),
                self.n_paths
            )));
        }
        Ok(())
    }
}

/// Number of bits needed to store vertex ids `1..=n_vertices`.
pub fn bit_width(n_vertices: usize) -> usize {
    (usize::BITS - n_vertices.leading_zeros()) as usize
}

pub fn count_primary_variables(settings: &EncodingSettings, n_vertices: usize) -> usize {
    let per_position = match settings.scheme {
        Scheme::OneHot | Scheme::DomainWall => n_vertices,
        Scheme::Binary => bit_width(n_vertices),
    };
    settings.max_path_length * per_position * settings.n_paths
}

/// What a variable index stands for. Paths are 0-based, positions, vertices and
/// bits are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarRole {
    Position {
        path: usize,
        position: usize,
        vertex: usize,
    },
    Bit {
        path: usize,
        position: usize,
        bit: usize,
    },
    /// Stands for the product of two lower-indexed variables.
    Auxiliary { left: usize, right: usize },
}

/// Bijection between variable roles and contiguous indices.
///
/// Primaries come first, ordered by `(path, position, vertex/bit)`; auxiliaries
/// follow in creation order.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableRegistry {
    settings: EncodingSettings,
    n_vertices: usize,
    width: usize,
    auxiliaries: Vec<(usize, usize)>,
    aux_lookup: HashMap<(usize, usize), usize>,
}

impl VariableRegistry {
    pub fn new(settings: EncodingSettings, n_vertices: usize) -> Result<Self, EncodingError> {
        settings.check()?;
        if n_vertices == 0 {
            return Err(EncodingError::InvalidSettings(
                "graph has no vertices".into(),
            ));
        }
        let width = match settings.scheme {
            Scheme::OneHot | Scheme::DomainWall => n_vertices,
            Scheme::Binary => bit_width(n_vertices),
        };
        Ok(VariableRegistry {
            settings,
            n_vertices,
            width,
            auxiliaries: Vec::new(),
            aux_lookup: HashMap::new(),
        })
    }

    pub fn settings(&self) -> &EncodingSettings {
        &self.settings
    }

    pub fn scheme(&self) -> Scheme {
        self.settings.scheme
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_paths(&self) -> usize {
        self.settings.n_paths
    }

    pub fn path_length(&self) -> usize {
        self.settings.max_path_length
    }

    pub fn loops(&self, path: usize) -> bool {
        self.settings.loops[path]
    }

    /// Variables per position column: vertices, or bits for the binary scheme.
    pub fn column_width(&self) -> usize {
        self.width
    }

    pub fn n_primary(&self) -> usize {
        self.settings.n_paths * self.settings.max_path_length * self.width
    }

    pub fn n_auxiliary(&self) -> usize {
        self.auxiliaries.len()
    }

    pub fn len(&self) -> usize {
        self.n_primary() + self.n_auxiliary()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Index of the variable in column `(path, position)` at row `slot` (vertex or bit).
    pub fn primary_index(&self, path: usize, position: usize, slot: usize) -> usize {
        debug_assert!(path < self.settings.n_paths);
        debug_assert!((1..=self.settings.max_path_length).contains(&position));
        debug_assert!((1..=self.width).contains(&slot));
        (path * self.settings.max_path_length + (position - 1)) * self.width + (slot - 1)
    }

    pub fn role(&self, index: usize) -> Option<VarRole> {
        if index < self.n_primary() {
            let slot = index % self.width + 1;
            let column = index / self.width;
            let position = column % self.settings.max_path_length + 1;
            let path = column / self.settings.max_path_length;
            Some(match self.settings.scheme {
                Scheme::Binary => VarRole::Bit {
                    path,
                    position,
                    bit: slot,
                },
                _ => VarRole::Position {
                    path,
                    position,
                    vertex: slot,
                },
            })
        } else {
            self.auxiliaries
                .get(index - self.n_primary())
                .map(|&(left, right)| VarRole::Auxiliary { left, right })
        }
    }

    pub fn roles(&self) -> impl Iterator<Item = VarRole> + '_ {
        (0..self.len()).map(|i| self.role(i).expect("index in range"))
    }

    pub fn auxiliaries(&self) -> &[(usize, usize)] {
        &self.auxiliaries
    }

    pub fn auxiliary_for(&self, a: usize, b: usize) -> Option<usize> {
        let key = if a < b { (a, b) } else { (b, a) };
        self.aux_lookup.get(&key).copied()
    }

    /// Registers `y = x_a * x_b`, returning the existing index if the pair is known.
    pub fn add_auxiliary(&mut self, a: usize, b: usize) -> usize {
        let key = if a < b { (a, b) } else { (b, a) };
        assert!(
            key.0 != key.1 && key.1 < self.len(),
            "invalid auxiliary pair"
        );
        if let Some(&idx) = self.aux_lookup.get(&key) {
            return idx;
        }
        let idx = self.len();
        self.auxiliaries.push(key);
        self.aux_lookup.insert(key, idx);
        idx
    }

    /// Maps a 1-based position to a stored column, aliasing `N + 1` to 1 on looping paths.
    pub fn resolve_position(&self, path: usize, position: usize) -> Result<usize, EncodingError> {
        self.check_path(path)?;
        let n = self.settings.max_path_length;
        let max = if self.settings.loops[path] { n + 1 } else { n };
        if position == 0 || position > max {
            return Err(EncodingError::PositionOutOfRange { position, max });
        }
        Ok(if position == n + 1 { 1 } else { position })
    }

    fn check_path(&self, path: usize) -> Result<(), EncodingError> {
        if path >= self.settings.n_paths {
            return Err(EncodingError::PathOutOfRange {
                path,
                n_paths: self.settings.n_paths,
            });
        }
        Ok(())
    }

    fn check_vertex(&self, vertex: usize) -> Result<(), EncodingError> {
        if vertex == 0 || vertex > self.n_vertices {
            return Err(EncodingError::VertexOutOfRange {
                vertex,
                n: self.n_vertices,
            });
        }
        Ok(())
    }

    /// Rebuilds a registry from a serialized role list.
    pub fn from_roles(
        settings: EncodingSettings,
        n_vertices: usize,
        roles: &[VarRole],
    ) -> Result<Self, EncodingError> {
        let mut reg = VariableRegistry::new(settings, n_vertices)?;
        if roles.len() < reg.n_primary() {
            return Err(EncodingError::InvalidSettings(format!(
                "role list has {} entries, registry needs {} primaries",
                roles.len(),
                reg.n_primary()
            )));
        }
        for (i, role) in roles.iter().enumerate() {
            if i < reg.n_primary() {
                if Some(*role) != reg.role(i) {
                    return Err(EncodingError::InvalidSettings(format!(
                        "variable {i} does not match the primary layout"
                    )));
                }
            } else if let VarRole::Auxiliary { left, right } = *role {
                if left >= right || right >= reg.len() || reg.auxiliary_for(left, right).is_some() {
                    return Err(EncodingError::InvalidSettings(format!(
                        "variable {i} has an invalid auxiliary pair ({left}, {right})"
                    )));
                }
                reg.add_auxiliary(left, right);
            } else {
                return Err(EncodingError::InvalidSettings(format!(
                    "variable {i} is a primary after the primary block"
                )));
            }
        }
        Ok(reg)
    }
}

/// Φ: evaluates to 1 when `vertex` occupies `position` of `path` (on valid assignments).
pub fn indicator(
    reg: &VariableRegistry,
    path: usize,
    position: usize,
    vertex: usize,
) -> Result<Polynomial, EncodingError> {
    let j = reg.resolve_position(path, position)?;
    reg.check_vertex(vertex)?;
    let x = |slot: usize| reg.primary_index(path, j, slot);
    Ok(match reg.scheme() {
        Scheme::OneHot => Polynomial::var(x(vertex)),
        Scheme::DomainWall => {
            let mut phi = Polynomial::var(x(vertex));
            if vertex < reg.n_vertices() {
                phi = phi - Polynomial::var(x(vertex + 1));
            }
            phi
        }
        Scheme::Binary => value_indicator(reg, path, j, vertex),
    })
}

/// Product of bit literals matching `value` in a binary column.
fn value_indicator(reg: &VariableRegistry, path: usize, j: usize, value: usize) -> Polynomial {
    product((1..=reg.column_width()).map(|bit| {
        let idx = reg.primary_index(path, j, bit);
        if (value >> (bit - 1)) & 1 == 1 {
            Polynomial::var(idx)
        } else {
            Polynomial::not_var(idx)
        }
    }))
}

/// Ψ: `u` at `position` followed by `v` at `position + 1`.
pub fn edge_indicator(
    reg: &VariableRegistry,
    path: usize,
    position: usize,
    u: usize,
    v: usize,
) -> Result<Polynomial, EncodingError> {
    Ok(&indicator(reg, path, position, u)? * &indicator(reg, path, position + 1, v)?)
}

/// Penalty that is 0 when column `(path, position)` follows the scheme's rules and
/// at least 1 otherwise.
pub fn column_validity_penalty(
    reg: &VariableRegistry,
    path: usize,
    position: usize,
) -> Result<Polynomial, EncodingError> {
    let j = reg.resolve_position(path, position)?;
    let x = |slot: usize| Polynomial::var(reg.primary_index(path, j, slot));
    let n = reg.n_vertices();
    Ok(match reg.scheme() {
        Scheme::OneHot => {
            let sum: Polynomial = (1..=n).map(x).sum();
            sum.complement().square()
        }
        Scheme::DomainWall => {
            let mut p = x(1).complement();
            for v in 1..n {
                p += &x(v + 1) * &x(v).complement();
            }
            p
        }
        Scheme::Binary => (0..(1usize << reg.column_width()))
            .filter(|&w| w == 0 || w > n)
            .map(|w| value_indicator(reg, path, j, w))
            .sum(),
    })
}

/// The unique encoding-valid assignment for `paths` (auxiliaries included).
pub fn encode_paths(reg: &VariableRegistry, paths: &[Path]) -> Result<Vec<bool>, EncodingError> {
    if paths.len() != reg.n_paths() {
        return Err(EncodingError::WrongPathCount {
            expected: reg.n_paths(),
            got: paths.len(),
        });
    }
    let mut bits = vec![false; reg.len()];
    for (i, path) in paths.iter().enumerate() {
        if path.len() != reg.path_length() {
            return Err(EncodingError::WrongPathLength {
                path: i,
                len: path.len(),
                expected: reg.path_length(),
            });
        }
        for (k, &v) in path.vertices.iter().enumerate() {
            reg.check_vertex(v)?;
            let j = k + 1;
            match reg.scheme() {
                Scheme::OneHot => bits[reg.primary_index(i, j, v)] = true,
                Scheme::DomainWall => {
                    for u in 1..=v {
                        bits[reg.primary_index(i, j, u)] = true;
                    }
                }
                Scheme::Binary => {
                    for b in 1..=reg.column_width() {
                        bits[reg.primary_index(i, j, b)] = (v >> (b - 1)) & 1 == 1;
                    }
                }
            }
        }
    }
    fill_auxiliaries(reg, &mut bits);
    Ok(bits)
}

/// Sets every auxiliary to the product of its defining pair.
pub fn fill_auxiliaries(reg: &VariableRegistry, bits: &mut [bool]) {
    let base = reg.n_primary();
    for (k, &(a, b)) in reg.auxiliaries().iter().enumerate() {
        bits[base + k] = bits[a] && bits[b];
    }
}

/// Per path, per position: the vertex there, or `None` for a broken column.
pub type DecodedPaths = Vec<Vec<Option<usize>>>;

pub fn decode_assignment(reg: &VariableRegistry, assignment: &[bool]) -> DecodedPaths {
    let n = reg.n_vertices();
    let bit = |i: usize, j: usize, slot: usize| {
        assignment
            .get(reg.primary_index(i, j, slot))
            .copied()
            .unwrap_or(false)
    };
    (0..reg.n_paths())
        .map(|i| {
            (1..=reg.path_length())
                .map(|j| match reg.scheme() {
                    Scheme::OneHot => {
                        let mut set = (1..=n).filter(|&v| bit(i, j, v));
                        match (set.next(), set.next()) {
                            (Some(v), None) => Some(v),
                            _ => None,
                        }
                    }
                    Scheme::DomainWall => {
                        let k = (1..=n).take_while(|&v| bit(i, j, v)).count();
                        let rest_clear = (k + 1..=n).all(|v| !bit(i, j, v));
                        (k >= 1 && rest_clear).then_some(k)
                    }
                    Scheme::Binary => {
                        let value = (1..=reg.column_width())
                            .filter(|&b| bit(i, j, b))
                            .map(|b| 1usize << (b - 1))
                            .sum::<usize>();
                        (1..=n).contains(&value).then_some(value)
                    }
                })
                .collect()
        })
        .collect()
}

/// Decoded paths as [`Path`] values, if every position is valid.
pub fn decoded_to_paths(reg: &VariableRegistry, decoded: &DecodedPaths) -> Option<Vec<Path>> {
    decoded
        .iter()
        .enumerate()
        .map(|(i, cols)| {
            cols.iter()
                .copied()
                .collect::<Option<Vec<_>>>()
                .map(|vs| Path::new(vs, reg.loops(i)))
        })
        .collect()
}


#[cfg(test)]
mod properties {
    use super::*;
    use proptest::prelude::*;

    fn scheme() -> impl Strategy<Value = Scheme> {
        prop::sample::select(Scheme::ALL.to_vec())
    }

    /// Vertex count, scheme, and a two-path instance over it.
    fn instance() -> impl Strategy<Value = (usize, Scheme, Vec<Path>)> {
        (1usize..=6, 1usize..=5, scheme()).prop_flat_map(|(n, len, s)| {
            let path = (prop::collection::vec(1..=n, len), any::<bool>())
                .prop_map(|(vs, l)| Path::new(vs, l));
            (Just(n), Just(s), prop::collection::vec(path, 1..=2))
        })
    }

    fn registry(n: usize, s: Scheme, paths: &[Path]) -> VariableRegistry {
        let settings = EncodingSettings::new(
            s,
            paths.len(),
            paths[0].len(),
            paths.iter().map(|p| p.loops).collect(),
        );
        VariableRegistry::new(settings, n).unwrap()
    }

    proptest! {
        #[test]
        fn encode_then_decode_is_identity((n, s, paths) in instance()) {
            let reg = registry(n, s, &paths);
            let bits = encode_paths(&reg, &paths).unwrap();
            prop_assert_eq!(bits.len(), count_primary_variables(reg.settings(), n));
            prop_assert_eq!(decoded_to_paths(&reg, &decode_assignment(&reg, &bits)), Some(paths));
        }

        #[test]
        fn indicators_select_exactly_the_encoded_vertex((n, s, paths) in instance()) {
            let reg = registry(n, s, &paths);
            let bits = encode_paths(&reg, &paths).unwrap();
            for (i, p) in paths.iter().enumerate() {
                for j in 1..=p.len() {
                    let mut total = 0.0;
                    for v in 1..=n {
                        let phi = indicator(&reg, i, j, v).unwrap().evaluate(&bits).unwrap();
                        prop_assert_eq!(phi, f64::from(u8::from(p.vertices[j - 1] == v)));
                        total += phi;
                    }
                    prop_assert_eq!(total, 1.0);
                    prop_assert_eq!(column_validity_penalty(&reg, i, j).unwrap().evaluate(&bits).unwrap(), 0.0);
                }
            }
        }

        #[test]
        fn validity_penalty_flags_undecodable_columns(
            n in 1usize..=6,
            s in scheme(),
            seed in prop::collection::vec(any::<bool>(), 64),
        ) {
            let reg = VariableRegistry::new(EncodingSettings::single(s, 3, false), n).unwrap();
            let bits = &seed[..reg.len()];
            let decoded = decode_assignment(&reg, bits);
            for j in 1..=3 {
                let penalty = column_validity_penalty(&reg, 0, j).unwrap().evaluate(bits).unwrap();
                if decoded[0][j - 1].is_some() {
                    prop_assert_eq!(penalty, 0.0);
                } else {
                    prop_assert!(penalty >= 1.0);
                }
            }
        }
    }
}
