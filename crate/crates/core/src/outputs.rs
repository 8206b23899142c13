//! QUBO and Ising artifacts and their text formats.
//!
//! Every format starts with a `#` header carrying the variable count, the
//! constant offset, the encoding settings and the auxiliary definitions, so a
//! file can be decoded without the original spec. Numbers use 17 significant
//! digits and parse back to the same doubles.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assembly::CompiledProblem;
use crate::encodings::{EncodingSettings, VarRole, VariableRegistry};
use crate::error::OutputError;
use crate::fmt_num::format_g17;
use crate::pbpoly::Polynomial;

/// `x^T Q x + offset` with `Q` upper triangular and linear terms on the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct QuboArtifact {
    pub n: usize,
    /// Nonzero entries keyed by `(i, j)` with `i <= j`.
    pub entries: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
    pub registry: VariableRegistry,
}

/// `Σ h_i s_i + Σ_{i<j} J_ij s_i s_j + offset` over spins `s_i ∈ {-1, +1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IsingModel {
    pub h: Vec<f64>,
    /// Nonzero couplings keyed by `(i, j)` with `i < j`.
    pub couplings: BTreeMap<(usize, usize), f64>,
    pub offset: f64,
    pub registry: VariableRegistry,
}

pub fn to_qubo_matrix(c: &CompiledProblem) -> Result<QuboArtifact, OutputError> {
    QuboArtifact::from_polynomial(&c.polynomial, c.registry.clone())
}

pub fn to_ising(c: &CompiledProblem) -> Result<IsingModel, OutputError> {
    Ok(to_qubo_matrix(c)?.to_ising())
}

impl QuboArtifact {
    pub fn from_polynomial(
        p: &Polynomial,
        registry: VariableRegistry,
    ) -> Result<Self, OutputError> {
        if p.degree() > 2 {
            return Err(OutputError::DegreeTooHigh(p.degree()));
        }
        let mut entries = BTreeMap::new();
        for (m, c) in p.terms() {
            match *m.vars() {
                [i] => {
                    entries.insert((i, i), c);
                }
                [i, j] => {
                    entries.insert((i, j), c);
                }
                _ => {}
            }
        }
        Ok(QuboArtifact {
            n: registry.len(),
            entries,
            offset: p.constant_term(),
            registry,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries.get(&(i, j)).copied().unwrap_or(0.0)
    }

    /// Row-major dense copy of `Q`.
    pub fn dense(&self) -> Vec<Vec<f64>> {
        let mut q = vec![vec![0.0; self.n]; self.n];
        for (&(i, j), &v) in &self.entries {
            q[i][j] = v;
        }
        q
    }

    /// Largest absolute entry of `Q`.
    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn evaluate(&self, x: &[bool]) -> f64 {
        self.offset
            + self
                .entries
                .iter()
                .filter(|(&(i, j), _)| x[i] && x[j])
                .map(|(_, v)| v)
                .sum::<f64>()
    }

    /// Substitutes `x = (1 + s) / 2`.
    pub fn to_ising(&self) -> IsingModel {
        let mut h = vec![0.0; self.n];
        let mut couplings = BTreeMap::new();
        let mut offset = self.offset;
        for (&(i, j), &q) in &self.entries {
            if i == j {
                h[i] += q / 2.0;
                offset += q / 2.0;
            } else {
                h[i] += q / 4.0;
                h[j] += q / 4.0;
                offset += q / 4.0;
                couplings.insert((i, j), q / 4.0);
            }
        }
        IsingModel {
            h,
            couplings,
            offset,
            registry: self.registry.clone(),
        }
    }
}

impl IsingModel {
    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn energy(&self, spins: &[i8]) -> f64 {
        let field: f64 = self
            .h
            .iter()
            .zip(spins)
            .map(|(h, &s)| h * f64::from(s))
            .sum();
        let coupling: f64 = self
            .couplings
            .iter()
            .map(|(&(i, j), v)| v * f64::from(spins[i] * spins[j]))
            .sum();
        self.offset + field + coupling
    }
}

/// Spin for a binary value under `x = (1 + s) / 2`.
pub fn spin(x: bool) -> i8 {
    if x {
        1
    } else {
        -1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArtifactFormat {
    MatrixText,
    CoordinateList,
    IsingText,
}

impl ArtifactFormat {
    pub const ALL: [ArtifactFormat; 3] = [
        ArtifactFormat::MatrixText,
        ArtifactFormat::CoordinateList,
        ArtifactFormat::IsingText,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ArtifactFormat::MatrixText => "matrix-text",
            ArtifactFormat::CoordinateList => "coordinate-list",
            ArtifactFormat::IsingText => "ising-text",
        }
    }
}

impl fmt::Display for ArtifactFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ArtifactFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArtifactFormat::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown format `{s}`"))
    }
}

/// A parsed artifact file.
#[derive(Clone, Debug, PartialEq)]
pub enum Artifact {
    Qubo(QuboArtifact),
    Ising(IsingModel),
}

fn write_header(
    out: &mut String,
    format: ArtifactFormat,
    n: usize,
    offset: f64,
    reg: &VariableRegistry,
) {
    let settings = serde_json::to_string(reg.settings()).expect("settings serialize");
    let _ = writeln!(out, "# qubopath {format}");
    let _ = writeln!(out, "# n {n}");
    let _ = writeln!(out, "# offset {}", format_g17(offset));
    let _ = writeln!(out, "# spin-convention x = (1 + s) / 2");
    let _ = writeln!(out, "# vertices {}", reg.n_vertices());
    let _ = writeln!(out, "# encoding {settings}");
    for (i, role) in reg.roles().enumerate() {
        let _ = match role {
            VarRole::Position {
                path,
                position,
                vertex,
            } => writeln!(
                out,
                "# var {i} path {} position {position} vertex {vertex}",
                path + 1
            ),
            VarRole::Bit {
                path,
                position,
                bit,
            } => writeln!(
                out,
                "# var {i} path {} position {position} bit {bit}",
                path + 1
            ),
            VarRole::Auxiliary { left, right } => writeln!(out, "# aux {i} {left} {right}"),
        };
    }
}

/// Renders a QUBO artifact as `matrix-text` or `coordinate-list`, or its Ising form.
pub fn serialize_artifact(a: &QuboArtifact, format: ArtifactFormat) -> String {
    match format {
        ArtifactFormat::IsingText => serialize_ising(&a.to_ising()),
        _ => serialize_qubo(a, format),
    }
}

fn serialize_qubo(a: &QuboArtifact, format: ArtifactFormat) -> String {
    let mut out = String::new();
    write_header(&mut out, format, a.n, a.offset, &a.registry);
    if format == ArtifactFormat::MatrixText {
        for row in a.dense() {
            let line: Vec<String> = row.into_iter().map(format_g17).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
    } else {
        for (&(i, j), &v) in &a.entries {
            let _ = writeln!(out, "{i} {j} {}", format_g17(v));
        }
    }
    out
}

pub fn serialize_ising(m: &IsingModel) -> String {
    let mut out = String::new();
    write_header(
        &mut out,
        ArtifactFormat::IsingText,
        m.n(),
        m.offset,
        &m.registry,
    );
    for (i, &h) in m.h.iter().enumerate() {
        if h != 0.0 {
            let _ = writeln!(out, "h {i} {}", format_g17(h));
        }
    }
    for (&(i, j), &v) in &m.couplings {
        let _ = writeln!(out, "J {i} {j} {}", format_g17(v));
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> OutputError {
    OutputError::Parse {
        line,
        message: message.into(),
    }
}

fn field<T: FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T, OutputError> {
    tok.and_then(|t| t.parse().ok())
        .ok_or_else(|| parse_err(line, format!("expected {what}")))
}

/// Inverse of [`serialize_artifact`] and [`serialize_ising`].
pub fn parse_artifact(text: &str) -> Result<Artifact, OutputError> {
    let mut format = None;
    let mut n = None;
    let mut offset = None;
    let mut vertices = None;
    let mut settings: Option<EncodingSettings> = None;
    let mut aux: Vec<(usize, usize, usize)> = Vec::new();
    let mut body: Vec<(usize, &str)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let Some(comment) = raw.strip_prefix('#') else {
            body.push((line, raw));
            continue;
        };
        let comment = comment.trim();
        let (key, rest) = comment.split_once(' ').unwrap_or((comment, ""));
        let mut toks = rest.split_whitespace();
        match key {
            "qubopath" => {
                format = Some(
                    rest.trim()
                        .parse::<ArtifactFormat>()
                        .map_err(|e| parse_err(line, e))?,
                )
            }
            "n" => n = Some(field::<usize>(line, toks.next(), "a variable count")?),
            "offset" => offset = Some(field::<f64>(line, toks.next(), "an offset")?),
            "vertices" => vertices = Some(field::<usize>(line, toks.next(), "a vertex count")?),
            "encoding" => {
                settings =
                    Some(serde_json::from_str(rest).map_err(|e| parse_err(line, e.to_string()))?)
            }
            "aux" => aux.push((
                field(line, toks.next(), "an index")?,
                field(line, toks.next(), "a left operand")?,
                field(line, toks.next(), "a right operand")?,
            )),
            _ => {}
        }
    }
    let missing = |what: &str| parse_err(0, format!("header is missing `{what}`"));
    let format = format.ok_or_else(|| missing("qubopath"))?;
    let n = n.ok_or_else(|| missing("n"))?;
    let offset = offset.ok_or_else(|| missing("offset"))?;
    let vertices = vertices.ok_or_else(|| missing("vertices"))?;
    let settings = settings.ok_or_else(|| missing("encoding"))?;
    let mut registry =
        VariableRegistry::new(settings, vertices).map_err(|e| parse_err(0, e.to_string()))?;
    for (idx, l, r) in aux {
        if idx != registry.len()
            || l >= r
            || r >= registry.len()
            || registry.auxiliary_for(l, r).is_some()
        {
            return Err(parse_err(
                0,
                format!("invalid auxiliary definition {idx} = ({l}, {r})"),
            ));
        }
        registry.add_auxiliary(l, r);
    }
    if registry.len() != n {
        return Err(parse_err(
            0,
            format!(
                "header declares {n} variables, registry has {}",
                registry.len()
            ),
        ));
    }

    match format {
        ArtifactFormat::MatrixText => {
            if body.len() != n {
                return Err(parse_err(
                    0,
                    format!("expected {n} matrix rows, found {}", body.len()),
                ));
            }
            let mut entries = BTreeMap::new();
            for (i, &(line, row)) in body.iter().enumerate() {
                let values: Vec<&str> = row.split_whitespace().collect();
                if values.len() != n {
                    return Err(parse_err(line, format!("expected {n} values")));
                }
                for (j, tok) in values.into_iter().enumerate() {
                    let v: f64 = field(line, Some(tok), "a number")?;
                    if v != 0.0 {
                        if j < i {
                            return Err(parse_err(line, "entry below the diagonal"));
                        }
                        entries.insert((i, j), v);
                    }
                }
            }
            Ok(Artifact::Qubo(QuboArtifact {
                n,
                entries,
                offset,
                registry,
            }))
        }
        ArtifactFormat::CoordinateList => {
            let mut entries = BTreeMap::new();
            for (line, row) in body {
                let mut toks = row.split_whitespace();
                let i: usize = field(line, toks.next(), "a row index")?;
                let j: usize = field(line, toks.next(), "a column index")?;
                let v: f64 = field(line, toks.next(), "a value")?;
                if i > j || j >= n || toks.next().is_some() {
                    return Err(parse_err(line, "malformed `i j value` entry"));
                }
                entries.insert((i, j), v);
            }
            Ok(Artifact::Qubo(QuboArtifact {
                n,
                entries,
                offset,
                registry,
            }))
        }
        ArtifactFormat::IsingText => {
            let mut h = vec![0.0; n];
            let mut couplings = BTreeMap::new();
            for (line, row) in body {
                let mut toks = row.split_whitespace();
                match toks.next() {
                    Some("h") => {
                        let i: usize = field(line, toks.next(), "an index")?;
                        if i >= n {
                            return Err(parse_err(line, "field index out of range"));
                        }
                        h[i] = field(line, toks.next(), "a value")?;
                    }
                    Some("J") => {
                        let i: usize = field(line, toks.next(), "a row index")?;
                        let j: usize = field(line, toks.next(), "a column index")?;
                        if i >= j || j >= n {
                            return Err(parse_err(line, "couplings need i < j < n"));
                        }
                        couplings.insert((i, j), field(line, toks.next(), "a value")?);
                    }
                    _ => return Err(parse_err(line, "expected an `h` or `J` line")),
                }
            }
            Ok(Artifact::Ising(IsingModel {
                h,
                couplings,
                offset,
                registry,
            }))
        }
    }
}
