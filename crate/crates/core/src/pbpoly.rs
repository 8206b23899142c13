//! Multilinear pseudo-Boolean polynomials.
//!
//! Every value handled by the compiler passes through [`Polynomial`]: constraint
//! penalties, the objective, the quadratized cost function. Variables are opaque
//! indices; `x * x = x` is applied whenever two monomials are multiplied, so a
//! polynomial is always in multilinear normal form.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::PolyError;
use crate::fmt_num::format_g17;

/// Coefficients with magnitude below this are dropped during normalization.
pub const ZERO_TOLERANCE: f64 = 1e-12;

/// A product of distinct binary variables, stored as strictly ascending indices.
///
/// The empty monomial is the constant term. Ordering is by degree first, then
/// lexicographically, which is also the rendering order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<usize>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(index: usize) -> Self {
        Monomial(vec![index])
    }

    /// Builds a monomial from arbitrary indices, applying idempotence.
    pub fn new(mut vars: Vec<usize>) -> Self {
        vars.sort_unstable();
        vars.dedup();
        Monomial(vars)
    }

    pub fn vars(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_constant(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, var: usize) -> bool {
        self.0.binary_search(&var).is_ok()
    }

    /// Product of two monomials; shared variables collapse.
    pub fn product(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub(crate) fn from_sorted_unchecked(vars: Vec<usize>) -> Self {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        Monomial(vars)
    }

    pub(crate) fn into_vars(self) -> Vec<usize> {
        self.0
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Real-coefficient multilinear polynomial over binary variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(index: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial::var(index), 1.0);
        p
    }

    /// `1 - x_index`
    pub fn not_var(index: usize) -> Self {
        let mut p = Self::constant(1.0);
        p.add_term(Monomial::var(index), -1.0);
        p
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, f64)>,
    {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Adds `c * m` in place, dropping the term if it cancels.
    pub fn add_term(&mut self, m: Monomial, c: f64) {
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                if c.abs() >= ZERO_TOLERANCE {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v.abs() < ZERO_TOLERANCE {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, f64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn coefficient(&self, m: &Monomial) -> f64 {
        self.terms.get(m).copied().unwrap_or(0.0)
    }

    pub fn constant_term(&self) -> f64 {
        self.coefficient(&Monomial::one())
    }

    /// Number of nonzero terms, the constant included.
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Largest variable index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        self.terms
            .keys()
            .filter_map(|m| m.vars().last().copied())
            .max()
    }

    pub fn scale(&self, c: f64) -> Polynomial {
        Polynomial::from_terms(self.terms.iter().map(|(m, &v)| (m.clone(), v * c)))
    }

    pub fn square(&self) -> Polynomial {
        self * self
    }

    /// `1 - self`
    pub fn complement(&self) -> Polynomial {
        Polynomial::constant(1.0) - self
    }

    /// Sum of absolute values of all non-constant coefficients.
    pub fn abs_coefficient_sum(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(m, _)| !m.is_constant())
            .map(|(_, c)| c.abs())
            .sum()
    }

    /// Sum of the negative non-constant coefficients plus the constant.
    ///
    /// A lower bound on the value of the polynomial over all binary assignments.
    pub fn lower_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|(m, &c)| if m.is_constant() { c } else { c.min(0.0) })
            .sum()
    }

    /// Evaluates at a binary assignment indexed by variable.
    pub fn evaluate(&self, assignment: &[bool]) -> Result<f64, PolyError> {
        if let Some(max) = self.max_var() {
            if max >= assignment.len() {
                return Err(PolyError::MissingVariable {
                    index: max,
                    len: assignment.len(),
                });
            }
        }
        Ok(self.evaluate_unchecked(assignment))
    }

    pub(crate) fn evaluate_unchecked(&self, assignment: &[bool]) -> f64 {
        self.terms
            .iter()
            .filter(|(m, _)| m.vars().iter().all(|&v| assignment[v]))
            .map(|(_, &c)| c)
            .sum()
    }
}

impl AddAssign<&Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: &Polynomial) {
        for (m, &c) in &rhs.terms {
            self.add_term(m.clone(), c);
        }
    }
}

impl AddAssign<Polynomial> for Polynomial {
    fn add_assign(&mut self, rhs: Polynomial) {
        if self.terms.is_empty() {
            *self = rhs;
            return;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl Add<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        self += rhs;
        self
    }
}

impl Sub<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, &c) in &rhs.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
}

impl Sub<&Polynomial> for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        &self - rhs
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: Polynomial) -> Polynomial {
        &self - &rhs
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl Mul<&Polynomial> for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &rhs.terms {
                out.add_term(ma.product(mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl std::iter::Sum for Polynomial {
    fn sum<I: Iterator<Item = Polynomial>>(iter: I) -> Polynomial {
        let mut acc = Polynomial::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}

/// Product of an iterator of polynomials; the empty product is 1.
pub fn product<I: IntoIterator<Item = Polynomial>>(factors: I) -> Polynomial {
    factors
        .into_iter()
        .fold(Polynomial::constant(1.0), |acc, f| &acc * &f)
}

impl fmt::Display for Polynomial {
    /// Renders e.g. `3 - 2*x0 + 1.5*x0*x3`; the zero polynomial renders as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, &c)) in self.terms.iter().enumerate() {
            let mag = c.abs();
            if k == 0 {
                if c < 0.0 {
                    f.write_str("-")?;
                }
            } else if c < 0.0 {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let vars = m
                .vars()
                .iter()
                .map(|v| format!("x{v}"))
                .collect::<Vec<_>>()
                .join("*");
            if m.is_constant() {
                f.write_str(&format_g17(mag))?;
            } else if mag == 1.0 {
                f.write_str(&vars)?;
            } else {
                write!(f, "{}*{}", format_g17(mag), vars)?;
            }
        }
        Ok(())
    }
}
