//! Degree reduction by auxiliary-variable substitution.
//!
//! A pair `x_a x_b` inside higher-order monomials is replaced by a fresh `y`
//! and the gadget `M (x_a x_b - 2 x_a y - 2 x_b y + 3 y)` is added. The gadget
//! is 0 when `y = x_a x_b` and at least `M` otherwise, so with `M` above the
//! total weight of the rewritten monomials, minima are preserved.
//!
//! Pairs are chosen greedily: the pair shared by the most higher-order
//! monomials goes first, ties broken by the smallest pair. Pairs already
//! defined in the registry reuse their auxiliary.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};

use crate::encodings::VariableRegistry;
use crate::error::{CompileError, PolyError};
use crate::pbpoly::{Monomial, Polynomial, ZERO_TOLERANCE};

type Pair = (usize, usize);

/// `1 + Σ |c|` over monomials of `p` that contain both variables of `pair`.
pub fn penalty_magnitude(p: &Polynomial, pair: Pair) -> Result<f64, PolyError> {
    let (a, b) = pair;
    let mut found = false;
    let mut total = 1.0;
    for (m, c) in p.terms() {
        if m.contains(a) && m.contains(b) {
            found = true;
            total += c.abs();
        }
    }
    if found {
        Ok(total)
    } else {
        Err(PolyError::PairNotPresent(a, b))
    }
}

/// `h(a, b, y) = ab - 2ay - 2by + 3y`, zero iff `y = ab`.
pub fn substitution_gadget(a: usize, b: usize, y: usize) -> Polynomial {
    Polynomial::from_terms([
        (Monomial::new(vec![a, b]), 1.0),
        (Monomial::new(vec![a, y]), -2.0),
        (Monomial::new(vec![b, y]), -2.0),
        (Monomial::var(y), 3.0),
    ])
}

/// Reduces `p` to degree <= 2, extending `reg` with any auxiliaries it needs.
pub fn quadratize(p: &Polynomial, reg: &mut VariableRegistry) -> Polynomial {
    quadratize_capped(p, reg, None).expect("no cap")
}

/// As [`quadratize`], failing once the registry would exceed `cap` variables.
pub fn quadratize_capped(
    p: &Polynomial,
    reg: &mut VariableRegistry,
    cap: Option<usize>,
) -> Result<Polynomial, CompileError> {
    let mut work = Workspace::default();
    for (m, c) in p.terms() {
        work.insert(m.vars().to_vec(), c);
    }
    while let Some(&(_, a, b)) = work.ranking.first() {
        let slots: Vec<usize> = work.pair_slots[&(a, b)].iter().copied().collect();
        let y = match reg.auxiliary_for(a, b) {
            Some(y) => y,
            None => {
                if cap.is_some_and(|cap| reg.len() + 1 > cap) {
                    return Err(CompileError::VariableCap { cap: cap.unwrap() });
                }
                reg.add_auxiliary(a, b)
            }
        };
        let mut magnitude = 1.0 + work.low.coefficient(&Monomial::new(vec![a, b])).abs();
        for &s in &slots {
            let (vars, c) = work.remove(s);
            magnitude += c.abs();
            let mut next: Vec<usize> = vars.into_iter().filter(|&v| v != a && v != b).collect();
            next.push(y);
            work.insert(Monomial::new(next).into_vars(), c);
        }
        work.low += substitution_gadget(a, b, y).scale(magnitude);
    }
    Ok(work.low)
}

/// Higher-order monomials indexed by the pairs they contain.
#[derive(Default)]
struct Workspace {
    low: Polynomial,
    slots: Vec<Option<(Vec<usize>, f64)>>,
    by_vars: HashMap<Vec<usize>, usize>,
    pair_slots: HashMap<Pair, BTreeSet<usize>>,
    ranking: BTreeSet<(Reverse<usize>, usize, usize)>,
}

impl Workspace {
    fn insert(&mut self, vars: Vec<usize>, c: f64) {
        if vars.len() <= 2 {
            self.low.add_term(Monomial::from_sorted_unchecked(vars), c);
            return;
        }
        if let Some(&s) = self.by_vars.get(&vars) {
            let entry = self.slots[s].as_mut().expect("live slot");
            entry.1 += c;
            if entry.1.abs() < ZERO_TOLERANCE {
                self.remove(s);
            }
            return;
        }
        let s = self.slots.len();
        for pair in pairs(&vars) {
            self.adjust(pair, |set| {
                set.insert(s);
            });
        }
        self.by_vars.insert(vars.clone(), s);
        self.slots.push(Some((vars, c)));
    }

    fn remove(&mut self, s: usize) -> (Vec<usize>, f64) {
        let (vars, c) = self.slots[s].take().expect("live slot");
        self.by_vars.remove(&vars);
        for pair in pairs(&vars) {
            self.adjust(pair, |set| {
                set.remove(&s);
            });
        }
        (vars, c)
    }

    fn adjust(&mut self, pair: Pair, f: impl FnOnce(&mut BTreeSet<usize>)) {
        let set = self.pair_slots.entry(pair).or_default();
        let before = set.len();
        f(set);
        let after = set.len();
        if before != after {
            if before > 0 {
                self.ranking.remove(&(Reverse(before), pair.0, pair.1));
            }
            if after > 0 {
                self.ranking.insert((Reverse(after), pair.0, pair.1));
            } else {
                self.pair_slots.remove(&pair);
            }
        }
    }
}

fn pairs(vars: &[usize]) -> impl Iterator<Item = Pair> + '_ {
    vars.iter()
        .enumerate()
        .flat_map(move |(i, &a)| vars[i + 1..].iter().map(move |&b| (a, b)))
}
