//! Partition entropy and the classical entropy of a cover: the minimum of
//! `h(μ; P)` over μ-partitions `P` finer than the cover.
//!
//! Under the CGEF condition, merging blocks that sit inside the same cover set
//! never raises the entropy. Every acceptable partition can therefore be
//! coarsened into one induced by an atom-to-set assignment without getting
//! worse, and the minimum is searched over assignments only.

use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::functional::EntropyFunctional;
use crate::measure::{is_mu_cover, is_mu_partition, uncovered_mass, AtomSet, Measure, SetFamily};
use crate::search::{self, ChoiceSpace};

/// Cap on the assignment count accepted by [`enumerate_acceptable_partitions`].
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// Default candidate budget for cover-entropy searches.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// An entropy value on the extended half-line; `Infinite` stands for the
/// infimum over an empty candidate set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EntropyValue {
    Finite(f64),
    Infinite,
}

impl EntropyValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(&self) -> Option<f64> {
        match *self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }

    /// `|self - other| ≤ tol`, with two infinities counted as equal.
    pub fn agrees_with(&self, other: &EntropyValue, tol: f64) -> bool {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => (a - b).abs() <= tol,
            (Self::Infinite, Self::Infinite) => true,
            _ => false,
        }
    }

    /// `self ≤ other + tol` on the extended half-line.
    pub fn le_within(&self, other: &EntropyValue, tol: f64) -> bool {
        match (self, other) {
            (_, Self::Infinite) => true,
            (Self::Infinite, Self::Finite(_)) => false,
            (Self::Finite(a), Self::Finite(b)) => *a <= b + tol,
        }
    }
}

impl fmt::Display for EntropyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => write!(f, "infinity"),
        }
    }
}

impl Serialize for EntropyValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(*v),
            Self::Infinite => s.serialize_str("infinity"),
        }
    }
}

/// Each positive-mass atom mapped to the index of a cover set containing it.
#[derive(Clone, Debug, PartialEq)]
pub struct Assignment {
    cover: SetFamily,
    choice: Vec<Option<usize>>,
}

impl Assignment {
    pub fn new(mu: &Measure, cover: &SetFamily, choice: Vec<Option<usize>>) -> Result<Self> {
        mu.space().ensure_same(&cover.space())?;
        if choice.len() != mu.space().len() {
            return Err(Error::InvalidAssignment(format!(
                "{} choices for {} atoms",
                choice.len(),
                mu.space().len()
            )));
        }
        for (x, c) in choice.iter().enumerate() {
            match *c {
                Some(i) if cover.get(i).is_some_and(|s| s.contains(x)) => {}
                Some(i) => {
                    return Err(Error::InvalidAssignment(format!(
                        "atom {x} is not in cover set {i}"
                    )))
                }
                None if mu.mass()[x] > 0.0 && !cover.containing(x).is_empty() => {
                    return Err(Error::InvalidAssignment(format!(
                        "atom {x} has positive mass but no cover set"
                    )))
                }
                None => {}
            }
        }
        let unassigned: f64 = choice
            .iter()
            .zip(mu.mass())
            .filter(|(c, _)| c.is_none())
            .map(|(_, m)| m)
            .sum();
        if unassigned > crate::measure::MASS_TOL {
            return Err(Error::NotCover(unassigned));
        }
        Ok(Self {
            cover: cover.clone(),
            choice,
        })
    }

    pub fn cover(&self) -> &SetFamily {
        &self.cover
    }

    pub fn choice(&self) -> &[Option<usize>] {
        &self.choice
    }
}

/// Groups atoms by their chosen cover set. Blocks follow cover order and
/// cover sets that received no atom are skipped.
pub fn assignment_to_partition(a: &Assignment) -> SetFamily {
    let space = a.cover.space();
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); a.cover.len()];
    for (x, c) in a.choice.iter().enumerate() {
        if let Some(i) = c {
            blocks[*i].push(x);
        }
    }
    let sets = blocks
        .into_iter()
        .filter(|b| !b.is_empty())
        .map(|b| AtomSet::new(space, b).expect("atoms come from the space"))
        .collect();
    SetFamily::new(space, sets).expect("blocks share the cover's space")
}

/// `h(μ; P)` for a μ-partition `P`.
pub fn partition_entropy(e: &EntropyFunctional, mu: &Measure, p: &SetFamily) -> Result<f64> {
    mu.space().ensure_same(&p.space())?;
    if !is_mu_partition(p, mu) {
        return Err(Error::NotPartition(format!(
            "{p} is not disjoint or misses mass {}",
            uncovered_mass(p, mu)
        )));
    }
    let masses: Vec<f64> = p.sets().iter().map(|s| mu.of(s)).collect();
    e.evaluate(&masses)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoverEntropyResult {
    pub value: EntropyValue,
    /// An optimal μ-partition finer than the cover; absent iff the value is
    /// infinite.
    pub witness: Option<SetFamily>,
    /// Candidates (exhaustive) or search nodes (branch and bound) examined.
    pub explored: u64,
}

impl CoverEntropyResult {
    pub(crate) fn infinite() -> Self {
        Self {
            value: EntropyValue::Infinite,
            witness: None,
            explored: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Exhaustive when the assignment count fits the budget, otherwise
    /// branch and bound.
    Auto,
    Exhaustive,
    BranchAndBound,
}

/// `H(μ; Q)` by the [`Strategy::Auto`] rule.
pub fn cover_entropy(
    e: &EntropyFunctional,
    mu: &Measure,
    q: &SetFamily,
    budget: u64,
) -> Result<CoverEntropyResult> {
    cover_entropy_with(e, mu, q, budget, Strategy::Auto)
}

pub fn cover_entropy_with(
    e: &EntropyFunctional,
    mu: &Measure,
    q: &SetFamily,
    budget: u64,
    strategy: Strategy,
) -> Result<CoverEntropyResult> {
    mu.space().ensure_same(&q.space())?;
    let Some(space) = ChoiceSpace::new(mu, q).filter(|_| is_mu_cover(q, mu)) else {
        return Ok(CoverEntropyResult::infinite());
    };
    let fits = space.total() <= budget as u128;
    let best = match strategy {
        Strategy::Auto if fits => search::exhaustive(e, &space),
        Strategy::Exhaustive if fits => search::exhaustive(e, &space),
        Strategy::Exhaustive => return Err(Error::BudgetExceeded(budget)),
        Strategy::Auto | Strategy::BranchAndBound => search::branch_and_bound(e, &space, budget)?,
    };
    let choice = space.expand(mu.space().len(), &best.choice);
    let assignment = Assignment {
        cover: q.clone(),
        choice,
    };
    Ok(CoverEntropyResult {
        value: EntropyValue::Finite(best.value),
        witness: Some(assignment_to_partition(&assignment)),
        explored: best.explored,
    })
}

/// Iterator over the distinct μ-partitions induced by assignments, in
/// lexicographic order of the first choice vector producing each.
pub struct AcceptablePartitions {
    space: ChoiceSpace,
    cover: SetFamily,
    n: usize,
    digits: Option<Vec<usize>>,
    seen: HashSet<Vec<Vec<usize>>>,
}

impl Iterator for AcceptablePartitions {
    type Item = SetFamily;

    fn next(&mut self) -> Option<SetFamily> {
        loop {
            let digits = self.digits.as_mut()?;
            let choice = self.space.choice(digits);
            if !self.space.advance(digits) {
                self.digits = None;
            }
            let assignment = Assignment {
                cover: self.cover.clone(),
                choice: self.space.expand(self.n, &choice),
            };
            let partition = assignment_to_partition(&assignment);
            if self.seen.insert(partition.canonical()) {
                return Some(partition);
            }
        }
    }
}

pub fn enumerate_acceptable_partitions(
    mu: &Measure,
    q: &SetFamily,
) -> Result<AcceptablePartitions> {
    mu.space().ensure_same(&q.space())?;
    let space = ChoiceSpace::new(mu, q)
        .filter(|_| is_mu_cover(q, mu))
        .ok_or_else(|| Error::NotCover(uncovered_mass(q, mu)))?;
    let total = space.total();
    if total > ENUMERATION_CAP {
        return Err(Error::TooManyAssignments(total, ENUMERATION_CAP));
    }
    Ok(AcceptablePartitions {
        digits: Some(vec![0; space.atoms.len()]),
        space,
        cover: q.clone(),
        n: mu.space().len(),
        seen: HashSet::new(),
    })
}
