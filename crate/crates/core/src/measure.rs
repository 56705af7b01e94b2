//! Finite discrete probability spaces.
//!
//! Atoms are the indices `0..n`; every subset is measurable. Set families are
//! ordered lists and the position of a set inside its family is the canonical
//! tie-break for every construction built on top of it.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Absolute tolerance for μ-null discrepancies and normalisation checks.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DiscreteSpace {
    n: usize,
}

impl DiscreteSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        Ok(Self { n })
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn atoms(&self) -> Range<usize> {
        0..self.n
    }

    pub(crate) fn ensure_same(&self, other: &DiscreteSpace) -> Result<()> {
        if self.n != other.n {
            return Err(Error::SpaceMismatch(self.n, other.n));
        }
        Ok(())
    }
}

/// A nonnegative measure on a [`DiscreteSpace`].
///
/// Probability measures carry total mass 1 (within [`MASS_TOL`]); the
/// submeasures produced by restrictions and divisions only need total ≤ 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Measure {
    space: DiscreteSpace,
    mass: Vec<f64>,
    probability: bool,
}

impl Measure {
    pub fn probability(mass: Vec<f64>) -> Result<Self> {
        let m = Self::build(mass, true)?;
        let total = m.total();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::NotNormalized(total));
        }
        Ok(m)
    }

    pub fn sub_probability(mass: Vec<f64>) -> Result<Self> {
        let m = Self::build(mass, false)?;
        let total = m.total();
        if total > 1.0 + MASS_TOL {
            return Err(Error::ExceedsUnit(total));
        }
        Ok(m)
    }

    /// Uniform probability on `n` atoms.
    pub fn uniform(n: usize) -> Result<Self> {
        DiscreteSpace::new(n)?;
        Self::probability(vec![1.0 / n as f64; n])
    }

    /// Point mass on `atom`.
    pub fn dirac(n: usize, atom: usize) -> Result<Self> {
        DiscreteSpace::new(n)?;
        if atom >= n {
            return Err(Error::AtomOutOfRange { atom, n });
        }
        let mut mass = vec![0.0; n];
        mass[atom] = 1.0;
        Self::probability(mass)
    }

    fn build(mass: Vec<f64>, probability: bool) -> Result<Self> {
        let space = DiscreteSpace::new(mass.len())?;
        if let Some((atom, &value)) = mass
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || **v < 0.0)
        {
            return Err(Error::InvalidMass { atom, value });
        }
        Ok(Self {
            space,
            mass,
            probability,
        })
    }

    pub fn space(&self) -> DiscreteSpace {
        self.space
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn is_probability(&self) -> bool {
        self.probability
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// μ(A).
    pub fn of(&self, set: &AtomSet) -> f64 {
        set.iter().map(|x| self.mass[x]).sum()
    }

    /// Atoms of strictly positive mass.
    pub fn support(&self) -> AtomSet {
        AtomSet {
            space: self.space,
            members: self.space.atoms().filter(|&x| self.mass[x] > 0.0).collect(),
        }
    }
}

/// A subset of atoms, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AtomSet {
    space: DiscreteSpace,
    members: BTreeSet<usize>,
}

impl AtomSet {
    pub fn new(space: DiscreteSpace, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let members: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&atom) = members.iter().next_back().filter(|&&a| a >= space.len()) {
            return Err(Error::AtomOutOfRange {
                atom,
                n: space.len(),
            });
        }
        Ok(Self { space, members })
    }

    pub fn empty(space: DiscreteSpace) -> Self {
        Self {
            space,
            members: BTreeSet::new(),
        }
    }

    pub fn full(space: DiscreteSpace) -> Self {
        Self {
            space,
            members: space.atoms().collect(),
        }
    }

    pub fn space(&self) -> DiscreteSpace {
        self.space
    }

    pub fn contains(&self, atom: usize) -> bool {
        self.members.contains(&atom)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn is_subset(&self, other: &AtomSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn is_disjoint(&self, other: &AtomSet) -> bool {
        self.members.is_disjoint(&other.members)
    }

    pub fn union(&self, other: &AtomSet) -> AtomSet {
        AtomSet {
            space: self.space,
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn difference(&self, other: &AtomSet) -> AtomSet {
        AtomSet {
            space: self.space,
            members: self.members.difference(&other.members).copied().collect(),
        }
    }

    pub fn complement(&self) -> AtomSet {
        AtomSet::full(self.space).difference(self)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Display for AtomSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// An indexed list of atom sets over one space. Covers and partitions are
/// both represented this way.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SetFamily {
    space: DiscreteSpace,
    sets: Vec<AtomSet>,
}

impl SetFamily {
    pub fn new(space: DiscreteSpace, sets: Vec<AtomSet>) -> Result<Self> {
        for set in &sets {
            space.ensure_same(&set.space)?;
        }
        Ok(Self { space, sets })
    }

    pub fn from_indices<S: AsRef<[usize]>>(space: DiscreteSpace, sets: &[S]) -> Result<Self> {
        let sets = sets
            .iter()
            .map(|s| AtomSet::new(space, s.as_ref().iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { space, sets })
    }

    pub fn space(&self) -> DiscreteSpace {
        self.space
    }

    pub fn sets(&self) -> &[AtomSet] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&AtomSet> {
        self.sets.get(index)
    }

    pub fn union(&self) -> AtomSet {
        self.sets
            .iter()
            .fold(AtomSet::empty(self.space), |acc, s| acc.union(s))
    }

    /// Indices of the sets containing `atom`, ascending.
    pub fn containing(&self, atom: usize) -> Vec<usize> {
        self.sets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.contains(atom))
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_index_lists(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(AtomSet::to_vec).collect()
    }

    /// Canonical form for comparing families as unordered collections of
    /// nonempty sets.
    pub fn canonical(&self) -> Vec<Vec<usize>> {
        let mut lists: Vec<Vec<usize>> = self
            .sets
            .iter()
            .filter(|s| !s.is_empty())
            .map(AtomSet::to_vec)
            .collect();
        lists.sort();
        lists
    }
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.sets.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{s}")?;
        }
        write!(f, "}}")
    }
}

/// μ restricted to `set`: mass outside the set is zeroed.
pub fn restrict(mu: &Measure, set: &AtomSet) -> Result<Measure> {
    mu.space.ensure_same(&set.space)?;
    let mass = mu
        .space
        .atoms()
        .map(|x| if set.contains(x) { mu.mass[x] } else { 0.0 })
        .collect();
    Ok(Measure {
        space: mu.space,
        mass,
        probability: false,
    })
}

/// μ-mass of the atoms lying outside every set of `fam`.
pub fn uncovered_mass(fam: &SetFamily, mu: &Measure) -> f64 {
    let covered = fam.union();
    mu.space
        .atoms()
        .filter(|&x| !covered.contains(x))
        .map(|x| mu.mass[x])
        .sum()
}

pub fn is_mu_partition(fam: &SetFamily, mu: &Measure) -> bool {
    if fam.space != mu.space {
        return false;
    }
    let mut seen = AtomSet::empty(fam.space);
    for set in &fam.sets {
        if !set.is_disjoint(&seen) {
            return false;
        }
        seen = seen.union(set);
    }
    uncovered_mass(fam, mu) <= MASS_TOL
}

/// Covers may overlap; only the uncovered mass matters.
pub fn is_mu_cover(fam: &SetFamily, mu: &Measure) -> bool {
    fam.space == mu.space && uncovered_mass(fam, mu) <= MASS_TOL
}

/// `p ≺ q`: every nonempty set of `p` lies inside some set of `q`.
pub fn finer_than(p: &SetFamily, q: &SetFamily) -> bool {
    p.space == q.space
        && p.sets
            .iter()
            .filter(|s| !s.is_empty())
            .all(|s| q.sets.iter().any(|t| s.is_subset(t)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    mu: Vec<f64>,
    cover: Vec<Vec<usize>>,
}

/// A probability measure together with a cover, as read from an instance
/// file `{"n": .., "mu": [..], "cover": [[..], ..]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub measure: Measure,
    pub cover: SetFamily,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: InstanceFile = serde_json::from_str(text)?;
        let space = DiscreteSpace::new(raw.n)?;
        if raw.mu.len() != raw.n {
            return Err(Error::SpaceMismatch(raw.n, raw.mu.len()));
        }
        let measure = Measure::probability(raw.mu)?;
        let cover = SetFamily::from_indices(space, &raw.cover)?;
        Ok(Self { measure, cover })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}
