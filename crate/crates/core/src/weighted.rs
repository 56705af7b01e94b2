//! Weighted divisions of a measure along a cover and the weighted entropy.
//!
//! A division splits μ into submeasures `m_Q`, one per cover set, each
//! supported inside its set and summing back to μ. The weighted entropy of a
//! division is `f(Σ g(m_Q(X)))`. Two constructions connect divisions with
//! partitions:
//!
//! * [`partition_to_division`] restricts μ to the union of the blocks routed to
//!   each cover set, never increasing the entropy;
//! * [`disjointify`] orders cover sets by division mass and peels off
//!   `Q_i \ (Q_1 ∪ … ∪ Q_{i-1})`, never increasing it either.
//!
//! Together they make the weighted and classical cover entropies coincide for
//! every CGEF functional.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::classical::EntropyValue;
use crate::error::{Error, Result};
use crate::functional::{CgefCase, EntropyFunctional};
use crate::measure::{
    is_mu_cover, is_mu_partition, restrict, uncovered_mass, AtomSet, Measure, SetFamily, MASS_TOL,
};
use crate::search::ChoiceSpace;

/// Row masses at or below this are treated as zero when selecting the
/// positive part of a division.
pub const ROW_MASS_TOL: f64 = MASS_TOL;

/// A member of `V(μ; Q)`: `rows[i][x]` is the mass that the submeasure of
/// cover set `i` places on atom `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedDivision {
    mu: Measure,
    cover: SetFamily,
    rows: Vec<Vec<f64>>,
}

impl WeightedDivision {
    pub fn new(mu: &Measure, cover: &SetFamily, rows: Vec<Vec<f64>>) -> Result<Self> {
        mu.space().ensure_same(&cover.space())?;
        let n = mu.space().len();
        if rows.len() != cover.len() {
            return Err(Error::InvalidDivision(format!(
                "{} rows for a cover of {} sets",
                rows.len(),
                cover.len()
            )));
        }
        for (i, (row, set)) in rows.iter().zip(cover.sets()).enumerate() {
            if row.len() != n {
                return Err(Error::InvalidDivision(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (x, &v) in row.iter().enumerate() {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidDivision(format!(
                        "row {i} atom {x}: mass {v}"
                    )));
                }
                if v != 0.0 && !set.contains(x) {
                    return Err(Error::InvalidDivision(format!(
                        "row {i} places mass {v} on atom {x} outside its cover set"
                    )));
                }
            }
        }
        for x in 0..n {
            let column: f64 = rows.iter().map(|r| r[x]).sum();
            if (column - mu.mass()[x]).abs() > MASS_TOL {
                return Err(Error::InvalidDivision(format!(
                    "atom {x}: rows sum to {column}, measure has {}",
                    mu.mass()[x]
                )));
            }
        }
        Ok(Self {
            mu: mu.clone(),
            cover: cover.clone(),
            rows,
        })
    }

    /// Parses `{"cover_index_rows": [[..], ..]}` aligned with `cover`.
    pub fn from_json(mu: &Measure, cover: &SetFamily, text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct DivisionFile {
            cover_index_rows: Vec<Vec<f64>>,
        }
        let raw: DivisionFile = serde_json::from_str(text)?;
        Self::new(mu, cover, raw.cover_index_rows)
    }

    /// The vertex division sending each atom wholly to its chosen set.
    pub fn from_choice(mu: &Measure, cover: &SetFamily, choice: &[Option<usize>]) -> Result<Self> {
        let n = mu.space().len();
        let mut rows = vec![vec![0.0; n]; cover.len()];
        for (x, c) in choice.iter().enumerate() {
            if let Some(i) = c {
                let row = rows.get_mut(*i).ok_or_else(|| {
                    Error::InvalidDivision(format!("atom {x} routed to missing set {i}"))
                })?;
                row[x] = mu.mass()[x];
            }
        }
        Self::new(mu, cover, rows)
    }

    pub fn measure(&self) -> &Measure {
        &self.mu
    }

    pub fn cover(&self) -> &SetFamily {
        &self.cover
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `m_{Q_i}(X)` for every cover index.
    pub fn row_masses(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.iter().sum()).collect()
    }
}

/// `f(Σ g(m_Q(X)))` over the rows of positive mass.
pub fn weighted_entropy(e: &EntropyFunctional, d: &WeightedDivision) -> f64 {
    e.evaluate_unchecked(&d.row_masses())
}

/// Routes every block of `p` to the lowest-index cover set containing it and
/// restricts μ to the union routed to each set.
pub fn partition_to_division(
    mu: &Measure,
    p: &SetFamily,
    q: &SetFamily,
) -> Result<WeightedDivision> {
    mu.space().ensure_same(&p.space())?;
    mu.space().ensure_same(&q.space())?;
    if !is_mu_partition(p, mu) {
        return Err(Error::NotPartition(format!("{p}")));
    }
    let space = mu.space();
    let mut routed = vec![AtomSet::empty(space); q.len()];
    for (b, block) in p.sets().iter().enumerate() {
        if block.is_empty() {
            continue;
        }
        let target = q
            .sets()
            .iter()
            .position(|s| block.is_subset(s))
            .ok_or(Error::NotFiner(b))?;
        routed[target] = routed[target].union(block);
    }
    let rows = routed
        .iter()
        .map(|set| restrict(mu, set).map(|m| m.mass().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    WeightedDivision::new(mu, q, rows)
}

/// The intermediate state of [`disjointify`].
#[derive(Clone, Debug, PartialEq)]
pub struct Disjointification {
    /// Cover indices of the positive-mass rows, by nonincreasing row mass
    /// with ties broken by ascending index.
    pub order: Vec<usize>,
    /// Row masses in `order`.
    pub row_masses: Vec<f64>,
    /// `Q_{order[i]}` minus every earlier set, possibly empty or μ-null.
    pub blocks: Vec<AtomSet>,
}

pub fn disjointify_steps(d: &WeightedDivision) -> Result<Disjointification> {
    let masses = d.row_masses();
    let mut order: Vec<usize> = (0..masses.len())
        .filter(|&i| masses[i] > ROW_MASS_TOL)
        .collect();
    order.sort_by(|&a, &b| masses[b].total_cmp(&masses[a]).then(a.cmp(&b)));

    let space = d.mu.space();
    let positive = SetFamily::new(
        space,
        order.iter().map(|&i| d.cover.sets()[i].clone()).collect(),
    )?;
    if !is_mu_cover(&positive, &d.mu) {
        return Err(Error::NotCover(uncovered_mass(&positive, &d.mu)));
    }

    let mut taken = AtomSet::empty(space);
    let mut blocks = Vec::with_capacity(order.len());
    for set in positive.sets() {
        blocks.push(set.difference(&taken));
        taken = taken.union(set);
    }
    Ok(Disjointification {
        row_masses: order.iter().map(|&i| masses[i]).collect(),
        order,
        blocks,
    })
}

/// Greedy disjointification of the positive-mass rows of `d`; μ-null blocks
/// are dropped from the returned partition.
pub fn disjointify(d: &WeightedDivision) -> Result<SetFamily> {
    let steps = disjointify_steps(d)?;
    let blocks = steps
        .blocks
        .into_iter()
        .filter(|b| d.mu.of(b) > 0.0)
        .collect();
    SetFamily::new(d.mu.space(), blocks)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Curvature {
    Concave,
    Convex,
}

impl From<CgefCase> for Curvature {
    fn from(case: CgefCase) -> Self {
        match case {
            CgefCase::IncreasingSubadditiveConcave => Curvature::Concave,
            CgefCase::DecreasingSuperadditiveConvex => Curvature::Convex,
        }
    }
}

/// A pair of sequences in prefix-sum dominance: `x` nonincreasing, every
/// prefix sum of `x` at most that of `y`, equal totals.
#[derive(Clone, Debug, PartialEq)]
pub struct HlpInput {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl HlpInput {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::InvalidHlpInput(format!(
                "lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        if let Some(v) = x.iter().chain(&y).find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidHlpInput(format!(
                "entry {v} is not in [0, a]"
            )));
        }
        if let Some(i) = x.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidHlpInput(format!(
                "x is not nonincreasing at position {}",
                i + 1
            )));
        }
        let (mut sx, mut sy) = (0.0, 0.0);
        for (i, (a, b)) in x.iter().zip(&y).enumerate() {
            sx += a;
            sy += b;
            if sx > sy + MASS_TOL {
                return Err(Error::InvalidHlpInput(format!(
                    "prefix {}: Σx = {sx} exceeds Σy = {sy}",
                    i + 1
                )));
            }
        }
        if (sx - sy).abs() > MASS_TOL {
            return Err(Error::InvalidHlpInput(format!(
                "totals differ: {sx} vs {sy}"
            )));
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub sum_x: f64,
    pub sum_y: f64,
    /// `Σφ(x) ≥ Σφ(y)` for concave φ, `≤` for convex φ, within the tolerance.
    pub holds: bool,
}

/// Tolerance used by [`hlp_compare`].
pub const HLP_TOL: f64 = 1e-9;

pub fn hlp_compare(
    input: &HlpInput,
    phi: impl Fn(f64) -> f64,
    shape: Curvature,
) -> Result<ComparisonReport> {
    let at_zero = phi(0.0);
    if at_zero.is_nan() || at_zero.abs() > MASS_TOL {
        return Err(Error::InvalidHlpInput(format!(
            "φ(0) = {at_zero}, expected 0"
        )));
    }
    let sum_x: f64 = input.x.iter().map(|&t| phi(t)).sum();
    let sum_y: f64 = input.y.iter().map(|&t| phi(t)).sum();
    let holds = match shape {
        Curvature::Concave => sum_x >= sum_y - HLP_TOL,
        Curvature::Convex => sum_x <= sum_y + HLP_TOL,
    };
    Ok(ComparisonReport {
        sum_x,
        sum_y,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedCoverResult {
    pub value: EntropyValue,
    /// An optimal (vertex) division; absent iff the value is infinite.
    pub witness: Option<WeightedDivision>,
    pub explored: u64,
}

/// `H_w(μ; Q)`, the minimum weighted entropy over `V(μ; Q)`.
///
/// The weighted entropy of a CGEF functional is a concave (case 1) or, after
/// the decreasing outer map, reversed convex (case 2) function of the
/// division matrix, so its minimum over the product of per-atom simplices is
/// attained at a vertex. Vertices are the divisions that send each atom
/// wholly to one cover set; they are scanned in lexicographic order.
pub fn cover_entropy_weighted(
    e: &EntropyFunctional,
    mu: &Measure,
    q: &SetFamily,
    budget: u64,
) -> Result<WeightedCoverResult> {
    mu.space().ensure_same(&q.space())?;
    let Some(space) = ChoiceSpace::new(mu, q).filter(|_| is_mu_cover(q, mu)) else {
        return Ok(WeightedCoverResult {
            value: EntropyValue::Infinite,
            witness: None,
            explored: 0,
        });
    };
    let total = space.total();
    if total > budget as u128 {
        return Err(Error::BudgetExceeded(budget));
    }
    let n = mu.space().len();
    let mut digits = vec![0; space.atoms.len()];
    let mut row_masses = vec![0.0; q.len()];
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        row_masses.iter_mut().for_each(|m| *m = 0.0);
        for (k, &x) in space.atoms.iter().enumerate() {
            row_masses[space.options[k][digits[k]]] += mu.mass()[x];
        }
        let value = e.evaluate_unchecked(&row_masses);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, digits.clone()));
        }
        if !space.advance(&mut digits) {
            break;
        }
    }
    let (value, digits) = best.expect("at least one vertex");
    let choice = space.expand(n, &space.choice(&digits));
    Ok(WeightedCoverResult {
        value: EntropyValue::Finite(value),
        witness: Some(WeightedDivision::from_choice(mu, q, &choice)?),
        explored: total as u64,
    })
}

/// A random division: each positive-mass atom spreads its mass over the
/// cover sets containing it with flat-Dirichlet weights drawn from a
/// generator seeded by `seed`.
pub fn random_division(mu: &Measure, q: &SetFamily, seed: u64) -> Result<WeightedDivision> {
    mu.space().ensure_same(&q.space())?;
    if !is_mu_cover(q, mu) {
        return Err(Error::NotCover(uncovered_mass(q, mu)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = mu.space().len();
    let mut rows = vec![vec![0.0; n]; q.len()];
    for (x, &m) in mu.mass().iter().enumerate() {
        let options = q.containing(x);
        if m <= 0.0 || options.is_empty() {
            continue;
        }
        if let [only] = options[..] {
            rows[only][x] = m;
            continue;
        }
        let weights: Vec<f64> = options.iter().map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = weights.iter().sum();
        for (&i, w) in options.iter().zip(&weights) {
            rows[i][x] = m * w / total;
        }
    }
    WeightedDivision::new(mu, q, rows)
}
