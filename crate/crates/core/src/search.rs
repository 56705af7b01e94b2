//! Search over atom-to-cover-set assignments.
//!
//! Every positive-mass atom picks one cover set containing it. Choice vectors
//! are ordered lexicographically with the lowest atom most significant, which
//! coincides with the mixed-radix index order used to split the space across
//! worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::functional::{CgefCase, EntropyFunctional};
use crate::measure::{Measure, SetFamily, MASS_TOL};

/// Leaves per parallel chunk; below this the search stays on one thread.
const CHUNK: u128 = 1 << 12;

/// Per-atom choice lists for one (measure, cover) pair.
#[derive(Clone, Debug)]
pub(crate) struct ChoiceSpace {
    /// Positive-mass atoms that some cover set contains, ascending.
    pub atoms: Vec<usize>,
    pub masses: Vec<f64>,
    /// Cover indices containing each atom, ascending.
    pub options: Vec<Vec<usize>>,
    pub cover_len: usize,
}

impl ChoiceSpace {
    /// `None` when the cover misses more than [`MASS_TOL`] of the mass.
    pub fn new(mu: &Measure, cover: &SetFamily) -> Option<Self> {
        let mut atoms = Vec::new();
        let mut masses = Vec::new();
        let mut options = Vec::new();
        let mut uncovered = 0.0;
        for x in mu.space().atoms() {
            let m = mu.mass()[x];
            if m <= 0.0 {
                continue;
            }
            let opts = cover.containing(x);
            if opts.is_empty() {
                uncovered += m;
                continue;
            }
            atoms.push(x);
            masses.push(m);
            options.push(opts);
        }
        if uncovered > MASS_TOL {
            return None;
        }
        Some(Self {
            atoms,
            masses,
            options,
            cover_len: cover.len(),
        })
    }

    /// Number of complete assignments.
    pub fn total(&self) -> u128 {
        self.options
            .iter()
            .map(|o| o.len() as u128)
            .try_fold(1u128, |acc, k| acc.checked_mul(k))
            .unwrap_or(u128::MAX)
    }

    /// Decodes a mixed-radix index into per-atom option positions.
    fn digits(&self, mut index: u128) -> Vec<usize> {
        let mut digits = vec![0; self.atoms.len()];
        for (d, opts) in digits.iter_mut().zip(&self.options).rev() {
            let k = opts.len() as u128;
            *d = (index % k) as usize;
            index /= k;
        }
        digits
    }

    /// Advances `digits` to the next choice vector; false on wrap-around.
    pub fn advance(&self, digits: &mut [usize]) -> bool {
        for (d, opts) in digits.iter_mut().zip(&self.options).rev() {
            *d += 1;
            if *d < opts.len() {
                return true;
            }
            *d = 0;
        }
        false
    }

    /// Cover index chosen by each atom for the given option positions.
    pub fn choice(&self, digits: &[usize]) -> Vec<usize> {
        digits
            .iter()
            .zip(&self.options)
            .map(|(&d, opts)| opts[d])
            .collect()
    }

    /// Mass collected by each cover set under `digits`.
    pub fn block_masses(&self, digits: &[usize], out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.cover_len, 0.0);
        for ((&d, opts), &m) in digits.iter().zip(&self.options).zip(&self.masses) {
            out[opts[d]] += m;
        }
    }

    /// Full-length choice vector (`None` for unassigned atoms).
    pub fn expand(&self, n: usize, choice: &[usize]) -> Vec<Option<usize>> {
        let mut full = vec![None; n];
        for (&x, &c) in self.atoms.iter().zip(choice) {
            full[x] = Some(c);
        }
        full
    }
}

/// Entropy of the partition induced by block masses. Masses are sorted first
/// so the value depends on the partition alone, not on block labels.
pub(crate) fn induced_entropy(e: &EntropyFunctional, blocks: &mut [f64]) -> f64 {
    blocks.sort_by(f64::total_cmp);
    e.evaluate_unchecked(blocks)
}

#[derive(Clone, Debug)]
pub(crate) struct Best {
    pub value: f64,
    /// Cover index per atom of the choice space.
    pub choice: Vec<usize>,
    pub explored: u64,
}

fn scan(e: &EntropyFunctional, space: &ChoiceSpace, start: u128, end: u128) -> Option<(f64, u128)> {
    let mut digits = space.digits(start);
    let mut blocks = Vec::with_capacity(space.cover_len);
    let mut best: Option<(f64, u128)> = None;
    let mut index = start;
    while index < end {
        space.block_masses(&digits, &mut blocks);
        let value = induced_entropy(e, &mut blocks);
        if best.is_none_or(|(b, _)| value < b) {
            best = Some((value, index));
        }
        index += 1;
        if !space.advance(&mut digits) {
            break;
        }
    }
    best
}

/// Exhaustive minimum over all assignments; ties go to the smallest index.
/// The result does not depend on the number of worker threads.
pub(crate) fn exhaustive(e: &EntropyFunctional, space: &ChoiceSpace) -> Best {
    let total = space.total();
    let chunks = total.div_ceil(CHUNK);
    let best = if chunks <= 1 {
        scan(e, space, 0, total)
    } else {
        (0..chunks as u64)
            .into_par_iter()
            .map(|c| {
                let start = c as u128 * CHUNK;
                scan(e, space, start, (start + CHUNK).min(total))
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .reduce(|a, b| if b.0 < a.0 { b } else { a })
    };
    // A choice space always has at least the empty assignment.
    let (value, index) = best.expect("nonempty assignment space");
    Best {
        value,
        choice: space.choice(&space.digits(index)),
        explored: total.min(u64::MAX as u128) as u64,
    }
}

struct BranchAndBound<'a> {
    e: &'a EntropyFunctional,
    space: &'a ChoiceSpace,
    blocks: Vec<f64>,
    digits: Vec<usize>,
    suffix_mass: Vec<f64>,
    best: Option<(f64, Vec<usize>)>,
    explored: u64,
    budget: u64,
}

impl BranchAndBound<'_> {
    /// Optimistic value for any completion of the current partial
    /// assignment: the remaining mass is sent to a single block, which is the
    /// extreme point of the relaxed (unconstrained) completion simplex.
    fn bound(&self, depth: usize) -> f64 {
        let rest = self.suffix_mass[depth];
        let partial: f64 = self.e.inner_sum(&self.blocks);
        if rest <= 0.0 {
            return self.e.outer(partial);
        }
        let g = |t: f64| if t > 0.0 { self.e.inner(t) } else { 0.0 };
        let candidates = self
            .blocks
            .iter()
            .map(|&c| partial - g(c) + g(c + rest))
            .chain(std::iter::once(partial + g(rest)));
        let extreme = match self.e.cgef_case() {
            CgefCase::IncreasingSubadditiveConcave => candidates.fold(f64::INFINITY, f64::min),
            CgefCase::DecreasingSuperadditiveConvex => candidates.fold(f64::NEG_INFINITY, f64::max),
        };
        self.e.outer(extreme)
    }

    fn visit(&mut self, depth: usize) -> Result<()> {
        self.explored += 1;
        if self.explored > self.budget {
            return Err(Error::BudgetExceeded(self.budget));
        }
        if depth == self.space.atoms.len() {
            let mut blocks = self.blocks.clone();
            let value = induced_entropy(self.e, &mut blocks);
            if self.best.as_ref().is_none_or(|(b, _)| value < *b) {
                self.best = Some((value, self.digits.clone()));
            }
            return Ok(());
        }
        if let Some((best, _)) = &self.best {
            let slack = 1e-12 * (1.0 + best.abs());
            if self.bound(depth) > best + slack {
                return Ok(());
            }
        }
        let mass = self.space.masses[depth];
        for d in 0..self.space.options[depth].len() {
            let block = self.space.options[depth][d];
            self.digits[depth] = d;
            // restore exactly: subtracting would leave rounding residue
            let previous = self.blocks[block];
            self.blocks[block] = previous + mass;
            let outcome = self.visit(depth + 1);
            self.blocks[block] = previous;
            outcome?;
        }
        self.digits[depth] = 0;
        Ok(())
    }
}

/// Depth-first branch and bound in lexicographic order. Fails with
/// [`Error::BudgetExceeded`] once more than `budget` nodes are visited.
pub(crate) fn branch_and_bound(
    e: &EntropyFunctional,
    space: &ChoiceSpace,
    budget: u64,
) -> Result<Best> {
    let mut suffix_mass = vec![0.0; space.atoms.len() + 1];
    for i in (0..space.atoms.len()).rev() {
        suffix_mass[i] = suffix_mass[i + 1] + space.masses[i];
    }
    let mut bb = BranchAndBound {
        e,
        space,
        blocks: vec![0.0; space.cover_len],
        digits: vec![0; space.atoms.len()],
        suffix_mass,
        best: None,
        explored: 0,
        budget,
    };
    bb.visit(0)?;
    let (value, digits) = bb.best.expect("search reaches at least one leaf");
    Ok(Best {
        value,
        choice: space.choice(&digits),
        explored: bb.explored,
    })
}
