//! Seeded generators for random instances, used by the self-test and the
//! property suites.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::measure::{DiscreteSpace, Instance, Measure, SetFamily};
use crate::weighted::HlpInput;

/// A random probability vector on `n` atoms. Each atom is null with
/// probability `null_rate`, but at least one atom keeps positive mass.
pub fn measure<R: Rng + ?Sized>(rng: &mut R, n: usize, null_rate: f64) -> Measure {
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(null_rate) {
                0.0
            } else {
                Exp1.sample(rng)
            }
        })
        .collect();
    if w.iter().all(|&v| v == 0.0) {
        w[rng.random_range(0..n)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    Measure::probability(w.into_iter().map(|v| v / total).collect())
        .expect("normalised weights form a probability vector")
}

/// `k` random subsets of `0..n`. With `covering`, every atom is added to at
/// least one set.
pub fn cover<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, covering: bool) -> SetFamily {
    let mut sets: Vec<Vec<usize>> = (0..k)
        .map(|_| (0..n).filter(|_| rng.random_bool(0.4)).collect())
        .collect();
    if covering && k > 0 {
        for x in 0..n {
            if !sets.iter().any(|s| s.contains(&x)) {
                sets[rng.random_range(0..k)].push(x);
            }
        }
    }
    SetFamily::from_indices(DiscreteSpace::new(n).expect("n ≥ 1"), &sets)
        .expect("atoms are in range")
}

/// A random instance with `n` atoms and `k` cover sets; the cover misses
/// part of the support with probability `miss_rate`.
pub fn instance<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize, miss_rate: f64) -> Instance {
    let measure = measure(rng, n, 0.15);
    let covering = !rng.random_bool(miss_rate);
    Instance {
        measure,
        cover: cover(rng, n, k, covering),
    }
}

/// A random partition of all atoms into at most `n` nonempty blocks.
pub fn partition<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SetFamily {
    let blocks = rng.random_range(1..=n);
    let mut sets = vec![Vec::new(); blocks];
    for x in 0..n {
        sets[rng.random_range(0..blocks)].push(x);
    }
    sets.retain(|s| !s.is_empty());
    SetFamily::from_indices(DiscreteSpace::new(n).expect("n ≥ 1"), &sets)
        .expect("atoms are in range")
}

/// A random cover that `p` refines: every block is enlarged by random atoms,
/// a few unrelated sets are added and the order is shuffled.
pub fn coarsening<R: Rng + ?Sized>(rng: &mut R, p: &SetFamily) -> SetFamily {
    let n = p.space().len();
    let mut sets: Vec<Vec<usize>> = p
        .sets()
        .iter()
        .map(|b| {
            let mut s = b.to_vec();
            s.extend((0..n).filter(|_| rng.random_bool(0.25)));
            s
        })
        .collect();
    for _ in 0..rng.random_range(0..=2) {
        sets.push((0..n).filter(|_| rng.random_bool(0.4)).collect());
    }
    sets.shuffle(rng);
    SetFamily::from_indices(p.space(), &sets).expect("atoms are in range")
}

/// A random refinement of `p`: every block is split into random pieces.
pub fn refinement<R: Rng + ?Sized>(rng: &mut R, p: &SetFamily) -> SetFamily {
    let mut sets = Vec::new();
    for block in p.sets() {
        let members = block.to_vec();
        if members.is_empty() {
            continue;
        }
        let pieces = rng.random_range(1..=members.len());
        let mut split = vec![Vec::new(); pieces];
        for x in members {
            split[rng.random_range(0..pieces)].push(x);
        }
        sets.extend(split.into_iter().filter(|s| !s.is_empty()));
    }
    SetFamily::from_indices(p.space(), &sets).expect("atoms are in range")
}

/// A random valid [`HlpInput`] of length `len`: `x` is a sorted probability
/// vector and `y` is obtained from it by transfers from later to earlier
/// positions, which can only raise prefix sums.
pub fn hlp_input<R: Rng + ?Sized>(rng: &mut R, len: usize) -> HlpInput {
    let mut x: Vec<f64> = (0..len).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    x.sort_by(|a, b| b.total_cmp(a));
    let mut y = x.clone();
    if len >= 2 {
        for _ in 0..rng.random_range(0..=2 * len) {
            let from = rng.random_range(1..len);
            let to = rng.random_range(0..from);
            let amount = y[from] * rng.random::<f64>();
            y[from] -= amount;
            y[to] += amount;
        }
    }
    // restore the exact total lost to rounding
    let drift: f64 = x.iter().sum::<f64>() - y.iter().sum::<f64>();
    y[0] = (y[0] + drift).max(0.0);
    HlpInput::new(x, y).expect("transfers preserve prefix dominance")
}
