//! Classical and weighted entropies of covers over finite probability spaces.
//!
//! The classical entropy of a cover `Q` is the smallest entropy of a
//! partition finer than `Q`; the weighted entropy is the smallest entropy of
//! a division of the measure into submeasures supported inside the sets of
//! `Q`. For every functional of the form `f(Σ g(p_i))` satisfying the CGEF
//! condition (Shannon, Rényi and Tsallis among them) the two agree, and the
//! weighted form yields sharp bounds on the entropy of a mixture of measures.
//!
//! ```
//! use weighted_entropy::{cover_entropy, cover_entropy_weighted, EntropyFunctional, Measure, SetFamily};
//!
//! let mu = Measure::uniform(3).unwrap();
//! let q = SetFamily::from_indices(mu.space(), &[vec![0, 1], vec![1, 2]]).unwrap();
//! let e = EntropyFunctional::shannon();
//! let classical = cover_entropy(&e, &mu, &q, 1_000).unwrap();
//! let weighted = cover_entropy_weighted(&e, &mu, &q, 1_000).unwrap();
//! assert!(classical.value.agrees_with(&weighted.value, 1e-12));
//! ```

pub mod classical;
pub mod cli;
pub mod error;
pub mod functional;
pub mod measure;
pub mod mixture;
pub mod random;
mod search;
pub mod selftest;
pub mod weighted;

pub use classical::{
    assignment_to_partition, cover_entropy, cover_entropy_with, enumerate_acceptable_partitions,
    partition_entropy, Assignment, CoverEntropyResult, EntropyValue, Strategy, DEFAULT_BUDGET,
};
pub use error::{Error, Result};
pub use functional::{check_cgef, CgefCase, CgefReport, EntropyFunctional, Family};
pub use measure::{
    finer_than, is_mu_cover, is_mu_partition, restrict, AtomSet, DiscreteSpace, Instance, Measure,
    SetFamily, MASS_TOL,
};
pub use mixture::{
    limit_bridge, mix, mix_division, shannon_mixture_bounds, tsallis_mixture_bounds,
    verify_mixture_bounds, BridgeRow, MixtureBoundReport, MixtureSpec,
};
pub use weighted::{
    cover_entropy_weighted, disjointify, disjointify_steps, hlp_compare, partition_to_division,
    random_division, weighted_entropy, ComparisonReport, Curvature, HlpInput, WeightedCoverResult,
    WeightedDivision,
};
