//! Entropy of a mixture `μ = Σ a_k μ_k` against the entropies of its
//! components.
//!
//! For Tsallis entropy of order α and any cover Q:
//!
//! ```text
//! Σ a_k H(μ_k; Q)  ≤  H(μ; Q)  ≤  Σ a_k^α H(μ_k; Q) + (Σ a_k^α − 1)/(1 − α)
//! ```
//!
//! and for Shannon entropy the upper bound becomes
//! `Σ a_k H(μ_k; Q) − Σ a_k log2 a_k`. Both ends are attained: disjoint
//! point masses hit the upper bound, identical components the lower one.

use serde::Serialize;

use crate::classical::{cover_entropy, EntropyValue};
use crate::error::{Error, Result};
use crate::functional::{EntropyFunctional, Family};
use crate::measure::{Measure, SetFamily, MASS_TOL};
use crate::weighted::WeightedDivision;

/// Containment tolerance for [`MixtureBoundReport`].
pub const CONTAINMENT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct MixtureSpec {
    components: Vec<(f64, Measure)>,
}

fn check_coefficients(a: &[f64]) -> Result<()> {
    if a.is_empty() {
        return Err(Error::InvalidMixture("no components".into()));
    }
    if let Some(c) = a.iter().find(|c| !(**c >= 0.0 && **c <= 1.0)) {
        return Err(Error::InvalidMixture(format!(
            "coefficient {c} outside [0, 1]"
        )));
    }
    let total: f64 = a.iter().sum();
    if (total - 1.0).abs() > MASS_TOL {
        return Err(Error::InvalidMixture(format!(
            "coefficients sum to {total}"
        )));
    }
    Ok(())
}

impl MixtureSpec {
    pub fn new(components: Vec<(f64, Measure)>) -> Result<Self> {
        let coefficients: Vec<f64> = components.iter().map(|(a, _)| *a).collect();
        check_coefficients(&coefficients)?;
        let space = components[0].1.space();
        for (_, mu) in &components {
            space.ensure_same(&mu.space())?;
            if !mu.is_probability() {
                return Err(Error::InvalidMixture(
                    "components must be probability measures".into(),
                ));
            }
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, Measure)] {
        &self.components
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.components.iter().map(|(a, _)| *a).collect()
    }
}

/// The atomwise convex combination.
pub fn mix(spec: &MixtureSpec) -> Result<Measure> {
    let n = spec.components[0].1.space().len();
    let mut mass = vec![0.0; n];
    for (a, mu) in &spec.components {
        for (m, v) in mass.iter_mut().zip(mu.mass()) {
            *m += a * v;
        }
    }
    Measure::probability(mass)
}

/// `Σ a_k m^k`, a division of the mixture along the shared cover.
pub fn mix_division(
    spec: &MixtureSpec,
    divisions: &[WeightedDivision],
) -> Result<WeightedDivision> {
    if divisions.len() != spec.components.len() {
        return Err(Error::InvalidMixture(format!(
            "{} divisions for {} components",
            divisions.len(),
            spec.components.len()
        )));
    }
    let cover = divisions[0].cover();
    let n = cover.space().len();
    let mut rows = vec![vec![0.0; n]; cover.len()];
    for ((a, mu), d) in spec.components.iter().zip(divisions) {
        if d.cover() != cover {
            return Err(Error::InvalidMixture(
                "divisions use different covers".into(),
            ));
        }
        if d.measure().mass() != mu.mass() {
            return Err(Error::InvalidMixture(
                "division does not divide its component measure".into(),
            ));
        }
        for (row, drow) in rows.iter_mut().zip(d.rows()) {
            for (v, dv) in row.iter_mut().zip(drow) {
                *v += a * dv;
            }
        }
    }
    WeightedDivision::new(&mix(spec)?, cover, rows)
}

/// Components with a zero coefficient do not take part in the bounds.
fn active<'a>(
    entropies: &'a [EntropyValue],
    a: &'a [f64],
) -> Result<impl Iterator<Item = (f64, EntropyValue)> + 'a> {
    if entropies.len() != a.len() {
        return Err(Error::InvalidMixture(format!(
            "{} entropies for {} coefficients",
            entropies.len(),
            a.len()
        )));
    }
    check_coefficients(a)?;
    Ok(a.iter()
        .copied()
        .zip(entropies.iter().copied())
        .filter(|(c, _)| *c > 0.0))
}

/// Lower and upper Tsallis bounds of order `alpha` for the mixture entropy.
/// Any infinite component entropy makes both bounds infinite.
pub fn tsallis_mixture_bounds(
    entropies: &[EntropyValue],
    a: &[f64],
    alpha: f64,
) -> Result<(EntropyValue, EntropyValue)> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha != 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    let (mut lower, mut upper, mut power_sum) = (0.0, 0.0, 0.0);
    for (c, h) in active(entropies, a)? {
        let Some(h) = h.finite() else {
            return Ok((EntropyValue::Infinite, EntropyValue::Infinite));
        };
        let ca = c.powf(alpha);
        lower += c * h;
        upper += ca * h;
        power_sum += ca;
    }
    upper += (power_sum - 1.0) / (1.0 - alpha);
    Ok((EntropyValue::Finite(lower), EntropyValue::Finite(upper)))
}

/// Shannon bounds: `Σ a_k H_k` and that plus the coefficient entropy
/// `−Σ a_k log2 a_k` (with `0 log 0 = 0`).
pub fn shannon_mixture_bounds(
    entropies: &[EntropyValue],
    a: &[f64],
) -> Result<(EntropyValue, EntropyValue)> {
    let (mut lower, mut mixing) = (0.0, 0.0);
    for (c, h) in active(entropies, a)? {
        let Some(h) = h.finite() else {
            return Ok((EntropyValue::Infinite, EntropyValue::Infinite));
        };
        lower += c * h;
        mixing -= c * c.log2();
    }
    Ok((
        EntropyValue::Finite(lower),
        EntropyValue::Finite(lower + mixing),
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixtureBoundReport {
    pub lower: EntropyValue,
    pub upper: EntropyValue,
    pub achieved: EntropyValue,
    pub component_entropies: Vec<EntropyValue>,
    pub alpha: Option<f64>,
    /// `lower − tol ≤ achieved ≤ upper + tol`, vacuous when anything is
    /// infinite.
    pub contained: bool,
}

/// Computes every cover entropy exactly and checks the matching bounds.
/// Only Shannon and Tsallis functionals have bounds.
pub fn verify_mixture_bounds(
    e: &EntropyFunctional,
    spec: &MixtureSpec,
    q: &SetFamily,
    budget: u64,
) -> Result<MixtureBoundReport> {
    let a = spec.coefficients();
    let component_entropies = spec
        .components
        .iter()
        .map(|(_, mu)| cover_entropy(e, mu, q, budget).map(|r| r.value))
        .collect::<Result<Vec<_>>>()?;
    let (lower, upper) = match e.family() {
        Family::Shannon => shannon_mixture_bounds(&component_entropies, &a)?,
        Family::Tsallis(alpha) => tsallis_mixture_bounds(&component_entropies, &a, alpha)?,
        Family::Renyi(_) | Family::Custom => return Err(Error::Unsupported(e.name().into())),
    };
    let achieved = cover_entropy(e, &mix(spec)?, q, budget)?.value;
    let contained = match (lower, achieved, upper) {
        (EntropyValue::Finite(l), EntropyValue::Finite(h), EntropyValue::Finite(u)) => {
            l - CONTAINMENT_TOL <= h && h <= u + CONTAINMENT_TOL
        }
        _ => true,
    };
    Ok(MixtureBoundReport {
        lower,
        upper,
        achieved,
        component_entropies,
        alpha: e.alpha(),
        contained,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BridgeRow {
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    /// Distance to the Shannon lower bound `a1 x + a2 y`.
    pub lower_deviation: f64,
    /// Distance to the Shannon upper bound `a1 x + a2 y − Σ a_i log2 a_i`.
    pub upper_deviation: f64,
    /// Distance to the actual limit of the Tsallis upper bound,
    /// `a1 x + a2 y − Σ a_i ln a_i`.
    pub upper_deviation_from_limit: f64,
}

/// Two-component Tsallis bounds `l_α`, `u_α` along a sequence of orders,
/// compared with the Shannon bounds they are expected to approach.
pub fn limit_bridge(a: [f64; 2], h: [f64; 2], alphas: &[f64]) -> Result<Vec<BridgeRow>> {
    let entropies = h.map(EntropyValue::Finite);
    let (shannon_lower, shannon_upper) = shannon_mixture_bounds(&entropies, &a)?;
    let (shannon_lower, shannon_upper) = (
        shannon_lower.finite().expect("finite inputs"),
        shannon_upper.finite().expect("finite inputs"),
    );
    let natural_mixing: f64 = a.iter().filter(|c| **c > 0.0).map(|c| -c * c.ln()).sum();
    let limit = shannon_lower + natural_mixing;
    alphas
        .iter()
        .map(|&alpha| {
            let (l, u) = tsallis_mixture_bounds(&entropies, &a, alpha)?;
            let (l, u) = (l.finite().expect("finite"), u.finite().expect("finite"));
            Ok(BridgeRow {
                alpha,
                lower: l,
                upper: u,
                lower_deviation: (l - shannon_lower).abs(),
                upper_deviation: (u - shannon_upper).abs(),
                upper_deviation_from_limit: (u - limit).abs(),
            })
        })
        .collect()
}
