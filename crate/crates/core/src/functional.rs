//! Entropy functionals of the form `h(p) = f(Σ g(p_i))`.
//!
//! A functional is admissible when it satisfies one of the two structural
//! cases below; every comparison between partitions and weighted divisions in
//! this crate relies on it.
//!
//! | case | outer `f` | inner `g` |
//! |------|-----------|-----------|
//! | [`CgefCase::IncreasingSubadditiveConcave`] | increasing | subadditive, concave |
//! | [`CgefCase::DecreasingSuperadditiveConvex`] | decreasing | superadditive, convex |
//!
//! Built-ins: Shannon (`f(s) = -s`, `g(t) = t log2 t`), Rényi of order α
//! (`f(s) = log2(s)/(1-α)`, `g(t) = t^α`) and Tsallis of order α
//! (`f(s) = (s-1)/(1-α)`, `g(t) = t^α`). All use `g(0) = 0`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::MASS_TOL;

pub type ScalarMap = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CgefCase {
    IncreasingSubadditiveConcave,
    DecreasingSuperadditiveConvex,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    Shannon,
    Renyi(f64),
    Tsallis(f64),
    Custom,
}

#[derive(Clone)]
pub struct EntropyFunctional {
    name: String,
    family: Family,
    outer: ScalarMap,
    inner: ScalarMap,
    case: CgefCase,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0 && alpha != 1.0) {
        return Err(Error::InvalidAlpha(alpha));
    }
    Ok(())
}

fn power_case(alpha: f64) -> CgefCase {
    if alpha < 1.0 {
        CgefCase::IncreasingSubadditiveConcave
    } else {
        CgefCase::DecreasingSuperadditiveConvex
    }
}

fn power(alpha: f64) -> ScalarMap {
    Arc::new(move |t: f64| if t <= 0.0 { 0.0 } else { t.powf(alpha) })
}

impl EntropyFunctional {
    pub fn shannon() -> Self {
        Self {
            name: "shannon".into(),
            family: Family::Shannon,
            outer: Arc::new(|s| -s),
            inner: Arc::new(|t: f64| if t <= 0.0 { 0.0 } else { t * t.log2() }),
            case: CgefCase::DecreasingSuperadditiveConvex,
        }
    }

    pub fn renyi(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            name: format!("renyi:{alpha}"),
            family: Family::Renyi(alpha),
            outer: Arc::new(move |s: f64| s.log2() / (1.0 - alpha)),
            inner: power(alpha),
            case: power_case(alpha),
        })
    }

    pub fn tsallis(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            name: format!("tsallis:{alpha}"),
            family: Family::Tsallis(alpha),
            outer: Arc::new(move |s: f64| (s - 1.0) / (1.0 - alpha)),
            inner: power(alpha),
            case: power_case(alpha),
        })
    }

    /// A user-supplied functional. The declared case is trusted by the
    /// search routines; run [`check_cgef`] to validate it.
    pub fn custom(
        name: impl Into<String>,
        outer: impl Fn(f64) -> f64 + Send + Sync + 'static,
        inner: impl Fn(f64) -> f64 + Send + Sync + 'static,
        case: CgefCase,
    ) -> Self {
        Self {
            name: name.into(),
            family: Family::Custom,
            outer: Arc::new(outer),
            inner: Arc::new(inner),
            case,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.family {
            Family::Renyi(a) | Family::Tsallis(a) => Some(a),
            Family::Shannon | Family::Custom => None,
        }
    }

    pub fn cgef_case(&self) -> CgefCase {
        self.case
    }

    pub fn outer(&self, s: f64) -> f64 {
        (self.outer)(s)
    }

    pub fn inner(&self, t: f64) -> f64 {
        (self.inner)(t)
    }

    /// Σ g(t) over the strictly positive masses.
    pub fn inner_sum(&self, masses: &[f64]) -> f64 {
        masses
            .iter()
            .filter(|&&t| t > 0.0)
            .map(|&t| self.inner(t))
            .sum()
    }

    /// `f(Σ g(t))`; zero masses are skipped.
    pub fn evaluate(&self, masses: &[f64]) -> Result<f64> {
        if let Some(&bad) = masses
            .iter()
            .find(|t| !(**t >= 0.0 && **t <= 1.0 + MASS_TOL))
        {
            return Err(Error::MassOutOfRange(bad));
        }
        let total: f64 = masses.iter().sum();
        if total > 1.0 + MASS_TOL {
            return Err(Error::MassOutOfRange(total));
        }
        Ok(self.evaluate_unchecked(masses))
    }

    pub(crate) fn evaluate_unchecked(&self, masses: &[f64]) -> f64 {
        self.outer(self.inner_sum(masses))
    }
}

impl fmt::Debug for EntropyFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EntropyFunctional")
            .field("name", &self.name)
            .field("family", &self.family)
            .field("case", &self.case)
            .finish()
    }
}

impl FromStr for EntropyFunctional {
    type Err = Error;

    /// Parses `shannon`, `renyi:ALPHA` or `tsallis:ALPHA`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "shannon" {
            return Ok(Self::shannon());
        }
        let (kind, alpha) = s
            .split_once(':')
            .ok_or_else(|| Error::UnknownFunctional(s.into()))?;
        let alpha: f64 = alpha
            .trim()
            .parse()
            .map_err(|_| Error::UnknownFunctional(s.into()))?;
        match kind {
            "renyi" => Self::renyi(alpha),
            "tsallis" => Self::tsallis(alpha),
            _ => Err(Error::UnknownFunctional(s.into())),
        }
    }
}

/// Outcome of a numerical CGEF check; each field is the largest violation
/// found (0 when none).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CgefReport {
    pub functional: String,
    pub case: CgefCase,
    pub outer_monotone: bool,
    pub inner_additivity: bool,
    pub inner_curvature: bool,
    pub worst_monotonicity: f64,
    pub worst_additivity: f64,
    pub worst_curvature: f64,
}

impl CgefReport {
    pub fn passed(&self) -> bool {
        self.outer_monotone && self.inner_additivity && self.inner_curvature
    }
}

/// Checks the declared CGEF case of `e` on an evenly spaced grid of
/// `grid_size` points in `[0, 1]`.
///
/// `f` is sampled over the span of `k·g(1/k)` for `k = 1..grid_size`, which
/// contains every value of `Σ g` reachable on probability vectors with at
/// most `grid_size - 1` atoms.
pub fn check_cgef(e: &EntropyFunctional, grid_size: usize, tol: f64) -> CgefReport {
    let n = grid_size.max(3);
    let step = 1.0 / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    let g: Vec<f64> = grid.iter().map(|&t| e.inner(t)).collect();
    let increasing = e.case == CgefCase::IncreasingSubadditiveConcave;

    let reachable: Vec<f64> = (1..n).map(|k| k as f64 * e.inner(1.0 / k as f64)).collect();
    let lo = reachable.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = reachable.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let worst_monotonicity = span
        .windows(2)
        .map(|w| {
            let delta = e.outer(w[1]) - e.outer(w[0]);
            if increasing {
                -delta
            } else {
                delta
            }
        })
        .fold(0.0_f64, f64::max);

    let mut worst_additivity = 0.0_f64;
    for i in 0..n {
        for j in 0..n - i {
            // g(s + t) against g(s) + g(t)
            let excess = g[i + j] - g[i] - g[j];
            let violation = if increasing { excess } else { -excess };
            worst_additivity = worst_additivity.max(violation);
        }
    }

    let worst_curvature = g
        .windows(3)
        .map(|w| {
            let second = w[0] + w[2] - 2.0 * w[1];
            if increasing {
                second
            } else {
                -second
            }
        })
        .fold(0.0_f64, f64::max);

    CgefReport {
        functional: e.name.clone(),
        case: e.case,
        outer_monotone: worst_monotonicity <= tol,
        inner_additivity: worst_additivity <= tol,
        inner_curvature: worst_curvature <= tol,
        worst_monotonicity,
        worst_additivity,
        worst_curvature,
    }
}
