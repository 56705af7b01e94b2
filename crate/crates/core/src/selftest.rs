//! Randomised self-test over the structural properties of the library.
//!
//! Every case draws from its own ChaCha stream keyed by (seed, property,
//! case), so reports are identical across runs and thread counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classical::{cover_entropy, partition_entropy, EntropyValue};
use crate::functional::{check_cgef, EntropyFunctional};
use crate::measure::{finer_than, is_mu_partition, Measure, SetFamily};
use crate::mixture::{verify_mixture_bounds, MixtureSpec};
use crate::random;
use crate::weighted::{
    cover_entropy_weighted, disjointify, hlp_compare, partition_to_division, random_division,
    weighted_entropy, Curvature, HlpInput,
};

pub const TOL: f64 = 1e-9;

type NamedMap = (&'static str, fn(f64) -> f64, Curvature);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Quick,
    Default,
}

struct Counts {
    equality_instances: u64,
    sandwich_instances: u64,
    sandwich_divisions: u64,
    disjointify_cases: u64,
    division_cases: u64,
    mixtures: u64,
    hlp_inputs: u64,
}

impl Scale {
    fn counts(self) -> Counts {
        match self {
            Scale::Default => Counts {
                equality_instances: 500,
                sandwich_instances: 100,
                sandwich_divisions: 1000,
                disjointify_cases: 10_000,
                division_cases: 10_000,
                mixtures: 200,
                hlp_inputs: 10_000,
            },
            Scale::Quick => Counts {
                equality_instances: 50,
                sandwich_instances: 10,
                sandwich_divisions: 100,
                disjointify_cases: 1_000,
                division_cases: 1_000,
                mixtures: 20,
                hlp_inputs: 1_000,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyOutcome {
    pub name: String,
    pub cases: u64,
    pub violations: u64,
    pub first_counterexample: Option<Value>,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelftestReport {
    pub scale: Scale,
    pub seed: u64,
    pub functionals: Vec<String>,
    pub properties: Vec<PropertyOutcome>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(PropertyOutcome::passed)
    }
}

/// Shannon, Rényi and Tsallis of orders 0.5 and 2.
pub fn builtin_functionals() -> Vec<EntropyFunctional> {
    let mut all = vec![EntropyFunctional::shannon()];
    for alpha in [0.5, 2.0] {
        all.push(EntropyFunctional::renyi(alpha).expect("valid order"));
        all.push(EntropyFunctional::tsallis(alpha).expect("valid order"));
    }
    all
}

fn case_rng(seed: u64, property: u64, case: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((property << 40) | case);
    rng
}

fn instance_json(mu: &Measure, q: &SetFamily) -> Value {
    json!({
        "n": mu.space().len(),
        "mu": mu.mass(),
        "cover": q.to_index_lists(),
    })
}

/// Runs `check` on `cases` independent cases; each returns a counterexample
/// or `None`.
fn property<F>(name: &str, cases: u64, check: F) -> PropertyOutcome
where
    F: Fn(u64) -> Option<Value> + Sync + Send,
{
    let failures: Vec<Option<Value>> = (0..cases).into_par_iter().map(check).collect();
    let violations = failures.iter().filter(|f| f.is_some()).count() as u64;
    PropertyOutcome {
        name: name.into(),
        cases,
        violations,
        first_counterexample: failures.into_iter().flatten().next(),
    }
}

fn value_json(v: EntropyValue) -> Value {
    match v {
        EntropyValue::Finite(x) => json!(x),
        EntropyValue::Infinite => json!("infinity"),
    }
}

pub fn run(
    scale: Scale,
    seed: u64,
    functionals: &[EntropyFunctional],
    budget: u64,
) -> SelftestReport {
    let counts = scale.counts();
    let fns = functionals;
    let pick = |case: u64| &fns[(case % fns.len() as u64) as usize];
    let mut properties = Vec::new();

    properties.push(property(
        "classical_equals_weighted",
        counts.equality_instances,
        |case| {
            let mut rng = case_rng(seed, 1, case);
            let n = rng.random_range(2..=8);
            let k = rng.random_range(2..=5);
            let inst = random::instance(&mut rng, n, k, 0.1);
            for e in fns {
                let outcome = (
                    cover_entropy(e, &inst.measure, &inst.cover, budget),
                    cover_entropy_weighted(e, &inst.measure, &inst.cover, budget),
                );
                let (Ok(c), Ok(w)) = outcome else {
                    return Some(
                        json!({"instance": instance_json(&inst.measure, &inst.cover),
                        "functional": e.name(), "error": "search failed"}),
                    );
                };
                if !c.value.agrees_with(&w.value, TOL) {
                    return Some(json!({
                        "instance": instance_json(&inst.measure, &inst.cover),
                        "functional": e.name(),
                        "classical": value_json(c.value),
                        "weighted": value_json(w.value),
                    }));
                }
            }
            None
        },
    ));

    properties.push(property(
        "weighted_lower_bound_sandwich",
        counts.sandwich_instances,
        |case| {
            let mut rng = case_rng(seed, 2, case);
            let n = rng.random_range(2..=8);
            let k = rng.random_range(2..=5);
            let inst = random::instance(&mut rng, n, k, 0.0);
            let e = pick(case);
            let Ok(EntropyValue::Finite(min)) =
                cover_entropy(e, &inst.measure, &inst.cover, budget).map(|r| r.value)
            else {
                return Some(
                    json!({"instance": instance_json(&inst.measure, &inst.cover),
                    "functional": e.name(), "error": "no finite classical value"}),
                );
            };
            for _ in 0..counts.sandwich_divisions {
                let d = random_division(&inst.measure, &inst.cover, rng.random())
                    .expect("instance covers its support");
                let w = weighted_entropy(e, &d);
                if w < min - TOL {
                    return Some(json!({
                        "instance": instance_json(&inst.measure, &inst.cover),
                        "functional": e.name(),
                        "division": d.rows(),
                        "weighted": w,
                        "classical": min,
                    }));
                }
            }
            None
        },
    ));

    properties.push(property(
        "disjointify_does_not_increase_entropy",
        counts.disjointify_cases,
        |case| {
            let mut rng = case_rng(seed, 3, case);
            let n = rng.random_range(1..=8);
            let k = rng.random_range(1..=5);
            let inst = random::instance(&mut rng, n, k, 0.0);
            let e = pick(case);
            let d = random_division(&inst.measure, &inst.cover, rng.random())
                .expect("instance covers its support");
            let w = weighted_entropy(e, &d);
            let p = disjointify(&d).expect("positive rows cover the support");
            let ok = is_mu_partition(&p, &inst.measure)
                && finer_than(&p, &inst.cover)
                && partition_entropy(e, &inst.measure, &p).is_ok_and(|h| h <= w + TOL);
            (!ok).then(|| {
                json!({
                    "instance": instance_json(&inst.measure, &inst.cover),
                    "functional": e.name(),
                    "division": d.rows(),
                    "partition": p.to_index_lists(),
                })
            })
        },
    ));

    properties.push(property(
        "partition_to_division_does_not_increase_entropy",
        counts.division_cases,
        |case| {
            let mut rng = case_rng(seed, 4, case);
            let n = rng.random_range(1..=8);
            let mu = random::measure(&mut rng, n, 0.15);
            let p = random::partition(&mut rng, n);
            let q = random::coarsening(&mut rng, &p);
            let e = pick(case);
            let d = partition_to_division(&mu, &p, &q).expect("p refines q");
            let h = partition_entropy(e, &mu, &p).expect("p is a partition");
            let w = weighted_entropy(e, &d);
            (w > h + TOL).then(|| {
                json!({
                    "instance": instance_json(&mu, &q),
                    "functional": e.name(),
                    "partition": p.to_index_lists(),
                    "weighted": w,
                    "partition_entropy": h,
                })
            })
        },
    ));

    properties.push(property(
        "tsallis_mixture_containment",
        counts.mixtures,
        |case| {
            let mut rng = case_rng(seed, 5, case);
            let n = rng.random_range(2..=6);
            let k = rng.random_range(2..=4);
            let components = rng.random_range(2..=3);
            let alpha = [0.5, 2.0, 3.0][rng.random_range(0..3)];
            let mut weights: Vec<f64> = (0..components)
                .map(|_| rng.random::<f64>() + 0.05)
                .collect();
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            let measures: Vec<Measure> = (0..components)
                .map(|_| random::measure(&mut rng, n, 0.3))
                .collect();
            let q = random::cover(&mut rng, n, k, true);
            let spec = MixtureSpec::new(weights.iter().copied().zip(measures.clone()).collect())
                .expect("weights are normalised");
            let e = EntropyFunctional::tsallis(alpha).expect("valid order");
            match verify_mixture_bounds(&e, &spec, &q, budget) {
                Ok(r) if r.contained => None,
                outcome => Some(json!({
                    "coefficients": weights,
                    "measures": measures.iter().map(|m| m.mass().to_vec()).collect::<Vec<_>>(),
                    "cover": q.to_index_lists(),
                    "alpha": alpha,
                    "report": outcome.ok().map(|r| json!({
                        "lower": value_json(r.lower),
                        "achieved": value_json(r.achieved),
                        "upper": value_json(r.upper),
                    })),
                })),
            }
        },
    ));

    let cgef_failures: Vec<Value> = fns
        .iter()
        .map(|e| check_cgef(e, 201, TOL))
        .filter(|r| !r.passed())
        .map(|r| serde_json::to_value(r).expect("report serialises"))
        .collect();
    properties.push(PropertyOutcome {
        name: "cgef_condition".into(),
        cases: fns.len() as u64,
        violations: cgef_failures.len() as u64,
        first_counterexample: cgef_failures.into_iter().next(),
    });

    properties.push(property("hlp_direction", counts.hlp_inputs, |case| {
        let mut rng = case_rng(seed, 7, case);
        let len = rng.random_range(1..=10);
        let input: HlpInput = random::hlp_input(&mut rng, len);
        let phis: [NamedMap; 3] = [
            (
                "-t log2 t",
                |t| if t > 0.0 { -t * t.log2() } else { 0.0 },
                Curvature::Concave,
            ),
            ("t^0.5", f64::sqrt, Curvature::Concave),
            ("t^2", |t| t * t, Curvature::Convex),
        ];
        for (name, phi, shape) in phis {
            let holds = hlp_compare(&input, phi, shape).is_ok_and(|r| r.holds);
            if !holds {
                return Some(json!({"x": input.x(), "y": input.y(), "phi": name}));
            }
        }
        None
    }));

    SelftestReport {
        scale,
        seed,
        functionals: fns.iter().map(|e| e.name().to_string()).collect(),
        properties,
    }
}
