//! Command-line front end. Every command produces one JSON report with a
//! stable field order and 17 significant digits per float.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::classical::{cover_entropy, partition_entropy, EntropyValue, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::functional::EntropyFunctional;
use crate::measure::{is_mu_cover, DiscreteSpace, Instance, Measure, SetFamily};
use crate::mixture::{verify_mixture_bounds, MixtureSpec};
use crate::selftest::{self, Scale};
use crate::weighted::{
    cover_entropy_weighted, disjointify_steps, hlp_compare, random_division, weighted_entropy,
    Curvature, HlpInput, WeightedDivision,
};

#[derive(Debug, Parser)]
#[command(
    name = "wentropy",
    version,
    about = "Classical and weighted cover entropies"
)]
pub struct Cli {
    /// Maximum number of candidate partitions or search nodes.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy of a partition given as index lists.
    Partition {
        instance: PathBuf,
        #[arg(long, default_value = "shannon")]
        functional: String,
        /// JSON index lists, e.g. '[[0],[1,2]]'.
        #[arg(long)]
        blocks: String,
    },
    /// Classical and/or weighted entropy of the instance cover.
    Cover {
        instance: PathBuf,
        #[arg(long, default_value = "shannon")]
        functional: String,
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
        /// Random divisions drawn for the lower-bound check.
        #[arg(long, default_value_t = 1000)]
        samples: u64,
    },
    /// Mixture entropy against its bounds.
    Mixture { file: PathBuf },
    /// Majorization comparison of two sequences.
    Hlp { file: PathBuf },
    /// Partition obtained from a division, with both entropies.
    Disjointify {
        instance: PathBuf,
        division: PathBuf,
        #[arg(long, default_value = "shannon")]
        functional: String,
    },
    /// Randomised property checks with a fixed seed.
    Selftest {
        #[arg(long, value_enum, default_value_t = Scale::Default)]
        scale: Scale,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Weighted,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Infinite,
    BudgetExceeded,
    InvalidInput,
    /// A checked inequality or equality did not hold.
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Failed => 1,
            Status::InvalidInput => 2,
            Status::Infinite => 3,
            Status::BudgetExceeded => 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub digest: String,
    pub status: Status,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

impl RunReport {
    /// Compact JSON with every float written as `d.dddddddddddddddde±x`.
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter);
        self.serialize(&mut ser).expect("report serialises");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }
}

struct CanonicalFormatter;

impl serde_json::ser::Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

fn sha256(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p);
    }
    hex::encode(h.finalize())
}

fn entropy_json(v: EntropyValue) -> Value {
    serde_json::to_value(v).expect("entropy serialises")
}

/// Builds the report for `cli`, running on a dedicated pool when
/// `--threads` is given.
pub fn execute(cli: &Cli) -> RunReport {
    match cli.threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| dispatch(cli)),
            Err(e) => RunReport {
                command: command_name(&cli.command).into(),
                digest: String::new(),
                status: Status::InvalidInput,
                results: Value::Null,
                diagnostic: Some(format!("cannot start {k} threads: {e}")),
            },
        },
        None => dispatch(cli),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Partition { .. } => "partition",
        Command::Cover { .. } => "cover",
        Command::Mixture { .. } => "mixture",
        Command::Hlp { .. } => "hlp",
        Command::Disjointify { .. } => "disjointify",
        Command::Selftest { .. } => "selftest",
    }
}

struct Input {
    digest: String,
    texts: Vec<String>,
}

fn read_inputs(paths: &[&Path]) -> Result<Input> {
    let mut texts = Vec::new();
    for p in paths {
        texts.push(fs::read_to_string(p)?);
    }
    let bytes: Vec<&[u8]> = texts.iter().map(|t| t.as_bytes()).collect();
    Ok(Input {
        digest: sha256(&bytes),
        texts,
    })
}

fn dispatch(cli: &Cli) -> RunReport {
    let command = command_name(&cli.command).to_string();
    let (digest, outcome) = match &cli.command {
        Command::Selftest { scale } => {
            let digest = sha256(&[format!("selftest/{scale:?}/{}", cli.seed).as_bytes()]);
            (digest, Ok(run_selftest(cli, *scale)))
        }
        other => {
            let paths: Vec<&Path> = match other {
                Command::Partition { instance, .. } | Command::Cover { instance, .. } => {
                    vec![instance]
                }
                Command::Mixture { file } | Command::Hlp { file } => vec![file],
                Command::Disjointify {
                    instance, division, ..
                } => vec![instance, division],
                Command::Selftest { .. } => unreachable!(),
            };
            match read_inputs(&paths) {
                Ok(input) => {
                    let outcome = match other {
                        Command::Partition {
                            functional, blocks, ..
                        } => run_partition(&input.texts[0], functional, blocks),
                        Command::Cover {
                            functional,
                            mode,
                            samples,
                            ..
                        } => run_cover(cli, &input.texts[0], functional, *mode, *samples),
                        Command::Mixture { .. } => run_mixture(cli, &input.texts[0]),
                        Command::Hlp { .. } => run_hlp(&input.texts[0]),
                        Command::Disjointify { functional, .. } => {
                            run_disjointify(cli, &input.texts[0], &input.texts[1], functional)
                        }
                        Command::Selftest { .. } => unreachable!(),
                    };
                    (input.digest, outcome)
                }
                Err(e) => (String::new(), Err(e)),
            }
        }
    };
    match outcome {
        Ok((status, results)) => RunReport {
            command,
            digest,
            status,
            results,
            diagnostic: None,
        },
        Err(e) => RunReport {
            command,
            digest,
            status: match e {
                Error::BudgetExceeded(_) | Error::TooManyAssignments(..) => Status::BudgetExceeded,
                _ => Status::InvalidInput,
            },
            results: Value::Null,
            diagnostic: Some(e.to_string()),
        },
    }
}

type Outcome = Result<(Status, Value)>;

fn parse_blocks(space: DiscreteSpace, text: &str) -> Result<SetFamily> {
    let lists: Vec<Vec<usize>> = serde_json::from_str(text)?;
    SetFamily::from_indices(space, &lists)
}

fn run_partition(instance: &str, functional: &str, blocks: &str) -> Outcome {
    let inst = Instance::from_json(instance)?;
    let e: EntropyFunctional = functional.parse()?;
    let p = parse_blocks(inst.measure.space(), blocks)?;
    let h = partition_entropy(&e, &inst.measure, &p)?;
    Ok((
        Status::Ok,
        json!({
            "functional": e.name(),
            "partition": p.to_index_lists(),
            "entropy": h,
        }),
    ))
}

fn run_cover(cli: &Cli, instance: &str, functional: &str, mode: Mode, samples: u64) -> Outcome {
    let inst = Instance::from_json(instance)?;
    let e: EntropyFunctional = functional.parse()?;
    let (mu, q) = (&inst.measure, &inst.cover);
    let mut results = serde_json::Map::new();
    results.insert("functional".into(), json!(e.name()));
    results.insert("mode".into(), json!(mode));

    let mut values = Vec::new();
    if mode != Mode::Weighted {
        let r = cover_entropy(&e, mu, q, cli.budget)?;
        results.insert(
            "classical".into(),
            json!({
                "value": entropy_json(r.value),
                "witness": r.witness.map(|w| w.to_index_lists()),
                "explored": r.explored,
            }),
        );
        values.push(r.value);
    }
    let mut status = Status::Ok;
    if mode != Mode::Classical {
        let r = cover_entropy_weighted(&e, mu, q, cli.budget)?;
        let witness_partition = r
            .witness
            .as_ref()
            .map(|d| crate::weighted::disjointify(d).map(|p| p.to_index_lists()))
            .transpose()?;
        results.insert(
            "weighted".into(),
            json!({
                "value": entropy_json(r.value),
                "witness_rows": r.witness.as_ref().map(|d| d.rows().to_vec()),
                "witness_partition": witness_partition,
                "explored": r.explored,
            }),
        );
        values.push(r.value);

        // sandwich: no division may beat the minimum
        let minimum = values[0];
        let mut drawn = 0u64;
        let mut violations = 0u64;
        let mut least: Option<f64> = None;
        if let EntropyValue::Finite(min) = minimum {
            if is_mu_cover(q, mu) {
                let mut seeds = ChaCha8Rng::seed_from_u64(cli.seed);
                for _ in 0..samples {
                    let d = random_division(mu, q, seeds.next_u64())?;
                    let w = weighted_entropy(&e, &d);
                    drawn += 1;
                    if w < min - cli.tol {
                        violations += 1;
                    }
                    least = Some(least.map_or(w, |l: f64| l.min(w)));
                }
            }
        }
        results.insert(
            "sandwich".into(),
            json!({
                "seed": cli.seed,
                "samples": drawn,
                "least_weighted": least,
                "violations": violations,
            }),
        );
        if violations > 0 {
            status = Status::Failed;
        }
    }
    if let [c, w] = values[..] {
        let holds = c.agrees_with(&w, cli.tol);
        let difference = match (c, w) {
            (EntropyValue::Finite(a), EntropyValue::Finite(b)) => json!((a - b).abs()),
            _ if holds => json!(0.0),
            _ => json!("infinity"),
        };
        results.insert("difference".into(), difference);
        results.insert("equality_holds".into(), json!(holds));
        if !holds {
            status = Status::Failed;
        }
    }
    if status == Status::Ok && values.iter().any(|v| !v.is_finite()) {
        status = Status::Infinite;
    }
    Ok((status, Value::Object(results)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MixtureFile {
    n: usize,
    functional: String,
    coefficients: Vec<f64>,
    measures: Vec<Vec<f64>>,
    cover: Vec<Vec<usize>>,
}

fn run_mixture(cli: &Cli, text: &str) -> Outcome {
    let file: MixtureFile = serde_json::from_str(text)?;
    let e: EntropyFunctional = file.functional.parse()?;
    let space = DiscreteSpace::new(file.n)?;
    if file.coefficients.len() != file.measures.len() {
        return Err(Error::InvalidMixture(format!(
            "{} coefficients for {} measures",
            file.coefficients.len(),
            file.measures.len()
        )));
    }
    let mut components = Vec::new();
    for (a, m) in file.coefficients.iter().zip(file.measures) {
        if m.len() != file.n {
            return Err(Error::SpaceMismatch(file.n, m.len()));
        }
        components.push((*a, Measure::probability(m)?));
    }
    let spec = MixtureSpec::new(components)?;
    let q = SetFamily::from_indices(space, &file.cover)?;
    let r = verify_mixture_bounds(&e, &spec, &q, cli.budget)?;
    let status = if !r.contained {
        Status::Failed
    } else if !r.achieved.is_finite() {
        Status::Infinite
    } else {
        Status::Ok
    };
    Ok((
        status,
        json!({
            "functional": e.name(),
            "alpha": r.alpha,
            "coefficients": file.coefficients,
            "component_entropies": r.component_entropies,
            "lower": entropy_json(r.lower),
            "achieved": entropy_json(r.achieved),
            "upper": entropy_json(r.upper),
            "contained": r.contained,
        }),
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HlpFile {
    x: Vec<f64>,
    y: Vec<f64>,
    functional: String,
}

fn run_hlp(text: &str) -> Outcome {
    let file: HlpFile = serde_json::from_str(text)?;
    let e: EntropyFunctional = file.functional.parse()?;
    let input = HlpInput::new(file.x, file.y)?;
    let shape = Curvature::from(e.cgef_case());
    let r = hlp_compare(&input, |t| e.inner(t), shape)?;
    Ok((
        if r.holds { Status::Ok } else { Status::Failed },
        json!({
            "functional": e.name(),
            "shape": shape,
            "sum_phi_x": r.sum_x,
            "sum_phi_y": r.sum_y,
            "holds": r.holds,
        }),
    ))
}

fn run_disjointify(cli: &Cli, instance: &str, division: &str, functional: &str) -> Outcome {
    let inst = Instance::from_json(instance)?;
    let e: EntropyFunctional = functional.parse()?;
    let d = WeightedDivision::from_json(&inst.measure, &inst.cover, division)?;
    let steps = disjointify_steps(&d)?;
    let p = crate::weighted::disjointify(&d)?;
    let h = partition_entropy(&e, &inst.measure, &p)?;
    let w = weighted_entropy(&e, &d);
    let holds = h <= w + cli.tol;
    Ok((
        if holds { Status::Ok } else { Status::Failed },
        json!({
            "functional": e.name(),
            "order": steps.order,
            "row_masses": steps.row_masses,
            "partition": p.to_index_lists(),
            "partition_entropy": h,
            "weighted_entropy": w,
            "inequality_holds": holds,
        }),
    ))
}

fn run_selftest(cli: &Cli, scale: Scale) -> (Status, Value) {
    let report = selftest::run(
        scale,
        cli.seed,
        &selftest::builtin_functionals(),
        cli.budget,
    );
    let status = if report.passed() {
        Status::Ok
    } else {
        Status::Failed
    };
    (
        status,
        serde_json::to_value(&report).expect("report serialises"),
    )
}

/// Writes the report to `--out` or stdout and returns the exit code.
pub fn emit(cli: &Cli, report: &RunReport) -> io::Result<i32> {
    let text = report.to_json();
    match &cli.out {
        Some(path) => fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    if let Some(d) = &report.diagnostic {
        eprintln!("wentropy: {d}");
    }
    Ok(report.status.exit_code())
}
