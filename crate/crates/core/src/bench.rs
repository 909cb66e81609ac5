//! Benchmark harness: runs the verification algorithms over instance
//! families and reports timings and statistics as CSV.

use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::acceptance::Mode;
use crate::arena::GameArena;
use crate::generators::{gen_intersection, gen_random, GeneratorError, RandomSpec};
use crate::lattice::Payoff;
use crate::realizability::Queries;
use crate::verifier::{antichain_verify, counterexample_verify, naive_verify, VerificationResult, VerifyError};

pub const CSV_HEADER: [&str; 13] = [
    "instance",
    "family",
    "nbr_vertices",
    "nbr_objectives",
    "seed",
    "result",
    "AO_time",
    "CE_time",
    "naive_time",
    "pareto_size",
    "ratio_lost_payoffs",
    "A_size_alg1",
    "A_size_alg2",
];

pub const ITERATION_HEADER: [&str; 3] = ["iteration", "A_size", "call_time"];

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("could not start worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub name: String,
    pub family: String,
    pub seed: Option<u64>,
    pub arena: GameArena,
}

/// Intersection copies sharing objectives (`per_copy == false`) or with
/// per-copy order objectives.
pub fn intersection_instances(copies: &[usize], per_copy: bool, negative: bool) -> Result<Vec<BenchInstance>, BenchError> {
    let family = match (per_copy, negative) {
        (false, false) => "intersection",
        (false, true) => "intersection-negative",
        (true, false) => "intersection-per-copy",
        (true, true) => "intersection-per-copy-negative",
    };
    copies
        .iter()
        .map(|&k| {
            Ok(BenchInstance {
                name: format!("{family}-k{k}"),
                family: family.to_string(),
                seed: None,
                arena: gen_intersection(k, per_copy, negative)?,
            })
        })
        .collect()
}

/// One random instance per `(objective count, seed)` pair.
pub fn random_instances(base: &RandomSpec, objectives: &[usize], seeds: &[u64]) -> Result<Vec<BenchInstance>, BenchError> {
    let mut out = Vec::new();
    for &t in objectives {
        for &seed in seeds {
            let spec = RandomSpec { objectives: t, seed, ..base.clone() };
            out.push(BenchInstance {
                name: format!("random-n{}-t{t}-s{seed}", spec.vertices),
                family: "random".to_string(),
                seed: Some(seed),
                arena: gen_random(&spec)?,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchOptions {
    /// Also run the naive procedure.
    pub naive: bool,
    /// Compute the Pareto set size and the ratio of lost payoffs.
    pub with_stats: bool,
    /// Instances with more objectives skip the naive run and the statistics.
    pub enumeration_limit: usize,
    pub workers: Option<usize>,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { naive: false, with_stats: false, enumeration_limit: 16, workers: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance: String,
    pub family: String,
    pub vertices: usize,
    pub objectives: usize,
    pub seed: Option<u64>,
    /// `positive`, `negative`, or `disagreement` if the algorithms differ.
    pub result: String,
    pub ao_time: f64,
    pub ce_time: f64,
    pub naive_time: Option<f64>,
    pub pareto_size: Option<usize>,
    pub ratio_lost_payoffs: Option<f64>,
    pub a_size_alg1: usize,
    pub a_size_alg2: usize,
}

/// Per-round trace of the counterexample procedure.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub instance: String,
    pub antichain_sizes: Vec<usize>,
    pub call_times: Vec<Duration>,
}

#[derive(Debug, Clone)]
pub struct Measurement {
    pub row: BenchRow,
    pub trace: IterationTrace,
}

fn timed(run: impl FnOnce() -> Result<VerificationResult, VerifyError>) -> Result<(VerificationResult, f64), VerifyError> {
    let start = Instant::now();
    let result = run()?;
    Ok((result, start.elapsed().as_secs_f64()))
}

/// Pareto set size and the fraction of realizable payoffs that some lost
/// play realizes.
pub fn payoff_statistics(arena: &GameArena) -> Result<(usize, f64), VerifyError> {
    let queries = Queries::new(arena)?;
    let mut realizable = Vec::new();
    let mut lost = 0usize;
    for p in Payoff::all(arena.objective_count()) {
        if queries.exists_payoff_eq(&p)?.is_some() {
            if queries.exists_extended(false, &p, Mode::Eq)?.is_some() {
                lost += 1;
            }
            realizable.push(p);
        }
    }
    let ratio = if realizable.is_empty() { 0.0 } else { lost as f64 / realizable.len() as f64 };
    let pareto = crate::lattice::Antichain::ceil(realizable);
    Ok((pareto.len(), ratio))
}

pub fn measure(instance: &BenchInstance, options: &BenchOptions) -> Result<Measurement, BenchError> {
    let arena = &instance.arena;
    let enumerable = arena.objective_count() <= options.enumeration_limit;
    let (ao, ao_time) = timed(|| antichain_verify(arena))?;
    let (ce, ce_time) = timed(|| counterexample_verify(arena))?;
    let mut verdicts = vec![ao.positive, ce.positive];
    let naive_time = if options.naive && enumerable {
        let (naive, time) = timed(|| naive_verify(arena))?;
        verdicts.push(naive.positive);
        Some(time)
    } else {
        None
    };
    let (pareto_size, ratio_lost_payoffs) = if options.with_stats && enumerable {
        let (size, ratio) = payoff_statistics(arena)?;
        (Some(size), Some(ratio))
    } else {
        (None, None)
    };
    let result = if verdicts.iter().all(|&v| v == ao.positive) {
        if ao.positive { "positive" } else { "negative" }
    } else {
        "disagreement"
    };
    let row = BenchRow {
        instance: instance.name.clone(),
        family: instance.family.clone(),
        vertices: arena.vertex_count(),
        objectives: arena.objective_count(),
        seed: instance.seed,
        result: result.to_string(),
        ao_time,
        ce_time,
        naive_time,
        pareto_size,
        ratio_lost_payoffs,
        a_size_alg1: ao.antichain.len(),
        a_size_alg2: ce.antichain.len(),
    };
    let trace = IterationTrace {
        instance: instance.name.clone(),
        antichain_sizes: ce.stats.antichain_sizes,
        call_times: ce.stats.lost_query_times,
    };
    Ok(Measurement { row, trace })
}

/// Measures every instance, in parallel unless `options.workers` is 1.
/// Results keep the order of `instances`.
pub fn run(instances: &[BenchInstance], options: &BenchOptions) -> Result<Vec<Measurement>, BenchError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(options.workers.unwrap_or(0)).build()?;
    pool.install(|| instances.par_iter().map(|i| measure(i, options)).collect())
}

fn opt<T: ToString>(value: &Option<T>) -> String {
    value.as_ref().map(ToString::to_string).unwrap_or_default()
}

pub fn write_rows(rows: &[BenchRow], out: impl Write) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for r in rows {
        writer.write_record([
            r.instance.clone(),
            r.family.clone(),
            r.vertices.to_string(),
            r.objectives.to_string(),
            opt(&r.seed),
            r.result.clone(),
            format!("{:.6}", r.ao_time),
            format!("{:.6}", r.ce_time),
            r.naive_time.map(|t| format!("{t:.6}")).unwrap_or_default(),
            opt(&r.pareto_size),
            r.ratio_lost_payoffs.map(|x| format!("{x:.6}")).unwrap_or_default(),
            r.a_size_alg1.to_string(),
            r.a_size_alg2.to_string(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_iterations(trace: &IterationTrace, out: impl Write) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(ITERATION_HEADER)?;
    for (i, (size, time)) in trace.antichain_sizes.iter().zip(&trace.call_times).enumerate() {
        writer.write_record([(i + 1).to_string(), size.to_string(), format!("{:.9}", time.as_secs_f64())])?;
    }
    writer.flush()?;
    Ok(())
}

/// The measurement whose counterexample run took longest.
pub fn slowest_counterexample_run(measurements: &[Measurement]) -> Option<&Measurement> {
    measurements.iter().max_by(|a, b| a.row.ce_time.total_cmp(&b.row.ce_time))
}
