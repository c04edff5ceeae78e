//! End-to-end attack drivers, the Monte Carlo trial runner and their
//! reports.

mod config;
mod report;
mod scale;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classical::{count_right_pairs, CountTable};
use crate::counting::{within_bound, CountEstimate, CountingParams};
use crate::error::Result;
use crate::max_finding::{
    find_max_subkey, CostModel, MaxFindingConfig, QuantumCounts, StageSteps, TraceRow,
};
use crate::toy_cipher::AttackInstance;

pub use config::{trial_seed, AttackConfig, Mode};
pub use report::{
    write_counts_csv, write_results_csv, write_scale_csv, write_trace_csv, RegisterWidths,
};
pub use scale::{run_scaling_report, ScaleRow, ScaleSweep};

/// Outcome of one attack run.
#[derive(Clone, Debug, PartialEq)]
pub struct AttackResult {
    pub trial: u32,
    pub mode: Mode,
    pub seed: u64,
    pub recovered_subkey: u64,
    pub true_subkey: u64,
    pub success: bool,
    pub stages: StageSteps,
    pub steps_spent: u64,
    pub step_limit: u64,
    pub loops: u64,
    pub search_iterations: u64,
    pub search_measurements: u64,
    pub search_iterations_to_max: Option<u64>,
    /// Counting circuits actually simulated (memoised, at most `K`).
    pub counting_runs: u64,
    pub g_gates: u64,
    pub qft_gates: u64,
    /// Classical right-pair predicate evaluations.
    pub pair_evaluations: u64,
    /// Fraction of memoised estimates inside the counting bound.
    pub bound_hit_rate: Option<f64>,
    pub wall_time: Duration,
}

/// One counting run as recorded in `counts.csv`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountRecord {
    pub subkey: u64,
    pub estimate: CountEstimate,
    pub exact: u64,
    pub within_bound: bool,
}

/// A quantum trial with its trace and counting log.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumTrial {
    pub result: AttackResult,
    pub trace: Vec<TraceRow>,
    pub counts: Vec<CountRecord>,
}

/// Everything produced by [`run_attack`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AttackReport {
    pub classical: Option<AttackResult>,
    pub quantum: Vec<QuantumTrial>,
    pub setup_time: Duration,
}

impl AttackReport {
    pub fn results(&self) -> impl Iterator<Item = &AttackResult> {
        self.classical
            .iter()
            .chain(self.quantum.iter().map(|t| &t.result))
    }

    pub fn quantum_success_rate(&self) -> Option<f64> {
        if self.quantum.is_empty() {
            return None;
        }
        let wins = self.quantum.iter().filter(|t| t.result.success).count();
        Some(wins as f64 / self.quantum.len() as f64)
    }
}

/// Classical attack: every candidate against every pair.
pub fn run_classical_attack(instance: &AttackInstance) -> AttackResult {
    let start = Instant::now();
    let k_count = instance.candidate_count();
    let mut evaluations = 0u64;
    let counts: Vec<u64> = (0..k_count)
        .map(|x| {
            evaluations += instance.pairs.len() as u64;
            count_right_pairs(
                x,
                &instance.pairs,
                &instance.cipher,
                &instance.characteristic,
            )
        })
        .collect();
    let recovered = CountTable::new(counts).argmax();
    let truth = instance.true_subkey();
    AttackResult {
        trial: 0,
        mode: Mode::Classical,
        seed: 0,
        recovered_subkey: recovered,
        true_subkey: truth,
        success: recovered == truth,
        stages: StageSteps::default(),
        steps_spent: 0,
        step_limit: 0,
        loops: 0,
        search_iterations: 0,
        search_measurements: 0,
        search_iterations_to_max: None,
        counting_runs: 0,
        g_gates: 0,
        qft_gates: 0,
        pair_evaluations: evaluations,
        bound_hit_rate: None,
        wall_time: start.elapsed(),
    }
}

/// One seeded quantum attack: counting draws from stream 1 of the trial
/// seed, everything else from stream 0.
pub fn run_quantum_trial(
    instance: &AttackInstance,
    params: &CountingParams,
    config: &MaxFindingConfig,
    exact: &CountTable,
    trial: u32,
    seed: u64,
) -> Result<QuantumTrial> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counting_rng = ChaCha8Rng::seed_from_u64(seed);
    counting_rng.set_stream(1);

    let cost = CostModel::new(instance.subkey_bits(), params);
    let mut memo = QuantumCounts::new(instance, *params, counting_rng);
    let run = find_max_subkey(&mut memo, &cost, config, &mut rng)?;

    let counts: Vec<CountRecord> = memo
        .estimates()
        .map(|(x, estimate)| CountRecord {
            subkey: x,
            estimate,
            exact: exact.get(x),
            within_bound: within_bound(estimate.m_est, exact.get(x) as f64, params),
        })
        .collect();
    let hits = counts.iter().filter(|c| c.within_bound).count();
    let truth = instance.true_subkey();
    let result = AttackResult {
        trial,
        mode: Mode::Quantum,
        seed,
        recovered_subkey: run.subkey,
        true_subkey: truth,
        success: run.subkey == truth,
        stages: run.stages,
        steps_spent: run.budget.spent,
        step_limit: run.budget.limit,
        loops: run.loops,
        search_iterations: run.search_iterations,
        search_measurements: run.search_measurements,
        search_iterations_to_max: run.search_iterations_to_max,
        counting_runs: memo.runs(),
        g_gates: memo.g_gates(),
        qft_gates: counts.iter().map(|c| c.estimate.qft_gate_count).sum(),
        pair_evaluations: 0,
        bound_hit_rate: (!counts.is_empty()).then(|| hits as f64 / counts.len() as f64),
        wall_time: start.elapsed(),
    };
    Ok(QuantumTrial {
        result,
        trace: run.trace,
        counts,
    })
}

/// `config.trials` quantum trials in parallel, in trial order.
pub fn run_quantum_attack(config: &AttackConfig) -> Result<Vec<QuantumTrial>> {
    let instance = config.build_instance()?;
    run_quantum_trials(&instance, config)
}

fn run_quantum_trials(
    instance: &AttackInstance,
    config: &AttackConfig,
) -> Result<Vec<QuantumTrial>> {
    let params = config.counting_params()?;
    let mf = config.max_finding();
    let exact = instance.count_table();
    (0..config.trials)
        .into_par_iter()
        .map(|i| {
            run_quantum_trial(
                instance,
                &params,
                &mf,
                &exact,
                i,
                trial_seed(config.master_seed, i),
            )
        })
        .collect()
}

/// Runs the configured mode(s) on one planted instance.
pub fn run_attack(config: &AttackConfig) -> Result<AttackReport> {
    let start = Instant::now();
    let instance = config.build_instance()?;
    let setup_time = start.elapsed();
    let classical = config
        .mode
        .runs_classical()
        .then(|| run_classical_attack(&instance));
    let quantum = if config.mode.runs_quantum() {
        run_quantum_trials(&instance, config)?
    } else {
        Vec::new()
    };
    Ok(AttackReport {
        classical,
        quantum,
        setup_time,
    })
}
