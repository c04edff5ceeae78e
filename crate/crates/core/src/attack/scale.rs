use crate::error::Result;

use super::{run_quantum_trials, AttackConfig, Mode, QuantumTrial, RegisterWidths};

/// Sizes swept by [`run_scaling_report`]: `k` at fixed `n`, then `n` at
/// fixed `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleSweep {
    pub k_values: Vec<u32>,
    pub fixed_n: u32,
    pub n_values: Vec<u32>,
    pub fixed_k: u32,
    pub trials: u32,
}

impl Default for ScaleSweep {
    fn default() -> Self {
        Self {
            k_values: vec![4, 6, 8],
            fixed_n: 6,
            n_values: vec![4, 6, 8],
            fixed_k: 4,
            trials: 50,
        }
    }
}

/// Per-size aggregates over the sweep's trials.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaleRow {
    /// `"k"` or `"n"`: which parameter this row varies.
    pub sweep: &'static str,
    pub k: u32,
    pub n: u32,
    pub t: u32,
    pub trials: u32,
    pub success_rate: f64,
    pub mean_search_iterations: f64,
    /// Mean search iterations until the threshold first held a maximal
    /// estimate, over the trials that got there.
    pub mean_search_to_max: f64,
    pub reached_max: u32,
    /// `mean_search_to_max` over the previous row's value.
    pub search_ratio: Option<f64>,
    /// G applications per counting run when every run agrees.
    pub g_gates_per_count: Option<u64>,
    /// `2^t - 1`.
    pub expected_g_gates: u64,
    pub qft_gates_per_count: Option<u64>,
    pub mean_steps_spent: f64,
    pub widths: RegisterWidths,
}

fn uniform(values: impl Iterator<Item = u64>) -> Option<u64> {
    let mut values = values.peekable();
    let first = *values.peek()?;
    values.all(|v| v == first).then_some(first)
}

fn summarise(
    sweep: &'static str,
    config: &AttackConfig,
    trials: &[QuantumTrial],
) -> Result<ScaleRow> {
    let params = config.counting_params()?;
    let count = trials.len() as f64;
    let reached: Vec<u64> = trials
        .iter()
        .filter_map(|t| t.result.search_iterations_to_max)
        .collect();
    let records = || trials.iter().flat_map(|t| &t.counts);
    Ok(ScaleRow {
        sweep,
        k: config.k,
        n: config.n,
        t: params.t(),
        trials: config.trials,
        success_rate: trials.iter().filter(|t| t.result.success).count() as f64 / count,
        mean_search_iterations: trials
            .iter()
            .map(|t| t.result.search_iterations as f64)
            .sum::<f64>()
            / count,
        mean_search_to_max: if reached.is_empty() {
            f64::NAN
        } else {
            reached.iter().sum::<u64>() as f64 / reached.len() as f64
        },
        reached_max: reached.len() as u32,
        search_ratio: None,
        g_gates_per_count: uniform(records().map(|c| c.estimate.g_gate_count)),
        expected_g_gates: params.g_gate_count(),
        qft_gates_per_count: uniform(records().map(|c| c.estimate.qft_gate_count)),
        mean_steps_spent: trials
            .iter()
            .map(|t| t.result.steps_spent as f64)
            .sum::<f64>()
            / count,
        widths: RegisterWidths::new(config.k, &params),
    })
}

/// Runs the quantum attack at every size of `sweep`, starting from `base`
/// (its `k`, `n`, `trials` and `mode` are overridden).
pub fn run_scaling_report(base: &AttackConfig, sweep: &ScaleSweep) -> Result<Vec<ScaleRow>> {
    let mut rows = Vec::new();
    let sizes = sweep
        .k_values
        .iter()
        .map(|&k| ("k", k, sweep.fixed_n))
        .chain(sweep.n_values.iter().map(|&n| ("n", sweep.fixed_k, n)));
    for (name, k, n) in sizes {
        let config = AttackConfig {
            k,
            n,
            trials: sweep.trials,
            mode: Mode::Quantum,
            characteristic: None,
            ..base.clone()
        };
        let instance = config.build_instance()?;
        let trials = run_quantum_trials(&instance, &config)?;
        let mut row = summarise(name, &config, &trials)?;
        if let Some(prev) = rows.last().filter(|p: &&ScaleRow| p.sweep == name) {
            row.search_ratio = Some(row.mean_search_to_max / prev.mean_search_to_max);
        }
        rows.push(row);
    }
    Ok(rows)
}
