use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::counting::CountingParams;
use crate::error::Result;

use super::{AttackReport, AttackResult, QuantumTrial, ScaleRow};

/// Qubit counts of the fully coherent circuit and of what is simulated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegisterWidths {
    pub k: u32,
    pub n: u32,
    pub t: u32,
    /// `2k + n + t + 1`: subkey register, threshold register, pair index,
    /// counting register.
    pub full: u32,
    /// `t + n + 1`: the subkey is a classical oracle parameter and the
    /// threshold search runs on its own `k`-qubit state.
    pub simulated: u32,
}

impl RegisterWidths {
    pub fn new(k: u32, params: &CountingParams) -> Self {
        Self {
            k,
            n: params.n(),
            t: params.t(),
            full: 2 * k + params.n() + params.t() + 1,
            simulated: params.t() + params.n() + 1,
        }
    }
}

impl fmt::Display for RegisterWidths {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "coherent layout: {} qubits (2k+n+t+1 with k={}, n={}, t={}); simulated: {} qubits \
             for counting and {} for search (subkey evaluated classically per basis state)",
            self.full, self.k, self.n, self.t, self.simulated, self.k
        )
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn header<W: Write>(out: &mut W, name: &str) -> Result<()> {
    writeln!(out, "# qdca {name} v1")?;
    Ok(())
}

pub fn write_results_csv<'a, W: Write>(
    results: impl IntoIterator<Item = &'a AttackResult>,
    mut out: W,
) -> Result<()> {
    header(&mut out, "results")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial",
        "mode",
        "seed",
        "recovered_subkey",
        "true_subkey",
        "success",
        "steps_threshold_init",
        "steps_init",
        "steps_counting",
        "steps_oracle",
        "steps_search",
        "steps_observe",
        "steps_spent",
        "step_limit",
        "loops",
        "search_iterations",
        "search_measurements",
        "search_iterations_to_max",
        "counting_runs",
        "g_gates",
        "qft_gates",
        "pair_evaluations",
        "bound_hit_rate",
    ])?;
    for r in results {
        let s = &r.stages;
        w.write_record([
            r.trial.to_string(),
            r.mode.to_string(),
            r.seed.to_string(),
            r.recovered_subkey.to_string(),
            r.true_subkey.to_string(),
            u8::from(r.success).to_string(),
            s.threshold_init.to_string(),
            s.init.to_string(),
            s.counting.to_string(),
            s.oracle.to_string(),
            s.search.to_string(),
            s.observe.to_string(),
            r.steps_spent.to_string(),
            r.step_limit.to_string(),
            r.loops.to_string(),
            r.search_iterations.to_string(),
            r.search_measurements.to_string(),
            opt(r.search_iterations_to_max),
            r.counting_runs.to_string(),
            r.g_gates.to_string(),
            r.qft_gates.to_string(),
            r.pair_evaluations.to_string(),
            opt(r.bound_hit_rate.map(|h| format!("{h:.4}"))),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_csv<'a, W: Write>(
    trials: impl IntoIterator<Item = &'a QuantumTrial>,
    mut out: W,
) -> Result<()> {
    header(&mut out, "trace")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial",
        "loop_iter",
        "y",
        "R_y",
        "y_prime",
        "R_y_prime",
        "accepted",
        "steps_spent",
    ])?;
    for trial in trials {
        for row in &trial.trace {
            w.write_record([
                trial.result.trial.to_string(),
                row.loop_iter.to_string(),
                row.y.to_string(),
                row.r_y.to_string(),
                opt(row.y_prime),
                opt(row.r_y_prime),
                u8::from(row.accepted).to_string(),
                row.steps_spent.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_counts_csv<'a, W: Write>(
    trials: impl IntoIterator<Item = &'a QuantumTrial>,
    mut out: W,
) -> Result<()> {
    header(&mut out, "counts")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "trial",
        "subkey",
        "raw_outcome",
        "theta",
        "m_est",
        "R",
        "exact",
        "within_bound",
        "g_gates",
        "qft_gates",
    ])?;
    for trial in trials {
        for c in &trial.counts {
            let e = &c.estimate;
            w.write_record([
                trial.result.trial.to_string(),
                c.subkey.to_string(),
                e.raw_outcome.to_string(),
                format!("{:.9}", e.theta),
                format!("{:.9}", e.m_est),
                e.r.to_string(),
                c.exact.to_string(),
                u8::from(c.within_bound).to_string(),
                e.g_gate_count.to_string(),
                e.qft_gate_count.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_scale_csv<'a, W: Write>(
    rows: impl IntoIterator<Item = &'a ScaleRow>,
    mut out: W,
) -> Result<()> {
    header(&mut out, "scale")?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "sweep",
        "k",
        "n",
        "t",
        "trials",
        "success_rate",
        "mean_search_iterations",
        "mean_search_to_max",
        "reached_max",
        "search_ratio",
        "g_gates_per_count",
        "expected_g_gates",
        "qft_gates_per_count",
        "mean_steps_spent",
        "full_qubits",
        "simulated_qubits",
    ])?;
    for r in rows {
        w.write_record([
            r.sweep.to_string(),
            r.k.to_string(),
            r.n.to_string(),
            r.t.to_string(),
            r.trials.to_string(),
            format!("{:.4}", r.success_rate),
            format!("{:.4}", r.mean_search_iterations),
            format!("{:.4}", r.mean_search_to_max),
            r.reached_max.to_string(),
            opt(r.search_ratio.map(|x| format!("{x:.4}"))),
            opt(r.g_gates_per_count),
            r.expected_g_gates.to_string(),
            opt(r.qft_gates_per_count),
            format!("{:.4}", r.mean_steps_spent),
            r.widths.full.to_string(),
            r.widths.simulated.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

impl AttackReport {
    /// Writes `results.csv`, and `trace.csv` and `counts.csv` when quantum
    /// trials ran, into `dir`.
    pub fn write_csvs(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_results_csv(self.results(), fs::File::create(dir.join("results.csv"))?)?;
        if !self.quantum.is_empty() {
            write_trace_csv(&self.quantum, fs::File::create(dir.join("trace.csv"))?)?;
            write_counts_csv(&self.quantum, fs::File::create(dir.join("counts.csv"))?)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_for_default_profile() {
        let params = CountingParams::default_profile(6).unwrap();
        let w = RegisterWidths::new(4, &params);
        assert_eq!((w.full, w.simulated), (2 * 4 + 6 + 7 + 1, 14));
        assert!(w.to_string().contains("22 qubits"));
    }

    #[test]
    fn results_schema() {
        let report = AttackReport::default();
        let mut buf = Vec::new();
        write_results_csv(report.results(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# qdca results v1"));
        assert!(lines.next().unwrap().starts_with("trial,mode,seed,"));
        assert_eq!(lines.next(), None);
    }
}
