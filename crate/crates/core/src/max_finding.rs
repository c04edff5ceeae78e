//! Maximum finding over candidate subkeys: a threshold subkey `y`, the
//! oracle `O1` marking subkeys with more right pairs than `y`, BBHT search
//! for a marked subkey, and threshold updates until the time budget
//! `2 c m0` is used up.

use rand::Rng;

use crate::counting::{quantum_count, CountEstimate, CountingParams};
use crate::error::Result;
use crate::statevector::{Register, StateVector};
use crate::toy_cipher::AttackInstance;

/// Source of `R(x)` values. Implementations must return the same value
/// for repeated queries of one subkey.
pub trait SubkeyCounts {
    fn candidate_count(&self) -> u64;
    fn r(&mut self, x: u64) -> Result<u64>;
}

/// Exact right-pair counts injected as `R(.)`.
#[derive(Clone, Debug)]
pub struct ExactCounts {
    counts: Vec<u64>,
}

impl ExactCounts {
    pub fn new(counts: Vec<u64>) -> Self {
        Self { counts }
    }
}

impl SubkeyCounts for ExactCounts {
    fn candidate_count(&self) -> u64 {
        self.counts.len() as u64
    }

    fn r(&mut self, x: u64) -> Result<u64> {
        Ok(self.counts[x as usize])
    }
}

/// `R(x)` from the quantum counting circuit, sampled once per subkey on
/// first demand and memoised for the rest of the run.
pub struct QuantumCounts<'a, R> {
    instance: &'a AttackInstance,
    params: CountingParams,
    rng: R,
    memo: Vec<Option<CountEstimate>>,
}

impl<'a, R: Rng> QuantumCounts<'a, R> {
    pub fn new(instance: &'a AttackInstance, params: CountingParams, rng: R) -> Self {
        let k = instance.candidate_count() as usize;
        Self {
            instance,
            params,
            rng,
            memo: vec![None; k],
        }
    }

    pub fn estimate(&mut self, x: u64) -> Result<CountEstimate> {
        if let Some(e) = self.memo[x as usize] {
            return Ok(e);
        }
        let e = quantum_count(x, &self.params, self.instance, &mut self.rng)?;
        self.memo[x as usize] = Some(e);
        Ok(e)
    }

    /// `(x, estimate)` for every subkey counted so far, in subkey order.
    pub fn estimates(&self) -> impl Iterator<Item = (u64, CountEstimate)> + '_ {
        self.memo
            .iter()
            .enumerate()
            .filter_map(|(x, e)| e.map(|e| (x as u64, e)))
    }

    /// Number of counting circuits actually simulated.
    pub fn runs(&self) -> u64 {
        self.memo.iter().flatten().count() as u64
    }

    /// Grover iterations applied across all simulated counting circuits.
    pub fn g_gates(&self) -> u64 {
        self.memo.iter().flatten().map(|e| e.g_gate_count).sum()
    }
}

impl<R: Rng> SubkeyCounts for QuantumCounts<'_, R> {
    fn candidate_count(&self) -> u64 {
        self.memo.len() as u64
    }

    fn r(&mut self, x: u64) -> Result<u64> {
        Ok(self.estimate(x)?.r)
    }
}

/// `f(x, y)`: 1 iff `R(x) > R(y)`.
pub fn oracle_o1(x: u64, y: u64, counts: &mut dyn SubkeyCounts) -> Result<bool> {
    Ok(counts.r(x)? > counts.r(y)?)
}

/// Time budget `limit = 2 c m0` and the running total against it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub c: u32,
    pub m0: u64,
    pub limit: u64,
    pub spent: u64,
}

impl SearchBudget {
    pub fn new(c: u32, m0: u64) -> Self {
        Self {
            c,
            m0,
            limit: 2 * u64::from(c) * m0,
            spent: 0,
        }
    }

    pub fn remaining(&self) -> u64 {
        self.limit - self.spent
    }

    /// Spends `steps` if they fit in what is left.
    pub fn try_charge(&mut self, steps: u64) -> bool {
        if steps > self.remaining() {
            return false;
        }
        self.spent += steps;
        true
    }
}

/// Result of one BBHT search.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchOutcome {
    /// A marked subkey, or `None` when nothing was found.
    pub found: Option<u64>,
    /// The last measured subkey (marked or not).
    pub last_observed: Option<u64>,
    pub iterations: u64,
    pub measurements: u64,
    /// The search stopped because the time budget ran out.
    pub budget_exhausted: bool,
}

pub const BBHT_GROWTH: f64 = 6.0 / 5.0;

/// Measurement cap `4 * ceil(9/2 * sqrt(K))`.
pub fn bbht_measurement_cap(k: u32) -> u64 {
    4 * (4.5 * ((1u64 << k) as f64).sqrt()).ceil() as u64
}

/// Grover search with an unknown number of marked items (BBHT): each round
/// draws `j` uniformly below the current bound, runs `j` Grover iterations
/// on the uniform `k`-qubit state and measures. The bound grows by 6/5 up
/// to `sqrt(K)`. Each iteration costs one budget step.
pub fn grover_search_marked<R: Rng + ?Sized>(
    pred: impl Fn(u64) -> bool,
    k: u32,
    rng: &mut R,
    mut budget: Option<&mut SearchBudget>,
) -> Result<SearchOutcome> {
    let size = 1u64 << k;
    let marks: Vec<bool> = (0..size).map(&pred).collect();
    let mut out = SearchOutcome::default();
    if k == 0 {
        out.measurements = 1;
        out.last_observed = Some(0);
        out.found = marks[0].then_some(0);
        return Ok(out);
    }
    let reg = Register::new(0, k as usize);
    let ceiling = (size as f64).sqrt();
    let mut bound = 1.0f64;
    for _ in 0..bbht_measurement_cap(k) {
        let j = rng.gen_range(0..bound.ceil() as u64);
        if let Some(b) = budget.as_deref_mut() {
            if !b.try_charge(j) {
                out.budget_exhausted = true;
                return Ok(out);
            }
        }
        let mut state = StateVector::new_uniform(k as usize)?;
        for _ in 0..j {
            state.apply_phase_oracle(reg, |v| marks[v])?;
            state.apply_diffusion(reg)?;
        }
        let x = state.measure(reg, rng)? as u64;
        out.iterations += j;
        out.measurements += 1;
        out.last_observed = Some(x);
        if marks[x as usize] {
            out.found = Some(x);
            return Ok(out);
        }
        bound = (bound * BBHT_GROWTH).min(ceiling);
    }
    Ok(out)
}

/// Time-step prices of the loop stages.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CostModel {
    pub k: u32,
    /// Register initialisation per loop, `2k + t + n + 1`.
    pub init_steps: u64,
    /// One counting run, `2^t - 1 + qft gates + t + n + 1`.
    pub count_steps: u64,
}

impl CostModel {
    pub fn new(k: u32, params: &CountingParams) -> Self {
        Self {
            k,
            init_steps: u64::from(2 * k + params.t() + params.n() + 1),
            count_steps: params.count_cost_steps(),
        }
    }

    /// `ceil(22.5 sqrt K) + ceil(log2 K) * count_steps`.
    pub fn default_m0(&self) -> u64 {
        let k_count = (1u64 << self.k) as f64;
        (22.5 * k_count.sqrt()).ceil() as u64 + u64::from(self.k) * self.count_steps
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MaxFindingConfig {
    pub c: u32,
    /// Overrides [`CostModel::default_m0`].
    pub m0: Option<u64>,
}

impl Default for MaxFindingConfig {
    fn default() -> Self {
        Self { c: 4, m0: None }
    }
}

/// Steps charged per loop stage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StageSteps {
    /// Choosing the first threshold by measuring `k` fresh qubits.
    pub threshold_init: u64,
    pub init: u64,
    pub counting: u64,
    pub oracle: u64,
    pub search: u64,
    pub observe: u64,
}

impl StageSteps {
    pub fn total(&self) -> u64 {
        self.threshold_init + self.init + self.counting + self.oracle + self.search + self.observe
    }
}

/// One loop of the maximum-finding process.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceRow {
    pub loop_iter: u64,
    pub y: u64,
    pub r_y: u64,
    pub y_prime: Option<u64>,
    pub r_y_prime: Option<u64>,
    pub accepted: bool,
    pub steps_spent: u64,
}

/// Current threshold and its accepted history (strictly increasing `R`).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ThresholdState {
    pub y: u64,
    pub r_y: Option<u64>,
    pub history: Vec<(u64, u64)>,
}

impl ThresholdState {
    fn accept(&mut self, y: u64, r: u64) {
        self.y = y;
        self.r_y = Some(r);
        self.history.push((y, r));
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxFindingRun {
    pub subkey: u64,
    pub threshold: ThresholdState,
    pub budget: SearchBudget,
    pub stages: StageSteps,
    pub trace: Vec<TraceRow>,
    pub loops: u64,
    pub search_iterations: u64,
    pub search_measurements: u64,
    /// Search iterations spent before the threshold first held a maximal
    /// `R`; `None` if it never did.
    pub search_iterations_to_max: Option<u64>,
    /// Counting runs charged by the cost model (three per full loop).
    pub counting_charges: u64,
}

/// Runs the maximum-finding loop and returns the final threshold.
pub fn find_max_subkey<R: Rng + ?Sized>(
    counts: &mut dyn SubkeyCounts,
    cost: &CostModel,
    config: &MaxFindingConfig,
    rng: &mut R,
) -> Result<MaxFindingRun> {
    let k = cost.k;
    let m0 = config.m0.unwrap_or_else(|| cost.default_m0());
    let mut run = MaxFindingRun {
        subkey: 0,
        threshold: ThresholdState::default(),
        budget: SearchBudget::new(config.c, m0),
        stages: StageSteps::default(),
        trace: Vec::new(),
        loops: 0,
        search_iterations: 0,
        search_measurements: 0,
        search_iterations_to_max: None,
        counting_charges: 0,
    };
    if k == 0 {
        run.search_iterations_to_max = Some(0);
        return Ok(run);
    }
    let size = counts.candidate_count();

    // random initial threshold from a fresh uniform register
    if run.budget.try_charge(u64::from(k)) {
        run.stages.threshold_init += u64::from(k);
    }
    let mut uniform = StateVector::new_uniform(k as usize)?;
    run.threshold.y = uniform.measure(Register::new(0, k as usize), rng)? as u64;
    // cumulative search iterations at which each history entry was accepted
    let mut accepted_at = Vec::new();

    loop {
        if !run.budget.try_charge(cost.init_steps) {
            break;
        }
        run.stages.init += cost.init_steps;

        if !run.budget.try_charge(cost.count_steps) {
            break;
        }
        run.stages.counting += cost.count_steps;
        run.counting_charges += 1;
        let y = run.threshold.y;
        let r_y = counts.r(y)?;
        if run.threshold.r_y.is_none() {
            run.threshold.accept(y, r_y);
            accepted_at.push(run.search_iterations);
        }

        if !run.budget.try_charge(cost.count_steps) {
            break;
        }
        run.stages.oracle += cost.count_steps;
        run.counting_charges += 1;
        let marks: Vec<bool> = (0..size)
            .map(|x| Ok(counts.r(x)? > r_y))
            .collect::<Result<_>>()?;

        let search = grover_search_marked(|x| marks[x as usize], k, rng, Some(&mut run.budget))?;
        run.stages.search += search.iterations;
        run.search_iterations += search.iterations;
        run.search_measurements += search.measurements;
        run.loops += 1;

        let mut row = TraceRow {
            loop_iter: run.loops,
            y,
            r_y,
            y_prime: search.last_observed,
            r_y_prime: None,
            accepted: false,
            steps_spent: 0,
        };
        let mut out_of_budget = search.budget_exhausted;
        if let Some(candidate) = search.found {
            if run.budget.try_charge(cost.count_steps) {
                run.stages.observe += cost.count_steps;
                run.counting_charges += 1;
                let r_new = counts.r(candidate)?;
                row.r_y_prime = Some(r_new);
                if r_new > r_y {
                    run.threshold.accept(candidate, r_new);
                    accepted_at.push(run.search_iterations);
                    row.accepted = true;
                }
            } else {
                out_of_budget = true;
            }
        }
        row.steps_spent = run.budget.spent;
        run.trace.push(row);
        if out_of_budget {
            break;
        }
    }

    run.subkey = run.threshold.y;
    let best = (0..size).map(|x| counts.r(x)).collect::<Result<Vec<_>>>()?;
    let max = best.into_iter().max().unwrap_or(0);
    run.search_iterations_to_max = run
        .threshold
        .history
        .iter()
        .zip(&accepted_at)
        .find(|((_, r), _)| *r == max)
        .map(|(_, &at)| at);
    debug_assert_eq!(run.stages.total(), run.budget.spent);
    Ok(run)
}
