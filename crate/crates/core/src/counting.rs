//! Quantum counting of right pairs: phase estimation over the Grover
//! iteration `G` whose oracle marks the right pairs of one subkey.
//!
//! Register layout (little-endian): `Rb` holds the `n + 1` pair-index
//! qubits at the bottom, `Ra` the `t` counting qubits above it. The subkey
//! is a classical parameter of the oracle rather than a register.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{QdcaError, Result};
use crate::statevector::{
    diffuse, phase_flip, qft_gate_count, Register, RegisterUnitary, StateVector,
};
use crate::toy_cipher::AttackInstance;

/// `n`, `m`, `epsilon` and the derived counting width
/// `t = m + ceil(log2(2 + 1/(2 epsilon)))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountingParams {
    n: u32,
    m: u32,
    epsilon: f64,
    t: u32,
}

impl CountingParams {
    pub fn new(n: u32, m: u32, epsilon: f64) -> Result<Self> {
        if n == 0 {
            return Err(QdcaError::InvalidParams("n must be at least 1".into()));
        }
        if m == 0 {
            return Err(QdcaError::InvalidParams("m must be at least 1".into()));
        }
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(QdcaError::InvalidParams(format!(
                "epsilon {epsilon} is outside (0, 1/2)"
            )));
        }
        Ok(Self {
            n,
            m,
            epsilon,
            t: m + extra_counting_bits(epsilon),
        })
    }

    /// `m = ceil(n/2) + 1`, `epsilon = 1/10`, hence `t = ceil(n/2) + 4`.
    pub fn default_profile(n: u32) -> Result<Self> {
        Self::new(n, default_accuracy_bits(n), 0.1)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    /// `N = 2^n`.
    pub fn pair_count(&self) -> u64 {
        1 << self.n
    }

    /// Size of the padded search space, `2N`.
    pub fn search_space(&self) -> u64 {
        2 << self.n
    }

    /// Grover iterations per counting run, `2^t - 1`.
    pub fn g_gate_count(&self) -> u64 {
        (1 << self.t) - 1
    }

    pub fn qft_gate_count(&self) -> u64 {
        qft_gate_count(self.t as usize)
    }

    /// Qubits initialised per counting run, `t + n + 1`.
    pub fn init_steps(&self) -> u64 {
        u64::from(self.t + self.n + 1)
    }

    /// Time steps charged per counting run.
    pub fn count_cost_steps(&self) -> u64 {
        self.g_gate_count() + self.qft_gate_count() + self.init_steps()
    }

    /// Simulated width of the counting circuit.
    pub fn simulated_width(&self) -> usize {
        (self.t + self.n + 1) as usize
    }

    pub fn rb(&self) -> Register {
        Register::new(0, self.n as usize + 1)
    }

    pub fn ra(&self) -> Register {
        Register::new(self.n as usize + 1, self.t as usize)
    }
}

pub fn default_accuracy_bits(n: u32) -> u32 {
    n.div_ceil(2) + 1
}

/// `ceil(log2(2 + 1/(2 epsilon)))`.
fn extra_counting_bits(epsilon: f64) -> u32 {
    let target = 2.0 + 1.0 / (2.0 * epsilon);
    let mut bits = 0;
    while ((1u64 << bits) as f64) < target {
        bits += 1;
    }
    bits
}

/// A measured counting outcome mapped to a right-pair estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CountEstimate {
    /// Measured `Ra` value `b`.
    pub raw_outcome: u64,
    /// `2 pi b / 2^t`.
    pub theta: f64,
    /// `F(theta) = 2N sin^2(theta/2)`.
    pub m_est: f64,
    /// `m_est` rounded half-up and clamped to `[0, N]`.
    pub r: u64,
    pub g_gate_count: u64,
    pub qft_gate_count: u64,
}

impl CountEstimate {
    pub fn from_outcome(b: u64, params: &CountingParams) -> Self {
        let theta = 2.0 * PI * b as f64 / (1u64 << params.t()) as f64;
        let m_est = estimate_marked(theta, params.search_space());
        Self {
            raw_outcome: b,
            theta,
            m_est,
            r: round_count(m_est, params.pair_count()),
            g_gate_count: params.g_gate_count(),
            qft_gate_count: params.qft_gate_count(),
        }
    }
}

/// `F(theta)` for a search space of `space` items.
pub fn estimate_marked(theta: f64, space: u64) -> f64 {
    let s = (theta / 2.0).sin();
    space as f64 * s * s
}

fn round_count(m_est: f64, max: u64) -> u64 {
    ((m_est + 0.5).floor().max(0.0) as u64).min(max)
}

/// Right-hand side of the counting accuracy bound,
/// `(sqrt(2 M N) + N / 2^{m+1}) * 2^{-m}`.
pub fn counting_error_bound(m_true: f64, n_pairs: f64, m: u32) -> f64 {
    let scale = (-(m as f64)).exp2();
    ((2.0 * m_true * n_pairs).sqrt() + n_pairs * scale / 2.0) * scale
}

/// Whether an estimate falls inside the accuracy bound around `m_true`.
pub fn within_bound(m_est: f64, m_true: f64, params: &CountingParams) -> bool {
    (m_est - m_true).abs() <= counting_error_bound(m_true, params.pair_count() as f64, params.m())
}

/// The Grover iteration `G`: phase oracle on the marked pair indices,
/// then inversion about the mean, on one `Rb` slice.
#[derive(Clone, Copy, Debug)]
pub struct GroverIteration<'a> {
    marks: &'a [bool],
}

impl<'a> GroverIteration<'a> {
    pub fn new(marks: &'a [bool]) -> Self {
        Self { marks }
    }
}

impl RegisterUnitary for GroverIteration<'_> {
    fn apply(&self, amps: &mut [Complex64]) {
        phase_flip(amps, self.marks);
        diffuse(amps);
    }
}

/// One step of `G` for subkey `x` on register `rb` (`n + 1` qubits).
pub fn grover_iteration_g(
    x: u64,
    state: &mut StateVector,
    rb: Register,
    instance: &AttackInstance,
) -> Result<()> {
    instance.check_subkey(x)?;
    if rb.width() != instance.index_bits() as usize + 1 {
        return Err(QdcaError::InvalidParams(format!(
            "Rb has {} qubits, expected n + 1 = {}",
            rb.width(),
            instance.index_bits() + 1
        )));
    }
    let marks = instance.right_pair_marks(x);
    state.apply_phase_oracle(rb, |j| marks[j])?;
    state.apply_diffusion(rb)
}

fn check_marks(marks: &[bool], params: &CountingParams) -> Result<()> {
    if marks.len() as u64 != params.search_space() {
        return Err(QdcaError::InvalidParams(format!(
            "{} oracle marks for a search space of {}",
            marks.len(),
            params.search_space()
        )));
    }
    Ok(())
}

/// The counting circuit up to (not including) the final measurement.
pub fn counting_state(marks: &[bool], params: &CountingParams) -> Result<StateVector> {
    check_marks(marks, params)?;
    let mut state = StateVector::new_uniform(params.simulated_width())?;
    let (ra, rb) = (params.ra(), params.rb());
    let g = GroverIteration::new(marks);
    for j in 0..ra.width() {
        state.apply_controlled_unitary_power(ra.qubit(j), rb, &g, 1 << j)?;
    }
    state.inverse_qft(ra)?;
    Ok(state)
}

/// Exact probability of every `Ra` outcome, read from the amplitudes.
pub fn outcome_distribution(marks: &[bool], params: &CountingParams) -> Result<Vec<f64>> {
    counting_state(marks, params)?.probabilities(params.ra())
}

/// Runs the counting circuit for an arbitrary marking of the `2N` items.
pub fn count_marked<R: Rng + ?Sized>(
    marks: &[bool],
    params: &CountingParams,
    rng: &mut R,
) -> Result<CountEstimate> {
    let mut state = counting_state(marks, params)?;
    let b = state.measure(params.ra(), rng)?;
    let counters = state.counters();
    let mut estimate = CountEstimate::from_outcome(b as u64, params);
    estimate.g_gate_count = counters.unitary_applications;
    estimate.qft_gate_count = counters.qft_gates;
    Ok(estimate)
}

/// Estimates `R(x)`, the number of right pairs of candidate `x`.
pub fn quantum_count<R: Rng + ?Sized>(
    x: u64,
    params: &CountingParams,
    instance: &AttackInstance,
    rng: &mut R,
) -> Result<CountEstimate> {
    instance.check_subkey(x)?;
    if params.n() != instance.index_bits() {
        return Err(QdcaError::InvalidParams(format!(
            "counting parameters use n = {} but the instance has n = {}",
            params.n(),
            instance.index_bits()
        )));
    }
    count_marked(&instance.right_pair_marks(x), params, rng)
}

/// Fully coherent counting with the subkey register `Rc` in uniform
/// superposition. Returns `p[x][b]`, the joint probability of reading
/// subkey `x` and outcome `b`. Restricted to `k <= 2`, `n <= 2`.
pub fn coherent_joint_distribution(
    instance: &AttackInstance,
    params: &CountingParams,
) -> Result<Vec<Vec<f64>>> {
    let k = instance.subkey_bits() as usize;
    let n = params.n() as usize;
    if k > 2 || n > 2 || params.n() != instance.index_bits() {
        return Err(QdcaError::InvalidParams(
            "coherent mode is limited to k <= 2 and n <= 2".into(),
        ));
    }
    let rb_width = n + 1;
    let rbc = Register::new(0, rb_width + k);
    let ra = Register::new(rb_width + k, params.t() as usize);
    let marks: Vec<Vec<bool>> = (0..instance.candidate_count())
        .map(|x| instance.right_pair_marks(x))
        .collect();
    let g = |amps: &mut [Complex64]| {
        for (x, block) in amps.chunks_exact_mut(1 << rb_width).enumerate() {
            phase_flip(block, &marks[x]);
            diffuse(block);
        }
    };
    let mut state = StateVector::new_uniform(rbc.width() + ra.width())?;
    for j in 0..ra.width() {
        state.apply_controlled_unitary_power(ra.qubit(j), rbc, &g, 1 << j)?;
    }
    state.inverse_qft(ra)?;
    let joint = state.probabilities(Register::new(rb_width, k + ra.width()))?;
    Ok((0..1usize << k)
        .map(|x| (0..ra.dim()).map(|b| joint[x | b << k]).collect())
        .collect())
}
