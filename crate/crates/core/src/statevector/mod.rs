//! Dense state-vector simulator with just the operations the attack circuits
//! use: uniform initialisation, predicate phase oracles, Grover diffusion,
//! controlled powers of a register unitary, the (inverse) QFT and seeded
//! projective measurement.
//!
//! Qubit order is little-endian: qubit 0 is the least-significant bit of
//! the basis index.

mod register;

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::Write;

pub use num_complex::Complex64;
use rand::Rng;

use crate::error::{QdcaError, Result};

pub use register::{Register, RegisterMap};

/// Default cap on simulated qubits.
pub const DEFAULT_QUBIT_CAP: usize = 24;

/// Tolerance on `sum |a_i|^2 = 1` after every unitary.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Norm below which a state is considered corrupted.
pub const MIN_MEASURABLE_NORM: f64 = 1e-12;

/// Exact tallies of the operations applied to a state.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct GateCounters {
    pub hadamards: u64,
    pub phase_oracles: u64,
    pub diffusions: u64,
    /// Applications of a register unitary (each power counts fully).
    pub unitary_applications: u64,
    /// Hadamard, controlled-phase and swap gates issued by the (inverse) QFT.
    pub qft_gates: u64,
    pub measurements: u64,
}

/// A unitary acting on the `2^w` amplitudes of one register slice.
pub trait RegisterUnitary {
    fn apply(&self, amps: &mut [Complex64]);
}

impl<F: Fn(&mut [Complex64])> RegisterUnitary for F {
    fn apply(&self, amps: &mut [Complex64]) {
        self(amps)
    }
}

/// Gate count of the `t`-qubit (inverse) QFT circuit: `t` Hadamards,
/// `t(t-1)/2` controlled phases and `floor(t/2)` swaps.
pub fn qft_gate_count(t: usize) -> u64 {
    (t * (t + 1) / 2 + t / 2) as u64
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
    counters: GateCounters,
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::zero_with_cap(num_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn zero_with_cap(num_qubits: usize, cap: usize) -> Result<Self> {
        Self::basis_with_cap(num_qubits, 0, cap)
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        Self::basis_with_cap(num_qubits, index, DEFAULT_QUBIT_CAP)
    }

    fn basis_with_cap(num_qubits: usize, index: usize, cap: usize) -> Result<Self> {
        check_width(num_qubits, cap)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        let slot = amps.get_mut(index).ok_or(QdcaError::RegisterOutOfBounds {
            offset: index,
            end: index + 1,
            num_qubits,
        })?;
        *slot = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amps,
            counters: GateCounters::default(),
        })
    }

    /// Equal superposition over all `2^q` basis states.
    pub fn new_uniform(num_qubits: usize) -> Result<Self> {
        Self::new_uniform_with_cap(num_qubits, DEFAULT_QUBIT_CAP)
    }

    pub fn new_uniform_with_cap(num_qubits: usize, cap: usize) -> Result<Self> {
        check_width(num_qubits, cap)?;
        let dim = 1usize << num_qubits;
        let a = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            num_qubits,
            amps: vec![a; dim],
            counters: GateCounters::default(),
        })
    }

    /// Wraps explicit amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(QdcaError::NotPowerOfTwo(amps.len() as u64));
        }
        let num_qubits = amps.len().trailing_zeros() as usize;
        check_width(num_qubits, DEFAULT_QUBIT_CAP)?;
        Ok(Self {
            num_qubits,
            amps,
            counters: GateCounters::default(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn counters(&self) -> GateCounters {
        self.counters
    }

    pub fn reset_counters(&mut self) {
        self.counters = GateCounters::default();
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn full_register(&self) -> Register {
        Register::new(0, self.num_qubits)
    }

    fn check_register(&self, reg: Register) -> Result<()> {
        if reg.width() == 0 || reg.end() > self.num_qubits {
            return Err(QdcaError::RegisterOutOfBounds {
                offset: reg.offset(),
                end: reg.end(),
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        self.check_register(Register::new(q, 1))
    }

    /// Runs `f` on the amplitudes of `reg` for every assignment of the
    /// other qubits (restricted to `control = 1` when given).
    fn for_each_block(
        &mut self,
        reg: Register,
        control: Option<usize>,
        mut f: impl FnMut(&mut [Complex64]),
    ) {
        let dim = reg.dim();
        let control_bit = control.map(|c| 1usize << c);
        if reg.offset() == 0 {
            for (chunk_index, chunk) in self.amps.chunks_exact_mut(dim).enumerate() {
                let base = chunk_index << reg.width();
                if control_bit.is_none_or(|b| base & b != 0) {
                    f(chunk);
                }
            }
            return;
        }
        let low = 1usize << reg.offset();
        let high = self.amps.len() >> reg.end();
        let mut buf = vec![Complex64::new(0.0, 0.0); dim];
        for hi in 0..high {
            for lo in 0..low {
                let base = hi << reg.end() | lo;
                if control_bit.is_some_and(|b| base & b == 0) {
                    continue;
                }
                for (r, slot) in buf.iter_mut().enumerate() {
                    *slot = self.amps[base | r << reg.offset()];
                }
                f(&mut buf);
                for (r, slot) in buf.iter().enumerate() {
                    self.amps[base | r << reg.offset()] = *slot;
                }
            }
        }
    }

    fn raw_hadamard(&mut self, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a = self.amps[i];
                let b = self.amps[i | bit];
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[i | bit] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    fn raw_controlled_phase(&mut self, a: usize, b: usize, angle: f64) {
        let mask = 1usize << a | 1usize << b;
        let phase = Complex64::from_polar(1.0, angle);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp *= phase;
            }
        }
    }

    fn raw_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amps.swap(i, i ^ ba ^ bb);
            }
        }
    }

    pub fn hadamard(&mut self, q: usize) -> Result<()> {
        self.check_qubit(q)?;
        self.raw_hadamard(q);
        self.counters.hadamards += 1;
        Ok(())
    }

    pub fn hadamard_register(&mut self, reg: Register) -> Result<()> {
        self.check_register(reg)?;
        for i in 0..reg.width() {
            self.raw_hadamard(reg.qubit(i));
        }
        self.counters.hadamards += reg.width() as u64;
        Ok(())
    }

    /// Negates every amplitude whose `reg` value satisfies `pred`.
    pub fn apply_phase_oracle(
        &mut self,
        reg: Register,
        pred: impl Fn(usize) -> bool,
    ) -> Result<()> {
        self.check_register(reg)?;
        let marks: Vec<bool> = (0..reg.dim()).map(pred).collect();
        self.for_each_block(reg, None, |block| phase_flip(block, &marks));
        self.counters.phase_oracles += 1;
        Ok(())
    }

    /// `2|u><u| - I` on `reg`, `|u>` uniform.
    pub fn apply_diffusion(&mut self, reg: Register) -> Result<()> {
        self.check_register(reg)?;
        self.for_each_block(reg, None, diffuse);
        self.counters.diffusions += 1;
        Ok(())
    }

    pub fn apply_unitary(&mut self, reg: Register, unitary: &dyn RegisterUnitary) -> Result<()> {
        self.check_register(reg)?;
        self.for_each_block(reg, None, |block| unitary.apply(block));
        self.counters.unitary_applications += 1;
        Ok(())
    }

    /// Applies `unitary^power` to `reg` on the branch where `control` is 1.
    pub fn apply_controlled_unitary_power(
        &mut self,
        control: usize,
        reg: Register,
        unitary: &dyn RegisterUnitary,
        power: u64,
    ) -> Result<()> {
        self.check_register(reg)?;
        self.check_qubit(control)?;
        if reg.contains(control) {
            return Err(QdcaError::ControlOverlap(control));
        }
        if !power.is_power_of_two() {
            return Err(QdcaError::NotPowerOfTwo(power));
        }
        self.for_each_block(reg, Some(control), |block| {
            for _ in 0..power {
                unitary.apply(block);
            }
        });
        self.counters.unitary_applications += power;
        Ok(())
    }

    /// Forward QFT on `reg`: `|x> -> 2^{-t/2} sum_y e^{2 pi i x y / 2^t} |y>`.
    pub fn qft(&mut self, reg: Register) -> Result<()> {
        self.check_register(reg)?;
        let t = reg.width();
        for i in (0..t).rev() {
            self.raw_hadamard(reg.qubit(i));
            for j in (0..i).rev() {
                let angle = 2.0 * PI / (1u64 << (i - j + 1)) as f64;
                self.raw_controlled_phase(reg.qubit(j), reg.qubit(i), angle);
            }
        }
        for i in 0..t / 2 {
            self.raw_swap(reg.qubit(i), reg.qubit(t - 1 - i));
        }
        self.counters.qft_gates += qft_gate_count(t);
        Ok(())
    }

    /// Exact inverse of [`StateVector::qft`], gate by gate in reverse.
    pub fn inverse_qft(&mut self, reg: Register) -> Result<()> {
        self.check_register(reg)?;
        let t = reg.width();
        for i in 0..t / 2 {
            self.raw_swap(reg.qubit(i), reg.qubit(t - 1 - i));
        }
        for i in 0..t {
            for j in 0..i {
                let angle = -2.0 * PI / (1u64 << (i - j + 1)) as f64;
                self.raw_controlled_phase(reg.qubit(j), reg.qubit(i), angle);
            }
            self.raw_hadamard(reg.qubit(i));
        }
        self.counters.qft_gates += qft_gate_count(t);
        Ok(())
    }

    /// Marginal distribution of `reg`, accumulated in index order.
    pub fn probabilities(&self, reg: Register) -> Result<Vec<f64>> {
        self.check_register(reg)?;
        let mut probs = vec![0.0; reg.dim()];
        for (i, a) in self.amps.iter().enumerate() {
            probs[reg.value_of(i)] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Projective measurement of `reg`; the state collapses onto the outcome.
    pub fn measure<R: Rng + ?Sized>(&mut self, reg: Register, rng: &mut R) -> Result<usize> {
        let probs = self.probabilities(reg)?;
        let total: f64 = probs.iter().sum();
        if total.is_nan() || total < MIN_MEASURABLE_NORM {
            return Err(QdcaError::CorruptedState(total));
        }
        let draw = rng.gen::<f64>() * total;
        let mut outcome = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        let mut acc = 0.0;
        for (v, &p) in probs.iter().enumerate() {
            acc += p;
            if draw < acc && p > 0.0 {
                outcome = v;
                break;
            }
        }
        let scale = 1.0 / probs[outcome].sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if reg.value_of(i) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        self.counters.measurements += 1;
        Ok(outcome)
    }

    /// Debug dump: `index,re,im` rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# qdca amplitudes v1 (little-endian)")?;
        writeln!(out, "index,re,im")?;
        for (i, a) in self.amps.iter().enumerate() {
            writeln!(out, "{i},{:e},{:e}", a.re, a.im)?;
        }
        Ok(())
    }
}

fn check_width(num_qubits: usize, cap: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > cap {
        return Err(QdcaError::QubitCap {
            requested: num_qubits,
            cap,
        });
    }
    Ok(())
}

/// Negates the marked entries of one register slice.
#[inline]
pub fn phase_flip(block: &mut [Complex64], marks: &[bool]) {
    for (a, &m) in block.iter_mut().zip(marks) {
        if m {
            *a = -*a;
        }
    }
}

/// Inversion about the mean on one register slice.
#[inline]
pub fn diffuse(block: &mut [Complex64]) {
    let mean = block.iter().sum::<Complex64>() / block.len() as f64;
    let twice = mean * 2.0;
    for a in block.iter_mut() {
        *a = twice - *a;
    }
}

#[cfg(test)]
mod tests;
