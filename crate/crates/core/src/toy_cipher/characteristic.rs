use crate::error::{QdcaError, Result};

use super::cipher::{Block, MasterKey, ToyCipher, SBOX_BITS};

/// The expression `E` giving the last-round difference a right pair must show.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpectedDifference {
    /// SPN style: a fixed difference at the input of the last S-layer.
    Constant(Block),
    /// Ciphertext dependent: the high `half_width` bits of `ct0 ^ ct1`, xored with `mask`.
    LeftHalfXor { mask: Block, half_width: u32 },
}

impl ExpectedDifference {
    pub fn evaluate(&self, ct0: Block, ct1: Block) -> Block {
        match *self {
            Self::Constant(delta) => delta,
            Self::LeftHalfXor { mask, half_width } => ((ct0 ^ ct1) >> half_width) ^ mask,
        }
    }
}

/// A differential through the first `rounds - 1` rounds, scored with the
/// S-box DDT under the usual independent-round assumption.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Differential {
    pub input_diff: Block,
    pub output_diff: Block,
    pub estimated_probability: f64,
}

/// A differential characteristic together with the subkey bits it attacks.
#[derive(Clone, Debug, PartialEq)]
pub struct Characteristic {
    plaintext_diff: Block,
    expected: ExpectedDifference,
    probability: f64,
    target_bits: Block,
    fixed_subkey_bits: Block,
}

impl Characteristic {
    /// `target_bits` masks the last-round subkey bits that form a candidate
    /// subkey; `k` is its popcount.
    pub fn new(
        plaintext_diff: Block,
        expected: ExpectedDifference,
        probability: f64,
        target_bits: Block,
    ) -> Result<Self> {
        if plaintext_diff == 0 {
            return Err(QdcaError::DegenerateDifference);
        }
        if !(probability > 0.0 && probability <= 1.0) {
            return Err(QdcaError::InvalidCharacteristic(format!(
                "probability {probability} is outside (0, 1]"
            )));
        }
        if target_bits == 0 {
            return Err(QdcaError::InvalidCharacteristic(
                "at least one subkey bit must be targeted".into(),
            ));
        }
        Ok(Self {
            plaintext_diff,
            expected,
            probability,
            target_bits,
            fixed_subkey_bits: 0,
        })
    }

    /// Subkey bits inside checked nibbles but outside the candidate mask are
    /// taken from `fixed` (side information about the last-round subkey).
    pub fn with_fixed_bits(mut self, fixed: Block) -> Self {
        self.fixed_subkey_bits = fixed & self.checked_nibbles() & !self.target_bits;
        self
    }

    /// Builds the characteristic for `differential` under `key`, storing the
    /// probability measured exhaustively over every plaintext. The candidate
    /// space is the lowest `k` bits of the active output nibbles.
    pub fn planted(
        cipher: &ToyCipher,
        key: MasterKey,
        differential: &Differential,
        k: u32,
    ) -> Result<Self> {
        let target = low_active_bits(differential.output_diff, k).ok_or_else(|| {
            QdcaError::InvalidCharacteristic(format!(
                "{k} subkey bits do not fit in the active nibbles of {:#x}",
                differential.output_diff
            ))
        })?;
        let p = measure_probability(
            cipher,
            key,
            differential.input_diff,
            differential.output_diff,
        );
        if p == 0.0 {
            return Err(QdcaError::InvalidCharacteristic(format!(
                "{:#x} -> {:#x} never holds under this key",
                differential.input_diff, differential.output_diff
            )));
        }
        let last = cipher.last_round_subkey(key);
        Ok(Self::new(
            differential.input_diff,
            ExpectedDifference::Constant(differential.output_diff),
            p,
            target,
        )?
        .with_fixed_bits(last))
    }

    /// The best single-route characteristic for recovering `k` subkey bits:
    /// the top differential with `ceil(k / 4)` active output nibbles.
    pub fn for_subkey_bits(cipher: &ToyCipher, key: MasterKey, k: u32) -> Result<Self> {
        if k == 0 || k > cipher.block_width() {
            return Err(QdcaError::InvalidCharacteristic(format!(
                "cannot target {k} bits of a {}-bit subkey",
                cipher.block_width()
            )));
        }
        let active = k.div_ceil(SBOX_BITS);
        let best = best_differential(cipher, active).ok_or_else(|| {
            QdcaError::InvalidCharacteristic(format!(
                "no differential with {active} active nibbles"
            ))
        })?;
        Self::planted(cipher, key, &best, k)
    }

    pub fn plaintext_diff(&self) -> Block {
        self.plaintext_diff
    }

    pub fn expected(&self) -> &ExpectedDifference {
        &self.expected
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn target_bits(&self) -> Block {
        self.target_bits
    }

    pub fn fixed_subkey_bits(&self) -> Block {
        self.fixed_subkey_bits
    }

    /// `k`, the number of candidate subkey bits.
    pub fn subkey_bits(&self) -> u32 {
        self.target_bits.count_ones()
    }

    /// `K = 2^k`.
    pub fn candidate_count(&self) -> u64 {
        1 << self.subkey_bits()
    }

    pub fn expected_output_difference(&self, ct0: Block, ct1: Block) -> Block {
        self.expected.evaluate(ct0, ct1)
    }

    /// Nibble mask of the S-boxes whose last-round key is (partly) guessed.
    pub fn checked_nibbles(&self) -> Block {
        (0..Block::BITS / SBOX_BITS)
            .map(|i| 0xF << (i * SBOX_BITS))
            .filter(|m: &Block| m & self.target_bits != 0)
            .fold(0, |acc, m| acc | m)
    }

    /// Expands a `k`-bit candidate into a last-round subkey guess.
    pub fn subkey_guess(&self, candidate: u64) -> Block {
        deposit_bits(candidate, self.target_bits) | self.fixed_subkey_bits
    }

    /// Projects a full last-round subkey onto the candidate space.
    pub fn candidate_of(&self, last_round_subkey: Block) -> u64 {
        extract_bits(last_round_subkey, self.target_bits)
    }
}

/// Spreads the low bits of `value` onto the set bits of `mask`.
pub fn deposit_bits(value: u64, mask: Block) -> Block {
    let mut out = 0;
    let mut src = 0;
    for bit in 0..Block::BITS {
        if mask >> bit & 1 == 1 {
            out |= ((value >> src) as Block & 1) << bit;
            src += 1;
        }
    }
    out
}

/// Gathers the bits of `value` selected by `mask` into the low bits.
pub fn extract_bits(value: Block, mask: Block) -> u64 {
    let mut out = 0u64;
    let mut dst = 0;
    for bit in 0..Block::BITS {
        if mask >> bit & 1 == 1 {
            out |= u64::from(value >> bit & 1) << dst;
            dst += 1;
        }
    }
    out
}

fn low_active_bits(output_diff: Block, k: u32) -> Option<Block> {
    let mut mask = 0;
    let mut taken = 0;
    for nib in 0..Block::BITS / SBOX_BITS {
        if output_diff >> (nib * SBOX_BITS) & 0xF == 0 {
            continue;
        }
        for b in 0..SBOX_BITS {
            if taken == k {
                return Some(mask);
            }
            mask |= 1 << (nib * SBOX_BITS + b);
            taken += 1;
        }
    }
    (taken == k).then_some(mask)
}

/// Fraction of all plaintexts `P` for which the last-round inputs of
/// `P` and `P ^ input_diff` differ by exactly `output_diff` under `key`.
pub fn measure_probability(
    cipher: &ToyCipher,
    key: MasterKey,
    input_diff: Block,
    output_diff: Block,
) -> f64 {
    let keys = cipher.round_keys(key);
    let hits = (0..cipher.block_count() as Block)
        .filter(|&p| {
            cipher.last_round_input(&keys, p) ^ cipher.last_round_input(&keys, p ^ input_diff)
                == output_diff
        })
        .count();
    hits as f64 / cipher.block_count() as f64
}

/// Distribution of the difference after `rounds - 1` rounds for a given
/// input difference, propagated through the DDT round by round.
pub fn differential_distribution(cipher: &ToyCipher, input_diff: Block) -> Vec<f64> {
    let size = cipher.block_count() as usize;
    let ddt = cipher.sbox().ddt();
    let nibbles = cipher.nibbles();
    let mut dist = vec![0.0; size];
    dist[input_diff as usize] = 1.0;
    for _ in 0..cipher.rounds() - 1 {
        let mut next = vec![0.0; size];
        for (diff, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            // expand the S-layer output differences nibble by nibble
            let mut partial: Vec<(Block, f64)> = vec![(0, p)];
            for nib in 0..nibbles {
                let dx = (diff >> (nib * SBOX_BITS)) & 0xF;
                let mut grown = Vec::with_capacity(partial.len() * 4);
                for &(acc, q) in &partial {
                    for (dy, &count) in ddt[dx].iter().enumerate() {
                        if count != 0 {
                            grown.push((
                                acc | (dy as Block) << (nib * SBOX_BITS),
                                q * f64::from(count) / 16.0,
                            ));
                        }
                    }
                }
                partial = grown;
            }
            for (out, q) in partial {
                next[cipher.pbox().apply(out) as usize] += q;
            }
        }
        dist = next;
    }
    dist
}

/// Highest-probability differential whose output has exactly
/// `active_nibbles` non-zero nibbles. Ties go to the smallest input, then
/// output difference.
pub fn best_differential(cipher: &ToyCipher, active_nibbles: u32) -> Option<Differential> {
    let mut best: Option<Differential> = None;
    for input_diff in 1..cipher.block_count() as Block {
        let dist = differential_distribution(cipher, input_diff);
        for (output_diff, &p) in dist.iter().enumerate() {
            let output_diff = output_diff as Block;
            if p == 0.0 || active_nibble_count(output_diff) != active_nibbles {
                continue;
            }
            if best.is_none_or(|b| p > b.estimated_probability) {
                best = Some(Differential {
                    input_diff,
                    output_diff,
                    estimated_probability: p,
                });
            }
        }
    }
    best
}

pub fn active_nibble_count(diff: Block) -> u32 {
    (0..Block::BITS / SBOX_BITS)
        .filter(|nib| diff >> (nib * SBOX_BITS) & 0xF != 0)
        .count() as u32
}
