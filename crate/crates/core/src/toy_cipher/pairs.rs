use crate::error::{QdcaError, Result};

use super::characteristic::Characteristic;
use super::cipher::{Block, MasterKey, ToyCipher, SBOX_BITS};

/// One chosen-plaintext pair and its ciphertexts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairEntry {
    pub plaintexts: (Block, Block),
    pub ciphertexts: (Block, Block),
}

/// `N = 2^n` pairs `(P_i, P_i ^ P')` with `P_i = i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairSet {
    index_bits: u32,
    plaintext_diff: Block,
    entries: Vec<PairEntry>,
}

impl PairSet {
    /// `n`.
    pub fn index_bits(&self) -> u32 {
        self.index_bits
    }

    /// `N`.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Size of the padded counting space, `2N`.
    pub fn padded_len(&self) -> usize {
        2 * self.entries.len()
    }

    pub fn plaintext_diff(&self) -> Block {
        self.plaintext_diff
    }

    pub fn entries(&self) -> &[PairEntry] {
        &self.entries
    }

    /// Pair `j`, or `None` for padding indices `j >= N`.
    pub fn get(&self, j: usize) -> Option<&PairEntry> {
        self.entries.get(j)
    }

    /// A pair set with no entries, for degenerate checks.
    pub fn empty(plaintext_diff: Block) -> Self {
        Self {
            index_bits: 0,
            plaintext_diff,
            entries: Vec::new(),
        }
    }
}

/// Requests the ciphertexts of `N = 2^n` pairs with difference `diff`.
pub fn gen_pairs(cipher: &ToyCipher, key: MasterKey, diff: Block, n: u32) -> Result<PairSet> {
    if diff == 0 {
        return Err(QdcaError::DegenerateDifference);
    }
    cipher.check_block(u64::from(diff))?;
    if n == 0 || n > cipher.block_width() {
        return Err(QdcaError::TooManyPairs {
            pairs: 1u64.checked_shl(n).unwrap_or(u64::MAX),
            width: cipher.block_width(),
        });
    }
    let keys = cipher.round_keys(key);
    let entries = (0..1u32 << n)
        .map(|i| {
            let p0 = i as Block;
            let p1 = p0 ^ diff;
            PairEntry {
                plaintexts: (p0, p1),
                ciphertexts: (
                    cipher.encrypt_block(&keys, p0),
                    cipher.encrypt_block(&keys, p1),
                ),
            }
        })
        .collect();
    Ok(PairSet {
        index_bits: n,
        plaintext_diff: diff,
        entries,
    })
}

/// `e(x, j)`: one-round trial decryption of pair `j` under candidate `x`.
///
/// Checked nibbles must decrypt to the difference given by `E`. Nibbles
/// with no key guess act as a filter: where `E` predicts no difference, the
/// ciphertexts must agree there. Padding indices are never right pairs.
pub fn is_right_pair(
    cipher: &ToyCipher,
    ch: &Characteristic,
    x: u64,
    j: usize,
    pairs: &PairSet,
) -> bool {
    match pairs.get(j) {
        None => false,
        Some(entry) => right_pair_with_guess(cipher, ch, ch.subkey_guess(x), entry),
    }
}

pub(crate) fn right_pair_with_guess(
    cipher: &ToyCipher,
    ch: &Characteristic,
    guess: Block,
    entry: &PairEntry,
) -> bool {
    let (c0, c1) = entry.ciphertexts;
    let expected = ch.expected_output_difference(c0, c1);
    let checked = ch.checked_nibbles();
    let sbox = cipher.sbox();
    (0..cipher.nibbles()).all(|nib| {
        let shift = nib * SBOX_BITS;
        let a = (c0 >> shift) as u8 & 0xF;
        let b = (c1 >> shift) as u8 & 0xF;
        let want = (expected >> shift) as u8 & 0xF;
        if checked >> shift & 0xF != 0 {
            let k = (guess >> shift) as u8 & 0xF;
            sbox.invert(a ^ k) ^ sbox.invert(b ^ k) == want
        } else {
            want != 0 || a == b
        }
    })
}

/// Everything an attack run needs: the cipher, the planted key, the
/// characteristic and the pairs obtained from the cryptosystem.
#[derive(Clone, Debug)]
pub struct AttackInstance {
    pub cipher: ToyCipher,
    pub key: MasterKey,
    pub characteristic: Characteristic,
    pub pairs: PairSet,
}

impl AttackInstance {
    pub fn new(
        cipher: ToyCipher,
        key: MasterKey,
        characteristic: Characteristic,
        n: u32,
    ) -> Result<Self> {
        if characteristic.target_bits() & !cipher.mask() != 0 {
            return Err(QdcaError::InvalidCharacteristic(format!(
                "target bits {:#x} exceed the {}-bit block",
                characteristic.target_bits(),
                cipher.block_width()
            )));
        }
        let pairs = gen_pairs(&cipher, key, characteristic.plaintext_diff(), n)?;
        Ok(Self {
            cipher,
            key,
            characteristic,
            pairs,
        })
    }

    /// `k`.
    pub fn subkey_bits(&self) -> u32 {
        self.characteristic.subkey_bits()
    }

    /// `K`.
    pub fn candidate_count(&self) -> u64 {
        self.characteristic.candidate_count()
    }

    /// `n`.
    pub fn index_bits(&self) -> u32 {
        self.pairs.index_bits()
    }

    /// The candidate subkey `z` derived from the planted key.
    pub fn true_subkey(&self) -> u64 {
        self.characteristic
            .candidate_of(self.cipher.last_round_subkey(self.key))
    }

    pub fn check_subkey(&self, x: u64) -> Result<()> {
        if x >= self.candidate_count() {
            return Err(QdcaError::SubkeyOutOfRange {
                subkey: x,
                bits: self.subkey_bits(),
            });
        }
        Ok(())
    }

    pub fn is_right_pair(&self, x: u64, j: usize) -> bool {
        is_right_pair(&self.cipher, &self.characteristic, x, j, &self.pairs)
    }

    /// `e(x, j)` for every `j < 2N`.
    pub fn right_pair_marks(&self, x: u64) -> Vec<bool> {
        let guess = self.characteristic.subkey_guess(x);
        let mut marks: Vec<bool> = self
            .pairs
            .entries()
            .iter()
            .map(|e| right_pair_with_guess(&self.cipher, &self.characteristic, guess, e))
            .collect();
        marks.resize(self.pairs.padded_len(), false);
        marks
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toy_cipher::characteristic::ExpectedDifference;

    #[test]
    fn pairs_follow_index_construction() {
        let cipher = ToyCipher::default();
        let pairs = gen_pairs(&cipher, MasterKey(7), 0x0B, 2).unwrap();
        let pts: Vec<_> = pairs.entries().iter().map(|e| e.plaintexts).collect();
        assert_eq!(pts, vec![(0, 0x0B), (1, 0x0A), (2, 0x09), (3, 0x08)]);
        assert_eq!(pairs.padded_len(), 8);
        for e in pairs.entries() {
            assert_eq!(e.plaintexts.0 ^ e.plaintexts.1, 0x0B);
            assert_eq!(
                e.ciphertexts.0,
                cipher
                    .encrypt(MasterKey(7), u64::from(e.plaintexts.0))
                    .unwrap()
            );
        }
    }

    #[test]
    fn gen_pairs_errors() {
        let cipher = ToyCipher::default();
        assert!(matches!(
            gen_pairs(&cipher, MasterKey(0), 0, 3),
            Err(QdcaError::DegenerateDifference)
        ));
        assert!(matches!(
            gen_pairs(&cipher, MasterKey(0), 1, 9),
            Err(QdcaError::TooManyPairs { .. })
        ));
        assert!(gen_pairs(&cipher, MasterKey(0), 1, 0).is_err());
        assert!(gen_pairs(&cipher, MasterKey(0), 0x100, 2).is_err());
        assert_eq!(gen_pairs(&cipher, MasterKey(0), 1, 8).unwrap().len(), 256);
    }

    #[test]
    fn padding_is_never_right() {
        let cipher = ToyCipher::default();
        let ch = Characteristic::new(0xB0, ExpectedDifference::Constant(0x10), 0.1, 0xF0).unwrap();
        let pairs = gen_pairs(&cipher, MasterKey(1), 0xB0, 3).unwrap();
        for x in 0..16 {
            for j in 8..16 {
                assert!(!is_right_pair(&cipher, &ch, x, j, &pairs));
            }
        }
    }

    #[test]
    fn instance_marks_cover_padded_space() {
        let cipher = ToyCipher::default();
        let key = MasterKey(0x6A);
        let ch = Characteristic::for_subkey_bits(&cipher, key, 4).unwrap();
        let inst = AttackInstance::new(cipher, key, ch, 4).unwrap();
        for x in 0..16 {
            let marks = inst.right_pair_marks(x);
            assert_eq!(marks.len(), 32);
            assert!(marks[16..].iter().all(|m| !m));
            for (j, &m) in marks.iter().enumerate() {
                assert_eq!(m, inst.is_right_pair(x, j));
            }
        }
        assert!(inst.check_subkey(16).is_err());
    }
}
