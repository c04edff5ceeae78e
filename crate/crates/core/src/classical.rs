//! Classical differential attack: exhaustive right-pair counting for every
//! candidate subkey, then argmax. Also the ground-truth oracle for the
//! quantum pipeline.

use std::io::Write;

use rayon::prelude::*;

use crate::error::Result;
use crate::toy_cipher::{AttackInstance, Characteristic, PairSet, ToyCipher};

/// `counts[x]` is the exact number of right pairs of candidate `x`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    counts: Vec<u64>,
}

impl CountTable {
    pub fn new(counts: Vec<u64>) -> Self {
        Self { counts }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, x: u64) -> u64 {
        self.counts[x as usize]
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Largest count, ties to the smallest subkey.
    pub fn argmax(&self) -> u64 {
        let mut best = 0;
        for (x, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = x;
            }
        }
        best as u64
    }

    /// `subkey_hex,count` rows under a versioned header.
    pub fn write_csv<W: Write>(&self, width_nibbles: usize, out: W) -> Result<()> {
        let mut out = out;
        writeln!(out, "# qdca count-table v1")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["subkey_hex", "count"])?;
        for (x, c) in self.counts.iter().enumerate() {
            w.write_record([format!("{x:0width_nibbles$X}"), c.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Number of `j < N` with `e(x, j) = 1`.
pub fn count_right_pairs(x: u64, pairs: &PairSet, cipher: &ToyCipher, ch: &Characteristic) -> u64 {
    (0..pairs.len())
        .filter(|&j| crate::toy_cipher::is_right_pair(cipher, ch, x, j, pairs))
        .count() as u64
}

/// Counts every candidate (in parallel, merged by index).
pub fn count_table(pairs: &PairSet, cipher: &ToyCipher, ch: &Characteristic) -> CountTable {
    let counts = (0..ch.candidate_count())
        .into_par_iter()
        .map(|x| count_right_pairs(x, pairs, cipher, ch))
        .collect();
    CountTable::new(counts)
}

/// Returns the subkey with the most right pairs and the full table.
pub fn classical_attack(
    pairs: &PairSet,
    cipher: &ToyCipher,
    ch: &Characteristic,
) -> (u64, CountTable) {
    let table = count_table(pairs, cipher, ch);
    (table.argmax(), table)
}

impl AttackInstance {
    pub fn count_table(&self) -> CountTable {
        count_table(&self.pairs, &self.cipher, &self.characteristic)
    }
}
