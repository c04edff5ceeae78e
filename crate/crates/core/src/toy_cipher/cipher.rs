use serde::{Deserialize, Serialize};

use crate::error::{QdcaError, Result};

/// A cipher block. Only the low `block_width` bits are meaningful.
pub type Block = u16;

/// Nibble width of every S-box.
pub const SBOX_BITS: u32 = 4;

/// The 4-bit S-box used by most SPN tutorials.
pub const TUTORIAL_SBOX: [u8; 16] = [
    0xE, 0x4, 0xD, 0x1, 0x2, 0xF, 0xB, 0x8, 0x3, 0xA, 0x6, 0xC, 0x5, 0x9, 0x0, 0x7,
];

/// Default 8-bit bit permutation: bit `i` moves to position `DEFAULT_PBOX[i]`.
/// Three bits of each nibble cross to the other nibble.
pub const DEFAULT_PBOX: [u8; 8] = [7, 6, 5, 2, 3, 1, 0, 4];

pub const DEFAULT_BLOCK_WIDTH: u32 = 8;
pub const DEFAULT_ROUNDS: usize = 4;

/// A bijective 4-bit substitution table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sbox {
    forward: [u8; 16],
    inverse: [u8; 16],
}

impl Sbox {
    pub fn new(table: [u8; 16]) -> Result<Self> {
        let mut inverse = [0xFFu8; 16];
        for (input, &output) in table.iter().enumerate() {
            if output > 0xF {
                return Err(QdcaError::InvalidSbox(format!(
                    "entry {output:#x} is not a nibble"
                )));
            }
            if inverse[output as usize] != 0xFF {
                return Err(QdcaError::InvalidSbox(format!(
                    "output {output:#x} appears twice"
                )));
            }
            inverse[output as usize] = input as u8;
        }
        Ok(Self {
            forward: table,
            inverse,
        })
    }

    /// Parses 16 hex digits, e.g. `"E4D12FB83A6C5907"`.
    pub fn from_hex(text: &str) -> Result<Self> {
        let digits: Vec<u8> = text
            .chars()
            .filter(|c| !c.is_whitespace() && *c != ',')
            .map(|c| {
                c.to_digit(16)
                    .map(|d| d as u8)
                    .ok_or_else(|| QdcaError::InvalidSbox(format!("`{c}` is not a hex digit")))
            })
            .collect::<Result<_>>()?;
        let table: [u8; 16] = digits.try_into().map_err(|d: Vec<u8>| {
            QdcaError::InvalidSbox(format!("expected 16 digits, got {}", d.len()))
        })?;
        Self::new(table)
    }

    pub fn to_hex(&self) -> String {
        self.forward.iter().map(|d| format!("{d:X}")).collect()
    }

    #[inline]
    pub fn apply(&self, nibble: u8) -> u8 {
        self.forward[nibble as usize & 0xF]
    }

    #[inline]
    pub fn invert(&self, nibble: u8) -> u8 {
        self.inverse[nibble as usize & 0xF]
    }

    pub fn table(&self) -> &[u8; 16] {
        &self.forward
    }

    /// Difference distribution table: `ddt[dx][dy]` counts inputs `a` with
    /// `S(a) ^ S(a ^ dx) == dy`.
    pub fn ddt(&self) -> [[u8; 16]; 16] {
        let mut table = [[0u8; 16]; 16];
        for dx in 0..16u8 {
            for a in 0..16u8 {
                let dy = self.apply(a) ^ self.apply(a ^ dx);
                table[dx as usize][dy as usize] += 1;
            }
        }
        table
    }
}

impl Default for Sbox {
    fn default() -> Self {
        Self::new(TUTORIAL_SBOX).expect("tutorial s-box is a bijection")
    }
}

/// Bit permutation over the block: bit `i` of the input lands on bit `map[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pbox {
    map: Vec<u8>,
    inverse: Vec<u8>,
}

impl Pbox {
    pub fn new(map: Vec<u8>) -> Result<Self> {
        let width = map.len();
        let mut inverse = vec![u8::MAX; width];
        for (i, &target) in map.iter().enumerate() {
            let t = target as usize;
            if t >= width {
                return Err(QdcaError::InvalidPbox(format!(
                    "position {t} is outside {width} bits"
                )));
            }
            if inverse[t] != u8::MAX {
                return Err(QdcaError::InvalidPbox(format!("position {t} is hit twice")));
            }
            inverse[t] = i as u8;
        }
        Ok(Self { map, inverse })
    }

    pub fn identity(width: u32) -> Self {
        Self::new((0..width as u8).collect()).expect("identity is a bijection")
    }

    pub fn width(&self) -> u32 {
        self.map.len() as u32
    }

    pub fn map(&self) -> &[u8] {
        &self.map
    }

    pub fn apply(&self, x: Block) -> Block {
        scatter_bits(x, &self.map)
    }

    pub fn invert(&self, x: Block) -> Block {
        scatter_bits(x, &self.inverse)
    }
}

impl Default for Pbox {
    fn default() -> Self {
        Self::new(DEFAULT_PBOX.to_vec()).expect("default pbox is a bijection")
    }
}

fn scatter_bits(x: Block, map: &[u8]) -> Block {
    map.iter()
        .enumerate()
        .filter(|(i, _)| x >> i & 1 == 1)
        .fold(0, |acc, (_, &to)| acc | 1 << to)
}

/// The secret the attacked cryptosystem is keyed with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MasterKey(pub u64);

/// How a master key expands into `rounds + 1` subkeys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KeySchedule {
    /// Successive SplitMix64 outputs seeded by the master key, truncated to the block.
    SplitMix,
    /// Fixed subkeys, ignoring the master key.
    Explicit(Vec<Block>),
}

/// Expanded subkeys; `last()` is the final whitening key the attack targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundKeys(Vec<Block>);

impl RoundKeys {
    pub fn as_slice(&self) -> &[Block] {
        &self.0
    }

    pub fn last(&self) -> Block {
        *self.0.last().expect("at least two subkeys")
    }
}

/// A small substitution-permutation network.
///
/// Rounds `0..R-1` each xor a subkey, substitute every nibble and permute
/// bits. The last round xors a subkey, substitutes, and xors the final
/// whitening subkey, which is the target of the differential attack.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyCipher {
    block_width: u32,
    sbox: Sbox,
    pbox: Pbox,
    rounds: usize,
    schedule: KeySchedule,
}

impl Default for ToyCipher {
    fn default() -> Self {
        Self::new(
            DEFAULT_BLOCK_WIDTH,
            Sbox::default(),
            Pbox::default(),
            DEFAULT_ROUNDS,
            KeySchedule::SplitMix,
        )
        .expect("default cipher is valid")
    }
}

impl ToyCipher {
    pub fn new(
        block_width: u32,
        sbox: Sbox,
        pbox: Pbox,
        rounds: usize,
        schedule: KeySchedule,
    ) -> Result<Self> {
        if block_width == 0 || block_width > 16 || !block_width.is_multiple_of(SBOX_BITS) {
            return Err(QdcaError::InvalidCipher(format!(
                "block width {block_width} must be a multiple of 4 in 4..=16"
            )));
        }
        if pbox.width() != block_width {
            return Err(QdcaError::InvalidPbox(format!(
                "covers {} bits but the block has {block_width}",
                pbox.width()
            )));
        }
        if rounds == 0 {
            return Err(QdcaError::InvalidCipher(
                "at least one round is required".into(),
            ));
        }
        if let KeySchedule::Explicit(keys) = &schedule {
            if keys.len() != rounds + 1 {
                return Err(QdcaError::InvalidCipher(format!(
                    "explicit schedule needs {} subkeys, got {}",
                    rounds + 1,
                    keys.len()
                )));
            }
            let mask = (1u32 << block_width) - 1;
            if let Some(k) = keys.iter().find(|&&k| u32::from(k) > mask) {
                return Err(QdcaError::BlockOutOfRange {
                    value: u64::from(*k),
                    width: block_width,
                });
            }
        }
        Ok(Self {
            block_width,
            sbox,
            pbox,
            rounds,
            schedule,
        })
    }

    pub fn block_width(&self) -> u32 {
        self.block_width
    }

    pub fn nibbles(&self) -> u32 {
        self.block_width / SBOX_BITS
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn sbox(&self) -> &Sbox {
        &self.sbox
    }

    pub fn pbox(&self) -> &Pbox {
        &self.pbox
    }

    pub fn schedule(&self) -> &KeySchedule {
        &self.schedule
    }

    /// Number of distinct blocks, `2^block_width`.
    pub fn block_count(&self) -> u64 {
        1 << self.block_width
    }

    pub fn mask(&self) -> Block {
        (self.block_count() - 1) as Block
    }

    pub fn check_block(&self, value: u64) -> Result<Block> {
        if value >= self.block_count() {
            return Err(QdcaError::BlockOutOfRange {
                value,
                width: self.block_width,
            });
        }
        Ok(value as Block)
    }

    pub fn round_keys(&self, key: MasterKey) -> RoundKeys {
        match &self.schedule {
            KeySchedule::Explicit(keys) => RoundKeys(keys.clone()),
            KeySchedule::SplitMix => {
                let mut state = key.0;
                let keys = (0..=self.rounds)
                    .map(|_| (splitmix64(&mut state) as Block) & self.mask())
                    .collect();
                RoundKeys(keys)
            }
        }
    }

    /// The subkey a successful attack recovers.
    pub fn last_round_subkey(&self, key: MasterKey) -> Block {
        self.round_keys(key).last()
    }

    pub fn substitute(&self, x: Block) -> Block {
        self.map_nibbles(x, |n| self.sbox.apply(n))
    }

    pub fn substitute_inverse(&self, x: Block) -> Block {
        self.map_nibbles(x, |n| self.sbox.invert(n))
    }

    #[inline]
    fn map_nibbles(&self, x: Block, f: impl Fn(u8) -> u8) -> Block {
        (0..self.nibbles()).fold(0, |acc, i| {
            let shift = i * SBOX_BITS;
            acc | Block::from(f((x >> shift) as u8 & 0xF)) << shift
        })
    }

    pub fn encrypt(&self, key: MasterKey, pt: u64) -> Result<Block> {
        let pt = self.check_block(pt)?;
        Ok(self.encrypt_block(&self.round_keys(key), pt))
    }

    pub fn decrypt(&self, key: MasterKey, ct: u64) -> Result<Block> {
        let ct = self.check_block(ct)?;
        Ok(self.decrypt_block(&self.round_keys(key), ct))
    }

    pub fn encrypt_block(&self, keys: &RoundKeys, pt: Block) -> Block {
        let k = keys.as_slice();
        let x = self.last_round_input(keys, pt);
        self.substitute(x ^ k[self.rounds - 1]) ^ k[self.rounds]
    }

    pub fn decrypt_block(&self, keys: &RoundKeys, ct: Block) -> Block {
        let k = keys.as_slice();
        let mut x = self.substitute_inverse(ct ^ k[self.rounds]) ^ k[self.rounds - 1];
        for r in (0..self.rounds - 1).rev() {
            x = self.substitute_inverse(self.pbox.invert(x)) ^ k[r];
        }
        x
    }

    /// State after the first `rounds - 1` rounds, i.e. the value whose
    /// difference a characteristic predicts.
    pub fn last_round_input(&self, keys: &RoundKeys, pt: Block) -> Block {
        let k = keys.as_slice();
        (0..self.rounds - 1).fold(pt, |x, r| self.pbox.apply(self.substitute(x ^ k[r])))
    }
}

/// One SplitMix64 step.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
