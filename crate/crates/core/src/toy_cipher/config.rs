//! JSON documents describing a cipher and a characteristic.
//!
//! ```json
//! {
//!   "block_width": 8,
//!   "sbox": "E4D12FB83A6C5907",
//!   "pbox": [7, 6, 5, 2, 3, 1, 0, 4],
//!   "rounds": 4
//! }
//! ```
//!
//! Differences and masks are hex strings (`"B0"` or `"0xB0"`), the
//! probability is a plain decimal.

use serde::{Deserialize, Serialize};

use crate::error::{QdcaError, Result};

use super::characteristic::{Characteristic, ExpectedDifference};
use super::cipher::{
    Block, KeySchedule, Pbox, Sbox, ToyCipher, DEFAULT_BLOCK_WIDTH, DEFAULT_ROUNDS,
};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CipherConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_width: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sbox: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pbox: Option<Vec<u8>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    /// Explicit subkeys (hex); absent means the SplitMix schedule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_keys: Option<Vec<String>>,
}

impl CipherConfig {
    pub fn build(&self) -> Result<ToyCipher> {
        let width = self.block_width.unwrap_or(DEFAULT_BLOCK_WIDTH);
        let sbox = match &self.sbox {
            Some(hex) => Sbox::from_hex(hex)?,
            None => Sbox::default(),
        };
        let pbox = match &self.pbox {
            Some(map) => Pbox::new(map.clone())?,
            None if width == DEFAULT_BLOCK_WIDTH => Pbox::default(),
            None => Pbox::identity(width),
        };
        let schedule = match &self.round_keys {
            Some(keys) => KeySchedule::Explicit(
                keys.iter()
                    .map(|k| parse_hex_block(k))
                    .collect::<Result<_>>()?,
            ),
            None => KeySchedule::SplitMix,
        };
        ToyCipher::new(
            width,
            sbox,
            pbox,
            self.rounds.unwrap_or(DEFAULT_ROUNDS),
            schedule,
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacteristicConfig {
    pub plaintext_diff: String,
    /// Constant expected difference at the last S-layer input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_diff: Option<String>,
    /// Mask of the ciphertext-dependent form `left_half(ct0 ^ ct1) ^ mask`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_half_mask: Option<String>,
    pub probability: f64,
    pub target_bits: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_subkey_bits: Option<String>,
}

impl CharacteristicConfig {
    pub fn build(&self, cipher: &ToyCipher) -> Result<Characteristic> {
        let expected = match (&self.output_diff, &self.left_half_mask) {
            (Some(d), None) => ExpectedDifference::Constant(parse_hex_block(d)?),
            (None, Some(m)) => ExpectedDifference::LeftHalfXor {
                mask: parse_hex_block(m)?,
                half_width: cipher.block_width() / 2,
            },
            _ => {
                return Err(QdcaError::Config(
                    "exactly one of output_diff and left_half_mask is required".into(),
                ))
            }
        };
        let diff = parse_hex_block(&self.plaintext_diff)?;
        cipher.check_block(u64::from(diff))?;
        let target = parse_hex_block(&self.target_bits)?;
        cipher.check_block(u64::from(target))?;
        let ch = Characteristic::new(diff, expected, self.probability, target)?;
        Ok(match &self.fixed_subkey_bits {
            Some(f) => ch.with_fixed_bits(parse_hex_block(f)?),
            None => ch,
        })
    }

    pub fn from_characteristic(ch: &Characteristic) -> Self {
        let (output_diff, left_half_mask) = match ch.expected() {
            ExpectedDifference::Constant(d) => (Some(format!("{d:02X}")), None),
            ExpectedDifference::LeftHalfXor { mask, .. } => (None, Some(format!("{mask:X}"))),
        };
        Self {
            plaintext_diff: format!("{:02X}", ch.plaintext_diff()),
            output_diff,
            left_half_mask,
            probability: ch.probability(),
            target_bits: format!("{:02X}", ch.target_bits()),
            fixed_subkey_bits: (ch.fixed_subkey_bits() != 0)
                .then(|| format!("{:02X}", ch.fixed_subkey_bits())),
        }
    }
}

pub fn parse_hex_block(text: &str) -> Result<Block> {
    let digits = text.trim();
    let digits = digits
        .strip_prefix("0x")
        .or_else(|| digits.strip_prefix("0X"))
        .unwrap_or(digits);
    Block::from_str_radix(digits, 16)
        .map_err(|e| QdcaError::Config(format!("`{text}` is not a hex block: {e}")))
}
