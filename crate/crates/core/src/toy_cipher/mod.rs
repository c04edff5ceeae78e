//! The attacked cipher: a small SPN, its differential characteristics,
//! chosen-plaintext pairs and the right-pair predicate `e(x, j)`.

mod characteristic;
mod cipher;
mod config;
mod pairs;

pub use characteristic::{
    active_nibble_count, best_differential, deposit_bits, differential_distribution, extract_bits,
    measure_probability, Characteristic, Differential, ExpectedDifference,
};
pub use cipher::{
    splitmix64, Block, KeySchedule, MasterKey, Pbox, RoundKeys, Sbox, ToyCipher,
    DEFAULT_BLOCK_WIDTH, DEFAULT_PBOX, DEFAULT_ROUNDS, SBOX_BITS, TUTORIAL_SBOX,
};
pub use config::{parse_hex_block, CharacteristicConfig, CipherConfig};
pub use pairs::{gen_pairs, is_right_pair, AttackInstance, PairEntry, PairSet};

/// Master key of the default planted instance.
pub const DEFAULT_PLANTED_KEY: MasterKey = MasterKey(0x6A);
