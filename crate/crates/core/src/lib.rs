//! Simulated quantum differential cryptanalysis of a toy SPN cipher.
//!
//! The crate builds differential attack instances on a small
//! substitution-permutation cipher, runs the classical key-recovery
//! count, and runs the quantum variant on a state-vector simulator:
//! quantum counting estimates the right pairs per subkey guess and a
//! maximum-finding loop picks the subkey with the largest estimate.

pub mod attack;
pub mod classical;
pub mod counting;
pub mod error;
pub mod max_finding;
pub mod selftest;
pub mod statevector;
pub mod toy_cipher;

pub use attack::{run_attack, AttackConfig, AttackReport, AttackResult, Mode};
pub use classical::{classical_attack, count_right_pairs, count_table, CountTable};
pub use counting::{
    counting_error_bound, quantum_count, within_bound, CountEstimate, CountingParams,
};
pub use error::{QdcaError, Result};
pub use max_finding::{
    find_max_subkey, grover_search_marked, oracle_o1, CostModel, ExactCounts, MaxFindingConfig,
    MaxFindingRun, QuantumCounts, SearchBudget, SubkeyCounts,
};
pub use statevector::{Register, RegisterMap, StateVector};
pub use toy_cipher::{
    gen_pairs, AttackInstance, Block, Characteristic, MasterKey, PairSet, ToyCipher,
    DEFAULT_PLANTED_KEY,
};
