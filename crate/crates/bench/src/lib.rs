//! Shared fixtures for the kernel benchmarks.

use qdca_core::counting::CountingParams;
use qdca_core::statevector::{Complex64, StateVector};
use qdca_core::toy_cipher::{AttackInstance, Characteristic, ToyCipher, DEFAULT_PLANTED_KEY};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The default attack instance at `k` subkey bits and `2^n` pairs.
pub fn instance(k: u32, n: u32) -> AttackInstance {
    let cipher = ToyCipher::default();
    let ch =
        Characteristic::for_subkey_bits(&cipher, DEFAULT_PLANTED_KEY, k).expect("characteristic");
    AttackInstance::new(cipher, DEFAULT_PLANTED_KEY, ch, n).expect("instance")
}

pub fn params(n: u32) -> CountingParams {
    CountingParams::default_profile(n).expect("params")
}

/// A normalised state with pseudo-random amplitudes.
pub fn random_state(num_qubits: usize, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut amps: Vec<Complex64> = (0..1usize << num_qubits)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(amps).expect("normalised")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_valid() {
        assert!((random_state(6, 9).norm_sqr() - 1.0).abs() < 1e-12);
        let inst = instance(4, 6);
        assert_eq!(inst.candidate_count(), 16);
        assert_eq!(params(6).t(), 7);
    }
}
