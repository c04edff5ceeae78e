use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::counting::{default_accuracy_bits, CountingParams};
use crate::error::{QdcaError, Result};
use crate::max_finding::MaxFindingConfig;
use crate::statevector::DEFAULT_QUBIT_CAP;
use crate::toy_cipher::{
    AttackInstance, Characteristic, CharacteristicConfig, CipherConfig, MasterKey, ToyCipher,
    DEFAULT_PLANTED_KEY,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Quantum,
    #[default]
    Both,
}

impl Mode {
    pub fn runs_classical(self) -> bool {
        matches!(self, Mode::Classical | Mode::Both)
    }

    pub fn runs_quantum(self) -> bool {
        matches!(self, Mode::Quantum | Mode::Both)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Classical => "classical",
            Mode::Quantum => "quantum",
            Mode::Both => "both",
        })
    }
}

impl FromStr for Mode {
    type Err = QdcaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Mode::Classical),
            "quantum" => Ok(Mode::Quantum),
            "both" => Ok(Mode::Both),
            other => Err(QdcaError::Config(format!("unknown mode `{other}`"))),
        }
    }
}

/// Every knob of an attack run. Absent fields take the defaults below.
///
/// ```json
/// {
///   "cipher": { "block_width": 8, "rounds": 4 },
///   "characteristic": null,
///   "k": 4, "n": 6, "m": null, "epsilon": 0.1,
///   "c": 4, "m0": null,
///   "master_key": 106, "master_seed": 42, "trials": 100,
///   "mode": "both", "output_dir": "out"
/// }
/// ```
///
/// Without an explicit characteristic the best DDT route with
/// `ceil(k/4)` active nibbles is planted under `master_key`. `m` defaults to
/// `ceil(n/2) + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttackConfig {
    pub cipher: CipherConfig,
    pub characteristic: Option<CharacteristicConfig>,
    pub k: u32,
    pub n: u32,
    pub m: Option<u32>,
    pub epsilon: f64,
    pub c: u32,
    pub m0: Option<u64>,
    pub master_key: u64,
    pub master_seed: u64,
    pub trials: u32,
    pub mode: Mode,
    pub output_dir: Option<PathBuf>,
}

impl Default for AttackConfig {
    fn default() -> Self {
        Self {
            cipher: CipherConfig::default(),
            characteristic: None,
            k: 4,
            n: 6,
            m: None,
            epsilon: 0.1,
            c: 4,
            m0: None,
            master_key: DEFAULT_PLANTED_KEY.0,
            master_seed: 42,
            trials: 100,
            mode: Mode::Both,
            output_dir: None,
        }
    }
}

impl AttackConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn key(&self) -> MasterKey {
        MasterKey(self.master_key)
    }

    pub fn accuracy_bits(&self) -> u32 {
        self.m.unwrap_or_else(|| default_accuracy_bits(self.n))
    }

    pub fn counting_params(&self) -> Result<CountingParams> {
        CountingParams::new(self.n, self.accuracy_bits(), self.epsilon)
    }

    pub fn max_finding(&self) -> MaxFindingConfig {
        MaxFindingConfig {
            c: self.c,
            m0: self.m0,
        }
    }

    pub fn build_cipher(&self) -> Result<ToyCipher> {
        self.cipher.build()
    }

    pub fn build_characteristic(&self, cipher: &ToyCipher) -> Result<Characteristic> {
        match &self.characteristic {
            Some(doc) => doc.build(cipher),
            None => Characteristic::for_subkey_bits(cipher, self.key(), self.k),
        }
    }

    /// Steps (1) and (2) of the attack: characteristic and pair generation.
    pub fn build_instance(&self) -> Result<AttackInstance> {
        self.validate()?;
        let cipher = self.build_cipher()?;
        let ch = self.build_characteristic(&cipher)?;
        if ch.subkey_bits() != self.k {
            return Err(QdcaError::Config(format!(
                "characteristic targets {} subkey bits but k = {}",
                ch.subkey_bits(),
                self.k
            )));
        }
        AttackInstance::new(cipher, self.key(), ch, self.n)
    }

    pub fn validate(&self) -> Result<()> {
        let cipher = self.build_cipher()?;
        let width = cipher.block_width();
        if self.k == 0 || self.k > width {
            return Err(QdcaError::Config(format!(
                "k = {} must lie in 1..={width}",
                self.k
            )));
        }
        if self.n == 0 || self.n > width {
            return Err(QdcaError::Config(format!(
                "n = {} must lie in 1..={width}",
                self.n
            )));
        }
        if self.c == 0 {
            return Err(QdcaError::Config("c must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(QdcaError::Config("trials must be at least 1".into()));
        }
        if self.m0 == Some(0) {
            return Err(QdcaError::Config("m0 must be positive".into()));
        }
        let params = self.counting_params()?;
        let needed = params.simulated_width().max(self.k as usize);
        if needed > DEFAULT_QUBIT_CAP {
            return Err(QdcaError::QubitCap {
                requested: needed,
                cap: DEFAULT_QUBIT_CAP,
            });
        }
        Ok(())
    }
}

/// Independent seed for trial `index`, a SplitMix64 hash of the pair.
pub fn trial_seed(master_seed: u64, index: u32) -> u64 {
    let mut state = master_seed ^ u64::from(index).wrapping_mul(0xD1B5_4A32_D192_ED03);
    crate::toy_cipher::splitmix64(&mut state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = AttackConfig::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(AttackConfig::from_json(&text).unwrap(), c);
        assert_eq!(AttackConfig::from_json("{}").unwrap(), c);
        assert_eq!(c.counting_params().unwrap().t(), 7);
    }

    #[test]
    fn partial_document() {
        let c = AttackConfig::from_json(r#"{"k": 2, "mode": "quantum", "trials": 3}"#).unwrap();
        assert_eq!((c.k, c.n, c.trials, c.mode), (2, 6, 3, Mode::Quantum));
    }

    #[test]
    fn invalid_documents() {
        for doc in [
            r#"{"k": 0}"#,
            r#"{"k": 9}"#,
            r#"{"n": 9}"#,
            r#"{"c": 0}"#,
            r#"{"trials": 0}"#,
            r#"{"epsilon": 0.7}"#,
            r#"{"mode": "fast"}"#,
            r#"{"kk": 4}"#,
            r#"{"m": 30}"#,
        ] {
            assert!(AttackConfig::from_json(doc).is_err(), "{doc}");
        }
    }

    #[test]
    fn characteristic_must_match_k() {
        let c = AttackConfig {
            k: 3,
            characteristic: Some(CharacteristicConfig {
                plaintext_diff: "B0".into(),
                output_diff: Some("10".into()),
                left_half_mask: None,
                probability: 0.5,
                target_bits: "0F".into(),
                fixed_subkey_bits: None,
            }),
            ..AttackConfig::default()
        };
        assert!(c.build_instance().is_err());
    }

    #[test]
    fn seeds_differ_per_trial() {
        let seeds: std::collections::HashSet<_> = (0..1000).map(|i| trial_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_ne!(trial_seed(1, 0), trial_seed(2, 0));
    }

    #[test]
    fn mode_parsing() {
        for m in [Mode::Classical, Mode::Quantum, Mode::Both] {
            assert_eq!(m.to_string().parse::<Mode>().unwrap(), m);
        }
        assert!("x".parse::<Mode>().is_err());
    }
}
