use thiserror::Error;

/// Errors surfaced by the simulator and the attack drivers.
#[derive(Debug, Error)]
pub enum QdcaError {
    #[error("value {value:#x} is outside the {width}-bit block domain")]
    BlockOutOfRange { value: u64, width: u32 },

    #[error("invalid s-box: {0}")]
    InvalidSbox(String),

    #[error("invalid bit permutation: {0}")]
    InvalidPbox(String),

    #[error("invalid cipher configuration: {0}")]
    InvalidCipher(String),

    #[error("plaintext difference must be non-zero")]
    DegenerateDifference,

    #[error("{pairs} pairs do not fit in a {width}-bit block")]
    TooManyPairs { pairs: u64, width: u32 },

    #[error("invalid characteristic: {0}")]
    InvalidCharacteristic(String),

    #[error("subkey {subkey:#x} is outside the {bits}-bit candidate space")]
    SubkeyOutOfRange { subkey: u64, bits: u32 },

    #[error("{requested} qubits exceeds the simulation cap of {cap}")]
    QubitCap { requested: usize, cap: usize },

    #[error("register qubits {offset}..{end} exceed the {num_qubits}-qubit state")]
    RegisterOutOfBounds {
        offset: usize,
        end: usize,
        num_qubits: usize,
    },

    #[error("register `{0}` overlaps an existing register")]
    RegisterOverlap(String),

    #[error("control qubit {0} lies inside the target register")]
    ControlOverlap(usize),

    #[error("power {0} is not a power of two")]
    NotPowerOfTwo(u64),

    #[error("state norm {0:e} is too small to measure")]
    CorruptedState(f64),

    #[error("invalid counting parameters: {0}")]
    InvalidParams(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, QdcaError>;
