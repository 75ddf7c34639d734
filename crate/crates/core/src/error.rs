use thiserror::Error;

use crate::params::Violation;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("coefficient {value} is not reduced mod {q}")]
    CoefficientOutOfRange { value: u64, q: u64 },

    #[error("ring element is not invertible")]
    NotInvertible,

    #[error("trapdoor tag is not invertible")]
    TagNotInvertible,

    #[error("perturbation covariance is not positive definite for the given zeta")]
    NonPositiveDefinite,

    #[error("rejection loop exhausted after {0} attempts")]
    ExhaustedRejection(usize),

    #[error("preimage self-check failed: a^T x != u")]
    PreimageCheckFailed,

    #[error("message is not binary")]
    NonBinaryMessage,

    #[error("ciphertext rejected")]
    Reject,

    #[error("trapdoor variant does not match the requested test")]
    VariantMismatch,

    #[error("trapdoor is bound to a different ciphertext")]
    BindingMismatch,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("invalid parameters: {}", format_violations(.0))]
    InvalidParams(Vec<Violation>),

    #[error("unsupported ring: n={n}, q={q}")]
    UnsupportedRing { n: usize, q: u64 },

    #[error(transparent)]
    Codec(#[from] crate::codec::CodecError),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
