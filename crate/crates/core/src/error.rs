use thiserror::Error;

/// Largest modulus exponent `m` the engine accepts.
pub const MAX_MODULUS_EXP: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus exponent {0} is below the minimum of 3")]
    ModulusTooSmall(u32),

    #[error("modulus exponent {0} exceeds the supported cap of {MAX_MODULUS_EXP}")]
    WidthCapExceeded(u32),

    #[error("width {0} is outside the supported range 1..=64")]
    InvalidWidth(u32),

    #[error("expected an odd value, got {0}")]
    NotOdd(u64),

    #[error("2-adic valuation of zero is undefined")]
    ZeroValuation,

    #[error("R_i is defined only for i >= 2 (got {0})")]
    InvalidRIndex(u32),

    #[error("exponent k must be positive")]
    ZeroPower,

    #[error("character parameter c = {c} is outside [1, 2^{}]", .m - 2)]
    CharacterParamOutOfRange { m: u32, c: u64 },

    #[error("character sign must be +1 or -1, got {0}")]
    InvalidSign(i64),

    #[error("characters defined modulo 2^{left} and 2^{right} cannot be combined")]
    CharacterModulusMismatch { left: u32, right: u32 },

    #[error("character of conductor 2^{conductor} does not factor through 2^{target}")]
    NotInducible { conductor: u32, target: u32 },

    #[error("ring exponents {left} and {right} differ; lift first")]
    RingMismatch { left: u32, right: u32 },

    #[error("cannot lift from ring exponent {from} down to {to}")]
    InvalidLift { from: u32, to: u32 },

    #[error("ring exponent {0} is too small for this element")]
    RingTooSmall(u32),

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn is_width_cap(&self) -> bool {
        matches!(self, Error::WidthCapExceeded(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
