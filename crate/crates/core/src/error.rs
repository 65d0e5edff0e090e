use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;

/// Errors raised by the state engine, the optical elements and the oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    LengthMismatch {
        expected: usize,
        found: usize,
    },
    NegativeOccupation {
        index: usize,
        value: i64,
    },
    PhotonCapExceeded {
        mode: String,
        count: u32,
        cap: u32,
    },
    UnknownMode(String),
    DuplicateMode(String),
    InvalidLabel(String),
    RegistryMismatch,
    OverlappingModes(String),
    ZeroNorm,
    NonFiniteAmplitude,
    IdenticalModes(String),
    /// The label does not name a polarization-typed spatial mode.
    NotPolarized(String),
    /// A two-mode element was given one scalar and one polarized label.
    ModeKindMismatch {
        first: String,
        second: String,
    },
    /// Detection or element addressed a single polarization sub-mode.
    PartialSpatialMode(String),
    ModeOccupied(String),
    /// Injection into a spatial label without naming the polarization.
    AmbiguousPolarization(String),
    DiscardedPortOccupied(String),
    NonFiniteAngle,
    InvalidDeletionTarget,
    TooFewPhotons {
        min: u32,
        got: u32,
    },
    SectorTooLarge {
        dim: usize,
        cap: usize,
    },
    AtStep {
        index: usize,
        source: Box<Error>,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_step(self, index: usize) -> Self {
        Error::AtStep {
            index,
            source: Box::new(self),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::LengthMismatch { expected, found } => write!(
                f,
                "occupation vector has {found} entries, registry has {expected} modes"
            ),
            Error::NegativeOccupation { index, value } => {
                write!(f, "negative occupation {value} at position {index}")
            }
            Error::PhotonCapExceeded { mode, count, cap } => {
                write!(f, "mode '{mode}' would hold {count} photons (cap {cap})")
            }
            Error::UnknownMode(m) => write!(f, "unknown mode '{m}'"),
            Error::DuplicateMode(m) => write!(f, "mode '{m}' is already registered"),
            Error::InvalidLabel(m) => write!(f, "invalid mode label '{m}'"),
            Error::RegistryMismatch => write!(f, "states are defined over different registries"),
            Error::OverlappingModes(m) => write!(f, "registries share mode '{m}'"),
            Error::ZeroNorm => write!(f, "state has zero norm"),
            Error::NonFiniteAmplitude => write!(f, "amplitude is NaN or infinite"),
            Error::IdenticalModes(m) => {
                write!(f, "element needs two distinct modes, got '{m}' twice")
            }
            Error::NotPolarized(m) => write!(f, "'{m}' is not a polarization-typed spatial mode"),
            Error::ModeKindMismatch { first, second } => write!(
                f,
                "cannot mix scalar and polarized modes ('{first}', '{second}')"
            ),
            Error::PartialSpatialMode(m) => write!(
                f,
                "'{m}' is one polarization of a spatial mode; address the spatial label instead"
            ),
            Error::ModeOccupied(m) => write!(f, "mode '{m}' is already occupied"),
            Error::AmbiguousPolarization(m) => {
                write!(
                    f,
                    "'{m}' is a spatial label; name the polarization ({m}H or {m}V)"
                )
            }
            Error::DiscardedPortOccupied(m) => {
                write!(f, "photons routed to discarded port of '{m}'")
            }
            Error::NonFiniteAngle => write!(f, "angle is not finite"),
            Error::InvalidDeletionTarget => {
                write!(f, "occupation 0 cannot be deleted by a block angle")
            }
            Error::TooFewPhotons { min, got } => {
                write!(f, "need at least {min} photons, got {got}")
            }
            Error::SectorTooLarge { dim, cap } => {
                write!(f, "sector dimension {dim} exceeds cap {cap}")
            }
            Error::AtStep { index, source } => write!(f, "step {index}: {source}"),
        }
    }
}

impl core::error::Error for Error {
    fn source(&self) -> Option<&(dyn core::error::Error + 'static)> {
        match self {
            Error::AtStep { source, .. } => Some(source.as_ref()),
            _ => None,
        }
    }
}
