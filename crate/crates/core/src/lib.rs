#![no_std]

//! Sparse Fock-state simulation of heralded linear-optical circuits.
//!
//! States are sparse maps from photon-occupation vectors to complex
//! amplitudes over an ordered [`ModeRegistry`]. Beam splitters, polarization
//! rotators, polarizing beam splitters and single-photon injection act on
//! them through [`ElementSpec`]; photon-number-resolving detection
//! post-selects a conditional state and reports its probability.
//!
//! [`schemes`] builds the Θ deletion block, the NOON-state generator and the
//! two-photon polarization entangler on top of that, together with their
//! closed-form amplitudes and success probabilities. [`oracle`] re-derives
//! every element from dense sector matrices for cross-checking.
//!
//! The crate only needs `alloc`.

extern crate alloc;

pub mod circuit;
pub mod detection;
pub mod elements;
mod error;
pub mod math;
pub mod oracle;
pub mod registry;
pub mod schemes;
pub mod state;

pub use circuit::{run, Circuit, Execution, Stage, Step};
pub use detection::{outcome_distribution, postselect, DetectionPattern, Heralded};
pub use elements::{
    apply_beam_splitter, apply_pbs, apply_rotator, inject_fock, Config, ElementSpec,
    ReflectionPhase,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use registry::{ModeDecl, ModeRegistry, Polarization, Target};
pub use state::{FockState, Occupation};
