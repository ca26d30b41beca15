//! Exact simulation of entangled ancilla preparation for linear-optics
//! quantum computing.
//!
//! The crate covers sparse Fock-state arithmetic ([`fock`]), the
//! conditional-transfer interferometer and logical gates ([`gates`]), the
//! post-selected preparation pipeline ([`pipeline`]), teleportation and the
//! teleported controlled-sign gate ([`teleport`]), a quantum-dot preparation
//! model ([`dots`]) and resource accounting ([`resources`]).

pub mod dots;
pub mod error;
pub mod fock;
pub mod gates;
pub mod pipeline;
pub mod resources;
pub mod teleport;

pub use error::{Error, Result};
pub use fock::{Occupation, RegisterLayout, SparseState};
