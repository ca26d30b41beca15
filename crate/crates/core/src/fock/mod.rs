//! Sparse bosonic Fock states and the linear-optical primitives acting on
//! them.

mod json;
pub mod layout;
mod occupation;
mod state;
mod transform;

pub use json::{StateJson, TermJson};
pub use layout::RegisterLayout;
pub use occupation::Occupation;
pub(crate) use state::Accumulator;
pub use state::{fidelity, MeasurementOutcome, SparseState, DEFAULT_TOLERANCE};
pub use transform::{
    apply_beamsplitter, apply_beamsplitter_inverse, apply_mode_transform, beamsplitter_matrix,
    ModeMatrix,
};
