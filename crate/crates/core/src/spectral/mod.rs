//! Truncated Fourier representation of periodic divergence-free fields:
//! grids, norms, projections, transforms and snapshot I/O.

mod field;
mod grid;
pub mod io;
mod lebesgue;
mod random;
pub mod transform;

pub use field::{
    from_stream_function, leray_project, stream_function, Mode, NormProfile, SpectralField,
    Symmetry, C64,
};
pub(crate) use field::{inner_raw, project_raw, symmetrize_raw, weighted_sum, ZERO};
pub use grid::{min_dealiased, transform_friendly, GridSpec};
pub use lebesgue::{lebesgue_norms, LebesgueNorms};
pub use random::{available_shells, random_field, FieldFamily};
