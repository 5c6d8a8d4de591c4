//! Constants, strip widths and radii of the analyticity estimates, with
//! envelopes and the class-propagation chain. Large quantities are stored as
//! logarithms.

mod base;
pub mod logmath;
mod sigma;
mod tables;

pub use base::{ln_gamma_with, EnstrophyComparison, LedgerConstants};
pub use sigma::{sigma_propagation, SigmaPipeline};
pub use tables::{
    conditional_fixed_strip, conditional_shrinking, crossover, epsilon, unconditional, xi,
    BoundRow, BoundTable, EnvelopeParams, LedgerOptions, SectorRadii, StripVariant, TableMode,
    TruncatedProduct,
};

use crate::error::Result;

/// Builds the table for `mode`.
pub fn build_table(
    mode: TableMode,
    c: &LedgerConstants,
    opts: &LedgerOptions,
) -> Result<BoundTable> {
    match mode {
        TableMode::ConditionalFixedStrip => conditional_fixed_strip(c, opts),
        TableMode::ConditionalShrinking => conditional_shrinking(c, opts),
        TableMode::Unconditional => unconditional(c, opts),
    }
}
