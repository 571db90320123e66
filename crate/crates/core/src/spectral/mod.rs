//! Discrete fractional calculus on uniform periodic time grids.

mod grid;
mod multiplier;
pub mod quad;
mod signal;
pub mod special;

pub use grid::{TimeGrid, Window};
pub use multiplier::{
    apply_multiplier, frac_seminorm, frac_symbol, multiplier_norm, FourierMultiplier, Symbol,
};
pub use signal::{forward, forward_unitary, inverse, Signal};
pub(crate) use signal::transform;

mod calpha;
mod gagliardo;
pub use calpha::c_alpha;
pub use gagliardo::{gagliardo_report, gagliardo_seminorm, SeminormDomain, SeminormReport};
mod extension;
mod inequalities;
pub use extension::{
    bump, extend_const, extend_reflect, hardy_check, reflect_ratio, Extension, HardyReport, Side,
};
pub use inequalities::{holder_seminorm, lp_embedding_check, LpEmbeddingReport};
