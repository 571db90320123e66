//! Space-time spectral machinery for non-autonomous evolution equations
//! `u' + A(t)u = f` posed in a Gelfand triple `V ⊂ H ⊂ V'`.
//!
//! The crate is organised bottom-up:
//!
//! - [`spectral`]: uniform periodic time grids, Fourier multipliers
//!   (fractional derivatives, Hilbert transform), Gagliardo and Hölder
//!   seminorms, extension operators and the constant `C_α`.
//! - [`gelfand`]: finite-dimensional Gelfand triples, the interpolation
//!   scale `H_γ`, coercive forms and their fractional powers.
//! - [`form`]: time-dependent forms, constant estimation, time-regularity
//!   reports, the commutator estimate and extensions off an interval.
//! - [`solver`]: the collocation solver on the line, the stabilized
//!   variational forms used to certify it, causality and the initial value
//!   reduction.
//! - [`problems`]: 1-D elliptic, system and fractional-Laplacian instances.
//!
//! All dense linear algebra uses `nalgebra`; coordinates are complex and
//! chosen so that the pivot space `H` is Euclidean.

pub mod error;
pub mod form;
pub mod gelfand;
pub mod io;
pub mod problems;
pub mod solver;
pub mod spectral;

pub use error::{MregError, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub use num_complex::Complex64 as C64;

/// Dense complex matrix used for forms and operators.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex vector used for coordinates.
pub type CVector = nalgebra::DVector<C64>;
