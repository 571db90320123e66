//! Solves of `u′ + 𝒜u = f` on the line (the torus) and on an interval.
//!
//! The computed system is always the collocation system `(∂ + 𝒜)u = f`.
//! The stabilized forms `E` of the existence proofs are evaluated as
//! functionals on the same discrete space; their coercivity constants are
//! what the proofs predict and what the reports compare against.

mod causality;
mod interp;
mod ivp;
mod line;
mod linear;
mod oracle;
mod stabilized;

pub use causality::{causality_check, CausalityReport};
pub use interp::{interpolation_inequality_check, InterpolationReport};
pub use ivp::{solve_ivp, TraceReport};
pub use line::{solve_line_regular, solve_line_weak, RegularReport};
pub use linear::{LinearSolver, SolveStats, DIRECT_LIMIT};
pub use oracle::{crank_nicolson, OracleReport};
pub use stabilized::{CoercivityEstimate, StabilizedForm};

use serde::{Deserialize, Serialize};

use crate::error::{domain, structural, MregError, Result};
use crate::form::FormConstants;
use crate::gelfand::GelfandTriple;
use crate::spectral::{multiplier_norm, FourierMultiplier, Signal, TimeGrid};

/// Time-stepping cross-check settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub enabled: bool,
    /// Crank–Nicolson steps per grid step.
    pub oversample: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            enabled: false,
            oversample: 4,
        }
    }
}

/// Everything the existence proofs leave as "small enough" or "large
/// enough".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// Target regularity in `(0, 1/2]`; `0` asks for the weak solution only.
    pub alpha: f64,
    /// `δ` of the stabilizer `1 − δℋ`; `None` means `η/(M+1)`.
    pub delta_stab: Option<f64>,
    /// `ρ` of the regular form; `None` runs the doubling search.
    pub rho: Option<f64>,
    pub grid: TimeGrid,
    pub spatial_dim: usize,
    pub linear_solver: LinearSolver,
    pub oracle: OracleConfig,
}

impl SolveConfig {
    /// Weak solve with the solver chosen by system size.
    pub fn new(grid: TimeGrid, spatial_dim: usize) -> Self {
        let linear_solver = LinearSolver::auto(grid.n_points() * spatial_dim);
        Self {
            alpha: 0.0,
            delta_stab: None,
            rho: None,
            grid,
            spatial_dim,
            linear_solver,
            oracle: OracleConfig::default(),
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_solver(mut self, s: LinearSolver) -> Self {
        self.linear_solver = s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha == 0.0 || (self.alpha > 0.0 && self.alpha <= 0.5)) {
            return domain(format!("α = {} must be 0 or lie in (0, 1/2]", self.alpha));
        }
        if let Some(d) = self.delta_stab {
            if !(d > 0.0 && d < 1.0) {
                return domain(format!("stabilizer δ = {d} outside (0, 1)"));
            }
        }
        if let Some(r) = self.rho {
            if !(r >= 0.0 && r.is_finite()) {
                return domain(format!("ρ = {r} must be a nonnegative number"));
            }
        }
        if self.spatial_dim == 0 {
            return structural("spatial dimension must be positive");
        }
        if let LinearSolver::Iterative { tol, max_iter, .. } = self.linear_solver {
            if !(tol > 0.0) || max_iter == 0 {
                return Err(MregError::Config(
                    "iterative solver needs a positive tolerance and iteration budget".into(),
                ));
            }
        }
        if self.oracle.enabled && self.oracle.oversample == 0 {
            return Err(MregError::Config("oracle oversampling must be positive".into()));
        }
        Ok(())
    }
}

/// Norms of a computed solution. Time-fractional entries are the
/// homogeneous seminorms `‖∂^s u‖`; on an interval they are Gagliardo
/// seminorms divided by `√C_s`, which agrees with `‖∂^s u‖` on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionNorms {
    pub alpha: f64,
    /// `‖u‖_{L²(V)}`.
    pub l2_v: f64,
    /// `‖u‖_{L²(H)}`.
    pub l2_h: f64,
    /// `‖∂^{1/2} u‖_{L²(H)}`.
    pub half_h: f64,
    /// `‖∂^α u‖_{L²(V)}`.
    pub alpha_v: f64,
    /// `‖∂^{1/2+α} u‖_{L²(H)}`.
    pub half_alpha_h: f64,
    /// `‖∂^{1/2} u‖_{L²(V)}`, the `H^{1/2}(V)` seminorm.
    pub half_v: f64,
    /// `‖u′‖_{L²(H_{2α−1})}`.
    pub du: f64,
    /// `‖𝒜u‖_{L²(H_{2α−1})}`.
    pub au: f64,
}

impl SolutionNorms {
    /// `‖u‖²_{MR_α} = ‖u′‖² + ‖𝒜u‖²`.
    pub fn mr(&self) -> f64 {
        (self.du * self.du + self.au * self.au).sqrt()
    }

    /// `‖u‖²_{𝒱_α} = ‖∂^{1/2+α}u‖²_{L²(H)} + ‖u‖²_{L²(V)} + ‖∂^α u‖²_{L²(V)}`.
    pub fn v_alpha(&self) -> f64 {
        let a = if self.alpha == 0.0 { 0.0 } else { self.alpha_v };
        (self.half_alpha_h.powi(2) + self.l2_v.powi(2) + a * a).sqrt()
    }

    pub fn all_finite(&self) -> bool {
        [
            self.l2_v,
            self.l2_h,
            self.half_h,
            self.alpha_v,
            self.half_alpha_h,
            self.half_v,
            self.du,
            self.au,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

/// A computed solution with its diagnostics.
#[derive(Debug, Clone)]
pub struct WeakSolution {
    pub u: Signal,
    pub du: Signal,
    pub au: Signal,
    pub norms: SolutionNorms,
    /// `‖u′ + 𝒜u − f‖/‖f‖` in the solve space (`V′` or `H_{2α−1}`).
    pub residual: f64,
    pub stats: SolveStats,
    /// Constants of the whole form as used by the solve (after any shift).
    pub constants: FormConstants,
    /// `δ` of the weak stabilized form.
    pub delta: f64,
    pub regular: Option<RegularReport>,
    pub trace: Option<TraceReport>,
    pub oracle: Option<OracleReport>,
    pub warnings: Vec<String>,
}

/// `‖∂^s u‖_{L²(H_γ)}` on the torus, `s = 0` giving `‖u‖_{L²(H_γ)}`.
pub fn spacetime_norm(u: &Signal, s: f64, gamma: f64, triple: &GelfandTriple) -> Result<f64> {
    if u.dim() != triple.dim() {
        return structural("signal and triple dimensions differ");
    }
    let w = to_scale(u, gamma, triple)?;
    multiplier_norm(&FourierMultiplier::abs_power(s), &w)
}

/// Samples mapped to `H_γ` coordinates, `𝓑^{γ/2} u(t)`.
pub(crate) fn to_scale(u: &Signal, gamma: f64, triple: &GelfandTriple) -> Result<Signal> {
    if !(-1.0..=1.0).contains(&gamma) {
        return domain(format!("scale index γ = {gamma} outside [−1, 1]"));
    }
    if gamma == 0.0 {
        return Ok(u.clone());
    }
    u.apply_matrix(&triple.riesz_power_c(gamma / 2.0))
}

/// Torus norms of a line solution.
pub(crate) fn line_norms(
    u: &Signal,
    du: &Signal,
    au: &Signal,
    alpha: f64,
    triple: &GelfandTriple,
) -> Result<SolutionNorms> {
    let target = 2.0 * alpha - 1.0;
    Ok(SolutionNorms {
        alpha,
        l2_v: spacetime_norm(u, 0.0, 1.0, triple)?,
        l2_h: u.l2_norm(),
        half_h: spacetime_norm(u, 0.5, 0.0, triple)?,
        alpha_v: spacetime_norm(u, alpha, 1.0, triple)?,
        half_alpha_h: spacetime_norm(u, 0.5 + alpha, 0.0, triple)?,
        half_v: spacetime_norm(u, 0.5, 1.0, triple)?,
        du: spacetime_norm(du, 0.0, target, triple)?,
        au: spacetime_norm(au, 0.0, target, triple)?,
    })
}
