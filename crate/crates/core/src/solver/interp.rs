//! Interpolation inequality between the time-space scales.

use serde::{Deserialize, Serialize};

use super::spacetime_norm;
use crate::error::{domain, structural, Result};
use crate::gelfand::GelfandTriple;
use crate::spectral::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport {
    /// `‖∂^{δ+2α} u‖_{L²(H_{1−2δ−2α})}`.
    pub lhs: f64,
    /// `‖∂^{(1+δ)/2+α} u‖^λ_{L²(H_{−δ})} ‖∂^{δ+α} u‖^{1−λ}_{L²(H_{1−2δ})}`.
    pub rhs: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    pub lambda: f64,
}

impl InterpolationReport {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.slack >= -rel_tol * self.rhs.max(self.lhs)
    }
}

/// Evaluates both sides with the homogeneous seminorms `‖|∂|^s 𝓑^{γ/2} u‖`
/// on the torus. Equality holds for a single Fourier mode along a single
/// eigenvector of `𝓑`.
pub fn interpolation_inequality_check(
    u: &Signal,
    alpha: f64,
    delta: f64,
    triple: &GelfandTriple,
) -> Result<InterpolationReport> {
    if !(0.0..=0.5).contains(&alpha) {
        return domain(format!("α = {alpha} outside [0, 1/2]"));
    }
    if !(delta >= 0.0 && delta <= 1.0 - 2.0 * alpha && delta < 1.0) {
        return domain(format!("δ = {delta} outside [0, 1 − 2α] (α = {alpha})"));
    }
    if u.dim() != triple.dim() {
        return structural("signal and triple dimensions differ");
    }
    let lambda = 2.0 * alpha / (1.0 - delta);
    let lhs = spacetime_norm(u, delta + 2.0 * alpha, 1.0 - 2.0 * delta - 2.0 * alpha, triple)?;
    let a = spacetime_norm(u, 0.5 * (1.0 + delta) + alpha, -delta, triple)?;
    let b = spacetime_norm(u, delta + alpha, 1.0 - 2.0 * delta, triple)?;
    let rhs = a.powf(lambda) * b.powf(1.0 - lambda);
    Ok(InterpolationReport {
        lhs,
        rhs,
        slack: rhs - lhs,
        lambda,
    })
}
