//! Causality of the line solution: forcing that vanishes before `t_cut`
//! produces a solution that vanishes before `t_cut`.

use serde::{Deserialize, Serialize};

use super::WeakSolution;
use crate::error::{domain, structural, Result};
use crate::form::NonAutonomousForm;
use crate::spectral::Signal;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausalityReport {
    pub t_cut: f64,
    /// Length skipped after `−L/2`, where the periodic wrap-around of the
    /// late solution has not yet decayed below the tolerance.
    pub buffer: f64,
    /// `max ‖u(t)‖_H` over `[−L/2 + buffer, t_cut)` divided by `max ‖u‖_H`.
    pub ratio: f64,
    pub tolerance: f64,
    /// `max ‖f(t)‖_H` before `t_cut` divided by `max ‖f‖_H`.
    pub forcing_leak: f64,
    pub holds: bool,
}

fn pointwise(u: &Signal) -> Vec<f64> {
    (0..u.n_points())
        .map(|j| u.at(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect()
}

/// Checks that `u` vanishes on `[−L/2 + buffer, t_cut)` when `f` does.
///
/// The solution of the homogeneous equation decays at rate `η λ_min(𝓑)`,
/// so after `buffer = ln(1/tol)/(η λ_min(𝓑))` the wrapped contribution is
/// below `tol` relative to the peak.
pub fn causality_check(
    f: &NonAutonomousForm,
    rhs: &Signal,
    sol: &WeakSolution,
    t_cut: f64,
    tol: f64,
) -> Result<CausalityReport> {
    if !(tol > 0.0 && tol < 1.0) {
        return domain(format!("tolerance {tol} outside (0, 1)"));
    }
    let grid = sol.u.grid();
    if !rhs.grid().same_as(grid) {
        return structural("forcing and solution grids differ");
    }
    let half = 0.5 * grid.period();
    if !(t_cut > -half && t_cut < half) {
        return domain(format!("cut time {t_cut} outside the torus"));
    }
    let rate = sol.constants.eta * f.triple().eigenvalues().min();
    if !(rate > 0.0) {
        return domain("causality needs a coercive form");
    }
    let buffer = (1.0 / tol).ln() / rate;
    let start = -half + buffer;
    if start >= t_cut {
        return domain(format!(
            "decay buffer {buffer:.3} leaves nothing of [−L/2, {t_cut}) to test"
        ));
    }
    let fu = pointwise(rhs);
    let fmax = fu.iter().cloned().fold(0.0, f64::max);
    let times = grid.times();
    let fleak = times
        .iter()
        .zip(&fu)
        .filter(|(&t, _)| t < t_cut)
        .map(|(_, &v)| v)
        .fold(0.0, f64::max);
    let forcing_leak = if fmax > 0.0 { fleak / fmax } else { 0.0 };
    if forcing_leak > tol {
        return domain(format!(
            "forcing does not vanish before {t_cut} (relative size {forcing_leak:e})"
        ));
    }
    let uu = pointwise(&sol.u);
    let umax = uu.iter().cloned().fold(0.0, f64::max);
    let early = times
        .iter()
        .zip(&uu)
        .filter(|(&t, _)| t >= start && t < t_cut)
        .map(|(_, &v)| v)
        .fold(0.0, f64::max);
    let ratio = if umax > 0.0 { early / umax } else { 0.0 };
    Ok(CausalityReport {
        t_cut,
        buffer,
        ratio,
        tolerance: tol,
        forcing_leak,
        holds: ratio <= tol,
    })
}
