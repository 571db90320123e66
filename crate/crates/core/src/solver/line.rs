//! Line solves on the torus.

use serde::{Deserialize, Serialize};

use super::linear::{Collocation, Prepared};
use super::stabilized::{CoercivityEstimate, StabilizedForm};
use super::{line_norms, spacetime_norm, SolveConfig, WeakSolution};
use crate::error::{domain, structural, MregError, Result};
use crate::form::{
    default_delta0, form_regularity, measure_constants, operator_regularity, FormConstants,
    NonAutonomousForm, Sampler,
};
use crate::gelfand::SpaceTag;
use crate::spectral::Signal;

/// Diagnostics of a regular solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularReport {
    pub alpha: f64,
    pub delta: f64,
    pub rho: f64,
    /// Number of doublings the `ρ` search took (0 when `ρ` was given).
    pub rho_doublings: usize,
    pub coercivity: CoercivityEstimate,
    /// Whether the measured coercivity reached `δ/2`.
    pub coercive: bool,
    /// `‖∂^{1/2}u‖²_{L²(H)} ≤ ‖∂u‖_{L²(V′)}‖u‖_{L²(V)}` slack (right minus left).
    pub embedding_slack: f64,
}

/// Largest number of `ρ` doublings.
const RHO_DOUBLINGS: usize = 40;

fn whole_constants(f: &NonAutonomousForm, grid: &crate::spectral::TimeGrid) -> Result<FormConstants> {
    // the weak form needs the constants of 𝒜 = 𝒜₁ + 𝒜₂ as a whole
    let whole = f.with_samplers(f.sampler().clone(), None);
    match measure_constants(&whole, grid, 0.0) {
        Ok(c) => Ok(c),
        Err(MregError::NotQuasiCoercive { best_eta, .. }) => domain(format!(
            "the line solve needs a coercive form; measured η = {best_eta:e} without shift"
        )),
        Err(e) => Err(e),
    }
}

fn check_inputs(f: &NonAutonomousForm, rhs: &Signal, cfg: &SolveConfig) -> Result<()> {
    cfg.validate()?;
    if f.interval().is_some() {
        return structural("the form lives on an interval; use solve_ivp");
    }
    if !rhs.grid().same_as(&cfg.grid) {
        return structural("right-hand side is not sampled on the configured grid");
    }
    if rhs.dim() != f.dim() || cfg.spatial_dim != f.dim() {
        return structural("dimensions of form, right-hand side and configuration differ");
    }
    Ok(())
}

/// Shared core: solve `(∂ + 𝒜)u = f` and assemble the solution signals.
pub(crate) fn collocation_solve(
    sampler: &Sampler,
    rhs: &Signal,
    cfg: &SolveConfig,
) -> Result<(Signal, Signal, Signal, super::SolveStats)> {
    let grid = &cfg.grid;
    let col = Collocation::new(sampler, grid);
    let prep = Prepared::new(&col, &cfg.linear_solver)?;
    let (x, stats) = prep.solve(rhs.values())?;
    let d = rhs.dim();
    let du = col.derivative(&x);
    let au = col.apply_a(&x);
    let tag = SpaceTag { gamma: 2.0 * cfg.alpha - 1.0 };
    Ok((
        Signal::new(grid.clone(), d, x, SpaceTag::V)?,
        Signal::new(grid.clone(), d, du, tag)?,
        Signal::new(grid.clone(), d, au, tag)?,
        stats,
    ))
}

fn relative_residual(du: &Signal, au: &Signal, rhs: &Signal, gamma: f64, f: &NonAutonomousForm) -> Result<f64> {
    let r = du.add(au)?.sub(rhs)?;
    let rn = spacetime_norm(&r, 0.0, gamma, f.triple())?;
    let fnorm = spacetime_norm(rhs, 0.0, gamma, f.triple())?;
    Ok(if fnorm > 0.0 { rn / fnorm } else { rn })
}

/// Weak solution `u ∈ L²(V) ∩ H¹(V′)` of `u′ + 𝒜u = f` on the torus.
pub fn solve_line_weak(f: &NonAutonomousForm, rhs: &Signal, cfg: &SolveConfig) -> Result<WeakSolution> {
    check_inputs(f, rhs, cfg)?;
    let weak_cfg = SolveConfig {
        alpha: 0.0,
        ..cfg.clone()
    };
    let c = whole_constants(f, &cfg.grid)?;
    let delta = cfg.delta_stab.unwrap_or(c.eta / (c.bound_m + 1.0));
    let (u, du, au, stats) = collocation_solve(f.sampler(), rhs, &weak_cfg)?;
    let norms = line_norms(&u, &du, &au, 0.0, f.triple())?;
    let residual = relative_residual(&du, &au, rhs, -1.0, f)?;
    Ok(WeakSolution {
        u,
        du,
        au,
        norms,
        residual,
        stats,
        constants: c,
        delta,
        regular: None,
        trace: None,
        oracle: None,
        warnings: vec![],
    })
}

/// The same collocation solve, reported at regularity `α`, with the
/// regular stabilized form's coercivity measured.
///
/// Without a split the whole form plays `𝒜₁` and `𝒜₂ = 0`.
pub fn solve_line_regular(f: &NonAutonomousForm, rhs: &Signal, cfg: &SolveConfig) -> Result<WeakSolution> {
    check_inputs(f, rhs, cfg)?;
    let alpha = match f.split() {
        Some(s) => {
            if cfg.alpha != 0.0 && (cfg.alpha - s.alpha).abs() > 1e-12 {
                return Err(MregError::Config(format!(
                    "configured α = {} differs from the split's α = {}",
                    cfg.alpha, s.alpha
                )));
            }
            s.alpha
        }
        None => cfg.alpha,
    };
    if !(alpha > 0.0 && alpha <= 0.5) {
        return domain(format!("regular solve needs α in (0, 1/2], got {alpha}"));
    }
    let grid = &cfg.grid;
    let mut warnings = Vec::new();

    // hypotheses on the time regularity of the coefficients
    let d0 = default_delta0(alpha);
    let rep = form_regularity(f, alpha + d0, 1.0 / alpha, grid)?;
    if !rep.looks_finite(0.1) {
        warnings.push(format!(
            "hypothesis unverifiable: principal part not visibly in W^({:.3},{:.3}) (fine-scale slope {:.3})",
            alpha + d0,
            1.0 / alpha,
            rep.fine_scale_slope()
        ));
    }
    if let Some(s) = f.split() {
        if s.beta > 0.0 && !s.a2.is_autonomous() {
            let r2 = operator_regularity(&s.a2, grid, s.beta + d0, 1.0 / s.beta)?;
            if !r2.looks_finite(0.1) {
                warnings.push(format!(
                    "hypothesis unverifiable: perturbation not visibly in W^({:.3},{:.3})",
                    s.beta + d0,
                    1.0 / s.beta
                ));
            }
        }
    }

    let whole = whole_constants(f, grid)?;
    let principal = match measure_constants(f, grid, 0.0) {
        Ok(c) => c,
        Err(MregError::NotQuasiCoercive { best_eta, .. }) => {
            return domain(format!("principal part is not coercive (η = {best_eta:e})"))
        }
        Err(e) => return Err(e),
    };
    let rcfg = SolveConfig {
        alpha,
        ..cfg.clone()
    };
    let (u, du, au, stats) = collocation_solve(f.sampler(), rhs, &rcfg)?;
    let norms = line_norms(&u, &du, &au, alpha, f.triple())?;
    let residual = relative_residual(&du, &au, rhs, 2.0 * alpha - 1.0, f)?;

    // regular stabilized form: δ from the principal part, ρ by doubling
    let delta = cfg
        .delta_stab
        .unwrap_or(principal.eta / (principal.bound_m + 1.0));
    let gap = principal.eta - principal.eta2;
    if !(gap > 0.0) {
        return domain(format!(
            "perturbation too large: η₂ = {} is not below η = {}",
            principal.eta2, principal.eta
        ));
    }
    let (rho, doublings, coercivity) = match cfg.rho {
        Some(r) => (r, 0, StabilizedForm::regular(f, grid, alpha, delta, r)?.coercivity()?),
        None => {
            let mut rho = 2.0 * principal.bound_m * (1.0 + delta) / gap;
            let mut k = 0;
            loop {
                let c = StabilizedForm::regular(f, grid, alpha, delta, rho)?.coercivity()?;
                if c.value >= 0.5 * delta || k == RHO_DOUBLINGS {
                    break (rho, k, c);
                }
                rho *= 2.0;
                k += 1;
            }
        }
    };
    let coercive = coercivity.value >= 0.5 * delta;
    if !coercive {
        warnings.push(format!(
            "regular stabilized form reached coercivity {:e} < δ/2 = {:e} at ρ = {rho:e}",
            coercivity.value,
            0.5 * delta
        ));
    }
    let du_vp = spacetime_norm(&du, 0.0, -1.0, f.triple())?;
    let embedding_slack = du_vp * norms.l2_v - norms.half_h.powi(2);

    Ok(WeakSolution {
        u,
        du,
        au,
        norms,
        residual,
        stats,
        constants: whole,
        delta: whole.eta / (whole.bound_m + 1.0),
        regular: Some(RegularReport {
            alpha,
            delta,
            rho,
            rho_doublings: doublings,
            coercivity,
            coercive,
            embedding_slack,
        }),
        trace: None,
        oracle: None,
        warnings,
    })
}
