//! The commutator estimate
//! `(∫∫ ‖(G(t) − G(s))v(s)‖² / |t − s|^{1+2γ})^{1/2} ≤ ε‖∂^γ v‖ + c_ε‖v‖`
//! with an explicit `c_ε`.
//!
//! The constant splits the double integral at `|t − s| = h`. The far part is
//! at most `2M/(√γ h^γ)‖v‖`. On the near part Hölder with exponents `p`,
//! `q` (`1/2 = 1/p + 1/q`) gives
//! `N h^δ ‖v‖_{L^q}` with
//! `N = (2M)^{(γp−1)/(γp)} [G]^{1/(pγ)}_{W^{γ+δ₀,1/γ}} (2/(δq))^{1/q}`,
//! and `‖v‖_{L^q} ≤ K(ρ‖v‖ + ‖∂^γ v‖)` is the discrete `L^q` embedding at
//! `ρ = 1`. We take `δ = δ₀/2`, `p = (γ + δ₀)/(γ(γ + δ))` (the largest
//! admissible `p`), and choose `h ≤ 1` with `N h^δ K = ε`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::regularity::{corrected_pairs, op_norm};
use super::Sampler;
use crate::error::{domain, structural, MregError, Result};
use crate::spectral::special::{periodized_power, riemann_zeta};
use crate::spectral::{c_alpha, frac_seminorm, Signal, TimeGrid};
use crate::{CMatrix, C64};

/// The constants entering `c_ε` for one family `G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorRecipe {
    pub gamma: f64,
    pub delta0: f64,
    pub delta: f64,
    /// Hölder exponent on the `G` factor.
    pub p: f64,
    /// Its partner, `1/2 = 1/p + 1/q`.
    pub q: f64,
    /// `sup_t ‖G(t)‖`.
    pub bound_m: f64,
    /// `[G]_{W^{γ+δ₀, 1/γ}}` on the torus.
    pub g_seminorm: f64,
    /// `N / h^δ`.
    pub near_factor: f64,
    /// Embedding constant `K` at `ρ = 1`.
    pub lp_constant: f64,
    pub rho: f64,
    pub h: f64,
    /// Requested `ε`.
    pub epsilon: f64,
    /// `N h^δ K ≤ ε` (smaller when `h` is capped at 1).
    pub epsilon_used: f64,
    pub c_eps: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    /// Square root of the commutator double integral.
    pub lhs: f64,
    pub frac_norm: f64,
    pub l2_norm: f64,
    /// `ε‖∂^γ v‖ + c_ε‖v‖`.
    pub rhs: f64,
    /// `‖∂^γ(Gv)‖`.
    pub gv_frac_norm: f64,
    /// `(M C_γ^{1/2} + 1) C_γ^{−1/2} ‖∂^γ v‖ + c₁ C_γ^{−1/2} ‖v‖`.
    pub bounded_rhs: f64,
    pub recipe: CommutatorRecipe,
    /// Recipe at `ε = 1`, giving `c₁`.
    pub recipe_one: CommutatorRecipe,
}

impl CommutatorReport {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rel_tol) && self.gv_frac_norm <= self.bounded_rhs * (1.0 + rel_tol)
    }
}

/// Default `δ₀` for [`commutator_check`].
pub fn default_delta0(gamma: f64) -> f64 {
    (0.5 * (1.0 - gamma)).min(0.25)
}

/// `c_ε` for `G` sampled on `grid`.
pub fn commutator_constant(
    g: &Sampler,
    grid: &TimeGrid,
    gamma: f64,
    epsilon: f64,
    delta0: f64,
) -> Result<CommutatorRecipe> {
    if !(gamma > 0.0 && gamma <= 0.5) {
        return domain(format!("γ = {gamma} outside (0, 1/2]"));
    }
    if !(epsilon > 0.0) {
        return domain("ε must be positive");
    }
    if !(delta0 > 0.0 && gamma + delta0 < 1.0) {
        return domain(format!("δ₀ = {delta0} must satisfy 0 < γ + δ₀ < 1"));
    }
    let times = grid.times();
    let mats: Vec<CMatrix> = times.par_iter().map(|&t| g.matrix(t)).collect();
    if mats.iter().any(|m| m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
        return Err(MregError::Data("operator family has non-finite samples".into()));
    }
    let bound_m = mats.par_iter().map(op_norm).reduce(|| 0.0, f64::max);
    let ps = 1.0 / gamma;
    let m = times.len();
    let h_grid = grid.spacing();
    let integral = match g.as_separable() {
        Some((_, a1, prof)) => {
            let c = op_norm(a1);
            let vals: Vec<f64> = times.iter().map(|&t| prof.eval(t)).collect();
            corrected_pairs(&|j: usize, k: usize| c * (vals[j] - vals[k]).abs(), m, h_grid, gamma + delta0, ps, Some(grid.period()))
        }
        None => corrected_pairs(
            &|j: usize, k: usize| op_norm(&(&mats[j] - &mats[k])),
            m,
            h_grid,
            gamma + delta0,
            ps,
            Some(grid.period()),
        ),
    };
    let g_seminorm = integral.powf(gamma);

    let delta = 0.5 * delta0;
    let p = (gamma + delta0) / (gamma * (gamma + delta));
    let q = 2.0 * p / (p - 2.0);
    let near_factor = if integral == 0.0 {
        0.0
    } else {
        (2.0 * bound_m).powf((gamma * p - 1.0) / (gamma * p))
            * g_seminorm.powf(1.0 / (p * gamma))
            * (2.0 / (delta * q)).powf(1.0 / q)
    };
    let rho: f64 = 1.0;
    // discrete L^q embedding constant, exponent p = 2/(1 − 2/q)
    let lp_constant = (2.0 / (p * gamma - 1.0) * rho.powf(1.0 / gamma - p)
        + grid.frequency_step() * rho.powf(-p))
    .powf(1.0 / p);
    let h = if near_factor == 0.0 {
        1.0
    } else {
        (epsilon / (near_factor * lp_constant)).powf(1.0 / delta).min(1.0)
    };
    if h >= 0.5 * grid.period() {
        return structural("split length must stay below half the period");
    }
    let epsilon_used = near_factor * h.powf(delta) * lp_constant;
    let c_eps = 2.0 * bound_m / (gamma.sqrt() * h.powf(gamma)) + epsilon_used * rho;
    Ok(CommutatorRecipe {
        gamma,
        delta0,
        delta,
        p,
        q,
        bound_m,
        g_seminorm,
        near_factor,
        lp_constant,
        rho,
        h,
        epsilon,
        epsilon_used,
        c_eps,
    })
}

/// `G v` sample by sample.
pub fn apply_family(g: &Sampler, v: &Signal) -> Result<Signal> {
    let (rows, cols) = g.shape();
    if cols != v.dim() {
        return structural("operator family and signal dimensions differ");
    }
    let grid = v.grid();
    let mut out = vec![C64::new(0.0, 0.0); v.n_points() * rows];
    out.par_chunks_mut(rows).enumerate().for_each(|(k, o)| {
        g.apply(grid.time(k), v.at(k), o);
    });
    Signal::new(grid.clone(), rows, out, v.space())
}

/// `∫∫ ‖(G(t) − G(s))v(s)‖² / |t − s|^{1+2γ}` on the torus with the
/// periodized kernel and the diagonal correction.
pub fn commutator_integral(g: &Sampler, v: &Signal, gamma: f64) -> Result<f64> {
    let (rows, cols) = g.shape();
    if cols != v.dim() {
        return structural("operator family and signal dimensions differ");
    }
    let grid = v.grid();
    let m = v.n_points();
    let h = grid.spacing();
    let l = grid.period();
    let mats: Vec<CMatrix> = (0..m).map(|k| g.matrix(grid.time(k))).collect();
    let expo = 1.0 + 2.0 * gamma;
    // ‖(G_t − G_s) v_s‖² for t = s + lag
    let diff = |t: usize, s: usize| -> f64 {
        let d = &mats[t] - &mats[s];
        let vs = v.at(s);
        (0..rows)
            .map(|r| {
                (0..cols)
                    .map(|c| d[(r, c)] * vs[c])
                    .sum::<C64>()
                    .norm_sqr()
            })
            .sum()
    };
    let raw: f64 = (1..m)
        .into_par_iter()
        .map(|lag| {
            let s: f64 = (0..m).map(|k| diff((k + lag) % m, k)).sum();
            s * periodized_power(lag as f64 * h, l, expo)
        })
        .collect::<Vec<_>>()
        .iter()
        .sum::<f64>()
        * h
        * h;
    let sigma = 1.0 - 2.0 * gamma;
    let slopes: f64 = (0..m)
        .map(|k| 0.5 * (diff((k + 1) % m, k) + diff((k + m - 1) % m, k)) / (h * h))
        .sum();
    let corr = 2.0 * riemann_zeta(-sigma) * h.powf(sigma + 2.0) * slopes;
    Ok((raw - corr).max(0.0))
}

/// Checks the commutator estimate and the `H^γ` boundedness of `v ↦ Gv` for
/// one signal, with `δ₀` from [`default_delta0`].
pub fn commutator_check(g: &Sampler, v: &Signal, gamma: f64, epsilon: f64) -> Result<CommutatorReport> {
    let recipe = commutator_constant(g, v.grid(), gamma, epsilon, default_delta0(gamma))?;
    let recipe_one = commutator_constant(g, v.grid(), gamma, 1.0, default_delta0(gamma))?;
    commutator_check_with(g, v, &recipe, &recipe_one)
}

/// As [`commutator_check`] with precomputed recipes (they depend on `G`
/// only).
pub fn commutator_check_with(
    g: &Sampler,
    v: &Signal,
    recipe: &CommutatorRecipe,
    recipe_one: &CommutatorRecipe,
) -> Result<CommutatorReport> {
    let gamma = recipe.gamma;
    let lhs = commutator_integral(g, v, gamma)?.sqrt();
    let frac_norm = frac_seminorm(v, gamma);
    let l2_norm = v.l2_norm();
    let rhs = recipe.epsilon * frac_norm + recipe.c_eps * l2_norm;
    let gv = apply_family(g, v)?;
    let gv_frac_norm = frac_seminorm(&gv, gamma);
    let c = c_alpha(gamma)?;
    let bounded_rhs = (recipe.bound_m * c.sqrt() + 1.0) / c.sqrt() * frac_norm
        + recipe_one.c_eps / c.sqrt() * l2_norm;
    Ok(CommutatorReport {
        lhs,
        frac_norm,
        l2_norm,
        rhs,
        gv_frac_norm,
        bounded_rhs,
        recipe: *recipe,
        recipe_one: *recipe_one,
    })
}
