use serde::{Deserialize, Serialize};

use super::{forward, Signal};
use crate::error::{domain, Result};

/// `max ‖u(t) − u(s)‖ / |t − s|^α` over sample pairs of the window (or of
/// the whole grid, read as an interval, when there is no window).
pub fn holder_seminorm(u: &Signal, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("Hölder index {alpha} outside (0,1)"));
    }
    let (first, last) = match u.grid().window() {
        Some(w) => (w.first, w.last),
        None => (0, u.n_points() - 1),
    };
    let h = u.grid().spacing();
    let mut best: f64 = 0.0;
    for j in first..=last {
        let a = u.at(j);
        for k in j + 1..=last {
            let d: f64 = a
                .iter()
                .zip(u.at(k))
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            best = best.max(d / ((k - j) as f64 * h).powf(alpha));
        }
    }
    Ok(best)
}

/// The chain `‖v‖_{L^p} ≤ c_p‖v̂‖_{L^{p′}} ≤ ‖w^{−1}‖_{L^q}‖w v̂‖_{L²} ≤ K(ρ‖v‖ + ‖∂^α v‖)`
/// with weight `w(ξ) = (ρ^{1/α} + |ξ|)^α`, evaluated on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpEmbeddingReport {
    pub lhs: f64,
    /// `(2π)^{1/p−1/2} ‖v̂‖_{L^{p′}}` (discrete Hausdorff–Young).
    pub hausdorff_young: f64,
    /// `‖w^{−1}‖_{L^q} ‖w v̂‖_{L²}`.
    pub holder: f64,
    pub rhs: f64,
    /// `K`, including the zero-frequency term of the discrete `L^q` norm.
    pub constant: f64,
    pub q: f64,
}

impl LpEmbeddingReport {
    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// Every link of the chain holds up to `rel_tol · rhs`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        let t = rel_tol * self.rhs.max(f64::MIN_POSITIVE);
        self.lhs <= self.hausdorff_young + t
            && self.hausdorff_young <= self.holder + t
            && self.holder <= self.rhs + t
    }
}

pub fn lp_embedding_check(u: &Signal, alpha: f64, p: f64, rho: f64) -> Result<LpEmbeddingReport> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return domain(format!("α = {alpha} outside (0, 1/2]"));
    }
    let upper = if alpha < 0.5 {
        2.0 / (1.0 - 2.0 * alpha)
    } else {
        f64::INFINITY
    };
    if !(p > 2.0 && p < upper) {
        return domain(format!("target exponent {p} outside (2, {upper})"));
    }
    if !(rho > 0.0) {
        return domain("ρ must be positive");
    }
    let q = 2.0 / (1.0 - 2.0 / p);
    let pp = p / (p - 1.0);
    let g = u.grid();
    let h = g.spacing();
    let dxi = g.frequency_step();
    let d = u.dim();
    let n = u.n_points();
    let two_pi = 2.0 * std::f64::consts::PI;

    let lhs = (0..n)
        .map(|j| {
            u.at(j)
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .powf(p / 2.0)
        })
        .sum::<f64>()
        .powf(1.0 / p)
        * h.powf(1.0 / p);

    // Û_k = h (2π)^{−1/2} Σ_j u_j e^{−iξ_k t_j}; only moduli are used
    let spec = forward(u);
    let scale = h / two_pi.sqrt();
    let mags: Vec<f64> = (0..n)
        .map(|k| {
            spec[k * d..(k + 1) * d]
                .iter()
                .map(|z| z.norm_sqr())
                .sum::<f64>()
                .sqrt()
                * scale
        })
        .collect();
    let freqs = g.frequencies();
    let base = rho.powf(1.0 / alpha);
    let weight = |xi: f64| (base + xi.abs()).powf(alpha);

    let hy_norm = mags.iter().map(|m| m.powf(pp)).sum::<f64>() * dxi;
    let hausdorff_young = two_pi.powf(1.0 / p - 0.5) * hy_norm.powf(1.0 / pp);

    let inv_q = freqs.iter().map(|&x| weight(x).powf(-q)).sum::<f64>() * dxi;
    let weighted = mags
        .iter()
        .zip(&freqs)
        .map(|(m, &x)| (m * weight(x)).powi(2))
        .sum::<f64>()
        * dxi;
    let holder = inv_q.powf(1.0 / q) * weighted.sqrt();

    let constant =
        (2.0 / (q * alpha - 1.0) * rho.powf(1.0 / alpha - q) + dxi * rho.powf(-q)).powf(1.0 / q);
    let l2 = u.l2_norm();
    let frac = super::frac_seminorm(u, alpha);
    let rhs = constant * (rho * l2 + frac);
    Ok(LpEmbeddingReport {
        lhs,
        hausdorff_young,
        holder,
        rhs,
        constant,
        q,
    })
}
