//! `W̊^{s,p}` seminorms of operator families `t ↦ A(t)` in operator norm.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{NonAutonomousForm, Sampler};
use crate::error::{domain, structural, Result};
use crate::spectral::special::{periodized_power, riemann_zeta};
use crate::spectral::TimeGrid;
use crate::CMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub alpha_index: f64,
    pub p_index: f64,
    /// `[A]_{W^{s,p}}`.
    pub seminorm: f64,
    /// `[A]^p`.
    pub integral: f64,
    /// Contribution of lags `2^j ≤ k < 2^{j+1}` (in grid steps) to the
    /// integral, finest first.
    pub bands: Vec<f64>,
}

impl RegularityReport {
    /// Least-squares slope of `log₂ band_j` against `j` over the bands
    /// `2..=5` (lags 4 to 63), or the finest bands a short profile has,
    /// leaving out the two coarsest. For a pair integrand that scales like
    /// `r^κ` at lag `r` this estimates `κ`; a positive value means the fine
    /// scales die out. The finest two bands are skipped because a sampled
    /// cusp reaches its power law only after a few lags.
    pub fn fine_scale_slope(&self) -> f64 {
        let usable = self.bands.len().saturating_sub(2);
        let (lo, hi) = if usable >= 6 { (2, 6) } else { (0, usable.max(2).min(self.bands.len())) };
        let pts: Vec<(f64, f64)> = self.bands[lo..hi]
            .iter()
            .enumerate()
            .filter(|(_, b)| **b > 0.0)
            .map(|(j, b)| (j as f64, b.log2()))
            .collect();
        if pts.len() < 2 {
            return f64::INFINITY;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    }

    /// Band profile decays towards fine scales (slope above `margin`).
    pub fn looks_finite(&self, margin: f64) -> bool {
        self.integral == 0.0 || self.fine_scale_slope() > margin
    }
}

/// Pair quadrature of `∫∫ D(t, s)^p |t − s|^{−1−sp}` from sampled
/// distances `dist(j, k)` between sample `j` and `k`, diagonal excluded.
///
/// `period = None` treats the `m` samples as a closed interval with
/// trapezoid end weights; `Some(L)` as a full period of a periodic family
/// with the periodized kernel. The sum is raw (no diagonal correction), so
/// the bands add up to the integral exactly.
pub fn pair_distance_regularity<D>(
    dist: D,
    m: usize,
    h: f64,
    s: f64,
    p: f64,
    period: Option<f64>,
) -> Result<RegularityReport>
where
    D: Fn(usize, usize) -> f64 + Sync,
{
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("regularity index {s} outside (0, 1)"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return domain(format!("integrability {p} must be finite and ≥ 1"));
    }
    let (integral, bands) = raw_pairs(&dist, m, h, s, p, period);
    Ok(RegularityReport {
        alpha_index: s,
        p_index: p,
        seminorm: integral.powf(1.0 / p),
        integral,
        bands,
    })
}

fn raw_pairs<D>(dist: &D, m: usize, h: f64, s: f64, p: f64, period: Option<f64>) -> (f64, Vec<f64>)
where
    D: Fn(usize, usize) -> f64 + Sync,
{
    if m < 2 {
        return (0.0, Vec::new());
    }
    let expo = 1.0 + s * p;
    let per_lag: Vec<f64> = (1..m)
        .into_par_iter()
        .map(|lag| match period {
            Some(l) => {
                let raw: f64 = (0..m).map(|j| dist(j, (j + lag) % m).powf(p)).sum();
                raw * periodized_power(lag as f64 * h, l, expo) * h * h
            }
            None => {
                let w = |j: usize| if j == 0 || j == m - 1 { 0.5 } else { 1.0 };
                let raw: f64 = (0..m - lag)
                    .map(|j| w(j) * w(j + lag) * dist(j, j + lag).powf(p))
                    .sum();
                2.0 * raw * (lag as f64 * h).powf(-expo) * h * h
            }
        })
        .collect();
    let mut bands: Vec<f64> = Vec::new();
    for (i, v) in per_lag.iter().enumerate() {
        let b = (usize::BITS - 1 - (i + 1).leading_zeros()) as usize;
        if bands.len() <= b {
            bands.resize(b + 1, 0.0);
        }
        bands[b] += v;
    }
    // pairwise order is fixed, so the total is reproducible
    (bands.iter().sum(), bands)
}

/// Same quadrature with the diagonal correction of the Gagliardo module
/// subtracted: the integrand behaves like `‖A′‖^p r^σ`, `σ = p − 1 − sp`,
/// near `r = 0`. More accurate for smooth families; bands stay raw.
pub(crate) fn corrected_pairs<D>(
    dist: &D,
    m: usize,
    h: f64,
    s: f64,
    p: f64,
    period: Option<f64>,
) -> f64
where
    D: Fn(usize, usize) -> f64 + Sync,
{
    let (raw, _) = raw_pairs(dist, m, h, s, p, period);
    if m < 3 {
        return raw;
    }
    let sigma = p - 1.0 - s * p;
    let hp = h.powf(p);
    let slope = |j: usize| -> f64 {
        let fwd = if j + 1 < m {
            Some(dist(j, j + 1))
        } else {
            period.map(|_| dist(j, 0))
        };
        let bwd = if j > 0 {
            Some(dist(j, j - 1))
        } else {
            period.map(|_| dist(j, m - 1))
        };
        match (fwd, bwd) {
            (Some(a), Some(b)) => 0.5 * (a.powf(p) + b.powf(p)) / hp,
            (Some(a), None) | (None, Some(a)) => a.powf(p) / hp,
            (None, None) => 0.0,
        }
    };
    let z0 = riemann_zeta(-sigma);
    let corr = match period {
        Some(_) => 2.0 * z0 * h.powf(sigma + 2.0) * (0..m).map(slope).sum::<f64>(),
        None => {
            let z1 = riemann_zeta(-sigma - 1.0);
            let inner: f64 = (0..m)
                .map(|j| if j == 0 || j == m - 1 { 0.5 } else { 2.0 } * slope(j))
                .sum();
            z0 * h.powf(sigma + 2.0) * inner
                + z1 * h.powf(sigma + 2.0) * (slope(0) + slope(m - 1)) / (sigma + 1.0)
        }
    };
    (raw - corr).max(0.0)
}

/// Spectral norm of a small dense matrix.
pub(crate) fn op_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].norm();
    }
    m.clone().singular_values().max()
}

/// `[G]_{W^{s,p}}` for a family sampled at the grid times with Euclidean
/// operator norms, over the whole grid read as one period.
pub fn operator_regularity(g: &Sampler, grid: &TimeGrid, s: f64, p: f64) -> Result<RegularityReport> {
    let times = grid.times();
    let h = grid.spacing();
    match g.as_separable() {
        Some((_, a1, prof)) => {
            let c = op_norm(a1);
            let vals: Vec<f64> = times.iter().map(|&t| prof.eval(t)).collect();
            pair_distance_regularity(
                |j, k| c * (vals[j] - vals[k]).abs(),
                times.len(),
                h,
                s,
                p,
                Some(grid.period()),
            )
        }
        None => {
            let mats: Vec<CMatrix> = times.par_iter().map(|&t| g.matrix(t)).collect();
            pair_distance_regularity(
                |j, k| op_norm(&(&mats[j] - &mats[k])),
                times.len(),
                h,
                s,
                p,
                Some(grid.period()),
            )
        }
    }
}

/// `[𝒜]_{W^{s,p}(I; 𝓛(V, V′))}` of the form's principal part (the whole
/// form if there is no split) over its interval, or over the torus when the
/// form lives on the line. The `V → V′` norm is the spectral norm of
/// `𝓑^{−1/2}(A(t) − A(s))𝓑^{−1/2}`.
pub fn form_regularity(
    f: &NonAutonomousForm,
    s: f64,
    p: f64,
    grid: &TimeGrid,
) -> Result<RegularityReport> {
    let times = f.sample_times(grid);
    if times.len() < 2 {
        return structural("fewer than two grid times inside the form's interval");
    }
    let period = match f.interval() {
        Some(_) => None,
        None => Some(grid.period()),
    };
    let sampler = f.principal();
    let sq = f.triple().riesz_power_c(-0.5);
    let h = grid.spacing();
    match sampler.as_separable() {
        Some((_, a1, prof)) => {
            let c = op_norm(&(&sq * a1 * &sq));
            let vals: Vec<f64> = times.iter().map(|&t| prof.eval(t)).collect();
            pair_distance_regularity(|j, k| c * (vals[j] - vals[k]).abs(), times.len(), h, s, p, period)
        }
        None => {
            let mats: Vec<CMatrix> = times
                .par_iter()
                .map(|&t| &sq * sampler.matrix(t) * &sq)
                .collect();
            pair_distance_regularity(
                |j, k| op_norm(&(&mats[j] - &mats[k])),
                times.len(),
                h,
                s,
                p,
                period,
            )
        }
    }
}
