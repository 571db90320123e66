//! Non-autonomous forms `𝔞(t, v, w) = w* A(t) v` on a Gelfand triple.
//!
//! The associated space-time operator is collocated in time:
//! `(𝒜v)(t_k) = A(t_k) v(t_k)`. With a fixed quadrature the duality
//! `L²(I; V′) ≅ (L²(I; V))′` is the canonical identification, so it has no
//! separate representation here.

mod commutator;
mod extend;
mod profile;
mod regularity;
mod sampler;

pub use commutator::{
    apply_family, commutator_check, commutator_check_with, commutator_constant, commutator_integral,
    default_delta0, CommutatorRecipe, CommutatorReport,
};
pub use extend::{extend_form_to_line, LineExtension};
pub use profile::{make_time_profile, ProfileKind, TimeProfile};
pub use regularity::{form_regularity, operator_regularity, pair_distance_regularity, RegularityReport};
pub use sampler::{CustomSampler, Sampler};

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, structural, MregError, Result};
use crate::gelfand::GelfandTriple;
use crate::spectral::{Signal, TimeGrid};
use crate::{CMatrix, C64};

/// Measured or declared constants of a form family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormConstants {
    /// `|𝔞(t, v, w)| ≤ M ‖v‖_V ‖w‖_V`.
    pub bound_m: f64,
    /// `Re 𝔞(t, v, v) + ω‖v‖²_H ≥ η ‖v‖²_V`.
    pub eta: f64,
    pub omega: f64,
    /// `|𝔞₂(t, v, w)| ≤ M₂ ‖v‖_V ‖w‖_{H_{1+2β−2α}}` (0 without a split).
    pub m2: f64,
    /// `Re 𝔞₂(t, v, v) ≥ −η₂ ‖v‖²_V` (0 without a split).
    pub eta2: f64,
}

/// `𝔞 = 𝔞₁ + 𝔞₂` with `𝔞₂` of lower order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Split {
    pub a1: Sampler,
    pub a2: Sampler,
    /// Target regularity `α ∈ (0, 1/2]`.
    pub alpha: f64,
    /// `β ∈ [0, α)`; `𝔞₂` acts into `H_{2α−2β−1}`.
    pub beta: f64,
}

impl Split {
    /// Index `1 + 2β − 2α` of the space the second argument of `𝔞₂` lives in.
    pub fn target_index(&self) -> f64 {
        1.0 + 2.0 * self.beta - 2.0 * self.alpha
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonAutonomousForm {
    triple: GelfandTriple,
    sampler: Sampler,
    constants: Option<FormConstants>,
    split: Option<Split>,
    /// Time interval `I = [start, end]`, `None` on the line.
    interval: Option<(f64, f64)>,
}

impl NonAutonomousForm {
    pub fn new(triple: GelfandTriple, sampler: Sampler) -> Result<Self> {
        sampler.validate()?;
        let d = triple.dim();
        if sampler.shape() != (d, d) {
            return structural(format!(
                "sampler shape {:?} does not match the triple dimension {d}",
                sampler.shape()
            ));
        }
        Ok(Self {
            triple,
            sampler,
            constants: None,
            split: None,
            interval: None,
        })
    }

    /// `𝔞 = 𝔞₁ + 𝔞₂`.
    pub fn with_split(
        triple: GelfandTriple,
        a1: Sampler,
        a2: Sampler,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 0.5) {
            return domain(format!("split regularity α = {alpha} outside (0, 1/2]"));
        }
        if !(beta >= 0.0 && beta < alpha) {
            return domain(format!("perturbation index β = {beta} outside [0, α)"));
        }
        let sum = Sampler::Sum {
            terms: vec![a1.clone(), a2.clone()],
        };
        let mut f = Self::new(triple, sum)?;
        if a1.shape() != a2.shape() {
            return structural("split parts have different shapes");
        }
        f.split = Some(Split {
            a1,
            a2,
            alpha,
            beta,
        });
        Ok(f)
    }

    pub fn on_interval(mut self, start: f64, end: f64) -> Result<Self> {
        if !(end > start) {
            return structural(format!("empty interval [{start}, {end}]"));
        }
        self.interval = Some((start, end));
        Ok(self)
    }

    /// Declared constants; replaced by [`estimate_constants`] results.
    pub fn with_constants(mut self, c: FormConstants) -> Self {
        self.constants = Some(c);
        self
    }

    pub fn triple(&self) -> &GelfandTriple {
        &self.triple
    }

    pub fn sampler(&self) -> &Sampler {
        &self.sampler
    }

    pub fn split(&self) -> Option<&Split> {
        self.split.as_ref()
    }

    pub fn interval(&self) -> Option<(f64, f64)> {
        self.interval
    }

    pub fn constants(&self) -> Option<&FormConstants> {
        self.constants.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.triple.dim()
    }

    /// The part carrying the coercivity: `𝔞₁` if split, else `𝔞`.
    pub fn principal(&self) -> &Sampler {
        self.split.as_ref().map_or(&self.sampler, |s| &s.a1)
    }

    pub fn matrix(&self, t: f64) -> CMatrix {
        self.sampler.matrix(t)
    }

    pub fn eval(&self, t: f64, v: &[C64], w: &[C64]) -> C64 {
        let mut av = vec![C64::new(0.0, 0.0); v.len()];
        self.sampler.apply(t, v, &mut av);
        av.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
    }

    /// `𝔞(t) + ω(·|·)_H`, the form seen by `e^{−ωt}u`.
    pub fn shifted(&self, omega: f64) -> NonAutonomousForm {
        let mut f = self.clone();
        f.sampler = self.sampler.shifted(omega);
        if let Some(s) = f.split.as_mut() {
            s.a1 = s.a1.shifted(omega);
        }
        if let Some(c) = f.constants.as_mut() {
            c.omega = (c.omega - omega).max(0.0);
            c.bound_m += omega * self.triple.embedding_constant().powi(2);
        }
        f
    }

    /// Replaces the sampler (and split parts) keeping triple and constants.
    pub(crate) fn with_samplers(&self, sampler: Sampler, split: Option<Split>) -> Self {
        Self {
            triple: self.triple.clone(),
            sampler,
            constants: self.constants,
            split,
            interval: None,
        }
    }

    /// Grid times at which the form is sampled: the interval's when set.
    pub fn sample_times(&self, grid: &TimeGrid) -> Vec<f64> {
        let ts = grid.times();
        match self.interval {
            Some((a, b)) => {
                let tol = 1e-9 * grid.spacing();
                ts.into_iter().filter(|&t| t >= a - tol && t <= b + tol).collect()
            }
            None => ts,
        }
    }
}

/// Time-collocated operator `(𝒜v)(t_k) = A(t_k) v(t_k)`.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    sampler: Sampler,
    grid: TimeGrid,
    dim: usize,
}

impl BlockOperator {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block(&self, k: usize) -> CMatrix {
        self.sampler.matrix(self.grid.time(k))
    }

    pub fn apply(&self, v: &Signal) -> Result<Signal> {
        if !v.grid().same_as(&self.grid) || v.dim() != self.dim {
            return structural("signal does not match the operator's grid or dimension");
        }
        let d = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); v.values().len()];
        out.par_chunks_mut(d).enumerate().for_each(|(k, o)| {
            self.sampler.apply(self.grid.time(k), v.at(k), o);
        });
        Signal::new(self.grid.clone(), d, out, v.space())
    }

    /// `∫ ⟨𝒜v, w⟩ dt` by the rectangle rule.
    pub fn form_value(&self, v: &Signal, w: &Signal) -> Result<C64> {
        self.apply(v)?.l2_inner(w)
    }
}

/// The space-time operator of `F` on `grid`.
pub fn assemble_spacetime(f: &NonAutonomousForm, grid: &TimeGrid) -> Result<BlockOperator> {
    let bad = match f.sampler.as_separable() {
        Some((a0, a1, g)) => {
            !all_finite(a0) || !all_finite(a1) || grid.times().iter().any(|&t| !g.eval(t).is_finite())
        }
        None => (0..grid.n_points())
            .into_par_iter()
            .any(|k| !all_finite(&f.sampler.matrix(grid.time(k)))),
    };
    if bad {
        return Err(MregError::Data("sampled form matrix is not finite".into()));
    }
    Ok(BlockOperator {
        sampler: f.sampler.clone(),
        grid: grid.clone(),
        dim: f.dim(),
    })
}

fn all_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest shift tried by [`estimate_constants`].
pub const OMEGA_MAX: f64 = 1e12;

/// Measures `M`, `η`, `ω` (and `M₂`, `η₂` for a split form) over the grid
/// times and stores them in the form.
///
/// `ω = 0` if the form is coercive. Otherwise `ω` runs through
/// `ω₀, 2ω₀, 4ω₀, …` starting from the smallest shift that could work,
/// and the first value with `η > 0` is doubled once more for margin.
pub fn estimate_constants(f: &mut NonAutonomousForm, grid: &TimeGrid) -> Result<FormConstants> {
    let c = measure_constants(f, grid, OMEGA_MAX)?;
    f.constants = Some(c);
    Ok(c)
}

pub fn measure_constants(
    f: &NonAutonomousForm,
    grid: &TimeGrid,
    omega_max: f64,
) -> Result<FormConstants> {
    let times = f.sample_times(grid);
    if times.is_empty() {
        return structural("no grid time falls inside the form's interval");
    }
    let s = f.triple.riesz_power_c(-0.5);
    let binv = f.triple.riesz_power_c(-1.0);
    let principal = f.principal();
    let probe = probe_times(principal, &times);

    let whitened = |t: f64| -> CMatrix { &s * principal.matrix(t) * &s };
    let bound_m = probe
        .par_iter()
        .map(|&t| whitened(t).singular_values().max())
        .reduce(|| 0.0, f64::max);
    let eta_at = |omega: f64| -> f64 {
        probe
            .par_iter()
            .map(|&t| {
                let w = whitened(t);
                let h = (&w + w.adjoint()) * C64::new(0.5, 0.0) + &binv * C64::new(omega, 0.0);
                SymmetricEigen::new(h).eigenvalues.min()
            })
            .reduce(|| f64::INFINITY, f64::min)
    };
    let eta0 = eta_at(0.0);
    let (eta, omega) = if eta0 > 0.0 {
        (eta0, 0.0)
    } else {
        let lmin = f.triple.eigenvalues().min();
        let mut omega = (-eta0 * lmin).max(1e-12 * lmin);
        loop {
            if omega > omega_max {
                return Err(MregError::NotQuasiCoercive {
                    best_eta: eta_at(omega_max),
                    omega: omega_max,
                });
            }
            if eta_at(omega) > 0.0 {
                break;
            }
            omega *= 2.0;
        }
        omega *= 2.0;
        (eta_at(omega), omega)
    };

    let (m2, eta2) = match &f.split {
        None => (0.0, 0.0),
        Some(sp) => {
            let left = f.triple.riesz_power_c(-sp.target_index() / 2.0);
            let times2 = probe_times(&sp.a2, &times);
            let m2 = times2
                .par_iter()
                .map(|&t| (&left * sp.a2.matrix(t) * &s).singular_values().max())
                .reduce(|| 0.0, f64::max);
            let low = times2
                .par_iter()
                .map(|&t| {
                    let w = &s * sp.a2.matrix(t) * &s;
                    SymmetricEigen::new((&w + w.adjoint()) * C64::new(0.5, 0.0))
                        .eigenvalues
                        .min()
                })
                .reduce(|| f64::INFINITY, f64::min);
            (m2, -low)
        }
    };
    Ok(FormConstants {
        bound_m,
        eta,
        omega,
        m2,
        eta2,
    })
}

/// For `A₀ + g(t)A₁` the norm is convex and `λ_min` of the Hermitian part
/// concave in `g`, so the extremes of `g` over the grid are enough.
fn probe_times(s: &Sampler, times: &[f64]) -> Vec<f64> {
    match s.as_separable() {
        Some((_, _, g)) => {
            let (mut lo, mut hi) = (times[0], times[0]);
            for &t in times {
                if g.eval(t) < g.eval(lo) {
                    lo = t;
                }
                if g.eval(t) > g.eval(hi) {
                    hi = t;
                }
            }
            vec![lo, hi]
        }
        None if s.is_autonomous() => vec![times[0]],
        None => times.to_vec(),
    }
}
