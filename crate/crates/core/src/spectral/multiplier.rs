use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::signal::{forward, inverse};
use super::{Signal, TimeGrid};
use crate::error::{structural, Result};
use crate::C64;

/// Symbol of a Fourier multiplier acting on time signals.
///
/// Fractional powers vanish at `ξ = 0`; the branch of `(iξ)^α` is the
/// principal one, `|ξ|^α exp(iαπ sign(ξ)/2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Symbol {
    /// `∂`, symbol `iξ`.
    Derivative,
    /// `∂^α`, symbol `(iξ)^α`.
    FracDerivative {
        alpha: f64,
    },
    /// `∂^{α*}`, symbol `conj((iξ)^α)`.
    FracDerivativeAdjoint {
        alpha: f64,
    },
    /// `|∂|^α`, symbol `|ξ|^α`.
    AbsPower {
        alpha: f64,
    },
    /// Hilbert transform, symbol `-i sign ξ`.
    Hilbert,
    /// `1 - δℋ`, symbol `1 + iδ sign ξ`.
    Stabilizer {
        delta: f64,
    },
    /// Explicit values on a given grid, in DFT order.
    Tabulated {
        n_points: usize,
        period: f64,
        values: Vec<C64>,
    },
    Product {
        factors: Vec<Symbol>,
    },
    Scaled {
        factor: C64,
        inner: Box<Symbol>,
    },
}

fn sign(xi: f64) -> f64 {
    if xi > 0.0 {
        1.0
    } else if xi < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `(iξ)^α` on the principal branch, `0` at `ξ = 0` unless `α = 0`.
pub fn frac_symbol(xi: f64, alpha: f64) -> C64 {
    if alpha == 0.0 {
        return C64::new(1.0, 0.0);
    }
    if xi == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::from_polar(xi.abs().powf(alpha), alpha * FRAC_PI_2 * sign(xi))
}

impl Symbol {
    /// Symbol value at DFT slot `k` of `grid`.
    pub fn value(&self, grid: &TimeGrid, k: usize) -> C64 {
        let xi = grid.frequency(k);
        match self {
            Symbol::Derivative => C64::new(0.0, xi),
            Symbol::FracDerivative { alpha } => frac_symbol(xi, *alpha),
            Symbol::FracDerivativeAdjoint { alpha } => frac_symbol(xi, *alpha).conj(),
            Symbol::AbsPower { alpha } => {
                if *alpha == 0.0 {
                    C64::new(1.0, 0.0)
                } else if xi == 0.0 {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(xi.abs().powf(*alpha), 0.0)
                }
            }
            Symbol::Hilbert => C64::new(0.0, -sign(xi)),
            Symbol::Stabilizer { delta } => C64::new(1.0, delta * sign(xi)),
            Symbol::Tabulated { values, .. } => values[k],
            Symbol::Product { factors } => factors
                .iter()
                .fold(C64::new(1.0, 0.0), |acc, s| acc * s.value(grid, k)),
            Symbol::Scaled { factor, inner } => factor * inner.value(grid, k),
        }
    }

    fn check_grid(&self, grid: &TimeGrid) -> Result<()> {
        match self {
            Symbol::Tabulated {
                n_points,
                period,
                values,
            } => {
                if *n_points != grid.n_points()
                    || values.len() != grid.n_points()
                    || (period - grid.period()).abs() > 1e-12 * grid.period()
                {
                    return structural(format!(
                        "tabulated symbol on {n_points} points / period {period} does not match grid ({}, {})",
                        grid.n_points(),
                        grid.period()
                    ));
                }
                if values
                    .iter()
                    .any(|z| !z.re.is_finite() || !z.im.is_finite())
                {
                    return structural("tabulated symbol has non-finite values");
                }
                Ok(())
            }
            Symbol::Product { factors } => factors.iter().try_for_each(|s| s.check_grid(grid)),
            Symbol::Scaled { inner, .. } => inner.check_grid(grid),
            _ => Ok(()),
        }
    }
}

/// A named Fourier multiplier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierMultiplier {
    pub name: String,
    pub symbol: Symbol,
}

impl FourierMultiplier {
    pub fn new(name: impl Into<String>, symbol: Symbol) -> Self {
        Self {
            name: name.into(),
            symbol,
        }
    }

    pub fn derivative() -> Self {
        Self::new("∂", Symbol::Derivative)
    }

    pub fn frac_derivative(alpha: f64) -> Self {
        Self::new(format!("∂^{alpha}"), Symbol::FracDerivative { alpha })
    }

    pub fn frac_derivative_adjoint(alpha: f64) -> Self {
        Self::new(
            format!("∂^{alpha}*"),
            Symbol::FracDerivativeAdjoint { alpha },
        )
    }

    pub fn abs_power(alpha: f64) -> Self {
        Self::new(format!("|∂|^{alpha}"), Symbol::AbsPower { alpha })
    }

    pub fn hilbert() -> Self {
        Self::new("ℋ", Symbol::Hilbert)
    }

    pub fn stabilizer(delta: f64) -> Self {
        Self::new(format!("1-{delta}ℋ"), Symbol::Stabilizer { delta })
    }

    /// `self ∘ other`.
    pub fn then(self, other: FourierMultiplier) -> Self {
        Self::new(
            format!("{}∘{}", other.name, self.name),
            Symbol::Product {
                factors: vec![self.symbol, other.symbol],
            },
        )
    }

    pub fn symbol_values(&self, grid: &TimeGrid) -> Result<Vec<C64>> {
        self.symbol.check_grid(grid)?;
        Ok((0..grid.n_points())
            .map(|k| self.symbol.value(grid, k))
            .collect())
    }
}

/// Inverse transform of `symbol · û` on the signal's own grid.
pub fn apply_multiplier(m: &FourierMultiplier, u: &Signal) -> Result<Signal> {
    let sym = m.symbol_values(u.grid())?;
    let n = u.n_points();
    let d = u.dim();
    let mut spec = forward(u);
    for (k, s) in sym.iter().enumerate() {
        for z in &mut spec[k * d..(k + 1) * d] {
            *z *= s;
        }
    }
    u.with_values(inverse(&spec, n, d))
}

/// `‖m u‖_{L²}` evaluated in frequency space, `(h/n) Σ_k |m_k|² ‖û_k‖²`.
pub fn multiplier_norm(m: &FourierMultiplier, u: &Signal) -> Result<f64> {
    let sym = m.symbol_values(u.grid())?;
    let d = u.dim();
    let spec = forward(u);
    let h = u.grid().spacing();
    let n = u.n_points() as f64;
    let s: f64 = sym
        .iter()
        .enumerate()
        .map(|(k, s)| {
            s.norm_sqr()
                * spec[k * d..(k + 1) * d]
                    .iter()
                    .map(|z| z.norm_sqr())
                    .sum::<f64>()
        })
        .sum();
    Ok((s * h / n).sqrt())
}

/// Convenience: `‖∂^α u‖_{L²}`.
pub fn frac_seminorm(u: &Signal, alpha: f64) -> f64 {
    multiplier_norm(&FourierMultiplier::abs_power(alpha), u).expect("built-in symbol")
}
