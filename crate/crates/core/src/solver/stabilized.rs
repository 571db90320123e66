//! The stabilized variational forms of the existence proofs.
//!
//! Weak: `E(v, w) = ⟨∂^{1/2}v, ∂^{(1/2)*}(1 − δℋ)w⟩ + ∫⟨𝒜v, (1 − δℋ)w⟩`.
//! Regular: the multiplier `1 − δℋ` is replaced by `D` with symbol
//! `(1 + iδ sign ξ)|ξ|^{2α} + ρ`. In both cases `E(v, w) = ⟨(∂ + 𝒜)v, Sw⟩`
//! with `S` the respective multiplier, which is how they are evaluated.

use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::linear::{scale_spectrum, Collocation};
use super::spacetime_norm;
use crate::error::{domain, structural, Result};
use crate::form::{NonAutonomousForm, Sampler};
use crate::gelfand::GelfandTriple;
use crate::spectral::{transform, Signal, TimeGrid};
use crate::{CMatrix, C64};

/// Systems up to this size get a dense eigensolve for the coercivity.
const DENSE_COERCIVITY: usize = 384;
const LANCZOS_STEPS: usize = 240;

#[derive(Debug, Clone)]
pub struct StabilizedForm {
    sampler: Sampler,
    grid: TimeGrid,
    triple: GelfandTriple,
    /// `0` for the weak form.
    alpha: f64,
    delta: f64,
    rho: f64,
}

/// Smallest value of `Re E(v, v)/‖v‖²` over the discrete space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoercivityEstimate {
    pub value: f64,
    /// `"dense"` (exact up to rounding) or `"lanczos"` (an upper estimate
    /// that converges from above).
    pub method: String,
    pub steps: usize,
}

impl StabilizedForm {
    pub fn weak(f: &NonAutonomousForm, grid: &TimeGrid, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return domain(format!("stabilizer δ = {delta} outside (0, 1)"));
        }
        Ok(Self {
            sampler: f.sampler().clone(),
            grid: grid.clone(),
            triple: f.triple().clone(),
            alpha: 0.0,
            delta,
            rho: 0.0,
        })
    }

    pub fn regular(f: &NonAutonomousForm, grid: &TimeGrid, alpha: f64, delta: f64, rho: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 0.5) {
            return domain(format!("α = {alpha} outside (0, 1/2]"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return domain(format!("stabilizer δ = {delta} outside (0, 1)"));
        }
        if !(rho >= 0.0) {
            return domain(format!("ρ = {rho} must be nonnegative"));
        }
        Ok(Self {
            sampler: f.sampler().clone(),
            grid: grid.clone(),
            triple: f.triple().clone(),
            alpha,
            delta,
            rho,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    fn symbol_at(&self, xi: f64) -> C64 {
        let s = C64::new(1.0, self.delta * sign(xi));
        if self.alpha == 0.0 {
            s
        } else {
            s * xi.abs().powf(2.0 * self.alpha) + self.rho
        }
    }

    /// Values of `S` in DFT order.
    pub fn symbol(&self) -> Vec<C64> {
        self.grid.frequencies().iter().map(|&x| self.symbol_at(x)).collect()
    }

    fn check(&self, v: &Signal) -> Result<()> {
        if !v.grid().same_as(&self.grid) || v.dim() != self.triple.dim() {
            return structural("signal does not match the stabilized form");
        }
        Ok(())
    }

    fn apply_s(&self, x: &[C64], conj: bool) -> Vec<C64> {
        let xi = self.grid.frequencies();
        let d = self.triple.dim();
        scale_spectrum(x, self.grid.n_points(), d, |k| {
            let s = self.symbol_at(xi[k]);
            if conj {
                s.conj()
            } else {
                s
            }
        })
    }

    /// `E(v, w)`.
    pub fn value(&self, v: &Signal, w: &Signal) -> Result<C64> {
        self.check(v)?;
        self.check(w)?;
        let col = Collocation::new(&self.sampler, &self.grid);
        let tv = col.apply(v.values());
        let sw = self.apply_s(w.values(), false);
        let s: C64 = tv.iter().zip(&sw).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.spacing())
    }

    /// `‖v‖²_{𝒱_α}` (`𝒱₀` for the weak form).
    pub fn norm_sq(&self, v: &Signal) -> Result<f64> {
        self.check(v)?;
        let t = &self.triple;
        let mut n2 = spacetime_norm(v, 0.5 + self.alpha, 0.0, t)?.powi(2) + spacetime_norm(v, 0.0, 1.0, t)?.powi(2);
        if self.alpha > 0.0 {
            n2 += spacetime_norm(v, self.alpha, 1.0, t)?.powi(2);
        }
        Ok(n2)
    }

    /// Weight of the `𝒱_α` norm at frequency `ξ` for a `𝓑`-eigenvalue `b`.
    fn gram(&self, xi: f64, b: f64) -> f64 {
        let a = xi.abs();
        if self.alpha == 0.0 {
            a + b
        } else {
            a.powf(1.0 + 2.0 * self.alpha) + (1.0 + a.powf(2.0 * self.alpha)) * b
        }
    }

    /// Measured coercivity constant: the bottom of the spectrum of
    /// `Re E` relative to the `𝒱_α` Gram matrix.
    pub fn coercivity(&self) -> Result<CoercivityEstimate> {
        let n = self.grid.n_points();
        let d = self.triple.dim();
        let big_n = n * d;
        let col = Collocation::new(&self.sampler, &self.grid);
        let xi = self.grid.frequencies();
        let q = self.triple.eigenvectors().map(|x| C64::new(x, 0.0));
        let b = self.triple.eigenvalues().clone();
        let isq: Vec<f64> = (0..big_n)
            .map(|idx| 1.0 / self.gram(xi[idx / d], b[idx % d]).sqrt())
            .collect();
        let rn = (n as f64).sqrt();
        // y (B-eigenbasis, whitened spectrum) -> samples
        let psi = |y: &[C64]| -> Vec<C64> {
            let mut z = vec![C64::new(0.0, 0.0); big_n];
            for k in 0..n {
                let yk = crate::CVector::from_iterator(d, (0..d).map(|i| y[k * d + i] * isq[k * d + i]));
                let zk = &q * yk;
                z[k * d..(k + 1) * d].copy_from_slice(zk.as_slice());
            }
            let mut x = transform(&z, n, d, true);
            x.iter_mut().for_each(|v| *v /= rn);
            x
        };
        let psi_adj = |x: &[C64]| -> Vec<C64> {
            let mut z = transform(x, n, d, false);
            z.iter_mut().for_each(|v| *v /= rn);
            let mut y = vec![C64::new(0.0, 0.0); big_n];
            for k in 0..n {
                let zk = crate::CVector::from_column_slice(&z[k * d..(k + 1) * d]);
                let yk = q.adjoint() * zk;
                for i in 0..d {
                    y[k * d + i] = yk[i] * isq[k * d + i];
                }
            }
            y
        };
        let w_apply = |y: &[C64]| -> Vec<C64> {
            let x = psi(y);
            let a = self.apply_s(&col.apply(&x), true);
            let bb = col.apply_adjoint(&self.apply_s(&x, false));
            let h: Vec<C64> = a.iter().zip(&bb).map(|(p, r)| (p + r) * 0.5).collect();
            psi_adj(&h)
        };
        if big_n <= DENSE_COERCIVITY {
            let mut m = CMatrix::zeros(big_n, big_n);
            let mut e = vec![C64::new(0.0, 0.0); big_n];
            for j in 0..big_n {
                e[j] = C64::new(1.0, 0.0);
                let c = w_apply(&e);
                for i in 0..big_n {
                    m[(i, j)] = c[i];
                }
                e[j] = C64::new(0.0, 0.0);
            }
            let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
            let ev = SymmetricEigen::new(m).eigenvalues.min();
            return Ok(CoercivityEstimate {
                value: ev,
                method: "dense".into(),
                steps: big_n,
            });
        }
        let (value, steps) = lanczos_min(w_apply, big_n, LANCZOS_STEPS.min(big_n));
        Ok(CoercivityEstimate {
            value,
            method: "lanczos".into(),
            steps,
        })
    }
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Smallest Ritz value of a Hermitian operator after `steps` Lanczos steps
/// with full reorthogonalization, started from a fixed smooth vector.
fn lanczos_min<F: Fn(&[C64]) -> Vec<C64>>(op: F, n: usize, steps: usize) -> (f64, usize) {
    let mut v0: Vec<C64> = (0..n)
        .map(|i| C64::new(1.0 + ((i * 7919) % 101) as f64 / 101.0, ((i * 104729) % 37) as f64 / 37.0))
        .collect();
    let nv = norm(&v0);
    v0.iter_mut().for_each(|z| *z /= nv);
    let mut basis = vec![v0];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    for j in 0..steps {
        let mut w = op(&basis[j]);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = norm(&w);
        if b < 1e-12 * a.abs().max(1.0) || j + 1 == steps {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|z| z / b).collect());
    }
    let m = alpha.len();
    let t = nalgebra::DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j {
            beta[i]
        } else if j + 1 == i {
            beta[j]
        } else {
            0.0
        }
    });
    (SymmetricEigen::new(t).eigenvalues.min(), m)
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::Sampler;
    use crate::CMatrix;

    #[test]
    fn weak_symbol_bounds() {
        let t = GelfandTriple::identity(1);
        let f = NonAutonomousForm::new(t, Sampler::constant(CMatrix::identity(1, 1))).unwrap();
        let g = TimeGrid::new(32, 4.0).unwrap();
        let e = StabilizedForm::weak(&f, &g, 0.3).unwrap();
        for s in e.symbol() {
            assert!(s.norm() >= 0.7 - 1e-15 && s.norm() <= 1.3 + 1e-15);
        }
    }

    #[test]
    fn scalar_autonomous_coercivity_is_exact() {
        // A = λ, B = 1: Re E = Σ (δ|ξ| + λ)|v̂|², norm Σ (|ξ| + 1)|v̂|²
        let lam = 2.0;
        let t = GelfandTriple::identity(1);
        let f = NonAutonomousForm::new(t, Sampler::constant(CMatrix::from_element(1, 1, C64::new(lam, 0.0)))).unwrap();
        let g = TimeGrid::new(64, 8.0).unwrap();
        let delta = 0.25;
        let e = StabilizedForm::weak(&f, &g, delta).unwrap();
        let c = e.coercivity().unwrap();
        let want = g
            .frequencies()
            .iter()
            .map(|x| (delta * x.abs() + lam) / (x.abs() + 1.0))
            .fold(f64::INFINITY, f64::min);
        assert!((c.value - want).abs() < 1e-10, "{} vs {want}", c.value);
        // Lanczos path on a larger grid stays above the exact minimum
        let g2 = TimeGrid::new(512, 8.0).unwrap();
        let e2 = StabilizedForm::weak(&f, &g2, delta).unwrap();
        let c2 = e2.coercivity().unwrap();
        let want2 = g2
            .frequencies()
            .iter()
            .map(|x| (delta * x.abs() + lam) / (x.abs() + 1.0))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(c2.method, "lanczos");
        assert!(c2.value >= want2 - 1e-9 && c2.value < want2 * 1.05, "{} vs {want2}", c2.value);
    }
}
