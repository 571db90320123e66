//! The collocation system `(∂ + 𝒜)u = f` on the torus.
//!
//! Unknowns are time-major samples. `∂` acts through the DFT with symbol
//! `iξ`, `𝒜` pointwise in time. The preconditioner is `(∂ + Ā)^{-1}` with
//! `Ā` the grid mean of `A(t)`, which is block diagonal in frequency.

use nalgebra::LU;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{structural, MregError, Result};
use crate::form::Sampler;
use crate::gelfand::eigen_decomposition;
use crate::spectral::{transform, TimeGrid};
use crate::{CMatrix, CVector, C64};

/// Largest system solved by dense LU.
pub const DIRECT_LIMIT: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinearSolver {
    /// Dense LU of the assembled system (at most [`DIRECT_LIMIT`] unknowns).
    Direct,
    /// Restarted GMRES, right preconditioned.
    Iterative {
        tol: f64,
        max_iter: usize,
        restart: usize,
    },
}

impl LinearSolver {
    pub fn iterative() -> Self {
        LinearSolver::Iterative {
            tol: 1e-10,
            max_iter: 2000,
            restart: 60,
        }
    }

    /// Direct below the dense limit, GMRES otherwise.
    pub fn auto(unknowns: usize) -> Self {
        if unknowns <= DIRECT_LIMIT {
            LinearSolver::Direct
        } else {
            Self::iterative()
        }
    }
}

/// What a linear solve did.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveStats {
    pub method: String,
    pub iterations: usize,
    /// Relative residuals `‖b − Tx‖/‖b‖` after each GMRES cycle step.
    pub residual_history: Vec<f64>,
    /// Final relative residual, recomputed through the FFT path.
    pub relative_residual: f64,
}

/// `T = ∂ + 𝒜` on a grid.
pub(crate) struct Collocation<'a> {
    sampler: &'a Sampler,
    times: Vec<f64>,
    xi: Vec<f64>,
    n: usize,
    d: usize,
}

impl<'a> Collocation<'a> {
    pub(crate) fn new(sampler: &'a Sampler, grid: &TimeGrid) -> Self {
        let (d, _) = sampler.shape();
        Self {
            sampler,
            times: grid.times(),
            xi: grid.frequencies(),
            n: grid.n_points(),
            d,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.n * self.d
    }

    /// Spectral derivative of time-major samples.
    pub(crate) fn derivative(&self, x: &[C64]) -> Vec<C64> {
        scale_spectrum(x, self.n, self.d, |k| C64::new(0.0, self.xi[k]))
    }

    pub(crate) fn apply_a(&self, x: &[C64]) -> Vec<C64> {
        let d = self.d;
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        out.par_chunks_mut(d).enumerate().for_each(|(j, o)| {
            self.sampler.apply(self.times[j], &x[j * d..(j + 1) * d], o);
        });
        out
    }

    pub(crate) fn apply_a_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let d = self.d;
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        out.par_chunks_mut(d).enumerate().for_each(|(j, o)| {
            let m = self.sampler.matrix(self.times[j]);
            let y = m.adjoint() * CVector::from_column_slice(&x[j * d..(j + 1) * d]);
            o.copy_from_slice(y.as_slice());
        });
        out
    }

    pub(crate) fn apply(&self, x: &[C64]) -> Vec<C64> {
        let mut y = self.derivative(x);
        let ax = self.apply_a(x);
        y.iter_mut().zip(&ax).for_each(|(a, b)| *a += b);
        y
    }

    /// `T* = −∂ + 𝒜*` for the plain Euclidean pairing of samples.
    pub(crate) fn apply_adjoint(&self, x: &[C64]) -> Vec<C64> {
        let mut y = self.derivative(x);
        let ax = self.apply_a_adjoint(x);
        y.iter_mut().zip(&ax).for_each(|(a, b)| *a = -*a + b);
        y
    }

    pub(crate) fn mean_matrix(&self) -> CMatrix {
        // collected first so the summation order does not depend on threads
        let mats: Vec<CMatrix> = self.times.par_iter().map(|&t| self.sampler.matrix(t)).collect();
        let sum = mats
            .iter()
            .fold(CMatrix::zeros(self.d, self.d), |acc, m| acc + m);
        sum / C64::new(self.n as f64, 0.0)
    }

    fn dense(&self) -> CMatrix {
        let (n, d) = (self.n, self.d);
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[0] = C64::new(1.0, 0.0);
        // first column of the circulant derivative matrix
        let col = scale_spectrum(&e, n, 1, |k| C64::new(0.0, self.xi[k]));
        let mut m = CMatrix::zeros(n * d, n * d);
        for j in 0..n {
            for l in 0..n {
                let c = col[(j + n - l) % n];
                for a in 0..d {
                    m[(j * d + a, l * d + a)] += c;
                }
            }
            let blk = self.sampler.matrix(self.times[j]);
            for a in 0..d {
                for b in 0..d {
                    m[(j * d + a, j * d + b)] += blk[(a, b)];
                }
            }
        }
        m
    }
}

/// Multiplies the DFT of time-major samples by `sym(k)`.
pub(crate) fn scale_spectrum<F: Fn(usize) -> C64>(x: &[C64], n: usize, d: usize, sym: F) -> Vec<C64> {
    let mut s = transform(x, n, d, false);
    for k in 0..n {
        let c = sym(k) / n as f64;
        s[k * d..(k + 1) * d].iter_mut().for_each(|z| *z *= c);
    }
    transform(&s, n, d, true)
}

/// `(iξ + Ā)^{-1}` frequency by frequency.
pub(crate) struct MeanPreconditioner {
    n: usize,
    d: usize,
    inner: PrecKind,
}

enum PrecKind {
    /// One LU per frequency.
    Blocks(Vec<LU<C64, nalgebra::Dyn, nalgebra::Dyn>>),
    /// `Ā = V Λ V^{-1}`.
    Eigen {
        lambda: CVector,
        v: CMatrix,
        vinv: CMatrix,
        xi: Vec<f64>,
    },
}

impl MeanPreconditioner {
    pub(crate) fn new(col: &Collocation) -> Self {
        let abar = col.mean_matrix();
        let (n, d) = (col.n, col.d);
        if d > 16 {
            let (lambda, v) = eigen_decomposition(&abar);
            if let Some(vinv) = v.clone().try_inverse() {
                let cond = v.norm() * vinv.norm();
                if cond < 1e8 {
                    return Self {
                        n,
                        d,
                        inner: PrecKind::Eigen {
                            lambda,
                            v,
                            vinv,
                            xi: col.xi.clone(),
                        },
                    };
                }
            }
        }
        let blocks = col
            .xi
            .par_iter()
            .map(|&x| {
                let mut m = abar.clone();
                for a in 0..d {
                    m[(a, a)] += C64::new(0.0, x);
                }
                m.lu()
            })
            .collect();
        Self {
            n,
            d,
            inner: PrecKind::Blocks(blocks),
        }
    }

    pub(crate) fn apply(&self, x: &[C64]) -> Vec<C64> {
        let (n, d) = (self.n, self.d);
        let mut s = transform(x, n, d, false);
        s.par_chunks_mut(d).enumerate().for_each(|(k, blk)| {
            let b = CVector::from_column_slice(blk);
            let y = match &self.inner {
                PrecKind::Blocks(lus) => lus[k].solve(&b).unwrap_or_else(|| b.clone()),
                PrecKind::Eigen { lambda, v, vinv, xi } => {
                    let mut c = vinv * b;
                    for (ci, l) in c.iter_mut().zip(lambda.iter()) {
                        *ci /= l + C64::new(0.0, xi[k]);
                    }
                    v * c
                }
            };
            blk.copy_from_slice(y.as_slice());
        });
        let mut out = transform(&s, n, d, true);
        let c = 1.0 / n as f64;
        out.iter_mut().for_each(|z| *z *= c);
        out
    }
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    // ⟨x, y⟩ = Σ conj(x) y
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

/// A collocation system ready for repeated solves: the dense LU or the
/// preconditioner is built once.
pub(crate) struct Prepared<'a> {
    col: &'a Collocation<'a>,
    kind: PreparedKind,
}

enum PreparedKind {
    Direct(LU<C64, nalgebra::Dyn, nalgebra::Dyn>),
    Iterative {
        prec: MeanPreconditioner,
        tol: f64,
        max_iter: usize,
        restart: usize,
    },
}

impl<'a> Prepared<'a> {
    pub(crate) fn new(col: &'a Collocation<'a>, solver: &LinearSolver) -> Result<Self> {
        let kind = match *solver {
            LinearSolver::Direct => {
                if col.len() > DIRECT_LIMIT {
                    return Err(MregError::Config(format!(
                        "direct solve requested for {} unknowns (limit {DIRECT_LIMIT})",
                        col.len()
                    )));
                }
                PreparedKind::Direct(col.dense().lu())
            }
            LinearSolver::Iterative {
                tol,
                max_iter,
                restart,
            } => PreparedKind::Iterative {
                prec: MeanPreconditioner::new(col),
                tol,
                max_iter,
                restart: restart.max(1),
            },
        };
        Ok(Self { col, kind })
    }

    /// Solves `T x = b`.
    pub(crate) fn solve(&self, b: &[C64]) -> Result<(Vec<C64>, SolveStats)> {
        let col = self.col;
        if b.len() != col.len() {
            return structural("right-hand side does not match the collocation system");
        }
        let bn = norm(b);
        if bn == 0.0 {
            return Ok((
                vec![C64::new(0.0, 0.0); b.len()],
                SolveStats {
                    method: "trivial".into(),
                    iterations: 0,
                    residual_history: vec![],
                    relative_residual: 0.0,
                },
            ));
        }
        let (x, method, iterations, history) = match &self.kind {
            PreparedKind::Direct(lu) => {
                let x = lu
                    .solve(&CVector::from_column_slice(b))
                    .ok_or_else(|| MregError::Numerical {
                        message: "collocation matrix is singular".into(),
                        residual_history: vec![],
                    })?;
                (x.as_slice().to_vec(), "direct".to_string(), 1, vec![])
            }
            PreparedKind::Iterative {
                prec,
                tol,
                max_iter,
                restart,
            } => {
                let (y, it, hist) = gmres(|v| col.apply(&prec.apply(v)), b, *tol, *max_iter, *restart)?;
                (prec.apply(&y), "gmres".to_string(), it, hist)
            }
        };
        let mut r = col.apply(&x);
        r.iter_mut().zip(b).for_each(|(a, c)| *a = c - *a);
        let rel = norm(&r) / bn;
        Ok((
            x,
            SolveStats {
                method,
                iterations,
                residual_history: history,
                relative_residual: rel,
            },
        ))
    }
}

/// Restarted GMRES with modified Gram–Schmidt and Givens rotations.
/// Returns the solution, the iteration count and the residual history.
pub(crate) fn gmres<F>(
    op: F,
    b: &[C64],
    tol: f64,
    max_iter: usize,
    restart: usize,
) -> Result<(Vec<C64>, usize, Vec<f64>)>
where
    F: Fn(&[C64]) -> Vec<C64>,
{
    let n = b.len();
    let bn = norm(b);
    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut history = Vec::new();
    let mut total = 0;
    let zero = C64::new(0.0, 0.0);
    loop {
        let ax = op(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(a, c)| a - c).collect();
        let beta = norm(&r);
        history.push(beta / bn);
        if beta / bn <= tol {
            return Ok((x, total, history));
        }
        if total >= max_iter {
            return Err(MregError::Numerical {
                message: format!(
                    "GMRES did not reach relative residual {tol:e} in {max_iter} iterations (last {:e})",
                    beta / bn
                ),
                residual_history: history,
            });
        }
        let m = restart.min(max_iter - total);
        let mut basis: Vec<Vec<C64>> = vec![r.iter().map(|z| z / beta).collect()];
        let mut h = vec![vec![zero; m]; m + 1];
        let mut cs = vec![0.0f64; m];
        let mut sn = vec![zero; m];
        let mut g = vec![zero; m + 1];
        g[0] = C64::new(beta, 0.0);
        let mut used = 0;
        for j in 0..m {
            let mut w = op(&basis[j]);
            for (i, q) in basis.iter().enumerate() {
                let hij = dot(q, &w);
                h[i][j] = hij;
                w.iter_mut().zip(q).for_each(|(a, c)| *a -= hij * c);
            }
            let wn = norm(&w);
            h[j + 1][j] = C64::new(wn, 0.0);
            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i].conj() * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            // rotation zeroing h[j+1][j]
            let (a, bb) = (h[j][j], h[j + 1][j]);
            let r = (a.norm_sqr() + bb.norm_sqr()).sqrt();
            if r == 0.0 {
                cs[j] = 1.0;
                sn[j] = zero;
            } else if a.norm() == 0.0 {
                cs[j] = 0.0;
                sn[j] = bb.conj() / r;
            } else {
                cs[j] = a.norm() / r;
                sn[j] = (a / a.norm()) * bb.conj() / r;
            }
            h[j][j] = cs[j] * a + sn[j] * bb;
            h[j + 1][j] = zero;
            g[j + 1] = -sn[j].conj() * g[j];
            g[j] *= cs[j];
            used = j + 1;
            total += 1;
            let res = g[j + 1].norm() / bn;
            history.push(res);
            if res <= tol || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|z| z / wn).collect());
        }
        // back substitution
        let mut y = vec![zero; used];
        for i in (0..used).rev() {
            let mut s = g[i];
            for k in i + 1..used {
                s -= h[i][k] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (yi, q) in y.iter().zip(&basis) {
            x.iter_mut().zip(q).for_each(|(a, c)| *a += yi * c);
        }
    }
}
