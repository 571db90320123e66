//! Crank–Nicolson reference for the initial value problem.

use serde::{Deserialize, Serialize};

use crate::form::Sampler;
use crate::{CMatrix, CVector, C64};

/// Comparison of the spectral solution with the time stepper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub steps: usize,
    /// `max_k ‖u(t_k) − u_CN(t_k)‖_H` over the window nodes.
    pub max_diff: f64,
    /// `max_diff / max_k ‖u(t_k)‖_H`.
    pub relative: f64,
}

/// Trapezoidal Crank–Nicolson for `u′ + A(t)u = f(t)`, `u(t0) = u0`.
/// Returns the `steps + 1` iterates including `u0`.
pub fn crank_nicolson<F>(sampler: &Sampler, f: F, u0: &CVector, t0: f64, t1: f64, steps: usize) -> Vec<CVector>
where
    F: Fn(f64) -> CVector,
{
    let d = u0.len();
    let h = (t1 - t0) / steps.max(1) as f64;
    let half = C64::new(0.5 * h, 0.0);
    let eye = CMatrix::identity(d, d);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(u0.clone());
    let mut u = u0.clone();
    let mut a_prev = sampler.matrix(t0);
    let mut f_prev = f(t0);
    for k in 1..=steps {
        let t = t0 + k as f64 * h;
        let a = sampler.matrix(t);
        let fk = f(t);
        let rhs = (&eye - &a_prev * half) * &u + (&f_prev + &fk) * half;
        let lhs = &eye + &a * half;
        u = lhs.lu().solve(&rhs).unwrap_or_else(|| CVector::from_element(d, C64::new(f64::NAN, 0.0)));
        out.push(u.clone());
        a_prev = a;
        f_prev = fk;
    }
    out
}
