//! Extension operators from an interval window to the line.

use serde::{Deserialize, Serialize};

use super::gagliardo::{boundary_weighted_integral, gagliardo_report, SeminormDomain};
use super::Signal;
use crate::error::{domain, structural, Result};
use crate::C64;

/// Which end of the window is extended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// An extended signal with the measured seminorm ratio
/// `[𝓔u]_{W^{α,p}(extended)} / [u]_{W^{α,p}(I)}` (`0/0` is reported as 1).
#[derive(Debug, Clone)]
pub struct Extension {
    pub signal: Signal,
    pub ratio: f64,
}

/// `exp(1 − 1/(1 − x²))` on `|x| < 1`, zero outside; equals 1 at 0.
pub fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

/// Cut-off reflection across both window ends.
///
/// Inside `[a, b]` the samples are kept; at `a − r` the value is
/// `φ · u(a + r)`, at `b + r` it is `φ · u(b − r)`, where the cut-off `φ`
/// is the bump rescaled so that it vanishes at distance `b − a` from the
/// window. Everything further out is zero.
pub fn extend_reflect(u: &Signal) -> Result<Signal> {
    let w = match u.grid().window() {
        Some(w) => *w,
        None => return structural("reflection needs a grid window"),
    };
    let n = u.n_points();
    let m = w.last - w.first;
    if w.first < m || w.last + m > n {
        return structural("window padding is smaller than the window length");
    }
    let mut out = Signal::zeros(u.grid().clone(), u.dim(), u.space());
    for j in w.first..=w.last {
        out.at_mut(j).copy_from_slice(u.at(j));
    }
    for r in 1..m {
        let phi = bump(r as f64 / m as f64);
        let left: Vec<C64> = u.at(w.first + r).iter().map(|z| z * phi).collect();
        out.at_mut(w.first - r).copy_from_slice(&left);
        let right: Vec<C64> = u.at(w.last - r).iter().map(|z| z * phi).collect();
        out.at_mut(w.last + r).copy_from_slice(&right);
    }
    Ok(out)
}

/// `[𝓔u]_{W^{α,p}(ℝ)} / [u]_{W^{α,p}(I)}` for the reflection extension.
pub fn reflect_ratio(u: &Signal, alpha: f64, p: f64) -> Result<f64> {
    let e = extend_reflect(u)?;
    let outer = gagliardo_report(&e, alpha, p, SeminormDomain::Line)?.value;
    let inner = gagliardo_report(u, alpha, p, SeminormDomain::Window)?.value;
    Ok(ratio(outer, inner))
}

fn ratio(outer: f64, inner: f64) -> f64 {
    if inner == 0.0 && outer.abs() < 1e-300 {
        1.0
    } else {
        outer / inner
    }
}

/// Extension by the boundary value on one side of the window.
///
/// The returned samples equal `u` on the window, the boundary value on the
/// chosen side and zero on the other side. The ratio compares the seminorm
/// on `I ∪ (−∞, a]` (or `I ∪ [b, ∞)`) with the one on `I`; the unbounded
/// part is integrated analytically.
pub fn extend_const(u: &Signal, side: Side, alpha: f64, p: f64) -> Result<Extension> {
    if alpha * p <= 1.0 {
        return domain(format!(
            "αp = {} ≤ 1: the signal has no continuous version to extend",
            alpha * p
        ));
    }
    let w = match u.grid().window() {
        Some(w) => *w,
        None => return structural("constant extension needs a grid window"),
    };
    let mut out = Signal::zeros(u.grid().clone(), u.dim(), u.space());
    for j in w.first..=w.last {
        out.at_mut(j).copy_from_slice(u.at(j));
    }
    let (range, anchor) = match side {
        Side::Left => (0..w.first, w.first),
        Side::Right => (w.last + 1..u.n_points(), w.last),
    };
    let value = u.at(anchor).to_vec();
    for j in range {
        out.at_mut(j).copy_from_slice(&value);
    }
    let dom = SeminormDomain::ConstTail {
        left: side == Side::Left,
        right: side == Side::Right,
    };
    let outer = gagliardo_report(u, alpha, p, dom)?.value;
    let inner = gagliardo_report(u, alpha, p, SeminormDomain::Window)?.value;
    Ok(Extension {
        signal: out,
        ratio: ratio(outer, inner),
    })
}

/// Both sides of the weighted boundary inequality
/// `(∫_I (‖f(s) − f(a)‖/(s − a)^α)^p ds)^{1/p} ≤ ((1+α−1/p)/(α−1/p)) [f]_{W^{α,p}(I)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub lhs: f64,
    pub seminorm: f64,
    pub constant: f64,
    pub rhs: f64,
}

impl HardyReport {
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.lhs <= self.rhs * (1.0 + rel_tol)
    }
}

pub fn hardy_check(u: &Signal, alpha: f64, p: f64) -> Result<HardyReport> {
    if alpha * p <= 1.0 {
        return domain("weighted boundary inequality needs αp > 1");
    }
    let w = match u.grid().window() {
        Some(w) => *w,
        None => return structural("boundary inequality needs a grid window"),
    };
    let d = u.dim();
    let vals = &u.values()[w.first * d..(w.last + 1) * d];
    let lhs = boundary_weighted_integral(vals, d, u.grid().spacing(), alpha * p, p, false)
        .max(0.0)
        .powf(1.0 / p);
    let seminorm = gagliardo_report(u, alpha, p, SeminormDomain::Window)?.value;
    let constant = (1.0 + alpha - 1.0 / p) / (alpha - 1.0 / p);
    Ok(HardyReport {
        lhs,
        seminorm,
        constant,
        rhs: constant * seminorm,
    })
}
