//! The initial value problem on `I = [t0, T]` by reduction to the line.
//!
//! After the shift `v = e^{−ω(t−t0)}u` the form is extended off `I` and the
//! initial value is lifted by `z(t) = e^{−L₀|t−t0|}u0`, which on `t < t0`
//! is the reflection of the frozen autonomous evolution. The forcing on the
//! line is `z′ + 𝒜z` before `t0`, `f` on `I` and `0` after `T`. Writing
//! `v = z + r`, the remainder solves `r′ + 𝒜r = g` with `g = 0` before `t0`.
//!
//! `g` jumps at `t0` and `T`, so `r` has derivative jumps there and a plain
//! Fourier collocation of `r` converges only to first order. The jumps are
//! computed from one-sided Taylor data and removed with a smoothly cut-off
//! lift `c` that solves the problem frozen at the jump with polynomial
//! forcing; the smooth rest `r̃ = r − c` is collocated. The value
//! `r(T)` enters the jumps at `T` and is found by fixed-point iteration.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::linear::{Collocation, Prepared};
use super::oracle::{crank_nicolson, OracleReport};
use super::{to_scale, SolutionNorms, SolveConfig, WeakSolution};
use crate::error::{domain, structural, Result};
use crate::form::{
    default_delta0, extend_form_to_line, measure_constants, LineExtension, NonAutonomousForm,
    Sampler, OMEGA_MAX,
};
use crate::gelfand::{matrix_power, GelfandTriple, SpaceTag};
use crate::spectral::quad::romberg;
use crate::spectral::{c_alpha, gagliardo_seminorm, SeminormDomain, Signal, TimeGrid};
use crate::{CMatrix, CVector, C64};

/// Initial and final values of an interval solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub u_start: Vec<C64>,
    pub u_end: Vec<C64>,
    /// `‖u(t0) − u0‖_H`.
    pub start_error: f64,
    /// `‖u0‖_{H_{2α}}`.
    pub u0_scale_norm: f64,
    /// `‖(A(t0) + ω)^{1/2} u0‖_H`, `None` when the square root failed.
    pub start_half_norm: Option<f64>,
    /// `‖(A(T) + ω)^{1/2} u(T)‖_H`.
    pub end_half_norm: Option<f64>,
    /// Shift used for the reduction.
    pub omega: f64,
    /// Whether the torus had to be doubled.
    pub enlarged: bool,
}

/// Order of the jump corrections.
const JUMP_ORDER: usize = 4;
/// Points of the one-sided difference stencils.
const STENCIL: usize = 10;
/// Energy allowed in the outer sixteenth of the torus.
const TAIL_TOL: f64 = 1e-8;
const RHO_PASSES: usize = 12;
/// Largest term `‖J_k‖ w^k/k!` of a jump polynomial relative to its
/// first-order scale; stiff modes or rough coefficients push the higher
/// Taylor terms past this and the collocation would cancel them in
/// floating point.
const JUMP_GROWTH: f64 = 1e4;

/// Weights `w[k][j]` of the `k`-th derivative at `x0` from values at `xs`.
fn fornberg(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `r^{(k)}` for `k = 0..=m` from `r′ = g − A r`.
fn taylor(gd: &[CVector], ad: &[CMatrix], r0: &CVector, m: usize) -> Vec<CVector> {
    let mut r = vec![r0.clone()];
    for k in 0..m {
        let mut next = gd[k].clone();
        for j in 0..=k {
            next -= &ad[k - j] * &r[j] * C64::new(binom(k, j), 0.0);
        }
        r.push(next);
    }
    r
}

/// Forcing coefficients `Q_k`, `k < m`, of the lift at a jump where the
/// frozen matrix is `a`: the jump of `g^{(k)} − Σ_{j≤k} C(k,j) A^{(k−j)}
/// r^{(j)}` without the part `a (r_r^{(k)} − r_l^{(k)})`, which the lift
/// carries itself. So `Q` does not grow with the stiffness of `A`.
fn lift_coeffs(
    a: &CMatrix,
    right: (&[CVector], &[CMatrix], &[CVector]),
    left: Option<(&[CVector], &[CMatrix], &[CVector])>,
    m: usize,
) -> Vec<CVector> {
    let side = |(gd, ad, r): (&[CVector], &[CMatrix], &[CVector]), k: usize| {
        let mut q = gd[k].clone();
        for j in 0..k {
            q -= &ad[k - j] * &r[j] * C64::new(binom(k, j), 0.0);
        }
        q - (&ad[0] - a) * &r[k]
    };
    (0..m)
        .map(|k| match left {
            Some(l) => side(right, k) - side(l, k),
            None => side(right, k),
        })
        .collect()
}

/// Number of leading lift coefficients worth keeping over width `w`; `g`
/// is the size of the source next to the jump and `short` the same
/// coefficients from a shorter stencil. A rough coefficient has no
/// meaningful one-sided derivatives: its difference estimates disagree
/// between stencils and grow like `h^{−k}`, and using them does more harm
/// than dropping the order.
fn usable_order(q: &[CVector], short: &[CVector], w: f64, g: f64) -> usize {
    let reference = w * q.first().map_or(0.0, |v| v.norm()).max(g);
    let mut term = 1.0;
    for (k, (v, vs)) in q.iter().zip(short).enumerate() {
        term *= w / (k + 1) as f64;
        if k == 0 {
            continue;
        }
        let size = v.norm() * term;
        if size > JUMP_GROWTH * reference {
            return k;
        }
        let disagreement = (v - vs).norm() * term;
        if disagreement > 0.5 * size && disagreement > 1e-12 * reference {
            return k;
        }
    }
    q.len()
}

/// `ψ(x)/(ψ(x) + ψ(1−x))` with `ψ(x) = e^{−1/x}`, and its derivative.
fn smoothstep(x: f64) -> (f64, f64) {
    if x <= 0.0 {
        return (0.0, 0.0);
    }
    if x >= 1.0 {
        return (1.0, 0.0);
    }
    let p = (-1.0 / x).exp();
    let q = (-1.0 / (1.0 - x)).exp();
    let dp = p / (x * x);
    let dq = -q / ((1.0 - x) * (1.0 - x));
    let s = p + q;
    (p / s, (dp * s - p * (dp + dq)) / (s * s))
}

/// Cut-off lift `χ(s/w) y(s)` on the nodes `s = qh ≥ 0` after a jump,
/// where `y′ + A_τ y = Σ_k Q_k s^k/k!`, `y(0) = 0`. Its one-sided
/// derivatives at `s = 0` match those of the Taylor polynomial with the
/// same data, while stiff modes of `A_τ` decay inside it instead of
/// producing huge polynomial coefficients.
struct Jump {
    start: usize,
    c: Vec<CVector>,
    dc: Vec<CVector>,
}

impl Jump {
    fn new(start: usize, a: &CMatrix, q: &[CVector], h: f64, width: f64, inclusive: bool) -> Self {
        let d = a.nrows();
        let m = q.len();
        if m == 0 {
            return Self {
                start,
                c: vec![],
                dc: vec![],
            };
        }
        // X = (y, s^{m−1}/(m−1)!, …, s, 1) solves X′ = M X
        let mut mat = CMatrix::zeros(d + m, d + m);
        mat.view_mut((0, 0), (d, d)).copy_from(&(-a));
        for i in 0..m {
            mat.view_mut((0, d + i), (d, 1)).copy_from(&q[m - 1 - i]);
        }
        for i in 0..m - 1 {
            mat[(d + i, d + i + 1)] = C64::new(1.0, 0.0);
        }
        let step = (&mat * C64::new(h, 0.0)).exp();
        let mut x = CVector::zeros(d + m);
        x[d + m - 1] = C64::new(1.0, 0.0);
        let (mut c, mut dc) = (vec![], vec![]);
        let mut k = 0usize;
        while (k as f64) * h < width {
            let s = k as f64 * h;
            if k == 0 && !inclusive {
                c.push(CVector::zeros(d));
                dc.push(CVector::zeros(d));
            } else {
                let (st, dst) = smoothstep(s / width);
                let (chi, dchi) = (1.0 - st, -dst / width);
                let dx = &mat * &x;
                let y = x.rows(0, d).into_owned();
                let dy = dx.rows(0, d).into_owned();
                dc.push(&dy * C64::new(chi, 0.0) + &y * C64::new(dchi, 0.0));
                c.push(y * C64::new(chi, 0.0));
            }
            x = &step * x;
            k += 1;
        }
        Self { start, c, dc }
    }

    fn at(&self, j: usize) -> Option<(&CVector, &CVector)> {
        let k = j.checked_sub(self.start)?;
        Some((self.c.get(k)?, &self.dc[k]))
    }
}

fn pointwise_sq(u: &[C64], d: usize, j: usize) -> f64 {
    u[j * d..(j + 1) * d].iter().map(|z| z.norm_sqr()).sum()
}

fn block(u: &[C64], d: usize, j: usize) -> CVector {
    CVector::from_column_slice(&u[j * d..(j + 1) * d])
}

fn put(u: &mut [C64], d: usize, j: usize, v: &CVector) {
    u[j * d..(j + 1) * d].copy_from_slice(v.as_slice());
}

/// Shifted problem data sampled on one torus.
struct Reduced<'a> {
    grid: TimeGrid,
    /// Window node indices.
    i0: usize,
    it: usize,
    d: usize,
    /// `A_ext` at every node (the interval matrix on the window).
    amat: Arc<Vec<CMatrix>>,
    l0: &'a CMatrix,
    u0: &'a CVector,
    /// Shifted forcing at the window nodes.
    f_win: &'a [CVector],
}

struct Reduction {
    /// `v = z + c + r̃` and `v′` at every node.
    v: Vec<C64>,
    dv: Vec<C64>,
    stats: super::SolveStats,
    rho_converged: bool,
    tail: f64,
}

fn reduce(p: &Reduced, cfg: &SolveConfig) -> Result<Reduction> {
    let (grid, i0, it, d) = (&p.grid, p.i0, p.it, p.d);
    let n = grid.n_points();
    let h = grid.spacing();
    let times = grid.times();
    let t0 = times[i0];
    let t1 = times[it];
    let half = 0.5 * grid.period();

    // lift z and its derivative (right derivative at t0)
    let e = (p.l0 * C64::new(-h, 0.0)).exp();
    let mut z = vec![CVector::zeros(d); n];
    z[i0] = p.u0.clone();
    for j in i0 + 1..n {
        z[j] = &e * &z[j - 1];
    }
    for j in (0..i0).rev() {
        z[j] = &e * &z[j + 1];
    }
    let dz: Vec<CVector> = (0..n)
        .map(|j| {
            let s = if j >= i0 { -1.0 } else { 1.0 };
            p.l0 * &z[j] * C64::new(s, 0.0)
        })
        .collect();

    // residual source, in-window values at both window ends
    let g: Vec<CVector> = (0..n)
        .map(|j| {
            if j < i0 {
                CVector::zeros(d)
            } else if j <= it {
                &p.f_win[j - i0] + p.l0 * &z[j] - &p.amat[j] * &z[j]
            } else {
                p.l0 * &z[j] - &p.amat[j] * &z[j]
            }
        })
        .collect();

    let samples = it - i0 + 1;
    let npts = STENCIL.min(samples).min(n - 1 - it);
    let m = JUMP_ORDER.min(npts.saturating_sub(1));
    let deriv = |nodes: &[usize], pos: &[f64]| -> (Vec<CVector>, Vec<CMatrix>) {
        let w = fornberg(0.0, pos, m.max(1));
        let gd = (0..m)
            .map(|k| {
                let mut acc = CVector::zeros(d);
                for (q, &j) in nodes.iter().enumerate() {
                    acc += &g[j] * C64::new(w[k][q], 0.0);
                }
                acc / C64::new(h.powi(k as i32), 0.0)
            })
            .collect();
        let ad = (0..m)
            .map(|k| {
                let mut acc = CMatrix::zeros(d, d);
                for (q, &j) in nodes.iter().enumerate() {
                    acc += &p.amat[j] * C64::new(w[k][q], 0.0);
                }
                acc / C64::new(h.powi(k as i32), 0.0)
            })
            .collect();
        (gd, ad)
    };
    let right0: Vec<usize> = (i0..i0 + npts).collect();
    let pos_right0: Vec<f64> = (0..npts).map(|q| q as f64).collect();
    let left_t: Vec<usize> = (0..npts).map(|q| it - q).collect();
    let pos_left_t: Vec<f64> = (0..npts).map(|q| -(q as f64)).collect();
    let right_t: Vec<usize> = (1..=npts).map(|q| it + q).collect();
    let pos_right_t: Vec<f64> = (1..=npts).map(|q| q as f64).collect();

    // the same estimates from a shorter stencil, to judge their reliability
    let ns = npts.saturating_sub(3).max(m + 1).min(npts);

    let zero = CVector::zeros(d);
    let (g0, a0) = deriv(&right0, &pos_right0);
    let (g0s, a0s) = deriv(&right0[..ns], &pos_right0[..ns]);
    let q0 = lift_coeffs(&p.amat[i0], (&g0, &a0, &taylor(&g0, &a0, &zero, m)), None, m);
    let q0s = lift_coeffs(&p.amat[i0], (&g0s, &a0s, &taylor(&g0s, &a0s, &zero, m)), None, m);
    // both lifts run out at the end of the torus, as wide as possible so
    // their cut-offs stay resolved on coarse grids
    let w0 = half - t0;
    let mut q0 = q0;
    q0.truncate(usable_order(&q0, &q0s, w0, g0.first().map_or(0.0, |v| v.norm())));
    let jump0 = Jump::new(i0, &p.amat[i0], &q0, h, w0, true);
    let (gl, al) = deriv(&left_t, &pos_left_t);
    let (gr, ar) = deriv(&right_t, &pos_right_t);
    let (gls, als) = deriv(&left_t[..ns], &pos_left_t[..ns]);
    let (grs, ars) = deriv(&right_t[..ns], &pos_right_t[..ns]);
    let wt = half - t1;
    let g_t = gl.first().map_or(0.0, |v| v.norm()).max(gr.first().map_or(0.0, |v| v.norm()));
    // only lowered between passes, so the end-point iteration can settle
    let mut order_t = usize::MAX;

    let col_sampler = {
        let amat = p.amat.clone();
        let n = grid.n_points();
        let period = grid.period();
        Sampler::custom(d, d, move |t| {
            let j = ((t + 0.5 * period) / (period / n as f64)).round() as usize;
            amat[j.min(n - 1)].clone()
        })
    };

    let col = Collocation::new(&col_sampler, grid);
    let prep = Prepared::new(&col, &cfg.linear_solver)?;

    let mut rho = CVector::zeros(d);
    let mut converged = false;
    let mut last = None;
    let scale = p.u0.norm().max(p.f_win.iter().map(|v| v.norm()).fold(0.0, f64::max)).max(1e-300);
    for _ in 0..RHO_PASSES {
        let rl = taylor(&gl, &al, &rho, m);
        let rr = taylor(&gr, &ar, &rho, m);
        let mut qt = lift_coeffs(&p.amat[it], (&gr, &ar, &rr), Some((&gl, &al, &rl)), m);
        let rls = taylor(&gls, &als, &rho, m);
        let rrs = taylor(&grs, &ars, &rho, m);
        let qts = lift_coeffs(&p.amat[it], (&grs, &ars, &rrs), Some((&gls, &als, &rls)), m);
        order_t = order_t.min(usable_order(&qt, &qts, wt, g_t));
        qt.truncate(order_t);
        let jump_t = Jump::new(it, &p.amat[it], &qt, h, wt, false);
        let mut c = vec![C64::new(0.0, 0.0); n * d];
        let mut dc = vec![C64::new(0.0, 0.0); n * d];
        let mut gt = vec![C64::new(0.0, 0.0); n * d];
        for j in 0..n {
            let mut cj = CVector::zeros(d);
            let mut dcj = CVector::zeros(d);
            for jump in [&jump0, &jump_t] {
                if let Some((v, dv)) = jump.at(j) {
                    cj += v;
                    dcj += dv;
                }
            }
            let rhs = &g[j] - &dcj - &p.amat[j] * &cj;
            put(&mut c, d, j, &cj);
            put(&mut dc, d, j, &dcj);
            put(&mut gt, d, j, &rhs);
        }
        let (rt, stats) = prep.solve(&gt)?;
        let du_rt = col.derivative(&rt);
        let r_end = block(&rt, d, it) + block(&c, d, it);
        let change = (&r_end - &rho).norm();
        rho = r_end;
        let mut v = vec![C64::new(0.0, 0.0); n * d];
        let mut dv = vec![C64::new(0.0, 0.0); n * d];
        for j in 0..n {
            let vj = &z[j] + block(&c, d, j) + block(&rt, d, j);
            let dvj = &dz[j] + block(&dc, d, j) + block(&du_rt, d, j);
            put(&mut v, d, j, &vj);
            put(&mut dv, d, j, &dvj);
        }
        last = Some((v, dv, stats));
        if change <= 1e-14 * scale {
            converged = true;
            break;
        }
    }
    let (v, dv, stats) = last.expect("at least one pass");
    let total: f64 = (0..n).map(|j| pointwise_sq(&v, d, j)).sum();
    let edge = n / 32;
    let tail = if total > 0.0 {
        (0..n)
            .filter(|&j| j < edge || j >= n - edge)
            .map(|j| pointwise_sq(&v, d, j))
            .sum::<f64>()
            / total
    } else {
        0.0
    };
    Ok(Reduction {
        v,
        dv,
        stats,
        rho_converged: converged,
        tail,
    })
}

/// `∫_I ‖u‖²` in `H_γ` coordinates by Romberg integration on the window.
fn interval_l2(u: &Signal, gamma: f64, triple: &GelfandTriple) -> Result<f64> {
    let w = *u.grid().window().expect("window checked");
    let s = to_scale(u, gamma, triple)?;
    let y: Vec<f64> = (w.first..=w.last)
        .map(|j| s.at(j).iter().map(|z| z.norm_sqr()).sum())
        .collect();
    Ok(romberg(&y, u.grid().spacing()).max(0.0).sqrt())
}

/// `‖∂^s u‖_{L²(I;H_γ)}` read as the Gagliardo seminorm over `I × I`
/// divided by `√C_s`; `s = 0` and `s = 1` are the plain norms.
fn interval_frac(u: &Signal, du: &Signal, s: f64, gamma: f64, triple: &GelfandTriple) -> Result<f64> {
    if s == 0.0 {
        return interval_l2(u, gamma, triple);
    }
    if s == 1.0 {
        return interval_l2(du, gamma, triple);
    }
    let w = to_scale(u, gamma, triple)?;
    Ok(gagliardo_seminorm(&w, s, 2.0, SeminormDomain::Window)? / c_alpha(s)?.sqrt())
}

fn interval_norms(u: &Signal, du: &Signal, au: &Signal, alpha: f64, t: &GelfandTriple) -> Result<SolutionNorms> {
    let target = 2.0 * alpha - 1.0;
    Ok(SolutionNorms {
        alpha,
        l2_v: interval_l2(u, 1.0, t)?,
        l2_h: interval_l2(u, 0.0, t)?,
        half_h: interval_frac(u, du, 0.5, 0.0, t)?,
        alpha_v: interval_frac(u, du, alpha, 1.0, t)?,
        half_alpha_h: interval_frac(u, du, 0.5 + alpha, 0.0, t)?,
        half_v: interval_frac(u, du, 0.5, 1.0, t)?,
        du: interval_l2(du, target, t)?,
        au: interval_l2(au, target, t)?,
    })
}

/// Cubic Lagrange interpolation of window samples at `t`.
fn interp_cubic(samples: &[CVector], t0: f64, h: f64, t: f64) -> CVector {
    let m = samples.len();
    if m == 1 {
        return samples[0].clone();
    }
    let x = (t - t0) / h;
    let k = m.min(4);
    let start = ((x.floor() as isize) - 1).clamp(0, (m - k) as isize) as usize;
    let mut out = CVector::zeros(samples[0].len());
    for a in 0..k {
        let xa = (start + a) as f64;
        let mut w = 1.0;
        for b in 0..k {
            if b != a {
                let xb = (start + b) as f64;
                w *= (x - xb) / (xa - xb);
            }
        }
        out += &samples[start + a] * C64::new(w, 0.0);
    }
    out
}

fn half_norm(a: &CMatrix, v: &CVector) -> Option<f64> {
    matrix_power(a, 0.5).ok().map(|p| (&p.matrix * v).norm()).filter(|x| x.is_finite())
}

/// Solves `u′ + 𝒜u = f` on the form's interval with `u(t0) = u0`.
///
/// The grid's window must be the form's interval. Samples of `rhs` outside
/// the window are ignored; the returned signals vanish there.
pub fn solve_ivp(f: &NonAutonomousForm, rhs: &Signal, u0: &[C64], cfg: &SolveConfig) -> Result<WeakSolution> {
    cfg.validate()?;
    let (a, b) = match f.interval() {
        Some(i) => i,
        None => return structural("solve_ivp needs a form on an interval"),
    };
    let grid = &cfg.grid;
    let win = match grid.window() {
        Some(w) => *w,
        None => return structural("the grid has no window for the interval"),
    };
    let tol = 1e-9 * grid.spacing();
    if (win.start - a).abs() > tol || (win.end - b).abs() > tol {
        return structural(format!(
            "grid window [{}, {}] differs from the interval [{a}, {b}]",
            win.start, win.end
        ));
    }
    if !rhs.grid().same_as(grid) {
        return structural("right-hand side is not sampled on the configured grid");
    }
    let d = f.dim();
    if rhs.dim() != d || u0.len() != d || cfg.spatial_dim != d {
        return structural("dimensions of form, data and configuration differ");
    }
    if win.n_samples() < 3 {
        return structural("the window needs at least three grid points");
    }
    let triple = f.triple();
    let u0v = CVector::from_column_slice(u0);
    let alpha = cfg.alpha;
    let u0_scale_norm = triple.h_gamma_norm(u0, 2.0 * alpha)?;
    if !u0_scale_norm.is_finite() || u0.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return domain("initial value has no finite norm");
    }
    if rhs.values().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(crate::MregError::Data("right-hand side has non-finite samples".into()));
    }

    // shift: the larger of what the whole form and its principal part need
    let whole = f.with_samplers(f.sampler().clone(), None).on_interval(a, b)?;
    let cw = measure_constants(&whole, grid, OMEGA_MAX)?;
    let omega = match f.split() {
        Some(_) => cw.omega.max(measure_constants(f, grid, OMEGA_MAX)?.omega),
        None => cw.omega,
    };
    let fs = f.shifted(omega);
    let constants = measure_constants(&whole.shifted(omega), grid, 0.0)?;

    let mode = if alpha == 0.0 {
        LineExtension::Average
    } else {
        LineExtension::Constant {
            s: alpha + default_delta0(alpha),
            p: 1.0 / alpha,
        }
    };
    let fe = extend_form_to_line(&fs, mode, grid)?;
    let l0 = match fs.split() {
        Some(s) if s.beta == 0.0 && alpha > 0.0 => s.a1.matrix(a),
        _ => fs.matrix(a),
    };
    let f_win: Vec<CVector> = (win.first..=win.last)
        .map(|j| {
            let s = grid.time(j) - a;
            CVector::from_column_slice(rhs.at(j)) * C64::new((-omega * s).exp(), 0.0)
        })
        .collect();

    let sample = |g: &TimeGrid, i0: usize, it: usize| -> Vec<CMatrix> {
        (0..g.n_points())
            .map(|j| {
                let t = g.time(j);
                if j >= i0 && j <= it {
                    fs.matrix(t)
                } else {
                    fe.matrix(t)
                }
            })
            .collect()
    };

    let mut warnings = Vec::new();
    let mut enlarged = false;
    let mut work_grid = grid.clone();
    let (mut i0, mut it) = (win.first, win.last);
    let mut red = reduce(
        &Reduced {
            grid: work_grid.clone(),
            i0,
            it,
            d,
            amat: Arc::new(sample(&work_grid, i0, it)),
            l0: &l0,
            u0: &u0v,
            f_win: &f_win,
        },
        cfg,
    )?;
    if red.tail > TAIL_TOL {
        let n2 = 2 * grid.n_points();
        work_grid = TimeGrid::new(n2, 2.0 * grid.period())?.with_window(a, b)?;
        let shift = grid.n_points() / 2;
        i0 = win.first + shift;
        it = win.last + shift;
        let big_cfg = SolveConfig {
            grid: work_grid.clone(),
            linear_solver: super::LinearSolver::auto(n2 * d),
            ..cfg.clone()
        };
        red = reduce(
            &Reduced {
                grid: work_grid.clone(),
                i0,
                it,
                d,
                amat: Arc::new(sample(&work_grid, i0, it)),
                l0: &l0,
                u0: &u0v,
                f_win: &f_win,
            },
            &big_cfg,
        )?;
        enlarged = true;
        if red.tail > TAIL_TOL {
            warnings.push(format!(
                "solution still carries {:.1e} of its energy near the torus ends after doubling",
                red.tail
            ));
        }
    }
    if !red.rho_converged {
        warnings.push("end-point value iteration did not settle to 1e-14".into());
    }

    // restrict to I and undo the shift
    let n = grid.n_points();
    let mut u = vec![C64::new(0.0, 0.0); n * d];
    let mut du = vec![C64::new(0.0, 0.0); n * d];
    let mut au = vec![C64::new(0.0, 0.0); n * d];
    for (q, j) in (win.first..=win.last).enumerate() {
        let k = i0 + q;
        let t = grid.time(j);
        let e = C64::new((omega * (t - a)).exp(), 0.0);
        let vj = block(&red.v, d, k);
        let dvj = block(&red.dv, d, k);
        let uj = &vj * e;
        let duj = (dvj + &vj * C64::new(omega, 0.0)) * e;
        let auj = f.matrix(t) * &uj;
        put(&mut u, d, j, &uj);
        put(&mut du, d, j, &duj);
        put(&mut au, d, j, &auj);
    }
    let tag = SpaceTag { gamma: 2.0 * alpha - 1.0 };
    let u = Signal::new(grid.clone(), d, u, SpaceTag::V)?;
    let du = Signal::new(grid.clone(), d, du, tag)?;
    let au = Signal::new(grid.clone(), d, au, tag)?;
    let norms = interval_norms(&u, &du, &au, alpha, triple)?;

    let resid = {
        let r = du.add(&au)?.sub(rhs)?;
        let mut r = r;
        for j in (0..n).filter(|&j| !win.contains_index(j)) {
            r.at_mut(j).iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        }
        let mut fw = rhs.clone();
        for j in (0..n).filter(|&j| !win.contains_index(j)) {
            fw.at_mut(j).iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        }
        let rn = interval_l2(&r, 2.0 * alpha - 1.0, triple)?;
        let fnorm = interval_l2(&fw, 2.0 * alpha - 1.0, triple)?;
        if fnorm > 0.0 {
            rn / fnorm
        } else {
            rn
        }
    };

    let u_start = u.at(win.first).to_vec();
    let u_end = u.at(win.last).to_vec();
    let shift_eye = CMatrix::identity(d, d) * C64::new(omega, 0.0);
    let trace = TraceReport {
        start_error: (CVector::from_column_slice(&u_start) - &u0v).norm(),
        u0_scale_norm,
        start_half_norm: half_norm(&(f.matrix(a) + &shift_eye), &u0v),
        end_half_norm: half_norm(&(f.matrix(b) + &shift_eye), &CVector::from_column_slice(&u_end)),
        u_start,
        u_end,
        omega,
        enlarged,
    };

    let oracle = if cfg.oracle.enabled {
        let steps = (win.last - win.first) * cfg.oracle.oversample;
        let h = grid.spacing();
        let samples: Vec<CVector> = (win.first..=win.last)
            .map(|j| CVector::from_column_slice(rhs.at(j)))
            .collect();
        let us = crank_nicolson(f.sampler(), |t| interp_cubic(&samples, a, h, t), &u0v, a, b, steps);
        let mut max_diff: f64 = 0.0;
        let mut peak: f64 = 0.0;
        for (q, j) in (win.first..=win.last).enumerate() {
            let uj = CVector::from_column_slice(u.at(j));
            max_diff = max_diff.max((&uj - &us[q * cfg.oracle.oversample]).norm());
            peak = peak.max(uj.norm());
        }
        Some(OracleReport {
            steps,
            max_diff,
            relative: if peak > 0.0 { max_diff / peak } else { max_diff },
        })
    } else {
        None
    };

    Ok(WeakSolution {
        u,
        du,
        au,
        norms,
        residual: resid,
        stats: red.stats,
        constants,
        delta: constants.eta / (constants.bound_m + 1.0),
        regular: None,
        trace: Some(trace),
        oracle,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fornberg_matches_known_stencils() {
        let w = fornberg(0.0, &[-1.0, 0.0, 1.0], 2);
        assert!((w[1][0] + 0.5).abs() < 1e-14 && (w[1][2] - 0.5).abs() < 1e-14);
        assert!((w[2][0] - 1.0).abs() < 1e-14 && (w[2][1] + 2.0).abs() < 1e-14);
        // extrapolated one-sided value at 0 from 1, 2
        let w = fornberg(0.0, &[1.0, 2.0], 0);
        assert!((w[0][0] - 2.0).abs() < 1e-14 && (w[0][1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn smoothstep_is_a_smooth_switch() {
        assert_eq!(smoothstep(0.0), (0.0, 0.0));
        assert_eq!(smoothstep(1.0), (1.0, 0.0));
        let (s, _) = smoothstep(0.5);
        assert!((s - 0.5).abs() < 1e-15);
        let x = 0.3;
        let e = 1e-6;
        let num = (smoothstep(x + e).0 - smoothstep(x - e).0) / (2.0 * e);
        assert!((num - smoothstep(x).1).abs() < 1e-6);
    }
}
