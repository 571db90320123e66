//! Randomized property checks shared by `mreg verify` and the acceptance
//! tests.
//!
//! Each check reports one `measured` number that passes when it is at most
//! the tolerance: a relative error, or a relative violation (negative when
//! an inequality holds with room to spare).

use std::f64::consts::PI;

use mreg_core::form::{
    commutator_check_with, commutator_constant, default_delta0, measure_constants, NonAutonomousForm, Sampler,
    TimeProfile,
};
use mreg_core::gelfand::{kato_power_matrix, random_coercive_form, GelfandTriple, SpaceTag, KATO_ENVELOPE};
use mreg_core::problems::SpaceProfile;
use mreg_core::solver::*;
use mreg_core::spectral::quad::romberg;
use mreg_core::spectral::*;
use mreg_core::{CMatrix, CVector, C64};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    CoefficientSpec, ForcingSpec, ForcingTerm, GridSpec, InitialSpec, ProblemSpec, RoughCoefficient, Scale,
    SolveSpec, VerifyConfig,
};
use crate::pipeline::solve_point;

/// One row of the verification table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub anchor: String,
    pub measured: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub note: String,
}

/// Measured value written when a check could not run at all.
pub const FAILED_TO_RUN: f64 = f64::MAX;

struct CheckId {
    id: &'static str,
    anchor: &'static str,
    tolerance: f64,
}

type Outcome = mreg_core::Result<Vec<(f64, String)>>;

struct Group {
    ids: &'static [CheckId],
    run: fn(&mut ChaCha8Rng, Scale) -> Outcome,
}

const fn id(id: &'static str, anchor: &'static str, tolerance: f64) -> CheckId {
    CheckId { id, anchor, tolerance }
}

const GROUPS: &[Group] = &[
    Group {
        ids: &[id("isometry", "fractional-isometry", 1e-4)],
        run: isometry,
    },
    Group {
        ids: &[id("c_half", "isometry-constant", 1e-8)],
        run: c_half,
    },
    Group {
        ids: &[id("weak_coercivity", "stabilized-form-coercivity", 1e-9)],
        run: weak_coercivity,
    },
    Group {
        ids: &[
            id("manufactured", "weak-solution-uniqueness", 1e-8),
            id("oracle_agreement", "time-stepping-cross-check", 1e-5),
        ],
        run: manufactured,
    },
    Group {
        ids: &[id("causality", "causal-evolution", 1e-6)],
        run: causality,
    },
    Group {
        ids: &[id("interpolation", "interpolation-inequality", 1e-9)],
        run: interpolation,
    },
    Group {
        ids: &[id("kato_envelope", "kato-fractional-powers", 0.0)],
        run: kato,
    },
    Group {
        ids: &[id("hardy", "weighted-boundary-inequality", 1e-9)],
        run: hardy,
    },
    Group {
        ids: &[id("commutator", "commutator-estimate", 1e-12)],
        run: commutator,
    },
    Group {
        ids: &[
            id("ivp_decay", "initial-value-eigenvector-decay", 1e-6),
            id("ivp_energy", "initial-value-energy-identity", 1e-6),
            id("ivp_trace", "initial-value-trace", 1e-8),
        ],
        run: ivp,
    },
    Group {
        ids: &[id("mr_stability", "regularity-threshold-stability", 0.2)],
        run: mr_stability,
    },
];

/// All check ids in table order.
pub fn check_ids() -> Vec<&'static str> {
    GROUPS.iter().flat_map(|g| g.ids.iter().map(|c| c.id)).collect()
}

fn group_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Runs the selected checks. Groups run in parallel; each has its own
/// random stream, so results do not depend on scheduling.
pub fn run_checks(cfg: &VerifyConfig, seed: u64) -> Vec<CheckResult> {
    let wanted = |id: &str| cfg.checks.as_ref().map_or(true, |c| c.iter().any(|x| x == id));
    let rows: Vec<Vec<CheckResult>> = GROUPS
        .par_iter()
        .enumerate()
        .map(|(k, g)| {
            if !g.ids.iter().any(|c| wanted(c.id)) {
                return vec![];
            }
            let mut rng = ChaCha8Rng::seed_from_u64(group_seed(seed, k));
            let out = (g.run)(&mut rng, cfg.scale);
            g.ids
                .iter()
                .enumerate()
                .filter(|(_, c)| wanted(c.id))
                .map(|(i, c)| {
                    let tolerance = cfg.tolerances.get(c.id).copied().unwrap_or(c.tolerance);
                    let (measured, note) = match &out {
                        Ok(v) => v[i].clone(),
                        Err(e) => (FAILED_TO_RUN, format!("did not run: {e}")),
                    };
                    CheckResult {
                        id: c.id.into(),
                        anchor: c.anchor.into(),
                        measured,
                        tolerance,
                        pass: measured <= tolerance,
                        note,
                    }
                })
                .collect()
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// Unknown ids in a check selection or tolerance table.
pub fn unknown_ids(cfg: &VerifyConfig) -> Vec<String> {
    let known = check_ids();
    cfg.checks
        .iter()
        .flatten()
        .chain(cfg.tolerances.keys())
        .filter(|id| !known.contains(&id.as_str()))
        .cloned()
        .collect()
}

fn count(scale: Scale, full: usize, quick: usize) -> usize {
    match scale {
        Scale::Full => full,
        Scale::Quick => quick,
    }
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

// ---------------------------------------------------------------- generators

/// Gaussian wave packets `a e^{−(t−c)²/2w²} e^{i(ωt+φ)}` with an exact
/// derivative.
pub struct Packets {
    dim: usize,
    terms: Vec<(usize, f64, f64, f64, f64, f64)>,
}

impl Packets {
    pub fn random<R: Rng>(rng: &mut R, dim: usize, max_freq: f64) -> Self {
        let terms = (0..4 * dim)
            .map(|i| {
                (
                    i % dim,
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-4.0..4.0),
                    rng.gen_range(0.8..2.0),
                    rng.gen_range(0.0..max_freq),
                    rng.gen_range(0.0..2.0 * PI),
                )
            })
            .collect();
        Self { dim, terms }
    }

    fn eval(&self, t: f64, derivative: bool) -> Vec<C64> {
        let mut out = vec![c(0.0); self.dim];
        for &(i, a, ctr, w, om, ph) in &self.terms {
            let env = (-(t - ctr).powi(2) / (2.0 * w * w)).exp();
            let z = C64::from_polar(a * env, om * t + ph);
            out[i] += if derivative {
                z * C64::new(-(t - ctr) / (w * w), om)
            } else {
                z
            };
        }
        out
    }

    pub fn value(&self, t: f64) -> Vec<C64> {
        self.eval(t, false)
    }

    pub fn derivative(&self, t: f64) -> Vec<C64> {
        self.eval(t, true)
    }

    pub fn sample(&self, grid: &TimeGrid, space: SpaceTag) -> Signal {
        Signal::from_fn(grid.clone(), self.dim, space, |t, out| out.copy_from_slice(&self.value(t)))
            .expect("packets are finite")
    }
}

/// SPD matrix with eigenvalues drawn from `[lo, hi]`.
fn spd<R: Rng>(rng: &mut R, d: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let q = g.qr().q();
    let ev = DMatrix::from_diagonal(&DVector::from_fn(d, |_, _| rng.gen_range(lo..hi)));
    let m = &q * ev * q.transpose();
    (&m + m.transpose()) * 0.5
}

fn sqrt_spd(b: &DMatrix<f64>) -> CMatrix {
    let e = SymmetricEigen::new(b.clone());
    let r = &e.eigenvectors * DMatrix::from_diagonal(&e.eigenvalues.map(f64::sqrt)) * e.eigenvectors.transpose();
    r.map(c)
}

fn rand_cmatrix<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// `A(t) = 𝓑^{1/2}(2 + ½ sin(ωt + φ) K)𝓑^{1/2}` with `‖K‖ ≤ 1`.
fn smooth_family<R: Rng>(rng: &mut R, d: usize) -> NonAutonomousForm {
    let b = spd(rng, d, 1.0, 5.0);
    let t = GelfandTriple::new(b.clone()).expect("SPD");
    let s = sqrt_spd(&b);
    let k = rand_cmatrix(rng, d);
    let k = &k / c(k.norm().max(1e-12));
    let (om, ph) = (rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI));
    let sampler = Sampler::custom(d, d, move |tt| {
        let inner = CMatrix::identity(d, d) * c(2.0) + &k * c(0.5 * (om * tt + ph).sin());
        &s * inner * &s
    });
    NonAutonomousForm::new(t, sampler).expect("shapes agree")
}

/// Whitened `A(t) = U(t) diag(λ) U(t)* + i γ(t) K` with `λ ∈ [1, ratio]`,
/// a rotating eigenbasis and a skew part, so `η = 1` and `M ≈ ratio`.
fn ratio_family<R: Rng>(rng: &mut R, d: usize, ratio: f64) -> NonAutonomousForm {
    let b = spd(rng, d, 1.0, 5.0);
    let t = GelfandTriple::new(b.clone()).expect("SPD");
    let s = sqrt_spd(&b);
    let mut lambda: Vec<f64> = (0..d).map(|_| rng.gen_range(1.0..ratio.max(1.0 + 1e-9))).collect();
    lambda[0] = 1.0;
    lambda[d - 1] = ratio;
    let q0 = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0)).qr().q().map(c);
    let k = rand_cmatrix(rng, d);
    let k = (&k + k.adjoint()) * c(0.5);
    let k = &k / c(k.norm().max(1e-12));
    let (om, ph) = (rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI));
    let diag = CMatrix::from_diagonal(&DVector::from_iterator(d, lambda.iter().map(|&l| c(l))));
    let sampler = Sampler::custom(d, d, move |tt| {
        let mut r = CMatrix::identity(d, d);
        let (sn, cs) = (om * tt).sin_cos();
        r[(0, 0)] = c(cs);
        r[(1, 1)] = c(cs);
        r[(0, 1)] = c(-sn);
        r[(1, 0)] = c(sn);
        let u = &q0 * r;
        let w = &u * &diag * u.adjoint() + &k * C64::new(0.0, 0.2 * ratio * (om * tt + ph).sin());
        &s * w * &s
    });
    NonAutonomousForm::new(t, sampler).expect("shapes agree")
}

/// Smooth `0 → 1` switch on `[0, 1]`, flat to all orders at both ends.
fn ramp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let p = (-1.0 / t).exp();
        let q = (-1.0 / (1.0 - t)).exp();
        p / (p + q)
    }
}

// ---------------------------------------------------------------- checks

fn isometry(rng: &mut ChaCha8Rng, scale: Scale) -> Outcome {
    let grid = TimeGrid::new(4096, 40.0)?;
    let per_alpha = count(scale, 50, 4);
    let mut worst: f64 = 0.0;
    let mut signals = Vec::with_capacity(per_alpha);
    while signals.len() < per_alpha {
        let u = Packets::random(rng, 1, 3.0).sample(&grid, SpaceTag::H);
        // padding criterion: negligible energy near the torus ends
        if u.boundary_energy_fraction(0.2) < 1e-8 {
            signals.push(u);
        }
    }
    for alpha in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let ca = c_alpha(alpha)?;
        let errs = signals
            .par_iter()
            .map(|u| -> mreg_core::Result<f64> {
                let lhs = ca * frac_seminorm(u, alpha).powi(2);
                let rhs = gagliardo_seminorm(u, alpha, 2.0, SeminormDomain::Torus)?.powi(2);
                Ok(rel(rhs, lhs))
            })
            .collect::<mreg_core::Result<Vec<f64>>>()?;
        worst = errs.into_iter().fold(worst, f64::max);
    }
    Ok(vec![(worst, format!("{per_alpha} signals per α, n = 4096"))])
}

fn c_half(_: &mut ChaCha8Rng, _: Scale) -> Outcome {
    let v = c_alpha(0.5)?;
    Ok(vec![((v - 2.0 * PI).abs(), format!("C_1/2 = {v:.15}"))])
}

fn weak_coercivity(rng: &mut ChaCha8Rng, scale: Scale) -> Outcome {
    let families = count(scale, 10, 3);
    let per_family = count(scale, 1000, 100);
    let grid = TimeGrid::new(64, 10.0)?;
    let mut worst = f64::NEG_INFINITY;
    let (mut rmin, mut rmax) = (f64::INFINITY, 0.0f64);
    for _ in 0..families {
        let d = rng.gen_range(2..=3);
        let ratio = rng.gen_range(1.0..40.0);
        let f = ratio_family(rng, d, ratio);
        let k = measure_constants(&f, &grid, 0.0)?;
        rmin = rmin.min(k.bound_m / k.eta);
        rmax = rmax.max(k.bound_m / k.eta);
        let delta = k.eta / (k.bound_m + 1.0);
        let e = StabilizedForm::weak(&f, &grid, delta)?;
        for _ in 0..per_family {
            let vals = (0..64 * d)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let v = Signal::new(grid.clone(), d, vals, SpaceTag::V)?;
            let re = e.value(&v, &v)?.re;
            let n2 = e.norm_sq(&v)?;
            worst = worst.max((delta * n2 - re) / n2);
        }
    }
    Ok(vec![(
        worst,
        format!("{families} families, M/η in [{rmin:.2}, {rmax:.2}], {per_family} vectors each"),
    )])
}

fn manufactured(rng: &mut ChaCha8Rng, scale: Scale) -> Outcome {
    let instances = count(scale, 5, 2);
    let n = 1024;
    let grid = TimeGrid::new(n, 40.0)?;
    let (mut err_max, mut cn_max) = (0.0f64, 0.0f64);
    for _ in 0..instances {
        let f = smooth_family(rng, 2);
        let ustar = Packets::random(rng, 2, 3.0);
        let forcing = |t: f64| -> CVector {
            let u = CVector::from_vec(ustar.value(t));
            CVector::from_vec(ustar.derivative(t)) + f.matrix(t) * u
        };
        let rhs = Signal::from_fn(grid.clone(), 2, SpaceTag::VDUAL, |t, out| {
            out.copy_from_slice(forcing(t).as_slice())
        })?;
        let cfg = SolveConfig::new(grid.clone(), 2);
        let sol = solve_line_weak(&f, &rhs, &cfg)?;
        let us = ustar.sample(&grid, SpaceTag::V);
        let err = spacetime_norm(&sol.u.sub(&us)?, 0.0, 1.0, f.triple())?;
        let size = spacetime_norm(&us, 0.0, 1.0, f.triple())?;
        err_max = err_max.max(err / size);

        // Crank–Nicolson across the torus from the (negligible) left end
        let over = 64;
        let (t0, t1) = (grid.time(0), grid.time(n - 1));
        let u0 = CVector::from_column_slice(sol.u.at(0));
        let steps = (n - 1) * over;
        let cn = crank_nicolson(f.sampler(), forcing, &u0, t0, t1, steps);
        let mut diff: f64 = 0.0;
        for j in 0..n {
            let z = &cn[j * over] - CVector::from_column_slice(sol.u.at(j));
            diff = diff.max(z.norm());
        }
        cn_max = cn_max.max(diff / sol.u.max_norm());
    }
    Ok(vec![
        (err_max, format!("{instances} smooth 2×2 families, n = {n}, relative L²(V) error")),
        (cn_max, format!("Crank–Nicolson with {} steps per grid step, relative max difference", 64)),
    ])
}

fn causality(rng: &mut ChaCha8Rng, scale: Scale) -> Outcome {
    let instances = count(scale, 20, 4);
    let grid = TimeGrid::new(2048, 40.0)?;
    let mut worst: f64 = 0.0;
    let mut buffer: f64 = 0.0;
    for _ in 0..instances {
        let f = smooth_family(rng, 2);
        let (w, ph) = (rng.gen_range(0.5..2.0), rng.gen_range(0.0..2.0 * PI));
        let center = rng.gen_range(2.0..5.0);
        let rhs = Signal::from_fn(grid.clone(), 2, SpaceTag::VDUAL, |t, out| {
            let env = ramp(t) * (-(t - center).powi(2) / 8.0).exp();
            out[0] = c(env * (w * t + ph).cos());
            out[1] = c(0.5 * env);
        })?;
        let sol = solve_line_weak(&f, &rhs, &SolveConfig::new(grid.clone(), 2))?;
        let rep = causality_check(&f, &rhs, &sol, 0.0, 1e-6)?;
        worst = worst.max(rep.ratio);
        buffer = buffer.max(rep.buffer);
    }
    Ok(vec![(
        worst,
        format!("{instances} instances, forcing supported in [0, ∞), largest buffer {buffer:.3}"),
    )])
}

/// Random trigonometric polynomial with grid frequencies `|k| ≤ kmax`.
fn trig_poly<R: Rng>(rng: &mut R, grid: &TimeGrid, dim: usize, kmax: i64) -> Signal {
    let coeffs: Vec<(i64, Vec<C64>)> = (-kmax..=kmax)
        .map(|k| (k, (0..dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()))
        .collect();
    let l = grid.period();
    Signal::from_fn(grid.clone(), dim, SpaceTag::H, |t, out| {
        out.iter_mut().for_each(|z| *z = c(0.0));
        for (k, cf) in &coeffs {
            let e = C64::from_polar(1.0, 2.0 * PI * *k as f64 * t / l);
            for i in 0..dim {
                out[i] += cf[i] * e;
            }
        }
    })
    .expect("finite")
}

fn interpolation(rng: &mut ChaCha8Rng, scale: Scale) -> Outcome {
    let instances = count(scale, 500, 50);
    let grid = TimeGrid::new(64, 10.0)?;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..instances {
        let d = rng.gen_range(1..=4);
        let t = GelfandTriple::new(spd(rng, d, 0.1, 10.0))?;
        let u = trig_poly(rng, &grid, d, 8);
        // δ ≤ 1 − 2α leaves (0.5, 0.25) outside the lemma's range
        for (alpha, delta) in [(0.2, 0.0), (0.2, 0.25), (0.5, 0.0)] {
            let r = interpolation_inequality_check(&u, alpha, delta, &t)?;
            worst = worst.max(-r.slack / r.rhs);
        }
    }
    Ok(vec![(worst, format!("{instances} instances, (α, δ) ∈ {{(0.2, 0), (0.2, 0.25), (0.5, 0)}}"))])
}

fn kato(rng: &mut ChaCha8Rng, scale: Scale) -> Outcome {
    let forms = count(scale, 200, 40);
    let mut worst = f64::NEG_INFINITY;
    let mut note = String::new();
    for &(alpha, lo, hi) in &KATO_ENVELOPE {
        let mut per_d = vec![(f64::INFINITY, 0.0f64); 9];
        for i in 0..forms {
            let d = 2 + i % 7;
            let (t, f) = random_coercive_form(rng, d, 1.0, 10.0, 1e3);
            let p = kato_power_matrix(&f, alpha)?;
            let sv = (p.matrix * t.riesz_power_c(-alpha)).singular_values();
            per_d[d].0 = per_d[d].0.min(sv.min());
            per_d[d].1 = per_d[d].1.max(sv.max());
        }
        let observed = per_d[2..].iter().fold((f64::INFINITY, 0.0f64), |(a, b), &(x, y)| (a.min(x), b.max(y)));
        worst = worst.max((lo - observed.0) / lo).max((observed.1 - hi) / hi);
        // spread across d of the observed extremes
        let spread_hi = per_d[2..].iter().map(|p| p.1).fold(0.0, f64::max)
            / per_d[2..].iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        note.push_str(&format!(
            "α={alpha}: [{:.4}, {:.4}] in [{lo}, {hi}], upper spread over d {spread_hi:.3}; ",
            observed.0, observed.1
        ));
    }
    Ok(vec![(worst, format!("{forms} forms per α, d = 2..8; {}", note.trim_end_matches("; ")))])
}

/// Smooth random function on the window `[0, 1]`, zero at 0.
fn smooth_on_window<R: Rng>(rng: &mut R, grid: &TimeGrid) -> Signal {
    let a: Vec<(f64, f64, f64)> = (0..5)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.5..12.0), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let slope = rng.gen_range(-2.0..2.0);
    let f = move |t: f64| -> f64 { slope * t + a.iter().map(|(c, w, p)| c * (w * t + p).sin()).sum::<f64>() };
    let f0 = f(0.0);
    Signal::scalar(grid.clone(), move |t| f(t) - f0).expect("finite")
}

fn hardy(rng: &mut ChaCha8Rng, scale: Scale) -> Outcome {
    let samples = count(scale, 100, 20);
    let grid = TimeGrid::new(1024, 4.0)?.with_window(0.0, 1.0)?;
    let mut worst = f64::NEG_INFINITY;
    let mut constant = 0.0;
    for _ in 0..samples {
        let u = smooth_on_window(rng, &grid);
        let r = hardy_check(&u, 0.6, 2.0)?;
        constant = r.constant;
        worst = worst.max(r.lhs / r.rhs - 1.0);
    }
    Ok(vec![(worst, format!("{samples} samples, α = 0.6, p = 2, constant {constant}"))])
}

fn commutator(rng: &mut ChaCha8Rng, scale: Scale) -> Outcome {
    let pairs = count(scale, 100, 10);
    let grid = TimeGrid::new(512, 40.0)?;
    let mut worst = f64::NEG_INFINITY;
    for gamma in [0.25, 0.5] {
        for _ in 0..pairs {
            let d = 2;
            let coef = rand_cmatrix(rng, d);
            let coef = &coef / c(coef.norm());
            let g = Sampler::product(
                CMatrix::zeros(d, d),
                TimeProfile::Bump {
                    center: rng.gen_range(-3.0..3.0),
                    width: rng.gen_range(2.0..6.0),
                },
                coef,
            );
            let eps = rng.gen_range(0.05..0.5);
            let recipe = commutator_constant(&g, &grid, gamma, eps, default_delta0(gamma))?;
            let one = commutator_constant(&g, &grid, gamma, 1.0, default_delta0(gamma))?;
            let v = Packets::random(rng, d, 4.0).sample(&grid, SpaceTag::H);
            let r = commutator_check_with(&g, &v, &recipe, &one)?;
            worst = worst.max(r.lhs / r.rhs - 1.0).max(r.gv_frac_norm / r.bounded_rhs - 1.0);
        }
    }
    Ok(vec![(worst, format!("{pairs} pairs per γ ∈ {{0.25, 0.5}}"))])
}

fn ivp(rng: &mut ChaCha8Rng, scale: Scale) -> Outcome {
    let instances = count(scale, 20, 3);
    let grid = TimeGrid::new(1024, 8.0)?.with_window(0.0, 1.0)?;
    let w = *grid.window().expect("window set");
    let h = grid.spacing();
    let (mut decay, mut energy, mut trace) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..instances {
        // autonomous eigenvector decay
        let d = rng.gen_range(2..=3);
        let b = spd(rng, d, 0.5, 3.0);
        let eig = SymmetricEigen::new(b.clone());
        let k = rng.gen_range(0..d);
        let lambda = eig.eigenvalues[k];
        let f = NonAutonomousForm::new(GelfandTriple::identity(d), Sampler::constant(b.map(c)))?.on_interval(0.0, 1.0)?;
        let u0: Vec<C64> = eig.eigenvectors.column(k).iter().map(|&x| c(x)).collect();
        let zero = Signal::zeros(grid.clone(), d, SpaceTag::VDUAL);
        let sol = solve_ivp(&f, &zero, &u0, &SolveConfig::new(grid.clone(), d))?;
        for j in w.first..=w.last {
            let e = (-lambda * grid.time(j)).exp();
            for i in 0..d {
                decay = decay.max((sol.u.at(j)[i] - u0[i] * e).norm());
            }
        }

        // forced non-autonomous problem: energy identity and trace
        let d = 2;
        let f = smooth_family(rng, d).on_interval(0.0, 1.0)?;
        let (om, ph) = (rng.gen_range(0.5..4.0), rng.gen_range(0.0..6.0));
        let amp: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let rhs = Signal::from_fn(grid.clone(), d, SpaceTag::VDUAL, |t, out| {
            for i in 0..d {
                out[i] = c(amp[i] * (om * t + ph + i as f64).cos() + 0.3 * t);
            }
        })?;
        let u0: Vec<C64> = (0..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let sol = solve_ivp(&f, &rhs, &u0, &SolveConfig::new(grid.clone(), d))?;
        let mut form = vec![];
        let mut forcing = vec![];
        for j in w.first..=w.last {
            let t = grid.time(j);
            let u = sol.u.at(j);
            form.push(f.eval(t, u, u).re);
            forcing.push(rhs.at(j).iter().zip(u).map(|(a, b)| a * b.conj()).sum::<C64>().re);
        }
        let sq = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let lhs = 0.5 * sq(sol.u.at(w.last)) + romberg(&form, h);
        let rhs_v = 0.5 * sq(&u0) + romberg(&forcing, h);
        energy = energy.max((lhs - rhs_v).abs() / lhs.abs().max(rhs_v.abs()));
        trace = trace.max(sol.trace.as_ref().map_or(f64::INFINITY, |t| t.start_error));
    }
    Ok(vec![
        (decay, format!("{instances} instances, max |u(t) − e^(−λt)u0|")),
        (energy, format!("{instances} instances, relative defect of the energy identity")),
        (trace, format!("{instances} instances, |u(0) − u0|")),
    ])
}

/// The rough elliptic problem of the regularity-threshold study:
/// `a(t,x) = 2 + ½cos 2πx + ¼ g(t)` with `g` of index `s_target`.
pub fn threshold_problem(s_target: f64, n: usize) -> SolveSpec {
    SolveSpec {
        problem: ProblemSpec::Elliptic {
            coefficient: CoefficientSpec::Rough(threshold_coefficient(s_target)),
            n_x: 8,
        },
        forcing: threshold_forcing(),
        u0: InitialSpec::Zero,
        grid: GridSpec {
            n,
            period: 8.0,
            window: (0.0, 1.0),
        },
        alpha: 0.5,
        oracle_oversample: None,
        refinement: vec![],
    }
}

pub fn threshold_coefficient(s_target: f64) -> RoughCoefficient {
    RoughCoefficient {
        base: SpaceProfile::Cosine {
            mean: 2.0,
            amplitude: 0.5,
            waves: 1.0,
        },
        amplitude: SpaceProfile::Constant { value: 0.25 },
        s_target,
        p_target: 2.0,
        profile: mreg_core::form::ProfileKind::Weierstrass,
        start: 0.0,
        end: 1.0,
        bounds: (0.1, 4.0),
    }
}

pub fn threshold_forcing() -> ForcingSpec {
    ForcingSpec::Separable {
        terms: vec![ForcingTerm {
            time: TimeProfile::Constant { value: 1.0 },
            space: SpaceProfile::Cosine {
                mean: 1.0,
                amplitude: -1.0,
                waves: 1.0,
            },
            component: 0,
        }],
    }
}

/// `(‖u′‖_{L²(I;H)}, ‖u‖_{H^{1/2}(I;V)})` of the threshold problem.
pub fn threshold_norms(spec: &SolveSpec, n: usize) -> crate::error::CliResult<(f64, f64)> {
    let s = solve_point(spec, n)?;
    Ok((s.solution.norms.du, s.solution.norms.half_v))
}

fn mr_stability(_: &mut ChaCha8Rng, scale: Scale) -> Outcome {
    let grids: &[usize] = match scale {
        Scale::Full => &[256, 512, 1024],
        Scale::Quick => &[128, 256, 512],
    };
    let spec = threshold_problem(0.7, grids[0]);
    let mut du = vec![];
    let mut hv = vec![];
    for &n in grids {
        let (a, b) = threshold_norms(&spec, n).map_err(|e| match e {
            crate::error::CliError::Core(e) => e,
            other => mreg_core::MregError::Config(other.to_string()),
        })?;
        du.push(a);
        hv.push(b);
    }
    let spread = |v: &[f64]| {
        let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = v.iter().cloned().fold(0.0, f64::max);
        hi / lo - 1.0
    };
    let worst = spread(&du).max(spread(&hv));
    Ok(vec![(
        worst,
        format!("s_target = 0.7, n ∈ {grids:?}: ‖u′‖ {du:.5?}, ‖u‖_H1/2(V) {hv:.5?}"),
    )])
}
