mod common;

use common::{trig_poly, wave_packets};
use mreg_core::form::{NonAutonomousForm, Sampler};
use mreg_core::gelfand::{GelfandTriple, SpaceTag};
use mreg_core::solver::*;
use mreg_core::spectral::{forward, Signal, TimeGrid};
use mreg_core::{CMatrix, CVector, C64};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// SPD matrix with eigenvalues drawn from `[lo, hi]`.
fn spd<R: Rng>(rng: &mut R, d: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let q = g.qr().q();
    let ev = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(d, |_, _| rng.gen_range(lo..hi)));
    let m = &q * ev * q.transpose();
    (&m + m.transpose()) * 0.5
}

fn sqrt_spd(b: &DMatrix<f64>) -> CMatrix {
    let e = nalgebra::SymmetricEigen::new(b.clone());
    let r = &e.eigenvectors * DMatrix::from_diagonal(&e.eigenvalues.map(f64::sqrt)) * e.eigenvectors.transpose();
    r.map(c)
}

/// `A(t) = 𝓑^{1/2}(2 + 0.5 sin(ωt + φ) K)𝓑^{1/2}` with `‖K‖ ≤ 1`: coercive with
/// `η ≥ 1.5`, smooth in time.
fn smooth_family<R: Rng>(rng: &mut R, d: usize) -> NonAutonomousForm {
    let b = spd(rng, d, 1.0, 5.0);
    let t = GelfandTriple::new(b.clone()).unwrap();
    let s = sqrt_spd(&b);
    let k = CMatrix::from_fn(d, d, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let k = &k / c(k.norm().max(1e-12));
    let (om, ph) = (rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.3));
    let sampler = Sampler::custom(d, d, move |tt| {
        let inner = CMatrix::identity(d, d) * c(2.0) + &k * c(0.5 * (om * tt + ph).sin());
        &s * inner * &s
    });
    NonAutonomousForm::new(t, sampler).unwrap()
}

fn scalar_form(lambda: f64) -> NonAutonomousForm {
    NonAutonomousForm::new(
        GelfandTriple::identity(1),
        Sampler::constant(CMatrix::from_element(1, 1, c(lambda))),
    )
    .unwrap()
}

fn ramp(t: f64) -> f64 {
    // smooth 0 → 1 switch on [0, 1]
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

fn l2_inner(u: &Signal, v: &Signal) -> C64 {
    u.l2_inner(v).unwrap()
}

// ---------------------------------------------------------------- line solves

#[test]
fn scalar_solution_is_diagonal_in_fourier() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let grid = TimeGrid::new(256, 40.0).unwrap();
    let lambda = 1.5;
    let f = scalar_form(lambda);
    let rhs = wave_packets(&mut rng, &grid, 1, 2.0);
    let sol = solve_line_weak(&f, &rhs, &SolveConfig::new(grid.clone(), 1)).unwrap();
    let fh = forward(&rhs);
    let uh = forward(&sol.u);
    let scale = fh.iter().map(|z| z.norm()).fold(0.0, f64::max);
    for k in 0..256 {
        let want = fh[k] / C64::new(lambda, grid.frequency(k));
        assert!((uh[k] - want).norm() <= 1e-12 * scale, "k = {k}");
    }
    assert!(sol.residual < 1e-12);
    assert!((sol.delta - lambda / (lambda + 1.0)).abs() < 1e-12);
}

#[test]
fn manufactured_solution_is_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let grid = TimeGrid::new(1024, 40.0).unwrap();
    for _ in 0..3 {
        let f = smooth_family(&mut rng, 2);
        let ustar = wave_packets(&mut rng, &grid, 2, 3.0).with_space(SpaceTag::V);
        // f := u*′ + 𝒜u* with the spectral derivative
        let xi = grid.frequencies();
        let mut spec = forward(&ustar);
        for k in 0..1024 {
            for i in 0..2 {
                spec[k * 2 + i] *= C64::new(0.0, xi[k]);
            }
        }
        let du = ustar.with_values(mreg_core::spectral::inverse(&spec, 1024, 2)).unwrap();
        let au = Signal::from_fn(grid.clone(), 2, SpaceTag::VDUAL, |t, out| {
            let v = f.matrix(t) * CVector::from_column_slice(ustar.at(grid.index_of(t)));
            out.copy_from_slice(v.as_slice());
        })
        .unwrap();
        let rhs = du.add(&au).unwrap();
        for solver in [LinearSolver::iterative()] {
            let cfg = SolveConfig::new(grid.clone(), 2).with_solver(solver);
            let sol = solve_line_weak(&f, &rhs, &cfg).unwrap();
            let err = spacetime_norm(&sol.u.sub(&ustar).unwrap(), 0.0, 1.0, f.triple()).unwrap();
            let size = spacetime_norm(&ustar, 0.0, 1.0, f.triple()).unwrap();
            assert!(err <= 1e-8 * size, "{err:e} vs {size:e}");
        }
    }
}

#[test]
fn energy_bound_holds() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let grid = TimeGrid::new(256, 40.0).unwrap();
    let f = smooth_family(&mut rng, 2);
    let cfg = SolveConfig::new(grid.clone(), 2).with_solver(LinearSolver::iterative());
    for _ in 0..20 {
        let rhs = wave_packets(&mut rng, &grid, 2, 2.0);
        let sol = solve_line_weak(&f, &rhs, &cfg).unwrap();
        let lhs = sol.constants.eta * sol.norms.l2_v.powi(2);
        let rhs_val = l2_inner(&rhs, &sol.u).re;
        assert!(lhs <= rhs_val * (1.0 + 1e-9), "{lhs} > {rhs_val}");
    }
}

#[test]
fn embedding_of_weak_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let grid = TimeGrid::new(256, 40.0).unwrap();
    let f = smooth_family(&mut rng, 3);
    for _ in 0..5 {
        let rhs = wave_packets(&mut rng, &grid, 3, 3.0);
        let sol = solve_line_weak(&f, &rhs, &SolveConfig::new(grid.clone(), 3).with_solver(LinearSolver::iterative())).unwrap();
        let du = spacetime_norm(&sol.du, 0.0, -1.0, f.triple()).unwrap();
        let lhs = sol.norms.half_h.powi(2);
        assert!(lhs <= du * sol.norms.l2_v * (1.0 + 1e-10));
    }
}

#[test]
fn zero_forcing_gives_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grid = TimeGrid::new(128, 20.0).unwrap();
    let f = smooth_family(&mut rng, 2);
    let rhs = Signal::zeros(grid.clone(), 2, SpaceTag::VDUAL);
    let sol = solve_line_weak(&f, &rhs, &SolveConfig::new(grid, 2)).unwrap();
    assert!(sol.u.values().iter().all(|z| z.norm() == 0.0));
    assert_eq!(sol.norms.mr(), 0.0);
    assert_eq!(sol.norms.v_alpha(), 0.0);
}

#[test]
fn autonomous_problems_are_translation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let grid = TimeGrid::new(256, 40.0).unwrap();
    let b = spd(&mut rng, 2, 1.0, 3.0);
    let a = sqrt_spd(&b) * CMatrix::from_fn(2, 2, |i, j| c(if i == j { 2.0 } else { 0.3 })) * sqrt_spd(&b);
    let f = NonAutonomousForm::new(GelfandTriple::new(b).unwrap(), Sampler::constant(a)).unwrap();
    let rhs = wave_packets(&mut rng, &grid, 2, 2.0);
    let shift = 17;
    let shifted = Signal::from_fn(grid.clone(), 2, SpaceTag::VDUAL, |t, out| {
        let j = grid.index_of(t);
        out.copy_from_slice(rhs.at((j + 256 - shift) % 256));
    })
    .unwrap();
    let cfg = SolveConfig::new(grid.clone(), 2);
    let u1 = solve_line_weak(&f, &rhs, &cfg).unwrap().u;
    let u2 = solve_line_weak(&f, &shifted, &cfg).unwrap().u;
    let scale = u1.max_norm();
    for j in 0..256 {
        for i in 0..2 {
            assert!((u2.at((j + shift) % 256)[i] - u1.at(j)[i]).norm() < 1e-12 * scale);
        }
    }
}

#[test]
fn causality_with_smooth_onset() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grid = TimeGrid::new(2048, 40.0).unwrap();
    for _ in 0..3 {
        let f = smooth_family(&mut rng, 2);
        let (w, ph) = (rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.0));
        let rhs = Signal::from_fn(grid.clone(), 2, SpaceTag::VDUAL, |t, out| {
            let env = ramp(t) * (-(t - 3.0).powi(2) / 8.0).exp();
            out[0] = c(env * (w * t + ph).cos());
            out[1] = c(0.5 * env);
        })
        .unwrap();
        let sol = solve_line_weak(&f, &rhs, &SolveConfig::new(grid.clone(), 2)).unwrap();
        let rep = causality_check(&f, &rhs, &sol, 0.0, 1e-6).unwrap();
        assert!(rep.holds, "{rep:?}");
    }
}

#[test]
fn causality_needs_vanishing_forcing() {
    let grid = TimeGrid::new(256, 40.0).unwrap();
    let f = scalar_form(1.0);
    let rhs = Signal::scalar(grid.clone(), |t| (-t * t).exp()).unwrap();
    let sol = solve_line_weak(&f, &rhs, &SolveConfig::new(grid, 1)).unwrap();
    assert!(causality_check(&f, &rhs, &sol, 0.0, 1e-6).is_err());
}

// ---------------------------------------------------------------- stabilized forms

#[test]
fn weak_form_coercivity_on_random_signals() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = TimeGrid::new(64, 10.0).unwrap();
    let f = smooth_family(&mut rng, 2);
    let c = mreg_core::form::measure_constants(&f, &grid, 0.0).unwrap();
    let delta = c.eta / (c.bound_m + 1.0);
    let e = StabilizedForm::weak(&f, &grid, delta).unwrap();
    for _ in 0..1000 {
        let v = Signal::new(
            grid.clone(),
            2,
            (0..128).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
            SpaceTag::V,
        )
        .unwrap();
        let re = e.value(&v, &v).unwrap().re;
        let n2 = e.norm_sq(&v).unwrap();
        assert!(re >= delta * n2 - 1e-9 * n2, "{re} < {}", delta * n2);
    }
    let meas = e.coercivity().unwrap();
    assert!(meas.value >= delta - 1e-9);
}

proptest! {
    #[test]
    fn stabilizer_symbol_bounds(delta in 0.01f64..0.99, n in 3u32..9) {
        let grid = TimeGrid::new(1 << n, 7.0).unwrap();
        let f = scalar_form(1.0);
        let e = StabilizedForm::weak(&f, &grid, delta).unwrap();
        for s in e.symbol() {
            prop_assert!(s.norm() >= 1.0 - delta - 1e-15 && s.norm() <= 1.0 + delta + 1e-15);
        }
    }

    #[test]
    fn interpolation_inequality_on_trig_polynomials(seed in 0u64..1000, d in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = TimeGrid::new(64, 10.0).unwrap();
        let t = GelfandTriple::new(spd(&mut rng, d, 0.1, 10.0)).unwrap();
        let (u, _) = trig_poly(&mut rng, &grid, d, 8);
        for &(alpha, delta) in &[(0.2, 0.0), (0.2, 0.25), (0.5, 0.0)] {
            let r = interpolation_inequality_check(&u, alpha, delta, &t).unwrap();
            prop_assert!(r.slack >= -1e-9 * r.rhs, "{:?}", r);
        }
    }
}

#[test]
fn interpolation_single_mode_is_equality() {
    let grid = TimeGrid::new(64, 10.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let b = spd(&mut rng, 3, 0.5, 4.0);
    let t = GelfandTriple::new(b).unwrap();
    let e = t.eigenvectors().column(1).into_owned();
    let u = Signal::from_fn(grid.clone(), 3, SpaceTag::H, |tt, out| {
        let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * 3.0 * tt / 10.0);
        for i in 0..3 {
            out[i] = z * e[i];
        }
    })
    .unwrap();
    for &(alpha, delta) in &[(0.2, 0.0), (0.2, 0.25), (0.4, 0.1), (0.5, 0.0)] {
        let r = interpolation_inequality_check(&u, alpha, delta, &t).unwrap();
        assert!(r.slack.abs() <= 1e-12 * r.rhs, "{r:?}");
    }
    assert!(interpolation_inequality_check(&u, 0.4, 0.3, &t).is_err());
    assert!(interpolation_inequality_check(&u, 0.2, -0.1, &t).is_err());
}

// ---------------------------------------------------------------- regular solves

#[test]
fn regular_autonomous_derivative_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let grid = TimeGrid::new(128, 40.0).unwrap();
    let b = spd(&mut rng, 2, 1.0, 3.0);
    let a = CMatrix::from_fn(2, 2, |i, j| c(b[(i, j)])) * c(1.5);
    let f = NonAutonomousForm::new(GelfandTriple::new(b).unwrap(), Sampler::constant(a)).unwrap();
    let rhs = wave_packets(&mut rng, &grid, 2, 2.0);
    let cfg = SolveConfig::new(grid.clone(), 2).with_alpha(0.5);
    let sol = solve_line_regular(&f, &rhs, &cfg).unwrap();
    let fh = spacetime_norm(&rhs, 0.0, 0.0, f.triple()).unwrap();
    assert!(sol.norms.du <= fh * (1.0 + 1e-12), "{} > {fh}", sol.norms.du);
    let reg = sol.regular.as_ref().unwrap();
    assert!(reg.coercive, "{reg:?}");
    assert!(reg.embedding_slack >= 0.0);
}

#[test]
fn regular_norms_are_stable_under_refinement() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = smooth_family(&mut rng, 2);
    let (w, ph) = (rng.gen_range(0.5..2.0), rng.gen_range(0.0..6.0));
    let mut mr = vec![];
    for n in [256usize, 512, 1024] {
        let grid = TimeGrid::new(n, 40.0).unwrap();
        let rhs = Signal::from_fn(grid.clone(), 2, SpaceTag::H, |t, out| {
            let env = (-t * t / 8.0).exp();
            out[0] = c(env * (w * t + ph).cos());
            out[1] = c(env);
        })
        .unwrap();
        let cfg = SolveConfig::new(grid, 2).with_alpha(0.5).with_solver(LinearSolver::iterative());
        let sol = solve_line_regular(&f, &rhs, &cfg).unwrap();
        assert!(sol.norms.all_finite());
        mr.push(sol.norms.mr());
    }
    let (lo, hi) = mr.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    assert!(hi <= 1.2 * lo, "{mr:?}");
}

// ---------------------------------------------------------------- initial value problems

fn ivp_grid() -> TimeGrid {
    TimeGrid::new(1024, 8.0).unwrap().with_window(0.0, 1.0).unwrap()
}

#[test]
fn eigenvector_decays_exponentially() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let grid = ivp_grid();
    let b = spd(&mut rng, 3, 0.5, 3.0);
    let eig = nalgebra::SymmetricEigen::new(b.clone());
    let a = b.map(c);
    let f = NonAutonomousForm::new(GelfandTriple::identity(3), Sampler::constant(a))
        .unwrap()
        .on_interval(0.0, 1.0)
        .unwrap();
    let rhs = Signal::zeros(grid.clone(), 3, SpaceTag::VDUAL);
    for k in 0..3 {
        let lambda = eig.eigenvalues[k];
        let u0: Vec<C64> = eig.eigenvectors.column(k).iter().map(|&x| c(x)).collect();
        let sol = solve_ivp(&f, &rhs, &u0, &SolveConfig::new(grid.clone(), 3)).unwrap();
        let w = grid.window().unwrap();
        for j in w.first..=w.last {
            let decay = (-lambda * grid.time(j)).exp();
            for i in 0..3 {
                assert!((sol.u.at(j)[i] - u0[i] * decay).norm() <= 1e-6);
            }
        }
    }
}

fn random_ivp<R: Rng>(rng: &mut R, grid: &TimeGrid, d: usize) -> (NonAutonomousForm, Signal, Vec<C64>) {
    let f = smooth_family(rng, d).on_interval(0.0, 1.0).unwrap();
    let (w, ph) = (rng.gen_range(0.5..4.0), rng.gen_range(0.0..6.0));
    let amp: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let rhs = Signal::from_fn(grid.clone(), d, SpaceTag::VDUAL, |t, out| {
        for i in 0..d {
            out[i] = c(amp[i] * (w * t + ph + i as f64).cos() + 0.3 * t);
        }
    })
    .unwrap();
    let u0 = (0..d).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    (f, rhs, u0)
}

#[test]
fn stiff_ivp_on_a_coarse_grid() {
    // rates far beyond the grid resolution, switched-on constant forcing
    let lambda = [2.0, 40.0, 600.0, 2000.0];
    let a = CMatrix::from_diagonal(&CVector::from_iterator(4, lambda.iter().map(|&l| c(l))));
    let f = NonAutonomousForm::new(GelfandTriple::identity(4), Sampler::constant(a))
        .unwrap()
        .on_interval(0.0, 1.0)
        .unwrap();
    for n in [128, 256] {
        let grid = TimeGrid::new(n, 8.0).unwrap().with_window(0.0, 1.0).unwrap();
        let rhs = Signal::from_fn(grid.clone(), 4, SpaceTag::VDUAL, |_, out| out.fill(c(1.0))).unwrap();
        let sol = solve_ivp(&f, &rhs, &[c(0.0); 4], &SolveConfig::new(grid.clone(), 4)).unwrap();
        let w = *grid.window().unwrap();
        for j in w.first..=w.last {
            let t = grid.time(j);
            for (i, l) in lambda.iter().enumerate() {
                let exact = (1.0 - (-l * t).exp()) / l;
                assert!((sol.u.at(j)[i] - exact).norm() <= 1e-8, "n = {n}, t = {t}, rate {l}");
            }
        }
    }
}

#[test]
fn ivp_matches_crank_nicolson_and_keeps_the_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let grid = ivp_grid();
    for _ in 0..3 {
        let (f, rhs, u0) = random_ivp(&mut rng, &grid, 2);
        let mut cfg = SolveConfig::new(grid.clone(), 2);
        cfg.oracle = OracleConfig {
            enabled: true,
            oversample: 8,
        };
        let sol = solve_ivp(&f, &rhs, &u0, &cfg).unwrap();
        let tr = sol.trace.as_ref().unwrap();
        assert!(tr.start_error <= 1e-8, "{tr:?}");
        assert!(tr.start_half_norm.is_some() && tr.end_half_norm.is_some());
        let or = sol.oracle.unwrap();
        assert!(or.max_diff <= 1e-5, "{or:?}");
        assert!(sol.warnings.is_empty(), "{:?}", sol.warnings);
    }
}

#[test]
fn ivp_energy_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let grid = ivp_grid();
    let w = *grid.window().unwrap();
    let h = grid.spacing();
    for _ in 0..3 {
        let (f, rhs, u0) = random_ivp(&mut rng, &grid, 2);
        let sol = solve_ivp(&f, &rhs, &u0, &SolveConfig::new(grid.clone(), 2)).unwrap();
        let mut form = vec![];
        let mut forcing = vec![];
        for j in w.first..=w.last {
            let t = grid.time(j);
            let u = sol.u.at(j);
            form.push(f.eval(t, u, u).re);
            forcing.push(rhs.at(j).iter().zip(u).map(|(a, b)| a * b.conj()).sum::<C64>().re);
        }
        let romberg = mreg_core::spectral::quad::romberg;
        let un = |v: &[C64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let lhs = 0.5 * un(sol.u.at(w.last)) + romberg(&form, h);
        let rhs_v = 0.5 * un(&u0) + romberg(&forcing, h);
        assert!((lhs - rhs_v).abs() <= 1e-6 * rhs_v.abs().max(lhs.abs()), "{lhs} vs {rhs_v}");
    }
}

