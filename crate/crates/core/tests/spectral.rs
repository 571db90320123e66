mod common;

use std::f64::consts::PI;

use common::{rel, trig_poly, wave_packets};
use mreg_core::gelfand::SpaceTag;
use mreg_core::spectral::quad::integrate;
use mreg_core::spectral::*;
use mreg_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest `[𝓔f]_{W^{0.3,2}(ℝ)} / [f]_{W^{0.3,2}(I)}` seen in a one-off sweep
/// of 2000 random smooth inputs on `[0,1]` (16.78), with headroom.
const REFLECT_K_MAX: f64 = 18.0;
/// Largest `[f]_{C^{0.25}} / [f]_{W^{0.75,2}}` in the same sweep (0.618).
const HOLDER_K_MAX: f64 = 0.7;

fn unit_window(n: usize) -> TimeGrid {
    TimeGrid::new(n, 4.0)
        .unwrap()
        .with_window(0.0, 1.0)
        .unwrap()
}

/// Smooth random function on the window: low trig modes plus a slope.
fn smooth_on_window<R: Rng>(rng: &mut R, grid: &TimeGrid, zero_at_start: bool) -> Signal {
    let a: Vec<(f64, f64, f64)> = (0..5)
        .map(|_| {
            (
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.5..12.0),
                rng.gen_range(0.0..6.3),
            )
        })
        .collect();
    let slope = rng.gen_range(-2.0..2.0);
    let f = move |t: f64| -> f64 {
        slope * t + a.iter().map(|(c, w, p)| c * (w * t + p).sin()).sum::<f64>()
    };
    let f0 = f(0.0);
    Signal::scalar(
        grid.clone(),
        move |t| if zero_at_start { f(t) - f0 } else { f(t) },
    )
    .unwrap()
}

#[test]
#[ignore = "one-off calibration of the frozen constants"]
fn calibrate_extension_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let g = unit_window(2048);
    let (mut kr, mut kh) = (0.0f64, 0.0f64);
    for _ in 0..2000 {
        let u = smooth_on_window(&mut rng, &g, false);
        kr = kr.max(reflect_ratio(&u, 0.3, 2.0).unwrap());
        let hs = holder_seminorm(&u, 0.25).unwrap();
        let gs = gagliardo_seminorm(&u, 0.75, 2.0, SeminormDomain::Window).unwrap();
        kh = kh.max(hs / gs);
    }
    println!("reflect K = {kr}, holder K = {kh}");
}

// ---------------------------------------------------------------- multipliers

#[test]
fn hilbert_turns_cosine_into_sine() {
    let g = TimeGrid::new(256, 2.0 * PI).unwrap();
    let u = Signal::scalar(g.clone(), |t| (3.0 * t).cos()).unwrap();
    let v = apply_multiplier(&FourierMultiplier::hilbert(), &u).unwrap();
    for j in 0..g.n_points() {
        assert!((v.at(j)[0] - C64::new((3.0 * g.time(j)).sin(), 0.0)).norm() < 1e-12);
    }
}

#[test]
fn fractional_derivative_of_exponential() {
    let g = TimeGrid::new(128, 10.0).unwrap();
    let om = g.frequency(5);
    let u = Signal::from_fn(g.clone(), 1, SpaceTag::H, |t, o| {
        o[0] = C64::from_polar(1.0, om * t)
    })
    .unwrap();
    let v = apply_multiplier(&FourierMultiplier::frac_derivative(0.3), &u).unwrap();
    let factor = C64::new(0.0, om).powf(0.3);
    for j in 0..g.n_points() {
        assert!((v.at(j)[0] - factor * u.at(j)[0]).norm() < 1e-12);
    }
}

#[test]
fn half_derivatives_compose_to_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let g = TimeGrid::new(512, 12.0).unwrap();
    let (u, coeffs) = trig_poly(&mut rng, &g, 2, 20);
    let half = FourierMultiplier::frac_derivative(0.5);
    let v = apply_multiplier(&half, &apply_multiplier(&half, &u).unwrap()).unwrap();
    // derivative of the trigonometric polynomial, term by term
    let l = g.period();
    let du = Signal::from_fn(g.clone(), 2, SpaceTag::H, |t, out| {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (k, c) in &coeffs {
            let w = 2.0 * PI * *k as f64 / l;
            let e = C64::new(0.0, w) * C64::from_polar(1.0, w * t);
            for i in 0..2 {
                out[i] += c[i] * e;
            }
        }
    })
    .unwrap();
    assert!(v.sub(&du).unwrap().l2_norm() <= 1e-10 * du.l2_norm());
}

#[test]
fn mismatched_tabulated_symbol_is_structural() {
    let g = TimeGrid::new(64, 1.0).unwrap();
    let u = Signal::scalar(g, |t| t.sin()).unwrap();
    let m = FourierMultiplier::new(
        "table",
        Symbol::Tabulated {
            n_points: 32,
            period: 1.0,
            values: vec![C64::new(1.0, 0.0); 32],
        },
    );
    assert!(matches!(
        apply_multiplier(&m, &u),
        Err(mreg_core::MregError::Structural(_))
    ));
}

#[test]
fn stabilizer_symbol_stays_in_annulus() {
    let g = TimeGrid::new(256, 3.0).unwrap();
    for &delta in &[0.05, 0.5, 0.95] {
        for z in FourierMultiplier::stabilizer(delta)
            .symbol_values(&g)
            .unwrap()
        {
            assert!(z.norm() >= 1.0 - delta - 1e-15 && z.norm() <= 1.0 + delta + 1e-15);
        }
    }
}

// ---------------------------------------------------------------- seminorms

#[test]
fn isometry_for_random_packets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = TimeGrid::new(4096, 40.0).unwrap();
    let c = c_alpha(0.3).unwrap();
    for _ in 0..5 {
        let u = wave_packets(&mut rng, &g, 1, 3.0);
        assert!(u.boundary_energy_fraction(0.2) < 1e-8);
        let lhs = c * frac_seminorm(&u, 0.3).powi(2);
        let rhs = gagliardo_seminorm(&u, 0.3, 2.0, SeminormDomain::Torus)
            .unwrap()
            .powi(2);
        assert!(rel(rhs, lhs) < 1e-4, "{lhs} vs {rhs}");
    }
}

#[test]
fn polarized_isometry() {
    // C_α Re⟨∂^α u, ∂^α v⟩ = ¼([u+v]² − [u−v]²) for the double integral
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let g = TimeGrid::new(4096, 40.0).unwrap();
    let alpha = 0.6;
    let c = c_alpha(alpha).unwrap();
    let m = FourierMultiplier::frac_derivative(alpha);
    for _ in 0..3 {
        let u = wave_packets(&mut rng, &g, 2, 3.0);
        let v = wave_packets(&mut rng, &g, 2, 3.0);
        let du = apply_multiplier(&m, &u).unwrap();
        let dv = apply_multiplier(&m, &v).unwrap();
        let lhs = c * du.l2_inner(&dv).unwrap().re;
        let sq = |w: &Signal| {
            gagliardo_report(w, alpha, 2.0, SeminormDomain::Torus)
                .unwrap()
                .integral
        };
        let rhs = 0.25 * (sq(&u.add(&v).unwrap()) - sq(&u.sub(&v).unwrap()));
        let scale = c * du.l2_norm() * dv.l2_norm();
        assert!((lhs - rhs).abs() < 1e-4 * scale, "{lhs} vs {rhs}");
    }
}

/// `∫_ℝ∫_ℝ |u(t)−u(s)|²/|t−s|^{1+2α}` for the hat `max(0, 1−|t|)`, written
/// as `2∫_0^∞ r^{−1−2α} D(r) dr` with `D(r) = ∫|u(s+r) − u(s)|² ds`; the
/// diagonal singularity sits at `r = 0` and is integrable.
fn hat_oracle(alpha: f64) -> f64 {
    let hat = |t: f64| (1.0 - t.abs()).max(0.0);
    let d = |r: f64| {
        let f = |s: f64| (hat(s + r) - hat(s)).powi(2);
        let mut pts = vec![-1.0 - r, -r, 1.0 - r, -1.0, 0.0, 1.0];
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.windows(2)
            .map(|w| integrate(&f, w[0], w[1], 1e-14).0)
            .sum::<f64>()
    };
    let g = |r: f64| 2.0 * r.powf(-1.0 - 2.0 * alpha) * d(r);
    let near: f64 = [0.0, 1.0, 2.0]
        .windows(2)
        .map(|w| integrate(&g, w[0], w[1], 1e-12).0)
        .sum();
    // D(r) = 2∫u² = 4/3 once the shifted copies stop overlapping
    near + 2.0 * (4.0 / 3.0) * 2f64.powf(-2.0 * alpha) / (2.0 * alpha)
}

#[test]
fn hat_function_against_quadrature_oracle() {
    let g = TimeGrid::new(4096, 8.0).unwrap();
    let u = Signal::scalar(g, |t| (1.0 - t.abs()).max(0.0)).unwrap();
    let got = gagliardo_report(&u, 0.25, 2.0, SeminormDomain::Line)
        .unwrap()
        .integral;
    let want = hat_oracle(0.25);
    assert!(rel(got, want) < 1e-4, "{got} vs {want}");
}

#[test]
fn seminorm_rejects_index_one() {
    let g = TimeGrid::new(64, 4.0).unwrap();
    let u = Signal::scalar(g, |t| t.sin()).unwrap();
    assert!(matches!(
        gagliardo_seminorm(&u, 1.0, 2.0, SeminormDomain::Torus),
        Err(mreg_core::MregError::Domain(_))
    ));
}

// ---------------------------------------------------------------- C_α

/// `C_α = (2/α) Γ(1−2α) cos(πα)`, the closed form of the defining integral.
fn c_alpha_closed(alpha: f64) -> f64 {
    2.0 / alpha * statrs::function::gamma::gamma(1.0 - 2.0 * alpha) * (PI * alpha).cos()
}

#[test]
fn c_alpha_half_is_two_pi() {
    assert!((c_alpha(0.5).unwrap() - 2.0 * PI).abs() < 1e-10);
}

#[test]
fn c_alpha_regression_and_closed_form() {
    // frozen from a 30-digit evaluation of −4Γ(−2α)cos(πα)
    assert!((c_alpha(0.25).unwrap() - 10.026_513_098_524_002).abs() < 1e-10);
    for &a in &[0.1, 0.3, 0.45, 0.6, 0.75, 0.9] {
        assert!(
            rel(c_alpha(a).unwrap(), c_alpha_closed(a)) < 1e-9,
            "α = {a}"
        );
    }
}

// ---------------------------------------------------------------- extensions

#[test]
fn reflection_of_constant_is_the_bump() {
    let g = unit_window(1024);
    let u = Signal::scalar(g.clone(), |_| 1.0).unwrap();
    let e = extend_reflect(&u).unwrap();
    for j in 0..g.n_points() {
        let t = g.time(j);
        let want = if (0.0..=1.0).contains(&t) {
            1.0
        } else if t < 0.0 {
            bump(-t)
        } else {
            bump(t - 1.0)
        };
        assert!((e.at(j)[0].re - want).abs() < 1e-12, "t = {t}");
    }
}

#[test]
fn reflection_support_and_seminorm_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let g = unit_window(1024);
    for i in 0..100 {
        let u = smooth_on_window(&mut rng, &g, false);
        let e = extend_reflect(&u).unwrap();
        for j in 0..g.n_points() {
            let t = g.time(j);
            if t <= -1.0 || t >= 2.0 {
                assert_eq!(e.at(j)[0], C64::new(0.0, 0.0));
            }
        }
        if i % 10 == 0 {
            assert!(reflect_ratio(&u, 0.3, 2.0).unwrap() <= REFLECT_K_MAX);
        }
    }
}

#[test]
fn constant_extension_of_constant() {
    let g = unit_window(512);
    let u = Signal::scalar(g, |_| 2.0).unwrap();
    let e = extend_const(&u, Side::Right, 0.75, 2.0).unwrap();
    assert_eq!(e.ratio, 1.0);
}

#[test]
fn left_extension_of_identity_matches_oracle() {
    // E(s) = max(s, 0) on (−∞, 1]; [E]² = 2∫_0^∞ r^{−5/2} D(r) dr with
    // D(r) = ∫ |E(s+r) − E(s)|² ds over s, s + r ≤ 1
    let e = |s: f64| s.max(0.0);
    let d = |r: f64| {
        let f = |s: f64| (e(s + r) - e(s)).powi(2);
        let lo = -r;
        let hi = 1.0 - r;
        let mut pts = vec![lo, hi, 0.0f64.clamp(lo, hi)];
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.windows(2)
            .map(|w| integrate(&f, w[0], w[1], 1e-14).0)
            .sum::<f64>()
    };
    let g = |r: f64| 2.0 * r.powf(-2.5) * d(r);
    // beyond r = 1 the integrand is (2/3) r^{−5/2}
    let oracle = integrate(&g, 0.0, 1.0, 1e-12).0 + (2.0 / 3.0) / 1.5;
    let grid = unit_window(4096);
    let u = Signal::scalar(grid, |t| t).unwrap();
    let got = gagliardo_report(
        &u,
        0.75,
        2.0,
        SeminormDomain::ConstTail {
            left: true,
            right: false,
        },
    )
    .unwrap()
    .integral;
    assert!(rel(got, oracle) < 1e-4, "{got} vs {oracle}");
    let ext = extend_const(&u, Side::Left, 0.75, 2.0).unwrap();
    assert!(ext.ratio.is_finite() && ext.ratio > 1.0);
}

#[test]
fn constant_extension_needs_continuity() {
    let g = unit_window(256);
    let u = Signal::scalar(g, |t| t).unwrap();
    assert!(extend_const(&u, Side::Left, 0.4, 2.0).is_err());
}

#[test]
fn weighted_boundary_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let g = unit_window(1024);
    for _ in 0..100 {
        let u = smooth_on_window(&mut rng, &g, true);
        let r = hardy_check(&u, 0.6, 2.0).unwrap();
        assert!((r.constant - 11.0).abs() < 1e-12);
        assert!(r.holds(1e-9), "{r:?}");
    }
}

// ---------------------------------------------------------------- Hölder and L^p

#[test]
fn holder_of_square_root() {
    let g = TimeGrid::new(4096, 8.0)
        .unwrap()
        .with_window(-1.0, 1.0)
        .unwrap();
    let u = Signal::scalar(g.clone(), |t| t.abs().sqrt()).unwrap();
    assert!(rel(holder_seminorm(&u, 0.5).unwrap(), 1.0) < 0.02);
    let c = Signal::scalar(g, |_| 4.0).unwrap();
    assert_eq!(holder_seminorm(&c, 0.5).unwrap(), 0.0);
}

#[test]
fn holder_embedding_constant() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let g = unit_window(1024);
    for _ in 0..50 {
        let u = smooth_on_window(&mut rng, &g, false);
        let h = holder_seminorm(&u, 0.25).unwrap();
        let w = gagliardo_seminorm(&u, 0.75, 2.0, SeminormDomain::Window).unwrap();
        assert!(h <= HOLDER_K_MAX * w, "{h} vs {w}");
    }
}

#[test]
fn lp_embedding_zero_and_gaussian() {
    let g = TimeGrid::new(2048, 40.0).unwrap();
    let z = Signal::zeros(g.clone(), 1, SpaceTag::H);
    let r = lp_embedding_check(&z, 0.4, 4.0, 2.0).unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
    let u = Signal::scalar(g, |t| (-t * t).exp()).unwrap();
    let r = lp_embedding_check(&u, 0.4, 4.0, 2.0).unwrap();
    assert!(r.holds(1e-12) && r.slack() > 0.0, "{r:?}");
}

#[test]
fn lp_embedding_random_sweep() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let g = TimeGrid::new(1024, 40.0).unwrap();
    for i in 0..200 {
        let u = wave_packets(&mut rng, &g, 1 + i % 2, 6.0);
        for &rho in &[1.0, 10.0] {
            let r = lp_embedding_check(&u, 0.5, 6.0, rho).unwrap();
            assert!(r.holds(1e-12), "{r:?}");
        }
    }
}

#[test]
fn lp_embedding_range_is_checked() {
    let g = TimeGrid::new(64, 4.0).unwrap();
    let u = Signal::scalar(g, |t| t.sin()).unwrap();
    // 2/(1 − 2α) = 10 at α = 0.4
    assert!(lp_embedding_check(&u, 0.4, 10.5, 1.0).is_err());
    assert!(lp_embedding_check(&u, 0.4, 2.0, 1.0).is_err());
}

// ---------------------------------------------------------------- invariants

#[test]
fn hilbert_squared_is_minus_identity_on_mean_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let g = TimeGrid::new(256, 5.0).unwrap();
    let (u, _) = trig_poly(&mut rng, &g, 3, 30);
    let mean: Vec<C64> = (0..3)
        .map(|i| (0..256).map(|j| u.at(j)[i]).sum::<C64>() / 256.0)
        .collect();
    let mut v = u.clone();
    for j in 0..256 {
        for i in 0..3 {
            v.at_mut(j)[i] -= mean[i];
        }
    }
    let h = FourierMultiplier::hilbert();
    let hh = apply_multiplier(&h, &apply_multiplier(&h, &v).unwrap()).unwrap();
    assert!(hh.add(&v).unwrap().l2_norm() < 1e-12 * v.l2_norm());
}

#[test]
fn weak_derivative_characterisation() {
    let mut rng = ChaCha8Rng::seed_from_u64(81);
    let g = TimeGrid::new(256, 6.0).unwrap();
    let alpha = 0.35;
    let (u, _) = trig_poly(&mut rng, &g, 2, 25);
    let v = apply_multiplier(&FourierMultiplier::frac_derivative(alpha), &u).unwrap();
    let adj = FourierMultiplier::frac_derivative_adjoint(alpha);
    for _ in 0..50 {
        let (phi, _) = trig_poly(&mut rng, &g, 2, 25);
        let lhs = u.l2_inner(&apply_multiplier(&adj, &phi).unwrap()).unwrap();
        let rhs = v.l2_inner(&phi).unwrap();
        assert!((lhs - rhs).norm() < 1e-10 * (v.l2_norm() * phi.l2_norm()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn plancherel(seed in any::<u64>(), logn in 3u32..10, dim in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1usize << logn;
        let g = TimeGrid::new(n, 3.0).unwrap();
        let vals: Vec<C64> = (0..n * dim).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let u = Signal::new(g, dim, vals, SpaceTag::H).unwrap();
        let a: f64 = u.values().iter().map(|z| z.norm_sqr()).sum();
        let b: f64 = forward_unitary(&u).iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((a - b).abs() <= 1e-12 * a);
    }

    #[test]
    fn adjoint_consistency(seed in any::<u64>(), alpha in 0.05f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = TimeGrid::new(128, 7.0).unwrap();
        let (u, _) = trig_poly(&mut rng, &g, 2, 20);
        let (v, _) = trig_poly(&mut rng, &g, 2, 20);
        let du = apply_multiplier(&FourierMultiplier::frac_derivative(alpha), &u).unwrap();
        let dv = apply_multiplier(&FourierMultiplier::frac_derivative_adjoint(alpha), &v).unwrap();
        let lhs = du.l2_inner(&v).unwrap();
        let rhs = u.l2_inner(&dv).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * du.l2_norm() * v.l2_norm());
    }

    #[test]
    fn seminorm_is_positively_homogeneous(seed in any::<u64>(), c in 0.1f64..10.0, alpha in 0.1f64..0.9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = TimeGrid::new(256, 40.0).unwrap();
        let u = wave_packets(&mut rng, &g, 1, 1.0);
        let a = gagliardo_seminorm(&u, alpha, 2.0, SeminormDomain::Torus).unwrap();
        let b = gagliardo_seminorm(&u.scale(C64::new(c, 0.0)), alpha, 2.0, SeminormDomain::Torus).unwrap();
        prop_assert!((b - c * a).abs() <= 1e-10 * c * a);
    }
}
