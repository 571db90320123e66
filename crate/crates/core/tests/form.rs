mod common;

use common::{rel, wave_packets};
use mreg_core::form::*;
use mreg_core::gelfand::{random_spd, GelfandTriple, SpaceTag};
use mreg_core::spectral::{Signal, TimeGrid};
use mreg_core::{CMatrix, CVector, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn real(m: &nalgebra::DMatrix<f64>) -> CMatrix {
    m.map(c)
}

fn rand_cmatrix<R: Rng>(rng: &mut R, d: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
    })
}

fn rand_signal<R: Rng>(rng: &mut R, grid: &TimeGrid, d: usize) -> Signal {
    let vals = (0..grid.n_points() * d)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Signal::new(grid.clone(), d, vals, SpaceTag::V).unwrap()
}

/// Smooth non-autonomous family `S + Σ sin(ω_i t + φ_i) N_i`.
fn smooth_family<R: Rng>(rng: &mut R, d: usize) -> (GelfandTriple, NonAutonomousForm) {
    let b = random_spd(rng, d, 20.0);
    let t = GelfandTriple::new(b.clone()).unwrap();
    let base = real(&b) * c(2.0);
    let terms: Vec<(f64, f64, CMatrix)> = (0..3)
        .map(|_| (rng.gen_range(0.2..2.0), rng.gen_range(0.0..6.3), rand_cmatrix(rng, d, 0.3)))
        .collect();
    let s = Sampler::custom(d, d, move |tt| {
        let mut m = base.clone();
        for (w, ph, n) in &terms {
            m += n * c((w * tt + ph).sin());
        }
        m
    });
    (t.clone(), NonAutonomousForm::new(t, s).unwrap())
}

// ---------------------------------------------------------------- assembly

#[test]
fn autonomous_form_gives_constant_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = rand_cmatrix(&mut rng, 3, 1.0);
    let f = NonAutonomousForm::new(GelfandTriple::identity(3), Sampler::constant(a.clone())).unwrap();
    let g = TimeGrid::new(32, 4.0).unwrap();
    let op = assemble_spacetime(&f, &g).unwrap();
    for k in 0..32 {
        assert_eq!(op.block(k), a);
    }
}

#[test]
fn associated_operator_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (_, f) = smooth_family(&mut rng, 3);
    let g = TimeGrid::new(64, 8.0).unwrap();
    let op = assemble_spacetime(&f, &g).unwrap();
    for _ in 0..50 {
        let v = rand_signal(&mut rng, &g, 3);
        let w = rand_signal(&mut rng, &g, 3);
        let lhs = op.form_value(&v, &w).unwrap();
        // independent: h Σ_k w_k* A(t_k) v_k with the full matrix
        let rhs: C64 = (0..64)
            .map(|k| {
                let a = f.matrix(g.time(k));
                let vk = CVector::from_column_slice(v.at(k));
                let wk = CVector::from_column_slice(w.at(k));
                (wk.adjoint() * a * vk)[(0, 0)]
            })
            .sum::<C64>()
            * g.spacing();
        assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
    }
}

#[test]
fn masking_commutes_with_the_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (_, f) = smooth_family(&mut rng, 2);
    let g = TimeGrid::new(128, 8.0).unwrap();
    let op = assemble_spacetime(&f, &g).unwrap();
    let v = rand_signal(&mut rng, &g, 2);
    for &cut in &[-3.0, 0.0, 1.7] {
        let mask = |t: f64| if t < cut { c(1.0) } else { c(0.0) };
        let a = op.apply(&v.modulate(mask)).unwrap();
        let b = op.apply(&v).unwrap().modulate(mask);
        assert_eq!(a.values(), b.values());
    }
}

#[test]
fn non_finite_samples_are_data_errors() {
    let s = Sampler::custom(1, 1, |t| CMatrix::from_element(1, 1, c(1.0 / t.signum().max(0.0))));
    let f = NonAutonomousForm::new(GelfandTriple::identity(1), s).unwrap();
    let g = TimeGrid::new(8, 2.0).unwrap();
    assert!(matches!(assemble_spacetime(&f, &g), Err(mreg_core::MregError::Data(_))));
}

// ---------------------------------------------------------------- constants

#[test]
fn riesz_map_form_has_unit_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let b = random_spd(&mut rng, 5, 100.0);
    let t = GelfandTriple::new(b.clone()).unwrap();
    let mut f = NonAutonomousForm::new(t, Sampler::constant(real(&b))).unwrap();
    let c = estimate_constants(&mut f, &TimeGrid::new(16, 2.0).unwrap()).unwrap();
    assert!((c.bound_m - 1.0).abs() < 1e-10 && (c.eta - 1.0).abs() < 1e-10 && c.omega == 0.0);
    assert_eq!(f.constants(), Some(&c));
}

#[test]
fn rotating_family_eta_ignores_skew_part() {
    // A(t) = R(t)ᵀ diag(1, 3) R(t) + 5 sin(t) J; the Hermitian part is the
    // rotated diagonal, so η = 1 exactly
    let s = Sampler::custom(2, 2, |t| {
        let (sn, cs) = t.sin_cos();
        let r = nalgebra::Matrix2::new(cs, -sn, sn, cs);
        let d = nalgebra::Matrix2::new(1.0, 0.0, 0.0, 3.0);
        let m = r.transpose() * d * r;
        let j = 5.0 * t.sin();
        CMatrix::from_row_slice(2, 2, &[c(m[(0, 0)]), c(m[(0, 1)] + j), c(m[(1, 0)] - j), c(m[(1, 1)])])
    });
    let mut f = NonAutonomousForm::new(GelfandTriple::identity(2), s).unwrap();
    let c = estimate_constants(&mut f, &TimeGrid::new(256, 12.0).unwrap()).unwrap();
    assert!((c.eta - 1.0).abs() < 1e-8, "{c:?}");
    assert!(c.bound_m > 3.0);
}

#[test]
fn estimated_constants_bound_rayleigh_quotients() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = TimeGrid::new(32, 6.0).unwrap();
    for _ in 0..10 {
        let (t, mut f) = smooth_family(&mut rng, 4);
        let c = estimate_constants(&mut f, &g).unwrap();
        let b = real(t.riesz());
        for k in (0..32).step_by(3) {
            let a = f.matrix(g.time(k));
            for _ in 0..10 {
                let v = CVector::from_fn(4, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                let w = CVector::from_fn(4, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                let nv = (v.adjoint() * &b * &v)[(0, 0)].re.sqrt();
                let nw = (w.adjoint() * &b * &w)[(0, 0)].re.sqrt();
                assert!((w.adjoint() * &a * &v)[(0, 0)].norm() <= c.bound_m * nv * nw * (1.0 + 1e-10));
                let re = (v.adjoint() * &a * &v)[(0, 0)].re + c.omega * v.norm_squared();
                assert!(re >= c.eta * nv * nv * (1.0 - 1e-10));
            }
        }
    }
}

#[test]
fn split_constants() {
    // 𝔞₂ = −0.3 𝔟 gives η₂ = 0.3; M₂ measured against H_{1+2β−2α}
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let b = random_spd(&mut rng, 3, 10.0);
    let t = GelfandTriple::new(b.clone()).unwrap();
    let a1 = Sampler::constant(real(&b) * c(2.0));
    let a2 = Sampler::constant(real(&b) * c(-0.3));
    let mut f = NonAutonomousForm::with_split(t.clone(), a1, a2, 0.5, 0.25).unwrap();
    let k = estimate_constants(&mut f, &TimeGrid::new(8, 1.0).unwrap()).unwrap();
    assert!((k.eta - 2.0).abs() < 1e-10 && (k.eta2 - 0.3).abs() < 1e-10);
    // ‖𝓑^{−1/4} (−0.3 𝓑) 𝓑^{−1/2}‖ = 0.3 λ_max^{1/4}
    let want = 0.3 * t.eigenvalues().max().powf(0.25);
    assert!(rel(k.m2, want) < 1e-10);
    assert!(NonAutonomousForm::with_split(t, Sampler::constant(real(&b)), Sampler::constant(real(&b)), 0.5, 0.5).is_err());
}

// ---------------------------------------------------------------- regularity

fn unit_interval_grid(n: usize) -> TimeGrid {
    TimeGrid::new(n, 4.0).unwrap()
}

fn cusp_form(theta: f64) -> (NonAutonomousForm, CMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let b = random_spd(&mut rng, 3, 10.0);
    let t = GelfandTriple::new(b.clone()).unwrap();
    let a1 = rand_cmatrix(&mut rng, 3, 0.5);
    let s = Sampler::product(real(&b), TimeProfile::Hoelder { theta, center: 0.5 }, a1.clone());
    let f = NonAutonomousForm::new(t.clone(), s).unwrap().on_interval(0.0, 1.0).unwrap();
    let w1 = t.whiten(&a1);
    (f, w1)
}

/// Raw scalar pair sum of `|g(t) − g(s)|^p |t − s|^{−1−sp}` over `[0, 1]`.
fn scalar_oracle(g: impl Fn(f64) -> f64, m: usize, s: f64, p: f64) -> f64 {
    let h = 1.0 / (m - 1) as f64;
    let w = |j: usize| if j == 0 || j == m - 1 { 0.5 } else { 1.0 };
    let mut acc = 0.0;
    for j in 0..m {
        for k in 0..m {
            if j != k {
                let (tj, tk) = (j as f64 * h, k as f64 * h);
                acc += w(j) * w(k) * (g(tj) - g(tk)).abs().powf(p) * (tj - tk).abs().powf(-1.0 - s * p);
            }
        }
    }
    acc * h * h
}

#[test]
fn autonomous_form_has_zero_regularity_seminorm() {
    let f = NonAutonomousForm::new(GelfandTriple::identity(2), Sampler::constant(CMatrix::identity(2, 2)))
        .unwrap()
        .on_interval(0.0, 1.0)
        .unwrap();
    let r = form_regularity(&f, 0.7, 2.0, &unit_interval_grid(512)).unwrap();
    assert_eq!(r.seminorm, 0.0);
    assert!(r.looks_finite(0.0));
}

#[test]
fn separable_cusp_matches_scalar_oracle() {
    let theta = 0.3;
    let (f, w1) = cusp_form(theta);
    let grid = unit_interval_grid(2048);
    let norm = w1.singular_values().max();
    for &s in &[0.5, 0.95] {
        let r = form_regularity(&f, s, 2.0, &grid).unwrap();
        let oracle = scalar_oracle(|t| (t - 0.5f64).abs().powf(theta), 513, s, 2.0) * norm * norm;
        assert!(rel(r.integral, oracle) < 1e-10, "{} vs {oracle}", r.integral);
        // fine bands scale like r^{1 + (θ − s)p}, approached from below
        let want = 1.0 + (theta - s) * 2.0;
        let got = r.fine_scale_slope();
        assert!(got < want && got > want - 0.4, "s = {s}: {got}");
    }
    assert!(form_regularity(&f, 0.5, 2.0, &grid).unwrap().looks_finite(0.1));
    assert!(!form_regularity(&f, 0.95, 2.0, &grid).unwrap().looks_finite(0.1));
}

#[test]
fn generic_path_agrees_with_separable_path() {
    let (f, _) = cusp_form(0.4);
    let s = f.sampler().clone();
    let custom = NonAutonomousForm::new(f.triple().clone(), Sampler::custom(3, 3, move |t| s.matrix(t)))
        .unwrap()
        .on_interval(0.0, 1.0)
        .unwrap();
    let grid = unit_interval_grid(512);
    let a = form_regularity(&f, 0.6, 3.0, &grid).unwrap();
    let b = form_regularity(&custom, 0.6, 3.0, &grid).unwrap();
    assert!(rel(a.integral, b.integral) < 1e-9);
}

#[test]
fn hoelder_cusp_is_in_the_matching_sobolev_space() {
    let (f, _) = cusp_form(0.6);
    let r = form_regularity(&f, 0.6, 2.0, &unit_interval_grid(4096)).unwrap();
    assert!(r.seminorm.is_finite() && r.looks_finite(0.5), "{}", r.fine_scale_slope());
}

#[test]
fn regularity_bands_sum_and_grow_with_the_index() {
    let (f, _) = cusp_form(0.5);
    let grid = unit_interval_grid(1024);
    let mut last = 0.0;
    for k in 1..10 {
        let s = 0.1 * k as f64;
        let r = form_regularity(&f, s, 2.0, &grid).unwrap();
        assert!((r.bands.iter().sum::<f64>() - r.integral).abs() <= 1e-10 * r.integral);
        assert!(r.integral >= last);
        last = r.integral;
    }
}

#[test]
fn time_profiles_have_their_thresholds() {
    let grid = unit_interval_grid(4096);
    let mk = |g: TimeProfile| {
        NonAutonomousForm::new(
            GelfandTriple::identity(1),
            Sampler::product(CMatrix::identity(1, 1), g, CMatrix::identity(1, 1)),
        )
        .unwrap()
        .on_interval(0.0, 1.0)
        .unwrap()
    };
    let step = mk(make_time_profile(0.5, 2.0, ProfileKind::Step, 0.0, 1.0).unwrap());
    assert!(form_regularity(&step, 0.4, 2.0, &grid).unwrap().looks_finite(0.05));
    assert!(!form_regularity(&step, 0.6, 2.0, &grid).unwrap().looks_finite(0.0));
    let cusp = mk(TimeProfile::Hoelder { theta: 0.7, center: 0.5 });
    assert!(form_regularity(&cusp, 0.65, 2.0, &grid).unwrap().looks_finite(0.5));
    // built for a threshold: θ = s − 1/p
    let built = make_time_profile(0.9, 2.0, ProfileKind::HoelderTheta, 0.0, 1.0).unwrap();
    assert_eq!(built, TimeProfile::Hoelder { theta: 0.4, center: 0.5 });
    let built = mk(built);
    assert!(form_regularity(&built, 0.7, 2.0, &grid).unwrap().looks_finite(0.1));
    assert!(!form_regularity(&built, 0.99, 2.0, &grid).unwrap().looks_finite(0.0));
    let flat = mk(TimeProfile::Constant { value: 2.0 });
    for &s in &[0.2, 0.9] {
        assert_eq!(form_regularity(&flat, s, 2.0, &grid).unwrap().seminorm, 0.0);
    }
    let weier = mk(make_time_profile(0.5, 2.0, ProfileKind::Weierstrass, 0.0, 1.0).unwrap());
    let lo = form_regularity(&weier, 0.3, 2.0, &grid).unwrap().fine_scale_slope();
    let hi = form_regularity(&weier, 0.7, 2.0, &grid).unwrap().fine_scale_slope();
    assert!(lo > 0.2 && hi < -0.2, "{lo} {hi}");
}

// ---------------------------------------------------------------- commutator

fn bump_family(d: usize) -> Sampler {
    Sampler::product(
        CMatrix::zeros(d, d),
        TimeProfile::Bump { center: 0.0, width: 4.0 },
        CMatrix::identity(d, d),
    )
}

#[test]
fn constant_family_has_zero_commutator() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grid = TimeGrid::new(256, 40.0).unwrap();
    let v = wave_packets(&mut rng, &grid, 2, 3.0);
    let g = Sampler::constant(rand_cmatrix(&mut rng, 2, 1.0));
    assert_eq!(commutator_integral(&g, &v, 0.5).unwrap(), 0.0);
}

#[test]
fn commutator_estimate_for_a_bump() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grid = TimeGrid::new(512, 40.0).unwrap();
    let g = bump_family(2);
    let recipe = commutator_constant(&g, &grid, 0.5, 0.1, default_delta0(0.5)).unwrap();
    let one = commutator_constant(&g, &grid, 0.5, 1.0, default_delta0(0.5)).unwrap();
    assert!(recipe.epsilon_used <= 0.1 * (1.0 + 1e-12) && recipe.h <= 1.0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let v = wave_packets(&mut rng, &grid, 2, 4.0);
        let r = commutator_check_with(&g, &v, &recipe, &one).unwrap();
        assert!(r.holds(0.0), "{r:?}");
        worst = worst.max(r.lhs / r.rhs);
    }
    assert!(worst > 0.0);
}

#[test]
fn commutator_sides_are_homogeneous() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let grid = TimeGrid::new(256, 40.0).unwrap();
    let g = bump_family(2);
    let v = wave_packets(&mut rng, &grid, 2, 3.0);
    let a = commutator_check(&g, &v, 0.25, 0.2).unwrap();
    let b = commutator_check(&g, &v.scale(c(2.0)), 0.25, 0.2).unwrap();
    assert!(rel(b.lhs, 2.0 * a.lhs) < 1e-12 && rel(b.rhs, 2.0 * a.rhs) < 1e-12);
}

/// Brute-force pair sum of `|g(t) − g(s)|² |v(s)|² k(t − s)` with the
/// periodized kernel, no diagonal correction.
fn raw_commutator(n: usize, seed: u64) -> f64 {
    let grid = TimeGrid::new(n, 40.0).unwrap();
    let v = wave_packets(&mut ChaCha8Rng::seed_from_u64(seed), &grid, 1, 1.0);
    let gv: Vec<f64> = grid.times().iter().map(|t| mreg_core::spectral::bump(t / 4.0)).collect();
    let h = grid.spacing();
    let ker: Vec<f64> = (0..n)
        .map(|lag| {
            (-400i64..=400)
                .map(|k| (lag as f64 * h + k as f64 * 40.0).abs().powf(-2.0))
                .filter(|x| x.is_finite())
                .sum()
        })
        .collect();
    let mut raw = 0.0;
    for s in 0..n {
        let w = v.at(s)[0].norm_sqr();
        for t in 0..n {
            if t != s {
                raw += (gv[t] - gv[s]).powi(2) * w * ker[(t + n - s) % n];
            }
        }
    }
    raw * h * h
}

#[test]
fn commutator_against_direct_oracle() {
    // γ = 1/2: the raw sum has an O(h) diagonal defect, removed by
    // Richardson extrapolation on two fine grids
    let oracle = 2.0 * raw_commutator(1024, 11) - raw_commutator(512, 11);
    let grid = TimeGrid::new(256, 40.0).unwrap();
    let v = wave_packets(&mut ChaCha8Rng::seed_from_u64(11), &grid, 1, 1.0);
    let got = commutator_integral(&bump_family(1), &v, 0.5).unwrap();
    assert!(rel(got, oracle) < 1e-3, "{got} vs {oracle}");
}

// ---------------------------------------------------------------- extension

#[test]
fn autonomous_form_is_unchanged_by_extension() {
    let a = CMatrix::identity(2, 2) * c(2.0);
    let f = NonAutonomousForm::new(GelfandTriple::identity(2), Sampler::constant(a.clone()))
        .unwrap()
        .on_interval(0.0, 1.0)
        .unwrap();
    let grid = unit_interval_grid(64);
    for mode in [LineExtension::Average, LineExtension::Constant { s: 0.75, p: 2.0 }] {
        let e = extend_form_to_line(&f, mode, &grid).unwrap();
        assert!(e.interval().is_none());
        for &t in &[-1.5, 0.5, 1.9] {
            assert_eq!(e.matrix(t), a);
        }
    }
}

#[test]
fn average_extension_keeps_the_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let grid = TimeGrid::new(256, 8.0).unwrap();
    for _ in 0..5 {
        let (_, f) = smooth_family(&mut rng, 3);
        let mut f = f.on_interval(0.0, 2.0).unwrap();
        let c0 = estimate_constants(&mut f, &grid).unwrap();
        let mut e = extend_form_to_line(&f, LineExtension::Average, &grid).unwrap();
        let c1 = estimate_constants(&mut e, &grid).unwrap();
        assert!(c1.bound_m <= c0.bound_m * (1.0 + 1e-12), "{c0:?} {c1:?}");
        assert!(c1.eta >= c0.eta * (1.0 - 1e-12));
        assert_eq!(c1.omega, 0.0);
    }
}

#[test]
fn constant_extension_is_bounded() {
    // one side: [E f]^p ≤ (1 + 2/(sp) · H^p)[f]^p with the Hardy constant
    // H = (1 + s − 1/p)/(s − 1/p); both sides compose two such maps
    let (s, p) = (0.75, 2.0);
    let hardy: f64 = (1.0 + s - 1.0 / p) / (s - 1.0 / p);
    let bound = 1.0 + 2.0 / (s * p) * hardy.powf(p);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let grid = TimeGrid::new(2048, 16.0).unwrap();
    for _ in 0..5 {
        let (_, f) = smooth_family(&mut rng, 2);
        let f = f.on_interval(0.0, 1.0).unwrap();
        let inner = form_regularity(&f, s, p, &grid).unwrap().integral;
        let e = extend_form_to_line(&f, LineExtension::Constant { s, p }, &grid).unwrap();
        for &t in &[-2.0, 3.0] {
            assert_eq!(e.matrix(t), f.matrix(t.clamp(0.0, 1.0)));
        }
        let wide = e.on_interval(-4.0, 5.0).unwrap();
        let outer = form_regularity(&wide, s, p, &grid).unwrap().integral;
        assert!(outer >= inner && outer <= bound * bound * inner, "{inner} {outer}");
    }
    let (_, f) = smooth_family(&mut rng, 2);
    let f = f.on_interval(0.0, 1.0).unwrap();
    assert!(extend_form_to_line(&f, LineExtension::Constant { s: 0.4, p: 2.0 }, &grid).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quasi_coercive_shift_restores_coercivity(seed in any::<u64>(), d in 2usize..5, neg in 0.1f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_spd(&mut rng, d, 50.0);
        let t = GelfandTriple::new(b.clone()).unwrap();
        // 𝔟 − neg·(·|·)_H − a skew part: not coercive when neg is large
        let skew = {
            let n = rand_cmatrix(&mut rng, d, 1.0);
            (&n - n.adjoint()) * c(0.5)
        };
        let a = real(&b) - CMatrix::identity(d, d) * c(neg * t.eigenvalues().max()) + skew;
        let grid = TimeGrid::new(8, 1.0).unwrap();
        let mut f = NonAutonomousForm::new(t, Sampler::constant(a)).unwrap();
        let k = estimate_constants(&mut f, &grid).unwrap();
        prop_assert!(k.eta > 0.0);
        let shifted = f.shifted(k.omega);
        let k2 = measure_constants(&shifted, &grid, 0.0).unwrap();
        prop_assert!(k2.omega == 0.0 && (k2.eta - k.eta).abs() <= 1e-9 * k.eta.max(1.0));
    }

    #[test]
    fn form_value_is_sesquilinear(seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (_, f) = smooth_family(&mut rng, 2);
        let g = TimeGrid::new(16, 4.0).unwrap();
        let op = assemble_spacetime(&f, &g).unwrap();
        let (u, v, w) = (rand_signal(&mut rng, &g, 2), rand_signal(&mut rng, &g, 2), rand_signal(&mut rng, &g, 2));
        let z = C64::new(re, im);
        let lhs = op.form_value(&u.scale(z).add(&v).unwrap(), &w).unwrap();
        let rhs = op.form_value(&u, &w).unwrap() * z + op.form_value(&v, &w).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
        let conj = op.form_value(&u, &w.scale(z)).unwrap();
        prop_assert!((conj - op.form_value(&u, &w).unwrap() * z.conj()).norm() <= 1e-12 * (1.0 + conj.norm()));
    }
}
