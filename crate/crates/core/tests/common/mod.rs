#![allow(dead_code)]

use mreg_core::gelfand::SpaceTag;
use mreg_core::spectral::{Signal, TimeGrid};
use mreg_core::C64;
use rand::Rng;

/// Sum of Gaussian-windowed cosines, decayed well before the torus edge
/// when the grid period is at least 40.
pub fn wave_packets<R: Rng>(rng: &mut R, grid: &TimeGrid, dim: usize, max_freq: f64) -> Signal {
    let terms: Vec<(usize, f64, f64, f64, f64, f64)> = (0..4 * dim)
        .map(|i| {
            (
                i % dim,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-4.0..4.0),
                rng.gen_range(0.8..2.0),
                rng.gen_range(0.0..max_freq),
                rng.gen_range(0.0..6.3),
            )
        })
        .collect();
    Signal::from_fn(grid.clone(), dim, SpaceTag::H, |t, out| {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for &(i, a, c, w, om, ph) in &terms {
            let env = (-(t - c).powi(2) / (2.0 * w * w)).exp();
            out[i] += C64::new(
                a * env * (om * t + ph).cos(),
                0.5 * a * env * (om * t).sin(),
            );
        }
    })
    .unwrap()
}

/// Random trigonometric polynomial with grid frequencies `|k| ≤ kmax`.
/// Returns the signal and its coefficients `(k, c)`.
pub fn trig_poly<R: Rng>(
    rng: &mut R,
    grid: &TimeGrid,
    dim: usize,
    kmax: i64,
) -> (Signal, Vec<(i64, Vec<C64>)>) {
    let coeffs: Vec<(i64, Vec<C64>)> = (-kmax..=kmax)
        .map(|k| {
            let c = (0..dim)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            (k, c)
        })
        .collect();
    let l = grid.period();
    let s = Signal::from_fn(grid.clone(), dim, SpaceTag::H, |t, out| {
        out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (k, c) in &coeffs {
            let e = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * *k as f64 * t / l);
            for i in 0..dim {
                out[i] += c[i] * e;
            }
        }
    })
    .unwrap();
    (s, coeffs)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
