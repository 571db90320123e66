//! Zeta functions used for lag kernels and diagonal corrections.

/// B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (a+k)^{-s}` for `a > 0`, analytically
/// continued in `s` (any `s ≠ 1`), via Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    assert!(a > 0.0, "hurwitz_zeta needs a > 0");
    assert!((s - 1.0).abs() > 1e-14, "hurwitz_zeta has a pole at s = 1");
    const N: usize = 24;
    let mut sum = 0.0;
    for k in 0..N {
        sum += (a + k as f64).powf(-s);
    }
    let x = a + N as f64;
    sum += x.powf(1.0 - s) / (s - 1.0);
    sum += 0.5 * x.powf(-s);
    // rising factorial s(s+1)...(s+2j-2) / (2j)!
    let mut rising = s;
    let mut fact = 2.0;
    let mut xpow = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let term = b / fact * rising * xpow;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        let jj = (j + 1) as f64;
        rising *= (s + 2.0 * jj - 1.0) * (s + 2.0 * jj);
        fact *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
        xpow /= x * x;
    }
    sum
}

/// Riemann zeta on the real line, `s ≠ 1`.
pub fn riemann_zeta(s: f64) -> f64 {
    hurwitz_zeta(s, 1.0)
}

/// `Σ_{j∈ℤ} |r + jL|^{-s}` for `0 < r < L`, `s > 1`: the periodized power kernel.
pub fn periodized_power(r: f64, period: f64, s: f64) -> f64 {
    let x = r / period;
    period.powf(-s) * (hurwitz_zeta(s, x) + hurwitz_zeta(s, 1.0 - x))
}
