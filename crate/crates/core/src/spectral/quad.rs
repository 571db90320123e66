//! Adaptive Gauss–Kronrod quadrature on finite intervals.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub(crate) fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Integrates `f` over `[a, b]` to absolute tolerance `tol` by recursive
/// bisection of Gauss–Kronrod (7, 15) panels. Returns `(value, error estimate)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> (f64, f64) {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> (f64, f64) {
        let (v, e) = gk15(f, a, b);
        if e <= tol || depth == 0 || (b - a).abs() < 1e-14 {
            return (v, e);
        }
        let m = 0.5 * (a + b);
        let (v1, e1) = rec(f, a, m, 0.5 * tol, depth - 1);
        let (v2, e2) = rec(f, m, b, 0.5 * tol, depth - 1);
        (v1 + v2, e1 + e2)
    }
    rec(&f, a, b, tol, 40)
}

/// Composite Simpson rule for equally spaced samples. An even number of
/// samples closes with the 3/8 rule on the last three panels.
pub fn simpson(y: &[f64], h: f64) -> f64 {
    let m = y.len();
    match m {
        0 | 1 => 0.0,
        2 => 0.5 * h * (y[0] + y[1]),
        3 => h / 3.0 * (y[0] + 4.0 * y[1] + y[2]),
        _ => {
            let (simpson_end, tail) = if m % 2 == 1 {
                (m - 1, 0.0)
            } else {
                (m - 4, three_eighths(&y[m - 4..], h))
            };
            let mut s = y[0] + y[simpson_end];
            for (j, v) in y.iter().enumerate().take(simpson_end).skip(1) {
                s += if j % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            s * h / 3.0 + tail
        }
    }
}

/// Romberg extrapolation of the trapezoid rule on the sample grid. Needs
/// `2^k + 1` samples; other counts fall back to [`simpson`].
pub fn romberg(y: &[f64], h: f64) -> f64 {
    let m = y.len();
    if m < 3 || !(m - 1).is_power_of_two() {
        return simpson(y, h);
    }
    let panels = m - 1;
    let mut rows: Vec<f64> = Vec::new();
    let mut stride = panels;
    while stride >= 1 {
        let hs = h * stride as f64;
        let inner: f64 = (stride..panels).step_by(stride).map(|j| y[j]).sum();
        rows.push(hs * (0.5 * (y[0] + y[panels]) + inner));
        stride /= 2;
    }
    // rows[k] uses 2^k panels; extrapolate toward the finest
    let mut t = rows;
    let mut four = 4.0;
    while t.len() > 1 {
        t = t.windows(2).map(|w| (four * w[1] - w[0]) / (four - 1.0)).collect();
        four *= 4.0;
    }
    t[0]
}

fn three_eighths(y: &[f64], h: f64) -> f64 {
    3.0 * h / 8.0 * (y[0] + 3.0 * y[1] + 3.0 * y[2] + y[3])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_and_smooth_integrands() {
        let (v, _) = integrate(|x| x.powi(5) - 2.0 * x, 0.0, 2.0, 1e-13);
        assert!((v - (64.0 / 6.0 - 4.0)).abs() < 1e-12);
        let (v, _) = integrate(f64::exp, 0.0, 1.0, 1e-13);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_refines() {
        let (v, _) = integrate(|x: f64| x.powf(-0.5), 0.0, 1.0, 1e-10);
        assert!((v - 2.0).abs() < 1e-6);
    }

    #[test]
    fn romberg_on_a_stiff_exponential() {
        let h = 1.0 / 128.0;
        let y: Vec<f64> = (0..=128).map(|j| (-25.0 * j as f64 * h).exp()).collect();
        let exact = (1.0 - (-25.0f64).exp()) / 25.0;
        assert!((romberg(&y, h) - exact).abs() < 1e-10, "{}", romberg(&y, h) - exact);
        assert!((simpson(&y, h) - exact).abs() > 1e-9);
    }

    #[test]
    fn simpson_is_exact_on_cubics() {
        for m in [5usize, 6, 9, 10] {
            let h = 1.0 / (m - 1) as f64;
            let y: Vec<f64> = (0..m).map(|j| (j as f64 * h).powi(3)).collect();
            assert!((simpson(&y, h) - 0.25).abs() < 1e-14, "m = {m}");
        }
    }
}
