use super::quad::gk15;
use crate::error::{domain, Result};

const TAIL_START: f64 = 1e6;

/// `C_α = 2 ∫_ℝ (1 − cos s)/|s|^{1+2α} ds`, the constant linking the
/// Gagliardo seminorm of order `α` to `‖∂^α u‖_{L²}`.
///
/// The even integrand is integrated on `(0, ∞)` and doubled. On `[0, 1]`
/// the Taylor series of `1 − cos` is integrated term by term, on
/// `[1, 10⁶]` the power part is exact and the cosine part is summed over
/// `π`-panels, beyond `10⁶` both parts are analytic.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("C_α is defined for α in (0,1), got {alpha}"));
    }
    let a = 1.0 + 2.0 * alpha;

    // Σ_{k≥1} (−1)^{k+1} / ((2k)! (2k − 2α))
    let mut near = 0.0;
    let mut fact = 1.0;
    for k in 1..30 {
        let kk = k as f64;
        fact *= (2.0 * kk - 1.0) * (2.0 * kk);
        let term = 1.0 / (fact * (2.0 * kk - 2.0 * alpha));
        near += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }

    let power = (1.0 - TAIL_START.powf(-2.0 * alpha)) / (2.0 * alpha);
    let f = |s: f64| s.cos() * s.powf(-a);
    let mut cosine = gk15(&f, 1.0, std::f64::consts::PI).0;
    let mut lo = std::f64::consts::PI;
    while lo < TAIL_START {
        let hi = (lo + std::f64::consts::PI).min(TAIL_START);
        cosine += gk15(&f, lo, hi).0;
        lo = hi;
    }

    let far = TAIL_START.powf(-2.0 * alpha) / (2.0 * alpha) - cos_tail(a, TAIL_START);
    Ok(4.0 * (near + power - cosine + far))
}

/// `∫_R^∞ cos(s) s^{−a} ds` by repeated integration by parts.
fn cos_tail(a: f64, r: f64) -> f64 {
    // I_c(a) = −sin R·R^{−a} + a·I_s(a+1),  I_s(a) = cos R·R^{−a} − a·I_c(a+1)
    let (sr, cr) = r.sin_cos();
    let mut total = 0.0;
    let mut coef = 1.0;
    let mut e = a;
    for k in 0..12 {
        // alternating pattern: −sin, +cos, +sin, −cos, ...
        let trig = match k % 4 {
            0 => -sr,
            1 => cr,
            2 => sr,
            _ => -cr,
        };
        total += coef * trig * r.powf(-e);
        coef *= e;
        e += 1.0;
    }
    total
}
