//! Scalar time profiles `g(t)` for separable families `A₀ + g(t)A₁`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::spectral::bump;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    Constant { value: f64 },
    /// `|t − center|^θ`.
    Hoelder { theta: f64, center: f64 },
    /// `Σ_{j ≤ terms} 2^{−js} cos(2^j π (t − origin) / period)`.
    Weierstrass { s: f64, origin: f64, period: f64, terms: u32 },
    /// Indicator of `[at, ∞)`.
    Step { at: f64 },
    /// `amplitude · sin(ωt + phase)`.
    Sine { amplitude: f64, omega: f64, phase: f64 },
    /// `bump((t − center)/width)`, supported in `|t − center| < width`.
    Bump { center: f64, width: f64 },
    /// `offset + scale · inner(t)`.
    Affine { offset: f64, scale: f64, inner: Box<TimeProfile> },
    /// `inner` on `[start, end]`; outside either the boundary value
    /// (`outside = None`) or the given constant.
    Extended {
        inner: Box<TimeProfile>,
        start: f64,
        end: f64,
        outside: Option<f64>,
    },
}

/// Family used by [`make_time_profile`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    HoelderTheta,
    Weierstrass,
    Step,
}

impl TimeProfile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            TimeProfile::Constant { value } => *value,
            TimeProfile::Hoelder { theta, center } => (t - center).abs().powf(*theta),
            TimeProfile::Weierstrass {
                s,
                origin,
                period,
                terms,
            } => {
                let x = std::f64::consts::PI * (t - origin) / period;
                (0..=*terms)
                    .map(|j| {
                        let f = (j as f64).exp2();
                        (f * x).cos() / f.powf(*s)
                    })
                    .sum()
            }
            TimeProfile::Step { at } => {
                if t >= *at {
                    1.0
                } else {
                    0.0
                }
            }
            TimeProfile::Sine {
                amplitude,
                omega,
                phase,
            } => amplitude * (omega * t + phase).sin(),
            TimeProfile::Bump { center, width } => bump((t - center) / width),
            TimeProfile::Affine {
                offset,
                scale,
                inner,
            } => offset + scale * inner.eval(t),
            TimeProfile::Extended {
                inner,
                start,
                end,
                outside,
            } => {
                if t >= *start && t <= *end {
                    inner.eval(t)
                } else {
                    match outside {
                        Some(c) => *c,
                        None => inner.eval(t.clamp(*start, *end)),
                    }
                }
            }
        }
    }

    /// `(min, max)` of `g` over the given times.
    pub fn range(&self, times: &[f64]) -> (f64, f64) {
        times.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
            let g = self.eval(t);
            (lo.min(g), hi.max(g))
        })
    }

    pub fn affine(self, offset: f64, scale: f64) -> TimeProfile {
        TimeProfile::Affine {
            offset,
            scale,
            inner: Box::new(self),
        }
    }
}

/// A profile on `[start, end]` whose `W̊^{s,p}` seminorm is finite for
/// `s < s_target` and dyadically divergent above it.
///
/// - `HoelderTheta`: cusp `|t − mid|^θ` with `θ = s_target − 1/p`.
/// - `Weierstrass`: lacunary series of index `s_target`, truncated once
///   `2^{−J s} < 1e−6`; the threshold does not depend on `p`.
/// - `Step`: jump at the midpoint; its threshold is `1/p`, so
///   `s_target` must equal `1/p`.
pub fn make_time_profile(
    s_target: f64,
    p_target: f64,
    kind: ProfileKind,
    start: f64,
    end: f64,
) -> Result<TimeProfile> {
    if !(s_target > 0.0 && s_target < 1.0) {
        return domain(format!("target index {s_target} outside (0, 1)"));
    }
    if !(p_target >= 1.0 && p_target.is_finite()) {
        return domain(format!("integrability {p_target} must be finite and ≥ 1"));
    }
    if !(end > start) {
        return domain(format!("empty interval [{start}, {end}]"));
    }
    let mid = 0.5 * (start + end);
    match kind {
        ProfileKind::HoelderTheta => {
            let theta = s_target - 1.0 / p_target;
            if !(theta > 0.0) {
                return domain(format!(
                    "a cusp cannot reach s = {s_target} at p = {p_target} (needs s > 1/p)"
                ));
            }
            Ok(TimeProfile::Hoelder { theta, center: mid })
        }
        ProfileKind::Weierstrass => {
            let terms = (1e6f64.log2() / s_target).ceil() as u32;
            Ok(TimeProfile::Weierstrass {
                s: s_target,
                origin: start,
                period: end - start,
                terms,
            })
        }
        ProfileKind::Step => {
            if (s_target - 1.0 / p_target).abs() > 1e-12 {
                return domain(format!(
                    "a step has threshold 1/p = {}, not {s_target}",
                    1.0 / p_target
                ));
            }
            Ok(TimeProfile::Step { at: mid })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weierstrass_truncation_and_bounds() {
        let g = make_time_profile(0.5, 2.0, ProfileKind::Weierstrass, 0.0, 1.0).unwrap();
        let TimeProfile::Weierstrass { terms, .. } = g else {
            panic!()
        };
        assert!((terms as f64 * 0.5).exp2() > 1e6);
        assert!((g.eval(0.0) - (0..=terms).map(|j| 0.5f64.powf(0.5 * j as f64)).sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn extension_modes() {
        let g = TimeProfile::Extended {
            inner: Box::new(TimeProfile::Sine {
                amplitude: 1.0,
                omega: 1.0,
                phase: 0.0,
            }),
            start: 0.0,
            end: 1.0,
            outside: None,
        };
        assert_eq!(g.eval(-3.0), 0.0);
        assert_eq!(g.eval(5.0), 1f64.sin());
        assert!(make_time_profile(0.6, 2.0, ProfileKind::Step, 0.0, 1.0).is_err());
        assert!(make_time_profile(0.4, 2.0, ProfileKind::HoelderTheta, 0.0, 1.0).is_err());
    }
}
