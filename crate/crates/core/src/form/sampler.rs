//! Time-dependent matrices `t ↦ A(t)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::profile::TimeProfile;
use crate::error::{structural, Result};
use crate::{CMatrix, C64};

type MatrixFn = dyn Fn(f64) -> CMatrix + Send + Sync;

/// Arbitrary closure sampler; not serializable.
#[derive(Clone)]
pub struct CustomSampler {
    pub rows: usize,
    pub cols: usize,
    f: Arc<MatrixFn>,
}

impl CustomSampler {
    pub fn new<F>(rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(f64) -> CMatrix + Send + Sync + 'static,
    {
        Self {
            rows,
            cols,
            f: Arc::new(f),
        }
    }
}

impl fmt::Debug for CustomSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomSampler({}×{})", self.rows, self.cols)
    }
}

/// A matrix family sampled at arbitrary times. Must be a pure function of
/// `t`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Sampler {
    Constant { matrix: CMatrix },
    /// `Σ_k t^k A_k`.
    Polynomial { coefficients: Vec<CMatrix> },
    /// `pieces[i]` on `[breaks[i−1], breaks[i])`.
    Piecewise { breaks: Vec<f64>, pieces: Vec<Sampler> },
    /// `A₀ + g(t) A₁`.
    Product {
        base: CMatrix,
        profile: TimeProfile,
        coefficient: CMatrix,
    },
    Sum { terms: Vec<Sampler> },
    /// `inner` on `[start, end]`; outside either `inner` at the nearer end
    /// (`outside = None`) or a fixed matrix.
    Extended {
        inner: Box<Sampler>,
        start: f64,
        end: f64,
        outside: Option<CMatrix>,
    },
    #[serde(skip)]
    Custom(CustomSampler),
}

impl Sampler {
    pub fn constant(matrix: CMatrix) -> Self {
        Sampler::Constant { matrix }
    }

    pub fn product(base: CMatrix, profile: TimeProfile, coefficient: CMatrix) -> Self {
        Sampler::Product {
            base,
            profile,
            coefficient,
        }
    }

    pub fn custom<F>(rows: usize, cols: usize, f: F) -> Self
    where
        F: Fn(f64) -> CMatrix + Send + Sync + 'static,
    {
        Sampler::Custom(CustomSampler::new(rows, cols, f))
    }

    /// `(rows, cols)`.
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Sampler::Constant { matrix } => matrix.shape(),
            Sampler::Polynomial { coefficients } => coefficients[0].shape(),
            Sampler::Piecewise { pieces, .. } => pieces[0].shape(),
            Sampler::Product { base, .. } => base.shape(),
            Sampler::Sum { terms } => terms[0].shape(),
            Sampler::Extended { inner, .. } => inner.shape(),
            Sampler::Custom(c) => (c.rows, c.cols),
        }
    }

    /// Checks that every part has the same shape.
    pub fn validate(&self) -> Result<()> {
        let shape = self.shape();
        let ok = |m: &CMatrix| m.shape() == shape;
        let fine = match self {
            Sampler::Constant { .. } | Sampler::Custom(_) => true,
            Sampler::Polynomial { coefficients } => {
                !coefficients.is_empty() && coefficients.iter().all(ok)
            }
            Sampler::Piecewise { breaks, pieces } => {
                if pieces.len() != breaks.len() + 1 || breaks.windows(2).any(|w| w[0] >= w[1]) {
                    return structural("piecewise sampler needs increasing breaks and one more piece");
                }
                for p in pieces {
                    p.validate()?;
                }
                pieces.iter().all(|p| p.shape() == shape)
            }
            Sampler::Product {
                base, coefficient, ..
            } => ok(base) && ok(coefficient),
            Sampler::Sum { terms } => {
                for t in terms {
                    t.validate()?;
                }
                !terms.is_empty() && terms.iter().all(|t| t.shape() == shape)
            }
            Sampler::Extended { inner, outside, .. } => {
                inner.validate()?;
                outside.as_ref().map_or(true, ok)
            }
        };
        if fine {
            Ok(())
        } else {
            structural("sampler parts have mismatched shapes")
        }
    }

    pub fn matrix(&self, t: f64) -> CMatrix {
        match self {
            Sampler::Constant { matrix } => matrix.clone(),
            Sampler::Polynomial { coefficients } => {
                let mut acc = CMatrix::zeros(coefficients[0].nrows(), coefficients[0].ncols());
                for c in coefficients.iter().rev() {
                    acc = acc * C64::new(t, 0.0) + c;
                }
                acc
            }
            Sampler::Piecewise { breaks, pieces } => {
                let i = breaks.partition_point(|&b| b <= t);
                pieces[i].matrix(t)
            }
            Sampler::Product {
                base,
                profile,
                coefficient,
            } => base + coefficient * C64::new(profile.eval(t), 0.0),
            Sampler::Sum { terms } => {
                let mut acc = terms[0].matrix(t);
                for s in &terms[1..] {
                    acc += s.matrix(t);
                }
                acc
            }
            Sampler::Extended {
                inner,
                start,
                end,
                outside,
            } => {
                if t >= *start && t <= *end {
                    inner.matrix(t)
                } else {
                    match outside {
                        Some(m) => m.clone(),
                        None => inner.matrix(t.clamp(*start, *end)),
                    }
                }
            }
            Sampler::Custom(c) => (c.f)(t),
        }
    }

    /// `A(t) v` without forming `A(t)` when the structure allows it.
    pub fn apply(&self, t: f64, v: &[C64], out: &mut [C64]) {
        match self {
            Sampler::Constant { matrix } => matvec(matrix, v, out),
            Sampler::Product {
                base,
                profile,
                coefficient,
            } => {
                matvec(base, v, out);
                let g = profile.eval(t);
                if g != 0.0 {
                    let mut tmp = vec![C64::new(0.0, 0.0); out.len()];
                    matvec(coefficient, v, &mut tmp);
                    out.iter_mut().zip(&tmp).for_each(|(o, x)| *o += x * g);
                }
            }
            Sampler::Sum { terms } => {
                terms[0].apply(t, v, out);
                let mut tmp = vec![C64::new(0.0, 0.0); out.len()];
                for s in &terms[1..] {
                    s.apply(t, v, &mut tmp);
                    out.iter_mut().zip(&tmp).for_each(|(o, x)| *o += x);
                }
            }
            Sampler::Piecewise { breaks, pieces } => {
                let i = breaks.partition_point(|&b| b <= t);
                pieces[i].apply(t, v, out)
            }
            Sampler::Extended {
                inner,
                start,
                end,
                outside,
            } => {
                if t >= *start && t <= *end {
                    inner.apply(t, v, out)
                } else {
                    match outside {
                        Some(m) => matvec(m, v, out),
                        None => inner.apply(t.clamp(*start, *end), v, out),
                    }
                }
            }
            _ => matvec(&self.matrix(t), v, out),
        }
    }

    /// `(A₀, A₁, g)` when the family is `A₀ + g(t)A₁`.
    pub fn as_separable(&self) -> Option<(&CMatrix, &CMatrix, &TimeProfile)> {
        match self {
            Sampler::Product {
                base,
                profile,
                coefficient,
            } => Some((base, coefficient, profile)),
            _ => None,
        }
    }

    /// `A(t) + ω I`.
    pub fn shifted(&self, omega: f64) -> Sampler {
        if omega == 0.0 {
            return self.clone();
        }
        let (r, c) = self.shape();
        let id = CMatrix::identity(r, c) * C64::new(omega, 0.0);
        match self {
            Sampler::Constant { matrix } => Sampler::constant(matrix + id),
            Sampler::Product {
                base,
                profile,
                coefficient,
            } => Sampler::product(base + id, profile.clone(), coefficient.clone()),
            _ => Sampler::Sum {
                terms: vec![self.clone(), Sampler::constant(id)],
            },
        }
    }

    /// Whether `A(t)` is the same for every `t`.
    pub fn is_autonomous(&self) -> bool {
        match self {
            Sampler::Constant { .. } => true,
            Sampler::Polynomial { coefficients } => {
                coefficients[1..].iter().all(|c| c.iter().all(|z| *z == C64::new(0.0, 0.0)))
            }
            Sampler::Product {
                profile,
                coefficient,
                ..
            } => {
                matches!(profile, TimeProfile::Constant { .. })
                    || coefficient.iter().all(|z| *z == C64::new(0.0, 0.0))
            }
            Sampler::Sum { terms } => terms.iter().all(Sampler::is_autonomous),
            Sampler::Extended { inner, outside, .. } => inner.is_autonomous() && outside.is_none(),
            _ => false,
        }
    }
}

pub(crate) fn matvec(m: &CMatrix, v: &[C64], out: &mut [C64]) {
    let (r, c) = m.shape();
    debug_assert!(v.len() == c && out.len() == r);
    out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
    // column-major storage: accumulate column by column
    for (k, vk) in v.iter().enumerate() {
        if *vk == C64::new(0.0, 0.0) {
            continue;
        }
        let col = &m.as_slice()[k * r..(k + 1) * r];
        out.iter_mut().zip(col).for_each(|(o, a)| *o += a * vk);
    }
}
