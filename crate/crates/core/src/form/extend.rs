//! Extension of a form on `I = [a, b]` to the whole line.

use serde::{Deserialize, Serialize};

use super::{NonAutonomousForm, Sampler, Split, TimeProfile};
use crate::error::{domain, structural, Result};
use crate::spectral::TimeGrid;
use crate::{CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum LineExtension {
    /// Off `I` the form is its time average over `I`.
    Average,
    /// Off `I` the form is frozen at the nearer end. Only meaningful in
    /// `W̊^{s,p}` with `sp > 1`, where the family is continuous.
    Constant { s: f64, p: f64 },
}

/// The form on the line. Averages use the trapezoid rule on the grid
/// times inside `I`; the split parts are extended separately, and a `β = 0`
/// perturbation is extended by zero in constant mode.
pub fn extend_form_to_line(
    f: &NonAutonomousForm,
    mode: LineExtension,
    grid: &TimeGrid,
) -> Result<NonAutonomousForm> {
    let (a, b) = match f.interval() {
        Some(i) => i,
        None => return structural("the form has no interval to extend from"),
    };
    if let LineExtension::Constant { s, p } = mode {
        if !(s * p > 1.0) {
            return domain(format!(
                "constant extension needs s·p > 1 (got s = {s}, p = {p})"
            ));
        }
    }
    let times = f.sample_times(grid);
    if times.len() < 2 {
        return structural("fewer than two grid times inside the interval");
    }
    let ext = |s: &Sampler, zero_outside: bool| -> Sampler {
        if s.is_autonomous() {
            return s.clone();
        }
        match mode {
            LineExtension::Average => average_extension(s, a, b, &times),
            LineExtension::Constant { .. } if zero_outside => {
                let (r, c) = s.shape();
                Sampler::Extended {
                    inner: Box::new(s.clone()),
                    start: a,
                    end: b,
                    outside: Some(CMatrix::zeros(r, c)),
                }
            }
            LineExtension::Constant { .. } => clamp_extension(s, a, b),
        }
    };
    let split = f.split().map(|sp| Split {
        a1: ext(&sp.a1, false),
        a2: ext(&sp.a2, sp.beta == 0.0),
        alpha: sp.alpha,
        beta: sp.beta,
    });
    let sampler = match &split {
        Some(sp) => Sampler::Sum {
            terms: vec![sp.a1.clone(), sp.a2.clone()],
        },
        None => ext(f.sampler(), false),
    };
    Ok(f.with_samplers(sampler, split))
}

fn trapezoid_mean<F: Fn(f64) -> f64>(g: F, times: &[f64]) -> f64 {
    let m = times.len();
    let s: f64 = times
        .iter()
        .enumerate()
        .map(|(j, &t)| if j == 0 || j == m - 1 { 0.5 } else { 1.0 } * g(t))
        .sum();
    s / (m - 1) as f64
}

fn average_extension(s: &Sampler, a: f64, b: f64, times: &[f64]) -> Sampler {
    if let Some((a0, a1, g)) = s.as_separable() {
        let mean = trapezoid_mean(|t| g.eval(t), times);
        return Sampler::product(
            a0.clone(),
            TimeProfile::Extended {
                inner: Box::new(g.clone()),
                start: a,
                end: b,
                outside: Some(mean),
            },
            a1.clone(),
        );
    }
    let m = times.len();
    let (r, c) = s.shape();
    let mut avg = CMatrix::zeros(r, c);
    for (j, &t) in times.iter().enumerate() {
        let w = if j == 0 || j == m - 1 { 0.5 } else { 1.0 };
        avg += s.matrix(t) * C64::new(w, 0.0);
    }
    avg /= C64::new((m - 1) as f64, 0.0);
    Sampler::Extended {
        inner: Box::new(s.clone()),
        start: a,
        end: b,
        outside: Some(avg),
    }
}

fn clamp_extension(s: &Sampler, a: f64, b: f64) -> Sampler {
    if let Some((a0, a1, g)) = s.as_separable() {
        return Sampler::product(
            a0.clone(),
            TimeProfile::Extended {
                inner: Box::new(g.clone()),
                start: a,
                end: b,
                outside: None,
            },
            a1.clone(),
        );
    }
    Sampler::Extended {
        inner: Box::new(s.clone()),
        start: a,
        end: b,
        outside: None,
    }
}
