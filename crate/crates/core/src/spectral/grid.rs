use serde::{Deserialize, Serialize};

use crate::error::{structural, Result};

/// Uniform periodic grid on `[-L/2, L/2)` with an optional physical window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    n_points: usize,
    period: f64,
    window: Option<Window>,
}

/// Sub-interval `[a, b]` of the torus whose endpoints are grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub start: f64,
    pub end: f64,
    /// Index of `start`.
    pub first: usize,
    /// Index of `end` (inclusive).
    pub last: usize,
}

impl Window {
    pub fn len(&self) -> f64 {
        self.end - self.start
    }

    pub fn n_samples(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn contains_index(&self, j: usize) -> bool {
        j >= self.first && j <= self.last
    }
}

impl TimeGrid {
    pub fn new(n_points: usize, period: f64) -> Result<Self> {
        if n_points < 2 || !n_points.is_power_of_two() {
            return structural(format!("grid size {n_points} must be a power of two ≥ 2"));
        }
        if !(period.is_finite() && period > 0.0) {
            return structural(format!("period {period} must be positive"));
        }
        Ok(Self {
            n_points,
            period,
            window: None,
        })
    }

    /// Attaches the window `[a, b]`. Both endpoints must be grid points and
    /// the torus must leave at least `b - a` of room on either side.
    pub fn with_window(mut self, a: f64, b: f64) -> Result<Self> {
        if !(b > a) {
            return structural(format!("window [{a}, {b}] is empty"));
        }
        let h = self.spacing();
        let idx = |t: f64| -> Result<usize> {
            let x = (t + 0.5 * self.period) / h;
            let r = x.round();
            if (x - r).abs() > 1e-6 || r < 0.0 || r >= self.n_points as f64 {
                return structural(format!("window endpoint {t} is not a grid point"));
            }
            Ok(r as usize)
        };
        let first = idx(a)?;
        let last = idx(b)?;
        let width = b - a;
        let tol = 1e-9 * self.period;
        if a - (-0.5 * self.period) < width - tol || 0.5 * self.period - b < width - tol {
            return structural(format!(
                "window [{a}, {b}] needs padding ≥ {width} inside the torus of length {}",
                self.period
            ));
        }
        self.window = Some(Window {
            start: a,
            end: b,
            first,
            last,
        });
        Ok(self)
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.n_points as f64
    }

    pub fn window(&self) -> Option<&Window> {
        self.window.as_ref()
    }

    pub fn time(&self, j: usize) -> f64 {
        -0.5 * self.period + j as f64 * self.spacing()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.time(j)).collect()
    }

    /// Nearest grid index to `t` (no wrap-around).
    pub fn index_of(&self, t: f64) -> usize {
        let x = ((t + 0.5 * self.period) / self.spacing()).round();
        x.clamp(0.0, (self.n_points - 1) as f64) as usize
    }

    /// Signed integer frequency of DFT slot `k`.
    pub fn wavenumber(&self, k: usize) -> i64 {
        if k < self.n_points / 2 {
            k as i64
        } else {
            k as i64 - self.n_points as i64
        }
    }

    /// Angular frequency `ξ_k = 2πk/L` of DFT slot `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        2.0 * std::f64::consts::PI * self.wavenumber(k) as f64 / self.period
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.frequency(k)).collect()
    }

    /// Frequency spacing `2π/L`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.period
    }

    pub fn same_as(&self, other: &TimeGrid) -> bool {
        self.n_points == other.n_points && (self.period - other.period).abs() <= 1e-12 * self.period
    }
}
