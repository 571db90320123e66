use nalgebra::DMatrix;
use rustfft::FftPlanner;

use super::TimeGrid;
use crate::error::{structural, MregError, Result};
use crate::gelfand::SpaceTag;
use crate::{CMatrix, C64};

/// Uniformly sampled vector-valued function of time.
///
/// Samples are stored time-major: `values[j * dim + i]` is coordinate `i`
/// at grid time `t_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    grid: TimeGrid,
    dim: usize,
    values: Vec<C64>,
    space: SpaceTag,
}

impl Signal {
    pub fn new(grid: TimeGrid, dim: usize, values: Vec<C64>, space: SpaceTag) -> Result<Self> {
        if dim == 0 {
            return structural("signal dimension must be positive");
        }
        if values.len() != grid.n_points() * dim {
            return structural(format!(
                "signal has {} values, expected {} × {}",
                values.len(),
                grid.n_points(),
                dim
            ));
        }
        if values
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(MregError::Data("signal contains non-finite samples".into()));
        }
        Ok(Self {
            grid,
            dim,
            values,
            space,
        })
    }

    pub fn zeros(grid: TimeGrid, dim: usize, space: SpaceTag) -> Self {
        let values = vec![C64::new(0.0, 0.0); grid.n_points() * dim];
        Self {
            grid,
            dim,
            values,
            space,
        }
    }

    /// Samples `f(t)` at every grid time; `f` writes `dim` coordinates.
    pub fn from_fn<F>(grid: TimeGrid, dim: usize, space: SpaceTag, mut f: F) -> Result<Self>
    where
        F: FnMut(f64, &mut [C64]),
    {
        let mut values = vec![C64::new(0.0, 0.0); grid.n_points() * dim];
        for (j, chunk) in values.chunks_mut(dim).enumerate() {
            f(grid.time(j), chunk);
        }
        Self::new(grid, dim, values, space)
    }

    /// Scalar real signal.
    pub fn scalar<F: Fn(f64) -> f64>(grid: TimeGrid, f: F) -> Result<Self> {
        Self::from_fn(grid, 1, SpaceTag::H, |t, out| out[0] = C64::new(f(t), 0.0))
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn space(&self) -> SpaceTag {
        self.space
    }

    pub fn with_space(mut self, space: SpaceTag) -> Self {
        self.space = space;
        self
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn at(&self, j: usize) -> &[C64] {
        &self.values[j * self.dim..(j + 1) * self.dim]
    }

    pub fn at_mut(&mut self, j: usize) -> &mut [C64] {
        &mut self.values[j * self.dim..(j + 1) * self.dim]
    }

    pub fn n_points(&self) -> usize {
        self.grid.n_points()
    }

    /// Copy of the signal with new sample values on the same grid.
    pub fn with_values(&self, values: Vec<C64>) -> Result<Self> {
        Self::new(self.grid.clone(), self.dim, values, self.space)
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|z| *z *= c);
        out
    }

    pub fn add(&self, other: &Signal) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (a, b) in out.values.iter_mut().zip(&other.values) {
            *a += b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Signal) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn check_compatible(&self, other: &Signal) -> Result<()> {
        if !self.grid.same_as(&other.grid) || self.dim != other.dim {
            return structural("signals live on different grids or dimensions");
        }
        Ok(())
    }

    /// Applies the same matrix at every time sample.
    pub fn apply_matrix(&self, m: &CMatrix) -> Result<Self> {
        if m.ncols() != self.dim {
            return structural(format!(
                "matrix with {} columns applied to dimension {}",
                m.ncols(),
                self.dim
            ));
        }
        let rows = m.nrows();
        let mut out = vec![C64::new(0.0, 0.0); self.n_points() * rows];
        for j in 0..self.n_points() {
            let x = self.at(j);
            for r in 0..rows {
                let mut acc = C64::new(0.0, 0.0);
                for (c, xc) in x.iter().enumerate() {
                    acc += m[(r, c)] * xc;
                }
                out[j * rows + r] = acc;
            }
        }
        Signal::new(self.grid.clone(), rows, out, self.space)
    }

    /// Multiplies every sample by the scalar `g(t_j)`.
    pub fn modulate<F: Fn(f64) -> C64>(&self, g: F) -> Self {
        let mut out = self.clone();
        let d = self.dim;
        for (j, chunk) in out.values.chunks_mut(d).enumerate() {
            let c = g(self.grid.time(j));
            chunk.iter_mut().for_each(|z| *z *= c);
        }
        out
    }

    /// `∫ ‖u(t)‖² dt` by the rectangle rule on the torus.
    pub fn l2_norm_sq(&self) -> f64 {
        self.grid.spacing() * self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `∫ ⟨u, v⟩ dt` with `⟨a, b⟩ = Σ a_i conj(b_i)`.
    pub fn l2_inner(&self, other: &Signal) -> Result<C64> {
        self.check_compatible(other)?;
        let s: C64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.grid.spacing())
    }

    /// Largest pointwise Euclidean norm.
    pub fn max_norm(&self) -> f64 {
        (0..self.n_points())
            .map(|j| self.at(j).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Restriction to samples `first..=last` as rows of a matrix (times × dim).
    pub fn window_matrix(&self, first: usize, last: usize) -> DMatrix<C64> {
        DMatrix::from_fn(last - first + 1, self.dim, |r, c| {
            self.values[(first + r) * self.dim + c]
        })
    }

    /// Fraction of the energy that sits in the outer `fraction` of the torus
    /// (both ends together). A small value means the signal has decayed
    /// before reaching the periodic boundary.
    pub fn boundary_energy_fraction(&self, fraction: f64) -> f64 {
        let n = self.n_points();
        let m = ((fraction * n as f64) / 2.0).ceil() as usize;
        let total: f64 = self.values.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return 0.0;
        }
        let edge: f64 = (0..n)
            .filter(|&j| j < m || j >= n - m)
            .map(|j| self.at(j).iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        edge / total
    }
}

/// Unnormalized DFT along time, returned frequency-major like the input.
pub fn forward(u: &Signal) -> Vec<C64> {
    transform(u.values(), u.n_points(), u.dim(), false)
}

/// Inverse of [`forward`] (including the `1/n` factor).
pub fn inverse(spec: &[C64], n: usize, dim: usize) -> Vec<C64> {
    let mut out = transform(spec, n, dim, true);
    let s = 1.0 / n as f64;
    out.iter_mut().for_each(|z| *z *= s);
    out
}

/// Unitary DFT: `‖û‖_{ℓ²} = ‖u‖_{ℓ²}`.
pub fn forward_unitary(u: &Signal) -> Vec<C64> {
    let mut s = forward(u);
    let c = 1.0 / (u.n_points() as f64).sqrt();
    s.iter_mut().for_each(|z| *z *= c);
    s
}

pub(crate) fn transform(data: &[C64], n: usize, dim: usize, inverse: bool) -> Vec<C64> {
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    // component-major buffer so the planner handles all columns in one call
    let mut buf = vec![C64::new(0.0, 0.0); n * dim];
    for j in 0..n {
        for i in 0..dim {
            buf[i * n + j] = data[j * dim + i];
        }
    }
    fft.process(&mut buf);
    let mut out = vec![C64::new(0.0, 0.0); n * dim];
    for i in 0..dim {
        for j in 0..n {
            out[j * dim + i] = buf[i * n + j];
        }
    }
    out
}
