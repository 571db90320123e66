//! One-dimensional model problems as [`NonAutonomousForm`] instances.
//!
//! - [`build_elliptic_1d`]: `u′ − (a(t,x)u_x)_x = f` on `(0,1)` with Dirichlet
//!   conditions, P1 elements.
//! - [`build_system_1d`]: the same for two components coupled through
//!   `a^{lm}(t,x)`, under the Legendre–Hadamard condition.
//! - [`build_frac_laplacian_1d`]: the kernel form
//!   `∫∫ K(t,x,y)(v(x)−v(y))(w(x)−w(y))^* |x−y|^{−1−2β}` on the unit torus.
//!
//! Coordinates are chosen so that `H = L²` is Euclidean.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, structural, MregError, Result};
use crate::form::{NonAutonomousForm, Sampler, TimeProfile};
use crate::gelfand::GelfandTriple;
use crate::spectral::special::riemann_zeta;
use crate::{CMatrix, C64};

/// Spatial profile on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceProfile {
    Constant { value: f64 },
    /// `mean + amplitude · cos(2π waves x)`.
    Cosine { mean: f64, amplitude: f64, waves: f64 },
    /// Linear interpolation of values at uniform nodes `j/(len−1)`.
    Table { values: Vec<f64> },
}

impl SpaceProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SpaceProfile::Constant { value } => *value,
            SpaceProfile::Cosine {
                mean,
                amplitude,
                waves,
            } => mean + amplitude * (2.0 * std::f64::consts::PI * waves * x).cos(),
            SpaceProfile::Table { values } => interp_uniform(values, x),
        }
    }
}

/// Symmetric kernel profile on the unit torus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelProfile {
    Constant { value: f64 },
    /// `mean + amplitude · cos(2π waves x) cos(2π waves y)`.
    Cosine { mean: f64, amplitude: f64, waves: f64 },
    /// Row-major `n × n` values at the torus nodes `i/n`; `n` must equal the
    /// grid size.
    Table { values: Vec<f64> },
}

impl KernelProfile {
    fn matrix(&self, n: usize) -> Result<DMatrix<f64>> {
        let x = |i: usize| i as f64 / n as f64;
        let m = match self {
            KernelProfile::Constant { value } => DMatrix::from_element(n, n, *value),
            KernelProfile::Cosine {
                mean,
                amplitude,
                waves,
            } => {
                let c = |t: f64| (2.0 * std::f64::consts::PI * waves * t).cos();
                DMatrix::from_fn(n, n, |i, j| mean + amplitude * c(x(i)) * c(x(j)))
            }
            KernelProfile::Table { values } => {
                if values.len() != n * n {
                    return structural(format!(
                        "kernel table has {} entries, the grid needs {n}×{n}",
                        values.len()
                    ));
                }
                DMatrix::from_row_slice(n, n, values)
            }
        };
        let scale = m.amax().max(1.0);
        if (&m - m.transpose()).amax() > 1e-12 * scale {
            return Err(MregError::Data("kernel is not symmetric in (x, y)".into()));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldKind {
    /// `a(t,x) = base(x) + g(t) coefficient(x)`.
    Separable {
        base: SpaceProfile,
        profile: TimeProfile,
        coefficient: SpaceProfile,
    },
    /// `a(t_k, ·)` given as uniform-node tables; linear in `t` between the
    /// `times`, constant outside.
    Tabulated { times: Vec<f64>, values: Vec<Vec<f64>> },
    /// `K(t,x,y) = base(x,y) + g(t) coefficient(x,y)`.
    Kernel {
        base: KernelProfile,
        profile: TimeProfile,
        coefficient: KernelProfile,
    },
    /// `K(t_k, x_i, y_j)` tables (row-major), linear in `t`.
    KernelTable { times: Vec<f64>, values: Vec<Vec<f64>> },
}

/// A coefficient `a(t,x)` or kernel `K(t,x,y)` with declared bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub kind: FieldKind,
    /// `[lo, hi]`; sampled values must stay inside.
    pub bounds: (f64, f64),
    /// Time range over which a separable profile is sampled for the bound check.
    pub span: (f64, f64),
}

/// Number of times sampled when bounding a profile.
const PROFILE_SAMPLES: usize = 4097;

impl CoefficientField {
    pub fn constant(value: f64) -> Self {
        Self::separable(
            SpaceProfile::Constant { value },
            TimeProfile::Constant { value: 0.0 },
            SpaceProfile::Constant { value: 0.0 },
            (value, value),
            (0.0, 1.0),
        )
    }

    pub fn separable(
        base: SpaceProfile,
        profile: TimeProfile,
        coefficient: SpaceProfile,
        bounds: (f64, f64),
        span: (f64, f64),
    ) -> Self {
        Self {
            kind: FieldKind::Separable {
                base,
                profile,
                coefficient,
            },
            bounds,
            span,
        }
    }

    pub fn kernel_constant(value: f64) -> Self {
        Self {
            kind: FieldKind::Kernel {
                base: KernelProfile::Constant { value },
                profile: TimeProfile::Constant { value: 0.0 },
                coefficient: KernelProfile::Constant { value: 0.0 },
            },
            bounds: (value, value),
            span: (0.0, 1.0),
        }
    }

    fn is_kernel(&self) -> bool {
        matches!(self.kind, FieldKind::Kernel { .. } | FieldKind::KernelTable { .. })
    }

    fn profile_range(&self, g: &TimeProfile) -> (f64, f64) {
        let (a, b) = self.span;
        let times: Vec<f64> = (0..PROFILE_SAMPLES)
            .map(|k| a + (b - a) * k as f64 / (PROFILE_SAMPLES - 1) as f64)
            .collect();
        g.range(&times)
    }

    fn check_value(&self, v: f64, what: &str) -> Result<()> {
        let (lo, hi) = self.bounds;
        let tol = 1e-12 * lo.abs().max(hi.abs()).max(1.0);
        if !v.is_finite() {
            return Err(MregError::Data(format!("{what}: non-finite coefficient")));
        }
        if v < lo - tol {
            return Err(MregError::Data(format!("{what}: coefficient {v} below the bound {lo}")));
        }
        if v > hi + tol {
            return Err(MregError::Data(format!("{what}: coefficient {v} above the bound {hi}")));
        }
        Ok(())
    }

    fn check_bounds_shape(&self, positive: bool) -> Result<()> {
        let (lo, hi) = self.bounds;
        if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
            return domain(format!("coefficient bounds [{lo}, {hi}] are not an interval"));
        }
        if positive && !(lo > 0.0) {
            return domain(format!("coefficient lower bound {lo} must be positive"));
        }
        if !(self.span.1 > self.span.0) {
            return domain(format!("empty time span {:?}", self.span));
        }
        Ok(())
    }
}

fn interp_uniform(values: &[f64], x: f64) -> f64 {
    match values.len() {
        0 => f64::NAN,
        1 => values[0],
        n => {
            let s = x.clamp(0.0, 1.0) * (n - 1) as f64;
            let i = (s.floor() as usize).min(n - 2);
            let w = s - i as f64;
            (1.0 - w) * values[i] + w * values[i + 1]
        }
    }
}

/// Builds the sampler of a point field from a spatial assembler.
///
/// Time-tabulated fields become piecewise-linear samplers, which keeps the
/// instance serializable.
fn point_sampler(
    c: &CoefficientField,
    quad_points: &[f64],
    assemble: &dyn Fn(&dyn Fn(f64) -> f64) -> CMatrix,
) -> Result<Sampler> {
    match &c.kind {
        FieldKind::Separable {
            base,
            profile,
            coefficient,
        } => {
            let (glo, ghi) = c.profile_range(profile);
            for &x in quad_points {
                for g in [glo, ghi] {
                    c.check_value(base.eval(x) + g * coefficient.eval(x), "quadrature point")?;
                }
            }
            let a0 = assemble(&|x| base.eval(x));
            if matches!(profile, TimeProfile::Constant { .. }) || is_zero(coefficient) {
                let g = profile.eval(0.0);
                let a1 = assemble(&|x| coefficient.eval(x));
                return Ok(Sampler::constant(a0 + a1 * C64::new(g, 0.0)));
            }
            Ok(Sampler::product(a0, profile.clone(), assemble(&|x| coefficient.eval(x))))
        }
        FieldKind::Tabulated { times, values } => {
            check_times(times, values.len())?;
            for (k, row) in values.iter().enumerate() {
                if row.is_empty() {
                    return structural(format!("empty coefficient table at time index {k}"));
                }
                for &x in quad_points {
                    c.check_value(interp_uniform(row, x), "quadrature point")?;
                }
            }
            let mats: Vec<CMatrix> = values
                .iter()
                .map(|row| assemble(&|x| interp_uniform(row, x)))
                .collect();
            Ok(piecewise_linear(times, mats))
        }
        _ => structural("a kernel field cannot be used as a pointwise coefficient"),
    }
}

fn is_zero(p: &SpaceProfile) -> bool {
    matches!(p, SpaceProfile::Constant { value } if *value == 0.0)
}

fn check_times(times: &[f64], rows: usize) -> Result<()> {
    if times.is_empty() || times.len() != rows {
        return structural(format!("{} table times for {rows} tables", times.len()));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return structural("table times must increase strictly");
    }
    Ok(())
}

/// Linear interpolation between `mats[k]` at `times[k]`, constant outside.
fn piecewise_linear(times: &[f64], mats: Vec<CMatrix>) -> Sampler {
    if mats.len() == 1 {
        return Sampler::constant(mats.into_iter().next().unwrap());
    }
    let mut pieces = vec![Sampler::constant(mats[0].clone())];
    for k in 0..mats.len() - 1 {
        let dt = times[k + 1] - times[k];
        let slope = (&mats[k + 1] - &mats[k]) * C64::new(1.0 / dt, 0.0);
        let offset = &mats[k] - &slope * C64::new(times[k], 0.0);
        pieces.push(Sampler::Polynomial {
            coefficients: vec![offset, slope],
        });
    }
    pieces.push(Sampler::constant(mats[mats.len() - 1].clone()));
    Sampler::Piecewise {
        breaks: times.to_vec(),
        pieces,
    }
}

/// Which model problem an instance realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemLabel {
    Elliptic,
    System,
    FractionalLaplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryCondition {
    Dirichlet,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub form: NonAutonomousForm,
    pub triple: GelfandTriple,
    pub label: ProblemLabel,
    pub analytic_notes: Vec<String>,
    /// Spatial nodes carrying the unknowns (per component).
    pub nodes: Vec<f64>,
    /// Maps `H` coordinates to nodal values.
    pub to_nodal: DMatrix<f64>,
}

impl ProblemInstance {
    pub fn dim(&self) -> usize {
        self.triple.dim()
    }
}

/// Interior nodes and the P1 mass matrix with its inverse square root.
struct P1Mesh {
    h: f64,
    nodes: Vec<f64>,
    mass_inv_sqrt: DMatrix<f64>,
    /// Two Gauss points per element.
    quad: Vec<f64>,
}

impl P1Mesh {
    fn new(n_x: usize) -> Result<Self> {
        if n_x < 2 {
            return domain(format!("need at least 2 elements, got {n_x}"));
        }
        let h = 1.0 / n_x as f64;
        let nodes = (1..n_x).map(|j| j as f64 * h).collect();
        let eig = SymmetricEigen::new(p1_mass(n_x));
        let w = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
        let mut mass_inv_sqrt = &eig.eigenvectors * w * eig.eigenvectors.transpose();
        symmetrize(&mut mass_inv_sqrt);
        let g = 0.5 / 3f64.sqrt();
        let quad = (0..n_x)
            .flat_map(|e| {
                let x = e as f64 * h;
                [x + h * (0.5 - g), x + h * (0.5 + g)]
            })
            .collect();
        Ok(Self {
            h,
            nodes,
            mass_inv_sqrt,
            quad,
        })
    }

    fn dim(&self) -> usize {
        self.nodes.len()
    }

    /// Weighted stiffness `∫ a φ_i′ φ_j′` (two-point Gauss per element).
    fn stiffness(&self, a: &dyn Fn(f64) -> f64) -> DMatrix<f64> {
        let d = self.dim();
        let n_x = d + 1;
        let h = self.h;
        let mut k = DMatrix::zeros(d, d);
        for e in 0..n_x {
            let (q0, q1) = (self.quad[2 * e], self.quad[2 * e + 1]);
            let ke = 0.5 * (a(q0) + a(q1)) / h;
            // element e joins nodes e and e+1 (0 and n_x are boundary nodes)
            let left = e.checked_sub(1);
            let right = if e < d { Some(e) } else { None };
            if let Some(i) = left {
                k[(i, i)] += ke;
            }
            if let Some(j) = right {
                k[(j, j)] += ke;
            }
            if let (Some(i), Some(j)) = (left, right) {
                k[(i, j)] -= ke;
                k[(j, i)] -= ke;
            }
        }
        k
    }

    /// `M^{−1/2} K M^{−1/2}`.
    fn whiten(&self, k: &DMatrix<f64>) -> DMatrix<f64> {
        let mut w = &self.mass_inv_sqrt * k * &self.mass_inv_sqrt;
        symmetrize(&mut w);
        w
    }
}

fn p1_mass(n_x: usize) -> DMatrix<f64> {
    let h = 1.0 / n_x as f64;
    let d = n_x - 1;
    DMatrix::from_fn(d, d, |i, j| match i.abs_diff(j) {
        0 => 2.0 * h / 3.0,
        1 => h / 6.0,
        _ => 0.0,
    })
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let t = m.transpose();
    *m = (&*m + t) * 0.5;
}

fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

/// P1 elements on `(0,1)` with `n_x` cells, `d = n_x − 1`.
///
/// `H` coordinates are mass-orthonormal, `A(t) = M^{−1/2} K_{a(t)} M^{−1/2}`,
/// and the Riesz map is the whitened unweighted stiffness (the `H¹₀` norm
/// `‖u_x‖`).
pub fn build_elliptic_1d(c: &CoefficientField, n_x: usize, bc: BoundaryCondition) -> Result<ProblemInstance> {
    let BoundaryCondition::Dirichlet = bc;
    c.check_bounds_shape(true)?;
    let mesh = P1Mesh::new(n_x)?;
    let sampler = point_sampler(c, &mesh.quad, &|a| complexify(&mesh.whiten(&mesh.stiffness(a))))?;
    let riesz = mesh.whiten(&mesh.stiffness(&|_| 1.0));
    let triple = GelfandTriple::new(riesz)?;
    let form = NonAutonomousForm::new(triple.clone(), sampler)?;
    let mut notes = vec![format!(
        "P1 elements, h = 1/{n_x}; coefficient bounds [{}, {}]",
        c.bounds.0, c.bounds.1
    )];
    if c.bounds.0 == c.bounds.1 {
        notes.push(format!(
            "constant coefficient a = {}: eigenvalues a(kπ)² up to O(h²), eigenvectors sin(kπx)",
            c.bounds.0
        ));
    }
    Ok(ProblemInstance {
        form,
        triple,
        label: ProblemLabel::Elliptic,
        analytic_notes: notes,
        nodes: mesh.nodes.clone(),
        to_nodal: mesh.mass_inv_sqrt.clone(),
    })
}

/// Coefficients `a^{lm}` of a two-component system and its declared
/// Legendre–Hadamard constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemCoefficients {
    /// `entries[l][m] = a^{lm}`. Off-diagonal bounds may be signed.
    pub entries: [[CoefficientField; 2]; 2],
    /// `Re Σ a^{lm}(t,x) ζ_m ζ̄_l ≥ η |ζ|²` on the sample sweep.
    pub eta: f64,
}

/// Directions `ζ` in the Legendre–Hadamard sweep (per angle).
const LH_ANGLES: usize = 48;

/// Two components on P1 elements, unknowns ordered component by component.
///
/// At `d = 1` the Legendre–Hadamard condition is a pointwise bound on the
/// Hermitian part of `(a^{lm})`. It is checked on quadrature points, profile
/// extremes and a `(θ, φ)` grid of unit `ζ`.
pub fn build_system_1d(c: &SystemCoefficients, n_x: usize, n_components: usize) -> Result<ProblemInstance> {
    if n_components != 2 {
        return domain(format!("systems are built with 2 components, got {n_components}"));
    }
    if !(c.eta > 0.0) {
        return domain(format!("Legendre–Hadamard constant {} must be positive", c.eta));
    }
    let mesh = P1Mesh::new(n_x)?;
    for (l, row) in c.entries.iter().enumerate() {
        for (m, e) in row.iter().enumerate() {
            e.check_bounds_shape(l == m)?;
            if e.is_kernel() {
                return structural("system coefficients must be pointwise fields");
            }
        }
    }
    legendre_hadamard_sweep(c, &mesh.quad)?;

    let d0 = mesh.dim();
    let mut parts = Vec::with_capacity(4);
    for l in 0..2 {
        for m in 0..2 {
            let embed = |a: &dyn Fn(f64) -> f64| {
                let k = complexify(&mesh.whiten(&mesh.stiffness(a)));
                let mut big = CMatrix::zeros(2 * d0, 2 * d0);
                big.view_mut((l * d0, m * d0), (d0, d0)).copy_from(&k);
                big
            };
            parts.push(point_sampler(&c.entries[l][m], &mesh.quad, &embed)?);
        }
    }
    let sampler = Sampler::Sum { terms: parts };
    let k1 = mesh.whiten(&mesh.stiffness(&|_| 1.0));
    let mut riesz = DMatrix::zeros(2 * d0, 2 * d0);
    let mut to_nodal = DMatrix::zeros(2 * d0, 2 * d0);
    for l in 0..2 {
        riesz.view_mut((l * d0, l * d0), (d0, d0)).copy_from(&k1);
        to_nodal
            .view_mut((l * d0, l * d0), (d0, d0))
            .copy_from(&mesh.mass_inv_sqrt);
    }
    let triple = GelfandTriple::new(riesz)?;
    let form = NonAutonomousForm::new(triple.clone(), sampler)?;
    Ok(ProblemInstance {
        form,
        triple,
        label: ProblemLabel::System,
        analytic_notes: vec![format!(
            "two components, P1 elements h = 1/{n_x}; Legendre–Hadamard constant {}",
            c.eta
        )],
        nodes: mesh.nodes.clone(),
        to_nodal,
    })
}

/// Values `a^{lm}` that can occur at `x`: every combination of profile
/// extremes for separable entries, every table row otherwise.
fn entry_values(e: &CoefficientField, x: f64) -> Vec<f64> {
    match &e.kind {
        FieldKind::Separable {
            base,
            profile,
            coefficient,
        } => {
            let (glo, ghi) = e.profile_range(profile);
            vec![base.eval(x) + glo * coefficient.eval(x), base.eval(x) + ghi * coefficient.eval(x)]
        }
        FieldKind::Tabulated { values, .. } => values.iter().map(|r| interp_uniform(r, x)).collect(),
        _ => vec![],
    }
}

fn legendre_hadamard_sweep(c: &SystemCoefficients, quad: &[f64]) -> Result<()> {
    let tabulated = c
        .entries
        .iter()
        .flatten()
        .any(|e| matches!(e.kind, FieldKind::Tabulated { .. }));
    for &x in quad {
        let vals: Vec<Vec<f64>> = c.entries.iter().flatten().map(|e| entry_values(e, x)).collect();
        // tabulated entries share their time index; separable ones range
        // independently over their extremes
        let combos: Vec<[f64; 4]> = if tabulated {
            let rows = vals.iter().map(|v| v.len()).max().unwrap_or(0);
            (0..rows)
                .map(|k| std::array::from_fn(|i| vals[i][k.min(vals[i].len() - 1)]))
                .collect()
        } else {
            (0..16)
                .map(|mask| std::array::from_fn(|i| vals[i][(mask >> i) & 1]))
                .collect()
        };
        for a in combos {
            for i in 0..LH_ANGLES {
                let theta = std::f64::consts::FRAC_PI_2 * i as f64 / (LH_ANGLES - 1) as f64;
                for j in 0..LH_ANGLES {
                    let phi = 2.0 * std::f64::consts::PI * j as f64 / LH_ANGLES as f64;
                    let z0 = C64::new(theta.cos(), 0.0);
                    let z1 = C64::from_polar(theta.sin(), phi);
                    let q = (z0.conj() * a[0] * z0
                        + z0.conj() * a[1] * z1
                        + z1.conj() * a[2] * z0
                        + z1.conj() * a[3] * z1)
                        .re;
                    if q < c.eta * (1.0 - 1e-12) {
                        return Err(MregError::Data(format!(
                            "Legendre–Hadamard condition fails at x = {x:.4}: Re a(ζ,ζ) = {q:.6} < η = {}",
                            c.eta
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Kernel form on the unit torus with `n_x` nodes `i/n_x`.
///
/// The double sum runs over ordered pairs `i ≠ j` with minimum-image
/// distance. Removing the diagonal costs `O(h^{2−2β})`; the leading part of
/// that error is restored by a nearest-neighbour term with the zeta weight
/// `−2ζ(2β−1) h^{−2β}`. The Riesz map is the `K ≡ 1` form plus identity.
pub fn build_frac_laplacian_1d(k: &CoefficientField, beta: f64, n_x: usize) -> Result<ProblemInstance> {
    if !(beta > 0.0 && beta < 1.0) {
        return domain(format!("fractional order β = {beta} outside (0, 1)"));
    }
    if n_x < 4 {
        return domain(format!("need at least 4 torus nodes, got {n_x}"));
    }
    k.check_bounds_shape(true)?;
    let assemble = |km: &DMatrix<f64>| complexify(&kernel_form(km, beta));
    let sampler = match &k.kind {
        FieldKind::Kernel {
            base,
            profile,
            coefficient,
        } => {
            let kb = base.matrix(n_x)?;
            let kc = coefficient.matrix(n_x)?;
            let (glo, ghi) = k.profile_range(profile);
            for g in [glo, ghi] {
                for v in (&kb + &kc * g).iter() {
                    k.check_value(*v, "kernel node pair")?;
                }
            }
            if matches!(profile, TimeProfile::Constant { .. }) || kc.amax() == 0.0 {
                Sampler::constant(assemble(&(&kb + &kc * profile.eval(0.0))))
            } else {
                Sampler::product(assemble(&kb), profile.clone(), assemble(&kc))
            }
        }
        FieldKind::KernelTable { times, values } => {
            check_times(times, values.len())?;
            let mut mats = Vec::with_capacity(values.len());
            for v in values {
                let km = KernelProfile::Table { values: v.clone() }.matrix(n_x)?;
                for x in km.iter() {
                    k.check_value(*x, "kernel node pair")?;
                }
                mats.push(assemble(&km));
            }
            piecewise_linear(times, mats)
        }
        _ => return structural("the fractional Laplacian needs a kernel field"),
    };
    let mut riesz = kernel_form(&DMatrix::from_element(n_x, n_x, 1.0), beta);
    for i in 0..n_x {
        riesz[(i, i)] += 1.0;
    }
    let triple = GelfandTriple::new(riesz)?;
    let form = NonAutonomousForm::new(triple.clone(), sampler)?;
    let h = 1.0 / n_x as f64;
    Ok(ProblemInstance {
        form,
        triple,
        label: ProblemLabel::FractionalLaplacian,
        analytic_notes: vec![format!(
            "torus with {n_x} nodes, β = {beta}; for K ≡ 1 the mode e^(2πikx) has Rayleigh quotient \
             ≈ ∫_(|r|<1/2) (2 − 2cos 2πkr)/|r|^(1+2β) dr"
        )],
        nodes: (0..n_x).map(|i| i as f64 * h).collect(),
        to_nodal: DMatrix::from_diagonal_element(n_x, n_x, 1.0 / h.sqrt()),
    })
}

/// Form matrix of a symmetric nodal kernel in `H` coordinates `√h·v`.
fn kernel_form(km: &DMatrix<f64>, beta: f64) -> DMatrix<f64> {
    let n = km.nrows();
    let h = 1.0 / n as f64;
    let s = 1.0 + 2.0 * beta;
    // h² / dist^{1+2β} for the lag m, in H coordinates (÷h)
    let lag: Vec<f64> = (0..n)
        .map(|m| {
            let r = m.min(n - m) as f64 * h;
            if m == 0 {
                0.0
            } else {
                h / r.powf(s)
            }
        })
        .collect();
    let local = -2.0 * riemann_zeta(2.0 * beta - 1.0) * h.powf(-2.0 * beta);
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n];
            for j in 0..n {
                if j != i {
                    let w = 2.0 * km[(i, j)] * lag[(j + n - i) % n];
                    row[j] -= w;
                    row[i] += w;
                }
            }
            for j in [(i + 1) % n, (i + n - 1) % n] {
                let w = local * km[(i, j)];
                row[j] -= w;
                row[i] += w;
            }
            row
        })
        .collect();
    let mut a = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    symmetrize(&mut a);
    a
}
