//! From a [`SolveSpec`] to a solved initial value problem.

use mreg_core::gelfand::SpaceTag;
use mreg_core::problems::{
    build_elliptic_1d, build_frac_laplacian_1d, build_system_1d, BoundaryCondition, ProblemInstance, ProblemLabel,
};
use mreg_core::solver::{solve_ivp, OracleConfig, SolveConfig, WeakSolution};
use mreg_core::spectral::{Signal, TimeGrid};
use mreg_core::{CMatrix, CVector, C64};
use nalgebra::SymmetricEigen;

use crate::config::{ForcingSpec, GridSpec, InitialSpec, ProblemSpec, SolveSpec};
use crate::error::{CliError, CliResult};

pub fn build_problem(spec: &ProblemSpec) -> CliResult<ProblemInstance> {
    Ok(match spec {
        ProblemSpec::Elliptic { coefficient, n_x } => {
            build_elliptic_1d(&coefficient.field()?, *n_x, BoundaryCondition::Dirichlet)?
        }
        ProblemSpec::System { coefficients, n_x } => build_system_1d(coefficients, *n_x, 2)?,
        ProblemSpec::FractionalLaplacian { kernel, beta, n_x } => build_frac_laplacian_1d(kernel, *beta, *n_x)?,
    })
}

pub fn build_grid(spec: &GridSpec, n: usize) -> CliResult<TimeGrid> {
    Ok(TimeGrid::new(n, spec.period)?.with_window(spec.window.0, spec.window.1)?)
}

fn components(p: &ProblemInstance) -> usize {
    match p.label {
        ProblemLabel::System => 2,
        _ => 1,
    }
}

/// `H` coordinates of a spatial profile placed on one component.
fn profile_coords(p: &ProblemInstance, space: &mreg_core::problems::SpaceProfile, component: usize) -> CliResult<CVector> {
    let nc = components(p);
    if component >= nc {
        return Err(CliError::Config(format!(
            "component {component} does not exist (the problem has {nc})"
        )));
    }
    let per = p.nodes.len();
    let mut nodal = nalgebra::DVector::zeros(p.dim());
    for (i, &x) in p.nodes.iter().enumerate() {
        nodal[component * per + i] = space.eval(x);
    }
    let c = p
        .to_nodal
        .clone()
        .lu()
        .solve(&nodal)
        .ok_or_else(|| CliError::Config("coordinate map is singular".into()))?;
    Ok(c.map(|x| C64::new(x, 0.0)))
}

pub fn forcing_signal(p: &ProblemInstance, spec: &ForcingSpec, grid: &TimeGrid) -> CliResult<Signal> {
    let d = p.dim();
    match spec {
        ForcingSpec::Zero => Ok(Signal::zeros(grid.clone(), d, SpaceTag::VDUAL)),
        ForcingSpec::Separable { terms } => {
            let shapes = terms
                .iter()
                .map(|t| profile_coords(p, &t.space, t.component))
                .collect::<CliResult<Vec<_>>>()?;
            Ok(Signal::from_fn(grid.clone(), d, SpaceTag::VDUAL, |t, out| {
                out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                for (term, shape) in terms.iter().zip(&shapes) {
                    let g = term.time.eval(t);
                    for (o, s) in out.iter_mut().zip(shape.iter()) {
                        *o += s * g;
                    }
                }
            })?)
        }
    }
}

/// Initial value and, for an eigenvector, its eigenvalue.
pub fn initial_value(p: &ProblemInstance, spec: &InitialSpec, t0: f64) -> CliResult<(Vec<C64>, Option<f64>)> {
    let d = p.dim();
    match spec {
        InitialSpec::Zero => Ok((vec![C64::new(0.0, 0.0); d], None)),
        InitialSpec::Profile { space, component } => Ok((profile_coords(p, space, *component)?.as_slice().to_vec(), None)),
        InitialSpec::Eigenvector { index } => {
            if *index >= d {
                return Err(CliError::Config(format!("eigenvector index {index} ≥ dimension {d}")));
            }
            let a = p.form.matrix(t0);
            let herm: CMatrix = (&a + a.adjoint()) * C64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(herm);
            let mut order: Vec<usize> = (0..d).collect();
            order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
            let k = order[*index];
            let mut v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
            // fix the phase so the largest entry is real and positive
            let big = v.iter().copied().fold(C64::new(0.0, 0.0), |b, z| if z.norm() > b.norm() { z } else { b });
            let phase = big.conj() / big.norm();
            v.iter_mut().for_each(|z| *z *= phase);
            Ok((v, Some(eig.eigenvalues[k])))
        }
    }
}

/// A solved point: the solution and the data that produced it.
pub struct Solved {
    pub problem: ProblemInstance,
    pub grid: TimeGrid,
    pub solution: WeakSolution,
    pub u0: Vec<C64>,
    pub eigenvalue: Option<f64>,
    pub autonomous: bool,
    pub zero_forcing: bool,
}

pub fn solve_point(spec: &SolveSpec, n: usize) -> CliResult<Solved> {
    if !(0.0..=0.5).contains(&spec.alpha) {
        return Err(CliError::Config(format!("alpha = {} outside [0, 1/2]", spec.alpha)));
    }
    let problem = build_problem(&spec.problem)?;
    let grid = build_grid(&spec.grid, n)?;
    let (a, b) = spec.grid.window;
    let form = problem.form.clone().on_interval(a, b)?;
    let rhs = forcing_signal(&problem, &spec.forcing, &grid)?;
    let (u0, eigenvalue) = initial_value(&problem, &spec.u0, a)?;
    let mut cfg = SolveConfig::new(grid.clone(), problem.dim()).with_alpha(spec.alpha);
    if let Some(k) = spec.oracle_oversample {
        cfg.oracle = OracleConfig {
            enabled: true,
            oversample: k.max(1),
        };
    }
    let solution = solve_ivp(&form, &rhs, &u0, &cfg)?;
    Ok(Solved {
        autonomous: problem.form.sampler().is_autonomous(),
        zero_forcing: matches!(spec.forcing, ForcingSpec::Zero),
        problem,
        grid,
        solution,
        u0,
        eigenvalue,
    })
}
