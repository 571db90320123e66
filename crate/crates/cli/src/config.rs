//! JSON run configurations.
//!
//! Every struct rejects unknown fields, so a misspelt key is a config error
//! instead of a silent default.

use std::collections::BTreeMap;
use std::path::Path;

use mreg_core::form::{make_time_profile, ProfileKind, TimeProfile};
use mreg_core::problems::{CoefficientField, SpaceProfile, SystemCoefficients};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Size of the randomized suites.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    /// Reduced counts and grids; the default for `mreg verify`.
    #[default]
    Quick,
    /// The counts and sizes of the acceptance criteria.
    Full,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub scale: Scale,
    /// Check ids to run; all when absent.
    #[serde(default)]
    pub checks: Option<Vec<String>>,
    /// Tolerance overrides by check id.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

/// A coefficient `a(t,x)`: either a literal field or a rough separable one
/// `base(x) + g(t) amplitude(x)` with `g` of prescribed time regularity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSpec {
    Field { field: CoefficientField },
    Rough(RoughCoefficient),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoughCoefficient {
    pub base: SpaceProfile,
    pub amplitude: SpaceProfile,
    pub s_target: f64,
    #[serde(default = "two")]
    pub p_target: f64,
    #[serde(default = "weierstrass")]
    pub profile: ProfileKind,
    /// Interval carrying the profile; `g` is constant beyond it.
    pub start: f64,
    pub end: f64,
    pub bounds: (f64, f64),
}

fn two() -> f64 {
    2.0
}

fn weierstrass() -> ProfileKind {
    ProfileKind::Weierstrass
}

impl RoughCoefficient {
    pub fn field(&self) -> CliResult<CoefficientField> {
        let g = make_time_profile(self.s_target, self.p_target, self.profile, self.start, self.end)?;
        let g = TimeProfile::Extended {
            inner: Box::new(g),
            start: self.start,
            end: self.end,
            outside: None,
        };
        Ok(CoefficientField::separable(
            self.base.clone(),
            g,
            self.amplitude.clone(),
            self.bounds,
            (self.start, self.end),
        ))
    }
}

impl CoefficientSpec {
    pub fn field(&self) -> CliResult<CoefficientField> {
        match self {
            CoefficientSpec::Field { field } => Ok(field.clone()),
            CoefficientSpec::Rough(r) => r.field(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    Elliptic {
        coefficient: CoefficientSpec,
        n_x: usize,
    },
    System {
        coefficients: SystemCoefficients,
        n_x: usize,
    },
    FractionalLaplacian {
        kernel: CoefficientField,
        beta: f64,
        n_x: usize,
    },
}

/// `f(t,x) = Σ time_k(t) space_k(x)` on one component each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForcingTerm {
    pub time: TimeProfile,
    pub space: SpaceProfile,
    #[serde(default)]
    pub component: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingSpec {
    #[default]
    Zero,
    Separable { terms: Vec<ForcingTerm> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Zero,
    /// Eigenvector `index` (ascending eigenvalues) of the Hermitian part of
    /// `A(start)`, unit `H` norm.
    Eigenvector { index: usize },
    Profile {
        space: SpaceProfile,
        #[serde(default)]
        component: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Torus points (power of two).
    pub n: usize,
    pub period: f64,
    /// The interval `I`; its ends must be grid points.
    pub window: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSpec {
    pub problem: ProblemSpec,
    #[serde(default)]
    pub forcing: ForcingSpec,
    pub u0: InitialSpec,
    pub grid: GridSpec,
    /// Regularity index `α ∈ [0, 1/2]` of the reported norms.
    #[serde(default)]
    pub alpha: f64,
    /// Crank–Nicolson steps per grid step; no cross-check when absent.
    #[serde(default)]
    pub oracle_oversample: Option<usize>,
    /// Grid sizes of the refinement mini-study (same period and window).
    #[serde(default)]
    pub refinement: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// Rough coefficient template; its `s_target` is replaced per point.
    pub coefficient: RoughCoefficient,
    pub n_x: usize,
    pub s_targets: Vec<f64>,
    pub grids: Vec<usize>,
    pub period: f64,
    pub window: (f64, f64),
    #[serde(default)]
    pub forcing: ForcingSpec,
    pub u0: InitialSpec,
    #[serde(default = "half")]
    pub alpha: f64,
    /// Allowed spread `max/min − 1` of the gated rows.
    #[serde(default = "stability_tolerance")]
    pub tolerance: f64,
    /// Rows with `s_target ≥ 1/2 + smooth_margin` are gated.
    #[serde(default = "smooth_margin")]
    pub smooth_margin: f64,
}

fn half() -> f64 {
    0.5
}

fn stability_tolerance() -> f64 {
    0.2
}

fn smooth_margin() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportSpec {
    /// Output directory of an earlier `solve` or `sweep`; relative paths
    /// are taken from the config file's directory.
    pub bundle: String,
}

impl SweepSpec {
    pub fn validate(&self) -> CliResult<()> {
        if self.s_targets.is_empty() {
            return Err(CliError::Config("s_targets must not be empty".into()));
        }
        if self.grids.is_empty() {
            return Err(CliError::Config("grids must not be empty".into()));
        }
        Ok(())
    }

    /// The solve configuration of one sweep point.
    pub fn point(&self, s_target: f64, n: usize) -> SolveSpec {
        let mut coefficient = self.coefficient.clone();
        coefficient.s_target = s_target;
        SolveSpec {
            problem: ProblemSpec::Elliptic {
                coefficient: CoefficientSpec::Rough(coefficient),
                n_x: self.n_x,
            },
            forcing: self.forcing.clone(),
            u0: self.u0.clone(),
            grid: GridSpec {
                n,
                period: self.period,
                window: self.window,
            },
            alpha: self.alpha,
            oracle_oversample: None,
            refinement: vec![],
        }
    }
}

/// Raw bytes and parsed value of a config file.
pub struct Loaded<T> {
    pub bytes: Vec<u8>,
    pub value: T,
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<Loaded<T>> {
    let bytes = std::fs::read(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let value = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(Loaded { bytes, value })
}
