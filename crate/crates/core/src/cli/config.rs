//! JSON scenario configurations. Unknown keys are rejected and every
//! threshold has a default.

use serde::{Deserialize, Serialize};

use crate::laminate::Polynomial;
use crate::shear::{AntiderivativeMethod, Profile, ShearTolerances};

fn d<T: Default>() -> T {
    T::default()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SymbolsConfig {
    /// Deterministic Fibonacci-sphere directions.
    pub samples: usize,
    /// Extra uniformly random directions drawn from the seed.
    pub random_samples: usize,
    pub rank_tol: f64,
    pub expected_rank: usize,
    pub gap_tol: f64,
    pub product_tol: f64,
    pub homogeneity_tol: f64,
    pub write_csv: bool,
}

impl Default for SymbolsConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            random_samples: 0,
            rank_tol: 1e-10,
            expected_rank: 3,
            gap_tol: 1e-8,
            product_tol: 1e-12,
            homogeneity_tol: 1e-12,
            write_csv: true,
        }
    }
}

/// Grid sizes shared by several commands.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n_t: usize,
    pub n_x: usize,
    pub n_y: usize,
    pub period_t: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self { n_t: 16, n_x: 16, n_y: 16, period_t: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolveInput {
    /// Binary field (with optional `.json` sidecar), relative to the config file.
    File { path: String },
    /// `B_E w` for a random trigonometric potential `w`.
    RandomPotential {
        #[serde(default = "d")]
        grid: GridConfig,
        #[serde(default = "three")]
        max_mode: i64,
    },
    Constant {
        #[serde(default = "d")]
        grid: GridConfig,
        value: [f64; 6],
    },
    /// Barycenter of a shear pair minus its mean.
    Shear {
        alpha: Profile,
        beta: Profile,
        #[serde(default = "half")]
        lambda: f64,
        #[serde(default = "shear_grid")]
        grid: GridConfig,
    },
}

fn three() -> i64 {
    3
}

fn half() -> f64 {
    0.5
}

fn shear_grid() -> GridConfig {
    GridConfig { n_t: 4, n_x: 4, n_y: 64, period_t: 1.0 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub input: SolveInput,
    #[serde(default = "solve_tol")]
    pub tol: f64,
    #[serde(default = "solve_tol")]
    pub afree_tol: f64,
    /// Exponent of the norm diagnostics.
    #[serde(default = "two")]
    pub p: f64,
    #[serde(default = "yes")]
    pub write_potential: bool,
}

fn solve_tol() -> f64 {
    1e-8
}

fn two() -> f64 {
    2.0
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShearConfig {
    pub alpha: Profile,
    pub beta: Profile,
    #[serde(default = "half")]
    pub lambda: f64,
    #[serde(default = "shear_grid")]
    pub grid: GridConfig,
    #[serde(default)]
    pub method: AntiderivativeMethod,
    #[serde(default)]
    pub tolerances: ShearTolerances,
    /// Expected outcome for fixtures: whether the pair is degenerate.
    #[serde(default)]
    pub expect_degenerate: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JensenConfig {
    pub n_values: Vec<u32>,
    pub delta: f64,
    pub eps: f64,
    pub base_points: usize,
    pub points_per_period: usize,
    /// Relative spread allowed for the measured derivative constant across `n`.
    pub stability: f64,
    /// Test functions; defaults to `|z|²` and `-|z|²`.
    pub functions: Vec<Polynomial>,
}

impl Default for JensenConfig {
    fn default() -> Self {
        Self {
            n_values: vec![128],
            delta: 0.02,
            eps: 0.05,
            base_points: 64,
            points_per_period: 8,
            stability: 0.2,
            functions: vec![Polynomial::squared_norm(1.0), Polynomial::squared_norm(-1.0)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LaminateConfig {
    pub z1: [f64; 6],
    pub z2: [f64; 6],
    pub lambda: f64,
    /// Oscillation direction in unit-cell coordinates `(t/T, x, y)`.
    pub direction: [f64; 3],
    pub n_values: Vec<u32>,
    pub grid: GridConfig,
    /// Keep only grid points with `y` in `[lo, hi)`.
    pub window: Option<[f64; 2]>,
    pub polynomials: Vec<Polynomial>,
    /// Errors must stay below `error_constant / n`.
    pub error_constant: f64,
    pub mean_tol: f64,
    pub histogram_bins: usize,
    pub jensen: Option<JensenConfig>,
}

impl Default for LaminateConfig {
    fn default() -> Self {
        Self {
            z1: [1.0, 0.0, 0.0, 0.0, 0.0, 1.0],
            z2: [1.0, 1.0, 0.0, 0.5, 0.0, 1.5],
            lambda: 0.5,
            direction: [0.0, 0.0, 1.0],
            n_values: vec![16, 64, 256],
            grid: GridConfig { n_t: 4, n_x: 4, n_y: 16_384, period_t: 1.0 },
            window: Some([0.0, 1.0 / 3.0]),
            polynomials: default_polynomials(),
            error_constant: 8.0,
            mean_tol: 1e-12,
            histogram_bins: 0,
            jensen: None,
        }
    }
}

/// Five fixed test polynomials of degree one to three.
pub fn default_polynomials() -> Vec<Polynomial> {
    let mono = |coeff: f64, powers: [u32; 6]| Polynomial {
        terms: vec![crate::laminate::Monomial { coeff, powers }],
    };
    vec![
        Polynomial::linear([1.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
        mono(1.0, [0, 2, 0, 0, 0, 0]),
        Polynomial::squared_norm(1.0),
        mono(1.0, [1, 0, 0, 1, 0, 0]).plus(Polynomial::linear([0.0, 0.0, 0.0, 0.0, 0.0, 1.0])),
        mono(1.0, [0, 2, 0, 0, 0, 1]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolytopeSource {
    Cube { dim: usize },
    Octahedron { dim: usize },
    Simplex { dim: usize },
    Vertices { vertices: Vec<Vec<f64>> },
}

/// Sampled function `f` whose level sets slice the polytope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LevelFunction {
    Linear { slope: f64, offset: f64 },
    Constant { value: f64 },
    Values { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditCase {
    pub name: String,
    pub polytope: PolytopeSource,
    /// `[from, to]` sampled at `count` equispaced points.
    pub x_range: [f64; 2],
    #[serde(default = "nine")]
    pub count: usize,
    #[serde(default = "identity")]
    pub f: LevelFunction,
    #[serde(default = "deltas")]
    pub deltas: Vec<f64>,
    #[serde(default)]
    pub expected_slope: Option<f64>,
    #[serde(default = "slope_tol")]
    pub slope_tol: f64,
    /// Recompute the audit with the brute-force distance oracle.
    #[serde(default = "yes")]
    pub oracle: bool,
}

fn nine() -> usize {
    9
}

fn identity() -> LevelFunction {
    LevelFunction::Linear { slope: 1.0, offset: 0.0 }
}

fn deltas() -> Vec<f64> {
    vec![0.1, 0.2, 0.4, 0.8]
}

fn slope_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HausdorffConfig {
    pub cases: Vec<AuditCase>,
    /// Random polytope triples checked for the metric axioms.
    #[serde(default = "twenty")]
    pub metric_trials: usize,
    #[serde(default = "metric_tol")]
    pub metric_tol: f64,
}

fn twenty() -> usize {
    20
}

fn metric_tol() -> f64 {
    1e-10
}
