//! Stationary shear flows `(ρ, m) = (1, (α(y), 0))` as a pair of weak
//! solutions, their barycenter, and an explicit potential for the barycenter
//! minus its `y`-average.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laminate::{periodic_antiderivative, periodic_antiderivative_spectral};
use crate::report::Check;
use crate::states::{admissibility_check, lift, psi_vector, subsolution_margin, FluidState, LiftedState};
use crate::symbol::wavecone_distance;
use crate::torus::{
    apply_euler_operator, apply_potential_operator, nonlinear_euler_residual, TorusField, TorusGrid,
};

const TAU: f64 = std::f64::consts::TAU;

/// A bounded 1-periodic profile in `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Sin {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_i")]
        frequency: i64,
    },
    Cos {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_i")]
        frequency: i64,
    },
    /// `Σ c_i y^i` on `[0, 1)`, extended periodically.
    Polynomial { coeffs: Vec<f64> },
    /// `high` on `[0, duty)`, `low` on `[duty, 1)`.
    Square {
        low: f64,
        high: f64,
        #[serde(default = "half")]
        duty: f64,
    },
    /// Equispaced samples on `[0, 1)`, trigonometrically interpolated.
    Samples { values: Vec<f64> },
    Constant { value: f64 },
}

fn one() -> f64 {
    1.0
}
fn one_i() -> i64 {
    1
}
fn half() -> f64 {
    0.5
}

/// Trigonometric interpolation of equispaced periodic samples onto `n`
/// equispaced points. The Nyquist coefficient of either grid is split evenly
/// between `±n/2`.
pub fn trig_resample(values: &[f64], n: usize) -> Vec<f64> {
    let m = values.len();
    if m == n {
        return values.to_vec();
    }
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    planner.plan_fft_forward(m).process(&mut buf);
    let mut out = vec![Complex64::default(); n];
    let kmax = (m.min(n) - 1) / 2;
    for k in 0..=kmax {
        out[k] = buf[k];
        if k > 0 {
            out[n - k] = buf[m - k];
        }
    }
    if m % 2 == 0 && m < n {
        // split the source Nyquist coefficient
        let c = buf[m / 2] * 0.5;
        out[m / 2] += c;
        out[n - m / 2] += c;
    } else if n % 2 == 0 && n < m {
        let c = buf[n / 2] + buf[m - n / 2];
        out[n / 2] = Complex64::new(c.re, 0.0);
    }
    planner.plan_fft_inverse(n).process(&mut out);
    out.iter().map(|c| c.re / m as f64).collect()
}

/// Trigonometric interpolant of equispaced samples evaluated at `y`.
pub fn trig_eval(values: &[f64], y: f64) -> f64 {
    let m = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let mut acc = 0.0;
    for (i, c) in buf.iter().enumerate() {
        let k = crate::torus::signed_mode(i, m) as f64;
        let w = if m % 2 == 0 && i == m / 2 {
            // Nyquist term as a cosine
            c.re * (TAU * k * y).cos()
        } else {
            (c * Complex64::from_polar(1.0, TAU * k * y)).re
        };
        acc += w;
    }
    acc / m as f64
}

impl Profile {
    pub fn eval(&self, y: f64) -> f64 {
        let s = y - y.floor();
        match self {
            Profile::Sin { amplitude, frequency } => amplitude * (TAU * *frequency as f64 * s).sin(),
            Profile::Cos { amplitude, frequency } => amplitude * (TAU * *frequency as f64 * s).cos(),
            Profile::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c),
            Profile::Square { low, high, duty } => {
                if s < *duty {
                    *high
                } else {
                    *low
                }
            }
            Profile::Samples { values } => trig_eval(values, s),
            Profile::Constant { value } => *value,
        }
    }

    /// Samples at `y_j = j/n`.
    pub fn sample(&self, n: usize) -> Result<Vec<f64>> {
        let v = match self {
            Profile::Samples { values } => {
                if values.is_empty() {
                    return Err(Error::Argument("sample profile is empty".into()));
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Domain("profile samples must be finite".into()));
                }
                trig_resample(values, n)
            }
            Profile::Square { duty, .. } if !(*duty > 0.0 && *duty < 1.0) => {
                return Err(Error::Argument(format!("duty must lie in (0, 1), got {duty}")));
            }
            _ => (0..n).map(|j| self.eval(j as f64 / n as f64)).collect(),
        };
        if let Some(x) = v.iter().find(|x| !x.is_finite()) {
            return Err(Error::Domain(format!("profile is unbounded: sample {x}")));
        }
        Ok(v)
    }

    /// Whether the periodic extension is continuous.
    pub fn is_continuous(&self) -> bool {
        match self {
            Profile::Square { low, high, .. } => low == high,
            Profile::Polynomial { coeffs } => {
                let p1: f64 = coeffs.iter().sum();
                let p0 = coeffs.first().copied().unwrap_or(0.0);
                (p1 - p0).abs() <= 1e-12 * (1.0 + p0.abs())
            }
            _ => true,
        }
    }
}

/// How the periodic antiderivatives of the potential are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AntiderivativeMethod {
    /// Fourier division; exact for band-limited samples.
    #[default]
    Spectral,
    /// Cumulative trapezoid rule.
    Trapezoid,
}

/// Input of the shear construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearSpec {
    pub alpha: Profile,
    pub beta: Profile,
    pub lambda: f64,
    pub grid: TorusGrid,
    pub method: AntiderivativeMethod,
}

impl ShearSpec {
    pub fn new(alpha: Profile, beta: Profile, lambda: f64, grid: TorusGrid) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Argument(format!("lambda must lie in (0, 1), got {lambda}")));
        }
        Ok(Self { alpha, beta, lambda, grid, method: AntiderivativeMethod::Spectral })
    }

    pub fn with_method(mut self, method: AntiderivativeMethod) -> Self {
        self.method = method;
        self
    }

    fn profiles(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        Ok((self.alpha.sample(self.grid.n_y)?, self.beta.sample(self.grid.n_y)?))
    }

    pub fn is_degenerate(&self) -> Result<bool> {
        let (a, b) = self.profiles()?;
        Ok(a == b)
    }
}

/// The two shear solutions in lifted and fluid variables.
#[derive(Debug, Clone)]
pub struct ShearSolutions {
    pub z1: TorusField,
    pub z2: TorusField,
    pub fluid1: TorusField,
    pub fluid2: TorusField,
}

fn y_field(grid: TorusGrid, components: usize, per_y: &[Vec<f64>]) -> TorusField {
    let mut values = Vec::with_capacity(grid.len() * components);
    for idx in 0..grid.len() {
        values.extend_from_slice(&per_y[grid.unravel(idx)[2]]);
    }
    TorusField::new(grid, components, values).expect("finite profile samples")
}

fn lifted_column(profile: &[f64]) -> Result<Vec<Vec<f64>>> {
    profile
        .iter()
        .map(|&a| Ok(lift(&FluidState::new(1.0, [a, 0.0])?)?.to_vector().to_vec()))
        .collect()
}

pub fn build_shear_solutions(spec: &ShearSpec) -> Result<ShearSolutions> {
    let (a, b) = spec.profiles()?;
    let g = spec.grid;
    let fluid = |p: &[f64]| -> Vec<Vec<f64>> { p.iter().map(|&v| vec![1.0, v, 0.0]).collect() };
    Ok(ShearSolutions {
        z1: y_field(g, 6, &lifted_column(&a)?),
        z2: y_field(g, 6, &lifted_column(&b)?),
        fluid1: y_field(g, 3, &fluid(&a)),
        fluid2: y_field(g, 3, &fluid(&b)),
    })
}

/// Barycenter field `λ z1 + (1-λ) z2`.
pub fn barycenter_field(lambda: f64, z1: &TorusField, z2: &TorusField) -> Result<TorusField> {
    z1.scale(lambda).add(&z2.scale(1.0 - lambda))
}

/// `y`-average of the barycenter (grid quadrature).
pub fn shear_sigma(spec: &ShearSpec, z1: &TorusField, z2: &TorusField) -> Result<[f64; 6]> {
    let m = barycenter_field(spec.lambda, z1, z2)?.mean();
    Ok(m.try_into().expect("6 components"))
}

/// Potential of the barycenter minus `σ` together with its building blocks.
#[derive(Debug, Clone)]
pub struct ShearPotential {
    pub sigma: [f64; 6],
    /// Mean-zero `m1` part of the barycenter.
    pub a: Vec<f64>,
    /// Mean-zero `M11 + Q` part of the barycenter.
    pub b: Vec<f64>,
    pub f_a: Vec<f64>,
    pub f_b: Vec<f64>,
    pub w: TorusField,
    /// Largest component of `bar - σ` outside the `m1` and `M11 + Q` rows.
    pub reduced_rows: f64,
}

const MEAN_TOL: f64 = 1e-12;

fn second_antiderivative(a: &[f64], method: AntiderivativeMethod) -> Result<Vec<f64>> {
    let wrap = |e: Error| match e {
        Error::MeanNotZero { mean_norm, field_norm } => Error::Precondition(format!(
            "shear profile is not mean-zero after subtracting sigma: |mean| {mean_norm:.3e}, rms {field_norm:.3e}"
        )),
        other => other,
    };
    let once = match method {
        AntiderivativeMethod::Spectral => periodic_antiderivative_spectral(a, MEAN_TOL),
        AntiderivativeMethod::Trapezoid => periodic_antiderivative(a, MEAN_TOL),
    }
    .map_err(wrap)?;
    match method {
        AntiderivativeMethod::Spectral => periodic_antiderivative_spectral(&once, MEAN_TOL),
        AntiderivativeMethod::Trapezoid => periodic_antiderivative(&once, MEAN_TOL),
    }
    .map_err(wrap)
}

/// Builds `w = (0,0,0,0,F_a,F_b,0,0,F_a)` with `F_a'' = a` and `F_b'' = b`.
pub fn shear_potential(spec: &ShearSpec) -> Result<ShearPotential> {
    let sol = build_shear_solutions(spec)?;
    let sigma = shear_sigma(spec, &sol.z1, &sol.z2)?;
    let g = spec.grid;
    let bar = barycenter_field(spec.lambda, &sol.z1, &sol.z2)?;
    let mut a = Vec::with_capacity(g.n_y);
    let mut b = Vec::with_capacity(g.n_y);
    let mut reduced: f64 = 0.0;
    for iy in 0..g.n_y {
        let p = bar.point(g.index(0, 0, iy));
        let d: [f64; 6] = std::array::from_fn(|i| p[i] - sigma[i]);
        let s = psi_vector(&d);
        a.push(s[1]);
        b.push(s[3]);
        reduced = [s[0], s[2], s[4], s[5]].iter().fold(reduced, |m, v| m.max(v.abs()));
    }
    let f_a = second_antiderivative(&a, spec.method)?;
    let f_b = second_antiderivative(&b, spec.method)?;
    let per_y: Vec<Vec<f64>> = (0..g.n_y)
        .map(|j| vec![0.0, 0.0, 0.0, 0.0, f_a[j], f_b[j], 0.0, 0.0, f_a[j]])
        .collect();
    Ok(ShearPotential { sigma, a, b, f_a, f_b, w: y_field(g, 9, &per_y), reduced_rows: reduced })
}

/// Thresholds of [`verify_shear`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShearTolerances {
    pub operator_residual: f64,
    pub nonlinear_residual: f64,
    pub wave_cone: f64,
    pub potential_residual: f64,
    pub reduced_rows: f64,
    pub margin: f64,
    pub energy: f64,
    pub density_floor: f64,
    /// For discontinuous profiles the potential tolerance is raised to
    /// `jump_scale / n_y`.
    pub jump_scale: f64,
}

impl Default for ShearTolerances {
    fn default() -> Self {
        Self {
            operator_residual: 1e-10,
            nonlinear_residual: 1e-10,
            wave_cone: 1e-8,
            potential_residual: 1e-6,
            reduced_rows: 1e-12,
            margin: 1e-10,
            energy: 1e-12,
            density_floor: 1.0,
            jump_scale: 1.0,
        }
    }
}

/// Outcome of [`verify_shear`].
#[derive(Debug, Clone)]
pub struct ShearReport {
    pub degenerate: bool,
    pub continuous: bool,
    pub sigma: [f64; 6],
    pub checks: Vec<Check>,
}

impl ShearReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        num
    }
}

/// Runs the full set of hypotheses checks on a shear pair.
pub fn verify_shear(spec: &ShearSpec, tol: &ShearTolerances) -> Result<ShearReport> {
    let sol = build_shear_solutions(spec)?;
    let pot = shear_potential(spec)?;
    let g = spec.grid;
    let degenerate = spec.is_degenerate()?;
    let continuous = spec.alpha.is_continuous() && spec.beta.is_continuous();
    let mut checks = Vec::new();

    for (name, z) in [("z1", &sol.z1), ("z2", &sol.z2)] {
        let r = apply_euler_operator(z)?.rms();
        checks.push(Check::at_most(
            format!("relaxed_residual_{name}"),
            relative(r, z.rms()),
            tol.operator_residual,
        ));
    }
    for (name, f) in [("z1", &sol.fluid1), ("z2", &sol.fluid2)] {
        let r = nonlinear_euler_residual(f)?.max_abs();
        checks.push(Check::at_most(format!("euler_residual_{name}"), r, tol.nonlinear_residual));
    }

    if degenerate {
        checks.push(Check::skipped("wave_cone_distance", "z1 == z2"));
        checks.push(Check::skipped("wave_cone_direction", "z1 == z2"));
    } else {
        let mut dist: f64 = 0.0;
        let mut align: f64 = 0.0;
        let scale = sol.z1.sub(&sol.z2)?.max_abs();
        for iy in 0..g.n_y {
            let idx = g.index(0, 0, iy);
            let d: [f64; 6] = std::array::from_fn(|i| sol.z1.point(idx)[i] - sol.z2.point(idx)[i]);
            if d.iter().all(|v| v.abs() <= 1e-12 * scale) {
                continue;
            }
            let r = wavecone_distance(&d)?;
            dist = dist.max(r.distance);
            align = align.max(1.0 - r.minimizer.xi2.abs());
        }
        checks.push(Check::at_most("wave_cone_distance", dist, tol.wave_cone));
        checks.push(
            Check::at_most("wave_cone_direction", align, tol.wave_cone)
                .with_detail("1 - |ω_y| of the minimising direction"),
        );
    }

    let bar = barycenter_field(spec.lambda, &sol.z1, &sol.z2)?;
    let target = bar.shift(&pot.sigma.map(|v| -v))?;
    let bw = apply_potential_operator(&pot.w)?;
    let pot_res = relative(bw.sub(&target)?.rms(), target.rms());
    let pot_tol = if continuous {
        tol.potential_residual
    } else {
        tol.potential_residual.max(tol.jump_scale / g.n_y as f64)
    };
    let mut pc = Check::at_most("potential_residual", pot_res, pot_tol);
    if !continuous {
        pc = pc.with_detail("tolerance relaxed for a discontinuous profile");
    }
    checks.push(pc);
    checks.push(Check::at_most("reduced_rows", pot.reduced_rows, tol.reduced_rows));

    let rho_min = [&sol.fluid1, &sol.fluid2]
        .iter()
        .flat_map(|f| f.values().chunks(3).map(|p| p[0]))
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least("density_floor", rho_min, tol.density_floor));

    let mut margin: f64 = 0.0;
    for z in [&sol.z1, &sol.z2] {
        for p in z.values().chunks(6) {
            let v: [f64; 6] = p.try_into().expect("6 components");
            margin = margin.max(subsolution_margin(&LiftedState::from_vector(&v))?.abs());
        }
    }
    checks.push(Check::at_most("subsolution_margin", margin, tol.margin));

    let mut dev: f64 = 0.0;
    for f in [&sol.fluid1, &sol.fluid2] {
        dev = dev.max(admissibility_check(f, tol.energy)?.max_deviation());
    }
    checks.push(Check::at_most("energy_slices", dev, tol.energy));

    Ok(ShearReport { degenerate, continuous, sigma: pot.sigma, checks })
}
