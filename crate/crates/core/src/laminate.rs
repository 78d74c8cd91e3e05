//! One-directional laminates, empirical Young measures and upper bounds for
//! the truncated quasiconvex envelope of `B_E`.
//!
//! Laminates are built in unit-cell coordinates `s = (t/T, x, y)`. An integer
//! multiple `n·ω` of the direction gives the periodic phase `u = n ω·s`, whose
//! physical gradient is `n κ` with `κ = (ω_t/T, ω_x, ω_y)`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symbol::{
    euler_symbol, potential_symbol, pseudoinverse, FrequencyVector, PotentialStencil,
};
use crate::torus::{apply_potential_operator, second_derivative_sup, TorusField, TorusGrid};

const TAU: f64 = std::f64::consts::TAU;

/// Default tolerance of the wave-cone and image-membership preconditions.
pub const PRECONDITION_TOL: f64 = 1e-6;

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Argument(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    Ok(())
}

fn norm6(v: &[f64; 6]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `1 - λ` on `[0, λ)`, `-λ` on `[λ, 1)`, extended 1-periodically.
pub fn chi_profile(lambda: f64, t: f64) -> f64 {
    let s = t - t.floor();
    if s < lambda {
        1.0 - lambda
    } else {
        -lambda
    }
}

/// Zero-mean periodic antiderivative of [`chi_profile`] (piecewise linear).
pub fn chi_antiderivative(lambda: f64, t: f64) -> f64 {
    let s = t - t.floor();
    let c = 0.5 * lambda * (1.0 - lambda);
    let g = if s < lambda { (1.0 - lambda) * s } else { lambda * (1.0 - s) };
    g - c
}

/// Zero-mean periodic second antiderivative of [`chi_profile`]
/// (piecewise quadratic, `C¹`).
pub fn chi_second_antiderivative(lambda: f64, t: f64) -> f64 {
    let s = t - t.floor();
    let l = lambda;
    let c = 0.5 * l * (1.0 - l);
    let g = |s: f64| {
        if s < l {
            0.5 * (1.0 - l) * s * s - c * s
        } else {
            (l - c) * (s - l) - 0.5 * l * (s * s - l * l)
        }
    };
    let mean = (1.0 - l) * l.powi(3) / 6.0 - c * l * l / 2.0 + (l - c) * (1.0 - l).powi(2) / 2.0
        - 0.5 * l * ((1.0 - l.powi(3)) / 3.0 - l * l * (1.0 - l));
    g(s) - mean
}

fn check_mean_zero(a: &[f64], tol: f64) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::Argument("empty sample vector".into()));
    }
    let n = a.len() as f64;
    let mean = a.iter().sum::<f64>() / n;
    if mean.abs() > tol {
        let rms = (a.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
        return Err(Error::MeanNotZero { mean_norm: mean.abs(), field_norm: rms });
    }
    Ok(mean)
}

/// Zero-mean periodic antiderivative of equispaced samples on `[0, 1)` by the
/// cumulative trapezoid rule. Second-order accurate; exact for piecewise
/// linear data with breakpoints on the grid.
pub fn periodic_antiderivative(a: &[f64], mean_zero_tol: f64) -> Result<Vec<f64>> {
    check_mean_zero(a, mean_zero_tol)?;
    let n = a.len();
    let h = 1.0 / n as f64;
    let mut out = Vec::with_capacity(n);
    let mut acc = 0.0;
    out.push(0.0);
    for j in 1..n {
        acc += 0.5 * h * (a[j - 1] + a[j]);
        out.push(acc);
    }
    let mean = out.iter().sum::<f64>() / n as f64;
    out.iter_mut().for_each(|v| *v -= mean);
    Ok(out)
}

/// Spectral variant of [`periodic_antiderivative`]: divides each Fourier
/// coefficient by `2πik` (Nyquist coefficient dropped). Exact for
/// band-limited input.
pub fn periodic_antiderivative_spectral(a: &[f64], mean_zero_tol: f64) -> Result<Vec<f64>> {
    check_mean_zero(a, mean_zero_tol)?;
    let n = a.len();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = a.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (i, c) in buf.iter_mut().enumerate() {
        let k = crate::torus::operator_mode(i, n);
        *c = if k == 0.0 { Complex64::default() } else { *c / Complex64::new(0.0, TAU * k) };
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    Ok(buf.iter().map(|c| c.re / n as f64).collect())
}

/// Spectral derivative of equispaced 1-periodic samples.
pub fn periodic_derivative(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = a.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (i, c) in buf.iter_mut().enumerate() {
        *c *= Complex64::new(0.0, TAU * crate::torus::operator_mode(i, n));
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Two-point probability measure `λ δ_{z1} + (1-λ) δ_{z2}`. Equal atoms are
/// allowed and treated as the degenerate case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiatomicMeasure {
    pub z1: [f64; 6],
    pub z2: [f64; 6],
    pub lambda: f64,
}

impl DiatomicMeasure {
    pub fn new(z1: [f64; 6], z2: [f64; 6], lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if z1.iter().chain(&z2).any(|v| !v.is_finite()) {
            return Err(Error::Argument("atoms must be finite".into()));
        }
        Ok(Self { z1, z2, lambda })
    }

    pub fn barycenter(&self) -> [f64; 6] {
        std::array::from_fn(|i| self.lambda * self.z1[i] + (1.0 - self.lambda) * self.z2[i])
    }

    pub fn jump(&self) -> [f64; 6] {
        std::array::from_fn(|i| self.z1[i] - self.z2[i])
    }

    pub fn is_degenerate(&self) -> bool {
        self.z1 == self.z2
    }

    /// `λ f(z1) + (1-λ) f(z2)`.
    pub fn integrate<F: Fn(&[f64; 6]) -> f64>(&self, f: F) -> f64 {
        self.lambda * f(&self.z1) + (1.0 - self.lambda) * f(&self.z2)
    }
}

/// Direction and oscillation count of a laminate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaminateProfile {
    /// Unit direction in unit-cell coordinates.
    pub direction: FrequencyVector,
    pub oscillations: u32,
}

impl LaminateProfile {
    /// `n·ω` must be an integer vector so that the phase is periodic on the
    /// unit cell.
    pub fn new(direction: FrequencyVector, oscillations: u32) -> Result<Self> {
        if oscillations == 0 {
            return Err(Error::Argument("oscillation count must be positive".into()));
        }
        if (direction.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!(
                "direction must be a unit vector, |ω| = {}",
                direction.norm()
            )));
        }
        for w in direction.to_array() {
            let nw = w * oscillations as f64;
            if (nw - nw.round()).abs() > 1e-9 {
                return Err(Error::Argument(format!(
                    "n·ω must be integral for a periodic laminate, got {nw}"
                )));
            }
        }
        Ok(Self { direction, oscillations })
    }

    /// Integer wave vector `n ω`.
    pub fn wave_numbers(&self) -> [f64; 3] {
        self.direction.to_array().map(|w| (w * self.oscillations as f64).round())
    }

    /// Phase `n ω·s` at unit-cell coordinates.
    pub fn phase(&self, s: [f64; 3]) -> f64 {
        let k = self.wave_numbers();
        k[0] * s[0] + k[1] * s[1] + k[2] * s[2]
    }

    /// Physical direction `κ = (ω_t/T, ω_x, ω_y)`.
    pub fn physical_direction(&self, period_t: f64) -> FrequencyVector {
        let [a, b, c] = self.direction.to_array();
        FrequencyVector::new(a / period_t, b, c)
    }
}

/// Checks `z1 - z2 ∈ ker A_E(κ)` and returns the relative residual.
pub fn wave_cone_residual(mu: &DiatomicMeasure, kappa: FrequencyVector) -> Result<f64> {
    let d = mu.jump();
    let nd = norm6(&d);
    if nd == 0.0 {
        return Ok(0.0);
    }
    let a = euler_symbol(kappa.normalized()).0;
    let r = a * DVector::from_row_slice(&d);
    let res = r.norm() / nd;
    if res > PRECONDITION_TOL {
        return Err(Error::NotWaveCone { distance: res, tolerance: PRECONDITION_TOL });
    }
    Ok(res)
}

/// Amplitude `ξ = B_E(κ)⁺ (z1 - z2)` of the rank-one potential, after checking
/// that it reproduces the jump.
pub fn potential_amplitude(mu: &DiatomicMeasure, kappa: FrequencyVector) -> Result<DVector<f64>> {
    wave_cone_residual(mu, kappa)?;
    let d = DVector::from_row_slice(&mu.jump());
    let b = potential_symbol(kappa).0;
    let xi = pseudoinverse(&crate::symbol::SymbolMatrix(b.clone())).0 * &d;
    let nd = d.norm();
    if nd > 0.0 {
        let res = (b * &xi - &d).norm() / nd;
        if res > PRECONDITION_TOL {
            return Err(Error::Precondition(format!(
                "jump is not in the image of the potential symbol: residual {res:.3e}"
            )));
        }
    }
    Ok(xi)
}

/// `barycenter + (z1 - z2) χ(n ω·s)` sampled on the grid.
pub fn laminate_field(
    mu: &DiatomicMeasure,
    prof: &LaminateProfile,
    grid: TorusGrid,
) -> Result<TorusField> {
    wave_cone_residual(mu, prof.physical_direction(grid.period_t))?;
    let bar = mu.barycenter();
    let d = mu.jump();
    let n = grid.len();
    let mut values = Vec::with_capacity(6 * n);
    for idx in 0..n {
        let c = chi_profile(mu.lambda, prof.phase(grid.unit_coords(idx)));
        values.extend((0..6).map(|i| bar[i] + d[i] * c));
    }
    TorusField::new(grid, 6, values)
}

/// Rank-one potential `ξ n⁻² ψ(n ω·s)` with `ψ'' = χ`, so that
/// `B_E u_n = (z1 - z2) χ(n ω·s)`.
pub fn laminate_potential(
    mu: &DiatomicMeasure,
    prof: &LaminateProfile,
    grid: TorusGrid,
) -> Result<TorusField> {
    let kappa = prof.physical_direction(grid.period_t);
    let xi = potential_amplitude(mu, kappa)?;
    let n2 = (prof.oscillations as f64).powi(2);
    let scale = 1.0 / n2;
    let mut values = Vec::with_capacity(9 * grid.len());
    for idx in 0..grid.len() {
        let p = chi_second_antiderivative(mu.lambda, prof.phase(grid.unit_coords(idx)));
        values.extend(xi.iter().map(|x| x * p * scale));
    }
    TorusField::new(grid, 9, values)
}

/// Closed-form `‖D² u_n‖_∞` of [`laminate_potential`] (Frobenius over
/// components and derivative pairs).
pub fn laminate_potential_hessian_sup(
    mu: &DiatomicMeasure,
    prof: &LaminateProfile,
    period_t: f64,
) -> Result<f64> {
    let kappa = prof.physical_direction(period_t);
    let xi = potential_amplitude(mu, kappa)?;
    let chi_sup = mu.lambda.max(1.0 - mu.lambda);
    Ok(xi.norm() * chi_sup)
}

/// Profile `χ` convolved with a periodic Gaussian, and its antiderivatives,
/// tabulated for cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct SmoothedProfile {
    lambda: f64,
    width: f64,
    tables: Option<[Vec<f64>; 4]>,
}

impl SmoothedProfile {
    /// `width` is the mollifier scale in the phase variable; each Fourier
    /// mode `k` is damped by `exp(-width² (2πk)²)`. A zero width gives the
    /// exact piecewise profile.
    pub fn new(lambda: f64, width: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if width == 0.0 {
            return Ok(Self { lambda, width, tables: None });
        }
        if !(width >= 1e-4 && width.is_finite()) {
            return Err(Error::Argument(format!(
                "mollifier width must be 0 or at least 1e-4, got {width}"
            )));
        }
        let kmax = (45.0f64.sqrt() / (TAU * width)).ceil() as usize;
        let n = (8 * kmax).next_power_of_two().max(4096);
        let mut planner = FftPlanner::new();
        let inv = planner.plan_fft_inverse(n);
        let mut coeffs = [
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
            vec![Complex64::default(); n],
        ];
        for k in 1..=kmax as i64 {
            for sk in [k, -k] {
                let ik = Complex64::new(0.0, TAU * sk as f64);
                let chi = (Complex64::new(1.0, 0.0) - (-ik * lambda).exp()) / ik;
                let damp = (-(width * TAU * sk as f64).powi(2)).exp();
                let c = chi * damp;
                let slot = sk.rem_euclid(n as i64) as usize;
                coeffs[0][slot] = c / (ik * ik);
                coeffs[1][slot] = c / ik;
                coeffs[2][slot] = c;
                coeffs[3][slot] = c * ik;
            }
        }
        let tables = coeffs.map(|mut c| {
            inv.process(&mut c);
            c.into_iter().map(|v| v.re).collect::<Vec<f64>>()
        });
        Ok(Self { lambda, width, tables: Some(tables) })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    fn hermite(tables: &[Vec<f64>; 4], order: usize, u: f64) -> f64 {
        let f = &tables[order];
        let df = &tables[order + 1];
        let n = f.len();
        let x = (u - u.floor()) * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        let j = (i + 1) % n;
        let t = x - i as f64;
        let h = 1.0 / n as f64;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * f[i]
            + (t3 - 2.0 * t2 + t) * h * df[i]
            + (-2.0 * t3 + 3.0 * t2) * f[j]
            + (t3 - t2) * h * df[j]
    }

    /// `(ψ, ψ', ψ'')` at phase `u`.
    pub fn eval(&self, u: f64) -> [f64; 3] {
        match &self.tables {
            None => [
                chi_second_antiderivative(self.lambda, u),
                chi_antiderivative(self.lambda, u),
                chi_profile(self.lambda, u),
            ],
            Some(t) => [
                Self::hermite(t, 0, u),
                Self::hermite(t, 1, u),
                Self::hermite(t, 2, u),
            ],
        }
    }

    /// Sup bounds of `(|ψ|, |ψ'|, |ψ''|)`; mollification does not increase them.
    pub fn sup_bounds(&self) -> [f64; 3] {
        let l = self.lambda;
        let psi_sup = (0..=4000)
            .map(|i| chi_second_antiderivative(l, i as f64 / 4000.0).abs())
            .fold(0.0, f64::max);
        [psi_sup, 0.5 * l * (1.0 - l), l.max(1.0 - l)]
    }
}

/// Smooth cutoff of the unit interval: vanishes with two derivatives at the
/// endpoints and equals 1 on `[δ, 1-δ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cutoff {
    pub delta: f64,
}

fn smoothstep(u: f64) -> [f64; 3] {
    if u <= 0.0 {
        [0.0, 0.0, 0.0]
    } else if u >= 1.0 {
        [1.0, 0.0, 0.0]
    } else {
        let u2 = u * u;
        [
            u2 * u * (10.0 - 15.0 * u + 6.0 * u2),
            30.0 * u2 * (1.0 - u) * (1.0 - u),
            60.0 * u * (1.0 - u) * (1.0 - 2.0 * u),
        ]
    }
}

impl Cutoff {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 0.5) {
            return Err(Error::Argument(format!("cutoff width must lie in (0, 0.5], got {delta}")));
        }
        Ok(Self { delta })
    }

    /// `(h, h', h'')` on the unit interval; zero outside `(0, 1)`.
    pub fn eval(&self, s: f64) -> [f64; 3] {
        let d = self.delta;
        let [a, da, dda] = smoothstep(s / d);
        let [b, db, ddb] = smoothstep((1.0 - s) / d);
        [
            a * b,
            (da * b - a * db) / d,
            (dda * b - 2.0 * da * db + a * ddb) / (d * d),
        ]
    }

    /// Sup bounds of `(|h'|, |h''|)`.
    pub fn derivative_bounds(&self) -> [f64; 2] {
        // 15/8 and 10/√3 are the maxima of the quintic smoothstep derivatives
        [15.0 / 8.0 / self.delta, 10.0 / 3f64.sqrt() / self.delta.powi(2)]
    }
}

/// Scalar witness profile `S(s) = n⁻² ψ̃(n ω·s) φ(s)` with its physical
/// gradient-free Hessian.
#[derive(Debug, Clone)]
pub struct ScalarWitness {
    profile: SmoothedProfile,
    cutoff: Cutoff,
    wave: [f64; 3],
    n: f64,
    scale: [f64; 3],
}

impl ScalarWitness {
    pub fn new(lambda: f64, prof: &LaminateProfile, delta: f64, period_t: f64) -> Result<Self> {
        Ok(Self {
            profile: SmoothedProfile::new(lambda, delta)?,
            cutoff: Cutoff::new(delta)?,
            wave: prof.wave_numbers(),
            n: prof.oscillations as f64,
            scale: [1.0 / period_t, 1.0, 1.0],
        })
    }

    /// Value and physical Hessian at unit-cell coordinates.
    pub fn eval(&self, s: [f64; 3]) -> (f64, [[f64; 3]; 3]) {
        let u = self.wave[0] * s[0] + self.wave[1] * s[1] + self.wave[2] * s[2];
        let [p0, p1, p2] = self.profile.eval(u);
        let h: [[f64; 3]; 3] = [self.cutoff.eval(s[0]), self.cutoff.eval(s[1]), self.cutoff.eval(s[2])];
        let phi = h[0][0] * h[1][0] * h[2][0];
        let grad: [f64; 3] = [
            h[0][1] * h[1][0] * h[2][0],
            h[0][0] * h[1][1] * h[2][0],
            h[0][0] * h[1][0] * h[2][1],
        ];
        let mut hess = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let phi_ab = if a == b {
                    let mut v = h[a][2];
                    for (c, hc) in h.iter().enumerate() {
                        if c != a {
                            v *= hc[0];
                        }
                    }
                    v
                } else {
                    let mut v = h[a][1] * h[b][1];
                    for (c, hc) in h.iter().enumerate() {
                        if c != a && c != b {
                            v *= hc[0];
                        }
                    }
                    v
                };
                // ∂_a∂_b [n⁻² ψ(u) φ] in unit coordinates, with ∂_a u = wave_a
                let v = p2 * self.wave[a] * self.wave[b] * phi / (self.n * self.n)
                    + p1 * (self.wave[a] * grad[b] + self.wave[b] * grad[a]) / (self.n * self.n)
                    + p0 * phi_ab / (self.n * self.n);
                hess[a][b] = v * self.scale[a] * self.scale[b];
            }
        }
        (p0 * phi / (self.n * self.n), hess)
    }

    /// A priori bound `A + B/n` on the Frobenius norm of the Hessian, returned
    /// as `(A, B)`.
    pub fn hessian_bound(&self) -> (f64, f64) {
        let [ps0, ps1, ps2] = self.profile.sup_bounds();
        let [dh, ddh] = self.cutoff.derivative_bounds();
        let kphys: [f64; 3] = std::array::from_fn(|a| self.wave[a] * self.scale[a] / self.n);
        let knorm = kphys.iter().map(|v| v * v).sum::<f64>().sqrt();
        let grad_bound = self.scale.iter().map(|s| (s * dh).powi(2)).sum::<f64>().sqrt();
        let mut hess_bound = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                let m = if a == b { ddh } else { dh * dh };
                hess_bound += (self.scale[a] * self.scale[b] * m).powi(2);
            }
        }
        let hess_bound = hess_bound.sqrt();
        let a = ps2 * knorm * knorm;
        let b = 2.0 * ps1 * knorm * grad_bound + ps0 * hess_bound / self.n;
        (a, b)
    }
}

/// Grid samples of the cutoff, mollified laminate potential
/// `ũ = ξ n⁻² ψ̃(n ω·s) φ_δ(s)`.
pub fn laminate_witness(
    mu: &DiatomicMeasure,
    prof: &LaminateProfile,
    grid: TorusGrid,
    delta: f64,
) -> Result<TorusField> {
    let kappa = prof.physical_direction(grid.period_t);
    let xi = potential_amplitude(mu, kappa)?;
    let w = ScalarWitness::new(mu.lambda, prof, delta, grid.period_t)?;
    let mut values = Vec::with_capacity(9 * grid.len());
    for idx in 0..grid.len() {
        let (s, _) = w.eval(grid.unit_coords(idx));
        values.extend(xi.iter().map(|x| x * s));
    }
    TorusField::new(grid, 9, values)
}

/// Weighted point cloud of 6-vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    samples: Vec<[f64; 6]>,
    weights: Vec<f64>,
}

impl EmpiricalMeasure {
    /// Uniform weights over all grid points.
    pub fn uniform(field: &TorusField) -> Result<Self> {
        Self::windowed(field, |_| true)
    }

    /// Uniform weights over grid points whose unit-cell coordinates satisfy
    /// `keep`; localises the measure to a subregion of the cell.
    pub fn windowed<F: Fn([f64; 3]) -> bool>(field: &TorusField, keep: F) -> Result<Self> {
        if field.components() != 6 {
            return Err(Error::Argument("empirical measures need 6-component fields".into()));
        }
        let g = field.grid();
        let samples: Vec<[f64; 6]> = (0..g.len())
            .filter(|&i| keep(g.unit_coords(i)))
            .map(|i| field.point(i).try_into().expect("6 components"))
            .collect();
        if samples.is_empty() {
            return Err(Error::Argument("window contains no grid points".into()));
        }
        let w = 1.0 / samples.len() as f64;
        let weights = vec![w; samples.len()];
        Ok(Self { samples, weights })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[[f64; 6]] {
        &self.samples
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ f dν`.
    pub fn integrate<F: Fn(&[f64; 6]) -> f64>(&self, f: F) -> f64 {
        self.samples.iter().zip(&self.weights).map(|(z, w)| w * f(z)).sum()
    }

    pub fn mean(&self) -> [f64; 6] {
        std::array::from_fn(|i| self.integrate(|z| z[i]))
    }

    /// `|∫ f dν - target|`.
    pub fn test_against<F: Fn(&[f64; 6]) -> f64>(&self, f: F, target: f64) -> f64 {
        (self.integrate(f) - target).abs()
    }

    /// Weight carried by samples within `tol` of one of `atoms`.
    pub fn mass_near(&self, atoms: &[[f64; 6]], tol: f64) -> f64 {
        self.samples
            .iter()
            .zip(&self.weights)
            .filter(|(z, _)| {
                atoms.iter().any(|a| {
                    let d: [f64; 6] = std::array::from_fn(|i| z[i] - a[i]);
                    norm6(&d) <= tol
                })
            })
            .map(|(_, w)| w)
            .sum()
    }

    /// Histogram of one component as CSV rows `lo,hi,weight`.
    pub fn write_histogram_csv<W: Write>(&self, mut out: W, component: usize, bins: usize) -> Result<()> {
        if component >= 6 || bins == 0 {
            return Err(Error::Argument("bad histogram component or bin count".into()));
        }
        let vals: Vec<f64> = self.samples.iter().map(|z| z[component]).collect();
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
        let mut counts = vec![0.0; bins];
        for (v, w) in vals.iter().zip(&self.weights) {
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += w;
        }
        writeln!(out, "lo,hi,weight")?;
        for (b, c) in counts.iter().enumerate() {
            let a = lo + b as f64 * width;
            writeln!(out, "{:.17e},{:.17e},{:.17e}", a, a + width, c)?;
        }
        Ok(())
    }
}

/// Monomial `coeff · Π z_i^{p_i}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Monomial {
    pub coeff: f64,
    pub powers: [u32; 6],
}

/// Polynomial test function over the six state components.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polynomial {
    pub terms: Vec<Monomial>,
}

impl Polynomial {
    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn constant(c: f64) -> Self {
        Self { terms: vec![Monomial { coeff: c, powers: [0; 6] }] }
    }

    pub fn linear(c: [f64; 6]) -> Self {
        let terms = (0..6)
            .filter(|&i| c[i] != 0.0)
            .map(|i| {
                let mut p = [0; 6];
                p[i] = 1;
                Monomial { coeff: c[i], powers: p }
            })
            .collect();
        Self { terms }
    }

    /// `scale · |z|²`.
    pub fn squared_norm(scale: f64) -> Self {
        let terms = (0..6)
            .map(|i| {
                let mut p = [0; 6];
                p[i] = 2;
                Monomial { coeff: scale, powers: p }
            })
            .collect();
        Self { terms }
    }

    pub fn plus(mut self, other: Polynomial) -> Self {
        self.terms.extend(other.terms);
        self
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|t| t.powers.iter().sum()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[f64; 6]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.powers
                    .iter()
                    .zip(z)
                    .fold(t.coeff, |acc, (&p, &v)| acc * v.powi(p as i32))
            })
            .sum()
    }
}

/// A potential accepted by the envelope estimator together with its measured
/// derivative bound and the perturbation `B_E w`.
#[derive(Debug, Clone)]
pub struct CheckedWitness {
    pub hessian_sup: f64,
    pub perturbation: TorusField,
}

fn boundary_value(w: &TorusField) -> f64 {
    let g = w.grid();
    let mut m: f64 = 0.0;
    for idx in 0..g.len() {
        let [it, ix, iy] = g.unravel(idx);
        if it == 0 || ix == 0 || iy == 0 {
            m = w.point(idx).iter().fold(m, |a, v| a.max(v.abs()));
        }
    }
    m
}

/// Verifies that a 9-component potential vanishes on the cell boundary
/// planes and measures its spectral `‖D²w‖_∞`.
pub fn check_witness(w: &TorusField) -> Result<CheckedWitness> {
    if w.components() != 9 {
        return Err(Error::Argument("witness potentials need 9 components".into()));
    }
    let b = boundary_value(w);
    if b > 1e-12 * w.max_abs().max(1.0) {
        return Err(Error::NotCompactlySupported { boundary: b });
    }
    Ok(CheckedWitness {
        hessian_sup: second_derivative_sup(w),
        perturbation: apply_potential_operator(w)?,
    })
}

fn grid_mean_shifted<F: Fn(&[f64; 6]) -> f64>(f: &F, z: &[f64; 6], pert: &TorusField) -> f64 {
    let n = pert.grid().len();
    (0..n)
        .map(|i| {
            let p = pert.point(i);
            f(&std::array::from_fn(|c| z[c] + p[c]))
        })
        .sum::<f64>()
        / n as f64
}

/// Upper bound on `Q^q f(z)`: the minimum of `f(z)` and the cell averages
/// `mean f(z + B_E w)` over the supplied witnesses. Every witness must satisfy
/// `‖D²w‖_∞ ≤ q`.
pub fn envelope_upper_bound<F: Fn(&[f64; 6]) -> f64>(
    f: F,
    z: &[f64; 6],
    q: f64,
    witnesses: &[TorusField],
) -> Result<f64> {
    let mut est = EnvelopeEstimator::new();
    for w in witnesses {
        let c = est.add(w)?;
        if c > q * (1.0 + 1e-12) {
            return Err(Error::DerivativeBound { measured: c, bound: q });
        }
    }
    Ok(est.upper_bound(&f, z, q))
}

/// Witness family filtered by derivative bound; the estimate is
/// nonincreasing in `q` because the admissible families are nested.
#[derive(Debug, Clone, Default)]
pub struct EnvelopeEstimator {
    witnesses: Vec<CheckedWitness>,
}

impl EnvelopeEstimator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Checks and stores a witness; returns its measured `‖D²w‖_∞`.
    pub fn add(&mut self, w: &TorusField) -> Result<f64> {
        let c = check_witness(w)?;
        let s = c.hessian_sup;
        self.witnesses.push(c);
        Ok(s)
    }

    pub fn witnesses(&self) -> &[CheckedWitness] {
        &self.witnesses
    }

    pub fn upper_bound<F: Fn(&[f64; 6]) -> f64>(&self, f: &F, z: &[f64; 6], q: f64) -> f64 {
        self.witnesses
            .iter()
            .filter(|w| w.hessian_sup <= q * (1.0 + 1e-12))
            .map(|w| grid_mean_shifted(f, z, &w.perturbation))
            .fold(f(z), f64::min)
    }
}

/// Evaluation settings of [`jensen_witness_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenOptions {
    /// Cutoff width; the phase profile is mollified at the same scale, i.e.
    /// at `δ/n` in cell units.
    pub delta: f64,
    /// Points per cell axis transverse to the oscillation.
    pub base_points: usize,
    /// Points per oscillation period along the direction.
    pub points_per_period: usize,
    pub period_t: f64,
}

impl Default for JensenOptions {
    fn default() -> Self {
        Self { delta: 0.02, base_points: 64, points_per_period: 8, period_t: 1.0 }
    }
}

/// Outcome of [`jensen_witness_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JensenReport {
    pub n: u32,
    /// `mean f(barycenter + B_E ũ)`.
    pub witness_value: f64,
    /// `λ f(z1) + (1-λ) f(z2)`.
    pub diatomic_value: f64,
    pub eps: f64,
    /// `diatomic_value + eps - witness_value`.
    pub jensen_margin: f64,
    pub jensen_holds: bool,
    /// Measured `‖D²ũ‖_∞`.
    pub hessian_sup: f64,
    pub jump_norm: f64,
    /// `‖D²ũ‖_∞ / (|z1 - z2| (1 + 1/√n))`.
    pub c_measured: f64,
    /// A priori constant from the product rule.
    pub c_bound: f64,
    pub derivative_margin: f64,
    pub derivative_holds: bool,
    pub points: usize,
}

/// Builds the cutoff, mollified laminate witness and evaluates it in closed
/// form on a tensor grid of the unit cell.
pub fn jensen_witness_check<F: Fn(&[f64; 6]) -> f64>(
    mu: &DiatomicMeasure,
    prof: &LaminateProfile,
    f: F,
    eps: f64,
    opts: &JensenOptions,
) -> Result<JensenReport> {
    let n = prof.oscillations;
    let bar = mu.barycenter();
    let diatomic_value = mu.integrate(&f);
    let jump_norm = norm6(&mu.jump());
    let factor = 1.0 + 1.0 / (n as f64).sqrt();
    if mu.is_degenerate() {
        let v = f(&mu.z1);
        return Ok(JensenReport {
            n,
            witness_value: v,
            diatomic_value,
            eps,
            jensen_margin: diatomic_value + eps - v,
            jensen_holds: v <= diatomic_value + eps,
            hessian_sup: 0.0,
            jump_norm: 0.0,
            c_measured: 0.0,
            c_bound: 0.0,
            derivative_margin: 0.0,
            derivative_holds: true,
            points: 1,
        });
    }
    let kappa = prof.physical_direction(opts.period_t);
    let xi = potential_amplitude(mu, kappa)?;
    let w = ScalarWitness::new(mu.lambda, prof, opts.delta, opts.period_t)?;
    let stencil = PotentialStencil::new();
    let mut cols = [[DVector::<f64>::zeros(6), DVector::zeros(6), DVector::zeros(6)],
        [DVector::zeros(6), DVector::zeros(6), DVector::zeros(6)],
        [DVector::zeros(6), DVector::zeros(6), DVector::zeros(6)]];
    for (a, row) in cols.iter_mut().enumerate() {
        for (b, c) in row.iter_mut().enumerate() {
            *c = stencil.coefficient(a, b) * &xi;
        }
    }
    let cols: Vec<Vec<[f64; 6]>> = cols
        .iter()
        .map(|row| row.iter().map(|c| std::array::from_fn(|i| c[i])).collect())
        .collect();
    let wave = prof.wave_numbers();
    let sizes: [usize; 3] = std::array::from_fn(|a| {
        let along = (opts.points_per_period as f64 * wave[a].abs()).ceil() as usize;
        opts.base_points.max(along).max(1)
    });
    let xi_norm = xi.norm();
    let mut total = 0.0;
    let mut hsup: f64 = 0.0;
    let count = sizes[0] * sizes[1] * sizes[2];
    for it in 0..sizes[0] {
        for ix in 0..sizes[1] {
            for iy in 0..sizes[2] {
                let s = [
                    (it as f64 + 0.5) / sizes[0] as f64,
                    (ix as f64 + 0.5) / sizes[1] as f64,
                    (iy as f64 + 0.5) / sizes[2] as f64,
                ];
                let (_, h) = w.eval(s);
                let mut z = bar;
                let mut fro = 0.0;
                for a in 0..3 {
                    for b in 0..3 {
                        fro += h[a][b] * h[a][b];
                        let c = &cols[a][b];
                        for i in 0..6 {
                            z[i] += h[a][b] * c[i];
                        }
                    }
                }
                hsup = hsup.max(fro.sqrt());
                total += f(&z);
            }
        }
    }
    let witness_value = total / count as f64;
    let hessian_sup = hsup * xi_norm;
    let (a, b) = w.hessian_bound();
    let c_bound = xi_norm * a.max(b) / jump_norm;
    let c_measured = hessian_sup / (jump_norm * factor);
    let allowed = c_bound * jump_norm * factor;
    Ok(JensenReport {
        n,
        witness_value,
        diatomic_value,
        eps,
        jensen_margin: diatomic_value + eps - witness_value,
        jensen_holds: witness_value <= diatomic_value + eps,
        hessian_sup,
        jump_norm,
        c_measured,
        c_bound,
        derivative_margin: allowed - hessian_sup,
        derivative_holds: hessian_sup <= allowed,
        points: count,
    })
}

/// `‖B_E(κ)⁺‖` on the unit sphere direction of `κ`, i.e. the factor relating
/// `|ξ|` to the jump.
pub fn amplitude_gain(kappa: FrequencyVector) -> f64 {
    let p: DMatrix<f64> = pseudoinverse(&potential_symbol(kappa)).0;
    p.svd(false, false).singular_values.max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{lift, FluidState};
    use crate::torus::apply_euler_operator;

    fn shear_pair(lambda: f64) -> DiatomicMeasure {
        let z1 = lift(&FluidState::new(1.0, [0.0, 0.0]).unwrap()).unwrap().to_vector();
        let z2 = lift(&FluidState::new(1.0, [1.0, 0.0]).unwrap()).unwrap().to_vector();
        DiatomicMeasure::new(z1, z2, lambda).unwrap()
    }

    fn y_profile(n: u32) -> LaminateProfile {
        LaminateProfile::new(FrequencyVector::new(0.0, 0.0, 1.0), n).unwrap()
    }

    #[test]
    fn chi_values() {
        assert_eq!(chi_profile(0.5, 0.25), 0.5);
        assert_eq!(chi_profile(0.3, 0.9), -0.3);
        assert_eq!(chi_profile(0.3, 1.1), 0.7);
        let l: f64 = 0.3;
        assert!((l * (1.0 - l) + (1.0 - l) * (-l)).abs() < 1e-16);
    }

    #[test]
    fn closed_form_antiderivatives() {
        for &l in &[0.2, 0.5, 0.73] {
            let n = 20000;
            let s: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
            let p1: Vec<f64> = s.iter().map(|&u| chi_antiderivative(l, u)).collect();
            let p2: Vec<f64> = s.iter().map(|&u| chi_second_antiderivative(l, u)).collect();
            assert!(p1.iter().sum::<f64>().abs() / (n as f64) < 1e-9);
            assert!(p2.iter().sum::<f64>().abs() / (n as f64) < 1e-9);
            let h = 1e-6;
            for &u in &[0.05, 0.4, 0.9] {
                let d1 = (chi_antiderivative(l, u + h) - chi_antiderivative(l, u - h)) / (2.0 * h);
                let d2 = (chi_second_antiderivative(l, u + h) - chi_second_antiderivative(l, u - h))
                    / (2.0 * h);
                if (u - l).abs() > 1e-3 {
                    assert!((d1 - chi_profile(l, u)).abs() < 1e-6);
                }
                assert!((d2 - chi_antiderivative(l, u)).abs() < 1e-6);
            }
            // continuity across 0 ≡ 1
            assert!((chi_second_antiderivative(l, 1.0 - 1e-12) - chi_second_antiderivative(l, 0.0)).abs() < 1e-9);
            assert!(p1.iter().all(|v| v.abs() <= 1.0));
        }
    }

    #[test]
    fn trapezoid_antiderivative_of_cosine() {
        let n = 256;
        let a: Vec<f64> = (0..n).map(|i| (TAU * i as f64 / n as f64).cos()).collect();
        let f = periodic_antiderivative(&a, 1e-12).unwrap();
        for (i, v) in f.iter().enumerate() {
            let exact = (TAU * i as f64 / n as f64).sin() / TAU;
            assert!((v - exact).abs() < 1e-4);
        }
        let g = periodic_antiderivative_spectral(&a, 1e-12).unwrap();
        for (i, v) in g.iter().enumerate() {
            assert!((v - (TAU * i as f64 / n as f64).sin() / TAU).abs() < 1e-14);
        }
        let d = periodic_derivative(&g);
        assert!(d.iter().zip(&a).all(|(x, y)| (x - y).abs() < 1e-12));
        assert!(matches!(
            periodic_antiderivative(&vec![1.0; 8], 1e-12),
            Err(Error::MeanNotZero { .. })
        ));
    }

    #[test]
    fn trapezoid_of_chi_matches_closed_form() {
        let l = 0.25;
        let n = 64;
        let a: Vec<f64> = (0..n).map(|i| chi_profile(l, i as f64 / n as f64)).collect();
        // grid samples of a step are not mean zero in general; here λ n is integral
        let f = periodic_antiderivative(&a, 1e-12).unwrap();
        assert!(f.iter().all(|v| v.abs() <= 1.0));
        let exact: Vec<f64> = (0..n).map(|i| chi_antiderivative(l, i as f64 / n as f64)).collect();
        let err = f.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 0.5 / n as f64, "err {err}");
    }

    #[test]
    fn smoothed_profile_is_consistent() {
        let p = SmoothedProfile::new(0.3, 0.02).unwrap();
        let exact = SmoothedProfile::new(0.3, 0.0).unwrap();
        let [b0, b1, b2] = exact.sup_bounds();
        let h = 1e-5;
        for i in 0..200 {
            let u = i as f64 / 200.0 + 0.001;
            let [p0, p1, p2] = p.eval(u);
            assert!(p0.abs() <= b0 + 1e-9 && p1.abs() <= b1 + 1e-9 && p2.abs() <= b2 + 1e-9);
            let d0 = (p.eval(u + h)[0] - p.eval(u - h)[0]) / (2.0 * h);
            assert!((d0 - p1).abs() < 1e-6);
            // far from the jumps the smoothed profile equals the exact one
            if (u - 0.3).abs() > 0.2 && u > 0.2 && u < 0.8 {
                assert!((p2 - exact.eval(u)[2]).abs() < 1e-8, "u={u}");
            }
        }
        assert!(SmoothedProfile::new(0.3, 1e-6).is_err());
    }

    #[test]
    fn cutoff_derivatives() {
        let c = Cutoff::new(0.1).unwrap();
        assert_eq!(c.eval(0.0)[0], 0.0);
        assert_eq!(c.eval(0.5), [1.0, 0.0, 0.0]);
        let h = 1e-6;
        let [bd, bdd] = c.derivative_bounds();
        for i in 1..100 {
            let s = i as f64 / 100.0;
            let e = c.eval(s);
            let d = (c.eval(s + h)[0] - c.eval(s - h)[0]) / (2.0 * h);
            assert!((d - e[1]).abs() < 1e-4);
            assert!(e[1].abs() <= bd * (1.0 + 1e-12) && e[2].abs() <= bdd * (1.0 + 1e-12));
        }
    }

    #[test]
    fn laminate_field_mean_and_values() {
        let mu = shear_pair(0.5);
        let g = TorusGrid::new(4, 4, 256, 1.0).unwrap();
        let f = laminate_field(&mu, &y_profile(16), g).unwrap();
        let m = f.mean();
        let bar = mu.barycenter();
        assert!(m.iter().zip(&bar).all(|(a, b)| (a - b).abs() < 1e-12));
        let em = EmpiricalMeasure::uniform(&f).unwrap();
        assert!((em.mass_near(&[mu.z1, mu.z2], 1e-9) - 1.0).abs() < 1e-12);
        assert!((em.mass_near(&[mu.z1], 1e-9) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn laminate_one_oscillation_branch_fraction() {
        let mu = shear_pair(0.5);
        let g = TorusGrid::new(4, 4, 64, 1.0).unwrap();
        let f = laminate_field(&mu, &y_profile(1), g).unwrap();
        let frac = EmpiricalMeasure::uniform(&f).unwrap().mass_near(&[mu.z1], 1e-9);
        assert!((frac - 0.5).abs() <= 2.0);
    }

    #[test]
    fn laminate_rejects_non_wave_cone_pair() {
        let z1 = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        let z2 = [1.0, 0.0, 0.0, 0.0, 0.0, 2.0];
        let mu = DiatomicMeasure::new(z1, z2, 0.5).unwrap();
        let g = TorusGrid::cube(8).unwrap();
        assert!(matches!(
            laminate_field(&mu, &y_profile(1), g),
            Err(Error::NotWaveCone { .. })
        ));
    }

    #[test]
    fn laminate_afree_after_mollification() {
        let mu = shear_pair(0.5);
        let g = TorusGrid::new(4, 4, 128, 1.0).unwrap();
        let f = laminate_field(&mu, &y_profile(4), g).unwrap();
        let m = crate::torus::mollify(&f, 0.01).unwrap();
        let r = apply_euler_operator(&m).unwrap();
        assert!(r.rms() <= 1e-10 * m.rms());
    }

    #[test]
    fn laminate_potential_matches_field() {
        let mu = shear_pair(0.5);
        let mut errs = Vec::new();
        for ny in [64, 256] {
            let g = TorusGrid::new(4, 4, ny, 1.0).unwrap();
            let prof = y_profile(2);
            let u = laminate_potential(&mu, &prof, g).unwrap();
            let z = apply_potential_operator(&u).unwrap().shift(&mu.barycenter()).unwrap();
            let f = laminate_field(&mu, &prof, g).unwrap();
            errs.push(z.sub(&f).unwrap().l2_norm());
        }
        assert!(errs[1] < errs[0], "{errs:?}");
        let g = TorusGrid::new(4, 4, 64, 1.0).unwrap();
        let a4 = laminate_potential(&mu, &y_profile(4), g).unwrap().max_abs();
        let a8 = laminate_potential(&mu, &y_profile(8), g).unwrap().max_abs();
        assert!((a4 / a8 - 4.0).abs() < 1e-9);
        let sup = laminate_potential_hessian_sup(&mu, &y_profile(4), 1.0).unwrap();
        assert!(sup.is_finite() && sup > 0.0);
    }

    #[test]
    fn empirical_measure_trivia() {
        let g = TorusGrid::cube(4).unwrap();
        let c = [1.0, 2.0, 0.0, 0.5, 0.0, 3.0];
        let f = TorusField::constant(g, &c);
        let em = EmpiricalMeasure::uniform(&f).unwrap();
        let p = Polynomial::squared_norm(1.0).plus(Polynomial::linear([1.0; 6]));
        assert_eq!(em.test_against(|z| p.eval(z), p.eval(&c)), 0.0);
        let mut buf = Vec::new();
        em.write_histogram_csv(&mut buf, 0, 4).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 5);
    }

    #[test]
    fn polynomial_json() {
        let p = Polynomial::from_json(r#"{"terms":[{"coeff":2.0,"powers":[1,0,0,0,0,2]}]}"#).unwrap();
        assert_eq!(p.eval(&[3.0, 0.0, 0.0, 0.0, 0.0, 2.0]), 24.0);
        assert_eq!(p.degree(), 3);
        assert!(Polynomial::from_json(r#"{"terms":[],"extra":1}"#).is_err());
    }

    #[test]
    fn envelope_trivia() {
        let z = [1.0, 0.2, 0.0, 0.1, 0.0, 1.5];
        let f = |v: &[f64; 6]| v.iter().map(|a| a * a).sum::<f64>();
        assert_eq!(envelope_upper_bound(f, &z, 1.0, &[]).unwrap(), f(&z));
        let mu = shear_pair(0.5);
        let g = TorusGrid::new(16, 16, 32, 1.0).unwrap();
        let w = laminate_witness(&mu, &y_profile(2), g, 0.25).unwrap();
        let q = check_witness(&w).unwrap().hessian_sup;
        // Jensen: a convex f cannot be lowered by a mean-zero perturbation
        let v = envelope_upper_bound(f, &z, q, &[w.clone()]).unwrap();
        assert!((v - f(&z)).abs() < 1e-12);
        assert!(matches!(
            envelope_upper_bound(f, &z, 0.5 * q, &[w]),
            Err(Error::DerivativeBound { .. })
        ));
    }

    #[test]
    fn envelope_concave_and_monotone() {
        let mu = shear_pair(0.5);
        let f = |v: &[f64; 6]| -v.iter().map(|a| a * a).sum::<f64>();
        let bar = mu.barycenter();
        let g = TorusGrid::new(32, 32, 64, 1.0).unwrap();
        let mut est = EnvelopeEstimator::new();
        let mut qs = Vec::new();
        for (n, d) in [(1, 0.3), (2, 0.2), (4, 0.15)] {
            qs.push(est.add(&laminate_witness(&mu, &y_profile(n), g, d).unwrap()).unwrap());
        }
        let mut prev = f64::INFINITY;
        let mut grid_q: Vec<f64> = qs.clone();
        grid_q.insert(0, 0.0);
        grid_q.sort_by(f64::total_cmp);
        for q in grid_q {
            let v = est.upper_bound(&f, &bar, q);
            assert!(v <= prev + 1e-15);
            prev = v;
        }
        let target = mu.integrate(f);
        assert!(prev < f(&bar) - 0.01, "{prev} vs {}", f(&bar));
        assert!(prev >= target - 0.5);
    }

    #[test]
    fn witness_support_is_checked() {
        let g = TorusGrid::cube(8).unwrap();
        let w = TorusField::constant(g, &[1.0; 9]);
        assert!(matches!(check_witness(&w), Err(Error::NotCompactlySupported { .. })));
    }

    #[test]
    fn jensen_quadratic_and_convex() {
        let mu = shear_pair(0.5);
        let prof = y_profile(32);
        let opts = JensenOptions { base_points: 32, ..Default::default() };
        let neg = |v: &[f64; 6]| -v.iter().map(|a| a * a).sum::<f64>();
        let r = jensen_witness_check(&mu, &prof, neg, 0.05, &opts).unwrap();
        assert!(r.jensen_holds, "{r:?}");
        assert!(r.derivative_holds, "{r:?}");
        let pos = |v: &[f64; 6]| v.iter().map(|a| a * a).sum::<f64>();
        let r = jensen_witness_check(&mu, &prof, pos, 0.0, &opts).unwrap();
        // convex f: the witness value lies between f(bar) and the diatomic value
        assert!(r.witness_value <= r.diatomic_value + 1e-9, "{r:?}");
        let deg = DiatomicMeasure::new(mu.z1, mu.z1, 0.5).unwrap();
        let r = jensen_witness_check(&deg, &prof, pos, 0.0, &opts).unwrap();
        assert_eq!(r.witness_value, r.diatomic_value);
    }
}
