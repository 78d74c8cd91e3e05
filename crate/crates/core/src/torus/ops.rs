use nalgebra::DMatrix;
use num_complex::Complex64;

use super::fft::{forward_transform, inverse_transform, Spectrum};
use super::{operator_mode, signed_mode, TorusField, TorusGrid};
use crate::error::{Error, Result};
use crate::states::{pressure, GAMMA};
use crate::symbol::{
    euler_symbol, potential_symbol, pseudoinverse, FrequencyVector,
};

const TAU: f64 = std::f64::consts::TAU;
const I: Complex64 = Complex64::new(0.0, 1.0);

/// Angular wavevector `2π (k_t/T, k_x, k_y)` of every stored mode, with the
/// Nyquist index mapped to zero (operator convention).
pub fn wavevectors(grid: &TorusGrid) -> Vec<[f64; 3]> {
    let p = grid.periods();
    (0..grid.len())
        .map(|idx| {
            let [it, ix, iy] = grid.unravel(idx);
            [
                TAU * operator_mode(it, grid.n_t) / p[0],
                TAU * operator_mode(ix, grid.n_x) / p[1],
                TAU * operator_mode(iy, grid.n_y) / p[2],
            ]
        })
        .collect()
}

/// `|2π k_phys|²` with the Nyquist index kept at magnitude `n/2`; used by
/// even (radial) multipliers.
fn even_wavenumber_sq(grid: &TorusGrid, idx: usize) -> f64 {
    let [it, ix, iy] = grid.unravel(idx);
    let p = grid.periods();
    let kt = TAU * signed_mode(it, grid.n_t) as f64 / p[0];
    let kx = TAU * signed_mode(ix, grid.n_x) as f64 / p[1];
    let ky = TAU * signed_mode(iy, grid.n_y) as f64 / p[2];
    kt * kt + kx * kx + ky * ky
}

fn is_zero(k: &[f64; 3]) -> bool {
    k.iter().all(|v| *v == 0.0)
}

fn real_apply(m: &DMatrix<f64>, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| v[j] * m[(i, j)]).sum())
        .collect()
}

/// Applies a per-mode map and transforms back.
fn spectral_map<F>(f: &TorusField, out_components: usize, mut op: F) -> (TorusField, f64)
where
    F: FnMut(usize, &[f64; 3], &[Complex64]) -> Vec<Complex64>,
{
    let grid = *f.grid();
    let spec = forward_transform(f);
    let ks = wavevectors(&grid);
    let mut out = Spectrum::zeros(grid, out_components);
    for (mode, k) in ks.iter().enumerate() {
        let v = spec.mode(mode);
        let r = op(mode, k, &v);
        for (c, val) in r.into_iter().enumerate() {
            out.set(c, mode, val);
        }
    }
    inverse_transform(&out)
}

fn expect_components(f: &TorusField, c: usize, what: &str) -> Result<()> {
    if f.components() != c {
        return Err(Error::Argument(format!(
            "{what} expects {c} components, got {}",
            f.components()
        )));
    }
    Ok(())
}

/// Residual `A_E z` of the relaxed system for a 6-component field.
pub fn apply_euler_operator(z: &TorusField) -> Result<TorusField> {
    expect_components(z, 6, "euler operator")?;
    Ok(spectral_map(z, 3, |_, k, v| {
        if is_zero(k) {
            return vec![Complex64::default(); 3];
        }
        let a = euler_symbol(FrequencyVector::from_array(*k)).0;
        real_apply(&a, v).into_iter().map(|c| c * I).collect()
    })
    .0)
}

/// `B_E w` for a 9-component potential.
pub fn apply_potential_operator(w: &TorusField) -> Result<TorusField> {
    expect_components(w, 9, "potential operator")?;
    Ok(spectral_map(w, 6, |_, k, v| {
        if is_zero(k) {
            return vec![Complex64::default(); 6];
        }
        let b = potential_symbol(FrequencyVector::from_array(*k)).0;
        // (i)^2 = -1 for the second-order operator
        real_apply(&b, v).into_iter().map(|c| -c).collect()
    })
    .0)
}

/// Result of [`solve_potential`].
#[derive(Debug, Clone)]
pub struct PotentialSolution {
    pub w: TorusField,
    /// `|B_E w - z|₂ / |z|₂`.
    pub residual: f64,
    /// Whether the residual is within the requested tolerance.
    pub exact: bool,
}

/// Least-squares potential: `ŵ(k) = pinv(-B_E(2πk)) ẑ(k)` per nonzero mode,
/// zero mode of `w` set to 0.
pub fn solve_potential(z: &TorusField, rel_tol: f64) -> Result<PotentialSolution> {
    expect_components(z, 6, "potential solve")?;
    let mean_norm = z.mean().iter().map(|v| v * v).sum::<f64>().sqrt();
    let field_norm = z.rms();
    if mean_norm > rel_tol * field_norm {
        return Err(Error::MeanNotZero { mean_norm, field_norm });
    }
    let (w, _) = spectral_map(z, 9, |_, k, v| {
        if is_zero(k) {
            return vec![Complex64::default(); 9];
        }
        let p = pseudoinverse(&potential_symbol(FrequencyVector::from_array(*k))).0;
        real_apply(&p, v).into_iter().map(|c| -c).collect()
    });
    let back = apply_potential_operator(&w)?;
    let residual = if field_norm > 0.0 { back.sub(z)?.rms() / field_norm } else { 0.0 };
    Ok(PotentialSolution { w, residual, exact: residual <= rel_tol })
}

fn cross(a: &[f64; 3], v: &[Complex64]) -> [Complex64; 3] {
    [
        v[2] * a[1] - v[1] * a[2],
        v[0] * a[2] - v[2] * a[0],
        v[1] * a[0] - v[0] * a[1],
    ]
}

/// `curl U` in space-time coordinates `(t, x, y)`.
pub fn curl(u: &TorusField) -> Result<TorusField> {
    expect_components(u, 3, "curl")?;
    Ok(spectral_map(u, 3, |_, k, v| cross(k, v).iter().map(|c| c * I).collect()).0)
}

/// `div U = ∂_t U_0 + ∂_x U_1 + ∂_y U_2`.
pub fn divergence(u: &TorusField) -> Result<TorusField> {
    expect_components(u, 3, "divergence")?;
    Ok(spectral_map(u, 1, |_, k, v| vec![I * (v[0] * k[0] + v[1] * k[1] + v[2] * k[2])]).0)
}

/// Mean and divergence residuals of a 3-component field, both relative to
/// its RMS norm. Modes whose operator wavevector vanishes count as mean.
pub fn curl_inverse_residuals(u: &TorusField) -> Result<(f64, f64)> {
    expect_components(u, 3, "curl inverse")?;
    let spec = forward_transform(u);
    let ks = wavevectors(u.grid());
    let (mut mean, mut div, mut total) = (0.0, 0.0, 0.0);
    for (mode, k) in ks.iter().enumerate() {
        let v = spec.mode(mode);
        let e: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        total += e;
        if is_zero(k) {
            mean += e;
        } else {
            let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            div += (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]).norm_sqr() / kk;
        }
    }
    if total == 0.0 {
        return Ok((0.0, 0.0));
    }
    Ok(((mean / total).sqrt(), (div / total).sqrt()))
}

/// Periodic vector potential: `ŵ = i (κ × Û) / |κ|²` with `κ = 2π k_phys`,
/// so that `curl w = U` for mean-zero divergence-free `U`.
pub fn curl_inverse(u: &TorusField, rel_tol: f64) -> Result<TorusField> {
    let (mean, div) = curl_inverse_residuals(u)?;
    if mean > rel_tol || div > rel_tol {
        return Err(Error::Precondition(format!(
            "curl inverse needs a mean-zero divergence-free field: mean residual {mean:.3e}, divergence residual {div:.3e}, tolerance {rel_tol:.1e}"
        )));
    }
    Ok(spectral_map(u, 3, |_, k, v| {
        if is_zero(k) {
            return vec![Complex64::default(); 3];
        }
        let kk = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        cross(k, v).iter().map(|c| c * I / kk).collect()
    })
    .0)
}

/// Orthogonal projector onto `ker A_E(κ)`, `I - A⁺A`; identity at `κ = 0`.
pub fn afree_projector(k: &[f64; 3]) -> DMatrix<f64> {
    if is_zero(k) {
        return DMatrix::identity(6, 6);
    }
    let a = euler_symbol(FrequencyVector::from_array(*k));
    let p = pseudoinverse(&a).0;
    DMatrix::identity(6, 6) - p * a.0
}

/// Per-mode orthogonal projection onto `A_E`-free fields.
pub fn project_afree(z: &TorusField) -> Result<TorusField> {
    expect_components(z, 6, "A-free projection")?;
    Ok(spectral_map(z, 6, |_, k, v| real_apply(&afree_projector(k), v)).0)
}

/// Spectral mollification: damps each mode by `exp(-eps² |2π k_phys|²)`.
pub fn mollify(f: &TorusField, eps: f64) -> Result<TorusField> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Argument(format!("mollification width must be positive, got {eps}")));
    }
    let grid = *f.grid();
    Ok(spectral_map(f, f.components(), |mode, _, v| {
        let damp = (-eps * eps * even_wavenumber_sq(&grid, mode)).exp();
        v.iter().map(|c| c * damp).collect()
    })
    .0)
}

/// Spectral `∂_a ∂_b f` for every component (axes 0 = t, 1 = x, 2 = y).
pub fn second_derivative(f: &TorusField, a: usize, b: usize) -> TorusField {
    assert!(a < 3 && b < 3, "axis out of range");
    spectral_map(f, f.components(), |_, k, v| v.iter().map(|c| -c * k[a] * k[b]).collect()).0
}

/// Spectral `∂_a f` for every component.
pub fn first_derivative(f: &TorusField, a: usize) -> TorusField {
    assert!(a < 3, "axis out of range");
    spectral_map(f, f.components(), |_, k, v| v.iter().map(|c| c * I * k[a]).collect()).0
}

/// Pointwise Frobenius norm of the full Hessian (all ordered axis pairs, all
/// components) as a single-component field.
pub fn hessian_norm(f: &TorusField) -> TorusField {
    let n = f.grid().len();
    let mut acc = vec![0.0; n];
    for a in 0..3 {
        for b in a..3 {
            let d = second_derivative(f, a, b);
            let mult = if a == b { 1.0 } else { 2.0 };
            for (p, slot) in acc.iter_mut().enumerate() {
                *slot += mult * d.point(p).iter().map(|v| v * v).sum::<f64>();
            }
        }
    }
    TorusField::new(*f.grid(), 1, acc.into_iter().map(f64::sqrt).collect())
        .expect("finite hessian")
}

/// `‖D²f‖_∞` with the pointwise Frobenius norm.
pub fn second_derivative_sup(f: &TorusField) -> f64 {
    hessian_norm(f).max_abs()
}

fn lp_of_pointwise(field: &TorusField, p: f64) -> f64 {
    let c = field.components();
    let n = field.grid().len() as f64;
    let s: f64 = field
        .values()
        .chunks(c)
        .map(|pt| pt.iter().map(|v| v * v).sum::<f64>().sqrt().powf(p))
        .sum();
    (field.grid().volume() * s / n).powf(1.0 / p)
}

/// Empirical Calderón–Zygmund diagnostics for a solved potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormDiagnostics {
    pub p: f64,
    pub lp_z: f64,
    /// `(‖w‖_p^p + ‖D²w‖_p^p)^{1/p}`.
    pub w2p_w: f64,
    pub ratio: f64,
}

pub fn norm_diagnostics(w: &TorusField, z: &TorusField, p: f64) -> Result<NormDiagnostics> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::Argument(format!("p must lie in (1, inf), got {p}")));
    }
    let lp_z = lp_of_pointwise(z, p);
    let lp_w = lp_of_pointwise(w, p);
    let lp_d2 = lp_of_pointwise(&hessian_norm(w), p);
    let w2p = (lp_w.powf(p) + lp_d2.powf(p)).powf(1.0 / p);
    Ok(NormDiagnostics {
        p,
        lp_z,
        w2p_w: w2p,
        ratio: if lp_z > 0.0 { w2p / lp_z } else { f64::INFINITY },
    })
}

/// Pointwise lift of a fluid field `(ρ, m1, m2)` to the relaxed variables.
pub fn lift_field(fluid: &TorusField) -> Result<TorusField> {
    expect_components(fluid, 3, "lift")?;
    let mut err = None;
    let out = fluid.map_points(6, |p| {
        match crate::states::FluidState::new(p[0], [p[1], p[2]])
            .and_then(|s| crate::states::lift(&s))
        {
            Ok(z) => z.to_vector().to_vec(),
            Err(e) => {
                err.get_or_insert(e);
                vec![0.0; 6]
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Residual of the nonlinear isentropic Euler equations for `(ρ, m1, m2)`:
/// `(∂_t ρ + div m, ∂_t m + div(m⊗m/ρ) + ∇p(ρ))`, computed from spectral
/// derivatives of the fluxes.
pub fn nonlinear_euler_residual(fluid: &TorusField) -> Result<TorusField> {
    expect_components(fluid, 3, "euler residual")?;
    if let Some(p) = fluid.values().chunks(3).find(|p| p[0] <= 0.0) {
        return Err(Error::Domain(format!("density must be positive, got {}", p[0])));
    }
    debug_assert_eq!(GAMMA, 2.0);
    // flux rows: (ρ, m1, m2) transported by time; spatial fluxes per equation
    let flux = fluid.map_points(9, |p| {
        let (r, m1, m2) = (p[0], p[1], p[2]);
        let pr = pressure(r).unwrap_or(f64::NAN);
        vec![
            r,
            m1,
            m2, // time densities
            m1,
            m1 * m1 / r + pr,
            m1 * m2 / r, // x fluxes
            m2,
            m1 * m2 / r,
            m2 * m2 / r + pr, // y fluxes
        ]
    });
    Ok(spectral_map(&flux, 3, |_, k, v| {
        (0..3)
            .map(|eq| I * (v[eq] * k[0] + v[3 + eq] * k[1] + v[6 + eq] * k[2]))
            .collect()
    })
    .0)
}
