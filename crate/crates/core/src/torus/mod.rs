//! Periodic fields on the space-time torus `(0,T) × T²` and their spectral
//! calculus.
//!
//! Values are stored row-major with shape `(n_t, n_x, n_y, c)`. Spatial
//! periods are fixed to 1.

mod fft;
pub mod io;
mod ops;

pub use fft::{forward_transform, inverse_transform, Spectrum};
pub use ops::*;

use rand::Rng;

use crate::error::{Error, Result};

/// Uniform periodic grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusGrid {
    pub n_t: usize,
    pub n_x: usize,
    pub n_y: usize,
    pub period_t: f64,
}

impl TorusGrid {
    /// Sizes must be even and at least 4.
    pub fn new(n_t: usize, n_x: usize, n_y: usize, period_t: f64) -> Result<Self> {
        for (name, n) in [("n_t", n_t), ("n_x", n_x), ("n_y", n_y)] {
            if n < 4 || n % 2 != 0 {
                return Err(Error::Argument(format!(
                    "{name} must be an even integer >= 4, got {n}"
                )));
            }
        }
        if !(period_t > 0.0 && period_t.is_finite()) {
            return Err(Error::Argument(format!("period_t must be positive, got {period_t}")));
        }
        Ok(Self { n_t, n_x, n_y, period_t })
    }

    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, n, n, 1.0)
    }

    pub fn len(&self) -> usize {
        self.n_t * self.n_x * self.n_y
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.n_t, self.n_x, self.n_y]
    }

    pub fn periods(&self) -> [f64; 3] {
        [self.period_t, 1.0, 1.0]
    }

    pub fn spacing(&self) -> [f64; 3] {
        [
            self.period_t / self.n_t as f64,
            1.0 / self.n_x as f64,
            1.0 / self.n_y as f64,
        ]
    }

    pub fn volume(&self) -> f64 {
        self.period_t
    }

    pub fn index(&self, it: usize, ix: usize, iy: usize) -> usize {
        (it * self.n_x + ix) * self.n_y + iy
    }

    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let iy = idx % self.n_y;
        let rest = idx / self.n_y;
        [rest / self.n_x, rest % self.n_x, iy]
    }

    pub fn t_coord(&self, it: usize) -> f64 {
        it as f64 * self.period_t / self.n_t as f64
    }

    /// Physical coordinates `(t, x, y)` of a flat point index.
    pub fn coords(&self, idx: usize) -> [f64; 3] {
        let [it, ix, iy] = self.unravel(idx);
        [
            self.t_coord(it),
            ix as f64 / self.n_x as f64,
            iy as f64 / self.n_y as f64,
        ]
    }

    /// Coordinates normalised to the unit cell, `(t/T, x, y)`.
    pub fn unit_coords(&self, idx: usize) -> [f64; 3] {
        let [it, ix, iy] = self.unravel(idx);
        [
            it as f64 / self.n_t as f64,
            ix as f64 / self.n_x as f64,
            iy as f64 / self.n_y as f64,
        ]
    }
}

/// Real vector-valued samples on a [`TorusGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct TorusField {
    grid: TorusGrid,
    components: usize,
    values: Vec<f64>,
}

impl TorusField {
    pub fn new(grid: TorusGrid, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 {
            return Err(Error::Argument("a field needs at least one component".into()));
        }
        if values.len() != grid.len() * components {
            return Err(Error::Argument(format!(
                "expected {} values, got {}",
                grid.len() * components,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!("non-finite value at flat index {i}")));
        }
        Ok(Self { grid, components, values })
    }

    pub fn zeros(grid: TorusGrid, components: usize) -> Self {
        Self {
            grid,
            components,
            values: vec![0.0; grid.len() * components],
        }
    }

    pub fn constant(grid: TorusGrid, value: &[f64]) -> Self {
        let values = value.iter().copied().cycle().take(grid.len() * value.len()).collect();
        Self { grid, components: value.len(), values }
    }

    /// Samples `f(t, x, y)` at every grid point.
    pub fn from_fn<F>(grid: TorusGrid, components: usize, mut f: F) -> Self
    where
        F: FnMut([f64; 3]) -> Vec<f64>,
    {
        let mut values = Vec::with_capacity(grid.len() * components);
        for idx in 0..grid.len() {
            let v = f(grid.coords(idx));
            assert_eq!(v.len(), components, "closure returned wrong component count");
            values.extend(v);
        }
        Self { grid, components, values }
    }

    /// Independent uniform samples in `[-1, 1]`.
    pub fn random<R: Rng>(grid: TorusGrid, components: usize, rng: &mut R) -> Self {
        let values = (0..grid.len() * components)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        Self { grid, components, values }
    }

    /// Random trigonometric polynomial with integer modes `|k_i| <= max_mode`.
    pub fn random_smooth<R: Rng>(
        grid: TorusGrid,
        components: usize,
        max_mode: i64,
        rng: &mut R,
    ) -> Self {
        let mut terms = Vec::new();
        for c in 0..components {
            for kt in -max_mode..=max_mode {
                for kx in -max_mode..=max_mode {
                    for ky in -max_mode..=max_mode {
                        let amp: f64 = rng.random_range(-1.0..1.0);
                        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                        terms.push((c, [kt as f64, kx as f64, ky as f64], amp, phase));
                    }
                }
            }
        }
        let two_pi = std::f64::consts::TAU;
        Self::from_fn(grid, components, |[t, x, y]| {
            let mut v = vec![0.0; components];
            for &(c, k, amp, phase) in &terms {
                let arg = two_pi * (k[0] * t / grid.period_t + k[1] * x + k[2] * y) + phase;
                v[c] += amp * arg.cos();
            }
            v
        })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Component values at flat point index `idx`.
    pub fn point(&self, idx: usize) -> &[f64] {
        &self.values[idx * self.components..(idx + 1) * self.components]
    }

    pub fn point_mut(&mut self, idx: usize) -> &mut [f64] {
        let c = self.components;
        &mut self.values[idx * c..(idx + 1) * c]
    }

    /// Copies one component into a new single-component field.
    pub fn component(&self, c: usize) -> TorusField {
        let values = self.values.iter().skip(c).step_by(self.components).copied().collect();
        TorusField { grid: self.grid, components: 1, values }
    }

    /// Grid mean per component.
    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.components];
        for p in self.values.chunks(self.components) {
            for (acc, v) in m.iter_mut().zip(p) {
                *acc += v;
            }
        }
        let n = self.grid.len() as f64;
        m.iter_mut().for_each(|v| *v /= n);
        m
    }

    /// Root-mean-square of the pointwise Euclidean norm.
    pub fn rms(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.grid.len() as f64).sqrt()
    }

    /// Discrete `L²((0,T)×T²)` norm.
    pub fn l2_norm(&self) -> f64 {
        self.rms() * self.grid.volume().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    fn check_compatible(&self, other: &TorusField) -> Result<()> {
        if self.grid != other.grid || self.components != other.components {
            return Err(Error::Argument("fields live on different grids or shapes".into()));
        }
        Ok(())
    }

    pub fn sub(&self, other: &TorusField) -> Result<TorusField> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(TorusField { grid: self.grid, components: self.components, values })
    }

    pub fn add(&self, other: &TorusField) -> Result<TorusField> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(TorusField { grid: self.grid, components: self.components, values })
    }

    pub fn scale(&self, s: f64) -> TorusField {
        TorusField {
            grid: self.grid,
            components: self.components,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// Adds a constant vector to every point.
    pub fn shift(&self, v: &[f64]) -> Result<TorusField> {
        if v.len() != self.components {
            return Err(Error::Argument("shift vector has wrong length".into()));
        }
        let mut out = self.clone();
        for p in out.values.chunks_mut(self.components) {
            for (a, b) in p.iter_mut().zip(v) {
                *a += b;
            }
        }
        Ok(out)
    }

    /// Relative `L²` distance `|self - other| / |other|` (absolute if `other` vanishes).
    pub fn relative_error(&self, other: &TorusField) -> Result<f64> {
        let d = self.sub(other)?.rms();
        let n = other.rms();
        Ok(if n > 0.0 { d / n } else { d })
    }

    /// Pointwise map to a field with `components` outputs.
    pub fn map_points<F>(&self, components: usize, mut f: F) -> TorusField
    where
        F: FnMut(&[f64]) -> Vec<f64>,
    {
        let mut values = Vec::with_capacity(self.grid.len() * components);
        for p in self.values.chunks(self.components) {
            let v = f(p);
            assert_eq!(v.len(), components);
            values.extend(v);
        }
        TorusField { grid: self.grid, components, values }
    }
}

/// Signed integer index of the Fourier mode stored at position `i`; the
/// Nyquist position `n/2` is reported as `+n/2`.
pub fn signed_mode(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// Mode index used by differential operators: the Nyquist mode is dropped
/// so that odd symbols keep real fields real.
pub fn operator_mode(i: usize, n: usize) -> f64 {
    if n % 2 == 0 && i == n / 2 {
        0.0
    } else {
        signed_mode(i, n) as f64
    }
}
