use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::{TorusField, TorusGrid};

/// Unitary discrete Fourier coefficients of a [`TorusField`], stored
/// component-major: coefficient of component `c` at flat mode index `k` is
/// `coeffs[c * N + k]` with `N = grid.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: TorusGrid,
    components: usize,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: TorusGrid, components: usize) -> Self {
        Self {
            grid,
            components,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len() * components],
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn get(&self, c: usize, mode: usize) -> Complex64 {
        self.coeffs[c * self.grid.len() + mode]
    }

    pub fn set(&mut self, c: usize, mode: usize, v: Complex64) {
        let n = self.grid.len();
        self.coeffs[c * n + mode] = v;
    }

    /// All component coefficients at one mode.
    pub fn mode(&self, mode: usize) -> Vec<Complex64> {
        (0..self.components).map(|c| self.get(c, mode)).collect()
    }

    /// Sum of `|coeff|²` over all modes and components (Parseval: equals the
    /// sum of squared samples).
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

fn transform_axis(
    buf: &mut [Complex64],
    dims: [usize; 3],
    axis: usize,
    fft: &dyn Fft<f64>,
    scratch: &mut Vec<Complex64>,
) {
    let n = dims[axis];
    let stride: usize = dims[axis + 1..].iter().product();
    let outer: usize = dims[..axis].iter().product();
    if stride == 1 {
        fft.process(buf);
        return;
    }
    scratch.resize(n, Complex64::default());
    for o in 0..outer {
        let base = o * n * stride;
        for s in 0..stride {
            for (i, v) in scratch.iter_mut().enumerate() {
                *v = buf[base + i * stride + s];
            }
            fft.process(scratch);
            for (i, v) in scratch.iter().enumerate() {
                buf[base + i * stride + s] = *v;
            }
        }
    }
}

fn fft3(buf: &mut [Complex64], grid: &TorusGrid, direction: FftDirection) {
    let dims = grid.dims();
    let mut planner = FftPlanner::new();
    let mut scratch = Vec::new();
    for axis in 0..3 {
        let fft = planner.plan_fft(dims[axis], direction);
        transform_axis(buf, dims, axis, fft.as_ref(), &mut scratch);
    }
    let scale = 1.0 / (grid.len() as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
}

/// Unitary forward transform of every component.
pub fn forward_transform(f: &TorusField) -> Spectrum {
    let grid = *f.grid();
    let n = grid.len();
    let c = f.components();
    let mut coeffs = vec![Complex64::default(); n * c];
    for comp in 0..c {
        let slot = &mut coeffs[comp * n..(comp + 1) * n];
        for (p, v) in slot.iter_mut().enumerate() {
            *v = Complex64::new(f.values()[p * c + comp], 0.0);
        }
        fft3(slot, &grid, FftDirection::Forward);
    }
    Spectrum { grid, components: c, coeffs }
}

/// Inverse transform; returns the real part and the largest discarded
/// imaginary magnitude.
pub fn inverse_transform(s: &Spectrum) -> (TorusField, f64) {
    let grid = s.grid;
    let n = grid.len();
    let c = s.components;
    let mut values = vec![0.0; n * c];
    let mut imag: f64 = 0.0;
    let mut buf = vec![Complex64::default(); n];
    for comp in 0..c {
        buf.copy_from_slice(&s.coeffs[comp * n..(comp + 1) * n]);
        fft3(&mut buf, &grid, FftDirection::Inverse);
        for (p, v) in buf.iter().enumerate() {
            values[p * c + comp] = v.re;
            imag = imag.max(v.im.abs());
        }
    }
    let field = TorusField::new(grid, c, values).expect("inverse transform of finite spectrum");
    (field, imag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_has_single_mode() {
        let g = TorusGrid::new(4, 6, 8, 1.0).unwrap();
        let s = forward_transform(&TorusField::constant(g, &[2.0]));
        let expect = 2.0 * (g.len() as f64).sqrt();
        assert!((s.get(0, 0).re - expect).abs() < 1e-12);
        for k in 1..g.len() {
            assert!(s.get(0, k).norm() < 1e-12);
        }
    }

    #[test]
    fn cosine_in_y_has_two_modes() {
        let g = TorusGrid::cube(8).unwrap();
        let f = TorusField::from_fn(g, 1, |[_, _, y]| vec![(std::f64::consts::TAU * y).cos()]);
        let s = forward_transform(&f);
        let plus = g.index(0, 0, 1);
        let minus = g.index(0, 0, 7);
        let amp = 0.5 * (g.len() as f64).sqrt();
        for k in 0..g.len() {
            let v = s.get(0, k);
            if k == plus || k == minus {
                assert!((v - Complex64::new(amp, 0.0)).norm() < 1e-12);
            } else {
                assert!(v.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = TorusGrid::new(8, 4, 16, 2.5).unwrap();
        let f = TorusField::random(g, 3, &mut rng);
        let s = forward_transform(&f);
        assert!((s.energy() - f.values().iter().map(|v| v * v).sum::<f64>()).abs() < 1e-9);
        let (back, imag) = inverse_transform(&s);
        assert!(back.relative_error(&f).unwrap() < 1e-12);
        assert!(imag < 1e-12);
    }
}
