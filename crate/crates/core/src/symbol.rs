//! Fourier symbols of the relaxed Euler operator `A_E` and its second-order
//! potential `B_E` for `d = 2`, together with the SVD machinery used to
//! certify rank, exactness and wave-cone membership.
//!
//! Symbols are evaluated with real monomials: the factor `i^order` is dropped,
//! which leaves kernels, images and ranks unchanged.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::states::psi_inverse_vector;

/// Default relative tolerance for numerical rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Wave-cone membership threshold on the normalised residual.
pub const WAVECONE_TOL: f64 = 1e-8;

/// Frequency `(τ, ξ1, ξ2)` in space-time.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrequencyVector {
    pub tau: f64,
    pub xi1: f64,
    pub xi2: f64,
}

impl FrequencyVector {
    pub const fn new(tau: f64, xi1: f64, xi2: f64) -> Self {
        Self { tau, xi1, xi2 }
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.tau, self.xi1, self.xi2]
    }

    pub fn norm(self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_zero(self) -> bool {
        self.tau == 0.0 && self.xi1 == 0.0 && self.xi2 == 0.0
    }

    pub fn scale(self, c: f64) -> Self {
        Self::new(c * self.tau, c * self.xi1, c * self.xi2)
    }

    pub fn normalized(self) -> Self {
        self.scale(1.0 / self.norm())
    }

    /// Flips the sign so that the largest-magnitude component is positive.
    pub fn canonical_sign(self) -> Self {
        let a = self.to_array();
        let k = (0..3)
            .max_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
            .unwrap_or(0);
        if a[k] < 0.0 {
            self.scale(-1.0)
        } else {
            self
        }
    }
}

/// Dense real matrix value of a symbol at one frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolMatrix(pub DMatrix<f64>);

impl SymbolMatrix {
    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }
}

impl From<DMatrix<f64>> for SymbolMatrix {
    fn from(m: DMatrix<f64>) -> Self {
        Self(m)
    }
}

/// `A_E(ξ)`, 3×6 in unknown order `(ρ, m1, m2, M11, M12, Q)`.
pub fn euler_symbol(xi: FrequencyVector) -> SymbolMatrix {
    let FrequencyVector { tau: t, xi1: x, xi2: y } = xi;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(3, 6, &[
        t,   x,   y,   0.0, 0.0, 0.0,
        0.0, t,   0.0, x,   y,   x,
        0.0, 0.0, t,   -y,  x,   y,
    ]);
    SymbolMatrix(m)
}

/// Second-order symbol of the potential before `ψ⁻¹` is applied: rows are the
/// entries `(ρ, m1, m2, S11, S12, S22)` of the symmetric 3×3 block.
pub fn potential_symbol_block(xi: FrequencyVector) -> SymbolMatrix {
    let FrequencyVector { tau: t, xi1: x, xi2: y } = xi;
    let h = 0.5;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(6, 9, &[
        x * x,   x * y,       0.0,         0.0,         0.0,         0.0,    x * y,       y * y,  0.0,
        -t * x,  -h * t * y,  h * x * y,   h * x * y,   h * y * y,   0.0,    -h * t * y,  0.0,    h * y * y,
        0.0,     -h * t * x,  -h * x * x,  -h * x * x,  -h * x * y,  0.0,    -h * t * x,  -t * y, -h * x * y,
        t * t,   0.0,         -t * y,      -t * y,      0.0,         y * y,  0.0,         0.0,    0.0,
        0.0,     h * t * t,   h * t * x,   h * t * x,   -h * t * y,  -x * y, h * t * t,   0.0,    -h * t * y,
        0.0,     0.0,         0.0,         0.0,         t * x,       x * x,  0.0,         t * t,  t * x,
    ]);
    SymbolMatrix(m)
}

/// `B_E(ξ) = ψ⁻¹ ∘ (block symbol)`, 6×9.
pub fn potential_symbol(xi: FrequencyVector) -> SymbolMatrix {
    let block = potential_symbol_block(xi).0;
    let mut out = DMatrix::zeros(6, 9);
    for j in 0..9 {
        let col: [f64; 6] = std::array::from_fn(|i| block[(i, j)]);
        let z = psi_inverse_vector(&col);
        for i in 0..6 {
            out[(i, j)] = z[i];
        }
    }
    SymbolMatrix(out)
}

/// Polarised coefficients of `B_E`: `B_E u = Σ_{a,b} C_ab ∂_a∂_b u`, with
/// `C_ab` symmetric in `(a, b)`. Used to apply the operator to fields whose
/// Hessians are known in closed form.
#[derive(Debug, Clone)]
pub struct PotentialStencil {
    coeffs: [[DMatrix<f64>; 3]; 3],
}

impl PotentialStencil {
    pub fn new() -> Self {
        let e = |a: usize| {
            let mut v = [0.0; 3];
            v[a] = 1.0;
            FrequencyVector::from_array(v)
        };
        let coeffs = std::array::from_fn(|a| {
            std::array::from_fn(|b| {
                let baa = potential_symbol(e(a)).0;
                if a == b {
                    baa
                } else {
                    let bbb = potential_symbol(e(b)).0;
                    let s = e(a).to_array();
                    let t = e(b).to_array();
                    let sum = FrequencyVector::new(s[0] + t[0], s[1] + t[1], s[2] + t[2]);
                    (potential_symbol(sum).0 - baa - bbb) * 0.5
                }
            })
        });
        Self { coeffs }
    }

    pub fn coefficient(&self, a: usize, b: usize) -> &DMatrix<f64> {
        &self.coeffs[a][b]
    }

    /// Applies the operator to a rank-one field `u = v·S(x)` with scalar
    /// Hessian `h`: returns `Σ h_ab C_ab v`.
    pub fn apply_rank_one(&self, v: &DVector<f64>, h: &[[f64; 3]; 3]) -> DVector<f64> {
        let mut out = DVector::zeros(6);
        for a in 0..3 {
            for b in 0..3 {
                if h[a][b] != 0.0 {
                    out += &self.coeffs[a][b] * v * h[a][b];
                }
            }
        }
        out
    }
}

impl Default for PotentialStencil {
    fn default() -> Self {
        Self::new()
    }
}

struct SortedSvd {
    u: DMatrix<f64>,
    sigma: Vec<f64>,
    v: DMatrix<f64>,
}

/// SVD with singular values sorted descending. `v` holds all right singular
/// vectors (columns) of the matrix, `u` the thin left factor.
fn sorted_svd(m: &DMatrix<f64>) -> SortedSvd {
    let (r, c) = m.shape();
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    let svd = fm.svd().expect("svd converges");
    let (fu, fs, fv) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = r.min(c);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| fs[j].total_cmp(&fs[i]));
    let sigma: Vec<f64> = order.iter().map(|&i| fs[i]).collect();
    let mut u = DMatrix::zeros(r, k);
    let mut v = DMatrix::zeros(c, c);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..r {
            u[(i, dst)] = fu[(i, src)];
        }
        for i in 0..c {
            v[(i, dst)] = fv[(i, src)];
        }
    }
    for j in k..c {
        for i in 0..c {
            v[(i, j)] = fv[(i, j)];
        }
    }
    SortedSvd { u, sigma, v }
}

/// Singular values in descending order.
pub fn singular_values(mat: &SymbolMatrix) -> Vec<f64> {
    sorted_svd(&mat.0).sigma
}

fn count_above(sigma: &[f64], rel_tol: f64) -> usize {
    let top = sigma.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sigma.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Number of singular values above `rel_tol` times the largest one.
pub fn rank(mat: &SymbolMatrix, rel_tol: f64) -> usize {
    count_above(&singular_values(mat), rel_tol)
}

pub fn pseudoinverse(mat: &SymbolMatrix) -> SymbolMatrix {
    pseudoinverse_with_tol(mat, DEFAULT_RANK_TOL)
}

/// Moore–Penrose pseudoinverse, discarding singular values below
/// `rel_tol · σ_max`.
pub fn pseudoinverse_with_tol(mat: &SymbolMatrix, rel_tol: f64) -> SymbolMatrix {
    let (r, c) = mat.0.shape();
    if r < c {
        // pinv(Mᵀ)ᵀ avoids the padded decomposition
        let t = pseudoinverse_with_tol(&SymbolMatrix(mat.0.transpose()), rel_tol);
        return SymbolMatrix(t.0.transpose());
    }
    let svd = sorted_svd(&mat.0);
    let k = count_above(&svd.sigma, rel_tol);
    let mut out = DMatrix::zeros(c, r);
    for i in 0..k {
        let vi = svd.v.column(i);
        let ui = svd.u.column(i);
        out += vi * ui.transpose() / svd.sigma[i];
    }
    SymbolMatrix(out)
}

/// Orthonormal basis of a subspace (columns).
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    pub basis: DMatrix<f64>,
    pub tol: f64,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Orthogonal projector `V Vᵀ`.
    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }
}

pub fn kernel_basis(mat: &SymbolMatrix, rel_tol: f64) -> SubspaceBasis {
    let svd = sorted_svd(&mat.0);
    let k = count_above(&svd.sigma, rel_tol);
    let c = mat.cols();
    let total = svd.v.ncols();
    let mut basis = DMatrix::zeros(c, total - k);
    for (dst, src) in (k..total).enumerate() {
        basis.set_column(dst, &svd.v.column(src));
    }
    SubspaceBasis { basis, tol: rel_tol }
}

pub fn image_basis(mat: &SymbolMatrix, rel_tol: f64) -> SubspaceBasis {
    // left singular vectors of M are the right ones of Mᵀ
    let svd = sorted_svd(&mat.0.transpose());
    let k = count_above(&svd.sigma, rel_tol);
    let basis = svd.v.columns(0, k).into_owned();
    SubspaceBasis { basis, tol: rel_tol }
}

/// Outcome of comparing `ker A_E(ξ)` with `im B_E(ξ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exactness {
    pub exact: bool,
    pub projector_gap: f64,
    pub rank_a: usize,
    pub rank_b: usize,
}

/// Frobenius distance between the orthogonal projectors onto `ker A_E(ξ)`
/// and `im B_E(ξ)`; exact iff the gap is at most `rel_tol`.
pub fn exactness_check(xi: FrequencyVector, rel_tol: f64) -> Result<Exactness> {
    if xi.is_zero() {
        return Err(Error::Argument("exactness is undefined at the zero frequency".into()));
    }
    let a = euler_symbol(xi);
    let b = potential_symbol(xi);
    let ker = kernel_basis(&a, DEFAULT_RANK_TOL);
    let im = image_basis(&b, DEFAULT_RANK_TOL);
    let gap = (ker.projector() - im.projector()).norm();
    Ok(Exactness {
        exact: gap <= rel_tol,
        projector_gap: gap,
        rank_a: a.cols() - ker.dim(),
        rank_b: im.dim(),
    })
}

/// Result of a wave-cone search for a 6-vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveConeResult {
    /// `min_ω |A_E(ω) z| / |z|` over the unit sphere.
    pub distance: f64,
    pub minimizer: FrequencyVector,
    pub member: bool,
}

/// The 3×3 matrix `L_z` with `A_E(ω) z = L_z ω`.
pub fn wave_operator(z: &[f64; 6]) -> Matrix3<f64> {
    let [rho, m1, m2, a11, a12, q] = *z;
    Matrix3::new(
        rho, m1, m2, //
        m1, a11 + q, a12, //
        m2, a12, q - a11,
    )
}

fn check_nonzero(z: &[f64; 6]) -> Result<f64> {
    let n = z.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return Err(Error::Argument(
            "wave-cone distance needs a nonzero finite vector".into(),
        ));
    }
    Ok(n)
}

/// Distance of `z` from the wave cone `⋃_ω ker A_E(ω)`.
///
/// `A_E(ω) z` is linear in `ω`, so the minimum over the sphere is the
/// smallest singular value of [`wave_operator`] and the minimiser its right
/// singular vector.
pub fn wavecone_distance(z: &[f64; 6]) -> Result<WaveConeResult> {
    let n = check_nonzero(z)?;
    let l = wave_operator(z) / n;
    let svd = l.svd(false, true);
    let vt = svd.v_t.expect("v requested");
    let (imin, smin) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, s)| (i, *s))
        .expect("three singular values");
    let w = FrequencyVector::new(vt[(imin, 0)], vt[(imin, 1)], vt[(imin, 2)])
        .normalized()
        .canonical_sign();
    Ok(WaveConeResult {
        distance: smin,
        minimizer: w,
        member: smin <= WAVECONE_TOL,
    })
}

fn residual_on_sphere(l: &Matrix3<f64>, w: &Vector3<f64>) -> f64 {
    (l * w).norm() / w.norm()
}

/// Deterministic spherical Fibonacci point set with `n` points.
pub fn fibonacci_sphere(n: usize) -> Vec<FrequencyVector> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            FrequencyVector::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

/// Grid-and-polish search for the wave-cone distance: evaluates the residual
/// on `samples` Fibonacci points, then refines the best one with a
/// Nelder–Mead simplex in the tangent plane. Independent of the SVD route in
/// [`wavecone_distance`].
pub fn wavecone_search(z: &[f64; 6], samples: usize) -> Result<WaveConeResult> {
    let n = check_nonzero(z)?;
    let l = wave_operator(z) / n;
    let best = fibonacci_sphere(samples.max(1))
        .into_iter()
        .map(|w| {
            let v = Vector3::from(w.to_array());
            (residual_on_sphere(&l, &v), v)
        })
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one sample");
    let mut center = best.1;
    let mut value = best.0;
    // Restart the simplex a few times around the current best point with
    // shrinking radius; the objective is a cone near the minimiser.
    let mut radius = (4.0 * std::f64::consts::PI / samples.max(1) as f64).sqrt();
    for _ in 0..6 {
        let (e1, e2) = tangent_basis(&center);
        let f = |p: [f64; 2]| {
            let w = center + e1 * p[0] + e2 * p[1];
            residual_on_sphere(&l, &w)
        };
        let (p, fv) = nelder_mead_2d(f, radius, 400, 1e-15);
        if fv <= value {
            center = (center + e1 * p[0] + e2 * p[1]).normalize();
            value = fv;
        }
        radius *= 0.1;
    }
    let w = FrequencyVector::new(center[0], center[1], center[2]).canonical_sign();
    Ok(WaveConeResult {
        distance: value,
        minimizer: w,
        member: value <= WAVECONE_TOL,
    })
}

fn tangent_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if n[0].abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = n.cross(&helper).normalize();
    let e2 = n.cross(&e1).normalize();
    (e1, e2)
}

/// Minimal Nelder–Mead in two variables starting at the origin.
fn nelder_mead_2d<F: Fn([f64; 2]) -> f64>(
    f: F,
    step: f64,
    max_iter: usize,
    ftol: f64,
) -> ([f64; 2], f64) {
    let mut pts = [[0.0, 0.0], [step, 0.0], [0.0, step]];
    let mut vals = pts.map(&f);
    for _ in 0..max_iter {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.map(|i| pts[i]);
        vals = idx.map(|i| vals[i]);
        if (vals[2] - vals[0]).abs() <= ftol * (1.0 + vals[0].abs()) {
            break;
        }
        let c = [(pts[0][0] + pts[1][0]) / 2.0, (pts[0][1] + pts[1][1]) / 2.0];
        let lerp = |t: f64| [c[0] + t * (pts[2][0] - c[0]), c[1] + t * (pts[2][1] - c[1])];
        let xr = lerp(-1.0);
        let fr = f(xr);
        if fr < vals[0] {
            let xe = lerp(-2.0);
            let fe = f(xe);
            if fe < fr {
                pts[2] = xe;
                vals[2] = fe;
            } else {
                pts[2] = xr;
                vals[2] = fr;
            }
        } else if fr < vals[1] {
            pts[2] = xr;
            vals[2] = fr;
        } else {
            let xc = if fr < vals[2] { lerp(-0.5) } else { lerp(0.5) };
            let fc = f(xc);
            if fc < vals[2].min(fr) {
                pts[2] = xc;
                vals[2] = fc;
            } else {
                for i in 1..3 {
                    pts[i] = [
                        pts[0][0] + 0.5 * (pts[i][0] - pts[0][0]),
                        pts[0][1] + 0.5 * (pts[i][1] - pts[0][1]),
                    ];
                    vals[i] = f(pts[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| vals[a].total_cmp(&vals[b])).unwrap();
    (pts[best], vals[best])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{lift, FluidState};
    use approx::assert_relative_eq;

    fn mat_close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        (a - b).abs().max() <= tol
    }

    #[test]
    fn euler_symbol_pure_time() {
        let a = euler_symbol(FrequencyVector::new(1.0, 0.0, 0.0));
        let mut expect = DMatrix::zeros(3, 6);
        for i in 0..3 {
            expect[(i, i)] = 1.0;
        }
        assert_eq!(a.0, expect);
    }

    #[test]
    fn rank_basics() {
        assert_eq!(rank(&SymbolMatrix::identity(3), DEFAULT_RANK_TOL), 3);
        assert_eq!(rank(&SymbolMatrix::zeros(3, 6), DEFAULT_RANK_TOL), 0);
        assert_eq!(kernel_basis(&SymbolMatrix::identity(4), DEFAULT_RANK_TOL).dim(), 0);
        let p = pseudoinverse(&SymbolMatrix::identity(3));
        assert!(mat_close(&p.0, &DMatrix::identity(3, 3), 1e-15));
        assert_eq!(pseudoinverse(&SymbolMatrix::zeros(2, 3)).0, DMatrix::zeros(3, 2));
    }

    #[test]
    fn shear_difference_is_annihilated_in_y() {
        let z1 = lift(&FluidState::new(1.0, [0.4, 0.0]).unwrap()).unwrap().to_vector();
        let z2 = lift(&FluidState::new(1.0, [-1.1, 0.0]).unwrap()).unwrap().to_vector();
        let dz = DVector::from_iterator(6, (0..6).map(|i| z1[i] - z2[i]));
        let r = euler_symbol(FrequencyVector::new(0.0, 0.0, 1.0)).0 * dz;
        assert!(r.norm() < 1e-15);
    }

    #[test]
    fn potential_symbol_homogeneity() {
        let xi = FrequencyVector::new(0.3, -0.7, 1.1);
        let b1 = potential_symbol(xi).0;
        let b2 = potential_symbol(xi.scale(2.0)).0;
        assert!(mat_close(&b2, &(b1 * 4.0), 1e-14));
    }

    #[test]
    fn echelon_pattern_spans_block_rows() {
        // Row space of the block symbol equals the row space of the reduced
        // pattern whenever all components are nonzero.
        let (t, x, y) = (0.6, -0.48, 0.64);
        let b = potential_symbol_block(FrequencyVector::new(t, x, y)).0;
        #[rustfmt::skip]
        let e = DMatrix::from_row_slice(3, 9, &[
            x / y, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0, y / x, 0.0,
            -t / y, 0.0, 1.0, 1.0, 0.0, -y / t, 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 0.0, 1.0, x / t, 0.0, t / x, 1.0,
        ]);
        let mut stacked = DMatrix::zeros(9, 9);
        stacked.view_mut((0, 0), (6, 9)).copy_from(&b);
        stacked.view_mut((6, 0), (3, 9)).copy_from(&e);
        assert_eq!(rank(&SymbolMatrix(b), DEFAULT_RANK_TOL), 3);
        assert_eq!(rank(&SymbolMatrix(e), DEFAULT_RANK_TOL), 3);
        assert_eq!(rank(&SymbolMatrix(stacked), DEFAULT_RANK_TOL), 3);
    }

    #[test]
    fn pinv_of_b_projects_onto_cokernel() {
        let xi = FrequencyVector::new(0.2, 0.5, -0.9).normalized();
        let b = potential_symbol(xi);
        let p = pseudoinverse(&b);
        let lhs = &p.0 * &b.0;
        let ker = kernel_basis(&b, DEFAULT_RANK_TOL);
        let rhs = DMatrix::identity(9, 9) - ker.projector();
        assert!(mat_close(&lhs, &rhs, 1e-10));
        assert_eq!(ker.dim(), 6);
    }

    #[test]
    fn exactness_at_diagonal() {
        let e = exactness_check(FrequencyVector::new(1.0, 1.0, 1.0), 1e-8).unwrap();
        assert!(e.exact, "gap {}", e.projector_gap);
        assert_eq!((e.rank_a, e.rank_b), (3, 3));
        assert!(exactness_check(FrequencyVector::default(), 1e-8).is_err());
    }

    #[test]
    fn pseudoinverse_on_lattice_modes() {
        let tau = std::f64::consts::TAU;
        for k in [[2.0, 1.0, 5.0], [7.0, 1.0, 6.0], [3.0, -2.0, 8.0]] {
            let w = FrequencyVector::new(tau * k[0], tau * k[1], tau * k[2]);
            let b = potential_symbol(w).0;
            let p = pseudoinverse(&potential_symbol(w)).0;
            assert!((&b * &p * &b - &b).norm() <= 1e-12 * b.norm());
        }
    }

    #[test]
    fn image_basis_spans_image() {
        for w in fibonacci_sphere(400) {
            let b = potential_symbol(w);
            let im = image_basis(&b, DEFAULT_RANK_TOL);
            assert!((euler_symbol(w).0 * &im.basis).norm() < 1e-13);
            let p = im.projector();
            assert!((&p * b.matrix() - b.matrix()).norm() < 1e-13);
            assert!(exactness_check(w, 1e-8).unwrap().exact);
        }
    }

    #[test]
    fn polarised_stencil_reproduces_symbol() {
        let s = PotentialStencil::new();
        let k = [0.3, -1.2, 0.8];
        let v = DVector::from_fn(9, |i, _| (i as f64 * 0.37).sin());
        let h: [[f64; 3]; 3] = std::array::from_fn(|a| std::array::from_fn(|b| k[a] * k[b]));
        let direct = potential_symbol(FrequencyVector::from_array(k)).0 * &v;
        assert!((s.apply_rank_one(&v, &h) - direct).norm() < 1e-14);
    }

    #[test]
    fn wavecone_shear_pair() {
        let z1 = lift(&FluidState::new(1.0, [0.3, 0.0]).unwrap()).unwrap().to_vector();
        let z2 = lift(&FluidState::new(1.0, [1.7, 0.0]).unwrap()).unwrap().to_vector();
        let dz: [f64; 6] = std::array::from_fn(|i| z1[i] - z2[i]);
        let r = wavecone_distance(&dz).unwrap();
        assert!(r.distance <= 1e-8);
        assert_relative_eq!(r.minimizer.xi2, 1.0, epsilon = 1e-10);
        let s = wavecone_search(&dz, 10_000).unwrap();
        assert!(s.distance <= 1e-8, "search distance {}", s.distance);
        assert_relative_eq!(s.minimizer.xi2.abs(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn wavecone_density_direction() {
        let e_rho = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let r = wavecone_distance(&e_rho).unwrap();
        assert!(r.distance < 1e-14);
        assert!(r.minimizer.tau.abs() < 1e-12);
        assert!(wavecone_distance(&[0.0; 6]).is_err());
    }

    #[test]
    fn wavecone_columns_of_b() {
        let w0 = FrequencyVector::new(0.3, 0.4, -0.2).normalized();
        let b = potential_symbol(w0).0;
        for j in 0..9 {
            let col: [f64; 6] = std::array::from_fn(|i| b[(i, j)]);
            if col.iter().all(|v| *v == 0.0) {
                continue;
            }
            let r = wavecone_distance(&col).unwrap();
            assert!(r.distance <= 1e-8, "column {j}: {}", r.distance);
            let a = euler_symbol(w0).0;
            let v = DVector::from_column_slice(&col);
            assert!((a * v).norm() <= 1e-12);
        }
    }

    #[test]
    fn fibonacci_points_are_unit() {
        for w in fibonacci_sphere(257) {
            assert_relative_eq!(w.norm(), 1.0, epsilon = 1e-14);
        }
    }
}
