//! Pointwise state algebra of the isentropic Euler system and its linear
//! relaxation in two space dimensions.
//!
//! Unknowns of the relaxed system are ordered `(ρ, m1, m2, M11, M12, Q)`
//! throughout the crate, with `M22 = -M11`.

use crate::error::{Error, Result};
use crate::torus::TorusField;

/// Spatial dimension used by the symbol work.
pub const DIM: usize = 2;
/// Adiabatic exponent `1 + 2/d` for `d = 2`.
pub const GAMMA: f64 = 2.0;

/// Dimension-dependent constants of the monoatomic pressure law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    pub d: usize,
    pub gamma: f64,
}

impl Constants {
    pub fn for_dimension(d: usize) -> Self {
        assert!(d >= 1, "dimension must be positive");
        Self {
            d,
            gamma: 1.0 + 2.0 / d as f64,
        }
    }

    pub fn planar() -> Self {
        Self::for_dimension(DIM)
    }

    /// `p(ρ) = ρ^γ`.
    pub fn pressure(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(rho.powf(self.gamma))
    }
}

impl Default for Constants {
    fn default() -> Self {
        Self::planar()
    }
}

fn check_density(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("density must be positive and finite, got {rho}")))
    }
}

/// Physical state: density and momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidState {
    pub rho: f64,
    pub m: [f64; 2],
}

impl FluidState {
    pub fn new(rho: f64, m: [f64; 2]) -> Result<Self> {
        check_density(rho)?;
        if !m.iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("momentum must be finite".into()));
        }
        Ok(Self { rho, m })
    }
}

/// Trace-free symmetric 2×2 matrix `[[a11, a12], [a12, -a11]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TracefreeSym2 {
    pub a11: f64,
    pub a12: f64,
}

impl TracefreeSym2 {
    pub const ZERO: Self = Self { a11: 0.0, a12: 0.0 };

    pub fn new(a11: f64, a12: f64) -> Self {
        Self { a11, a12 }
    }

    pub fn to_matrix(self) -> [[f64; 2]; 2] {
        [[self.a11, self.a12], [self.a12, -self.a11]]
    }

    /// Trace-free part of a symmetric matrix; the antisymmetric part is ignored.
    pub fn from_symmetric(s: [[f64; 2]; 2]) -> Self {
        Self {
            a11: 0.5 * (s[0][0] - s[1][1]),
            a12: 0.5 * (s[0][1] + s[1][0]),
        }
    }

    /// Operator (spectral) norm, `sqrt(a11² + a12²)`.
    pub fn operator_norm(self) -> f64 {
        self.a11.hypot(self.a12)
    }
}

/// State of the relaxed system `(ρ, m, M, Q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftedState {
    pub rho: f64,
    pub m: [f64; 2],
    pub big_m: TracefreeSym2,
    pub q: f64,
}

impl LiftedState {
    pub fn new(rho: f64, m: [f64; 2], big_m: TracefreeSym2, q: f64) -> Self {
        Self { rho, m, big_m, q }
    }

    pub fn to_vector(&self) -> [f64; 6] {
        [self.rho, self.m[0], self.m[1], self.big_m.a11, self.big_m.a12, self.q]
    }

    pub fn from_vector(v: &[f64; 6]) -> Self {
        Self {
            rho: v[0],
            m: [v[1], v[2]],
            big_m: TracefreeSym2::new(v[3], v[4]),
            q: v[5],
        }
    }
}

/// Largest eigenvalue of the symmetric matrix `[[a, b], [b, c]]`.
pub fn lambda_max_sym2(a: f64, b: f64, c: f64) -> f64 {
    0.5 * (a + c) + (0.5 * (a - c)).hypot(b)
}

pub fn pressure(rho: f64) -> Result<f64> {
    Constants::planar().pressure(rho)
}

/// Total energy density `ρ^γ/(γ-1) + |m|²/(2ρ)`.
pub fn total_energy(s: &FluidState) -> Result<f64> {
    let c = Constants::planar();
    let p = c.pressure(s.rho)?;
    Ok(p / (c.gamma - 1.0) + norm2_sq(s.m) / (2.0 * s.rho))
}

/// The lifting map `(ρ, m) ↦ (ρ, m, m∘m/ρ, ρ^γ + |m|²/(dρ))`.
pub fn lift(s: &FluidState) -> Result<LiftedState> {
    let c = Constants::planar();
    let p = c.pressure(s.rho)?;
    let [m1, m2] = s.m;
    let d = c.d as f64;
    let msq = m1 * m1 + m2 * m2;
    // m∘m = m⊗m - |m|²/d · E
    let big_m = TracefreeSym2 {
        a11: (m1 * m1 - msq / d) / s.rho,
        a12: m1 * m2 / s.rho,
    };
    Ok(LiftedState {
        rho: s.rho,
        m: s.m,
        big_m,
        q: p + msq / (d * s.rho),
    })
}

/// `e_kin(ρ, m, M) = (d/2) λ_max(m⊗m/ρ - M)`.
pub fn kinetic_energy_density(rho: f64, m: [f64; 2], big_m: TracefreeSym2) -> Result<f64> {
    check_density(rho)?;
    let d = DIM as f64;
    let a = m[0] * m[0] / rho - big_m.a11;
    let b = m[0] * m[1] / rho - big_m.a12;
    let c = m[1] * m[1] / rho + big_m.a11;
    Ok(0.5 * d * lambda_max_sym2(a, b, c))
}

/// `Q - ρ^γ - (2/d) e_kin`; positive means strict subsolution at this point.
pub fn subsolution_margin(z: &LiftedState) -> Result<f64> {
    let ekin = kinetic_energy_density(z.rho, z.m, z.big_m)?;
    Ok(z.q - pressure(z.rho)? - 2.0 / DIM as f64 * ekin)
}

/// `ψ(ρ, m, M, Q) = (ρ, m, M + Q·E)` flattened as the upper triangle of the
/// symmetric 3×3 block `[[ρ, m1, m2], [m1, S11, S12], [m2, S12, S22]]`, i.e.
/// `(ρ, m1, m2, S11, S12, S22)`.
pub fn psi(z: &LiftedState) -> [f64; 6] {
    psi_vector(&z.to_vector())
}

pub fn psi_vector(v: &[f64; 6]) -> [f64; 6] {
    [v[0], v[1], v[2], v[3] + v[5], v[4], -v[3] + v[5]]
}

pub fn psi_inverse_vector(s: &[f64; 6]) -> [f64; 6] {
    [s[0], s[1], s[2], 0.5 * (s[3] - s[5]), s[4], 0.5 * (s[3] + s[5])]
}

/// Inverse of [`psi`] on a full symmetric 3×3 block; `Q` is half the trace of
/// the lower 2×2 block.
pub fn psi_inverse(block: &[[f64; 3]; 3]) -> Result<LiftedState> {
    let scale = block.iter().flatten().fold(1.0f64, |a, v| a.max(v.abs()));
    for i in 0..3 {
        for j in (i + 1)..3 {
            if (block[i][j] - block[j][i]).abs() > 1e-12 * scale {
                return Err(Error::Format(format!(
                    "block is not symmetric at ({i}, {j}): {} vs {}",
                    block[i][j], block[j][i]
                )));
            }
        }
    }
    let s = [
        block[0][0],
        block[0][1],
        block[0][2],
        block[1][1],
        block[1][2],
        block[2][2],
    ];
    Ok(LiftedState::from_vector(&psi_inverse_vector(&s)))
}

/// Expands the flattened `ψ` image into the symmetric 3×3 block.
pub fn psi_block(s: &[f64; 6]) -> [[f64; 3]; 3] {
    [[s[0], s[1], s[2]], [s[1], s[3], s[4]], [s[2], s[4], s[5]]]
}

fn norm2_sq(m: [f64; 2]) -> f64 {
    m[0] * m[0] + m[1] * m[1]
}

/// Per-time energy integral and admissibility flag.
#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    pub admissible: Vec<bool>,
    pub tol: f64,
}

impl AdmissibilityReport {
    pub fn all_admissible(&self) -> bool {
        self.admissible.iter().all(|&a| a)
    }

    /// Largest `|∫e(t) - ∫e(0)|` over the time slices.
    pub fn max_deviation(&self) -> f64 {
        let e0 = self.energy.first().copied().unwrap_or(0.0);
        self.energy.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }
}

/// Integral energy admissibility of a time-indexed fluid field with three
/// components `(ρ, m1, m2)`: reports `∫e(t, ·) dx` per time slice (midpoint
/// rule on the periodic grid) and whether it stays below `∫e(0) + tol`.
pub fn admissibility_check(field: &TorusField, tol: f64) -> Result<AdmissibilityReport> {
    if field.components() != 3 {
        return Err(Error::Argument(format!(
            "admissibility check needs (rho, m1, m2), got {} components",
            field.components()
        )));
    }
    let g = field.grid();
    if g.len() == 0 {
        return Err(Error::Argument("empty grid".into()));
    }
    let per_slice = g.n_x * g.n_y;
    let mut energy = Vec::with_capacity(g.n_t);
    for it in 0..g.n_t {
        let mut acc = 0.0;
        for p in 0..per_slice {
            let v = field.point(it * per_slice + p);
            acc += total_energy(&FluidState::new(v[0], [v[1], v[2]])?)?;
        }
        // area of T² is 1
        energy.push(acc / per_slice as f64);
    }
    let e0 = energy[0];
    let admissible = energy.iter().map(|&e| e <= e0 + tol).collect();
    Ok(AdmissibilityReport {
        times: (0..g.n_t).map(|i| g.t_coord(i)).collect(),
        energy,
        admissible,
        tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pressure_values() {
        assert_eq!(pressure(1.0).unwrap(), 1.0);
        assert_eq!(pressure(2.0).unwrap(), 4.0);
        assert_eq!(pressure(0.5).unwrap(), 0.25);
        assert!(matches!(pressure(0.0), Err(Error::Domain(_))));
        assert!(pressure(-1.0).is_err());
        assert_eq!(Constants::for_dimension(3).gamma, 1.0 + 2.0 / 3.0);
    }

    #[test]
    fn energy_values() {
        let e = |rho, m| total_energy(&FluidState { rho, m }).unwrap();
        assert_eq!(e(1.0, [0.0, 0.0]), 1.0);
        assert_eq!(e(1.0, [1.0, 0.0]), 1.5);
        assert_eq!(e(2.0, [2.0, 0.0]), 5.0);
        assert!(total_energy(&FluidState { rho: 0.0, m: [0.0; 2] }).is_err());
    }

    #[test]
    fn lift_values() {
        let z = lift(&FluidState::new(1.0, [0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(z.to_vector(), [1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);

        let alpha = 0.7;
        let z = lift(&FluidState::new(1.0, [alpha, 0.0]).unwrap()).unwrap();
        assert_relative_eq!(z.big_m.a11, alpha * alpha / 2.0, epsilon = 1e-15);
        assert_eq!(z.big_m.a12, 0.0);
        assert_relative_eq!(z.q, 1.0 + alpha * alpha / 2.0, epsilon = 1e-15);

        let z = lift(&FluidState::new(2.0, [1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(z.big_m, TracefreeSym2::new(0.0, 0.5));
        assert_eq!(z.q, 4.5);
        assert!(lift(&FluidState { rho: -1.0, m: [0.0; 2] }).is_err());
    }

    #[test]
    fn kinetic_energy_values() {
        assert_eq!(kinetic_energy_density(1.0, [0.0; 2], TracefreeSym2::ZERO).unwrap(), 0.0);
        let z = lift(&FluidState::new(1.0, [1.0, 0.0]).unwrap()).unwrap();
        assert_relative_eq!(kinetic_energy_density(1.0, z.m, z.big_m).unwrap(), 0.5);
        assert_relative_eq!(
            kinetic_energy_density(1.0, [1.0, 0.0], TracefreeSym2::ZERO).unwrap(),
            1.0
        );
        assert!(kinetic_energy_density(0.0, [0.0; 2], TracefreeSym2::ZERO).is_err());
    }

    #[test]
    fn margin_values() {
        let z = lift(&FluidState::new(1.0, [1.0, 0.0]).unwrap()).unwrap();
        assert!(subsolution_margin(&z).unwrap().abs() < 1e-15);
        let z = LiftedState::new(1.0, [0.0; 2], TracefreeSym2::ZERO, 2.0);
        assert_eq!(subsolution_margin(&z).unwrap(), 1.0);
        let z = LiftedState::new(1.0, [1.0, 0.0], TracefreeSym2::ZERO, 1.0);
        assert_eq!(subsolution_margin(&z).unwrap(), -1.0);
    }

    #[test]
    fn psi_values() {
        let z = LiftedState::new(1.0, [0.0; 2], TracefreeSym2::ZERO, 1.0);
        assert_eq!(
            psi_block(&psi(&z)),
            [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
        );
        let a = 1.3;
        let z = LiftedState::new(1.0, [a, 0.0], TracefreeSym2::new(a * a / 2.0, 0.0), 1.0 + a * a / 2.0);
        let s = psi(&z);
        assert_relative_eq!(s[3], 1.0 + a * a, epsilon = 1e-15);
        assert_eq!(s[4], 0.0);
        assert_relative_eq!(s[5], 1.0, epsilon = 1e-15);
        let back = psi_inverse(&psi_block(&s)).unwrap();
        assert_relative_eq!(back.q, z.q, epsilon = 1e-15);

        let mut bad = psi_block(&s);
        bad[0][1] += 1.0;
        assert!(matches!(psi_inverse(&bad), Err(Error::Format(_))));
    }

    #[test]
    fn tracefree_roundtrip() {
        let t = TracefreeSym2::new(0.3, -0.2);
        assert_eq!(TracefreeSym2::from_symmetric(t.to_matrix()), t);
        assert_relative_eq!(t.operator_norm(), (0.09f64 + 0.04).sqrt());
    }
}
