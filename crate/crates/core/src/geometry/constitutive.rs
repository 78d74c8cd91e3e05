use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the constitutive set
/// `{ρ ≥ η/2, ρ² + e_kin(ρ, m, M) ≤ Q, Q = q, |z| ≤ R}` in `(ρ, m1, m2, M11, M12, Q)` coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstitutiveSpec {
    pub eta: f64,
    pub big_r: f64,
    pub q_level: f64,
}

impl ConstitutiveSpec {
    pub fn new(eta: f64, big_r: f64, q_level: f64) -> Result<Self> {
        let s = Self { eta, big_r, q_level };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { eta, big_r, q_level } = *self;
        if !(eta > 0.0 && big_r > 0.0 && q_level > 0.0) || !(eta <= big_r) {
            return Err(Error::Argument(format!(
                "need 0 < eta <= big_r and q_level > 0 (eta={eta}, big_r={big_r}, q_level={q_level})"
            )));
        }
        if q_level < eta * eta {
            return Err(Error::Argument(format!("q_level {q_level} < eta^2 = {}", eta * eta)));
        }
        Ok(())
    }

    pub fn density_floor(&self) -> f64 {
        0.5 * self.eta
    }

    /// Largest density of a member; `(ρ, 0, 0, 0, 0, q)` is a member for
    /// every `ρ` between the floor and this value when it fits in the ball.
    pub fn max_density(&self) -> f64 {
        self.q_level.sqrt()
    }

    /// Errors when the set is empty.
    pub fn check_nonempty(&self) -> Result<()> {
        self.validate()?;
        let w = [self.density_floor(), 0.0, 0.0, 0.0, 0.0, self.q_level];
        if norm(&w) > self.big_r {
            return Err(Error::Infeasible(format!(
                "constitutive set is empty: lightest member has norm {} > big_r = {}",
                norm(&w),
                self.big_r
            )));
        }
        Ok(())
    }

    /// `ρ² + e_kin - Q` for the 2-D state; `+∞` below the density floor.
    pub fn constraint_value(&self, z: &[f64; 6]) -> f64 {
        let [rho, m1, m2, a11, a12, q] = *z;
        if rho < self.density_floor() {
            return f64::INFINITY;
        }
        let c = [(m1 * m1 - m2 * m2) / (2.0 * rho), m1 * m2 / rho];
        let ekin = (m1 * m1 + m2 * m2) / (2.0 * rho) + (a11 - c[0]).hypot(a12 - c[1]);
        rho * rho + ekin - q
    }

    pub fn contains(&self, z: &[f64; 6], tol: f64) -> bool {
        z[5] == self.q_level
            && z[0] >= self.density_floor()
            && self.constraint_value(z) <= tol
            && norm(z) <= self.big_r * (1.0 + 1e-15)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean distance from `z` to the constitutive set.
pub fn constitutive_distance(z: &[f64; 6], spec: &ConstitutiveSpec) -> Result<f64> {
    spec.check_nonempty()?;
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::Domain("state has non-finite entries".into()));
    }
    let scale = 1.0 + spec.q_level.abs();
    if spec.contains(z, 1e-14 * scale) {
        return Ok(0.0);
    }
    let y = [z[0], z[1], z[2], z[3], z[4]];
    let p = project(&y, spec);
    let dq = z[5] - spec.q_level;
    let d5: f64 = y.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((d5 + dq * dq).sqrt())
}

/// Projection of `(ρ, m, M)` onto the slice `Q = q` intersected with the ball.
fn project(y: &[f64; 5], spec: &ConstitutiveSpec) -> [f64; 5] {
    let r5 = (spec.big_r * spec.big_r - spec.q_level * spec.q_level).max(0.0).sqrt();
    let p = project_c1(y, spec);
    if norm(&p) <= r5 {
        return p;
    }
    // y(μ) = P(y / (1 + μ)) has nonincreasing norm in μ
    let at = |mu: f64| project_c1(&y.map(|v| v / (1.0 + mu)), spec);
    let mut lo = 0.0;
    let mut hi = 1.0;
    while norm(&at(hi)) > r5 && hi < 1e300 {
        lo = hi;
        hi *= 4.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm(&at(mid)) > r5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    at(hi)
}

struct Reduced<'a> {
    y: &'a [f64; 5],
    q: f64,
    floor: f64,
}

impl Reduced<'_> {
    /// Radius of the admissible `M`-disc and its centre.
    fn disc(&self, x: &Vector3<f64>) -> (f64, [f64; 2]) {
        let (rho, m1, m2) = (x[0], x[1], x[2]);
        let r = self.q - rho * rho - (m1 * m1 + m2 * m2) / (2.0 * rho);
        (r, [(m1 * m1 - m2 * m2) / (2.0 * rho), m1 * m2 / rho])
    }

    fn excess(&self, x: &Vector3<f64>) -> (f64, f64, [f64; 2]) {
        let (r, c) = self.disc(x);
        let e = [self.y[3] - c[0], self.y[4] - c[1]];
        let len = e[0].hypot(e[1]);
        ((len - r).max(0.0), len, e)
    }

    fn f(&self, x: &Vector3<f64>) -> f64 {
        let (h, _, _) = self.excess(x);
        (x[0] - self.y[0]).powi(2) + (x[1] - self.y[1]).powi(2) + (x[2] - self.y[2]).powi(2) + h * h
    }

    fn grad_f(&self, x: &Vector3<f64>) -> Vector3<f64> {
        let (rho, m1, m2) = (x[0], x[1], x[2]);
        let mut g = 2.0 * Vector3::new(rho - self.y[0], m1 - self.y[1], m2 - self.y[2]);
        let (h, len, e) = self.excess(x);
        if h > 0.0 {
            let u = [e[0] / len, e[1] / len];
            let dc11 = Vector3::new(-(m1 * m1 - m2 * m2) / (2.0 * rho * rho), m1 / rho, -m2 / rho);
            let dc12 = Vector3::new(-m1 * m2 / (rho * rho), m2 / rho, m1 / rho);
            let dh = -(dc11 * u[0] + dc12 * u[1]) - grad_r(x);
            g += 2.0 * h * dh;
        }
        g
    }

    fn hess_f(&self, x: &Vector3<f64>) -> Matrix3<f64> {
        let mut h = Matrix3::zeros();
        for j in 0..3 {
            let step = 1e-6 * x[j].abs().max(1e-3);
            let mut xp = *x;
            let mut xm = *x;
            xp[j] += step;
            xm[j] -= step;
            let col = (self.grad_f(&xp) - self.grad_f(&xm)) / (2.0 * step);
            h.set_column(j, &col);
        }
        0.5 * (h + h.transpose())
    }

    fn interior(&self, x: &Vector3<f64>) -> bool {
        x[0] > self.floor && self.disc(x).0 > 0.0
    }

    fn barrier(&self, x: &Vector3<f64>, t: f64) -> f64 {
        if !self.interior(x) {
            return f64::INFINITY;
        }
        t * self.f(x) - (x[0] - self.floor).ln() - self.disc(x).0.ln()
    }

    fn newton_system(&self, x: &Vector3<f64>, t: f64) -> (Vector3<f64>, Matrix3<f64>) {
        let (rho, m1, m2) = (x[0], x[1], x[2]);
        let s = rho - self.floor;
        let r = self.disc(x).0;
        let gr = grad_r(x);
        let mut g = t * self.grad_f(x) - gr / r;
        g[0] -= 1.0 / s;
        let msq = m1 * m1 + m2 * m2;
        let hr = Matrix3::new(
            -2.0 - msq / rho.powi(3),
            m1 / (rho * rho),
            m2 / (rho * rho),
            m1 / (rho * rho),
            -1.0 / rho,
            0.0,
            m2 / (rho * rho),
            0.0,
            -1.0 / rho,
        );
        let mut h = t * self.hess_f(x) + gr * gr.transpose() / (r * r) - hr / r;
        h[(0, 0)] += 1.0 / (s * s);
        (g, h)
    }
}

fn grad_r(x: &Vector3<f64>) -> Vector3<f64> {
    let (rho, m1, m2) = (x[0], x[1], x[2]);
    Vector3::new(-2.0 * rho + (m1 * m1 + m2 * m2) / (2.0 * rho * rho), -m1 / rho, -m2 / rho)
}

/// Projection onto `{ρ ≥ η/2, ρ² + e_kin ≤ q}` (no ball). For fixed `(ρ, m)`
/// the admissible `M` form a disc, which leaves a convex problem in three
/// variables solved by a log-barrier Newton method.
fn project_c1(y: &[f64; 5], spec: &ConstitutiveSpec) -> [f64; 5] {
    let prob = Reduced { y, q: spec.q_level, floor: spec.density_floor() };
    let mut x = Vector3::new(0.5 * (prob.floor + spec.max_density()), 0.0, 0.0);
    let mut t = 1.0;
    while 2.0 / t >= 1e-15 {
        for _ in 0..100 {
            let (g, h) = prob.newton_system(&x, t);
            let dir = h
                .cholesky()
                .map(|c| -c.solve(&g))
                .filter(|d| d.iter().all(|v| v.is_finite()) && d.dot(&g) < 0.0)
                .unwrap_or(-g);
            let dec = -dir.dot(&g);
            if dec <= 1e-20 {
                break;
            }
            let f0 = prob.barrier(&x, t);
            let mut step = 1.0;
            let mut moved = false;
            for _ in 0..80 {
                let xn = x + step * dir;
                let fn_ = prob.barrier(&xn, t);
                if fn_ <= f0 - 1e-4 * step * dec + 4.0 * f64::EPSILON * f0.abs() {
                    moved = (xn - x).norm() > 0.0;
                    x = xn;
                    break;
                }
                step *= 0.5;
            }
            if !moved || 0.5 * dec < 1e-13 {
                break;
            }
        }
        t *= 8.0;
    }
    let (r, c) = prob.disc(&x);
    let (_, len, e) = prob.excess(&x);
    let shrink = if len > r.max(0.0) { r.max(0.0) / len } else { 1.0 };
    [x[0], x[1], x[2], c[0] + e[0] * shrink, c[1] + e[1] * shrink]
}
