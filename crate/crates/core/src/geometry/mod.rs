//! Vertex-represented polytopes: slices by level sets of the last
//! coordinate, point-to-hull distances and Hausdorff distances. Also the
//! distance to the constitutive set of the relaxed system.

mod constitutive;

pub use constitutive::{constitutive_distance, ConstitutiveSpec};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const REL_EPS: f64 = 1e-12;

/// Convex hull of finitely many points of `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Polytope {
    vertices: Vec<Vec<f64>>,
}

impl Polytope {
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = vertices.first() else {
            return Err(Error::Argument("a polytope needs at least one vertex".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::Argument("vertices must have at least one coordinate".into()));
        }
        for v in &vertices {
            if v.len() != n {
                return Err(Error::Argument("vertices have mixed dimensions".into()));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Argument("vertex coordinates must be finite".into()));
            }
        }
        Ok(Self { vertices })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Polytope = serde_json::from_str(s)?;
        Self::new(p.vertices)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("finite coordinates serialise")
    }

    /// `[0, 1]^n`.
    pub fn cube(n: usize) -> Self {
        let vertices = (0..1usize << n)
            .map(|bits| (0..n).map(|i| ((bits >> i) & 1) as f64).collect())
            .collect();
        Self { vertices }
    }

    /// Cross-polytope `conv{±e_i}`.
    pub fn octahedron(n: usize) -> Self {
        let mut vertices = Vec::with_capacity(2 * n);
        for i in 0..n {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; n];
                v[i] = s;
                vertices.push(v);
            }
        }
        Self { vertices }
    }

    /// `conv{0, e_1, ..., e_n}`.
    pub fn simplex(n: usize) -> Self {
        let mut vertices = vec![vec![0.0; n]];
        for i in 0..n {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            vertices.push(v);
        }
        Self { vertices }
    }

    /// Polytope spanned by the points of an `eps`-grid on the box `[lo, hi]`
    /// that satisfy `member`; approximates a compact convex set to within
    /// `√n·eps` in Hausdorff distance.
    pub fn epsilon_net<F: Fn(&[f64]) -> bool>(
        lo: &[f64],
        hi: &[f64],
        eps: f64,
        member: F,
    ) -> Result<Self> {
        if lo.len() != hi.len() || lo.is_empty() || !(eps > 0.0) {
            return Err(Error::Argument("bad epsilon-net box or spacing".into()));
        }
        let counts: Vec<usize> = lo
            .iter()
            .zip(hi)
            .map(|(a, b)| ((b - a) / eps).floor() as usize + 1)
            .collect();
        let total: usize = counts.iter().product();
        let mut vertices = Vec::new();
        let mut p = vec![0.0; lo.len()];
        for mut k in 0..total {
            for (i, c) in counts.iter().enumerate() {
                p[i] = lo[i] + (k % c) as f64 * eps;
                k /= c;
            }
            if member(&p) {
                vertices.push(p.clone());
            }
        }
        Self::new(vertices)
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    /// Range of the last coordinate.
    pub fn last_range(&self) -> (f64, f64) {
        let k = self.dim() - 1;
        self.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v[k]), b.max(v[k]))
        })
    }

    fn scale(&self) -> f64 {
        self.vertices
            .iter()
            .flat_map(|v| v.iter())
            .fold(1.0f64, |a, x| a.max(x.abs()))
    }

    /// Removes duplicates and points lying in the hull of the others.
    pub fn pruned(&self) -> Self {
        let tol = REL_EPS * self.scale();
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for v in &self.vertices {
            if !pts.iter().any(|p| dist(p, v) <= tol) {
                pts.push(v.clone());
            }
        }
        let mut i = 0;
        while i < pts.len() && pts.len() > 1 {
            let others: Vec<Vec<f64>> =
                pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, p)| p.clone()).collect();
            if distance_to_hull(&pts[i], &others) <= tol {
                pts.remove(i);
            } else {
                i += 1;
            }
        }
        Self { vertices: pts }
    }

    /// Whether both polytopes have the same extreme points up to `tol`.
    pub fn same_vertices(&self, other: &Polytope, tol: f64) -> bool {
        let a = self.pruned();
        let b = other.pruned();
        a.vertices.len() == b.vertices.len()
            && a.vertices.iter().all(|v| b.vertices.iter().any(|w| dist(v, w) <= tol))
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// `K ∩ {z_n = level}` in ambient coordinates.
pub fn polytope_slice(k: &Polytope, level: f64) -> Result<Polytope> {
    let (lo, hi) = k.last_range();
    let tol = REL_EPS * k.scale();
    if !(level >= lo - tol && level <= hi + tol) {
        return Err(Error::EmptySlice { level, min: lo, max: hi });
    }
    let last = k.dim() - 1;
    let vs = k.vertices();
    let mut pts = Vec::new();
    for v in vs {
        if (v[last] - level).abs() <= tol {
            let mut p = v.clone();
            p[last] = level;
            pts.push(p);
        }
    }
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            let (a, b) = (&vs[i], &vs[j]);
            let (da, db) = (a[last] - level, b[last] - level);
            if (da > tol && db < -tol) || (da < -tol && db > tol) {
                let s = da / (da - db);
                let mut p: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect();
                p[last] = level;
                pts.push(p);
            }
        }
    }
    Ok(Polytope { vertices: pts }.pruned())
}

/// Minimum-norm point of `conv(points)` by Wolfe's algorithm; returns the
/// point and its barycentric weights.
pub fn min_norm_point(points: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = points.len();
    let dim = points[0].len();
    let pmat: Vec<DVector<f64>> = points.iter().map(|p| DVector::from_row_slice(p)).collect();
    let scale = pmat.iter().fold(0.0f64, |a, p| a.max(p.norm_squared())).max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;
    let start = (0..n)
        .min_by(|&i, &j| pmat[i].norm_squared().total_cmp(&pmat[j].norm_squared()))
        .expect("nonempty");
    let mut set = vec![start];
    let mut lam = vec![1.0];
    let mut x = pmat[start].clone();
    for _ in 0..(50 * (n + dim + 1)) {
        let (j, best) = (0..n)
            .map(|i| (i, x.dot(&pmat[i])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if x.norm_squared() - best <= tol || set.contains(&j) {
            break;
        }
        set.push(j);
        lam.push(0.0);
        loop {
            let mu = affine_min_norm(&pmat, &set);
            if mu.iter().all(|&m| m > 1e-15) {
                lam = mu;
                break;
            }
            let mut theta: f64 = 1.0;
            for (l, m) in lam.iter().zip(&mu) {
                if *m <= 1e-15 && l - m > 0.0 {
                    theta = theta.min(l / (l - m));
                }
            }
            for (l, m) in lam.iter_mut().zip(&mu) {
                *l += theta * (m - *l);
            }
            let mut k = 0;
            while k < set.len() {
                if lam[k] <= 1e-15 {
                    set.remove(k);
                    lam.remove(k);
                } else {
                    k += 1;
                }
            }
            let s: f64 = lam.iter().sum();
            lam.iter_mut().for_each(|l| *l /= s);
            if set.len() == 1 {
                lam = vec![1.0];
                break;
            }
        }
        x = set.iter().zip(&lam).fold(DVector::zeros(dim), |acc, (&i, &l)| acc + &pmat[i] * l);
    }
    let mut weights = vec![0.0; n];
    for (&i, &l) in set.iter().zip(&lam) {
        weights[i] = l;
    }
    (x.iter().copied().collect(), weights)
}

/// Weights `μ` (summing to one) of the minimum-norm point of the affine hull
/// of the selected points.
fn affine_min_norm(p: &[DVector<f64>], set: &[usize]) -> Vec<f64> {
    let k = set.len();
    let mut a = DMatrix::zeros(k + 1, k + 1);
    let mut rhs = DVector::zeros(k + 1);
    for (r, &i) in set.iter().enumerate() {
        for (c, &j) in set.iter().enumerate() {
            a[(r, c)] = p[i].dot(&p[j]);
        }
        a[(r, k)] = 1.0;
        a[(k, r)] = 1.0;
    }
    rhs[k] = 1.0;
    let sol = a
        .clone()
        .lu()
        .solve(&rhs)
        .filter(|s| s.iter().all(|v| v.is_finite()))
        .unwrap_or_else(|| {
            a.svd(true, true)
                .solve(&rhs, 1e-13)
                .expect("svd solve")
        });
    sol.iter().take(k).copied().collect()
}

/// Euclidean distance from `p` to `conv(points)`.
pub fn distance_to_hull(p: &[f64], points: &[Vec<f64>]) -> f64 {
    let shifted: Vec<Vec<f64>> =
        points.iter().map(|v| v.iter().zip(p).map(|(a, b)| a - b).collect()).collect();
    let (x, _) = min_norm_point(&shifted);
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Distance from `p` to `conv(points)` by enumerating every affinely
/// independent subset of at most `n + 1` points and keeping feasible affine
/// projections. Exponential; intended as a test oracle.
pub fn distance_to_hull_bruteforce(p: &[f64], points: &[Vec<f64>]) -> f64 {
    let n = p.len();
    let shifted: Vec<DVector<f64>> = points
        .iter()
        .map(|v| DVector::from_iterator(n, v.iter().zip(p).map(|(a, b)| a - b)))
        .collect();
    let m = shifted.len();
    let mut best = f64::INFINITY;
    let mut subset = Vec::new();
    fn rec(
        start: usize,
        m: usize,
        max: usize,
        subset: &mut Vec<usize>,
        pts: &[DVector<f64>],
        best: &mut f64,
    ) {
        if !subset.is_empty() {
            let k = subset.len();
            let mut g = DMatrix::zeros(k + 1, k + 1);
            let mut rhs = DVector::zeros(k + 1);
            for (r, &i) in subset.iter().enumerate() {
                for (c, &j) in subset.iter().enumerate() {
                    g[(r, c)] = pts[i].dot(&pts[j]);
                }
                g[(r, k)] = 1.0;
                g[(k, r)] = 1.0;
            }
            rhs[k] = 1.0;
            if let Some(sol) = g.lu().solve(&rhs) {
                if sol.iter().take(k).all(|&w| w >= -1e-12) && sol.iter().all(|v| v.is_finite()) {
                    let x = subset
                        .iter()
                        .zip(sol.iter())
                        .fold(DVector::zeros(pts[0].len()), |acc, (&i, &w)| acc + &pts[i] * w);
                    *best = best.min(x.norm());
                }
            }
        }
        if subset.len() == max {
            return;
        }
        for i in start..m {
            subset.push(i);
            rec(i + 1, m, max, subset, pts, best);
            subset.pop();
        }
    }
    rec(0, m, (n + 1).min(m), &mut subset, &shifted, &mut best);
    best
}

fn check_pair(p: &Polytope, q: &Polytope) -> Result<()> {
    if p.dim() != q.dim() {
        return Err(Error::Argument(format!(
            "polytopes live in different dimensions ({} vs {})",
            p.dim(),
            q.dim()
        )));
    }
    Ok(())
}

/// Hausdorff distance of the hulls; the one-sided suprema are attained at
/// vertices.
pub fn hausdorff_distance(p: &Polytope, q: &Polytope) -> Result<f64> {
    check_pair(p, q)?;
    let one = |a: &Polytope, b: &Polytope| {
        a.vertices.iter().map(|v| distance_to_hull(v, &b.vertices)).fold(0.0, f64::max)
    };
    Ok(one(p, q).max(one(q, p)))
}

/// [`hausdorff_distance`] with the brute-force point-to-hull oracle.
pub fn hausdorff_distance_bruteforce(p: &Polytope, q: &Polytope) -> Result<f64> {
    check_pair(p, q)?;
    let one = |a: &Polytope, b: &Polytope| {
        a.vertices
            .iter()
            .map(|v| distance_to_hull_bruteforce(v, &b.vertices))
            .fold(0.0, f64::max)
    };
    Ok(one(p, q).max(one(q, p)))
}

/// Result of [`slice_continuity_audit`].
#[derive(Debug, Clone, PartialEq)]
pub struct SliceAudit {
    /// `max d_H(B_x, B_y) / |f(x) - f(y)|` over pairs with distinct levels.
    pub empirical_slope: f64,
    /// Smallest such ratio; equals the slope when `d_H` is linear in the level gap.
    pub min_slope: f64,
    pub max_distance: f64,
    /// `(δ, max d_H(B_x, B_y) over |x - y| <= δ)`.
    pub modulus: Vec<(f64, f64)>,
    pub pairs: usize,
    /// Every sampled ratio is bounded by the reported slope.
    pub consistent: bool,
}

/// Slices `K` at the levels `f(x_i)` and measures the Hausdorff modulus of
/// continuity of `x ↦ B_x` over all sample pairs.
pub fn slice_continuity_audit(
    k: &Polytope,
    xs: &[f64],
    fx: &[f64],
    deltas: &[f64],
) -> Result<SliceAudit> {
    audit_with(k, xs, fx, deltas, hausdorff_distance)
}

/// [`slice_continuity_audit`] driven by the brute-force distance oracle.
pub fn slice_continuity_audit_bruteforce(
    k: &Polytope,
    xs: &[f64],
    fx: &[f64],
    deltas: &[f64],
) -> Result<SliceAudit> {
    audit_with(k, xs, fx, deltas, hausdorff_distance_bruteforce)
}

fn audit_with<D>(k: &Polytope, xs: &[f64], fx: &[f64], deltas: &[f64], dh: D) -> Result<SliceAudit>
where
    D: Fn(&Polytope, &Polytope) -> Result<f64>,
{
    if xs.len() != fx.len() || xs.len() < 2 {
        return Err(Error::Argument("audit needs at least two (x, f(x)) samples".into()));
    }
    let slices = fx.iter().map(|&l| polytope_slice(k, l)).collect::<Result<Vec<_>>>()?;
    let mut ratios = Vec::new();
    let mut dists = Vec::new();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let d = dh(&slices[i], &slices[j])?;
            let df = (fx[i] - fx[j]).abs();
            if df > REL_EPS {
                ratios.push(d / df);
            }
            dists.push(((xs[i] - xs[j]).abs(), d));
        }
    }
    let slope = ratios.iter().copied().fold(0.0, f64::max);
    let min_slope = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let modulus = deltas
        .iter()
        .map(|&delta| {
            let eps = dists
                .iter()
                .filter(|(dx, _)| *dx <= delta)
                .map(|(_, d)| *d)
                .fold(0.0, f64::max);
            (delta, eps)
        })
        .collect();
    Ok(SliceAudit {
        empirical_slope: slope,
        min_slope: if ratios.is_empty() { 0.0 } else { min_slope },
        max_distance: dists.iter().map(|(_, d)| *d).fold(0.0, f64::max),
        modulus,
        pairs: dists.len(),
        consistent: ratios.iter().all(|r| *r <= slope) && slope.is_finite(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_slice_is_square() {
        let s = polytope_slice(&Polytope::cube(3), 0.5).unwrap();
        let sq = Polytope::new(vec![
            vec![0.0, 0.0, 0.5],
            vec![1.0, 0.0, 0.5],
            vec![0.0, 1.0, 0.5],
            vec![1.0, 1.0, 0.5],
        ])
        .unwrap();
        assert!(s.same_vertices(&sq, 1e-12));
    }

    #[test]
    fn simplex_slice_is_triangle() {
        let s = polytope_slice(&Polytope::simplex(3), 0.5).unwrap();
        let tri = Polytope::new(vec![
            vec![0.0, 0.0, 0.5],
            vec![0.5, 0.0, 0.5],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap();
        assert!(s.same_vertices(&tri, 1e-12));
    }

    #[test]
    fn top_slice_is_a_point() {
        let s = polytope_slice(&Polytope::simplex(3), 1.0).unwrap();
        assert_eq!(s.vertices(), &[vec![0.0, 0.0, 1.0]]);
        assert!(matches!(
            polytope_slice(&Polytope::cube(2), 1.5),
            Err(Error::EmptySlice { .. })
        ));
    }

    #[test]
    fn slice_is_idempotent() {
        let s = polytope_slice(&Polytope::octahedron(3), 0.3).unwrap();
        let t = polytope_slice(&s, 0.3).unwrap();
        assert!(s.same_vertices(&t, 1e-12));
    }

    #[test]
    fn wolfe_matches_bruteforce() {
        let pts = vec![
            vec![1.0, 2.0, 0.5],
            vec![-1.0, 1.5, 0.2],
            vec![0.3, -0.7, 1.0],
            vec![2.0, 0.0, -1.0],
            vec![0.1, 0.1, 3.0],
        ];
        for p in [[0.0, 0.0, 0.0], [5.0, 5.0, 5.0], [0.5, 0.8, 0.5], [-3.0, 0.0, 1.0]] {
            let a = distance_to_hull(&p, &pts);
            let b = distance_to_hull_bruteforce(&p, &pts);
            assert!((a - b).abs() < 1e-10, "{a} {b}");
        }
    }

    #[test]
    fn hausdorff_examples() {
        let sq = Polytope::cube(2);
        assert_eq!(hausdorff_distance(&sq, &sq).unwrap(), 0.0);
        let moved = Polytope::new(sq.vertices().iter().map(|v| vec![v[0] + 1.0, v[1]]).collect())
            .unwrap();
        assert!((hausdorff_distance(&sq, &moved).unwrap() - 1.0).abs() < 1e-12);
        let cube = Polytope::cube(3);
        let drop = |p: Polytope| {
            Polytope::new(p.vertices().iter().map(|v| v[..2].to_vec()).collect()).unwrap()
        };
        let a = drop(polytope_slice(&cube, 0.3).unwrap());
        let b = drop(polytope_slice(&cube, 0.6).unwrap());
        assert!(hausdorff_distance(&a, &b).unwrap() < 1e-12);
        assert!(hausdorff_distance(&sq, &cube).is_err());
    }

    #[test]
    fn audits() {
        let xs: Vec<f64> = (0..9).map(|i| 0.1 + 0.1 * i as f64).collect();
        let cube = slice_continuity_audit(&Polytope::cube(3), &xs, &xs, &[0.1, 0.3]).unwrap();
        assert!((cube.empirical_slope - 1.0).abs() < 1e-12);
        assert!(cube.consistent);
        let oct = slice_continuity_audit(&Polytope::octahedron(3), &xs, &xs, &[0.1]).unwrap();
        assert!((oct.empirical_slope - 2f64.sqrt()).abs() < 1e-9);
        assert!((oct.empirical_slope - oct.min_slope).abs() < 1e-9);
        let flat = vec![0.5; 9];
        let c = slice_continuity_audit(&Polytope::cube(3), &xs, &flat, &[1.0]).unwrap();
        assert_eq!(c.max_distance, 0.0);
        assert!(matches!(
            slice_continuity_audit(&Polytope::cube(3), &[0.0, 1.0], &[0.5, 2.0], &[]),
            Err(Error::EmptySlice { .. })
        ));
    }

    #[test]
    fn epsilon_net_of_disc() {
        let p = Polytope::epsilon_net(&[-1.0, -1.0], &[1.0, 1.0], 0.05, |x| {
            x[0] * x[0] + x[1] * x[1] <= 1.0
        })
        .unwrap();
        // the hull sits inside the disc and within √2·eps of it
        let far = Polytope::new(vec![vec![1.0, 0.0]]).unwrap();
        let d = hausdorff_distance(&far, &Polytope::new(vec![vec![0.0, 0.0]]).unwrap()).unwrap();
        assert_eq!(d, 1.0);
        assert!(distance_to_hull(&[1.0, 0.0], p.vertices()) <= 2f64.sqrt() * 0.05);
    }

    #[test]
    fn json_round_trip() {
        let p = Polytope::from_json(r#"{"vertices":[[0,0],[1,0],[0,1]]}"#).unwrap();
        assert_eq!(Polytope::from_json(&p.to_json()).unwrap(), p);
        assert!(Polytope::from_json(r#"{"vertices":[]}"#).is_err());
    }
}
