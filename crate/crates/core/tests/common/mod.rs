#![allow(dead_code)]

use euler_relax::geometry::ConstitutiveSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Maps a parameter box point to a member of the constitutive set:
/// `ρ`, `|m|` as a fraction of its maximum, angle of `m`, radial fraction and
/// angle of `M` inside its admissible disc. Returns `None` outside the ball.
pub fn member_from_params(p: &[f64; 5], spec: &ConstitutiveSpec) -> Option<[f64; 6]> {
    let q = spec.q_level;
    let lo = 0.5 * spec.eta;
    let rho = lo + p[0].clamp(0.0, 1.0) * (q.sqrt() - lo);
    let mmax = (2.0 * rho * (q - rho * rho)).max(0.0).sqrt();
    let mlen = p[1].clamp(0.0, 1.0) * mmax;
    let (m1, m2) = (mlen * p[2].cos(), mlen * p[2].sin());
    let c = [(m1 * m1 - m2 * m2) / (2.0 * rho), m1 * m2 / rho];
    let r = (q - rho * rho - mlen * mlen / (2.0 * rho)).max(0.0) * p[3].clamp(0.0, 1.0);
    let z = [rho, m1, m2, c[0] + r * p[4].cos(), c[1] + r * p[4].sin(), q];
    let n2: f64 = z.iter().map(|v| v * v).sum();
    (n2 <= spec.big_r * spec.big_r).then_some(z)
}

fn dist(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Distance to the constitutive set by dense random sampling of members,
/// followed by shrinking random local refinement of the best candidates.
pub fn sampled_distance(z: &[f64; 6], spec: &ConstitutiveSpec, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tau = std::f64::consts::TAU;
    let draw = |rng: &mut ChaCha8Rng| {
        [
            rng.random::<f64>(),
            rng.random::<f64>(),
            rng.random_range(0.0..tau),
            rng.random::<f64>(),
            rng.random_range(0.0..tau),
        ]
    };
    let mut pool: Vec<(f64, [f64; 5])> = Vec::new();
    for _ in 0..samples {
        // bias toward the boundary where projections tend to land
        let mut p = draw(&mut rng);
        if rng.random::<f64>() < 0.5 {
            p[3] = 1.0;
        }
        if let Some(w) = member_from_params(&p, spec) {
            pool.push((dist(z, &w), p));
        }
    }
    pool.sort_by(|a, b| a.0.total_cmp(&b.0));
    pool.truncate(16);
    let mut best = pool.first().map_or(f64::INFINITY, |b| b.0);
    for (d0, p0) in pool.iter_mut() {
        let mut step = 0.1;
        while step > 1e-9 {
            let mut improved = false;
            for _ in 0..60 {
                let mut p = *p0;
                for v in p.iter_mut() {
                    *v += step * rng.random_range(-1.0..1.0);
                }
                for i in [0, 1, 3] {
                    p[i] = p[i].clamp(0.0, 1.0);
                }
                if let Some(w) = member_from_params(&p, spec) {
                    let d = dist(z, &w);
                    if d < *d0 {
                        *d0 = d;
                        *p0 = p;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.min(*d0);
    }
    best
}
