use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use super::config::*;
use super::Command;
use crate::error::{Error, Result};
use crate::geometry::{
    hausdorff_distance, slice_continuity_audit, slice_continuity_audit_bruteforce, Polytope,
};
use crate::laminate::{
    jensen_witness_check, laminate_field, DiatomicMeasure, EmpiricalMeasure, JensenOptions,
    LaminateProfile,
};
use crate::report::{num, num_array, Check, Report};
use crate::shear::{shear_potential, verify_shear, ShearSpec};
use crate::symbol::{
    euler_symbol, exactness_check, fibonacci_sphere, potential_symbol, rank, FrequencyVector,
};
use crate::torus::{
    apply_euler_operator, apply_potential_operator, norm_diagnostics, solve_potential, TorusField,
    TorusGrid,
};
use crate::torus::io::{encode, read_field, write_slice_csv, FieldMetadata, SliceAxis};

/// A file produced by a command, written next to `report.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn text(name: &str, s: String) -> Self {
        Self { name: name.into(), bytes: s.into_bytes() }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// Runs `command` on the JSON config `text`. Relative paths in the config are
/// resolved against `base`.
pub fn execute(command: Command, text: &str, base: &Path, seed: u64) -> Result<Outcome> {
    match command {
        Command::Symbols => symbols(&parse(text)?, seed),
        Command::Solve => solve(&parse(text)?, base, seed),
        Command::Shear => shear(&parse(text)?),
        Command::Laminate => laminate(&parse(text)?),
        Command::Hausdorff => hausdorff(&parse(text)?, seed),
    }
}

fn grid_of(g: &GridConfig) -> Result<TorusGrid> {
    TorusGrid::new(g.n_t, g.n_x, g.n_y, g.period_t).map_err(|e| config_error(e.to_string()))
}

fn symbols(cfg: &SymbolsConfig, seed: u64) -> Result<Outcome> {
    if cfg.samples == 0 {
        return Err(config_error("samples must be positive"));
    }
    if !(cfg.rank_tol > 0.0) {
        return Err(config_error("rank_tol must be positive"));
    }
    let mut dirs = fibonacci_sphere(cfg.samples);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while dirs.len() < cfg.samples + cfg.random_samples {
        let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-3 && n <= 1.0 {
            dirs.push(FrequencyVector::from_array(v.map(|x| x / n)));
        }
    }
    let mut csv = String::from("omega_t,omega_x,omega_y,rank_a,rank_b,projector_gap\n");
    let (mut bad_a, mut bad_b) = (0usize, 0usize);
    let (mut gap, mut product, mut homog) = (0.0f64, 0.0f64, 0.0f64);
    let (mut ranks_a, mut ranks_b) = ([usize::MAX, 0], [usize::MAX, 0]);
    let c = 2.5;
    for &w in &dirs {
        let a = euler_symbol(w);
        let b = potential_symbol(w);
        let ra = rank(&a, cfg.rank_tol);
        let rb = rank(&b, cfg.rank_tol);
        ranks_a = [ranks_a[0].min(ra), ranks_a[1].max(ra)];
        ranks_b = [ranks_b[0].min(rb), ranks_b[1].max(rb)];
        bad_a += usize::from(ra != cfg.expected_rank);
        bad_b += usize::from(rb != cfg.expected_rank);
        let ex = exactness_check(w, cfg.gap_tol)?;
        gap = gap.max(ex.projector_gap);
        let ab = (a.matrix() * b.matrix()).norm() / (a.matrix().norm() * b.matrix().norm());
        product = product.max(ab);
        let ha = (euler_symbol(w.scale(c)).matrix() - a.matrix() * c).norm() / (c * a.matrix().norm());
        let hb = (potential_symbol(w.scale(c)).matrix() - b.matrix() * (c * c)).norm()
            / (c * c * b.matrix().norm());
        homog = homog.max(ha).max(hb);
        let [t, x, y] = w.to_array();
        writeln!(csv, "{t:.17e},{x:.17e},{y:.17e},{ra},{rb},{:.17e}", ex.projector_gap).unwrap();
    }
    let mut r = Report::new("symbols");
    if cfg.rank_tol < 1e-15 {
        r.push(
            Check::at_least("rank_tolerance", cfg.rank_tol, 1e-15).with_detail(
                "rank tolerance is below machine precision: round-off singular values are \
                 counted as nonzero, so the computed ranks are unstable",
            ),
        );
    }
    r.push(Check::at_most("rank_a_mismatches", bad_a as f64, 0.0));
    r.push(Check::at_most("rank_b_mismatches", bad_b as f64, 0.0));
    r.push(Check::at_most("projector_gap", gap, cfg.gap_tol));
    r.push(Check::at_most("symbol_product", product, cfg.product_tol));
    r.push(Check::at_most("homogeneity", homog, cfg.homogeneity_tol));
    r.insert("directions", json!(dirs.len()));
    r.insert("rank_a_range", json!(ranks_a));
    r.insert("rank_b_range", json!(ranks_b));
    let mut artifacts = Vec::new();
    if cfg.write_csv {
        artifacts.push(Artifact::text("symbols.csv", csv));
    }
    Ok(Outcome { report: r, artifacts })
}

fn solve(cfg: &SolveConfig, base: &Path, seed: u64) -> Result<Outcome> {
    if !(cfg.tol > 0.0) || !(cfg.p >= 1.0) {
        return Err(config_error("tol must be positive and p >= 1"));
    }
    let z = match &cfg.input {
        SolveInput::File { path } => read_field(&base.join(path))
            .map_err(|e| config_error(format!("cannot load field {path}: {e}")))?,
        SolveInput::RandomPotential { grid, max_mode } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = TorusField::random_smooth(grid_of(grid)?, 9, *max_mode, &mut rng);
            apply_potential_operator(&w)?
        }
        SolveInput::Constant { grid, value } => TorusField::constant(grid_of(grid)?, value),
        SolveInput::Shear { alpha, beta, lambda, grid } => {
            let spec = ShearSpec::new(alpha.clone(), beta.clone(), *lambda, grid_of(grid)?)
                .map_err(|e| config_error(e.to_string()))?;
            let sol = crate::shear::build_shear_solutions(&spec)?;
            let bar = crate::shear::barycenter_field(spec.lambda, &sol.z1, &sol.z2)?;
            let mean = bar.mean();
            bar.shift(&mean.iter().map(|v| -v).collect::<Vec<_>>())?
        }
    };
    if z.components() != 6 {
        return Err(config_error(format!("solve needs a 6-component field, got {}", z.components())));
    }
    let afree = {
        let n = z.rms();
        let r = apply_euler_operator(&z)?.rms();
        if n > 0.0 { r / n } else { r }
    };
    let sol = solve_potential(&z, cfg.tol)?;
    if !sol.exact {
        return Err(Error::Precondition(format!(
            "potential solve is not exact: residual {:.3e} > {:.1e}",
            sol.residual, cfg.tol
        )));
    }
    let diag = norm_diagnostics(&sol.w, &z, cfg.p)?;
    let mut r = Report::new("solve");
    r.push(Check::at_most("afree_residual", afree, cfg.afree_tol));
    r.push(Check::at_most("potential_residual", sol.residual, cfg.tol));
    let g = z.grid();
    r.insert("grid", json!([g.n_t, g.n_x, g.n_y]));
    r.insert("lp_z", num(diag.lp_z));
    r.insert("w2p_w", num(diag.w2p_w));
    r.insert("ratio", num(diag.ratio));
    r.insert("p", num(diag.p));
    let mut artifacts = Vec::new();
    if cfg.write_potential {
        artifacts.push(Artifact { name: "potential.bin".into(), bytes: encode(&sol.w) });
        let meta = serde_json::to_string_pretty(&FieldMetadata::of(&sol.w))? + "\n";
        artifacts.push(Artifact::text("potential.bin.json", meta));
    }
    let resid = apply_potential_operator(&sol.w)?.sub(&z)?;
    let mut csv = Vec::new();
    write_slice_csv(&mut csv, &resid, SliceAxis::T, 0)?;
    artifacts.push(Artifact { name: "residual_slice.csv".into(), bytes: csv });
    Ok(Outcome { report: r, artifacts })
}

fn shear(cfg: &ShearConfig) -> Result<Outcome> {
    let spec = ShearSpec::new(cfg.alpha.clone(), cfg.beta.clone(), cfg.lambda, grid_of(&cfg.grid)?)
        .map_err(|e| config_error(e.to_string()))?
        .with_method(cfg.method);
    let rep = verify_shear(&spec, &cfg.tolerances)?;
    let pot = shear_potential(&spec)?;
    let mut r = Report::new("shear");
    r.extend(rep.checks.iter().cloned());
    if let Some(expect) = cfg.expect_degenerate {
        let ok = expect == rep.degenerate;
        r.push(Check::at_most("degenerate_flag", f64::from(u8::from(!ok)), 0.0).with_detail(format!(
            "expected degenerate = {expect}, found {}",
            rep.degenerate
        )));
    }
    r.insert("degenerate", json!(rep.degenerate));
    r.insert("continuous", json!(rep.continuous));
    r.insert("sigma", num_array(&rep.sigma));
    let n = cfg.grid.n_y;
    let alpha = cfg.alpha.sample(n)?;
    let beta = cfg.beta.sample(n)?;
    let mut csv = String::from("y,alpha,beta,a,b,f_a,f_b\n");
    for i in 0..n {
        writeln!(
            csv,
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            i as f64 / n as f64,
            alpha[i],
            beta[i],
            pot.a[i],
            pot.b[i],
            pot.f_a[i],
            pot.f_b[i]
        )
        .unwrap();
    }
    Ok(Outcome { report: r, artifacts: vec![Artifact::text("shear_profiles.csv", csv)] })
}

fn laminate(cfg: &LaminateConfig) -> Result<Outcome> {
    if cfg.n_values.is_empty() || cfg.polynomials.is_empty() {
        return Err(config_error("n_values and polynomials must be nonempty"));
    }
    let mu = DiatomicMeasure::new(cfg.z1, cfg.z2, cfg.lambda).map_err(|e| config_error(e.to_string()))?;
    let dn = cfg.direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if dn == 0.0 {
        return Err(config_error("direction must be nonzero"));
    }
    let dir = FrequencyVector::from_array(cfg.direction.map(|v| v / dn));
    let grid = grid_of(&cfg.grid)?;
    let bar = mu.barycenter();
    let targets: Vec<f64> = cfg.polynomials.iter().map(|p| mu.integrate(|z| p.eval(z))).collect();
    let mut r = Report::new("laminate");
    let mut csv = String::from("n,polynomial,error,bound\n");
    let mut max_errors = Vec::new();
    let mut mean_dev: f64 = 0.0;
    let mut artifacts = Vec::new();
    for &n in &cfg.n_values {
        let prof = LaminateProfile::new(dir, n).map_err(|e| config_error(e.to_string()))?;
        let field = laminate_field(&mu, &prof, grid)?;
        let m = field.mean();
        mean_dev = mean_dev.max(m.iter().zip(&bar).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        let emp = match cfg.window {
            Some([lo, hi]) => EmpiricalMeasure::windowed(&field, |s| s[2] >= lo && s[2] < hi)
                .map_err(|e| config_error(e.to_string()))?,
            None => EmpiricalMeasure::uniform(&field)?,
        };
        let bound = cfg.error_constant / n as f64;
        let mut worst: f64 = 0.0;
        for (i, (p, t)) in cfg.polynomials.iter().zip(&targets).enumerate() {
            let e = emp.test_against(|z| p.eval(z), *t);
            worst = worst.max(e);
            writeln!(csv, "{n},{i},{e:.17e},{bound:.17e}").unwrap();
        }
        r.push(Check::at_most(format!("measure_error_n{n}"), worst, bound));
        max_errors.push(worst);
        if cfg.histogram_bins > 0 {
            let mut h = Vec::new();
            emp.write_histogram_csv(&mut h, 1, cfg.histogram_bins)?;
            artifacts.push(Artifact { name: format!("histogram_n{n}.csv"), bytes: h });
        }
    }
    let increases = max_errors
        .windows(2)
        .filter(|w| !(w[1] < w[0] || (w[0] <= 1e-14 && w[1] <= 1e-14)))
        .count();
    r.push(Check::at_most("error_decreasing_violations", increases as f64, 0.0));
    r.push(Check::at_most("mean_equals_barycenter", mean_dev, cfg.mean_tol));
    r.insert("n_values", json!(cfg.n_values));
    r.insert("max_errors", num_array(&max_errors));
    artifacts.push(Artifact::text("laminate_convergence.csv", csv));

    if let Some(j) = &cfg.jensen {
        let opts = JensenOptions {
            delta: j.delta,
            base_points: j.base_points,
            points_per_period: j.points_per_period,
            period_t: cfg.grid.period_t,
        };
        let mut jcsv = String::from("n,function,witness_value,diatomic_value,hessian_sup,c_measured,c_bound\n");
        let mut c_meas: Vec<f64> = Vec::new();
        let mut rows = Vec::new();
        for &n in &j.n_values {
            let prof = LaminateProfile::new(dir, n).map_err(|e| config_error(e.to_string()))?;
            for (i, f) in j.functions.iter().enumerate() {
                let rep = jensen_witness_check(&mu, &prof, |z| f.eval(z), j.eps, &opts)?;
                r.push(Check::at_least(format!("jensen_margin_n{n}_f{i}"), rep.jensen_margin, 0.0));
                r.push(Check::at_least(format!("derivative_margin_n{n}_f{i}"), rep.derivative_margin, 0.0));
                writeln!(
                    jcsv,
                    "{n},{i},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                    rep.witness_value, rep.diatomic_value, rep.hessian_sup, rep.c_measured, rep.c_bound
                )
                .unwrap();
                if i == 0 {
                    c_meas.push(rep.c_measured);
                }
                rows.push(json!({
                    "n": n,
                    "function": i,
                    "witness_value": num(rep.witness_value),
                    "diatomic_value": num(rep.diatomic_value),
                    "c_measured": num(rep.c_measured),
                    "c_bound": num(rep.c_bound),
                }));
            }
        }
        if let Some(&c0) = c_meas.first() {
            let spread = c_meas.iter().map(|c| (c / c0 - 1.0).abs()).fold(0.0, f64::max);
            r.push(Check::at_most("c_measured_spread", spread, j.stability));
        }
        r.insert("jensen", Value::Array(rows));
        artifacts.push(Artifact::text("jensen.csv", jcsv));
    }
    Ok(Outcome { report: r, artifacts })
}

fn polytope_of(src: &PolytopeSource) -> Result<Polytope> {
    let dim_ok = |d: usize| {
        if (1..=4).contains(&d) {
            Ok(d)
        } else {
            Err(config_error(format!("polytope dimension {d} outside 1..=4")))
        }
    };
    Ok(match src {
        PolytopeSource::Cube { dim } => Polytope::cube(dim_ok(*dim)?),
        PolytopeSource::Octahedron { dim } => Polytope::octahedron(dim_ok(*dim)?),
        PolytopeSource::Simplex { dim } => Polytope::simplex(dim_ok(*dim)?),
        PolytopeSource::Vertices { vertices } => {
            Polytope::new(vertices.clone()).map_err(|e| config_error(e.to_string()))?
        }
    })
}

fn random_polytope(rng: &mut ChaCha8Rng, dim: usize) -> Polytope {
    let n = rng.random_range(1..=6);
    let v = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    Polytope::new(v).expect("finite vertices")
}

fn hausdorff(cfg: &HausdorffConfig, seed: u64) -> Result<Outcome> {
    let mut r = Report::new("hausdorff");
    let mut csv = String::from("case,delta,epsilon\n");
    let mut cases = serde_json::Map::new();
    for case in &cfg.cases {
        if case.count < 2 {
            return Err(config_error(format!("case {}: count must be at least 2", case.name)));
        }
        let k = polytope_of(&case.polytope)?;
        let [a, b] = case.x_range;
        let xs: Vec<f64> =
            (0..case.count).map(|i| a + (b - a) * i as f64 / (case.count - 1) as f64).collect();
        let fx: Vec<f64> = match &case.f {
            LevelFunction::Linear { slope, offset } => xs.iter().map(|x| slope * x + offset).collect(),
            LevelFunction::Constant { value } => vec![*value; xs.len()],
            LevelFunction::Values { values } => {
                if values.len() != xs.len() {
                    return Err(config_error(format!(
                        "case {}: {} values for {} samples",
                        case.name,
                        values.len(),
                        xs.len()
                    )));
                }
                values.clone()
            }
        };
        let audit = slice_continuity_audit(&k, &xs, &fx, &case.deltas)?;
        let name = &case.name;
        r.push(Check::at_most(format!("{name}_slope_finite"), f64::from(u8::from(!audit.empirical_slope.is_finite())), 0.0));
        r.push(Check::at_most(
            format!("{name}_consistent"),
            f64::from(u8::from(!audit.consistent)),
            0.0,
        ));
        if case.oracle {
            let o = slice_continuity_audit_bruteforce(&k, &xs, &fx, &case.deltas)?;
            r.push(Check::at_most(
                format!("{name}_oracle_agreement"),
                (o.empirical_slope - audit.empirical_slope).abs(),
                case.slope_tol,
            ));
        }
        if let Some(s) = case.expected_slope {
            r.push(Check::at_most(
                format!("{name}_expected_slope"),
                (audit.empirical_slope - s).abs(),
                case.slope_tol,
            ));
        }
        for (d, e) in &audit.modulus {
            writeln!(csv, "{name},{d:.17e},{e:.17e}").unwrap();
        }
        cases.insert(
            name.clone(),
            json!({
                "empirical_slope": num(audit.empirical_slope),
                "min_slope": num(audit.min_slope),
                "max_distance": num(audit.max_distance),
                "pairs": audit.pairs,
                "modulus": audit.modulus.iter().map(|(d, e)| num_array(&[*d, *e])).collect::<Vec<_>>(),
            }),
        );
    }
    if cfg.metric_trials > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut sym, mut tri, mut ident): (f64, f64, f64) = (0.0, 0.0, 0.0);
        for _ in 0..cfg.metric_trials {
            let dim = rng.random_range(1..=3);
            let p = random_polytope(&mut rng, dim);
            let q = random_polytope(&mut rng, dim);
            let s = random_polytope(&mut rng, dim);
            let pq = hausdorff_distance(&p, &q)?;
            let qp = hausdorff_distance(&q, &p)?;
            let qs = hausdorff_distance(&q, &s)?;
            let ps = hausdorff_distance(&p, &s)?;
            sym = sym.max((pq - qp).abs());
            tri = tri.max(ps - pq - qs);
            ident = ident.max(hausdorff_distance(&p, &p)?);
        }
        r.push(Check::at_most("metric_symmetry", sym, cfg.metric_tol));
        r.push(Check::at_most("metric_triangle_excess", tri, cfg.metric_tol));
        r.push(Check::at_most("metric_identity", ident, cfg.metric_tol));
    }
    r.insert("cases", Value::Object(cases));
    Ok(Outcome { report: r, artifacts: vec![Artifact::text("hausdorff_modulus.csv", csv)] })
}
