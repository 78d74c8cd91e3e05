use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use euler_relax_ffi::*;

fn last_error() -> String {
    let p = er_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

#[test]
fn scalar_functions() {
    let mut z = [0.0; 6];
    assert_eq!(unsafe { er_lift(1.0, 1.0, 0.0, z.as_mut_ptr()) }, ErStatus::Ok);
    assert_eq!(z, [1.0, 1.0, 0.0, 0.5, 0.0, 1.5]);
    let mut v = f64::NAN;
    assert_eq!(unsafe { er_subsolution_margin(z.as_ptr(), &mut v) }, ErStatus::Ok);
    assert!(v.abs() < 1e-12);
    assert_eq!(unsafe { er_kinetic_energy_density(1.0, 1.0, 0.0, 0.5, 0.0, &mut v) }, ErStatus::Ok);
    assert!((v - 0.5).abs() < 1e-14);
    assert_eq!(
        unsafe { er_kinetic_energy_density(-1.0, 0.0, 0.0, 0.0, 0.0, &mut v) },
        ErStatus::Domain
    );
    assert!(!last_error().is_empty());
}

#[test]
fn symbols_and_wave_cone() {
    let w = [0.3, -0.4, 0.866];
    let mut r = 0usize;
    assert_eq!(unsafe { er_symbol_rank(w.as_ptr(), 0, 1e-10, &mut r) }, ErStatus::Ok);
    assert_eq!(r, 3);
    assert_eq!(unsafe { er_symbol_rank(w.as_ptr(), 1, 1e-10, &mut r) }, ErStatus::Ok);
    assert_eq!(r, 3);
    assert_eq!(unsafe { er_symbol_rank(w.as_ptr(), 7, 1e-10, &mut r) }, ErStatus::InvalidArgument);
    let mut gap = 1.0;
    assert_eq!(unsafe { er_projector_gap(w.as_ptr(), &mut gap) }, ErStatus::Ok);
    assert!(gap < 1e-8);
    let jump = [0.0, 1.0, 0.0, 0.5, 0.0, 0.5];
    let (mut d, mut om) = (1.0, [0.0; 3]);
    assert_eq!(unsafe { er_wavecone_distance(jump.as_ptr(), &mut d, om.as_mut_ptr()) }, ErStatus::Ok);
    assert!(d < 1e-8);
    assert!((om[2].abs() - 1.0).abs() < 1e-8);
}

#[test]
fn null_pointers_are_reported() {
    assert_eq!(unsafe { er_lift(1.0, 0.0, 0.0, ptr::null_mut()) }, ErStatus::NullPointer);
    assert!(last_error().contains("out_z"));
    let mut v = 0.0;
    assert_eq!(unsafe { er_subsolution_margin(ptr::null(), &mut v) }, ErStatus::NullPointer);
    unsafe { er_field_free(ptr::null_mut()) };
}

#[test]
fn geometry() {
    let z = [0.5, 0.0, 0.0, 0.0, 0.0, 2.0];
    let mut d = 1.0;
    assert_eq!(unsafe { er_constitutive_distance(z.as_ptr(), 0.5, 10.0, 2.0, &mut d) }, ErStatus::Ok);
    assert_eq!(d, 0.0);
    assert_eq!(
        unsafe { er_constitutive_distance(z.as_ptr(), 1.0, 1.5, 2.0, &mut d) },
        ErStatus::Infeasible
    );
    let sq = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    let moved = [1.0, 0.0, 2.0, 0.0, 1.0, 1.0, 2.0, 1.0];
    assert_eq!(
        unsafe { er_hausdorff_distance(sq.as_ptr(), 4, moved.as_ptr(), 4, 2, &mut d) },
        ErStatus::Ok
    );
    assert!((d - 1.0).abs() < 1e-12);
}

fn field_from(n: usize, comps: usize, f: impl Fn([f64; 3], usize) -> f64) -> *mut ErField {
    let mut v = Vec::new();
    for it in 0..n {
        for ix in 0..n {
            for iy in 0..n {
                let p = [it as f64 / n as f64, ix as f64 / n as f64, iy as f64 / n as f64];
                for c in 0..comps {
                    v.push(f(p, c));
                }
            }
        }
    }
    let mut h = ptr::null_mut();
    assert_eq!(
        unsafe { er_field_new(n, n, n, 1.0, comps, v.as_ptr(), v.len(), &mut h) },
        ErStatus::Ok
    );
    h
}

#[test]
fn field_round_trip_and_potential_solve() {
    let tau = std::f64::consts::TAU;
    let w = field_from(8, 9, |p, c| ((c + 1) as f64 * 0.1) * (tau * (p[0] + 2.0 * p[2])).sin());
    let mut z = ptr::null_mut();
    assert_eq!(unsafe { er_apply_potential_operator(w, &mut z) }, ErStatus::Ok);
    let mut az = ptr::null_mut();
    assert_eq!(unsafe { er_apply_euler_operator(z, &mut az) }, ErStatus::Ok);
    let mut dims = [0usize; 4];
    assert_eq!(unsafe { er_field_shape(az, dims.as_mut_ptr()) }, ErStatus::Ok);
    assert_eq!(dims, [8, 8, 8, 3]);
    let mut buf = vec![0.0; 8 * 8 * 8 * 3];
    assert_eq!(unsafe { er_field_copy_values(az, buf.as_mut_ptr(), buf.len()) }, ErStatus::Ok);
    assert!(buf.iter().all(|v| v.abs() < 1e-10));
    assert_eq!(unsafe { er_field_copy_values(az, buf.as_mut_ptr(), 3) }, ErStatus::InvalidArgument);

    let (mut sol, mut res) = (ptr::null_mut(), 1.0);
    assert_eq!(unsafe { er_solve_potential(z, 1e-8, &mut sol, &mut res) }, ErStatus::Ok);
    assert!(res < 1e-8);

    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("z.bin").to_str().unwrap()).unwrap();
    assert_eq!(unsafe { er_field_write(z, path.as_ptr()) }, ErStatus::Ok);
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { er_field_read(path.as_ptr(), &mut back) }, ErStatus::Ok);
    let mut a = vec![0.0; 8 * 8 * 8 * 6];
    let mut b = a.clone();
    unsafe {
        er_field_copy_values(z, a.as_mut_ptr(), a.len());
        er_field_copy_values(back, b.as_mut_ptr(), b.len());
    }
    assert_eq!(a, b);
    let missing = CString::new("/nonexistent/field.bin").unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { er_field_read(missing.as_ptr(), &mut none) }, ErStatus::Io);

    let c = field_from(8, 6, |_, i| if i == 0 { 1.0 } else { 0.0 });
    let mut s2 = ptr::null_mut();
    assert_eq!(unsafe { er_solve_potential(c, 1e-8, &mut s2, &mut res) }, ErStatus::MeanNotZero);
    for h in [w, z, az, sol, back, c] {
        unsafe { er_field_free(h) };
    }
}

#[test]
fn curl_inverse_through_handles() {
    let tau = std::f64::consts::TAU;
    let u = field_from(8, 3, |p, c| if c == 1 { (tau * p[2]).sin() } else { 0.0 });
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { er_curl_inverse(u, 1e-10, &mut w) }, ErStatus::Ok);
    unsafe {
        er_field_free(u);
        er_field_free(w);
    }
}

#[test]
fn header_is_generated_and_valid_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/euler_relax.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["er_field_new", "er_solve_potential", "er_constitutive_distance", "ER_STATUS_OK"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    if let Ok(o) = Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).output() {
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
}
