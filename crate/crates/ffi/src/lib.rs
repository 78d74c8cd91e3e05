//! C ABI for `euler-relax`.
//!
//! Every function returns an [`ErStatus`]; results go through out-pointers.
//! On failure a message is stored per thread and can be read with
//! [`er_last_error_message`]. Fields are passed as opaque [`ErField`] handles
//! that must be released with [`er_field_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use euler_relax::geometry::{constitutive_distance, hausdorff_distance, ConstitutiveSpec, Polytope};
use euler_relax::states::{self, FluidState, LiftedState, TracefreeSym2};
use euler_relax::symbol::{self, FrequencyVector};
use euler_relax::torus::{self, io, TorusField, TorusGrid};
use euler_relax::Error;

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    MeanNotZero = 4,
    NotWaveCone = 5,
    EmptySlice = 6,
    Infeasible = 7,
    Precondition = 8,
    Io = 9,
    Format = 10,
    Panic = 11,
}

/// Opaque sampled field on the space-time torus.
pub struct ErField {
    inner: TorusField,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ErStatus {
    match e {
        Error::Domain(_) => ErStatus::Domain,
        Error::Argument(_) | Error::Config(_) => ErStatus::InvalidArgument,
        Error::MeanNotZero { .. } => ErStatus::MeanNotZero,
        Error::NotWaveCone { .. } => ErStatus::NotWaveCone,
        Error::EmptySlice { .. } => ErStatus::EmptySlice,
        Error::Infeasible(_) => ErStatus::Infeasible,
        Error::Precondition(_)
        | Error::DerivativeBound { .. }
        | Error::NotCompactlySupported { .. } => ErStatus::Precondition,
        Error::Io(_) => ErStatus::Io,
        Error::Format(_) | Error::Json(_) => ErStatus::Format,
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> ErStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ErStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer passed for {what}"));
            ErStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            ErStatus::Panic
        }
    }
}

unsafe fn read<'a, T>(p: *const T, n: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn field<'a>(p: *const ErField, what: &'static str) -> Result<&'a TorusField, Fail> {
    p.as_ref().map(|f| &f.inner).ok_or(Fail::Null(what))
}

fn boxed(f: TorusField) -> *mut ErField {
    Box::into_raw(Box::new(ErField { inner: f }))
}

fn six(s: &[f64]) -> [f64; 6] {
    s.try_into().expect("length 6")
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn er_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// `e_kin(ρ, m, M)` for the tracefree `M = [[m11, m12], [m12, -m11]]`.
///
/// # Safety
/// `out_value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn er_kinetic_energy_density(
    rho: f64,
    m1: f64,
    m2: f64,
    m11: f64,
    m12: f64,
    out_value: *mut f64,
) -> ErStatus {
    guard(|| {
        *out(out_value, "out_value")? =
            states::kinetic_energy_density(rho, [m1, m2], TracefreeSym2::new(m11, m12))?;
        Ok(())
    })
}

/// Lifted state `(ρ, m1, m2, M11, M12, Q)` of a fluid state.
///
/// # Safety
/// `out_z` must point to 6 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn er_lift(rho: f64, m1: f64, m2: f64, out_z: *mut f64) -> ErStatus {
    guard(|| {
        if out_z.is_null() {
            return Err(Fail::Null("out_z"));
        }
        let z = states::lift(&FluidState::new(rho, [m1, m2])?)?.to_vector();
        std::slice::from_raw_parts_mut(out_z, 6).copy_from_slice(&z);
        Ok(())
    })
}

/// `Q - ρ² - e_kin` of a lifted state.
///
/// # Safety
/// `z` must point to 6 doubles and `out_value` be valid.
#[no_mangle]
pub unsafe extern "C" fn er_subsolution_margin(z: *const f64, out_value: *mut f64) -> ErStatus {
    guard(|| {
        let z = six(read(z, 6, "z")?);
        *out(out_value, "out_value")? = states::subsolution_margin(&LiftedState::from_vector(&z))?;
        Ok(())
    })
}

/// Relative wave-cone distance of `z` and a minimising unit direction.
///
/// # Safety
/// `z` must point to 6 doubles, `out_omega` to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn er_wavecone_distance(
    z: *const f64,
    out_distance: *mut f64,
    out_omega: *mut f64,
) -> ErStatus {
    guard(|| {
        let z = six(read(z, 6, "z")?);
        let r = symbol::wavecone_distance(&z)?;
        *out(out_distance, "out_distance")? = r.distance;
        if out_omega.is_null() {
            return Err(Fail::Null("out_omega"));
        }
        std::slice::from_raw_parts_mut(out_omega, 3).copy_from_slice(&r.minimizer.to_array());
        Ok(())
    })
}

/// Numerical rank of the Euler symbol (`which = 0`) or the potential symbol
/// (`which = 1`) at `omega`.
///
/// # Safety
/// `omega` must point to 3 doubles, `out_rank` be valid.
#[no_mangle]
pub unsafe extern "C" fn er_symbol_rank(
    omega: *const f64,
    which: u32,
    rel_tol: f64,
    out_rank: *mut usize,
) -> ErStatus {
    guard(|| {
        let w = read(omega, 3, "omega")?;
        let xi = FrequencyVector::new(w[0], w[1], w[2]);
        let m = match which {
            0 => symbol::euler_symbol(xi),
            1 => symbol::potential_symbol(xi),
            _ => return Err(Error::Argument(format!("unknown symbol selector {which}")).into()),
        };
        *out(out_rank, "out_rank")? = symbol::rank(&m, rel_tol);
        Ok(())
    })
}

/// Frobenius gap between the projectors onto the kernel of the Euler symbol
/// and the image of the potential symbol.
///
/// # Safety
/// `omega` must point to 3 doubles, `out_gap` be valid.
#[no_mangle]
pub unsafe extern "C" fn er_projector_gap(omega: *const f64, out_gap: *mut f64) -> ErStatus {
    guard(|| {
        let w = read(omega, 3, "omega")?;
        let e = symbol::exactness_check(FrequencyVector::new(w[0], w[1], w[2]), 1e-8)?;
        *out(out_gap, "out_gap")? = e.projector_gap;
        Ok(())
    })
}

/// Distance from `z` to the constitutive set with parameters `(eta, big_r, q_level)`.
///
/// # Safety
/// `z` must point to 6 doubles, `out_distance` be valid.
#[no_mangle]
pub unsafe extern "C" fn er_constitutive_distance(
    z: *const f64,
    eta: f64,
    big_r: f64,
    q_level: f64,
    out_distance: *mut f64,
) -> ErStatus {
    guard(|| {
        let z = six(read(z, 6, "z")?);
        let spec = ConstitutiveSpec::new(eta, big_r, q_level)?;
        *out(out_distance, "out_distance")? = constitutive_distance(&z, &spec)?;
        Ok(())
    })
}

unsafe fn polytope(v: *const f64, count: usize, dim: usize, what: &'static str) -> Result<Polytope, Fail> {
    let flat = read(v, count * dim, what)?;
    Ok(Polytope::new(flat.chunks(dim.max(1)).map(<[f64]>::to_vec).collect())?)
}

/// Hausdorff distance between the hulls of two vertex lists (row-major,
/// `dim` coordinates per vertex).
///
/// # Safety
/// `p` and `q` must point to `p_count * dim` and `q_count * dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn er_hausdorff_distance(
    p: *const f64,
    p_count: usize,
    q: *const f64,
    q_count: usize,
    dim: usize,
    out_distance: *mut f64,
) -> ErStatus {
    guard(|| {
        if dim == 0 || p_count == 0 || q_count == 0 {
            return Err(Error::Argument("empty vertex list".into()).into());
        }
        let a = polytope(p, p_count, dim, "p")?;
        let b = polytope(q, q_count, dim, "q")?;
        *out(out_distance, "out_distance")? = hausdorff_distance(&a, &b)?;
        Ok(())
    })
}

/// Creates a field from row-major `(t, x, y, component)` values.
///
/// # Safety
/// `values` must point to `len` doubles and `out_field` be valid.
#[no_mangle]
pub unsafe extern "C" fn er_field_new(
    n_t: usize,
    n_x: usize,
    n_y: usize,
    period_t: f64,
    components: usize,
    values: *const f64,
    len: usize,
    out_field: *mut *mut ErField,
) -> ErStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        let grid = TorusGrid::new(n_t, n_x, n_y, period_t)?;
        if len != grid.len() * components {
            return Err(Error::Argument(format!(
                "expected {} values, got {len}",
                grid.len() * components
            ))
            .into());
        }
        let v = read(values, len, "values")?.to_vec();
        *slot = boxed(TorusField::new(grid, components, v)?);
        Ok(())
    })
}

/// Releases a field; null is ignored.
///
/// # Safety
/// `f` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn er_field_free(f: *mut ErField) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Grid sizes `(n_t, n_x, n_y)` and component count.
///
/// # Safety
/// `f` must be a live handle and `out_dims` point to 4 writable values.
#[no_mangle]
pub unsafe extern "C" fn er_field_shape(f: *const ErField, out_dims: *mut usize) -> ErStatus {
    guard(|| {
        let f = field(f, "field")?;
        if out_dims.is_null() {
            return Err(Fail::Null("out_dims"));
        }
        let g = f.grid();
        std::slice::from_raw_parts_mut(out_dims, 4).copy_from_slice(&[g.n_t, g.n_x, g.n_y, f.components()]);
        Ok(())
    })
}

/// Copies the values of `f` into `buf`, which must hold exactly as many
/// doubles as the field.
///
/// # Safety
/// `f` must be a live handle and `buf` point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn er_field_copy_values(f: *const ErField, buf: *mut f64, len: usize) -> ErStatus {
    guard(|| {
        let f = field(f, "field")?;
        if buf.is_null() {
            return Err(Fail::Null("buf"));
        }
        if len != f.values().len() {
            return Err(Error::Argument(format!("buffer holds {len}, field has {}", f.values().len())).into());
        }
        std::slice::from_raw_parts_mut(buf, len).copy_from_slice(f.values());
        Ok(())
    })
}

unsafe fn path<'a>(p: *const c_char) -> Result<&'a Path, Fail> {
    if p.is_null() {
        return Err(Fail::Null("path"));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Error::Argument("path is not UTF-8".into()))?;
    Ok(Path::new(s))
}

/// Reads a binary field (and its `.json` sidecar when present).
///
/// # Safety
/// `p` must be a nul-terminated string and `out_field` valid.
#[no_mangle]
pub unsafe extern "C" fn er_field_read(p: *const c_char, out_field: *mut *mut ErField) -> ErStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        *slot = boxed(io::read_field(path(p)?)?);
        Ok(())
    })
}

/// Writes a binary field and its `.json` sidecar.
///
/// # Safety
/// `f` must be a live handle and `p` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn er_field_write(f: *const ErField, p: *const c_char) -> ErStatus {
    guard(|| {
        io::write_field(path(p)?, field(f, "field")?)?;
        Ok(())
    })
}

unsafe fn unary(
    f: *const ErField,
    out_field: *mut *mut ErField,
    op: impl FnOnce(&TorusField) -> euler_relax::Result<TorusField>,
) -> ErStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        *slot = boxed(op(field(f, "field")?)?);
        Ok(())
    })
}

/// Euler operator applied to a 6-component field.
///
/// # Safety
/// `z` must be a live handle and `out_field` valid.
#[no_mangle]
pub unsafe extern "C" fn er_apply_euler_operator(z: *const ErField, out_field: *mut *mut ErField) -> ErStatus {
    unary(z, out_field, torus::apply_euler_operator)
}

/// Potential operator applied to a 9-component field.
///
/// # Safety
/// `w` must be a live handle and `out_field` valid.
#[no_mangle]
pub unsafe extern "C" fn er_apply_potential_operator(
    w: *const ErField,
    out_field: *mut *mut ErField,
) -> ErStatus {
    unary(w, out_field, torus::apply_potential_operator)
}

/// Vector potential of a mean-zero divergence-free 3-component field.
///
/// # Safety
/// `u` must be a live handle and `out_field` valid.
#[no_mangle]
pub unsafe extern "C" fn er_curl_inverse(
    u: *const ErField,
    rel_tol: f64,
    out_field: *mut *mut ErField,
) -> ErStatus {
    unary(u, out_field, |u| torus::curl_inverse(u, rel_tol))
}

/// Potential `w` with `B_E w = z`; reports the relative residual and fails
/// with `Precondition` when it exceeds `rel_tol`.
///
/// # Safety
/// `z` must be a live handle; `out_field` and `out_residual` valid.
#[no_mangle]
pub unsafe extern "C" fn er_solve_potential(
    z: *const ErField,
    rel_tol: f64,
    out_field: *mut *mut ErField,
    out_residual: *mut f64,
) -> ErStatus {
    guard(|| {
        let slot = out(out_field, "out_field")?;
        let res = out(out_residual, "out_residual")?;
        let sol = torus::solve_potential(field(z, "field")?, rel_tol)?;
        *res = sol.residual;
        if !sol.exact {
            return Err(Error::Precondition(format!(
                "potential solve not exact: residual {:.3e}",
                sol.residual
            ))
            .into());
        }
        *slot = boxed(sol.w);
        Ok(())
    })
}
