//! C bindings for the hyplab laboratory: opaque Heegner-set handles, the
//! lattice counter, kernel transforms, special functions, and spectral sums.
//!
//! Conventions: every fallible call returns a [`HyplabStatus`]; results are
//! written through out-pointers and only when the call returns
//! `HYPLAB_STATUS_OK`; complex values travel as separate re/im doubles;
//! handles from `hyplab_heegner_new` must be released with
//! `hyplab_heegner_free`. No call unwinds across the boundary.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use hyplab::automorphic::{eisenstein, weyl_sum_eisenstein, EisensteinParams};
use hyplab::counting::{count, PointSpec};
use hyplab::halfplane::Point;
use hyplab::kernels::{sht_ball, sht_smoothed};
use hyplab::qforms::{class_number, heegner_points, HeegnerSet};
use hyplab::specfun::{cgamma, dirichlet_l, kbessel, zeta};
use hyplab::spectral::{spectral_exp_sum, EigenvalueList};
use hyplab::Error;

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HyplabStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Arguments outside the documented domain.
    InvalidInput = 2,
    /// Malformed or insufficient data.
    DataError = 3,
    /// A numerical method failed to converge.
    NumericError = 4,
    /// An internal invariant failed; the library state is still sound.
    Panic = 5,
}

fn status_of(e: &Error) -> HyplabStatus {
    match e {
        Error::InvalidInput(_) => HyplabStatus::InvalidInput,
        Error::Data(_) => HyplabStatus::DataError,
        Error::Numeric(_) => HyplabStatus::NumericError,
    }
}

fn guard(f: impl FnOnce() -> HyplabStatus) -> HyplabStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(HyplabStatus::Panic)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hyplab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn hyplab_status_message(status: HyplabStatus) -> *const c_char {
    let msg: &'static str = match status {
        HyplabStatus::Ok => "ok\0",
        HyplabStatus::NullPointer => "null pointer argument\0",
        HyplabStatus::InvalidInput => "invalid input\0",
        HyplabStatus::DataError => "data error\0",
        HyplabStatus::NumericError => "numeric failure\0",
        HyplabStatus::Panic => "internal error\0",
    };
    msg.as_ptr() as *const c_char
}

/// Opaque set of Heegner points and reduced forms of one discriminant.
pub struct HyplabHeegnerSet {
    inner: HeegnerSet,
}

/// Builds the Heegner set of a fundamental discriminant d < 0. On success
/// writes an owned handle to `out`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hyplab_heegner_new(
    d: i64,
    out: *mut *mut HyplabHeegnerSet,
) -> HyplabStatus {
    if out.is_null() {
        return HyplabStatus::NullPointer;
    }
    guard(|| match heegner_points(d) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(HyplabHeegnerSet { inner }));
            HyplabStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Releases a handle from `hyplab_heegner_new`. Null is a no-op.
///
/// # Safety
/// `set` must be a handle from `hyplab_heegner_new`, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hyplab_heegner_free(set: *mut HyplabHeegnerSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Class number h(D) of the handle's discriminant.
///
/// # Safety
/// `set` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hyplab_heegner_class_number(
    set: *const HyplabHeegnerSet,
    out: *mut u64,
) -> HyplabStatus {
    if set.is_null() || out.is_null() {
        return HyplabStatus::NullPointer;
    }
    *out = (&*set).inner.h;
    HyplabStatus::Ok
}

/// The index-th Heegner point (order matches the reduced-form enumeration).
///
/// # Safety
/// `set` must be a live handle; `out_x` and `out_y` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hyplab_heegner_point(
    set: *const HyplabHeegnerSet,
    index: usize,
    out_x: *mut f64,
    out_y: *mut f64,
) -> HyplabStatus {
    if set.is_null() || out_x.is_null() || out_y.is_null() {
        return HyplabStatus::NullPointer;
    }
    match (&*set).inner.points.get(index) {
        Some(z) => {
            *out_x = z.x;
            *out_y = z.y;
            HyplabStatus::Ok
        }
        None => HyplabStatus::InvalidInput,
    }
}

/// The index-th reduced form (a, b, c).
///
/// # Safety
/// `set` must be a live handle; `out_a`, `out_b`, `out_c` must be valid
/// pointers.
#[no_mangle]
pub unsafe extern "C" fn hyplab_heegner_form(
    set: *const HyplabHeegnerSet,
    index: usize,
    out_a: *mut i64,
    out_b: *mut i64,
    out_c: *mut i64,
) -> HyplabStatus {
    if set.is_null() || out_a.is_null() || out_b.is_null() || out_c.is_null() {
        return HyplabStatus::NullPointer;
    }
    match (&*set).inner.forms.get(index) {
        Some(f) => {
            *out_a = f.a;
            *out_b = f.b;
            *out_c = f.c;
            HyplabStatus::Ok
        }
        None => HyplabStatus::InvalidInput,
    }
}

/// Class number without building a handle.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hyplab_class_number(d: i64, out: *mut u64) -> HyplabStatus {
    if out.is_null() {
        return HyplabStatus::NullPointer;
    }
    guard(|| match class_number(d) {
        Ok(h) => {
            *out = h;
            HyplabStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Lattice count N(z, w, X) with z = zx + i zy, w = wx + i wy, and the
/// signed deviation from the main term 3X.
///
/// # Safety
/// `out_count` and `out_error` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hyplab_count(
    zx: f64,
    zy: f64,
    wx: f64,
    wy: f64,
    x: f64,
    out_count: *mut u64,
    out_error: *mut f64,
) -> HyplabStatus {
    if out_count.is_null() || out_error.is_null() {
        return HyplabStatus::NullPointer;
    }
    guard(|| {
        let run = || -> hyplab::Result<(u64, f64)> {
            let z = PointSpec::from(Point::new(zx, zy)?);
            let w = PointSpec::from(Point::new(wx, wy)?);
            let r = count(z, w, x)?;
            Ok((r.count, r.error))
        };
        match run() {
            Ok((c, e)) => {
                *out_count = c;
                *out_error = e;
                HyplabStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Ball-kernel transform h_R(t) at real t.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hyplab_sht_ball(r: f64, t: f64, out: *mut f64) -> HyplabStatus {
    if out.is_null() {
        return HyplabStatus::NullPointer;
    }
    guard(|| match sht_ball(r, Complex64::new(t, 0.0)) {
        Ok(v) => {
            *out = v;
            HyplabStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Smoothed-kernel transform at level X and width delta; `plus` nonzero
/// selects the majorant.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hyplab_sht_smoothed(
    x: f64,
    delta: f64,
    plus: i32,
    t: f64,
    out: *mut f64,
) -> HyplabStatus {
    if out.is_null() {
        return HyplabStatus::NullPointer;
    }
    guard(|| match sht_smoothed(x, delta, plus != 0, Complex64::new(t, 0.0)) {
        Ok(v) => {
            *out = v;
            HyplabStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

unsafe fn write_complex(
    v: hyplab::Result<Complex64>,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HyplabStatus {
    match v {
        Ok(v) => {
            *out_re = v.re;
            *out_im = v.im;
            HyplabStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Riemann zeta at s = re + i im.
///
/// # Safety
/// `out_re` and `out_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hyplab_zeta(
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HyplabStatus {
    if out_re.is_null() || out_im.is_null() {
        return HyplabStatus::NullPointer;
    }
    guard(|| write_complex(zeta(Complex64::new(re, im)), out_re, out_im))
}

/// Gamma function at s = re + i im.
///
/// # Safety
/// `out_re` and `out_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hyplab_cgamma(
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HyplabStatus {
    if out_re.is_null() || out_im.is_null() {
        return HyplabStatus::NullPointer;
    }
    guard(|| write_complex(cgamma(Complex64::new(re, im)), out_re, out_im))
}

/// Dirichlet L-function L(s, chi_d) for the quadratic character of a
/// fundamental discriminant d.
///
/// # Safety
/// `out_re` and `out_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hyplab_dirichlet_l(
    re: f64,
    im: f64,
    d: i64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HyplabStatus {
    if out_re.is_null() || out_im.is_null() {
        return HyplabStatus::NullPointer;
    }
    guard(|| write_complex(dirichlet_l(Complex64::new(re, im), d), out_re, out_im))
}

/// K-Bessel function K_nu(y) for complex order nu = nu_re + i nu_im, y > 0.
///
/// # Safety
/// `out_re` and `out_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hyplab_kbessel(
    nu_re: f64,
    nu_im: f64,
    y: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HyplabStatus {
    if out_re.is_null() || out_im.is_null() {
        return HyplabStatus::NullPointer;
    }
    guard(|| write_complex(kbessel(Complex64::new(nu_re, nu_im), y), out_re, out_im))
}

/// Eisenstein series E(z, 1/2 + it) at z = zx + i zy with automatic
/// truncation.
///
/// # Safety
/// `out_re` and `out_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hyplab_eisenstein(
    zx: f64,
    zy: f64,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HyplabStatus {
    if out_re.is_null() || out_im.is_null() {
        return HyplabStatus::NullPointer;
    }
    guard(|| {
        let run = || -> hyplab::Result<Complex64> {
            let z = Point::new(zx, zy)?;
            eisenstein(z, &EisensteinParams::auto(t, z.y)?)
        };
        write_complex(run(), out_re, out_im)
    })
}

/// Both sides of the Weyl-sum identity at (d, t): the direct sum of
/// E(z, 1/2+it) over the Heegner points, the L-function side, and their
/// distance.
///
/// # Safety
/// All five out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn hyplab_weyl_sum_eisenstein(
    d: i64,
    t: f64,
    out_direct_re: *mut f64,
    out_direct_im: *mut f64,
    out_formula_re: *mut f64,
    out_formula_im: *mut f64,
    out_residual: *mut f64,
) -> HyplabStatus {
    if out_direct_re.is_null()
        || out_direct_im.is_null()
        || out_formula_re.is_null()
        || out_formula_im.is_null()
        || out_residual.is_null()
    {
        return HyplabStatus::NullPointer;
    }
    guard(|| match weyl_sum_eisenstein(d, t) {
        Ok(r) => {
            *out_direct_re = r.direct.re;
            *out_direct_im = r.direct.im;
            *out_formula_re = r.formula.re;
            *out_formula_im = r.formula.im;
            *out_residual = r.residual;
            HyplabStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Spectral exponential sum over the eigenvalues in `values[0..len]` that
/// are at most t_max: sum of X^{i t_j}. Entries must be positive reals.
///
/// # Safety
/// `values` must point to `len` readable doubles (null is allowed only with
/// `len == 0`); `out_re` and `out_im` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hyplab_spectral_exp_sum(
    values: *const f64,
    len: usize,
    t_max: f64,
    x: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> HyplabStatus {
    if out_re.is_null() || out_im.is_null() || (values.is_null() && len > 0) {
        return HyplabStatus::NullPointer;
    }
    let slice = if len == 0 {
        &[][..]
    } else {
        std::slice::from_raw_parts(values, len)
    };
    guard(|| {
        let run = || -> hyplab::Result<Complex64> {
            let list = EigenvalueList::new(slice.to_vec(), "ffi")?;
            spectral_exp_sum(&list, t_max, x)
        };
        write_complex(run(), out_re, out_im)
    })
}
