//! C interface to `warpbench`.
//!
//! Objects cross the boundary as opaque handles created by `wb_*_new` style
//! functions and released with the matching `wb_*_free`. Every fallible call
//! returns a [`WbStatus`]; on failure [`wb_last_error`] describes the cause.
//! Outputs are written through caller-provided pointers only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use warpbench::dtw::{AlignSpec, Alignment, BandConstraint, Variant};
use warpbench::metrics::{self, GroundTruthMode};
use warpbench::synthesis::{
    compose_variation, generate_signal, GeneratorSpec, SignalPair, VariationClass, VariationParams,
};
use warpbench::{Error, Series};

/// Status of a call. Values match the command-line exit codes where they overlap.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WbStatus {
    Ok = 0,
    IoError = 1,
    ParameterError = 2,
    ContractViolation = 3,
    NullPointer = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WbVariant {
    Dtw = 0,
    Ddtw = 1,
    Wdtw = 2,
    Wddtw = 3,
}

impl From<WbVariant> for Variant {
    fn from(v: WbVariant) -> Self {
        match v {
            WbVariant::Dtw => Variant::Dtw,
            WbVariant::Ddtw => Variant::Ddtw,
            WbVariant::Wdtw => Variant::Wdtw,
            WbVariant::Wddtw => Variant::Wddtw,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WbVariationClass {
    Scaled = 0,
    ScaledSameSize = 1,
    Rgp = 2,
    Mrgp = 3,
    ScaledRgp = 4,
    ScaledMrgp = 5,
}

impl From<WbVariationClass> for VariationClass {
    fn from(c: WbVariationClass) -> Self {
        match c {
            WbVariationClass::Scaled => VariationClass::Scaled,
            WbVariationClass::ScaledSameSize => VariationClass::ScaledSameSize,
            WbVariationClass::Rgp => VariationClass::Rgp,
            WbVariationClass::Mrgp => VariationClass::Mrgp,
            WbVariationClass::ScaledRgp => VariationClass::ScaledRgp,
            WbVariationClass::ScaledMrgp => VariationClass::ScaledMrgp,
        }
    }
}

/// Opaque series handle.
pub struct WbSeries(Series);

/// Opaque reference/target pair with its ground truth.
pub struct WbPair(SignalPair);

/// Opaque alignment handle.
pub struct WbAlignment(Alignment);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior NULs replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> WbStatus {
    match e {
        Error::Contract(_) => WbStatus::ContractViolation,
        Error::Io(_) => WbStatus::IoError,
        _ => WbStatus::ParameterError,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> WbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WbStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer passed as `{what}`"));
            WbStatus::NullPointer
        }
        Err(_) => {
            set_error("internal panic".into());
            WbStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message of the last failed call on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn wb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Copies `len` values into a new series.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_series_new(values: *const f64, len: usize, out: *mut *mut WbSeries) -> WbStatus {
    guard(|| {
        let data = if len == 0 { &[][..] } else { std::slice::from_raw_parts(get(values, "values")?, len) };
        let series = Series::new(data.to_vec())?;
        put(out, boxed(WbSeries(series)), "out")
    })
}

/// Generates a reference signal with default noise and curve exponents.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_generate(
    length: usize,
    min: f64,
    max: f64,
    p1: usize,
    p2: usize,
    seed: u64,
    out: *mut *mut WbSeries,
) -> WbStatus {
    guard(|| {
        let spec = GeneratorSpec { length, min, max, p1, p2, seed, ..Default::default() };
        put(out, boxed(WbSeries(generate_signal(&spec)?)), "out")
    })
}

/// Number of samples; 0 for NULL.
///
/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wb_series_len(series: *const WbSeries) -> usize {
    series.as_ref().map_or(0, |s| s.0.len())
}

/// Borrowed pointer to the samples, valid while the handle lives; NULL for NULL.
///
/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wb_series_data(series: *const WbSeries) -> *const f64 {
    series.as_ref().map_or(ptr::null(), |s| s.0.values().as_ptr())
}

/// # Safety
/// `series` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wb_series_free(series: *mut WbSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// Deforms `reference` with a random plan of the given class (default ranges).
///
/// # Safety
/// `reference` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_deform(
    reference: *const WbSeries,
    class: WbVariationClass,
    seed: u64,
    out: *mut *mut WbPair,
) -> WbStatus {
    guard(|| {
        let x = &get(reference, "reference")?.0;
        let pair = compose_variation(x, class.into(), &VariationParams::default(), seed)?;
        put(out, boxed(WbPair(pair)), "out")
    })
}

/// New handle holding a copy of the pair's target.
///
/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_pair_target(pair: *const WbPair, out: *mut *mut WbSeries) -> WbStatus {
    guard(|| {
        let p = get(pair, "pair")?;
        put(out, boxed(WbSeries(p.0.target.clone())), "out")
    })
}

/// New handle holding a copy of the pair's reference.
///
/// # Safety
/// `pair` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_pair_reference(pair: *const WbPair, out: *mut *mut WbSeries) -> WbStatus {
    guard(|| {
        let p = get(pair, "pair")?;
        put(out, boxed(WbSeries(p.0.reference.clone())), "out")
    })
}

/// Ground-truth source position of every target sample. Writes up to `cap`
/// values and stores the full length in `len`.
///
/// # Safety
/// `pair` must be a live handle; `positions` must hold `cap` doubles (may be
/// NULL when `cap` is 0); `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_pair_ground_truth(
    pair: *const WbPair,
    positions: *mut f64,
    cap: usize,
    len: *mut usize,
) -> WbStatus {
    guard(|| {
        let truth = &get(pair, "pair")?.0.ground_truth.src_pos;
        let n = truth.len().min(cap);
        if n > 0 {
            if positions.is_null() {
                return Err(Failure::Null("positions"));
            }
            ptr::copy_nonoverlapping(truth.as_ptr(), positions, n);
        }
        put(len, truth.len(), "len")
    })
}

/// # Safety
/// `pair` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wb_pair_free(pair: *mut WbPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

fn spec(variant: WbVariant, g: f64, band: i64) -> AlignSpec {
    let variant: Variant = variant.into();
    let spec = if variant.is_weighted() { AlignSpec::weighted(variant, g) } else { AlignSpec::new(variant) };
    spec.with_band((band >= 0).then(|| BandConstraint::new(band as usize)))
}

/// Aligns `x` to `y`. `g` is read only by the weighted variants; a negative
/// `band` means unconstrained.
///
/// # Safety
/// `x` and `y` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_align(
    x: *const WbSeries,
    y: *const WbSeries,
    variant: WbVariant,
    g: f64,
    band: i64,
    out: *mut *mut WbAlignment,
) -> WbStatus {
    guard(|| {
        let (x, y) = (&get(x, "x")?.0, &get(y, "y")?.0);
        let al = spec(variant, g, band).align(x, y)?;
        put(out, boxed(WbAlignment(al)), "out")
    })
}

/// Alignment cost without building the path.
///
/// # Safety
/// `x` and `y` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_distance(
    x: *const WbSeries,
    y: *const WbSeries,
    variant: WbVariant,
    g: f64,
    band: i64,
    out: *mut f64,
) -> WbStatus {
    guard(|| {
        let (x, y) = (&get(x, "x")?.0, &get(y, "y")?.0);
        put(out, spec(variant, g, band).distance(x, y)?, "out")
    })
}

/// Accumulated cost; NaN for NULL.
///
/// # Safety
/// `al` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wb_alignment_cost(al: *const WbAlignment) -> f64 {
    al.as_ref().map_or(f64::NAN, |a| a.0.cost)
}

/// Number of cells on the path; 0 for NULL.
///
/// # Safety
/// `al` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wb_alignment_path_len(al: *const WbAlignment) -> usize {
    al.as_ref().map_or(0, |a| a.0.path.len())
}

/// Copies up to `cap` path cells into `rows`/`cols`.
///
/// # Safety
/// `al` must be a live handle; `rows` and `cols` must each hold `cap` entries.
#[no_mangle]
pub unsafe extern "C" fn wb_alignment_path(
    al: *const WbAlignment,
    rows: *mut usize,
    cols: *mut usize,
    cap: usize,
) -> WbStatus {
    guard(|| {
        let path = &get(al, "alignment")?.0.path;
        let n = path.len().min(cap);
        if n > 0 && (rows.is_null() || cols.is_null()) {
            return Err(Failure::Null("rows/cols"));
        }
        for (k, &(i, j)) in path.iter().take(n).enumerate() {
            rows.add(k).write(i);
            cols.add(k).write(j);
        }
        Ok(())
    })
}

/// # Safety
/// `al` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wb_alignment_free(al: *mut WbAlignment) {
    if !al.is_null() {
        drop(Box::from_raw(al));
    }
}

/// Sum of `|x_i - y_j|` along the path.
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_adm(
    al: *const WbAlignment,
    x: *const WbSeries,
    y: *const WbSeries,
    out: *mut f64,
) -> WbStatus {
    guard(|| {
        let v = metrics::adm(&get(al, "alignment")?.0, &get(x, "x")?.0, &get(y, "y")?.0)?;
        put(out, v, "out")
    })
}

/// Sum of time differences to the pair's ground truth (fractional positions).
///
/// # Safety
/// All handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wb_adt(al: *const WbAlignment, pair: *const WbPair, out: *mut f64) -> WbStatus {
    guard(|| {
        let truth = &get(pair, "pair")?.0.ground_truth;
        let v = metrics::adt(&get(al, "alignment")?.0, truth, GroundTruthMode::Fractional)?;
        put(out, v, "out")
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
