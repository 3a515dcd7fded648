//! C ABI over `paraprod`.
//!
//! Objects are opaque handles created by `pp_*` constructors and released with the
//! matching `pp_*_free`. Every fallible call returns a [`PpStatus`]; on failure the
//! message is available from [`pp_last_error_message`] on the same thread.
//! Out-pointers are written only on success.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use paraprod::conditions::{full_report, ConditionsReport, Ratio};
use paraprod::halfplane::{t_gram_closed, t_gram_direct};
use paraprod::paraproducts::{composition_gram_closed, composition_gram_direct};
use paraprod::{operator_norm, Error, NormMethod, OperatorMatrix, Symbol, SymbolSpec, Tree};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    IoError = 4,
    DepthMismatch = 5,
    NumericalError = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PpGramKind {
    /// `⟨Π_b Π_d h_J, h_I⟩` from the closed form.
    CompositionClosed = 0,
    /// Same matrix, applying both paraproducts on the grid.
    CompositionDirect = 1,
    /// Half-plane transplant, closed form.
    TransplantClosed = 2,
    /// Half-plane transplant, composed operator factors.
    TransplantDirect = 3,
}

/// Opaque symbol handle.
pub struct PpSymbol(Symbol);

/// Opaque conditions report handle.
pub struct PpReport(ConditionsReport);

/// Opaque dense matrix handle, rows and columns in canonical node order.
pub struct PpMatrix(OperatorMatrix);

/// Numeric fields of a report. `ratio` is `+inf` when `A + B + C = 0 < op_norm`
/// and NaN when both vanish.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PpConditions {
    pub depth: u32,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub bmo_b: f64,
    pub bmo_d: f64,
    pub op_norm: f64,
    pub ratio: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(PpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Malformed(_)
            | Error::NodeOutsideTree { .. }
            | Error::DuplicateNode(_)
            | Error::Json(_) => PpStatus::ParseError,
            Error::Io(_) => PpStatus::IoError,
            Error::DepthMismatch { .. } | Error::ResolutionMismatch { .. } => {
                PpStatus::DepthMismatch
            }
            Error::NoConvergence { .. } | Error::DegenerateNu(_) | Error::ZeroNu(_) => {
                PpStatus::NumericalError
            }
            _ => PpStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: &str) -> Failure {
    Failure(PpStatus::InvalidArgument, msg.to_string())
}

fn run(f: impl FnOnce() -> Result<(), Failure>) -> PpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PpStatus::Panic
        }
    }
}

unsafe fn arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(PpStatus::NullPointer, format!("{name} is null")))
}

unsafe fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(PpStatus::NullPointer, format!("{name} is null")))
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(PpStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(PpStatus::ParseError, format!("{name} is not UTF-8")))
}

fn check_depth(depth: u32) -> Result<(), Failure> {
    if depth > Tree::MAX_DEPTH {
        return Err(invalid(&format!("depth {depth} exceeds {}", Tree::MAX_DEPTH)));
    }
    Ok(())
}

/// Message of the last failed call on this thread; empty if none. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a symbol from a descriptor string (`zero`, `const:<c>`, `log`,
/// `random[:seed=<n>][,gamma=<g>][,dist=<name>]`, `file:<path>`).
///
/// # Safety
/// `descriptor` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_symbol_generate(
    descriptor: *const c_char,
    depth: u32,
    out_symbol: *mut *mut PpSymbol,
) -> PpStatus {
    run(|| {
        let descriptor = text(descriptor, "descriptor")?;
        let slot = out(out_symbol, "out_symbol")?;
        check_depth(depth)?;
        let s = SymbolSpec::parse(descriptor, 0)?.resolve(depth)?;
        *slot = Box::into_raw(Box::new(PpSymbol(s)));
        Ok(())
    })
}

/// Builds a symbol from `len` values in canonical node order; `len` must be
/// `2^(depth+1) - 1`. `im` may be null for a real symbol.
///
/// # Safety
/// `re` (and `im` when non-null) must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn pp_symbol_from_values(
    depth: u32,
    re: *const f64,
    im: *const f64,
    len: usize,
    out_symbol: *mut *mut PpSymbol,
) -> PpStatus {
    run(|| {
        let slot = out(out_symbol, "out_symbol")?;
        check_depth(depth)?;
        arg(re, "re")?;
        let re = std::slice::from_raw_parts(re, len);
        let im = if im.is_null() {
            None
        } else {
            Some(std::slice::from_raw_parts(im, len))
        };
        let values = (0..len)
            .map(|i| Complex64::new(re[i], im.map_or(0.0, |v| v[i])))
            .collect();
        let s = Symbol::from_values(depth, values)?;
        *slot = Box::into_raw(Box::new(PpSymbol(s)));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out_symbol` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_symbol_load(
    path: *const c_char,
    out_symbol: *mut *mut PpSymbol,
) -> PpStatus {
    run(|| {
        let path = text(path, "path")?;
        let slot = out(out_symbol, "out_symbol")?;
        let s = Symbol::load(path)?;
        *slot = Box::into_raw(Box::new(PpSymbol(s)));
        Ok(())
    })
}

/// # Safety
/// `symbol` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn pp_symbol_save(symbol: *const PpSymbol, path: *const c_char) -> PpStatus {
    run(|| {
        let s = arg(symbol, "symbol")?;
        let path = text(path, "path")?;
        s.0.save(path)?;
        Ok(())
    })
}

/// Depth of a symbol, or 0 for null.
///
/// # Safety
/// `symbol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_symbol_depth(symbol: *const PpSymbol) -> u32 {
    symbol.as_ref().map_or(0, |s| s.0.depth())
}

/// Number of nodes, or 0 for null.
///
/// # Safety
/// `symbol` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_symbol_len(symbol: *const PpSymbol) -> usize {
    symbol.as_ref().map_or(0, |s| s.0.values().len())
}

/// Value at canonical index `index`.
///
/// # Safety
/// `symbol` must be a live handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_symbol_get(
    symbol: *const PpSymbol,
    index: usize,
    re: *mut f64,
    im: *mut f64,
) -> PpStatus {
    run(|| {
        let s = arg(symbol, "symbol")?;
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        let v = s
            .0
            .values()
            .get(index)
            .ok_or_else(|| invalid(&format!("index {index} out of range")))?;
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Writes the 16-hex-digit content hash plus NUL into `buf` (at least 17 bytes).
///
/// # Safety
/// `symbol` must be a live handle; `buf` must hold `buf_len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pp_symbol_hash(
    symbol: *const PpSymbol,
    buf: *mut c_char,
    buf_len: usize,
) -> PpStatus {
    run(|| {
        let s = arg(symbol, "symbol")?;
        out(buf, "buf")?;
        let h = s.0.content_hash();
        if buf_len < h.len() + 1 {
            return Err(invalid("buffer too small"));
        }
        ptr::copy_nonoverlapping(h.as_ptr().cast(), buf, h.len());
        *buf.add(h.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `symbol` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pp_symbol_free(symbol: *mut PpSymbol) {
    if !symbol.is_null() {
        drop(Box::from_raw(symbol));
    }
}

/// Computes A, B, C, the BMO norms and the operator norm of `Π_b Π_d`.
///
/// # Safety
/// `b`, `d` must be live handles; `out_report` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_conditions(
    b: *const PpSymbol,
    d: *const PpSymbol,
    out_report: *mut *mut PpReport,
) -> PpStatus {
    run(|| {
        let (b, d) = (arg(b, "b")?, arg(d, "d")?);
        let slot = out(out_report, "out_report")?;
        let r = full_report(&b.0, &d.0)?;
        *slot = Box::into_raw(Box::new(PpReport(r)));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle; `out_values` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_report_values(
    report: *const PpReport,
    out_values: *mut PpConditions,
) -> PpStatus {
    run(|| {
        let r = &arg(report, "report")?.0;
        let slot = out(out_values, "out_values")?;
        *slot = PpConditions {
            depth: r.depth,
            a: r.a,
            b: r.b,
            c: r.c,
            bmo_b: r.bmo_b,
            bmo_d: r.bmo_d,
            op_norm: r.op_norm,
            ratio: match r.ratio {
                Ratio::Finite(v) => v,
                Ratio::Infinite => f64::INFINITY,
                Ratio::Undefined => f64::NAN,
            },
        };
        Ok(())
    })
}

/// Report as pretty JSON; release with [`pp_string_free`].
///
/// # Safety
/// `report` must be a live handle; `out_json` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_report_json(
    report: *const PpReport,
    out_json: *mut *mut c_char,
) -> PpStatus {
    run(|| {
        let r = &arg(report, "report")?.0;
        let slot = out(out_json, "out_json")?;
        let s = serde_json::to_string_pretty(r).map_err(Error::from)?;
        *slot = CString::new(s).map_err(|_| invalid("NUL in JSON"))?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pp_report_free(report: *mut PpReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `b`, `d` must be live handles; `out_matrix` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_gram(
    b: *const PpSymbol,
    d: *const PpSymbol,
    kind: PpGramKind,
    out_matrix: *mut *mut PpMatrix,
) -> PpStatus {
    run(|| {
        let (b, d) = (&arg(b, "b")?.0, &arg(d, "d")?.0);
        let slot = out(out_matrix, "out_matrix")?;
        let m = match kind {
            PpGramKind::CompositionClosed => composition_gram_closed(b, d)?,
            PpGramKind::CompositionDirect => composition_gram_direct(b, d)?,
            PpGramKind::TransplantClosed => t_gram_closed(b, d)?,
            PpGramKind::TransplantDirect => t_gram_direct(b, d)?,
        };
        *slot = Box::into_raw(Box::new(PpMatrix(m)));
        Ok(())
    })
}

/// Side length, or 0 for null.
///
/// # Safety
/// `matrix` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pp_matrix_dim(matrix: *const PpMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.0.dim())
}

/// # Safety
/// `matrix` must be a live handle; `re` and `im` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_matrix_get(
    matrix: *const PpMatrix,
    row: usize,
    col: usize,
    re: *mut f64,
    im: *mut f64,
) -> PpStatus {
    run(|| {
        let m = &arg(matrix, "matrix")?.0;
        let (re, im) = (out(re, "re")?, out(im, "im")?);
        if row >= m.dim() || col >= m.dim() {
            return Err(invalid(&format!("({row}, {col}) out of range")));
        }
        let v = m.get(row, col);
        *re = v.re;
        *im = v.im;
        Ok(())
    })
}

/// Spectral norm: dense SVD up to dimension 2000, power iteration above.
///
/// # Safety
/// `matrix` must be a live handle; `out_norm` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_matrix_norm(matrix: *const PpMatrix, out_norm: *mut f64) -> PpStatus {
    run(|| {
        let m = &arg(matrix, "matrix")?.0;
        let slot = out(out_norm, "out_norm")?;
        *slot = operator_norm(m, NormMethod::auto(m.dim()))?;
        Ok(())
    })
}

/// # Safety
/// `matrix` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pp_matrix_free(matrix: *mut PpMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}
