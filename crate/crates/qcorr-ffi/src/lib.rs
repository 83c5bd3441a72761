//! C ABI over the qcorr library.
//!
//! States are opaque handles created from Bloch data, a raw density matrix,
//! a JSON string, or one of the built-in families, and must be released with
//! [`qcorr_state_free`]. Every function returns a [`QcorrStatus`]; outputs
//! go through pointers. Entropies are selected by the same string grammar
//! the CLI uses: `"vn"`, `"lin"`, `"cub"`, `"q=<positive real>"`.
//!
//! The generated header lives at `include/qcorr.h`.

use qcorr::entropy::EntropySpec;
use qcorr::measure::{MeasurementReport, OptimizerOptions};
use qcorr::state::BlochState;
use std::os::raw::c_char;

/// Result of every C-facing call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcorrStatus {
    Ok = 0,
    NullArgument = 1,
    /// Argument outside its documented domain (entropy grammar, theta, ...).
    InvalidArgument = 2,
    /// The state failed Hermiticity/trace/positivity validation.
    InvalidState = 3,
    ParseError = 4,
}

/// How a report's value was obtained.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QcorrMethod {
    ClosedForm = 0,
    GridRefine = 1,
}

/// Opaque two-qubit state handle.
pub struct QcorrState {
    inner: BlochState,
}

/// Mirror of the library's optimizer options.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QcorrOptions {
    /// Coarse grid resolution (nominal polar count).
    pub grid_n: u32,
    /// Angle tolerance of the local refinement.
    pub xtol: f64,
    /// Iteration cap of the local refinement.
    pub max_iter: u32,
    /// Use quadratic/cubic closed forms where possible.
    pub allow_closed: bool,
    /// Value difference below which minima count as tied.
    pub value_tie: f64,
}

impl QcorrOptions {
    fn to_options(self) -> OptimizerOptions {
        OptimizerOptions {
            grid_n: self.grid_n as usize,
            xtol: self.xtol,
            max_iter: self.max_iter as usize,
            allow_closed: self.allow_closed,
            value_tie: self.value_tie,
        }
    }
}

/// Minimization result: value, direction (unit vector and angles),
/// conditional spectrum, stationarity residual and flags.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QcorrReport {
    pub value: f64,
    pub k: [f64; 3],
    pub gamma: f64,
    pub phi: f64,
    pub cond_spectrum: [f64; 4],
    pub residual: f64,
    pub method: QcorrMethod,
    pub degenerate: bool,
    pub singular: bool,
    pub converged: bool,
}

fn fill_report(out: &mut QcorrReport, rep: &MeasurementReport) {
    let k = rep.direction.vector();
    *out = QcorrReport {
        value: rep.value,
        k: [k.x, k.y, k.z],
        gamma: rep.direction.gamma(),
        phi: rep.direction.phi(),
        cond_spectrum: rep.cond_spectrum,
        residual: rep.residual,
        method: match rep.method {
            qcorr::Method::ClosedForm => QcorrMethod::ClosedForm,
            qcorr::Method::GridRefine => QcorrMethod::GridRefine,
        },
        degenerate: rep.degenerate,
        singular: rep.singular,
        converged: rep.converged,
    };
}

unsafe fn state_ref<'a>(handle: *const QcorrState) -> Option<&'a BlochState> {
    handle.as_ref().map(|h| &h.inner)
}

fn new_handle(state: BlochState, out: *mut *mut QcorrState) -> QcorrStatus {
    let report = state.to_density().validate();
    if !report.valid {
        return QcorrStatus::InvalidState;
    }
    unsafe {
        *out = Box::into_raw(Box::new(QcorrState { inner: state }));
    }
    QcorrStatus::Ok
}

unsafe fn parse_entropy(spec: *const c_char) -> Result<EntropySpec, QcorrStatus> {
    if spec.is_null() {
        return Err(QcorrStatus::NullArgument);
    }
    let text = std::ffi::CStr::from_ptr(spec)
        .to_str()
        .map_err(|_| QcorrStatus::ParseError)?;
    EntropySpec::parse(text).map_err(|_| QcorrStatus::ParseError)
}

/// Fills `out` with the library defaults.
///
/// # Safety
/// `out` must point to writable memory for one `QcorrOptions`.
#[no_mangle]
pub unsafe extern "C" fn qcorr_options_default(out: *mut QcorrOptions) -> QcorrStatus {
    if out.is_null() {
        return QcorrStatus::NullArgument;
    }
    let d = OptimizerOptions::default();
    unsafe {
        *out = QcorrOptions {
            grid_n: d.grid_n as u32,
            xtol: d.xtol,
            max_iter: d.max_iter as u32,
            allow_closed: d.allow_closed,
            value_tie: d.value_tie,
        };
    }
    QcorrStatus::Ok
}

/// Creates a state from Bloch data: two 3-vectors and the row-major 3x3
/// correlation matrix. The reconstructed density matrix is validated.
///
/// # Safety
/// `r_a`, `r_b` must point to 3 doubles, `j` to 9, `out` to a writable
/// handle slot.
#[no_mangle]
pub unsafe extern "C" fn qcorr_state_from_bloch(
    r_a: *const f64,
    r_b: *const f64,
    j: *const f64,
    out: *mut *mut QcorrState,
) -> QcorrStatus {
    if r_a.is_null() || r_b.is_null() || j.is_null() || out.is_null() {
        return QcorrStatus::NullArgument;
    }
    let ra = std::slice::from_raw_parts(r_a, 3);
    let rb = std::slice::from_raw_parts(r_b, 3);
    let jj = std::slice::from_raw_parts(j, 9);
    let state = BlochState::new(
        nalgebra::Vector3::new(ra[0], ra[1], ra[2]),
        nalgebra::Vector3::new(rb[0], rb[1], rb[2]),
        nalgebra::Matrix3::from_fn(|r, c| jj[3 * r + c]),
    );
    new_handle(state, out)
}

/// Creates a state from a 4x4 density matrix given as separate row-major
/// real and imaginary parts (16 doubles each).
///
/// # Safety
/// `re` and `im` must point to 16 doubles each; `out` to a writable handle
/// slot.
#[no_mangle]
pub unsafe extern "C" fn qcorr_state_from_density(
    re: *const f64,
    im: *const f64,
    out: *mut *mut QcorrState,
) -> QcorrStatus {
    if re.is_null() || im.is_null() || out.is_null() {
        return QcorrStatus::NullArgument;
    }
    let re = std::slice::from_raw_parts(re, 16);
    let im = std::slice::from_raw_parts(im, 16);
    let m = nalgebra::Matrix4::from_fn(|r, c| {
        nalgebra::Complex::new(re[4 * r + c], im[4 * r + c])
    });
    let rho = qcorr::DensityMatrix::from_matrix(m);
    match rho.to_bloch() {
        Ok(state) => new_handle(state, out),
        Err(_) => QcorrStatus::InvalidState,
    }
}

/// Creates a state from the JSON file grammar (bloch or rho shape).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn qcorr_state_from_json(
    text: *const c_char,
    out: *mut *mut QcorrState,
) -> QcorrStatus {
    if text.is_null() || out.is_null() {
        return QcorrStatus::NullArgument;
    }
    let Ok(text) = std::ffi::CStr::from_ptr(text).to_str() else {
        return QcorrStatus::ParseError;
    };
    match qcorr::io::parse_state_json(text) {
        Ok(state) => new_handle(state, out),
        Err(qcorr::io::IoError::Invalid { .. }) => QcorrStatus::InvalidState,
        Err(_) => QcorrStatus::ParseError,
    }
}

/// Mixture of two aligned spins at angle +-theta from z (theta in [0, pi/2]).
///
/// # Safety
/// `out` must be a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn qcorr_state_aligned(
    theta: f64,
    out: *mut *mut QcorrState,
) -> QcorrStatus {
    if out.is_null() {
        return QcorrStatus::NullArgument;
    }
    if !(0.0..=std::f64::consts::FRAC_PI_2 + 1e-12).contains(&theta) {
        return QcorrStatus::InvalidArgument;
    }
    new_handle(qcorr::aligned_state(theta), out)
}

/// State with maximally mixed marginals and diagonal correlations.
///
/// # Safety
/// `out` must be a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn qcorr_state_bell_diagonal(
    jx: f64,
    jy: f64,
    jz: f64,
    out: *mut *mut QcorrState,
) -> QcorrStatus {
    if out.is_null() {
        return QcorrStatus::NullArgument;
    }
    new_handle(qcorr::state::bell_diagonal_state(jx, jy, jz), out)
}

/// Releases a state handle. Null is a no-op.
///
/// # Safety
/// `state` must be null or a handle from a `qcorr_state_*` constructor,
/// not freed before.
#[no_mangle]
pub unsafe extern "C" fn qcorr_state_free(state: *mut QcorrState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Copies the Bloch data out of a handle (r_a, r_b: 3 doubles; j: 9
/// row-major doubles).
///
/// # Safety
/// `state` must be a live handle; the outputs must have the stated room.
#[no_mangle]
pub unsafe extern "C" fn qcorr_state_bloch(
    state: *const QcorrState,
    r_a: *mut f64,
    r_b: *mut f64,
    j: *mut f64,
) -> QcorrStatus {
    let Some(s) = state_ref(state) else {
        return QcorrStatus::NullArgument;
    };
    if r_a.is_null() || r_b.is_null() || j.is_null() {
        return QcorrStatus::NullArgument;
    }
    for i in 0..3 {
        *r_a.add(i) = s.r_a[i];
        *r_b.add(i) = s.r_b[i];
        for c in 0..3 {
            *j.add(3 * i + c) = s.j[(i, c)];
        }
    }
    QcorrStatus::Ok
}

/// Minimal information loss for the entropy named by `entropy`
/// (optimizer options may be null for defaults).
///
/// # Safety
/// `state` must be a live handle, `entropy` NUL-terminated, `options` null
/// or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcorr_measure(
    state: *const QcorrState,
    entropy: *const c_char,
    options: *const QcorrOptions,
    out: *mut QcorrReport,
) -> QcorrStatus {
    let Some(s) = state_ref(state) else {
        return QcorrStatus::NullArgument;
    };
    if out.is_null() {
        return QcorrStatus::NullArgument;
    }
    let spec = match parse_entropy(entropy) {
        Ok(spec) => spec,
        Err(status) => return status,
    };
    let opts = options
        .as_ref()
        .map(|o| o.to_options())
        .unwrap_or_default();
    let rep = qcorr::minimize_info_loss(s, spec, &opts);
    fill_report(&mut *out, &rep);
    QcorrStatus::Ok
}

/// Quantum discord under projective measurements (von Neumann entropy).
///
/// # Safety
/// `state` must be a live handle, `options` null or valid, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcorr_discord(
    state: *const QcorrState,
    options: *const QcorrOptions,
    out: *mut QcorrReport,
) -> QcorrStatus {
    let Some(s) = state_ref(state) else {
        return QcorrStatus::NullArgument;
    };
    if out.is_null() {
        return QcorrStatus::NullArgument;
    }
    let opts = options
        .as_ref()
        .map(|o| o.to_options())
        .unwrap_or_default();
    let rep = qcorr::discord(s, &opts);
    fill_report(&mut *out, &rep);
    QcorrStatus::Ok
}

/// Dense-grid oracle value for cross-checking (grid clamped below at 8).
///
/// # Safety
/// `state` must be a live handle, `entropy` NUL-terminated, `value`
/// writable; `k` may be null or point to 3 doubles.
#[no_mangle]
pub unsafe extern "C" fn qcorr_oracle_value(
    state: *const QcorrState,
    entropy: *const c_char,
    grid: u32,
    value: *mut f64,
    k: *mut f64,
) -> QcorrStatus {
    let Some(s) = state_ref(state) else {
        return QcorrStatus::NullArgument;
    };
    if value.is_null() {
        return QcorrStatus::NullArgument;
    }
    let spec = match parse_entropy(entropy) {
        Ok(spec) => spec,
        Err(status) => return status,
    };
    let rep = qcorr::grid_oracle(s, spec, grid as usize);
    *value = rep.value;
    if !k.is_null() {
        let v = rep.direction.vector();
        *k.add(0) = v.x;
        *k.add(1) = v.y;
        *k.add(2) = v.z;
    }
    QcorrStatus::Ok
}

/// Concurrence of the state.
///
/// # Safety
/// `state` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qcorr_concurrence(
    state: *const QcorrState,
    out: *mut f64,
) -> QcorrStatus {
    let Some(s) = state_ref(state) else {
        return QcorrStatus::NullArgument;
    };
    if out.is_null() {
        return QcorrStatus::NullArgument;
    }
    *out = qcorr::concurrence(s).value;
    QcorrStatus::Ok
}

/// Entanglement of formation from a concurrence in [0, 1].
///
/// # Safety
/// `out` must point to writable memory for one double.
#[no_mangle]
pub unsafe extern "C" fn qcorr_entanglement_of_formation(
    concurrence: f64,
    out: *mut f64,
) -> QcorrStatus {
    if out.is_null() {
        return QcorrStatus::NullArgument;
    }
    match qcorr::eof(concurrence) {
        Ok(v) => {
            *out = v;
            QcorrStatus::Ok
        }
        Err(_) => QcorrStatus::InvalidArgument,
    }
}

/// Static version string of the underlying library.
#[no_mangle]
pub extern "C" fn qcorr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
