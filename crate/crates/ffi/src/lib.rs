//! C ABI for the solver: opaque handles, integer status codes, and a
//! thread-local last-error message. The header is generated by cbindgen at
//! build time into `include/pdae_fem.h`.
//!
//! Ownership rules: every `*_new`/`*_load`/`*_run` output must be released
//! with the matching `*_free`; accessors never take ownership.

use pdae_fem::config::RunConfig;
use pdae_fem::error::Error;
use pdae_fem::mesh::{build_interval_mesh, build_square_mesh, BulkMesh};
use pdae_fem::mms::make_manufactured_case;
use pdae_fem::system::{
    build_dirichlet_pdae, build_homogeneous_dirichlet, build_nonlocal_pdae, build_wentzell_pdae,
    consistent_init, zero_boundary_data, zero_bulk_data, Formulation, PdaeSystem,
};
use pdae_fem::timestep::{integrate, StepperConfig, Trajectory};
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdaeStatus {
    Ok = 0,
    /// Internal failure (solver, io); see pdae_last_error_message.
    Runtime = 1,
    /// Malformed or inconsistent configuration.
    Config = 2,
    /// A required pointer argument was null.
    NullArgument = 3,
    /// Output buffer too small for the requested data.
    BufferTooSmall = 4,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: &str) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.to_string());
}

fn status_of(e: &Error) -> PdaeStatus {
    match e {
        Error::Config { .. } => PdaeStatus::Config,
        _ => PdaeStatus::Runtime,
    }
}

/// Opaque: a validated run configuration.
pub struct PdaeConfig {
    inner: RunConfig,
}

/// Opaque: a computed trajectory together with its state dimension.
pub struct PdaeTrajectory {
    traj: Trajectory,
    n_x: usize,
}

/// Copy the last error message for this thread into `buf` (NUL-terminated,
/// truncated to `len` bytes). Returns the full message length in bytes.
#[no_mangle]
pub extern "C" fn pdae_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

/// Load and validate a configuration file (TOML, or JSON by extension).
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pdae_config_load(
    path: *const c_char,
    out: *mut *mut PdaeConfig,
) -> PdaeStatus {
    if path.is_null() || out.is_null() {
        set_error("null argument");
        return PdaeStatus::NullArgument;
    }
    let path = match CStr::from_ptr(path).to_str() {
        Ok(s) => PathBuf::from(s),
        Err(_) => {
            set_error("path is not valid UTF-8");
            return PdaeStatus::Config;
        }
    };
    match pdae_fem::config::load_config(&path) {
        Ok((cfg, _)) => {
            *out = Box::into_raw(Box::new(PdaeConfig { inner: cfg }));
            PdaeStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            status_of(&e)
        }
    }
}

/// Parse and validate a configuration from a TOML string.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pdae_config_parse_toml(
    text: *const c_char,
    out: *mut *mut PdaeConfig,
) -> PdaeStatus {
    if text.is_null() || out.is_null() {
        set_error("null argument");
        return PdaeStatus::NullArgument;
    }
    let text = match CStr::from_ptr(text).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("config text is not valid UTF-8");
            return PdaeStatus::Config;
        }
    };
    let cfg: RunConfig = match toml_parse(text) {
        Ok(c) => c,
        Err(msg) => {
            set_error(&msg);
            return PdaeStatus::Config;
        }
    };
    if let Err(e) = cfg.validate() {
        set_error(&e.to_string());
        return status_of(&e);
    }
    *out = Box::into_raw(Box::new(PdaeConfig { inner: cfg }));
    PdaeStatus::Ok
}

fn toml_parse(text: &str) -> Result<RunConfig, String> {
    toml::from_str(text).map_err(|e| format!("TOML parse error: {e}"))
}

/// Release a configuration handle. A null pointer is a no-op.
///
/// # Safety
/// `cfg` must come from a `pdae_config_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pdae_config_free(cfg: *mut PdaeConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

fn build_mesh(cfg: &RunConfig) -> Result<BulkMesh, Error> {
    match cfg.geometry {
        pdae_fem::config::Geometry::Interval { n } => build_interval_mesh(n, 0.0, 1.0),
        pdae_fem::config::Geometry::Square { n } => build_square_mesh(n),
    }
}

fn build_system(cfg: &RunConfig, mesh: &BulkMesh) -> Result<PdaeSystem, Error> {
    let coeffs = cfg.coefficients.build()?;
    let (f, g) = if cfg.data == "zero" {
        (zero_bulk_data(), zero_boundary_data())
    } else {
        let case = make_manufactured_case(&cfg.data)?;
        (case.f.clone(), case.g.clone())
    };
    match cfg.formulation {
        Formulation::HomogeneousDirichlet => build_homogeneous_dirichlet(mesh, &coeffs, f),
        Formulation::DirichletPdae => build_dirichlet_pdae(mesh, &coeffs, f, g),
        Formulation::Wentzell => build_wentzell_pdae(mesh, None, &coeffs, f, g),
        Formulation::Nonlocal => build_nonlocal_pdae(mesh, None, &coeffs, f, g),
    }
}

fn solve_impl(cfg: &RunConfig) -> Result<PdaeTrajectory, Error> {
    let mesh = build_mesh(cfg)?;
    let sys = build_system(cfg, &mesh)?;
    let u0 = if cfg.data == "zero" {
        nalgebra_zeros(sys.n_u)
    } else {
        let case = make_manufactured_case(&cfg.data)?;
        let u_exact = case.u_exact.clone();
        nalgebra::DVector::from_fn(sys.n_u, |i, _| u_exact(mesh.nodes[i], 0.0))
    };
    let init = consistent_init(&sys, &u0, None)?;
    let stepper = StepperConfig {
        scheme: cfg.scheme,
        tau: cfg.tau,
        t_start: 0.0,
        t_end: cfg.t_end,
    };
    let traj = integrate(&sys, &init.x0, &stepper)?;
    Ok(PdaeTrajectory {
        n_x: sys.n_x(),
        traj,
    })
}

fn nalgebra_zeros(n: usize) -> nalgebra::DVector<f64> {
    nalgebra::DVector::zeros(n)
}

/// Run the configured solve in memory (no files are written).
///
/// # Safety
/// `cfg` must be a live configuration handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdae_solve(
    cfg: *const PdaeConfig,
    out: *mut *mut PdaeTrajectory,
) -> PdaeStatus {
    if cfg.is_null() || out.is_null() {
        set_error("null argument");
        return PdaeStatus::NullArgument;
    }
    let cfg = &(*cfg).inner;
    let result = catch_unwind(AssertUnwindSafe(|| solve_impl(cfg)));
    match result {
        Ok(Ok(t)) => {
            *out = Box::into_raw(Box::new(t));
            PdaeStatus::Ok
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            PdaeStatus::Runtime
        }
    }
}

/// Number of grid points in the trajectory (steps + 1), or 0 on null.
///
/// # Safety
/// `traj` must be a live trajectory handle or null.
#[no_mangle]
pub unsafe extern "C" fn pdae_trajectory_len(traj: *const PdaeTrajectory) -> usize {
    if traj.is_null() {
        return 0;
    }
    (*traj).traj.times.len()
}

/// State dimension (bulk plus boundary unknowns), or 0 on null.
///
/// # Safety
/// `traj` must be a live trajectory handle or null.
#[no_mangle]
pub unsafe extern "C" fn pdae_trajectory_state_dim(traj: *const PdaeTrajectory) -> usize {
    if traj.is_null() {
        return 0;
    }
    (*traj).n_x
}

unsafe fn scalar_at(
    traj: *const PdaeTrajectory,
    i: usize,
    out: *mut f64,
    get: impl Fn(&PdaeTrajectory, usize) -> f64,
) -> PdaeStatus {
    if traj.is_null() || out.is_null() {
        set_error("null argument");
        return PdaeStatus::NullArgument;
    }
    let t = &*traj;
    if i >= t.traj.times.len() {
        set_error("index out of range");
        return PdaeStatus::Runtime;
    }
    *out = get(t, i);
    PdaeStatus::Ok
}

/// Time of grid point `i`.
///
/// # Safety
/// `traj` must be a live trajectory handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdae_trajectory_time(
    traj: *const PdaeTrajectory,
    i: usize,
    out: *mut f64,
) -> PdaeStatus {
    scalar_at(traj, i, out, |t, i| t.traj.times[i])
}

/// Discrete energy 0.5 x^T E x at grid point `i`.
///
/// # Safety
/// `traj` must be a live trajectory handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdae_trajectory_energy(
    traj: *const PdaeTrajectory,
    i: usize,
    out: *mut f64,
) -> PdaeStatus {
    scalar_at(traj, i, out, |t, i| t.traj.diagnostics[i].energy)
}

/// Constraint residual at grid point `i`.
///
/// # Safety
/// `traj` must be a live trajectory handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pdae_trajectory_constraint_residual(
    traj: *const PdaeTrajectory,
    i: usize,
    out: *mut f64,
) -> PdaeStatus {
    scalar_at(traj, i, out, |t, i| {
        t.traj.diagnostics[i].constraint_residual
    })
}

/// Copy the state vector at grid point `i` into `buf` (capacity `len`).
///
/// # Safety
/// `traj` must be a live trajectory handle; `buf` must point to at least
/// `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn pdae_trajectory_state(
    traj: *const PdaeTrajectory,
    i: usize,
    buf: *mut f64,
    len: usize,
) -> PdaeStatus {
    if traj.is_null() || buf.is_null() {
        set_error("null argument");
        return PdaeStatus::NullArgument;
    }
    let t = &*traj;
    if i >= t.traj.states.len() {
        set_error("index out of range");
        return PdaeStatus::Runtime;
    }
    if len < t.n_x {
        set_error("state buffer too small");
        return PdaeStatus::BufferTooSmall;
    }
    let state = &t.traj.states[i];
    std::ptr::copy_nonoverlapping(state.as_ptr(), buf, t.n_x);
    PdaeStatus::Ok
}

/// Release a trajectory handle. A null pointer is a no-op.
///
/// # Safety
/// `traj` must come from `pdae_solve` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pdae_trajectory_free(traj: *mut PdaeTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}
