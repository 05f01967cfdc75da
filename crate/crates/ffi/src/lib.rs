//! C interface to the `hr-sync` simulator.
//!
//! Simulations are opaque handles created by `hr_simulation_new` or
//! `hr_simulation_from_config` and released with `hr_simulation_free`.
//! Every fallible function returns an [`HrStatus`]; on failure the message
//! is available from `hr_last_error_message` on the same thread.
//!
//! State buffers hold `6 * len` doubles, field-major in the order
//! u1, v1, w1, u2, v2, w2.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hr_sync::{
    compute_absorbing_constants, compute_sync_threshold, generate_initial_condition,
    parse_run_config, DerivedConstants, Error, Grid, InitialSpec, PairState, Parameters,
    ScalarField, Scheme, Simulation, StepperConfig, TimeSeriesRecord,
};

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    BelowThreshold = 4,
    NonFinite = 5,
    SolverFailure = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrParameters {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    pub q: f64,
    pub r: f64,
    pub c: f64,
    pub j: f64,
    pub d: f64,
    pub p: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrConstants {
    pub c1: f64,
    pub c2: f64,
    pub r1: f64,
    pub m: f64,
    pub k: f64,
    pub c3: f64,
    pub lambda: f64,
    /// NaN when undefined.
    pub p_star: f64,
    /// NaN unless p exceeds p_star.
    pub delta: f64,
    /// NaN unless p exceeds p_star.
    pub mu: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HrRecord {
    pub t: f64,
    pub norm_g_sq: f64,
    pub sync_l: f64,
    pub sync_dist_sq: f64,
    pub h1_u: f64,
    pub weighted_norm: f64,
}

/// Time-stepping scheme selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HrScheme {
    ImexEuler = 0,
    ImexStrang = 1,
}

/// Opaque simulation handle.
pub struct HrSimulation {
    sim: Simulation,
    state: PairState,
    step: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn status_of(err: &Error) -> HrStatus {
    match err {
        Error::Config { .. } | Error::UnknownGenerator(_) => HrStatus::InvalidConfig,
        Error::BelowThreshold { .. } | Error::DegenerateLambda => HrStatus::BelowThreshold,
        Error::NonFinite { .. } => HrStatus::NonFinite,
        Error::SolverDiverged { .. } => HrStatus::SolverFailure,
        _ => HrStatus::InvalidArgument,
    }
}

fn fail(err: Error) -> HrStatus {
    set_error(err.to_string());
    status_of(&err)
}

/// Runs `f`, converting panics and errors into status codes.
fn guard(f: impl FnOnce() -> Result<(), HrStatus>) -> HrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HrStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            HrStatus::Panic
        }
    }
}

fn null(name: &str) -> HrStatus {
    set_error(format!("{name} is null"));
    HrStatus::NullPointer
}

impl From<HrParameters> for Parameters {
    fn from(p: HrParameters) -> Self {
        Parameters {
            a: p.a,
            b: p.b,
            alpha: p.alpha,
            beta: p.beta,
            q: p.q,
            r: p.r,
            c: p.c,
            j: p.j,
            d: p.d,
            p: p.p,
        }
    }
}

impl From<DerivedConstants> for HrConstants {
    fn from(k: DerivedConstants) -> Self {
        HrConstants {
            c1: k.c1,
            c2: k.c2,
            r1: k.r1,
            m: k.m,
            k: k.k,
            c3: k.c3,
            lambda: k.lambda,
            p_star: k.p_star.unwrap_or(f64::NAN),
            delta: k.delta().unwrap_or(f64::NAN),
            mu: k.mu().unwrap_or(f64::NAN),
        }
    }
}

impl From<TimeSeriesRecord> for HrRecord {
    fn from(r: TimeSeriesRecord) -> Self {
        HrRecord {
            t: r.t,
            norm_g_sq: r.norm_g_sq,
            sync_l: r.sync_l,
            sync_dist_sq: r.sync_dist_sq,
            h1_u: r.h1_u,
            weighted_norm: r.weighted_norm,
        }
    }
}

fn into_handle(sim: Simulation, state: PairState, out: *mut *mut HrSimulation) {
    let handle = Box::new(HrSimulation {
        sim,
        state,
        step: 0,
    });
    // SAFETY: callers check `out` for null before building the simulation.
    unsafe { *out = Box::into_raw(handle) };
}

/// Parameters of the built-in test set (λ = 8, p* = 5) with coupling `p`.
#[no_mangle]
pub extern "C" fn hr_parameters_test_set(p: f64) -> HrParameters {
    let k = Parameters::test_set();
    HrParameters {
        a: k.a,
        b: k.b,
        alpha: k.alpha,
        beta: k.beta,
        q: k.q,
        r: k.r,
        c: k.c,
        j: k.j,
        d: k.d,
        p,
    }
}

/// Writes p* for `params` to `out`.
///
/// # Safety
/// `params` and `out` must be valid pointers or null.
#[no_mangle]
pub unsafe extern "C" fn hr_sync_threshold(params: *const HrParameters, out: *mut f64) -> HrStatus {
    guard(|| {
        let params = unsafe { params.as_ref() }.ok_or_else(|| null("params"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = compute_sync_threshold(&(*params).into()).map_err(fail)?;
        Ok(())
    })
}

/// Writes the derived constants for `params` on a domain of area `omega_area`.
///
/// # Safety
/// `params` and `out` must be valid pointers or null.
#[no_mangle]
pub unsafe extern "C" fn hr_constants(
    params: *const HrParameters,
    omega_area: f64,
    out: *mut HrConstants,
) -> HrStatus {
    guard(|| {
        let params = unsafe { params.as_ref() }.ok_or_else(|| null("params"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = compute_absorbing_constants(&(*params).into(), omega_area)
            .map_err(fail)?
            .into();
        Ok(())
    })
}

/// Creates a simulation with zero initial state.
///
/// # Safety
/// `params` must be valid; `out` must point to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn hr_simulation_new(
    params: *const HrParameters,
    dimension: usize,
    points: usize,
    length: f64,
    dt: f64,
    scheme: HrScheme,
    out: *mut *mut HrSimulation,
) -> HrStatus {
    guard(|| {
        let params = unsafe { params.as_ref() }.ok_or_else(|| null("params"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = Grid::new(dimension, points, length).map_err(fail)?;
        let scheme = match scheme {
            HrScheme::ImexEuler => Scheme::ImexEuler,
            HrScheme::ImexStrang => Scheme::ImexStrang,
        };
        let sim = Simulation::new(grid, (*params).into(), StepperConfig::new(dt, scheme))
            .map_err(fail)?;
        into_handle(sim, PairState::zeros(&grid), out);
        Ok(())
    })
}

/// Creates a simulation from config-file text, with its configured initial data.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn hr_simulation_from_config(
    text: *const c_char,
    out: *mut *mut HrSimulation,
) -> HrStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = unsafe { CStr::from_ptr(text) }.to_str().map_err(|_| {
            set_error("config text is not valid UTF-8");
            HrStatus::InvalidConfig
        })?;
        let cfg = parse_run_config(text).map_err(fail)?;
        let grid = cfg.grid.build().map_err(fail)?;
        let sim = Simulation::new(grid, cfg.params, cfg.stepper).map_err(fail)?;
        let state = generate_initial_condition(&cfg.initial, &grid).map_err(fail)?;
        into_handle(sim, state, out);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sim` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hr_simulation_free(sim: *mut HrSimulation) {
    if !sim.is_null() {
        drop(unsafe { Box::from_raw(sim) });
    }
}

/// Number of grid nodes.
///
/// # Safety
/// `sim` must be a valid handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn hr_simulation_len(sim: *const HrSimulation) -> usize {
    unsafe { sim.as_ref() }.map_or(0, |s| s.state.len())
}

/// Current simulation time.
///
/// # Safety
/// `sim` must be a valid handle or null (returns NaN).
#[no_mangle]
pub unsafe extern "C" fn hr_simulation_time(sim: *const HrSimulation) -> f64 {
    unsafe { sim.as_ref() }.map_or(f64::NAN, |s| s.step as f64 * s.sim.stepper().dt)
}

/// Replaces the state with `6 * len` doubles and resets time to zero.
///
/// # Safety
/// `data` must point to `count` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn hr_simulation_set_state(
    sim: *mut HrSimulation,
    data: *const f64,
    count: usize,
) -> HrStatus {
    guard(|| {
        let sim = unsafe { sim.as_mut() }.ok_or_else(|| null("sim"))?;
        if data.is_null() {
            return Err(null("data"));
        }
        let n = sim.state.len();
        if count != 6 * n {
            set_error(format!("expected {} values, got {count}", 6 * n));
            return Err(HrStatus::InvalidArgument);
        }
        let values = unsafe { std::slice::from_raw_parts(data, count) };
        let fields: [ScalarField; 6] =
            std::array::from_fn(|i| ScalarField::new(values[i * n..(i + 1) * n].to_vec()));
        sim.state = PairState::from_fields(fields);
        sim.step = 0;
        Ok(())
    })
}

/// Replaces the state with seeded fourier-smooth data and resets time to zero.
///
/// # Safety
/// `sim` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn hr_simulation_init_fourier(
    sim: *mut HrSimulation,
    seed: u64,
    amplitude: f64,
) -> HrStatus {
    guard(|| {
        let sim = unsafe { sim.as_mut() }.ok_or_else(|| null("sim"))?;
        sim.state =
            generate_initial_condition(&InitialSpec::fourier(seed, amplitude), sim.sim.grid())
                .map_err(fail)?;
        sim.step = 0;
        Ok(())
    })
}

/// Advances by `steps` time steps. On failure the state is left unchanged.
///
/// # Safety
/// `sim` must be a valid handle or null.
#[no_mangle]
pub unsafe extern "C" fn hr_simulation_advance(sim: *mut HrSimulation, steps: u64) -> HrStatus {
    guard(|| {
        let sim = unsafe { sim.as_mut() }.ok_or_else(|| null("sim"))?;
        let mut state = sim.state.clone();
        for k in 1..=steps {
            state = sim.sim.step(&state).map_err(fail)?;
            if !state.is_finite() {
                return Err(fail(Error::NonFinite {
                    step: sim.step + k,
                    last_finite_time: (sim.step + k - 1) as f64 * sim.sim.stepper().dt,
                }));
            }
        }
        sim.state = state;
        sim.step += steps;
        Ok(())
    })
}

/// Diagnostics of the current state.
///
/// # Safety
/// `sim` and `out` must be valid pointers or null.
#[no_mangle]
pub unsafe extern "C" fn hr_simulation_diagnostics(
    sim: *const HrSimulation,
    out: *mut HrRecord,
) -> HrStatus {
    guard(|| {
        let sim = unsafe { sim.as_ref() }.ok_or_else(|| null("sim"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        let t = sim.step as f64 * sim.sim.stepper().dt;
        *out = sim.sim.record(&sim.state, t).map_err(fail)?.into();
        Ok(())
    })
}

/// Derived constants of the simulation's parameters and domain.
///
/// # Safety
/// `sim` and `out` must be valid pointers or null.
#[no_mangle]
pub unsafe extern "C" fn hr_simulation_constants(
    sim: *const HrSimulation,
    out: *mut HrConstants,
) -> HrStatus {
    guard(|| {
        let sim = unsafe { sim.as_ref() }.ok_or_else(|| null("sim"))?;
        let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
        *out = (*sim.sim.constants()).into();
        Ok(())
    })
}

/// Copies the state into `out` (`6 * len` doubles, field-major).
///
/// # Safety
/// `out` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hr_simulation_state(
    sim: *const HrSimulation,
    out: *mut f64,
    capacity: usize,
) -> HrStatus {
    guard(|| {
        let sim = unsafe { sim.as_ref() }.ok_or_else(|| null("sim"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let n = sim.state.len();
        if capacity < 6 * n {
            set_error(format!("buffer holds {capacity} values, need {}", 6 * n));
            return Err(HrStatus::BufferTooSmall);
        }
        let dst = unsafe { std::slice::from_raw_parts_mut(out, 6 * n) };
        for (chunk, field) in dst.chunks_mut(n).zip(sim.state.fields()) {
            chunk.copy_from_slice(field.values());
        }
        Ok(())
    })
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to fit) and returns the full message length in bytes.
///
/// # Safety
/// `buf` must point to `capacity` writable bytes, or be null to query the length.
#[no_mangle]
pub unsafe extern "C" fn hr_last_error_message(buf: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && capacity > 0 {
            let n = msg.len().min(capacity - 1);
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}
