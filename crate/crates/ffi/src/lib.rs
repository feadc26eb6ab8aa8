//! C interface to the `reachflow` solver.
//!
//! Every fallible function returns an [`RfStatus`]; on failure a message is
//! kept per thread and can be read with [`rf_last_error_message`]. Objects are
//! opaque handles created by `*_from_json` and released by the matching
//! `*_free`. Coordinates travel as flat `double` arrays, `dim` values per
//! point.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use reachflow::experiments::Scenario;
use reachflow::wasserstein::w2_assignment;
use reachflow::{Domain, DomainSpec, Error, ParticleState, Point, Potential, Termination, Trace};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    BufferTooSmall = 3,
    Panic = 4,
    DimensionMismatch = 10,
    OutsideReachTube = 11,
    AmbiguousProjection = 12,
    NotOnDomain = 13,
    InvalidResolution = 14,
    InvalidDomain = 15,
    InvalidPotential = 16,
    InvalidPoint = 17,
    NonFiniteState = 18,
    LinesearchFailed = 19,
    EmptySample = 20,
    SizeMismatch = 21,
    SizeTooLarge = 22,
    InvalidSweep = 23,
    UnknownFigure = 24,
    InvalidConfig = 25,
    Io = 26,
    Parse = 27,
}

impl From<&Error> for RfStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::DimensionMismatch { .. } => RfStatus::DimensionMismatch,
            Error::OutsideReachTube { .. } => RfStatus::OutsideReachTube,
            Error::AmbiguousProjection { .. } => RfStatus::AmbiguousProjection,
            Error::NotOnDomain { .. } => RfStatus::NotOnDomain,
            Error::InvalidResolution(_) => RfStatus::InvalidResolution,
            Error::InvalidDomain(_) => RfStatus::InvalidDomain,
            Error::InvalidPotential(_) => RfStatus::InvalidPotential,
            Error::InvalidPoint(_) => RfStatus::InvalidPoint,
            Error::NonFiniteState { .. } => RfStatus::NonFiniteState,
            Error::LinesearchFailed { .. } => RfStatus::LinesearchFailed,
            Error::EmptySample => RfStatus::EmptySample,
            Error::SizeMismatch { .. } => RfStatus::SizeMismatch,
            Error::SizeTooLarge { .. } => RfStatus::SizeTooLarge,
            Error::InvalidSweep(_) => RfStatus::InvalidSweep,
            Error::UnknownFigure(_) => RfStatus::UnknownFigure,
            Error::InvalidConfig(_) => RfStatus::InvalidConfig,
            Error::Io(_) => RfStatus::Io,
            Error::Parse(_) => RfStatus::Parse,
        }
    }
}

/// How a simulation run ended.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RfTermination {
    NotRun = 0,
    Converged = 1,
    MaxSteps = 2,
    FixedTimeReached = 3,
    Failed = 4,
}

pub struct RfDomain(Domain);

pub struct RfPotential(Potential);

/// A scenario together with its initial state and, after a run, its trace.
pub struct RfSimulation {
    scenario: Scenario,
    domain: Domain,
    initial: ParticleState,
    trace: Option<Trace>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(RfStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(RfStatus::from(&e), e.to_string())
    }
}

type Outcome = std::result::Result<(), Fail>;

fn guard(body: impl FnOnce() -> Outcome) -> RfStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => RfStatus::Ok,
        Ok(Err(Fail(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RfStatus::Panic
        }
    }
}

fn null() -> Fail {
    Fail(RfStatus::NullPointer, "null pointer argument".into())
}

unsafe fn nonnull<'a, T>(p: *const T) -> std::result::Result<&'a T, Fail> {
    p.as_ref().ok_or_else(null)
}

unsafe fn out<'a, T>(p: *mut T) -> std::result::Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(null)
}

unsafe fn text<'a>(p: *const c_char) -> std::result::Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(RfStatus::InvalidUtf8, e.to_string()))
}

unsafe fn coords<'a>(p: *const f64, len: usize) -> std::result::Result<&'a [f64], Fail> {
    if p.is_null() {
        return Err(null());
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn point(p: *const f64, dim: usize) -> std::result::Result<Point, Fail> {
    Ok(Point::from_slice(coords(p, dim)?)?)
}

unsafe fn write_point(p: &Point, dest: *mut f64) -> Outcome {
    if dest.is_null() {
        return Err(null());
    }
    ptr::copy_nonoverlapping(p.coords().as_ptr(), dest, p.coords().len());
    Ok(())
}

unsafe fn points(p: *const f64, n: usize, dim: usize) -> std::result::Result<Vec<Point>, Fail> {
    if dim == 0 {
        return Err(Error::InvalidPoint("dim must be 1 or 2".into()).into());
    }
    coords(p, n * dim)?.chunks(dim).map(|c| Ok(Point::from_slice(c)?)).collect()
}

unsafe fn create<T>(dest: *mut *mut T, value: T) -> Outcome {
    *out(dest)? = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failure on this thread. Valid until the next failing
/// call on the same thread; never null.
#[no_mangle]
pub extern "C" fn rf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a domain from its JSON description, e.g.
/// `{"kind": "disc", "center": [0, 0], "radius": 1}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_domain` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_domain_from_json(json: *const c_char, out_domain: *mut *mut RfDomain) -> RfStatus {
    guard(|| {
        let spec: DomainSpec = serde_json::from_str(text(json)?).map_err(|e| Error::Parse(e.to_string()))?;
        create(out_domain, RfDomain(spec.build()?))
    })
}

/// # Safety
/// `domain` must come from [`rf_domain_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rf_domain_free(domain: *mut RfDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// # Safety
/// `domain` must be a live handle; `out_dim` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_domain_dim(domain: *const RfDomain, out_dim: *mut usize) -> RfStatus {
    guard(|| {
        *out(out_dim)? = nonnull(domain)?.0.dim();
        Ok(())
    })
}

/// Declared reach; `INFINITY` for convex domains.
///
/// # Safety
/// `domain` must be a live handle; `out_reach` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_domain_reach(domain: *const RfDomain, out_reach: *mut f64) -> RfStatus {
    guard(|| {
        *out(out_reach)? = nonnull(domain)?.0.reach();
        Ok(())
    })
}

/// # Safety
/// `x` must hold `dim` doubles; `out_distance` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_domain_distance(
    domain: *const RfDomain,
    x: *const f64,
    dim: usize,
    out_distance: *mut f64,
) -> RfStatus {
    guard(|| {
        *out(out_distance)? = nonnull(domain)?.0.distance(&point(x, dim)?)?;
        Ok(())
    })
}

/// Closest point within the reach tube; fails with `OutsideReachTube` or
/// `AmbiguousProjection` otherwise.
///
/// # Safety
/// `x` must hold `dim` doubles and `out_point` room for `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn rf_domain_project(
    domain: *const RfDomain,
    x: *const f64,
    dim: usize,
    out_point: *mut f64,
) -> RfStatus {
    guard(|| write_point(&nonnull(domain)?.0.project(&point(x, dim)?)?, out_point))
}

/// Builds a potential from JSON, e.g. `{"kind": "quadratic"}`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_potential` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_potential_from_json(json: *const c_char, out_potential: *mut *mut RfPotential) -> RfStatus {
    guard(|| {
        let w: Potential = serde_json::from_str(text(json)?).map_err(|e| Error::Parse(e.to_string()))?;
        w.validate()?;
        create(out_potential, RfPotential(w))
    })
}

/// # Safety
/// `potential` must come from [`rf_potential_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rf_potential_free(potential: *mut RfPotential) {
    if !potential.is_null() {
        drop(Box::from_raw(potential));
    }
}

/// # Safety
/// `x` must hold `dim` doubles; `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_potential_eval(
    potential: *const RfPotential,
    x: *const f64,
    dim: usize,
    out_value: *mut f64,
) -> RfStatus {
    guard(|| {
        *out(out_value)? = nonnull(potential)?.0.eval(&point(x, dim)?);
        Ok(())
    })
}

/// # Safety
/// `x` must hold `dim` doubles and `out_grad` room for `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn rf_potential_grad(
    potential: *const RfPotential,
    x: *const f64,
    dim: usize,
    out_grad: *mut f64,
) -> RfStatus {
    guard(|| write_point(&nonnull(potential)?.0.grad(&point(x, dim)?), out_grad))
}

/// Loads a scenario (the same JSON the command-line tool reads) and draws
/// its initial state.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_sim` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_simulation_from_json(json: *const c_char, out_sim: *mut *mut RfSimulation) -> RfStatus {
    guard(|| {
        let scenario = Scenario::from_json(text(json)?)?;
        let (domain, initial) = scenario.prepare()?;
        create(out_sim, RfSimulation { scenario, domain, initial, trace: None })
    })
}

/// # Safety
/// `sim` must come from [`rf_simulation_from_json`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rf_simulation_free(sim: *mut RfSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Runs the scenario from its initial state, replacing any earlier result.
/// A run that stops on a step error still returns `Ok`; the termination
/// reports `Failed` and the state is the last good one.
///
/// # Safety
/// `sim` must be a live handle; `out_termination` may be null.
#[no_mangle]
pub unsafe extern "C" fn rf_simulation_run(sim: *mut RfSimulation, out_termination: *mut RfTermination) -> RfStatus {
    guard(|| {
        let sim = out(sim)?;
        let s = &sim.scenario;
        let trace = reachflow::run(&s.config, &sim.domain, &s.potential, &sim.initial)?;
        let code = match trace.termination {
            Termination::Converged => RfTermination::Converged,
            Termination::MaxSteps => RfTermination::MaxSteps,
            Termination::FixedTimeReached => RfTermination::FixedTimeReached,
            Termination::Failed { .. } => RfTermination::Failed,
        };
        if let Termination::Failed { error, .. } = &trace.termination {
            set_error(error.to_string());
        }
        sim.trace = Some(trace);
        if let Some(t) = out_termination.as_mut() {
            *t = code;
        }
        Ok(())
    })
}

fn current(sim: &RfSimulation) -> &ParticleState {
    sim.trace.as_ref().map_or(&sim.initial, |t| &t.final_state)
}

/// Particle count and spatial dimension.
///
/// # Safety
/// `sim` must be a live handle; both outputs writable.
#[no_mangle]
pub unsafe extern "C" fn rf_simulation_shape(
    sim: *const RfSimulation,
    out_n: *mut usize,
    out_dim: *mut usize,
) -> RfStatus {
    guard(|| {
        let state = current(nonnull(sim)?);
        *out(out_n)? = state.len();
        *out(out_dim)? = state.dim();
        Ok(())
    })
}

/// Copies the current positions (final state after a run, initial state
/// before) into `out_coords`, which must hold `n * dim` doubles.
///
/// # Safety
/// `out_coords` must point to `capacity` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rf_simulation_positions(
    sim: *const RfSimulation,
    out_coords: *mut f64,
    capacity: usize,
) -> RfStatus {
    guard(|| {
        let state = current(nonnull(sim)?);
        let needed = state.len() * state.dim();
        if capacity < needed {
            return Err(Fail(RfStatus::BufferTooSmall, format!("need {needed} doubles, got {capacity}")));
        }
        if out_coords.is_null() {
            return Err(null());
        }
        let flat: Vec<f64> = state.positions.iter().flat_map(|p| p.coords().to_vec()).collect();
        ptr::copy_nonoverlapping(flat.as_ptr(), out_coords, flat.len());
        Ok(())
    })
}

/// Last trace record of the most recent run: step count, time, energy and
/// gradient norm. Fails with `InvalidConfig` before the first run.
///
/// # Safety
/// `sim` must be a live handle; every output writable.
#[no_mangle]
pub unsafe extern "C" fn rf_simulation_summary(
    sim: *const RfSimulation,
    out_steps: *mut usize,
    out_time: *mut f64,
    out_energy: *mut f64,
    out_grad_norm: *mut f64,
) -> RfStatus {
    guard(|| {
        let trace = nonnull(sim)?
            .trace
            .as_ref()
            .ok_or_else(|| Fail(RfStatus::InvalidConfig, "simulation has not been run".into()))?;
        let last = trace.last();
        *out(out_steps)? = last.step;
        *out(out_time)? = last.time;
        *out(out_energy)? = last.energy;
        *out(out_grad_norm)? = last.grad_norm;
        Ok(())
    })
}

/// Quadratic Wasserstein distance between two uniform measures of `n`
/// points each.
///
/// # Safety
/// `a` and `b` must each hold `n * dim` doubles; `out_distance` writable.
#[no_mangle]
pub unsafe extern "C" fn rf_w2(a: *const f64, b: *const f64, n: usize, dim: usize, out_distance: *mut f64) -> RfStatus {
    guard(|| {
        *out(out_distance)? = w2_assignment(&points(a, n, dim)?, &points(b, n, dim)?)?;
        Ok(())
    })
}
