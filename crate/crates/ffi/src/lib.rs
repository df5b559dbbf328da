//! C ABI over `aud-core`.
//!
//! Every fallible call returns an [`AudStatus`]; on failure the message is
//! available from [`aud_last_error`] on the same thread until the next call.
//! Systems are opaque handles created by [`aud_system_new`] and released with
//! [`aud_system_free`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use aud_core::analytic::{find_m0_star, Exactness};
use aud_core::experiments::{closed_forms, emit_csv, run_sweep, verify, FigureId, SweepSpec};
use aud_core::simulator::{replicate, Discipline, SimRunConfig, SystemSpec};
use aud_core::stochastic::{ArrivalModel, DecisionModel, ServiceKind, ServiceModel};
use aud_core::Error;

pub const AUD_SERVICE_UNIFORM: u32 = 0;
pub const AUD_SERVICE_EXPONENTIAL: u32 = 1;
pub const AUD_SERVICE_DETERMINISTIC: u32 = 2;

pub const AUD_DECISION_POISSON: u32 = 0;
pub const AUD_DECISION_PERIODIC: u32 = 1;

pub const AUD_DISCIPLINE_BLOCKING1: u32 = 0;
pub const AUD_DISCIPLINE_FCFS: u32 = 1;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AudStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    /// Infinite FCFS buffer at load >= 1.
    Unstable = 3,
    /// Load too close to 1 for the exponential periodic formula.
    SingularLoad = 4,
    /// A formula left [0, 1].
    OutOfRange = 5,
    Io = 6,
    /// Internal failure; see `aud_last_error`.
    Internal = 7,
}

/// Opaque system description.
pub struct AudSystem {
    spec: SystemSpec,
}

/// Closed-form values of a system. `*_available` is false where no formula
/// covers it; `*_exact` is false for uniform-epoch approximations.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AudAnalytic {
    pub avg_aud: f64,
    pub missing_prob: f64,
    pub aud_available: bool,
    pub pmis_available: bool,
    pub aud_exact: bool,
    pub pmis_exact: bool,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AudEstimate {
    pub avg_aud: f64,
    pub aud_stderr: f64,
    pub missing_prob: f64,
    pub pmis_stderr: f64,
    pub drop_prob: f64,
    pub mean_interdeparture: f64,
    pub n_decisions: u64,
    pub n_generated: u64,
    pub n_successful: u64,
    pub n_dropped: u64,
    pub n_missed_updates: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

enum Failure {
    Core(Error),
    Null(&'static str),
    Arg(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

fn status_of(f: &Failure) -> AudStatus {
    match f {
        Failure::Null(_) => AudStatus::NullPointer,
        Failure::Arg(_) => AudStatus::InvalidArgument,
        Failure::Core(e) => match e {
            Error::Unstable { .. } => AudStatus::Unstable,
            Error::SingularLoad { .. } => AudStatus::SingularLoad,
            Error::OutOfRange { .. } => AudStatus::OutOfRange,
            Error::Io(_) | Error::Csv(_) => AudStatus::Io,
            Error::NonMonotoneCrossing { .. } => AudStatus::Internal,
            _ => AudStatus::InvalidArgument,
        },
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AudStatus {
    set_last_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AudStatus::Ok,
        Ok(Err(failure)) => {
            let msg = match &failure {
                Failure::Core(e) => e.to_string(),
                Failure::Null(name) => format!("`{name}` is null"),
                Failure::Arg(m) => m.clone(),
            };
            set_last_error(&msg);
            status_of(&failure)
        }
        Err(_) => {
            set_last_error("internal panic");
            AudStatus::Internal
        }
    }
}

unsafe fn out_ref<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

unsafe fn system_ref<'a>(p: *const AudSystem) -> Result<&'a AudSystem, Failure> {
    p.as_ref().ok_or(Failure::Null("system"))
}

unsafe fn str_arg<'a>(p: *const c_char, name: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Arg(format!("`{name}` is not valid UTF-8")))
}

fn service_kind(code: u32) -> Result<ServiceKind, Failure> {
    match code {
        AUD_SERVICE_UNIFORM => Ok(ServiceKind::Uniform),
        AUD_SERVICE_EXPONENTIAL => Ok(ServiceKind::Exponential),
        AUD_SERVICE_DETERMINISTIC => Ok(ServiceKind::Deterministic),
        _ => Err(Failure::Arg(format!("unknown service code {code}"))),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn aud_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn aud_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Create a system. `service`, `decision` and `discipline` take the
/// `AUD_SERVICE_*`, `AUD_DECISION_*` and `AUD_DISCIPLINE_*` codes.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn aud_system_new(
    lambda: f64,
    mu: f64,
    service: u32,
    decision: u32,
    nu: f64,
    discipline: u32,
    out: *mut *mut AudSystem,
) -> AudStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let decision = match decision {
            AUD_DECISION_POISSON => DecisionModel::poisson(nu)?,
            AUD_DECISION_PERIODIC => DecisionModel::periodic(nu, None)?,
            other => return Err(Failure::Arg(format!("unknown decision code {other}"))),
        };
        let discipline = match discipline {
            AUD_DISCIPLINE_BLOCKING1 => Discipline::Blocking1,
            AUD_DISCIPLINE_FCFS => Discipline::FcfsInfinite,
            other => return Err(Failure::Arg(format!("unknown discipline code {other}"))),
        };
        let spec = SystemSpec {
            arrival: ArrivalModel::new(lambda)?,
            service: ServiceModel::named(service_kind(service)?, mu)?,
            decision,
            discipline,
        };
        spec.validate()?;
        *out = Box::into_raw(Box::new(AudSystem { spec }));
        Ok(())
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `system` must come from [`aud_system_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn aud_system_free(system: *mut AudSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Pin the lattice offset of periodic decisions to `phase` in `[0, 1/nu)`.
///
/// # Safety
/// `system` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn aud_system_set_phase(system: *mut AudSystem, phase: f64) -> AudStatus {
    guard(|| {
        let sys = system.as_mut().ok_or(Failure::Null("system"))?;
        let DecisionModel::Periodic { nu, .. } = sys.spec.decision else {
            return Err(Failure::Arg(
                "phase applies to periodic decisions only".into(),
            ));
        };
        sys.spec.decision = DecisionModel::periodic(nu, Some(phase))?;
        Ok(())
    })
}

/// Offered load `lambda * E[S]`.
///
/// # Safety
/// `system` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aud_system_rho(system: *const AudSystem, out: *mut f64) -> AudStatus {
    guard(|| {
        let sys = system_ref(system)?;
        *out_ref(out, "out")? = sys.spec.rho()?;
        Ok(())
    })
}

/// Closed-form AuD and missing probability.
///
/// # Safety
/// `system` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aud_analytic(
    system: *const AudSystem,
    out: *mut AudAnalytic,
) -> AudStatus {
    guard(|| {
        let sys = system_ref(system)?;
        let out = out_ref(out, "out")?;
        let (aud, pmis) = closed_forms(&sys.spec)?;
        *out = AudAnalytic {
            avg_aud: aud.map_or(f64::NAN, |a| a.value),
            missing_prob: pmis.map_or(f64::NAN, |a| a.value),
            aud_available: aud.is_some(),
            pmis_available: pmis.is_some(),
            aud_exact: aud.is_some_and(|a| a.exactness == Exactness::Exact),
            pmis_exact: pmis.is_some_and(|a| a.exactness == Exactness::Exact),
        };
        Ok(())
    })
}

/// Pool `n_reps` replications of `horizon` decisions (the first `warmup`
/// discarded).
///
/// # Safety
/// `system` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn aud_simulate(
    system: *const AudSystem,
    horizon: u64,
    warmup: u64,
    n_reps: u64,
    seed: u64,
    out: *mut AudEstimate,
) -> AudStatus {
    guard(|| {
        let sys = system_ref(system)?;
        let out = out_ref(out, "out")?;
        let config = SimRunConfig {
            spec: sys.spec.clone(),
            horizon,
            warmup,
            seed,
        };
        let e = replicate(&config, n_reps)?;
        *out = AudEstimate {
            avg_aud: e.avg_aud,
            aud_stderr: e.aud_stderr,
            missing_prob: e.missing_prob,
            pmis_stderr: e.pmis_stderr,
            drop_prob: e.drop_prob,
            mean_interdeparture: e.mean_interdeparture,
            n_decisions: e.n_decisions,
            n_generated: e.n_generated,
            n_successful: e.n_successful,
            n_dropped: e.n_dropped,
            n_missed_updates: e.n_missed_updates,
        };
        Ok(())
    })
}

/// Threshold `m0*` between exponential and uniform service under periodic
/// decisions, scanning `1..=m0_max`. Writes 0 when there is no crossing.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn aud_find_m0_star(
    lambda: f64,
    mu: f64,
    m0_max: u64,
    out: *mut u64,
) -> AudStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = find_m0_star(lambda, mu, m0_max)?.unwrap_or(0);
        Ok(())
    })
}

unsafe fn figure_spec(
    figure: *const c_char,
    horizon: u64,
    n_reps: u64,
    seed: u64,
) -> Result<SweepSpec, Failure> {
    let figure: FigureId = str_arg(figure, "figure")?.parse()?;
    let mut spec = SweepSpec::for_figure(figure);
    spec.budget.horizon = horizon;
    spec.budget.n_reps = n_reps;
    spec.budget.seed = seed;
    Ok(spec)
}

/// Run a figure sweep with its default grid and write the CSV to `path`.
///
/// # Safety
/// `figure` and `path` must be NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn aud_sweep_csv(
    figure: *const c_char,
    horizon: u64,
    n_reps: u64,
    seed: u64,
    path: *const c_char,
) -> AudStatus {
    guard(|| {
        let spec = figure_spec(figure, horizon, n_reps, seed)?;
        let path = str_arg(path, "path")?;
        let table = run_sweep(&spec)?;
        emit_csv(&table.rows, Path::new(path))?;
        Ok(())
    })
}

/// Run a figure sweep (infinite-buffer baselines included) and check it
/// under the default tolerance policy. `passed` receives the verdict.
///
/// # Safety
/// `figure` must be a NUL-terminated string and `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn aud_verify_figure(
    figure: *const c_char,
    horizon: u64,
    n_reps: u64,
    seed: u64,
    passed: *mut bool,
) -> AudStatus {
    guard(|| {
        let passed = out_ref(passed, "passed")?;
        let mut spec = figure_spec(figure, horizon, n_reps, seed)?;
        spec.fcfs_baselines = true;
        let table = run_sweep(&spec)?;
        *passed = verify(&table, &spec.tolerance).passed();
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last() -> String {
        unsafe { CStr::from_ptr(aud_last_error()) }
            .to_string_lossy()
            .into_owned()
    }

    #[test]
    fn panics_become_internal_errors() {
        let status = guard(|| panic!("boom"));
        assert_eq!(status, AudStatus::Internal);
        assert_eq!(last(), "internal panic");
    }

    #[test]
    fn core_errors_map_to_codes() {
        assert_eq!(
            status_of(&Failure::Core(Error::Unstable { rho: 2.0 })),
            AudStatus::Unstable
        );
        assert_eq!(
            status_of(&Failure::Core(Error::SingularLoad { rho: 1.0 })),
            AudStatus::SingularLoad
        );
        assert_eq!(
            status_of(&Failure::Core(Error::OutOfRange { value: 2.0 })),
            AudStatus::OutOfRange
        );
        assert_eq!(
            status_of(&Failure::Core(Error::NoSampler)),
            AudStatus::InvalidArgument
        );
        assert_eq!(status_of(&Failure::Null("x")), AudStatus::NullPointer);
    }

    #[test]
    fn unknown_codes_are_rejected() {
        assert!(service_kind(AUD_SERVICE_DETERMINISTIC).is_ok());
        assert!(matches!(service_kind(3), Err(Failure::Arg(_))));
    }
}
