//! C interface to `hybridq`.
//!
//! Every function returns an [`HqStatus`]; results go through out-pointers.
//! On failure a message for the calling thread is available from
//! [`hq_last_error_message`]. Handles are opaque and must be released with
//! the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use hybridq::dynamics::{CouplingSchedule, HybridSystem, IntegrationControls, Trajectory};
use hybridq::entanglement::{concurrence_mixed, concurrence_pure, entanglement_of_formation, TwoQubitDensity};
use hybridq::model::{HybridState, ModelParams, QuantumAmplitudes};
use hybridq::perturbations::{single_qubit_perturbation, two_qubit_perturbation};
use hybridq::protocols::{run_ensemble, EnsembleResult, EnsembleSpec};
use hybridq::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Integration or eigenvalue failure.
    Numerical = 3,
    IndexOutOfRange = 4,
    Io = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HqPerturbationKind {
    SingleQubit = 0,
    TwoQubit = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HqComplex {
    pub re: f64,
    pub im: f64,
}

impl From<HqComplex> for Complex64 {
    fn from(z: HqComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<Complex64> for HqComplex {
    fn from(z: Complex64) -> Self {
        HqComplex { re: z.re, im: z.im }
    }
}

/// One output sample of a trajectory.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HqSample {
    pub t: f64,
    pub x: f64,
    pub p: f64,
    /// Amplitudes in the basis |++>, |-->, (|+-> + |-+>)/sqrt2, (|+-> - |-+>)/sqrt2.
    pub c: [HqComplex; 4],
    pub concurrence: f64,
    pub e_total: f64,
}

/// One output sample of an ensemble average.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HqEnsembleSample {
    pub t: f64,
    pub concurrence: f64,
    pub linear_entropy: f64,
    pub purity: f64,
    /// Averaged density matrix, row-major.
    pub rho: [HqComplex; 16],
}

/// Model parameters plus coupling schedule and perturbation.
pub struct HqModel {
    system: HybridSystem,
}

pub struct HqTrajectory {
    inner: Trajectory,
}

pub struct HqEnsemble {
    inner: EnsembleResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> HqStatus {
    match e {
        _ if e.is_numerical() => HqStatus::Numerical,
        Error::Io(_) | Error::Csv(_) => HqStatus::Io,
        _ => HqStatus::InvalidArgument,
    }
}

struct Failure(HqStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(HqStatus::NullPointer, format!("`{what}` is null"))
}

/// Runs `f`, converting errors and panics to a status and recording the message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            HqStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            HqStatus::Panic
        }
    }
}

unsafe fn as_ref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn as_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn amplitudes(c: *const HqComplex) -> Result<QuantumAmplitudes, Failure> {
    if c.is_null() {
        return Err(null("c"));
    }
    let s = std::slice::from_raw_parts(c, 4);
    Ok(QuantumAmplitudes::new([s[0].into(), s[1].into(), s[2].into(), s[3].into()])?)
}

/// Message describing the last failure on this thread, or "" after a success.
/// The pointer stays valid until the next `hq_*` call on the same thread.
#[no_mangle]
pub extern "C" fn hq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a model with constant coupling and no perturbation.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn hq_model_new(mass: f64, omega: f64, omega0: f64, beta: f64, out: *mut *mut HqModel) -> HqStatus {
    guard(|| {
        let out = as_mut(out, "out")?;
        let params = ModelParams::new(mass, omega, omega0, beta)?;
        *out = Box::into_raw(Box::new(HqModel {
            system: HybridSystem::new(params),
        }));
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle from [`hq_model_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hq_model_free(model: *mut HqModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Replaces constant coupling with a Gaussian pulse of peak `amplitude` (in
/// units of the constant coupling), centred at `center` with width `width`.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hq_model_set_pulse(model: *mut HqModel, amplitude: f64, center: f64, width: f64) -> HqStatus {
    guard(|| {
        let m = as_mut(model, "model")?;
        m.system.schedule = CouplingSchedule::gaussian_pulse(amplitude, center, width)?;
        Ok(())
    })
}

/// Sets the perturbation weights (omega1, omega2, omega3) for the given kind.
///
/// # Safety
/// `model` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn hq_model_set_perturbation(
    model: *mut HqModel,
    kind: HqPerturbationKind,
    w1: f64,
    w2: f64,
    w3: f64,
) -> HqStatus {
    guard(|| {
        let m = as_mut(model, "model")?;
        let p = match kind {
            HqPerturbationKind::SingleQubit => single_qubit_perturbation(w1, w2, w3)?,
            HqPerturbationKind::TwoQubit => two_qubit_perturbation(w1, w2, w3)?,
        };
        m.system.perturbation = Some(p);
        Ok(())
    })
}

/// Concurrence of the normalized pure state `c[4]`.
///
/// # Safety
/// `c` must point to 4 values and `out` to a writable double.
#[no_mangle]
pub unsafe extern "C" fn hq_concurrence_pure(c: *const HqComplex, out: *mut f64) -> HqStatus {
    guard(|| {
        let out = as_mut(out, "out")?;
        *out = concurrence_pure(&amplitudes(c)?)?;
        Ok(())
    })
}

/// Concurrence of the density matrix `rho[16]` (row-major).
///
/// # Safety
/// `rho` must point to 16 values and `out` to a writable double.
#[no_mangle]
pub unsafe extern "C" fn hq_concurrence_mixed(rho: *const HqComplex, out: *mut f64) -> HqStatus {
    guard(|| {
        let out = as_mut(out, "out")?;
        if rho.is_null() {
            return Err(null("rho"));
        }
        let s = std::slice::from_raw_parts(rho, 16);
        let m = hybridq::model::Mat4::from_fn(|i, j| s[4 * i + j].into());
        *out = concurrence_mixed(&TwoQubitDensity::new(m)?)?;
        Ok(())
    })
}

/// Entanglement of formation for a concurrence in [0, 1].
///
/// # Safety
/// `out` must point to a writable double.
#[no_mangle]
pub unsafe extern "C" fn hq_entanglement_of_formation(concurrence: f64, out: *mut f64) -> HqStatus {
    guard(|| {
        let out = as_mut(out, "out")?;
        *out = entanglement_of_formation(concurrence)?;
        Ok(())
    })
}

/// Integrates from t = 0 to `t_max` with RK4 step `dt`, keeping every
/// `stride`-th step plus the first and last.
///
/// # Safety
/// `model` must be a live handle, `c` must point to 4 values and `out` to
/// writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn hq_integrate(
    model: *const HqModel,
    c: *const HqComplex,
    x0: f64,
    p0: f64,
    t_max: f64,
    dt: f64,
    stride: usize,
    out: *mut *mut HqTrajectory,
) -> HqStatus {
    guard(|| {
        let m = as_ref(model, "model")?;
        let out = as_mut(out, "out")?;
        let init = HybridState::new(0.0, x0, p0, amplitudes(c)?)?;
        let inner = m.system.integrate(&init, t_max, dt, stride)?;
        *out = Box::into_raw(Box::new(HqTrajectory { inner }));
        Ok(())
    })
}

/// # Safety
/// `traj` must be a live handle and `out` a writable size_t.
#[no_mangle]
pub unsafe extern "C" fn hq_trajectory_len(traj: *const HqTrajectory, out: *mut usize) -> HqStatus {
    guard(|| {
        *as_mut(out, "out")? = as_ref(traj, "traj")?.inner.len();
        Ok(())
    })
}

/// # Safety
/// `traj` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hq_trajectory_sample(traj: *const HqTrajectory, index: usize, out: *mut HqSample) -> HqStatus {
    guard(|| {
        let t = &as_ref(traj, "traj")?.inner;
        let out = as_mut(out, "out")?;
        let s = t.samples.get(index).ok_or_else(|| {
            Failure(HqStatus::IndexOutOfRange, format!("index {index} >= length {}", t.len()))
        })?;
        let o = t.system.observe(s);
        *out = HqSample {
            t: s.t,
            x: s.x,
            p: s.p,
            c: s.q.components().map(HqComplex::from),
            concurrence: o.concurrence,
            e_total: o.energy.e_total,
        };
        Ok(())
    })
}

/// # Safety
/// `traj` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hq_trajectory_free(traj: *mut HqTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Averages `trajectories` runs whose (x0, p0) are drawn from independent
/// Gaussians. Results are identical for a given seed regardless of threads.
///
/// # Safety
/// `model` must be a live handle, `c` must point to 4 values and `out` to
/// writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn hq_ensemble_run(
    model: *const HqModel,
    c: *const HqComplex,
    trajectories: usize,
    x_mean: f64,
    p_mean: f64,
    sigma_x: f64,
    sigma_p: f64,
    seed: u64,
    t_max: f64,
    dt: f64,
    stride: usize,
    out: *mut *mut HqEnsemble,
) -> HqStatus {
    guard(|| {
        let m = as_ref(model, "model")?;
        let out = as_mut(out, "out")?;
        let spec = EnsembleSpec {
            trajectories,
            x_mean,
            p_mean,
            sigma_x,
            sigma_p,
            seed,
            initial: amplitudes(c)?,
            system: m.system.clone(),
            controls: IntegrationControls::new(t_max, dt, stride)?,
            with_stderr: false,
        };
        let inner = run_ensemble(&spec)?;
        *out = Box::into_raw(Box::new(HqEnsemble { inner }));
        Ok(())
    })
}

/// # Safety
/// `ens` must be a live handle and `out` a writable size_t.
#[no_mangle]
pub unsafe extern "C" fn hq_ensemble_len(ens: *const HqEnsemble, out: *mut usize) -> HqStatus {
    guard(|| {
        *as_mut(out, "out")? = as_ref(ens, "ens")?.inner.len();
        Ok(())
    })
}

/// # Safety
/// `ens` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hq_ensemble_sample(ens: *const HqEnsemble, index: usize, out: *mut HqEnsembleSample) -> HqStatus {
    guard(|| {
        let e = &as_ref(ens, "ens")?.inner;
        let out = as_mut(out, "out")?;
        if index >= e.len() {
            return Err(Failure(HqStatus::IndexOutOfRange, format!("index {index} >= length {}", e.len())));
        }
        let m = e.densities[index].matrix();
        *out = HqEnsembleSample {
            t: e.times[index],
            concurrence: e.concurrence[index],
            linear_entropy: e.linear_entropy[index],
            purity: e.purity[index],
            rho: std::array::from_fn(|k| m[(k / 4, k % 4)].into()),
        };
        Ok(())
    })
}

/// # Safety
/// `ens` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hq_ensemble_free(ens: *mut HqEnsemble) {
    if !ens.is_null() {
        drop(Box::from_raw(ens));
    }
}
