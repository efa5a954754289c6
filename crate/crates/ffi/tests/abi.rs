use std::f64::consts::FRAC_1_SQRT_2;
use std::ffi::CStr;
use std::ptr;

use approx::assert_abs_diff_eq;
use hybridq_ffi::*;

const S: f64 = FRAC_1_SQRT_2;

fn z(re: f64, im: f64) -> HqComplex {
    HqComplex { re, im }
}

fn bell() -> [HqComplex; 4] {
    [z(S, 0.0), z(S, 0.0), z(0.0, 0.0), z(0.0, 0.0)]
}

fn message() -> String {
    unsafe { CStr::from_ptr(hq_last_error_message()) }.to_string_lossy().into_owned()
}

fn model(beta: f64) -> *mut HqModel {
    let mut m = ptr::null_mut();
    let st = unsafe { hq_model_new(1.0, 0.03, 0.0045, beta, &mut m) };
    assert_eq!(st, HqStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn pure_and_mixed_concurrence_agree() {
    // |+-> has no entanglement, the Bell state is maximal.
    let product = [z(0.0, 0.0), z(0.0, 0.0), z(S, 0.0), z(S, 0.0)];
    for (c, expected) in [(bell(), 1.0), (product, 0.0)] {
        let mut pure = -1.0;
        assert_eq!(unsafe { hq_concurrence_pure(c.as_ptr(), &mut pure) }, HqStatus::Ok);
        assert_abs_diff_eq!(pure, expected, epsilon = 1e-12);

        let rho: [HqComplex; 16] = std::array::from_fn(|k| {
            let (a, b) = (c[k / 4], c[k % 4]);
            z(a.re * b.re + a.im * b.im, a.im * b.re - a.re * b.im)
        });
        let mut mixed = -1.0;
        assert_eq!(unsafe { hq_concurrence_mixed(rho.as_ptr(), &mut mixed) }, HqStatus::Ok);
        assert_abs_diff_eq!(mixed, pure, epsilon = 1e-9);
    }
}

#[test]
fn entanglement_of_formation_endpoints() {
    let mut e = -1.0;
    assert_eq!(unsafe { hq_entanglement_of_formation(1.0, &mut e) }, HqStatus::Ok);
    assert_abs_diff_eq!(e, 1.0, epsilon = 1e-12);
    assert_eq!(unsafe { hq_entanglement_of_formation(0.0, &mut e) }, HqStatus::Ok);
    assert_abs_diff_eq!(e, 0.0, epsilon = 1e-12);
    assert_eq!(unsafe { hq_entanglement_of_formation(1.5, &mut e) }, HqStatus::InvalidArgument);
    assert!(message().contains("1.5"), "{}", message());
}

#[test]
fn invalid_inputs_report_status_and_message() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { hq_model_new(-1.0, 0.03, 0.0045, 0.2, &mut m) }, HqStatus::InvalidArgument);
    assert!(m.is_null());
    assert!(message().contains("mass"), "{}", message());

    assert_eq!(unsafe { hq_model_new(1.0, 0.03, 0.0045, 0.2, ptr::null_mut()) }, HqStatus::NullPointer);
    let mut out = 0.0;
    assert_eq!(unsafe { hq_concurrence_pure(ptr::null(), &mut out) }, HqStatus::NullPointer);

    let unnormalized = [z(1.0, 0.0), z(1.0, 0.0), z(0.0, 0.0), z(0.0, 0.0)];
    assert_eq!(unsafe { hq_concurrence_pure(unnormalized.as_ptr(), &mut out) }, HqStatus::InvalidArgument);

    let m = model(0.2);
    assert_eq!(unsafe { hq_model_set_pulse(m, 10.0, 100.0, -1.0) }, HqStatus::InvalidArgument);
    assert_eq!(unsafe { hq_concurrence_pure(bell().as_ptr(), &mut out) }, HqStatus::Ok);
    assert_eq!(message(), "");
    unsafe { hq_model_free(m) };
    unsafe { hq_model_free(ptr::null_mut()) };
}

#[test]
fn trajectory_samples_and_conservation() {
    let m = model(0.2);
    let mut t = ptr::null_mut();
    let st = unsafe { hq_integrate(m, bell().as_ptr(), 0.0, 1.0, 100.0, 0.01, 1000, &mut t) };
    assert_eq!(st, HqStatus::Ok, "{}", message());
    let mut n = 0;
    assert_eq!(unsafe { hq_trajectory_len(t, &mut n) }, HqStatus::Ok);
    assert_eq!(n, 11);

    let mut first = HqSample::default();
    let mut last = HqSample::default();
    assert_eq!(unsafe { hq_trajectory_sample(t, 0, &mut first) }, HqStatus::Ok);
    assert_eq!(unsafe { hq_trajectory_sample(t, n - 1, &mut last) }, HqStatus::Ok);
    assert_eq!(first.p, 1.0);
    assert_abs_diff_eq!(last.t, 100.0, epsilon = 1e-9);
    let norm: f64 = last.c.iter().map(|c| c.re * c.re + c.im * c.im).sum();
    assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(last.e_total, first.e_total, epsilon = 1e-10 * first.e_total.abs());
    assert_abs_diff_eq!(last.concurrence, 1.0, epsilon = 1e-10);

    assert_eq!(unsafe { hq_trajectory_sample(t, n, &mut last) }, HqStatus::IndexOutOfRange);
    unsafe { hq_trajectory_free(t) };
    unsafe { hq_model_free(m) };
}

#[test]
fn non_finite_run_is_numerical() {
    let m = model(0.2);
    let mut t = ptr::null_mut();
    let st = unsafe { hq_integrate(m, bell().as_ptr(), 1e300, 1e300, 10.0, 1.0, 1, &mut t) };
    assert_eq!(st, HqStatus::Numerical, "{}", message());
    assert!(t.is_null());
    unsafe { hq_model_free(m) };
}

#[test]
fn perturbation_changes_dynamics() {
    let run = |pert: bool| {
        let m = model(0.2);
        if pert {
            let st = unsafe { hq_model_set_perturbation(m, HqPerturbationKind::TwoQubit, 0.0, 0.0, 0.01) };
            assert_eq!(st, HqStatus::Ok);
        }
        let product = [z(0.0, 0.0), z(0.0, 0.0), z(S, 0.0), z(S, 0.0)];
        let mut t = ptr::null_mut();
        assert_eq!(unsafe { hq_integrate(m, product.as_ptr(), 0.0, 1.0, 200.0, 0.01, 20000, &mut t) }, HqStatus::Ok);
        let mut s = HqSample::default();
        assert_eq!(unsafe { hq_trajectory_sample(t, 1, &mut s) }, HqStatus::Ok);
        unsafe { hq_trajectory_free(t) };
        unsafe { hq_model_free(m) };
        s.concurrence
    };
    assert_abs_diff_eq!(run(false), 0.0, epsilon = 1e-10);
    assert!(run(true) > 1e-3);
}

#[test]
fn ensemble_is_seed_deterministic() {
    let m = model(0.2);
    let run = |seed| {
        let mut e = ptr::null_mut();
        let st = unsafe { hq_ensemble_run(m, bell().as_ptr(), 8, 0.0, 10.0, 1.0, 1.0, seed, 50.0, 0.01, 500, &mut e) };
        assert_eq!(st, HqStatus::Ok, "{}", message());
        let mut n = 0;
        assert_eq!(unsafe { hq_ensemble_len(e, &mut n) }, HqStatus::Ok);
        let samples: Vec<HqEnsembleSample> = (0..n)
            .map(|i| {
                let mut s = HqEnsembleSample::default();
                assert_eq!(unsafe { hq_ensemble_sample(e, i, &mut s) }, HqStatus::Ok);
                s
            })
            .collect();
        let mut s = HqEnsembleSample::default();
        assert_eq!(unsafe { hq_ensemble_sample(e, n, &mut s) }, HqStatus::IndexOutOfRange);
        unsafe { hq_ensemble_free(e) };
        samples
    };
    let a = run(7);
    assert_eq!(a.len(), 11);
    assert_eq!(a, run(7));
    assert_ne!(a, run(8));
    assert_abs_diff_eq!(a[0].purity, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(a[0].linear_entropy, 0.0, epsilon = 1e-12);
    let trace: f64 = (0..4).map(|i| a[10].rho[5 * i].re).sum();
    assert_abs_diff_eq!(trace, 1.0, epsilon = 1e-12);

    let mut e = ptr::null_mut();
    let st = unsafe { hq_ensemble_run(m, bell().as_ptr(), 0, 0.0, 10.0, 1.0, 1.0, 1, 50.0, 0.01, 500, &mut e) };
    assert_eq!(st, HqStatus::InvalidArgument);
    unsafe { hq_model_free(m) };
}
