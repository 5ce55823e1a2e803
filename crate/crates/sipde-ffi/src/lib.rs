//! C ABI for the sipde integrators.
//!
//! Handles are opaque pointers created and released by this library;
//! every fallible call returns a [`SipdeStatus`] and writes its results
//! through out-pointers. The generated header lives in `include/sipde.h`.

use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use sipde::harness::{integrate, test_case, CaseId, DtRule, Integrator, SpatialConfig};
use sipde::multistep::PcConfig;
use sipde::problem::discrete_norms;
use sipde::rosenbrock::{
    check_stiffly_accurate, construct_tableau, export_tableau, scheme_gamma_three_quarters,
    validate_order_conditions, RootChoice, RosenbrockTableau,
};
use sipde::stability::{r_at_infinity, stability_function};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SipdeStatus {
    Ok = 0,
    /// Unknown name, out-of-range parameter, or malformed configuration.
    InvalidArgument = 1,
    /// The computation ran but failed numerically (singular system,
    /// blow-up, pole).
    NumericFailure = 2,
    NullPointer = 3,
}

/// Opaque Rosenbrock tableau handle.
pub struct SipdeTableau {
    inner: RosenbrockTableau,
}

/// Complex number in Cartesian form.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SipdeComplex {
    pub re: f64,
    pub im: f64,
}

/// Discrete error norms of a convergence run.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SipdeErrorNorms {
    /// dx-scaled L1 norm.
    pub l1: f64,
    /// dx-scaled L2 norm.
    pub l2: f64,
    /// Max norm.
    pub linf: f64,
}

/// One convergence run: which case, which integrator, and the step rule.
/// Fields at their zero values select the documented defaults.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct SipdeRunSpec {
    /// Grid resolution (number of nodes).
    pub n: u32,
    /// 0: Rosenbrock with `gamma`; 1: SI-PC BDF with `p`/`mu`.
    pub use_bdf: c_int,
    /// Rosenbrock diagonal coefficient (>= 1/4). 0 selects 3/4.
    pub gamma: f64,
    /// BDF corrector order (1..=4). 0 selects 3.
    pub p: c_int,
    /// Corrector iterations. 0 selects p.
    pub mu: c_int,
    /// Starting-procedure reduction factor (1, 2, 4, 8, 16). 0 selects 4.
    pub start_m: c_int,
    /// Nonzero: take starting values from the exact solution.
    pub exact_start: c_int,
    /// dt = dt_ratio * dx when cfl <= 0. 0 selects 1.
    pub dt_ratio: f64,
    /// dt = cfl * dx / max|f'(u0)| when positive.
    pub cfl: f64,
    /// Final time; <= 0 selects the case default.
    pub final_time: f64,
    /// Traveling-wave speed for the KdV cases; <= 0 selects 0.1.
    pub lambda: f64,
    /// Nonzero: fifth-order WENO reconstruction instead of third.
    pub weno53: c_int,
    /// WENO smoothness regularizer; <= 0 selects the case default.
    pub weno_epsilon: f64,
    /// Implicit stencil order (2 or 4). 0 selects 4.
    pub stencil_order: c_int,
}

fn catch<F: FnOnce() -> SipdeStatus>(f: F) -> SipdeStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(SipdeStatus::NumericFailure)
}

/// The exact-rational gamma = 3/4 scheme. Never fails.
#[no_mangle]
pub extern "C" fn sipde_tableau_gamma_three_quarters() -> *mut SipdeTableau {
    Box::into_raw(Box::new(SipdeTableau {
        inner: scheme_gamma_three_quarters(),
    }))
}

/// Construct the third-order scheme for `gamma >= 1/4`.
#[no_mangle]
pub extern "C" fn sipde_tableau_construct(
    gamma: f64,
    out: *mut *mut SipdeTableau,
) -> SipdeStatus {
    if out.is_null() {
        return SipdeStatus::NullPointer;
    }
    catch(|| match construct_tableau(gamma, RootChoice::Unit) {
        Ok(t) => {
            unsafe { *out = Box::into_raw(Box::new(SipdeTableau { inner: t })) };
            SipdeStatus::Ok
        }
        Err(_) => SipdeStatus::InvalidArgument,
    })
}

/// Release a tableau handle. Accepts NULL.
#[no_mangle]
pub extern "C" fn sipde_tableau_free(t: *mut SipdeTableau) {
    if !t.is_null() {
        drop(unsafe { Box::from_raw(t) });
    }
}

/// Number of stages, or -1 for NULL.
#[no_mangle]
pub extern "C" fn sipde_tableau_stages(t: *const SipdeTableau) -> c_int {
    if t.is_null() {
        return -1;
    }
    unsafe { &*t }.inner.stages() as c_int
}

/// Highest satisfied order condition (0..=3), or -1 for NULL.
#[no_mangle]
pub extern "C" fn sipde_tableau_order(t: *const SipdeTableau) -> c_int {
    if t.is_null() {
        return -1;
    }
    validate_order_conditions(&unsafe { &*t }.inner).satisfied_order as c_int
}

/// 1 when the tableau is stiffly accurate, 0 otherwise, -1 for NULL.
#[no_mangle]
pub extern "C" fn sipde_tableau_is_stiffly_accurate(t: *const SipdeTableau) -> c_int {
    if t.is_null() {
        return -1;
    }
    check_stiffly_accurate(&unsafe { &*t }.inner) as c_int
}

/// Serialize the tableau in the plain-text exchange format. The returned
/// string must be released with `sipde_string_free`.
#[no_mangle]
pub extern "C" fn sipde_tableau_export(t: *const SipdeTableau) -> *mut c_char {
    if t.is_null() {
        return std::ptr::null_mut();
    }
    let text = export_tableau(&unsafe { &*t }.inner);
    CString::new(text)
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

/// Release a string returned by this library. Accepts NULL.
#[no_mangle]
pub extern "C" fn sipde_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// Evaluate the stability function R(zt, z).
#[no_mangle]
pub extern "C" fn sipde_stability_function(
    t: *const SipdeTableau,
    z_tilde: SipdeComplex,
    z: SipdeComplex,
    out: *mut SipdeComplex,
) -> SipdeStatus {
    if t.is_null() || out.is_null() {
        return SipdeStatus::NullPointer;
    }
    catch(|| {
        match stability_function(
            &unsafe { &*t }.inner,
            Complex64::new(z_tilde.re, z_tilde.im),
            Complex64::new(z.re, z.im),
        ) {
            Ok(r) => {
                unsafe { *out = SipdeComplex { re: r.re, im: r.im } };
                SipdeStatus::Ok
            }
            Err(_) => SipdeStatus::NumericFailure,
        }
    })
}

/// The damping limit R(zt, inf) = 1 - b^T B^{-1} e.
#[no_mangle]
pub extern "C" fn sipde_r_at_infinity(t: *const SipdeTableau, out: *mut f64) -> SipdeStatus {
    if t.is_null() || out.is_null() {
        return SipdeStatus::NullPointer;
    }
    catch(|| match r_at_infinity(&unsafe { &*t }.inner) {
        Ok(v) => {
            unsafe { *out = v };
            SipdeStatus::Ok
        }
        Err(_) => SipdeStatus::NumericFailure,
    })
}

fn run_case_impl(case: &str, spec: &SipdeRunSpec) -> Result<SipdeErrorNorms, SipdeStatus> {
    let id = CaseId::parse(case).map_err(|_| SipdeStatus::InvalidArgument)?;
    let mut case = test_case(id);
    if spec.lambda > 0.0 {
        case = case.with_lambda(spec.lambda);
    }
    let integrator = if spec.use_bdf != 0 {
        let p = if spec.p == 0 { 3 } else { spec.p as usize };
        let mut cfg = PcConfig::standard(p);
        if spec.mu > 0 {
            cfg.mu = spec.mu as usize;
        }
        if spec.start_m > 0 {
            cfg.start_m = spec.start_m as usize;
        }
        cfg.exact_start = spec.exact_start != 0;
        Integrator::SiPcBdf(cfg)
    } else {
        let gamma = if spec.gamma == 0.0 { 0.75 } else { spec.gamma };
        let tableau =
            construct_tableau(gamma, RootChoice::Unit).map_err(|_| SipdeStatus::InvalidArgument)?;
        Integrator::Rosenbrock(tableau)
    };
    let mut spatial = SpatialConfig::default();
    if spec.stencil_order != 0 {
        spatial.stencil_order = spec.stencil_order as usize;
    }
    if spec.weno53 != 0 {
        spatial.weno = sipde::spatial::WenoVariant::Weno53;
    }
    if spec.weno_epsilon > 0.0 {
        spatial.weno_epsilon = spec.weno_epsilon;
    }
    let problem = case
        .make_problem(spec.n as usize, spatial)
        .map_err(|_| SipdeStatus::InvalidArgument)?;
    let u0 = case.initial_state(&problem);
    let dt = if spec.cfl > 0.0 {
        DtRule::Cfl(spec.cfl).dt(&problem, &u0)
    } else {
        let ratio = if spec.dt_ratio == 0.0 { 1.0 } else { spec.dt_ratio };
        ratio * problem.grid().dx()
    };
    let t_final = if spec.final_time > 0.0 {
        spec.final_time
    } else {
        case.final_time
    };
    let out =
        integrate(&problem, &integrator, &u0, dt, t_final).map_err(|_| SipdeStatus::NumericFailure)?;
    let exact = problem.exact_state(t_final).expect("registered case");
    let err: Vec<f64> = out
        .final_state
        .values
        .iter()
        .zip(exact.values.iter())
        .map(|(a, b)| a - b)
        .collect();
    let norms = discrete_norms(&err, problem.grid().dx()).map_err(|_| SipdeStatus::NumericFailure)?;
    Ok(SipdeErrorNorms {
        l1: norms.l1,
        l2: norms.l2,
        linf: norms.linf,
    })
}

/// Integrate one benchmark case to its final time and report the error
/// norms against the exact solution. `case` is one of "R1", "R2", "R3",
/// "M1", "M2", "M3", "M4" (or the long names).
#[no_mangle]
pub extern "C" fn sipde_run_case(
    case: *const c_char,
    spec: *const SipdeRunSpec,
    out: *mut SipdeErrorNorms,
) -> SipdeStatus {
    if case.is_null() || spec.is_null() || out.is_null() {
        return SipdeStatus::NullPointer;
    }
    let Ok(case) = unsafe { CStr::from_ptr(case) }.to_str() else {
        return SipdeStatus::InvalidArgument;
    };
    let spec = unsafe { *spec };
    catch(|| match run_case_impl(case, &spec) {
        Ok(norms) => {
            unsafe { *out = norms };
            SipdeStatus::Ok
        }
        Err(status) => status,
    })
}

/// Library version as a static string; do not free.
#[no_mangle]
pub extern "C" fn sipde_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
