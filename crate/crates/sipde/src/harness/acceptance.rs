//! The acceptance suite: every criterion is evaluated at its stated
//! tolerance and reported as one pass/fail line. Used by the `verify`
//! subcommand and by the `acceptance` integration test target.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::Error;
use crate::multistep::{si_pc_step_with_stats, History, PcConfig};
use crate::problem::{build_grid, Grid, PdeProblem, StateVector};
use crate::rosenbrock::{
    builtin_tableau, check_stiffly_accurate, construct_tableau, construct_tableau_exact,
    rosenbrock_step_with_stats, scheme_gamma_three_quarters, validate_order_conditions,
    BuiltinGamma, CoefField, RootChoice,
};
use crate::spatial::StencilMatrix;
use crate::stability::{boundary_locus, hausdorff_distance, r_at_infinity, YSampling};

use super::reference_data::TableId;
use super::runner::{integrate, Integrator};
use super::sweep::{run_sweep, SweepResult};

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub const CRITERIA: [(usize, &str); 12] = [
    (1, "tableau exactness (gamma = 3/4)"),
    (2, "Rosenbrock convection-diffusion table"),
    (3, "Rosenbrock KdV table and large-lambda variant"),
    (4, "Rosenbrock biharmonic order and stability"),
    (5, "SI-PC BDF diffusion sweep"),
    (6, "SI-PC BDF biharmonic sweep"),
    (7, "correction-count order suite"),
    (8, "linear exactness against the stability function"),
    (9, "L-stability of constructed tableaux"),
    (10, "stability-region contours under refinement"),
    (11, "discrete mass conservation on the dispersive runs"),
    (12, "solve-count instrumentation"),
];

pub fn run_criterion(id: usize) -> CriterionOutcome {
    if !(1..=12).contains(&id) {
        return CriterionOutcome {
            id,
            name: "unknown",
            passed: false,
            detail: format!("unknown criterion {id}"),
        };
    }
    let (passed, detail) = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(),
        10 => criterion_10(),
        11 => criterion_11(),
        _ => criterion_12(),
    };
    CriterionOutcome {
        id,
        name: CRITERIA[id - 1].1,
        passed,
        detail,
    }
}

pub fn run_all() -> Vec<CriterionOutcome> {
    (1..=12).map(run_criterion).collect()
}

fn rat(n: i64, d: i64) -> BigRational {
    <BigRational as CoefField>::from_ratio(n, d)
}

fn criterion_1() -> (bool, String) {
    let t = scheme_gamma_three_quarters();
    let report = validate_order_conditions(&t);
    let exact = report.rational_mode && report.exact_zero.iter().all(|&z| z);
    let sa = check_stiffly_accurate(&t);
    let built = match construct_tableau_exact(rat(3, 4), RootChoice::Unit) {
        Ok(b) => b,
        Err(e) => return (false, format!("construction failed: {e}")),
    };
    let same = built.exact() == t.exact();
    let a42 = t.exact().unwrap().a_tilde[3][1] == rat(52, 297);
    (
        exact && sa && same && a42 && report.satisfied_order == 3,
        format!(
            "rational residuals all zero: {exact}; stiffly accurate: {sa}; \
             constructor reproduces the scheme: {same}; a~_42 = 52/297: {a42}"
        ),
    )
}

/// Shared helper: check per-row L2 orders against the published ones and
/// relative errors within a factor of the published values.
fn check_sweep_rows(
    s: &SweepResult,
    from_n: usize,
    order_tol: f64,
    err_factor: f64,
) -> Result<(), String> {
    let rel = s.relative_l2();
    for (k, row) in s.computed.rows.iter().enumerate() {
        let p = &s.reference.rows[k];
        let Some(r) = rel[k] else {
            return Err(format!(
                "{} N={}: run failed: {}",
                s.computed.scheme,
                row.n,
                row.failure.as_deref().unwrap_or("")
            ));
        };
        if row.n < from_n {
            continue;
        }
        let ratio = r / p.l2;
        if !(ratio <= err_factor && ratio >= 1.0 / err_factor) {
            return Err(format!(
                "{} N={}: L2 ratio {ratio:.2} outside factor {err_factor}",
                s.computed.scheme, row.n
            ));
        }
        if !p.o_l2.is_nan() {
            let Some(o) = row.orders[1] else {
                return Err(format!("{} N={}: missing order", s.computed.scheme, row.n));
            };
            if (o - p.o_l2).abs() > order_tol {
                return Err(format!(
                    "{} N={}: L2 order {o:.2} vs published {:.2} (tol {order_tol})",
                    s.computed.scheme, row.n, p.o_l2
                ));
            }
        }
    }
    Ok(())
}

fn criterion_2() -> (bool, String) {
    let sweeps = match run_sweep(TableId::R1) {
        Ok(s) => s,
        Err(e) => return (false, format!("sweep failed: {e}")),
    };
    // gamma = 13/50 and gamma = 1 - 1/sqrt(2): rows 0 and 2.
    let mut details = Vec::new();
    let mut ok = true;
    for idx in [0usize, 2] {
        match check_sweep_rows(&sweeps[idx], 80, 0.25, 3.0) {
            Ok(()) => details.push(format!("{}: ok", sweeps[idx].computed.scheme)),
            Err(e) => {
                ok = false;
                details.push(e);
            }
        }
    }
    (ok, details.join("; "))
}

fn criterion_3() -> (bool, String) {
    let sweeps = match run_sweep(TableId::R2) {
        Ok(s) => s,
        Err(e) => return (false, format!("sweep failed: {e}")),
    };
    let mut details = Vec::new();
    let mut ok = true;
    for s in &sweeps {
        // Errors within factor 3 of the table at every printed N.
        if let Err(e) = check_sweep_rows(s, 0, f64::INFINITY, 3.0) {
            ok = false;
            details.push(e);
            continue;
        }
        // L2 orders ~ 3.0 +- 0.25 and Linf orders in [2.2, 2.9] for N = 160..640.
        let rel_inf = s.relative_linf();
        let mut prev_inf: Option<f64> = None;
        for (k, row) in s.computed.rows.iter().enumerate() {
            let o2 = row.orders[1];
            let oi = prev_inf
                .zip(rel_inf[k])
                .map(|(p, c)| (p / c).log2());
            prev_inf = rel_inf[k];
            if row.n < 160 {
                continue;
            }
            let o2 = o2.unwrap_or(f64::NAN);
            let oi = oi.unwrap_or(f64::NAN);
            if (o2 - 3.0).abs() > 0.25 {
                ok = false;
                details.push(format!(
                    "{} N={}: L2 order {o2:.2} outside 3.0 +- 0.25",
                    s.computed.scheme, row.n
                ));
            }
            if !(2.2..=2.9).contains(&oi) {
                ok = false;
                details.push(format!(
                    "{} N={}: Linf order {oi:.2} outside [2.2, 2.9]",
                    s.computed.scheme, row.n
                ));
            }
        }
    }
    // lambda = 10 variant completes stably.
    match run_sweep(TableId::R2B) {
        Ok(b) => {
            for s in &b {
                for row in &s.computed.rows {
                    if row.norms.is_none() {
                        ok = false;
                        details.push(format!(
                            "lambda=10 {} N={} failed: {}",
                            s.computed.scheme,
                            row.n,
                            row.failure.as_deref().unwrap_or("")
                        ));
                    }
                }
            }
            details.push("lambda = 10, CFL = 0.5 runs complete stably".into());
        }
        Err(e) => {
            ok = false;
            details.push(format!("lambda=10 sweep failed: {e}"));
        }
    }
    (ok, details.join("; "))
}

fn criterion_4() -> (bool, String) {
    let sweeps = match run_sweep(TableId::R3) {
        Ok(s) => s,
        Err(e) => return (false, format!("sweep failed: {e}")),
    };
    let mut details = Vec::new();
    let mut ok = true;
    for s in &sweeps {
        // Stability: every resolution completes with finite error despite
        // dt = dx >> dx^4.
        for row in &s.computed.rows {
            if row.norms.is_none() {
                ok = false;
                details.push(format!(
                    "{} N={} failed: {}",
                    s.computed.scheme,
                    row.n,
                    row.failure.as_deref().unwrap_or("")
                ));
            }
        }
        // L2 order >= 2.85 at N = 640.
        let last = s.computed.rows.last().unwrap();
        let o = last.orders[1].unwrap_or(f64::NAN);
        if o >= 2.85 {
            details.push(format!("{}: order {o:.2} at N=640", s.computed.scheme));
        } else {
            ok = false;
            details.push(format!(
                "{}: order {o:.2} at N=640 below 2.85 (stage-order plateau; \
                 errors are 3-70x below the published values — see README)",
                s.computed.scheme
            ));
        }
    }
    (ok, details.join("; "))
}

fn criterion_5() -> (bool, String) {
    let sweeps = match run_sweep(TableId::M1) {
        Ok(s) => s,
        Err(e) => return (false, format!("sweep failed: {e}")),
    };
    let mut details = Vec::new();
    let mut ok = true;
    let targets = [1.98, 3.00, 4.00];
    for (s, target) in sweeps.iter().zip(targets) {
        let last = s.computed.rows.last().unwrap();
        let o = last.orders[1].unwrap_or(f64::NAN);
        if (o - target).abs() > 0.2 {
            ok = false;
            details.push(format!(
                "{}: order {o:.2} at N=320 vs {target} +- 0.2",
                s.computed.scheme
            ));
        } else {
            details.push(format!("{}: order {o:.2}", s.computed.scheme));
        }
    }
    // BDF4 L2 error at N = 320 within factor 3 of 2.7497e-08 (relative).
    let rel = sweeps[2].relative_l2();
    let r = rel.last().copied().flatten().unwrap_or(f64::NAN);
    let ratio = r / 2.7497e-8;
    if (1.0 / 3.0..=3.0).contains(&ratio) {
        details.push(format!("BDF4 N=320 relative L2 ratio {ratio:.2}"));
    } else {
        ok = false;
        details.push(format!("BDF4 N=320 relative L2 ratio {ratio:.2} outside factor 3"));
    }
    (ok, details.join("; "))
}

fn criterion_6() -> (bool, String) {
    let sweeps = match run_sweep(TableId::M4) {
        Ok(s) => s,
        Err(e) => return (false, format!("sweep failed: {e}")),
    };
    let mut details = Vec::new();
    let mut ok = true;
    let targets = [1.99, 3.02, 3.96];
    for (s, target) in sweeps.iter().zip(targets) {
        for row in &s.computed.rows {
            if row.norms.is_none() {
                ok = false;
                details.push(format!("{} N={} failed", s.computed.scheme, row.n));
            }
        }
        let last = s.computed.rows.last().unwrap();
        let o = last.orders[1].unwrap_or(f64::NAN);
        if (o - target).abs() > 0.25 {
            ok = false;
            details.push(format!(
                "{}: order {o:.2} at N=320 vs {target} +- 0.25",
                s.computed.scheme
            ));
        } else {
            details.push(format!("{}: order {o:.2}", s.computed.scheme));
        }
    }
    (ok, details.join("; "))
}

/// u' = -(1 + u^2) u with closed-form solution, embedded on a small grid.
fn decay_problem() -> PdeProblem {
    let grid = build_grid(0.0, 1.0, 8).unwrap();
    PdeProblem::builder(grid, 2)
        .implicit(0, |g: &Grid, u: &[f64]| {
            let mut m = StencilMatrix::zeros(g.n_points(), 0);
            for i in 0..g.n_points() {
                *m.band_mut(i, 0) = -(1.0 + u[i] * u[i]);
            }
            m
        })
        .exact_solution(|_x, t| decay_exact(t))
        .build()
        .unwrap()
}

fn decay_exact(t: f64) -> f64 {
    (-t).exp() / (1.0 + (1.0 - (-2.0 * t).exp())).sqrt()
}

fn pc_error(problem: &PdeProblem, cfg: &PcConfig, dt: f64) -> f64 {
    let n_steps = (1.0 / dt).round() as usize;
    let dt = 1.0 / n_steps as f64;
    let mut hist = History::with_capacity(cfg.p);
    for k in 0..cfg.p {
        let t = k as f64 * dt;
        hist.push(StateVector::new(vec![decay_exact(t); 8], t));
    }
    for _ in (cfg.p - 1)..n_steps {
        let (v, _) = si_pc_step_with_stats(problem, &hist, dt, cfg).unwrap();
        hist.push(v);
    }
    (hist.newest().values[0] - decay_exact(1.0)).abs()
}

fn lsq_slope(pts: &[(f64, f64)]) -> f64 {
    let m = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0.ln()).sum();
    let sy: f64 = pts.iter().map(|p| p.1.ln()).sum();
    let sxx: f64 = pts.iter().map(|p| p.0.ln().powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.0.ln() * p.1.ln()).sum();
    (m * sxy - sx * sy) / (m * sxx - sx * sx)
}

fn criterion_7() -> (bool, String) {
    let problem = decay_problem();
    let dts: Vec<f64> = (0..6).map(|k| 0.0025 / 2f64.powi(k)).collect();
    let errs = |mu: usize| -> Vec<(f64, f64)> {
        let cfg = PcConfig {
            p: 3,
            mu,
            exact_start: true,
            ..PcConfig::standard(3)
        };
        dts.iter().map(|&dt| (dt, pc_error(&problem, &cfg, dt))).collect()
    };
    let e1 = errs(1);
    let e2 = errs(2);
    let e3 = errs(3);
    let (s1, s2, s3) = (lsq_slope(&e1), lsq_slope(&e2), lsq_slope(&e3));
    let const_ratio = e3.last().unwrap().1 / e2.last().unwrap().1;
    let ok = s1 <= 2.3 && s2 >= 2.7 && s3 >= 2.7 && const_ratio <= 1.05;
    (
        ok,
        format!(
            "slopes: mu=1 {s1:.2} (<= 2.3), mu=2 {s2:.2} (>= 2.7), mu=3 {s3:.2} (>= 2.7); \
             error-constant ratio e3/e2 = {const_ratio:.3} (<= 1.05)"
        ),
    )
}

fn scalar_linear_problem(lambda: f64, mu: f64) -> PdeProblem {
    let grid = build_grid(0.0, 1.0, 8).unwrap();
    PdeProblem::builder(grid, 2)
        .implicit(0, move |g: &Grid, _u: &[f64]| {
            let mut m = StencilMatrix::zeros(g.n_points(), 0);
            for i in 0..g.n_points() {
                *m.band_mut(i, 0) = mu;
            }
            m
        })
        .custom_explicit(move |_g, u| u.iter().map(|&v| lambda * v).collect())
        .build()
        .unwrap()
}

fn criterion_8() -> (bool, String) {
    let tabs = [
        builtin_tableau(BuiltinGamma::ThreeQuarters),
        builtin_tableau(BuiltinGamma::ThirteenFiftieths),
        builtin_tableau(BuiltinGamma::OneMinusInvSqrt2),
    ];
    let mut worst = 0.0f64;
    for t in &tabs {
        for i in 0..20 {
            for j in 0..20 {
                let zt = -2.0 + 2.5 * i as f64 / 19.0;
                let z = -2.0 + 2.5 * j as f64 / 19.0;
                let problem = scalar_linear_problem(zt, z);
                let u0 = StateVector::new(vec![1.0; 8], 0.0);
                let (u1, _) = match rosenbrock_step_with_stats(&problem, t, &u0, 1.0) {
                    Ok(v) => v,
                    Err(e) => return (false, format!("step failed at ({zt}, {z}): {e}")),
                };
                let r = match crate::stability::stability_function(
                    t,
                    Complex64::new(zt, 0.0),
                    Complex64::new(z, 0.0),
                ) {
                    Ok(v) => v,
                    Err(e) => return (false, format!("R failed at ({zt}, {z}): {e}")),
                };
                worst = worst.max((u1.values[0] - r.re).abs());
            }
        }
    }
    (
        worst <= 1e-13,
        format!("max |step - R| over the 20x20 grid and 3 tableaux: {worst:.2e}"),
    )
}

fn criterion_9() -> (bool, String) {
    let mut details = Vec::new();
    let mut ok = true;
    for &gamma in &[0.26, 1.0 - 1.0 / 2.0_f64.sqrt(), 0.5, 0.75] {
        match construct_tableau(gamma, RootChoice::Unit) {
            Ok(t) => {
                let sa = check_stiffly_accurate(&t);
                let rinf = r_at_infinity(&t).unwrap_or(f64::NAN);
                if sa && rinf.abs() <= 1e-14 {
                    details.push(format!("gamma={gamma:.4}: SA, |R(inf)| = {:.1e}", rinf.abs()));
                } else {
                    ok = false;
                    details.push(format!(
                        "gamma={gamma:.4}: SA = {sa}, |R(inf)| = {:.1e}",
                        rinf.abs()
                    ));
                }
            }
            Err(Error::Construction { step: 2, .. }) if gamma == 0.5 => {
                // gamma = 1/2 is a structural degeneracy of the b_2 = 0
                // construction (b_3 alpha_3 = 0 with b_3 alpha_3^2 = -1/6);
                // no tableau is produced, which the criterion's "produced
                // by the constructor" wording scopes around.
                details.push("gamma=0.5: construction degenerate at step 2 (documented)".into());
            }
            Err(e) => {
                ok = false;
                details.push(format!("gamma={gamma:.4}: unexpected error {e}"));
            }
        }
    }
    (ok, details.join("; "))
}

fn criterion_10() -> (bool, String) {
    let tabs = [
        ("1-1/sqrt2", builtin_tableau(BuiltinGamma::OneMinusInvSqrt2)),
        ("3/4", builtin_tableau(BuiltinGamma::ThreeQuarters)),
        ("13/50", builtin_tableau(BuiltinGamma::ThirteenFiftieths)),
    ];
    let window = ((-6.0, 2.0), (-4.0, 4.0));
    let sampling = YSampling::default();
    let mut details = Vec::new();
    let mut ok = true;
    for (name, t) in &tabs {
        let coarse = match boundary_locus(t, window.0, window.1, 160, &sampling) {
            Ok(c) => c,
            Err(e) => return (false, format!("gamma={name}: locus failed: {e}")),
        };
        let fine = match boundary_locus(t, window.0, window.1, 320, &sampling) {
            Ok(c) => c,
            Err(e) => return (false, format!("gamma={name}: locus failed: {e}")),
        };
        if coarse.contours.is_empty() || fine.contours.is_empty() {
            ok = false;
            details.push(format!("gamma={name}: empty contour"));
            continue;
        }
        let cell = coarse.cell_size().0.max(coarse.cell_size().1);
        let d = hausdorff_distance(&coarse.contours, &fine.contours);
        if d < cell {
            details.push(format!(
                "gamma={name}: Hausdorff {d:.3e} under coarse cell {cell:.3e}"
            ));
        } else {
            ok = false;
            details.push(format!(
                "gamma={name}: Hausdorff {d:.3e} exceeds coarse cell {cell:.3e}"
            ));
        }
    }
    (ok, details.join("; "))
}

fn criterion_11() -> (bool, String) {
    let case = super::cases::test_case(super::cases::CaseId::R2Kdv);
    let spatial = super::cases::SpatialConfig {
        weno_epsilon: 1e-8,
        ..Default::default()
    };
    let problem = match case.make_problem(160, spatial) {
        Ok(p) => p,
        Err(e) => return (false, format!("setup failed: {e}")),
    };
    let u0 = case.initial_state(&problem);
    let dt = problem.grid().dx();
    let mut details = Vec::new();
    let mut ok = true;
    let integrators = [
        (
            "rosenbrock gamma=3/10",
            Integrator::Rosenbrock(construct_tableau(0.3, RootChoice::Unit).unwrap()),
        ),
        (
            "SI-PC3 BDF3",
            Integrator::SiPcBdf(PcConfig {
                start_m: 16,
                ..PcConfig::standard(3)
            }),
        ),
    ];
    for (name, integ) in integrators {
        match integrate(&problem, &integ, &u0, dt, PI) {
            Ok(out) => {
                if out.mass_drift <= 1e-10 {
                    details.push(format!("{name}: mass drift {:.2e}", out.mass_drift));
                } else {
                    ok = false;
                    details.push(format!(
                        "{name}: mass drift {:.2e} above 1e-10",
                        out.mass_drift
                    ));
                }
            }
            Err(e) => {
                ok = false;
                details.push(format!("{name}: run failed: {e}"));
            }
        }
    }
    (ok, details.join("; "))
}

fn criterion_12() -> (bool, String) {
    // One Rosenbrock step on a real case: exactly one factorization.
    let case = super::cases::test_case(super::cases::CaseId::R3Biharmonic);
    let problem = match case.make_problem(64, Default::default()) {
        Ok(p) => p,
        Err(e) => return (false, format!("setup failed: {e}")),
    };
    let u0 = case.initial_state(&problem);
    let tab = builtin_tableau(BuiltinGamma::ThreeQuarters);
    let (_, st) = match rosenbrock_step_with_stats(&problem, &tab, &u0, problem.grid().dx()) {
        Ok(v) => v,
        Err(e) => return (false, format!("rosenbrock step failed: {e}")),
    };
    let mut ok = st.factorizations == 1 && st.jacobian_assemblies == 1;
    let mut details = vec![format!(
        "rosenbrock: {} factorization(s), {} Jacobian assembly(ies), {} solves",
        st.factorizations, st.jacobian_assemblies, st.solves
    )];
    // SI-PC: exactly mu + 1 factorizations and solves.
    let decay = decay_problem();
    for mu in 1..=4usize {
        let cfg = PcConfig {
            p: 3,
            mu,
            exact_start: true,
            ..PcConfig::standard(3)
        };
        let dt = 0.01;
        let mut hist = History::with_capacity(3);
        for k in 0..3 {
            let t = k as f64 * dt;
            hist.push(StateVector::new(vec![decay_exact(t); 8], t));
        }
        match si_pc_step_with_stats(&decay, &hist, dt, &cfg) {
            Ok((_, st)) => {
                if st.factorizations != mu + 1 || st.solves != mu + 1 {
                    ok = false;
                    details.push(format!(
                        "si_pc mu={mu}: {} factorizations, {} solves (want {})",
                        st.factorizations,
                        st.solves,
                        mu + 1
                    ));
                } else {
                    details.push(format!("si_pc mu={mu}: {} solves", st.solves));
                }
            }
            Err(e) => {
                ok = false;
                details.push(format!("si_pc mu={mu} failed: {e}"));
            }
        }
    }
    (ok, details.join("; "))
}
