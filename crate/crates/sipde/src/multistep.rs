//! Modified semi-implicit predictor-corrector linear multistep methods
//! (SI-PC^mu BDFp).
//!
//! The predictor is itself semi-implicit (an SI-Euler solve), which keeps
//! the pair unconditionally stable on the stiff implicit part; each of the
//! `mu` corrector passes solves one BDF system with the matrix frozen at
//! the latest iterate,
//!
//! ```text
//! (I - dt b_{-1} B(u*)) v^{n+1} = -sum_j a_j v^{n-j} + dt b_{-1} F(u*)
//! ```
//!
//! for a total of `mu + 1` linear solves per step.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::linalg::factor_shifted;
use crate::problem::{PdeProblem, StateVector};
use crate::rosenbrock::{CoefField, StepStats};

/// History coefficients `a_j` and implicit weight `b_{-1}` of an SI-LM
/// corrector with the convention
/// `v^{n+1} = -sum_{j=0}^{p-1} a_j v^{n-j} + dt b_{-1} H(u*, v^{n+1})`.
#[derive(Debug, Clone)]
pub struct BdfScheme {
    p: usize,
    a: Vec<f64>,
    b_minus1: f64,
    exact_a: Vec<BigRational>,
    exact_b: BigRational,
}

impl BdfScheme {
    pub fn order(&self) -> usize {
        self.p
    }

    pub fn a_coeffs(&self) -> &[f64] {
        &self.a
    }

    pub fn b_minus1(&self) -> f64 {
        self.b_minus1
    }

    pub fn exact_coeffs(&self) -> (&[BigRational], &BigRational) {
        (&self.exact_a, &self.exact_b)
    }

    /// Residual of the linear difference operator on `q(t) = t^deg` at
    /// `t = 0`, step `dt = 1`: zero through `deg <= p` for an order-p BDF.
    pub fn polynomial_residual(&self, deg: u32) -> f64 {
        // v(1) + sum_j a_j v(-j) - b_{-1} q'(1), dt = 1.
        let q = |t: f64| t.powi(deg as i32);
        let dq = |t: f64| {
            if deg == 0 {
                0.0
            } else {
                f64::from(deg) * t.powi(deg as i32 - 1)
            }
        };
        let mut r = q(1.0) - self.b_minus1 * dq(1.0);
        for (j, aj) in self.a.iter().enumerate() {
            r += aj * q(-(j as f64));
        }
        r
    }
}

/// Exact rational coefficients of the classical BDF family, `1 <= p <= 4`.
pub fn bdf_coefficients(p: usize) -> Result<BdfScheme> {
    let rat = |n: i64, d: i64| <BigRational as CoefField>::from_ratio(n, d);
    let (a, b): (Vec<BigRational>, BigRational) = match p {
        1 => (vec![rat(-1, 1)], rat(1, 1)),
        2 => (vec![rat(-4, 3), rat(1, 3)], rat(2, 3)),
        3 => (vec![rat(-18, 11), rat(9, 11), rat(-2, 11)], rat(6, 11)),
        4 => (
            vec![rat(-48, 25), rat(36, 25), rat(-16, 25), rat(3, 25)],
            rat(12, 25),
        ),
        _ => {
            return Err(Error::config(format!(
                "bdf_coefficients: order {p} outside 1..=4"
            )))
        }
    };
    let scheme = BdfScheme {
        p,
        a: a.iter().map(|v| CoefField::to_f64(v)).collect(),
        b_minus1: CoefField::to_f64(&b),
        exact_a: a,
        exact_b: b,
    };
    // Exactness on polynomials up to degree p.
    for deg in 0..=p as u32 {
        debug_assert!(
            scheme.polynomial_residual(deg).abs() < 1e-12,
            "BDF{p} fails degree {deg}"
        );
    }
    Ok(scheme)
}

/// Ring of the most recent states, oldest first, uniformly spaced.
#[derive(Debug, Clone, Default)]
pub struct History {
    states: Vec<StateVector>,
    capacity: usize,
}

impl History {
    pub fn with_capacity(capacity: usize) -> Self {
        History {
            states: Vec::new(),
            capacity,
        }
    }

    pub fn from_states(states: Vec<StateVector>) -> Self {
        History {
            capacity: states.len(),
            states,
        }
    }

    pub fn push(&mut self, s: StateVector) {
        self.states.push(s);
        if self.states.len() > self.capacity {
            self.states.remove(0);
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn newest(&self) -> &StateVector {
        self.states.last().expect("empty history")
    }

    /// `v^{n-j}`: the state `j` steps back from the newest.
    pub fn back(&self, j: usize) -> &StateVector {
        &self.states[self.states.len() - 1 - j]
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }
}

/// Which predictor opens each SI-PC step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Predictor {
    /// One SI-Euler solve (order 1).
    #[default]
    SiEuler,
    /// SI-Euler followed by one SI-BDFq correction for q = 2..p-1,
    /// giving an order p-1 prediction in p-1 solves.
    Chain,
}

/// Configuration of an SI-PC^mu BDFp integrator.
#[derive(Debug, Clone, Copy)]
pub struct PcConfig {
    /// Corrector order p (1..=4).
    pub p: usize,
    /// Corrector iterations per step (>= 1).
    pub mu: usize,
    pub predictor: Predictor,
    /// Step-reduction factor of the starting procedure.
    pub start_m: usize,
    /// Start from exact-solution samples instead of the numerical
    /// starting procedure (requires an exact solution).
    pub exact_start: bool,
}

impl PcConfig {
    /// The configuration used in the convergence tables: SI-Euler
    /// predictor with `mu = p` corrections.
    pub fn standard(p: usize) -> Self {
        PcConfig {
            p,
            mu: p.max(1),
            predictor: Predictor::SiEuler,
            start_m: 4,
            exact_start: false,
        }
    }

    fn check(&self) -> Result<()> {
        if !(1..=4).contains(&self.p) {
            return Err(Error::config(format!("corrector order p = {}", self.p)));
        }
        if self.mu < 1 {
            return Err(Error::config("mu must be at least 1"));
        }
        if !matches!(self.start_m, 1 | 2 | 4 | 8 | 16) {
            return Err(Error::config(format!(
                "start_m = {} not in {{1, 2, 4, 8, 16}}",
                self.start_m
            )));
        }
        Ok(())
    }
}

/// Semi-implicit Euler predictor:
/// `(I - dt B(u^n)) u* = u^n + dt F(u^n)`, one factorization, one solve.
/// The explicit data (including any source) is frozen at `t_n`.
pub fn si_euler_predictor(
    problem: &PdeProblem,
    u_n: &StateVector,
    dt: f64,
) -> Result<StateVector> {
    si_euler_predictor_with_stats(problem, u_n, dt).map(|(u, _)| u)
}

pub fn si_euler_predictor_with_stats(
    problem: &PdeProblem,
    u_n: &StateVector,
    dt: f64,
) -> Result<(StateVector, StepStats)> {
    if !(dt > 0.0) {
        return Err(Error::config(format!("si_euler_predictor: dt = {dt}")));
    }
    let mut stats = StepStats::default();
    let b = problem.b_matrix(&u_n.values)?;
    stats.rhs_assemblies += 1;
    let f = problem.f_explicit(&u_n.values, u_n.time)?;
    let rhs: Vec<f64> = u_n
        .values
        .iter()
        .zip(f.iter())
        .map(|(u, fv)| u + dt * fv)
        .collect();
    let fact = factor_shifted(&b, dt)
        .map_err(|e| Error::StepFailure(format!("predictor factorization failed: {e}")))?;
    stats.factorizations += 1;
    let out = fact
        .solve(&rhs)
        .map_err(|e| Error::StepFailure(format!("predictor solve failed: {e}")))?;
    stats.solves += 1;
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::StepFailure("non-finite predictor output".into()));
    }
    Ok((StateVector::new(out, u_n.time + dt), stats))
}

/// One SI-BDF corrector solve with the matrix and explicit data frozen at
/// the predictor iterate `u*`; the source inside `F` is evaluated at the
/// new time `t_{n+1}`.
pub fn si_bdf_correct(
    problem: &PdeProblem,
    hist: &History,
    u_star: &StateVector,
    dt: f64,
    scheme: &BdfScheme,
) -> Result<StateVector> {
    si_bdf_correct_with_stats(problem, hist, u_star, dt, scheme).map(|(u, _)| u)
}

pub fn si_bdf_correct_with_stats(
    problem: &PdeProblem,
    hist: &History,
    u_star: &StateVector,
    dt: f64,
    scheme: &BdfScheme,
) -> Result<(StateVector, StepStats)> {
    let p = scheme.order();
    if hist.len() < p {
        return Err(Error::config(format!(
            "si_bdf_correct: history holds {} states, BDF{p} needs {p}",
            hist.len()
        )));
    }
    let n = problem.grid().n_points();
    if u_star.len() != n {
        return Err(Error::config("si_bdf_correct: predictor length mismatch"));
    }
    let mut stats = StepStats::default();
    let t_new = hist.newest().time + dt;

    let b = problem.b_matrix(&u_star.values)?;
    stats.rhs_assemblies += 1;
    let f = problem.f_explicit(&u_star.values, t_new)?;

    let mut rhs = vec![0.0; n];
    for (j, aj) in scheme.a_coeffs().iter().enumerate() {
        let vj = &hist.back(j).values;
        for (r, v) in rhs.iter_mut().zip(vj.iter()) {
            *r -= aj * v;
        }
    }
    let w = dt * scheme.b_minus1();
    for (r, fv) in rhs.iter_mut().zip(f.iter()) {
        *r += w * fv;
    }

    let fact = factor_shifted(&b, w)
        .map_err(|e| Error::StepFailure(format!("corrector factorization failed: {e}")))?;
    stats.factorizations += 1;
    let out = fact
        .solve(&rhs)
        .map_err(|e| Error::StepFailure(format!("corrector solve failed: {e}")))?;
    stats.solves += 1;
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::StepFailure("non-finite corrector output".into()));
    }
    Ok((StateVector::new(out, t_new), stats))
}

/// One SI-PC^mu BDFp step: predictor once, then `mu` corrector passes,
/// each re-assembling and re-factoring with the latest iterate; `mu + 1`
/// linear solves in total (SI-Euler predictor).
pub fn si_pc_step(
    problem: &PdeProblem,
    hist: &History,
    dt: f64,
    cfg: &PcConfig,
) -> Result<StateVector> {
    si_pc_step_with_stats(problem, hist, dt, cfg).map(|(u, _)| u)
}

pub fn si_pc_step_with_stats(
    problem: &PdeProblem,
    hist: &History,
    dt: f64,
    cfg: &PcConfig,
) -> Result<(StateVector, StepStats)> {
    cfg.check()?;
    if hist.len() < cfg.p {
        return Err(Error::config(format!(
            "si_pc_step: history holds {} states, BDF{} needs {}",
            hist.len(),
            cfg.p,
            cfg.p
        )));
    }
    let mut stats = StepStats::default();
    let scheme = bdf_coefficients(cfg.p)?;

    let mut u_star = {
        let (u, st) = si_euler_predictor_with_stats(problem, hist.newest(), dt)?;
        stats.accumulate(st);
        u
    };
    if cfg.predictor == Predictor::Chain {
        for q in 2..cfg.p {
            let sub = bdf_coefficients(q)?;
            let (u, st) = si_bdf_correct_with_stats(problem, hist, &u_star, dt, &sub)?;
            stats.accumulate(st);
            u_star = u;
        }
    }
    for _ in 0..cfg.mu {
        let (u, st) = si_bdf_correct_with_stats(problem, hist, &u_star, dt, &scheme)?;
        stats.accumulate(st);
        u_star = u;
    }
    Ok((u_star, stats))
}

/// Build the `p` starting values at spacing `dt` (including `u0`):
/// recursively runs SI-PC of order `p-1` with stepsize `dt / m`,
/// sub-stepping `m` times per history slot, or samples the exact
/// solution when `cfg.exact_start` is set.
pub fn starting_procedure(
    problem: &PdeProblem,
    u0: &StateVector,
    dt: f64,
    cfg: &PcConfig,
) -> Result<History> {
    cfg.check()?;
    if cfg.exact_start {
        if !problem.has_exact_solution() {
            return Err(Error::config(
                "exact_start requested but the problem has no exact solution",
            ));
        }
        let states = (0..cfg.p)
            .map(|k| {
                problem
                    .exact_state(u0.time + k as f64 * dt)
                    .expect("exact solution checked above")
            })
            .collect();
        return Ok(History::from_states(states));
    }
    numerical_start(problem, u0, dt, cfg.p, cfg.start_m)
}

fn numerical_start(
    problem: &PdeProblem,
    u0: &StateVector,
    dt: f64,
    p: usize,
    m: usize,
) -> Result<History> {
    if p == 1 {
        return Ok(History::from_states(vec![u0.clone()]));
    }
    let sub_dt = dt / m as f64;
    let inner_p = p - 1;
    // History for the inner order-(p-1) method at spacing sub_dt.
    let mut inner = numerical_start(problem, u0, sub_dt, inner_p, m)?;
    let inner_cfg = PcConfig {
        p: inner_p,
        mu: inner_p.max(1),
        predictor: Predictor::SiEuler,
        start_m: m,
        exact_start: false,
    };
    let mut produced = vec![u0.clone()];
    let mut steps_done = inner_p - 1; // inner history already spans these
    for k in 1..p {
        while steps_done < k * m {
            let v = si_pc_step(problem, &inner, sub_dt, &inner_cfg)?;
            inner.push(v);
            steps_done += 1;
        }
        let mut s = inner.newest().clone();
        // Pin the slot time exactly; sub-stepping accumulates rounding.
        s.time = u0.time + k as f64 * dt;
        produced.push(s);
    }
    Ok(History::from_states(produced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{build_grid, Grid, PdeProblem};
    use crate::spatial::{second_derivative, StencilMatrix};
    use std::f64::consts::PI;

    /// Scalar ODE embedded on a small grid: dU/dt = F(U) + diag(b(U)) U.
    fn scalar_problem(
        b_of_u: impl Fn(f64) -> f64 + Send + Sync + Copy + 'static,
        f_of_u: Option<fn(f64) -> f64>,
    ) -> PdeProblem {
        let grid = build_grid(0.0, 1.0, 8).unwrap();
        let mut builder = PdeProblem::builder(grid, 2).implicit(0, move |g: &Grid, u: &[f64]| {
            let mut m = StencilMatrix::zeros(g.n_points(), 0);
            for i in 0..g.n_points() {
                *m.band_mut(i, 0) = b_of_u(u[i]);
            }
            m
        });
        if let Some(f) = f_of_u {
            builder = builder.custom_explicit(move |_g, u| u.iter().map(|&v| f(v)).collect());
        }
        builder.build().unwrap()
    }

    /// u' = -(1 + u^2) u, exact u(t) = u0 e^{-t} / sqrt(1 + u0^2 (1 - e^{-2t})).
    fn decay_exact(u0: f64, t: f64) -> f64 {
        u0 * (-t).exp() / (1.0 + u0 * u0 * (1.0 - (-2.0 * t).exp())).sqrt()
    }

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
            .exact_solution(|_x, t| decay_exact(1.0, t))
            .build()
            .unwrap()
    }

    fn constant_state(problem: &PdeProblem, v: f64, t: f64) -> StateVector {
        StateVector::new(vec![v; problem.grid().n_points()], t)
    }

    #[test]
    fn bdf_coefficient_table() {
        let b1 = bdf_coefficients(1).unwrap();
        assert_eq!(b1.a_coeffs(), &[-1.0]);
        assert_eq!(b1.b_minus1(), 1.0);
        let b3 = bdf_coefficients(3).unwrap();
        assert!((b3.a_coeffs()[0] + 18.0 / 11.0).abs() < 1e-15);
        assert!((b3.a_coeffs()[1] - 9.0 / 11.0).abs() < 1e-15);
        assert!((b3.a_coeffs()[2] + 2.0 / 11.0).abs() < 1e-15);
        assert!((b3.b_minus1() - 6.0 / 11.0).abs() < 1e-15);
        assert!(bdf_coefficients(0).is_err());
        assert!(bdf_coefficients(5).is_err());
    }

    #[test]
    fn bdf_polynomial_exactness() {
        for p in 1..=4usize {
            let s = bdf_coefficients(p).unwrap();
            for deg in 0..=p as u32 {
                assert!(
                    s.polynomial_residual(deg).abs() < 1e-13,
                    "BDF{p} degree {deg}: {}",
                    s.polynomial_residual(deg)
                );
            }
            // Degree p+1 must not be annihilated.
            assert!(s.polynomial_residual(p as u32 + 1).abs() > 1e-3);
        }
    }

    #[test]
    fn si_euler_identity_without_dynamics() {
        let problem = scalar_problem(|_| 0.0, None);
        let u = constant_state(&problem, 0.7, 0.0);
        let out = si_euler_predictor(&problem, &u, 0.25).unwrap();
        assert_eq!(out.values, u.values);
        assert_eq!(out.time, 0.25);
    }

    #[test]
    fn si_euler_scalar_stability_action() {
        // u* = (1 + dt lambda) / (1 - dt mu) u^n, the one-stage gamma = 1
        // stability function on H = lambda u + mu v.
        let (lambda, mu, dt) = (0.3, -2.0, 0.37);
        let problem = scalar_problem(move |_| mu, Some(|u| 0.3 * u));
        let u = constant_state(&problem, 1.0, 0.0);
        let out = si_euler_predictor(&problem, &u, dt).unwrap();
        let want = (1.0 + dt * lambda) / (1.0 - dt * mu);
        for v in &out.values {
            assert!((v - want).abs() < 1e-14);
        }
    }

    #[test]
    fn si_euler_unconditional_damping_on_stiff_heat() {
        let n = 64;
        let grid = build_grid(-PI, PI, n).unwrap();
        let dt = 100.0 * grid.dx() * grid.dx();
        let problem = PdeProblem::builder(grid, 2)
            .implicit(1, |g: &Grid, _u: &[f64]| second_derivative(g, 2).unwrap())
            .build()
            .unwrap();
        let u0 = StateVector::new(
            problem.grid().sample(|x| x.sin() + 0.5 * (3.0 * x).cos()),
            0.0,
        );
        let out = si_euler_predictor(&problem, &u0, dt).unwrap();
        let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let l2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(sup(&out.values) <= sup(&u0.values) + 1e-13);
        assert!(l2(&out.values) <= l2(&u0.values) + 1e-13);
    }

    #[test]
    fn corrector_reproduces_polynomials_exactly() {
        // Pure-source problem u' = q'(t): the corrector is the raw linear
        // difference operator, exact on polynomials of degree <= p.
        for p in 1..=4usize {
            let scheme = bdf_coefficients(p).unwrap();
            let q = move |t: f64| {
                (0..=p as i32).map(|d| 0.3 * (d as f64 + 1.0) * t.powi(d)).sum::<f64>()
            };
            let dq = move |t: f64| {
                (1..=p as i32)
                    .map(|d| 0.3 * (d as f64 + 1.0) * d as f64 * t.powi(d - 1))
                    .sum::<f64>()
            };
            let grid = build_grid(0.0, 1.0, 8).unwrap();
            let problem = PdeProblem::builder(grid, 2)
                .implicit(0, |g: &Grid, _u: &[f64]| StencilMatrix::zeros(g.n_points(), 0))
                .source(move |_x, t| dq(t))
                .build()
                .unwrap();
            let dt = 0.17;
            let states: Vec<StateVector> = (0..p)
                .map(|k| {
                    let t = k as f64 * dt;
                    StateVector::new(vec![q(t); 8], t)
                })
                .collect();
            let hist = History::from_states(states);
            let u_star = constant_state(&problem, 0.0, p as f64 * dt); // ignored: H has no u-dependence
            let out = si_bdf_correct(&problem, &hist, &u_star, dt, &scheme).unwrap();
            let want = q(p as f64 * dt);
            for v in &out.values {
                assert!(
                    (v - want).abs() < 1e-12 * want.abs().max(1.0),
                    "BDF{p}: {v} vs {want}"
                );
            }
        }
    }

    #[test]
    fn bdf3_matches_scalar_recurrence_oracle() {
        // Constant-coefficient stiff scalar problem: the corrector output
        // follows the classical BDF3 recurrence whatever the predictor.
        let mu = -40.0;
        let problem = scalar_problem(move |_| mu, None);
        let scheme = bdf_coefficients(3).unwrap();
        let dt = 0.1;
        let mut vals = vec![1.0, 0.9, 0.85];
        let mut hist = History::from_states(
            vals.iter()
                .enumerate()
                .map(|(k, &v)| constant_state(&problem, v, k as f64 * dt))
                .collect(),
        );
        for step in 0..20 {
            let n = vals.len();
            let want = (18.0 / 11.0 * vals[n - 1] - 9.0 / 11.0 * vals[n - 2]
                + 2.0 / 11.0 * vals[n - 3])
                / (1.0 - 6.0 / 11.0 * dt * mu);
            let u_star = si_euler_predictor(&problem, hist.newest(), dt).unwrap();
            let out = si_bdf_correct(&problem, &hist, &u_star, dt, &scheme).unwrap();
            for v in &out.values {
                assert!((v - want).abs() < 1e-13, "step {step}");
            }
            vals.push(want);
            hist.push(out);
        }
    }

    #[test]
    fn corrector_rejects_short_history() {
        let problem = scalar_problem(|_| -1.0, None);
        let scheme = bdf_coefficients(3).unwrap();
        let hist = History::from_states(vec![
            constant_state(&problem, 1.0, 0.0),
            constant_state(&problem, 0.9, 0.1),
        ]);
        let u_star = constant_state(&problem, 0.8, 0.2);
        assert!(si_bdf_correct(&problem, &hist, &u_star, 0.1, &scheme).is_err());
    }

    #[test]
    fn pc_step_rejects_mu_zero_and_counts_solves() {
        let problem = decay_problem();
        let cfg = PcConfig {
            p: 3,
            mu: 0,
            ..PcConfig::standard(3)
        };
        let hist = History::from_states(
            (0..3)
                .map(|k| constant_state(&problem, decay_exact(1.0, 0.05 * k as f64), 0.05 * k as f64))
                .collect(),
        );
        assert!(si_pc_step(&problem, &hist, 0.05, &cfg).is_err());

        for mu in 1..=4usize {
            let cfg = PcConfig {
                p: 3,
                mu,
                ..PcConfig::standard(3)
            };
            let (_, stats) = si_pc_step_with_stats(&problem, &hist, 0.05, &cfg).unwrap();
            assert_eq!(stats.factorizations, mu + 1, "mu = {mu}");
            assert_eq!(stats.solves, mu + 1);
        }
    }

    /// Least-squares slope of ln(err) against ln(dt).
    fn convergence_slope(errs: &[(f64, f64)]) -> f64 {
        let m = errs.len() as f64;
        let sx: f64 = errs.iter().map(|p| p.0.ln()).sum();
        let sy: f64 = errs.iter().map(|p| p.1.ln()).sum();
        let sxx: f64 = errs.iter().map(|p| p.0.ln().powi(2)).sum();
        let sxy: f64 = errs.iter().map(|p| p.0.ln() * p.1.ln()).sum();
        (m * sxy - sx * sy) / (m * sxx - sx * sx)
    }

    fn pc_error_at_t1(problem: &PdeProblem, cfg: &PcConfig, dt: f64) -> f64 {
        // Exact starting values isolate the per-step order.
        let n_steps = (1.0 / dt).round() as usize;
        let dt = 1.0 / n_steps as f64;
        let u0 = constant_state(problem, 1.0, 0.0);
        let mut hist = History::with_capacity(cfg.p);
        for k in 0..cfg.p {
            let t = k as f64 * dt;
            hist.push(constant_state(problem, decay_exact(1.0, t), t));
        }
        for _ in (cfg.p - 1)..n_steps {
            let v = si_pc_step(problem, &hist, dt, cfg).unwrap();
            hist.push(v);
        }
        let _ = u0;
        (hist.newest().values[0] - decay_exact(1.0, 1.0)).abs()
    }

    #[test]
    fn correction_count_controls_observed_order() {
        // SI-Euler predictor (p* = 1) with a BDF3 corrector on the
        // nonlinear decay problem: mu = 1 leaves order ~2, mu = 2 restores
        // order 3, mu = 3 also recovers the corrector's error constant.
        // The ladder starts at dt = 2.5e-3: coarser steps sit before a
        // sign change of the mu = 1 error and superconverge.
        let problem = decay_problem();
        let dts: Vec<f64> = (0..6).map(|k| 0.0025 / 2f64.powi(k)).collect();
        let errs = |mu: usize| -> Vec<(f64, f64)> {
            let cfg = PcConfig {
                p: 3,
                mu,
                exact_start: true,
                ..PcConfig::standard(3)
            };
            dts.iter().map(|&dt| (dt, pc_error_at_t1(&problem, &cfg, dt))).collect()
        };
        let s1 = convergence_slope(&errs(1));
        let s2 = convergence_slope(&errs(2));
        let s3 = convergence_slope(&errs(3));
        assert!((1.7..=2.3).contains(&s1), "mu=1 slope {s1:.2}");
        assert!(s2 >= 2.8, "mu=2 slope {s2:.2}");
        assert!(s3 >= 2.8, "mu=3 slope {s3:.2}");
        // Third correction must not be worse than the second.
        let e2 = errs(2).last().unwrap().1;
        let e3 = errs(3).last().unwrap().1;
        assert!(e3 <= e2 * 1.05, "e3 = {e3:.3e} vs e2 = {e2:.3e}");
    }

    #[test]
    fn chain_predictor_reaches_corrector_order_with_one_correction() {
        // Order p-1 chain predictor, mu = 1: Proposition-1 case p* = p-1.
        let problem = decay_problem();
        let dts = [0.1, 0.05, 0.025, 0.0125];
        let cfg = PcConfig {
            p: 3,
            mu: 1,
            predictor: Predictor::Chain,
            exact_start: true,
            start_m: 4,
        };
        let errs: Vec<(f64, f64)> = dts
            .iter()
            .map(|&dt| (dt, pc_error_at_t1(&problem, &cfg, dt)))
            .collect();
        let s = convergence_slope(&errs);
        assert!(s >= 2.7, "chain predictor slope {s:.2}");
    }

    #[test]
    fn starting_procedure_trivial_and_accuracy() {
        let problem = decay_problem();
        let u0 = constant_state(&problem, 1.0, 0.0);

        let cfg1 = PcConfig::standard(1);
        let h = starting_procedure(&problem, &u0, 0.1, &cfg1).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.newest().values, u0.values);

        // p = 3: the recursion bottoms out at an order-1 starter, so the
        // slot accuracy is O(dt^2 / m^3) + O(dt^3 / m^2); m = 4 keeps it
        // well under dt^2, m = 16 under dt^3.
        let dt = 0.05;
        let cfg3 = PcConfig {
            start_m: 4,
            ..PcConfig::standard(3)
        };
        let h4 = starting_procedure(&problem, &u0, dt, &cfg3).unwrap();
        assert_eq!(h4.len(), 3);
        for (k, s) in h4.states().iter().enumerate() {
            let want = decay_exact(1.0, k as f64 * dt);
            let err = (s.values[0] - want).abs();
            assert!(
                err < dt * dt / 4.0,
                "slot {k}: err {err:.3e} vs dt^2/4 {:.3e}",
                dt * dt / 4.0
            );
            assert!((s.time - k as f64 * dt).abs() < 1e-15);
        }
        let cfg16 = PcConfig {
            start_m: 16,
            ..PcConfig::standard(3)
        };
        let h16 = starting_procedure(&problem, &u0, dt, &cfg16).unwrap();
        for (k, s) in h16.states().iter().enumerate().skip(1) {
            let want = decay_exact(1.0, k as f64 * dt);
            let err = (s.values[0] - want).abs();
            let err4 = (h4.states()[k].values[0] - want).abs();
            assert!(err < dt.powi(3), "slot {k} at m=16: {err:.3e}");
            assert!(err < err4, "m=16 must beat m=4 at slot {k}");
        }

        // Exact start samples the exact solution directly.
        let cfg_exact = PcConfig {
            exact_start: true,
            ..cfg3
        };
        let h = starting_procedure(&problem, &u0, dt, &cfg_exact).unwrap();
        for (k, s) in h.states().iter().enumerate() {
            assert!((s.values[0] - decay_exact(1.0, k as f64 * dt)).abs() < 1e-15);
        }

        // m = 16 (largest documented reduction factor) also runs at p = 4.
        let cfg16_p4 = PcConfig {
            start_m: 16,
            ..PcConfig::standard(4)
        };
        assert!(starting_procedure(&problem, &u0, dt, &cfg16_p4).is_ok());
        // Odd factors are not.
        let bad = PcConfig {
            start_m: 3,
            ..PcConfig::standard(3)
        };
        assert!(starting_procedure(&problem, &u0, dt, &bad).is_err());
    }
}
