//! Fixed-step time integration driver and convergence-study machinery.

use crate::error::{Error, Result};
use crate::multistep::{si_pc_step_with_stats, starting_procedure, History, PcConfig};
use crate::problem::{discrete_norms, ErrorNorms, PdeProblem, StateVector};
use crate::rosenbrock::{rosenbrock_step_with_stats, RosenbrockTableau, StepStats};

use super::cases::{SpatialConfig, TestCase};

/// Time integrator selection for a run.
#[derive(Clone)]
pub enum Integrator {
    Rosenbrock(RosenbrockTableau),
    SiPcBdf(PcConfig),
}

impl Integrator {
    pub fn label(&self) -> String {
        match self {
            Integrator::Rosenbrock(t) => t.label().to_string(),
            Integrator::SiPcBdf(cfg) => format!("SI-PC{} BDF{}", cfg.mu, cfg.p),
        }
    }
}

/// How the step size is chosen from the grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtRule {
    /// `dt = c * dx`.
    FixedRatio(f64),
    /// `dt = cfl * dx / max|f'(u0)|`, falling back to `cfl * dx` for
    /// convection-free problems.
    Cfl(f64),
}

/// `dt = cfl dx / max_fprime`; with `max_fprime = 0` the fixed rule
/// `dt = cfl dx` applies instead.
pub fn timestep_rule(cfl: f64, dx: f64, max_fprime: f64) -> f64 {
    debug_assert!(cfl > 0.0 && dx > 0.0);
    if max_fprime > 0.0 {
        cfl * dx / max_fprime
    } else {
        cfl * dx
    }
}

impl DtRule {
    pub fn dt(&self, problem: &PdeProblem, u0: &StateVector) -> f64 {
        match *self {
            DtRule::FixedRatio(c) => c * problem.grid().dx(),
            DtRule::Cfl(cfl) => timestep_rule(
                cfl,
                problem.grid().dx(),
                problem.flux_derivative_bound(&u0.values),
            ),
        }
    }
}

/// Outcome of one fixed-step integration.
pub struct RunOutcome {
    pub final_state: StateVector,
    pub steps: usize,
    pub stats: StepStats,
    /// Largest relative drift of the discrete mass `dx * sum U_i` seen at
    /// any accepted step.
    pub mass_drift: f64,
}

fn mass(u: &[f64], dx: f64) -> f64 {
    u.iter().sum::<f64>() * dx
}

/// Integrate from `u0` to exactly `t_final`.
///
/// The Rosenbrock path shortens the final step to land on `t_final`; the
/// multistep path, which requires a constant step, instead rounds the
/// step down to `(t_final - t0) / ceil(.../dt)`.
pub fn integrate(
    problem: &PdeProblem,
    integrator: &Integrator,
    u0: &StateVector,
    dt: f64,
    t_final: f64,
) -> Result<RunOutcome> {
    if t_final < u0.time {
        return Err(Error::config("integrate: t_final before initial time"));
    }
    let dx = problem.grid().dx();
    let mass0 = mass(&u0.values, dx);
    let mass_scale = mass0.abs().max(1.0);
    let mut drift = 0.0f64;
    let mut stats = StepStats::default();
    let mut steps = 0usize;

    if t_final == u0.time {
        return Ok(RunOutcome {
            final_state: u0.clone(),
            steps,
            stats,
            mass_drift: drift,
        });
    }
    if !(dt > 0.0) {
        return Err(Error::config(format!("integrate: dt = {dt}")));
    }

    let track = |u: &StateVector, drift: &mut f64| {
        *drift = (*drift).max((mass(&u.values, dx) - mass0).abs() / mass_scale);
    };

    match integrator {
        Integrator::Rosenbrock(tableau) => {
            let mut u = u0.clone();
            loop {
                let remaining = t_final - u.time;
                if remaining <= 0.0 {
                    break;
                }
                let step_dt = if remaining <= dt * (1.0 + 1e-12) {
                    remaining
                } else {
                    dt
                };
                let last = step_dt >= remaining * (1.0 - 1e-12);
                let (next, st) = rosenbrock_step_with_stats(problem, tableau, &u, step_dt)?;
                u = next;
                stats.accumulate(st);
                steps += 1;
                track(&u, &mut drift);
                if last {
                    break;
                }
            }
            u.time = t_final;
            Ok(RunOutcome {
                final_state: u,
                steps,
                stats,
                mass_drift: drift,
            })
        }
        Integrator::SiPcBdf(cfg) => {
            let span = t_final - u0.time;
            let n_steps = ((span / dt - 1e-9).ceil() as usize)
                .max(1)
                .max(cfg.p.saturating_sub(1));
            let dt_run = span / n_steps as f64;
            let hist_states = starting_procedure(problem, u0, dt_run, cfg)?;
            let mut hist = History::with_capacity(cfg.p);
            for s in hist_states.states() {
                track(s, &mut drift);
                hist.push(s.clone());
            }
            for _ in (cfg.p - 1)..n_steps {
                let (v, st) = si_pc_step_with_stats(problem, &hist, dt_run, cfg)?;
                stats.accumulate(st);
                steps += 1;
                track(&v, &mut drift);
                hist.push(v);
            }
            let mut u = hist.newest().clone();
            u.time = t_final;
            Ok(RunOutcome {
                final_state: u,
                steps,
                stats,
                mass_drift: drift,
            })
        }
    }
}

/// Run configuration of a convergence study.
#[derive(Clone)]
pub struct RunConfig {
    pub integrator: Integrator,
    pub spatial: SpatialConfig,
    /// Strictly increasing resolutions, consecutive ratios of 2.
    pub n_list: Vec<usize>,
    pub dt_rule: DtRule,
    /// Overrides the case's default final time.
    pub final_time: Option<f64>,
}

impl RunConfig {
    fn check(&self) -> Result<()> {
        if self.n_list.is_empty() {
            return Err(Error::config("empty resolution list"));
        }
        if !self.n_list.windows(2).all(|w| w[1] == 2 * w[0]) {
            return Err(Error::config(
                "resolution list must double between consecutive entries",
            ));
        }
        Ok(())
    }
}

/// One row of a convergence table.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub n: usize,
    pub norms: Option<ErrorNorms>,
    pub orders: [Option<f64>; 3],
    /// Step-failure diagnostic when the run aborted.
    pub failure: Option<String>,
    pub mass_drift: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub case: String,
    pub scheme: String,
    pub rows: Vec<ConvergenceRow>,
}

/// For each resolution: build the problem, integrate to the final time,
/// and measure the error against the exact solution.
pub fn run_convergence_study(case: &TestCase, cfg: &RunConfig) -> Result<ConvergenceTable> {
    cfg.check()?;
    let t_final = cfg.final_time.unwrap_or(case.final_time);
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for &n in &cfg.n_list {
        let problem = case.make_problem(n, cfg.spatial)?;
        if !problem.has_exact_solution() {
            return Err(Error::config("convergence study needs an exact solution"));
        }
        let u0 = case.initial_state(&problem);
        let dt = cfg.dt_rule.dt(&problem, &u0);
        let row = match integrate(&problem, &cfg.integrator, &u0, dt, t_final) {
            Ok(outcome) => {
                let exact = problem.exact_state(t_final).expect("checked above");
                let err: Vec<f64> = outcome
                    .final_state
                    .values
                    .iter()
                    .zip(exact.values.iter())
                    .map(|(a, b)| a - b)
                    .collect();
                let norms = discrete_norms(&err, problem.grid().dx())?;
                let orders = match rows.last().and_then(|r: &ConvergenceRow| r.norms) {
                    Some(prev) => [
                        order_between(prev.l1, norms.l1),
                        order_between(prev.l2, norms.l2),
                        order_between(prev.linf, norms.linf),
                    ],
                    None => [None, None, None],
                };
                ConvergenceRow {
                    n,
                    norms: Some(norms),
                    orders,
                    failure: None,
                    mass_drift: outcome.mass_drift,
                }
            }
            Err(e) => ConvergenceRow {
                n,
                norms: None,
                orders: [None, None, None],
                failure: Some(e.to_string()),
                mass_drift: f64::NAN,
            },
        };
        rows.push(row);
    }
    Ok(ConvergenceTable {
        case: case.id.name().to_string(),
        scheme: cfg.integrator.label(),
        rows,
    })
}

fn order_between(coarse: f64, fine: f64) -> Option<f64> {
    if coarse > 0.0 && fine > 0.0 {
        Some((coarse / fine).log2())
    } else {
        None
    }
}
