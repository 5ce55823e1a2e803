//! Semi-implicit Rosenbrock-type integrators.
//!
//! One step of the s-stage scheme solves, with the Jacobian
//! `J = B(U^n)` assembled and factored once,
//!
//! ```text
//! (I - dt g J) K^i = dt [ F(U^i) + B(U^i) Vb^i + J sum_{j<i} gamma_ij K^j ]
//! U^i  = U^n + sum_{j<i} a~_ij K^j
//! Vb^i = U^n + sum_{j<i} alpha_ij K^j
//! U^{n+1} = U^n + sum_i b_i K^i
//! ```
//!
//! so a step costs one factorization and s banded solves. The companion
//! [`si_rk_step`] implements the plain SI Runge-Kutta form, which
//! refactors `I - dt a_ii B(U^i)` at every stage.

mod conditions;
mod construct;
mod field;
mod io;
mod tableau;

pub use conditions::{OrderConditionReport, FLOAT_RESIDUAL_TOL};
pub use construct::RootChoice;
pub use field::CoefField;
pub use io::{export_tableau, import_tableau};
pub use tableau::{RosenbrockTableau, TableauData};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::linalg::factor_shifted;
use crate::problem::{PdeProblem, StateVector};

/// The three diagonal coefficients with first-class support.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuiltinGamma {
    /// `gamma = 3/4`, the fully worked scheme with exact rational
    /// coefficients.
    ThreeQuarters,
    /// `gamma = 13/50`, constructed in exact rational arithmetic.
    ThirteenFiftieths,
    /// `gamma = 1 - 1/sqrt(2)`, constructed in f64.
    OneMinusInvSqrt2,
}

fn rat(n: i64, d: i64) -> BigRational {
    <BigRational as CoefField>::from_ratio(n, d)
}

/// The four-stage, third-order, L-stable scheme with `gamma = 3/4`,
/// stated with its exact rational coefficients.
pub fn scheme_gamma_three_quarters() -> RosenbrockTableau {
    let data = TableauData {
        gamma: rat(3, 4),
        a_tilde: vec![
            vec![],
            vec![rat(3, 13)],
            vec![rat(5, 3), rat(0, 1)],
            vec![rat(1063, 1485), rat(52, 297), rat(6, 55)],
        ],
        alpha: vec![
            vec![],
            vec![rat(3, 2)],
            vec![rat(0, 1), rat(5, 3)],
            vec![rat(0, 1), rat(1, 1), rat(0, 1)],
        ],
        gamma_mat: vec![
            vec![],
            vec![rat(-255, 52)],
            vec![rat(125, 54), rat(-115, 108)],
            vec![rat(2, 5), rat(-1, 1), rat(-3, 20)],
        ],
        b: vec![rat(2, 5), rat(0, 1), rat(-3, 20), rat(3, 4)],
    };
    RosenbrockTableau::from_exact(data, "si-rosenbrock gamma=3/4")
}

/// Construct the third-order scheme for an arbitrary `gamma >= 1/4` in
/// f64 arithmetic.
pub fn construct_tableau(gamma: f64, choice: RootChoice) -> Result<RosenbrockTableau> {
    let data = construct::construct_third_order(gamma, choice)?;
    let t = RosenbrockTableau::from_f64(data, format!("si-rosenbrock gamma={gamma}"));
    debug_assert!(
        choice != RootChoice::Unit || validate_order_conditions(&t).satisfied_order == 3
    );
    Ok(t)
}

/// Construct the third-order scheme for a rational `gamma >= 1/4` in
/// exact arithmetic.
pub fn construct_tableau_exact(
    gamma: BigRational,
    choice: RootChoice,
) -> Result<RosenbrockTableau> {
    let label = format!("si-rosenbrock gamma={gamma}");
    let data = construct::construct_third_order(gamma, choice)?;
    Ok(RosenbrockTableau::from_exact(data, label))
}

/// One of the three schemes used throughout the convergence tables.
pub fn builtin_tableau(which: BuiltinGamma) -> RosenbrockTableau {
    match which {
        BuiltinGamma::ThreeQuarters => scheme_gamma_three_quarters(),
        BuiltinGamma::ThirteenFiftieths => {
            construct_tableau_exact(rat(13, 50), RootChoice::Unit)
                .expect("gamma = 13/50 construction is regular")
        }
        BuiltinGamma::OneMinusInvSqrt2 => {
            construct_tableau(1.0 - 1.0 / 2.0_f64.sqrt(), RootChoice::Unit)
                .expect("gamma = 1 - 1/sqrt(2) construction is regular")
        }
    }
}

/// Evaluate all order conditions, in exact rational arithmetic when the
/// tableau carries its exact form.
pub fn validate_order_conditions(t: &RosenbrockTableau) -> OrderConditionReport {
    match t.exact() {
        Some(exact) => conditions::report_from_residuals(
            conditions::order_condition_residuals(exact),
            true,
        ),
        None => conditions::report_from_residuals(
            conditions::order_condition_residuals(t.data()),
            false,
        ),
    }
}

/// Whether the last stage coincides with the step output
/// (`beta_si = b_i`, `sum alpha_s = 1`), which forces `R(zt, inf) = 0`.
pub fn check_stiffly_accurate(t: &RosenbrockTableau) -> bool {
    match t.exact() {
        Some(exact) => exact.is_stiffly_accurate(),
        None => t.data().is_stiffly_accurate(),
    }
}

/// Work counters for a single step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub factorizations: usize,
    pub solves: usize,
    /// Assemblies of the solver matrix (the frozen Jacobian).
    pub jacobian_assemblies: usize,
    /// Assemblies of `B(U^i)` for stage right-hand sides.
    pub rhs_assemblies: usize,
}

impl StepStats {
    pub fn accumulate(&mut self, o: StepStats) {
        self.factorizations += o.factorizations;
        self.solves += o.solves;
        self.jacobian_assemblies += o.jacobian_assemblies;
        self.rhs_assemblies += o.rhs_assemblies;
    }
}

fn combine(base: &[f64], terms: &[(f64, &Vec<f64>)]) -> Vec<f64> {
    let mut out = base.to_vec();
    for (w, v) in terms {
        if *w != 0.0 {
            for (o, x) in out.iter_mut().zip(v.iter()) {
                *o += w * x;
            }
        }
    }
    out
}

/// Advance one step of the SI Rosenbrock scheme.
pub fn rosenbrock_step(
    problem: &PdeProblem,
    t: &RosenbrockTableau,
    u_n: &StateVector,
    dt: f64,
) -> Result<StateVector> {
    rosenbrock_step_with_stats(problem, t, u_n, dt).map(|(u, _)| u)
}

pub fn rosenbrock_step_with_stats(
    problem: &PdeProblem,
    t: &RosenbrockTableau,
    u_n: &StateVector,
    dt: f64,
) -> Result<(StateVector, StepStats)> {
    if !(dt > 0.0) {
        return Err(Error::config(format!("rosenbrock_step: dt = {dt}")));
    }
    if !u_n.is_finite() {
        return Err(Error::StepFailure("non-finite state entering step".into()));
    }
    let s = t.stages();
    let mut stats = StepStats::default();

    let jac = problem.b_matrix(&u_n.values)?;
    stats.jacobian_assemblies += 1;
    let fact = factor_shifted(&jac, dt * t.gamma()).map_err(|e| {
        Error::StepFailure(format!("stage system factorization failed: {e}"))
    })?;
    stats.factorizations += 1;

    let mut ks: Vec<Vec<f64>> = Vec::with_capacity(s);
    for i in 0..s {
        let a_row: Vec<(f64, &Vec<f64>)> = (0..i).map(|j| (t.a_tilde(i, j), &ks[j])).collect();
        let u_i = combine(&u_n.values, &a_row);
        let al_row: Vec<(f64, &Vec<f64>)> = (0..i).map(|j| (t.alpha(i, j), &ks[j])).collect();
        let v_i = combine(&u_n.values, &al_row);

        let stage_time = u_n.time + t.c_tilde(i) * dt;
        let mut rhs = problem.f_explicit(&u_i, stage_time)?;

        // H(U^i, Vb^i) = F(U^i) + B(U^i) Vb^i with B frozen at the
        // explicit stage data; stage 1 reuses the Jacobian since U^1 = U^n.
        let bv = if i == 0 {
            jac.matvec(&v_i)
        } else {
            let b_i = problem.b_matrix(&u_i)?;
            stats.rhs_assemblies += 1;
            b_i.matvec(&v_i)
        };
        for (r, v) in rhs.iter_mut().zip(bv.iter()) {
            *r += v;
        }

        // J sum_{j<i} gamma_ij K^j
        let mut jk_comb = vec![0.0; u_n.len()];
        let mut any = false;
        for j in 0..i {
            let g = t.gamma_mat(i, j);
            if g != 0.0 {
                any = true;
                for (acc, k) in jk_comb.iter_mut().zip(ks[j].iter()) {
                    *acc += g * k;
                }
            }
        }
        if any {
            let jk = jac.matvec(&jk_comb);
            for (r, v) in rhs.iter_mut().zip(jk.iter()) {
                *r += v;
            }
        }

        for r in rhs.iter_mut() {
            *r *= dt;
        }
        let k = fact
            .solve(&rhs)
            .map_err(|e| Error::StepFailure(format!("stage solve failed: {e}")))?;
        stats.solves += 1;
        ks.push(k);
    }

    let weights: Vec<(f64, &Vec<f64>)> = (0..s).map(|i| (t.b()[i], &ks[i])).collect();
    let out = combine(&u_n.values, &weights);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::StepFailure("non-finite state after step".into()));
    }
    Ok((StateVector::new(out, u_n.time + dt), stats))
}

/// Double Butcher tableau of a plain SI Runge-Kutta method: explicit
/// part `a~` (strictly lower), DIRK implicit part `a` (lower triangular
/// including the diagonal), shared weights `b`.
#[derive(Debug, Clone)]
pub struct DoubleButcherTableau {
    pub a_tilde: Vec<Vec<f64>>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl DoubleButcherTableau {
    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// The one-stage SI-Euler scheme.
    pub fn si_euler() -> Self {
        DoubleButcherTableau {
            a_tilde: vec![vec![]],
            a: vec![vec![1.0]],
            b: vec![1.0],
        }
    }

    fn check(&self) -> Result<()> {
        let s = self.stages();
        let lower_ok = self.a_tilde.len() == s
            && self.a_tilde.iter().enumerate().all(|(i, r)| r.len() == i);
        let dirk_ok = self.a.len() == s && self.a.iter().enumerate().all(|(i, r)| r.len() == i + 1);
        if !lower_ok || !dirk_ok {
            return Err(Error::config("malformed double Butcher tableau"));
        }
        Ok(())
    }
}

/// Advance one step of the plain SI Runge-Kutta scheme, refactoring
/// `I - dt a_ii B(U^i)` at every stage.
pub fn si_rk_step(
    problem: &PdeProblem,
    t: &DoubleButcherTableau,
    u_n: &StateVector,
    dt: f64,
) -> Result<StateVector> {
    si_rk_step_with_stats(problem, t, u_n, dt).map(|(u, _)| u)
}

pub fn si_rk_step_with_stats(
    problem: &PdeProblem,
    t: &DoubleButcherTableau,
    u_n: &StateVector,
    dt: f64,
) -> Result<(StateVector, StepStats)> {
    t.check()?;
    if dt < 0.0 {
        return Err(Error::config(format!("si_rk_step: dt = {dt}")));
    }
    if dt == 0.0 {
        return Ok((u_n.clone(), StepStats::default()));
    }
    let s = t.stages();
    let mut stats = StepStats::default();
    let mut ks: Vec<Vec<f64>> = Vec::with_capacity(s);
    for i in 0..s {
        let a_row: Vec<(f64, &Vec<f64>)> = (0..i).map(|j| (t.a_tilde[i][j], &ks[j])).collect();
        let u_i = combine(&u_n.values, &a_row);
        let al_row: Vec<(f64, &Vec<f64>)> = (0..i).map(|j| (t.a[i][j], &ks[j])).collect();
        let v_i = combine(&u_n.values, &al_row);

        let c_i: f64 = t.a_tilde[i].iter().sum();
        let mut rhs = problem.f_explicit(&u_i, u_n.time + c_i * dt)?;
        let b_i = problem.b_matrix(&u_i)?;
        stats.rhs_assemblies += 1;
        let bv = b_i.matvec(&v_i);
        for (r, v) in rhs.iter_mut().zip(bv.iter()) {
            *r += v;
        }
        for r in rhs.iter_mut() {
            *r *= dt;
        }

        let a_ii = t.a[i][i];
        let k = if a_ii == 0.0 {
            rhs
        } else {
            let fact = factor_shifted(&b_i, dt * a_ii)
                .map_err(|e| Error::StepFailure(format!("stage factorization failed: {e}")))?;
            stats.factorizations += 1;
            let k = fact
                .solve(&rhs)
                .map_err(|e| Error::StepFailure(format!("stage solve failed: {e}")))?;
            stats.solves += 1;
            k
        };
        ks.push(k);
    }
    let weights: Vec<(f64, &Vec<f64>)> = (0..s).map(|i| (t.b[i], &ks[i])).collect();
    let out = combine(&u_n.values, &weights);
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::StepFailure("non-finite state after step".into()));
    }
    Ok((StateVector::new(out, u_n.time + dt), stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_three_quarters_weights_sum_to_one_exactly() {
        let t = scheme_gamma_three_quarters();
        let exact = t.exact().unwrap();
        let sum = exact.b.iter().fold(rat(0, 1), |a, v| a + v);
        assert_eq!(sum, rat(1, 1));
        assert_eq!(exact.b, vec![rat(2, 5), rat(0, 1), rat(-3, 20), rat(3, 4)]);
    }

    #[test]
    fn gamma_three_quarters_order_conditions_vanish_exactly() {
        let t = scheme_gamma_three_quarters();
        let report = validate_order_conditions(&t);
        assert!(report.rational_mode);
        assert_eq!(report.residuals.len(), 10);
        assert!(report.exact_zero.iter().all(|&z| z), "{:?}", report.residuals);
        assert_eq!(report.satisfied_order, 3);
    }

    #[test]
    fn gamma_three_quarters_is_stiffly_accurate_with_zero_gamma_row_sum() {
        let t = scheme_gamma_three_quarters();
        assert!(check_stiffly_accurate(&t));
        // sum_j gamma_4j + gamma = 2/5 - 1 - 3/20 + 3/4 = 0.
        let exact = t.exact().unwrap();
        let g4: BigRational = exact.gamma_mat[3].iter().fold(rat(0, 1), |a, v| a + v);
        assert_eq!(g4 + rat(3, 4), rat(0, 1));
    }

    #[test]
    fn construction_reproduces_the_published_tableau() {
        let built = construct_tableau_exact(rat(3, 4), RootChoice::Unit).unwrap();
        let want = scheme_gamma_three_quarters();
        assert_eq!(built.exact().unwrap(), want.exact().unwrap());
        // The step-7 value forced by the row-sum constraint.
        assert_eq!(built.exact().unwrap().a_tilde[3][1], rat(52, 297));
    }

    #[test]
    fn construction_exact_for_13_50() {
        let t = construct_tableau_exact(rat(13, 50), RootChoice::Unit).unwrap();
        let report = validate_order_conditions(&t);
        assert!(report.rational_mode);
        assert_eq!(report.satisfied_order, 3);
        assert!(check_stiffly_accurate(&t));
        // Unit root chosen for the last abscissa.
        assert_eq!(t.exact().unwrap().c_tilde(3), rat(1, 1));
    }

    #[test]
    fn construction_secondary_root_for_13_50() {
        // The companion root of 23 c^2 - 22 c - 1 = 0 is -1/23. Only the
        // unit root keeps alpha_i = c~_i on the weight support, which the
        // mixed condition sum b c~ alpha = 1/3 needs; the companion root
        // therefore stops at order two (see RootChoice docs).
        let t = construct_tableau_exact(rat(13, 50), RootChoice::Secondary).unwrap();
        assert_eq!(t.exact().unwrap().c_tilde(3), rat(-1, 23));
        assert_eq!(validate_order_conditions(&t).satisfied_order, 2);
        assert!(check_stiffly_accurate(&t));
    }

    #[test]
    fn construction_float_gamma() {
        let t = construct_tableau(1.0 - 1.0 / 2.0_f64.sqrt(), RootChoice::Unit).unwrap();
        let report = validate_order_conditions(&t);
        assert!(!report.rational_mode);
        assert_eq!(report.satisfied_order, 3);
        assert!(check_stiffly_accurate(&t));
    }

    #[test]
    fn construction_rejects_degenerate_gamma() {
        assert!(matches!(
            construct_tableau(0.1, RootChoice::Unit),
            Err(Error::Construction { step: 1, .. })
        ));
        assert!(matches!(
            construct_tableau(0.5, RootChoice::Unit),
            Err(Error::Construction { step: 2, .. })
        ));
        assert!(matches!(
            construct_tableau_exact(rat(1, 3), RootChoice::Unit),
            Err(Error::Construction { step: 2, .. })
        ));
    }

    #[test]
    fn perturbed_weights_lose_all_orders() {
        let base = scheme_gamma_three_quarters();
        let mut data = base.data().clone();
        for b in &mut data.b {
            *b *= 1.01;
        }
        let t = RosenbrockTableau::from_f64(data, "perturbed");
        let report = validate_order_conditions(&t);
        assert_eq!(report.satisfied_order, 0);
        assert!((report.residuals[0].2 - 0.01).abs() < 1e-12);
    }

    #[test]
    fn one_stage_scheme_is_first_order_not_sa() {
        let data = TableauData::<f64> {
            gamma: 1.0,
            a_tilde: vec![vec![]],
            alpha: vec![vec![]],
            gamma_mat: vec![vec![]],
            b: vec![1.0],
        };
        let t = RosenbrockTableau::from_f64(data, "si-euler");
        let report = validate_order_conditions(&t);
        assert_eq!(report.satisfied_order, 1);
        // alpha_s = 0 != 1, so not stiffly accurate despite b_s = gamma.
        assert!(!check_stiffly_accurate(&t));
    }

    #[test]
    fn tableau_text_round_trip() {
        let t = scheme_gamma_three_quarters();
        let text = export_tableau(&t);
        let back = import_tableau(&text).unwrap();
        assert_eq!(back.exact().unwrap(), t.exact().unwrap());

        let tf = construct_tableau(0.26, RootChoice::Unit).unwrap();
        let text = export_tableau(&tf);
        let back = import_tableau(&text).unwrap();
        assert!(back.exact().is_none());
        assert_eq!(back.data(), tf.data());
    }

    #[test]
    fn import_rejects_malformed_input() {
        assert!(import_tableau("stages 4\ngamma 3/4\n").is_err());
        assert!(import_tableau("stages 2\ngamma 1/2\nb 1/2 1/2\nbogus[2] 1").is_err());
    }
}
