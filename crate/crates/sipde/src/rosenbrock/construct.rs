//! Construction of four-stage, third-order, stiffly accurate SI
//! Rosenbrock schemes for a chosen diagonal coefficient `gamma >= 1/4`.
//!
//! The free parameters are fixed as `b_2 = 0`, `alpha_2 = 2 gamma`,
//! `a~_32 = 0`, `alpha_31 = 0`, `alpha_41 = alpha_43 = 0`; the remaining
//! coefficients then follow in eight closed-form steps. With the
//! quadrature side condition `sum b_i alpha_i = 1/2` in force, the
//! quadratic fixing the last explicit abscissa always has the root
//! `c~_4 = 1`, so the whole construction stays inside the field of the
//! input `gamma`; no radicals appear.

use crate::error::{Error, Result};

use super::field::CoefField;
use super::tableau::TableauData;

/// Which root of the step-3 quadratic fixes the last abscissa.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootChoice {
    /// `c~_4 = 1` (always a root; keeps the last stage at the step end
    /// and gives genuine third order).
    #[default]
    Unit,
    /// The companion root `(1/4 - b_3/3) / (gamma (gamma + b_3))`.
    /// Diagnostic only: it solves the construction system but leaves
    /// `alpha_i != c~_i` on the weight support, so the mixed condition
    /// `sum b_i c~_i alpha_i = 1/3` fails and the scheme is second order.
    Secondary,
}

fn step_err<T>(step: u8, reason: impl Into<String>) -> Result<T> {
    Err(Error::Construction {
        step,
        reason: reason.into(),
    })
}

pub fn construct_third_order<T: CoefField>(
    gamma: T,
    choice: RootChoice,
) -> Result<TableauData<T>> {
    let r = |n: i64, d: i64| T::from_ratio(n, d);
    let two = r(2, 1);

    // Step 1: gamma >= 1/4 keeps the implicit part A-stable.
    if gamma.to_f64() < 0.25 - 1e-12 {
        return step_err(1, format!("gamma = {} below 1/4", gamma.to_f64()));
    }
    let alpha2 = two.mul(&gamma);

    // Step 2: b_2 = 0; solve sum b alpha^2 = 1/3 - g and
    // sum b alpha = 1/2 - g for alpha_3 and b_3.
    let q = r(1, 2).sub(&gamma); // 1/2 - gamma
    let rr = r(1, 3).sub(&gamma); // 1/3 - gamma
    if q.is_zero() {
        return step_err(2, "gamma = 1/2 makes alpha_3 and b_3 degenerate (b_2 = 0)");
    }
    if rr.is_zero() {
        return step_err(2, "gamma = 1/3 makes b_3 degenerate (b_2 = 0)");
    }
    let alpha3 = match rr.div(&q) {
        Some(v) => v,
        None => return step_err(2, "division by zero solving alpha_3"),
    };
    let b3 = match q.mul(&q).div(&rr) {
        Some(v) => v,
        None => return step_err(2, "division by zero solving b_3"),
    };
    let b1 = T::one().sub(&b3).sub(&gamma);

    // Step 3: quadratic A c4^2 - g c4 + C = 0 with A = g (g + b_3),
    // C = 1/4 - b_3/3. The unit root is structural: A - g + C =
    // (g - 1/2)^2 + b_3 (g - 1/3) = q^2 - q^2 = 0.
    let quad_a = gamma.mul(&gamma.add(&b3));
    let quad_c = r(1, 4).sub(&b3.mul(&r(1, 3)));
    debug_assert!(
        quad_a.sub(&gamma).add(&quad_c).to_f64().abs() < 1e-9,
        "unit root identity violated"
    );
    let c4 = match choice {
        RootChoice::Unit => T::one(),
        RootChoice::Secondary => match quad_c.div(&quad_a) {
            Some(v) => v,
            None => {
                return step_err(3, "quadratic degenerates; only the unit root exists")
            }
        },
    };
    let c3 = match r(1, 2).sub(&gamma.mul(&c4)).div(&b3) {
        Some(v) => v,
        None => return step_err(3, "division by zero solving c~_3"),
    };

    // Step 4: beta'_4 = 1 - g from stiff accuracy, then beta'_3.
    let beta4p = T::one().sub(&gamma);
    let beta3p = match r(1, 2).sub(&gamma).sub(&gamma.mul(&beta4p)).div(&b3) {
        Some(v) => v,
        None => return step_err(4, "division by zero solving beta'_3"),
    };

    // Steps 5-6: with a~_32 = 0, the remaining third-order conditions
    // pin beta_32 through a single linear equation.
    let w_val = r(1, 6).sub(&gamma).add(&gamma.mul(&gamma).mul(&c4));
    let s_val = r(1, 6)
        .sub(&gamma)
        .add(&gamma.mul(&gamma))
        .sub(&gamma.mul(&b3).mul(&beta3p));
    let one_minus_3g = T::one().sub(&gamma.mul(&r(3, 1)));
    let denom = alpha2
        .mul(&b3)
        .mul(&beta3p.sub(&one_minus_3g.mul(&c3)));
    let numer = two
        .mul(&w_val)
        .mul(&beta3p)
        .sub(&one_minus_3g.mul(&alpha3).mul(&w_val))
        .sub(&two.mul(&c3).sub(&alpha3).mul(&s_val));
    let beta32 = match numer.div(&denom) {
        Some(v) => v,
        None => return step_err(6, "degenerate linear equation for beta_32"),
    };
    if beta32.is_zero() {
        return step_err(6, "beta_32 = 0 leaves c~_2 and beta'_2 undetermined");
    }

    // Step 7: beta'_2, c~_2 and the last explicit row.
    let b3t = b3.mul(&beta32);
    let beta2p = match s_val.div(&b3t) {
        Some(v) => v,
        None => return step_err(7, "division by zero solving beta'_2"),
    };
    let c2 = match w_val.div(&b3t) {
        Some(v) => v,
        None => return step_err(7, "division by zero solving c~_2"),
    };
    let dmat = alpha2.mul(&c3).sub(&alpha3.mul(&c2));
    let six_g = gamma.mul(&r(6, 1));
    let a42 = match two.mul(&c3).sub(&alpha3).div(&six_g.mul(&dmat)) {
        Some(v) => v,
        None => return step_err(7, "singular 2x2 system for a~_42, a~_43"),
    };
    let a43 = match alpha2.sub(&two.mul(&c2)).div(&six_g.mul(&dmat)) {
        Some(v) => v,
        None => return step_err(7, "singular 2x2 system for a~_42, a~_43"),
    };

    // Step 8: remaining coefficients from beta = alpha + gamma_mat and
    // the stiff-accuracy row beta_4i = b_i.
    let a41 = c4.sub(&a42).sub(&a43);
    let beta31 = beta3p.sub(&beta32);
    let gamma21 = beta2p.sub(&alpha2);
    let gamma32 = beta32.sub(&alpha3);
    let zero = T::zero();

    let data = TableauData {
        gamma: gamma.clone(),
        a_tilde: vec![
            vec![],
            vec![c2],
            vec![c3, zero.clone()],
            vec![a41, a42, a43],
        ],
        alpha: vec![
            vec![],
            vec![alpha2],
            vec![zero.clone(), alpha3],
            vec![zero.clone(), T::one(), zero.clone()],
        ],
        gamma_mat: vec![
            vec![],
            vec![gamma21],
            vec![beta31, gamma32],
            vec![b1.clone(), T::zero().sub(&T::one()), b3.clone()],
        ],
        b: vec![b1, zero, b3, gamma],
    };
    debug_assert!(data.check_shape());
    Ok(data)
}
