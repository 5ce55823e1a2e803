//! Order conditions of SI Rosenbrock-type schemes up to order three,
//! evaluated in the tableau's own scalar field.
//!
//! With the abbreviations `c~_i = sum_j a~_ij`, `alpha_i = sum_j alpha_ij`,
//! `beta'_i = sum_{j<i} beta_ij`, `beta_ij = alpha_ij + gamma_ij`, the ten
//! conditions through order three read
//!
//! ```text
//! order 1:  sum b_i                 = 1
//! order 2:  sum b_i c~_i            = 1/2
//!           sum b_i beta'_i         = 1/2 - g
//! order 3:  sum b_i c~_i^2          = 1/3
//!           sum b_i a~_ij c~_j      = 1/6
//!           sum b_i c~_i alpha_i    = 1/3
//!           sum b_i alpha_i^2       = 1/3
//!           sum b_i a~_ij beta'_j   = 1/6 - g/2
//!           sum b_i beta_ij c~_j    = 1/6 - g/2
//!           sum b_i beta_ij beta'_j = 1/6 - g + g^2
//! ```

use super::field::CoefField;
use super::tableau::TableauData;

/// Residual of one order condition: `lhs - rhs` in the scalar field.
#[derive(Debug, Clone)]
pub struct ConditionResidual<T> {
    pub label: &'static str,
    pub order: u8,
    pub residual: T,
}

pub fn order_condition_residuals<T: CoefField>(t: &TableauData<T>) -> Vec<ConditionResidual<T>> {
    let s = t.stages();
    let g = &t.gamma;
    let c: Vec<T> = (0..s).map(|i| t.c_tilde(i)).collect();
    let a: Vec<T> = (0..s).map(|i| t.alpha_sum(i)).collect();
    let bp: Vec<T> = (0..s).map(|i| t.beta_prime(i)).collect();

    let dot = |w: &dyn Fn(usize) -> T| -> T {
        (0..s).fold(T::zero(), |acc, i| acc.add(&t.b[i].mul(&w(i))))
    };
    let dot_lower = |w: &dyn Fn(usize, usize) -> T| -> T {
        let mut acc = T::zero();
        for i in 0..s {
            for j in 0..i {
                acc = acc.add(&t.b[i].mul(&w(i, j)));
            }
        }
        acc
    };

    let r = |n: i64, d: i64| T::from_ratio(n, d);
    let half_minus_g = r(1, 2).sub(g);
    let sixth_minus_half_g = r(1, 6).sub(&g.mul(&r(1, 2)));
    let third_order_b = r(1, 6).sub(g).add(&g.mul(g));

    vec![
        ConditionResidual {
            label: "sum b = 1",
            order: 1,
            residual: dot(&|_| T::one()).sub(&T::one()),
        },
        ConditionResidual {
            label: "sum b c~ = 1/2",
            order: 2,
            residual: dot(&|i| c[i].clone()).sub(&r(1, 2)),
        },
        ConditionResidual {
            label: "sum b beta' = 1/2 - g",
            order: 2,
            residual: dot(&|i| bp[i].clone()).sub(&half_minus_g),
        },
        ConditionResidual {
            label: "sum b c~^2 = 1/3",
            order: 3,
            residual: dot(&|i| c[i].mul(&c[i])).sub(&r(1, 3)),
        },
        ConditionResidual {
            label: "sum b a~ c~ = 1/6",
            order: 3,
            residual: dot_lower(&|i, j| t.a_tilde[i][j].mul(&c[j])).sub(&r(1, 6)),
        },
        ConditionResidual {
            label: "sum b c~ alpha = 1/3",
            order: 3,
            residual: dot(&|i| c[i].mul(&a[i])).sub(&r(1, 3)),
        },
        ConditionResidual {
            label: "sum b alpha^2 = 1/3",
            order: 3,
            residual: dot(&|i| a[i].mul(&a[i])).sub(&r(1, 3)),
        },
        ConditionResidual {
            label: "sum b a~ beta' = 1/6 - g/2",
            order: 3,
            residual: dot_lower(&|i, j| t.a_tilde[i][j].mul(&bp[j])).sub(&sixth_minus_half_g),
        },
        ConditionResidual {
            label: "sum b beta c~ = 1/6 - g/2",
            order: 3,
            residual: dot_lower(&|i, j| t.beta(i, j).mul(&c[j])).sub(&sixth_minus_half_g),
        },
        ConditionResidual {
            label: "sum b beta beta' = 1/6 - g + g^2",
            order: 3,
            residual: dot_lower(&|i, j| t.beta(i, j).mul(&bp[j])).sub(&third_order_b),
        },
    ]
}

/// Report of an order-condition evaluation, in f64 for display with an
/// exactness flag for rational-mode runs.
#[derive(Debug, Clone)]
pub struct OrderConditionReport {
    /// `(label, order, residual)`; residual is exact zero in rational mode
    /// whenever `exact_zero` holds for that entry.
    pub residuals: Vec<(String, u8, f64)>,
    pub exact_zero: Vec<bool>,
    /// Whether the evaluation ran in exact rational arithmetic.
    pub rational_mode: bool,
    pub satisfied_order: u8,
}

/// Residual magnitude below which a float-mode condition counts as met.
pub const FLOAT_RESIDUAL_TOL: f64 = 1e-12;

pub(crate) fn report_from_residuals<T: CoefField>(
    residuals: Vec<ConditionResidual<T>>,
    rational_mode: bool,
) -> OrderConditionReport {
    let exact_zero: Vec<bool> = residuals.iter().map(|r| r.residual.is_zero()).collect();
    let rs: Vec<(String, u8, f64)> = residuals
        .iter()
        .map(|r| (r.label.to_string(), r.order, r.residual.to_f64()))
        .collect();
    let met = |idx: usize| {
        if rational_mode {
            exact_zero[idx]
        } else {
            rs[idx].2.abs() <= FLOAT_RESIDUAL_TOL
        }
    };
    let mut satisfied_order = 0u8;
    for p in 1..=3u8 {
        let all = rs
            .iter()
            .enumerate()
            .filter(|(_, r)| r.1 <= p)
            .all(|(i, _)| met(i));
        if all {
            satisfied_order = p;
        } else {
            break;
        }
    }
    OrderConditionReport {
        residuals: rs,
        exact_zero,
        rational_mode,
        satisfied_order,
    }
}
