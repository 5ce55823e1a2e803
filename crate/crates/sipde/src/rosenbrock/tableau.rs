//! Tableau data for semi-implicit Rosenbrock-type schemes.

use num_rational::BigRational;

use super::field::CoefField;

/// Raw coefficient set of an s-stage SI Rosenbrock scheme over a scalar
/// type: strictly lower explicit coefficients `a_tilde`, strictly lower
/// `alpha` (implicit-argument combinations), strictly lower `gamma_mat`
/// (Jacobian combinations, diagonal `gamma` held separately), and
/// weights `b`.
///
/// Row `i` (0-based stage index) of each strictly-lower block has `i`
/// entries. The derived `beta = alpha + gamma_mat` carries the order
/// conditions; `beta[s-1][i] = b[i]` together with `sum alpha[s-1] = 1`
/// is the stiffly-accurate property.
#[derive(Debug, Clone, PartialEq)]
pub struct TableauData<T> {
    pub gamma: T,
    pub a_tilde: Vec<Vec<T>>,
    pub alpha: Vec<Vec<T>>,
    pub gamma_mat: Vec<Vec<T>>,
    pub b: Vec<T>,
}

impl<T: CoefField> TableauData<T> {
    pub fn stages(&self) -> usize {
        self.b.len()
    }

    /// Explicit abscissa of stage `i`: row sum of `a_tilde`.
    pub fn c_tilde(&self, i: usize) -> T {
        self.a_tilde[i]
            .iter()
            .fold(T::zero(), |acc, v| acc.add(v))
    }

    /// Row sum of `alpha`.
    pub fn alpha_sum(&self, i: usize) -> T {
        self.alpha[i].iter().fold(T::zero(), |acc, v| acc.add(v))
    }

    pub fn beta(&self, i: usize, j: usize) -> T {
        self.alpha[i][j].add(&self.gamma_mat[i][j])
    }

    /// Strictly-lower row sum of `beta`.
    pub fn beta_prime(&self, i: usize) -> T {
        (0..i).fold(T::zero(), |acc, j| acc.add(&self.beta(i, j)))
    }

    /// Whether `beta[s-1][i] = b[i]` for all i (including the diagonal
    /// `b[s-1] = gamma`) and `sum alpha[s-1] = 1`.
    pub fn is_stiffly_accurate(&self) -> bool {
        let s = self.stages();
        if s == 0 {
            return false;
        }
        for i in 0..s - 1 {
            if !self.beta(s - 1, i).sub(&self.b[i]).is_zero() {
                return false;
            }
        }
        if !self.b[s - 1].sub(&self.gamma).is_zero() {
            return false;
        }
        self.alpha_sum(s - 1).sub(&T::one()).is_zero()
    }

    pub fn map<U: CoefField>(&self, f: impl Fn(&T) -> U + Copy) -> TableauData<U> {
        let map_rows =
            |rows: &Vec<Vec<T>>| rows.iter().map(|r| r.iter().map(f).collect()).collect();
        TableauData {
            gamma: f(&self.gamma),
            a_tilde: map_rows(&self.a_tilde),
            alpha: map_rows(&self.alpha),
            gamma_mat: map_rows(&self.gamma_mat),
            b: self.b.iter().map(f).collect(),
        }
    }

    /// Structural sanity: row lengths of the strictly-lower blocks.
    pub fn check_shape(&self) -> bool {
        let s = self.stages();
        [&self.a_tilde, &self.alpha, &self.gamma_mat].iter().all(|block| {
            block.len() == s && block.iter().enumerate().all(|(i, row)| row.len() == i)
        })
    }
}

impl TableauData<BigRational> {
    pub fn to_f64(&self) -> TableauData<f64> {
        self.map(|v| CoefField::to_f64(v))
    }
}

/// A Rosenbrock tableau in f64, optionally carrying the exact rational
/// form it was derived from.
#[derive(Debug, Clone)]
pub struct RosenbrockTableau {
    pub(crate) data: TableauData<f64>,
    pub(crate) exact: Option<TableauData<BigRational>>,
    pub(crate) label: String,
}

impl RosenbrockTableau {
    pub fn from_exact(data: TableauData<BigRational>, label: impl Into<String>) -> Self {
        assert!(data.check_shape(), "malformed tableau");
        RosenbrockTableau {
            data: data.to_f64(),
            exact: Some(data),
            label: label.into(),
        }
    }

    pub fn from_f64(data: TableauData<f64>, label: impl Into<String>) -> Self {
        assert!(data.check_shape(), "malformed tableau");
        RosenbrockTableau {
            data,
            exact: None,
            label: label.into(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn stages(&self) -> usize {
        self.data.stages()
    }

    pub fn gamma(&self) -> f64 {
        self.data.gamma
    }

    pub fn b(&self) -> &[f64] {
        &self.data.b
    }

    pub fn a_tilde(&self, i: usize, j: usize) -> f64 {
        self.data.a_tilde[i][j]
    }

    pub fn alpha(&self, i: usize, j: usize) -> f64 {
        self.data.alpha[i][j]
    }

    pub fn gamma_mat(&self, i: usize, j: usize) -> f64 {
        self.data.gamma_mat[i][j]
    }

    pub fn beta(&self, i: usize, j: usize) -> f64 {
        self.data.beta(i, j)
    }

    pub fn c_tilde(&self, i: usize) -> f64 {
        self.data.c_tilde(i)
    }

    pub fn data(&self) -> &TableauData<f64> {
        &self.data
    }

    pub fn exact(&self) -> Option<&TableauData<BigRational>> {
        self.exact.as_ref()
    }
}
