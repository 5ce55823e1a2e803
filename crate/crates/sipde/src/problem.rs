//! Grids, state vectors, and the split-form PDE problem definition.
//!
//! Every integrator in this crate consumes a [`PdeProblem`], the
//! method-of-lines form
//!
//! ```text
//! dU/dt = F(U) + B(U) U
//! ```
//!
//! where `F` collects the explicitly treated terms (WENO convection and
//! source) and `B(U)` is a banded matrix that is linear in the state it
//! multiplies. Time enters only through the source term, which is lumped
//! into `F` and evaluated at whatever time the integrator prescribes.

use crate::error::{Error, Result};
use crate::spatial::{weno_convection, StencilMatrix, WenoConfig};

/// Uniform periodic 1D mesh. Node `i` sits at `x_left + i * dx`; the right
/// endpoint is excluded under periodicity.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n_points: usize,
    x_left: f64,
    x_right: f64,
    dx: f64,
}

/// Minimum number of nodes accepted by [`build_grid`].
pub const MIN_GRID_POINTS: usize = 8;

/// Build a uniform periodic grid with `n` nodes on `(x_left, x_right)`.
pub fn build_grid(x_left: f64, x_right: f64, n: usize) -> Result<Grid> {
    if !(x_right > x_left) {
        return Err(Error::config(format!(
            "domain has non-positive length: ({x_left}, {x_right})"
        )));
    }
    if n < MIN_GRID_POINTS {
        return Err(Error::config(format!(
            "grid too small: n = {n}, need at least {MIN_GRID_POINTS}"
        )));
    }
    Ok(Grid {
        n_points: n,
        x_left,
        x_right,
        dx: (x_right - x_left) / n as f64,
    })
}

impl Grid {
    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    /// Domain length `x_right - x_left`.
    pub fn length(&self) -> f64 {
        self.x_right - self.x_left
    }

    /// Coordinate of node `i`.
    pub fn x(&self, i: usize) -> f64 {
        self.x_left + i as f64 * self.dx
    }

    /// Sample a function of `x` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_points).map(|i| f(self.x(i))).collect::<Vec<_>>()
    }

    /// Sample a function of `(x, t)` at every node at time `t`.
    pub fn sample_at(&self, f: impl Fn(f64, f64) -> f64, t: f64) -> Vec<f64> {
        (0..self.n_points).map(|i| f(self.x(i), t)).collect()
    }
}

/// Nodal values of the approximate solution together with the time they
/// belong to.
#[derive(Debug, Clone)]
pub struct StateVector {
    pub values: Vec<f64>,
    pub time: f64,
}

impl StateVector {
    pub fn new(values: Vec<f64>, time: f64) -> Self {
        StateVector { values, time }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Discrete L1/L2/Linf norms of an error vector.
///
/// `l1 = dx * sum |e_i|`, `l2 = sqrt(dx * sum e_i^2)`, `linf = max |e_i|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

/// Compute the scaled discrete norms of an error vector.
pub fn discrete_norms(error: &[f64], dx: f64) -> Result<ErrorNorms> {
    if error.is_empty() {
        return Err(Error::config("discrete_norms: empty error vector"));
    }
    if !(dx > 0.0) {
        return Err(Error::config(format!("discrete_norms: dx = {dx}")));
    }
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    let mut max = 0.0f64;
    for &e in error {
        abs_sum += e.abs();
        sq_sum += e * e;
        max = max.max(e.abs());
    }
    Ok(ErrorNorms {
        l1: dx * abs_sum,
        l2: (dx * sq_sum).sqrt(),
        linf: max,
    })
}

type RhsFn = dyn Fn(&Grid, &[f64]) -> Vec<f64> + Send + Sync;
type MatrixFn = dyn Fn(&Grid, &[f64]) -> StencilMatrix + Send + Sync;
type SpaceTimeFn = dyn Fn(f64, f64) -> f64 + Send + Sync;
type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Explicitly treated convection term.
enum Convection {
    None,
    /// `-f(u)_x` by flux-split WENO reconstruction.
    Weno {
        flux: Box<ScalarFn>,
        dflux: Box<ScalarFn>,
        config: WenoConfig,
    },
    /// Arbitrary explicit term, used by scalar model problems in tests.
    Custom(Box<RhsFn>),
}

/// Split-form PDE problem `dU/dt = F(U) + B(U) U` on a periodic grid.
pub struct PdeProblem {
    grid: Grid,
    order_k: u8,
    convection: Convection,
    source: Option<Box<SpaceTimeFn>>,
    implicit: Box<MatrixFn>,
    exact: Option<Box<SpaceTimeFn>>,
    bandwidth: usize,
}

impl PdeProblem {
    pub fn builder(grid: Grid, order_k: u8) -> PdeProblemBuilder {
        PdeProblemBuilder {
            grid,
            order_k,
            convection: Convection::None,
            source: None,
            implicit: None,
            exact: None,
            bandwidth: 0,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Highest spatial derivative order of the PDE (2, 3 or 4).
    pub fn order_k(&self) -> u8 {
        self.order_k
    }

    /// Half-bandwidth of the assembled implicit matrix.
    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn has_exact_solution(&self) -> bool {
        self.exact.is_some()
    }

    /// Exact solution sampled on the grid at time `t`, if available.
    pub fn exact_state(&self, t: f64) -> Option<StateVector> {
        self.exact
            .as_ref()
            .map(|f| StateVector::new(self.grid.sample_at(|x, t| f(x, t), t), t))
    }

    pub fn exact_at(&self, x: f64, t: f64) -> Option<f64> {
        self.exact.as_ref().map(|f| f(x, t))
    }

    /// Explicit part `F(U)` at time `t`: convection plus source.
    pub fn f_explicit(&self, u: &[f64], t: f64) -> Result<Vec<f64>> {
        if u.len() != self.grid.n_points {
            return Err(Error::config(format!(
                "state length {} does not match grid ({})",
                u.len(),
                self.grid.n_points
            )));
        }
        let mut f = match &self.convection {
            Convection::None => vec![0.0; u.len()],
            Convection::Weno {
                flux,
                dflux,
                config,
            } => weno_convection(&self.grid, u, flux.as_ref(), dflux.as_ref(), config)?,
            Convection::Custom(rhs) => rhs(&self.grid, u),
        };
        if let Some(src) = &self.source {
            for (i, fi) in f.iter_mut().enumerate() {
                *fi += src(self.grid.x(i), t);
            }
        }
        Ok(f)
    }

    /// Implicit-part matrix `B(U)`, frozen at the given state.
    pub fn b_matrix(&self, u: &[f64]) -> Result<StencilMatrix> {
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::numeric("b_matrix: non-finite entries in state"));
        }
        Ok((self.implicit)(&self.grid, u))
    }

    /// Bound on |f'(u)| over the grid, used by the CFL time-step rule.
    /// Zero when the problem has no convection term.
    pub fn flux_derivative_bound(&self, u: &[f64]) -> f64 {
        match &self.convection {
            Convection::Weno { dflux, .. } => {
                u.iter().map(|&v| dflux(v).abs()).fold(0.0, f64::max)
            }
            _ => 0.0,
        }
    }
}

/// Assemble the split right-hand side at the state's own time:
/// returns `(F(U), B(U))` with `F(U) + B(U) U` the full semi-discrete RHS.
pub fn assemble_split(problem: &PdeProblem, u: &StateVector) -> Result<(Vec<f64>, StencilMatrix)> {
    if !u.is_finite() {
        return Err(Error::numeric("assemble_split: non-finite state"));
    }
    let f = problem.f_explicit(&u.values, u.time)?;
    let b = problem.b_matrix(&u.values)?;
    Ok((f, b))
}

pub struct PdeProblemBuilder {
    grid: Grid,
    order_k: u8,
    convection: Convection,
    source: Option<Box<SpaceTimeFn>>,
    implicit: Option<Box<MatrixFn>>,
    exact: Option<Box<SpaceTimeFn>>,
    bandwidth: usize,
}

impl PdeProblemBuilder {
    /// Convection term `-f(u)_x` discretized by flux-split WENO.
    pub fn weno_convection(
        mut self,
        flux: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dflux: impl Fn(f64) -> f64 + Send + Sync + 'static,
        config: WenoConfig,
    ) -> Self {
        self.convection = Convection::Weno {
            flux: Box::new(flux),
            dflux: Box::new(dflux),
            config,
        };
        self
    }

    /// Arbitrary explicit term (model problems, tests).
    pub fn custom_explicit(
        mut self,
        rhs: impl Fn(&Grid, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        self.convection = Convection::Custom(Box::new(rhs));
        self
    }

    pub fn source(mut self, src: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.source = Some(Box::new(src));
        self
    }

    /// Implicit-part matrix assembly `U -> B(U)`, including the PDE sign.
    /// `half_bandwidth` is the half-bandwidth of the matrices it produces.
    pub fn implicit(
        mut self,
        half_bandwidth: usize,
        implicit: impl Fn(&Grid, &[f64]) -> StencilMatrix + Send + Sync + 'static,
    ) -> Self {
        self.implicit = Some(Box::new(implicit));
        self.bandwidth = half_bandwidth;
        self
    }

    pub fn exact_solution(mut self, f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        self.exact = Some(Box::new(f));
        self
    }

    pub fn build(self) -> Result<PdeProblem> {
        if !matches!(self.order_k, 2 | 3 | 4) {
            return Err(Error::config(format!(
                "order_k = {} not in {{2, 3, 4}}",
                self.order_k
            )));
        }
        let implicit = self
            .implicit
            .ok_or_else(|| Error::config("PdeProblem requires an implicit part"))?;
        // Reject grids below twice the widest stencil of the implicit operator.
        let stencil_width = 2 * self.bandwidth + 1;
        if self.grid.n_points < 2 * stencil_width {
            return Err(Error::config(format!(
                "grid with {} points is below twice the stencil width {}",
                self.grid.n_points, stencil_width
            )));
        }
        Ok(PdeProblem {
            grid: self.grid,
            order_k: self.order_k,
            convection: self.convection,
            source: self.source,
            implicit,
            exact: self.exact,
            bandwidth: self.bandwidth,
        })
    }
}
