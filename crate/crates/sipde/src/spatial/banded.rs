//! Cyclic banded matrix storage for periodic finite-difference stencils.

use crate::error::{Error, Result};

/// Cyclic (periodic) banded matrix with constant half-bandwidth.
///
/// Row `i` stores coefficients for offsets `-w ..= w`; entry `(i, off)`
/// multiplies the vector component at index `(i + off) mod n`. Pure
/// derivative stencils have zero row sums, and operators in outer
/// divergence form additionally have zero column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilMatrix {
    n: usize,
    half_bandwidth: usize,
    /// Row-major: `bands[i * (2w+1) + (off + w)]`.
    bands: Vec<f64>,
}

impl StencilMatrix {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        assert!(
            2 * half_bandwidth + 1 <= n,
            "bandwidth {half_bandwidth} too wide for n = {n}"
        );
        StencilMatrix {
            n,
            half_bandwidth,
            bands: vec![0.0; n * (2 * half_bandwidth + 1)],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = StencilMatrix::zeros(n, 0);
        for i in 0..n {
            m.bands[i] = 1.0;
        }
        m
    }

    /// Build a constant-coefficient cyclic stencil: the same `coeffs`
    /// (indexed by offset `-w ..= w`) applied on every row, scaled by `scale`.
    pub fn from_stencil(n: usize, coeffs: &[f64], scale: f64) -> Self {
        assert!(coeffs.len() % 2 == 1, "stencil must have odd length");
        let w = coeffs.len() / 2;
        let mut m = StencilMatrix::zeros(n, w);
        for i in 0..n {
            for (k, &c) in coeffs.iter().enumerate() {
                m.bands[i * (2 * w + 1) + k] = c * scale;
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    #[inline]
    fn width(&self) -> usize {
        2 * self.half_bandwidth + 1
    }

    #[inline]
    pub fn band(&self, row: usize, off: isize) -> f64 {
        debug_assert!(off.unsigned_abs() <= self.half_bandwidth);
        self.bands[row * self.width() + (off + self.half_bandwidth as isize) as usize]
    }

    #[inline]
    pub fn band_mut(&mut self, row: usize, off: isize) -> &mut f64 {
        debug_assert!(off.unsigned_abs() <= self.half_bandwidth);
        let w = self.width();
        &mut self.bands[row * w + (off + self.half_bandwidth as isize) as usize]
    }

    /// Column index hit by `(row, off)` under periodic wrap.
    #[inline]
    pub fn col(&self, row: usize, off: isize) -> usize {
        (row as isize + off).rem_euclid(self.n as isize) as usize
    }

    /// Dense accessor (zero outside the band); intended for tests.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let n = self.n as isize;
        let mut d = j as isize - i as isize;
        if d > n / 2 {
            d -= n;
        }
        if d < -n / 2 {
            d += n;
        }
        if d.unsigned_abs() <= self.half_bandwidth {
            self.band(i, d)
        } else {
            0.0
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let w = self.half_bandwidth as isize;
        let n = self.n as isize;
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = 0.0;
            for off in -w..=w {
                let j = (i as isize + off).rem_euclid(n) as usize;
                acc += self.band(i, off) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn scale(&mut self, s: f64) {
        for v in &mut self.bands {
            *v *= s;
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.clone();
        m.scale(s);
        m
    }

    /// `self + other`, padding to the larger bandwidth.
    pub fn add(&self, other: &StencilMatrix) -> StencilMatrix {
        assert_eq!(self.n, other.n);
        let w = self.half_bandwidth.max(other.half_bandwidth);
        let mut out = StencilMatrix::zeros(self.n, w);
        for i in 0..self.n {
            for off in -(w as isize)..=(w as isize) {
                let a = if off.unsigned_abs() as usize <= self.half_bandwidth {
                    self.band(i, off)
                } else {
                    0.0
                };
                let b = if off.unsigned_abs() as usize <= other.half_bandwidth {
                    other.band(i, off)
                } else {
                    0.0
                };
                *out.band_mut(i, off) = a + b;
            }
        }
        out
    }

    /// `self * diag(d)`.
    pub fn mul_diag_right(&self, d: &[f64]) -> StencilMatrix {
        assert_eq!(d.len(), self.n);
        let mut out = self.clone();
        let w = self.half_bandwidth as isize;
        for i in 0..self.n {
            for off in -w..=w {
                let j = self.col(i, off);
                *out.band_mut(i, off) = self.band(i, off) * d[j];
            }
        }
        out
    }

    /// `diag(d) * self`.
    pub fn mul_diag_left(&self, d: &[f64]) -> StencilMatrix {
        assert_eq!(d.len(), self.n);
        let mut out = self.clone();
        let w = self.half_bandwidth as isize;
        for i in 0..self.n {
            for off in -w..=w {
                *out.band_mut(i, off) = d[i] * self.band(i, off);
            }
        }
        out
    }

    /// Banded product `self * rhs`; the half-bandwidths add.
    pub fn mul_banded(&self, rhs: &StencilMatrix) -> StencilMatrix {
        assert_eq!(self.n, rhs.n);
        let w_out = self.half_bandwidth + rhs.half_bandwidth;
        let mut out = StencilMatrix::zeros(self.n, w_out);
        let wa = self.half_bandwidth as isize;
        let wb = rhs.half_bandwidth as isize;
        let n = self.n as isize;
        for i in 0..self.n {
            for oa in -wa..=wa {
                let aij = self.band(i, oa);
                if aij == 0.0 {
                    continue;
                }
                let j = (i as isize + oa).rem_euclid(n) as usize;
                for ob in -wb..=wb {
                    *out.band_mut(i, oa + ob) += aij * rhs.band(j, ob);
                }
            }
        }
        out
    }

    /// `I - c * self`, same bandwidth.
    pub fn shifted_identity(&self, c: f64) -> StencilMatrix {
        let mut out = self.scaled(-c);
        for i in 0..self.n {
            *out.band_mut(i, 0) += 1.0;
        }
        out
    }

    pub fn row_sum(&self, i: usize) -> f64 {
        let w = self.half_bandwidth as isize;
        (-w..=w).map(|off| self.band(i, off)).sum()
    }

    /// Column sums, i.e. the functional `1^T B`.
    pub fn col_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n];
        let w = self.half_bandwidth as isize;
        for i in 0..self.n {
            for off in -w..=w {
                s[self.col(i, off)] += self.band(i, off);
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.bands.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.bands.iter().all(|v| v.is_finite())
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.n]; self.n];
        let w = self.half_bandwidth as isize;
        for i in 0..self.n {
            for off in -w..=w {
                d[i][self.col(i, off)] += self.band(i, off);
            }
        }
        d
    }

    /// One-norm (max absolute column sum).
    pub fn norm_one(&self) -> f64 {
        let mut s = vec![0.0; self.n];
        let w = self.half_bandwidth as isize;
        for i in 0..self.n {
            for off in -w..=w {
                s[self.col(i, off)] += self.band(i, off).abs();
            }
        }
        s.into_iter().fold(0.0, f64::max)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::numeric("matrix has non-finite entries"))
        }
    }
}
