//! Linear stability analysis of SI Rosenbrock-type schemes.
//!
//! On the scalar model `u' = lambda u + mu u` with the first argument
//! explicit and the second implicit, one step of the scheme multiplies
//! the state by
//!
//! ```text
//! R(zt, z) = 1 + (zt + z) b^T (I - zt At - z Bt)^{-1} e
//! ```
//!
//! with `zt = dt lambda`, `z = dt mu`, `At` the explicit tableau matrix
//! and `Bt = (beta_ij)` with diagonal `gamma`. Both matrices are lower
//! triangular, so evaluation is a forward substitution. The region where
//! the scheme stays A-stable in the implicit argument is scanned as
//! `M(zt) = max_y |R(zt, iy)|` and its boundary extracted as the level-1
//! contour of `M`.

use num_complex::Complex64;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rosenbrock::RosenbrockTableau;

/// Evaluate `R(zt, z)` by forward substitution on the lower-triangular
/// stage matrix.
pub fn stability_function(
    t: &RosenbrockTableau,
    z_tilde: Complex64,
    z: Complex64,
) -> Result<Complex64> {
    let s = t.stages();
    let diag = Complex64::new(1.0, 0.0) - z * t.gamma();
    if diag.norm() < 1e-14 * (1.0 + (z * t.gamma()).norm()) {
        return Err(Error::Pole(format!(
            "stage matrix singular at z = {z} (gamma = {})",
            t.gamma()
        )));
    }
    let mut x = vec![Complex64::new(0.0, 0.0); s];
    for i in 0..s {
        let mut acc = Complex64::new(1.0, 0.0);
        for j in 0..i {
            acc += (z_tilde * t.a_tilde(i, j) + z * t.beta(i, j)) * x[j];
        }
        x[i] = acc / diag;
    }
    let dot: Complex64 = (0..s).map(|i| t.b()[i] * x[i]).sum();
    Ok(Complex64::new(1.0, 0.0) + (z_tilde + z) * dot)
}

/// The algebraic limit `R(zt, z -> inf) = 1 - b^T Bt^{-1} e`, independent
/// of `zt` (the explicit term enters only at O(1/z)). Zero for stiffly
/// accurate tableaux.
pub fn r_at_infinity(t: &RosenbrockTableau) -> Result<f64> {
    let s = t.stages();
    let g = t.gamma();
    if g == 0.0 {
        return Err(Error::config("r_at_infinity: gamma = 0 makes Bt singular"));
    }
    // y = Bt^{-1} e by forward substitution.
    let mut y = vec![0.0; s];
    for i in 0..s {
        let mut acc = 1.0;
        for j in 0..i {
            acc -= t.beta(i, j) * y[j];
        }
        y[i] = acc / g;
    }
    let dot: f64 = (0..s).map(|i| t.b()[i] * y[i]).sum();
    Ok(1.0 - dot)
}

/// Sampling ladder for the inner maximum over `z = iy`.
#[derive(Debug, Clone, Copy)]
pub struct YSampling {
    /// Log-spaced samples per sign sweep of `[y_min, y_max]`.
    pub count: usize,
    pub y_min: f64,
    pub y_max: f64,
    /// Golden-section iterations refining the sampled argmax.
    pub refine_iters: usize,
}

impl Default for YSampling {
    fn default() -> Self {
        YSampling {
            count: 600,
            y_min: 1e-3,
            y_max: 1e6,
            refine_iters: 60,
        }
    }
}

impl YSampling {
    fn samples(&self) -> Vec<f64> {
        let mut ys = Vec::with_capacity(2 * self.count + 1);
        let lmin = self.y_min.log10();
        let lmax = self.y_max.log10();
        for k in 0..self.count {
            let e = lmin + (lmax - lmin) * k as f64 / (self.count - 1) as f64;
            ys.push(-(10f64.powf(e)));
        }
        ys.reverse();
        ys.push(0.0);
        for k in 0..self.count {
            let e = lmin + (lmax - lmin) * k as f64 / (self.count - 1) as f64;
            ys.push(10f64.powf(e));
        }
        ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ys
    }
}

/// `max_y |R(zt, iy)|` over the sampling ladder, the sampled argmax
/// refined by golden-section search, and the `|z| -> inf` limit included.
pub fn max_modulus_on_imaginary_axis(
    t: &RosenbrockTableau,
    z_tilde: Complex64,
    sampling: &YSampling,
) -> Result<f64> {
    let eval = |y: f64| -> Result<f64> {
        Ok(stability_function(t, z_tilde, Complex64::new(0.0, y))?.norm())
    };
    let ys = sampling.samples();
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for (k, &y) in ys.iter().enumerate() {
        let v = eval(y)?;
        if v > best {
            best = v;
            best_idx = k;
        }
    }
    // Golden-section refinement inside the bracketing interval.
    let lo = ys[best_idx.saturating_sub(1)];
    let hi = ys[(best_idx + 1).min(ys.len() - 1)];
    if hi > lo {
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = eval(x1)?;
        let mut f2 = eval(x2)?;
        for _ in 0..sampling.refine_iters {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = eval(x2)?;
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = eval(x1)?;
            }
            best = best.max(f1.max(f2));
        }
    }
    Ok(best.max(r_at_infinity(t)?.abs()))
}

/// Scalar field `M(zt)` on a rectangle with the level-1 contour.
#[derive(Debug, Clone)]
pub struct RegionContour {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Row-major `M` values, `field[j * nx + i]`; NaN marks excluded nodes.
    pub field: Vec<f64>,
    /// Level-1 polylines in the `zt` plane.
    pub contours: Vec<Vec<(f64, f64)>>,
}

/// Scan `M(zt) = max_y |R(zt, iy)|` on a `resolution x resolution` grid
/// and extract the boundary locus as the level-1 contour.
pub fn boundary_locus(
    t: &RosenbrockTableau,
    re_range: (f64, f64),
    im_range: (f64, f64),
    resolution: usize,
    sampling: &YSampling,
) -> Result<RegionContour> {
    if resolution < 64 {
        return Err(Error::config(format!(
            "boundary_locus: resolution {resolution} below 64"
        )));
    }
    if !(re_range.1 > re_range.0) || !(im_range.1 > im_range.0) {
        return Err(Error::config("boundary_locus: empty window"));
    }
    let (nx, ny) = (resolution, resolution);
    let mut field = vec![f64::NAN; nx * ny];
    for j in 0..ny {
        let im = im_range.0 + (im_range.1 - im_range.0) * j as f64 / (ny - 1) as f64;
        for i in 0..nx {
            let re = re_range.0 + (re_range.1 - re_range.0) * i as f64 / (nx - 1) as f64;
            // Poles are flagged as NaN and excluded from the contour.
            match max_modulus_on_imaginary_axis(t, Complex64::new(re, im), sampling) {
                Ok(m) => field[j * nx + i] = m,
                Err(Error::Pole(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    let contours = extract_level_contours(&field, nx, ny, re_range, im_range, 1.0);
    Ok(RegionContour {
        re_range,
        im_range,
        nx,
        ny,
        field,
        contours,
    })
}

/// Marching squares with linear interpolation; NaN cells are skipped.
fn extract_level_contours(
    field: &[f64],
    nx: usize,
    ny: usize,
    re_range: (f64, f64),
    im_range: (f64, f64),
    level: f64,
) -> Vec<Vec<(f64, f64)>> {
    let x_of = |i: f64| re_range.0 + (re_range.1 - re_range.0) * i / (nx - 1) as f64;
    let y_of = |j: f64| im_range.0 + (im_range.1 - im_range.0) * j / (ny - 1) as f64;
    let mut segments: Vec<((f64, f64), (f64, f64))> = Vec::new();

    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let f = [
                field[j * nx + i],
                field[j * nx + i + 1],
                field[(j + 1) * nx + i + 1],
                field[(j + 1) * nx + i],
            ];
            if f.iter().any(|v| v.is_nan()) {
                continue;
            }
            let inside = [f[0] < level, f[1] < level, f[2] < level, f[3] < level];
            let case = inside
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &b)| acc | ((b as usize) << k));
            if case == 0 || case == 15 {
                continue;
            }
            let corners = [
                (i as f64, j as f64),
                (i as f64 + 1.0, j as f64),
                (i as f64 + 1.0, j as f64 + 1.0),
                (i as f64, j as f64 + 1.0),
            ];
            let interp = |a: usize, b: usize| -> (f64, f64) {
                let tt = (level - f[a]) / (f[b] - f[a]);
                let x = corners[a].0 + tt * (corners[b].0 - corners[a].0);
                let y = corners[a].1 + tt * (corners[b].1 - corners[a].1);
                (x_of(x), y_of(y))
            };
            // Edges: 0 bottom (0-1), 1 right (1-2), 2 top (2-3), 3 left (3-0).
            let edge_pt = |e: usize| match e {
                0 => interp(0, 1),
                1 => interp(1, 2),
                2 => interp(2, 3),
                _ => interp(3, 0),
            };
            let mut emit = |e1: usize, e2: usize| {
                segments.push((edge_pt(e1), edge_pt(e2)));
            };
            match case {
                1 | 14 => emit(3, 0),
                2 | 13 => emit(0, 1),
                3 | 12 => emit(3, 1),
                4 | 11 => emit(1, 2),
                6 | 9 => emit(0, 2),
                7 | 8 => emit(2, 3),
                5 | 10 => {
                    // Saddle: disambiguate with the cell-center value.
                    let center = 0.25 * (f[0] + f[1] + f[2] + f[3]);
                    let center_inside = center < level;
                    if (case == 5) == center_inside {
                        emit(3, 0);
                        emit(1, 2);
                    } else {
                        emit(0, 1);
                        emit(2, 3);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    let cell = (re_range.1 - re_range.0) / (nx - 1) as f64;
    stitch_segments(segments, cell * 1e-6)
}

/// Join segments that share endpoints into polylines.
fn stitch_segments(segments: Vec<((f64, f64), (f64, f64))>, tol: f64) -> Vec<Vec<(f64, f64)>> {
    use std::collections::HashMap;
    let key =
        |p: (f64, f64)| -> (i64, i64) { ((p.0 / tol).round() as i64, (p.1 / tol).round() as i64) };
    let mut adj: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (idx, seg) in segments.iter().enumerate() {
        adj.entry(key(seg.0)).or_default().push(idx);
        adj.entry(key(seg.1)).or_default().push(idx);
    }
    let mut used = vec![false; segments.len()];
    let mut polylines = Vec::new();
    for start in 0..segments.len() {
        if used[start] {
            continue;
        }
        used[start] = true;
        let mut line = vec![segments[start].0, segments[start].1];
        for forward in [true, false] {
            loop {
                let tip = if forward { *line.last().unwrap() } else { line[0] };
                let Some(cands) = adj.get(&key(tip)) else {
                    break;
                };
                let Some(c) = cands.iter().copied().find(|&c| !used[c]) else {
                    break;
                };
                used[c] = true;
                let (a, b) = segments[c];
                let ext = if (a.0 - tip.0).abs() <= tol && (a.1 - tip.1).abs() <= tol {
                    b
                } else {
                    a
                };
                if forward {
                    line.push(ext);
                } else {
                    line.insert(0, ext);
                }
            }
        }
        polylines.push(line);
    }
    polylines
}

fn point_segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (vx, vy) = (b.0 - a.0, b.1 - a.1);
    let (wx, wy) = (p.0 - a.0, p.1 - a.1);
    let len2 = vx * vx + vy * vy;
    let t = if len2 > 0.0 {
        ((wx * vx + wy * vy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (dx, dy) = (p.0 - (a.0 + t * vx), p.1 - (a.1 + t * vy));
    (dx * dx + dy * dy).sqrt()
}

fn directed_hausdorff(from: &[Vec<(f64, f64)>], to: &[Vec<(f64, f64)>]) -> f64 {
    let mut worst = 0.0f64;
    for line in from {
        for &p in line {
            let mut best = f64::INFINITY;
            for other in to {
                if other.len() == 1 {
                    best = best.min(point_segment_distance(p, other[0], other[0]));
                }
                for seg in other.windows(2) {
                    best = best.min(point_segment_distance(p, seg[0], seg[1]));
                }
            }
            worst = worst.max(best);
        }
    }
    worst
}

/// Symmetric Hausdorff distance between two contour sets.
pub fn hausdorff_distance(a: &[Vec<(f64, f64)>], b: &[Vec<(f64, f64)>]) -> f64 {
    directed_hausdorff(a, b).max(directed_hausdorff(b, a))
}

impl RegionContour {
    /// Grid spacing of the scan.
    pub fn cell_size(&self) -> (f64, f64) {
        (
            (self.re_range.1 - self.re_range.0) / (self.nx - 1) as f64,
            (self.im_range.1 - self.im_range.0) / (self.ny - 1) as f64,
        )
    }

    /// Field as gnuplot-ready columns `re im M`, blank line per scanline.
    pub fn field_text(&self) -> String {
        let mut out = String::new();
        for j in 0..self.ny {
            let im = self.im_range.0
                + (self.im_range.1 - self.im_range.0) * j as f64 / (self.ny - 1) as f64;
            for i in 0..self.nx {
                let re = self.re_range.0
                    + (self.re_range.1 - self.re_range.0) * i as f64 / (self.nx - 1) as f64;
                let _ = writeln!(out, "{re:.6e} {im:.6e} {:.6e}", self.field[j * self.nx + i]);
            }
            out.push('\n');
        }
        out
    }

    /// Contour polylines as `re im` columns, blank line between lines.
    pub fn contour_text(&self) -> String {
        let mut out = String::new();
        for line in &self.contours {
            for (x, y) in line {
                let _ = writeln!(out, "{x:.6e} {y:.6e}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rosenbrock::{
        builtin_tableau, construct_tableau, scheme_gamma_three_quarters, BuiltinGamma, RootChoice,
        RosenbrockTableau, TableauData,
    };

    fn one_stage(gamma: f64) -> RosenbrockTableau {
        RosenbrockTableau::from_f64(
            TableauData {
                gamma,
                a_tilde: vec![vec![]],
                alpha: vec![vec![]],
                gamma_mat: vec![vec![]],
                b: vec![1.0],
            },
            "one-stage",
        )
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn r_at_origin_is_one_for_consistent_tableaux() {
        for t in [
            scheme_gamma_three_quarters(),
            builtin_tableau(BuiltinGamma::ThirteenFiftieths),
            one_stage(1.0),
        ] {
            let r = stability_function(&t, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
            assert!((r - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn one_stage_matches_closed_form() {
        // R = (1 + zt + (1-g) z) / (1 - g z); at g = 1, zt = 0, z = -1: 1/2.
        let t = one_stage(1.0);
        let r = stability_function(&t, c(0.0, 0.0), c(-1.0, 0.0)).unwrap();
        assert!((r - c(0.5, 0.0)).norm() < 1e-15);

        let g = 0.4;
        let t = one_stage(g);
        for (zt, z) in [(c(-0.3, 0.2), c(-2.0, 1.0)), (c(0.1, 0.0), c(-0.5, -3.0))] {
            let want = (c(1.0, 0.0) + zt + z * (1.0 - g)) / (c(1.0, 0.0) - z * g);
            let got = stability_function(&t, zt, z).unwrap();
            assert!((got - want).norm() < 1e-14);
        }
    }

    #[test]
    fn gamma_three_quarters_damps_stiff_negative_real_axis() {
        let t = scheme_gamma_three_quarters();
        let r = stability_function(&t, c(-0.1, 0.0), c(-5.0, 0.0)).unwrap();
        assert!(r.norm() < 1.0, "|R| = {}", r.norm());
    }

    #[test]
    fn pole_reported() {
        let t = one_stage(0.5);
        assert!(matches!(
            stability_function(&t, c(0.0, 0.0), c(2.0, 0.0)),
            Err(crate::error::Error::Pole(_))
        ));
    }

    #[test]
    fn r_infinity_values() {
        // Stiffly accurate scheme: exact damping at infinity.
        assert!(r_at_infinity(&scheme_gamma_three_quarters())
            .unwrap()
            .abs()
            < 1e-15);
        // One-stage gamma = 1 (backward-Euler-like): 1 - 1/1 = 0.
        assert!(r_at_infinity(&one_stage(1.0)).unwrap().abs() < 1e-15);
        // One-stage gamma = 1/2: 1 - 2 = -1.
        assert!((r_at_infinity(&one_stage(0.5)).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn r_infinity_matches_large_y_evaluation() {
        for t in [
            scheme_gamma_three_quarters(),
            construct_tableau(0.26, RootChoice::Unit).unwrap(),
            one_stage(0.5),
        ] {
            let alg = r_at_infinity(&t).unwrap();
            for zt in [c(0.0, 0.0), c(-2.0, 1.0)] {
                let num = stability_function(&t, zt, c(0.0, 1e9)).unwrap();
                assert!(
                    (num.norm() - alg.abs()).abs() < 1e-6,
                    "algebraic {} vs sampled {}",
                    alg,
                    num.norm()
                );
            }
        }
    }

    #[test]
    fn sampled_max_includes_origin() {
        let t = scheme_gamma_three_quarters();
        let m = max_modulus_on_imaginary_axis(&t, c(0.0, 0.0), &YSampling::default()).unwrap();
        assert!(m >= 1.0 - 1e-12);
    }

    #[test]
    fn sampled_max_stable_under_density_doubling() {
        let t = scheme_gamma_three_quarters();
        let base = YSampling::default();
        let double = YSampling {
            count: 2 * base.count,
            ..base
        };
        for zt in [c(-10.0, 0.0), c(-1.0, 1.0), c(-3.0, -2.0), c(0.5, 0.0)] {
            let m1 = max_modulus_on_imaginary_axis(&t, zt, &base).unwrap();
            let m2 = max_modulus_on_imaginary_axis(&t, zt, &double).unwrap();
            assert!((m1 - m2).abs() < 1e-6, "zt = {zt}: {m1} vs {m2}");
        }
    }

    #[test]
    fn deep_negative_axis_matches_refined_oracle() {
        let t = scheme_gamma_three_quarters();
        let base = YSampling::default();
        let oracle = YSampling {
            count: 3 * base.count,
            ..base
        };
        let m1 = max_modulus_on_imaginary_axis(&t, c(-10.0, 0.0), &base).unwrap();
        let m2 = max_modulus_on_imaginary_axis(&t, c(-10.0, 0.0), &oracle).unwrap();
        assert!((m1 - m2).abs() < 1e-6);
    }

    #[test]
    fn marching_squares_circle() {
        // Synthetic field M = |zt|: the level-1 contour is the unit circle.
        let nx = 81;
        let mut field = vec![0.0; nx * nx];
        for j in 0..nx {
            for i in 0..nx {
                let x = -2.0 + 4.0 * i as f64 / (nx - 1) as f64;
                let y = -2.0 + 4.0 * j as f64 / (nx - 1) as f64;
                field[j * nx + i] = (x * x + y * y).sqrt();
            }
        }
        let lines = extract_level_contours(&field, nx, nx, (-2.0, 2.0), (-2.0, 2.0), 1.0);
        assert!(!lines.is_empty());
        let total: usize = lines.iter().map(|l| l.len()).sum();
        assert!(total > 40);
        for line in &lines {
            for &(x, y) in line {
                let r = (x * x + y * y).sqrt();
                assert!((r - 1.0).abs() < 0.01, "contour point off circle: r = {r}");
            }
        }
    }

    #[test]
    fn hausdorff_between_shifted_lines() {
        let a = vec![vec![(0.0, 0.0), (1.0, 0.0)]];
        let b = vec![vec![(0.0, 0.1), (1.0, 0.1)]];
        let d = hausdorff_distance(&a, &b);
        assert!((d - 0.1).abs() < 1e-12);
    }
}
