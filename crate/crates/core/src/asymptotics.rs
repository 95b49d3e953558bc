//! Long-time behaviour: the Baiocchi variable `w(t) = ∫₀ᵗ v`, the nonlocal
//! obstacle problem
//!
//! ```text
//! w ≥ 0,   0 ≤ f + J∗w − w ≤ 1,   (f + J∗w − w − 1) w = 0,
//! ```
//!
//! and the mesa projection `P f = f + J∗w − w` of its solution.
//!
//! The obstacle problem is solved by the monotone iteration
//! `w ← (f + J∗w − 1)_+` from `w = 0`. Its fixed points are exactly the
//! solutions above, and each sweep is nodewise nondecreasing because the
//! convolution has nonnegative weights and is summed in a fixed order.

use crate::conv::{ConvMethod, Convolver};
use crate::grid::{l1_of_difference, trapezoid};
use crate::solver::{evolve, temperature, Scheme, SolverConfig, Trajectory};
use crate::{Error, Field, Kernel, Result, Scalar};

/// `∫₀ᵀ v` at the last snapshot, trapezoidal over the stored snapshots.
pub fn baiocchi<T: Scalar>(trajectory: &Trajectory<T>) -> Result<Field<T>> {
    let snaps = &trajectory.snapshots;
    if snaps.len() < 2 {
        return Err(Error::TooFewSnapshots);
    }
    let grid = *snaps[0].u.grid();
    let mut w = vec![T::zero(); grid.len()];
    let mut prev = temperature(&snaps[0].u);
    for pair in snaps.windows(2) {
        let cur = temperature(&pair[1].u);
        let half = (pair[1].t - pair[0].t) * T::lit(0.5);
        for ((wi, a), b) in w.iter_mut().zip(prev.values()).zip(cur.values()) {
            *wi = *wi + half * (*a + *b);
        }
        prev = cur;
    }
    Field::new(grid, w)
}

/// `f + ε⁻² (J_ε∗w − w)`: the enthalpy recovered from a Baiocchi variable of
/// the rescaled problem.
pub fn reconstruct<T: Scalar>(f: &Field<T>, w: &Field<T>, kernel: &Kernel<T>) -> Result<Field<T>> {
    f.check_grid(w)?;
    let conv = Convolver::new(f.grid(), kernel)?;
    let jw = conv.convolve(w, ConvMethod::Direct)?;
    let scale = T::one() / (kernel.epsilon() * kernel.epsilon());
    let values = f
        .values()
        .iter()
        .zip(jw.values())
        .zip(w.values())
        .map(|((fi, ji), wi)| *fi + scale * (*ji - *wi))
        .collect();
    Field::new(*f.grid(), values)
}

/// Violations of the obstacle-problem constraints, all zero at an exact solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals<T> {
    /// `max (−w)_+`
    pub neg_w: T,
    /// `max (−mesa)_+`
    pub lower: T,
    /// `max (mesa − 1)_+`
    pub upper: T,
    /// `∫ |(mesa − 1) w|`
    pub compl: T,
}

impl<T: Scalar> Residuals<T> {
    pub fn max(&self) -> T {
        self.neg_w.max(self.lower).max(self.upper).max(self.compl)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObstacleSolution<T> {
    /// Limit Baiocchi variable `w_∞`.
    pub w: Field<T>,
    /// `f + J∗w − w`
    pub mesa: Field<T>,
    pub residuals: Residuals<T>,
    pub iterations: usize,
}

pub const DEFAULT_OBSTACLE_TOL: f64 = 1e-10;
pub const DEFAULT_OBSTACLE_MAX_ITER: usize = 1_000_000;

/// Solves the obstacle problem by `w^{k+1} = (f + J∗w^k − 1)_+`, `w⁰ = 0`,
/// stopping once `‖w^{k+1} − w^k‖₁ ≤ tol`.
pub fn obstacle_solve<T: Scalar>(
    f: &Field<T>,
    kernel: &Kernel<T>,
    tol: T,
    max_iter: usize,
) -> Result<ObstacleSolution<T>> {
    obstacle_iterate(f, kernel, tol, max_iter, |_, _| {})
}

/// [`obstacle_solve`] with a callback receiving `(k, w^k)` after every sweep.
pub fn obstacle_iterate<T: Scalar>(
    f: &Field<T>,
    kernel: &Kernel<T>,
    tol: T,
    max_iter: usize,
    mut observe: impl FnMut(usize, &[T]),
) -> Result<ObstacleSolution<T>> {
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if let Some(x) = f.values().iter().find(|x| **x < T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "obstacle problem needs f >= 0, found {x}"
        )));
    }
    let grid = *f.grid();
    let conv = Convolver::new(&grid, kernel)?;
    let n = grid.len();
    let fv = f.values();
    let mut w = vec![T::zero(); n];
    let mut jw = vec![T::zero(); n];
    let mut next = vec![T::zero(); n];
    let mut iterations = 0;
    let mut residual = T::infinity();
    while residual > tol {
        if iterations == max_iter {
            return Err(Error::NoConvergence {
                iterations,
                residual: residual.as_f64(),
            });
        }
        conv.apply_direct(&w, &mut jw);
        for i in 0..n {
            next[i] = (fv[i] + jw[i] - T::one()).max(T::zero());
        }
        residual = l1_of_difference(&grid, &next, &w);
        std::mem::swap(&mut w, &mut next);
        iterations += 1;
        observe(iterations, &w);
    }

    conv.apply_direct(&w, &mut jw);
    let mesa: Vec<T> = (0..n).map(|i| fv[i] + jw[i] - w[i]).collect();
    let neg_w = w.iter().fold(T::zero(), |m, x| m.max(-*x));
    let lower = mesa.iter().fold(T::zero(), |m, x| m.max(-*x));
    let upper = mesa.iter().fold(T::zero(), |m, x| m.max(*x - T::one()));
    let prod: Vec<T> = mesa.iter().zip(&w).map(|(m, x)| ((*m - T::one()) * *x).abs()).collect();
    let compl = trapezoid(&grid, &prod);
    Ok(ObstacleSolution {
        w: Field::new(grid, w)?,
        mesa: Field::new(grid, mesa)?,
        residuals: Residuals {
            neg_w,
            lower,
            upper,
            compl,
        },
        iterations,
    })
}

/// `P f`, the mesa the solution from `f` settles on.
pub fn mesa_project<T: Scalar>(f: &Field<T>, kernel: &Kernel<T>) -> Result<Field<T>> {
    Ok(obstacle_solve(
        f,
        kernel,
        T::lit(DEFAULT_OBSTACLE_TOL),
        DEFAULT_OBSTACLE_MAX_ITER,
    )?
    .mesa)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LongtimeRow<T> {
    pub t: T,
    /// `‖u(T) − P f‖₁`
    pub l1_error: T,
    /// `‖v(T)‖₁`
    pub l1_v: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongtimeReport<T> {
    pub rows: Vec<LongtimeRow<T>>,
    pub mesa: ObstacleSolution<T>,
    /// Least-squares slope of `log ‖v(T)‖₁` against `T` over the tail.
    pub decay_slope: Option<T>,
    /// Pearson correlation of the same fit.
    pub decay_correlation: Option<T>,
    pub trajectory: Trajectory<T>,
}

/// Evolves `f` to `max(t_list)` with RK4 at step `dt` and reports the distance
/// to the mesa together with the decay of `‖v‖₁`. The decay fit uses the
/// second half of `t_list` (at least three points) where `‖v‖₁ > 0`.
pub fn longtime_convergence<T: Scalar>(
    f: &Field<T>,
    kernel: &Kernel<T>,
    t_list: &[T],
    dt: T,
) -> Result<LongtimeReport<T>> {
    if t_list.is_empty() || t_list.windows(2).any(|w| !(w[1] > w[0])) || !(t_list[0] > T::zero()) {
        return Err(Error::InvalidParameter(
            "t_list must be positive and strictly increasing".into(),
        ));
    }
    let mesa = obstacle_solve(
        f,
        kernel,
        T::lit(DEFAULT_OBSTACLE_TOL),
        DEFAULT_OBSTACLE_MAX_ITER,
    )?;
    let t_end = *t_list.last().unwrap();
    let cfg = SolverConfig::new(Scheme::Rk4, dt, t_end).with_snapshots(t_list.iter().copied());
    let trajectory = evolve(f, kernel, &cfg)?;
    let rows = t_list
        .iter()
        .map(|&t| {
            let snap = trajectory.nearest(t);
            Ok(LongtimeRow {
                t,
                l1_error: snap.u.l1_distance(&mesa.mesa)?,
                l1_v: temperature(&snap.u).integrate(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tail_start = (rows.len() / 2).min(rows.len().saturating_sub(3));
    let tail: Vec<(T, T)> = rows[tail_start..]
        .iter()
        .filter(|r| r.l1_v > T::zero())
        .map(|r| (r.t, r.l1_v.ln()))
        .collect();
    let (decay_slope, decay_correlation) = match linear_fit(&tail) {
        Some((s, r)) => (Some(s), Some(r)),
        None => (None, None),
    };
    Ok(LongtimeReport {
        rows,
        mesa,
        decay_slope,
        decay_correlation,
        trajectory,
    })
}

/// Least-squares slope and Pearson correlation of `(x, y)` pairs.
pub fn linear_fit<T: Scalar>(points: &[(T, T)]) -> Option<(T, T)> {
    if points.len() < 3 {
        return None;
    }
    let n = T::lit(points.len() as f64);
    let mx = points.iter().map(|p| p.0).sum::<T>() / n;
    let my = points.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let syy: T = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let sxy: T = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == T::zero() || syy == T::zero() {
        return None;
    }
    Some((sxy / sxx, sxy / (sxx * syy).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Datum, Grid};

    fn mushy() -> (Field<f64>, Kernel<f64>) {
        let g = Grid::new(-6.0, 6.0, 1024).unwrap();
        (Datum::mushy_preset().sample(&g), Kernel::polynomial())
    }

    #[test]
    fn low_datum_is_its_own_mesa() {
        let (f, k) = mushy();
        let low = f.map(|x| 0.5 * x.min(1.8));
        let sol = obstacle_solve(&low, &k, 1e-10, 1000).unwrap();
        assert!(sol.w.values().iter().all(|x| *x == 0.0));
        assert_eq!(sol.mesa, low);
        assert_eq!(sol.iterations, 1);
    }

    #[test]
    fn mesa_of_mushy_datum() {
        let (f, k) = mushy();
        let sol = obstacle_solve(&f, &k, 1e-10, 100_000).unwrap();
        assert!((sol.mesa.integrate() - 4.0).abs() < 1e-4);
        for (w, m) in sol.w.values().iter().zip(sol.mesa.values()) {
            if *w > 0.0 {
                assert!((m - 1.0).abs() < 1e-6);
            }
        }
        assert!(sol.residuals.max() <= 1e-8, "{:?}", sol.residuals);
    }

    #[test]
    fn iteration_is_monotone() {
        let (f, k) = mushy();
        let mut prev = vec![0.0; f.grid().len()];
        let mut ok = true;
        obstacle_iterate(&f, &k, 1e-10, 100_000, |_, w| {
            ok &= w.iter().zip(&prev).all(|(a, b)| a >= b);
            prev.copy_from_slice(w);
        })
        .unwrap();
        assert!(ok);
    }

    #[test]
    fn rejects_negative_datum_and_reports_budget() {
        let (f, k) = mushy();
        assert!(obstacle_solve(&f.map(|x| x - 0.5), &k, 1e-10, 10).is_err());
        assert!(matches!(
            obstacle_solve(&f, &k, 1e-10, 3),
            Err(Error::NoConvergence { iterations: 3, .. })
        ));
    }

    #[test]
    fn baiocchi_needs_two_snapshots() {
        let (f, _) = mushy();
        let traj = Trajectory {
            snapshots: vec![crate::solver::Snapshot { t: 0.0, u: f }],
            diagnostics: vec![],
        };
        assert_eq!(baiocchi(&traj), Err(Error::TooFewSnapshots));
    }

    #[test]
    fn fit_recovers_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|k| (k as f64, 2.0 - 0.5 * k as f64)).collect();
        let (s, r) = linear_fit(&pts).unwrap();
        assert!((s + 0.5).abs() < 1e-14 && (r + 1.0).abs() < 1e-14);
    }
}
