//! Time integration of the nonlocal Stefan problem
//!
//! ```text
//! u_t = ε⁻² (J_ε ∗ v − v),   v = (u − 1)_+,   u(0) = f
//! ```
//!
//! Three schemes share one spatial operator:
//!
//! * [`Scheme::Rk4`]: classical explicit Runge–Kutta,
//! * [`Scheme::Picard`]: fixed-point iteration of the integral form
//!   `u(t) = f + ∫₀ᵗ ε⁻²(J_ε∗v − v)` on short windows, trapezoidal in time,
//! * [`Scheme::Regularized`]: RK4 on `u_t = ε⁻²(J_ε∗Γ_n(u) − Γ_n(u))`.
//!
//! Every step is checked against the maximum principle `u ≤ ‖f‖_∞` and
//! against the temperature reaching the outermost kernel width of the grid,
//! beyond which the zero extension would stop being exact.

use std::str::FromStr;

use crate::conv::{ConvMethod, Convolver};
use crate::grid::{l1_of_difference, trapezoid};
use crate::{Error, Field, Grid, Kernel, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Rk4,
    Picard,
    Regularized,
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "rk4" => Ok(Scheme::Rk4),
            "picard" => Ok(Scheme::Picard),
            "regularized" => Ok(Scheme::Regularized),
            other => Err(Error::Config(format!("unknown solver scheme `{other}`"))),
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scheme::Rk4 => "rk4",
            Scheme::Picard => "picard",
            Scheme::Regularized => "regularized",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    pub scheme: Scheme,
    pub dt: T,
    pub t_end: T,
    /// Times at which full fields are stored, in addition to `0` and `t_end`.
    /// Each is rounded to the nearest time step.
    pub snapshot_times: Vec<T>,
    /// Index `n` of the regularization `Γ_n`.
    pub gamma_n: u32,
    pub picard_tol: T,
    pub picard_max_iter: usize,
    /// Picard window length; defaults to `ε²/4`. Must stay below `ε²/2`.
    pub picard_window: Option<T>,
    pub conv: ConvMethod,
    /// Allowed excess of `sup u` over `‖f‖_∞` before the run is aborted.
    pub sup_tolerance: T,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(scheme: Scheme, dt: T, t_end: T) -> Self {
        SolverConfig {
            scheme,
            dt,
            t_end,
            snapshot_times: Vec::new(),
            gamma_n: 1,
            picard_tol: T::lit(1e-10),
            picard_max_iter: 200,
            picard_window: None,
            conv: ConvMethod::Direct,
            sup_tolerance: T::lit(1e-6),
        }
    }

    /// RK4 with `dt = 0.1 ε²`.
    pub fn default_for(kernel: &Kernel<T>, t_end: T) -> Self {
        let e = kernel.epsilon();
        Self::new(Scheme::Rk4, T::lit(0.1) * e * e, t_end)
    }

    pub fn with_snapshots(mut self, times: impl IntoIterator<Item = T>) -> Self {
        self.snapshot_times = times.into_iter().collect();
        self
    }

    pub fn with_scheme(mut self, scheme: Scheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn validate(&self, kernel: &Kernel<T>) -> Result<()> {
        let e2 = kernel.epsilon() * kernel.epsilon();
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= T::zero()) || !self.t_end.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "t_end must be nonnegative, got {}",
                self.t_end
            )));
        }
        match self.scheme {
            Scheme::Rk4 | Scheme::Regularized => {
                let limit = T::lit(0.5) * e2;
                if self.dt > limit {
                    return Err(Error::Cfl {
                        dt: self.dt.as_f64(),
                        limit: limit.as_f64(),
                    });
                }
            }
            Scheme::Picard => {
                let w = self.window(kernel);
                if !(w < T::lit(0.5) * e2) {
                    return Err(Error::InvalidParameter(format!(
                        "picard window {w} must be shorter than eps^2/2"
                    )));
                }
                if self.picard_max_iter == 0 || !(self.picard_tol > T::zero()) {
                    return Err(Error::InvalidParameter(
                        "picard needs positive tolerance and iteration budget".into(),
                    ));
                }
            }
        }
        if self.scheme == Scheme::Regularized && self.gamma_n == 0 {
            return Err(Error::InvalidParameter("gamma_n must be >= 1".into()));
        }
        for &t in &self.snapshot_times {
            if !(t >= T::zero()) || t > self.t_end * (T::one() + T::lit(1e-12)) {
                return Err(Error::InvalidParameter(format!(
                    "snapshot time {t} outside [0, {}]",
                    self.t_end
                )));
            }
        }
        Ok(())
    }

    fn window(&self, kernel: &Kernel<T>) -> T {
        let e = kernel.epsilon();
        self.picard_window.unwrap_or(T::lit(0.25) * e * e)
    }
}

/// Per-step diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics<T> {
    pub t: T,
    pub mass: T,
    pub sup_u: T,
    /// `‖v‖₁`
    pub l1_v: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub t: T,
    pub u: Field<T>,
}

/// Stored enthalpy fields (times strictly increasing, first at `t = 0`) plus
/// diagnostics for every step.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub snapshots: Vec<Snapshot<T>>,
    pub diagnostics: Vec<Diagnostics<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn times(&self) -> Vec<T> {
        self.snapshots.iter().map(|s| s.t).collect()
    }

    pub fn first(&self) -> &Snapshot<T> {
        &self.snapshots[0]
    }

    pub fn last(&self) -> &Snapshot<T> {
        self.snapshots.last().expect("trajectory is never empty")
    }

    /// Snapshot whose time is closest to `t`.
    pub fn nearest(&self, t: T) -> &Snapshot<T> {
        self.snapshots
            .iter()
            .min_by(|a, b| {
                (a.t - t)
                    .abs()
                    .partial_cmp(&(b.t - t).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("trajectory is never empty")
    }
}

/// `Γ_n(s) = s/(n+1)` for `s ≤ (n+1)/n`, `s − 1` beyond.
pub fn gamma_n<T: Scalar>(s: T, n: u32) -> T {
    let n1 = T::lit(n as f64 + 1.0);
    if s <= n1 / T::lit(n as f64) {
        s / n1
    } else {
        s - T::one()
    }
}

/// `v = (u − 1)_+`.
pub fn temperature<T: Scalar>(u: &Field<T>) -> Field<T> {
    u.map(|x| (x - T::one()).max(T::zero()))
}

/// `ε⁻² (J_ε ∗ v − v)` with `v = (u − 1)_+`.
pub fn rhs<T: Scalar>(u: &Field<T>, kernel: &Kernel<T>) -> Result<Field<T>> {
    let conv = Convolver::new(u.grid(), kernel)?;
    let op = Operator::new(&conv, kernel, Nonlinearity::Stefan, ConvMethod::Direct);
    let mut ws = Workspace::new(u.grid().len());
    let mut out = vec![T::zero(); u.grid().len()];
    op.eval(u.values(), &mut ws, &mut out);
    Ok(Field::from_vec_unchecked(*u.grid(), out))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Nonlinearity {
    Stefan,
    Regularized(u32),
}

impl Nonlinearity {
    #[inline]
    fn apply<T: Scalar>(self, u: T) -> T {
        match self {
            Nonlinearity::Stefan => (u - T::one()).max(T::zero()),
            Nonlinearity::Regularized(n) => gamma_n(u, n),
        }
    }
}

pub(crate) struct Workspace<T> {
    v: Vec<T>,
    cv: Vec<T>,
}

impl<T: Scalar> Workspace<T> {
    pub(crate) fn new(n: usize) -> Self {
        Workspace {
            v: vec![T::zero(); n],
            cv: vec![T::zero(); n],
        }
    }
}

pub(crate) struct Operator<'a, T: Scalar> {
    conv: &'a Convolver<T>,
    scale: T,
    nl: Nonlinearity,
    method: ConvMethod,
}

impl<'a, T: Scalar> Operator<'a, T> {
    pub(crate) fn new(
        conv: &'a Convolver<T>,
        kernel: &Kernel<T>,
        nl: Nonlinearity,
        method: ConvMethod,
    ) -> Self {
        let e = kernel.epsilon();
        Operator {
            conv,
            scale: T::one() / (e * e),
            nl,
            method,
        }
    }

    pub(crate) fn eval(&self, u: &[T], ws: &mut Workspace<T>, out: &mut [T]) {
        for (v, &x) in ws.v.iter_mut().zip(u) {
            *v = self.nl.apply(x);
        }
        self.conv.apply(&ws.v, &mut ws.cv, self.method);
        for ((o, &c), &v) in out.iter_mut().zip(&ws.cv).zip(&ws.v) {
            *o = self.scale * (c - v);
        }
    }
}

/// Result of a Picard solve on one window.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardOutcome<T> {
    pub u: Field<T>,
    pub iterations: usize,
    /// `max_j ‖U^{k+1}(t_j) − U^k(t_j)‖₁` for each sweep.
    pub residuals: Vec<T>,
}

/// Fixed point of the time-discrete operator
/// `(T u)(t_j) = u0 + Σ trapezoid_{l ≤ j} ε⁻²(J_ε∗v − v)(t_l)` on `[0, window]`
/// with step `dt`; returns the state at `window`.
pub fn picard_window<T: Scalar>(
    u0: &Field<T>,
    kernel: &Kernel<T>,
    window: T,
    dt: T,
    tol: T,
    max_iter: usize,
) -> Result<PicardOutcome<T>> {
    let e2 = kernel.epsilon() * kernel.epsilon();
    if !(window > T::zero()) || !(window < T::lit(0.5) * e2) {
        return Err(Error::InvalidParameter(format!(
            "picard window {window} must lie in (0, eps^2/2)"
        )));
    }
    if !(dt > T::zero()) || !(tol > T::zero()) || max_iter == 0 {
        return Err(Error::InvalidParameter(
            "picard needs positive dt, tolerance and iteration budget".into(),
        ));
    }
    let conv = Convolver::new(u0.grid(), kernel)?;
    let op = Operator::new(&conv, kernel, Nonlinearity::Stefan, ConvMethod::Direct);
    let steps = steps_for(window, dt);
    let dt = window / T::lit(steps as f64);
    let mut ws = Workspace::new(u0.grid().len());
    let (levels, iterations, residuals) =
        picard_levels(&op, u0.grid(), u0.values(), steps, dt, tol, max_iter, &mut ws)?;
    Ok(PicardOutcome {
        u: Field::from_vec_unchecked(*u0.grid(), levels.into_iter().last().unwrap()),
        iterations,
        residuals,
    })
}

type Levels<T> = (Vec<Vec<T>>, usize, Vec<T>);

#[allow(clippy::too_many_arguments)]
fn picard_levels<T: Scalar>(
    op: &Operator<'_, T>,
    grid: &Grid<T>,
    u0: &[T],
    steps: usize,
    dt: T,
    tol: T,
    max_iter: usize,
    ws: &mut Workspace<T>,
) -> Result<Levels<T>> {
    let n = u0.len();
    let half_dt = dt * T::lit(0.5);
    let mut levels = vec![u0.to_vec(); steps + 1];
    let mut g = vec![vec![T::zero(); n]; steps + 1];
    op.eval(u0, ws, &mut g[0]);
    let mut residuals = Vec::new();
    let mut acc = vec![T::zero(); n];
    for k in 1..=max_iter {
        for j in 1..=steps {
            op.eval(&levels[j], ws, &mut g[j]);
        }
        acc.iter_mut().for_each(|a| *a = T::zero());
        let mut residual = T::zero();
        for j in 1..=steps {
            for i in 0..n {
                acc[i] = acc[i] + half_dt * (g[j - 1][i] + g[j][i]);
            }
            let next: Vec<T> = u0.iter().zip(&acc).map(|(a, b)| *a + *b).collect();
            residual = residual.max(l1_of_difference(grid, &next, &levels[j]));
            levels[j] = next;
        }
        residuals.push(residual);
        if residual <= tol {
            return Ok((levels, k, residuals));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
        residual: residuals.last().copied().unwrap_or(T::nan()).as_f64(),
    })
}

fn steps_for<T: Scalar>(span: T, dt: T) -> usize {
    ((span / dt) - T::lit(1e-9)).ceil().to_usize().unwrap_or(1).max(1)
}

struct Monitor<'a, T: Scalar> {
    grid: Grid<T>,
    margin: usize,
    bound: T,
    guard_mass: T,
    kernel: &'a Kernel<T>,
}

impl<T: Scalar> Monitor<'_, T> {
    fn diagnostics(&self, t: T, u: &[T]) -> Result<Diagnostics<T>> {
        let mut sup = T::neg_infinity();
        for &x in u {
            if !x.is_finite() {
                return Err(Error::Instability {
                    t: t.as_f64(),
                    sup: f64::NAN,
                    bound: self.bound.as_f64(),
                });
            }
            sup = sup.max(x);
        }
        if sup > self.bound {
            return Err(Error::Instability {
                t: t.as_f64(),
                sup: sup.as_f64(),
                bound: self.bound.as_f64(),
            });
        }
        let v: Vec<T> = u.iter().map(|&x| (x - T::one()).max(T::zero())).collect();
        Ok(Diagnostics {
            t,
            mass: trapezoid(&self.grid, u),
            sup_u: sup,
            l1_v: trapezoid(&self.grid, &v),
        })
    }

    /// The zero extension is exact while `φ(u)` vanishes on the outer
    /// `ε R_J` of the grid.
    fn guard(&self, t: T, u: &[T], nl: Nonlinearity) -> Result<()> {
        let n = u.len();
        let h = self.grid.h();
        let edge: T = u[..self.margin]
            .iter()
            .chain(&u[n - self.margin..])
            .map(|&x| nl.apply(x).abs())
            .sum::<T>()
            * h;
        if edge > self.guard_mass {
            return Err(Error::DomainTooNarrow(format!(
                "temperature reached the outer {} of the grid at t = {t} (mass {edge:e})",
                self.kernel.support_radius()
            )));
        }
        Ok(())
    }
}

/// Integrates from `f` to `config.t_end`.
pub fn evolve<T: Scalar>(
    f: &Field<T>,
    kernel: &Kernel<T>,
    config: &SolverConfig<T>,
) -> Result<Trajectory<T>> {
    config.validate(kernel)?;
    let grid = *f.grid();
    let conv = Convolver::new(&grid, kernel)?;
    let nl = match config.scheme {
        Scheme::Regularized => Nonlinearity::Regularized(config.gamma_n),
        _ => Nonlinearity::Stefan,
    };
    let op = Operator::new(&conv, kernel, nl, config.conv);
    let monitor = Monitor {
        grid,
        margin: (conv.half_width() + 1).min(grid.len() / 2),
        bound: f.sup_abs() + config.sup_tolerance,
        guard_mass: T::lit(1e-9) * (f.l1_norm() + T::min_positive_value()),
        kernel,
    };

    let nsteps = if config.t_end > T::zero() {
        steps_for(config.t_end, config.dt)
    } else {
        0
    };
    let dt = if nsteps > 0 {
        config.t_end / T::lit(nsteps as f64)
    } else {
        config.dt
    };
    let mut marks: Vec<usize> = config
        .snapshot_times
        .iter()
        .map(|&t| (t / dt).round().to_usize().unwrap_or(0).min(nsteps))
        .chain([0, nsteps])
        .collect();
    marks.sort_unstable();
    marks.dedup();
    let time = |k: usize| dt * T::lit(k as f64);

    monitor.guard(T::zero(), f.values(), nl)?;
    let mut traj = Trajectory {
        snapshots: vec![Snapshot {
            t: T::zero(),
            u: f.clone(),
        }],
        diagnostics: vec![monitor.diagnostics(T::zero(), f.values())?],
    };
    let mut next_mark = 1;
    let mut record = |k: usize, u: &[T], traj: &mut Trajectory<T>| -> Result<()> {
        let t = time(k);
        traj.diagnostics.push(monitor.diagnostics(t, u)?);
        monitor.guard(t, u, nl)?;
        if next_mark < marks.len() && marks[next_mark] == k {
            traj.snapshots.push(Snapshot {
                t,
                u: Field::from_vec_unchecked(grid, u.to_vec()),
            });
            next_mark += 1;
        }
        Ok(())
    };

    let n = grid.len();
    let mut ws = Workspace::new(n);
    let mut u = f.values().to_vec();
    match config.scheme {
        Scheme::Rk4 | Scheme::Regularized => {
            let mut k1 = vec![T::zero(); n];
            let mut k2 = vec![T::zero(); n];
            let mut k3 = vec![T::zero(); n];
            let mut k4 = vec![T::zero(); n];
            let mut stage = vec![T::zero(); n];
            let half = dt * T::lit(0.5);
            let sixth = dt / T::lit(6.0);
            let two = T::lit(2.0);
            for k in 1..=nsteps {
                op.eval(&u, &mut ws, &mut k1);
                axpy_into(&mut stage, &u, half, &k1);
                op.eval(&stage, &mut ws, &mut k2);
                axpy_into(&mut stage, &u, half, &k2);
                op.eval(&stage, &mut ws, &mut k3);
                axpy_into(&mut stage, &u, dt, &k3);
                op.eval(&stage, &mut ws, &mut k4);
                for i in 0..n {
                    u[i] = u[i] + sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i]);
                }
                record(k, &u, &mut traj)?;
            }
        }
        Scheme::Picard => {
            let per_window = steps_for(config.window(kernel), dt);
            let mut k = 0;
            while k < nsteps {
                let steps = per_window.min(nsteps - k);
                let (levels, _, _) = picard_levels(
                    &op,
                    &grid,
                    &u,
                    steps,
                    dt,
                    config.picard_tol,
                    config.picard_max_iter,
                    &mut ws,
                )?;
                for (j, level) in levels.iter().enumerate().skip(1) {
                    record(k + j, level, &mut traj)?;
                }
                u = levels.into_iter().last().unwrap();
                k += steps;
            }
        }
    }
    Ok(traj)
}

#[inline]
fn axpy_into<T: Scalar>(out: &mut [T], x: &[T], a: T, y: &[T]) {
    for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Datum;

    fn mushy(n: usize) -> (Field<f64>, Kernel<f64>) {
        let g = Grid::new(-6.0, 6.0, n).unwrap();
        (Datum::mushy_preset().sample(&g), Kernel::polynomial())
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_n(0.0, 3), 0.0);
        assert_eq!(gamma_n(2.0, 1), 1.0);
        assert_eq!(2.0 / 2.0, 2.0 - 1.0);
        assert!((gamma_n(0.5f64, 4) - 0.1).abs() < 1e-15);
        assert_eq!(gamma_n(3.0, 1), 2.0);
    }

    #[test]
    fn temperature_examples() {
        let g = Grid::new(-6.0, 6.0, 2048).unwrap();
        let half = Field::from_fn(g, |_| 0.5).unwrap();
        assert!(temperature(&half).values().iter().all(|v| *v == 0.0));
        let two = Field::from_fn(g, |_| 2.0).unwrap();
        assert!(temperature(&two).values().iter().all(|v| *v == 1.0));
        let f = Datum::mushy_preset().sample(&g);
        let v = temperature(&f);
        let expect = Datum::indicator(-1.0, 1.0, 1.0).sample(&g);
        assert!(v.l1_distance(&expect).unwrap() < 2.0 * g.h());
    }

    #[test]
    fn rhs_examples() {
        // h = 2/201 puts ±1 on cell faces, so the sampled v is an exact indicator
        let (f, k) = mushy(1207);
        let g = *f.grid();
        let low = f.map(|x| x.min(1.0));
        assert!(rhs(&low, &k).unwrap().values().iter().all(|v| *v == 0.0));
        let r = rhs(&f, &k).unwrap();
        // at x = 0: ∫_{-1}^{1} J = 1, minus v = 1
        let i0 = g.nearest(0.0);
        assert!(r.values()[i0].abs() < 1e-6, "{:e}", r.values()[i0]);
        // near x = 1.5: 0.75 ∫_{x-1}^{1} (1 − z²) dz, which is 0.15625 at x = 1.5
        let i1 = g.nearest(1.5);
        let a = g.x(i1) - 1.0;
        let exact = 0.75 * (2.0 / 3.0 - (a - a * a * a / 3.0));
        assert!((r.values()[i1] - exact).abs() < 1e-4, "{} vs {exact}", r.values()[i1]);
        assert!((0.75f64 * (0.5 - 7.0 / 24.0) - 0.15625).abs() < 1e-15);
    }

    #[test]
    fn low_datum_is_stationary() {
        let g = Grid::new(-6.0, 6.0, 512).unwrap();
        let f = Datum::indicator(-1.0, 1.0, 0.9).sample(&g);
        let k = Kernel::polynomial();
        for scheme in [Scheme::Rk4, Scheme::Picard] {
            let cfg = SolverConfig::new(scheme, 0.05, 1.0).with_snapshots([0.5]);
            let traj = evolve(&f, &k, &cfg).unwrap();
            for s in &traj.snapshots {
                assert_eq!(s.u, f);
            }
        }
    }

    #[test]
    fn config_validation() {
        let k = Kernel::<f64>::polynomial().rescale(0.5).unwrap();
        assert!(matches!(
            SolverConfig::new(Scheme::Rk4, 0.2, 1.0).validate(&k),
            Err(Error::Cfl { .. })
        ));
        let mut p = SolverConfig::new(Scheme::Picard, 0.01, 1.0);
        p.picard_window = Some(0.2);
        assert!(p.validate(&k).is_err());
        p.picard_window = Some(0.1);
        assert!(p.validate(&k).is_ok());
        let s = SolverConfig::new(Scheme::Rk4, 0.01, 1.0).with_snapshots([2.0]);
        assert!(s.validate(&k).is_err());
        assert!("rk5".parse::<Scheme>().is_err());
        assert_eq!("picard".parse::<Scheme>().unwrap(), Scheme::Picard);
    }

    #[test]
    fn picard_trivial_and_contracting() {
        let (f, k) = mushy(512);
        let low = f.map(|x| x.min(0.8));
        let out = picard_window(&low, &k, 0.1, 0.01, 1e-12, 50).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.u, low);

        let out = picard_window(&f, &k, 0.1, 0.01, 1e-12, 100).unwrap();
        for w in out.residuals.windows(2) {
            if w[0] > 1e-13 {
                assert!(w[1] <= 2.0 * 0.1 * w[0] * (1.0 + 1e-9), "{} -> {}", w[0], w[1]);
            }
        }
        assert!(picard_window(&f, &k, 0.6, 0.01, 1e-12, 100).is_err());
    }

    #[test]
    fn picard_reports_exhausted_budget() {
        let (f, k) = mushy(512);
        match picard_window(&f, &k, 0.4, 0.01, 1e-14, 2) {
            Err(Error::NoConvergence { iterations, .. }) => assert_eq!(iterations, 2),
            other => panic!("expected NoConvergence, got {other:?}"),
        }
    }

    #[test]
    fn narrow_domain_detected() {
        let g = Grid::new(-1.5, 1.5, 301).unwrap();
        let f = Datum::mushy_preset().sample(&g);
        let k = Kernel::polynomial();
        let cfg = SolverConfig::new(Scheme::Rk4, 0.05, 1.0);
        assert!(matches!(evolve(&f, &k, &cfg), Err(Error::DomainTooNarrow(_))));
    }

    #[test]
    fn snapshots_are_ordered_and_start_at_zero() {
        let (f, k) = mushy(512);
        let cfg = SolverConfig::new(Scheme::Rk4, 0.05, 1.0).with_snapshots([0.5, 0.25, 0.5]);
        let traj = evolve(&f, &k, &cfg).unwrap();
        let t = traj.times();
        assert_eq!(t[0], 0.0);
        assert_eq!(traj.first().u, f);
        assert!(t.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(t.len(), 4);
        assert_eq!(traj.diagnostics.len(), 21);
    }

    #[test]
    fn f32_run() {
        let g = Grid::<f32>::new(-6.0, 6.0, 512).unwrap();
        let f = Datum::mushy_preset().sample(&g);
        let k = Kernel::<f32>::polynomial();
        let cfg = SolverConfig::new(Scheme::Rk4, 0.05f32, 1.0);
        let traj = evolve(&f, &k, &cfg).unwrap();
        let drift = (traj.last().u.integrate() - f.integrate()).abs();
        assert!(drift < 1e-4, "{drift}");
    }
}
