//! The local Stefan problem `u_t = (m₂/2) Δ(u − 1)_+` and the ε → 0 study
//! comparing the rescaled nonlocal problem against it.

use rayon::prelude::*;

use crate::conv::{ConvMethod, Convolver};
use crate::geometry::mushy_region;
use crate::grid::trapezoid;
use crate::solver::{evolve, Diagnostics, Snapshot, SolverConfig, Trajectory};
use crate::{Datum, Error, Field, Grid, Kernel, Result, Scalar};

/// Explicit finite differences with zero Dirichlet padding:
/// `u_i ← u_i + dt (m₂/2) (v_{i−1} − 2 v_i + v_{i+1}) / h²`.
///
/// Diagnostics are recorded at the stored snapshots only.
pub fn local_stefan_solve<T: Scalar>(
    f: &Field<T>,
    m2: T,
    dt: T,
    t_end: T,
    snapshots: &[T],
) -> Result<Trajectory<T>> {
    let grid = *f.grid();
    let h = grid.h();
    if !(m2 > T::zero()) {
        return Err(Error::InvalidParameter(format!("m2 must be positive, got {m2}")));
    }
    if !(dt > T::zero()) || !(t_end >= T::zero()) {
        return Err(Error::InvalidParameter("need dt > 0 and t_end >= 0".into()));
    }
    let limit = h * h / (T::lit(2.0) * m2);
    if dt > limit {
        return Err(Error::Cfl {
            dt: dt.as_f64(),
            limit: limit.as_f64(),
        });
    }
    let nsteps = if t_end > T::zero() {
        ((t_end / dt) - T::lit(1e-9)).ceil().to_usize().unwrap_or(1).max(1)
    } else {
        0
    };
    let dt = if nsteps > 0 { t_end / T::lit(nsteps as f64) } else { dt };
    let mut marks: Vec<usize> = snapshots
        .iter()
        .map(|&t| (t / dt).round().to_usize().unwrap_or(0).min(nsteps))
        .chain([0, nsteps])
        .collect();
    marks.sort_unstable();
    marks.dedup();

    let n = grid.len();
    let coef = dt * m2 * T::lit(0.5) / (h * h);
    let two = T::lit(2.0);
    let bound = f.sup_abs() + T::lit(1e-9);
    let mut u = f.values().to_vec();
    let mut v: Vec<T> = u.iter().map(|&x| (x - T::one()).max(T::zero())).collect();
    let diag = |t: T, u: &[T], v: &[T]| Diagnostics {
        t,
        mass: trapezoid(&grid, u),
        sup_u: u.iter().copied().fold(T::neg_infinity(), T::max),
        l1_v: trapezoid(&grid, v),
    };
    let mut traj = Trajectory {
        snapshots: vec![Snapshot { t: T::zero(), u: f.clone() }],
        diagnostics: vec![diag(T::zero(), &u, &v)],
    };
    let mut next_mark = 1;
    for k in 1..=nsteps {
        if let Some((lo, hi)) = crate::conv::nonzero_range(&v) {
            if lo == 0 || hi == n - 1 {
                return Err(Error::DomainTooNarrow(format!(
                    "local temperature reached the grid boundary at t = {}",
                    dt * T::lit(k as f64)
                )));
            }
            let lap = |i: usize| v[i - 1] - two * v[i] + v[i + 1];
            let upd: Vec<T> = ((lo - 1)..=(hi + 1)).map(lap).collect();
            for (off, d) in upd.into_iter().enumerate() {
                let i = lo - 1 + off;
                u[i] = u[i] + coef * d;
            }
            for i in (lo - 1)..=(hi + 1) {
                v[i] = (u[i] - T::one()).max(T::zero());
            }
        }
        if next_mark < marks.len() && marks[next_mark] == k {
            let t = dt * T::lit(k as f64);
            let d = diag(t, &u, &v);
            if !(d.sup_u <= bound) {
                return Err(Error::Instability {
                    t: t.as_f64(),
                    sup: d.sup_u.as_f64(),
                    bound: bound.as_f64(),
                });
            }
            traj.diagnostics.push(d);
            traj.snapshots.push(Snapshot {
                t,
                u: Field::from_vec_unchecked(grid, u.clone()),
            });
            next_mark += 1;
        }
    }
    Ok(traj)
}

/// Largest stable step `h² / (2 m₂)` for [`local_stefan_solve`].
pub fn local_cfl_limit<T: Scalar>(grid: &Grid<T>, m2: T) -> T {
    grid.h() * grid.h() / (T::lit(2.0) * m2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyOptions<T> {
    /// Resolution factor of the local reference solver.
    pub refine: usize,
    pub mushy_delta: T,
    /// Nonlocal step as a fraction of `ε²`.
    pub dt_factor: T,
    /// Local step as a fraction of its stability limit.
    pub local_cfl_fraction: T,
}

impl<T: Scalar> Default for StudyOptions<T> {
    fn default() -> Self {
        StudyOptions {
            refine: 4,
            mushy_delta: T::lit(1e-6),
            dt_factor: T::lit(0.1),
            local_cfl_fraction: T::lit(0.9),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsRun<T> {
    pub eps: T,
    pub u: Field<T>,
    /// `‖u^ε(t_eval) − u_local(t_eval)‖₁`
    pub l1_error: T,
    /// `|M^ε(t_eval)|`
    pub mushy_measure: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsStudy<T> {
    pub t_eval: T,
    pub grid: Grid<T>,
    pub m2: T,
    /// Local solution at `t_eval`, restricted to `grid`.
    pub local: Field<T>,
    /// One run per ε, in the order of the input list.
    pub runs: Vec<EpsRun<T>>,
}

/// Runs the rescaled nonlocal problem for every `ε` in `eps_list` and compares
/// each against the local Stefan problem with diffusivity `m₂/2`, solved on a
/// grid `opts.refine` times finer.
pub fn eps_convergence_study<T: Scalar>(
    datum: &Datum,
    grid: &Grid<T>,
    kernel: &Kernel<T>,
    eps_list: &[T],
    t_eval: T,
    opts: &StudyOptions<T>,
) -> Result<EpsStudy<T>> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("empty eps list".into()));
    }
    if eps_list.iter().any(|&e| !(e > T::zero() && e <= T::one())) {
        return Err(Error::InvalidParameter("eps values must lie in (0, 1]".into()));
    }
    if eps_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter("eps list must be strictly decreasing".into()));
    }
    if !(t_eval > T::zero()) {
        return Err(Error::InvalidParameter("t_eval must be positive".into()));
    }
    let m2 = kernel.second_moment(kernel.radius() / T::lit(1000.0))?;

    let fine = grid.refine(opts.refine)?;
    let f_fine = datum.sample(&fine);
    let dt_local = opts.local_cfl_fraction * local_cfl_limit(&fine, m2);
    let local = local_stefan_solve(&f_fine, m2, dt_local, t_eval, &[])?;
    let local = local.last().u.restrict(grid)?;

    let f = datum.sample(grid);
    let runs = eps_list
        .par_iter()
        .map(|&eps| -> Result<EpsRun<T>> {
            let k = kernel.rescale(eps)?;
            let cfg = SolverConfig::new(
                crate::solver::Scheme::Rk4,
                opts.dt_factor * eps * eps,
                t_eval,
            );
            let traj = evolve(&f, &k, &cfg)?;
            let u = traj.last().u.clone();
            let l1_error = u.l1_distance(&local)?;
            let mushy_measure = mushy_region(&u, opts.mushy_delta)?.measure();
            Ok(EpsRun {
                eps,
                u,
                l1_error,
                mushy_measure,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EpsStudy {
        t_eval,
        grid: *grid,
        m2,
        local,
        runs,
    })
}

/// Weak-form residual of a nonlocal trajectory against a time-independent
/// test function `φ`:
///
/// ```text
/// max_t | ∫u(t)φ − ∫fφ − ε⁻² ∫₀ᵗ ∫ v (J_ε∗φ − φ) |
/// ```
///
/// with the time integral taken by the trapezoidal rule over the snapshots.
pub fn weak_form_residual<T: Scalar>(
    traj: &Trajectory<T>,
    kernel: &Kernel<T>,
    phi: impl Fn(T) -> T,
) -> Result<T> {
    let grid = *traj.first().u.grid();
    let phi = Field::from_fn(grid, phi)?;
    let conv = Convolver::new(&grid, kernel)?;
    let jphi = conv.convolve(&phi, ConvMethod::Direct)?;
    let scale = T::one() / (kernel.epsilon() * kernel.epsilon());
    let pair = |a: &Field<T>, b: &Field<T>| -> T {
        let prod: Vec<T> = a.values().iter().zip(b.values()).map(|(x, y)| *x * *y).collect();
        trapezoid(&grid, &prod)
    };
    let lap_phi = jphi.axpby(T::one(), &phi, -T::one())?;
    let f = &traj.first().u;
    let base = pair(f, &phi);
    let flux = |u: &Field<T>| pair(&crate::solver::temperature(u), &lap_phi) * scale;
    let mut integral = T::zero();
    let mut prev = flux(f);
    let mut worst = T::zero();
    for w in traj.snapshots.windows(2) {
        let cur = flux(&w[1].u);
        integral = integral + (w[1].t - w[0].t) * T::lit(0.5) * (prev + cur);
        prev = cur;
        let r = (pair(&w[1].u, &phi) - base - integral).abs();
        worst = worst.max(r);
    }
    Ok(worst)
}
