//! The linear nonlocal heat equation `u_t = J_ε∗u − u` solved exactly in
//! Fourier space on a periodic cell.
//!
//! The `n` nodes of a [`Grid`] are read as one period of length `L = n h`.
//! With `Ĵ` the symbol of the kernel,
//!
//! ```text
//! û(ξ, t) = e^{(Ĵ(ξ) − 1) t} f̂(ξ)
//! ```
//!
//! which splits as `u(t) = e^{−t} f + ω(t)∗f`, the second term being the
//! regular part. The local comparison is `h_t = (m₂ ε² / 2) h_xx`.
//!
//! `Ĵ` is obtained by quadrature of the profile against cosines, then divided
//! by its value at `ξ = 0` so the zero mode is conserved to round-off.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::geometry::default_support_delta;
use crate::{Error, Field, Grid, Kernel, Result, Scalar};

const SYMBOL_PANELS: usize = 4096;
const MOMENT_STEPS: f64 = 20_000.0;

/// Fourier data for one periodic grid and kernel.
pub struct SpectralSolver<T: Scalar> {
    grid: Grid<T>,
    xi: Vec<T>,
    symbol: Vec<T>,
    diffusivity: T,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Scalar> std::fmt::Debug for SpectralSolver<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralSolver")
            .field("grid", &self.grid)
            .field("diffusivity", &self.diffusivity)
            .finish()
    }
}

impl<T: Scalar> SpectralSolver<T> {
    pub fn new(grid: &Grid<T>, kernel: &Kernel<T>) -> Result<Self> {
        let n = grid.len();
        let period = grid.h() * T::lit(n as f64);
        if kernel.support_radius() * T::lit(2.0) > period {
            return Err(Error::KernelWiderThanDomain {
                radius: kernel.support_radius().as_f64(),
                length: period.as_f64(),
            });
        }
        let two_pi = T::lit(2.0) * T::PI();
        let xi: Vec<T> = (0..n)
            .map(|k| {
                let m = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
                two_pi * T::lit(m) / period
            })
            .collect();
        let zero = kernel.fourier_symbol(T::zero(), SYMBOL_PANELS);
        let half: Vec<T> = (0..=n / 2)
            .map(|k| kernel.fourier_symbol(xi[k], SYMBOL_PANELS) / zero)
            .collect();
        let symbol = (0..n).map(|k| half[k.min(n - k)]).collect();
        let m2 = kernel.second_moment(kernel.radius() / T::lit(MOMENT_STEPS))?;
        let eps = kernel.epsilon();
        let mut planner = FftPlanner::new();
        Ok(SpectralSolver {
            grid: *grid,
            xi,
            symbol,
            diffusivity: m2 * eps * eps * T::lit(0.5),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// Period `L = n h`.
    pub fn period(&self) -> T {
        self.grid.h() * T::lit(self.grid.len() as f64)
    }

    /// Angular frequencies in FFT order.
    pub fn frequencies(&self) -> &[T] {
        &self.xi
    }

    /// `Ĵ(ξ_k)` in FFT order.
    pub fn symbol(&self) -> &[T] {
        &self.symbol
    }

    /// `m₂ ε² / 2`, the diffusivity of the local comparison equation.
    pub fn diffusivity(&self) -> T {
        self.diffusivity
    }

    pub fn transform(&self, f: &Field<T>) -> Result<Vec<Complex<T>>> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut buf: Vec<Complex<T>> = f
            .values()
            .iter()
            .map(|v| Complex::new(*v, T::zero()))
            .collect();
        self.forward.process(&mut buf);
        Ok(buf)
    }

    /// Inverse transform of `mult(k) · f̂_k`.
    pub fn synthesize(&self, f_hat: &[Complex<T>], mult: impl Fn(usize) -> T) -> Field<T> {
        let mut buf: Vec<Complex<T>> = f_hat
            .iter()
            .enumerate()
            .map(|(k, c)| *c * mult(k))
            .collect();
        self.inverse.process(&mut buf);
        let scale = T::one() / T::lit(buf.len() as f64);
        Field::from_vec_unchecked(self.grid, buf.iter().map(|c| c.re * scale).collect())
    }

    /// `u(t)` without the domain check.
    pub fn evolve(&self, f: &Field<T>, t: T) -> Result<Field<T>> {
        let f_hat = self.transform(f)?;
        Ok(self.synthesize(&f_hat, |k| ((self.symbol[k] - T::one()) * t).exp()))
    }

    /// `u(t) − e^{−t} f` without the domain check.
    pub fn regular(&self, f: &Field<T>, t: T) -> Result<Field<T>> {
        let f_hat = self.transform(f)?;
        let damp = (-t).exp();
        Ok(self.synthesize(&f_hat, |k| ((self.symbol[k] - T::one()) * t).exp() - damp))
    }

    /// Local heat flow `h(t)` without the domain check.
    pub fn local(&self, f: &Field<T>, t: T) -> Result<Field<T>> {
        let f_hat = self.transform(f)?;
        Ok(self.synthesize(&f_hat, |k| self.local_multiplier(k, t)))
    }

    fn local_multiplier(&self, k: usize, t: T) -> T {
        (-self.diffusivity * self.xi[k] * self.xi[k] * t).exp()
    }

    /// Requires `L ≥ 20 (R_f + √(m₂ ε² t))`, with `R_f` measured from the
    /// centre of the cell.
    pub fn check_domain(&self, f: &Field<T>, t: T) -> Result<()> {
        let g = &self.grid;
        let centre = (g.xmin() + g.xmax()) * T::lit(0.5);
        let delta = default_support_delta(f);
        let r_f = f
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > delta)
            .map(|(i, _)| (g.x(i) - centre).abs())
            .fold(T::zero(), |a, b| a.max(b));
        let spread = (self.diffusivity * T::lit(2.0) * t.max(T::zero())).sqrt();
        let needed = T::lit(20.0) * (r_f + spread);
        if self.period() < needed {
            return Err(Error::DomainTooNarrow(format!(
                "periodic cell of length {} is shorter than 20 (R_f + sqrt(m2 t)) = {}",
                self.period(),
                needed
            )));
        }
        Ok(())
    }
}

fn check_time<T: Scalar>(t: T) -> Result<()> {
    if !(t >= T::zero()) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite and nonnegative, got {t}")));
    }
    Ok(())
}

/// `u(t)` for `u_t = J_ε∗u − u`, `u(0) = f`.
pub fn heat_nonlocal<T: Scalar>(f: &Field<T>, kernel: &Kernel<T>, t: T) -> Result<Field<T>> {
    check_time(t)?;
    let s = SpectralSolver::new(f.grid(), kernel)?;
    s.check_domain(f, t)?;
    s.evolve(f, t)
}

/// `u(t) − e^{−t} f`, the regular part of the semigroup applied to `f`.
pub fn regular_part<T: Scalar>(f: &Field<T>, kernel: &Kernel<T>, t: T) -> Result<Field<T>> {
    check_time(t)?;
    let s = SpectralSolver::new(f.grid(), kernel)?;
    s.check_domain(f, t)?;
    s.regular(f, t)
}

/// `h(t)` for `h_t = (m₂ ε² / 2) h_xx`, `h(0) = f`.
pub fn local_heat<T: Scalar>(f: &Field<T>, kernel: &Kernel<T>, t: T) -> Result<Field<T>> {
    check_time(t)?;
    let s = SpectralSolver::new(f.grid(), kernel)?;
    s.check_domain(f, t)?;
    s.local(f, t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayRow<T> {
    pub t: T,
    /// `t^{1/2} max |u(t) − e^{−t} f − h(t)|`
    pub d: T,
    /// `‖u(t)‖₁`
    pub l1_u: T,
    /// `max |u(t) − e^{−t} f|`
    pub sup_regular: T,
}

/// Evaluates the refined decay quantity `D(t)` along `t_list`.
pub fn decay_check<T: Scalar>(f: &Field<T>, kernel: &Kernel<T>, t_list: &[T]) -> Result<Vec<DecayRow<T>>> {
    if t_list.is_empty() || t_list.windows(2).any(|w| !(w[1] > w[0])) || !(t_list[0] > T::zero()) {
        return Err(Error::InvalidParameter(
            "decay times must be positive and strictly increasing".into(),
        ));
    }
    let s = SpectralSolver::new(f.grid(), kernel)?;
    s.check_domain(f, *t_list.last().unwrap())?;
    let f_hat = s.transform(f)?;
    Ok(t_list
        .iter()
        .map(|&t| {
            let damp = (-t).exp();
            let growth = |k: usize| ((s.symbol[k] - T::one()) * t).exp();
            let u = s.synthesize(&f_hat, growth);
            let diff = s.synthesize(&f_hat, |k| growth(k) - damp - s.local_multiplier(k, t));
            let reg = s.synthesize(&f_hat, |k| growth(k) - damp);
            DecayRow {
                t,
                d: t.sqrt() * diff.sup_abs(),
                l1_u: u.l1_norm(),
                sup_regular: reg.sup_abs(),
            }
        })
        .collect())
}

/// Change in `u(t)` on the original nodes when the periodic cell is doubled
/// at fixed spacing. The datum is sampled on both cells.
pub fn aliasing_defect<T: Scalar>(
    datum: &crate::Datum,
    grid: &Grid<T>,
    kernel: &Kernel<T>,
    t: T,
) -> Result<T> {
    let n = grid.len();
    let offset = n / 2;
    let h = grid.h();
    let start = grid.xmin() - h * T::lit(offset as f64);
    let wide = Grid::new(start, start + h * T::lit((2 * n - 1) as f64), 2 * n)?;
    let a = SpectralSolver::new(grid, kernel)?.evolve(&datum.sample(grid), t)?;
    let b = SpectralSolver::new(&wide, kernel)?.evolve(&datum.sample(&wide), t)?;
    Ok(a
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (*v - b.values()[i + offset]).abs())
        .fold(T::zero(), |m, x| m.max(x)))
}
