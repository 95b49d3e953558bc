//! Discrete convolution `J_ε ∗ g` on a uniform grid.
//!
//! Fields are extended by zero outside the grid (whole-line problem with
//! compactly supported data) and integrated with the trapezoidal rule:
//!
//! ```text
//! (J ∗ g)(x_i) = Σ_j w_j k_{i−j} g(x_j),   k_m = h J_ε(m h) / S,   S = h Σ_m J_ε(m h)
//! ```
//!
//! `S` is the trapezoidal mass of the sampled kernel. It differs from 1 by
//! `O(h²)`; dividing the stencil by this single scalar makes `Σ_m k_m = 1`,
//! so the discrete equation conserves mass exactly for data supported away
//! from the boundary. The defect is kept in [`Convolver::sampled_mass`].
//!
//! Two evaluation paths are provided: a direct sum restricted to the nonzero
//! range of the input (fixed summation order, so results do not depend on
//! the thread count), and a zero-padded FFT product.

use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Field, Grid, Kernel, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConvMethod {
    #[default]
    Direct,
    Fft,
}

/// Output-node × tap products above which the direct path runs in parallel.
const PARALLEL_WORK: usize = 1 << 18;

struct FftPlan<T: Scalar> {
    size: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    kernel_hat: Vec<Complex<T>>,
}

/// Kernel sampled on a grid, ready to be applied to fields on that grid.
pub struct Convolver<T: Scalar> {
    grid: Grid<T>,
    half_width: usize,
    taps: Vec<T>,
    sampled_mass: T,
    fft: OnceLock<FftPlan<T>>,
}

impl<T: Scalar> std::fmt::Debug for Convolver<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Convolver")
            .field("grid", &self.grid)
            .field("half_width", &self.half_width)
            .field("sampled_mass", &self.sampled_mass)
            .finish()
    }
}

impl<T: Scalar> Convolver<T> {
    /// Normalized stencil (unit discrete mass).
    pub fn new(grid: &Grid<T>, kernel: &Kernel<T>) -> Result<Self> {
        Self::build(grid, kernel, true)
    }

    /// Raw trapezoidal samples `h J_ε(m h)`, without the mass normalization.
    pub fn unnormalized(grid: &Grid<T>, kernel: &Kernel<T>) -> Result<Self> {
        Self::build(grid, kernel, false)
    }

    fn build(grid: &Grid<T>, kernel: &Kernel<T>, normalize: bool) -> Result<Self> {
        let radius = kernel.support_radius();
        if radius > grid.length() {
            return Err(Error::KernelWiderThanDomain {
                radius: radius.as_f64(),
                length: grid.length().as_f64(),
            });
        }
        let h = grid.h();
        let m = (radius / h * (T::one() + T::lit(1e-12)))
            .floor()
            .to_usize()
            .unwrap_or(0)
            .min(grid.len() - 1);
        if m == 0 {
            return Err(Error::InvalidParameter(format!(
                "kernel radius {radius} is not resolved by grid spacing {h}"
            )));
        }
        let raw: Vec<T> = (0..=2 * m)
            .map(|k| h * kernel.evaluate(h * (T::lit(k as f64) - T::lit(m as f64))))
            .collect();
        let sampled_mass: T = raw.iter().copied().sum();
        let taps = if normalize {
            raw.iter().map(|&t| t / sampled_mass).collect()
        } else {
            raw
        };
        Ok(Convolver {
            grid: *grid,
            half_width: m,
            taps,
            sampled_mass,
            fft: OnceLock::new(),
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// Number of nodes the stencil reaches on each side.
    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn taps(&self) -> &[T] {
        &self.taps
    }

    /// Trapezoidal mass `h Σ J_ε(m h)` of the raw samples.
    pub fn sampled_mass(&self) -> T {
        self.sampled_mass
    }

    pub fn apply(&self, g: &[T], out: &mut [T], method: ConvMethod) {
        match method {
            ConvMethod::Direct => self.apply_direct(g, out),
            ConvMethod::Fft => self.apply_fft(g, out),
        }
    }

    pub fn apply_direct(&self, g: &[T], out: &mut [T]) {
        let n = self.grid.len();
        assert_eq!(g.len(), n);
        assert_eq!(out.len(), n);
        out.iter_mut().for_each(|o| *o = T::zero());
        let (lo, hi) = match nonzero_range(g) {
            Some(r) => r,
            None => return,
        };
        let m = self.half_width;
        let i_lo = lo.saturating_sub(m);
        let i_hi = (hi + m).min(n - 1);
        let half = T::lit(0.5);
        let taps = &self.taps;
        let node = |i: usize| -> T {
            let j0 = lo.max(i.saturating_sub(m));
            let j1 = hi.min(i + m);
            let mut acc = T::zero();
            for j in j0..=j1 {
                let gj = if j == 0 || j + 1 == n { g[j] * half } else { g[j] };
                acc = acc + taps[i + m - j] * gj;
            }
            acc
        };
        let active = &mut out[i_lo..=i_hi];
        if active.len() * (2 * m + 1) >= PARALLEL_WORK {
            active
                .par_chunks_mut(64)
                .enumerate()
                .for_each(|(c, chunk)| {
                    for (k, o) in chunk.iter_mut().enumerate() {
                        *o = node(i_lo + c * 64 + k);
                    }
                });
        } else {
            for (k, o) in active.iter_mut().enumerate() {
                *o = node(i_lo + k);
            }
        }
    }

    pub fn apply_fft(&self, g: &[T], out: &mut [T]) {
        let n = self.grid.len();
        assert_eq!(g.len(), n);
        assert_eq!(out.len(), n);
        let plan = self.fft_plan();
        let mut buf = vec![Complex::new(T::zero(), T::zero()); plan.size];
        for (j, v) in g.iter().enumerate() {
            buf[j].re = *v * self.grid.weight(j);
        }
        plan.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&plan.kernel_hat) {
            *b = *b * *k;
        }
        plan.inverse.process(&mut buf);
        let scale = T::one() / T::lit(plan.size as f64);
        for (o, b) in out.iter_mut().zip(&buf) {
            *o = b.re * scale;
        }
    }

    fn fft_plan(&self) -> &FftPlan<T> {
        self.fft.get_or_init(|| {
            let n = self.grid.len();
            let size = (2 * n).next_power_of_two();
            let mut planner = FftPlanner::new();
            let forward = planner.plan_fft_forward(size);
            let inverse = planner.plan_fft_inverse(size);
            let m = self.half_width;
            let mut kernel_hat = vec![Complex::new(T::zero(), T::zero()); size];
            for (k, t) in self.taps.iter().enumerate() {
                // offset k − m, stored circularly
                let idx = (k + size - m) % size;
                kernel_hat[idx].re = *t;
            }
            forward.process(&mut kernel_hat);
            FftPlan {
                size,
                forward,
                inverse,
                kernel_hat,
            }
        })
    }

    /// Convenience wrapper producing a new field.
    pub fn convolve(&self, field: &Field<T>, method: ConvMethod) -> Result<Field<T>> {
        if field.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let mut out = vec![T::zero(); self.grid.len()];
        self.apply(field.values(), &mut out, method);
        Ok(Field::from_vec_unchecked(self.grid, out))
    }
}

/// `J_ε ∗ g` by direct summation.
pub fn convolve<T: Scalar>(field: &Field<T>, kernel: &Kernel<T>) -> Result<Field<T>> {
    Convolver::new(field.grid(), kernel)?.convolve(field, ConvMethod::Direct)
}

pub(crate) fn nonzero_range<T: Scalar>(g: &[T]) -> Option<(usize, usize)> {
    let lo = g.iter().position(|v| *v != T::zero())?;
    let hi = g.iter().rposition(|v| *v != T::zero())?;
    Some((lo, hi))
}
