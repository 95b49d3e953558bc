//! Radially symmetric, compactly supported, unit-mass convolution kernels.
//!
//! A kernel is a closed-form radial profile `r ↦ J(r)` supported in `[0, R_J]`
//! together with a scale `ε`; the scaled kernel is `J_ε(x) = ε⁻¹ J(|x| / ε)`.
//! Rescaling only touches `ε`, so it is exact.

use crate::{Error, Result, Scalar};

/// Radial profile of a kernel, in unscaled units.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile<T> {
    /// `0.75 (1 − r²)_+`, the kernel used throughout the experiments.
    Polynomial,
    /// `½ 1_{r ≤ 1}`. Discontinuous, so outside the continuity hypothesis of
    /// the theory, but useful as a fixture.
    Indicator,
    /// Tabulated `(r, J(r))` pairs, linearly interpolated, zero past the last node.
    Table(Vec<(T, T)>),
}

impl<T: Scalar> Profile<T> {
    fn radius(&self) -> T {
        match self {
            Profile::Polynomial | Profile::Indicator => T::one(),
            Profile::Table(rows) => rows.last().map(|r| r.0).unwrap_or_else(T::zero),
        }
    }

    /// Evaluates the unscaled profile at `r ≥ 0`.
    fn at(&self, r: T) -> T {
        match self {
            Profile::Polynomial => {
                if r >= T::one() {
                    T::zero()
                } else {
                    T::lit(0.75) * (T::one() - r * r)
                }
            }
            Profile::Indicator => {
                if r <= T::one() {
                    T::lit(0.5)
                } else {
                    T::zero()
                }
            }
            Profile::Table(rows) => {
                let last = rows.len() - 1;
                if r > rows[last].0 {
                    return T::zero();
                }
                if r <= rows[0].0 {
                    return rows[0].1;
                }
                // rows are sorted by r
                let k = rows.partition_point(|p| p.0 <= r).min(last);
                let (r0, j0) = rows[k - 1];
                let (r1, j1) = rows[k];
                if r1 == r0 {
                    return j1;
                }
                j0 + (j1 - j0) * (r - r0) / (r1 - r0)
            }
        }
    }

    fn max_value(&self) -> T {
        match self {
            Profile::Polynomial => T::lit(0.75),
            Profile::Indicator => T::lit(0.5),
            Profile::Table(rows) => rows.iter().map(|p| p.1).fold(T::zero(), T::max),
        }
    }
}

/// Scaled kernel `J_ε`. Construct through [`Kernel::new`] so that the unit-mass
/// invariant is checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel<T> {
    profile: Profile<T>,
    radius: T,
    epsilon: T,
    nonincreasing: bool,
}

/// Spatial dimension. Only the line is implemented.
pub const DIM: usize = 1;

const MONOTONE_SAMPLES: usize = 1000;

impl<T: Scalar> Kernel<T> {
    /// Validates the profile (nonnegative, unit mass) and records whether it
    /// is nonincreasing in the radius.
    pub fn new(profile: Profile<T>, epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "kernel epsilon must be positive, got {epsilon}"
            )));
        }
        if let Profile::Table(rows) = &profile {
            validate_table(rows)?;
        }
        let radius = profile.radius();
        if !(radius > T::zero()) {
            return Err(Error::InvalidParameter("kernel radius must be positive".into()));
        }
        let step = radius / T::lit(1000.0);
        let mut kernel = Kernel {
            profile,
            radius,
            epsilon: T::one(),
            nonincreasing: false,
        };
        let mass = kernel.mass(step)?;
        let tol = T::validation_tol();
        if (mass - T::one()).abs() > tol {
            return Err(Error::KernelNotNormalized {
                mass: mass.as_f64(),
                tol: tol.as_f64(),
            });
        }
        kernel.nonincreasing = (0..MONOTONE_SAMPLES).all(|k| {
            let r0 = radius * T::lit(k as f64 / MONOTONE_SAMPLES as f64);
            let r1 = radius * T::lit((k + 1) as f64 / MONOTONE_SAMPLES as f64);
            kernel.profile.at(r1) <= kernel.profile.at(r0)
        });
        kernel.epsilon = epsilon;
        Ok(kernel)
    }

    /// `J(x) = 0.75 (1 − x²)_+` with `R_J = 1`, `ε = 1`.
    pub fn polynomial() -> Self {
        Self::new(Profile::Polynomial, T::one()).expect("polynomial kernel is admissible")
    }

    /// `J(x) = ½ 1_{|x| ≤ 1}`.
    pub fn indicator() -> Self {
        Self::new(Profile::Indicator, T::one()).expect("indicator kernel is admissible")
    }

    pub fn profile(&self) -> &Profile<T> {
        &self.profile
    }

    /// Unscaled support radius `R_J`.
    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// Support radius of the scaled kernel, `ε R_J`.
    pub fn support_radius(&self) -> T {
        self.epsilon * self.radius
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.nonincreasing
    }

    pub fn dim(&self) -> usize {
        DIM
    }

    /// `J_ε(x) = ε⁻¹ J(|x| / ε)`; even and exactly zero outside `ε R_J`.
    #[inline]
    pub fn evaluate(&self, x: T) -> T {
        let r = x.abs() / self.epsilon;
        if r > self.radius {
            return T::zero();
        }
        self.profile.at(r) / self.epsilon
    }

    /// `sup J_ε`.
    pub fn sup(&self) -> T {
        self.profile.max_value() / self.epsilon
    }

    /// Same profile with `ε` replaced by `eps`.
    pub fn rescale(&self, eps: T) -> Result<Self> {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "rescale factor must be positive, got {eps}"
            )));
        }
        Ok(Kernel {
            epsilon: eps,
            ..self.clone()
        })
    }

    /// Trapezoidal quadrature of `J_ε` over `[−ε R_J, ε R_J]` with a step no
    /// larger than `quad_step`.
    pub fn mass(&self, quad_step: T) -> Result<T> {
        let r = self.support_radius();
        trapezoid(|x| self.evaluate(x), -r, r, quad_step)
    }

    /// Second moment `m₂ = ∫ x² J(x) dx` of the unscaled profile.
    pub fn second_moment(&self, quad_step: T) -> Result<T> {
        let r = self.radius;
        trapezoid(|x| x * x * self.profile.at(x.abs()), -r, r, quad_step)
    }

    /// Fourier symbol `Ĵ_ε(ξ) = ∫ J_ε(x) cos(ξ x) dx`, by composite Simpson
    /// quadrature of the profile against the cosine.
    pub fn fourier_symbol(&self, xi: T, panels: usize) -> T {
        let panels = panels.max(2) + panels % 2;
        let r = self.support_radius();
        let step = r / T::lit(panels as f64);
        let g = |x: T| self.evaluate(x) * (xi * x).cos();
        let mut acc = g(T::zero()) + g(r);
        for k in 1..panels {
            let w = if k % 2 == 1 { T::lit(4.0) } else { T::lit(2.0) };
            acc = acc + w * g(step * T::lit(k as f64));
        }
        // even integrand: twice the half-line integral
        T::lit(2.0) * acc * step / T::lit(3.0)
    }
}

fn validate_table<T: Scalar>(rows: &[(T, T)]) -> Result<()> {
    if rows.len() < 2 {
        return Err(Error::InvalidParameter(
            "kernel table needs at least two rows".into(),
        ));
    }
    if rows[0].0 != T::zero() {
        return Err(Error::InvalidParameter(
            "kernel table must start at r = 0".into(),
        ));
    }
    for w in rows.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::InvalidParameter(
                "kernel table radii must be strictly increasing".into(),
            ));
        }
    }
    if rows.iter().any(|p| !(p.1 >= T::zero()) || !p.1.is_finite()) {
        return Err(Error::InvalidParameter(
            "kernel table values must be finite and nonnegative".into(),
        ));
    }
    Ok(())
}

fn trapezoid<T: Scalar>(g: impl Fn(T) -> T, a: T, b: T, quad_step: T) -> Result<T> {
    if !(quad_step > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "quadrature step must be positive, got {quad_step}"
        )));
    }
    let n = ((b - a) / quad_step).ceil().to_usize().unwrap_or(1).max(1);
    let h = (b - a) / T::lit(n as f64);
    let mut acc = (g(a) + g(b)) * T::lit(0.5);
    for k in 1..n {
        acc = acc + g(a + h * T::lit(k as f64));
    }
    Ok(acc * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn polynomial_values() {
        let k = Kernel::<f64>::polynomial();
        assert_eq!(k.evaluate(0.0), 0.75);
        assert_eq!(k.evaluate(1.5), 0.0);
        assert_abs_diff_eq!(k.evaluate(0.5), 0.5625, epsilon = 1e-15);
        assert_eq!(k.radius(), 1.0);
        assert_eq!(k.epsilon(), 1.0);
        assert_eq!(k.dim(), 1);
        assert!(k.is_nonincreasing());
    }

    #[test]
    fn mass_of_reference_kernels() {
        let p = Kernel::<f64>::polynomial();
        assert_abs_diff_eq!(p.mass(1e-3).unwrap(), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(p.rescale(0.5).unwrap().mass(1e-3).unwrap(), 1.0, epsilon = 1e-6);
        let i = Kernel::<f64>::indicator();
        assert_abs_diff_eq!(i.mass(1e-3).unwrap(), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn second_moments() {
        // 0.75 (2/3 − 2/5) = 0.2
        let p = Kernel::<f64>::polynomial();
        assert_abs_diff_eq!(p.second_moment(1e-3).unwrap(), 0.2, epsilon = 1e-6);
        let i = Kernel::<f64>::indicator();
        assert_abs_diff_eq!(i.second_moment(1e-3).unwrap(), 1.0 / 3.0, epsilon = 1e-6);
        let p2 = p.rescale(2.0).unwrap();
        assert_eq!(p2.second_moment(1e-3).unwrap(), p.second_moment(1e-3).unwrap());
    }

    #[test]
    fn rescale_samples() {
        let p = Kernel::<f64>::polynomial();
        let half = p.rescale(0.5).unwrap();
        assert_abs_diff_eq!(half.evaluate(0.0), 1.5, epsilon = 1e-15);
        assert_eq!(p.rescale(0.2).unwrap().support_radius(), 0.2);
        let same = p.rescale(1.0).unwrap();
        for k in 0..50 {
            let x = -1.2 + 0.05 * k as f64;
            assert_eq!(same.evaluate(x), p.evaluate(x));
        }
        assert!(half.evaluate(0.5000001) == 0.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = Kernel::<f64>::polynomial();
        assert!(p.rescale(0.0).is_err());
        assert!(p.rescale(-1.0).is_err());
        assert!(p.mass(0.0).is_err());
        assert!(p.second_moment(-1e-3).is_err());
        assert!(Kernel::new(Profile::<f64>::Polynomial, 0.0).is_err());
    }

    #[test]
    fn unnormalized_table_rejected() {
        let rows = vec![(0.0, 1.0), (1.0, 1.0)];
        match Kernel::new(Profile::Table(rows), 1.0) {
            Err(Error::KernelNotNormalized { mass, .. }) => assert!((mass - 2.0).abs() < 1e-9),
            other => panic!("expected normalization error, got {other:?}"),
        }
    }

    #[test]
    fn table_matches_closed_form() {
        let rows: Vec<(f64, f64)> = (0..=2000)
            .map(|k| {
                let r = k as f64 / 2000.0;
                (r, 0.75 * (1.0 - r * r))
            })
            .collect();
        let t = Kernel::new(Profile::Table(rows), 1.0).unwrap();
        let p = Kernel::<f64>::polynomial();
        for k in 0..40 {
            let x = -1.1 + 0.055 * k as f64;
            assert_abs_diff_eq!(t.evaluate(x), p.evaluate(x), epsilon = 1e-6);
        }
        assert!(t.is_nonincreasing());
    }

    #[test]
    fn increasing_table_flagged() {
        // mass ∫_{-1}^{1} (0.25 + 0.5 r) = 0.5 + 0.5 = 1
        let rows = vec![(0.0, 0.25), (1.0, 0.75)];
        let k = Kernel::new(Profile::Table(rows), 1.0).unwrap();
        assert!(!k.is_nonincreasing());
    }

    #[test]
    fn symbol_matches_closed_form() {
        // Ĵ(ξ) = 3 (sin ξ − ξ cos ξ) / ξ³ for the polynomial profile
        let p = Kernel::<f64>::polynomial();
        assert_abs_diff_eq!(p.fourier_symbol(0.0, 512), 1.0, epsilon = 1e-13);
        for xi in [0.3, 1.0, 4.0, 17.0, 60.0] {
            let exact = 3.0 * (f64::sin(xi) - xi * f64::cos(xi)) / (xi * xi * xi);
            assert_abs_diff_eq!(p.fourier_symbol(xi, 4096), exact, epsilon = 1e-9);
        }
    }

    #[test]
    fn f32_kernel() {
        let k = Kernel::<f32>::polynomial();
        assert!((k.mass(1e-3).unwrap() - 1.0).abs() < 1e-4);
    }
}
