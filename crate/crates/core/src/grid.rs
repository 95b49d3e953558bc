//! Uniform grids on an interval and functions sampled on them.

use crate::{Error, Result, Scalar};

/// `n` equispaced nodes `x_i = xmin + i h` on `[xmin, xmax]`, `h = (xmax − xmin)/(n − 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    xmin: T,
    xmax: T,
    n: usize,
}

impl<T: Scalar> Grid<T> {
    pub fn new(xmin: T, xmax: T, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("grid needs n >= 3, got {n}")));
        }
        if !(xmax > xmin) || !xmin.is_finite() || !xmax.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid needs xmin < xmax, got [{xmin}, {xmax}]"
            )));
        }
        Ok(Grid { xmin, xmax, n })
    }

    pub fn xmin(&self) -> T {
        self.xmin
    }

    pub fn xmax(&self) -> T {
        self.xmax
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn length(&self) -> T {
        self.xmax - self.xmin
    }

    #[inline]
    pub fn h(&self) -> T {
        (self.xmax - self.xmin) / T::lit((self.n - 1) as f64)
    }

    #[inline]
    pub fn x(&self, i: usize) -> T {
        if i + 1 == self.n {
            return self.xmax;
        }
        self.xmin + self.h() * T::lit(i as f64)
    }

    pub fn nodes(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n).map(move |i| self.x(i))
    }

    /// Trapezoidal weight of node `i` (½ at the ends).
    #[inline]
    pub fn weight(&self, i: usize) -> T {
        if i == 0 || i + 1 == self.n {
            T::lit(0.5)
        } else {
            T::one()
        }
    }

    /// Index of the node nearest to `x`, clamped to the grid.
    pub fn nearest(&self, x: T) -> usize {
        let s = ((x - self.xmin) / self.h()).round();
        if s <= T::zero() {
            0
        } else {
            s.to_usize().unwrap_or(self.n - 1).min(self.n - 1)
        }
    }

    /// Grid with `factor` times as many cells on the same interval; every
    /// node of `self` is a node of the result.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidParameter("refinement factor must be >= 1".into()));
        }
        Grid::new(self.xmin, self.xmax, (self.n - 1) * factor + 1)
    }
}

/// Values of a function at the nodes of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field<T> {
    grid: Grid<T>,
    values: Vec<T>,
}

impl<T: Scalar> Field<T> {
    pub fn new(grid: Grid<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite field value at node {i}"
            )));
        }
        Ok(Field { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid<T>, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    pub fn zeros(grid: Grid<T>) -> Self {
        Field {
            grid,
            values: vec![T::zero(); grid.len()],
        }
    }

    pub fn from_fn(grid: Grid<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        Field::new(grid, values)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Trapezoidal quadrature over `[xmin, xmax]`.
    pub fn integrate(&self) -> T {
        trapezoid(&self.grid, &self.values)
    }

    /// `∫ |self|`.
    pub fn l1_norm(&self) -> T {
        let h = self.grid.h();
        let n = self.values.len();
        let inner: T = self.values[1..n - 1].iter().map(|v| v.abs()).sum();
        (inner + (self.values[0].abs() + self.values[n - 1].abs()) * T::lit(0.5)) * h
    }

    pub fn sup(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn sup_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// `∫ |a − b|`.
    pub fn l1_distance(&self, other: &Field<T>) -> Result<T> {
        self.check_grid(other)?;
        Ok(l1_of_difference(&self.grid, &self.values, &other.values))
    }

    /// `∫ (a − b)_+`.
    pub fn positive_part_distance(&self, other: &Field<T>) -> Result<T> {
        self.check_grid(other)?;
        let diff: Vec<T> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).max(T::zero()))
            .collect();
        Ok(trapezoid(&self.grid, &diff))
    }

    /// `sup |a − b|`.
    pub fn sup_distance(&self, other: &Field<T>) -> Result<T> {
        self.check_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).abs())))
    }

    /// `α self + β other`.
    pub fn axpby(&self, alpha: T, other: &Field<T>, beta: T) -> Result<Field<T>> {
        self.check_grid(other)?;
        Ok(Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| alpha * *a + beta * *b)
                .collect(),
        })
    }

    /// Samples at every `stride`-th node, producing a field on `coarse`.
    pub fn restrict(&self, coarse: &Grid<T>) -> Result<Field<T>> {
        let fine = &self.grid;
        if coarse.len() == 1 || !(fine.len() - 1).is_multiple_of(coarse.len() - 1) {
            return Err(Error::GridMismatch);
        }
        let stride = (fine.len() - 1) / (coarse.len() - 1);
        let tol = fine.h() * T::lit(1e-6);
        if (fine.xmin() - coarse.xmin()).abs() > tol || (fine.xmax() - coarse.xmax()).abs() > tol {
            return Err(Error::GridMismatch);
        }
        Ok(Field {
            grid: *coarse,
            values: (0..coarse.len()).map(|i| self.values[i * stride]).collect(),
        })
    }

    pub(crate) fn check_grid(&self, other: &Field<T>) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }
}

pub(crate) fn trapezoid<T: Scalar>(grid: &Grid<T>, values: &[T]) -> T {
    let n = values.len();
    let inner: T = values[1..n - 1].iter().copied().sum();
    (inner + (values[0] + values[n - 1]) * T::lit(0.5)) * grid.h()
}

pub(crate) fn l1_of_difference<T: Scalar>(grid: &Grid<T>, a: &[T], b: &[T]) -> T {
    let n = a.len();
    let inner: T = (1..n - 1).map(|i| (a[i] - b[i]).abs()).sum();
    (inner + ((a[0] - b[0]).abs() + (a[n - 1] - b[n - 1]).abs()) * T::lit(0.5)) * grid.h()
}
