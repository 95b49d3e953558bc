//! Discrete supports, mushy regions, water components and the a priori
//! support bounds.
//!
//! Sets are built from thresholded node masks. A run of consecutive marked
//! nodes `i0..=i1` becomes the interval `[x_{i0} − h/2, x_{i1} + h/2]`, the
//! union of the grid cells of those nodes, so every interval has length at
//! least `h`. Runs separated by a single unmarked node are merged.

use crate::{Error, Field, Grid, Kernel, Result, Scalar};

#[derive(Debug, Clone, PartialEq)]
pub struct SupportSet<T> {
    /// Sorted, disjoint intervals `[a, b]`.
    pub intervals: Vec<(T, T)>,
    /// Threshold used to binarize the field.
    pub threshold: T,
}

impl<T: Scalar> SupportSet<T> {
    pub fn from_mask(grid: &Grid<T>, mask: &[bool], threshold: T) -> Self {
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut i = 0;
        while i < mask.len() {
            if mask[i] {
                let start = i;
                while i + 1 < mask.len() && mask[i + 1] {
                    i += 1;
                }
                match runs.last_mut() {
                    // bridge a single-node gap
                    Some(last) if start == last.1 + 2 => last.1 = i,
                    _ => runs.push((start, i)),
                }
            }
            i += 1;
        }
        let half = grid.h() * T::lit(0.5);
        SupportSet {
            intervals: runs
                .into_iter()
                .map(|(a, b)| (grid.x(a) - half, grid.x(b) + half))
                .collect(),
            threshold,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Number of connected components.
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    /// Total length.
    pub fn measure(&self) -> T {
        self.intervals.iter().map(|(a, b)| *b - *a).sum()
    }

    /// Smallest interval containing the set.
    pub fn hull(&self) -> Option<(T, T)> {
        Some((self.intervals.first()?.0, self.intervals.last()?.1))
    }

    /// Whether `[a, b]` lies inside a single interval of the set.
    pub fn covers(&self, a: T, b: T) -> bool {
        self.intervals.iter().any(|&(lo, hi)| lo <= a && b <= hi)
    }

    /// Whether `x` belongs to the set.
    pub fn contains(&self, x: T) -> bool {
        self.covers(x, x)
    }

    /// Whether every interval of `self` lies in the union of `other`'s
    /// intervals, each widened by `slack` on both sides.
    pub fn is_subset_of(&self, other: &SupportSet<T>, slack: T) -> bool {
        self.intervals.iter().all(|&(a, b)| {
            other
                .intervals
                .iter()
                .any(|&(lo, hi)| lo - slack <= a && b <= hi + slack)
        })
    }

    /// Whether the whole set lies in `[a, b]`.
    pub fn is_within(&self, a: T, b: T) -> bool {
        self.intervals.iter().all(|&(lo, hi)| a <= lo && hi <= b)
    }

    /// Index of the interval containing `x`.
    pub fn component_of(&self, x: T) -> Option<usize> {
        self.intervals.iter().position(|&(lo, hi)| lo <= x && x <= hi)
    }
}

/// Default support threshold for a datum: `1e−8 ‖f‖_∞`.
pub fn default_support_delta<T: Scalar>(f: &Field<T>) -> T {
    let s = f.sup_abs();
    if s > T::zero() {
        T::lit(1e-8) * s
    } else {
        T::min_positive_value()
    }
}

/// Default mushy-region threshold.
pub fn default_mushy_delta<T: Scalar>() -> T {
    T::lit(1e-6)
}

/// `{ |g| > delta }`.
pub fn support<T: Scalar>(field: &Field<T>, delta: T) -> Result<SupportSet<T>> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "support threshold must be positive, got {delta}"
        )));
    }
    let mask: Vec<bool> = field.values().iter().map(|v| v.abs() > delta).collect();
    Ok(SupportSet::from_mask(field.grid(), &mask, delta))
}

/// `{ delta < u < 1 − delta }`: ice that has absorbed heat but not melted.
pub fn mushy_region<T: Scalar>(u: &Field<T>, delta: T) -> Result<SupportSet<T>> {
    if !(delta > T::zero() && delta < T::lit(0.5)) {
        return Err(Error::InvalidParameter(format!(
            "mushy threshold must lie in (0, 0.5), got {delta}"
        )));
    }
    let top = T::one() - delta;
    let mask: Vec<bool> = u.values().iter().map(|&x| x > delta && x < top).collect();
    Ok(SupportSet::from_mask(u.grid(), &mask, delta))
}

/// Connected components of `{ v > delta }`.
pub fn water_components<T: Scalar>(v: &Field<T>, delta: T) -> Result<SupportSet<T>> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter(format!(
            "water threshold must be positive, got {delta}"
        )));
    }
    let mask: Vec<bool> = v.values().iter().map(|&x| x > delta).collect();
    Ok(SupportSet::from_mask(v.grid(), &mask, delta))
}

/// `t₀ = 1 / (‖J_ε‖_∞ ‖f‖₁)`, the time before which the temperature cannot
/// spread beyond the support of the datum.
pub fn waiting_time<T: Scalar>(f: &Field<T>, kernel: &Kernel<T>) -> Result<T> {
    let mass = f.l1_norm();
    if !(mass > T::zero()) {
        return Err(Error::ZeroMass);
    }
    Ok(T::one() / (kernel.sup() * mass))
}

/// A priori radii `(R_v, R_u)` with `R_v = ‖f‖_∞ R_f` and
/// `R_u = max(R_f, R_v + ε R_J)`, where `R_f` is the largest `|x|` on the
/// support of `f`. Requires a radially nonincreasing kernel.
pub fn support_bounds<T: Scalar>(f: &Field<T>, kernel: &Kernel<T>) -> Result<(T, T)> {
    if !kernel.is_nonincreasing() {
        return Err(Error::KernelNotMonotone);
    }
    let r_f = support_radius(f, default_support_delta(f)).ok_or(Error::ZeroMass)?;
    // N = 1: ‖f‖_∞^{1/N} = ‖f‖_∞
    let r_v = f.sup_abs() * r_f;
    let r_u = r_f.max(r_v + kernel.support_radius());
    Ok((r_v, r_u))
}

/// Largest `|x_i|` over nodes with `|g_i| > delta`.
pub fn support_radius<T: Scalar>(g: &Field<T>, delta: T) -> Option<T> {
    let grid = g.grid();
    g.values()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > delta)
        .map(|(i, _)| grid.x(i).abs())
        .fold(None, |acc: Option<T>, r| Some(acc.map_or(r, |a| a.max(r))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Datum;

    fn grid() -> Grid<f64> {
        Grid::new(-6.0, 6.0, 2048).unwrap()
    }

    #[test]
    fn support_of_zero_is_empty() {
        let s = support(&Field::zeros(grid()), 1e-8).unwrap();
        assert!(s.is_empty());
        assert!(support(&Field::zeros(grid()), 0.0).is_err());
    }

    #[test]
    fn support_of_indicator() {
        let g = grid();
        let s = support(&Datum::indicator(-1.0, 1.0, 1.0).sample(&g), 1e-8).unwrap();
        assert_eq!(s.len(), 1);
        let (a, b) = s.intervals[0];
        assert!((a + 1.0).abs() <= g.h() && (b - 1.0).abs() <= g.h());
        assert!(b - a >= g.h());
    }

    #[test]
    fn two_bumps_two_intervals() {
        let g = grid();
        let d = Datum::Piecewise(vec![
            crate::Piece { a: -2.0, b: -1.0, shape: crate::Shape::Constant(1.0) },
            crate::Piece { a: 1.0, b: 2.0, shape: crate::Shape::Constant(1.0) },
        ]);
        let s = support(&d.sample(&g), 1e-8).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.component_of(-1.5) == Some(0) && s.component_of(1.5) == Some(1));
    }

    #[test]
    fn single_node_gaps_are_bridged() {
        let g = Grid::<f64>::new(0.0, 1.0, 11).unwrap();
        let mask = [false, true, true, false, true, false, false, true, false, false, false];
        let s = SupportSet::from_mask(&g, &mask, 0.5);
        assert_eq!(s.len(), 2);
        assert!((s.intervals[0].0 - 0.05).abs() < 1e-12 && (s.intervals[0].1 - 0.45).abs() < 1e-12);
    }

    #[test]
    fn mushy_examples() {
        let g = grid();
        let f = Datum::mushy_preset().sample(&g);
        assert!(mushy_region(&f, 1e-6).unwrap().is_empty());
        let half = Datum::indicator(-1.0, 1.0, 0.5).sample(&g);
        let m = mushy_region(&half, 1e-6).unwrap();
        assert_eq!(m, support(&half, 1e-6).unwrap());
        assert!(mushy_region(&f, 0.6).is_err());
    }

    #[test]
    fn water_components_examples() {
        let g = Grid::new(-4.0, 4.0, 2048).unwrap();
        let f = Datum::disconnected_preset().sample(&g);
        let v = crate::solver::temperature(&f);
        assert_eq!(water_components(&v, 1e-8).unwrap().len(), 1);
        assert_eq!(water_components(&Field::zeros(g), 1e-8).unwrap().len(), 0);
    }

    #[test]
    fn waiting_time_examples() {
        let g = grid();
        let f = Datum::mushy_preset().sample(&g);
        let p = Kernel::polynomial();
        let t0 = waiting_time(&f, &p).unwrap();
        assert!((t0 - 1.0 / 3.0).abs() < 1e-12);
        let f2 = f.map(|x| 2.0 * x);
        assert!((waiting_time(&f2, &p).unwrap() - t0 / 2.0).abs() < 1e-12);
        let i = Kernel::indicator();
        assert!((waiting_time(&f, &i).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(waiting_time(&Field::zeros(g), &p), Err(Error::ZeroMass));
    }

    #[test]
    fn support_bound_examples() {
        let g = grid();
        let h = g.h();
        let f = Datum::mushy_preset().sample(&g);
        let p = Kernel::polynomial();
        let (rv, ru) = support_bounds(&f, &p).unwrap();
        assert!((rv - 2.0).abs() <= 2.0 * h && (ru - 3.0).abs() <= 2.0 * h);
        let (rv_half, ru_half) = support_bounds(&f, &p.rescale(0.5).unwrap()).unwrap();
        assert_eq!(rv_half, rv);
        assert!((ru - ru_half - 0.5).abs() < 1e-12);
        let low = Datum::indicator(-1.0, 1.0, 0.9).sample(&g);
        let (rv_low, _) = support_bounds(&low, &p).unwrap();
        assert!(rv_low > 0.0);
        let v = crate::solver::temperature(&low);
        assert!(support(&v, 1e-12).unwrap().is_empty());
        let rising = Kernel::new(crate::Profile::Table(vec![(0.0, 0.25), (1.0, 0.75)]), 1.0).unwrap();
        assert_eq!(support_bounds(&f, &rising), Err(Error::KernelNotMonotone));
    }
}
