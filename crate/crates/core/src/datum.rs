//! Initial data described analytically, independent of any grid.
//!
//! Piecewise data are sampled by cell averages: node `x_i` receives the mean
//! of the datum over `[x_i − h/2, x_i + h/2] ∩ [xmin, xmax]`. The trapezoidal
//! integral of the sampled field then equals the exact integral of the datum,
//! so mass identities are not polluted by sampling jumps.

use crate::{Field, Grid, Scalar};

/// Shape of one piece of a piecewise datum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Constant(f64),
    /// `amp · (sin(freq · x))_+`
    PositiveSine { amp: f64, freq: f64 },
    /// `amp · sin(freq · x) + offset`
    Sine { amp: f64, freq: f64, offset: f64 },
}

impl Shape {
    fn at(&self, x: f64) -> f64 {
        match *self {
            Shape::Constant(c) => c,
            Shape::PositiveSine { amp, freq } => amp * (freq * x).sin().max(0.0),
            Shape::Sine { amp, freq, offset } => amp * (freq * x).sin() + offset,
        }
    }

    /// `∫_a^b`, split at the kinks of the positive part.
    fn integrate(&self, a: f64, b: f64, panels: usize) -> f64 {
        let mut cuts = vec![a];
        if let Shape::PositiveSine { freq, .. } = *self {
            if freq != 0.0 {
                let step = std::f64::consts::PI / freq.abs();
                let mut k = (a / step).floor() + 1.0;
                while k * step < b {
                    cuts.push(k * step);
                    k += 1.0;
                }
            }
        }
        cuts.push(b);
        cuts.windows(2)
            .map(|w| simpson(|x| self.at(x), w[0], w[1], panels))
            .sum()
    }
}

/// `shape` on `[a, b]`, zero elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub a: f64,
    pub b: f64,
    pub shape: Shape,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Datum {
    /// Sum of pieces.
    Piecewise(Vec<Piece>),
    /// Nodal values `(x, f(x))`, sorted by `x`, linearly interpolated and zero
    /// outside; sampled pointwise.
    Nodal(Vec<(f64, f64)>),
}

/// Simpson panels per (piece ∩ cell).
const CELL_PANELS: usize = 16;

impl Datum {
    /// `height · 1_{[a, b]}`.
    pub fn indicator(a: f64, b: f64, height: f64) -> Self {
        Datum::Piecewise(vec![Piece {
            a,
            b,
            shape: Shape::Constant(height),
        }])
    }

    /// `f = 2 · 1_{[−1, 1]}`.
    pub fn mushy_preset() -> Self {
        Self::indicator(-1.0, 1.0, 2.0)
    }

    /// `f = 2.5 · 1_{[−1.25, −0.5]} + 0.99 · 1_{[0.5, 1]}`.
    pub fn disconnected_preset() -> Self {
        Datum::Piecewise(vec![
            Piece { a: -1.25, b: -0.5, shape: Shape::Constant(2.5) },
            Piece { a: 0.5, b: 1.0, shape: Shape::Constant(0.99) },
        ])
    }

    /// Piecewise datum with a sine bump, a raised sine plateau and a small
    /// step, chosen so that the long-time mesa is clearly visible.
    pub fn mesa_preset() -> Self {
        Datum::Piecewise(vec![
            Piece { a: -4.0, b: -1.5, shape: Shape::PositiveSine { amp: 1.0, freq: 5.0 } },
            Piece { a: -1.5, b: 1.5, shape: Shape::Sine { amp: 1.0, freq: 2.0, offset: 3.0 } },
            Piece { a: 6.0, b: 6.5, shape: Shape::Constant(0.3) },
        ])
    }

    /// Pointwise value (pieces are closed intervals; overlaps add up).
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Datum::Piecewise(pieces) => pieces
                .iter()
                .filter(|p| x >= p.a && x <= p.b)
                .map(|p| p.shape.at(x))
                .sum(),
            Datum::Nodal(rows) => interpolate(rows, x),
        }
    }

    /// `∫ f` over the whole line.
    pub fn integral(&self) -> f64 {
        match self {
            Datum::Piecewise(pieces) => pieces
                .iter()
                .map(|p| p.shape.integrate(p.a, p.b, 20_000))
                .sum(),
            Datum::Nodal(rows) => rows
                .windows(2)
                .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
                .sum(),
        }
    }

    /// Bounds of the region outside which the datum vanishes.
    pub fn extent(&self) -> Option<(f64, f64)> {
        match self {
            Datum::Piecewise(pieces) => pieces.iter().fold(None, |acc, p| match acc {
                None => Some((p.a, p.b)),
                Some((lo, hi)) => Some((lo.min(p.a), hi.max(p.b))),
            }),
            Datum::Nodal(rows) => {
                let nz: Vec<f64> = rows.iter().filter(|r| r.1 != 0.0).map(|r| r.0).collect();
                Some((*nz.first()?, *nz.last()?))
            }
        }
    }

    pub fn sample<T: Scalar>(&self, grid: &Grid<T>) -> Field<T> {
        let xmin = grid.xmin().as_f64();
        let xmax = grid.xmax().as_f64();
        let h = grid.h().as_f64();
        let n = grid.len();
        let values = (0..n)
            .map(|i| {
                let x = grid.x(i).as_f64();
                let v = match self {
                    Datum::Nodal(rows) => interpolate(rows, x),
                    Datum::Piecewise(pieces) => {
                        let lo = (x - 0.5 * h).max(xmin);
                        let hi = (x + 0.5 * h).min(xmax);
                        let total: f64 = pieces
                            .iter()
                            .map(|p| {
                                let a = lo.max(p.a);
                                let b = hi.min(p.b);
                                if b > a {
                                    p.shape.integrate(a, b, CELL_PANELS)
                                } else {
                                    0.0
                                }
                            })
                            .sum();
                        total / (hi - lo)
                    }
                };
                T::lit(v)
            })
            .collect();
        Field::from_vec_unchecked(*grid, values)
    }
}

impl<T: Scalar> From<&Field<T>> for Datum {
    fn from(f: &Field<T>) -> Self {
        let g = f.grid();
        Datum::Nodal(
            f.values()
                .iter()
                .enumerate()
                .map(|(i, v)| (g.x(i).as_f64(), v.as_f64()))
                .collect(),
        )
    }
}

fn interpolate(rows: &[(f64, f64)], x: f64) -> f64 {
    if rows.is_empty() || x < rows[0].0 || x > rows[rows.len() - 1].0 {
        return 0.0;
    }
    let k = rows.partition_point(|r| r.0 <= x);
    if k == 0 {
        return rows[0].1;
    }
    if k == rows.len() {
        return rows[k - 1].1;
    }
    let (x0, y0) = rows[k - 1];
    let (x1, y1) = rows[k];
    if x1 == x0 {
        return y1;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

fn simpson(g: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels + panels % 2;
    let h = (b - a) / panels as f64;
    let mut acc = g(a) + g(b);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * g(a + h * k as f64);
    }
    acc * h / 3.0
}
