//! Truncated coefficient algebra for the R-transform / D-operator pair.
//!
//! Sequences and series are stored densely up to per-axis caps. The
//! D-operator's limit-of-derivatives definition reduces, for formal power
//! series, to dividing by (1-q)(1-r)(1-s) — i.e. per-axis prefix sums — and
//! reading one coefficient; everything here is plain coefficient algebra.
//! Exactness is a property of the coefficient type: use `BigRational` for
//! exact arithmetic (roundtrip identities hold with zero error), `f64` for
//! analytic generating functions with irrational parameters.

use crate::error::{ModelError, Result};

/// Coefficient ring: numeric enough for series algebra.
pub trait Coeff:
    Clone
    + PartialEq
    + std::fmt::Debug
    + num_traits::Zero
    + num_traits::One
    + std::ops::Sub<Output = Self>
{
}

impl<T> Coeff for T where
    T: Clone
        + PartialEq
        + std::fmt::Debug
        + num_traits::Zero
        + num_traits::One
        + std::ops::Sub<Output = T>
{
}

fn flat_len(caps: (usize, usize, usize)) -> usize {
    (caps.0 + 1) * (caps.1 + 1) * (caps.2 + 1)
}

/// Dense sequence g(a, b, c) on 0..=A x 0..=B x 0..=C.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceGrid<T> {
    caps: (usize, usize, usize),
    values: Vec<T>,
}

impl<T: Coeff> SequenceGrid<T> {
    pub fn zeros(caps: (usize, usize, usize)) -> Self {
        Self {
            caps,
            values: vec![T::zero(); flat_len(caps)],
        }
    }

    pub fn from_fn(
        caps: (usize, usize, usize),
        mut f: impl FnMut(usize, usize, usize) -> T,
    ) -> Self {
        let mut grid = Self::zeros(caps);
        for a in 0..=caps.0 {
            for b in 0..=caps.1 {
                for c in 0..=caps.2 {
                    let idx = grid.flat_index(a, b, c);
                    grid.values[idx] = f(a, b, c);
                }
            }
        }
        grid
    }

    pub fn caps(&self) -> (usize, usize, usize) {
        self.caps
    }

    fn flat_index(&self, a: usize, b: usize, c: usize) -> usize {
        (a * (self.caps.1 + 1) + b) * (self.caps.2 + 1) + c
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> &T {
        &self.values[self.flat_index(a, b, c)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, value: T) {
        let idx = self.flat_index(a, b, c);
        self.values[idx] = value;
    }
}

/// Coefficients of a power series in (q, r, s), truncated at per-axis caps.
///
/// Addition and multiplication close over the type with degree clipping;
/// coefficients at or below the caps are always exact images of the
/// untruncated product.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries<T> {
    caps: (usize, usize, usize),
    coeffs: Vec<T>,
}

impl<T: Coeff> TruncatedSeries<T> {
    pub fn zeros(caps: (usize, usize, usize)) -> Self {
        Self {
            caps,
            coeffs: vec![T::zero(); flat_len(caps)],
        }
    }

    pub fn caps(&self) -> (usize, usize, usize) {
        self.caps
    }

    fn flat_index(&self, a: usize, b: usize, c: usize) -> usize {
        (a * (self.caps.1 + 1) + b) * (self.caps.2 + 1) + c
    }

    pub fn coeff(&self, a: usize, b: usize, c: usize) -> &T {
        &self.coeffs[self.flat_index(a, b, c)]
    }

    pub fn set_coeff(&mut self, a: usize, b: usize, c: usize, value: T) {
        let idx = self.flat_index(a, b, c);
        self.coeffs[idx] = value;
    }

    /// Series sum, clipped to the common caps (which must match).
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.caps, other.caps, "cap mismatch in series add");
        let mut out = self.clone();
        for (o, r) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *o = o.clone() + r.clone();
        }
        out
    }

    /// Truncated product. O(size^2) in the dense representation; intended
    /// for the desk-scale caps this module is used at.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.caps, other.caps, "cap mismatch in series mul");
        let caps = self.caps;
        let mut out = Self::zeros(caps);
        for a1 in 0..=caps.0 {
            for b1 in 0..=caps.1 {
                for c1 in 0..=caps.2 {
                    let lhs = self.coeff(a1, b1, c1);
                    if lhs.is_zero() {
                        continue;
                    }
                    for a2 in 0..=(caps.0 - a1) {
                        for b2 in 0..=(caps.1 - b1) {
                            for c2 in 0..=(caps.2 - c1) {
                                let rhs = other.coeff(a2, b2, c2);
                                if rhs.is_zero() {
                                    continue;
                                }
                                let idx = out.flat_index(a1 + a2, b1 + b2, c1 + c2);
                                out.coeffs[idx] =
                                    out.coeffs[idx].clone() + lhs.clone() * rhs.clone();
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// The inverse D-operator at one index: coefficient of the series
    /// divided by (1-q)(1-r)(1-s), i.e. the triple prefix sum of the
    /// coefficients over the box [0, a] x [0, b] x [0, c].
    ///
    /// Negative indices return zero; indices beyond the caps are a range
    /// error (insufficient truncation for the requested read-out).
    pub fn d_inverse(&self, index: (i64, i64, i64)) -> Result<T> {
        let (a, b, c) = index;
        if a < 0 || b < 0 || c < 0 {
            return Ok(T::zero());
        }
        let (a, b, c) = (a as usize, b as usize, c as usize);
        if a > self.caps.0 || b > self.caps.1 || c > self.caps.2 {
            return Err(ModelError::IndexBeyondCaps {
                index: (a, b, c),
                caps: self.caps,
            });
        }
        let mut acc = T::zero();
        for i in 0..=a {
            for j in 0..=b {
                for k in 0..=c {
                    acc = acc + self.coeff(i, j, k).clone();
                }
            }
        }
        Ok(acc)
    }
}

/// R-transform of a sequence: the truncated coefficients of
/// (1-q)(1-r)(1-s) * sum g(a,b,c) q^a r^b s^c.
///
/// Coefficients of total degree beyond the caps are clipped; the D-inverse
/// at any index within the caps is unaffected by the clipping.
pub fn r_transform<T: Coeff>(grid: &SequenceGrid<T>) -> TruncatedSeries<T> {
    let caps = grid.caps();
    let mut out = TruncatedSeries::zeros(caps);
    let term = |a: i64, b: i64, c: i64| -> T {
        if a < 0 || b < 0 || c < 0 {
            T::zero()
        } else {
            grid.get(a as usize, b as usize, c as usize).clone()
        }
    };
    for a in 0..=caps.0 as i64 {
        for b in 0..=caps.1 as i64 {
            for c in 0..=caps.2 as i64 {
                // (1-q)(1-r)(1-s) expands into eight signed shifts.
                let mut v = T::zero();
                for (da, db, dc, negative) in [
                    (0, 0, 0, false),
                    (1, 0, 0, true),
                    (0, 1, 0, true),
                    (0, 0, 1, true),
                    (1, 1, 0, false),
                    (1, 0, 1, false),
                    (0, 1, 1, false),
                    (1, 1, 1, true),
                ] {
                    let g = term(a - da, b - db, c - dc);
                    if negative {
                        v = v - g;
                    } else {
                        v = v + g;
                    }
                }
                out.set_coeff(a as usize, b as usize, c as usize, v);
            }
        }
    }
    out
}

/// One-dimensional R-transform: coefficients of (1-q) * sum f(a) q^a,
/// clipped to the input length.
pub fn r_transform_1d<T: Coeff>(f: &[T]) -> Vec<T> {
    let mut out = Vec::with_capacity(f.len());
    for a in 0..f.len() {
        let prev = if a == 0 { T::zero() } else { f[a - 1].clone() };
        out.push(f[a].clone() - prev);
    }
    out
}

/// One-dimensional D-inverse: prefix sum of the coefficients up to `index`.
pub fn d_inverse_1d<T: Coeff>(coeffs: &[T], index: usize) -> T {
    let mut acc = T::zero();
    for c in coeffs.iter().take(index + 1) {
        acc = acc + c.clone();
    }
    acc
}

/// Two-dimensional R-transform on a dense row-major grid
/// (`f[a][b]`, all rows of equal length).
pub fn r_transform_2d<T: Coeff>(f: &[Vec<T>]) -> Vec<Vec<T>> {
    let rows = f.len();
    let cols = if rows == 0 { 0 } else { f[0].len() };
    let term = |a: i64, b: i64| -> T {
        if a < 0 || b < 0 {
            T::zero()
        } else {
            f[a as usize][b as usize].clone()
        }
    };
    let mut out = vec![vec![T::zero(); cols]; rows];
    for a in 0..rows as i64 {
        for b in 0..cols as i64 {
            let v = term(a, b) - term(a - 1, b) - term(a, b - 1) + term(a - 1, b - 1);
            out[a as usize][b as usize] = v;
        }
    }
    out
}
