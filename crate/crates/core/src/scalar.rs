//! Coordinate scalars: exact `QuadReal` or tolerance-compared `f64`.
//!
//! Geometry in this crate is written once over [`Scalar`]. Every predicate
//! goes through [`Scalar::sign`], which is exact for `QuadReal` and uses the
//! absolute tolerance [`FLOAT_TOLERANCE`] for `f64`.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::quadfield::{lcm, FieldError, QuadField, QuadReal};

/// Membership and equality tolerance in float mode.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Hashable key with the same equality as the scalar.
    type Key: Hash + Eq + Ord + Clone + fmt::Debug + Send + Sync;

    const EXACT: bool;

    fn zero_like(&self) -> Self;
    #[allow(clippy::wrong_self_convention)]
    fn from_i64_like(&self, v: i64) -> Self;
    #[allow(clippy::wrong_self_convention)]
    fn from_ratio_like(&self, num: i64, den: i64) -> Self;
    fn sign(&self) -> Ordering;
    fn to_f64(&self) -> f64;
    /// Exact integer value, if there is one.
    fn to_integer(&self) -> Option<i64>;
    fn key(&self) -> Self::Key;
    /// Greatest integer not above the value, as a scalar.
    fn floor_s(&self) -> Self;
    /// Parses a literal in this scalar's field. `d` is the field parameter.
    fn parse_literal(text: &str, d: u32) -> Result<Self, FieldError>;
    fn from_f64_literal(v: f64, d: u32) -> Result<Self, FieldError>;

    fn one_like(&self) -> Self {
        self.from_i64_like(1)
    }

    fn is_zero_s(&self) -> bool {
        self.sign() == Ordering::Equal
    }

    fn cmp_s(&self, other: &Self) -> Ordering {
        (self.clone() - other.clone()).sign()
    }

    fn abs_s(&self) -> Self {
        if self.sign() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn min_s(self, other: Self) -> Self {
        if self.cmp_s(&other) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    fn max_s(self, other: Self) -> Self {
        if self.cmp_s(&other) == Ordering::Less {
            other
        } else {
            self
        }
    }

    /// Integer embedding `value_i = (a_i + b_i sqrt(D)) / den` for a batch,
    /// used by the fast exact difference-set code. `None` when unavailable.
    fn integer_embedding(_values: &[Self]) -> Option<IntEmbedding> {
        None
    }
}

/// A batch of field elements over a common denominator with 64-bit parts.
#[derive(Debug, Clone)]
pub struct IntEmbedding {
    pub d: u32,
    pub den: BigInt,
    pub parts: Vec<(i64, i64)>,
}

/// Exact sign of `a + b sqrt(d)` for machine integers.
pub fn int_pair_sign(a: i128, b: i128, d: u32) -> Ordering {
    let sa = a.cmp(&0);
    let sb = b.cmp(&0);
    match (sa, sb) {
        (s, Ordering::Equal) => s,
        (Ordering::Equal, s) => s,
        (x, y) if x == y => x,
        (sa, _) => {
            let a2 = a.checked_mul(a).expect("embedding overflow");
            let b2d = b.checked_mul(b).and_then(|v| v.checked_mul(d as i128)).expect("embedding overflow");
            match sa {
                Ordering::Greater => a2.cmp(&b2d),
                _ => b2d.cmp(&a2),
            }
        }
    }
}

impl Scalar for QuadReal {
    type Key = QuadReal;
    const EXACT: bool = true;

    fn zero_like(&self) -> Self {
        self.field().zero()
    }
    fn from_i64_like(&self, v: i64) -> Self {
        self.field().int(v)
    }
    fn from_ratio_like(&self, num: i64, den: i64) -> Self {
        self.field().ratio(num, den)
    }
    fn sign(&self) -> Ordering {
        self.signum()
    }
    fn to_f64(&self) -> f64 {
        QuadReal::to_f64(self)
    }
    fn to_integer(&self) -> Option<i64> {
        QuadReal::to_integer(self).and_then(|v| v.to_i64())
    }
    fn key(&self) -> Self::Key {
        self.clone()
    }
    fn floor_s(&self) -> Self {
        self.field().rational(crate::quadfield::Rational::from_integer(self.floor()))
    }
    fn parse_literal(text: &str, d: u32) -> Result<Self, FieldError> {
        QuadField::new(d as u64)?.parse(text)
    }
    fn from_f64_literal(v: f64, d: u32) -> Result<Self, FieldError> {
        if v.fract() == 0.0 && v.abs() < 9.0e15 {
            Ok(QuadField::new(d as u64)?.int(v as i64))
        } else {
            Err(FieldError::Parse {
                input: v.to_string(),
                reason: "exact mode accepts only integer JSON numbers; quote other values".into(),
            })
        }
    }
    fn cmp_s(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn integer_embedding(values: &[Self]) -> Option<IntEmbedding> {
        let first = values.first()?;
        let d = first.d();
        let mut den = BigInt::from(1);
        for v in values {
            if v.d() != d {
                return None;
            }
            den = lcm(&den, v.a().denom());
            den = lcm(&den, v.b().denom());
        }
        let mut parts = Vec::with_capacity(values.len());
        for v in values {
            let a = (v.a().numer() * (&den / v.a().denom())).to_i64()?;
            let b = (v.b().numer() * (&den / v.b().denom())).to_i64()?;
            // keep headroom so that differences and squares fit in i128
            if a.unsigned_abs() > (1 << 40) || b.unsigned_abs() > (1 << 40) {
                return None;
            }
            parts.push((a, b));
        }
        Some(IntEmbedding { d, den, parts })
    }
}

/// Float key: the value snapped to the tolerance grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FloatKey(pub i64);

impl Scalar for f64 {
    type Key = FloatKey;
    const EXACT: bool = false;

    fn zero_like(&self) -> Self {
        0.0
    }
    fn from_i64_like(&self, v: i64) -> Self {
        v as f64
    }
    fn from_ratio_like(&self, num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn sign(&self) -> Ordering {
        if self.abs() <= FLOAT_TOLERANCE {
            Ordering::Equal
        } else if *self > 0.0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_integer(&self) -> Option<i64> {
        let r = self.round();
        if (self - r).abs() <= FLOAT_TOLERANCE {
            Some(r as i64)
        } else {
            None
        }
    }
    fn key(&self) -> Self::Key {
        FloatKey((self / FLOAT_TOLERANCE).round() as i64)
    }
    fn floor_s(&self) -> Self {
        self.floor()
    }
    fn parse_literal(text: &str, d: u32) -> Result<Self, FieldError> {
        if let Ok(v) = text.trim().parse::<f64>() {
            return Ok(v);
        }
        let q = QuadField::new(d as u64)?.parse(text)?;
        Ok(q.to_f64())
    }
    fn from_f64_literal(v: f64, _d: u32) -> Result<Self, FieldError> {
        Ok(v)
    }
}

/// Text rendering that distinguishes exact values from floats in reports.
pub fn render<S: Scalar>(v: &S) -> String {
    if S::EXACT {
        v.to_string()
    } else {
        format!("{:?}", v.to_f64())
    }
}

/// Determinant by Gaussian elimination over the scalar field.
#[allow(clippy::needless_range_loop)]
pub fn determinant<S: Scalar>(m: &[Vec<S>]) -> S {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n), "square matrix required");
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut det = a[0][0].one_like();
    for col in 0..n {
        let Some(p) = pivot_row(&a, col, col) else {
            return a[0][0].zero_like();
        };
        if p != col {
            a.swap(p, col);
            det = -det;
        }
        let piv = a[col][col].clone();
        det = det * piv.clone();
        for r in col + 1..n {
            if a[r][col].is_zero_s() {
                continue;
            }
            let factor = a[r][col].clone() / piv.clone();
            for c in col..n {
                let v = a[r][c].clone() - factor.clone() * a[col][c].clone();
                a[r][c] = v;
            }
        }
    }
    det
}

fn pivot_row<S: Scalar>(a: &[Vec<S>], col: usize, start: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (r, row) in a.iter().enumerate().skip(start) {
        if row[col].is_zero_s() {
            continue;
        }
        let mag = row[col].to_f64().abs();
        if best.is_none_or(|(_, m)| mag > m) {
            best = Some((r, mag));
        }
    }
    best.map(|(r, _)| r)
}

/// Solves the square system `m x = rhs`. `None` when singular.
#[allow(clippy::needless_range_loop)]
pub fn solve<S: Scalar>(m: &[Vec<S>], rhs: &[S]) -> Option<Vec<S>> {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    for col in 0..n {
        let p = pivot_row(&a, col, col)?;
        a.swap(p, col);
        let piv = a[col][col].clone();
        for r in 0..n {
            if r == col || a[r][col].is_zero_s() {
                continue;
            }
            let factor = a[r][col].clone() / piv.clone();
            for c in col..=n {
                let v = a[r][c].clone() - factor.clone() * a[col][c].clone();
                a[r][c] = v;
            }
        }
    }
    Some((0..n).map(|i| a[i][n].clone() / a[i][i].clone()).collect())
}

/// Basis of the right null space `{x : m x = 0}` in reduced echelon form.
#[allow(clippy::needless_range_loop)]
pub fn nullspace<S: Scalar>(m: &[Vec<S>]) -> Vec<Vec<S>> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let zero = m[0][0].zero_like();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r >= rows {
            break;
        }
        let Some(p) = pivot_row(&a, c, r) else { continue };
        a.swap(p, r);
        let piv = a[r][c].clone();
        for k in c..cols {
            let v = a[r][k].clone() / piv.clone();
            a[r][k] = v;
        }
        for i in 0..rows {
            if i == r || a[i][c].is_zero_s() {
                continue;
            }
            let factor = a[i][c].clone();
            for k in c..cols {
                let v = a[i][k].clone() - factor.clone() * a[r][k].clone();
                a[i][k] = v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![zero.clone(); cols];
            v[f] = zero.one_like();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

/// Float inverse for bounding computations.
pub fn inverse_f64(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mat = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let inv = mat.try_inverse()?;
    Some((0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_exact() {
        let f = QuadField::GOLDEN;
        let phi = f.phi();
        // Fibonacci basis: internal row (1, 1-phi), physical row (1, phi)
        let m = vec![vec![f.one(), &f.one() - &phi], vec![f.one(), phi.clone()]];
        assert_eq!(determinant(&m), f.sqrt_d());
        let dup = vec![vec![f.one(), f.one()], vec![phi.clone(), phi]];
        assert!(determinant(&dup).is_zero());
    }

    #[test]
    fn solve_and_nullspace() {
        let m = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let x = solve(&m, &[3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
        let f = QuadField::GOLDEN;
        let sing = vec![vec![f.int(1), f.int(2)], vec![f.int(2), f.int(4)]];
        assert!(solve(&sing, &[f.int(1), f.int(1)]).is_none());
        let ns = nullspace(&sing);
        assert_eq!(ns, vec![vec![f.int(-2), f.int(1)]]);
    }

    #[test]
    fn float_tolerance() {
        assert_eq!(1e-10f64.sign(), Ordering::Equal);
        assert_eq!(2.0000000001f64.to_integer(), Some(2));
        assert_eq!(2.1f64.to_integer(), None);
    }

    #[test]
    fn embedding_sign() {
        assert_eq!(int_pair_sign(-2, 1, 5), Ordering::Greater);
        assert_eq!(int_pair_sign(3, -1, 5), Ordering::Greater);
        assert_eq!(int_pair_sign(2, -1, 5), Ordering::Less);
        let f = QuadField::GOLDEN;
        let vals = vec![f.phi(), f.ratio(1, 3), f.parse("-1/6*sqrt(5)").unwrap()];
        let e = QuadReal::integer_embedding(&vals).unwrap();
        assert_eq!(e.den, BigInt::from(6));
        assert_eq!(e.parts, vec![(3, 3), (2, 0), (0, -1)]);
    }
}
