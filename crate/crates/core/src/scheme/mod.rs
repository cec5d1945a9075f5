//! Cut & project schemes: a lattice in `H x R^d` with `H = R^n x C`, a
//! window in `H`, and the projection sets they define.

mod enumerate;
mod sample;
mod validate;
mod window;

pub use enumerate::PhysBox;
pub use sample::{
    displacement_candidates, displacement_candidates_in_ball, displacement_candidates_in_box, enumerate_model_set,
    enumerate_with_convention, is_nonsingular, reproject, separation_lower_bound, star_of,
    BoundaryConvention, DeformedPoint, DeformedSample, InternalValue, NonsingularVerdict,
    PointSample, Xi,
};
pub use validate::{validate_scheme, SchemeDiagnostics};
pub use window::{Cell, HalfSpace, Polytope, WindowRegion};

pub(crate) use sample::min_distance_sq;
pub(crate) use window::cell_polytope;

use std::fmt;

use crate::error::{Error, Result};
use crate::quadfield::{QuadField, QuadReal};
use crate::scalar::{determinant, inverse_f64, Scalar};

/// Element of the finite group `C = Z/m1 x ... x Z/mk`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct TorsionElem(pub Vec<u32>);

impl TorsionElem {
    pub fn trivial(orders: &[u32]) -> Self {
        TorsionElem(vec![0; orders.len()])
    }

    pub fn add(&self, other: &Self, orders: &[u32]) -> Self {
        TorsionElem(
            orders
                .iter()
                .enumerate()
                .map(|(i, &m)| (self.0[i] + other.0[i]) % m)
                .collect(),
        )
    }

    pub fn neg(&self, orders: &[u32]) -> Self {
        TorsionElem(
            orders
                .iter()
                .enumerate()
                .map(|(i, &m)| (m - self.0[i] % m) % m)
                .collect(),
        )
    }

    pub fn scale(&self, k: i64, orders: &[u32]) -> Self {
        TorsionElem(
            orders
                .iter()
                .enumerate()
                .map(|(i, &m)| ((self.0[i] as i64 * k).rem_euclid(m as i64)) as u32)
                .collect(),
        )
    }

    /// Parses the config key form `"1,0"`; the empty string is the trivial element.
    pub fn parse(text: &str, orders: &[u32]) -> Result<Self> {
        let t = text.trim();
        let parts: Vec<u32> = if t.is_empty() {
            Vec::new()
        } else {
            t.split(',')
                .map(|p| p.trim().parse::<u32>().map_err(|_| Error::Config(format!("bad torsion element {text:?}"))))
                .collect::<Result<_>>()?
        };
        if parts.len() != orders.len() || parts.iter().zip(orders).any(|(v, m)| v >= m) {
            return Err(Error::Config(format!("torsion element {text:?} does not match orders {orders:?}")));
        }
        Ok(TorsionElem(parts))
    }
}

impl fmt::Display for TorsionElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// A lattice `Gamma` in `(R^n x C) x R^d`, given by `n+d` generators.
#[derive(Debug, Clone)]
pub struct CutProjectScheme<S> {
    d: usize,
    n: usize,
    torsion: Vec<u32>,
    /// Generators; entry `[j][r]` is row `r` of column `j`, internal rows first.
    columns: Vec<Vec<S>>,
    torsion_labels: Vec<TorsionElem>,
    rows_f64: Vec<Vec<f64>>,
    inverse_f64: Vec<Vec<f64>>,
}

impl<S: Scalar> CutProjectScheme<S> {
    pub fn new(
        d: usize,
        n: usize,
        torsion: Vec<u32>,
        columns: Vec<Vec<S>>,
        torsion_labels: Option<Vec<TorsionElem>>,
    ) -> Result<Self> {
        let dim = n + d;
        if d == 0 {
            return Err(Error::Dimension("physical dimension must be positive".into()));
        }
        if columns.len() != dim || columns.iter().any(|c| c.len() != dim) {
            return Err(Error::Dimension(format!("basis must be {dim} columns of length {dim}")));
        }
        if torsion.contains(&0) {
            return Err(Error::Config("torsion orders must be positive".into()));
        }
        let labels = match torsion_labels {
            Some(l) => {
                if l.len() != dim || l.iter().any(|t| t.0.len() != torsion.len()) {
                    return Err(Error::Dimension("one torsion label per generator required".into()));
                }
                l.into_iter()
                    .map(|t| TorsionElem(t.0.iter().zip(&torsion).map(|(v, m)| v % m).collect()))
                    .collect()
            }
            None => vec![TorsionElem::trivial(&torsion); dim],
        };
        let rows: Vec<Vec<S>> = (0..dim).map(|r| (0..dim).map(|c| columns[c][r].clone()).collect()).collect();
        if determinant(&rows).is_zero_s() {
            return Err(Error::SingularBasis);
        }
        let rows_f64: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect();
        let inverse_f64 = inverse_f64(&rows_f64).ok_or(Error::SingularBasis)?;
        Ok(CutProjectScheme { d, n, torsion, columns, torsion_labels: labels, rows_f64, inverse_f64 })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.n + self.d
    }

    pub fn torsion_orders(&self) -> &[u32] {
        &self.torsion
    }

    pub fn columns(&self) -> &[Vec<S>] {
        &self.columns
    }

    pub fn torsion_labels(&self) -> &[TorsionElem] {
        &self.torsion_labels
    }

    pub(crate) fn rows_f64(&self) -> &[Vec<f64>] {
        &self.rows_f64
    }

    pub(crate) fn inverse_rows_f64(&self) -> &[Vec<f64>] {
        &self.inverse_f64
    }

    /// A scalar from the scheme's field, used as a template for constants.
    pub fn template(&self) -> &S {
        &self.columns[0][0]
    }

    pub fn determinant(&self) -> S {
        let dim = self.dim();
        let rows: Vec<Vec<S>> = (0..dim).map(|r| (0..dim).map(|c| self.columns[c][r].clone()).collect()).collect();
        determinant(&rows)
    }

    /// Row `r` of `basis * coords`.
    pub(crate) fn row_value(&self, r: usize, coords: &[i64]) -> S {
        let t = self.template();
        let mut acc = t.zero_like();
        for (c, &k) in coords.iter().enumerate() {
            if k != 0 {
                acc = acc + self.columns[c][r].clone() * t.from_i64_like(k);
            }
        }
        acc
    }

    pub fn internal_of(&self, coords: &[i64]) -> Vec<S> {
        (0..self.n).map(|r| self.row_value(r, coords)).collect()
    }

    pub fn physical_of(&self, coords: &[i64]) -> Vec<S> {
        (self.n..self.dim()).map(|r| self.row_value(r, coords)).collect()
    }

    pub fn torsion_of(&self, coords: &[i64]) -> TorsionElem {
        let mut t = TorsionElem::trivial(&self.torsion);
        for (c, &k) in coords.iter().enumerate() {
            if k != 0 {
                t = t.add(&self.torsion_labels[c].scale(k, &self.torsion), &self.torsion);
            }
        }
        t
    }

    pub fn lattice_point(&self, coords: Vec<i64>) -> LatticePoint<S> {
        LatticePoint {
            torsion: self.torsion_of(&coords),
            phys: self.physical_of(&coords),
            internal: self.internal_of(&coords),
            coords,
        }
    }
}

impl CutProjectScheme<QuadReal> {
    /// The golden-mean scheme: `Gamma = {(m + n(1-phi), m + n phi)}`, so the
    /// star map is Galois conjugation on `Z[phi]`.
    pub fn fibonacci() -> Self {
        let f = QuadField::GOLDEN;
        let phi = f.phi();
        CutProjectScheme::new(1, 1, Vec::new(), vec![vec![f.one(), f.one()], vec![&f.one() - &phi, phi]], None)
            .expect("Fibonacci basis is nonsingular")
    }
}

impl CutProjectScheme<f64> {
    pub fn fibonacci_f64() -> Self {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        CutProjectScheme::new(1, 1, Vec::new(), vec![vec![1.0, 1.0], vec![1.0 - phi, phi]], None)
            .expect("Fibonacci basis is nonsingular")
    }
}

/// A lattice vector with cached projections.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePoint<S> {
    pub coords: Vec<i64>,
    pub torsion: TorsionElem,
    pub phys: Vec<S>,
    pub internal: Vec<S>,
}

/// Lexicographic exact comparison of vectors.
pub(crate) fn cmp_vec<S: Scalar>(a: &[S], b: &[S]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let c = x.cmp_s(y);
        if c != std::cmp::Ordering::Equal {
            return c;
        }
    }
    std::cmp::Ordering::Equal
}

pub(crate) fn sub_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub(crate) fn add_vec<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub(crate) fn norm_sq<S: Scalar>(a: &[S]) -> S {
    let mut acc = a[0].zero_like();
    for x in a {
        acc = acc + x.clone() * x.clone();
    }
    acc
}

pub(crate) fn render_vec<S: Scalar>(v: &[S]) -> String {
    if v.len() == 1 {
        crate::scalar::render(&v[0])
    } else {
        let parts: Vec<String> = v.iter().map(crate::scalar::render).collect();
        format!("({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fibonacci_basis_reads_off_columns() {
        let s = CutProjectScheme::fibonacci();
        let f = QuadField::GOLDEN;
        assert_eq!(s.internal_of(&[1, 0]), vec![f.one()]);
        assert_eq!(s.internal_of(&[0, 1]), vec![&f.one() - &f.phi()]);
        assert_eq!(s.physical_of(&[0, 1]), vec![f.phi()]);
        assert_eq!(s.determinant(), f.sqrt_d());
    }

    #[test]
    fn duplicate_columns_are_singular() {
        let f = QuadField::GOLDEN;
        let err = CutProjectScheme::new(1, 1, vec![], vec![vec![f.one(), f.phi()], vec![f.one(), f.phi()]], None);
        assert!(matches!(err, Err(Error::SingularBasis)));
    }

    #[test]
    fn torsion_arithmetic() {
        let orders = [3, 2];
        let a = TorsionElem(vec![2, 1]);
        let b = TorsionElem(vec![2, 1]);
        assert_eq!(a.add(&b, &orders), TorsionElem(vec![1, 0]));
        assert_eq!(a.neg(&orders), TorsionElem(vec![1, 1]));
        assert_eq!(a.scale(-1, &orders), a.neg(&orders));
        assert_eq!(TorsionElem::parse("2,1", &orders).unwrap(), a);
        assert!(TorsionElem::parse("3,0", &orders).is_err());
    }
}
