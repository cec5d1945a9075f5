use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::CutProjectScheme;

/// Closed axis-aligned box in physical space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysBox<S> {
    pub lo: Vec<S>,
    pub hi: Vec<S>,
}

impl<S: Scalar> PhysBox<S> {
    pub fn new(lo: Vec<S>, hi: Vec<S>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidBox("corner dimensions differ".into()));
        }
        if lo.iter().zip(&hi).any(|(a, b)| a.cmp_s(b).is_gt()) {
            return Err(Error::InvalidBox("lower corner exceeds upper corner".into()));
        }
        Ok(PhysBox { lo, hi })
    }

    /// `[lo, hi]` in one dimension.
    pub fn interval(lo: S, hi: S) -> Result<Self> {
        PhysBox::new(vec![lo], vec![hi])
    }

    /// `[-r, r]^d`.
    pub fn symmetric(r: S, d: usize) -> Result<Self> {
        PhysBox::new(vec![-r.clone(); d], vec![r; d])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[S]) -> bool {
        x.iter().zip(&self.lo).zip(&self.hi).all(|((v, a), b)| v.cmp_s(a).is_ge() && v.cmp_s(b).is_le())
    }

    /// Whether the closed Euclidean ball `B_r(center)` lies inside the box.
    pub fn contains_ball(&self, center: &[S], r: &S) -> bool {
        center.iter().zip(&self.lo).zip(&self.hi).all(|((c, a), b)| {
            (c.clone() - r.clone()).cmp_s(a).is_ge() && (c.clone() + r.clone()).cmp_s(b).is_le()
        })
    }

    pub fn translate(&self, t: &[S]) -> Self {
        PhysBox {
            lo: self.lo.iter().zip(t).map(|(a, b)| a.clone() + b.clone()).collect(),
            hi: self.hi.iter().zip(t).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    pub fn lo_f64(&self) -> Vec<f64> {
        self.lo.iter().map(|v| v.to_f64()).collect()
    }

    pub fn hi_f64(&self) -> Vec<f64> {
        self.hi.iter().map(|v| v.to_f64()).collect()
    }
}

/// All lattice coordinate vectors `k` with `basis * k` in the float box
/// `[lo, hi]` (internal rows first) that pass the exact `accept` test.
///
/// The coordinate slab is the image of the box under the inverse basis,
/// padded by half its width plus one. An accepted point on the slab edge
/// doubles the padding and restarts.
pub(crate) fn enumerate_lattice<S, F>(
    scheme: &CutProjectScheme<S>,
    lo: &[f64],
    hi: &[f64],
    accept: F,
) -> Result<Vec<Vec<i64>>>
where
    S: Scalar,
    F: Fn(&[i64]) -> Result<bool> + Sync,
{
    let dim = scheme.dim();
    let inv = scheme.inverse_rows_f64();
    let rows = scheme.rows_f64();
    if lo.iter().chain(hi).any(|v| !v.is_finite()) {
        return Err(Error::InvalidBox("non-finite enumeration bounds".into()));
    }
    let mut k_lo = vec![0f64; dim];
    let mut k_hi = vec![0f64; dim];
    for i in 0..dim {
        for j in 0..dim {
            let a = inv[i][j] * lo[j];
            let b = inv[i][j] * hi[j];
            k_lo[i] += a.min(b);
            k_hi[i] += a.max(b);
        }
    }
    let widest = (0..dim)
        .max_by(|&a, &b| (k_hi[a] - k_lo[a]).total_cmp(&(k_hi[b] - k_lo[b])))
        .expect("positive dimension");
    let mut pad_factor = 0.25;
    loop {
        let range: Vec<(i64, i64)> = (0..dim)
            .map(|i| {
                let pad = (k_hi[i] - k_lo[i]) * pad_factor + 1.0;
                ((k_lo[i] - pad).floor() as i64, (k_hi[i] + pad).ceil() as i64)
            })
            .collect();
        let total: f64 = (0..dim).filter(|&i| i != widest).map(|i| (range[i].1 - range[i].0 + 1) as f64).product();
        if total > 5e8 {
            return Err(Error::InvalidBox(format!("enumeration slab too large ({total:.0} rows)")));
        }
        let others: Vec<usize> = (0..dim).filter(|&i| i != widest).collect();
        // Outer loop over the first "other" coordinate is split for rayon.
        let outer: Vec<i64> = match others.first() {
            Some(&o) => (range[o].0..=range[o].1).collect(),
            None => vec![0],
        };
        let results: Vec<Result<Vec<Vec<i64>>>> = outer
            .par_iter()
            .map(|&first| {
                let mut found = Vec::new();
                let mut k = vec![0i64; dim];
                if let Some(&o) = others.first() {
                    k[o] = first;
                }
                let rest = &others[others.len().min(1)..];
                for &r in rest {
                    k[r] = range[r].0;
                }
                loop {
                    // solve the range of the widest coordinate
                    let mut w_lo = range[widest].0 as f64;
                    let mut w_hi = range[widest].1 as f64;
                    for row in 0..dim {
                        let coef = rows[row][widest];
                        if coef.abs() < 1e-300 {
                            continue;
                        }
                        let partial: f64 = others.iter().map(|&c| rows[row][c] * k[c] as f64).sum();
                        let a = (lo[row] - partial) / coef;
                        let b = (hi[row] - partial) / coef;
                        w_lo = w_lo.max(a.min(b) - 1.0);
                        w_hi = w_hi.min(a.max(b) + 1.0);
                    }
                    if w_lo <= w_hi {
                        for kw in (w_lo.floor() as i64)..=(w_hi.ceil() as i64) {
                            if kw < range[widest].0 || kw > range[widest].1 {
                                continue;
                            }
                            k[widest] = kw;
                            if accept(&k)? {
                                found.push(k.clone());
                            }
                        }
                    }
                    // odometer over the remaining coordinates
                    let mut advanced = false;
                    for &r in rest {
                        if k[r] < range[r].1 {
                            k[r] += 1;
                            advanced = true;
                            break;
                        }
                        k[r] = range[r].0;
                    }
                    if !advanced {
                        break;
                    }
                }
                Ok(found)
            })
            .collect();
        let mut all = Vec::new();
        for r in results {
            all.extend(r?);
        }
        let on_edge = all.iter().any(|k| (0..dim).any(|i| k[i] == range[i].0 || k[i] == range[i].1));
        if !on_edge {
            all.sort();
            return Ok(all);
        }
        pad_factor *= 2.0;
        if pad_factor > 64.0 {
            return Err(Error::Internal("enumeration audit did not stabilize".into()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn box_rules() {
        assert!(PhysBox::interval(1.0, 0.0).is_err());
        let b = PhysBox::interval(0.0, 10.0).unwrap();
        assert!(b.contains(&[10.0]));
        assert!(b.contains_ball(&[5.0], &5.0));
        assert!(!b.contains_ball(&[5.0], &5.5));
    }

    #[test]
    fn slab_finds_all_fibonacci_points() {
        let s = CutProjectScheme::fibonacci_f64();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let found = enumerate_lattice(&s, &[-1.0, 0.0], &[phi - 1.0, 30.0], |k| {
            let h = s.internal_of(k)[0];
            let x = s.physical_of(k)[0];
            Ok(h > -1.0 && h < phi - 1.0 && (0.0..=30.0).contains(&x))
        })
        .unwrap();
        // brute force oracle
        let mut oracle = Vec::new();
        for m in -100i64..=100 {
            for n in -100i64..=100 {
                let h = m as f64 + n as f64 * (1.0 - phi);
                let x = m as f64 + n as f64 * phi;
                if h > -1.0 && h < phi - 1.0 && (0.0..=30.0).contains(&x) {
                    oracle.push(vec![m, n]);
                }
            }
        }
        oracle.sort();
        assert_eq!(found, oracle);
    }
}
