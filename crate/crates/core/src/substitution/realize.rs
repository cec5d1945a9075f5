use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::quadfield::QuadReal;
use crate::scalar::{render, Scalar};

use super::{EigenClass, EigenVector, SubstitutionSystem};

/// Left endpoint of a marker tile.
#[derive(Debug, Clone)]
pub struct RealizedPoint<S> {
    /// Index of the tile in the expanded word.
    pub index: usize,
    pub letter: usize,
    pub position: S,
    /// Letter counts of the word before the tile.
    pub counts: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct Realization<S> {
    pub word_len: usize,
    pub total_length: S,
    pub points: Vec<RealizedPoint<S>>,
}

impl<S: Scalar> Realization<S> {
    pub fn positions(&self) -> Vec<Vec<S>> {
        self.points.iter().map(|p| vec![p.position.clone()]).collect()
    }
}

impl SubstitutionSystem {
    /// Perron-Frobenius left eigenvector scaled so its smallest entry is 1.
    pub fn natural_lengths(&self) -> Result<Vec<QuadReal>> {
        let eig = self.eigen_system()?;
        let pf = eig.pf();
        match pf.left_vectors.first() {
            Some(EigenVector::Exact(v)) => {
                let min = v.iter().cloned().reduce(|a, b| a.min(b)).expect("non-empty");
                if min.exact_sign() <= 0 {
                    return Err(Error::Internal("Perron-Frobenius vector is not positive".into()));
                }
                Ok(v.iter().map(|x| x / &min).collect())
            }
            _ => Err(Error::Unsupported(
                "the Perron-Frobenius eigenvalue is not in a real quadratic field; give lengths explicitly".into(),
            )),
        }
    }

    /// `base + eps * v`, all entries strictly positive.
    pub fn deformed_lengths<S: Scalar>(&self, base: &[S], eps: &S, v: &[S]) -> Result<Vec<S>> {
        if base.len() != self.size() || v.len() != self.size() {
            return Err(Error::Dimension(format!("one length per letter ({}) required", self.size())));
        }
        let out: Vec<S> = base.iter().zip(v).map(|(b, x)| b.clone() + eps.clone() * x.clone()).collect();
        for (i, l) in out.iter().enumerate() {
            if l.sign().is_le() {
                return Err(Error::NonPositiveLength(format!("{} = {}", self.alphabet[i], render(l))));
            }
        }
        Ok(out)
    }

    /// Length of `sigma^n(letter)` under tile lengths `lengths`.
    pub fn supertile_length<S: Scalar>(&self, lengths: &[S], letter: usize, n: u32) -> Result<S> {
        let pop = self.population(letter, n);
        let mut acc = lengths[0].zero_like();
        for (c, l) in pop.iter().zip(lengths) {
            let c = c.to_i64().ok_or_else(|| Error::Unsupported(format!("population of generation {n} overflows")))?;
            acc = acc + l.from_i64_like(c) * l.clone();
        }
        Ok(acc)
    }

    /// Lays `sigma^n(seed)` out on the line from 0 with the given tile
    /// lengths and keeps the left endpoints of tiles whose letter is a marker.
    pub fn realize<S: Scalar>(&self, seed: usize, n: u32, lengths: &[S], markers: &[usize]) -> Result<Realization<S>> {
        if lengths.len() != self.size() {
            return Err(Error::Dimension(format!("one length per letter ({}) required", self.size())));
        }
        if let Some(i) = lengths.iter().position(|l| l.sign().is_le()) {
            return Err(Error::NonPositiveLength(self.alphabet[i].clone()));
        }
        if self.rules[seed][0] != seed {
            return Err(Error::SeedNotSelfStarting(self.alphabet[seed].clone()));
        }
        let word = self.expand(seed, n);
        let mut is_marker = vec![false; self.size()];
        for &m in markers {
            is_marker[m] = true;
        }
        let mut counts = vec![0i64; self.size()];
        let mut pos = lengths[0].zero_like();
        let mut points = Vec::new();
        for (index, &letter) in word.iter().enumerate() {
            if is_marker[letter] {
                points.push(RealizedPoint { index, letter, position: pos.clone(), counts: counts.clone() });
            }
            counts[letter] += 1;
            pos = pos + lengths[letter].clone();
        }
        Ok(Realization { word_len: word.len(), total_length: pos, points })
    }

    /// Left eigenvector of the first eigenvalue of `class`, exact.
    pub fn exact_direction(&self, class: EigenClass) -> Result<(QuadReal, Vec<QuadReal>)> {
        let eig = self.eigen_system()?;
        for e in eig.of_class(class) {
            if let (super::EigenValue::Exact(l), Some(EigenVector::Exact(v))) = (&e.value, e.left_vectors.first()) {
                return Ok((l.clone(), v.clone()));
            }
        }
        Err(Error::Unsupported(format!("no exact eigenvalue of class {class:?}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::QuadField;
    use crate::scheme::{enumerate_model_set, CutProjectScheme, PhysBox, WindowRegion, Xi};

    #[test]
    fn natural_lengths_are_phi_one() {
        let f = QuadField::GOLDEN;
        let s = SubstitutionSystem::doubled_fibonacci();
        assert_eq!(s.natural_lengths().unwrap(), vec![f.phi(), f.one(), f.phi(), f.one()]);
    }

    #[test]
    fn realization_counts_and_positions() {
        let f = QuadField::GOLDEN;
        let s = SubstitutionSystem::doubled_fibonacci();
        let l = s.natural_lengths().unwrap();
        let r = s.realize(0, 6, &l, &[0]).unwrap();
        assert_eq!(r.total_length, s.supertile_length(&l, 0, 6).unwrap());
        for p in &r.points {
            let (a, b) = (p.counts[0] + p.counts[2], p.counts[1] + p.counts[3]);
            assert_eq!(p.position, &(&f.int(a) * &f.phi()) + &f.int(b));
        }
    }

    #[test]
    fn non_self_starting_seed() {
        let s = SubstitutionSystem::doubled_fibonacci();
        let l = s.natural_lengths().unwrap();
        assert!(matches!(s.realize(1, 3, &l, &[0]), Err(Error::SeedNotSelfStarting(_))));
    }

    #[test]
    fn deformed_lengths_reject_non_positive() {
        let f = QuadField::GOLDEN;
        let s = SubstitutionSystem::doubled_fibonacci();
        let l = s.natural_lengths().unwrap();
        let v = vec![f.int(0), f.int(-1), f.int(0), f.int(0)];
        assert!(s.deformed_lengths(&l, &f.ratio(1, 2), &v).is_ok());
        assert!(matches!(s.deformed_lengths(&l, &f.int(1), &v), Err(Error::NonPositiveLength(_))));
    }

    #[test]
    fn all_letter_markers_give_fibonacci_model_set() {
        let f = QuadField::GOLDEN;
        let s = SubstitutionSystem::doubled_fibonacci();
        let l = s.natural_lengths().unwrap();
        let r = s.realize(0, 9, &l, &[0, 1, 2, 3]).unwrap();
        let scheme = CutProjectScheme::fibonacci();
        let w = WindowRegion::interval(f.int(-1), &f.phi() - &f.one()).unwrap();
        let b = PhysBox::interval(f.zero(), f.int(400)).unwrap();
        let cps = enumerate_model_set(&scheme, &w, &Xi::zero(&scheme), &b).unwrap();
        let tiled: Vec<QuadReal> = r.points.iter().map(|p| p.position.clone()).filter(|x| x <= &f.int(400)).collect();
        let model: Vec<QuadReal> = cps.positions.iter().map(|p| p[0].clone()).collect();
        assert_eq!(tiled, model);
    }
}
