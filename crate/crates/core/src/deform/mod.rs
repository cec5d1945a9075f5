//! Shape deformations `x -> x + F(x)`: generators, pattern equivariance,
//! the Meyer test, the nonslip probe and the linear-plus-local decomposition.

mod decompose;
mod meyer;
mod nonslip;

pub use decompose::{decompose_generator, DecompositionResult, RadiusFit};
pub use meyer::{meyer_report, MeyerReport, MeyerThresholds, MeyerVerdict};
pub use nonslip::{nonslip_probe, NonslipReport, NonslipRow};

use std::collections::{BTreeMap, HashMap};

use crate::acceptance::{patch_displacements, Region};
use crate::error::{Error, Result};
use crate::scalar::{render, Scalar};
use crate::scheme::{DeformedPoint, DeformedSample, PointSample};

/// Translation class of a patch: sorted lattice displacements from the anchor.
pub type PatchClass = Vec<Vec<i64>>;

/// Local rule: value determined by the patch class at a fixed radius.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalRule<S> {
    pub radius: S,
    pub table: BTreeMap<PatchClass, Vec<S>>,
}

/// Explicit values on lattice points, bounded by `bound` in the max norm.
#[derive(Debug, Clone, PartialEq)]
pub struct TableGenerator<S> {
    pub values: BTreeMap<Vec<i64>, Vec<S>>,
    pub bound: S,
}

/// Deformation generator `F: Lambda -> R^d`.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator<S> {
    /// `F = L o sigma`, `L` as `d` rows of length `n`.
    LinearInternal(Vec<Vec<S>>),
    LocalRule(LocalRule<S>),
    Table(TableGenerator<S>),
}

impl<S: Scalar> LocalRule<S> {
    /// Tabulates `f` on every patch class of radius `radius` that occurs at
    /// an interior point of the given samples. `f` sees the patch points.
    pub fn from_fn<F>(samples: &[&PointSample<S>], radius: S, f: F) -> Self
    where
        F: Fn(&[Vec<S>]) -> Vec<S>,
    {
        let region = Region::Ball(radius.clone());
        let mut table = BTreeMap::new();
        for s in samples {
            for i in 0..s.len() {
                if !s.bbox.contains_ball(&s.positions[i], &radius) {
                    continue;
                }
                let class = patch_displacements(s, i, &region);
                if table.contains_key(&class) {
                    continue;
                }
                let points: Vec<Vec<S>> = class.iter().map(|k| s.scheme.physical_of(k)).collect();
                let v = f(&points);
                table.insert(class, v);
            }
        }
        LocalRule { radius, table }
    }
}

impl<S: Scalar> TableGenerator<S> {
    pub fn new(values: BTreeMap<Vec<i64>, Vec<S>>, bound: S) -> Result<Self> {
        for (k, v) in &values {
            if v.iter().any(|x| x.abs_s().cmp_s(&bound).is_gt()) {
                return Err(Error::Precondition(format!("table value at {k:?} exceeds the bound {}", render(&bound))));
            }
        }
        Ok(TableGenerator { values, bound })
    }
}

impl<S: Scalar> Generator<S> {
    /// `F(x_i)`, or `None` when the point cannot be classified (edge of the
    /// box for local rules, absent from a table).
    pub fn evaluate(&self, sample: &PointSample<S>, i: usize) -> Result<Option<Vec<S>>> {
        match self {
            Generator::LinearInternal(l) => {
                let (d, n) = (sample.scheme.d(), sample.scheme.n());
                if l.len() != d || l.iter().any(|r| r.len() != n) {
                    return Err(Error::Dimension(format!("linear map must be {d} x {n}")));
                }
                let star = sample.star(i).value;
                Ok(Some(
                    l.iter()
                        .map(|row| {
                            let mut acc = star.first().map_or_else(|| sample.scheme.template().zero_like(), |s| s.zero_like());
                            for (a, h) in row.iter().zip(&star) {
                                acc = acc + a.clone() * h.clone();
                            }
                            acc
                        })
                        .collect(),
                ))
            }
            Generator::LocalRule(rule) => {
                if !sample.bbox.contains_ball(&sample.positions[i], &rule.radius) {
                    return Ok(None);
                }
                let class = patch_displacements(sample, i, &Region::Ball(rule.radius.clone()));
                match rule.table.get(&class) {
                    Some(v) => Ok(Some(v.clone())),
                    None => Err(Error::MissingPatchClass { radius: render(&rule.radius), points: class.len() }),
                }
            }
            Generator::Table(t) => Ok(t.values.get(&sample.points[i].coords).cloned()),
        }
    }

    /// Values at every point, `None` where unclassifiable.
    pub fn evaluate_all(&self, sample: &PointSample<S>) -> Result<Vec<Option<Vec<S>>>> {
        (0..sample.len()).map(|i| self.evaluate(sample, i)).collect()
    }

    /// Table generator from per-point values on a sample.
    pub fn tabulate(sample: &PointSample<S>, values: &[Option<Vec<S>>]) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut bound = sample.scheme.template().zero_like();
        for (i, v) in values.iter().enumerate() {
            if let Some(v) = v {
                for x in v {
                    bound = bound.max_s(x.abs_s());
                }
                map.insert(sample.points[i].coords.clone(), v.clone());
            }
        }
        Ok(Generator::Table(TableGenerator::new(map, bound)?))
    }

    /// Radius beyond which the generator's values are patch-determined.
    pub fn rule_radius(&self) -> Option<&S> {
        match self {
            Generator::LocalRule(r) => Some(&r.radius),
            _ => None,
        }
    }
}

/// A generator defined uniformly on every set of a family, instantiated
/// from each set's own data.
pub trait GeneratorFamily<S>: Sync {
    fn instantiate(&self, sample: &PointSample<S>) -> Result<Generator<S>>;
}

impl<S: Scalar> GeneratorFamily<S> for Generator<S> {
    fn instantiate(&self, _sample: &PointSample<S>) -> Result<Generator<S>> {
        Ok(self.clone())
    }
}

/// The patch-incoherent family `F(x) = scale * frac(sum of the sample points
/// left of x)`. Bounded, but depends on the whole half-line (1D).
#[derive(Debug, Clone)]
pub struct PrefixSumFraction<S> {
    pub scale: S,
}

impl<S: Scalar> GeneratorFamily<S> for PrefixSumFraction<S> {
    fn instantiate(&self, sample: &PointSample<S>) -> Result<Generator<S>> {
        if sample.scheme.d() != 1 {
            return Err(Error::Unsupported("prefix sums need d = 1".into()));
        }
        let mut acc = self.scale.zero_like();
        let mut values = BTreeMap::new();
        for i in 0..sample.len() {
            let frac = acc.clone() - acc.floor_s();
            values.insert(sample.points[i].coords.clone(), vec![self.scale.clone() * frac]);
            acc = acc + sample.positions[i][0].clone();
        }
        Ok(Generator::Table(TableGenerator::new(values, self.scale.abs_s())?))
    }
}

/// `Lambda^F = {x + F(x)}`; unclassifiable points are dropped and counted.
pub fn apply_generator<S: Scalar>(sample: &PointSample<S>, generator: &Generator<S>) -> Result<DeformedSample<S>> {
    let values = generator.evaluate_all(sample)?;
    let mut trimmed = 0;
    let mut points = Vec::with_capacity(sample.len());
    for (i, v) in values.into_iter().enumerate() {
        match v {
            Some(v) => {
                let x = &sample.positions[i];
                let position = x.iter().zip(&v).map(|(a, b)| a.clone() + b.clone()).collect();
                points.push(DeformedPoint { coords: sample.points[i].coords.clone(), original: x.clone(), position });
            }
            None => trimmed += 1,
        }
    }
    Ok(DeformedSample::from_points(points, trimmed))
}

/// Verdict of the strong pattern-equivariance test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PeVerdict {
    Yes { classes: usize, points: usize },
    /// Two sample indices with equal patch classes and different values.
    No { witness: (usize, usize) },
}

/// Groups interior points by the class of their `R`-patch and checks that
/// `values` is constant on each class. `values[i] = None` points are skipped.
pub fn is_strongly_pe<S: Scalar>(sample: &PointSample<S>, values: &[Option<Vec<S>>], radius: &S) -> Result<PeVerdict> {
    if values.len() != sample.len() {
        return Err(Error::Dimension("one value per sample point required".into()));
    }
    let region = Region::Ball(radius.clone());
    let mut seen: HashMap<PatchClass, (usize, Vec<S::Key>)> = HashMap::new();
    let mut points = 0;
    for (i, v) in values.iter().enumerate() {
        let Some(v) = v else { continue };
        if !sample.bbox.contains_ball(&sample.positions[i], radius) {
            continue;
        }
        points += 1;
        let key: Vec<S::Key> = v.iter().map(|x| x.key()).collect();
        let class = patch_displacements(sample, i, &region);
        match seen.get(&class) {
            Some((j, k)) => {
                if *k != key {
                    return Ok(PeVerdict::No { witness: (*j, i) });
                }
            }
            None => {
                seen.insert(class, (i, key));
            }
        }
    }
    if points == 0 {
        return Err(Error::Precondition(format!("no point has a {}-ball inside the box", render(radius))));
    }
    Ok(PeVerdict::Yes { classes: seen.len(), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::{QuadField, QuadReal};
    use crate::scheme::{enumerate_model_set, reproject, CutProjectScheme, PhysBox, WindowRegion, Xi};

    pub(crate) fn fib_sample(lo: i64, hi: i64) -> PointSample<QuadReal> {
        let f = QuadField::GOLDEN;
        let s = CutProjectScheme::fibonacci();
        let w = WindowRegion::interval(f.int(-1), &f.phi() - &f.one()).unwrap();
        let xi = Xi::new(vec![f.ratio(1, 7)], vec![f.zero()]);
        enumerate_model_set(&s, &w, &xi, &PhysBox::interval(f.int(lo), f.int(hi)).unwrap()).unwrap()
    }

    #[test]
    fn zero_generator_is_identity() {
        let f = QuadField::GOLDEN;
        let s = fib_sample(0, 50);
        let out = apply_generator(&s, &Generator::LinearInternal(vec![vec![f.zero()]])).unwrap();
        assert_eq!(out.positions(), s.positions);
    }

    #[test]
    fn linear_generator_matches_reprojection() {
        let f = QuadField::GOLDEN;
        let s = fib_sample(0, 80);
        let l = vec![vec![f.ratio(1, 5)]];
        let a = apply_generator(&s, &Generator::LinearInternal(l.clone())).unwrap();
        let b = reproject(&s, &l).unwrap();
        assert_eq!(a.points, b.points);
    }

    #[test]
    fn right_gap_rule_is_pe_and_star_is_not() {
        let f = QuadField::GOLDEN;
        let s = fib_sample(0, 200);
        let eps = f.ratio(1, 100);
        let rule = LocalRule::from_fn(&[&s], f.int(2), |pts| {
            let right_is_one = pts.iter().any(|p| p[0] == f.one());
            vec![if right_is_one { eps.clone() } else { f.zero() }]
        });
        let g = Generator::LocalRule(rule);
        let vals = g.evaluate_all(&s).unwrap();
        assert!(vals.iter().any(|v| v.is_none()));
        assert!(matches!(is_strongly_pe(&s, &vals, &f.int(2)).unwrap(), PeVerdict::Yes { .. }));
        let stars: Vec<Option<Vec<QuadReal>>> = (0..s.len()).map(|i| Some(s.star(i).value)).collect();
        for r in 0..4 {
            assert!(matches!(is_strongly_pe(&s, &stars, &f.int(r)).unwrap(), PeVerdict::No { .. }));
        }
        let constant: Vec<Option<Vec<QuadReal>>> = vec![Some(vec![f.one()]); s.len()];
        assert!(matches!(is_strongly_pe(&s, &constant, &f.int(3)).unwrap(), PeVerdict::Yes { .. }));
        let moved = apply_generator(&s, &g).unwrap();
        assert!(moved.trimmed > 0);
    }

    #[test]
    fn table_bound_enforced() {
        let f = QuadField::GOLDEN;
        let mut m = BTreeMap::new();
        m.insert(vec![0, 0], vec![f.int(2)]);
        assert!(TableGenerator::new(m, f.one()).is_err());
    }
}
