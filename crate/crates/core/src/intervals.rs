//! Finite unions of real intervals with exact endpoints.
//!
//! Sets are kept normalized: components sorted, non-empty, pairwise
//! disjoint and never touching (touching pieces are merged). Endpoint
//! inclusion is tracked precisely so that open sets, their closures and
//! their interiors can all be represented.

use std::cmp::Ordering;
use std::ops::Bound;

use crate::scalar::Scalar;

/// Position of a point relative to a set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Interval<S> {
    pub lo: Bound<S>,
    pub hi: Bound<S>,
}

impl<S: Scalar> Interval<S> {
    pub fn closed(lo: S, hi: S) -> Self {
        Interval { lo: Bound::Included(lo), hi: Bound::Included(hi) }
    }

    pub fn open(lo: S, hi: S) -> Self {
        Interval { lo: Bound::Excluded(lo), hi: Bound::Excluded(hi) }
    }

    pub fn is_empty(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Bound::Unbounded, _) | (_, Bound::Unbounded) => false,
            (Bound::Included(a), Bound::Included(b)) => a.cmp_s(b) == Ordering::Greater,
            (Bound::Included(a) | Bound::Excluded(a), Bound::Included(b) | Bound::Excluded(b)) => {
                a.cmp_s(b) != Ordering::Less
            }
        }
    }

    pub fn contains(&self, x: &S) -> bool {
        let above = match &self.lo {
            Bound::Unbounded => true,
            Bound::Included(a) => x.cmp_s(a) != Ordering::Less,
            Bound::Excluded(a) => x.cmp_s(a) == Ordering::Greater,
        };
        let below = match &self.hi {
            Bound::Unbounded => true,
            Bound::Included(b) => x.cmp_s(b) != Ordering::Greater,
            Bound::Excluded(b) => x.cmp_s(b) == Ordering::Less,
        };
        above && below
    }

    pub fn lo_value(&self) -> Option<&S> {
        bound_value(&self.lo)
    }

    pub fn hi_value(&self) -> Option<&S> {
        bound_value(&self.hi)
    }

    /// Exact length; `None` when unbounded.
    pub fn length(&self) -> Option<S> {
        Some(self.hi_value()?.clone() - self.lo_value()?.clone())
    }

    fn intersect(&self, other: &Self) -> Self {
        Interval {
            lo: max_lower(&self.lo, &other.lo),
            hi: min_upper(&self.hi, &other.hi),
        }
    }
}

fn bound_value<S>(b: &Bound<S>) -> Option<&S> {
    match b {
        Bound::Included(v) | Bound::Excluded(v) => Some(v),
        Bound::Unbounded => None,
    }
}

fn map_bound<S, T>(b: &Bound<S>, f: impl FnOnce(&S) -> T) -> Bound<T> {
    match b {
        Bound::Included(v) => Bound::Included(f(v)),
        Bound::Excluded(v) => Bound::Excluded(f(v)),
        Bound::Unbounded => Bound::Unbounded,
    }
}

/// Ordering of lower bounds: which starts first.
fn cmp_lower<S: Scalar>(a: &Bound<S>, b: &Bound<S>) -> Ordering {
    match (a, b) {
        (Bound::Unbounded, Bound::Unbounded) => Ordering::Equal,
        (Bound::Unbounded, _) => Ordering::Less,
        (_, Bound::Unbounded) => Ordering::Greater,
        (x, y) => {
            let (va, vb) = (bound_value(x).unwrap(), bound_value(y).unwrap());
            va.cmp_s(vb).then_with(|| match (x, y) {
                (Bound::Included(_), Bound::Excluded(_)) => Ordering::Less,
                (Bound::Excluded(_), Bound::Included(_)) => Ordering::Greater,
                _ => Ordering::Equal,
            })
        }
    }
}

/// Ordering of upper bounds: which ends last.
fn cmp_upper<S: Scalar>(a: &Bound<S>, b: &Bound<S>) -> Ordering {
    match (a, b) {
        (Bound::Unbounded, Bound::Unbounded) => Ordering::Equal,
        (Bound::Unbounded, _) => Ordering::Greater,
        (_, Bound::Unbounded) => Ordering::Less,
        (x, y) => {
            let (va, vb) = (bound_value(x).unwrap(), bound_value(y).unwrap());
            va.cmp_s(vb).then_with(|| match (x, y) {
                (Bound::Included(_), Bound::Excluded(_)) => Ordering::Greater,
                (Bound::Excluded(_), Bound::Included(_)) => Ordering::Less,
                _ => Ordering::Equal,
            })
        }
    }
}

fn max_lower<S: Scalar>(a: &Bound<S>, b: &Bound<S>) -> Bound<S> {
    if cmp_lower(a, b) == Ordering::Less { b.clone() } else { a.clone() }
}

fn min_upper<S: Scalar>(a: &Bound<S>, b: &Bound<S>) -> Bound<S> {
    if cmp_upper(a, b) == Ordering::Greater { b.clone() } else { a.clone() }
}

/// Whether `next` (starting no earlier than `cur`) overlaps or touches `cur`.
fn connects<S: Scalar>(cur_hi: &Bound<S>, next_lo: &Bound<S>) -> bool {
    match (cur_hi, next_lo) {
        (Bound::Unbounded, _) | (_, Bound::Unbounded) => true,
        (h, l) => {
            let (vh, vl) = (bound_value(h).unwrap(), bound_value(l).unwrap());
            match vl.cmp_s(vh) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => {
                    matches!(h, Bound::Included(_)) || matches!(l, Bound::Included(_))
                }
            }
        }
    }
}

fn flip<S: Clone>(b: &Bound<S>) -> Bound<S> {
    match b {
        Bound::Included(v) => Bound::Excluded(v.clone()),
        Bound::Excluded(v) => Bound::Included(v.clone()),
        Bound::Unbounded => Bound::Unbounded,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSet<S> {
    parts: Vec<Interval<S>>,
}

impl<S: Scalar> Default for IntervalSet<S> {
    fn default() -> Self {
        IntervalSet { parts: Vec::new() }
    }
}

impl<S: Scalar> IntervalSet<S> {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full() -> Self {
        IntervalSet { parts: vec![Interval { lo: Bound::Unbounded, hi: Bound::Unbounded }] }
    }

    pub fn from_intervals(parts: impl IntoIterator<Item = Interval<S>>) -> Self {
        let mut v: Vec<Interval<S>> = parts.into_iter().filter(|i| !i.is_empty()).collect();
        v.sort_by(|a, b| cmp_lower(&a.lo, &b.lo));
        let mut out: Vec<Interval<S>> = Vec::with_capacity(v.len());
        for iv in v {
            if let Some(last) = out.last_mut() {
                if connects(&last.hi, &iv.lo) {
                    if cmp_upper(&iv.hi, &last.hi) == Ordering::Greater {
                        last.hi = iv.hi;
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        IntervalSet { parts: out }
    }

    pub fn closed(lo: S, hi: S) -> Self {
        Self::from_intervals([Interval::closed(lo, hi)])
    }

    pub fn open(lo: S, hi: S) -> Self {
        Self::from_intervals([Interval::open(lo, hi)])
    }

    pub fn parts(&self) -> &[Interval<S>] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::from_intervals(self.parts.iter().chain(&other.parts).cloned())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        for a in &self.parts {
            for b in &other.parts {
                let c = a.intersect(b);
                if !c.is_empty() {
                    out.push(c);
                }
            }
        }
        Self::from_intervals(out)
    }

    pub fn complement(&self) -> Self {
        let mut out = Vec::new();
        let mut lo = Bound::Unbounded;
        for p in &self.parts {
            if !matches!(p.lo, Bound::Unbounded) {
                out.push(Interval { lo: lo.clone(), hi: flip(&p.lo) });
            }
            lo = flip(&p.hi);
        }
        if !matches!(lo, Bound::Unbounded) || self.parts.is_empty() {
            out.push(Interval { lo, hi: Bound::Unbounded });
        }
        Self::from_intervals(out)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn translate(&self, t: &S) -> Self {
        IntervalSet {
            parts: self
                .parts
                .iter()
                .map(|p| Interval {
                    lo: map_bound(&p.lo, |v| v.clone() + t.clone()),
                    hi: map_bound(&p.hi, |v| v.clone() + t.clone()),
                })
                .collect(),
        }
    }

    pub fn closure(&self) -> Self {
        let close = |b: &Bound<S>| match b {
            Bound::Excluded(v) => Bound::Included(v.clone()),
            other => other.clone(),
        };
        Self::from_intervals(self.parts.iter().map(|p| Interval { lo: close(&p.lo), hi: close(&p.hi) }))
    }

    pub fn interior(&self) -> Self {
        let open = |b: &Bound<S>| match b {
            Bound::Included(v) => Bound::Excluded(v.clone()),
            other => other.clone(),
        };
        Self::from_intervals(self.parts.iter().map(|p| Interval { lo: open(&p.lo), hi: open(&p.hi) }))
    }

    /// Closure of the interior: drops isolated points.
    pub fn regularized(&self) -> Self {
        self.interior().closure()
    }

    pub fn contains(&self, x: &S) -> bool {
        self.parts.iter().any(|p| p.contains(x))
    }

    pub fn locate(&self, x: &S) -> Location {
        if self.interior().contains(x) {
            Location::Interior
        } else if self.closure().contains(x) {
            Location::Boundary
        } else {
            Location::Exterior
        }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    /// Exact total length, starting from `zero`; `None` if unbounded.
    pub fn measure(&self, zero: &S) -> Option<S> {
        let mut total = zero.clone();
        for p in &self.parts {
            total = total + p.length()?;
        }
        Some(total)
    }

    pub fn measure_f64(&self) -> f64 {
        self.parts
            .iter()
            .map(|p| match (p.lo_value(), p.hi_value()) {
                (Some(a), Some(b)) => b.to_f64() - a.to_f64(),
                _ => f64::INFINITY,
            })
            .sum()
    }

    /// Smallest and largest finite endpoints.
    pub fn hull(&self) -> Option<(S, S)> {
        let lo = self.parts.first()?.lo_value()?.clone();
        let hi = self.parts.last()?.hi_value()?.clone();
        Some((lo, hi))
    }

    /// All finite endpoints in order.
    pub fn endpoints(&self) -> Vec<S> {
        self.parts
            .iter()
            .flat_map(|p| [p.lo_value().cloned(), p.hi_value().cloned()])
            .flatten()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::{QuadField, QuadReal};
    use proptest::prelude::*;

    fn q(v: i64) -> QuadReal {
        QuadField::GOLDEN.int(v)
    }

    #[test]
    fn merge_and_touching() {
        let s = IntervalSet::from_intervals([
            Interval { lo: Bound::Included(q(0)), hi: Bound::Excluded(q(1)) },
            Interval { lo: Bound::Included(q(1)), hi: Bound::Included(q(2)) },
        ]);
        assert_eq!(s.parts().len(), 1);
        let t = IntervalSet::from_intervals([Interval::open(q(0), q(1)), Interval::open(q(1), q(2))]);
        assert_eq!(t.parts().len(), 2);
        assert_eq!(t.closure(), IntervalSet::closed(q(0), q(2)));
        assert_eq!(t.locate(&q(1)), Location::Boundary);
        assert_eq!(IntervalSet::closed(q(0), q(2)).locate(&q(1)), Location::Interior);
    }

    #[test]
    fn complement_and_difference() {
        let s = IntervalSet::closed(q(0), q(2));
        let c = s.complement();
        assert_eq!(c.parts().len(), 2);
        assert!(!c.contains(&q(0)));
        assert!(c.contains(&q(-1)));
        assert_eq!(c.complement(), s);
        let d = s.difference(&IntervalSet::open(q(1), q(3)));
        assert_eq!(d, IntervalSet::closed(q(0), q(1)));
        assert!(IntervalSet::<QuadReal>::empty().complement().contains(&q(7)));
    }

    #[test]
    fn regularize_drops_points() {
        let s = IntervalSet::closed(q(0), q(1)).intersection(&IntervalSet::closed(q(1), q(2)));
        assert!(!s.is_empty());
        assert!(s.regularized().is_empty());
    }

    #[test]
    fn exact_measure() {
        let f = QuadField::GOLDEN;
        let s = IntervalSet::closed(f.int(-1), &f.phi() - &f.one());
        assert_eq!(s.measure(&f.zero()).unwrap(), f.phi());
    }

    fn arb_set() -> impl Strategy<Value = IntervalSet<f64>> {
        prop::collection::vec((-20i32..20, 0i32..6, any::<bool>(), any::<bool>()), 0..5).prop_map(|v| {
            IntervalSet::from_intervals(v.into_iter().map(|(a, w, lc, hc)| {
                let lo = a as f64;
                let hi = (a + w) as f64;
                Interval {
                    lo: if lc { Bound::Included(lo) } else { Bound::Excluded(lo) },
                    hi: if hc { Bound::Included(hi) } else { Bound::Excluded(hi) },
                }
            }))
        })
    }

    proptest! {
        #[test]
        fn boolean_algebra_pointwise(a in arb_set(), b in arb_set(), x in -25i32..30) {
            // half-integers probe interiors, integers probe endpoints
            for p in [x as f64, x as f64 + 0.5] {
                prop_assert_eq!(a.union(&b).contains(&p), a.contains(&p) || b.contains(&p));
                prop_assert_eq!(a.intersection(&b).contains(&p), a.contains(&p) && b.contains(&p));
                prop_assert_eq!(a.complement().contains(&p), !a.contains(&p));
            }
        }

        #[test]
        fn subset_consistent(a in arb_set(), b in arb_set()) {
            prop_assert!(a.intersection(&b).is_subset_of(&a));
            prop_assert!(a.is_subset_of(&a.union(&b)));
        }
    }
}
