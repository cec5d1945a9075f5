use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::intervals::{IntervalSet, Location};
use crate::scalar::{solve, Scalar};

use super::TorsionElem;

/// `normal . x <= offset`
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace<S> {
    pub normal: Vec<S>,
    pub offset: S,
}

impl<S: Scalar> HalfSpace<S> {
    fn slack(&self, x: &[S]) -> S {
        let mut acc = self.offset.clone();
        for (a, v) in self.normal.iter().zip(x) {
            acc = acc - a.clone() * v.clone();
        }
        acc
    }
}

/// Convex polytope in half-space representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope<S> {
    halfspaces: Vec<HalfSpace<S>>,
}

impl<S: Scalar> Polytope<S> {
    pub fn new(halfspaces: Vec<HalfSpace<S>>) -> Result<Self> {
        let Some(first) = halfspaces.first() else {
            return Err(Error::InvalidWindow("polytope without half-spaces".into()));
        };
        let dim = first.normal.len();
        if dim == 0 || halfspaces.iter().any(|h| h.normal.len() != dim) {
            return Err(Error::InvalidWindow("inconsistent half-space dimensions".into()));
        }
        Ok(Polytope { halfspaces })
    }

    /// Axis-aligned box `[lo, hi]`.
    pub fn axis_box(lo: &[S], hi: &[S]) -> Result<Self> {
        let n = lo.len();
        let zero = lo[0].zero_like();
        let mut hs = Vec::with_capacity(2 * n);
        for i in 0..n {
            let mut e = vec![zero.clone(); n];
            e[i] = zero.one_like();
            hs.push(HalfSpace { normal: e.clone(), offset: hi[i].clone() });
            hs.push(HalfSpace { normal: e.into_iter().map(|v| -v).collect(), offset: -lo[i].clone() });
        }
        Polytope::new(hs)
    }

    pub fn dim(&self) -> usize {
        self.halfspaces[0].normal.len()
    }

    pub fn halfspaces(&self) -> &[HalfSpace<S>] {
        &self.halfspaces
    }

    pub fn locate(&self, x: &[S]) -> Location {
        let mut boundary = false;
        for h in &self.halfspaces {
            match h.slack(x).sign() {
                std::cmp::Ordering::Less => return Location::Exterior,
                std::cmp::Ordering::Equal => boundary = true,
                std::cmp::Ordering::Greater => {}
            }
        }
        if boundary { Location::Boundary } else { Location::Interior }
    }

    /// Vertices, by solving every `dim`-subset of bounding hyperplanes.
    pub fn vertices(&self) -> Vec<Vec<S>> {
        let n = self.dim();
        let m = self.halfspaces.len();
        let mut out: Vec<Vec<S>> = Vec::new();
        let mut idx: Vec<usize> = (0..n).collect();
        if m < n {
            return out;
        }
        loop {
            let a: Vec<Vec<S>> = idx.iter().map(|&i| self.halfspaces[i].normal.clone()).collect();
            let b: Vec<S> = idx.iter().map(|&i| self.halfspaces[i].offset.clone()).collect();
            if let Some(x) = solve(&a, &b) {
                if self.locate(&x) != Location::Exterior
                    && !out.iter().any(|v| v.iter().zip(&x).all(|(p, q)| p.cmp_s(q).is_eq()))
                {
                    out.push(x);
                }
            }
            // next combination
            let mut i = n;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if idx[i] < m - n + i {
                    idx[i] += 1;
                    for j in i + 1..n {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// A point strictly inside, if the polytope is full-dimensional.
    pub fn interior_point(&self) -> Option<Vec<S>> {
        let verts = self.vertices();
        let n = self.dim();
        if verts.len() < n + 1 {
            return None;
        }
        let t = &verts[0][0];
        let count = t.from_i64_like(verts.len() as i64);
        let centroid: Vec<S> = (0..n)
            .map(|i| {
                let mut acc = t.zero_like();
                for v in &verts {
                    acc = acc + v[i].clone();
                }
                acc / count.clone()
            })
            .collect();
        (self.locate(&centroid) == Location::Interior).then_some(centroid)
    }

    pub fn is_nonempty(&self) -> bool {
        !self.vertices().is_empty()
    }

    pub fn intersect(&self, other: &Self) -> Self {
        Polytope { halfspaces: self.halfspaces.iter().chain(&other.halfspaces).cloned().collect() }
    }

    /// `self + t`.
    pub fn translate(&self, t: &[S]) -> Self {
        Polytope {
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| {
                    let mut off = h.offset.clone();
                    for (a, v) in h.normal.iter().zip(t) {
                        off = off + a.clone() * v.clone();
                    }
                    HalfSpace { normal: h.normal.clone(), offset: off }
                })
                .collect(),
        }
    }

    pub fn bbox_f64(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for v in self.vertices() {
            for i in 0..n {
                let x = v[i].to_f64();
                lo[i] = lo[i].min(x);
                hi[i] = hi[i].max(x);
            }
        }
        (lo, hi)
    }

    /// Checks that every coordinate direction is blocked by some face.
    fn is_axis_bounded(&self) -> bool {
        (0..self.dim()).all(|i| {
            let pos = self.halfspaces.iter().any(|h| h.normal[i].sign().is_gt());
            let neg = self.halfspaces.iter().any(|h| h.normal[i].sign().is_lt());
            pos && neg
        })
    }
}

/// One piece of a window component.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell<S> {
    /// Closed interval, `n = 1`.
    Interval { lo: S, hi: S },
    /// Convex polytope, any `n`.
    Polytope(Polytope<S>),
}

/// Compact window `W` in `R^n x C`, one list of cells per element of `C`.
#[derive(Debug, Clone)]
pub struct WindowRegion<S> {
    n: usize,
    components: BTreeMap<TorsionElem, Vec<Cell<S>>>,
    merged: BTreeMap<TorsionElem, IntervalSet<S>>,
}

impl<S: Scalar> WindowRegion<S> {
    pub fn new(n: usize, torsion_orders: &[u32], components: BTreeMap<TorsionElem, Vec<Cell<S>>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Unsupported("internal space without a Euclidean part".into()));
        }
        if components.values().all(|c| c.is_empty()) {
            return Err(Error::EmptyWindow);
        }
        let mut merged = BTreeMap::new();
        for (t, cells) in &components {
            if t.0.len() != torsion_orders.len() || t.0.iter().zip(torsion_orders).any(|(v, m)| v >= m) {
                return Err(Error::InvalidWindow(format!("component key {t} does not match torsion orders")));
            }
            let mut intervals = Vec::new();
            for cell in cells {
                match cell {
                    Cell::Interval { lo, hi } => {
                        if n != 1 {
                            return Err(Error::InvalidWindow("interval cells need n = 1".into()));
                        }
                        if lo.cmp_s(hi) != std::cmp::Ordering::Less {
                            return Err(Error::InvalidWindow(format!("interval [{lo}, {hi}] has empty interior")));
                        }
                        intervals.push((lo.clone(), hi.clone()));
                    }
                    Cell::Polytope(p) => {
                        if p.dim() != n {
                            return Err(Error::InvalidWindow("polytope dimension differs from n".into()));
                        }
                        if !p.is_axis_bounded() {
                            return Err(Error::InvalidWindow("polytope cell is unbounded".into()));
                        }
                        if p.interior_point().is_none() {
                            return Err(Error::InvalidWindow("polytope cell has empty interior".into()));
                        }
                    }
                }
            }
            intervals.sort_by(|a, b| a.0.cmp_s(&b.0));
            for w in intervals.windows(2) {
                if w[0].1.cmp_s(&w[1].0).is_gt() {
                    return Err(Error::InvalidWindow("interval cells overlap".into()));
                }
            }
            let polys: Vec<&Polytope<S>> = cells
                .iter()
                .filter_map(|c| match c {
                    Cell::Polytope(p) => Some(p),
                    _ => None,
                })
                .collect();
            for i in 0..polys.len() {
                for j in i + 1..polys.len() {
                    if polys[i].intersect(polys[j]).interior_point().is_some() {
                        return Err(Error::InvalidWindow("polytope cells overlap".into()));
                    }
                }
            }
            if n == 1 && !intervals.is_empty() {
                merged.insert(
                    t.clone(),
                    IntervalSet::from_intervals(intervals.into_iter().map(|(a, b)| crate::intervals::Interval::closed(a, b))),
                );
            }
        }
        Ok(WindowRegion { n, components, merged })
    }

    /// Single closed interval window in the trivial component.
    pub fn interval(lo: S, hi: S) -> Result<Self> {
        let mut m = BTreeMap::new();
        m.insert(TorsionElem::default(), vec![Cell::Interval { lo, hi }]);
        WindowRegion::new(1, &[], m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn components(&self) -> &BTreeMap<TorsionElem, Vec<Cell<S>>> {
        &self.components
    }

    /// Whether every cell is an interval (exact 1D interval algebra applies).
    pub fn is_interval_window(&self) -> bool {
        self.n == 1 && self.components.values().flatten().all(|c| matches!(c, Cell::Interval { .. }))
    }

    /// The component as a closed interval set (`n = 1` interval windows).
    pub fn interval_set(&self, t: &TorsionElem) -> IntervalSet<S> {
        self.merged.get(t).cloned().unwrap_or_default()
    }

    pub fn locate(&self, t: &TorsionElem, h: &[S]) -> Location {
        if self.is_interval_window() {
            return match self.merged.get(t) {
                Some(set) => set.locate(&h[0]),
                None => Location::Exterior,
            };
        }
        let Some(cells) = self.components.get(t) else {
            return Location::Exterior;
        };
        let mut best = Location::Exterior;
        for c in cells {
            let loc = match c {
                Cell::Interval { lo, hi } => {
                    crate::intervals::IntervalSet::closed(lo.clone(), hi.clone()).locate(&h[0])
                }
                Cell::Polytope(p) => p.locate(h),
            };
            match loc {
                Location::Interior => return Location::Interior,
                Location::Boundary => best = Location::Boundary,
                Location::Exterior => {}
            }
        }
        best
    }

    /// Bounding box of all components.
    pub fn bbox_f64(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.n];
        let mut hi = vec![f64::NEG_INFINITY; self.n];
        for c in self.components.values().flatten() {
            let (l, h) = match c {
                Cell::Interval { lo, hi } => (vec![lo.to_f64()], vec![hi.to_f64()]),
                Cell::Polytope(p) => p.bbox_f64(),
            };
            for i in 0..self.n {
                lo[i] = lo[i].min(l[i]);
                hi[i] = hi[i].max(h[i]);
            }
        }
        (lo, hi)
    }

    /// Whether `h` lies in component `t` of the closed set `W - W`.
    pub fn difference_contains(&self, t: &TorsionElem, h: &[S], orders: &[u32]) -> bool {
        for (t1, cells1) in &self.components {
            let t2 = t1.add(&t.neg(orders), orders);
            let Some(cells2) = self.components.get(&t2) else { continue };
            for c1 in cells1 {
                for c2 in cells2 {
                    let hit = match (c1, c2) {
                        (Cell::Interval { lo: a, hi: b }, Cell::Interval { lo: c, hi: dd }) => {
                            let lo = a.clone() - dd.clone();
                            let hi = b.clone() - c.clone();
                            h[0].cmp_s(&lo).is_ge() && h[0].cmp_s(&hi).is_le()
                        }
                        _ => {
                            // (c1 - h) meets c2
                            let p1 = cell_polytope(c1);
                            let p2 = cell_polytope(c2);
                            let shifted: Vec<S> = h.iter().map(|v| -v.clone()).collect();
                            p1.translate(&shifted).intersect(&p2).is_nonempty()
                        }
                    };
                    if hit {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// `W + h` with the torsion part shifted by `th`.
    pub fn translate(&self, h: &[S], th: &TorsionElem, orders: &[u32]) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|(t, cells)| {
                let cells = cells
                    .iter()
                    .map(|c| match c {
                        Cell::Interval { lo, hi } => Cell::Interval { lo: lo.clone() + h[0].clone(), hi: hi.clone() + h[0].clone() },
                        Cell::Polytope(p) => Cell::Polytope(p.translate(h)),
                    })
                    .collect();
                (t.add(th, orders), cells)
            })
            .collect();
        WindowRegion::new(self.n, orders, components)
    }

    /// Boundary hyperplanes `normal . h = offset` per component.
    pub(crate) fn faces(&self) -> Vec<(TorsionElem, Vec<S>, S)> {
        let mut out = Vec::new();
        for (t, cells) in &self.components {
            for c in cells {
                match c {
                    Cell::Interval { lo, hi } => {
                        let one = lo.one_like();
                        out.push((t.clone(), vec![one.clone()], lo.clone()));
                        out.push((t.clone(), vec![one], hi.clone()));
                    }
                    Cell::Polytope(p) => {
                        for hs in p.halfspaces() {
                            out.push((t.clone(), hs.normal.clone(), hs.offset.clone()));
                        }
                    }
                }
            }
        }
        out
    }
}

pub(crate) fn cell_polytope<S: Scalar>(c: &Cell<S>) -> Polytope<S> {
    match c {
        Cell::Interval { lo, hi } => Polytope::axis_box(std::slice::from_ref(lo), std::slice::from_ref(hi)).expect("interval polytope"),
        Cell::Polytope(p) => p.clone(),
    }
}
