//! Patches, their acceptance domains, and localizing patches.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::intervals::{IntervalSet, Location};
use crate::scalar::{render, Scalar};
use crate::scheme::{
    cmp_vec, displacement_candidates_in_ball, displacement_candidates_in_box, norm_sq, render_vec, sub_vec, Cell,
    CutProjectScheme, LatticePoint, PhysBox, PointSample, Polytope, TorsionElem, WindowRegion,
};

/// Patch region, centered at the origin.
#[derive(Debug, Clone, PartialEq)]
pub enum Region<S> {
    /// Closed ball of this radius.
    Ball(S),
    /// Closed box containing the origin.
    Box(PhysBox<S>),
}

impl<S: Scalar> Region<S> {
    pub fn contains(&self, v: &[S]) -> bool {
        match self {
            Region::Ball(r) => norm_sq(v).cmp_s(&(r.clone() * r.clone())).is_le(),
            Region::Box(b) => b.contains(v),
        }
    }

    /// Float prefilter: `Some(answer)` unless `v` is within `1e-7` of the boundary.
    fn contains_f64(&self, v: &[f64]) -> Option<bool> {
        const MARGIN: f64 = 1e-7;
        match self {
            Region::Ball(r) => {
                let r = r.to_f64();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if n < r - MARGIN {
                    Some(true)
                } else if n > r + MARGIN {
                    Some(false)
                } else {
                    None
                }
            }
            Region::Box(b) => {
                let (lo, hi) = (b.lo_f64(), b.hi_f64());
                let mut sure = true;
                for i in 0..v.len() {
                    if v[i] < lo[i] - MARGIN || v[i] > hi[i] + MARGIN {
                        return Some(false);
                    }
                    if v[i] < lo[i] + MARGIN || v[i] > hi[i] - MARGIN {
                        sure = false;
                    }
                }
                sure.then_some(true)
            }
        }
    }

    /// Float reach of the region from the origin along any axis.
    fn reach_f64(&self) -> f64 {
        match self {
            Region::Ball(r) => r.to_f64(),
            Region::Box(b) => b.lo_f64().iter().chain(&b.hi_f64()).fold(0f64, |m, v| m.max(v.abs())),
        }
    }

    fn fits_at(&self, bbox: &PhysBox<S>, x: &[S]) -> bool {
        match self {
            Region::Ball(r) => bbox.contains_ball(x, r),
            Region::Box(b) => {
                let t = b.translate(x);
                bbox.contains(&t.lo) && bbox.contains(&t.hi)
            }
        }
    }

    fn describe(&self) -> String {
        match self {
            Region::Ball(r) => format!("ball of radius {}", render(r)),
            Region::Box(b) => format!("box [{}, {}]", render_vec(&b.lo), render_vec(&b.hi)),
        }
    }
}

/// A `B`-patch: finite point set containing the origin, inside `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch<S> {
    /// Sorted lexicographically; contains the origin.
    pub points: Vec<Vec<S>>,
    pub region: Region<S>,
    /// Lattice displacements of `points`, when extracted from a sample.
    pub displacements: Option<Vec<Vec<i64>>>,
    /// Index of the anchor in its source sample.
    pub anchor: Option<usize>,
}

impl<S: Scalar> Patch<S> {
    /// Patch from explicit points; checks the origin and region invariants.
    pub fn new(mut points: Vec<Vec<S>>, region: Region<S>) -> Result<Self> {
        if !points.iter().any(|p| p.iter().all(|v| v.is_zero_s())) {
            return Err(Error::Precondition("patch must contain the origin".into()));
        }
        if let Some(p) = points.iter().find(|p| !region.contains(p)) {
            return Err(Error::Precondition(format!("patch point {} lies outside the {}", render_vec(p), region.describe())));
        }
        points.sort_by(|a, b| cmp_vec(a, b));
        points.dedup_by(|a, b| cmp_vec(a, b).is_eq());
        Ok(Patch { points, region, displacements: None, anchor: None })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Indices of sample points `y` with `y - x` in the region, exact.
pub(crate) fn neighbors<S: Scalar>(sample: &PointSample<S>, i: usize, region: &Region<S>) -> Vec<usize> {
    let xf = &sample.positions_f64[i];
    let reach = region.reach_f64() + 1e-6;
    let test = |j: usize| -> bool {
        let vf: Vec<f64> = sample.positions_f64[j].iter().zip(xf).map(|(a, b)| a - b).collect();
        match region.contains_f64(&vf) {
            Some(ans) => ans,
            None => region.contains(&sub_vec(&sample.positions[j], &sample.positions[i])),
        }
    };
    let mut out = Vec::new();
    // positions are sorted by the first coordinate
    let mut j = i;
    loop {
        if xf[0] - sample.positions_f64[j][0] > reach {
            break;
        }
        if test(j) {
            out.push(j);
        }
        if j == 0 {
            break;
        }
        j -= 1;
    }
    for j in i + 1..sample.len() {
        if sample.positions_f64[j][0] - xf[0] > reach {
            break;
        }
        if test(j) {
            out.push(j);
        }
    }
    out.sort_unstable();
    out
}

/// Sorted lattice displacements `y - x` of the points of `(M - x) cap B`.
pub(crate) fn patch_displacements<S: Scalar>(sample: &PointSample<S>, i: usize, region: &Region<S>) -> Vec<Vec<i64>> {
    let base = &sample.points[i].coords;
    let mut out: Vec<Vec<i64>> = neighbors(sample, i, region)
        .into_iter()
        .map(|j| sample.points[j].coords.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    out.sort();
    out
}

/// `(sample cap (x + B)) - x`; the translated region must fit in the box.
pub fn extract_patch<S: Scalar>(sample: &PointSample<S>, i: usize, region: Region<S>) -> Result<Patch<S>> {
    let x = sample.positions.get(i).ok_or_else(|| Error::Precondition(format!("no sample point with index {i}")))?;
    if !region.fits_at(&sample.bbox, x) {
        let radius = match &region {
            Region::Ball(r) => render(r),
            Region::Box(_) => region.describe(),
        };
        return Err(Error::BallExceedsBox { center: render_vec(x), radius });
    }
    let idx = neighbors(sample, i, &region);
    let mut points: Vec<Vec<S>> = idx.iter().map(|&j| sub_vec(&sample.positions[j], x)).collect();
    points.sort_by(|a, b| cmp_vec(a, b));
    let displacements = Some(patch_displacements(sample, i, &region));
    Ok(Patch { points, region, displacements, anchor: Some(i) })
}

/// Convex description of an acceptance domain for polytope windows.
#[derive(Debug, Clone)]
pub struct PiecewiseDomain<S> {
    /// Union of these convex pieces ...
    pub positive: Vec<Polytope<S>>,
    /// ... minus these closed convex sets.
    pub excluded: Vec<Polytope<S>>,
}

#[derive(Debug, Clone)]
pub enum DomainRegion<S> {
    /// Exact closed interval sets per torsion component.
    Intervals(BTreeMap<TorsionElem, IntervalSet<S>>),
    /// Convex pieces and excluded translates per torsion component.
    Pieces(BTreeMap<TorsionElem, PiecewiseDomain<S>>),
}

/// `W_P`, the closure of the set of star values at which `P` occurs.
#[derive(Debug, Clone)]
pub struct AcceptanceDomain<S> {
    pub region: DomainRegion<S>,
    /// Lattice displacements of the patch points, sorted.
    pub patch_displacements: Vec<Vec<i64>>,
    pub patch_region: Region<S>,
    /// `P' = (D cap B) \ P`: displacements that must not occur.
    pub complement_witnesses: Vec<LatticePoint<S>>,
}

impl<S: Scalar> AcceptanceDomain<S> {
    pub fn locate(&self, t: &TorsionElem, h: &[S]) -> Location {
        match &self.region {
            DomainRegion::Intervals(m) => m.get(t).map_or(Location::Exterior, |s| s.locate(&h[0])),
            DomainRegion::Pieces(m) => {
                let Some(p) = m.get(t) else { return Location::Exterior };
                let mut best = Location::Exterior;
                for piece in &p.positive {
                    match piece.locate(h) {
                        Location::Interior => {
                            best = Location::Interior;
                            break;
                        }
                        Location::Boundary => best = Location::Boundary,
                        Location::Exterior => {}
                    }
                }
                for ex in &p.excluded {
                    match ex.locate(h) {
                        Location::Interior => return Location::Exterior,
                        Location::Boundary if best == Location::Interior => best = Location::Boundary,
                        _ => {}
                    }
                }
                best
            }
        }
    }

    /// Interval set of a component (interval windows only).
    pub fn intervals(&self, t: &TorsionElem) -> Option<IntervalSet<S>> {
        match &self.region {
            DomainRegion::Intervals(m) => Some(m.get(t).cloned().unwrap_or_default()),
            DomainRegion::Pieces(_) => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.region {
            DomainRegion::Intervals(m) => m.values().all(|s| s.is_empty()),
            DomainRegion::Pieces(m) => m.values().all(|p| p.positive.is_empty()),
        }
    }

    /// Total length over all components (interval windows only).
    pub fn measure_f64(&self) -> Option<f64> {
        match &self.region {
            DomainRegion::Intervals(m) => Some(m.values().map(|s| s.measure_f64()).sum()),
            DomainRegion::Pieces(_) => None,
        }
    }

    /// Whether every component is inside the closed interval `[lo, hi]`.
    pub fn is_within(&self, lo: &S, hi: &S) -> Option<bool> {
        let target = IntervalSet::closed(lo.clone(), hi.clone());
        match &self.region {
            DomainRegion::Intervals(m) => Some(m.values().all(|s| s.is_subset_of(&target))),
            DomainRegion::Pieces(_) => None,
        }
    }
}

/// `W_P = closure( cap_{v in P} (Int W - v*) cap cap_{v' in P'} (W^c - v'*) )`.
pub fn acceptance_domain<S: Scalar>(
    scheme: &CutProjectScheme<S>,
    window: &WindowRegion<S>,
    patch: &Patch<S>,
) -> Result<AcceptanceDomain<S>> {
    let d_in_b = match &patch.region {
        Region::Ball(r) => displacement_candidates_in_ball(scheme, window, r)?,
        Region::Box(b) => displacement_candidates_in_box(scheme, window, b)?,
    };
    // match patch points to D exactly
    let mut in_patch = vec![false; d_in_b.len()];
    for p in &patch.points {
        match d_in_b.binary_search_by(|lp| cmp_vec(&lp.phys, p)) {
            Ok(j) => in_patch[j] = true,
            Err(_) => {
                return Err(Error::UnrealizablePatch(format!(
                    "{} is not a displacement between points of the set",
                    render_vec(p)
                )))
            }
        }
    }
    let (members, witnesses): (Vec<_>, Vec<_>) = d_in_b.into_iter().zip(in_patch).partition(|(_, m)| *m);
    let members: Vec<LatticePoint<S>> = members.into_iter().map(|(lp, _)| lp).collect();
    let witnesses: Vec<LatticePoint<S>> = witnesses.into_iter().map(|(lp, _)| lp).collect();
    let orders = scheme.torsion_orders();
    let region = if window.is_interval_window() {
        let mut comps = BTreeMap::new();
        for c in window.components().keys() {
            let mut acc = window.interval_set(c).interior();
            for v in &members {
                let comp = c.add(&v.torsion, orders);
                let shifted = window.interval_set(&comp).interior().translate(&-v.internal[0].clone());
                acc = acc.intersection(&shifted);
                if acc.is_empty() {
                    break;
                }
            }
            for v in &witnesses {
                if acc.is_empty() {
                    break;
                }
                let comp = c.add(&v.torsion, orders);
                let shifted = window.interval_set(&comp).complement().translate(&-v.internal[0].clone());
                acc = acc.intersection(&shifted);
            }
            let closed = acc.closure();
            if !closed.is_empty() {
                comps.insert(c.clone(), closed);
            }
        }
        DomainRegion::Intervals(comps)
    } else {
        let mut comps = BTreeMap::new();
        for c in window.components().keys() {
            let mut pieces: Vec<Polytope<S>> = Vec::new();
            let mut first = true;
            for v in &members {
                let comp = c.add(&v.torsion, orders);
                let shift: Vec<S> = v.internal.iter().map(|x| -x.clone()).collect();
                let cells: Vec<Polytope<S>> = window
                    .components()
                    .get(&comp)
                    .map(|cs| cs.iter().map(|cell| crate::scheme::cell_polytope(cell).translate(&shift)).collect())
                    .unwrap_or_default();
                pieces = if first {
                    cells
                } else {
                    let mut next = Vec::new();
                    for p in &pieces {
                        for q in &cells {
                            let r = p.intersect(q);
                            if r.interior_point().is_some() {
                                next.push(r);
                            }
                        }
                    }
                    next
                };
                first = false;
                if pieces.is_empty() {
                    break;
                }
            }
            let excluded: Vec<Polytope<S>> = witnesses
                .iter()
                .flat_map(|v| {
                    let comp = c.add(&v.torsion, orders);
                    let shift: Vec<S> = v.internal.iter().map(|x| -x.clone()).collect();
                    window
                        .components()
                        .get(&comp)
                        .map(|cs| cs.iter().map(|cell| crate::scheme::cell_polytope(cell).translate(&shift)).collect::<Vec<_>>())
                        .unwrap_or_default()
                })
                .collect();
            // drop pieces swallowed by a single excluded set
            pieces.retain(|p| {
                let verts = p.vertices();
                !excluded.iter().any(|e| verts.iter().all(|v| e.locate(v) != Location::Exterior))
            });
            if !pieces.is_empty() {
                comps.insert(c.clone(), PiecewiseDomain { positive: pieces, excluded });
            }
        }
        DomainRegion::Pieces(comps)
    };
    let mut patch_displacements: Vec<Vec<i64>> = members.iter().map(|lp| lp.coords.clone()).collect();
    patch_displacements.sort();
    let domain = AcceptanceDomain {
        region,
        patch_displacements,
        patch_region: patch.region.clone(),
        complement_witnesses: witnesses,
    };
    if domain.is_empty() {
        return Err(Error::UnrealizablePatch("acceptance domain is empty".into()));
    }
    Ok(domain)
}

/// Outcome of testing `sigma(x) in Int(W_P)  <=>  (M - x) cap B = P`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct AcceptanceReport {
    /// Points whose region fits in the box.
    pub tested: usize,
    /// Points where the patch occurs and the star is interior.
    pub hits: usize,
    /// Points where the two sides disagree.
    pub misses: usize,
    /// Points whose star lies on the domain boundary.
    pub boundary_skips: usize,
    /// Up to ten sample indices of misses.
    pub miss_examples: Vec<usize>,
}

pub fn verify_acceptance<S: Scalar>(sample: &PointSample<S>, domain: &AcceptanceDomain<S>) -> AcceptanceReport {
    let region = &domain.patch_region;
    let partials: Vec<AcceptanceReport> = (0..sample.len())
        .into_par_iter()
        .filter(|&i| region.fits_at(&sample.bbox, &sample.positions[i]))
        .map(|i| {
            let mut r = AcceptanceReport { tested: 1, ..Default::default() };
            let star = sample.star(i);
            let inside = match domain.locate(&star.torsion, &star.value) {
                Location::Interior => true,
                Location::Exterior => false,
                Location::Boundary => {
                    r.boundary_skips = 1;
                    return r;
                }
            };
            let occurs = patch_displacements(sample, i, region) == domain.patch_displacements;
            if inside != occurs {
                r.misses = 1;
                r.miss_examples.push(i);
            } else if inside {
                r.hits = 1;
            }
            r
        })
        .collect();
    let mut total = AcceptanceReport::default();
    for p in partials {
        total.tested += p.tested;
        total.hits += p.hits;
        total.misses += p.misses;
        total.boundary_skips += p.boundary_skips;
        if total.miss_examples.len() < 10 {
            total.miss_examples.extend(p.miss_examples);
        }
    }
    total.miss_examples.sort_unstable();
    total.miss_examples.truncate(10);
    total
}

/// A patch whose acceptance domain lies inside a target interval.
#[derive(Debug, Clone)]
pub struct Localization<S> {
    pub patch: Patch<S>,
    pub anchor: usize,
    /// Displacements chosen by the greedy search.
    pub chosen: Vec<Vec<i64>>,
    /// Running intersection `cap (W - v*)` at termination.
    pub intersection: IntervalSet<S>,
    pub domain: AcceptanceDomain<S>,
}

/// Greedy search: starting from the sample point whose star is nearest the
/// middle of `[lo, hi]`, add nearby points closest first whenever their
/// translate `W - (q - x)*` shrinks the running intersection, until the
/// intersection lies in `[lo, hi]`. The patch is the ball through the
/// farthest chosen point. Interval windows only.
pub fn localizing_patch<S: Scalar>(
    scheme: &CutProjectScheme<S>,
    window: &WindowRegion<S>,
    sample: &PointSample<S>,
    lo: &S,
    hi: &S,
) -> Result<Localization<S>> {
    if !window.is_interval_window() {
        return Err(Error::Unsupported("localization needs an interval window".into()));
    }
    if lo.cmp_s(hi).is_ge() {
        return Err(Error::Precondition("target interval must have lo < hi".into()));
    }
    let target = IntervalSet::open(lo.clone(), hi.clone());
    let meets_window = window.components().keys().any(|c| !window.interval_set(c).interior().intersection(&target).is_empty());
    if !meets_window {
        return Err(Error::Precondition("target does not meet the window".into()));
    }
    let closed_target = IntervalSet::closed(lo.clone(), hi.clone());
    let two = lo.from_i64_like(2);
    let centre = (lo.clone() + hi.clone()) / two;
    let anchor = (0..sample.len())
        .filter(|&i| target.contains(&sample.star(i).value[0]))
        .min_by(|&a, &b| {
            let da = (sample.star(a).value[0].clone() - centre.clone()).abs_s();
            let db = (sample.star(b).value[0].clone() - centre.clone()).abs_s();
            da.cmp_s(&db)
        })
        .ok_or_else(|| Error::Precondition("no sample star lies in the target".into()))?;
    let orders = scheme.torsion_orders();
    let x_star = sample.star(anchor);
    let x = &sample.positions[anchor];
    let base = &sample.points[anchor].coords;
    // candidate values of sigma(x)
    let mut running = window.interval_set(&x_star.torsion);
    let mut order: Vec<usize> = (0..sample.len()).filter(|&j| j != anchor).collect();
    let xf = sample.positions_f64[anchor][0];
    order.sort_by(|&a, &b| {
        (sample.positions_f64[a][0] - xf).abs().total_cmp(&(sample.positions_f64[b][0] - xf).abs())
    });
    let mut chosen: Vec<Vec<i64>> = vec![vec![0; base.len()]];
    let mut radius = lo.zero_like();
    let zero = lo.zero_like();
    let done = |s: &IntervalSet<S>| s.is_subset_of(&closed_target);
    let mut exhausted = true;
    if done(&running) {
        exhausted = false;
    } else {
        for &j in &order {
            let dist = (sample.positions[j][0].clone() - x[0].clone()).abs_s();
            if !sample.bbox.contains_ball(x, &dist) {
                break;
            }
            let v: Vec<i64> = sample.points[j].coords.iter().zip(base).map(|(a, b)| a - b).collect();
            let vt = scheme.torsion_of(&v);
            let comp = x_star.torsion.add(&vt, orders);
            let v_star = scheme.internal_of(&v)[0].clone();
            // sigma(x) in W - v*; as a constraint on sigma(x)
            let next = running.intersection(&window.interval_set(&comp).translate(&-v_star));
            let before = running.measure(&zero).expect("bounded");
            let after = next.measure(&zero).expect("bounded");
            if after.cmp_s(&before).is_lt() {
                running = next;
                chosen.push(v);
                radius = radius.max_s(dist);
                if done(&running) {
                    exhausted = false;
                    break;
                }
            }
        }
    }
    if exhausted {
        let achieved = running.parts().iter().map(|iv| {
            format!(
                "[{}, {}]",
                iv.lo_value().map(render).unwrap_or_default(),
                iv.hi_value().map(render).unwrap_or_default()
            )
        });
        return Err(Error::SampleTooSmall { achieved: achieved.collect::<Vec<_>>().join(" u ") });
    }
    let patch = extract_patch(sample, anchor, Region::Ball(radius))?;
    let domain = acceptance_domain(scheme, window, &patch)?;
    if domain.is_within(lo, hi) != Some(true) {
        return Err(Error::Internal("localized domain escapes the target".into()));
    }
    Ok(Localization { patch, anchor, chosen, intersection: running, domain })
}

/// Cells of a window component as a closed interval set, for reports.
pub fn window_intervals<S: Scalar>(window: &WindowRegion<S>, t: &TorsionElem) -> Vec<(S, S)> {
    window
        .components()
        .get(t)
        .map(|cells| {
            cells
                .iter()
                .filter_map(|c| match c {
                    Cell::Interval { lo, hi } => Some((lo.clone(), hi.clone())),
                    Cell::Polytope(_) => None,
                })
                .collect()
        })
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::{QuadField, QuadReal};
    use crate::scheme::{enumerate_model_set, Xi};

    fn setup(len: i64) -> (CutProjectScheme<QuadReal>, WindowRegion<QuadReal>, PointSample<QuadReal>) {
        let f = QuadField::GOLDEN;
        let s = CutProjectScheme::fibonacci();
        let w = WindowRegion::interval(f.int(-1), &f.phi() - &f.one()).unwrap();
        let xi = Xi::new(vec![f.ratio(1, 7)], vec![f.zero()]);
        let sample = enumerate_model_set(&s, &w, &xi, &PhysBox::interval(f.zero(), f.int(len)).unwrap()).unwrap();
        (s, w, sample)
    }

    #[test]
    fn tiny_patch_is_origin_and_domain_is_window() {
        let f = QuadField::GOLDEN;
        let (s, w, sample) = setup(40);
        let p = extract_patch(&sample, 10, Region::Ball(f.ratio(1, 2))).unwrap();
        assert_eq!(p.points, vec![vec![f.zero()]]);
        let dom = acceptance_domain(&s, &w, &p).unwrap();
        assert!(dom.complement_witnesses.is_empty());
        assert_eq!(dom.intervals(&TorsionElem::default()).unwrap(), w.interval_set(&TorsionElem::default()));
    }

    #[test]
    fn ball_outside_box_is_error() {
        let f = QuadField::GOLDEN;
        let (_, _, sample) = setup(40);
        assert!(matches!(extract_patch(&sample, 0, Region::Ball(f.one())), Err(Error::BallExceedsBox { .. })));
    }

    #[test]
    fn patch_at_radius_one_point_one() {
        let f = QuadField::GOLDEN;
        let (_, _, sample) = setup(60);
        for i in 3..sample.len() - 3 {
            let right = &sample.positions[i + 1][0] - &sample.positions[i][0];
            if right != f.one() {
                continue;
            }
            let left = &sample.positions[i][0] - &sample.positions[i - 1][0];
            let p = extract_patch(&sample, i, Region::Ball(f.ratio(11, 10))).unwrap();
            let expect_left = if left == f.one() { vec![vec![f.int(-1)]] } else { vec![] };
            let mut expected = expect_left;
            expected.push(vec![f.zero()]);
            expected.push(vec![f.one()]);
            assert_eq!(p.points, expected);
        }
    }

    #[test]
    fn two_point_patch_domain() {
        let f = QuadField::GOLDEN;
        let (s, w, sample) = setup(400);
        let p = Patch::new(vec![vec![f.zero()], vec![f.one()]], Region::Ball(f.ratio(21, 20))).unwrap();
        let dom = acceptance_domain(&s, &w, &p).unwrap();
        let full = w.interval_set(&TorsionElem::default());
        let set = dom.intervals(&TorsionElem::default()).unwrap();
        assert!(!set.is_empty() && set.is_subset_of(&full) && set != full);
        let rep = verify_acceptance(&sample, &dom);
        assert_eq!(rep.misses, 0);
        assert!(rep.hits > 0);
    }

    #[test]
    fn impossible_patch_is_unrealizable() {
        let f = QuadField::GOLDEN;
        let (s, w, _) = setup(10);
        let odd = &f.phi() - &f.ratio(1, 2);
        let p = Patch::new(vec![vec![f.zero()], vec![f.one()], vec![odd]], Region::Ball(f.int(2))).unwrap();
        assert!(matches!(acceptance_domain(&s, &w, &p), Err(Error::UnrealizablePatch(_))));
    }

    #[test]
    fn whole_window_domain_misses() {
        let f = QuadField::GOLDEN;
        let (s, w, sample) = setup(200);
        let p = extract_patch(&sample, 20, Region::Ball(f.int(2))).unwrap();
        let mut dom = acceptance_domain(&s, &w, &p).unwrap();
        let mut m = BTreeMap::new();
        m.insert(TorsionElem::default(), w.interval_set(&TorsionElem::default()));
        dom.region = DomainRegion::Intervals(m);
        assert!(verify_acceptance(&sample, &dom).misses > 0);
    }

    #[test]
    fn localize_whole_window_and_middle_third() {
        let f = QuadField::GOLDEN;
        let (s, w, sample) = setup(300);
        let lo = f.int(-1);
        let hi = &f.phi() - &f.one();
        let loc = localizing_patch(&s, &w, &sample, &lo, &hi).unwrap();
        assert_eq!(loc.chosen.len(), 1);
        let third = &f.phi() / &f.int(3);
        let a = &lo + &third;
        let b = &a + &third;
        let loc = localizing_patch(&s, &w, &sample, &a, &b).unwrap();
        assert!(loc.domain.is_within(&a, &b).unwrap());
        assert!(loc.patch.len() <= 10, "patch has {} points", loc.patch.len());
        let far = localizing_patch(&s, &w, &sample, &f.int(5), &f.int(6));
        assert!(matches!(far, Err(Error::Precondition(_))));
    }
}
