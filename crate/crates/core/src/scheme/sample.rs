use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::intervals::Location;
use crate::scalar::Scalar;

use super::enumerate::{enumerate_lattice, PhysBox};
use super::window::WindowRegion;
use super::{add_vec, cmp_vec, norm_sq, render_vec, sub_vec, CutProjectScheme, LatticePoint, TorsionElem};

/// Offset `xi = (xi_internal, xi_torsion, xi_physical)` of `Gamma + xi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Xi<S> {
    pub internal: Vec<S>,
    pub torsion: TorsionElem,
    pub phys: Vec<S>,
}

impl<S: Scalar> Xi<S> {
    pub fn zero(scheme: &CutProjectScheme<S>) -> Self {
        let z = scheme.template().zero_like();
        Xi {
            internal: vec![z.clone(); scheme.n()],
            torsion: TorsionElem::trivial(scheme.torsion_orders()),
            phys: vec![z; scheme.d()],
        }
    }

    /// Offset with trivial torsion part.
    pub fn new(internal: Vec<S>, phys: Vec<S>) -> Self {
        Xi { internal, torsion: TorsionElem::default(), phys }
    }

    fn check(&self, scheme: &CutProjectScheme<S>) -> Result<()> {
        if self.internal.len() != scheme.n() || self.phys.len() != scheme.d() {
            return Err(Error::Dimension("offset dimensions do not match the scheme".into()));
        }
        if self.torsion.0.len() != scheme.torsion_orders().len() {
            return Err(Error::Dimension("offset torsion part does not match the scheme".into()));
        }
        Ok(())
    }
}

/// Star value `sigma_xi(x)`: internal coordinates and torsion label.
#[derive(Debug, Clone, PartialEq)]
pub struct InternalValue<S> {
    pub value: Vec<S>,
    pub torsion: TorsionElem,
}

/// How lattice points landing exactly on the window boundary are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryConvention {
    /// A boundary hit is a singular-parameter error.
    Reject,
    /// Interval cells act as `[lo, hi)`.
    LowerClosed,
    /// Interval cells act as `(lo, hi]`.
    UpperClosed,
}

/// A complete finite piece of a projection set inside a physical box.
#[derive(Debug, Clone)]
pub struct PointSample<S> {
    pub scheme: CutProjectScheme<S>,
    pub window: WindowRegion<S>,
    pub xi: Xi<S>,
    pub bbox: PhysBox<S>,
    pub convention: BoundaryConvention,
    /// Sorted by physical position (lexicographic).
    pub points: Vec<LatticePoint<S>>,
    /// Physical positions `phys + xi_phys`, parallel to `points`.
    pub positions: Vec<Vec<S>>,
    /// Float copies of `positions`, for prefilters and plots only.
    pub positions_f64: Vec<Vec<f64>>,
    /// Squared minimum distance between sample points, if there are two.
    pub min_separation_sq: Option<S>,
}

impl<S: Scalar> PointSample<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn star(&self, i: usize) -> InternalValue<S> {
        star_of(&self.points[i], &self.xi, self.scheme.torsion_orders())
    }

    /// Index of the point at an exact position.
    pub fn index_of(&self, x: &[S]) -> Option<usize> {
        self.positions.binary_search_by(|p| cmp_vec(p, x)).ok()
    }

    /// Index of the sample point with these lattice coordinates.
    pub fn index_of_coords(&self, coords: &[i64]) -> Option<usize> {
        let phys = add_vec(&self.scheme.physical_of(coords), &self.xi.phys);
        self.index_of(&phys).filter(|&i| self.points[i].coords == coords)
    }

    /// Minimum distance as a float, for display.
    pub fn min_separation(&self) -> Option<f64> {
        self.min_separation_sq.as_ref().map(|v| v.to_f64().sqrt())
    }
}

/// `sigma_xi(x) = x* + xi_internal`, with torsion label.
pub fn star_of<S: Scalar>(point: &LatticePoint<S>, xi: &Xi<S>, orders: &[u32]) -> InternalValue<S> {
    InternalValue { value: add_vec(&point.internal, &xi.internal), torsion: point.torsion.add(&xi.torsion, orders) }
}

/// `Lambda_xi(W)` inside the box; boundary hits are errors.
pub fn enumerate_model_set<S: Scalar>(
    scheme: &CutProjectScheme<S>,
    window: &WindowRegion<S>,
    xi: &Xi<S>,
    bbox: &PhysBox<S>,
) -> Result<PointSample<S>> {
    enumerate_with_convention(scheme, window, xi, bbox, BoundaryConvention::Reject)
}

/// Enumeration with an explicit boundary convention. Half-open conventions
/// need an interval window.
pub fn enumerate_with_convention<S: Scalar>(
    scheme: &CutProjectScheme<S>,
    window: &WindowRegion<S>,
    xi: &Xi<S>,
    bbox: &PhysBox<S>,
    convention: BoundaryConvention,
) -> Result<PointSample<S>> {
    xi.check(scheme)?;
    if window.n() != scheme.n() {
        return Err(Error::Dimension("window dimension differs from the internal dimension".into()));
    }
    if bbox.dim() != scheme.d() {
        return Err(Error::Dimension("box dimension differs from the physical dimension".into()));
    }
    if convention != BoundaryConvention::Reject && !window.is_interval_window() {
        return Err(Error::Unsupported("half-open conventions need an interval window".into()));
    }
    let orders = scheme.torsion_orders().to_vec();
    let (wlo, whi) = window.bbox_f64();
    let mut lo: Vec<f64> = wlo.iter().zip(&xi.internal).map(|(a, x)| a - x.to_f64() - 1e-9).collect();
    let mut hi: Vec<f64> = whi.iter().zip(&xi.internal).map(|(a, x)| a - x.to_f64() + 1e-9).collect();
    lo.extend(bbox.lo_f64().iter().zip(&xi.phys).map(|(a, x)| a - x.to_f64() - 1e-9));
    hi.extend(bbox.hi_f64().iter().zip(&xi.phys).map(|(a, x)| a - x.to_f64() + 1e-9));
    let accept = |k: &[i64]| -> Result<bool> {
        let phys = add_vec(&scheme.physical_of(k), &xi.phys);
        if !bbox.contains(&phys) {
            return Ok(false);
        }
        let h = add_vec(&scheme.internal_of(k), &xi.internal);
        let t = scheme.torsion_of(k).add(&xi.torsion, &orders);
        match window.locate(&t, &h) {
            Location::Interior => Ok(true),
            Location::Exterior => Ok(false),
            Location::Boundary => match convention {
                BoundaryConvention::Reject => {
                    Err(Error::SingularParameter { coords: k.to_vec(), internal: render_vec(&h) })
                }
                BoundaryConvention::LowerClosed => Ok(is_lower_end(window, &t, &h[0])),
                BoundaryConvention::UpperClosed => Ok(!is_lower_end(window, &t, &h[0])),
            },
        }
    };
    let coords = enumerate_lattice(scheme, &lo, &hi, accept)?;
    let mut points: Vec<(Vec<S>, LatticePoint<S>)> = coords
        .into_iter()
        .map(|k| {
            let lp = scheme.lattice_point(k);
            (add_vec(&lp.phys, &xi.phys), lp)
        })
        .collect();
    points.sort_by(|a, b| cmp_vec(&a.0, &b.0));
    let (positions, points): (Vec<_>, Vec<_>) = points.into_iter().unzip();
    let min_separation_sq = min_distance_sq(&positions);
    if let Some(m) = &min_separation_sq {
        if m.is_zero_s() {
            return Err(Error::Internal("two lattice points project to one physical point".into()));
        }
    }
    let positions_f64 = positions.iter().map(|p| p.iter().map(|v| v.to_f64()).collect()).collect();
    Ok(PointSample {
        scheme: scheme.clone(),
        window: window.clone(),
        xi: xi.clone(),
        bbox: bbox.clone(),
        convention,
        points,
        positions,
        positions_f64,
        min_separation_sq,
    })
}

fn is_lower_end<S: Scalar>(window: &WindowRegion<S>, t: &TorsionElem, h: &S) -> bool {
    window.interval_set(t).parts().iter().any(|iv| iv.lo_value().is_some_and(|lo| lo.cmp_s(h).is_eq()))
}

/// Squared minimum pairwise distance of a lexicographically sorted list.
pub(crate) fn min_distance_sq<S: Scalar>(positions: &[Vec<S>]) -> Option<S> {
    if positions.len() < 2 {
        return None;
    }
    if positions[0].len() == 1 {
        return positions
            .windows(2)
            .map(|w| {
                let g = w[1][0].clone() - w[0][0].clone();
                g.clone() * g
            })
            .reduce(|a, b| a.min_s(b));
    }
    let mut best: Option<S> = None;
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            let dx = positions[j][0].clone() - positions[i][0].clone();
            if let Some(b) = &best {
                if (dx.clone() * dx.clone()).cmp_s(b).is_gt() {
                    break;
                }
            }
            let dsq = norm_sq(&sub_vec(&positions[j], &positions[i]));
            best = Some(match best {
                Some(b) => b.min_s(dsq),
                None => dsq,
            });
        }
    }
    best
}

/// Verdict of the bounded non-singularity check.
#[derive(Debug, Clone, PartialEq)]
pub enum NonsingularVerdict<S> {
    VerifiedUpToBound(i64),
    Singular { coords: Vec<i64>, internal: Vec<S>, torsion: TorsionElem },
}

/// Searches lattice points with all coordinates in `[-bound, bound]` whose
/// shifted star lies on a window face and on the window boundary.
pub fn is_nonsingular<S: Scalar>(
    scheme: &CutProjectScheme<S>,
    window: &WindowRegion<S>,
    xi: &Xi<S>,
    bound: i64,
) -> Result<NonsingularVerdict<S>> {
    xi.check(scheme)?;
    let n = scheme.n();
    let dim = scheme.dim();
    let orders = scheme.torsion_orders().to_vec();
    for (t, normal, offset) in window.faces() {
        // face equation in lattice coordinates: sum_c coef[c] k_c = target
        let coef: Vec<S> = (0..dim)
            .map(|c| {
                let mut acc = offset.zero_like();
                for (a, h) in normal.iter().zip(&scheme.columns()[c][..n]) {
                    acc = acc + a.clone() * h.clone();
                }
                acc
            })
            .collect();
        let mut target = offset.clone();
        for (a, h) in normal.iter().zip(&xi.internal) {
            target = target - a.clone() * h.clone();
        }
        let Some(solved) = (0..dim).rev().find(|&c| !coef[c].is_zero_s()) else { continue };
        let free: Vec<usize> = (0..dim).filter(|&c| c != solved).collect();
        let coef_f: Vec<f64> = coef.iter().map(|v| v.to_f64()).collect();
        let target_f = target.to_f64();
        let mut k = vec![-bound; dim];
        loop {
            let partial: f64 = free.iter().map(|&c| coef_f[c] * k[c] as f64).sum();
            let ks = (target_f - partial) / coef_f[solved];
            let near = ks.round();
            if (ks - near).abs() < 1e-6 && near.abs() <= bound as f64 {
                k[solved] = near as i64;
                let mut lhs = target.zero_like();
                for c in 0..dim {
                    lhs = lhs + coef[c].clone() * target.from_i64_like(k[c]);
                }
                if lhs.cmp_s(&target).is_eq() {
                    let tors = scheme.torsion_of(&k).add(&xi.torsion, &orders);
                    let h = add_vec(&scheme.internal_of(&k), &xi.internal);
                    if tors == t && window.locate(&t, &h) == Location::Boundary {
                        return Ok(NonsingularVerdict::Singular { coords: k, internal: h, torsion: t });
                    }
                }
            }
            let mut advanced = false;
            for &c in &free {
                if k[c] < bound {
                    k[c] += 1;
                    advanced = true;
                    break;
                }
                k[c] = -bound;
            }
            if !advanced {
                break;
            }
        }
    }
    Ok(NonsingularVerdict::VerifiedUpToBound(bound))
}

/// A point moved by a generator, remembering its lattice pre-image.
#[derive(Debug, Clone, PartialEq)]
pub struct DeformedPoint<S> {
    pub coords: Vec<i64>,
    pub original: Vec<S>,
    pub position: Vec<S>,
}

/// Output of a deformation, sorted by new position.
#[derive(Debug, Clone)]
pub struct DeformedSample<S> {
    pub points: Vec<DeformedPoint<S>>,
    /// Sample points dropped because their patch was not classifiable.
    pub trimmed: usize,
}

impl<S: Scalar> DeformedSample<S> {
    pub fn from_points(mut points: Vec<DeformedPoint<S>>, trimmed: usize) -> Self {
        points.sort_by(|a, b| cmp_vec(&a.position, &b.position));
        DeformedSample { points, trimmed }
    }

    pub fn positions(&self) -> Vec<Vec<S>> {
        self.points.iter().map(|p| p.position.clone()).collect()
    }
}

/// `x -> x + L(sigma(x))` with `L` given as `d` rows of length `n`.
pub fn reproject<S: Scalar>(sample: &PointSample<S>, l: &[Vec<S>]) -> Result<DeformedSample<S>> {
    let (d, n) = (sample.scheme.d(), sample.scheme.n());
    if l.len() != d || l.iter().any(|r| r.len() != n) {
        return Err(Error::Dimension(format!("linear map must be {d} x {n}")));
    }
    let points = (0..sample.len())
        .map(|i| {
            let star = sample.star(i).value;
            let x = &sample.positions[i];
            let position = (0..d)
                .map(|r| {
                    let mut acc = x[r].clone();
                    for c in 0..n {
                        acc = acc + l[r][c].clone() * star[c].clone();
                    }
                    acc
                })
                .collect();
            DeformedPoint { coords: sample.points[i].coords.clone(), original: x.clone(), position }
        })
        .collect();
    Ok(DeformedSample::from_points(points, 0))
}

/// Lattice vectors with coordinates in `[-bound, bound]` whose star lies in
/// `W - W`, sorted by physical part.
pub fn displacement_candidates<S: Scalar>(
    scheme: &CutProjectScheme<S>,
    window: &WindowRegion<S>,
    bound: i64,
) -> Vec<LatticePoint<S>> {
    let dim = scheme.dim();
    let orders = scheme.torsion_orders();
    let mut out = Vec::new();
    let mut k = vec![-bound; dim];
    loop {
        let lp = scheme.lattice_point(k.clone());
        if window.difference_contains(&lp.torsion, &lp.internal, orders) {
            out.push(lp);
        }
        let mut advanced = false;
        for kc in k.iter_mut() {
            if *kc < bound {
                *kc += 1;
                advanced = true;
                break;
            }
            *kc = -bound;
        }
        if !advanced {
            break;
        }
    }
    out.sort_by(|a, b| cmp_vec(&a.phys, &b.phys));
    out
}

/// Every lattice vector with star in `W - W` and physical norm at most
/// `radius`, found by slab enumeration (complete, not bounded by coordinates).
pub fn displacement_candidates_in_ball<S: Scalar>(
    scheme: &CutProjectScheme<S>,
    window: &WindowRegion<S>,
    radius: &S,
) -> Result<Vec<LatticePoint<S>>> {
    let r = radius.to_f64();
    let r_sq = radius.clone() * radius.clone();
    displacements_where(scheme, window, &vec![-r; scheme.d()], &vec![r; scheme.d()], |phys| {
        norm_sq(phys).cmp_s(&r_sq).is_le()
    })
}

/// Every lattice vector with star in `W - W` and physical part in the box.
pub fn displacement_candidates_in_box<S: Scalar>(
    scheme: &CutProjectScheme<S>,
    window: &WindowRegion<S>,
    bbox: &PhysBox<S>,
) -> Result<Vec<LatticePoint<S>>> {
    displacements_where(scheme, window, &bbox.lo_f64(), &bbox.hi_f64(), |phys| bbox.contains(phys))
}

fn displacements_where<S: Scalar, P: Fn(&[S]) -> bool + Sync>(
    scheme: &CutProjectScheme<S>,
    window: &WindowRegion<S>,
    phys_lo: &[f64],
    phys_hi: &[f64],
    keep: P,
) -> Result<Vec<LatticePoint<S>>> {
    let (wlo, whi) = window.bbox_f64();
    let orders = scheme.torsion_orders().to_vec();
    let mut lo: Vec<f64> = wlo.iter().zip(&whi).map(|(a, b)| a - b - 1e-9).collect();
    let mut hi: Vec<f64> = wlo.iter().zip(&whi).map(|(a, b)| b - a + 1e-9).collect();
    lo.extend(phys_lo.iter().map(|v| v - 1e-9));
    hi.extend(phys_hi.iter().map(|v| v + 1e-9));
    let coords = enumerate_lattice(scheme, &lo, &hi, |k| {
        if !keep(&scheme.physical_of(k)) {
            return Ok(false);
        }
        Ok(window.difference_contains(&scheme.torsion_of(k), &scheme.internal_of(k), &orders))
    })?;
    let mut out: Vec<LatticePoint<S>> = coords.into_iter().map(|k| scheme.lattice_point(k)).collect();
    out.sort_by(|a, b| cmp_vec(&a.phys, &b.phys));
    Ok(out)
}

/// Squared minimal physical norm over nonzero lattice vectors with star in
/// `W - W`: a lower bound for squared distances in any projection set.
pub fn separation_lower_bound<S: Scalar>(scheme: &CutProjectScheme<S>, window: &WindowRegion<S>) -> Result<S> {
    let mut r = scheme.template().one_like();
    for _ in 0..64 {
        let cands = displacement_candidates_in_ball(scheme, window, &r)?;
        let best = cands
            .iter()
            .filter(|lp| lp.coords.iter().any(|&c| c != 0))
            .map(|lp| norm_sq(&lp.phys))
            .reduce(|a, b| a.min_s(b));
        if let Some(b) = best {
            return Ok(b);
        }
        r = r.clone() + r;
    }
    Err(Error::Internal("no nonzero displacement found".into()))
}

impl<S: Scalar> PointSample<S> {
    /// Checks the recorded separation against the lattice bound.
    pub fn verify_separation(&self) -> Result<S> {
        let bound = separation_lower_bound(&self.scheme, &self.window)?;
        if let Some(m) = &self.min_separation_sq {
            if m.cmp_s(&bound) == Ordering::Less {
                return Err(Error::Internal(format!("sample separation {m} below lattice bound {bound}")));
            }
        }
        Ok(bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::{QuadField, QuadReal};

    fn fib_window() -> WindowRegion<QuadReal> {
        let f = QuadField::GOLDEN;
        WindowRegion::interval(f.int(-1), &f.phi() - &f.one()).unwrap()
    }

    fn xi7() -> Xi<QuadReal> {
        let f = QuadField::GOLDEN;
        Xi::new(vec![f.ratio(1, 7)], vec![f.zero()])
    }

    fn gaps(s: &PointSample<QuadReal>) -> Vec<QuadReal> {
        let mut g: Vec<QuadReal> = s.positions.windows(2).map(|w| &w[1][0] - &w[0][0]).collect();
        g.sort();
        g.dedup();
        g
    }

    #[test]
    fn fibonacci_gaps_are_one_and_phi() {
        let f = QuadField::GOLDEN;
        let s = CutProjectScheme::fibonacci();
        let sample = enumerate_model_set(&s, &fib_window(), &xi7(), &PhysBox::interval(f.zero(), f.int(20)).unwrap()).unwrap();
        assert!(sample.len() > 10);
        assert_eq!(gaps(&sample), vec![f.one(), f.phi()]);
        assert_eq!(sample.min_separation_sq, Some(f.one()));
        // closed W - W admits phi - 1, realized only by boundary pairs
        let bound = sample.verify_separation().unwrap();
        let g = &f.phi() - &f.one();
        assert_eq!(bound, &g * &g);
    }

    #[test]
    fn boundary_hit_is_singular() {
        let f = QuadField::GOLDEN;
        let s = CutProjectScheme::fibonacci();
        let err = enumerate_model_set(&s, &fib_window(), &Xi::zero(&s), &PhysBox::interval(f.int(-5), f.int(5)).unwrap());
        assert!(matches!(err, Err(Error::SingularParameter { .. })));
        let v = is_nonsingular(&s, &fib_window(), &Xi::zero(&s), 3).unwrap();
        assert!(matches!(v, NonsingularVerdict::Singular { .. }));
        assert_eq!(is_nonsingular(&s, &fib_window(), &xi7(), 2000).unwrap(), NonsingularVerdict::VerifiedUpToBound(2000));
    }

    #[test]
    fn conventions_split_the_singular_pair() {
        let f = QuadField::GOLDEN;
        let s = CutProjectScheme::fibonacci();
        let b = PhysBox::interval(f.int(-10), f.int(10)).unwrap();
        let lower = enumerate_with_convention(&s, &fib_window(), &Xi::zero(&s), &b, BoundaryConvention::LowerClosed).unwrap();
        let upper = enumerate_with_convention(&s, &fib_window(), &Xi::zero(&s), &b, BoundaryConvention::UpperClosed).unwrap();
        assert!(lower.index_of(&[f.int(-1)]).is_some());
        assert!(lower.index_of(&[-f.phi()]).is_none());
        assert!(upper.index_of(&[-f.phi()]).is_some());
        assert!(upper.index_of(&[f.int(-1)]).is_none());
        assert_eq!(lower.len(), upper.len());
    }

    #[test]
    fn star_reads_columns() {
        let f = QuadField::GOLDEN;
        let s = CutProjectScheme::fibonacci();
        let z = Xi::zero(&s);
        assert_eq!(star_of(&s.lattice_point(vec![1, 0]), &z, &[]).value, vec![f.one()]);
        assert_eq!(star_of(&s.lattice_point(vec![0, 1]), &z, &[]).value, vec![&f.one() - &f.phi()]);
    }

    #[test]
    fn displacements_contain_small_gaps() {
        let f = QuadField::GOLDEN;
        let s = CutProjectScheme::fibonacci();
        let c = displacement_candidates(&s, &fib_window(), 4);
        let phys: Vec<QuadReal> = c.iter().map(|lp| lp.phys[0].clone()).collect();
        for v in [f.zero(), f.one(), f.phi(), &f.one() + &f.phi()] {
            assert!(phys.contains(&v));
            assert!(phys.contains(&-v));
        }
        let ball = displacement_candidates_in_ball(&s, &fib_window(), &f.int(3)).unwrap();
        assert!(ball.iter().all(|lp| lp.phys[0].abs() <= f.int(3)));
        assert!(ball.iter().any(|lp| lp.phys[0] == f.phi()));
    }

    #[test]
    fn zero_reprojection_is_identity() {
        let f = QuadField::GOLDEN;
        let s = CutProjectScheme::fibonacci();
        let sample = enumerate_model_set(&s, &fib_window(), &xi7(), &PhysBox::interval(f.zero(), f.int(30)).unwrap()).unwrap();
        let out = reproject(&sample, &[vec![f.zero()]]).unwrap();
        assert_eq!(out.positions(), sample.positions);
    }
}
