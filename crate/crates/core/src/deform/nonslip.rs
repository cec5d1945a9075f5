use std::collections::BTreeMap;

use serde::Serialize;

use crate::acceptance::{patch_displacements, Region};
use crate::error::{Error, Result};
use crate::scalar::{render, Scalar};
use crate::scheme::{
    enumerate_with_convention, BoundaryConvention, CutProjectScheme, PhysBox, PointSample, WindowRegion, Xi,
};

use super::GeneratorFamily;

/// Generator values at a common point, in the lower and the upper set.
type ValuePair<S> = (Option<Vec<S>>, Option<Vec<S>>);

#[derive(Debug, Clone, Serialize)]
pub struct NonslipRow {
    pub radius: String,
    /// Common points whose patches in both sets agree out to the radius.
    pub compared: usize,
    /// Of those, points where the two generator values differ.
    pub disagreements: usize,
}

/// Outcome of comparing a generator on the two limits of a singular fiber.
#[derive(Debug, Clone, Serialize)]
pub struct NonslipReport {
    /// Points present in only one of the two sets.
    pub defect: Vec<String>,
    pub rows: Vec<NonslipRow>,
    /// Largest tested radius with a disagreement.
    pub max_disagreement_radius: Option<String>,
    /// Smallest tested radius from which no row disagrees.
    pub agrees_from: Option<String>,
    /// `consistent-with-nonslip` or `slipping`; never a proof.
    pub verdict: String,
}

/// Builds the two singular limits of `xi` (window cells `[lo, hi)` and
/// `(lo, hi]`), which share every lattice lift away from the boundary orbit,
/// and compares the generator on common points whose patches agree.
pub fn nonslip_probe<S: Scalar>(
    scheme: &CutProjectScheme<S>,
    window: &WindowRegion<S>,
    xi: &Xi<S>,
    bbox: &PhysBox<S>,
    family: &dyn GeneratorFamily<S>,
    radii: &[S],
) -> Result<NonslipReport> {
    if scheme.d() != 1 || scheme.n() != 1 || !window.is_interval_window() {
        return Err(Error::Unsupported("the nonslip probe needs d = n = 1 and an interval window".into()));
    }
    let lower = enumerate_with_convention(scheme, window, xi, bbox, BoundaryConvention::LowerClosed)?;
    let upper = enumerate_with_convention(scheme, window, xi, bbox, BoundaryConvention::UpperClosed)?;
    let only = |a: &PointSample<S>, b: &PointSample<S>| -> Vec<usize> {
        (0..a.len()).filter(|&i| b.index_of_coords(&a.points[i].coords).is_none()).collect()
    };
    let only_lower = only(&lower, &upper);
    let only_upper = only(&upper, &lower);
    let mut hits: Vec<f64> = only_lower
        .iter()
        .map(|&i| lower.positions_f64[i][0])
        .chain(only_upper.iter().map(|&i| upper.positions_f64[i][0]))
        .collect();
    if hits.is_empty() {
        return Err(Error::NotSingular);
    }
    hits.sort_by(f64::total_cmp);
    // one orbit: hits closer than twice the largest gap of either set
    let max_gap = [&lower, &upper]
        .iter()
        .flat_map(|s| s.positions_f64.windows(2).map(|w| w[1][0] - w[0][0]))
        .fold(0f64, f64::max);
    let clusters = 1 + hits.windows(2).filter(|w| w[1] - w[0] > 2.0 * max_gap).count();
    if clusters > 1 {
        return Err(Error::AmbiguousSingularity(clusters));
    }
    let mut defect: Vec<String> = only_lower
        .iter()
        .map(|&i| format!("{} (lower only)", render(&lower.positions[i][0])))
        .chain(only_upper.iter().map(|&i| format!("{} (upper only)", render(&upper.positions[i][0]))))
        .collect();
    defect.sort();
    let g_lower = family.instantiate(&lower)?;
    let g_upper = family.instantiate(&upper)?;
    let mut common: Vec<(usize, usize)> = Vec::new();
    for i in 0..lower.len() {
        if let Some(j) = upper.index_of_coords(&lower.points[i].coords) {
            common.push((i, j));
        }
    }
    let mut values: BTreeMap<usize, ValuePair<S>> = BTreeMap::new();
    for &(i, j) in &common {
        values.insert(i, (g_lower.evaluate(&lower, i)?, g_upper.evaluate(&upper, j)?));
    }
    let mut rows = Vec::with_capacity(radii.len());
    for r in radii {
        let region = Region::Ball(r.clone());
        let mut compared = 0;
        let mut disagreements = 0;
        for &(i, j) in &common {
            if !bbox.contains_ball(&lower.positions[i], r) {
                continue;
            }
            if patch_displacements(&lower, i, &region) != patch_displacements(&upper, j, &region) {
                continue;
            }
            let (Some(a), Some(b)) = &values[&i] else { continue };
            compared += 1;
            if a.iter().zip(b).any(|(x, y)| !x.cmp_s(y).is_eq()) {
                disagreements += 1;
            }
        }
        rows.push(NonslipRow { radius: render(r), compared, disagreements });
    }
    let max_disagreement_radius = rows.iter().rev().find(|r| r.disagreements > 0).map(|r| r.radius.clone());
    let first_clean = rows.iter().rposition(|r| r.disagreements > 0).map_or(0, |k| k + 1);
    let agrees_from = rows.get(first_clean).map(|r| r.radius.clone());
    let verdict = if rows.last().is_some_and(|r| r.disagreements == 0) {
        "consistent-with-nonslip"
    } else {
        "slipping"
    };
    Ok(NonslipReport { defect, rows, max_disagreement_radius, agrees_from, verdict: verdict.into() })
}
