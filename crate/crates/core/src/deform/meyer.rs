use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadfield::{QuadField, Rational};
use crate::scalar::{int_pair_sign, render, Scalar};
use crate::scheme::{cmp_vec, min_distance_sq, norm_sq, sub_vec};

/// Finite-sample thresholds of the Meyer dichotomy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeyerThresholds {
    /// Meyer-consistent when the relative spread of `min_gap` over the top
    /// half of the radii is below this.
    pub variation: f64,
    /// Non-Meyer needs at least this many radii with a gap ...
    pub min_radii: usize,
    /// ... a fitted log-slope below this ...
    pub slope: f64,
    /// ... and a final gap below this fraction of the first.
    pub final_ratio: f64,
    pub min_points: usize,
}

impl Default for MeyerThresholds {
    fn default() -> Self {
        MeyerThresholds { variation: 0.01, min_radii: 5, slope: -0.1, final_ratio: 1e-3, min_points: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeyerVerdict {
    MeyerConsistent,
    NonMeyer { rate: f64 },
    /// Neither side of the dichotomy is supported by the sample.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeyerReport {
    pub points: usize,
    pub radii: Vec<String>,
    pub radii_f64: Vec<f64>,
    /// Abscissa of the decay fit (generation labels or radius indices).
    pub abscissa: Vec<f64>,
    /// Minimal distance between distinct elements of `(L - L) cap B_r`.
    pub min_gap: Vec<Option<String>>,
    pub min_gap_f64: Vec<Option<f64>>,
    /// Minimal distance in `(L - L) cap B_{r/2}`: a lower proxy for the
    /// smallest nonzero element of `(L - L) - (L - L)` inside `B_r`.
    pub near_zero_f64: Vec<Option<f64>>,
    /// Distinct difference vectors inside the largest radius.
    pub differences: usize,
    pub decay_slope: Option<f64>,
    pub top_half_variation: Option<f64>,
    pub final_ratio: Option<f64>,
    pub thresholds: MeyerThresholds,
    pub verdict: MeyerVerdict,
}

struct Gaps {
    exact: Vec<Option<String>>,
    float: Vec<Option<f64>>,
    near_zero: Vec<Option<f64>>,
    differences: usize,
}

/// Difference-set report for a finite point list. `abscissa` labels the
/// radii for the decay fit; the default is the radius index.
pub fn meyer_report<S: Scalar>(
    points: &[Vec<S>],
    radii: &[S],
    abscissa: Option<&[f64]>,
    thresholds: &MeyerThresholds,
) -> Result<MeyerReport> {
    if points.len() < thresholds.min_points {
        return Err(Error::TooFewPoints { have: points.len(), need: thresholds.min_points });
    }
    if radii.is_empty() || radii.windows(2).any(|w| w[0].cmp_s(&w[1]).is_ge()) {
        return Err(Error::Precondition("radii must be non-empty and strictly increasing".into()));
    }
    if let Some(a) = abscissa {
        if a.len() != radii.len() {
            return Err(Error::Dimension("one abscissa value per radius required".into()));
        }
    }
    let d = points[0].len();
    let mut sorted: Vec<Vec<S>> = points.to_vec();
    sorted.sort_by(|a, b| cmp_vec(a, b));
    let halves: Vec<S> = radii.iter().map(|r| r.clone() / r.from_i64_like(2)).collect();
    let gaps = if d == 1 {
        let flat: Vec<S> = sorted.iter().map(|p| p[0].clone()).collect();
        match fast_gaps(&flat, radii, &halves) {
            Some(g) => g,
            None => generic_gaps_1d(&flat, radii, &halves),
        }
    } else {
        generic_gaps_nd(&sorted, radii, &halves)
    };
    let abscissa: Vec<f64> = match abscissa {
        Some(a) => a.to_vec(),
        None => (0..radii.len()).map(|i| i as f64).collect(),
    };
    let fit: Vec<(f64, f64)> = abscissa
        .iter()
        .zip(&gaps.float)
        .filter_map(|(&x, g)| g.filter(|&v| v > 0.0).map(|v| (x, v.ln())))
        .collect();
    let decay_slope = least_squares_slope(&fit);
    let present: Vec<f64> = gaps.float.iter().flatten().copied().collect();
    let top_half_variation = if present.is_empty() {
        None
    } else {
        let top = &present[present.len() / 2..];
        let max = top.iter().copied().fold(f64::MIN, f64::max);
        let min = top.iter().copied().fold(f64::MAX, f64::min);
        Some((max - min) / max)
    };
    let final_ratio = match (present.first(), present.last()) {
        (Some(a), Some(b)) => Some(b / a),
        _ => None,
    };
    let verdict = if top_half_variation.is_some_and(|v| v < thresholds.variation) {
        MeyerVerdict::MeyerConsistent
    } else if fit.len() >= thresholds.min_radii
        && decay_slope.is_some_and(|s| s < thresholds.slope)
        && final_ratio.is_some_and(|r| r < thresholds.final_ratio)
    {
        MeyerVerdict::NonMeyer { rate: -decay_slope.expect("checked") }
    } else {
        MeyerVerdict::Inconclusive
    };
    Ok(MeyerReport {
        points: points.len(),
        radii: radii.iter().map(render).collect(),
        radii_f64: radii.iter().map(|r| r.to_f64()).collect(),
        abscissa,
        min_gap: gaps.exact,
        min_gap_f64: gaps.float,
        near_zero_f64: gaps.near_zero,
        differences: gaps.differences,
        decay_slope,
        top_half_variation,
        final_ratio,
        thresholds: thresholds.clone(),
        verdict,
    })
}

/// Slope of the least-squares line through `(x, y)`.
pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Prefix minima of consecutive gaps in a sorted list of distinct
/// non-negative differences; `upto[k]` = number of differences `<= r_k`.
fn prefix_min_gap<T: Clone, C: Fn(&T, &T) -> Ordering>(gaps: &[T], upto: &[usize], cmp: C) -> Vec<Option<T>> {
    let mut prefix: Vec<T> = Vec::with_capacity(gaps.len());
    for g in gaps {
        let next = match prefix.last() {
            Some(p) if cmp(p, g).is_le() => p.clone(),
            _ => g.clone(),
        };
        prefix.push(next);
    }
    upto.iter().map(|&c| if c >= 2 { Some(prefix[c - 2].clone()) } else { None }).collect()
}

/// Exact path over `Z[sqrt D] / den` with machine integers.
fn fast_gaps<S: Scalar>(flat: &[S], radii: &[S], halves: &[S]) -> Option<Gaps> {
    let mut batch: Vec<S> = flat.to_vec();
    batch.extend(radii.iter().cloned());
    batch.extend(halves.iter().cloned());
    let emb = S::integer_embedding(&batch)?;
    let n = flat.len();
    let pts = &emb.parts[..n];
    let rad = &emb.parts[n..n + radii.len()];
    let half = &emb.parts[n + radii.len()..];
    let sqrt_d = (emb.d as f64).sqrt();
    let val = |p: &(i64, i64)| p.0 as f64 + p.1 as f64 * sqrt_d;
    let cmp = |x: &(i64, i64), y: &(i64, i64)| int_pair_sign(x.0 as i128 - y.0 as i128, x.1 as i128 - y.1 as i128, emb.d);
    let rmax = *rad.last().expect("non-empty radii");
    let rmax_f = val(&rmax);
    let pts_f: Vec<f64> = pts.iter().map(val).collect();
    let mut set: HashSet<(i64, i64)> = HashSet::new();
    set.insert((0, 0));
    for i in 0..n {
        for j in i + 1..n {
            let df = pts_f[j] - pts_f[i];
            let diff = (pts[j].0 - pts[i].0, pts[j].1 - pts[i].1);
            if df > rmax_f + 1e-6 * rmax_f.abs().max(1.0) {
                break;
            }
            if cmp(&diff, &rmax).is_le() {
                set.insert(diff);
            }
        }
    }
    let mut diffs: Vec<(i64, i64)> = set.into_iter().collect();
    diffs.sort_by(|a, b| val(a).total_cmp(&val(b)).then(a.cmp(b)));
    // exact repair of the float order
    for k in 1..diffs.len() {
        let mut j = k;
        while j > 0 && cmp(&diffs[j - 1], &diffs[j]).is_gt() {
            diffs.swap(j - 1, j);
            j -= 1;
        }
    }
    let gaps: Vec<(i64, i64)> = diffs.windows(2).map(|w| (w[1].0 - w[0].0, w[1].1 - w[0].1)).collect();
    let count = |r: &(i64, i64)| diffs.partition_point(|v| cmp(v, r).is_le());
    let upto: Vec<usize> = rad.iter().map(count).collect();
    let upto_half: Vec<usize> = half.iter().map(count).collect();
    let mins = prefix_min_gap(&gaps, &upto, cmp);
    let near = prefix_min_gap(&gaps, &upto_half, cmp);
    let field = QuadField::new(emb.d as u64).ok()?;
    let exact = |p: &(i64, i64)| {
        field
            .new_element(
                Rational::new(p.0.into(), emb.den.clone()),
                Rational::new(p.1.into(), emb.den.clone()),
            )
    };
    Some(Gaps {
        exact: mins.iter().map(|m| m.as_ref().map(|p| exact(p).to_string())).collect(),
        float: mins.iter().map(|m| m.as_ref().map(|p| exact(p).to_f64())).collect(),
        near_zero: near.iter().map(|m| m.as_ref().map(|p| exact(p).to_f64())).collect(),
        differences: diffs.len(),
    })
}

/// Scalar path: differences deduplicated by key (exact for quadratic
/// values, tolerance grid for floats).
fn generic_gaps_1d<S: Scalar>(flat: &[S], radii: &[S], halves: &[S]) -> Gaps {
    let rmax = radii.last().expect("non-empty radii");
    let mut set: BTreeMap<S::Key, S> = BTreeMap::new();
    let zero = flat[0].zero_like();
    set.insert(zero.key(), zero);
    for i in 0..flat.len() {
        for j in i + 1..flat.len() {
            let diff = flat[j].clone() - flat[i].clone();
            if diff.cmp_s(rmax).is_gt() {
                break;
            }
            set.entry(diff.key()).or_insert(diff);
        }
    }
    let diffs: Vec<S> = set.into_values().collect();
    let gaps: Vec<S> = diffs.windows(2).map(|w| w[1].clone() - w[0].clone()).collect();
    let count = |r: &S| diffs.partition_point(|v| v.cmp_s(r).is_le());
    let upto: Vec<usize> = radii.iter().map(count).collect();
    let upto_half: Vec<usize> = halves.iter().map(count).collect();
    let mins = prefix_min_gap(&gaps, &upto, |a, b| a.cmp_s(b));
    let near = prefix_min_gap(&gaps, &upto_half, |a, b| a.cmp_s(b));
    Gaps {
        exact: mins.iter().map(|m| m.as_ref().map(render)).collect(),
        float: mins.iter().map(|m| m.as_ref().map(|v| v.to_f64())).collect(),
        near_zero: near.iter().map(|m| m.as_ref().map(|v| v.to_f64())).collect(),
        differences: diffs.len(),
    }
}

/// Any dimension: distinct difference vectors and their pairwise minimum.
fn generic_gaps_nd<S: Scalar>(sorted: &[Vec<S>], radii: &[S], halves: &[S]) -> Gaps {
    let rmax = radii.last().expect("non-empty radii");
    let rmax_sq = rmax.clone() * rmax.clone();
    let mut set: BTreeMap<Vec<S::Key>, Vec<S>> = BTreeMap::new();
    for i in 0..sorted.len() {
        for j in 0..sorted.len() {
            let diff = sub_vec(&sorted[j], &sorted[i]);
            if norm_sq(&diff).cmp_s(&rmax_sq).is_le() {
                set.entry(diff.iter().map(|v| v.key()).collect()).or_insert(diff);
            }
        }
    }
    let mut diffs: Vec<Vec<S>> = set.into_values().collect();
    diffs.sort_by(|a, b| cmp_vec(a, b));
    let at = |r: &S| -> Option<S> {
        let r_sq = r.clone() * r.clone();
        let inside: Vec<Vec<S>> = diffs.iter().filter(|v| norm_sq(v).cmp_s(&r_sq).is_le()).cloned().collect();
        min_distance_sq(&inside)
    };
    let mins: Vec<Option<S>> = radii.iter().map(at).collect();
    let near: Vec<Option<S>> = halves.iter().map(at).collect();
    Gaps {
        exact: mins.iter().map(|m| m.as_ref().map(|v| format!("sqrt({})", render(v)))).collect(),
        float: mins.iter().map(|m| m.as_ref().map(|v| v.to_f64().sqrt())).collect(),
        near_zero: near.iter().map(|m| m.as_ref().map(|v| v.to_f64().sqrt())).collect(),
        differences: diffs.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deform::tests::fib_sample;
    use crate::quadfield::{QuadField, QuadReal};

    #[test]
    fn integer_lattice_has_unit_gap() {
        let f = QuadField::GOLDEN;
        let pts: Vec<Vec<QuadReal>> = (0..150).map(|i| vec![f.int(i)]).collect();
        let radii: Vec<QuadReal> = [5, 10, 20, 40, 80].iter().map(|&r| f.int(r)).collect();
        let rep = meyer_report(&pts, &radii, None, &MeyerThresholds::default()).unwrap();
        assert!(rep.min_gap.iter().all(|g| g.as_deref() == Some("1")));
        assert_eq!(rep.verdict, MeyerVerdict::MeyerConsistent);
        let floats: Vec<Vec<f64>> = (0..150).map(|i| vec![i as f64]).collect();
        let radii_f = [5.0, 10.0, 20.0, 40.0, 80.0];
        let rep = meyer_report(&floats, &radii_f, None, &MeyerThresholds::default()).unwrap();
        assert!(rep.min_gap_f64.iter().all(|g| (g.unwrap() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn too_few_points() {
        let pts: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        assert!(matches!(
            meyer_report(&pts, &[1.0], None, &MeyerThresholds::default()),
            Err(Error::TooFewPoints { have: 10, need: 100 })
        ));
    }

    #[test]
    fn fibonacci_is_meyer_consistent_and_paths_agree() {
        let f = QuadField::GOLDEN;
        let s = fib_sample(0, 400);
        let radii: Vec<QuadReal> = [10, 20, 40, 80, 160, 320].iter().map(|&r| f.int(r)).collect();
        let rep = meyer_report(&s.positions, &radii, None, &MeyerThresholds::default()).unwrap();
        assert_eq!(rep.verdict, MeyerVerdict::MeyerConsistent);
        let prev = rep.min_gap_f64.clone();
        assert!(prev.windows(2).all(|w| w[1].unwrap() <= w[0].unwrap()));
        let flat: Vec<QuadReal> = s.positions.iter().map(|p| p[0].clone()).collect();
        let halves: Vec<QuadReal> = radii.iter().map(|r| r / &f.int(2)).collect();
        let slow = generic_gaps_1d(&flat, &radii, &halves);
        assert_eq!(slow.exact, rep.min_gap);
        assert_eq!(slow.differences, rep.differences);
        // 2D embedding of the same set agrees on gaps
        let two: Vec<Vec<QuadReal>> = s.positions.iter().take(120).map(|p| vec![p[0].clone(), f.zero()]).collect();
        let one: Vec<Vec<QuadReal>> = s.positions.iter().take(120).cloned().collect();
        let r2 = meyer_report(&two, &radii[..3], None, &MeyerThresholds::default()).unwrap();
        let r1 = meyer_report(&one, &radii[..3], None, &MeyerThresholds::default()).unwrap();
        for (a, b) in r1.min_gap_f64.iter().zip(&r2.min_gap_f64) {
            assert!((a.unwrap() - b.unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn slope_fit() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, 2.0 - 0.5 * i as f64)).collect();
        assert!((least_squares_slope(&pts).unwrap() + 0.5).abs() < 1e-12);
        assert!(least_squares_slope(&pts[..1]).is_none());
    }
}
