use std::collections::HashMap;

use serde::Serialize;

use crate::acceptance::{patch_displacements, Region};
use crate::error::{Error, Result};
use crate::scalar::{render, solve, Scalar};
use crate::scheme::PointSample;

use super::{Generator, PatchClass};

/// Fit diagnostics at one patch radius.
#[derive(Debug, Clone, Serialize)]
pub struct RadiusFit {
    pub radius: String,
    pub points: usize,
    pub classes: usize,
    /// `None` when the demeaned star spread is degenerate.
    pub l: Option<Vec<Vec<String>>>,
    /// Max deviation of the residual from its class mean.
    pub deviation_f64: Option<f64>,
    pub patch_determined: bool,
}

/// `F = L o sigma + psi` with `psi` constant on patch classes.
#[derive(Debug, Clone)]
pub struct DecompositionResult<S> {
    /// `d` rows of length `n`.
    pub l: Vec<Vec<S>>,
    /// Smallest tested radius at which the residual is patch-determined.
    pub psi_radius: Option<S>,
    /// `(lattice coordinates, psi)` per point used at the reported radius.
    pub psi_values: Vec<(Vec<i64>, Vec<S>)>,
    /// `max |F - L o sigma - psi|` at the reported radius.
    pub residual_linf: S,
    pub fits: Vec<RadiusFit>,
}

struct Fit<S> {
    l: Vec<Vec<S>>,
    psi: Vec<(Vec<i64>, Vec<S>)>,
    deviation: S,
}

/// Fits `L` by least squares of `F` against `sigma` within `R`-patch classes
/// (class means removed), for `R = 0, 1, ..., floor(r_max)`. The first `R`
/// whose residual is constant on classes is `psi_radius`; once `R` reaches
/// the radius of the local part, the within-class fit is exact.
pub fn decompose_generator<S: Scalar>(
    sample: &PointSample<S>,
    generator: &Generator<S>,
    r_max: &S,
) -> Result<DecompositionResult<S>> {
    let values = generator.evaluate_all(sample)?;
    let evaluable = values.iter().filter(|v| v.is_some()).count();
    if evaluable < 200 {
        return Err(Error::TooFewPoints { have: evaluable, need: 200 });
    }
    let top = r_max.floor_s().to_integer().filter(|&r| r >= 0).ok_or_else(|| {
        Error::Precondition("maximal radius must be a non-negative number".into())
    })?;
    let t = sample.scheme.template();
    let mut fits = Vec::new();
    let mut last: Option<(S, Fit<S>)> = None;
    for r in 0..=top {
        let radius = t.from_i64_like(r);
        let fit = fit_at(sample, &values, &radius);
        let (report, fit) = match fit {
            Ok((fit, points, classes)) => {
                let passed = fit.deviation.is_zero_s();
                (
                    RadiusFit {
                        radius: render(&radius),
                        points,
                        classes,
                        l: Some(fit.l.iter().map(|row| row.iter().map(render).collect()).collect()),
                        deviation_f64: Some(fit.deviation.to_f64()),
                        patch_determined: passed,
                    },
                    Some(fit),
                )
            }
            Err(Error::DegenerateFit) => (
                RadiusFit { radius: render(&radius), points: 0, classes: 0, l: None, deviation_f64: None, patch_determined: false },
                None,
            ),
            Err(e) => return Err(e),
        };
        let passed = report.patch_determined;
        fits.push(report);
        if let Some(fit) = fit {
            if passed {
                return Ok(DecompositionResult {
                    l: fit.l,
                    psi_radius: Some(radius),
                    psi_values: fit.psi,
                    residual_linf: fit.deviation,
                    fits,
                });
            }
            last = Some((radius, fit));
        }
    }
    let (_, fit) = last.ok_or(Error::DegenerateFit)?;
    Ok(DecompositionResult { l: fit.l, psi_radius: None, psi_values: fit.psi, residual_linf: fit.deviation, fits })
}

fn fit_at<S: Scalar>(
    sample: &PointSample<S>,
    values: &[Option<Vec<S>>],
    radius: &S,
) -> Result<(Fit<S>, usize, usize)> {
    let (d, n) = (sample.scheme.d(), sample.scheme.n());
    let t = sample.scheme.template();
    let zero = t.zero_like();
    let region = Region::Ball(radius.clone());
    let mut groups: HashMap<PatchClass, Vec<usize>> = HashMap::new();
    for (i, v) in values.iter().enumerate() {
        if v.is_some() && sample.bbox.contains_ball(&sample.positions[i], radius) {
            groups.entry(patch_displacements(sample, i, &region)).or_default().push(i);
        }
    }
    let points: usize = groups.values().map(|g| g.len()).sum();
    if points == 0 || n == 0 {
        return Err(Error::DegenerateFit);
    }
    let star = |i: usize| sample.star(i).value;
    let val = |i: usize| values[i].clone().expect("filtered");
    let mean = |idx: &[usize], f: &dyn Fn(usize) -> Vec<S>, len: usize| -> Vec<S> {
        let mut acc = vec![zero.clone(); len];
        for &i in idx {
            for (a, b) in acc.iter_mut().zip(f(i)) {
                *a = a.clone() + b;
            }
        }
        let c = t.from_i64_like(idx.len() as i64);
        acc.into_iter().map(|a| a / c.clone()).collect()
    };
    // deterministic class order
    let mut classes: Vec<(&PatchClass, &Vec<usize>)> = groups.iter().collect();
    classes.sort_by(|a, b| a.0.cmp(b.0));
    let mut gram = vec![vec![zero.clone(); n]; n];
    let mut cross = vec![vec![zero.clone(); n]; d];
    let mut centred: Vec<(usize, Vec<S>, Vec<S>)> = Vec::with_capacity(points);
    for (_, idx) in &classes {
        let ms = mean(idx, &star, n);
        let mf = mean(idx, &val, d);
        for &i in idx.iter() {
            let ds: Vec<S> = star(i).into_iter().zip(&ms).map(|(a, b)| a - b.clone()).collect();
            let df: Vec<S> = val(i).into_iter().zip(&mf).map(|(a, b)| a - b.clone()).collect();
            for a in 0..n {
                for b in 0..n {
                    gram[a][b] = gram[a][b].clone() + ds[a].clone() * ds[b].clone();
                }
                for r in 0..d {
                    cross[r][a] = cross[r][a].clone() + df[r].clone() * ds[a].clone();
                }
            }
            centred.push((i, ds, df));
        }
    }
    let mut l = Vec::with_capacity(d);
    for row in &cross {
        l.push(solve(&gram, row).ok_or(Error::DegenerateFit)?);
    }
    // residual class means and deviation
    let mut deviation = zero.clone();
    let mut psi = Vec::with_capacity(points);
    for (_, idx) in &classes {
        let resid = |i: usize| -> Vec<S> {
            let s = star(i);
            val(i)
                .into_iter()
                .enumerate()
                .map(|(r, fv)| {
                    let mut acc = fv;
                    for c in 0..n {
                        acc = acc - l[r][c].clone() * s[c].clone();
                    }
                    acc
                })
                .collect()
        };
        let m = mean(idx, &resid, d);
        for &i in idx.iter() {
            for (a, b) in resid(i).into_iter().zip(&m) {
                deviation = deviation.max_s((a - b.clone()).abs_s());
            }
            psi.push((sample.points[i].coords.clone(), m.clone()));
        }
    }
    psi.sort_by(|a, b| a.0.cmp(&b.0));
    Ok((Fit { l, psi, deviation }, points, classes.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deform::tests::fib_sample;
    use crate::deform::LocalRule;
    use crate::quadfield::{QuadField, QuadReal};

    #[test]
    fn pure_linear_generator_recovers_exactly() {
        let f = QuadField::GOLDEN;
        let s = fib_sample(0, 400);
        let l0 = vec![vec![f.ratio(-3, 11)]];
        let res = decompose_generator(&s, &Generator::LinearInternal(l0.clone()), &f.int(3)).unwrap();
        assert_eq!(res.l, l0);
        assert_eq!(res.psi_radius, Some(f.zero()));
        assert!(res.psi_values.iter().all(|(_, v)| v[0] == f.zero()));
    }

    #[test]
    fn linear_plus_local_rule_recovers() {
        let f = QuadField::GOLDEN;
        let s = fib_sample(0, 500);
        let l0 = vec![vec![&f.ratio(1, 5) + &(&f.ratio(1, 9) * &f.sqrt_d())]];
        let rule = LocalRule::from_fn(&[&s], f.int(2), |pts| {
            let sum = pts.iter().fold(f.zero(), |a, p| &a + &p[0]);
            vec![&sum * &f.ratio(1, 7)]
        });
        let lin = Generator::LinearInternal(l0.clone()).evaluate_all(&s).unwrap();
        let loc = Generator::LocalRule(rule).evaluate_all(&s).unwrap();
        let combined: Vec<Option<Vec<QuadReal>>> = lin
            .into_iter()
            .zip(loc)
            .map(|(a, b)| match (a, b) {
                (Some(a), Some(b)) => Some(vec![&a[0] + &b[0]]),
                _ => None,
            })
            .collect();
        let g = Generator::tabulate(&s, &combined).unwrap();
        let res = decompose_generator(&s, &g, &f.int(4)).unwrap();
        assert_eq!(res.l, l0);
        assert!(res.psi_radius.unwrap() <= f.int(2));
    }
}
