use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{render, Scalar};

use super::CutProjectScheme;

/// Cap on exact-check loop iterations; larger bounds are shrunk per axis.
const LOOP_BUDGET: f64 = 2.5e7;
/// Cap on the float enumeration used by the density proxy.
const DENSITY_BUDGET: f64 = 4e6;

/// Bounded evidence for the scheme assumptions. Never a proof.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeDiagnostics {
    pub determinant: String,
    pub determinant_f64: f64,
    /// Coordinate bound actually searched for zero-physical and period vectors.
    pub searched_bound: i64,
    /// Nonzero lattice vector with zero physical part, if one was found.
    pub zero_physical: Option<Vec<i64>>,
    /// Nonzero lattice vector with zero internal part, if one was found.
    pub period: Option<Vec<i64>>,
    /// `(bound, min nonzero internal norm)` for shrinking bounds.
    pub density_profile: Vec<(i64, Option<f64>)>,
    /// True when the profile strictly decreases (internal parts accumulate).
    pub density_consistent: bool,
    /// Minimal physical norm among vectors with internal norm at most 1.
    pub min_physical_norm_small_internal: Option<f64>,
    pub verdict: String,
}

pub fn validate_scheme<S: Scalar>(scheme: &CutProjectScheme<S>, bound: i64) -> Result<SchemeDiagnostics> {
    if bound <= 0 {
        return Err(Error::Config("validation bound must be positive".into()));
    }
    let det = scheme.determinant();
    if det.is_zero_s() {
        return Err(Error::SingularBasis);
    }
    let dim = scheme.dim();
    let (n, d) = (scheme.n(), scheme.d());
    let per_axis = LOOP_BUDGET.powf(1.0 / (dim.max(2) - 1) as f64);
    let searched_bound = bound.min(((per_axis - 1.0) / 2.0).floor().max(1.0) as i64);
    let rows: Vec<Vec<S>> = (0..dim).map(|r| (0..dim).map(|c| scheme.columns()[c][r].clone()).collect()).collect();
    let zero_physical = integer_kernel_witness(&rows[n..], searched_bound);
    let period = if n == 0 { None } else { integer_kernel_witness(&rows[..n], searched_bound) };

    let rows_f = scheme.rows_f64();
    let dens_bound = bound.min(((DENSITY_BUDGET.powf(1.0 / dim as f64) - 1.0) / 2.0).floor().max(1.0) as i64);
    let bounds: Vec<i64> = [8, 4, 2, 1].iter().map(|q| (dens_bound / q).max(1)).collect();
    let mut best = vec![f64::INFINITY; bounds.len()];
    let mut min_phys: Option<f64> = None;
    if n > 0 {
        let mut k = vec![-dens_bound; dim];
        loop {
            let m = k.iter().map(|v| v.abs()).max().unwrap_or(0);
            if m > 0 {
                let internal: f64 = (0..n).map(|r| dot(&rows_f[r], &k).powi(2)).sum::<f64>().sqrt();
                if internal > 1e-9 {
                    for (i, &b) in bounds.iter().enumerate() {
                        if m <= b && internal < best[i] {
                            best[i] = internal;
                        }
                    }
                }
                if internal <= 1.0 {
                    let phys: f64 = (n..n + d).map(|r| dot(&rows_f[r], &k).powi(2)).sum::<f64>().sqrt();
                    if phys > 1e-9 {
                        min_phys = Some(min_phys.map_or(phys, |p: f64| p.min(phys)));
                    }
                }
            }
            if !odometer(&mut k, dens_bound) {
                break;
            }
        }
    }
    let density_profile: Vec<(i64, Option<f64>)> =
        bounds.iter().zip(&best).map(|(&b, &v)| (b, v.is_finite().then_some(v))).collect();
    let density_consistent = n > 0
        && density_profile.windows(2).all(|w| match (w[0].1, w[1].1) {
            (Some(a), Some(b)) => b < a * (1.0 - 1e-12),
            _ => false,
        });
    let ok = zero_physical.is_none() && period.is_none() && density_consistent;
    let verdict = if ok {
        format!("verified-up-to-bound {searched_bound}")
    } else {
        format!("fails-up-to-bound {searched_bound}")
    };
    Ok(SchemeDiagnostics {
        determinant: render(&det),
        determinant_f64: det.to_f64(),
        searched_bound,
        zero_physical,
        period,
        density_profile,
        density_consistent,
        min_physical_norm_small_internal: min_phys,
        verdict,
    })
}

fn dot(row: &[f64], k: &[i64]) -> f64 {
    row.iter().zip(k).map(|(a, &b)| a * b as f64).sum()
}

fn odometer(k: &mut [i64], bound: i64) -> bool {
    for v in k.iter_mut() {
        if *v < bound {
            *v += 1;
            return true;
        }
        *v = -bound;
    }
    false
}

/// Nonzero `k` in `[-bound, bound]^N` with `rows * k = 0` exactly. The last
/// coordinate with a nonzero coefficient in the first row is solved for; the
/// rest are looped over with a float prefilter.
fn integer_kernel_witness<S: Scalar>(rows: &[Vec<S>], bound: i64) -> Option<Vec<i64>> {
    let first = rows.first()?;
    let dim = first.len();
    let Some(solved) = (0..dim).rev().find(|&c| !first[c].is_zero_s()) else {
        // first row vanishes: any unit vector killed by all rows is a witness
        return (0..dim).find_map(|c| {
            let mut k = vec![0; dim];
            k[c] = 1;
            check_kernel(rows, &k).then_some(k)
        });
    };
    let free: Vec<usize> = (0..dim).filter(|&c| c != solved).collect();
    let coef: Vec<f64> = first.iter().map(|v| v.to_f64()).collect();
    let mut k = vec![0i64; dim];
    for &c in &free {
        k[c] = -bound;
    }
    loop {
        if free.iter().any(|&c| k[c] != 0) {
            let partial: f64 = free.iter().map(|&c| coef[c] * k[c] as f64).sum();
            let ks = -partial / coef[solved];
            let near = ks.round();
            if (ks - near).abs() < 1e-6 && near.abs() <= bound as f64 {
                k[solved] = near as i64;
                if check_kernel(rows, &k) {
                    return Some(k);
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
            return None;
        }
    }
}

fn check_kernel<S: Scalar>(rows: &[Vec<S>], k: &[i64]) -> bool {
    rows.iter().all(|row| {
        let mut acc = row[0].zero_like();
        for (a, &v) in row.iter().zip(k) {
            if v != 0 {
                acc = acc + a.clone() * a.from_i64_like(v);
            }
        }
        acc.is_zero_s()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::QuadField;

    #[test]
    fn fibonacci_passes_to_large_bound() {
        let s = CutProjectScheme::fibonacci();
        let diag = validate_scheme(&s, 1_000_000).unwrap();
        assert_eq!(diag.searched_bound, 1_000_000);
        assert!(diag.zero_physical.is_none());
        assert!(diag.period.is_none());
        assert!(diag.density_consistent);
        assert!(diag.verdict.starts_with("verified-up-to-bound"));
        assert_eq!(diag.determinant, "sqrt(5)");
    }

    #[test]
    fn rational_slope_fails_density() {
        let f = QuadField::GOLDEN;
        // internal parts m + n/2 lie in a discrete set
        let s = CutProjectScheme::new(1, 1, vec![], vec![vec![f.one(), f.one()], vec![f.ratio(1, 2), f.phi()]], None).unwrap();
        let diag = validate_scheme(&s, 500).unwrap();
        assert!(!diag.density_consistent);
        assert!(diag.verdict.starts_with("fails"));
    }

    #[test]
    fn zero_physical_vector_found() {
        let f = QuadField::GOLDEN;
        // physical parts 1 and 2: (2, -1) projects to zero
        let s = CutProjectScheme::new(1, 1, vec![], vec![vec![f.phi(), f.one()], vec![f.one(), f.int(2)]], None).unwrap();
        let diag = validate_scheme(&s, 10).unwrap();
        let w = diag.zero_physical.unwrap();
        assert_eq!(w[0] + 2 * w[1], 0);
    }
}
