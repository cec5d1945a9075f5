use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadfield::{QuadField, QuadReal, Rational};
use crate::scalar::{nullspace, render};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenClass {
    /// The Perron-Frobenius eigenvalue.
    Pf,
    /// A Galois conjugate of the Perron-Frobenius eigenvalue.
    PfConjugate,
    /// `|lambda| < 1` and not conjugate to the Perron-Frobenius eigenvalue.
    ContractingNonConjugate,
    /// `|lambda| > 1` and not conjugate to the Perron-Frobenius eigenvalue.
    ExpandingOther,
    Unit,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EigenValue {
    Exact(QuadReal),
    Float(f64),
    Complex { re: f64, im: f64 },
}

impl EigenValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            EigenValue::Exact(q) => q.to_f64(),
            EigenValue::Float(v) => *v,
            EigenValue::Complex { re, .. } => *re,
        }
    }

    pub fn imag(&self) -> f64 {
        match self {
            EigenValue::Complex { im, .. } => *im,
            _ => 0.0,
        }
    }

    pub fn modulus(&self) -> f64 {
        match self {
            EigenValue::Complex { re, im } => re.hypot(*im),
            v => v.to_f64().abs(),
        }
    }

    pub fn render(&self) -> String {
        match self {
            EigenValue::Exact(q) => render(q),
            EigenValue::Float(v) => format!("{v}"),
            EigenValue::Complex { re, im } => format!("{re}{im:+}i"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EigenVector {
    Exact(Vec<QuadReal>),
    Float(Vec<f64>),
}

impl EigenVector {
    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            EigenVector::Exact(v) => v.iter().map(QuadReal::to_f64).collect(),
            EigenVector::Float(v) => v.clone(),
        }
    }

    pub fn render(&self) -> Vec<String> {
        match self {
            EigenVector::Exact(v) => v.iter().map(render).collect(),
            EigenVector::Float(v) => v.iter().map(|x| format!("{x}")).collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EigenEntry {
    pub value: EigenValue,
    pub multiplicity: usize,
    pub class: EigenClass,
    /// Basis of left eigenvectors, first nonzero entry 1.
    pub left_vectors: Vec<EigenVector>,
}

#[derive(Debug, Clone)]
pub struct EigenData {
    /// `det(x I - M)`, highest degree first.
    pub char_poly: Vec<BigInt>,
    /// Sorted by decreasing real part.
    pub entries: Vec<EigenEntry>,
    /// Set when some eigen data could only be computed in floating point.
    pub notice: Option<String>,
}

impl EigenData {
    pub fn pf(&self) -> &EigenEntry {
        self.entries.iter().find(|e| e.class == EigenClass::Pf).expect("PF entry")
    }

    pub fn of_class(&self, class: EigenClass) -> impl Iterator<Item = &EigenEntry> {
        self.entries.iter().filter(move |e| e.class == class)
    }

    /// Exact eigenvalue equal to `value`, if present.
    pub fn find_exact(&self, value: &QuadReal) -> Option<&EigenEntry> {
        self.entries.iter().find(|e| matches!(&e.value, EigenValue::Exact(q) if q == value))
    }
}

/// Faddeev-LeVerrier: all divisions are exact over the integers.
pub(crate) fn char_poly(m: &[Vec<i64>]) -> Vec<BigInt> {
    let n = m.len();
    let a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mul = |x: &[Vec<BigInt>], y: &[Vec<BigInt>]| -> Vec<Vec<BigInt>> {
        (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &x[i][k] * &y[k][j]).sum()).collect()).collect()
    };
    let mut coeffs = vec![BigInt::one()];
    let mut mk = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        let mut next = mul(&a, &mk);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += &coeffs[k - 1];
        }
        mk = next;
        let am = mul(&a, &mk);
        let tr: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        coeffs.push(-tr / BigInt::from(k as i64));
    }
    coeffs
}

pub fn render_poly(p: &[BigInt]) -> String {
    let deg = p.len() - 1;
    let mut out = String::new();
    for (k, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = deg - k;
        let sign = if c.is_negative() { "-" } else { "+" };
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let coef = if mag.is_one() && e > 0 { String::new() } else { mag.to_string() };
        out.push_str(&match e {
            0 => coef,
            1 => format!("{coef}x"),
            _ => format!("{coef}x^{e}"),
        });
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Quotient by a monic divisor, if the remainder vanishes.
fn divide_exact(p: &[BigInt], divisor: &[BigInt]) -> Option<Vec<BigInt>> {
    let dd = divisor.len() - 1;
    if p.len() <= dd {
        return None;
    }
    let mut rem = p.to_vec();
    let mut q = Vec::with_capacity(p.len() - dd);
    for k in 0..p.len() - dd {
        let c = rem[k].clone();
        for (j, dj) in divisor.iter().enumerate() {
            rem[k + j] -= &c * dj;
        }
        q.push(c);
    }
    rem[p.len() - dd..].iter().all(Zero::is_zero).then_some(q)
}

fn float_roots(p: &[BigInt]) -> Vec<(f64, f64)> {
    let deg = p.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let mut c = nalgebra::DMatrix::<f64>::zeros(deg, deg);
    for j in 0..deg {
        c[(0, j)] = -p[j + 1].to_f64().unwrap_or(f64::NAN);
    }
    for i in 1..deg {
        c[(i, i - 1)] = 1.0;
    }
    c.complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect()
}

fn eval_exact(p: &[BigInt], x: &QuadReal) -> QuadReal {
    let f = x.field();
    p.iter().fold(f.zero(), |acc, c| &(&acc * x) + &f.rational(Rational::from_integer(c.clone())))
}

fn square_free_part(v: &BigInt) -> (BigInt, BigInt) {
    // v = core * k^2 with core square-free; v > 0 and small
    let mut core = BigInt::one();
    let mut k = BigInt::one();
    let mut rest = v.clone();
    let mut q = BigInt::from(2);
    while &q * &q <= rest {
        while (&rest % (&q * &q)).is_zero() {
            rest /= &q * &q;
            k *= &q;
        }
        if (&rest % &q).is_zero() {
            rest /= &q;
            core *= &q;
        }
        q += 1;
    }
    (core * rest, k)
}

struct Root {
    value: EigenValue,
    factor: usize,
}

/// Splits the characteristic polynomial into integer linear and quadratic
/// factors found from float roots and confirmed by exact division. What is
/// left keeps float roots.
fn exact_roots(p: &[BigInt], default_field: QuadField) -> (Vec<Root>, bool) {
    let mut rest = p.to_vec();
    let mut roots = Vec::new();
    let mut factor = 0;
    let mut all_exact = true;
    'outer: while rest.len() > 1 {
        let fr = float_roots(&rest);
        for &(re, im) in &fr {
            if im.abs() > 1e-7 || !re.is_finite() {
                continue;
            }
            let r = BigInt::from(re.round() as i64);
            if (re - re.round()).abs() < 1e-6 {
                if let Some(q) = divide_exact(&rest, &[BigInt::one(), -r.clone()]) {
                    roots.push(Root { value: EigenValue::Exact(default_field.rational(Rational::from_integer(r))), factor });
                    factor += 1;
                    rest = q;
                    continue 'outer;
                }
            }
        }
        for i in 0..fr.len() {
            for j in i + 1..fr.len() {
                let (s, pr) = (fr[i].0 + fr[j].0, fr[i].0 * fr[j].0 - fr[i].1 * fr[j].1);
                if (s - s.round()).abs() > 1e-6 || (pr - pr.round()).abs() > 1e-6 {
                    continue;
                }
                let (s, pr) = (BigInt::from(s.round() as i64), BigInt::from(pr.round() as i64));
                let Some(q) = divide_exact(&rest, &[BigInt::one(), -s.clone(), pr.clone()]) else { continue };
                let disc = &s * &s - BigInt::from(4) * &pr;
                if !disc.is_positive() {
                    continue;
                }
                let (core, k) = square_free_part(&disc);
                let Some(field) = core.to_u64().and_then(|c| QuadField::new(c).ok()) else {
                    continue;
                };
                // roots (s +- k sqrt(core)) / 2
                let half = Rational::new(BigInt::one(), BigInt::from(2));
                let a = Rational::from_integer(s.clone()) * &half;
                let b = Rational::from_integer(k) * &half;
                for sign in [1, -1] {
                    let bb = if sign > 0 { b.clone() } else { -b.clone() };
                    let v = field.new_element(a.clone(), bb);
                    debug_assert!(eval_exact(p, &v).is_zero());
                    roots.push(Root { value: EigenValue::Exact(v), factor });
                }
                factor += 1;
                rest = q;
                continue 'outer;
            }
        }
        // no rational or quadratic factor left
        all_exact = false;
        for (re, im) in fr {
            let value = if im.abs() > 1e-9 { EigenValue::Complex { re, im } } else { EigenValue::Float(re) };
            roots.push(Root { value, factor });
        }
        break;
    }
    (roots, all_exact)
}

pub(crate) fn eigen_system(m: &[Vec<i64>]) -> Result<EigenData> {
    let n = m.len();
    let poly = char_poly(m);
    let (roots, mut all_exact) = exact_roots(&poly, QuadField::GOLDEN);
    // group equal roots
    let mut groups: Vec<(EigenValue, usize, usize)> = Vec::new();
    for r in roots {
        let same = |v: &EigenValue| match (v, &r.value) {
            (EigenValue::Exact(a), EigenValue::Exact(b)) => a.d() == b.d() && a == b,
            (EigenValue::Exact(_), _) | (_, EigenValue::Exact(_)) => false,
            (a, b) => (a.to_f64() - b.to_f64()).abs() < 1e-7 && (a.imag() - b.imag()).abs() < 1e-7,
        };
        match groups.iter_mut().find(|g| same(&g.0)) {
            Some(g) => g.1 += 1,
            None => groups.push((r.value, 1, r.factor)),
        }
    }
    let pf_idx = groups
        .iter()
        .enumerate()
        .filter(|(_, g)| !matches!(g.0, EigenValue::Complex { .. }))
        .max_by(|a, b| a.1 .0.to_f64().total_cmp(&b.1 .0.to_f64()))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Internal("no real eigenvalue".into()))?;
    let pf_factor = groups[pf_idx].2;
    let mut entries = Vec::with_capacity(groups.len());
    for (i, (value, multiplicity, factor)) in groups.into_iter().enumerate() {
        let class = if i == pf_idx {
            EigenClass::Pf
        } else if (value.modulus() - 1.0).abs() < 1e-9 {
            EigenClass::Unit
        } else if factor == pf_factor {
            EigenClass::PfConjugate
        } else if value.modulus() < 1.0 {
            EigenClass::ContractingNonConjugate
        } else {
            EigenClass::ExpandingOther
        };
        let left_vectors = match &value {
            EigenValue::Exact(lambda) => {
                let f = lambda.field();
                // (M^T - lambda I) v = 0
                let a: Vec<Vec<QuadReal>> = (0..n)
                    .map(|i| (0..n).map(|j| &f.int(m[j][i]) - &if i == j { lambda.clone() } else { f.zero() }).collect())
                    .collect();
                nullspace(&a).into_iter().map(|v| EigenVector::Exact(normalize_exact(v))).collect()
            }
            EigenValue::Float(lambda) => {
                let a: Vec<Vec<f64>> =
                    (0..n).map(|i| (0..n).map(|j| m[j][i] as f64 - if i == j { *lambda } else { 0.0 }).collect()).collect();
                nullspace(&a).into_iter().map(|v| EigenVector::Float(normalize_float(v))).collect()
            }
            EigenValue::Complex { .. } => Vec::new(),
        };
        if matches!(value, EigenValue::Exact(_)) && left_vectors.is_empty() {
            return Err(Error::Internal(format!("no eigenvector for {}", value.render())));
        }
        if !matches!(value, EigenValue::Exact(_)) {
            all_exact = false;
        }
        entries.push(EigenEntry { value, multiplicity, class, left_vectors });
    }
    entries.sort_by(|a, b| b.value.to_f64().total_cmp(&a.value.to_f64()));
    let notice = (!all_exact).then(|| {
        "some eigenvalues are not in a real quadratic field; they and their eigenvectors are floating point".to_string()
    });
    Ok(EigenData { char_poly: poly, entries, notice })
}

fn normalize_exact(v: Vec<QuadReal>) -> Vec<QuadReal> {
    match v.iter().find(|x| !x.is_zero()).cloned() {
        Some(p) => v.iter().map(|x| x / &p).collect(),
        None => v,
    }
}

fn normalize_float(v: Vec<f64>) -> Vec<f64> {
    match v.iter().find(|x| x.abs() > 1e-9).copied() {
        Some(p) => v.iter().map(|x| x / p).collect(),
        None => v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> Vec<BigInt> {
        c.iter().map(|&v| BigInt::from(v)).collect()
    }

    #[test]
    fn leverrier_small() {
        assert_eq!(char_poly(&[vec![1, 1], vec![1, 0]]), poly(&[1, -1, -1]));
        assert_eq!(char_poly(&[vec![2, 0, 0], vec![0, 3, 0], vec![0, 0, 5]]), poly(&[1, -10, 31, -30]));
    }

    #[test]
    fn render_polynomial() {
        assert_eq!(render_poly(&poly(&[1, -2, -3, 4, -1])), "x^4 - 2x^3 - 3x^2 + 4x - 1");
        assert_eq!(render_poly(&poly(&[-1, 0, 1])), "-x^2 + 1");
    }

    #[test]
    fn square_free() {
        assert_eq!(square_free_part(&BigInt::from(20)), (BigInt::from(5), BigInt::from(2)));
        assert_eq!(square_free_part(&BigInt::from(8)), (BigInt::from(2), BigInt::from(2)));
        assert_eq!(square_free_part(&BigInt::from(7)), (BigInt::from(7), BigInt::from(1)));
    }

    #[test]
    fn non_quadratic_falls_back_to_float() {
        // x^3 - x - 1 (plastic number) has no rational or quadratic factor
        let m = vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]];
        let e = eigen_system(&m).unwrap();
        assert!(e.notice.is_some());
        let pf = e.pf();
        assert!((pf.value.to_f64() - 1.324717957244746).abs() < 1e-9);
        assert_eq!(e.entries.iter().filter(|x| x.class == EigenClass::PfConjugate).count(), 2);
    }

    #[test]
    fn mixed_fields() {
        // block diag of the Fibonacci matrix and [[1,1],[1,1]] (x^2 - 2x)
        let m = vec![vec![1, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 1, 1], vec![0, 0, 1, 1]];
        let e = eigen_system(&m).unwrap();
        assert!(e.notice.is_none());
        let vals: Vec<f64> = e.entries.iter().map(|x| x.value.to_f64()).collect();
        assert_eq!(vals.len(), 4);
        assert_eq!(e.pf().value, EigenValue::Exact(QuadField::GOLDEN.int(2)));
    }
}
