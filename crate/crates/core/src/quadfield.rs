//! Exact arithmetic in a real quadratic field `Q(sqrt(D))`.
//!
//! Every coordinate of the golden-mean lattices used in this crate lives in
//! `Q(sqrt(5))`, and all predicates (window membership, ordering, patch
//! equality) are decided here without rounding. A value carries its field
//! parameter `D`; mixing two fields is an error.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Reduced arbitrary-precision rational, denominator always positive.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mismatched quadratic fields: sqrt({0}) vs sqrt({1})")]
    MismatchedField(u32, u32),
    #[error("field parameter {0} is not a square-free integer greater than 1")]
    InvalidParameter(u64),
    #[error("cannot parse {input:?} as a quadratic number: {reason}")]
    Parse { input: String, reason: String },
}

/// The field `Q(sqrt(d))`, used as a factory for its elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadField {
    d: u32,
}

impl QuadField {
    /// `Q(sqrt(5))`, home of the golden mean.
    pub const GOLDEN: QuadField = QuadField { d: 5 };

    pub fn new(d: u64) -> Result<Self, FieldError> {
        if d < 2 || d > u32::MAX as u64 || !is_square_free(d) {
            return Err(FieldError::InvalidParameter(d));
        }
        Ok(QuadField { d: d as u32 })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn zero(&self) -> QuadReal {
        self.int(0)
    }

    pub fn one(&self) -> QuadReal {
        self.int(1)
    }

    pub fn int(&self, v: i64) -> QuadReal {
        QuadReal::from_parts(Rational::from_integer(v.into()), Rational::zero(), self.d)
    }

    pub fn ratio(&self, num: i64, den: i64) -> QuadReal {
        assert!(den != 0, "zero denominator");
        QuadReal::from_parts(Rational::new(num.into(), den.into()), Rational::zero(), self.d)
    }

    pub fn rational(&self, q: Rational) -> QuadReal {
        QuadReal::from_parts(q, Rational::zero(), self.d)
    }

    /// `a + b*sqrt(D)`.
    pub fn new_element(&self, a: Rational, b: Rational) -> QuadReal {
        QuadReal::from_parts(a, b, self.d)
    }

    pub fn sqrt_d(&self) -> QuadReal {
        QuadReal::from_parts(Rational::zero(), Rational::one(), self.d)
    }

    /// The golden mean `(1 + sqrt(5))/2`. Only defined in `Q(sqrt(5))`.
    pub fn phi(&self) -> QuadReal {
        assert_eq!(self.d, 5, "the golden mean lives in Q(sqrt(5))");
        let half = Rational::new(1.into(), 2.into());
        QuadReal::from_parts(half.clone(), half, 5)
    }

    /// Parses `"p/q + r/s*sqrt(D)"` and its shorthands (`"3"`, `"-1/2"`,
    /// `"sqrt(5)"`, `"1/2 - 3*sqrt(5)"`).
    pub fn parse(&self, s: &str) -> Result<QuadReal, FieldError> {
        let v = parse_quad(s, Some(self.d))?;
        Ok(v)
    }
}

fn is_square_free(d: u64) -> bool {
    let mut p = 2u64;
    while p * p <= d {
        if d.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// An element `a + b*sqrt(D)` of a real quadratic field.
#[derive(Clone)]
pub struct QuadReal {
    a: Rational,
    b: Rational,
    d: u32,
}

impl QuadReal {
    fn from_parts(a: Rational, b: Rational, d: u32) -> Self {
        QuadReal { a, b, d }
    }

    pub fn field(&self) -> QuadField {
        QuadField { d: self.d }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    /// Rational part.
    pub fn a(&self) -> &Rational {
        &self.a
    }

    /// Coefficient of `sqrt(D)`.
    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Returns the value as an integer when it is exactly one.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.b.is_zero() && self.a.is_integer() {
            Some(self.a.to_integer())
        } else {
            None
        }
    }

    fn check(&self, other: &QuadReal) -> Result<(), FieldError> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(FieldError::MismatchedField(self.d, other.d))
        }
    }

    pub fn checked_add(&self, other: &QuadReal) -> Result<QuadReal, FieldError> {
        self.check(other)?;
        Ok(QuadReal::from_parts(&self.a + &other.a, &self.b + &other.b, self.d))
    }

    pub fn checked_sub(&self, other: &QuadReal) -> Result<QuadReal, FieldError> {
        self.check(other)?;
        Ok(QuadReal::from_parts(&self.a - &other.a, &self.b - &other.b, self.d))
    }

    pub fn checked_mul(&self, other: &QuadReal) -> Result<QuadReal, FieldError> {
        self.check(other)?;
        let d = Rational::from_integer(self.d.into());
        let a = &self.a * &other.a + &self.b * &other.b * d;
        let b = &self.a * &other.b + &self.b * &other.a;
        Ok(QuadReal::from_parts(a, b, self.d))
    }

    pub fn checked_div(&self, other: &QuadReal) -> Result<QuadReal, FieldError> {
        self.check(other)?;
        let inv = other.inverse()?;
        self.checked_mul(&inv)
    }

    /// Field norm `a^2 - D b^2`, nonzero for every nonzero element.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * Rational::from_integer(self.d.into())
    }

    /// Galois conjugate trace `2a`.
    pub fn trace(&self) -> Rational {
        &self.a + &self.a
    }

    pub fn inverse(&self) -> Result<QuadReal, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.norm();
        Ok(QuadReal::from_parts(&self.a / &n, -&self.b / &n, self.d))
    }

    /// The Galois automorphism `a + b*sqrt(D) -> a - b*sqrt(D)`.
    pub fn conjugate(&self) -> QuadReal {
        QuadReal::from_parts(self.a.clone(), -&self.b, self.d)
    }

    /// Exact sign of the real number `a + b*sqrt(D)`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        match (sa, sb) {
            (s, Ordering::Equal) => s,
            (Ordering::Equal, s) => s,
            (x, y) if x == y => x,
            (sa, _) => {
                // opposite signs: compare a^2 with D b^2
                let a2 = &self.a * &self.a;
                let b2d = &self.b * &self.b * Rational::from_integer(self.d.into());
                match sa {
                    Ordering::Greater => a2.cmp(&b2d),
                    _ => b2d.cmp(&a2),
                }
            }
        }
    }

    /// Sign as `-1`, `0` or `+1`.
    pub fn exact_sign(&self) -> i8 {
        match self.signum() {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(&self) -> QuadReal {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// Float embedding. For display and plotting only.
    pub fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        a + b * (self.d as f64).sqrt()
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        let approx = self.to_f64();
        let mut k: BigInt = if approx.is_finite() {
            BigInt::from(approx.floor() as i64)
        } else {
            // fall back to the rational bound |b|*sqrt(D) <= |b|*(isqrt(D)+1)
            let r = BigInt::from((self.d as f64).sqrt() as i64 + 1);
            let bound = self.b.abs() * Rational::from_integer(r);
            (&self.a - bound).floor().to_integer()
        };
        let field = self.field();
        loop {
            let kq = field.rational(Rational::from_integer(k.clone()));
            if (self - &kq).signum() == Ordering::Less {
                k -= 1;
                continue;
            }
            let k1 = field.rational(Rational::from_integer(&k + 1));
            if (self - &k1).signum() != Ordering::Less {
                k += 1;
                continue;
            }
            return k;
        }
    }

    /// `self - floor(self)`, in `[0, 1)`.
    pub fn fract(&self) -> QuadReal {
        let k = self.floor();
        self - &self.field().rational(Rational::from_integer(k))
    }

    pub fn pow(&self, e: i32) -> QuadReal {
        let base = if e < 0 {
            self.inverse().expect("negative power of zero")
        } else {
            self.clone()
        };
        let mut out = self.field().one();
        for _ in 0..e.unsigned_abs() {
            out = &out * &base;
        }
        out
    }

    pub fn min(self, other: QuadReal) -> QuadReal {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: QuadReal) -> QuadReal {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialEq for QuadReal {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.a == other.a && self.b == other.b
    }
}

impl Eq for QuadReal {}

impl Hash for QuadReal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        self.d.hash(state);
    }
}

impl PartialOrd for QuadReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order of the real embedding. Panics on mixed fields.
impl Ord for QuadReal {
    fn cmp(&self, other: &Self) -> Ordering {
        self.checked_sub(other).expect("mixed-field comparison").signum()
    }
}

macro_rules! forward_binop {
    ($Tr:ident, $m:ident, $checked:ident) => {
        impl<'a> $Tr<&'a QuadReal> for &'a QuadReal {
            type Output = QuadReal;
            fn $m(self, rhs: &'a QuadReal) -> QuadReal {
                match self.$checked(rhs) {
                    Ok(v) => v,
                    Err(e) => panic!("{}", e),
                }
            }
        }
        impl $Tr<QuadReal> for QuadReal {
            type Output = QuadReal;
            fn $m(self, rhs: QuadReal) -> QuadReal {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $Tr<&'a QuadReal> for QuadReal {
            type Output = QuadReal;
            fn $m(self, rhs: &'a QuadReal) -> QuadReal {
                (&self).$m(rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);
forward_binop!(Div, div, checked_div);

impl Neg for QuadReal {
    type Output = QuadReal;
    fn neg(self) -> QuadReal {
        QuadReal::from_parts(-self.a, -self.b, self.d)
    }
}

impl Neg for &QuadReal {
    type Output = QuadReal;
    fn neg(self) -> QuadReal {
        QuadReal::from_parts(-&self.a, -&self.b, self.d)
    }
}

impl fmt::Debug for QuadReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadReal({self})")
    }
}

/// Canonical text form `p/q + r/s*sqrt(D)`, with shorthands for zero parts.
impl fmt::Display for QuadReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.d;
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let coeff = |q: &Rational| -> String {
            if q.is_one() {
                format!("sqrt({d})")
            } else {
                format!("{q}*sqrt({d})")
            }
        };
        if self.a.is_zero() {
            if self.b.is_negative() {
                return write!(f, "-{}", coeff(&-&self.b));
            }
            return write!(f, "{}", coeff(&self.b));
        }
        if self.b.is_negative() {
            write!(f, "{} - {}", self.a, coeff(&-&self.b))
        } else {
            write!(f, "{} + {}", self.a, coeff(&self.b))
        }
    }
}

fn parse_err(input: &str, reason: impl Into<String>) -> FieldError {
    FieldError::Parse {
        input: input.to_string(),
        reason: reason.into(),
    }
}

fn parse_rational(input: &str, s: &str) -> Result<Rational, FieldError> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num = BigInt::from_str(num).map_err(|_| parse_err(input, format!("bad integer {num:?}")))?;
    let den = BigInt::from_str(den).map_err(|_| parse_err(input, format!("bad integer {den:?}")))?;
    if den.is_zero() {
        return Err(parse_err(input, "zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Parses a quadratic number. `expected_d` pins the field; without it the
/// field is read from the `sqrt(..)` term (rationals then need a default).
pub(crate) fn parse_quad(input: &str, expected_d: Option<u32>) -> Result<QuadReal, FieldError> {
    let compact: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(parse_err(input, "empty"));
    }
    // split into signed terms at top-level '+'/'-' (never inside parentheses)
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut depth = 0i32;
    let mut current = String::new();
    let mut negative = false;
    for (i, ch) in compact.chars().enumerate() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth -= 1;
                current.push(ch);
            }
            '+' | '-' if depth == 0 && !current.ends_with('/') && !current.ends_with('*') => {
                if i > 0 || !current.is_empty() {
                    if current.is_empty() {
                        return Err(parse_err(input, "dangling sign"));
                    }
                    terms.push((negative, std::mem::take(&mut current)));
                }
                negative = ch == '-';
            }
            _ => current.push(ch),
        }
    }
    if current.is_empty() {
        return Err(parse_err(input, "dangling sign"));
    }
    terms.push((negative, current));

    let mut a = Rational::zero();
    let mut b = Rational::zero();
    let mut d_seen: Option<u32> = None;
    for (neg, term) in terms {
        let sign = if neg { -Rational::one() } else { Rational::one() };
        if let Some(pos) = term.find("sqrt(") {
            if !term.ends_with(')') {
                return Err(parse_err(input, "unterminated sqrt"));
            }
            let inner = &term[pos + 5..term.len() - 1];
            let d: u32 = inner
                .parse()
                .map_err(|_| parse_err(input, format!("bad radicand {inner:?}")))?;
            if let Some(prev) = d_seen {
                if prev != d {
                    return Err(FieldError::MismatchedField(prev, d));
                }
            }
            d_seen = Some(d);
            let head = &term[..pos];
            let coeff = if head.is_empty() {
                Rational::one()
            } else if let Some(c) = head.strip_suffix('*') {
                parse_rational(input, c)?
            } else {
                return Err(parse_err(input, "expected '*' before sqrt"));
            };
            b += sign * coeff;
        } else {
            a += sign * parse_rational(input, &term)?;
        }
    }
    let d = match (expected_d, d_seen) {
        (Some(e), Some(s)) if e != s => return Err(FieldError::MismatchedField(e, s)),
        (Some(e), _) => e,
        (None, Some(s)) => s,
        (None, None) => return Err(parse_err(input, "no field parameter for a rational literal")),
    };
    QuadField::new(d as u64)?;
    Ok(QuadReal::from_parts(a, b, d))
}

/// Greatest common divisor helper used by callers that build common
/// denominators.
pub(crate) fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    a.lcm(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f() -> QuadField {
        QuadField::GOLDEN
    }

    #[test]
    fn golden_mean_minimal_polynomial() {
        let phi = f().phi();
        assert_eq!(&phi * &phi, &phi + &f().one());
    }

    #[test]
    fn additive_identity() {
        let x = f().parse("3/7 - 2/5*sqrt(5)").unwrap();
        assert_eq!(&x + &f().zero(), x);
    }

    #[test]
    fn inverse_of_phi_is_phi_minus_one() {
        let phi = f().phi();
        let lhs = &phi - &f().one();
        let rhs = f().one().checked_div(&phi).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn conjugation() {
        let phi = f().phi();
        let c = phi.conjugate();
        assert_eq!(c, &f().one() - &phi);
        assert_eq!(c, -(f().one().checked_div(&phi).unwrap()));
        let q = f().ratio(-5, 3);
        assert_eq!(q.conjugate(), q);
        let x = f().parse("1/3 + 7*sqrt(5)").unwrap();
        assert_eq!(x.conjugate().conjugate(), x);
    }

    #[test]
    fn signs() {
        assert_eq!(f().parse("sqrt(5) - 2").unwrap().exact_sign(), 1);
        assert_eq!(f().zero().exact_sign(), 0);
        assert_eq!((&f().one() - &f().phi()).exact_sign(), -1);
        assert_eq!(f().parse("9/4 - sqrt(5)").unwrap().exact_sign(), 1);
        assert_eq!(f().parse("-9/4 + sqrt(5)").unwrap().exact_sign(), -1);
    }

    #[test]
    fn division_by_zero_and_mixed_fields() {
        assert_eq!(f().one().checked_div(&f().zero()), Err(FieldError::DivisionByZero));
        let two = QuadField::new(2).unwrap();
        assert_eq!(
            f().one().checked_add(&two.one()),
            Err(FieldError::MismatchedField(5, 2))
        );
        assert!(QuadField::new(8).is_err());
        assert!(QuadField::new(1).is_err());
    }

    #[test]
    fn text_round_trip_and_shorthand() {
        for s in ["3", "-1/2", "sqrt(5)", "-sqrt(5)", "1/2 + 1/2*sqrt(5)", "1/2 - 3*sqrt(5)", "-2/3*sqrt(5)"] {
            let v = f().parse(s).unwrap();
            assert_eq!(v.to_string(), s);
            assert_eq!(f().parse(&v.to_string()).unwrap(), v);
        }
        assert_eq!(f().parse(" 1 + 1 ").unwrap(), f().int(2));
        assert_eq!(f().parse("2*sqrt(5) - 1/2*sqrt(5)").unwrap().to_string(), "3/2*sqrt(5)");
        assert!(f().parse("1 + sqrt(3)").is_err());
        assert!(f().parse("1 +").is_err());
        assert!(f().parse("abc").is_err());
        assert!(f().parse("1/0").is_err());
    }

    #[test]
    fn floor_and_fract() {
        let phi = f().phi();
        assert_eq!(phi.floor(), BigInt::from(1));
        assert_eq!((-phi.clone()).floor(), BigInt::from(-2));
        assert_eq!(f().int(3).floor(), BigInt::from(3));
        assert_eq!(phi.fract(), &phi - &f().one());
        let big = phi.pow(80);
        let fr = big.fract();
        assert!(fr >= f().zero() && fr < f().one());
    }

    #[test]
    fn large_powers_stay_exact() {
        let phi = f().phi();
        let p = phi.pow(40);
        let q = phi.pow(-40);
        assert_eq!(&p * &q, f().one());
        // phi^n + (-1/phi)^n is the Lucas number L_40
        let lucas = &p + &phi.conjugate().pow(40);
        assert_eq!(lucas.to_integer(), Some(BigInt::from(228826127u64)));
    }

    fn small_quad() -> impl Strategy<Value = QuadReal> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20).prop_map(|(p, q, r, s)| {
            f().new_element(Rational::new(p.into(), q.into()), Rational::new(r.into(), s.into()))
        })
    }

    proptest! {
        #[test]
        fn field_axioms(x in small_quad(), y in small_quad(), z in small_quad()) {
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            if !x.is_zero() {
                prop_assert_eq!(&x * &x.inverse().unwrap(), f().one());
            }
        }

        #[test]
        fn conjugation_is_ring_homomorphism(x in small_quad(), y in small_quad()) {
            prop_assert_eq!((&x * &y).conjugate(), &x.conjugate() * &y.conjugate());
            prop_assert_eq!((&x + &y).conjugate(), &x.conjugate() + &y.conjugate());
        }

        #[test]
        fn sign_agrees_with_float(x in small_quad()) {
            let v = x.to_f64();
            if v.abs() > 1e-6 {
                prop_assert_eq!(x.exact_sign(), if v > 0.0 { 1 } else { -1 });
            }
        }

        #[test]
        fn order_compatible_with_addition(x in small_quad(), y in small_quad(), z in small_quad()) {
            prop_assert_eq!(x.cmp(&y), (&x + &z).cmp(&(&y + &z)));
            if z.exact_sign() > 0 {
                prop_assert_eq!(x.cmp(&y), (&x * &z).cmp(&(&y * &z)));
            }
        }

        #[test]
        fn text_round_trip(x in small_quad()) {
            prop_assert_eq!(f().parse(&x.to_string()).unwrap(), x);
        }
    }
}
