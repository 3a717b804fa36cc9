//! Exact scalars: big rationals and the ordered field `Q(sqrt 2)`.
//!
//! Every table entry, payoff, probability and LP coefficient in the crate is
//! one of these two types. Nothing is ever rounded; the only place decimals
//! appear is [`QuadExt::approx`], which is display-only.
//!
//! The textual form understood by [`parse_scalar`] and produced by the
//! `Display` impl is
//!
//! ```text
//! scalar   := rational | decimal | rational ("+" | "-") rational "*sqrt2"
//! rational := ["-"] digits ["/" digits]
//! decimal  := ["-"] digits "." digits
//! ```
//!
//! Decimals are read exactly (`0.30602` is `15301/50000`).

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Builds the rational `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Operations the exact simplex and the linear-algebra helpers need from a
/// scalar. Implemented for [`Rational`] and [`QuadExt`].
pub trait Scalar:
    Clone
    + Ord
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn from_rational(r: Rational) -> Self;

    fn mul_ref(&self, other: &Self) -> Self;

    fn div_ref(&self, other: &Self) -> Self;

    /// `self -= a * b`
    fn sub_mul(&mut self, a: &Self, b: &Self);

    fn add_ref(&mut self, other: &Self);

    fn is_negative(&self) -> bool {
        *self < Self::zero()
    }

    fn is_positive(&self) -> bool {
        *self > Self::zero()
    }
}

impl Scalar for Rational {
    fn from_rational(r: Rational) -> Self {
        r
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }

    fn sub_mul(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self -= a * b;
    }

    fn add_ref(&mut self, other: &Self) {
        *self += other;
    }
}

/// `rat + root2 * sqrt(2)` with rational coordinates.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadExt {
    rat: Rational,
    root2: Rational,
}

impl QuadExt {
    pub fn new(rat: Rational, root2: Rational) -> Self {
        QuadExt { rat, root2 }
    }

    pub fn from_rational(r: Rational) -> Self {
        QuadExt {
            rat: r,
            root2: Rational::zero(),
        }
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_rational(Rational::from_integer(BigInt::from(n)))
    }

    /// The rational `num/den`.
    pub fn ratio(num: i64, den: i64) -> Self {
        Self::from_rational(rat(num, den))
    }

    pub fn sqrt2() -> Self {
        QuadExt {
            rat: Rational::zero(),
            root2: Rational::one(),
        }
    }

    pub fn rat_part(&self) -> &Rational {
        &self.rat
    }

    pub fn root2_part(&self) -> &Rational {
        &self.root2
    }

    pub fn is_rational(&self) -> bool {
        self.root2.is_zero()
    }

    /// Exact sign of the embedded real number.
    pub fn signum(&self) -> Ordering {
        let a = self.rat.cmp(&Rational::zero());
        let b = self.root2.cmp(&Rational::zero());
        match (a, b) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (sa, sb) if sa == sb => sa,
            (sa, _) => {
                // Opposite signs: the term with the larger square wins.
                let a2 = &self.rat * &self.rat;
                let b2 = &self.root2 * &self.root2 * Rational::from_integer(BigInt::from(2));
                match a2.cmp(&b2) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `a - b sqrt2`
    pub fn conjugate(&self) -> Self {
        QuadExt {
            rat: self.rat.clone(),
            root2: -self.root2.clone(),
        }
    }

    /// `a^2 - 2 b^2`, the field norm.
    pub fn norm(&self) -> Rational {
        &self.rat * &self.rat - &self.root2 * &self.root2 * Rational::from_integer(BigInt::from(2))
    }

    pub fn recip(&self) -> Self {
        let n = self.norm();
        assert!(!n.is_zero(), "division by zero in Q(sqrt2)");
        QuadExt {
            rat: &self.rat / &n,
            root2: -(&self.root2 / &n),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.rat.to_f64().unwrap_or(f64::NAN)
            + self.root2.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2
    }

    /// Decimal rendering rounded to `digits` places after the point.
    pub fn approx(&self, digits: usize) -> String {
        let scale = BigInt::from(10u32).pow(digits as u32);
        let guard = BigInt::from(10u32).pow(digits as u32 + 24);
        let root2_scaled = (BigInt::from(2) * &guard * &guard).sqrt();
        let value = Rational::from_integer(&scale * &guard) * &self.rat
            + Rational::from_integer(&scale * root2_scaled) * &self.root2;
        let value = value / Rational::from_integer(guard);
        let rounded = value.round().to_integer();
        format_fixed(&rounded, digits)
    }

    fn approx_cmp_key(&self) -> f64 {
        self.to_f64()
    }
}

fn format_fixed(n: &BigInt, digits: usize) -> String {
    let negative = n.sign() == Sign::Minus;
    let s = n.abs().to_string();
    let body = if digits == 0 {
        s
    } else if s.len() <= digits {
        format!("0.{}{}", "0".repeat(digits - s.len()), s)
    } else {
        let (int, frac) = s.split_at(s.len() - digits);
        format!("{int}.{frac}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

impl PartialOrd for QuadExt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadExt {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.root2 == other.root2 {
            return self.rat.cmp(&other.rat);
        }
        (self - other).signum()
    }
}

impl fmt::Debug for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (~{:.6})", self, self.approx_cmp_key())
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.root2.is_zero() {
            return write!(f, "{}", self.rat);
        }
        let sign = if Signed::is_negative(&self.root2) {
            '-'
        } else {
            '+'
        };
        write!(f, "{}{}{}*sqrt2", self.rat, sign, self.root2.abs())
    }
}

impl FromStr for QuadExt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_scalar(s)
    }
}

/// Parses a scalar literal. See the module docs for the grammar.
pub fn parse_scalar(text: &str) -> Result<QuadExt, Error> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::parse(text, "empty scalar"));
    }
    let Some(head) = text.strip_suffix("*sqrt2") else {
        return parse_rational(text).map(QuadExt::from_rational);
    };
    // Split "R1 (+|-) R2" at the first sign after position 0.
    let split = head
        .char_indices()
        .skip(1)
        .find(|&(_, c)| c == '+' || c == '-')
        .map(|(i, _)| i);
    let (rat_text, coeff_text, negate) = match split {
        Some(i) => (&head[..i], &head[i + 1..], head.as_bytes()[i] == b'-'),
        None => ("0", head, false),
    };
    let rat_part = parse_rational(rat_text)?;
    if coeff_text.starts_with(['+', '-']) && split.is_some() {
        return Err(Error::parse(coeff_text, "doubled sign"));
    }
    let mut coeff = parse_rational(coeff_text)?;
    if negate {
        coeff = -coeff;
    }
    Ok(QuadExt::new(rat_part, coeff))
}

/// Parses `[-]digits[/digits]` or `[-]digits.digits` exactly.
pub fn parse_rational(token: &str) -> Result<Rational, Error> {
    let (negative, body) = match token.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, token),
    };
    let digits = |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    let value = if let Some((num, den)) = body.split_once('/') {
        if !digits(num) || !digits(den) {
            return Err(Error::parse(token, "malformed rational"));
        }
        let den: BigInt = den.parse().expect("digits");
        if den.is_zero() {
            return Err(Error::parse(token, "zero denominator"));
        }
        Rational::new(num.parse().expect("digits"), den)
    } else if let Some((int, frac)) = body.split_once('.') {
        if !digits(int) || !digits(frac) {
            return Err(Error::parse(token, "malformed decimal"));
        }
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let whole: BigInt = format!("{int}{frac}").parse().expect("digits");
        Rational::new(whole, scale)
    } else {
        if !digits(body) {
            return Err(Error::parse(token, "malformed number"));
        }
        Rational::from_integer(body.parse().expect("digits"))
    };
    Ok(if negative { -value } else { value })
}

/// Exact comparison of the embedded reals.
pub fn compare(x: &QuadExt, y: &QuadExt) -> Ordering {
    x.cmp(y)
}

impl Serialize for QuadExt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadExt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

impl Zero for QuadExt {
    fn zero() -> Self {
        QuadExt::default()
    }

    fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.root2.is_zero()
    }
}

impl One for QuadExt {
    fn one() -> Self {
        QuadExt::from_integer(1)
    }
}

impl From<Rational> for QuadExt {
    fn from(r: Rational) -> Self {
        QuadExt::from_rational(r)
    }
}

impl From<i64> for QuadExt {
    fn from(n: i64) -> Self {
        QuadExt::from_integer(n)
    }
}

impl Neg for QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        QuadExt {
            rat: -self.rat,
            root2: -self.root2,
        }
    }
}

impl Neg for &QuadExt {
    type Output = QuadExt;
    fn neg(self) -> QuadExt {
        -self.clone()
    }
}

impl<'a> Add<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn add(self, o: &QuadExt) -> QuadExt {
        QuadExt {
            rat: &self.rat + &o.rat,
            root2: &self.root2 + &o.root2,
        }
    }
}

impl<'a> Sub<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn sub(self, o: &QuadExt) -> QuadExt {
        QuadExt {
            rat: &self.rat - &o.rat,
            root2: &self.root2 - &o.root2,
        }
    }
}

impl<'a> Mul<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn mul(self, o: &QuadExt) -> QuadExt {
        if self.root2.is_zero() && o.root2.is_zero() {
            return QuadExt::from_rational(&self.rat * &o.rat);
        }
        let two = Rational::from_integer(BigInt::from(2));
        QuadExt {
            rat: &self.rat * &o.rat + &self.root2 * &o.root2 * two,
            root2: &self.rat * &o.root2 + &self.root2 * &o.rat,
        }
    }
}

impl<'a> Div<&'a QuadExt> for &'a QuadExt {
    type Output = QuadExt;
    fn div(self, o: &QuadExt) -> QuadExt {
        if o.root2.is_zero() {
            assert!(!o.rat.is_zero(), "division by zero in Q(sqrt2)");
            return QuadExt {
                rat: &self.rat / &o.rat,
                root2: &self.root2 / &o.rat,
            };
        }
        self * &o.recip()
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, o: QuadExt) -> QuadExt { (&self).$m(&o) }
        }
        impl<'a> $tr<&'a QuadExt> for QuadExt {
            type Output = QuadExt;
            fn $m(self, o: &QuadExt) -> QuadExt { (&self).$m(o) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&QuadExt> for QuadExt {
    fn add_assign(&mut self, o: &QuadExt) {
        self.rat += &o.rat;
        self.root2 += &o.root2;
    }
}

impl AddAssign for QuadExt {
    fn add_assign(&mut self, o: QuadExt) {
        *self += &o;
    }
}

impl SubAssign<&QuadExt> for QuadExt {
    fn sub_assign(&mut self, o: &QuadExt) {
        self.rat -= &o.rat;
        self.root2 -= &o.root2;
    }
}

impl Sum for QuadExt {
    fn sum<I: Iterator<Item = QuadExt>>(iter: I) -> QuadExt {
        iter.fold(QuadExt::zero(), |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl<'a> Sum<&'a QuadExt> for QuadExt {
    fn sum<I: Iterator<Item = &'a QuadExt>>(iter: I) -> QuadExt {
        iter.fold(QuadExt::zero(), |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl Scalar for QuadExt {
    fn from_rational(r: Rational) -> Self {
        QuadExt::from_rational(r)
    }

    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }

    fn div_ref(&self, other: &Self) -> Self {
        self / other
    }

    fn sub_mul(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self -= &(a * b);
    }

    fn add_ref(&mut self, other: &Self) {
        *self += other;
    }
}

/// Least common multiple of the denominators of both coordinates; handy when
/// scaling a row of scalars to integers.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}
