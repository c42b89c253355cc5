//! Exact rationals and Gaussian rationals.
//!
//! Every coefficient in the engine is a [`Scalar`]: a pair of reduced
//! `BigRational`s. Equality is structural and therefore decidable.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number.
pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Rational upper bound of Euler's number, used wherever `e` enters a bound.
pub fn e_upper() -> Q {
    q_frac(1457, 536)
}

/// Parses `"p"` or `"p/q"`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Q::new(n, d))
            }
        }
        None => BigInt::from_str(s).ok().map(Q::from_integer),
    }
}

/// Renders as `"p"` or `"p/q"` in lowest terms.
pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Best rational approximation of `x` with denominator `2^bits`, rounded to nearest.
pub fn q_from_f64(x: f64, bits: u32) -> Q {
    let scale = (2f64).powi(bits as i32);
    let n = (x * scale).round();
    let num = BigInt::from(n as i128);
    Q::new(num, BigInt::one() << bits as usize)
}

/// Exact square root of a nonnegative rational, if it is a perfect square.
pub fn sqrt_q(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    if &(&n * &n) == x.numer() && &(&d * &d) == x.denom() {
        Some(Q::new(n, d))
    } else {
        None
    }
}

/// Integer part of log2 of a positive rational (floor), used for sizing.
pub fn q_bits(x: &Q) -> u64 {
    x.numer().bits().max(x.denom().bits())
}

/// Rounds `x` to the nearest multiple of `1/den`.
pub fn q_round_to(x: &Q, den: &BigInt) -> Q {
    let scaled = x * Q::from_integer(den.clone());
    let two = BigInt::from(2);
    let (fl, rem) = scaled.numer().div_mod_floor(scaled.denom());
    let n = if &rem * &two >= *scaled.denom() { fl + 1 } else { fl };
    Q::new(n, den.clone())
}

/// Exact element of Q(i).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    pub re: Q,
    pub im: Q,
}

impl Scalar {
    pub fn new(re: Q, im: Q) -> Self {
        Scalar { re, im }
    }

    pub fn real(re: Q) -> Self {
        Scalar { re, im: Q::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::real(q(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Scalar::real(q_frac(n, d))
    }

    pub fn i() -> Self {
        Scalar { re: Q::zero(), im: Q::one() }
    }

    pub fn zero() -> Self {
        Scalar::default()
    }

    pub fn one() -> Self {
        Scalar::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Scalar { re: self.re.clone(), im: -self.im.clone() }
    }

    /// |z|².
    pub fn norm_sq(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Rational upper bound of |z| (the l1 norm of the components).
    ///
    /// Submultiplicative and subadditive, so norms built from it stay
    /// direction-correct.
    pub fn abs_upper(&self) -> Q {
        self.re.abs() + self.im.abs()
    }

    /// Rational lower bound of |z|.
    pub fn abs_lower(&self) -> Q {
        self.re.abs().max(self.im.abs())
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sq();
        Some(Scalar { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Scalar::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, k: &Q) -> Self {
        Scalar { re: &self.re * k, im: &self.im * k }
    }

    /// Exact square root in Q(i), if one exists. The root with nonnegative
    /// real part (and nonnegative imaginary part when purely imaginary) is returned.
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        let modulus = sqrt_q(&self.norm_sq())?;
        let two = q(2);
        let x2 = (&modulus + &self.re) / &two;
        let y2 = (&modulus - &self.re) / &two;
        let x = sqrt_q(&x2)?;
        let mut y = sqrt_q(&y2)?;
        if self.im.is_negative() {
            y = -y;
        }
        let r = Scalar { re: x, im: y };
        debug_assert!(&(&r * &r) == self);
        Some(r)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (q_to_f64(&self.re), q_to_f64(&self.im))
    }

    /// Total order by (real, imaginary); used for deterministic root ordering.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        self.re.cmp(&other.re).then_with(|| self.im.cmp(&other.im))
    }

    /// Renders in the equation DSL (parenthesized when it has two parts).
    pub fn to_dsl(&self) -> String {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => fmt_q(&self.re),
            (true, false) => {
                if self.im.is_one() {
                    "i".to_string()
                } else {
                    format!("{}*i", fmt_q(&self.im))
                }
            }
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                let im = self.im.abs();
                if im.is_one() {
                    format!("({}{}i)", fmt_q(&self.re), sign)
                } else {
                    format!("({}{}{}*i)", fmt_q(&self.re), sign, fmt_q(&im))
                }
            }
        }
    }

    pub fn from_parts_str(re: &str, im: &str) -> Option<Self> {
        Some(Scalar { re: parse_q(re)?, im: parse_q(im)? })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => {
                if self.im.is_one() {
                    write!(f, "i")
                } else if (-&self.im).is_one() {
                    write!(f, "-i")
                } else {
                    write!(f, "{}i", self.im)
                }
            }
            (false, false) => {
                let sign = if self.im.is_negative() { '-' } else { '+' };
                write!(f, "({}{}{}i)", self.re, sign, self.im.abs())
            }
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<Q> for Scalar {
    fn from(re: Q) -> Self {
        Scalar::real(re)
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &Scalar) -> Scalar {
        Scalar { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        if self.im.is_zero() && o.im.is_zero() {
            return Scalar::real(&self.re * &o.re);
        }
        Scalar {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Div<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn div(self, o: &Scalar) -> Scalar {
        self * &o.inv().expect("division by zero scalar")
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, o: Scalar) -> Scalar {
        &self + &o
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, o: Scalar) -> Scalar {
        &self - &o
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, o: Scalar) -> Scalar {
        &self * &o
    }
}

impl Div for Scalar {
    type Output = Scalar;
    fn div(self, o: Scalar) -> Scalar {
        &self / &o
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -self.re, im: -self.im }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar { re: -&self.re, im: -&self.im }
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, o: &Scalar) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, o: &Scalar) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, o: &Scalar) {
        *self = &*self * o;
    }
}

/// Binomial coefficient as a rational.
pub fn binom(n: u32, k: u32) -> Q {
    if k > n {
        return Q::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Q::from_integer(acc)
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// Sign of a rational as -1, 0, 1.
pub fn q_sign(x: &Q) -> i32 {
    match x.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}
