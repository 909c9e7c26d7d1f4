use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{CyclotomicNumber, Rational, RootSum};

/// Scalar domain of a [`QSeries`](super::QSeries).
///
/// `zero` and `one` carry no context; the cyclotomic types use conductor 1 and
/// lift on contact with larger conductors.
pub trait Coefficient: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool {
        false
    }
    fn from_i64(n: i64) -> Self;
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn neg_ref(&self) -> Self;

    /// `self += a·b`.
    fn add_product(&mut self, a: &Self, b: &Self) {
        let p = a.mul_ref(b);
        self.add_assign_ref(&p);
    }

    /// `self -= a·b`.
    fn sub_product(&mut self, a: &Self, b: &Self) {
        let p = a.mul_ref(b);
        self.sub_assign_ref(&p);
    }
}

impl Coefficient for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn from_i64(n: i64) -> Self {
        BigInt::from(n)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl Coefficient for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn is_one(&self) -> bool {
        *self == Rational::one()
    }
    fn from_i64(n: i64) -> Self {
        Rational::from(n)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

impl Coefficient for CyclotomicNumber {
    fn zero() -> Self {
        CyclotomicNumber::zero(1)
    }
    fn one() -> Self {
        CyclotomicNumber::one(1)
    }
    fn is_zero(&self) -> bool {
        CyclotomicNumber::is_zero(self)
    }
    fn is_one(&self) -> bool {
        CyclotomicNumber::is_one(self)
    }
    fn from_i64(n: i64) -> Self {
        CyclotomicNumber::from_rational(Rational::from(n), 1)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self = &*self + other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self = &*self - other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn neg_ref(&self) -> Self {
        -self
    }
}

/// Structural comparisons only: `is_zero` means every count is zero.
impl Coefficient for RootSum {
    fn zero() -> Self {
        RootSum::zero(1)
    }
    fn one() -> Self {
        RootSum::one(1)
    }
    fn is_zero(&self) -> bool {
        self.is_structurally_zero()
    }
    fn is_one(&self) -> bool {
        self.counts()[0] == 1 && self.counts()[1..].iter().all(|&c| c == 0)
    }
    fn from_i64(n: i64) -> Self {
        RootSum::monomial(1, 0, n as i128)
    }
    fn add_assign_ref(&mut self, other: &Self) {
        RootSum::add_assign(self, other);
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        RootSum::sub_assign(self, other);
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn neg_ref(&self) -> Self {
        self.neg()
    }
    fn add_product(&mut self, a: &Self, b: &Self) {
        RootSum::add_product(self, a, b);
    }
    fn sub_product(&mut self, a: &Self, b: &Self) {
        RootSum::add_product(self, &a.neg(), b);
    }
}

/// Coefficients that can be evaluated numerically.
pub trait ToComplex {
    fn to_complex64(&self) -> Complex64;
}

impl ToComplex for BigInt {
    fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap_or(f64::NAN), 0.0)
    }
}

impl ToComplex for Rational {
    fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.to_f64(), 0.0)
    }
}

impl ToComplex for CyclotomicNumber {
    fn to_complex64(&self) -> Complex64 {
        self.to_complex(15)
    }
}

impl ToComplex for RootSum {
    fn to_complex64(&self) -> Complex64 {
        self.to_complex()
    }
}

/// Coefficients with a one-token text form for the series file format.
pub trait TextCoefficient: Coefficient + fmt::Display {
    fn parse_text(s: &str) -> Result<Self>;
}

impl TextCoefficient for BigInt {
    fn parse_text(s: &str) -> Result<Self> {
        BigInt::from_str(s.trim()).map_err(|_| Error::Parse(format!("bad integer {s:?}")))
    }
}

impl TextCoefficient for Rational {
    fn parse_text(s: &str) -> Result<Self> {
        s.parse()
    }
}

impl TextCoefficient for CyclotomicNumber {
    fn parse_text(s: &str) -> Result<Self> {
        s.parse()
    }
}
