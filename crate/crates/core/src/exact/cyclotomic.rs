use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::Rational;
use crate::error::{Error, Result};

/// The `n`-th cyclotomic polynomial, kept both dense and as its list of
/// nonzero terms. Monic of degree `φ(n)`.
#[derive(Debug)]
pub struct CyclotomicPolynomial {
    pub n: u64,
    pub degree: usize,
    pub dense: Vec<i64>,
    /// Nonzero terms strictly below the leading one.
    pub tail: Vec<(usize, i64)>,
}

fn cache() -> &'static Mutex<HashMap<u64, Arc<CyclotomicPolynomial>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<CyclotomicPolynomial>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn euler_phi(n: u64) -> u64 {
    prime_factors(n)
        .into_iter()
        .fold(n, |acc, p| acc / p * (p - 1))
}

/// Exact quotient of `num` by the monic `den`; panics if the division leaves
/// a remainder.
fn exact_div(num: &[i64], den: &[i64]) -> Vec<i64> {
    let dn = den.len() - 1;
    let mut rem: Vec<i128> = num.iter().map(|&x| x as i128).collect();
    let qlen = num.len() - dn;
    let mut q = vec![0i64; qlen];
    for k in (0..qlen).rev() {
        let c = rem[k + dn];
        if c == 0 {
            continue;
        }
        q[k] = i64::try_from(c).expect("cyclotomic coefficient overflow");
        for (j, &dj) in den.iter().enumerate() {
            rem[k + j] -= c * dj as i128;
        }
    }
    assert!(rem.iter().all(|&r| r == 0), "inexact polynomial division");
    q
}

fn substitute_power(p: &[i64], e: usize) -> Vec<i64> {
    let mut out = vec![0i64; (p.len() - 1) * e + 1];
    for (j, &c) in p.iter().enumerate() {
        out[j * e] = c;
    }
    out
}

fn compute(n: u64) -> CyclotomicPolynomial {
    let primes = prime_factors(n);
    // Φ_1 = x - 1, then Φ_{mp}(x) = Φ_m(x^p) / Φ_m(x) for p ∤ m.
    let mut poly = vec![-1i64, 1];
    for &p in &primes {
        let lifted = substitute_power(&poly, p as usize);
        poly = exact_div(&lifted, &poly);
    }
    let rad: u64 = primes.iter().product();
    let poly = substitute_power(&poly, (n / rad.max(1)) as usize);
    let degree = poly.len() - 1;
    let tail = poly[..degree]
        .iter()
        .enumerate()
        .filter(|(_, &c)| c != 0)
        .map(|(j, &c)| (j, c))
        .collect();
    CyclotomicPolynomial {
        n,
        degree,
        dense: poly,
        tail,
    }
}

/// Cached `Φ_n`.
pub fn cyclotomic_polynomial(n: u64) -> Arc<CyclotomicPolynomial> {
    assert!(n >= 1, "cyclotomic index must be positive");
    if let Some(p) = cache().lock().unwrap().get(&n) {
        return p.clone();
    }
    let p = Arc::new(compute(n));
    cache().lock().unwrap().entry(n).or_insert(p).clone()
}

pub(crate) trait ReduceScalar: Clone {
    fn is_zero_s(&self) -> bool;
    fn sub_mul_small(&mut self, c: &Self, k: i64);
}

impl ReduceScalar for BigInt {
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn sub_mul_small(&mut self, c: &Self, k: i64) {
        *self -= c * k;
    }
}

impl ReduceScalar for Rational {
    fn is_zero_s(&self) -> bool {
        self.is_zero()
    }
    fn sub_mul_small(&mut self, c: &Self, k: i64) {
        *self -= &(c * Rational::from(k));
    }
}

/// Reduces a polynomial (low degree first) modulo `Φ_n` in place.
pub(crate) fn reduce_mod<T: ReduceScalar>(v: &mut Vec<T>, phi: &CyclotomicPolynomial) {
    let deg = phi.degree;
    for k in (deg..v.len()).rev() {
        if v[k].is_zero_s() {
            continue;
        }
        let c = v[k].clone();
        for &(j, pj) in &phi.tail {
            v[k - deg + j].sub_mul_small(&c, pj);
        }
    }
    v.truncate(deg);
}

/// Checked `i128` variant of [`reduce_mod`]; `None` on overflow.
pub(crate) fn reduce_mod_i128(v: &mut Vec<i128>, phi: &CyclotomicPolynomial) -> Option<()> {
    let deg = phi.degree;
    for k in (deg..v.len()).rev() {
        let c = v[k];
        if c == 0 {
            continue;
        }
        for &(j, pj) in &phi.tail {
            let t = c.checked_mul(pj as i128)?;
            let slot = &mut v[k - deg + j];
            *slot = slot.checked_sub(t)?;
        }
    }
    v.truncate(deg);
    Some(())
}

/// Exact element of `ℚ(ζ_N)` on the power basis `1, ζ_N, …, ζ_N^{φ(N)-1}`.
///
/// Values with different conductors may be mixed freely; binary operations
/// lift both operands to the lcm of the conductors.
#[derive(Clone, Serialize, Deserialize)]
pub struct CyclotomicNumber {
    conductor: u64,
    coefficients: Vec<Rational>,
}

impl CyclotomicNumber {
    pub fn zero(conductor: u64) -> Self {
        let deg = cyclotomic_polynomial(conductor).degree;
        CyclotomicNumber {
            conductor,
            coefficients: vec![Rational::zero(); deg],
        }
    }

    pub fn one(conductor: u64) -> Self {
        Self::from_rational(Rational::one(), conductor)
    }

    pub fn from_rational(q: Rational, conductor: u64) -> Self {
        let mut z = Self::zero(conductor);
        z.coefficients[0] = q;
        z
    }

    /// Builds the element from an arbitrary polynomial in `ζ_N`, reducing
    /// modulo `Φ_N`.
    pub fn from_polynomial(conductor: u64, mut coefficients: Vec<Rational>) -> Self {
        let phi = cyclotomic_polynomial(conductor);
        if coefficients.len() < phi.degree {
            coefficients.resize(phi.degree, Rational::zero());
        }
        reduce_mod(&mut coefficients, &phi);
        CyclotomicNumber {
            conductor,
            coefficients,
        }
    }

    /// Validates an already reduced coefficient vector.
    pub fn from_coefficients(conductor: u64, coefficients: Vec<Rational>) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::InvalidArgument("conductor must be positive".into()));
        }
        let deg = cyclotomic_polynomial(conductor).degree;
        if coefficients.len() != deg {
            return Err(Error::InvalidArgument(format!(
                "conductor {conductor} needs {deg} coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(CyclotomicNumber {
            conductor,
            coefficients,
        })
    }

    /// `ζ_N^k` for any integer `k`.
    pub fn zeta_power(conductor: u64, k: i64) -> Self {
        let e = k.rem_euclid(conductor as i64) as usize;
        let mut coeffs = vec![Rational::zero(); e + 1];
        coeffs[e] = Rational::one();
        Self::from_polynomial(conductor, coeffs)
    }

    /// Exact `e(x) = exp(2πix)` inside `ℚ(ζ_N)`.
    pub fn root_of_unity(x: &Rational, conductor: u64) -> Result<Self> {
        if conductor == 0 || !conductor.is_multiple_of(x.denom_u64()) {
            return Err(Error::ConductorMismatch {
                value: x.to_string(),
                conductor,
            });
        }
        let e =(x.fract() * Rational::from(conductor))
            .to_i64()
            .expect("integral exponent");
        Ok(Self::zeta_power(conductor, e))
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.iter().all(Rational::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coefficients.first().is_some_and(|c| *c == Rational::one())
            && self.coefficients[1..].iter().all(Rational::is_zero)
    }

    /// The rational value, when the element lies in `ℚ`.
    pub fn as_rational(&self) -> Option<Rational> {
        if self.coefficients[1..].iter().all(Rational::is_zero) {
            Some(self.coefficients[0].clone())
        } else {
            None
        }
    }

    /// Re-expresses the value in `ℚ(ζ_M)` for a multiple `M` of the conductor.
    pub fn lift(&self, m: u64) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(self.conductor) {
            return Err(Error::ConductorMismatch {
                value: format!("element of conductor {}", self.conductor),
                conductor: m,
            });
        }
        if m == self.conductor {
            return Ok(self.clone());
        }
        let step = (m / self.conductor) as usize;
        let top = self
            .coefficients
            .iter()
            .rposition(|c| !c.is_zero())
            .unwrap_or(0);
        let mut v = vec![Rational::zero(); top * step + 1];
        for (j, c) in self.coefficients.iter().enumerate().take(top + 1) {
            v[j * step] = c.clone();
        }
        Ok(Self::from_polynomial(m, v))
    }

    fn lift_pair(a: &Self, b: &Self) -> (Self, Self) {
        let m = a.conductor.lcm(&b.conductor);
        (a.lift(m).unwrap(), b.lift(m).unwrap())
    }

    pub fn scale(&self, q: &Rational) -> Self {
        CyclotomicNumber {
            conductor: self.conductor,
            coefficients: self.coefficients.iter().map(|c| c * q).collect(),
        }
    }

    fn mul_same(&self, other: &Self) -> Self {
        let n = self.conductor;
        let deg = self.coefficients.len();
        let nz = |v: &[Rational]| -> Vec<usize> {
            v.iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, _)| i)
                .collect()
        };
        let ia = nz(&self.coefficients);
        let ib = nz(&other.coefficients);
        if ia.is_empty() || ib.is_empty() {
            return Self::zero(n);
        }
        let mut v = vec![Rational::zero(); 2 * deg.max(1) - 1];
        for &i in &ia {
            for &j in &ib {
                v[i + j] += &self.coefficients[i] * &other.coefficients[j];
            }
        }
        Self::from_polynomial(n, v)
    }

    /// Multiplicative inverse, `None` for zero.
    pub fn inverse(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let phi = cyclotomic_polynomial(self.conductor);
        let modulus: Vec<Rational> = phi.dense.iter().map(|&c| Rational::from(c)).collect();
        let s = poly::inverse_mod(&self.coefficients, &modulus)?;
        Some(Self::from_polynomial(self.conductor, s))
    }

    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        other.inverse().map(|inv| self * &inv)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.conductor);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Complex approximation. The result is computed in double precision, so
    /// the `10^-digits` bound can only be honoured for `digits <= 15` and
    /// coefficients of moderate size.
    pub fn to_complex(&self, digits: u32) -> Complex64 {
        debug_assert!(digits <= 15, "double precision cannot deliver {digits} digits");
        let n = self.conductor as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let angle = 2.0 * std::f64::consts::PI * (j as f64) / n;
            acc += Complex64::from_polar(c.to_f64(), angle);
        }
        acc
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coefficients == other.coefficients;
        }
        let (a, b) = Self::lift_pair(self, other);
        a.coefficients == b.coefficients
    }
}

impl Eq for CyclotomicNumber {}

impl fmt::Debug for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Text form `cyc(N)[c0,c1,...]`.
impl fmt::Display for CyclotomicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cyc({})[", self.conductor)?;
        for (i, c) in self.coefficients.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

impl FromStr for CyclotomicNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("bad cyclotomic literal {s:?}"));
        let rest = s.trim().strip_prefix("cyc(").ok_or_else(bad)?;
        let (n, rest) = rest.split_once(")[").ok_or_else(bad)?;
        let body = rest.strip_suffix(']').ok_or_else(bad)?;
        let conductor: u64 = n.trim().parse().map_err(|_| bad())?;
        let coefficients = if body.trim().is_empty() {
            Vec::new()
        } else {
            body.split(',')
                .map(str::parse)
                .collect::<Result<Vec<Rational>>>()?
        };
        Self::from_coefficients(conductor, coefficients)
    }
}

macro_rules! cyc_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl<'a, 'b> $trait<&'b CyclotomicNumber> for &'a CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: &'b CyclotomicNumber) -> CyclotomicNumber {
                let f: fn(&CyclotomicNumber, &CyclotomicNumber) -> CyclotomicNumber = $body;
                if self.conductor == rhs.conductor {
                    f(self, rhs)
                } else {
                    let (a, b) = CyclotomicNumber::lift_pair(self, rhs);
                    f(&a, &b)
                }
            }
        }
        impl $trait<CyclotomicNumber> for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
                (&self).$method(&rhs)
            }
        }
        impl<'b> $trait<&'b CyclotomicNumber> for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $method(self, rhs: &'b CyclotomicNumber) -> CyclotomicNumber {
                (&self).$method(rhs)
            }
        }
    };
}

cyc_binop!(Add, add, |a, b| CyclotomicNumber {
    conductor: a.conductor,
    coefficients: a
        .coefficients
        .iter()
        .zip(&b.coefficients)
        .map(|(x, y)| x + y)
        .collect(),
});
cyc_binop!(Sub, sub, |a, b| CyclotomicNumber {
    conductor: a.conductor,
    coefficients: a
        .coefficients
        .iter()
        .zip(&b.coefficients)
        .map(|(x, y)| x - y)
        .collect(),
});
cyc_binop!(Mul, mul, |a, b| a.mul_same(b));

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            conductor: self.conductor,
            coefficients: self.coefficients.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

/// Dense polynomial helpers over `ℚ` used for inversion.
mod poly {
    use super::Rational;

    fn trim(p: &mut Vec<Rational>) {
        while p.last().is_some_and(Rational::is_zero) {
            p.pop();
        }
    }

    fn divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead = b[db].clone();
        if r.len() < b.len() {
            return (Vec::new(), r);
        }
        let mut q = vec![Rational::zero(); r.len() - db];
        while r.len() > db && !r.is_empty() {
            let k = r.len() - 1 - db;
            let c = r.last().unwrap() / &lead;
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() {
                    r[k + j] -= &(&c * bj);
                }
            }
            q[k] = c;
            r.pop();
            trim(&mut r);
        }
        (q, r)
    }

    fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let n = a.len().max(b.len());
        let mut out: Vec<Rational> = (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_default();
                let y = b.get(i).cloned().unwrap_or_default();
                x - y
            })
            .collect();
        trim(&mut out);
        out
    }

    /// `s` with `s·a ≡ 1 (mod m)`, or `None` when `a` is not invertible.
    pub fn inverse_mod(a: &[Rational], m: &[Rational]) -> Option<Vec<Rational>> {
        let mut r0 = m.to_vec();
        let mut r1 = a.to_vec();
        trim(&mut r1);
        let mut s0: Vec<Rational> = Vec::new();
        let mut s1 = vec![Rational::one()];
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1);
            let s2 = sub(&s0, &mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        if r0.len() != 1 {
            return None;
        }
        let c = r0[0].recip();
        Some(s0.iter().map(|x| x * &c).collect())
    }
}

/// Convenience for `e(x)` in the smallest conductor that holds it.
pub fn e(x: &Rational) -> CyclotomicNumber {
    let n = x.denom_u64();
    CyclotomicNumber::root_of_unity(x, n).expect("denominator divides itself")
}

pub(crate) fn lcm_of_denominators<'a>(it: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    it.into_iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
        .abs()
}
