//! Truncated Laurent series in `q` on a fractional exponent lattice `(1/L)ℤ`,
//! with exact coefficients and tracked precision.

mod coefficient;
mod products;
mod text;

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use rayon::prelude::*;

pub use coefficient::{Coefficient, TextCoefficient, ToComplex};
pub use products::{
    dedekind_eta_expansion, euler_product_coefficients, pentagonal_terms, sparse_factor_product,
    sparse_factor_product_parallel, SparseFactor,
};

use crate::error::{Error, Result};
use crate::exact::{CyclotomicNumber, Rational};

/// Truncated series `Σ c_i q^{(offset+i)/L}`, valid for exponents below
/// `precision/L`.
///
/// Invariants: `coeffs.len() == precision - offset`, and the first stored
/// coefficient is nonzero unless the series is zero to its precision, in which
/// case `offset == precision` and nothing is stored.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<C> {
    lattice: u64,
    offset: i64,
    coeffs: Vec<C>,
    precision: i64,
}

impl<C: Coefficient> QSeries<C> {
    /// Builds a series from dense coefficients starting at `q^{offset/L}`.
    /// Coefficients at or beyond the precision are dropped; missing ones up to
    /// the precision are zero.
    pub fn new(lattice: u64, offset: i64, mut coeffs: Vec<C>, precision: i64) -> Self {
        assert!(lattice >= 1, "lattice denominator must be positive");
        let len = (precision - offset).max(0) as usize;
        coeffs.truncate(len);
        coeffs.resize(len, C::zero());
        let mut s = QSeries {
            lattice,
            offset: offset.min(precision),
            coeffs,
            precision,
        };
        s.normalize();
        s
    }

    pub fn zero(lattice: u64, precision: i64) -> Self {
        Self::new(lattice, precision, Vec::new(), precision)
    }

    pub fn one(lattice: u64, precision: i64) -> Self {
        Self::monomial(lattice, 0, C::one(), precision)
    }

    /// `c·q^{n/L}`.
    pub fn monomial(lattice: u64, n: i64, c: C, precision: i64) -> Self {
        Self::new(lattice, n, vec![c], precision)
    }

    /// Collects `(exponent numerator, coefficient)` pairs; repeated exponents add.
    pub fn from_terms(
        lattice: u64,
        precision: i64,
        terms: impl IntoIterator<Item = (i64, C)>,
    ) -> Self {
        let terms: Vec<(i64, C)> = terms.into_iter().filter(|(n, _)| *n < precision).collect();
        let offset = terms.iter().map(|(n, _)| *n).min().unwrap_or(precision);
        let mut coeffs = vec![C::zero(); (precision - offset) as usize];
        for (n, c) in terms {
            coeffs[(n - offset) as usize].add_assign_ref(&c);
        }
        Self::new(lattice, offset, coeffs, precision)
    }

    fn normalize(&mut self) {
        let lead = self
            .coeffs
            .iter()
            .position(|c| !c.is_zero())
            .unwrap_or(self.coeffs.len());
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.offset += lead as i64;
        }
    }

    pub fn lattice(&self) -> u64 {
        self.lattice
    }

    /// Numerator of the lowest stored exponent.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Numerator of the precision: coefficients are known below `precision/L`.
    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Precision as an exponent.
    pub fn precision_exponent(&self) -> Rational {
        Rational::new(self.precision, self.lattice as i64)
    }

    /// Leading exponent, `None` when zero to the known precision.
    pub fn valuation(&self) -> Option<Rational> {
        (!self.is_zero()).then(|| Rational::new(self.offset, self.lattice as i64))
    }

    /// Coefficient of `q^{n/L}` by exponent numerator; `None` beyond precision.
    pub fn coeff_at(&self, n: i64) -> Option<C> {
        if n >= self.precision {
            None
        } else if n < self.offset {
            Some(C::zero())
        } else {
            Some(self.coeffs[(n - self.offset) as usize].clone())
        }
    }

    /// Coefficient of `q^e`; zero off the lattice.
    pub fn coefficient(&self, e: &Rational) -> Result<C> {
        if e >= &self.precision_exponent() {
            return Err(Error::PrecisionShortfall {
                needed: e.to_string(),
                available: self.precision_exponent().to_string(),
            });
        }
        let scaled = e * Rational::from(self.lattice);
        Ok(match scaled.to_i64() {
            Some(n) => self.coeff_at(n).expect("below precision"),
            None => C::zero(),
        })
    }

    /// Nonzero `(exponent numerator, coefficient)` pairs.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.offset + i as i64, c))
    }

    /// Same series on the finer lattice `1/(k·L)`.
    pub fn lift_lattice(&self, k: u64) -> Self {
        assert!(k >= 1);
        if k == 1 {
            return self.clone();
        }
        let k_i = k as i64;
        let mut coeffs = vec![C::zero(); ((self.precision - self.offset) * k_i) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * k as usize] = c.clone();
        }
        QSeries {
            lattice: self.lattice * k,
            offset: self.offset * k_i,
            coeffs,
            precision: self.precision * k_i,
        }
    }

    /// Same series on lattice `1/L'` for a multiple `L'` of the lattice.
    pub fn with_lattice(&self, lattice: u64) -> Result<Self> {
        if !lattice.is_multiple_of(self.lattice) {
            return Err(Error::InvalidArgument(format!(
                "lattice 1/{} does not refine 1/{}",
                lattice, self.lattice
            )));
        }
        Ok(self.lift_lattice(lattice / self.lattice))
    }

    fn aligned(a: &Self, b: &Self) -> (Self, Self) {
        let l = a.lattice.lcm(&b.lattice);
        (a.lift_lattice(l / a.lattice), b.lift_lattice(l / b.lattice))
    }

    /// Drops everything at or above `q^{precision/L}`.
    pub fn truncate(&self, precision: i64) -> Self {
        if precision >= self.precision {
            return self.clone();
        }
        Self::new(self.lattice, self.offset, self.coeffs.clone(), precision)
    }

    fn add_sub(&self, other: &Self, subtract: bool) -> Self {
        if self.lattice != other.lattice {
            let (a, b) = Self::aligned(self, other);
            return a.add_sub(&b, subtract);
        }
        let precision = self.precision.min(other.precision);
        let offset = self.offset.min(other.offset).min(precision);
        let mut coeffs = vec![C::zero(); (precision - offset) as usize];
        for (n, c) in self.terms() {
            if n < precision {
                coeffs[(n - offset) as usize].add_assign_ref(c);
            }
        }
        for (n, c) in other.terms() {
            if n < precision {
                let slot = &mut coeffs[(n - offset) as usize];
                if subtract {
                    slot.sub_assign_ref(c);
                } else {
                    slot.add_assign_ref(c);
                }
            }
        }
        Self::new(self.lattice, offset, coeffs, precision)
    }

    /// Product; the precision is `min(prec_a + off_b, prec_b + off_a)`.
    pub fn mul_series(&self, other: &Self) -> Self {
        if self.lattice != other.lattice {
            let (a, b) = Self::aligned(self, other);
            return a.mul_series(&b);
        }
        let offset = self.offset + other.offset;
        let precision = (self.precision + other.offset).min(other.precision + self.offset);
        let len = (precision - offset).max(0) as usize;
        let (a, b) = (&self.coeffs, &other.coeffs);
        let cell = |i: usize| {
            let mut acc = C::zero();
            let lo = i.saturating_sub(b.len().saturating_sub(1));
            for j in lo..=i.min(a.len().saturating_sub(1)) {
                if j < a.len() && i - j < b.len() && !a[j].is_zero() && !b[i - j].is_zero() {
                    acc.add_product(&a[j], &b[i - j]);
                }
            }
            acc
        };
        let coeffs: Vec<C> = if len * a.len().min(b.len()) > 1 << 16 {
            (0..len).into_par_iter().map(cell).collect()
        } else {
            (0..len).map(cell).collect()
        };
        Self::new(self.lattice, offset, coeffs, precision)
    }

    pub fn scale(&self, c: &C) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x.mul_ref(c)).collect();
        Self::new(self.lattice, self.offset, coeffs, self.precision)
    }

    /// Multiplies by `q^e`.
    pub fn shift(&self, e: &Rational) -> Self {
        let l = self.lattice.lcm(&e.denom_u64());
        let s = self.lift_lattice(l / self.lattice);
        let k = (e * Rational::from(l)).to_i64().expect("shift fits");
        QSeries {
            lattice: l,
            offset: s.offset + k,
            coeffs: s.coeffs,
            precision: s.precision + k,
        }
    }

    /// Keeps the coefficients of `q^n` with `n ≡ r (mod T)`.
    pub fn sieve(&self, modulus: u64, residue: i64) -> Result<Self> {
        if self.lattice != 1 {
            return Err(Error::Lattice {
                lattice: self.lattice,
            });
        }
        let m = modulus as i64;
        let r = residue.rem_euclid(m);
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if (self.offset + i as i64).rem_euclid(m) == r {
                    c.clone()
                } else {
                    C::zero()
                }
            })
            .collect();
        Ok(Self::new(1, self.offset, coeffs, self.precision))
    }

    /// `f(τ) ↦ f(kτ)`: every exponent is multiplied by `k`.
    pub fn rescale_argument(&self, k: u64) -> Self {
        let s = self.lift_lattice(k);
        QSeries {
            lattice: self.lattice,
            offset: s.offset,
            coeffs: s.coeffs,
            precision: s.precision,
        }
    }

    /// For a series on `ℤ`, returns `Σ_j a_{kj+r} Q^j`.
    pub fn decimate(&self, k: u64, residue: i64) -> Result<Self> {
        if self.lattice != 1 {
            return Err(Error::Lattice {
                lattice: self.lattice,
            });
        }
        let k_i = k as i64;
        let r = residue.rem_euclid(k_i);
        let precision = Integer::div_ceil(&(self.precision - r), &k_i);
        let offset = Integer::div_ceil(&(self.offset - r), &k_i).min(precision);
        let coeffs = (offset..precision)
            .map(|j| self.coeff_at(j * k_i + r).expect("below precision"))
            .collect();
        Ok(Self::new(1, offset, coeffs, precision))
    }

    /// Inverse of [`decimate`](Self::decimate): `Q^j ↦ q^{kj+r}`.
    pub fn inflate(&self, k: u64, residue: i64) -> Result<Self> {
        if self.lattice != 1 {
            return Err(Error::Lattice {
                lattice: self.lattice,
            });
        }
        let r = residue.rem_euclid(k as i64);
        let s = self.rescale_argument(k);
        let precision = s.precision + r;
        Ok(Self::new(1, s.offset + r, s.coeffs, precision))
    }

    /// Multiplies in place by `∏(1 + sign·c·q^e)`.
    pub fn mul_sparse_factors(&mut self, factors: &[SparseFactor<C>]) {
        let l = factors
            .iter()
            .fold(self.lattice, |acc, f| acc.lcm(&f.exponent.denom_u64()));
        if l != self.lattice {
            *self = self.lift_lattice(l / self.lattice);
        }
        for f in factors {
            let k = (&f.exponent * Rational::from(l))
                .to_i64()
                .expect("factor exponent fits");
            assert!(k > 0, "factor exponents must be positive");
            products::apply_factor(&mut self.coeffs, k as usize, &f.coefficient, f.sign);
        }
        self.normalize();
    }

    /// Multiplies in place by `1 + Σ sign·q^{e/L}` over the given terms,
    /// sorted by ascending `e > 0`.
    pub fn mul_signed_sparse(&mut self, terms: &[(usize, i8)]) {
        assert!(
            terms.first().is_none_or(|t| t.0 > 0) && terms.windows(2).all(|w| w[0].0 < w[1].0),
            "terms must have ascending positive exponents"
        );
        let v = &mut self.coeffs;
        for n in (0..v.len()).rev() {
            let (lo, hi) = v.split_at_mut(n);
            for &(e, sign) in terms {
                if e > n {
                    break;
                }
                let src = &lo[n - e];
                if src.is_zero() {
                    continue;
                }
                if sign > 0 {
                    hi[0].add_assign_ref(src);
                } else {
                    hi[0].sub_assign_ref(src);
                }
            }
        }
        self.normalize();
    }

    /// Multiplies in place by `∏_{n≥1}(1 - q^{stride·n/L})^power`, one
    /// pentagonal-number series at a time.
    pub fn mul_euler_power(&mut self, stride: usize, power: u64) {
        let terms = pentagonal_terms(stride, self.coeffs.len());
        for _ in 0..power {
            self.mul_signed_sparse(&terms);
        }
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> QSeries<D> {
        QSeries::new(
            self.lattice,
            self.offset,
            self.coeffs.iter().map(f).collect(),
            self.precision,
        )
    }
}

impl<C: Coefficient + ToComplex> QSeries<C> {
    /// Numerical value of the truncated sum at `q = e(τ)`.
    pub fn evaluate_at(&self, tau: Complex64) -> Complex64 {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let l = self.lattice as f64;
        self.terms()
            .map(|(n, c)| c.to_complex64() * (two_pi_i * tau * (n as f64 / l)).exp())
            .sum()
    }
}

impl QSeries<CyclotomicNumber> {
    /// `f(τ) ↦ f(τ + s)`: the coefficient of `q^e` picks up `e(e·s)`.
    pub fn shift_argument(&self, s: &Rational) -> Self {
        let l = self.lattice as i64;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.is_zero() {
                    return c.clone();
                }
                let e = Rational::new(self.offset + i as i64, l) * s;
                c * &crate::exact::e(&e)
            })
            .collect();
        QSeries::new(self.lattice, self.offset, coeffs, self.precision)
    }
}

impl QSeries<BigInt> {
    pub fn to_cyclotomic(&self) -> QSeries<CyclotomicNumber> {
        self.map(|c| CyclotomicNumber::from_rational(Rational::from(c.clone()), 1))
    }
}

/// `a ± b` or `a·b` on series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Sub,
    Mul,
}

pub fn series_arith<C: Coefficient>(a: &QSeries<C>, b: &QSeries<C>, op: SeriesOp) -> QSeries<C> {
    match op {
        SeriesOp::Add => a.add_sub(b, false),
        SeriesOp::Sub => a.add_sub(b, true),
        SeriesOp::Mul => a.mul_series(b),
    }
}

impl<C: Coefficient> Add for &QSeries<C> {
    type Output = QSeries<C>;
    fn add(self, rhs: &QSeries<C>) -> QSeries<C> {
        self.add_sub(rhs, false)
    }
}

impl<C: Coefficient> Sub for &QSeries<C> {
    type Output = QSeries<C>;
    fn sub(self, rhs: &QSeries<C>) -> QSeries<C> {
        self.add_sub(rhs, true)
    }
}

impl<C: Coefficient> Mul for &QSeries<C> {
    type Output = QSeries<C>;
    fn mul(self, rhs: &QSeries<C>) -> QSeries<C> {
        self.mul_series(rhs)
    }
}

impl<C: Coefficient> Neg for &QSeries<C> {
    type Output = QSeries<C>;
    fn neg(self) -> QSeries<C> {
        self.map(|c| c.neg_ref())
    }
}
