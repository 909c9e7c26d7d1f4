use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use super::{Coefficient, QSeries};
use crate::exact::Rational;

/// One factor `1 + sign·coefficient·q^exponent`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseFactor<C> {
    pub coefficient: C,
    pub exponent: Rational,
    pub sign: i8,
}

impl<C: Coefficient> SparseFactor<C> {
    pub fn new(coefficient: C, exponent: Rational, sign: i8) -> Self {
        assert!(sign == 1 || sign == -1, "sign must be ±1");
        SparseFactor {
            coefficient,
            exponent,
            sign,
        }
    }

    /// `1 + q^e`.
    pub fn plus(exponent: Rational) -> Self {
        Self::new(C::one(), exponent, 1)
    }

    /// `1 - q^e`.
    pub fn minus(exponent: Rational) -> Self {
        Self::new(C::one(), exponent, -1)
    }
}

/// `v ← v·(1 + sign·c·x^k)` on a dense truncated coefficient vector.
pub(crate) fn apply_factor<C: Coefficient>(v: &mut [C], k: usize, c: &C, sign: i8) {
    if k >= v.len() {
        return;
    }
    let unit = c.is_one();
    for n in (k..v.len()).rev() {
        let (lo, hi) = v.split_at_mut(n);
        let src = &lo[n - k];
        if src.is_zero() {
            continue;
        }
        match (unit, sign > 0) {
            (true, true) => hi[0].add_assign_ref(src),
            (true, false) => hi[0].sub_assign_ref(src),
            (false, true) => hi[0].add_product(c, src),
            (false, false) => hi[0].sub_product(c, src),
        }
    }
}

fn common_lattice<C>(factors: &[SparseFactor<C>], precision: &Rational) -> u64 {
    factors
        .iter()
        .fold(precision.denom_u64(), |acc, f| acc.lcm(&f.exponent.denom_u64()))
}

/// `∏ (1 + sign·c·q^e)` truncated below `q^precision`, one factor at a time.
pub fn sparse_factor_product<C: Coefficient>(
    factors: &[SparseFactor<C>],
    precision: &Rational,
) -> QSeries<C> {
    let l = common_lattice(factors, precision);
    product_on_lattice(factors, precision, l)
}

fn product_on_lattice<C: Coefficient>(
    factors: &[SparseFactor<C>],
    precision: &Rational,
    l: u64,
) -> QSeries<C> {
    let p = (precision * Rational::from(l))
        .to_i64()
        .expect("precision on lattice");
    if p <= 0 {
        return QSeries::zero(l, p);
    }
    let mut v = vec![C::zero(); p as usize];
    v[0] = C::one();
    for f in factors {
        assert!(f.exponent.is_positive(), "factor exponents must be positive");
        let k = (&f.exponent * Rational::from(l)).to_i64().unwrap() as usize;
        apply_factor(&mut v, k, &f.coefficient, f.sign);
    }
    QSeries::new(l, 0, v, p)
}

/// Same product, with the factor list split into `chunks` groups evaluated in
/// parallel and merged by series multiplication. Exact, so bit-identical to
/// [`sparse_factor_product`].
pub fn sparse_factor_product_parallel<C: Coefficient>(
    factors: &[SparseFactor<C>],
    precision: &Rational,
    chunks: usize,
) -> QSeries<C> {
    let l = common_lattice(factors, precision);
    let chunks = chunks.max(1);
    if chunks == 1 || factors.len() < 2 {
        return product_on_lattice(factors, precision, l);
    }
    let size = factors.len().div_ceil(chunks);
    let parts: Vec<QSeries<C>> = factors
        .par_chunks(size)
        .map(|c| product_on_lattice(c, precision, l))
        .collect();
    parts
        .into_iter()
        .reduce(|a, b| a.mul_series(&b))
        .unwrap_or_else(|| QSeries::one(l, (precision * Rational::from(l)).to_i64().unwrap()))
}

/// Coefficients of `∏_{n≥1}(1 - x^n)` below `x^len`, by the pentagonal number
/// theorem.
pub fn euler_product_coefficients(len: usize) -> Vec<i64> {
    let mut v = vec![0i64; len];
    if len == 0 {
        return v;
    }
    v[0] = 1;
    for k in 1i64.. {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let a = (k * (3 * k - 1) / 2) as usize;
        let b = (k * (3 * k + 1) / 2) as usize;
        if a >= len {
            break;
        }
        v[a] += sign;
        if b < len {
            v[b] += sign;
        }
    }
    v
}

/// Nonconstant terms `(stride·e, ±1)` of `∏(1 - x^{stride·n})` with
/// `stride·e < len`.
pub fn pentagonal_terms(stride: usize, len: usize) -> Vec<(usize, i8)> {
    let mut out = Vec::new();
    for k in 1usize.. {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let a = stride * (k * (3 * k - 1) / 2);
        if a >= len {
            break;
        }
        out.push((a, sign));
        let b = stride * (k * (3 * k + 1) / 2);
        if b < len {
            out.push((b, sign));
        }
    }
    out
}

/// `η(scale·τ)^power` with exact integer coefficients below `q^precision`.
pub fn dedekind_eta_expansion(scale: u64, power: u64, precision: &Rational) -> QSeries<BigInt> {
    let lead = Rational::new((scale * power) as i64, 24);
    let l = lead.denom_u64().lcm(&precision.denom_u64());
    let p = (precision * Rational::from(l)).to_i64().expect("precision fits");
    let room = precision - &lead;
    if !room.is_positive() {
        return QSeries::zero(l, p);
    }
    // terms x^j with lead + scale·j < precision
    let jmax = (room / Rational::from(scale)).ceil().to_usize().unwrap();
    let base: Vec<BigInt> = euler_product_coefficients(jmax)
        .into_iter()
        .map(BigInt::from)
        .collect();
    let base = QSeries::new(1, 0, base, jmax as i64);
    let mut acc = QSeries::one(1, jmax as i64);
    let mut sq = base;
    let mut e = power;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul_series(&sq);
        }
        e >>= 1;
        if e > 0 {
            sq = sq.mul_series(&sq);
        }
    }
    let lead_num = (&lead * Rational::from(l)).to_i64().unwrap();
    let step = (scale * l) as i64;
    let terms = acc
        .terms()
        .map(|(j, c)| (lead_num + step * j, c.clone()))
        .collect::<Vec<_>>();
    QSeries::from_terms(l, p, terms)
}
