use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;

use super::spec::PartitionSpec;
use crate::exact::{e, p1, p2, CyclotomicNumber, Rational};
use crate::qseries::{sparse_factor_product, QSeries, SparseFactor};

/// `α_δ(g, h)`: `(1 − ζ_δ^{−h})·e(P₁(h/δ)/2)` when `g ≡ 0` and `h ≢ 0 (mod δ)`,
/// and 1 otherwise.
pub fn alpha(delta: u64, g: i64, h: i64) -> CyclotomicNumber {
    let d = delta as i64;
    if g.rem_euclid(d) != 0 || h.rem_euclid(d) == 0 {
        return CyclotomicNumber::one(1);
    }
    let one = CyclotomicNumber::one(1);
    let zeta = CyclotomicNumber::zeta_power(delta, -h);
    let phase = e(&(p1(&Rational::new(h, d)) * Rational::new(1, 2)));
    &(&one - &zeta) * &phase
}

/// `1/α_δ(g, h)`, cached by `(δ, h mod δ)`.
pub(crate) fn alpha_inverse(delta: u64, g: i64, h: i64) -> CyclotomicNumber {
    let d = delta as i64;
    if g.rem_euclid(d) != 0 || h.rem_euclid(d) == 0 {
        return CyclotomicNumber::one(1);
    }
    static CACHE: OnceLock<Mutex<HashMap<(u64, i64), CyclotomicNumber>>> = OnceLock::new();
    let key = (delta, h.rem_euclid(d));
    let cache = CACHE.get_or_init(Default::default);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return v.clone();
    }
    let inv = alpha(delta, 0, key.1)
        .inverse()
        .expect("alpha is a nonzero algebraic number");
    cache.lock().unwrap().insert(key, inv.clone());
    inv
}

/// `η^{(s)}_{g,h}(τ) = α_δ(g,h)·q^{P₂(g/δ)/2}·∏_{m ≡ g}(1 − ζ_δ^h q^{m/δ})·∏_{m ≡ −g}(1 − ζ_δ^{−h} q^{m/δ})`
/// over positive `m`, valid below `q^precision`.
pub fn eta_generalized_expansion(
    delta: u64,
    g: i64,
    h: i64,
    precision: &Rational,
) -> QSeries<CyclotomicNumber> {
    let d = delta as i64;
    let lead = p2(&Rational::new(g, d)) * Rational::new(1, 2);
    let room = precision - &lead;
    let bound = (&room * Rational::from(d)).ceil();
    let bound: i64 = bound.try_into().unwrap_or(0);
    let mut factors = Vec::new();
    for m in 1..bound.max(1) {
        for (res, tw) in [(g, h), (-g, -h)] {
            if (m - res).rem_euclid(d) == 0 {
                factors.push(SparseFactor::new(
                    CyclotomicNumber::zeta_power(delta, tw),
                    Rational::new(m, d),
                    -1,
                ));
            }
        }
    }
    let body = sparse_factor_product(&factors, &room.max_with_zero());
    body.scale(&alpha(delta, g, h)).shift(&lead)
}

/// `η_{δ,g}(τ) = q^{δP₂(g/δ)/2}·∏_{ℓ ≡ ±g (mod δ)}(1 − q^ℓ)`, valid below
/// `q^precision`. Both residue products are taken, so `η_{δ,0} = η(δτ)²`.
pub fn eta_delta_g_expansion(delta: u64, g: u64, precision: &Rational) -> QSeries<BigInt> {
    let d = delta as i64;
    let g = (g % delta) as i64;
    let lead = p2(&Rational::new(g, d)) * Rational::from(d) * Rational::new(1, 2);
    let room = (precision - &lead).max_with_zero();
    let bound: i64 = room.ceil().try_into().unwrap_or(0);
    let mut factors = Vec::new();
    for l in 1..bound.max(1) {
        for res in [g, -g] {
            if (l - res).rem_euclid(d) == 0 {
                factors.push(SparseFactor::minus(Rational::from(l)));
            }
        }
    }
    sparse_factor_product(&factors, &room).shift(&lead)
}

/// `F_S(scale·τ) = q^{scale·ord_S}·∏_{ℓ ≡ ±g}(1 + q^{scale·ℓ})`, valid below
/// `q^precision`.
pub fn f_s_expansion(spec: &PartitionSpec, scale: u64, precision: &Rational) -> QSeries<BigInt> {
    let lead = spec.ord() * Rational::from(scale);
    let room = (precision - &lead).max_with_zero();
    let bound: u64 = (&room * Rational::new(1, scale as i64))
        .ceil()
        .try_into()
        .unwrap_or(0);
    let factors: Vec<SparseFactor<BigInt>> = spec
        .allowed_parts(bound.saturating_sub(1))
        .into_iter()
        .map(|l| SparseFactor::plus(Rational::from(l * scale)))
        .collect();
    sparse_factor_product(&factors, &room).shift(&lead)
}

trait MaxWithZero {
    fn max_with_zero(&self) -> Rational;
}

impl MaxWithZero for Rational {
    fn max_with_zero(&self) -> Rational {
        if self.is_negative() {
            Rational::zero()
        } else {
            self.clone()
        }
    }
}
