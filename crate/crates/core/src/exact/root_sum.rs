use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::cyclotomic::{
    cyclotomic_polynomial, lcm_of_denominators, reduce_mod, reduce_mod_i128, CyclotomicNumber,
};
use super::rational::Rational;
use crate::error::{Error, Result};

/// Integer combination `Σ counts[j]·ζ_M^j` in the group ring `ℤ[ℤ/M]`.
///
/// This is the accumulator used in the hot loops: multiplying by a root of
/// unity is a rotation and nothing is ever reduced. The representation is not
/// canonical; compare values with [`RootSum::is_zero_value`] or convert with
/// [`RootSum::to_cyclotomic`]. Binary operations lift both sides to the lcm of
/// the orders. Overflow of a count panics.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RootSum {
    order: u64,
    counts: Vec<i128>,
}

fn overflow() -> ! {
    panic!("RootSum count overflow")
}

impl RootSum {
    pub fn zero(order: u64) -> Self {
        assert!(order >= 1, "order must be positive");
        RootSum {
            order,
            counts: vec![0; order as usize],
        }
    }

    pub fn one(order: u64) -> Self {
        Self::monomial(order, 0, 1)
    }

    /// `count·ζ_M^k`.
    pub fn monomial(order: u64, k: i64, count: i128) -> Self {
        let mut z = Self::zero(order);
        z.counts[k.rem_euclid(order as i64) as usize] = count;
        z
    }

    /// `e(x)` as a single root of unity of the given order.
    pub fn from_phase(x: &Rational, order: u64) -> Result<Self> {
        Ok(Self::monomial(order, phase_index(x, order)?, 1))
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn counts(&self) -> &[i128] {
        &self.counts
    }

    pub fn is_structurally_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn nonzero_terms(&self) -> impl Iterator<Item = (usize, i128)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(j, &c)| (j, c))
    }

    /// Same value in the group ring of order `m` (a multiple of the order).
    pub fn lift(&self, m: u64) -> Self {
        assert!(m.is_multiple_of(self.order), "order {} does not divide {m}", self.order);
        if m == self.order {
            return self.clone();
        }
        let step = (m / self.order) as usize;
        let mut out = Self::zero(m);
        for (j, c) in self.nonzero_terms() {
            out.counts[j * step] = c;
        }
        out
    }

    fn align(&mut self, other: &Self) -> Option<RootSum> {
        if self.order == other.order {
            return None;
        }
        let m = self.order.lcm(&other.order);
        if m != self.order {
            *self = self.lift(m);
        }
        (m != other.order).then(|| other.lift(m))
    }

    /// `self += mult·ζ^k·other`.
    pub fn add_rotated(&mut self, other: &Self, k: i64, mult: i128) {
        let lifted = self.align(other);
        let other = lifted.as_ref().unwrap_or(other);
        let m = self.order as usize;
        let shift = k.rem_euclid(m as i64) as usize;
        if mult == 1 {
            for (j, &c) in other.counts.iter().enumerate() {
                if c != 0 {
                    let slot = &mut self.counts[(j + shift) % m];
                    *slot = slot.checked_add(c).unwrap_or_else(|| overflow());
                }
            }
        } else if mult != 0 {
            for (j, &c) in other.counts.iter().enumerate() {
                if c != 0 {
                    let t = c.checked_mul(mult).unwrap_or_else(|| overflow());
                    let slot = &mut self.counts[(j + shift) % m];
                    *slot = slot.checked_add(t).unwrap_or_else(|| overflow());
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.add_rotated(other, 0, 1);
    }

    pub fn sub_assign(&mut self, other: &Self) {
        self.add_rotated(other, 0, -1);
    }

    /// `self += a·b` without a temporary.
    pub fn add_product(&mut self, a: &Self, b: &Self) {
        let m = self.order.lcm(&a.order).lcm(&b.order);
        if self.order != m {
            *self = self.lift(m);
        }
        let lift = |x: &'_ RootSum| -> Option<RootSum> { (x.order != m).then(|| x.lift(m)) };
        let (la, lb) = (lift(a), lift(b));
        let a = la.as_ref().unwrap_or(a);
        let b = lb.as_ref().unwrap_or(b);
        let (sparse, dense) = if a.nonzero_terms().count() <= b.nonzero_terms().count() {
            (a, b)
        } else {
            (b, a)
        };
        for (j, c) in sparse.nonzero_terms() {
            self.add_rotated(dense, j as i64, c);
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.order.lcm(&other.order));
        out.add_product(self, other);
        out
    }

    pub fn neg(&self) -> Self {
        RootSum {
            order: self.order,
            counts: self
                .counts
                .iter()
                .map(|c| c.checked_neg().unwrap_or_else(|| overflow()))
                .collect(),
        }
    }

    pub fn scale(&self, k: i128) -> Self {
        RootSum {
            order: self.order,
            counts: self
                .counts
                .iter()
                .map(|c| c.checked_mul(k).unwrap_or_else(|| overflow()))
                .collect(),
        }
    }

    /// Multiplies by `ζ^k`.
    pub fn rotate(&self, k: i64) -> Self {
        let mut out = Self::zero(self.order);
        out.add_rotated(self, k, 1);
        out
    }

    fn reduced_i128(&self) -> Option<Vec<i128>> {
        let phi = cyclotomic_polynomial(self.order);
        let mut v = self.counts.clone();
        reduce_mod_i128(&mut v, &phi)?;
        Some(v)
    }

    fn reduced_big(&self) -> Vec<BigInt> {
        let phi = cyclotomic_polynomial(self.order);
        let mut v: Vec<BigInt> = self.counts.iter().map(|&c| BigInt::from(c)).collect();
        reduce_mod(&mut v, &phi);
        v
    }

    /// Canonical value in `ℚ(ζ_M)`.
    pub fn to_cyclotomic(&self) -> CyclotomicNumber {
        let coeffs: Vec<Rational> = match self.reduced_i128() {
            Some(v) => v.into_iter().map(Rational::from_integer).collect(),
            None => self.reduced_big().into_iter().map(Rational::from).collect(),
        };
        CyclotomicNumber::from_coefficients(self.order, coeffs).expect("degree matches")
    }

    /// Whether the value (not the representation) is zero.
    pub fn is_zero_value(&self) -> bool {
        if self.is_structurally_zero() {
            return true;
        }
        vanishes(self.counts.clone(), self.order)
    }

    /// [`is_zero_value`](Self::is_zero_value) by reduction modulo `Φ_M`.
    pub fn is_zero_value_reduced(&self) -> bool {
        match self.reduced_i128() {
            Some(v) => v.iter().all(|&c| c == 0),
            None => self.reduced_big().iter().all(Zero::is_zero),
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let m = self.order as f64;
        self.nonzero_terms()
            .map(|(j, c)| {
                Complex64::from_polar(c as f64, 2.0 * std::f64::consts::PI * j as f64 / m)
            })
            .sum()
    }

    /// Writes `s·z` as a group-ring element of the given order, where `s` is
    /// the least positive integer clearing the denominators of `z`.
    pub fn from_cyclotomic(z: &CyclotomicNumber, order: u64) -> Result<(RootSum, BigInt)> {
        let lifted = z.lift(order)?;
        let scale = lcm_of_denominators(lifted.coefficients());
        let mut out = Self::zero(order);
        for (j, c) in lifted.coefficients().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let v = (c * Rational::from(scale.clone()))
                .to_integer()
                .and_then(|n| n.to_i128())
                .ok_or_else(|| Error::LimitExceeded(format!("coefficient {c} too large")))?;
            out.counts[j] = v;
        }
        Ok((out, scale))
    }
}

/// Whether `Σ c[j]·ζ_m^j = 0`, one prime `p | m` at a time. If `p² | m`,
/// `ℚ(ζ_m)` is free over `ℚ(ζ_{m/p})` on `ζ_m^i`, `i < p`, so every
/// component must vanish. Otherwise `ζ_m^j = ζ_p^u·ζ_{m/p}^w` by CRT and
/// `Σ_u ζ_p^u·B_u = 0` iff `B_u = B_0` for all `u`.
fn vanishes(c: Vec<i128>, m: u64) -> bool {
    if c.iter().all(|&x| x == 0) {
        return true;
    }
    if m == 1 {
        return false;
    }
    let p = smallest_prime_factor(m);
    let q = m / p;
    let (pu, qu) = (p as usize, q as usize);
    if q.is_multiple_of(p) {
        return (0..pu).all(|i| vanishes((0..qu).map(|k| c[i + pu * k]).collect(), q));
    }
    // 1 = s·p + t·q, so j/m = j·s/q + j·t/p
    let (s, t) = {
        let e = (p as i64).extended_gcd(&(q as i64));
        (e.x.rem_euclid(q as i64) as u64, e.y.rem_euclid(p as i64) as u64)
    };
    let mut b = vec![vec![0i128; qu]; pu];
    for (j, &x) in c.iter().enumerate() {
        if x != 0 {
            let j = j as u64;
            let slot = &mut b[(j * t % p) as usize][(j * s % q) as usize];
            *slot = slot.checked_add(x).unwrap_or_else(|| overflow());
        }
    }
    let (b0, rest) = b.split_first().expect("p ≥ 2");
    rest.iter().all(|bu| {
        let d = bu
            .iter()
            .zip(b0)
            .map(|(x, y)| x.checked_sub(*y).unwrap_or_else(|| overflow()))
            .collect();
        vanishes(d, q)
    })
}

fn smallest_prime_factor(m: u64) -> u64 {
    (2..).take_while(|d| d * d <= m).find(|d| m.is_multiple_of(*d)).unwrap_or(m)
}

/// `k` with `e(x) = ζ_M^k`, `0 <= k < M`.
pub fn phase_index(x: &Rational, order: u64) -> Result<i64> {
    if order == 0 || !order.is_multiple_of(x.denom_u64()) {
        return Err(Error::ConductorMismatch {
            value: x.to_string(),
            conductor: order,
        });
    }
    Ok((x.fract() * Rational::from(order))
        .to_i64()
        .expect("phase index fits"))
}
