use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::context::CuspContext;
use super::functions::{alpha, alpha_inverse};
use super::spec::PartitionSpec;
use crate::error::{Error, Result};
use crate::exact::{e, p2, phase_index, CyclotomicNumber, Rational, RootSum, SmallFrac};
use crate::qseries::{sparse_factor_product, QSeries, SparseFactor};

fn finite(ctx: &CuspContext) -> Result<()> {
    if ctx.is_infinity() {
        Err(Error::CuspAtInfinity)
    } else {
        Ok(())
    }
}

/// `g' = g(δa + tc)/D` and `h' = g(a·b0 + b·D + t·d0·a)` for the context's
/// modulus. Pass the scaled context with `2g`, `2t` for the `(2δ, 2g)` family.
pub fn gh_primed(ctx: &CuspContext, g: i64, t: i64) -> (i64, i64) {
    let (a, b, c) = (ctx.a as i128, ctx.b as i128, ctx.c as i128);
    let (dl, bd) = (ctx.delta as i128, ctx.big_d as i128);
    let g = g as i128;
    let num = g * (dl * a + t as i128 * c);
    debug_assert_eq!(num % bd, 0);
    let gp = num / bd;
    let hp = g * (a * ctx.b0 as i128 + b * bd + t as i128 * ctx.d0 as i128 * a);
    (
        gp.try_into().expect("g' fits in 64 bits"),
        hp.try_into().expect("h' fits in 64 bits"),
    )
}

/// `μ^{(t)}_{δ,g}` at the context's cusp:
/// `δa/c·P₂(g/δ) + d0·a·D/c·P₂(g'/δ) − 2·Σ_{ν<c/D} P₁((δν+g)/(δc/D))·P₁((g'+δ²aν/D)/(δc/D))`.
pub fn mu(ctx: &CuspContext, g: i64, t: i64) -> Result<Rational> {
    finite(ctx)?;
    let (gp, _) = gh_primed(ctx, g, t);
    let dl = ctx.delta as i128;
    let (a, c, bd) = (ctx.a as i128, ctx.c as i128, ctx.big_d as i128);
    // both P1 arguments live over M = δ·c/D
    let m = dl * (c / bd);
    let step1 = dl % m;
    let step2 = (dl * (dl / bd) * a).rem_euclid(m);
    let mut r1 = (g as i128).rem_euclid(m);
    let mut r2 = (gp as i128).rem_euclid(m);
    let mut acc: i128 = 0;
    for _ in 0..c / bd {
        if r1 != 0 && r2 != 0 {
            acc += (2 * r1 - m) * (2 * r2 - m);
        }
        r1 = (r1 + step1) % m;
        r2 = (r2 + step2) % m;
    }
    // Σ P1·P1 = acc/(4M²), and the sum enters with factor −2
    let fast = || -> Option<SmallFrac> {
        let first = SmallFrac::new(dl * a, c)?.mul(SmallFrac::p2(g as i128, dl)?)?;
        let second = SmallFrac::new(ctx.d0 as i128 * a * bd, c)?.mul(SmallFrac::p2(gp as i128, dl)?)?;
        first.add(second)?.add(SmallFrac::new(-acc, 2 * m * m)?)
    };
    if let Some(v) = fast() {
        return Ok(v.to_rational());
    }
    let first = Rational::new(dl * a, c) * p2(&Rational::new(g, ctx.delta as i64));
    let second = Rational::new(ctx.d0 as i128 * a * bd, c) * p2(&Rational::new(gp, ctx.delta as i64));
    Ok(first + second + Rational::new(-acc, 2 * m * m))
}

/// Order of `F_S^{(t)}(τ) = F_S(τ + t/δ)` at the cusp:
/// `D²/(2δ)·Σ_g (ε²/2·P₂(2g(δa+tc)/(εδD)) − P₂(g(δa+tc)/(δD)))`.
pub fn ord_t_at_cusp(spec: &PartitionSpec, ctx: &CuspContext, t: i64) -> Rational {
    let dl = spec.delta() as i128;
    let (bd, eps) = (ctx.big_d as i128, ctx.epsilon as i128);
    let w = dl * ctx.a as i128 + t as i128 * ctx.c as i128;
    let fast = || -> Option<SmallFrac> {
        let half_eps2 = SmallFrac::new(eps * eps, 2)?;
        let mut sum = SmallFrac::zero();
        for &g in spec.parts() {
            let g = g as i128;
            let x = SmallFrac::p2(2 * g * w / eps, dl * bd)?;
            let y = SmallFrac::p2(g * w, dl * bd)?;
            sum = sum.add(x.mul(half_eps2)?)?.add(y.mul(SmallFrac::new(-1, 1)?)?)?;
        }
        sum.mul(SmallFrac::new(bd * bd, 2 * dl)?)
    };
    if let Some(v) = fast() {
        return v.to_rational();
    }
    let sum: Rational = spec
        .parts()
        .iter()
        .map(|&g| {
            let g = g as i128;
            let x = Rational::new(2 * g * w, eps * dl * bd);
            let y = Rational::new(g * w, dl * bd);
            p2(&x) * Rational::new(eps * eps, 2) - p2(&y)
        })
        .sum();
    sum * Rational::new(bd * bd, 2 * dl)
}

/// The leading coefficient `Z` split as `e(phase)·ratio`, where `ratio` is
/// the product of the `α` quotients.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingData {
    pub phase: Rational,
    pub ratio: CyclotomicNumber,
}

impl LeadingData {
    pub fn value(&self) -> CyclotomicNumber {
        &e(&self.phase) * &self.ratio
    }
}

/// `Z` as phase and `α` ratio. At infinity this is `e(t·ord_S/δ)`.
pub fn leading_data(spec: &PartitionSpec, ctx: &CuspContext, t: i64) -> Result<LeadingData> {
    check_modulus(spec, ctx)?;
    let dl = spec.delta() as i64;
    if ctx.is_infinity() {
        return Ok(LeadingData {
            phase: (spec.ord() * Rational::new(t, dl)).fract(),
            ratio: CyclotomicNumber::one(1),
        });
    }
    let sc = ctx.scaled();
    let eps = ctx.epsilon;
    let mut phase = Rational::zero();
    let mut ratio = CyclotomicNumber::one(1);
    for &g in spec.parts() {
        let g = g as i64;
        phase += Rational::from(t) * p2(&Rational::new(g, dl));
        phase += mu(&sc, 2 * g, 2 * t)?;
        phase -= &mu(ctx, g, t)?;
        let (gp, hp) = gh_primed(ctx, g, t);
        let (g2, h2) = gh_primed(&sc, 2 * g, 2 * t);
        debug_assert!(g2 == 4 * gp / eps && h2 == 2 * eps * hp);
        let num = alpha(2 * spec.delta(), g2, h2);
        if !num.is_one() {
            ratio = &ratio * &num;
        }
        let den = alpha_inverse(spec.delta(), gp, hp);
        if !den.is_one() {
            ratio = &ratio * &den;
        }
    }
    let ord = ord_t_at_cusp(spec, ctx, t);
    let phase = phase * Rational::new(1, 2) - Rational::new(ctx.b0, ctx.big_d) * ord;
    Ok(LeadingData {
        phase: phase.fract(),
        ratio,
    })
}

/// The first coefficient `Z_S^{(t)}(a/c)` of `F_S^{(t)}` at a finite cusp.
pub fn z_leading(spec: &PartitionSpec, ctx: &CuspContext, t: i64) -> Result<CyclotomicNumber> {
    finite(ctx)?;
    Ok(leading_data(spec, ctx, t)?.value())
}

fn check_modulus(spec: &PartitionSpec, ctx: &CuspContext) -> Result<()> {
    if spec.delta() != ctx.delta {
        return Err(Error::InvalidArgument(format!(
            "context modulus {} differs from spec modulus {}",
            ctx.delta,
            spec.delta()
        )));
    }
    Ok(())
}

/// `C^{(t)}_{δ,g}(a/c; ℓ) = ±h'/δ − D·b0·ℓ/δ²` with the branch sign supplied.
pub fn c_phase(ctx: &CuspContext, g: i64, t: i64, ell: &Rational, sign: i8) -> Rational {
    let (_, hp) = gh_primed(ctx, g, t);
    let dl = ctx.delta as i64;
    Rational::new(sign as i64 * hp, dl) - Rational::new(ctx.big_d * ctx.b0, dl * dl) * ell
}

/// Branch sign for the argument `ℓ = ε²λ/4` of `C` at a part `λ` of the
/// residue class of `g`. Errors when `λ` lies in both classes or in neither.
pub fn c_branch(ctx: &CuspContext, g: i64, t: i64, ell: &Rational) -> Result<i8> {
    let lam = ell * Rational::new(4, ctx.epsilon * ctx.epsilon);
    let lam = lam
        .to_i64()
        .ok_or_else(|| Error::InvalidArgument(format!("ℓ = {ell} is not a part of any class")))?;
    let (gp, _) = gh_primed(ctx, g, t);
    let (res, modulus) = slot_class(ctx, gp);
    let hits: Vec<i8> = [1i8, -1]
        .into_iter()
        .filter(|&s| (lam - s as i64 * res).rem_euclid(modulus) == 0)
        .collect();
    match hits.as_slice() {
        [s] => Ok(*s),
        [] => Err(Error::InvalidArgument(format!(
            "part {lam} is in neither class ±{res} mod {modulus}"
        ))),
        _ => Err(Error::AmbiguousBranch {
            ell: ell.to_string(),
            g_prime: gp,
            modulus,
        }),
    }
}

/// Residue and modulus of the parts `λ` of the `+` branch: `g'` mod `δ`
/// when `ε = 2`, `4g' + 2δ` mod `4δ` when `ε = 1`.
fn slot_class(ctx: &CuspContext, gp: i64) -> (i64, i64) {
    let dl = ctx.delta as i64;
    if ctx.epsilon == 2 {
        (gp.rem_euclid(dl), dl)
    } else {
        ((4 * gp + 2 * dl).rem_euclid(4 * dl), 4 * dl)
    }
}

/// One factor family `∏_{λ ≡ sign·residue (mod modulus)} (1 + e(C(ε²λ/4) + ε/2)·x^λ)`
/// of the twisted generating function, `x = q^{ε²D²/4δ²}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub g: i64,
    pub g_prime: i64,
    pub h_prime: i64,
    pub sign: i8,
    pub residue: i64,
    pub modulus: i64,
}

impl Slot {
    /// Least positive part of the class.
    pub fn first(&self) -> i64 {
        let r = (self.sign as i64 * self.residue).rem_euclid(self.modulus);
        if r == 0 {
            self.modulus
        } else {
            r
        }
    }

    pub fn contains(&self, lam: i64) -> bool {
        lam > 0 && (lam - self.sign as i64 * self.residue).rem_euclid(self.modulus) == 0
    }
}

/// Every `(g, sign)` pair in `S`; a self-conjugate `g'` yields two slots on
/// the same residues, matching the two factors of the product.
pub fn slots(spec: &PartitionSpec, ctx: &CuspContext, t: i64) -> Result<Vec<Slot>> {
    check_modulus(spec, ctx)?;
    let mut out = Vec::with_capacity(2 * spec.len());
    for &g in spec.parts() {
        let g = g as i64;
        let (gp, hp) = gh_primed(ctx, g, t);
        let (residue, modulus) = slot_class(ctx, gp);
        for sign in [1i8, -1] {
            out.push(Slot {
                g,
                g_prime: gp,
                h_prime: hp,
                sign,
                residue,
                modulus,
            });
        }
    }
    Ok(out)
}

/// Order of the group ring holding the twist phases: `4δ²`.
pub fn twist_order(ctx: &CuspContext) -> u64 {
    4 * ctx.delta * ctx.delta
}

/// `k` with `e(C(ε²λ/4) + ε/2) = ζ_{4δ²}^k`.
pub fn twist_index(ctx: &CuspContext, slot: &Slot, lam: i64) -> i64 {
    let dl = ctx.delta as i128;
    let eps = ctx.epsilon as i128;
    let m = 4 * dl * dl;
    let k = slot.sign as i128 * 4 * dl * slot.h_prime as i128
        - ctx.big_d as i128 * ctx.b0 as i128 * eps * eps * lam as i128
        + 2 * dl * dl * eps;
    k.rem_euclid(m) as i64
}

/// Exponent step `ε²D²/(4δ²)` of the expansion.
pub fn expansion_step(ctx: &CuspContext) -> Rational {
    let dl = ctx.delta as i64;
    Rational::new(ctx.epsilon * ctx.epsilon * ctx.big_d * ctx.big_d, 4 * dl * dl)
}

/// `W^{(t)}(a/c; n)` for `n ≤ nmax` as group-ring elements of order `4δ²`,
/// by the 0/1-knapsack over the slot factors.
pub fn twisted_series(
    spec: &PartitionSpec,
    ctx: &CuspContext,
    t: i64,
    nmax: usize,
) -> Result<Vec<RootSum>> {
    let order = twist_order(ctx);
    let mut w = vec![RootSum::zero(order); nmax + 1];
    let mut live = vec![false; nmax + 1];
    w[0] = RootSum::one(order);
    live[0] = true;
    for slot in slots(spec, ctx, t)? {
        let mut lam = slot.first();
        while lam as usize <= nmax {
            let k = twist_index(ctx, &slot, lam);
            let l = lam as usize;
            for n in (l..=nmax).rev() {
                if !live[n - l] {
                    continue;
                }
                let (lo, hi) = w.split_at_mut(n);
                hi[0].add_rotated(&lo[n - l], k, 1);
                live[n] = true;
            }
            lam += slot.modulus;
        }
    }
    Ok(w)
}

/// Sparse form of [`twisted_series`]: for each `n ≤ nmax` the nonzero
/// `(k, count)` pairs of `W(n) = Σ count·ζ_{4δ²}^k`, sorted by `k`.
pub fn twisted_series_sparse(
    spec: &PartitionSpec,
    ctx: &CuspContext,
    t: i64,
    nmax: usize,
) -> Result<Vec<Vec<(u64, i128)>>> {
    let order = twist_order(ctx) as i64;
    let mut w: Vec<BTreeMap<u64, i128>> = vec![BTreeMap::new(); nmax + 1];
    w[0].insert(0, 1);
    for slot in slots(spec, ctx, t)? {
        let mut lam = slot.first();
        while lam as usize <= nmax {
            let k = twist_index(ctx, &slot, lam);
            let l = lam as usize;
            for n in (l..=nmax).rev() {
                if w[n - l].is_empty() {
                    continue;
                }
                let (lo, hi) = w.split_at_mut(n);
                for (&j, &c) in &lo[n - l] {
                    let e = (j as i64 + k).rem_euclid(order) as u64;
                    let slot = hi[0].entry(e).or_insert(0);
                    *slot = slot.checked_add(c).expect("count overflow");
                }
                hi[0].retain(|_, c| *c != 0);
            }
            lam += slot.modulus;
        }
    }
    Ok(w.into_iter().map(|m| m.into_iter().collect()).collect())
}

/// Expansion `Z·q^{ord}·Σ_n W(n)·q^{step·n}` of `F_S^{(t)}` at a finite cusp.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspExpansion {
    pub context: CuspContext,
    pub t: i64,
    pub order: Rational,
    pub leading: CyclotomicNumber,
    pub step: Rational,
    pub w: Vec<CyclotomicNumber>,
}

impl CuspExpansion {
    /// Exponent lattice `1/L` with `L = lcm(Den ord, Den step)`.
    pub fn lattice(&self) -> u64 {
        self.order.denom_u64().lcm(&self.step.denom_u64())
    }

    pub fn series(&self) -> QSeries<CyclotomicNumber> {
        let l = self.lattice();
        let lr = Rational::from(l);
        let o = (&self.order * &lr).to_i64().expect("order fits");
        let s = (&self.step * &lr).to_i64().expect("step fits");
        let precision = o + s * self.w.len() as i64;
        QSeries::from_terms(
            l,
            precision,
            self.w
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(n, c)| (o + s * n as i64, &self.leading * c)),
        )
    }

    /// Numerical value of the truncated expansion at `τ`.
    pub fn evaluate(&self, tau: Complex64) -> Complex64 {
        let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        let x = (two_pi_i * tau * self.step.to_f64()).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut pow = Complex64::new(1.0, 0.0);
        for c in &self.w {
            if !c.is_zero() {
                acc += c.to_complex(15) * pow;
            }
            pow *= x;
        }
        acc * self.leading.to_complex(15) * (two_pi_i * tau * self.order.to_f64()).exp()
    }

    /// Coefficient of `q^m`: `Z·W((m − ord)/step)`, zero off the progression.
    pub fn coefficient(&self, m: &Rational) -> Result<CyclotomicNumber> {
        let n = (m - &self.order) / &self.step;
        if !n.is_integer() || n.is_negative() {
            return Ok(CyclotomicNumber::zero(1));
        }
        let n = n.to_i64().unwrap() as usize;
        match self.w.get(n) {
            Some(c) => Ok(&self.leading * c),
            None => Err(Error::PrecisionShortfall {
                needed: m.to_string(),
                available: (&self.order + &self.step * Rational::from(self.w.len() as u64))
                    .to_string(),
            }),
        }
    }
}

/// `W` form of the expansion with `terms` coefficients `W(0..terms)`.
pub fn expansion_at_cusp(
    spec: &PartitionSpec,
    ctx: &CuspContext,
    t: i64,
    terms: usize,
) -> Result<CuspExpansion> {
    finite(ctx)?;
    let w = if terms == 0 {
        Vec::new()
    } else {
        twisted_series(spec, ctx, t, terms - 1)?
            .iter()
            .map(RootSum::to_cyclotomic)
            .collect()
    };
    Ok(CuspExpansion {
        context: ctx.clone(),
        t,
        order: ord_t_at_cusp(spec, ctx, t),
        leading: z_leading(spec, ctx, t)?,
        step: expansion_step(ctx),
        w,
    })
}

/// Product form of the same expansion: for `ε = 2` the factors
/// `1 + e(C(λ))·q^{D²λ/δ²}`, for `ε = 1` the factors `1 − e(C(λ/4))·q^{D²λ/(4δ²)}`,
/// multiplied out with cyclotomic coefficients, times `Z·q^{ord}`.
pub fn expansion_product_form(
    spec: &PartitionSpec,
    ctx: &CuspContext,
    t: i64,
    terms: usize,
) -> Result<QSeries<CyclotomicNumber>> {
    finite(ctx)?;
    let step = expansion_step(ctx);
    let dl = ctx.delta as i64;
    let mut factors = Vec::new();
    for slot in slots(spec, ctx, t)? {
        let mut lam = slot.first();
        while (lam as usize) < terms {
            let (ell, sign) = if ctx.epsilon == 2 {
                (Rational::from(lam), 1)
            } else {
                (Rational::new(lam, 4), -1)
            };
            let c = c_phase(ctx, slot.g, t, &ell, slot.sign);
            let exponent = Rational::new(ctx.big_d * ctx.big_d * lam, dl * dl)
                * Rational::new(ctx.epsilon * ctx.epsilon, 4);
            factors.push(SparseFactor::new(e(&c), exponent, sign));
            lam += slot.modulus;
        }
    }
    let precision = &step * Rational::from(terms as u64);
    let body = sparse_factor_product(&factors, &precision);
    let ord = ord_t_at_cusp(spec, ctx, t);
    Ok(body.scale(&z_leading(spec, ctx, t)?).shift(&ord))
}

/// `Z` written in the group ring of order `lcm(8δ, Den phase)` after
/// clearing denominators: returns `(s·Z, s)` with `s` the least positive
/// integer making `s·ratio` integral.
pub fn leading_root_sum(data: &LeadingData, delta: u64) -> Result<(RootSum, BigInt)> {
    let base = 8 * delta;
    let order = base.lcm(&data.phase.denom_u64());
    let k = phase_index(&data.phase, order)?;
    if data.ratio.is_one() {
        return Ok((RootSum::monomial(order, k, 1), BigInt::from(1)));
    }
    let (ratio, scale) = RootSum::from_cyclotomic(&data.ratio, base)?;
    Ok((ratio.lift(order).rotate(k), scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::etaq::cusp_context;

    #[test]
    fn primed_example() {
        let ctx = cusp_context(1, 1, 24).unwrap();
        assert_eq!(gh_primed(&ctx, 1, 0), (24, -1));
    }

    #[test]
    fn mu_loop_length_matches_c_over_d() {
        // c/D terms: with c = 12 and δ = 8, D = 4 and three terms
        let ctx = cusp_context(5, 12, 8).unwrap();
        assert_eq!(ctx.c / ctx.big_d, 3);
        assert!(mu(&ctx, 1, 0).is_ok());
        let inf = cusp_context(1, 0, 8).unwrap();
        assert!(matches!(mu(&inf, 1, 0), Err(Error::CuspAtInfinity)));
    }

    #[test]
    fn order_at_infinity_is_ord_s() {
        let spec = PartitionSpec::new(24, [1, 5, 7, 9]).unwrap();
        let inf = cusp_context(1, 0, 24).unwrap();
        assert_eq!(ord_t_at_cusp(&spec, &inf, 0), spec.ord());
    }
}
