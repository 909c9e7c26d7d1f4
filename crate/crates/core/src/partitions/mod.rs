//! Restricted distinct-part partition counts, special partitions at a cusp,
//! and the twisted coefficient ladder `W → Y → X`.

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::etaq::{
    expansion_step, leading_data, ord_t_at_cusp, slots, twist_index, twist_order,
    twisted_series, CuspContext, PartitionSpec, Slot,
};
use crate::exact::{CyclotomicNumber, Rational, RootSum};

/// `p_S(n)` for `0 ≤ n ≤ nmax`, by the 0/1 knapsack over the allowed parts.
pub fn count_table(spec: &PartitionSpec, nmax: usize) -> Vec<BigUint> {
    let mut v = vec![BigUint::zero(); nmax + 1];
    v[0] = BigUint::from(1u32);
    for l in spec.allowed_parts(nmax as u64) {
        let l = l as usize;
        for n in (l..=nmax).rev() {
            let (lo, hi) = v.split_at_mut(n);
            if !lo[n - l].is_zero() {
                hi[0] += &lo[n - l];
            }
        }
    }
    v
}

/// `p_S(n)`: partitions of `n` into distinct parts `≡ ±g (mod δ)`, `g ∈ S`.
pub fn count_ps(spec: &PartitionSpec, n: u64) -> BigUint {
    count_table(spec, n as usize).pop().expect("nonempty table")
}

/// A part `λ` in the class of `g`, tagged with the branch sign of its factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SpecialPart {
    pub value: i64,
    pub sign: i8,
}

/// The parts attached to one `g ∈ S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpecialClass {
    pub g: i64,
    pub parts: Vec<SpecialPart>,
}

/// A collection of sets of distinct positive integers, one per `g ∈ S`,
/// satisfying the residue conditions at the cusp, with common total `n`.
///
/// When `g'` is self-conjugate both branch factors run over the same
/// residues; a value may then occur once per branch.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpecialPartition {
    pub classes: Vec<SpecialClass>,
    pub total: u64,
}

impl SpecialPartition {
    pub fn parts(&self) -> impl Iterator<Item = (i64, &SpecialPart)> {
        self.classes
            .iter()
            .flat_map(|c| c.parts.iter().map(move |p| (c.g, p)))
    }
}

/// Largest `n` accepted by the enumeration routines.
pub const ENUMERATION_LIMIT: u64 = 400;
const MAX_PARTITIONS: usize = 2_000_000;

fn items(spec: &PartitionSpec, ctx: &CuspContext, t: i64, n: u64) -> Result<Vec<(Slot, i64)>> {
    let mut out = Vec::new();
    for slot in slots(spec, ctx, t)? {
        let mut lam = slot.first();
        while lam as u64 <= n {
            out.push((slot.clone(), lam));
            lam += slot.modulus;
        }
    }
    out.sort_by_key(|(s, lam)| (s.g, *lam, s.sign));
    Ok(out)
}

fn check_limit(n: u64, limit: u64) -> Result<()> {
    if n > limit {
        return Err(Error::LimitExceeded(format!(
            "n = {n} exceeds the enumeration limit {limit}"
        )));
    }
    Ok(())
}

/// Depth-first search over the admissible parts, pruned by remaining sum.
fn dfs(
    items: &[(Slot, i64)],
    start: usize,
    remaining: i64,
    visit: &mut dyn FnMut(Option<usize>) -> Result<()>,
) -> Result<()> {
    if remaining == 0 {
        visit(None)?;
        return Ok(());
    }
    for i in start..items.len() {
        let lam = items[i].1;
        if lam > remaining {
            continue;
        }
        visit(Some(i))?;
        dfs(items, i + 1, remaining - lam, visit)?;
        visit(Some(usize::MAX - i))?;
    }
    Ok(())
}

/// All special partitions of `n` for `(ctx, t)`, ordered lexicographically by
/// `g`, then parts.
pub fn enumerate_special(
    spec: &PartitionSpec,
    ctx: &CuspContext,
    t: i64,
    n: u64,
    limit: u64,
) -> Result<Vec<SpecialPartition>> {
    check_limit(n, limit.min(ENUMERATION_LIMIT))?;
    let items = items(spec, ctx, t, n)?;
    let mut stack: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    let mut visit = |step: Option<usize>| -> Result<()> {
        match step {
            Some(i) if i < items.len() => stack.push(i),
            Some(_) => {
                stack.pop();
            }
            None => {
                if out.len() >= MAX_PARTITIONS {
                    return Err(Error::LimitExceeded(format!(
                        "more than {MAX_PARTITIONS} special partitions"
                    )));
                }
                let classes = spec
                    .parts()
                    .iter()
                    .map(|&g| SpecialClass {
                        g: g as i64,
                        parts: stack
                            .iter()
                            .filter(|&&i| items[i].0.g == g as i64)
                            .map(|&i| SpecialPart {
                                value: items[i].1,
                                sign: items[i].0.sign,
                            })
                            .collect(),
                    })
                    .collect();
                out.push(SpecialPartition { classes, total: n });
            }
        }
        Ok(())
    };
    dfs(&items, 0, n as i64, &mut visit)?;
    Ok(out)
}

/// `W^{(t)}(a/c; n)`: the sum over special partitions of `n` of
/// `e(Σ (C(ε²λ/4) + ε/2))`, accumulated during the search.
pub fn w_twisted(
    spec: &PartitionSpec,
    ctx: &CuspContext,
    t: i64,
    n: u64,
    limit: u64,
) -> Result<CyclotomicNumber> {
    check_limit(n, limit.min(ENUMERATION_LIMIT))?;
    let items = items(spec, ctx, t, n)?;
    let order = twist_order(ctx) as i64;
    let idx: Vec<i64> = items.iter().map(|(s, lam)| twist_index(ctx, s, *lam)).collect();
    let mut acc = RootSum::zero(order as u64);
    let mut phase = 0i64;
    let mut count = 0usize;
    let mut visit = |step: Option<usize>| -> Result<()> {
        match step {
            Some(i) if i < items.len() => phase = (phase + idx[i]) % order,
            Some(j) => phase = (phase - idx[usize::MAX - j]).rem_euclid(order),
            None => {
                count += 1;
                if count > MAX_PARTITIONS {
                    return Err(Error::LimitExceeded(format!(
                        "more than {MAX_PARTITIONS} special partitions"
                    )));
                }
                acc.add_assign(&RootSum::monomial(order as u64, phase, 1));
            }
        }
        Ok(())
    };
    dfs(&items, 0, n as i64, &mut visit)?;
    Ok(acc.to_cyclotomic())
}

/// Materializing counterpart of [`w_twisted`]: the phase of each listed
/// partition, summed.
pub fn w_from_partitions(ctx: &CuspContext, spec: &PartitionSpec, t: i64, parts: &[SpecialPartition]) -> Result<CyclotomicNumber> {
    let slots = slots(spec, ctx, t)?;
    let order = twist_order(ctx);
    let mut acc = RootSum::zero(order);
    for p in parts {
        let mut k = 0i64;
        for (g, part) in p.parts() {
            let slot = slots
                .iter()
                .find(|s| s.g == g && s.sign == part.sign)
                .expect("slot exists");
            k += twist_index(ctx, slot, part.value);
        }
        acc.add_assign(&RootSum::monomial(order, k, 1));
    }
    Ok(acc.to_cyclotomic())
}

/// `W(0..=nmax)` from the generating product.
pub fn w_series(
    spec: &PartitionSpec,
    ctx: &CuspContext,
    t: i64,
    nmax: usize,
) -> Result<Vec<CyclotomicNumber>> {
    Ok(twisted_series(spec, ctx, t, nmax)?
        .iter()
        .map(RootSum::to_cyclotomic)
        .collect())
}

/// Index `n = (4δ²/ε²D²)(m − ord^{(t)})` of `q^m`, if it is a nonnegative
/// integer.
pub fn w_index(spec: &PartitionSpec, ctx: &CuspContext, t: i64, m: &Rational) -> Option<u64> {
    let n = (m - ord_t_at_cusp(spec, ctx, t)) / expansion_step(ctx);
    if n.is_integer() && !n.is_negative() {
        n.to_integer().and_then(|x| x.to_u64())
    } else {
        None
    }
}

/// `Y^{(t)}(a/c; m)`, the coefficient of `q^m` in `F_S^{(t)}` at the cusp.
pub fn y_coeff(
    spec: &PartitionSpec,
    ctx: &CuspContext,
    t: i64,
    m: &Rational,
) -> Result<CyclotomicNumber> {
    let Some(n) = w_index(spec, ctx, t, m) else {
        return Ok(CyclotomicNumber::zero(1));
    };
    let w = twisted_series(spec, ctx, t, n as usize)?;
    let z = leading_data(spec, ctx, t)?.value();
    Ok(&z * &w[n as usize].to_cyclotomic())
}

/// `X_{S,R}(a/c; m) = (1/δ)·Σ_t (Σ_{r∈R} ζ_δ^{−tr})·Y^{(t)}(a/c; m)`.
pub fn x_combined(
    spec: &PartitionSpec,
    residues: &[u64],
    ctx: &CuspContext,
    m: &Rational,
) -> Result<CyclotomicNumber> {
    let ord = spec.ord();
    if !ord.is_integer() {
        return Err(Error::NotIntegral {
            what: "ord_S",
            value: ord.to_string(),
        });
    }
    let delta = spec.delta();
    let mut acc = CyclotomicNumber::zero(1);
    for t in 0..delta as i64 {
        let mut weight = RootSum::zero(delta);
        for &r in residues {
            weight.add_assign(&RootSum::monomial(delta, -t * (r % delta) as i64, 1));
        }
        if weight.is_zero_value() {
            continue;
        }
        let y = y_coeff(spec, ctx, t, m)?;
        if y.is_zero() {
            continue;
        }
        acc = &acc + &(&weight.to_cyclotomic() * &y);
    }
    Ok(acc.scale(&Rational::new(1, delta as i64)))
}

/// `p_S(n)` as a signed integer; handy when mixing with shifted indices.
pub fn count_ps_signed(spec: &PartitionSpec, n: i64) -> BigInt {
    if n < 0 {
        BigInt::zero()
    } else {
        BigInt::from(count_ps(spec, n as u64))
    }
}
