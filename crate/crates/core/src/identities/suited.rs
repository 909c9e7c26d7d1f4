use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::PathBuf;

use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde_json::json;

use super::certificate::{Certificate, Checkpoint, Verdict, Witness};
use super::cusps::cusp_representatives;
use super::problem::{gamma_level, IdentityProblem};
use crate::error::{Error, Result};
use crate::etaq::{
    cusp_context, expansion_step, leading_data, leading_root_sum, ord_t_at_cusp, twisted_series_sparse,
    CuspContext, PartitionSpec,
};
use crate::exact::{prime_factors, Rational, RootSum};
use crate::partitions::{count_table, x_combined};

/// Cusps processed between checkpoints.
pub const CUSP_CHUNK: usize = 32;
const JOB: &str = "suited";

/// Where a long run records progress, keyed by the config text.
#[derive(Clone, Debug)]
pub struct CheckpointSpec {
    pub dir: PathBuf,
    pub config_text: String,
}

/// `{ord^{(t)}_{S_i'}(a/c) + step·n < 0 : n ≥ 0, 0 ≤ t < δ', i = 1, 2}`.
pub fn principal_exponent_set(problem: &IdentityProblem, ctx: &CuspContext) -> BTreeSet<Rational> {
    exponents(problem, ctx, false)
}

fn exponents(problem: &IdentityProblem, ctx: &CuspContext, with_zero: bool) -> BTreeSet<Rational> {
    let step = expansion_step(ctx);
    let mut out = BTreeSet::new();
    for spec in [&problem.spec1_scaled, &problem.spec2_scaled] {
        for t in 0..problem.delta_scaled as i64 {
            let mut m = ord_t_at_cusp(spec, ctx, t);
            while m.is_negative() || (with_zero && m.is_zero()) {
                out.insert(m.clone());
                m += &step;
            }
        }
    }
    out
}

struct Contribution {
    sign: i128,
    ord: Rational,
    weight: Vec<(u64, i128)>,
    w: Vec<Vec<(u64, i128)>>,
    z: Vec<(u64, i128)>,
    z_order: u64,
    scale: i128,
}

fn contributions(
    spec: &PartitionSpec,
    sign: i128,
    residues: &[u64],
    ctx: &CuspContext,
    out: &mut Vec<Contribution>,
) -> Result<()> {
    let dp = spec.delta();
    let step = expansion_step(ctx);
    for t in 0..dp as i64 {
        let ord = ord_t_at_cusp(spec, ctx, t);
        if ord.is_positive() {
            continue;
        }
        let mut weight = RootSum::zero(dp);
        for &r in residues {
            weight.add_assign(&RootSum::monomial(dp, -t * r as i64, 1));
        }
        if weight.is_zero_value() {
            continue;
        }
        let nmax = (-ord.clone() / &step).floor().to_usize().expect("index fits");
        let w = twisted_series_sparse(spec, ctx, t, nmax)?;
        let (z, scale) = leading_root_sum(&leading_data(spec, ctx, t)?, dp)?;
        let scale = scale
            .to_i128()
            .ok_or_else(|| Error::LimitExceeded("leading denominator too large".into()))?;
        out.push(Contribution {
            sign,
            ord,
            weight: weight.nonzero_terms().map(|(i, c)| (i as u64, c)).collect(),
            w,
            z_order: z.order(),
            z: z.nonzero_terms().map(|(i, c)| (i as u64, c)).collect(),
            scale,
        });
    }
    Ok(())
}

fn mul_count(a: i128, b: i128) -> i128 {
    a.checked_mul(b).expect("count overflow")
}

/// Compares `X_{S₁',R'}` and `X_{S₂',R'}` at every `m ≤ 0` at one cusp.
///
/// Each `X` is a sum of products `weight·W·Z` of roots of unity, whose
/// exponents are collected modulo `M_b`, the common order. With
/// `M_s = lcm(M₀, rad M_b)`, `ℚ(ζ_{M_b})` is free over `ℚ(ζ_{M_s})` on
/// `ζ_{M_b}^j`, `j < M_b/M_s`, so the difference vanishes iff each of its
/// `j`-components, a group-ring element of order `M_s`, does.
pub fn compare_at_cusp(problem: &IdentityProblem, a: i64, c: i64) -> Result<Option<Witness>> {
    let dp = problem.delta_scaled;
    let ctx = cusp_context(a, c, dp)?;
    let residues = &problem.residues_scaled;
    let mut parts = Vec::new();
    contributions(&problem.spec1_scaled, 1, residues, &ctx, &mut parts)?;
    contributions(&problem.spec2_scaled, -1, residues, &ctx, &mut parts)?;
    if parts.is_empty() {
        return Ok(None);
    }
    let m0 = (4 * dp * dp).lcm(&(8 * dp));
    let mb = parts.iter().fold(m0, |acc, p| acc.lcm(&p.z_order));
    let rad: u64 = prime_factors(mb).iter().product();
    let ms = m0.lcm(&rad);
    let k = mb / ms;
    let common = parts.iter().fold(1i128, |acc, p| acc.lcm(&p.scale));
    let step = expansion_step(&ctx);
    let (fw, fk) = ((mb / dp) as u128, (mb / (4 * dp * dp)) as u128);
    let mut diff: BTreeMap<Rational, HashMap<u64, i128>> = BTreeMap::new();
    for p in &parts {
        let mult = p.sign * (common / p.scale);
        let fz = (mb / p.z_order) as u128;
        for (n, wn) in p.w.iter().enumerate() {
            if wn.is_empty() {
                continue;
            }
            let m = &p.ord + &step * Rational::from(n as u64);
            let acc = diff.entry(m).or_default();
            for &(iw, cw) in &p.weight {
                for &(ik, ck) in wn {
                    let base = iw as u128 * fw + ik as u128 * fk;
                    let c1 = mul_count(mul_count(cw, ck), mult);
                    for &(iz, cz) in &p.z {
                        let e = ((base + iz as u128 * fz) % mb as u128) as u64;
                        let slot = acc.entry(e).or_insert(0);
                        *slot = slot.checked_add(mul_count(c1, cz)).expect("count overflow");
                    }
                }
            }
        }
    }
    for (m, acc) in diff {
        let mut buckets: BTreeMap<u64, RootSum> = BTreeMap::new();
        for (e, cnt) in acc {
            if cnt != 0 {
                buckets
                    .entry(e % k)
                    .or_insert_with(|| RootSum::zero(ms))
                    .add_assign(&RootSum::monomial(ms, (e / k) as i64, cnt));
            }
        }
        if buckets.values().all(RootSum::is_zero_value) {
            continue;
        }
        let x1 = x_combined(&problem.spec1_scaled, residues, &ctx, &m)?;
        let x2 = x_combined(&problem.spec2_scaled, residues, &ctx, &m)?;
        if x1 == x2 {
            return Err(Error::Internal(format!(
                "bucket comparison and direct evaluation disagree at ({a}, {c}), m = {m}"
            )));
        }
        return Ok(Some(Witness::Cusp { a, c, m, x1, x2 }));
    }
    Ok(None)
}

fn parameters(problem: &IdentityProblem, level: u64, cusps: usize) -> serde_json::Value {
    json!({
        "delta": problem.delta(),
        "s1": problem.spec1.parts(),
        "s2": problem.spec2.parts(),
        "residues": problem.residues,
        "H": problem.h,
        "v": problem.v,
        "delta_scaled": problem.delta_scaled,
        "residues_scaled": problem.residues_scaled,
        "level": level,
        "cusps": cusps,
    })
}

/// Decides suitedness over all cusps of `Γ₁(gamma_level)`, or the given
/// subset.
pub fn check_suited(problem: &IdentityProblem, cusps: Option<&[(i64, i64)]>) -> Result<Certificate> {
    check_suited_with(problem, cusps, None)
}

/// [`check_suited`] with checkpoints every [`CUSP_CHUNK`] cusps. An existing
/// checkpoint for the same config resumes the scan; it is removed once the
/// scan completes.
pub fn check_suited_with(
    problem: &IdentityProblem,
    cusps: Option<&[(i64, i64)]>,
    checkpoint: Option<&CheckpointSpec>,
) -> Result<Certificate> {
    let level = gamma_level(problem);
    let all;
    let cusps = match cusps {
        Some(c) => c,
        None => {
            all = cusp_representatives(level);
            &all[..]
        }
    };
    let params = parameters(problem, level, cusps.len());
    let mut start = 0usize;
    if let Some(cp) = checkpoint {
        if let Some(saved) = Checkpoint::load(&cp.dir, JOB, &cp.config_text)? {
            start = (saved.progress as usize).min(cusps.len());
        }
    }
    let mut done = start;
    for chunk in cusps[start..].chunks(CUSP_CHUNK) {
        let found: Vec<Option<Witness>> = chunk
            .par_iter()
            .map(|&(a, c)| compare_at_cusp(problem, a, c))
            .collect::<Result<_>>()?;
        if let Some(w) = found.into_iter().flatten().next() {
            if let Some(cp) = checkpoint {
                Checkpoint::remove(&cp.dir, JOB, &cp.config_text)?;
            }
            return Ok(Certificate::new(Verdict::NotSuited, vec![w], params));
        }
        done += chunk.len();
        if let Some(cp) = checkpoint {
            Checkpoint::new(JOB, &cp.config_text, done as u64, String::new())
                .save(&cp.dir, &cp.config_text)?;
        }
    }
    if let Some(cp) = checkpoint {
        Checkpoint::remove(&cp.dir, JOB, &cp.config_text)?;
    }
    Ok(Certificate::new(Verdict::Suited, Vec::new(), params))
}

/// Recomputes a cusp witness by direct evaluation of both `X` values.
pub fn recheck_cusp_witness(problem: &IdentityProblem, witness: &Witness) -> Result<bool> {
    let Witness::Cusp { a, c, m, x1, x2 } = witness else {
        return Ok(false);
    };
    let ctx = cusp_context(*a, *c, problem.delta_scaled)?;
    let r = &problem.residues_scaled;
    let y1 = x_combined(&problem.spec1_scaled, r, &ctx, m)?;
    let y2 = x_combined(&problem.spec2_scaled, r, &ctx, m)?;
    Ok(&y1 == x1 && &y2 == x2 && y1 != y2)
}

/// First `n` in `[min(0, H), nmax]` on the progression with
/// `p_{S₁}(n − H) ≠ p_{S₂}(n)`.
pub fn dp_scan(problem: &IdentityProblem, nmax: u64) -> Option<i64> {
    let h = problem.h;
    let top = (nmax as i64 - h).max(nmax as i64).max(0) as usize;
    let t1 = count_table(&problem.spec1, top);
    let t2 = count_table(&problem.spec2, top);
    let zero = num_bigint::BigUint::default();
    let at = |t: &[num_bigint::BigUint], n: i64| -> num_bigint::BigUint {
        if n < 0 {
            zero.clone()
        } else {
            t[n as usize].clone()
        }
    };
    (h.min(0)..=nmax as i64)
        .filter(|&n| problem.in_progression(n))
        .find(|&n| at(&t1, n - h) != at(&t2, n))
}
