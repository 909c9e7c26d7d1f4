use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde_json::json;
use sha2::{Digest, Sha256};

use super::certificate::{Certificate, Checkpoint, Verdict, Witness};
use super::cusps::cusp_representatives;
use super::problem::{parse_config_text, parse_u64, required};
use super::suited::CheckpointSpec;
use crate::error::{Error, Result};
use crate::etaq::{
    cusp_context, ord_t_at_cusp, parse_list, robins_level_check, EtaQuotient, PartitionSpec,
};
use crate::exact::{prime_factors, Rational};
use crate::partitions::count_table;
use crate::qseries::{dedekind_eta_expansion, QSeries};

/// Coefficients compared between checkpoints.
pub const COEFFICIENT_BLOCK: usize = 10_000;
const JOB: &str = "sturm";

/// `[SL₂(ℤ) : Γ₁(N)] = N²·∏_{p|N}(1 − 1/p²)`.
pub fn index_gamma1(n: u64) -> u128 {
    assert!(n >= 1, "level must be positive");
    let mut r = n as u128 * n as u128;
    for p in prime_factors(n) {
        let p = p as u128;
        r = r / (p * p) * (p * p - 1);
    }
    r
}

/// `⌊[SL₂(ℤ) : Γ₁(N)]·k/12⌋`: forms of weight `k` on `Γ₁(N)` agreeing
/// through `q^bound` are equal.
pub fn sturm_bound(n: u64, weight: &Rational) -> Result<u64> {
    if weight.is_negative() {
        return Err(Error::InvalidArgument(format!("weight {weight} is negative")));
    }
    let b = (Rational::from_integer(BigInt::from(index_gamma1(n))) * weight * Rational::new(1, 12))
        .floor();
    u64::try_from(b).map_err(|_| Error::LimitExceeded("Sturm bound exceeds 64 bits".into()))
}

/// Sturm pipeline configuration:
/// `delta=24 s1=1,5,7,9 s2=1,7,9,11 scale=4 eta_scale=24 eta_power=7
/// sieve_mod=24 sieve_res=20 level=576`.
///
/// The compared series are `F̂_i = (F_{S_i}(scale·τ)·η(eta_scale·τ)^eta_power)
/// | S_{sieve_mod, sieve_res}`, of weight `eta_power/2` on `Γ₁(level)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SturmConfig {
    pub delta: u64,
    pub s1: Vec<u64>,
    pub s2: Vec<u64>,
    pub scale: u64,
    pub eta_scale: u64,
    pub eta_power: u64,
    pub sieve_mod: u64,
    pub sieve_res: u64,
    pub level: u64,
}

const KEYS: [&str; 9] = [
    "delta", "s1", "s2", "scale", "eta_scale", "eta_power", "sieve_mod", "sieve_res", "level",
];

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for SturmConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "delta={} s1={} s2={} scale={} eta_scale={} eta_power={} sieve_mod={} sieve_res={} level={}",
            self.delta,
            join(&self.s1),
            join(&self.s2),
            self.scale,
            self.eta_scale,
            self.eta_power,
            self.sieve_mod,
            self.sieve_res,
            self.level
        )
    }
}

impl FromStr for SturmConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let map = parse_config_text(s, &KEYS)?;
        let c = SturmConfig {
            delta: parse_u64(&map, "delta")?,
            s1: parse_list(required(&map, "s1")?)?,
            s2: parse_list(required(&map, "s2")?)?,
            scale: parse_u64(&map, "scale")?,
            eta_scale: parse_u64(&map, "eta_scale")?,
            eta_power: parse_u64(&map, "eta_power")?,
            sieve_mod: parse_u64(&map, "sieve_mod")?,
            sieve_res: parse_u64(&map, "sieve_res")?,
            level: parse_u64(&map, "level")?,
        };
        c.validate()?;
        Ok(c)
    }
}

impl SturmConfig {
    pub fn specs(&self) -> Result<(PartitionSpec, PartitionSpec)> {
        Ok((
            PartitionSpec::new(self.delta, self.s1.iter().copied())?,
            PartitionSpec::new(self.delta, self.s2.iter().copied())?,
        ))
    }

    /// The same config with the two series exchanged.
    pub fn swapped(&self) -> Self {
        SturmConfig {
            s1: self.s2.clone(),
            s2: self.s1.clone(),
            ..self.clone()
        }
    }

    pub fn weight(&self) -> Rational {
        Rational::new(self.eta_power as i64, 2)
    }

    /// Exponent `eta_scale·eta_power/24` of the leading term of the η power.
    fn eta_lead(&self) -> i64 {
        (self.eta_scale * self.eta_power / 24) as i64
    }

    /// Residue class of the unhatted series picked out by the sieve.
    fn inner_residue(&self) -> i64 {
        (self.sieve_res as i64 - self.eta_lead()).rem_euclid(self.sieve_mod as i64)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.scale == 0 || self.eta_scale == 0 || self.sieve_mod == 0 || self.level == 0 {
            return bad("scale, eta_scale, sieve_mod and level must be positive".into());
        }
        if self.sieve_res >= self.sieve_mod {
            return bad(format!("sieve_res={} is not reduced modulo {}", self.sieve_res, self.sieve_mod));
        }
        if !(self.eta_scale * self.eta_power).is_multiple_of(24) {
            return bad("eta_scale·eta_power must be divisible by 24".into());
        }
        if !self.eta_scale.is_multiple_of(self.sieve_mod) {
            return bad("sieve_mod must divide eta_scale".into());
        }
        if !(self.scale * self.delta).is_multiple_of(self.sieve_mod) {
            return bad("sieve_mod must divide scale·delta".into());
        }
        let (a, b) = self.specs()?;
        for s in [&a, &b] {
            if !(s.ord() * Rational::from(self.scale)).is_integer() {
                return bad(format!("scale·ord is not an integer for {s}"));
            }
        }
        Ok(())
    }

    pub fn bound(&self) -> Result<u64> {
        sturm_bound(self.level, &self.weight())
    }

    fn parameters(&self, bound: u64) -> serde_json::Value {
        json!({
            "delta": self.delta,
            "s1": self.s1,
            "s2": self.s2,
            "scale": self.scale,
            "eta_scale": self.eta_scale,
            "eta_power": self.eta_power,
            "sieve_mod": self.sieve_mod,
            "sieve_res": self.sieve_res,
            "level": self.level,
            "weight": self.weight(),
            "index": index_gamma1(self.level).to_string(),
            "bound": bound,
        })
    }
}

/// Robins' criterion for both unsieved hatted quotients on `Γ₁(level)`.
pub fn sturm_robins_check(config: &SturmConfig) -> Result<()> {
    let (s1, s2) = config.specs()?;
    let eta = EtaQuotient::eta_power(config.eta_scale, config.eta_power as i64);
    for s in [&s1, &s2] {
        let q = s.eta_quotient(config.scale).mul(&eta);
        if !robins_level_check(&q, config.level)? {
            return Err(Error::InvalidArgument(format!(
                "{s} at scale {} fails the level-{} criterion",
                config.scale, config.level
            )));
        }
    }
    Ok(())
}

/// Lower bound for the order of a hatted series at `a/c`: the least order of
/// the translates `F_{S'}(τ + j/T)` plus the order of the η power.
pub fn hatted_order_bound(config: &SturmConfig, spec: &PartitionSpec, a: i64, c: i64) -> Result<Rational> {
    let s = spec.scaled(config.scale);
    let ctx = cusp_context(a, c, s.delta())?;
    let stride = (s.delta() / config.sieve_mod) as i64;
    let inner = (0..config.sieve_mod as i64)
        .map(|j| ord_t_at_cusp(&s, &ctx, j * stride))
        .min()
        .expect("sieve modulus is positive");
    let e = config.eta_scale as i64;
    let g = c.gcd(&e);
    Ok(inner + Rational::new(config.eta_power as i64 * g * g, 24 * e))
}

/// Holomorphy at every cusp of `Γ₁(level)`; reports the first cusp with a
/// negative order bound.
pub fn holomorphy_check(config: &SturmConfig) -> Result<()> {
    let (s1, s2) = config.specs()?;
    let cusps = cusp_representatives(config.level);
    let bad = cusps
        .par_iter()
        .map(|&(a, c)| -> Result<Option<(i64, i64, Rational)>> {
            for s in [&s1, &s2] {
                let o = hatted_order_bound(config, s, a, c)?;
                if o.is_negative() {
                    return Ok(Some((a, c, o)));
                }
            }
            Ok(None)
        })
        .collect::<Result<Vec<_>>>()?;
    if let Some((a, c, o)) = bad.into_iter().flatten().next() {
        return Err(Error::InvalidArgument(format!(
            "hatted series may have a pole at {a}/{c} (order bound {o})"
        )));
    }
    Ok(())
}

/// `F̂` for one spec, exact through `q^bound`.
pub fn hatted_series(config: &SturmConfig, spec: &PartitionSpec, bound: u64) -> Result<QSeries<BigInt>> {
    let t = config.sieve_mod;
    let r = config.inner_residue();
    let lead = (spec.ord() * Rational::from(config.scale))
        .to_i64()
        .expect("validated integral");
    let precision = bound as i64 + 1 - config.eta_lead();
    let scale = config.scale as i64;
    let nmax = if precision > lead {
        ((precision - 1 - lead) / scale) as usize
    } else {
        0
    };
    let counts = count_table(spec, nmax);
    let terms = counts.into_iter().enumerate().filter_map(|(n, c)| {
        let e = lead + scale * n as i64;
        (e.rem_euclid(t as i64) == r).then(|| (e, BigInt::from(c)))
    });
    let f = QSeries::from_terms(1, precision, terms);
    let mut g = f.decimate(t, r)?;
    g.mul_euler_power((config.eta_scale / t) as usize, config.eta_power);
    let out = g.inflate(t, r)?.shift(&Rational::from(config.eta_lead()));
    if out.precision() <= bound as i64 {
        return Err(Error::PrecisionShortfall {
            needed: (bound + 1).to_string(),
            available: out.precision().to_string(),
        });
    }
    Ok(out)
}

/// Coefficient of `q^index` in `F̂` by direct summation against an
/// independently expanded η power.
pub fn hatted_coefficient(config: &SturmConfig, spec: &PartitionSpec, index: i64) -> Result<BigInt> {
    let t = config.sieve_mod as i64;
    let r = config.inner_residue();
    let lead = (spec.ord() * Rational::from(config.scale))
        .to_i64()
        .expect("validated integral");
    let eta = dedekind_eta_expansion(
        config.eta_scale,
        config.eta_power,
        &Rational::from(index - lead + 1),
    );
    if index < lead + config.eta_lead() {
        return Ok(BigInt::default());
    }
    let nmax = ((index - lead) / config.scale as i64) as usize;
    let counts = count_table(spec, nmax);
    let mut acc = BigInt::default();
    for (n, c) in counts.iter().enumerate() {
        let e = lead + config.scale as i64 * n as i64;
        if e.rem_euclid(t) != r {
            continue;
        }
        if let Some(k) = eta.coeff_at(index - e) {
            acc += k * BigInt::from(c.clone());
        }
    }
    Ok(acc)
}

fn chain(state: &str, block: &[(i64, BigInt)]) -> String {
    let mut h = Sha256::new();
    h.update(state.as_bytes());
    for (i, c) in block {
        h.update(format!("{i}:{c}\n").as_bytes());
    }
    hex::encode(h.finalize())
}

/// Proves or refutes `F̂₁ = F̂₂` by comparing coefficients through the Sturm
/// bound, after the level and holomorphy pre-checks.
pub fn verify_identity_sturm(config: &SturmConfig) -> Result<Certificate> {
    verify_identity_sturm_with(config, None)
}

/// [`verify_identity_sturm`] with a checkpoint every [`COEFFICIENT_BLOCK`]
/// coefficients. On resume the stored digest of the compared prefix is
/// recomputed from the rebuilt series and must match.
pub fn verify_identity_sturm_with(
    config: &SturmConfig,
    checkpoint: Option<&CheckpointSpec>,
) -> Result<Certificate> {
    config.validate()?;
    sturm_robins_check(config)?;
    holomorphy_check(config)?;
    let bound = config.bound()?;
    let (s1, s2) = config.specs()?;
    let (f1, f2) = rayon::join(
        || hatted_series(config, &s1, bound),
        || hatted_series(config, &s2, bound),
    );
    let (f1, f2) = (f1?, f2?);
    let lo = f1.offset().min(f2.offset()).min(0);
    let coeff = |f: &QSeries<BigInt>, i: i64| f.coeff_at(i).expect("within precision");
    let indices: Vec<i64> = (lo..=bound as i64).collect();
    let params = config.parameters(bound);

    let saved = match checkpoint {
        Some(cp) => Checkpoint::load(&cp.dir, JOB, &cp.config_text)?,
        None => None,
    };
    let mut state = String::new();
    let mut done = 0usize;
    for block in indices.chunks(COEFFICIENT_BLOCK) {
        let mismatch = block
            .par_iter()
            .position_first(|&i| coeff(&f1, i) != coeff(&f2, i));
        if let Some(p) = mismatch {
            let i = block[p];
            let w = Witness::Coefficient {
                index: i,
                left: coeff(&f1, i).to_string(),
                right: coeff(&f2, i).to_string(),
            };
            if let Some(cp) = checkpoint {
                Checkpoint::remove(&cp.dir, JOB, &cp.config_text)?;
            }
            return Ok(Certificate::new(Verdict::Refuted, vec![w], params));
        }
        let content: Vec<(i64, BigInt)> = block.iter().map(|&i| (i, coeff(&f1, i))).collect();
        state = chain(&state, &content);
        done += block.len();
        if let Some(s) = &saved {
            if done as u64 == s.progress && state != s.state {
                return Err(Error::Checkpoint(format!(
                    "recomputed digest of the first {done} coefficients differs from the checkpoint"
                )));
            }
        }
        if let Some(cp) = checkpoint {
            if saved.as_ref().is_none_or(|s| done as u64 > s.progress) {
                Checkpoint::new(JOB, &cp.config_text, done as u64, state.clone())
                    .save(&cp.dir, &cp.config_text)?;
            }
        }
    }
    if let Some(cp) = checkpoint {
        Checkpoint::remove(&cp.dir, JOB, &cp.config_text)?;
    }
    Ok(Certificate::new(Verdict::Proved, Vec::new(), params))
}

/// Recomputes a coefficient witness by direct summation.
pub fn recheck_coefficient_witness(config: &SturmConfig, witness: &Witness) -> Result<bool> {
    let Witness::Coefficient { index, left, right } = witness else {
        return Ok(false);
    };
    let (s1, s2) = config.specs()?;
    let l = hatted_coefficient(config, &s1, *index)?;
    let r = hatted_coefficient(config, &s2, *index)?;
    Ok(l.to_string() == *left && r.to_string() == *right && l != r)
}
