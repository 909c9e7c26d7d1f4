use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::etaq::{parse_list, PartitionSpec};
use crate::exact::Rational;

/// A shifted identity `p_{S₁}(n − H) = p_{S₂}(n)` for `n ≡ R (mod δ)`,
/// together with the rescaled data on which both sides become sieved
/// modular forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityProblem {
    pub spec1: PartitionSpec,
    pub spec2: PartitionSpec,
    /// Residues modulo `δ`, sorted and distinct.
    pub residues: Vec<u64>,
    /// `H = ord_{S₁} − ord_{S₂}`.
    pub h: i64,
    /// `v = Den(ord_{S₂})`.
    pub v: u64,
    pub spec1_scaled: PartitionSpec,
    pub spec2_scaled: PartitionSpec,
    /// `R' = {v·r + v·ord_{S₂}}` modulo `δ' = vδ`.
    pub residues_scaled: Vec<u64>,
    pub delta_scaled: u64,
}

/// Validates the pair and derives `H`, `v`, `S'`, `R'`, `δ'`.
pub fn build_problem(
    spec1: &PartitionSpec,
    spec2: &PartitionSpec,
    residues: &[u64],
) -> Result<IdentityProblem> {
    let delta = spec1.delta();
    if spec2.delta() != delta {
        return Err(Error::InvalidArgument(format!(
            "specs have different moduli {} and {}",
            delta,
            spec2.delta()
        )));
    }
    let h = spec1.ord() - spec2.ord();
    if !h.is_integer() {
        return Err(Error::NotIntegral {
            what: "H",
            value: h.to_string(),
        });
    }
    let h = h.to_i64().expect("H fits in 64 bits");
    let ord2 = spec2.ord();
    let v = ord2.denom_u64();
    let delta_scaled = v * delta;
    let shift = (ord2 * Rational::from(v)).to_i64().expect("v·ord is integral");
    let mut residues: Vec<u64> = residues.iter().map(|r| r % delta).collect();
    residues.sort_unstable();
    residues.dedup();
    let residues_scaled = residues
        .iter()
        .map(|&r| (v as i64 * r as i64 + shift).rem_euclid(delta_scaled as i64) as u64)
        .collect();
    Ok(IdentityProblem {
        spec1: spec1.clone(),
        spec2: spec2.clone(),
        residues,
        h,
        v,
        spec1_scaled: spec1.scaled(v),
        spec2_scaled: spec2.scaled(v),
        residues_scaled,
        delta_scaled,
    })
}

impl IdentityProblem {
    pub fn delta(&self) -> u64 {
        self.spec1.delta()
    }

    /// Whether `n` lies in the progression `n ≡ R (mod δ)`.
    pub fn in_progression(&self, n: i64) -> bool {
        let r = n.rem_euclid(self.delta() as i64) as u64;
        self.residues.binary_search(&r).is_ok()
    }
}

/// `lcm(δ'², 24δ'/gcd(|S₁|, |S₂|, 12))`, the level on which the suitedness
/// check runs.
pub fn gamma_level(problem: &IdentityProblem) -> u64 {
    level_formula(problem.delta_scaled, problem.spec1.len(), problem.spec2.len())
}

/// `lcm(δ'², 24δ'/gcd(n₁, n₂, 12))`.
pub fn level_formula(delta_scaled: u64, n1: usize, n2: usize) -> u64 {
    let d = delta_scaled;
    let g = (n1 as u64).gcd(&(n2 as u64)).gcd(&12);
    (d * d).lcm(&(24 * d / g))
}

fn parse_pairs(s: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for tok in s.split_whitespace() {
        if tok.starts_with('#') {
            break;
        }
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value, got {tok:?}")))?;
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Parse(format!("duplicate key {k:?}")));
        }
    }
    Ok(out)
}

/// Parses `key=value` tokens separated by whitespace. Lines starting with
/// `#` are comments. Unknown keys are rejected.
pub(crate) fn parse_config_text(s: &str, allowed: &[&str]) -> Result<BTreeMap<String, String>> {
    let body: Vec<&str> = s
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let map = parse_pairs(&body.join(" "))?;
    if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Parse(format!("unknown key {k:?}")));
    }
    Ok(map)
}

pub(crate) fn required<'a>(map: &'a BTreeMap<String, String>, key: &str) -> Result<&'a str> {
    map.get(key)
        .map(String::as_str)
        .ok_or_else(|| Error::Parse(format!("missing key {key:?}")))
}

pub(crate) fn parse_u64(map: &BTreeMap<String, String>, key: &str) -> Result<u64> {
    required(map, key)?
        .parse()
        .map_err(|_| Error::Parse(format!("{key} must be a nonnegative integer")))
}

/// Problem config `delta=24 s1=1,5,7,9 s2=1,7,9,11 r=13 mod=24`.
///
/// `mod` defaults to `δ` and must divide it; residues modulo `mod` are
/// expanded to residues modulo `δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemConfig {
    pub delta: u64,
    pub s1: Vec<u64>,
    pub s2: Vec<u64>,
    pub residues: Vec<u64>,
    pub modulus: u64,
}

impl ProblemConfig {
    pub fn problem(&self) -> Result<IdentityProblem> {
        let spec1 = PartitionSpec::new(self.delta, self.s1.iter().copied())?;
        let spec2 = PartitionSpec::new(self.delta, self.s2.iter().copied())?;
        if self.modulus == 0 || !self.delta.is_multiple_of(self.modulus) {
            return Err(Error::InvalidArgument(format!(
                "mod={} must divide delta={}",
                self.modulus, self.delta
            )));
        }
        let residues: Vec<u64> = (0..self.delta)
            .filter(|n| self.residues.contains(&(n % self.modulus)))
            .collect();
        build_problem(&spec1, &spec2, &residues)
    }
}

fn join(v: &[u64]) -> String {
    v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
}

impl fmt::Display for ProblemConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "delta={} s1={} s2={} r={} mod={}",
            self.delta,
            join(&self.s1),
            join(&self.s2),
            join(&self.residues),
            self.modulus
        )
    }
}

impl FromStr for ProblemConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let map = parse_config_text(s, &["delta", "s1", "s2", "r", "mod"])?;
        let delta = parse_u64(&map, "delta")?;
        let modulus = match map.get("mod") {
            Some(_) => parse_u64(&map, "mod")?,
            None => delta,
        };
        let mut residues = parse_list(required(&map, "r")?)?;
        if let Some(r) = residues.iter().find(|&&r| r >= modulus) {
            return Err(Error::Parse(format!("residue {r} is not reduced modulo {modulus}")));
        }
        residues.sort_unstable();
        residues.dedup();
        Ok(ProblemConfig {
            delta,
            s1: parse_list(required(&map, "s1")?)?,
            s2: parse_list(required(&map, "s2")?)?,
            residues,
            modulus,
        })
    }
}
