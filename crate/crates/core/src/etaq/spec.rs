use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{p2, Rational};

/// A modulus `δ` and residues `0 < g < δ/2`; allowed parts are `±g (mod δ)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct PartitionSpec {
    delta: u64,
    parts: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    delta: u64,
    parts: Vec<u64>,
}

impl TryFrom<RawSpec> for PartitionSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        PartitionSpec::new(r.delta, r.parts)
    }
}

impl From<PartitionSpec> for RawSpec {
    fn from(s: PartitionSpec) -> Self {
        RawSpec {
            delta: s.delta,
            parts: s.parts,
        }
    }
}

impl PartitionSpec {
    /// Parts are sorted; duplicates and residues outside `(0, δ/2)` are errors.
    pub fn new(delta: u64, parts: impl IntoIterator<Item = u64>) -> Result<Self> {
        if delta == 0 {
            return Err(Error::InvalidSpec("delta must be positive".into()));
        }
        let mut parts: Vec<u64> = parts.into_iter().collect();
        parts.sort_unstable();
        for w in parts.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidSpec(format!("repeated part {}", w[0])));
            }
        }
        if let Some(&g) = parts.iter().find(|&&g| g == 0 || 2 * g >= delta) {
            return Err(Error::InvalidSpec(format!(
                "part {g} is not strictly between 0 and {delta}/2"
            )));
        }
        Ok(PartitionSpec { delta, parts })
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Whether `ℓ ≡ ±g (mod δ)` for some `g ∈ S`.
    pub fn allows(&self, ell: u64) -> bool {
        let r = ell % self.delta;
        self.parts.iter().any(|&g| r == g || r == self.delta - g)
    }

    /// Allowed parts up to `bound`, ascending.
    pub fn allowed_parts(&self, bound: u64) -> Vec<u64> {
        (1..=bound).filter(|&l| self.allows(l)).collect()
    }

    /// Order at infinity of `F_S`: `(1/2)·Σ δ·P₂(g/δ)`.
    pub fn ord(&self) -> Rational {
        let d = self.delta as i64;
        let s: Rational = self
            .parts
            .iter()
            .map(|&g| p2(&Rational::new(g as i64, d)) * Rational::from(d))
            .sum();
        s * Rational::new(1, 2)
    }

    /// `vS` modulo `vδ`; `F_{vS}(τ) = F_S(vτ)`.
    pub fn scaled(&self, v: u64) -> PartitionSpec {
        PartitionSpec {
            delta: self.delta * v,
            parts: self.parts.iter().map(|g| g * v).collect(),
        }
    }

    /// `F_S(vτ)` as a generalized eta-quotient.
    pub fn eta_quotient(&self, v: u64) -> EtaQuotient {
        let s = self.scaled(v);
        EtaQuotient::new(s.parts.iter().flat_map(|&g| {
            [
                (2 * s.delta, 2 * g, Rational::one()),
                (s.delta, g, -Rational::one()),
            ]
        }))
    }
}

impl fmt::Display for PartitionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(u64::to_string).collect();
        write!(f, "delta={} parts={}", self.delta, parts.join(","))
    }
}

impl FromStr for PartitionSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let (mut delta, mut parts) = (None, None);
        for field in s.split_whitespace() {
            match field.split_once('=') {
                Some(("delta", v)) => {
                    delta = Some(v.parse::<u64>().map_err(|_| bad_field(field))?);
                }
                Some(("parts", v)) => parts = Some(parse_list(v)?),
                _ => return Err(bad_field(field)),
            }
        }
        match (delta, parts) {
            (Some(d), Some(p)) => PartitionSpec::new(d, p),
            _ => Err(Error::Parse(format!("expected `delta=<int> parts=<list>`, got {s:?}"))),
        }
    }
}

fn bad_field(field: &str) -> Error {
    Error::Parse(format!("bad field {field:?}"))
}

/// Comma-separated unsigned integers; the empty string is the empty list.
pub fn parse_list(v: &str) -> Result<Vec<u64>> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    v.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("bad integer {x:?} in list")))
        })
        .collect()
}

/// `ord_S`.
pub fn ord_s(spec: &PartitionSpec) -> Rational {
    spec.ord()
}

/// Level on which `F_S(vτ)` is modular, `v = Den(ord_S)`.
pub fn f_level(spec: &PartitionSpec) -> u64 {
    let v = spec.ord().denom_u64();
    24 * spec.delta * v / (spec.len() as u64).gcd(&12)
}

/// Level of the sieved forms `F_{S,R}`; needs `ord_S ∈ ℤ`.
pub fn sieved_level(spec: &PartitionSpec) -> Result<u64> {
    let ord = spec.ord();
    if !ord.is_integer() {
        return Err(Error::NotIntegral {
            what: "ord_S",
            value: ord.to_string(),
        });
    }
    let d = spec.delta;
    Ok((d * d).lcm(&(24 * d / (spec.len() as u64).gcd(&12))))
}

/// `∏ η_{δ,g}^{r_{δ,g}}` with `η_{δ,0} = η(δτ)²`.
///
/// Exponents are rational so that `η(Tτ)^k = η_{T,0}^{k/2}` is expressible.
/// Since `η_{δ,g} = η_{δ,δ-g}`, residues are stored as `min(g, δ-g)`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EtaQuotient {
    atoms: Vec<(u64, u64, Rational)>,
}

impl EtaQuotient {
    pub fn new(atoms: impl IntoIterator<Item = (u64, u64, Rational)>) -> Self {
        let mut merged: BTreeMap<(u64, u64), Rational> = BTreeMap::new();
        for (delta, g, r) in atoms {
            assert!(delta > 0, "eta modulus must be positive");
            let g = g % delta;
            let g = g.min(delta - g) % delta;
            *merged.entry((delta, g)).or_insert_with(Rational::zero) += r;
        }
        EtaQuotient {
            atoms: merged
                .into_iter()
                .filter(|(_, r)| !r.is_zero())
                .map(|((d, g), r)| (d, g, r))
                .collect(),
        }
    }

    /// `η(Tτ)^k`.
    pub fn eta_power(t: u64, k: i64) -> Self {
        Self::new([(t, 0, Rational::new(k, 2))])
    }

    pub fn atoms(&self) -> &[(u64, u64, Rational)] {
        &self.atoms
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::new(self.atoms.iter().chain(&other.atoms).cloned())
    }

    /// Order at infinity, `(1/2)·Σ δ·P₂(g/δ)·r`.
    pub fn ord_infinity(&self) -> Rational {
        self.atoms
            .iter()
            .map(|(d, g, r)| {
                p2(&Rational::new(*g as i64, *d as i64)) * Rational::from(*d) * r
            })
            .sum::<Rational>()
            * Rational::new(1, 2)
    }
}

/// Sufficient condition for modularity on `Γ₁(N)`:
/// `Σ δ·P₂(g/δ)·r ≡ 0` and `Σ (N/6δ)·r ≡ 0 (mod 2)`.
pub fn robins_level_check(quotient: &EtaQuotient, n: u64) -> Result<bool> {
    if let Some(&(d, _, _)) = quotient.atoms.iter().find(|(d, _, _)| !n.is_multiple_of(*d)) {
        return Err(Error::Divisibility { delta: d, level: n });
    }
    let even = |x: Rational| (x * Rational::new(1, 2)).is_integer();
    let first = quotient.ord_infinity() * Rational::from(2);
    let second: Rational = quotient
        .atoms
        .iter()
        .map(|(d, _, r)| Rational::new(n as i64, 6 * *d as i64) * r)
        .sum();
    Ok(even(first) && even(second))
}
