use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::certificate::{Certificate, Verdict, Witness};
use crate::error::{Error, Result};
use crate::etaq::PartitionSpec;
use crate::exact::Rational;
use crate::partitions::count_table;
use crate::qseries::{sparse_factor_product, QSeries, SparseFactor};

/// Default search bound for [`find_counterexample`].
pub const DEFAULT_SEARCH_BOUND: u64 = 10_000;

/// `n` with `p_{S₁}(n − H) ≠ p_{S₂}(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub n: u64,
    pub left: BigUint,
    pub right: BigUint,
}

/// An arithmetic progression given by residues modulo `modulus`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progression {
    pub modulus: u64,
    pub residues: Vec<u64>,
}

impl Progression {
    pub fn new(modulus: u64, residues: impl IntoIterator<Item = u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidArgument("progression modulus must be positive".into()));
        }
        let mut residues: Vec<u64> = residues.into_iter().collect();
        if let Some(r) = residues.iter().find(|&&r| r >= modulus) {
            return Err(Error::InvalidArgument(format!(
                "residue {r} is not reduced modulo {modulus}"
            )));
        }
        residues.sort_unstable();
        residues.dedup();
        Ok(Progression { modulus, residues })
    }

    pub fn contains(&self, n: u64) -> bool {
        self.residues.binary_search(&(n % self.modulus)).is_ok()
    }
}

/// `H = ord_{S₁} − ord_{S₂}`, required to be an integer.
pub fn shift(spec1: &PartitionSpec, spec2: &PartitionSpec) -> Result<i64> {
    let h = spec1.ord() - spec2.ord();
    h.to_i64().filter(|_| h.is_integer()).ok_or(Error::NotIntegral {
        what: "H",
        value: h.to_string(),
    })
}

/// Least positive `n ≤ bound` in the progression with
/// `p_{S₁}(n − H) ≠ p_{S₂}(n)`.
pub fn find_counterexample(
    spec1: &PartitionSpec,
    spec2: &PartitionSpec,
    progression: &Progression,
    bound: u64,
) -> Result<Option<Counterexample>> {
    let h = shift(spec1, spec2)?;
    let top = (bound as i64 - h).max(0) as usize;
    let t1 = count_table(spec1, top);
    let t2 = count_table(spec2, bound as usize);
    for n in 1..=bound {
        if !progression.contains(n) {
            continue;
        }
        let k = n as i64 - h;
        let left = if k < 0 {
            BigUint::default()
        } else {
            t1[k as usize].clone()
        };
        if left != t2[n as usize] {
            return Ok(Some(Counterexample {
                n,
                left,
                right: t2[n as usize].clone(),
            }));
        }
    }
    Ok(None)
}

fn minus_product(residues: &[u64], modulus: u64, precision: i64) -> QSeries<BigInt> {
    let factors: Vec<SparseFactor<BigInt>> = (1..precision as u64)
        .filter(|l| {
            let r = l % modulus;
            residues.iter().any(|&g| r == g || r == (modulus - g) % modulus)
        })
        .map(|l| SparseFactor::minus(Rational::from(l)))
        .collect();
    sparse_factor_product(&factors, &Rational::from(precision))
}

/// Checks `G₁₁(q) + q·G₅(q) = ∏_{n ≡ ±2,±6,±8,±10 (24)} (1 − qⁿ)` through
/// `q^precision`, with `G₅ = ∏_{ℓ ≡ ±1,±5,±7,±9 (24)} (1 − q^ℓ)` and
/// `G₁₁ = ∏_{ℓ ≡ ±1,±7,±9,±11 (24)} (1 − q^ℓ)`, and that the right side
/// has no `q^{6n+4}` terms.
pub fn alt_identity_check(precision: u64) -> Result<Certificate> {
    let p = precision as i64 + 1;
    let g5 = minus_product(&[1, 5, 7, 9], 24, p);
    let g11 = minus_product(&[1, 7, 9, 11], 24, p);
    let rhs = minus_product(&[2, 6, 8, 10], 24, p);
    let lhs = &g11 + &g5.shift(&Rational::one());
    let at = |s: &QSeries<BigInt>, i: i64| s.coeff_at(i).expect("within precision");
    let params = json!({ "precision": precision });
    for i in 0..p {
        let (l, r) = (at(&lhs, i), at(&rhs, i));
        if l != r {
            let w = Witness::Coefficient {
                index: i,
                left: l.to_string(),
                right: r.to_string(),
            };
            return Ok(Certificate::new(Verdict::Refuted, vec![w], params));
        }
        if i % 6 == 4 && r != BigInt::default() {
            let w = Witness::Coefficient {
                index: i,
                left: r.to_string(),
                right: "0".into(),
            };
            return Ok(Certificate::new(Verdict::Refuted, vec![w], params));
        }
    }
    Ok(Certificate::new(Verdict::Proved, Vec::new(), params))
}
