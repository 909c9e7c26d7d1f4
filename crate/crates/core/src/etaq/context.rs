use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A cusp `a/c` completed to `A = ((a, b), (c, d)) ∈ SL₂(ℤ)`, together with
/// the data `D = gcd(c, δ)`, `b0`, `d0` (with `D·d = δ·a·d0 − c·b0`) and
/// `ε = gcd(c, 2δ)/D` used by the transformation formulas.
///
/// At infinity (`c = 0`, `a = ±1`) the context is `b = 0`, `d = a`, `D = δ`,
/// `b0 = 0`, `d0 = 1`, `ε = 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CuspContext {
    pub a: i64,
    pub c: i64,
    pub b: i64,
    pub d: i64,
    pub delta: u64,
    #[serde(rename = "D")]
    pub big_d: i64,
    pub b0: i64,
    pub d0: i64,
    pub epsilon: i64,
}

/// Canonical context: `1 ≤ d ≤ c` minimal, and `d0` the least nonnegative
/// solution, taken even when `ε = 1` so that the scaled data stays integral.
pub fn cusp_context(a: i64, c: i64, delta: u64) -> Result<CuspContext> {
    CuspContext::with_choice(a, c, delta, 0, 0)
}

impl CuspContext {
    /// The canonical context with `d` moved to `d + j·c` (and `b` to `b + j·a`)
    /// and `d0` moved by `k` strides. Every valid completion arises this way.
    pub fn with_choice(a: i64, c: i64, delta: u64, j: i64, k: i64) -> Result<CuspContext> {
        let invalid = |reason: &str| Error::InvalidCusp {
            a,
            c,
            reason: reason.into(),
        };
        if delta == 0 {
            return Err(Error::InvalidArgument("delta must be positive".into()));
        }
        if a == 0 && c == 0 {
            return Err(invalid("(0, 0) is not a cusp"));
        }
        if a.gcd(&c) != 1 {
            return Err(invalid("a and c are not coprime"));
        }
        let (a, c) = if c < 0 { (-a, -c) } else { (a, c) };
        let dl = delta as i64;
        if c == 0 {
            return Ok(CuspContext {
                a,
                c: 0,
                b: 0,
                d: a,
                delta,
                big_d: dl,
                b0: 0,
                d0: 1,
                epsilon: 2,
            });
        }
        let d_min = mod_inverse(a, c);
        let d = d_min + j * c;
        let b = ((a as i128 * d as i128 - 1) / c as i128) as i64;
        let big_d = c.gcd(&dl);
        let epsilon = c.gcd(&(2 * dl)) / big_d;
        let (dd, cc) = (dl / big_d, c / big_d);
        // d ≡ δ_·a·d0 (mod c_)
        let inv = mod_inverse((dd as i128 * a as i128).rem_euclid(cc as i128) as i64, cc);
        let mut d0 = ((d as i128).rem_euclid(cc as i128) * inv as i128).rem_euclid(cc as i128) as i64;
        let stride = if epsilon == 1 {
            if d0 % 2 != 0 {
                d0 += cc;
            }
            2 * cc
        } else {
            cc
        };
        d0 += k * stride;
        let num = dd as i128 * a as i128 * d0 as i128 - d as i128;
        debug_assert_eq!(num % cc as i128, 0);
        let b0 = i64::try_from(num / cc as i128)
            .map_err(|_| Error::LimitExceeded("b0 does not fit in 64 bits".into()))?;
        let ctx = CuspContext {
            a,
            c,
            b,
            d,
            delta,
            big_d,
            b0,
            d0,
            epsilon,
        };
        if !ctx.check_mobius() {
            return Err(invalid("internal: Möbius identity failed"));
        }
        Ok(ctx)
    }

    pub fn is_infinity(&self) -> bool {
        self.c == 0
    }

    /// Data for the `(2δ, 2g)` family: `εD`, `εb0`, `εd0/2` at modulus `2δ`.
    pub fn scaled(&self) -> CuspContext {
        let e = self.epsilon;
        debug_assert!((e * self.d0) % 2 == 0);
        let delta = 2 * self.delta;
        let big_d = e * self.big_d;
        CuspContext {
            delta,
            big_d,
            b0: e * self.b0,
            d0: e * self.d0 / 2,
            epsilon: self.c.gcd(&(2 * delta as i64)) / big_d,
            ..self.clone()
        }
    }

    /// `A0 = ((δa/D, a·b0 + b·D), (c/D, d0·a))`.
    pub fn a0(&self) -> [[i64; 2]; 2] {
        let dl = self.delta as i64;
        [
            [dl * self.a / self.big_d, self.a * self.b0 + self.b * self.big_d],
            [self.c / self.big_d, self.d0 * self.a],
        ]
    }

    /// Checks `ad − bc = 1`, `D·d = δ·a·d0 − c·b0` and the Möbius identity
    /// `δ·A(τ) = A0((Dτ − b0)/(δ/D))` by cross-multiplying the linear
    /// numerators and denominators as polynomials in `τ`.
    pub fn check_mobius(&self) -> bool {
        let (a, b, c, d) = (
            self.a as i128,
            self.b as i128,
            self.c as i128,
            self.d as i128,
        );
        let (dl, bd, b0, d0) = (
            self.delta as i128,
            self.big_d as i128,
            self.b0 as i128,
            self.d0 as i128,
        );
        if a * d - b * c != 1 || bd * d != dl * a * d0 - c * b0 {
            return false;
        }
        if (dl * a) % bd != 0 || c % bd != 0 {
            return false;
        }
        let (al, be, ga, de) = (dl * a / bd, a * b0 + b * bd, c / bd, d0 * a);
        // A0(x) with x = (D²τ − D·b0)/δ, scaled by δ: (n1 τ + n0)/(m1 τ + m0)
        let (n1, n0) = (al * bd * bd, be * dl - al * bd * b0);
        let (m1, m0) = (ga * bd * bd, de * dl - ga * bd * b0);
        // δ(aτ + b)/(cτ + d)
        let (l1, l0) = (dl * a, dl * b);
        let (k1, k0) = (c, d);
        l1 * m1 == n1 * k1 && l1 * m0 + l0 * m1 == n1 * k0 + n0 * k1 && l0 * m0 == n0 * k0
    }
}

/// Least positive `x` with `a·x ≡ 1 (mod m)` (1 when `m = 1`).
pub(crate) fn mod_inverse(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 1;
    }
    let e = (a as i128).rem_euclid(m as i128).extended_gcd(&(m as i128));
    assert_eq!(e.gcd, 1, "{a} is not invertible modulo {m}");
    let x = e.x.rem_euclid(m as i128) as i64;
    if x == 0 {
        m
    } else {
        x
    }
}
