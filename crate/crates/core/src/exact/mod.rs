//! Exact scalars: rationals, the Bernoulli functions `P1`/`P2`, and
//! arithmetic in cyclotomic fields.

mod cyclotomic;
mod rational;
mod root_sum;

pub use cyclotomic::{cyclotomic_polynomial, e, euler_phi, CyclotomicNumber, CyclotomicPolynomial};
pub use rational::{p1, p2, Rational};
pub use root_sum::{phase_index, RootSum};

pub(crate) use cyclotomic::prime_factors;
pub(crate) use rational::SmallFrac;

/// `e(x)` as an exact root of unity in `ℚ(ζ_N)`.
pub fn root_of_unity(x: &Rational, conductor: u64) -> crate::Result<CyclotomicNumber> {
    CyclotomicNumber::root_of_unity(x, conductor)
}

/// Complex approximation of a cyclotomic number.
pub fn to_complex(z: &CyclotomicNumber, digits: u32) -> num_complex::Complex64 {
    z.to_complex(digits)
}
