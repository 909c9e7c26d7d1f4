use std::fmt::Write as _;

use super::{QSeries, TextCoefficient};
use crate::error::{Error, Result};

impl<C: TextCoefficient> QSeries<C> {
    /// Line-oriented form: a header `L=<int> offset=<int> precision=<int>`,
    /// then one `numerator coefficient` line per nonzero term.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "L={} offset={} precision={}\n",
            self.lattice, self.offset, self.precision
        );
        for (n, c) in self.terms() {
            writeln!(out, "{n} {c}").expect("write to string");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty series text".into()))?;
        let (mut lattice, mut offset, mut precision) = (None, None, None);
        for field in header.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
            let bad = || Error::Parse(format!("bad header value {field:?}"));
            match k {
                "L" => lattice = Some(v.parse::<u64>().map_err(|_| bad())?),
                "offset" => offset = Some(v.parse::<i64>().map_err(|_| bad())?),
                "precision" => precision = Some(v.parse::<i64>().map_err(|_| bad())?),
                _ => return Err(Error::Parse(format!("unknown header key {k:?}"))),
            }
        }
        let (lattice, offset, precision) = match (lattice, offset, precision) {
            (Some(l), Some(o), Some(p)) if l >= 1 && o <= p => (l, o, p),
            _ => return Err(Error::Parse(format!("incomplete header {header:?}"))),
        };
        let mut terms = Vec::new();
        for line in lines {
            let (n, c) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Parse(format!("bad term line {line:?}")))?;
            let n: i64 = n
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {line:?}")))?;
            if n < offset || n >= precision {
                return Err(Error::Parse(format!("exponent {n} outside [offset, precision)")));
            }
            terms.push((n, C::parse_text(c.trim())?));
        }
        let s = QSeries::from_terms(lattice, precision, terms);
        if !s.is_zero() && s.offset != offset {
            return Err(Error::Parse(format!(
                "header offset {offset} does not match leading term {}",
                s.offset
            )));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{CyclotomicNumber, Rational};
    use num_bigint::BigInt;

    #[test]
    fn round_trip_integer_and_cyclotomic() {
        let s = QSeries::from_terms(4, 20, [(-3, BigInt::from(2)), (5, BigInt::from(-7))]);
        let text = s.to_text();
        assert!(text.starts_with("L=4 offset=-3 precision=20\n"));
        assert_eq!(QSeries::<BigInt>::from_text(&text).unwrap(), s);

        let z = CyclotomicNumber::zeta_power(3, 1);
        let c = QSeries::from_terms(1, 3, [(0, CyclotomicNumber::one(1)), (2, z)]);
        assert_eq!(QSeries::<CyclotomicNumber>::from_text(&c.to_text()).unwrap(), c);

        let r = QSeries::from_terms(2, 4, [(1, Rational::new(1, 3))]);
        assert_eq!(QSeries::<Rational>::from_text(&r.to_text()).unwrap(), r);
    }

    #[test]
    fn rejects_malformed() {
        assert!(QSeries::<BigInt>::from_text("").is_err());
        assert!(QSeries::<BigInt>::from_text("L=1 offset=0").is_err());
        assert!(QSeries::<BigInt>::from_text("L=1 offset=0 precision=3\n5 1").is_err());
        assert!(QSeries::<BigInt>::from_text("L=1 offset=0 precision=3\n1 x").is_err());
    }
}
