//! Exact rational scalars and the `"num/den"` text form used by instance files.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

pub type Rat = BigRational;

/// Shorthand for `n/d`. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn one() -> Rat {
    Rat::one()
}

pub fn is_positive(r: &Rat) -> bool {
    r.is_positive()
}

/// Parses `"p/q"` or a bare integer `"p"`. A zero denominator is a parse
/// error, not a value.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num_s
        .parse()
        .map_err(|_| format!("bad numerator in rational {s:?}"))?;
    let d: BigInt = den_s
        .parse()
        .map_err(|_| format!("bad denominator in rational {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator in rational {s:?}"));
    }
    Ok(Rat::new(n, d))
}

/// Canonical text form: always `p/q` in lowest terms with positive `q`.
pub fn fmt_rat(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn to_f64(r: &Rat) -> f64 {
    num::ToPrimitive::to_f64(r).expect("rational out of f64 range")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["1/2", "3/1", "-4/6", "0/5"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(parse_rat(&fmt_rat(&r)).unwrap(), r);
        }
        assert_eq!(parse_rat("7").unwrap(), rat_int(7));
        assert_eq!(fmt_rat(&parse_rat("-4/6").unwrap()), "-2/3");
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("x/2").is_err());
        assert!(parse_rat("2/y").is_err());
    }
}
