use num_integer::Integer;

use crate::error::{Error, Result};

/// An exact rational with positive, coprime denominator.
pub type ExactRational = num_rational::Ratio<i64>;

/// Greatest integer not exceeding `x`.
pub fn floor(x: ExactRational) -> i64 {
    x.numer().div_floor(x.denom())
}

/// Fractional part `x - floor(x)`, in `[0, 1)`.
pub fn frac(x: ExactRational) -> ExactRational {
    x - ExactRational::from_integer(floor(x))
}

/// Parses `NUM/DEN` or a plain integer.
pub fn parse_rational(s: &str) -> Result<ExactRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(ExactRational::new(n, d))
        }
        None => Ok(ExactRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_and_frac_of_negatives() {
        let x = ExactRational::new(-7, 6);
        assert_eq!(floor(x), -2);
        assert_eq!(frac(x), ExactRational::new(5, 6));
        assert_eq!(frac(ExactRational::new(7, 6)), ExactRational::new(1, 6));
        assert_eq!(frac(ExactRational::from_integer(3)), ExactRational::from_integer(0));
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_rational("3/-6").unwrap(), ExactRational::new(-1, 2));
        assert_eq!(parse_rational(" 4 ").unwrap(), ExactRational::from_integer(4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
