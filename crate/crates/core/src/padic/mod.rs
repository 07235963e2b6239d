//! Fixed-precision p-adic arithmetic.
//!
//! Three layers share one precision model, `(valuation, unit, relative
//! precision)`: [`QpNum`] in `Q_p`, [`QqNum`] in the unramified extension of
//! degree r, and [`PiAdic`] in the totally ramified ring `Z_q[pi]/(pi^{p-1}+p)`.
//! Residues are plain `u64` modulo `p^N` with `p^N < 2^62`, so products fit
//! in `u128`.

mod piadic;
mod rational;
mod zq;

pub use piadic::{zeta_p_in, zeta_p_piadic, PiAdic, PiRing};
pub use rational::{frac, floor, parse_rational, ExactRational};
pub use zq::{teichmuller, QqNum, Zq};

use std::fmt;

use crate::error::{Error, Result};

/// Largest modulus handled by [`PrimePower`].
pub const MAX_MODULUS: u64 = 1 << 62;

/// Arithmetic in `Z / p^exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimePower {
    p: u64,
    exp: u32,
    modulus: u64,
}

impl PrimePower {
    pub fn new(p: u64, exp: u32) -> Result<Self> {
        let mut modulus = 1u64;
        for _ in 0..exp {
            modulus = modulus
                .checked_mul(p)
                .filter(|&m| m < MAX_MODULUS)
                .ok_or_else(|| Error::Resource(format!("{p}^{exp} exceeds 2^62")))?;
        }
        Ok(PrimePower { p, exp, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exp(&self) -> u32 {
        self.exp
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `Z / p^exp` for a smaller exponent.
    pub fn with_exp(&self, exp: u32) -> PrimePower {
        debug_assert!(exp <= self.exp);
        PrimePower { p: self.p, exp, modulus: self.p.pow(exp) }
    }

    #[inline]
    pub fn reduce(&self, x: u64) -> u64 {
        x % self.modulus
    }

    #[inline]
    pub fn from_i64(&self, x: i64) -> u64 {
        (x as i128).rem_euclid(self.modulus as i128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.modulus - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        base %= self.modulus;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Inverse of a unit, by the extended Euclidean algorithm.
    pub fn inv(&self, a: u64) -> Result<u64> {
        let (mut r0, mut r1) = (self.modulus as i128, (a % self.modulus) as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let t = r0 / r1;
            (r0, r1) = (r1, r0 - t * r1);
            (s0, s1) = (s1, s0 - t * s1);
        }
        if r0 != 1 {
            return Err(Error::PrecisionExhausted(format!(
                "{a} is not a unit mod {}",
                self.modulus
            )));
        }
        Ok(s0.rem_euclid(self.modulus as i128) as u64)
    }

    /// p-adic valuation of a residue, capped at `exp` for zero.
    pub fn valuation(&self, mut a: u64) -> u32 {
        a %= self.modulus;
        if a == 0 {
            return self.exp;
        }
        let mut v = 0;
        while a % self.p == 0 {
            a /= self.p;
            v += 1;
        }
        v
    }
}

/// An element of `Q_p` known modulo `p^{valuation + precision}`.
///
/// Zero is stored with `precision = 0` and `valuation` equal to the absolute
/// precision, so `valuation + precision` is the absolute precision in every
/// case.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QpNum {
    p: u64,
    valuation: i64,
    unit: u64,
    precision: u32,
}

impl QpNum {
    /// The zero of `Q_p` known modulo `p^abs`.
    pub fn zero(p: u64, abs: i64) -> Self {
        QpNum { p, valuation: abs, unit: 0, precision: 0 }
    }

    /// `p^v0 * residue`, where the residue is known modulo `p^n`.
    pub fn from_scaled(p: u64, v0: i64, residue: u64, n: u32) -> Result<Self> {
        let pp = PrimePower::new(p, n)?;
        let residue = pp.reduce(residue);
        if residue == 0 {
            return Ok(QpNum::zero(p, v0 + n as i64));
        }
        let t = pp.valuation(residue);
        let rel = n - t;
        Ok(QpNum {
            p,
            valuation: v0 + t as i64,
            unit: residue / p.pow(t),
            precision: rel,
        })
    }

    /// Embeds an integer with relative precision `n`.
    pub fn from_int(p: u64, x: i64, n: u32) -> Result<Self> {
        Self::from_rational(p, ExactRational::from_integer(x), n)
    }

    /// Embeds a p-integral rational with relative precision `n`; zero gets
    /// absolute precision `n`.
    pub fn from_rational(p: u64, x: ExactRational, n: u32) -> Result<Self> {
        let den = *x.denom();
        if den.rem_euclid(p as i64) == 0 {
            return Err(Error::NotPIntegral(format!("{x} (p = {p})")));
        }
        let pp = PrimePower::new(p, n)?;
        let mut num = *x.numer() as i128;
        if num == 0 {
            return Ok(QpNum::zero(p, n as i64));
        }
        let mut v = 0i64;
        while num % p as i128 == 0 {
            num /= p as i128;
            v += 1;
        }
        let num = num.rem_euclid(pp.modulus() as i128) as u64;
        let inv = pp.inv(pp.from_i64(den))?;
        Ok(QpNum { p, valuation: v, unit: pp.mul(num, inv), precision: n })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// Unit part in `[1, p^precision)`, or 0 for zero.
    pub fn unit(&self) -> u64 {
        self.unit
    }

    /// Relative precision of the unit.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn abs_precision(&self) -> i64 {
        self.valuation + self.precision as i64
    }

    pub fn is_zero(&self) -> bool {
        self.precision == 0
    }

    /// Representative in `[0, p^abs)` when the valuation is nonnegative.
    pub fn residue(&self) -> Option<u64> {
        if self.valuation < 0 {
            return None;
        }
        if self.is_zero() {
            return Some(0);
        }
        Some(self.unit * self.p.pow(self.valuation as u32))
    }

    fn check_prime(&self, other: &QpNum) {
        assert_eq!(self.p, other.p, "mixing p-adic numbers of different primes");
    }

    pub fn add(&self, other: &QpNum) -> Result<QpNum> {
        self.check_prime(other);
        let abs = self.abs_precision().min(other.abs_precision());
        let vmin = self.valuation.min(other.valuation);
        if abs <= vmin {
            return Ok(QpNum::zero(self.p, abs));
        }
        let n = (abs - vmin) as u32;
        let pp = PrimePower::new(self.p, n)?;
        let shift = |x: &QpNum| {
            if x.is_zero() || x.valuation - vmin >= n as i64 {
                0
            } else {
                pp.mul(pp.reduce(x.unit), self.p.pow((x.valuation - vmin) as u32))
            }
        };
        QpNum::from_scaled(self.p, vmin, pp.add(shift(self), shift(other)), n)
    }

    pub fn neg(&self) -> QpNum {
        if self.is_zero() {
            return self.clone();
        }
        let m = self.p.pow(self.precision);
        QpNum { unit: m - self.unit, ..self.clone() }
    }

    pub fn sub(&self, other: &QpNum) -> Result<QpNum> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QpNum) -> Result<QpNum> {
        self.check_prime(other);
        let v = self.valuation + other.valuation;
        let n = self.precision.min(other.precision);
        if n == 0 {
            return Ok(QpNum::zero(self.p, v));
        }
        let pp = PrimePower::new(self.p, n)?;
        Ok(QpNum {
            p: self.p,
            valuation: v,
            unit: pp.mul(pp.reduce(self.unit), pp.reduce(other.unit)),
            precision: n,
        })
    }

    pub fn inv(&self) -> Result<QpNum> {
        if self.is_zero() {
            return Err(Error::PrecisionExhausted(
                "inverse of a value indistinguishable from zero".into(),
            ));
        }
        let pp = PrimePower::new(self.p, self.precision)?;
        Ok(QpNum {
            p: self.p,
            valuation: -self.valuation,
            unit: pp.inv(self.unit)?,
            precision: self.precision,
        })
    }

    /// Reduces the absolute precision to at most `abs`.
    pub fn truncate(&self, abs: i64) -> QpNum {
        if abs >= self.abs_precision() {
            return self.clone();
        }
        if abs <= self.valuation || self.is_zero() {
            return QpNum::zero(self.p, abs);
        }
        let n = (abs - self.valuation) as u32;
        QpNum { unit: self.unit % self.p.pow(n), precision: n, ..self.clone() }
    }

    /// Whether `self ≡ other (mod p^n)`; both must be known to at least `n`.
    pub fn congruent(&self, other: &QpNum, n: i64) -> Result<bool> {
        if self.abs_precision() < n || other.abs_precision() < n {
            return Err(Error::PrecisionExhausted(format!(
                "comparison mod {}^{n} needs more precision",
                self.p
            )));
        }
        let diff = self.truncate(n).sub(&other.truncate(n))?;
        Ok(diff.is_zero())
    }
}

impl fmt::Display for QpNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            write!(f, "0 (mod {}^{})", self.p, self.valuation)
        } else {
            write!(
                f,
                "{}^{} * [{}] (mod {}^{})",
                self.p, self.valuation, self.unit, self.p, self.precision
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> ExactRational {
        ExactRational::new(n, d)
    }

    #[test]
    fn two_plus_three_has_valuation_one() {
        let a = QpNum::from_int(5, 2, 4).unwrap();
        let b = QpNum::from_int(5, 3, 4).unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.valuation(), 1);
        assert_eq!(s.unit(), 1);
        // 2 + 3 lost nothing: absolute precision stays 4
        assert_eq!(s.abs_precision(), 4);
    }

    #[test]
    fn inverse_of_two_mod_625() {
        let two = QpNum::from_int(5, 2, 4).unwrap();
        let inv = two.inv().unwrap();
        assert_eq!(inv.unit(), 313);
        assert_eq!(PrimePower::new(5, 4).unwrap().inv(2).unwrap(), 313);
    }

    #[test]
    fn inverse_of_zero_fails() {
        let z = QpNum::zero(5, 4);
        assert!(matches!(z.inv(), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn embed_rational_examples() {
        let h = QpNum::from_rational(5, q(1, 2), 2).unwrap();
        assert_eq!((h.valuation(), h.unit()), (0, 13));
        assert!(QpNum::from_rational(7, q(0, 1), 3).unwrap().is_zero());
        let x = QpNum::from_rational(5, q(5, 3), 2).unwrap();
        assert_eq!((x.valuation(), x.unit()), (1, 17));
        assert_eq!(x.precision(), 2);
        assert_eq!(PrimePower::new(5, 2).unwrap().inv(3).unwrap(), 17);
        assert!(matches!(
            QpNum::from_rational(5, q(1, 5), 2),
            Err(Error::NotPIntegral(_))
        ));
    }

    #[test]
    fn display_grammar() {
        let x = QpNum::from_rational(5, q(1, 2), 2).unwrap();
        assert_eq!(x.to_string(), "5^0 * [13] (mod 5^2)");
        assert_eq!(QpNum::zero(5, 3).to_string(), "0 (mod 5^3)");
    }

    #[test]
    fn prime_power_overflow_is_reported() {
        assert!(matches!(PrimePower::new(13, 20), Err(Error::Resource(_))));
    }

    proptest! {
        #[test]
        fn unit_times_inverse_is_one(u in 1u64..1_000_000, n in 1u32..8) {
            let p = 7u64;
            prop_assume!(u % p != 0);
            let x = QpNum::from_int(p, u as i64, n).unwrap();
            let one = QpNum::from_int(p, 1, n).unwrap();
            prop_assert!(x.mul(&x.inv().unwrap()).unwrap().congruent(&one, n as i64).unwrap());
        }

        #[test]
        fn embed_respects_products(a in -500i64..500, b in 1i64..500, c in -500i64..500, d in 1i64..500) {
            let p = 5u64;
            prop_assume!(b % 5 != 0 && d % 5 != 0);
            let (x, y) = (q(a, b), q(c, d));
            let n = 6;
            let lhs = QpNum::from_rational(p, x, n).unwrap().mul(&QpNum::from_rational(p, y, n).unwrap()).unwrap();
            let rhs = QpNum::from_rational(p, x * y, n).unwrap();
            let abs = lhs.abs_precision().min(n as i64);
            prop_assert!(lhs.congruent(&rhs, abs).unwrap());
        }

        #[test]
        fn add_then_sub_round_trips(a in -10_000i64..10_000, b in -10_000i64..10_000) {
            let p = 3u64;
            let x = QpNum::from_int(p, a, 6).unwrap();
            let y = QpNum::from_int(p, b, 6).unwrap();
            let back = x.add(&y).unwrap().sub(&y).unwrap();
            prop_assert!(back.congruent(&x, 6).unwrap());
        }
    }
}
