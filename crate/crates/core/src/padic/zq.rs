use std::fmt;
use std::sync::Arc;

use super::{PrimePower, QpNum};
use crate::error::{Error, Result};
use crate::ff::{FieldDesc, FqElem};

/// The ring of integers of the unramified extension of `Q_p` of degree r,
/// presented as `Z_p[u]/(m(u))` where `m` is the integer lift of the field
/// modulus.
///
/// Elements are raw coefficient vectors of length r; every operation takes
/// the residue ring `Z/p^n` it works in.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Zq {
    p: u64,
    r: usize,
    /// `m_0 .. m_r`, `m_r = 1`.
    modulus: Vec<u64>,
}

impl Zq {
    pub fn new(field: &FieldDesc) -> Arc<Zq> {
        Arc::new(Zq {
            p: field.p() as u64,
            r: field.r() as usize,
            modulus: field.modulus().iter().map(|&c| c as u64).collect(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.r
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.r]
    }

    pub fn scalar(&self, c: u64) -> Vec<u64> {
        let mut v = self.zero();
        v[0] = c;
        v
    }

    /// Integer lift of a field element.
    pub fn lift(&self, field: &FieldDesc, x: FqElem) -> Vec<u64> {
        field.coeffs(x).into_iter().map(u64::from).collect()
    }

    pub fn add(&self, a: &[u64], b: &[u64], pp: &PrimePower) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| pp.add(x, y)).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64], pp: &PrimePower) -> Vec<u64> {
        a.iter().zip(b).map(|(&x, &y)| pp.sub(x, y)).collect()
    }

    pub fn neg(&self, a: &[u64], pp: &PrimePower) -> Vec<u64> {
        a.iter().map(|&x| pp.neg(x)).collect()
    }

    pub fn scale(&self, a: &[u64], c: u64, pp: &PrimePower) -> Vec<u64> {
        a.iter().map(|&x| pp.mul(x, c)).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64], pp: &PrimePower) -> Vec<u64> {
        let r = self.r;
        if r == 1 {
            return vec![pp.mul(a[0], b[0])];
        }
        let mut prod = vec![0u64; 2 * r - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = pp.add(prod[i + j], pp.mul(x, y));
            }
        }
        // u^{r+k} = -(m_0 .. m_{r-1}) u^k, folded from the top down
        for top in (r..2 * r - 1).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for i in 0..r {
                let t = pp.mul(c, pp.reduce(self.modulus[i]));
                prod[top - r + i] = pp.sub(prod[top - r + i], t);
            }
        }
        prod.truncate(r);
        prod
    }

    pub fn pow(&self, a: &[u64], mut e: u64, pp: &PrimePower) -> Vec<u64> {
        let mut acc = self.scalar(1 % pp.modulus());
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base, pp);
            }
            base = self.mul(&base, &base, pp);
            e >>= 1;
        }
        acc
    }

    /// Minimum p-adic valuation of the coefficients, `pp.exp()` for zero.
    pub fn valuation(&self, a: &[u64], pp: &PrimePower) -> u32 {
        a.iter().map(|&x| pp.valuation(x)).min().unwrap_or(pp.exp())
    }

    /// Inverse of a unit: `a^{q-2}` mod p, then Newton steps `y(2 - ay)`.
    pub fn inv(&self, a: &[u64], pp: &PrimePower) -> Result<Vec<u64>> {
        let p1 = pp.with_exp(1);
        let a1: Vec<u64> = a.iter().map(|&x| x % self.p).collect();
        if a1.iter().all(|&x| x == 0) {
            return Err(Error::PrecisionExhausted("inverse of a non-unit".into()));
        }
        let q = self.p.pow(self.r as u32);
        let mut y = self.pow(&a1, q - 2, &p1);
        let mut k = 1;
        while k < pp.exp() {
            k = (2 * k).min(pp.exp());
            let pk = pp.with_exp(k);
            let ay = self.mul(a, &y, &pk);
            let two_minus = self.sub(&self.scalar(2 % pk.modulus()), &ay, &pk);
            y = self.mul(&y, &two_minus, &pk);
        }
        Ok(y.into_iter().map(|x| pp.reduce(x)).collect())
    }

    /// Teichmüller representative of `x` mod `p^n`, by `n * r` applications
    /// of `y -> y^p` starting from the integer lift.
    pub fn teichmuller_raw(&self, field: &FieldDesc, x: FqElem, n: u32) -> Result<Vec<u64>> {
        let pp = PrimePower::new(self.p, n)?;
        let mut y = self.lift(field, x);
        for _ in 0..n as usize * self.r {
            y = self.pow(&y, self.p, &pp);
        }
        Ok(y)
    }

    /// Reduction mod p of an integral element, as a field element.
    pub fn reduce_mod_p(&self, field: &FieldDesc, a: &[u64]) -> Result<FqElem> {
        let c: Vec<u32> = a.iter().map(|&x| (x % self.p) as u32).collect();
        field.from_coeffs(&c)
    }
}

/// An element of the unramified extension `Q_q`, as
/// `p^valuation * unit (mod p^{valuation + precision})`.
///
/// The unit is nonzero mod p unless the value is zero, in which case
/// `precision = 0` and `valuation` is the absolute precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QqNum {
    ring: Arc<Zq>,
    valuation: i64,
    unit: Vec<u64>,
    precision: u32,
}

impl QqNum {
    pub fn zero(ring: &Arc<Zq>, abs: i64) -> Self {
        QqNum { ring: ring.clone(), valuation: abs, unit: ring.zero(), precision: 0 }
    }

    /// `p^v0 * residues`, where the residues are known modulo `p^n`.
    pub fn from_scaled(ring: &Arc<Zq>, v0: i64, residues: Vec<u64>, n: u32) -> Result<Self> {
        let pp = PrimePower::new(ring.p, n)?;
        let residues: Vec<u64> = residues.into_iter().map(|x| pp.reduce(x)).collect();
        let t = ring.valuation(&residues, &pp);
        if t == n {
            return Ok(QqNum::zero(ring, v0 + n as i64));
        }
        let div = ring.p.pow(t);
        Ok(QqNum {
            ring: ring.clone(),
            valuation: v0 + t as i64,
            unit: residues.into_iter().map(|x| x / div).collect(),
            precision: n - t,
        })
    }

    pub fn from_int(ring: &Arc<Zq>, x: i64, n: u32) -> Result<Self> {
        Ok(Self::from_qp(ring, &QpNum::from_int(ring.p, x, n)?))
    }

    pub fn from_qp(ring: &Arc<Zq>, x: &QpNum) -> Self {
        assert_eq!(x.p(), ring.p);
        if x.is_zero() {
            return QqNum::zero(ring, x.abs_precision());
        }
        QqNum {
            ring: ring.clone(),
            valuation: x.valuation(),
            unit: ring.scalar(x.unit()),
            precision: x.precision(),
        }
    }

    pub fn ring(&self) -> &Arc<Zq> {
        &self.ring
    }

    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    pub fn unit(&self) -> &[u64] {
        &self.unit
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn abs_precision(&self) -> i64 {
        self.valuation + self.precision as i64
    }

    pub fn is_zero(&self) -> bool {
        self.precision == 0
    }

    fn check_ring(&self, other: &QqNum) {
        assert!(
            Arc::ptr_eq(&self.ring, &other.ring) || self.ring == other.ring,
            "mixing elements of different rings"
        );
    }

    pub fn add(&self, other: &QqNum) -> Result<QqNum> {
        self.check_ring(other);
        let abs = self.abs_precision().min(other.abs_precision());
        let vmin = self.valuation.min(other.valuation);
        if abs <= vmin {
            return Ok(QqNum::zero(&self.ring, abs));
        }
        let n = (abs - vmin) as u32;
        let pp = PrimePower::new(self.ring.p, n)?;
        let shifted = |x: &QqNum| -> Vec<u64> {
            let s = x.valuation - vmin;
            if x.is_zero() || s >= n as i64 {
                return x.ring.zero();
            }
            let f = self.ring.p.pow(s as u32);
            x.unit.iter().map(|&c| pp.mul(pp.reduce(c), f)).collect()
        };
        let sum = self.ring.add(&shifted(self), &shifted(other), &pp);
        QqNum::from_scaled(&self.ring, vmin, sum, n)
    }

    pub fn neg(&self) -> QqNum {
        if self.is_zero() {
            return self.clone();
        }
        let m = self.ring.p.pow(self.precision);
        let unit = self.unit.iter().map(|&c| if c == 0 { 0 } else { m - c }).collect();
        QqNum { unit, ..self.clone() }
    }

    pub fn sub(&self, other: &QqNum) -> Result<QqNum> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &QqNum) -> Result<QqNum> {
        self.check_ring(other);
        let v = self.valuation + other.valuation;
        let n = self.precision.min(other.precision);
        if n == 0 {
            return Ok(QqNum::zero(&self.ring, v));
        }
        let pp = PrimePower::new(self.ring.p, n)?;
        let a: Vec<u64> = self.unit.iter().map(|&c| pp.reduce(c)).collect();
        let b: Vec<u64> = other.unit.iter().map(|&c| pp.reduce(c)).collect();
        // a product of units is a unit, so no renormalization is needed
        Ok(QqNum { ring: self.ring.clone(), valuation: v, unit: self.ring.mul(&a, &b, &pp), precision: n })
    }

    /// Multiplies by the integer `c`, exactly.
    pub fn mul_int(&self, c: i64) -> Result<QqNum> {
        self.mul(&QqNum::from_int(&self.ring, c, self.precision.max(1))?)
    }

    pub fn inv(&self) -> Result<QqNum> {
        if self.is_zero() {
            return Err(Error::PrecisionExhausted(
                "inverse of a value indistinguishable from zero".into(),
            ));
        }
        let pp = PrimePower::new(self.ring.p, self.precision)?;
        Ok(QqNum {
            ring: self.ring.clone(),
            valuation: -self.valuation,
            unit: self.ring.inv(&self.unit, &pp)?,
            precision: self.precision,
        })
    }

    /// Reduces the absolute precision to at most `abs`.
    pub fn truncate(&self, abs: i64) -> QqNum {
        if abs >= self.abs_precision() {
            return self.clone();
        }
        if abs <= self.valuation || self.is_zero() {
            return QqNum::zero(&self.ring, abs);
        }
        let n = (abs - self.valuation) as u32;
        let m = self.ring.p.pow(n);
        QqNum {
            unit: self.unit.iter().map(|&c| c % m).collect(),
            precision: n,
            ..self.clone()
        }
    }

    /// Whether `self ≡ other (mod p^n)`; both must be known to at least `n`.
    pub fn congruent(&self, other: &QqNum, n: i64) -> Result<bool> {
        if self.abs_precision() < n || other.abs_precision() < n {
            return Err(Error::PrecisionExhausted(format!(
                "comparison mod {}^{n} needs precision {n}, have {} and {}",
                self.ring.p,
                self.abs_precision(),
                other.abs_precision()
            )));
        }
        Ok(self.truncate(n).sub(&other.truncate(n))?.is_zero())
    }

    /// Coefficients `c_0 .. c_{r-1}` of the value mod `p^abs`, when integral.
    pub fn residues(&self) -> Option<Vec<u64>> {
        if self.valuation < 0 {
            return None;
        }
        if self.is_zero() {
            return Some(self.ring.zero());
        }
        let f = self.ring.p.pow(self.valuation as u32);
        Some(self.unit.iter().map(|&c| c * f).collect())
    }

    /// The value as an integer in `[0, p^abs)` when it lies in `Z_p`.
    pub fn to_integer(&self) -> Option<u64> {
        let res = self.residues()?;
        res[1..].iter().all(|&c| c == 0).then_some(res[0])
    }
}

impl fmt::Display for QqNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.ring.p;
        if self.is_zero() {
            return write!(f, "0 (mod {p}^{})", self.valuation);
        }
        write!(f, "{p}^{} * [", self.valuation)?;
        for (i, c) in self.unit.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "] (mod {p}^{})", self.precision)
    }
}

/// Teichmüller lift of `x` with relative precision `n`; `omega(0)` is zero.
pub fn teichmuller(field: &FieldDesc, ring: &Arc<Zq>, x: FqElem, n: u32) -> Result<QqNum> {
    if x.is_zero() {
        return Ok(QqNum::zero(ring, n as i64));
    }
    let y = ring.teichmuller_raw(field, x, n)?;
    QqNum::from_scaled(ring, 0, y, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(p: u32, r: u32) -> (FieldDesc, Arc<Zq>) {
        let f = FieldDesc::build(p, r).unwrap();
        let z = Zq::new(&f);
        (f, z)
    }

    #[test]
    fn teichmuller_examples() {
        let (f, z) = setup(5, 1);
        assert_eq!(teichmuller(&f, &z, f.from_int(2), 2).unwrap().unit(), &[7]);
        assert_eq!(teichmuller(&f, &z, f.from_int(2), 4).unwrap().unit(), &[182]);
        assert_eq!(teichmuller(&f, &z, f.from_int(4), 4).unwrap().unit(), &[624]);
        assert!(teichmuller(&f, &z, FqElem::ZERO, 4).unwrap().is_zero());
    }

    #[test]
    fn teichmuller_is_multiplicative_and_a_root_of_unity() {
        for (p, r) in [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2), (11, 1), (7, 2), (11, 2)] {
            let (f, z) = setup(p, r);
            let q = f.q() as u64;
            for n in [1u32, 3, 6] {
                let pp = PrimePower::new(p as u64, n).unwrap();
                let lifts: Vec<Vec<u64>> = f
                    .elements()
                    .map(|x| {
                        if x.is_zero() {
                            z.zero()
                        } else {
                            z.teichmuller_raw(&f, x, n).unwrap()
                        }
                    })
                    .collect();
                for x in f.nonzero() {
                    let w = &lifts[x.index() as usize];
                    assert_eq!(z.pow(w, q - 1, &pp), z.scalar(1), "{f} {x:?} n={n}");
                    assert_eq!(z.reduce_mod_p(&f, w).unwrap(), x);
                    for y in f.nonzero() {
                        let xy = f.mul(x, y);
                        assert_eq!(
                            z.mul(w, &lifts[y.index() as usize], &pp),
                            lifts[xy.index() as usize]
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_round_trip() {
        let (f, z) = setup(3, 3);
        let pp = PrimePower::new(3, 7).unwrap();
        for x in f.nonzero() {
            let a: Vec<u64> = z.lift(&f, x).iter().map(|&c| c + 3 * (c + 1)).collect();
            let inv = z.inv(&a, &pp).unwrap();
            assert_eq!(z.mul(&a, &inv, &pp), z.scalar(1));
        }
    }

    #[test]
    fn display_matches_grammar() {
        let (_, z) = setup(5, 2);
        let x = QqNum::from_scaled(&z, -1, vec![3, 0], 4).unwrap();
        assert_eq!(x.to_string(), "5^-1 * [3, 0] (mod 5^4)");
        assert_eq!(QqNum::zero(&z, 2).to_string(), "0 (mod 5^2)");
    }

    #[test]
    fn precision_bookkeeping() {
        let (_, z) = setup(5, 2);
        let a = QqNum::from_int(&z, 7, 4).unwrap();
        let b = QqNum::from_int(&z, -2, 4).unwrap();
        let s = a.add(&b).unwrap();
        assert_eq!(s.valuation(), 1);
        assert_eq!(s.abs_precision(), 4);
        let m = s.mul(&s).unwrap();
        assert_eq!(m.valuation(), 2);
        assert_eq!(m.precision(), 3);
        let one = QqNum::from_int(&z, 1, 3).unwrap();
        assert!(s.mul(&s.inv().unwrap()).unwrap().congruent(&one, 3).unwrap());
        assert!(matches!(
            QqNum::zero(&z, 4).inv(),
            Err(Error::PrecisionExhausted(_))
        ));
        assert!(s.congruent(&one, 9).is_err());
    }
}
