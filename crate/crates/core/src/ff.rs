//! Deterministic construction of `F_{p^r}`.
//!
//! Elements are stored by index: the coefficient vector `(c_0, .., c_{r-1})`
//! of the polynomial representative modulo the field modulus, read as the
//! base-p integer `c_0 + c_1 p + .. + c_{r-1} p^{r-1}`. The prime subfield is
//! therefore the index range `0..p`.
//!
//! Multiplication goes through full exp/log tables with respect to a fixed
//! generator `g`, so multiplicative characters can be carried around as
//! exponents: `T^m(x) = zeta_{q-1}^{m * dlog(x)}` for whatever realization of
//! `zeta_{q-1}` the consumer picks (a complex root of unity or a Teichmüller
//! power).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order accepted by [`FieldDesc::build`].
pub const MAX_FIELD_ORDER: u64 = 1 << 22;

/// An element of `F_q`, identified by its base-p coefficient index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElem(u32);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Serializable summary of a field, used in report headers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub p: u32,
    pub r: u32,
    /// Modulus coefficients `c_0 .. c_r` (ascending, `c_r = 1`).
    pub modulus: Vec<u32>,
    /// Generator coefficients `c_0 .. c_{r-1}`.
    pub generator: Vec<u32>,
}

/// A concrete model of `F_q`, `q = p^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldDesc {
    p: u32,
    r: u32,
    q: u32,
    /// `c_0 .. c_r`, monic.
    modulus: Vec<u32>,
    generator: FqElem,
    /// `exp[k]` is the index of `g^k`, `0 <= k < q - 1`.
    exp: Vec<u32>,
    /// `log[i]` is the discrete log of the element with index `i` (unused at 0).
    log: Vec<u32>,
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Dense polynomial arithmetic over `Z/p`, coefficients ascending.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut a = a.to_vec();
        trim(&mut a);
        let dm = m.len() - 1;
        let p64 = p as u64;
        while a.len() > dm {
            let lead = *a.last().unwrap() as u64;
            let shift = a.len() - 1 - dm;
            for (i, &c) in m.iter().enumerate() {
                let t = (lead * c as u64) % p64;
                let slot = &mut a[shift + i];
                *slot = ((*slot as u64 + p64 - t) % p64) as u32;
            }
            trim(&mut a);
        }
        a
    }

    pub fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let p64 = p as u64;
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p64;
            }
        }
        let out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        rem(&out, m, p)
    }

    pub fn pow_mod(a: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
        let mut result = vec![1u32];
        let mut base = rem(a, m, p);
        while e > 0 {
            if e & 1 == 1 {
                result = mul_mod(&result, &base, m, p);
            }
            base = mul_mod(&base, &base, m, p);
            e >>= 1;
        }
        result
    }
}

fn coeffs_of_index(mut idx: u32, p: u32, r: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(r as usize);
    for _ in 0..r {
        out.push(idx % p);
        idx /= p;
    }
    out
}

fn index_of_coeffs(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0u32, |acc, &x| acc * p + x)
}

/// Whether the monic polynomial `m` (ascending coefficients) is irreducible
/// over `Z/p`, by trial division with every monic polynomial of degree at
/// most `deg(m) / 2`.
pub fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = m.len() - 1;
    if deg <= 1 {
        return deg == 1;
    }
    for fd in 1..=deg / 2 {
        let count = (p as u64).pow(fd as u32);
        for idx in 0..count {
            let mut f = coeffs_of_index(idx as u32, p, fd as u32);
            f.push(1);
            if poly::rem(m, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// All monic irreducible polynomials of degree `r` over `Z/p`, in ascending
/// lexicographic order of `(c_{r-1}, .., c_0)`.
pub fn irreducible_moduli(p: u32, r: u32) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(r);
    (0..count).filter_map(move |idx| {
        // idx read as base-p with c_{r-1} most significant is exactly the
        // lexicographic order on (c_{r-1}, .., c_0).
        let mut m = coeffs_of_index(idx as u32, p, r);
        m.push(1);
        is_irreducible(&m, p).then_some(m)
    })
}

impl FieldDesc {
    /// Builds `F_{p^r}` with the first irreducible modulus in lexicographic
    /// order and the first generator in index order.
    pub fn build(p: u32, r: u32) -> Result<Self> {
        Self::check_params(p, r)?;
        let modulus = irreducible_moduli(p, r)
            .next()
            .ok_or_else(|| Error::Internal(format!("no irreducible of degree {r} mod {p}")))?;
        Self::with_modulus(p, &modulus)
    }

    fn check_params(p: u32, r: u32) -> Result<()> {
        if p == 2 || !is_prime(p as u64) {
            return Err(Error::InvalidField(format!("p = {p} is not an odd prime")));
        }
        if r == 0 {
            return Err(Error::InvalidField("extension degree must be at least 1".into()));
        }
        let q = (p as u64).checked_pow(r).unwrap_or(u64::MAX);
        if q > MAX_FIELD_ORDER {
            return Err(Error::InvalidField(format!(
                "q = {p}^{r} exceeds the supported order {MAX_FIELD_ORDER}"
            )));
        }
        Ok(())
    }

    /// Builds `F_{p^r}` from an explicit monic modulus `c_0 .. c_r`.
    pub fn with_modulus(p: u32, modulus: &[u32]) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree >= 1".into()));
        }
        let r = (modulus.len() - 1) as u32;
        Self::check_params(p, r)?;
        if *modulus.last().unwrap() != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(format!("modulus {modulus:?} is not monic mod {p}")));
        }
        if !is_irreducible(modulus, p) {
            return Err(Error::InvalidField(format!("modulus {modulus:?} is reducible mod {p}")));
        }
        let q = p.pow(r);
        let order = (q - 1) as u64;
        let factors = prime_factors(order);
        let generator = (1..q)
            .find(|&idx| {
                let c = coeffs_of_index(idx, p, r);
                factors
                    .iter()
                    .all(|&l| poly::pow_mod(&c, order / l, modulus, p) != [1])
            })
            .ok_or_else(|| Error::Internal("no generator found".into()))?;

        let g = coeffs_of_index(generator, p, r);
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; q as usize];
        let mut cur = vec![1u32];
        for k in 0..order as u32 {
            let mut padded = cur.clone();
            padded.resize(r as usize, 0);
            let idx = index_of_coeffs(&padded, p);
            exp.push(idx);
            log[idx as usize] = k;
            cur = poly::mul_mod(&cur, &g, modulus, p);
        }
        if log[1..].iter().any(|&l| l == u32::MAX) {
            return Err(Error::Internal("log table incomplete".into()));
        }
        Ok(FieldDesc {
            p,
            r,
            q,
            modulus: modulus.to_vec(),
            generator: FqElem(generator),
            exp,
            log,
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Modulus coefficients `c_0 .. c_r`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator(&self) -> FqElem {
        self.generator
    }

    pub fn header(&self) -> FieldHeader {
        FieldHeader {
            p: self.p,
            r: self.r,
            modulus: self.modulus.clone(),
            generator: self.coeffs(self.generator),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q).map(FqElem)
    }

    pub fn nonzero(&self) -> impl Iterator<Item = FqElem> {
        (1..self.q).map(FqElem)
    }

    pub fn elem(&self, index: u32) -> Result<FqElem> {
        if index < self.q {
            Ok(FqElem(index))
        } else {
            Err(Error::Domain(format!("index {index} outside F_{}", self.q)))
        }
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FqElem> {
        if coeffs.len() > self.r as usize {
            return Err(Error::Domain(format!(
                "{} coefficients given for a degree-{} field",
                coeffs.len(),
                self.r
            )));
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::Domain(format!("coefficient {c} not reduced mod {}", self.p)));
        }
        Ok(FqElem(index_of_coeffs(coeffs, self.p)))
    }

    pub fn coeffs(&self, x: FqElem) -> Vec<u32> {
        coeffs_of_index(x.0, self.p, self.r)
    }

    /// The image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn add(&self, x: FqElem, y: FqElem) -> FqElem {
        let (p, mut a, mut b) = (self.p, x.0, y.0);
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.r {
            out += ((a % p + b % p) % p) * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        FqElem(out)
    }

    pub fn neg(&self, x: FqElem) -> FqElem {
        let (p, mut a) = (self.p, x.0);
        let (mut out, mut place) = (0u32, 1u32);
        for _ in 0..self.r {
            out += ((p - a % p) % p) * place;
            a /= p;
            place = place.wrapping_mul(p);
        }
        FqElem(out)
    }

    pub fn sub(&self, x: FqElem, y: FqElem) -> FqElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FqElem, y: FqElem) -> FqElem {
        if x.is_zero() || y.is_zero() {
            return FqElem::ZERO;
        }
        let order = self.q - 1;
        let k = (self.log[x.0 as usize] as u64 + self.log[y.0 as usize] as u64) % order as u64;
        FqElem(self.exp[k as usize])
    }

    pub fn inv(&self, x: FqElem) -> Result<FqElem> {
        let l = self.dlog(x)?;
        Ok(self.exp_of((self.q - 1 - l) % (self.q - 1)))
    }

    pub fn div(&self, x: FqElem, y: FqElem) -> Result<FqElem> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x^e`; negative exponents require `x != 0`, and `0^0 = 1`.
    pub fn pow(&self, x: FqElem, e: i64) -> Result<FqElem> {
        if x.is_zero() {
            return match e {
                0 => Ok(FqElem::ONE),
                e if e > 0 => Ok(FqElem::ZERO),
                _ => Err(Error::Domain("negative power of zero".into())),
            };
        }
        let order = (self.q - 1) as i128;
        let k = (self.log[x.0 as usize] as i128 * e as i128).rem_euclid(order);
        Ok(FqElem(self.exp[k as usize]))
    }

    /// `g^k` for any integer `k`.
    pub fn exp_of(&self, k: u32) -> FqElem {
        FqElem(self.exp[(k % (self.q - 1)) as usize])
    }

    /// Discrete logarithm base the generator, in `[0, q - 1)`.
    pub fn dlog(&self, x: FqElem) -> Result<u32> {
        if x.is_zero() {
            return Err(Error::Domain("discrete log of zero".into()));
        }
        Ok(self.log[x.0 as usize])
    }

    /// The quadratic character, with `phi(0) = 0`.
    pub fn quad_char(&self, x: FqElem) -> i8 {
        if x.is_zero() {
            0
        } else if self.log[x.0 as usize] % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Absolute trace to `F_p`, returned as an integer in `[0, p)`.
    pub fn trace(&self, x: FqElem) -> u32 {
        if x.is_zero() {
            return 0;
        }
        let order = (self.q - 1) as u64;
        let l = self.log[x.0 as usize] as u64;
        let mut acc = FqElem::ZERO;
        let mut frob = 1u64;
        for _ in 0..self.r {
            acc = self.add(acc, FqElem(self.exp[((l * frob) % order) as usize]));
            frob = frob * self.p as u64 % order;
        }
        debug_assert!(acc.0 < self.p);
        acc.0
    }

    /// The exponent of `T^m(x)` in `Z/(q-1)`, or `None` for `x = 0`.
    pub fn char_exponent(&self, m: i64, x: FqElem) -> Option<u32> {
        if x.is_zero() {
            return None;
        }
        let order = (self.q - 1) as i128;
        Some((m as i128 * self.log[x.0 as usize] as i128).rem_euclid(order) as u32)
    }

    /// The two square roots of a nonzero square, or `None`.
    pub fn sqrt_pair(&self, x: FqElem) -> Option<(FqElem, FqElem)> {
        if x.is_zero() || self.quad_char(x) != 1 {
            return None;
        }
        let half = self.log[x.0 as usize] / 2;
        let y = self.exp_of(half);
        Some((y, self.neg(y)))
    }
}

impl std::fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.r, self.modulus)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauss::unit_root;
    use num_complex::Complex64;

    #[test]
    fn prime_field_five() {
        let f = FieldDesc::build(5, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.q(), 5);
        // 2 has order 4 while 1 does not, so 2 is the first primitive root.
        assert_eq!(f.generator(), FqElem(2));
    }

    #[test]
    fn f9_modulus_is_x2_plus_1() {
        let f = FieldDesc::build(3, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 0, 1]);
        assert_eq!(f.q(), 9);
        // lex-smaller monic quadratics (x^2, x^2 + 0x + 0 .. ) all reducible
        for c0 in 0..1 {
            assert!(!is_irreducible(&[c0, 0, 1], 3));
        }
    }

    #[test]
    fn f25_generator_order() {
        let f = FieldDesc::build(5, 2).unwrap();
        assert_eq!(f.q(), 25);
        let g = f.generator();
        let mut x = FqElem::ONE;
        for k in 1..=24 {
            x = f.mul(x, g);
            assert_eq!(x == FqElem::ONE, k == 24);
        }
    }

    #[test]
    fn dlog_examples() {
        let f = FieldDesc::build(5, 1).unwrap();
        assert_eq!(f.dlog(f.from_int(4)).unwrap(), 2);
        assert_eq!(f.dlog(f.from_int(1)).unwrap(), 0);
        assert_eq!(f.dlog(f.from_int(3)).unwrap(), 3);
        assert!(matches!(f.dlog(FqElem::ZERO), Err(Error::Domain(_))));
    }

    #[test]
    fn quad_char_examples() {
        let f = FieldDesc::build(5, 1).unwrap();
        assert_eq!(f.quad_char(f.from_int(4)), 1);
        assert_eq!(f.quad_char(FqElem::ZERO), 0);
        assert_eq!(f.quad_char(f.from_int(2)), -1);
    }

    #[test]
    fn trace_examples() {
        let f9 = FieldDesc::build(3, 2).unwrap();
        let x = f9.from_coeffs(&[0, 1]).unwrap();
        assert_eq!(f9.trace(x), 0);
        assert_eq!(f9.trace(FqElem::ONE), 2);
        let f5 = FieldDesc::build(5, 1).unwrap();
        assert_eq!(f5.trace(f5.from_int(3)), 3);
    }

    #[test]
    fn char_exponent_examples() {
        let f = FieldDesc::build(5, 1).unwrap();
        assert_eq!(f.char_exponent(2, f.from_int(2)), Some(2));
        assert_eq!(f.char_exponent(0, f.from_int(3)), Some(0));
        assert_eq!(f.char_exponent(1, FqElem::ZERO), None);
    }

    #[test]
    fn rejects_bad_primes() {
        assert!(matches!(FieldDesc::build(2, 3), Err(Error::InvalidField(_))));
        assert!(matches!(FieldDesc::build(9, 1), Err(Error::InvalidField(_))));
        assert!(matches!(FieldDesc::build(3, 0), Err(Error::InvalidField(_))));
        assert!(matches!(
            FieldDesc::with_modulus(3, &[0, 0, 1]),
            Err(Error::InvalidField(_))
        ));
    }

    #[test]
    fn build_is_deterministic() {
        let a = FieldDesc::build(7, 2).unwrap();
        let b = FieldDesc::build(7, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(
            serde_json::to_string(&a.header()).unwrap(),
            serde_json::to_string(&b.header()).unwrap()
        );
    }

    fn small_fields() -> Vec<FieldDesc> {
        [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2), (3, 3), (11, 1), (7, 2), (3, 5), (31, 2)]
            .iter()
            .map(|&(p, r)| FieldDesc::build(p, r).unwrap())
            .collect()
    }

    #[test]
    fn orthogonality_both_ways() {
        for f in small_fields() {
            let order = (f.q() - 1) as u64;
            for m in 0..order as i64 {
                let s: Complex64 = f
                    .elements()
                    .filter_map(|x| f.char_exponent(m, x))
                    .map(|e| unit_root(e as u64, order))
                    .sum();
                let expect = if m == 0 { order as f64 } else { 0.0 };
                assert!((s - Complex64::new(expect, 0.0)).norm() < 1e-8, "{f} m={m}");
            }
            for x in f.nonzero() {
                let s: Complex64 = (0..order as i64)
                    .map(|m| unit_root(f.char_exponent(m, x).unwrap() as u64, order))
                    .sum();
                let expect = if x == FqElem::ONE { order as f64 } else { 0.0 };
                assert!((s - Complex64::new(expect, 0.0)).norm() < 1e-8, "{f} x={x:?}");
            }
        }
    }

    #[test]
    fn trace_is_additive_and_frobenius_invariant() {
        for f in small_fields().into_iter().filter(|f| f.q() <= 1024) {
            let p = f.p();
            for x in f.elements() {
                let xp = f.pow(x, p as i64).unwrap();
                assert_eq!(f.trace(xp), f.trace(x));
                for y in f.elements().step_by(7) {
                    assert_eq!(f.trace(f.add(x, y)), (f.trace(x) + f.trace(y)) % p);
                }
            }
        }
    }

    #[test]
    fn quad_char_is_multiplicative() {
        for f in small_fields().into_iter().filter(|f| f.q() <= 256) {
            for x in f.elements() {
                for y in f.elements() {
                    assert_eq!(f.quad_char(f.mul(x, y)), f.quad_char(x) * f.quad_char(y));
                }
            }
        }
    }

    #[test]
    fn log_table_is_a_bijection() {
        for f in small_fields() {
            let mut seen = vec![false; f.q() as usize - 1];
            for x in f.nonzero() {
                let l = f.dlog(x).unwrap() as usize;
                assert!(!seen[l]);
                seen[l] = true;
                assert_eq!(f.exp_of(l as u32), x);
            }
        }
    }

    #[test]
    fn field_axioms_spot_check() {
        let f = FieldDesc::build(3, 3).unwrap();
        for x in f.elements() {
            assert_eq!(f.add(x, f.neg(x)), FqElem::ZERO);
            if !x.is_zero() {
                assert_eq!(f.mul(x, f.inv(x).unwrap()), FqElem::ONE);
            }
            for y in f.elements() {
                for z in f.elements().step_by(5) {
                    assert_eq!(
                        f.mul(x, f.add(y, z)),
                        f.add(f.mul(x, y), f.mul(x, z))
                    );
                }
            }
        }
    }

    #[test]
    fn sqrt_pair_squares_back() {
        let f = FieldDesc::build(5, 2).unwrap();
        for x in f.nonzero() {
            match f.sqrt_pair(x) {
                Some((a, b)) => {
                    assert_eq!(f.mul(a, a), x);
                    assert_eq!(f.mul(b, b), x);
                    assert_ne!(a, b);
                }
                None => assert_eq!(f.quad_char(x), -1),
            }
        }
    }
}
