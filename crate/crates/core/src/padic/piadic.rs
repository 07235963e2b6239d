use std::sync::Arc;

use super::{PrimePower, Zq};
use crate::error::{Error, Result};

/// The ring `Z_q[pi]/(pi^{p-1} + p)` modulo `pi^M`.
///
/// An element is `sum_{i < p-1} c_i pi^i` with each `c_i` in `Z_q` stored
/// modulo `p^K`, `K = ceil(M / (p-1))`. Since `v_pi(p) = p - 1`, that
/// truncation loses nothing below `pi^M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiRing {
    zq: Arc<Zq>,
    m: u32,
    pp: PrimePower,
}

/// An element of a [`PiRing`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiAdic {
    ring: Arc<PiRing>,
    coeffs: Vec<Vec<u64>>,
}

impl PiRing {
    pub fn new(zq: &Arc<Zq>, m: u32) -> Result<Arc<PiRing>> {
        let e = (zq.p() - 1) as u32;
        let k = m.div_ceil(e).max(1);
        Ok(Arc::new(PiRing { zq: zq.clone(), m, pp: PrimePower::new(zq.p(), k)? }))
    }

    pub fn zq(&self) -> &Arc<Zq> {
        &self.zq
    }

    /// Precision in powers of pi.
    pub fn pi_precision(&self) -> u32 {
        self.m
    }

    /// The residue ring holding each coefficient.
    pub fn coeff_ring(&self) -> &PrimePower {
        &self.pp
    }

    fn e(&self) -> usize {
        (self.zq.p() - 1) as usize
    }
}

impl PiAdic {
    pub fn zero(ring: &Arc<PiRing>) -> Self {
        PiAdic { ring: ring.clone(), coeffs: vec![ring.zq.zero(); ring.e()] }
    }

    /// The constant `c` from `Z_q` (coefficients taken mod `p^K`).
    pub fn from_zq(ring: &Arc<PiRing>, c: &[u64]) -> Self {
        let mut x = Self::zero(ring);
        x.coeffs[0] = c.iter().map(|&v| ring.pp.reduce(v)).collect();
        x
    }

    pub fn from_int(ring: &Arc<PiRing>, c: i64) -> Self {
        let c = ring.zq.scalar(ring.pp.from_i64(c));
        Self::from_zq(ring, &c)
    }

    /// `pi^k`, reduced with `pi^{p-1} = -p`.
    pub fn pi_pow(ring: &Arc<PiRing>, k: u32) -> Self {
        let e = ring.e() as u32;
        let (q, rem) = (k / e, k % e);
        let mut x = Self::zero(ring);
        // pi^{qe + rem} = (-p)^q pi^rem
        let mag = if q >= ring.pp.exp() { 0 } else { ring.zq.p().pow(q) };
        let c = if q % 2 == 1 { ring.pp.neg(mag) } else { mag };
        x.coeffs[rem as usize][0] = c;
        x
    }

    pub fn ring(&self) -> &Arc<PiRing> {
        &self.ring
    }

    pub fn coeffs(&self) -> &[Vec<u64>] {
        &self.coeffs
    }

    pub fn add(&self, other: &PiAdic) -> PiAdic {
        let zq = &self.ring.zq;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| zq.add(a, b, &self.ring.pp))
            .collect();
        PiAdic { ring: self.ring.clone(), coeffs }
    }

    pub fn neg(&self) -> PiAdic {
        let zq = &self.ring.zq;
        let coeffs = self.coeffs.iter().map(|a| zq.neg(a, &self.ring.pp)).collect();
        PiAdic { ring: self.ring.clone(), coeffs }
    }

    pub fn sub(&self, other: &PiAdic) -> PiAdic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PiAdic) -> PiAdic {
        let (zq, pp, e) = (&self.ring.zq, &self.ring.pp, self.ring.e());
        let mut out = vec![zq.zero(); e];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.iter().all(|&c| c == 0) {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.iter().all(|&c| c == 0) {
                    continue;
                }
                let mut prod = zq.mul(a, b, pp);
                let mut k = i + j;
                if k >= e {
                    // pi^{e + k'} = -p pi^{k'}
                    k -= e;
                    prod = zq.scale(&prod, pp.neg(pp.reduce(zq.p())), pp);
                }
                out[k] = zq.add(&out[k], &prod, pp);
            }
        }
        PiAdic { ring: self.ring.clone(), coeffs: out }
    }

    pub fn pow(&self, mut e: u64) -> PiAdic {
        let mut acc = Self::from_int(&self.ring, 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Multiplies by an element of `Z_q`.
    pub fn scale(&self, c: &[u64]) -> PiAdic {
        let (zq, pp) = (&self.ring.zq, &self.ring.pp);
        let c: Vec<u64> = c.iter().map(|&v| pp.reduce(v)).collect();
        let coeffs = self.coeffs.iter().map(|a| zq.mul(a, &c, pp)).collect();
        PiAdic { ring: self.ring.clone(), coeffs }
    }

    /// The pi-adic valuation, capped at the ring precision `M`.
    pub fn valuation(&self) -> u32 {
        let (zq, pp, e) = (&self.ring.zq, &self.ring.pp, self.ring.e() as u32);
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| e * zq.valuation(c, pp) + i as u32)
            .min()
            .unwrap_or(u32::MAX)
            .min(self.ring.m)
    }

    /// Whether the element vanishes modulo `pi^n`, `n <= M`.
    pub fn is_zero_mod(&self, n: u32) -> bool {
        debug_assert!(n <= self.ring.m);
        self.valuation() >= n
    }

    pub fn is_zero(&self) -> bool {
        self.is_zero_mod(self.ring.m)
    }
}

/// The primitive p-th root of unity `zeta` with `zeta ≡ 1 + pi (mod pi^2)`,
/// as a constant of `ring`.
///
/// Built digit by digit: `zeta = sum c_k pi^k` with `c_k` in `[0, p)`. A
/// candidate agrees with a root mod `pi^{k+1}` exactly when
/// `v_pi(Phi_p(candidate)) >= k + p - 1`, and for `k >= 2` only one digit
/// can pass, since distinct roots already differ at `pi^1`.
pub fn zeta_p_in(ring: &Arc<PiRing>) -> Result<PiAdic> {
    let p = ring.zq.p() as u32;
    let target = ring.m;
    if target < 2 {
        return Err(Error::Domain("pi-adic precision must be at least 2".into()));
    }
    // extra p digits so the digit test never saturates at the cap
    let work = PiRing::new(&ring.zq, target + p)?;
    let phi = |z: &PiAdic| -> PiAdic {
        let mut acc = PiAdic::from_int(&work, 1);
        let mut pw = PiAdic::from_int(&work, 1);
        for _ in 1..p {
            pw = pw.mul(z);
            acc = acc.add(&pw);
        }
        acc
    };
    let mut zeta = PiAdic::from_int(&work, 1).add(&PiAdic::pi_pow(&work, 1));
    // every digit below pi^M: Phi_p(zeta) vanishing mod pi^M alone would
    // leave the last p - 2 digits undetermined
    for k in 2..target {
        let step = PiAdic::pi_pow(&work, k);
        let mut cand = zeta.clone();
        let mut found = false;
        for _ in 0..p {
            if phi(&cand).valuation() >= k + p - 1 {
                found = true;
                break;
            }
            cand = cand.add(&step);
        }
        if !found {
            return Err(Error::Internal(format!("no digit at pi^{k} for zeta_{p}")));
        }
        zeta = cand;
    }
    if phi(&zeta).valuation() < target {
        return Err(Error::Internal(format!("zeta_{p} lift did not converge")));
    }
    // restrict to the requested precision
    let pp = &ring.pp;
    let coeffs = zeta
        .coeffs
        .iter()
        .map(|c| c.iter().map(|&v| pp.reduce(v)).collect())
        .collect();
    Ok(PiAdic { ring: ring.clone(), coeffs })
}

/// `zeta_p` in `Z_p[pi]/(pi^{p-1}+p)` modulo `pi^m`.
pub fn zeta_p_piadic(p: u32, m: u32) -> Result<PiAdic> {
    let field = crate::ff::FieldDesc::build(p, 1)?;
    let ring = PiRing::new(&Zq::new(&field), m)?;
    zeta_p_in(&ring)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FieldDesc;

    fn ring(p: u32, r: u32, m: u32) -> Arc<PiRing> {
        PiRing::new(&Zq::new(&FieldDesc::build(p, r).unwrap()), m).unwrap()
    }

    #[test]
    fn pi_to_the_p_minus_one_plus_p_vanishes() {
        for p in [3, 5, 7, 11] {
            let rg = ring(p, 1, 20);
            let x = PiAdic::pi_pow(&rg, p - 1).add(&PiAdic::from_int(&rg, p as i64));
            assert!(x.coeffs().iter().all(|c| c.iter().all(|&v| v == 0)));
        }
    }

    #[test]
    fn valuation_is_additive() {
        let rg = ring(5, 2, 24);
        for i in 0..8 {
            for j in 0..8 {
                let a = PiAdic::pi_pow(&rg, i).add(&PiAdic::pi_pow(&rg, i + 3));
                let b = PiAdic::pi_pow(&rg, j).scale(&[2, 1]);
                assert_eq!(a.mul(&b).valuation(), (i + j).min(24));
            }
        }
    }

    fn check_zeta(p: u32, m: u32) {
        let z = zeta_p_piadic(p, m).unwrap();
        let rg = z.ring().clone();
        let one = PiAdic::from_int(&rg, 1);
        let mut phi = PiAdic::zero(&rg);
        let mut pw = one.clone();
        for _ in 0..p {
            phi = phi.add(&pw);
            pw = pw.mul(&z);
        }
        assert!(phi.is_zero(), "Phi_{p}(zeta) != 0 mod pi^{m}");
        assert!(z.pow(p as u64).sub(&one).is_zero());
        let diff = z.sub(&one);
        assert_eq!(diff.valuation(), 1);
        // zeta ≡ 1 + pi mod pi^2
        assert!(diff.sub(&PiAdic::pi_pow(&rg, 1)).valuation() >= 2);
    }

    #[test]
    fn zeta_examples() {
        check_zeta(3, 6);
        check_zeta(5, 8);
        check_zeta(7, 12);
        check_zeta(5, 12);
        check_zeta(13, 14);
    }

    #[test]
    fn zeta_rejects_tiny_precision() {
        assert!(zeta_p_piadic(5, 1).is_err());
    }
}
