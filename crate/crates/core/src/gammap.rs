//! Morita's p-adic gamma function.
//!
//! `Gamma_p(n) = (-1)^n prod_{0<j<n, p∤j} j` for positive integers, extended
//! continuously to `Z_p`. Values mod `p^N` depend only on the argument mod
//! `p^N`, so evaluation reduces a p-integral rational to an integer in
//! `[0, p^N)` and looks it up.
//!
//! Two evaluators share that contract. [`GammaTable`] stores all `p^N`
//! values. [`GammaBlocks`] stores the truncated polynomials
//! `B_s(T) = prod_{0<=j<p^s, p∤j} (T + j)` and multiplies one block per
//! base-p digit; it needs `O(N^2 p)` memory, which keeps precisions like
//! `13^16` in reach.

use std::sync::Arc;

use serde_json::json;

use crate::error::{Error, Result};
use crate::ff::FieldDesc;
use crate::harness::report::Case;
use crate::padic::{frac, ExactRational, PrimePower, QpNum, QqNum, Zq};

/// Largest table [`GammaTable::build`] will allocate.
pub const TABLE_BUDGET: u64 = 100_000_000;

/// [`GammaEval::new`] uses a table up to this many entries.
pub const AUTO_TABLE_LIMIT: u64 = 1 << 20;

/// All values `Gamma_p(k) mod p^N` for `0 <= k < p^N`.
#[derive(Clone, Debug)]
pub struct GammaTable {
    pp: PrimePower,
    values: Vec<u64>,
}

impl GammaTable {
    pub fn build(p: u32, n: u32) -> Result<Self> {
        let pp = PrimePower::new(p as u64, n)?;
        let len = pp.modulus();
        if len > TABLE_BUDGET {
            return Err(Error::Resource(format!(
                "gamma table of {p}^{n} = {len} entries exceeds {TABLE_BUDGET}"
            )));
        }
        let mut values = Vec::with_capacity(len as usize);
        let mut v = 1 % len;
        values.push(v);
        for k in 1..len {
            let prev = k - 1;
            v = if prev % pp.p() == 0 { pp.neg(v) } else { pp.neg(pp.mul(prev, v)) };
            values.push(v);
        }
        Ok(GammaTable { pp, values })
    }

    pub fn ring(&self) -> &PrimePower {
        &self.pp
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// Block-product evaluator, valid for any `N` with `p^N < 2^62`.
#[derive(Clone, Debug)]
pub struct GammaBlocks {
    pp: PrimePower,
    /// `blocks[s - 1]` holds `B_s` truncated below degree `N`, for `1 <= s < N`.
    blocks: Vec<Vec<u64>>,
}

impl GammaBlocks {
    pub fn build(p: u32, n: u32) -> Result<Self> {
        let pp = PrimePower::new(p as u64, n)?;
        let deg = n as usize;
        let mut blocks = Vec::new();
        if n >= 2 {
            let mut b1 = vec![0u64; deg];
            b1[0] = 1 % pp.modulus();
            for j in 1..p as u64 {
                b1 = poly_mul_trunc(&b1, &[j, 1], &pp);
            }
            blocks.push(b1);
            let mut step = pp.p();
            for _ in 2..n {
                let prev = blocks.last().unwrap();
                // B_{s+1}(T) = prod_u B_s(T + u p^s); valid because every
                // argument it is evaluated at is divisible by p
                let mut next = vec![0u64; deg];
                next[0] = 1;
                for u in 0..pp.p() {
                    let shifted = taylor_shift(prev, pp.mul(u, step), &pp);
                    next = poly_mul_trunc(&next, &shifted, &pp);
                }
                blocks.push(next);
                step *= pp.p();
            }
        }
        Ok(GammaBlocks { pp, blocks })
    }

    pub fn ring(&self) -> &PrimePower {
        &self.pp
    }

    fn value(&self, m: u64) -> u64 {
        let pp = &self.pp;
        let p = pp.p();
        let mut prod = 1 % pp.modulus();
        let mut offset = 0u64;
        for s in (1..pp.exp()).rev() {
            let ps = p.pow(s);
            let digit = (m / ps) % p;
            let block = &self.blocks[s as usize - 1];
            for _ in 0..digit {
                prod = pp.mul(prod, poly_eval(block, offset, pp));
                offset += ps;
            }
        }
        for _ in 0..m % p {
            if offset % p != 0 {
                prod = pp.mul(prod, pp.reduce(offset));
            }
            offset += 1;
        }
        if m % 2 == 1 {
            pp.neg(prod)
        } else {
            prod
        }
    }
}

fn poly_mul_trunc(a: &[u64], b: &[u64], pp: &PrimePower) -> Vec<u64> {
    let deg = a.len();
    let mut out = vec![0u64; deg];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            if i + j >= deg {
                break;
            }
            out[i + j] = pp.add(out[i + j], pp.mul(x, y));
        }
    }
    out
}

/// `b(T + c)`, truncated to the length of `b`.
fn taylor_shift(b: &[u64], c: u64, pp: &PrimePower) -> Vec<u64> {
    let deg = b.len();
    let mut out = vec![0u64; deg];
    for &coef in b.iter().rev() {
        // out = out * (T + c) + coef
        let mut next = vec![0u64; deg];
        for i in 0..deg {
            next[i] = pp.mul(out[i], c);
            if i > 0 {
                next[i] = pp.add(next[i], out[i - 1]);
            }
        }
        next[0] = pp.add(next[0], coef);
        out = next;
    }
    out
}

fn poly_eval(b: &[u64], x: u64, pp: &PrimePower) -> u64 {
    let x = pp.reduce(x);
    b.iter().rev().fold(0, |acc, &c| pp.add(pp.mul(acc, x), c))
}

/// A `Gamma_p` evaluator modulo `p^N`.
#[derive(Clone, Debug)]
pub enum GammaEval {
    Table(GammaTable),
    Blocks(GammaBlocks),
}

impl GammaEval {
    /// A table when `p^N <= AUTO_TABLE_LIMIT`, block products otherwise.
    pub fn new(p: u32, n: u32) -> Result<Self> {
        let pp = PrimePower::new(p as u64, n)?;
        if pp.modulus() <= AUTO_TABLE_LIMIT {
            Ok(GammaEval::Table(GammaTable::build(p, n)?))
        } else {
            Ok(GammaEval::Blocks(GammaBlocks::build(p, n)?))
        }
    }

    pub fn shared(p: u32, n: u32) -> Result<Arc<Self>> {
        Ok(Arc::new(Self::new(p, n)?))
    }

    pub fn ring(&self) -> &PrimePower {
        match self {
            GammaEval::Table(t) => t.ring(),
            GammaEval::Blocks(b) => b.ring(),
        }
    }

    pub fn p(&self) -> u32 {
        self.ring().p() as u32
    }

    pub fn precision(&self) -> u32 {
        self.ring().exp()
    }

    /// `Gamma_p(m) mod p^N` for an integer `m`, reduced mod `p^N` first.
    pub fn gamma_int(&self, m: u64) -> u64 {
        let m = self.ring().reduce(m);
        match self {
            GammaEval::Table(t) => t.values[m as usize],
            GammaEval::Blocks(b) => b.value(m),
        }
    }

    /// The representative of a p-integral rational in `[0, p^N)`.
    pub fn residue_of(&self, x: ExactRational) -> Result<u64> {
        let pp = self.ring();
        let den = *x.denom();
        if den.rem_euclid(pp.p() as i64) == 0 {
            return Err(Error::NotPIntegral(format!("{x} (p = {})", pp.p())));
        }
        Ok(pp.mul(pp.from_i64(*x.numer()), pp.inv(pp.from_i64(den))?))
    }

    /// `Gamma_p(x) mod p^N` as a residue.
    pub fn gamma_residue(&self, x: ExactRational) -> Result<u64> {
        Ok(self.gamma_int(self.residue_of(x)?))
    }

    /// `Gamma_p(x)` as a unit of `Z_p` with relative precision `N`.
    pub fn gamma_p(&self, x: ExactRational) -> Result<QpNum> {
        let pp = self.ring();
        QpNum::from_scaled(pp.p(), 0, self.gamma_residue(x)?, pp.exp())
    }
}

pub fn build_gamma_table(p: u32, n: u32) -> Result<GammaTable> {
    GammaTable::build(p, n)
}

/// `Gamma_p(x)` looked up in a table.
pub fn gamma_p(table: &GammaTable, x: ExactRational) -> Result<QpNum> {
    GammaEval::Table(table.clone()).gamma_p(x)
}

fn rat(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n, d)
}

fn qp_text(pp: &PrimePower, v: u64) -> String {
    QpNum::from_scaled(pp.p(), 0, v, pp.exp())
        .map(|x| x.to_string())
        .unwrap_or_default()
}

/// `Gamma_p(x) Gamma_p(1 - x) = (-1)^{x_0}` for every residue `x` mod `p^N`,
/// where `x_0` in `[1, p]` is congruent to `x` mod p.
pub fn functional_equation_cases(g: &GammaEval) -> Vec<Case> {
    let pp = *g.ring();
    (0..pp.modulus())
        .map(|x| {
            let one_minus = pp.sub(1 % pp.modulus(), x);
            let lhs = pp.mul(g.gamma_int(x), g.gamma_int(one_minus));
            let x0 = match x % pp.p() {
                0 => pp.p(),
                r => r,
            };
            let rhs = if x0 % 2 == 1 { pp.neg(1) } else { 1 % pp.modulus() };
            Case::new(json!({ "x": x }), qp_text(&pp, lhs), qp_text(&pp, rhs), lhs == rhs)
        })
        .collect()
}

/// Teichmüller lift of the integer `m` (prime to p), as a scalar of `Z_q`.
fn teich_int(field: &FieldDesc, zq: &Arc<Zq>, m: i64, n: u32) -> Result<Vec<u64>> {
    zq.teichmuller_raw(field, field.from_int(m), n)
}

/// The product formula
/// `prod_i prod_{h<m} G(<(x+h)/m p^i>) = omega(m)^{(1-x)(1-q)} prod_i G(<x p^i>) prod_{0<h<m} G(<h p^i/m>)`
/// for `x = c/(q-1)`, `0 <= c <= q-1`.
pub fn product_formula_cases(
    field: &FieldDesc,
    zq: &Arc<Zq>,
    g: &GammaEval,
    ms: &[u32],
) -> Result<Vec<Case>> {
    let pp = *g.ring();
    let (p, r, q) = (field.p() as i64, field.r(), field.q() as i64);
    let n = pp.exp();
    let mut cases = Vec::new();
    for &m in ms {
        if m as i64 % p == 0 || m < 2 {
            continue;
        }
        let m = m as i64;
        let w = teich_int(field, zq, m, n)?;
        for c in 0..q {
            let x = rat(c, q - 1);
            let mut lhs = 1 % pp.modulus();
            let mut rhs = 1 % pp.modulus();
            let mut pi = 1i64;
            for _ in 0..r {
                for h in 0..m {
                    lhs = pp.mul(lhs, g.gamma_residue(frac((x + h) / m * pi))?);
                }
                rhs = pp.mul(rhs, g.gamma_residue(frac(x * pi))?);
                for h in 1..m {
                    rhs = pp.mul(rhs, g.gamma_residue(frac(rat(h * pi, m)))?);
                }
                pi *= p;
            }
            // (1 - x)(1 - q) = c - (q - 1), and omega(m)^{q-1} = 1
            let e = c as u64 % (q as u64 - 1);
            let wpow = zq.pow(&w, e, &pp);
            let rhs_vec = zq.scale(&wpow, rhs, &pp);
            let lhs_q = QqNum::from_scaled(zq, 0, zq.scalar(lhs), n)?;
            let rhs_q = QqNum::from_scaled(zq, 0, rhs_vec, n)?;
            cases.push(Case::congruence(json!({ "m": m, "c": c }), &lhs_q, &rhs_q, n as i64)?);
        }
    }
    Ok(cases)
}

/// Both multiplication identities for `0 <= j <= q-2` and each `t` prime
/// to p:
/// `omega(t^{tj}) prod_i G(<t p^i j/(q-1)>) prod_{0<h<t} G(<h p^i/t>) = prod_i prod_{h<t} G(<p^i h/t + p^i j/(q-1)>)`
/// and the mirrored form with `-j`.
pub fn multiplication_lemma_cases(
    field: &FieldDesc,
    zq: &Arc<Zq>,
    g: &GammaEval,
    ts: &[u32],
) -> Result<Vec<Case>> {
    let pp = *g.ring();
    let (p, r, q) = (field.p() as i64, field.r(), field.q() as i64);
    let n = pp.exp();
    let qm1 = (q - 1) as u64;
    let mut cases = Vec::new();
    for &t in ts {
        if t as i64 % p == 0 || t < 1 {
            continue;
        }
        let t = t as i64;
        let w = teich_int(field, zq, t, n)?;
        for j in 0..q - 1 {
            for sign in [1i64, -1] {
                let mut lhs = 1 % pp.modulus();
                let mut rhs = 1 % pp.modulus();
                let mut pi = 1i64;
                for _ in 0..r {
                    lhs = pp.mul(lhs, g.gamma_residue(frac(rat(sign * t * pi * j, q - 1)))?);
                    for h in 1..t {
                        lhs = pp.mul(lhs, g.gamma_residue(frac(rat(h * pi, t)))?);
                    }
                    for h in 0..t {
                        let arg = if sign == 1 {
                            rat(pi * h, t) + rat(pi * j, q - 1)
                        } else {
                            rat(pi * (1 + h), t) - rat(pi * j, q - 1)
                        };
                        rhs = pp.mul(rhs, g.gamma_residue(frac(arg))?);
                    }
                    pi *= p;
                }
                let e = ((sign * t * j) as i128).rem_euclid(qm1 as i128) as u64;
                let lhs_vec = zq.scale(&zq.pow(&w, e, &pp), lhs, &pp);
                let lhs_q = QqNum::from_scaled(zq, 0, lhs_vec, n)?;
                let rhs_q = QqNum::from_scaled(zq, 0, zq.scalar(rhs), n)?;
                let params = json!({ "t": t, "j": j, "form": if sign == 1 { "plus" } else { "minus" } });
                cases.push(Case::congruence(params, &lhs_q, &rhs_q, n as i64)?);
            }
        }
    }
    Ok(cases)
}

/// The two sign identities
/// `prod_i G(<(1 - m/(q-1)) p^i>) G(<m p^i/(q-1)>) = (-1)^r omega-bar^m(-1)` for `0 < m <= q-2`, and
/// `prod_i G(<(1/2 - m/(q-1)) p^i>) G(<(1/2 + m/(q-1)) p^i>) / G(<p^i/2>)^2 = omega-bar^m(-1)` for `m != (q-1)/2`.
pub fn sign_lemma_cases(field: &FieldDesc, g: &GammaEval) -> Result<Vec<Case>> {
    let pp = *g.ring();
    let (p, r, q) = (field.p() as i64, field.r(), field.q() as i64);
    let one = 1 % pp.modulus();
    let sign = |neg: bool| if neg { pp.neg(one) } else { one };
    let mut cases = Vec::new();
    for m in 1..q - 1 {
        let mut lhs = one;
        let mut pi = 1i64;
        for _ in 0..r {
            lhs = pp.mul(lhs, g.gamma_residue(frac((rat(1, 1) - rat(m, q - 1)) * pi))?);
            lhs = pp.mul(lhs, g.gamma_residue(frac(rat(m * pi, q - 1)))?);
            pi *= p;
        }
        // omega(-1) = -1, so omega-bar^m(-1) = (-1)^m
        let rhs = sign((r as i64 + m) % 2 == 1);
        cases.push(Case::new(
            json!({ "part": 1, "m": m }),
            qp_text(&pp, lhs),
            qp_text(&pp, rhs),
            lhs == rhs,
        ));
    }
    for m in 0..q - 1 {
        if 2 * m == q - 1 {
            continue;
        }
        let mut num = one;
        let mut den = one;
        let mut pi = 1i64;
        for _ in 0..r {
            num = pp.mul(num, g.gamma_residue(frac((rat(1, 2) - rat(m, q - 1)) * pi))?);
            num = pp.mul(num, g.gamma_residue(frac((rat(1, 2) + rat(m, q - 1)) * pi))?);
            let half = g.gamma_residue(frac(rat(pi, 2)))?;
            den = pp.mul(den, pp.mul(half, half));
            pi *= p;
        }
        let lhs = pp.mul(num, pp.inv(den)?);
        let rhs = sign(m % 2 == 1);
        cases.push(Case::new(
            json!({ "part": 2, "m": m }),
            qp_text(&pp, lhs),
            qp_text(&pp, rhs),
            lhs == rhs,
        ));
    }
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_examples() {
        let t = build_gamma_table(5, 2).unwrap();
        assert_eq!(t.values()[0], 1);
        assert_eq!(t.values()[1], 24);
        assert_eq!(t.values()[5], 1);
        assert_eq!(t.values()[13], 18);
    }

    #[test]
    fn gamma_p_examples() {
        let t = build_gamma_table(5, 2).unwrap();
        let half = gamma_p(&t, rat(1, 2)).unwrap();
        assert_eq!((half.valuation(), half.unit()), (0, 18));
        for n in 1..5 {
            let t = build_gamma_table(5, n).unwrap();
            assert_eq!(gamma_p(&t, rat(0, 1)).unwrap().unit(), 1);
        }
        assert_eq!(gamma_p(&t, rat(1, 1)).unwrap().unit(), 24);
        assert!(matches!(gamma_p(&t, rat(1, 5)), Err(Error::NotPIntegral(_))));
    }

    /// Independent oracle: the defining product, computed directly.
    fn gamma_by_definition(p: u64, n: u32, k: u64) -> u64 {
        let pp = PrimePower::new(p, n).unwrap();
        let mut prod = 1 % pp.modulus();
        for j in 1..k {
            if j % p != 0 {
                prod = pp.mul(prod, j);
            }
        }
        if k % 2 == 1 {
            pp.neg(prod)
        } else {
            prod
        }
    }

    #[test]
    fn table_matches_definition() {
        for (p, n) in [(3, 4), (5, 3), (7, 2)] {
            let t = build_gamma_table(p, n).unwrap();
            for (k, &v) in t.values().iter().enumerate() {
                assert_eq!(v, gamma_by_definition(p as u64, n, k as u64), "p={p} k={k}");
            }
        }
    }

    #[test]
    fn blocks_match_table() {
        for (p, n) in [(3, 1), (3, 5), (5, 4), (7, 3), (11, 3), (13, 3)] {
            let t = GammaTable::build(p, n).unwrap();
            let b = GammaBlocks::build(p, n).unwrap();
            for (k, &v) in t.values().iter().enumerate() {
                assert_eq!(b.value(k as u64), v, "p={p} n={n} k={k}");
            }
        }
    }

    #[test]
    fn blocks_reach_high_precision() {
        let b = GammaEval::new(13, 16).unwrap();
        assert!(matches!(b, GammaEval::Blocks(_)));
        let small = GammaEval::new(13, 3).unwrap();
        for k in [0u64, 1, 2, 13, 100, 2196] {
            assert_eq!(b.gamma_int(k) % 2197, small.gamma_int(k));
        }
        // functional equation at 1/2: Gamma(1/2)^2 = (-1)^{x_0}
        let h = b.gamma_residue(rat(1, 2)).unwrap();
        let pp = *b.ring();
        let x0 = b.residue_of(rat(1, 2)).unwrap() % 13;
        let expect = if x0 % 2 == 1 { pp.neg(1) } else { 1 };
        assert_eq!(pp.mul(h, h), expect);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(GammaTable::build(7, 10), Err(Error::Resource(_))));
    }

    #[test]
    fn functional_equation_small() {
        for p in [3, 5, 7] {
            let g = GammaEval::new(p, 3).unwrap();
            let cases = functional_equation_cases(&g);
            assert_eq!(cases.len(), (p as usize).pow(3));
            assert!(cases.iter().all(|c| c.equal));
        }
    }

    #[test]
    fn units_everywhere() {
        let g = GammaEval::new(5, 3).unwrap();
        for k in 0..125 {
            assert_ne!(g.gamma_int(k) % 5, 0);
        }
    }

    fn field_ctx(p: u32, r: u32, n: u32) -> (FieldDesc, Arc<Zq>, GammaEval) {
        let f = FieldDesc::build(p, r).unwrap();
        let z = Zq::new(&f);
        (f, z, GammaEval::new(p, n).unwrap())
    }

    #[test]
    fn product_formula_holds() {
        for (p, r) in [(5, 1), (7, 1), (3, 2), (5, 2)] {
            let (f, z, g) = field_ctx(p, r, 4);
            let cases = product_formula_cases(&f, &z, &g, &[2, 3, 4]).unwrap();
            assert!(!cases.is_empty());
            for c in &cases {
                assert!(c.equal, "{f}: {c:?}");
            }
        }
    }

    #[test]
    fn multiplication_lemma_holds() {
        for (p, r) in [(5, 1), (7, 1), (3, 2), (5, 2)] {
            let (f, z, g) = field_ctx(p, r, 4);
            let cases = multiplication_lemma_cases(&f, &z, &g, &[2, 3, 4]).unwrap();
            for c in &cases {
                assert!(c.equal, "{f}: {c:?}");
            }
        }
    }

    #[test]
    fn sign_lemma_holds() {
        for (p, r) in [(5, 1), (7, 1), (3, 2), (5, 2)] {
            let (f, _, g) = field_ctx(p, r, 4);
            let cases = sign_lemma_cases(&f, &g).unwrap();
            let q = f.q() as usize;
            assert_eq!(cases.len(), (q - 2) + (q - 2));
            for c in &cases {
                assert!(c.equal, "{f}: {c:?}");
            }
        }
    }
}
