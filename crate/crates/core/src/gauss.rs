//! Gauss sums `G(chi) = sum_x chi(x) zeta_p^{tr x}` through two independent
//! routes.
//!
//! The complex route embeds `mu_{q-1}` and `zeta_p` in `C` and checks the
//! character-sum lemmas and Davenport–Hasse to a tolerance. The pi-adic route
//! builds `zeta_p` in `Z_q[pi]/(pi^{p-1}+p)` and checks Gross–Koblitz exactly
//! modulo `pi^M`. The two share nothing beyond [`crate::ff`].

use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::ff::{FieldDesc, FqElem};
use crate::gammap::GammaEval;
use crate::gfun::GContext;
use crate::harness::report::Case;
use crate::padic::{frac, zeta_p_in, ExactRational, PiAdic, PiRing};

/// Complex values, used only inside this module's oracle.
pub type ComplexVal = Complex64;

/// Default absolute tolerance of the complex oracle.
pub const DEFAULT_TOL: f64 = 1e-8;

/// `exp(2 pi i k / n)`.
pub fn unit_root(k: u64, n: u64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (k % n) as f64 / n as f64)
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.12} {:+.12}i", z.re, z.im)
}

/// Precomputed `(dlog x, tr x)` for every nonzero `x`, plus the complex
/// character tables.
pub struct ComplexOracle<'a> {
    field: &'a FieldDesc,
    order: u64,
    logs: Vec<u64>,
    traces: Vec<u64>,
    /// `G_m` for `0 <= m < q - 1`.
    gauss: Vec<Complex64>,
}

impl<'a> ComplexOracle<'a> {
    pub fn new(field: &'a FieldDesc) -> Self {
        let order = field.q() as u64 - 1;
        let logs: Vec<u64> = field.nonzero().map(|x| field.dlog(x).unwrap() as u64).collect();
        let traces: Vec<u64> = field.nonzero().map(|x| field.trace(x) as u64).collect();
        let p = field.p() as u64;
        let gauss = (0..order)
            .map(|m| {
                logs.iter()
                    .zip(&traces)
                    .map(|(&l, &t)| unit_root(m * l % order, order) * unit_root(t, p))
                    .sum()
            })
            .collect();
        ComplexOracle { field, order, logs, traces, gauss }
    }

    /// `G_m = G(T^m)` where `T(g) = exp(2 pi i / (q-1))`.
    pub fn gauss_sum(&self, m: i64) -> Complex64 {
        self.gauss[m.rem_euclid(self.order as i64) as usize]
    }

    /// `T^m(x)`, zero at `x = 0`.
    pub fn character(&self, m: i64, x: FqElem) -> Complex64 {
        match self.field.char_exponent(m, x) {
            Some(e) => unit_root(e as u64, self.order),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// `theta(x) = zeta_p^{tr x}`.
    pub fn theta(&self, x: FqElem) -> Complex64 {
        unit_root(self.field.trace(x) as u64, self.field.p() as u64)
    }
}

/// `G(T^m)` by direct summation.
pub fn gauss_sum_complex(field: &FieldDesc, m: i64) -> Complex64 {
    let order = field.q() as u64 - 1;
    let e = m.rem_euclid(order as i64) as u64;
    field
        .nonzero()
        .map(|x| {
            let l = field.dlog(x).unwrap() as u64;
            unit_root(e * l % order, order) * unit_root(field.trace(x) as u64, field.p() as u64)
        })
        .sum()
}

/// Cases of a toleranced check and the largest deviation seen.
#[derive(Clone, Debug)]
pub struct ComplexCheck {
    pub cases: Vec<Case>,
    pub max_deviation: f64,
}

impl ComplexCheck {
    fn new() -> Self {
        ComplexCheck { cases: Vec::new(), max_deviation: 0.0 }
    }

    fn push(&mut self, params: serde_json::Value, lhs: Complex64, rhs: Complex64, dev: f64, tol: f64) {
        self.max_deviation = self.max_deviation.max(dev);
        self.cases.push(Case::new(params, fmt_c(lhs), fmt_c(rhs), dev <= tol));
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.equal)
    }
}

/// The character and Gauss-sum lemmas over `field`:
/// `|G_m| = sqrt q` and `G_k G_{-k} = q T^k(-1)` for `k != 0`, `G_0 = -1`,
/// the theta expansion `theta(a) = 1/(q-1) sum_m G_{-m} T^m(a)`,
/// `theta(a+b) = theta(a) theta(b)` (one case per `a`, worst `b`),
/// `sum theta = 0`, and both orthogonality relations.
pub fn check_gauss_lemmas(field: &FieldDesc, tol: f64) -> ComplexCheck {
    let o = ComplexOracle::new(field);
    let order = o.order as i64;
    let q = field.q() as f64;
    let mut out = ComplexCheck::new();

    for m in 1..order {
        let g = o.gauss_sum(m);
        let dev = (g.norm() - q.sqrt()).abs();
        out.push(json!({"identity": "abs", "m": m}), Complex64::new(g.norm(), 0.0), Complex64::new(q.sqrt(), 0.0), dev, tol);
    }
    for k in 1..order {
        let lhs = o.gauss_sum(k) * o.gauss_sum(-k);
        let rhs = o.character(k, field.neg(FqElem::ONE)) * q;
        out.push(json!({"identity": "product", "k": k}), lhs, rhs, (lhs - rhs).norm(), tol);
    }
    let g0 = o.gauss_sum(0);
    let minus_one = Complex64::new(-1.0, 0.0);
    out.push(json!({"identity": "trivial"}), g0, minus_one, (g0 - minus_one).norm(), tol);

    for a in field.nonzero() {
        let lhs = o.theta(a);
        let rhs: Complex64 =
            (0..order).map(|m| o.gauss_sum(-m) * o.character(m, a)).sum::<Complex64>() / (order as f64);
        out.push(json!({"identity": "expansion", "a": a.index()}), lhs, rhs, (lhs - rhs).norm(), tol);
    }
    for a in field.elements() {
        let (mut worst, mut wl, mut wr) = (0.0f64, Complex64::default(), Complex64::default());
        for b in field.elements() {
            let lhs = o.theta(field.add(a, b));
            let rhs = o.theta(a) * o.theta(b);
            let dev = (lhs - rhs).norm();
            if dev >= worst {
                (worst, wl, wr) = (dev, lhs, rhs);
            }
        }
        out.push(json!({"identity": "additive", "a": a.index()}), wl, wr, worst, tol);
    }
    let s: Complex64 = field.elements().map(|x| o.theta(x)).sum();
    out.push(json!({"identity": "theta-sum"}), s, Complex64::default(), s.norm(), tol);

    for m in 0..order {
        let s: Complex64 = field.elements().map(|x| o.character(m, x)).sum();
        let expect = Complex64::new(if m == 0 { order as f64 } else { 0.0 }, 0.0);
        out.push(json!({"identity": "orthogonality-x", "m": m}), s, expect, (s - expect).norm(), tol);
    }
    for x in field.nonzero() {
        let s: Complex64 = (0..order).map(|m| o.character(m, x)).sum();
        let expect = Complex64::new(if x == FqElem::ONE { order as f64 } else { 0.0 }, 0.0);
        out.push(json!({"identity": "orthogonality-chi", "x": x.index()}), s, expect, (s - expect).norm(), tol);
    }
    debug_assert_eq!(o.logs.len(), o.traces.len());
    out
}

/// Davenport–Hasse for one `k` and every `psi = T^s`:
/// `prod_{chi^k = 1} G(chi psi) = -G(psi^k) psi(k^{-k}) prod_{chi^k = 1} G(chi)`.
pub fn davenport_hasse_cases(field: &FieldDesc, k: u32, tol: f64) -> Result<ComplexCheck> {
    let order = field.q() as i64 - 1;
    if k == 0 || order % k as i64 != 0 {
        return Err(Error::Unsupported(format!("q = {} is not 1 mod {k}", field.q())));
    }
    let o = ComplexOracle::new(field);
    let step = order / k as i64;
    let kk = field.pow(field.from_int(k as i64), -(k as i64))?;
    let base: Complex64 = (0..k as i64).map(|j| o.gauss_sum(j * step)).product();
    let mut out = ComplexCheck::new();
    for s in 0..order {
        let lhs: Complex64 = (0..k as i64).map(|j| o.gauss_sum(j * step + s)).product();
        let rhs = -o.gauss_sum(k as i64 * s) * o.character(s, kk) * base;
        out.push(json!({"k": k, "s": s}), lhs, rhs, (lhs - rhs).norm(), tol);
    }
    Ok(out)
}

/// Davenport–Hasse for a single `psi = T^psi_index`.
pub fn check_davenport_hasse(field: &FieldDesc, k: u32, psi_index: i64, tol: f64) -> Result<bool> {
    let order = field.q() as i64 - 1;
    let all = davenport_hasse_cases(field, k, tol)?;
    Ok(all.cases[psi_index.rem_euclid(order) as usize].equal)
}

/// Both sides of Gross–Koblitz for `G(omega-bar^a)` in a shared pi-adic ring.
pub struct GrossKoblitz {
    ctx: Arc<GContext>,
    ring: Arc<PiRing>,
    zeta_powers: Vec<PiAdic>,
    gamma: Arc<GammaEval>,
    teich: Arc<Vec<Vec<u64>>>,
}

impl GrossKoblitz {
    pub fn new(ctx: &Arc<GContext>, m: u32) -> Result<Self> {
        let ring = PiRing::new(ctx.zq(), m)?;
        let k = ring.coeff_ring().exp();
        let zeta = zeta_p_in(&ring)?;
        let p = ctx.field().p() as u64;
        let mut zeta_powers = Vec::with_capacity(p as usize);
        let mut cur = PiAdic::from_int(&ring, 1);
        for _ in 0..p {
            zeta_powers.push(cur.clone());
            cur = cur.mul(&zeta);
        }
        Ok(GrossKoblitz {
            gamma: ctx.gamma(k)?,
            teich: ctx.teichmuller_powers(k)?,
            ctx: ctx.clone(),
            ring,
            zeta_powers,
        })
    }

    /// `sum_{x != 0} omega-bar^a(x) zeta^{tr x}`.
    pub fn gauss_sum(&self, a: i64) -> PiAdic {
        let field = self.ctx.field();
        let zq = self.ctx.zq();
        let pp = self.ring.coeff_ring();
        let order = field.q() as i64 - 1;
        let mut by_trace = vec![zq.zero(); field.p() as usize];
        for x in field.nonzero() {
            let l = field.dlog(x).unwrap() as i64;
            let e = (-a * l).rem_euclid(order) as usize;
            let t = field.trace(x) as usize;
            by_trace[t] = zq.add(&by_trace[t], &self.teich[e], pp);
        }
        by_trace
            .iter()
            .zip(&self.zeta_powers)
            .fold(PiAdic::zero(&self.ring), |acc, (w, z)| acc.add(&z.scale(w)))
    }

    /// `-pi^{(p-1) sum_i <a p^i/(q-1)>} prod_i Gamma_p(<a p^i/(q-1)>)`.
    pub fn gamma_side(&self, a: i64) -> Result<PiAdic> {
        let field = self.ctx.field();
        let (p, q) = (field.p() as i64, field.q() as i64);
        let pp = self.ring.coeff_ring();
        let mut frac_sum = ExactRational::from_integer(0);
        let mut prod = 1 % pp.modulus();
        let mut pi_ = 1i64;
        for _ in 0..field.r() {
            let x = frac(ExactRational::new(a * pi_, q - 1));
            frac_sum += x;
            prod = pp.mul(prod, self.gamma.gamma_residue(x)?);
            pi_ *= p;
        }
        let s = frac_sum * (p - 1);
        if !s.is_integer() {
            return Err(Error::Internal(format!("pi exponent {s} is not an integer")));
        }
        let pw = PiAdic::pi_pow(&self.ring, *s.numer() as u32);
        Ok(pw.scale(&self.ctx.zq().scalar(pp.neg(prod))))
    }

    pub fn check(&self, a: i64) -> Result<(PiAdic, PiAdic, bool)> {
        let lhs = self.gauss_sum(a);
        let rhs = self.gamma_side(a)?;
        let ok = lhs.sub(&rhs).is_zero();
        Ok((lhs, rhs, ok))
    }

    /// One case per `a` in `[0, q-2]`.
    pub fn cases(&self) -> Result<Vec<Case>> {
        let q = self.ctx.field().q() as i64;
        (0..q - 1)
            .map(|a| {
                let (lhs, rhs, ok) = self.check(a)?;
                Ok(Case::new(json!({"a": a}), piadic_text(&lhs), piadic_text(&rhs), ok))
            })
            .collect()
    }
}

/// `[c_0; c_1; ..] (mod pi^M)` with each `c_i` a `Z_q` coefficient vector.
pub fn piadic_text(x: &PiAdic) -> String {
    let parts: Vec<String> = x.coeffs().iter().map(|c| format!("{c:?}")).collect();
    format!("[{}] (mod pi^{})", parts.join("; "), x.ring().pi_precision())
}

/// Gross–Koblitz for a single exponent `a`, exact modulo `pi^m`.
pub fn check_gross_koblitz(field: &Arc<FieldDesc>, a: i64, m: u32) -> Result<bool> {
    let gk = GrossKoblitz::new(&GContext::new(field.clone()), m)?;
    Ok(gk.check(a)?.2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u32, r: u32) -> FieldDesc {
        FieldDesc::build(p, r).unwrap()
    }

    #[test]
    fn gauss_sum_examples() {
        let f5 = field(5, 1);
        assert!((gauss_sum_complex(&f5, 0) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let phi = gauss_sum_complex(&f5, 2);
        assert!((phi - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-9, "{phi}");
        let f7 = field(7, 1);
        let phi = gauss_sum_complex(&f7, 3);
        assert!((phi.norm() - 7f64.sqrt()).abs() < 1e-9);
        assert!(phi.re.abs() < 1e-9);
    }

    #[test]
    fn lemma_checks_pass() {
        for (p, r) in [(5, 1), (3, 2), (7, 1), (13, 1), (5, 2)] {
            let f = field(p, r);
            let c = check_gauss_lemmas(&f, 1e-9);
            assert!(c.passed(), "{f}");
            assert!(c.max_deviation < 1e-10, "{f}: {}", c.max_deviation);
        }
    }

    #[test]
    fn davenport_hasse_examples() {
        assert!(check_davenport_hasse(&field(5, 1), 2, 1, 1e-8).unwrap());
        assert!(check_davenport_hasse(&field(7, 1), 3, 1, 1e-8).unwrap());
        assert!(check_davenport_hasse(&field(7, 1), 2, 0, 1e-8).unwrap());
        assert!(matches!(
            check_davenport_hasse(&field(3, 2), 3, 1, 1e-8),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn gross_koblitz_examples() {
        let f5 = Arc::new(field(5, 1));
        assert!(check_gross_koblitz(&f5, 2, 12).unwrap());
        assert!(check_gross_koblitz(&f5, 0, 12).unwrap());
        let f9 = Arc::new(field(3, 2));
        assert!(check_gross_koblitz(&f9, 4, 10).unwrap());
    }

    #[test]
    fn gross_koblitz_all_exponents_small_fields() {
        for (p, r) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let ctx = GContext::new(Arc::new(field(p, r)));
            let gk = GrossKoblitz::new(&ctx, 12).unwrap();
            for c in gk.cases().unwrap() {
                assert!(c.equal, "p={p} r={r}: {c:?}");
            }
        }
    }
}
