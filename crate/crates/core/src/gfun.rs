//! The p-adic hypergeometric function
//!
//! ```text
//! nGn[a; b | t]_q = -1/(q-1) sum_{j=0}^{q-2} (-1)^{jn} omega-bar^j(t)
//!     prod_{i,k} (-p)^{e_{ijk}} G(<(a_i - j/(q-1)) p^k>) G(<(-b_i + j/(q-1)) p^k>)
//!                              / (G(<a_i p^k>) G(<-b_i p^k>))
//! ```
//!
//! with `e_{ijk} = -floor(<a_i p^k> - j p^k/(q-1)) - floor(<-b_i p^k> + j p^k/(q-1))`
//! and `G` Morita's gamma. Each `e_{ijk}` lies in `{-1, 0, 1}`, so every
//! summand has valuation at least `-n r`.
//!
//! A [`GKernel`] precomputes the `q - 1` summand coefficients for one
//! parameter list; evaluating at `t` then only buckets them by the exponent
//! of `omega(g)` and sums against a table of Teichmüller powers.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ff::{FieldDesc, FqElem};
use crate::gammap::GammaEval;
use crate::padic::{floor, frac, ExactRational, PrimePower, QqNum, Zq};

/// Parameters `(a_1..a_n; b_1..b_n)` of an `nGn`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GSpec {
    upper: Vec<ExactRational>,
    lower: Vec<ExactRational>,
}

impl GSpec {
    pub fn new(upper: Vec<ExactRational>, lower: Vec<ExactRational>) -> Result<Self> {
        if upper.is_empty() || upper.len() != lower.len() {
            return Err(Error::Domain(format!(
                "parameter lists must be nonempty and of equal length, got {} and {}",
                upper.len(),
                lower.len()
            )));
        }
        Ok(GSpec { upper, lower })
    }

    pub fn from_pairs(upper: &[(i64, i64)], lower: &[(i64, i64)]) -> Result<Self> {
        let conv = |v: &[(i64, i64)]| v.iter().map(|&(n, d)| ExactRational::new(n, d)).collect();
        Self::new(conv(upper), conv(lower))
    }

    pub fn n(&self) -> usize {
        self.upper.len()
    }

    pub fn upper(&self) -> &[ExactRational] {
        &self.upper
    }

    pub fn lower(&self) -> &[ExactRational] {
        &self.lower
    }

    /// Fractional parts, each list sorted ascending.
    pub fn canonicalize(&self) -> GSpec {
        let canon = |v: &[ExactRational]| {
            let mut out: Vec<ExactRational> = v.iter().map(|&x| frac(x)).collect();
            out.sort();
            out
        };
        GSpec { upper: canon(&self.upper), lower: canon(&self.lower) }
    }

    /// Every parameter must be p-integral.
    pub fn validate(&self, p: u32) -> Result<()> {
        for x in self.upper.iter().chain(&self.lower) {
            if x.denom().rem_euclid(p as i64) == 0 {
                return Err(Error::NotPIntegral(format!("{x} (p = {p})")));
            }
        }
        Ok(())
    }
}

impl fmt::Display for GSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[ExactRational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "[{}; {}]", join(&self.upper), join(&self.lower))
    }
}

/// Which theorem's parameter arrays [`build_params`] produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParamFamily {
    /// Even `d`: the `(d-1)`-ary list and the `(d-2)`-ary reduced list.
    Even,
    /// Odd `d`: the `(d-1)`-ary list and the reduced list with upper
    /// entries `h/(2(d-1))`, `h` odd.
    Odd,
    /// Odd `d`: the same `(d-1)`-ary list, with the reduced list whose upper
    /// entries end in `1/2`.
    OddPrimed,
}

fn r(n: i64, d: i64) -> ExactRational {
    ExactRational::new(n, d)
}

/// The main and reduced parameter lists of the given family for degree `d`.
pub fn build_params(family: ParamFamily, d: u32, p: u32) -> Result<(GSpec, GSpec)> {
    let d = d as i64;
    let parity_ok = match family {
        ParamFamily::Even => d >= 4 && d % 2 == 0,
        ParamFamily::Odd | ParamFamily::OddPrimed => d >= 3 && d % 2 == 1,
    };
    if !parity_ok {
        return Err(Error::Unsupported(format!("degree {d} does not fit the {family:?} family")));
    }
    if (d * (d - 1)) % p as i64 == 0 {
        return Err(Error::Unsupported(format!("p = {p} divides d(d-1) for d = {d}")));
    }
    let (main, reduced) = match family {
        ParamFamily::Even => {
            let main_up = (1..2 * d - 2).step_by(2).map(|h| r(h, 2 * (d - 1))).collect();
            let main_lo = (0..d).filter(|&h| 2 * h != d).map(|h| r(h, d)).collect();
            let red_up = (1..d - 1).map(|h| r(h, d - 1)).collect();
            let red_lo = (1..d).filter(|&h| 2 * h != d).map(|h| r(h, d)).collect();
            (GSpec::new(main_up, main_lo)?, GSpec::new(red_up, red_lo)?)
        }
        ParamFamily::Odd | ParamFamily::OddPrimed => {
            let main_up: Vec<_> = (0..d - 1).map(|h| r(h, d - 1)).collect();
            let odd_lo: Vec<_> = (1..2 * d).step_by(2).filter(|&h| h != d).map(|h| r(h, 2 * d)).collect();
            let reduced = if family == ParamFamily::Odd {
                let up = (1..2 * d - 2).step_by(2).map(|h| r(h, 2 * (d - 1))).collect();
                GSpec::new(up, odd_lo.clone())?
            } else {
                let mut up: Vec<_> = (1..d - 1).map(|h| r(h, d - 1)).collect();
                up.push(r(1, 2));
                GSpec::new(up, (1..d).map(|h| r(h, d)).collect())?
            };
            (GSpec::new(main_up, odd_lo)?, reduced)
        }
    };
    Ok((main, reduced))
}

/// A value of `nGn` with its precision bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GValue {
    value: QqNum,
    requested: u32,
}

impl GValue {
    /// The value with all the precision the kernel guarantees.
    pub fn value(&self) -> &QqNum {
        &self.value
    }

    pub fn requested_precision(&self) -> u32 {
        self.requested
    }

    pub fn guaranteed_precision(&self) -> i64 {
        self.value.abs_precision()
    }

    /// The value truncated to the requested absolute precision.
    pub fn canonical(&self) -> QqNum {
        self.value.truncate(self.requested as i64)
    }
}

impl fmt::Display for GValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [guaranteed {}]", self.canonical(), self.guaranteed_precision())
    }
}

/// Shared per-field state: the `Z_q` model plus gamma evaluators and
/// Teichmüller power tables cached by precision.
pub struct GContext {
    field: Arc<FieldDesc>,
    zq: Arc<Zq>,
    gammas: Mutex<HashMap<u32, Arc<GammaEval>>>,
    teich: Mutex<HashMap<u32, Arc<Vec<Vec<u64>>>>>,
}

impl GContext {
    pub fn new(field: Arc<FieldDesc>) -> Arc<Self> {
        let zq = Zq::new(&field);
        Arc::new(GContext {
            field,
            zq,
            gammas: Mutex::new(HashMap::new()),
            teich: Mutex::new(HashMap::new()),
        })
    }

    pub fn field(&self) -> &Arc<FieldDesc> {
        &self.field
    }

    pub fn zq(&self) -> &Arc<Zq> {
        &self.zq
    }

    pub fn gamma(&self, n: u32) -> Result<Arc<GammaEval>> {
        if let Some(g) = self.gammas.lock().unwrap().get(&n) {
            return Ok(g.clone());
        }
        let g = GammaEval::shared(self.field.p(), n)?;
        Ok(self.gammas.lock().unwrap().entry(n).or_insert(g).clone())
    }

    /// `omega(g)^e mod p^n` for `0 <= e < q - 1`, `g` the field generator.
    pub fn teichmuller_powers(&self, n: u32) -> Result<Arc<Vec<Vec<u64>>>> {
        if let Some(t) = self.teich.lock().unwrap().get(&n) {
            return Ok(t.clone());
        }
        let pp = PrimePower::new(self.zq.p(), n)?;
        let w = self.zq.teichmuller_raw(&self.field, self.field.generator(), n)?;
        let order = self.field.q() as usize - 1;
        let mut pows = Vec::with_capacity(order);
        let mut cur = self.zq.scalar(1);
        for _ in 0..order {
            pows.push(cur.clone());
            cur = self.zq.mul(&cur, &w, &pp);
        }
        let pows = Arc::new(pows);
        Ok(self.teich.lock().unwrap().entry(n).or_insert(pows).clone())
    }

    pub fn kernel(&self, spec: &GSpec, n_req: u32) -> Result<GKernel> {
        GKernel::new(self, spec, n_req)
    }
}

/// Working precision for an `n`-ary evaluation over `F_{p^r}` requested to
/// absolute precision `n_req`.
pub fn working_precision(n: usize, r: u32, n_req: u32) -> u32 {
    n_req + n as u32 * r + r + 2
}

/// Precomputed summands of one `nGn` over one field.
pub struct GKernel {
    field: Arc<FieldDesc>,
    zq: Arc<Zq>,
    spec: GSpec,
    n_req: u32,
    work: PrimePower,
    nr: i64,
    /// `-(q-1)^{-1} (-1)^{jn + E_j} p^{E_j + nr} (gamma quotient)_j mod p^W`.
    coeffs: Vec<u64>,
    exponents: Vec<i64>,
    teich: Arc<Vec<Vec<u64>>>,
}

impl GKernel {
    pub fn new(ctx: &GContext, spec: &GSpec, n_req: u32) -> Result<Self> {
        if n_req == 0 {
            return Err(Error::Domain("requested precision must be at least 1".into()));
        }
        let field = ctx.field.clone();
        let (p, r, q) = (field.p() as i64, field.r(), field.q() as i64);
        spec.validate(p as u32)?;
        let n = spec.n();
        let w = working_precision(n, r, n_req);
        let work = PrimePower::new(p as u64, w)?;
        let gamma = ctx.gamma(w)?;
        let nr = (n as u32 * r) as i64;

        let mut memo: HashMap<ExactRational, u64> = HashMap::new();
        let mut gamma_of = |x: ExactRational| -> Result<u64> {
            if let Some(&v) = memo.get(&x) {
                return Ok(v);
            }
            let v = gamma.gamma_residue(x)?;
            memo.insert(x, v);
            Ok(v)
        };

        // (<a_i p^k>, <-b_i p^k>, p^k) for every (i, k)
        let mut slots = Vec::with_capacity(n * r as usize);
        let mut denom = 1u64;
        for (&a, &b) in spec.upper.iter().zip(&spec.lower) {
            let mut pk = 1i64;
            for _ in 0..r {
                let fa = frac(a * pk);
                let fb = frac(-b * pk);
                denom = work.mul(denom, work.mul(gamma_of(fa)?, gamma_of(fb)?));
                slots.push((fa, fb, pk));
                pk *= p;
            }
        }
        let inv_denom = work.inv(denom)?;
        let scale = work.mul(work.neg(1), work.inv(work.from_i64(q - 1))?);

        let mut coeffs = Vec::with_capacity(q as usize - 1);
        let mut exponents = Vec::with_capacity(q as usize - 1);
        for j in 0..q - 1 {
            let mut e_total = 0i64;
            let mut prod = inv_denom;
            for &(fa, fb, pk) in &slots {
                let x = ExactRational::new(j * pk, q - 1);
                let e = -floor(fa - x) - floor(fb + x);
                debug_assert!((-1..=1).contains(&e));
                e_total += e;
                prod = work.mul(prod, gamma_of(frac(fa - x))?);
                prod = work.mul(prod, gamma_of(frac(fb + x))?);
            }
            if e_total < -nr {
                return Err(Error::Internal(format!(
                    "summand {j} has (-p)-exponent {e_total} below -{nr}"
                )));
            }
            let shift = (e_total + nr) as u32;
            let mut c = if shift >= w { 0 } else { work.mul(prod, (p as u64).pow(shift)) };
            if (j * n as i64 + e_total) % 2 != 0 {
                c = work.neg(c);
            }
            coeffs.push(work.mul(c, scale));
            exponents.push(e_total);
        }

        Ok(GKernel {
            zq: ctx.zq.clone(),
            teich: ctx.teichmuller_powers(w)?,
            field,
            spec: spec.clone(),
            n_req,
            work,
            nr,
            coeffs,
            exponents,
        })
    }

    pub fn spec(&self) -> &GSpec {
        &self.spec
    }

    pub fn working_precision(&self) -> u32 {
        self.work.exp()
    }

    pub fn requested_precision(&self) -> u32 {
        self.n_req
    }

    /// Total `(-p)`-exponent of each summand, `j = 0 .. q-2`.
    pub fn summand_exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn eval(&self, t: FqElem) -> Result<GValue> {
        let abs = self.work.exp() as i64 - self.nr;
        if t.is_zero() {
            return Ok(GValue { value: QqNum::zero(&self.zq, abs), requested: self.n_req });
        }
        let order = self.field.q() as u64 - 1;
        let l = self.field.dlog(t)? as u64;
        let pp = &self.work;
        let mut buckets = vec![0u64; order as usize];
        for (j, &c) in self.coeffs.iter().enumerate() {
            // omega-bar^j(t) = omega(g)^{-j l}
            let e = (order - (j as u64 * l) % order) % order;
            buckets[e as usize] = pp.add(buckets[e as usize], c);
        }
        let mut sum = self.zq.zero();
        for (b, w) in buckets.iter().zip(self.teich.iter()) {
            if *b == 0 {
                continue;
            }
            for (s, &x) in sum.iter_mut().zip(w) {
                *s = pp.add(*s, pp.mul(*b, x));
            }
        }
        let value = QqNum::from_scaled(&self.zq, -self.nr, sum, pp.exp())?;
        if !value.is_zero() && value.valuation() < -self.nr {
            return Err(Error::PrecisionExhausted(format!(
                "value of valuation {} below -{}",
                value.valuation(),
                self.nr
            )));
        }
        Ok(GValue { value, requested: self.n_req })
    }

    /// Values at every element of `F_q`, indexed by element index.
    pub fn eval_all(&self) -> Result<Vec<GValue>> {
        (0..self.field.q())
            .into_par_iter()
            .map(|i| self.eval(self.field.elem(i)?))
            .collect()
    }
}

/// One-off evaluation of `nGn[spec | t]` to absolute precision `n_req`.
pub fn eval_g(field: &Arc<FieldDesc>, spec: &GSpec, t: FqElem, n_req: u32) -> Result<GValue> {
    GContext::new(field.clone()).kernel(spec, n_req)?.eval(t)
}
