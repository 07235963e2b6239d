use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ff::FieldDesc;
use crate::gauss::DEFAULT_TOL;

/// The verification suites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    Floors,
    GammaLemmas,
    GfunProps,
    SumEven,
    SumOdd,
    Transform2g2,
    Counts,
    Roots,
    Specials,
    GaussComplex,
    GrossKoblitz,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Floors,
        Suite::GammaLemmas,
        Suite::GfunProps,
        Suite::SumEven,
        Suite::SumOdd,
        Suite::Transform2g2,
        Suite::Counts,
        Suite::Roots,
        Suite::Specials,
        Suite::GaussComplex,
        Suite::GrossKoblitz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Floors => "floors",
            Suite::GammaLemmas => "gamma-lemmas",
            Suite::GfunProps => "gfun-props",
            Suite::SumEven => "sum-even",
            Suite::SumOdd => "sum-odd",
            Suite::Transform2g2 => "transform-2g2",
            Suite::Counts => "counts",
            Suite::Roots => "roots",
            Suite::Specials => "specials",
            Suite::GaussComplex => "gauss-complex",
            Suite::GrossKoblitz => "gross-koblitz",
        }
    }

    /// Degrees swept when none is given.
    pub fn default_degrees(self) -> &'static [u32] {
        match self {
            Suite::Floors => &[3, 4, 5, 6, 7],
            Suite::SumEven => &[4],
            Suite::SumOdd => &[3, 5],
            Suite::GfunProps | Suite::Counts | Suite::Roots => &[3, 4, 5],
            _ => &[],
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Suite::ALL.iter().map(|x| x.name()).collect();
            Error::Parse(format!("unknown suite {s:?}; expected one of {}", names.join(", ")))
        })
    }
}

/// Which `(a, b)` pairs in `(F_q^x)^2` a suite visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grid {
    Exhaustive,
    /// `k` distinct pairs drawn with [`Lcg`] from the configured seed.
    Sample(usize),
}

/// Fields up to this order are swept exhaustively by default.
pub const EXHAUSTIVE_MAX_Q: u32 = 13;
/// Default sample size above [`EXHAUSTIVE_MAX_Q`].
pub const DEFAULT_SAMPLE: usize = 50;
pub const DEFAULT_SEED: u64 = 1;

impl Grid {
    pub fn default_for(q: u32) -> Grid {
        if q <= EXHAUSTIVE_MAX_Q {
            Grid::Exhaustive
        } else {
            Grid::Sample(DEFAULT_SAMPLE)
        }
    }

    /// Indices into `0 .. n`, in visiting order. A sample at least as large
    /// as `n` degenerates to the exhaustive order.
    pub fn indices(self, n: u64, seed: u64) -> Vec<u64> {
        match self {
            Grid::Sample(k) if (k as u64) < n => {
                let mut rng = Lcg::new(seed);
                let mut seen = std::collections::HashSet::new();
                let mut out = Vec::with_capacity(k);
                while out.len() < k {
                    let i = rng.below(n);
                    if seen.insert(i) {
                        out.push(i);
                    }
                }
                out
            }
            _ => (0..n).collect(),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Exhaustive => f.write_str("exhaustive"),
            Grid::Sample(k) => write!(f, "sample:{k}"),
        }
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Grid> {
        if s == "exhaustive" {
            return Ok(Grid::Exhaustive);
        }
        let bad = || Error::Parse(format!("grid must be exhaustive or sample:K, got {s:?}"));
        let k = s.strip_prefix("sample:").ok_or_else(bad)?;
        let k: usize = k.parse().map_err(|_| bad())?;
        Ok(Grid::Sample(k))
    }
}

/// Knuth's MMIX linear congruential generator; each draw returns the high
/// 31 bits of the new state.
#[derive(Clone, Debug)]
pub struct Lcg(u64);

impl Lcg {
    pub const MULTIPLIER: u64 = 6364136223846793005;
    pub const INCREMENT: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        Lcg(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_mul(Self::MULTIPLIER).wrapping_add(Self::INCREMENT);
        self.0 >> 33
    }

    /// `next_u64() % n`; the modulo bias is accepted for reproducibility.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// Everything that determines a suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub p: u32,
    pub r: u32,
    /// `None` sweeps [`Suite::default_degrees`].
    pub d: Option<u32>,
    /// Requested absolute precision; for gross-koblitz, the pi-adic
    /// precision `M`.
    pub n_req: u32,
    pub grid: Grid,
    pub seed: u64,
    /// Tolerance of the complex oracle.
    pub tol: f64,
}

impl SuiteConfig {
    /// Default grid for the field size, default seed and tolerance.
    pub fn new(suite: Suite, p: u32, r: u32, n_req: u32) -> Self {
        let q = (p as u64).checked_pow(r).unwrap_or(u64::MAX).min(u32::MAX as u64) as u32;
        SuiteConfig {
            suite,
            p,
            r,
            d: None,
            n_req,
            grid: Grid::default_for(q),
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_d(mut self, d: u32) -> Self {
        self.d = Some(d);
        self
    }

    pub fn with_grid(mut self, grid: Grid) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Checks the configuration and builds the field.
    pub fn validate(&self) -> Result<FieldDesc> {
        let field = FieldDesc::build(self.p, self.r)?;
        let min_prec = if self.suite == Suite::GrossKoblitz { 2 } else { 1 };
        if self.n_req < min_prec {
            return Err(Error::Domain(format!(
                "precision must be at least {min_prec} for {}",
                self.suite
            )));
        }
        if self.p == 2 {
            return Err(Error::Unsupported("p must be odd".into()));
        }
        if let Grid::Sample(0) = self.grid {
            return Err(Error::Domain("sample size must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Domain("tolerance must be positive".into()));
        }
        if let Some(d) = self.d {
            let admissible = (d as u64 * (d as u64).saturating_sub(1)) % self.p as u64 != 0;
            let parity_ok = match self.suite {
                Suite::SumEven => d >= 4 && d % 2 == 0,
                Suite::SumOdd => d >= 3 && d % 2 == 1,
                _ => d >= 3,
            };
            if !parity_ok {
                return Err(Error::Domain(format!("degree {d} does not fit suite {}", self.suite)));
            }
            if !admissible && self.suite != Suite::GammaLemmas {
                return Err(Error::Unsupported(format!("p = {} divides d(d-1) for d = {d}", self.p)));
            }
        }
        if self.suite == Suite::Transform2g2 && self.p <= 3 {
            return Err(Error::Unsupported("the 2G2 transformation needs p > 3".into()));
        }
        Ok(field)
    }

    /// The degrees to sweep, explicit or default.
    pub fn degrees(&self) -> Vec<u32> {
        match self.d {
            Some(d) => vec![d],
            None => self.suite.default_degrees().to_vec(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn grid_parsing() {
        assert_eq!("exhaustive".parse::<Grid>().unwrap(), Grid::Exhaustive);
        assert_eq!("sample:30".parse::<Grid>().unwrap(), Grid::Sample(30));
        assert!("sample:x".parse::<Grid>().is_err());
        assert!("all".parse::<Grid>().is_err());
    }

    #[test]
    fn lcg_first_draws() {
        // state_1 = A + C for seed 0
        let mut g = Lcg::new(0);
        let s1 = Lcg::MULTIPLIER.wrapping_mul(0).wrapping_add(Lcg::INCREMENT);
        assert_eq!(g.next_u64(), s1 >> 33);
        let s2 = s1.wrapping_mul(Lcg::MULTIPLIER).wrapping_add(Lcg::INCREMENT);
        assert_eq!(g.next_u64(), s2 >> 33);
    }

    #[test]
    fn samples_are_distinct_and_reproducible() {
        let a = Grid::Sample(50).indices(24 * 24, 7);
        let b = Grid::Sample(50).indices(24 * 24, 7);
        assert_eq!(a, b);
        let set: std::collections::HashSet<_> = a.iter().collect();
        assert_eq!(set.len(), 50);
        assert!(a.iter().all(|&i| i < 576));
        assert_ne!(a, Grid::Sample(50).indices(576, 8));
        assert_eq!(Grid::Sample(100).indices(16, 1), (0..16).collect::<Vec<_>>());
    }

    #[test]
    fn validation() {
        assert!(SuiteConfig::new(Suite::Floors, 5, 1, 3).validate().is_ok());
        assert!(SuiteConfig::new(Suite::Floors, 6, 1, 3).validate().is_err());
        assert!(SuiteConfig::new(Suite::SumEven, 5, 1, 3).with_d(3).validate().is_err());
        assert!(SuiteConfig::new(Suite::SumOdd, 5, 1, 3).with_d(5).validate().is_err());
        assert!(SuiteConfig::new(Suite::Transform2g2, 3, 2, 3).validate().is_err());
        assert!(SuiteConfig::new(Suite::GrossKoblitz, 5, 1, 1).validate().is_err());
        assert!(SuiteConfig::new(Suite::Counts, 5, 1, 0).validate().is_err());
    }
}
