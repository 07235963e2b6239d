//! Exact arithmetic for the p-adic hypergeometric function `nGn` over finite
//! fields `F_q`, together with brute-force oracles and a verification harness
//! for the summation identities, point-count formulas, transformations and
//! special values that this function satisfies.
//!
//! Layering, bottom up:
//!
//! - [`ff`]: deterministic `F_{p^r}` with discrete-log tables and characters
//!   written as exponents.
//! - [`padic`]: fixed-precision `Q_p`, `Q_q` and the ramified ring
//!   `Z_q[pi]/(pi^(p-1) + p)`; Teichmüller lifts.
//! - [`gammap`]: Morita's p-adic gamma function.
//! - [`gfun`]: the `nGn` function itself.
//! - [`counts`]: curve points, polynomial roots and power equations by brute
//!   force, next to their closed-form predictions.
//! - [`gauss`]: Gauss sums through a complex embedding and through
//!   Gross–Koblitz in the pi-adic ring.
//! - [`harness`]: parameter sweeps and JSON reports.

pub mod counts;
pub mod error;
pub mod ff;
pub mod gammap;
pub mod gauss;
pub mod gfun;
pub mod harness;
pub mod padic;

pub use error::{Error, Result};
pub use ff::{FieldDesc, FqElem};
pub use padic::{ExactRational, PrimePower, QpNum, QqNum, Zq};
