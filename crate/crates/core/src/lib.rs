//! Lucas sequences of the first kind, `U_0 = 0`, `U_1 = 1`,
//! `U_n = P*U_{n-1} - Q*U_{n-2}`.
//!
//! - [`lucas`]: exact evaluation by recurrence, binomial closed form and
//!   companion-matrix powering, plus a word-size `U_n mod m` fast path.
//! - [`periods`]: preperiod and period of `U_n mod m`.
//! - [`criteria`]: mod-4 residue obstructions that prove `U_n` is not a
//!   nonzero square.
//! - [`verify`]: exhaustive grid sweeps and square censuses.
//! - [`cli`]: the `lucas` command-line tool.

pub mod arith;
pub mod cli;
pub mod criteria;
pub mod error;
pub mod lucas;
pub mod periods;
pub mod report;
pub mod verify;

pub use arith::Residue;
pub use criteria::{classify, CriterionId, CriterionVerdict};
pub use error::{Error, Result};
pub use lucas::{u_closed, u_matrix, u_mod, u_rec, LucasParams};
pub use periods::{period_mod, residues_mod, PeriodInfo};
pub use verify::{CensusReport, GridSpec, VerificationReport};
