//! Exhaustive grid checks: evaluator agreement, the mod-4 criteria, square
//! censuses, and the `{1, 2, 3, 6, 12}` square-index bound for odd coprime
//! parameters with positive discriminant.
//!
//! Grid points are independent and are evaluated with rayon; every report is
//! sorted by `(P, Q, n)` so output does not depend on the thread count.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, exact_sqrt, is_nonzero_square};
use crate::criteria::{CriterionId, ResidueKey};
use crate::error::{Error, Result};
use crate::lucas::{self, u_closed, u_matrix, LucasParams, Terms};

/// Square indices allowed for odd coprime `(P, Q)` with `P^2 - 4Q > 0`.
/// Index 0 is left out: `U_0 = 0` is not a nonzero square.
pub const RM_SQUARE_INDICES: [u64; 5] = [1, 2, 3, 6, 12];

/// What a [`VerificationReport`] covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Check {
    Criterion(CriterionId),
    Equivalence,
    RmSubset,
    WorkedExamples,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Check::Criterion(c) => f.write_str(c.as_str()),
            Check::Equivalence => f.write_str("EQUIVALENCE"),
            Check::RmSubset => f.write_str("RM_SUBSET"),
            Check::WorkedExamples => f.write_str("WORKED_EXAMPLES"),
        }
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "EQUIVALENCE" => Ok(Check::Equivalence),
            "RM_SUBSET" => Ok(Check::RmSubset),
            "WORKED_EXAMPLES" => Ok(Check::WorkedExamples),
            other => other.parse().map(Check::Criterion),
        }
    }
}

impl Serialize for Check {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Check {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The `(P, Q, n)` grid a criterion is swept over.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSpec {
    pub p_values: Vec<i64>,
    pub q_values: Vec<i64>,
    pub n_min: u64,
    pub n_max: u64,
    /// Largest `n` at which `U_n` is computed exactly and square-tested.
    pub direct_limit: u64,
}

impl GridSpec {
    pub fn new(
        p_values: Vec<i64>,
        q_values: Vec<i64>,
        n_min: u64,
        n_max: u64,
        direct_limit: u64,
    ) -> Result<Self> {
        if n_min > n_max {
            return Err(Error::InvalidGrid(format!(
                "empty n range [{n_min}, {n_max}]"
            )));
        }
        if direct_limit > n_max {
            return Err(Error::InvalidGrid(format!(
                "direct limit {direct_limit} exceeds n upper bound {n_max}"
            )));
        }
        Ok(Self {
            p_values,
            q_values,
            n_min,
            n_max,
            direct_limit,
        })
    }

    /// `P` in `[-p_bound, p_bound]`, `Q` in `[-q_bound, q_bound]`, `n` in `[0, n_max]`.
    pub fn symmetric(p_bound: u32, q_bound: u32, n_max: u64, direct_limit: u64) -> Result<Self> {
        let range = |b: u32| (-i64::from(b)..=i64::from(b)).collect::<Vec<_>>();
        Self::new(range(p_bound), range(q_bound), 0, n_max, direct_limit)
    }

    fn pairs(&self) -> Vec<(i64, i64)> {
        let mut p = self.p_values.clone();
        let mut q = self.q_values.clone();
        p.sort_unstable();
        p.dedup();
        q.sort_unstable();
        q.dedup();
        p.iter()
            .flat_map(|&p| q.iter().map(move |&q| (p, q)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ResidueMismatch {
    pub p: i64,
    pub q: i64,
    pub n: u64,
    pub expected: u64,
    pub actual: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SquareViolation {
    pub p: i64,
    pub q: i64,
    pub n: u64,
    #[serde(with = "crate::report::bigint_str")]
    pub value: BigInt,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EvaluatorMismatch {
    pub p: i64,
    pub q: i64,
    pub n: u64,
    #[serde(with = "crate::report::bigint_str")]
    pub recurrence: BigInt,
    #[serde(with = "crate::report::bigint_str")]
    pub closed_form: BigInt,
    #[serde(with = "crate::report::bigint_str")]
    pub matrix: BigInt,
}

/// Outcome of one sweep. All failure lists empty means the check held.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: Check,
    pub triples_checked: u64,
    pub residue_mismatches: Vec<ResidueMismatch>,
    pub square_violations: Vec<SquareViolation>,
    pub evaluator_mismatches: Vec<EvaluatorMismatch>,
}

impl VerificationReport {
    fn empty(check: Check) -> Self {
        Self {
            check,
            triples_checked: 0,
            residue_mismatches: Vec::new(),
            square_violations: Vec::new(),
            evaluator_mismatches: Vec::new(),
        }
    }

    pub fn failure_count(&self) -> usize {
        self.residue_mismatches.len()
            + self.square_violations.len()
            + self.evaluator_mismatches.len()
    }

    pub fn passed(&self) -> bool {
        self.failure_count() == 0
    }

    fn absorb(&mut self, other: VerificationReport) {
        self.triples_checked += other.triples_checked;
        self.residue_mismatches.extend(other.residue_mismatches);
        self.square_violations.extend(other.square_violations);
        self.evaluator_mismatches.extend(other.evaluator_mismatches);
    }

    fn sort(&mut self) {
        self.residue_mismatches.sort();
        self.square_violations.sort();
        self.evaluator_mismatches.sort();
    }

    fn merge(check: Check, parts: impl IntoIterator<Item = VerificationReport>) -> Self {
        let mut out = Self::empty(check);
        for part in parts {
            out.absorb(part);
        }
        out.sort();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareIndex {
    pub n: u64,
    #[serde(with = "crate::report::bigint_str")]
    pub root: BigInt,
}

/// Indices `n <= n_max` where `U_n` is zero or a nonzero square.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusReport {
    pub params: LucasParams,
    pub n_max: u64,
    pub zero_indices: Vec<u64>,
    pub square_indices: Vec<SquareIndex>,
}

impl CensusReport {
    pub fn square_set(&self) -> Vec<u64> {
        self.square_indices.iter().map(|s| s.n).collect()
    }
}

/// Checks `u_rec = u_closed = u_matrix` for every `P` in `[-p_bound, p_bound]`,
/// `Q` in `[-q_bound, q_bound]` and `n` in `[1, n_max]`.
pub fn check_equivalence(p_bound: u32, q_bound: u32, n_max: u64) -> VerificationReport {
    let grid = GridSpec::symmetric(p_bound, q_bound, n_max, 0).expect("n range starts at 0");
    let parts: Vec<_> = grid
        .pairs()
        .into_par_iter()
        .map(|(p, q)| {
            let params = LucasParams::new(p, q);
            let mut part = VerificationReport::empty(Check::Equivalence);
            for (n, rec) in Terms::new(&params).enumerate().skip(1).take(n_max as usize) {
                let n = n as u64;
                let closed = u_closed(&params, n).expect("n >= 1");
                let matrix = u_matrix(&params, n);
                part.triples_checked += 1;
                if closed != rec || matrix != rec {
                    part.evaluator_mismatches.push(EvaluatorMismatch {
                        p,
                        q,
                        n,
                        recurrence: rec,
                        closed_form: closed,
                        matrix,
                    });
                }
            }
            part
        })
        .collect();
    VerificationReport::merge(Check::Equivalence, parts)
}

/// Sweeps one criterion over a grid. See [`verify_criteria`].
pub fn verify_criterion(criterion: CriterionId, grid: &GridSpec) -> VerificationReport {
    verify_criteria(&[criterion], grid)
        .pop()
        .expect("one report per criterion")
}

/// For every grid triple satisfying a criterion's hypotheses, checks that
/// `U_n mod 4` is the predicted residue and, for `n <= direct_limit`, that
/// the exact `U_n` is not a nonzero square. One report per criterion, in the
/// order given.
pub fn verify_criteria(criteria: &[CriterionId], grid: &GridSpec) -> Vec<VerificationReport> {
    let per_pair: Vec<Vec<VerificationReport>> = grid
        .pairs()
        .into_par_iter()
        .map(|(p, q)| sweep_pair(criteria, grid, p, q))
        .collect();

    criteria
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            VerificationReport::merge(
                Check::Criterion(c),
                per_pair.iter().map(|reports| reports[i].clone()),
            )
        })
        .collect()
}

fn sweep_pair(
    criteria: &[CriterionId],
    grid: &GridSpec,
    p: i64,
    q: i64,
) -> Vec<VerificationReport> {
    let p4 = p.rem_euclid(4) as u64;
    let q4 = q.rem_euclid(4) as u64;
    let params = LucasParams::new(p, q);
    let mut terms = Terms::new(&params);
    // exact[k] = U_k, extended on demand up to the direct limit.
    let mut exact: Vec<BigInt> = Vec::new();

    let mut reports: Vec<_> = criteria
        .iter()
        .map(|&c| VerificationReport::empty(Check::Criterion(c)))
        .collect();

    for n in grid.n_min..=grid.n_max {
        let key = ResidueKey::from_residues(p4, q4, n);
        let actual = lucas::u_mod_words(p4, q4, n, 4);
        for (report, &criterion) in reports.iter_mut().zip(criteria) {
            let Some(expected) = criterion.predict(key) else {
                continue;
            };
            report.triples_checked += 1;
            if actual != expected {
                report.residue_mismatches.push(ResidueMismatch {
                    p,
                    q,
                    n,
                    expected,
                    actual,
                });
            }
            if n <= grid.direct_limit {
                while exact.len() <= n as usize {
                    exact.push(terms.next().expect("infinite iterator"));
                }
                let value = &exact[n as usize];
                if is_nonzero_square(value) {
                    report.square_violations.push(SquareViolation {
                        p,
                        q,
                        n,
                        value: value.clone(),
                    });
                }
            }
        }
    }
    reports
}

/// Zero and nonzero-square indices of `U_0 .. U_{n_max}`.
pub fn census(params: &LucasParams, n_max: u64) -> CensusReport {
    let mut zero_indices = Vec::new();
    let mut square_indices = Vec::new();
    for (n, u) in Terms::new(params).take(n_max as usize + 1).enumerate() {
        if u.is_zero() {
            zero_indices.push(n as u64);
        } else if let Some(root) = exact_sqrt(&u) {
            square_indices.push(SquareIndex { n: n as u64, root });
        }
    }
    CensusReport {
        params: params.clone(),
        n_max,
        zero_indices,
        square_indices,
    }
}

/// Odd `P` in `[1, p_max]`, odd `Q` in `[-q_bound, q_bound]`, coprime, with
/// `P^2 - 4Q > 0`.
pub fn rm_parameters(p_max: u32, q_bound: u32) -> Vec<(i64, i64)> {
    let q_bound = i64::from(q_bound);
    (1..=i64::from(p_max))
        .filter(|p| p % 2 != 0)
        .flat_map(|p| {
            (-q_bound..=q_bound)
                .filter(move |q| q % 2 != 0 && p.gcd(q) == 1 && p * p - 4 * q > 0)
                .map(move |q| (p, q))
        })
        .collect()
}

/// Censuses every parameter pair from [`rm_parameters`] and flags square
/// indices outside [`RM_SQUARE_INDICES`].
pub fn check_rm_subset(p_max: u32, q_bound: u32, n_max: u64) -> VerificationReport {
    let parts: Vec<_> = rm_parameters(p_max, q_bound)
        .into_par_iter()
        .map(|(p, q)| {
            let params = LucasParams::new(p, q);
            let report = census(&params, n_max);
            let mut part = VerificationReport::empty(Check::RmSubset);
            part.triples_checked = n_max + 1;
            for sq in &report.square_indices {
                if !RM_SQUARE_INDICES.contains(&sq.n) {
                    part.square_violations.push(SquareViolation {
                        p,
                        q,
                        n: sq.n,
                        value: &sq.root * &sq.root,
                    });
                }
            }
            part
        })
        .collect();
    VerificationReport::merge(Check::RmSubset, parts)
}

/// A hand-worked mod-4 computation for odd `P`, odd `Q`: for this `n` and,
/// when given, this residue of `Q`, `U_n mod 4` equals `residue`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WorkedExample {
    pub n: u64,
    pub q_mod4: Option<u64>,
    pub residue: u64,
}

pub const WORKED_EXAMPLES: [WorkedExample; 8] = [
    WorkedExample {
        n: 3,
        q_mod4: Some(3),
        residue: 2,
    },
    WorkedExample {
        n: 5,
        q_mod4: Some(1),
        residue: 3,
    },
    WorkedExample {
        n: 7,
        q_mod4: None,
        residue: 1,
    },
    WorkedExample {
        n: 9,
        q_mod4: Some(3),
        residue: 2,
    },
    WorkedExample {
        n: 11,
        q_mod4: Some(1),
        residue: 3,
    },
    WorkedExample {
        n: 13,
        q_mod4: None,
        residue: 1,
    },
    WorkedExample {
        n: 15,
        q_mod4: Some(3),
        residue: 2,
    },
    WorkedExample {
        n: 17,
        q_mod4: Some(1),
        residue: 3,
    },
];

/// Draws `samples` random odd `(P, Q)` per worked example (with `Q` in the
/// stated class) and checks `U_n mod 4` through the fast path.
pub fn check_worked_examples(samples: usize, seed: u64) -> VerificationReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = VerificationReport::empty(Check::WorkedExamples);
    const SPAN: i64 = 1 << 40;
    for ex in WORKED_EXAMPLES {
        for _ in 0..samples {
            let p = 2 * rng.gen_range(-SPAN..SPAN) + 1;
            let q = loop {
                let q = 2 * rng.gen_range(-SPAN..SPAN) + 1;
                if ex.q_mod4.is_none_or(|r| q.rem_euclid(4) as u64 == r) {
                    break q;
                }
            };
            let actual = lucas::u_mod(&LucasParams::new(p, q), ex.n, 4)
                .expect("modulus 4")
                .value();
            report.triples_checked += 1;
            if actual != ex.residue {
                report.residue_mismatches.push(ResidueMismatch {
                    p,
                    q,
                    n: ex.n,
                    expected: ex.residue,
                    actual,
                });
            }
        }
    }
    report.sort();
    report
}

/// Exact `U_n mod 4` from the expanded polynomial, used to double-check the
/// worked examples with a route that never touches the matrix path.
pub fn worked_example_direct(p: i64, q: i64, n: u64) -> u64 {
    let value = u_closed(&LucasParams::new(p, q), n).expect("n >= 1");
    arith::mod_norm(&value, 4).expect("modulus 4").value()
}
