//! Mod-4 obstructions to `U_n(P, Q)` being a nonzero square.
//!
//! A perfect square is 0 or 1 mod 4, so whenever the hypotheses below force
//! `U_n` into residue 2 or 3 mod 4, `U_n` cannot be a nonzero square. The
//! criteria are one-directional: when none applies nothing is claimed.
//!
//! | id     | hypotheses                                          | `U_n mod 4` |
//! |--------|-----------------------------------------------------|-------------|
//! | `T31A` | P, Q, n odd; n = 3 (mod 6); Q = 3 (mod 4)           | 2           |
//! | `T31B` | P, Q, n odd; n = 5 (mod 6); Q = 1 (mod 4)           | 3           |
//! | `T32`  | P, n odd; n >= 3; Q = 2 (mod 4)                     | 3           |
//! | `T33`  | P = 3 (mod 4); n even, n >= 2; Q = 0 (mod 4)        | 3           |
//! | `T34`  | n = 2; P = 2 or 3 (mod 4)                           | P mod 4     |

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith::{self, Residue};
use crate::lucas::LucasParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CriterionId {
    T31A,
    T31B,
    T32,
    T33,
    T34,
}

impl CriterionId {
    pub const ALL: [CriterionId; 5] = [
        CriterionId::T31A,
        CriterionId::T31B,
        CriterionId::T32,
        CriterionId::T33,
        CriterionId::T34,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CriterionId::T31A => "T31A",
            CriterionId::T31B => "T31B",
            CriterionId::T32 => "T32",
            CriterionId::T33 => "T33",
            CriterionId::T34 => "T34",
        }
    }

    /// Whether the hypotheses hold, and if so the forced residue of `U_n` mod 4.
    pub fn predict(self, key: ResidueKey) -> Option<u64> {
        let ResidueKey {
            p4,
            q4,
            n_mod_12: n12,
            n,
        } = key;
        let p_odd = p4 % 2 == 1;
        let n_odd = n % 2 == 1;
        match self {
            CriterionId::T31A => (p_odd && n_odd && n12 % 6 == 3 && q4 == 3).then_some(2),
            CriterionId::T31B => (p_odd && n_odd && n12 % 6 == 5 && q4 == 1).then_some(3),
            CriterionId::T32 => (p_odd && n_odd && n >= 3 && q4 == 2).then_some(3),
            CriterionId::T33 => (p4 == 3 && !n_odd && n >= 2 && q4 == 0).then_some(3),
            CriterionId::T34 => (n == 2 && (p4 == 2 || p4 == 3)).then_some(p4),
        }
    }

    fn hypothesis_text(self, key: ResidueKey) -> String {
        let ResidueKey { p4, q4, n, .. } = key;
        match self {
            CriterionId::T31A => format!(
                "P, Q, n odd; n ≡ 3 (mod 6); Q ≡ 3 (mod 4)  [P ≡ {p4}, Q ≡ {q4} (mod 4), n = {n}]"
            ),
            CriterionId::T31B => format!(
                "P, Q, n odd; n ≡ 5 (mod 6); Q ≡ 1 (mod 4)  [P ≡ {p4}, Q ≡ {q4} (mod 4), n = {n}]"
            ),
            CriterionId::T32 => {
                format!("P, n odd; n ≥ 3; Q ≡ 2 (mod 4)  [P ≡ {p4}, Q ≡ {q4} (mod 4), n = {n}]")
            }
            CriterionId::T33 => format!(
                "P ≡ 3 (mod 4); n even, n ≥ 2; Q ≡ 0 (mod 4)  [P ≡ {p4}, Q ≡ {q4} (mod 4), n = {n}]"
            ),
            CriterionId::T34 => format!("n = 2; P ≡ 2 or 3 (mod 4)  [P ≡ {p4} (mod 4), n = {n}]"),
        }
    }
}

impl fmt::Display for CriterionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CriterionId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CriterionId::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown criterion {s:?}"))
    }
}

/// Everything the criteria look at: `P mod 4`, `Q mod 4`, and `n`. `n mod 12`
/// covers both the mod-6 and parity conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ResidueKey {
    pub p4: u64,
    pub q4: u64,
    pub n_mod_12: u64,
    pub n: u64,
}

impl ResidueKey {
    pub fn new(params: &LucasParams, n: u64) -> Self {
        let p4 = arith::mod_norm(&params.p, 4).expect("modulus 4").value();
        let q4 = arith::mod_norm(&params.q, 4).expect("modulus 4").value();
        Self::from_residues(p4, q4, n)
    }

    pub fn from_residues(p4: u64, q4: u64, n: u64) -> Self {
        Self {
            p4,
            q4,
            n_mod_12: n % 12,
            n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Conclusion {
    ProvedNonSquare,
    Inconclusive,
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conclusion::ProvedNonSquare => "PROVED_NON_SQUARE",
            Conclusion::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// The criteria that apply to one `(P, Q, n)` and what each forces `U_n mod 4` to be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionVerdict {
    pub key: ResidueKey,
    pub predicted: BTreeMap<CriterionId, Residue>,
}

impl CriterionVerdict {
    pub fn applicable(&self) -> impl Iterator<Item = CriterionId> + '_ {
        self.predicted.keys().copied()
    }

    pub fn conclusion(&self) -> Conclusion {
        if self.predicted.is_empty() {
            Conclusion::Inconclusive
        } else {
            Conclusion::ProvedNonSquare
        }
    }
}

pub fn classify(params: &LucasParams, n: u64) -> CriterionVerdict {
    classify_key(ResidueKey::new(params, n))
}

pub fn classify_key(key: ResidueKey) -> CriterionVerdict {
    let predicted = CriterionId::ALL
        .into_iter()
        .filter_map(|c| c.predict(key).map(|r| (c, Residue::new_unchecked(r, 4))))
        .collect();
    CriterionVerdict { key, predicted }
}

/// Human-readable rendering, one line per applicable criterion in id order.
pub fn explain(verdict: &CriterionVerdict) -> String {
    let mut out = String::new();
    if verdict.predicted.is_empty() {
        out.push_str("no criterion applies; U_n may or may not be a square (INCONCLUSIVE)\n");
        return out;
    }
    for (id, residue) in &verdict.predicted {
        let _ = writeln!(
            out,
            "{id}: {} => U_n ≡ {} (mod 4), not a square",
            id.hypothesis_text(verdict.key),
            residue.value()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::is_nonzero_square;
    use crate::lucas::{u_mod, u_rec, Terms};

    fn verdict(p: i64, q: i64, n: u64) -> CriterionVerdict {
        classify(&LucasParams::new(p, q), n)
    }

    fn ids(v: &CriterionVerdict) -> Vec<CriterionId> {
        v.applicable().collect()
    }

    #[test]
    fn worked_examples() {
        let v = verdict(1, 3, 9);
        assert_eq!(ids(&v), vec![CriterionId::T31A]);
        assert_eq!(v.predicted[&CriterionId::T31A].value(), 2);
        assert_eq!(v.conclusion(), Conclusion::ProvedNonSquare);

        let v = verdict(1, 1, 7);
        assert!(ids(&v).is_empty());
        assert_eq!(v.conclusion(), Conclusion::Inconclusive);

        let v = verdict(5, 2, 5);
        assert_eq!(ids(&v), vec![CriterionId::T32]);
        assert_eq!(v.predicted[&CriterionId::T32].value(), 3);

        let v = verdict(3, 4, 4);
        assert_eq!(ids(&v), vec![CriterionId::T33]);
        assert_eq!(v.predicted[&CriterionId::T33].value(), 3);
        assert_eq!(u_rec(&LucasParams::new(3, 4), 4), 3.into());

        // Q = 0 is also 0 (mod 4) with P = 3 (mod 4) and n even, so T33 applies too.
        let v = verdict(7, 0, 2);
        assert_eq!(ids(&v), vec![CriterionId::T33, CriterionId::T34]);
        assert_eq!(v.predicted[&CriterionId::T34].value(), 3);
        assert_eq!(ids(&verdict(7, 1, 2)), vec![CriterionId::T34]);
    }

    #[test]
    fn negative_parameters_use_normalized_residues() {
        // P = -1 is 3 (mod 4).
        assert_eq!(ids(&verdict(-1, -4, 6)), vec![CriterionId::T33]);
        assert_eq!(ids(&verdict(-1, -1, 9)), vec![CriterionId::T31A]);
        assert_eq!(ids(&verdict(-2, 5, 2)), vec![CriterionId::T34]);
    }

    #[test]
    fn index_zero_and_one_are_inconclusive() {
        for p in -8..=8 {
            for q in -8..=8 {
                assert!(ids(&verdict(p, q, 0)).is_empty());
                assert!(ids(&verdict(p, q, 1)).is_empty());
            }
        }
    }

    #[test]
    fn t33_and_t34_overlap_at_two() {
        let v = verdict(3, 8, 2);
        assert_eq!(ids(&v), vec![CriterionId::T33, CriterionId::T34]);
        assert!(v.predicted.values().all(|r| r.value() == 3));
    }

    #[test]
    fn explain_rendering() {
        let text = explain(&verdict(1, 3, 9));
        assert!(text.contains("n ≡ 3 (mod 6)"));
        assert!(text.contains("Q ≡ 3 (mod 4)"));
        assert!(explain(&verdict(1, 1, 7)).contains("no criterion applies"));
        let both = explain(&verdict(-1, 0, 2));
        let t33 = both.find("T33").unwrap();
        let t34 = both.find("T34").unwrap();
        assert!(t33 < t34);
    }

    #[test]
    fn parse_ids() {
        assert_eq!("t31b".parse::<CriterionId>(), Ok(CriterionId::T31B));
        assert!("T35".parse::<CriterionId>().is_err());
    }

    #[test]
    fn residue_soundness() {
        for p in -20..=20 {
            for q in -20..=20 {
                let pq = LucasParams::new(p, q);
                for n in 0..=600 {
                    let v = classify(&pq, n);
                    for (id, r) in &v.predicted {
                        assert!(matches!(r.value(), 2 | 3), "{id}");
                        assert_eq!(u_mod(&pq, n, 4).unwrap(), *r, "{id} {pq} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn non_square_soundness() {
        for p in -10..=10 {
            for q in -10..=10 {
                let pq = LucasParams::new(p, q);
                for (n, u) in Terms::new(&pq).take(201).enumerate() {
                    if classify(&pq, n as u64).conclusion() == Conclusion::ProvedNonSquare {
                        assert!(!is_nonzero_square(&u), "{pq} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn mutually_exclusive_odd_criteria() {
        for p4 in 0..4 {
            for q4 in 0..4 {
                for n in 0..48 {
                    let v = classify_key(ResidueKey::from_residues(p4, q4, n));
                    let odd = [CriterionId::T31A, CriterionId::T31B, CriterionId::T32];
                    assert!(odd.iter().filter(|c| v.predicted.contains_key(c)).count() <= 1);
                }
            }
        }
    }

    #[test]
    fn shifting_by_four_keeps_verdict() {
        for p in -12..=12i64 {
            for q in -12..=12i64 {
                for n in 0..30 {
                    let base = ids(&verdict(p, q, n));
                    assert_eq!(base, ids(&verdict(p + 4 * 7, q, n)));
                    assert_eq!(base, ids(&verdict(p, q - 4 * 3, n)));
                }
            }
        }
    }
}
