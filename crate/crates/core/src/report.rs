//! Output records and their text / JSON-lines / CSV renderings.
//!
//! Big integers are written as decimal strings in JSON so values of any size
//! survive a round trip through ordinary JSON tooling.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::criteria::{self, Conclusion, CriterionId, CriterionVerdict};
use crate::lucas::LucasParams;
use crate::periods::PeriodInfo;
use crate::verify::{CensusReport, VerificationReport};

pub mod bigint_str {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

mod opt_bigint_str {
    use num_bigint::BigInt;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.collect_str(v),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| s.parse().map_err(de::Error::custom))
            .transpose()
    }
}

/// Something the CLI can print in any of its output formats.
pub trait Render {
    fn text(&self) -> String;

    /// One JSON object per line.
    fn json_lines(&self) -> Vec<String>;

    fn csv_header(&self) -> Vec<&'static str>;

    fn csv_rows(&self) -> Vec<Vec<String>>;
}

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("records serialize")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComputeRecord {
    #[serde(flatten)]
    pub params: LucasParams,
    pub n: u64,
    pub method: String,
    pub digits: usize,
    /// Omitted when only the digit count was requested.
    #[serde(with = "opt_bigint_str")]
    pub value: Option<BigInt>,
}

/// Decimal digit count of `|v|`.
pub fn decimal_digits(v: &BigInt) -> usize {
    let s = v.magnitude().to_str_radix(10);
    s.len()
}

impl Render for ComputeRecord {
    fn text(&self) -> String {
        match &self.value {
            Some(v) => format!("{v}\n"),
            None => format!("{}\n", self.digits),
        }
    }

    fn json_lines(&self) -> Vec<String> {
        vec![to_json(self)]
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["p", "q", "n", "method", "digits", "value"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.params.p.to_string(),
            self.params.q.to_string(),
            self.n.to_string(),
            self.method.clone(),
            self.digits.to_string(),
            self.value
                .as_ref()
                .map(ToString::to_string)
                .unwrap_or_default(),
        ]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModRecord {
    #[serde(flatten)]
    pub params: LucasParams,
    pub n: u64,
    pub modulus: u64,
    pub residue: u64,
}

impl Render for ModRecord {
    fn text(&self) -> String {
        format!("{}\n", self.residue)
    }

    fn json_lines(&self) -> Vec<String> {
        vec![to_json(self)]
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["p", "q", "n", "modulus", "residue"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.params.p.to_string(),
            self.params.q.to_string(),
            self.n.to_string(),
            self.modulus.to_string(),
            self.residue.to_string(),
        ]]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodRecord {
    #[serde(flatten)]
    pub params: LucasParams,
    #[serde(flatten)]
    pub info: PeriodInfo,
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl Render for PeriodRecord {
    fn text(&self) -> String {
        let i = &self.info;
        let mut s = String::new();
        let _ = writeln!(s, "U_n{} mod {}", self.params, i.modulus);
        let _ = writeln!(s, "preperiod: {}", i.preperiod);
        let _ = writeln!(s, "period: {}", i.period);
        let _ = writeln!(s, "prefix (from n=0): [{}]", join(&i.prefix));
        let _ = writeln!(s, "cycle (from n={}): [{}]", i.preperiod, join(&i.cycle));
        s
    }

    fn json_lines(&self) -> Vec<String> {
        vec![to_json(self)]
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["p", "q", "modulus", "n", "segment", "residue"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let i = &self.info;
        let segment = |k: u64| if k < i.preperiod { "prefix" } else { "cycle" };
        (0..i.preperiod + i.period)
            .map(|k| {
                vec![
                    self.params.p.to_string(),
                    self.params.q.to_string(),
                    i.modulus.to_string(),
                    k.to_string(),
                    segment(k).to_string(),
                    i.residue_at(k).to_string(),
                ]
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyRecord {
    #[serde(flatten)]
    pub params: LucasParams,
    pub n: u64,
    pub applicable: Vec<CriterionId>,
    pub predicted_residues_mod4: BTreeMap<CriterionId, u64>,
    pub conclusion: Conclusion,
    #[serde(skip)]
    pub explanation: String,
}

impl ClassifyRecord {
    pub fn new(params: LucasParams, n: u64, verdict: &CriterionVerdict) -> Self {
        Self {
            params,
            n,
            applicable: verdict.applicable().collect(),
            predicted_residues_mod4: verdict
                .predicted
                .iter()
                .map(|(id, r)| (*id, r.value()))
                .collect(),
            conclusion: verdict.conclusion(),
            explanation: criteria::explain(verdict),
        }
    }
}

impl Render for ClassifyRecord {
    fn text(&self) -> String {
        format!(
            "U_{}{}: {}\n{}",
            self.n, self.params, self.conclusion, self.explanation
        )
    }

    fn json_lines(&self) -> Vec<String> {
        vec![to_json(self)]
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "p",
            "q",
            "n",
            "criterion",
            "predicted_residue_mod4",
            "conclusion",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let row = |c: String, r: String| {
            vec![
                self.params.p.to_string(),
                self.params.q.to_string(),
                self.n.to_string(),
                c,
                r,
                self.conclusion.to_string(),
            ]
        };
        if self.predicted_residues_mod4.is_empty() {
            return vec![row(String::new(), String::new())];
        }
        self.predicted_residues_mod4
            .iter()
            .map(|(c, r)| row(c.to_string(), r.to_string()))
            .collect()
    }
}

impl Render for Vec<VerificationReport> {
    fn text(&self) -> String {
        let mut s = String::new();
        for r in self {
            let status = if r.passed() { "PASS" } else { "FAIL" };
            let _ = writeln!(
                s,
                "{status} {}: {} triples checked, {} residue mismatches, {} square violations, {} evaluator mismatches",
                r.check,
                r.triples_checked,
                r.residue_mismatches.len(),
                r.square_violations.len(),
                r.evaluator_mismatches.len()
            );
            for m in &r.residue_mismatches {
                let _ = writeln!(
                    s,
                    "  residue: P={} Q={} n={} expected {} got {}",
                    m.p, m.q, m.n, m.expected, m.actual
                );
            }
            for v in &r.square_violations {
                let _ = writeln!(s, "  square: P={} Q={} n={} U_n={}", v.p, v.q, v.n, v.value);
            }
            for e in &r.evaluator_mismatches {
                let _ = writeln!(
                    s,
                    "  evaluators: P={} Q={} n={} rec={} closed={} matrix={}",
                    e.p, e.q, e.n, e.recurrence, e.closed_form, e.matrix
                );
            }
        }
        s
    }

    fn json_lines(&self) -> Vec<String> {
        self.iter().map(to_json).collect()
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec![
            "check",
            "triples_checked",
            "residue_mismatches",
            "square_violations",
            "evaluator_mismatches",
            "passed",
        ]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                vec![
                    r.check.to_string(),
                    r.triples_checked.to_string(),
                    r.residue_mismatches.len().to_string(),
                    r.square_violations.len().to_string(),
                    r.evaluator_mismatches.len().to_string(),
                    r.passed().to_string(),
                ]
            })
            .collect()
    }
}

impl Render for CensusReport {
    fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "census of U_n{} for 0 <= n <= {}",
            self.params, self.n_max
        );
        let zeros: Vec<String> = self.zero_indices.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "zero at n = [{}]", zeros.join(", "));
        for sq in &self.square_indices {
            let _ = writeln!(s, "square at n = {}: U_n = {}^2", sq.n, sq.root);
        }
        s
    }

    fn json_lines(&self) -> Vec<String> {
        vec![to_json(self)]
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["p", "q", "kind", "n", "root"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        let p = self.params.p.to_string();
        let q = self.params.q.to_string();
        let zeros = self.zero_indices.iter().map(|n| {
            vec![
                p.clone(),
                q.clone(),
                "zero".into(),
                n.to_string(),
                String::new(),
            ]
        });
        let squares = self.square_indices.iter().map(|sq| {
            vec![
                p.clone(),
                q.clone(),
                "square".into(),
                sq.n.to_string(),
                sq.root.to_string(),
            ]
        });
        zeros.chain(squares).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub evaluator: String,
    pub n: u64,
    pub digits: usize,
    pub micros: u128,
}

impl Render for Vec<BenchRow> {
    fn text(&self) -> String {
        let mut s = format!(
            "{:<10} {:>20} {:>10} {:>14}\n",
            "evaluator", "n", "digits", "time (us)"
        );
        for r in self {
            let _ = writeln!(
                s,
                "{:<10} {:>20} {:>10} {:>14}",
                r.evaluator, r.n, r.digits, r.micros
            );
        }
        s
    }

    fn json_lines(&self) -> Vec<String> {
        self.iter().map(to_json).collect()
    }

    fn csv_header(&self) -> Vec<&'static str> {
        vec!["evaluator", "n", "digits", "micros"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|r| {
                vec![
                    r.evaluator.clone(),
                    r.n.to_string(),
                    r.digits.to_string(),
                    r.micros.to_string(),
                ]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify;

    #[test]
    fn compute_record_round_trips() {
        let rec = ComputeRecord {
            params: LucasParams::new(1, -1),
            n: 12,
            method: "rec".into(),
            digits: 3,
            value: Some(144.into()),
        };
        let line = &rec.json_lines()[0];
        assert_eq!(
            line,
            r#"{"p":"1","q":"-1","n":12,"method":"rec","digits":3,"value":"144"}"#
        );
        let back: ComputeRecord = serde_json::from_str(line).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn digits() {
        assert_eq!(decimal_digits(&BigInt::from(0)), 1);
        assert_eq!(decimal_digits(&BigInt::from(-144)), 3);
        assert_eq!(decimal_digits(&BigInt::from(10).pow(50)), 51);
    }

    #[test]
    fn census_csv_rows() {
        let c = verify::census(&LucasParams::new(1, -1), 12);
        let rows = c.csv_rows();
        assert_eq!(rows[0], vec!["1", "-1", "zero", "0", ""]);
        assert_eq!(rows.last().unwrap(), &vec!["1", "-1", "square", "12", "12"]);
    }
}
