//! Eventual periods of `U_n mod m`.
//!
//! The sequence mod `m` is driven by the state pair `(U_k, U_{k+1}) mod m`,
//! which takes at most `m^2` values, so it is eventually periodic. Because
//! `U_{k+d} = U_k` for all `k >= mu` holds exactly when the state pairs repeat
//! with the same shift, the minimal preperiod and period of the state orbit are
//! also the minimal ones of the residue sequence.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arith::{self, check_modulus, Residue};
use crate::error::Result;
use crate::lucas::LucasParams;

/// Largest modulus for which the visited-state table is used; larger moduli
/// use Brent's algorithm.
pub const VISITED_MAP_LIMIT: u64 = 4096;

/// Preperiod, period, and residues of `U_n mod m`, anchored at `n = 0`.
///
/// For `k < preperiod`, `U_k = prefix[k]`; for `k >= preperiod`,
/// `U_k = cycle[(k - preperiod) % period]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodInfo {
    pub modulus: u64,
    pub preperiod: u64,
    pub period: u64,
    pub prefix: Vec<u64>,
    pub cycle: Vec<u64>,
}

impl PeriodInfo {
    /// `U_k mod m` reconstructed from the prefix and cycle.
    pub fn residue_at(&self, k: u64) -> u64 {
        if k < self.preperiod {
            self.prefix[k as usize]
        } else {
            self.cycle[((k - self.preperiod) % self.period) as usize]
        }
    }

    /// The cycle as the same rotation a table starting at `n = 1` would show.
    pub fn cycle_from_one(&self) -> Vec<u64> {
        let len = self.period;
        (0..len)
            .map(|i| self.residue_at(self.preperiod.max(1) + i))
            .collect()
    }
}

#[derive(Clone, Copy)]
struct StateMap {
    p: u64,
    q_neg: u64,
    m: u64,
}

impl StateMap {
    fn new(params: &LucasParams, m: u64) -> Result<Self> {
        let p = arith::mod_norm(&params.p, m)?.value();
        let q = arith::mod_norm(&params.q, m)?.value();
        Ok(Self {
            p,
            q_neg: (m - q) % m,
            m,
        })
    }

    fn start(&self) -> (u64, u64) {
        (0, 1 % self.m)
    }

    fn step(&self, (a, b): (u64, u64)) -> (u64, u64) {
        let m = u128::from(self.m);
        let next =
            (u128::from(self.p) * u128::from(b) + u128::from(self.q_neg) * u128::from(a)) % m;
        (b, next as u64)
    }
}

/// Minimal preperiod and period of `U_n mod m`, plus the residues covering both.
pub fn period_mod(params: &LucasParams, m: u64) -> Result<PeriodInfo> {
    check_modulus(m)?;
    let map = StateMap::new(params, m)?;
    let (preperiod, period) = if m <= VISITED_MAP_LIMIT {
        find_cycle_visited(map)
    } else {
        find_cycle_brent(map)
    };

    let mut residues = Vec::with_capacity((preperiod + period) as usize);
    let mut state = map.start();
    for _ in 0..preperiod + period {
        residues.push(state.0);
        state = map.step(state);
    }
    let cycle = residues.split_off(preperiod as usize);
    Ok(PeriodInfo {
        modulus: m,
        preperiod,
        period,
        prefix: residues,
        cycle,
    })
}

fn find_cycle_visited(map: StateMap) -> (u64, u64) {
    let mut seen: HashMap<(u64, u64), u64> = HashMap::new();
    let mut state = map.start();
    let mut k = 0u64;
    loop {
        if let Some(&first) = seen.get(&state) {
            return (first, k - first);
        }
        seen.insert(state, k);
        state = map.step(state);
        k += 1;
    }
}

fn find_cycle_brent(map: StateMap) -> (u64, u64) {
    let x0 = map.start();
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = x0;
    let mut hare = map.step(x0);
    while tortoise != hare {
        if power == lam {
            tortoise = hare;
            power *= 2;
            lam = 0;
        }
        hare = map.step(hare);
        lam += 1;
    }

    let mut tortoise = x0;
    let mut hare = x0;
    for _ in 0..lam {
        hare = map.step(hare);
    }
    let mut mu = 0u64;
    while tortoise != hare {
        tortoise = map.step(tortoise);
        hare = map.step(hare);
        mu += 1;
    }
    (mu, lam)
}

/// `U_0 .. U_{count-1}` reduced mod `m`.
pub fn residues_mod(params: &LucasParams, m: u64, count: usize) -> Result<Vec<Residue>> {
    check_modulus(m)?;
    let map = StateMap::new(params, m)?;
    let mut state = map.start();
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        out.push(Residue::new_unchecked(state.0, m));
        state = map.step(state);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::lucas::u_mod;
    use num_integer::Integer;

    fn params(p: i64, q: i64) -> LucasParams {
        LucasParams::new(p, q)
    }

    fn values(rs: &[Residue]) -> Vec<u64> {
        rs.iter().map(|r| r.value()).collect()
    }

    fn divisors(n: u64) -> Vec<u64> {
        (1..n).filter(|d| n.is_multiple_of(*d)).collect()
    }

    #[test]
    fn fibonacci_mod_four() {
        let info = period_mod(&params(1, -1), 4).unwrap();
        assert_eq!(info.preperiod, 0);
        assert_eq!(info.period, 6);
        assert_eq!(info.cycle, vec![0, 1, 1, 2, 3, 1]);
        assert_eq!(info.cycle_from_one(), vec![1, 1, 2, 3, 1, 0]);
    }

    #[test]
    fn u11_mod_four() {
        let info = period_mod(&params(1, 1), 4).unwrap();
        assert_eq!((info.preperiod, info.period), (0, 6));
        assert_eq!(info.cycle, vec![0, 1, 1, 0, 3, 3]);
        assert_eq!(info.cycle_from_one(), vec![1, 1, 0, 3, 3, 0]);
    }

    #[test]
    fn preperiod_when_q_not_invertible() {
        // 2^n - 1 mod 4: 0, 1, 3, 3, 3, ...
        let info = period_mod(&params(3, 2), 4).unwrap();
        assert_eq!(info.preperiod, 2);
        assert_eq!(info.period, 1);
        assert_eq!(info.prefix, vec![0, 1]);
        assert_eq!(info.cycle, vec![3]);
    }

    #[test]
    fn residue_tables() {
        let fib = residues_mod(&params(1, -1), 4, 10).unwrap();
        assert_eq!(values(&fib), vec![0, 1, 1, 2, 3, 1, 0, 1, 1, 2]);
        let u11 = residues_mod(&params(1, 1), 4, 12).unwrap();
        assert_eq!(values(&u11), vec![0, 1, 1, 0, 3, 3, 0, 1, 1, 0, 3, 3]);
        let seeds = residues_mod(&params(-7, 13), 2, 2).unwrap();
        assert_eq!(values(&seeds), vec![0, 1]);
    }

    #[test]
    fn bad_modulus() {
        assert_eq!(period_mod(&params(1, 1), 1), Err(Error::ModulusTooSmall(1)));
        assert!(residues_mod(&params(1, 1), 0, 3).is_err());
    }

    #[test]
    fn brent_matches_visited_map() {
        for p in -4..=4 {
            for q in -4..=4 {
                for m in 2..=60u64 {
                    let map = StateMap::new(&params(p, q), m).unwrap();
                    assert_eq!(
                        find_cycle_brent(map),
                        find_cycle_visited(map),
                        "P={p} Q={q} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn large_modulus_uses_brent() {
        // Pisano period of a prime p = +-1 (mod 10) divides p - 1; for
        // p = +-3 (mod 10) it divides 2(p + 1).
        for (m, multiple) in [(10_009u64, 10_008u64), (10_007, 20_016)] {
            let info = period_mod(&params(1, -1), m).unwrap();
            assert_eq!(info.preperiod, 0);
            assert_eq!(multiple % info.period, 0, "m={m} period={}", info.period);
            for k in 0..3 * info.period {
                assert_eq!(
                    info.residue_at(k),
                    u_mod(&params(1, -1), k, m).unwrap().value()
                );
            }
        }
    }

    #[test]
    fn cycle_faithful_and_minimal() {
        for p in -4..=4i64 {
            for q in -4..=4i64 {
                for m in 2..=12u64 {
                    let pq = params(p, q);
                    let info = period_mod(&pq, m).unwrap();
                    let horizon = 4 * m * m;
                    let direct = residues_mod(&pq, m, horizon as usize + 1).unwrap();
                    for (k, r) in direct.iter().enumerate() {
                        assert_eq!(info.residue_at(k as u64), r.value(), "{pq} m={m} k={k}");
                    }
                    for k in 0..=1000 {
                        assert_eq!(info.residue_at(k), u_mod(&pq, k, m).unwrap().value());
                    }
                    // No proper divisor of the period works as a shift.
                    for d in divisors(info.period) {
                        let shifted_ok = (0..info.period).all(|i| {
                            info.cycle[i as usize] == info.cycle[((i + d) % info.period) as usize]
                        });
                        assert!(
                            !shifted_ok,
                            "{pq} m={m} period {} not minimal (d={d})",
                            info.period
                        );
                    }
                    // Dropping the last prefix element breaks periodicity.
                    if info.preperiod > 0 {
                        let k = info.preperiod - 1;
                        assert_ne!(info.residue_at(k), info.residue_at(k + info.period));
                    }
                    if q.gcd(&(m as i64)) == 1 {
                        assert_eq!(info.preperiod, 0, "{pq} m={m}");
                    }
                }
            }
        }
    }
}
