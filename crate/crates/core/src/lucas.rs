//! Evaluators for the Lucas sequence of the first kind,
//! `U_0 = 0`, `U_1 = 1`, `U_n = P*U_{n-1} - Q*U_{n-2}`.
//!
//! Three exact evaluators (linear recurrence, binomial closed form, companion
//! matrix powering) are kept fully independent so they can check each other.
//! [`u_mod`] is the word-size modular fast path.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, check_modulus, Residue};
use crate::error::{Error, Result};

/// The parameters `(P, Q)` of a Lucas sequence. Any integers are accepted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LucasParams {
    #[serde(with = "crate::report::bigint_str")]
    pub p: BigInt,
    #[serde(with = "crate::report::bigint_str")]
    pub q: BigInt,
}

impl LucasParams {
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Self {
        Self {
            p: p.into(),
            q: q.into(),
        }
    }

    /// `P^2 - 4Q`.
    pub fn discriminant(&self) -> BigInt {
        &self.p * &self.p - 4 * &self.q
    }
}

impl fmt::Display for LucasParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(P={}, Q={})", self.p, self.q)
    }
}

/// Which exact evaluator to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Recurrence,
    ClosedForm,
    Matrix,
}

impl Method {
    pub fn evaluate(self, params: &LucasParams, n: u64) -> Result<BigInt> {
        match self {
            Method::Recurrence => Ok(u_rec(params, n)),
            Method::ClosedForm => u_closed(params, n),
            Method::Matrix => Ok(u_matrix(params, n)),
        }
    }
}

/// `U_n` by linear iteration of the recurrence.
pub fn u_rec(params: &LucasParams, n: u64) -> BigInt {
    let (mut prev, mut cur) = (BigInt::zero(), BigInt::one());
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = &params.p * &cur - &params.q * &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    cur
}

/// Iterator over `U_0, U_1, U_2, ...` computed by the recurrence.
#[derive(Debug, Clone)]
pub struct Terms {
    p: BigInt,
    q: BigInt,
    cur: BigInt,
    next: BigInt,
}

impl Terms {
    pub fn new(params: &LucasParams) -> Self {
        Self {
            p: params.p.clone(),
            q: params.q.clone(),
            cur: BigInt::zero(),
            next: BigInt::one(),
        }
    }
}

impl Iterator for Terms {
    type Item = BigInt;

    fn next(&mut self) -> Option<BigInt> {
        let after = &self.p * &self.next - &self.q * &self.cur;
        let next = std::mem::replace(&mut self.next, after);
        Some(std::mem::replace(&mut self.cur, next))
    }
}

/// `U_n` from the binomial closed form
/// `sum_{r=0}^{floor((n-1)/2)} (-1)^r P^{n-1-2r} Q^r C(n-1-r, r)`, valid for `n >= 1`.
pub fn u_closed(params: &LucasParams, n: u64) -> Result<BigInt> {
    if n == 0 {
        return Err(Error::ClosedFormIndexZero);
    }
    let top = (n - 1) / 2;
    let mut sum = BigInt::zero();
    // Q^r grows with r while the power of P shrinks by P^2 each step; build
    // P-powers from the top index down so each term is one multiplication.
    let p_sq = &params.p * &params.p;
    let mut p_pow = pow_u64(&params.p, n - 1 - 2 * top);
    let mut terms = Vec::with_capacity(top as usize + 1);
    for _ in 0..=top {
        terms.push(p_pow.clone());
        p_pow *= &p_sq;
    }
    let mut q_pow = BigInt::one();
    for r in 0..=top {
        let p_part = &terms[(top - r) as usize];
        let term = p_part * &q_pow * arith::binomial(n - 1 - r, r);
        if r % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        q_pow *= &params.q;
    }
    Ok(sum)
}

/// `base^exp` with `0^0 = 1`.
fn pow_u64(base: &BigInt, exp: u64) -> BigInt {
    let mut result = BigInt::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

/// 2x2 matrix `[[a, b], [c, d]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Mat2 {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

impl Mat2 {
    fn identity() -> Self {
        Self {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    fn companion(params: &LucasParams) -> Self {
        Self {
            a: params.p.clone(),
            b: -&params.q,
            c: BigInt::one(),
            d: BigInt::zero(),
        }
    }

    fn mul(&self, rhs: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        }
    }
}

/// `U_n` by square-and-multiply powering of the companion matrix
/// `[[P, -Q], [1, 0]]`. `M^n * (U_1, U_0)^T = (U_{n+1}, U_n)^T`, and with
/// the seed `(1, 0)` that is the first column of `M^n`.
pub fn u_matrix(params: &LucasParams, n: u64) -> BigInt {
    let mut result = Mat2::identity();
    let mut base = Mat2::companion(params);
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = base.mul(&result);
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base);
        }
    }
    // Second row of M^n applied to (1, 0).
    result.c
}

/// `U_n mod m` by companion-matrix powering on machine words.
pub fn u_mod(params: &LucasParams, n: u64, m: u64) -> Result<Residue> {
    check_modulus(m)?;
    let p = arith::mod_norm(&params.p, m)?.value();
    let q = arith::mod_norm(&params.q, m)?.value();
    Ok(Residue::new_unchecked(u_mod_words(p, q, n, m), m))
}

/// `U_n mod m` for `P, Q` already reduced into `[0, m)`.
pub(crate) fn u_mod_words(p: u64, q: u64, n: u64, m: u64) -> u64 {
    let neg_q = (m - q) % m;
    let mut result = [1u64, 0, 0, 1];
    let mut base = [p, neg_q, 1 % m, 0];
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = mat_mul_mod(&base, &result, m);
        }
        e >>= 1;
        if e > 0 {
            base = mat_mul_mod(&base, &base, m);
        }
    }
    result[2]
}

fn mat_mul_mod(x: &[u64; 4], y: &[u64; 4], m: u64) -> [u64; 4] {
    let m = u128::from(m);
    let dot = |a: u64, b: u64, c: u64, d: u64| {
        ((u128::from(a) * u128::from(b) % m + u128::from(c) * u128::from(d) % m) % m) as u64
    };
    [
        dot(x[0], y[0], x[1], y[2]),
        dot(x[0], y[1], x[1], y[3]),
        dot(x[2], y[0], x[3], y[2]),
        dot(x[2], y[1], x[3], y[3]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(p: i64, q: i64) -> LucasParams {
        LucasParams::new(p, q)
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(u_rec(&params(1, -1), 8), BigInt::from(21));
        assert_eq!(u_rec(&params(17, -3), 0), BigInt::zero());
        assert_eq!(u_rec(&params(3, 2), 4), BigInt::from(15));
        // U_n(3, 2) = 2^n - 1
        for n in 0..80u32 {
            assert_eq!(u_rec(&params(3, 2), u64::from(n)), (BigInt::one() << n) - 1);
        }
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(u_closed(&params(1, 1), 7).unwrap(), BigInt::from(1));
        assert_eq!(u_closed(&params(-9, 40), 1).unwrap(), BigInt::one());
        assert_eq!(u_closed(&params(1, -1), 13).unwrap(), BigInt::from(233));
        assert_eq!(1 + 11 + 45 + 84 + 70 + 21 + 1, 233);
        assert_eq!(u_closed(&params(2, 2), 0), Err(Error::ClosedFormIndexZero));
    }

    #[test]
    fn closed_form_with_zero_p() {
        // U_n(0, Q): 0, 1, 0, -Q, 0, Q^2, ...
        let z = params(0, 3);
        assert_eq!(u_closed(&z, 1).unwrap(), BigInt::one());
        assert_eq!(u_closed(&z, 2).unwrap(), BigInt::zero());
        assert_eq!(u_closed(&z, 3).unwrap(), BigInt::from(-3));
        assert_eq!(u_closed(&z, 5).unwrap(), BigInt::from(9));
    }

    #[test]
    fn matrix_examples() {
        assert_eq!(u_matrix(&params(1, -1), 9), BigInt::from(34));
        assert_eq!(u_matrix(&params(-5, 11), 1), BigInt::one());
        assert_eq!(u_matrix(&params(2, 1), 25), BigInt::from(25));
        assert_eq!(u_matrix(&params(2, 1), 0), BigInt::zero());
        for n in 0..200 {
            assert_eq!(u_matrix(&params(2, 1), n), BigInt::from(n));
        }
    }

    #[test]
    fn modular_examples() {
        assert_eq!(u_mod(&params(1, -1), 9, 4).unwrap().value(), 2);
        assert_eq!(u_mod(&params(1, 1), 4, 4).unwrap().value(), 3);
        assert_eq!(u_mod(&params(123, -77), 1, 5).unwrap().value(), 1);
        assert_eq!(u_mod(&params(1, 1), 0, 2).unwrap().value(), 0);
        assert_eq!(u_mod(&params(1, 1), 4, 1), Err(Error::ModulusTooSmall(1)));
        // Near-u64 modulus exercises the u128 products.
        let m = u64::MAX - 58;
        let expect = arith::mod_norm(&u_rec(&params(1, -1), 300), m).unwrap();
        assert_eq!(u_mod(&params(1, -1), 300, m).unwrap(), expect);
    }

    #[test]
    fn terms_iterator_matches_recurrence() {
        let pq = params(-3, 7);
        for (n, t) in Terms::new(&pq).take(60).enumerate() {
            assert_eq!(t, u_rec(&pq, n as u64));
        }
    }

    #[test]
    fn three_evaluators_agree() {
        for p in -8..=8 {
            for q in -8..=8 {
                let pq = params(p, q);
                for (i, rec) in Terms::new(&pq).take(65).enumerate().skip(1) {
                    let n = i as u64;
                    assert_eq!(u_closed(&pq, n).unwrap(), rec, "closed {pq} n={n}");
                    assert_eq!(u_matrix(&pq, n), rec, "matrix {pq} n={n}");
                }
            }
        }
    }

    #[test]
    fn modular_consistency() {
        for p in -5..=5 {
            for q in -5..=5 {
                let pq = params(p, q);
                for (n, u) in Terms::new(&pq).take(201).enumerate() {
                    for m in [2u64, 3, 4, 5, 8, 12] {
                        assert_eq!(
                            u_mod(&pq, n as u64, m).unwrap(),
                            arith::mod_norm(&u, m).unwrap(),
                            "{pq} n={n} m={m}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn sign_symmetry() {
        for p in -6..=6 {
            for q in -6..=6 {
                for n in 0..50u64 {
                    let pos = u_rec(&params(p, q), n);
                    let neg = u_rec(&params(-p, q), n);
                    let expect = if n % 2 == 1 { pos } else { -pos };
                    assert_eq!(neg, expect);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn matrix_satisfies_recurrence(p in -1000i64..1000, q in -1000i64..1000, n in 2u64..10_000) {
            let pq = params(p, q);
            let lhs = u_matrix(&pq, n);
            let rhs = &pq.p * u_matrix(&pq, n - 1) - &pq.q * u_matrix(&pq, n - 2);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn fast_mod_matches_exact(p in any::<i64>(), q in any::<i64>(), n in 0u64..300, m in 2u64..1_000_000) {
            let pq = params(p, q);
            prop_assert_eq!(u_mod(&pq, n, m).unwrap(), arith::mod_norm(&u_matrix(&pq, n), m).unwrap());
        }
    }
}
