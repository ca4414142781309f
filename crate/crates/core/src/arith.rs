//! Exact integer helpers: binomials, integer square roots, square tests and
//! least-nonnegative residues.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A least-nonnegative residue `value` modulo `modulus` (`0 <= value < modulus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn new(value: u64, modulus: u64) -> Result<Self> {
        check_modulus(modulus)?;
        Ok(Self {
            value: value % modulus,
            modulus,
        })
    }

    /// Caller guarantees `value < modulus` and `modulus >= 2`.
    pub(crate) fn new_unchecked(value: u64, modulus: u64) -> Self {
        debug_assert!(modulus >= 2 && value < modulus);
        Self { value, modulus }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.modulus
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

pub(crate) fn check_modulus(m: u64) -> Result<()> {
    if m < 2 {
        Err(Error::ModulusTooSmall(m))
    } else {
        Ok(())
    }
}

/// `C(n, k)`, zero when `k > n`.
///
/// Multiplicative formula: after step `i` the accumulator holds `C(n-k+i, i)`,
/// so every division is exact.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 1..=k {
        acc *= n - k + i;
        acc /= i;
    }
    acc
}

/// Floor square root: the unique `s >= 0` with `s^2 <= x < (s+1)^2`.
pub fn isqrt(x: &BigInt) -> Result<BigInt> {
    if x.is_negative() {
        return Err(Error::NegativeSqrt(x.to_string()));
    }
    if x.is_zero() {
        return Ok(BigInt::zero());
    }
    if let Some(small) = x.to_u64() {
        return Ok(BigInt::from(isqrt_u64(small)));
    }
    // Start strictly above the root: 2^ceil(bits/2) > sqrt(x). From there the
    // Newton iterates decrease monotonically until they reach floor(sqrt(x)).
    let bits = x.bits();
    let mut s = BigInt::one() << bits.div_ceil(2);
    loop {
        let next = (&s + x / &s) >> 1;
        if next >= s {
            return Ok(s);
        }
        s = next;
    }
}

fn isqrt_u64(x: u64) -> u64 {
    let x = u128::from(x);
    let bits = 128 - x.leading_zeros();
    let mut s = 1u128 << bits.div_ceil(2);
    loop {
        let next = (s + x / s) >> 1;
        if next >= s {
            return s as u64;
        }
        s = next;
    }
}

/// Squares occupy 12 of the 64 classes mod 64; rejects most non-squares
/// before any root extraction.
fn passes_mod64_filter(x: &BigInt) -> bool {
    const fn table() -> [bool; 64] {
        let mut t = [false; 64];
        let mut i = 0;
        while i < 64 {
            t[(i * i) % 64] = true;
            i += 1;
        }
        t
    }
    const SQUARE_MOD64: [bool; 64] = table();
    let low = x.iter_u64_digits().next().unwrap_or(0);
    SQUARE_MOD64[(low & 63) as usize]
}

/// Integer root of `x` when `x` is a perfect square (including 0).
pub fn exact_sqrt(x: &BigInt) -> Option<BigInt> {
    if x.sign() == Sign::Minus || !passes_mod64_filter(x) {
        return None;
    }
    let s = isqrt(x).ok()?;
    (&s * &s == *x).then_some(s)
}

/// True iff `x >= 0` and `x` is the square of an integer; 0 counts.
pub fn is_perfect_square(x: &BigInt) -> bool {
    exact_sqrt(x).is_some()
}

/// True iff `x` is a positive perfect square.
pub fn is_nonzero_square(x: &BigInt) -> bool {
    x.is_positive() && is_perfect_square(x)
}

/// Least nonnegative residue of `x` modulo `m`.
pub fn mod_norm(x: &BigInt, m: u64) -> Result<Residue> {
    check_modulus(m)?;
    let r = x.mod_floor(&BigInt::from(m));
    let value = r.to_u64().expect("residue below a u64 modulus");
    Ok(Residue::new_unchecked(value, m))
}

/// `mod_norm` for machine integers.
pub fn mod_norm_i64(x: i64, m: u64) -> Result<Residue> {
    check_modulus(m)?;
    let r = i128::from(x).rem_euclid(i128::from(m));
    Ok(Residue::new_unchecked(r as u64, m))
}
