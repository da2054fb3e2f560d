//! The digit map `f` and the transformation `Z_k(n) = Σ f(aᵢ)`.
//!
//! With `q = ⌊x/p⌋` and `j = x mod p` the digit map is
//!
//! | residue `j`      | `f(x)`                             | closed form    |
//! |------------------|------------------------------------|----------------|
//! | `1`              | `(x + p − 1)(x + 2p − 1) / p²`     | `(q+1)(q+2)`   |
//! | `2 ≤ j ≤ p − 1`  | `(x + p − j) / p`                  | `q + 1`        |
//! | `0`              | `x / p`                            | `q`            |
//!
//! Every division is exact. The closed forms are what gets evaluated; debug
//! builds also evaluate the quotient forms and assert that they agree.

use num_bigint::BigUint;

use crate::digits::digits_of;
use crate::error::{Error, Result};
use crate::params::Parameters;

/// `f(x)` for modulus `p`.
///
/// ```
/// # use ztransform::digit_map;
/// assert_eq!(digit_map(1, 8).unwrap(), 2);
/// assert_eq!(digit_map(9, 8).unwrap(), 6);
/// assert_eq!(digit_map(12, 8).unwrap(), 2);
/// ```
pub fn digit_map(x: u64, p: u32) -> Result<u128> {
    if p < 2 {
        return Err(Error::InvalidParameter(format!(
            "modulus p must be at least 2, got {p}"
        )));
    }
    Ok(f(x, u64::from(p)))
}

#[inline]
pub(crate) fn f(x: u64, p: u64) -> u128 {
    let q = u128::from(x / p);
    let value = match x % p {
        0 => q,
        1 => (q + 1) * (q + 2),
        _ => q + 1,
    };
    #[cfg(debug_assertions)]
    if let Some(literal) = quotient_form(x, p) {
        debug_assert_eq!(literal, value, "closed form disagrees at x={x} p={p}");
    }
    value
}

/// The rational expressions evaluated literally, when they fit in `u128`.
/// Returns `None` on overflow; panics if a division is inexact.
#[cfg(debug_assertions)]
fn quotient_form(x: u64, p: u64) -> Option<u128> {
    let (x, p) = (u128::from(x), u128::from(p));
    let (num, den) = match x % p {
        1 => ((x + p - 1).checked_mul(x + 2 * p - 1)?, p * p),
        0 => (x, p),
        j => (x + p - j, p),
    };
    assert_eq!(num % den, 0, "inexact division in digit map");
    Some(num / den)
}

/// `Z_k(n)`: the digit map summed over the base-`k` digits of `n`.
///
/// `Z_k(0) = 0`, so zero is a fixed point.
///
/// ```
/// # use num_bigint::BigUint;
/// # use ztransform::{z_transform, Parameters};
/// let params = Parameters::new(16, 8).unwrap();
/// assert_eq!(z_transform(&BigUint::from(9815671u32), &params), BigUint::from(12u32));
/// ```
pub fn z_transform(n: &BigUint, params: &Parameters) -> BigUint {
    if let Ok(small) = u128::try_from(n) {
        return BigUint::from(ZMap::new(params).apply(small));
    }
    let p = u64::from(params.p());
    let ds = digits_of(n, params.k()).expect("Parameters guarantee k >= 2");
    let sum: u128 = ds.digits().iter().map(|&d| f(u64::from(d), p)).sum();
    BigUint::from(sum)
}

/// Checks `Z_k(n) < k^(m−1)` for an `m`-digit `n`, `m ≥ 3`.
///
/// Only defined for conforming parameters; anything else is an
/// [`Error::InvalidInput`].
pub fn lemma2_bound_holds(n: &BigUint, params: &Parameters) -> Result<bool> {
    if !params.assumptions_hold() {
        return Err(Error::InvalidInput(format!(
            "{params} does not satisfy the assumptions"
        )));
    }
    let m = digits_of(n, params.k())?.len();
    if m < 3 {
        return Err(Error::InvalidInput(format!(
            "{n} has {m} digit(s) in base {}, need at least 3",
            params.k()
        )));
    }
    let bound = BigUint::from(params.k()).pow((m - 1) as u32);
    Ok(z_transform(n, params) < bound)
}

/// Largest radix for which the digit map is tabulated.
const TABLE_LIMIT: u32 = 1 << 16;

/// Fixed-width evaluator of `Z_k` used on hot paths.
///
/// Closed on `u128`: with `k < 2³²` every digit map value is below `2⁶³`
/// and a `u128` has at most 128 digits, so `Z_k(n) < 2⁷⁰` for any `n`.
#[derive(Debug, Clone)]
pub(crate) struct ZMap {
    k: u64,
    p: u64,
    table: Vec<u64>,
}

impl ZMap {
    pub(crate) fn new(params: &Parameters) -> Self {
        let (k, p) = (u64::from(params.k()), u64::from(params.p()));
        let table = if params.k() <= TABLE_LIMIT {
            (0..k).map(|x| f(x, p) as u64).collect()
        } else {
            Vec::new()
        };
        Self { k, p, table }
    }

    #[inline]
    fn digit(&self, d: u64) -> u128 {
        match self.table.get(d as usize) {
            Some(&v) => u128::from(v),
            None => f(d, self.p),
        }
    }

    #[inline]
    pub(crate) fn apply(&self, n: u128) -> u128 {
        let mut sum = 0u128;
        let mut hi = n;
        while hi > u128::from(u64::MAX) {
            sum += self.digit((hi % u128::from(self.k)) as u64);
            hi /= u128::from(self.k);
        }
        let mut lo = hi as u64;
        loop {
            sum += self.digit(lo % self.k);
            lo /= self.k;
            if lo == 0 {
                break;
            }
        }
        sum
    }
}
