//! Base-`k` digit expansions of arbitrary-precision naturals.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical base-`k` digits of a natural number, least-significant first.
///
/// The most significant digit is nonzero, except for zero itself which is
/// the single digit `[0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitString {
    digits: Vec<u32>,
    radix: u32,
}

impl DigitString {
    /// Validates `digits` (least-significant first) as a canonical expansion.
    pub fn new(digits: Vec<u32>, radix: u32) -> Result<Self> {
        check_radix(radix)?;
        if let Some(&digit) = digits.iter().find(|&&d| d >= radix) {
            return Err(Error::InvalidDigit { digit, radix });
        }
        match digits.last() {
            None => return Err(Error::InvalidInput("empty digit string".into())),
            Some(0) if digits.len() > 1 => {
                return Err(Error::InvalidInput("leading zero digit".into()))
            }
            _ => {}
        }
        Ok(Self { digits, radix })
    }

    pub fn digits(&self) -> &[u32] {
        &self.digits
    }

    pub fn radix(&self) -> u32 {
        self.radix
    }

    /// Number of digits `m`.
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    /// Always false: zero is `[0]`, not the empty string.
    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn value(&self) -> BigUint {
        horner(&self.digits, self.radix)
    }
}

fn check_radix(k: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "radix k must be at least 2, got {k}"
        )));
    }
    Ok(())
}

/// Largest `(k^t, t)` with `k^t` fitting in a `u32`.
fn digit_block(k: u32) -> (u32, u32) {
    let (mut block, mut t) = (k, 1);
    while let Some(next) = block.checked_mul(k) {
        block = next;
        t += 1;
    }
    (block, t)
}

/// Base-`k` digits of `n`, least-significant first.
///
/// Divides the 32-bit limbs of `n` by the largest power of `k` that fits in a
/// limb, so each pass over the number peels off several digits.
///
/// ```
/// # use num_bigint::BigUint;
/// # use ztransform::digits_of;
/// let ds = digits_of(&BigUint::from(12345u32), 5).unwrap();
/// assert_eq!(ds.digits(), &[0, 4, 3, 3, 4, 3]);
/// ```
pub fn digits_of(n: &BigUint, k: u32) -> Result<DigitString> {
    check_radix(k)?;
    let mut limbs = n.to_u32_digits();
    if limbs.is_empty() {
        return Ok(DigitString {
            digits: vec![0],
            radix: k,
        });
    }
    let (block, per_block) = digit_block(k);
    let mut digits = Vec::new();
    while !limbs.is_empty() {
        let mut rem = 0u64;
        for limb in limbs.iter_mut().rev() {
            let cur = (rem << 32) | u64::from(*limb);
            *limb = (cur / u64::from(block)) as u32;
            rem = cur % u64::from(block);
        }
        while limbs.last() == Some(&0) {
            limbs.pop();
        }
        let mut chunk = rem as u32;
        if limbs.is_empty() {
            while chunk > 0 {
                digits.push(chunk % k);
                chunk /= k;
            }
        } else {
            for _ in 0..per_block {
                digits.push(chunk % k);
                chunk /= k;
            }
        }
    }
    Ok(DigitString { digits, radix: k })
}

/// Horner evaluation of `digits` (least-significant first) in base `k`.
///
/// Accepts non-canonical strings (leading zeros, empty); every digit must be
/// below `k`.
pub fn value_of(digits: &[u32], k: u32) -> Result<BigUint> {
    check_radix(k)?;
    if let Some(&digit) = digits.iter().find(|&&d| d >= k) {
        return Err(Error::InvalidDigit { digit, radix: k });
    }
    Ok(horner(digits, k))
}

fn horner(digits: &[u32], k: u32) -> BigUint {
    digits
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, &d| acc * k + d)
}
