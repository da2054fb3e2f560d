//! The `(k, p)` parameter pair and the assumption checker.
//!
//! Every radix `k ≥ 2` can be written uniquely as `k = r·p + s + 1` with
//! `1 ≤ s ≤ p`. The limit-set theorem holds when
//!
//! ```text
//! p + 2 ≤ k < p² − 3p + 2   and   p > 5
//! ```
//!
//! which for `p > 5` is the same as `1 ≤ r ≤ p − 4`, and also the same as
//! `(r + 1)(r + 2) ≤ r·p + 1`. [`check_assumptions`] evaluates all three
//! forms independently so their agreement can be audited.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::digit_map;

/// A validated `(k, p)` pair with its derived decomposition.
///
/// Fields are private: `r`, `s` and the assumption flag are computed once in
/// [`Parameters::new`] and can't drift from `k` and `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParameters")]
pub struct Parameters {
    #[serde(with = "crate::decimal::dec")]
    k: u32,
    #[serde(with = "crate::decimal::dec")]
    p: u32,
    #[serde(with = "crate::decimal::dec")]
    r: u32,
    #[serde(with = "crate::decimal::dec")]
    s: u32,
    assumptions_hold: bool,
}

/// Wire form; the derived fields are optional and checked if present.
#[derive(Deserialize)]
struct RawParameters {
    #[serde(with = "crate::decimal::dec")]
    k: u32,
    #[serde(with = "crate::decimal::dec")]
    p: u32,
    #[serde(default, deserialize_with = "opt_dec")]
    r: Option<u32>,
    #[serde(default, deserialize_with = "opt_dec")]
    s: Option<u32>,
    assumptions_hold: Option<bool>,
}

fn opt_dec<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Option<u32>, D::Error> {
    crate::decimal::dec::deserialize(d).map(Some)
}

impl TryFrom<RawParameters> for Parameters {
    type Error = Error;

    fn try_from(raw: RawParameters) -> Result<Self> {
        let params = Parameters::new(raw.k, raw.p)?;
        let stale = raw.r.is_some_and(|r| r != params.r)
            || raw.s.is_some_and(|s| s != params.s)
            || raw
                .assumptions_hold
                .is_some_and(|h| h != params.assumptions_hold);
        if stale {
            return Err(Error::InvalidParameter(format!(
                "derived fields do not match k={} p={}",
                raw.k, raw.p
            )));
        }
        Ok(params)
    }
}

impl Parameters {
    pub fn new(k: u32, p: u32) -> Result<Self> {
        let (r, s) = decompose_k(k, p)?;
        Ok(Self {
            k,
            p,
            r,
            s,
            assumptions_hold: holds_h(k, p),
        })
    }

    /// The radix.
    pub fn k(&self) -> u32 {
        self.k
    }

    /// The modulus of the digit map.
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Whether `(k, p)` are conforming parameters.
    pub fn assumptions_hold(&self) -> bool {
        self.assumptions_hold
    }
}

impl std::fmt::Display for Parameters {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "k={} p={}", self.k, self.p)
    }
}

pub(crate) fn validate(k: u32, p: u32) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "radix k must be at least 2, got {k}"
        )));
    }
    if p < 2 {
        return Err(Error::InvalidParameter(format!(
            "modulus p must be at least 2, got {p}"
        )));
    }
    Ok(())
}

/// Writes `k = r·p + s + 1` with `1 ≤ s ≤ p` and returns `(r, s)`.
///
/// ```
/// # use ztransform::decompose_k;
/// assert_eq!(decompose_k(16, 8).unwrap(), (1, 7));
/// assert_eq!(decompose_k(3, 2).unwrap(), (0, 2));
/// ```
pub fn decompose_k(k: u32, p: u32) -> Result<(u32, u32)> {
    validate(k, p)?;
    let rest = k - 2;
    Ok((rest / p, rest % p + 1))
}

fn holds_h(k: u32, p: u32) -> bool {
    let (k, p) = (u64::from(k), u64::from(p));
    // p² − 3p + 2 = (p − 1)(p − 2), never negative for p ≥ 2.
    p > 5 && p + 2 <= k && k < (p - 1) * (p - 2)
}

fn holds_h1(r: u32, p: u32) -> bool {
    r >= 1 && i64::from(r) <= i64::from(p) - 4
}

fn holds_h2(r: u32, p: u32) -> bool {
    let (r, p) = (u64::from(r), u64::from(p));
    (r + 1) * (r + 2) <= r * p + 1
}

/// Result of [`check_assumptions`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub parameters: Parameters,
    /// `p + 2 ≤ k < p² − 3p + 2` and `p > 5`, from `(k, p)` directly.
    pub holds_h: bool,
    /// `1 ≤ r ≤ p − 4`.
    pub holds_h1: bool,
    /// `(r + 1)(r + 2) ≤ r·p + 1`.
    pub holds_h2: bool,
    /// Largest value of the digit map over the digits `0..k`.
    #[serde(with = "crate::decimal::dec")]
    pub f_max: u128,
}

impl AssumptionReport {
    /// True when all three forms agree.
    pub fn forms_agree(&self) -> bool {
        self.holds_h == self.holds_h1 && self.holds_h1 == self.holds_h2
    }
}

pub fn check_assumptions(k: u32, p: u32) -> Result<AssumptionReport> {
    let parameters = Parameters::new(k, p)?;
    Ok(AssumptionReport {
        parameters,
        holds_h: holds_h(k, p),
        holds_h1: holds_h1(parameters.r, p),
        holds_h2: holds_h2(parameters.r, p),
        f_max: digit_map_max(k, p)?,
    })
}

/// Maximum of the digit map over `0..k`.
///
/// Within each residue class mod `p` the map is nondecreasing, so the
/// maximum is attained among the top `p` digits.
fn digit_map_max(k: u32, p: u32) -> Result<u128> {
    let lo = k.saturating_sub(p);
    let mut best = 0;
    for x in lo..k {
        best = best.max(digit_map(u64::from(x), p)?);
    }
    Ok(best)
}
