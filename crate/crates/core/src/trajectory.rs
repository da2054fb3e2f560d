//! Orbits `n, Z(n), Z²(n), …` with exact first-repeat cycle detection.

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::map::z_transform;
use crate::params::Parameters;

/// Step budget used when the caller has no better figure.
///
/// Conforming parameters reach `{1, 2}` within a handful of steps past the
/// digit count of the start value.
pub const DEFAULT_BUDGET: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryStatus {
    CycleFound,
    BudgetExhausted,
}

/// The orbit of a start value, truncated at its first repeat.
///
/// `steps` holds each distinct orbit value once, beginning with the start.
/// When a cycle is found, `steps[transient_length..]` is the cycle in orbit
/// order and `cycle` is the same set rotated to start at its minimum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Trajectory {
    parameters: Parameters,
    #[serde(serialize_with = "crate::decimal::dec::serialize")]
    start: BigUint,
    #[serde(serialize_with = "crate::decimal::dec_vec::serialize")]
    steps: Vec<BigUint>,
    #[serde(serialize_with = "crate::decimal::dec::serialize")]
    transient_length: usize,
    #[serde(serialize_with = "crate::decimal::dec_vec::serialize")]
    cycle: Vec<BigUint>,
    status: TrajectoryStatus,
}

impl Trajectory {
    pub fn parameters(&self) -> &Parameters {
        &self.parameters
    }

    pub fn start(&self) -> &BigUint {
        &self.start
    }

    pub fn steps(&self) -> &[BigUint] {
        &self.steps
    }

    /// Steps before the orbit first lands on its cycle. Zero when the
    /// budget ran out.
    pub fn transient_length(&self) -> usize {
        self.transient_length
    }

    /// The canonical cycle; empty when the budget ran out.
    pub fn cycle(&self) -> &[BigUint] {
        &self.cycle
    }

    pub fn status(&self) -> TrajectoryStatus {
        self.status
    }

    pub fn found_cycle(&self) -> bool {
        self.status == TrajectoryStatus::CycleFound
    }

    /// `n_j`, the `j`-th orbit value, including indices past the recorded
    /// steps when the cycle is known.
    pub fn value_at(&self, j: usize) -> Option<&BigUint> {
        if let Some(v) = self.steps.get(j) {
            return Some(v);
        }
        if !self.found_cycle() {
            return None;
        }
        let (lambda, period) = (self.transient_length, self.cycle.len());
        Some(&self.steps[lambda + (j - lambda) % period])
    }
}

/// Rotates a cycle so its smallest element comes first.
pub fn canonical_cycle<T: Ord + Clone>(cycle: &[T]) -> Vec<T> {
    let Some((at, _)) = cycle.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)) else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(cycle.len());
    out.extend_from_slice(&cycle[at..]);
    out.extend_from_slice(&cycle[..at]);
    out
}

/// Iterates `Z` from `n` for at most `budget` applications.
///
/// Running out of budget is reported through [`TrajectoryStatus`], not as an
/// error; the partial orbit then has `budget + 1` entries.
pub fn trajectory(n: &BigUint, params: &Parameters, budget: u64) -> Result<Trajectory> {
    if budget == 0 {
        return Err(Error::InvalidInput("step budget must be at least 1".into()));
    }
    let mut steps = vec![n.clone()];
    let mut first_seen = HashMap::from([(n.clone(), 0usize)]);
    for _ in 0..budget {
        let next = z_transform(steps.last().expect("nonempty"), params);
        if let Some(&at) = first_seen.get(&next) {
            let cycle = canonical_cycle(&steps[at..]);
            return Ok(Trajectory {
                parameters: *params,
                start: n.clone(),
                steps,
                transient_length: at,
                cycle,
                status: TrajectoryStatus::CycleFound,
            });
        }
        first_seen.insert(next.clone(), steps.len());
        steps.push(next);
    }
    Ok(Trajectory {
        parameters: *params,
        start: n.clone(),
        steps,
        transient_length: 0,
        cycle: Vec::new(),
        status: TrajectoryStatus::BudgetExhausted,
    })
}
