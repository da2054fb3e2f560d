//! Exact dynamics of the k-adic Z transformation.
//!
//! Write a natural number `n` in base `k` with digits `aᵢ`. For a modulus
//! `p`, the digit map `f` sends a digit `x = q·p + j` (with `0 ≤ j < p`) to
//!
//! * `(q + 1)(q + 2)` when `j = 1`,
//! * `q + 1` when `2 ≤ j < p`,
//! * `q` when `j = 0`,
//!
//! and `Z_k(n) = Σ f(aᵢ)`. Iterating `Z_k` from any start eventually
//! repeats. When `p > 5` and `p + 2 ≤ k < p² − 3p + 2`, every positive
//! start ends in the two-cycle `{1, 2}`.
//!
//! The crate covers:
//!
//! * base conversion for arbitrary-precision naturals ([`digits_of`], [`value_of`]),
//! * the digit map and transformation ([`digit_map`], [`z_transform`]),
//! * orbits with cycle detection ([`trajectory()`]),
//! * the parameter checks ([`check_assumptions`]),
//! * parallel, checkpointed sweeps over ranges and parameter grids ([`sweep`]).
//!
//! ```
//! use num_bigint::BigUint;
//! use ztransform::{trajectory, Parameters, DEFAULT_BUDGET};
//!
//! let params = Parameters::new(10, 6)?;
//! let orbit = trajectory(&BigUint::from(71517u32), &params, DEFAULT_BUDGET)?;
//! let values: Vec<String> = orbit.steps().iter().map(|v| v.to_string()).collect();
//! assert_eq!(values, ["71517", "17", "8", "2", "1"]);
//! assert_eq!(orbit.cycle(), &[BigUint::from(1u32), BigUint::from(2u32)]);
//! # Ok::<(), ztransform::Error>(())
//! ```

mod decimal;
mod digits;
mod error;
mod map;
mod params;
pub mod sweep;
mod trajectory;

pub use digits::{digits_of, value_of, DigitString};
pub use error::{Error, Result};
pub use map::{digit_map, lemma2_bound_holds, z_transform};
pub use params::{check_assumptions, decompose_k, AssumptionReport, Parameters};
pub use sweep::{
    cycle_catalog, grid_sweep, verify_range, CycleCatalog, CycleRecord, GridCell, RangeReport,
    SweepOptions,
};
pub use trajectory::{canonical_cycle, trajectory, Trajectory, TrajectoryStatus, DEFAULT_BUDGET};

pub use num_bigint::BigUint;

// The guide's snippets run as doctests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/digits.md")]
    mod digits {}
    #[doc = include_str!("../../../book/src/digit-map.md")]
    mod digit_map {}
    #[doc = include_str!("../../../book/src/parameters.md")]
    mod parameters {}
    #[doc = include_str!("../../../book/src/trajectories.md")]
    mod trajectories {}
    #[doc = include_str!("../../../book/src/sweeps.md")]
    mod sweeps {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
