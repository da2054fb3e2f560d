//! Fixed-width classification of a single start value.

use std::collections::HashMap;

use super::memo::{Tail, TailCache};
use crate::map::ZMap;
use crate::trajectory::canonical_cycle;

/// Paths longer than this switch from linear scans to a hash index.
const LINEAR_SCAN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum CycleRef {
    Cached(u32),
    Found(Vec<u128>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Outcome {
    Cycle { cycle: CycleRef, transient: u64 },
    Exhausted,
}

/// Reusable buffers for [`classify`].
#[derive(Debug, Default)]
pub(crate) struct Scratch {
    path: Vec<u128>,
    index: HashMap<u128, usize>,
}

impl Scratch {
    fn clear(&mut self) {
        self.path.clear();
        self.index.clear();
    }

    fn find(&self, x: u128) -> Option<usize> {
        if self.path.len() <= LINEAR_SCAN {
            self.path.iter().position(|&y| y == x)
        } else {
            self.index.get(&x).copied()
        }
    }

    fn push(&mut self, x: u128) {
        self.path.push(x);
        let len = self.path.len();
        if len == LINEAR_SCAN + 1 {
            self.index
                .extend(self.path.iter().enumerate().map(|(i, &y)| (y, i)));
        } else if len > LINEAR_SCAN + 1 {
            self.index.insert(x, len - 1);
        }
    }
}

/// Decides which cycle `n` falls into and its transient, exactly as
/// [`trajectory`](crate::trajectory()) would with the same budget.
pub(crate) fn classify(
    n: u128,
    zmap: &ZMap,
    cache: Option<&TailCache>,
    budget: u64,
    scratch: &mut Scratch,
) -> Outcome {
    scratch.clear();
    let mut x = n;
    loop {
        if let Some(Tail::Known { cycle, dist }) = cache.and_then(|c| c.lookup(x)) {
            let cache = cache.expect("lookup succeeded");
            let steps = scratch.path.len() as u64;
            let transient = if dist > 0 {
                steps + u64::from(dist)
            } else {
                scratch
                    .path
                    .iter()
                    .position(|&y| cache.on_cycle(cycle, y))
                    .map_or(steps, |i| i as u64)
            };
            let period = cache.cycle(cycle).len() as u64;
            return if transient + period <= budget {
                Outcome::Cycle {
                    cycle: CycleRef::Cached(cycle),
                    transient,
                }
            } else {
                Outcome::Exhausted
            };
        }
        if let Some(at) = scratch.find(x) {
            return Outcome::Cycle {
                cycle: CycleRef::Found(canonical_cycle(&scratch.path[at..])),
                transient: at as u64,
            };
        }
        scratch.push(x);
        if scratch.path.len() as u64 > budget {
            return Outcome::Exhausted;
        }
        x = zmap.apply(x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Parameters;
    use crate::trajectory::trajectory;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn reference(n: u128, params: &Parameters, budget: u64) -> Option<(Vec<u128>, u64)> {
        let t = trajectory(&BigUint::from(n), params, budget).unwrap();
        t.found_cycle().then(|| {
            let cycle = t
                .cycle()
                .iter()
                .map(|v| u128::try_from(v).unwrap())
                .collect();
            (cycle, t.transient_length() as u64)
        })
    }

    fn resolve(outcome: Outcome, cache: Option<&TailCache>) -> Option<(Vec<u128>, u64)> {
        match outcome {
            Outcome::Exhausted => None,
            Outcome::Cycle {
                cycle: CycleRef::Found(c),
                transient,
            } => Some((c, transient)),
            Outcome::Cycle {
                cycle: CycleRef::Cached(id),
                transient,
            } => Some((cache.unwrap().cycle(id).to_vec(), transient)),
        }
    }

    fn agree(n: u128, k: u32, p: u32, budget: u64, limit: u128) {
        let params = Parameters::new(k, p).unwrap();
        let zmap = ZMap::new(&params);
        let cache = TailCache::build(&zmap, limit);
        let mut scratch = Scratch::default();
        let expect = reference(n, &params, budget);
        let plain = resolve(classify(n, &zmap, None, budget, &mut scratch), None);
        let memo = resolve(
            classify(n, &zmap, Some(&cache), budget, &mut scratch),
            Some(&cache),
        );
        assert_eq!(plain, expect, "plain n={n} k={k} p={p} budget={budget}");
        assert_eq!(
            memo, expect,
            "memo n={n} k={k} p={p} budget={budget} limit={limit}"
        );
    }

    #[test]
    fn worked_examples() {
        agree(9815671, 16, 8, 100, 256);
        agree(71517, 10, 6, 100, 100);
        agree(283, 3, 2, 100, 9);
        agree(12345, 5, 2, 100, 25);
    }

    #[test]
    fn exact_budget_boundaries() {
        // 9815671 needs four applications to see its first repeat.
        for budget in 1..8 {
            agree(9815671, 16, 8, budget, 256);
            agree(12345, 5, 2, budget, 25);
            agree(12345, 5, 2, budget, 3);
            agree(1, 10, 7, budget, 100);
        }
    }

    #[test]
    fn long_paths_use_the_index() {
        // p = 2 with a large radix gives long, climbing orbits.
        for n in [99_999u128, 123_456_789, 987_654_321_012] {
            agree(n, 1000, 2, 10_000, 0);
            agree(n, 1000, 2, 10_000, 1_000_000);
        }
    }

    proptest! {
        #[test]
        fn classify_matches_trajectory(
            n in any::<u64>(), k in 2u32..120, p in 2u32..20, budget in 1u64..80, limit in 0u128..20_000,
        ) {
            agree(u128::from(n), k, p, budget, limit);
        }
    }
}
