//! Eagerly built table of orbit tails for small values.
//!
//! Under conforming parameters every orbit drops below `k²` within a few
//! steps, so tabulating where each small value ends up (which cycle, and how
//! many steps until it is on that cycle) turns most starts into one or two
//! applications of `Z` plus a lookup. The table is built once per `(k, p)`
//! and is read-only afterwards, so workers share it without locking.

use std::collections::HashMap;

use crate::map::ZMap;
use crate::trajectory::canonical_cycle;

/// Upper limit on tabulated values, independent of `k`.
pub(crate) const MEMO_CAP: u128 = 1 << 22;

/// Walks longer than this are abandoned and their values left untabulated.
const WALK_CAP: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Tail {
    Unknown,
    /// On, or `dist` steps away from, cycle number `cycle`.
    Known {
        cycle: u32,
        dist: u32,
    },
}

#[derive(Debug)]
pub(crate) struct TailCache {
    tails: Vec<Tail>,
    cycles: Vec<Vec<u128>>,
    /// Each cycle's members, sorted.
    members: Vec<Vec<u128>>,
}

impl TailCache {
    pub(crate) fn build(zmap: &ZMap, limit: u128) -> Self {
        let limit = limit.min(MEMO_CAP) as usize;
        let mut cache = Self {
            tails: vec![Tail::Unknown; limit],
            cycles: Vec::new(),
            members: Vec::new(),
        };
        let mut ids: HashMap<Vec<u128>, u32> = HashMap::new();
        let mut abandoned = vec![false; limit];
        let mut path: Vec<u128> = Vec::new();
        let mut pos: HashMap<u128, usize> = HashMap::new();

        for v in 0..limit {
            if cache.tails[v] != Tail::Unknown || abandoned[v] {
                continue;
            }
            path.clear();
            pos.clear();
            let mut x = v as u128;
            // (cycle id, index of the first path element on the cycle)
            let resolved = loop {
                if let Some(Tail::Known { cycle, dist }) = cache.lookup(x) {
                    let len = path.len();
                    let entry = if dist > 0 {
                        len + dist as usize
                    } else {
                        path.iter()
                            .position(|y| cache.on_cycle(cycle, *y))
                            .unwrap_or(len)
                    };
                    break Some((cycle, entry));
                }
                if let Some(&at) = pos.get(&x) {
                    let canon = canonical_cycle(&path[at..]);
                    let next_id = cache.cycles.len() as u32;
                    let id = *ids.entry(canon.clone()).or_insert_with(|| {
                        let mut sorted = canon.clone();
                        sorted.sort_unstable();
                        cache.cycles.push(canon);
                        cache.members.push(sorted);
                        next_id
                    });
                    break Some((id, at));
                }
                if path.len() >= WALK_CAP {
                    break None;
                }
                pos.insert(x, path.len());
                path.push(x);
                x = zmap.apply(x);
            };

            match resolved {
                Some((cycle, entry)) => {
                    for (j, &y) in path.iter().enumerate() {
                        if let Ok(idx) = usize::try_from(y) {
                            if idx < limit {
                                let dist = entry.saturating_sub(j) as u32;
                                cache.tails[idx] = Tail::Known { cycle, dist };
                            }
                        }
                    }
                }
                None => {
                    for &y in &path {
                        if y < limit as u128 {
                            abandoned[y as usize] = true;
                        }
                    }
                }
            }
        }
        cache
    }

    #[inline]
    pub(crate) fn lookup(&self, x: u128) -> Option<Tail> {
        usize::try_from(x)
            .ok()
            .and_then(|i| self.tails.get(i).copied())
    }

    #[inline]
    pub(crate) fn on_cycle(&self, cycle: u32, x: u128) -> bool {
        self.members[cycle as usize].binary_search(&x).is_ok()
    }

    pub(crate) fn cycle(&self, id: u32) -> &[u128] {
        &self.cycles[id as usize]
    }

    #[cfg(test)]
    pub(crate) fn len(&self) -> usize {
        self.tails.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Parameters;
    use crate::trajectory::trajectory;
    use num_bigint::BigUint;

    fn check_against_trajectory(k: u32, p: u32, limit: u128) {
        let params = Parameters::new(k, p).unwrap();
        let cache = TailCache::build(&ZMap::new(&params), limit);
        for v in 0..cache.len() {
            let t = trajectory(&BigUint::from(v), &params, 1_000_000).unwrap();
            match cache.lookup(v as u128).unwrap() {
                Tail::Known { cycle, dist } => {
                    let expect: Vec<BigUint> = cache
                        .cycle(cycle)
                        .iter()
                        .map(|&c| BigUint::from(c))
                        .collect();
                    assert_eq!(t.cycle(), expect.as_slice(), "k={k} p={p} v={v}");
                    assert_eq!(t.transient_length(), dist as usize, "k={k} p={p} v={v}");
                }
                Tail::Unknown => panic!("v={v} left unresolved"),
            }
        }
    }

    #[test]
    fn tails_match_direct_iteration() {
        for (k, p) in [
            (16, 8),
            (10, 6),
            (3, 2),
            (5, 2),
            (2, 2),
            (4, 2),
            (7, 3),
            (40, 2),
            (11, 4),
        ] {
            let limit = u128::from(k) * u128::from(k);
            check_against_trajectory(k, p, limit);
        }
    }

    #[test]
    fn cycles_above_the_limit_are_handled() {
        // A tiny limit forces most cycles and walks to live above it.
        for (k, p) in [(5, 2), (40, 2), (3, 2)] {
            check_against_trajectory(k, p, 3);
        }
    }

    #[test]
    fn limit_is_capped() {
        let params = Parameters::new(3000, 7).unwrap();
        let cache = TailCache::build(&ZMap::new(&params), 9_000_000);
        assert_eq!(cache.len() as u128, MEMO_CAP);
    }
}
