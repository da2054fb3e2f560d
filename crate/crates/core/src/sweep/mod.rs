//! Exhaustive verification over ranges of start values and `(k, p)` grids.
//!
//! Ranges are cut into fixed chunks aligned to multiples of the chunk size.
//! Chunks run on a rayon pool and are merged in start order, so a report
//! never depends on the number of workers. With a checkpoint path, each
//! finished chunk is appended to the file and skipped on the next run.

use std::collections::BTreeMap;
use std::collections::HashMap;
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::ZMap;
use crate::params::{check_assumptions, Parameters};

pub mod checkpoint;
mod memo;
mod walk;

pub use checkpoint::{ChunkKey, ChunkRecord};

use checkpoint::Checkpoint;
use memo::TailCache;
use walk::{classify, CycleRef, Outcome, Scratch};

/// Starts per chunk unless overridden.
pub const DEFAULT_CHUNK_SIZE: u64 = 1 << 16;

#[derive(Debug, Clone)]
pub struct SweepOptions {
    /// Worker threads; 0 means one per core.
    pub workers: usize,
    pub chunk_size: u64,
    /// Use the small-value tail cache.
    pub memo: bool,
    pub checkpoint: Option<PathBuf>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            workers: 0,
            chunk_size: DEFAULT_CHUNK_SIZE,
            memo: true,
            checkpoint: None,
        }
    }
}

impl SweepOptions {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_checkpoint(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint = Some(path.into());
        self
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))
    }
}

/// One limit cycle and the starts observed falling into it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleRecord {
    /// Rotated to begin at its minimum.
    #[serde(with = "crate::decimal::dec_vec")]
    pub cycle: Vec<u128>,
    #[serde(with = "crate::decimal::dec")]
    pub first_witness: u128,
    #[serde(with = "crate::decimal::dec")]
    pub basin_count: u64,
    #[serde(with = "crate::decimal::dec")]
    pub max_transient: u64,
}

impl CycleRecord {
    fn absorb(&mut self, other: &CycleRecord) {
        self.first_witness = self.first_witness.min(other.first_witness);
        self.basin_count += other.basin_count;
        self.max_transient = self.max_transient.max(other.max_transient);
    }

    pub fn is_one_two(&self) -> bool {
        self.cycle == [1, 2]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RangeReport {
    pub parameters: Parameters,
    #[serde(with = "crate::decimal::dec")]
    pub n_lo: u128,
    #[serde(with = "crate::decimal::dec")]
    pub n_hi: u128,
    #[serde(with = "crate::decimal::dec")]
    pub budget: u64,
    /// Every start ended on `[1, 2]` within budget.
    pub all_reach_m: bool,
    /// Sorted by first witness.
    pub cycles: Vec<CycleRecord>,
    #[serde(with = "crate::decimal::dec")]
    pub max_transient: u64,
    #[serde(with = "crate::decimal::dec_vec")]
    pub budget_exhausted_starts: Vec<u128>,
}

impl RangeReport {
    pub fn range_size(&self) -> u128 {
        self.n_hi - self.n_lo + 1
    }

    /// The distinct cycles, in first-witness order.
    pub fn cycle_set(&self) -> Vec<Vec<u128>> {
        self.cycles.iter().map(|c| c.cycle.clone()).collect()
    }

    pub fn find_cycle(&self, cycle: &[u128]) -> Option<&CycleRecord> {
        self.cycles.iter().find(|c| c.cycle == cycle)
    }
}

/// Per-`(k, p)` state shared by all chunks of a run.
struct Engine {
    params: Parameters,
    zmap: ZMap,
    cache: Option<Arc<TailCache>>,
    budget: u64,
}

impl Engine {
    fn new(params: &Parameters, budget: u64, memo: bool) -> Self {
        let zmap = ZMap::new(params);
        let cache = memo.then(|| {
            let k = u128::from(params.k());
            Arc::new(TailCache::build(&zmap, k * k))
        });
        Self {
            params: *params,
            zmap,
            cache,
            budget,
        }
    }

    fn run_chunk(&self, lo: u128, hi: u128) -> ChunkRecord {
        #[derive(Default)]
        struct Tally {
            first_witness: u128,
            basin_count: u64,
            max_transient: u64,
        }
        let cache = self.cache.as_deref();
        let mut scratch = Scratch::default();
        let mut by_id: HashMap<u32, Tally> = HashMap::new();
        let mut by_cycle: HashMap<Vec<u128>, Tally> = HashMap::new();
        let mut exhausted = Vec::new();
        let mut n = lo;
        loop {
            match classify(n, &self.zmap, cache, self.budget, &mut scratch) {
                Outcome::Exhausted => exhausted.push(n),
                Outcome::Cycle { cycle, transient } => {
                    let fresh = || Tally {
                        first_witness: n,
                        ..Tally::default()
                    };
                    let tally = match cycle {
                        CycleRef::Cached(id) => by_id.entry(id).or_insert_with(fresh),
                        CycleRef::Found(c) => by_cycle.entry(c).or_insert_with(fresh),
                    };
                    tally.basin_count += 1;
                    tally.max_transient = tally.max_transient.max(transient);
                }
            }
            if n == hi {
                break;
            }
            n += 1;
        }

        let mut merged: HashMap<Vec<u128>, CycleRecord> = HashMap::new();
        let cached = by_id.into_iter().map(|(id, t)| {
            (
                cache
                    .expect("cached outcome without cache")
                    .cycle(id)
                    .to_vec(),
                t,
            )
        });
        for (cycle, t) in cached.chain(by_cycle) {
            let rec = CycleRecord {
                cycle: cycle.clone(),
                first_witness: t.first_witness,
                basin_count: t.basin_count,
                max_transient: t.max_transient,
            };
            merged
                .entry(cycle)
                .and_modify(|r| r.absorb(&rec))
                .or_insert(rec);
        }
        let mut cycles: Vec<CycleRecord> = merged.into_values().collect();
        cycles.sort_by_key(|c| c.first_witness);
        ChunkRecord {
            key: ChunkKey {
                k: self.params.k(),
                p: self.params.p(),
                budget: self.budget,
                lo,
                hi,
            },
            cycles,
            budget_exhausted_starts: exhausted,
        }
    }
}

/// Chunk bounds covering `lo..=hi`, cut at multiples of `size`.
fn chunk_bounds(lo: u128, hi: u128, size: u64) -> Vec<(u128, u128)> {
    let size = u128::from(size);
    let mut out = Vec::new();
    let mut start = lo;
    loop {
        let end = (start / size)
            .saturating_mul(size)
            .saturating_add(size - 1)
            .min(hi);
        out.push((start, end));
        if end == hi {
            break;
        }
        start = end + 1;
    }
    out
}

fn check_range(n_lo: u128, n_hi: u128, budget: u64, opts: &SweepOptions) -> Result<()> {
    if n_lo > n_hi {
        return Err(Error::InvalidInput(format!("empty range {n_lo}..={n_hi}")));
    }
    if n_hi - n_lo >= u128::from(u64::MAX) {
        return Err(Error::InvalidInput(
            "range holds more than 2^64 - 1 starts".into(),
        ));
    }
    if budget == 0 {
        return Err(Error::InvalidInput("step budget must be at least 1".into()));
    }
    if opts.chunk_size == 0 {
        return Err(Error::InvalidInput("chunk size must be at least 1".into()));
    }
    Ok(())
}

/// Runs inside an already-installed pool.
fn verify_in_pool(
    params: &Parameters,
    n_lo: u128,
    n_hi: u128,
    budget: u64,
    opts: &SweepOptions,
    checkpoint: Option<&Checkpoint>,
) -> Result<RangeReport> {
    let engine = Engine::new(params, budget, opts.memo);
    let chunks = chunk_bounds(n_lo, n_hi, opts.chunk_size);
    let records = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let key = ChunkKey {
                k: params.k(),
                p: params.p(),
                budget,
                lo,
                hi,
            };
            if let Some(done) = checkpoint.and_then(|c| c.get(&key)) {
                return Ok(done.clone());
            }
            let record = engine.run_chunk(lo, hi);
            if let Some(ck) = checkpoint {
                ck.append(&record)?;
            }
            Ok(record)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(merge(params, n_lo, n_hi, budget, &records))
}

fn merge(
    params: &Parameters,
    n_lo: u128,
    n_hi: u128,
    budget: u64,
    records: &[ChunkRecord],
) -> RangeReport {
    let mut cycles: BTreeMap<Vec<u128>, CycleRecord> = BTreeMap::new();
    let mut exhausted = Vec::new();
    for rec in records {
        for c in &rec.cycles {
            cycles
                .entry(c.cycle.clone())
                .and_modify(|r| r.absorb(c))
                .or_insert_with(|| c.clone());
        }
        exhausted.extend_from_slice(&rec.budget_exhausted_starts);
    }
    let mut cycles: Vec<CycleRecord> = cycles.into_values().collect();
    cycles.sort_by_key(|c| c.first_witness);
    let all_reach_m = exhausted.is_empty() && cycles.len() == 1 && cycles[0].is_one_two();
    RangeReport {
        parameters: *params,
        n_lo,
        n_hi,
        budget,
        all_reach_m,
        max_transient: cycles.iter().map(|c| c.max_transient).max().unwrap_or(0),
        cycles,
        budget_exhausted_starts: exhausted,
    }
}

/// Classifies every start in `n_lo..=n_hi`.
///
/// The result is identical for any worker count and chunk schedule.
pub fn verify_range(
    params: &Parameters,
    n_lo: u128,
    n_hi: u128,
    budget: u64,
    opts: &SweepOptions,
) -> Result<RangeReport> {
    check_range(n_lo, n_hi, budget, opts)?;
    let checkpoint = opts
        .checkpoint
        .as_deref()
        .map(Checkpoint::open)
        .transpose()?;
    opts.pool()?
        .install(|| verify_in_pool(params, n_lo, n_hi, budget, opts, checkpoint.as_ref()))
}

/// Distinct cycles reached from `1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleCatalog {
    pub parameters: Parameters,
    #[serde(with = "crate::decimal::dec")]
    pub n_max: u128,
    /// Sorted by first witness.
    pub cycles: Vec<CycleRecord>,
    #[serde(with = "crate::decimal::dec_vec")]
    pub budget_exhausted_starts: Vec<u128>,
}

pub fn cycle_catalog(
    params: &Parameters,
    n_max: u128,
    budget: u64,
    opts: &SweepOptions,
) -> Result<CycleCatalog> {
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    let report = verify_range(params, 1, n_max, budget, opts)?;
    Ok(CycleCatalog {
        parameters: *params,
        n_max,
        cycles: report.cycles,
        budget_exhausted_starts: report.budget_exhausted_starts,
    })
}

/// One `(k, p)` cell of a grid sweep over starts `1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    #[serde(with = "crate::decimal::dec")]
    pub k: u32,
    #[serde(with = "crate::decimal::dec")]
    pub p: u32,
    #[serde(with = "crate::decimal::dec")]
    pub r: u32,
    #[serde(with = "crate::decimal::dec")]
    pub s: u32,
    pub holds_h: bool,
    pub holds_h1: bool,
    pub holds_h2: bool,
    #[serde(with = "crate::decimal::dec")]
    pub f_max: u128,
    #[serde(with = "crate::decimal::dec")]
    pub n_max: u128,
    /// Distinct cycles in first-witness order.
    pub cycles: Vec<CycleRecord>,
    #[serde(with = "crate::decimal::dec")]
    pub max_transient: u64,
    #[serde(with = "crate::decimal::dec")]
    pub budget_exhausted: u64,
}

impl GridCell {
    pub fn cycle_set(&self) -> Vec<Vec<u128>> {
        self.cycles.iter().map(|c| c.cycle.clone()).collect()
    }

    /// Conforming cells must have limit set exactly `{1, 2}` with no start
    /// left unresolved.
    pub fn check_theorem(&self) -> Result<()> {
        if !self.holds_h {
            return Ok(());
        }
        let ok =
            self.budget_exhausted == 0 && self.cycles.len() == 1 && self.cycles[0].is_one_two();
        if ok {
            Ok(())
        } else {
            Err(Error::TheoremViolation {
                k: self.k,
                p: self.p,
                dump: format!("{self:#?}"),
            })
        }
    }
}

/// Sweeps every `(k, p)` in the two ranges, ordered by `(p, k)`.
///
/// Fails with [`Error::TheoremViolation`] if a conforming cell reports any
/// limit set other than `{1, 2}`.
pub fn grid_sweep(
    k_range: RangeInclusive<u32>,
    p_range: RangeInclusive<u32>,
    n_max: u128,
    budget: u64,
    opts: &SweepOptions,
) -> Result<Vec<GridCell>> {
    if k_range.is_empty() || p_range.is_empty() {
        return Err(Error::InvalidInput(
            "k and p ranges must be nonempty".into(),
        ));
    }
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max must be at least 1".into()));
    }
    check_range(1, n_max, budget, opts)?;
    let mut pairs = Vec::new();
    for p in p_range {
        for k in k_range.clone() {
            pairs.push(Parameters::new(k, p)?);
        }
    }
    let checkpoint = opts
        .checkpoint
        .as_deref()
        .map(Checkpoint::open)
        .transpose()?;
    let cells = opts.pool()?.install(|| {
        pairs
            .par_iter()
            .map(|params| {
                let report = verify_in_pool(params, 1, n_max, budget, opts, checkpoint.as_ref())?;
                let flags = check_assumptions(params.k(), params.p())?;
                Ok(GridCell {
                    k: params.k(),
                    p: params.p(),
                    r: params.r(),
                    s: params.s(),
                    holds_h: flags.holds_h,
                    holds_h1: flags.holds_h1,
                    holds_h2: flags.holds_h2,
                    f_max: flags.f_max,
                    n_max,
                    max_transient: report.max_transient,
                    budget_exhausted: report.budget_exhausted_starts.len() as u64,
                    cycles: report.cycles,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    for cell in &cells {
        cell.check_theorem()?;
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(k: u32, p: u32) -> Parameters {
        Parameters::new(k, p).unwrap()
    }

    #[test]
    fn chunk_bounds_are_aligned_and_cover() {
        assert_eq!(chunk_bounds(1, 10, 4), vec![(1, 3), (4, 7), (8, 10)]);
        assert_eq!(chunk_bounds(5, 5, 4), vec![(5, 5)]);
        assert_eq!(chunk_bounds(0, 7, 4), vec![(0, 3), (4, 7)]);
        assert_eq!(
            chunk_bounds(u128::MAX - 2, u128::MAX, 2),
            vec![(u128::MAX - 2, u128::MAX - 2), (u128::MAX - 1, u128::MAX)]
        );
    }

    #[test]
    fn single_start_on_the_cycle() {
        let rep = verify_range(&params(10, 7), 1, 1, 10_000, &SweepOptions::default()).unwrap();
        assert!(rep.all_reach_m);
        assert_eq!(rep.cycle_set(), vec![vec![1, 2]]);
        assert_eq!(rep.max_transient, 0);
    }

    #[test]
    fn example_three_basins() {
        let rep = verify_range(&params(3, 2), 1, 1000, 10_000, &SweepOptions::default()).unwrap();
        assert!(!rep.all_reach_m);
        let four = rep.find_cycle(&[4]).unwrap();
        let one_two = rep.find_cycle(&[1, 2]).unwrap();
        assert_eq!(one_two.first_witness, 1);
        assert_eq!(four.basin_count + one_two.basin_count, 1000);
        // Independent count from a plain Python enumeration.
        assert_eq!(one_two.basin_count, 855);
    }

    #[test]
    fn memo_and_plain_agree() {
        for (k, p) in [(3, 2), (5, 2), (16, 8), (40, 2), (7, 3)] {
            let plain = SweepOptions {
                memo: false,
                chunk_size: 333,
                ..SweepOptions::default()
            };
            let memo = SweepOptions {
                chunk_size: 4096,
                ..SweepOptions::default()
            };
            let a = verify_range(&params(k, p), 1, 20_000, 10_000, &plain).unwrap();
            let b = verify_range(&params(k, p), 1, 20_000, 10_000, &memo).unwrap();
            assert_eq!(a, b, "k={k} p={p}");
        }
    }

    #[test]
    fn tiny_budget_reports_exhausted_starts() {
        let rep = verify_range(&params(16, 8), 1, 500, 1, &SweepOptions::default()).unwrap();
        assert!(!rep.all_reach_m);
        assert!(!rep.budget_exhausted_starts.is_empty());
        let covered: u64 = rep.cycles.iter().map(|c| c.basin_count).sum();
        assert_eq!(
            u128::from(covered) + rep.budget_exhausted_starts.len() as u128,
            500
        );
        assert!(rep.budget_exhausted_starts.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn invalid_ranges() {
        let opts = SweepOptions::default();
        assert!(verify_range(&params(10, 7), 5, 4, 10, &opts).is_err());
        assert!(verify_range(&params(10, 7), 1, 4, 0, &opts).is_err());
        assert!(verify_range(&params(10, 7), 0, u128::MAX, 10, &opts).is_err());
        assert!(cycle_catalog(&params(10, 7), 0, 10, &opts).is_err());
        let (hi, lo) = (4, 5);
        assert!(grid_sweep(lo..=hi, 2..=3, 10, 10, &opts).is_err());
        assert!(grid_sweep(2..=4, 2..=3, 0, 10, &opts).is_err());
        assert!(grid_sweep(1..=4, 2..=3, 10, 10, &opts).is_err());
    }

    #[test]
    fn theorem_guard_fires_on_a_bad_conforming_cell() {
        let cell = GridCell {
            k: 10,
            p: 7,
            r: 1,
            s: 2,
            holds_h: true,
            holds_h1: true,
            holds_h2: true,
            f_max: 6,
            n_max: 10,
            cycles: vec![CycleRecord {
                cycle: vec![4],
                first_witness: 4,
                basin_count: 10,
                max_transient: 0,
            }],
            max_transient: 0,
            budget_exhausted: 0,
        };
        match cell.check_theorem() {
            Err(Error::TheoremViolation { k: 10, p: 7, dump }) => assert!(dump.contains("cycle")),
            other => panic!("expected a violation, got {other:?}"),
        }
        let mut starved = cell.clone();
        starved.cycles = vec![CycleRecord {
            cycle: vec![1, 2],
            first_witness: 1,
            basin_count: 9,
            max_transient: 1,
        }];
        starved.budget_exhausted = 1;
        assert!(starved.check_theorem().is_err());
        let mut nonconforming = cell;
        nonconforming.holds_h = false;
        assert!(nonconforming.check_theorem().is_ok());
    }

    #[test]
    fn grid_order_is_p_then_k() {
        let cells = grid_sweep(2..=4, 2..=3, 100, 10_000, &SweepOptions::default()).unwrap();
        let order: Vec<(u32, u32)> = cells.iter().map(|c| (c.p, c.k)).collect();
        assert_eq!(order, vec![(2, 2), (2, 3), (2, 4), (3, 2), (3, 3), (3, 4)]);
        assert_eq!(cells[0].cycle_set(), vec![vec![2]]);
        assert!(cells.iter().all(|c| !c.holds_h));
    }
}
