use std::fs;

use proptest::prelude::*;
use ztransform::{
    cycle_catalog, grid_sweep, sweep::ChunkRecord, verify_range, Parameters, SweepOptions,
    DEFAULT_BUDGET,
};

fn params(k: u32, p: u32) -> Parameters {
    Parameters::new(k, p).unwrap()
}

fn opts() -> SweepOptions {
    SweepOptions::default()
}

#[test]
fn conforming_range_reaches_one_two() {
    let rep = verify_range(&params(16, 8), 1, 100_000, DEFAULT_BUDGET, &opts()).unwrap();
    assert!(rep.all_reach_m);
    assert_eq!(rep.cycle_set(), vec![vec![1, 2]]);
    assert_eq!(rep.cycles[0].basin_count, 100_000);
    assert!(rep.budget_exhausted_starts.is_empty());
}

// Basin sizes below were counted by a separate brute-force script that
// iterates the digit map with exact rationals.
#[test]
fn catalogs_outside_the_hypotheses() {
    let cat = cycle_catalog(&params(5, 2), 10_000, DEFAULT_BUDGET, &opts()).unwrap();
    let cycles: Vec<(Vec<u128>, u128, u64)> = cat
        .cycles
        .iter()
        .map(|c| (c.cycle.clone(), c.first_witness, c.basin_count))
        .collect();
    assert_eq!(cycles[0], (vec![1, 2], 1, 8436));
    assert_eq!(cycles[1].0, vec![8]);
    assert_eq!(cycles[1].2, 1564);
    assert_eq!(cycles.len(), 2);

    let cat = cycle_catalog(&params(3, 2), 1000, DEFAULT_BUDGET, &opts()).unwrap();
    assert_eq!(cat.cycles.len(), 2);
    assert_eq!(cat.cycles[0].cycle, vec![1, 2]);
    assert_eq!(cat.cycles[0].basin_count, 855);
    assert_eq!(cat.cycles[1].cycle, vec![4]);
    assert_eq!(cat.cycles[1].basin_count, 145);

    let cat = cycle_catalog(&params(10, 6), 10_000, DEFAULT_BUDGET, &opts()).unwrap();
    assert_eq!(cat.cycles.len(), 1);
    assert_eq!(cat.cycles[0].cycle, vec![1, 2]);
    assert_eq!(cat.cycles[0].first_witness, 1);
}

#[test]
fn small_grid_has_mixed_cycle_sets() {
    let cells = grid_sweep(2..=4, 2..=3, 100, DEFAULT_BUDGET, &opts()).unwrap();
    let sets: Vec<Vec<Vec<u128>>> = cells.iter().map(|c| c.cycle_set()).collect();
    assert_eq!(
        sets,
        vec![
            vec![vec![2]],                // k=2 p=2
            vec![vec![1, 2], vec![4]],    // k=3 p=2
            vec![vec![1, 2], vec![3, 6]], // k=4 p=2
            vec![vec![2]],                // k=2 p=3
            vec![vec![1, 2], vec![4]],    // k=3 p=3
            vec![vec![1, 2]],             // k=4 p=3
        ]
    );
}

#[test]
fn degenerate_cell() {
    let cells = grid_sweep(2..=2, 2..=2, 100, DEFAULT_BUDGET, &opts()).unwrap();
    assert_eq!(cells.len(), 1);
    let c = &cells[0];
    assert!(!c.holds_h && !c.holds_h1 && !c.holds_h2);
    assert!(!c.cycles.is_empty());
}

#[test]
fn p_seven_column() {
    let cells = grid_sweep(9..=29, 7..=7, 10_000, DEFAULT_BUDGET, &opts()).unwrap();
    assert_eq!(cells.len(), 21);
    for c in &cells {
        assert!(c.holds_h, "k={}", c.k);
        assert_eq!(c.cycle_set(), vec![vec![1, 2]]);
    }
}

#[test]
fn transient_tripwire() {
    for p in 6..=9u32 {
        for k in p + 2..(p - 1) * (p - 2) {
            let n_max: u128 = 20_000;
            let rep = verify_range(&params(k, p), 1, n_max, DEFAULT_BUDGET, &opts()).unwrap();
            let mut digits = 0u64;
            let mut pow = 1u128;
            while pow < n_max {
                pow *= u128::from(k);
                digits += 1;
            }
            assert!(
                rep.max_transient <= 10 + 5 * digits,
                "k={k} p={p} λ={}",
                rep.max_transient
            );
        }
    }
}

#[test]
fn report_is_independent_of_workers_and_chunking() {
    let base = verify_range(
        &params(5, 2),
        1,
        30_000,
        DEFAULT_BUDGET,
        &opts().with_workers(1),
    )
    .unwrap();
    let json = serde_json::to_string(&base).unwrap();
    for workers in [2, 3, 8] {
        for chunk_size in [1u64, 777, 1 << 16] {
            let o = SweepOptions {
                workers,
                chunk_size,
                ..opts()
            };
            if chunk_size == 1 && workers > 2 {
                continue;
            }
            let rep = verify_range(&params(5, 2), 1, 30_000, DEFAULT_BUDGET, &o).unwrap();
            assert_eq!(
                serde_json::to_string(&rep).unwrap(),
                json,
                "workers={workers} chunk={chunk_size}"
            );
        }
    }
}

#[test]
fn report_json_round_trips() {
    let rep = verify_range(&params(3, 2), 1, 500, 3, &opts()).unwrap();
    let json = serde_json::to_string(&rep).unwrap();
    let back: ztransform::RangeReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, rep);
    assert_eq!(serde_json::to_string(&back).unwrap(), json);
    // Integers travel as strings.
    assert!(json.contains(r#""n_hi":"500""#));
}

#[test]
fn checkpoint_resume_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.ckpt");
    let o = SweepOptions {
        chunk_size: 1000,
        ..opts()
    }
    .with_checkpoint(&path);
    let plain = verify_range(&params(5, 2), 1, 9_500, DEFAULT_BUDGET, &opts()).unwrap();

    let first = verify_range(&params(5, 2), 1, 9_500, DEFAULT_BUDGET, &o).unwrap();
    assert_eq!(first, plain);
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 10);
    for line in &lines {
        let rec: ChunkRecord = line.parse().unwrap();
        assert_eq!((rec.key.k, rec.key.p), (5, 2));
    }

    // A rerun finds every chunk done and writes nothing.
    let again = verify_range(&params(5, 2), 1, 9_500, DEFAULT_BUDGET, &o).unwrap();
    assert_eq!(again, plain);
    assert_eq!(fs::read_to_string(&path).unwrap(), text);

    // Simulate an interrupted run: keep three chunks and a torn fourth line.
    let torn = format!(
        "{}\n{}\n{}\n{}",
        lines[0],
        lines[1],
        lines[2],
        &lines[3][..20]
    );
    fs::write(&path, torn).unwrap();
    let resumed = verify_range(&params(5, 2), 1, 9_500, DEFAULT_BUDGET, &o).unwrap();
    assert_eq!(resumed, plain);
    let valid = fs::read_to_string(&path)
        .unwrap()
        .lines()
        .filter(|l| l.parse::<ChunkRecord>().is_ok())
        .count();
    assert_eq!(valid, 10);
}

#[test]
fn checkpoint_shared_by_a_grid() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.ckpt");
    let o = opts().with_checkpoint(&path);
    let a = grid_sweep(8..=12, 6..=7, 5_000, DEFAULT_BUDGET, &o).unwrap();
    let len = fs::read_to_string(&path).unwrap().lines().count();
    assert_eq!(len, 10);
    let b = grid_sweep(8..=12, 6..=7, 5_000, DEFAULT_BUDGET, &o).unwrap();
    assert_eq!(a, b);
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), len);
    assert_eq!(
        a,
        grid_sweep(8..=12, 6..=7, 5_000, DEFAULT_BUDGET, &opts()).unwrap()
    );
}

#[test]
fn checkpoint_records_for_other_budgets_are_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.ckpt");
    let o = opts().with_checkpoint(&path);
    let tight = verify_range(&params(16, 8), 1, 300, 2, &o).unwrap();
    let loose = verify_range(&params(16, 8), 1, 300, DEFAULT_BUDGET, &o).unwrap();
    assert!(!tight.budget_exhausted_starts.is_empty());
    assert!(loose.all_reach_m);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basins_partition_the_range(
        k in 2u32..60, p in 2u32..12, lo in 1u128..50_000, len in 0u128..3000, budget in 1u64..12,
    ) {
        let rep = verify_range(&params(k, p), lo, lo + len, budget, &SweepOptions { chunk_size: 512, ..opts() }).unwrap();
        let covered: u128 = rep.cycles.iter().map(|c| u128::from(c.basin_count)).sum();
        prop_assert_eq!(covered + rep.budget_exhausted_starts.len() as u128, len + 1);
        prop_assert_eq!(rep.all_reach_m, rep.budget_exhausted_starts.is_empty() && rep.cycle_set() == vec![vec![1, 2]]);
        for c in &rep.cycles {
            prop_assert!(c.first_witness >= lo && c.first_witness <= lo + len);
        }
        let plain = verify_range(&params(k, p), lo, lo + len, budget, &SweepOptions { memo: false, ..opts() }).unwrap();
        prop_assert_eq!(plain, rep);
    }
}
