//! Append-only record of completed chunks.
//!
//! One line per chunk, space-separated `key=value` fields after a leading
//! `chunk` tag:
//!
//! ```text
//! chunk v=1 k=10 p=7 budget=10000 lo=0 hi=65535 max_transient=4 exhausted=- cycle=1.2/65535/1/4
//! ```
//!
//! `cycle` repeats once per cycle as `members/basin_count/first_witness/max_transient`
//! with members joined by `.`; `exhausted` is a comma list or `-`. Unknown keys
//! are ignored. Lines that fail to parse or fail the tally check are skipped
//! on load, so a torn final write only costs that chunk.

use std::collections::HashMap;
use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Read, Seek, SeekFrom, Write};
use std::path::Path;
use std::str::FromStr;
use std::sync::Mutex;

use super::CycleRecord;
use crate::error::{Error, Result};

const FORMAT_VERSION: u32 = 1;

/// Identifies a chunk independently of the run that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChunkKey {
    pub k: u32,
    pub p: u32,
    pub budget: u64,
    pub lo: u128,
    pub hi: u128,
}

/// Tallies for the starts `lo..=hi`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChunkRecord {
    pub key: ChunkKey,
    /// Sorted by first witness.
    pub cycles: Vec<CycleRecord>,
    pub budget_exhausted_starts: Vec<u128>,
}

impl ChunkRecord {
    pub fn max_transient(&self) -> u64 {
        self.cycles
            .iter()
            .map(|c| c.max_transient)
            .max()
            .unwrap_or(0)
    }

    /// Basin counts and exhausted starts must cover the chunk exactly.
    pub fn is_consistent(&self) -> bool {
        let ChunkKey { lo, hi, .. } = self.key;
        if lo > hi {
            return false;
        }
        let in_range = |n: &u128| (lo..=hi).contains(n);
        let covered = self
            .cycles
            .iter()
            .map(|c| u128::from(c.basin_count))
            .sum::<u128>()
            + self.budget_exhausted_starts.len() as u128;
        covered == hi - lo + 1
            && self
                .cycles
                .iter()
                .all(|c| in_range(&c.first_witness) && !c.cycle.is_empty())
            && self.budget_exhausted_starts.iter().all(in_range)
    }
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

impl fmt::Display for ChunkRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ChunkKey {
            k,
            p,
            budget,
            lo,
            hi,
        } = self.key;
        write!(
            f,
            "chunk v={FORMAT_VERSION} k={k} p={p} budget={budget} lo={lo} hi={hi} max_transient={}",
            self.max_transient()
        )?;
        if self.budget_exhausted_starts.is_empty() {
            write!(f, " exhausted=-")?;
        } else {
            write!(f, " exhausted={}", join(&self.budget_exhausted_starts, ","))?;
        }
        for c in &self.cycles {
            write!(
                f,
                " cycle={}/{}/{}/{}",
                join(&c.cycle, "."),
                c.basin_count,
                c.first_witness,
                c.max_transient
            )?;
        }
        Ok(())
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Checkpoint(msg.into())
}

fn num<T: FromStr>(field: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| bad(format!("field `{field}` is not a number: {value:?}")))
}

fn parse_cycle(value: &str) -> Result<CycleRecord> {
    let parts: Vec<&str> = value.split('/').collect();
    let [members, basin, witness, transient] = parts[..] else {
        return Err(bad(format!("cycle field needs four parts: {value:?}")));
    };
    Ok(CycleRecord {
        cycle: members
            .split('.')
            .map(|m| num("cycle", m))
            .collect::<Result<_>>()?,
        basin_count: num("cycle", basin)?,
        first_witness: num("cycle", witness)?,
        max_transient: num("cycle", transient)?,
    })
}

impl FromStr for ChunkRecord {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let mut fields = line.split_whitespace();
        if fields.next() != Some("chunk") {
            return Err(bad("missing `chunk` tag"));
        }
        let mut scalars: HashMap<&str, &str> = HashMap::new();
        let mut cycles = Vec::new();
        for field in fields {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got {field:?}")))?;
            match key {
                "cycle" => cycles.push(parse_cycle(value)?),
                _ => {
                    scalars.insert(key, value);
                }
            }
        }
        let get = |key: &str| {
            scalars
                .get(key)
                .copied()
                .ok_or_else(|| bad(format!("missing `{key}`")))
        };
        let version: u32 = num("v", get("v")?)?;
        if version != FORMAT_VERSION {
            return Err(bad(format!("unsupported version {version}")));
        }
        let exhausted = match get("exhausted")? {
            "-" => Vec::new(),
            list => list
                .split(',')
                .map(|s| num("exhausted", s))
                .collect::<Result<_>>()?,
        };
        cycles.sort_by_key(|c: &CycleRecord| c.first_witness);
        let record = ChunkRecord {
            key: ChunkKey {
                k: num("k", get("k")?)?,
                p: num("p", get("p")?)?,
                budget: num("budget", get("budget")?)?,
                lo: num("lo", get("lo")?)?,
                hi: num("hi", get("hi")?)?,
            },
            cycles,
            budget_exhausted_starts: exhausted,
        };
        if !record.is_consistent() {
            return Err(bad("tallies do not cover the chunk"));
        }
        if let Some(max) = scalars.get("max_transient") {
            if num::<u64>("max_transient", max)? != record.max_transient() {
                return Err(bad("max_transient disagrees with cycle fields"));
            }
        }
        Ok(record)
    }
}

/// An open checkpoint file: what was already done, plus an append handle.
#[derive(Debug)]
pub(crate) struct Checkpoint {
    done: HashMap<ChunkKey, ChunkRecord>,
    file: Mutex<File>,
}

impl Checkpoint {
    pub(crate) fn open(path: &Path) -> Result<Self> {
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)?;
        let mut done = HashMap::new();
        for line in BufReader::new(&file).lines() {
            if let Ok(record) = line?.parse::<ChunkRecord>() {
                done.entry(record.key).or_insert(record);
            }
        }
        // Terminate a torn final line so the next record starts cleanly.
        let len = file.metadata()?.len();
        if len > 0 {
            file.seek(SeekFrom::Start(len - 1))?;
            let mut last = [0u8];
            file.read_exact(&mut last)?;
            if last[0] != b'\n' {
                file.write_all(b"\n")?;
            }
        }
        Ok(Self {
            done,
            file: Mutex::new(file),
        })
    }

    pub(crate) fn get(&self, key: &ChunkKey) -> Option<&ChunkRecord> {
        self.done.get(key)
    }

    pub(crate) fn append(&self, record: &ChunkRecord) -> Result<()> {
        let line = format!("{record}\n");
        let mut file = self.file.lock().unwrap_or_else(|e| e.into_inner());
        file.write_all(line.as_bytes())?;
        file.flush()?;
        Ok(())
    }
}
