//! Text, CSV and JSON renderings of library results.
//!
//! Integers are always written in plain decimal. JSON output wraps every
//! payload in an envelope `{ "command", "params", "payload" }` with integers
//! as strings.

use std::io::{self, Write};

use serde_json::{json, Map, Value};
use ztransform::{
    AssumptionReport, CycleCatalog, CycleRecord, GridCell, RangeReport, Trajectory,
    TrajectoryStatus,
};

use crate::args::Format;

pub fn envelope(command: &str, params: &[(&str, String)], payload: Value) -> Value {
    let params: Map<String, Value> = params
        .iter()
        .map(|(k, v)| ((*k).to_owned(), Value::String(v.clone())))
        .collect();
    json!({ "command": command, "params": params, "payload": payload })
}

fn write_json(out: &mut dyn Write, value: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

fn payload<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("library types serialize")
}

fn join<T: ToString>(items: &[T], sep: &str) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(sep)
}

fn bracketed<T: ToString>(items: &[T]) -> String {
    format!("[{}]", join(items, ", "))
}

fn status_name(status: TrajectoryStatus) -> &'static str {
    match status {
        TrajectoryStatus::CycleFound => "cycle-found",
        TrajectoryStatus::BudgetExhausted => "budget-exhausted",
    }
}

/// `step,value` rows, one per orbit element including the start.
pub fn trajectory_csv(t: &Trajectory) -> String {
    let mut s = String::from("step,value\n");
    for (i, v) in t.steps().iter().enumerate() {
        s.push_str(&format!("{i},{v}\n"));
    }
    s
}

pub fn trajectory(
    out: &mut dyn Write,
    format: Format,
    t: &Trajectory,
    budget: u64,
) -> io::Result<()> {
    let params = t.parameters();
    match format {
        Format::Csv => out.write_all(trajectory_csv(t).as_bytes()),
        Format::Json => write_json(
            out,
            &envelope(
                "trajectory",
                &[
                    ("n", t.start().to_string()),
                    ("k", params.k().to_string()),
                    ("p", params.p().to_string()),
                    ("budget", budget.to_string()),
                ],
                payload(t),
            ),
        ),
        Format::Plain => {
            writeln!(
                out,
                "trajectory of {} with {params} (budget {budget})",
                t.start()
            )?;
            let width = t.steps().len().saturating_sub(1).to_string().len().max(4);
            writeln!(out, "{:>width$}  value", "step")?;
            for (i, v) in t.steps().iter().enumerate() {
                writeln!(out, "{i:>width$}  {v}")?;
            }
            writeln!(out, "status: {}", status_name(t.status()))?;
            if t.found_cycle() {
                writeln!(out, "transient: {}", t.transient_length())?;
                writeln!(out, "cycle: {}", bracketed(t.cycle()))?;
            }
            Ok(())
        }
    }
}

pub fn assumptions(out: &mut dyn Write, format: Format, rep: &AssumptionReport) -> io::Result<()> {
    let pr = &rep.parameters;
    match format {
        Format::Csv => {
            writeln!(out, "k,p,r,s,holds_h,holds_h1,holds_h2,f_max")?;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                pr.k(),
                pr.p(),
                pr.r(),
                pr.s(),
                rep.holds_h,
                rep.holds_h1,
                rep.holds_h2,
                rep.f_max
            )
        }
        Format::Json => write_json(
            out,
            &envelope(
                "check-params",
                &[("k", pr.k().to_string()), ("p", pr.p().to_string())],
                payload(rep),
            ),
        ),
        Format::Plain => {
            let verdict = if rep.holds_h { "hold" } else { "fail" };
            writeln!(out, "{pr}: assumptions {verdict}")?;
            writeln!(
                out,
                "  decomposition    k = r*p + s + 1 with r={} s={}",
                pr.r(),
                pr.s()
            )?;
            writeln!(out, "  p+2 <= k < p^2-3p+2, p > 5   {}", rep.holds_h)?;
            writeln!(out, "  1 <= r <= p-4                {}", rep.holds_h1)?;
            writeln!(out, "  (r+1)(r+2) <= r*p + 1        {}", rep.holds_h2)?;
            writeln!(out, "  f_max            {}", rep.f_max)
        }
    }
}

fn cycles_csv(out: &mut dyn Write, cycles: &[CycleRecord]) -> io::Result<()> {
    writeln!(out, "cycle,basin_count,first_witness,max_transient")?;
    for c in cycles {
        writeln!(
            out,
            "{},{},{},{}",
            join(&c.cycle, " "),
            c.basin_count,
            c.first_witness,
            c.max_transient
        )?;
    }
    Ok(())
}

fn cycles_plain(out: &mut dyn Write, cycles: &[CycleRecord]) -> io::Result<()> {
    for c in cycles {
        writeln!(
            out,
            "  {}  basin={} first_witness={} max_transient={}",
            bracketed(&c.cycle),
            c.basin_count,
            c.first_witness,
            c.max_transient
        )?;
    }
    Ok(())
}

fn exhausted_plain(out: &mut dyn Write, starts: &[u128]) -> io::Result<()> {
    if !starts.is_empty() {
        writeln!(
            out,
            "budget-exhausted starts ({}): {}",
            starts.len(),
            join(starts, " ")
        )?;
    }
    Ok(())
}

pub fn range_report(out: &mut dyn Write, format: Format, rep: &RangeReport) -> io::Result<()> {
    let pr = &rep.parameters;
    match format {
        Format::Csv => cycles_csv(out, &rep.cycles),
        Format::Json => write_json(
            out,
            &envelope(
                "verify",
                &[
                    ("k", pr.k().to_string()),
                    ("p", pr.p().to_string()),
                    ("from", rep.n_lo.to_string()),
                    ("to", rep.n_hi.to_string()),
                    ("budget", rep.budget.to_string()),
                ],
                payload(rep),
            ),
        ),
        Format::Plain => {
            writeln!(
                out,
                "verify {pr} over {}..{} (budget {})",
                rep.n_lo, rep.n_hi, rep.budget
            )?;
            let verdict = if rep.all_reach_m {
                "every start reaches [1, 2]"
            } else {
                "NOT every start reaches [1, 2]"
            };
            writeln!(out, "{verdict}")?;
            writeln!(out, "max transient: {}", rep.max_transient)?;
            writeln!(out, "cycles:")?;
            cycles_plain(out, &rep.cycles)?;
            exhausted_plain(out, &rep.budget_exhausted_starts)
        }
    }
}

pub fn catalog(
    out: &mut dyn Write,
    format: Format,
    cat: &CycleCatalog,
    budget: u64,
) -> io::Result<()> {
    let pr = &cat.parameters;
    match format {
        Format::Csv => cycles_csv(out, &cat.cycles),
        Format::Json => write_json(
            out,
            &envelope(
                "limits",
                &[
                    ("k", pr.k().to_string()),
                    ("p", pr.p().to_string()),
                    ("n_max", cat.n_max.to_string()),
                    ("budget", budget.to_string()),
                ],
                payload(cat),
            ),
        ),
        Format::Plain => {
            writeln!(out, "limit cycles for {pr} from starts 1..{}", cat.n_max)?;
            cycles_plain(out, &cat.cycles)?;
            exhausted_plain(out, &cat.budget_exhausted_starts)
        }
    }
}

fn cycle_set(cell: &GridCell) -> String {
    cell.cycles
        .iter()
        .map(|c| join(&c.cycle, " "))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn grid(
    out: &mut dyn Write,
    format: Format,
    cells: &[GridCell],
    params: &[(&str, String)],
) -> io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(
                out,
                "k,p,r,s,holds_h,holds_h1,holds_h2,f_max,max_transient,budget_exhausted,cycles"
            )?;
            for c in cells {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    c.k,
                    c.p,
                    c.r,
                    c.s,
                    c.holds_h,
                    c.holds_h1,
                    c.holds_h2,
                    c.f_max,
                    c.max_transient,
                    c.budget_exhausted,
                    cycle_set(c)
                )?;
            }
            Ok(())
        }
        Format::Json => write_json(out, &envelope("sweep", params, payload(&cells))),
        Format::Plain => {
            writeln!(
                out,
                "{:>6} {:>6} {:>5} {:>6} {:>6} {:>9}  cycles",
                "k", "p", "H", "H1", "H2", "transient"
            )?;
            for c in cells {
                let cycles: Vec<String> = c.cycles.iter().map(|r| bracketed(&r.cycle)).collect();
                writeln!(
                    out,
                    "{:>6} {:>6} {:>5} {:>6} {:>6} {:>9}  {}{}",
                    c.k,
                    c.p,
                    c.holds_h,
                    c.holds_h1,
                    c.holds_h2,
                    c.max_transient,
                    cycles.join(" "),
                    if c.budget_exhausted > 0 {
                        format!("  ({} exhausted)", c.budget_exhausted)
                    } else {
                        String::new()
                    }
                )?;
            }
            Ok(())
        }
    }
}
