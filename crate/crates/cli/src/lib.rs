//! Library half of the `ztransform` binary: argument definitions, command
//! dispatch and output rendering.

pub mod args;
pub mod render;

use std::io::Write;

use anyhow::Result;
use ztransform::{
    check_assumptions, cycle_catalog, grid_sweep, trajectory, verify_range, Parameters,
    SweepOptions,
};

use args::{Cli, Command, GlobalArgs};

/// Exit statuses. Stable across releases.
pub mod exit {
    pub const OK: u8 = 0;
    /// `check-params`: assumptions fail. `verify`: some start avoids `[1, 2]`.
    pub const NEGATIVE: u8 = 1;
    /// `verify`: some starts ran out of budget.
    pub const BUDGET_EXHAUSTED: u8 = 2;
    /// `sweep`: a conforming cell contradicted the limit-set theorem.
    pub const THEOREM_VIOLATION: u8 = 3;
    pub const USAGE: u8 = 64;
    pub const IO: u8 = 74;
}

fn sweep_options(global: &GlobalArgs) -> SweepOptions {
    SweepOptions {
        workers: global.workers,
        checkpoint: global.checkpoint.clone(),
        ..SweepOptions::default()
    }
}

/// Runs one command, writing its report to `out`. Returns the exit status.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8> {
    let g = &cli.global;
    let status = match &cli.command {
        Command::Trajectory { n, kp } => {
            let params = Parameters::new(kp.k, kp.p)?;
            let t = trajectory(n, &params, g.budget)?;
            render::trajectory(out, g.format, &t, g.budget)?;
            exit::OK
        }
        Command::CheckParams { kp } => {
            let rep = check_assumptions(kp.k, kp.p)?;
            render::assumptions(out, g.format, &rep)?;
            if rep.holds_h {
                exit::OK
            } else {
                exit::NEGATIVE
            }
        }
        Command::Verify { kp, from, to } => {
            let params = Parameters::new(kp.k, kp.p)?;
            let rep = verify_range(&params, *from, *to, g.budget, &sweep_options(g))?;
            render::range_report(out, g.format, &rep)?;
            if !rep.budget_exhausted_starts.is_empty() {
                let list: Vec<String> = rep
                    .budget_exhausted_starts
                    .iter()
                    .map(u128::to_string)
                    .collect();
                eprintln!(
                    "budget exhausted for {} start(s): {}",
                    list.len(),
                    list.join(" ")
                );
                exit::BUDGET_EXHAUSTED
            } else if rep.all_reach_m {
                exit::OK
            } else {
                exit::NEGATIVE
            }
        }
        Command::Limits { kp, n_max } => {
            let params = Parameters::new(kp.k, kp.p)?;
            let cat = cycle_catalog(&params, *n_max, g.budget, &sweep_options(g))?;
            render::catalog(out, g.format, &cat, g.budget)?;
            exit::OK
        }
        Command::Sweep { k, p, n_max } => {
            let cells = grid_sweep(k.range(), p.range(), *n_max, g.budget, &sweep_options(g))?;
            let params = [
                ("k", format!("{}..{}", k.lo, k.hi)),
                ("p", format!("{}..{}", p.lo, p.hi)),
                ("n_max", n_max.to_string()),
                ("budget", g.budget.to_string()),
            ];
            render::grid(out, g.format, &cells, &params)?;
            exit::OK
        }
    };
    out.flush()?;
    Ok(status)
}

/// Exit status for an error returned by [`run`].
pub fn error_status(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<ztransform::Error>() {
        Some(ztransform::Error::TheoremViolation { .. }) => exit::THEOREM_VIOLATION,
        Some(ztransform::Error::Io(_) | ztransform::Error::Checkpoint(_)) => exit::IO,
        Some(_) => exit::USAGE,
        None if err.downcast_ref::<std::io::Error>().is_some() => exit::IO,
        None => exit::USAGE,
    }
}
