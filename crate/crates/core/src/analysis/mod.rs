//! Analyses built on checked traces: timing slack sweeps and property-set
//! diffs between protocol generations.

mod diff;
mod sweep;

pub use diff::{canonical_command, upgrade_diff, DiffEntry, DiffSide, UpgradeDiff, ValueChange, RENAMES};
pub use sweep::{
    slack_sweep, slack_sweep_rerun, sweep_report, SlackSweepResult, SweepError, TimingSlack,
    Utilization, LOWER_BOUND_NOTE,
};
