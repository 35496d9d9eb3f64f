//! Command traces and property checking against them.
//!
//! A trace is a text file:
//!
//! ```text
//! format=1
//! standard=DDR4
//! bankgroups=4
//! # cycle command [rank [bankgroup [bank]]]
//! 0 ACT 0 1 2
//! 22 RD 0 1 2
//! ```
//!
//! Header `key=value` lines come first and echo the configuration the trace
//! was recorded under; they are compared against the property set before
//! checking. Exactly one command per cycle.

mod check;
mod report;

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::petri::{Command, CommandError, Topology};

pub use check::{check, check_corpus, check_with_events, CheckError, Checker};
pub use report::{
    coverage, CommandCoverage, FeatureCoverageSummary, PropertyVerdict, Status, VerdictReport,
    Witness, CORPUS_NOTE,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    /// 1-based source line, 0 for traces built in memory.
    pub line: usize,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CommandTrace {
    pub name: String,
    pub header: BTreeMap<String, String>,
    pub records: Vec<TraceRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TraceError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: unsupported format version `{value}`")]
    Format { line: usize, value: String },
    #[error("line {line}: header entry after the first command")]
    LateHeader { line: usize },
    #[error("line {line}: second command at cycle {cycle}; one command per cycle")]
    DuplicateCycle { line: usize, cycle: u64 },
    #[error("line {line}: cycle {cycle} is before the previous command at cycle {previous}")]
    NotMonotone { line: usize, cycle: u64, previous: u64 },
    #[error("line {line}: {error}")]
    Command { line: usize, error: CommandError },
}

impl TraceError {
    pub fn line(&self) -> usize {
        match *self {
            TraceError::Malformed { line, .. }
            | TraceError::Format { line, .. }
            | TraceError::LateHeader { line }
            | TraceError::DuplicateCycle { line, .. }
            | TraceError::NotMonotone { line, .. }
            | TraceError::Command { line, .. } => line,
        }
    }
}

impl CommandTrace {
    /// A trace built in memory; commands must already be strictly ordered.
    pub fn from_commands(name: &str, commands: Vec<Command>) -> Self {
        Self {
            name: name.to_string(),
            header: BTreeMap::new(),
            records: commands
                .into_iter()
                .map(|command| TraceRecord { line: 0, command })
                .collect(),
        }
    }

    pub fn commands(&self) -> impl Iterator<Item = &Command> {
        self.records.iter().map(|r| &r.command)
    }

    pub fn to_text(&self, topo: &Topology) -> String {
        let mut out = String::from("format=1\n");
        for (k, v) in &self.header {
            writeln!(out, "{k}={v}").unwrap();
        }
        for r in &self.records {
            writeln!(out, "{}", topo.display_command(&r.command)).unwrap();
        }
        out
    }
}

/// Parse and validate a trace against the commands and instance counts of
/// `topo`.
pub fn load_trace(text: &str, topo: &Topology) -> Result<CommandTrace, TraceError> {
    let mut trace = CommandTrace {
        name: "trace".to_string(),
        ..Default::default()
    };
    let mut previous: Option<u64> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some((k, v)) = body.split_once('=') {
            if !trace.records.is_empty() {
                return Err(TraceError::LateHeader { line });
            }
            let (k, v) = (k.trim(), v.trim());
            if k == "format" && v != "1" {
                return Err(TraceError::Format {
                    line,
                    value: v.to_string(),
                });
            }
            if k != "format" {
                trace.header.insert(k.to_string(), v.to_string());
            }
            continue;
        }
        let mut fields = body.split_whitespace();
        let malformed = |message: String| TraceError::Malformed { line, message };
        let cycle_text = fields.next().unwrap();
        let cycle: u64 = cycle_text
            .parse()
            .map_err(|_| malformed(format!("`{cycle_text}` is not a cycle number")))?;
        let name = fields
            .next()
            .ok_or_else(|| malformed("missing command after the cycle".to_string()))?;
        let coords = fields
            .map(|f| {
                f.parse::<u32>()
                    .map_err(|_| malformed(format!("`{f}` is not a coordinate")))
            })
            .collect::<Result<Vec<u32>, _>>()?;
        if let Some(prev) = previous {
            if cycle == prev {
                return Err(TraceError::DuplicateCycle { line, cycle });
            }
            if cycle < prev {
                return Err(TraceError::NotMonotone {
                    line,
                    cycle,
                    previous: prev,
                });
            }
        }
        let command = topo
            .command(cycle, name, &coords)
            .map_err(|error| TraceError::Command { line, error })?;
        previous = Some(cycle);
        trace.records.push(TraceRecord { line, command });
    }
    Ok(trace)
}
