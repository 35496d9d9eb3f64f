use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::props::PropertyKind;

/// Printed with every coverage result.
pub const CORPUS_NOTE: &str = "Activation is measured on the given traces only. A property or command \
that is never activated was not exercised by this corpus; that is evidence of a missing feature, \
not a proof.";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Holds,
    Violated,
    NotActivated,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Holds => "HOLDS",
            Status::Violated => "VIOLATED",
            Status::NotActivated => "NOT_ACTIVATED",
        }
    }
}

/// The first command that broke a property.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub trace: String,
    pub line: usize,
    pub cycle: u64,
    pub command: String,
    pub constraint: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyVerdict {
    pub unique_id: String,
    pub kind: PropertyKind,
    pub commands: Vec<String>,
    /// Scope qualifier text, empty for the default scope.
    pub scope: String,
    pub status: Status,
    pub activations: u64,
    pub violations: u64,
    pub witness: Option<Witness>,
    pub timing_value: Option<u32>,
    /// Smallest observed distance between related commands.
    pub min_gap: Option<u64>,
    /// `min_gap - timing_value`.
    pub slack: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictReport {
    pub model: String,
    pub config: BTreeMap<String, u32>,
    /// Every command kind of the model.
    pub commands: Vec<String>,
    pub traces: Vec<String>,
    /// Ordered by `unique_id`.
    pub verdicts: Vec<PropertyVerdict>,
}

impl VerdictReport {
    pub fn violated(&self) -> impl Iterator<Item = &PropertyVerdict> {
        self.verdicts.iter().filter(|v| v.status == Status::Violated)
    }

    pub fn count(&self, status: Status) -> usize {
        self.verdicts.iter().filter(|v| v.status == status).count()
    }

    /// Combine results of two traces checked against the same properties.
    /// Witnesses from `self` take precedence, so merging in corpus order
    /// keeps the earliest one.
    pub fn merge(&self, other: &VerdictReport) -> VerdictReport {
        let mut out = self.clone();
        out.traces.extend(other.traces.iter().cloned());
        for (v, o) in out.verdicts.iter_mut().zip(&other.verdicts) {
            debug_assert_eq!(v.unique_id, o.unique_id);
            v.activations += o.activations;
            v.violations += o.violations;
            if v.witness.is_none() {
                v.witness = o.witness.clone();
            }
            v.min_gap = match (v.min_gap, o.min_gap) {
                (Some(a), Some(b)) => Some(a.min(b)),
                (a, b) => a.or(b),
            };
            v.slack = v
                .min_gap
                .zip(v.timing_value)
                .map(|(g, t)| g as i64 - i64::from(t));
            v.status = if v.violations > 0 {
                Status::Violated
            } else if v.activations == 0 {
                Status::NotActivated
            } else {
                Status::Holds
            };
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let cfg: Vec<String> = self.config.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(out, "model: {}", self.model).unwrap();
        writeln!(out, "config: {}", cfg.join(" ")).unwrap();
        writeln!(out, "traces: {}", self.traces.join(", ")).unwrap();
        out.push('\n');
        let width = self
            .verdicts
            .iter()
            .map(|v| v.unique_id.len())
            .max()
            .unwrap_or(8)
            .max(8);
        writeln!(
            out,
            "{:<width$}  {:<9}  {:<13}  {:>11}  {:>7}  {:>5}",
            "property", "kind", "status", "activations", "min_gap", "slack"
        )
        .unwrap();
        for v in &self.verdicts {
            let opt = |x: Option<String>| x.unwrap_or_else(|| "-".to_string());
            writeln!(
                out,
                "{:<width$}  {:<9}  {:<13}  {:>11}  {:>7}  {:>5}",
                v.unique_id,
                v.kind.label(),
                v.status.label(),
                v.activations,
                opt(v.min_gap.map(|g| g.to_string())),
                opt(v.slack.map(|s| s.to_string())),
            )
            .unwrap();
            if let Some(w) = &v.witness {
                writeln!(
                    out,
                    "{:width$}  first violation: {}:{} `{}`: {}",
                    "", w.trace, w.line, w.command, w.constraint
                )
                .unwrap();
            }
        }
        out.push('\n');
        writeln!(
            out,
            "{} properties: {} hold, {} violated, {} not activated",
            self.verdicts.len(),
            self.count(Status::Holds),
            self.count(Status::Violated),
            self.count(Status::NotActivated)
        )
        .unwrap();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CommandCoverage {
    pub command: String,
    pub properties: usize,
    pub activations: u64,
    pub not_activated: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeatureCoverageSummary {
    pub note: String,
    pub commands: Vec<CommandCoverage>,
    /// Command kinds none of whose properties was ever activated.
    pub unexercised: Vec<String>,
}

impl FeatureCoverageSummary {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.commands {
            writeln!(
                out,
                "{:<8} {:>3} properties, {:>8} activations, {:>3} not activated",
                c.command,
                c.properties,
                c.activations,
                c.not_activated.len()
            )
            .unwrap();
        }
        out.push('\n');
        if self.unexercised.is_empty() {
            out.push_str("unexercised commands: none\n");
        } else {
            writeln!(out, "unexercised commands: {}", self.unexercised.join(", ")).unwrap();
        }
        writeln!(out, "\nnote: {}", self.note).unwrap();
        out
    }
}

/// Group not-activated properties by the command kinds they mention.
pub fn coverage(report: &VerdictReport) -> FeatureCoverageSummary {
    let mut commands = Vec::new();
    let mut unexercised = Vec::new();
    for cmd in &report.commands {
        let related: Vec<&PropertyVerdict> = report
            .verdicts
            .iter()
            .filter(|v| v.commands.iter().any(|c| c == cmd))
            .collect();
        let activations = related.iter().map(|v| v.activations).sum();
        if activations == 0 {
            unexercised.push(cmd.clone());
        }
        commands.push(CommandCoverage {
            command: cmd.clone(),
            properties: related.len(),
            activations,
            not_activated: related
                .iter()
                .filter(|v| v.status == Status::NotActivated)
                .map(|v| v.unique_id.clone())
                .collect(),
        });
    }
    FeatureCoverageSummary {
        note: CORPUS_NOTE.to_string(),
        commands,
        unexercised,
    }
}
