use std::collections::BTreeMap;
use std::fmt::{self, Write};

use serde::Serialize;

use crate::props::{PropertyKind, PropertySet};
use crate::trace::{check_corpus, CheckError, CommandTrace, Status, VerdictReport};

/// Printed at the top of every sweep report.
pub const LOWER_BOUND_NOTE: &str = "Gaps are observed on the given traces only and bound the \
controller from below. Zero slack shows that a minimum distance was used at least once, not that \
the controller uses it whenever it could.";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SweepError {
    #[error("the sweep needs at least one trace")]
    EmptyCorpus,
    #[error("the largest increment must be at least 1")]
    ZeroIncrement,
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// Share of cycles a command stream keeps the bus busy, as a reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Utilization {
    pub busy: u64,
    pub period: u64,
}

impl Utilization {
    fn new(busy: u64, period: u64) -> Self {
        let g = gcd(busy, period).max(1);
        Self {
            busy: busy / g,
            period: period / g,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.busy as f64 / self.period as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for Utilization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.busy, self.period)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimingSlack {
    pub unique_id: String,
    pub commands: Vec<String>,
    pub scope: String,
    pub timing_param: Option<String>,
    pub timing_value: u32,
    pub activations: u64,
    pub min_gap: u64,
    pub slack: i64,
    /// Largest increment under which the property still holds, capped at
    /// `k_max`. `None` when it is already violated at the base value.
    pub k: Option<u32>,
    pub candidate: bool,
    /// For candidates: the timing value over the tightest observed gap.
    pub utilization: Option<Utilization>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SlackSweepResult {
    pub model: String,
    pub config: BTreeMap<String, u32>,
    pub traces: Vec<String>,
    pub k_max: u32,
    pub note: String,
    /// Activated TIMING properties, ordered by id.
    pub entries: Vec<TimingSlack>,
    /// TIMING properties never activated by the corpus.
    pub excluded: Vec<String>,
}

impl SlackSweepResult {
    pub fn candidates(&self) -> impl Iterator<Item = &TimingSlack> {
        self.entries.iter().filter(|e| e.candidate)
    }

    pub fn get(&self, unique_id: &str) -> Option<&TimingSlack> {
        self.entries.iter().find(|e| e.unique_id == unique_id)
    }

    /// Number of properties that still hold with every timing raised by `k`.
    pub fn survivors_at(&self, k: u32) -> usize {
        self.entries.iter().filter(|e| e.k.is_some_and(|s| s >= k)).count()
    }

    /// Smallest increment up to `k_max` at which no property holds.
    pub fn all_violated_at(&self) -> Option<u32> {
        (1..=self.k_max).find(|&k| self.survivors_at(k) == 0)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "note: {}", self.note).unwrap();
        writeln!(out, "model: {}", self.model).unwrap();
        writeln!(out, "traces: {}", self.traces.join(", ")).unwrap();
        writeln!(out, "k_max: {}\n", self.k_max).unwrap();
        let width = self.entries.iter().map(|e| e.unique_id.len()).max().unwrap_or(8).max(8);
        writeln!(
            out,
            "{:<width$}  {:>5}  {:>7}  {:>5}  {:>4}  utilization",
            "property", "value", "min_gap", "slack", "k"
        )
        .unwrap();
        for e in &self.entries {
            writeln!(
                out,
                "{:<width$}  {:>5}  {:>7}  {:>5}  {:>4}  {}{}",
                e.unique_id,
                e.timing_value,
                e.min_gap,
                e.slack,
                e.k.map_or("-".to_string(), |k| k.to_string()),
                e.utilization.map_or(String::new(), |u| u.to_string()),
                if e.candidate { "  candidate" } else { "" },
            )
            .unwrap();
        }
        out.push('\n');
        writeln!(out, "holding at k=1: {}", self.survivors_at(1)).unwrap();
        match self.all_violated_at() {
            Some(k) => writeln!(out, "all violated at k={k}").unwrap(),
            None => writeln!(out, "some properties still hold at k={}", self.k_max).unwrap(),
        }
        if !self.excluded.is_empty() {
            writeln!(out, "{} TIMING properties not activated, excluded", self.excluded.len()).unwrap();
        }
        out
    }
}

fn validate(traces: &[CommandTrace], k_max: u32) -> Result<(), SweepError> {
    if traces.is_empty() {
        return Err(SweepError::EmptyCorpus);
    }
    if k_max == 0 {
        return Err(SweepError::ZeroIncrement);
    }
    Ok(())
}

/// Build the sweep from an existing check report. The increment a property
/// survives is its slack, so one pass over the corpus is enough.
pub fn sweep_report(props: &PropertySet, report: &VerdictReport, k_max: u32) -> SlackSweepResult {
    let mut entries = Vec::new();
    let mut excluded = Vec::new();
    for (p, v) in props.properties.iter().zip(&report.verdicts) {
        if p.kind != PropertyKind::Timing {
            continue;
        }
        let (Some(min_gap), Some(slack), Some(t)) = (v.min_gap, v.slack, p.timing_value) else {
            excluded.push(p.unique_id.clone());
            continue;
        };
        let k = (slack >= 0).then(|| slack.min(i64::from(k_max)) as u32);
        let candidate = k.is_some_and(|k| k >= 1);
        entries.push(TimingSlack {
            unique_id: p.unique_id.clone(),
            commands: p.commands.clone(),
            scope: v.scope.clone(),
            timing_param: p.timing_param.clone(),
            timing_value: t,
            activations: v.activations,
            min_gap,
            slack,
            k,
            candidate,
            utilization: candidate.then(|| Utilization::new(u64::from(t), min_gap)),
        });
    }
    SlackSweepResult {
        model: report.model.clone(),
        config: report.config.clone(),
        traces: report.traces.clone(),
        k_max,
        note: LOWER_BOUND_NOTE.to_string(),
        entries,
        excluded,
    }
}

pub fn slack_sweep(
    props: &PropertySet,
    traces: &[CommandTrace],
    k_max: u32,
) -> Result<SlackSweepResult, SweepError> {
    validate(traces, k_max)?;
    Ok(sweep_report(props, &check_corpus(props, traces)?, k_max))
}

/// The sweep by brute force: re-check the corpus with every timing raised by
/// 1, 2, ... until nothing holds or `k_max` is reached.
pub fn slack_sweep_rerun(
    props: &PropertySet,
    traces: &[CommandTrace],
    k_max: u32,
) -> Result<SlackSweepResult, SweepError> {
    validate(traces, k_max)?;
    let base = check_corpus(props, traces)?;
    let mut result = sweep_report(props, &base, k_max);
    let index: BTreeMap<&str, usize> = props
        .properties
        .iter()
        .enumerate()
        .map(|(i, p)| (p.unique_id.as_str(), i))
        .collect();
    let mut alive: Vec<usize> = Vec::new();
    for (e, entry) in result.entries.iter_mut().enumerate() {
        let holds = base.verdicts[index[entry.unique_id.as_str()]].status == Status::Holds;
        entry.k = holds.then_some(0);
        if holds {
            alive.push(e);
        }
    }
    for k in 1..=k_max {
        if alive.is_empty() {
            break;
        }
        let report = check_corpus(&props.with_timing_increment(k), traces)?;
        alive.retain(|&e| {
            let entry = &mut result.entries[e];
            let ok = report.verdicts[index[entry.unique_id.as_str()]].status == Status::Holds;
            if ok {
                entry.k = Some(k);
            }
            ok
        });
    }
    for entry in &mut result.entries {
        entry.candidate = entry.k.is_some_and(|k| k >= 1);
        entry.utilization = entry
            .candidate
            .then(|| Utilization::new(u64::from(entry.timing_value), entry.min_gap));
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library::bundle;
    use crate::petri::elaborate;
    use crate::props::derive;
    use crate::trace::load_trace;

    fn ddr4(overrides: &[(&str, u32)]) -> PropertySet {
        let b = bundle("ddr4").unwrap();
        let mut cfg = b.config("16bank").unwrap();
        for &(k, v) in overrides {
            cfg.set(k, v);
        }
        derive(&elaborate(&b.spec(), &cfg).unwrap())
    }

    fn reads(set: &PropertySet, spacing: u64) -> CommandTrace {
        let mut text = String::from("0 ACT 0 0 0\n");
        for i in 0..6 {
            writeln!(text, "{} RD 0 0 0", 40 + i * spacing).unwrap();
        }
        load_trace(&text, &set.topology).unwrap()
    }

    #[test]
    fn one_cycle_late_reads() {
        let set = ddr4(&[]);
        let r = slack_sweep(&set, &[reads(&set, 9)], 10).unwrap();
        let e = r.get("timing_RD_RD_same_bankgroup").unwrap();
        assert_eq!((e.k, e.candidate), (Some(1), true));
        assert_eq!(e.utilization.unwrap().to_string(), "8/9");
        assert!(r.to_text().starts_with("note: Gaps are observed"));
    }

    #[test]
    fn tight_reads_are_no_candidate() {
        let set = ddr4(&[]);
        let r = slack_sweep(&set, &[reads(&set, 8)], 10).unwrap();
        assert!(!r.get("timing_RD_RD_same_bankgroup").unwrap().candidate);
        assert!(r.excluded.contains(&"timing_WR_WR_same_bankgroup".to_string()));
    }

    #[test]
    fn violated_at_base_has_no_increment() {
        let set = ddr4(&[]);
        let r = slack_sweep(&set, &[reads(&set, 5)], 10).unwrap();
        assert_eq!(r.get("timing_RD_RD_same_bankgroup").unwrap().k, None);
    }

    #[test]
    fn capped_and_errors() {
        let set = ddr4(&[]);
        let r = slack_sweep(&set, &[reads(&set, 30)], 4).unwrap();
        assert_eq!(r.get("timing_RD_RD_same_bankgroup").unwrap().k, Some(4));
        assert_eq!(r.all_violated_at(), None);
        assert_eq!(slack_sweep(&set, &[], 4).unwrap_err(), SweepError::EmptyCorpus);
        assert_eq!(slack_sweep(&set, &[reads(&set, 9)], 0).unwrap_err(), SweepError::ZeroIncrement);
    }

    #[test]
    fn rerun_agrees() {
        let set = ddr4(&[]);
        for spacing in [5, 8, 9, 12, 30] {
            let t = [reads(&set, spacing)];
            assert_eq!(slack_sweep(&set, &t, 6).unwrap(), slack_sweep_rerun(&set, &t, 6).unwrap());
        }
    }
}
