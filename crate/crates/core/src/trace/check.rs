//! Single-pass property evaluation.
//!
//! The evaluator keeps its own place counters, last-fire tables and fill
//! histories; it shares nothing with the net simulator beyond instance
//! addressing. Each command is first checked against the state before it
//! and then applied, the same order a clocked assertion samples in.

use std::collections::VecDeque;

use crate::petri::{Command, Relation, Topology};
use crate::props::{PlaceLogic, Property, PropertyKind, PropertySet};

use super::report::{PropertyVerdict, Status, VerdictReport, Witness};
use super::CommandTrace;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error("trace `{trace}` was recorded with {key}={found}, the properties use {key}={expected}")]
    ConfigMismatch {
        trace: String,
        key: String,
        found: String,
        expected: String,
    },
}

/// Instance counts along one hierarchy path.
#[derive(Debug, Clone)]
struct Radix(Vec<u32>);

fn mixed(counts: &[u32], coords: &[u32]) -> usize {
    counts
        .iter()
        .zip(coords)
        .fold(0usize, |acc, (&n, &c)| acc * n as usize + c as usize)
}

impl Radix {
    fn index(&self, coords: &[u32]) -> usize {
        mixed(&self.0, coords)
    }

    fn len(&self) -> usize {
        self.0.iter().map(|&c| c as usize).product()
    }

    /// Calls `f` for every instance related to a command at `coords`.
    fn related(&self, rel: Relation, coords: &[u32], mut f: impl FnMut(usize)) {
        match rel {
            Relation::Prefix(n) => {
                let inner: usize = self.0[n..].iter().map(|&c| c as usize).product();
                let outer = mixed(&self.0[..n], coords);
                (outer * inner..(outer + 1) * inner).for_each(f);
            }
            Relation::Sibling(n) => {
                let inner: usize = self.0[n..].iter().map(|&c| c as usize).product();
                let head = mixed(&self.0[..n - 1], coords);
                for v in 0..self.0[n - 1] {
                    if v != coords[n - 1] {
                        let outer = head * self.0[n - 1] as usize + v as usize;
                        (outer * inner..(outer + 1) * inner).for_each(&mut f);
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Hook {
    /// ARC or INHIBITOR on the guarded command.
    Guard {
        prop: usize,
        place: usize,
        relation: Relation,
        inhibit: bool,
    },
    /// TIMING, later command.
    TimingCheck { prop: usize },
    /// TIMING, earlier command.
    TimingRecord { prop: usize },
    /// WINDOW, one filling command.
    Fill { prop: usize, relation: Relation },
}

#[derive(Debug, Clone, Default)]
struct Tally {
    activations: u64,
    violations: u64,
    witness: Option<Witness>,
    min_gap: Option<u64>,
}

/// Property evaluator compiled once per property set and reusable across
/// traces.
#[derive(Debug, Clone)]
pub struct Checker<'a> {
    set: &'a PropertySet,
    place_radix: Vec<Radix>,
    anchor_radix: Vec<Radix>,
    hooks: Vec<Vec<Hook>>,
    updates: Vec<Vec<(usize, usize)>>,
}

/// Per-trace mutable state.
struct Run {
    counts: Vec<Vec<u32>>,
    last: Vec<Vec<Option<u64>>>,
    fills: Vec<Vec<VecDeque<u64>>>,
    tallies: Vec<Tally>,
}

fn radix(topo: &Topology, node: Option<usize>) -> Radix {
    Radix(topo.counts(node))
}

impl<'a> Checker<'a> {
    pub fn new(set: &'a PropertySet) -> Self {
        let topo = &set.topology;
        let n = topo.transitions.len();
        let mut hooks = vec![Vec::new(); n];
        for (i, p) in set.properties.iter().enumerate() {
            match p.kind {
                PropertyKind::Arc | PropertyKind::Inhibitor => hooks[p.kinds[0]].push(Hook::Guard {
                    prop: i,
                    place: p.place_index.unwrap(),
                    relation: p.relation,
                    inhibit: p.kind == PropertyKind::Inhibitor,
                }),
                PropertyKind::Timing => {
                    hooks[p.kinds[1]].push(Hook::TimingCheck { prop: i });
                    hooks[p.kinds[0]].push(Hook::TimingRecord { prop: i });
                }
                PropertyKind::Window => {
                    for (&k, &relation) in p.kinds.iter().zip(&p.fill_relations) {
                        hooks[k].push(Hook::Fill { prop: i, relation });
                    }
                }
            }
        }
        let mut updates = vec![Vec::new(); n];
        for (pi, place) in set.places.iter().enumerate() {
            if place.lifetime.is_some() {
                continue;
            }
            for (ui, u) in place.updates.iter().enumerate() {
                updates[u.transition].push((pi, ui));
            }
        }
        Checker {
            set,
            place_radix: set.places.iter().map(|p| radix(topo, p.node)).collect(),
            anchor_radix: set.properties.iter().map(|p| radix(topo, p.anchor)).collect(),
            hooks,
            updates,
        }
    }

    fn fresh(&self) -> Run {
        Run {
            counts: self
                .set
                .places
                .iter()
                .zip(&self.place_radix)
                .map(|(p, r)| vec![p.initial_tokens.min(p.capacity); r.len()])
                .collect(),
            last: self
                .set
                .properties
                .iter()
                .zip(&self.anchor_radix)
                .map(|(p, r)| {
                    if p.kind == PropertyKind::Timing {
                        vec![None; r.len()]
                    } else {
                        Vec::new()
                    }
                })
                .collect(),
            fills: self
                .set
                .properties
                .iter()
                .map(|p| match p.place_index {
                    Some(pi) if p.kind == PropertyKind::Window => {
                        vec![VecDeque::new(); self.place_radix[pi].len()]
                    }
                    _ => Vec::new(),
                })
                .collect(),
            tallies: vec![Tally::default(); self.set.properties.len()],
        }
    }

    fn instance_name(&self, place: &PlaceLogic, index: usize) -> String {
        let coords = self.set.topology.coords(place.node, index);
        let text: Vec<String> = coords.iter().map(u32::to_string).collect();
        format!("{}[{}]", place.name, text.join(","))
    }

    /// Checks one command against the current state, returning the
    /// properties it violates, then applies it.
    fn step(&self, run: &mut Run, trace: &CommandTrace, line: usize, cmd: &Command) -> Vec<usize> {
        let props = &self.set.properties;
        let now = cmd.cycle;
        let mut violated = Vec::new();
        let mut flag = |run: &mut Run, prop: usize, what: &dyn Fn() -> String| {
            let t = &mut run.tallies[prop];
            t.violations += 1;
            if t.witness.is_none() {
                t.witness = Some(Witness {
                    trace: trace.name.clone(),
                    line,
                    cycle: now,
                    command: self.set.topology.display_command(cmd).to_string(),
                    constraint: what(),
                });
            }
            if violated.last() != Some(&prop) {
                violated.push(prop);
            }
        };

        for hook in &self.hooks[cmd.kind] {
            match *hook {
                Hook::Guard {
                    prop,
                    place,
                    relation,
                    inhibit,
                } => {
                    let mut bad = None;
                    let mut seen = 0;
                    self.place_radix[place].related(relation, &cmd.coords, |i| {
                        seen += 1;
                        let marked = run.counts[place][i] > 0;
                        if marked == inhibit && bad.is_none() {
                            bad = Some(i);
                        }
                    });
                    run.tallies[prop].activations += seen;
                    if let Some(i) = bad {
                        let logic = &self.set.places[place];
                        let what = || {
                            let state = if inhibit { "holds a token" } else { "holds no token" };
                            format!("{} {state}", self.instance_name(logic, i))
                        };
                        flag(run, prop, &what);
                    }
                }
                Hook::TimingCheck { prop } => {
                    let p = &props[prop];
                    let r = &self.anchor_radix[prop];
                    let mut latest: Option<u64> = None;
                    let mut take = |i: usize| latest = latest.max(run.last[prop][i]);
                    // The anchor sits at the relation's depth, so a prefix
                    // relation names exactly one anchor instance.
                    r.related(p.relation, &cmd.coords, &mut take);
                    if let Some(last) = latest {
                        let gap = now - last;
                        let t = &mut run.tallies[prop];
                        t.activations += 1;
                        t.min_gap = Some(t.min_gap.map_or(gap, |g| g.min(gap)));
                        let required = u64::from(p.timing_value.unwrap());
                        if gap < required {
                            let what = || {
                                format!(
                                    "{} at cycle {last} only {gap} cycle(s) earlier, {} = {required}",
                                    p.commands[0],
                                    p.timing_param.as_deref().unwrap_or("timing")
                                )
                            };
                            flag(run, prop, &what);
                        }
                    }
                }
                Hook::Fill { prop, relation } => {
                    let p = &props[prop];
                    let w = p.window.unwrap();
                    let place = p.place_index.unwrap();
                    let mut full = None;
                    let mut seen = 0;
                    let fills = &mut run.fills[prop];
                    self.place_radix[place].related(relation, &cmd.coords, |i| {
                        seen += 1;
                        let q = &mut fills[i];
                        while q.front().is_some_and(|&s| now - s >= u64::from(w.cycles)) {
                            q.pop_front();
                        }
                        if q.len() >= w.max_count as usize && full.is_none() {
                            full = Some(i);
                        }
                    });
                    run.tallies[prop].activations += seen;
                    if let Some(i) = full {
                        let logic = &self.set.places[place];
                        let what = || {
                            format!(
                                "{} already filled {} time(s) within {} cycles",
                                self.instance_name(logic, i),
                                w.max_count,
                                w.cycles
                            )
                        };
                        flag(run, prop, &what);
                    }
                }
                Hook::TimingRecord { .. } => {}
            }
        }

        for hook in &self.hooks[cmd.kind] {
            match *hook {
                Hook::TimingRecord { prop } => {
                    let i = self.anchor_radix[prop].index(&cmd.coords);
                    run.last[prop][i] = Some(now);
                }
                Hook::Fill { prop, relation } => {
                    let place = props[prop].place_index.unwrap();
                    let fills = &mut run.fills[prop];
                    self.place_radix[place].related(relation, &cmd.coords, |i| fills[i].push_back(now));
                }
                _ => {}
            }
        }
        for &(pi, ui) in &self.updates[cmd.kind] {
            let place = &self.set.places[pi];
            let u = &place.updates[ui];
            let counts = &mut run.counts[pi];
            self.place_radix[pi].related(u.relation, &cmd.coords, |i| {
                let n = &mut counts[i];
                *n = if u.reset {
                    u.produce.min(place.capacity)
                } else if u.produce > u.consume {
                    (*n + (u.produce - u.consume)).min(place.capacity)
                } else {
                    n.saturating_sub(u.consume - u.produce)
                };
            });
        }
        violated.sort_unstable();
        violated
    }

    fn verify_header(&self, trace: &CommandTrace) -> Result<(), CheckError> {
        for (key, found) in &trace.header {
            let expected = if key == "standard" {
                Some(self.set.model.clone())
            } else {
                self.set.config.get(key).map(|v| v.to_string())
            };
            if let Some(expected) = expected {
                if *found != expected {
                    return Err(CheckError::ConfigMismatch {
                        trace: trace.name.clone(),
                        key: key.clone(),
                        found: found.clone(),
                        expected,
                    });
                }
            }
        }
        Ok(())
    }

    /// Evaluate every property over `trace`. The second result lists, per
    /// record, the indices of the properties that record violates.
    pub fn run(&self, trace: &CommandTrace) -> Result<(VerdictReport, Vec<Vec<usize>>), CheckError> {
        self.verify_header(trace)?;
        let mut run = self.fresh();
        let events = trace
            .records
            .iter()
            .map(|r| self.step(&mut run, trace, r.line, &r.command))
            .collect();
        Ok((self.report(vec![trace.name.clone()], run.tallies), events))
    }

    fn report(&self, traces: Vec<String>, tallies: Vec<Tally>) -> VerdictReport {
        let verdicts = self
            .set
            .properties
            .iter()
            .zip(tallies)
            .map(|(p, t)| verdict(p, t))
            .collect();
        VerdictReport {
            model: self.set.model.clone(),
            config: self.set.config.params.clone(),
            commands: self
                .set
                .topology
                .transitions
                .iter()
                .map(|t| t.name.clone())
                .collect(),
            traces,
            verdicts,
        }
    }
}

fn verdict(p: &Property, t: Tally) -> PropertyVerdict {
    let status = if t.violations > 0 {
        Status::Violated
    } else if t.activations == 0 {
        Status::NotActivated
    } else {
        Status::Holds
    };
    PropertyVerdict {
        unique_id: p.unique_id.clone(),
        kind: p.kind,
        commands: p.commands.clone(),
        scope: if p.scope.is_default() {
            String::new()
        } else {
            p.scope.to_string()
        },
        status,
        activations: t.activations,
        violations: t.violations,
        witness: t.witness,
        timing_value: p.timing_value,
        min_gap: t.min_gap,
        slack: t
            .min_gap
            .zip(p.timing_value)
            .map(|(g, v)| g as i64 - i64::from(v)),
    }
}

pub fn check(props: &PropertySet, trace: &CommandTrace) -> Result<VerdictReport, CheckError> {
    Checker::new(props).run(trace).map(|(r, _)| r)
}

/// Like [`check`], also returning the violated property indices per record.
pub fn check_with_events(
    props: &PropertySet,
    trace: &CommandTrace,
) -> Result<(VerdictReport, Vec<Vec<usize>>), CheckError> {
    Checker::new(props).run(trace)
}

/// Check each trace from a fresh state and merge the results in order.
pub fn check_corpus(props: &PropertySet, traces: &[CommandTrace]) -> Result<VerdictReport, CheckError> {
    let checker = Checker::new(props);
    let mut merged: Option<VerdictReport> = None;
    for t in traces {
        let (r, _) = checker.run(t)?;
        merged = Some(match merged {
            None => r,
            Some(m) => m.merge(&r),
        });
    }
    Ok(merged.unwrap_or_else(|| checker.report(Vec::new(), vec![Tally::default(); props.properties.len()])))
}
