use std::collections::VecDeque;

use super::elaborate::ElaboratedNet;
use super::topology::Command;

/// Depth of the per-transition firing history.
pub const HISTORY_DEPTH: usize = 4;

/// A constraint broken by a command.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Violation {
    /// A place-to-transition arc found its place empty.
    MissingToken { decl: usize, place: usize },
    /// An inhibitor arc found its place marked.
    Inhibited { decl: usize, place: usize },
    /// A timing arc's source fired too recently.
    TooEarly {
        decl: usize,
        from: usize,
        last_fire: u64,
        required: u32,
    },
    /// A timed place is full; one more token would exceed its capacity.
    WindowFull { place: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LegalityVerdict {
    pub command: Command,
    /// Empty when the command was legal.
    pub violations: Vec<Violation>,
}

impl LegalityVerdict {
    pub fn is_legal(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StepError {
    #[error("command at cycle {cycle} does not follow the previous command at cycle {previous}")]
    NotMonotone { cycle: u64, previous: u64 },
    #[error("command kind {0} is not part of the net")]
    UnknownKind(usize),
    #[error("coordinates {coords:?} do not address an instance of `{name}`")]
    BadCoordinates { name: String, coords: Vec<u32> },
}

/// Tokens, firing history and current cycle of one evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkingState {
    /// Per place instance: expiry cycle of each token, earliest first.
    /// Untimed tokens never expire and use `u64::MAX`.
    pub tokens: Vec<VecDeque<u64>>,
    /// Per transition instance: most recent fire cycles, newest last.
    pub history: Vec<VecDeque<u64>>,
    /// Cycle of the last command observed.
    pub cycle: Option<u64>,
}

impl MarkingState {
    /// Post-reset state: initial tokens only, no firing history.
    pub fn initial(net: &ElaboratedNet) -> Self {
        let tokens = net
            .places
            .iter()
            .map(|p| std::iter::repeat_n(u64::MAX, p.initial_tokens as usize).collect())
            .collect();
        Self {
            tokens,
            history: vec![VecDeque::with_capacity(HISTORY_DEPTH); net.transitions.len()],
            cycle: None,
        }
    }

    pub fn token_count(&self, place_instance: usize) -> usize {
        self.tokens[place_instance].len()
    }

    pub fn last_fire(&self, transition_instance: usize) -> Option<u64> {
        self.history[transition_instance].back().copied()
    }

    fn expire(&mut self, cycle: u64) {
        for q in &mut self.tokens {
            while q.front().is_some_and(|&e| e <= cycle) {
                q.pop_front();
            }
        }
    }

    /// Constraints `cmd` would break in this state, after dropping tokens
    /// that have expired by `cmd.cycle`. Does not modify the marking.
    pub fn check(&self, net: &ElaboratedNet, cmd: &Command) -> Result<Vec<Violation>, StepError> {
        let t = resolve(net, cmd)?;
        if let Some(prev) = self.cycle {
            if cmd.cycle <= prev {
                return Err(StepError::NotMonotone {
                    cycle: cmd.cycle,
                    previous: prev,
                });
            }
        }
        let now = cmd.cycle;
        let live = |p: usize| self.tokens[p].iter().filter(|&&e| e > now).count() as u32;
        Ok(violations(net, t, now, live, |from| self.last_fire(from)))
    }

    /// Fire `cmd`, returning every constraint it broke. Illegal commands are
    /// reported and still applied.
    pub fn step(&mut self, net: &ElaboratedNet, cmd: &Command) -> Result<LegalityVerdict, StepError> {
        let violations = self.check(net, cmd)?;
        let t = resolve(net, cmd)?;
        self.expire(cmd.cycle);
        self.fire(net, t, cmd.cycle);
        Ok(LegalityVerdict {
            command: cmd.clone(),
            violations,
        })
    }

    fn fire(&mut self, net: &ElaboratedNet, t: usize, now: u64) {
        for e in &net.by_transition[t].effects {
            let inst = &net.places[e.place];
            let q = &mut self.tokens[e.place];
            let added = if e.reset {
                q.clear();
                e.produce
            } else if e.consume > e.produce {
                for _ in 0..(e.consume - e.produce) {
                    q.pop_front();
                }
                0
            } else {
                e.produce - e.consume
            };
            let expiry = inst.lifetime.map_or(u64::MAX, |l| now + u64::from(l));
            for _ in 0..added {
                q.push_back(expiry);
            }
            // Over capacity: the oldest tokens make room.
            while q.len() > inst.capacity as usize {
                q.pop_front();
            }
        }
        let h = &mut self.history[t];
        if h.len() == HISTORY_DEPTH {
            h.pop_front();
        }
        h.push_back(now);
        self.cycle = Some(now);
    }
}

fn resolve(net: &ElaboratedNet, cmd: &Command) -> Result<usize, StepError> {
    let decl = net
        .topology
        .transitions
        .get(cmd.kind)
        .ok_or(StepError::UnknownKind(cmd.kind))?;
    let counts = net.topology.counts(decl.node);
    if counts.len() != cmd.coords.len() || cmd.coords.iter().zip(&counts).any(|(c, n)| c >= n) {
        return Err(StepError::BadCoordinates {
            name: decl.name.clone(),
            coords: cmd.coords.clone(),
        });
    }
    Ok(net.transition_instance(cmd.kind, &cmd.coords))
}

/// Legality of firing transition instance `t` at cycle `now`, given live
/// token counts and last fire times. Shared by stepping and exploration.
pub(crate) fn violations(
    net: &ElaboratedNet,
    t: usize,
    now: u64,
    live: impl Fn(usize) -> u32,
    last_fire: impl Fn(usize) -> Option<u64>,
) -> Vec<Violation> {
    let arcs = &net.by_transition[t];
    let mut out = Vec::new();
    for &(place, decl) in &arcs.inputs {
        if live(place) == 0 {
            out.push(Violation::MissingToken { decl, place });
        }
    }
    for &(place, decl) in &arcs.inhibitors {
        if live(place) > 0 {
            out.push(Violation::Inhibited { decl, place });
        }
    }
    for &(from, required, decl) in &arcs.timing_in {
        if let Some(last) = last_fire(from) {
            if now - last < u64::from(required) {
                out.push(Violation::TooEarly {
                    decl,
                    from,
                    last_fire: last,
                    required,
                });
            }
        }
    }
    for &(place, _) in &arcs.outputs {
        let inst = &net.places[place];
        if inst.lifetime.is_some() && live(place) >= inst.capacity {
            out.push(Violation::WindowFull { place });
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Fold [`MarkingState::step`] over a cycle-sorted command sequence from the
/// initial marking.
pub fn run(net: &ElaboratedNet, commands: &[Command]) -> Result<Vec<LegalityVerdict>, StepError> {
    let mut state = MarkingState::initial(net);
    commands.iter().map(|c| state.step(net, c)).collect()
}
