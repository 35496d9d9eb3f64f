//! Bounded breadth-first reachability over the net itself.
//!
//! States abstract absolute time away: each transition instance keeps the
//! cycles elapsed since it last fired, clamped at the largest timing value on
//! its outgoing arcs, and timed tokens keep their remaining lifetime. All
//! timing constraints are lower bounds, so a clamped counter behaves exactly
//! like "never fired" and the abstraction is exact for legality.
//!
//! Time advances by one cycle after each fire and otherwise jumps straight to
//! the next cycle at which some counter crosses a timing value or a token
//! expires. Nothing becomes enabled in between.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::elaborate::ElaboratedNet;
use super::state::violations;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionReach {
    pub name: String,
    pub reachable: bool,
    /// Cycle of the first firing found; not necessarily the earliest possible.
    pub first_cycle: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReachabilitySummary {
    pub horizon: u64,
    pub states_explored: usize,
    /// False when the state bound cut the search short.
    pub complete: bool,
    pub transitions: Vec<TransitionReach>,
}

impl ReachabilitySummary {
    pub fn unreachable(&self) -> Vec<&str> {
        self.transitions
            .iter()
            .filter(|t| !t.reachable)
            .map(|t| t.name.as_str())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct AbstractState {
    /// Remaining lifetime per token; `u32::MAX` for untimed tokens.
    tokens: Vec<Vec<u32>>,
    elapsed: Vec<u32>,
}

struct Explorer<'a> {
    net: &'a ElaboratedNet,
    clamp: Vec<u32>,
    thresholds: Vec<Vec<u32>>,
}

// Arbitrary origin so that `now - elapsed` never underflows.
const NOW: u64 = 1 << 40;

impl Explorer<'_> {
    fn advance(&self, s: &mut AbstractState, delta: u32) {
        for (e, &c) in s.elapsed.iter_mut().zip(&self.clamp) {
            *e = e.saturating_add(delta).min(c);
        }
        for q in &mut s.tokens {
            q.retain_mut(|r| {
                if *r == u32::MAX {
                    return true;
                }
                *r = r.saturating_sub(delta);
                *r > 0
            });
        }
    }

    fn enabled(&self, s: &AbstractState, t: usize) -> bool {
        violations(
            self.net,
            t,
            NOW,
            |p| s.tokens[p].len() as u32,
            |f| (s.elapsed[f] < self.clamp[f]).then(|| NOW - u64::from(s.elapsed[f])),
        )
        .is_empty()
    }

    fn fire(&self, s: &AbstractState, t: usize) -> AbstractState {
        let mut next = s.clone();
        for e in &self.net.by_transition[t].effects {
            let inst = &self.net.places[e.place];
            let q = &mut next.tokens[e.place];
            let added = if e.reset {
                q.clear();
                e.produce
            } else if e.consume > e.produce {
                for _ in 0..(e.consume - e.produce).min(q.len() as u32) {
                    q.remove(0);
                }
                0
            } else {
                e.produce - e.consume
            };
            for _ in 0..added {
                q.push(inst.lifetime.unwrap_or(u32::MAX));
            }
            q.sort_unstable();
            while q.len() > inst.capacity as usize {
                q.remove(0);
            }
        }
        next.elapsed[t] = 0;
        self.advance(&mut next, 1);
        next
    }

    fn waits(&self, s: &AbstractState) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::new();
        for (f, &e) in s.elapsed.iter().enumerate() {
            if e < self.clamp[f] {
                out.extend(self.thresholds[f].iter().filter(|&&v| v > e).map(|&v| v - e));
            }
        }
        for q in &s.tokens {
            out.extend(q.iter().copied().filter(|&r| r != u32::MAX));
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Explore every legal firing sequence up to `horizon` cycles, visiting at
/// most `state_bound` distinct abstract states.
pub fn explore(net: &ElaboratedNet, horizon: u64, state_bound: usize) -> ReachabilitySummary {
    let n = net.transitions.len();
    let mut thresholds = vec![Vec::new(); n];
    for arcs in &net.by_transition {
        for &(from, cycles, _) in &arcs.timing_in {
            thresholds[from].push(cycles);
        }
    }
    for t in &mut thresholds {
        t.sort_unstable();
        t.dedup();
    }
    let clamp = thresholds.iter().map(|t| t.last().copied().unwrap_or(0)).collect();
    let ex = Explorer {
        net,
        clamp,
        thresholds,
    };

    let init = AbstractState {
        tokens: net
            .places
            .iter()
            .map(|p| vec![u32::MAX; p.initial_tokens as usize])
            .collect(),
        elapsed: ex.clamp.clone(),
    };

    let decls = net.spec.transitions.len();
    let mut first: Vec<Option<u64>> = vec![None; decls];
    let mut found = 0;
    let mut visited: HashMap<AbstractState, u64> = HashMap::new();
    let mut queue = VecDeque::new();
    visited.insert(init.clone(), 0);
    queue.push_back((init, 0u64));
    let mut complete = true;

    'search: while let Some((state, cycle)) = queue.pop_front() {
        if visited.get(&state).is_some_and(|&c| c < cycle) {
            continue;
        }
        let mut successors = Vec::new();
        for t in 0..n {
            if ex.enabled(&state, t) {
                let decl = net.transitions[t].transition;
                if first[decl].is_none() {
                    first[decl] = Some(cycle);
                    found += 1;
                    if found == decls {
                        break 'search;
                    }
                }
                if cycle < horizon {
                    successors.push((ex.fire(&state, t), cycle + 1));
                }
            }
        }
        for delta in ex.waits(&state) {
            if cycle + u64::from(delta) <= horizon {
                let mut next = state.clone();
                ex.advance(&mut next, delta);
                successors.push((next, cycle + u64::from(delta)));
            }
        }
        for (next, c) in successors {
            let better = visited.get(&next).is_none_or(|&old| c < old);
            if better {
                if visited.len() >= state_bound {
                    complete = false;
                    break 'search;
                }
                visited.insert(next.clone(), c);
                queue.push_back((next, c));
            }
        }
    }

    ReachabilitySummary {
        horizon,
        states_explored: visited.len(),
        complete,
        transitions: net
            .spec
            .transitions
            .iter()
            .zip(first)
            .map(|(t, f)| TransitionReach {
                name: t.name.clone(),
                reachable: f.is_some(),
                first_cycle: f,
            })
            .collect(),
    }
}
