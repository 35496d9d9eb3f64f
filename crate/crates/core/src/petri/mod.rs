//! Timed Petri net core: elaboration of a [`NetSpec`](crate::frontend::NetSpec)
//! into per-instance places and transitions, cycle-by-cycle firing, and
//! bounded reachability.
//!
//! Firing rules for a transition instance at cycle `c`:
//!
//! * every place-to-transition input place must hold a live token;
//! * no inhibitor place may hold a live token;
//! * every timing arc source must have last fired at least its value before `c`;
//! * a timed output place must not already be at capacity.
//!
//! When it fires, consumed and produced tokens are netted per place (a
//! self-loop leaves the place untouched), reset arcs clear their place before
//! production, and tokens in timed places expire `lifetime` cycles after they
//! were produced. Violations are reported and the command is applied anyway.

mod config;
mod elaborate;
mod explore;
mod state;
mod topology;

pub use config::{parse_kv, Config, ConfigError};
pub use elaborate::{
    elaborate, ElaboratedNet, ExpandedArc, PlaceEffect, PlaceInstance, TransitionArcs,
    TransitionInstance,
};
pub use explore::{explore, ReachabilitySummary, TransitionReach};
pub use state::{run, LegalityVerdict, MarkingState, StepError, Violation, HISTORY_DEPTH};
pub use topology::{Command, CommandError, Element, HierNode, Relation, Topology};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ElaborateError {
    #[error("no instance count bound for hierarchy parameter `{0}`")]
    UnboundCount(String),
    #[error("instance count `{0}` must be at least 1")]
    ZeroCount(String),
    #[error("no value bound for timing parameter `{0}`")]
    UnboundTiming(String),
    #[error("timing parameter `{0}` must be at least 1 cycle")]
    ZeroTiming(String),
}

#[cfg(test)]
mod tests;
