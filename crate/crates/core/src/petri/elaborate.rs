use crate::frontend::{arc_text, ArcKind, NetSpec};

use super::topology::{Relation, Topology};
use super::state::Violation;
use super::{Config, ElaborateError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceInstance {
    /// Index into `NetSpec::places`.
    pub place: usize,
    pub coords: Vec<u32>,
    pub capacity: u32,
    /// Token lifetime in cycles for timed places.
    pub lifetime: Option<u32>,
    pub initial_tokens: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionInstance {
    /// Index into `NetSpec::transitions`.
    pub transition: usize,
    pub coords: Vec<u32>,
}

/// An arc between two concrete instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExpandedArc {
    Place {
        kind: ArcKind,
        place: usize,
        transition: usize,
        /// Index into `NetSpec::arcs`.
        decl: usize,
    },
    Timing {
        from: usize,
        to: usize,
        cycles: u32,
        decl: usize,
    },
}

/// Net change applied to one place instance when a transition instance fires.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlaceEffect {
    pub place: usize,
    pub consume: u32,
    pub produce: u32,
    pub reset: bool,
}

/// Everything that constrains or is changed by one transition instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransitionArcs {
    /// `(place instance, arc decl)` pairs.
    pub inputs: Vec<(usize, usize)>,
    pub inhibitors: Vec<(usize, usize)>,
    pub outputs: Vec<(usize, usize)>,
    /// `(source transition instance, cycles, arc decl)`.
    pub timing_in: Vec<(usize, u32, usize)>,
    pub effects: Vec<PlaceEffect>,
}

/// A net flattened for one configuration. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElaboratedNet {
    pub spec: NetSpec,
    pub config: Config,
    pub topology: Topology,
    pub places: Vec<PlaceInstance>,
    pub transitions: Vec<TransitionInstance>,
    /// First instance index of each place / transition declaration.
    pub place_base: Vec<usize>,
    pub transition_base: Vec<usize>,
    pub arcs: Vec<ExpandedArc>,
    pub relations: Vec<Relation>,
    pub by_transition: Vec<TransitionArcs>,
    /// Resolved value of every timing parameter, by declaration order.
    pub timing_values: Vec<(String, u32)>,
}

impl ElaboratedNet {
    pub fn place_instance(&self, place: usize, coords: &[u32]) -> usize {
        self.place_base[place] + self.topology.index(self.topology.places[place].node, coords)
    }

    pub fn transition_instance(&self, transition: usize, coords: &[u32]) -> usize {
        self.transition_base[transition]
            + self
                .topology
                .index(self.topology.transitions[transition].node, coords)
    }

    pub fn timing_value(&self, name: &str) -> Option<u32> {
        self.timing_values
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
    }

    fn place_name(&self, place: usize) -> String {
        let p = &self.places[place];
        let coords: Vec<String> = p.coords.iter().map(u32::to_string).collect();
        format!("{}[{}]", self.spec.places[p.place].name, coords.join(","))
    }

    /// One-line description of a violation.
    pub fn describe(&self, v: &Violation) -> String {
        match *v {
            Violation::MissingToken { decl, place } => {
                format!("{} is empty ({})", self.place_name(place), arc_text(&self.spec.arcs[decl]))
            }
            Violation::Inhibited { decl, place } => {
                format!("{} is marked ({})", self.place_name(place), arc_text(&self.spec.arcs[decl]))
            }
            Violation::TooEarly {
                decl,
                last_fire,
                required,
                ..
            } => format!(
                "{} fired at cycle {last_fire}, {required} cycles required ({})",
                self.spec.arcs[decl].from,
                arc_text(&self.spec.arcs[decl])
            ),
            Violation::WindowFull { place } => format!("{} is full", self.place_name(place)),
        }
    }

    /// Scope coordinates of the deepest instances, e.g. every bank.
    pub fn leaf_scopes(&self) -> Vec<Vec<u32>> {
        let Some(deepest) = (0..self.topology.nodes.len()).max_by_key(|&n| self.topology.nodes[n].depth())
        else {
            return vec![Vec::new()];
        };
        let node = Some(deepest);
        (0..self.topology.instance_count(node))
            .map(|i| self.topology.coords(node, i))
            .collect()
    }
}

/// Flatten `spec` for the instance counts and timings in `config`.
pub fn elaborate(spec: &NetSpec, config: &Config) -> Result<ElaboratedNet, ElaborateError> {
    let topology = Topology::build(spec, config)?;

    let mut timing_values = Vec::new();
    for t in &spec.timing_params {
        match config.params.get(&t.name) {
            None => return Err(ElaborateError::UnboundTiming(t.name.clone())),
            Some(0) => return Err(ElaborateError::ZeroTiming(t.name.clone())),
            Some(&v) => timing_values.push((t.name.clone(), v)),
        }
    }
    let value_of = |name: &str| {
        timing_values
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
            .expect("timing parameters validated")
    };

    let mut places = Vec::new();
    let mut place_base = Vec::new();
    for (i, decl) in spec.places.iter().enumerate() {
        place_base.push(places.len());
        let node = topology.places[i].node;
        for idx in 0..topology.instance_count(node) {
            places.push(PlaceInstance {
                place: i,
                coords: topology.coords(node, idx),
                capacity: decl.capacity,
                lifetime: decl.lifetime.as_deref().map(value_of),
                initial_tokens: decl.initial_tokens,
            });
        }
    }
    let mut transitions = Vec::new();
    let mut transition_base = Vec::new();
    for i in 0..spec.transitions.len() {
        transition_base.push(transitions.len());
        let node = topology.transitions[i].node;
        for idx in 0..topology.instance_count(node) {
            transitions.push(TransitionInstance {
                transition: i,
                coords: topology.coords(node, idx),
            });
        }
    }

    let place_idx = |name: &str| spec.places.iter().position(|p| p.name == name).unwrap();
    let trans_idx = |name: &str| spec.transitions.iter().position(|t| t.name == name).unwrap();

    let mut arcs = Vec::new();
    let mut relations = Vec::new();
    let mut by_transition = vec![TransitionArcs::default(); transitions.len()];

    for (d, arc) in spec.arcs.iter().enumerate() {
        if arc.kind == ArcKind::Timing {
            let (a, c) = (trans_idx(&arc.from), trans_idx(&arc.to));
            let (na, nc) = (topology.transitions[a].node, topology.transitions[c].node);
            let rel = topology.relation(&arc.scope, na, nc);
            relations.push(rel);
            let cycles = value_of(arc.timing_param.as_deref().unwrap());
            for ai in 0..topology.instance_count(na) {
                let from = transition_base[a] + ai;
                for ci in topology.related(nc, rel, &transitions[from].coords) {
                    let to = transition_base[c] + ci;
                    arcs.push(ExpandedArc::Timing {
                        from,
                        to,
                        cycles,
                        decl: d,
                    });
                    by_transition[to].timing_in.push((from, cycles, d));
                }
            }
        } else {
            let (pname, tname) = arc.place_and_transition().unwrap();
            let (p, t) = (place_idx(pname), trans_idx(tname));
            let (np, nt) = (topology.places[p].node, topology.transitions[t].node);
            let rel = topology.relation(&arc.scope, np, nt);
            relations.push(rel);
            for ti in 0..topology.instance_count(nt) {
                let transition = transition_base[t] + ti;
                for pi in topology.related(np, rel, &transitions[transition].coords) {
                    let place = place_base[p] + pi;
                    arcs.push(ExpandedArc::Place {
                        kind: arc.kind,
                        place,
                        transition,
                        decl: d,
                    });
                    let entry = &mut by_transition[transition];
                    match arc.kind {
                        ArcKind::PlaceToTransition => entry.inputs.push((place, d)),
                        ArcKind::TransitionToPlace => entry.outputs.push((place, d)),
                        ArcKind::Inhibitor => entry.inhibitors.push((place, d)),
                        ArcKind::Reset => {}
                        ArcKind::Timing => unreachable!(),
                    }
                    let effect = match entry.effects.iter_mut().find(|e| e.place == place) {
                        Some(e) => e,
                        None => {
                            entry.effects.push(PlaceEffect {
                                place,
                                consume: 0,
                                produce: 0,
                                reset: false,
                            });
                            entry.effects.last_mut().unwrap()
                        }
                    };
                    match arc.kind {
                        ArcKind::PlaceToTransition => effect.consume += 1,
                        ArcKind::TransitionToPlace => effect.produce += 1,
                        ArcKind::Reset => effect.reset = true,
                        _ => {}
                    }
                }
            }
        }
    }
    for entry in &mut by_transition {
        entry
            .effects
            .retain(|e| e.reset || e.consume != e.produce);
        entry.effects.sort_by_key(|e| e.place);
    }

    Ok(ElaboratedNet {
        spec: spec.clone(),
        config: config.clone(),
        topology,
        places,
        transitions,
        place_base,
        transition_base,
        arcs,
        relations,
        by_transition,
        timing_values,
    })
}
