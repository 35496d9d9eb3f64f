//! Checkable properties derived from an elaborated net, and their SVA text.
//!
//! Place-to-transition, inhibitor and timing arcs each yield one property.
//! Timed places with a capacity yield a sliding-window property. Transition-
//! to-place and reset arcs only drive the place state logic the properties
//! read.
//!
//! A property is symbolic: it is stated once and instantiated by the
//! hierarchy loops enclosing its anchor node. `multiplicity` is the number of
//! those loop instances.

mod sva;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::frontend::{arc_text, ArcKind, Scope};
use crate::petri::{Config, ElaboratedNet, Relation, Topology};

pub use sva::{emit_sva, SignalMap, SignalMapError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PropertyKind {
    Arc,
    Inhibitor,
    Timing,
    Window,
}

impl PropertyKind {
    pub fn label(self) -> &'static str {
        match self {
            PropertyKind::Arc => "ARC",
            PropertyKind::Inhibitor => "INHIBITOR",
            PropertyKind::Timing => "TIMING",
            PropertyKind::Window => "WINDOW",
        }
    }
}

/// At most `max_count` fills of a place within any `cycles`-cycle window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Window {
    pub cycles: u32,
    pub max_count: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Property {
    pub unique_id: String,
    pub kind: PropertyKind,
    pub place: Option<String>,
    /// ARC and INHIBITOR: the guarded command. TIMING: the earlier and the
    /// later command. WINDOW: every command filling the place.
    pub commands: Vec<String>,
    #[serde(serialize_with = "scope_text")]
    pub scope: Scope,
    /// Hierarchy names from the outermost level down to the anchor.
    pub anchor_levels: Vec<String>,
    pub timing_param: Option<String>,
    pub timing_value: Option<u32>,
    pub window: Option<Window>,
    pub multiplicity: usize,
    /// The DRAMml declaration the property comes from.
    pub source: String,
    pub sva_text: String,
    #[serde(skip)]
    pub(crate) anchor: Option<usize>,
    #[serde(skip)]
    pub(crate) relation: Relation,
    #[serde(skip)]
    pub(crate) place_index: Option<usize>,
    /// Transition indices matching `commands`.
    #[serde(skip)]
    pub(crate) kinds: Vec<usize>,
    /// WINDOW only: relation from each filling command to the place.
    #[serde(skip)]
    pub(crate) fill_relations: Vec<Relation>,
}

fn scope_text<S: serde::Serializer>(scope: &Scope, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&scope.to_string())
}

impl Property {
    /// Every command kind the property mentions.
    pub fn involves(&self, command: &str) -> bool {
        self.commands.iter().any(|c| c == command)
    }
}

/// Net token change of one place when one transition fires.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceUpdate {
    pub transition: usize,
    pub relation: Relation,
    pub consume: u32,
    pub produce: u32,
    pub reset: bool,
}

/// State logic of one place declaration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaceLogic {
    pub name: String,
    pub node: Option<usize>,
    pub capacity: u32,
    pub initial_tokens: u32,
    pub lifetime: Option<u32>,
    /// Self-loops are omitted; they leave the place unchanged.
    pub updates: Vec<PlaceUpdate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertySet {
    pub model: String,
    pub config: Config,
    pub topology: Topology,
    pub places: Vec<PlaceLogic>,
    /// Sorted by `unique_id`.
    pub properties: Vec<Property>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountSummary {
    pub generated: usize,
    pub unique: usize,
}

impl PropertySet {
    pub fn get(&self, unique_id: &str) -> Option<&Property> {
        self.properties
            .binary_search_by(|p| p.unique_id.as_str().cmp(unique_id))
            .ok()
            .map(|i| &self.properties[i])
    }

    /// The same properties with every TIMING value raised by `k` cycles.
    pub fn with_timing_increment(&self, k: u32) -> PropertySet {
        let mut out = self.clone();
        for p in &mut out.properties {
            if let Some(v) = p.timing_value.as_mut() {
                *v += k;
                p.sva_text = sva::property_block(&out.topology, p);
            }
        }
        out
    }
}

pub fn count_summary(props: &PropertySet) -> CountSummary {
    CountSummary {
        generated: props.properties.iter().map(|p| p.multiplicity).sum(),
        unique: props.properties.len(),
    }
}

fn deeper(topo: &Topology, a: Option<usize>, b: Option<usize>) -> Option<usize> {
    if topo.depth(a) >= topo.depth(b) {
        a
    } else {
        b
    }
}

/// Derive every property of `net`.
pub fn derive(net: &ElaboratedNet) -> PropertySet {
    let spec = &net.spec;
    let topo = &net.topology;
    let place_idx = |name: &str| spec.places.iter().position(|p| p.name == name).unwrap();
    let trans_idx = |name: &str| topo.transition_index(name).unwrap();
    let levels = |node: Option<usize>| -> Vec<String> {
        topo.level_names(node).into_iter().map(String::from).collect()
    };

    let mut props: BTreeMap<String, Property> = BTreeMap::new();
    let mut updates: Vec<BTreeMap<usize, PlaceUpdate>> = vec![BTreeMap::new(); spec.places.len()];
    let mut fills: Vec<Vec<(usize, Relation)>> = vec![Vec::new(); spec.places.len()];

    for (d, arc) in spec.arcs.iter().enumerate() {
        let relation = net.relations[d];
        let base = |unique_id: String, kind, anchor: Option<usize>| Property {
            unique_id,
            kind,
            place: None,
            commands: Vec::new(),
            scope: arc.scope.clone(),
            anchor_levels: levels(anchor),
            timing_param: None,
            timing_value: None,
            window: None,
            multiplicity: topo.instance_count(anchor),
            source: arc_text(arc),
            sva_text: String::new(),
            anchor,
            relation,
            place_index: None,
            kinds: Vec::new(),
            fill_relations: Vec::new(),
        };
        match arc.kind {
            ArcKind::Timing => {
                let (a, c) = (trans_idx(&arc.from), trans_idx(&arc.to));
                let anchor = topo.ancestor_at(topo.transitions[a].node, relation.depth());
                let mut id = format!("timing_{}_{}", arc.from, arc.to);
                if !arc.scope.is_default() {
                    id = format!("{id}_{}", arc.scope.tag());
                }
                let param = arc.timing_param.clone().unwrap();
                let mut p = base(id.clone(), PropertyKind::Timing, anchor);
                p.commands = vec![arc.from.clone(), arc.to.clone()];
                p.kinds = vec![a, c];
                p.timing_value = net.timing_value(&param);
                p.timing_param = Some(param);
                props.insert(id, p);
            }
            ArcKind::PlaceToTransition | ArcKind::Inhibitor => {
                let (pname, tname) = arc.place_and_transition().unwrap();
                let (pi, ti) = (place_idx(pname), trans_idx(tname));
                let anchor = deeper(topo, topo.places[pi].node, topo.transitions[ti].node);
                let (prefix, kind) = if arc.kind == ArcKind::Inhibitor {
                    ("inhibitor", PropertyKind::Inhibitor)
                } else {
                    ("arc", PropertyKind::Arc)
                };
                let id = format!("{prefix}_{pname}_{tname}");
                let mut p = base(id.clone(), kind, anchor);
                p.place = Some(pname.to_string());
                p.place_index = Some(pi);
                p.commands = vec![tname.to_string()];
                p.kinds = vec![ti];
                props.insert(id, p);
            }
            ArcKind::TransitionToPlace | ArcKind::Reset => {}
        }
        if arc.kind != ArcKind::Timing && arc.kind != ArcKind::Inhibitor {
            let (pname, tname) = arc.place_and_transition().unwrap();
            let (pi, ti) = (place_idx(pname), trans_idx(tname));
            let u = updates[pi].entry(ti).or_insert(PlaceUpdate {
                transition: ti,
                relation,
                consume: 0,
                produce: 0,
                reset: false,
            });
            match arc.kind {
                ArcKind::PlaceToTransition => u.consume += 1,
                ArcKind::TransitionToPlace => {
                    u.produce += 1;
                    if spec.places[pi].is_timed() {
                        fills[pi].push((ti, relation));
                    }
                }
                _ => u.reset = true,
            }
        }
    }

    let mut places = Vec::new();
    for (pi, decl) in spec.places.iter().enumerate() {
        let node = topo.places[pi].node;
        let lifetime = decl.lifetime.as_deref().and_then(|l| net.timing_value(l));
        places.push(PlaceLogic {
            name: decl.name.clone(),
            node,
            capacity: decl.capacity,
            initial_tokens: decl.initial_tokens,
            lifetime,
            updates: updates[pi]
                .values()
                .filter(|u| u.reset || u.consume != u.produce)
                .cloned()
                .collect(),
        });
        if let Some(cycles) = lifetime {
            if fills[pi].is_empty() {
                continue;
            }
            let id = format!("window_{}", decl.name);
            props.insert(
                id.clone(),
                Property {
                    unique_id: id,
                    kind: PropertyKind::Window,
                    place: Some(decl.name.clone()),
                    commands: fills[pi]
                        .iter()
                        .map(|&(t, _)| topo.transitions[t].name.clone())
                        .collect(),
                    scope: Scope::default(),
                    anchor_levels: levels(node),
                    timing_param: decl.lifetime.clone(),
                    timing_value: None,
                    window: Some(Window {
                        cycles,
                        max_count: decl.capacity,
                    }),
                    multiplicity: topo.instance_count(node),
                    source: format!(
                        "{} capacity({}) lifetime({})",
                        decl.name,
                        decl.capacity,
                        decl.lifetime.as_deref().unwrap_or_default()
                    ),
                    sva_text: String::new(),
                    anchor: node,
                    relation: Relation::Prefix(topo.depth(node)),
                    place_index: Some(pi),
                    kinds: fills[pi].iter().map(|&(t, _)| t).collect(),
                    fill_relations: fills[pi].iter().map(|&(_, r)| r).collect(),
                },
            );
        }
    }

    let mut properties: Vec<Property> = props.into_values().collect();
    for p in &mut properties {
        p.sva_text = sva::property_block(topo, p);
    }

    PropertySet {
        model: spec.standard_name.clone(),
        config: net.config.clone(),
        topology: topo.clone(),
        places,
        properties,
    }
}
