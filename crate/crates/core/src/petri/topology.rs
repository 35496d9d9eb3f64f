//! Bound hierarchy tree and instance addressing.
//!
//! An instance of a hierarchy node at depth `d` is addressed by a coordinate
//! vector of length `d`, one index per enclosing hierarchy level (for DDR4:
//! rank, bank group, bank). Instances are numbered in mixed radix with the
//! outermost level most significant, so every coordinate prefix owns a
//! contiguous index range.

use std::fmt;
use std::ops::Range;

use serde::Serialize;

use crate::frontend::{NetSpec, Owner, Scope, ScopeQualifier};

use super::{Config, ElaborateError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierNode {
    pub name: String,
    pub count_param: String,
    pub count: u32,
    pub parent: Option<usize>,
    /// Node ids from the outermost level down to this node.
    pub path: Vec<usize>,
}

impl HierNode {
    pub fn depth(&self) -> usize {
        self.path.len()
    }
}

/// A named element (place or transition) and the hierarchy node owning it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Element {
    pub name: String,
    pub node: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Topology {
    pub standard: String,
    pub nodes: Vec<HierNode>,
    pub transitions: Vec<Element>,
    pub places: Vec<Element>,
}

/// Pairing between instances of two elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Relation {
    /// The first `n` coordinates agree.
    Prefix(usize),
    /// The first `n - 1` coordinates agree and coordinate `n - 1` differs.
    Sibling(usize),
}

impl Relation {
    pub fn relates(self, a: &[u32], b: &[u32]) -> bool {
        match self {
            Relation::Prefix(n) => a[..n] == b[..n],
            Relation::Sibling(n) => a[..n - 1] == b[..n - 1] && a[n - 1] != b[n - 1],
        }
    }

    /// Depth of the hierarchy level the relation is anchored at.
    pub fn depth(self) -> usize {
        match self {
            Relation::Prefix(n) | Relation::Sibling(n) => n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CommandError {
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("command `{name}` takes {expected} coordinate(s), got {got}")]
    WrongDepth {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("coordinate {value} for `{level}` out of range (count {count})")]
    OutOfRange { level: String, value: u32, count: u32 },
}

/// One DRAM command on the shared command bus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Command {
    pub cycle: u64,
    /// Index into [`Topology::transitions`].
    pub kind: usize,
    pub coords: Vec<u32>,
}

impl Topology {
    pub fn build(spec: &NetSpec, config: &Config) -> Result<Self, ElaborateError> {
        let mut nodes = Vec::new();
        fn walk(
            decls: &[crate::frontend::HierarchyDecl],
            parent: Option<usize>,
            path: &[usize],
            config: &Config,
            nodes: &mut Vec<HierNode>,
        ) -> Result<(), ElaborateError> {
            for h in decls {
                let count = match config.params.get(&h.instance_count_param) {
                    None => {
                        return Err(ElaborateError::UnboundCount(h.instance_count_param.clone()))
                    }
                    Some(0) => return Err(ElaborateError::ZeroCount(h.instance_count_param.clone())),
                    Some(&n) => n,
                };
                let id = nodes.len();
                let mut p = path.to_vec();
                p.push(id);
                nodes.push(HierNode {
                    name: h.name.clone(),
                    count_param: h.instance_count_param.clone(),
                    count,
                    parent,
                    path: p.clone(),
                });
                walk(&h.children, Some(id), &p, config, nodes)?;
            }
            Ok(())
        }
        walk(&spec.hierarchies, None, &[], config, &mut nodes)?;

        let node_of = |owner: &Owner| -> Option<usize> {
            if owner.is_empty() {
                return None;
            }
            nodes.iter().position(|n| {
                n.path.len() == owner.len()
                    && n.path.iter().zip(owner).all(|(&id, name)| nodes[id].name == *name)
            })
        };
        let transitions = spec
            .transitions
            .iter()
            .map(|t| Element {
                name: t.name.clone(),
                node: node_of(&t.owner),
            })
            .collect();
        let places = spec
            .places
            .iter()
            .map(|p| Element {
                name: p.name.clone(),
                node: node_of(&p.owner),
            })
            .collect();
        Ok(Topology {
            standard: spec.standard_name.clone(),
            nodes,
            transitions,
            places,
        })
    }

    pub fn depth(&self, node: Option<usize>) -> usize {
        node.map_or(0, |n| self.nodes[n].depth())
    }

    /// Instance counts along the path to `node`.
    pub fn counts(&self, node: Option<usize>) -> Vec<u32> {
        match node {
            None => Vec::new(),
            Some(n) => self.nodes[n].path.iter().map(|&i| self.nodes[i].count).collect(),
        }
    }

    /// Hierarchy names along the path to `node`.
    pub fn level_names(&self, node: Option<usize>) -> Vec<&str> {
        match node {
            None => Vec::new(),
            Some(n) => self.nodes[n]
                .path
                .iter()
                .map(|&i| self.nodes[i].name.as_str())
                .collect(),
        }
    }

    /// Ancestor of `node` (inclusive) at the given depth; `None` at depth 0.
    pub fn ancestor_at(&self, node: Option<usize>, depth: usize) -> Option<usize> {
        if depth == 0 {
            None
        } else {
            node.map(|n| self.nodes[n].path[depth - 1])
        }
    }

    pub fn instance_count(&self, node: Option<usize>) -> usize {
        self.counts(node).iter().map(|&c| c as usize).product()
    }

    pub fn index(&self, node: Option<usize>, coords: &[u32]) -> usize {
        let counts = self.counts(node);
        debug_assert_eq!(counts.len(), coords.len());
        coords
            .iter()
            .zip(&counts)
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize)
    }

    pub fn coords(&self, node: Option<usize>, mut index: usize) -> Vec<u32> {
        let counts = self.counts(node);
        let mut out = vec![0u32; counts.len()];
        for (slot, &n) in out.iter_mut().zip(&counts).rev() {
            *slot = (index % n as usize) as u32;
            index /= n as usize;
        }
        out
    }

    /// Instances of `node` whose coordinates start with `prefix`.
    pub fn prefix_range(&self, node: Option<usize>, prefix: &[u32]) -> Range<usize> {
        let counts = self.counts(node);
        let inner: usize = counts[prefix.len()..].iter().map(|&c| c as usize).product();
        let outer = prefix
            .iter()
            .zip(&counts)
            .fold(0usize, |acc, (&c, &n)| acc * n as usize + c as usize);
        outer * inner..(outer + 1) * inner
    }

    /// Instances of `node` related to an element instance at `coords`.
    pub fn related(&self, node: Option<usize>, relation: Relation, coords: &[u32]) -> Vec<usize> {
        match relation {
            Relation::Prefix(n) => self.prefix_range(node, &coords[..n]).collect(),
            Relation::Sibling(n) => {
                let count = self.counts(node)[n - 1];
                let mut prefix = coords[..n].to_vec();
                let own = coords[n - 1];
                let mut out = Vec::new();
                for v in (0..count).filter(|&v| v != own) {
                    prefix[n - 1] = v;
                    out.extend(self.prefix_range(node, &prefix));
                }
                out
            }
        }
    }

    /// Resolve an arc scope between elements owned by `a` and `b`.
    ///
    /// Endpoints are validated to lie on one root-to-leaf chain, so the
    /// shallower owner encloses the deeper one.
    pub fn relation(&self, scope: &Scope, a: Option<usize>, b: Option<usize>) -> Relation {
        let (da, db) = (self.depth(a), self.depth(b));
        let shallow = if da <= db { a } else { b };
        let shared = da.min(db);
        let level = scope.level.as_ref().map(|name| {
            self.level_names(shallow)
                .iter()
                .position(|l| l == name)
                .expect("scope level validated by the frontend")
                + 1
        });
        match (scope.qualifier, level) {
            (ScopeQualifier::SameInstance, l) => Relation::Prefix(l.unwrap_or(shared)),
            (ScopeQualifier::SiblingInstance, l) => Relation::Sibling(l.unwrap_or(shared)),
            (ScopeQualifier::AllInstances, None) => Relation::Prefix(shared),
            (ScopeQualifier::AllInstances, Some(l)) => Relation::Prefix(l - 1),
        }
    }

    pub fn transition_index(&self, name: &str) -> Option<usize> {
        self.transitions.iter().position(|t| t.name == name)
    }

    /// Build a validated command from a mnemonic and coordinates.
    pub fn command(&self, cycle: u64, name: &str, coords: &[u32]) -> Result<Command, CommandError> {
        let kind = self
            .transition_index(name)
            .ok_or_else(|| CommandError::UnknownCommand(name.to_string()))?;
        let node = self.transitions[kind].node;
        let counts = self.counts(node);
        if counts.len() != coords.len() {
            return Err(CommandError::WrongDepth {
                name: name.to_string(),
                expected: counts.len(),
                got: coords.len(),
            });
        }
        for ((&c, &n), level) in coords.iter().zip(&counts).zip(self.level_names(node)) {
            if c >= n {
                return Err(CommandError::OutOfRange {
                    level: level.to_string(),
                    value: c,
                    count: n,
                });
            }
        }
        Ok(Command {
            cycle,
            kind,
            coords: coords.to_vec(),
        })
    }

    pub fn display_command<'a>(&'a self, cmd: &'a Command) -> impl fmt::Display + 'a {
        DisplayCommand { topo: self, cmd }
    }
}

struct DisplayCommand<'a> {
    topo: &'a Topology,
    cmd: &'a Command,
}

impl fmt::Display for DisplayCommand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            self.cmd.cycle, self.topo.transitions[self.cmd.kind].name
        )?;
        for c in &self.cmd.coords {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}
