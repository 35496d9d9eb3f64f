use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;

use crate::props::{Property, PropertyKind, PropertySet};

/// Commands renamed between generations, mapped to their older name.
pub const RENAMES: &[(&str, &str)] = &[("REFAB", "REFA")];

pub fn canonical_command(name: &str) -> &str {
    RENAMES
        .iter()
        .find(|(new, _)| *new == name)
        .map_or(name, |(_, old)| old)
}

/// Matching key: kind, place, canonical commands and scope.
fn key(p: &Property) -> String {
    let mut parts = vec![p.kind.label().to_lowercase()];
    parts.extend(p.place.clone());
    if p.kind != PropertyKind::Window {
        parts.extend(p.commands.iter().map(|c| canonical_command(c).to_string()));
    }
    let tag = p.scope.tag();
    if !tag.is_empty() {
        parts.push(tag);
    }
    parts.join("_")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiffSide {
    Base,
    Target,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffEntry {
    pub key: String,
    pub kind: PropertyKind,
    pub base_id: Option<String>,
    pub target_id: Option<String>,
}

/// A matched pair whose timing value or window differs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueChange {
    pub key: String,
    pub kind: PropertyKind,
    pub base_id: String,
    pub target_id: String,
    pub base_param: Option<String>,
    pub target_param: Option<String>,
    pub base_value: u32,
    pub target_value: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UpgradeDiff {
    pub base_model: String,
    pub target_model: String,
    pub dropped: Vec<String>,
    pub unchanged: Vec<DiffEntry>,
    pub changed: Vec<ValueChange>,
    pub added: Vec<DiffEntry>,
    pub removed: Vec<DiffEntry>,
    /// Properties of either set touching a dropped command.
    pub discarded: Vec<(DiffSide, DiffEntry)>,
}

fn value(p: &Property) -> Option<u32> {
    p.timing_value
        .or_else(|| p.window.map(|w| w.cycles))
}

impl UpgradeDiff {
    /// How many base and target properties the five lists account for.
    pub fn accounted(&self) -> (usize, usize) {
        let both = self.unchanged.len() + self.changed.len();
        let side = |s| self.discarded.iter().filter(|(d, _)| *d == s).count();
        (
            both + self.removed.len() + side(DiffSide::Base),
            both + self.added.len() + side(DiffSide::Target),
        )
    }

    pub fn is_identity(&self) -> bool {
        self.changed.is_empty()
            && self.added.is_empty()
            && self.removed.is_empty()
            && self.discarded.is_empty()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "base: {}  target: {}", self.base_model, self.target_model).unwrap();
        if !self.dropped.is_empty() {
            writeln!(out, "unsupported commands: {}", self.dropped.join(", ")).unwrap();
        }
        writeln!(
            out,
            "unchanged {}, changed {}, added {}, removed {}, discarded {}\n",
            self.unchanged.len(),
            self.changed.len(),
            self.added.len(),
            self.removed.len(),
            self.discarded.len()
        )
        .unwrap();
        if !self.changed.is_empty() {
            out.push_str("changed:\n");
            for c in &self.changed {
                let name = |p: &Option<String>, v: u32| match p {
                    Some(p) => format!("{p}={v}"),
                    None => v.to_string(),
                };
                writeln!(
                    out,
                    "  {:<40} {} -> {}",
                    c.target_id,
                    name(&c.base_param, c.base_value),
                    name(&c.target_param, c.target_value)
                )
                .unwrap();
            }
        }
        for (title, list) in [("added", &self.added), ("removed", &self.removed)] {
            if !list.is_empty() {
                writeln!(out, "{title}:").unwrap();
                for e in list {
                    let id = e.target_id.as_ref().or(e.base_id.as_ref()).unwrap();
                    writeln!(out, "  {id}").unwrap();
                }
            }
        }
        if !self.discarded.is_empty() {
            out.push_str("discarded:\n");
            for (side, e) in &self.discarded {
                let id = e.target_id.as_ref().or(e.base_id.as_ref()).unwrap();
                let side = match side {
                    DiffSide::Base => "base",
                    DiffSide::Target => "target",
                };
                writeln!(out, "  {id:<40} ({side})").unwrap();
            }
        }
        out
    }
}

fn index<'a>(
    set: &'a PropertySet,
    drop: &[&str],
    side: DiffSide,
    discarded: &mut Vec<(DiffSide, DiffEntry)>,
) -> BTreeMap<String, &'a Property> {
    let mut out = BTreeMap::new();
    for p in &set.properties {
        let k = key(p);
        let id = Some(p.unique_id.clone());
        if p.commands.iter().any(|c| drop.contains(&canonical_command(c))) {
            let (base_id, target_id) = match side {
                DiffSide::Base => (id, None),
                DiffSide::Target => (None, id),
            };
            discarded.push((
                side,
                DiffEntry {
                    key: k,
                    kind: p.kind,
                    base_id,
                    target_id,
                },
            ));
            continue;
        }
        let k = if out.contains_key(&k) {
            format!("{k}#{}", p.unique_id)
        } else {
            k
        };
        out.insert(k, p);
    }
    out
}

/// Match the properties of two generations. Properties mentioning any
/// `unsupported` command are set aside first; the rest are matched by kind,
/// place, commands (after renames) and scope.
pub fn upgrade_diff(base: &PropertySet, target: &PropertySet, unsupported: &[String]) -> UpgradeDiff {
    let drop: Vec<&str> = unsupported.iter().map(|c| canonical_command(c)).collect();
    let mut discarded = Vec::new();
    let b = index(base, &drop, DiffSide::Base, &mut discarded);
    let t = index(target, &drop, DiffSide::Target, &mut discarded);
    let mut diff = UpgradeDiff {
        base_model: base.model.clone(),
        target_model: target.model.clone(),
        dropped: unsupported.to_vec(),
        unchanged: Vec::new(),
        changed: Vec::new(),
        added: Vec::new(),
        removed: Vec::new(),
        discarded,
    };
    for (k, bp) in &b {
        let entry = |target_id| DiffEntry {
            key: k.clone(),
            kind: bp.kind,
            base_id: Some(bp.unique_id.clone()),
            target_id,
        };
        match t.get(k) {
            None => diff.removed.push(entry(None)),
            Some(tp) if value(bp) == value(tp) && bp.window == tp.window => {
                diff.unchanged.push(entry(Some(tp.unique_id.clone())))
            }
            Some(tp) => diff.changed.push(ValueChange {
                key: k.clone(),
                kind: bp.kind,
                base_id: bp.unique_id.clone(),
                target_id: tp.unique_id.clone(),
                base_param: bp.timing_param.clone(),
                target_param: tp.timing_param.clone(),
                base_value: value(bp).unwrap_or(0),
                target_value: value(tp).unwrap_or(0),
            }),
        }
    }
    for (k, tp) in &t {
        if !b.contains_key(k) {
            diff.added.push(DiffEntry {
                key: k.clone(),
                kind: tp.kind,
                base_id: None,
                target_id: Some(tp.unique_id.clone()),
            });
        }
    }
    diff
}
