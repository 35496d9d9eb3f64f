//! Name resolution and invariant checks turning a [`Document`] into a [`NetSpec`].

use std::collections::{BTreeMap, HashMap, HashSet};

use super::ast::*;
use super::syntax::{ArcOp, ArcStmt, Document, Item, PlaceStmt};
use super::Diagnostic;

#[derive(Default)]
struct Collector {
    standard: Option<(String, Span)>,
    hierarchies: Vec<HierarchyDecl>,
    places: Vec<PlaceDecl>,
    transitions: Vec<TransitionDecl>,
    arcs: Vec<ArcStmt>,
    timings: Vec<TimingParam>,
    diags: Vec<Diagnostic>,
}

impl Collector {
    fn collect(&mut self, items: &[Item], owner: &Owner) -> Vec<HierarchyDecl> {
        let mut children = Vec::new();
        for item in items {
            match item {
                Item::Standard(name, span) => {
                    if !owner.is_empty() {
                        self.diags.push(Diagnostic::new(
                            *span,
                            "`standard` is only allowed at the top level",
                        ));
                    } else if self.standard.is_some() {
                        self.diags
                            .push(Diagnostic::new(*span, "duplicate `standard` declaration"));
                    } else {
                        self.standard = Some((name.clone(), *span));
                    }
                }
                Item::Timings(names) => {
                    for (name, span) in names {
                        if !owner.is_empty() {
                            self.diags.push(Diagnostic::new(
                                *span,
                                "`Timings` is only allowed at the top level",
                            ));
                        } else {
                            self.timings.push(TimingParam {
                                name: name.clone(),
                                span: *span,
                            });
                        }
                    }
                }
                Item::Places(places) => {
                    for PlaceStmt {
                        name,
                        capacity,
                        lifetime,
                        initial,
                        span,
                    } in places
                    {
                        self.places.push(PlaceDecl {
                            name: name.clone(),
                            owner: owner.clone(),
                            capacity: capacity.unwrap_or(1),
                            lifetime: lifetime.clone(),
                            initial_tokens: initial.unwrap_or(0),
                            span: *span,
                        });
                    }
                }
                Item::Transitions(names) => {
                    for (name, span) in names {
                        self.transitions.push(TransitionDecl {
                            name: name.clone(),
                            owner: owner.clone(),
                            span: *span,
                        });
                    }
                }
                Item::Arcs(arcs) => self.arcs.extend(arcs.iter().cloned()),
                Item::Hierarchy {
                    count_param,
                    name,
                    items,
                    span,
                } => {
                    if owner.contains(name) {
                        self.diags.push(Diagnostic::new(
                            *span,
                            format!("hierarchy `{name}` is nested inside a hierarchy of the same name"),
                        ));
                    }
                    let mut path = owner.clone();
                    path.push(name.clone());
                    let grandchildren = self.collect(items, &path);
                    children.push(HierarchyDecl {
                        name: name.clone(),
                        instance_count_param: count_param.clone(),
                        children: grandchildren,
                        span: *span,
                    });
                }
            }
        }
        children
    }
}

enum Endpoint<'a> {
    Place(&'a PlaceDecl),
    Transition(&'a TransitionDecl),
}

impl Endpoint<'_> {
    fn owner(&self) -> &Owner {
        match self {
            Endpoint::Place(p) => &p.owner,
            Endpoint::Transition(t) => &t.owner,
        }
    }
}

fn is_prefix(a: &[String], b: &[String]) -> bool {
    a.len() <= b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

pub fn validate(doc: &Document) -> Result<NetSpec, Vec<Diagnostic>> {
    let mut c = Collector::default();
    c.hierarchies = c.collect(&doc.items, &Vec::new());
    let mut diags = std::mem::take(&mut c.diags);

    let standard_name = match &c.standard {
        Some((name, _)) => name.clone(),
        None => {
            diags.push(Diagnostic::new(
                Span::new(1, 1),
                "missing `standard <name>;` declaration",
            ));
            String::new()
        }
    };

    let mut timing_names = HashSet::new();
    for t in &c.timings {
        if !timing_names.insert(t.name.as_str()) {
            diags.push(Diagnostic::new(
                t.span,
                format!("duplicate timing parameter `{}`", t.name),
            ));
        }
    }

    let mut names: HashMap<&str, Endpoint> = HashMap::new();
    for p in &c.places {
        if names.insert(&p.name, Endpoint::Place(p)).is_some() {
            diags.push(Diagnostic::new(
                p.span,
                format!("duplicate declaration of `{}`", p.name),
            ));
        }
        if p.capacity == 0 {
            diags.push(Diagnostic::new(
                p.span,
                format!("place `{}` has capacity 0", p.name),
            ));
        }
        if p.initial_tokens > p.capacity {
            diags.push(Diagnostic::new(
                p.span,
                format!("place `{}` starts with more tokens than its capacity", p.name),
            ));
        }
        if let Some(lifetime) = &p.lifetime {
            if !timing_names.contains(lifetime.as_str()) {
                diags.push(Diagnostic::new(
                    p.span,
                    format!("undeclared timing parameter `{lifetime}`"),
                ));
            }
            if p.initial_tokens != 0 {
                diags.push(Diagnostic::new(
                    p.span,
                    format!("timed place `{}` cannot hold initial tokens", p.name),
                ));
            }
        }
    }
    for t in &c.transitions {
        if names.insert(&t.name, Endpoint::Transition(t)).is_some() {
            diags.push(Diagnostic::new(
                t.span,
                format!("duplicate declaration of `{}`", t.name),
            ));
        }
    }

    let mut arcs = Vec::new();
    let mut seen = HashSet::new();
    // (place, transition) -> scope of the first non-timing arc between them
    let mut pair_scopes: BTreeMap<(String, String), Scope> = BTreeMap::new();

    for stmt in &c.arcs {
        let span = stmt.span;
        let from = names.get(stmt.from.as_str());
        let to = names.get(stmt.to.as_str());
        let mut ok = true;
        for (name, ep) in [(&stmt.from, &from), (&stmt.to, &to)] {
            if ep.is_none() {
                diags.push(Diagnostic::new(
                    span,
                    format!("reference to undeclared place or transition `{name}`"),
                ));
                ok = false;
            }
        }
        if !ok {
            continue;
        }
        let (from, to) = (from.unwrap(), to.unwrap());
        let kind = match (stmt.op, from, to) {
            (ArcOp::Arrow, Endpoint::Place(_), Endpoint::Transition(_)) => ArcKind::PlaceToTransition,
            (ArcOp::Arrow, Endpoint::Transition(_), Endpoint::Place(_)) => ArcKind::TransitionToPlace,
            (ArcOp::Inhibit, Endpoint::Place(_), Endpoint::Transition(_)) => ArcKind::Inhibitor,
            (ArcOp::Reset, Endpoint::Place(_), Endpoint::Transition(_)) => ArcKind::Reset,
            (ArcOp::Timing, Endpoint::Transition(_), Endpoint::Transition(_)) => ArcKind::Timing,
            (op, _, _) => {
                let expected = match op {
                    ArcOp::Arrow => "a place and a transition",
                    ArcOp::Inhibit | ArcOp::Reset => "a place followed by a transition",
                    ArcOp::Timing => "two transitions",
                };
                diags.push(Diagnostic::new(
                    span,
                    format!(
                        "arc `{} {} {}` must connect {expected}",
                        stmt.from,
                        op_text(op),
                        stmt.to
                    ),
                ));
                continue;
            }
        };

        let timing_param = match (&stmt.param, kind) {
            (None, ArcKind::Timing) => {
                diags.push(Diagnostic::new(
                    span,
                    format!(
                        "timing arc `{} -<> {}` requires a timing parameter",
                        stmt.from, stmt.to
                    ),
                ));
                continue;
            }
            (Some((p, pspan)), ArcKind::Timing) => {
                if !timing_names.contains(p.as_str()) {
                    diags.push(Diagnostic::new(
                        *pspan,
                        format!("undeclared timing parameter `{p}`"),
                    ));
                }
                Some(p.clone())
            }
            (Some((_, pspan)), _) => {
                diags.push(Diagnostic::new(
                    *pspan,
                    "only timing arcs (`-<>`) carry a timing parameter",
                ));
                continue;
            }
            (None, _) => None,
        };

        let scope = stmt.scope.clone().unwrap_or_default();
        if !scope.is_default() && !matches!(kind, ArcKind::Timing | ArcKind::Reset) {
            diags.push(Diagnostic::new(
                span,
                "scope qualifiers are only allowed on timing and reset arcs",
            ));
            continue;
        }

        let (oa, ob) = (from.owner(), to.owner());
        let shared = if is_prefix(oa, ob) {
            oa
        } else if is_prefix(ob, oa) {
            ob
        } else {
            diags.push(Diagnostic::new(
                span,
                format!(
                    "`{}` and `{}` live in unrelated hierarchies",
                    stmt.from, stmt.to
                ),
            ));
            continue;
        };
        let level_depth = match &scope.level {
            Some(level) => match shared.iter().position(|h| h == level) {
                Some(i) => i + 1,
                None => {
                    diags.push(Diagnostic::new(
                        span,
                        format!(
                            "scope level `{level}` is not a hierarchy enclosing both `{}` and `{}`",
                            stmt.from, stmt.to
                        ),
                    ));
                    continue;
                }
            },
            None => shared.len(),
        };
        if scope.qualifier == ScopeQualifier::SiblingInstance && level_depth == 0 {
            diags.push(Diagnostic::new(
                span,
                "`@sibling` needs an enclosing hierarchy",
            ));
            continue;
        }

        for ep in [from, to] {
            if let Endpoint::Place(p) = ep {
                if p.is_timed() && kind != ArcKind::TransitionToPlace {
                    diags.push(Diagnostic::new(
                        span,
                        format!(
                            "timed place `{}` can only be the target of a transition-to-place arc",
                            p.name
                        ),
                    ));
                    ok = false;
                }
            }
        }
        if !ok {
            continue;
        }

        let arc = ArcDecl {
            kind,
            from: stmt.from.clone(),
            to: stmt.to.clone(),
            timing_param,
            scope,
            span,
        };
        let key = (
            arc.kind,
            arc.from.clone(),
            arc.to.clone(),
            arc.scope.clone(),
        );
        if !seen.insert(key) {
            diags.push(Diagnostic::new(
                span,
                format!(
                    "duplicate arc `{} {} {}`",
                    arc.from,
                    arc.kind.operator(),
                    arc.to
                ),
            ));
            continue;
        }
        if let Some((place, trans)) = arc.place_and_transition() {
            let entry = pair_scopes
                .entry((place.to_string(), trans.to_string()))
                .or_insert_with(|| arc.scope.clone());
            if *entry != arc.scope {
                diags.push(Diagnostic::new(
                    span,
                    format!("arcs between `{place}` and `{trans}` use conflicting scopes"),
                ));
                continue;
            }
        }
        arcs.push(arc);
    }

    if !diags.is_empty() {
        diags.sort_by(|a, b| {
            (a.span.line, a.span.column, &a.message).cmp(&(b.span.line, b.span.column, &b.message))
        });
        diags.dedup_by(|a, b| {
            a.span.line == b.span.line && a.span.column == b.span.column && a.message == b.message
        });
        return Err(diags);
    }

    Ok(NetSpec {
        standard_name,
        hierarchies: c.hierarchies,
        places: c.places,
        transitions: c.transitions,
        arcs,
        timing_params: c.timings,
    })
}

fn op_text(op: ArcOp) -> &'static str {
    match op {
        ArcOp::Arrow => "->",
        ArcOp::Inhibit => "-o",
        ArcOp::Reset => "->>",
        ArcOp::Timing => "-<>",
    }
}
