use std::fmt::Write;

use super::ast::*;

/// Render a spec back to DRAMml text.
///
/// Every arc is written into the block of its more deeply nested endpoint.
/// Parsing the output gives a spec that is [`NetSpec::structurally_eq`] to
/// the input.
pub fn render(spec: &NetSpec) -> String {
    let mut out = String::new();
    writeln!(out, "standard {};", spec.standard_name).unwrap();
    if !spec.timing_params.is_empty() {
        out.push('\n');
        out.push_str("Timings {\n");
        for t in &spec.timing_params {
            writeln!(out, "    {};", t.name).unwrap();
        }
        out.push_str("}\n");
    }
    render_scope(spec, &Vec::new(), &spec.hierarchies, 0, &mut out);
    out
}

fn arc_owner<'a>(spec: &'a NetSpec, arc: &ArcDecl) -> &'a Owner {
    let owner_of = |name: &str| -> &'a Owner {
        spec.place(name)
            .map(|p| &p.owner)
            .or_else(|| spec.transition(name).map(|t| &t.owner))
            .expect("arc endpoints are declared")
    };
    let (a, b) = (owner_of(&arc.from), owner_of(&arc.to));
    if a.len() >= b.len() {
        a
    } else {
        b
    }
}

pub(crate) fn arc_text(arc: &ArcDecl) -> String {
    let mut s = format!("{} {} {}", arc.from, arc.kind.operator(), arc.to);
    if let Some(p) = &arc.timing_param {
        write!(s, " ({p})").unwrap();
    }
    if !arc.scope.is_default() {
        write!(s, " {}", arc.scope).unwrap();
    }
    s
}

fn render_scope(
    spec: &NetSpec,
    owner: &Owner,
    children: &[HierarchyDecl],
    depth: usize,
    out: &mut String,
) {
    let pad = "    ".repeat(depth);
    let places: Vec<_> = spec.places.iter().filter(|p| &p.owner == owner).collect();
    let transitions: Vec<_> = spec.transitions.iter().filter(|t| &t.owner == owner).collect();
    let arcs: Vec<_> = spec
        .arcs
        .iter()
        .filter(|a| arc_owner(spec, a) == owner)
        .collect();

    if !places.is_empty() {
        writeln!(out, "\n{pad}Places {{").unwrap();
        for p in places {
            write!(out, "{pad}    {}", p.name).unwrap();
            if p.capacity != 1 {
                write!(out, " capacity({})", p.capacity).unwrap();
            }
            if let Some(l) = &p.lifetime {
                write!(out, " lifetime({l})").unwrap();
            }
            if p.initial_tokens != 0 {
                write!(out, " init({})", p.initial_tokens).unwrap();
            }
            out.push_str(";\n");
        }
        writeln!(out, "{pad}}}").unwrap();
    }
    if !transitions.is_empty() {
        writeln!(out, "\n{pad}Transitions {{").unwrap();
        for t in transitions {
            writeln!(out, "{pad}    {};", t.name).unwrap();
        }
        writeln!(out, "{pad}}}").unwrap();
    }
    if !arcs.is_empty() {
        writeln!(out, "\n{pad}Arcs {{").unwrap();
        for a in arcs {
            writeln!(out, "{pad}    {};", arc_text(a)).unwrap();
        }
        writeln!(out, "{pad}}}").unwrap();
    }
    for h in children {
        writeln!(out, "\n{pad}{} : {} {{", h.instance_count_param, h.name).unwrap();
        let mut path = owner.clone();
        path.push(h.name.clone());
        render_scope(spec, &path, &h.children, depth + 1, out);
        writeln!(out, "{pad}}}").unwrap();
    }
}
