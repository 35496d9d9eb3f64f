//! SystemVerilog Assertion rendering.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::petri::{parse_kv, ConfigError, Relation, Topology};

use super::{PlaceLogic, Property, PropertyKind, PropertySet};

/// Names of the controller signals the generated module binds to.
///
/// Read from a flat `key=value` file:
///
/// ```text
/// format=1
/// module=ctrl_props
/// clock=clk_i
/// reset=rst_i
/// command=dfi_cmd
/// command_width=5
/// coord.bankgroup=dfi_bg
/// enc.ACT=3
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignalMap {
    pub module: Option<String>,
    pub clock: Option<String>,
    pub reset: Option<String>,
    pub command: Option<String>,
    pub command_width: Option<u32>,
    /// Hierarchy name to coordinate signal.
    pub coords: BTreeMap<String, String>,
    /// Command name to encoding.
    pub encodings: BTreeMap<String, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignalMapError {
    #[error(transparent)]
    Syntax(#[from] ConfigError),
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: `{value}` is not a valid value for `{key}`")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.')
}

impl SignalMap {
    pub fn parse(text: &str) -> Result<Self, SignalMapError> {
        let mut map = SignalMap::default();
        for (line, key, value) in parse_kv(text)? {
            let bad = || SignalMapError::BadValue {
                line,
                key: key.clone(),
                value: value.clone(),
            };
            let name = || {
                if is_identifier(&value) {
                    Ok(value.clone())
                } else {
                    Err(bad())
                }
            };
            match key.as_str() {
                "format" if value == "1" => {}
                "module" => map.module = Some(name()?),
                "clock" => map.clock = Some(name()?),
                "reset" => map.reset = Some(name()?),
                "command" => map.command = Some(name()?),
                "command_width" => {
                    map.command_width = Some(value.parse().ok().filter(|&w| w >= 1).ok_or_else(bad)?)
                }
                k => {
                    if let Some(level) = k.strip_prefix("coord.") {
                        map.coords.insert(level.to_string(), name()?);
                    } else if let Some(cmd) = k.strip_prefix("enc.") {
                        map.encodings
                            .insert(cmd.to_string(), value.parse().map_err(|_| bad())?);
                    } else if k == "format" {
                        return Err(bad());
                    } else {
                        return Err(SignalMapError::UnknownKey {
                            line,
                            key: key.clone(),
                        });
                    }
                }
            }
        }
        Ok(map)
    }

    fn clock(&self) -> &str {
        self.clock.as_deref().unwrap_or("clk")
    }

    fn reset(&self) -> &str {
        self.reset.as_deref().unwrap_or("reset")
    }

    fn command(&self) -> &str {
        self.command.as_deref().unwrap_or("cmd")
    }

    fn coord(&self, level: &str) -> String {
        self.coords
            .get(level)
            .cloned()
            .unwrap_or_else(|| format!("cmd_{level}"))
    }
}

fn bits(max_value: u32) -> u32 {
    (32 - max_value.leading_zeros()).max(1)
}

fn literal(width: u32, value: u32) -> String {
    if width == 1 {
        format!("1'b{value}")
    } else {
        format!("{width}'d{value}")
    }
}

/// `cmd == NAME` plus coordinate comparisons against the first `n` loop
/// variables; with `sibling` the last comparison is an inequality.
fn command_match(map: &SignalMap, name: &str, levels: &[String], n: usize, sibling: bool) -> String {
    let mut out = format!("{} == {name}", map.command());
    for (i, level) in levels[..n].iter().enumerate() {
        let op = if sibling && i + 1 == n { "!=" } else { "==" };
        write!(out, " && {} {op} {level}_id", map.coord(level)).unwrap();
    }
    out
}

fn relation_match(map: &SignalMap, name: &str, levels: &[String], rel: Relation) -> String {
    match rel {
        Relation::Prefix(n) => command_match(map, name, levels, n, false),
        Relation::Sibling(n) => command_match(map, name, levels, n, true),
    }
}

fn clocking(map: &SignalMap) -> String {
    format!("@(posedge {}) disable iff ({})", map.clock(), map.reset())
}

fn fill_signal(p: &Property) -> String {
    format!("{}_fill", p.place.as_deref().unwrap_or_default())
}

pub(super) fn property_block(topo: &Topology, p: &Property) -> String {
    render_property(topo, p, &SignalMap::default())
}

fn render_property(topo: &Topology, p: &Property, map: &SignalMap) -> String {
    let id = &p.unique_id;
    let levels = &p.anchor_levels;
    let mut out = format!("// {}\n", p.source);
    match p.kind {
        PropertyKind::Arc | PropertyKind::Inhibitor => {
            let place = p.place.as_deref().unwrap();
            let depth = topo.depth(topo.transitions[p.kinds[0]].node);
            let cmd = command_match(map, &p.commands[0], levels, depth, false);
            let body = if p.kind == PropertyKind::Arc {
                format!("({cmd}) |-> ({place} >= 1'b1);")
            } else {
                format!("({place} >= 1'b1) |-> not ({cmd});")
            };
            let assert = if p.kind == PropertyKind::Arc {
                format!("assert property({id});")
            } else {
                format!("assert property(@(posedge {}) {id});", map.clock())
            };
            write!(
                out,
                "property {id};\n    {}\n        {body}\nendproperty;\n\n{assert}\n",
                clocking(map)
            )
            .unwrap();
        }
        PropertyKind::Timing => {
            let t = p.timing_value.unwrap();
            let param = p.timing_param.as_deref().unwrap();
            if t <= 1 {
                writeln!(
                    out,
                    "// {id}: {param} = {t}, the window ##[1:0] is empty; vacuous, not asserted."
                )
                .unwrap();
                return out;
            }
            let n = p.relation.depth();
            let a = command_match(map, &p.commands[0], levels, n, false);
            let c = relation_match(map, &p.commands[1], levels, p.relation);
            write!(
                out,
                "property {id};\n    {}\n        ({a}) |->\n                not ##[1:({t} - 1)] ({c});\nendproperty;\n\nassert property({id});\n",
                clocking(map)
            )
            .unwrap();
        }
        PropertyKind::Window => {
            let w = p.window.unwrap();
            let fill = fill_signal(p);
            let sources: Vec<String> = p
                .commands
                .iter()
                .zip(&p.fill_relations)
                .map(|(c, &r)| format!("({})", relation_match(map, c, levels, r)))
                .collect();
            write!(out, "logic {fill};\nassign {fill} = {};\n\n", sources.join(" || ")).unwrap();
            if w.cycles <= 1 {
                writeln!(
                    out,
                    "// {id}: a {}-cycle window never holds two fills; vacuous, not asserted.",
                    w.cycles
                )
                .unwrap();
                return out;
            }
            let past: Vec<String> = (1..w.cycles).map(|k| format!("$past({fill}, {k})")).collect();
            let mut terms = String::new();
            for (i, chunk) in past.chunks(4).enumerate() {
                if i > 0 {
                    terms.push_str(",\n              ");
                }
                terms.push_str(&chunk.join(", "));
            }
            write!(
                out,
                "property {id};\n    {}\n        {fill} |-> ($countones({{{terms}}}) < {});\nendproperty;\n\nassert property({id});\n",
                clocking(map),
                w.max_count
            )
            .unwrap();
        }
    }
    out
}

fn place_block(topo: &Topology, place: &PlaceLogic, map: &SignalMap) -> String {
    let name = &place.name;
    if place.lifetime.is_some() {
        return format!("// {name}: timed place, tracked by its fill signal\n");
    }
    let width = bits(place.capacity);
    let levels: Vec<String> = topo
        .level_names(place.node)
        .into_iter()
        .map(String::from)
        .collect();
    let mut out = if width == 1 {
        format!("logic {name};\n\n")
    } else {
        format!("logic [{}:0] {name};\n\n", width - 1)
    };
    write!(
        out,
        "always @(posedge {}) begin\n    if ({})\n        {name} <= {};\n",
        map.clock(),
        map.reset(),
        literal(width, place.initial_tokens)
    )
    .unwrap();
    if !place.updates.is_empty() {
        out.push_str("    else begin\n");
        for (i, u) in place.updates.iter().enumerate() {
            let cond = relation_match(map, &topo.transitions[u.transition].name, &levels, u.relation);
            let value = if u.reset {
                literal(width, u.produce.min(place.capacity))
            } else if u.produce > u.consume {
                format!("{name} + {}", literal(width, u.produce - u.consume))
            } else {
                format!("{name} - {}", literal(width, u.consume - u.produce))
            };
            let kw = if i == 0 { "if" } else { "else if" };
            write!(out, "        {kw} ({cond})\n            {name} <= {value};\n").unwrap();
        }
        out.push_str("    end\n");
    }
    out.push_str("end\n");
    out
}

fn indent(text: &str, level: usize) -> String {
    let pad = "    ".repeat(level);
    let mut out = String::new();
    for line in text.lines() {
        if line.is_empty() {
            out.push('\n');
        } else {
            writeln!(out, "{pad}{line}").unwrap();
        }
    }
    out
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_lowercase() } else { '_' })
        .collect()
}

struct Emitter<'a> {
    set: &'a PropertySet,
    map: &'a SignalMap,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
}

impl Emitter<'_> {
    /// Places and properties anchored at `node`, separated by blank lines.
    fn items(&self, node: Option<usize>) -> Vec<String> {
        let topo = &self.set.topology;
        let mut items: Vec<String> = self
            .set
            .places
            .iter()
            .filter(|p| p.node == node)
            .map(|p| place_block(topo, p, self.map))
            .collect();
        items.extend(
            self.set
                .properties
                .iter()
                .filter(|p| p.anchor == node)
                .map(|p| render_property(topo, p, self.map)),
        );
        items
    }

    fn loop_block(&self, node: usize, level: usize) -> String {
        let n = &self.set.topology.nodes[node];
        let var = format!("{}_id", n.name);
        let mut body: Vec<String> = self.items(Some(node));
        for &c in &self.children[node] {
            body.push(self.loop_block(c, 0));
        }
        let mut out = format!(
            "for ({var} = 0; {var} < {}; {var}++) begin\n",
            n.count_param
        );
        out.push_str(&indent(&body.join("\n"), 1));
        out.push_str("end\n");
        indent(&out, level)
    }
}

/// Render `props` as one SystemVerilog module.
///
/// Output is a pure function of the property set and signal map.
pub fn emit_sva(props: &PropertySet, map: &SignalMap) -> String {
    let topo = &props.topology;
    let mut children = vec![Vec::new(); topo.nodes.len()];
    let mut roots = Vec::new();
    for (i, n) in topo.nodes.iter().enumerate() {
        match n.parent {
            Some(p) => children[p].push(i),
            None => roots.push(i),
        }
    }
    let em = Emitter {
        set: props,
        map,
        children,
        roots,
    };

    let module = map
        .module
        .clone()
        .unwrap_or_else(|| format!("{}_properties", sanitize(&props.model)));
    let encodings: Vec<(String, u32)> = topo
        .transitions
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let enc = map.encodings.get(&t.name).copied().unwrap_or(i as u32 + 1);
            (t.name.clone(), enc)
        })
        .collect();
    let max_enc = encodings.iter().map(|&(_, e)| e).max().unwrap_or(0);
    let cmd_width = map.command_width.unwrap_or_else(|| bits(max_enc));

    // One port per hierarchy name; the widest count wins if names repeat.
    let mut levels: Vec<(String, String, u32)> = Vec::new();
    for n in &topo.nodes {
        match levels.iter_mut().find(|(name, _, _)| *name == n.name) {
            Some(entry) => entry.2 = entry.2.max(n.count),
            None => levels.push((n.name.clone(), n.count_param.clone(), n.count)),
        }
    }

    let mut out = String::new();
    let binding: Vec<String> = props
        .config
        .params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    writeln!(out, "// Properties for {}.", props.model).unwrap();
    for chunk in binding.chunks(8) {
        writeln!(out, "// {}", chunk.join(" ")).unwrap();
    }
    writeln!(out, "module {module} (").unwrap();
    let mut ports = vec![
        format!("input logic {}", map.clock()),
        format!("input logic {}", map.reset()),
        format!("input logic [{}:0] {}", cmd_width - 1, map.command()),
    ];
    for (name, _, count) in &levels {
        ports.push(format!(
            "input logic [{}:0] {}",
            bits(count.saturating_sub(1)) - 1,
            map.coord(name)
        ));
    }
    writeln!(out, "    {}", ports.join(",\n    ")).unwrap();
    out.push_str(");\n\n");

    let mut counts: Vec<(&str, u32)> = Vec::new();
    for n in &topo.nodes {
        if !counts.iter().any(|(p, _)| *p == n.count_param) {
            counts.push((&n.count_param, n.count));
        }
    }
    for (param, count) in &counts {
        writeln!(out, "localparam int {param} = {count};").unwrap();
    }
    if !counts.is_empty() {
        out.push('\n');
    }
    for (name, enc) in &encodings {
        writeln!(
            out,
            "localparam logic [{}:0] {name} = {};",
            cmd_width - 1,
            literal(cmd_width, *enc).replace("1'b", "1'd")
        )
        .unwrap();
    }
    if !encodings.is_empty() {
        out.push('\n');
    }

    for (name, _, _) in &levels {
        writeln!(out, "genvar {name}_id;").unwrap();
    }
    if !levels.is_empty() {
        out.push('\n');
    }

    let root_items = em.items(None);
    if !root_items.is_empty() {
        out.push_str(&root_items.join("\n"));
        out.push('\n');
    }
    for &r in &em.roots {
        out.push_str("generate\n");
        out.push_str(&em.loop_block(r, 1));
        out.push_str("endgenerate\n\n");
    }
    out.push_str("endmodule\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_map_keys() {
        let map = SignalMap::parse(
            "format=1\nmodule=m\nclock=clk_i\ncommand=dfi_cmd\ncoord.bank=ba\nenc.ACT=7\n",
        )
        .unwrap();
        assert_eq!(map.clock(), "clk_i");
        assert_eq!(map.reset(), "reset");
        assert_eq!(map.coord("bank"), "ba");
        assert_eq!(map.coord("rank"), "cmd_rank");
        assert_eq!(map.encodings["ACT"], 7);
        assert!(matches!(
            SignalMap::parse("colour=red"),
            Err(SignalMapError::UnknownKey { line: 1, .. })
        ));
        assert!(matches!(
            SignalMap::parse("clock=1x"),
            Err(SignalMapError::BadValue { .. })
        ));
    }

    #[test]
    fn literals() {
        assert_eq!(bits(1), 1);
        assert_eq!(bits(4), 3);
        assert_eq!(literal(1, 0), "1'b0");
        assert_eq!(literal(3, 2), "3'd2");
    }
}
