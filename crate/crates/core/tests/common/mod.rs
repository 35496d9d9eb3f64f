//! Shared helpers for the integration tests: trace generators, brute-force
//! oracles and a hand-built trace corpus.
#![allow(dead_code)]

use dramml::frontend::ScopeQualifier;
use dramml::library::bundle;
use dramml::petri::{elaborate, Command, Config, ElaboratedNet, MarkingState};
use dramml::props::{derive, Property, PropertySet};
use dramml::trace::{load_trace, CommandTrace};
use rand::Rng;

pub const DDR4_LEVELS: [&str; 3] = ["rank", "bankgroup", "bank"];

pub fn ddr4_config(name: &str, overrides: &[(&str, u32)]) -> Config {
    let mut cfg = bundle("ddr4").unwrap().config(name).unwrap();
    for &(k, v) in overrides {
        cfg.set(k, v);
    }
    cfg
}

pub fn ddr4_net(name: &str, overrides: &[(&str, u32)]) -> ElaboratedNet {
    elaborate(&bundle("ddr4").unwrap().spec(), &ddr4_config(name, overrides)).unwrap()
}

pub fn ddr4_props(name: &str, overrides: &[(&str, u32)]) -> (ElaboratedNet, PropertySet) {
    let net = ddr4_net(name, overrides);
    let set = derive(&net);
    (net, set)
}

fn random_command(net: &ElaboratedNet, rng: &mut impl Rng, cycle: u64, kinds: &[usize]) -> Command {
    let topo = &net.topology;
    let kind = kinds[rng.gen_range(0..kinds.len())];
    let coords = topo
        .counts(topo.transitions[kind].node)
        .iter()
        .map(|&n| rng.gen_range(0..n))
        .collect();
    Command { cycle, kind, coords }
}

fn gap(rng: &mut impl Rng) -> u64 {
    match rng.gen_range(0..100) {
        0..=69 => rng.gen_range(1..=12),
        70..=94 => rng.gen_range(13..=80),
        _ => rng.gen_range(81..=700),
    }
}

/// A trace of at most `max_cycle` cycles. With `illegal_rate` 0 every
/// command is legal; otherwise each command is drawn without regard to
/// legality with that probability.
pub fn random_trace(net: &ElaboratedNet, rng: &mut impl Rng, max_cycle: u64, illegal_rate: f64) -> Vec<Command> {
    let all: Vec<usize> = (0..net.topology.transitions.len()).collect();
    let mut state = MarkingState::initial(net);
    let mut out = Vec::new();
    let mut cycle = 0;
    loop {
        cycle += if out.is_empty() { rng.gen_range(0..4) } else { gap(rng) };
        if cycle > max_cycle {
            break;
        }
        let cmd = if rng.gen_bool(illegal_rate) {
            Some(random_command(net, rng, cycle, &all))
        } else {
            (0..30)
                .map(|_| random_command(net, rng, cycle, &all))
                .find(|c| state.check(net, c).unwrap().is_empty())
        };
        if let Some(cmd) = cmd {
            state.step(net, &cmd).unwrap();
            out.push(cmd);
        }
    }
    out
}

/// ACT-heavy traces with short gaps, legality ignored.
pub fn act_dense_trace(net: &ElaboratedNet, rng: &mut impl Rng, len: usize) -> Vec<Command> {
    let act = net.topology.transition_index("ACT").unwrap();
    let pre = net.topology.transition_index("PRE").unwrap();
    let mut cycle = 0;
    (0..len)
        .map(|_| {
            cycle += rng.gen_range(1..=9);
            let kind = if rng.gen_bool(0.8) { act } else { pre };
            random_command(net, rng, cycle, &[kind])
        })
        .collect()
}

/// Whether a command at `b` is related to an earlier one at `a` under the
/// scope of a timing property, worked out from the scope text alone.
pub fn related(p: &Property, a: &[u32], b: &[u32]) -> bool {
    let shared = a.len().min(b.len());
    let level = p
        .scope
        .level
        .as_ref()
        .map(|l| DDR4_LEVELS.iter().position(|x| x == l).unwrap() + 1);
    let eq = |n: usize| a[..n] == b[..n];
    match p.scope.qualifier {
        ScopeQualifier::SameInstance => eq(level.unwrap_or(shared)),
        ScopeQualifier::SiblingInstance => {
            let n = level.unwrap_or(shared);
            eq(n - 1) && a[n - 1] != b[n - 1]
        }
        ScopeQualifier::AllInstances => eq(level.map_or(shared, |n| n - 1)),
    }
}

/// Smallest distance between any related pair of the property's two
/// commands, by checking every pair.
pub fn brute_min_gap(set: &PropertySet, p: &Property, cmds: &[Command]) -> Option<u64> {
    let topo = &set.topology;
    let a = topo.transition_index(&p.commands[0]).unwrap();
    let c = topo.transition_index(&p.commands[1]).unwrap();
    let mut best: Option<u64> = None;
    for (j, y) in cmds.iter().enumerate() {
        if y.kind != c {
            continue;
        }
        for x in &cmds[..j] {
            if x.kind == a && related(p, &x.coords, &y.coords) {
                let g = y.cycle - x.cycle;
                best = Some(best.map_or(g, |b| b.min(g)));
            }
        }
    }
    best
}

/// Per command: whether it is the fifth ACT of a rank within `window` cycles.
pub fn window_oracle(net: &ElaboratedNet, cmds: &[Command], window: u64) -> Vec<bool> {
    let act = net.topology.transition_index("ACT").unwrap();
    cmds.iter()
        .enumerate()
        .map(|(i, c)| {
            c.kind == act
                && cmds[..i]
                    .iter()
                    .filter(|s| s.kind == act && s.coords[0] == c.coords[0] && c.cycle - s.cycle < window)
                    .count()
                    >= 4
        })
        .collect()
}

/// Legal DDR4 scenarios, one per trace, for the 16-bank preset. Ordinary
/// commands are issued as early as the timings allow; PREA and REFA are
/// issued late by a fixed number of cycles, so exactly nine refresh timings
/// show slack, the largest being 21 cycles.
pub const REFRESH_DELAY_CORPUS: &[(&str, &str)] = &[
    ("read", "0 ACT 0 0 0\n22 RD 0 0 0\n52 PRE 0 0 0\n74 ACT 0 0 0"),
    ("read-close", "0 ACT 0 0 0\n40 RD 0 0 0\n52 PRE 0 0 0"),
    ("write", "0 ACT 0 0 0\n22 WR 0 0 0\n66 PRE 0 0 0"),
    ("read-ap", "0 ACT 0 0 0\n22 RDA 0 0 0"),
    ("read-ap-reopen", "0 ACT 0 0 0\n40 RDA 0 0 0\n74 ACT 0 0 0"),
    ("write-ap-reopen", "0 ACT 0 0 0\n22 WRA 0 0 0\n88 ACT 0 0 0"),
    ("activates", "0 ACT 0 0 0\n8 ACT 0 0 1\n12 ACT 0 1 0"),
    ("refresh", "0 ACT 0 0 0\n55 PREA 0\n82 REFA 0\n663 REFA 0\n1223 ACT 0 0 0"),
    ("prea-act", "0 PREA 0\n22 ACT 0 0 0"),
    ("pre-refresh", "0 ACT 0 0 0\n52 PRE 0 0 0\n81 REFA 0"),
    ("rda-refresh", "0 ACT 0 0 0\n40 RDA 0 0 0\n83 REFA 0"),
    ("wra-refresh", "0 ACT 0 0 0\n22 WRA 0 0 0\n99 REFA 0"),
    ("rd-prea", "0 ACT 0 0 0\n45 RD 0 0 0\n70 PREA 0"),
    ("wr-prea", "0 ACT 0 0 0\n22 WR 0 0 0\n81 PREA 0"),
    ("self-refresh", "0 SREFE 0\n9 SREFX 0\n602 REFA 0"),
];

/// Refresh timings the corpus delays, with the delay.
pub const REFRESH_DELAYS: &[(&str, i64)] = &[
    ("timing_ACT_PREA", 3),
    ("timing_PREA_REFA", 5),
    ("timing_PRE_REFA", 7),
    ("timing_RDA_REFA", 9),
    ("timing_WRA_REFA", 11),
    ("timing_RD_PREA", 13),
    ("timing_WR_PREA", 15),
    ("timing_SREFX_REFA", 17),
    ("timing_REFA_REFA", 21),
];

pub fn refresh_corpus(set: &PropertySet) -> Vec<CommandTrace> {
    REFRESH_DELAY_CORPUS
        .iter()
        .map(|(name, text)| {
            let mut t = load_trace(text, &set.topology).unwrap();
            t.name = name.to_string();
            t
        })
        .collect()
}

/// A random DRAMml document that is valid by construction: a chain of up to
/// three hierarchies, places and transitions at every depth, and arcs of
/// every kind with random scopes.
pub fn random_model_text(rng: &mut impl Rng) -> String {
    use std::collections::{BTreeMap, BTreeSet};
    use std::fmt::Write;

    let depth = rng.gen_range(0..=3);
    let timings: Vec<String> = (0..rng.gen_range(1..=4)).map(|i| format!("t{i}")).collect();
    // (name, owner depth, timed)
    let mut places: Vec<(String, usize, bool)> = Vec::new();
    let mut transitions: Vec<(String, usize)> = Vec::new();
    let mut body: Vec<String> = vec![String::new(); depth + 1];
    for (d, text) in body.iter_mut().enumerate() {
        let np = rng.gen_range(0..=2);
        if np > 0 {
            text.push_str("Places {\n");
            for i in 0..np {
                let name = format!("P{d}{i}");
                let timed = rng.gen_bool(0.25);
                let mut decl = name.clone();
                let cap = rng.gen_range(1..=4);
                if cap > 1 || rng.gen_bool(0.3) {
                    write!(decl, " capacity({cap})").unwrap();
                }
                if timed {
                    write!(decl, " lifetime({})", timings[rng.gen_range(0..timings.len())]).unwrap();
                } else if rng.gen_bool(0.3) {
                    write!(decl, " init({})", rng.gen_range(0..=cap)).unwrap();
                }
                writeln!(text, "    {decl};").unwrap();
                places.push((name, d, timed));
            }
            text.push_str("}\n");
        }
        let nt = rng.gen_range(usize::from(d == depth)..=3);
        if nt > 0 {
            text.push_str("Transitions {\n");
            for i in 0..nt {
                let name = format!("T{d}{i}");
                writeln!(text, "    {name};").unwrap();
                transitions.push((name, d));
            }
            text.push_str("}\n");
        }
    }

    let mut arcs = String::new();
    let mut seen = BTreeSet::new();
    let mut pair_scope: BTreeMap<(String, String), String> = BTreeMap::new();
    let scope = |rng: &mut dyn rand::RngCore, shared: usize| -> String {
        let pick = rng.gen_range(0..4u8);
        if pick == 0 {
            return String::new();
        }
        let level = if shared > 0 && rng.gen_bool(0.6) {
            Some(rng.gen_range(0..shared))
        } else {
            None
        };
        let q = match pick {
            1 => "same",
            2 if shared > 0 => "sibling",
            _ => "all",
        };
        match level {
            None if q == "same" => String::new(),
            Some(l) => format!(" @{q}(L{l})"),
            None => format!(" @{q}"),
        }
    };
    for _ in 0..rng.gen_range(0..=12) {
        let (t, td) = transitions[rng.gen_range(0..transitions.len())].clone();
        let kind = rng.gen_range(0..5u8);
        let (line, key) = if kind == 4 || places.is_empty() {
            let (u, ud) = transitions[rng.gen_range(0..transitions.len())].clone();
            let param = &timings[rng.gen_range(0..timings.len())];
            let s = scope(rng, td.min(ud));
            (format!("{t} -<> {u} ({param}){s}"), format!("{t} -<> {u}{s}"))
        } else {
            let (p, pd, timed) = places[rng.gen_range(0..places.len())].clone();
            let kind = if timed { 0 } else { kind };
            let s = if kind == 3 { scope(rng, td.min(pd)) } else { String::new() };
            let prev = pair_scope.entry((p.clone(), t.clone())).or_insert_with(|| s.clone());
            if *prev != s {
                continue;
            }
            let line = match kind {
                0 => format!("{t} -> {p}"),
                1 => format!("{p} -> {t}"),
                2 => format!("{p} -o {t}"),
                _ => format!("{p} ->> {t}{s}"),
            };
            (line.clone(), line)
        };
        if seen.insert(key) {
            writeln!(arcs, "    {line};").unwrap();
        }
    }

    let mut out = String::from("standard R;\n");
    writeln!(out, "Timings {{ {} }}", timings.iter().map(|t| format!("{t};")).collect::<Vec<_>>().join(" ")).unwrap();
    let mut tail = String::new();
    for d in (0..=depth).rev() {
        let inner = std::mem::take(&mut tail);
        let content = format!("{}{}", body[d], inner);
        tail = if d == 0 {
            content
        } else {
            format!("n{} : L{} {{\n{content}}}\n", d - 1, d - 1)
        };
    }
    out.push_str(&tail);
    if !arcs.is_empty() {
        writeln!(out, "Arcs {{\n{arcs}}}").unwrap();
    }
    out
}
