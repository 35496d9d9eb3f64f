use super::*;
use crate::frontend::{parse, ScopeQualifier};
use crate::library::bundle;

fn ddr4(bankgroups: u32, overrides: &[(&str, u32)]) -> ElaboratedNet {
    let b = bundle("ddr4").unwrap();
    let mut cfg = b.config("16bank").unwrap().with("bankgroups", bankgroups);
    for &(k, v) in overrides {
        cfg.set(k, v);
    }
    elaborate(&b.spec(), &cfg).unwrap()
}

fn cmd(net: &ElaboratedNet, cycle: u64, name: &str, coords: &[u32]) -> Command {
    net.topology.command(cycle, name, coords).unwrap()
}

fn active(net: &ElaboratedNet) -> usize {
    net.spec.places.iter().position(|p| p.name == "ACTIVE").unwrap()
}

fn legal(net: &ElaboratedNet, trace: &[Command]) -> Vec<bool> {
    run(net, trace).unwrap().iter().map(|v| v.is_legal()).collect()
}

#[test]
fn bank_scopes_follow_counts() {
    assert_eq!(ddr4(4, &[]).leaf_scopes().len(), 16);
    assert_eq!(ddr4(2, &[]).leaf_scopes().len(), 8);
    assert_eq!(ddr4(2, &[]).leaf_scopes()[5], vec![0, 1, 1]);
}

#[test]
fn singleton_expansion_keeps_one_arc_per_declaration() {
    let b = bundle("ddr4").unwrap();
    let cfg = b
        .config("16bank")
        .unwrap()
        .with("bankgroups", 1)
        .with("banks", 1);
    let net = elaborate(&b.spec(), &cfg).unwrap();
    let mut per_decl = vec![0usize; net.spec.arcs.len()];
    for a in &net.arcs {
        let d = match *a {
            ExpandedArc::Place { decl, .. } | ExpandedArc::Timing { decl, .. } => decl,
        };
        per_decl[d] += 1;
    }
    for (arc, n) in net.spec.arcs.iter().zip(per_decl) {
        let expected = usize::from(arc.scope.qualifier != ScopeQualifier::SiblingInstance);
        assert_eq!(n, expected, "{arc:?}");
    }
}

#[test]
fn elaboration_errors() {
    let spec = parse("standard X; Timings { t; } n : lvl { Transitions { A; } Arcs { A -<> A (t); } }")
        .unwrap();
    let e = |cfg: Config| elaborate(&spec, &cfg).unwrap_err();
    assert_eq!(e(Config::new("X")), ElaborateError::UnboundCount("n".into()));
    assert_eq!(e(Config::new("X").with("n", 0)), ElaborateError::ZeroCount("n".into()));
    assert_eq!(e(Config::new("X").with("n", 2)), ElaborateError::UnboundTiming("t".into()));
    assert!(elaborate(&spec, &Config::new("X").with("n", 2).with("t", 3)).is_ok());
}

#[test]
fn read_needs_open_row() {
    let net = ddr4(4, &[]);
    let trace = [cmd(&net, 0, "ACT", &[0, 0, 0]), cmd(&net, 22, "RD", &[0, 0, 0])];
    assert_eq!(legal(&net, &trace), [true, true]);

    let verdicts = run(&net, &[cmd(&net, 0, "RD", &[0, 0, 0])]).unwrap();
    assert!(matches!(verdicts[0].violations[..], [Violation::MissingToken { .. }]));
}

#[test]
fn refresh_blocked_by_open_bank() {
    let net = ddr4(4, &[]);
    let trace = [cmd(&net, 0, "ACT", &[0, 2, 1]), cmd(&net, 100, "REFA", &[0])];
    let verdicts = run(&net, &trace).unwrap();
    let place = net.place_instance(active(&net), &[0, 2, 1]);
    assert!(verdicts[1]
        .violations
        .iter()
        .any(|v| matches!(v, Violation::Inhibited { place: p, .. } if *p == place)));
}

#[test]
fn timing_window_boundary() {
    let net = ddr4(4, &[("tRCD", 5)]);
    let at = |c| legal(&net, &[cmd(&net, 0, "ACT", &[0, 0, 0]), cmd(&net, c, "RD", &[0, 0, 0])]);
    assert_eq!(at(4), [true, false]);
    assert_eq!(at(5), [true, true]);
}

/// At most four ACTs per rank in any `window`-cycle span.
fn window_oracle(acts: &[u64], window: u64) -> Vec<bool> {
    acts.iter()
        .enumerate()
        .map(|(i, &c)| acts[..i].iter().filter(|&&s| c - s < window).count() < 4)
        .collect()
}

#[test]
fn four_activate_window() {
    let relaxed = [("tFAW", 20), ("tRRD_S", 1), ("tRRD_L", 1)];
    let net = ddr4(4, &relaxed);
    let banks = [[0, 0, 0], [0, 1, 0], [0, 2, 0], [0, 3, 0], [0, 0, 1]];
    for (fifth, ok) in [(10u64, false), (20, true)] {
        let cycles = [0, 1, 2, 3, fifth];
        let trace: Vec<Command> = cycles
            .iter()
            .zip(&banks)
            .map(|(&c, b)| cmd(&net, c, "ACT", b))
            .collect();
        let verdicts = run(&net, &trace).unwrap();
        assert_eq!(verdicts[4].is_legal(), ok);
        if !ok {
            assert!(matches!(verdicts[4].violations[..], [Violation::WindowFull { .. }]));
        }
        let got: Vec<bool> = verdicts.iter().map(|v| v.is_legal()).collect();
        assert_eq!(got, window_oracle(&cycles, 20));
    }
}

#[test]
fn run_edges() {
    let net = ddr4(4, &[]);
    assert!(run(&net, &[]).unwrap().is_empty());
    let trace = [
        cmd(&net, 0, "ACT", &[0, 1, 2]),
        cmd(&net, 22, "RD", &[0, 1, 2]),
        cmd(&net, 52, "PRE", &[0, 1, 2]),
        cmd(&net, 74, "ACT", &[0, 1, 2]),
    ];
    assert_eq!(legal(&net, &trace), [true; 4]);
    let backwards = [cmd(&net, 5, "PRE", &[0, 0, 0]), cmd(&net, 5, "PRE", &[0, 0, 1])];
    assert_eq!(
        run(&net, &backwards),
        Err(StepError::NotMonotone { cycle: 5, previous: 5 })
    );
}

#[test]
fn idle_precharge_is_legal_noop() {
    let net = ddr4(4, &[]);
    let mut s = MarkingState::initial(&net);
    let before = s.tokens.clone();
    assert!(s.step(&net, &cmd(&net, 0, "PRE", &[0, 0, 0])).unwrap().is_legal());
    assert_eq!(s.tokens, before);
}

#[test]
fn token_accounting() {
    let net = ddr4(4, &[]);
    let bank = net.place_instance(active(&net), &[0, 0, 0]);
    let mut s = MarkingState::initial(&net);
    s.step(&net, &cmd(&net, 0, "ACT", &[0, 0, 0])).unwrap();
    assert_eq!(s.token_count(bank), 1);
    // RD is a self-loop on ACTIVE.
    s.step(&net, &cmd(&net, 30, "RD", &[0, 0, 0])).unwrap();
    assert_eq!(s.token_count(bank), 1);
    s.step(&net, &cmd(&net, 60, "ACT", &[0, 1, 0])).unwrap();
    s.step(&net, &cmd(&net, 200, "PREA", &[0])).unwrap();
    assert!((0..net.places.len())
        .filter(|&p| net.places[p].place == active(&net))
        .all(|p| s.token_count(p) == 0));
    // Re-opening an open bank saturates at capacity instead of overflowing.
    s.step(&net, &cmd(&net, 300, "ACT", &[0, 0, 0])).unwrap();
    let v = s.step(&net, &cmd(&net, 301, "ACT", &[0, 0, 0])).unwrap();
    assert!(!v.is_legal());
    assert_eq!(s.token_count(bank), 1);
}

#[test]
fn deterministic() {
    let net = ddr4(2, &[]);
    let trace: Vec<Command> = (0..50)
        .map(|i| cmd(&net, i * 3, ["ACT", "RD", "PRE"][(i % 3) as usize], &[0, (i % 2) as u32, 1]))
        .collect();
    assert_eq!(run(&net, &trace), run(&net, &trace));
}

#[test]
fn explore_horizon_zero_reports_initially_enabled() {
    let net = ddr4(2, &[]);
    let summary = explore(&net, 0, 100_000);
    let reach = |n: &str| summary.transitions.iter().find(|t| t.name == n).unwrap().reachable;
    for t in ["ACT", "PRE", "PREA", "REFA", "PDNE", "SREFE"] {
        assert!(reach(t), "{t}");
    }
    for t in ["RD", "WR", "RDA", "WRA", "PDNX", "SREFX"] {
        assert!(!reach(t), "{t}");
    }
}

#[test]
fn explore_finds_dead_transition() {
    let spec = parse("standard X; Places { EMPTY; } Transitions { T; U; } Arcs { EMPTY -> T; }").unwrap();
    let net = elaborate(&spec, &Config::new("X")).unwrap();
    let summary = explore(&net, 50, 1000);
    assert_eq!(summary.unreachable(), ["T"]);
    assert!(summary.complete);
}

#[test]
fn explore_reports_truncation() {
    let net = ddr4(4, &[]);
    let summary = explore(&net, 10_000, 10);
    assert!(!summary.complete);
    assert!(summary.states_explored <= 10);
}

#[test]
fn explore_reaches_every_ddr4_command() {
    let net = ddr4(2, &[]);
    let summary = explore(&net, 1_000, 1_000_000);
    assert!(summary.unreachable().is_empty(), "{:?}", summary.unreachable());
    let first = |n: &str| summary.transitions.iter().find(|t| t.name == n).unwrap().first_cycle;
    assert_eq!(first("RD"), Some(22));
}
