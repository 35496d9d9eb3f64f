//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::time::{Duration, Instant};

use common::*;
use dramml::analysis::{slack_sweep, upgrade_diff};
use dramml::frontend::{parse, render};
use dramml::library::{bundle, bundles};
use dramml::petri::{elaborate, explore, run, Command, Config};
use dramml::props::{count_summary, derive, emit_sva, SignalMap};
use dramml::trace::{check_with_events, CommandTrace, Status};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn criterion(id: u32, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = f();
    let took = start.elapsed();
    let ok = o.ok && took <= limit;
    println!(
        "{} [{id}] {name}: {} ({:.2} s, limit {} s)",
        if ok { "PASS" } else { "FAIL" },
        o.detail,
        took.as_secs_f64(),
        limit.as_secs()
    );
    ok
}

fn secs(n: u64) -> Duration {
    Duration::from_secs(n)
}

fn template_fidelity() -> Outcome {
    let spec = parse(include_str!("data/toy.dramml")).unwrap();
    let (cfg, _) = Config::parse(include_str!("data/toy.cfg")).unwrap();
    let set = derive(&elaborate(&spec, &cfg).unwrap());
    let sv = emit_sva(&set, &SignalMap::default());
    let golden = include_str!("golden/toy.sv");
    let squash = |s: &str| s.replace(" && cmd_bank == bank_id", "").split_whitespace().collect::<Vec<_>>().join(" ");
    let shapes = [
        "genvar bank_id; generate for (bank_id = 0; bank_id < banks; bank_id++) begin",
        "logic OPEN; always @(posedge clk) begin if (reset) OPEN <= 1'b0; else begin \
         if (cmd == ACT) OPEN <= OPEN + 1'b1; else if (cmd == PRE) OPEN <= OPEN - 1'b1; \
         else if (cmd == REF) OPEN <= 1'b0; end end",
        "property arc_OPEN_PRE; @(posedge clk) disable iff (reset) (cmd == PRE) |-> (OPEN >= 1'b1); \
         endproperty; assert property(arc_OPEN_PRE);",
        "property inhibitor_OPEN_ACT; @(posedge clk) disable iff (reset) (OPEN >= 1'b1) |-> not (cmd == ACT); \
         endproperty; assert property(@(posedge clk) inhibitor_OPEN_ACT);",
        "property timing_ACT_RD; @(posedge clk) disable iff (reset) (cmd == ACT) |-> \
         not ##[1:(4 - 1)] (cmd == RD); endproperty; assert property(timing_ACT_RD);",
        "end endgenerate",
    ];
    let flat = squash(&sv);
    let missing: Vec<usize> = shapes
        .iter()
        .enumerate()
        .filter(|(_, s)| !flat.contains(&squash(s)))
        .map(|(i, _)| i)
        .collect();
    outcome(
        sv == golden && missing.is_empty(),
        format!("golden match {}, missing shapes {missing:?}", sv == golden),
    )
}

fn unique_count_invariance() -> Outcome {
    let b = bundle("ddr4").unwrap();
    let wide = count_summary(&derive(&b.elaborate("16bank").unwrap()));
    let narrow = count_summary(&derive(&b.elaborate("8bank").unwrap()));
    let same_ids = derive(&b.elaborate("16bank").unwrap())
        .properties
        .iter()
        .map(|p| &p.unique_id)
        .eq(derive(&b.elaborate("8bank").unwrap()).properties.iter().map(|p| &p.unique_id));
    outcome(
        wide.unique == narrow.unique && same_ids && narrow.generated < wide.generated,
        format!(
            "unique {} / {}, generated {} (4x4) > {} (2x4)",
            wide.unique, narrow.unique, wide.generated, narrow.generated
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    const TRACES: u64 = 10_000;
    let mut details = Vec::new();
    let mut ok = true;
    for config in ["16bank", "8bank"] {
        let (net, set) = ddr4_props(config, &[]);
        // (traces agreeing, traces all legal, commands checked)
        let (agree, legal, commands) = (0..TRACES)
            .into_par_iter()
            .map(|seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let rate = if seed % 2 == 0 { 0.0 } else { 0.03 };
                let cmds = random_trace(&net, &mut rng, 2000, rate);
                let verdicts = run(&net, &cmds).unwrap();
                let n = cmds.len() as u64;
                let all_legal = verdicts.iter().all(|v| v.is_legal());
                let (report, events) =
                    check_with_events(&set, &CommandTrace::from_commands("t", cmds)).unwrap();
                let per_command = verdicts.iter().zip(&events).all(|(v, e)| v.is_legal() == e.is_empty());
                let agrees = per_command && (report.count(Status::Violated) == 0) == all_legal;
                (u64::from(agrees), u64::from(all_legal), n)
            })
            .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
        ok &= agree == TRACES && (TRACES / 2..TRACES).contains(&legal);
        details.push(format!("{config}: {agree}/{TRACES} agree, {legal} all-legal, {commands} commands"));
    }
    outcome(ok, details.join("; "))
}

fn faw_equivalence() -> Outcome {
    const TRACES: u64 = 10_000;
    let (net, set) = ddr4_props("16bank", &[("ranks", 2)]);
    let window = u64::from(net.timing_value("tFAW").unwrap());
    let faw = set.properties.iter().position(|p| p.unique_id == "window_FAW").unwrap();
    let (agree, violating) = (0..TRACES)
        .into_par_iter()
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xFA11);
            let cmds: Vec<Command> = act_dense_trace(&net, &mut rng, 80);
            let want = window_oracle(&net, &cmds, window);
            let (report, events) = check_with_events(&set, &CommandTrace::from_commands("t", cmds)).unwrap();
            let got: Vec<bool> = events.iter().map(|e| e.contains(&faw)).collect();
            let status = report.verdicts[faw].status;
            let trace_ok = (status == Status::Violated) == want.iter().any(|&b| b);
            (u64::from(got == want && trace_ok), u64::from(status == Status::Violated))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    outcome(
        agree == TRACES && violating > 0 && violating < TRACES,
        format!("{agree}/{TRACES} agree, {violating} with a window violation"),
    )
}

fn late_reads() -> Outcome {
    let (_, set) = ddr4_props("16bank", &[("tCCD_L", 2)]);
    let topo = &set.topology;
    let mut cmds = vec![
        topo.command(0, "ACT", &[0, 0, 0]).unwrap(),
        topo.command(8, "ACT", &[0, 0, 1]).unwrap(),
    ];
    for i in 0..64u64 {
        cmds.push(topo.command(40 + 3 * i, "RD", &[0, 0, (i % 2) as u32]).unwrap());
    }
    let r = slack_sweep(&set, &[CommandTrace::from_commands("late-reads", cmds)], 8).unwrap();
    let e = r.get("timing_RD_RD_same_bankgroup").unwrap();
    let u = e.utilization.map(|u| u.to_string()).unwrap_or_default();
    outcome(
        e.k == Some(1) && e.candidate && u == "2/3",
        format!("k = {:?}, utilization {u}", e.k),
    )
}

fn sweep_shape() -> Outcome {
    let (_, set) = ddr4_props("16bank", &[]);
    let corpus = refresh_corpus(&set);
    let survivors = REFRESH_DELAYS.len();
    let k_max = REFRESH_DELAYS.iter().map(|&(_, d)| d).max().unwrap() as u32 + 1;
    let r = slack_sweep(&set, &corpus, k_max).unwrap();
    // Independent count from pairwise gaps.
    let mut brute = 0;
    let mut brute_max = 0;
    for e in &r.entries {
        let p = set.get(&e.unique_id).unwrap();
        let gap = corpus
            .iter()
            .filter_map(|t| brute_min_gap(&set, p, &t.commands().cloned().collect::<Vec<_>>()))
            .min()
            .unwrap();
        let slack = gap as i64 - i64::from(p.timing_value.unwrap());
        if slack >= 1 {
            brute += 1;
            brute_max = brute_max.max(slack);
        }
    }
    let at1 = r.survivors_at(1);
    let all = r.all_violated_at();
    outcome(
        at1 == survivors && brute == survivors && all == Some(k_max) && brute_max + 1 == i64::from(k_max),
        format!("{at1} hold at k=1 (constructed {survivors}), all violated at k={all:?} (constructed {k_max})"),
    )
}

fn upgrade_partition() -> Outcome {
    let ddr4 = derive(&bundle("ddr4").unwrap().elaborate("16bank").unwrap());
    let ddr5 = derive(&bundle("ddr5-delta").unwrap().elaborate("16bank").unwrap());
    let d = upgrade_diff(&ddr4, &ddr5, &[]);
    let wr = d.changed.iter().any(|c| c.key == "timing_WR_WR_same_bankgroup");
    let refsb = d
        .added
        .iter()
        .filter(|e| e.target_id.as_ref().is_some_and(|id| id.contains("REFSB")))
        .count();
    let partition = d.accounted() == (ddr4.properties.len(), ddr5.properties.len());
    let identity = bundles().iter().all(|b| {
        let s = derive(&b.elaborate(b.default_config).unwrap());
        let d = upgrade_diff(&s, &s, &[]);
        d.is_identity() && d.unchanged.len() == s.properties.len()
    });
    outcome(
        wr && refsb > 0 && partition && identity,
        format!(
            "{} changed (WR->WR same group: {wr}), {} added ({refsb} same-bank refresh), partition {partition}, self-diff identity {identity}",
            d.changed.len(),
            d.added.len()
        ),
    )
}

fn round_trip() -> Outcome {
    let bundled = bundles().iter().all(|b| {
        let spec = b.spec();
        parse(&render(&spec)).is_ok_and(|s| s.structurally_eq(&spec))
    });
    let random = (0..1000u64)
        .into_par_iter()
        .filter(|&seed| {
            let text = random_model_text(&mut ChaCha8Rng::seed_from_u64(seed));
            let Ok(spec) = parse(&text) else { return false };
            parse(&render(&spec)).is_ok_and(|s| s.structurally_eq(&spec))
        })
        .count();
    outcome(bundled && random == 1000, format!("bundled {bundled}, random {random}/1000"))
}

fn reachability() -> Outcome {
    let net = bundle("ddr4").unwrap().elaborate("16bank").unwrap();
    let s = explore(&net, 10_000, 2_000_000);
    let dead = s.unreachable();
    outcome(
        dead.is_empty(),
        format!("{} states, unreachable {dead:?}", s.states_explored),
    )
}

#[test]
fn acceptance() {
    let results = [
        criterion(1, "template fidelity", secs(1), template_fidelity),
        criterion(2, "unique-count invariance", secs(1), unique_count_invariance),
        criterion(3, "oracle equivalence", secs(60), oracle_equivalence),
        criterion(4, "tFAW brute-force equivalence", secs(30), faw_equivalence),
        criterion(5, "late same-group reads", secs(5), late_reads),
        criterion(6, "sweep shape", secs(5), sweep_shape),
        criterion(7, "upgrade-diff partition", secs(1), upgrade_partition),
        criterion(8, "frontend round trip", secs(10), round_trip),
        criterion(9, "reachability", secs(60), reachability),
    ];
    let failed: Vec<usize> = results
        .iter()
        .enumerate()
        .filter(|(_, ok)| !**ok)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
