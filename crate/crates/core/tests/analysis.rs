mod common;

use common::*;
use dramml::analysis::{slack_sweep, slack_sweep_rerun, upgrade_diff, DiffSide};
use dramml::library::bundles;
use dramml::props::derive;
use dramml::trace::{check_corpus, CommandTrace, Status};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn sweep_agrees_with_rechecking() {
    let (net, set) = ddr4_props("8bank", &[("tRFC", 60), ("tXS", 70)]);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for round in 0..4 {
        let corpus: Vec<CommandTrace> = (0..6)
            .map(|i| CommandTrace::from_commands(&format!("r{round}t{i}"), random_trace(&net, &mut rng, 600, 0.02)))
            .collect();
        let fast = slack_sweep(&set, &corpus, 12).unwrap();
        let slow = slack_sweep_rerun(&set, &corpus, 12).unwrap();
        assert_eq!(fast, slow);
        // Spot check: raising one property's timing by its k keeps it
        // holding, one more breaks it.
        for e in fast.entries.iter().filter(|e| e.k.is_some_and(|k| k < 12)) {
            let k = e.k.unwrap();
            let holds = |inc| {
                let r = check_corpus(&set.with_timing_increment(inc), &corpus).unwrap();
                r.verdicts.iter().find(|v| v.unique_id == e.unique_id).unwrap().status == Status::Holds
            };
            assert!(holds(k) && !holds(k + 1), "{}", e.unique_id);
        }
    }
}

#[test]
fn survivors_are_monotone() {
    let (_, set) = ddr4_props("16bank", &[]);
    let r = slack_sweep(&set, &refresh_corpus(&set), 30).unwrap();
    let counts: Vec<usize> = (0..=30).map(|k| r.survivors_at(k)).collect();
    assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
}

#[test]
fn refresh_corpus_shape() {
    let (_, set) = ddr4_props("16bank", &[]);
    let corpus = refresh_corpus(&set);
    let r = slack_sweep(&set, &corpus, 30).unwrap();
    let delayed: Vec<(&str, i64)> = r
        .candidates()
        .map(|e| (e.unique_id.as_str(), e.slack))
        .collect();
    let mut want = REFRESH_DELAYS.to_vec();
    want.sort();
    assert_eq!(delayed, want);
    assert!(r.entries.iter().filter(|e| !e.candidate).all(|e| e.slack == 0));
    // Gaps agree with a pairwise search over the whole corpus.
    for e in &r.entries {
        let p = set.get(&e.unique_id).unwrap();
        let gap = corpus
            .iter()
            .filter_map(|t| brute_min_gap(&set, p, &t.commands().cloned().collect::<Vec<_>>()))
            .min();
        assert_eq!(gap, Some(e.min_gap), "{}", e.unique_id);
    }
}

#[test]
fn every_diff_partitions_both_sets() {
    let all: Vec<_> = bundles()
        .iter()
        .flat_map(|b| b.configs.iter().map(move |(c, _)| derive(&b.elaborate(c).unwrap())))
        .collect();
    let drops: [&[&str]; 3] = [&[], &["REFA"], &["RDA", "WRA", "PDNE", "PDNX", "SREFE", "SREFX"]];
    for a in &all {
        for b in &all {
            for drop in drops {
                let drop: Vec<String> = drop.iter().map(|s| s.to_string()).collect();
                let d = upgrade_diff(a, b, &drop);
                assert_eq!(d.accounted(), (a.properties.len(), b.properties.len()));
                for (side, e) in &d.discarded {
                    let (set, id) = match side {
                        DiffSide::Base => (a, e.base_id.as_ref().unwrap()),
                        DiffSide::Target => (b, e.target_id.as_ref().unwrap()),
                    };
                    let p = set.get(id).unwrap();
                    assert!(p.commands.iter().any(|c| drop.contains(c) || (c == "REFAB" && drop.contains(&"REFA".to_string()))));
                }
            }
            if std::ptr::eq(a, b) {
                assert!(upgrade_diff(a, b, &[]).is_identity());
            }
        }
    }
}
