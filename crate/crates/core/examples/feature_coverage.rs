//! Find command kinds a trace corpus never exercises. A controller that
//! never issues self-refresh leaves every self-refresh property inactive.
//!
//! cargo run --example feature_coverage

use dramml::library::bundle;
use dramml::props::derive;
use dramml::trace::{check_corpus, coverage, load_trace};

const NO_POWER_SAVING: &str = "\
0 ACT 0 0 0
22 RD 0 0 0
40 WR 0 0 0
100 PRE 0 0 0
130 ACT 0 1 2
152 RDA 0 1 2
210 ACT 0 1 2
232 WRA 0 1 2
400 PREA 0
430 REFA 0
";

fn main() {
    let set = derive(&bundle("ddr4").unwrap().elaborate("16bank").unwrap());
    let corpus = [
        load_trace(NO_POWER_SAVING, &set.topology).unwrap(),
        load_trace(include_str!("../tests/data/ok.trace"), &set.topology).unwrap(),
    ];
    for n in [1, 2] {
        let c = coverage(&check_corpus(&set, &corpus[..n]).unwrap());
        println!("{n} trace(s): unexercised {:?}", c.unexercised);
    }
    let c = coverage(&check_corpus(&set, &corpus[..1]).unwrap());
    print!("\n{}", c.to_text());
}
