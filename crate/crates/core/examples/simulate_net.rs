//! Step the timed Petri net through a few commands and print the legality
//! verdict of each.
//!
//! cargo run --example simulate_net

use dramml::library::bundle;
use dramml::petri::run;

fn main() {
    let net = bundle("ddr4").unwrap().elaborate("16bank").unwrap();
    let topo = &net.topology;
    let script = [
        (0, "ACT", vec![0, 0, 0]),
        (10, "RD", vec![0, 0, 0]),
        (22, "RD", vec![0, 0, 0]),
        (40, "REFA", vec![0]),
        (60, "PRE", vec![0, 0, 0]),
        (82, "REFA", vec![0]),
    ];
    let cmds: Vec<_> = script
        .iter()
        .map(|(c, n, at)| topo.command(*c, n, at).unwrap())
        .collect();
    for (cmd, v) in cmds.iter().zip(run(&net, &cmds).unwrap()) {
        let verdict = if v.is_legal() {
            "legal".to_string()
        } else {
            let why: Vec<String> = v.violations.iter().map(|x| net.describe(x)).collect();
            why.join("; ")
        };
        println!("{:<16} {verdict}", topo.display_command(cmd).to_string());
    }
}
