//! Measure timing slack. A controller that issues same-bank-group reads one
//! cycle later than allowed leaves a third of the bus idle when tCCD_L is 2.
//!
//! cargo run --example slack_sweep

use dramml::analysis::slack_sweep;
use dramml::library::bundle;
use dramml::petri::{elaborate, Command};
use dramml::props::derive;
use dramml::trace::CommandTrace;

fn main() {
    let b = bundle("ddr4").unwrap();
    let cfg = b.config("16bank").unwrap().with("tCCD_L", 2);
    let set = derive(&elaborate(&b.spec(), &cfg).unwrap());

    let topo = &set.topology;
    let mut cmds: Vec<Command> = vec![topo.command(0, "ACT", &[0, 0, 0]).unwrap()];
    let t = u64::from(cfg.get("tCCD_L").unwrap());
    for i in 0..16 {
        cmds.push(topo.command(40 + i * (t + 1), "RD", &[0, 0, 0]).unwrap());
    }
    let trace = CommandTrace::from_commands("late-reads", cmds);

    let sweep = slack_sweep(&set, &[trace], 8).unwrap();
    print!("{}", sweep.to_text());
    let e = sweep.get("timing_RD_RD_same_bankgroup").unwrap();
    println!(
        "\nRD to RD in one bank group: k = {}, bus busy {} of the time",
        e.k.unwrap(),
        e.utilization.unwrap()
    );
}
