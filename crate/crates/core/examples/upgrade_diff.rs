//! What changes when a DDR4 controller moves to DDR5, for a controller that
//! does not implement auto-precharge, power-down or self-refresh.
//!
//! cargo run --example upgrade_diff

use dramml::analysis::upgrade_diff;
use dramml::library::bundle;
use dramml::props::derive;

fn main() {
    let ddr4 = derive(&bundle("ddr4").unwrap().elaborate("16bank").unwrap());
    let ddr5 = derive(&bundle("ddr5-delta").unwrap().elaborate("16bank").unwrap());
    let unsupported: Vec<String> = ["RDA", "WRA", "PDNE", "PDNX", "SREFE", "SREFX"]
        .map(String::from)
        .to_vec();
    let diff = upgrade_diff(&ddr4, &ddr5, &unsupported);
    print!("{}", diff.to_text());
    let (base, target) = diff.accounted();
    println!("\naccounted: {base} of {} base, {target} of {} target", ddr4.properties.len(), ddr5.properties.len());
}
