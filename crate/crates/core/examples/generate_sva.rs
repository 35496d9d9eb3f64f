//! Derive the properties of the bundled DDR4 model and write SVA text.
//!
//! cargo run --example generate_sva [out.sv]

use dramml::library::bundle;
use dramml::props::{count_summary, derive, emit_sva, SignalMap};

fn main() {
    let ddr4 = bundle("ddr4").unwrap();
    for config in ["16bank", "8bank"] {
        let set = derive(&ddr4.elaborate(config).unwrap());
        let c = count_summary(&set);
        println!("{config}: {} unique, {} generated", c.unique, c.generated);
    }

    let set = derive(&ddr4.elaborate("16bank").unwrap());
    // Bind to a controller with its own signal names.
    let map = SignalMap::parse(
        "format=1\nmodule=mc_ddr4_checks\nclock=clk_i\nreset=rst_i\ncommand=dfi_cmd\n\
         coord.bankgroup=dfi_bg\ncoord.bank=dfi_ba\n",
    )
    .unwrap();
    let sv = emit_sva(&set, &map);

    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, &sv).unwrap();
            println!("wrote {path}");
        }
        None => {
            let p = set.get("timing_ACT_RD").unwrap();
            println!("\n{}", p.sva_text);
            println!("{} lines of SVA in total", sv.lines().count());
        }
    }
}
