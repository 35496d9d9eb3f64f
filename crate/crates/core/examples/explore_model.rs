//! Check that every command of a model can fire at all.
//!
//! cargo run --release --example explore_model [model] [config]

use dramml::library::load;
use dramml::petri::explore;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let model = args.first().map_or("ddr4", String::as_str);
    let config = args.get(1).map_or("8bank", String::as_str);
    let (name, net) = load(model, config).unwrap();
    let summary = explore(&net, 2_000, 1_000_000);
    println!("{name}/{config}: {} states, complete: {}", summary.states_explored, summary.complete);
    for t in &summary.transitions {
        match t.first_cycle {
            Some(c) => println!("  {:<6} first fired at cycle {c}", t.name),
            None => println!("  {:<6} never fired", t.name),
        }
    }
}
