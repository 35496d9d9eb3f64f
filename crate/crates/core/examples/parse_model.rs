//! Parse a DRAMml model, print what it declares and show a diagnostic.
//!
//! cargo run --example parse_model [path/to/model.dramml]

use dramml::frontend::{parse, render};
use dramml::library::load_model;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ddr4".to_string());
    let (name, spec) = load_model(&name).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2);
    });
    println!("{name}: standard {}", spec.standard_name);
    println!(
        "  {} places, {} transitions, {} arcs, {} timing parameters",
        spec.places.len(),
        spec.transitions.len(),
        spec.arcs.len(),
        spec.timing_params.len()
    );
    for p in &spec.places {
        let owner = if p.owner.is_empty() { "top".to_string() } else { p.owner.join("/") };
        println!("  place {:<8} in {owner}, capacity {}", p.name, p.capacity);
    }

    // Rendering gives canonical text that parses back to the same net.
    let again = parse(&render(&spec)).unwrap();
    assert!(again.structurally_eq(&spec));
    println!("round trip ok");

    let broken = "standard X;\nPlaces { P; }\nTransitions { T; }\nArcs { P -> U; }\n";
    match parse(broken) {
        Ok(_) => unreachable!(),
        Err(e) => println!("diagnostic for a broken model:\n  {e}"),
    }
}
