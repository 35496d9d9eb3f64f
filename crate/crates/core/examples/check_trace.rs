//! Check command traces against every property of the DDR4 model.
//!
//! cargo run --example check_trace [trace] [config]

use dramml::library::bundle;
use dramml::props::derive;
use dramml::trace::{check, load_trace, Status};

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (text, config) = match args.as_slice() {
        [path, rest @ ..] => (
            std::fs::read_to_string(path).unwrap(),
            rest.first().cloned().unwrap_or_else(|| "16bank".to_string()),
        ),
        [] => (include_str!("../tests/data/bg_bug.trace").to_string(), "8bank".to_string()),
    };
    let set = derive(&bundle("ddr4").unwrap().elaborate(&config).unwrap());
    let trace = load_trace(&text, &set.topology).unwrap_or_else(|e| {
        eprintln!("{e}");
        std::process::exit(2);
    });
    let report = check(&set, &trace).unwrap();
    for v in report.violated() {
        let w = v.witness.as_ref().unwrap();
        println!("{} {}", v.unique_id, v.scope);
        println!("  line {} `{}`: {}", w.line, w.command, w.constraint);
    }
    println!(
        "{} hold, {} violated, {} not activated",
        report.count(Status::Holds),
        report.count(Status::Violated),
        report.count(Status::NotActivated)
    );
}
