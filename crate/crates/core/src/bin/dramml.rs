//! Command-line front end. Exit status: 0 success, 1 violations (or
//! unreachable transitions) found, 2 usage, input or parse errors.

use std::fs;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dramml::analysis::{slack_sweep, slack_sweep_rerun, upgrade_diff};
use dramml::frontend;
use dramml::library::{load, load_model};
use dramml::petri::explore;
use dramml::props::{count_summary, derive, emit_sva, PropertySet, SignalMap};
use dramml::trace::{check_corpus, coverage, load_trace, CommandTrace, Status};

#[derive(Parser)]
#[command(name = "dramml", version, about = "DRAM protocol models, assertions and trace checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Target {
    /// Bundled model name or path to a .dramml file
    #[arg(long, default_value = "ddr4")]
    model: String,
    /// Bundled config or preset name, or path to a .cfg file
    #[arg(long, default_value = "16bank")]
    config: String,
}

#[derive(Args)]
struct Report {
    /// Also write PREFIX.json and PREFIX.txt
    #[arg(long, value_name = "PREFIX")]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a model
    Parse {
        model: String,
        /// Print the model in canonical form
        #[arg(long)]
        render: bool,
        #[command(flatten)]
        report: Report,
    },
    /// Generate SystemVerilog assertions
    GenSva {
        #[command(flatten)]
        target: Target,
        /// Signal-name mapping file
        #[arg(long)]
        signals: Option<PathBuf>,
        /// Output file or directory; `-` for stdout
        #[arg(long, short, default_value = ".")]
        out: PathBuf,
    },
    /// Check traces against every property
    Check {
        #[command(flatten)]
        target: Target,
        #[arg(long = "trace", required = true)]
        traces: Vec<PathBuf>,
        #[command(flatten)]
        report: Report,
    },
    /// List command kinds a trace corpus never exercises
    Coverage {
        #[command(flatten)]
        target: Target,
        #[arg(long = "trace", required = true)]
        traces: Vec<PathBuf>,
        #[command(flatten)]
        report: Report,
    },
    /// Timing slack per property
    Sweep {
        #[command(flatten)]
        target: Target,
        #[arg(long = "trace", required = true)]
        traces: Vec<PathBuf>,
        #[arg(long, default_value_t = 32)]
        k_max: u32,
        /// Re-check the corpus once per increment instead of using the slack
        #[arg(long)]
        rerun: bool,
        #[command(flatten)]
        report: Report,
    },
    /// Compare the properties of two models
    Diff {
        #[arg(long)]
        base: String,
        #[arg(long)]
        target: String,
        #[arg(long, default_value = "16bank")]
        base_config: String,
        #[arg(long, default_value = "16bank")]
        target_config: String,
        /// Comma-separated command kinds the controller does not support
        #[arg(long, value_delimiter = ',')]
        drop: Vec<String>,
        #[command(flatten)]
        report: Report,
    },
    /// Bounded search for fireable transitions
    Explore {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value_t = 2_000_000)]
        max_states: usize,
        #[command(flatten)]
        report: Report,
    },
}

type Result<T> = std::result::Result<T, String>;

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    format: u32,
    command: &'a str,
    tool: String,
    result: &'a T,
}

fn emit<T: Serialize>(report: &Report, command: &str, text: &str, value: &T) -> Result<()> {
    print!("{text}");
    let Some(prefix) = &report.report else {
        return Ok(());
    };
    let doc = Document {
        format: 1,
        command,
        tool: format!("dramml {}", env!("CARGO_PKG_VERSION")),
        result: value,
    };
    let json = serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())? + "\n";
    let write = |ext: &str, body: &str| {
        let path = prefix.with_extension(ext);
        fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display()))
    };
    write("json", &json)?;
    write("txt", text)
}

fn paint(text: &str, code: &str) -> String {
    let plain = std::env::var_os("NO_COLOR").is_some_and(|v| !v.is_empty())
        || !std::io::stdout().is_terminal();
    if plain {
        text.to_string()
    } else {
        format!("\x1b[{code}m{text}\x1b[0m")
    }
}

fn properties(target: &Target) -> Result<PropertySet> {
    let (_, net) = load(&target.model, &target.config).map_err(|e| e.to_string())?;
    Ok(derive(&net))
}

fn traces(set: &PropertySet, paths: &[PathBuf]) -> Result<Vec<CommandTrace>> {
    paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            let mut t = load_trace(&text, &set.topology).map_err(|e| format!("{}: {e}", p.display()))?;
            t.name = p.display().to_string();
            Ok(t)
        })
        .collect()
}

fn stem(name: &str) -> String {
    Path::new(name)
        .file_stem()
        .map_or_else(|| name.to_string(), |s| s.to_string_lossy().into_owned())
}

#[derive(Serialize)]
struct ParseSummary {
    model: String,
    standard: String,
    hierarchies: Vec<String>,
    places: usize,
    transitions: usize,
    arcs: usize,
    timing_params: usize,
}

fn hierarchy_paths(levels: &[frontend::HierarchyDecl], prefix: &str) -> Vec<String> {
    let mut out = Vec::new();
    for h in levels {
        let path = format!("{prefix}{}", h.name);
        out.push(path.clone());
        out.extend(hierarchy_paths(&h.children, &format!("{path}/")));
    }
    out
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Cmd::Parse {
            model,
            render,
            report,
        } => {
            let (name, spec) = load_model(&model).map_err(|e| e.to_string())?;
            if render {
                print!("{}", frontend::render(&spec));
                return Ok(true);
            }
            let summary = ParseSummary {
                model: name,
                standard: spec.standard_name.clone(),
                hierarchies: hierarchy_paths(&spec.hierarchies, ""),
                places: spec.places.len(),
                transitions: spec.transitions.len(),
                arcs: spec.arcs.len(),
                timing_params: spec.timing_params.len(),
            };
            let text = format!(
                "{} ({}): {} places, {} transitions, {} arcs, {} timing parameters\nhierarchies: {}\n",
                summary.model,
                summary.standard,
                summary.places,
                summary.transitions,
                summary.arcs,
                summary.timing_params,
                summary.hierarchies.join(", ")
            );
            emit(&report, "parse", &text, &summary)?;
            Ok(true)
        }
        Cmd::GenSva {
            target,
            signals,
            out,
        } => {
            let set = properties(&target)?;
            let map = match &signals {
                Some(p) => {
                    let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                    SignalMap::parse(&text).map_err(|e| format!("{}: {e}", p.display()))?
                }
                None => SignalMap::default(),
            };
            let sv = emit_sva(&set, &map);
            if out.as_os_str() == "-" {
                print!("{sv}");
                return Ok(true);
            }
            let path = if out.is_dir() {
                let (name, _) = load_model(&target.model).map_err(|e| e.to_string())?;
                out.join(format!("{}_{}.sv", stem(&name), stem(&target.config)))
            } else {
                out
            };
            fs::write(&path, sv).map_err(|e| format!("{}: {e}", path.display()))?;
            let c = count_summary(&set);
            println!("{}: {} unique, {} generated properties", path.display(), c.unique, c.generated);
            Ok(true)
        }
        Cmd::Check {
            target,
            traces: paths,
            report,
        } => {
            let set = properties(&target)?;
            let r = check_corpus(&set, &traces(&set, &paths)?).map_err(|e| e.to_string())?;
            let violated = r.count(Status::Violated);
            let mut text = r.to_text();
            if violated > 0 {
                text = text.replace(
                    &format!("{violated} violated"),
                    &paint(&format!("{violated} violated"), "31"),
                );
            }
            emit(&report, "check", &text, &r)?;
            Ok(violated == 0)
        }
        Cmd::Coverage {
            target,
            traces: paths,
            report,
        } => {
            let set = properties(&target)?;
            let r = check_corpus(&set, &traces(&set, &paths)?).map_err(|e| e.to_string())?;
            let c = coverage(&r);
            emit(&report, "coverage", &c.to_text(), &c)?;
            Ok(true)
        }
        Cmd::Sweep {
            target,
            traces: paths,
            k_max,
            rerun,
            report,
        } => {
            let set = properties(&target)?;
            let corpus = traces(&set, &paths)?;
            let r = if rerun {
                slack_sweep_rerun(&set, &corpus, k_max)
            } else {
                slack_sweep(&set, &corpus, k_max)
            }
            .map_err(|e| e.to_string())?;
            emit(&report, "sweep", &r.to_text(), &r)?;
            Ok(true)
        }
        Cmd::Diff {
            base,
            target,
            base_config,
            target_config,
            drop,
            report,
        } => {
            let a = properties(&Target {
                model: base,
                config: base_config,
            })?;
            let b = properties(&Target {
                model: target,
                config: target_config,
            })?;
            let d = upgrade_diff(&a, &b, &drop);
            emit(&report, "diff", &d.to_text(), &d)?;
            Ok(true)
        }
        Cmd::Explore {
            target,
            horizon,
            max_states,
            report,
        } => {
            let (_, net) = load(&target.model, &target.config).map_err(|e| e.to_string())?;
            let s = explore(&net, horizon, max_states);
            let mut text = format!(
                "horizon {horizon} cycles, {} states{}\n",
                s.states_explored,
                if s.complete { "" } else { " (state bound reached)" }
            );
            for t in &s.transitions {
                let at = t.first_cycle.map_or("never".to_string(), |c| format!("cycle {c}"));
                text.push_str(&format!("{:<8} {}\n", t.name, at));
            }
            let dead = s.unreachable();
            if !dead.is_empty() {
                text.push_str(&paint(&format!("not fireable: {}", dead.join(", ")), "31"));
                text.push('\n');
            }
            emit(&report, "explore", &text, &s)?;
            Ok(dead.is_empty())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
