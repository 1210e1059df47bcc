//! pingpong-lab: scenario runner for exact circle ping-pong dynamics.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 property violation
//! found, 3 inapplicable or inconsistent data.

mod run;
mod scenario;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use pingpong_core::classify;
use pingpong_core::moebius::MoebiusMap;
use pingpong_core::words::certify_hyperbolic_like;

use crate::run::census_threads;
use crate::scenario::{parse_scenario, Command, Scenario, VerifyModeArg};

#[derive(Parser)]
#[command(name = "pingpong-lab", version, about = "exact ping-pong dynamics for circle groups")]
struct Cli {
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Subcommand)]
enum CliCommand {
    /// Run a scenario file and write its report (and optionally SVG figures).
    Run {
        scenario: PathBuf,
        /// Output directory for the report and figures (default: stdout only).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also emit chord-diagram SVGs.
        #[arg(long)]
        svg: bool,
    },
    /// Classify the eight-point configuration of a non-commuting pair.
    ClassifyPair {
        /// Matrix a,b,c,d
        #[arg(long, value_delimiter = ',')]
        f: Vec<i64>,
        #[arg(long, value_delimiter = ',')]
        g: Vec<i64>,
    },
    /// Classify the commutator configuration of a linked stabilizer pair.
    ClassifyCommutator {
        #[arg(long, value_delimiter = ',')]
        h: Vec<i64>,
        #[arg(long, value_delimiter = ',')]
        f: Vec<i64>,
    },
    /// Census of composition configurations over seeded random pairs.
    Census {
        #[arg(long, default_value_t = 10000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Certify hyperbolic-likeness of a scenario's factors over a word ball.
    Certify {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value_t = 6)]
        radius: u64,
    },
    /// Verify the scenario's ping-pong partition.
    Verify {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "both")]
        mode: String,
        #[arg(long, default_value_t = 6)]
        radius: u64,
        #[arg(long, default_value_t = 4)]
        sample_depth: u64,
    },
}

fn load_scenario(path: &PathBuf) -> Result<Scenario, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_scenario(&text).map_err(|e| e.to_string())
}

fn matrix_arg(name: &str, entries: &[i64]) -> Result<MoebiusMap, String> {
    if entries.len() != 4 {
        return Err(format!("--{name} needs four comma-separated integers"));
    }
    MoebiusMap::new(entries[0], entries[1], entries[2], entries[3])
        .map_err(|e| format!("--{name}: {e}"))
}

fn emit<T: serde::Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, String> {
    match cli.command {
        CliCommand::Run { scenario, out, svg } => {
            let sc = load_scenario(&scenario)?;
            let outcome = run::run(&sc).map_err(|e| e.to_string())?;
            let rendered = serde_json::to_string_pretty(&outcome.report).expect("report");
            if let Some(dir) = &out {
                std::fs::create_dir_all(dir).map_err(|e| e.to_string())?;
                let report_path = dir.join(format!("{}.report.json", sc.name));
                std::fs::write(&report_path, format!("{rendered}\n")).map_err(|e| e.to_string())?;
                if svg {
                    for (i, (name, body)) in outcome.diagrams.iter().enumerate() {
                        let path = dir.join(format!("{name}.{i}.svg"));
                        std::fs::write(&path, body).map_err(|e| e.to_string())?;
                    }
                }
                println!("wrote {}", report_path.display());
            } else {
                println!("{rendered}");
            }
            Ok(outcome.exit_code as u8)
        }
        CliCommand::ClassifyPair { f, g } => {
            let fm = matrix_arg("f", &f)?;
            let gm = matrix_arg("g", &g)?;
            match classify::classify_pair(&fm, &gm) {
                Ok(pc) => {
                    emit(&pc);
                    Ok(0)
                }
                Err(e) => {
                    eprintln!("not classifiable: {e}");
                    Ok(3)
                }
            }
        }
        CliCommand::ClassifyCommutator { h, f } => {
            let hm = matrix_arg("h", &h)?;
            let fm = matrix_arg("f", &f)?;
            match classify::classify_commutator(&hm, &fm) {
                Ok(cc) => {
                    let unmatched = cc.label == classify::CommutatorLabel::Unmatched;
                    emit(&cc);
                    Ok(if unmatched { 2 } else { 0 })
                }
                Err(e) => {
                    eprintln!("not classifiable: {e}");
                    Ok(3)
                }
            }
        }
        CliCommand::Census { samples, seed } => {
            let census = classify::census_with_threads(samples, seed, census_threads());
            emit(&census);
            Ok(if census.coincidence_free_classes > 14 || census.row1_containment_failures > 0 {
                2
            } else {
                0
            })
        }
        CliCommand::Certify { scenario, radius } => {
            let sc = load_scenario(&scenario)?;
            let data = sc.moebius.as_ref().ok_or("certify needs a [moebius] section")?;
            let cert = certify_hyperbolic_like(&data.factors, &data.assignment, radius)
                .map_err(|e| e.to_string())?;
            emit(&cert);
            Ok(0)
        }
        CliCommand::Verify { scenario, mode, radius, sample_depth } => {
            let mut sc = load_scenario(&scenario)?;
            let mode = match mode.as_str() {
                "finite" => VerifyModeArg::Finite,
                "axis" => VerifyModeArg::Axis,
                "both" => VerifyModeArg::Both,
                other => return Err(format!("unknown mode `{other}`")),
            };
            // replace any verify commands with the requested one, keeping the
            // scenario's explicit arcs if present
            let (u_h, u_k) = sc
                .commands
                .iter()
                .find_map(|c| match c {
                    Command::Verify { u_h, u_k, .. } => Some((u_h.clone(), u_k.clone())),
                    _ => None,
                })
                .unwrap_or((None, None));
            sc.commands = vec![Command::Verify { mode, radius, sample_depth, u_h, u_k }];
            let outcome = run::run(&sc).map_err(|e| e.to_string())?;
            emit(&outcome.report);
            Ok(outcome.exit_code as u8)
        }
    }
}
