//! Executes a scenario's command list and assembles the machine-readable
//! report. Counterexample findings (unmatched commutator classes, same-orbit
//! non-geometric data, verification mode disagreement) are surfaced at the
//! top level.

use serde::Serialize;
use serde_json::json;

use pingpong_core::classify::{self, CommutatorLabel};
use pingpong_core::model::north_south_audit;
use pingpong_core::pingpong::{
    self, free_product_certificate, model_partition_arcsets, verify_axis, verify_finite,
    HlEvidence, Partition, PingPongAction, VerifyReport, VerifyStatus,
};
use pingpong_core::words::{certify_hyperbolic_like, HlCertificate, HlStatus};

use crate::scenario::{Command, Scenario, VerifyModeArg};

#[derive(Debug, Serialize)]
pub struct CommandResult {
    pub command: String,
    pub outcome: serde_json::Value,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub results: Vec<CommandResult>,
    pub counterexamples: Vec<String>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: Report,
    /// 0 ok, 2 property violation found, 3 inapplicable/inconsistent data.
    pub exit_code: i32,
    /// Diagram payloads gathered for --svg.
    pub diagrams: Vec<(String, String)>,
}

pub struct RunError(pub String);

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable result")
}

pub fn run(scenario: &Scenario) -> Result<RunOutcome, RunError> {
    let mut results = Vec::new();
    let mut counterexamples = Vec::new();
    let mut exit_code = 0;
    let mut diagrams = Vec::new();

    // Per-run state shared between commands.
    let mut last_verify: Option<VerifyReport> = None;
    let mut last_certificate: Option<HlCertificate> = None;
    let mut audits_passed: Option<(u64, bool)> = None;
    let mut last_arcs: (
        Option<pingpong_core::circle::ArcSet>,
        Option<pingpong_core::circle::ArcSet>,
    ) = (None, None);

    let get_map = |name: &str| -> Result<pingpong_core::moebius::MoebiusMap, RunError> {
        let data = scenario
            .moebius
            .as_ref()
            .ok_or_else(|| RunError("command needs a [moebius] section".into()))?;
        data.assignment
            .get(name)
            .cloned()
            .ok_or_else(|| RunError(format!("unknown generator `{name}`")))
    };

    for cmd in &scenario.commands {
        match cmd {
            Command::ClassifyPair { f, g } => {
                let fm = get_map(f)?;
                let gm = get_map(g)?;
                let outcome = match classify::classify_pair(&fm, &gm) {
                    Ok(pc) => json!({
                        "word": pc.word.to_string(),
                        "row_hint": to_value(&pc.row_hint),
                        "row1_containments": pc.row1_containments,
                        "fix_f": to_value(&pc.fix_f),
                        "fix_g": to_value(&pc.fix_g),
                        "fix_fg": to_value(&pc.fix_fg),
                        "fix_gf": to_value(&pc.fix_gf),
                    }),
                    Err(e) => json!({ "error": e.to_string() }),
                };
                results.push(CommandResult { command: format!("classify-pair {f} {g}"), outcome });
            }
            Command::ClassifyCommutator { h, f } => {
                let hm = get_map(h)?;
                let fm = get_map(f)?;
                let outcome = match classify::classify_commutator(&hm, &fm) {
                    Ok(cc) => {
                        if cc.label == CommutatorLabel::Unmatched {
                            counterexamples.push(format!(
                                "COUNTEREXAMPLE: commutator configuration of ({h}, {f}) matched no class"
                            ));
                        }
                        if !cc.conjugacy_transport_ok {
                            counterexamples.push(format!(
                                "COUNTEREXAMPLE: conjugacy transport failed for ({h}, {f})"
                            ));
                        }
                        to_value(&cc)
                    }
                    Err(e) => json!({ "error": e.to_string() }),
                };
                results.push(CommandResult { command: format!("classify-commutator {h} {f}"), outcome });
            }
            Command::Census { samples, seed } => {
                let threads = census_threads();
                let census = classify::census_with_threads(*samples, *seed, threads);
                if census.coincidence_free_classes > 14 {
                    counterexamples.push(format!(
                        "COUNTEREXAMPLE: census found {} coincidence-free classes (> 14)",
                        census.coincidence_free_classes
                    ));
                }
                if census.row1_containment_failures > 0 {
                    counterexamples.push(format!(
                        "COUNTEREXAMPLE: {} row-1 containment failures in census",
                        census.row1_containment_failures
                    ));
                }
                results.push(CommandResult {
                    command: format!("census samples={samples} seed={seed}"),
                    outcome: to_value(&census),
                });
            }
            Command::Certify { radius } => {
                let data = scenario
                    .moebius
                    .as_ref()
                    .ok_or_else(|| RunError("certify needs a [moebius] section".into()))?;
                let cert = certify_hyperbolic_like(&data.factors, &data.assignment, *radius)
                    .map_err(|e| RunError(e.to_string()))?;
                if matches!(cert.status, HlStatus::Refuted { .. }) {
                    // a refutation is a finding, not a counterexample; it stays in the report
                }
                results.push(CommandResult {
                    command: format!("certify radius={radius}"),
                    outcome: to_value(&cert),
                });
                last_certificate = Some(cert);
            }
            Command::Verify { mode, radius, sample_depth, u_h, u_k } => {
                last_arcs = (u_h.clone(), u_k.clone());
                let (partition, action) = resolve_partition(scenario, u_h, u_k)?;
                let mut finite_report = None;
                let mut axis_report = None;
                if matches!(mode, VerifyModeArg::Finite | VerifyModeArg::Both) {
                    finite_report = Some(verify_finite(&partition, &action, *radius, *sample_depth));
                }
                if matches!(mode, VerifyModeArg::Axis | VerifyModeArg::Both) {
                    match &action {
                        PingPongAction::Model(m) => axis_report = Some(verify_axis(&partition, m)),
                        PingPongAction::Moebius { .. } => {
                            axis_report = Some(VerifyReport {
                                mode: pingpong::VerifyMode::Axis,
                                status: VerifyStatus::Inapplicable {
                                    reason: "axis mode needs a model scenario".into(),
                                },
                                words_checked: 0,
                            })
                        }
                    }
                }
                if let (Some(fin), Some(ax)) = (&finite_report, &axis_report) {
                    if ax.status == VerifyStatus::Verified
                        && matches!(fin.status, VerifyStatus::Violated { .. })
                    {
                        counterexamples.push(
                            "COUNTEREXAMPLE: axis mode Verified but finite mode Violated".into(),
                        );
                    }
                }
                for rep in [&finite_report, &axis_report].into_iter().flatten() {
                    match &rep.status {
                        VerifyStatus::Violated { .. } => exit_code = exit_code.max(2),
                        VerifyStatus::Inapplicable { .. } => exit_code = exit_code.max(3),
                        VerifyStatus::Verified => {}
                    }
                }
                last_verify = finite_report
                    .as_ref()
                    .filter(|r| r.status == VerifyStatus::Verified)
                    .or(axis_report.as_ref().filter(|r| r.status == VerifyStatus::Verified))
                    .cloned()
                    .or(last_verify);
                results.push(CommandResult {
                    command: format!("verify radius={radius}"),
                    outcome: json!({
                        "partition": to_value(&partition),
                        "finite": finite_report.as_ref().map(to_value),
                        "axis": axis_report.as_ref().map(to_value),
                    }),
                });
            }
            Command::Audit { words, iterations } => {
                let model = scenario
                    .model
                    .as_ref()
                    .ok_or_else(|| RunError("audit needs a [model] section".into()))?;
                let samples = model.base_points();
                let mut reports = Vec::new();
                let mut all_passed = true;
                for w in words {
                    let rep = north_south_audit(model, w, &samples, *iterations)
                        .map_err(|e| RunError(e.to_string()))?;
                    all_passed &= rep.pass;
                    reports.push(rep);
                }
                audits_passed = Some((words.len() as u64, all_passed));
                results.push(CommandResult {
                    command: format!("audit iterations={iterations}"),
                    outcome: to_value(&reports),
                });
            }
            Command::FreeProduct { radius } => {
                let (partition, action) = resolve_partition(scenario, &last_arcs.0, &last_arcs.1)?;
                let verify = last_verify.clone().unwrap_or_else(|| match &action {
                    PingPongAction::Model(m) => verify_axis(&partition, m),
                    PingPongAction::Moebius { .. } => {
                        verify_finite(&partition, &action, *radius, 2)
                    }
                });
                let evidence = match (&scenario.model, &last_certificate, &audits_passed) {
                    (_, Some(cert), _) => HlEvidence::WordBall(cert.clone()),
                    (Some(_), None, Some((n, ok))) => {
                        HlEvidence::ModelAudits { audited_words: *n, all_passed: *ok }
                    }
                    (Some(_), None, None) => {
                        return Err(RunError(
                            "free-product in a model scenario needs a prior audit command".into(),
                        ))
                    }
                    _ => {
                        return Err(RunError(
                            "free-product needs a prior certify or audit command".into(),
                        ))
                    }
                };
                let cert = free_product_certificate(&verify, &evidence, &action, *radius)
                    .map_err(|e| RunError(e.to_string()))?;
                if !cert.trivial_words.is_empty() || cert.ball_words != cert.brute_force_words {
                    counterexamples.push(format!("COUNTEREXAMPLE: {}", cert.status));
                }
                results.push(CommandResult {
                    command: format!("free-product radius={radius}"),
                    outcome: to_value(&cert),
                });
            }
            Command::ClassifyUnlinked => {
                let u = scenario
                    .unlinked
                    .as_ref()
                    .ok_or_else(|| RunError("classify-unlinked needs [unlinked-data]".into()))?;
                let outcome = match pingpong::classify_unlinked_config(&u.data) {
                    Ok(cfg) => to_value(&cfg),
                    Err(e) => {
                        exit_code = exit_code.max(3);
                        json!({ "error": e.to_string() })
                    }
                };
                results.push(CommandResult { command: "classify-unlinked".into(), outcome });
            }
            Command::SameOrbit => {
                let u = scenario
                    .unlinked
                    .as_ref()
                    .ok_or_else(|| RunError("same-orbit needs [unlinked-data]".into()))?;
                match pingpong::same_orbit_constraint(&u.data, u.witness.as_ref()) {
                    Ok((ok, message)) => {
                        if !ok {
                            counterexamples.push(message.clone());
                        }
                        results.push(CommandResult {
                            command: "same-orbit".into(),
                            outcome: json!({ "holds": ok, "message": message }),
                        });
                    }
                    Err(e) => {
                        exit_code = exit_code.max(3);
                        results.push(CommandResult {
                            command: "same-orbit".into(),
                            outcome: json!({ "error": e.to_string() }),
                        });
                    }
                }
            }
            Command::Diagram => {
                let svg = crate::svg::chord_diagram(scenario)?;
                diagrams.push((scenario.name.clone(), svg.clone()));
                results.push(CommandResult {
                    command: "diagram".into(),
                    outcome: json!({ "svg_bytes": svg.len() }),
                });
            }
        }
    }

    if !counterexamples.is_empty() {
        exit_code = exit_code.max(2);
    }
    Ok(RunOutcome {
        report: Report { scenario: scenario.name.clone(), results, counterexamples },
        exit_code,
        diagrams,
    })
}

pub fn census_threads() -> usize {
    std::env::var("PINGPONG_LAB_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1)
}

/// The partition and action a verify/free-product command runs against:
/// model scenarios use the builder output of the model's seed gaps; Moebius
/// scenarios need explicit arcs in the command.
fn resolve_partition<'a>(
    scenario: &'a Scenario,
    u_h: &Option<pingpong_core::circle::ArcSet>,
    u_k: &Option<pingpong_core::circle::ArcSet>,
) -> Result<(Partition, PingPongAction<'a>), RunError> {
    if let Some(model) = &scenario.model {
        let (mh, mk) = model_partition_arcsets(model).map_err(RunError)?;
        let partition = Partition {
            u_h: u_h.clone().unwrap_or(mh),
            u_k: u_k.clone().unwrap_or(mk),
        };
        return Ok((partition, PingPongAction::Model(model)));
    }
    if let Some(data) = &scenario.moebius {
        let (Some(h), Some(k)) = (u_h, u_k) else {
            return Err(RunError("Moebius verification needs u_h and u_k arcs".into()));
        };
        return Ok((
            Partition { u_h: h.clone(), u_k: k.clone() },
            PingPongAction::Moebius { factors: &data.factors, assignment: &data.assignment },
        ));
    }
    Err(RunError("verify needs a [model] or [moebius] section".into()))
}
