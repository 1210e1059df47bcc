//! End-to-end CLI checks: exit codes, subcommands, and the surd round-trip
//! through report serialization.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pingpong-lab"))
}

fn scenario_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .join("scenarios")
        .join(name)
}

#[test]
fn exit_code_0_on_clean_run() {
    let out = bin().arg("run").arg(scenario_path("schottky-strong.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exit_code_1_on_parse_error() {
    let dir = std::env::temp_dir().join(format!("pingpong-lab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "name = \"x\"\n[model\n").unwrap();
    let out = bin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "{err}");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn exit_code_2_on_counterexample() {
    let out =
        bin().arg("run").arg(scenario_path("same-orbit-mislabeled.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("COUNTEREXAMPLE"));
}

#[test]
fn exit_code_3_on_unclassifiable_input() {
    // shared fixed point: classify-commutator refuses
    let out = bin()
        .args(["classify-commutator", "--h", "4,0,0,1", "--f", "2,0,0,1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn classify_pair_subcommand() {
    let out = bin().args(["classify-pair", "--f", "4,0,0,1", "--g", "5,-3,-3,5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["row_hint"], "Row1");
    assert_eq!(
        v["word"],
        "[a_f a_fg a_gf a_g r_f r_gf r_fg r_g]"
    );
}

#[test]
fn census_subcommand_small() {
    let out = bin().args(["census", "--samples", "50", "--seed", "7"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["samples"], 50);
}

#[test]
fn verify_subcommand_against_model_scenario() {
    let out = bin()
        .args(["verify", "--scenario"])
        .arg(scenario_path("flagship-linked.toml"))
        .args(["--mode", "axis", "--radius", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"][0]["outcome"]["axis"]["status"], "Verified");
}

#[test]
fn report_surds_round_trip() {
    // every surd in a report round-trips through the integer 5-tuple
    let s: pingpong_core::surd::Surd = "3/7-2/5*sqrt(19)".parse().unwrap();
    let v = serde_json::to_value(&s).unwrap();
    let get = |k: &str| v[k].as_str().unwrap().parse::<num_bigint::BigInt>().unwrap();
    let back = pingpong_core::surd::Surd::new(
        num_rational::BigRational::new(get("a_num"), get("a_den")),
        num_rational::BigRational::new(get("b_num"), get("b_den")),
        v["d"].as_str().unwrap().parse().unwrap(),
    );
    assert_eq!(s, back);
    // and through fixed-point coordinates of a report-grade map
    let g = pingpong_core::moebius::MoebiusMap::new(1, 1, 1, 2).unwrap();
    let fp = g.fixed_pair().unwrap();
    let v = serde_json::to_value(&fp.attracting).unwrap();
    let get = |k: &str| v[k].as_str().unwrap().parse::<num_bigint::BigInt>().unwrap();
    let back = pingpong_core::surd::Surd::new(
        num_rational::BigRational::new(get("a_num"), get("a_den")),
        num_rational::BigRational::new(get("b_num"), get("b_den")),
        v["d"].as_str().unwrap().parse().unwrap(),
    );
    assert_eq!(fp.attracting.as_finite().unwrap(), &back);
}

#[test]
fn svg_structure_counts() {
    let dir = std::env::temp_dir().join(format!("pingpong-lab-svg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    // linked symmetric scenario: 4 chords, 4 highlighted arcs
    let out = dir.join("linked");
    let status = bin()
        .arg("run")
        .arg(scenario_path("flagship-linked.toml"))
        .arg("--out")
        .arg(&out)
        .arg("--svg")
        .status()
        .unwrap();
    assert!(status.success());
    let svg = std::fs::read_to_string(out.join("flagship-linked.0.svg")).unwrap();
    assert_eq!(svg.matches("<line").count(), 4);
    assert_eq!(svg.matches("<path").count(), 4);
    // parallel instance: two blue and two red chords
    let out2 = dir.join("parallel");
    bin()
        .arg("run")
        .arg(scenario_path("unlinked-parallel.toml"))
        .arg("--out")
        .arg(&out2)
        .arg("--svg")
        .status()
        .unwrap();
    let svg2 = std::fs::read_to_string(out2.join("unlinked-parallel.0.svg")).unwrap();
    assert_eq!(svg2.matches("#2222cc").count(), 2);
    assert_eq!(svg2.matches("#cc2222").count(), 2);
    // a scenario with no gap data draws the circle only
    let empty = dir.join("empty.toml");
    std::fs::write(&empty, "name = \"empty\"\n[[command]]\nkind = \"diagram\"\n").unwrap();
    let out3 = dir.join("empty-out");
    bin().arg("run").arg(&empty).arg("--out").arg(&out3).arg("--svg").status().unwrap();
    let svg3 = std::fs::read_to_string(out3.join("empty.0.svg")).unwrap();
    assert_eq!(svg3.matches("<circle").count(), 1);
    assert_eq!(svg3.matches("<line").count(), 0);
    std::fs::remove_dir_all(&dir).ok();
}
