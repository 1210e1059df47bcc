//! Scenario files: plain structured text (TOML key-value sections) declaring
//! either a Moebius scenario (generator matrices grouped into abelian
//! factors) or a model scenario (translation groups, marked points and seed
//! gaps on the model circle), plus a command list.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use serde::Deserialize;

use pingpong_core::circle::{Arc, ArcSet, CirclePoint};
use pingpong_core::model::{
    build_linked_model, build_unlinked_geometric_model, build_unlinked_parallel_model,
    LinkedSeeds, ModelConfig, TranslationGroup, UnlinkedGeometricSeeds, UnlinkedParallelSeeds,
};
use pingpong_core::moebius::MoebiusMap;
use pingpong_core::surd::{extract_square_part, Surd};
use pingpong_core::words::{Assignment, FactorSpec, NormalWord, Syllable};

#[derive(Debug)]
pub enum ScenarioError {
    Parse { line: usize, column: usize, message: String },
    Validation(String),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Parse { line, column, message } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            ScenarioError::Validation(m) => write!(f, "validation error: {m}"),
        }
    }
}
impl std::error::Error for ScenarioError {}

fn validation(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(msg.into())
}

// ----------------------------------------------------------------------
// Raw TOML schema
// ----------------------------------------------------------------------

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    moebius: Option<RawMoebius>,
    model: Option<RawModel>,
    #[serde(rename = "unlinked-data")]
    unlinked_data: Option<RawUnlinkedData>,
    #[serde(default, rename = "command")]
    commands: Vec<RawCommand>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMoebius {
    #[serde(rename = "factor")]
    factors: Vec<RawFactor>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    name: String,
    /// generator name -> [a, b, c, d]
    generators: BTreeMap<String, Vec<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    arrangement: String,
    lambda_p: RawGroup,
    lambda_q: RawGroup,
    points: BTreeMap<String, String>,
    seeds: BTreeMap<String, toml::Value>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGroup {
    tau1: String,
    tau2: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawUnlinkedData {
    points: BTreeMap<String, String>,
    #[serde(default)]
    right_gaps_p: Vec<Vec<String>>,
    #[serde(default)]
    left_gaps_p: Vec<Vec<String>>,
    #[serde(default)]
    right_gaps_q: Vec<Vec<String>>,
    #[serde(default)]
    left_gaps_q: Vec<Vec<String>>,
    /// Same-orbit witness matrix [a, b, c, d], if any.
    witness: Option<Vec<i64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCommand {
    kind: String,
    f: Option<String>,
    g: Option<String>,
    h: Option<String>,
    samples: Option<u64>,
    seed: Option<u64>,
    radius: Option<u64>,
    mode: Option<String>,
    #[serde(rename = "sample-depth")]
    sample_depth: Option<u64>,
    words: Option<Vec<String>>,
    iterations: Option<u32>,
    u_h: Option<Vec<Vec<String>>>,
    u_k: Option<Vec<Vec<String>>>,
}

// ----------------------------------------------------------------------
// Validated scenario
// ----------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct MoebiusData {
    pub factors: Vec<FactorSpec>,
    pub assignment: Assignment,
}

#[derive(Debug, Clone)]
pub struct UnlinkedData {
    pub data: pingpong_core::pingpong::UnlinkedGapData,
    pub witness: Option<MoebiusMap>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyModeArg {
    Finite,
    Axis,
    Both,
}

#[derive(Debug, Clone)]
pub enum Command {
    ClassifyPair { f: String, g: String },
    ClassifyCommutator { h: String, f: String },
    Census { samples: u64, seed: u64 },
    Certify { radius: u64 },
    Verify { mode: VerifyModeArg, radius: u64, sample_depth: u64, u_h: Option<ArcSet>, u_k: Option<ArcSet> },
    Audit { words: Vec<NormalWord>, iterations: u32 },
    FreeProduct { radius: u64 },
    ClassifyUnlinked,
    SameOrbit,
    Diagram,
}

#[derive(Debug)]
pub struct Scenario {
    pub name: String,
    pub moebius: Option<MoebiusData>,
    pub model: Option<ModelConfig>,
    pub unlinked: Option<UnlinkedData>,
    pub commands: Vec<Command>,
}

/// Parses a surd literal, enforcing a square-free radicand in user input
/// (the canonical-form hint is included in the error).
pub fn parse_surd_literal(text: &str) -> Result<Surd, ScenarioError> {
    if let Some(idx) = text.find("sqrt(") {
        let rest = &text[idx + 5..];
        let close = rest.find(')').ok_or_else(|| validation(format!("unterminated sqrt in `{text}`")))?;
        let rad: num_bigint::BigUint = rest[..close]
            .trim()
            .parse()
            .map_err(|_| validation(format!("bad radicand in `{text}`")))?;
        let (d0, s) = extract_square_part(&rad);
        if s != num_bigint::BigUint::from(1u32) {
            return Err(validation(format!(
                "radicand {rad} is not square-free; write {s}*sqrt({d0}) instead"
            )));
        }
    }
    text.parse::<Surd>().map_err(|e| validation(e.to_string()))
}

fn parse_point(text: &str) -> Result<CirclePoint, ScenarioError> {
    if text.trim() == "infinity" || text.trim() == "oo" {
        return Ok(CirclePoint::Infinity);
    }
    Ok(CirclePoint::Finite(parse_surd_literal(text)?))
}

fn parse_arc(pair: &[String]) -> Result<Arc, ScenarioError> {
    if pair.len() != 2 {
        return Err(validation(format!("arc needs two endpoints, got {pair:?}")));
    }
    Arc::new(parse_point(&pair[0])?, parse_point(&pair[1])?).map_err(|e| validation(e.to_string()))
}

fn parse_arcset(arcs: &[Vec<String>]) -> Result<ArcSet, ScenarioError> {
    let parsed: Result<Vec<Arc>, _> = arcs.iter().map(|a| parse_arc(a)).collect();
    ArcSet::normalize(parsed?).map_err(|e| validation(e.to_string()))
}

fn parse_matrix(name: &str, entries: &[i64]) -> Result<MoebiusMap, ScenarioError> {
    if entries.len() != 4 {
        return Err(validation(format!("matrix {name} needs four integers")));
    }
    let det = BigInt::from(entries[0]) * BigInt::from(entries[3])
        - BigInt::from(entries[1]) * BigInt::from(entries[2]);
    if det == BigInt::from(0) {
        return Err(validation(format!("matrix {name} has zero determinant")));
    }
    MoebiusMap::new(entries[0], entries[1], entries[2], entries[3])
        .map_err(|e| validation(format!("matrix {name}: {e}")))
}

fn parse_group(raw: &RawGroup) -> Result<TranslationGroup, ScenarioError> {
    let tau1 = parse_surd_literal(&raw.tau1)?;
    let tau2 = parse_surd_literal(&raw.tau2)?;
    TranslationGroup::new(tau1, tau2).map_err(|e| validation(e.to_string()))
}

/// Parses a word literal like `h1*f1^-2` against the factor generator names.
pub fn parse_word(text: &str, factors: &[FactorSpec]) -> Result<NormalWord, ScenarioError> {
    let mut word = NormalWord::identity();
    for part in text.split('*') {
        let part = part.trim();
        if part.is_empty() || part == "id" {
            continue;
        }
        let (name, exp) = match part.split_once('^') {
            Some((n, e)) => (
                n.trim(),
                e.trim()
                    .parse::<i64>()
                    .map_err(|_| validation(format!("bad exponent in `{part}`")))?,
            ),
            None => (part, 1),
        };
        let mut found = false;
        for (fi, spec) in factors.iter().enumerate() {
            if let Some(gi) = spec.generator_names.iter().position(|g| g == name) {
                let mut exps = vec![0i64; spec.rank];
                exps[gi] = exp;
                word = word.multiply(&NormalWord::from_syllables(vec![Syllable {
                    factor: fi,
                    exponents: exps,
                }]));
                found = true;
                break;
            }
        }
        if !found {
            return Err(validation(format!("unknown generator `{name}`")));
        }
    }
    Ok(word)
}

fn get_point(
    pts: &BTreeMap<String, String>,
    key: &str,
) -> Result<CirclePoint, ScenarioError> {
    parse_point(
        pts.get(key)
            .ok_or_else(|| validation(format!("missing point `{key}`")))?,
    )
}

fn get_seed_arc(seeds: &BTreeMap<String, toml::Value>, key: &str) -> Result<Arc, ScenarioError> {
    let v = seeds
        .get(key)
        .ok_or_else(|| validation(format!("missing seed arc `{key}`")))?;
    let pair: Vec<String> = v
        .as_array()
        .ok_or_else(|| validation(format!("seed `{key}` must be an array")))?
        .iter()
        .map(|x| x.as_str().map(str::to_string))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| validation(format!("seed `{key}` endpoints must be strings")))?;
    parse_arc(&pair)
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| {
        let (line, column) = e
            .span()
            .map(|span| {
                let upto = &text[..span.start.min(text.len())];
                let line = upto.lines().count().max(1);
                let column = upto.lines().last().map(|l| l.len() + 1).unwrap_or(1);
                (line, column)
            })
            .unwrap_or((1, 1));
        ScenarioError::Parse { line, column, message: e.message().to_string() }
    })?;

    let moebius = match &raw.moebius {
        None => None,
        Some(m) => {
            let mut factors = Vec::new();
            let mut assignment: Assignment = BTreeMap::new();
            for f in &m.factors {
                let names: Vec<&str> = f.generators.keys().map(String::as_str).collect();
                if names.is_empty() {
                    return Err(validation(format!("factor {} has no generators", f.name)));
                }
                factors.push(FactorSpec::new(&f.name, &names));
                for (g, entries) in &f.generators {
                    assignment.insert(g.clone(), parse_matrix(g, entries)?);
                }
            }
            pingpong_core::words::check_abelian(&factors, &assignment)
                .map_err(|e| validation(e.to_string()))?;
            Some(MoebiusData { factors, assignment })
        }
    };

    let model = match &raw.model {
        None => None,
        Some(m) => {
            let lambda_p = parse_group(&m.lambda_p)?;
            let lambda_q = parse_group(&m.lambda_q)?;
            let config = match m.arrangement.as_str() {
                "linked" => build_linked_model(
                    lambda_p,
                    lambda_q,
                    LinkedSeeds {
                        p: get_point(&m.points, "p")?,
                        q: get_point(&m.points, "q")?,
                        pbar: get_point(&m.points, "pbar")?,
                        qbar: get_point(&m.points, "qbar")?,
                        i_p: get_seed_arc(&m.seeds, "i_p")?,
                        i_q: get_seed_arc(&m.seeds, "i_q")?,
                        i_pbar: get_seed_arc(&m.seeds, "i_pbar")?,
                        i_qbar: get_seed_arc(&m.seeds, "i_qbar")?,
                    },
                )
                .map_err(|e| validation(e.to_string()))?,
                "unlinked-geometric" => build_unlinked_geometric_model(
                    lambda_p,
                    lambda_q,
                    UnlinkedGeometricSeeds {
                        p: get_point(&m.points, "p")?,
                        qbar: get_point(&m.points, "qbar")?,
                        q: get_point(&m.points, "q")?,
                        pbar: get_point(&m.points, "pbar")?,
                        r_p: get_seed_arc(&m.seeds, "r_p")?,
                        r_q: get_seed_arc(&m.seeds, "r_q")?,
                    },
                )
                .map_err(|e| validation(e.to_string()))?,
                "unlinked-parallel" => {
                    let offset = m
                        .seeds
                        .get("coset_offset")
                        .and_then(|v| v.as_str())
                        .ok_or_else(|| validation("parallel model needs seeds.coset_offset"))?;
                    build_unlinked_parallel_model(
                        lambda_p,
                        lambda_q,
                        UnlinkedParallelSeeds {
                            p: get_point(&m.points, "p")?,
                            qbar: get_point(&m.points, "qbar")?,
                            q: get_point(&m.points, "q")?,
                            pbar: get_point(&m.points, "pbar")?,
                            i1: get_seed_arc(&m.seeds, "i1")?,
                            i2: get_seed_arc(&m.seeds, "i2")?,
                            i3: get_seed_arc(&m.seeds, "i3")?,
                            i4: get_seed_arc(&m.seeds, "i4")?,
                            coset_offset: parse_surd_literal(offset)?,
                        },
                    )
                    .map_err(|e| validation(e.to_string()))?
                }
                other => return Err(validation(format!("unknown arrangement `{other}`"))),
            };
            Some(config)
        }
    };

    let unlinked = match &raw.unlinked_data {
        None => None,
        Some(u) => {
            let parse_gaps = |gaps: &[Vec<String>]| -> Result<Vec<Arc>, ScenarioError> {
                gaps.iter().map(|g| parse_arc(g)).collect()
            };
            let data = pingpong_core::pingpong::UnlinkedGapData {
                p: get_point(&u.points, "p")?,
                qbar: get_point(&u.points, "qbar")?,
                q: get_point(&u.points, "q")?,
                pbar: get_point(&u.points, "pbar")?,
                right_gaps_p: parse_gaps(&u.right_gaps_p)?,
                left_gaps_p: parse_gaps(&u.left_gaps_p)?,
                right_gaps_q: parse_gaps(&u.right_gaps_q)?,
                left_gaps_q: parse_gaps(&u.left_gaps_q)?,
            };
            let witness = match &u.witness {
                Some(entries) => Some(parse_matrix("witness", entries)?),
                None => None,
            };
            Some(UnlinkedData { data, witness })
        }
    };

    let mut commands = Vec::new();
    for (i, c) in raw.commands.iter().enumerate() {
        let ctx = |msg: &str| validation(format!("command {}: {msg}", i + 1));
        let radius = || -> Result<u64, ScenarioError> {
            let r = c.radius.ok_or_else(|| ctx("missing radius"))?;
            if r < 1 {
                return Err(ctx("radius must be at least 1"));
            }
            Ok(r)
        };
        let cmd = match c.kind.as_str() {
            "classify-pair" => Command::ClassifyPair {
                f: c.f.clone().ok_or_else(|| ctx("missing f"))?,
                g: c.g.clone().ok_or_else(|| ctx("missing g"))?,
            },
            "classify-commutator" => Command::ClassifyCommutator {
                h: c.h.clone().ok_or_else(|| ctx("missing h"))?,
                f: c.f.clone().ok_or_else(|| ctx("missing f"))?,
            },
            "census" => Command::Census {
                samples: c.samples.ok_or_else(|| ctx("missing samples"))?.max(1),
                seed: c.seed.unwrap_or(0),
            },
            "certify" => Command::Certify { radius: radius()? },
            "verify" => {
                let mode = match c.mode.as_deref() {
                    Some("finite") => VerifyModeArg::Finite,
                    Some("axis") => VerifyModeArg::Axis,
                    Some("both") | None => VerifyModeArg::Both,
                    Some(other) => return Err(ctx(&format!("unknown verify mode `{other}`"))),
                };
                Command::Verify {
                    mode,
                    radius: radius()?,
                    sample_depth: c.sample_depth.unwrap_or(4),
                    u_h: c.u_h.as_deref().map(parse_arcset).transpose()?,
                    u_k: c.u_k.as_deref().map(parse_arcset).transpose()?,
                }
            }
            "audit" => {
                let factors = model
                    .as_ref()
                    .map(|m| m.factors.clone())
                    .or_else(|| moebius.as_ref().map(|m| m.factors.clone()))
                    .ok_or_else(|| ctx("audit needs a model or moebius section"))?;
                let words = c
                    .words
                    .as_ref()
                    .ok_or_else(|| ctx("missing words"))?
                    .iter()
                    .map(|w| parse_word(w, &factors))
                    .collect::<Result<Vec<_>, _>>()?;
                Command::Audit { words, iterations: c.iterations.unwrap_or(32).max(2) }
            }
            "free-product" => Command::FreeProduct { radius: radius()? },
            "classify-unlinked" => Command::ClassifyUnlinked,
            "same-orbit" => Command::SameOrbit,
            "diagram" => Command::Diagram,
            other => return Err(ctx(&format!("unknown command kind `{other}`"))),
        };
        commands.push(cmd);
    }

    Ok(Scenario { name: raw.name, moebius, model, unlinked, commands })
}
