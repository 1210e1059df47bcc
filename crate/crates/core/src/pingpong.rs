//! Ping-pong partitions: builders from gap data (linked, unlinked geometric,
//! unlinked parallel), verification in finite and axis modes, the unlinked
//! configuration classifier with the hexagon rejection, the same-orbit
//! constraint, and the combined free-product certificate.

use std::fmt;

use crate::circle::{circular_order, Arc, ArcSet, CirclePoint};
use crate::model::{
    self, two_arc_closures_cover, Arrangement, Coord, Loc, Mark, ModelConfig, Structure,
    VirtualPoint,
};
use crate::moebius::MoebiusMap;
use crate::surd::Surd;
use crate::words::{ball, evaluate, Assignment, FactorSpec, HlCertificate, HlStatus, NormalWord};

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Partition {
    pub u_h: ArcSet,
    pub u_k: ArcSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PingPongError {
    ChainViolation(String),
    CoverageFailure(String),
    ActionMismatch(String),
    InconsistentGapData(String),
    PreconditionViolated(String),
}

impl fmt::Display for PingPongError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PingPongError::ChainViolation(m) => write!(f, "chain violation: {m}"),
            PingPongError::CoverageFailure(m) => write!(f, "coverage failure: {m}"),
            PingPongError::ActionMismatch(m) => write!(f, "action mismatch: {m}"),
            PingPongError::InconsistentGapData(m) => write!(f, "inconsistent gap data: {m}"),
            PingPongError::PreconditionViolated(m) => write!(f, "precondition violated: {m}"),
        }
    }
}
impl std::error::Error for PingPongError {}

impl Partition {
    fn validate(self) -> Result<Self, PingPongError> {
        if self.u_h.is_empty() || self.u_k.is_empty() {
            return Err(PingPongError::CoverageFailure("partition side is empty".into()));
        }
        for a in self.u_h.arcs() {
            for b in self.u_k.arcs() {
                if a.overlaps(b) {
                    return Err(PingPongError::CoverageFailure(format!(
                        "sides overlap: {a:?} and {b:?}"
                    )));
                }
            }
        }
        Ok(self)
    }
}

fn check_chain(
    points: &[(&str, &CirclePoint)],
    strict: &[bool],
) -> Result<(), PingPongError> {
    let n = points.len();
    for i in 0..n {
        let j = (i + 1) % n;
        if points[i].1 == points[j].1 && strict[i] {
            return Err(PingPongError::ChainViolation(format!(
                "{} < {} required but points coincide",
                points[i].0, points[j].0
            )));
        }
    }
    let mut reps: Vec<(&str, &CirclePoint)> = Vec::new();
    for &(n, p) in points {
        if reps.iter().all(|(_, q)| *q != p) {
            reps.push((n, p));
        }
    }
    for i in 1..reps.len().saturating_sub(1) {
        if circular_order(reps[0].1, reps[i].1, reps[i + 1].1) != 1 {
            return Err(PingPongError::ChainViolation(format!(
                "{} < {} < {} fails",
                reps[0].0, reps[i].0, reps[i + 1].0
            )));
        }
    }
    Ok(())
}

/// U_p = (I_p u I_pbar) \ closure(I_q u I_qbar) and symmetrically, under
/// the 12-term linked seed chain.
#[allow(clippy::too_many_arguments)]
pub fn build_linked_partition(
    i_p: &Arc,
    i_pbar: &Arc,
    i_q: &Arc,
    i_qbar: &Arc,
    p: &CirclePoint,
    q: &CirclePoint,
    pbar: &CirclePoint,
    qbar: &CirclePoint,
) -> Result<Partition, PingPongError> {
    for (name, alpha, arc) in [
        ("p in I_p", p, i_p),
        ("q in I_q", q, i_q),
        ("pbar in I_pbar", pbar, i_pbar),
        ("qbar in I_qbar", qbar, i_qbar),
    ] {
        if !arc.contains(alpha) {
            return Err(PingPongError::PreconditionViolated(format!("{name} fails")));
        }
    }
    let points: Vec<(&str, &CirclePoint)> = vec![
        ("p", p),
        ("u_q", &i_q.lo),
        ("v_p", &i_p.hi),
        ("q", q),
        ("u_pbar", &i_pbar.lo),
        ("v_q", &i_q.hi),
        ("pbar", pbar),
        ("u_qbar", &i_qbar.lo),
        ("v_pbar", &i_pbar.hi),
        ("qbar", qbar),
        ("u_p", &i_p.lo),
        ("v_qbar", &i_qbar.hi),
    ];
    let strict = [true, false, true, true, false, false, true, false, true, true, false, true];
    check_chain(&points, &strict)?;
    let all = ArcSet::normalize(vec![i_p.clone(), i_q.clone(), i_pbar.clone(), i_qbar.clone()])
        .map(Some)
        .unwrap_or(None);
    let covered = match all {
        Some(s) => s.covers_circle_closure(),
        // overlapping closures cover even more
        None => true,
    };
    if !covered {
        return Err(PingPongError::CoverageFailure(
            "closure of the four gaps must cover the circle".into(),
        ));
    }
    let hp = ArcSet::normalize(vec![i_p.clone(), i_pbar.clone()])
        .map_err(|e| PingPongError::PreconditionViolated(format!("I_p, I_pbar overlap: {e}")))?;
    let kq = ArcSet::normalize(vec![i_q.clone(), i_qbar.clone()])
        .map_err(|e| PingPongError::PreconditionViolated(format!("I_q, I_qbar overlap: {e}")))?;
    Partition { u_h: hp.subtract_closure(&kq), u_k: kq.subtract_closure(&hp) }.validate()
}

/// U_p = R_q \ closure(R_p) and U_q = R_p \ closure(R_q), from two right
/// gaps whose closures cover the circle.
pub fn build_unlinked_geometric(r_p: &Arc, r_q: &Arc) -> Result<Partition, PingPongError> {
    if !two_arc_closures_cover(r_p, r_q) {
        return Err(PingPongError::CoverageFailure(
            "closure(R_p union R_q) must be the whole circle".into(),
        ));
    }
    let sp = ArcSet::from_arc(r_p.clone());
    let sq = ArcSet::from_arc(r_q.clone());
    Partition { u_h: sq.subtract_closure(&sp), u_k: sp.subtract_closure(&sq) }.validate()
}

/// U_p = I_2 u I_4 and U_q = (I_1 u I_3) \ closure(I_2 u I_4), under the
/// 12-term parallel chain.
#[allow(clippy::too_many_arguments)]
pub fn build_unlinked_parallel(
    i1: &Arc,
    i2: &Arc,
    i3: &Arc,
    i4: &Arc,
    p: &CirclePoint,
    qbar: &CirclePoint,
    q: &CirclePoint,
    pbar: &CirclePoint,
) -> Result<Partition, PingPongError> {
    let points: Vec<(&str, &CirclePoint)> = vec![
        ("p", p),
        ("u_1", &i1.lo),
        ("v_4", &i4.hi),
        ("qbar", qbar),
        ("u_2", &i2.lo),
        ("v_1", &i1.hi),
        ("u_3", &i3.lo),
        ("v_2", &i2.hi),
        ("q", q),
        ("u_4", &i4.lo),
        ("v_3", &i3.hi),
        ("pbar", pbar),
    ];
    let strict = [true, false, true, true, false, true, false, true, true, false, true, true];
    check_chain(&points, &strict)?;
    let u_p = ArcSet::normalize(vec![i2.clone(), i4.clone()])
        .map_err(|e| PingPongError::PreconditionViolated(format!("I_2, I_4 overlap: {e}")))?;
    let hq = ArcSet::normalize(vec![i1.clone(), i3.clone()])
        .map_err(|e| PingPongError::PreconditionViolated(format!("I_1, I_3 overlap: {e}")))?;
    let u_q = hq.subtract_closure(&u_p);
    Partition { u_h: u_p, u_k: u_q }.validate()
}

// ----------------------------------------------------------------------
// Verification
// ----------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum VerifyMode {
    Finite { radius: u64 },
    Axis,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum VerifyStatus {
    Verified,
    Violated { witness_word: String, witness_arc: String, image: String },
    Inapplicable { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub status: VerifyStatus,
    pub words_checked: u64,
}

/// The two group actions a partition is verified against.
pub enum PingPongAction<'a> {
    /// Moebius assignments for the two abelian factors (H first).
    Moebius { factors: &'a [FactorSpec], assignment: &'a Assignment },
    /// Word actions on the realization.
    Model(&'a ModelConfig),
}

/// Checks (H \ id)(U_K) in U_H and (K \ id)(U_H) in U_K for every word in
/// each factor's ball of the given radius. Exact in both modes: Moebius maps
/// send arcs to arcs (endpoint application); model words are checked on the
/// gap components and sampled virtual points.
pub fn verify_finite(
    partition: &Partition,
    action: &PingPongAction,
    radius: u64,
    model_sample_depth: u64,
) -> VerifyReport {
    match action {
        PingPongAction::Moebius { factors, assignment } => {
            verify_finite_moebius(partition, factors, assignment, radius)
        }
        PingPongAction::Model(model) => {
            verify_finite_model(partition, model, radius, model_sample_depth)
        }
    }
}

fn verify_finite_moebius(
    partition: &Partition,
    factors: &[FactorSpec],
    assignment: &Assignment,
    radius: u64,
) -> VerifyReport {
    let mode = VerifyMode::Finite { radius };
    if factors.len() != 2 {
        return VerifyReport {
            mode,
            status: VerifyStatus::Inapplicable { reason: "need exactly two factors".into() },
            words_checked: 0,
        };
    }
    let mut words_checked = 0;
    for (fi, source, target) in [
        (0usize, &partition.u_k, &partition.u_h),
        (1usize, &partition.u_h, &partition.u_k),
    ] {
        let sub = vec![factors[fi].clone()];
        for w in ball(&sub, radius) {
            // words of the sub-presentation refer to factor index 0
            let full_word = lift_factor_word(&w, fi);
            let m = match evaluate(&full_word, factors, assignment) {
                Ok(m) => m,
                Err(e) => {
                    return VerifyReport {
                        mode,
                        status: VerifyStatus::Inapplicable { reason: e.to_string() },
                        words_checked,
                    }
                }
            };
            words_checked += 1;
            if m.is_identity() {
                return VerifyReport {
                    mode,
                    status: VerifyStatus::Violated {
                        witness_word: full_word.render(factors),
                        witness_arc: "-".into(),
                        image: "word evaluates to the identity".into(),
                    },
                    words_checked,
                };
            }
            for arc in source.arcs() {
                let image = Arc { lo: m.apply(&arc.lo), hi: m.apply(&arc.hi) };
                let ok = ArcSet::from_arc(image.clone()).subset(target);
                if !ok {
                    return VerifyReport {
                        mode,
                        status: VerifyStatus::Violated {
                            witness_word: full_word.render(factors),
                            witness_arc: format!("{arc:?}"),
                            image: format!("{image:?}"),
                        },
                        words_checked,
                    };
                }
            }
        }
    }
    VerifyReport { mode, status: VerifyStatus::Verified, words_checked }
}

fn lift_factor_word(w: &NormalWord, factor: usize) -> NormalWord {
    NormalWord::from_syllables(
        w.syllables()
            .iter()
            .map(|s| crate::words::Syllable { factor, exponents: s.exponents.clone() })
            .collect(),
    )
}

fn verify_finite_model(
    partition: &Partition,
    model: &ModelConfig,
    radius: u64,
    sample_depth: u64,
) -> VerifyReport {
    let mode = VerifyMode::Finite { radius };
    if let Err(reason) = partition_matches_model(partition, model) {
        return VerifyReport { mode, status: VerifyStatus::Inapplicable { reason }, words_checked: 0 };
    }
    let samples = model.sample_points(sample_depth);
    let mut words_checked = 0;
    for (st, own) in [(Structure::H, Structure::H), (Structure::K, Structure::K)] {
        let _ = own;
        let sub = vec![model.factors[st.factor()].clone()];
        for w in ball(&sub, radius) {
            let word = lift_factor_word(&w, st.factor());
            words_checked += 1;
            // Gap-level: the source components are the gaps owned by this
            // factor's structure (they make up the other side's U set); the
            // word shifts each to the gap at the translated address, which
            // must land inside the own-mark side.
            let shift = model.syllable_address(word.first().unwrap());
            for side in [model::Side::R, model::Side::L] {
                let Some(gs) = model.gap_system(st, side) else { continue };
                for seed in &gs.seeds {
                    let pos = &seed.chart_addr + &shift;
                    let vp = shifted_gap_witness(model, st, side, &seed.chart_addr, &shift);
                    if !model.in_u_side(st, &vp) {
                        return VerifyReport {
                            mode,
                            status: VerifyStatus::Violated {
                                witness_word: word.render(&model.factors),
                                witness_arc: format!("gap({st:?},{side:?},{})", seed.chart_addr),
                                image: format!("gap at address {pos}"),
                            },
                            words_checked,
                        };
                    }
                }
            }
            // Sampled virtual points of the source side.
            for s in samples.iter().filter(|s| model.in_u_side(st.other(), s)) {
                let img = model.act(&word, s);
                if !model.in_u_side(st, &img) {
                    return VerifyReport {
                        mode,
                        status: VerifyStatus::Violated {
                            witness_word: word.render(&model.factors),
                            witness_arc: s.to_string(),
                            image: img.to_string(),
                        },
                        words_checked,
                    };
                }
            }
        }
    }
    VerifyReport { mode, status: VerifyStatus::Verified, words_checked }
}

/// A virtual point inside the gap at chart address `base + shift` of the
/// given structure: the translated seed midpoint.
fn shifted_gap_witness(
    model: &ModelConfig,
    st: Structure,
    side: model::Side,
    base: &Surd,
    shift: &Surd,
) -> VirtualPoint {
    let gs = model.gap_system(st, side).expect("side has seeds");
    let seed_idx = gs
        .seeds
        .iter()
        .position(|s| s.chart_addr == *base)
        .expect("seed with this base address");
    let mid = VirtualPoint::seed_mid(st, side, seed_idx as u8);
    VirtualPoint { word: mid.word.clone(), base: mid.base, addr: shift.clone() }
}

fn partition_matches_model(partition: &Partition, model: &ModelConfig) -> Result<(), String> {
    let (expect_h, expect_k) = model_partition_arcsets(model)?;
    if partition.u_h != expect_h || partition.u_k != expect_k {
        return Err("partition does not match the model's builder output".into());
    }
    Ok(())
}

/// The partition the builders produce from the model's seed gaps.
pub fn model_partition_arcsets(model: &ModelConfig) -> Result<(ArcSet, ArcSet), String> {
    let arcs_of = |st: Structure| -> Vec<Arc> {
        let mut arcs = Vec::new();
        for side in [model::Side::R, model::Side::L] {
            if let Some(gs) = model.gap_system(st, side) {
                arcs.extend(gs.seeds.iter().map(|s| s.arc.clone()));
            }
        }
        arcs
    };
    let h_arcs = arcs_of(Structure::H);
    let k_arcs = arcs_of(Structure::K);
    match model.arrangement {
        Arrangement::Linked => {
            let hp = ArcSet::normalize(k_arcs).map_err(|e| e.to_string())?;
            let kq = ArcSet::normalize(h_arcs).map_err(|e| e.to_string())?;
            Ok((hp.subtract_closure(&kq), kq.subtract_closure(&hp)))
        }
        Arrangement::UnlinkedGeometric => {
            let rp = ArcSet::normalize(h_arcs).map_err(|e| e.to_string())?;
            let rq = ArcSet::normalize(k_arcs).map_err(|e| e.to_string())?;
            Ok((rq.subtract_closure(&rp), rp.subtract_closure(&rq)))
        }
        Arrangement::UnlinkedParallel => {
            let u_p = ArcSet::normalize(k_arcs).map_err(|e| e.to_string())?;
            let hq = ArcSet::normalize(h_arcs).map_err(|e| e.to_string())?;
            let u_q = hq.subtract_closure(&u_p);
            Ok((u_p, u_q))
        }
    }
}

/// Axis-mode verification: checks that the partition is the builder output
/// of the model's gap data, that the seed chain facts hold, and that the
/// boundary conditions reduce correctly on seed addresses (the nesting of
/// every first-generation gap image). Verified status then covers the full
/// infinite factors.
pub fn verify_axis(partition: &Partition, model: &ModelConfig) -> VerifyReport {
    let mode = VerifyMode::Axis;
    if let Err(reason) = partition_matches_model(partition, model) {
        return VerifyReport { mode, status: VerifyStatus::Inapplicable { reason }, words_checked: 0 };
    }
    if let Some(bad) = model.base_order_table.iter().find(|f| !f.holds) {
        return VerifyReport {
            mode,
            status: VerifyStatus::Inapplicable { reason: format!("base table fact fails: {}", bad.fact) },
            words_checked: 0,
        };
    }
    // Boundary conditions on seed addresses: the one-step translates of each
    // opposite seed gap nest into an own seed gap, in both directions. For a
    // dense group this pins the sup/inf conditions of the axis argument.
    let mut words_checked = 0;
    for st in [Structure::H, Structure::K] {
        for dir in [1i64, -1i64] {
            for gen in 0..2usize {
                let mut exps = vec![0i64; 2];
                exps[gen] = dir;
                let w = NormalWord::single(st.factor(), exps);
                let shift = model.syllable_address(w.first().unwrap());
                words_checked += 1;
                for side in [model::Side::R, model::Side::L] {
                    let Some(gs) = model.gap_system(st, side) else { continue };
                    for seed in &gs.seeds {
                        let vp = shifted_gap_witness(model, st, side, &seed.chart_addr, &shift);
                        if !model.in_u_side(st, &vp) {
                            return VerifyReport {
                                mode,
                                status: VerifyStatus::Violated {
                                    witness_word: w.render(&model.factors),
                                    witness_arc: format!("seed gap at {}", seed.chart_addr),
                                    image: "nests outside the partner side".into(),
                                },
                                words_checked,
                            };
                        }
                    }
                }
            }
        }
    }
    VerifyReport { mode, status: VerifyStatus::Verified, words_checked }
}

// ----------------------------------------------------------------------
// Unlinked configuration classifier
// ----------------------------------------------------------------------

/// Exact gap data around an unlinked pair p < qbar < q < pbar.
#[derive(Debug, Clone, serde::Serialize)]
pub struct UnlinkedGapData {
    pub p: CirclePoint,
    pub qbar: CirclePoint,
    pub q: CirclePoint,
    pub pbar: CirclePoint,
    pub right_gaps_p: Vec<Arc>,
    pub left_gaps_p: Vec<Arc>,
    pub right_gaps_q: Vec<Arc>,
    pub left_gaps_q: Vec<Arc>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub enum UnlinkedConfig {
    /// One right gap of each point, closures covering the circle.
    GeometricU { r_p: Arc, r_q: Arc },
    /// R_p of p contains closure(L(q)); the flanking right gaps R_1, R_2 of
    /// q are distinct, with a left gap L_p of p between them.
    NonGeometric1 { r_p: Arc, r_1: Arc, r_2: Arc, l_p: Arc },
    /// Mirror case: R_q of q contains closure(L(p)); flanking right gaps of
    /// p distinct, with a left gap L_q of q between them.
    NonGeometric2 { r_q: Arc, r_1: Arc, r_2: Arc, l_q: Arc },
    /// Six alternating gaps: impossible for hyperbolic-like dynamics; always
    /// rejected, with the contradiction witness.
    Hexagonal { rejected: bool, gaps: Vec<Arc>, witness: String },
}

fn gap_containing<'a>(gaps: &'a [Arc], target: &Arc) -> Option<&'a Arc> {
    gaps.iter().find(|g| target.subset_of(g))
}

fn gap_containing_point<'a>(gaps: &'a [Arc], x: &CirclePoint) -> Option<&'a Arc> {
    gaps.iter().find(|g| g.contains(x))
}

/// Applies the unlinked decision tree: locate the side whose core misses the
/// other point's inner interval, resolve the gap dichotomy, reject hexagonal
/// data.
pub fn classify_unlinked_config(data: &UnlinkedGapData) -> Result<UnlinkedConfig, PingPongError> {
    let UnlinkedGapData { p, qbar, q, pbar, .. } = data;
    if !(circular_order(p, qbar, q) == 1 && circular_order(p, q, pbar) == 1) {
        return Err(PingPongError::PreconditionViolated(
            "arrangement p < qbar < q < pbar fails".into(),
        ));
    }
    // validate gap sides
    let r_side_p = Arc { lo: p.clone(), hi: pbar.clone() };
    let l_side_p = Arc { lo: pbar.clone(), hi: p.clone() };
    let r_side_q = Arc { lo: q.clone(), hi: qbar.clone() };
    let l_side_q = Arc { lo: qbar.clone(), hi: q.clone() };
    for (name, gaps, side) in [
        ("right gap of p", &data.right_gaps_p, &r_side_p),
        ("left gap of p", &data.left_gaps_p, &l_side_p),
        ("right gap of q", &data.right_gaps_q, &r_side_q),
        ("left gap of q", &data.left_gaps_q, &l_side_q),
    ] {
        for g in gaps {
            if !g.subset_of(side) {
                return Err(PingPongError::InconsistentGapData(format!(
                    "{name} {g:?} leaves its side"
                )));
            }
        }
        for (i, a) in gaps.iter().enumerate() {
            for b in gaps.iter().skip(i + 1) {
                if a.overlaps(b) {
                    return Err(PingPongError::InconsistentGapData(format!(
                        "gaps {a:?}, {b:?} of one point overlap"
                    )));
                }
            }
        }
    }

    // Case A: some right gap of p contains the closure of L(q); case B the
    // mirror. Endpoint coincidences (u = qbar, v = q) are allowed.
    let l_q = Arc { lo: qbar.clone(), hi: q.clone() };
    let l_p = Arc { lo: pbar.clone(), hi: p.clone() };
    let case_a = data.right_gaps_p.iter().find(|g| l_q.subset_of(g));
    let case_b = data.right_gaps_q.iter().find(|g| l_p.subset_of(g));

    if let Some(r_p) = case_a {
        // flanking right gaps of q covering (p, u) and (v, pbar)
        let before = Arc { lo: p.clone(), hi: r_p.lo.clone() };
        let after = Arc { lo: r_p.hi.clone(), hi: pbar.clone() };
        let r1 = gap_containing(&data.right_gaps_q, &before).ok_or_else(|| {
            PingPongError::InconsistentGapData("no right gap of q covering (p, u_Rp)".into())
        })?;
        let r2 = gap_containing(&data.right_gaps_q, &after).ok_or_else(|| {
            PingPongError::InconsistentGapData("no right gap of q covering (v_Rp, pbar)".into())
        })?;
        if r1 == r2 {
            if !two_arc_closures_cover(r_p, r1) {
                return Err(PingPongError::InconsistentGapData(
                    "R_1 = R_2 but closures do not cover the circle".into(),
                ));
            }
            return Ok(UnlinkedConfig::GeometricU { r_p: r_p.clone(), r_q: r1.clone() });
        }
        // distinct: a left gap of p flanked between them
        let lp = data
            .left_gaps_p
            .iter()
            .find(|g| {
                let tail = Arc { lo: g.hi.clone(), hi: p.clone() };
                let head = Arc { lo: pbar.clone(), hi: g.lo.clone() };
                (g.hi == p.clone() || tail.subset_of(r1) || r1.closure_contains(&g.hi))
                    && (g.lo == pbar.clone() || head.subset_of(r2) || r2.closure_contains(&g.lo))
            })
            .ok_or_else(|| {
                PingPongError::InconsistentGapData(
                    "R_1 != R_2 but no left gap of p between them".into(),
                )
            })?;
        return Ok(UnlinkedConfig::NonGeometric1 {
            r_p: r_p.clone(),
            r_1: r1.clone(),
            r_2: r2.clone(),
            l_p: lp.clone(),
        });
    }

    if let Some(r_q) = case_b {
        let before = Arc { lo: q.clone(), hi: r_q.lo.clone() };
        let after = Arc { lo: r_q.hi.clone(), hi: qbar.clone() };
        let r1 = gap_containing(&data.right_gaps_p, &after).ok_or_else(|| {
            PingPongError::InconsistentGapData("no right gap of p covering (v_Rq, qbar)".into())
        })?;
        let r2 = gap_containing(&data.right_gaps_p, &before).ok_or_else(|| {
            PingPongError::InconsistentGapData("no right gap of p covering (q, u_Rq)".into())
        })?;
        if r1 == r2 {
            if !two_arc_closures_cover(r_q, r1) {
                return Err(PingPongError::InconsistentGapData(
                    "R_1 = R_2 but closures do not cover the circle".into(),
                ));
            }
            return Ok(UnlinkedConfig::GeometricU { r_p: r1.clone(), r_q: r_q.clone() });
        }
        let lq = data
            .left_gaps_q
            .iter()
            .find(|g| {
                let tail = Arc { lo: g.hi.clone(), hi: q.clone() };
                let head = Arc { lo: qbar.clone(), hi: g.lo.clone() };
                (g.hi == q.clone() || tail.subset_of(r2) || r2.closure_contains(&g.hi))
                    && (g.lo == qbar.clone() || head.subset_of(r1) || r1.closure_contains(&g.lo))
            })
            .ok_or_else(|| {
                PingPongError::InconsistentGapData(
                    "R_1 != R_2 but no left gap of q between them".into(),
                )
            })?;
        return Ok(UnlinkedConfig::NonGeometric2 {
            r_q: r_q.clone(),
            r_1: r1.clone(),
            r_2: r2.clone(),
            l_q: lq.clone(),
        });
    }

    // Neither side has a gap swallowing the other's outer interval: the data
    // describes the six-gap necklace ruled out by the hexagon argument.
    hexagon_of(data).map(Ok).unwrap_or_else(|| {
        Err(PingPongError::InconsistentGapData(
            "cores cross on both outer intervals but the six-gap necklace is incomplete".into(),
        ))
    })
}

/// Recognize the hexagonal necklace I_1..I_6 and produce the contradiction
/// witness: elements h, f with h(I_1) in I_2 and f(I_4) in I_5 give
/// fh(I_1) in f(I_2) in I_1 and fh(I_5) in f(I_4) in I_5, two disjoint
/// attracting arcs for one map.
fn hexagon_of(data: &UnlinkedGapData) -> Option<UnlinkedConfig> {
    let i1 = gap_containing_point(&data.right_gaps_p, &data.qbar)?;
    let i3 = gap_containing_point(&data.right_gaps_p, &data.q)?;
    let i4 = gap_containing_point(&data.right_gaps_q, &data.pbar)?;
    let i6 = gap_containing_point(&data.right_gaps_q, &data.p)?;
    let i2 = data.left_gaps_q.first()?;
    let i5 = data.left_gaps_p.first()?;
    let necklace = [i1, i2, i3, i4, i5, i6];
    // Consecutive closures must meet around the necklace: u_{i+1} <= v_i,
    // i.e. the start of the next gap lies inside or at the end of this one.
    for i in 0..6 {
        let next = necklace[(i + 1) % 6];
        let cur = necklace[i];
        if !(next.lo == cur.hi || cur.contains(&next.lo)) {
            return None;
        }
    }
    let witness = format!(
        "take h in H+(p) with h({:?}) inside {:?} and f in H+(q) with f({:?}) inside {:?}: then fh fixes attracting points in both closure({:?}) and closure({:?}), which are disjoint",
        i1, i2, i4, i5, i1, i5
    );
    Some(UnlinkedConfig::Hexagonal {
        rejected: true,
        gaps: necklace.into_iter().cloned().collect(),
        witness,
    })
}

/// Same-orbit constraint: with a witness g carrying p into {q, qbar}, the
/// configuration must be geometric. Returns false with a counterexample
/// report otherwise.
pub fn same_orbit_constraint(
    data: &UnlinkedGapData,
    witness: Option<&MoebiusMap>,
) -> Result<(bool, String), PingPongError> {
    let g = witness.ok_or_else(|| {
        PingPongError::PreconditionViolated("same-orbit check requires the witness g".into())
    })?;
    let gp = g.apply(&data.p);
    if gp != data.q && gp != data.qbar {
        return Err(PingPongError::PreconditionViolated(format!(
            "witness maps p to {gp}, not to q or qbar"
        )));
    }
    match classify_unlinked_config(data)? {
        UnlinkedConfig::GeometricU { .. } => Ok((true, "configuration is geometric".into())),
        other => Ok((
            false,
            format!("COUNTEREXAMPLE: same-orbit data classified as {other:?}"),
        )),
    }
}

// ----------------------------------------------------------------------
// Free-product certificate
// ----------------------------------------------------------------------

/// Evidence of radius-bounded hyperbolic-likeness: a word-ball certificate
/// for Moebius scenarios, or passed north-south audits for model scenarios.
#[derive(Debug, Clone, serde::Serialize)]
pub enum HlEvidence {
    WordBall(HlCertificate),
    ModelAudits { audited_words: u64, all_passed: bool },
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct FreeProductCertificate {
    pub radius: u64,
    pub ball_words: u64,
    pub brute_force_words: u64,
    pub trivial_words: Vec<String>,
    pub status: String,
    pub witnesses_recorded: u64,
}

/// All nontrivial normal words of l1 mass <= radius, counted by independent
/// brute-force multiplication with deduplication.
pub fn brute_force_ball_count(factors: &[FactorSpec], radius: u64) -> u64 {
    use std::collections::BTreeSet;
    let mut gens = Vec::new();
    for (fi, f) in factors.iter().enumerate() {
        for i in 0..f.rank {
            gens.push(NormalWord::generator(fi, f.rank, i, 1));
            gens.push(NormalWord::generator(fi, f.rank, i, -1));
        }
    }
    let mut seen: BTreeSet<NormalWord> = BTreeSet::new();
    let mut frontier = vec![NormalWord::identity()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for g in &gens {
                let p = w.multiply(g);
                if !p.is_identity() && p.l1() <= radius && seen.insert(p.clone()) {
                    next.push(p);
                }
            }
        }
        frontier = next;
    }
    seen.len() as u64
}

/// Combines a Verified partition report with hyperbolic-likeness evidence
/// and runs the exhaustive trivial-word check over the ball of the given
/// radius: no nontrivial word may act trivially.
pub fn free_product_certificate(
    verify: &VerifyReport,
    evidence: &HlEvidence,
    action: &PingPongAction,
    radius: u64,
) -> Result<FreeProductCertificate, PingPongError> {
    if verify.status != VerifyStatus::Verified {
        return Err(PingPongError::PreconditionViolated(
            "free-product certificate needs a Verified partition report".into(),
        ));
    }
    let certified = match evidence {
        HlEvidence::WordBall(cert) => cert.status == HlStatus::Certified,
        HlEvidence::ModelAudits { all_passed, .. } => *all_passed,
    };
    if !certified {
        return Err(PingPongError::PreconditionViolated(
            "free-product certificate needs certified hyperbolic-likeness evidence".into(),
        ));
    }
    let factors: Vec<FactorSpec> = match action {
        PingPongAction::Moebius { factors, .. } => factors.to_vec(),
        PingPongAction::Model(m) => m.factors.clone(),
    };
    let words = ball(&factors, radius);
    let ball_words = words.len() as u64;
    let brute = brute_force_ball_count(&factors, radius);
    let mut trivial = Vec::new();
    let mut witnesses = 0u64;
    for w in &words {
        let acts_trivially = match action {
            PingPongAction::Moebius { factors, assignment } => {
                match evaluate(w, factors, assignment) {
                    Ok(m) => m.is_identity(),
                    Err(e) => return Err(PingPongError::ActionMismatch(e.to_string())),
                }
            }
            PingPongAction::Model(m) => {
                let p = VirtualPoint::mark(Mark::P);
                let q = VirtualPoint::mark(Mark::Q);
                m.act(w, &p) == p && m.act(w, &q) == q
            }
        };
        if acts_trivially {
            trivial.push(w.render(&factors));
        } else {
            witnesses += 1;
        }
    }
    let status = if trivial.is_empty() && ball_words == brute {
        "certified: free product at desk scale".to_string()
    } else if ball_words != brute {
        format!("FAILED: ball count {ball_words} != brute force {brute}")
    } else {
        format!("FAILED: {} trivial words", trivial.len())
    };
    Ok(FreeProductCertificate {
        radius,
        ball_words,
        brute_force_words: brute,
        trivial_words: trivial,
        status,
        witnesses_recorded: witnesses,
    })
}

// Re-export the partition membership hook used by reports.
pub fn virtual_point_in_partition_side(model: &ModelConfig, st: Structure, x: &VirtualPoint) -> bool {
    model.in_u_side(st, x)
}

// Keep Loc/Coord in the public surface for report tooling.
pub fn describe_loc(model: &ModelConfig, st: Structure, x: &VirtualPoint) -> String {
    match model.loc(st, x) {
        Loc::AtMark(m) => format!("at {}", m.name()),
        Loc::Side { side, coord } => match coord {
            Coord::Gap { seed, offset } => format!("{side:?}-gap seed {seed} offset {offset}"),
            Coord::Core(t) => format!("{side:?}-core at {t}"),
        },
    }
}
