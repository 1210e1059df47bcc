//! Classifiers for joint fixed-point configurations: the circular word of
//! the eight fixed points of a non-commuting hyperbolic pair and its two
//! compositions, and the commutator configuration of a linked stabilizer-style
//! pair (geometric or one of four non-geometric cases).

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::circle::{circular_order, CirclePoint};
use crate::moebius::{FixedPair, MapClass, MoebiusMap};

/// Labels for the eight fixed points of f, g, fg, gf.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub enum Label {
    Af,
    Rf,
    Ag,
    Rg,
    Afg,
    Rfg,
    Agf,
    Rgf,
}

impl Label {
    pub fn short(&self) -> &'static str {
        match self {
            Label::Af => "a_f",
            Label::Rf => "r_f",
            Label::Ag => "a_g",
            Label::Rg => "r_g",
            Label::Afg => "a_fg",
            Label::Rfg => "r_fg",
            Label::Agf => "a_gf",
            Label::Rgf => "r_gf",
        }
    }

    /// The label with the roles of f and g exchanged.
    pub fn swapped(&self) -> Label {
        match self {
            Label::Af => Label::Ag,
            Label::Rf => Label::Rg,
            Label::Ag => Label::Af,
            Label::Rg => Label::Rf,
            Label::Afg => Label::Agf,
            Label::Rfg => Label::Rgf,
            Label::Agf => Label::Afg,
            Label::Rgf => Label::Rfg,
        }
    }
}

/// Cyclic sequence of coincidence classes of the eight labels, rotated so
/// the class containing a_f comes first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct EightPointWord {
    classes: Vec<Vec<Label>>,
}

impl EightPointWord {
    fn from_points(points: &[(Label, CirclePoint)]) -> Self {
        // group coincidences
        let mut classes: Vec<(CirclePoint, Vec<Label>)> = Vec::new();
        for (label, pt) in points {
            match classes.iter_mut().find(|(p, _)| p == pt) {
                Some((_, ls)) => ls.push(*label),
                None => classes.push((pt.clone(), vec![*label])),
            }
        }
        for (_, ls) in classes.iter_mut() {
            ls.sort();
        }
        // circular sort around the class containing Af
        let af_idx = classes.iter().position(|(_, ls)| ls.contains(&Label::Af)).unwrap();
        let ref_pt = classes[af_idx].0.clone();
        let mut rest: Vec<(CirclePoint, Vec<Label>)> =
            classes.into_iter().enumerate().filter(|(i, _)| *i != af_idx).map(|(_, c)| c).collect();
        rest.sort_by(|(p, _), (q, _)| match circular_order(&ref_pt, p, q) {
            1 => std::cmp::Ordering::Less,
            -1 => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Equal,
        });
        let mut word = vec![points_class(&ref_pt, points)];
        word.extend(rest.into_iter().map(|(_, ls)| ls));
        EightPointWord { classes: word }
    }

    pub fn classes(&self) -> &[Vec<Label>] {
        &self.classes
    }

    pub fn coincidence_free(&self) -> bool {
        self.classes.iter().all(|c| c.len() == 1)
    }

    /// The same word with f and g exchanged (relabel then re-rotate).
    pub fn swap_fg(&self) -> EightPointWord {
        let mut classes: Vec<Vec<Label>> = self
            .classes
            .iter()
            .map(|c| {
                let mut v: Vec<Label> = c.iter().map(|l| l.swapped()).collect();
                v.sort();
                v
            })
            .collect();
        let af = classes.iter().position(|c| c.contains(&Label::Af)).unwrap();
        classes.rotate_left(af);
        EightPointWord { classes }
    }
}

fn points_class(p: &CirclePoint, points: &[(Label, CirclePoint)]) -> Vec<Label> {
    let mut ls: Vec<Label> = points.iter().filter(|(_, q)| q == p).map(|(l, _)| *l).collect();
    ls.sort();
    ls
}

impl fmt::Display for EightPointWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .classes
            .iter()
            .map(|c| {
                let inner: Vec<&str> = c.iter().map(|l| l.short()).collect();
                if inner.len() == 1 {
                    inner[0].to_string()
                } else {
                    format!("{{{}}}", inner.join("="))
                }
            })
            .collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

impl serde::Serialize for EightPointWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum RowHint {
    Row1,
    Row2,
    Row3,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct PairClass {
    pub word: EightPointWord,
    pub row_hint: RowHint,
    /// For row 1: whether the composition fixed points landed in the arc
    /// between the attracting points (with a_gf between a_fg and a_g) and
    /// the repelling points in the companion arc.
    pub row1_containments: Option<bool>,
    pub fix_f: FixedPair,
    pub fix_g: FixedPair,
    pub fix_fg: FixedPair,
    pub fix_gf: FixedPair,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    NotHyperbolic { which: &'static str, class: MapClass },
    CompositionNotHyperbolic { which: &'static str, class: MapClass },
    SharedFixedPoint,
    Commuting,
    PreconditionViolated(String),
    CommutatorNotHyperbolic { which: String, class: MapClass },
}

impl fmt::Display for ClassifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifyError::NotHyperbolic { which, class } => write!(f, "{which} is {class:?}, not hyperbolic"),
            ClassifyError::CompositionNotHyperbolic { which, class } => {
                write!(f, "composition {which} is {class:?}, not hyperbolic")
            }
            ClassifyError::SharedFixedPoint => write!(f, "maps share a fixed point"),
            ClassifyError::Commuting => write!(f, "maps commute"),
            ClassifyError::PreconditionViolated(m) => write!(f, "precondition violated: {m}"),
            ClassifyError::CommutatorNotHyperbolic { which, class } => {
                write!(f, "commutator {which} is {class:?}, not hyperbolic")
            }
        }
    }
}
impl std::error::Error for ClassifyError {}

fn require_hyperbolic(m: &MoebiusMap, which: &'static str) -> Result<FixedPair, ClassifyError> {
    match m.classify() {
        MapClass::Hyperbolic => Ok(m.fixed_pair().expect("hyperbolic")),
        class => Err(ClassifyError::NotHyperbolic { which, class }),
    }
}

/// Emits the canonical eight-point circular word of Fix(f), Fix(g), Fix(fg),
/// Fix(gf), plus the row hint of the composition table.
pub fn classify_pair(f: &MoebiusMap, g: &MoebiusMap) -> Result<PairClass, ClassifyError> {
    if f.commutes(g) {
        return Err(ClassifyError::Commuting);
    }
    if f.shares_fixed_point(g) {
        return Err(ClassifyError::SharedFixedPoint);
    }
    let fix_f = require_hyperbolic(f, "f")?;
    let fix_g = require_hyperbolic(g, "g")?;
    let fg = f.compose(g);
    let gf = g.compose(f);
    let fix_fg = match fg.classify() {
        MapClass::Hyperbolic => fg.fixed_pair().unwrap(),
        class => return Err(ClassifyError::CompositionNotHyperbolic { which: "f*g", class }),
    };
    let fix_gf = match gf.classify() {
        MapClass::Hyperbolic => gf.fixed_pair().unwrap(),
        class => return Err(ClassifyError::CompositionNotHyperbolic { which: "g*f", class }),
    };

    let points = vec![
        (Label::Af, fix_f.attracting.clone()),
        (Label::Rf, fix_f.repelling.clone()),
        (Label::Ag, fix_g.attracting.clone()),
        (Label::Rg, fix_g.repelling.clone()),
        (Label::Afg, fix_fg.attracting.clone()),
        (Label::Rfg, fix_fg.repelling.clone()),
        (Label::Agf, fix_gf.attracting.clone()),
        (Label::Rgf, fix_gf.repelling.clone()),
    ];
    let word = EightPointWord::from_points(&points);

    let (af, rf, ag, rg) = (&fix_f.attracting, &fix_f.repelling, &fix_g.attracting, &fix_g.repelling);
    // Row 1 iff some arc bounded by a_f, a_g contains neither r_f nor r_g.
    let arc1 = |x: &CirclePoint| circular_order(af, x, ag) == 1;
    let arc2 = |x: &CirclePoint| circular_order(ag, x, af) == 1;
    let row1 = (!arc1(rf) && !arc1(rg)) || (!arc2(rf) && !arc2(rg));
    let row_hint = if row1 {
        RowHint::Row1
    } else if circular_order(af, rg, ag) == 1 && circular_order(rg, ag, rf) == 1 {
        RowHint::Row2
    } else if circular_order(af, rf, ag) == 1 && circular_order(rf, ag, rg) == 1 {
        RowHint::Row3
    } else {
        RowHint::Unknown
    };

    let row1_containments = if row1 {
        // I = the arc between a_f and a_g avoiding both repelling points.
        let i_is_arc1 = !arc1(rf) && !arc1(rg);
        let in_i = |x: &CirclePoint| if i_is_arc1 { arc1(x) } else { arc2(x) };
        let a_in = in_i(&fix_fg.attracting) && in_i(&fix_gf.attracting);
        // a_gf between a_fg and a_g inside I
        let between_a = if i_is_arc1 {
            circular_order(&fix_fg.attracting, &fix_gf.attracting, ag) == 1
        } else {
            circular_order(ag, &fix_gf.attracting, &fix_fg.attracting) == 1
        };
        // J = the arc between r_f and r_g avoiding both attracting points.
        let jarc1 = |x: &CirclePoint| circular_order(rf, x, rg) == 1;
        let jarc2 = |x: &CirclePoint| circular_order(rg, x, rf) == 1;
        let j_is_arc1 = !jarc1(af) && !jarc1(ag);
        let in_j = |x: &CirclePoint| if j_is_arc1 { jarc1(x) } else { jarc2(x) };
        let r_in = in_j(&fix_fg.repelling) && in_j(&fix_gf.repelling);
        // r_gf between r_fg and r_f inside J (mirror of the attracting rule,
        // applied to the inverse compositions)
        let between_r = if j_is_arc1 {
            circular_order(rf, &fix_gf.repelling, &fix_fg.repelling) == 1
        } else {
            circular_order(&fix_fg.repelling, &fix_gf.repelling, rf) == 1
        };
        Some(a_in && between_a && r_in && between_r)
    } else {
        None
    };

    Ok(PairClass { word, row_hint, row1_containments, fix_f, fix_g, fix_fg, fix_gf })
}

/// One exactly verified circular inequality, for reports.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CheckedRelation {
    pub relation: String,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CommutatorLabel {
    Geometric,
    NonGeometric1,
    NonGeometric2,
    NonGeometric3,
    NonGeometric4,
    Unmatched,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CommutatorClass {
    pub label: CommutatorLabel,
    /// Fixed pairs of [f,h], [h,f^-1], [h^-1,f], [f^-1,h^-1].
    pub fix_fh: FixedPair,
    pub fix_hfinv: FixedPair,
    pub fix_hinvf: FixedPair,
    pub fix_finvhinv: FixedPair,
    pub conjugacy_transport_ok: bool,
    pub checks: Vec<CheckedRelation>,
}

struct ChainCheck {
    relations: Vec<CheckedRelation>,
    ok: bool,
}

fn check_cyclic_chain(points: &[(String, CirclePoint)]) -> ChainCheck {
    let mut relations = Vec::new();
    let mut ok = true;
    let first = &points[0];
    for i in 1..points.len() - 1 {
        let holds = circular_order(&first.1, &points[i].1, &points[i + 1].1) == 1;
        relations.push(CheckedRelation {
            relation: format!("{} < {} < {}", first.0, points[i].0, points[i + 1].0),
            holds,
        });
        ok &= holds;
    }
    ChainCheck { relations, ok }
}

fn in_open_arc(lo: &CirclePoint, x: &CirclePoint, hi: &CirclePoint) -> bool {
    circular_order(lo, x, hi) == 1
}

/// Classifies the commutator configuration of a stabilizer-style pair:
/// h with repelling point p and attracting point pbar, f with repelling q
/// and attracting qbar, fixed pairs linked in the arrangement
/// p < q < pbar < qbar.
pub fn classify_commutator(h: &MoebiusMap, f: &MoebiusMap) -> Result<CommutatorClass, ClassifyError> {
    let fix_h = require_hyperbolic(h, "h")?;
    let fix_f = require_hyperbolic(f, "f")?;
    let p = fix_h.repelling.clone();
    let pbar = fix_h.attracting.clone();
    let q = fix_f.repelling.clone();
    let qbar = fix_f.attracting.clone();
    if h.commutes(f) {
        return Err(ClassifyError::Commuting);
    }
    if h.shares_fixed_point(f) {
        return Err(ClassifyError::SharedFixedPoint);
    }
    match crate::circle::linked((&p, &pbar), (&q, &qbar)) {
        Ok(true) => {}
        Ok(false) => {
            return Err(ClassifyError::PreconditionViolated(
                "fixed pairs are unlinked".to_string(),
            ))
        }
        Err(_) => return Err(ClassifyError::SharedFixedPoint),
    }
    // exact arrangement p < q < pbar < qbar
    if !(circular_order(&p, &q, &pbar) == 1 && circular_order(&p, &pbar, &qbar) == 1) {
        return Err(ClassifyError::PreconditionViolated(format!(
            "arrangement r(h) < r(f) < a(h) < a(f) fails for p={p}, q={q}, pbar={pbar}, qbar={qbar}"
        )));
    }

    let hinv = h.inverse();
    let finv = f.inverse();
    let comms: [(&str, MoebiusMap); 4] = [
        ("[f,h]", f.commutator(h)),
        ("[h,f^-1]", h.commutator(&finv)),
        ("[h^-1,f]", hinv.commutator(f)),
        ("[f^-1,h^-1]", finv.commutator(&hinv)),
    ];
    let mut pairs = Vec::new();
    for (name, c) in &comms {
        match c.classify() {
            MapClass::Hyperbolic => pairs.push(c.fixed_pair().unwrap()),
            class => {
                return Err(ClassifyError::CommutatorNotHyperbolic { which: name.to_string(), class })
            }
        }
    }
    let fix_fh = pairs[0].clone();
    let fix_hfinv = pairs[1].clone();
    let fix_hinvf = pairs[2].clone();
    let fix_finvhinv = pairs[3].clone();

    // Conjugacy square: h carries [f^-1,h^-1] to [h,f^-1]; f carries it to
    // [h^-1,f]; f carries [h,f^-1] to [f,h]; h carries [h^-1,f] to [f,h].
    let transport = |g: &MoebiusMap, from: &FixedPair, to: &FixedPair| -> bool {
        g.apply(&from.attracting) == to.attracting && g.apply(&from.repelling) == to.repelling
    };
    let conjugacy_transport_ok = transport(h, &fix_finvhinv, &fix_hfinv)
        && transport(f, &fix_finvhinv, &fix_hinvf)
        && transport(f, &fix_hfinv, &fix_fh)
        && transport(h, &fix_hinvf, &fix_fh);

    let ap = |g: &MoebiusMap, x: &CirclePoint| g.apply(x);
    let hq = ap(h, &q);
    let hqbar = ap(h, &qbar);
    let hinv_q = ap(&hinv, &q);
    let hinv_qbar = ap(&hinv, &qbar);
    let fp = ap(f, &p);
    let fpbar = ap(f, &pbar);
    let finv_p = ap(&finv, &p);
    let finv_pbar = ap(&finv, &pbar);

    let mut checks: Vec<CheckedRelation> = Vec::new();

    // Geometric: the full 20-point cyclic chain.
    let geo_points: Vec<(String, CirclePoint)> = vec![
        ("p".into(), p.clone()),
        ("h^-1(q)".into(), hinv_q.clone()),
        ("r[f^-1,h^-1]".into(), fix_finvhinv.repelling.clone()),
        ("a[f^-1,h^-1]".into(), fix_finvhinv.attracting.clone()),
        ("f^-1(p)".into(), finv_p.clone()),
        ("q".into(), q.clone()),
        ("f^-1(pbar)".into(), finv_pbar.clone()),
        ("r[h,f^-1]".into(), fix_hfinv.repelling.clone()),
        ("a[h,f^-1]".into(), fix_hfinv.attracting.clone()),
        ("h(q)".into(), hq.clone()),
        ("pbar".into(), pbar.clone()),
        ("h(qbar)".into(), hqbar.clone()),
        ("r[f,h]".into(), fix_fh.repelling.clone()),
        ("a[f,h]".into(), fix_fh.attracting.clone()),
        ("f(pbar)".into(), fpbar.clone()),
        ("qbar".into(), qbar.clone()),
        ("f(p)".into(), fp.clone()),
        ("r[h^-1,f]".into(), fix_hinvf.repelling.clone()),
        ("a[h^-1,f]".into(), fix_hinvf.attracting.clone()),
        ("h^-1(qbar)".into(), hinv_qbar.clone()),
    ];
    let geo = check_cyclic_chain(&geo_points);
    if geo.ok {
        checks.extend(geo.relations);
        return Ok(CommutatorClass {
            label: CommutatorLabel::Geometric,
            fix_fh,
            fix_hfinv,
            fix_hinvf,
            fix_finvhinv,
            conjugacy_transport_ok,
            checks,
        });
    }

    // Non-geometric cases: the defining chain plus the conjugate-location
    // containments. Quadrants are (p,q), (q,pbar), (pbar,qbar), (qbar,p).
    struct NgCase {
        label: CommutatorLabel,
        chain: Vec<(String, CirclePoint)>,
        containments: Vec<(String, FixedPair, CirclePoint, CirclePoint)>,
    }

    let contain = |name: &str, pair: &FixedPair, lo: &CirclePoint, hi: &CirclePoint| {
        (name.to_string(), pair.clone(), lo.clone(), hi.clone())
    };

    let cases = vec![
        // (2.I) fixed points of all commutators in (p, q)
        NgCase {
            label: CommutatorLabel::NonGeometric1,
            chain: vec![
                ("p".into(), p.clone()),
                ("f^-1(p)".into(), finv_p.clone()),
                ("a[f^-1,h^-1]".into(), fix_finvhinv.attracting.clone()),
                ("r[f^-1,h^-1]".into(), fix_finvhinv.repelling.clone()),
                ("h^-1(q)".into(), hinv_q.clone()),
                ("q".into(), q.clone()),
            ],
            containments: vec![
                contain("Fix[h^-1,f] in (p, f h^-1(q))", &fix_hinvf, &p, &ap(f, &hinv_q)),
                contain("Fix[h,f^-1] in (h f^-1(p), q)", &fix_hfinv, &ap(h, &finv_p), &q),
                contain(
                    "Fix[f,h] in (f h f^-1(p), h f h^-1(q))",
                    &fix_fh,
                    &ap(f, &ap(h, &finv_p)),
                    &ap(h, &ap(f, &hinv_q)),
                ),
            ],
        },
        // (2.II) fixed points in (q, pbar)
        NgCase {
            label: CommutatorLabel::NonGeometric2,
            chain: vec![
                ("q".into(), q.clone()),
                ("h(q)".into(), hq.clone()),
                ("a[h,f^-1]".into(), fix_hfinv.attracting.clone()),
                ("r[h,f^-1]".into(), fix_hfinv.repelling.clone()),
                ("f^-1(pbar)".into(), finv_pbar.clone()),
                ("pbar".into(), pbar.clone()),
            ],
            containments: vec![
                contain("Fix[f,h] in (f h(q), pbar)", &fix_fh, &ap(f, &hq), &pbar),
                contain(
                    "Fix[f^-1,h^-1] in (q, h^-1 f^-1(pbar))",
                    &fix_finvhinv,
                    &q,
                    &ap(&hinv, &finv_pbar),
                ),
                contain(
                    "Fix[h^-1,f] in (h^-1 f h(q), f h^-1 f^-1(pbar))",
                    &fix_hinvf,
                    &ap(&hinv, &ap(f, &hq)),
                    &ap(f, &ap(&hinv, &finv_pbar)),
                ),
            ],
        },
        // (2.III) fixed points in (pbar, qbar)
        NgCase {
            label: CommutatorLabel::NonGeometric3,
            chain: vec![
                ("pbar".into(), pbar.clone()),
                ("f(pbar)".into(), fpbar.clone()),
                ("a[f,h]".into(), fix_fh.attracting.clone()),
                ("r[f,h]".into(), fix_fh.repelling.clone()),
                ("h(qbar)".into(), hqbar.clone()),
                ("qbar".into(), qbar.clone()),
            ],
            containments: vec![
                contain("Fix[h,f^-1] in (pbar, f^-1 h(qbar))", &fix_hfinv, &pbar, &ap(&finv, &hqbar)),
                contain("Fix[h^-1,f] in (h^-1 f(pbar), qbar)", &fix_hinvf, &ap(&hinv, &fpbar), &qbar),
                contain(
                    "Fix[f^-1,h^-1] in (f^-1 h^-1 f(pbar), h^-1 f^-1 h(qbar))",
                    &fix_finvhinv,
                    &ap(&finv, &ap(&hinv, &fpbar)),
                    &ap(&hinv, &ap(&finv, &hqbar)),
                ),
            ],
        },
        // (2.IV) fixed points in (qbar, p)
        NgCase {
            label: CommutatorLabel::NonGeometric4,
            chain: vec![
                ("qbar".into(), qbar.clone()),
                ("h^-1(qbar)".into(), hinv_qbar.clone()),
                ("a[h^-1,f]".into(), fix_hinvf.attracting.clone()),
                ("r[h^-1,f]".into(), fix_hinvf.repelling.clone()),
                ("f(p)".into(), fp.clone()),
                ("p".into(), p.clone()),
            ],
            containments: vec![
                contain("Fix[f,h] in (qbar, h f(p))", &fix_fh, &qbar, &ap(h, &fp)),
                contain("Fix[f^-1,h^-1] in (f^-1 h^-1(qbar), p)", &fix_finvhinv, &ap(&finv, &hinv_qbar), &p),
                contain(
                    "Fix[h,f^-1] in (h f^-1 h^-1(qbar), f^-1 h f(p))",
                    &fix_hfinv,
                    &ap(h, &ap(&finv, &hinv_qbar)),
                    &ap(&finv, &ap(h, &fp)),
                ),
            ],
        },
    ];

    checks.extend(geo.relations);
    for case in cases {
        let chain = check_cyclic_chain(&case.chain);
        let mut all = chain.ok;
        let mut case_checks = chain.relations;
        for (name, pair, lo, hi) in &case.containments {
            let holds = in_open_arc(lo, &pair.repelling, hi) && in_open_arc(lo, &pair.attracting, hi);
            case_checks.push(CheckedRelation { relation: name.clone(), holds });
            all &= holds;
        }
        checks.extend(case_checks);
        if all {
            return Ok(CommutatorClass {
                label: case.label,
                fix_fh,
                fix_hfinv,
                fix_hinvf,
                fix_finvhinv,
                conjugacy_transport_ok,
                checks,
            });
        }
    }

    Ok(CommutatorClass {
        label: CommutatorLabel::Unmatched,
        fix_fh,
        fix_hfinv,
        fix_hinvf,
        fix_finvhinv,
        conjugacy_transport_ok,
        checks,
    })
}

/// Census of eight-point words over seeded pseudo-random pairs with entries
/// uniform in [-9, 9]. Deterministic per (seed, index) substream, so a
/// parallel fan-out merges to the same result.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Census {
    pub samples: u64,
    pub counts: BTreeMap<String, u64>,
    pub coincidence_free_classes: usize,
    pub row1_containment_failures: u64,
}

pub fn sample_pair(seed: u64, index: u64) -> (MoebiusMap, MoebiusMap) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    loop {
        let draw = |rng: &mut ChaCha8Rng| -> Option<MoebiusMap> {
            let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-9..=9)).collect();
            MoebiusMap::new(e[0], e[1], e[2], e[3]).ok()
        };
        let Some(f) = draw(&mut rng) else { continue };
        let Some(g) = draw(&mut rng) else { continue };
        if f.classify() != MapClass::Hyperbolic || g.classify() != MapClass::Hyperbolic {
            continue;
        }
        if f.commutes(&g) || f.shares_fixed_point(&g) {
            continue;
        }
        if f.compose(&g).classify() != MapClass::Hyperbolic
            || g.compose(&f).classify() != MapClass::Hyperbolic
        {
            continue;
        }
        return (f, g);
    }
}

pub fn census(sample_count: u64, seed: u64) -> Census {
    census_with_threads(sample_count, seed, 1)
}

/// Fan the sampling out over `threads` workers; results are merged in index
/// order and independent of the thread count.
pub fn census_with_threads(sample_count: u64, seed: u64, threads: usize) -> Census {
    let threads = threads.max(1);
    let classify_one = |i: u64| -> (String, bool, bool) {
        let (f, g) = sample_pair(seed, i);
        let pc = classify_pair(&f, &g).expect("sampled pair satisfies preconditions");
        (
            pc.word.to_string(),
            pc.word.coincidence_free(),
            pc.row1_containments == Some(false),
        )
    };
    let results: Vec<(String, bool, bool)> = if threads == 1 {
        (0..sample_count).map(classify_one).collect()
    } else {
        std::thread::scope(|scope| {
            let chunk = sample_count.div_ceil(threads as u64);
            let mut handles = Vec::new();
            for t in 0..threads as u64 {
                let lo = t * chunk;
                let hi = (lo + chunk).min(sample_count);
                handles.push(scope.spawn(move || (lo..hi).map(classify_one).collect::<Vec<_>>()));
            }
            let mut all = Vec::with_capacity(sample_count as usize);
            for h in handles {
                all.extend(h.join().expect("census worker"));
            }
            all
        })
    };
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    let mut coincidence_free: BTreeMap<String, bool> = BTreeMap::new();
    let mut row1_failures = 0u64;
    for (word, cfree, row1_fail) in results {
        *counts.entry(word.clone()).or_insert(0) += 1;
        coincidence_free.insert(word, cfree);
        if row1_fail {
            row1_failures += 1;
        }
    }
    let coincidence_free_classes = coincidence_free.values().filter(|&&v| v).count();
    Census {
        samples: sample_count,
        counts,
        coincidence_free_classes,
        row1_containment_failures: row1_failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> MoebiusMap {
        MoebiusMap::new(a, b, c, d).unwrap()
    }

    #[test]
    fn classify_pair_fixture() {
        // f = diag(4,1) fixes {0, oo}; g fixes {1, -1}; fg fixes (-5 +- sqrt41)/2,
        // gf fixes (-5 +- sqrt41)/8.
        let f = m(4, 0, 0, 1);
        let g = m(5, -3, -3, 5);
        let pc = classify_pair(&f, &g).unwrap();
        assert!(pc.word.coincidence_free());
        let labels: Vec<Label> = pc.word.classes().iter().map(|c| c[0]).collect();
        assert_eq!(
            labels,
            vec![
                Label::Af,
                Label::Afg,
                Label::Agf,
                Label::Ag,
                Label::Rf,
                Label::Rgf,
                Label::Rfg,
                Label::Rg
            ]
        );
        assert_eq!(pc.row_hint, RowHint::Row1);
        assert_eq!(pc.row1_containments, Some(true));
    }

    #[test]
    fn classify_pair_swap_symmetry() {
        let f = m(4, 0, 0, 1);
        let g = m(5, -3, -3, 5);
        let pc1 = classify_pair(&f, &g).unwrap();
        let pc2 = classify_pair(&g, &f).unwrap();
        assert_eq!(pc1.word.swap_fg(), pc2.word);
    }

    #[test]
    fn classify_pair_errors() {
        let f = m(4, 0, 0, 1);
        assert_eq!(classify_pair(&f, &m(1, 1, 0, 1)).unwrap_err(), ClassifyError::SharedFixedPoint);
        assert_eq!(classify_pair(&f, &m(2, 0, 0, 1)).unwrap_err(), ClassifyError::Commuting);
        // elliptic-order-2 conjugate: commuting diagonal pair
        let h = MoebiusMap::new(0, -1, 1, 0).unwrap();
        let g = h.compose(&f).compose(&h.inverse());
        assert_eq!(classify_pair(&f, &g).unwrap_err(), ClassifyError::Commuting);
    }

    #[test]
    fn commutator_elliptic_for_weak_pair() {
        // The raw pair has an elliptic commutator: the classifier reports it.
        let h = m(4, 0, 0, 1);
        let f = m(5, -3, -3, 5);
        let err = classify_commutator(&h, &f).unwrap_err();
        assert!(matches!(err, ClassifyError::CommutatorNotHyperbolic { .. }));
    }

    #[test]
    fn commutator_geometric_for_cubes() {
        let h = m(4, 0, 0, 1).pow(3);
        let f = m(5, -3, -3, 5).pow(3);
        let cc = classify_commutator(&h, &f).unwrap();
        assert_eq!(cc.label, CommutatorLabel::Geometric);
        assert!(cc.conjugacy_transport_ok);
        assert!(cc.checks.iter().filter(|c| c.holds).count() >= 18);
    }

    #[test]
    fn commutator_arrangement_precondition() {
        let h = m(4, 0, 0, 1).pow(3);
        let f = m(5, -3, -3, 5).pow(3);
        // swapped roles: r(f)=1 is not followed by r(h)=0 in the arrangement
        let err = classify_commutator(&f, &h).unwrap_err();
        assert!(matches!(err, ClassifyError::PreconditionViolated(_)));
        // unlinked pair: g fixes (1 +- sqrt5)/2, both positive
        let g = m(2, 1, 1, 1);
        let err2 = classify_commutator(&h, &g).unwrap_err();
        assert!(matches!(err2, ClassifyError::PreconditionViolated(_)));
    }

    #[test]
    fn census_deterministic_and_bounded() {
        let c1 = census(200, 42);
        let c2 = census(200, 42);
        assert_eq!(c1, c2);
        let c3 = census_with_threads(200, 42, 4);
        assert_eq!(c1, c3);
        assert!(c3.coincidence_free_classes <= 14);
        assert_eq!(c3.row1_containment_failures, 0);
        let single = census(1, 7);
        assert_eq!(single.counts.values().sum::<u64>(), 1);
    }
}
