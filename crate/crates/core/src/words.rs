//! Free products of finitely generated abelian groups: normal forms,
//! deterministic word-ball enumeration by l1 exponent mass, evaluation into
//! Moebius maps, and radius-bounded hyperbolic-likeness certificates.

use std::collections::BTreeMap;
use std::fmt;

use crate::moebius::{MapClass, MoebiusMap};

pub type FactorId = usize;

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FactorSpec {
    pub name: String,
    pub rank: usize,
    pub generator_names: Vec<String>,
}

impl FactorSpec {
    pub fn new(name: &str, generator_names: &[&str]) -> Self {
        assert!(!generator_names.is_empty());
        FactorSpec {
            name: name.to_string(),
            rank: generator_names.len(),
            generator_names: generator_names.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// One syllable: a nonzero exponent vector in one abelian factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Syllable {
    pub factor: FactorId,
    pub exponents: Vec<i64>,
}

impl Syllable {
    pub fn l1(&self) -> u64 {
        self.exponents.iter().map(|e| e.unsigned_abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.exponents.iter().all(|&e| e == 0)
    }

    fn merged(&self, other: &Syllable) -> Syllable {
        debug_assert_eq!(self.factor, other.factor);
        Syllable {
            factor: self.factor,
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn inverse(&self) -> Syllable {
        Syllable { factor: self.factor, exponents: self.exponents.iter().map(|e| -e).collect() }
    }
}

/// Reduced word: alternating factors, no zero syllables; empty = identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct NormalWord {
    syllables: Vec<Syllable>,
}

impl NormalWord {
    pub fn identity() -> Self {
        NormalWord { syllables: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.syllables
    }

    pub fn from_syllables(sylls: Vec<Syllable>) -> Self {
        let mut w = NormalWord::identity();
        for s in sylls {
            w = w.multiply_syllable(&s);
        }
        w
    }

    pub fn single(factor: FactorId, exponents: Vec<i64>) -> Self {
        Self::from_syllables(vec![Syllable { factor, exponents }])
    }

    /// Generator `idx` of `factor`, to the power `e`.
    pub fn generator(factor: FactorId, rank: usize, idx: usize, e: i64) -> Self {
        let mut exps = vec![0i64; rank];
        exps[idx] = e;
        Self::single(factor, exps)
    }

    pub fn l1(&self) -> u64 {
        self.syllables.iter().map(|s| s.l1()).sum()
    }

    fn multiply_syllable(&self, s: &Syllable) -> NormalWord {
        if s.is_zero() {
            return self.clone();
        }
        let mut out = self.syllables.clone();
        match out.last() {
            Some(last) if last.factor == s.factor => {
                let merged = out.pop().unwrap().merged(s);
                if merged.is_zero() {
                    NormalWord { syllables: out }
                } else {
                    out.push(merged);
                    NormalWord { syllables: out }
                }
            }
            _ => {
                out.push(s.clone());
                NormalWord { syllables: out }
            }
        }
    }

    /// Normal form of the product, merging and cancelling at the boundary.
    pub fn multiply(&self, rhs: &NormalWord) -> NormalWord {
        let mut acc = self.clone();
        for s in &rhs.syllables {
            acc = acc.multiply_syllable(s);
        }
        acc
    }

    pub fn inverse(&self) -> NormalWord {
        NormalWord { syllables: self.syllables.iter().rev().map(|s| s.inverse()).collect() }
    }

    /// Commutator [u, v] = u v u^-1 v^-1.
    pub fn commutator(u: &NormalWord, v: &NormalWord) -> NormalWord {
        u.multiply(v).multiply(&u.inverse()).multiply(&v.inverse())
    }

    pub fn first(&self) -> Option<&Syllable> {
        self.syllables.first()
    }

    pub fn last(&self) -> Option<&Syllable> {
        self.syllables.last()
    }

    /// Splits off the first syllable.
    pub fn split_first(&self) -> Option<(Syllable, NormalWord)> {
        let (head, tail) = self.syllables.split_first()?;
        Some((head.clone(), NormalWord { syllables: tail.to_vec() }))
    }

    /// Drops the last syllable (used by canonical base absorption).
    pub fn drop_last(&self) -> NormalWord {
        let mut s = self.syllables.clone();
        s.pop();
        NormalWord { syllables: s }
    }

    pub fn render(&self, factors: &[FactorSpec]) -> String {
        if self.is_identity() {
            return "id".to_string();
        }
        let mut parts = Vec::new();
        for syl in &self.syllables {
            for (i, &e) in syl.exponents.iter().enumerate() {
                if e != 0 {
                    let name = &factors[syl.factor].generator_names[i];
                    if e == 1 {
                        parts.push(name.clone());
                    } else {
                        parts.push(format!("{name}^{e}"));
                    }
                }
            }
        }
        parts.join("*")
    }
}

impl fmt::Display for NormalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "id");
        }
        for (i, s) in self.syllables.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "F{}{:?}", s.factor, s.exponents)?;
        }
        Ok(())
    }
}

impl serde::Serialize for NormalWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// All nonzero exponent vectors of the given rank with l1 mass exactly `m`,
/// in lexicographic order.
fn vectors_of_mass(rank: usize, m: u64) -> Vec<Vec<i64>> {
    fn rec(rank: usize, m: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if rank == 0 {
            if m == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for v in -m..=m {
            prefix.push(v);
            rec(rank - 1, m - v.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(rank, m as i64, &mut Vec::new(), &mut out);
    out
}

/// Deterministic stream of all nontrivial normal words with total l1 mass at
/// most `radius`: ordered by mass, then lexicographically by syllable list.
pub fn ball(factors: &[FactorSpec], radius: u64) -> Vec<NormalWord> {
    let mut out = Vec::new();
    for mass in 1..=radius {
        let mut stratum = Vec::new();
        for first_factor in 0..factors.len() {
            extend_words(
                factors,
                first_factor,
                mass,
                &mut Vec::new(),
                &mut stratum,
            );
        }
        stratum.sort();
        out.extend(stratum.into_iter().map(|s| NormalWord { syllables: s }));
    }
    out
}

fn extend_words(
    factors: &[FactorSpec],
    factor: FactorId,
    remaining: u64,
    prefix: &mut Vec<Syllable>,
    out: &mut Vec<Vec<Syllable>>,
) {
    for m in 1..=remaining {
        for exps in vectors_of_mass(factors[factor].rank, m) {
            prefix.push(Syllable { factor, exponents: exps });
            if m == remaining {
                out.push(prefix.clone());
            } else {
                for next in 0..factors.len() {
                    if next != factor {
                        extend_words(factors, next, remaining - m, prefix, out);
                    }
                }
            }
            prefix.pop();
        }
    }
}

/// Assignment of a Moebius map to each generator name.
pub type Assignment = BTreeMap<String, MoebiusMap>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordError {
    FactorNotAbelian { factor: String, g1: String, g2: String },
    MissingGenerator(String),
}

impl fmt::Display for WordError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordError::FactorNotAbelian { factor, g1, g2 } => {
                write!(f, "generators {g1} and {g2} of factor {factor} do not commute")
            }
            WordError::MissingGenerator(g) => write!(f, "no map assigned to generator {g}"),
        }
    }
}
impl std::error::Error for WordError {}

/// Checks that the generators within each factor pairwise commute.
pub fn check_abelian(factors: &[FactorSpec], assignment: &Assignment) -> Result<(), WordError> {
    for f in factors {
        for (i, g1) in f.generator_names.iter().enumerate() {
            let m1 = assignment.get(g1).ok_or_else(|| WordError::MissingGenerator(g1.clone()))?;
            for g2 in f.generator_names.iter().skip(i + 1) {
                let m2 = assignment.get(g2).ok_or_else(|| WordError::MissingGenerator(g2.clone()))?;
                if !m1.commutes(m2) {
                    return Err(WordError::FactorNotAbelian {
                        factor: f.name.clone(),
                        g1: g1.clone(),
                        g2: g2.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Canonical product matrix of the word under the assignment.
pub fn evaluate(
    word: &NormalWord,
    factors: &[FactorSpec],
    assignment: &Assignment,
) -> Result<MoebiusMap, WordError> {
    check_abelian(factors, assignment)?;
    let mut acc = MoebiusMap::identity();
    for syl in word.syllables() {
        let spec = &factors[syl.factor];
        for (i, &e) in syl.exponents.iter().enumerate() {
            if e != 0 {
                let name = &spec.generator_names[i];
                let m = assignment.get(name).ok_or_else(|| WordError::MissingGenerator(name.clone()))?;
                acc = acc.compose(&m.pow(e));
            }
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum HlStatus {
    Certified,
    Refuted { witness: NormalWord, class: MapClass },
}

/// Radius-bounded hyperbolic-likeness certificate: Certified means every
/// nontrivial word with l1 mass <= radius evaluates to a hyperbolic map.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct HlCertificate {
    pub radius: u64,
    pub words_checked: u64,
    pub status: HlStatus,
}

pub fn certify_hyperbolic_like(
    factors: &[FactorSpec],
    assignment: &Assignment,
    radius: u64,
) -> Result<HlCertificate, WordError> {
    check_abelian(factors, assignment)?;
    let mut checked = 0u64;
    for w in ball(factors, radius) {
        checked += 1;
        let m = evaluate(&w, factors, assignment)?;
        match m.classify() {
            MapClass::Hyperbolic => {}
            cls => {
                return Ok(HlCertificate {
                    radius,
                    words_checked: checked,
                    status: HlStatus::Refuted { witness: w, class: cls },
                })
            }
        }
    }
    Ok(HlCertificate { radius, words_checked: checked, status: HlStatus::Certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn two_cyclic() -> Vec<FactorSpec> {
        vec![FactorSpec::new("H", &["h"]), FactorSpec::new("K", &["f"])]
    }

    #[test]
    fn cancellation_and_merge() {
        let h = NormalWord::single(0, vec![1]);
        let hinv = NormalWord::single(0, vec![-1]);
        assert!(h.multiply(&hinv).is_identity());

        let u = h.multiply(&NormalWord::single(1, vec![1])); // h f
        let v = NormalWord::single(1, vec![-1]).multiply(&NormalWord::single(0, vec![2])); // f^-1 h^2
        let prod = u.multiply(&v);
        assert_eq!(prod, NormalWord::single(0, vec![3]));

        // abelian factor addition inside one syllable
        let hh = NormalWord::single(0, vec![1, 1]);
        let k = NormalWord::single(0, vec![-1, 0]);
        assert_eq!(hh.multiply(&k), NormalWord::single(0, vec![0, 1]));
    }

    /// Independent brute-force enumerator: BFS over generator multiplications
    /// with set-based deduplication of normal forms.
    fn brute_force_ball(factors: &[FactorSpec], radius: u64) -> BTreeSet<NormalWord> {
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
                    if !p.is_identity() && p.l1() <= radius && !seen.contains(&p) {
                        seen.insert(p.clone());
                        next.push(p);
                    }
                }
            }
            frontier = next;
        }
        seen
    }

    #[test]
    fn ball_radius_one() {
        let words = ball(&two_cyclic(), 1);
        assert_eq!(words.len(), 4);
    }

    #[test]
    fn ball_matches_brute_force() {
        for radius in 1..=4 {
            let words = ball(&two_cyclic(), radius);
            let brute = brute_force_ball(&two_cyclic(), radius);
            assert_eq!(words.len(), brute.len(), "radius {radius}");
            let as_set: BTreeSet<_> = words.iter().cloned().collect();
            assert_eq!(as_set, brute);
            assert_eq!(as_set.len(), words.len(), "no duplicates");
        }
        // rank-2 single factor, radius 2: lattice points with |m|+|n| <= 2
        let one_rank2 = vec![FactorSpec::new("H", &["h1", "h2"])];
        let words = ball(&one_rank2, 2);
        assert_eq!(words.len(), 12);
        assert_eq!(brute_force_ball(&one_rank2, 2).len(), 12);
    }

    #[test]
    fn ball_deterministic_order() {
        let w1 = ball(&two_cyclic(), 3);
        let w2 = ball(&two_cyclic(), 3);
        assert_eq!(w1, w2);
        // mass-sorted
        for pair in w1.windows(2) {
            assert!(pair[0].l1() <= pair[1].l1());
        }
    }

    fn assign(maps: &[(&str, MoebiusMap)]) -> Assignment {
        maps.iter().map(|(n, m)| (n.to_string(), m.clone())).collect()
    }

    #[test]
    fn evaluate_homomorphism() {
        let factors = two_cyclic();
        let a = assign(&[
            ("h", MoebiusMap::new(4, 0, 0, 1).unwrap()),
            ("f", MoebiusMap::new(5, -3, -3, 5).unwrap()),
        ]);
        assert_eq!(
            evaluate(&NormalWord::identity(), &factors, &a).unwrap(),
            MoebiusMap::identity()
        );
        let h = NormalWord::single(0, vec![1]);
        assert_eq!(evaluate(&h, &factors, &a).unwrap(), MoebiusMap::new(4, 0, 0, 1).unwrap());
        let f = NormalWord::single(1, vec![1]);
        let comm_word = NormalWord::commutator(&f, &h);
        let comm_eval = evaluate(&comm_word, &factors, &a).unwrap();
        let comm_direct = MoebiusMap::new(5, -3, -3, 5)
            .unwrap()
            .commutator(&MoebiusMap::new(4, 0, 0, 1).unwrap());
        assert_eq!(comm_eval, comm_direct);
    }

    #[test]
    fn factor_not_abelian_detected() {
        let factors = vec![FactorSpec::new("H", &["h1", "h2"])];
        let a = assign(&[
            ("h1", MoebiusMap::new(4, 0, 0, 1).unwrap()),
            ("h2", MoebiusMap::new(5, -3, -3, 5).unwrap()),
        ]);
        let err = evaluate(&NormalWord::single(0, vec![1, 0]), &factors, &a).unwrap_err();
        assert!(matches!(err, WordError::FactorNotAbelian { .. }));
    }

    #[test]
    fn certify_cyclic_diagonal() {
        let factors = vec![FactorSpec::new("H", &["h"])];
        let a = assign(&[("h", MoebiusMap::new(4, 0, 0, 1).unwrap())]);
        let cert = certify_hyperbolic_like(&factors, &a, 8).unwrap();
        assert_eq!(cert.status, HlStatus::Certified);
        assert_eq!(cert.words_checked, 16);
    }

    #[test]
    fn certify_refuted_by_rotation() {
        let factors = two_cyclic();
        let a = assign(&[
            ("h", MoebiusMap::new(4, 0, 0, 1).unwrap()),
            ("f", MoebiusMap::new(0, -1, 1, 0).unwrap()),
        ]);
        let cert = certify_hyperbolic_like(&factors, &a, 3).unwrap();
        match cert.status {
            HlStatus::Refuted { witness, class } => {
                assert_eq!(witness.l1(), 1);
                assert_eq!(class, MapClass::Elliptic);
            }
            _ => panic!("expected refutation"),
        }
    }

    #[test]
    fn certified_monotone_in_radius() {
        let factors = two_cyclic();
        // strongly contracting Schottky-like pair: cubes
        let h = MoebiusMap::new(4, 0, 0, 1).unwrap().pow(3);
        let f = MoebiusMap::new(5, -3, -3, 5).unwrap().pow(3);
        let a = assign(&[("h", h), ("f", f)]);
        let big = certify_hyperbolic_like(&factors, &a, 5).unwrap();
        if big.status == HlStatus::Certified {
            for r in 1..5 {
                let small = certify_hyperbolic_like(&factors, &a, r).unwrap();
                assert_eq!(small.status, HlStatus::Certified);
            }
        }
    }
}
