//! Points on the boundary circle in the projective-line model, the circular
//! order, linked pairs, and exact set algebra on finite unions of open arcs.
//!
//! Orientation convention: on finite points counterclockwise means increasing
//! real value, and Infinity sits between the two ends of the real line, so
//! c(0, 1, oo) = +1 and c(1, oo, -1) = +1.

use std::cmp::Ordering;
use std::fmt;

use crate::surd::Surd;

#[derive(Clone, PartialEq, Eq)]
pub enum CirclePoint {
    Finite(Surd),
    Infinity,
}

impl CirclePoint {
    pub fn from_int(n: i64) -> Self {
        CirclePoint::Finite(Surd::from_int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        CirclePoint::Finite(Surd::from_ratio(n, d))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CirclePoint::Infinity)
    }

    pub fn as_finite(&self) -> Option<&Surd> {
        match self {
            CirclePoint::Finite(s) => Some(s),
            CirclePoint::Infinity => None,
        }
    }

    /// Linear order on the circle cut at Infinity (Infinity first, then the
    /// reals in increasing order). Canonicalizes arc-set ordering.
    pub fn cut_key_cmp(&self, other: &CirclePoint) -> Ordering {
        match (self, other) {
            (CirclePoint::Infinity, CirclePoint::Infinity) => Ordering::Equal,
            (CirclePoint::Infinity, _) => Ordering::Less,
            (_, CirclePoint::Infinity) => Ordering::Greater,
            (CirclePoint::Finite(a), CirclePoint::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Debug for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CirclePoint::Finite(s) => write!(f, "{s}"),
            CirclePoint::Infinity => write!(f, "oo"),
        }
    }
}

impl fmt::Display for CirclePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl serde::Serialize for CirclePoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            CirclePoint::Finite(s) => s.serialize(serializer),
            CirclePoint::Infinity => serializer.serialize_str("infinity"),
        }
    }
}

/// The circular order c(x, y, z): +1 counterclockwise, -1 clockwise, 0 on any
/// coincidence.
pub fn circular_order(x: &CirclePoint, y: &CirclePoint, z: &CirclePoint) -> i8 {
    if x == y || y == z || x == z {
        return 0;
    }
    match (x, y, z) {
        (CirclePoint::Finite(a), CirclePoint::Finite(b), CirclePoint::Finite(c)) => {
            // sign((b-a)(c-b)(c-a))
            let s1 = match b.cmp(a) {
                Ordering::Greater => 1i8,
                Ordering::Less => -1,
                Ordering::Equal => 0,
            };
            let s2 = match c.cmp(b) {
                Ordering::Greater => 1i8,
                Ordering::Less => -1,
                Ordering::Equal => 0,
            };
            let s3 = match c.cmp(a) {
                Ordering::Greater => 1i8,
                Ordering::Less => -1,
                Ordering::Equal => 0,
            };
            s1 * s2 * s3
        }
        (CirclePoint::Infinity, CirclePoint::Finite(b), CirclePoint::Finite(c)) => {
            if c > b {
                1
            } else {
                -1
            }
        }
        (CirclePoint::Finite(a), CirclePoint::Infinity, CirclePoint::Finite(c)) => {
            if a > c {
                1
            } else {
                -1
            }
        }
        (CirclePoint::Finite(a), CirclePoint::Finite(b), CirclePoint::Infinity) => {
            if b > a {
                1
            } else {
                -1
            }
        }
        _ => unreachable!("coincidences already handled"),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CircleError {
    DegeneratePoints,
    OverlapError(String),
    EmptyArc,
}

impl fmt::Display for CircleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircleError::DegeneratePoints => write!(f, "degenerate points: coincidence among inputs"),
            CircleError::OverlapError(m) => write!(f, "arcs overlap non-trivially: {m}"),
            CircleError::EmptyArc => write!(f, "arc endpoints coincide"),
        }
    }
}
impl std::error::Error for CircleError {}

/// True iff each open arc bounded by `pair1` contains exactly one point of
/// `pair2`.
pub fn linked(
    pair1: (&CirclePoint, &CirclePoint),
    pair2: (&CirclePoint, &CirclePoint),
) -> Result<bool, CircleError> {
    let (a, b) = pair1;
    let (u, v) = pair2;
    if a == b || u == v || a == u || a == v || b == u || b == v {
        return Err(CircleError::DegeneratePoints);
    }
    Ok(circular_order(a, u, b) != circular_order(a, v, b))
}

/// The open interval from `lo` to `hi` counterclockwise. Never empty and
/// never the full circle.
#[derive(Clone, PartialEq, Eq)]
pub struct Arc {
    pub lo: CirclePoint,
    pub hi: CirclePoint,
}

impl Arc {
    pub fn new(lo: CirclePoint, hi: CirclePoint) -> Result<Self, CircleError> {
        if lo == hi {
            return Err(CircleError::EmptyArc);
        }
        Ok(Arc { lo, hi })
    }

    pub fn contains(&self, p: &CirclePoint) -> bool {
        circular_order(&self.lo, p, &self.hi) == 1
    }

    /// The closed arc [lo, hi] contains `p`.
    pub fn closure_contains(&self, p: &CirclePoint) -> bool {
        p == &self.lo || p == &self.hi || self.contains(p)
    }

    /// Open-arc containment: self subset of other.
    pub fn subset_of(&self, other: &Arc) -> bool {
        let lo_ok = self.lo == other.lo || other.contains(&self.lo);
        if !lo_ok {
            return false;
        }
        // hi must lie in (self.lo, other.hi]
        self.hi == other.hi || circular_order(&self.lo, &self.hi, &other.hi) == 1
    }

    /// Interiors intersect.
    pub fn overlaps(&self, other: &Arc) -> bool {
        self.contains(&other.lo)
            || self.contains(&other.hi)
            || other.contains(&self.lo)
            || other.contains(&self.hi)
            || self == other
    }

    /// A point in the open arc (used by audits; exact).
    pub fn sample_point(&self) -> CirclePoint {
        match (&self.lo, &self.hi) {
            (CirclePoint::Finite(a), CirclePoint::Finite(b)) => {
                if b > a {
                    let sum = a + b;
                    CirclePoint::Finite(&sum * &Surd::from_ratio(1, 2))
                } else {
                    // wraps through Infinity
                    CirclePoint::Infinity
                }
            }
            (CirclePoint::Infinity, CirclePoint::Finite(b)) => CirclePoint::Finite(b - &Surd::from_int(1)),
            (CirclePoint::Finite(a), CirclePoint::Infinity) => CirclePoint::Finite(a + &Surd::from_int(1)),
            _ => unreachable!("lo != hi"),
        }
    }
}

impl fmt::Debug for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?},{:?})", self.lo, self.hi)
    }
}

impl serde::Serialize for Arc {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Arc", 2)?;
        st.serialize_field("lo", &self.lo)?;
        st.serialize_field("hi", &self.hi)?;
        st.end()
    }
}

/// A finite union of pairwise disjoint open arcs in canonical cyclic order
/// (sorted starting from the arc containing or following Infinity). Adjacency
/// between closures is permitted.
#[derive(Clone, PartialEq, Eq, serde::Serialize)]
pub struct ArcSet {
    arcs: Vec<Arc>,
}

impl fmt::Debug for ArcSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.arcs.iter()).finish()
    }
}

impl ArcSet {
    pub fn empty() -> Self {
        ArcSet { arcs: Vec::new() }
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn from_arc(a: Arc) -> Self {
        ArcSet { arcs: vec![a] }
    }

    /// Canonicalize a list of arcs; rejects non-trivial overlap (shared
    /// endpoints are fine).
    pub fn normalize(arcs: Vec<Arc>) -> Result<Self, CircleError> {
        for (i, x) in arcs.iter().enumerate() {
            for y in arcs.iter().skip(i + 1) {
                if x.overlaps(y) {
                    return Err(CircleError::OverlapError(format!("{x:?} and {y:?}")));
                }
            }
        }
        Ok(Self::assemble(arcs))
    }

    fn assemble(mut arcs: Vec<Arc>) -> Self {
        arcs.sort_by(Self::canonical_key_cmp);
        ArcSet { arcs }
    }

    fn canonical_key_cmp(x: &Arc, y: &Arc) -> Ordering {
        let rank = |a: &Arc| -> u8 {
            if a.contains(&CirclePoint::Infinity) {
                0
            } else if a.lo.is_infinity() {
                1
            } else {
                2
            }
        };
        rank(x).cmp(&rank(y)).then_with(|| x.lo.cut_key_cmp(&y.lo))
    }

    pub fn contains(&self, p: &CirclePoint) -> bool {
        self.arcs.iter().any(|a| a.contains(p))
    }

    pub fn closure_contains(&self, p: &CirclePoint) -> bool {
        self.arcs.iter().any(|a| a.closure_contains(p))
    }

    pub fn is_endpoint(&self, p: &CirclePoint) -> bool {
        self.arcs.iter().any(|a| &a.lo == p || &a.hi == p)
    }

    /// Open-set inclusion. Since the arcs of `other` are disjoint open arcs,
    /// a connected arc of `self` fits inside the union iff it fits inside a
    /// single arc of `other`.
    pub fn subset(&self, other: &ArcSet) -> bool {
        self.arcs
            .iter()
            .all(|x| other.arcs.iter().any(|y| x.subset_of(y)))
    }

    /// Set union, merging properly overlapping arcs.
    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut arcs: Vec<Arc> = self.arcs.iter().chain(other.arcs.iter()).cloned().collect();
        loop {
            let mut merged = None;
            'outer: for i in 0..arcs.len() {
                for j in (i + 1)..arcs.len() {
                    if arcs[i].overlaps(&arcs[j]) {
                        merged = Some((i, j));
                        break 'outer;
                    }
                }
            }
            let Some((i, j)) = merged else { break };
            let y = arcs.remove(j);
            let x = arcs.remove(i);
            arcs.push(merge_overlapping(&x, &y));
        }
        Self::assemble(arcs)
    }

    /// Removes the topological closure of `other` from `self`.
    pub fn subtract_closure(&self, other: &ArcSet) -> ArcSet {
        let mut pieces: Vec<Arc> = self.arcs.clone();
        for b in &other.arcs {
            let mut next = Vec::new();
            for x in pieces {
                next.extend(subtract_closed_arc(&x, b));
            }
            pieces = next;
        }
        Self::assemble(pieces)
    }

    /// True iff the closure of the union of arcs is the whole circle.
    pub fn covers_circle_closure(&self) -> bool {
        let merged = self.union(&ArcSet::empty());
        let n = merged.arcs.len();
        if n < 2 {
            return false;
        }
        (0..n).all(|i| {
            let j = (i + 1) % n;
            merged.arcs[i].hi == merged.arcs[j].lo
        })
    }
}

fn merge_overlapping(x: &Arc, y: &Arc) -> Arc {
    if x.subset_of(y) {
        return y.clone();
    }
    if y.subset_of(x) {
        return x.clone();
    }
    // Proper overlap: exactly one of y.lo in x / x.lo in y holds for each end.
    if x.contains(&y.lo) {
        debug_assert!(y.contains(&x.hi));
        Arc { lo: x.lo.clone(), hi: y.hi.clone() }
    } else {
        debug_assert!(y.contains(&x.lo) && x.contains(&y.hi));
        Arc { lo: y.lo.clone(), hi: x.hi.clone() }
    }
}

/// `x` minus the closed arc `[b.lo, b.hi]`, as open arcs.
fn subtract_closed_arc(x: &Arc, b: &Arc) -> Vec<Arc> {
    let lo_in = x.contains(&b.lo);
    let hi_in = x.contains(&b.hi);
    match (lo_in, hi_in) {
        (true, true) => {
            // Both endpoints interior. Either [b] sits inside x, or it covers
            // both ends of x and the remainder is the middle piece.
            if circular_order(&x.lo, &b.lo, &b.hi) == 1 {
                let mut out = Vec::new();
                if x.lo != b.lo {
                    out.push(Arc { lo: x.lo.clone(), hi: b.lo.clone() });
                }
                if b.hi != x.hi {
                    out.push(Arc { lo: b.hi.clone(), hi: x.hi.clone() });
                }
                out
            } else {
                vec![Arc { lo: b.hi.clone(), hi: b.lo.clone() }]
            }
        }
        (true, false) => {
            if x.lo == b.lo {
                Vec::new()
            } else {
                vec![Arc { lo: x.lo.clone(), hi: b.lo.clone() }]
            }
        }
        (false, true) => {
            if b.hi == x.hi {
                Vec::new()
            } else {
                vec![Arc { lo: b.hi.clone(), hi: x.hi.clone() }]
            }
        }
        (false, false) => {
            // No endpoint of b lies in the interior of x, so x is either
            // swallowed by (b.lo, b.hi) or meets [b] in at most an endpoint
            // of x, which the open arc excludes anyway.
            if x == b || b.contains(&x.sample_point()) {
                Vec::new()
            } else {
                vec![x.clone()]
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(n: i64) -> CirclePoint {
        CirclePoint::from_int(n)
    }
    fn ptr(n: i64, d: i64) -> CirclePoint {
        CirclePoint::from_ratio(n, d)
    }
    fn oo() -> CirclePoint {
        CirclePoint::Infinity
    }
    fn arc(lo: CirclePoint, hi: CirclePoint) -> Arc {
        Arc::new(lo, hi).unwrap()
    }

    #[test]
    fn orientation_convention() {
        assert_eq!(circular_order(&pt(0), &pt(1), &oo()), 1);
        assert_eq!(circular_order(&pt(1), &oo(), &pt(-1)), 1);
        assert_eq!(circular_order(&pt(0), &pt(1), &pt(1)), 0);
        assert_eq!(circular_order(&pt(0), &oo(), &pt(1)), -1);
    }

    #[test]
    fn circular_order_alternating_and_cyclic() {
        let pts = [pt(0), pt(2), oo(), pt(-3), ptr(1, 2)];
        for x in &pts {
            for y in &pts {
                for z in &pts {
                    let c = circular_order(x, y, z);
                    assert_eq!(c, -circular_order(y, x, z));
                    assert_eq!(c, circular_order(y, z, x));
                    if x != y && y != z && x != z {
                        assert_ne!(c, 0);
                    }
                }
            }
        }
    }

    #[test]
    fn linked_examples() {
        assert!(linked((&pt(0), &oo()), (&pt(1), &pt(-1))).unwrap());
        assert!(!linked((&pt(0), &oo()), (&pt(1), &pt(2))).unwrap());
        assert!(!linked((&pt(0), &pt(1)), (&pt(2), &oo())).unwrap());
        assert_eq!(
            linked((&pt(0), &pt(0)), (&pt(1), &pt(2))),
            Err(CircleError::DegeneratePoints)
        );
    }

    #[test]
    fn arc_membership_wraparound() {
        let a = arc(ptr(1, 2), pt(2));
        assert!(a.contains(&pt(1)));
        assert!(!a.contains(&pt(3)));
        let w = arc(pt(2), pt(-2));
        assert!(w.contains(&oo()));
        assert!(w.contains(&pt(5)));
        assert!(w.contains(&pt(-5)));
        assert!(!w.contains(&pt(0)));
    }

    #[test]
    fn normalize_rejects_overlap_allows_abutment() {
        let r = ArcSet::normalize(vec![arc(pt(0), pt(2)), arc(pt(1), pt(3))]);
        assert!(matches!(r, Err(CircleError::OverlapError(_))));
        let ok = ArcSet::normalize(vec![arc(pt(0), pt(1)), arc(pt(1), pt(2))]).unwrap();
        assert_eq!(ok.arcs().len(), 2);
    }

    #[test]
    fn canonical_order_starts_at_infinity() {
        let s = ArcSet::normalize(vec![
            arc(pt(0), pt(1)),
            arc(pt(3), pt(-5)), // contains oo
            arc(pt(-4), pt(-2)),
        ])
        .unwrap();
        let lo0 = &s.arcs()[0].lo;
        assert_eq!(lo0, &pt(3));
        assert_eq!(&s.arcs()[1].lo, &pt(-4));
    }

    #[test]
    fn subtract_closure_quarters() {
        // model circle scaled to the reals: use eighth-points as rationals
        let a = ArcSet::normalize(vec![arc(ptr(7, 8), ptr(1, 8)), arc(ptr(3, 8), ptr(5, 8))]).unwrap();
        let b = ArcSet::normalize(vec![arc(ptr(1, 8), ptr(3, 8)), arc(ptr(5, 8), ptr(7, 8))]).unwrap();
        let d = a.subtract_closure(&b);
        assert_eq!(d, a);
    }

    #[test]
    fn subtract_closure_strict_overlap() {
        let a = ArcSet::from_arc(arc(pt(0), pt(4)));
        let b = ArcSet::from_arc(arc(pt(3), pt(5)));
        let d = a.subtract_closure(&b);
        assert_eq!(d.arcs(), &[arc(pt(0), pt(3))]);
        let c = ArcSet::from_arc(arc(pt(-1), pt(1)));
        let e = a.subtract_closure(&c);
        assert_eq!(e.arcs(), &[arc(pt(1), pt(4))]);
        // subtracted set covering both ends leaves the middle
        let f = ArcSet::from_arc(arc(pt(3), pt(1)));
        let g = a.subtract_closure(&f);
        assert_eq!(g.arcs(), &[arc(pt(1), pt(3))]);
    }

    #[test]
    fn covers_circle_closure_quarters() {
        let s = ArcSet::normalize(vec![
            arc(ptr(7, 8), ptr(1, 8)),
            arc(ptr(1, 8), ptr(3, 8)),
            arc(ptr(3, 8), ptr(5, 8)),
            arc(ptr(5, 8), ptr(7, 8)),
        ])
        .unwrap();
        assert!(s.covers_circle_closure());
        let t = ArcSet::normalize(vec![arc(pt(0), pt(1)), arc(pt(1), pt(2))]).unwrap();
        assert!(!t.covers_circle_closure());
    }

    #[test]
    fn contains_examples() {
        let s = ArcSet::from_arc(arc(ptr(1, 2), pt(2)));
        assert!(s.contains(&pt(1)));
        let w = ArcSet::from_arc(arc(pt(2), pt(-2)));
        assert!(w.contains(&oo()));
    }

    #[test]
    fn subset_and_union() {
        let a = ArcSet::from_arc(arc(pt(1), pt(2)));
        let b = ArcSet::from_arc(arc(pt(0), pt(3)));
        assert!(a.subset(&b));
        assert!(!b.subset(&a));
        let u = a.union(&b);
        assert_eq!(u, b);
        let c = ArcSet::from_arc(arc(pt(2), pt(4)));
        let v = b.union(&c);
        assert_eq!(v.arcs(), &[arc(pt(0), pt(4))]);
        // abutting arcs stay separate under union (open sets)
        let d = ArcSet::from_arc(arc(pt(4), pt(5)));
        let w = v.union(&d);
        assert_eq!(w.arcs().len(), 2);
    }
}
