//! Exact Moebius transformations x -> (ax+b)/(cx+d) with integer entries and
//! positive determinant, in canonical scaling (entries coprime, first nonzero
//! entry positive). Classification, exact fixed pairs with attracting and
//! repelling labels, and the shared-fixed-point / commutation predicates.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::circle::CirclePoint;
use crate::surd::{extract_square_part, Surd};

#[derive(Clone, PartialEq, Eq)]
pub struct MoebiusMap {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum MapClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// Attracting and repelling fixed points of a hyperbolic map.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FixedPair {
    pub attracting: CirclePoint,
    pub repelling: CirclePoint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MoebiusError {
    NonPositiveDeterminant,
    NotHyperbolic(MapClass),
}

impl fmt::Display for MoebiusError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MoebiusError::NonPositiveDeterminant => write!(f, "matrix determinant must be positive"),
            MoebiusError::NotHyperbolic(c) => write!(f, "map is {c:?}, not hyperbolic"),
        }
    }
}
impl std::error::Error for MoebiusError {}

impl MoebiusMap {
    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, MoebiusError> {
        Self::from_bigints(BigInt::from(a), BigInt::from(b), BigInt::from(c), BigInt::from(d))
    }

    pub fn from_bigints(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<Self, MoebiusError> {
        let det = &a * &d - &b * &c;
        if !det.is_positive() {
            return Err(MoebiusError::NonPositiveDeterminant);
        }
        let mut m = MoebiusMap { a, b, c, d };
        m.canonicalize();
        Ok(m)
    }

    pub fn identity() -> Self {
        MoebiusMap { a: BigInt::one(), b: BigInt::zero(), c: BigInt::zero(), d: BigInt::one() }
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    fn canonicalize(&mut self) {
        let mut g = self.a.gcd(&self.b).gcd(&self.c).gcd(&self.d);
        if g.is_zero() {
            g = BigInt::one();
        }
        for e in [&mut self.a, &mut self.b, &mut self.c, &mut self.d] {
            *e /= &g;
        }
        let first_nonzero_negative = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|e| !e.is_zero())
            .map(|e| e.is_negative())
            .unwrap_or(false);
        if first_nonzero_negative {
            for e in [&mut self.a, &mut self.b, &mut self.c, &mut self.d] {
                *e = -std::mem::take(e);
            }
        }
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn compose(&self, rhs: &MoebiusMap) -> MoebiusMap {
        let mut m = MoebiusMap {
            a: &self.a * &rhs.a + &self.b * &rhs.c,
            b: &self.a * &rhs.b + &self.b * &rhs.d,
            c: &self.c * &rhs.a + &self.d * &rhs.c,
            d: &self.c * &rhs.b + &self.d * &rhs.d,
        };
        m.canonicalize();
        m
    }

    pub fn inverse(&self) -> MoebiusMap {
        // adjugate; determinant stays positive
        let mut m = MoebiusMap { a: self.d.clone(), b: -self.b.clone(), c: -self.c.clone(), d: self.a.clone() };
        m.canonicalize();
        m
    }

    pub fn pow(&self, n: i64) -> MoebiusMap {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = MoebiusMap::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// [g, h] = g h g^-1 h^-1.
    pub fn commutator(&self, h: &MoebiusMap) -> MoebiusMap {
        self.compose(h).compose(&self.inverse()).compose(&h.inverse())
    }

    pub fn is_identity(&self) -> bool {
        self.b.is_zero() && self.c.is_zero() && self.a == self.d
    }

    /// Exact image of a circle point; surd inputs stay in their field.
    pub fn apply(&self, x: &CirclePoint) -> CirclePoint {
        match x {
            CirclePoint::Infinity => {
                if self.c.is_zero() {
                    CirclePoint::Infinity
                } else {
                    CirclePoint::Finite(Surd::from_rational(BigRational::new(self.a.clone(), self.c.clone())))
                }
            }
            CirclePoint::Finite(s) => {
                let ar = Surd::from_rational(BigRational::from_integer(self.a.clone()));
                let br = Surd::from_rational(BigRational::from_integer(self.b.clone()));
                let cr = Surd::from_rational(BigRational::from_integer(self.c.clone()));
                let dr = Surd::from_rational(BigRational::from_integer(self.d.clone()));
                let num = &(&ar * s) + &br;
                let den = &(&cr * s) + &dr;
                if den.is_zero_value() {
                    CirclePoint::Infinity
                } else {
                    CirclePoint::Finite(&num / &den)
                }
            }
        }
    }

    /// Identity iff scalar; otherwise by the sign of tr^2 - 4 det.
    pub fn classify(&self) -> MapClass {
        if self.is_identity() {
            return MapClass::Identity;
        }
        let tr = self.trace();
        let disc = &tr * &tr - BigInt::from(4) * self.det();
        if disc.is_positive() {
            MapClass::Hyperbolic
        } else if disc.is_zero() {
            MapClass::Parabolic
        } else {
            MapClass::Elliptic
        }
    }

    /// Exact fixed points of a hyperbolic map with attracting/repelling
    /// labels decided by the exact derivative det/(cx+d)^2.
    pub fn fixed_pair(&self) -> Result<FixedPair, MoebiusError> {
        match self.classify() {
            MapClass::Hyperbolic => {}
            other => return Err(MoebiusError::NotHyperbolic(other)),
        }
        let det = self.det();
        if self.c.is_zero() {
            // Fixed points: Infinity and b/(d-a). Slope at the finite point is a/d.
            let finite = Surd::from_rational(BigRational::new(self.b.clone(), &self.d - &self.a));
            let fp = CirclePoint::Finite(finite);
            // a/d < 1 (both positive in canonical form with det > 0): finite attracts.
            let finite_attracts = self.a < self.d;
            Ok(if finite_attracts {
                FixedPair { attracting: fp, repelling: CirclePoint::Infinity }
            } else {
                FixedPair { attracting: CirclePoint::Infinity, repelling: fp }
            })
        } else {
            // Roots of c x^2 + (d - a) x - b = 0.
            let diff = &self.a - &self.d; // -(d-a)
            let disc = &diff * &diff + BigInt::from(4) * &self.b * &self.c;
            debug_assert!(disc.is_positive());
            let (d0, s) = extract_square_part(&disc.to_biguint().unwrap());
            let two_c = BigInt::from(2) * &self.c;
            let mk = |sign: i64| {
                let a = BigRational::new(diff.clone(), two_c.clone());
                let b = BigRational::new(BigInt::from(sign) * BigInt::from(s.clone()), two_c.clone());
                CirclePoint::Finite(Surd::new(a, b, d0.clone()))
            };
            let r1 = mk(1);
            let r2 = mk(-1);
            // attracting at x iff (c x + d)^2 > det
            let attracting_at = |x: &CirclePoint| -> bool {
                let xs = x.as_finite().expect("finite root");
                let cx = &(&Surd::from_rational(BigRational::from_integer(self.c.clone())) * xs)
                    + &Surd::from_rational(BigRational::from_integer(self.d.clone()));
                let sq = &cx * &cx;
                let detr = Surd::from_rational(BigRational::from_integer(det.clone()));
                sq.cmp_value(&detr) == std::cmp::Ordering::Greater
            };
            let r1_attracts = attracting_at(&r1);
            debug_assert_ne!(r1_attracts, attracting_at(&r2));
            Ok(if r1_attracts {
                FixedPair { attracting: r1, repelling: r2 }
            } else {
                FixedPair { attracting: r2, repelling: r1 }
            })
        }
    }

    /// True iff the two maps have a common fixed point, decided exactly via
    /// the commutator trace: tr([g,h]) = 2 once the commutator is scaled to
    /// determinant one, i.e. tr_int([g,h]) = 2 det(g) det(h) on integer
    /// representatives.
    pub fn shares_fixed_point(&self, h: &MoebiusMap) -> bool {
        // integer representative of the commutator, without canonical rescaling
        let adj = |m: &MoebiusMap| MoebiusMap { a: m.d.clone(), b: -m.b.clone(), c: -m.c.clone(), d: m.a.clone() };
        let raw_mul = |x: &MoebiusMap, y: &MoebiusMap| MoebiusMap {
            a: &x.a * &y.a + &x.b * &y.c,
            b: &x.a * &y.b + &x.b * &y.d,
            c: &x.c * &y.a + &x.d * &y.c,
            d: &x.c * &y.b + &x.d * &y.d,
        };
        let comm = raw_mul(&raw_mul(self, h), &raw_mul(&adj(self), &adj(h)));
        let tr = &comm.a + &comm.d;
        tr == BigInt::from(2) * self.det() * h.det()
    }

    pub fn commutes(&self, h: &MoebiusMap) -> bool {
        self.compose(h) == h.compose(self)
    }
}

impl fmt::Debug for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl serde::Serialize for MoebiusMap {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let strs = [self.a.to_string(), self.b.to_string(), self.c.to_string(), self.d.to_string()];
        strs.serialize(serializer)
    }
}

/// Square-free part helper re-export target for fixed-point discriminants.
pub fn squarefree_part(n: &BigUint) -> BigUint {
    extract_square_part(n).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> MoebiusMap {
        MoebiusMap::new(a, b, c, d).unwrap()
    }
    fn pt(n: i64) -> CirclePoint {
        CirclePoint::from_int(n)
    }
    fn ptr(n: i64, d: i64) -> CirclePoint {
        CirclePoint::from_ratio(n, d)
    }

    #[test]
    fn apply_examples() {
        let g = m(4, 0, 0, 1);
        assert_eq!(g.apply(&pt(1)), pt(4));
        assert_eq!(g.apply(&CirclePoint::Infinity), CirclePoint::Infinity);
        let h = m(5, -3, -3, 5);
        assert_eq!(h.apply(&pt(0)), ptr(-3, 5));
        // pole maps to Infinity
        let k = m(-1, 0, 1, -2);
        assert_eq!(k.apply(&pt(2)), CirclePoint::Infinity);
    }

    #[test]
    fn classify_examples() {
        assert_eq!(m(4, 0, 0, 1).classify(), MapClass::Hyperbolic);
        assert_eq!(m(1, 1, 0, 1).classify(), MapClass::Parabolic);
        assert_eq!(MoebiusMap::new(0, -1, 1, 0).unwrap().classify(), MapClass::Elliptic);
        assert_eq!(m(3, 0, 0, 3).classify(), MapClass::Identity);
    }

    #[test]
    fn canonical_scaling() {
        let g = MoebiusMap::from_bigints(BigInt::from(-2), BigInt::from(0), BigInt::from(0), BigInt::from(-4)).unwrap();
        assert_eq!(g, m(1, 0, 0, 2));
    }

    #[test]
    fn fixed_pair_scaling_map() {
        let g = m(4, 0, 0, 1);
        let fp = g.fixed_pair().unwrap();
        assert_eq!(fp.attracting, CirclePoint::Infinity);
        assert_eq!(fp.repelling, pt(0));
    }

    #[test]
    fn fixed_pair_symmetric_map() {
        let g = m(5, -3, -3, 5);
        let fp = g.fixed_pair().unwrap();
        assert_eq!(fp.attracting, pt(-1));
        assert_eq!(fp.repelling, pt(1));
    }

    #[test]
    fn fixed_pair_golden_ratio() {
        let g = m(1, 1, 1, 2);
        let fp = g.fixed_pair().unwrap();
        // roots of x^2 + x - 1: (-1 +- sqrt5)/2
        let plus = CirclePoint::Finite("-1/2+1/2*sqrt(5)".parse().unwrap());
        let minus = CirclePoint::Finite("-1/2-1/2*sqrt(5)".parse().unwrap());
        assert_eq!(fp.attracting, plus);
        assert_eq!(fp.repelling, minus);
    }

    #[test]
    fn inverse_swaps_fixed_pair() {
        for g in [m(4, 0, 0, 1), m(5, -3, -3, 5), m(1, 1, 1, 2), m(7, 2, 3, 5)] {
            let fp = g.fixed_pair().unwrap();
            let fpi = g.inverse().fixed_pair().unwrap();
            assert_eq!(fp.attracting, fpi.repelling);
            assert_eq!(fp.repelling, fpi.attracting);
            assert_eq!(g.apply(&fp.attracting), fp.attracting);
            assert_eq!(g.apply(&fp.repelling), fp.repelling);
        }
    }

    #[test]
    fn shares_fixed_point_examples() {
        let g = m(2, 0, 0, 1);
        let h = m(3, 0, 0, 1);
        assert!(g.shares_fixed_point(&h));
        let par = m(1, 1, 0, 1);
        assert!(g.shares_fixed_point(&par)); // both fix Infinity
        let f = m(5, -3, -3, 5);
        assert!(!m(4, 0, 0, 1).shares_fixed_point(&f));
    }

    #[test]
    fn commutes_examples() {
        let g = m(7, 2, 3, 5);
        assert!(g.commutes(&g.pow(3)));
        assert!(m(2, 0, 0, 1).commutes(&m(3, 0, 0, 1)));
        assert!(!m(4, 0, 0, 1).commutes(&m(5, -3, -3, 5)));
    }

    #[test]
    fn elliptic_conjugate_example() {
        // h elliptic of order 2 swapping the fixed points of f
        let f = m(4, 0, 0, 1);
        let h = MoebiusMap::new(0, -1, 1, 0).unwrap();
        let g = h.compose(&f).compose(&h.inverse());
        assert_eq!(g, m(1, 0, 0, 4));
        assert!(f.shares_fixed_point(&g));
        assert!(f.commutes(&g));
    }
}
