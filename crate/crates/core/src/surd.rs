//! Exact quadratic surds `a + b*sqrt(d)` with rational `a`, `b` and a
//! non-negative integer radicand `d`.
//!
//! Everything downstream (circular orders, fixed points, chart addresses)
//! reduces to deciding the sign of such a number, possibly minus another one
//! with a different radicand. Signs are decided by rational comparisons and
//! at most two squaring steps; no floating point is ever consulted.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `a + b*sqrt(d)`. Canonical form: `b == 0` implies `d == 0`, and the
/// square part of `d` is folded into `b` (opportunistically for very large
/// radicands, see [`extract_square_part`]).
#[derive(Clone)]
pub struct Surd {
    a: BigRational,
    b: BigRational,
    d: BigUint,
}

/// Splits `d = s^2 * d0` and returns `(d0, s)` with `d0` square-free for all
/// `d` whose square part is detectable by trial division up to 997 plus a
/// perfect-square check on the remaining cofactor.
pub fn extract_square_part(d: &BigUint) -> (BigUint, BigUint) {
    let mut rest = d.clone();
    let mut sq = BigUint::one();
    if rest.is_zero() {
        return (BigUint::zero(), BigUint::one());
    }
    for p in small_primes() {
        let p = BigUint::from(p);
        let pp = &p * &p;
        while (&rest % &pp).is_zero() {
            rest /= &pp;
            sq *= &p;
        }
        if rest.is_one() {
            break;
        }
    }
    // Remaining cofactor may itself be a perfect square.
    if !rest.is_one() {
        let r = rest.sqrt();
        if &r * &r == rest {
            sq *= &r;
            rest = BigUint::one();
        }
    }
    (rest, sq)
}

fn small_primes() -> impl Iterator<Item = u32> {
    // Primes below 1000.
    const N: usize = 1000;
    let mut sieve = [true; N];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < N {
        if sieve[i] {
            let mut j = i * i;
            while j < N {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..N).filter(move |&i| sieve[i]).map(|i| i as u32)
}

impl Surd {
    pub fn new(a: BigRational, b: BigRational, d: BigUint) -> Self {
        let mut s = Surd { a, b, d };
        s.canonicalize();
        s
    }

    pub fn from_rational(a: BigRational) -> Self {
        Surd { a, b: BigRational::zero(), d: BigUint::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `sqrt(d)` for a non-negative integer `d`.
    pub fn sqrt_int(d: u64) -> Self {
        Surd::new(BigRational::zero(), BigRational::one(), BigUint::from(d))
    }

    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn radical_coeff(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigUint {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The rational value, if this surd is rational.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    fn canonicalize(&mut self) {
        if self.b.is_zero() {
            self.d = BigUint::zero();
            return;
        }
        if self.d.is_zero() {
            self.b = BigRational::zero();
            return;
        }
        if self.d.is_one() {
            self.a += std::mem::replace(&mut self.b, BigRational::zero());
            self.d = BigUint::zero();
            return;
        }
        let (d0, s) = extract_square_part(&self.d);
        if !s.is_one() {
            self.b *= BigRational::from_integer(BigInt::from(s));
            self.d = d0.clone();
        }
        if self.d.is_one() {
            self.a += std::mem::replace(&mut self.b, BigRational::zero());
            self.d = BigUint::zero();
        }
    }

    pub fn is_zero_value(&self) -> bool {
        self.sign() == 0
    }

    /// Exact sign in {-1, 0, +1}, decided by rational comparisons and at most
    /// one squaring (the mixed-radicand case adds one more; see
    /// [`Surd::cmp_value`]).
    pub fn sign(&self) -> i8 {
        let sa = sign_of(&self.a);
        if self.b.is_zero() {
            return sa;
        }
        let sb = sign_of(&self.b);
        if self.a.is_zero() {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // Opposite signs: compare a^2 with b^2 d. Equality is impossible for
        // a canonical irrational radicand, but the comparison is exact anyway.
        let a2 = &self.a * &self.a;
        let b2d = &self.b * &self.b * BigRational::from_integer(BigInt::from(self.d.clone()));
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    /// Exact comparison of values, valid for arbitrary (even mixed) radicands.
    pub fn cmp_value(&self, other: &Surd) -> Ordering {
        // x - y = A + B sqrt(m) + C sqrt(n)
        let a = &self.a - &other.a;
        match (self.b.is_zero(), other.b.is_zero()) {
            (true, true) => return a.cmp(&BigRational::zero()),
            (true, false) => {
                let s = Surd::new(a, -other.b.clone(), other.d.clone());
                return sign_to_ordering(s.sign());
            }
            (false, true) => {
                let s = Surd::new(a, self.b.clone(), self.d.clone());
                return sign_to_ordering(s.sign());
            }
            (false, false) => {}
        }
        if self.d == other.d {
            let s = Surd::new(a, &self.b - &other.b, self.d.clone());
            return sign_to_ordering(s.sign());
        }
        // Genuinely mixed: sign of u + v with u = A + B sqrt(m), v = C sqrt(n).
        let u = Surd::new(a, self.b.clone(), self.d.clone());
        let v = Surd::new(BigRational::zero(), -other.b.clone(), other.d.clone());
        let su = u.sign();
        let sv = v.sign();
        match (su, sv) {
            (0, t) => sign_to_ordering(t),
            (s, 0) => sign_to_ordering(s),
            (s, t) if s == t => sign_to_ordering(s),
            (s, t) => {
                // Opposite nonzero signs: the sign is decided by |u| vs |v|,
                // compared via squares (one more squaring at most).
                // u^2 = (A^2 + B^2 m) + 2AB sqrt(m); v^2 = C^2 n rational.
                let m = BigRational::from_integer(BigInt::from(u.d.clone()));
                let n = BigRational::from_integer(BigInt::from(v.d.clone()));
                let u2_rat = &u.a * &u.a + &u.b * &u.b * &m;
                let u2_rad = BigRational::from_integer(BigInt::from(2)) * &u.a * &u.b;
                let v2 = &v.b * &v.b * &n;
                let diff = Surd::new(u2_rat - v2, u2_rad, u.d.clone());
                match diff.sign() {
                    0 => Ordering::Equal,
                    x if x > 0 => sign_to_ordering(s),
                    _ => sign_to_ordering(t),
                }
            }
        }
    }

    /// Truncated decimal rendering with `digits` fractional digits, computed
    /// by integer arithmetic. Non-normative, for human consumption only.
    pub fn to_decimal(&self, digits: u32) -> String {
        let scale = BigInt::from(10u32).pow(digits);
        // floor(value * scale)
        let scaled_a = (&self.a * BigRational::from_integer(scale.clone())).floor().to_integer();
        let total = if self.b.is_zero() {
            scaled_a
        } else {
            // b * sqrt(d) * scale: compute sqrt(d * (b*scale)^2) with sign.
            let bs = &self.b * BigRational::from_integer(scale.clone());
            let num = bs.numer().abs().to_biguint().unwrap();
            let den = bs.denom().abs().to_biguint().unwrap();
            let rad = &num * &num * &self.d;
            let root = rad.sqrt(); // floor sqrt
            let mag = BigInt::from(root / den);
            let signed = if bs.is_negative() { -mag - BigInt::one() } else { mag };
            scaled_a + signed
        };
        let neg = total.is_negative();
        let total_abs = total.abs();
        let ten = scale.clone();
        let int_part = &total_abs / &ten;
        let frac_part = &total_abs % &ten;
        let mut frac_str = frac_part.to_string();
        while (frac_str.len() as u32) < digits {
            frac_str.insert(0, '0');
        }
        format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac_str)
    }
}

fn sign_of(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

fn sign_to_ordering(s: i8) -> Ordering {
    match s {
        0 => Ordering::Equal,
        x if x > 0 => Ordering::Greater,
        _ => Ordering::Less,
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}
impl Eq for Surd {}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

fn same_field(x: &Surd, y: &Surd) -> BigUint {
    match (x.b.is_zero(), y.b.is_zero()) {
        (true, true) => BigUint::zero(),
        (false, true) => x.d.clone(),
        (true, false) => y.d.clone(),
        (false, false) => {
            assert_eq!(x.d, y.d, "surd arithmetic across distinct radicands");
            x.d.clone()
        }
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        let d = same_field(self, rhs);
        Surd::new(&self.a + &rhs.a, &self.b + &rhs.b, d)
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        let d = same_field(self, rhs);
        Surd::new(&self.a - &rhs.a, &self.b - &rhs.b, d)
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        let d = same_field(self, rhs);
        let dr = BigRational::from_integer(BigInt::from(d.clone()));
        Surd::new(
            &self.a * &rhs.a + &self.b * &rhs.b * &dr,
            &self.a * &rhs.b + &self.b * &rhs.a,
            d,
        )
    }
}

impl Div for &Surd {
    type Output = Surd;
    fn div(self, rhs: &Surd) -> Surd {
        let d = same_field(self, rhs);
        let dr = BigRational::from_integer(BigInt::from(d.clone()));
        // 1/(p + q sqrt(d)) = (p - q sqrt(d)) / (p^2 - q^2 d)
        let denom = &rhs.a * &rhs.a - &rhs.b * &rhs.b * &dr;
        assert!(!denom.is_zero(), "division by zero surd");
        let num = self * &Surd { a: rhs.a.clone(), b: -rhs.b.clone(), d: d.clone() };
        Surd::new(num.a / &denom, num.b / &denom, num.d)
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd { a: -self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }
}

fn fmt_surd(s: &Surd, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if s.b.is_zero() {
        write!(f, "{}", s.a)
    } else if s.a.is_zero() {
        write!(f, "{}*sqrt({})", s.b, s.d)
    } else {
        write!(f, "{}{}{}*sqrt({})", s.a, if s.b.is_negative() { "" } else { "+" }, s.b, s.d)
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_surd(self, f)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_surd(self, f)
    }
}

/// A surd literal: `3`, `-1/2`, `sqrt(2)`, `1/2*sqrt(3)`, `1+sqrt(2)`,
/// `2 - 3/4*sqrt(5)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurdParseError(pub String);

impl fmt::Display for SurdParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid surd literal: {}", self.0)
    }
}
impl std::error::Error for SurdParseError {}

impl FromStr for Surd {
    type Err = SurdParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(SurdParseError("empty literal".into()));
        }
        // Split into at most two signed terms.
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        for (i, ch) in compact.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.is_empty() {
                terms.push(std::mem::take(&mut cur));
                cur.push(ch);
            } else {
                cur.push(ch);
            }
        }
        terms.push(cur);
        if terms.len() > 2 {
            return Err(SurdParseError(format!("too many terms in `{s}`")));
        }
        let mut a = BigRational::zero();
        let mut b = BigRational::zero();
        let mut d = BigUint::zero();
        for term in &terms {
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-1, rest),
                None => (1, term.strip_prefix('+').unwrap_or(term)),
            };
            if let Some(idx) = body.find("sqrt(") {
                if !body.ends_with(')') {
                    return Err(SurdParseError(format!("unterminated sqrt in `{s}`")));
                }
                let coeff_str = &body[..idx];
                let coeff_str = coeff_str.strip_suffix('*').unwrap_or(coeff_str);
                let coeff = if coeff_str.is_empty() {
                    BigRational::one()
                } else {
                    parse_rational(coeff_str).ok_or_else(|| SurdParseError(format!("bad coefficient in `{s}`")))?
                };
                let rad_str = &body[idx + 5..body.len() - 1];
                let rad: BigUint = rad_str
                    .parse()
                    .map_err(|_| SurdParseError(format!("bad radicand in `{s}`")))?;
                if !b.is_zero() {
                    return Err(SurdParseError(format!("two radical terms in `{s}`")));
                }
                b = coeff * BigRational::from_integer(BigInt::from(sign));
                d = rad;
            } else {
                let r = parse_rational(body).ok_or_else(|| SurdParseError(format!("bad rational in `{s}`")))?;
                a += r * BigRational::from_integer(BigInt::from(sign));
            }
        }
        Ok(Surd::new(a, b, d))
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, m)) = s.split_once('/') {
        let num: BigInt = n.parse().ok()?;
        let den: BigInt = m.parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    } else {
        let num: BigInt = s.parse().ok()?;
        Some(BigRational::from_integer(num))
    }
}

/// Serialization as the integer 5-tuple (a_num, a_den, b_num, b_den, d),
/// each rendered in decimal.
impl serde::Serialize for Surd {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Surd", 6)?;
        st.serialize_field("a_num", &self.a.numer().to_string())?;
        st.serialize_field("a_den", &self.a.denom().to_string())?;
        st.serialize_field("b_num", &self.b.numer().to_string())?;
        st.serialize_field("b_den", &self.b.denom().to_string())?;
        st.serialize_field("d", &self.d.to_string())?;
        st.serialize_field("approx", &self.to_decimal(12))?;
        st.end()
    }
}

/// 50-digit (or better) truncated decimal evaluation used by tests as an
/// independent cross-check oracle. Returns the sign decided by interval
/// arithmetic at increasing precision, falling back to the exact rational
/// criterion only to certify a true zero.
pub fn interval_sign_oracle(a: &BigRational, b: &BigRational, d: &BigUint) -> i8 {
    if b.is_zero() {
        return sign_of(a);
    }
    if a.is_zero() {
        return if d.is_zero() { 0 } else { sign_of(b) };
    }
    let mut digits = 50u32;
    loop {
        let scale = BigInt::from(10u32).pow(digits);
        let scale_r = BigRational::from_integer(scale.clone());
        let a_scaled = (a * &scale_r).floor().to_integer();
        // lower/upper bounds for b*sqrt(d)*scale
        let bs = b * &scale_r;
        let num = bs.numer().abs().to_biguint().unwrap();
        let den = bs.denom().abs().to_biguint().unwrap();
        let rad = &num * &num * d;
        let root = rad.sqrt(); // floor
        let lo_mag = BigInt::from(&root / &den);
        let hi_mag = BigInt::from((&root + BigUint::one()) / &den) + BigInt::one();
        let (b_lo, b_hi) = if bs.is_negative() {
            (-&hi_mag, -&lo_mag)
        } else {
            (lo_mag.clone(), hi_mag.clone())
        };
        let lo = &a_scaled + &b_lo - BigInt::one();
        let hi = &a_scaled + &b_hi + BigInt::one();
        if lo.is_positive() {
            return 1;
        }
        if hi.is_negative() {
            return -1;
        }
        if digits >= 400 {
            // Interval keeps straddling zero: certify exact zero rationally.
            let a2 = a * a;
            let b2d = b * b * BigRational::from_integer(BigInt::from(d.clone()));
            return if a2 == b2d && sign_of(a) != sign_of(b) { 0 } else { sign_of(a) };
        }
        digits *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surd(a: (i64, i64), b: (i64, i64), d: u64) -> Surd {
        Surd::new(
            BigRational::new(BigInt::from(a.0), BigInt::from(a.1)),
            BigRational::new(BigInt::from(b.0), BigInt::from(b.1)),
            BigUint::from(d),
        )
    }

    #[test]
    fn sign_zero() {
        assert_eq!(Surd::zero().sign(), 0);
    }

    #[test]
    fn sign_sqrt2_minus_1_is_positive() {
        assert_eq!(surd((-1, 1), (1, 1), 2).sign(), 1);
    }

    #[test]
    fn sign_7_5_minus_sqrt2_is_negative() {
        // 7/5 < sqrt(2) since 49/25 < 2
        assert_eq!(surd((7, 5), (-1, 1), 2).sign(), -1);
    }

    #[test]
    fn canonical_square_extraction() {
        let s = surd((0, 1), (1, 1), 8); // sqrt(8) = 2 sqrt(2)
        assert_eq!(s.radicand(), &BigUint::from(2u32));
        assert_eq!(s.radical_coeff(), &BigRational::from_integer(BigInt::from(2)));
        let t = surd((0, 1), (1, 1), 9); // sqrt(9) = 3
        assert!(t.is_rational());
        assert_eq!(t.as_rational().unwrap(), &BigRational::from_integer(BigInt::from(3)));
    }

    #[test]
    fn mixed_radicand_comparison() {
        // sqrt(2) + sqrt(3) vs sqrt(10): (sqrt2+sqrt3)^2 = 5 + 2 sqrt 6 ~ 9.898 < 10
        let lhs = surd((0, 1), (1, 1), 2);
        let rhs_minus = surd((0, 1), (1, 1), 3);
        let sum = Surd::new(
            BigRational::zero(),
            BigRational::one(),
            BigUint::from(10u32),
        );
        // compare sqrt(10) - sqrt(3) with sqrt(2): sqrt(10)-sqrt(3) ~ 1.430 > sqrt(2) ~ 1.414
        let diff_cmp = sum.cmp_value(&rhs_minus); // sqrt10 vs sqrt3
        assert_eq!(diff_cmp, Ordering::Greater);
        // 1 + sqrt(2) vs sqrt(6): 2.414 vs 2.449
        let x = surd((1, 1), (1, 1), 2);
        let y = surd((0, 1), (1, 1), 6);
        assert_eq!(x.cmp_value(&y), Ordering::Less);
        assert_eq!(y.cmp_value(&x), Ordering::Greater);
        // equality across representations: 2 + sqrt(2) == 2 + sqrt(2)
        assert_eq!(lhs.cmp_value(&lhs.clone()), Ordering::Equal);
    }

    #[test]
    fn field_arithmetic() {
        let x = surd((1, 2), (3, 1), 5);
        let y = surd((-2, 1), (1, 4), 5);
        let p = &x * &y;
        let q = &p / &y;
        assert_eq!(q, x);
        let s = &x + &y;
        let r = &s - &y;
        assert_eq!(r, x);
    }

    #[test]
    fn parse_round_trip() {
        for lit in ["3", "-1/2", "sqrt(2)", "1/2*sqrt(3)", "1+sqrt(2)", "2 - 3/4*sqrt(5)", "-sqrt(7)"] {
            let s: Surd = lit.parse().unwrap();
            let rendered = s.to_string();
            let again: Surd = rendered.parse().unwrap();
            assert_eq!(s, again, "round trip failed for {lit}");
        }
        assert!("sqrt(2)+sqrt(3)".parse::<Surd>().is_err());
        assert!("".parse::<Surd>().is_err());
    }

    #[test]
    fn interval_oracle_agrees_on_examples() {
        let cases = [
            surd((0, 1), (0, 1), 0),
            surd((-1, 1), (1, 1), 2),
            surd((7, 5), (-1, 1), 2),
            surd((1, 3), (-1, 4), 7),
        ];
        for s in &cases {
            assert_eq!(s.sign(), interval_sign_oracle(s.rational_part(), s.radical_coeff(), s.radicand()));
        }
    }

    #[test]
    fn decimal_rendering() {
        let s = surd((0, 1), (1, 1), 2);
        assert!(s.to_decimal(6).starts_with("1.414213"));
        let t = surd((0, 1), (-1, 1), 2);
        assert!(t.to_decimal(6).starts_with("-1.414214")); // truncation toward -inf
    }
}
