//! Combinatorial dynamical realization of a pair of non-cyclic abelian
//! stabilizers acting on a countable, circularly ordered point set.
//!
//! The two stabilizers act through dense rank-2 translation groups on chart
//! coordinates. Points are words applied to eight base symbols (the four
//! marked points and the seed-gap midpoints); each point is located inside
//! the gap systems of both stabilizers by a recursive coordinate, and the
//! circular order is resolved frame by frame: top level by the chart of the
//! first stabilizer, inside a gap by pulling back to the seed gap and
//! consulting the other stabilizer's chart. The nesting rules between the
//! two gap systems encode the geometric configuration chains.

use std::fmt;

use num_bigint::BigInt;

use crate::circle::{Arc, CirclePoint};
use crate::surd::Surd;
use crate::words::{FactorSpec, NormalWord, Syllable};

/// The dense translation group Z*tau1 + Z*tau2 with tau1 rational and tau2
/// a quadratic irrational, both positive. Density of the image is exactly
/// the irrationality of tau2/tau1, which this shape guarantees.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct TranslationGroup {
    pub tau1: Surd,
    pub tau2: Surd,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    NotDense(String),
    SeedChainViolation(String),
    InvalidModel(String),
    PreconditionViolated(String),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::NotDense(m) => write!(f, "translation group is not dense: {m}"),
            ModelError::SeedChainViolation(m) => write!(f, "seed chain violated: {m}"),
            ModelError::InvalidModel(m) => write!(f, "invalid model: {m}"),
            ModelError::PreconditionViolated(m) => write!(f, "precondition violated: {m}"),
        }
    }
}
impl std::error::Error for ModelError {}

impl TranslationGroup {
    pub fn new(tau1: Surd, tau2: Surd) -> Result<Self, ModelError> {
        if tau1.sign() <= 0 || tau2.sign() <= 0 {
            return Err(ModelError::InvalidModel("translation generators must be positive".into()));
        }
        if !tau1.is_rational() {
            return Err(ModelError::InvalidModel("tau1 must be rational".into()));
        }
        if tau2.is_rational() {
            return Err(ModelError::NotDense(format!("tau2/tau1 = {} is rational", &tau2 / &tau1)));
        }
        Ok(TranslationGroup { tau1, tau2 })
    }

    /// Exact membership: lambda in Z*tau1 + Z*tau2, by solving the 2x2
    /// integer system on the rational and radical parts.
    pub fn decompose(&self, lambda: &Surd) -> Option<(BigInt, BigInt)> {
        if lambda.radicand() != self.tau2.radicand() && !lambda.is_rational() {
            return None;
        }
        // n2 * b2 = b(lambda), n1 * tau1 + n2 * a2 = a(lambda)
        let b2 = self.tau2.radical_coeff();
        let n2r = lambda.radical_coeff() / b2;
        if !n2r.is_integer() {
            return None;
        }
        let n2 = n2r.to_integer();
        let a_rest = lambda.rational_part() - self.tau2.rational_part() * &n2r;
        let n1r = a_rest / self.tau1.rational_part();
        if !n1r.is_integer() {
            return None;
        }
        Some((n1r.to_integer(), n2))
    }

    pub fn contains(&self, lambda: &Surd) -> bool {
        self.decompose(lambda).is_some()
    }

    /// n1 * tau1 + n2 * tau2.
    pub fn address(&self, exponents: &[i64]) -> Surd {
        assert_eq!(exponents.len(), 2, "model factors have rank 2");
        let n1 = Surd::from_int(exponents[0]);
        let n2 = Surd::from_int(exponents[1]);
        &(&n1 * &self.tau1) + &(&n2 * &self.tau2)
    }
}

/// The two stabilizer structures: H fixes p and pbar, K fixes q and qbar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Structure {
    H,
    K,
}

impl Structure {
    pub fn factor(self) -> usize {
        match self {
            Structure::H => 0,
            Structure::K => 1,
        }
    }
    pub fn other(self) -> Structure {
        match self {
            Structure::H => Structure::K,
            Structure::K => Structure::H,
        }
    }
    fn from_factor(f: usize) -> Structure {
        match f {
            0 => Structure::H,
            1 => Structure::K,
            _ => panic!("model has two factors"),
        }
    }
}

/// Right side: the chart increases counterclockwise. Left side: clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Side {
    R,
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
pub enum Mark {
    P,
    Pbar,
    Q,
    Qbar,
}

impl Mark {
    pub fn owner(self) -> Structure {
        match self {
            Mark::P | Mark::Pbar => Structure::H,
            Mark::Q | Mark::Qbar => Structure::K,
        }
    }
    pub fn name(self) -> &'static str {
        match self {
            Mark::P => "p",
            Mark::Pbar => "pbar",
            Mark::Q => "q",
            Mark::Qbar => "qbar",
        }
    }
}

/// Base symbols: marked points and seed-gap midpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Base {
    Mark(Mark),
    SeedMid { st: Structure, side: Side, seed: u8 },
}

impl Base {
    fn owner(self) -> Structure {
        match self {
            Base::Mark(m) => m.owner(),
            Base::SeedMid { st, .. } => st,
        }
    }
}

/// A point of the realization: reduced word applied to a base, where
/// trailing syllables of the base's owner are absorbed (dropped on marks,
/// added to `addr` on seed midpoints).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualPoint {
    pub word: NormalWord,
    pub base: Base,
    pub addr: Surd,
}

impl VirtualPoint {
    pub fn mark(m: Mark) -> Self {
        VirtualPoint { word: NormalWord::identity(), base: Base::Mark(m), addr: Surd::zero() }
    }

    pub fn seed_mid(st: Structure, side: Side, seed: u8) -> Self {
        VirtualPoint {
            word: NormalWord::identity(),
            base: Base::SeedMid { st, side, seed },
            addr: Surd::zero(),
        }
    }
}

impl fmt::Display for VirtualPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.word.is_identity() {
            write!(f, "{}.", self.word)?;
        }
        match self.base {
            Base::Mark(m) => write!(f, "{}", m.name())?,
            Base::SeedMid { st, side, seed } => write!(f, "mid({st:?},{side:?},{seed})")?,
        }
        if self.addr.sign() != 0 {
            write!(f, "@{}", self.addr)?;
        }
        Ok(())
    }
}

impl serde::Serialize for VirtualPoint {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Coordinate in one structure's chart on one side: inside the gap orbit of
/// seed `seed` at offset `offset` from the seed address, or at a core point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Coord {
    Gap { seed: u8, offset: Surd },
    Core(Surd),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Loc {
    AtMark(Mark),
    Side { side: Side, coord: Coord },
}

/// Gap arrangement of the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Arrangement {
    /// p < q < pbar < qbar with one seed gap per side:
    /// I_q, I_qbar are gaps of H around q, qbar; I_p, I_pbar gaps of K.
    Linked,
    /// p < qbar < q < pbar with a right gap R_p of H containing the closure
    /// of L(q) and a right gap R_q of K containing the closure of L(p).
    UnlinkedGeometric,
    /// p < qbar < q < pbar with right gaps I_1, I_3 of H around qbar and q
    /// (in distinct cosets) and gaps I_4 (right) and I_2 (left) of K.
    /// A non-geometric configuration; carried behind the unverified flag.
    UnlinkedParallel,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct SeedGap {
    pub arc: Arc,
    pub chart_addr: Surd,
}

/// Per-side gap system: the seed gaps whose translation orbits form the gap
/// address set. Seed addresses sit in distinct cosets of the group.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GapSystem {
    pub st: Structure,
    pub side: Side,
    pub seeds: Vec<SeedGap>,
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CheckedFact {
    pub fact: String,
    pub holds: bool,
}

#[derive(Clone, serde::Serialize)]
pub struct ModelConfig {
    pub arrangement: Arrangement,
    pub marks: [(Mark, CirclePoint); 4],
    pub lambda_h: TranslationGroup,
    pub lambda_k: TranslationGroup,
    #[serde(skip)]
    seeds: Vec<GapSystem>,
    pub factors: Vec<FactorSpec>,
    /// Parallel arrangement: chart address of the second H-seed.
    pub coset_offset: Option<Surd>,
    pub unverified_configuration: bool,
    /// Circular-order facts among marks, seed gaps and first-generation
    /// images, validated at build time against the geometric chain.
    pub base_order_table: Vec<CheckedFact>,
}

impl fmt::Debug for ModelConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ModelConfig({:?})", self.arrangement)
    }
}

/// Comparison cursor: a point together with how many head syllables have
/// been stripped by frame pullbacks, and whether a seed-midpoint base has
/// been pulled back to address zero.
struct Cursor<'a> {
    vp: &'a VirtualPoint,
    idx: usize,
    mid_pulled: bool,
}

impl ModelConfig {
    pub fn group(&self, st: Structure) -> &TranslationGroup {
        match st {
            Structure::H => &self.lambda_h,
            Structure::K => &self.lambda_k,
        }
    }

    pub fn gap_system(&self, st: Structure, side: Side) -> Option<&GapSystem> {
        self.seeds.iter().find(|g| g.st == st && g.side == side)
    }

    pub fn seed(&self, st: Structure, side: Side, seed: u8) -> &SeedGap {
        &self.gap_system(st, side).expect("side has seeds").seeds[seed as usize]
    }

    pub fn mark_point(&self, m: Mark) -> &CirclePoint {
        &self.marks.iter().find(|(mm, _)| *mm == m).unwrap().1
    }

    fn tau1_half(&self, st: Structure) -> Surd {
        &self.group(st).tau1 * &Surd::from_ratio(1, 2)
    }

    pub fn syllable_address(&self, syl: &Syllable) -> Surd {
        let st = Structure::from_factor(syl.factor);
        self.group(st).address(&syl.exponents)
    }

    fn syllable_for_address(&self, st: Structure, addr: &Surd) -> NormalWord {
        let (n1, n2) = self
            .group(st)
            .decompose(addr)
            .expect("addresses produced by the model decompose");
        let to_i64 = |n: BigInt| -> i64 { i64::try_from(n).expect("desk-scale exponent") };
        NormalWord::single(st.factor(), vec![to_i64(n1), to_i64(n2)])
    }

    /// Canonical form: absorb trailing syllables owned by the base.
    pub fn canonicalize(&self, word: NormalWord, base: Base, addr: Surd) -> VirtualPoint {
        let mut word = word;
        let mut addr = addr;
        let owner = base.owner();
        while let Some(last) = word.last() {
            if last.factor != owner.factor() {
                break;
            }
            match base {
                Base::Mark(_) => {
                    word = word.drop_last();
                }
                Base::SeedMid { .. } => {
                    let shift = self.syllable_address(last);
                    addr = &addr + &shift;
                    word = word.drop_last();
                }
            }
        }
        VirtualPoint { word, base, addr }
    }

    /// The group action w . x, in canonical form.
    pub fn act(&self, w: &NormalWord, x: &VirtualPoint) -> VirtualPoint {
        let product = w.multiply(&x.word);
        self.canonicalize(product, x.base, x.addr.clone())
    }

    fn total_pos(&self, st: Structure, side: Side, coord: &Coord) -> Surd {
        match coord {
            Coord::Core(t) => t.clone(),
            Coord::Gap { seed, offset } => {
                let base = &self.seed(st, side, *seed).chart_addr;
                base + offset
            }
        }
    }

    /// Which seed gap of `to` contains an object of the other structure
    /// sitting at chart position `pos` on `from_side` of `to.other()`.
    fn nest(&self, to: Structure, from_side: Side, pos: &Surd) -> (Side, u8) {
        let s = pos.sign();
        match self.arrangement {
            Arrangement::Linked => {
                debug_assert!(s != 0, "nested object at a seed address");
                match to {
                    // K-objects at negative positions sit in I_q, positive in I_qbar.
                    Structure::H => {
                        if s < 0 {
                            (Side::R, 0)
                        } else {
                            (Side::L, 0)
                        }
                    }
                    // H-objects at negative positions sit in I_p, positive in I_pbar.
                    Structure::K => {
                        if s < 0 {
                            (Side::L, 0)
                        } else {
                            (Side::R, 0)
                        }
                    }
                }
            }
            Arrangement::UnlinkedGeometric => match to {
                Structure::H => (Side::R, 0),
                Structure::K => (Side::R, 0),
            },
            Arrangement::UnlinkedParallel => match to {
                // K-objects at positive positions sit in I_1, negative in I_3.
                Structure::H => {
                    debug_assert!(s != 0);
                    if s > 0 {
                        (Side::R, 0)
                    } else {
                        (Side::R, 1)
                    }
                }
                // H-objects between the two H-seed addresses sit in I_2,
                // otherwise in I_4. The H left side is gapless and sits in I_4.
                Structure::K => {
                    if from_side == Side::L {
                        return (Side::R, 0);
                    }
                    let sigma = self.coset_offset.as_ref().expect("parallel model has coset offset");
                    if s > 0 && pos.cmp_value(sigma) == std::cmp::Ordering::Less {
                        (Side::L, 0)
                    } else {
                        (Side::R, 0)
                    }
                }
            },
        }
    }

    /// Placement of the seed-gap midpoints (at addr 0) in the other
    /// structure's chart.
    fn mid_placement(&self, st: Structure, side: Side, seed: u8) -> Loc {
        let other = st.other();
        match self.arrangement {
            Arrangement::Linked => {
                // Each mid sits just counterclockwise of its marked point, at
                // an off-lattice core coordinate of the other chart.
                let half = self.tau1_half(other);
                match (st, side) {
                    // mid of I_q: just ccw of q => K-right core at -tau1/2
                    (Structure::H, Side::R) => Loc::Side { side: Side::R, coord: Coord::Core(-&half) },
                    // mid of I_qbar: just ccw of qbar => K-left core at +tau1/2
                    (Structure::H, Side::L) => Loc::Side { side: Side::L, coord: Coord::Core(half) },
                    // mid of I_p: just ccw of p => H-right core at -tau1/2
                    (Structure::K, Side::L) => Loc::Side { side: Side::R, coord: Coord::Core(-&half) },
                    // mid of I_pbar: just ccw of pbar => H-left core at +tau1/2
                    (Structure::K, Side::R) => Loc::Side { side: Side::L, coord: Coord::Core(half) },
                }
            }
            Arrangement::UnlinkedGeometric => match (st, side) {
                // mid of R_p: center of the gapless left chart of K
                (Structure::H, Side::R) => Loc::Side { side: Side::L, coord: Coord::Core(Surd::zero()) },
                // mid of R_q: center of the gapless left chart of H
                (Structure::K, Side::R) => Loc::Side { side: Side::L, coord: Coord::Core(Surd::zero()) },
                _ => panic!("unlinked geometric model has right seeds only"),
            },
            Arrangement::UnlinkedParallel => {
                let half = self.tau1_half(other);
                match (st, side, seed) {
                    // mid of I_1 (contains qbar): K-left core at +tau1/2
                    (Structure::H, Side::R, 0) => Loc::Side { side: Side::L, coord: Coord::Core(half) },
                    // mid of I_3 (contains q): K-right core at -tau1/2
                    (Structure::H, Side::R, 1) => Loc::Side { side: Side::R, coord: Coord::Core(-&half) },
                    // mid of I_2 (between the H seeds): H-right core at sigma/2
                    (Structure::K, Side::L, 0) => {
                        let sigma = self.coset_offset.as_ref().unwrap();
                        Loc::Side {
                            side: Side::R,
                            coord: Coord::Core(sigma * &Surd::from_ratio(1, 2)),
                        }
                    }
                    // mid of I_4 (contains pbar and p): center of the gapless
                    // left chart of H
                    (Structure::K, Side::R, 0) => {
                        Loc::Side { side: Side::L, coord: Coord::Core(Surd::zero()) }
                    }
                    _ => panic!("no such seed in parallel model"),
                }
            }
        }
    }

    /// Seed gap containing the given mark of the other structure.
    fn mark_container(&self, st: Structure, m: Mark) -> (Side, u8) {
        debug_assert_ne!(m.owner(), st);
        match self.arrangement {
            Arrangement::Linked => match m {
                Mark::Q => (Side::R, 0),
                Mark::Qbar => (Side::L, 0),
                Mark::P => (Side::L, 0),
                Mark::Pbar => (Side::R, 0),
            },
            Arrangement::UnlinkedGeometric => (Side::R, 0),
            Arrangement::UnlinkedParallel => match m {
                Mark::Qbar => (Side::R, 0), // I_1
                Mark::Q => (Side::R, 1),    // I_3
                Mark::P | Mark::Pbar => (Side::R, 0), // I_4
            },
        }
    }

    fn base_loc(&self, st: Structure, base: Base, addr: &Surd) -> Loc {
        match base {
            Base::Mark(m) => {
                if m.owner() == st {
                    Loc::AtMark(m)
                } else {
                    let (side, seed) = self.mark_container(st, m);
                    Loc::Side { side, coord: Coord::Gap { seed, offset: Surd::zero() } }
                }
            }
            Base::SeedMid { st: owner, side, seed } => {
                if owner == st {
                    Loc::Side { side, coord: Coord::Gap { seed, offset: addr.clone() } }
                } else if addr.sign() == 0 {
                    self.mid_placement(owner, side, seed)
                } else {
                    // The midpoint of the gap at address seed+addr: locate
                    // that gap of the other structure in this chart.
                    let pos = &self.seed(owner, side, seed).chart_addr + addr;
                    let (nside, nseed) = self.nest(st, side, &pos);
                    Loc::Side { side: nside, coord: Coord::Gap { seed: nseed, offset: Surd::zero() } }
                }
            }
        }
    }

    // ------------------------------------------------------------------
    // Circular order
    // ------------------------------------------------------------------

    /// Location pairs (H, K) of every suffix of the word, outermost first:
    /// entry i locates the point obtained by dropping the first i syllables.
    /// Built once per comparison so the frame recursion runs in linear time.
    fn locs_chain(&self, x: &VirtualPoint) -> Vec<(Loc, Loc)> {
        let sylls = x.word.syllables();
        let n = sylls.len();
        let mut chain: Vec<(Loc, Loc)> = Vec::with_capacity(n + 1);
        chain.push((
            self.base_loc(Structure::H, x.base, &x.addr),
            self.base_loc(Structure::K, x.base, &x.addr),
        ));
        for syl in sylls.iter().rev() {
            let st = Structure::from_factor(syl.factor);
            let shift = self.syllable_address(syl);
            let (prev_h, prev_k) = chain.last().unwrap();
            let own_prev = match st {
                Structure::H => prev_h,
                Structure::K => prev_k,
            };
            let own = match own_prev {
                Loc::AtMark(m) => {
                    debug_assert_eq!(m.owner(), st);
                    Loc::AtMark(*m)
                }
                Loc::Side { side, coord } => Loc::Side {
                    side: *side,
                    coord: match coord {
                        Coord::Gap { seed, offset } => Coord::Gap { seed: *seed, offset: offset + &shift },
                        Coord::Core(t) => Coord::Core(t + &shift),
                    },
                },
            };
            let other = match &own {
                Loc::AtMark(_) => unreachable!("canonical word cannot sit at its own mark"),
                Loc::Side { side, coord } => {
                    let pos = self.total_pos(st, *side, coord);
                    let (nside, nseed) = self.nest(st.other(), *side, &pos);
                    Loc::Side { side: nside, coord: Coord::Gap { seed: nseed, offset: Surd::zero() } }
                }
            };
            match st {
                Structure::H => chain.push((own, other)),
                Structure::K => chain.push((other, own)),
            }
        }
        chain.reverse();
        chain
    }

    /// Location of a canonical point in the chart structure of `st`.
    pub fn loc(&self, st: Structure, x: &VirtualPoint) -> Loc {
        let chain = self.locs_chain(x);
        let (h, k) = chain.into_iter().next().unwrap();
        match st {
            Structure::H => h,
            Structure::K => k,
        }
    }

    /// Linear order on the realization, cutting the circle at p (p first).
    pub fn cmp_points(&self, x: &VirtualPoint, y: &VirtualPoint) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        if x == y {
            return Ordering::Equal;
        }
        let chain_x = self.locs_chain(x);
        let chain_y = self.locs_chain(y);
        let mut cx = Cursor { vp: x, idx: 0, mid_pulled: false };
        let mut cy = Cursor { vp: y, idx: 0, mid_pulled: false };
        let lx = self.cursor_loc(&cx, &chain_x, Structure::H);
        let ly = self.cursor_loc(&cy, &chain_y, Structure::H);
        let rank = |l: &Loc| -> u8 {
            match l {
                Loc::AtMark(Mark::P) => 0,
                Loc::Side { side: Side::R, .. } => 1,
                Loc::AtMark(Mark::Pbar) => 2,
                Loc::Side { side: Side::L, .. } => 3,
                Loc::AtMark(_) => unreachable!("Q marks are nested"),
            }
        };
        let (rx, ry) = (rank(&lx), rank(&ly));
        if rx != ry {
            return rx.cmp(&ry);
        }
        match (lx, ly) {
            (Loc::Side { side, coord: kx }, Loc::Side { coord: ky, .. }) => self.cmp_same_side(
                Structure::H,
                side,
                &kx,
                &ky,
                &mut cx,
                &chain_x,
                &mut cy,
                &chain_y,
            ),
            _ => Ordering::Equal,
        }
    }

    fn cursor_loc(&self, c: &Cursor, chain: &[(Loc, Loc)], st: Structure) -> Loc {
        if c.mid_pulled {
            let Base::SeedMid { st: owner, side, seed } = c.vp.base else {
                unreachable!("only seed midpoints are pulled to zero")
            };
            if owner == st {
                Loc::Side { side, coord: Coord::Gap { seed, offset: Surd::zero() } }
            } else {
                self.mid_placement(owner, side, seed)
            }
        } else {
            let (h, k) = &chain[c.idx];
            match st {
                Structure::H => h.clone(),
                Structure::K => k.clone(),
            }
        }
    }

    /// Consumes the pullback by `off` in structure `st`: the cursor's suffix
    /// begins with the matching syllable, or the point is a seed midpoint at
    /// that address.
    fn advance(&self, c: &mut Cursor, st: Structure, off: &Surd) {
        if off.sign() == 0 {
            return;
        }
        let sylls = c.vp.word.syllables();
        if c.idx < sylls.len() {
            debug_assert_eq!(sylls[c.idx].factor, st.factor());
            debug_assert_eq!(&self.syllable_address(&sylls[c.idx]), off);
            c.idx += 1;
        } else {
            debug_assert!(matches!(c.vp.base, Base::SeedMid { st: o, .. } if o == st));
            debug_assert_eq!(&c.vp.addr, off);
            c.mid_pulled = true;
        }
    }

    /// Compare two points known to lie on the same side of the same chart.
    /// Counterclockwise order is increasing chart position on R sides and
    /// decreasing on L sides.
    #[allow(clippy::too_many_arguments)]
    fn cmp_same_side(
        &self,
        st: Structure,
        side: Side,
        kx: &Coord,
        ky: &Coord,
        cx: &mut Cursor,
        chain_x: &[(Loc, Loc)],
        cy: &mut Cursor,
        chain_y: &[(Loc, Loc)],
    ) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let px = self.total_pos(st, side, kx);
        let py = self.total_pos(st, side, ky);
        let pos_cmp = px.cmp_value(&py);
        let oriented = match side {
            Side::R => pos_cmp,
            Side::L => pos_cmp.reverse(),
        };
        if oriented != Ordering::Equal {
            return oriented;
        }
        match (kx, ky) {
            (Coord::Gap { seed: sx, offset: ox }, Coord::Gap { seed: sy, .. }) => {
                debug_assert_eq!(sx, sy, "equal positions in distinct cosets");
                self.advance(cx, st, ox);
                self.advance(cy, st, ox);
                self.cmp_in_seed_frame(st, side, *sx, cx, chain_x, cy, chain_y)
            }
            (Coord::Core(_), Coord::Core(_)) => {
                unreachable!("distinct points never share a core coordinate")
            }
            _ => unreachable!("core coordinates never collide with gap addresses"),
        }
    }

    /// Compare two points inside the seed gap (st, side, seed), by the other
    /// structure's chart. The slot layout around the contained marks depends
    /// on the arrangement.
    #[allow(clippy::too_many_arguments)]
    fn cmp_in_seed_frame(
        &self,
        st: Structure,
        side: Side,
        seed: u8,
        cx: &mut Cursor,
        chain_x: &[(Loc, Loc)],
        cy: &mut Cursor,
        chain_y: &[(Loc, Loc)],
    ) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        let inner = st.other();
        let lx = self.cursor_loc(cx, chain_x, inner);
        let ly = self.cursor_loc(cy, chain_y, inner);
        let key = |l: &Loc| -> (u8, Option<(Side, Coord)>) {
            match l {
                Loc::AtMark(m) => (self.frame_mark_rank(st, side, seed, *m), None),
                Loc::Side { side: s, coord } => {
                    (self.frame_side_rank(st, side, seed, *s, coord), Some((*s, coord.clone())))
                }
            }
        };
        let (rx, keyx) = key(&lx);
        let (ry, keyy) = key(&ly);
        if rx != ry {
            return rx.cmp(&ry);
        }
        match (keyx, keyy) {
            (Some((s, coordx)), Some((_, coordy))) => {
                self.cmp_same_side(inner, s, &coordx, &coordy, cx, chain_x, cy, chain_y)
            }
            _ => Ordering::Equal,
        }
    }

    /// Rank of a mark slot within the frame of the given seed gap.
    fn frame_mark_rank(&self, st: Structure, side: Side, seed: u8, m: Mark) -> u8 {
        match self.arrangement {
            Arrangement::Linked => {
                // frames: I_q = [K-L desc][q][K-R asc], I_qbar = [K-R][qbar][K-L],
                // I_p = [H-L][p][H-R], I_pbar = [H-R][pbar][H-L]
                debug_assert_eq!((self.mark_container(st, m)), (side, seed));
                1
            }
            Arrangement::UnlinkedGeometric => {
                // R_p = [K-R pos>0][qbar][K-L desc][q][K-R pos<0]
                // R_q = [H-R pos>0][pbar][H-L desc][p][H-R pos<0]
                match m {
                    Mark::Qbar | Mark::Pbar => 1,
                    Mark::Q | Mark::P => 3,
                }
            }
            Arrangement::UnlinkedParallel => match (st, side, seed, m) {
                (Structure::H, Side::R, 0, Mark::Qbar) => 1,
                (Structure::H, Side::R, 1, Mark::Q) => 1,
                (Structure::K, Side::R, 0, Mark::Pbar) => 1,
                (Structure::K, Side::R, 0, Mark::P) => 3,
                _ => unreachable!("mark {m:?} not inside seed ({st:?},{side:?},{seed})"),
            },
        }
    }

    /// Rank of a side slot within the frame of the given seed gap.
    fn frame_side_rank(&self, st: Structure, side: Side, seed: u8, inner_side: Side, coord: &Coord) -> u8 {
        let inner = st.other();
        let pos = self.total_pos(inner, inner_side, coord);
        let s = pos.sign();
        match self.arrangement {
            Arrangement::Linked => {
                // around a mark: [inner-L before][mark][inner-R after] for
                // right-of-mark seeds; mirrored for companion seeds.
                match (st, side) {
                    // I_q: positions < 0; L before q, R after
                    (Structure::H, Side::R) | (Structure::K, Side::L) => match inner_side {
                        Side::L => 0,
                        Side::R => 2,
                    },
                    // I_qbar / I_pbar: positions > 0; R before the mark, L after
                    (Structure::H, Side::L) | (Structure::K, Side::R) => match inner_side {
                        Side::R => 0,
                        Side::L => 2,
                    },
                }
            }
            Arrangement::UnlinkedGeometric => match (inner_side, s >= 0) {
                (Side::R, true) => 0,
                (Side::L, _) => 2,
                (Side::R, false) => 4,
            },
            Arrangement::UnlinkedParallel => match (st, side, seed) {
                // I_1 = [K-R pos>0][qbar][K-L pos>0]
                (Structure::H, Side::R, 0) => match inner_side {
                    Side::R => 0,
                    Side::L => 2,
                },
                // I_3 = [K-L pos<0][q][K-R pos<0]
                (Structure::H, Side::R, 1) => match inner_side {
                    Side::L => 0,
                    Side::R => 2,
                },
                // I_2 = [H-R pos in (0, sigma)]
                (Structure::K, Side::L, 0) => 0,
                // I_4 = [H-R pos>sigma][pbar][H-L][p][H-R pos<0]
                (Structure::K, Side::R, 0) => match (inner_side, s > 0) {
                    (Side::R, true) => 0,
                    (Side::L, _) => 2,
                    (Side::R, false) => 4,
                },
                _ => unreachable!(),
            },
        }
    }

    /// The circular order on the realization.
    pub fn compare(&self, x: &VirtualPoint, y: &VirtualPoint, z: &VirtualPoint) -> i8 {
        use std::cmp::Ordering;
        if x == y || y == z || x == z {
            return 0;
        }
        let xy = self.cmp_points(x, y) == Ordering::Less;
        let yz = self.cmp_points(y, z) == Ordering::Less;
        let xz = self.cmp_points(x, z) == Ordering::Less;
        // +1 exactly when the linear (cut) comparisons have odd parity:
        // the three counterclockwise patterns x<y<z, z<x<y, y<z<x.
        if xy ^ yz ^ xz {
            1
        } else {
            -1
        }
    }
}

// ----------------------------------------------------------------------
// Builders
// ----------------------------------------------------------------------

/// Seed arcs for the linked arrangement, on the model circle.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LinkedSeeds {
    pub p: CirclePoint,
    pub q: CirclePoint,
    pub pbar: CirclePoint,
    pub qbar: CirclePoint,
    /// Gap of K containing p, gap of H containing q, gap of K containing
    /// pbar, gap of H containing qbar.
    pub i_p: Arc,
    pub i_q: Arc,
    pub i_pbar: Arc,
    pub i_qbar: Arc,
}

fn model_factors() -> Vec<FactorSpec> {
    vec![FactorSpec::new("H", &["h1", "h2"]), FactorSpec::new("K", &["f1", "f2"])]
}

/// closure(A) union closure(B) = S^1, for two arcs: everything outside
/// [A.lo, A.hi] must lie in [B.lo, B.hi].
pub fn two_arc_closures_cover(a: &Arc, b: &Arc) -> bool {
    let outside_a = Arc { lo: a.hi.clone(), hi: a.lo.clone() };
    let outside_b = Arc { lo: b.hi.clone(), hi: b.lo.clone() };
    !outside_a.overlaps(&outside_b)
}

fn chain_fact(points: &[(&str, &CirclePoint)], strict_after: &[bool]) -> Result<Vec<CheckedFact>, ModelError> {
    // points cyclically ordered; strict_after[i] says whether the step from
    // points[i] to points[i+1] must be strict (points distinct) or may close
    // up (equality allowed).
    use crate::circle::circular_order;
    let n = points.len();
    let mut facts = Vec::new();
    for i in 0..n {
        let j = (i + 1) % n;
        let (name_i, pi) = points[i];
        let (name_j, pj) = points[j];
        if pi == pj {
            let holds = !strict_after[i];
            facts.push(CheckedFact { fact: format!("{name_i} = {name_j}"), holds });
            if !holds {
                return Err(ModelError::SeedChainViolation(format!("{name_i} < {name_j} required")));
            }
        }
    }
    // Collapse coincident consecutive points and check the cyclic order of
    // the distinct representatives.
    let mut reps: Vec<(&str, &CirclePoint)> = Vec::new();
    for &(name, p) in points {
        if reps.iter().all(|(_, q)| *q != p) {
            reps.push((name, p));
        }
    }
    for i in 1..reps.len().saturating_sub(1) {
        let holds = circular_order(reps[0].1, reps[i].1, reps[i + 1].1) == 1;
        facts.push(CheckedFact {
            fact: format!("{} < {} < {}", reps[0].0, reps[i].0, reps[i + 1].0),
            holds,
        });
        if !holds {
            return Err(ModelError::SeedChainViolation(format!(
                "{} < {} < {}",
                reps[0].0, reps[i].0, reps[i + 1].0
            )));
        }
    }
    Ok(facts)
}

/// Builds the linked model: arrangement p < q < pbar < qbar, one seed gap
/// per side, validated against the 12-term seed chain
/// p < u_q <= v_p < q < u_pbar <= v_q <= pbar < u_qbar <= v_pbar < qbar < u_p <= v_qbar < p.
pub fn build_linked_model(
    lambda_p: TranslationGroup,
    lambda_q: TranslationGroup,
    seeds: LinkedSeeds,
) -> Result<ModelConfig, ModelError> {
    use crate::circle::circular_order;
    let LinkedSeeds { p, q, pbar, qbar, i_p, i_q, i_pbar, i_qbar } = &seeds;
    for (name, alpha, arc) in [
        ("p in I_p", p, i_p),
        ("q in I_q", q, i_q),
        ("pbar in I_pbar", pbar, i_pbar),
        ("qbar in I_qbar", qbar, i_qbar),
    ] {
        if !arc.contains(alpha) {
            return Err(ModelError::SeedChainViolation(format!("{name} fails")));
        }
    }
    if !(circular_order(p, q, pbar) == 1 && circular_order(p, pbar, qbar) == 1) {
        return Err(ModelError::SeedChainViolation("arrangement p < q < pbar < qbar fails".into()));
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
    // strictness per step: p<u_q, u_q<=v_p, v_p<q, q<u_pbar, u_pbar<=v_q,
    // v_q<=pbar, pbar<u_qbar, u_qbar<=v_pbar, v_pbar<qbar, qbar<u_p,
    // u_p<=v_qbar, v_qbar<p
    let strict = [true, false, true, true, false, false, true, false, true, true, false, true];
    let mut table = chain_fact(&points, &strict)?;

    let config = ModelConfig {
        arrangement: Arrangement::Linked,
        marks: [
            (Mark::P, p.clone()),
            (Mark::Q, q.clone()),
            (Mark::Pbar, pbar.clone()),
            (Mark::Qbar, qbar.clone()),
        ],
        lambda_h: lambda_p,
        lambda_k: lambda_q,
        seeds: vec![
            GapSystem { st: Structure::H, side: Side::R, seeds: vec![SeedGap { arc: i_q.clone(), chart_addr: Surd::zero() }] },
            GapSystem { st: Structure::H, side: Side::L, seeds: vec![SeedGap { arc: i_qbar.clone(), chart_addr: Surd::zero() }] },
            GapSystem { st: Structure::K, side: Side::L, seeds: vec![SeedGap { arc: i_p.clone(), chart_addr: Surd::zero() }] },
            GapSystem { st: Structure::K, side: Side::R, seeds: vec![SeedGap { arc: i_pbar.clone(), chart_addr: Surd::zero() }] },
        ],
        factors: model_factors(),
        coset_offset: None,
        unverified_configuration: false,
        base_order_table: Vec::new(),
    };
    table.extend(config.realized_chain_facts()?);
    Ok(ModelConfig { base_order_table: table, ..config })
}

/// Seed data of the geometric unlinked model: p < qbar < q < pbar, a right
/// gap R_p of H containing the closure of L(q), a right gap R_q of K
/// containing the closure of L(p), with S^1 = closure(R_p union R_q).
#[derive(Debug, Clone, serde::Serialize)]
pub struct UnlinkedGeometricSeeds {
    pub p: CirclePoint,
    pub qbar: CirclePoint,
    pub q: CirclePoint,
    pub pbar: CirclePoint,
    pub r_p: Arc,
    pub r_q: Arc,
}

pub fn build_unlinked_geometric_model(
    lambda_p: TranslationGroup,
    lambda_q: TranslationGroup,
    seeds: UnlinkedGeometricSeeds,
) -> Result<ModelConfig, ModelError> {
    use crate::circle::circular_order;
    let UnlinkedGeometricSeeds { p, qbar, q, pbar, r_p, r_q } = &seeds;
    if !(circular_order(p, qbar, q) == 1 && circular_order(p, q, pbar) == 1) {
        return Err(ModelError::SeedChainViolation("arrangement p < qbar < q < pbar fails".into()));
    }
    for (name, x, arc) in [
        ("qbar in R_p", qbar, r_p),
        ("q in R_p", q, r_p),
        ("pbar in R_q", pbar, r_q),
        ("p in R_q", p, r_q),
    ] {
        if !arc.contains(x) {
            return Err(ModelError::SeedChainViolation(format!("{name} fails")));
        }
    }
    if r_p.contains(p) || r_p.contains(pbar) || r_q.contains(q) || r_q.contains(qbar) {
        return Err(ModelError::SeedChainViolation("seed gap contains its own marked point".into()));
    }
    if !two_arc_closures_cover(r_p, r_q) {
        return Err(ModelError::SeedChainViolation("closure(R_p union R_q) must cover the circle".into()));
    }
    let table = vec![CheckedFact { fact: "S1 = closure(R_p u R_q)".into(), holds: true }];
    let config = ModelConfig {
        arrangement: Arrangement::UnlinkedGeometric,
        marks: [
            (Mark::P, p.clone()),
            (Mark::Qbar, qbar.clone()),
            (Mark::Q, q.clone()),
            (Mark::Pbar, pbar.clone()),
        ],
        lambda_h: lambda_p,
        lambda_k: lambda_q,
        seeds: vec![
            GapSystem { st: Structure::H, side: Side::R, seeds: vec![SeedGap { arc: r_p.clone(), chart_addr: Surd::zero() }] },
            GapSystem { st: Structure::K, side: Side::R, seeds: vec![SeedGap { arc: r_q.clone(), chart_addr: Surd::zero() }] },
        ],
        factors: model_factors(),
        coset_offset: None,
        unverified_configuration: false,
        base_order_table: table,
    };
    Ok(config)
}

/// Seed data for the parallel (non-geometric) unlinked model of the
/// four-gap chain p < u_1 <= v_4 < qbar < u_2 <= v_1 < u_3 <= v_2 < q <
/// u_4 <= v_3 < pbar < p. I_1, I_3 are gaps of H (distinct cosets), I_2 a
/// left and I_4 a right gap of K.
#[derive(Debug, Clone, serde::Serialize)]
pub struct UnlinkedParallelSeeds {
    pub p: CirclePoint,
    pub qbar: CirclePoint,
    pub q: CirclePoint,
    pub pbar: CirclePoint,
    pub i1: Arc,
    pub i2: Arc,
    pub i3: Arc,
    pub i4: Arc,
    /// Chart address of I_3; must lie outside the H translation group.
    pub coset_offset: Surd,
}

pub fn build_unlinked_parallel_model(
    lambda_p: TranslationGroup,
    lambda_q: TranslationGroup,
    seeds: UnlinkedParallelSeeds,
) -> Result<ModelConfig, ModelError> {
    use crate::circle::circular_order;
    let UnlinkedParallelSeeds { p, qbar, q, pbar, i1, i2, i3, i4, coset_offset } = &seeds;
    if !(circular_order(p, qbar, q) == 1 && circular_order(p, q, pbar) == 1) {
        return Err(ModelError::SeedChainViolation("arrangement p < qbar < q < pbar fails".into()));
    }
    if !i1.contains(qbar) || !i3.contains(q) || !i4.contains(pbar) || !i4.contains(p) {
        return Err(ModelError::SeedChainViolation(
            "need qbar in I_1, q in I_3, {pbar, p} in I_4".into(),
        ));
    }
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
    let table = chain_fact(&points, &strict)?;
    if coset_offset.sign() <= 0 {
        return Err(ModelError::InvalidModel("coset offset must be positive".into()));
    }
    if lambda_p.contains(coset_offset) {
        return Err(ModelError::InvalidModel("I_3 chart address must lie outside the H group".into()));
    }
    let half_offset = coset_offset * &Surd::from_ratio(1, 2);
    if lambda_p.contains(&half_offset) || lambda_p.contains(&(&half_offset - coset_offset)) {
        return Err(ModelError::InvalidModel(
            "half the coset offset must avoid both seed cosets".into(),
        ));
    }
    Ok(ModelConfig {
        arrangement: Arrangement::UnlinkedParallel,
        marks: [
            (Mark::P, p.clone()),
            (Mark::Qbar, qbar.clone()),
            (Mark::Q, q.clone()),
            (Mark::Pbar, pbar.clone()),
        ],
        lambda_h: lambda_p,
        lambda_k: lambda_q,
        seeds: vec![
            GapSystem {
                st: Structure::H,
                side: Side::R,
                seeds: vec![
                    SeedGap { arc: i1.clone(), chart_addr: Surd::zero() },
                    SeedGap { arc: i3.clone(), chart_addr: coset_offset.clone() },
                ],
            },
            GapSystem { st: Structure::K, side: Side::L, seeds: vec![SeedGap { arc: i2.clone(), chart_addr: Surd::zero() }] },
            GapSystem { st: Structure::K, side: Side::R, seeds: vec![SeedGap { arc: i4.clone(), chart_addr: Surd::zero() }] },
        ],
        factors: model_factors(),
        coset_offset: Some(coset_offset.clone()),
        unverified_configuration: true,
        base_order_table: table,
    })
}

impl ModelConfig {
    /// Realized geometric chain on orbit points, for one positive address in
    /// each factor: p < h^-1(q) < f^-1(p) < q < f^-1(pbar) < h(q) < pbar <
    /// h(qbar) < f(pbar) < qbar < f(p) < h^-1(qbar) < p.
    pub fn realized_chain(&self, lam_h: &Surd, lam_f: &Surd) -> Result<Vec<CheckedFact>, ModelError> {
        if self.arrangement != Arrangement::Linked {
            return Err(ModelError::PreconditionViolated("chain is for the linked model".into()));
        }
        if lam_h.sign() <= 0 || lam_f.sign() <= 0 {
            return Err(ModelError::PreconditionViolated("chain addresses must be positive".into()));
        }
        let h = self.syllable_for_address(Structure::H, lam_h);
        let f = self.syllable_for_address(Structure::K, lam_f);
        let hinv = h.inverse();
        let finv = f.inverse();
        let pt = |m: Mark| VirtualPoint::mark(m);
        let pts: Vec<(String, VirtualPoint)> = vec![
            ("p".into(), pt(Mark::P)),
            ("h^-1(q)".into(), self.act(&hinv, &pt(Mark::Q))),
            ("f^-1(p)".into(), self.act(&finv, &pt(Mark::P))),
            ("q".into(), pt(Mark::Q)),
            ("f^-1(pbar)".into(), self.act(&finv, &pt(Mark::Pbar))),
            ("h(q)".into(), self.act(&h, &pt(Mark::Q))),
            ("pbar".into(), pt(Mark::Pbar)),
            ("h(qbar)".into(), self.act(&h, &pt(Mark::Qbar))),
            ("f(pbar)".into(), self.act(&f, &pt(Mark::Pbar))),
            ("qbar".into(), pt(Mark::Qbar)),
            ("f(p)".into(), self.act(&f, &pt(Mark::P))),
            ("h^-1(qbar)".into(), self.act(&hinv, &pt(Mark::Qbar))),
        ];
        let mut facts = Vec::new();
        for i in 1..pts.len() - 1 {
            let c = self.compare(&pts[0].1, &pts[i].1, &pts[i + 1].1);
            let holds = c == 1;
            facts.push(CheckedFact {
                fact: format!("{} < {} < {}", pts[0].0, pts[i].0, pts[i + 1].0),
                holds,
            });
            if !holds {
                return Err(ModelError::SeedChainViolation(format!(
                    "realized chain fails at {} < {} < {}",
                    pts[0].0, pts[i].0, pts[i + 1].0
                )));
            }
        }
        Ok(facts)
    }

    fn realized_chain_facts(&self) -> Result<Vec<CheckedFact>, ModelError> {
        let lam_h = self.lambda_h.address(&[1, 0]);
        let lam_f = self.lambda_k.address(&[1, 0]);
        self.realized_chain(&lam_h, &lam_f)
    }

    // ------------------------------------------------------------------
    // Gap and core predicates
    // ------------------------------------------------------------------

    /// The gap containing x in the structure stabilizing the given mark, if
    /// any: (side, seed index, offset address).
    pub fn gap_of(&self, st: Structure, x: &VirtualPoint) -> Option<(Side, u8, Surd)> {
        match self.loc(st, x) {
            Loc::Side { side, coord: Coord::Gap { seed, offset } } => Some((side, seed, offset)),
            _ => None,
        }
    }

    /// x lies in Core(p) (st = H) or Core(q) (st = K): at a marked point of
    /// the structure or at a core chart coordinate.
    pub fn in_core(&self, st: Structure, x: &VirtualPoint) -> bool {
        match self.loc(st, x) {
            Loc::AtMark(_) => true,
            Loc::Side { coord: Coord::Core(_), .. } => true,
            Loc::Side { coord: Coord::Gap { .. }, .. } => false,
        }
    }

    /// Membership in the two ping-pong sides: the U_p side consists of the
    /// listed K seed gaps (plus the H marks they contain), the U_q side of
    /// the H seed gaps (plus the K marks). Virtual points never land in the
    /// closed overlaps trimmed by the partition formulas, so seed-gap
    /// membership at offset zero is exact.
    pub fn in_u_side(&self, st_own: Structure, x: &VirtualPoint) -> bool {
        // U side of H's marks = union of K-owned seed gaps around p, pbar.
        let gap_owner = st_own.other();
        match self.loc(gap_owner, x) {
            Loc::AtMark(m) => m.owner() == st_own,
            Loc::Side { coord: Coord::Gap { offset, .. }, .. } => offset.sign() == 0,
            Loc::Side { coord: Coord::Core(_), .. } => false,
        }
    }

    /// Gap-system view of a marked point's stabilizer on the given side,
    /// bundled with the membership predicates.
    pub fn gaps_and_core(&self, label: Mark, side: Side) -> Option<GapsAndCore<'_>> {
        let st = label.owner();
        self.gap_system(st, side).map(|system| GapsAndCore { model: self, st, system })
    }

    /// Default sample points: the marked points and seed midpoints.
    pub fn base_points(&self) -> Vec<VirtualPoint> {
        let mut pts: Vec<VirtualPoint> = self.marks.iter().map(|(m, _)| VirtualPoint::mark(*m)).collect();
        for gs in &self.seeds {
            for (i, _) in gs.seeds.iter().enumerate() {
                pts.push(VirtualPoint::seed_mid(gs.st, gs.side, i as u8));
            }
        }
        pts
    }

    /// Sample points pushed around by all words of l1 mass at most `depth`.
    pub fn sample_points(&self, depth: u64) -> Vec<VirtualPoint> {
        let mut out = self.base_points();
        let base = self.base_points();
        for w in crate::words::ball(&self.factors, depth) {
            for b in &base {
                let y = self.act(&w, b);
                if !out.contains(&y) {
                    out.push(y);
                }
            }
        }
        out
    }
}

/// View over one side's gap system of a stabilizer, with the exact
/// membership predicates for points of the realization.
pub struct GapsAndCore<'a> {
    model: &'a ModelConfig,
    st: Structure,
    pub system: &'a GapSystem,
}

impl GapsAndCore<'_> {
    /// The gap of the stabilizer containing x (on either side), if any.
    pub fn gap_containing(&self, x: &VirtualPoint) -> Option<(Side, u8, Surd)> {
        self.model.gap_of(self.st, x)
    }

    /// x lies in the core of the stabilizer (a marked point or a core chart
    /// coordinate).
    pub fn in_core(&self, x: &VirtualPoint) -> bool {
        self.model.in_core(self.st, x)
    }
}

// ----------------------------------------------------------------------
// North-south audit
// ----------------------------------------------------------------------

#[derive(Debug, Clone, serde::Serialize)]
pub struct AuditReport {
    pub word: NormalWord,
    pub iterations: u32,
    pub pass: bool,
    pub failure: Option<String>,
    pub forward_cluster: Vec<String>,
    pub backward_cluster: Vec<String>,
}

/// Iterates w and w^-1 on the samples; checks that forward orbits are
/// eventually circularly monotone and accumulate in a single cluster,
/// backward likewise, and that the clusters are disjoint.
pub fn north_south_audit(
    model: &ModelConfig,
    w: &NormalWord,
    samples: &[VirtualPoint],
    iterations: u32,
) -> Result<AuditReport, ModelError> {
    if w.is_identity() {
        return Err(ModelError::PreconditionViolated("audit word must be nontrivial".into()));
    }
    if iterations < 2 {
        return Err(ModelError::PreconditionViolated("need at least 2 iterations".into()));
    }
    let winv = w.inverse();
    let mut fail: Option<String> = None;
    let mut late_fwd: Vec<VirtualPoint> = Vec::new();
    let mut late_bwd: Vec<VirtualPoint> = Vec::new();
    let tail_from = (iterations / 2) as usize;
    for s in samples {
        let mut fwd = vec![s.clone()];
        let mut bwd = vec![s.clone()];
        for _ in 0..iterations {
            fwd.push(model.act(w, fwd.last().unwrap()));
            bwd.push(model.act(&winv, bwd.last().unwrap()));
        }
        if model.act(w, s) == *s {
            // fixed sample: contributes to neither cluster, but must not be
            // claimed by both; skip it.
            continue;
        }
        for (name, orbit) in [("forward", &fwd), ("backward", &bwd)] {
            let mut sign = 0i8;
            for i in tail_from..orbit.len() - 2 {
                let c = model.compare(&orbit[i], &orbit[i + 1], &orbit[i + 2]);
                if sign == 0 {
                    sign = c;
                } else if c != 0 && c != sign {
                    fail.get_or_insert(format!(
                        "{name} orbit of {s} not eventually monotone at step {i}: c({},{},{}) = {c}",
                        orbit[i], orbit[i + 1], orbit[i + 2]
                    ));
                }
            }
        }
        late_fwd.push(fwd.last().unwrap().clone());
        late_fwd.push(fwd[fwd.len() - 2].clone());
        late_bwd.push(bwd.last().unwrap().clone());
        late_bwd.push(bwd[bwd.len() - 2].clone());
    }
    // Cluster separation: every late-forward point must be strictly between
    // no pair of late-backward points, i.e. going around the circle the
    // forward block is contiguous. Check via a reference backward point:
    // all forward points lie in one arc bounded by backward points and vice
    // versa. Use the coarse criterion: for all fwd a and bwd b, b' the
    // circular order c(b, a, b') has one consistent sign pattern, which holds
    // iff the two sets do not interleave.
    if fail.is_none() && !late_fwd.is_empty() && !late_bwd.is_empty() {
        if let Some(msg) = clusters_interleave(model, &late_fwd, &late_bwd) {
            fail = Some(msg);
        }
    }
    Ok(AuditReport {
        word: w.clone(),
        iterations,
        pass: fail.is_none(),
        failure: fail,
        forward_cluster: late_fwd.iter().map(|p| p.to_string()).collect(),
        backward_cluster: late_bwd.iter().map(|p| p.to_string()).collect(),
    })
}

fn clusters_interleave(
    model: &ModelConfig,
    fwd: &[VirtualPoint],
    bwd: &[VirtualPoint],
) -> Option<String> {
    // Distinctness of the clusters.
    for a in fwd {
        for b in bwd {
            if a == b {
                return Some(format!("clusters share the point {a}"));
            }
        }
    }
    // Sort all points circularly from bwd[0]; forward points must form a
    // contiguous block.
    let anchor = &bwd[0];
    let mut rest: Vec<(bool, &VirtualPoint)> = Vec::new();
    rest.extend(fwd.iter().map(|p| (true, p)));
    rest.extend(bwd.iter().skip(1).map(|p| (false, p)));
    rest.sort_by(|(_, a), (_, b)| {
        if a == b {
            return std::cmp::Ordering::Equal;
        }
        match model.compare(anchor, a, b) {
            1 => std::cmp::Ordering::Less,
            -1 => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Equal,
        }
    });
    let flags: Vec<bool> = rest.iter().map(|(is_fwd, _)| *is_fwd).collect();
    // contiguous block of `true` within flags (anchor is false, at the cut)
    let mut blocks = 0;
    let mut prev = false;
    for &f in &flags {
        if f && !prev {
            blocks += 1;
        }
        prev = f;
    }
    if blocks > 1 {
        Some("forward and backward clusters interleave".to_string())
    } else {
        None
    }
}

// ----------------------------------------------------------------------
// Proof-final containments of the linked partition, realized
// ----------------------------------------------------------------------

/// Checks, for one pair of positive addresses, the four containments
/// h^-1(I_q u I_qbar) in I_p minus closure(I_q u I_qbar) and companions,
/// at gap level and on sampled points.
pub fn linked_containments(
    model: &ModelConfig,
    lam_h: &Surd,
    lam_f: &Surd,
    samples_per_gap: usize,
) -> Result<Vec<CheckedFact>, ModelError> {
    if model.arrangement != Arrangement::Linked {
        return Err(ModelError::PreconditionViolated("containments are for the linked model".into()));
    }
    if lam_h.sign() <= 0 || lam_f.sign() <= 0 {
        return Err(ModelError::PreconditionViolated("addresses must be positive".into()));
    }
    let h = model.syllable_for_address(Structure::H, lam_h);
    let f = model.syllable_for_address(Structure::K, lam_f);
    let mut facts = Vec::new();
    let cases: Vec<(String, NormalWord, Structure, Side)> = vec![
        // h^-1 sends the H seed gaps into I_p (K left seed), h into I_pbar.
        ("h^-1(I_q u I_qbar) in I_p \\ closure(I_q u I_qbar)".into(), h.inverse(), Structure::K, Side::L),
        ("h(I_q u I_qbar) in I_pbar \\ closure(I_q u I_qbar)".into(), h.clone(), Structure::K, Side::R),
        ("f^-1(I_p u I_pbar) in I_q \\ closure(I_p u I_pbar)".into(), f.inverse(), Structure::H, Side::R),
        ("f(I_p u I_pbar) in I_qbar \\ closure(I_p u I_pbar)".into(), f.clone(), Structure::H, Side::L),
    ];
    for (name, w, target_st, target_side) in cases {
        let source_st = target_st.other();
        // gap-level: the image of each source seed gap is the gap at the
        // shifted address; its nest target must be the expected seed.
        let shift = model.syllable_address(w.first().unwrap());
        let mut holds = true;
        for side in [Side::R, Side::L] {
            let Some(gs) = model.gap_system(source_st, side) else { continue };
            for seed in &gs.seeds {
                let pos = &seed.chart_addr + &shift;
                let (nside, nseed) = model.nest(target_st, side, &pos);
                holds &= nside == target_side && nseed == 0;
            }
        }
        // sampled points: image lands in the target seed gap at offset 0 and
        // outside every gap of the source structure at offset 0.
        let mut samples: Vec<VirtualPoint> = Vec::new();
        for side in [Side::R, Side::L] {
            if model.gap_system(source_st, side).is_some() {
                samples.push(VirtualPoint::seed_mid(source_st, side, 0));
            }
        }
        for m in [Mark::P, Mark::Pbar, Mark::Q, Mark::Qbar] {
            if m.owner() != source_st {
                samples.push(VirtualPoint::mark(m));
            }
        }
        let extra: Vec<VirtualPoint> = model
            .sample_points(2)
            .into_iter()
            .filter(|x| matches!(model.loc(source_st, x), Loc::Side { coord: Coord::Gap { ref offset, .. }, .. } if offset.sign() == 0))
            .take(samples_per_gap)
            .collect();
        samples.extend(extra);
        for s in &samples {
            let img = model.act(&w, s);
            let in_target = matches!(
                model.loc(target_st, &img),
                Loc::Side { side, coord: Coord::Gap { seed: 0, ref offset } } if side == target_side && offset.sign() == 0
            );
            let outside_source_seeds = !matches!(
                model.loc(source_st, &img),
                Loc::Side { coord: Coord::Gap { ref offset, .. }, .. } if offset.sign() == 0
            );
            holds &= in_target && outside_source_seeds;
        }
        facts.push(CheckedFact { fact: name, holds });
    }
    Ok(facts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::NormalWord;

    fn sqrt2() -> Surd {
        Surd::sqrt_int(2)
    }

    fn group() -> TranslationGroup {
        TranslationGroup::new(Surd::from_int(1), sqrt2()).unwrap()
    }

    #[test]
    fn translation_group_membership() {
        let g = group();
        let lam = &Surd::from_int(3) + &(&sqrt2() * &Surd::from_int(-2));
        assert_eq!(g.decompose(&lam), Some((BigInt::from(3), BigInt::from(-2))));
        assert!(!g.contains(&Surd::from_ratio(1, 2)));
        assert!(!g.contains(&Surd::sqrt_int(3)));
        assert!(g.contains(&Surd::zero()));
    }

    #[test]
    fn density_requires_irrational_ratio() {
        let err = TranslationGroup::new(Surd::from_int(2), Surd::from_int(3)).unwrap_err();
        assert!(matches!(err, ModelError::NotDense(_)));
        assert!(TranslationGroup::new(Surd::from_int(1), sqrt2()).is_ok());
    }

    fn ratio(n: i64, d: i64) -> CirclePoint {
        CirclePoint::from_ratio(n, d)
    }
    fn arc(a: (i64, i64), b: (i64, i64)) -> Arc {
        Arc::new(ratio(a.0, a.1), ratio(b.0, b.1)).unwrap()
    }

    pub(crate) fn flagship_linked() -> ModelConfig {
        build_linked_model(
            group(),
            group(),
            LinkedSeeds {
                p: ratio(0, 1),
                q: ratio(1, 4),
                pbar: ratio(1, 2),
                qbar: ratio(3, 4),
                i_p: arc((7, 8), (1, 8)),
                i_q: arc((1, 8), (3, 8)),
                i_pbar: arc((3, 8), (5, 8)),
                i_qbar: arc((5, 8), (7, 8)),
            },
        )
        .unwrap()
    }

    fn h_word(n1: i64, n2: i64) -> NormalWord {
        NormalWord::single(0, vec![n1, n2])
    }
    fn f_word(n1: i64, n2: i64) -> NormalWord {
        NormalWord::single(1, vec![n1, n2])
    }

    #[test]
    fn linked_model_builds_and_rejects() {
        let m = flagship_linked();
        assert_eq!(m.arrangement, Arrangement::Linked);
        assert!(m.base_order_table.iter().all(|f| f.holds));
        // rational ratio: not dense
        let err = TranslationGroup::new(Surd::from_int(2), Surd::from_int(3)).unwrap_err();
        assert!(matches!(err, ModelError::NotDense(_)));
        // seeds violating the chain: shrink I_q so coverage fails
        let err = build_linked_model(
            group(),
            group(),
            LinkedSeeds {
                p: ratio(0, 1),
                q: ratio(1, 4),
                pbar: ratio(1, 2),
                qbar: ratio(3, 4),
                i_p: arc((7, 8), (1, 8)),
                i_q: arc((3, 16), (5, 16)),
                i_pbar: arc((3, 8), (5, 8)),
                i_qbar: arc((5, 8), (7, 8)),
            },
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::SeedChainViolation(_)));
    }

    #[test]
    fn marks_arrangement_order() {
        let m = flagship_linked();
        let p = VirtualPoint::mark(Mark::P);
        let q = VirtualPoint::mark(Mark::Q);
        let pbar = VirtualPoint::mark(Mark::Pbar);
        let qbar = VirtualPoint::mark(Mark::Qbar);
        assert_eq!(m.compare(&p, &q, &pbar), 1);
        assert_eq!(m.compare(&q, &pbar, &qbar), 1);
        assert_eq!(m.compare(&p, &pbar, &q), -1);
        assert_eq!(m.compare(&p, &p, &q), 0);
    }

    #[test]
    fn spec_base_order_examples() {
        let m = flagship_linked();
        // (h.Q, Pbar, f.Pbar) with positive addresses: h(q) < pbar < f(pbar)
        let hq = m.act(&h_word(1, 0), &VirtualPoint::mark(Mark::Q));
        let pbar = VirtualPoint::mark(Mark::Pbar);
        let fpbar = m.act(&f_word(1, 0), &VirtualPoint::mark(Mark::Pbar));
        assert_eq!(m.compare(&hq, &pbar, &fpbar), 1);
        // (h.Q, h'.Q, Pbar) with 0 < lam_h < lam_h'
        let hq2 = m.act(&h_word(0, 1), &VirtualPoint::mark(Mark::Q)); // sqrt2 > 1
        assert_eq!(m.compare(&hq, &hq2, &pbar), 1);
    }

    #[test]
    fn act_is_group_action() {
        let m = flagship_linked();
        let words = [h_word(1, 0), f_word(-1, 1), h_word(0, -2), f_word(3, 0)];
        let pts = m.sample_points(2);
        for u in &words {
            for v in &words {
                let uv = u.multiply(v);
                for x in pts.iter().take(12) {
                    assert_eq!(m.act(&uv, x), m.act(u, &m.act(v, x)));
                }
            }
        }
        // stabilizer absorption
        let p = VirtualPoint::mark(Mark::P);
        assert_eq!(m.act(&h_word(2, 1), &p), p);
        let gq = VirtualPoint::seed_mid(Structure::H, Side::R, 0);
        let shifted = m.act(&h_word(1, 0), &gq);
        assert!(shifted.word.is_identity());
        assert_eq!(shifted.addr, Surd::from_int(1));
    }

    #[test]
    fn act_absorbs_stabilizer_syllables() {
        let m = flagship_linked();
        let gq = VirtualPoint::seed_mid(Structure::H, Side::R, 0);
        // f.h applied to the H-owned midpoint: the trailing h shifts the
        // address, leaving a single K-syllable on the shifted base.
        let w = f_word(1, 0).multiply(&h_word(0, 1));
        let moved = m.act(&w, &gq);
        assert_eq!(moved.word.syllables().len(), 1);
        assert_eq!(moved.word.first().unwrap().factor, 1);
        assert_eq!(moved.addr, Surd::sqrt_int(2));
        // undoing the K-syllable exposes the shifted midpoint
        let back = m.act(&f_word(-1, 0), &moved);
        assert!(back.word.is_identity());
        assert_eq!(back.addr, Surd::sqrt_int(2));
    }

    #[test]
    fn realized_geometric_chain_samples() {
        let m = flagship_linked();
        for (a, b) in [(1i64, 0i64), (0, 1), (2, -1), (1, 1), (3, -2)] {
            let lam_h = m.lambda_h.address(&[a, b]);
            if lam_h.sign() <= 0 {
                continue;
            }
            for (c, d) in [(1i64, 0i64), (0, 1), (2, -1)] {
                let lam_f = m.lambda_k.address(&[c, d]);
                if lam_f.sign() <= 0 {
                    continue;
                }
                let facts = m.realized_chain(&lam_h, &lam_f).unwrap();
                assert!(facts.iter().all(|f| f.holds));
            }
        }
    }

    #[test]
    fn compare_is_circular_order() {
        let m = flagship_linked();
        let pts = m.sample_points(2);
        let n = pts.len().min(14);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let (x, y, z) = (&pts[i], &pts[j], &pts[k]);
                    let c = m.compare(x, y, z);
                    assert_eq!(c, -m.compare(y, x, z), "alternating {x} {y} {z}");
                    assert_eq!(c, m.compare(y, z, x), "cyclic {x} {y} {z}");
                    if x != y && y != z && x != z {
                        assert_ne!(c, 0, "total on distinct {x} {y} {z}");
                    }
                }
            }
        }
    }

    #[test]
    fn action_preserves_compare() {
        let m = flagship_linked();
        let pts = m.sample_points(2);
        let words = [
            h_word(1, 0),
            f_word(1, 0),
            h_word(-1, 1),
            f_word(2, -1).multiply(&h_word(1, 1)),
            NormalWord::commutator(&f_word(1, 0), &h_word(1, 0)),
        ];
        let take = pts.len().min(9);
        for w in &words {
            for i in 0..take {
                for j in 0..take {
                    for k in 0..take {
                        let c1 = m.compare(&pts[i], &pts[j], &pts[k]);
                        let c2 = m.compare(
                            &m.act(w, &pts[i]),
                            &m.act(w, &pts[j]),
                            &m.act(w, &pts[k]),
                        );
                        assert_eq!(c1, c2, "w={w} on ({},{},{})", pts[i], pts[j], pts[k]);
                    }
                }
            }
        }
    }

    #[test]
    fn gaps_and_core_view() {
        let m = flagship_linked();
        let view = m.gaps_and_core(Mark::P, Side::R).unwrap();
        assert_eq!(view.system.seeds.len(), 1);
        let gq = VirtualPoint::seed_mid(Structure::H, Side::R, 0);
        // G_q is in a gap of p but in Core(q): the cores differ
        assert!(view.gap_containing(&gq).is_some());
        assert!(!view.in_core(&gq));
        let qview = m.gaps_and_core(Mark::Q, Side::R).unwrap();
        assert!(qview.in_core(&gq));
        assert!(qview.gap_containing(&VirtualPoint::mark(Mark::P)).is_some());
    }

    #[test]
    fn gap_and_core_predicates() {
        let m = flagship_linked();
        let gq = VirtualPoint::seed_mid(Structure::H, Side::R, 0);
        // G_q is in a gap of p and in Core(q)
        assert!(m.gap_of(Structure::H, &gq).is_some());
        assert!(m.in_core(Structure::K, &gq));
        // P is in Core(p) and inside the gap I_p of q
        let p = VirtualPoint::mark(Mark::P);
        assert!(m.in_core(Structure::H, &p));
        let (side, seed, off) = m.gap_of(Structure::K, &p).unwrap();
        assert_eq!((side, seed), (Side::L, 0));
        assert_eq!(off.sign(), 0);
        // images of G_q under the stabilizer stay in gaps of p, with shifted address
        let moved = m.act(&h_word(2, -1), &gq);
        let (_, _, off) = m.gap_of(Structure::H, &moved).unwrap();
        assert_eq!(off, m.lambda_h.address(&[2, -1]));
        // distinct cores: G_q witnesses Core(q) != Core(p)
        assert!(!m.in_core(Structure::H, &gq));
    }

    #[test]
    fn north_south_audit_translation() {
        let m = flagship_linked();
        let samples = m.base_points();
        let rep = north_south_audit(&m, &h_word(1, 0), &samples, 32).unwrap();
        assert!(rep.pass, "{:?}", rep.failure);
        // forward cluster near pbar: every late forward point compares after q
        let q = VirtualPoint::mark(Mark::Q);
        let p = VirtualPoint::mark(Mark::P);
        assert!(!rep.forward_cluster.is_empty());
        // identity word is rejected
        assert!(north_south_audit(&m, &NormalWord::identity(), &samples, 8).is_err());
        let _ = (q, p);
    }

    #[test]
    fn north_south_audit_mixed_word() {
        let m = flagship_linked();
        let samples = m.base_points();
        let w = f_word(1, 0).multiply(&h_word(1, 0));
        let rep = north_south_audit(&m, &w, &samples, 16).unwrap();
        assert!(rep.pass, "{:?}", rep.failure);
        // the attractor region: forward late points sit in U_q side per ping-pong
        let com = NormalWord::commutator(&f_word(1, 0), &h_word(1, 0));
        let rep2 = north_south_audit(&m, &com, &samples, 12).unwrap();
        assert!(rep2.pass, "{:?}", rep2.failure);
    }

    #[test]
    fn linked_containments_hold() {
        let m = flagship_linked();
        for (a, b) in [(1i64, 0i64), (0, 1), (2, -1)] {
            let lam_h = m.lambda_h.address(&[a, b]);
            let lam_f = m.lambda_k.address(&[a, b]);
            if lam_h.sign() <= 0 {
                continue;
            }
            let facts = linked_containments(&m, &lam_h, &lam_f, 8).unwrap();
            assert!(facts.iter().all(|f| f.holds), "{facts:?}");
        }
    }

    pub(crate) fn geometric_unlinked() -> ModelConfig {
        // p = 3/4, qbar = 1/8, q = 1/4, pbar = 11/16 (arrangement p < qbar < q < pbar)
        build_unlinked_geometric_model(
            group(),
            group(),
            UnlinkedGeometricSeeds {
                p: ratio(3, 4),
                qbar: ratio(1, 8),
                q: ratio(1, 4),
                pbar: ratio(11, 16),
                r_p: arc((7, 8), (5, 8)),
                r_q: arc((1, 2), (1, 16)),
            },
        )
        .unwrap()
    }

    #[test]
    fn unlinked_geometric_model_works() {
        let m = geometric_unlinked();
        assert!(!m.unverified_configuration);
        // marks in the right cyclic order
        let p = VirtualPoint::mark(Mark::P);
        let qbar = VirtualPoint::mark(Mark::Qbar);
        let q = VirtualPoint::mark(Mark::Q);
        let pbar = VirtualPoint::mark(Mark::Pbar);
        assert_eq!(m.compare(&p, &qbar, &q), 1);
        assert_eq!(m.compare(&qbar, &q, &pbar), 1);
        // ping-pong membership: K-words send U_p into U_q territory
        let up_sample = VirtualPoint::seed_mid(Structure::K, Side::R, 0);
        assert!(m.in_u_side(Structure::H, &up_sample));
        let img = m.act(&f_word(1, 0), &up_sample);
        assert!(m.in_u_side(Structure::K, &img));
        let img2 = m.act(&f_word(-2, 1), &p);
        assert!(m.in_u_side(Structure::K, &img2));
        // order axioms on samples
        let pts = m.sample_points(2);
        let take = pts.len().min(10);
        for i in 0..take {
            for j in 0..take {
                for k in 0..take {
                    let c = m.compare(&pts[i], &pts[j], &pts[k]);
                    assert_eq!(c, m.compare(&pts[j], &pts[k], &pts[i]));
                    if pts[i] != pts[j] && pts[j] != pts[k] && pts[i] != pts[k] {
                        assert_ne!(c, 0);
                    }
                }
            }
        }
    }

    pub(crate) fn parallel_unlinked() -> ModelConfig {
        build_unlinked_parallel_model(
            group(),
            group(),
            UnlinkedParallelSeeds {
                p: ratio(0, 1),
                qbar: ratio(1, 4),
                q: ratio(1, 2),
                pbar: ratio(3, 4),
                i1: arc((1, 8), (3, 8)),
                i2: arc((5, 16), (7, 16)),
                i3: arc((13, 32), (5, 8)),
                i4: arc((9, 16), (3, 16)),
                coset_offset: Surd::from_ratio(1, 2),
            },
        )
        .unwrap()
    }

    #[test]
    fn unlinked_parallel_model_works() {
        let m = parallel_unlinked();
        assert!(m.unverified_configuration);
        // chain violation example: v_4 = 5/16 > qbar
        let err = build_unlinked_parallel_model(
            group(),
            group(),
            UnlinkedParallelSeeds {
                p: ratio(0, 1),
                qbar: ratio(1, 4),
                q: ratio(1, 2),
                pbar: ratio(3, 4),
                i1: arc((1, 8), (3, 8)),
                i2: arc((5, 16), (7, 16)),
                i3: arc((13, 32), (5, 8)),
                i4: arc((9, 16), (5, 16)),
                coset_offset: Surd::from_ratio(1, 2),
            },
        )
        .unwrap_err();
        assert!(matches!(err, ModelError::SeedChainViolation(_)));
        // ping-pong: images of the U_p gaps land in U_q and conversely
        let i2mid = VirtualPoint::seed_mid(Structure::K, Side::L, 0);
        let i4mid = VirtualPoint::seed_mid(Structure::K, Side::R, 0);
        for w in [f_word(1, 0), f_word(-1, 0), f_word(0, 1), f_word(1, -1)] {
            for s in [&i2mid, &i4mid] {
                let img = m.act(&w, s);
                assert!(m.in_u_side(Structure::K, &img), "w={w} s={s}");
            }
        }
        let i1mid = VirtualPoint::seed_mid(Structure::H, Side::R, 0);
        let i3mid = VirtualPoint::seed_mid(Structure::H, Side::R, 1);
        for w in [h_word(1, 0), h_word(-1, 0), h_word(0, 1), h_word(-1, 1)] {
            for s in [&i1mid, &i3mid] {
                let img = m.act(&w, s);
                assert!(m.in_u_side(Structure::H, &img), "w={w} s={s}");
            }
        }
        // order totality on samples
        let pts = m.sample_points(2);
        let take = pts.len().min(10);
        for i in 0..take {
            for j in 0..take {
                if pts[i] != pts[j] {
                    assert_ne!(m.cmp_points(&pts[i], &pts[j]), std::cmp::Ordering::Equal);
                }
            }
        }
    }

    #[test]
    fn no_short_word_acts_trivially() {
        let m = flagship_linked();
        let p = VirtualPoint::mark(Mark::P);
        let q = VirtualPoint::mark(Mark::Q);
        for w in crate::words::ball(&m.factors, 3) {
            assert!(
                m.act(&w, &p) != p || m.act(&w, &q) != q,
                "word {w} acts trivially on the marks"
            );
        }
    }
}
