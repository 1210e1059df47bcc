//! Property suites: circular-order axioms, arc-set semantics and other
//! laws checked pointwise, Moebius dynamics, word-engine group laws,
//! and the realization's order-automorphism property.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pingpong_core::circle::{circular_order, Arc, ArcSet, CirclePoint};
use pingpong_core::classify::{classify_pair, sample_pair, RowHint};
use pingpong_core::model::{
    build_linked_model, north_south_audit, LinkedSeeds, Mark, Structure, TranslationGroup,
    VirtualPoint,
};
use pingpong_core::moebius::{MapClass, MoebiusMap};
use pingpong_core::surd::{interval_sign_oracle, Surd};
use pingpong_core::words::{ball, FactorSpec, NormalWord, Syllable};

fn rational_point() -> impl Strategy<Value = CirclePoint> {
    (any::<i32>(), 1i32..1000).prop_map(|(n, d)| CirclePoint::from_ratio(n as i64, d as i64))
}

fn circle_point() -> impl Strategy<Value = CirclePoint> {
    prop_oneof![
        8 => rational_point(),
        1 => Just(CirclePoint::Infinity),
        3 => (any::<i16>(), 1i16..50, -20i16..20, 1i16..20, 2u8..30).prop_map(|(a, ad, b, bd, d)| {
            CirclePoint::Finite(Surd::new(
                BigRational::new(BigInt::from(a), BigInt::from(ad)),
                BigRational::new(BigInt::from(b), BigInt::from(bd)),
                BigUint::from(d),
            ))
        }),
    ]
}

proptest! {
    #[test]
    fn circular_order_axioms(x in circle_point(), y in circle_point(), z in circle_point()) {
        let c = circular_order(&x, &y, &z);
        prop_assert_eq!(c, -circular_order(&y, &x, &z));
        prop_assert_eq!(c, circular_order(&y, &z, &x));
        if x != y && y != z && x != z {
            prop_assert_ne!(c, 0);
        } else {
            prop_assert_eq!(c, 0);
        }
    }

    #[test]
    fn circular_order_transitive(w in circle_point(), x in circle_point(), y in circle_point(), z in circle_point()) {
        // if c(w,x,y) = 1 and c(w,y,z) = 1 then c(w,x,z) = 1
        if circular_order(&w, &x, &y) == 1 && circular_order(&w, &y, &z) == 1 {
            prop_assert_eq!(circular_order(&w, &x, &z), 1);
        }
    }
}

/// Generates a canonical arc set by sorting distinct points and pairing.
fn arcset_from_cuts(cuts: Vec<CirclePoint>) -> Option<ArcSet> {
    let mut distinct: Vec<CirclePoint> = Vec::new();
    for c in cuts {
        if !distinct.contains(&c) {
            distinct.push(c);
        }
    }
    if distinct.len() < 2 {
        return None;
    }
    distinct.sort_by(|a, b| a.cut_key_cmp(b));
    if distinct.len() % 2 == 1 {
        distinct.pop();
    }
    let arcs: Vec<Arc> = distinct
        .chunks(2)
        .map(|c| Arc::new(c[0].clone(), c[1].clone()).unwrap())
        .collect();
    ArcSet::normalize(arcs).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]
    #[test]
    fn arcset_pointwise_semantics(
        cuts_a in prop::collection::vec(rational_point(), 2..8),
        cuts_b in prop::collection::vec(rational_point(), 2..8),
        probes in prop::collection::vec(circle_point(), 8),
    ) {
        let (Some(a), Some(b)) = (arcset_from_cuts(cuts_a), arcset_from_cuts(cuts_b)) else {
            return Ok(());
        };
        let diff = a.subtract_closure(&b);
        for p in &probes {
            let expected = a.contains(p) && !b.closure_contains(p);
            prop_assert_eq!(diff.contains(p), expected, "subtract_closure at {:?}", p);
        }
        // subtract_closure result is disjoint from b and from b's endpoints
        for arc in diff.arcs() {
            prop_assert!(!b.closure_contains(&arc.sample_point()) || !arc.contains(&arc.sample_point()));
        }
        for arc in b.arcs() {
            prop_assert!(!diff.contains(&arc.lo));
            prop_assert!(!diff.contains(&arc.hi));
        }
        // subset consistency via membership
        if a.subset(&b) {
            for p in &probes {
                if a.contains(p) {
                    prop_assert!(b.contains(p));
                }
            }
        }
    }

    #[test]
    fn arcset_subset_antisymmetry(cuts in prop::collection::vec(rational_point(), 2..8)) {
        let Some(a) = arcset_from_cuts(cuts) else { return Ok(()) };
        let b = a.clone();
        prop_assert!(a.subset(&b) && b.subset(&a));
        prop_assert_eq!(a, b);
    }
}

fn random_map(rng: &mut ChaCha8Rng) -> MoebiusMap {
    loop {
        let e: Vec<i64> = (0..4).map(|_| rng.gen_range(-9..=9)).collect();
        if let Ok(m) = MoebiusMap::new(e[0], e[1], e[2], e[3]) {
            return m;
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng) -> CirclePoint {
    if rng.gen_range(0..12) == 0 {
        CirclePoint::Infinity
    } else {
        CirclePoint::from_ratio(rng.gen_range(-50..=50), rng.gen_range(1..=20))
    }
}

#[test]
fn apply_preserves_circular_order_10k() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10_000 {
        let g = random_map(&mut rng);
        let x = random_point(&mut rng);
        let y = random_point(&mut rng);
        let z = random_point(&mut rng);
        let c = circular_order(&x, &y, &z);
        let c2 = circular_order(&g.apply(&x), &g.apply(&y), &g.apply(&z));
        assert_eq!(c, c2, "{g:?} broke orientation on ({x:?},{y:?},{z:?})");
    }
}

#[test]
fn hyperbolic_north_south_convergence() {
    // g^n(x) converges circularly to a(g), checked with exact interval
    // nesting at n = 64 on seeded random (g, x).
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut done = 0;
    while done < 1_000 {
        let g = random_map(&mut rng);
        if g.classify() != MapClass::Hyperbolic {
            continue;
        }
        let fp = g.fixed_pair().unwrap();
        let x = random_point(&mut rng);
        if x == fp.attracting || x == fp.repelling {
            continue;
        }
        done += 1;
        let mut cur = x.clone();
        let mut prev: Option<CirclePoint> = None;
        for step in 0..64 {
            let next = g.apply(&cur);
            if let Some(p) = &prev {
                // after burn-in, the orbit nests: next lies strictly between
                // cur and a(g) inside the arc from prev to a(g)
                if step > 32 {
                    assert_eq!(
                        circular_order(p, &cur, &fp.attracting).abs(),
                        1,
                        "orbit hit the attractor exactly"
                    );
                    let side = circular_order(p, &cur, &fp.attracting);
                    assert_eq!(circular_order(&cur, &next, &fp.attracting), side, "nesting broke");
                }
            }
            prev = Some(cur);
            cur = next;
        }
        // backward orbit heads to the repelling point: one step sanity
        let back = g.inverse().apply(&x);
        if back != x {
            assert_ne!(circular_order(&back, &x, &fp.repelling), 0);
        }
    }
}

#[test]
fn surd_sign_interval_cross_check_10k() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10_000 {
        let a = BigRational::new(BigInt::from(rng.gen_range(-999i64..=999)), BigInt::from(rng.gen_range(1i64..=99)));
        let b = BigRational::new(BigInt::from(rng.gen_range(-999i64..=999)), BigInt::from(rng.gen_range(1i64..=99)));
        let d = BigUint::from(rng.gen_range(0u64..=200));
        let s = Surd::new(a.clone(), b.clone(), d.clone());
        // the oracle evaluates the raw representation, before normalization
        assert_eq!(s.sign(), interval_sign_oracle(&a, &b, &d), "a={a} b={b} d={d}");
    }
}

#[test]
fn shared_point_dichotomy_on_census_samples() {
    // hyperbolic non-commuting pairs without a shared fixed point have
    // pairwise disjoint 4-point fixed sets
    for i in 0..200 {
        let (f, g) = sample_pair(99, i);
        let pf = f.fixed_pair().unwrap();
        let pg = g.fixed_pair().unwrap();
        let pts = [&pf.attracting, &pf.repelling, &pg.attracting, &pg.repelling];
        for a in 0..4 {
            for b in (a + 1)..4 {
                assert_ne!(pts[a], pts[b]);
            }
        }
    }
}

#[test]
fn census_linked_pairs_give_two_row1_classes() {
    // restricted to linked fixed pairs, the census sees only the two
    // attracting-adjacent classes
    let mut words = std::collections::BTreeSet::new();
    for i in 0..600 {
        let (f, g) = sample_pair(4242, i);
        let pf = f.fixed_pair().unwrap();
        let pg = g.fixed_pair().unwrap();
        let linked = pingpong_core::circle::linked(
            (&pf.attracting, &pf.repelling),
            (&pg.attracting, &pg.repelling),
        )
        .unwrap();
        if !linked {
            continue;
        }
        let pc = classify_pair(&f, &g).unwrap();
        assert_eq!(pc.row_hint, RowHint::Row1);
        assert_eq!(pc.row1_containments, Some(true));
        if pc.word.coincidence_free() {
            words.insert(pc.word.to_string());
        }
    }
    assert!(words.len() <= 2, "linked census classes: {words:?}");
    assert!(!words.is_empty());
}

// ----------------------------------------------------------------------
// Word engine laws
// ----------------------------------------------------------------------

fn word_strategy() -> impl Strategy<Value = NormalWord> {
    prop::collection::vec((0usize..2, -3i64..=3, -3i64..=3), 0..6).prop_map(|sylls| {
        NormalWord::from_syllables(
            sylls
                .into_iter()
                .map(|(f, a, b)| Syllable { factor: f, exponents: vec![a, b] })
                .collect(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1024))]
    #[test]
    fn word_multiply_associative(u in word_strategy(), v in word_strategy(), w in word_strategy()) {
        prop_assert_eq!(u.multiply(&v).multiply(&w), u.multiply(&v.multiply(&w)));
    }

    #[test]
    fn word_inverse_law(u in word_strategy()) {
        prop_assert!(u.inverse().multiply(&u).is_identity());
        prop_assert!(u.multiply(&u.inverse()).is_identity());
        prop_assert_eq!(u.multiply(&NormalWord::identity()), u);
    }
}

#[test]
fn evaluate_is_homomorphism_randomized() {
    let factors = vec![FactorSpec::new("H", &["h1", "h2"]), FactorSpec::new("K", &["f1", "f2"])];
    // commuting generators within each factor: powers of a common map
    let h = MoebiusMap::new(2, 0, 0, 1).unwrap();
    let f = MoebiusMap::new(3, 1, 2, 1).unwrap();
    let assignment: pingpong_core::words::Assignment = [
        ("h1".to_string(), h.clone()),
        ("h2".to_string(), h.pow(2)),
        ("f1".to_string(), f.clone()),
        ("f2".to_string(), f.pow(3)),
    ]
    .into_iter()
    .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rand_word = |rng: &mut ChaCha8Rng| -> NormalWord {
        let n = rng.gen_range(0..5);
        NormalWord::from_syllables(
            (0..n)
                .map(|_| Syllable {
                    factor: rng.gen_range(0..2),
                    exponents: vec![rng.gen_range(-2..=2), rng.gen_range(-2..=2)],
                })
                .collect(),
        )
    };
    for _ in 0..1000 {
        let u = rand_word(&mut rng);
        let v = rand_word(&mut rng);
        let lhs = pingpong_core::words::evaluate(&u.multiply(&v), &factors, &assignment).unwrap();
        let rhs = pingpong_core::words::evaluate(&u, &factors, &assignment)
            .unwrap()
            .compose(&pingpong_core::words::evaluate(&v, &factors, &assignment).unwrap());
        assert_eq!(lhs, rhs);
    }
}

// ----------------------------------------------------------------------
// Realization: order automorphism and audit invariants
// ----------------------------------------------------------------------

fn flagship_model() -> pingpong_core::model::ModelConfig {
    let group = || TranslationGroup::new(Surd::from_int(1), Surd::sqrt_int(2)).unwrap();
    build_linked_model(
        group(),
        group(),
        LinkedSeeds {
            p: CirclePoint::from_ratio(0, 1),
            q: CirclePoint::from_ratio(1, 4),
            pbar: CirclePoint::from_ratio(1, 2),
            qbar: CirclePoint::from_ratio(3, 4),
            i_p: Arc::new(CirclePoint::from_ratio(7, 8), CirclePoint::from_ratio(1, 8)).unwrap(),
            i_q: Arc::new(CirclePoint::from_ratio(1, 8), CirclePoint::from_ratio(3, 8)).unwrap(),
            i_pbar: Arc::new(CirclePoint::from_ratio(3, 8), CirclePoint::from_ratio(5, 8)).unwrap(),
            i_qbar: Arc::new(CirclePoint::from_ratio(5, 8), CirclePoint::from_ratio(7, 8)).unwrap(),
        },
    )
    .unwrap()
}

#[test]
fn model_compare_transitive_on_random_words() {
    let model = flagship_model();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let bases = model.base_points();
    let rand_point = |rng: &mut ChaCha8Rng| -> VirtualPoint {
        let n = rng.gen_range(0..=3);
        let w = NormalWord::from_syllables(
            (0..n)
                .map(|_| Syllable {
                    factor: rng.gen_range(0..2),
                    exponents: vec![rng.gen_range(-2..=2), rng.gen_range(-2..=2)],
                })
                .collect(),
        );
        model.act(&w, &bases[rng.gen_range(0..bases.len())])
    };
    for _ in 0..1000 {
        let w = rand_point(&mut rng);
        let x = rand_point(&mut rng);
        let y = rand_point(&mut rng);
        let z = rand_point(&mut rng);
        // circular transitivity
        if model.compare(&w, &x, &y) == 1 && model.compare(&w, &y, &z) == 1 {
            assert_eq!(model.compare(&w, &x, &z), 1);
        }
        // alternation + rotation
        assert_eq!(model.compare(&x, &y, &z), -model.compare(&y, &x, &z));
        assert_eq!(model.compare(&x, &y, &z), model.compare(&y, &z, &x));
    }
}

#[test]
fn model_action_is_order_automorphism_randomized() {
    let model = flagship_model();
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let bases = model.base_points();
    let pts: Vec<_> = {
        let mut v = bases.clone();
        v.extend(model.sample_points(2));
        v
    };
    for _ in 0..12 {
        let n = rng.gen_range(1..=4);
        let w = NormalWord::from_syllables(
            (0..n)
                .map(|_| Syllable {
                    factor: rng.gen_range(0..2),
                    exponents: vec![rng.gen_range(-2..=2), rng.gen_range(-2..=2)],
                })
                .collect(),
        );
        for _ in 0..1000 {
            let pick = |rng: &mut ChaCha8Rng| pts[rng.gen_range(0..pts.len())].clone();
            let (x, y, z) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
            let c1 = model.compare(&x, &y, &z);
            let c2 = model.compare(&model.act(&w, &x), &model.act(&w, &y), &model.act(&w, &z));
            assert_eq!(c1, c2, "w = {w}");
        }
    }
}

#[test]
fn model_address_equivariance() {
    let model = flagship_model();
    let gq = VirtualPoint::seed_mid(Structure::H, pingpong_core::model::Side::R, 0);
    for (n1, n2) in [(1i64, 0i64), (0, 1), (-2, 3), (5, -1)] {
        let w = NormalWord::single(0, vec![n1, n2]);
        let moved = model.act(&w, &gq);
        let (_, _, off) = model.gap_of(Structure::H, &moved).unwrap();
        assert_eq!(off, model.lambda_h.address(&[n1, n2]));
    }
}

#[test]
fn model_audit_passes_for_generators_and_ball2() {
    let model = flagship_model();
    let samples = model.base_points();
    for w in ball(&model.factors, 2) {
        let rep = north_south_audit(&model, &w, &samples, 12).unwrap();
        assert!(rep.pass, "audit failed for {w}: {:?}", rep.failure);
    }
}

#[test]
fn marks_suffice_to_detect_nontrivial_words() {
    let model = flagship_model();
    let p = VirtualPoint::mark(Mark::P);
    let q = VirtualPoint::mark(Mark::Q);
    for w in ball(&model.factors, 4) {
        assert!(model.act(&w, &p) != p || model.act(&w, &q) != q, "{w}");
    }
}
