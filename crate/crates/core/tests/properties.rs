//! Property tests: evaluation determinism, shift composition, parser round
//! trips, engine soundness against the certificate checker, gap-pair
//! algebra, and oracle minimality cross-checked by an independent
//! enumeration order.

use proptest::prelude::*;

use dickson_core::dsl::{parse_multifunction, parse_sequence};
use dickson_core::engine::{self, GoodSet};
use dickson_core::oracle;
use dickson_core::sequence::{EngineConfig, EvalCtx, Nat, Sequence, nat};
use dickson_core::unprovability;

fn cfg() -> EngineConfig {
    EngineConfig::default()
}

fn join(vals: &[u64]) -> String {
    vals.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Small deterministic generator, independent of any crate randomness.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0 >> 33
    }
}

fn seq_dsl() -> impl Strategy<Value = String> {
    let vals = prop::collection::vec(0u64..=6, 1..=8);
    prop_oneof![
        (0u64..=6).prop_map(|c| format!("const({c})")),
        prop::collection::vec(0u64..=6, 1..=8).prop_map(|v| format!("periodic({})", join(&v))),
        (vals.clone(), 0u64..=6).prop_map(|(v, c)| format!("prefix({});const({c})", join(&v))),
        (vals, prop::collection::vec(0u64..=6, 1..=4)).prop_map(|(v, p)| format!(
            "prefix({});periodic({})",
            join(&v),
            join(&p)
        )),
        (0u64..=6).prop_map(|n| format!("dec({n})")),
        (1u64..=6).prop_map(|n| format!("cex({n})")),
    ]
}

/// Nested descriptions exercise sum and shift composition in the parser.
fn nested_seq_dsl() -> impl Strategy<Value = String> {
    seq_dsl().prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("sum({a},{b})")),
            (inner, 0u64..=5).prop_map(|(s, d)| format!("shift({s},{d})")),
        ]
    })
}

#[test]
fn evaluation_is_deterministic_over_a_thousand_probes() {
    let texts = [
        "const(3)",
        "affine(2,1)",
        "prefix(3,1,4,1,5);periodic(2,6)",
        "dec(9)",
        "cex(7)",
        "sum(dec(4),shift(periodic(0,1,2),3))",
    ];
    let mut sequences: Vec<Sequence> = texts.iter().map(|t| parse_sequence(t).unwrap()).collect();
    sequences.push(Sequence::from_fn("square", |n: &Nat| Ok(n * n)));

    for s in &sequences {
        let mut rng = Lcg(0x5eed);
        let probes: Vec<Nat> = (0..1000).map(|_| nat(rng.next() % 10_000)).collect();
        let ctx1 = EvalCtx::new(&cfg());
        let first: Vec<Nat> = probes.iter().map(|n| s.eval(n, &ctx1).unwrap()).collect();
        let ctx2 = EvalCtx::new(&cfg());
        let second: Vec<Nat> = probes.iter().map(|n| s.eval(n, &ctx2).unwrap()).collect();
        assert_eq!(first, second, "for {s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shifts_compose_additively(text in seq_dsl(), a in 0u64..=50, b in 0u64..=50, n in 0u64..=100) {
        let s = parse_sequence(&text).unwrap();
        let ctx = EvalCtx::new(&cfg());
        let twice = s.shifted(nat(a)).shifted(nat(b));
        let once = s.shifted(nat(a + b));
        prop_assert_eq!(
            twice.eval(&nat(n), &ctx).unwrap(),
            once.eval(&nat(n), &ctx).unwrap()
        );
    }

    #[test]
    fn print_parse_round_trip(text in nested_seq_dsl()) {
        let s = parse_sequence(&text).unwrap();
        let reparsed = parse_sequence(&s.to_string()).unwrap();
        let ctx = EvalCtx::new(&cfg());
        for n in 0..40u64 {
            prop_assert_eq!(
                s.eval(&nat(n), &ctx).unwrap(),
                reparsed.eval(&nat(n), &ctx).unwrap()
            );
        }
    }

    #[test]
    fn engine_output_survives_its_own_checker(
        texts in prop::collection::vec(seq_dsl(), 1..=3),
        l in 2u64..=4,
    ) {
        let seqs: Vec<Sequence> = texts.iter().map(|t| parse_sequence(t).unwrap()).collect();
        let cfg = EngineConfig::with_budget(20_000);
        match engine::dl_k_l(&seqs, l, &cfg) {
            Ok(w) => {
                let verdict = engine::check_certificate(&seqs, &w.good, &w.cert, &cfg);
                prop_assert!(verdict.pass, "violations: {:?}", verdict.violations);

                // serialization is canonical: parse and re-serialize is the
                // identity on bytes, and the parsed witness still checks
                let doc = w.to_value(None).to_canonical_string();
                let parsed = dickson_core::canon::parse(&doc).unwrap();
                prop_assert_eq!(&parsed.to_canonical_string(), &doc);
                let back = engine::Witness::from_value(&parsed).unwrap();
                prop_assert_eq!(&back.good.indices, &w.good.indices);
                let verdict = engine::check_certificate(&seqs, &back.good, &back.cert, &cfg);
                prop_assert!(verdict.pass, "after round trip: {:?}", verdict.violations);
            }
            Err(e) if e.is_exhaustion() => {}
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {e}"))),
        }
    }

    #[test]
    fn gap_pairs_sit_at_distance_exactly_n(text in seq_dsl(), n in 1u64..=6) {
        let a = parse_sequence(&text).unwrap();
        if let Ok(g) = engine::gap_pair(&a, &nat(n), &EngineConfig::with_budget(50_000)) {
            prop_assert_eq!(g.mate(), &g.index + nat(n));
            prop_assert!(g.index <= g.bound);
            let ctx = EvalCtx::new(&cfg());
            let vi = a.eval(&g.index, &ctx).unwrap();
            let vn = a.eval(&g.mate(), &ctx).unwrap();
            prop_assert!(vi <= vn);
        }
    }

    #[test]
    fn window_sums_step_like_the_underlying_gap(
        text in seq_dsl(),
        n in 1u64..=6,
        i in 0u64..=20,
    ) {
        let a = parse_sequence(&text).unwrap();
        let beta = a.window_sum(nat(n));
        let ctx = EvalCtx::new(&cfg());
        let lhs = beta.eval(&nat(i), &ctx).unwrap() <= beta.eval(&nat(i + 1), &ctx).unwrap();
        let rhs = a.eval(&nat(i), &ctx).unwrap() <= a.eval(&nat(i + n), &ctx).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn routes_agree_on_the_degenerate_cases(text in seq_dsl(), other in seq_dsl()) {
        let a = parse_sequence(&text).unwrap();
        let b = parse_sequence(&other).unwrap();
        let cfg = EngineConfig::with_budget(50_000);
        if let (Ok(direct), Ok(general)) = (
            engine::dl_1_l(&a, 3, &cfg),
            engine::dl_k_l(std::slice::from_ref(&a), 3, &cfg),
        ) {
            prop_assert_eq!(direct.good.indices, general.good.indices);
            prop_assert_eq!(direct.cert.bound, general.cert.bound);
        }
        if let (Ok(direct), Ok(general)) = (
            engine::dl_2_2(&a, &b, &cfg),
            engine::dl_k_l(&[a.clone(), b.clone()], 2, &cfg),
        ) {
            prop_assert_eq!(direct.good.indices, general.good.indices);
            prop_assert_eq!(direct.cert.bound, general.cert.bound);
        }
    }
}

/// Closed form of the length-3 bound for one sequence, assembled directly:
/// the first non-descent index caps the round count at its value plus two,
/// and each round's window is the value at the running offset plus one.
fn direct_bound_for_triples(a: &Sequence, ctx: &EvalCtx) -> Nat {
    let first_nondescent = |offset: &Nat| -> Nat {
        let mut i = offset.clone();
        let mut v = a.eval(&i, ctx).unwrap();
        loop {
            let next = &i + 1u32;
            let w = a.eval(&next, ctx).unwrap();
            if v <= w {
                return i;
            }
            i = next;
            v = w;
        }
    };
    let i1 = first_nondescent(&Nat::from(0u32));
    let rounds = a.eval(&i1, ctx).unwrap() + 2u32;
    let mut total = Nat::from(0u32);
    let mut offset = Nat::from(0u32);
    let mut j = Nat::from(0u32);
    while j < rounds {
        let window = a.eval(&offset, ctx).unwrap() + 1u32;
        total += &window;
        offset += &window;
        j += 1u32;
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triple_bounds_match_the_direct_formula(text in seq_dsl()) {
        let a = parse_sequence(&text).unwrap();
        let cfg = EngineConfig::with_budget(100_000);
        if let Ok(w) = engine::dl_1_l(&a, 3, &cfg) {
            let ctx = EvalCtx::new(&cfg);
            let expected = direct_bound_for_triples(&a, &ctx);
            prop_assert_eq!(w.cert.bound, expected, "for {}", text);
        }
    }
}

#[test]
fn base_case_bound_is_attained_on_descents() {
    for n in 0u64..=30 {
        let a = Sequence::dec(nat(n));
        let w = engine::dl_1_2(&a, &cfg()).unwrap();
        assert_eq!(w.good.indices[0], nat(n));
        assert_eq!(w.cert.bound, nat(n + 1));
    }
}

/// Enumerate every strictly increasing subset in colexicographic order and
/// filter by goodness: an independent route to the same minima.
fn colex_reference(seqs: &[Sequence], l: usize, horizon: usize) -> (Option<Vec<u64>>, Option<u64>) {
    let ctx = EvalCtx::new(&cfg());
    let values: Vec<Vec<Nat>> = seqs
        .iter()
        .map(|s| {
            (0..=horizon)
                .map(|i| s.eval(&nat(i as u64), &ctx).unwrap())
                .collect()
        })
        .collect();
    let good = |set: &[usize]| {
        set.windows(2)
            .all(|w| values.iter().all(|row| row[w[0]] <= row[w[1]]))
    };
    let mut valid: Vec<Vec<usize>> = Vec::new();
    // iterate subsets by their top element first
    for top in (l - 1)..=horizon {
        let mut set: Vec<usize> = (0..l - 1).collect();
        loop {
            let mut candidate = set.clone();
            candidate.push(top);
            if candidate.iter().all(|&x| x <= top)
                && candidate.windows(2).all(|w| w[0] < w[1])
                && good(&candidate)
            {
                valid.push(candidate);
            }
            // next combination of l-1 elements below top
            if l == 1 {
                break;
            }
            let mut i = l - 1;
            loop {
                if i == 0 {
                    set.clear();
                    break;
                }
                i -= 1;
                if set[i] < top - 1 - (l - 2 - i) {
                    set[i] += 1;
                    for j in i + 1..l - 1 {
                        set[j] = set[j - 1] + 1;
                    }
                    break;
                }
            }
            if set.is_empty() {
                break;
            }
        }
        if l == 1 {
            valid.push(vec![top]);
        }
    }
    let min_last = valid.iter().map(|s| *s.last().unwrap() as u64).min();
    let lex_least = valid.into_iter().min();
    (
        lex_least.map(|s| s.into_iter().map(|x| x as u64).collect()),
        min_last,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn oracle_agrees_with_an_independent_enumeration(
        texts in prop::collection::vec(seq_dsl(), 1..=2),
        l in 2u64..=3,
        horizon in 3u64..=10,
    ) {
        prop_assume!(horizon >= l);
        let seqs: Vec<Sequence> = texts.iter().map(|t| parse_sequence(t).unwrap()).collect();
        let report = oracle::minimal_good_set(&seqs, l, &nat(horizon), &cfg()).unwrap();
        let (ref_lex, ref_min_last) = colex_reference(&seqs, l as usize, horizon as usize);
        let got_lex: Option<Vec<u64>> = report.minimal_witness.as_ref().map(|g: &GoodSet| {
            g.indices.iter().map(|n| u64::try_from(n).unwrap()).collect()
        });
        prop_assert_eq!(got_lex, ref_lex);
        let got_min: Option<u64> = report
            .min_last_index
            .as_ref()
            .map(|n| u64::try_from(n).unwrap());
        prop_assert_eq!(got_min, ref_min_last);
    }

    #[test]
    fn chains_verify_for_random_small_functions(
        a in 0u64..=3,
        b in 0u64..=3,
        c in 0u64..=3,
        l in 2u64..=4,
        m in 0u64..=2,
    ) {
        let f = parse_multifunction(&format!("f2: {a}*i + {b}*j + {c}")).unwrap();
        let chain = unprovability::incomparable_chain(&f, l, &nat(m), &cfg()).unwrap();
        prop_assert_eq!(chain.points.len(), l as usize);
    }
}
