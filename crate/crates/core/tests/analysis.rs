mod oracle;

use std::collections::BTreeSet;

use chainlab::analysis::*;
use chainlab::fixtures::{example_a, example_b, graph_presentations, omega_chain};
use chainlab::formulas::{clique_omission, descending_omega, gamma_vocabulary, gamma_witness, parse, Formula};
use chainlab::semantics::{eval_chain_with, EvalBounds, Verdict};
use chainlab::structures::*;
use proptest::prelude::*;

/// Two-point blocks `a`, `b` with no relations between blocks.
fn pairs_presentation() -> Presentation {
    let mut t = FiniteStructure::graph(2, &[(0, 1)]);
    t.names = vec!["a".into(), "b".into()];
    Presentation::periodic(t, Linkage::None)
}

fn family(a: usize, b: usize, picks: &[&str]) -> LevelFamily {
    let selectors =
        picks.iter().map(|p| Selector { tag: format!("pick-{p}"), pick: [(0, p.to_string())].into() }).collect();
    LevelFamily { prefix: Prefix { a, b }, selectors }
}

const WINDOW: usize = 24;

/// Level `n` of `f` restricted to blocks below [`WINDOW`].
fn level(pres: &Presentation, f: &LevelFamily, n: usize) -> BTreeSet<Element> {
    let c = ChainModel::new(pres.clone(), f.clone());
    pres.window(WINDOW).into_iter().filter(|&e| c.level_contains(n, e).unwrap()).collect()
}

/// Every level of `f` inside some level of `g`, checked on the window. Only
/// levels of `g` whose prefix ends two blocks short of the window edge count,
/// so that an infinite tail of `f` has to be matched by designation.
fn inside(pres: &Presentation, f: &LevelFamily, g: &LevelFamily) -> bool {
    (0..4).all(|n| {
        let l = level(pres, f, n);
        (0..WINDOW).filter(|&m| g.prefix_at(m) + 2 <= WINDOW).any(|m| l.is_subset(&level(pres, g, m)))
    })
}

fn comparable(pres: &Presentation, fs: &[&LevelFamily]) -> bool {
    fs.iter().all(|f| fs.iter().all(|g| inside(pres, f, g) || inside(pres, g, f)))
}

fn equivalent(pres: &Presentation, f: &LevelFamily, g: &LevelFamily) -> bool {
    inside(pres, f, g) && inside(pres, g, f)
}

/// Families whose selectors all pick `a`.
fn arb_family() -> impl Strategy<Value = LevelFamily> {
    (0usize..=2, 1usize..=3, any::<bool>()).prop_map(|(a, b, sel)| family(a, b, if sel { &["a"] } else { &[] }))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn family_subset_matches_window_check(f in arb_family(), g in arb_family()) {
        let pres = pairs_presentation();
        prop_assert_eq!(family_subset(&pres, &f, &g).is_none(), inside(&pres, &f, &g));
    }

    #[test]
    fn union_is_an_upper_bound(f in arb_family(), g in arb_family()) {
        let pres = pairs_presentation();
        let u = union_chain(&pres, &[f.clone(), g.clone()]);
        if !comparable(&pres, &[&f, &g]) {
            prop_assert!(matches!(u, Err(AnalysisError::NotChain { .. })), "{:?}", u);
            return Ok(());
        }
        let u = u.unwrap();
        prop_assert!(inside(&pres, &f, &u) && inside(&pres, &g, &u));
        // The union is the larger family up to chain equivalence.
        let big = if inside(&pres, &f, &g) { &g } else { &f };
        prop_assert!(equivalent(&pres, &u, big));
    }

    #[test]
    fn union_is_idempotent(f in arb_family()) {
        let pres = pairs_presentation();
        prop_assert_eq!(union_chain(&pres, std::slice::from_ref(&f)).unwrap(), f.clone());
        let twice = union_chain(&pres, &[f.clone(), f.clone()]).unwrap();
        prop_assert!(equivalent(&pres, &twice, &f));
    }

    #[test]
    fn union_is_commutative_and_associative(f in arb_family(), g in arb_family(), h in arb_family()) {
        let pres = pairs_presentation();
        prop_assume!(comparable(&pres, &[&f, &g, &h]));
        let fg = union_chain(&pres, &[f.clone(), g.clone()]).unwrap();
        let gf = union_chain(&pres, &[g.clone(), f.clone()]).unwrap();
        prop_assert!(equivalent(&pres, &fg, &gf));
        let left = union_chain(&pres, &[fg, h.clone()]).unwrap();
        let gh = union_chain(&pres, &[g.clone(), h.clone()]).unwrap();
        let right = union_chain(&pres, &[f.clone(), gh]).unwrap();
        let flat = union_chain(&pres, &[f, g, h]).unwrap();
        prop_assert!(equivalent(&pres, &left, &right));
        prop_assert!(equivalent(&pres, &left, &flat));
    }
}

#[test]
fn incomparable_families_are_rejected() {
    let pres = pairs_presentation();
    let (l, r) = (family(1, 1, &["a"]), family(1, 1, &["b"]));
    assert!(matches!(
        union_chain(&pres, &[l.clone(), r.clone()]),
        Err(AnalysisError::NotChain { left: 0, right: 1, .. })
    ));
    assert!(union_chain(&pres, &[]).is_err());
    // Prefix-only families always nest, whatever the slope.
    let u = union_chain(&pres, &[family(1, 2, &[]), family(2, 1, &[])]).unwrap();
    assert_eq!(u.prefix, Prefix { a: 2, b: 2 });
    let tags = union_chain(&pres, &[family(0, 1, &["a"]), l]).unwrap();
    assert_eq!(tags.selectors.len(), 1);
}

fn battery() -> FormulaBattery {
    FormulaBattery::new(
        [
            "(exists (x) (forall (y) (or (= x y) (< x y))))",
            "(forall (x) (exists (y) (< x y)))",
            "(exists (y) (< x y))",
            "(exists (x y) (and (< x y) (not (= x y))))",
        ]
        .iter()
        .map(|t| parse(t).unwrap())
        .collect(),
    )
}

#[test]
fn union_harness_on_omega() {
    let pres = omega_chain().presentation;
    let chain = [LevelFamily::affine(1, 1), LevelFamily::affine(2, 1), LevelFamily::affine(2, 3)];
    let r = union_lemma_check(&pres, &chain, &battery(), &EvalBounds::default());
    assert!(r.ok(), "{:?}", r);
    assert!(r.checked > 0);
    assert_eq!(r.union.unwrap().prefix, Prefix { a: 2, b: 3 });
}

#[test]
fn union_harness_catches_a_corrupted_evaluator() {
    let pres = omega_chain().presentation;
    let chain = [LevelFamily::affine(2, 1), LevelFamily::affine(1, 2)];
    let u = union_chain(&pres, &chain).unwrap();
    let flip_union = |c: &ChainModel, f: &Formula, env: &[(String, Element)], b: &EvalBounds| {
        let v = eval_chain_with(c, f, env, b)?;
        Ok(if c.levels == u { v.not() } else { v })
    };
    let r = union_lemma_check_with(&flip_union, &pres, &chain, &battery(), &EvalBounds::default());
    assert!(r.precondition_failures.is_empty());
    assert!(!r.failures.is_empty());
    assert!(r.failures.iter().all(|f| f.starts_with("FAILURE")));
    let honest = union_lemma_check(&pres, &chain, &battery(), &EvalBounds::default());
    assert!(honest.ok());
}

#[test]
fn union_harness_reports_broken_preconditions() {
    let pres = pairs_presentation();
    let r = union_lemma_check(
        &pres,
        &[family(1, 1, &["a"]), family(1, 1, &["b"])],
        &battery_pairs(),
        &EvalBounds::default(),
    );
    assert!(!r.ok());
    assert!(!r.precondition_failures.is_empty());
    assert!(r.union.is_none());
}

fn battery_pairs() -> FormulaBattery {
    FormulaBattery::new(vec![parse("(exists (x y) (E x y))").unwrap()])
}

#[test]
fn elementary_check_on_nested_families() {
    let pres = omega_chain().presentation;
    let r = elementary_battery_check(
        &pres,
        &LevelFamily::affine(1, 1),
        &LevelFamily::affine(3, 2),
        &battery(),
        &EvalBounds::default(),
    )
    .unwrap();
    assert!(r.agrees());
    assert!(r.checked > 0);
}

#[test]
fn gamma_pattern() {
    for n in 2..=5 {
        let r = gamma_verify(n).unwrap();
        assert!(r.pattern_holds(), "n={n}");
        assert!(r.jointly_unsatisfiable);
        assert_eq!(r.without_constant.len(), n);
        let gamma = gamma_witness(n, "<").unwrap();
        let vocab = gamma_vocabulary(n, "<");
        for check in &r.without_constant {
            let w = check.witness.as_ref().unwrap();
            let mut m = FiniteStructure::chain(w.size);
            m.vocab = vocab.clone();
            m.consts = w.constants.clone();
            for f in &gamma {
                if !check.omitted.contains(&f.to_string()) {
                    assert!(oracle::sentence(&m, f), "n={n}: witness fails {f}");
                }
            }
        }
    }
    assert!(gamma_verify(1).is_err());
    assert!(gamma_verify(6).is_err());
}

#[test]
fn gamma_is_unsatisfiable_by_brute_force() {
    // θ_3 forces three elements; Γ_3 names four distinct ones.
    let n = 3;
    let gamma = gamma_witness(n, "<").unwrap();
    let vocab = gamma_vocabulary(n, "<");
    for size in 1..=n + 1 {
        for base in all_binary_structures("<", size) {
            if !oracle::sentence(&base, &gamma[0]) {
                continue;
            }
            assert_eq!(size, n);
            for code in 0..size.pow(n as u32 + 1) {
                let mut m = base.clone();
                m.vocab = vocab.clone();
                m.consts = vocab
                    .constants
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (c.clone(), code / size.pow(i as u32) % size))
                    .collect();
                assert!(!gamma.iter().all(|f| oracle::sentence(&m, f)));
            }
        }
    }
}

#[test]
fn adequacy_battery_has_no_mismatches() {
    for beta in 0..=2 {
        for width in 1..=2 {
            let r = adequacy_battery("<", 3, beta, width, AdequacyCaps::default()).unwrap();
            assert!(r.ok(), "β={beta} L={width}: {:?}", r.mismatches);
            assert_eq!(r.structures, 116);
            assert_eq!(r.pairs, 116 * 117 / 2);
        }
    }
    let full = adequacy_battery("<", 3, 2, 2, AdequacyCaps::default()).unwrap();
    assert_eq!(full.rows, 116);
    assert!(matches!(adequacy_battery("<", 4, 1, 1, AdequacyCaps::default()), Err(AnalysisError::Caps(_))));
}

#[test]
fn adequacy_rows_match_brute_force_game() {
    let ms = binary_iso_classes("<", 2);
    for beta in 0..=2 {
        let r = adequacy_check(&ms, beta, 1).unwrap();
        let classes = {
            let mut reps: Vec<usize> = Vec::new();
            for i in 0..ms.len() {
                if !reps.iter().any(|&j| oracle::ef_plain(&ms[i], &ms[j], beta, 1)) {
                    reps.push(i);
                }
            }
            reps.len()
        };
        assert_eq!(r.rows, classes, "β={beta}");
    }
}

fn graph_catalog(pres: &Presentation) -> DecompositionCatalog {
    let caps = DecompositionCaps { max_filtration_len: 0, max_selectors: 1, max_slope: 2, max_offset: 2 };
    DecompositionCatalog::chains(enumerate_families(pres, caps)).unwrap()
}

#[test]
fn clique_omission_has_definite_verdicts() {
    let vocab = Vocabulary::new(&[("E", 2)]);
    let bounds = EvalBounds::default();
    let mut seen = Vec::new();
    for (name, pres) in graph_presentations() {
        let cat = graph_catalog(&pres);
        for k in 2..=4 {
            let f = clique_omission(k, "E", &vocab).unwrap();
            let r = chain_independent(&f, &cat, &bounds).unwrap();
            assert_ne!(r.result, Independence::Unknown, "{name} k={k}");
            seen.push((name.clone(), k, r.result));
        }
    }
    let triangles_3 = seen.iter().find(|(n, k, _)| n == "triangles" && *k == 3).unwrap();
    assert_eq!(triangles_3.2, Independence::Independent { value: false });
    let matching_3 = seen.iter().find(|(n, k, _)| n == "matching" && *k == 3).unwrap();
    assert_eq!(matching_3.2, Independence::Independent { value: true });
    assert!(clique_omission(1, "E", &vocab).is_err());
}

#[test]
fn example_catalog_is_dependent() {
    let cat = DecompositionCatalog::chains(vec![example_a(), example_b()]).unwrap();
    let r = chain_independent(&descending_omega("<"), &cat, &EvalBounds::default()).unwrap();
    assert_eq!(r.result, Independence::Dependent { left: 0, right: 1 });
    assert_eq!(r.verdicts, [Verdict::TRUE, Verdict::FALSE]);
    assert!(r.to_string().starts_with("dependent relative to catalog of 2"));
}

#[test]
fn first_order_sentences_ignore_finite_filtrations() {
    let cat = DecompositionCatalog::filtered(enumerate_filtrations(&FiniteStructure::chain(3), 3)).unwrap();
    for f in battery().formulas().filter(|f| f.free_names().is_empty()) {
        let r = chain_independent(f, &cat, &EvalBounds::default()).unwrap();
        assert!(matches!(r.result, Independence::Independent { .. }), "{f}");
    }
}

#[test]
fn catalogs_must_share_a_base() {
    assert!(matches!(DecompositionCatalog::chains(vec![]), Err(AnalysisError::EmptyCatalog)));
    assert!(matches!(DecompositionCatalog::chains(vec![example_a(), omega_chain()]), Err(AnalysisError::MixedBase(1))));
    let bad = ChainModel::new(example_a().presentation, LevelFamily::affine(1, 0));
    assert!(matches!(DecompositionCatalog::chains(vec![bad]), Err(AnalysisError::InvalidEntry { index: 0, .. })));
}
