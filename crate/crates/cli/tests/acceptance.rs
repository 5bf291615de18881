//! The acceptance gate: one check per criterion, each printed as a PASS/FAIL line.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use chainlab::analysis::*;
use chainlab::chu::*;
use chainlab::fixtures::{example_a, example_b, graph_presentations, omega_chain, order_catalog};
use chainlab::formulas::{
    clique_omission, descending_omega, hintikka, linear_order_axioms, parse, parse_file, wellorder_formulas,
};
use chainlab::games::*;
use chainlab::semantics::{eval_chain, eval_sentence, EvalBounds, Verdict};
use chainlab::structures::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_chainlab")).args(args).env_remove("CHAINLAB_BUDGET").output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn fx(name: &str) -> String {
    fixture(name).to_string_lossy().into_owned()
}

fn catalog() -> Vec<(String, FiniteStructure)> {
    order_catalog()
}

fn c1() -> Outcome {
    let f = descending_omega("<");
    let (a, b) = (example_a(), example_b());
    ensure!(a.presentation == b.presentation, "A and B have different presentations");
    let start = Instant::now();
    let va = eval_chain(&a, &f, &EvalBounds::default()).map_err(|e| e.to_string())?;
    let vb = eval_chain(&b, &f, &EvalBounds::default()).map_err(|e| e.to_string())?;
    let library = start.elapsed();
    ensure!(va == Verdict::TRUE, "A gives {va}");
    ensure!(vb == Verdict::FALSE, "B gives {vb}");
    let start = Instant::now();
    for (doc, want) in [("exampleA.json", "true"), ("exampleB.json", "false")] {
        let (code, out) = run(&["eval", "--chain", &fx(doc), "--formula", &fx("desc.lf")]);
        ensure!(code == 0 && out.trim() == want, "eval on {doc}: exit {code}, output {out:?}");
    }
    let cli = start.elapsed();
    ensure!(library < Duration::from_secs(1) && cli < Duration::from_secs(2), "too slow: {library:?} / {cli:?}");
    Ok(format!("A true, B false; library {library:?}, two CLI runs {cli:?}"))
}

fn c2() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0;
    for beta in 0..=2 {
        for width in 1..=2 {
            let r = adequacy_battery("<", 3, beta, width, AdequacyCaps::default()).map_err(|e| e.to_string())?;
            ensure!(r.ok(), "β={beta} L={width}: {} mismatches", r.mismatches.len());
            ensure!(r.structures == 116, "{} structures", r.structures);
            pairs += r.pairs;
        }
    }
    ensure!(start.elapsed() < Duration::from_secs(300), "took {:?}", start.elapsed());
    Ok(format!("0 mismatches over {pairs} pairs"))
}

fn c3() -> Outcome {
    let mut ns: Vec<FiniteStructure> = catalog().into_iter().map(|p| p.1).collect();
    ns.extend(binary_iso_classes("<", 2));
    let mut checks = 0;
    for m in ns.iter().filter(|m| m.size() <= 3) {
        for beta in 0..=2 {
            for cap in 1..=2 {
                let sigma = hintikka(m, &[], beta, cap, 32).map_err(|e| e.to_string())?;
                for n in &ns {
                    let sat = eval_sentence(n, &sigma).map_err(|e| e.to_string())?;
                    ensure!(sat == oracle::sentence(n, &sigma), "evaluator disagrees with the oracle");
                    let ii = ef_winner(&Arena::plain(m), &Arena::plain(n), beta, cap).unwrap() == Player::II;
                    ensure!(sat == ii, "σ of {:?} on {:?}, β={beta} L={cap}", oracle::describe(m), oracle::describe(n));
                    ensure!(ii == oracle::ef_plain(m, n, beta, cap), "solver disagrees with the oracle");
                    checks += 1;
                }
            }
        }
    }
    Ok(format!("{checks} (M, N, β, L) checks, 0 failures"))
}

fn c4() -> Outcome {
    let small = oracle::small_orders(3);
    let mut checks = 0;
    for (na, a) in &small {
        for (nb, b) in &small {
            let (la, lb) = (Arena::plain(a), Arena::plain(b));
            for rounds in 1..=2 {
                for cap in 1..=3 {
                    let ii = ef_winner(&la, &lb, rounds, cap).unwrap() == Player::II;
                    let graded = bf_maximal_graded(&la, &lb, rounds, cap).unwrap();
                    ensure!(ii != graded[rounds].is_empty(), "{na}/{nb}: maximal family disagrees");
                    let fam = bf_extract(&la, &lb, rounds, cap).unwrap();
                    ensure!(fam.is_some() == ii, "{na}/{nb}: extraction disagrees");
                    if let Some(fam) = fam {
                        let r = bf_verify(&fam, &la, &lb, cap);
                        ensure!(r.valid, "{na}/{nb}: {:?}", r.violations);
                    }
                    checks += 1;
                }
            }
        }
    }
    let mut four: Vec<FiniteStructure> = catalog().into_iter().map(|p| p.1).collect();
    four.extend(binary_iso_classes("<", 2));
    let mut wins = 0;
    for a in &four {
        for b in &four {
            let out = ef_solve_infty_finite(&Arena::plain(a), &Arena::plain(b), 1).unwrap();
            if out.winner == Player::II {
                ensure!(
                    oracle::isomorphic(a, b),
                    "II wins the unbounded game on non-isomorphic {:?} / {:?}",
                    oracle::describe(a),
                    oracle::describe(b)
                );
                wins += 1;
            }
        }
    }
    Ok(format!("{checks} bounded checks, {wins} unbounded II wins all isomorphic"))
}

fn c5() -> Outcome {
    let cat = catalog();
    ensure!(cat.len() <= 12, "catalog has {} structures", cat.len());
    let mut checks = 0;
    for (na, a) in &cat {
        for (nb, b) in &cat {
            let (la, lb) = (Arena::plain(a), Arena::plain(b));
            let mut w = [[false; 4]; 5];
            for (beta, row) in w.iter_mut().enumerate().skip(1) {
                for (theta, cell) in row.iter_mut().enumerate().skip(1) {
                    *cell = bg_winner(&la, &lb, beta, theta).unwrap() == Player::II;
                }
            }
            for beta in 1..=3 {
                for theta in 1..=3 {
                    ensure!(!w[beta + 1][theta] || w[beta][theta], "{na}/{nb}: β-monotonicity at β={beta} θ={theta}");
                    if theta < 3 {
                        ensure!(
                            !w[beta][theta + 1] || w[beta][theta],
                            "{na}/{nb}: θ-monotonicity at β={beta} θ={theta}"
                        );
                    }
                    checks += 1;
                }
            }
        }
    }
    let (two, three) = (FiniteStructure::chain(2), FiniteStructure::chain(3));
    let derived: Vec<bool> = (1..=3).map(|beta| oracle::bg_ii_wins(&two, &three, beta, 3)).collect();
    let solved: Vec<bool> = (1..=3)
        .map(|beta| bg_winner(&Arena::plain(&two), &Arena::plain(&three), beta, 3).unwrap() == Player::II)
        .collect();
    ensure!(derived == [true, true, false], "brute force gives {derived:?}");
    ensure!(solved == derived, "solver gives {solved:?}");
    Ok(format!("{checks} monotonicity checks; deferral II, II, I at β=1,2,3"))
}

fn c6() -> Outcome {
    let cat = catalog();
    let (mut premises, mut checks) = (0, 0);
    for (na, a) in &cat {
        for (nb, b) in &cat {
            let (fa, fb) = (FilteredFiniteModel::trivial(a.clone()), FilteredFiniteModel::trivial(b.clone()));
            let (la, lb) = (Arena::filtered(&fa), Arena::filtered(&fb));
            for beta in 1..=2 {
                for theta in 1..=3 {
                    checks += 1;
                    if ef_winner(&la, &lb, 2 * beta, theta).unwrap() == Player::II {
                        premises += 1;
                        ensure!(
                            bg_winner(&la, &lb, beta, theta).unwrap() == Player::II,
                            "{na}/{nb} β={beta} θ={theta}"
                        );
                    }
                }
            }
        }
    }
    Ok(format!("{checks} checks, {premises} with II winning 2β rounds, 0 violations"))
}

fn c7() -> Outcome {
    let battery = parse_file(&std::fs::read_to_string(fixture("pc20.lf")).unwrap(), None).map_err(|e| e.to_string())?;
    ensure!(battery.len() == 20, "battery has {} sentences", battery.len());
    let mut pairs = 0;
    for m in 1..=2 {
        let mut cat = Vec::new();
        for base in binary_iso_classes("<", 3) {
            cat.extend(enumerate_filtrations(&base, m));
        }
        let pair = pc_transform_pair(m, None, &battery, &cat).map_err(|e| e.to_string())?;
        ensure!(pair.report.ok(), "m={m}: {:?}", pair.report);
        ensure!(pair.report.boolean.checked > 0, "m={m}: no boolean structure checked");
        pairs += pair.chain.models.len() * battery.len();
    }
    Ok(format!("adjoint, dense, boolean-preserving, identitary at {pairs} (sentence, model) pairs"))
}

fn c8() -> Outcome {
    let r = gamma_verify(3).map_err(|e| e.to_string())?;
    ensure!(r.jointly_unsatisfiable, "Γ_3 has a model");
    ensure!(r.pattern_holds(), "a subset without a constant has no model");
    let mut models: Vec<FiniteStructure> = (1..=6).map(FiniteStructure::chain).collect();
    models.extend(binary_iso_classes("<", 3));
    let axioms = linear_order_axioms("<");
    for n in 1..=5 {
        let (_, theta) = wellorder_formulas(n, "<").map_err(|e| e.to_string())?;
        for m in &models {
            let want = axioms.iter().all(|a| oracle::sentence(m, a)) && m.size() == n;
            ensure!(eval_sentence(m, &theta).unwrap() == want, "θ_{n} on {:?}", oracle::describe(m));
        }
    }
    Ok(format!("Γ_3 pattern holds; θ_n exact for n ≤ 5 over {} orders", models.len()))
}

fn c9() -> Outcome {
    let vocab = Vocabulary::new(&[("E", 2)]);
    let bounds = EvalBounds::default();
    let caps = DecompositionCaps { max_filtration_len: 0, max_selectors: 1, max_slope: 2, max_offset: 2 };
    let mut seen = Vec::new();
    for (name, pres) in graph_presentations() {
        let cat = DecompositionCatalog::chains(enumerate_families(&pres, caps)).map_err(|e| e.to_string())?;
        for k in 2..=4 {
            let f = clique_omission(k, "E", &vocab).map_err(|e| e.to_string())?;
            let r = chain_independent(&f, &cat, &bounds).map_err(|e| e.to_string())?;
            ensure!(r.result != Independence::Unknown, "{name} k={k} is unknown");
            seen.push((name.clone(), k, r.result));
        }
    }
    let at = |n: &str, k| seen.iter().find(|s| s.0 == n && s.1 == k).map(|s| s.2.clone());
    ensure!(
        at("triangles", 3) == Some(Independence::Independent { value: false }),
        "triangles k=3: {:?}",
        at("triangles", 3)
    );
    ensure!(
        at("matching", 3) == Some(Independence::Independent { value: true }),
        "matching k=3: {:?}",
        at("matching", 3)
    );
    let cat = DecompositionCatalog::chains(vec![example_a(), example_b()]).unwrap();
    let r = chain_independent(&descending_omega("<"), &cat, &bounds).unwrap();
    ensure!(r.result == Independence::Dependent { left: 0, right: 1 }, "ω sentence: {:?}", r.result);
    Ok(format!("{} clique verdicts all definite; ω sentence dependent on (A, B)", seen.len()))
}

fn sentences(texts: &[&str]) -> FormulaBattery {
    FormulaBattery::new(texts.iter().map(|t| parse(t).unwrap()).collect())
}

fn comparable(pres: &Presentation, f: &LevelFamily, g: &LevelFamily) -> bool {
    family_subset(pres, f, g).is_none() || family_subset(pres, g, f).is_none()
}

fn equivalent(pres: &Presentation, f: &LevelFamily, g: &LevelFamily) -> bool {
    family_subset(pres, f, g).is_none() && family_subset(pres, g, f).is_none()
}

/// Two-point blocks `a`, `b` with an edge inside each block.
fn pairs_presentation() -> Presentation {
    let mut t = FiniteStructure::graph(2, &[(0, 1)]);
    t.names = vec!["a".into(), "b".into()];
    Presentation::periodic(t, Linkage::None)
}

fn pairs_families() -> Vec<LevelFamily> {
    let mut out = Vec::new();
    for a in 0..=2 {
        for b in 1..=3 {
            for pick in [None, Some("a"), Some("b")] {
                let selectors = pick
                    .map(|p| Selector { tag: format!("pick-{p}"), pick: [(0, p.to_string())].into() })
                    .into_iter()
                    .collect();
                out.push(LevelFamily { prefix: Prefix { a, b }, selectors });
            }
        }
    }
    out
}

fn c10() -> Outcome {
    let first_order = [
        "(exists (x) (forall (y) (or (= x y) (< x y))))",
        "(exists (x) (forall (y) (or (= x y) (< y x))))",
        "(forall (x) (exists (y) (< x y)))",
        "(forall (x) (exists (y) (< y x)))",
        "(exists (x y z) (and (< x y) (< y z)))",
    ];
    let order_fo = sentences(&first_order);
    let order = sentences(&[&first_order[..], &["(exists-omega s :step (< s1 s0))"]].concat());
    let graphs = sentences(&[
        "(exists (x y) (E x y))",
        "(forall (x) (exists (y) (E x y)))",
        "(exists (x y z) (and (E x y) (E y z) (E x z)))",
        "(not (exists (x y z) (and (E x y) (E y z) (E x z))))",
    ]);
    let mut configured: Vec<(String, Presentation, Vec<LevelFamily>, &FormulaBattery)> = vec![
        (
            "ω".into(),
            omega_chain().presentation,
            vec![LevelFamily::affine(1, 1), LevelFamily::affine(2, 1), LevelFamily::affine(2, 3)],
            &order,
        ),
        (
            "ω*".into(),
            example_a().presentation,
            vec![LevelFamily::affine(1, 1), LevelFamily::affine(1, 2), LevelFamily::affine(3, 2)],
            &order,
        ),
        (
            "ω* diagonal".into(),
            example_a().presentation,
            vec![LevelFamily::affine(1, 1), LevelFamily::affine(2, 1), example_a().levels],
            &order_fo,
        ),
    ];
    let pf = pairs_families();
    configured.push((
        "pairs".into(),
        pairs_presentation(),
        vec![pf[9].clone(), pf[10].clone(), pf[13].clone(), pf[25].clone()],
        &graphs,
    ));
    let caps = DecompositionCaps { max_filtration_len: 0, max_selectors: 1, max_slope: 2, max_offset: 2 };
    for (name, pres) in graph_presentations() {
        let fams: Vec<LevelFamily> = enumerate_families(&pres, caps).into_iter().map(|c| c.levels).collect();
        let mut chain = vec![fams[0].clone()];
        for f in &fams[1..] {
            let last = chain.last().unwrap();
            if chain.len() < 3 && family_subset(&pres, last, f).is_none() && !equivalent(&pres, last, f) {
                chain.push(f.clone());
            }
        }
        // A finite presentation has one decomposition up to equivalence.
        if chain.len() > 1 {
            configured.push((name, pres, chain, &graphs));
        }
    }
    let (mut failures, mut checked) = (0, 0);
    for (name, pres, chain, battery) in &configured {
        ensure!(chain.len() >= 2, "{name}: chain of {} families", chain.len());
        let r = union_lemma_check(pres, chain, battery, &EvalBounds::default());
        ensure!(r.precondition_failures.is_empty(), "{name}: {:?}", r.precondition_failures);
        failures += r.failures.len();
        checked += r.checked;
    }
    ensure!(failures == 0, "{failures} FAILUREs");

    let pres = pairs_presentation();
    let mut laws = 0;
    for f in &pf {
        let once = union_chain(&pres, std::slice::from_ref(f)).map_err(|e| e.to_string())?;
        let twice = union_chain(&pres, &[f.clone(), f.clone()]).map_err(|e| e.to_string())?;
        ensure!(equivalent(&pres, &once, f) && equivalent(&pres, &twice, f), "idempotence fails at {f:?}");
        laws += 1;
    }
    for f in &pf {
        for g in &pf {
            if !comparable(&pres, f, g) {
                continue;
            }
            for h in &pf {
                if !comparable(&pres, f, h) || !comparable(&pres, g, h) {
                    continue;
                }
                let u = |xs: &[LevelFamily]| union_chain(&pres, xs).unwrap();
                let left = u(&[u(&[f.clone(), g.clone()]), h.clone()]);
                let right = u(&[f.clone(), u(&[g.clone(), h.clone()])]);
                ensure!(equivalent(&pres, &left, &right), "associativity fails at {f:?} {g:?} {h:?}");
                ensure!(equivalent(&pres, &left, &u(&[f.clone(), g.clone(), h.clone()])), "flat union differs");
                laws += 1;
            }
        }
    }
    Ok(format!("{} chains, {checked} comparisons, 0 FAILUREs; {laws} union law instances", configured.len()))
}

fn chu_properties() -> Outcome {
    let inst = |n: &str| FiniteLogicInstance::read(&fixture(n)).unwrap();
    let (l1, l2, l3, lc) = (inst("l1.json"), inst("l2.json"), inst("l3.json"), inst("lcompact.json"));
    for l in [&l1, &l2, &l3, &lc] {
        let id = ChuTransform::identity(l);
        ensure!(verify_transform(&id, l, l).unwrap().ok(), "identity fails to verify");
        ensure!(compose(&id, &id, l, l, l).unwrap().transform == id, "identity is not a unit");
    }
    let t12 = ChuTransform::read(&fixture("t12.json")).unwrap();
    let t23 = ChuTransform::read(&fixture("t23.json")).unwrap();
    ensure!(verify_transform(&t12, &l1, &l2).unwrap().ok(), "t12 fails to verify");
    ensure!(verify_transform(&t23, &l2, &l3).unwrap().ok(), "t23 fails to verify");
    ensure!(
        !verify_transform(&ChuTransform::read(&fixture("t12-bad.json")).unwrap(), &l1, &l2).unwrap().ok(),
        "t12-bad verifies"
    );
    let c = compose(&t12, &t23, &l1, &l2, &l3).unwrap();
    ensure!(c.report.ok() && verify_transform(&c.transform, &l1, &l3).unwrap().ok(), "composite fails to verify");
    let found = search_transform(&l1, &l2, DEFAULT_SEARCH_BUDGET);
    ensure!(
        found.found.is_some_and(|t| verify_transform(&t, &l1, &l2).unwrap().ok()),
        "search finds no transform l1 → l2"
    );

    ensure!(check_boolean_preservation(&t12, &l1, &l2).unwrap().failures.is_empty(), "t12 breaks boolean structure");
    let cx = Compactness::Counterexample { sentences: vec!["p".into(), "np".into()] };
    ensure!(compactness_check(&l1, 2, 2).unwrap() == cx, "l1 is not a (2,2) counterexample");
    ensure!(compactness_check(&l2, 2, 2).unwrap() != Compactness::Compact, "l2 is (2,2)-compact");
    ensure!(compactness_check(&lc, 2, 2).unwrap() == Compactness::Compact, "lcompact is not compact");
    ensure!(search_transform(&l1, &lc, DEFAULT_SEARCH_BUDGET).found.is_none(), "l1 maps into a compact instance");
    Ok("laws and contrapositive fixture".into())
}

fn cli_goldens() -> Outcome {
    let cases: Vec<(Vec<String>, i32, &str)> = vec![
        (vec!["eval".into(), "--chain".into(), fx("exampleA.json"), "--formula".into(), fx("desc.lf")], 0, "true\n"),
        (vec!["eval".into(), "--chain".into(), fx("exampleB.json"), "--formula".into(), fx("desc.lf")], 0, "false\n"),
        (
            vec![
                "eval".into(),
                "--chain".into(),
                fx("deep.json"),
                "--formula".into(),
                fx("f.lf"),
                "--horizon".into(),
                "2".into(),
            ],
            2,
            "unknown(horizon=2,period=1)\n",
        ),
        (vec!["eval".into(), "--chain".into(), fx("exampleA.json")], 1, ""),
        (
            vec![
                "ef".into(),
                "--left".into(),
                fx("m2.json"),
                "--right".into(),
                fx("m3.json"),
                "--rounds".into(),
                "1".into(),
                "--cap".into(),
                "3".into(),
            ],
            0,
            "winner: I\n",
        ),
        (
            vec![
                "bg".into(),
                "--left".into(),
                fx("m2.json"),
                "--right".into(),
                fx("m3.json"),
                "--beta".into(),
                "2".into(),
                "--theta".into(),
                "3".into(),
            ],
            0,
            "winner: II\n",
        ),
        (
            vec![
                "chu".into(),
                "verify".into(),
                "--left".into(),
                fx("l1.json"),
                "--right".into(),
                fx("l2.json"),
                "--transform".into(),
                fx("t12.json"),
            ],
            0,
            "",
        ),
        (
            vec![
                "chu".into(),
                "verify".into(),
                "--left".into(),
                fx("l1.json"),
                "--right".into(),
                fx("l2.json"),
                "--transform".into(),
                fx("t12-bad.json"),
            ],
            1,
            "",
        ),
        (
            vec![
                "union".into(),
                "--presentation".into(),
                fx("graph-matching.json"),
                "--families".into(),
                fx("not-chain.json"),
            ],
            1,
            "",
        ),
        (vec!["--version".into()], 0, ""),
    ];
    for (args, code, want) in &cases {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let (got, out) = run(&argv);
        ensure!(got == *code, "{:?}: exit {got}, expected {code}", &argv);
        ensure!(want.is_empty() || out == *want, "{:?}: output {out:?}", &argv);
    }
    Ok(format!("{} CLI cases", cases.len()))
}

fn c11() -> Outcome {
    let a = chu_properties()?;
    let b = cli_goldens()?;
    Ok(format!("{a}; {b}"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("C1", c1),
        ("C2", c2),
        ("C3", c3),
        ("C4", c4),
        ("C5", c5),
        ("C6", c6),
        ("C7", c7),
        ("C8", c8),
        ("C9", c9),
        ("C10", c10),
        ("C11", c11),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default())
        });
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d.clone()),
            Err(d) => ("FAIL", d.clone()),
        };
        let line = format!("{name} {status} {detail} ({} ms)\n", start.elapsed().as_millis());
        std::io::stderr().lock().write_all(line.as_bytes()).unwrap();
        if outcome.is_err() {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
