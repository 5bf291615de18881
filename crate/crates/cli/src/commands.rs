use std::path::Path;

use anyhow::{bail, Context, Result};
use chainlab::analysis::{
    adequacy_battery, chain_independent, union_chain, union_lemma_check, AdequacyCaps, DecompositionCatalog,
    FormulaBattery, Independence,
};
use chainlab::chu::{
    compactness_check, compose, pc_transform_pair, search_transform, verify_transform, ChuTransform, Compactness,
    FiniteLogicInstance, DEFAULT_SEARCH_BUDGET,
};
use chainlab::formulas::{
    clique_omission, gamma_witness, hintikka, sigma_sentences, wellorder_formulas, Formula, DEFAULT_VARIABLE_BUDGET,
};
use chainlab::games::{bg_equiv_classes, bg_solve, ef_solve_chain_truncated, ef_solve_finite, ef_solve_infty_finite};
use chainlab::semantics::{eval_chain, eval_chain_finite, eval_sentence, Verdict};
use chainlab::structures::{
    binary_iso_classes, enumerate_families, enumerate_filtrations, load_catalog, DecompositionCaps, Document,
    FilteredFiniteModel, LevelFamily, Loaded, Vocabulary,
};
use serde_json::{json, Value};

use crate::args::*;
use crate::load::{self, Config, GameModel};

/// What a verb prints, in both forms, and its exit code.
pub struct Output {
    pub text: String,
    pub json: Value,
    pub code: u8,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Output { text: text.into(), json, code: 0 }
    }

    fn with_code(mut self, code: u8) -> Self {
        self.code = code;
        self
    }
}

const UNKNOWN: u8 = 2;
const FAILED: u8 = 1;

pub fn run(cmd: &Cmd, config: &Config) -> Result<Output> {
    match cmd {
        Cmd::Validate(a) => validate(a),
        Cmd::Eval(a) => eval(a, config),
        Cmd::Ef(a) => ef(a),
        Cmd::Bg(a) => bg(a),
        Cmd::Equiv(a) => equiv(a),
        Cmd::Chu(c) => chu(c, config),
        Cmd::Emit(c) => emit(c),
        Cmd::Indep(a) => indep(a, config),
        Cmd::Union(a) => union(a, config),
        Cmd::Adequacy(a) => adequacy(a),
        Cmd::Play(_) => bail!("play is interactive and handled separately"),
    }
}

fn lines<I: IntoIterator<Item = String>>(it: I) -> String {
    it.into_iter().collect::<Vec<_>>().join("\n")
}

fn validate_one(path: &Path, kind: FileKind) -> Result<String> {
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let kind = match kind {
        FileKind::Auto if ext == "lf" => FileKind::Formulas,
        k => k,
    };
    match kind {
        FileKind::Formulas => {
            let fs = load::formulas(path, None)?;
            Ok(format!("{} formula(s)", fs.len()))
        }
        FileKind::Document => Ok(load::load(path)?.kind().to_string()),
        FileKind::Catalog => {
            let items = load_catalog(path)?;
            for (i, l) in items.iter().enumerate() {
                if let Some(v) = l.validate().first() {
                    bail!("entry {i}: {v}");
                }
            }
            Ok(format!("catalog of {}", items.len()))
        }
        FileKind::Instance => {
            let l = FiniteLogicInstance::read(path)?;
            l.validate()?;
            Ok(format!("logic instance with {} sentences and {} models", l.sentences.len(), l.models.len()))
        }
        FileKind::Transform => {
            let t = ChuTransform::read(path)?;
            Ok(format!("transform with {} sentence and {} model assignments", t.f.len(), t.g.len()))
        }
        FileKind::Families => {
            let fs: Vec<LevelFamily> = load::read_json(path)?;
            Ok(format!("{} level families", fs.len()))
        }
        FileKind::Auto => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            if Document::from_json(&text).is_ok() {
                return validate_one(path, FileKind::Document);
            }
            let value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            let kind = match &value {
                Value::Array(items) if items.iter().all(|i| i.get("base").is_some()) => FileKind::Catalog,
                Value::Array(_) => FileKind::Families,
                Value::Object(o) if o.contains_key("table") => FileKind::Instance,
                Value::Object(o) if o.contains_key("f") && o.contains_key("g") => FileKind::Transform,
                _ => return validate_one(path, FileKind::Document),
            };
            validate_one(path, kind)
        }
    }
}

fn validate(a: &ValidateArgs) -> Result<Output> {
    let mut text = Vec::new();
    let mut items = Vec::new();
    let mut code = 0;
    for path in &a.files {
        match validate_one(path, a.kind) {
            Ok(what) => {
                text.push(format!("{}: ok ({what})", path.display()));
                items.push(json!({"file": path.display().to_string(), "ok": true, "kind": what}));
            }
            Err(e) => {
                code = FAILED;
                text.push(format!("{}: invalid: {e:#}", path.display()));
                items.push(json!({"file": path.display().to_string(), "ok": false, "error": format!("{e:#}")}));
            }
        }
    }
    Ok(Output::ok(lines(text), json!(items)).with_code(code))
}

fn verdict_output(formulas: &[Formula], verdicts: &[Verdict]) -> Output {
    let text = lines(verdicts.iter().map(Verdict::to_string));
    let json = json!(formulas
        .iter()
        .zip(verdicts)
        .map(|(f, v)| json!({"formula": f.to_string(), "verdict": v}))
        .collect::<Vec<_>>());
    let code = if verdicts.iter().any(|v| !v.is_definite()) { UNKNOWN } else { 0 };
    Output::ok(text, json).with_code(code)
}

fn eval(a: &EvalArgs, config: &Config) -> Result<Output> {
    let bounds = config.bounds(&a.bounds);
    let (formulas, verdicts) = if let Some(p) = &a.classical {
        let m = load::structure(p)?;
        let fs = load::formulas(&a.formula, Some(&m.vocab))?;
        let vs = fs.iter().map(|f| eval_sentence(&m, f).map(Verdict::of)).collect::<Result<Vec<_>, _>>()?;
        (fs, vs)
    } else if let Some(p) = &a.chain {
        let c = load::chain(p)?;
        let fs = load::formulas(&a.formula, Some(&c.presentation.vocab))?;
        let vs = fs.iter().map(|f| eval_chain(&c, f, &bounds)).collect::<Result<Vec<_>, _>>()?;
        (fs, vs)
    } else if let Some(p) = &a.filtered {
        let fm = load::filtered(p)?;
        let fs = load::formulas(&a.formula, Some(&fm.base.vocab))?;
        let vs = fs.iter().map(|f| eval_chain_finite(&fm, f).map(Verdict::of)).collect::<Result<Vec<_>, _>>()?;
        (fs, vs)
    } else {
        bail!("one of --classical, --chain, --filtered is required");
    };
    Ok(verdict_output(&formulas, &verdicts))
}

fn table_text(table: &std::collections::BTreeMap<String, String>) -> String {
    lines(table.iter().map(|(k, v)| format!("  {k} => {v}")))
}

fn ef(a: &EfArgs) -> Result<Output> {
    if a.truncated {
        let (l, r) = (load::chain(&a.left)?, load::chain(&a.right)?);
        let rounds = a.rounds.context("--truncated needs --rounds")?;
        let (hi, hii) = (a.horizon_i.unwrap_or(0), a.horizon_ii.unwrap_or(0));
        let v = ef_solve_chain_truncated(&l, &r, rounds, a.cap, hi, hii)?;
        return Ok(Output::ok(format!("verdict: {v}"), json!({"rounds": rounds, "cap": a.cap, "result": v})));
    }
    let (l, r) = (GameModel::read(&a.left)?, GameModel::read(&a.right)?);
    let (la, ra) = (l.arena(), r.arena());
    if a.infty {
        let out = ef_solve_infty_finite(&la, &ra, a.cap)?;
        let text = format!("winner: {}\nfamily size: {}", out.winner, out.j.len());
        let j: Vec<String> = out.j.iter().map(|p| p.render(&la, &ra)).collect();
        return Ok(Output::ok(text, json!({"winner": out.winner, "cap": a.cap, "family": j})));
    }
    let rounds = a.rounds.context("--rounds is required")?;
    let out = ef_solve_finite(&la, &ra, rounds, a.cap)?;
    let mut text = format!("winner: {}", out.winner);
    if a.table {
        text.push_str(&format!("\nstrategy:\n{}", table_text(&out.table)));
    }
    Ok(Output::ok(text, serde_json::to_value(&out)?))
}

fn bg(a: &BgArgs) -> Result<Output> {
    let (l, r) = (GameModel::read(&a.left)?, GameModel::read(&a.right)?);
    let out = bg_solve(&l.arena(), &r.arena(), a.beta, a.theta)?;
    let mut text = format!("winner: {}", out.winner);
    if a.table {
        text.push_str(&format!("\nstrategy:\n{}", table_text(&out.table)));
    }
    Ok(Output::ok(text, serde_json::to_value(&out)?))
}

fn equiv(a: &EquivArgs) -> Result<Output> {
    let labels = load::catalog_labels(&a.catalog)?;
    let models: Vec<GameModel> =
        load_catalog(&a.catalog)?.into_iter().map(|l| GameModel::from_loaded(l, &a.catalog)).collect::<Result<_>>()?;
    let arenas: Vec<_> = models.iter().map(GameModel::arena).collect();
    let classes = bg_equiv_classes(&arenas, a.beta, a.theta)?;
    let named: Vec<Vec<&str>> =
        classes.classes.iter().map(|c| c.iter().map(|&i| labels[i].as_str()).collect()).collect();
    let text = lines(named.iter().enumerate().map(|(i, c)| format!("class {i}: {}", c.join(", "))));
    Ok(Output::ok(text, json!({"beta": a.beta, "theta": a.theta, "classes": named, "sim": classes.sim})))
}

fn pc_catalog(catalog: Option<&Path>, size: usize, m: usize) -> Result<Vec<FilteredFiniteModel>> {
    if let Some(p) = catalog {
        return load_catalog(p)?
            .into_iter()
            .map(|l| match l {
                Loaded::Filtered(f) => Ok(f),
                other => bail!("pc catalogs hold filtered models, found a {}", other.kind()),
            })
            .collect();
    }
    Ok(binary_iso_classes("<", size).iter().flat_map(|b| enumerate_filtrations(b, m)).collect())
}

fn chu(c: &ChuCmd, config: &Config) -> Result<Output> {
    match c {
        ChuCmd::Verify { left, right, transform } => {
            let (l1, l2) = (FiniteLogicInstance::read(left)?, FiniteLogicInstance::read(right)?);
            let t = ChuTransform::read(transform)?;
            let r = verify_transform(&t, &l1, &l2)?;
            let mut text = vec![format!("adjoint: {}", r.adjoint), format!("dense: {}", r.dense)];
            text.extend(r.counterexamples.iter().cloned());
            let code = if r.ok() { 0 } else { FAILED };
            Ok(Output::ok(lines(text), serde_json::to_value(&r)?).with_code(code))
        }
        ChuCmd::Search { left, right, budget } => {
            let (l1, l2) = (FiniteLogicInstance::read(left)?, FiniteLogicInstance::read(right)?);
            let budget = config.budget(*budget, DEFAULT_SEARCH_BUDGET)?;
            let r = search_transform(&l1, &l2, budget);
            let (text, code) = match (&r.found, r.exhaustive) {
                (Some(t), _) => (format!("found after {} candidates\n{}", r.candidates, serde_json::to_string(t)?), 0),
                (None, true) => (format!("none (exhaustive, {} candidates)", r.candidates), 0),
                (None, false) => (format!("unknown: budget of {budget} exhausted"), UNKNOWN),
            };
            Ok(Output::ok(text, serde_json::to_value(&r)?).with_code(code))
        }
        ChuCmd::Compose { first, second, l1, l2, l3 } => {
            let ls = [l1, l2, l3].map(|p| FiniteLogicInstance::read(p));
            let [l1, l2, l3] = ls;
            let (l1, l2, l3) = (l1?, l2?, l3?);
            let comp = compose(&ChuTransform::read(first)?, &ChuTransform::read(second)?, &l1, &l2, &l3)?;
            let text = format!(
                "adjoint: {}\ndense: {}\n{}",
                comp.report.adjoint,
                comp.report.dense,
                serde_json::to_string(&comp.transform)?
            );
            let code = if comp.report.ok() { 0 } else { FAILED };
            Ok(Output::ok(text, serde_json::to_value(&comp)?).with_code(code))
        }
        ChuCmd::Compact { instance, theta, lambda } => {
            let l = FiniteLogicInstance::read(instance)?;
            let r = compactness_check(&l, *theta, *lambda)?;
            let text = match &r {
                Compactness::Compact => format!("({lambda},{theta})-compact"),
                Compactness::Counterexample { sentences } => format!("counterexample: {{{}}}", sentences.join(", ")),
            };
            Ok(Output::ok(text, serde_json::to_value(&r)?))
        }
        ChuCmd::Pc { m, caps, battery, catalog, size } => {
            let models = pc_catalog(catalog.as_deref(), *size, *m)?;
            let vocab = models.first().map(|f| f.base.vocab.clone());
            let fs = load::formulas(battery, vocab.as_ref())?;
            let pair = pc_transform_pair(*m, caps.as_deref(), &fs, &models)?;
            let r = &pair.report;
            let text = lines([
                format!("models: {} chain, {} classical", pair.chain.models.len(), pair.classical.models.len()),
                format!("adjoint: {}", r.verify.adjoint),
                format!("dense: {}", r.verify.dense),
                format!("boolean: {} checked, {} failures", r.boolean.checked, r.boolean.failures.len()),
                format!("σ₀ failures: {}", r.sigma0_failures.len()),
                format!("identitary failures: {}", r.identitary_failures.len()),
            ]);
            let code = if r.ok() { 0 } else { FAILED };
            Ok(Output::ok(text, serde_json::to_value(&pair)?).with_code(code))
        }
    }
}

fn emitted(items: Vec<(String, Formula)>) -> Output {
    let text = lines(items.iter().map(|(label, f)| format!("# {label}\n{f}")));
    let json = json!(items.iter().map(|(l, f)| json!({"name": l, "formula": f.to_string()})).collect::<Vec<_>>());
    Output::ok(text, json)
}

fn emit(c: &EmitCmd) -> Result<Output> {
    Ok(match c {
        EmitCmd::Hintikka { model, beta, width, budget } => {
            let m = load::structure(model)?;
            let f = hintikka(&m, &[], *beta, *width, budget.unwrap_or(DEFAULT_VARIABLE_BUDGET))?;
            emitted(vec![(format!("σ^{beta} with tuples of {width}"), f)])
        }
        EmitCmd::Wellorder { n, order } => {
            let (es, theta) = wellorder_formulas(*n, order)?;
            let mut items: Vec<(String, Formula)> =
                es.into_iter().enumerate().map(|(i, e)| (format!("E_{i}"), e)).collect();
            items.push((format!("θ_{n}"), theta));
            emitted(items)
        }
        EmitCmd::Sigma { m, caps } => {
            let s = sigma_sentences(*m, caps)?;
            let mut items = vec![("σ₀".to_string(), s.sigma0)];
            items.extend(s.psi.into_iter().enumerate().map(|(i, p)| (format!("ψ_{i}"), p)));
            items.push(("σ₁".to_string(), s.sigma1));
            emitted(items)
        }
        EmitCmd::Gamma { n, order } => {
            let g = gamma_witness(*n, order)?;
            emitted(g.into_iter().enumerate().map(|(i, f)| (format!("Γ_{n}[{i}]"), f)).collect())
        }
        EmitCmd::Clique { k, symbol } => {
            let vocab = Vocabulary::new(&[(symbol.as_str(), 2)]);
            emitted(vec![(format!("no {k}-clique"), clique_omission(*k, symbol, &vocab)?)])
        }
    })
}

fn indep(a: &IndepArgs, config: &Config) -> Result<Output> {
    let bounds = config.bounds(&a.bounds);
    let catalog = if let Some(p) = &a.catalog {
        DecompositionCatalog::from_loaded(load_catalog(p)?)?
    } else if let Some(p) = &a.presentation {
        let pres = load::presentation(p)?;
        let caps = DecompositionCaps {
            max_filtration_len: 0,
            max_selectors: a.max_selectors,
            max_slope: a.max_slope,
            max_offset: a.max_offset,
        };
        DecompositionCatalog::chains(enumerate_families(&pres, caps))?
    } else if let Some(p) = &a.structure {
        let base = load::structure(p)?;
        DecompositionCatalog::filtered(enumerate_filtrations(&base, a.max_levels))?
    } else {
        bail!("one of --catalog, --presentation, --structure is required");
    };
    let vocab = match &catalog.entries[0] {
        chainlab::analysis::Decomposition::Chain(c) => c.presentation.vocab.clone(),
        chainlab::analysis::Decomposition::Filtered(f) => f.base.vocab.clone(),
    };
    let fs = load::formulas(&a.formula, Some(&vocab))?;
    let mut text = Vec::new();
    let mut items = Vec::new();
    let mut code = 0;
    for f in &fs {
        let r = chain_independent(f, &catalog, &bounds)?;
        if r.result == Independence::Unknown {
            code = UNKNOWN;
        }
        text.push(format!("{f}: {r}"));
        items.push(json!({"formula": f.to_string(), "report": r}));
    }
    Ok(Output::ok(lines(text), json!(items)).with_code(code))
}

fn union(a: &UnionArgs, config: &Config) -> Result<Output> {
    let pres = load::presentation(&a.presentation)?;
    let families: Vec<LevelFamily> = load::read_json(&a.families)?;
    let u = union_chain(&pres, &families)?;
    let mut text = vec![format!("union: {}", serde_json::to_string(&u)?)];
    let mut json = json!({"union": u});
    let mut code = 0;
    if let Some(b) = &a.battery {
        let battery = FormulaBattery::new(load::formulas(b, Some(&pres.vocab))?);
        let r = union_lemma_check(&pres, &families, &battery, &config.bounds(&a.bounds));
        text.push(format!("checked: {}", r.checked));
        text.extend(r.precondition_failures.iter().map(|p| format!("precondition: {p}")));
        text.extend(r.failures.iter().cloned());
        text.push(format!("failures: {}", r.failures.len()));
        if !r.ok() {
            code = FAILED;
        }
        json["harness"] = serde_json::to_value(&r)?;
    }
    Ok(Output::ok(lines(text), json).with_code(code))
}

fn adequacy(a: &AdequacyArgs) -> Result<Output> {
    let d = AdequacyCaps::default();
    let caps = AdequacyCaps {
        size: a.max_size.unwrap_or(d.size),
        beta: a.max_beta.unwrap_or(d.beta),
        width: a.max_width.unwrap_or(d.width),
    };
    let r = adequacy_battery(&a.rel, a.size, a.beta, a.width, caps)?;
    let mut text = vec![format!(
        "structures: {}, pairs: {}, rows: {}, mismatches: {}",
        r.structures,
        r.pairs,
        r.rows,
        r.mismatches.len()
    )];
    text.extend(r.mismatches.iter().map(|m| {
        format!("FAILURE: structures {} and {}: rows equal {}, winner {}", m.left, m.right, m.rows_equal, m.winner)
    }));
    let code = if r.ok() { 0 } else { FAILED };
    Ok(Output::ok(lines(text), serde_json::to_value(&r)?).with_code(code))
}
