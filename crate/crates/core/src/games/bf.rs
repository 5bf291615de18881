use serde::{Deserialize, Serialize};

use super::arena::{all_partial_isos, check_same_vocabulary, Arena, PartialIso, Side};
use super::ef::{extendable, EfGame};
use super::GameError;

/// A back-and-forth family. In graded form `I[k]` holds the positions from which
/// II is to survive `k` more rounds, so `I[0] ⊇ I[1] ⊇ ... ⊇ I[rounds]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BackAndForthFamily {
    Graded(Vec<Vec<PartialIsoDoc>>),
    Global(Vec<PartialIsoDoc>),
}

/// A partial isomorphism as a list of index pairs.
pub type PartialIsoDoc = Vec<(usize, usize)>;

impl BackAndForthFamily {
    pub fn graded(levels: Vec<Vec<PartialIso>>) -> Self {
        BackAndForthFamily::Graded(levels.into_iter().map(|l| l.iter().map(|f| f.pairs().to_vec()).collect()).collect())
    }

    pub fn global(j: Vec<PartialIso>) -> Self {
        BackAndForthFamily::Global(j.iter().map(|f| f.pairs().to_vec()).collect())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BfReport {
    pub valid: bool,
    pub violations: Vec<String>,
}

fn load(members: &[PartialIsoDoc]) -> Vec<PartialIso> {
    let mut v: Vec<PartialIso> = members.iter().map(|p| PartialIso::from_pairs(p.clone())).collect();
    v.sort();
    v.dedup();
    v
}

fn members_valid(
    left: &Arena,
    right: &Arena,
    base: Option<&PartialIso>,
    label: &str,
    members: &[PartialIso],
    out: &mut Vec<String>,
) {
    for f in members {
        if let Err(v) = f.check(left, right) {
            out.push(format!("(b) {label} member {:?} is not a partial isomorphism: {v}", f.pairs()));
        } else if let Some(b) = base {
            if !b.is_subset_of(f) {
                out.push(format!("(b) {label} member {:?} does not respect the constants", f.pairs()));
            }
        }
    }
}

fn forth_back(
    left: &Arena,
    right: &Arena,
    cap: usize,
    label: &str,
    next_label: &str,
    from: &[PartialIso],
    into: &[PartialIso],
    out: &mut Vec<String>,
) {
    for f in from {
        if f.check(left, right).is_err() {
            continue;
        }
        if let Some((side, set)) = extendable(left, right, f, cap, into) {
            let clause = if side == Side::Left { "(c)" } else { "(d)" };
            let what = if side == Side::Left { "dom" } else { "ran" };
            out.push(format!(
                "{clause} {label} member {:?} has no extension in {next_label} with {set:?} ⊆ {what}",
                f.pairs()
            ));
        }
    }
}

/// Checks nonemptiness, nesting, member validity, and forth (c) and back (d)
/// for every bounded target set of size at most `cap`.
pub fn bf_verify(family: &BackAndForthFamily, left: &Arena, right: &Arena, cap: usize) -> BfReport {
    let mut out = Vec::new();
    if check_same_vocabulary(left.m, right.m).is_err() {
        out.push("(b) the two structures have different vocabularies".to_string());
        return BfReport { valid: false, violations: out };
    }
    let base = PartialIso::base(left, right).ok();
    match family {
        BackAndForthFamily::Graded(levels) => {
            let levels: Vec<Vec<PartialIso>> = levels.iter().map(|l| load(l)).collect();
            if levels.is_empty() {
                out.push("(a) the family has no levels".to_string());
            }
            for (k, l) in levels.iter().enumerate() {
                if l.is_empty() {
                    out.push(format!("(a) I_{k} is empty"));
                }
                if k > 0 {
                    if let Some(f) = l.iter().find(|f| levels[k - 1].binary_search(f).is_err()) {
                        out.push(format!("(a) I_{k} is not contained in I_{}: {:?}", k - 1, f.pairs()));
                    }
                }
                members_valid(left, right, base.as_ref(), &format!("I_{k}"), l, &mut out);
            }
            for k in 1..levels.len() {
                forth_back(
                    left,
                    right,
                    cap,
                    &format!("I_{k}"),
                    &format!("I_{}", k - 1),
                    &levels[k],
                    &levels[k - 1],
                    &mut out,
                );
            }
        }
        BackAndForthFamily::Global(j) => {
            let j = load(j);
            if j.is_empty() {
                out.push("(a) J is empty".to_string());
            }
            members_valid(left, right, base.as_ref(), "J", &j, &mut out);
            forth_back(left, right, cap, "J", "J", &j, &j, &mut out);
        }
    }
    BfReport { valid: out.is_empty(), violations: out }
}

/// The graded family read off the solver: `I[k]` is every partial isomorphism
/// from which II survives `k` rounds. `None` when I wins.
pub fn bf_extract(
    left: &Arena,
    right: &Arena,
    rounds: usize,
    cap: usize,
) -> Result<Option<BackAndForthFamily>, GameError> {
    let mut game = EfGame::new(left, right, cap)?;
    let base = game.base().clone();
    if !game.ii_wins(&base, rounds) {
        return Ok(None);
    }
    let all = all_partial_isos(left, right, &base);
    let levels = (0..=rounds).map(|k| all.iter().filter(|f| game.ii_wins(f, k)).cloned().collect()).collect();
    Ok(Some(BackAndForthFamily::graded(levels)))
}

/// Greatest graded family, computed by refinement from all partial
/// isomorphisms without consulting the game solver. Every valid family is
/// contained in it level by level.
pub fn bf_maximal_graded(
    left: &Arena,
    right: &Arena,
    rounds: usize,
    cap: usize,
) -> Result<Vec<Vec<PartialIso>>, GameError> {
    check_same_vocabulary(left.m, right.m)?;
    let base = PartialIso::base(left, right).map_err(|v| GameError::Invalid(format!("constants: {v}")))?;
    let mut levels = vec![all_partial_isos(left, right, &base)];
    for k in 1..=rounds {
        let prev = &levels[k - 1];
        let next = prev.iter().filter(|f| extendable(left, right, f, cap, prev).is_none()).cloned().collect();
        levels.push(next);
    }
    Ok(levels)
}
