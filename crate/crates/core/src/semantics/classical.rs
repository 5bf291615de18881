use std::collections::{BTreeMap, BTreeSet};

use super::SemanticsError;
use crate::formulas::Formula;
use crate::structures::{FilteredFiniteModel, FiniteStructure};

struct Ctx<'a> {
    m: &'a FiniteStructure,
    /// When present, tuple quantifiers range over tuples inside one level.
    levels: Option<&'a [BTreeSet<usize>]>,
}

impl Ctx<'_> {
    fn term(&self, t: &str, env: &[(String, usize)]) -> Result<usize, SemanticsError> {
        if let Some((_, e)) = env.iter().rev().find(|(v, _)| v == t) {
            return Ok(*e);
        }
        self.m.consts.get(t).copied().ok_or_else(|| SemanticsError::Unbound(t.to_string()))
    }

    fn bounded(&self, tuple: &[usize]) -> bool {
        match self.levels {
            None => true,
            Some(ls) => ls.iter().any(|l| tuple.iter().all(|e| l.contains(e))),
        }
    }

    /// Whether some bounded tuple gives `body` the value `want`.
    fn witness(
        &self,
        vs: &[String],
        body: &Formula,
        want: bool,
        env: &mut Vec<(String, usize)>,
    ) -> Result<bool, SemanticsError> {
        let n = self.m.size();
        if n == 0 {
            return Ok(false);
        }
        let mut idx = vec![0usize; vs.len()];
        loop {
            if self.bounded(&idx) {
                let base = env.len();
                env.extend(vs.iter().cloned().zip(idx.iter().copied()));
                let r = self.eval(body, env);
                env.truncate(base);
                if r? == want {
                    return Ok(true);
                }
            }
            if !crate::structures::bump(&mut idx, n) {
                return Ok(false);
            }
        }
    }

    fn eval(&self, f: &Formula, env: &mut Vec<(String, usize)>) -> Result<bool, SemanticsError> {
        Ok(match f {
            Formula::Bool(b) => *b,
            Formula::Atom(r, args) => {
                let t: Vec<usize> = args.iter().map(|a| self.term(a, env)).collect::<Result<_, _>>()?;
                self.m.holds(r, &t)
            }
            Formula::Eq(a, b) => self.term(a, env)? == self.term(b, env)?,
            Formula::Not(g) => !self.eval(g, env)?,
            Formula::And(gs) => {
                for g in gs {
                    if !self.eval(g, env)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.eval(g, env)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Exists(vs, g) => self.witness(vs, g, true, env)?,
            Formula::Forall(vs, g) => !self.witness(vs, g, false, env)?,
            Formula::Mem(..) => return Err(SemanticsError::Fragment("set membership")),
            Formula::ExistsOmega(..) => return Err(SemanticsError::Fragment("omega block")),
            Formula::SoExists(..) => return Err(SemanticsError::Fragment("second-order block")),
        })
    }
}

fn run(
    m: &FiniteStructure,
    levels: Option<&[BTreeSet<usize>]>,
    f: &Formula,
    assignment: &BTreeMap<String, usize>,
) -> Result<bool, SemanticsError> {
    if let Some((v, &e)) = assignment.iter().find(|(_, &e)| e >= m.size()) {
        return Err(SemanticsError::Invalid(format!("`{v}` assigned to {e}, outside the universe")));
    }
    let mut env: Vec<(String, usize)> = assignment.iter().map(|(k, v)| (k.clone(), *v)).collect();
    Ctx { m, levels }.eval(f, &mut env)
}

/// Tarskian truth; names resolve to assigned variables first, then constants.
pub fn eval_classical(
    m: &FiniteStructure,
    f: &Formula,
    assignment: &BTreeMap<String, usize>,
) -> Result<bool, SemanticsError> {
    run(m, None, f, assignment)
}

pub fn eval_sentence(m: &FiniteStructure, f: &Formula) -> Result<bool, SemanticsError> {
    run(m, None, f, &BTreeMap::new())
}

/// Chain truth over the levels of `fm` with an assignment of the free variables.
pub fn eval_filtered(
    fm: &FilteredFiniteModel,
    f: &Formula,
    assignment: &BTreeMap<String, usize>,
) -> Result<bool, SemanticsError> {
    run(&fm.base, Some(&fm.filtration), f, assignment)
}

/// Chain truth of a sentence: each tuple quantifier ranges over tuples inside a single level.
pub fn eval_chain_finite(fm: &FilteredFiniteModel, f: &Formula) -> Result<bool, SemanticsError> {
    let free: Vec<String> = f.free_names().into_iter().filter(|n| !fm.base.consts.contains_key(n)).collect();
    if !free.is_empty() {
        return Err(SemanticsError::FreeVariables(free));
    }
    run(&fm.base, Some(&fm.filtration), f, &BTreeMap::new())
}
