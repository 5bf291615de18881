use std::collections::BTreeSet;
use std::fmt;

/// Matrix of an ω block: `step` relates `s0 = x_i` to `s1 = x_{i+1}`, `side` constrains `x_0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OmegaMatrix {
    pub step: Box<Formula>,
    pub side: Option<Box<Formula>>,
}

/// Terms are names: a bound variable, a constant of the structure, or a free variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Bool(bool),
    Atom(String, Vec<String>),
    Eq(String, String),
    /// Membership in a second-order set variable.
    Mem(String, String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Exists(Vec<String>, Box<Formula>),
    Forall(Vec<String>, Box<Formula>),
    ExistsOmega(String, OmegaMatrix),
    SoExists(String, Box<Formula>),
}

use Formula::*;

pub fn atom(rel: &str, args: &[&str]) -> Formula {
    Atom(rel.to_string(), args.iter().map(|s| s.to_string()).collect())
}

pub fn eq(a: &str, b: &str) -> Formula {
    Eq(a.to_string(), b.to_string())
}

pub fn not(f: Formula) -> Formula {
    Not(Box::new(f))
}

/// Conjunction; a single member is returned as is, no members give `true`.
pub fn and(mut fs: Vec<Formula>) -> Formula {
    match fs.len() {
        0 => Bool(true),
        1 => fs.pop().unwrap(),
        _ => And(fs),
    }
}

/// Disjunction; a single member is returned as is, no members give `false`.
pub fn or(mut fs: Vec<Formula>) -> Formula {
    match fs.len() {
        0 => Bool(false),
        1 => fs.pop().unwrap(),
        _ => Or(fs),
    }
}

pub fn implies(a: Formula, b: Formula) -> Formula {
    Or(vec![not(a), b])
}

pub fn iff(a: Formula, b: Formula) -> Formula {
    And(vec![implies(a.clone(), b.clone()), implies(b, a)])
}

pub fn exists(vars: &[&str], body: Formula) -> Formula {
    Exists(vars.iter().map(|s| s.to_string()).collect(), Box::new(body))
}

pub fn forall(vars: &[&str], body: Formula) -> Formula {
    Forall(vars.iter().map(|s| s.to_string()).collect(), Box::new(body))
}

/// `∃x_0 x_1 ... ⋀_i x_{i+1} < x_i`: an infinite descending sequence inside one level.
pub fn descending_omega(order: &str) -> Formula {
    ExistsOmega("s".into(), OmegaMatrix { step: Box::new(atom(order, &["s1", "s0"])), side: None })
}

/// Names `s0`, `s1` standing for `x_i`, `x_{i+1}` in an ω matrix with scheme `s`.
pub fn omega_vars(scheme: &str) -> (String, String) {
    (format!("{scheme}0"), format!("{scheme}1"))
}

impl Formula {
    /// Atomic 0; negation keeps rank; booleans take the max; each block adds one.
    pub fn rank(&self) -> usize {
        match self {
            Bool(_) | Atom(..) | Eq(..) | Mem(..) => 0,
            Not(f) => f.rank(),
            And(fs) | Or(fs) => fs.iter().map(Formula::rank).max().unwrap_or(0),
            Exists(_, f) | Forall(_, f) | SoExists(_, f) => 1 + f.rank(),
            ExistsOmega(_, m) => 1 + m.step.rank().max(m.side.as_ref().map_or(0, |s| s.rank())),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Bool(_) | Atom(..) | Eq(..) | Mem(..) => true,
            Not(f) => f.is_quantifier_free(),
            And(fs) | Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            _ => false,
        }
    }

    /// No ω blocks, second-order blocks or set membership.
    pub fn in_finite_fragment(&self) -> bool {
        match self {
            Bool(_) | Atom(..) | Eq(..) => true,
            Mem(..) | ExistsOmega(..) | SoExists(..) => false,
            Not(f) | Exists(_, f) | Forall(_, f) => f.in_finite_fragment(),
            And(fs) | Or(fs) => fs.iter().all(Formula::in_finite_fragment),
        }
    }

    /// Widest tuple block.
    pub fn width(&self) -> usize {
        match self {
            Bool(_) | Atom(..) | Eq(..) | Mem(..) => 0,
            Not(f) | SoExists(_, f) => f.width(),
            And(fs) | Or(fs) => fs.iter().map(Formula::width).max().unwrap_or(0),
            Exists(v, f) | Forall(v, f) => v.len().max(f.width()),
            ExistsOmega(..) => 0,
        }
    }

    /// Names occurring in term position that no quantifier binds (constants included).
    pub fn free_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &String, bound: &Vec<String>| {
            if !bound.contains(t) {
                out.insert(t.clone());
            }
        };
        match self {
            Bool(_) => {}
            Atom(_, args) => args.iter().for_each(|a| term(a, bound)),
            Eq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Mem(_, t) => term(t, bound),
            Not(f) | SoExists(_, f) => f.collect_free(bound, out),
            And(fs) | Or(fs) => fs.iter().for_each(|f| f.collect_free(bound, out)),
            Exists(vs, f) | Forall(vs, f) => {
                let n = bound.len();
                bound.extend(vs.iter().cloned());
                f.collect_free(bound, out);
                bound.truncate(n);
            }
            ExistsOmega(s, m) => {
                let (a, b) = omega_vars(s);
                let n = bound.len();
                bound.push(a);
                bound.push(b);
                m.step.collect_free(bound, out);
                if let Some(side) = &m.side {
                    side.collect_free(bound, out);
                }
                bound.truncate(n);
            }
        }
    }

    /// Relation symbols with the arities they are used at.
    pub fn symbols(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Atom(r, args) = f {
                out.insert((r.clone(), args.len()));
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        match self {
            Not(g) | Exists(_, g) | Forall(_, g) | SoExists(_, g) => g.visit(f),
            And(gs) | Or(gs) => gs.iter().for_each(|g| g.visit(f)),
            ExistsOmega(_, m) => {
                m.step.visit(f);
                if let Some(s) = &m.side {
                    s.visit(f);
                }
            }
            _ => {}
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, items: &[String]) -> fmt::Result {
    for (i, v) in items.iter().enumerate() {
        if i > 0 {
            write!(f, " ")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bool(true) => write!(f, "true"),
            Bool(false) => write!(f, "false"),
            Atom(r, args) => {
                write!(f, "({r}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                write!(f, ")")
            }
            Mem(x, t) => write!(f, "({x} {t})"),
            Eq(a, b) => write!(f, "(= {a} {b})"),
            Not(g) => write!(f, "(not {g})"),
            And(gs) | Or(gs) => {
                write!(f, "({}", if matches!(self, And(_)) { "and" } else { "or" })?;
                for g in gs {
                    write!(f, " {g}")?;
                }
                write!(f, ")")
            }
            Exists(vs, g) | Forall(vs, g) => {
                write!(f, "({} (", if matches!(self, Exists(..)) { "exists" } else { "forall" })?;
                write_list(f, vs)?;
                write!(f, ") {g})")
            }
            ExistsOmega(s, m) => {
                write!(f, "(exists-omega {s} :step {}", m.step)?;
                if let Some(side) = &m.side {
                    write!(f, " :side {side}")?;
                }
                write!(f, ")")
            }
            SoExists(x, g) => write!(f, "(so-exists {x} {g})"),
        }
    }
}
