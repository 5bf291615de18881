use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelSym {
    pub name: String,
    pub arity: usize,
}

/// Relational vocabulary with constants and an optional distinguished order symbol.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Vocabulary {
    pub relations: Vec<RelSym>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constants: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<String>,
}

impl Vocabulary {
    pub fn new(relations: &[(&str, usize)]) -> Self {
        Vocabulary {
            relations: relations.iter().map(|(n, a)| RelSym { name: n.to_string(), arity: *a }).collect(),
            constants: Vec::new(),
            order: None,
        }
    }

    /// The vocabulary `{<}` with `<` flagged as the order symbol.
    pub fn order(name: &str) -> Self {
        let mut v = Vocabulary::new(&[(name, 2)]);
        v.order = Some(name.to_string());
        v
    }

    pub fn with_constants(mut self, names: &[&str]) -> Self {
        self.constants.extend(names.iter().map(|s| s.to_string()));
        self
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.relations.iter().find(|r| r.name == name).map(|r| r.arity)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c == name)
    }

    /// Adds fresh unary predicates; names already present are left alone.
    pub fn with_unary(&self, names: &[String]) -> Vocabulary {
        let mut v = self.clone();
        for n in names {
            if v.arity(n).is_none() {
                v.relations.push(RelSym { name: n.clone(), arity: 1 });
            }
        }
        v
    }

    /// Invariant violations: duplicate names, zero arities, a bad order flag.
    pub fn check(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for r in &self.relations {
            if !seen.insert(r.name.as_str()) {
                out.push(format!("duplicate symbol `{}`", r.name));
            }
            if r.arity == 0 {
                out.push(format!("symbol `{}` has arity 0", r.name));
            }
        }
        for c in &self.constants {
            if !seen.insert(c.as_str()) {
                out.push(format!("duplicate symbol `{c}`"));
            }
        }
        if let Some(o) = &self.order {
            match self.arity(o) {
                Some(2) => {}
                Some(_) => out.push(format!("order symbol `{o}` is not binary")),
                None => out.push(format!("order symbol `{o}` is not a relation")),
            }
        }
        out
    }
}
