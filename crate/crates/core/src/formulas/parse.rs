use std::fmt;

use thiserror::Error;

use super::ast::{Formula, OmegaMatrix};
use crate::structures::Vocabulary;

/// Optional source position, rendered as a `line:col: ` prefix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct At(pub Option<(usize, usize)>);

impl fmt::Display for At {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some((l, c)) => write!(f, "{l}:{c}: "),
            None => Ok(()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{at}unknown symbol `{name}`")]
    UnknownSymbol { name: String, at: At },
    #[error("{at}arity mismatch for `{name}`: expected {expected}, found {found}")]
    Arity { name: String, expected: usize, found: usize, at: At },
    #[error("variable budget {budget} exceeded: {needed} variables needed")]
    Budget { needed: usize, budget: usize },
    #[error("outside PC fragment")]
    OutsidePcFragment,
    #[error("{0}")]
    Invalid(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    Word(String),
}

struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        let mut bump = |c: char| {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        };
        match c {
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump(c);
                    chars.next();
                }
            }
            '(' | ')' => {
                bump(c);
                chars.next();
                out.push(Token { tok: if c == '(' { Tok::Open } else { Tok::Close }, line: l0, col: c0 });
            }
            c if c.is_whitespace() => {
                bump(c);
                chars.next();
            }
            _ => {
                let mut w = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == '#' {
                        break;
                    }
                    w.push(c);
                    bump(c);
                    chars.next();
                }
                out.push(Token { tok: Tok::Word(w), line: l0, col: c0 });
            }
        }
    }
    out
}

const RESERVED: &[&str] = &["true", "false", "and", "or", "not", "exists", "forall", "exists-omega", "so-exists", "="];

/// Whether `name` can be printed and read back as a variable or symbol name.
pub fn is_plain_name(name: &str) -> bool {
    !name.is_empty()
        && !RESERVED.contains(&name)
        && !name.starts_with(':')
        && !name.chars().any(|c| c.is_whitespace() || c == '(' || c == ')' || c == '#')
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    eof: (usize, usize),
    vocab: Option<&'a Vocabulary>,
    sets: Vec<String>,
}

impl Parser<'_> {
    fn err<T>(&self, at: (usize, usize), msg: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Syntax { line: at.0, col: at.1, msg: msg.into() })
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.eof, |t| (t.line, t.col))
    }

    fn next(&mut self) -> Result<(Tok, (usize, usize)), FormulaError> {
        match self.toks.get(self.pos) {
            Some(t) => {
                self.pos += 1;
                Ok((t.tok.clone(), (t.line, t.col)))
            }
            None => self.err(self.eof, "unexpected end of input"),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn close(&mut self) -> Result<(), FormulaError> {
        match self.next()? {
            (Tok::Close, _) => Ok(()),
            (_, at) => self.err(at, "expected `)`"),
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, (usize, usize)), FormulaError> {
        match self.next()? {
            (Tok::Word(w), at) => Ok((w, at)),
            (_, at) => self.err(at, format!("expected {what}")),
        }
    }

    fn name(&mut self, what: &str) -> Result<String, FormulaError> {
        let (w, at) = self.word(what)?;
        if !is_plain_name(&w) {
            return self.err(at, format!("`{w}` is not a valid {what}"));
        }
        Ok(w)
    }

    fn term(&mut self) -> Result<String, FormulaError> {
        let at = self.here();
        let t = self.name("term")?;
        if self.sets.contains(&t) {
            return self.err(at, format!("set variable `{t}` used as a term"));
        }
        Ok(t)
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let (tok, at) = self.next()?;
        match tok {
            Tok::Word(w) if w == "true" => Ok(Formula::Bool(true)),
            Tok::Word(w) if w == "false" => Ok(Formula::Bool(false)),
            Tok::Word(w) => self.err(at, format!("expected formula, found `{w}`")),
            Tok::Close => self.err(at, "unexpected `)`"),
            Tok::Open => {
                let (head, hat) = self.word("operator or symbol")?;
                let f = self.compound(&head, at, hat)?;
                Ok(f)
            }
        }
    }

    fn compound(&mut self, head: &str, open: (usize, usize), hat: (usize, usize)) -> Result<Formula, FormulaError> {
        match head {
            "and" | "or" => {
                let mut fs = Vec::new();
                while self.peek().is_some() && self.peek() != Some(&Tok::Close) {
                    fs.push(self.formula()?);
                }
                self.close()?;
                if fs.is_empty() {
                    return self.err(open, "empty boolean list");
                }
                Ok(if head == "and" { Formula::And(fs) } else { Formula::Or(fs) })
            }
            "not" => {
                let f = self.formula()?;
                self.close()?;
                Ok(Formula::Not(Box::new(f)))
            }
            "exists" | "forall" => {
                let bat = self.here();
                match self.next()? {
                    (Tok::Open, _) => {}
                    (_, at) => return self.err(at, "expected variable block"),
                }
                let mut vars: Vec<String> = Vec::new();
                while self.peek().is_some() && self.peek() != Some(&Tok::Close) {
                    let vat = self.here();
                    let v = self.name("variable")?;
                    if vars.contains(&v) {
                        return self.err(vat, format!("duplicate variable `{v}`"));
                    }
                    vars.push(v);
                }
                self.close()?;
                if vars.is_empty() {
                    return self.err(bat, "empty variable block");
                }
                let shadowed: Vec<String> = vars.iter().filter(|v| self.sets.contains(v)).cloned().collect();
                if let Some(v) = shadowed.first() {
                    return self.err(bat, format!("set variable `{v}` used as a term"));
                }
                let body = self.formula()?;
                self.close()?;
                Ok(if head == "exists" {
                    Formula::Exists(vars, Box::new(body))
                } else {
                    Formula::Forall(vars, Box::new(body))
                })
            }
            "exists-omega" => {
                let scheme = self.name("scheme name")?;
                let (kw, kat) = self.word("`:step`")?;
                if kw != ":step" {
                    return self.err(kat, "expected `:step`");
                }
                let sat = self.here();
                let step = self.formula()?;
                if !step.is_quantifier_free() {
                    return self.err(sat, "omega matrix must be quantifier-free");
                }
                let mut side = None;
                if let Some(Tok::Word(w)) = self.peek() {
                    if w != ":side" {
                        let at = self.here();
                        return self.err(at, "expected `:side` or `)`");
                    }
                    self.pos += 1;
                    let sat = self.here();
                    let s = self.formula()?;
                    if !s.is_quantifier_free() {
                        return self.err(sat, "omega matrix must be quantifier-free");
                    }
                    side = Some(Box::new(s));
                }
                self.close()?;
                Ok(Formula::ExistsOmega(scheme, OmegaMatrix { step: Box::new(step), side }))
            }
            "so-exists" => {
                let x = self.name("set variable")?;
                self.sets.push(x.clone());
                let body = self.formula();
                self.sets.pop();
                let body = body?;
                self.close()?;
                Ok(Formula::SoExists(x, Box::new(body)))
            }
            "=" => {
                let a = self.term()?;
                let b = self.term()?;
                self.close()?;
                Ok(Formula::Eq(a, b))
            }
            _ if self.sets.iter().any(|s| s == head) => {
                let t = self.term()?;
                self.close()?;
                Ok(Formula::Mem(head.to_string(), t))
            }
            _ => {
                if !is_plain_name(head) {
                    return self.err(hat, format!("`{head}` is not a relation symbol"));
                }
                let mut args = Vec::new();
                while self.peek().is_some() && self.peek() != Some(&Tok::Close) {
                    args.push(self.term()?);
                }
                self.close()?;
                if let Some(v) = self.vocab {
                    let at = At(Some(hat));
                    match v.arity(head) {
                        None => return Err(FormulaError::UnknownSymbol { name: head.to_string(), at }),
                        Some(a) if a != args.len() => {
                            return Err(FormulaError::Arity {
                                name: head.to_string(),
                                expected: a,
                                found: args.len(),
                                at,
                            })
                        }
                        _ => {}
                    }
                }
                Ok(Formula::Atom(head.to_string(), args))
            }
        }
    }
}

fn parser<'a>(text: &str, vocab: Option<&'a Vocabulary>) -> Parser<'a> {
    let toks = lex(text);
    let lines: Vec<&str> = text.split('\n').collect();
    let eof = (lines.len(), lines.last().map_or(0, |l| l.chars().count()) + 1);
    Parser { toks, pos: 0, eof, vocab, sets: Vec::new() }
}

/// Parses exactly one formula.
pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    one(parser(text, None))
}

/// Parses one formula, checking symbols and arities against `vocab`.
pub fn parse_checked(text: &str, vocab: &Vocabulary) -> Result<Formula, FormulaError> {
    one(parser(text, Some(vocab)))
}

fn one(mut p: Parser<'_>) -> Result<Formula, FormulaError> {
    if p.toks.is_empty() {
        return p.err(p.eof, "no formula");
    }
    let f = p.formula()?;
    if p.pos < p.toks.len() {
        return p.err(p.here(), "trailing input after formula");
    }
    Ok(f)
}

/// Parses a formula file: any number of top-level forms.
pub fn parse_file(text: &str, vocab: Option<&Vocabulary>) -> Result<Vec<Formula>, FormulaError> {
    let mut p = parser(text, vocab);
    let mut out = Vec::new();
    while p.pos < p.toks.len() {
        out.push(p.formula()?);
    }
    Ok(out)
}

impl Formula {
    /// Symbol and arity check for formulas built in code.
    pub fn check(&self, vocab: &Vocabulary) -> Result<(), FormulaError> {
        let mut err = Ok(());
        self.visit(&mut |f| {
            if err.is_err() {
                return;
            }
            if let Formula::Atom(r, args) = f {
                err = match vocab.arity(r) {
                    None => Err(FormulaError::UnknownSymbol { name: r.clone(), at: At(None) }),
                    Some(a) if a != args.len() => {
                        Err(FormulaError::Arity { name: r.clone(), expected: a, found: args.len(), at: At(None) })
                    }
                    _ => Ok(()),
                };
            }
        });
        err
    }
}
