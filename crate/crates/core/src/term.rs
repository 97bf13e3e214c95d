//! First-order terms, rewrite rules and the syntactic measures the
//! encodings are built from.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

/// A function symbol together with its arity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<Arc<str>>, arity: usize) -> Self {
        let name = name.into();
        assert!(!name.is_empty(), "symbol names must be nonempty");
        Symbol { name, arity }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_constant(&self) -> bool {
        self.arity == 0
    }

    pub fn is_unary(&self) -> bool {
        self.arity == 1
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Arc<str>),
    App(Symbol, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<Arc<str>>) -> Term {
        Term::Var(name.into())
    }

    /// Applies the symbol `name` to `args`; the arity is taken from `args`.
    pub fn app(name: impl Into<Arc<str>>, args: Vec<Term>) -> Term {
        let sym = Symbol::new(name, args.len());
        Term::App(sym, args)
    }

    pub fn constant(name: impl Into<Arc<str>>) -> Term {
        Term::app(name, Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    /// `|t|`: number of symbol and variable occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    pub fn var_count(&self, x: &str) -> usize {
        match self {
            Term::Var(y) => usize::from(&**y == x),
            Term::App(_, args) => args.iter().map(|a| a.var_count(x)).sum(),
        }
    }

    pub fn symbol_count(&self, f: &Symbol) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(g, args) => {
                usize::from(g == f) + args.iter().map(|a| a.symbol_count(f)).sum::<usize>()
            }
        }
    }

    /// Occurrence counts of every variable and symbol in the term.
    pub fn tokens(&self) -> Multiset {
        let mut m = Multiset::new();
        self.add_tokens(&mut m);
        m
    }

    fn add_tokens(&self, m: &mut Multiset) {
        match self {
            Term::Var(x) => *m.entry(Token::Var(x.clone())).or_insert(0) += 1,
            Term::App(f, args) => {
                *m.entry(Token::Sym(f.clone())).or_insert(0) += 1;
                for a in args {
                    a.add_tokens(m);
                }
            }
        }
    }

    pub fn variables(&self) -> Vec<Arc<str>> {
        let mut out = Vec::new();
        self.walk(&mut |t| {
            if let Term::Var(x) = t {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn walk(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for a in self.args() {
            a.walk(f);
        }
    }

    /// True iff `self` is a nonempty tower of unary symbols over the variable `x`.
    pub fn is_unary_tower_over(&self, x: &Term) -> bool {
        let mut cur = self;
        let mut height = 0;
        loop {
            match cur {
                Term::Var(_) => return height > 0 && cur == x,
                Term::App(f, args) if f.is_unary() => {
                    cur = &args[0];
                    height += 1;
                }
                Term::App(..) => return false,
            }
        }
    }

    /// Strict homeomorphic embedding: `other` arises from `self` by deleting
    /// at least one symbol occurrence.
    pub fn embeds(&self, other: &Term) -> bool {
        self != other && embeds_or_equal(self, other)
    }
}

fn embeds_or_equal(s: &Term, t: &Term) -> bool {
    match (s, t) {
        (Term::Var(x), Term::Var(y)) => x == y,
        (Term::Var(_), Term::App(..)) => false,
        (Term::App(f, ss), _) => {
            if ss.iter().any(|si| embeds_or_equal(si, t)) {
                return true;
            }
            match t {
                Term::App(g, ts) if f == g => ss.iter().zip(ts).all(|(si, ti)| embeds_or_equal(si, ti)),
                _ => false,
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::App(g, args) if args.is_empty() => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A variable or a function symbol, kept apart so that a variable and a
/// symbol sharing a name never merge.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Token {
    Var(Arc<str>),
    Sym(Symbol),
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Var(x) => f.write_str(x),
            Token::Sym(s) => write!(f, "{s}"),
        }
    }
}

pub type Multiset = BTreeMap<Token, usize>;

/// Removes every token occurrence shared by `l` and `r` and returns the two
/// residual multisets. For each token at most one residual is nonzero.
pub fn cancel_common(l: &Term, r: &Term) -> (Multiset, Multiset) {
    let left = l.tokens();
    let right = r.tokens();
    let mut res_l = Multiset::new();
    let mut res_r = Multiset::new();
    for (tok, &n) in &left {
        let m = right.get(tok).copied().unwrap_or(0);
        if n > m {
            res_l.insert(tok.clone(), n - m);
        }
    }
    for (tok, &m) in &right {
        let n = left.get(tok).copied().unwrap_or(0);
        if m > n {
            res_r.insert(tok.clone(), m - n);
        }
    }
    (res_l, res_r)
}

/// `|s|_x >= |t|_x` for every variable `x`.
pub fn variable_condition(s: &Term, t: &Term) -> bool {
    t.variables().iter().all(|x| s.var_count(x) >= t.var_count(x))
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Rule { lhs, rhs }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    Term,
    String,
}

/// A rewrite system together with its derived signature.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trs {
    rules: Vec<Rule>,
    signature: Vec<Symbol>,
    kind: SystemKind,
}

impl Trs {
    /// Builds a system and derives its signature in order of first
    /// occurrence. Fails if one name is used with two arities.
    pub fn new(rules: Vec<Rule>, kind: SystemKind) -> Result<Self, ArityConflict> {
        let mut signature: Vec<Symbol> = Vec::new();
        for rule in &rules {
            for side in [&rule.lhs, &rule.rhs] {
                let mut err = None;
                side.walk(&mut |t| {
                    if let Term::App(f, _) = t {
                        match signature.iter().find(|g| g.name() == f.name()) {
                            Some(g) if g.arity() != f.arity() && err.is_none() => {
                                err = Some(ArityConflict {
                                    symbol: f.name().to_string(),
                                    first: g.arity(),
                                    second: f.arity(),
                                })
                            }
                            Some(_) => {}
                            None => signature.push(f.clone()),
                        }
                    }
                });
                if let Some(e) = err {
                    return Err(e);
                }
            }
        }
        Ok(Trs { rules, signature, kind })
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn signature(&self) -> &[Symbol] {
        &self.signature
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn symbol(&self, name: &str) -> Option<&Symbol> {
        self.signature.iter().find(|s| s.name() == name)
    }

    pub fn variables(&self) -> Vec<Arc<str>> {
        let mut out: Vec<Arc<str>> = Vec::new();
        for r in &self.rules {
            for x in r.lhs.variables().into_iter().chain(r.rhs.variables()) {
                if !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("symbol `{symbol}` used with {first} and {second} arguments")]
pub struct ArityConflict {
    pub symbol: String,
    pub first: usize,
    pub second: usize,
}

impl fmt::Display for Trs {
    /// Renders the system in TPDB plain syntax.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SystemKind::Term => {
                f.write_str("(VAR")?;
                for x in self.variables() {
                    write!(f, " {x}")?;
                }
                f.write_str(")\n(RULES\n")?;
                for r in &self.rules {
                    writeln!(f, "  {r}")?;
                }
                f.write_str(")\n")
            }
            SystemKind::String => {
                f.write_str("(RULES\n")?;
                for (i, r) in self.rules.iter().enumerate() {
                    let sep = if i + 1 < self.rules.len() { "," } else { "" };
                    writeln!(f, "  {} -> {}{sep}", word(&r.lhs).join(" "), word(&r.rhs).join(" "))?;
                }
                f.write_str(")\n")
            }
        }
    }
}

/// Letters of a unary term read outermost first.
fn word(t: &Term) -> Vec<&str> {
    let mut out = Vec::new();
    let mut cur = t;
    while let Term::App(f, args) = cur {
        out.push(f.name());
        match args.first() {
            Some(a) => cur = a,
            None => break,
        }
    }
    out
}
