use std::collections::HashMap;
use std::fmt::Write as _;

use super::formula::{Formula, Node, VarPool};

/// Clauses over signed DIMACS literals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub clauses: Vec<Vec<i32>>,
    pub num_vars: u32,
}

impl Cnf {
    pub fn new(num_vars: u32) -> Self {
        Cnf { clauses: Vec::new(), num_vars }
    }

    pub fn add(&mut self, clause: Vec<i32>) {
        for &l in &clause {
            debug_assert!(l != 0 && l.unsigned_abs() <= self.num_vars);
        }
        self.clauses.push(clause);
    }

    pub fn satisfied_by(&self, value: &dyn Fn(u32) -> bool) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|&l| value(l.unsigned_abs()) == (l > 0)))
    }
}

/// Equisatisfiable CNF with one definition variable per shared non-literal
/// node and full biconditional definitions. Fresh variables come from
/// `pool`, so ids stay disjoint from everything issued before.
pub fn tseitin(f: &Formula, pool: &mut VarPool) -> Cnf {
    let mut t = Tseitin { pool, clauses: Vec::new(), memo: HashMap::new(), truth: None };
    match f.as_const() {
        Some(true) => {}
        Some(false) => t.clauses.push(Vec::new()),
        None => {
            let root = t.lit(f);
            t.clauses.push(vec![root]);
        }
    }
    Cnf { clauses: t.clauses, num_vars: t.pool.len() }
}

struct Tseitin<'a> {
    pool: &'a mut VarPool,
    clauses: Vec<Vec<i32>>,
    memo: HashMap<usize, i32>,
    truth: Option<i32>,
}

impl Tseitin<'_> {
    fn lit(&mut self, f: &Formula) -> i32 {
        if let Some(&l) = self.memo.get(&f.ptr()) {
            return l;
        }
        let l = match f.get() {
            Node::Var(v) => v.lit(),
            Node::Not(a) => -self.lit(a),
            Node::True => self.truth(),
            Node::False => -self.truth(),
            Node::And(fs) => {
                let ls: Vec<i32> = fs.iter().map(|a| self.lit(a)).collect();
                let d = self.pool.fresh().lit();
                let mut long = vec![d];
                for &l in &ls {
                    self.clauses.push(vec![-d, l]);
                    long.push(-l);
                }
                self.clauses.push(long);
                d
            }
            Node::Or(fs) => {
                let ls: Vec<i32> = fs.iter().map(|a| self.lit(a)).collect();
                let d = self.pool.fresh().lit();
                let mut long = vec![-d];
                for &l in &ls {
                    self.clauses.push(vec![d, -l]);
                    long.push(l);
                }
                self.clauses.push(long);
                d
            }
            Node::Implies(a, b) => {
                let (a, b) = (self.lit(a), self.lit(b));
                let d = self.pool.fresh().lit();
                self.clauses.push(vec![-d, -a, b]);
                self.clauses.push(vec![d, a]);
                self.clauses.push(vec![d, -b]);
                d
            }
            Node::Iff(a, b) => {
                let (a, b) = (self.lit(a), self.lit(b));
                let d = self.pool.fresh().lit();
                self.clauses.push(vec![-d, -a, b]);
                self.clauses.push(vec![-d, a, -b]);
                self.clauses.push(vec![d, a, b]);
                self.clauses.push(vec![d, -a, -b]);
                d
            }
            Node::Xor(a, b) => {
                let (a, b) = (self.lit(a), self.lit(b));
                let d = self.pool.fresh().lit();
                self.clauses.push(vec![-d, a, b]);
                self.clauses.push(vec![-d, -a, -b]);
                self.clauses.push(vec![d, -a, b]);
                self.clauses.push(vec![d, a, -b]);
                d
            }
        };
        self.memo.insert(f.ptr(), l);
        l
    }

    fn truth(&mut self) -> i32 {
        if let Some(t) = self.truth {
            return t;
        }
        let t = self.pool.fresh().lit();
        self.clauses.push(vec![t]);
        self.truth = Some(t);
        t
    }
}

pub fn to_dimacs(c: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", c.num_vars, c.clauses.len());
    for clause in &c.clauses {
        for l in clause {
            write!(out, "{l} ").unwrap();
        }
        out.push_str("0\n");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimacsError {
    #[error("line {0}: missing or malformed `p cnf` header")]
    Header(usize),
    #[error("line {line}: bad literal `{token}`")]
    Literal { line: usize, token: String },
    #[error("literal {0} exceeds the declared variable count")]
    OutOfRange(i32),
    #[error("last clause is not terminated by 0")]
    Unterminated,
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut cnf: Option<Cnf> = None;
    let mut current = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(DimacsError::Header(i + 1));
            }
            let num_vars = parts[2].parse().map_err(|_| DimacsError::Header(i + 1))?;
            cnf = Some(Cnf::new(num_vars));
            continue;
        }
        let Some(cnf) = cnf.as_mut() else {
            return Err(DimacsError::Header(i + 1));
        };
        for tok in line.split_whitespace() {
            let l: i32 = tok
                .parse()
                .map_err(|_| DimacsError::Literal { line: i + 1, token: tok.to_string() })?;
            if l == 0 {
                cnf.clauses.push(std::mem::take(&mut current));
            } else if l.unsigned_abs() > cnf.num_vars {
                return Err(DimacsError::OutOfRange(l));
            } else {
                current.push(l);
            }
        }
    }
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    cnf.ok_or(DimacsError::Header(0))
}
