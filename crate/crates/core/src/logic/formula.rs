use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// A propositional variable. Ids start at 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    pub fn id(self) -> u32 {
        self.0
    }

    pub fn lit(self) -> i32 {
        self.0 as i32
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Issues fresh variables. Ids are strictly increasing and never reused.
#[derive(Clone, Debug, Default)]
pub struct VarPool {
    issued: u32,
    names: HashMap<u32, String>,
}

impl VarPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// A pool whose next fresh id is `issued + 1`.
    pub fn starting_after(issued: u32) -> Self {
        VarPool { issued, names: HashMap::new() }
    }

    pub fn fresh(&mut self) -> Var {
        self.issued += 1;
        Var(self.issued)
    }

    pub fn fresh_named(&mut self, name: impl Into<String>) -> Var {
        let v = self.fresh();
        self.names.insert(v.0, name.into());
        v
    }

    pub fn name(&self, v: Var) -> Option<&str> {
        self.names.get(&v.0).map(String::as_str)
    }

    /// Number of variables issued so far (also the largest id).
    pub fn len(&self) -> u32 {
        self.issued
    }

    pub fn is_empty(&self) -> bool {
        self.issued == 0
    }
}

#[derive(Debug, PartialEq, Eq)]
pub enum Node {
    True,
    False,
    Var(Var),
    Not(Formula),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Formula, Formula),
    Iff(Formula, Formula),
    Xor(Formula, Formula),
}

/// Shared, immutable formula DAG. Cloning is cheap and keeps node identity,
/// which the CNF conversion uses to define each shared subformula once.
///
/// The constructors on `Formula` fold constants as they build; use
/// [`Formula::node`] to build a node verbatim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula(Arc<Node>);

impl Formula {
    pub fn node(n: Node) -> Formula {
        Formula(Arc::new(n))
    }

    pub fn get(&self) -> &Node {
        &self.0
    }

    pub(crate) fn ptr(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    /// Identity of nodes, or equality of variables.
    fn same(&self, other: &Formula) -> bool {
        match (self.get(), other.get()) {
            (Node::Var(a), Node::Var(b)) => a == b,
            _ => self.ptr() == other.ptr(),
        }
    }

    pub fn tru() -> Formula {
        Formula::node(Node::True)
    }

    pub fn fls() -> Formula {
        Formula::node(Node::False)
    }

    pub fn constant(b: bool) -> Formula {
        if b {
            Formula::tru()
        } else {
            Formula::fls()
        }
    }

    pub fn var(v: Var) -> Formula {
        Formula::node(Node::Var(v))
    }

    pub fn is_true(&self) -> bool {
        matches!(self.get(), Node::True)
    }

    pub fn is_false(&self) -> bool {
        matches!(self.get(), Node::False)
    }

    pub fn as_const(&self) -> Option<bool> {
        match self.get() {
            Node::True => Some(true),
            Node::False => Some(false),
            _ => None,
        }
    }

    pub fn not(&self) -> Formula {
        match self.get() {
            Node::True => Formula::fls(),
            Node::False => Formula::tru(),
            Node::Not(inner) => inner.clone(),
            _ => Formula::node(Node::Not(self.clone())),
        }
    }

    pub fn and(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut kept = Vec::new();
        for f in items {
            match f.get() {
                Node::False => return Formula::fls(),
                Node::True => {}
                _ => kept.push(f),
            }
        }
        match kept.len() {
            0 => Formula::tru(),
            1 => kept.pop().unwrap(),
            _ => Formula::node(Node::And(kept)),
        }
    }

    pub fn or(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut kept = Vec::new();
        for f in items {
            match f.get() {
                Node::True => return Formula::tru(),
                Node::False => {}
                _ => kept.push(f),
            }
        }
        match kept.len() {
            0 => Formula::fls(),
            1 => kept.pop().unwrap(),
            _ => Formula::node(Node::Or(kept)),
        }
    }

    pub fn and2(a: &Formula, b: &Formula) -> Formula {
        Formula::and([a.clone(), b.clone()])
    }

    pub fn or2(a: &Formula, b: &Formula) -> Formula {
        Formula::or([a.clone(), b.clone()])
    }

    pub fn implies(a: &Formula, b: &Formula) -> Formula {
        match (a.as_const(), b.as_const()) {
            (Some(false), _) | (_, Some(true)) => Formula::tru(),
            (Some(true), _) => b.clone(),
            (_, Some(false)) => a.not(),
            _ => Formula::node(Node::Implies(a.clone(), b.clone())),
        }
    }

    pub fn iff(a: &Formula, b: &Formula) -> Formula {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Formula::constant(x == y),
            (Some(true), _) => b.clone(),
            (Some(false), _) => b.not(),
            (_, Some(true)) => a.clone(),
            (_, Some(false)) => a.not(),
            _ if a.same(b) => Formula::tru(),
            _ => Formula::node(Node::Iff(a.clone(), b.clone())),
        }
    }

    pub fn xor(a: &Formula, b: &Formula) -> Formula {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Formula::constant(x != y),
            (Some(false), _) => b.clone(),
            (Some(true), _) => b.not(),
            (_, Some(false)) => a.clone(),
            (_, Some(true)) => a.not(),
            _ if a.same(b) => Formula::fls(),
            _ => Formula::node(Node::Xor(a.clone(), b.clone())),
        }
    }

    pub fn eval(&self, assignment: &dyn Fn(Var) -> bool) -> bool {
        match self.get() {
            Node::True => true,
            Node::False => false,
            Node::Var(v) => assignment(*v),
            Node::Not(f) => !f.eval(assignment),
            Node::And(fs) => fs.iter().all(|f| f.eval(assignment)),
            Node::Or(fs) => fs.iter().any(|f| f.eval(assignment)),
            Node::Implies(a, b) => !a.eval(assignment) || b.eval(assignment),
            Node::Iff(a, b) => a.eval(assignment) == b.eval(assignment),
            Node::Xor(a, b) => a.eval(assignment) != b.eval(assignment),
        }
    }

    /// Variables occurring in the formula, sorted.
    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut seen = std::collections::HashSet::new();
        self.collect_vars(&mut out, &mut seen);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>, seen: &mut std::collections::HashSet<usize>) {
        if !seen.insert(self.ptr()) {
            return;
        }
        match self.get() {
            Node::True | Node::False => {}
            Node::Var(v) => out.push(*v),
            Node::Not(f) => f.collect_vars(out, seen),
            Node::And(fs) | Node::Or(fs) => fs.iter().for_each(|f| f.collect_vars(out, seen)),
            Node::Implies(a, b) | Node::Iff(a, b) | Node::Xor(a, b) => {
                a.collect_vars(out, seen);
                b.collect_vars(out, seen);
            }
        }
    }

    /// Number of distinct nodes in the DAG.
    pub fn node_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![self.clone()];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.ptr()) {
                continue;
            }
            match f.get() {
                Node::True | Node::False | Node::Var(_) => {}
                Node::Not(a) => stack.push(a.clone()),
                Node::And(fs) | Node::Or(fs) => stack.extend(fs.iter().cloned()),
                Node::Implies(a, b) | Node::Iff(a, b) | Node::Xor(a, b) => {
                    stack.push(a.clone());
                    stack.push(b.clone());
                }
            }
        }
        seen.len()
    }
}

/// Constant propagation over the whole DAG: absorbs `True`/`False`, removes
/// double negation and collapses unit conjunctions and disjunctions.
pub fn simplify(f: &Formula) -> Formula {
    let mut memo = HashMap::new();
    simp(f, &mut memo)
}

fn simp(f: &Formula, memo: &mut HashMap<usize, Formula>) -> Formula {
    if let Some(r) = memo.get(&f.ptr()) {
        return r.clone();
    }
    let r = match f.get() {
        Node::True | Node::False | Node::Var(_) => f.clone(),
        Node::Not(a) => simp(a, memo).not(),
        Node::And(fs) => Formula::and(fs.iter().map(|a| simp(a, memo)).collect::<Vec<_>>()),
        Node::Or(fs) => Formula::or(fs.iter().map(|a| simp(a, memo)).collect::<Vec<_>>()),
        Node::Implies(a, b) => Formula::implies(&simp(a, memo), &simp(b, memo)),
        Node::Iff(a, b) => Formula::iff(&simp(a, memo), &simp(b, memo)),
        Node::Xor(a, b) => Formula::xor(&simp(a, memo), &simp(b, memo)),
    };
    memo.insert(f.ptr(), r.clone());
    r
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.get() {
            Node::True => f.write_str("T"),
            Node::False => f.write_str("F"),
            Node::Var(v) => write!(f, "{v}"),
            Node::Not(a) => write!(f, "!{a}"),
            Node::And(fs) | Node::Or(fs) => {
                let op = if matches!(self.get(), Node::And(_)) { " & " } else { " | " };
                f.write_str("(")?;
                for (i, a) in fs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(op)?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Node::Implies(a, b) => write!(f, "({a} -> {b})"),
            Node::Iff(a, b) => write!(f, "({a} <-> {b})"),
            Node::Xor(a, b) => write!(f, "({a} ^ {b})"),
        }
    }
}
