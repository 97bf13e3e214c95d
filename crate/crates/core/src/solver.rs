//! Conflict-driven clause learning SAT solver.
//!
//! Two watched literals, first-UIP learning, VSIDS-style activities with
//! lowest-id tie breaking, phase saving (initial phase false) and Luby
//! restarts. Runs are deterministic for a given clause list.

use std::ops::Not;
use std::time::Instant;

use crate::logic::Cnf;

/// A total assignment, indexed by variable id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model {
    values: Vec<bool>,
}

impl Model {
    /// `values[i]` is the value of variable `i + 1`.
    pub fn from_values(values: Vec<bool>) -> Self {
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(false);
        v.extend(values);
        Model { values: v }
    }

    pub fn value(&self, var: u32) -> bool {
        self.values.get(var as usize).copied().unwrap_or(false)
    }

    pub fn num_vars(&self) -> u32 {
        (self.values.len() - 1) as u32
    }

    pub fn set(&mut self, var: u32, value: bool) {
        if var as usize >= self.values.len() {
            self.values.resize(var as usize + 1, false);
        }
        self.values[var as usize] = value;
    }

    /// Positive ids of the true variables, negative of the false ones.
    pub fn literals(&self) -> Vec<i32> {
        (1..self.values.len())
            .map(|v| if self.values[v] { v as i32 } else { -(v as i32) })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Limit {
    Conflicts,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveResult {
    Sat(Model),
    Unsat,
    /// A resource limit ran out; this is never a claim of unsatisfiability.
    Unknown(Limit),
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SolveResult::Sat(_))
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolverConfig {
    pub conflict_budget: Option<u64>,
    pub deadline: Option<Instant>,
}

pub fn solve(cnf: &Cnf) -> SolveResult {
    solve_with(cnf, &SolverConfig::default())
}

pub fn solve_with(cnf: &Cnf, config: &SolverConfig) -> SolveResult {
    let mut s = Solver::new(cnf.num_vars as usize);
    for c in &cnf.clauses {
        if !s.add_clause(c) {
            return SolveResult::Unsat;
        }
    }
    let result = s.search(config);
    if let SolveResult::Sat(m) = &result {
        assert!(
            cnf.satisfied_by(&|v| m.value(v)),
            "solver produced an assignment that violates the input"
        );
    }
    result
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
struct Lit(u32);

impl Lit {
    fn new(var: usize, neg: bool) -> Lit {
        Lit(((var as u32) << 1) | u32::from(neg))
    }

    fn from_dimacs(l: i32) -> Lit {
        Lit::new(l.unsigned_abs() as usize - 1, l < 0)
    }

    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn idx(self) -> usize {
        self.0 as usize
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

const FALSE: u8 = 0;
const TRUE: u8 = 1;
const UNDEF: u8 = 2;

fn value(assigns: &[u8], l: Lit) -> u8 {
    let v = assigns[l.var()];
    if v == UNDEF {
        UNDEF
    } else {
        v ^ u8::from(l.neg())
    }
}

/// Max-heap on activity, ties broken towards the lower variable index.
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn new(n: usize) -> Self {
        VarHeap { heap: (0..n).collect(), pos: (0..n).map(Some).collect() }
    }

    fn better(act: &[f64], a: usize, b: usize) -> bool {
        act[a] > act[b] || (act[a] == act[b] && a < b)
    }

    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        while i > 0 {
            let p = (i - 1) / 2;
            if Self::better(act, self.heap[i], self.heap[p]) {
                self.swap(i, p);
                i = p;
            } else {
                break;
            }
        }
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < self.heap.len() && Self::better(act, self.heap[l], self.heap[best]) {
                best = l;
            }
            if r < self.heap.len() && Self::better(act, self.heap[r], self.heap[best]) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }

    fn swap(&mut self, i: usize, j: usize) {
        self.heap.swap(i, j);
        self.pos[self.heap[i]] = Some(i);
        self.pos[self.heap[j]] = Some(j);
    }

    fn push(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.heap.push(v);
        let i = self.heap.len() - 1;
        self.pos[v] = Some(i);
        self.up(i, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap[0];
        let last = self.heap.pop().unwrap();
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.up(i, act);
        }
    }
}

struct Solver {
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<bool>,
}

const DECAY: f64 = 0.95;
const RESTART_UNIT: u64 = 100;

impl Solver {
    fn new(n: usize) -> Self {
        Solver {
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n],
            assigns: vec![UNDEF; n],
            level: vec![0; n],
            reason: vec![None; n],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0; n],
            var_inc: 1.0,
            heap: VarHeap::new(n),
            phase: vec![false; n],
            seen: vec![false; n],
        }
    }

    /// Adds an input clause at level 0; false means trivially unsatisfiable.
    fn add_clause(&mut self, dimacs: &[i32]) -> bool {
        let mut lits: Vec<Lit> = dimacs.iter().map(|&l| Lit::from_dimacs(l)).collect();
        lits.sort_by_key(|l| l.0);
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return true;
        }
        match lits.len() {
            0 => false,
            1 => match value(&self.assigns, lits[0]) {
                UNDEF => {
                    self.enqueue(lits[0], None);
                    true
                }
                v => v == TRUE,
            },
            _ => {
                let ci = self.clauses.len();
                self.watches[lits[0].idx()].push(ci);
                self.watches[lits[1].idx()].push(ci);
                self.clauses.push(lits);
                true
            }
        }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var();
        self.assigns[v] = u8::from(!l.neg());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let mut kept = 0;
            let mut i = 0;
            let mut conflict = None;
            while i < ws.len() {
                let ci = ws[i];
                i += 1;
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                if value(&self.assigns, clause[0]) == TRUE {
                    ws[kept] = ci;
                    kept += 1;
                    continue;
                }
                let replacement =
                    (2..clause.len()).find(|&k| value(&self.assigns, clause[k]) != FALSE);
                if let Some(k) = replacement {
                    clause.swap(1, k);
                    let w = clause[1].idx();
                    self.watches[w].push(ci);
                    continue;
                }
                ws[kept] = ci;
                kept += 1;
                let first = clause[0];
                if value(&self.assigns, first) == FALSE {
                    while i < ws.len() {
                        ws[kept] = ws[i];
                        kept += 1;
                        i += 1;
                    }
                    conflict = Some(ci);
                } else {
                    self.enqueue(first, Some(ci));
                }
            }
            ws.truncate(kept);
            self.watches[false_lit.idx()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    /// First-UIP conflict analysis; returns the learnt clause (asserting
    /// literal first, highest remaining level second) and the backjump level.
    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut pending = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level();
        loop {
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl].len() {
                let q = self.clauses[confl][k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.bump(v);
                    self.seen[v] = true;
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            self.seen[lit.var()] = false;
            pending -= 1;
            p = Some(lit);
            if pending == 0 {
                break;
            }
            confl = self.reason[lit.var()].expect("implied literal has a reason");
        }
        learnt[0] = !p.unwrap();
        for l in &learnt[1..] {
            self.seen[l.var()] = false;
        }
        let mut bt = 0;
        if learnt.len() > 1 {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var()] > self.level[learnt[max_i].var()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            bt = self.level[learnt[1].var()];
        }
        (learnt, bt)
    }

    fn cancel_until(&mut self, level: u32) {
        if self.decision_level() <= level {
            return;
        }
        let lim = self.trail_lim[level as usize];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.phase[v] = !l.neg();
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.heap.push(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(level as usize);
        self.qhead = self.trail.len();
    }

    fn search(&mut self, config: &SolverConfig) -> SolveResult {
        let mut conflicts: u64 = 0;
        let mut since_restart: u64 = 0;
        let mut restart_idx: u64 = 0;
        let mut steps: u64 = 0;
        loop {
            steps += 1;
            if steps.is_multiple_of(512) {
                if let Some(d) = config.deadline {
                    if Instant::now() >= d {
                        return SolveResult::Unknown(Limit::Timeout);
                    }
                }
            }
            if let Some(confl) = self.propagate() {
                conflicts += 1;
                since_restart += 1;
                if self.decision_level() == 0 {
                    return SolveResult::Unsat;
                }
                if config.conflict_budget.is_some_and(|b| conflicts > b) {
                    return SolveResult::Unknown(Limit::Conflicts);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let ci = self.clauses.len();
                    self.watches[learnt[0].idx()].push(ci);
                    self.watches[learnt[1].idx()].push(ci);
                    let first = learnt[0];
                    self.clauses.push(learnt);
                    self.enqueue(first, Some(ci));
                }
                self.var_inc /= DECAY;
                if since_restart >= luby(restart_idx) * RESTART_UNIT {
                    since_restart = 0;
                    restart_idx += 1;
                    self.cancel_until(0);
                }
            } else {
                let next = loop {
                    match self.heap.pop(&self.activity) {
                        None => break None,
                        Some(v) if self.assigns[v] == UNDEF => break Some(v),
                        Some(_) => {}
                    }
                };
                let Some(v) = next else {
                    let values = self.assigns.iter().map(|&a| a == TRUE).collect();
                    return SolveResult::Sat(Model::from_values(values));
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(Lit::new(v, !self.phase[v]), None);
            }
        }
    }
}

/// The Luby sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(mut i: u64) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < i + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != i {
        size = (size - 1) >> 1;
        seq -= 1;
        i %= size;
    }
    1 << seq
}
