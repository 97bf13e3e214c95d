//! Propositional encoding of KBO orientability.
//!
//! Weights are `k`-bit vectors over fresh variables, the precedence is an
//! interpretation of symbols as `l`-bit naturals, and every rule
//! contributes a formula that holds exactly when the encoded parameters
//! orient it.

use std::collections::{BTreeMap, HashMap};

use crate::kbo::PrecedenceMode;
use crate::logic::{
    bit_length, bv_add_wide, bv_eq, bv_geq, bv_gt, BitVector, Formula, Var, VarPool, WeightedBits,
};
use crate::proof::{DecodeTables, EngineKind};
use crate::term::{cancel_common, variable_condition, Multiset, Symbol, Term, Token, Trs};

/// How wide intermediate sums are.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumWidth {
    /// Each sum is as wide as its largest possible value, so it never
    /// overflows and the encoding bounds only the symbol weights.
    Growing,
    /// Every sum keeps the weight width `k`; an overflowing sum makes the
    /// formula false.
    Fixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodeOptions {
    pub bits: usize,
    pub mode: PrecedenceMode,
    pub cancel: bool,
    pub cache: bool,
    pub embed_shortcut: bool,
    pub sum_width: SumWidth,
}

impl EncodeOptions {
    pub fn new(bits: usize, mode: PrecedenceMode) -> Self {
        assert!(bits >= 1, "at least one weight bit is required");
        EncodeOptions {
            bits,
            mode,
            cancel: true,
            cache: true,
            embed_shortcut: true,
            sum_width: SumWidth::Growing,
        }
    }

    /// The same options with cancellation, the addition cache and the
    /// embedding shortcut switched off.
    pub fn unoptimized(mut self) -> Self {
        self.cancel = false;
        self.cache = false;
        self.embed_shortcut = false;
        self
    }
}

/// Precedence code width: enough bits to give every symbol its own number.
pub fn code_width(n: usize) -> usize {
    let mut l = 0;
    while (1usize << l) < n {
        l += 1;
    }
    l.max(1)
}

/// Weight bits of every symbol and of `w0`, most significant first.
#[derive(Clone, Debug)]
pub struct WeightVars {
    pub k: usize,
    pub symbols: Vec<Symbol>,
    pub weights: Vec<Vec<Var>>,
    pub w0: Vec<Var>,
}

impl WeightVars {
    pub fn allocate(sig: &[Symbol], k: usize, pool: &mut VarPool) -> Self {
        let weights = sig
            .iter()
            .map(|f| (0..k).map(|j| pool.fresh_named(format!("w({f})_{}", k - j))).collect())
            .collect();
        let w0 = (0..k).map(|j| pool.fresh_named(format!("w0_{}", k - j))).collect();
        WeightVars { k, symbols: sig.to_vec(), weights, w0 }
    }

    pub fn bits(&self, f: usize) -> BitVector {
        BitVector::from_vars(&self.weights[f])
    }

    pub fn w0_bits(&self) -> BitVector {
        BitVector::from_vars(&self.w0)
    }
}

/// Precedence variables: per-symbol codes and the `X` (greater), `Y`
/// (equivalent) and, for the pseudo-boolean engine, `Z` relation variables,
/// keyed by ordered pairs of signature indices.
#[derive(Clone, Debug)]
pub struct PrecVars {
    pub l: usize,
    pub codes: Vec<Vec<Var>>,
    pub x: BTreeMap<(usize, usize), Var>,
    pub y: BTreeMap<(usize, usize), Var>,
    pub z: BTreeMap<(usize, usize), Var>,
}

impl PrecVars {
    pub fn allocate(sig: &[Symbol], pool: &mut VarPool, with_z: bool) -> Self {
        let n = sig.len();
        let l = code_width(n);
        let codes = sig
            .iter()
            .map(|f| (0..l).map(|j| pool.fresh_named(format!("i({f})_{}", l - j))).collect())
            .collect();
        let mut alloc = |tag: &str| {
            let mut m = BTreeMap::new();
            for f in 0..n {
                for g in 0..n {
                    if f != g {
                        m.insert((f, g), pool.fresh_named(format!("{tag}({},{})", sig[f], sig[g])));
                    }
                }
            }
            m
        };
        let x = alloc("X");
        let y = alloc("Y");
        let z = if with_z { alloc("Z") } else { BTreeMap::new() };
        PrecVars { l, codes, x, y, z }
    }

    pub fn code(&self, f: usize) -> BitVector {
        BitVector::from_vars(&self.codes[f])
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.x.keys().copied()
    }
}

/// `w0 > 0`, constants at least `w0`, and weight-zero unary symbols above
/// or equivalent to every other symbol.
pub fn adm_sat(wv: &WeightVars, pv: &PrecVars) -> Formula {
    let w0 = wv.w0_bits();
    let zero = BitVector::zero(wv.k);
    let mut parts = vec![bv_gt(&w0, &zero).unwrap()];
    for (f, sym) in wv.symbols.iter().enumerate() {
        if sym.is_constant() {
            parts.push(bv_geq(&wv.bits(f), &w0).unwrap());
        }
        if sym.is_unary() {
            let maximal = (0..wv.symbols.len()).filter(|&g| g != f).map(|g| {
                Formula::or2(&Formula::var(pv.x[&(f, g)]), &Formula::var(pv.y[&(f, g)]))
            });
            let is_zero = bv_eq(&wv.bits(f), &zero).unwrap();
            parts.push(Formula::implies(&is_zero, &Formula::and(maximal.collect::<Vec<_>>())));
        }
    }
    Formula::and(parts)
}

/// Ties every `X`/`Y` variable to the comparison of the codes; in strict
/// mode additionally forbids every `Y`.
pub fn prec_defs(pv: &PrecVars, mode: PrecedenceMode) -> Formula {
    let mut parts = Vec::new();
    for (f, g) in pv.pairs() {
        let (cf, cg) = (pv.code(f), pv.code(g));
        parts.push(Formula::iff(&Formula::var(pv.x[&(f, g)]), &bv_gt(&cf, &cg).unwrap()));
        let y = Formula::var(pv.y[&(f, g)]);
        parts.push(Formula::iff(&y, &bv_eq(&cf, &cg).unwrap()));
        if mode == PrecedenceMode::Strict {
            parts.push(y.not());
        }
    }
    Formula::and(parts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum OperandId {
    Zero,
    W0,
    Sym(usize),
    Sum(usize),
}

struct Operand {
    value: WeightedBits,
    bound: u128,
}

/// Stateful builder for one encoding run: owns the variable pool, the
/// addition cache and the memo of already encoded comparisons.
pub struct SatEncoder {
    opts: EncodeOptions,
    pub wv: WeightVars,
    pub pv: PrecVars,
    pub pool: VarPool,
    index: BTreeMap<Symbol, usize>,
    sums: Vec<Operand>,
    cache: HashMap<(OperandId, OperandId), OperandId>,
    memo: HashMap<(Term, Term), Formula>,
    adders: usize,
}

impl SatEncoder {
    pub fn new(sig: &[Symbol], opts: EncodeOptions) -> Self {
        let mut pool = VarPool::new();
        let wv = WeightVars::allocate(sig, opts.bits, &mut pool);
        let pv = PrecVars::allocate(sig, &mut pool, false);
        let index = sig.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        SatEncoder {
            opts,
            wv,
            pv,
            pool,
            index,
            sums: Vec::new(),
            cache: HashMap::new(),
            memo: HashMap::new(),
            adders: 0,
        }
    }

    /// Number of adders built so far.
    pub fn adders(&self) -> usize {
        self.adders
    }

    fn leaf_bound(&self) -> u128 {
        (1u128 << self.opts.bits) - 1
    }

    fn operand(&self, id: OperandId) -> (WeightedBits, u128) {
        match id {
            OperandId::Zero => (WeightedBits::plain(BitVector::zero(1)), 0),
            OperandId::W0 => (WeightedBits::plain(self.wv.w0_bits()), self.leaf_bound()),
            OperandId::Sym(f) => (WeightedBits::plain(self.wv.bits(f)), self.leaf_bound()),
            OperandId::Sum(i) => (self.sums[i].value.clone(), self.sums[i].bound),
        }
    }

    fn add(&mut self, a: OperandId, b: OperandId) -> OperandId {
        if a == OperandId::Zero {
            return b;
        }
        if b == OperandId::Zero {
            return a;
        }
        let key = (a.min(b), a.max(b));
        if self.opts.cache {
            if let Some(&id) = self.cache.get(&key) {
                return id;
            }
        }
        let (va, ba) = self.operand(a);
        let (vb, bb) = self.operand(b);
        let bound = ba + bb;
        let width = match self.opts.sum_width {
            SumWidth::Growing => bit_length(bound),
            SumWidth::Fixed => self.opts.bits,
        };
        let value = bv_add_wide(&va, &vb, width, &mut self.pool);
        self.adders += 1;
        let id = OperandId::Sum(self.sums.len());
        self.sums.push(Operand { value, bound });
        if self.opts.cache {
            self.cache.insert(key, id);
        }
        id
    }

    fn leaf(&self, tok: &Token) -> OperandId {
        match tok {
            Token::Var(_) => OperandId::W0,
            Token::Sym(f) => OperandId::Sym(self.index[f]),
        }
    }

    fn multiset_weight(&mut self, m: &Multiset) -> OperandId {
        let mut acc = OperandId::Zero;
        for (tok, &n) in m {
            let leaf = self.leaf(tok);
            for _ in 0..n {
                acc = self.add(acc, leaf);
            }
        }
        acc
    }

    fn term_weight(&mut self, t: &Term) -> OperandId {
        match t {
            Term::Var(_) => OperandId::W0,
            Term::App(f, args) => {
                let mut acc = OperandId::Sym(self.index[f]);
                for a in args {
                    let w = self.term_weight(a);
                    acc = self.add(acc, w);
                }
                acc
            }
        }
    }

    /// Encoded weight of a term, `(bits, side constraint)`.
    pub fn encode_weight(&mut self, t: &Term) -> WeightedBits {
        let id = self.term_weight(t);
        self.operand(id).0
    }

    /// Encoded weight of a multiset of tokens, as left after cancellation.
    pub fn encode_residual(&mut self, m: &Multiset) -> WeightedBits {
        let id = self.multiset_weight(m);
        self.operand(id).0
    }

    fn compare(&self, a: OperandId, b: OperandId) -> (Formula, Formula) {
        let (va, _) = self.operand(a);
        let (vb, _) = self.operand(b);
        let w = va.bits.width().max(vb.bits.width());
        let (fa, fb) = (va.bits.zero_extend(w), vb.bits.zero_extend(w));
        let gt = Formula::and([bv_gt(&fa, &fb).unwrap(), va.side.clone(), vb.side.clone()]);
        let eq = Formula::and([bv_eq(&fa, &fb).unwrap(), va.side, vb.side]);
        (gt, eq)
    }

    fn x(&self, f: &Symbol, g: &Symbol) -> Formula {
        Formula::var(self.pv.x[&(self.index[f], self.index[g])])
    }

    fn y(&self, f: &Symbol, g: &Symbol) -> Formula {
        Formula::var(self.pv.y[&(self.index[f], self.index[g])])
    }

    /// The formula `SAT(s >kbo t)`.
    pub fn encode_kbo_gt(&mut self, s: &Term, t: &Term) -> Formula {
        let key = (s.clone(), t.clone());
        if let Some(f) = self.memo.get(&key) {
            return f.clone();
        }
        let f = self.build_gt(s, t);
        self.memo.insert(key, f.clone());
        f
    }

    fn build_gt(&mut self, s: &Term, t: &Term) -> Formula {
        if s.is_var() || s == t || !variable_condition(s, t) {
            return Formula::fls();
        }
        if self.opts.embed_shortcut && s.embeds(t) {
            return Formula::tru();
        }
        let (ws, wt) = if self.opts.cancel {
            let (rl, rr) = cancel_common(s, t);
            (self.multiset_weight(&rl), self.multiset_weight(&rr))
        } else {
            (self.term_weight(s), self.term_weight(t))
        };
        let (gt, eq) = self.compare(ws, wt);
        let prime = self.encode_prime(s, t);
        Formula::or2(&gt, &Formula::and2(&eq, &prime))
    }

    fn encode_prime(&mut self, s: &Term, t: &Term) -> Formula {
        let (Term::App(f, ss), Term::App(g, ts)) = (s, t) else {
            return Formula::constant(s.is_unary_tower_over(t));
        };
        let i = (0..ss.len().min(ts.len())).find(|&j| ss[j] != ts[j]);
        if f == g {
            let i = i.expect("equal roots with equal arguments means s = t");
            return self.encode_kbo_gt(&ss[i], &ts[i]);
        }
        let x = self.x(f, g);
        match i {
            Some(i) => {
                let rec = self.encode_kbo_gt(&ss[i], &ts[i]);
                Formula::or2(&x, &Formula::and2(&self.y(f, g), &rec))
            }
            None => x,
        }
    }

    pub fn tables(&self) -> DecodeTables {
        DecodeTables {
            engine: EngineKind::Sat,
            k: self.opts.bits,
            l: self.pv.l,
            mode: self.opts.mode,
            symbols: self.wv.symbols.clone(),
            weight_bits: self.wv.weights.clone(),
            w0_bits: self.wv.w0.clone(),
            code_bits: self.pv.codes.clone(),
        }
    }
}

/// The complete SAT encoding of one system.
pub struct SatEncoding {
    pub formula: Formula,
    pub pool: VarPool,
    pub tables: DecodeTables,
    /// Variables issued by the encoding itself, before CNF conversion.
    pub encoding_vars: u32,
    pub adders: usize,
}

/// `ADM-SAT ∧ (∧ SAT(l >kbo r)) ∧ prec_defs`.
pub fn kbo_sat(trs: &Trs, opts: &EncodeOptions) -> SatEncoding {
    let mut enc = SatEncoder::new(trs.signature(), opts.clone());
    let mut parts = vec![adm_sat(&enc.wv, &enc.pv)];
    for rule in trs.rules() {
        parts.push(enc.encode_kbo_gt(&rule.lhs, &rule.rhs));
    }
    parts.push(prec_defs(&enc.pv, opts.mode));
    let tables = enc.tables();
    SatEncoding {
        formula: Formula::and(parts),
        encoding_vars: enc.pool.len(),
        adders: enc.adders,
        pool: enc.pool,
        tables,
    }
}
