use std::collections::{BTreeMap, HashMap};

use super::PbConstraint;
use crate::encode::{EncodeOptions, PrecVars, WeightVars};
use crate::kbo::PrecedenceMode;
use crate::logic::{Var, VarPool};
use crate::proof::{DecodeTables, EngineKind};
use crate::term::{cancel_common, variable_condition, Multiset, Symbol, Term, Token, Trs};

/// `Σ_j 2^(j-1) * bit_j` scaled by `factor`.
fn value_terms(bits: &[Var], factor: i64) -> impl Iterator<Item = (i64, Var)> + '_ {
    let k = bits.len();
    bits.iter().enumerate().map(move |(i, &v)| (factor << (k - 1 - i), v))
}

/// Admissibility: `w0 >= 1`, `w(c) - w0 >= 0` for constants, and
/// `(n-1) w(f) + Σ (X_fg + Y_fg) >= n-1` for unary `f`.
pub fn adm_pbc(wv: &WeightVars, pv: &PrecVars) -> Vec<PbConstraint> {
    let n = wv.symbols.len() as i64;
    let mut out = vec![PbConstraint::ge(value_terms(&wv.w0, 1), 1)];
    for (f, sym) in wv.symbols.iter().enumerate() {
        if sym.is_constant() {
            let terms = value_terms(&wv.weights[f], 1).chain(value_terms(&wv.w0, -1));
            out.push(PbConstraint::ge(terms, 0));
        }
        if sym.is_unary() {
            let mut terms: Vec<(i64, Var)> = value_terms(&wv.weights[f], n - 1).collect();
            for g in 0..wv.symbols.len() {
                if g != f {
                    terms.push((1, pv.x[&(f, g)]));
                    terms.push((1, pv.y[&(f, g)]));
                }
            }
            out.push(PbConstraint::ge(terms, n - 1));
        }
    }
    out
}

/// Quasi-precedence constraints over `X`, `Y`, `Z` and the codes `i(f)`:
/// `2X_fg + Y_fg + Y_gf + 2Z_fg = 2`,
/// `-X_fg + 2^l Y_fg + 2^l Z_fg + i(f) - i(g) >= 0` and
/// `2^l X_fg + Y_fg + 2^l Z_fg + i(f) - i(g) >= 1`.
pub fn prec_pbc(pv: &PrecVars) -> Vec<PbConstraint> {
    let big = 1i64 << pv.l;
    let mut out = Vec::new();
    for (f, g) in pv.pairs() {
        let (x, y, yr, z) = (pv.x[&(f, g)], pv.y[&(f, g)], pv.y[&(g, f)], pv.z[&(f, g)]);
        out.push(PbConstraint::eq([(2, x), (1, y), (1, yr), (2, z)], 2));
        let diff = || value_terms(&pv.codes[f], 1).chain(value_terms(&pv.codes[g], -1));
        out.push(PbConstraint::ge([(-1, x), (big, y), (big, z)].into_iter().chain(diff()), 0));
        out.push(PbConstraint::ge([(big, x), (1, y), (big, z)].into_iter().chain(diff()), 1));
    }
    out
}

/// A complete pseudo-boolean problem with its decode tables.
#[derive(Clone, Debug)]
pub struct PbProblem {
    pub constraints: Vec<PbConstraint>,
    pub objective: Option<Vec<(i64, Var)>>,
    pub num_vars: u32,
    pub tables: DecodeTables,
    pub prec: PrecVars,
    /// `KBO_{s,t}` and `KBO'_{s,t}` per encoded pair.
    pub kbo: BTreeMap<(Term, Term), Var>,
    pub kbo_prime: BTreeMap<(Term, Term), Var>,
}

/// Builds `PBC(s >kbo t)` constraints, one auxiliary pair per distinct
/// comparison.
pub struct PbEncoder {
    opts: EncodeOptions,
    pub wv: WeightVars,
    pub pv: PrecVars,
    pub pool: VarPool,
    index: HashMap<Symbol, usize>,
    kbo: BTreeMap<(Term, Term), Var>,
    kbo_prime: BTreeMap<(Term, Term), Var>,
    pub constraints: Vec<PbConstraint>,
}

impl PbEncoder {
    pub fn new(sig: &[Symbol], opts: EncodeOptions) -> Self {
        let mut pool = VarPool::new();
        let wv = WeightVars::allocate(sig, opts.bits, &mut pool);
        let pv = PrecVars::allocate(sig, &mut pool, true);
        let index = sig.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        PbEncoder {
            opts,
            wv,
            pv,
            pool,
            index,
            kbo: BTreeMap::new(),
            kbo_prime: BTreeMap::new(),
            constraints: Vec::new(),
        }
    }

    fn token_bits(&self, tok: &Token) -> &[Var] {
        match tok {
            Token::Var(_) => &self.wv.w0,
            Token::Sym(f) => &self.wv.weights[self.index[f]],
        }
    }

    fn weight_terms(&self, m: &Multiset, sign: i64, out: &mut Vec<(i64, Var)>) {
        for (tok, &n) in m {
            out.extend(value_terms(self.token_bits(tok), sign * n as i64));
        }
    }

    fn alloc(&mut self, s: &Term, t: &Term) -> (Var, bool) {
        let key = (s.clone(), t.clone());
        if let Some(&v) = self.kbo.get(&key) {
            return (v, false);
        }
        let v = self.pool.fresh_named(format!("KBO({s},{t})"));
        self.kbo.insert(key, v);
        (v, true)
    }

    /// The variable `KBO_{s,t}`, emitting its constraints on first use.
    pub fn encode_kbo_gt(&mut self, s: &Term, t: &Term) -> Var {
        let (v, new) = self.alloc(s, t);
        if new {
            self.emit(s, t, v);
        }
        v
    }

    fn emit(&mut self, s: &Term, t: &Term, v: Var) {
        if s.is_var() || s == t || !variable_condition(s, t) {
            self.constraints.push(PbConstraint::eq([(1, v)], 0));
            return;
        }
        if self.opts.embed_shortcut && s.embeds(t) {
            return;
        }
        let p = self.pool.fresh_named(format!("KBO'({s},{t})"));
        self.kbo_prime.insert((s.clone(), t.clone()), p);
        let unit = 1i64 << self.opts.bits;
        let (ls, lt) = (s.tokens(), t.tokens());
        let m = if self.opts.cancel {
            lt.iter()
                .map(|(o, &n)| unit * (n as i64 - ls.get(o).copied().unwrap_or(0) as i64).max(0))
                .sum()
        } else {
            unit * t.size() as i64
        };
        let mut terms = vec![(-(m + 1), v)];
        let (rl, rr) = if self.opts.cancel { cancel_common(s, t) } else { (ls, lt) };
        self.weight_terms(&rl, 1, &mut terms);
        self.weight_terms(&rr, -1, &mut terms);
        terms.push((1, p));
        self.constraints.push(PbConstraint::ge(terms, -m));
        self.emit_prime(s, t, p);
    }

    fn emit_prime(&mut self, s: &Term, t: &Term, p: Var) {
        let (Term::App(f, ss), Term::App(g, ts)) = (s, t) else {
            if !s.is_unary_tower_over(t) {
                self.constraints.push(PbConstraint::eq([(1, p)], 0));
            }
            return;
        };
        let i = (0..ss.len().min(ts.len())).find(|&j| ss[j] != ts[j]);
        let (fi, gi) = (self.index[f], self.index[g]);
        match i {
            Some(i) => {
                let (child, new) = self.alloc(&ss[i], &ts[i]);
                let link = if f == g {
                    PbConstraint::ge([(-1, p), (1, child)], 0)
                } else {
                    let (x, y) = (self.pv.x[&(fi, gi)], self.pv.y[&(fi, gi)]);
                    PbConstraint::ge([(-2, p), (2, x), (1, y), (1, child)], 0)
                };
                self.constraints.push(link);
                if new {
                    self.emit(&ss[i], &ts[i], child);
                }
            }
            None => {
                assert!(f != g, "equal roots with equal arguments means s = t");
                self.constraints.push(PbConstraint::ge([(-1, p), (1, self.pv.x[&(fi, gi)])], 0));
            }
        }
    }

    pub fn tables(&self) -> DecodeTables {
        DecodeTables {
            engine: EngineKind::Pbc,
            k: self.opts.bits,
            l: self.pv.l,
            mode: self.opts.mode,
            symbols: self.wv.symbols.clone(),
            weight_bits: self.wv.weights.clone(),
            w0_bits: self.wv.w0.clone(),
            code_bits: self.pv.codes.clone(),
        }
    }

    pub fn finish(self) -> PbProblem {
        let tables = self.tables();
        PbProblem {
            constraints: self.constraints,
            objective: None,
            num_vars: self.pool.len(),
            tables,
            prec: self.pv,
            kbo: self.kbo,
            kbo_prime: self.kbo_prime,
        }
    }
}

/// ADM-PBC, PREC-PBC, and per rule `PBC(l >kbo r)` with `KBO_{l,r} = 1`;
/// strict mode adds `Y_fg = 0` for every pair.
pub fn kbo_pbc(trs: &Trs, opts: &EncodeOptions) -> PbProblem {
    let mut enc = PbEncoder::new(trs.signature(), opts.clone());
    let mut head = adm_pbc(&enc.wv, &enc.pv);
    head.extend(prec_pbc(&enc.pv));
    if opts.mode == PrecedenceMode::Strict {
        head.extend(enc.pv.y.values().map(|&y| PbConstraint::eq([(1, y)], 0)));
    }
    enc.constraints = head;
    for rule in trs.rules() {
        let v = enc.encode_kbo_gt(&rule.lhs, &rule.rhs);
        enc.constraints.push(PbConstraint::eq([(1, v)], 1));
    }
    enc.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    /// Total symbol weight plus `w0`.
    Weights,
    /// Number of precedence comparisons `Σ (X_fg + Y_fg)`.
    Precedence,
}

pub fn objective(p: &PbProblem, kind: Objective) -> Vec<(i64, Var)> {
    match kind {
        Objective::Weights => p
            .tables
            .weight_bits
            .iter()
            .chain(std::iter::once(&p.tables.w0_bits))
            .flat_map(|bits| value_terms(bits, 1))
            .collect(),
        Objective::Precedence => {
            p.prec.pairs().flat_map(|fg| [(1, p.prec.x[&fg]), (1, p.prec.y[&fg])]).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_trs;
    use crate::pb::Relation;

    fn opts(k: usize) -> EncodeOptions {
        EncodeOptions::new(k, PrecedenceMode::Quasi)
    }

    #[test]
    fn displayed_rule_gives_five_constraints() {
        let trs = parse_trs("(VAR x) (RULES f(g(x),g(g(x))) -> f(g(g(x)),x))").unwrap();
        let mut enc = PbEncoder::new(trs.signature(), opts(3));
        let r = &trs.rules()[0];
        let top = enc.encode_kbo_gt(&r.lhs, &r.rhs);
        let cs = &enc.constraints;
        assert_eq!(cs.len(), 5, "{cs:#?}");
        let g = enc.index[trs.symbol("g").unwrap()];
        let wg: Vec<(i64, Var)> = value_terms(&enc.wv.weights[g], 1).collect();
        let x = Term::var("x");
        let gx = Term::app("g", vec![x.clone()]);
        let ggx = Term::app("g", vec![gx.clone()]);
        let p_top = enc.kbo_prime[&(r.lhs.clone(), r.rhs.clone())];
        let k1 = enc.kbo[&(gx.clone(), ggx.clone())];
        let p1 = enc.kbo_prime[&(gx.clone(), ggx.clone())];
        let k2 = enc.kbo[&(x.clone(), gx.clone())];
        // (1) -KBO + w(g) + KBO' >= 0
        let mut t1 = vec![(-1, top)];
        t1.extend(wg.iter().copied());
        t1.push((1, p_top));
        assert_eq!(cs[0], PbConstraint::ge(t1, 0));
        // (2) -KBO' + KBO_{g(x),g(g(x))} >= 0
        assert_eq!(cs[1], PbConstraint::ge([(-1, p_top), (1, k1)], 0));
        // (3) -(2^k+1) KBO - w(g) + KBO' >= -2^k
        let mut t3 = vec![(-9, k1)];
        t3.extend(wg.iter().map(|&(a, v)| (-a, v)));
        t3.push((1, p1));
        assert_eq!(cs[2], PbConstraint::ge(t3, -8));
        // (4) -KBO' + KBO_{x,g(x)} >= 0
        assert_eq!(cs[3], PbConstraint::ge([(-1, p1), (1, k2)], 0));
        // (5) KBO_{x,g(x)} = 0
        assert_eq!(cs[4], PbConstraint::eq([(1, k2)], 0));
    }

    #[test]
    fn identical_sides_and_duplication() {
        let trs = parse_trs("(VAR x) (RULES f(x) -> g(x,x))").unwrap();
        let mut enc = PbEncoder::new(trs.signature(), opts(2));
        let r = &trs.rules()[0];
        enc.encode_kbo_gt(&r.lhs, &r.rhs);
        enc.encode_kbo_gt(&r.lhs, &r.lhs);
        assert_eq!(enc.constraints.len(), 2);
        assert!(enc.constraints.iter().all(|c| c.relation == Relation::Eq && c.bound == 0));
    }

    #[test]
    fn single_unary_symbol_gives_trivial_maximality() {
        let trs = parse_trs("(VAR x) (RULES f(x) -> x)").unwrap();
        let enc = PbEncoder::new(trs.signature(), opts(2));
        let adm = adm_pbc(&enc.wv, &enc.pv);
        assert_eq!(adm.len(), 2);
        assert!(adm[1].terms.is_empty() && adm[1].bound == 0);
    }

    #[test]
    fn prec_pbc_counts() {
        let trs = parse_trs("(VAR x) (RULES f(x) -> g(h(x)))").unwrap();
        let enc = PbEncoder::new(trs.signature(), opts(2));
        assert_eq!(prec_pbc(&enc.pv).len(), 3 * 6);
    }
}
