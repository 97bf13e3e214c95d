//! Knuth-Bendix order over explicit parameters.
//!
//! This is the ground truth the encodings are checked against: a direct
//! implementation of the order for a given weight function and
//! quasi-precedence, the admissibility test, and an exhaustive parameter
//! search used as an oracle for small systems.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::term::{variable_condition, Rule, Symbol, Term, Trs};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KboError {
    #[error("no weight for symbol `{0}`")]
    UnknownSymbol(String),
    #[error("weight function is not admissible for the precedence")]
    Inadmissible,
    #[error("rule {0} is not oriented")]
    NotOriented(Rule),
    #[error("search space of {0} candidates exceeds the configured limit")]
    SearchTooLarge(u128),
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct WeightFunction {
    pub weights: BTreeMap<Symbol, u64>,
    pub w0: u64,
}

impl WeightFunction {
    pub fn new(w0: u64) -> Self {
        WeightFunction { weights: BTreeMap::new(), w0 }
    }

    /// Looks symbols up by name in `sig`. Unknown names panic; this is a
    /// convenience for fixtures.
    pub fn from_names(sig: &[Symbol], weights: &[(&str, u64)], w0: u64) -> Self {
        let mut wf = WeightFunction::new(w0);
        for (name, w) in weights {
            let sym = sig
                .iter()
                .find(|s| s.name() == *name)
                .unwrap_or_else(|| panic!("no symbol named {name}"));
            wf.weights.insert(sym.clone(), *w);
        }
        wf
    }

    pub fn weight(&self, f: &Symbol) -> Result<u64, KboError> {
        self.weights
            .get(f)
            .copied()
            .ok_or_else(|| KboError::UnknownSymbol(f.name().to_string()))
    }

    pub fn total(&self) -> u128 {
        self.weights.values().map(|&w| u128::from(w)).sum::<u128>() + u128::from(self.w0)
    }
}

/// Weight of a term: `w0` per variable occurrence plus the symbol weights.
pub fn term_weight(wf: &WeightFunction, t: &Term) -> Result<u128, KboError> {
    match t {
        Term::Var(_) => Ok(u128::from(wf.w0)),
        Term::App(f, args) => {
            let mut sum = u128::from(wf.weight(f)?);
            for a in args {
                sum += term_weight(wf, a)?;
            }
            Ok(sum)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PrecOrd {
    Greater,
    Equal,
    Less,
    Incomparable,
}

/// A total quasi-order on symbols given by ranks: higher rank is greater,
/// equal ranks are equivalent. Symbols without a rank are incomparable to
/// everything but themselves.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Precedence {
    ranks: BTreeMap<Symbol, u64>,
}

impl Precedence {
    pub fn from_ranks(ranks: impl IntoIterator<Item = (Symbol, u64)>) -> Self {
        Precedence { ranks: ranks.into_iter().collect() }
    }

    /// Parses a chain such as `flatten ~ rev > unit > ++ > nil`. Every name
    /// must occur in `sig`; symbols not mentioned stay unranked.
    pub fn from_chain(sig: &[Symbol], chain: &str) -> Option<Self> {
        let groups: Vec<&str> = chain.split('>').collect();
        let mut ranks = BTreeMap::new();
        for (i, group) in groups.iter().enumerate() {
            let rank = (groups.len() - i) as u64;
            for name in group.split('~') {
                let name = name.trim();
                let sym = sig.iter().find(|s| s.name() == name)?;
                ranks.insert(sym.clone(), rank);
            }
        }
        Some(Precedence { ranks })
    }

    pub fn rank(&self, f: &Symbol) -> Option<u64> {
        self.ranks.get(f).copied()
    }

    pub fn ranks(&self) -> &BTreeMap<Symbol, u64> {
        &self.ranks
    }

    pub fn compare(&self, f: &Symbol, g: &Symbol) -> PrecOrd {
        if f == g {
            return PrecOrd::Equal;
        }
        match (self.ranks.get(f), self.ranks.get(g)) {
            (Some(a), Some(b)) => match a.cmp(b) {
                Ordering::Greater => PrecOrd::Greater,
                Ordering::Equal => PrecOrd::Equal,
                Ordering::Less => PrecOrd::Less,
            },
            _ => PrecOrd::Incomparable,
        }
    }

    pub fn is_strict(&self) -> bool {
        let mut seen: Vec<u64> = self.ranks.values().copied().collect();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Groups of equivalent symbols, greatest first.
    pub fn classes(&self) -> Vec<Vec<Symbol>> {
        let mut by_rank: BTreeMap<u64, Vec<Symbol>> = BTreeMap::new();
        for (s, r) in &self.ranks {
            by_rank.entry(*r).or_default().push(s.clone());
        }
        by_rank.into_values().rev().collect()
    }
}

impl fmt::Display for Precedence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let classes = self.classes();
        if classes.is_empty() {
            return f.write_str("(empty)");
        }
        let parts: Vec<String> = classes
            .iter()
            .map(|c| c.iter().map(|s| s.name()).collect::<Vec<_>>().join(" ~ "))
            .collect();
        f.write_str(&parts.join(" > "))
    }
}

/// Admissibility: `w0 > 0`, constants weigh at least `w0`, and a unary
/// symbol of weight zero is greater than or equivalent to every symbol.
pub fn is_admissible(wf: &WeightFunction, p: &Precedence, sig: &[Symbol]) -> bool {
    if wf.w0 == 0 {
        return false;
    }
    sig.iter().all(|f| {
        let Ok(w) = wf.weight(f) else { return false };
        if f.is_constant() && w < wf.w0 {
            return false;
        }
        if f.is_unary() && w == 0 {
            return sig
                .iter()
                .all(|g| matches!(p.compare(f, g), PrecOrd::Greater | PrecOrd::Equal));
        }
        true
    })
}

/// Which clause of the order's definition established `s > t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Case {
    #[serde(rename = "weight-gt")]
    WeightGt,
    #[serde(rename = "var-tower")]
    VarTower,
    #[serde(rename = "lex-arg")]
    LexArg,
    #[serde(rename = "prec-gt")]
    PrecGt,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::WeightGt => "weight-gt",
            Case::VarTower => "var-tower",
            Case::LexArg => "lex-arg",
            Case::PrecGt => "prec-gt",
        })
    }
}

/// A precedence fact some justification depends on.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PrecFact {
    Greater(Symbol, Symbol),
    Equiv(Symbol, Symbol),
}

/// `s >kbo t`, returning the clause that applies at the top.
pub fn kbo_gt(
    s: &Term,
    t: &Term,
    wf: &WeightFunction,
    p: &Precedence,
) -> Result<Option<Case>, KboError> {
    gt(s, t, wf, p, &mut Vec::new())
}

/// As [`kbo_gt`], additionally appending the precedence facts used on success.
pub fn kbo_gt_traced(
    s: &Term,
    t: &Term,
    wf: &WeightFunction,
    p: &Precedence,
    facts: &mut Vec<PrecFact>,
) -> Result<Option<Case>, KboError> {
    gt(s, t, wf, p, facts)
}

fn gt(
    s: &Term,
    t: &Term,
    wf: &WeightFunction,
    p: &Precedence,
    facts: &mut Vec<PrecFact>,
) -> Result<Option<Case>, KboError> {
    if s.is_var() || s == t || !variable_condition(s, t) {
        return Ok(None);
    }
    let (ws, wt) = (term_weight(wf, s)?, term_weight(wf, t)?);
    if ws > wt {
        return Ok(Some(Case::WeightGt));
    }
    if ws < wt {
        return Ok(None);
    }
    let (Term::App(f, ss), t_app) = (s, t) else { unreachable!() };
    let Term::App(g, ts) = t_app else {
        return Ok(s.is_unary_tower_over(t).then_some(Case::VarTower));
    };
    match p.compare(f, g) {
        PrecOrd::Greater => {
            facts.push(PrecFact::Greater(f.clone(), g.clone()));
            Ok(Some(Case::PrecGt))
        }
        PrecOrd::Equal => {
            let Some(i) = (0..ss.len().min(ts.len())).find(|&j| ss[j] != ts[j]) else {
                return Ok(None);
            };
            let mut inner = Vec::new();
            if gt(&ss[i], &ts[i], wf, p, &mut inner)?.is_some() {
                if f != g {
                    facts.push(PrecFact::Equiv(f.clone(), g.clone()));
                }
                facts.extend(inner);
                Ok(Some(Case::LexArg))
            } else {
                Ok(None)
            }
        }
        PrecOrd::Less | PrecOrd::Incomparable => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleProof {
    pub rule: Rule,
    pub case: Case,
}

/// Parameters together with a per-rule justification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KboProof {
    pub weights: WeightFunction,
    pub precedence: Precedence,
    pub per_rule: Vec<RuleProof>,
    /// Precedence facts required by admissibility and the justifications.
    pub used: Vec<PrecFact>,
}

/// Checks that every rule of `trs` decreases under the given parameters.
pub fn orients(trs: &Trs, wf: &WeightFunction, p: &Precedence) -> Result<KboProof, KboError> {
    for f in trs.signature() {
        wf.weight(f)?;
    }
    if !is_admissible(wf, p, trs.signature()) {
        return Err(KboError::Inadmissible);
    }
    let mut facts = Vec::new();
    for f in trs.signature() {
        if f.is_unary() && wf.weight(f)? == 0 {
            for g in trs.signature() {
                match p.compare(f, g) {
                    PrecOrd::Greater => facts.push(PrecFact::Greater(f.clone(), g.clone())),
                    PrecOrd::Equal if f != g => facts.push(PrecFact::Equiv(f.clone(), g.clone())),
                    _ => {}
                }
            }
        }
    }
    let mut per_rule = Vec::with_capacity(trs.rules().len());
    for rule in trs.rules() {
        match gt(&rule.lhs, &rule.rhs, wf, p, &mut facts)? {
            Some(case) => per_rule.push(RuleProof { rule: rule.clone(), case }),
            None => return Err(KboError::NotOriented(rule.clone())),
        }
    }
    facts.sort();
    facts.dedup();
    Ok(KboProof { weights: wf.clone(), precedence: p.clone(), per_rule, used: facts })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecedenceMode {
    Strict,
    Quasi,
}

impl std::str::FromStr for PrecedenceMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "strict" => Ok(PrecedenceMode::Strict),
            "quasi" => Ok(PrecedenceMode::Quasi),
            _ => Err(format!("unknown precedence mode `{s}`")),
        }
    }
}

impl fmt::Display for PrecedenceMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrecedenceMode::Strict => "strict",
            PrecedenceMode::Quasi => "quasi",
        })
    }
}

/// Upper bound on the number of candidate parameter sets [`brute_force`] visits.
pub const BRUTE_FORCE_LIMIT: u128 = 50_000_000;

/// All total quasi-orders (or, in strict mode, total orders) on `n`
/// elements, as rank vectors using ranks `0..blocks`.
pub fn total_quasi_orders(n: usize, mode: PrecedenceMode) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut ranks = vec![0u64; n];
    fn rec(i: usize, ranks: &mut Vec<u64>, out: &mut Vec<Vec<u64>>, mode: PrecedenceMode) {
        let n = ranks.len();
        if i == n {
            let mut used = vec![false; n];
            for &r in ranks.iter() {
                used[r as usize] = true;
            }
            let blocks = used.iter().filter(|&&u| u).count();
            // ranks must cover a prefix 0..blocks
            if used[..blocks].iter().all(|&u| u)
                && (mode == PrecedenceMode::Quasi || blocks == n)
            {
                out.push(ranks.clone());
            }
            return;
        }
        for r in 0..n as u64 {
            ranks[i] = r;
            rec(i + 1, ranks, out, mode);
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    rec(0, &mut ranks, &mut out, mode);
    out
}

/// Exhaustive search for admissible parameters with all weights and `w0`
/// bounded by `max_weight` that orient every rule.
pub fn brute_force(
    trs: &Trs,
    max_weight: u64,
    mode: PrecedenceMode,
) -> Result<Option<(WeightFunction, Precedence)>, KboError> {
    let sig = trs.signature();
    let n = sig.len();
    let orders = total_quasi_orders(n, mode);
    let space = (u128::from(max_weight) + 1).pow(n as u32) * u128::from(max_weight) * orders.len() as u128;
    if space > BRUTE_FORCE_LIMIT {
        return Err(KboError::SearchTooLarge(space));
    }
    let precs: Vec<Precedence> = orders
        .iter()
        .map(|ranks| Precedence::from_ranks(sig.iter().cloned().zip(ranks.iter().copied())))
        .collect();
    let mut weights = vec![0u64; n];
    loop {
        for w0 in 1..=max_weight {
            let wf = WeightFunction {
                weights: sig.iter().cloned().zip(weights.iter().copied()).collect(),
                w0,
            };
            if sig.iter().zip(&weights).any(|(f, &w)| f.is_constant() && w < w0) {
                continue;
            }
            // weight-only pre-filter: every rule needs w(l) >= w(r)
            let mut heavier = true;
            for r in trs.rules() {
                if term_weight(&wf, &r.lhs)? < term_weight(&wf, &r.rhs)? {
                    heavier = false;
                    break;
                }
            }
            if !heavier {
                continue;
            }
            for p in &precs {
                if orients(trs, &wf, p).is_ok() {
                    return Ok(Some((wf, p.clone())));
                }
            }
        }
        // next weight vector, little-endian counter
        let mut i = 0;
        loop {
            if i == n {
                return Ok(None);
            }
            if weights[i] < max_weight {
                weights[i] += 1;
                break;
            }
            weights[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_trs;

    fn x() -> Term {
        Term::var("x")
    }

    #[test]
    fn weights() {
        let sig = [Symbol::new("unit", 1)];
        let wf = WeightFunction::from_names(&sig, &[("unit", 1)], 1);
        assert_eq!(term_weight(&wf, &Term::app("unit", vec![x()])).unwrap(), 2);
        assert_eq!(term_weight(&wf, &x()).unwrap(), 1);
        assert!(matches!(
            term_weight(&wf, &Term::app("g", vec![x()])),
            Err(KboError::UnknownSymbol(_))
        ));
    }

    #[test]
    fn admissibility() {
        let sig = [Symbol::new("f", 1), Symbol::new("g", 1)];
        let wf = WeightFunction::from_names(&sig, &[("f", 0), ("g", 1)], 1);
        let good = Precedence::from_chain(&sig, "f > g").unwrap();
        let bad = Precedence::from_chain(&sig, "g > f").unwrap();
        assert!(is_admissible(&wf, &good, &sig));
        assert!(!is_admissible(&wf, &bad, &sig));
        let zero = WeightFunction { w0: 0, ..wf };
        assert!(!is_admissible(&zero, &good, &sig));
    }

    #[test]
    fn constant_lighter_than_w0() {
        let sig = [Symbol::new("a", 0)];
        let wf = WeightFunction::from_names(&sig, &[("a", 1)], 2);
        assert!(!is_admissible(&wf, &Precedence::default(), &sig));
    }

    #[test]
    fn variable_condition_blocks() {
        let s = Term::app("f", vec![x()]);
        let t = Term::app("g", vec![x(), x()]);
        let sig = [Symbol::new("f", 1), Symbol::new("g", 2)];
        let wf = WeightFunction::from_names(&sig, &[("f", 9), ("g", 0)], 1);
        let p = Precedence::from_chain(&sig, "f > g").unwrap();
        assert_eq!(kbo_gt(&s, &t, &wf, &p).unwrap(), None);
        assert_eq!(kbo_gt(&s, &s, &wf, &p).unwrap(), None);
    }

    #[test]
    fn quasi_equal_roots_without_difference() {
        // f ~ g with different arities and equal common prefix never decreases
        let sig = [Symbol::new("f", 2), Symbol::new("g", 1)];
        let wf = WeightFunction::from_names(&sig, &[("f", 0), ("g", 1)], 1);
        let p = Precedence::from_chain(&sig, "f ~ g").unwrap();
        let s = Term::app("f", vec![x(), Term::var("y")]);
        let t = Term::app("g", vec![x()]);
        assert_eq!(term_weight(&wf, &s).unwrap(), term_weight(&wf, &t).unwrap());
        assert_eq!(kbo_gt(&s, &t, &wf, &p).unwrap(), None);
    }

    #[test]
    fn quasi_orders_count() {
        // ordered Bell numbers 1, 1, 3, 13, 75
        let counts: Vec<usize> =
            (0..5).map(|n| total_quasi_orders(n, PrecedenceMode::Quasi).len()).collect();
        assert_eq!(counts, vec![1, 1, 3, 13, 75]);
        assert_eq!(total_quasi_orders(4, PrecedenceMode::Strict).len(), 24);
    }

    #[test]
    fn brute_force_small() {
        let trs = parse_trs("(VAR x) (RULES f(x) -> x)").unwrap();
        let (wf, p) = brute_force(&trs, 1, PrecedenceMode::Quasi).unwrap().unwrap();
        assert!(orients(&trs, &wf, &p).is_ok());

        let trs = parse_trs("(VAR x) (RULES g(x) -> g(g(x)))").unwrap();
        assert!(brute_force(&trs, 3, PrecedenceMode::Quasi).unwrap().is_none());
    }

    #[test]
    fn brute_force_limit() {
        let trs = parse_trs("(VAR x) (RULES a(b(c(d(e(f(x)))))) -> x)").unwrap();
        assert!(matches!(
            brute_force(&trs, 7, PrecedenceMode::Quasi),
            Err(KboError::SearchTooLarge(_))
        ));
    }

    #[test]
    fn precedence_display() {
        let sig = [Symbol::new("a", 0), Symbol::new("b", 1), Symbol::new("c", 1)];
        let p = Precedence::from_chain(&sig, "b ~ c > a").unwrap();
        assert_eq!(p.to_string(), "b ~ c > a");
        assert!(!p.is_strict());
        assert_eq!(Precedence::default().to_string(), "(empty)");
    }
}
