//! Reading parameters out of a model, re-checking them with the direct
//! order, and printing the result.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::kbo::{orients, Case, KboError, KboProof, PrecFact, Precedence, PrecedenceMode, WeightFunction};
use crate::logic::Var;
use crate::solver::Model;
use crate::term::{Symbol, Trs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    Sat,
    Pbc,
}

impl std::str::FromStr for EngineKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "sat" => Ok(EngineKind::Sat),
            "pbc" => Ok(EngineKind::Pbc),
            _ => Err(format!("unknown engine `{s}`")),
        }
    }
}

impl std::fmt::Display for EngineKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EngineKind::Sat => "sat",
            EngineKind::Pbc => "pbc",
        })
    }
}

/// Where the parameters live in a model. Bit lists are most significant
/// bit first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeTables {
    pub engine: EngineKind,
    pub k: usize,
    pub l: usize,
    pub mode: PrecedenceMode,
    pub symbols: Vec<Symbol>,
    pub weight_bits: Vec<Vec<Var>>,
    pub w0_bits: Vec<Var>,
    pub code_bits: Vec<Vec<Var>>,
}

fn read(bits: &[Var], m: &Model) -> u64 {
    bits.iter().fold(0, |acc, v| (acc << 1) | u64::from(m.value(v.id())))
}

fn write(bits: &[Var], value: u64, m: &mut Model) {
    for (j, v) in bits.iter().rev().enumerate() {
        m.set(v.id(), (value >> j) & 1 == 1);
    }
}

impl DecodeTables {
    /// Largest variable id mentioned by the tables.
    pub fn max_var(&self) -> u32 {
        self.weight_bits
            .iter()
            .chain(self.code_bits.iter())
            .chain(std::iter::once(&self.w0_bits))
            .flatten()
            .map(|v| v.id())
            .max()
            .unwrap_or(0)
    }

    /// Symbol codes `i(f)` as stored in the model.
    pub fn codes(&self, m: &Model) -> Vec<u64> {
        self.code_bits.iter().map(|b| read(b, m)).collect()
    }

    /// Writes weights and codes into the table variables of `m`.
    pub fn assign(&self, wf: &WeightFunction, codes: &[u64], m: &mut Model) {
        for (i, f) in self.symbols.iter().enumerate() {
            write(&self.weight_bits[i], wf.weights[f], m);
            write(&self.code_bits[i], codes[i], m);
        }
        write(&self.w0_bits, wf.w0, m);
    }
}

/// Weights are the binary values of the weight bits. The precedence is the
/// total quasi-order by code `i(f)`, except that a constant is never made
/// equivalent to another symbol: it is placed directly below the symbols
/// sharing its code. In strict mode ties are broken by signature order.
pub fn decode(m: &Model, t: &DecodeTables) -> (WeightFunction, Precedence) {
    let mut wf = WeightFunction::new(read(&t.w0_bits, m));
    for (i, f) in t.symbols.iter().enumerate() {
        wf.weights.insert(f.clone(), read(&t.weight_bits[i], m));
    }
    let codes = t.codes(m);
    let strict = t.mode == PrecedenceMode::Strict;
    // (code, non-constant, tie-breaker)
    let key = |i: usize| {
        let f = &t.symbols[i];
        let single = strict || f.is_constant();
        (codes[i], !f.is_constant(), if single { i + 1 } else { 0 })
    };
    let mut order: Vec<usize> = (0..t.symbols.len()).collect();
    order.sort_by_key(|&i| key(i));
    let mut ranks = Vec::new();
    let mut rank = 0u64;
    for (pos, &i) in order.iter().enumerate() {
        if pos > 0 && key(order[pos - 1]) != key(i) {
            rank += 1;
        }
        ranks.push((t.symbols[i].clone(), rank));
    }
    (wf, Precedence::from_ranks(ranks))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("decoded parameters do not prove termination ({cause}); w0 = {}, precedence {precedence}", weights.w0)]
pub struct SoundnessError {
    pub cause: KboError,
    pub weights: WeightFunction,
    pub precedence: Precedence,
}

/// The final gate before answering YES.
pub fn verify(trs: &Trs, wf: &WeightFunction, p: &Precedence) -> Result<KboProof, Box<SoundnessError>> {
    orients(trs, wf, p).map_err(|cause| {
        Box::new(SoundnessError { cause, weights: wf.clone(), precedence: p.clone() })
    })
}

/// Chains covering the precedence facts a proof relies on, e.g.
/// `["3 > 1 > 2", "1 > 4"]`. Equivalent symbols are printed as `f ~ g`.
pub fn used_chains(used: &[PrecFact], sig: &[Symbol]) -> Vec<String> {
    // union equivalent symbols into classes
    let pos: BTreeMap<&Symbol, usize> = sig.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut parent: Vec<usize> = (0..sig.len()).collect();
    fn find(p: &mut Vec<usize>, i: usize) -> usize {
        if p[i] != i {
            let r = find(p, p[i]);
            p[i] = r;
        }
        p[i]
    }
    let mut involved = BTreeSet::new();
    for fact in used {
        if let PrecFact::Equiv(f, g) = fact {
            let (a, b) = (find(&mut parent, pos[f]), find(&mut parent, pos[g]));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut edges = BTreeSet::new();
    for fact in used {
        match fact {
            PrecFact::Greater(f, g) => {
                let (a, b) = (find(&mut parent, pos[f]), find(&mut parent, pos[g]));
                edges.insert((a, b));
                involved.insert(a);
                involved.insert(b);
            }
            PrecFact::Equiv(f, _) => {
                involved.insert(find(&mut parent, pos[f]));
            }
        }
    }
    let members = |root: usize, parent: &mut Vec<usize>| {
        let names: Vec<&str> =
            (0..sig.len()).filter(|&i| find(parent, i) == root).map(|i| sig[i].name()).collect();
        names.join(" ~ ")
    };
    // transitive reduction of the class relation
    let nodes: Vec<usize> = involved.iter().copied().collect();
    let reach = |from: usize, to: usize, skip: (usize, usize)| {
        let mut stack = vec![from];
        let mut seen = BTreeSet::new();
        while let Some(v) = stack.pop() {
            for &(a, b) in &edges {
                if a == v && (a, b) != skip && seen.insert(b) {
                    if b == to {
                        return true;
                    }
                    stack.push(b);
                }
            }
        }
        false
    };
    let hasse: BTreeSet<(usize, usize)> =
        edges.iter().copied().filter(|&(a, b)| !reach(a, b, (a, b))).collect();
    let mut uncovered = hasse.clone();
    let mut chains = Vec::new();
    let has_incoming = |v: usize| hasse.iter().any(|&(_, b)| b == v);
    let mut starts: Vec<usize> = nodes.iter().copied().filter(|&v| !has_incoming(v)).collect();
    starts.extend(nodes.iter().copied().filter(|&v| has_incoming(v)));
    for &s in &starts {
        while uncovered.iter().any(|&(a, _)| a == s) {
            let mut chain = vec![s];
            let mut cur = s;
            while let Some(&(a, b)) = uncovered.iter().find(|&&(a, _)| a == cur) {
                uncovered.remove(&(a, b));
                chain.push(b);
                cur = b;
            }
            chains.push(chain);
        }
    }
    let mut out: Vec<String> = chains
        .iter()
        .map(|c| c.iter().map(|&v| members(v, &mut parent)).collect::<Vec<_>>().join(" > "))
        .collect();
    // equivalence classes that take part in no strict fact
    for &v in &nodes {
        if !edges.iter().any(|&(a, b)| a == v || b == v) {
            out.push(members(v, &mut parent));
        }
    }
    out
}

/// Deterministic plain-text proof.
pub fn render(proof: &KboProof, sig: &[Symbol]) -> String {
    let mut out = String::new();
    writeln!(out, "w0 = {}", proof.weights.w0).unwrap();
    let mut by_name: Vec<(&Symbol, &u64)> = proof.weights.weights.iter().collect();
    by_name.sort_by(|a, b| a.0.name().cmp(b.0.name()).then(a.0.arity().cmp(&b.0.arity())));
    for (f, w) in by_name {
        writeln!(out, "w({f}) = {w}").unwrap();
    }
    let chains = used_chains(&proof.used, sig);
    if chains.is_empty() {
        writeln!(out, "precedence: (empty)").unwrap();
    } else {
        writeln!(out, "precedence: {}", chains.join(", ")).unwrap();
    }
    writeln!(out, "ranks: {}", proof.precedence).unwrap();
    for r in &proof.per_rule {
        writeln!(out, "{}   [{}]", r.rule, r.case).unwrap();
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleJson {
    pub rule: String,
    pub case: Case,
}

/// JSON form of a proof.
#[derive(Clone, Debug, Serialize)]
pub struct ProofJson {
    pub w0: u64,
    pub weights: BTreeMap<String, u64>,
    pub ranks: BTreeMap<String, u64>,
    pub precedence: Vec<String>,
    pub rules: Vec<RuleJson>,
}

impl ProofJson {
    pub fn new(proof: &KboProof, sig: &[Symbol]) -> Self {
        ProofJson {
            w0: proof.weights.w0,
            weights: proof.weights.weights.iter().map(|(f, &w)| (f.name().to_string(), w)).collect(),
            ranks: proof
                .precedence
                .ranks()
                .iter()
                .map(|(f, &r)| (f.name().to_string(), r))
                .collect(),
            precedence: used_chains(&proof.used, sig),
            rules: proof
                .per_rule
                .iter()
                .map(|r| RuleJson { rule: r.rule.to_string(), case: r.case })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::{EncodeOptions, SatEncoder};
    use crate::parse::{parse_srs, parse_trs};

    fn tables(trs: &Trs, k: usize, mode: PrecedenceMode) -> DecodeTables {
        SatEncoder::new(trs.signature(), EncodeOptions::new(k, mode)).tables()
    }

    #[test]
    fn positional_weights() {
        let trs = parse_trs("(VAR x) (RULES f(x) -> x)").unwrap();
        let t = tables(&trs, 2, PrecedenceMode::Quasi);
        let mut m = Model::from_values(vec![false; t.max_var() as usize]);
        m.set(t.weight_bits[0][0].id(), true);
        m.set(t.w0_bits[1].id(), true);
        let (wf, _) = decode(&m, &t);
        assert_eq!(wf.weights[&trs.signature()[0]], 2);
        assert_eq!(wf.w0, 1);
    }

    #[test]
    fn zero_bits_decode_to_zero() {
        let trs = parse_trs("(VAR x) (RULES f(x) -> x)").unwrap();
        let t = tables(&trs, 3, PrecedenceMode::Quasi);
        let m = Model::from_values(vec![false; t.max_var() as usize]);
        assert_eq!(decode(&m, &t).0.weights[&trs.signature()[0]], 0);
    }

    #[test]
    fn constants_never_equivalent() {
        let trs = parse_trs("(VAR) (RULES f(a) -> b)").unwrap();
        let t = tables(&trs, 2, PrecedenceMode::Quasi);
        let m = Model::from_values(vec![false; t.max_var() as usize]);
        let (_, p) = decode(&m, &t);
        assert_eq!(p.to_string(), "f > b > a");
    }

    #[test]
    fn corrupted_weights_fail_verification() {
        let trs = parse_srs("(RULES a a -> b)").unwrap();
        let sig = trs.signature();
        let good = WeightFunction::from_names(sig, &[("a", 1), ("b", 1)], 1);
        let p = Precedence::from_chain(sig, "a > b").unwrap();
        assert!(verify(&trs, &good, &p).is_ok());
        let bad = WeightFunction::from_names(sig, &[("a", 1), ("b", 3)], 1);
        let err = verify(&trs, &bad, &p).unwrap_err();
        assert!(matches!(err.cause, KboError::NotOriented(_)));
    }

    #[test]
    fn empty_precedence_renders() {
        let trs = parse_trs("(VAR x) (RULES f(x) -> x)").unwrap();
        let wf = WeightFunction::from_names(trs.signature(), &[("f", 1)], 1);
        let p = Precedence::from_chain(trs.signature(), "f").unwrap();
        let proof = verify(&trs, &wf, &p).unwrap();
        let text = render(&proof, trs.signature());
        assert!(text.contains("precedence: (empty)"), "{text}");
        assert_eq!(text, render(&proof, trs.signature()));
    }

    #[test]
    fn chains_from_facts() {
        let trs = parse_srs("(RULES 3 1 2 -> 5 6 4)").unwrap();
        let sig = trs.signature();
        let s = |n: &str| trs.symbol(n).unwrap().clone();
        let g = |a: &str, b: &str| PrecFact::Greater(s(a), s(b));
        let facts =
            vec![g("3", "1"), g("1", "2"), g("3", "2"), g("3", "5"), g("5", "6"), g("6", "2"), g("1", "4")];
        assert_eq!(used_chains(&facts, sig), vec!["3 > 1 > 2", "3 > 5 > 6 > 2", "1 > 4"]);
    }
}
