//! Seeded generator of small random rewrite systems.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::term::{Rule, Symbol, SystemKind, Term, Trs};

/// Size limits of the generated systems.
#[derive(Clone, Copy, Debug)]
pub struct Family {
    pub max_symbols: usize,
    pub max_arity: usize,
    pub max_depth: usize,
    pub max_rules: usize,
}

impl Default for Family {
    fn default() -> Self {
        Family { max_symbols: 3, max_arity: 2, max_depth: 3, max_rules: 3 }
    }
}

const NAMES: [&str; 6] = ["f", "g", "h", "k", "m", "n"];
const VARS: [&str; 2] = ["x", "y"];

fn term(rng: &mut StdRng, sig: &[Symbol], depth: usize) -> Term {
    let constants: Vec<&Symbol> = sig.iter().filter(|s| s.is_constant()).collect();
    if depth == 0 || rng.gen_bool(0.25) {
        if depth > 0 && !constants.is_empty() && rng.gen_bool(0.3) {
            return Term::constant(constants[rng.gen_range(0..constants.len())].name());
        }
        return Term::var(VARS[rng.gen_range(0..VARS.len())]);
    }
    let f = &sig[rng.gen_range(0..sig.len())];
    let args = (0..f.arity()).map(|_| term(rng, sig, depth - 1)).collect();
    Term::app(f.name(), args)
}

/// One system drawn from `family`.
pub fn random_trs(rng: &mut StdRng, family: &Family) -> Trs {
    let n = rng.gen_range(1..=family.max_symbols.min(NAMES.len()));
    let sig: Vec<Symbol> =
        (0..n).map(|i| Symbol::new(NAMES[i], rng.gen_range(0..=family.max_arity))).collect();
    let rules = (0..rng.gen_range(1..=family.max_rules))
        .map(|_| {
            let lhs = term(rng, &sig, family.max_depth);
            let depth = rng.gen_range(0..=family.max_depth);
            let rhs = term(rng, &sig, depth);
            Rule::new(lhs, rhs)
        })
        .collect();
    Trs::new(rules, SystemKind::Term).expect("fixed arities never conflict")
}

/// `count` systems from a fixed seed.
pub fn random_family(seed: u64, count: usize, family: &Family) -> Vec<Trs> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count).map(|_| random_trs(&mut rng, family)).collect()
}
