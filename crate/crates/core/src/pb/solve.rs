//! Solving pseudo-boolean problems by translation to CNF.
//!
//! Every constraint is normalized to `Σ a_i l_i >= b` with positive
//! coefficients over literals; the weighted literals are summed with the
//! adder circuits into a binary total that is compared against `b`.

use super::{PbConstraint, PbProblem, Relation};
use crate::logic::{
    bit_length, bv_add_wide, bv_geq, tseitin, BitVector, Cnf, Formula, Var, VarPool, WeightedBits,
};
use crate::solver::{solve_with, Limit, Model, SolveResult, SolverConfig};

/// `Σ a_i * l_i >= bound` with `a_i > 0` over signed literals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalGe {
    pub terms: Vec<(u64, i32)>,
    pub bound: i64,
}

impl NormalGe {
    pub fn holds(&self, value: &dyn Fn(Var) -> bool) -> bool {
        let sum: i128 = self
            .terms
            .iter()
            .filter(|(_, l)| value(Var(l.unsigned_abs())) == (*l > 0))
            .map(|&(a, _)| i128::from(a))
            .sum();
        sum >= i128::from(self.bound)
    }
}

fn normal_ge(terms: &[(i64, Var)], bound: i64) -> NormalGe {
    let mut b = bound;
    let mut out = Vec::with_capacity(terms.len());
    for &(a, v) in terms {
        if a > 0 {
            out.push((a as u64, v.lit()));
        } else {
            // a*x = a + |a|*(1-x)
            out.push((a.unsigned_abs(), -v.lit()));
            b -= a;
        }
    }
    NormalGe { terms: out, bound: b }
}

/// Rewrites a constraint into one or two `≥` constraints with positive
/// coefficients; `=` becomes a `≥` and a negated `≤`.
pub fn normalize(c: &PbConstraint) -> Vec<NormalGe> {
    let neg: Vec<(i64, Var)> = c.terms.iter().map(|&(a, v)| (-a, v)).collect();
    match c.relation {
        Relation::Ge => vec![normal_ge(&c.terms, c.bound)],
        Relation::Le => vec![normal_ge(&neg, -c.bound)],
        Relation::Eq => vec![normal_ge(&c.terms, c.bound), normal_ge(&neg, -c.bound)],
    }
}

fn lit(l: i32) -> Formula {
    let v = Formula::var(Var(l.unsigned_abs()));
    if l > 0 {
        v
    } else {
        v.not()
    }
}

fn ge_formula(c: &NormalGe, pool: &mut VarPool) -> Formula {
    if c.bound <= 0 {
        return Formula::tru();
    }
    let b = c.bound as u64;
    let clipped: Vec<(u64, i32)> = c.terms.iter().map(|&(a, l)| (a.min(b), l)).collect();
    let total: u128 = clipped.iter().map(|&(a, _)| u128::from(a)).sum();
    if total < u128::from(b) {
        return Formula::fls();
    }
    if clipped.iter().all(|&(a, _)| a == b) {
        return Formula::or(clipped.iter().map(|&(_, l)| lit(l)).collect::<Vec<_>>());
    }
    if total == u128::from(b) {
        return Formula::and(clipped.iter().map(|&(_, l)| lit(l)).collect::<Vec<_>>());
    }
    let mut layer: Vec<(WeightedBits, u128)> = clipped
        .iter()
        .map(|&(a, l)| {
            let w = bit_length(u128::from(a));
            let bits = (0..w)
                .rev()
                .map(|i| if (a >> i) & 1 == 1 { lit(l) } else { Formula::fls() })
                .collect();
            (WeightedBits::plain(BitVector::from_msb(bits)), u128::from(a))
        })
        .collect();
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len() / 2 + 1);
        let mut it = layer.into_iter();
        while let Some((x, bx)) = it.next() {
            match it.next() {
                Some((y, by)) => {
                    let bound = bx + by;
                    next.push((bv_add_wide(&x, &y, bit_length(bound), pool), bound));
                }
                None => next.push((x, bx)),
            }
        }
        layer = next;
    }
    let (sum, _) = layer.pop().expect("at least one term");
    let w = sum.bits.width().max(bit_length(u128::from(b)));
    let geq = bv_geq(&sum.bits.zero_extend(w), &BitVector::constant(u128::from(b), w)).unwrap();
    Formula::and2(&geq, &sum.side)
}

/// CNF whose models, restricted to the first `num_vars` variables, are
/// exactly the models of the constraints.
pub fn pb_to_cnf(constraints: &[PbConstraint], num_vars: u32) -> Cnf {
    let mut pool = VarPool::starting_after(num_vars);
    let parts: Vec<Formula> = constraints
        .iter()
        .flat_map(normalize)
        .map(|n| ge_formula(&n, &mut pool))
        .collect();
    tseitin(&Formula::and(parts), &mut pool)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PbResult {
    Sat(Model),
    Unsat,
    Unknown(Limit),
}

fn check(constraints: &[PbConstraint], m: &Model) {
    for c in constraints {
        assert!(c.holds(&|v| m.value(v.id())), "model violates {c}");
    }
}

pub fn solve_constraints(constraints: &[PbConstraint], num_vars: u32, config: &SolverConfig) -> PbResult {
    let cnf = pb_to_cnf(constraints, num_vars);
    match solve_with(&cnf, config) {
        SolveResult::Sat(m) => {
            check(constraints, &m);
            PbResult::Sat(m)
        }
        SolveResult::Unsat => PbResult::Unsat,
        SolveResult::Unknown(l) => PbResult::Unknown(l),
    }
}

pub fn solve_pb(p: &PbProblem, config: &SolverConfig) -> PbResult {
    solve_constraints(&p.constraints, p.num_vars, config)
}

#[derive(Clone, Debug)]
pub struct MinimizeResult {
    /// Best model found and its objective value.
    pub best: Option<(Model, i64)>,
    /// True when the last step proved that no better value exists.
    pub optimal: bool,
    /// Objective value of every model found, in order.
    pub trace: Vec<i64>,
    pub limit: Option<Limit>,
}

/// Linear descent: solve, then demand an objective at most one below the
/// last value, until the problem becomes unsatisfiable or a limit hits.
pub fn minimize(p: &PbProblem, objective: &[(i64, Var)], config: &SolverConfig) -> MinimizeResult {
    let goal = PbConstraint::new(objective.iter().copied(), Relation::Ge, 0);
    let mut constraints = p.constraints.clone();
    let mut result = MinimizeResult { best: None, optimal: false, trace: Vec::new(), limit: None };
    loop {
        match solve_constraints(&constraints, p.num_vars, config) {
            PbResult::Sat(m) => {
                let v = goal.lhs(&|x| m.value(x.id()));
                result.trace.push(v);
                result.best = Some((m, v));
                constraints.truncate(p.constraints.len());
                constraints.push(PbConstraint::le(objective.iter().copied(), v - 1));
            }
            PbResult::Unsat => {
                result.optimal = result.best.is_some();
                return result;
            }
            PbResult::Unknown(l) => {
                result.limit = Some(l);
                return result;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(cs: &[PbConstraint], n: u32) -> PbResult {
        solve_constraints(cs, n, &SolverConfig::default())
    }

    #[test]
    fn forced_pair() {
        match solve(&[PbConstraint::ge([(1, Var(1)), (1, Var(2))], 2)], 2) {
            PbResult::Sat(m) => assert!(m.value(1) && m.value(2)),
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn contradiction() {
        let cs = [PbConstraint::ge([(2, Var(1)), (1, Var(2))], 2), PbConstraint::eq([(1, Var(1))], 0)];
        assert_eq!(solve(&cs, 2), PbResult::Unsat);
    }

    #[test]
    fn negative_coefficients() {
        // x1 - x2 >= 1 forces x1 and not x2
        match solve(&[PbConstraint::ge([(1, Var(1)), (-1, Var(2))], 1)], 2) {
            PbResult::Sat(m) => assert!(m.value(1) && !m.value(2)),
            r => panic!("{r:?}"),
        }
        let n = normalize(&PbConstraint::ge([(1, Var(1)), (-1, Var(2))], 1));
        assert_eq!(n, vec![NormalGe { terms: vec![(1, 1), (1, -2)], bound: 2 }]);
    }

    #[test]
    fn empty_constraints() {
        assert!(matches!(solve(&[PbConstraint::ge([], 0)], 0), PbResult::Sat(_)));
        assert_eq!(solve(&[PbConstraint::ge([], 1)], 0), PbResult::Unsat);
    }
}
