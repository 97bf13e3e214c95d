//! Pseudo-boolean constraints and the KBO encoding built from them.

mod encode;
mod opb;
mod solve;

use std::collections::BTreeMap;
use std::fmt;

use crate::logic::Var;

pub use encode::{adm_pbc, kbo_pbc, objective, prec_pbc, Objective, PbEncoder, PbProblem};
pub use opb::{parse_opb, to_opb, OpbError, OpbInstance};
pub use solve::{
    minimize, normalize, pb_to_cnf, solve_constraints, solve_pb, MinimizeResult, NormalGe, PbResult,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Ge,
    Eq,
    Le,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Ge => ">=",
            Relation::Eq => "=",
            Relation::Le => "<=",
        })
    }
}

/// `Σ a_i * x_i  ∘  bound` over 0/1 variables. Each variable occurs at most
/// once and no coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbConstraint {
    pub terms: Vec<(i64, Var)>,
    pub relation: Relation,
    pub bound: i64,
}

impl PbConstraint {
    /// Coalesces repeated variables, keeping the order of first occurrence,
    /// and drops zero coefficients.
    pub fn new(terms: impl IntoIterator<Item = (i64, Var)>, relation: Relation, bound: i64) -> Self {
        let mut order = Vec::new();
        let mut sum: BTreeMap<Var, i64> = BTreeMap::new();
        for (a, v) in terms {
            let e = sum.entry(v).or_insert_with(|| {
                order.push(v);
                0
            });
            *e += a;
        }
        let terms = order.into_iter().map(|v| (sum[&v], v)).filter(|&(a, _)| a != 0).collect();
        PbConstraint { terms, relation, bound }
    }

    pub fn ge(terms: impl IntoIterator<Item = (i64, Var)>, bound: i64) -> Self {
        PbConstraint::new(terms, Relation::Ge, bound)
    }

    pub fn eq(terms: impl IntoIterator<Item = (i64, Var)>, bound: i64) -> Self {
        PbConstraint::new(terms, Relation::Eq, bound)
    }

    pub fn le(terms: impl IntoIterator<Item = (i64, Var)>, bound: i64) -> Self {
        PbConstraint::new(terms, Relation::Le, bound)
    }

    pub fn lhs(&self, value: &dyn Fn(Var) -> bool) -> i64 {
        self.terms.iter().filter(|(_, v)| value(*v)).map(|(a, _)| a).sum()
    }

    pub fn holds(&self, value: &dyn Fn(Var) -> bool) -> bool {
        let l = self.lhs(value);
        match self.relation {
            Relation::Ge => l >= self.bound,
            Relation::Eq => l == self.bound,
            Relation::Le => l <= self.bound,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.terms.iter().map(|&(_, v)| v)
    }
}

impl fmt::Display for PbConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, (a, v)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a:+}*{v}")?;
        }
        write!(f, " {} {}", self.relation, self.bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coalesces_and_drops_zeros() {
        let c = PbConstraint::ge([(2, Var(1)), (3, Var(2)), (-2, Var(1))], 1);
        assert_eq!(c.terms, vec![(3, Var(2))]);
        let d = PbConstraint::ge([(1, Var(3)), (1, Var(3))], 2);
        assert_eq!(d.terms, vec![(2, Var(3))]);
    }

    #[test]
    fn evaluation() {
        let c = PbConstraint::eq([(2, Var(1)), (-1, Var(2))], 1);
        assert!(c.holds(&|v| v == Var(1) || v == Var(2)));
        assert!(!c.holds(&|v| v == Var(1)));
        assert_eq!(c.to_string(), "+2*v1 -1*v2 = 1");
    }
}
