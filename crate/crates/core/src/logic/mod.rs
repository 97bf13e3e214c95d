//! Propositional formulas, binary arithmetic over them, and CNF output.

mod bitvec;
mod cnf;
mod formula;

pub use bitvec::{
    bit_length, bv_add, bv_add_wide, bv_eq, bv_geq, bv_gt, BitVector, WeightedBits, WidthMismatch,
};
pub use cnf::{parse_dimacs, to_dimacs, tseitin, Cnf, DimacsError};
pub use formula::{simplify, Formula, Node, Var, VarPool};
