//! Fixed-width binary numbers over formulas: comparators and the
//! carry/sum adder.

use super::formula::{Formula, Var, VarPool};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bit width mismatch: {0} vs {1}")]
pub struct WidthMismatch(pub usize, pub usize);

/// Binary number, most significant bit first.
#[derive(Clone, Debug)]
pub struct BitVector {
    bits: Vec<Formula>,
}

impl BitVector {
    pub fn from_msb(bits: Vec<Formula>) -> Self {
        assert!(!bits.is_empty(), "bit vectors are never empty");
        BitVector { bits }
    }

    pub fn from_vars(vars: &[Var]) -> Self {
        BitVector::from_msb(vars.iter().map(|&v| Formula::var(v)).collect())
    }

    pub fn fresh(pool: &mut VarPool, width: usize) -> (Self, Vec<Var>) {
        let vars: Vec<Var> = (0..width).map(|_| pool.fresh()).collect();
        (BitVector::from_vars(&vars), vars)
    }

    pub fn constant(value: u128, width: usize) -> Self {
        assert!(width >= 1);
        assert!(width >= 128 || value < (1u128 << width), "{value} does not fit {width} bits");
        let bits = (0..width)
            .rev()
            .map(|i| Formula::constant(i < 128 && (value >> i) & 1 == 1))
            .collect();
        BitVector { bits }
    }

    pub fn zero(width: usize) -> Self {
        BitVector::constant(0, width)
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn msb_first(&self) -> &[Formula] {
        &self.bits
    }

    /// Bit `i` counted from the least significant bit, starting at 1.
    pub fn bit(&self, i: usize) -> &Formula {
        &self.bits[self.bits.len() - i]
    }

    /// Pads with leading zeros up to `width`.
    pub fn zero_extend(&self, width: usize) -> BitVector {
        assert!(width >= self.width());
        let mut bits = vec![Formula::fls(); width - self.width()];
        bits.extend(self.bits.iter().cloned());
        BitVector { bits }
    }

    pub fn eval(&self, assignment: &dyn Fn(Var) -> bool) -> u128 {
        self.bits.iter().fold(0, |acc, b| (acc << 1) | u128::from(b.eval(assignment)))
    }

    pub fn as_const(&self) -> Option<u128> {
        self.bits
            .iter()
            .try_fold(0u128, |acc, b| b.as_const().map(|v| (acc << 1) | u128::from(v)))
    }
}

fn check(f: &BitVector, g: &BitVector) -> Result<(), WidthMismatch> {
    if f.width() == g.width() {
        Ok(())
    } else {
        Err(WidthMismatch(f.width(), g.width()))
    }
}

/// `f > g`, unfolded from the least significant bit upwards.
pub fn bv_gt(f: &BitVector, g: &BitVector) -> Result<Formula, WidthMismatch> {
    check(f, g)?;
    let k = f.width();
    let mut acc = Formula::and2(f.bit(1), &g.bit(1).not());
    for j in 2..=k {
        let strict = Formula::and2(f.bit(j), &g.bit(j).not());
        let same = Formula::iff(f.bit(j), g.bit(j));
        acc = Formula::or2(&strict, &Formula::and2(&same, &acc));
    }
    Ok(acc)
}

pub fn bv_eq(f: &BitVector, g: &BitVector) -> Result<Formula, WidthMismatch> {
    check(f, g)?;
    Ok(Formula::and((1..=f.width()).map(|i| Formula::iff(f.bit(i), g.bit(i))).collect::<Vec<_>>()))
}

pub fn bv_geq(f: &BitVector, g: &BitVector) -> Result<Formula, WidthMismatch> {
    Ok(Formula::or2(&bv_gt(f, g)?, &bv_eq(f, g)?))
}

/// A number together with the constraints defining its bits.
#[derive(Clone, Debug)]
pub struct WeightedBits {
    pub bits: BitVector,
    pub side: Formula,
}

impl WeightedBits {
    pub fn plain(bits: BitVector) -> Self {
        WeightedBits { bits, side: Formula::tru() }
    }
}

/// Ripple-carry addition with fresh carry and sum variables. The side
/// constraint forbids a carry into and out of the vector, so a sum that
/// does not fit in the width makes it unsatisfiable.
pub fn bv_add(
    a: &WeightedBits,
    b: &WeightedBits,
    pool: &mut VarPool,
) -> Result<WeightedBits, WidthMismatch> {
    check(&a.bits, &b.bits)?;
    let k = a.bits.width();
    let carries: Vec<Formula> = (0..=k).map(|_| Formula::var(pool.fresh())).collect();
    let (sum, _) = BitVector::fresh(pool, k);
    let mut parts = vec![a.side.clone(), b.side.clone(), carries[k].not(), carries[0].not()];
    for i in 1..=k {
        let (f, g, c) = (a.bits.bit(i), b.bits.bit(i), &carries[i - 1]);
        let carry = Formula::or([Formula::and2(f, g), Formula::and2(f, c), Formula::and2(g, c)]);
        parts.push(Formula::iff(&carries[i], &carry));
    }
    for i in 1..=k {
        let (f, g, c) = (a.bits.bit(i), b.bits.bit(i), &carries[i - 1]);
        parts.push(Formula::iff(sum.bit(i), &Formula::xor(&Formula::xor(f, g), c)));
    }
    Ok(WeightedBits { bits: sum, side: Formula::and(parts) })
}

/// Adds after zero-extending both operands to `width`, so that sums up to
/// `2^width - 1` fit. A constant-zero operand adds nothing.
pub fn bv_add_wide(
    a: &WeightedBits,
    b: &WeightedBits,
    width: usize,
    pool: &mut VarPool,
) -> WeightedBits {
    let a = WeightedBits { bits: a.bits.zero_extend(width), side: a.side.clone() };
    let b = WeightedBits { bits: b.bits.zero_extend(width), side: b.side.clone() };
    if a.bits.as_const() == Some(0) {
        return WeightedBits { bits: b.bits, side: Formula::and2(&a.side, &b.side) };
    }
    if b.bits.as_const() == Some(0) {
        return WeightedBits { bits: a.bits, side: Formula::and2(&a.side, &b.side) };
    }
    bv_add(&a, &b, pool).expect("operands extended to a common width")
}

/// Number of bits needed for `v`, at least one.
pub fn bit_length(v: u128) -> usize {
    (128 - v.leading_zeros() as usize).max(1)
}
