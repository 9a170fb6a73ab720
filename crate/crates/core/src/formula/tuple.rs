use std::fmt;

use super::{Formula, FormulaError, VarId};

/// Fixed-width bit vector, most significant bit first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitTuple {
    bits: Vec<bool>,
}

impl BitTuple {
    pub fn from_value(value: u128, width: usize) -> Result<BitTuple, FormulaError> {
        if width == 0 || (width < 128 && value >> width != 0) {
            return Err(FormulaError::ValueTooWide { value, width });
        }
        let bits = (0..width)
            .map(|i| {
                let shift = width - 1 - i;
                shift < 128 && (value >> shift) & 1 == 1
            })
            .collect();
        Ok(BitTuple { bits })
    }

    pub fn from_bits(bits: Vec<bool>) -> BitTuple {
        assert!(!bits.is_empty(), "bit tuples have positive width");
        BitTuple { bits }
    }

    pub fn zeros(width: usize) -> BitTuple {
        BitTuple {
            bits: vec![false; width],
        }
    }

    pub fn width(&self) -> usize {
        self.bits.len()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Integer value; widths beyond 128 keep only the low 128 bits.
    pub fn value(&self) -> u128 {
        self.bits
            .iter()
            .fold(0u128, |acc, &b| acc.wrapping_shl(1) | b as u128)
    }
}

impl fmt::Display for BitTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

/// A tuple of formulas: variables, constants or bitwise combinations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tuple(Vec<Formula>);

impl Tuple {
    pub fn new(elems: Vec<Formula>) -> Tuple {
        Tuple(elems)
    }

    pub fn of_vars(vars: &[VarId]) -> Tuple {
        Tuple(vars.iter().map(|v| Formula::var(*v)).collect())
    }

    pub fn constant(bits: &BitTuple) -> Tuple {
        Tuple(bits.bits().iter().map(|&b| Formula::constant(b)).collect())
    }

    pub fn value(value: u128, width: usize) -> Result<Tuple, FormulaError> {
        Ok(Tuple::constant(&BitTuple::from_value(value, width)?))
    }

    pub fn zeros(width: usize) -> Tuple {
        Tuple(vec![Formula::falsity(); width])
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn elems(&self) -> &[Formula] {
        &self.0
    }

    /// Componentwise exclusive or.
    pub fn xor(&self, other: &Tuple) -> Result<Tuple, FormulaError> {
        same_width(self, other)?;
        Ok(Tuple(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| Formula::xor(a.clone(), b.clone()))
                .collect(),
        ))
    }
}

fn same_width(a: &Tuple, b: &Tuple) -> Result<(), FormulaError> {
    if a.width() != b.width() {
        return Err(FormulaError::WidthMismatch {
            left: a.width(),
            right: b.width(),
        });
    }
    Ok(())
}

/// Conjunction of positionwise equivalences.
pub fn tuple_equiv(lhs: &Tuple, rhs: &Tuple) -> Result<Formula, FormulaError> {
    same_width(lhs, rhs)?;
    Ok(Formula::and(
        lhs.0
            .iter()
            .zip(&rhs.0)
            .map(|(a, b)| Formula::equiv(a.clone(), b.clone()))
            .collect(),
    ))
}

fn bit_less(a: &Formula, b: &Formula) -> Formula {
    Formula::and(vec![
        Formula::equiv(a.clone(), Formula::falsity()),
        Formula::equiv(b.clone(), Formula::truth()),
    ])
}

/// Strict lexicographic `lhs < rhs`, nested from the most significant bit:
/// `a0<b0 ∨ (a0≡b0 ∧ (a1<b1 ∨ (…)))`.
pub fn lex_less(lhs: &Tuple, rhs: &Tuple) -> Result<Formula, FormulaError> {
    same_width(lhs, rhs)?;
    let w = lhs.width();
    if w == 0 {
        return Ok(Formula::falsity());
    }
    let mut acc = bit_less(&lhs.0[w - 1], &rhs.0[w - 1]);
    for i in (0..w - 1).rev() {
        acc = Formula::or(vec![
            bit_less(&lhs.0[i], &rhs.0[i]),
            Formula::and(vec![Formula::equiv(lhs.0[i].clone(), rhs.0[i].clone()), acc]),
        ]);
    }
    Ok(acc)
}

pub fn lex_greater(lhs: &Tuple, rhs: &Tuple) -> Result<Formula, FormulaError> {
    lex_less(rhs, lhs)
}

pub fn lex_geq(lhs: &Tuple, rhs: &Tuple) -> Result<Formula, FormulaError> {
    Ok(Formula::or(vec![lex_less(rhs, lhs)?, tuple_equiv(lhs, rhs)?]))
}
