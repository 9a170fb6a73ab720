//! Quantified propositional formulas over typed, multi-indexed variables.

mod ops;
mod text;
mod tuple;

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use thiserror::Error;

pub use ops::{free_vars, natural_length, substitute, substitute_terms};
pub use text::{parse, render};
pub use tuple::{lex_geq, lex_greater, lex_less, tuple_equiv, BitTuple, Tuple};

/// Variable roles. Each role has a fixed number of indices; the last index
/// is always the bit position inside a tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarKind {
    /// `p[i]`: free-standing propositional variable, for hand-written formulas.
    Prop,
    /// `x[t][i]`: work-tape cell number a clause of color `t` talks about.
    WorkCell,
    /// `X[i]`: input-tape cell number.
    InputCell,
    /// `z[t][i]`: work-head position.
    WorkHead,
    /// `Z[t][i]`: input-head position.
    InputHead,
    /// `q[t][i]`: state number.
    State,
    /// `f[t][i]`: work-tape symbol code at cell `x[t]`.
    WorkSymbol,
    /// `F[i]`: input-tape symbol code at cell `X`.
    InputSymbol,
    /// `D[t][i]`: code of the symbol under the input head.
    ScannedInput,
    /// `d[t][i]`: code of the symbol under the work head.
    ScannedWork,
    /// `U[k][i]`: input-head position seen by instruction `k`.
    AuxInputHead,
    /// `u[k][i]`: work-head position seen by instruction `k`.
    AuxWorkHead,
    /// `V[k][i]`: input-head shift correction.
    AuxInputShift,
    /// `v[k][i]`: work-head shift correction.
    AuxWorkShift,
    /// `H[k][i]`: code of the input symbol under the moved head.
    AuxInputSeen,
    /// `h[k][i]`: code of the work symbol under the moved head.
    AuxWorkSeen,
    /// `w[k][i]`: a work-tape cell other than the written one.
    CopyCell,
    /// `g[k][i]`: the code kept in cell `w`.
    CopySymbol,
    /// `Y[k][i]`: midpoint configuration of ladder level `k`.
    Midpoint,
    /// `a[k][i]`: ladder level `k` source configuration.
    LadderFrom,
    /// `b[k][i]`: ladder level `k` target configuration.
    LadderTo,
    /// `u0[i]`: tape address ranging over a blank tail.
    TailCell,
}

impl VarKind {
    pub const ALL: [VarKind; 22] = [
        VarKind::Prop,
        VarKind::WorkCell,
        VarKind::InputCell,
        VarKind::WorkHead,
        VarKind::InputHead,
        VarKind::State,
        VarKind::WorkSymbol,
        VarKind::InputSymbol,
        VarKind::ScannedInput,
        VarKind::ScannedWork,
        VarKind::AuxInputHead,
        VarKind::AuxWorkHead,
        VarKind::AuxInputShift,
        VarKind::AuxWorkShift,
        VarKind::AuxInputSeen,
        VarKind::AuxWorkSeen,
        VarKind::CopyCell,
        VarKind::CopySymbol,
        VarKind::Midpoint,
        VarKind::LadderFrom,
        VarKind::LadderTo,
        VarKind::TailCell,
    ];

    pub fn letter(self) -> &'static str {
        match self {
            VarKind::Prop => "p",
            VarKind::WorkCell => "x",
            VarKind::InputCell => "X",
            VarKind::WorkHead => "z",
            VarKind::InputHead => "Z",
            VarKind::State => "q",
            VarKind::WorkSymbol => "f",
            VarKind::InputSymbol => "F",
            VarKind::ScannedInput => "D",
            VarKind::ScannedWork => "d",
            VarKind::AuxInputHead => "U",
            VarKind::AuxWorkHead => "u",
            VarKind::AuxInputShift => "V",
            VarKind::AuxWorkShift => "v",
            VarKind::AuxInputSeen => "H",
            VarKind::AuxWorkSeen => "h",
            VarKind::CopyCell => "w",
            VarKind::CopySymbol => "g",
            VarKind::Midpoint => "Y",
            VarKind::LadderFrom => "a",
            VarKind::LadderTo => "b",
            VarKind::TailCell => "u0",
        }
    }

    pub fn from_letter(s: &str) -> Option<VarKind> {
        VarKind::ALL.iter().copied().find(|k| k.letter() == s)
    }

    pub fn arity(self) -> usize {
        match self {
            VarKind::Prop | VarKind::InputCell | VarKind::InputSymbol | VarKind::TailCell => 1,
            _ => 2,
        }
    }
}

/// A variable: role plus one or two indices (tag, then bit position).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId {
    kind: VarKind,
    tag: u128,
    pos: u32,
}

impl VarId {
    /// Variable of a one-index role.
    pub fn plain(kind: VarKind, pos: usize) -> VarId {
        assert_eq!(kind.arity(), 1, "{kind:?} takes two indices");
        VarId {
            kind,
            tag: 0,
            pos: pos as u32,
        }
    }

    /// Variable of a two-index role; `tag` is a color, level or instruction.
    pub fn tagged(kind: VarKind, tag: u128, pos: usize) -> VarId {
        assert_eq!(kind.arity(), 2, "{kind:?} takes one index");
        VarId {
            kind,
            tag,
            pos: pos as u32,
        }
    }

    pub fn from_indices(kind: VarKind, idx: &[u128]) -> Option<VarId> {
        match (kind.arity(), idx) {
            (1, [p]) if *p <= u32::MAX as u128 => Some(VarId::plain(kind, *p as usize)),
            (2, [t, p]) if *p <= u32::MAX as u128 => Some(VarId::tagged(kind, *t, *p as usize)),
            _ => None,
        }
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    pub fn tag(&self) -> Option<u128> {
        (self.kind.arity() == 2).then_some(self.tag)
    }

    pub fn pos(&self) -> usize {
        self.pos as usize
    }

    pub fn p(pos: usize) -> VarId {
        VarId::plain(VarKind::Prop, pos)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind.arity() {
            1 => write!(f, "{}[{}]", self.kind.letter(), self.pos),
            _ => write!(f, "{}[{}][{}]", self.kind.letter(), self.tag, self.pos),
        }
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Const(bool),
    Var(VarId),
    Not(Formula),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Formula, Formula),
    Equiv(Formula, Formula),
    Xor(Formula, Formula),
    Forall(Vec<VarId>, Formula),
    Exists(Vec<VarId>, Formula),
}

/// Shared, immutable formula. Cloning is cheap; equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Formula(Arc<Node>);

impl Deref for Formula {
    type Target = Node;
    fn deref(&self) -> &Node {
        &self.0
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(self))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("tuple widths differ: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },
    #[error("quantifier with an empty variable list")]
    EmptyQuantifier,
    #[error("variable {0} listed twice in one quantifier")]
    DuplicateBoundVariable(VarId),
    #[error("substituting for {0} would capture a variable bound inside")]
    CapturedVariable(VarId),
    #[error("value {value} does not fit in {width} bits")]
    ValueTooWide { value: u128, width: usize },
    #[error("parse error at byte {pos}: {message}")]
    Parse { pos: usize, message: String },
    #[error("unknown variable kind `{name}` at byte {pos}")]
    UnknownVariableKind { pos: usize, name: String },
}

impl Formula {
    pub fn node(&self) -> &Node {
        &self.0
    }

    /// Address of the shared node, usable as a memo key while `self` lives.
    pub fn id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn constant(value: bool) -> Formula {
        Formula(Arc::new(Node::Const(value)))
    }

    pub fn truth() -> Formula {
        Formula::constant(true)
    }

    pub fn falsity() -> Formula {
        Formula::constant(false)
    }

    pub fn var(v: VarId) -> Formula {
        Formula(Arc::new(Node::Var(v)))
    }

    pub fn not(f: Formula) -> Formula {
        Formula(Arc::new(Node::Not(f)))
    }

    pub fn and(parts: Vec<Formula>) -> Formula {
        Formula(Arc::new(Node::And(parts)))
    }

    pub fn or(parts: Vec<Formula>) -> Formula {
        Formula(Arc::new(Node::Or(parts)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula(Arc::new(Node::Implies(a, b)))
    }

    pub fn equiv(a: Formula, b: Formula) -> Formula {
        Formula(Arc::new(Node::Equiv(a, b)))
    }

    pub fn xor(a: Formula, b: Formula) -> Formula {
        Formula(Arc::new(Node::Xor(a, b)))
    }

    pub fn forall(vars: Vec<VarId>, body: Formula) -> Result<Formula, FormulaError> {
        check_binder(&vars)?;
        Ok(Formula(Arc::new(Node::Forall(vars, body))))
    }

    pub fn exists(vars: Vec<VarId>, body: Formula) -> Result<Formula, FormulaError> {
        check_binder(&vars)?;
        Ok(Formula(Arc::new(Node::Exists(vars, body))))
    }

    /// Universal closure over the free variables, or `self` if closed.
    pub fn closure(&self) -> Formula {
        let free: Vec<VarId> = free_vars(self).into_iter().collect();
        if free.is_empty() {
            self.clone()
        } else {
            Formula(Arc::new(Node::Forall(free, self.clone())))
        }
    }

    pub fn is_closed(&self) -> bool {
        free_vars(self).is_empty()
    }

    pub fn natural_length(&self) -> u64 {
        natural_length(self)
    }
}

fn check_binder(vars: &[VarId]) -> Result<(), FormulaError> {
    if vars.is_empty() {
        return Err(FormulaError::EmptyQuantifier);
    }
    let mut seen = std::collections::HashSet::with_capacity(vars.len());
    for v in vars {
        if !seen.insert(*v) {
            return Err(FormulaError::DuplicateBoundVariable(*v));
        }
    }
    Ok(())
}

#[cfg(test)]
pub(crate) mod tests;
