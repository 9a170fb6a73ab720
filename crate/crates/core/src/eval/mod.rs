//! Truth of quantified Boolean formulas.
//!
//! Two evaluators share one front end: the naive one expands every
//! quantifier over all assignments, the guarded one substitutes
//! definitional premises and works on decision diagrams. Both can consult
//! an input-tape probe in place of an explicit input description.

mod arena;
mod bdd;
mod guarded;
mod naive;
mod registry;

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::encoder::EncodingParams;
use crate::formula::{BitTuple, Formula, VarId, VarKind};
use crate::machine::{Symbol, BLANK, START};

use arena::Arena;

pub use registry::{Evaluator, GuardedEvaluator, NaiveEvaluator, Registry};

/// Default cap on distinct variables for the naive evaluator.
pub const DEFAULT_ENUM_CAP: usize = 24;
/// Default decision-diagram node budget for the guarded evaluator.
pub const DEFAULT_NODE_CAP: usize = 1 << 23;

const STACK_BYTES: usize = 256 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("{count} variables exceed the enumeration cap of {cap}")]
    TooManyVariables { count: usize, cap: usize },
    #[error("variable {0} has no value")]
    UnboundVariable(VarId),
    #[error("symbolic fallback exceeded {nodes} diagram nodes")]
    GuardFallbackOverflow { nodes: usize },
    #[error("address of width {got} exceeds the probe width {width}")]
    AddressOverflow { got: usize, width: usize },
    #[error("probe cannot be applied: {0}")]
    ProbeScope(String),
    #[error("unknown evaluator {0:?}")]
    UnknownEvaluator(String),
    #[error("variable {0} is assigned twice")]
    DuplicateAssignment(VarId),
}

/// Values for free variables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<VarId, bool>);

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn bind(&mut self, v: VarId, value: bool) -> Result<(), EvalError> {
        if self.0.contains_key(&v) {
            return Err(EvalError::DuplicateAssignment(v));
        }
        self.0.insert(v, value);
        Ok(())
    }

    /// Bind `vars[i]` to `bits[i]`.
    pub fn bind_tuple(&mut self, vars: &[VarId], bits: &BitTuple) -> Result<(), EvalError> {
        for (v, b) in vars.iter().zip(bits.bits()) {
            self.bind(*v, *b)?;
        }
        Ok(())
    }

    pub fn get(&self, v: &VarId) -> Result<bool, EvalError> {
        self.0.get(v).copied().ok_or(EvalError::UnboundVariable(*v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EvalStats {
    pub branch_count: u64,
    pub peak_env: usize,
    pub guard_hits: u64,
    /// Blocks split on a disjunctive guard, and the branches they took.
    pub branch_guards: u64,
    pub guard_branches: u64,
    pub bdd_nodes: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub value: bool,
    pub stats: EvalStats,
}

/// Answers whether tape 1 holds the symbol with code `code` at `address`.
pub trait InputProbe: Send + Sync {
    fn address_width(&self) -> usize;
    fn code_width(&self) -> usize;
    fn holds(&self, address: &BitTuple, code: &BitTuple) -> Result<bool, EvalError>;
}

/// Probe over a concrete input word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TapeProbe {
    cells: Vec<Symbol>,
    address_width: usize,
    code_width: usize,
}

impl TapeProbe {
    pub fn new(input: &[Symbol], address_width: usize, code_width: usize) -> TapeProbe {
        let mut cells = Vec::with_capacity(input.len() + 1);
        cells.push(START);
        cells.extend_from_slice(input);
        TapeProbe {
            cells,
            address_width,
            code_width,
        }
    }

    pub fn symbol_at(&self, cell: u128) -> Symbol {
        usize::try_from(cell)
            .ok()
            .and_then(|c| self.cells.get(c).copied())
            .unwrap_or(BLANK)
    }
}

impl InputProbe for TapeProbe {
    fn address_width(&self) -> usize {
        self.address_width
    }

    fn code_width(&self) -> usize {
        self.code_width
    }

    fn holds(&self, address: &BitTuple, code: &BitTuple) -> Result<bool, EvalError> {
        if address.width() > self.address_width {
            return Err(EvalError::AddressOverflow {
                got: address.width(),
                width: self.address_width,
            });
        }
        Ok(self.symbol_at(address.value()).0 as u128 == code.value())
    }
}

/// Probe for `input` sized for `params`.
pub fn make_input_oracle(params: &EncodingParams, input: &[Symbol]) -> TapeProbe {
    TapeProbe::new(input, params.input_width(), params.code_width())
}

/// Probe answers for every address and code, indexed `address << cw | code`.
pub(crate) struct ProbeTable {
    code_width: usize,
    bits: Vec<bool>,
}

impl ProbeTable {
    fn build(probe: &dyn InputProbe) -> Result<ProbeTable, EvalError> {
        let (aw, cw) = (probe.address_width(), probe.code_width());
        if aw + cw > 24 {
            return Err(EvalError::ProbeScope(format!("probe widths {aw}+{cw} are too large to tabulate")));
        }
        let mut bits = Vec::with_capacity(1 << (aw + cw));
        for a in 0..1u128 << aw {
            let at = BitTuple::from_value(a, aw).expect("fits");
            for c in 0..1u128 << cw {
                bits.push(probe.holds(&at, &BitTuple::from_value(c, cw).expect("fits"))?);
            }
        }
        Ok(ProbeTable { code_width: cw, bits })
    }

    pub(crate) fn holds(&self, address: u64, code: u64) -> bool {
        self.bits[(address << self.code_width | code) as usize]
    }
}

/// Knobs shared by both evaluators.
#[derive(Clone, Debug)]
pub struct EvalOptions {
    /// Naive evaluator: maximum number of distinct variables.
    pub enum_cap: usize,
    /// Guarded evaluator: maximum diagram nodes.
    pub node_cap: usize,
    /// Guarded evaluator: preferred variable order; unlisted variables
    /// follow in order of first occurrence.
    pub order: Option<Vec<VarId>>,
    /// Values of the formula's free variables.
    pub assignment: Assignment,
}

impl Default for EvalOptions {
    fn default() -> EvalOptions {
        let enum_cap = std::env::var("TMQBF_ENUM_CAP")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_ENUM_CAP);
        let node_cap = std::env::var("TMQBF_NODE_CAP")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(DEFAULT_NODE_CAP);
        EvalOptions {
            enum_cap,
            node_cap,
            order: None,
            assignment: Assignment::new(),
        }
    }
}

impl EvalOptions {
    pub fn with_order(mut self, order: Vec<VarId>) -> EvalOptions {
        self.order = Some(order);
        self
    }

    pub fn with_assignment(mut self, assignment: Assignment) -> EvalOptions {
        self.assignment = assignment;
        self
    }
}

struct Prepared {
    arena: Arena,
    root: u32,
    env: Vec<Option<bool>>,
    table: Option<ProbeTable>,
}

fn prepare(formula: &Formula, probe: Option<&dyn InputProbe>, assignment: &Assignment) -> Result<Prepared, EvalError> {
    let mut arena = Arena::new();
    let mut root = arena.add_formula(formula);
    let mut table = None;
    if let Some(p) = probe {
        let address: Vec<VarId> = (0..p.address_width()).map(|i| VarId::plain(VarKind::InputCell, i)).collect();
        let code: Vec<VarId> = (0..p.code_width()).map(|i| VarId::plain(VarKind::InputSymbol, i)).collect();
        let uses_input = arena
            .vars()
            .iter()
            .any(|v| matches!(v.kind(), VarKind::InputCell | VarKind::InputSymbol));
        if uses_input {
            table = Some(ProbeTable::build(p)?);
            root = arena.restrict_to_probe(root, &address, &code).map_err(EvalError::ProbeScope)?;
        }
    }
    let free = arena.free(root);
    let mut env = vec![None; arena.vars().len()];
    for &v in free.iter() {
        env[v as usize] = Some(assignment.get(&arena.vars()[v as usize])?);
    }
    Ok(Prepared { arena, root, env, table })
}

fn with_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK_BYTES)
            .spawn_scoped(s, f)
            .expect("spawn evaluator thread")
            .join()
            .expect("evaluator thread panicked")
    })
}

pub fn eval_naive(formula: &Formula, probe: Option<&dyn InputProbe>) -> Result<Evaluation, EvalError> {
    eval_naive_with(formula, probe, &EvalOptions::default())
}

pub fn eval_naive_with(
    formula: &Formula,
    probe: Option<&dyn InputProbe>,
    options: &EvalOptions,
) -> Result<Evaluation, EvalError> {
    with_stack(|| {
        let prep = prepare(formula, probe, &options.assignment)?;
        let count = prep.arena.vars().len();
        if count > options.enum_cap {
            return Err(EvalError::TooManyVariables {
                count,
                cap: options.enum_cap,
            });
        }
        let mut run = naive::Naive::new(&prep.arena, prep.table.as_ref(), prep.env.clone());
        let value = run
            .eval(prep.root)
            .map_err(|v| EvalError::UnboundVariable(prep.arena.vars()[v as usize]))?;
        Ok(Evaluation {
            value,
            stats: run.finish(),
        })
    })
}

pub fn eval_guarded(formula: &Formula, probe: Option<&dyn InputProbe>) -> Result<Evaluation, EvalError> {
    eval_guarded_with(formula, probe, &EvalOptions::default())
}

pub fn eval_guarded_with(
    formula: &Formula,
    probe: Option<&dyn InputProbe>,
    options: &EvalOptions,
) -> Result<Evaluation, EvalError> {
    with_stack(|| {
        let mut prep = prepare(formula, probe, &options.assignment)?;
        let level = levels(&prep.arena, options.order.as_deref());
        let mut run = guarded::Guarded::new(&mut prep.arena, level, prep.table.as_ref(), options.node_cap);
        let value = run
            .run(prep.root, &prep.env)
            .map_err(|_| EvalError::GuardFallbackOverflow {
                nodes: options.node_cap,
            })?;
        Ok(Evaluation {
            value,
            stats: run.finish(),
        })
    })
}

/// Diagram level of each arena variable.
fn levels(arena: &Arena, order: Option<&[VarId]>) -> Vec<u32> {
    let n = arena.vars().len();
    let mut level = vec![u32::MAX; n];
    let mut next = 0u32;
    for v in order.unwrap_or(&[]) {
        if let Some(i) = arena.var_ix(v) {
            if level[i as usize] == u32::MAX {
                level[i as usize] = next;
                next += 1;
            }
        }
    }
    for l in level.iter_mut() {
        if *l == u32::MAX {
            *l = next;
            next += 1;
        }
    }
    level
}

#[cfg(test)]
mod tests;
