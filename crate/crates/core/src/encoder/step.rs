//! Head-shift corrections, clauses, timers, instruction formulas, the
//! one-step formula and the doubling ladder.

use crate::formula::{tuple_equiv, Formula, FormulaError, Tuple, VarId, VarKind};
use crate::machine::{Move, State};

use super::{ConfigVars, EncoderError, EncodingParams};

/// How an instruction formula keeps the untouched work-tape cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CopVariant {
    /// `∀w ⋁_ρ [¬(w≡u) → (ψ_t(w→ρ) ∧ ψ_{t+1}(w→ρ))]`.
    #[default]
    Disjunction,
    /// `∀w [¬(w≡u) → ∃g (ψ_t(w→g) ∧ ψ_{t+1}(w→g))]`.
    ExistsG,
}

/// Corrections `v` turning `value` into `value ± 1` by `value ⊕ v`; for `S`
/// the correction is zero.
pub fn kappa_shift(direction: Move, value: &Tuple, correction: &Tuple) -> Result<Formula, FormulaError> {
    if value.width() != correction.width() {
        return Err(FormulaError::WidthMismatch {
            left: value.width(),
            right: correction.width(),
        });
    }
    let w = value.width();
    let g = |i: usize| match direction {
        Move::L => Formula::not(value.elems()[i].clone()),
        _ => value.elems()[i].clone(),
    };
    let v = |i: usize| correction.elems()[i].clone();
    match direction {
        Move::S => tuple_equiv(correction, &Tuple::zeros(w)),
        Move::L | Move::R => {
            let mut parts = vec![Formula::equiv(v(w - 1), Formula::truth())];
            if w >= 2 {
                parts.push(Formula::equiv(v(w - 2), g(w - 1)));
            }
            for i in (0..w.saturating_sub(2)).rev() {
                parts.push(Formula::equiv(v(i), Formula::and(vec![g(i + 1), v(i + 1)])));
            }
            Ok(Formula::and(parts))
        }
    }
}

/// `(cells ≡ cell) → (symbols ≡ payload)`.
pub fn clause(cells: &[VarId], symbols: &[VarId], cell: &Tuple, payload: &Tuple) -> Result<Formula, FormulaError> {
    Ok(Formula::implies(
        tuple_equiv(&Tuple::of_vars(cells), cell)?,
        tuple_equiv(&Tuple::of_vars(symbols), payload)?,
    ))
}

/// Input-tape clause over the shared basic tuples.
pub fn clause_psi1(params: &EncodingParams, cell: &Tuple, payload: &Tuple) -> Result<Formula, EncoderError> {
    let basic = ConfigVars::basic(params, 0);
    input_clause(&basic, cell, payload)
}

/// Work-tape clause of color `t`.
pub fn clause_psi2(params: &EncodingParams, t: u128, cell: &Tuple, payload: &Tuple) -> Result<Formula, EncoderError> {
    let basic = ConfigVars::basic(params, t);
    work_clause(&basic, cell, payload)
}

pub(crate) fn input_clause(cfg: &ConfigVars, cell: &Tuple, payload: &Tuple) -> Result<Formula, EncoderError> {
    Ok(clause(&cfg.input_cell, &cfg.input_symbol, cell, payload)?)
}

pub(crate) fn work_clause(cfg: &ConfigVars, cell: &Tuple, payload: &Tuple) -> Result<Formula, EncoderError> {
    Ok(clause(&cfg.work_cell, &cfg.work_symbol, cell, payload)?)
}

/// `q≡state ∧ D≡code1 ∧ d≡code2 ∧ Z≡cell1 ∧ z≡cell2` over `cfg`.
pub fn timer(
    cfg: &ConfigVars,
    state: &Tuple,
    code1: &Tuple,
    code2: &Tuple,
    cell1: &Tuple,
    cell2: &Tuple,
) -> Result<Formula, FormulaError> {
    let eq = |vars: &[VarId], t: &Tuple| tuple_equiv(&Tuple::of_vars(vars), t);
    Ok(Formula::and(vec![
        eq(&cfg.state, state)?,
        eq(&cfg.scanned_input, code1)?,
        eq(&cfg.scanned_work, code2)?,
        eq(&cfg.input_head, cell1)?,
        eq(&cfg.work_head, cell2)?,
    ]))
}

/// Timer of color `t` over the basic tuples.
pub fn timer_pi(
    params: &EncodingParams,
    t: u128,
    state: &Tuple,
    code1: &Tuple,
    code2: &Tuple,
    cell1: &Tuple,
    cell2: &Tuple,
) -> Result<Formula, EncoderError> {
    Ok(timer(&ConfigVars::basic(params, t), state, code1, code2, cell1, cell2)?)
}

fn aux(kind: VarKind, k: usize, width: usize) -> Vec<VarId> {
    (0..width).map(|i| VarId::tagged(kind, k as u128, i)).collect()
}

/// Formula for instruction `k` (1-based) acting between `cur` and `next`.
pub fn instruction_formula(
    params: &EncodingParams,
    k: usize,
    cur: &ConfigVars,
    next: &ConfigVars,
    cop: CopVariant,
) -> Result<Formula, EncoderError> {
    if k == 0 || k > params.instruction_count {
        return Err(EncoderError::IndexOutOfRange(k as u128));
    }
    let ins = params.program().instructions()[k - 1];
    let (a, w, c) = (params.input_width(), params.work_width(), params.code_width());
    let big_u = aux(VarKind::AuxInputHead, k, a);
    let small_u = aux(VarKind::AuxWorkHead, k, w);
    let big_v = aux(VarKind::AuxInputShift, k, a);
    let small_v = aux(VarKind::AuxWorkShift, k, w);
    let big_h = aux(VarKind::AuxInputSeen, k, c);
    let small_h = aux(VarKind::AuxWorkSeen, k, c);
    let (tu, tuu, tv, tvv) = (
        Tuple::of_vars(&big_u),
        Tuple::of_vars(&small_u),
        Tuple::of_vars(&big_v),
        Tuple::of_vars(&small_v),
    );
    let (th, thh) = (Tuple::of_vars(&big_h), Tuple::of_vars(&small_h));
    let moved1 = tu.xor(&tv)?;
    let moved2 = tuu.xor(&tvv)?;
    let gamma = params.symbol_tuple(ins.write2);

    let start = timer(
        cur,
        &params.state_tuple(ins.state),
        &params.symbol_tuple(ins.read1),
        &params.symbol_tuple(ins.read2),
        &tu,
        &tuu,
    )?;
    let shifts = Formula::and(vec![
        kappa_shift(ins.move1, &tu, &tv)?,
        kappa_shift(ins.move2, &tuu, &tvv)?,
    ]);
    let retrieve2 = match ins.move2 {
        Move::S => tuple_equiv(&thh, &gamma)?,
        _ => work_clause(cur, &moved2, &thh)?,
    };
    let retrieve = Formula::and(vec![input_clause(cur, &moved1, &th)?, retrieve2]);

    let copy = copy_formula(params, k, cur, next, &tuu, cop)?;
    let write = work_clause(next, &tuu, &gamma)?;
    let land = timer(next, &params.state_tuple(ins.next_state), &th, &thh, &moved1, &moved2)?;

    let body = Formula::implies(
        Formula::and(vec![start, shifts, retrieve]),
        Formula::and(vec![copy, write, land]),
    );
    let bound = [big_u, small_u, big_v, small_v, big_h, small_h].concat();
    Ok(Formula::forall(bound, body)?)
}

fn copy_formula(
    params: &EncodingParams,
    k: usize,
    cur: &ConfigVars,
    next: &ConfigVars,
    head: &Tuple,
    cop: CopVariant,
) -> Result<Formula, EncoderError> {
    let w_vars = aux(VarKind::CopyCell, k, params.work_width());
    let tw = Tuple::of_vars(&w_vars);
    let elsewhere = Formula::not(tuple_equiv(&tw, head)?);
    let body = match cop {
        CopVariant::ExistsG => {
            let g_vars = aux(VarKind::CopySymbol, k, params.code_width());
            let tg = Tuple::of_vars(&g_vars);
            let keep = Formula::and(vec![work_clause(cur, &tw, &tg)?, work_clause(next, &tw, &tg)?]);
            Formula::implies(elsewhere, Formula::exists(g_vars, keep)?)
        }
        CopVariant::Disjunction => {
            let mut options = Vec::with_capacity(params.alphabet_size);
            for sym in params.program().alphabet().symbols() {
                let code = params.symbol_tuple(sym);
                options.push(Formula::implies(
                    elsewhere.clone(),
                    Formula::and(vec![work_clause(cur, &tw, &code)?, work_clause(next, &tw, &code)?]),
                ));
            }
            Formula::or(options)
        }
    };
    Ok(Formula::forall(w_vars, body)?)
}

/// Instruction formula over the basic tuples of colors `t` and `t + 1`.
pub fn phi_instruction(params: &EncodingParams, k: usize, t: u128, cop: CopVariant) -> Result<Formula, EncoderError> {
    if t >= params.period {
        return Err(EncoderError::IndexOutOfRange(t));
    }
    instruction_formula(
        params,
        k,
        &ConfigVars::basic(params, t),
        &ConfigVars::basic(params, t + 1),
        cop,
    )
}

/// One step between two configuration tuples: the conjunction of all
/// instruction formulas. When the two tuples carry separate input-tape
/// slots (ladder tuples) the slots are also required to agree, since the
/// input tape is the same at every step.
pub fn step_formula(
    params: &EncodingParams,
    cur: &ConfigVars,
    next: &ConfigVars,
    cop: CopVariant,
) -> Result<Formula, EncoderError> {
    let mut parts = Vec::with_capacity(params.instruction_count + 2);
    for k in 1..=params.instruction_count {
        parts.push(instruction_formula(params, k, cur, next, cop)?);
    }
    if cur.input_cell != next.input_cell {
        parts.push(tuple_equiv(&Tuple::of_vars(&cur.input_cell), &Tuple::of_vars(&next.input_cell))?);
    }
    if cur.input_symbol != next.input_symbol {
        parts.push(tuple_equiv(&Tuple::of_vars(&cur.input_symbol), &Tuple::of_vars(&next.input_symbol))?);
    }
    Ok(Formula::and(parts))
}

pub fn phi_step0(params: &EncodingParams, t: u128, cop: CopVariant) -> Result<Formula, EncoderError> {
    if t >= params.period {
        return Err(EncoderError::IndexOutOfRange(t));
    }
    step_formula(
        params,
        &ConfigVars::basic(params, t),
        &ConfigVars::basic(params, t + 1),
        cop,
    )
}

/// `(from≡a ∧ Y≡b) ∨ (Y≡a ∧ b≡to)`.
pub fn theta(from: &ConfigVars, to: &ConfigVars, a: &ConfigVars, b: &ConfigVars, y: &ConfigVars) -> Result<Formula, EncoderError> {
    Ok(Formula::or(vec![
        Formula::and(vec![
            tuple_equiv(&from.flat_tuple(), &a.flat_tuple())?,
            tuple_equiv(&y.flat_tuple(), &b.flat_tuple())?,
        ]),
        Formula::and(vec![
            tuple_equiv(&y.flat_tuple(), &a.flat_tuple())?,
            tuple_equiv(&b.flat_tuple(), &to.flat_tuple())?,
        ]),
    ]))
}

/// `2^level` steps from `from` to `to`, built by nesting midpoints.
pub fn doubling_formula(
    params: &EncodingParams,
    level: usize,
    from: &ConfigVars,
    to: &ConfigVars,
    cop: CopVariant,
) -> Result<Formula, EncoderError> {
    if level == 0 {
        return step_formula(params, from, to, cop);
    }
    let tag = level as u128;
    let y = ConfigVars::ladder(params, VarKind::Midpoint, tag);
    let a = ConfigVars::ladder(params, VarKind::LadderFrom, tag);
    let b = ConfigVars::ladder(params, VarKind::LadderTo, tag);
    let guard = theta(from, to, &a, &b, &y)?;
    let inner = doubling_formula(params, level - 1, &a, &b, cop)?;
    let ab = [a.flat(), b.flat()].concat();
    let body = Formula::forall(ab, Formula::implies(guard, inner))?;
    Ok(Formula::exists(y.flat(), body)?)
}

/// Doubling formula of `level` over basic tuples of colors `t` and `t + 2^level`.
pub fn phi_k(params: &EncodingParams, level: usize, t: u128, cop: CopVariant) -> Result<Formula, EncoderError> {
    if level > params.m {
        return Err(EncoderError::LevelTooDeep { level, m: params.m });
    }
    let span = 1u128 << level;
    if t + span > params.period {
        return Err(EncoderError::IndexOutOfRange(t + span));
    }
    doubling_formula(
        params,
        level,
        &ConfigVars::basic(params, t),
        &ConfigVars::basic(params, t + span),
        cop,
    )
}

/// Code tuple of a state, for callers building timers by hand.
pub fn state_number(params: &EncodingParams, i: usize) -> Tuple {
    params.state_tuple(State(i))
}
