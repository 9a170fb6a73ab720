//! Configuration descriptions, initial and final conditions, and the
//! closed sentences built from them.

use crate::formula::{lex_geq, lex_greater, tuple_equiv, Formula, Tuple, VarId, VarKind};
use crate::machine::{Configuration, State, Symbol, ACCEPT, BLANK, START, START_STATE};

use super::step::{doubling_formula, input_clause, step_formula, theta, timer, work_clause};
use super::{ConfigVars, CopVariant, EncoderError, EncodingParams};

/// Data for one configuration formula. It need not describe a reachable
/// configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigDescriptor {
    pub color: u128,
    pub state: State,
    pub head1: u128,
    pub head2: u128,
    pub scanned1: Symbol,
    pub scanned2: Symbol,
    /// Work-tape cells from 0; missing cells are blank.
    pub tape2: Vec<Symbol>,
}

impl ConfigDescriptor {
    pub fn from_configuration(config: &Configuration, color: u128) -> ConfigDescriptor {
        let (s1, s2) = config.scanned();
        ConfigDescriptor {
            color,
            state: config.state,
            head1: config.head1 as u128,
            head2: config.head2 as u128,
            scanned1: s1,
            scanned2: s2,
            tape2: config.tape2().to_vec(),
        }
    }

    pub fn cell(&self, i: u128) -> Symbol {
        usize::try_from(i)
            .ok()
            .and_then(|i| self.tape2.get(i).copied())
            .unwrap_or(BLANK)
    }
}

fn symbols_of(params: &EncodingParams, input: &[Symbol]) -> Result<(), EncoderError> {
    if input.len() != params.n {
        return Err(EncoderError::LengthMismatch {
            expected: params.n,
            got: input.len(),
        });
    }
    if let Some(bad) = input
        .iter()
        .find(|s| **s == BLANK || **s == START || s.0 >= params.alphabet_size)
    {
        return Err(EncoderError::InvalidInputSymbol(bad.0));
    }
    Ok(())
}

/// `∀u0 (u0 > (n)_2 → ψ1(u0→Λ))` and the clauses for cells `0..=n`.
pub fn chi_input(params: &EncodingParams, input: &[Symbol]) -> Result<Formula, EncoderError> {
    symbols_of(params, input)?;
    let basic = ConfigVars::basic(params, 0);
    let mut parts = Vec::with_capacity(params.n + 2);
    parts.push(input_clause(&basic, &params.input_address(0)?, &params.symbol_tuple(START))?);
    for (i, sym) in input.iter().enumerate() {
        parts.push(input_clause(&basic, &params.input_address(i as u128 + 1)?, &params.symbol_tuple(*sym))?);
    }
    let tail: Vec<VarId> = (0..params.input_width()).map(|i| VarId::plain(VarKind::TailCell, i)).collect();
    let tt = Tuple::of_vars(&tail);
    let beyond = lex_greater(&tt, &params.input_address(params.n as u128)?)?;
    let blank = input_clause(&basic, &tt, &params.symbol_tuple(BLANK))?;
    parts.push(Formula::forall(tail, Formula::implies(beyond, blank))?);
    Ok(Formula::and(parts))
}

/// The work tape before the first step: `▷` at cell 0, blank from cell 1.
pub fn chi_work_initial(params: &EncodingParams) -> Result<Formula, EncoderError> {
    let basic = ConfigVars::basic(params, 0);
    let first = work_clause(&basic, &params.work_address(0)?, &params.symbol_tuple(START))?;
    let tail: Vec<VarId> = (0..params.work_width()).map(|i| VarId::plain(VarKind::TailCell, i)).collect();
    let tt = Tuple::of_vars(&tail);
    let from_one = lex_geq(&tt, &params.work_address(1)?)?;
    let blank = work_clause(&basic, &tt, &params.symbol_tuple(BLANK))?;
    Ok(Formula::and(vec![
        first,
        Formula::forall(tail, Formula::implies(from_one, blank))?,
    ]))
}

/// Timer of color 0: start state, both heads on cell 0 reading `▷`.
pub fn timer_initial(params: &EncodingParams) -> Result<Formula, EncoderError> {
    let start = params.symbol_tuple(START);
    Ok(timer(
        &ConfigVars::basic(params, 0),
        &params.state_tuple(START_STATE),
        &start,
        &start,
        &params.input_address(0)?,
        &params.work_address(0)?,
    )?)
}

pub fn chi_initial(params: &EncodingParams, input: &[Symbol]) -> Result<Formula, EncoderError> {
    Ok(Formula::and(vec![
        chi_input(params, input)?,
        chi_work_initial(params)?,
        timer_initial(params)?,
    ]))
}

/// The state tuple of color `T` holds the accepting state.
pub fn chi_omega(params: &EncodingParams) -> Result<Formula, EncoderError> {
    final_condition(params, false)
}

fn final_condition(params: &EncodingParams, corrupt: bool) -> Result<Formula, EncoderError> {
    let q = ConfigVars::basic(params, params.period).state;
    let mut code = params.state_code(ACCEPT).bits().to_vec();
    if corrupt {
        let last = code.len() - 1;
        code[last] = !code[last];
    }
    Ok(tuple_equiv(
        &Tuple::of_vars(&q),
        &Tuple::constant(&crate::formula::BitTuple::from_bits(code)),
    )?)
}

/// Configuration formula of color `desc.color`: the timer plus one clause
/// per work-tape cell `0..=T`.
pub fn psi_work(params: &EncodingParams, desc: &ConfigDescriptor) -> Result<Formula, EncoderError> {
    if params.period > params.materialize_cap {
        return Err(EncoderError::TooLargeToMaterialize {
            period: params.period,
            cap: params.materialize_cap,
        });
    }
    if desc.color > params.period {
        return Err(EncoderError::IndexOutOfRange(desc.color));
    }
    let cfg = ConfigVars::basic(params, desc.color);
    let mut parts = Vec::with_capacity(params.period as usize + 2);
    parts.push(timer(
        &cfg,
        &params.state_tuple(desc.state),
        &params.symbol_tuple(desc.scanned1),
        &params.symbol_tuple(desc.scanned2),
        &params.input_address(desc.head1)?,
        &params.work_address(desc.head2)?,
    )?);
    for mu in 0..=params.period {
        parts.push(work_clause(&cfg, &params.work_address(mu)?, &params.symbol_tuple(desc.cell(mu)))?);
    }
    Ok(Formula::and(parts))
}

/// Full configuration description: input tape plus work-tape description.
pub fn psi_config(params: &EncodingParams, input: &[Symbol], desc: &ConfigDescriptor) -> Result<Formula, EncoderError> {
    Ok(Formula::and(vec![chi_input(params, input)?, psi_work(params, desc)?]))
}

/// Universal closure of `[ΨC(from) & Φ(level)] → ΨC(to)`, where `to` has
/// color `from.color + 2^level`.
pub fn step_claim(
    params: &EncodingParams,
    input: &[Symbol],
    from: &ConfigDescriptor,
    to: &ConfigDescriptor,
    level: usize,
    cop: CopVariant,
) -> Result<Formula, EncoderError> {
    let span = 1u128 << level;
    if to.color != from.color + span {
        return Err(EncoderError::IndexOutOfRange(to.color));
    }
    let cur = ConfigVars::basic(params, from.color);
    let next = ConfigVars::basic(params, to.color);
    let transition = if level == 0 {
        step_formula(params, &cur, &next, cop)?
    } else {
        doubling_formula(params, level, &cur, &next, cop)?
    };
    let claim = Formula::implies(
        Formula::and(vec![psi_config(params, input, from)?, transition]),
        psi_config(params, input, to)?,
    );
    Ok(claim.closure())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OmegaOptions {
    pub cop: CopVariant,
    /// Flip the last bit of the accepting-state code in the final
    /// condition. Only for exercising mismatch detection.
    pub corrupt_final_state: bool,
}

/// Natural lengths of the main parts of a sentence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct ComponentLengths {
    pub chi1: u64,
    pub chi2: u64,
    pub pi0: u64,
    pub ladder: u64,
    pub phi0: u64,
    pub chi_omega: u64,
    pub total: u64,
}

#[derive(Clone, Debug)]
pub struct Sentence {
    pub formula: Formula,
    pub lengths: ComponentLengths,
}

fn ladder(params: &EncodingParams, first: &ConfigVars, last: &ConfigVars, cop: CopVariant) -> Result<(Formula, Formula), EncoderError> {
    let m = params.m;
    let levels: Vec<[ConfigVars; 3]> = (1..=m as u128)
        .map(|k| {
            [
                ConfigVars::ladder(params, VarKind::LadderFrom, k),
                ConfigVars::ladder(params, VarKind::LadderTo, k),
                ConfigVars::ladder(params, VarKind::Midpoint, k),
            ]
        })
        .collect();
    let mut thetas = Vec::with_capacity(m);
    for k in 0..m {
        let (from, to) = if k + 1 == m {
            (first, last)
        } else {
            (&levels[k + 1][0], &levels[k + 1][1])
        };
        let [a, b, y] = &levels[k];
        thetas.push(theta(from, to, a, b, y)?);
    }
    let phi0 = step_formula(params, &levels[0][0], &levels[0][1], cop)?;
    let mut body = Formula::implies(Formula::and(thetas), phi0.clone());
    for [a, b, y] in &levels {
        body = Formula::forall([a.flat(), b.flat()].concat(), body)?;
        body = Formula::exists(y.flat(), body)?;
    }
    Ok((body, phi0))
}

fn sentence(params: &EncodingParams, input: Option<&[Symbol]>, opts: OmegaOptions) -> Result<Sentence, EncoderError> {
    let first = ConfigVars::basic(params, 0);
    let last = ConfigVars::basic(params, params.period);
    let chi1 = input.map(|x| chi_input(params, x)).transpose()?;
    let chi2 = chi_work_initial(params)?;
    let pi0 = timer_initial(params)?;
    let (ladder, phi0) = ladder(params, &first, &last, opts.cop)?;
    let omega = final_condition(params, opts.corrupt_final_state)?;

    let mut start = Vec::with_capacity(3);
    start.extend(chi1.clone());
    start.push(chi2.clone());
    start.push(pi0.clone());
    let premise = Formula::and(vec![Formula::and(start), ladder.clone()]);
    let mut bound = first.flat();
    for v in last.flat() {
        if !bound.contains(&v) {
            bound.push(v);
        }
    }
    let formula = Formula::forall(bound, Formula::implies(premise, omega.clone()))?;
    let lengths = ComponentLengths {
        chi1: chi1.as_ref().map_or(0, Formula::natural_length),
        chi2: chi2.natural_length(),
        pi0: pi0.natural_length(),
        ladder: ladder.natural_length(),
        phi0: phi0.natural_length(),
        chi_omega: omega.natural_length(),
        total: formula.natural_length(),
    };
    Ok(Sentence { formula, lengths })
}

/// The closed sentence that is true iff the machine accepts `input`
/// within `2^m` steps.
pub fn omega(params: &EncodingParams, input: &[Symbol]) -> Result<Formula, EncoderError> {
    Ok(omega_with(params, input, OmegaOptions::default())?.formula)
}

pub fn omega_with(params: &EncodingParams, input: &[Symbol], opts: OmegaOptions) -> Result<Sentence, EncoderError> {
    sentence(params, Some(input), opts)
}

/// The sentence without the input-tape description; it depends only on
/// the program, `n` and `m`.
pub fn delta_conditional(params: &EncodingParams) -> Result<Formula, EncoderError> {
    Ok(delta_with(params, OmegaOptions::default())?.formula)
}

pub fn delta_with(params: &EncodingParams, opts: OmegaOptions) -> Result<Sentence, EncoderError> {
    sentence(params, None, opts)
}
