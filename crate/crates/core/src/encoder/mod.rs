//! Formula builders for machine runs.
//!
//! A configuration after step `t` is described by tuples of basic
//! variables of color `t`; one-step and `2^k`-step transitions relate two
//! such tuple families, and the closed sentence ties the initial
//! configuration to acceptance at step `2^m`.

mod layout;
mod order;
mod params;
mod sentence;
mod step;

use thiserror::Error;

use crate::formula::FormulaError;

pub use layout::{indexed_layout, indexed_layout_phases, reverse_binary, LayoutPhases};
pub use order::variable_order;
pub use params::{
    make_params, make_params_shared, ConfigVars, ConfigView, EncodingParams, RoleClass, DEFAULT_MATERIALIZE_CAP, MAX_M,
};
pub use sentence::{
    chi_initial, chi_input, chi_omega, chi_work_initial, delta_conditional, delta_with, omega, omega_with,
    psi_config, psi_work, step_claim, timer_initial, ComponentLengths, ConfigDescriptor, OmegaOptions, Sentence,
};
pub use step::{
    clause, clause_psi1, clause_psi2, doubling_formula, instruction_formula, kappa_shift, phi_instruction,
    phi_k, phi_step0, state_number, step_formula, theta, timer, timer_pi, CopVariant,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncoderError {
    #[error("input length {0} is below the minimum of 2")]
    InputTooShort(usize),
    #[error("m = {m} is below ceil(log n) = {s}")]
    MTooSmall { m: usize, s: usize },
    #[error("m = {0} exceeds the supported maximum")]
    MTooLarge(usize),
    #[error("index {0} is out of range")]
    IndexOutOfRange(u128),
    #[error("doubling level {level} exceeds m = {m}")]
    LevelTooDeep { level: usize, m: usize },
    #[error("period {period} exceeds the materialization cap {cap}")]
    TooLargeToMaterialize { period: u128, cap: u128 },
    #[error("input has length {got}, parameters expect {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("symbol {0} cannot appear in an input")]
    InvalidInputSymbol(usize),
    #[error(transparent)]
    Formula(#[from] FormulaError),
}
