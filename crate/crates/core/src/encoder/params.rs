use std::sync::Arc;

use crate::formula::{BitTuple, Tuple, VarId, VarKind};
use crate::machine::{MachineProgram, State, Symbol};

use super::EncoderError;

/// Largest supported simulation exponent: cell numbers `0..=2^m` must fit
/// in 128-bit indices.
pub const MAX_M: usize = 126;

/// Default bound on the period for which configuration formulas are written
/// out cell by cell.
pub const DEFAULT_MATERIALIZE_CAP: u128 = 64;

/// Derived widths and constants for one (program, n, m) triple.
#[derive(Clone, Debug)]
pub struct EncodingParams {
    pub n: usize,
    /// Input-tape addresses use `s + 1` bits.
    pub s: usize,
    /// Work-tape addresses use `m + 1` bits.
    pub m: usize,
    /// `2^m`.
    pub period: u128,
    /// Symbol and state codes use `r + 1` bits.
    pub r: usize,
    pub instruction_count: usize,
    pub alphabet_size: usize,
    pub state_count: usize,
    pub materialize_cap: u128,
    program: Arc<MachineProgram>,
}

pub(crate) fn ceil_log2(n: u128) -> usize {
    let mut s = 0;
    while (1u128 << s) < n {
        s += 1;
    }
    s
}

pub fn make_params(program: &MachineProgram, n: usize, m: usize) -> Result<EncodingParams, EncoderError> {
    make_params_shared(Arc::new(program.clone()), n, m)
}

pub fn make_params_shared(
    program: Arc<MachineProgram>,
    n: usize,
    m: usize,
) -> Result<EncodingParams, EncoderError> {
    if n < 2 {
        return Err(EncoderError::InputTooShort(n));
    }
    let s = ceil_log2(n as u128);
    if m < s {
        return Err(EncoderError::MTooSmall { m, s });
    }
    if m > MAX_M {
        return Err(EncoderError::MTooLarge(m));
    }
    let r = program.code_width() - 1;
    Ok(EncodingParams {
        n,
        s,
        m,
        period: 1u128 << m,
        r,
        instruction_count: program.instructions().len(),
        alphabet_size: program.alphabet().len(),
        state_count: program.state_count(),
        materialize_cap: DEFAULT_MATERIALIZE_CAP,
        program,
    })
}

impl EncodingParams {
    pub fn program(&self) -> &MachineProgram {
        &self.program
    }

    pub fn shared_program(&self) -> &Arc<MachineProgram> {
        &self.program
    }

    pub fn input_width(&self) -> usize {
        self.s + 1
    }

    pub fn work_width(&self) -> usize {
        self.m + 1
    }

    pub fn code_width(&self) -> usize {
        self.r + 1
    }

    /// Width of a whole configuration tuple across its nine roles.
    pub fn flat_width(&self) -> usize {
        2 * self.m + 5 * self.r + 2 * self.s + 9
    }

    pub fn symbol_code(&self, sym: Symbol) -> BitTuple {
        BitTuple::from_value(sym.0 as u128, self.code_width()).expect("code width covers the alphabet")
    }

    pub fn state_code(&self, state: State) -> BitTuple {
        BitTuple::from_value(state.0 as u128, self.code_width()).expect("code width covers the states")
    }

    pub fn symbol_tuple(&self, sym: Symbol) -> Tuple {
        Tuple::constant(&self.symbol_code(sym))
    }

    pub fn state_tuple(&self, state: State) -> Tuple {
        Tuple::constant(&self.state_code(state))
    }

    pub fn input_address(&self, cell: u128) -> Result<Tuple, EncoderError> {
        Tuple::value(cell, self.input_width()).map_err(|_| EncoderError::IndexOutOfRange(cell))
    }

    pub fn work_address(&self, cell: u128) -> Result<Tuple, EncoderError> {
        Tuple::value(cell, self.work_width()).map_err(|_| EncoderError::IndexOutOfRange(cell))
    }
}

/// Variable tuples describing one configuration, by role.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigVars {
    pub state: Vec<VarId>,
    pub input_cell: Vec<VarId>,
    pub work_cell: Vec<VarId>,
    pub input_head: Vec<VarId>,
    pub work_head: Vec<VarId>,
    pub scanned_input: Vec<VarId>,
    pub scanned_work: Vec<VarId>,
    pub input_symbol: Vec<VarId>,
    pub work_symbol: Vec<VarId>,
}

/// The nine roles in tuple order, tagged with what kind of value they hold.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoleClass {
    Code,
    InputAddress,
    WorkAddress,
}

pub(crate) const ROLE_CLASSES: [RoleClass; 9] = [
    RoleClass::Code,
    RoleClass::InputAddress,
    RoleClass::WorkAddress,
    RoleClass::InputAddress,
    RoleClass::WorkAddress,
    RoleClass::Code,
    RoleClass::Code,
    RoleClass::Code,
    RoleClass::Code,
];

impl ConfigVars {
    /// Basic variables of color `t`. Input cell and symbol tuples carry no
    /// color and are shared by all colors.
    pub fn basic(params: &EncodingParams, t: u128) -> ConfigVars {
        let tagged = |kind, w: usize| (0..w).map(|i| VarId::tagged(kind, t, i)).collect::<Vec<_>>();
        let plain = |kind, w: usize| (0..w).map(|i| VarId::plain(kind, i)).collect::<Vec<_>>();
        let (a, c, w) = (params.input_width(), params.code_width(), params.work_width());
        ConfigVars {
            state: tagged(VarKind::State, c),
            input_cell: plain(VarKind::InputCell, a),
            work_cell: tagged(VarKind::WorkCell, w),
            input_head: tagged(VarKind::InputHead, a),
            work_head: tagged(VarKind::WorkHead, w),
            scanned_input: tagged(VarKind::ScannedInput, c),
            scanned_work: tagged(VarKind::ScannedWork, c),
            input_symbol: plain(VarKind::InputSymbol, c),
            work_symbol: tagged(VarKind::WorkSymbol, c),
        }
    }

    /// A flat configuration tuple of one ladder role (`Y`, `a` or `b`) at
    /// `level`, split into the nine roles.
    pub fn ladder(params: &EncodingParams, kind: VarKind, level: u128) -> ConfigVars {
        let widths = Self::role_widths(params);
        let mut next = 0;
        let mut take = |w: usize| {
            let v = (next..next + w).map(|i| VarId::tagged(kind, level, i)).collect::<Vec<_>>();
            next += w;
            v
        };
        ConfigVars {
            state: take(widths[0]),
            input_cell: take(widths[1]),
            work_cell: take(widths[2]),
            input_head: take(widths[3]),
            work_head: take(widths[4]),
            scanned_input: take(widths[5]),
            scanned_work: take(widths[6]),
            input_symbol: take(widths[7]),
            work_symbol: take(widths[8]),
        }
    }

    pub fn role_widths(params: &EncodingParams) -> [usize; 9] {
        let (a, c, w) = (params.input_width(), params.code_width(), params.work_width());
        [c, a, w, a, w, c, c, c, c]
    }

    pub fn roles(&self) -> [&[VarId]; 9] {
        [
            &self.state,
            &self.input_cell,
            &self.work_cell,
            &self.input_head,
            &self.work_head,
            &self.scanned_input,
            &self.scanned_work,
            &self.input_symbol,
            &self.work_symbol,
        ]
    }

    /// All variables in the order q, X, x, Z, z, D, d, F, f.
    pub fn flat(&self) -> Vec<VarId> {
        self.roles().concat()
    }

    pub fn flat_tuple(&self) -> Tuple {
        Tuple::of_vars(&self.flat())
    }
}

/// Concrete values for the nine tuples of one configuration slot, in the
/// order of [`ConfigVars::roles`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ConfigView {
    pub state: u128,
    pub input_cell: u128,
    pub work_cell: u128,
    pub input_head: u128,
    pub work_head: u128,
    pub scanned_input: u128,
    pub scanned_work: u128,
    pub input_symbol: u128,
    pub work_symbol: u128,
}

impl ConfigView {
    pub fn values(&self) -> [u128; 9] {
        [
            self.state,
            self.input_cell,
            self.work_cell,
            self.input_head,
            self.work_head,
            self.scanned_input,
            self.scanned_work,
            self.input_symbol,
            self.work_symbol,
        ]
    }

    /// Bit values for the variables of `cfg`.
    pub fn bits(&self, params: &EncodingParams, cfg: &ConfigVars) -> Result<Vec<(VarId, bool)>, EncoderError> {
        let widths = ConfigVars::role_widths(params);
        let mut out = Vec::with_capacity(params.flat_width());
        for ((vars, value), w) in cfg.roles().iter().zip(self.values()).zip(widths) {
            let bits = BitTuple::from_value(value, w).map_err(|_| EncoderError::IndexOutOfRange(value))?;
            out.extend(vars.iter().copied().zip(bits.bits().iter().copied()));
        }
        Ok(out)
    }
}
