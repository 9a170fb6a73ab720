//! Two-tape deterministic Turing machines with a read-only input tape.
//!
//! Symbols and states are plain indices. The first four alphabet entries are
//! fixed: blank, start marker, `0`, `1`. States 0, 1 and 2 are start, accept
//! and reject.

mod serialize;
mod simulate;
mod text;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use serialize::{parse_serialized, serialize_program};
pub use simulate::{initial_configuration, run_trace, simulate, step, Configuration, Outcome, SimResult};
pub use text::{load_machine, parse_machine, render_machine};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State(pub usize);

pub const BLANK: Symbol = Symbol(0);
pub const START: Symbol = Symbol(1);
pub const ZERO: Symbol = Symbol(2);
pub const ONE: Symbol = Symbol(3);

pub const START_STATE: State = State(0);
pub const ACCEPT: State = State(1);
pub const REJECT: State = State(2);

const PREFIX: [&str; 4] = ["_", ">", "0", "1"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    L,
    R,
    S,
}

impl Move {
    pub fn as_char(self) -> char {
        match self {
            Move::L => 'L',
            Move::R => 'R',
            Move::S => 'S',
        }
    }

    pub fn from_token(token: &str) -> Option<Move> {
        match token {
            "L" => Some(Move::L),
            "R" => Some(Move::R),
            "S" => Some(Move::S),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Instruction {
    pub state: State,
    pub read1: Symbol,
    pub read2: Symbol,
    pub next_state: State,
    pub move1: Move,
    pub write2: Symbol,
    pub move2: Move,
}

impl Instruction {
    pub fn key(&self) -> (State, Symbol, Symbol) {
        (self.state, self.read1, self.read2)
    }

    /// The instruction `q α1,α2 → q S,α2,S`.
    pub fn idle(state: State, read1: Symbol, read2: Symbol) -> Instruction {
        Instruction {
            state,
            read1,
            read2,
            next_state: state,
            move1: Move::S,
            write2: read2,
            move2: Move::S,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    /// The four mandatory symbols only.
    pub fn binary() -> Alphabet {
        Alphabet {
            names: PREFIX.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn new(names: Vec<String>) -> Result<Alphabet, MachineError> {
        if names.len() < 4 || names.iter().zip(PREFIX).any(|(a, b)| a != b) {
            return Err(MachineError::BadAlphabetPrefix(names.join(" ")));
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !valid_symbol_name(name) {
                return Err(MachineError::BadSymbolName(name.clone()));
            }
            if !seen.insert(name.as_str()) {
                return Err(MachineError::DuplicateSymbol(name.clone()));
            }
        }
        Ok(Alphabet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, sym: Symbol) -> &str {
        &self.names[sym.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<Symbol> {
        self.names.iter().position(|n| n == name).map(Symbol)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.names.len()).map(Symbol)
    }

    /// Parse an input word written with one character per symbol.
    pub fn parse_word(&self, word: &str) -> Result<Vec<Symbol>, MachineError> {
        word.chars()
            .map(|c| {
                let mut buf = [0u8; 4];
                self.lookup(c.encode_utf8(&mut buf))
                    .ok_or_else(|| MachineError::UnknownSymbol(c.to_string()))
            })
            .collect()
    }

    pub fn render_word(&self, word: &[Symbol]) -> String {
        word.iter().map(|s| self.name(*s)).collect()
    }
}

fn valid_symbol_name(name: &str) -> bool {
    !name.is_empty()
        && name != "->"
        && !matches!(name, "L" | "R" | "S")
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '(' | ')' | '#' | '→'))
}

/// A program as written, before validation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawProgram {
    pub alphabet: Alphabet,
    pub state_count: usize,
    pub instructions: Vec<Instruction>,
}

/// A validated, normalized program. Instructions are sorted by key, so the
/// position of an instruction in [`MachineProgram::instructions`] is stable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MachineProgram {
    alphabet: Alphabet,
    state_count: usize,
    instructions: Vec<Instruction>,
}

impl MachineProgram {
    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn lookup(&self, state: State, read1: Symbol, read2: Symbol) -> Option<&Instruction> {
        self.instructions
            .binary_search_by_key(&(state, read1, read2), |i| i.key())
            .ok()
            .map(|idx| &self.instructions[idx])
    }

    /// Width of symbol and state codes: the least `w` with `2^w ≥ |A| + U`.
    pub fn code_width(&self) -> usize {
        code_width(self.alphabet.len() + self.state_count)
    }
}

pub(crate) fn code_width(total: usize) -> usize {
    let mut w = 1;
    while (1usize << w) < total {
        w += 1;
    }
    w
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("alphabet must start with `_ > 0 1`, got `{0}`")]
    BadAlphabetPrefix(String),
    #[error("invalid symbol name `{0}`")]
    BadSymbolName(String),
    #[error("symbol `{0}` listed twice")]
    DuplicateSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("state count must be at least 3, got {0}")]
    TooFewStates(usize),
    #[error("instruction {0} refers to an index outside the alphabet or state range")]
    OutOfRange(String),
    #[error("two instructions share the key {0}")]
    DuplicateInstructionKey(String),
    #[error("instruction {0} moves left while scanning the start marker")]
    LeftEdgeEscape(String),
    #[error("instruction {0} writes or erases the start marker")]
    StartSymbolWrite(String),
    #[error("no instruction for state {state} scanning ({read1}, {read2})")]
    NoMatchingInstruction {
        state: usize,
        read1: usize,
        read2: usize,
    },
    #[error("input must be non-empty and may not contain `_` or `>`")]
    BadInput,
    #[error("step budget must be at least 1")]
    ZeroBudget,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

struct Shown<'a>(&'a Instruction, &'a Alphabet);

impl fmt::Display for Shown<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (i, a) = (self.0, self.1);
        let name = |s: Symbol| a.names.get(s.0).map(String::as_str).unwrap_or("?");
        write!(
            f,
            "q{} {} {} -> q{} {} {} {}",
            i.state.0,
            name(i.read1),
            name(i.read2),
            i.next_state.0,
            i.move1.as_char(),
            name(i.write2),
            i.move2.as_char()
        )
    }
}

/// Check the machine conventions and complete the program.
///
/// Adds the idle run for states 1 and 2 over every symbol pair and patches
/// hanging states with `q α1,α2 → q S,α2,S`. A hanging state is any state
/// other than 1 and 2 that appears as a target or owns instructions; the
/// start state is patched only when it is a target, but always receives the
/// pair (▷,▷) if the program lacks it. Idle instructions already present
/// verbatim are kept once, so normalizing twice is harmless.
pub fn validate_and_normalize(raw: RawProgram) -> Result<MachineProgram, MachineError> {
    let RawProgram {
        alphabet,
        state_count,
        instructions,
    } = raw;
    if state_count < 3 {
        return Err(MachineError::TooFewStates(state_count));
    }
    let a = alphabet.len();
    for ins in &instructions {
        let in_range = [ins.read1, ins.read2, ins.write2].iter().all(|s| s.0 < a)
            && ins.state.0 < state_count
            && ins.next_state.0 < state_count;
        if !in_range {
            return Err(MachineError::OutOfRange(format!("{:?}", ins)));
        }
        let shown = || Shown(ins, &alphabet).to_string();
        if (ins.read1 == START && ins.move1 == Move::L) || (ins.read2 == START && ins.move2 == Move::L)
        {
            return Err(MachineError::LeftEdgeEscape(shown()));
        }
        if (ins.read2 == START) != (ins.write2 == START) {
            return Err(MachineError::StartSymbolWrite(shown()));
        }
    }

    let mut all: Vec<Instruction> = Vec::with_capacity(instructions.len() + 2 * a * a);
    let mut keys = BTreeSet::new();
    for ins in &instructions {
        if !keys.insert(ins.key()) {
            if all.contains(ins) {
                continue;
            }
            return Err(MachineError::DuplicateInstructionKey(
                Shown(ins, &alphabet).to_string(),
            ));
        }
        all.push(*ins);
    }

    let mut hanging = BTreeSet::new();
    for ins in &instructions {
        hanging.insert(ins.next_state);
        if ins.state != START_STATE {
            hanging.insert(ins.state);
        }
    }
    hanging.insert(ACCEPT);
    hanging.insert(REJECT);
    for state in hanging {
        for s1 in alphabet.symbols() {
            for s2 in alphabet.symbols() {
                let idle = Instruction::idle(state, s1, s2);
                match all.iter().find(|i| i.key() == idle.key()) {
                    None => {
                        keys.insert(idle.key());
                        all.push(idle);
                    }
                    Some(existing) if (state == ACCEPT || state == REJECT) && *existing != idle => {
                        return Err(MachineError::DuplicateInstructionKey(
                            Shown(existing, &alphabet).to_string(),
                        ));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    if !keys.contains(&(START_STATE, START, START)) {
        all.push(Instruction::idle(START_STATE, START, START));
    }
    all.sort_by_key(|i| i.key());
    Ok(MachineProgram {
        alphabet,
        state_count,
        instructions: all,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ins(q: usize, s1: Symbol, s2: Symbol, j: usize, m1: Move, w: Symbol, m2: Move) -> Instruction {
        Instruction {
            state: State(q),
            read1: s1,
            read2: s2,
            next_state: State(j),
            move1: m1,
            write2: w,
            move2: m2,
        }
    }

    fn raw(instructions: Vec<Instruction>, states: usize) -> RawProgram {
        RawProgram {
            alphabet: Alphabet::binary(),
            state_count: states,
            instructions,
        }
    }

    #[test]
    fn accept_all_gets_thirty_two_idle_instructions() {
        let p = validate_and_normalize(raw(
            vec![ins(0, START, START, 1, Move::S, START, Move::S)],
            3,
        ))
        .unwrap();
        assert_eq!(p.instructions().len(), 33);
    }

    #[test]
    fn hanging_state_gets_self_loops() {
        let p = validate_and_normalize(raw(
            vec![
                ins(0, START, START, 3, Move::R, START, Move::S),
                ins(3, ZERO, START, 1, Move::S, START, Move::S),
            ],
            4,
        ))
        .unwrap();
        let patched = p.lookup(State(3), ZERO, ONE).unwrap();
        assert_eq!(*patched, Instruction::idle(State(3), ZERO, ONE));
        assert_eq!(p.lookup(State(3), ZERO, START).unwrap().next_state, ACCEPT);
        // 2 written + 15 patches for q3 + 32 idle
        assert_eq!(p.instructions().len(), 2 + 15 + 32);
    }

    #[test]
    fn left_edge_escape_rejected() {
        let err = validate_and_normalize(raw(
            vec![ins(0, START, START, 0, Move::L, START, Move::S)],
            3,
        ))
        .unwrap_err();
        assert!(matches!(err, MachineError::LeftEdgeEscape(_)));
        let err = validate_and_normalize(raw(
            vec![ins(0, ZERO, START, 3, Move::S, START, Move::L)],
            4,
        ))
        .unwrap_err();
        assert!(matches!(err, MachineError::LeftEdgeEscape(_)));
    }

    #[test]
    fn start_marker_writes_rejected() {
        for (r, w) in [(START, ZERO), (ZERO, START)] {
            let err =
                validate_and_normalize(raw(vec![ins(0, ONE, r, 3, Move::S, w, Move::S)], 4)).unwrap_err();
            assert!(matches!(err, MachineError::StartSymbolWrite(_)));
        }
    }

    #[test]
    fn duplicate_keys_rejected() {
        let err = validate_and_normalize(raw(
            vec![
                ins(0, START, START, 1, Move::S, START, Move::S),
                ins(0, START, START, 2, Move::S, START, Move::S),
            ],
            3,
        ))
        .unwrap_err();
        assert!(matches!(err, MachineError::DuplicateInstructionKey(_)));
        let err = validate_and_normalize(raw(
            vec![
                ins(0, START, START, 1, Move::S, START, Move::S),
                ins(1, ZERO, ZERO, 2, Move::S, ZERO, Move::S),
            ],
            3,
        ))
        .unwrap_err();
        assert!(matches!(err, MachineError::DuplicateInstructionKey(_)));
    }

    #[test]
    fn normalization_is_idempotent() {
        let p = validate_and_normalize(raw(
            vec![
                ins(0, START, START, 3, Move::R, START, Move::S),
                ins(3, ONE, START, 1, Move::S, START, Move::S),
            ],
            4,
        ))
        .unwrap();
        let again = validate_and_normalize(raw(p.instructions().to_vec(), 4)).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn alphabet_prefix_is_enforced() {
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert!(matches!(
            Alphabet::new(names(&["_", "0", ">", "1"])),
            Err(MachineError::BadAlphabetPrefix(_))
        ));
        assert!(Alphabet::new(names(&["_", ">", "0", "1", "B"])).is_ok());
        assert!(matches!(
            Alphabet::new(names(&["_", ">", "0", "1", "0"])),
            Err(MachineError::DuplicateSymbol(_))
        ));
    }

    #[test]
    fn code_width_follows_total_count() {
        assert_eq!(code_width(7), 3);
        assert_eq!(code_width(8), 3);
        assert_eq!(code_width(9), 4);
        assert_eq!(code_width(2), 1);
    }
}
