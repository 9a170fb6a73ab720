use std::sync::Arc;

use super::{MachineError, MachineProgram, Move, State, Symbol, ACCEPT, BLANK, REJECT, START, START_STATE};

/// A full machine snapshot. Cells past the end of either tape read as blank;
/// `tape2` never stores trailing blanks, so equal snapshots compare equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub state: State,
    pub head1: usize,
    pub head2: usize,
    tape1: Arc<[Symbol]>,
    tape2: Vec<Symbol>,
}

impl Configuration {
    pub fn new(
        state: State,
        head1: usize,
        head2: usize,
        tape1: Arc<[Symbol]>,
        mut tape2: Vec<Symbol>,
    ) -> Configuration {
        while tape2.len() > 1 && tape2.last() == Some(&BLANK) {
            tape2.pop();
        }
        Configuration {
            state,
            head1,
            head2,
            tape1,
            tape2,
        }
    }

    pub fn cell1(&self, i: usize) -> Symbol {
        self.tape1.get(i).copied().unwrap_or(BLANK)
    }

    pub fn cell2(&self, i: usize) -> Symbol {
        self.tape2.get(i).copied().unwrap_or(BLANK)
    }

    pub fn tape1(&self) -> &[Symbol] {
        &self.tape1
    }

    pub fn tape2(&self) -> &[Symbol] {
        &self.tape2
    }

    pub fn scanned(&self) -> (Symbol, Symbol) {
        (self.cell1(self.head1), self.cell2(self.head2))
    }

    pub fn is_halted(&self) -> bool {
        self.state == ACCEPT || self.state == REJECT
    }

    /// The same snapshot with cell `i` of the work tape replaced.
    pub fn with_cell2(&self, i: usize, sym: Symbol) -> Configuration {
        let mut tape2 = self.tape2.clone();
        if tape2.len() <= i {
            tape2.resize(i + 1, BLANK);
        }
        tape2[i] = sym;
        Configuration::new(self.state, self.head1, self.head2, self.tape1.clone(), tape2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Accepted,
    Rejected,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimResult {
    pub outcome: Outcome,
    pub steps_used: u64,
    pub max_head1: usize,
    pub max_head2: usize,
}

fn check_input(input: &[Symbol]) -> Result<(), MachineError> {
    if input.is_empty() || input.iter().any(|&s| s == BLANK || s == START) {
        return Err(MachineError::BadInput);
    }
    Ok(())
}

pub fn initial_configuration(input: &[Symbol]) -> Result<Configuration, MachineError> {
    check_input(input)?;
    let mut tape1 = Vec::with_capacity(input.len() + 1);
    tape1.push(START);
    tape1.extend_from_slice(input);
    Ok(Configuration::new(START_STATE, 0, 0, tape1.into(), vec![START]))
}

fn shift(pos: usize, mv: Move) -> usize {
    match mv {
        Move::L => pos - 1,
        Move::R => pos + 1,
        Move::S => pos,
    }
}

pub fn step(program: &MachineProgram, config: &Configuration) -> Result<Configuration, MachineError> {
    let (s1, s2) = config.scanned();
    let ins = program
        .lookup(config.state, s1, s2)
        .ok_or(MachineError::NoMatchingInstruction {
            state: config.state.0,
            read1: s1.0,
            read2: s2.0,
        })?;
    let mut next = if ins.write2 == s2 {
        config.clone()
    } else {
        config.with_cell2(config.head2, ins.write2)
    };
    next.state = ins.next_state;
    next.head1 = shift(config.head1, ins.move1);
    next.head2 = shift(config.head2, ins.move2);
    Ok(next)
}

pub fn simulate(
    program: &MachineProgram,
    input: &[Symbol],
    budget: u64,
) -> Result<SimResult, MachineError> {
    if budget == 0 {
        return Err(MachineError::ZeroBudget);
    }
    let mut config = initial_configuration(input)?;
    let mut steps = 0;
    let mut max_head1 = 0;
    let mut max_head2 = 0;
    loop {
        let outcome = match config.state {
            ACCEPT => Some(Outcome::Accepted),
            REJECT => Some(Outcome::Rejected),
            _ if steps == budget => Some(Outcome::BudgetExhausted),
            _ => None,
        };
        if let Some(outcome) = outcome {
            return Ok(SimResult {
                outcome,
                steps_used: steps,
                max_head1,
                max_head2,
            });
        }
        config = step(program, &config)?;
        steps += 1;
        max_head1 = max_head1.max(config.head1);
        max_head2 = max_head2.max(config.head2);
    }
}

/// Configurations at steps `0..=steps`, continuing through the idle run.
pub fn run_trace(
    program: &MachineProgram,
    input: &[Symbol],
    steps: usize,
) -> Result<Vec<Configuration>, MachineError> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(initial_configuration(input)?);
    for _ in 0..steps {
        let next = step(program, out.last().unwrap())?;
        out.push(next);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn machine(src: &str) -> MachineProgram {
        load_machine(src).unwrap()
    }

    const FIRST_IS_ONE: &str = "alphabet: _ > 0 1\nstates: 4\n\
        q0 > > -> q3 R > S\nq3 1 > -> q1 S > S\nq3 0 > -> q2 S > S\n";

    const COPY3: &str = "alphabet: _ > 0 1\nstates: 4\n\
        q0 > > -> q3 R > R\nq3 1 _ -> q3 R 1 R\nq3 _ _ -> q1 S _ S\n";

    #[test]
    fn accept_and_reject_all() {
        let acc = machine("alphabet: _ > 0 1\nstates: 3\nq0 > > -> q1 S > S\n");
        let rej = machine("alphabet: _ > 0 1\nstates: 3\nq0 > > -> q2 S > S\n");
        let x = acc.alphabet().parse_word("01").unwrap();
        let r = simulate(&acc, &x, 4).unwrap();
        assert_eq!((r.outcome, r.steps_used), (Outcome::Accepted, 1));
        let r = simulate(&rej, &x, 4).unwrap();
        assert_eq!((r.outcome, r.steps_used), (Outcome::Rejected, 1));

        let c0 = initial_configuration(&x).unwrap();
        let c1 = step(&acc, &c0).unwrap();
        assert_eq!(c1.state, ACCEPT);
        assert_eq!((c1.head1, c1.head2), (0, 0));
        assert_eq!(c1.tape1(), c0.tape1());
        assert_eq!(c1.tape2(), c0.tape2());
        assert_eq!(step(&acc, &c1).unwrap(), c1);
    }

    #[test]
    fn first_symbol_machine() {
        let p = machine(FIRST_IS_ONE);
        let a = p.alphabet();
        let run = |w: &str| simulate(&p, &a.parse_word(w).unwrap(), 4).unwrap().outcome;
        assert_eq!(run("10"), Outcome::Accepted);
        assert_eq!(run("01"), Outcome::Rejected);
    }

    #[test]
    fn copy_step_writes_and_moves() {
        let p = machine(COPY3);
        let x = p.alphabet().parse_word("11").unwrap();
        let trace = run_trace(&p, &x, 2).unwrap();
        let c = &trace[2];
        assert_eq!(c.tape2(), &[START, ONE]);
        assert_eq!(c.head2, 2);
        assert_eq!(c.head1, 2);
    }

    #[test]
    fn budget_exhaustion_is_an_outcome() {
        let p = machine(COPY3);
        let x = p.alphabet().parse_word("111").unwrap();
        let r = simulate(&p, &x, 2).unwrap();
        assert_eq!((r.outcome, r.steps_used), (Outcome::BudgetExhausted, 2));
        let r = simulate(&p, &x, 10).unwrap();
        assert_eq!((r.outcome, r.steps_used, r.max_head2), (Outcome::Accepted, 5, 4));
    }

    #[test]
    fn bad_inputs() {
        let p = machine(COPY3);
        assert_eq!(simulate(&p, &[], 3), Err(MachineError::BadInput));
        assert_eq!(simulate(&p, &[ONE, BLANK], 3), Err(MachineError::BadInput));
        assert_eq!(simulate(&p, &[ONE], 0), Err(MachineError::ZeroBudget));
    }

    #[test]
    fn tape1_never_changes_and_halting_absorbs() {
        let p = machine(COPY3);
        let x = p.alphabet().parse_word("1101").unwrap();
        let trace = run_trace(&p, &x, 20).unwrap();
        let first_halt = trace.iter().position(|c| c.is_halted());
        for c in &trace {
            assert_eq!(c.tape1(), trace[0].tape1());
        }
        if let Some(h) = first_halt {
            for c in &trace[h..] {
                assert_eq!(c, &trace[h]);
            }
        }
    }
}
