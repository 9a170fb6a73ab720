//! The line-oriented machine file format.
//!
//! ```text
//! alphabet: _ > 0 1
//! states: 3
//! q0 > > -> q1 S > S   # accept at once
//! ```

use super::{
    validate_and_normalize, Alphabet, Instruction, MachineError, MachineProgram, Move, RawProgram,
    State,
};

fn parse_err(line: usize, message: impl Into<String>) -> MachineError {
    MachineError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_state(token: &str, line: usize) -> Result<State, MachineError> {
    token
        .strip_prefix('q')
        .and_then(|d| d.parse::<usize>().ok())
        .map(State)
        .ok_or_else(|| parse_err(line, format!("expected a state like q3, got `{token}`")))
}

pub fn parse_machine(text: &str) -> Result<RawProgram, MachineError> {
    let mut alphabet = None;
    let mut states = None;
    let mut instructions = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("alphabet:") {
            if alphabet.is_some() {
                return Err(parse_err(line_no, "alphabet given twice"));
            }
            let names = rest.split_whitespace().map(str::to_string).collect();
            alphabet = Some(Alphabet::new(names)?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("states:") {
            let count = rest
                .trim()
                .parse::<usize>()
                .map_err(|_| parse_err(line_no, "state count must be a number"))?;
            states = Some(count);
            continue;
        }
        let alpha = alphabet
            .as_ref()
            .ok_or_else(|| parse_err(line_no, "instruction before the alphabet line"))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 8 || tokens[3] != "->" {
            return Err(parse_err(
                line_no,
                "expected `q<i> <sym1> <sym2> -> q<j> <move1> <write2> <move2>`",
            ));
        }
        let sym = |t: &str| {
            alpha
                .lookup(t)
                .ok_or_else(|| parse_err(line_no, format!("unknown symbol `{t}`")))
        };
        let mv = |t: &str| {
            Move::from_token(t).ok_or_else(|| parse_err(line_no, format!("bad move `{t}`")))
        };
        instructions.push(Instruction {
            state: parse_state(tokens[0], line_no)?,
            read1: sym(tokens[1])?,
            read2: sym(tokens[2])?,
            next_state: parse_state(tokens[4], line_no)?,
            move1: mv(tokens[5])?,
            write2: sym(tokens[6])?,
            move2: mv(tokens[7])?,
        });
    }
    Ok(RawProgram {
        alphabet: alphabet.ok_or_else(|| parse_err(0, "missing alphabet line"))?,
        state_count: states.ok_or_else(|| parse_err(0, "missing states line"))?,
        instructions,
    })
}

pub fn render_machine(program: &MachineProgram) -> String {
    let a = program.alphabet();
    let mut out = format!("alphabet: {}\nstates: {}\n", a.names().join(" "), program.state_count());
    for i in program.instructions() {
        out.push_str(&format!(
            "q{} {} {} -> q{} {} {} {}\n",
            i.state.0,
            a.name(i.read1),
            a.name(i.read2),
            i.next_state.0,
            i.move1.as_char(),
            a.name(i.write2),
            i.move2.as_char()
        ));
    }
    out
}

pub fn load_machine(text: &str) -> Result<MachineProgram, MachineError> {
    validate_and_normalize(parse_machine(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let raw = parse_machine(
            "# demo\nalphabet: _ > 0 1 B\n\nstates: 4\nq0 > > -> q3 R > S # go\nq3 B > -> q1 S > S\n",
        )
        .unwrap();
        assert_eq!(raw.alphabet.len(), 5);
        assert_eq!(raw.state_count, 4);
        assert_eq!(raw.instructions.len(), 2);
        assert_eq!(raw.instructions[1].read1, super::super::Symbol(4));
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_machine("alphabet: _ > 0 1\nstates: 3\nq0 > > q1 S > S\n").unwrap_err();
        assert!(matches!(err, MachineError::Parse { line: 3, .. }));
        let err = parse_machine("alphabet: _ > 0 1\nstates: 3\nq0 > 7 -> q1 S > S\n").unwrap_err();
        assert!(matches!(err, MachineError::Parse { line: 3, .. }));
    }

    #[test]
    fn rejects_invariant_violations() {
        let err = load_machine("alphabet: _ > 0 1\nstates: 3\nq0 > > -> q0 L > S\n").unwrap_err();
        assert!(matches!(err, MachineError::LeftEdgeEscape(_)));
        let err = load_machine("alphabet: 0 1 _ >\nstates: 3\n").unwrap_err();
        assert!(matches!(err, MachineError::BadAlphabetPrefix(_)));
    }

    #[test]
    fn render_then_load_is_identity() {
        let p = load_machine(
            "alphabet: _ > 0 1\nstates: 5\nq0 > > -> q3 R > R\nq3 1 _ -> q4 S 1 L\nq4 1 > -> q1 S > S\n",
        )
        .unwrap();
        assert_eq!(load_machine(&render_machine(&p)).unwrap(), p);
    }
}
