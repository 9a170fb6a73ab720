//! Compact one-line-per-instruction rendering of a program, as a machine
//! would write it onto its own work tape: `q7,(0001),B→q4,R,C,L`.
//!
//! The start marker is written as its code in parentheses; every other
//! symbol by name.

use super::{
    validate_and_normalize, Alphabet, Instruction, MachineError, MachineProgram, Move, RawProgram,
    State, Symbol, START,
};

fn start_code(width: usize) -> String {
    (0..width)
        .map(|bit| if (START.0 >> (width - 1 - bit)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn symbol_token(a: &Alphabet, sym: Symbol, code: &str) -> String {
    if sym == START {
        format!("({code})")
    } else {
        a.name(sym).to_string()
    }
}

pub fn serialize_program(program: &MachineProgram) -> String {
    let a = program.alphabet();
    let code = start_code(program.code_width());
    let mut out = String::new();
    for i in program.instructions() {
        out.push_str(&format!(
            "q{},{},{}→q{},{},{},{}\n",
            i.state.0,
            symbol_token(a, i.read1, &code),
            symbol_token(a, i.read2, &code),
            i.next_state.0,
            i.move1.as_char(),
            symbol_token(a, i.write2, &code),
            i.move2.as_char()
        ));
    }
    out
}

pub fn parse_serialized(
    text: &str,
    alphabet: &Alphabet,
    state_count: usize,
) -> Result<MachineProgram, MachineError> {
    let code = start_code(super::code_width(alphabet.len() + state_count));
    let mut instructions = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let err = |message: String| MachineError::Parse {
            line: line_no,
            message,
        };
        let (lhs, rhs) = line
            .split_once('→')
            .ok_or_else(|| err("missing `→`".into()))?;
        let lhs: Vec<&str> = lhs.split(',').collect();
        let rhs: Vec<&str> = rhs.split(',').collect();
        if lhs.len() != 3 || rhs.len() != 4 {
            return Err(err(format!("wrong operand count in `{line}`")));
        }
        let state = |t: &str| {
            t.strip_prefix('q')
                .and_then(|d| d.parse().ok())
                .map(State)
                .ok_or_else(|| err(format!("bad state `{t}`")))
        };
        let sym = |t: &str| {
            if let Some(inner) = t.strip_prefix('(').and_then(|s| s.strip_suffix(')')) {
                if inner == code {
                    return Ok(START);
                }
                return Err(err(format!("bad start-marker code `{t}`")));
            }
            alphabet
                .lookup(t)
                .filter(|&s| s != START)
                .ok_or_else(|| err(format!("unknown symbol `{t}`")))
        };
        let mv = |t: &str| Move::from_token(t).ok_or_else(|| err(format!("bad move `{t}`")));
        instructions.push(Instruction {
            state: state(lhs[0])?,
            read1: sym(lhs[1])?,
            read2: sym(lhs[2])?,
            next_state: state(rhs[0])?,
            move1: mv(rhs[1])?,
            write2: sym(rhs[2])?,
            move2: mv(rhs[3])?,
        });
    }
    validate_and_normalize(RawProgram {
        alphabet: alphabet.clone(),
        state_count,
        instructions,
    })
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    #[test]
    fn worked_form_with_four_bit_codes() {
        let names = ["_", ">", "0", "1", "B", "C"].iter().map(|s| s.to_string()).collect();
        let alphabet = Alphabet::new(names).unwrap();
        let b = alphabet.lookup("B").unwrap();
        let c = alphabet.lookup("C").unwrap();
        let p = validate_and_normalize(RawProgram {
            alphabet,
            state_count: 8,
            instructions: vec![Instruction {
                state: State(7),
                read1: START,
                read2: b,
                next_state: State(4),
                move1: Move::R,
                write2: c,
                move2: Move::L,
            }],
        })
        .unwrap();
        assert_eq!(p.code_width(), 4);
        let text = serialize_program(&p);
        assert!(text.lines().any(|l| l == "q7,(0001),B→q4,R,C,L"), "{text}");
        assert!(text.lines().any(|l| l == "q1,0,0→q1,S,0,S"));
    }

    #[test]
    fn round_trip() {
        let p = load_machine(
            "alphabet: _ > 0 1\nstates: 5\nq0 > > -> q3 R > R\nq3 1 _ -> q4 S 1 L\nq4 1 > -> q1 S > S\n",
        )
        .unwrap();
        let text = serialize_program(&p);
        assert_eq!(parse_serialized(&text, p.alphabet(), p.state_count()).unwrap(), p);
    }
}
