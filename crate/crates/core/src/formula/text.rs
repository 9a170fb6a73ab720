//! S-expression text form.
//!
//! ```text
//! T  F  x[3][0]  (~ f)  (& f ...)  (| f ...)  (> f g)  (= f g)  (^ f g)
//! (A (v ...) f)  (E (v ...) f)
//! ```

use super::{Formula, FormulaError, Node, VarId, VarKind};

pub fn render(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_formula(f: &Formula, out: &mut String) {
    use std::fmt::Write;
    match f.node() {
        Node::Const(true) => out.push('T'),
        Node::Const(false) => out.push('F'),
        Node::Var(v) => {
            let _ = write!(out, "{v}");
        }
        Node::Not(a) => {
            out.push_str("(~ ");
            write_formula(a, out);
            out.push(')');
        }
        Node::And(parts) | Node::Or(parts) => {
            out.push_str(if matches!(f.node(), Node::And(_)) { "(&" } else { "(|" });
            for p in parts {
                out.push(' ');
                write_formula(p, out);
            }
            out.push(')');
        }
        Node::Implies(a, b) | Node::Equiv(a, b) | Node::Xor(a, b) => {
            out.push_str(match f.node() {
                Node::Implies(..) => "(> ",
                Node::Equiv(..) => "(= ",
                _ => "(^ ",
            });
            write_formula(a, out);
            out.push(' ');
            write_formula(b, out);
            out.push(')');
        }
        Node::Forall(vs, body) | Node::Exists(vs, body) => {
            out.push_str(if matches!(f.node(), Node::Forall(..)) { "(A (" } else { "(E (" });
            for (i, v) in vs.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{v}");
            }
            out.push_str(") ");
            write_formula(body, out);
            out.push(')');
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T, FormulaError> {
        Err(FormulaError::Parse {
            pos: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), FormulaError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{}`", c as char))
        }
    }

    fn word(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("")
    }

    fn number(&mut self) -> Result<u128, FormulaError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<u128>() {
            Ok(v) => Ok(v),
            Err(_) => {
                self.pos = start;
                self.err("expected a decimal index")
            }
        }
    }

    /// A variable whose kind name starts at the current position.
    fn var_after(&mut self, start: usize, name: &str) -> Result<VarId, FormulaError> {
        let kind = VarKind::from_letter(name).ok_or(FormulaError::UnknownVariableKind {
            pos: start,
            name: name.to_string(),
        })?;
        let mut idx = Vec::new();
        while self.src.get(self.pos) == Some(&b'[') {
            self.pos += 1;
            idx.push(self.number()?);
            if self.src.get(self.pos) != Some(&b']') {
                return self.err("expected `]`");
            }
            self.pos += 1;
        }
        VarId::from_indices(kind, &idx).ok_or_else(|| FormulaError::Parse {
            pos: start,
            message: format!("`{name}` takes {} index(es)", kind.arity()),
        })
    }

    fn var(&mut self) -> Result<VarId, FormulaError> {
        self.skip_ws();
        let start = self.pos;
        let name = self.word();
        if name.is_empty() {
            return self.err("expected a variable");
        }
        self.var_after(start, name)
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            None => self.err("unexpected end of input"),
            Some(b'(') => {
                self.pos += 1;
                let op = self.peek();
                let start = self.pos;
                let f = match op {
                    Some(b'~') => {
                        self.pos += 1;
                        Formula::not(self.formula()?)
                    }
                    Some(c @ (b'&' | b'|')) => {
                        self.pos += 1;
                        let mut parts = Vec::new();
                        while self.peek() != Some(b')') {
                            parts.push(self.formula()?);
                        }
                        if c == b'&' {
                            Formula::and(parts)
                        } else {
                            Formula::or(parts)
                        }
                    }
                    Some(c @ (b'>' | b'=' | b'^')) => {
                        self.pos += 1;
                        let a = self.formula()?;
                        let b = self.formula()?;
                        match c {
                            b'>' => Formula::implies(a, b),
                            b'=' => Formula::equiv(a, b),
                            _ => Formula::xor(a, b),
                        }
                    }
                    Some(c @ (b'A' | b'E')) => {
                        self.pos += 1;
                        if self.src.get(self.pos).is_some_and(|b| b.is_ascii_alphanumeric()) {
                            return self.err("expected a quantifier `A` or `E`");
                        }
                        self.expect(b'(')?;
                        let mut vars = Vec::new();
                        while self.peek() != Some(b')') {
                            vars.push(self.var()?);
                        }
                        self.pos += 1;
                        let body = self.formula()?;
                        let built = if c == b'A' {
                            Formula::forall(vars, body)
                        } else {
                            Formula::exists(vars, body)
                        };
                        built.map_err(|e| FormulaError::Parse {
                            pos: start,
                            message: e.to_string(),
                        })?
                    }
                    _ => return self.err("expected a connective"),
                };
                self.expect(b')')?;
                Ok(f)
            }
            Some(_) => {
                let start = self.pos;
                let name = self.word();
                match name {
                    "" => self.err("unexpected character"),
                    "T" => Ok(Formula::truth()),
                    "F" if self.src.get(self.pos) != Some(&b'[') => Ok(Formula::falsity()),
                    _ => Ok(Formula::var(self.var_after(start, name)?)),
                }
            }
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let f = p.formula()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_negated_state_bit() {
        let f = Formula::not(Formula::var(VarId::tagged(VarKind::State, 4, 0)));
        assert_eq!(render(&f), "(~ q[4][0])");
    }

    #[test]
    fn parses_excluded_middle() {
        let f = parse("(A (p[0]) (| p[0] (~ p[0])))").unwrap();
        let p0 = Formula::var(VarId::p(0));
        let expected =
            Formula::forall(vec![VarId::p(0)], Formula::or(vec![p0.clone(), Formula::not(p0)])).unwrap();
        assert_eq!(f, expected);
    }

    #[test]
    fn constants_and_input_symbol_variables_are_distinct() {
        assert_eq!(parse("F").unwrap(), Formula::falsity());
        assert_eq!(
            parse("F[2]").unwrap(),
            Formula::var(VarId::plain(VarKind::InputSymbol, 2))
        );
        assert_eq!(
            parse("u0[1]").unwrap(),
            Formula::var(VarId::plain(VarKind::TailCell, 1))
        );
    }

    #[test]
    fn whitespace_is_insignificant() {
        let a = parse("(&T(~F)\n x[1][2])").unwrap();
        assert_eq!(render(&a), "(& T (~ F) x[1][2])");
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(
            parse("(& k[1] T)"),
            Err(FormulaError::UnknownVariableKind { pos: 3, .. })
        ));
        assert!(matches!(parse("(& T"), Err(FormulaError::Parse { .. })));
        assert!(matches!(parse("x[1]"), Err(FormulaError::Parse { pos: 0, .. })));
        assert!(matches!(parse("(A () T)"), Err(FormulaError::Parse { .. })));
        assert!(matches!(parse("T T"), Err(FormulaError::Parse { pos: 2, .. })));
    }
}
