//! Text syntax for programs and annotated facts.
//!
//! ```text
//! % comment to end of line
//! T(x, y) :- R(x, y).
//! T(x, y) :- T(x, z), R(z, y).
//! @target T.
//! ```
//!
//! Fact files hold `R(a, b) = <literal>.` entries; the annotation may be
//! omitted, in which case the fact carries `𝟙`.

use groundfix_core::instance::{Instance, InstanceError, Warning};
use groundfix_core::program::{Clause, Program, ProgramError, RawAtom};
use groundfix_core::semiring::Semiring;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error("{line}:{col}: {source}")]
    Fact {
        line: usize,
        col: usize,
        source: InstanceError,
    },
}

impl ParseError {
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Fact { line, .. } => Some(*line),
            ParseError::Program(_) => None,
        }
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor {
            src,
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        self.src[self.pos..].chars().nth(1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_trivia();
        self.peek().is_none()
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_string(),
        }
    }

    fn expect(&mut self, want: &str) -> Result<(), ParseError> {
        self.skip_trivia();
        if self.src[self.pos..].starts_with(want) {
            for _ in want.chars() {
                self.bump();
            }
            Ok(())
        } else {
            self.error(format!("expected `{want}`, found {}", self.describe()))
        }
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_trivia();
        if self.peek() == Some(want) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        self.skip_trivia();
        match self.peek() {
            Some(c) if c.is_alphanumeric() || c == '_' => {}
            _ => return self.error(format!("expected {what}, found {}", self.describe())),
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || c == '_' || c == '\'' {
                self.bump();
            } else {
                break;
            }
        }
        Ok(self.src[start..self.pos].to_string())
    }

    /// A bare identifier or a double-quoted string.
    fn constant(&mut self) -> Result<String, ParseError> {
        self.skip_trivia();
        if self.peek() != Some('"') {
            return self.ident("a constant");
        }
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                Some('"') => return Ok(out),
                Some('\\') => match self.bump() {
                    Some(c) => out.push(c),
                    None => return self.error("unterminated string"),
                },
                Some('\n') | None => return self.error("unterminated string"),
                Some(c) => out.push(c),
            }
        }
    }

    fn atom(&mut self, arg: fn(&mut Self) -> Result<String, ParseError>) -> Result<RawAtom, ParseError> {
        let pred = self.ident("a predicate symbol")?;
        self.expect("(")?;
        let mut args = Vec::new();
        if !self.eat(')') {
            loop {
                args.push(arg(self)?);
                if self.eat(')') {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(RawAtom { pred, args })
    }

    /// Annotation literal up to the `.` that ends the fact: a dot followed
    /// by whitespace, a comment or the end of input.
    fn literal(&mut self) -> Result<(String, usize, usize), ParseError> {
        self.skip_trivia();
        let (line, col) = (self.line, self.col);
        let start = self.pos;
        loop {
            match self.peek() {
                None => return self.error("expected `.` after annotation"),
                Some('.') if self.peek2().is_none_or(|c| c.is_whitespace() || c == '%') => break,
                Some('\n') => return self.error("expected `.` after annotation"),
                Some(_) => {
                    self.bump();
                }
            }
        }
        let lit = self.src[start..self.pos].trim().to_string();
        self.bump();
        Ok((lit, line, col))
    }
}

fn variable(c: &mut Cursor<'_>) -> Result<String, ParseError> {
    c.ident("a variable")
}

/// Parses and validates a program.
pub fn parse_clauses(text: &str) -> Result<(Vec<Clause>, Option<String>), ParseError> {
    let mut c = Cursor::new(text);
    let mut clauses = Vec::new();
    let mut target: Option<String> = None;
    while !c.at_end() {
        if c.peek() == Some('@') {
            let (line, col) = (c.line, c.col);
            c.bump();
            let kw = c.ident("a declaration keyword")?;
            if kw != "target" {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("unknown declaration `@{kw}`"),
                });
            }
            let sym = c.ident("a predicate symbol")?;
            c.expect(".")?;
            if target.replace(sym).is_some() {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: "duplicate @target declaration".into(),
                });
            }
            continue;
        }
        let line = c.line;
        let head = c.atom(variable)?;
        c.expect(":-")?;
        let mut body = vec![c.atom(variable)?];
        while c.eat(',') {
            body.push(c.atom(variable)?);
        }
        c.expect(".")?;
        clauses.push(Clause { head, body, line });
    }
    Ok((clauses, target))
}

pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let (clauses, target) = parse_clauses(text)?;
    Ok(Program::from_clauses(&clauses, target.as_deref())?)
}

/// Parses a fact file. Duplicate facts are ⊕-combined and reported as
/// warnings; facts annotated with `𝟘` are dropped.
pub fn parse_facts(text: &str, semiring: &Semiring) -> Result<(Instance, Vec<Warning>), ParseError> {
    let mut c = Cursor::new(text);
    let mut builder = Instance::builder(semiring.clone());
    while !c.at_end() {
        let (line, col) = (c.line, c.col);
        let atom = c.atom(Cursor::constant)?;
        let value = if c.eat('=') {
            let (lit, l, k) = c.literal()?;
            semiring.parse_value(&lit).map_err(|e| ParseError::Fact {
                line: l,
                col: k,
                source: InstanceError::Semiring(e),
            })?
        } else {
            c.expect(".")?;
            semiring.one()
        };
        builder
            .add_fact(&atom.pred, atom.args, value)
            .map_err(|source| ParseError::Fact { line, col, source })?;
    }
    Ok(builder.build())
}

/// Renders an instance in fact-file syntax, one fact per line.
pub fn write_facts(instance: &Instance) -> String {
    let sr = instance.semiring();
    let mut out = String::new();
    for (pred, rel) in instance.relations() {
        for (tuple, v) in &rel.facts {
            let args: Vec<String> = instance.names(tuple).iter().map(|s| quote(s)).collect();
            out.push_str(&format!("{pred}({}) = {}.\n", args.join(","), sr.format_value(v)));
        }
    }
    out
}

fn quote(s: &str) -> String {
    if !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
        s.to_string()
    } else {
        format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use groundfix_core::semiring::Value;

    const TC: &str = "T(x1,x2) :- R(x1,x2). T(x1,x2) :- T(x1,x3), R(x3,x2). @target T.";

    #[test]
    fn transitive_closure_parses_into_one_rule() {
        let p = parse_program(TC).unwrap();
        assert_eq!(p.rules.len(), 1);
        assert_eq!(p.rules[0].bodies.len(), 2);
    }

    #[test]
    fn pretty_print_round_trips() {
        let p = parse_program(TC).unwrap();
        assert_eq!(parse_program(&p.to_string()).unwrap(), p);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_program("T(x) :- R(x)\n@target T.").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 2,
                col: 1,
                msg: "expected `.`, found `@`".into()
            }
        );
        assert!(matches!(parse_program("T(x) :- R(y,z). @target T."), Err(ParseError::Program(ProgramError::UnsafeRule { .. }))));
        assert!(matches!(parse_program("T(x) :- R(x)."), Err(ParseError::Program(ProgramError::MissingTarget))));
        assert!(parse_program("@target T. @target T. T(x) :- R(x).").is_err());
        assert!(parse_program("@goal T.").is_err());
    }

    #[test]
    fn tropical_facts() {
        let (inst, w) = parse_facts("R(a,b) = 1. R(b,c) = 2.", &Semiring::tropical()).unwrap();
        assert!(w.is_empty());
        assert_eq!(inst.num_facts(), 2);
        assert_eq!(inst.domain(), &["a", "b", "c"]);
        let (inst, _) = parse_facts("R(a,b) = inf.", &Semiring::tropical()).unwrap();
        assert_eq!(inst.num_facts(), 0);
        let (inst, _) = parse_facts("R(a,b) = 2.5.\nR(b,c) = 0.25. % cheap", &Semiring::tropical()).unwrap();
        assert_eq!(inst.value("R", &[0, 1]), Some(&Value::trop(2.5)));
        assert_eq!(inst.value("R", &[1, 2]), Some(&Value::trop(0.25)));
    }

    #[test]
    fn boolean_duplicates_merge_with_warning() {
        let (inst, w) = parse_facts("R(a,b). R(a,b).", &Semiring::boolean()).unwrap();
        assert_eq!(inst.num_facts(), 1);
        assert_eq!(w.len(), 1);
    }

    #[test]
    fn bad_literals_and_arity_are_reported() {
        let err = parse_facts("R(a,b) = -1.", &Semiring::tropical()).unwrap_err();
        assert!(matches!(err, ParseError::Fact { line: 1, col: 10, .. }));
        let err = parse_facts("R(a,b) = 1.\nR(a) = 1.", &Semiring::tropical()).unwrap_err();
        assert!(matches!(err, ParseError::Fact { line: 2, source: InstanceError::ArityMismatch { .. }, .. }));
    }

    #[test]
    fn quoted_constants_and_set_literals() {
        let sr: Semiring = "set:k1,k2".parse().unwrap();
        let (inst, _) = parse_facts("R(\"new york\", b) = {k1,k2}.", &sr).unwrap();
        assert_eq!(inst.domain(), &["b", "new york"]);
        let text = write_facts(&inst);
        assert_eq!(text, "R(\"new york\",b) = {k1,k2}.\n");
        let (again, _) = parse_facts(&text, &sr).unwrap();
        assert_eq!(again, inst);
    }
}
