//! OpenQASM 2.0 subset reader.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use super::{Circuit, GateKind, Qubit};
use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("index {index} out of range for register `{register}` of size {size}")]
    IndexOutOfRange {
        register: String,
        index: usize,
        size: usize,
    },
    #[error("duplicate register `{0}`")]
    DuplicateRegister(String),
    #[error("unsupported statement: {0}")]
    Unsupported(String),
    #[error("{0}")]
    InvalidGate(String),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str(String),
    Sym(char),
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(n) => write!(f, "number {n}"),
            Tok::Str(s) => write!(f, "string \"{s}\""),
            Tok::Sym(c) => write!(f, "`{c}`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: String| ParseError {
        line,
        col,
        kind: ParseErrorKind::Syntax(msg),
    };
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let (sl, sc) = (line, col);
        let start = i;
        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| err(sl, sc, format!("bad number `{text}`")))?;
            Tok::Num(v)
        } else if c == '"' {
            i += 1;
            while i < chars.len() && chars[i] != '"' && chars[i] != '\n' {
                i += 1;
            }
            if chars.get(i) != Some(&'"') {
                return Err(err(sl, sc, "unterminated string".into()));
            }
            i += 1;
            Tok::Str(chars[start + 1..i - 1].iter().collect())
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            i += 2;
            Tok::Arrow
        } else if ";,[]()+-*/{}".contains(c) {
            i += 1;
            Tok::Sym(c)
        } else {
            return Err(err(sl, sc, format!("unexpected character `{c}`")));
        };
        col += i - start;
        out.push(Spanned { tok, line: sl, col: sc });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// A gate argument: a whole register or one element of it.
struct Arg {
    name: String,
    index: Option<usize>,
    line: usize,
    col: usize,
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    circuit: Circuit,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn error_at(&self, (line, col): (usize, usize), kind: ParseErrorKind) -> ParseError {
        ParseError { line, col, kind }
    }

    fn syntax(&self, msg: String) -> ParseError {
        self.error_at(self.here(), ParseErrorKind::Syntax(msg))
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Sym(s) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            other => Err(self.syntax(format!("expected `{c}`, found {other}"))),
        }
    }

    fn eat_sym(&mut self, c: char) -> bool {
        if matches!(self.peek(), Tok::Sym(s) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.pos += 1;
                Ok(s)
            }
            other => Err(self.syntax(format!("expected identifier, found {other}"))),
        }
    }

    fn uint(&mut self) -> Result<usize, ParseError> {
        match *self.peek() {
            Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 => {
                self.pos += 1;
                Ok(v as usize)
            }
            ref other => Err(self.syntax(format!("expected non-negative integer, found {other}"))),
        }
    }

    fn program(mut self) -> Result<Circuit, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "OPENQASM" => {
                self.pos += 1;
            }
            _ => return Err(self.syntax("missing `OPENQASM 2.0;` header".into())),
        }
        match *self.peek() {
            Tok::Num(v) if v == 2.0 => self.pos += 1,
            ref other => return Err(self.syntax(format!("unsupported OpenQASM version {other}"))),
        }
        self.expect_sym(';')?;
        while *self.peek() != Tok::Eof {
            self.statement()?;
        }
        Ok(self.circuit)
    }

    fn statement(&mut self) -> Result<(), ParseError> {
        let at = self.here();
        let head = self.ident()?;
        match head.as_str() {
            "include" => {
                match self.next() {
                    Tok::Str(s) if s == "qelib1.inc" => {}
                    Tok::Str(s) => {
                        return Err(self.error_at(at, ParseErrorKind::Unsupported(format!("include \"{s}\""))))
                    }
                    other => return Err(self.syntax(format!("expected file name, found {other}"))),
                }
                self.expect_sym(';')
            }
            "qreg" | "creg" => {
                let name_at = self.here();
                let name = self.ident()?;
                self.expect_sym('[')?;
                let size = self.uint()?;
                self.expect_sym(']')?;
                self.expect_sym(';')?;
                let res = if head == "qreg" {
                    self.circuit.add_qreg(&name, size).map(|_| ())
                } else {
                    self.circuit.add_creg(&name, size).map(|_| ())
                };
                res.map_err(|_| self.error_at(name_at, ParseErrorKind::DuplicateRegister(name)))
            }
            "opaque" => {
                let name = self.ident()?;
                if self.eat_sym('(') && !self.eat_sym(')') {
                    return Err(self.error_at(
                        at,
                        ParseErrorKind::Unsupported("parameterized opaque gates".into()),
                    ));
                }
                let mut arity = 1;
                self.ident()?;
                while self.eat_sym(',') {
                    self.ident()?;
                    arity += 1;
                }
                self.expect_sym(';')?;
                self.circuit
                    .declare_opaque(&name, arity)
                    .map_err(|e| self.error_at(at, ParseErrorKind::InvalidGate(e.to_string())))?;
                Ok(())
            }
            "measure" => {
                let src = self.arg()?;
                match self.next() {
                    Tok::Arrow => {}
                    other => return Err(self.syntax(format!("expected `->`, found {other}"))),
                }
                let dst = self.arg()?;
                self.expect_sym(';')?;
                let qs = self.resolve_q(&src)?;
                let cs = self.resolve_c(&dst)?;
                if qs.len() != cs.len() {
                    return Err(self.error_at(
                        at,
                        ParseErrorKind::Syntax("measure operands differ in size".into()),
                    ));
                }
                for (q, c) in qs.into_iter().zip(cs) {
                    self.circuit
                        .measure(q, c)
                        .map_err(|e| self.error_at(at, ParseErrorKind::InvalidGate(e.to_string())))?;
                }
                Ok(())
            }
            "barrier" => {
                let args = self.arg_list()?;
                self.expect_sym(';')?;
                let mut qubits = Vec::new();
                for a in &args {
                    for q in self.resolve_q(a)? {
                        if !qubits.contains(&q) {
                            qubits.push(q);
                        }
                    }
                }
                self.push(at, GateKind::Barrier, Vec::new(), qubits)
            }
            "gate" | "if" | "reset" | "U" => Err(self.error_at(at, ParseErrorKind::Unsupported(head))),
            _ => self.gate_call(at, head),
        }
    }

    fn gate_call(&mut self, at: (usize, usize), name: String) -> Result<(), ParseError> {
        let kind = match GateKind::from_mnemonic(&name) {
            Some(k) => k,
            None => match self.circuit.opaques().iter().position(|o| o.name == name) {
                Some(i) => GateKind::Opaque(i),
                None => return Err(self.error_at(at, ParseErrorKind::UnknownGate(name))),
            },
        };
        let mut params = Vec::new();
        if self.eat_sym('(') && !self.eat_sym(')') {
            params.push(self.expr()?);
            while self.eat_sym(',') {
                params.push(self.expr()?);
            }
            self.expect_sym(')')?;
        }
        let args = self.arg_list()?;
        self.expect_sym(';')?;

        let resolved = args
            .iter()
            .map(|a| Ok((a.index.is_none(), self.resolve_q(a)?)))
            .collect::<Result<Vec<_>, ParseError>>()?;
        let mut width = None;
        for (whole, qs) in &resolved {
            if *whole {
                match width {
                    None => width = Some(qs.len()),
                    Some(w) if w != qs.len() => {
                        return Err(self.error_at(
                            at,
                            ParseErrorKind::Syntax("register arguments differ in size".into()),
                        ))
                    }
                    _ => {}
                }
            }
        }
        for i in 0..width.unwrap_or(1) {
            let qubits = resolved
                .iter()
                .map(|(whole, qs)| if *whole { qs[i] } else { qs[0] })
                .collect();
            self.push(at, kind, params.clone(), qubits)?;
        }
        Ok(())
    }

    fn push(
        &mut self,
        at: (usize, usize),
        kind: GateKind,
        params: Vec<f64>,
        qubits: Vec<Qubit>,
    ) -> Result<(), ParseError> {
        self.circuit
            .push_gate(kind, params, qubits, None)
            .map(|_| ())
            .map_err(|e| self.error_at(at, ParseErrorKind::InvalidGate(e.to_string())))
    }

    fn arg_list(&mut self) -> Result<Vec<Arg>, ParseError> {
        let mut args = vec![self.arg()?];
        while self.eat_sym(',') {
            args.push(self.arg()?);
        }
        Ok(args)
    }

    fn arg(&mut self) -> Result<Arg, ParseError> {
        let (line, col) = self.here();
        let name = self.ident()?;
        let index = if self.eat_sym('[') {
            let i = self.uint()?;
            self.expect_sym(']')?;
            Some(i)
        } else {
            None
        };
        Ok(Arg {
            name,
            index,
            line,
            col,
        })
    }

    fn resolve_q(&self, a: &Arg) -> Result<Vec<Qubit>, ParseError> {
        let reg = self
            .circuit
            .qregs()
            .iter()
            .find(|r| r.name == a.name)
            .ok_or_else(|| self.error_at((a.line, a.col), ParseErrorKind::UnknownRegister(a.name.clone())))?;
        self.select(a, reg.offset, reg.size)
            .map(|v| v.into_iter().map(Qubit).collect())
    }

    fn resolve_c(&self, a: &Arg) -> Result<Vec<usize>, ParseError> {
        let reg = self
            .circuit
            .cregs()
            .iter()
            .find(|r| r.name == a.name)
            .ok_or_else(|| self.error_at((a.line, a.col), ParseErrorKind::UnknownRegister(a.name.clone())))?;
        self.select(a, reg.offset, reg.size)
    }

    fn select(&self, a: &Arg, offset: usize, size: usize) -> Result<Vec<usize>, ParseError> {
        match a.index {
            Some(i) if i >= size => Err(self.error_at(
                (a.line, a.col),
                ParseErrorKind::IndexOutOfRange {
                    register: a.name.clone(),
                    index: i,
                    size,
                },
            )),
            Some(i) => Ok(vec![offset + i]),
            None => Ok((offset..offset + size).collect()),
        }
    }

    fn expr(&mut self) -> Result<f64, ParseError> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym('+') {
                v += self.term()?;
            } else if self.eat_sym('-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, ParseError> {
        let mut v = self.factor()?;
        loop {
            if self.eat_sym('*') {
                v *= self.factor()?;
            } else if self.eat_sym('/') {
                v /= self.factor()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<f64, ParseError> {
        if self.eat_sym('-') {
            return Ok(-self.factor()?);
        }
        if self.eat_sym('+') {
            return self.factor();
        }
        if self.eat_sym('(') {
            let v = self.expr()?;
            self.expect_sym(')')?;
            return Ok(v);
        }
        match self.next() {
            Tok::Num(v) => Ok(v),
            Tok::Ident(s) if s == "pi" => Ok(PI),
            other => {
                self.pos -= 1;
                Err(self.syntax(format!("expected angle expression, found {other}")))
            }
        }
    }
}

/// Parses OpenQASM 2.0 text into a [`Circuit`].
///
/// Accepted: the `OPENQASM 2.0;` header, `include "qelib1.inc";`, `qreg`,
/// `creg`, `opaque` declarations, `measure`, `barrier` and calls to
/// `h x y z s t rx ry rz cx cz cp cu1 ccx ccz` or declared opaque gates.
/// Register arguments broadcast. Angles may use literals, `pi` and the
/// four arithmetic operators.
pub fn parse_qasm(text: &str) -> Result<Circuit, Error> {
    let toks = lex(text)?;
    let parser = Parser {
        toks,
        pos: 0,
        circuit: Circuit::new("circuit"),
    };
    Ok(parser.program()?)
}
