//! Textual descriptions of sequences and functions.
//!
//! Sequence syntax (whitespace-insensitive):
//! `const(c)`, `affine(a,b)`, `prefix(v1,…,vk);<tail>`, `periodic(v1,…,vk)`,
//! `dec(n)`, `cex(n)`, `sum(<s1>,<s2>)`, `shift(<s>,d)`.
//!
//! Function syntax: `f2:<expr in i,j>` and `f3:<expr in i,j,k>` where
//! expressions are built from `+`, `*`, `^`, `monus(a,b)`, `min(a,b)`,
//! `max(a,b)`, variables and decimal constants.

use crate::error::{Error, Result};
use crate::sequence::{Coloring, Expr, MultiFunction, Nat, Sequence};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src: src.as_bytes(),
            pos: 0,
        }
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

    fn found(&mut self) -> String {
        match self.peek() {
            Some(c) => format!("'{}'", c as char),
            None => "end of input".into(),
        }
    }

    fn error(&mut self, expected: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            expected: expected.into(),
            found: self.found(),
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("'{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("identifier"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii alphanumeric")
            .to_string())
    }

    fn number(&mut self) -> Result<Nat> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.error("number"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        text.parse::<Nat>()
            .map_err(|_| self.error("decimal natural"))
    }

    fn number_list(&mut self) -> Result<Vec<Nat>> {
        let mut vals = vec![self.number()?];
        while self.peek() == Some(b',') {
            self.pos += 1;
            vals.push(self.number()?);
        }
        Ok(vals)
    }

    fn sequence(&mut self) -> Result<Sequence> {
        let name = self.ident()?;
        if !matches!(
            name.as_str(),
            "const" | "affine" | "prefix" | "periodic" | "dec" | "cex" | "sum" | "shift"
        ) {
            self.pos -= name.len();
            return Err(self.error("one of const, affine, prefix, periodic, dec, cex, sum, shift"));
        }
        self.expect(b'(')?;
        let seq = match name.as_str() {
            "const" => {
                let c = self.number()?;
                self.expect(b')')?;
                Sequence::constant(c)
            }
            "affine" => {
                let a = self.number()?;
                self.expect(b',')?;
                let b = self.number()?;
                self.expect(b')')?;
                Sequence::affine(a, b)
            }
            "prefix" => {
                let vals = self.number_list()?;
                self.expect(b')')?;
                self.expect(b';')?;
                let tail = self.sequence()?;
                Sequence::prefix(vals, tail)
            }
            "periodic" => {
                let vals = self.number_list()?;
                self.expect(b')')?;
                Sequence::periodic(vals)
            }
            "dec" => {
                let n = self.number()?;
                self.expect(b')')?;
                Sequence::dec(n)
            }
            "cex" => {
                let n = self.number()?;
                if n == Nat::from(0u32) {
                    return Err(Error::InvalidArg("cex(n) requires n >= 1".into()));
                }
                self.expect(b')')?;
                Sequence::cex(n)
            }
            "sum" => {
                let a = self.sequence()?;
                self.expect(b',')?;
                let b = self.sequence()?;
                self.expect(b')')?;
                Sequence::sum(a, b)
            }
            "shift" => {
                let base = self.sequence()?;
                self.expect(b',')?;
                let d = self.number()?;
                self.expect(b')')?;
                base.shifted(d)
            }
            _ => unreachable!("constructor names are validated above"),
        };
        Ok(seq)
    }

    // expr := term ('+' term)*
    fn expr(&mut self, arity: usize) -> Result<Expr> {
        let mut e = self.term(arity)?;
        while self.peek() == Some(b'+') {
            self.pos += 1;
            e = Expr::Add(Box::new(e), Box::new(self.term(arity)?));
        }
        Ok(e)
    }

    // term := power ('*' power)*
    fn term(&mut self, arity: usize) -> Result<Expr> {
        let mut e = self.power(arity)?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            e = Expr::Mul(Box::new(e), Box::new(self.power(arity)?));
        }
        Ok(e)
    }

    // power := factor ('^' power)?
    fn power(&mut self, arity: usize) -> Result<Expr> {
        let base = self.factor(arity)?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.power(arity)?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn factor(&mut self, arity: usize) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr(arity)?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Num(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident()?;
                match name.as_str() {
                    "i" => Ok(Expr::Var(0)),
                    "j" => Ok(Expr::Var(1)),
                    "k" if arity == 3 => Ok(Expr::Var(2)),
                    "monus" | "min" | "max" => {
                        self.expect(b'(')?;
                        let a = self.expr(arity)?;
                        self.expect(b',')?;
                        let b = self.expr(arity)?;
                        self.expect(b')')?;
                        Ok(match name.as_str() {
                            "monus" => Expr::Monus(Box::new(a), Box::new(b)),
                            "min" => Expr::Min(Box::new(a), Box::new(b)),
                            _ => Expr::Max(Box::new(a), Box::new(b)),
                        })
                    }
                    _ => {
                        self.pos -= name.len();
                        Err(self.error(if arity == 3 {
                            "variable i, j, k or monus, min, max"
                        } else {
                            "variable i, j or monus, min, max"
                        }))
                    }
                }
            }
            _ => Err(self.error("number, variable or '('")),
        }
    }

    fn end(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return Err(self.error("end of input"));
        }
        Ok(())
    }
}

/// Parse a sequence description.
pub fn parse_sequence(text: &str) -> Result<Sequence> {
    let mut p = Parser::new(text);
    let s = p.sequence()?;
    p.end()?;
    Ok(s)
}

/// Parse a coloring: a sequence description whose values must stay in {0,1}
/// (checked at evaluation time).
pub fn parse_coloring(text: &str) -> Result<Coloring> {
    Ok(Coloring::new(parse_sequence(text)?))
}

/// Parse a function of two or three arguments, `f2:<expr>` or `f3:<expr>`.
pub fn parse_multifunction(text: &str) -> Result<MultiFunction> {
    let mut p = Parser::new(text);
    let tag = p.ident()?;
    let arity = match tag.as_str() {
        "f2" => 2,
        "f3" => 3,
        _ => {
            p.pos -= tag.len();
            return Err(p.error("'f2' or 'f3'"));
        }
    };
    p.expect(b':')?;
    let e = p.expr(arity)?;
    p.end()?;
    Ok(MultiFunction::from_expr(arity, e))
}
