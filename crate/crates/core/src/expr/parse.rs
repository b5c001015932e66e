//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' integer)?
//! base   := number | name | '(' expr ')' | func '(' expr ')'
//! func   := exp | sin | cos | neg
//! ```
//!
//! There is no unary minus; write `neg(e)`. The exponent may carry a sign.

use super::{Expr, ExprError};

const FUNCS: [&str; 4] = ["exp", "sin", "cos", "neg"];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Name(String),
    Int(i32),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn digits(&mut self) -> usize {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.pos - start
    }

    fn peek_byte(&self, k: usize) -> Option<u8> {
        self.src.get(self.pos + k).copied()
    }

    fn text(&self, from: usize) -> &str {
        std::str::from_utf8(&self.src[from..self.pos]).unwrap_or("")
    }

    fn err(&self, pos: usize, message: impl Into<String>) -> ExprError {
        ExprError::Syntax {
            pos,
            message: message.into(),
        }
    }

    fn number(&mut self) -> Result<Tok, ExprError> {
        let start = self.pos;
        let whole = self.digits();
        let mut frac = 0;
        if self.peek_byte(0) == Some(b'.') {
            self.pos += 1;
            frac = self.digits();
        }
        if whole == 0 && frac == 0 {
            return Err(self.err(start, "malformed number"));
        }
        if matches!(self.peek_byte(0), Some(b'e' | b'E')) {
            let signed = matches!(self.peek_byte(1), Some(b'+' | b'-'));
            let first = self.peek_byte(if signed { 2 } else { 1 });
            if first.is_some_and(|b| b.is_ascii_digit()) {
                self.pos += if signed { 2 } else { 1 };
                self.digits();
            }
        }
        self.text(start)
            .parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| self.err(start, "malformed number"))
    }

    /// Integer exponent following `^`.
    fn integer(&mut self) -> Result<(Tok, usize), ExprError> {
        self.skip_ws();
        let start = self.pos;
        if self.peek_byte(0) == Some(b'-') {
            self.pos += 1;
        }
        if self.digits() == 0 {
            return Err(self.err(start, "expected an integer exponent"));
        }
        self.text(start)
            .parse::<i32>()
            .map(|n| (Tok::Int(n), start))
            .map_err(|_| self.err(start, "exponent out of range"))
    }

    fn next(&mut self) -> Result<(Tok, usize), ExprError> {
        self.skip_ws();
        let start = self.pos;
        let Some(b) = self.peek_byte(0) else {
            return Ok((Tok::End, start));
        };
        let tok = match b {
            b'0'..=b'9' | b'.' => self.number()?,
            b'A'..=b'Z' | b'a'..=b'z' => {
                while self
                    .peek_byte(0)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_')
                {
                    self.pos += 1;
                }
                Tok::Name(self.text(start).to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                self.pos += 1;
                Tok::Op(b as char)
            }
            _ => {
                let ch = std::str::from_utf8(&self.src[start..])
                    .ok()
                    .and_then(|s| s.chars().next())
                    .unwrap_or('?');
                return Err(self.err(start, format!("unexpected character `{ch}`")));
            }
        };
        Ok((tok, start))
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
    symbols: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn advance(&mut self) -> Result<(), ExprError> {
        let (t, at) = self.lex.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    fn expect(&mut self, op: char) -> Result<(), ExprError> {
        if self.tok == Tok::Op(op) {
            self.advance()
        } else {
            Err(self.lex.err(self.at, format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Tok::Op(op @ ('+' | '-')) = self.tok {
            self.advance()?;
            let rhs = self.term()?;
            lhs = if op == '+' { lhs.add(&rhs) } else { lhs.sub(&rhs) };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.factor()?;
        while let Tok::Op(op @ ('*' | '/')) = self.tok {
            self.advance()?;
            let rhs = self.factor()?;
            lhs = if op == '*' { lhs.mul(&rhs) } else { lhs.div(&rhs) };
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprError> {
        let base = self.base()?;
        if self.tok == Tok::Op('^') {
            let (tok, _) = self.lex.integer()?;
            let Tok::Int(n) = tok else { unreachable!() };
            self.advance()?;
            return Ok(base.powi(n));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ExprError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Expr::constant(v))
            }
            Tok::Op('(') => {
                self.advance()?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Name(name) => {
                let at = self.at;
                self.advance()?;
                if FUNCS.contains(&name.as_str()) {
                    if self.tok != Tok::Op('(') {
                        return Err(self.lex.err(at, format!("`{name}` needs an argument")));
                    }
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(match name.as_str() {
                        "exp" => arg.exp(),
                        "sin" => arg.sin(),
                        "cos" => arg.cos(),
                        _ => arg.neg(),
                    });
                }
                match self.symbols.iter().position(|s| *s == name) {
                    Some(index) => Ok(Expr::var(index, &name)),
                    None => Err(ExprError::Undeclared { name, pos: at }),
                }
            }
            Tok::End => Err(self.lex.err(self.at, "unexpected end of input")),
            Tok::Op(c) => Err(self.lex.err(self.at, format!("unexpected `{c}`"))),
            Tok::Int(_) => unreachable!(),
        }
    }
}

/// Parse `text`; a name resolves to the variable whose slot is its position
/// in `symbols`.
pub fn parse(text: &str, symbols: &[&str]) -> Result<Expr, ExprError> {
    let mut p = Parser {
        lex: Lexer {
            src: text.as_bytes(),
            pos: 0,
        },
        tok: Tok::End,
        at: 0,
        symbols,
    };
    p.advance()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.lex.err(p.at, "trailing input"));
    }
    Ok(e)
}
