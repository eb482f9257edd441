use num_complex::Complex64;

use super::ExprNode::{self, *};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Var(usize),
    ConjVar(usize),
    Func(&'static str),
    Op(char),
    End,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::Syntax { pos, msg: msg.into() }
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    /// Returns the token and its starting offset.
    fn next(&mut self) -> Result<(Tok, usize)> {
        self.skip_ws();
        let start = self.pos;
        let Some(&c) = self.src.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() || c == b'.' {
            return self.number(start);
        }
        if c.is_ascii_alphabetic() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                self.pos += 1;
            }
            let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            return Ok((ident(word, start)?, start));
        }
        if b"+-*/^(),".contains(&c) {
            self.pos += 1;
            return Ok((Tok::Op(c as char), start));
        }
        Err(syntax(start, format!("unexpected character '{}'", c as char)))
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize)> {
        let s = self.src;
        let mut p = self.pos;
        while p < s.len() && s[p].is_ascii_digit() {
            p += 1;
        }
        if p < s.len() && s[p] == b'.' {
            p += 1;
            while p < s.len() && s[p].is_ascii_digit() {
                p += 1;
            }
        }
        if p < s.len() && (s[p] == b'e' || s[p] == b'E') {
            let mut q = p + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if q < s.len() && s[q].is_ascii_digit() {
                while q < s.len() && s[q].is_ascii_digit() {
                    q += 1;
                }
                p = q;
            }
        }
        let text = std::str::from_utf8(&s[start..p]).expect("ascii");
        let v: f64 = text.parse().map_err(|_| syntax(start, format!("malformed number '{text}'")))?;
        self.pos = p;
        if p < s.len() && s[p] == b'i' && !s.get(p + 1).is_some_and(|c| c.is_ascii_alphanumeric()) {
            self.pos += 1;
            return Ok((Tok::Imag(v), start));
        }
        Ok((Tok::Num(v), start))
    }
}

fn ident(word: &str, pos: usize) -> Result<Tok> {
    let index = |digits: &str| -> Result<usize> {
        match digits.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(syntax(pos, format!("bad variable name '{word}' (variables are z1.., zb1..)"))),
        }
    };
    match word {
        "i" => Ok(Tok::Imag(1.0)),
        "exp" => Ok(Tok::Func("exp")),
        "log" => Ok(Tok::Func("log")),
        "pow" => Ok(Tok::Func("pow")),
        w if w.starts_with("zb") => Ok(Tok::ConjVar(index(&w[2..])?)),
        w if w.starts_with('z') => Ok(Tok::Var(index(&w[1..])?)),
        _ => Err(syntax(pos, format!("unknown identifier '{word}'"))),
    }
}

struct Parser<'a> {
    lex: Lexer<'a>,
    tok: Tok,
    at: usize,
}

fn fold_sum(a: ExprNode, b: ExprNode) -> ExprNode {
    match (a, b) {
        (Literal(x), Literal(y)) => Literal(x + y),
        (a, b) => Sum(Box::new(a), Box::new(b)),
    }
}

fn fold_neg(a: ExprNode) -> ExprNode {
    match a {
        Literal(x) => Literal(-x),
        a => Neg(Box::new(a)),
    }
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<()> {
        let (t, at) = self.lex.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.tok == Tok::Op(c) {
            self.bump()
        } else {
            Err(syntax(self.at, format!("expected '{c}'")))
        }
    }

    fn expr(&mut self) -> Result<ExprNode> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Tok::Op('+') => {
                    self.bump()?;
                    lhs = fold_sum(lhs, self.term()?);
                }
                Tok::Op('-') => {
                    self.bump()?;
                    lhs = fold_sum(lhs, fold_neg(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprNode> {
        let mut lhs = self.unary()?;
        loop {
            match self.tok {
                Tok::Op('*') => {
                    self.bump()?;
                    lhs = Product(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Op('/') => {
                    self.bump()?;
                    lhs = Quotient(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ExprNode> {
        if self.tok == Tok::Op('-') {
            self.bump()?;
            return Ok(fold_neg(self.unary()?));
        }
        self.power()
    }

    fn signed_real(&mut self, what: &str) -> Result<f64> {
        if self.tok == Tok::Op('(') {
            self.bump()?;
            let v = self.signed_real(what)?;
            self.expect(')')?;
            return Ok(v);
        }
        let neg = if self.tok == Tok::Op('-') {
            self.bump()?;
            true
        } else {
            false
        };
        match self.tok {
            Tok::Num(v) => {
                self.bump()?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(Error::Type(format!(
                "{what} must be a real number literal (position {})",
                self.at
            ))),
        }
    }

    fn power(&mut self) -> Result<ExprNode> {
        let base = self.atom()?;
        if self.tok != Tok::Op('^') {
            return Ok(base);
        }
        self.bump()?;
        let p = self.signed_real("exponent after '^'")?;
        Ok(make_pow(base, p))
    }

    fn atom(&mut self) -> Result<ExprNode> {
        let at = self.at;
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Literal(Complex64::new(v, 0.0)))
            }
            Tok::Imag(v) => {
                self.bump()?;
                Ok(Literal(Complex64::new(0.0, v)))
            }
            Tok::Var(k) => {
                self.bump()?;
                Ok(Var(k))
            }
            Tok::ConjVar(k) => {
                self.bump()?;
                Ok(ConjVar(k))
            }
            Tok::Op('(') => {
                self.bump()?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Func(name) => {
                self.bump()?;
                self.expect('(')?;
                let arg = self.expr()?;
                let node = match name {
                    "pow" => {
                        if self.tok != Tok::Op(',') {
                            return Err(Error::Type(format!("pow at position {at} takes two arguments")));
                        }
                        self.bump()?;
                        let p = self.signed_real("second argument of pow")?;
                        RealPow(Box::new(arg), p)
                    }
                    "exp" => Exp(Box::new(arg)),
                    _ => Log(Box::new(arg)),
                };
                if self.tok == Tok::Op(',') {
                    return Err(Error::Type(format!("{name} at position {at} takes one argument")));
                }
                self.expect(')')?;
                Ok(node)
            }
            Tok::End => Err(syntax(at, "unexpected end of input")),
            Tok::Op(c) => Err(syntax(at, format!("unexpected '{c}'"))),
        }
    }
}

fn make_pow(base: ExprNode, p: f64) -> ExprNode {
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        IntPow(Box::new(base), p as i64)
    } else {
        RealPow(Box::new(base), p)
    }
}

/// Parses one scalar expression. Error positions are byte offsets into `text`.
pub fn parse_kernel(text: &str) -> Result<ExprNode> {
    let mut p = Parser { lex: Lexer { src: text.as_bytes(), pos: 0 }, tok: Tok::End, at: 0 };
    p.bump()?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(syntax(p.at, "trailing input"));
    }
    Ok(e)
}
