//! Scalar kernel expressions in `z1..zm` and their conjugates `zb1..zbm`.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' '-'? number)?
//! atom    := number | number 'i' | 'i' | 'z'k | 'zb'k
//!          | 'exp' '(' expr ')' | 'log' '(' expr ')'
//!          | 'pow' '(' expr ',' '-'? number ')' | '(' expr ')'
//! ```
//!
//! `^` with an integer exponent is an integer power, otherwise a real power.
//! Literal sums such as `0.5-2i` fold into one complex literal while parsing.

mod bundle;
mod eval;
mod parser;

use std::fmt;

use num_complex::Complex64;

use crate::linalg::C64;

pub use bundle::{BundleSpec, BundleText};
pub use eval::{eval_herm_jet, eval_holo_jet, eval_point};
pub use parser::parse_kernel;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode {
    /// `z_{k+1}`, zero-based.
    Var(usize),
    /// `conj(z_{k+1})`, zero-based.
    ConjVar(usize),
    Literal(C64),
    Sum(Box<ExprNode>, Box<ExprNode>),
    Product(Box<ExprNode>, Box<ExprNode>),
    Quotient(Box<ExprNode>, Box<ExprNode>),
    IntPow(Box<ExprNode>, i64),
    RealPow(Box<ExprNode>, f64),
    Exp(Box<ExprNode>),
    Log(Box<ExprNode>),
    Neg(Box<ExprNode>),
}

use ExprNode::*;

impl ExprNode {
    pub fn lit(v: f64) -> Self {
        Literal(Complex64::new(v, 0.0))
    }

    /// Number of variables the expression needs (largest index used).
    pub fn min_dim(&self) -> usize {
        match self {
            Var(k) | ConjVar(k) => k + 1,
            Literal(_) => 0,
            Sum(a, b) | Product(a, b) | Quotient(a, b) => a.min_dim().max(b.min_dim()),
            IntPow(a, _) | RealPow(a, _) | Exp(a) | Log(a) | Neg(a) => a.min_dim(),
        }
    }

    pub fn has_conj(&self) -> bool {
        match self {
            ConjVar(_) => true,
            Var(_) | Literal(_) => false,
            Sum(a, b) | Product(a, b) | Quotient(a, b) => a.has_conj() || b.has_conj(),
            IntPow(a, _) | RealPow(a, _) | Exp(a) | Log(a) | Neg(a) => a.has_conj(),
        }
    }

    /// Swaps `z <-> zb` and conjugates literals.
    pub fn conjugate(&self) -> ExprNode {
        match self {
            Var(k) => ConjVar(*k),
            ConjVar(k) => Var(*k),
            Literal(v) => Literal(v.conj()),
            Sum(a, b) => Sum(Box::new(a.conjugate()), Box::new(b.conjugate())),
            Product(a, b) => Product(Box::new(a.conjugate()), Box::new(b.conjugate())),
            Quotient(a, b) => Quotient(Box::new(a.conjugate()), Box::new(b.conjugate())),
            IntPow(a, k) => IntPow(Box::new(a.conjugate()), *k),
            RealPow(a, p) => RealPow(Box::new(a.conjugate()), *p),
            Exp(a) => Exp(Box::new(a.conjugate())),
            Log(a) => Log(Box::new(a.conjugate())),
            Neg(a) => Neg(Box::new(a.conjugate())),
        }
    }

    /// Symbolic partial derivative in `z_{k+1}` (`conj = false`) or `zb_{k+1}`.
    pub fn derivative(&self, k: usize, conj: bool) -> ExprNode {
        let d = |e: &ExprNode| e.derivative(k, conj);
        match self {
            Var(j) => ExprNode::lit(if !conj && *j == k { 1.0 } else { 0.0 }),
            ConjVar(j) => ExprNode::lit(if conj && *j == k { 1.0 } else { 0.0 }),
            Literal(_) => ExprNode::lit(0.0),
            Sum(a, b) => sum(d(a), d(b)),
            Neg(a) => neg(d(a)),
            Product(a, b) => sum(prod(d(a), (**b).clone()), prod((**a).clone(), d(b))),
            Quotient(a, b) => {
                let num = sum(prod(d(a), (**b).clone()), neg(prod((**a).clone(), d(b))));
                quot(num, IntPow(b.clone(), 2))
            }
            IntPow(a, n) => {
                let inner = if *n == 1 { ExprNode::lit(1.0) } else { IntPow(a.clone(), n - 1) };
                prod(prod(ExprNode::lit(*n as f64), inner), d(a))
            }
            RealPow(a, p) => prod(prod(ExprNode::lit(*p), RealPow(a.clone(), p - 1.0)), d(a)),
            Exp(a) => prod(self.clone(), d(a)),
            Log(a) => quot(d(a), (**a).clone()),
        }
    }
}

fn is_zero(e: &ExprNode) -> bool {
    matches!(e, Literal(v) if *v == Complex64::new(0.0, 0.0))
}

fn is_one(e: &ExprNode) -> bool {
    matches!(e, Literal(v) if *v == Complex64::new(1.0, 0.0))
}

fn sum(a: ExprNode, b: ExprNode) -> ExprNode {
    match (is_zero(&a), is_zero(&b)) {
        (true, _) => b,
        (_, true) => a,
        _ => Sum(Box::new(a), Box::new(b)),
    }
}

fn neg(a: ExprNode) -> ExprNode {
    match a {
        Literal(v) => Literal(-v),
        other => Neg(Box::new(other)),
    }
}

fn prod(a: ExprNode, b: ExprNode) -> ExprNode {
    if is_zero(&a) || is_zero(&b) {
        ExprNode::lit(0.0)
    } else if is_one(&a) {
        b
    } else if is_one(&b) {
        a
    } else {
        Product(Box::new(a), Box::new(b))
    }
}

fn quot(a: ExprNode, b: ExprNode) -> ExprNode {
    if is_zero(&a) {
        ExprNode::lit(0.0)
    } else {
        Quotient(Box::new(a), Box::new(b))
    }
}

fn fmt_real(v: f64) -> String {
    format!("{v:?}")
}

impl fmt::Display for ExprNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var(k) => write!(f, "z{}", k + 1),
            ConjVar(k) => write!(f, "zb{}", k + 1),
            Literal(v) => {
                if v.im == 0.0 {
                    if v.re < 0.0 || v.re.is_sign_negative() {
                        write!(f, "({})", fmt_real(v.re))
                    } else {
                        write!(f, "{}", fmt_real(v.re))
                    }
                } else if v.re == 0.0 {
                    write!(f, "({}i)", fmt_real(v.im))
                } else {
                    let sign = if v.im < 0.0 { '-' } else { '+' };
                    write!(f, "({}{}{}i)", fmt_real(v.re), sign, fmt_real(v.im.abs()))
                }
            }
            Sum(a, b) => write!(f, "({a} + {b})"),
            Product(a, b) => write!(f, "({a} * {b})"),
            Quotient(a, b) => write!(f, "({a} / {b})"),
            IntPow(a, k) => {
                if *k < 0 {
                    write!(f, "({a}^-{})", k.unsigned_abs())
                } else {
                    write!(f, "({a}^{k})")
                }
            }
            RealPow(a, p) => write!(f, "pow({a}, {})", fmt_real(*p)),
            Exp(a) => write!(f, "exp({a})"),
            Log(a) => write!(f, "log({a})"),
            Neg(a) => write!(f, "(-{a})"),
        }
    }
}
