//! Potentials written as text, e.g. `x`, `0`, `exp(-x)*sin(2*x)^2`.
//!
//! The grammar is ordinary infix arithmetic over the single variable `x`:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'x' | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | log | sqrt | abs
//! ```
//!
//! Unary minus binds looser than `^`, so `-x^2` is `-(x^2)`.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown identifier '{name}' at position {pos}")]
    UnknownIdentifier { pos: usize, name: String },

    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(e) => -e.eval(x)?,
            Expr::Binary(op, l, r) => {
                let l = l.eval(x)?;
                let r = r.eval(x)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == 0.0 {
                            return Err(ExprError::Domain(format!("division by zero at x = {x}")));
                        }
                        l / r
                    }
                    BinOp::Pow => {
                        let v = l.powf(r);
                        if !v.is_finite() && l.is_finite() && r.is_finite() {
                            return Err(ExprError::Domain(format!(
                                "{l}^{r} is not a finite real number (x = {x})"
                            )));
                        }
                        v
                    }
                }
            }
            Expr::Call(f, arg) => {
                let v = arg.eval(x)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Abs => v.abs(),
                    Func::Log => {
                        if v <= 0.0 {
                            return Err(ExprError::Domain(format!("log({v}) at x = {x}")));
                        }
                        v.ln()
                    }
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(ExprError::Domain(format!("sqrt({v}) at x = {x}")));
                        }
                        v.sqrt()
                    }
                }
            }
        })
    }
}

/// Fully parenthesized form; parsing it back yields the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::X => f.write_str("x"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// A parsed potential q(x). Immutable, cheap to clone, and `Sync`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialExpr {
    source: String,
    ast: Expr,
}

impl PotentialExpr {
    pub fn parse(source: &str) -> Result<Self, ExprError> {
        parse_potential(source)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn eval(&self, x: f64) -> Result<f64, ExprError> {
        eval_potential(self, x)
    }

    /// True when the tree is the literal constant zero.
    pub fn is_zero(&self) -> bool {
        matches!(self.ast, Expr::Num(v) if v == 0.0)
    }
}

pub fn parse_potential(source: &str) -> Result<PotentialExpr, ExprError> {
    let tokens = tokenize(source)?;
    if tokens.len() == 1 {
        return Err(ExprError::Syntax {
            pos: tokens[0].pos,
            message: "empty expression".into(),
        });
    }
    let mut parser = Parser { tokens, at: 0 };
    let ast = parser.expr()?;
    let tok = parser.peek();
    if tok.kind != Tok::End {
        return Err(ExprError::Syntax {
            pos: tok.pos,
            message: format!("unexpected {}", tok.kind.describe()),
        });
    }
    Ok(PotentialExpr {
        source: source.to_string(),
        ast,
    })
}

pub fn eval_potential(p: &PotentialExpr, x: f64) -> Result<f64, ExprError> {
    if !x.is_finite() {
        return Err(ExprError::Domain(format!("non-finite abscissa {x}")));
    }
    p.ast.eval(x)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Op(c) => format!("'{c}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    pos: usize,
}

fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                out.push(Token {
                    kind: Tok::Op(c as char),
                    pos: start,
                });
                i += 1;
            }
            b'(' => {
                out.push(Token {
                    kind: Tok::LParen,
                    pos: start,
                });
                i += 1;
            }
            b')' => {
                out.push(Token {
                    kind: Tok::RParen,
                    pos: start,
                });
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| ExprError::Syntax {
                    pos: start,
                    message: format!("malformed number '{text}'"),
                })?;
                if !value.is_finite() {
                    return Err(ExprError::Syntax {
                        pos: start,
                        message: format!("number '{text}' is out of range"),
                    });
                }
                out.push(Token {
                    kind: Tok::Num(value),
                    pos: start,
                });
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push(Token {
                    kind: Tok::Ident(src[start..i].to_string()),
                    pos: start,
                });
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    pos: start,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        }
    }
    out.push(Token {
        kind: Tok::End,
        pos: src.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.at]
    }

    fn bump(&mut self) -> Token {
        let tok = self.tokens[self.at].clone();
        if tok.kind != Tok::End {
            self.at += 1;
        }
        tok
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek().kind {
            Tok::Op(c) if ops.contains(&c) => {
                self.at += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.eat_op(&['^']).is_some() {
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let tok = self.bump();
        match tok.kind {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                if name == "x" {
                    return Ok(Expr::X);
                }
                let Some(func) = Func::from_name(&name) else {
                    return Err(ExprError::UnknownIdentifier { pos: tok.pos, name });
                };
                let next = self.bump();
                if next.kind != Tok::LParen {
                    return Err(ExprError::Syntax {
                        pos: next.pos,
                        message: format!("expected '(' after '{name}'"),
                    });
                }
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            other => Err(ExprError::Syntax {
                pos: tok.pos,
                message: format!("expected a value, found {}", other.describe()),
            }),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        let tok = self.bump();
        if tok.kind != Tok::RParen {
            return Err(ExprError::Syntax {
                pos: tok.pos,
                message: format!("expected ')', found {}", tok.kind.describe()),
            });
        }
        Ok(())
    }
}
