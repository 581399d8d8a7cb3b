//! Expression language for user-supplied field components.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' INT)*          right-associative, INT a literal
//! primary := NUMBER | VAR | FUNC '(' expr ')' | 'norm' '(' ')' | '(' expr ')'
//! ```
//!
//! Variables are `y1..yq`; chart coefficients additionally see `x1..xd` and
//! the trigonometric functions, whose arguments may not depend on `y`.

use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    X,
    Y,
}

/// Variable reference, 0-based index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var {
    pub kind: VarKind,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Abs,
    Sin,
    Cos,
    Tan,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
        }
    }

    fn is_trig(self) -> bool {
        matches!(self, Func::Sin | Func::Cos | Func::Tan)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    /// Euclidean norm of the full y-vector.
    Norm,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("variable `{name}` at byte {offset} is out of range (dimension {dim})")]
    VariableOutOfRange { offset: usize, name: String, dim: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: &'static str },
    #[error("variable `{0}` has no value")]
    MissingVariable(String),
}

/// Which identifiers a parse accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Grammar {
    pub y_vars: usize,
    pub x_vars: usize,
    pub chart_functions: bool,
}

impl Grammar {
    /// Components of a spray vector field on a q-dimensional m.
    pub fn spray(q: usize) -> Self {
        Self {
            y_vars: q,
            x_vars: 0,
            chart_functions: false,
        }
    }

    /// Coefficients `G^i(x, y)` of a chart spray of dimension d.
    pub fn chart(d: usize) -> Self {
        Self {
            y_vars: d,
            x_vars: d,
            chart_functions: true,
        }
    }
}

/// Parses `src` with the spray grammar over `y1..yq`.
pub fn parse(src: &str, q: usize) -> Result<Expr, ParseError> {
    parse_with(src, Grammar::spray(q))
}

pub fn parse_with(src: &str, grammar: Grammar) -> Result<Expr, ParseError> {
    let tokens = lex(src)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        grammar,
        end: src.len(),
    };
    if p.tokens.is_empty() {
        return Err(ParseError::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let e = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(ParseError::Syntax {
            offset: t.offset,
            message: format!("unexpected {}", t.kind.describe()),
        });
    }
    Ok(e)
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num { value: f64, integer: Option<u32> },
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Num { value, .. } => format!("number {value}"),
            TokKind::Ident(s) => format!("identifier `{s}`"),
            TokKind::Plus => "`+`".into(),
            TokKind::Minus => "`-`".into(),
            TokKind::Star => "`*`".into(),
            TokKind::Slash => "`/`".into(),
            TokKind::Caret => "`^`".into(),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Token {
    kind: TokKind,
    offset: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b'+' => Some(TokKind::Plus),
            b'-' => Some(TokKind::Minus),
            b'*' => Some(TokKind::Star),
            b'/' => Some(TokKind::Slash),
            b'^' => Some(TokKind::Caret),
            b'(' => Some(TokKind::LParen),
            b')' => Some(TokKind::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token { kind, offset: start });
            i += 1;
            continue;
        }
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let mut is_int = true;
            if i < bytes.len() && bytes[i] == b'.' {
                is_int = false;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    is_int = false;
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &src[start..i];
            let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{text}`"),
            })?;
            let integer = if is_int { text.parse::<u32>().ok() } else { None };
            out.push(Token {
                kind: TokKind::Num { value, integer },
                offset: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                kind: TokKind::Ident(src[start..i].to_string()),
                offset: start,
            });
            continue;
        }
        let ch = src[start..].chars().next().unwrap_or('?');
        return Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character `{ch}`"),
        });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    grammar: Grammar,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, kind: &TokKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokKind) -> Result<(), ParseError> {
        match self.next() {
            Some(t) if t.kind == kind => Ok(()),
            Some(t) => Err(ParseError::Syntax {
                offset: t.offset,
                message: format!("expected {}, found {}", kind.describe(), t.kind.describe()),
            }),
            None => Err(ParseError::Syntax {
                offset: self.end,
                message: format!("expected {}, found end of input", kind.describe()),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(&TokKind::Plus) {
                BinOp::Add
            } else if self.eat(&TokKind::Minus) {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(&TokKind::Star) {
                BinOp::Mul
            } else if self.eat(&TokKind::Slash) {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&TokKind::Minus) {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if !self.eat(&TokKind::Caret) {
            return Ok(base);
        }
        let exp = self.exponent()?;
        Ok(Expr::Pow(Box::new(base), exp))
    }

    /// `INT ('^' INT)*`, folded right-to-left.
    fn exponent(&mut self) -> Result<u32, ParseError> {
        let (offset, n) = match self.next() {
            Some(Token {
                kind: TokKind::Num { integer: Some(n), .. },
                offset,
            }) => (offset, n),
            Some(t) => {
                return Err(ParseError::Syntax {
                    offset: t.offset,
                    message: "exponent must be a nonnegative integer literal".into(),
                })
            }
            None => {
                return Err(ParseError::Syntax {
                    offset: self.end,
                    message: "missing exponent".into(),
                })
            }
        };
        if !self.eat(&TokKind::Caret) {
            return Ok(n);
        }
        let rest = self.exponent()?;
        n.checked_pow(rest).ok_or(ParseError::Syntax {
            offset,
            message: "exponent overflow".into(),
        })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let Some(tok) = self.next() else {
            return Err(ParseError::Syntax {
                offset: self.end,
                message: "unexpected end of input".into(),
            });
        };
        match tok.kind {
            TokKind::Num { value, .. } => Ok(Expr::Num(value)),
            TokKind::LParen => {
                let e = self.expr()?;
                self.expect(TokKind::RParen)?;
                Ok(e)
            }
            TokKind::Ident(name) => self.identifier(name, tok.offset),
            other => Err(ParseError::Syntax {
                offset: tok.offset,
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }

    fn identifier(&mut self, name: String, offset: usize) -> Result<Expr, ParseError> {
        let func = match name.as_str() {
            "norm" => {
                self.expect(TokKind::LParen)?;
                self.expect(TokKind::RParen)?;
                return Ok(Expr::Norm);
            }
            "sqrt" => Some(Func::Sqrt),
            "abs" => Some(Func::Abs),
            "sin" if self.grammar.chart_functions => Some(Func::Sin),
            "cos" if self.grammar.chart_functions => Some(Func::Cos),
            "tan" if self.grammar.chart_functions => Some(Func::Tan),
            _ => None,
        };
        if let Some(f) = func {
            self.expect(TokKind::LParen)?;
            let arg = self.expr()?;
            self.expect(TokKind::RParen)?;
            if f.is_trig() && arg.depends_on(VarKind::Y) {
                return Err(ParseError::Syntax {
                    offset,
                    message: format!("argument of {}() may not depend on y", f.name()),
                });
            }
            return Ok(Expr::Call(f, Box::new(arg)));
        }
        let (kind, dim) = match name.as_bytes()[0] {
            b'y' => (VarKind::Y, self.grammar.y_vars),
            b'x' if self.grammar.x_vars > 0 => (VarKind::X, self.grammar.x_vars),
            _ => return Err(ParseError::UnknownIdentifier { offset, name }),
        };
        let digits = &name[1..];
        if digits.is_empty()
            || !digits.bytes().all(|b| b.is_ascii_digit())
            || (digits.len() > 1 && digits.starts_with('0'))
        {
            return Err(ParseError::UnknownIdentifier { offset, name });
        }
        match digits.parse::<usize>() {
            Ok(k) if k >= 1 && k <= dim => Ok(Expr::Var(Var { kind, index: k - 1 })),
            _ => Err(ParseError::VariableOutOfRange { offset, name, dim }),
        }
    }
}

impl Expr {
    /// Whether any variable of the given kind (or `norm()`, for y) occurs.
    pub fn depends_on(&self, kind: VarKind) -> bool {
        match self {
            Expr::Num(_) => false,
            Expr::Var(v) => v.kind == kind,
            Expr::Norm => kind == VarKind::Y,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.depends_on(kind),
            Expr::Bin(_, a, b) => a.depends_on(kind) || b.depends_on(kind),
        }
    }

    /// Evaluates with `y` bound; x-variables are unavailable.
    pub fn eval<T: Scalar>(&self, y: &[T]) -> Result<T, EvalError> {
        self.eval_with(&[], y)
    }

    /// Evaluates with both `x` and `y` bound.
    pub fn eval_with<T: Scalar>(&self, x: &[T], y: &[T]) -> Result<T, EvalError> {
        match self {
            Expr::Num(v) => Ok(T::of(*v)),
            Expr::Var(v) => {
                let src = match v.kind {
                    VarKind::X => x,
                    VarKind::Y => y,
                };
                src.get(v.index)
                    .copied()
                    .ok_or_else(|| EvalError::MissingVariable(self.to_string()))
            }
            Expr::Norm => Ok(y.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()),
            Expr::Neg(a) => Ok(-a.eval_with(x, y)?),
            Expr::Bin(op, a, b) => {
                let (l, r) = (a.eval_with(x, y)?, b.eval_with(x, y)?);
                Ok(match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r == T::zero() {
                            return Err(EvalError::Domain {
                                subexpr: self.to_string(),
                                reason: "division by zero",
                            });
                        }
                        l / r
                    }
                })
            }
            Expr::Pow(a, n) => {
                let b = a.eval_with(x, y)?;
                let mut acc = T::one();
                for _ in 0..*n {
                    acc *= b;
                }
                Ok(acc)
            }
            Expr::Call(f, a) => {
                let v = a.eval_with(x, y)?;
                match f {
                    Func::Sqrt if v < T::zero() => Err(EvalError::Domain {
                        subexpr: self.to_string(),
                        reason: "square root of a negative number",
                    }),
                    Func::Sqrt => Ok(v.sqrt()),
                    Func::Abs => Ok(v.abs()),
                    Func::Sin => Ok(v.sin()),
                    Func::Cos => Ok(v.cos()),
                    Func::Tan => Ok(v.tan()),
                }
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
            Expr::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Num(_) | Expr::Var(_) | Expr::Norm | Expr::Call(..) => 5,
        }
    }
}

fn paren(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

/// Canonical text with minimal parentheses; reparses to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(v) => match v.kind {
                VarKind::X => write!(f, "x{}", v.index + 1),
                VarKind::Y => write!(f, "y{}", v.index + 1),
            },
            Expr::Norm => f.write_str("norm()"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                paren(f, a, a.precedence() < 3)
            }
            Expr::Bin(op, a, b) => {
                let p = self.precedence();
                paren(f, a, a.precedence() < p)?;
                f.write_str(match op {
                    BinOp::Add => " + ",
                    BinOp::Sub => " - ",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                })?;
                paren(f, b, b.precedence() <= p)
            }
            Expr::Pow(a, n) => {
                paren(f, a, a.precedence() < 5)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn y(i: usize) -> Expr {
        Expr::Var(Var {
            kind: VarKind::Y,
            index: i - 1,
        })
    }

    fn bx(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn parses_norm_times_variable() {
        assert_eq!(
            parse("norm()*y1", 2).unwrap(),
            Expr::Bin(BinOp::Mul, bx(Expr::Norm), bx(y(1)))
        );
    }

    #[test]
    fn multiplication_binds_before_subtraction() {
        let e = parse("y1^2 - 2*y1*y2", 2).unwrap();
        let expect = Expr::Bin(
            BinOp::Sub,
            bx(Expr::Pow(bx(y(1)), 2)),
            bx(Expr::Bin(
                BinOp::Mul,
                bx(Expr::Bin(BinOp::Mul, bx(Expr::Num(2.0)), bx(y(1)))),
                bx(y(2)),
            )),
        );
        assert_eq!(e, expect);
        assert_eq!(e.eval(&[1.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn power_binds_tighter_than_unary_minus() {
        assert_eq!(parse("-y1^2", 1).unwrap(), Expr::Neg(bx(Expr::Pow(bx(y(1)), 2))));
        assert_eq!(parse("-y1^2", 1).unwrap().eval(&[3.0]).unwrap(), -9.0);
        // Right-associative chain of literal exponents.
        assert_eq!(parse("y1^2^3", 1).unwrap(), Expr::Pow(bx(y(1)), 8));
        // Left associativity of - and /.
        assert_eq!(parse("8 - 2 - 1", 0).unwrap().eval::<f64>(&[]).unwrap(), 5.0);
        assert_eq!(parse("8/2/2", 0).unwrap().eval::<f64>(&[]).unwrap(), 2.0);
    }

    #[test]
    fn error_classes() {
        assert!(matches!(
            parse("y3", 2),
            Err(ParseError::VariableOutOfRange { offset: 0, dim: 2, .. })
        ));
        assert!(matches!(parse("y0", 2), Err(ParseError::VariableOutOfRange { .. })));
        assert!(matches!(parse("foo(y1)", 2), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse("sin(y1)", 2), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse("x1", 2), Err(ParseError::UnknownIdentifier { .. })));
        assert!(matches!(parse("y1 +", 2), Err(ParseError::Syntax { offset: 4, .. })));
        assert!(matches!(
            parse("y1 ^ 2.5", 2),
            Err(ParseError::Syntax { offset: 5, .. })
        ));
        assert!(matches!(parse("y1^-1", 2), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("(y1", 2), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("y1 $ y2", 2), Err(ParseError::Syntax { offset: 3, .. })));
        assert!(matches!(parse("   ", 2), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse("y1 y2", 2), Err(ParseError::Syntax { offset: 3, .. })));
    }

    #[test]
    fn evaluation() {
        assert_eq!(parse("norm()*y1", 2).unwrap().eval(&[3.0, 4.0]).unwrap(), 15.0);
        assert_eq!(parse("sqrt(abs(-16))", 0).unwrap().eval::<f64>(&[]).unwrap(), 4.0);
        assert_eq!(parse("1.5e1 + .5", 0).unwrap().eval::<f64>(&[]).unwrap(), 15.5);
    }

    #[test]
    fn domain_errors_carry_the_subexpression() {
        let err = parse("1/y1", 2).unwrap().eval(&[0.0, 1.0]).unwrap_err();
        assert_eq!(
            err,
            EvalError::Domain {
                subexpr: "1/y1".into(),
                reason: "division by zero"
            }
        );
        let err = parse("y2 + sqrt(y1 - 1)", 2).unwrap().eval(&[0.0, 1.0]).unwrap_err();
        assert!(matches!(err, EvalError::Domain { ref subexpr, .. } if subexpr == "sqrt(y1 - 1)"));
    }

    #[test]
    fn chart_grammar() {
        let g = Grammar::chart(2);
        let e = parse_with("-0.5*sin(x1)*cos(x1)*y2^2", g).unwrap();
        let v = e.eval_with(&[std::f64::consts::FRAC_PI_4, 0.0], &[0.0, 2.0]).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
        assert!(matches!(parse_with("sin(y1)", g), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            parse_with("x3", g),
            Err(ParseError::VariableOutOfRange { .. })
        ));
    }

    #[test]
    fn printing_is_canonical() {
        for (src, printed) in [
            ("y1 - (y2 - y1)", "y1 - (y2 - y1)"),
            ("(y1 - y2) - y1", "y1 - y2 - y1"),
            ("-(y1 + y2)", "-(y1 + y2)"),
            ("(-y1)^2", "(-y1)^2"),
            ("y1*-y2", "y1*-y2"),
            ("((y1))", "y1"),
            ("(y1^2)^3", "(y1^2)^3"),
            ("2 * norm ( )", "2*norm()"),
        ] {
            let e = parse(src, 2).unwrap();
            assert_eq!(e.to_string(), printed);
            assert_eq!(parse(&e.to_string(), 2).unwrap(), e);
        }
    }
}
