//! A small expression language for user-defined scalar functions of the
//! principal variables `(x1, x2, x3)` plus the synthetic sum `s = x1+x2+x3`.
//!
//! Grammar (Pratt-parsed, standard precedence `^` > unary `-` > `* /` >
//! `+ -`, `^` right-associative):
//!
//! ```text
//! expr    := term | expr (+|-) term
//! term    := factor | term (*|/) factor
//! factor  := base | base ^ factor | - factor
//! base    := number | x1 | x2 | x3 | s | parameter
//!          | exp(e) | log(e) | sqrt(e) | abs(e) | sum(e) | ( e )
//! ```
//!
//! `sum(body)` is expanded at parse time: each occurrence of the placeholder
//! `xi` inside `body` is substituted by `x1`, `x2`, `x3` in turn and the
//! three copies are added, so `sum(xi^2)` means `x1^2 + x2^2 + x3^2`.
//!
//! How the variables are interpreted (log-stretches, Green-Lagrange
//! eigenvalues, invariants) is declared by the material file that embeds the
//! expression, not by the parser.

use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("lex error at position {pos}: {msg}")]
    Lex { pos: usize, msg: String },
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("evaluation error: {msg}")]
    Eval { msg: String },
}

impl ExprError {
    fn eval(msg: impl Into<String>) -> Self {
        ExprError::Eval { msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
}

/// A token with its byte position in the source, for error reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub pos: usize,
}

/// Splits source text into tokens; rejects unknown characters.
pub fn tokenize(src: &str) -> Result<Vec<Token>, ExprError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let pos = i;
        let kind = match c {
            '+' => {
                i += 1;
                TokenKind::Plus
            }
            '-' => {
                i += 1;
                TokenKind::Minus
            }
            '*' => {
                i += 1;
                TokenKind::Star
            }
            '/' => {
                i += 1;
                TokenKind::Slash
            }
            '^' => {
                i += 1;
                TokenKind::Caret
            }
            '(' => {
                i += 1;
                TokenKind::LParen
            }
            ')' => {
                i += 1;
                TokenKind::RParen
            }
            ',' => {
                i += 1;
                TokenKind::Comma
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                }
                // Exponent only if 'e'/'E' is followed by digits (with an
                // optional sign); otherwise the 'e' starts an identifier.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value = text.parse::<f64>().map_err(|_| ExprError::Lex {
                    pos: start,
                    msg: format!("malformed number `{text}`"),
                })?;
                TokenKind::Number(value)
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                TokenKind::Ident(src[start..i].to_string())
            }
            other => {
                return Err(ExprError::Lex {
                    pos,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        tokens.push(Token { kind, pos });
    }
    Ok(tokens)
}

/// The fixed principal variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variable {
    X1,
    X2,
    X3,
    /// Synthetic sum `s = x1 + x2 + x3`.
    S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
    Sqrt,
    Abs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Parsed expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Variable),
    Param(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    /// `base^n` for integer `n <= 4`, specialized at parse time so small
    /// powers evaluate by repeated multiplication instead of `powf`.
    PowInt(Box<Expr>, u32),
}

struct Parser<'a> {
    tokens: &'a [Token],
    cursor: usize,
    src_len: usize,
    // Depth of enclosing sum(...) bodies; the placeholder `xi` is legal
    // only at depth > 0 and binds to the innermost sum.
    sum_depth: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.cursor).cloned();
        if t.is_some() {
            self.cursor += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> ExprError {
        let pos = self.peek().map(|t| t.pos).unwrap_or(self.src_len);
        ExprError::Parse {
            pos,
            msg: msg.into(),
        }
    }

    fn expect(&mut self, kind: &TokenKind, what: &str) -> Result<(), ExprError> {
        match self.next() {
            Some(t) if &t.kind == kind => Ok(()),
            Some(t) => Err(ExprError::Parse {
                pos: t.pos,
                msg: format!("expected {what}"),
            }),
            None => Err(ExprError::Parse {
                pos: self.src_len,
                msg: format!("unexpected end of input, expected {what}"),
            }),
        }
    }

    // Pratt loop. Binding powers: +/- (10, 11), */ (20, 21), unary - 25,
    // ^ (31, 30) so that `^` binds tighter than unary minus and is
    // right-associative.
    fn expr(&mut self, min_bp: u8) -> Result<Expr, ExprError> {
        let mut lhs = self.prefix()?;
        loop {
            let op = match self.peek().map(|t| t.kind.clone()) {
                Some(TokenKind::Plus) => (BinaryOp::Add, 10, 11),
                Some(TokenKind::Minus) => (BinaryOp::Sub, 10, 11),
                Some(TokenKind::Star) => (BinaryOp::Mul, 20, 21),
                Some(TokenKind::Slash) => (BinaryOp::Div, 20, 21),
                Some(TokenKind::Caret) => (BinaryOp::Pow, 31, 30),
                _ => break,
            };
            let (kind, left_bp, right_bp) = op;
            if left_bp < min_bp {
                break;
            }
            self.next();
            let rhs = self.expr(right_bp)?;
            lhs = make_binary(kind, lhs, rhs);
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ExprError> {
        let token = self
            .next()
            .ok_or_else(|| self.err_here("unexpected end of input"))?;
        match token.kind {
            TokenKind::Number(v) => Ok(Expr::Const(v)),
            TokenKind::Minus => {
                let inner = self.expr(25)?;
                Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)))
            }
            TokenKind::LParen => {
                let inner = self.expr(0)?;
                self.expect(&TokenKind::RParen, "`)`")?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                if self.peek().map(|t| &t.kind) == Some(&TokenKind::LParen) {
                    self.next();
                    if name == "sum" {
                        self.sum_depth += 1;
                        let arg = self.expr(0);
                        self.sum_depth -= 1;
                        let arg = arg?;
                        self.expect(&TokenKind::RParen, "`)`")?;
                        return Ok(expand_sum(&arg));
                    }
                    let arg = self.expr(0)?;
                    self.expect(&TokenKind::RParen, "`)`")?;
                    match name.as_str() {
                        "exp" => Ok(Expr::Unary(UnaryOp::Exp, Box::new(arg))),
                        "log" => Ok(Expr::Unary(UnaryOp::Log, Box::new(arg))),
                        "sqrt" => Ok(Expr::Unary(UnaryOp::Sqrt, Box::new(arg))),
                        "abs" => Ok(Expr::Unary(UnaryOp::Abs, Box::new(arg))),
                        _ => Err(ExprError::Parse {
                            pos: token.pos,
                            msg: format!(
                                "unknown function `{name}` (expected exp, log, sqrt, abs or sum)"
                            ),
                        }),
                    }
                } else {
                    match name.as_str() {
                        "x1" => Ok(Expr::Var(Variable::X1)),
                        "x2" => Ok(Expr::Var(Variable::X2)),
                        "x3" => Ok(Expr::Var(Variable::X3)),
                        "s" => Ok(Expr::Var(Variable::S)),
                        "xi" if self.sum_depth == 0 => Err(ExprError::Parse {
                            pos: token.pos,
                            msg: "placeholder `xi` is only valid inside sum(...)".into(),
                        }),
                        _ => Ok(Expr::Param(name)),
                    }
                }
            }
            other => Err(ExprError::Parse {
                pos: token.pos,
                msg: format!("unexpected token `{}`", token_name(&other)),
            }),
        }
    }
}

fn token_name(kind: &TokenKind) -> String {
    match kind {
        TokenKind::Number(v) => format!("{v}"),
        TokenKind::Ident(s) => s.clone(),
        TokenKind::Plus => "+".into(),
        TokenKind::Minus => "-".into(),
        TokenKind::Star => "*".into(),
        TokenKind::Slash => "/".into(),
        TokenKind::Caret => "^".into(),
        TokenKind::LParen => "(".into(),
        TokenKind::RParen => ")".into(),
        TokenKind::Comma => ",".into(),
    }
}

fn make_binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
    if op == BinaryOp::Pow {
        if let Expr::Const(c) = rhs {
            if c.fract() == 0.0 && (0.0..=4.0).contains(&c) {
                return Expr::PowInt(Box::new(lhs), c as u32);
            }
        }
    }
    Expr::Binary(op, Box::new(lhs), Box::new(rhs))
}

// sum(body): substitute the placeholder `xi` by x1, x2, x3 and add the
// three copies. Nested sums are expanded innermost-first by the recursive
// parser, so the body never contains an unexpanded sum here.
fn expand_sum(body: &Expr) -> Expr {
    fn substitute(e: &Expr, var: Variable) -> Expr {
        match e {
            Expr::Param(name) if name == "xi" => Expr::Var(var),
            Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => e.clone(),
            Expr::Unary(op, inner) => Expr::Unary(*op, Box::new(substitute(inner, var))),
            Expr::Binary(op, a, b) => Expr::Binary(
                *op,
                Box::new(substitute(a, var)),
                Box::new(substitute(b, var)),
            ),
            Expr::PowInt(a, n) => Expr::PowInt(Box::new(substitute(a, var)), *n),
        }
    }
    let a = substitute(body, Variable::X1);
    let b = substitute(body, Variable::X2);
    let c = substitute(body, Variable::X3);
    Expr::Binary(
        BinaryOp::Add,
        Box::new(Expr::Binary(BinaryOp::Add, Box::new(a), Box::new(b))),
        Box::new(c),
    )
}

/// Parses a token stream into an expression tree.
pub fn parse_tokens(tokens: &[Token], src_len: usize) -> Result<Expr, ExprError> {
    if tokens.is_empty() {
        return Err(ExprError::Parse {
            pos: 0,
            msg: "empty expression".into(),
        });
    }
    let mut p = Parser {
        tokens,
        cursor: 0,
        src_len,
        sum_depth: 0,
    };
    let e = p.expr(0)?;
    if let Some(t) = p.peek() {
        return Err(ExprError::Parse {
            pos: t.pos,
            msg: format!("trailing input starting at `{}`", token_name(&t.kind)),
        });
    }
    Ok(e)
}

/// Convenience: tokenize + parse.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let tokens = tokenize(src)?;
    parse_tokens(&tokens, src.len())
}

/// Variable values and named parameters for evaluation.
#[derive(Debug, Clone, Default)]
pub struct EvalContext {
    pub x: [f64; 3],
    pub params: BTreeMap<String, f64>,
}

impl EvalContext {
    pub fn new(x: [f64; 3], params: &BTreeMap<String, f64>) -> Self {
        EvalContext {
            x,
            params: params.clone(),
        }
    }
}

/// Evaluates an expression. Domain violations (`log` of a non-positive
/// argument, `sqrt` of a negative one) and unbound parameters are errors,
/// not NaN; arithmetic itself follows IEEE semantics.
pub fn evaluate(expr: &Expr, ctx: &EvalContext) -> Result<f64, ExprError> {
    match expr {
        Expr::Const(v) => Ok(*v),
        Expr::Var(Variable::X1) => Ok(ctx.x[0]),
        Expr::Var(Variable::X2) => Ok(ctx.x[1]),
        Expr::Var(Variable::X3) => Ok(ctx.x[2]),
        Expr::Var(Variable::S) => Ok(ctx.x[0] + ctx.x[1] + ctx.x[2]),
        Expr::Param(name) => ctx
            .params
            .get(name)
            .copied()
            .ok_or_else(|| ExprError::eval(format!("unbound parameter `{name}`"))),
        Expr::Unary(op, inner) => {
            let v = evaluate(inner, ctx)?;
            match op {
                UnaryOp::Neg => Ok(-v),
                UnaryOp::Exp => Ok(v.exp()),
                UnaryOp::Log => {
                    if v <= 0.0 {
                        Err(ExprError::eval(format!("log of non-positive value {v}")))
                    } else {
                        Ok(v.ln())
                    }
                }
                UnaryOp::Sqrt => {
                    if v < 0.0 {
                        Err(ExprError::eval(format!("sqrt of negative value {v}")))
                    } else {
                        Ok(v.sqrt())
                    }
                }
                UnaryOp::Abs => Ok(v.abs()),
            }
        }
        Expr::Binary(op, a, b) => {
            let va = evaluate(a, ctx)?;
            let vb = evaluate(b, ctx)?;
            Ok(match op {
                BinaryOp::Add => va + vb,
                BinaryOp::Sub => va - vb,
                BinaryOp::Mul => va * vb,
                BinaryOp::Div => va / vb,
                BinaryOp::Pow => va.powf(vb),
            })
        }
        Expr::PowInt(a, n) => {
            let v = evaluate(a, ctx)?;
            Ok(match n {
                0 => 1.0,
                1 => v,
                2 => v * v,
                3 => v * v * v,
                _ => (v * v) * (v * v),
            })
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f, 0)
    }
}

// Precedence-aware printing so print -> reparse round-trips.
fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>, parent_bp: u8) -> fmt::Result {
    let my_bp = match e {
        Expr::Const(_) | Expr::Var(_) | Expr::Param(_) => 100,
        Expr::Unary(UnaryOp::Neg, _) => 25,
        Expr::Unary(..) => 100,
        Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 10,
        Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 20,
        Expr::Binary(BinaryOp::Pow, ..) | Expr::PowInt(..) => 30,
    };
    let needs_paren = my_bp < parent_bp;
    if needs_paren {
        write!(f, "(")?;
    }
    match e {
        Expr::Const(v) => write!(f, "{v}")?,
        Expr::Var(Variable::X1) => write!(f, "x1")?,
        Expr::Var(Variable::X2) => write!(f, "x2")?,
        Expr::Var(Variable::X3) => write!(f, "x3")?,
        Expr::Var(Variable::S) => write!(f, "s")?,
        Expr::Param(name) => write!(f, "{name}")?,
        Expr::Unary(UnaryOp::Neg, inner) => {
            write!(f, "-")?;
            write_expr(inner, f, 26)?;
        }
        Expr::Unary(op, inner) => {
            let name = match op {
                UnaryOp::Exp => "exp",
                UnaryOp::Log => "log",
                UnaryOp::Sqrt => "sqrt",
                UnaryOp::Abs => "abs",
                UnaryOp::Neg => unreachable!(),
            };
            write!(f, "{name}(")?;
            write_expr(inner, f, 0)?;
            write!(f, ")")?;
        }
        Expr::Binary(op, a, b) => {
            let (sym, left_bp, right_bp) = match op {
                BinaryOp::Add => ("+", 10, 11),
                BinaryOp::Sub => ("-", 10, 11),
                BinaryOp::Mul => ("*", 20, 21),
                BinaryOp::Div => ("/", 20, 21),
                BinaryOp::Pow => ("^", 31, 30),
            };
            write_expr(a, f, left_bp)?;
            write!(f, "{sym}")?;
            write_expr(b, f, right_bp)?;
        }
        Expr::PowInt(a, n) => {
            write_expr(a, f, 31)?;
            write!(f, "^{n}")?;
        }
    }
    if needs_paren {
        write!(f, ")")?;
    }
    Ok(())
}

/// Outcome of a permutation-equivariance check; `witness` holds the first
/// failing sample when the verdict is negative.
#[derive(Debug, Clone)]
pub struct EquivarianceReport {
    pub equivariant: bool,
    pub witness: Option<EquivarianceWitness>,
}

#[derive(Debug, Clone)]
pub struct EquivarianceWitness {
    pub x: [f64; 3],
    pub permutation: [usize; 3],
    pub component: usize,
    pub lhs: f64,
    pub rhs: f64,
}

const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

/// A vector function of the principal variables, as checked for
/// equivariance.
pub type ComponentFn<'a> = &'a dyn Fn(&[f64; 3]) -> Result<[f64; 3], ExprError>;

/// Checks permutation equivariance of a vector function `f`: for every
/// permutation `pi` and sample `x`, `f_{pi(i)}(x o pi^{-1}) = f_i(x)` within
/// `1e-9 * scale`. This is the principal-value expression of isotropy.
pub fn check_equivariance_fn(
    f: ComponentFn,
    samples: usize,
    seed: u64,
) -> Result<EquivarianceReport, ExprError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let x = [
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        ];
        let base = f(&x)?;
        let scale = base.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        for perm in &PERMUTATIONS {
            // permuted[pi(j)] = x[j], i.e. permuted[k] = x[pi^{-1}(k)]
            let mut permuted = [0.0; 3];
            for j in 0..3 {
                permuted[perm[j]] = x[j];
            }
            let moved = f(&permuted)?;
            for i in 0..3 {
                let lhs = moved[perm[i]];
                let rhs = base[i];
                if (lhs - rhs).abs() > 1e-9 * scale {
                    return Ok(EquivarianceReport {
                        equivariant: false,
                        witness: Some(EquivarianceWitness {
                            x,
                            permutation: *perm,
                            component: i,
                            lhs,
                            rhs,
                        }),
                    });
                }
            }
        }
    }
    Ok(EquivarianceReport {
        equivariant: true,
        witness: None,
    })
}

/// Equivariance check for three parsed component expressions sharing one
/// parameter map.
pub fn check_permutation_equivariance(
    components: &[Expr; 3],
    params: &BTreeMap<String, f64>,
    samples: usize,
    seed: u64,
) -> Result<EquivarianceReport, ExprError> {
    let eval3 = |x: &[f64; 3]| -> Result<[f64; 3], ExprError> {
        let ctx = EvalContext {
            x: *x,
            params: params.clone(),
        };
        Ok([
            evaluate(&components[0], &ctx)?,
            evaluate(&components[1], &ctx)?,
            evaluate(&components[2], &ctx)?,
        ])
    };
    check_equivariance_fn(&eval3, samples, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ctx(x: [f64; 3], pairs: &[(&str, f64)]) -> EvalContext {
        let mut params = BTreeMap::new();
        for (k, v) in pairs {
            params.insert(k.to_string(), *v);
        }
        EvalContext { x, params }
    }

    #[test]
    fn tokenize_simple_product() {
        let toks = tokenize("2*mu*x1").unwrap();
        assert_eq!(toks.len(), 5);
        assert_eq!(toks[0].kind, TokenKind::Number(2.0));
        assert_eq!(toks[1].kind, TokenKind::Star);
        assert_eq!(toks[2].kind, TokenKind::Ident("mu".into()));
        let positions: Vec<usize> = toks.iter().map(|t| t.pos).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn tokenize_balanced_expression() {
        let toks = tokenize("exp(k*(x1^2+x2^2+x3^2))").unwrap();
        assert_eq!(toks.len(), 18);
        let opens = toks.iter().filter(|t| t.kind == TokenKind::LParen).count();
        let closes = toks.iter().filter(|t| t.kind == TokenKind::RParen).count();
        assert_eq!(opens, closes);
    }

    #[test]
    fn tokenize_rejects_unknown_character() {
        let err = tokenize("2 $ x1").unwrap_err();
        match err {
            ExprError::Lex { pos, .. } => assert_eq!(pos, 2),
            other => panic!("expected lex error, got {other:?}"),
        }
    }

    #[test]
    fn parse_precedence() {
        let e = parse("x1+x2*x3").unwrap();
        match e {
            Expr::Binary(BinaryOp::Add, lhs, rhs) => {
                assert_eq!(*lhs, Expr::Var(Variable::X1));
                assert!(matches!(*rhs, Expr::Binary(BinaryOp::Mul, ..)));
            }
            other => panic!("unexpected tree {other:?}"),
        }
    }

    #[test]
    fn parse_unary_minus_binds_below_pow() {
        // -x1^2 parses as -(x1^2)
        let e = parse("-x1^2").unwrap();
        let v = evaluate(&e, &ctx([3.0, 0.0, 0.0], &[])).unwrap();
        assert_relative_eq!(v, -9.0);
    }

    #[test]
    fn parse_pow_right_associative() {
        let e = parse("2^3^2").unwrap();
        let v = evaluate(&e, &ctx([0.0; 3], &[])).unwrap();
        assert_relative_eq!(v, 512.0); // 2^(3^2)
    }

    #[test]
    fn parse_unexpected_end() {
        let err = parse("mu*(x1+").unwrap_err();
        assert!(matches!(err, ExprError::Parse { .. }), "{err:?}");
    }

    #[test]
    fn evaluate_hencky_gradient_component() {
        // 2*mu*x1 + lam*s at mu=1, lam=1, x=(1,0,0) is the first principal
        // Kirchhoff stress of the quadratic log-stretch energy: value 3.
        let e = parse("2*mu*x1 + lam*s").unwrap();
        let v = evaluate(&e, &ctx([1.0, 0.0, 0.0], &[("mu", 1.0), ("lam", 1.0)])).unwrap();
        assert_relative_eq!(v, 3.0);
    }

    #[test]
    fn evaluate_plain_variable() {
        let e = parse("x1").unwrap();
        assert_relative_eq!(evaluate(&e, &ctx([0.5, 9.0, 9.0], &[])).unwrap(), 0.5);
    }

    #[test]
    fn evaluate_log_domain_error() {
        let e = parse("log(x1)").unwrap();
        assert!(matches!(
            evaluate(&e, &ctx([-1.0, 0.0, 0.0], &[])),
            Err(ExprError::Eval { .. })
        ));
    }

    #[test]
    fn evaluate_unbound_parameter() {
        let e = parse("mu*x1").unwrap();
        assert!(matches!(
            evaluate(&e, &ctx([1.0, 0.0, 0.0], &[])),
            Err(ExprError::Eval { .. })
        ));
    }

    #[test]
    fn sum_helper_expands() {
        let e = parse("sum(xi^2)").unwrap();
        let v = evaluate(&e, &ctx([1.0, 2.0, 3.0], &[])).unwrap();
        assert_relative_eq!(v, 14.0);
    }

    #[test]
    fn equivariant_triple_passes() {
        let comps = [
            parse("2*x1 + s").unwrap(),
            parse("2*x2 + s").unwrap(),
            parse("2*x3 + s").unwrap(),
        ];
        let report = check_permutation_equivariance(&comps, &BTreeMap::new(), 40, 17).unwrap();
        assert!(report.equivariant);
    }

    #[test]
    fn swapped_components_fail_with_witness() {
        let comps = [
            parse("x2").unwrap(),
            parse("x1").unwrap(),
            parse("x3").unwrap(),
        ];
        let report = check_permutation_equivariance(&comps, &BTreeMap::new(), 40, 17).unwrap();
        assert!(!report.equivariant);
        assert!(report.witness.is_some());
    }

    #[test]
    fn scaled_identity_triple_is_equivariant() {
        let comps = [
            parse("x1*s").unwrap(),
            parse("x2*s").unwrap(),
            parse("x3*s").unwrap(),
        ];
        let report = check_permutation_equivariance(&comps, &BTreeMap::new(), 40, 17).unwrap();
        assert!(report.equivariant);
    }

    #[test]
    fn gradient_fixtures_match_finite_differences() {
        // (expression, hand-written partial derivatives w.r.t. x1, x2, x3)
        let fixtures: [(&str, [&str; 3]); 5] = [
            (
                "mu*(x1^2+x2^2+x3^2) + lam/2*s^2",
                ["2*mu*x1 + lam*s", "2*mu*x2 + lam*s", "2*mu*x3 + lam*s"],
            ),
            ("x1*x2*x3", ["x2*x3", "x1*x3", "x1*x2"]),
            ("exp(k*s)", ["k*exp(k*s)", "k*exp(k*s)", "k*exp(k*s)"]),
            ("sqrt(x1^2+4)", ["x1/sqrt(x1^2+4)", "0", "0"]),
            ("x1^3 - 2*x2/x3", ["3*x1^2", "-2/x3", "2*x2/x3^2"]),
        ];
        let params: BTreeMap<String, f64> = [
            ("mu".to_string(), 1.3),
            ("lam".to_string(), 0.7),
            ("k".to_string(), 0.4),
        ]
        .into_iter()
        .collect();
        let x = [0.3, -0.2, 0.9];
        for (src, grads) in fixtures {
            let e = parse(src).unwrap();
            for i in 0..3 {
                let analytic = evaluate(
                    &parse(grads[i]).unwrap(),
                    &EvalContext {
                        x,
                        params: params.clone(),
                    },
                )
                .unwrap();
                let h = 1e-6 * x[i].abs().max(1.0);
                let mut xp = x;
                xp[i] += h;
                let mut xm = x;
                xm[i] -= h;
                let fp = evaluate(
                    &e,
                    &EvalContext {
                        x: xp,
                        params: params.clone(),
                    },
                )
                .unwrap();
                let fm = evaluate(
                    &e,
                    &EvalContext {
                        x: xm,
                        params: params.clone(),
                    },
                )
                .unwrap();
                let fd = (fp - fm) / (2.0 * h);
                assert!(
                    (fd - analytic).abs() <= 1e-6 * analytic.abs().max(1.0),
                    "{src} d/dx{}: fd {fd} vs analytic {analytic}",
                    i + 1
                );
            }
        }
    }

    proptest! {
        // print -> reparse evaluates identically on random contexts.
        #[test]
        fn print_reparse_roundtrip(seed in 0u64..100) {
            use rand::{Rng, SeedableRng};
            let sources = [
                "2*mu*x1 + lam*s",
                "mu*(x1^2+x2^2+x3^2) + lam/2*s^2",
                "exp(k*(x1^2+x2^2+x3^2))",
                "-x1^2 + x2^3/x3 - sqrt(abs(x1))",
                "sum(xi^2) - s^2/3",
                "2^-x1",
                "(x1+x2)^(x3+2)",
            ];
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let params: BTreeMap<String, f64> =
                [("mu".to_string(), 1.1), ("lam".to_string(), 0.3), ("k".to_string(), 0.9)]
                    .into_iter()
                    .collect();
            for src in sources {
                let e = parse(src).unwrap();
                let printed = e.to_string();
                let reparsed = parse(&printed).unwrap();
                for _ in 0..100 {
                    let x = [
                        rng.gen::<f64>() * 2.0 + 0.1,
                        rng.gen::<f64>() * 2.0 + 0.1,
                        rng.gen::<f64>() * 2.0 + 0.1,
                    ];
                    let ctx = EvalContext { x, params: params.clone() };
                    let a = evaluate(&e, &ctx).unwrap();
                    let b = evaluate(&reparsed, &ctx).unwrap();
                    prop_assert!(
                        (a - b).abs() <= 1e-12 * a.abs().max(1.0),
                        "{} vs {} for {}", a, b, printed
                    );
                }
            }
        }
    }
}
