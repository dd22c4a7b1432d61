//! Complex expressions in one variable `z`.
//!
//! Grammar (lowest to highest precedence):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | '+' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'z' | 'i' | 'pi' | 'e'
//!          | func '(' expr ')' | '(' expr ')'
//! func    := exp | log | sin | cos | tan | sqrt
//! ```
//!
//! Multivalued functions (`log`, `sqrt`, non-integer `^`) use the principal
//! branch. Integer exponents are evaluated by repeated multiplication so that
//! `z^12` stays exact away from the branch cut of `log`.

mod parser;

use std::fmt;

use num_complex::Complex64;

use crate::function::{finite, AnalyticFunction, Evaluation, NonFinite};

pub use parser::{parse_expression, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinaryOp {
    pub fn symbol(self) -> char {
        match self {
            BinaryOp::Add => '+',
            BinaryOp::Sub => '-',
            BinaryOp::Mul => '*',
            BinaryOp::Div => '/',
            BinaryOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Tan,
    Sqrt,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Exp,
        Func::Log,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    fn apply(self, x: Complex64) -> Complex64 {
        match self {
            Func::Exp => x.exp(),
            Func::Log => x.ln(),
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Constant(Complex64),
    Variable,
    Neg(Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn constant(re: f64) -> Expr {
        Expr::Constant(Complex64::new(re, 0.0))
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        Expr::Call(func, Box::new(arg))
    }

    pub fn negate(inner: Expr) -> Expr {
        Expr::Neg(Box::new(inner))
    }

    /// True when the tree does not mention `z`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Constant(_) => true,
            Expr::Variable => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Binary(_, a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// Evaluates the tree at `z`. Any non-finite intermediate aborts with
    /// [`NonFinite`].
    pub fn evaluate(&self, z: Complex64) -> Evaluation {
        match self {
            Expr::Constant(c) => finite(*c),
            Expr::Variable => finite(z),
            Expr::Neg(a) => Ok(-a.evaluate(z)?),
            Expr::Binary(op, a, b) => {
                let lhs = a.evaluate(z)?;
                let rhs = b.evaluate(z)?;
                apply_binary(*op, lhs, rhs)
            }
            Expr::Call(func, a) => finite(func.apply(a.evaluate(z)?)),
        }
    }
}

fn apply_binary(op: BinaryOp, lhs: Complex64, rhs: Complex64) -> Evaluation {
    match op {
        BinaryOp::Add => finite(lhs + rhs),
        BinaryOp::Sub => finite(lhs - rhs),
        BinaryOp::Mul => finite(lhs * rhs),
        BinaryOp::Div => {
            if rhs.re == 0.0 && rhs.im == 0.0 {
                return Err(NonFinite);
            }
            finite(lhs / rhs)
        }
        BinaryOp::Pow => power(lhs, rhs),
    }
}

fn power(base: Complex64, exponent: Complex64) -> Evaluation {
    const MAX_INT_EXPONENT: f64 = 1_048_576.0;
    if exponent.im == 0.0 && exponent.re.fract() == 0.0 && exponent.re.abs() <= MAX_INT_EXPONENT {
        let n = exponent.re as i32;
        if n < 0 && base.re == 0.0 && base.im == 0.0 {
            return Err(NonFinite);
        }
        return finite(base.powi(n));
    }
    if base.re == 0.0 && base.im == 0.0 {
        // 0^w = 0 for Re w > 0; undefined otherwise.
        return if exponent.re > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(NonFinite)
        };
    }
    finite((exponent * base.ln()).exp())
}

fn write_real(f: &mut fmt::Formatter<'_>, x: f64) -> fmt::Result {
    if x < 0.0 || (x == 0.0 && x.is_sign_negative()) {
        write!(f, "(-{})", -x)
    } else {
        write!(f, "{x}")
    }
}

/// Fully parenthesized infix form. For every tree the parser can produce,
/// parsing the printed text yields an identical tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Constant(c) => {
                if c.im == 0.0 {
                    write_real(f, c.re)
                } else if c.re == 0.0 && c.im == 1.0 {
                    write!(f, "i")
                } else {
                    write!(f, "(")?;
                    write_real(f, c.re)?;
                    write!(f, "+")?;
                    write_real(f, c.im)?;
                    write!(f, "*i)")
                }
            }
            Expr::Variable => write!(f, "z"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Binary(op, a, b) => write!(f, "({a}{}{b})", op.symbol()),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

/// A parsed expression packaged as an [`AnalyticFunction`].
#[derive(Debug, Clone, PartialEq)]
pub struct ExpressionFunction {
    source: String,
    expr: Expr,
}

impl ExpressionFunction {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        Ok(Self {
            source: source.trim().to_string(),
            expr: parse_expression(source)?,
        })
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn source(&self) -> &str {
        &self.source
    }
}

impl AnalyticFunction for ExpressionFunction {
    fn eval(&self, z: Complex64) -> Evaluation {
        self.expr.evaluate(z)
    }

    fn name(&self) -> &str {
        &self.source
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConstantError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("expression `{0}` depends on z")]
    NotConstant(String),
    #[error("expression `{0}` does not evaluate to a finite number")]
    NonFinite(String),
}

/// Parses a constant complex number written as an expression, e.g. `2+3i`
/// is accepted as `2+3*i`, and `-1.1`, `i`, `sqrt(2)` work as usual.
pub fn parse_complex(text: &str) -> Result<Complex64, ConstantError> {
    let normalized = insert_imaginary_products(text);
    let expr = parse_expression(&normalized)?;
    if !expr.is_constant() {
        return Err(ConstantError::NotConstant(text.to_string()));
    }
    expr.evaluate(Complex64::new(0.0, 0.0))
        .map_err(|_| ConstantError::NonFinite(text.to_string()))
}

/// Rewrites `3i` / `2.5e-1i` as `3*i` so that the usual `a+bi` notation parses.
fn insert_imaginary_products(text: &str) -> String {
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() + 4);
    for (idx, &c) in chars.iter().enumerate() {
        if c == 'i' && idx > 0 {
            let prev = chars[idx - 1];
            let next_is_ident = chars
                .get(idx + 1)
                .is_some_and(|n| n.is_ascii_alphanumeric() || *n == '_');
            if (prev.is_ascii_digit() || prev == '.') && !next_is_ident {
                out.push('*');
            }
        }
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn eval(text: &str, z: Complex64) -> Evaluation {
        parse_expression(text).unwrap().evaluate(z)
    }

    #[test]
    fn identity() {
        assert_eq!(eval("z", c(2.0, 3.0)), Ok(c(2.0, 3.0)));
    }

    #[test]
    fn lorentzian_at_origin() {
        assert_eq!(eval("1/(z*z+1)", c(0.0, 0.0)), Ok(c(1.0, 0.0)));
    }

    #[test]
    fn exact_pole_hit_is_non_finite() {
        assert_eq!(eval("1/(1+z)", c(-1.0, 0.0)), Err(NonFinite));
    }

    #[test]
    fn overflow_is_non_finite() {
        assert_eq!(eval("exp(z)", c(1000.0, 0.0)), Err(NonFinite));
        assert!(eval("cos(1/z)", c(1e-5, 0.0)).is_ok());
        assert_eq!(eval("cos(1/z)", c(0.0, 1e-5)), Err(NonFinite));
    }

    #[test]
    fn integer_powers_are_exact() {
        assert_eq!(eval("z^12", c(0.0, 1.0)), Ok(c(1.0, 0.0)));
        assert_eq!(eval("z^-2", c(2.0, 0.0)), Ok(c(0.25, 0.0)));
        assert_eq!(eval("z^-1", c(0.0, 0.0)), Err(NonFinite));
        assert_eq!(eval("2^3^2", c(0.0, 0.0)), Ok(c(512.0, 0.0)));
    }

    #[test]
    fn principal_branches() {
        let s = eval("sqrt(z)", c(-4.0, 0.0)).unwrap();
        assert!((s - c(0.0, 2.0)).norm() < 1e-15);
        let l = eval("log(z)", c(-1.0, 0.0)).unwrap();
        assert!((l - c(0.0, std::f64::consts::PI)).norm() < 1e-15);
        let p = eval("z^0.5", c(-4.0, 0.0)).unwrap();
        assert!((p - c(0.0, 2.0)).norm() < 1e-14);
        assert_eq!(eval("z^0.5", c(0.0, 0.0)), Ok(c(0.0, 0.0)));
        assert_eq!(eval("log(z)", c(0.0, 0.0)), Err(NonFinite));
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        assert_eq!(eval("-z^2", c(3.0, 0.0)), Ok(c(-9.0, 0.0)));
        assert_eq!(eval("(-z)^2", c(3.0, 0.0)), Ok(c(9.0, 0.0)));
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0").unwrap(), c(0.0, 0.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-1.1").unwrap(), c(-1.1, 0.0));
        assert_eq!(parse_complex("2+3i").unwrap(), c(2.0, 3.0));
        assert_eq!(parse_complex("1-2.5i").unwrap(), c(1.0, -2.5));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e1i").unwrap(), c(1e-3, 20.0));
        assert!(matches!(
            parse_complex("z+1"),
            Err(ConstantError::NotConstant(_))
        ));
        assert!(matches!(
            parse_complex("1/0"),
            Err(ConstantError::NonFinite(_))
        ));
    }

    #[test]
    fn display_of_general_constants_reparses_to_same_value() {
        let e = Expr::binary(BinaryOp::Mul, Expr::Constant(c(-1.5, 2.0)), Expr::Variable);
        let back = parse_expression(&e.to_string()).unwrap();
        assert_eq!(back.evaluate(c(1.0, 1.0)), e.evaluate(c(1.0, 1.0)));
    }
}
