//! Scalar arithmetic expressions in one or two variables.
//!
//! Coefficients and data of a problem instance are written as plain text
//! (`"1 + 0.5*tanh(y)"`, `"sin(pi*x)"`) and carried as an immutable [`Expr`].
//! The grammar is deliberately restricted to smooth primitives so that every
//! expression is C-infinity wherever it evaluates, and [`Expr::differentiate`]
//! is closed over the grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)*
//! exponent:= ['-'] INTEGER | '(' ['-'] INTEGER ')'
//! primary := NUMBER | 'pi' | VAR | FUNC '(' expr ')' | '(' expr ')'
//! FUNC    := sin | cos | exp | tanh | sqrt
//! ```

mod deriv;
mod parse;

use std::fmt;

use thiserror::Error;

/// Denominators (and bases raised to negative powers) closer to zero than
/// this are a domain error.
pub const DIVISION_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared variable `{name}` at position {pos}")]
    UndeclaredVariable { name: String, pos: usize },
    #[error("invalid exponent at position {pos}: {msg}")]
    BadExponent { pos: usize, msg: String },
    #[error("invalid variable list: {0}")]
    InvalidVariables(String),
    #[error("expected {expected} coordinate(s), got {got}")]
    Arity { expected: usize, got: usize },
    #[error("domain error in `{subexpr}`: {msg}")]
    Domain { subexpr: String, msg: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Tanh,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "tanh" => Func::Tanh,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Pi,
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, i32),
    Call(Func, Box<Node>),
}

impl Node {
    fn as_num(&self) -> Option<f64> {
        match self {
            Node::Num(v) => Some(*v),
            _ => None,
        }
    }

    // Constructors below fold literal arithmetic and the identities
    // 0+a, a*1, a*0, a^0, a^1. Folding never removes a subexpression that
    // could be the only source of a domain error in the *original* tree,
    // because folded products are derivative terms, not user input.

    pub(crate) fn neg(a: Node) -> Node {
        match a {
            Node::Num(v) => Node::Num(-v),
            Node::Neg(inner) => *inner,
            other => Node::Neg(Box::new(other)),
        }
    }

    pub(crate) fn add(a: Node, b: Node) -> Node {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) if (x + y).is_finite() => Node::Num(x + y),
            (Some(x), _) if x == 0.0 => b,
            (_, Some(y)) if y == 0.0 => a,
            _ => Node::Add(Box::new(a), Box::new(b)),
        }
    }

    pub(crate) fn sub(a: Node, b: Node) -> Node {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) if (x - y).is_finite() => Node::Num(x - y),
            (Some(x), _) if x == 0.0 => Node::neg(b),
            (_, Some(y)) if y == 0.0 => a,
            _ => Node::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub(crate) fn mul(a: Node, b: Node) -> Node {
        match (a.as_num(), b.as_num()) {
            (Some(x), Some(y)) if (x * y).is_finite() => Node::Num(x * y),
            (Some(x), _) | (_, Some(x)) if x == 0.0 => Node::Num(0.0),
            (Some(x), _) if x == 1.0 => b,
            (_, Some(y)) if y == 1.0 => a,
            (Some(x), _) if x == -1.0 => Node::neg(b),
            (_, Some(y)) if y == -1.0 => Node::neg(a),
            _ => Node::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub(crate) fn div(a: Node, b: Node) -> Node {
        match (a.as_num(), b.as_num()) {
            (Some(x), _) if x == 0.0 => Node::Num(0.0),
            (_, Some(y)) if y == 1.0 => a,
            _ => Node::Div(Box::new(a), Box::new(b)),
        }
    }

    pub(crate) fn pow(a: Node, n: i32) -> Node {
        match n {
            0 => Node::Num(1.0),
            1 => a,
            _ => Node::Pow(Box::new(a), n),
        }
    }

    pub(crate) fn call(f: Func, a: Node) -> Node {
        Node::Call(f, Box::new(a))
    }

    fn count(&self) -> usize {
        match self {
            Node::Num(_) | Node::Pi | Node::Var(_) => 1,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => 1 + a.count(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                1 + a.count() + b.count()
            }
        }
    }

    fn eval(&self, p: &[f64], vars: &[String]) -> Result<f64, ExprError> {
        let v = match self {
            Node::Num(v) => *v,
            Node::Pi => std::f64::consts::PI,
            Node::Var(i) => p[*i],
            Node::Neg(a) => -a.eval(p, vars)?,
            Node::Add(a, b) => a.eval(p, vars)? + b.eval(p, vars)?,
            Node::Sub(a, b) => a.eval(p, vars)? - b.eval(p, vars)?,
            Node::Mul(a, b) => a.eval(p, vars)? * b.eval(p, vars)?,
            Node::Div(a, b) => {
                let num = a.eval(p, vars)?;
                let den = b.eval(p, vars)?;
                if den.abs() < DIVISION_GUARD {
                    return Err(self.domain(vars, format!("denominator {den:e} is within {DIVISION_GUARD:e} of zero")));
                }
                num / den
            }
            Node::Pow(a, n) => {
                let base = a.eval(p, vars)?;
                if *n < 0 && base.abs() < DIVISION_GUARD {
                    return Err(self.domain(vars, format!("base {base:e} raised to negative power")));
                }
                base.powi(*n)
            }
            Node::Call(f, a) => {
                let x = a.eval(p, vars)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Exp => x.exp(),
                    Func::Tanh => x.tanh(),
                    Func::Sqrt => {
                        if x < 0.0 {
                            return Err(self.domain(vars, format!("sqrt of negative argument {x:e}")));
                        }
                        x.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.domain(vars, "non-finite value".to_string()))
        }
    }

    fn domain(&self, vars: &[String], msg: String) -> ExprError {
        ExprError::Domain {
            subexpr: Shown { node: self, vars }.to_string(),
            msg,
        }
    }
}

/// An immutable parsed expression together with its declared variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    vars: Vec<String>,
    root: Node,
}

impl Expr {
    /// Parses `text` with the given ordered variable list (length 1 or 2).
    pub fn parse(text: &str, vars: &[&str]) -> Result<Expr, ExprError> {
        let vars = check_vars(vars)?;
        let root = parse::parse(text, &vars)?;
        Ok(Expr { vars, root })
    }

    /// A literal constant expression over `vars`.
    pub fn constant(value: f64, vars: &[&str]) -> Result<Expr, ExprError> {
        let vars = check_vars(vars)?;
        Ok(Expr {
            vars,
            root: Node::Num(value),
        })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        self.root.count()
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, ExprError> {
        if point.len() != self.vars.len() {
            return Err(ExprError::Arity {
                expected: self.vars.len(),
                got: point.len(),
            });
        }
        self.root.eval(point, &self.vars)
    }

    /// Evaluates a one-variable expression.
    pub fn eval1(&self, x: f64) -> Result<f64, ExprError> {
        self.eval(&[x])
    }

    /// Evaluates a two-variable expression.
    pub fn eval2(&self, x: f64, y: f64) -> Result<f64, ExprError> {
        self.eval(&[x, y])
    }

    /// Exact partial derivative with respect to `var`.
    pub fn differentiate(&self, var: &str) -> Result<Expr, ExprError> {
        let idx = self
            .vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| ExprError::UnknownVariable(var.to_string()))?;
        Ok(Expr {
            vars: self.vars.clone(),
            root: deriv::derivative(&self.root, idx),
        })
    }

    /// True when the tree contains no variable reference.
    pub fn is_constant(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::Num(_) | Node::Pi => true,
                Node::Var(_) => false,
                Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => walk(a),
                Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                    walk(a) && walk(b)
                }
            }
        }
        walk(&self.root)
    }
}

fn check_vars(vars: &[&str]) -> Result<Vec<String>, ExprError> {
    if vars.is_empty() || vars.len() > 2 {
        return Err(ExprError::InvalidVariables(format!(
            "expected 1 or 2 variables, got {}",
            vars.len()
        )));
    }
    if vars.len() == 2 && vars[0] == vars[1] {
        return Err(ExprError::InvalidVariables(format!("duplicate variable `{}`", vars[0])));
    }
    for v in vars {
        let ok = !v.is_empty()
            && v.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && v.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(ExprError::InvalidVariables(format!("`{v}` is not an identifier")));
        }
        if *v == "pi" || Func::from_name(v).is_some() {
            return Err(ExprError::InvalidVariables(format!("`{v}` is reserved")));
        }
    }
    Ok(vars.iter().map(|s| s.to_string()).collect())
}

struct Shown<'a> {
    node: &'a Node,
    vars: &'a [String],
}

impl<'a> fmt::Display for Shown<'a> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |n: &'a Node| Shown { node: n, vars: self.vars };
        match self.node {
            Node::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => write!(f, "(-{:?})", -v),
            Node::Num(v) => write!(f, "{v:?}"),
            Node::Pi => f.write_str("pi"),
            Node::Var(i) => f.write_str(&self.vars[*i]),
            Node::Neg(a) => write!(f, "(-{})", sub(a)),
            Node::Add(a, b) => write!(f, "({} + {})", sub(a), sub(b)),
            Node::Sub(a, b) => write!(f, "({} - {})", sub(a), sub(b)),
            Node::Mul(a, b) => write!(f, "({} * {})", sub(a), sub(b)),
            Node::Div(a, b) => write!(f, "({} / {})", sub(a), sub(b)),
            Node::Pow(a, n) if *n < 0 => write!(f, "({}^(-{}))", sub(a), -(*n as i64)),
            Node::Pow(a, n) => write!(f, "({}^{})", sub(a), n),
            Node::Call(func, a) => write!(f, "{}({})", func.name(), sub(a)),
        }
    }
}

/// Fully parenthesised text that parses back to an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Shown {
            node: &self.root,
            vars: &self.vars,
        }
        .fmt(f)
    }
}
