//! Radial weight expressions: parsing, evaluation, symbolic derivatives and
//! the named potential catalog.
//!
//! Grammar (variable `r` only):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := number | "r" | "e" | "pi" | "-" factor
//!         | "pow(" expr "," number ")" | "log(" expr ")" | "exp(" expr ")"
//!         | "(" expr ")"
//! ```

mod analysis;
mod catalog;
mod deriv;
mod parser;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use analysis::Leading;
pub use catalog::{builtin, standard_potentials, Builtin, BESSEL_J0_FIRST_ZERO, CATALOG_J0_ZERO};

/// Expression tree over the radial variable `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Num(f64),
    R,
    E,
    Pi,
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, f64),
    Log(Box<Node>),
    Exp(Box<Node>),
}

impl Node {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Node::Num(c) => *c,
            Node::R => r,
            Node::E => std::f64::consts::E,
            Node::Pi => std::f64::consts::PI,
            Node::Add(a, b) => a.eval(r) + b.eval(r),
            Node::Sub(a, b) => a.eval(r) - b.eval(r),
            Node::Mul(a, b) => a.eval(r) * b.eval(r),
            Node::Div(a, b) => a.eval(r) / b.eval(r),
            Node::Pow(a, p) => {
                let base = a.eval(r);
                if *p == 2.0 {
                    base * base
                } else if *p == 1.0 {
                    base
                } else {
                    base.powf(*p)
                }
            }
            Node::Log(a) => a.eval(r).ln(),
            Node::Exp(a) => a.eval(r).exp(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Node::Num(c) if *c == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Node::Num(c) if *c == 1.0)
    }

    pub fn contains_r(&self) -> bool {
        match self {
            Node::R => true,
            Node::Num(_) | Node::E | Node::Pi => false,
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.contains_r() || b.contains_r()
            }
            Node::Pow(a, _) | Node::Log(a) | Node::Exp(a) => a.contains_r(),
        }
    }

    // Light-weight constructors used while building derivatives. They fold
    // numeric literals and drop neutral elements, nothing more.

    pub fn add(a: Node, b: Node) -> Node {
        match (&a, &b) {
            (Node::Num(x), Node::Num(y)) => Node::Num(x + y),
            _ if a.is_zero() => b,
            _ if b.is_zero() => a,
            _ => Node::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Node, b: Node) -> Node {
        match (&a, &b) {
            (Node::Num(x), Node::Num(y)) => Node::Num(x - y),
            _ if b.is_zero() => a,
            _ if a.is_zero() => Node::mul(Node::Num(-1.0), b),
            _ => Node::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Node, b: Node) -> Node {
        match (&a, &b) {
            (Node::Num(x), Node::Num(y)) => Node::Num(x * y),
            _ if a.is_zero() || b.is_zero() => Node::Num(0.0),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            _ => Node::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Node, b: Node) -> Node {
        match (&a, &b) {
            (Node::Num(x), Node::Num(y)) if *y != 0.0 => Node::Num(x / y),
            _ if a.is_zero() => Node::Num(0.0),
            _ if b.is_one() => a,
            _ => Node::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Node, p: f64) -> Node {
        if p == 0.0 {
            Node::Num(1.0)
        } else if p == 1.0 {
            a
        } else {
            Node::Pow(Box::new(a), p)
        }
    }
}

fn fmt_num(c: f64) -> String {
    // Debug formatting is the shortest representation that round-trips.
    let s = format!("{c:?}");
    if c < 0.0 {
        format!("({s})")
    } else {
        s
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(c) => write!(f, "{}", fmt_num(*c)),
            Node::R => write!(f, "r"),
            Node::E => write!(f, "e"),
            Node::Pi => write!(f, "pi"),
            Node::Add(a, b) => write!(f, "({a}+{b})"),
            Node::Sub(a, b) => write!(f, "({a}-{b})"),
            Node::Mul(a, b) => write!(f, "({a}*{b})"),
            Node::Div(a, b) => write!(f, "({a}/{b})"),
            Node::Pow(a, p) => write!(f, "pow({a},{p:?})"),
            Node::Log(a) => write!(f, "log({a})"),
            Node::Exp(a) => write!(f, "exp({a})"),
        }
    }
}

/// A parsed radial weight together with its behaviour at the origin and the
/// interval `(0, domain_max]` on which it is meant to be used.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightExpr {
    pub ast: Node,
    /// `a` such that the expression behaves like `C r^{-a}` as `r -> 0+`.
    pub singular_order: f64,
    /// Power of `log(1/r)` multiplying the leading monomial (0 when the
    /// order came from a numerical slope fit).
    pub log_power: f64,
    pub domain_max: f64,
}

impl PartialEq for WeightExpr {
    fn eq(&self, other: &Self) -> bool {
        self.ast == other.ast
    }
}

impl WeightExpr {
    /// Wraps an AST, computing the singular order and the domain hint.
    pub fn new(ast: Node) -> Self {
        let (singular_order, log_power) = analysis::singular_order(&ast);
        let domain_max = analysis::domain_hint(&ast);
        WeightExpr { ast, singular_order, log_power, domain_max }
    }

    pub fn with_domain(mut self, domain_max: f64) -> Self {
        self.domain_max = domain_max;
        self
    }

    pub fn constant(c: f64) -> Self {
        WeightExpr::new(Node::Num(c))
    }

    /// `r^p`.
    pub fn monomial(p: f64) -> Self {
        WeightExpr::new(Node::pow(Node::R, p))
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.ast.eval(r)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.ast.is_zero()
    }

    pub fn leading(&self) -> Leading {
        analysis::leading(&self.ast)
    }

    /// Symbolic derivative of order 1 or 2.
    pub fn differentiate(&self, order: u32) -> Result<WeightExpr> {
        match order {
            1 => Ok(WeightExpr::new(deriv::derivative(&self.ast)).with_domain(self.domain_max)),
            2 => {
                let d1 = deriv::derivative(&self.ast);
                Ok(WeightExpr::new(deriv::derivative(&d1)).with_domain(self.domain_max))
            }
            _ => Err(Error::invalid(format!("derivative order {order} unsupported (1 or 2 only)"))),
        }
    }

    pub fn scaled(&self, c: f64) -> WeightExpr {
        WeightExpr::new(Node::mul(Node::Num(c), self.ast.clone())).with_domain(self.domain_max)
    }

    pub fn plus(&self, other: &WeightExpr) -> WeightExpr {
        WeightExpr::new(Node::add(self.ast.clone(), other.ast.clone()))
            .with_domain(self.domain_max.min(other.domain_max))
    }

    pub fn minus(&self, other: &WeightExpr) -> WeightExpr {
        WeightExpr::new(Node::sub(self.ast.clone(), other.ast.clone()))
            .with_domain(self.domain_max.min(other.domain_max))
    }

    pub fn times(&self, other: &WeightExpr) -> WeightExpr {
        WeightExpr::new(Node::mul(self.ast.clone(), other.ast.clone()))
            .with_domain(self.domain_max.min(other.domain_max))
    }

    pub fn over(&self, other: &WeightExpr) -> WeightExpr {
        WeightExpr::new(Node::div(self.ast.clone(), other.ast.clone()))
            .with_domain(self.domain_max.min(other.domain_max))
    }

    /// Smallest value on `n` log-spaced points of `(lo, hi)` together with
    /// where it occurs.
    pub fn min_on_log_grid(&self, lo: f64, hi: f64, n: usize) -> (f64, f64) {
        let mut best = (f64::INFINITY, lo);
        for r in log_grid(lo, hi, n) {
            let v = self.eval(r);
            if v.is_nan() {
                return (f64::NAN, r);
            }
            if v < best.0 {
                best = (v, r);
            }
        }
        best
    }

    /// Rejects weights that take negative (or non-finite) values on a
    /// 10^3-point log grid inside `(0, radius)`.
    pub fn ensure_nonnegative(&self, radius: f64, role: &str) -> Result<()> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!("radius must be positive and finite, got {radius}")));
        }
        let (v, r) = self.min_on_log_grid(radius * 1e-8, radius * (1.0 - 1e-9), 1000);
        if v.is_nan() || v < 0.0 {
            return Err(Error::invalid(format!(
                "{role} `{}` is negative or undefined at r = {r:.6e} (value {v:.3e})",
                self.ast
            )));
        }
        Ok(())
    }
}

impl fmt::Display for WeightExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

impl std::str::FromStr for WeightExpr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_weight(s)
    }
}

/// Parses a weight expression in the radial DSL.
pub fn parse_weight(text: &str) -> Result<WeightExpr> {
    let ast = parser::parse(text)?;
    Ok(WeightExpr::new(ast))
}

/// `n` points log-uniformly spaced on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
