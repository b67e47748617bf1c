use super::{Node, WeightExpr};
use crate::error::{Error, Result};

/// First positive zero of the Bessel function `J_0`.
pub const BESSEL_J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// Right end used for the constant potential in the catalog. The four-digit
/// value sits strictly inside `(0, z_0)`, so certification on it is decisive.
pub const CATALOG_J0_ZERO: f64 = 2.4048;

/// Named potentials and pair members.
#[derive(Debug, Clone)]
pub enum Builtin {
    Zero,
    One,
    /// `r^{-a}`, `0 <= a < 2`.
    Power { a: f64 },
    /// `1 / (4 r^2 log^2(rho/r))` on `(0, rho/e)`.
    InvSqLog { rho: f64 },
    /// `r^{-2} sum_{j<=k} (prod_{i<=j} log^{(i)}(rho/r))^{-2}`.
    IterLog { k: u32, rho: f64 },
    /// Second member `((n-lambda-2)/2)^2 r^{-lambda-2} + r^{-lambda} P` of a
    /// shifted Bessel pair.
    PairShift { lambda: f64, n: u32, p: Box<WeightExpr> },
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Zero => "zero",
            Builtin::One => "one",
            Builtin::Power { .. } => "power",
            Builtin::InvSqLog { .. } => "inv_sq_log",
            Builtin::IterLog { .. } => "iterlog",
            Builtin::PairShift { .. } => "pair_shift",
        }
    }

    /// Looks a builtin up by name. `base` is the potential for `pair_shift`.
    pub fn from_name(name: &str, params: &[f64], base: Option<&WeightExpr>) -> Result<Builtin> {
        let need = |k: usize| -> Result<()> {
            if params.len() != k {
                Err(Error::invalid(format!("builtin `{name}` takes {k} parameter(s), got {}", params.len())))
            } else {
                Ok(())
            }
        };
        Ok(match name {
            "zero" => {
                need(0)?;
                Builtin::Zero
            }
            "one" => {
                need(0)?;
                Builtin::One
            }
            "power" => {
                need(1)?;
                Builtin::Power { a: params[0] }
            }
            "inv_sq_log" => {
                need(1)?;
                Builtin::InvSqLog { rho: params[0] }
            }
            "iterlog" => {
                need(2)?;
                if params[0] < 1.0 || params[0].fract() != 0.0 {
                    return Err(Error::invalid("iterlog: k must be a positive integer"));
                }
                Builtin::IterLog { k: params[0] as u32, rho: params[1] }
            }
            "pair_shift" => {
                need(2)?;
                let p = base.ok_or_else(|| Error::invalid("pair_shift needs a base potential"))?;
                if params[1] < 1.0 || params[1].fract() != 0.0 {
                    return Err(Error::invalid("pair_shift: n must be a positive integer"));
                }
                Builtin::PairShift { lambda: params[0], n: params[1] as u32, p: Box::new(p.clone()) }
            }
            _ => return Err(Error::invalid(format!("unknown builtin `{name}`"))),
        })
    }
}

/// `e^{e^{...}}` with `k` levels.
fn exp_tower(k: u32) -> f64 {
    (1..k).fold(std::f64::consts::E, |acc, _| acc.exp())
}

/// Builds a catalog entry with its validity interval.
pub fn builtin(b: &Builtin) -> Result<WeightExpr> {
    match b {
        Builtin::Zero => Ok(WeightExpr::constant(0.0).with_domain(f64::INFINITY)),
        Builtin::One => Ok(WeightExpr::constant(1.0).with_domain(CATALOG_J0_ZERO)),
        Builtin::Power { a } => {
            if !(0.0..2.0).contains(a) {
                return Err(Error::invalid(format!("power: a must satisfy 0 <= a < 2, got {a}")));
            }
            // y'' + y'/r + r^{-a} y = 0 is solved by J_0(2/(2-a) r^{(2-a)/2}).
            let za = ((2.0 - a) / 2.0 * CATALOG_J0_ZERO).powf(2.0 / (2.0 - a));
            Ok(WeightExpr::new(Node::pow(Node::R, -a)).with_domain(za))
        }
        Builtin::InvSqLog { rho } => {
            check_rho(*rho)?;
            let l = Node::Log(Box::new(Node::div(Node::Num(*rho), Node::R)));
            let ast = Node::div(
                Node::Num(1.0),
                Node::mul(Node::mul(Node::Num(4.0), Node::pow(Node::R, 2.0)), Node::pow(l, 2.0)),
            );
            Ok(WeightExpr::new(ast).with_domain(rho / std::f64::consts::E))
        }
        Builtin::IterLog { k, rho } => {
            check_rho(*rho)?;
            if *k == 0 || *k > 3 {
                return Err(Error::invalid(format!(
                    "iterlog: k = {k} unsupported (1..=3; the interval rho/e^e^e^e underflows)"
                )));
            }
            let mut logs = Vec::new();
            let mut cur = Node::div(Node::Num(*rho), Node::R);
            for _ in 0..*k {
                cur = Node::Log(Box::new(cur));
                logs.push(cur.clone());
            }
            let mut sum = Node::Num(0.0);
            let mut prod = Node::Num(1.0);
            for l in logs {
                prod = Node::mul(prod, l);
                sum = Node::add(sum, Node::pow(prod.clone(), -2.0));
            }
            let ast = Node::div(sum, Node::pow(Node::R, 2.0));
            Ok(WeightExpr::new(ast).with_domain(rho / exp_tower(*k)))
        }
        Builtin::PairShift { lambda, n, p } => {
            let n = *n as f64;
            if !(0.0..=n - 2.0).contains(lambda) {
                return Err(Error::invalid(format!(
                    "pair_shift: lambda must satisfy 0 <= lambda <= n-2 = {}, got {lambda}",
                    n - 2.0
                )));
            }
            let c = ((n - lambda - 2.0) / 2.0).powi(2);
            let ast = Node::add(
                Node::mul(Node::Num(c), Node::pow(Node::R, -lambda - 2.0)),
                Node::mul(Node::pow(Node::R, -lambda), p.ast.clone()),
            );
            Ok(WeightExpr::new(ast).with_domain(p.domain_max))
        }
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("rho must be positive, got {rho}")))
    }
}

/// Catalog potentials used by sweeps and property checks.
pub fn standard_potentials() -> Vec<(String, WeightExpr)> {
    let mut out = Vec::new();
    let mut push = |label: &str, b: Builtin| out.push((label.to_string(), builtin(&b).expect("catalog entry")));
    push("zero", Builtin::Zero);
    push("one", Builtin::One);
    push("power(0.5)", Builtin::Power { a: 0.5 });
    push("power(1)", Builtin::Power { a: 1.0 });
    push("power(1.5)", Builtin::Power { a: 1.5 });
    push("inv_sq_log(1)", Builtin::InvSqLog { rho: 1.0 });
    push("inv_sq_log(e)", Builtin::InvSqLog { rho: std::f64::consts::E });
    push("iterlog(1,1)", Builtin::IterLog { k: 1, rho: 1.0 });
    push("iterlog(2,100)", Builtin::IterLog { k: 2, rho: 100.0 });
    out
}
