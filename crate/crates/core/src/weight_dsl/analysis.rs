use super::Node;

/// Leading behaviour as `r -> 0+`: `coef * r^power * log(1/r)^log_power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Leading {
    Zero,
    Term { coef: f64, power: f64, log_power: f64 },
    /// Not representable as a monomial times log powers.
    Unknown,
}

/// Removes rounding residue from exponent arithmetic such as `(-λ-2) - (-λ)`.
fn snap(x: f64) -> f64 {
    if (x - x.round()).abs() < 1e-9 {
        x.round()
    } else {
        x
    }
}

fn term(coef: f64, power: f64, log_power: f64) -> Leading {
    let (power, log_power) = (snap(power), snap(log_power));
    if coef == 0.0 {
        Leading::Zero
    } else if coef.is_finite() {
        Leading::Term { coef, power, log_power }
    } else {
        Leading::Unknown
    }
}

fn dominates(p1: f64, l1: f64, p2: f64, l2: f64) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    // Smaller power dominates; at equal power the larger log power does.
    const EPS: f64 = 1e-9;
    if p1 < p2 - EPS {
        Greater
    } else if p1 > p2 + EPS {
        Less
    } else if l1 > l2 + EPS {
        Greater
    } else if l1 < l2 - EPS {
        Less
    } else {
        Equal
    }
}

fn combine_sum(a: Leading, b: Leading, sign: f64) -> Leading {
    use std::cmp::Ordering::*;
    match (a, b) {
        (Leading::Unknown, _) | (_, Leading::Unknown) => Leading::Unknown,
        (Leading::Zero, Leading::Term { coef, power, log_power }) => term(sign * coef, power, log_power),
        (x, Leading::Zero) => x,
        (
            Leading::Term { coef: c1, power: p1, log_power: l1 },
            Leading::Term { coef: c2, power: p2, log_power: l2 },
        ) => match dominates(p1, l1, p2, l2) {
            Greater => a,
            Less => term(sign * c2, p2, l2),
            Equal => {
                let c = c1 + sign * c2;
                if c.abs() <= 1e-14 * (c1.abs() + c2.abs()) {
                    // cancellation: next order unknown
                    Leading::Unknown
                } else {
                    term(c, p1, l1)
                }
            }
        },
    }
}

pub fn leading(node: &Node) -> Leading {
    match node {
        Node::Num(c) => term(*c, 0.0, 0.0),
        Node::E => term(std::f64::consts::E, 0.0, 0.0),
        Node::Pi => term(std::f64::consts::PI, 0.0, 0.0),
        Node::R => term(1.0, 1.0, 0.0),
        Node::Add(a, b) => combine_sum(leading(a), leading(b), 1.0),
        Node::Sub(a, b) => combine_sum(leading(a), leading(b), -1.0),
        Node::Mul(a, b) => match (leading(a), leading(b)) {
            (Leading::Zero, _) | (_, Leading::Zero) => Leading::Zero,
            (
                Leading::Term { coef: c1, power: p1, log_power: l1 },
                Leading::Term { coef: c2, power: p2, log_power: l2 },
            ) => term(c1 * c2, p1 + p2, l1 + l2),
            _ => Leading::Unknown,
        },
        Node::Div(a, b) => match (leading(a), leading(b)) {
            (Leading::Zero, Leading::Term { .. }) => Leading::Zero,
            (
                Leading::Term { coef: c1, power: p1, log_power: l1 },
                Leading::Term { coef: c2, power: p2, log_power: l2 },
            ) => term(c1 / c2, p1 - p2, l1 - l2),
            _ => Leading::Unknown,
        },
        Node::Pow(a, q) => match leading(a) {
            Leading::Term { coef, power, log_power } => {
                if coef > 0.0 || q.fract() == 0.0 {
                    term(coef.powf(*q), power * q, log_power * q)
                } else {
                    Leading::Unknown
                }
            }
            Leading::Zero if *q > 0.0 => Leading::Zero,
            _ => Leading::Unknown,
        },
        Node::Log(a) => match leading(a) {
            Leading::Term { coef, power, log_power } => {
                if power != 0.0 {
                    // log(c r^p ...) ~ -p log(1/r)
                    term(-power, 0.0, 1.0)
                } else if log_power != 0.0 {
                    // log of a log power: slower than any log power. Treated
                    // as an O(1) factor of the given sign.
                    term(log_power.signum(), 0.0, 0.0)
                } else if coef > 0.0 && coef != 1.0 {
                    term(coef.ln(), 0.0, 0.0)
                } else {
                    Leading::Unknown
                }
            }
            _ => Leading::Unknown,
        },
        Node::Exp(a) => match leading(a) {
            Leading::Zero => term(1.0, 0.0, 0.0),
            Leading::Term { coef, power, log_power } if power > 0.0 || (power == 0.0 && log_power == 0.0) => {
                term(if power > 0.0 { 1.0 } else { coef.exp() }, 0.0, 0.0)
            }
            _ => Leading::Unknown,
        },
    }
}

/// Singular order `a` (expr ~ C r^{-a}) and the accompanying log power.
///
/// Symbolic when the leading term is a monomial times log powers, otherwise a
/// least-squares log-log slope on `[1e-8, 1e-4]`.
pub fn singular_order(node: &Node) -> (f64, f64) {
    match leading(node) {
        Leading::Zero => (0.0, 0.0),
        Leading::Term { power, log_power, .. } => (-power, log_power),
        Leading::Unknown => (numeric_order(node), 0.0),
    }
}

fn numeric_order(node: &Node) -> f64 {
    let pts: Vec<(f64, f64)> = super::log_grid(1e-8, 1e-4, 17)
        .into_iter()
        .filter_map(|r| {
            let v = node.eval(r).abs();
            (v.is_finite() && v > 0.0).then(|| (r.ln(), v.ln()))
        })
        .collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    -sxy / sxx
}

fn singular_log_args<'a>(node: &'a Node, out: &mut Vec<&'a Node>) {
    match node {
        Node::Num(_) | Node::R | Node::E | Node::Pi => {}
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            singular_log_args(a, out);
            singular_log_args(b, out);
        }
        Node::Pow(a, _) | Node::Exp(a) => singular_log_args(a, out),
        Node::Log(a) => {
            if let Leading::Term { power, log_power, coef } = leading(a) {
                if coef > 0.0 && (power < 0.0 || (power == 0.0 && log_power > 0.0)) {
                    out.push(a);
                }
            }
            singular_log_args(a, out);
        }
    }
}

/// Right end of the interval `(0, R]` on which the expression is finite and
/// every logarithm whose argument blows up at the origin stays `>= 1`.
///
/// For `log(rho/r)` this gives `rho/e`; nesting reproduces the exponential
/// tower `rho / e^{e^{...}}` of the iterated-log potentials.
pub fn domain_hint(node: &Node) -> f64 {
    if !node.contains_r() {
        return f64::INFINITY;
    }
    let mut args = Vec::new();
    singular_log_args(node, &mut args);
    let ok = |r: f64| {
        node.eval(r).is_finite() && args.iter().all(|a| a.eval(r) >= std::f64::consts::E)
    };
    let grid = super::log_grid(1e-12, 1e6, 1801);
    if !ok(grid[0]) {
        return 0.0;
    }
    for w in grid.windows(2) {
        if !ok(w[1]) {
            let (mut lo, mut hi) = (w[0], w[1]);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if ok(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return lo;
        }
    }
    f64::INFINITY
}
