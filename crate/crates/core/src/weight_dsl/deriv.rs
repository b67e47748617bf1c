use super::Node;

/// Exact derivative with respect to `r`.
pub fn derivative(node: &Node) -> Node {
    match node {
        Node::Num(_) | Node::E | Node::Pi => Node::Num(0.0),
        Node::R => Node::Num(1.0),
        Node::Add(a, b) => Node::add(derivative(a), derivative(b)),
        Node::Sub(a, b) => Node::sub(derivative(a), derivative(b)),
        Node::Mul(a, b) => Node::add(
            Node::mul(derivative(a), (**b).clone()),
            Node::mul((**a).clone(), derivative(b)),
        ),
        Node::Div(a, b) => {
            let da = derivative(a);
            let db = derivative(b);
            if db.is_zero() {
                Node::div(da, (**b).clone())
            } else {
                Node::div(
                    Node::sub(Node::mul(da, (**b).clone()), Node::mul((**a).clone(), db)),
                    Node::pow((**b).clone(), 2.0),
                )
            }
        }
        Node::Pow(a, p) => Node::mul(
            Node::mul(Node::Num(*p), Node::pow((**a).clone(), p - 1.0)),
            derivative(a),
        ),
        Node::Log(a) => Node::div(derivative(a), (**a).clone()),
        Node::Exp(a) => Node::mul(node.clone(), derivative(a)),
    }
}
