use super::{Func, Node};

/// d(node)/d(var), built with the folding constructors on [`Node`].
pub(super) fn derivative(node: &Node, var: usize) -> Node {
    match node {
        Node::Num(_) | Node::Pi => Node::Num(0.0),
        Node::Var(i) => Node::Num(if *i == var { 1.0 } else { 0.0 }),
        Node::Neg(a) => Node::neg(derivative(a, var)),
        Node::Add(a, b) => Node::add(derivative(a, var), derivative(b, var)),
        Node::Sub(a, b) => Node::sub(derivative(a, var), derivative(b, var)),
        Node::Mul(a, b) => Node::add(
            Node::mul(derivative(a, var), (**b).clone()),
            Node::mul((**a).clone(), derivative(b, var)),
        ),
        Node::Div(a, b) => {
            let da = derivative(a, var);
            let db = derivative(b, var);
            // (a'b - ab') / b^2, split so that a constant numerator stays cheap
            let first = Node::div(da, (**b).clone());
            let second = Node::div(Node::mul((**a).clone(), db), Node::pow((**b).clone(), 2));
            Node::sub(first, second)
        }
        Node::Pow(a, n) => {
            let da = derivative(a, var);
            let outer = Node::mul(Node::Num(*n as f64), Node::pow((**a).clone(), n - 1));
            Node::mul(outer, da)
        }
        Node::Call(f, a) => {
            let da = derivative(a, var);
            if da == Node::Num(0.0) {
                return Node::Num(0.0);
            }
            let inner = (**a).clone();
            let outer = match f {
                Func::Sin => Node::call(Func::Cos, inner),
                Func::Cos => Node::neg(Node::call(Func::Sin, inner)),
                Func::Exp => Node::call(Func::Exp, inner),
                Func::Tanh => Node::sub(Node::Num(1.0), Node::pow(Node::call(Func::Tanh, inner), 2)),
                Func::Sqrt => Node::div(Node::Num(0.5), Node::call(Func::Sqrt, inner)),
            };
            Node::mul(outer, da)
        }
    }
}
