use std::fmt;

use thiserror::Error;

use crate::jungle::{Hypergraph, NodeRef};
use crate::label::Label;

/// A first-order term over input variables. Unfolding a term graph into
/// terms forgets both sharing and garbage.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Term {
    Var(usize),
    App(Label, Vec<Term>),
}

impl Term {
    /// # Panics
    ///
    /// If the number of arguments differs from the label's arity.
    pub fn app(label: Label, args: Vec<Term>) -> Self {
        assert_eq!(label.arity(), args.len(), "arity mismatch applying {label}");
        Term::App(label, args)
    }

    /// Replace every `Var(i)` with `args[i]`.
    pub fn subst(&self, args: &[Term]) -> Term {
        match self {
            Term::Var(i) => args[*i].clone(),
            Term::App(label, ts) => Term::App(label.clone(), ts.iter().map(|t| t.subst(args)).collect()),
        }
    }

    /// Add `offset` to every variable index.
    pub fn shift(&self, offset: usize) -> Term {
        match self {
            Term::Var(i) => Term::Var(i + offset),
            Term::App(label, ts) => Term::App(label.clone(), ts.iter().map(|t| t.shift(offset)).collect()),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(i) => write!(f, "x{i}"),
            Term::App(label, args) => {
                f.write_str(label.name())?;
                f.write_str("(")?;
                for (k, arg) in args.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{arg}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Error)]
pub enum UnfoldError {
    #[error("inner node n{node} lies on a cycle")]
    Cyclic { node: usize },
    #[error("inner node n{node} has no producing edge")]
    Unproduced { node: usize },
    #[error("inner node n{node} has several producing edges")]
    MultiplyProduced { node: usize },
}

/// The terms denoted by the outputs of `graph`.
///
/// Only nodes reachable from the outputs are inspected, so garbage may be
/// cyclic or ill-formed without affecting the result.
pub fn unfold(graph: &Hypergraph) -> Result<Vec<Term>, UnfoldError> {
    let producers = graph.producers();
    let mut state = vec![Visit::New; graph.inner_count()];
    graph
        .output()
        .iter()
        .map(|&node| unfold_node(graph, &producers, &mut state, node))
        .collect()
}

#[derive(Clone)]
enum Visit {
    New,
    Active,
    Done(Term),
}

fn unfold_node(
    graph: &Hypergraph,
    producers: &[Vec<usize>],
    state: &mut [Visit],
    node: NodeRef,
) -> Result<Term, UnfoldError> {
    let j = match node {
        NodeRef::Input(i) => return Ok(Term::Var(i)),
        NodeRef::Inner(j) => j,
    };
    match &state[j] {
        Visit::Done(term) => return Ok(term.clone()),
        Visit::Active => return Err(UnfoldError::Cyclic { node: j }),
        Visit::New => {}
    }
    let edge = match producers[j].as_slice() {
        [] => return Err(UnfoldError::Unproduced { node: j }),
        [e] => &graph.edges()[*e],
        _ => return Err(UnfoldError::MultiplyProduced { node: j }),
    };
    state[j] = Visit::Active;
    let args = edge
        .inputs
        .iter()
        .map(|&input| unfold_node(graph, producers, state, input))
        .collect::<Result<Vec<_>, _>>()?;
    let term = Term::App(edge.label.clone(), args);
    state[j] = Visit::Done(term.clone());
    Ok(term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jungle::HyperEdge;

    fn f() -> Label {
        Label::new("F", 1)
    }

    #[test]
    fn wiring_unfolds_to_variables() {
        let swap = Hypergraph::wire(2, &[1, 0]).unwrap();
        assert_eq!(unfold(&swap).unwrap(), vec![Term::Var(1), Term::Var(0)]);
    }

    #[test]
    fn chain_unfolds_by_substitution() {
        let g = Label::new("G", 1);
        let chain = Hypergraph::prim(f()).seq(&Hypergraph::prim(g.clone())).unwrap();
        let expected = Term::app(g, vec![Term::app(f(), vec![Term::Var(0)])]);
        assert_eq!(unfold(&chain).unwrap(), vec![expected.clone()]);
        assert_eq!(expected.to_string(), "G(F(x0))");
    }

    #[test]
    fn errors() {
        let looped = Hypergraph::new(0, 1, 1, vec![HyperEdge::new(f(), vec![NodeRef::Inner(0)], 0)], vec![NodeRef::Inner(0)])
            .unwrap();
        assert_eq!(unfold(&looped), Err(UnfoldError::Cyclic { node: 0 }));
        let undefined = Hypergraph::new(0, 1, 1, vec![], vec![NodeRef::Inner(0)]).unwrap();
        assert_eq!(unfold(&undefined), Err(UnfoldError::Unproduced { node: 0 }));
        let c = Label::new("C", 0);
        let join = Hypergraph::new(
            0,
            1,
            1,
            vec![HyperEdge::new(c.clone(), vec![], 0), HyperEdge::new(c, vec![], 0)],
            vec![NodeRef::Inner(0)],
        )
        .unwrap();
        assert_eq!(unfold(&join), Err(UnfoldError::MultiplyProduced { node: 0 }));
    }

    #[test]
    fn garbage_is_ignored() {
        let looped_garbage = Hypergraph::new(
            1,
            1,
            1,
            vec![HyperEdge::new(f(), vec![NodeRef::Inner(0)], 0)],
            vec![NodeRef::Input(0)],
        )
        .unwrap();
        assert_eq!(unfold(&looped_garbage).unwrap(), vec![Term::Var(0)]);
    }

    #[test]
    fn substitution_and_shift() {
        let t = Term::app(Label::new("G", 2), vec![Term::Var(1), Term::Var(0)]);
        let s = t.subst(&[Term::Var(5), Term::app(Label::new("C", 0), vec![])]);
        assert_eq!(s.to_string(), "G(C(), x5)");
        assert_eq!(t.shift(2).to_string(), "G(x3, x2)");
    }
}
