//! Exact isomorphism of hypergraphs with fixed interfaces.
//!
//! Two graphs `m → n` are isomorphic when a bijection on inner nodes and a
//! bijection on edges map one onto the other, preserving labels, edge inputs
//! position by position, edge outputs and the output vector. Input
//! positions are fixed pointwise. Garbage takes part like any other edge.
//!
//! The decision procedure is plain backtracking over edge assignments with
//! label and node-signature pruning. No hashing shortcut is taken, so the
//! answer is exact for every size; the configurable bound only refuses
//! inputs that would take too long.

use thiserror::Error;

use crate::jungle::{Hypergraph, NodeRef};
use crate::label::Label;

pub const DEFAULT_MAX_INNER: usize = 12;

/// A pair of bijections mapping one graph onto another: `inner[j]` is the
/// image of inner node `j` and `edges[e]` the image of edge `e`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IsoWitness {
    pub inner: Vec<usize>,
    pub edges: Vec<usize>,
}

impl IsoWitness {
    /// Re-check the witness structurally against both graphs.
    pub fn verify(&self, from: &Hypergraph, to: &Hypergraph) -> bool {
        if from.input_arity() != to.input_arity()
            || from.output_arity() != to.output_arity()
            || !is_permutation(&self.inner, from.inner_count(), to.inner_count())
            || !is_permutation(&self.edges, from.edges().len(), to.edges().len())
        {
            return false;
        }
        let map = |node: NodeRef| match node {
            NodeRef::Input(i) => NodeRef::Input(i),
            NodeRef::Inner(j) => NodeRef::Inner(self.inner[j]),
        };
        let edges_agree = from.edges().iter().enumerate().all(|(e, edge)| {
            let image = &to.edges()[self.edges[e]];
            image.label == edge.label
                && image.out == self.inner[edge.out]
                && image.inputs.len() == edge.inputs.len()
                && edge.inputs.iter().zip(&image.inputs).all(|(&a, &b)| map(a) == b)
        });
        edges_agree && from.output().iter().zip(to.output()).all(|(&a, &b)| map(a) == b)
    }
}

fn is_permutation(perm: &[usize], len: usize, target: usize) -> bool {
    if perm.len() != len || len != target {
        return false;
    }
    let mut seen = vec![false; len];
    perm.iter().all(|&p| p < len && !std::mem::replace(&mut seen[p], true))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Error)]
pub enum IsoError {
    #[error("graph has {inner_count} inner nodes, above the isomorphism bound of {limit}")]
    SizeLimit { inner_count: usize, limit: usize },
}

/// Isomorphism decision with a bound on the number of inner nodes.
#[derive(Clone, Copy, Debug)]
pub struct IsoChecker {
    max_inner: usize,
}

impl Default for IsoChecker {
    fn default() -> Self {
        Self {
            max_inner: DEFAULT_MAX_INNER,
        }
    }
}

/// [`IsoChecker::check`] with the default bound.
pub fn isomorphic(a: &Hypergraph, b: &Hypergraph) -> Result<Option<IsoWitness>, IsoError> {
    IsoChecker::default().check(a, b)
}

impl IsoChecker {
    pub fn new(max_inner: usize) -> Self {
        Self { max_inner }
    }

    pub fn max_inner(&self) -> usize {
        self.max_inner
    }

    pub fn check(&self, a: &Hypergraph, b: &Hypergraph) -> Result<Option<IsoWitness>, IsoError> {
        for g in [a, b] {
            if g.inner_count() > self.max_inner {
                return Err(IsoError::SizeLimit {
                    inner_count: g.inner_count(),
                    limit: self.max_inner,
                });
            }
        }
        if a.input_arity() != b.input_arity()
            || a.output_arity() != b.output_arity()
            || a.inner_count() != b.inner_count()
            || a.edges().len() != b.edges().len()
        {
            return Ok(None);
        }
        let sig_a = signatures(a);
        let sig_b = signatures(b);
        let mut sorted_a = sig_a.clone();
        let mut sorted_b = sig_b.clone();
        sorted_a.sort();
        sorted_b.sort();
        if sorted_a != sorted_b {
            return Ok(None);
        }
        let mut search = Search {
            a,
            b,
            sig_a,
            sig_b,
            map: vec![None; a.inner_count()],
            inverse: vec![None; b.inner_count()],
            trail: Vec::new(),
            edge_map: vec![usize::MAX; a.edges().len()],
            edge_used: vec![false; b.edges().len()],
            order: Vec::new(),
        };
        for (&x, &y) in a.output().iter().zip(b.output()) {
            if !search.match_node(x, y) {
                return Ok(None);
            }
        }
        search.order = edge_order(a);
        if !search.assign(0) {
            return Ok(None);
        }
        // whatever is left is referenced by nothing on either side
        let mut free = (0..b.inner_count()).filter(|&j| search.inverse[j].is_none());
        let inner = search
            .map
            .iter()
            .map(|m| m.unwrap_or_else(|| free.next().expect("equal node counts")))
            .collect();
        let witness = IsoWitness {
            inner,
            edges: search.edge_map,
        };
        debug_assert!(witness.verify(a, b));
        Ok(Some(witness))
    }
}

/// Local invariants of an inner node that any isomorphism must preserve.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct NodeSig {
    produced_by: Vec<Label>,
    used_at: Vec<(Label, usize)>,
    output_positions: Vec<usize>,
}

fn signatures(g: &Hypergraph) -> Vec<NodeSig> {
    let mut sigs = vec![
        NodeSig {
            produced_by: Vec::new(),
            used_at: Vec::new(),
            output_positions: Vec::new(),
        };
        g.inner_count()
    ];
    for edge in g.edges() {
        sigs[edge.out].produced_by.push(edge.label.clone());
        for (port, node) in edge.inputs.iter().enumerate() {
            if let NodeRef::Inner(j) = *node {
                sigs[j].used_at.push((edge.label.clone(), port));
            }
        }
    }
    for (position, node) in g.output().iter().enumerate() {
        if let NodeRef::Inner(j) = *node {
            sigs[j].output_positions.push(position);
        }
    }
    for sig in &mut sigs {
        sig.produced_by.sort();
        sig.used_at.sort();
    }
    sigs
}

/// Orders edges so that each one is as connected as possible to nodes that
/// earlier choices (and the output vector) have already pinned down.
fn edge_order(g: &Hypergraph) -> Vec<usize> {
    let mut known = vec![false; g.inner_count()];
    for node in g.output() {
        if let NodeRef::Inner(j) = *node {
            known[j] = true;
        }
    }
    let mut remaining: Vec<usize> = (0..g.edges().len()).collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let score = |e: usize| {
            let edge = &g.edges()[e];
            let inputs_known = edge
                .inputs
                .iter()
                .filter(|n| matches!(n, NodeRef::Inner(j) if known[*j]))
                .count();
            2 * usize::from(known[edge.out]) + inputs_known
        };
        let (pos, &best) = remaining
            .iter()
            .enumerate()
            .max_by_key(|&(pos, &e)| (score(e), std::cmp::Reverse(pos)))
            .expect("non-empty");
        remaining.remove(pos);
        let edge = &g.edges()[best];
        known[edge.out] = true;
        for node in &edge.inputs {
            if let NodeRef::Inner(j) = *node {
                known[j] = true;
            }
        }
        order.push(best);
    }
    order
}

struct Search<'g> {
    a: &'g Hypergraph,
    b: &'g Hypergraph,
    sig_a: Vec<NodeSig>,
    sig_b: Vec<NodeSig>,
    map: Vec<Option<usize>>,
    inverse: Vec<Option<usize>>,
    trail: Vec<usize>,
    edge_map: Vec<usize>,
    edge_used: Vec<bool>,
    order: Vec<usize>,
}

impl Search<'_> {
    fn bind(&mut self, x: usize, y: usize) -> bool {
        match (self.map[x], self.inverse[y]) {
            (Some(m), _) => m == y,
            (None, Some(_)) => false,
            (None, None) => {
                if self.sig_a[x] != self.sig_b[y] {
                    return false;
                }
                self.map[x] = Some(y);
                self.inverse[y] = Some(x);
                self.trail.push(x);
                true
            }
        }
    }

    fn match_node(&mut self, x: NodeRef, y: NodeRef) -> bool {
        match (x, y) {
            (NodeRef::Input(i), NodeRef::Input(k)) => i == k,
            (NodeRef::Inner(i), NodeRef::Inner(k)) => self.bind(i, k),
            _ => false,
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().expect("non-empty trail");
            let y = self.map[x].take().expect("bound");
            self.inverse[y] = None;
        }
    }

    fn assign(&mut self, step: usize) -> bool {
        let Some(&e) = self.order.get(step) else {
            return true;
        };
        let (a, b) = (self.a, self.b);
        let edge = &a.edges()[e];
        for f in 0..b.edges().len() {
            if self.edge_used[f] || b.edges()[f].label != edge.label {
                continue;
            }
            let candidate = &b.edges()[f];
            let mark = self.trail.len();
            let fits = self.bind(edge.out, candidate.out)
                && edge
                    .inputs
                    .iter()
                    .zip(&candidate.inputs)
                    .all(|(&x, &y)| self.match_node(x, y));
            if fits {
                self.edge_used[f] = true;
                self.edge_map[e] = f;
                if self.assign(step + 1) {
                    return true;
                }
                self.edge_used[f] = false;
            }
            self.undo_to(mark);
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jungle::HyperEdge;

    fn f() -> Label {
        Label::new("F", 1)
    }

    #[test]
    fn reflexive_with_identity_witness() {
        let g = Hypergraph::prim(f()).par(&Hypergraph::prim(Label::new("G", 2)));
        let w = isomorphic(&g, &g).unwrap().unwrap();
        assert_eq!(w.inner, vec![0, 1]);
        assert_eq!(w.edges, vec![0, 1]);
    }

    #[test]
    fn label_mismatch() {
        let a = Hypergraph::prim(f());
        let b = Hypergraph::prim(Label::new("G", 1));
        assert_eq!(isomorphic(&a, &b).unwrap(), None);
    }

    #[test]
    fn identity_absorbed() {
        let a = Hypergraph::identity(1).seq(&Hypergraph::prim(f())).unwrap();
        let b = Hypergraph::prim(f());
        let w = isomorphic(&a, &b).unwrap().unwrap();
        assert!(w.verify(&a, &b));
    }

    #[test]
    fn renumbered_nodes_and_edges() {
        let g = Label::new("G", 2);
        let a = Hypergraph::new(
            1,
            1,
            2,
            vec![
                HyperEdge::new(f(), vec![NodeRef::Input(0)], 0),
                HyperEdge::new(g.clone(), vec![NodeRef::Inner(0), NodeRef::Input(0)], 1),
            ],
            vec![NodeRef::Inner(1)],
        )
        .unwrap();
        let b = Hypergraph::new(
            1,
            1,
            2,
            vec![
                HyperEdge::new(g, vec![NodeRef::Inner(1), NodeRef::Input(0)], 0),
                HyperEdge::new(f(), vec![NodeRef::Input(0)], 1),
            ],
            vec![NodeRef::Inner(0)],
        )
        .unwrap();
        let w = isomorphic(&a, &b).unwrap().unwrap();
        assert_eq!(w.inner, vec![1, 0]);
        assert_eq!(w.edges, vec![1, 0]);
    }

    #[test]
    fn garbage_counts() {
        let with_garbage = Hypergraph::prim(f()).seq(&Hypergraph::term(1)).unwrap();
        assert_eq!(isomorphic(&with_garbage, &Hypergraph::term(1)).unwrap(), None);
    }

    #[test]
    fn sharing_differs_from_duplication() {
        let shared = Hypergraph::prim(f()).seq(&Hypergraph::dup(1)).unwrap();
        let copied = Hypergraph::dup(1)
            .seq(&Hypergraph::prim(f()).par(&Hypergraph::prim(f())))
            .unwrap();
        assert_eq!(isomorphic(&shared, &copied).unwrap(), None);
    }

    #[test]
    fn size_limit() {
        let mut g = Hypergraph::identity(1);
        for _ in 0..13 {
            g = g.seq(&Hypergraph::prim(f())).unwrap();
        }
        assert_eq!(
            isomorphic(&g, &g),
            Err(IsoError::SizeLimit {
                inner_count: 13,
                limit: 12
            })
        );
        assert!(IsoChecker::new(20).check(&g, &g).unwrap().is_some());
    }

    #[test]
    fn bad_witness_rejected() {
        let g = Hypergraph::prim(f()).par(&Hypergraph::prim(Label::new("G", 1)));
        let w = IsoWitness {
            inner: vec![1, 0],
            edges: vec![1, 0],
        };
        assert!(!w.verify(&g, &g));
        let not_perm = IsoWitness {
            inner: vec![0, 0],
            edges: vec![0, 1],
        };
        assert!(!not_perm.verify(&g, &g));
    }
}
