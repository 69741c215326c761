//! Directed hypergraphs with one output node per hyperedge.
//!
//! A [`Hypergraph`] with `m` inputs and `n` outputs is a morphism `m → n`.
//! Input positions are not nodes that edges can produce; every node an edge
//! produces is an *inner* node. Node and edge sets are dense index ranges,
//! so disjoint unions in the compositions below become index offsets: the
//! left operand keeps its indices and the right operand is shifted.
//!
//! When the map from edges to their output node is a bijection the graph is
//! a *jungle* (see [`Hypergraph::is_jungle`]). The compositions accept any
//! hypergraph, but only preserve the jungle property when both operands
//! have it.

use std::fmt;

use thiserror::Error;

use crate::label::Label;

/// A node of a hypergraph: an input position or an inner node.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum NodeRef {
    Input(usize),
    Inner(usize),
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::Input(i) => write!(f, "i{i}"),
            NodeRef::Inner(j) => write!(f, "n{j}"),
        }
    }
}

/// A labelled hyperedge reading `inputs` and producing the inner node `out`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HyperEdge {
    pub label: Label,
    pub inputs: Vec<NodeRef>,
    pub out: usize,
}

impl HyperEdge {
    pub fn new(label: Label, inputs: Vec<NodeRef>, out: usize) -> Self {
        Self { label, inputs, out }
    }
}

/// Where an offending node reference sits inside a graph.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Site {
    EdgeInput { edge: usize, port: usize },
    EdgeOutput { edge: usize },
    Output { position: usize },
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Site::EdgeInput { edge, port } => write!(f, "input {port} of edge {edge}"),
            Site::EdgeOutput { edge } => write!(f, "output of edge {edge}"),
            Site::Output { position } => write!(f, "graph output {position}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum GraphError {
    #[error("node {node} at {site} is out of range")]
    Range { site: Site, node: NodeRef },
    #[error("edge {edge} has {found} inputs but label {label} expects {}", label.arity())]
    Arity {
        edge: usize,
        label: Label,
        found: usize,
    },
    #[error("graph declares {expected} outputs but lists {found}")]
    OutputLength { expected: usize, found: usize },
    #[error("cannot compose a graph with {left_outputs} outputs before one with {right_inputs} inputs")]
    InterfaceMismatch {
        left_outputs: usize,
        right_inputs: usize,
    },
    #[error("graph is not a jungle: edges do not biject with inner nodes")]
    NotAJungle,
}

/// A directed hypergraph `m → n` whose edges each have a single output.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Hypergraph {
    inputs: usize,
    inner_count: usize,
    edges: Vec<HyperEdge>,
    output: Vec<NodeRef>,
}

impl Hypergraph {
    /// Validating constructor. `outputs` is the declared output arity and
    /// must match the length of `output`.
    pub fn new(
        inputs: usize,
        outputs: usize,
        inner_count: usize,
        edges: Vec<HyperEdge>,
        output: Vec<NodeRef>,
    ) -> Result<Self, GraphError> {
        if output.len() != outputs {
            return Err(GraphError::OutputLength {
                expected: outputs,
                found: output.len(),
            });
        }
        let graph = Self {
            inputs,
            inner_count,
            edges,
            output,
        };
        graph.check()?;
        Ok(graph)
    }

    fn check(&self) -> Result<(), GraphError> {
        let in_range = |node: NodeRef| match node {
            NodeRef::Input(i) => i < self.inputs,
            NodeRef::Inner(j) => j < self.inner_count,
        };
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.inputs.len() != edge.label.arity() {
                return Err(GraphError::Arity {
                    edge: e,
                    label: edge.label.clone(),
                    found: edge.inputs.len(),
                });
            }
            for (port, &node) in edge.inputs.iter().enumerate() {
                if !in_range(node) {
                    return Err(GraphError::Range {
                        site: Site::EdgeInput { edge: e, port },
                        node,
                    });
                }
            }
            if edge.out >= self.inner_count {
                return Err(GraphError::Range {
                    site: Site::EdgeOutput { edge: e },
                    node: NodeRef::Inner(edge.out),
                });
            }
        }
        for (position, &node) in self.output.iter().enumerate() {
            if !in_range(node) {
                return Err(GraphError::Range {
                    site: Site::Output { position },
                    node,
                });
            }
        }
        Ok(())
    }

    /// The graph `0 → 0` with no nodes.
    pub fn empty() -> Self {
        Self::wiring(0, Vec::new())
    }

    pub fn input_arity(&self) -> usize {
        self.inputs
    }

    pub fn output_arity(&self) -> usize {
        self.output.len()
    }

    pub fn inner_count(&self) -> usize {
        self.inner_count
    }

    pub fn edges(&self) -> &[HyperEdge] {
        &self.edges
    }

    pub fn output(&self) -> &[NodeRef] {
        &self.output
    }

    /// The input node vector `[i0, …, i(m-1)]`. Derived, never stored.
    pub fn input_nodes(&self) -> Vec<NodeRef> {
        (0..self.inputs).map(NodeRef::Input).collect()
    }

    /// For each inner node, the indices of the edges producing it.
    pub fn producers(&self) -> Vec<Vec<usize>> {
        let mut producers = vec![Vec::new(); self.inner_count];
        for (e, edge) in self.edges.iter().enumerate() {
            producers[edge.out].push(e);
        }
        producers
    }

    /// True iff every inner node is produced by exactly one edge, i.e. there
    /// are neither undefined nodes nor join nodes.
    pub fn is_jungle(&self) -> bool {
        self.edges.len() == self.inner_count && self.producers().iter().all(|p| p.len() == 1)
    }

    /// True iff no inner node depends, through its producing edges, on itself.
    pub fn is_acyclic(&self) -> bool {
        // dependency edges: produced node -> inner nodes read by the producer
        let mut deps = vec![Vec::new(); self.inner_count];
        for edge in &self.edges {
            for node in &edge.inputs {
                if let NodeRef::Inner(j) = *node {
                    deps[edge.out].push(j);
                }
            }
        }
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Active,
            Done,
        }
        let mut marks = vec![Mark::New; self.inner_count];
        for root in 0..self.inner_count {
            if marks[root] != Mark::New {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            marks[root] = Mark::Active;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if let Some(&dep) = deps[node].get(*next) {
                    *next += 1;
                    match marks[dep] {
                        Mark::Active => return false,
                        Mark::New => {
                            marks[dep] = Mark::Active;
                            stack.push((dep, 0));
                        }
                        Mark::Done => {}
                    }
                } else {
                    marks[node] = Mark::Done;
                    stack.pop();
                }
            }
        }
        true
    }

    /// A single hyperedge labelled `label`, reading all inputs in order.
    pub fn prim(label: Label) -> Self {
        let k = label.arity();
        Self {
            inputs: k,
            inner_count: 1,
            edges: vec![HyperEdge::new(label, (0..k).map(NodeRef::Input).collect(), 0)],
            output: vec![NodeRef::Inner(0)],
        }
    }

    /// A wiring graph `m → |v|` whose outputs are the input positions `v`.
    pub fn wire(inputs: usize, v: &[usize]) -> Result<Self, GraphError> {
        if let Some((position, &i)) = v.iter().enumerate().find(|(_, &i)| i >= inputs) {
            return Err(GraphError::Range {
                site: Site::Output { position },
                node: NodeRef::Input(i),
            });
        }
        Ok(Self::wiring(inputs, v.to_vec()))
    }

    fn wiring(inputs: usize, v: Vec<usize>) -> Self {
        Self {
            inputs,
            inner_count: 0,
            edges: Vec::new(),
            output: v.into_iter().map(NodeRef::Input).collect(),
        }
    }

    /// `id_m`
    pub fn identity(m: usize) -> Self {
        Self::wiring(m, (0..m).collect())
    }

    /// The duplicator `∇_m : m → m + m`.
    pub fn dup(m: usize) -> Self {
        Self::wiring(m, (0..m).chain(0..m).collect())
    }

    /// The terminator `!_m : m → 0`.
    pub fn term(m: usize) -> Self {
        Self::wiring(m, Vec::new())
    }

    /// The exchange `X_{m,n} : m + n → n + m`.
    pub fn exch(m: usize, n: usize) -> Self {
        Self::wiring(m + n, (m..m + n).chain(0..m).collect())
    }

    /// Sequential composition `self ⨾ next`: the outputs of `self` are glued
    /// to the inputs of `next`.
    pub fn seq(&self, next: &Hypergraph) -> Result<Self, GraphError> {
        if self.output_arity() != next.inputs {
            return Err(GraphError::InterfaceMismatch {
                left_outputs: self.output_arity(),
                right_inputs: next.inputs,
            });
        }
        let offset = self.inner_count;
        let transport = |node: NodeRef| match node {
            NodeRef::Input(i) => self.output[i],
            NodeRef::Inner(j) => NodeRef::Inner(offset + j),
        };
        Ok(Self {
            inputs: self.inputs,
            inner_count: self.inner_count + next.inner_count,
            edges: self.union_edges(next, transport),
            output: next.output.iter().map(|&r| transport(r)).collect(),
        })
    }

    /// Parallel composition `self ⊗ other : m1 + m2 → n1 + n2`.
    pub fn par(&self, other: &Hypergraph) -> Self {
        let offset = self.inner_count;
        let shift = self.inputs;
        let transport = |node: NodeRef| match node {
            NodeRef::Input(i) => NodeRef::Input(shift + i),
            NodeRef::Inner(j) => NodeRef::Inner(offset + j),
        };
        Self {
            inputs: self.inputs + other.inputs,
            inner_count: self.inner_count + other.inner_count,
            edges: self.union_edges(other, transport),
            output: self
                .output
                .iter()
                .copied()
                .chain(other.output.iter().map(|&r| transport(r)))
                .collect(),
        }
    }

    /// Edges of `self` unchanged, followed by the edges of `other` with their
    /// nodes transported and their outputs shifted past our inner nodes.
    fn union_edges(&self, other: &Hypergraph, transport: impl Fn(NodeRef) -> NodeRef) -> Vec<HyperEdge> {
        let offset = self.inner_count;
        self.edges
            .iter()
            .cloned()
            .chain(other.edges.iter().map(|edge| HyperEdge {
                label: edge.label.clone(),
                inputs: edge.inputs.iter().map(|&r| transport(r)).collect(),
                out: offset + edge.out,
            }))
            .collect()
    }

    /// The conventional term graph view, with labels and arguments attached
    /// directly to inner nodes.
    pub fn to_view(&self) -> Result<TermGraphView, GraphError> {
        if !self.is_jungle() {
            return Err(GraphError::NotAJungle);
        }
        let mut nodes = vec![None; self.inner_count];
        for edge in &self.edges {
            nodes[edge.out] = Some((edge.label.clone(), edge.inputs.clone()));
        }
        Ok(TermGraphView {
            inputs: self.inputs,
            nodes: nodes.into_iter().map(|n| n.expect("jungle")).collect(),
            output: self.output.clone(),
        })
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {{", self.inputs, self.output_arity())?;
        for edge in &self.edges {
            write!(f, " n{} = {}(", edge.out, edge.label.name())?;
            for (k, node) in edge.inputs.iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{node}")?;
            }
            f.write_str(");")?;
        }
        f.write_str(" out [")?;
        for (k, node) in self.output.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{node}")?;
        }
        f.write_str("] }")
    }
}

/// A term graph with labels and arguments on the inner nodes themselves.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TermGraphView {
    inputs: usize,
    nodes: Vec<(Label, Vec<NodeRef>)>,
    output: Vec<NodeRef>,
}

impl TermGraphView {
    pub fn new(
        inputs: usize,
        nodes: Vec<(Label, Vec<NodeRef>)>,
        output: Vec<NodeRef>,
    ) -> Result<Self, GraphError> {
        let view = Self {
            inputs,
            nodes,
            output,
        };
        view.to_graph_unchecked().check()?;
        Ok(view)
    }

    pub fn input_arity(&self) -> usize {
        self.inputs
    }

    pub fn nodes(&self) -> &[(Label, Vec<NodeRef>)] {
        &self.nodes
    }

    pub fn output(&self) -> &[NodeRef] {
        &self.output
    }

    /// The jungle whose edge `j` produces inner node `j`.
    pub fn to_graph(&self) -> Hypergraph {
        self.to_graph_unchecked()
    }

    fn to_graph_unchecked(&self) -> Hypergraph {
        Hypergraph {
            inputs: self.inputs,
            inner_count: self.nodes.len(),
            edges: self
                .nodes
                .iter()
                .enumerate()
                .map(|(j, (label, args))| HyperEdge::new(label.clone(), args.clone(), j))
                .collect(),
            output: self.output.clone(),
        }
    }
}
