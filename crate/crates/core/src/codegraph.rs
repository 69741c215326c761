//! Typed code graphs.
//!
//! Nodes carry types and hyperedges may have several inputs and several
//! outputs. A code graph is well typed when every edge port and every graph
//! output holds a node of the type the label (respectively the interface)
//! demands. Construction only checks structure; [`CodeGraph::typecheck`]
//! reports type violations as data.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::jungle::{GraphError, HyperEdge, Hypergraph, NodeRef};
use crate::label::Label;

/// A node type. Types are plain symbols compared by name.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeId(Arc<str>);

impl TypeId {
    pub fn new(name: impl AsRef<str>) -> Self {
        Self(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for TypeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Input and output type vectors of an edge (or of a whole code graph).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct EdgeType {
    pub in_types: Vec<TypeId>,
    pub out_types: Vec<TypeId>,
}

impl EdgeType {
    pub fn new(in_types: Vec<TypeId>, out_types: Vec<TypeId>) -> Self {
        Self {
            in_types,
            out_types,
        }
    }

    pub fn in_arity(&self) -> usize {
        self.in_types.len()
    }

    pub fn out_arity(&self) -> usize {
        self.out_types.len()
    }
}

impl fmt::Display for EdgeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_types(f, &self.in_types)?;
        f.write_str(" -> ")?;
        write_types(f, &self.out_types)
    }
}

fn write_types(f: &mut fmt::Formatter<'_>, types: &[TypeId]) -> fmt::Result {
    f.write_str("[")?;
    for (k, ty) in types.iter().enumerate() {
        if k > 0 {
            f.write_str(",")?;
        }
        write!(f, "{ty}")?;
    }
    f.write_str("]")
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TypedLabel {
    name: Arc<str>,
    ty: EdgeType,
}

impl TypedLabel {
    pub fn new(name: impl AsRef<str>, ty: EdgeType) -> Self {
        Self {
            name: Arc::from(name.as_ref()),
            ty,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn edge_type(&self) -> &EdgeType {
        &self.ty
    }

    /// The untyped label with the same name and input arity.
    pub fn erase(&self) -> Label {
        Label::new(&*self.name, self.ty.in_arity())
    }
}

impl fmt::Display for TypedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.name, self.ty)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CgEdge {
    pub label: TypedLabel,
    pub inputs: Vec<NodeRef>,
    pub outputs: Vec<NodeRef>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum PortSide {
    Input,
    Output,
}

/// A port of a code graph: one end of an edge, or a graph output position.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Port {
    Edge {
        edge: usize,
        side: PortSide,
        port: usize,
    },
    GraphOutput {
        position: usize,
    },
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Port::Edge { edge, side, port } => {
                let side = match side {
                    PortSide::Input => "input",
                    PortSide::Output => "output",
                };
                write!(f, "edge {edge} {side} port {port}")
            }
            Port::GraphOutput { position } => write!(f, "graph output {position}"),
        }
    }
}

/// A port holding a node of the wrong type.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub port: Port,
    pub expected: TypeId,
    pub actual: TypeId,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, found {}", self.port, self.expected, self.actual)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum CodeGraphError {
    #[error("node {node} at {port} is out of range")]
    Range { port: Port, node: NodeRef },
    #[error("node {node} is out of range")]
    NodeRange { node: NodeRef },
    #[error("edge {edge} does not exist (graph has {count} edges)")]
    EdgeRange { edge: usize, count: usize },
    #[error("edge {edge} has {found} {side:?} ports but its label expects {expected}")]
    PortCount {
        edge: usize,
        side: PortSide,
        expected: usize,
        found: usize,
    },
    #[error("edge {edge} output port {port} targets input node {node}")]
    OutputNotInner { edge: usize, port: usize, node: NodeRef },
    #[error("graph declares {expected} outputs but lists {found}")]
    OutputLength { expected: usize, found: usize },
    #[error("interface mismatch at position {position}: {} vs {}", show(left), show(right))]
    InterfaceMismatch {
        position: usize,
        left: Option<TypeId>,
        right: Option<TypeId>,
    },
    #[error("edge {edge} has {outputs} outputs; only single-output edges erase to jungles")]
    MultiOutputEdge { edge: usize, outputs: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn show(ty: &Option<TypeId>) -> String {
    ty.as_ref().map_or_else(|| "nothing".to_owned(), ToString::to_string)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CodeGraph {
    in_types: Vec<TypeId>,
    out_types: Vec<TypeId>,
    inner_types: Vec<TypeId>,
    edges: Vec<CgEdge>,
    output: Vec<NodeRef>,
}

impl CodeGraph {
    /// Structural constructor: checks ranges and port counts, not types.
    pub fn new(
        in_types: Vec<TypeId>,
        out_types: Vec<TypeId>,
        inner_types: Vec<TypeId>,
        edges: Vec<CgEdge>,
        output: Vec<NodeRef>,
    ) -> Result<Self, CodeGraphError> {
        if output.len() != out_types.len() {
            return Err(CodeGraphError::OutputLength {
                expected: out_types.len(),
                found: output.len(),
            });
        }
        let graph = Self {
            in_types,
            out_types,
            inner_types,
            edges,
            output,
        };
        graph.check()?;
        Ok(graph)
    }

    fn in_range(&self, node: NodeRef) -> bool {
        match node {
            NodeRef::Input(i) => i < self.in_types.len(),
            NodeRef::Inner(j) => j < self.inner_types.len(),
        }
    }

    fn check(&self) -> Result<(), CodeGraphError> {
        for (e, edge) in self.edges.iter().enumerate() {
            let ty = edge.label.edge_type();
            for (side, nodes, expected) in [
                (PortSide::Input, &edge.inputs, ty.in_arity()),
                (PortSide::Output, &edge.outputs, ty.out_arity()),
            ] {
                if nodes.len() != expected {
                    return Err(CodeGraphError::PortCount {
                        edge: e,
                        side,
                        expected,
                        found: nodes.len(),
                    });
                }
                for (port, &node) in nodes.iter().enumerate() {
                    if !self.in_range(node) {
                        return Err(CodeGraphError::Range {
                            port: Port::Edge { edge: e, side, port },
                            node,
                        });
                    }
                }
            }
            if let Some((port, &node)) = edge
                .outputs
                .iter()
                .enumerate()
                .find(|(_, n)| matches!(n, NodeRef::Input(_)))
            {
                return Err(CodeGraphError::OutputNotInner { edge: e, port, node });
            }
        }
        for (position, &node) in self.output.iter().enumerate() {
            if !self.in_range(node) {
                return Err(CodeGraphError::Range {
                    port: Port::GraphOutput { position },
                    node,
                });
            }
        }
        Ok(())
    }

    /// One edge labelled `label`, with one inner node per label output.
    pub fn prim(label: TypedLabel) -> Self {
        let ty = label.edge_type().clone();
        let inputs = (0..ty.in_arity()).map(NodeRef::Input).collect();
        let outputs: Vec<_> = (0..ty.out_arity()).map(NodeRef::Inner).collect();
        Self {
            in_types: ty.in_types,
            out_types: ty.out_types.clone(),
            inner_types: ty.out_types,
            output: outputs.clone(),
            edges: vec![CgEdge {
                label,
                inputs,
                outputs,
            }],
        }
    }

    /// A typed wiring graph; output `k` is input `v[k]`.
    pub fn wire(in_types: Vec<TypeId>, v: &[usize]) -> Result<Self, CodeGraphError> {
        if let Some((position, &i)) = v.iter().enumerate().find(|(_, &i)| i >= in_types.len()) {
            return Err(CodeGraphError::Range {
                port: Port::GraphOutput { position },
                node: NodeRef::Input(i),
            });
        }
        Ok(Self {
            out_types: v.iter().map(|&i| in_types[i].clone()).collect(),
            in_types,
            inner_types: Vec::new(),
            edges: Vec::new(),
            output: v.iter().map(|&i| NodeRef::Input(i)).collect(),
        })
    }

    /// Sequential composition. Interfaces must agree position by position.
    pub fn seq(&self, next: &CodeGraph) -> Result<Self, CodeGraphError> {
        let len = self.out_types.len().max(next.in_types.len());
        for position in 0..len {
            let left = self.out_types.get(position);
            let right = next.in_types.get(position);
            if left != right {
                return Err(CodeGraphError::InterfaceMismatch {
                    position,
                    left: left.cloned(),
                    right: right.cloned(),
                });
            }
        }
        let offset = self.inner_types.len();
        let transport = |node: NodeRef| match node {
            NodeRef::Input(i) => self.output[i],
            NodeRef::Inner(j) => NodeRef::Inner(offset + j),
        };
        Ok(Self {
            in_types: self.in_types.clone(),
            out_types: next.out_types.clone(),
            inner_types: concat(&self.inner_types, &next.inner_types),
            edges: self.union_edges(next, transport),
            output: next.output.iter().map(|&r| transport(r)).collect(),
        })
    }

    /// Parallel composition; the inputs of `other` come after ours.
    pub fn par(&self, other: &CodeGraph) -> Self {
        let offset = self.inner_types.len();
        let shift = self.in_types.len();
        let transport = |node: NodeRef| match node {
            NodeRef::Input(i) => NodeRef::Input(shift + i),
            NodeRef::Inner(j) => NodeRef::Inner(offset + j),
        };
        Self {
            in_types: concat(&self.in_types, &other.in_types),
            out_types: concat(&self.out_types, &other.out_types),
            inner_types: concat(&self.inner_types, &other.inner_types),
            edges: self.union_edges(other, transport),
            output: self
                .output
                .iter()
                .copied()
                .chain(other.output.iter().map(|&r| transport(r)))
                .collect(),
        }
    }

    fn union_edges(&self, other: &CodeGraph, transport: impl Fn(NodeRef) -> NodeRef) -> Vec<CgEdge> {
        self.edges
            .iter()
            .cloned()
            .chain(other.edges.iter().map(|edge| CgEdge {
                label: edge.label.clone(),
                inputs: edge.inputs.iter().map(|&r| transport(r)).collect(),
                outputs: edge.outputs.iter().map(|&r| transport(r)).collect(),
            }))
            .collect()
    }

    pub fn in_types(&self) -> &[TypeId] {
        &self.in_types
    }

    pub fn out_types(&self) -> &[TypeId] {
        &self.out_types
    }

    pub fn inner_types(&self) -> &[TypeId] {
        &self.inner_types
    }

    pub fn edges(&self) -> &[CgEdge] {
        &self.edges
    }

    pub fn output(&self) -> &[NodeRef] {
        &self.output
    }

    /// The whole graph seen as a generalised hyperedge.
    pub fn cg_type(&self) -> EdgeType {
        EdgeType::new(self.in_types.clone(), self.out_types.clone())
    }

    pub fn n_type(&self, node: NodeRef) -> Result<&TypeId, CodeGraphError> {
        match node {
            NodeRef::Input(i) => self.in_types.get(i),
            NodeRef::Inner(j) => self.inner_types.get(j),
        }
        .ok_or(CodeGraphError::NodeRange { node })
    }

    fn edge(&self, e: usize) -> Result<&CgEdge, CodeGraphError> {
        self.edges.get(e).ok_or(CodeGraphError::EdgeRange {
            edge: e,
            count: self.edges.len(),
        })
    }

    pub fn e_label(&self, e: usize) -> Result<&TypedLabel, CodeGraphError> {
        Ok(&self.edge(e)?.label)
    }

    /// Input arity and input nodes of edge `e`, without type information.
    pub fn e_in(&self, e: usize) -> Result<(usize, &[NodeRef]), CodeGraphError> {
        let edge = self.edge(e)?;
        Ok((edge.inputs.len(), &edge.inputs))
    }

    /// All type violations, in edge order followed by graph outputs.
    pub fn typecheck(&self) -> Vec<Violation> {
        let mut violations = Vec::new();
        let mut expect = |port: Port, node: NodeRef, expected: &TypeId| {
            let actual = self.n_type(node).expect("validated at construction");
            if actual != expected {
                violations.push(Violation {
                    port,
                    expected: expected.clone(),
                    actual: actual.clone(),
                });
            }
        };
        for (e, edge) in self.edges.iter().enumerate() {
            let ty = edge.label.edge_type();
            for (side, nodes, types) in [
                (PortSide::Input, &edge.inputs, &ty.in_types),
                (PortSide::Output, &edge.outputs, &ty.out_types),
            ] {
                for (port, (&node, expected)) in nodes.iter().zip(types).enumerate() {
                    expect(Port::Edge { edge: e, side, port }, node, expected);
                }
            }
        }
        for (position, (&node, expected)) in self.output.iter().zip(&self.out_types).enumerate() {
            expect(Port::GraphOutput { position }, node, expected);
        }
        violations
    }

    fn production_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.inner_types.len()];
        for node in self.edges.iter().flat_map(|e| &e.outputs) {
            if let NodeRef::Inner(j) = *node {
                counts[j] += 1;
            }
        }
        counts
    }

    /// True iff every inner node is produced by some edge.
    pub fn all_produced(&self) -> bool {
        self.production_counts().iter().all(|&c| c > 0)
    }

    /// True iff every inner node is produced by exactly one edge port.
    pub fn produced_once(&self) -> bool {
        self.production_counts().iter().all(|&c| c == 1)
    }

    /// Forget all types. Every edge must have exactly one output.
    pub fn erase_to_jungle(&self) -> Result<Hypergraph, CodeGraphError> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for (e, edge) in self.edges.iter().enumerate() {
            let out = match edge.outputs.as_slice() {
                [NodeRef::Inner(j)] => *j,
                _ => {
                    return Err(CodeGraphError::MultiOutputEdge {
                        edge: e,
                        outputs: edge.outputs.len(),
                    })
                }
            };
            edges.push(HyperEdge::new(edge.label.erase(), edge.inputs.clone(), out));
        }
        Ok(Hypergraph::new(
            self.in_types.len(),
            self.out_types.len(),
            self.inner_types.len(),
            edges,
            self.output.clone(),
        )?)
    }

    /// A copy with the type of inner node `j` replaced.
    pub fn with_inner_type(&self, j: usize, ty: TypeId) -> Result<Self, CodeGraphError> {
        let mut graph = self.clone();
        *graph
            .inner_types
            .get_mut(j)
            .ok_or(CodeGraphError::NodeRange { node: NodeRef::Inner(j) })? = ty;
        Ok(graph)
    }

    /// A copy in which `port` demands type `ty`: either one position of the
    /// edge label's type, or one position of the graph's output interface.
    pub fn with_port_type(&self, port: Port, ty: TypeId) -> Result<Self, CodeGraphError> {
        let mut graph = self.clone();
        match port {
            Port::Edge { edge, side, port } => {
                let count = graph.edges.len();
                let label = &mut graph
                    .edges
                    .get_mut(edge)
                    .ok_or(CodeGraphError::EdgeRange { edge, count })?
                    .label;
                let types = match side {
                    PortSide::Input => &mut label.ty.in_types,
                    PortSide::Output => &mut label.ty.out_types,
                };
                let found = types.len();
                *types.get_mut(port).ok_or(CodeGraphError::PortCount {
                    edge,
                    side,
                    expected: port + 1,
                    found,
                })? = ty;
            }
            Port::GraphOutput { position } => {
                let found = graph.out_types.len();
                *graph.out_types.get_mut(position).ok_or(CodeGraphError::OutputLength {
                    expected: position + 1,
                    found,
                })? = ty;
            }
        }
        Ok(graph)
    }

    /// Every port of the graph, in the order [`CodeGraph::typecheck`] visits them.
    pub fn ports(&self) -> Vec<Port> {
        let mut ports = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            ports.extend((0..edge.inputs.len()).map(|port| Port::Edge {
                edge: e,
                side: PortSide::Input,
                port,
            }));
            ports.extend((0..edge.outputs.len()).map(|port| Port::Edge {
                edge: e,
                side: PortSide::Output,
                port,
            }));
        }
        ports.extend((0..self.output.len()).map(|position| Port::GraphOutput { position }));
        ports
    }
}

fn concat(a: &[TypeId], b: &[TypeId]) -> Vec<TypeId> {
    a.iter().chain(b).cloned().collect()
}
