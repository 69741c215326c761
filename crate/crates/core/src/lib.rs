//! Term graphs as directed hypergraphs, typed code graphs, and let-based
//! term representations with explicit name binding.

pub mod codegraph;
pub mod jungle;
pub mod label;
pub mod laws;
pub mod nested;
pub mod seq;
pub mod world;

pub use codegraph::{CodeGraph, CodeGraphError, EdgeType, TypeId, TypedLabel, Violation};
pub use jungle::{GraphError, HyperEdge, Hypergraph, NodeRef, TermGraphView};
pub use label::Label;
pub use nested::NestedLet;
pub use seq::{Arg, LetError, LetSeq};
pub use world::{BindError, CEnv, Fresh, Link, LinkKind, LinkPath, Name, World};
