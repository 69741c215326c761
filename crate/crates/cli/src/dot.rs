//! Graphviz output. Inputs sit on top as inverted triangles `i<k>`, edges
//! are boxes `e<k>`, inner nodes are points `n<j>` and outputs are
//! triangles `o<k>` ranked last.

use std::fmt::Write;

use termgraph::{Hypergraph, NodeRef};

fn node_id(node: &NodeRef) -> String {
    node.to_string()
}

pub fn to_dot(g: &Hypergraph) -> String {
    let mut out = String::from("digraph tg {\n  rankdir=TB;\n");
    out += "  node [fontname=\"Helvetica\"];\n";
    if g.input_arity() > 0 {
        out += "  { rank=source;";
        for i in 0..g.input_arity() {
            write!(out, " i{i} [shape=invtriangle, label=\"i{i}\"];").unwrap();
        }
        out += " }\n";
    }
    let mut drawn = vec![false; g.inner_count()];
    for (k, edge) in g.edges().iter().enumerate() {
        writeln!(out, "  e{k} [shape=box, label=\"{}\"];", edge.label.name()).unwrap();
        if !std::mem::replace(&mut drawn[edge.out], true) {
            writeln!(out, "  n{} [shape=point];", edge.out).unwrap();
        }
    }
    for (j, _) in drawn.iter().enumerate().filter(|(_, d)| !**d) {
        writeln!(out, "  n{j} [shape=point];").unwrap();
    }
    for (k, edge) in g.edges().iter().enumerate() {
        let ports = edge.inputs.len() > 1;
        for (p, input) in edge.inputs.iter().enumerate() {
            if ports {
                writeln!(out, "  {} -> e{k} [headlabel=\"{p}\"];", node_id(input)).unwrap();
            } else {
                writeln!(out, "  {} -> e{k};", node_id(input)).unwrap();
            }
        }
        writeln!(out, "  e{k} -> n{} [arrowhead=none];", edge.out).unwrap();
    }
    if g.output_arity() > 0 {
        out += "  { rank=sink;";
        for k in 0..g.output_arity() {
            write!(out, " o{k} [shape=triangle, label=\"o{k}\"];").unwrap();
        }
        out += " }\n";
    }
    for (k, node) in g.output().iter().enumerate() {
        writeln!(out, "  {} -> o{k};", node_id(node)).unwrap();
    }
    out += "}\n";
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use termgraph::Label;

    #[test]
    fn identity() {
        let dot = to_dot(&Hypergraph::identity(1));
        assert_eq!(dot.matches("invtriangle").count(), 1);
        assert_eq!(dot.matches("shape=triangle").count(), 1);
        assert!(!dot.contains("box"));
        assert!(dot.contains("i0 -> o0;"));
    }

    #[test]
    fn prim() {
        let dot = to_dot(&Hypergraph::prim(Label::new("G", 2)));
        assert!(dot.contains("e0 [shape=box, label=\"G\"];"));
        assert!(dot.contains("i1 -> e0 [headlabel=\"1\"];"));
        assert!(dot.contains("n0 -> o0;"));
        assert_eq!(dot, to_dot(&Hypergraph::prim(Label::new("G", 2))));
    }
}
