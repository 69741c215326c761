//! Seeded generators for fuzzing.
//!
//! Everything here is deterministic in the seed (or in the state of the
//! generator passed in). Graphs are built in topological order, so every
//! generated jungle is acyclic; inner nodes and edges are then renumbered at
//! random so that tests do not only ever see canonical numberings.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codegraph::{CodeGraph, EdgeType, TypeId, TypedLabel};
use crate::jungle::{HyperEdge, Hypergraph, NodeRef};
use crate::label::Label;
use crate::seq::{Arg, LetSeq};
use crate::world::Fresh;

/// `C/0`, `F/1`, `G/1`, `H/2`, `K/3`.
pub fn default_labels() -> Vec<Label> {
    vec![
        Label::new("C", 0),
        Label::new("F", 1),
        Label::new("G", 1),
        Label::new("H", 2),
        Label::new("K", 3),
    ]
}

/// A random jungle with input and output arities of at most `max_arity`.
pub fn random_jungle(seed: u64, max_inner: usize, max_arity: usize, labels: &[Label]) -> Hypergraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inputs = rng.random_range(0..=max_arity);
    let mut outputs = rng.random_range(0..=max_arity);
    if inputs == 0 && (max_inner == 0 || !labels.iter().any(|l| l.arity() == 0)) {
        outputs = 0;
    }
    random_jungle_with(&mut rng, inputs, outputs, max_inner, labels)
}

/// A random acyclic jungle `inputs → outputs` with at most `max_inner`
/// inner nodes.
///
/// # Panics
///
/// If `inputs == 0 < outputs` and no node can be created, i.e. `max_inner`
/// is zero or `labels` has no nullary label.
pub fn random_jungle_with<R: Rng + ?Sized>(
    rng: &mut R,
    inputs: usize,
    outputs: usize,
    max_inner: usize,
    labels: &[Label],
) -> Hypergraph {
    let target = rng.random_range(0..=max_inner);
    let mut edges: Vec<HyperEdge> = Vec::new();
    let pick_node = |rng: &mut R, produced: usize| {
        let k = rng.random_range(0..inputs + produced);
        if k < inputs {
            NodeRef::Input(k)
        } else {
            NodeRef::Inner(k - inputs)
        }
    };
    let add_edge = |rng: &mut R, edges: &mut Vec<HyperEdge>| {
        let available = inputs + edges.len();
        let usable: Vec<&Label> = labels.iter().filter(|l| l.arity() == 0 || available > 0).collect();
        let Some(&label) = usable.choose(rng) else {
            return false;
        };
        let args = (0..label.arity()).map(|_| pick_node(rng, edges.len())).collect();
        let out = edges.len();
        edges.push(HyperEdge::new(label.clone(), args, out));
        true
    };
    for _ in 0..target {
        if !add_edge(rng, &mut edges) {
            break;
        }
    }
    if inputs == 0 && edges.is_empty() && outputs > 0 {
        assert!(
            max_inner > 0 && add_edge(rng, &mut edges),
            "cannot build a 0 -> {outputs} graph without inner nodes"
        );
    }
    let output: Vec<NodeRef> = (0..outputs).map(|_| pick_node(rng, edges.len())).collect();

    let mut perm: Vec<usize> = (0..edges.len()).collect();
    perm.shuffle(rng);
    let rename = |node: NodeRef| match node {
        NodeRef::Inner(j) => NodeRef::Inner(perm[j]),
        input => input,
    };
    let mut edges: Vec<HyperEdge> = edges
        .into_iter()
        .map(|e| HyperEdge::new(e.label, e.inputs.into_iter().map(rename).collect(), perm[e.out]))
        .collect();
    edges.shuffle(rng);
    let output = output.into_iter().map(rename).collect();
    Hypergraph::new(inputs, outputs, edges.len(), edges, output).expect("generated graph is valid")
}

/// A random closed sequential-let graph over the empty world with strong
/// links and at most `max_lets` declarations.
pub fn random_let_seq<R: Rng + ?Sized>(
    rng: &mut R,
    inputs: usize,
    outputs: usize,
    max_lets: usize,
    labels: &[Label],
) -> LetSeq {
    let count = rng.random_range(0..=max_lets);
    let mut fresh = Fresh::empty();
    let mut decls = Vec::new();
    let pick_arg = |rng: &mut R, bound: usize| {
        let k = rng.random_range(0..inputs + bound);
        if k < inputs {
            ArgSlot::Input(k)
        } else {
            ArgSlot::Slot(k - inputs)
        }
    };
    for _ in 0..count {
        let available = inputs + decls.len();
        let usable: Vec<&Label> = labels.iter().filter(|l| l.arity() == 0 || available > 0).collect();
        let Some(&label) = usable.choose(rng) else {
            break;
        };
        let args: Vec<ArgSlot> = (0..label.arity()).map(|_| pick_arg(rng, decls.len())).collect();
        let (link, next) = fresh.extend();
        fresh = next;
        decls.push((link, label.clone(), args));
    }
    if inputs == 0 && decls.is_empty() && outputs > 0 {
        let label = labels
            .iter()
            .find(|l| l.arity() == 0)
            .expect("a nullary label is needed for graphs without inputs");
        let (link, _) = fresh.extend();
        decls.push((link, label.clone(), Vec::new()));
    }
    let outs: Vec<ArgSlot> = (0..outputs).map(|_| pick_arg(rng, decls.len())).collect();

    let resolve = |slots: &[ArgSlot], world: &crate::world::World| -> Vec<Arg> {
        slots
            .iter()
            .map(|s| match *s {
                ArgSlot::Input(i) => Arg::Input(i),
                ArgSlot::Slot(k) => Arg::V(world.name(k).expect("bound slot")),
            })
            .collect()
    };
    let final_world = decls
        .last()
        .map_or_else(crate::world::World::empty, |(link, _, _)| link.to().clone());
    let mut graph = LetSeq::output(final_world.clone(), inputs, resolve(&outs, &final_world))
        .expect("generated output is valid");
    for (link, label, args) in decls.into_iter().rev() {
        let args = resolve(&args, link.from());
        graph = LetSeq::bind(link, label, args, graph).expect("generated let is valid");
    }
    graph
}

#[derive(Clone, Copy)]
enum ArgSlot {
    Input(usize),
    Slot(usize),
}

/// `int`, `float`, `bool`.
pub fn default_types() -> Vec<TypeId> {
    ["int", "float", "bool"].into_iter().map(TypeId::new).collect()
}

/// A random composite of typed primitives and wirings over `in_types`,
/// built only from [`CodeGraph::prim`], [`CodeGraph::wire`],
/// [`CodeGraph::seq`] and [`CodeGraph::par`].
pub fn random_code_graph<R: Rng + ?Sized>(
    rng: &mut R,
    in_types: &[TypeId],
    depth: usize,
    types: &[TypeId],
) -> CodeGraph {
    let random_types = |rng: &mut R, len: usize| -> Vec<TypeId> {
        (0..len).map(|_| types.choose(rng).expect("types").clone()).collect()
    };
    let random_wire = |rng: &mut R, len: usize| -> CodeGraph {
        let v: Vec<usize> = if in_types.is_empty() {
            Vec::new()
        } else {
            (0..len).map(|_| rng.random_range(0..in_types.len())).collect()
        };
        CodeGraph::wire(in_types.to_vec(), &v).expect("indices in range")
    };
    if depth == 0 {
        let len = rng.random_range(0..=3);
        return random_wire(rng, len);
    }
    match rng.random_range(0..4) {
        0 => {
            let len = rng.random_range(0..=3);
            random_wire(rng, len)
        }
        1 | 2 => {
            // select the label's arguments with a wiring, apply it, continue
            let arity = if in_types.is_empty() { 0 } else { rng.random_range(0..=3) };
            let select = random_wire(rng, arity);
            let outs = rng.random_range(1..=3);
            let name = format!("op{}", rng.random_range(0..4));
            let label = TypedLabel::new(name, EdgeType::new(select.out_types().to_vec(), random_types(rng, outs)));
            let applied = select.seq(&CodeGraph::prim(label)).expect("wiring matches label");
            let rest = random_code_graph(rng, applied.out_types(), depth - 1, types);
            applied.seq(&rest).expect("continuation built over our outputs")
        }
        _ => {
            let split = rng.random_range(0..=in_types.len());
            let left = random_code_graph(rng, &in_types[..split], depth - 1, types);
            let right = random_code_graph(rng, &in_types[split..], depth - 1, types);
            left.par(&right)
        }
    }
}
