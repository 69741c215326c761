//! From parsed programs to let sequences, jungles and code graphs.
//!
//! Untyped elaboration binds each `let` with a weak link, so a repeated
//! name shadows the earlier one, then strengthens the whole sequence to
//! fresh names before converting it to a jungle.

use std::collections::BTreeMap;

use termgraph::codegraph::CgEdge;
use termgraph::world::extend_weak;
use termgraph::{Arg, CEnv, CodeGraph, Fresh, Hypergraph, Label, LetSeq, NodeRef, TypeId, TypedLabel, World};
use thiserror::Error;

use crate::syntax::{Inputs, LabelDecl, Located, Operand, Pos, Program, Sig};

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum ElabErrorKind {
    #[error("label `{0}` is not declared")]
    UnknownLabel(String),
    #[error("label `{name}` is already declared at {previous}")]
    DuplicateLabel { name: String, previous: Pos },
    #[error("`{0}` is used before it is defined")]
    Scope(String),
    #[error("input i{index} out of range for {inputs} inputs")]
    InputRange { index: usize, inputs: usize },
    #[error("label `{label}` has arity {expected} but is applied to {found} arguments")]
    Arity { label: String, expected: usize, found: usize },
    #[error("label `{label}` has {expected} outputs, but {found} names are bound")]
    OutputCount { label: String, expected: usize, found: usize },
    #[error("label `{0}` has no type; typed programs need `label NAME : [..] -> [..]`")]
    UntypedLabel(String),
    #[error("typed programs need `inputs [T, ...]`")]
    UntypedInputs,
    #[error("{found} output types given for {expected} outputs")]
    OutputTypes { expected: usize, found: usize },
    #[error("{0}")]
    Internal(String),
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
#[error("{pos}: {kind}")]
pub struct ElabError {
    pub pos: Pos,
    pub kind: ElabErrorKind,
}

fn fail<T>(pos: Pos, kind: ElabErrorKind) -> Result<T, ElabError> {
    Err(ElabError { pos, kind })
}

#[derive(Clone, Debug)]
pub struct Elaborated {
    /// As written, one weak link per `let`.
    pub weak: LetSeq,
    pub strong: LetSeq,
    pub jungle: Hypergraph,
}

/// Collect declarations; `extra` signatures come first, so a program may
/// not redeclare them.
pub fn signatures<'a>(
    extra: &'a [LabelDecl],
    program: &'a [LabelDecl],
) -> Result<BTreeMap<&'a str, &'a LabelDecl>, ElabError> {
    let mut sigs: BTreeMap<&str, &LabelDecl> = BTreeMap::new();
    for decl in extra.iter().chain(program) {
        if let Some(prev) = sigs.insert(&decl.name, decl) {
            return fail(decl.pos, ElabErrorKind::DuplicateLabel { name: decl.name.clone(), previous: prev.pos });
        }
    }
    Ok(sigs)
}

fn untyped_label(decl: &LabelDecl) -> Result<Label, ElabErrorKind> {
    match &decl.sig {
        Sig::Arity(k) => Ok(Label::new(&decl.name, *k)),
        Sig::Typed(ty) if ty.out_arity() == 1 => Ok(TypedLabel::new(&decl.name, ty.clone()).erase()),
        Sig::Typed(ty) => {
            Err(ElabErrorKind::OutputCount { label: decl.name.clone(), expected: ty.out_arity(), found: 1 })
        }
    }
}

pub fn elaborate(program: &Program, extra: &[LabelDecl]) -> Result<Elaborated, ElabError> {
    let sigs = signatures(extra, &program.labels)?;
    let inputs = program.inputs.value.arity();
    let mut world = World::empty();
    let mut decls = Vec::new();
    for decl in &program.lets {
        let Some(sig) = sigs.get(decl.label.value.as_str()) else {
            return fail(decl.label.pos, ElabErrorKind::UnknownLabel(decl.label.value.clone()));
        };
        let label = untyped_label(sig).map_err(|kind| ElabError { pos: decl.pos, kind })?;
        if decl.names.len() != 1 {
            return fail(
                decl.names[1].pos,
                ElabErrorKind::OutputCount { label: label.name().to_owned(), expected: 1, found: decl.names.len() },
            );
        }
        if decl.args.len() != label.arity() {
            return fail(
                decl.label.pos,
                ElabErrorKind::Arity { label: label.name().to_owned(), expected: label.arity(), found: decl.args.len() },
            );
        }
        let args = decl.args.iter().map(|a| resolve(&world, inputs, a)).collect::<Result<Vec<_>, _>>()?;
        let link = extend_weak(&world, &decl.names[0].value);
        world = link.to().clone();
        decls.push((link, label, args));
    }
    let outs = program.outputs.iter().map(|a| resolve(&world, inputs, a)).collect::<Result<Vec<_>, _>>()?;
    let internal = |e: termgraph::LetError| ElabError { pos: program.outputs_pos, kind: ElabErrorKind::Internal(e.to_string()) };

    let mut weak = LetSeq::output(world, inputs, outs).map_err(internal)?;
    for (link, label, args) in decls.into_iter().rev() {
        weak = LetSeq::bind(link, label, args, weak).map_err(internal)?;
    }
    let strong = LetSeq::strengthen(&Fresh::empty(), &CEnv::new(World::empty()), &weak).map_err(internal)?;
    let jungle = strong.to_jungle().map_err(internal)?;
    Ok(Elaborated { weak, strong, jungle })
}

fn resolve(world: &World, inputs: usize, arg: &Located<Operand>) -> Result<Arg, ElabError> {
    match &arg.value {
        Operand::Input(i) if *i < inputs => Ok(Arg::Input(*i)),
        Operand::Input(i) => fail(arg.pos, ElabErrorKind::InputRange { index: *i, inputs }),
        Operand::Name(n) => match world.resolve(n) {
            Some(name) => Ok(Arg::V(name)),
            None => fail(arg.pos, ElabErrorKind::Scope(n.clone())),
        },
    }
}

/// Build the code graph of a typed program. Type mismatches are not errors
/// here; they are reported by [`CodeGraph::typecheck`].
pub fn elaborate_typed(program: &Program, extra: &[LabelDecl]) -> Result<CodeGraph, ElabError> {
    let sigs = signatures(extra, &program.labels)?;
    let Inputs::Typed(in_types) = &program.inputs.value else {
        return fail(program.inputs.pos, ElabErrorKind::UntypedInputs);
    };
    let mut scope: BTreeMap<&str, NodeRef> = BTreeMap::new();
    let mut inner_types: Vec<TypeId> = Vec::new();
    let mut edges = Vec::new();
    let node = |scope: &BTreeMap<&str, NodeRef>, arg: &Located<Operand>| match &arg.value {
        Operand::Input(i) if *i < in_types.len() => Ok(NodeRef::Input(*i)),
        Operand::Input(i) => fail(arg.pos, ElabErrorKind::InputRange { index: *i, inputs: in_types.len() }),
        Operand::Name(n) => scope.get(n.as_str()).copied().map_or_else(|| fail(arg.pos, ElabErrorKind::Scope(n.clone())), Ok),
    };
    for decl in &program.lets {
        let name = decl.label.value.as_str();
        let Some(sig) = sigs.get(name) else {
            return fail(decl.label.pos, ElabErrorKind::UnknownLabel(name.to_owned()));
        };
        let Sig::Typed(ty) = &sig.sig else {
            return fail(decl.label.pos, ElabErrorKind::UntypedLabel(name.to_owned()));
        };
        if decl.args.len() != ty.in_arity() {
            return fail(
                decl.label.pos,
                ElabErrorKind::Arity { label: name.to_owned(), expected: ty.in_arity(), found: decl.args.len() },
            );
        }
        if decl.names.len() != ty.out_arity() {
            return fail(
                decl.pos,
                ElabErrorKind::OutputCount { label: name.to_owned(), expected: ty.out_arity(), found: decl.names.len() },
            );
        }
        let inputs = decl.args.iter().map(|a| node(&scope, a)).collect::<Result<Vec<_>, _>>()?;
        let mut outputs = Vec::new();
        for (bound, out_ty) in decl.names.iter().zip(&ty.out_types) {
            let j = inner_types.len();
            inner_types.push(out_ty.clone());
            scope.insert(&bound.value, NodeRef::Inner(j));
            outputs.push(NodeRef::Inner(j));
        }
        edges.push(CgEdge { label: TypedLabel::new(name, ty.clone()), inputs, outputs });
    }
    let output = program.outputs.iter().map(|a| node(&scope, a)).collect::<Result<Vec<_>, _>>()?;
    let out_types = match &program.output_types {
        Some(Located { value, pos }) if value.len() != output.len() => {
            return fail(*pos, ElabErrorKind::OutputTypes { expected: output.len(), found: value.len() })
        }
        Some(Located { value, .. }) => value.clone(),
        None => output
            .iter()
            .map(|n| match n {
                NodeRef::Input(i) => in_types[*i].clone(),
                NodeRef::Inner(j) => inner_types[*j].clone(),
            })
            .collect(),
    };
    CodeGraph::new(in_types.clone(), out_types, inner_types, edges, output)
        .map_err(|e| ElabError { pos: program.outputs_pos, kind: ElabErrorKind::Internal(e.to_string()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn run(text: &str) -> Result<Elaborated, ElabError> {
        elaborate(&parse_program(text).unwrap(), &[])
    }

    #[test]
    fn tg0() {
        let e = run("label F : 1\nlabel G : 2\nlabel H : 3\ninputs 3\nlet n0 = F(i0)\nlet n1 = G(i1, i2)\nlet n2 = H(n0, n0, n1)\noutputs n2\n")
            .unwrap();
        assert!(!e.weak.is_strong());
        assert!(e.strong.is_strong());
        assert_eq!(e.strong.to_string(), "let n0 = F(i0); let n1 = G(i1, i2); let n2 = H(n0, n0, n1) in [n2]");
        assert_eq!(e.jungle.edges().len(), 3);
    }

    #[test]
    fn shadowing_uses_the_latest_binding() {
        let e = run("label F : 1\ninputs 1\nlet x = F(i0)\nlet x = F(x)\noutputs x\n").unwrap();
        assert_eq!(e.strong.to_string(), "let n0 = F(i0); let n1 = F(n0) in [n1]");
    }

    #[test]
    fn identity() {
        let e = run("inputs 1\noutputs i0\n").unwrap();
        assert_eq!(e.jungle, Hypergraph::identity(1));
    }

    #[test]
    fn errors() {
        let e = run("label F : 1\ninputs 1\nlet a = F(i0, i0)\noutputs a\n").unwrap_err();
        assert_eq!(e.pos.line, 3);
        assert!(matches!(e.kind, ElabErrorKind::Arity { expected: 1, found: 2, .. }));
        let e = run("label F : 1\ninputs 1\nlet a = F(b)\noutputs a\n").unwrap_err();
        assert_eq!((e.pos, e.kind), (Pos { line: 3, col: 11 }, ElabErrorKind::Scope("b".into())));
        let e = run("inputs 1\noutputs i1\n").unwrap_err();
        assert!(matches!(e.kind, ElabErrorKind::InputRange { index: 1, inputs: 1 }));
        let e = run("inputs 1\nlet a = F(i0)\noutputs a\n").unwrap_err();
        assert_eq!(e.kind, ElabErrorKind::UnknownLabel("F".into()));
        let e = run("label F : 1\nlabel F : 2\ninputs 0\noutputs\n").unwrap_err();
        assert!(matches!(e.kind, ElabErrorKind::DuplicateLabel { .. }));
    }

    #[test]
    fn typed() {
        let p = parse_program(
            "label add : [int, int] -> [int]\nlabel split : [float] -> [int, bool]\ninputs [float, int]\nlet a, b = split(i0)\nlet c = add(a, i1)\noutputs c, b\n",
        )
        .unwrap();
        let g = elaborate_typed(&p, &[]).unwrap();
        assert!(g.typecheck().is_empty());
        assert_eq!(g.out_types(), &[TypeId::new("int"), TypeId::new("bool")]);

        let p = parse_program("label add : [int, int] -> [int]\ninputs [float, int]\nlet c = add(i0, i1)\noutputs c : [bool]\n")
            .unwrap();
        assert_eq!(elaborate_typed(&p, &[]).unwrap().typecheck().len(), 2);
        let p = parse_program("inputs 1\noutputs i0\n").unwrap();
        assert_eq!(elaborate_typed(&p, &[]).unwrap_err().kind, ElabErrorKind::UntypedInputs);
    }
}
