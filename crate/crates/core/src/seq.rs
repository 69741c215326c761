//! Term graphs as a linear sequence of lets followed by an output list.
//!
//! `let n0 = F(i0); let n1 = G(i1, i2); let n2 = H(n0, n0, n1) in [n2]`
//!
//! The composition operators work on graphs over the empty world whose lets
//! bind strong links, and are built from [`LetSeq::in_let`] and
//! [`LetSeq::map_args`].

use std::fmt;

use thiserror::Error;

use crate::jungle::{GraphError, HyperEdge, Hypergraph, NodeRef};
use crate::label::Label;
use crate::world::{BindError, CEnv, Fresh, Link, LinkPath, Name, World};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Arg {
    Input(usize),
    V(Name),
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Input(i) => write!(f, "i{i}"),
            Arg::V(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum LetError {
    #[error(transparent)]
    Bind(#[from] BindError),
    #[error("label {label} applied to {found} arguments")]
    Arity { label: Label, found: usize },
    #[error("input i{index} out of range for {inputs} inputs")]
    InputRange { index: usize, inputs: usize },
    #[error("operands have {left} and {right} inputs")]
    InputArity { left: usize, right: usize },
    #[error("{outputs} outputs cannot feed {inputs} inputs")]
    Interface { outputs: usize, inputs: usize },
    #[error("operand is over {world}, not the empty world")]
    NotClosed { world: World },
    #[error("name {name} is not bound by any let")]
    UnboundName { name: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Step {
    Output(Vec<Arg>),
    Let { link: Link, label: Label, args: Vec<Arg>, body: Box<LetSeq> },
}

/// A validated sequential-let graph over `world` with `inputs` inputs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LetSeq {
    world: World,
    inputs: usize,
    outputs: usize,
    step: Step,
}

impl LetSeq {
    pub fn output(world: World, inputs: usize, args: Vec<Arg>) -> Result<Self, LetError> {
        check_args(&world, inputs, &args)?;
        Ok(LetSeq { world, inputs, outputs: args.len(), step: Step::Output(args) })
    }

    /// `let x = label(args) in body`.
    pub fn bind(link: Link, label: Label, args: Vec<Arg>, body: LetSeq) -> Result<Self, LetError> {
        if args.len() != label.arity() {
            return Err(LetError::Arity { label, found: args.len() });
        }
        if body.world != *link.to() {
            return Err(BindError::WorldMismatch { expected: link.to().clone(), found: body.world.clone() }.into());
        }
        check_args(link.from(), body.inputs, &args)?;
        Ok(LetSeq {
            world: link.from().clone(),
            inputs: body.inputs,
            outputs: body.outputs,
            step: Step::Let { link, label, args, body: Box::new(body) },
        })
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn input_arity(&self) -> usize {
        self.inputs
    }

    pub fn output_arity(&self) -> usize {
        self.outputs
    }

    pub fn step(&self) -> &Step {
        &self.step
    }

    pub fn let_count(&self) -> usize {
        let mut count = 0;
        let mut g = self;
        while let Step::Let { body, .. } = &g.step {
            count += 1;
            g = body;
        }
        count
    }

    pub fn is_strong(&self) -> bool {
        let mut g = self;
        while let Step::Let { link, body, .. } = &g.step {
            if !link.is_strong() {
                return false;
            }
            g = body;
        }
        true
    }

    /// `let x = label(i0, ..) in [x]` over `ø`.
    pub fn prim(label: Label) -> Self {
        let (x, _) = Fresh::empty().extend();
        let args = (0..label.arity()).map(Arg::Input).collect();
        let body = LetSeq::output(x.to().clone(), label.arity(), vec![Arg::V(x.name())]).expect("bound name");
        LetSeq::bind(x, label, args, body).expect("arity matches")
    }

    pub fn wire(inputs: usize, v: &[usize]) -> Result<Self, LetError> {
        LetSeq::output(World::empty(), inputs, v.iter().map(|&i| Arg::Input(i)).collect())
    }

    pub fn id_wire(k: usize) -> Self {
        LetSeq::wire(k, &(0..k).collect::<Vec<_>>()).expect("in range")
    }

    pub fn dup(k: usize) -> Self {
        LetSeq::wire(k, &(0..k).chain(0..k).collect::<Vec<_>>()).expect("in range")
    }

    pub fn term(k: usize) -> Self {
        LetSeq::wire(k, &[]).expect("in range")
    }

    /// Rebind every let to a strong link drawn from `fr`, renaming free
    /// names through `env`. Works for weak graphs (strengthening) and strong
    /// ones (renaming into the world of `fr`).
    pub fn strengthen(fr: &Fresh, env: &CEnv<Name>, g: &LetSeq) -> Result<LetSeq, LetError> {
        let rename = |args: &[Arg], env: &CEnv<Name>| map_var_args(|x| env.lookup(x).cloned(), args);
        match &g.step {
            Step::Output(args) => LetSeq::output(fr.world().clone(), g.inputs, rename(args, env)?),
            Step::Let { link, label, args, body } => {
                let (x, next) = fr.extend();
                let inner = env.import_with(&x)?.insert(link, x.name())?;
                let body = LetSeq::strengthen(&next, &inner, body)?;
                LetSeq::bind(x, label.clone(), rename(args, env)?, body)
            }
        }
    }

    /// Keep the lets of `g` and replace its output list by whatever
    /// `callback` builds from the path walked so far, a supply for the
    /// innermost world and the output list.
    pub fn in_let<F>(path: &LinkPath, fr: &Fresh, callback: &mut F, g: &LetSeq) -> Result<LetSeq, LetError>
    where
        F: FnMut(&LinkPath, &Fresh, &[Arg]) -> Result<LetSeq, LetError>,
    {
        match &g.step {
            Step::Output(args) => {
                if path.end() != &g.world {
                    return Err(BindError::WorldMismatch { expected: g.world.clone(), found: path.end().clone() }.into());
                }
                callback(path, fr, args)
            }
            Step::Let { link, label, args, body } => {
                let inner = LetSeq::in_let(&path.push(link)?, &link.next_fresh(), callback, body)?;
                LetSeq::bind(link.clone(), label.clone(), args.clone(), inner)
            }
        }
    }

    /// Rewrite every argument and output list of `g` with `f`, which also
    /// receives the path from the start of `path` to the list's world. The
    /// result has `inputs` inputs.
    pub fn map_args<F>(path: &LinkPath, inputs: usize, f: &mut F, g: &LetSeq) -> Result<LetSeq, LetError>
    where
        F: FnMut(&LinkPath, &[Arg]) -> Result<Vec<Arg>, LetError>,
    {
        match &g.step {
            Step::Output(args) => LetSeq::output(g.world.clone(), inputs, f(path, args)?),
            Step::Let { link, label, args, body } => {
                let args = f(path, args)?;
                let body = LetSeq::map_args(&path.push(link)?, inputs, f, body)?;
                LetSeq::bind(link.clone(), label.clone(), args, body)
            }
        }
    }

    /// Both operands' outputs, side by side, over shared inputs.
    pub fn fork(g1: &LetSeq, g2: &LetSeq) -> Result<LetSeq, LetError> {
        closed(g1)?;
        closed(g2)?;
        if g1.inputs != g2.inputs {
            return Err(LetError::InputArity { left: g1.inputs, right: g2.inputs });
        }
        let start = LinkPath::empty(World::empty());
        LetSeq::in_let(
            &start,
            &Fresh::empty(),
            &mut |_, fr, as1| {
                let renamed = LetSeq::strengthen(fr, &CEnv::new(World::empty()), g2)?;
                let as1 = as1.to_vec();
                LetSeq::in_let(
                    &LinkPath::empty(fr.world().clone()),
                    fr,
                    &mut |s2, _, as2| {
                        let mut out = map_var_args(|x| s2.import(x), &as1)?;
                        out.extend_from_slice(as2);
                        LetSeq::output(s2.end().clone(), g1.inputs, out)
                    },
                    &renamed,
                )
            },
            g1,
        )
    }

    /// Add `extra` unused inputs at the end.
    pub fn extend(extra: usize, g: &LetSeq) -> LetSeq {
        g.map_inputs(g.inputs + extra, |i| i)
    }

    /// Add `offset` unused inputs at the front.
    pub fn shift(offset: usize, g: &LetSeq) -> LetSeq {
        g.map_inputs(g.inputs + offset, |i| i + offset)
    }

    fn map_inputs(&self, inputs: usize, f: impl Fn(usize) -> usize + Copy) -> LetSeq {
        let map = |args: &[Arg]| -> Vec<Arg> {
            args.iter()
                .map(|a| match a {
                    Arg::Input(i) => Arg::Input(f(*i)),
                    v => v.clone(),
                })
                .collect()
        };
        let step = match &self.step {
            Step::Output(args) => Step::Output(map(args)),
            Step::Let { link, label, args, body } => Step::Let {
                link: link.clone(),
                label: label.clone(),
                args: map(args),
                body: Box::new(body.map_inputs(inputs, f)),
            },
        };
        LetSeq { world: self.world.clone(), inputs, outputs: self.outputs, step }
    }

    pub fn par(g1: &LetSeq, g2: &LetSeq) -> Result<LetSeq, LetError> {
        LetSeq::fork(&LetSeq::extend(g2.inputs, g1), &LetSeq::shift(g1.inputs, g2))
    }

    /// Feed the outputs of `g1` into the inputs of `g2`.
    pub fn seq(g1: &LetSeq, g2: &LetSeq) -> Result<LetSeq, LetError> {
        closed(g1)?;
        closed(g2)?;
        if g1.outputs != g2.inputs {
            return Err(LetError::Interface { outputs: g1.outputs, inputs: g2.inputs });
        }
        LetSeq::in_let(
            &LinkPath::empty(World::empty()),
            &Fresh::empty(),
            &mut |_, fr, as1| {
                let renamed = LetSeq::strengthen(fr, &CEnv::new(World::empty()), g2)?;
                LetSeq::map_args(
                    &LinkPath::empty(fr.world().clone()),
                    g1.inputs,
                    &mut |s2, args| seq_args(&map_var_args(|x| s2.import(x), as1)?, args),
                    &renamed,
                )
            },
            g1,
        )
    }

    /// Let `i` becomes inner node and edge `i`.
    pub fn to_jungle(&self) -> Result<Hypergraph, LetError> {
        let base = self.world.len();
        let node = |arg: &Arg| match arg {
            Arg::Input(i) => Ok(NodeRef::Input(*i)),
            Arg::V(x) if x.slot() >= base => Ok(NodeRef::Inner(x.slot() - base)),
            Arg::V(x) => Err(LetError::UnboundName { name: x.to_string() }),
        };
        let mut edges = Vec::new();
        let mut g = self;
        while let Step::Let { label, args, body, .. } = &g.step {
            let inputs = args.iter().map(node).collect::<Result<_, _>>()?;
            edges.push(HyperEdge::new(label.clone(), inputs, edges.len()));
            g = body;
        }
        let Step::Output(args) = &g.step else { unreachable!() };
        let output = args.iter().map(node).collect::<Result<_, _>>()?;
        Ok(Hypergraph::new(self.inputs, self.outputs, edges.len(), edges, output)?)
    }
}

impl fmt::Display for LetSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, args: &[Arg]| -> fmt::Result {
            for (k, a) in args.iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            Ok(())
        };
        let mut g = self;
        while let Step::Let { link, label, args, body } = &g.step {
            write!(f, "let {} = {}(", link.key(), label.name())?;
            list(f, args)?;
            f.write_str(")")?;
            g = body;
            f.write_str(if matches!(g.step, Step::Let { .. }) { "; " } else { " in " })?;
        }
        let Step::Output(args) = &g.step else { unreachable!() };
        f.write_str("[")?;
        list(f, args)?;
        f.write_str("]")
    }
}

/// Apply `f` to the names in `args`, leaving inputs alone.
pub fn map_var_args(
    mut f: impl FnMut(&Name) -> Result<Name, BindError>,
    args: &[Arg],
) -> Result<Vec<Arg>, BindError> {
    args.iter()
        .map(|a| match a {
            Arg::Input(i) => Ok(Arg::Input(*i)),
            Arg::V(x) => f(x).map(Arg::V),
        })
        .collect()
}

/// Substitute `outs[i]` for every `Input(i)` in `args`.
pub fn seq_args(outs: &[Arg], args: &[Arg]) -> Result<Vec<Arg>, LetError> {
    args.iter()
        .map(|a| match a {
            Arg::Input(i) => outs.get(*i).cloned().ok_or(LetError::InputRange { index: *i, inputs: outs.len() }),
            v => Ok(v.clone()),
        })
        .collect()
}

fn check_args(world: &World, inputs: usize, args: &[Arg]) -> Result<(), LetError> {
    for a in args {
        match a {
            Arg::Input(i) if *i >= inputs => return Err(LetError::InputRange { index: *i, inputs }),
            Arg::V(x) if x.world() != world => {
                return Err(BindError::WorldMismatch { expected: world.clone(), found: x.world().clone() }.into())
            }
            _ => {}
        }
    }
    Ok(())
}

fn closed(g: &LetSeq) -> Result<(), LetError> {
    if g.world.is_empty() {
        Ok(())
    } else {
        Err(LetError::NotClosed { world: g.world.clone() })
    }
}
