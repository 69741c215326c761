//! Term graphs as nested lets.
//!
//! `Let(x, f, t, u)` reads "let x = f(t) in u": the argument suffix `t`
//! lives in the outer world, `u` in the world extended by `x`. `Fork`
//! concatenates output lists.

use crate::label::Label;
use crate::seq::{Arg, LetError, LetSeq};
use crate::world::{BindError, CEnv, Fresh, Link, Name, World};

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Node {
    Input(usize),
    V(Name),
    Eps,
    Fork(Box<NestedLet>, Box<NestedLet>),
    Let { link: Link, label: Label, bound: Box<NestedLet>, body: Box<NestedLet> },
}

/// A validated nested-let graph over `world` with `inputs` inputs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NestedLet {
    world: World,
    inputs: usize,
    outputs: usize,
    node: Node,
}

impl NestedLet {
    pub fn input(world: World, inputs: usize, index: usize) -> Result<Self, LetError> {
        if index >= inputs {
            return Err(LetError::InputRange { index, inputs });
        }
        Ok(NestedLet { world, inputs, outputs: 1, node: Node::Input(index) })
    }

    pub fn var(world: World, inputs: usize, name: Name) -> Result<Self, LetError> {
        if name.world() != &world {
            return Err(BindError::WorldMismatch { expected: world, found: name.world().clone() }.into());
        }
        Ok(NestedLet { world, inputs, outputs: 1, node: Node::V(name) })
    }

    pub fn eps(world: World, inputs: usize) -> Self {
        NestedLet { world, inputs, outputs: 0, node: Node::Eps }
    }

    pub fn fork(t: NestedLet, u: NestedLet) -> Result<Self, LetError> {
        if t.world != u.world {
            return Err(BindError::WorldMismatch { expected: t.world, found: u.world }.into());
        }
        if t.inputs != u.inputs {
            return Err(LetError::InputArity { left: t.inputs, right: u.inputs });
        }
        Ok(NestedLet {
            world: t.world.clone(),
            inputs: t.inputs,
            outputs: t.outputs + u.outputs,
            node: Node::Fork(Box::new(t), Box::new(u)),
        })
    }

    /// `let x = label(bound) in body`.
    pub fn bind(link: Link, label: Label, bound: NestedLet, body: NestedLet) -> Result<Self, LetError> {
        if bound.outputs != label.arity() {
            return Err(LetError::Arity { label, found: bound.outputs });
        }
        if &bound.world != link.from() {
            return Err(BindError::WorldMismatch { expected: link.from().clone(), found: bound.world }.into());
        }
        if &body.world != link.to() {
            return Err(BindError::WorldMismatch { expected: link.to().clone(), found: body.world }.into());
        }
        if bound.inputs != body.inputs {
            return Err(LetError::InputArity { left: bound.inputs, right: body.inputs });
        }
        Ok(NestedLet {
            world: bound.world.clone(),
            inputs: bound.inputs,
            outputs: body.outputs,
            node: Node::Let { link, label, bound: Box::new(bound), body: Box::new(body) },
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

    pub fn node(&self) -> &Node {
        &self.node
    }

    pub fn let_count(&self) -> usize {
        match &self.node {
            Node::Input(_) | Node::V(_) | Node::Eps => 0,
            Node::Fork(t, u) => t.let_count() + u.let_count(),
            Node::Let { bound, body, .. } => 1 + bound.let_count() + body.let_count(),
        }
    }

    pub fn is_strong(&self) -> bool {
        match &self.node {
            Node::Input(_) | Node::V(_) | Node::Eps => true,
            Node::Fork(t, u) => t.is_strong() && u.is_strong(),
            Node::Let { link, bound, body, .. } => link.is_strong() && bound.is_strong() && body.is_strong(),
        }
    }

    /// Same tree over the world of `fr`, every let binding a fresh strong
    /// link and every name renamed through `env`. Serials are drawn in
    /// declaration order across the whole tree, so sibling scopes never
    /// reuse a name.
    pub fn strengthen(fr: &Fresh, env: &CEnv<Name>, t: &NestedLet) -> Result<NestedLet, LetError> {
        NestedLet::strengthen_from(fr, env, t).map(|(t, _)| t)
    }

    fn strengthen_from(fr: &Fresh, env: &CEnv<Name>, t: &NestedLet) -> Result<(NestedLet, u64), LetError> {
        let world = fr.world().clone();
        match &t.node {
            Node::Input(i) => Ok((NestedLet::input(world, t.inputs, *i)?, fr.next_serial())),
            Node::V(x) => Ok((NestedLet::var(world, t.inputs, env.lookup(x)?.clone())?, fr.next_serial())),
            Node::Eps => Ok((NestedLet::eps(world, t.inputs), fr.next_serial())),
            Node::Fork(a, b) => {
                let (a, used) = NestedLet::strengthen_from(fr, env, a)?;
                let (b, used) = NestedLet::strengthen_from(&fr.skip_to(used), env, b)?;
                Ok((NestedLet::fork(a, b)?, used))
            }
            Node::Let { link, label, bound, body } => {
                let (bound, used) = NestedLet::strengthen_from(fr, env, bound)?;
                let (x, next) = fr.skip_to(used).extend();
                let inner = env.import_with(&x)?.insert(link, x.name())?;
                let (body, used) = NestedLet::strengthen_from(&next, &inner, body)?;
                Ok((NestedLet::bind(x, label.clone(), bound, body)?, used))
            }
        }
    }

    /// Add `extra` unused inputs at the end.
    pub fn extend(extra: usize, t: &NestedLet) -> NestedLet {
        t.map_inputs(t.inputs + extra, &|i| i)
    }

    /// Add `offset` unused inputs at the front.
    pub fn shift(offset: usize, t: &NestedLet) -> NestedLet {
        t.map_inputs(t.inputs + offset, &|i| i + offset)
    }

    fn map_inputs(&self, inputs: usize, f: &dyn Fn(usize) -> usize) -> NestedLet {
        let node = match &self.node {
            Node::Input(i) => Node::Input(f(*i)),
            Node::V(x) => Node::V(x.clone()),
            Node::Eps => Node::Eps,
            Node::Fork(t, u) => Node::Fork(Box::new(t.map_inputs(inputs, f)), Box::new(u.map_inputs(inputs, f))),
            Node::Let { link, label, bound, body } => Node::Let {
                link: link.clone(),
                label: label.clone(),
                bound: Box::new(bound.map_inputs(inputs, f)),
                body: Box::new(body.map_inputs(inputs, f)),
            },
        };
        NestedLet { world: self.world.clone(), inputs, outputs: self.outputs, node }
    }

    pub fn par(t: &NestedLet, u: &NestedLet) -> Result<NestedLet, LetError> {
        NestedLet::fork(NestedLet::extend(u.inputs, t), NestedLet::shift(t.inputs, u))
    }

    /// Hoist every let into one linear sequence of strong lets drawn from
    /// `fr`. Lets are emitted left to right, an argument's lets before the
    /// let that consumes it.
    pub fn flatten(fr: &Fresh, env: &CEnv<Name>, t: &NestedLet) -> Result<LetSeq, LetError> {
        let base = fr.world().clone();
        let env = env.try_map(|n| {
            if n.world() == &base {
                Ok(Slot::Name(n.slot()))
            } else {
                Err(BindError::WorldMismatch { expected: base.clone(), found: n.world().clone() })
            }
        })?;
        let mut flat = Flat { fr: fr.clone(), decls: Vec::new() };
        let outs = flat.hoist(&env, t)?;

        let resolve = |slots: &[Slot], world: &World| -> Vec<Arg> {
            slots
                .iter()
                .map(|s| match *s {
                    Slot::Input(i) => Arg::Input(i),
                    Slot::Name(k) => Arg::V(world.name(k).expect("slot bound before use")),
                })
                .collect()
        };
        let end = flat.fr.world().clone();
        let mut g = LetSeq::output(end.clone(), t.inputs, resolve(&outs, &end))?;
        for (link, label, args) in flat.decls.into_iter().rev() {
            let args = resolve(&args, link.from());
            g = LetSeq::bind(link, label, args, g)?;
        }
        Ok(g)
    }
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    Input(usize),
    Name(usize),
}

struct Flat {
    fr: Fresh,
    decls: Vec<(Link, Label, Vec<Slot>)>,
}

impl Flat {
    fn hoist(&mut self, env: &CEnv<Slot>, t: &NestedLet) -> Result<Vec<Slot>, LetError> {
        match &t.node {
            Node::Input(i) => Ok(vec![Slot::Input(*i)]),
            Node::V(x) => Ok(vec![*env.lookup(x)?]),
            Node::Eps => Ok(Vec::new()),
            Node::Fork(a, b) => {
                let mut outs = self.hoist(env, a)?;
                outs.extend(self.hoist(env, b)?);
                Ok(outs)
            }
            Node::Let { link, label, bound, body } => {
                let args = self.hoist(env, bound)?;
                let (x, next) = self.fr.extend();
                let slot = Slot::Name(x.bound_slot());
                self.decls.push((x, label.clone(), args));
                self.fr = next;
                let inner = env.clone().insert(link, slot)?;
                self.hoist(&inner, body)
            }
        }
    }
}
