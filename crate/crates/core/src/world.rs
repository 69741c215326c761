//! Worlds of names in scope, and the links that extend them.
//!
//! A [`World`] is an immutable sequence of binder slots; a [`Name`] is a slot
//! of a particular world. Weak links extend a world with a key that may
//! shadow an earlier one, strong links (only obtainable from a [`Fresh`]
//! supply) extend it with a key and serial found nowhere in the source.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Slot {
    key: Arc<str>,
    serial: u64,
}

impl Slot {
    pub fn key(&self) -> &str {
        &self.key
    }

    pub fn serial(&self) -> u64 {
        self.serial
    }
}

/// Compared structurally, slot by slot.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct World {
    slots: Arc<[Slot]>,
}

impl World {
    /// The empty world `ø`.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn name(&self, slot: usize) -> Option<Name> {
        (slot < self.len()).then(|| Name { world: self.clone(), slot })
    }

    /// The innermost slot carrying `key`.
    pub fn resolve(&self, key: &str) -> Option<Name> {
        self.slots.iter().rposition(|s| &*s.key == key).and_then(|k| self.name(k))
    }

    /// Whether `self` is an initial segment of `other`.
    pub fn is_prefix_of(&self, other: &World) -> bool {
        other.slots.starts_with(&self.slots)
    }

    fn next_serial(&self) -> u64 {
        self.slots.last().map_or(0, |s| s.serial + 1)
    }

    fn push(&self, key: Arc<str>, serial: u64) -> World {
        let mut slots = self.slots.to_vec();
        slots.push(Slot { key, serial });
        World { slots: slots.into() }
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("ø");
        }
        f.write_str("[")?;
        for (k, slot) in self.slots.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}#{}", slot.key, slot.serial)?;
        }
        f.write_str("]")
    }
}

impl fmt::Debug for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Name {
    world: World,
    slot: usize,
}

impl Name {
    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    pub fn key(&self) -> &str {
        &self.world.slots[self.slot].key
    }

    pub fn serial(&self) -> u64 {
        self.world.slots[self.slot].serial
    }

    /// The same slot seen from a world extending this name's world.
    pub fn widen(&self, world: &World) -> Result<Name, BindError> {
        if !self.world.is_prefix_of(world) {
            return Err(BindError::WorldMismatch { expected: self.world.clone(), found: world.clone() });
        }
        Ok(Name { world: world.clone(), slot: self.slot })
    }

    /// Transport across a single link.
    pub fn import(&self, link: &Link) -> Result<Name, BindError> {
        check_world(&link.from, &self.world)?;
        Ok(Name { world: link.to.clone(), slot: self.slot })
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}@{}", self.key(), self.serial(), self.slot)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum LinkKind {
    Weak,
    Strong,
}

/// One-slot extension of a world. The bound slot is always `from.len()`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Link {
    kind: LinkKind,
    from: World,
    to: World,
}

impl Link {
    pub fn kind(&self) -> LinkKind {
        self.kind
    }

    pub fn is_strong(&self) -> bool {
        self.kind == LinkKind::Strong
    }

    pub fn from(&self) -> &World {
        &self.from
    }

    pub fn to(&self) -> &World {
        &self.to
    }

    pub fn bound_slot(&self) -> usize {
        self.from.len()
    }

    pub fn key(&self) -> &str {
        &self.to.slots[self.bound_slot()].key
    }

    /// The name bound by this link, in its target world.
    pub fn name(&self) -> Name {
        Name { world: self.to.clone(), slot: self.bound_slot() }
    }

    /// The same extension with its freshness forgotten.
    pub fn weak(&self) -> Link {
        Link { kind: LinkKind::Weak, ..self.clone() }
    }

    /// A supply for the target world, for continuing a chain of strong
    /// links.
    pub fn next_fresh(&self) -> Fresh {
        Fresh { world: self.to.clone(), next_serial: self.to.next_serial() }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arrow = match self.kind {
            LinkKind::Weak => "<-",
            LinkKind::Strong => "<->",
        };
        write!(f, "{} {arrow} {}", self.from, self.to)
    }
}

/// Extend `world` by `key`, possibly shadowing an earlier slot.
pub fn extend_weak(world: &World, key: &str) -> Link {
    let to = world.push(key.into(), world.next_serial());
    Link { kind: LinkKind::Weak, from: world.clone(), to }
}

/// A supply of strong links out of `world`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Fresh {
    world: World,
    next_serial: u64,
}

impl Fresh {
    /// The supply over `ø`.
    pub fn empty() -> Self {
        Fresh { world: World::empty(), next_serial: 0 }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn next_serial(&self) -> u64 {
        self.next_serial
    }

    /// The same supply, skipping serials below `serial`.
    pub fn skip_to(&self, serial: u64) -> Fresh {
        Fresh { world: self.world.clone(), next_serial: self.next_serial.max(serial) }
    }

    /// A strong link out of this supply's world, keyed `n<serial>`, and the
    /// supply for its target.
    pub fn extend(&self) -> (Link, Fresh) {
        let mut serial = self.next_serial;
        let key = loop {
            let key = format!("n{serial}");
            if self.world.resolve(&key).is_none() {
                break key;
            }
            serial += 1;
        };
        let to = self.world.push(key.into(), serial);
        let link = Link { kind: LinkKind::Strong, from: self.world.clone(), to };
        let next = link.next_fresh();
        (link, next)
    }
}

/// A chain of strong links, inducing an inclusion of its start world in its
/// end world.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinkPath {
    start: World,
    links: Vec<Link>,
}

impl LinkPath {
    pub fn empty(world: World) -> Self {
        LinkPath { start: world, links: Vec::new() }
    }

    pub fn start(&self) -> &World {
        &self.start
    }

    pub fn end(&self) -> &World {
        self.links.last().map_or(&self.start, |l| &l.to)
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn push(&self, link: &Link) -> Result<LinkPath, BindError> {
        if !link.is_strong() {
            return Err(BindError::NotStrong { link: link.clone() });
        }
        check_world(self.end(), &link.from)?;
        let mut links = self.links.clone();
        links.push(link.clone());
        Ok(LinkPath { start: self.start.clone(), links })
    }

    pub fn import(&self, name: &Name) -> Result<Name, BindError> {
        import_name(self, name)
    }
}

/// View `name`, a name of the path's start world, in the path's end world.
pub fn import_name(path: &LinkPath, name: &Name) -> Result<Name, BindError> {
    check_world(&path.start, &name.world)?;
    Ok(Name { world: path.end().clone(), slot: name.slot })
}

/// Finite map from the slots of a world to payloads.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CEnv<P> {
    world: World,
    entries: BTreeMap<usize, P>,
}

impl<P> CEnv<P> {
    /// An environment over `world` with nothing mapped.
    pub fn new(world: World) -> Self {
        CEnv { world, entries: BTreeMap::new() }
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    /// Bind the slot introduced by `link`; the result is an environment over
    /// `link.to()`.
    pub fn insert(mut self, link: &Link, payload: P) -> Result<CEnv<P>, BindError> {
        check_world(&self.world, &link.from)?;
        self.entries.insert(link.bound_slot(), payload);
        self.world = link.to.clone();
        Ok(self)
    }

    pub fn lookup(&self, name: &Name) -> Result<&P, BindError> {
        check_world(&self.world, &name.world)?;
        self.entries
            .get(&name.slot)
            .ok_or_else(|| BindError::UnmappedName { name: name.to_string(), slot: name.slot, world: self.world.clone() })
    }

    pub fn map<Q>(&self, mut f: impl FnMut(&P) -> Q) -> CEnv<Q> {
        CEnv { world: self.world.clone(), entries: self.entries.iter().map(|(&k, p)| (k, f(p))).collect() }
    }

    pub fn try_map<Q, E>(&self, mut f: impl FnMut(&P) -> Result<Q, E>) -> Result<CEnv<Q>, E> {
        let entries = self.entries.iter().map(|(&k, p)| Ok((k, f(p)?))).collect::<Result<_, E>>()?;
        Ok(CEnv { world: self.world.clone(), entries })
    }
}

impl CEnv<Name> {
    /// Transport every payload name across `link`.
    pub fn import_with(&self, link: &Link) -> Result<CEnv<Name>, BindError> {
        self.try_map(|n| n.import(link))
    }
}

fn check_world(expected: &World, found: &World) -> Result<(), BindError> {
    if expected == found {
        Ok(())
    } else {
        Err(BindError::WorldMismatch { expected: expected.clone(), found: found.clone() })
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Error)]
pub enum BindError {
    #[error("name {name} (slot {slot}) is not mapped in environment over {world}")]
    UnmappedName { name: String, slot: usize, world: World },
    #[error("expected world {expected}, found {found}")]
    WorldMismatch { expected: World, found: World },
    #[error("link {link} is not strong")]
    NotStrong { link: Link },
}
