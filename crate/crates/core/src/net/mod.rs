//! Uncolored workflow-net structure: nodes, arcs, entry and exit places,
//! structural validation, markings and the token game.

pub mod cluster;
pub mod graph;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use cluster::{
    compute_clusters, is_free_choice_cluster, is_free_choice_net, pairwise_free_choice,
    unconditionally_enables, Cluster, Clusters,
};
pub use graph::is_acyclic;

/// Identifier of a place or transition, unique within one net.
///
/// Ids are assigned in document order when a net is built and never reused:
/// nodes created by rule applications draw from a monotone counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Place,
    Transition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    kind: NodeKind,
    name: String,
}

/// A workflow net `(P, T, F, i, o)`.
///
/// The value is immutable from the outside; rule applications clone it and
/// rewrite the copy. Arcs are a set, so every arc has weight one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WorkflowNet {
    nodes: BTreeMap<NodeId, Node>,
    succ: BTreeMap<NodeId, BTreeSet<NodeId>>,
    pred: BTreeMap<NodeId, BTreeSet<NodeId>>,
    entry: NodeId,
    exit: NodeId,
    next_id: u32,
}

static EMPTY: BTreeSet<NodeId> = BTreeSet::new();

impl WorkflowNet {
    pub fn builder() -> NetBuilder {
        NetBuilder::default()
    }

    pub fn entry(&self) -> NodeId {
        self.entry
    }

    pub fn exit(&self) -> NodeId {
        self.exit
    }

    /// The id the next created node will receive.
    pub fn next_id(&self) -> u32 {
        self.next_id
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn places(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .filter(|(_, n)| n.kind == NodeKind::Place)
            .map(|(id, _)| *id)
    }

    pub fn transitions(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes
            .iter()
            .filter(|(_, n)| n.kind == NodeKind::Transition)
            .map(|(id, _)| *id)
    }

    pub fn place_count(&self) -> usize {
        self.places().count()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions().count()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn kind(&self, id: NodeId) -> Option<NodeKind> {
        self.nodes.get(&id).map(|n| n.kind)
    }

    pub fn is_place(&self, id: NodeId) -> bool {
        self.kind(id) == Some(NodeKind::Place)
    }

    pub fn is_transition(&self, id: NodeId) -> bool {
        self.kind(id) == Some(NodeKind::Transition)
    }

    /// Name of a node; unknown ids render as their numeric form.
    pub fn name(&self, id: NodeId) -> &str {
        self.nodes.get(&id).map(|n| n.name.as_str()).unwrap_or("?")
    }

    pub fn find(&self, name: &str) -> Option<NodeId> {
        self.nodes
            .iter()
            .find(|(_, n)| n.name == name)
            .map(|(id, _)| *id)
    }

    /// `•x`: the sources of arcs ending in `x`.
    pub fn preset(&self, id: NodeId) -> &BTreeSet<NodeId> {
        self.pred.get(&id).unwrap_or(&EMPTY)
    }

    /// `x•`: the targets of arcs leaving `x`.
    pub fn postset(&self, id: NodeId) -> &BTreeSet<NodeId> {
        self.succ.get(&id).unwrap_or(&EMPTY)
    }

    pub fn arcs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.succ
            .iter()
            .flat_map(|(from, tos)| tos.iter().map(move |to| (*from, *to)))
    }

    pub fn arc_count(&self) -> usize {
        self.succ.values().map(BTreeSet::len).sum()
    }

    pub fn has_arc(&self, from: NodeId, to: NodeId) -> bool {
        self.postset(from).contains(&to)
    }

    pub(crate) fn fresh_name(&self, preferred: &str, id: NodeId) -> String {
        let taken = |n: &str| self.nodes.values().any(|node| node.name == n);
        if preferred.len() <= 48 && !taken(preferred) {
            return preferred.to_string();
        }
        let mut name = format!("t{}", id.0);
        let mut k = 1;
        while taken(&name) {
            name = format!("t{}_{}", id.0, k);
            k += 1;
        }
        name
    }

    /// Adds a transition with a fresh id drawn from the monotone counter.
    pub(crate) fn add_transition(
        &mut self,
        preferred_name: &str,
        pre: &BTreeSet<NodeId>,
        post: &BTreeSet<NodeId>,
    ) -> NodeId {
        let id = NodeId(self.next_id);
        self.next_id += 1;
        let name = self.fresh_name(preferred_name, id);
        self.nodes.insert(
            id,
            Node {
                kind: NodeKind::Transition,
                name,
            },
        );
        self.succ.insert(id, post.clone());
        self.pred.insert(id, pre.clone());
        for p in pre {
            self.succ.entry(*p).or_default().insert(id);
        }
        for p in post {
            self.pred.entry(*p).or_default().insert(id);
        }
        id
    }

    /// Removes a node together with every arc touching it.
    pub(crate) fn remove_node(&mut self, id: NodeId) {
        if self.nodes.remove(&id).is_none() {
            return;
        }
        for s in self.succ.remove(&id).unwrap_or_default() {
            if let Some(ps) = self.pred.get_mut(&s) {
                ps.remove(&id);
            }
        }
        for p in self.pred.remove(&id).unwrap_or_default() {
            if let Some(ss) = self.succ.get_mut(&p) {
                ss.remove(&id);
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BuildError {
    #[error("duplicate node name '{0}'")]
    DuplicateName(String),
    #[error("duplicate node id {0}")]
    DuplicateId(NodeId),
    #[error("arc references unknown node {0}")]
    UnknownNode(NodeId),
    #[error("entry place not set")]
    MissingEntry,
    #[error("exit place not set")]
    MissingExit,
}

/// Incremental construction of a [`WorkflowNet`].
///
/// The builder accepts structurally illegal nets (arcs between two places,
/// arcs into the entry place, ...) so that [`validate`] can report them.
#[derive(Clone, Debug, Default)]
pub struct NetBuilder {
    nodes: Vec<(NodeId, NodeKind, String)>,
    arcs: Vec<(NodeId, NodeId)>,
    entry: Option<NodeId>,
    exit: Option<NodeId>,
    counter: u32,
    next_id: Option<u32>,
}

impl NetBuilder {
    fn push(&mut self, kind: NodeKind, name: &str, id: Option<u32>) -> NodeId {
        let id = NodeId(id.unwrap_or(self.counter));
        self.counter = self.counter.max(id.0 + 1);
        self.nodes.push((id, kind, name.to_string()));
        id
    }

    pub fn place(&mut self, name: &str) -> NodeId {
        self.push(NodeKind::Place, name, None)
    }

    pub fn transition(&mut self, name: &str) -> NodeId {
        self.push(NodeKind::Transition, name, None)
    }

    /// Adds a node with an explicit id; later implicit ids continue after it.
    pub fn node_with_id(&mut self, kind: NodeKind, name: &str, id: u32) -> NodeId {
        self.push(kind, name, Some(id))
    }

    pub fn arc(&mut self, from: NodeId, to: NodeId) -> &mut Self {
        self.arcs.push((from, to));
        self
    }

    pub fn entry(&mut self, id: NodeId) -> &mut Self {
        self.entry = Some(id);
        self
    }

    pub fn exit(&mut self, id: NodeId) -> &mut Self {
        self.exit = Some(id);
        self
    }

    /// Overrides the fresh-id counter (must not be below the largest id + 1).
    pub fn next_id(&mut self, next: u32) -> &mut Self {
        self.next_id = Some(next);
        self
    }

    pub fn build(&self) -> Result<WorkflowNet, BuildError> {
        let mut nodes = BTreeMap::new();
        let mut names = BTreeSet::new();
        for (id, kind, name) in &self.nodes {
            if !names.insert(name.as_str()) {
                return Err(BuildError::DuplicateName(name.clone()));
            }
            let node = Node {
                kind: *kind,
                name: name.clone(),
            };
            if nodes.insert(*id, node).is_some() {
                return Err(BuildError::DuplicateId(*id));
            }
        }
        let mut succ: BTreeMap<NodeId, BTreeSet<NodeId>> =
            nodes.keys().map(|id| (*id, BTreeSet::new())).collect();
        let mut pred = succ.clone();
        for (from, to) in &self.arcs {
            for end in [from, to] {
                if !nodes.contains_key(end) {
                    return Err(BuildError::UnknownNode(*end));
                }
            }
            succ.get_mut(from).unwrap().insert(*to);
            pred.get_mut(to).unwrap().insert(*from);
        }
        let entry = self.entry.ok_or(BuildError::MissingEntry)?;
        let exit = self.exit.ok_or(BuildError::MissingExit)?;
        for end in [entry, exit] {
            if !nodes.contains_key(&end) {
                return Err(BuildError::UnknownNode(end));
            }
        }
        let next_id = self.next_id.unwrap_or(0).max(self.counter);
        Ok(WorkflowNet {
            nodes,
            succ,
            pred,
            entry,
            exit,
            next_id,
        })
    }
}

/// The workflow-net condition a [`Violation`] breaks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Clause {
    ArcNotBipartite,
    EntryNotPlace,
    ExitNotPlace,
    EntryIsExit,
    EntryHasIncoming,
    ExitHasOutgoing,
    NotStronglyConnected,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Clause::ArcNotBipartite => "arcs connect places with transitions",
            Clause::EntryNotPlace => "i is a place",
            Clause::ExitNotPlace => "o is a place",
            Clause::EntryIsExit => "i and o are distinct",
            Clause::EntryHasIncoming => "i has no incoming arcs",
            Clause::ExitHasOutgoing => "o has no outgoing arcs",
            Clause::NotStronglyConnected => "the graph extended by (o, i) is strongly connected",
        };
        f.write_str(text)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: Clause,
    pub node: Option<NodeId>,
    pub arc: Option<(NodeId, NodeId)>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "violates \"{}\": {}", self.clause, self.detail)
    }
}

/// Checks the workflow-net conditions. An empty list means the net is legal.
pub fn validate(net: &WorkflowNet) -> Vec<Violation> {
    let mut out = Vec::new();
    let name = |id| net.name(id).to_string();
    for (from, to) in net.arcs() {
        if net.kind(from) == net.kind(to) {
            out.push(Violation {
                clause: Clause::ArcNotBipartite,
                node: None,
                arc: Some((from, to)),
                detail: format!("arc {} -> {} joins two nodes of the same kind", name(from), name(to)),
            });
        }
    }
    let (i, o) = (net.entry(), net.exit());
    if !net.is_place(i) {
        out.push(Violation {
            clause: Clause::EntryNotPlace,
            node: Some(i),
            arc: None,
            detail: format!("entry {} is not a place", name(i)),
        });
    }
    if !net.is_place(o) {
        out.push(Violation {
            clause: Clause::ExitNotPlace,
            node: Some(o),
            arc: None,
            detail: format!("exit {} is not a place", name(o)),
        });
    }
    if i == o {
        out.push(Violation {
            clause: Clause::EntryIsExit,
            node: Some(i),
            arc: None,
            detail: format!("{} is both entry and exit", name(i)),
        });
    }
    for p in net.preset(i) {
        out.push(Violation {
            clause: Clause::EntryHasIncoming,
            node: Some(i),
            arc: Some((*p, i)),
            detail: format!("arc {} -> {}", name(*p), name(i)),
        });
    }
    for s in net.postset(o) {
        out.push(Violation {
            clause: Clause::ExitHasOutgoing,
            node: Some(o),
            arc: Some((o, *s)),
            detail: format!("arc {} -> {}", name(o), name(*s)),
        });
    }
    let from_entry = graph::forward_reachable(net, [i]);
    let to_exit = graph::backward_reachable(net, [o]);
    for id in net.nodes() {
        if !from_entry.contains(&id) {
            out.push(Violation {
                clause: Clause::NotStronglyConnected,
                node: Some(id),
                arc: None,
                detail: format!("{} is not reachable from {}", name(id), name(i)),
            });
        }
        if !to_exit.contains(&id) {
            out.push(Violation {
                clause: Clause::NotStronglyConnected,
                node: Some(id),
                arc: None,
                detail: format!("{} cannot reach {}", name(id), name(o)),
            });
        }
    }
    out
}

/// Token counts per place; absent places hold zero tokens.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(BTreeMap<NodeId, u32>);

impl Marking {
    pub fn new() -> Self {
        Self::default()
    }

    /// `k` tokens on the entry place.
    pub fn initial(net: &WorkflowNet, k: u32) -> Self {
        Self::from_counts([(net.entry(), k)])
    }

    /// `k` tokens on the exit place.
    pub fn terminal(net: &WorkflowNet, k: u32) -> Self {
        Self::from_counts([(net.exit(), k)])
    }

    pub fn from_counts(counts: impl IntoIterator<Item = (NodeId, u32)>) -> Self {
        let mut m = Marking::new();
        for (p, k) in counts {
            m.add(p, k);
        }
        m
    }

    pub fn get(&self, place: NodeId) -> u32 {
        self.0.get(&place).copied().unwrap_or(0)
    }

    pub fn add(&mut self, place: NodeId, k: u32) {
        if k > 0 {
            *self.0.entry(place).or_insert(0) += k;
        }
    }

    fn take(&mut self, place: NodeId) {
        if let Some(c) = self.0.get_mut(&place) {
            *c -= 1;
            if *c == 0 {
                self.0.remove(&place);
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        self.0.iter().map(|(p, k)| (*p, *k))
    }

    pub fn total(&self) -> u64 {
        self.0.values().map(|k| *k as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FireError {
    #[error("{0} is not a transition of the net")]
    NotATransition(NodeId),
    #[error("transition {transition} is not enabled: input place {place} is unmarked")]
    NotEnabled { transition: NodeId, place: NodeId },
}

pub fn is_enabled(net: &WorkflowNet, m: &Marking, t: NodeId) -> bool {
    net.preset(t).iter().all(|p| m.get(*p) > 0)
}

/// Fires `t`: one token is removed from each place of `•t` and one added to
/// each place of `t•`.
pub fn fire(net: &WorkflowNet, m: &Marking, t: NodeId) -> Result<Marking, FireError> {
    if !net.is_transition(t) {
        return Err(FireError::NotATransition(t));
    }
    if let Some(p) = net.preset(t).iter().find(|p| m.get(**p) == 0) {
        return Err(FireError::NotEnabled {
            transition: t,
            place: *p,
        });
    }
    let mut next = m.clone();
    for p in net.preset(t) {
        next.take(*p);
    }
    for p in net.postset(t) {
        next.add(*p, 1);
    }
    Ok(next)
}
