//! Potential synchronizers and fragments.
//!
//! Synchronizers are overapproximated structurally: starting from a
//! free-choice cluster, the free-choice output places of its transitions are
//! marked visited, and every cluster whose places all become visited is
//! expanded the same way. A cluster that gets all of its own places visited
//! is a potential synchronizer. Its fragment is then grown backwards from
//! the cluster over transitions whose outputs already lie in the fragment
//! and whose inputs were visited.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::net::graph::is_acyclic_within;
use crate::net::{compute_clusters, is_free_choice_cluster, Cluster, Clusters, NodeId, WorkflowNet};

/// A synchronizer cluster with the node set of the loops it synchronizes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fragment {
    /// Representative of the synchronizer cluster.
    pub synchronizer: NodeId,
    pub nodes: BTreeSet<NodeId>,
    /// Transitions with input places in the fragment and output places
    /// outside it.
    pub exits: Vec<NodeId>,
}

impl Fragment {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains(&id)
    }

    pub fn transitions<'a>(&'a self, net: &'a WorkflowNet) -> impl Iterator<Item = NodeId> + 'a {
        self.nodes.iter().copied().filter(|n| net.is_transition(*n))
    }

    pub fn places<'a>(&'a self, net: &'a WorkflowNet) -> impl Iterator<Item = NodeId> + 'a {
        self.nodes.iter().copied().filter(|n| net.is_place(*n))
    }

    /// True iff the subgraph induced by the fragment has no cycle.
    pub fn is_acyclic(&self, net: &WorkflowNet) -> bool {
        is_acyclic_within(net, &self.nodes)
    }

    /// Updates the node set after a rule removed and created nodes: removed
    /// ids are dropped, created transitions are added with their places.
    pub fn track(&mut self, net: &WorkflowNet, removed: &[NodeId], created: &[NodeId]) {
        for r in removed {
            self.nodes.remove(r);
        }
        for c in created {
            self.nodes.insert(*c);
            self.nodes.extend(net.preset(*c).iter().copied());
            self.nodes.extend(net.postset(*c).iter().copied());
        }
        self.nodes.retain(|n| net.contains(*n));
    }

    /// Node names, sorted, for display and comparisons.
    pub fn names(&self, net: &WorkflowNet) -> Vec<String> {
        let mut v: Vec<String> = self.nodes.iter().map(|n| net.name(*n).to_string()).collect();
        v.sort();
        v
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FragmentError {
    #[error("cluster of {0} is not a potential synchronizer")]
    NotPotential(NodeId),
    #[error("fragment of {synchronizer} is malformed at transition {transition}: {reason}")]
    Malformed {
        synchronizer: NodeId,
        transition: NodeId,
        reason: MalformedReason,
    },
    #[error("fragment of {0} contains no cycle")]
    Acyclic(NodeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MalformedReason {
    /// Output places partly inside and partly outside the fragment.
    PartialExit,
    /// Leaves the fragment from a cluster that is not a potential
    /// synchronizer.
    ExitWithoutSynchronizer,
}

impl fmt::Display for MalformedReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MalformedReason::PartialExit => "it ends partially inside and partially outside",
            MalformedReason::ExitWithoutSynchronizer => {
                "it leaves the fragment from a cluster without a synchronizer"
            }
        })
    }
}

/// Places visited from `start`, and whether all of `start`'s places were
/// visited.
fn visit(net: &WorkflowNet, clusters: &Clusters, start: &Cluster) -> (BTreeSet<NodeId>, bool) {
    let fc: Vec<bool> = clusters
        .iter()
        .map(|c| is_free_choice_cluster(net, c))
        .collect();
    let mut visited: BTreeSet<NodeId> = BTreeSet::new();
    let mut expanded = vec![false; clusters.len()];
    let mut queue = VecDeque::from([clusters.position(start.rep())]);
    expanded[clusters.position(start.rep())] = true;
    while let Some(k) = queue.pop_front() {
        let c = clusters.get(k);
        for t in c.transitions(net) {
            for p in net.postset(t) {
                let pk = clusters.position(*p);
                if !fc[pk] || !visited.insert(*p) {
                    continue;
                }
                let target = clusters.get(pk);
                if !expanded[pk] && target.places(net).all(|q| visited.contains(&q)) {
                    expanded[pk] = true;
                    queue.push_back(pk);
                }
            }
        }
    }
    let complete = start.places(net).all(|p| visited.contains(&p));
    (visited, complete)
}

fn potential_in(net: &WorkflowNet, clusters: &Clusters, c: &Cluster) -> Option<BTreeSet<NodeId>> {
    if !is_free_choice_cluster(net, c) || c.places(net).next().is_none() {
        return None;
    }
    let (visited, complete) = visit(net, clusters, c);
    complete.then_some(visited)
}

/// Free-choice clusters that can re-reach themselves, sorted by
/// representative.
pub fn find_potential_synchronizers(net: &WorkflowNet) -> Vec<Cluster> {
    let clusters = compute_clusters(net);
    clusters
        .iter()
        .filter(|c| potential_in(net, &clusters, c).is_some())
        .cloned()
        .collect()
}

/// Grows the fragment of `c` backwards and checks it for the shapes that
/// only unsound nets exhibit.
pub fn compute_fragment(net: &WorkflowNet, c: &Cluster) -> Result<Fragment, FragmentError> {
    let clusters = compute_clusters(net);
    let rep = c.rep();
    let visited = potential_in(net, &clusters, c).ok_or(FragmentError::NotPotential(rep))?;
    let potential: BTreeSet<NodeId> = clusters
        .iter()
        .filter(|d| potential_in(net, &clusters, d).is_some())
        .map(Cluster::rep)
        .collect();

    let mut nodes: BTreeSet<NodeId> = c.nodes().clone();
    loop {
        let mut grew = false;
        for t in net.transitions() {
            if nodes.contains(&t) {
                continue;
            }
            let post = net.postset(t);
            let pre = net.preset(t);
            if !post.is_empty()
                && post.iter().all(|p| nodes.contains(p))
                && pre.iter().all(|p| visited.contains(p))
            {
                nodes.insert(t);
                nodes.extend(pre.iter().copied());
                grew = true;
            }
        }
        if !grew {
            break;
        }
    }

    let mut exits = Vec::new();
    for t in net.transitions() {
        let inside_pre = net.preset(t).iter().any(|p| nodes.contains(p));
        if !inside_pre && !nodes.contains(&t) {
            continue;
        }
        let post = net.postset(t);
        let inside = post.iter().filter(|p| nodes.contains(p)).count();
        if inside == post.len() {
            continue;
        }
        if inside > 0 {
            return Err(FragmentError::Malformed {
                synchronizer: rep,
                transition: t,
                reason: MalformedReason::PartialExit,
            });
        }
        if !potential.contains(&clusters.of(t).rep()) {
            return Err(FragmentError::Malformed {
                synchronizer: rep,
                transition: t,
                reason: MalformedReason::ExitWithoutSynchronizer,
            });
        }
        exits.push(t);
    }

    let fragment = Fragment {
        synchronizer: rep,
        nodes,
        exits,
    };
    if fragment.is_acyclic(net) {
        return Err(FragmentError::Acyclic(rep));
    }
    Ok(fragment)
}

/// A fragment minimal under node-set inclusion: the smallest by node count,
/// ties broken by synchronizer representative.
pub fn select_minimal_fragment(fragments: &[Fragment]) -> Option<&Fragment> {
    fragments
        .iter()
        .min_by_key(|f| (f.nodes.len(), f.synchronizer))
}
