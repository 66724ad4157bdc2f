//! Clusters and the free-choice property.

use std::collections::{BTreeMap, BTreeSet};

use super::{NodeId, WorkflowNet};

/// The smallest node set closed under "a place brings its output
/// transitions, a transition brings its input places".
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cluster {
    nodes: BTreeSet<NodeId>,
}

impl Cluster {
    pub fn new(nodes: BTreeSet<NodeId>) -> Self {
        assert!(!nodes.is_empty(), "a cluster holds at least one node");
        Cluster { nodes }
    }

    /// Canonical representative: the smallest id in the cluster.
    pub fn rep(&self) -> NodeId {
        *self.nodes.iter().next().unwrap()
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains(&id)
    }

    pub fn places<'a>(&'a self, net: &'a WorkflowNet) -> impl Iterator<Item = NodeId> + 'a {
        self.nodes.iter().copied().filter(|n| net.is_place(*n))
    }

    pub fn transitions<'a>(&'a self, net: &'a WorkflowNet) -> impl Iterator<Item = NodeId> + 'a {
        self.nodes.iter().copied().filter(|n| net.is_transition(*n))
    }
}

/// The cluster partition of a net, ordered by representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clusters {
    clusters: Vec<Cluster>,
    index: BTreeMap<NodeId, usize>,
}

impl Clusters {
    pub fn iter(&self) -> impl Iterator<Item = &Cluster> {
        self.clusters.iter()
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// `[x]`, the cluster containing `x`.
    pub fn of(&self, x: NodeId) -> &Cluster {
        &self.clusters[self.index[&x]]
    }

    /// Position of `[x]` in representative order.
    pub fn position(&self, x: NodeId) -> usize {
        self.index[&x]
    }

    pub fn get(&self, position: usize) -> &Cluster {
        &self.clusters[position]
    }

    /// The cluster whose representative is `rep`, if any.
    pub fn by_rep(&self, rep: NodeId) -> Option<&Cluster> {
        self.index
            .get(&rep)
            .map(|i| &self.clusters[*i])
            .filter(|c| c.rep() == rep)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

pub fn compute_clusters(net: &WorkflowNet) -> Clusters {
    let ids: Vec<NodeId> = net.nodes().collect();
    let pos: BTreeMap<NodeId, usize> = ids.iter().enumerate().map(|(k, id)| (*id, k)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    for p in net.places() {
        for t in net.postset(p) {
            let (a, b) = (find(&mut parent, pos[&p]), find(&mut parent, pos[t]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: BTreeMap<usize, BTreeSet<NodeId>> = BTreeMap::new();
    for (k, id) in ids.iter().enumerate() {
        let root = find(&mut parent, k);
        groups.entry(root).or_default().insert(*id);
    }
    let mut clusters: Vec<Cluster> = groups.into_values().map(Cluster::new).collect();
    clusters.sort_by_key(Cluster::rep);
    let mut index = BTreeMap::new();
    for (k, c) in clusters.iter().enumerate() {
        for n in c.nodes() {
            index.insert(*n, k);
        }
    }
    Clusters { clusters, index }
}

/// True iff every place of `c` has an arc to every transition of `c`.
pub fn is_free_choice_cluster(net: &WorkflowNet, c: &Cluster) -> bool {
    c.places(net)
        .all(|p| c.transitions(net).all(|t| net.has_arc(p, t)))
}

pub fn is_free_choice_net(net: &WorkflowNet) -> bool {
    compute_clusters(net)
        .iter()
        .all(|c| is_free_choice_cluster(net, c))
}

/// The place-pair formulation: any two places share no output transition
/// or share all of them.
pub fn pairwise_free_choice(net: &WorkflowNet) -> bool {
    let places: Vec<NodeId> = net.places().collect();
    places.iter().enumerate().all(|(k, p1)| {
        places[k + 1..].iter().all(|p2| {
            let (a, b) = (net.postset(*p1), net.postset(*p2));
            a.is_disjoint(b) || a == b
        })
    })
}

/// True iff `t` is a transition and every place of `c` is an output place
/// of `t`. Clusters without places are never enabled this way.
pub fn unconditionally_enables(net: &WorkflowNet, t: NodeId, c: &Cluster) -> bool {
    if !net.is_transition(t) {
        return false;
    }
    let post = net.postset(t);
    let mut places = c.places(net).peekable();
    places.peek().is_some() && places.all(|p| post.contains(&p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two(missing_arc: bool) -> WorkflowNet {
        let mut b = WorkflowNet::builder();
        let i = b.place("i");
        let t0 = b.transition("t0");
        let p1 = b.place("p1");
        let p2 = b.place("p2");
        let t1 = b.transition("t1");
        let t2 = b.transition("t2");
        let o = b.place("o");
        b.arc(i, t0).arc(t0, p1).arc(t0, p2);
        b.arc(p1, t1).arc(p2, t1).arc(p2, t2);
        if !missing_arc {
            b.arc(p1, t2);
        }
        b.arc(t1, o).arc(t2, o).entry(i).exit(o);
        b.build().unwrap()
    }

    #[test]
    fn partition_and_exit_singleton() {
        let net = two_by_two(false);
        let cs = compute_clusters(&net);
        let total: usize = cs.iter().map(|c| c.nodes().len()).sum();
        assert_eq!(total, net.node_count());
        let o = net.exit();
        assert_eq!(cs.of(o).nodes().len(), 1);
        let p1 = net.find("p1").unwrap();
        assert_eq!(cs.of(p1).nodes().len(), 4);
        assert_eq!(cs.of(p1).rep(), p1);
        assert_eq!(cs.by_rep(p1), Some(cs.of(p1)));
    }

    #[test]
    fn free_choice_detection_both_formulations() {
        let fc = two_by_two(false);
        assert!(is_free_choice_net(&fc));
        assert!(pairwise_free_choice(&fc));
        let nfc = two_by_two(true);
        let cs = compute_clusters(&nfc);
        let p1 = nfc.find("p1").unwrap();
        assert!(!is_free_choice_cluster(&nfc, cs.of(p1)));
        assert!(!is_free_choice_net(&nfc));
        assert!(!pairwise_free_choice(&nfc));
    }

    #[test]
    fn unconditional_enabling() {
        let net = two_by_two(false);
        let cs = compute_clusters(&net);
        let t0 = net.find("t0").unwrap();
        let t1 = net.find("t1").unwrap();
        let p1 = net.find("p1").unwrap();
        assert!(unconditionally_enables(&net, t0, cs.of(p1)));
        assert!(!unconditionally_enables(&net, t1, cs.of(p1)));
        assert!(!unconditionally_enables(&net, p1, cs.of(p1)));
    }
}
