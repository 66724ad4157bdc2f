//! Reachability and cycle predicates on the net graph `(P ∪ T, F)`.

use std::collections::{BTreeMap, BTreeSet};

use super::{NodeId, WorkflowNet};

fn reach<'a, F>(starts: impl IntoIterator<Item = NodeId>, next: F) -> BTreeSet<NodeId>
where
    F: Fn(NodeId) -> &'a BTreeSet<NodeId>,
{
    let mut seen = BTreeSet::new();
    let mut stack: Vec<NodeId> = starts.into_iter().collect();
    while let Some(n) = stack.pop() {
        if seen.insert(n) {
            stack.extend(next(n).iter().copied().filter(|m| !seen.contains(m)));
        }
    }
    seen
}

/// Nodes reachable from `starts` (inclusive) along arcs.
pub fn forward_reachable(
    net: &WorkflowNet,
    starts: impl IntoIterator<Item = NodeId>,
) -> BTreeSet<NodeId> {
    reach(starts, |n| net.postset(n))
}

/// Nodes from which some node of `targets` is reachable (inclusive).
pub fn backward_reachable(
    net: &WorkflowNet,
    targets: impl IntoIterator<Item = NodeId>,
) -> BTreeSet<NodeId> {
    reach(targets, |n| net.preset(n))
}

/// True iff the subgraph induced by `nodes` has no directed cycle.
pub fn is_acyclic_within(net: &WorkflowNet, nodes: &BTreeSet<NodeId>) -> bool {
    let mut indegree: BTreeMap<NodeId, usize> = nodes
        .iter()
        .map(|n| (*n, net.preset(*n).intersection(nodes).count()))
        .collect();
    let mut ready: Vec<NodeId> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(n, _)| *n)
        .collect();
    let mut removed = 0;
    while let Some(n) = ready.pop() {
        removed += 1;
        for s in net.postset(n).intersection(nodes) {
            let d = indegree.get_mut(s).unwrap();
            *d -= 1;
            if *d == 0 {
                ready.push(*s);
            }
        }
    }
    removed == nodes.len()
}

/// Acyclicity of the net graph without the `(o, i)` closure arc.
pub fn is_acyclic(net: &WorkflowNet) -> bool {
    is_acyclic_within(net, &net.nodes().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::tests::single;

    #[test]
    fn single_transition_is_acyclic() {
        assert!(is_acyclic(&single()));
    }

    #[test]
    fn loop_is_detected_and_scoped() {
        let mut b = WorkflowNet::builder();
        let i = b.place("i");
        let t1 = b.transition("t1");
        let c = b.place("c");
        let back = b.transition("back");
        let d = b.place("d");
        let out = b.transition("out");
        let o = b.place("o");
        b.arc(i, t1).arc(t1, c).arc(c, back).arc(back, d).arc(d, out).arc(out, o);
        b.arc(d, t1);
        b.entry(i).exit(o);
        let net = b.build().unwrap();
        assert!(!is_acyclic(&net));
        assert!(is_acyclic_within(&net, &[i, t1, c, o].into()));
        assert!(!is_acyclic_within(&net, &[t1, c, back, d].into()));
        assert!(forward_reachable(&net, [i]).contains(&o));
        assert!(backward_reachable(&net, [o]).contains(&i));
    }
}
