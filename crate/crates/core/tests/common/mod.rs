//! Helpers shared by the integration tests: structural isomorphism, a
//! compact way to write unit nets, and the rule differential.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use cwfnet::color::ColoredWorkflowNet;
use cwfnet::net::{validate, NodeId, WorkflowNet};
use cwfnet::oracle::check_equivalence;
use cwfnet::rules::{apply, enumerate_applicable, RuleInstance, RuleKind};

/// A directed bipartite graph with labelled nodes. Labels are 0/1 for
/// place/transition plus 2/4 for the entry/exit pins.
#[derive(Clone, Debug)]
pub struct Graph {
    labels: Vec<u8>,
    succ: Vec<BTreeSet<usize>>,
    pred: Vec<BTreeSet<usize>>,
}

impl Graph {
    /// The whole net, with `i` and `o` pinned.
    pub fn of_net(net: &WorkflowNet) -> Graph {
        let nodes: BTreeSet<NodeId> = net.nodes().collect();
        Graph::induced(net, &nodes, true)
    }

    /// The subgraph induced by `nodes`; pins are optional.
    pub fn induced(net: &WorkflowNet, nodes: &BTreeSet<NodeId>, pin: bool) -> Graph {
        let index: BTreeMap<NodeId, usize> = nodes.iter().enumerate().map(|(k, n)| (*n, k)).collect();
        let mut g = Graph {
            labels: vec![0; nodes.len()],
            succ: vec![BTreeSet::new(); nodes.len()],
            pred: vec![BTreeSet::new(); nodes.len()],
        };
        for (n, k) in &index {
            let mut label = u8::from(net.is_transition(*n));
            if pin && *n == net.entry() {
                label |= 2;
            }
            if pin && *n == net.exit() {
                label |= 4;
            }
            g.labels[*k] = label;
        }
        for (a, b) in net.arcs() {
            if let (Some(x), Some(y)) = (index.get(&a), index.get(&b)) {
                g.succ[*x].insert(*y);
                g.pred[*y].insert(*x);
            }
        }
        g
    }

    fn signature(&self, k: usize) -> (u8, usize, usize) {
        (self.labels[k], self.succ[k].len(), self.pred[k].len())
    }
}

/// True iff there is a label-preserving bijection that maps arcs onto arcs.
pub fn isomorphic(a: &Graph, b: &Graph) -> bool {
    let n = a.labels.len();
    if n != b.labels.len() {
        return false;
    }
    let mut sa: Vec<_> = (0..n).map(|k| a.signature(k)).collect();
    let mut sb: Vec<_> = (0..n).map(|k| b.signature(k)).collect();
    sa.sort();
    sb.sort();
    if sa != sb {
        return false;
    }
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    extend(a, b, 0, &mut map, &mut used)
}

fn extend(a: &Graph, b: &Graph, k: usize, map: &mut [usize], used: &mut [bool]) -> bool {
    if k == map.len() {
        return true;
    }
    for cand in 0..map.len() {
        if used[cand] || a.signature(k) != b.signature(cand) {
            continue;
        }
        let consistent = (0..k).all(|j| {
            a.succ[k].contains(&j) == b.succ[cand].contains(&map[j])
                && a.pred[k].contains(&j) == b.pred[cand].contains(&map[j])
        }) && a.succ[k].contains(&k) == b.succ[cand].contains(&cand);
        if !consistent {
            continue;
        }
        map[k] = cand;
        used[cand] = true;
        if extend(a, b, k + 1, map, used) {
            return true;
        }
        used[cand] = false;
    }
    map[k] = usize::MAX;
    false
}

/// A net from `(transition, inputs, outputs)` triples; places are created
/// on first mention and `i`/`o` are the entry and exit.
pub fn net_from(transitions: &[(&str, &[&str], &[&str])]) -> WorkflowNet {
    let mut b = WorkflowNet::builder();
    let mut places: BTreeMap<String, NodeId> = BTreeMap::new();
    let mut place = |b: &mut cwfnet::net::NetBuilder, name: &str| {
        *places
            .entry(name.to_string())
            .or_insert_with(|| b.place(name))
    };
    let i = place(&mut b, "i");
    let o = place(&mut b, "o");
    for (name, pre, post) in transitions {
        let t = b.transition(name);
        for p in *pre {
            let p = place(&mut b, p);
            b.arc(p, t);
        }
        for p in *post {
            let p = place(&mut b, p);
            b.arc(t, p);
        }
    }
    b.entry(i).exit(o);
    b.build().expect("test net")
}

/// Outcome of checking every applicable rule instance of one net.
#[derive(Clone, Debug, Default)]
pub struct RuleCheck {
    pub instances: usize,
    /// Instances whose equivalence check ran out of states.
    pub skipped: usize,
    pub failures: Vec<String>,
}

/// Applies each applicable instance of each rule to `cnet` and compares the
/// result with the original: it must be a workflow net with the same
/// soundness and the same summary.
pub fn check_rules(cnet: &ColoredWorkflowNet, cap: usize) -> RuleCheck {
    let mut out = RuleCheck::default();
    let instances: Vec<RuleInstance> = RuleKind::ALL
        .iter()
        .flat_map(|k| enumerate_applicable(cnet.net(), *k))
        .collect();
    for inst in instances {
        out.instances += 1;
        let (next, _) = match apply(cnet, &inst) {
            Ok(r) => r,
            Err(e) => {
                out.failures.push(format!("{}: {inst:?} failed: {e}", cnet.name()));
                continue;
            }
        };
        if !validate(next.net()).is_empty() {
            out.failures
                .push(format!("{}: {inst:?} left a non-workflow net", cnet.name()));
            continue;
        }
        match check_equivalence(cnet, &next, cap) {
            Ok(r) if r.equivalent() => {}
            Ok(r) => out.failures.push(format!(
                "{}: {inst:?} changed the behaviour ({} / {} differing pairs)",
                cnet.name(),
                r.only_in_first.len(),
                r.only_in_second.len()
            )),
            Err(_) => out.skipped += 1,
        }
    }
    out
}
