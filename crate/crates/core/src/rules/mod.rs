//! The merge, iteration, shortcut and d-shortcut rules.
//!
//! Every rule is a guard plus an action. Applying a rule never mutates its
//! input: a new net is returned together with a [`RuleApplication`] record.

mod trace;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::color::{
    compose_transformers, star_then, union_transformers, ColorError, ColoredWorkflowNet,
};
use crate::net::{
    compute_clusters, is_free_choice_cluster, unconditionally_enables, validate, Cluster, NodeId,
    WorkflowNet,
};

pub use trace::{ReductionTrace, RuleCounts};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    Merge,
    Iteration,
    Shortcut,
    DShortcut,
}

impl RuleKind {
    pub const ALL: [RuleKind; 4] = [
        RuleKind::Merge,
        RuleKind::Iteration,
        RuleKind::Shortcut,
        RuleKind::DShortcut,
    ];
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::Merge => "merge",
            RuleKind::Iteration => "iteration",
            RuleKind::Shortcut => "shortcut",
            RuleKind::DShortcut => "d-shortcut",
        })
    }
}

/// `(|P|, |T|, |C|)` of a net.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct NetSize {
    pub places: usize,
    pub transitions: usize,
    pub clusters: usize,
}

impl NetSize {
    pub fn of(net: &WorkflowNet) -> NetSize {
        NetSize {
            places: net.place_count(),
            transitions: net.transition_count(),
            clusters: compute_clusters(net).len(),
        }
    }

    pub fn nodes(&self) -> usize {
        self.places + self.transitions
    }
}

/// A rule together with its operands, before it is applied.
///
/// Operands are `[t1, t2]` for merge, `[t]` for iteration and
/// `[t, representative of c]` for the shortcut variants.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleInstance {
    pub kind: RuleKind,
    pub operands: Vec<NodeId>,
}

impl RuleInstance {
    pub fn merge(t1: NodeId, t2: NodeId) -> Self {
        RuleInstance {
            kind: RuleKind::Merge,
            operands: vec![t1, t2],
        }
    }

    pub fn iteration(t: NodeId) -> Self {
        RuleInstance {
            kind: RuleKind::Iteration,
            operands: vec![t],
        }
    }

    pub fn shortcut(t: NodeId, cluster_rep: NodeId) -> Self {
        RuleInstance {
            kind: RuleKind::Shortcut,
            operands: vec![t, cluster_rep],
        }
    }

    pub fn d_shortcut(t: NodeId, cluster_rep: NodeId) -> Self {
        RuleInstance {
            kind: RuleKind::DShortcut,
            operands: vec![t, cluster_rep],
        }
    }
}

/// Record of one applied rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleApplication {
    pub kind: RuleKind,
    pub operands: Vec<NodeId>,
    pub created: Vec<NodeId>,
    pub removed: Vec<NodeId>,
    /// Net size after the application.
    pub size: NetSize,
}

impl RuleApplication {
    pub fn instance(&self) -> RuleInstance {
        RuleInstance {
            kind: self.kind,
            operands: self.operands.clone(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RuleError {
    #[error("{kind} guard failed: {reason}")]
    GuardFailed { kind: RuleKind, reason: String },
    #[error("{kind} produced a net that is not a workflow net: {diagnostic}")]
    InvalidResult { kind: RuleKind, diagnostic: String },
    #[error("transformer algebra: {0}")]
    Color(#[from] ColorError),
}

fn guard(kind: RuleKind, reason: String) -> RuleError {
    RuleError::GuardFailed { kind, reason }
}

fn names(net: &WorkflowNet, ids: &BTreeSet<NodeId>) -> String {
    let v: Vec<&str> = ids.iter().map(|n| net.name(*n)).collect();
    format!("{{{}}}", v.join(","))
}

fn finish(
    kind: RuleKind,
    operands: Vec<NodeId>,
    created: Vec<NodeId>,
    removed: Vec<NodeId>,
    out: ColoredWorkflowNet,
) -> Result<(ColoredWorkflowNet, RuleApplication), RuleError> {
    let violations = validate(out.net());
    if !violations.is_empty() {
        let diagnostic = violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        return Err(RuleError::InvalidResult { kind, diagnostic });
    }
    let size = NetSize::of(out.net());
    Ok((
        out,
        RuleApplication {
            kind,
            operands,
            created,
            removed,
            size,
        },
    ))
}

fn merge_guard(net: &WorkflowNet, t1: NodeId, t2: NodeId) -> Result<(), String> {
    if !net.is_transition(t1) || !net.is_transition(t2) {
        return Err("operands must be transitions".into());
    }
    if t1 == t2 {
        return Err("operands must be distinct".into());
    }
    if net.preset(t1) != net.preset(t2) {
        return Err(format!(
            "presets differ: {} vs {}",
            names(net, net.preset(t1)),
            names(net, net.preset(t2))
        ));
    }
    if net.postset(t1) != net.postset(t2) {
        return Err(format!(
            "postsets differ: {} vs {}",
            names(net, net.postset(t1)),
            names(net, net.postset(t2))
        ));
    }
    Ok(())
}

/// Replaces `t1` and `t2`, which share preset and postset, by one fresh
/// transition carrying the union of their transformers.
pub fn apply_merge(
    cnet: &ColoredWorkflowNet,
    t1: NodeId,
    t2: NodeId,
) -> Result<(ColoredWorkflowNet, RuleApplication), RuleError> {
    let kind = RuleKind::Merge;
    let net = cnet.net();
    merge_guard(net, t1, t2).map_err(|r| guard(kind, r))?;
    let lambda = union_transformers(cnet.transformer(t1), cnet.transformer(t2))?;
    let mut out = cnet.clone();
    let name = format!("{}|{}", net.name(t1), net.name(t2));
    let tm = out.add_transition(&name, lambda);
    out.remove_node(t1);
    out.remove_node(t2);
    finish(kind, vec![t1, t2], vec![tm], vec![t1, t2], out)
}

fn iteration_guard(net: &WorkflowNet, t: NodeId) -> Result<Cluster, String> {
    if !net.is_transition(t) {
        return Err(format!("{} is not a transition", t));
    }
    let c = compute_clusters(net).of(t).clone();
    if net.preset(t) != net.postset(t) {
        return Err(format!("{} is not a self-loop: preset differs from postset", net.name(t)));
    }
    if !is_free_choice_cluster(net, &c) {
        return Err(format!("cluster of {} is not free choice", net.name(t)));
    }
    if c.transitions(net).all(|u| u == t) {
        return Err(format!("{} is the only transition of its cluster", net.name(t)));
    }
    if let Some(p) = net
        .preset(t)
        .iter()
        .find(|p| net.preset(**p).iter().all(|x| *x == t))
    {
        return Err(format!("{} is the only input transition of {}", net.name(t), net.name(*p)));
    }
    Ok(c)
}

/// Removes the self-loop `t`; every other transition `t'` of its cluster
/// gets `λ(t)* · λ(t')`.
pub fn apply_iteration(
    cnet: &ColoredWorkflowNet,
    t: NodeId,
) -> Result<(ColoredWorkflowNet, RuleApplication), RuleError> {
    let kind = RuleKind::Iteration;
    let net = cnet.net();
    let c = iteration_guard(net, t).map_err(|r| guard(kind, r))?;
    let lambda = cnet.transformer(t);
    let mut out = cnet.clone();
    for other in c.transitions(net).filter(|u| *u != t) {
        let updated = star_then(lambda, cnet.transformer(other))?;
        out.set_transformer(other, updated);
    }
    out.remove_node(t);
    finish(kind, vec![t], Vec::new(), vec![t], out)
}

fn shortcut_guard(
    net: &WorkflowNet,
    t: NodeId,
    c_rep: NodeId,
    single: bool,
) -> Result<Cluster, String> {
    if !net.is_transition(t) {
        return Err(format!("{} is not a transition", t));
    }
    let clusters = compute_clusters(net);
    let c = match clusters.by_rep(c_rep) {
        Some(c) => c.clone(),
        None => return Err(format!("{} does not represent a cluster", c_rep)),
    };
    if c.contains(net.exit()) {
        return Err("the cluster is [o]".into());
    }
    if c.contains(t) {
        return Err(format!("the cluster is [{}]", net.name(t)));
    }
    if !is_free_choice_cluster(net, &c) {
        return Err("the cluster is not free choice".into());
    }
    if !unconditionally_enables(net, t, &c) {
        return Err(format!(
            "{} does not unconditionally enable the cluster of {}",
            net.name(t),
            net.name(c_rep)
        ));
    }
    let transitions: Vec<NodeId> = c.transitions(net).collect();
    if single && transitions.len() != 1 {
        return Err(format!("the cluster has {} transitions, not 1", transitions.len()));
    }
    for u in &transitions {
        let kept: BTreeSet<NodeId> = net.postset(t).difference(net.preset(*u)).copied().collect();
        if let Some(p) = kept.intersection(net.postset(*u)).next() {
            return Err(format!(
                "place {} would need an arc of weight 2 from the fused transition",
                net.name(*p)
            ));
        }
    }
    // Either every place of c keeps an input transition or none does (and c
    // goes away); anything else strands a place.
    let fed = |p: NodeId| {
        net.preset(p).iter().any(|x| *x != t)
            || transitions.iter().any(|u| {
                net.postset(*u).contains(&p)
                    || (net.postset(t).contains(&p) && !net.preset(*u).contains(&p))
            })
    };
    let places: Vec<NodeId> = c.places(net).collect();
    if places.iter().any(|p| fed(*p)) {
        if let Some(p) = places.iter().find(|p| !fed(**p)) {
            return Err(format!(
                "place {} would lose its last input transition",
                net.name(*p)
            ));
        }
    }
    Ok(c)
}

fn apply_shortcut_kind(
    cnet: &ColoredWorkflowNet,
    t: NodeId,
    c_rep: NodeId,
    kind: RuleKind,
) -> Result<(ColoredWorkflowNet, RuleApplication), RuleError> {
    let net = cnet.net();
    let c = shortcut_guard(net, t, c_rep, kind == RuleKind::DShortcut)
        .map_err(|r| guard(kind, r))?;
    let mut out = cnet.clone();
    let mut created = Vec::new();
    for u in c.transitions(net) {
        let lambda = compose_transformers(cnet.transformer(t), cnet.transformer(u))?;
        let name = format!("{}&{}", net.name(t), net.name(u));
        created.push(out.add_transition(&name, lambda));
    }
    out.remove_node(t);
    let mut removed = vec![t];
    let orphaned = c.places(net).all(|p| out.net().preset(p).is_empty());
    if orphaned {
        for n in c.nodes() {
            out.remove_node(*n);
            removed.push(*n);
        }
    }
    finish(kind, vec![t, c_rep], created, removed, out)
}

/// Fuses `t` with every transition of the free-choice cluster (given by its
/// representative) that `t` unconditionally enables.
pub fn apply_shortcut(
    cnet: &ColoredWorkflowNet,
    t: NodeId,
    c_rep: NodeId,
) -> Result<(ColoredWorkflowNet, RuleApplication), RuleError> {
    apply_shortcut_kind(cnet, t, c_rep, RuleKind::Shortcut)
}

/// The shortcut rule restricted to clusters with a single transition.
pub fn apply_d_shortcut(
    cnet: &ColoredWorkflowNet,
    t: NodeId,
    c_rep: NodeId,
) -> Result<(ColoredWorkflowNet, RuleApplication), RuleError> {
    apply_shortcut_kind(cnet, t, c_rep, RuleKind::DShortcut)
}

pub fn apply(
    cnet: &ColoredWorkflowNet,
    instance: &RuleInstance,
) -> Result<(ColoredWorkflowNet, RuleApplication), RuleError> {
    let ops = &instance.operands;
    let arity = match instance.kind {
        RuleKind::Iteration => 1,
        _ => 2,
    };
    if ops.len() != arity {
        return Err(guard(
            instance.kind,
            format!("expected {arity} operands, got {}", ops.len()),
        ));
    }
    match instance.kind {
        RuleKind::Merge => apply_merge(cnet, ops[0], ops[1]),
        RuleKind::Iteration => apply_iteration(cnet, ops[0]),
        RuleKind::Shortcut => apply_shortcut(cnet, ops[0], ops[1]),
        RuleKind::DShortcut => apply_d_shortcut(cnet, ops[0], ops[1]),
    }
}

/// True iff the guard of `instance` holds on `net`.
pub fn guard_holds(net: &WorkflowNet, instance: &RuleInstance) -> bool {
    let ops = &instance.operands;
    match (instance.kind, ops.as_slice()) {
        (RuleKind::Merge, [a, b]) => merge_guard(net, *a, *b).is_ok(),
        (RuleKind::Iteration, [t]) => iteration_guard(net, *t).is_ok(),
        (RuleKind::Shortcut, [t, c]) => shortcut_guard(net, *t, *c, false).is_ok(),
        (RuleKind::DShortcut, [t, c]) => shortcut_guard(net, *t, *c, true).is_ok(),
        _ => false,
    }
}

/// All instances of `kind` whose guard holds, in ascending operand order.
pub fn enumerate_applicable(net: &WorkflowNet, kind: RuleKind) -> Vec<RuleInstance> {
    let mut out = Vec::new();
    match kind {
        RuleKind::Merge => {
            let mut groups: BTreeMap<(&BTreeSet<NodeId>, &BTreeSet<NodeId>), Vec<NodeId>> =
                BTreeMap::new();
            for t in net.transitions() {
                groups
                    .entry((net.preset(t), net.postset(t)))
                    .or_default()
                    .push(t);
            }
            for group in groups.values() {
                for (k, a) in group.iter().enumerate() {
                    for b in &group[k + 1..] {
                        out.push(RuleInstance::merge(*a, *b));
                    }
                }
            }
        }
        RuleKind::Iteration => {
            for t in net.transitions() {
                if iteration_guard(net, t).is_ok() {
                    out.push(RuleInstance::iteration(t));
                }
            }
        }
        RuleKind::Shortcut | RuleKind::DShortcut => {
            let clusters = compute_clusters(net);
            for t in net.transitions() {
                let reps: BTreeSet<NodeId> =
                    net.postset(t).iter().map(|p| clusters.of(*p).rep()).collect();
                for rep in reps {
                    let instance = RuleInstance {
                        kind,
                        operands: vec![t, rep],
                    };
                    if guard_holds(net, &instance) {
                        out.push(instance);
                    }
                }
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn small_loop_merge_candidates() {
        let cnet = models::small_loop();
        let net = cnet.net();
        let id = |n| net.find(n).unwrap();
        assert_eq!(
            enumerate_applicable(net, RuleKind::Merge),
            vec![RuleInstance::merge(id("t2"), id("t3"))]
        );
        assert!(enumerate_applicable(net, RuleKind::Iteration).is_empty());
    }

    #[test]
    fn merge_guard_names_difference() {
        let cnet = models::small_loop();
        let net = cnet.net();
        let err = apply_merge(&cnet, net.find("t2").unwrap(), net.find("t5").unwrap()).unwrap_err();
        match err {
            RuleError::GuardFailed { kind, reason } => {
                assert_eq!(kind, RuleKind::Merge);
                assert!(reason.contains("presets differ"), "{reason}");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn shortcut_guards() {
        let cnet = models::small_loop();
        let net = cnet.net();
        let id = |n| net.find(n).unwrap();
        let clusters = compute_clusters(net);
        let o_rep = clusters.of(net.exit()).rep();
        assert!(apply_shortcut(&cnet, id("t5"), o_rep).is_err());
        // t4 feeds c1 whose cluster holds two transitions: shortcut yes, d-shortcut no.
        let c1 = clusters.of(id("c1")).rep();
        assert!(guard_holds(net, &RuleInstance::shortcut(id("t4"), c1)));
        assert!(!guard_holds(net, &RuleInstance::d_shortcut(id("t4"), c1)));
        let (after, app) = apply_shortcut(&cnet, id("t4"), c1).unwrap();
        assert_eq!(app.created.len(), 2);
        assert!(after.net().contains(id("c1")), "c1 is still fed by t1");
    }

    #[test]
    fn iteration_requires_companion() {
        let cnet = models::small_loop();
        let net = cnet.net();
        let err = apply_iteration(&cnet, net.find("t2").unwrap()).unwrap_err();
        assert!(matches!(err, RuleError::GuardFailed { .. }));
    }

    #[test]
    fn completely_reduced_net_has_no_candidates() {
        let cnet = ColoredWorkflowNet::unit("single", crate::net::tests::single());
        for kind in RuleKind::ALL {
            assert!(enumerate_applicable(cnet.net(), kind).is_empty());
        }
    }
}
