//! The reduction driver.
//!
//! While the net has a cycle, a minimal fragment around a potential
//! synchronizer is picked. Phase 1 removes the non-synchronizers inside it
//! with merges, iterations and d-shortcuts. Phase 2 ranks the remaining
//! clusters and shortcuts backward transitions into lower-ranked clusters
//! until the fragment is acyclic. Once the whole net is acyclic, merges and
//! d-shortcuts finish the job.
//!
//! Every rule application is recorded in a [`ReductionTrace`]. A net that
//! ends as a single transition between `i` and `o` is sound and that
//! transition's transformer is its summary.

mod fragment;

use std::collections::{BTreeMap, BTreeSet};

use crate::color::{ColoredWorkflowNet, Transformer};
use crate::net::graph::is_acyclic;
use crate::net::{
    compute_clusters, is_free_choice_net, unconditionally_enables, validate, NodeId, WorkflowNet,
};
use crate::oracle::Summary;
use crate::rules::{
    apply, enumerate_applicable, guard_holds, NetSize, ReductionTrace, RuleApplication,
    RuleCounts, RuleError, RuleInstance, RuleKind,
};

pub use fragment::{
    compute_fragment, find_potential_synchronizers, select_minimal_fragment, Fragment,
    FragmentError, MalformedReason,
};

/// Result of a reduction.
#[derive(Clone, Debug)]
pub enum Verdict {
    /// Reduced to one transition from `i` to `o`; the net is sound.
    CompletelyReduced { summary: Transformer },
    /// A free-choice net on which the rules got stuck. Such nets are
    /// unsound.
    Unsound {
        reason: String,
        residual: ColoredWorkflowNet,
    },
    /// A non-free-choice net on which the rules got stuck. Nothing follows
    /// about soundness.
    Irreducible {
        reason: String,
        residual: ColoredWorkflowNet,
    },
    /// The input is not a workflow net, or a rule produced one that is not.
    Malformed { diagnostic: String },
}

impl Verdict {
    pub fn is_reduced(&self) -> bool {
        matches!(self, Verdict::CompletelyReduced { .. })
    }

    pub fn is_unsound(&self) -> bool {
        matches!(self, Verdict::Unsound { .. })
    }

    /// `Some(true)` when reduced, `Some(false)` when unsound, `None`
    /// otherwise.
    pub fn soundness(&self) -> Option<bool> {
        match self {
            Verdict::CompletelyReduced { .. } => Some(true),
            Verdict::Unsound { .. } => Some(false),
            _ => None,
        }
    }

    pub fn residual(&self) -> Option<&ColoredWorkflowNet> {
        match self {
            Verdict::Unsound { residual, .. } | Verdict::Irreducible { residual, .. } => {
                Some(residual)
            }
            _ => None,
        }
    }

    /// Short label: `REDUCED`, `UNSOUND`, `IRREDUCIBLE` or `MALFORMED`.
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::CompletelyReduced { .. } => "REDUCED",
            Verdict::Unsound { .. } => "UNSOUND",
            Verdict::Irreducible { .. } => "IRREDUCIBLE",
            Verdict::Malformed { .. } => "MALFORMED",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub verdict: Verdict,
    pub trace: ReductionTrace,
    pub counts: RuleCounts,
    pub initial: NetSize,
    /// Size of the final net: one transition when reduced, the residual
    /// otherwise, the input when malformed.
    pub last: NetSize,
}

impl Reduction {
    /// Share of nodes removed, in percent.
    pub fn reduced_by(&self) -> f64 {
        let before = self.initial.nodes() as f64;
        if before == 0.0 {
            return 0.0;
        }
        100.0 * (1.0 - self.last.nodes() as f64 / before)
    }

    pub fn summary(&self) -> Option<Summary> {
        match &self.verdict {
            Verdict::CompletelyReduced { summary } => Some(summary_pairs(summary)),
            _ => None,
        }
    }
}

/// The pairs of a one-input, one-output transformer as value pairs.
pub fn summary_pairs(lambda: &Transformer) -> Summary {
    lambda
        .pairs()
        .iter()
        .filter(|(u, v)| u.len() == 1 && v.len() == 1)
        .map(|(u, v)| (u[0].clone(), v[0].clone()))
        .collect()
}

/// Tuning knobs for [`reduce_with`].
#[derive(Clone, Copy, Debug, Default)]
pub struct Options {
    /// Upper bound on rule applications; `None` derives one from the net
    /// size.
    pub max_steps: Option<usize>,
}

/// Rule-count ceiling derived from `(|P|, |T|, |C|)`: `|C|^4·|T|` shortcuts,
/// `|C|^4 + |C|^2·|T|` merges and one iteration per transition ever
/// created, capped so a runaway reduction stays cheap.
pub fn step_bound(size: NetSize) -> usize {
    let c = size.clusters.max(1) as u128;
    let t = size.transitions.max(1) as u128;
    let bound = c.pow(4) * t + c.pow(4) + c * c * t + t;
    bound.min(200_000) as usize
}

/// Why a phase stopped before reaching its goal.
#[derive(Clone, Debug)]
pub struct PhaseFailure {
    pub reason: String,
    pub residual: Box<ColoredWorkflowNet>,
    /// A rule produced a net that failed validation.
    pub invalid: bool,
}

struct Driver<'a> {
    trace: &'a mut ReductionTrace,
    remaining: usize,
}

impl Driver<'_> {
    fn step(
        &mut self,
        cnet: &ColoredWorkflowNet,
        instance: &RuleInstance,
        fragment: Option<&mut Fragment>,
    ) -> Result<ColoredWorkflowNet, PhaseFailure> {
        if self.remaining == 0 {
            return Err(PhaseFailure {
                reason: "rule-count bound exhausted".into(),
                residual: Box::new(cnet.clone()),
                invalid: false,
            });
        }
        self.remaining -= 1;
        match apply(cnet, instance) {
            Ok((next, app)) => {
                if let Some(f) = fragment {
                    f.track(next.net(), &app.removed, &app.created);
                }
                self.trace.push(app);
                Ok(next)
            }
            Err(e) => Err(PhaseFailure {
                invalid: matches!(e, RuleError::InvalidResult { .. }),
                reason: e.to_string(),
                residual: Box::new(cnet.clone()),
            }),
        }
    }

    /// Merges and iterations until none applies, restricted to transitions
    /// of `f` when given.
    fn merges_and_iterations(
        &mut self,
        mut cnet: ColoredWorkflowNet,
        mut f: Option<&mut Fragment>,
    ) -> Result<ColoredWorkflowNet, PhaseFailure> {
        for kind in [RuleKind::Merge, RuleKind::Iteration] {
            loop {
                let inside = |ins: &RuleInstance| match &f {
                    Some(f) => ins.operands.iter().all(|t| f.contains(*t)),
                    None => true,
                };
                let Some(ins) = enumerate_applicable(cnet.net(), kind)
                    .into_iter()
                    .find(|i| inside(i))
                else {
                    break;
                };
                cnet = self.step(&cnet, &ins, f.as_deref_mut())?;
            }
        }
        Ok(cnet)
    }

    fn phase1(
        &mut self,
        mut cnet: ColoredWorkflowNet,
        mut f: Fragment,
    ) -> Result<(ColoredWorkflowNet, Fragment), PhaseFailure> {
        loop {
            let sync = synchronizer_reps(cnet.net());
            if non_synchronizers(cnet.net(), &f, &sync).is_empty() {
                return Ok((cnet, f));
            }
            cnet = self.merges_and_iterations(cnet, Some(&mut f))?;
            let sync = synchronizer_reps(cnet.net());
            let rest = non_synchronizers(cnet.net(), &f, &sync);
            if rest.is_empty() {
                return Ok((cnet, f));
            }
            let Some(ins) = phase1_candidate(cnet.net(), &f, &sync) else {
                let names: Vec<&str> = rest.iter().map(|t| cnet.net().name(*t)).collect();
                return Err(PhaseFailure {
                    reason: format!(
                        "no d-shortcut removes the non-synchronizers {{{}}}",
                        names.join(",")
                    ),
                    residual: Box::new(cnet),
                    invalid: false,
                });
            };
            cnet = self.step(&cnet, &ins, Some(&mut f))?;
        }
    }

    fn phase2(
        &mut self,
        mut cnet: ColoredWorkflowNet,
        mut f: Fragment,
    ) -> Result<(ColoredWorkflowNet, Fragment), PhaseFailure> {
        let rank = ranks(cnet.net(), &f);
        loop {
            if f.is_acyclic(cnet.net()) {
                return Ok((cnet, f));
            }
            cnet = self.merges_and_iterations(cnet, Some(&mut f))?;
            if f.is_acyclic(cnet.net()) {
                return Ok((cnet, f));
            }
            let Some(ins) = backward_shortcut(cnet.net(), &f, &rank) else {
                return Err(PhaseFailure {
                    reason: "fragment is cyclic but no backward shortcut applies".into(),
                    residual: Box::new(cnet),
                    invalid: false,
                });
            };
            cnet = self.step(&cnet, &ins, Some(&mut f))?;
        }
    }

    fn acyclic(&mut self, mut cnet: ColoredWorkflowNet) -> Result<ColoredWorkflowNet, PhaseFailure> {
        loop {
            if completely_reduced(cnet.net()) {
                return Ok(cnet);
            }
            cnet = self.merges_and_iterations(cnet, None)?;
            if completely_reduced(cnet.net()) {
                return Ok(cnet);
            }
            let Some(ins) = enumerate_applicable(cnet.net(), RuleKind::DShortcut)
                .into_iter()
                .next()
            else {
                return Err(PhaseFailure {
                    reason: "no rule applies".into(),
                    residual: Box::new(cnet),
                    invalid: false,
                });
            };
            cnet = self.step(&cnet, &ins, None)?;
        }
    }
}

/// Representatives of the potential synchronizer clusters.
fn synchronizer_reps(net: &WorkflowNet) -> BTreeSet<NodeId> {
    find_potential_synchronizers(net)
        .iter()
        .map(|c| c.rep())
        .collect()
}

fn non_synchronizers(net: &WorkflowNet, f: &Fragment, sync: &BTreeSet<NodeId>) -> Vec<NodeId> {
    let clusters = compute_clusters(net);
    f.transitions(net)
        .filter(|t| !sync.contains(&clusters.of(*t).rep()))
        .collect()
}

/// First d-shortcut that removes a non-synchronizer: into a
/// non-synchronizer cluster of `f` if possible, else out of a
/// non-synchronizer transition of `f`.
fn phase1_candidate(
    net: &WorkflowNet,
    f: &Fragment,
    sync: &BTreeSet<NodeId>,
) -> Option<RuleInstance> {
    let clusters = compute_clusters(net);
    let inside = |ins: &RuleInstance| {
        let c = clusters.by_rep(ins.operands[1]).expect("cluster");
        f.contains(ins.operands[0]) && c.nodes().iter().all(|n| f.contains(*n))
    };
    let all: Vec<RuleInstance> = enumerate_applicable(net, RuleKind::DShortcut)
        .into_iter()
        .filter(|i| inside(i))
        .collect();
    all.iter()
        .find(|i| !sync.contains(&i.operands[1]))
        .or_else(|| {
            all.iter()
                .find(|i| !sync.contains(&clusters.of(i.operands[0]).rep()))
        })
        .cloned()
}

/// Rank of each place of `f`: the position of its cluster among the
/// fragment's clusters ordered by representative.
fn ranks(net: &WorkflowNet, f: &Fragment) -> BTreeMap<NodeId, usize> {
    let clusters = compute_clusters(net);
    let reps: BTreeSet<NodeId> = f.places(net).map(|p| clusters.of(p).rep()).collect();
    let order: BTreeMap<NodeId, usize> = reps.iter().enumerate().map(|(k, r)| (*r, k)).collect();
    f.places(net)
        .map(|p| (p, order[&clusters.of(p).rep()]))
        .collect()
}

/// Shortcut of a fragment transition into a cluster of lower rank, lowest
/// target rank first.
fn backward_shortcut(
    net: &WorkflowNet,
    f: &Fragment,
    rank: &BTreeMap<NodeId, usize>,
) -> Option<RuleInstance> {
    let clusters = compute_clusters(net);
    let rank_of = |p: &NodeId| rank.get(p).copied();
    let mut best: Option<(usize, RuleInstance)> = None;
    for t in f.transitions(net) {
        let Some(own) = net.preset(t).iter().find_map(rank_of) else {
            continue;
        };
        let reps: BTreeSet<NodeId> = net.postset(t).iter().map(|p| clusters.of(*p).rep()).collect();
        for rep in reps {
            let c = clusters.by_rep(rep).expect("cluster");
            let Some(r) = c.places(net).find_map(|p| rank_of(&p)) else {
                continue;
            };
            if r >= own || !unconditionally_enables(net, t, c) {
                continue;
            }
            let ins = RuleInstance::shortcut(t, rep);
            if !guard_holds(net, &ins) {
                continue;
            }
            let key = (r, ins.clone());
            if best.as_ref().is_none_or(|(br, bi)| (r, &ins) < (*br, bi)) {
                best = Some(key);
            }
        }
    }
    best.map(|(_, i)| i)
}

/// Only `i`, `o` and one transition between them remain.
pub fn completely_reduced(net: &WorkflowNet) -> bool {
    net.place_count() == 2 && net.transition_count() == 1
}

fn fresh_trace(cnet: &ColoredWorkflowNet) -> ReductionTrace {
    ReductionTrace::new(NetSize::of(cnet.net()))
}

/// Phase 1 on its own, with the default rule-count bound.
pub fn reduce_fragment_to_synchronizers(
    cnet: &ColoredWorkflowNet,
    fragment: &Fragment,
    trace: &mut ReductionTrace,
) -> Result<(ColoredWorkflowNet, Fragment), PhaseFailure> {
    let remaining = step_bound(NetSize::of(cnet.net()));
    Driver { trace, remaining }.phase1(cnet.clone(), fragment.clone())
}

/// Phase 2 on its own; expects every transition of the fragment to belong
/// to a potential synchronizer.
pub fn reduce_synchronizer_only_fragment(
    cnet: &ColoredWorkflowNet,
    fragment: &Fragment,
    trace: &mut ReductionTrace,
) -> Result<(ColoredWorkflowNet, Fragment), PhaseFailure> {
    let remaining = step_bound(NetSize::of(cnet.net()));
    Driver { trace, remaining }.phase2(cnet.clone(), fragment.clone())
}

/// Merges and d-shortcuts on an acyclic net.
pub fn reduce_acyclic(cnet: &ColoredWorkflowNet, trace: &mut ReductionTrace) -> Verdict {
    let remaining = step_bound(NetSize::of(cnet.net()));
    let fc = is_free_choice_net(cnet.net());
    match (Driver { trace, remaining }).acyclic(cnet.clone()) {
        Ok(done) => reduced_verdict(&done),
        Err(fail) => stuck_verdict(fc, fail),
    }
}

fn reduced_verdict(cnet: &ColoredWorkflowNet) -> Verdict {
    let t = cnet.net().transitions().next().expect("one transition");
    Verdict::CompletelyReduced {
        summary: cnet.transformer(t).clone(),
    }
}

fn stuck_verdict(free_choice: bool, fail: PhaseFailure) -> Verdict {
    if fail.invalid {
        Verdict::Malformed {
            diagnostic: fail.reason,
        }
    } else if free_choice {
        Verdict::Unsound {
            reason: fail.reason,
            residual: *fail.residual,
        }
    } else {
        Verdict::Irreducible {
            reason: fail.reason,
            residual: *fail.residual,
        }
    }
}

pub fn reduce(cnet: &ColoredWorkflowNet) -> Reduction {
    reduce_with(cnet, Options::default())
}

pub fn reduce_with(cnet: &ColoredWorkflowNet, options: Options) -> Reduction {
    let mut trace = fresh_trace(cnet);
    let initial = trace.initial;
    let violations = validate(cnet.net());
    if !violations.is_empty() {
        let diagnostic = violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        return Reduction {
            verdict: Verdict::Malformed { diagnostic },
            counts: RuleCounts::default(),
            trace,
            initial,
            last: initial,
        };
    }
    let fc = is_free_choice_net(cnet.net());
    let remaining = options.max_steps.unwrap_or_else(|| step_bound(initial));
    let mut driver = Driver {
        trace: &mut trace,
        remaining,
    };
    let outcome = run(&mut driver, cnet.clone());
    let verdict = match outcome {
        Ok(done) => reduced_verdict(&done),
        Err(fail) => stuck_verdict(fc, fail),
    };
    let last = match &verdict {
        Verdict::CompletelyReduced { .. } => NetSize {
            places: 2,
            transitions: 1,
            clusters: 2,
        },
        Verdict::Unsound { residual, .. } | Verdict::Irreducible { residual, .. } => {
            NetSize::of(residual.net())
        }
        Verdict::Malformed { .. } => initial,
    };
    let counts = trace.counts();
    Reduction {
        verdict,
        trace,
        counts,
        initial,
        last,
    }
}

fn run(driver: &mut Driver<'_>, mut cnet: ColoredWorkflowNet) -> Result<ColoredWorkflowNet, PhaseFailure> {
    while !is_acyclic(cnet.net()) {
        cnet = reduce_one_fragment(driver, cnet)?;
    }
    driver.acyclic(cnet)
}

/// Picks fragments in order of size and reduces the first one that both
/// phases can handle. Earlier attempts are rolled back.
fn reduce_one_fragment(
    driver: &mut Driver<'_>,
    cnet: ColoredWorkflowNet,
) -> Result<ColoredWorkflowNet, PhaseFailure> {
    let net = cnet.net();
    let mut fragments = Vec::new();
    let mut malformed = Vec::new();
    for c in find_potential_synchronizers(net) {
        match compute_fragment(net, &c) {
            Ok(f) => fragments.push(f),
            Err(e @ FragmentError::Malformed { .. }) => malformed.push(describe(net, &e)),
            Err(_) => {}
        }
    }
    fragments.sort_by_key(|f| (f.len(), f.synchronizer));
    if fragments.is_empty() {
        let reason = if let Some(first) = malformed.first() {
            first.clone()
        } else {
            "the net is cyclic but has no synchronizer".to_string()
        };
        return Err(PhaseFailure {
            reason,
            residual: Box::new(cnet),
            invalid: false,
        });
    }
    let mut first_failure: Option<(PhaseFailure, Vec<RuleApplication>)> = None;
    for (k, f) in fragments.iter().enumerate() {
        let mark = driver.trace.len();
        let budget = driver.remaining;
        if k > 0 {
            driver.trace.note(format!(
                "retrying with the fragment of [{}] ({} nodes)",
                net.name(f.synchronizer),
                f.len()
            ));
        } else {
            driver.trace.note(format!(
                "fragment of [{}] ({} nodes, {} candidates)",
                net.name(f.synchronizer),
                f.len(),
                fragments.len()
            ));
        }
        let attempt = driver
            .phase1(cnet.clone(), f.clone())
            .and_then(|(n, f)| driver.phase2(n, f));
        match attempt {
            Ok((n, _)) => return Ok(n),
            Err(fail) if fail.invalid => return Err(fail),
            Err(fail) => {
                let text = format!(
                    "fragment of [{}] abandoned: {}",
                    net.name(f.synchronizer),
                    fail.reason
                );
                if first_failure.is_none() {
                    first_failure = Some((fail, driver.trace.steps[mark..].to_vec()));
                }
                driver.trace.truncate(mark);
                driver.trace.note(text);
                driver.remaining = budget;
            }
        }
    }
    // Report the first attempt, with its steps back in the trace so that
    // replaying the trace yields the residual.
    let (fail, steps) = first_failure.expect("at least one fragment");
    driver.trace.note("no fragment could be made acyclic; keeping the first attempt");
    for step in steps {
        driver.trace.push(step);
    }
    Err(fail)
}

fn describe(net: &WorkflowNet, e: &FragmentError) -> String {
    match e {
        FragmentError::Malformed {
            synchronizer,
            transition,
            reason,
        } => format!(
            "fragment of [{}] is malformed at {}: {}",
            net.name(*synchronizer),
            net.name(*transition),
            reason
        ),
        other => other.to_string(),
    }
}
