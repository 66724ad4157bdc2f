//! Brute-force reachability: exact soundness, k-soundness, colored
//! summaries and equivalence on nets small enough to explore.
//!
//! Exploration is breadth first and stops at a state cap; hitting the cap is
//! reported as such and never turned into a yes/no answer.

mod colored;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::net::{fire, is_enabled, Marking, NodeId, WorkflowNet};

pub use colored::{
    check_equivalence, explore_colored, oracle_summary, ColoredGraph, EquivalenceReport, Summary,
};

pub const DEFAULT_CAP: usize = 100_000;
pub const DEFAULT_COLORED_CAP: usize = 250_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("state space exceeds the cap of {cap} states")]
    CapExceeded { cap: usize },
    #[error("nets disagree on entry or exit color sets")]
    SignatureMismatch,
}

/// Explored markings with the firing edges between them. State 0 is the
/// root.
#[derive(Clone, Debug)]
pub struct ReachabilityGraph {
    pub states: Vec<Marking>,
    pub edges: Vec<(usize, NodeId, usize)>,
    /// First edge reaching each state, for reconstructing firing sequences.
    parent: Vec<Option<(usize, NodeId)>>,
    pub cap_exceeded: bool,
}

impl ReachabilityGraph {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Firing sequence from the root to `state` along first-discovery edges.
    pub fn path_to(&self, mut state: usize) -> Vec<NodeId> {
        let mut path = Vec::new();
        while let Some((prev, t)) = self.parent[state] {
            path.push(t);
            state = prev;
        }
        path.reverse();
        path
    }

    /// States from which some state satisfying `target` is reachable,
    /// computed once over reversed edges.
    pub fn coreachable(&self, target: impl Fn(&Marking) -> bool) -> Vec<bool> {
        let mut back: Vec<Vec<usize>> = vec![Vec::new(); self.states.len()];
        for (from, _, to) in &self.edges {
            back[*to].push(*from);
        }
        let mut mark = vec![false; self.states.len()];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (k, m) in self.states.iter().enumerate() {
            if target(m) {
                mark[k] = true;
                queue.push_back(k);
            }
        }
        while let Some(s) = queue.pop_front() {
            for p in &back[s] {
                if !mark[*p] {
                    mark[*p] = true;
                    queue.push_back(*p);
                }
            }
        }
        mark
    }
}

/// Breadth-first closure of the token game from `initial`, up to `cap`
/// states.
pub fn explore(net: &WorkflowNet, initial: Marking, cap: usize) -> ReachabilityGraph {
    let transitions: Vec<NodeId> = net.transitions().collect();
    let mut index: HashMap<Marking, usize> = HashMap::new();
    let mut g = ReachabilityGraph {
        states: vec![initial.clone()],
        edges: Vec::new(),
        parent: vec![None],
        cap_exceeded: false,
    };
    index.insert(initial, 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(s) = queue.pop_front() {
        for t in &transitions {
            if !is_enabled(net, &g.states[s], *t) {
                continue;
            }
            let next = fire(net, &g.states[s], *t).expect("enabled");
            let target = match index.get(&next) {
                Some(k) => *k,
                None => {
                    if g.states.len() >= cap {
                        g.cap_exceeded = true;
                        return g;
                    }
                    let k = g.states.len();
                    g.states.push(next.clone());
                    g.parent.push(Some((s, *t)));
                    index.insert(next, k);
                    queue.push_back(k);
                    k
                }
            };
            g.edges.push((s, *t, target));
        }
    }
    g
}

/// Why a net is not sound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// A reachable marking from which the final marking is unreachable,
    /// with a firing sequence leading to it from the initial marking.
    Stuck { marking: Marking, path: Vec<NodeId> },
    /// A transition that occurs in no firing sequence.
    Dead(NodeId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Soundness {
    Sound,
    Unsound(Witness),
    CapExceeded,
}

impl Soundness {
    pub fn is_sound(&self) -> bool {
        matches!(self, Soundness::Sound)
    }

    pub fn is_unsound(&self) -> bool {
        matches!(self, Soundness::Unsound(_))
    }

    /// `Some(true)` for sound, `Some(false)` for unsound, `None` at the cap.
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Soundness::Sound => Some(true),
            Soundness::Unsound(_) => Some(false),
            Soundness::CapExceeded => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub soundness: Soundness,
    /// Number of explored states.
    pub states: usize,
}

impl OracleVerdict {
    pub fn describe(&self, net: &WorkflowNet) -> String {
        match &self.soundness {
            Soundness::Sound => format!("SOUND ({} states)", self.states),
            Soundness::CapExceeded => format!("CAP-EXCEEDED after {} states", self.states),
            Soundness::Unsound(Witness::Dead(t)) => {
                format!("UNSOUND: transition {} can never fire", net.name(*t))
            }
            Soundness::Unsound(Witness::Stuck { marking, path }) => {
                let seq: Vec<&str> = path.iter().map(|t| net.name(*t)).collect();
                format!(
                    "UNSOUND: after [{}] the marking {} cannot reach the final marking",
                    seq.join(" "),
                    render_marking(net, marking)
                )
            }
        }
    }
}

pub fn render_marking(net: &WorkflowNet, m: &Marking) -> String {
    let parts: Vec<String> = m
        .iter()
        .map(|(p, k)| {
            if k == 1 {
                net.name(p).to_string()
            } else {
                format!("{}^{}", net.name(p), k)
            }
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

fn soundness_clauses(net: &WorkflowNet, k: u32, cap: usize, coverage: bool) -> OracleVerdict {
    let g = explore(net, Marking::initial(net, k), cap);
    if g.cap_exceeded {
        return OracleVerdict {
            soundness: Soundness::CapExceeded,
            states: g.len(),
        };
    }
    let fin = Marking::terminal(net, k);
    let ok = g.coreachable(|m| *m == fin);
    let soundness = if let Some(s) = ok.iter().position(|b| !b) {
        Soundness::Unsound(Witness::Stuck {
            marking: g.states[s].clone(),
            path: g.path_to(s),
        })
    } else if coverage {
        let fired: std::collections::BTreeSet<NodeId> = g.edges.iter().map(|(_, t, _)| *t).collect();
        match net.transitions().find(|t| !fired.contains(t)) {
            Some(t) => Soundness::Unsound(Witness::Dead(t)),
            None => Soundness::Sound,
        }
    } else {
        Soundness::Sound
    };
    OracleVerdict {
        soundness,
        states: g.len(),
    }
}

/// Soundness: the final marking is reachable from every marking reachable
/// from the initial one, and every transition fires in some run.
pub fn oracle_is_sound(net: &WorkflowNet, cap: usize) -> OracleVerdict {
    soundness_clauses(net, 1, cap, true)
}

/// k-soundness: `o^k` is reachable from every marking reachable from `i^k`.
pub fn oracle_is_k_sound(net: &WorkflowNet, k: u32, cap: usize) -> OracleVerdict {
    assert!(k >= 1, "k-soundness needs k ≥ 1");
    soundness_clauses(net, k, cap, false)
}

/// Re-checks a witness against the firing rule.
pub fn verify_witness(net: &WorkflowNet, witness: &Witness, cap: usize) -> bool {
    match witness {
        Witness::Stuck { marking, path } => {
            let mut m = Marking::initial(net, 1);
            for t in path {
                match fire(net, &m, *t) {
                    Ok(next) => m = next,
                    Err(_) => return false,
                }
            }
            if m != *marking {
                return false;
            }
            let g = explore(net, m, cap);
            let fin = Marking::terminal(net, 1);
            !g.cap_exceeded && !g.states.contains(&fin)
        }
        Witness::Dead(t) => {
            let g = explore(net, Marking::initial(net, 1), cap);
            !g.cap_exceeded && g.edges.iter().all(|(_, u, _)| u != t)
        }
    }
}

impl fmt::Display for Soundness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Soundness::Sound => "sound",
            Soundness::Unsound(_) => "unsound",
            Soundness::CapExceeded => "cap-exceeded",
        })
    }
}
