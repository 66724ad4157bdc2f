use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use super::{oracle_is_sound, OracleError, Soundness};
use crate::color::{ColorValue, ColoredMarking, ColoredWorkflowNet, Tuple};
use crate::net::NodeId;

/// A colored marking as a sorted list of `(place, value)` tokens, repeated
/// once per token. Sorting makes equal multisets equal vectors.
type State = Arc<Vec<(NodeId, ColorValue)>>;

/// Pairs of `λ(t)` indexed by input tuple.
struct Indexed {
    t: NodeId,
    inputs: Vec<NodeId>,
    outputs: Vec<NodeId>,
    image: HashMap<Tuple, Vec<Tuple>>,
}

fn index(cnet: &ColoredWorkflowNet) -> Vec<Indexed> {
    cnet.transformers()
        .iter()
        .map(|(t, lambda)| {
            let mut image: HashMap<Tuple, Vec<Tuple>> = HashMap::new();
            for (u, v) in lambda.pairs() {
                image.entry(u.clone()).or_default().push(v.clone());
            }
            Indexed {
                t: *t,
                inputs: lambda.input_places(),
                outputs: lambda.output_places(),
                image,
            }
        })
        .collect()
}

fn successors(state: &[(NodeId, ColorValue)], trans: &[Indexed], out: &mut Vec<(NodeId, Vec<(NodeId, ColorValue)>)>) {
    let mut by_place: BTreeMap<NodeId, Vec<&ColorValue>> = BTreeMap::new();
    for (p, v) in state {
        let vals = by_place.entry(*p).or_default();
        if vals.last() != Some(&v) {
            vals.push(v);
        }
    }
    for tr in trans {
        let mut choices: Vec<Tuple> = vec![Vec::new()];
        for p in &tr.inputs {
            let Some(vals) = by_place.get(p) else {
                choices.clear();
                break;
            };
            choices = choices
                .into_iter()
                .flat_map(|prefix| {
                    vals.iter().map(move |v| {
                        let mut u = prefix.clone();
                        u.push((*v).clone());
                        u
                    })
                })
                .collect();
        }
        for u in &choices {
            let Some(images) = tr.image.get(u) else {
                continue;
            };
            let mut base = state.to_vec();
            for (p, v) in tr.inputs.iter().zip(u) {
                let pos = base
                    .iter()
                    .position(|(q, w)| q == p && w == v)
                    .expect("token present");
                base.remove(pos);
            }
            for w in images {
                let mut next = base.clone();
                next.extend(tr.outputs.iter().copied().zip(w.iter().cloned()));
                next.sort();
                out.push((tr.t, next));
            }
        }
    }
}

/// Explored colored markings. State 0 is the root.
#[derive(Clone, Debug)]
pub struct ColoredGraph {
    pub states: Vec<ColoredMarking>,
    pub edges: Vec<(usize, NodeId, usize)>,
    pub cap_exceeded: bool,
}

/// Breadth-first closure of colored firing over all bindings, up to `cap`
/// states.
pub fn explore_colored(cnet: &ColoredWorkflowNet, initial: &ColoredMarking, cap: usize) -> ColoredGraph {
    let trans = index(cnet);
    let mut root: Vec<(NodeId, ColorValue)> = Vec::new();
    for (p, v, k) in initial.iter() {
        for _ in 0..k {
            root.push((p, v.clone()));
        }
    }
    root.sort();
    let root: State = Arc::new(root);
    let mut ids: HashMap<State, usize> = HashMap::new();
    let mut states: Vec<State> = vec![root.clone()];
    ids.insert(root, 0);
    let mut edges = Vec::new();
    let mut cap_exceeded = false;
    let mut queue = VecDeque::from([0usize]);
    let mut buf = Vec::new();
    'bfs: while let Some(s) = queue.pop_front() {
        buf.clear();
        successors(&states[s], &trans, &mut buf);
        for (t, next) in buf.drain(..) {
            let next = Arc::new(next);
            let target = match ids.get(&next) {
                Some(k) => *k,
                None => {
                    if states.len() >= cap {
                        cap_exceeded = true;
                        break 'bfs;
                    }
                    let k = states.len();
                    states.push(next.clone());
                    ids.insert(next, k);
                    queue.push_back(k);
                    k
                }
            };
            edges.push((s, t, target));
        }
    }
    let states = states
        .iter()
        .map(|s| {
            let mut m = ColoredMarking::new();
            for (p, v) in s.iter() {
                m.put(*p, v.clone());
            }
            m
        })
        .collect();
    ColoredGraph {
        states,
        edges,
        cap_exceeded,
    }
}

/// `(initial value, final value)` pairs.
pub type Summary = BTreeSet<(ColorValue, ColorValue)>;

/// For every value of `C_i`, the values `w` such that the marking with a
/// single `w` token on `o` is reachable from a single `v` token on `i`.
pub fn oracle_summary(cnet: &ColoredWorkflowNet, cap: usize) -> Result<Summary, OracleError> {
    let net = cnet.net();
    let trans = index(cnet);
    let (entry, exit) = (net.entry(), net.exit());
    let mut out = Summary::new();
    for v in cnet.colors(entry).iter() {
        let root: State = Arc::new(vec![(entry, v.clone())]);
        let mut seen: std::collections::HashSet<State> = std::collections::HashSet::new();
        seen.insert(root.clone());
        let mut queue = VecDeque::from([root]);
        let mut buf = Vec::new();
        while let Some(s) = queue.pop_front() {
            if s.len() == 1 && s[0].0 == exit {
                out.insert((v.clone(), s[0].1.clone()));
            }
            buf.clear();
            successors(&s, &trans, &mut buf);
            for (_, next) in buf.drain(..) {
                let next = Arc::new(next);
                if !seen.contains(&next) {
                    if seen.len() >= cap {
                        return Err(OracleError::CapExceeded { cap });
                    }
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(out)
}

/// Outcome of comparing two colored nets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub soundness: (Soundness, Soundness),
    pub summaries: (Summary, Summary),
    pub only_in_first: Vec<(ColorValue, ColorValue)>,
    pub only_in_second: Vec<(ColorValue, ColorValue)>,
}

impl EquivalenceReport {
    /// Both sound or both unsound, and identical summaries.
    pub fn equivalent(&self) -> bool {
        self.soundness.0.as_bool() == self.soundness.1.as_bool()
            && self.only_in_first.is_empty()
            && self.only_in_second.is_empty()
    }
}

/// Compares soundness of the underlying nets and the colored summaries.
pub fn check_equivalence(
    a: &ColoredWorkflowNet,
    b: &ColoredWorkflowNet,
    cap: usize,
) -> Result<EquivalenceReport, OracleError> {
    if a.colors(a.net().entry()) != b.colors(b.net().entry())
        || a.colors(a.net().exit()) != b.colors(b.net().exit())
    {
        return Err(OracleError::SignatureMismatch);
    }
    let sa = oracle_is_sound(a.net(), cap).soundness;
    let sb = oracle_is_sound(b.net(), cap).soundness;
    if sa == Soundness::CapExceeded || sb == Soundness::CapExceeded {
        return Err(OracleError::CapExceeded { cap });
    }
    let ma = oracle_summary(a, cap)?;
    let mb = oracle_summary(b, cap)?;
    let only_in_first = ma.difference(&mb).cloned().collect();
    let only_in_second = mb.difference(&ma).cloned().collect();
    Ok(EquivalenceReport {
        soundness: (sa, sb),
        summaries: (ma, mb),
        only_in_first,
        only_in_second,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::{ColorSet, Port, Transformer};
    use crate::models;
    use crate::oracle::DEFAULT_COLORED_CAP;

    #[test]
    fn identity_summary_on_single_transition() {
        let net = crate::net::tests::single();
        let (i, t, o) = (net.entry(), net.find("t").unwrap(), net.exit());
        let s = ColorSet::range(0, 2);
        let lambda = crate::color::identity_transformer(&[i], std::slice::from_ref(&s)).unwrap();
        let lambda = Transformer::new(
            vec![Port::new(i, s.clone())],
            vec![Port::new(o, s.clone())],
            lambda.pairs().iter().cloned(),
        )
        .unwrap();
        let cnet = ColoredWorkflowNet::new(
            "id",
            net,
            [(i, s.clone()), (o, s)].into(),
            [(t, lambda)].into(),
            crate::color::Mode::Strict,
        )
        .unwrap();
        let summary = oracle_summary(&cnet, 100).unwrap();
        let expected: Summary = (0..=2).map(|k| (ColorValue::int(k), ColorValue::int(k))).collect();
        assert_eq!(summary, expected);
    }

    #[test]
    fn insurance_summary_non_err_part() {
        let cnet = models::insurance_err();
        let summary = oracle_summary(&cnet, DEFAULT_COLORED_CAP).unwrap();
        let clean: Vec<_> = summary
            .iter()
            .filter(|(_, w)| !models::mentions_err(w))
            .cloned()
            .collect();
        let mut expected = models::insurance_expected_summary();
        expected.sort();
        assert_eq!(clean, expected);
    }

    #[test]
    fn net_is_equivalent_to_itself_and_not_to_a_mutant() {
        let cnet = models::small_loop_colored();
        let r = check_equivalence(&cnet, &cnet, 1000).unwrap();
        assert!(r.equivalent());
        let t5 = cnet.net().find("t5").unwrap();
        let lambda = cnet.transformer(t5);
        let victim = lambda.pairs().iter().next().unwrap().clone();
        let mutant = cnet.with_transformer(t5, lambda.without_pair(&victim)).unwrap_err();
        // Strict mode refuses the partial relation; compare in permissive mode.
        assert!(matches!(mutant, crate::color::ColoredNetError::NotLeftTotal { .. }));
        let loose = cnet.clone().with_mode(crate::color::Mode::Permissive);
        let mutant = loose.with_transformer(t5, lambda.without_pair(&victim)).unwrap();
        let r = check_equivalence(&loose, &mutant, 1000).unwrap();
        assert!(!r.equivalent());
        assert!(!r.only_in_first.is_empty());
    }

    #[test]
    fn colored_exploration_counts_bindings() {
        let cnet = models::small_loop_colored();
        let m = ColoredMarking::initial(cnet.net(), ColorValue::int(0));
        let g = explore_colored(&cnet, &m, 1000);
        assert!(!g.cap_exceeded);
        // i:0, then c1 and c2 with values 0..=3, then o with values 0..=3
        assert_eq!(g.states.len(), 1 + 4 + 4 + 4);
    }
}
