//! Colored workflow nets, colored markings and colored firing.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::transformer::{fmt_tuple, uncovered_input};
use super::{ColorSet, ColorValue, Pair, Port, Transformer, Tuple};
use crate::net::{Marking, NodeId, WorkflowNet};

/// Whether every transformer must be left-total over its input product.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    #[default]
    Strict,
    Permissive,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Permissive => "permissive",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoredNetError {
    #[error("place {0} has no color set")]
    MissingColors(String),
    #[error("transition {0} has no transformer")]
    MissingTransformer(String),
    #[error("color set given for {0}, which is not a place")]
    NotAPlace(String),
    #[error("transformer given for {0}, which is not a transition")]
    NotATransition(String),
    #[error("transformer of {transition} does not match its arcs: {detail}")]
    Signature { transition: String, detail: String },
    #[error("transformer of {transition} is not left-total: no pair for input {input}")]
    NotLeftTotal { transition: String, input: String },
}

/// A workflow net whose places carry finite color sets and whose
/// transitions carry transformers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredWorkflowNet {
    name: String,
    net: WorkflowNet,
    colors: BTreeMap<NodeId, ColorSet>,
    transformers: BTreeMap<NodeId, Transformer>,
    mode: Mode,
}

impl ColoredWorkflowNet {
    pub fn new(
        name: &str,
        net: WorkflowNet,
        colors: BTreeMap<NodeId, ColorSet>,
        transformers: BTreeMap<NodeId, Transformer>,
        mode: Mode,
    ) -> Result<Self, ColoredNetError> {
        let cnet = ColoredWorkflowNet {
            name: name.to_string(),
            net,
            colors,
            transformers,
            mode,
        };
        cnet.check()?;
        Ok(cnet)
    }

    /// Lifts an uncolored net: every place gets `{•}` and every transition
    /// the single pair relating the unit tuples.
    pub fn unit(name: &str, net: WorkflowNet) -> Self {
        let colors: BTreeMap<NodeId, ColorSet> =
            net.places().map(|p| (p, ColorSet::unit())).collect();
        let transformers = net
            .transitions()
            .map(|t| (t, unit_transformer(&net, t)))
            .collect();
        ColoredWorkflowNet {
            name: name.to_string(),
            net,
            colors,
            transformers,
            mode: Mode::Strict,
        }
    }

    /// Consistency of colors and transformers with the arcs.
    pub fn check(&self) -> Result<(), ColoredNetError> {
        let net = &self.net;
        for p in self.colors.keys() {
            if !net.is_place(*p) {
                return Err(ColoredNetError::NotAPlace(p.to_string()));
            }
        }
        for t in self.transformers.keys() {
            if !net.is_transition(*t) {
                return Err(ColoredNetError::NotATransition(t.to_string()));
            }
        }
        for p in net.places() {
            if !self.colors.contains_key(&p) {
                return Err(ColoredNetError::MissingColors(net.name(p).into()));
            }
        }
        for t in net.transitions() {
            let name = net.name(t).to_string();
            let lambda = self
                .transformers
                .get(&t)
                .ok_or_else(|| ColoredNetError::MissingTransformer(name.clone()))?;
            self.check_ports(&name, lambda.inputs(), net.preset(t).iter(), "input")?;
            self.check_ports(&name, lambda.outputs(), net.postset(t).iter(), "output")?;
            if self.mode == Mode::Strict {
                if let Some(u) = uncovered_input(lambda) {
                    return Err(ColoredNetError::NotLeftTotal {
                        transition: name,
                        input: fmt_tuple(&u),
                    });
                }
            }
        }
        Ok(())
    }

    fn check_ports<'a>(
        &self,
        transition: &str,
        ports: &[Port],
        places: impl Iterator<Item = &'a NodeId>,
        side: &str,
    ) -> Result<(), ColoredNetError> {
        let places: Vec<NodeId> = places.copied().collect();
        let got: Vec<NodeId> = ports.iter().map(|p| p.place).collect();
        if got != places {
            let names = |v: &[NodeId]| {
                v.iter()
                    .map(|p| self.net.name(*p).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            };
            return Err(ColoredNetError::Signature {
                transition: transition.into(),
                detail: format!(
                    "{side} places are [{}] but arcs give [{}]",
                    names(&got),
                    names(&places)
                ),
            });
        }
        for port in ports {
            if self.colors.get(&port.place) != Some(&port.colors) {
                return Err(ColoredNetError::Signature {
                    transition: transition.into(),
                    detail: format!(
                        "{side} port {} uses a color set different from the place's",
                        self.net.name(port.place)
                    ),
                });
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: &str) -> Self {
        self.name = name.to_string();
        self
    }

    pub fn net(&self) -> &WorkflowNet {
        &self.net
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn colors(&self, place: NodeId) -> &ColorSet {
        &self.colors[&place]
    }

    pub fn color_map(&self) -> &BTreeMap<NodeId, ColorSet> {
        &self.colors
    }

    pub fn transformer(&self, t: NodeId) -> &Transformer {
        &self.transformers[&t]
    }

    pub fn transformers(&self) -> &BTreeMap<NodeId, Transformer> {
        &self.transformers
    }

    pub fn port(&self, place: NodeId) -> Port {
        Port::new(place, self.colors(place).clone())
    }

    /// Replaces the transformer of `t`, keeping the net consistent.
    pub fn with_transformer(&self, t: NodeId, lambda: Transformer) -> Result<Self, ColoredNetError> {
        let mut out = self.clone();
        out.transformers.insert(t, lambda);
        out.check()?;
        Ok(out)
    }

    /// Adds a transition whose arcs follow the ports of `lambda`.
    pub(crate) fn add_transition(&mut self, preferred_name: &str, lambda: Transformer) -> NodeId {
        let pre = lambda.input_places().into_iter().collect();
        let post = lambda.output_places().into_iter().collect();
        let id = self.net.add_transition(preferred_name, &pre, &post);
        self.transformers.insert(id, lambda);
        id
    }

    pub(crate) fn set_transformer(&mut self, t: NodeId, lambda: Transformer) {
        self.transformers.insert(t, lambda);
    }

    pub(crate) fn remove_node(&mut self, id: NodeId) {
        self.net.remove_node(id);
        self.colors.remove(&id);
        self.transformers.remove(&id);
    }
}

fn unit_transformer(net: &WorkflowNet, t: NodeId) -> Transformer {
    let ports = |ps: &std::collections::BTreeSet<NodeId>| -> Vec<Port> {
        ps.iter().map(|p| Port::new(*p, ColorSet::unit())).collect()
    };
    let (i, o) = (ports(net.preset(t)), ports(net.postset(t)));
    let pair = (vec![ColorValue::unit(); i.len()], vec![ColorValue::unit(); o.len()]);
    Transformer::new(i, o, [pair]).expect("unit tuples conform")
}

/// Per-place multisets of values.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColoredMarking(BTreeMap<NodeId, BTreeMap<ColorValue, u32>>);

impl ColoredMarking {
    pub fn new() -> Self {
        Self::default()
    }

    /// One token of value `v` on the entry place.
    pub fn initial(net: &WorkflowNet, v: ColorValue) -> Self {
        let mut m = Self::new();
        m.put(net.entry(), v);
        m
    }

    pub fn put(&mut self, place: NodeId, v: ColorValue) {
        *self.0.entry(place).or_default().entry(v).or_insert(0) += 1;
    }

    fn take(&mut self, place: NodeId, v: &ColorValue) -> bool {
        let Some(bag) = self.0.get_mut(&place) else {
            return false;
        };
        let Some(count) = bag.get_mut(v) else {
            return false;
        };
        *count -= 1;
        if *count == 0 {
            bag.remove(v);
            if bag.is_empty() {
                self.0.remove(&place);
            }
        }
        true
    }

    pub fn count(&self, place: NodeId, v: &ColorValue) -> u32 {
        self.0
            .get(&place)
            .and_then(|bag| bag.get(v))
            .copied()
            .unwrap_or(0)
    }

    /// Distinct values on `place` with their multiplicities.
    pub fn tokens(&self, place: NodeId) -> impl Iterator<Item = (&ColorValue, u32)> {
        self.0.get(&place).into_iter().flatten().map(|(v, k)| (v, *k))
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, &ColorValue, u32)> {
        self.0
            .iter()
            .flat_map(|(p, bag)| bag.iter().map(move |(v, k)| (*p, v, *k)))
    }

    /// Token counts with colors forgotten.
    pub fn underlying(&self) -> Marking {
        Marking::from_counts(
            self.0
                .iter()
                .map(|(p, bag)| (*p, bag.values().sum::<u32>())),
        )
    }

    /// If the marking is one token on `place`, its value.
    pub fn single_on(&self, place: NodeId) -> Option<&ColorValue> {
        if self.0.len() != 1 {
            return None;
        }
        let bag = self.0.get(&place)?;
        match bag.iter().next() {
            Some((v, 1)) if bag.len() == 1 => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColorFireError {
    #[error("{0} is not a transition of the net")]
    NotATransition(NodeId),
    #[error("no matching binding for {transition}: {detail}")]
    NoMatchingBinding { transition: String, detail: String },
}

/// Bindings of `λ(t)` whose input values are all present in `m`.
pub fn enabled_bindings(cnet: &ColoredWorkflowNet, m: &ColoredMarking, t: NodeId) -> Vec<Pair> {
    let net = cnet.net();
    if !net.is_transition(t) {
        return Vec::new();
    }
    let mut inputs: Vec<Tuple> = vec![Vec::new()];
    for p in net.preset(t) {
        let values: Vec<&ColorValue> = m.tokens(*p).map(|(v, _)| v).collect();
        inputs = inputs
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut u = prefix.clone();
                    u.push((*v).clone());
                    u
                })
            })
            .collect();
    }
    let lambda = cnet.transformer(t);
    let mut out = Vec::new();
    for u in &inputs {
        for w in lambda.image(u) {
            out.push((u.clone(), w.clone()));
        }
    }
    out
}

/// Fires `t` with the chosen pair of `λ(t)`: the pair's input values are
/// removed from the input places and its output values added.
pub fn fire_colored(
    cnet: &ColoredWorkflowNet,
    m: &ColoredMarking,
    t: NodeId,
    binding: &Pair,
) -> Result<ColoredMarking, ColorFireError> {
    let net = cnet.net();
    if !net.is_transition(t) {
        return Err(ColorFireError::NotATransition(t));
    }
    let lambda = cnet.transformer(t);
    let fail = |detail: String| ColorFireError::NoMatchingBinding {
        transition: net.name(t).to_string(),
        detail,
    };
    if !lambda.pairs().contains(binding) {
        return Err(fail(format!(
            "{} -> {} is not a pair of the transformer",
            fmt_tuple(&binding.0),
            fmt_tuple(&binding.1)
        )));
    }
    let mut next = m.clone();
    for (port, v) in lambda.inputs().iter().zip(&binding.0) {
        if !next.take(port.place, v) {
            return Err(fail(format!(
                "place {} holds no token {}",
                net.name(port.place),
                v
            )));
        }
    }
    for (port, v) in lambda.outputs().iter().zip(&binding.1) {
        next.put(port.place, v.clone());
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::tests::single;

    #[test]
    fn unit_lift_is_consistent_and_fires() {
        let cnet = ColoredWorkflowNet::unit("single", single());
        cnet.check().unwrap();
        let t = cnet.net().find("t").unwrap();
        let m = ColoredMarking::initial(cnet.net(), ColorValue::unit());
        let b = enabled_bindings(&cnet, &m, t);
        assert_eq!(b.len(), 1);
        let m2 = fire_colored(&cnet, &m, t, &b[0]).unwrap();
        assert_eq!(m2.single_on(cnet.net().exit()), Some(&ColorValue::unit()));
        assert!(fire_colored(&cnet, &m2, t, &b[0]).is_err());
    }

    #[test]
    fn strict_mode_rejects_partial_transformers() {
        let net = single();
        let (i, t, o) = (net.entry(), net.find("t").unwrap(), net.exit());
        let two = ColorSet::range(1, 2);
        let colors: BTreeMap<_, _> = [(i, two.clone()), (o, two.clone())].into();
        let lambda = Transformer::new(
            vec![Port::new(i, two.clone())],
            vec![Port::new(o, two)],
            [(vec![ColorValue::int(1)], vec![ColorValue::int(1)])],
        )
        .unwrap();
        let transformers: BTreeMap<_, _> = [(t, lambda)].into();
        let strict = ColoredWorkflowNet::new("n", net.clone(), colors.clone(), transformers.clone(), Mode::Strict);
        assert!(matches!(strict, Err(ColoredNetError::NotLeftTotal { .. })));
        let permissive = ColoredWorkflowNet::new("n", net, colors, transformers, Mode::Permissive).unwrap();
        let m = ColoredMarking::initial(permissive.net(), ColorValue::int(2));
        assert!(enabled_bindings(&permissive, &m, t).is_empty());
        let err = fire_colored(
            &permissive,
            &m,
            t,
            &(vec![ColorValue::int(2)], vec![ColorValue::int(2)]),
        );
        assert!(matches!(err, Err(ColorFireError::NoMatchingBinding { .. })));
    }
}
