//! Transformers: finite relations between input and output value tuples,
//! with union, sequential composition and Kleene star.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{ColorError, ColorSet, ColorValue};
use crate::net::NodeId;

/// One value per port, in ascending place order.
pub type Tuple = Vec<ColorValue>;
pub type Pair = (Tuple, Tuple);

/// A place in a transformer signature together with its color set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Port {
    pub place: NodeId,
    pub colors: ColorSet,
}

impl Port {
    pub fn new(place: NodeId, colors: ColorSet) -> Self {
        Port { place, colors }
    }
}

/// A relation `λ(t) ⊆ ∏ C_p × ∏ C_p` with ports kept in ascending place order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transformer {
    inputs: Vec<Port>,
    outputs: Vec<Port>,
    pairs: BTreeSet<Pair>,
}

fn canonical_order(ports: &[Port]) -> Result<Vec<usize>, ColorError> {
    let mut order: Vec<usize> = (0..ports.len()).collect();
    order.sort_by_key(|k| ports[*k].place);
    for w in order.windows(2) {
        if ports[w[0]].place == ports[w[1]].place {
            return Err(ColorError::DuplicatePlace(ports[w[0]].place));
        }
    }
    Ok(order)
}

fn conform(ports: &[Port], order: &[usize], tuple: Tuple) -> Result<Tuple, ColorError> {
    if tuple.len() != ports.len() {
        return Err(ColorError::LengthMismatch {
            expected: ports.len(),
            found: tuple.len(),
        });
    }
    let out: Tuple = order.iter().map(|k| tuple[*k].clone()).collect();
    for (k, v) in out.iter().enumerate() {
        let port = &ports[order[k]];
        if !port.colors.contains(v) {
            return Err(ColorError::ValueOutside {
                place: port.place,
                value: v.clone(),
            });
        }
    }
    Ok(out)
}

/// Every tuple of the cartesian product of the ports' color sets.
pub(crate) fn product(ports: &[Port]) -> Vec<Tuple> {
    let mut acc: Vec<Tuple> = vec![Vec::new()];
    for port in ports {
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                port.colors.iter().map(move |v| {
                    let mut t = prefix.clone();
                    t.push(v.clone());
                    t
                })
            })
            .collect();
    }
    acc
}

impl Transformer {
    /// Builds a transformer from ports in any order; tuples are given in
    /// the same order as the ports and are permuted to canonical order.
    pub fn new(
        inputs: Vec<Port>,
        outputs: Vec<Port>,
        pairs: impl IntoIterator<Item = Pair>,
    ) -> Result<Transformer, ColorError> {
        let in_order = canonical_order(&inputs)?;
        let out_order = canonical_order(&outputs)?;
        let mut canon = BTreeSet::new();
        for (u, v) in pairs {
            canon.insert((
                conform(&inputs, &in_order, u)?,
                conform(&outputs, &out_order, v)?,
            ));
        }
        let inputs = in_order.iter().map(|k| inputs[*k].clone()).collect();
        let outputs = out_order.iter().map(|k| outputs[*k].clone()).collect();
        Ok(Transformer {
            inputs,
            outputs,
            pairs: canon,
        })
    }

    pub(crate) fn from_canonical(inputs: Vec<Port>, outputs: Vec<Port>, pairs: BTreeSet<Pair>) -> Self {
        Transformer {
            inputs,
            outputs,
            pairs,
        }
    }

    pub fn inputs(&self) -> &[Port] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[Port] {
        &self.outputs
    }

    pub fn input_places(&self) -> Vec<NodeId> {
        self.inputs.iter().map(|p| p.place).collect()
    }

    pub fn output_places(&self) -> Vec<NodeId> {
        self.outputs.iter().map(|p| p.place).collect()
    }

    pub fn pairs(&self) -> &BTreeSet<Pair> {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, u: &Tuple, v: &Tuple) -> bool {
        self.pairs.contains(&(u.clone(), v.clone()))
    }

    /// The output tuples related to `u`.
    pub fn image<'a>(&'a self, u: &'a Tuple) -> impl Iterator<Item = &'a Tuple> + 'a {
        self.pairs
            .range((u.clone(), Vec::new())..)
            .take_while(move |(a, _)| a == u)
            .map(|(_, b)| b)
    }

    /// Input tuples that occur in some pair.
    pub fn domain(&self) -> BTreeSet<&Tuple> {
        self.pairs.iter().map(|(u, _)| u).collect()
    }

    fn same_signature(&self, other: &Transformer) -> bool {
        self.inputs == other.inputs && self.outputs == other.outputs
    }

    /// Same transformer without the given pair.
    pub fn without_pair(&self, pair: &Pair) -> Transformer {
        let mut t = self.clone();
        t.pairs.remove(pair);
        t
    }
}

/// Renders a tuple as space-separated values.
pub(crate) fn fmt_tuple(t: &Tuple) -> String {
    t.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

impl fmt::Display for Transformer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, (u, v)) in self.pairs.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} -> {}", fmt_tuple(u), fmt_tuple(v))?;
        }
        f.write_str("}")
    }
}

/// `{(v, v) | v ∈ ∏ colorsets}` over the given places.
pub fn identity_transformer(
    places: &[NodeId],
    colorsets: &[ColorSet],
) -> Result<Transformer, ColorError> {
    if places.len() != colorsets.len() {
        return Err(ColorError::LengthMismatch {
            expected: places.len(),
            found: colorsets.len(),
        });
    }
    let ports: Vec<Port> = places
        .iter()
        .zip(colorsets)
        .map(|(p, c)| Port::new(*p, c.clone()))
        .collect();
    let order = canonical_order(&ports)?;
    let ports: Vec<Port> = order.iter().map(|k| ports[*k].clone()).collect();
    let pairs = product(&ports).into_iter().map(|v| (v.clone(), v)).collect();
    Ok(Transformer::from_canonical(ports.clone(), ports, pairs))
}

pub fn union_transformers(a: &Transformer, b: &Transformer) -> Result<Transformer, ColorError> {
    if !a.same_signature(b) {
        return Err(ColorError::SignatureMismatch);
    }
    let mut out = a.clone();
    out.pairs.extend(b.pairs.iter().cloned());
    Ok(out)
}

enum Source {
    First(usize),
    Second(usize),
}

/// `first · second`: run `first`, then feed the outputs `second` consumes
/// into `second`; the remaining outputs of `first` pass through unchanged.
pub fn compose_transformers(
    first: &Transformer,
    second: &Transformer,
) -> Result<Transformer, ColorError> {
    let first_pos: BTreeMap<NodeId, usize> = first
        .outputs
        .iter()
        .enumerate()
        .map(|(k, p)| (p.place, k))
        .collect();
    let mut key_idx = Vec::with_capacity(second.inputs.len());
    for port in &second.inputs {
        match first_pos.get(&port.place) {
            Some(k) => key_idx.push(*k),
            None => return Err(ColorError::DomainMismatch(port.place)),
        }
    }
    let consumed: BTreeSet<NodeId> = second.inputs.iter().map(|p| p.place).collect();
    let mut result_ports: Vec<(Port, Source)> = Vec::new();
    for (k, port) in first.outputs.iter().enumerate() {
        if !consumed.contains(&port.place) {
            result_ports.push((port.clone(), Source::First(k)));
        }
    }
    for (k, port) in second.outputs.iter().enumerate() {
        if result_ports.iter().any(|(p, _)| p.place == port.place) {
            return Err(ColorError::OutputOverlap(port.place));
        }
        result_ports.push((port.clone(), Source::Second(k)));
    }
    result_ports.sort_by_key(|(p, _)| p.place);

    let mut pairs = BTreeSet::new();
    for (u, v) in &first.pairs {
        let key: Tuple = key_idx.iter().map(|k| v[*k].clone()).collect();
        for w in second.image(&key) {
            let out: Tuple = result_ports
                .iter()
                .map(|(_, src)| match src {
                    Source::First(k) => v[*k].clone(),
                    Source::Second(k) => w[*k].clone(),
                })
                .collect();
            pairs.insert((u.clone(), out));
        }
    }
    let outputs = result_ports.into_iter().map(|(p, _)| p).collect();
    Ok(Transformer::from_canonical(first.inputs.clone(), outputs, pairs))
}

fn check_endo(t: &Transformer) -> Result<(), ColorError> {
    if t.inputs != t.outputs {
        return Err(ColorError::NotEndo);
    }
    Ok(())
}

/// Least fixpoint of `R = id ∪ R·t`, together with the number of rounds
/// that added new pairs.
pub fn star_with_rounds(t: &Transformer) -> Result<(Transformer, usize), ColorError> {
    check_endo(t)?;
    let identity: BTreeSet<Pair> = product(&t.inputs)
        .into_iter()
        .map(|v| (v.clone(), v))
        .collect();
    let mut all = identity.clone();
    let mut frontier = identity;
    let mut rounds = 0;
    loop {
        let mut fresh = BTreeSet::new();
        for (u, v) in &frontier {
            for w in t.image(v) {
                let pair = (u.clone(), w.clone());
                if !all.contains(&pair) {
                    fresh.insert(pair);
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        rounds += 1;
        all.extend(fresh.iter().cloned());
        frontier = fresh;
    }
    Ok((
        Transformer::from_canonical(t.inputs.clone(), t.outputs.clone(), all),
        rounds,
    ))
}

/// `t* = Σ_{i≥0} t^i`.
pub fn star_transformer(t: &Transformer) -> Result<Transformer, ColorError> {
    star_with_rounds(t).map(|(s, _)| s)
}

/// `t* · next` without materialising the identity over the full product.
pub fn star_then(t: &Transformer, next: &Transformer) -> Result<Transformer, ColorError> {
    check_endo(t)?;
    if next.inputs != t.outputs {
        return compose_transformers(&star_transformer(t)?, next);
    }
    let mut starts: BTreeSet<&Tuple> = t.domain();
    starts.extend(next.domain());
    let mut pairs = BTreeSet::new();
    for u in starts {
        let mut seen: BTreeSet<&Tuple> = BTreeSet::new();
        let mut stack = vec![u];
        while let Some(v) = stack.pop() {
            if seen.insert(v) {
                stack.extend(t.image(v).filter(|w| !seen.contains(w)));
            }
        }
        for v in seen {
            for w in next.image(v) {
                pairs.insert((u.clone(), w.clone()));
            }
        }
    }
    Ok(Transformer::from_canonical(
        t.inputs.clone(),
        next.outputs.clone(),
        pairs,
    ))
}

/// The first input tuple of the full product that no pair covers.
pub fn uncovered_input(t: &Transformer) -> Option<Tuple> {
    product(&t.inputs)
        .into_iter()
        .find(|u| t.image(u).next().is_none())
}

/// True iff every tuple of the input product has at least one image.
pub fn check_left_total(t: &Transformer) -> bool {
    uncovered_input(t).is_none()
}
