//! Seeded random nets for differential testing and batch statistics.
//!
//! Sound free-choice nets are grown from `i → t → o` by refinements that
//! preserve soundness: sequence, place split, parallel split, choice and
//! loop. Mutations redirect, add or drop output arcs, which keeps nets
//! free-choice but usually breaks soundness. Non-free-choice variants add
//! an input arc (optionally with a matching output arc) that couples two
//! clusters.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::color::{ColorSet, ColorValue, ColoredWorkflowNet, Mode, Port, Transformer, Tuple};
use crate::net::{is_free_choice_net, validate, NodeId, WorkflowNet};

/// Net skeleton over place indices; place 0 is `i`, place 1 is `o`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape {
    pub places: usize,
    pub transitions: Vec<(BTreeSet<usize>, BTreeSet<usize>)>,
}

impl Shape {
    /// `i → t0 → o`.
    pub fn single() -> Self {
        Shape {
            places: 2,
            transitions: vec![([0].into(), [1].into())],
        }
    }

    fn fresh(&mut self) -> usize {
        self.places += 1;
        self.places - 1
    }

    pub fn to_net(&self) -> WorkflowNet {
        let mut b = WorkflowNet::builder();
        let places: Vec<NodeId> = (0..self.places)
            .map(|k| match k {
                0 => b.place("i"),
                1 => b.place("o"),
                k => b.place(&format!("p{k}")),
            })
            .collect();
        for (k, (pre, post)) in self.transitions.iter().enumerate() {
            let t = b.transition(&format!("t{k}"));
            for p in pre {
                b.arc(places[*p], t);
            }
            for p in post {
                b.arc(t, places[*p]);
            }
        }
        b.entry(places[0]).exit(places[1]);
        b.build().expect("generated names are unique")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Refinement {
    Sequence,
    PlaceSplit,
    Parallel,
    Choice,
    Loop,
    SelfLoop,
}

fn refine(shape: &mut Shape, rng: &mut impl Rng) {
    let kinds = [
        Refinement::Sequence,
        Refinement::PlaceSplit,
        Refinement::Parallel,
        Refinement::Choice,
        Refinement::Loop,
        Refinement::SelfLoop,
    ];
    let weights = [3, 2, 3, 3, 2, 1];
    let total: u32 = weights.iter().sum();
    let mut roll = rng.gen_range(0..total);
    let mut kind = kinds[0];
    for (k, w) in kinds.iter().zip(weights) {
        if roll < w {
            kind = *k;
            break;
        }
        roll -= w;
    }
    let k = rng.gen_range(0..shape.transitions.len());
    let (pre, post) = shape.transitions[k].clone();
    match kind {
        Refinement::Sequence => {
            let n = shape.fresh();
            shape.transitions[k] = (pre, [n].into());
            shape.transitions.push(([n].into(), post));
        }
        Refinement::PlaceSplit => {
            // A place other than o gets a step in front of its consumers.
            let p = rng.gen_range(0..shape.places);
            if p == 1 {
                return;
            }
            let n = shape.fresh();
            for (pre, _) in shape.transitions.iter_mut() {
                if pre.remove(&p) {
                    pre.insert(n);
                }
            }
            shape.transitions.push(([p].into(), [n].into()));
        }
        Refinement::Parallel => {
            let (a, b) = (shape.fresh(), shape.fresh());
            shape.transitions[k] = (pre, [a, b].into());
            shape.transitions.push(([a, b].into(), post));
        }
        Refinement::Choice => {
            let n = shape.fresh();
            shape.transitions[k] = (pre, [n].into());
            shape.transitions.push(([n].into(), post.clone()));
            shape.transitions.push(([n].into(), post));
        }
        Refinement::Loop => {
            let (n, m) = (shape.fresh(), shape.fresh());
            shape.transitions[k] = (pre, [n].into());
            shape.transitions.push(([n].into(), [m].into()));
            shape.transitions.push(([m].into(), [n].into()));
            shape.transitions.push(([m].into(), post));
        }
        Refinement::SelfLoop => {
            let n = shape.fresh();
            shape.transitions[k] = (pre, [n].into());
            shape.transitions.push(([n].into(), [n].into()));
            shape.transitions.push(([n].into(), post));
        }
    }
}

/// A sound free-choice shape with at most `max_places` places.
pub fn sound_fc_shape(rng: &mut impl Rng, max_places: usize) -> Shape {
    let target = rng.gen_range(3..=max_places.max(3));
    let mut shape = Shape::single();
    loop {
        let mut next = shape.clone();
        refine(&mut next, rng);
        if next.places > max_places {
            return shape;
        }
        shape = next;
        if shape.places >= target {
            return shape;
        }
    }
}

fn is_valid(shape: &Shape) -> bool {
    validate(&shape.to_net()).is_empty()
}

/// A free-choice mutation of `shape` that is still a workflow net.
pub fn mutate_fc(rng: &mut impl Rng, shape: &Shape) -> Option<Shape> {
    for _ in 0..50 {
        let mut m = shape.clone();
        let k = rng.gen_range(0..m.transitions.len());
        let post = &mut m.transitions[k].1;
        match rng.gen_range(0..3) {
            0 if post.len() >= 2 => {
                let victim = *post.iter().nth(rng.gen_range(0..post.len())).unwrap();
                post.remove(&victim);
            }
            1 => {
                let p = rng.gen_range(1..m.places);
                post.insert(p);
            }
            _ => {
                let victim = *post.iter().nth(rng.gen_range(0..post.len())).unwrap();
                let p = rng.gen_range(1..m.places);
                post.remove(&victim);
                post.insert(p);
            }
        }
        if m != *shape && is_valid(&m) && is_free_choice_net(&m.to_net()) {
            return Some(m);
        }
    }
    None
}

/// A variant of `shape` that is not free-choice.
pub fn non_fc_variant(rng: &mut impl Rng, shape: &Shape) -> Option<Shape> {
    for _ in 0..100 {
        let mut m = shape.clone();
        let k = rng.gen_range(0..m.transitions.len());
        let candidates: Vec<usize> = (0..m.places)
            .filter(|p| *p != 1 && !m.transitions[k].0.contains(p))
            .collect();
        let Some(p) = candidates.choose(rng).copied() else {
            continue;
        };
        m.transitions[k].0.insert(p);
        if rng.gen_bool(0.6) {
            m.transitions[k].1.insert(p);
        }
        if is_valid(&m) && !is_free_choice_net(&m.to_net()) {
            return Some(m);
        }
    }
    None
}

/// Random color sets of 1..=`max_colors` integers and random transformers.
/// In strict mode every input tuple gets one or two images; in permissive
/// mode some input tuples get none.
pub fn colorize(
    rng: &mut impl Rng,
    net: WorkflowNet,
    name: &str,
    max_colors: usize,
    mode: Mode,
) -> ColoredWorkflowNet {
    let colors: BTreeMap<NodeId, ColorSet> = net
        .places()
        .map(|p| {
            let n = rng.gen_range(1..=max_colors.max(1)) as i64;
            (p, ColorSet::range(0, n - 1))
        })
        .collect();
    let ports = |ps: &BTreeSet<NodeId>| -> Vec<Port> {
        ps.iter().map(|p| Port::new(*p, colors[p].clone())).collect()
    };
    let mut transformers = BTreeMap::new();
    for t in net.transitions() {
        let inputs = ports(net.preset(t));
        let outputs = ports(net.postset(t));
        let out_space = product(&outputs);
        let mut pairs = BTreeSet::new();
        for u in product(&inputs) {
            if mode == Mode::Permissive && rng.gen_bool(0.15) {
                continue;
            }
            let images = if rng.gen_bool(0.25) { 2 } else { 1 };
            for _ in 0..images {
                let v = out_space[rng.gen_range(0..out_space.len())].clone();
                pairs.insert((u.clone(), v));
            }
        }
        let lambda = Transformer::new(inputs, outputs, pairs).expect("pairs drawn from the ports");
        transformers.insert(t, lambda);
    }
    ColoredWorkflowNet::new(name, net, colors, transformers, mode).expect("consistent by construction")
}

fn product(ports: &[Port]) -> Vec<Tuple> {
    let mut out: Vec<Tuple> = vec![Vec::new()];
    for port in ports {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                port.colors.iter().map(move |v: &ColorValue| {
                    let mut u = prefix.clone();
                    u.push(v.clone());
                    u
                })
            })
            .collect();
    }
    out
}

/// How a corpus net was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Origin {
    SoundFc,
    MutatedFc,
    NotFc,
}

#[derive(Clone, Debug)]
pub struct CorpusNet {
    pub origin: Origin,
    pub net: ColoredWorkflowNet,
}

#[derive(Clone, Copy, Debug)]
pub struct CorpusOptions {
    pub max_places: usize,
    pub max_colors: usize,
    /// Share of permissive (partial) transformers.
    pub permissive: f64,
    /// Shares of sound and mutated free-choice nets; the rest is not
    /// free-choice.
    pub sound: f64,
    pub mutated: f64,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            max_places: 12,
            max_colors: 4,
            permissive: 0.0,
            sound: 0.5,
            mutated: 0.3,
        }
    }
}

/// `count` nets drawn from the stream seeded by `seed`.
pub fn generate(seed: u64, count: usize, opts: &CorpusOptions) -> Vec<CorpusNet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let base = sound_fc_shape(&mut rng, opts.max_places);
        let roll: f64 = rng.gen();
        let (origin, shape) = if roll < opts.sound {
            (Origin::SoundFc, Some(base))
        } else if roll < opts.sound + opts.mutated {
            (Origin::MutatedFc, mutate_fc(&mut rng, &base))
        } else {
            (Origin::NotFc, non_fc_variant(&mut rng, &base))
        };
        let Some(shape) = shape else { continue };
        if shape.places > opts.max_places {
            continue;
        }
        let mode = if rng.gen_bool(opts.permissive) {
            Mode::Permissive
        } else {
            Mode::Strict
        };
        let name = format!("gen-{seed}-{}", out.len());
        let net = colorize(&mut rng, shape.to_net(), &name, opts.max_colors, mode);
        out.push(CorpusNet { origin, net });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_is_sound;

    #[test]
    fn refinements_stay_sound_and_free_choice() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let shape = sound_fc_shape(&mut rng, 10);
            let net = shape.to_net();
            assert!(shape.places <= 10);
            assert!(validate(&net).is_empty());
            assert!(is_free_choice_net(&net));
            assert!(oracle_is_sound(&net, 50_000).soundness.is_sound());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(3, 20, &CorpusOptions::default());
        let b = generate(3, 20, &CorpusOptions::default());
        assert!(a.iter().zip(&b).all(|(x, y)| x.net == y.net && x.origin == y.origin));
        for c in &a {
            let fc = is_free_choice_net(c.net.net());
            assert_eq!(fc, c.origin != Origin::NotFc);
        }
    }
}
