use std::collections::BTreeMap;

use thiserror::Error;

use super::{ColorError, ColorSet, ColoredNetError, ColoredWorkflowNet, Mode, Pair, Port, Transformer};
use crate::net::{BuildError, NetBuilder, NodeId, NodeKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoredBuildError {
    #[error(transparent)]
    Net(#[from] BuildError),
    #[error("transition {transition}: {source}")]
    Transformer {
        transition: String,
        #[source]
        source: ColorError,
    },
    #[error(transparent)]
    Colored(#[from] ColoredNetError),
}

struct PendingTransition {
    id: NodeId,
    name: String,
    inputs: Vec<NodeId>,
    outputs: Vec<NodeId>,
    pairs: Vec<Pair>,
}

/// Builds a [`ColoredWorkflowNet`] from places with color sets and
/// transitions with pair lists.
///
/// Pair tuples follow the order in which the transition's input and
/// output places were listed, not the canonical order.
pub struct ColoredNetBuilder {
    name: String,
    mode: Mode,
    net: NetBuilder,
    colors: BTreeMap<NodeId, ColorSet>,
    transitions: Vec<PendingTransition>,
}

impl ColoredNetBuilder {
    pub fn new(name: &str, mode: Mode) -> Self {
        ColoredNetBuilder {
            name: name.to_string(),
            mode,
            net: NetBuilder::default(),
            colors: BTreeMap::new(),
            transitions: Vec::new(),
        }
    }

    pub fn set_name(&mut self, name: &str) -> &mut Self {
        self.name = name.to_string();
        self
    }

    pub fn set_mode(&mut self, mode: Mode) -> &mut Self {
        self.mode = mode;
        self
    }

    pub fn place(&mut self, name: &str, colors: ColorSet) -> NodeId {
        let id = self.net.place(name);
        self.colors.insert(id, colors);
        id
    }

    pub fn place_with_id(&mut self, name: &str, id: u32, colors: ColorSet) -> NodeId {
        let id = self.net.node_with_id(NodeKind::Place, name, id);
        self.colors.insert(id, colors);
        id
    }

    pub fn transition(&mut self, name: &str, inputs: &[NodeId], outputs: &[NodeId]) -> NodeId {
        let id = self.net.transition(name);
        self.pending(id, name, inputs, outputs);
        id
    }

    pub fn transition_with_id(
        &mut self,
        name: &str,
        id: u32,
        inputs: &[NodeId],
        outputs: &[NodeId],
    ) -> NodeId {
        let id = self.net.node_with_id(NodeKind::Transition, name, id);
        self.pending(id, name, inputs, outputs);
        id
    }

    fn pending(&mut self, id: NodeId, name: &str, inputs: &[NodeId], outputs: &[NodeId]) {
        for p in inputs {
            self.net.arc(*p, id);
        }
        for p in outputs {
            self.net.arc(id, *p);
        }
        self.transitions.push(PendingTransition {
            id,
            name: name.to_string(),
            inputs: inputs.to_vec(),
            outputs: outputs.to_vec(),
            pairs: Vec::new(),
        });
    }

    /// Adds a pair to the most recently added transition with id `t`.
    pub fn pair(&mut self, t: NodeId, pair: Pair) -> &mut Self {
        if let Some(pt) = self.transitions.iter_mut().rev().find(|pt| pt.id == t) {
            pt.pairs.push(pair);
        }
        self
    }

    pub fn pairs(&mut self, t: NodeId, pairs: impl IntoIterator<Item = Pair>) -> &mut Self {
        for p in pairs {
            self.pair(t, p);
        }
        self
    }

    pub fn entry(&mut self, id: NodeId) -> &mut Self {
        self.net.entry(id);
        self
    }

    pub fn exit(&mut self, id: NodeId) -> &mut Self {
        self.net.exit(id);
        self
    }

    pub fn next_id(&mut self, next: u32) -> &mut Self {
        self.net.next_id(next);
        self
    }

    /// Builds the net and checks transformer consistency (and
    /// left-totality in strict mode). Workflow structure is not validated.
    pub fn build(&self) -> Result<ColoredWorkflowNet, ColoredBuildError> {
        let net = self.net.build()?;
        let colors = |p: &NodeId| self.colors.get(p).cloned().unwrap_or_else(ColorSet::unit);
        let mut transformers = BTreeMap::new();
        for pt in &self.transitions {
            let ports = |ps: &[NodeId]| ps.iter().map(|p| Port::new(*p, colors(p))).collect();
            let lambda = Transformer::new(ports(&pt.inputs), ports(&pt.outputs), pt.pairs.clone())
                .map_err(|source| ColoredBuildError::Transformer {
                    transition: pt.name.clone(),
                    source,
                })?;
            transformers.insert(pt.id, lambda);
        }
        let colors = net.places().map(|p| (p, colors(&p))).collect();
        Ok(ColoredWorkflowNet::new(
            &self.name,
            net,
            colors,
            transformers,
            self.mode,
        )?)
    }
}
