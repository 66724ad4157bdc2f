//! Import of the structural subset of PNML: places, transitions and arcs.
//! Graphics, inscriptions, markings and namespaces are ignored.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::color::ColoredWorkflowNet;
use crate::net::{validate, BuildError, NodeId, WorkflowNet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ImportError {
    #[error("not well-formed XML: {0}")]
    Xml(String),
    #[error("element <{element}> has no id attribute")]
    MissingId { element: String },
    #[error("arc refers to unknown node {0}")]
    UnknownNode(String),
    #[error("arc {0} -> {1} connects two nodes of the same kind")]
    SameKind(String, String),
    #[error("expected exactly one source place, found {0}")]
    Sources(usize),
    #[error("expected exactly one sink place, found {0}")]
    Sinks(usize),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("not a workflow net: {0}")]
    NotWorkflow(String),
}

/// The `<name><text>` label of an element, if any.
fn label(node: roxmltree::Node<'_, '_>) -> Option<String> {
    let name = node
        .children()
        .find(|c| c.is_element() && c.tag_name().name() == "name")?;
    let text = name
        .descendants()
        .find(|c| c.is_element() && c.tag_name().name() == "text")?
        .text()?;
    let cleaned: String = text
        .split_whitespace()
        .collect::<Vec<_>>()
        .join("_");
    (!cleaned.is_empty()).then_some(cleaned)
}

/// Reads a PNML document into a unit-colored net. Labels become node names
/// when they are unique; element ids are used otherwise.
pub fn import_pnml(text: &str, name: &str) -> Result<ColoredWorkflowNet, ImportError> {
    let doc = roxmltree::Document::parse(text).map_err(|e| ImportError::Xml(e.to_string()))?;
    let mut places = Vec::new();
    let mut transitions = Vec::new();
    let mut arcs = Vec::new();
    for node in doc.descendants().filter(|n| n.is_element()) {
        let kind = node.tag_name().name();
        if !matches!(kind, "place" | "transition" | "arc") {
            continue;
        }
        let id = node
            .attribute("id")
            .map(str::to_string)
            .or_else(|| (kind == "arc").then(String::new))
            .ok_or_else(|| ImportError::MissingId {
                element: kind.to_string(),
            })?;
        match kind {
            "place" => places.push((id, label(node))),
            "transition" => transitions.push((id, label(node))),
            _ => {
                let src = node.attribute("source").unwrap_or_default().to_string();
                let dst = node.attribute("target").unwrap_or_default().to_string();
                arcs.push((src, dst));
            }
        }
    }

    let mut label_count: BTreeMap<String, usize> = BTreeMap::new();
    for (_, l) in places.iter().chain(&transitions) {
        if let Some(l) = l {
            *label_count.entry(l.clone()).or_default() += 1;
        }
    }
    let ids: BTreeSet<&String> = places.iter().chain(&transitions).map(|(id, _)| id).collect();
    let display = |id: &String, l: &Option<String>| match l {
        Some(l) if label_count[l] == 1 && (!ids.contains(l) || l == id) => l.clone(),
        _ => id.clone(),
    };

    let mut b = WorkflowNet::builder();
    let mut by_id: BTreeMap<String, (NodeId, bool)> = BTreeMap::new();
    for (id, l) in &places {
        by_id.insert(id.clone(), (b.place(&display(id, l)), true));
    }
    for (id, l) in &transitions {
        by_id.insert(id.clone(), (b.transition(&display(id, l)), false));
    }
    let mut has_in: BTreeSet<NodeId> = BTreeSet::new();
    let mut has_out: BTreeSet<NodeId> = BTreeSet::new();
    for (src, dst) in &arcs {
        let (s, s_place) = *by_id
            .get(src)
            .ok_or_else(|| ImportError::UnknownNode(src.clone()))?;
        let (d, d_place) = *by_id
            .get(dst)
            .ok_or_else(|| ImportError::UnknownNode(dst.clone()))?;
        if s_place == d_place {
            return Err(ImportError::SameKind(src.clone(), dst.clone()));
        }
        b.arc(s, d);
        has_out.insert(s);
        has_in.insert(d);
    }
    let place_ids: Vec<NodeId> = places.iter().map(|(id, _)| by_id[id].0).collect();
    let sources: Vec<NodeId> = place_ids.iter().copied().filter(|p| !has_in.contains(p)).collect();
    let sinks: Vec<NodeId> = place_ids.iter().copied().filter(|p| !has_out.contains(p)).collect();
    if sources.len() != 1 {
        return Err(ImportError::Sources(sources.len()));
    }
    if sinks.len() != 1 {
        return Err(ImportError::Sinks(sinks.len()));
    }
    b.entry(sources[0]).exit(sinks[0]);
    let net = b.build()?;
    let violations = validate(&net);
    if !violations.is_empty() {
        let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(ImportError::NotWorkflow(text.join("; ")));
    }
    Ok(ColoredWorkflowNet::unit(name, net))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"<?xml version="1.0"?>
<pnml xmlns="http://www.pnml.org/version-2009/grammar/pnml">
  <net id="n" type="http://www.pnml.org/version-2009/grammar/ptnet">
    <page id="pg">
      <place id="p1"><name><text>start</text></name><initialMarking><text>1</text></initialMarking></place>
      <place id="p2"><name><text>end</text></name></place>
      <transition id="t1"><name><text>do  work</text></name><graphics><position x="1" y="2"/></graphics></transition>
      <arc id="a1" source="p1" target="t1"/>
      <arc id="a2" source="t1" target="p2"/>
    </page>
  </net>
</pnml>"#;

    #[test]
    fn minimal_document() {
        let cnet = import_pnml(MINIMAL, "minimal").unwrap();
        let net = cnet.net();
        assert_eq!((net.place_count(), net.transition_count(), net.arc_count()), (2, 1, 2));
        assert_eq!(net.name(net.entry()), "start");
        assert_eq!(net.name(net.exit()), "end");
        assert!(net.find("do_work").is_some());
    }

    #[test]
    fn two_sinks_rejected() {
        let text = MINIMAL.replace(
            r#"<arc id="a2""#,
            r#"<place id="p3"/><arc id="a3" source="t1" target="p3"/><arc id="a2""#,
        );
        assert_eq!(import_pnml(&text, "x").unwrap_err(), ImportError::Sinks(2));
    }

    #[test]
    fn place_to_place_arc_rejected() {
        let text = MINIMAL.replace(r#"target="t1""#, r#"target="p2""#);
        assert!(matches!(import_pnml(&text, "x").unwrap_err(), ImportError::SameKind(..)));
    }
}
