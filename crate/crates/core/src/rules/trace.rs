use std::fmt;

use super::{apply, NetSize, RuleApplication, RuleError, RuleKind};
use crate::color::ColoredWorkflowNet;

/// Applications per rule kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleCounts {
    pub merge: usize,
    pub iteration: usize,
    pub shortcut: usize,
    pub d_shortcut: usize,
}

impl RuleCounts {
    pub fn total(&self) -> usize {
        self.merge + self.iteration + self.shortcut + self.d_shortcut
    }

    /// Shortcuts of either variant.
    pub fn all_shortcuts(&self) -> usize {
        self.shortcut + self.d_shortcut
    }

    pub fn record(&mut self, kind: RuleKind) {
        match kind {
            RuleKind::Merge => self.merge += 1,
            RuleKind::Iteration => self.iteration += 1,
            RuleKind::Shortcut => self.shortcut += 1,
            RuleKind::DShortcut => self.d_shortcut += 1,
        }
    }
}

/// Ordered log of rule applications, with free-form notes about choices
/// the driver made along the way.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductionTrace {
    pub initial: NetSize,
    pub steps: Vec<RuleApplication>,
    /// `(number of steps taken when the note was made, text)`.
    pub notes: Vec<(usize, String)>,
}

impl ReductionTrace {
    pub fn new(initial: NetSize) -> Self {
        ReductionTrace {
            initial,
            ..Default::default()
        }
    }

    pub fn push(&mut self, step: RuleApplication) {
        self.steps.push(step);
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push((self.steps.len(), text.into()));
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Drops steps and notes recorded after `len` steps.
    pub fn truncate(&mut self, len: usize) {
        self.steps.truncate(len);
        self.notes.retain(|(at, _)| *at <= len);
    }

    pub fn counts(&self) -> RuleCounts {
        let mut c = RuleCounts::default();
        for s in &self.steps {
            c.record(s.kind);
        }
        c
    }

    /// Re-applies every step to `initial`.
    pub fn replay(&self, initial: &ColoredWorkflowNet) -> Result<ColoredWorkflowNet, RuleError> {
        let mut net = initial.clone();
        for step in &self.steps {
            net = apply(&net, &step.instance())?.0;
        }
        Ok(net)
    }

    /// Human-readable listing; node names are resolved against the nets
    /// the steps were applied to.
    pub fn render(&self, initial: &ColoredWorkflowNet) -> String {
        let mut out = String::new();
        let mut net = initial.clone();
        let mut notes = self.notes.iter().peekable();
        for (k, step) in self.steps.iter().enumerate() {
            while let Some((_, text)) = notes.next_if(|(at, _)| *at == k) {
                out.push_str(&format!("   # {text}\n"));
            }
            let ops: Vec<String> = step
                .operands
                .iter()
                .enumerate()
                .map(|(j, id)| {
                    let name = net.net().name(*id);
                    if j == 1 && step.kind != RuleKind::Merge {
                        format!("[{name}]")
                    } else {
                        name.to_string()
                    }
                })
                .collect();
            let next = match apply(&net, &step.instance()) {
                Ok((n, _)) => n,
                Err(e) => {
                    out.push_str(&format!("{:>3} {} {} FAILED: {e}\n", k + 1, step.kind, ops.join(",")));
                    return out;
                }
            };
            let created: Vec<&str> = step.created.iter().map(|id| next.net().name(*id)).collect();
            out.push_str(&format!(
                "{:>3} {}({}) -> [{}]  |P|={} |T|={} |C|={}\n",
                k + 1,
                step.kind,
                ops.join(","),
                created.join(","),
                step.size.places,
                step.size.transitions,
                step.size.clusters
            ));
            net = next;
        }
        for (_, text) in notes {
            out.push_str(&format!("   # {text}\n"));
        }
        out
    }
}

impl fmt::Display for RuleCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "merge={} iteration={} shortcut={} d-shortcut={}",
            self.merge, self.iteration, self.shortcut, self.d_shortcut
        )
    }
}
