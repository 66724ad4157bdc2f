//! Batch statistics: per-class net sizes, reduction percentage and rule
//! application counts.

use std::fmt::Write as _;

use crate::color::ColoredWorkflowNet;
use crate::net::{graph::is_acyclic, is_free_choice_net};
use crate::reduction::{Reduction, Verdict};
use crate::rules::NetSize;

/// Structural shape and verdict class of a net.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NetClass {
    AcyclicSound,
    AcyclicUnsound,
    AcyclicNotFc,
    CyclicSound,
    CyclicUnsound,
    CyclicNotFc,
}

impl NetClass {
    pub const ALL: [NetClass; 6] = [
        NetClass::AcyclicSound,
        NetClass::AcyclicUnsound,
        NetClass::AcyclicNotFc,
        NetClass::CyclicSound,
        NetClass::CyclicUnsound,
        NetClass::CyclicNotFc,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            NetClass::AcyclicSound => "acyclic FC sound",
            NetClass::AcyclicUnsound => "acyclic FC unsound",
            NetClass::AcyclicNotFc => "acyclic not FC",
            NetClass::CyclicSound => "cyclic FC sound",
            NetClass::CyclicUnsound => "cyclic FC unsound",
            NetClass::CyclicNotFc => "cyclic not FC",
        }
    }

    pub fn is_sound(&self) -> bool {
        matches!(self, NetClass::AcyclicSound | NetClass::CyclicSound)
    }
}

/// What the batch records about one net.
#[derive(Clone, Debug, PartialEq)]
pub struct NetOutcome {
    pub name: String,
    pub size: NetSize,
    pub class: NetClass,
    pub verdict: &'static str,
    /// Percentage of nodes removed by the reduction.
    pub reduced_by: f64,
    pub rule_applications: usize,
}

impl NetOutcome {
    pub fn new(cnet: &ColoredWorkflowNet, reduction: &Reduction) -> Self {
        let net = cnet.net();
        let acyclic = is_acyclic(net);
        let class = match (acyclic, is_free_choice_net(net), &reduction.verdict) {
            (true, false, _) => NetClass::AcyclicNotFc,
            (false, false, _) => NetClass::CyclicNotFc,
            (true, true, Verdict::CompletelyReduced { .. }) => NetClass::AcyclicSound,
            (false, true, Verdict::CompletelyReduced { .. }) => NetClass::CyclicSound,
            (true, true, _) => NetClass::AcyclicUnsound,
            (false, true, _) => NetClass::CyclicUnsound,
        };
        NetOutcome {
            name: cnet.name().to_string(),
            size: reduction.initial,
            class,
            verdict: reduction.verdict.label(),
            reduced_by: reduction.reduced_by(),
            rule_applications: reduction.counts.total(),
        }
    }
}

/// One line of the table.
#[derive(Clone, Debug, PartialEq)]
pub struct StatsRow {
    pub class: NetClass,
    pub nets: usize,
    pub places: (f64, usize, usize),
    pub transitions: (f64, usize, usize),
    /// Mean reduction percentage; `None` for sound classes, which reduce
    /// completely.
    pub reduced_by: Option<f64>,
    /// Total rule applications over the class.
    pub rule_applications: usize,
}

pub const CSV_HEADER: &str = "class,nets,p_avg,p_med,p_max,t_avg,t_med,t_max,reduced_by,rule_appl";

/// `(mean, lower median, max)`.
fn stats(mut xs: Vec<usize>) -> (f64, usize, usize) {
    xs.sort_unstable();
    let mean = xs.iter().sum::<usize>() as f64 / xs.len() as f64;
    (mean, xs[(xs.len() - 1) / 2], xs[xs.len() - 1])
}

/// Rows for the classes that occur, in [`NetClass::ALL`] order.
pub fn stats_rows(outcomes: &[NetOutcome]) -> Vec<StatsRow> {
    let mut rows = Vec::new();
    for class in NetClass::ALL {
        let group: Vec<&NetOutcome> = outcomes.iter().filter(|o| o.class == class).collect();
        if group.is_empty() {
            continue;
        }
        let reduced_by = (!class.is_sound())
            .then(|| group.iter().map(|o| o.reduced_by).sum::<f64>() / group.len() as f64);
        rows.push(StatsRow {
            class,
            nets: group.len(),
            places: stats(group.iter().map(|o| o.size.places).collect()),
            transitions: stats(group.iter().map(|o| o.size.transitions).collect()),
            reduced_by,
            rule_applications: group.iter().map(|o| o.rule_applications).sum(),
        });
    }
    rows
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub rows: Vec<StatsRow>,
    /// Aligned table for humans; empty when there are no rows.
    pub text: String,
    /// Header line plus one line per row.
    pub csv: String,
}

fn percent(p: Option<f64>) -> String {
    p.map_or_else(|| "-".to_string(), |p| format!("{p:.1}%"))
}

pub fn emit_report(outcomes: &[NetOutcome]) -> Report {
    let rows = stats_rows(outcomes);
    let mut text = String::new();
    if !rows.is_empty() {
        let _ = writeln!(
            text,
            "{:<20} {:>5} | {:>6} {:>4} {:>4} | {:>6} {:>4} {:>4} | {:>8} | {:>12}",
            "class", "nets", "|P|avg", "med", "max", "|T|avg", "med", "max", "red. by", "# rule appl."
        );
        for r in &rows {
            let _ = writeln!(
                text,
                "{:<20} {:>5} | {:>6.1} {:>4} {:>4} | {:>6.1} {:>4} {:>4} | {:>8} | {:>12}",
                r.class.label(),
                r.nets,
                r.places.0,
                r.places.1,
                r.places.2,
                r.transitions.0,
                r.transitions.1,
                r.transitions.2,
                percent(r.reduced_by),
                r.rule_applications
            );
        }
    }
    let mut csv = format!("{CSV_HEADER}\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{:.2},{},{},{:.2},{},{},{},{}",
            r.class.label(),
            r.nets,
            r.places.0,
            r.places.1,
            r.places.2,
            r.transitions.0,
            r.transitions.1,
            r.transitions.2,
            r.reduced_by.map_or_else(String::new, |p| format!("{p:.2}")),
            r.rule_applications
        );
    }
    Report { rows, text, csv }
}
