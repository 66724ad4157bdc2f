//! Acceptance criteria. Each prints one `[PASS]` or `[FAIL]` line; the
//! process exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::{Duration, Instant};

use cwfnet::color::{Atom, ColorValue, ColoredWorkflowNet};
use cwfnet::corpus::{generate, CorpusNet, CorpusOptions, Origin};
use cwfnet::formats::{emit_report, emit_trace, import_pnml, parse_native, NetOutcome, CSV_HEADER};
use cwfnet::net::{is_acyclic, is_free_choice_net};
use cwfnet::oracle::{
    check_equivalence, oracle_is_k_sound, oracle_is_sound, oracle_summary, Summary, DEFAULT_CAP,
    DEFAULT_COLORED_CAP,
};
use cwfnet::reduction::{
    compute_fragment, find_potential_synchronizers, reduce, reduce_fragment_to_synchronizers,
    reduce_synchronizer_only_fragment, select_minimal_fragment, Reduction, Verdict,
};
use cwfnet::rules::{NetSize, ReductionTrace, RuleKind};

use common::{check_rules, isomorphic, net_from, Graph};

const INSURANCE_BUDGET: Duration = Duration::from_secs(1);
const MIN_RULE_NETS: usize = 500;
const MIN_FC_NETS: usize = 300;
const MIN_K_NETS: usize = 300;
const MIN_NOT_FC_NETS: usize = 100;
const RULE_CAP: usize = 20_000;
const CORPUS_SEED: u64 = 2024;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> ColoredWorkflowNet {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    let text = std::fs::read_to_string(&path).expect("fixture exists");
    parse_native(&text).expect("fixture parses")
}

fn claim(group: &str, k: i64) -> ColorValue {
    ColorValue::tuple([Atom::sym(group), Atom::Int(k)])
}

fn claim_err(group: &str) -> ColorValue {
    ColorValue::tuple([Atom::sym(group), Atom::sym("ERR")])
}

/// Group A is paid in full; group B in full up to 3 and half (rounded
/// down) above. Every claim can also end in the error outcome of its group.
fn expected_insurance() -> Summary {
    let mut out = BTreeSet::new();
    for k in 1..=10 {
        out.insert((claim("A", k), claim("A", k)));
        out.insert((claim("B", k), claim("B", if k <= 3 { k } else { k / 2 })));
        for g in ["A", "B"] {
            out.insert((claim(g, k), claim_err(g)));
        }
    }
    out
}

fn c1_insurance() -> Outcome {
    let cnet = fixture("insurance-err.cwf");
    let start = Instant::now();
    let r = reduce(&cnet);
    let took = start.elapsed();
    let summary = r.summary().ok_or_else(|| format!("not reduced: {}", r.verdict.label()))?;
    for pair in [(claim("B", 3), claim("B", 3)), (claim("B", 4), claim("B", 2))] {
        if !summary.contains(&pair) {
            return Err(format!("missing {} -> {}", pair.0, pair.1));
        }
    }
    let expected = expected_insurance();
    if summary != expected {
        return Err(format!(
            "{} pairs differ from the expected relation",
            summary.symmetric_difference(&expected).count()
        ));
    }
    if took >= INSURANCE_BUDGET {
        return Err(format!("took {took:?}"));
    }
    Ok(format!("{} pairs in {took:?}", summary.len()))
}

fn names(cnet: &ColoredWorkflowNet, nodes: impl IntoIterator<Item = cwfnet::net::NodeId>) -> BTreeSet<String> {
    nodes
        .into_iter()
        .map(|n| cnet.net().name(n).to_string())
        .collect()
}

fn c2_extended() -> Outcome {
    let cnet = fixture("insurance-extended.cwf");
    let net = cnet.net();
    let fragments: Vec<_> = find_potential_synchronizers(net)
        .iter()
        .filter_map(|c| compute_fragment(net, c).ok())
        .collect();
    let f = select_minimal_fragment(&fragments).ok_or("no fragment")?;
    let expected: BTreeSet<String> = [
        "c7", "process", "c10", "c11", "check1", "check2", "c12", "c13", "combine", "c9",
        "processing_NOK",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let got = names(&cnet, f.nodes.iter().copied());
    if got != expected {
        return Err(format!("fragment is {got:?}"));
    }

    let mut trace = ReductionTrace::new(NetSize::of(net));
    let (after1, f1) =
        reduce_fragment_to_synchronizers(&cnet, f, &mut trace).map_err(|e| e.reason)?;
    // A fork, a join and one backward transition closing the loop.
    let loop_shape = net_from(&[
        ("x", &["a"], &["b", "c"]),
        ("y", &["b", "c"], &["d"]),
        ("z", &["d"], &["a"]),
    ]);
    let loop_nodes: BTreeSet<_> = loop_shape
        .nodes()
        .filter(|n| *n != loop_shape.entry() && *n != loop_shape.exit())
        .collect();
    if !isomorphic(
        &Graph::induced(after1.net(), &f1.nodes, false),
        &Graph::induced(&loop_shape, &loop_nodes, false),
    ) {
        return Err(format!("after phase 1 the fragment is {:?}", names(&after1, f1.nodes.iter().copied())));
    }

    let (after2, _) =
        reduce_synchronizer_only_fragment(&after1, &f1, &mut trace).map_err(|e| e.reason)?;
    let acyclic = net_from(&[
        ("register", &["i"], &["c1", "c2"]),
        ("send_questionnaire", &["c1"], &["c3"]),
        ("process_questionnaire", &["c3"], &["c5"]),
        ("time_out", &["c3"], &["c5"]),
        ("evaluate", &["c2"], &["c4"]),
        ("no_processing", &["c4", "c5"], &["c6"]),
        ("processing_required", &["c4", "c5"], &["c7"]),
        ("process", &["c7"], &["c10", "c11"]),
        ("check_and_combine", &["c10", "c11"], &["c9"]),
        ("processing_OK", &["c9"], &["c6"]),
        ("archive", &["c6"], &["o"]),
    ]);
    if !is_acyclic(after2.net()) {
        return Err("still cyclic after phase 2".into());
    }
    if !isomorphic(&Graph::of_net(after2.net()), &Graph::of_net(&acyclic)) {
        return Err("after phase 2 the net has a different structure".into());
    }

    let full = reduce(&cnet);
    let summary = full.summary().ok_or("full reduction did not complete")?;
    let oracle = oracle_summary(&cnet, DEFAULT_COLORED_CAP).map_err(|e| e.to_string())?;
    if summary != oracle {
        return Err("summary differs from the oracle".into());
    }
    Ok(format!("{} steps, {} summary pairs", full.trace.len(), summary.len()))
}

fn c3_golden_trace() -> Outcome {
    let cnet = fixture("small-loop.cwf");
    let r = reduce(&cnet);
    let kinds: Vec<RuleKind> = r.trace.steps.iter().map(|s| s.kind).collect();
    let want = [
        RuleKind::Merge,
        RuleKind::Shortcut,
        RuleKind::Iteration,
        RuleKind::DShortcut,
        RuleKind::DShortcut,
    ];
    if kinds != want {
        return Err(format!("rule sequence {kinds:?}"));
    }
    let golden_path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/small-loop.trace");
    let golden = std::fs::read_to_string(golden_path).map_err(|e| e.to_string())?;
    let rendered = emit_trace(&r.trace, &cnet);
    if rendered != golden {
        return Err(format!("trace differs from the golden file:\n{rendered}"));
    }
    if !r.verdict.is_reduced() {
        return Err(r.verdict.label().into());
    }
    Ok(format!("{} steps match", r.trace.len()))
}

fn rule_corpus() -> Vec<CorpusNet> {
    let opts = CorpusOptions {
        max_places: 9,
        max_colors: 3,
        permissive: 0.3,
        ..Default::default()
    };
    generate(CORPUS_SEED + 1, 700, &opts)
}

fn c4_rules() -> Outcome {
    let (mut nets, mut instances, mut skipped) = (0, 0, 0);
    let mut failures = Vec::new();
    for c in rule_corpus() {
        let check = check_rules(&c.net, RULE_CAP);
        instances += check.instances;
        skipped += check.skipped;
        if check.instances > 0 && check.skipped == 0 {
            nets += 1;
        }
        failures.extend(check.failures);
    }
    if let Some(first) = failures.first() {
        return Err(format!("{} violations, first: {first}", failures.len()));
    }
    if nets < MIN_RULE_NETS {
        return Err(format!("only {nets} nets fully checked"));
    }
    Ok(format!(
        "{nets} nets, {instances} instances, {skipped} beyond the state cap"
    ))
}

struct Analysed {
    net: CorpusNet,
    reduction: Reduction,
}

fn corpus() -> Vec<Analysed> {
    let opts = CorpusOptions {
        max_places: 11,
        max_colors: 3,
        permissive: 0.2,
        ..Default::default()
    };
    generate(CORPUS_SEED, 600, &opts)
        .into_iter()
        .map(|net| Analysed {
            reduction: reduce(&net.net),
            net,
        })
        .collect()
}

fn c5_fc_vs_oracle(corpus: &[Analysed]) -> Outcome {
    let mut checked = 0;
    for a in corpus.iter().filter(|a| a.net.origin != Origin::NotFc) {
        let cnet = &a.net.net;
        let Some(sound) = oracle_is_sound(cnet.net(), DEFAULT_CAP).soundness.as_bool() else {
            continue;
        };
        let verdict = &a.reduction.verdict;
        if verdict.soundness() != Some(sound) {
            return Err(format!("{}: oracle sound={sound}, reduction {}", cnet.name(), verdict.label()));
        }
        if sound {
            let Ok(oracle) = oracle_summary(cnet, DEFAULT_COLORED_CAP) else {
                continue;
            };
            if a.reduction.summary().as_ref() != Some(&oracle) {
                return Err(format!("{}: summary differs from the oracle", cnet.name()));
            }
        }
        checked += 1;
    }
    if checked < MIN_FC_NETS {
        return Err(format!("only {checked} free-choice nets decided"));
    }
    Ok(format!("{checked} free-choice nets agree"))
}

fn c6_k_soundness(corpus: &[Analysed]) -> Outcome {
    let mut checked = 0;
    for a in corpus.iter().filter(|a| a.net.origin != Origin::NotFc) {
        let net = a.net.net.net();
        let ks: Vec<Option<bool>> = (1..=3)
            .map(|k| oracle_is_k_sound(net, k, DEFAULT_CAP).soundness.as_bool())
            .collect();
        let Some(ks) = ks.into_iter().collect::<Option<Vec<bool>>>() else {
            continue;
        };
        if ks[0] != ks[1] || ks[1] != ks[2] {
            return Err(format!("{}: 1/2/3-sound = {ks:?}", a.net.net.name()));
        }
        checked += 1;
    }
    if checked < MIN_K_NETS {
        return Err(format!("only {checked} nets decided"));
    }
    let coupled = fixture("coupled-choice.cwf");
    let net = coupled.net();
    let one = oracle_is_k_sound(net, 1, DEFAULT_CAP).soundness;
    let two = oracle_is_k_sound(net, 2, DEFAULT_CAP).soundness;
    if is_free_choice_net(net) || !one.is_sound() || !two.is_unsound() {
        return Err(format!("coupled choice: fc={}, 1-sound {one}, 2-sound {two}", is_free_choice_net(net)));
    }
    Ok(format!("{checked} free-choice nets; the non-free-choice counterexample is 1-sound, not 2-sound"))
}

fn c7_bounds_and_report(corpus: &[Analysed]) -> Outcome {
    for a in corpus {
        let s = a.reduction.initial;
        let (c, t) = (s.clusters, s.transitions);
        let counts = a.reduction.counts;
        if counts.all_shortcuts() > c.pow(4) * t || counts.merge > c.pow(4) + c * c * t {
            return Err(format!("{}: {counts:?} exceeds the bounds for {s:?}", a.net.net.name()));
        }
    }
    let outcomes: Vec<NetOutcome> = corpus
        .iter()
        .map(|a| NetOutcome::new(&a.net.net, &a.reduction))
        .collect();
    check_report(&outcomes)?;
    let mut detail = format!("{} nets within the bounds, report well-formed", corpus.len());

    match std::env::var_os("CWFNET_PNML_DIR") {
        Some(dir) => {
            let mut outcomes = Vec::new();
            for entry in walk_pnml(Path::new(&dir)) {
                let text = std::fs::read_to_string(&entry).map_err(|e| e.to_string())?;
                let Ok(cnet) = import_pnml(&text, &entry.display().to_string()) else {
                    continue;
                };
                outcomes.push(NetOutcome::new(&cnet, &reduce(&cnet)));
            }
            check_report(&outcomes)?;
            detail.push_str(&format!("; {} PNML nets reported", outcomes.len()));
        }
        None => detail.push_str("; no PNML suite supplied (CWFNET_PNML_DIR)"),
    }
    Ok(detail)
}

fn walk_pnml(dir: &Path) -> Vec<std::path::PathBuf> {
    walkdir::WalkDir::new(dir)
        .sort_by_file_name()
        .into_iter()
        .flatten()
        .map(|e| e.into_path())
        .filter(|p| p.extension().is_some_and(|x| x == "pnml"))
        .collect()
}

fn check_report(outcomes: &[NetOutcome]) -> Result<(), String> {
    let report = emit_report(outcomes);
    let mut lines = report.csv.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err("CSV header missing".into());
    }
    let mut total = 0;
    let mut rows = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != CSV_HEADER.split(',').count() {
            return Err(format!("bad CSV row {line:?}"));
        }
        total += fields[1].parse::<usize>().map_err(|e| e.to_string())?;
        let num = |k: usize| fields[k].parse::<f64>().map_err(|e| format!("{line}: {e}"));
        let (p_avg, p_med, p_max) = (num(2)?, num(3)?, num(4)?);
        if p_med > p_max || p_avg > p_max {
            return Err(format!("inconsistent place statistics in {line:?}"));
        }
        rows += 1;
    }
    if total != outcomes.len() || rows != report.rows.len() {
        return Err(format!("{total} nets over {rows} rows for {} outcomes", outcomes.len()));
    }
    if report.text.lines().count() < rows {
        return Err("text table is missing rows".into());
    }
    Ok(())
}

fn c8_not_fc(corpus: &[Analysed]) -> Outcome {
    let (mut nets, mut compared) = (0, 0);
    for a in corpus.iter().filter(|a| a.net.origin == Origin::NotFc) {
        let cnet = &a.net.net;
        let Verdict::Irreducible { residual, .. } = &a.reduction.verdict else {
            return Err(format!("{}: {}", cnet.name(), a.reduction.verdict.label()));
        };
        nets += 1;
        match check_equivalence(cnet, residual, DEFAULT_COLORED_CAP) {
            Ok(r) if r.equivalent() => compared += 1,
            Ok(_) => return Err(format!("{}: residual is not equivalent", cnet.name())),
            Err(_) => {}
        }
    }
    if nets < MIN_NOT_FC_NETS {
        return Err(format!("only {nets} non-free-choice nets"));
    }
    Ok(format!("{nets} nets irreducible, {compared} residuals equivalent"))
}

fn main() {
    let mut failed = 0;
    let mut report = |label: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("[PASS] {label}: {detail}"),
        Err(why) => {
            failed += 1;
            println!("[FAIL] {label}: {why}");
        }
    };
    report("C1 insurance summary", c1_insurance());
    report("C2 extended insurance phases", c2_extended());
    report("C3 small loop golden trace", c3_golden_trace());
    report("C4 rules preserve soundness and summaries", c4_rules());
    let corpus = corpus();
    report("C5 free-choice verdicts match the oracle", c5_fc_vs_oracle(&corpus));
    report("C6 sound iff 2-sound iff 3-sound", c6_k_soundness(&corpus));
    report("C7 rule bounds and batch report", c7_bounds_and_report(&corpus));
    report("C8 non-free-choice nets irreducible", c8_not_fc(&corpus));
    if failed > 0 {
        std::process::exit(1);
    }
}
