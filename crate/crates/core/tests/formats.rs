//! Native format round trips, fixture goldens and report aggregation.

use std::path::Path;

use cwfnet::corpus::{generate, CorpusOptions};
use cwfnet::formats::{emit_native, parse_native, stats_rows, NetClass, NetOutcome};
use cwfnet::models;
use cwfnet::rules::NetSize;
use proptest::prelude::*;

fn fixture_text(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn fixtures_match_the_models() {
    let cases = [
        ("small-loop.cwf", models::small_loop()),
        ("small-loop-colored.cwf", models::small_loop_colored()),
        ("insurance.cwf", models::insurance()),
        ("insurance-err.cwf", models::insurance_err()),
        ("insurance-extended.cwf", models::extended_insurance()),
        ("coupled-choice.cwf", models::coupled_choice()),
        ("arithmetic-fragment.cwf", models::arithmetic_fragment()),
    ];
    for (file, model) in cases {
        let text = fixture_text(file);
        assert_eq!(text, emit_native(&model), "{file} is stale");
        assert_eq!(parse_native(&text).unwrap(), model, "{file}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn native_round_trip(seed in any::<u64>(), permissive in 0.0..1.0f64) {
        let opts = CorpusOptions { max_places: 10, permissive, ..Default::default() };
        let cnet = generate(seed, 1, &opts).pop().unwrap().net;
        let text = emit_native(&cnet);
        let back = parse_native(&text).unwrap();
        prop_assert_eq!(emit_native(&back), text);
        prop_assert_eq!(back, cnet);
    }
}

fn outcome() -> impl Strategy<Value = NetOutcome> {
    (0..NetClass::ALL.len(), 2..30usize, 1..30usize, 0.0..100.0f64, 0..50usize).prop_map(
        |(k, places, transitions, reduced_by, rules)| NetOutcome {
            name: String::new(),
            size: NetSize { places, transitions, clusters: places },
            class: NetClass::ALL[k],
            verdict: "",
            reduced_by,
            rule_applications: rules,
        },
    )
}

/// Lower median: the least value that at least half of the sample does not
/// exceed.
fn lower_median(xs: &[usize]) -> usize {
    let half = xs.len().div_ceil(2);
    *xs.iter()
        .filter(|x| xs.iter().filter(|y| y <= x).count() >= half)
        .min()
        .unwrap()
}

proptest! {
    #[test]
    fn report_rows_aggregate_their_class(outcomes in proptest::collection::vec(outcome(), 0..40)) {
        let rows = stats_rows(&outcomes);
        let classes: Vec<NetClass> = NetClass::ALL
            .into_iter()
            .filter(|c| outcomes.iter().any(|o| o.class == *c))
            .collect();
        prop_assert_eq!(rows.iter().map(|r| r.class).collect::<Vec<_>>(), classes);
        for row in &rows {
            let group: Vec<&NetOutcome> = outcomes.iter().filter(|o| o.class == row.class).collect();
            let places: Vec<usize> = group.iter().map(|o| o.size.places).collect();
            let transitions: Vec<usize> = group.iter().map(|o| o.size.transitions).collect();
            prop_assert_eq!(row.nets, group.len());
            let mean = places.iter().sum::<usize>() as f64 / places.len() as f64;
            prop_assert!((row.places.0 - mean).abs() < 1e-9);
            prop_assert_eq!(row.places.1, lower_median(&places));
            prop_assert_eq!(row.places.2, *places.iter().max().unwrap());
            prop_assert_eq!(row.transitions.1, lower_median(&transitions));
            prop_assert_eq!(row.transitions.2, *transitions.iter().max().unwrap());
            prop_assert_eq!(row.rule_applications, group.iter().map(|o| o.rule_applications).sum::<usize>());
            match row.reduced_by {
                None => prop_assert!(row.class.is_sound()),
                Some(r) => {
                    let mean = group.iter().map(|o| o.reduced_by).sum::<f64>() / group.len() as f64;
                    prop_assert!((r - mean).abs() < 1e-9);
                }
            }
        }
    }
}
