// Comparing a net with its reduced form and with a deliberately wrong
// replacement.

use std::error::Error;

use cwfnet::color::{ColorSet, ColorValue, ColoredNetBuilder, ColoredWorkflowNet, Mode};
use cwfnet::models;
use cwfnet::oracle::{check_equivalence, DEFAULT_COLORED_CAP};
use cwfnet::reduction::{reduce, summary_pairs, Verdict};

/// `i → t → o` carrying exactly `pairs`.
fn one_step(name: &str, pairs: &[(ColorValue, ColorValue)]) -> Result<ColoredWorkflowNet, Box<dyn Error>> {
    let colors = ColorSet::range(0, 3);
    let mut b = ColoredNetBuilder::new(name, Mode::Permissive);
    let i = b.place("i", colors.clone());
    let o = b.place("o", colors);
    let t = b.transition("t", &[i], &[o]);
    b.pairs(t, pairs.iter().map(|(v, w)| (vec![v.clone()], vec![w.clone()])));
    b.entry(i).exit(o);
    Ok(b.build()?)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let loop_net = models::small_loop_colored();
    let Verdict::CompletelyReduced { summary } = reduce(&loop_net).verdict else {
        return Err("the small loop should reduce".into());
    };
    let pairs: Vec<_> = summary_pairs(&summary).into_iter().collect();
    let reduced = one_step("reduced", &pairs)?;
    let same = check_equivalence(&loop_net, &reduced, DEFAULT_COLORED_CAP)?;
    println!("loop vs its summary: equivalent = {}", same.equivalent());
    assert!(same.equivalent());

    // Drop the pair 0 -> 3: the loop can still produce it.
    let fewer: Vec<_> = pairs
        .iter()
        .filter(|(v, w)| !(*v == ColorValue::int(0) && *w == ColorValue::int(3)))
        .cloned()
        .collect();
    let wrong = one_step("wrong", &fewer)?;
    let diff = check_equivalence(&loop_net, &wrong, DEFAULT_COLORED_CAP)?;
    for (v, w) in &diff.only_in_first {
        println!("only the loop produces {v} -> {w}");
    }
    assert!(!diff.equivalent());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
