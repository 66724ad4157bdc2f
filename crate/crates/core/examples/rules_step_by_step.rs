// Applying the four reduction rules by hand to the small loop net, always
// taking the first applicable instance of the first rule that has one.

use std::error::Error;

use cwfnet::models;
use cwfnet::reduction::completely_reduced;
use cwfnet::rules::{apply, enumerate_applicable, RuleKind};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut cnet = models::small_loop_colored();
    let order = [
        RuleKind::Merge,
        RuleKind::Iteration,
        RuleKind::DShortcut,
        RuleKind::Shortcut,
    ];
    let mut steps = 0;
    while !completely_reduced(cnet.net()) {
        let instance = order
            .iter()
            .find_map(|k| enumerate_applicable(cnet.net(), *k).into_iter().next())
            .ok_or("no rule applies")?;
        let (next, app) = apply(&cnet, &instance)?;
        let ops: Vec<&str> = app.operands.iter().map(|n| cnet.net().name(*n)).collect();
        let created: Vec<&str> = app.created.iter().map(|n| next.net().name(*n)).collect();
        println!("{}({}) -> {:?}", app.kind, ops.join(", "), created);
        cnet = next;
        steps += 1;
        assert!(steps < 20, "the rules should finish quickly here");
    }
    let t = cnet.net().transitions().next().ok_or("no transition")?;
    println!("summary: {}", cnet.transformer(t));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
