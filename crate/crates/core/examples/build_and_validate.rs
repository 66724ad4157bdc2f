// Building a workflow net, checking the workflow conditions and looking at
// its clusters.

use std::error::Error;

use cwfnet::net::{compute_clusters, is_free_choice_net, validate, WorkflowNet};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let mut b = WorkflowNet::builder();
    let i = b.place("i");
    let p = b.place("p");
    let q = b.place("q");
    let o = b.place("o");
    let split = b.transition("split");
    let join = b.transition("join");
    b.arc(i, split).arc(split, p).arc(split, q);
    b.arc(p, join).arc(q, join).arc(join, o);
    b.entry(i).exit(o);
    let net = b.build()?;

    let violations = validate(&net);
    println!("{} places, {} transitions, {} violations", net.place_count(), net.transition_count(), violations.len());
    assert!(violations.is_empty());
    println!("free-choice: {}", is_free_choice_net(&net));
    for c in compute_clusters(&net).iter() {
        let names: Vec<&str> = c.nodes().iter().map(|n| net.name(*n)).collect();
        println!("cluster [{}]: {}", net.name(c.rep()), names.join(" "));
    }

    // A dangling place breaks the workflow conditions.
    let mut b = WorkflowNet::builder();
    let i = b.place("i");
    let o = b.place("o");
    let stray = b.place("stray");
    let t = b.transition("t");
    b.arc(i, t).arc(t, o).arc(t, stray);
    b.entry(i).exit(o);
    let broken = b.build()?;
    for v in validate(&broken) {
        println!("violation: {v}");
    }
    assert!(!validate(&broken).is_empty());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
