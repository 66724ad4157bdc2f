// Statistics over a seeded corpus of generated nets, as a table and as
// CSV.

use std::error::Error;

use cwfnet::corpus::{generate, CorpusOptions};
use cwfnet::formats::{emit_report, NetOutcome};
use cwfnet::reduction::reduce;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let opts = CorpusOptions {
        max_places: 10,
        max_colors: 2,
        ..Default::default()
    };
    let outcomes: Vec<NetOutcome> = generate(11, 120, &opts)
        .iter()
        .map(|c| NetOutcome::new(&c.net, &reduce(&c.net)))
        .collect();
    let report = emit_report(&outcomes);
    print!("{}", report.text);
    println!();
    print!("{}", report.csv);
    let total: usize = report.rows.iter().map(|r| r.nets).sum();
    assert_eq!(total, outcomes.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
