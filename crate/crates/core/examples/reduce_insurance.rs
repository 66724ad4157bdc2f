// Reducing the insurance claim process and reading off what it pays.

use std::error::Error;

use cwfnet::formats::{emit_summary, emit_trace};
use cwfnet::models;
use cwfnet::reduction::{reduce, Verdict};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cnet = models::insurance_err();
    let r = reduce(&cnet);
    print!("{}", emit_trace(&r.trace, &cnet));
    let Verdict::CompletelyReduced { .. } = &r.verdict else {
        return Err(format!("expected a complete reduction, got {}", r.verdict.label()).into());
    };
    println!("counts: {:?}", r.counts);
    let summary = r.summary().ok_or("no summary")?;
    let paid: Vec<String> = emit_summary(&summary)
        .lines()
        .filter(|l| !l.contains("ERR"))
        .map(str::to_string)
        .collect();
    println!("{}", paid.join("\n"));
    assert!(paid.iter().any(|l| l == "(B,4) -> (B,2)"));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
