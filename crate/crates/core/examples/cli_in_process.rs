// Driving the command-line front end from code, with output captured in
// memory.

use std::error::Error;
use std::path::Path;

use clap::Parser;
use cwfnet::cli::{run, RunConfig, EXIT_OK};

fn invoke(args: &[&str]) -> Result<(i32, String), Box<dyn Error>> {
    let config = RunConfig::try_parse_from(std::iter::once("cwfnet").chain(args.iter().copied()))?;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&config, &mut out, &mut err);
    let mut text = String::from_utf8(out)?;
    text.push_str(&String::from_utf8(err)?);
    Ok((code, text))
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let small_loop = fixtures.join("small-loop-colored.cwf");
    let small_loop = small_loop.to_str().ok_or("non-UTF-8 path")?;
    let dir = fixtures.to_str().ok_or("non-UTF-8 path")?;
    for args in [
        vec!["check", small_loop],
        vec!["summarize", small_loop],
        vec!["oracle", small_loop],
        vec!["equiv", small_loop],
        vec!["--report", "csv", "batch", dir],
    ] {
        let (code, text) = invoke(&args)?;
        println!("$ cwfnet {}  (exit {code})\n{text}", args.join(" "));
        assert_eq!(code, EXIT_OK);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
