// Reading and writing the line-based native format.

use std::error::Error;

use cwfnet::formats::{emit_native, parse_native, FormatError};

const TEXT: &str = "\
NET counter
MODE strict
# values 0..2 on every place
PLACE i 0 1 2
PLACE p 0 1 2
PLACE o 0 1 2
TRANS start : i -> p
PAIR 0 -> 0
PAIR 1 -> 1
PAIR 2 -> 2
TRANS bump : p -> o
PAIR 0 -> 1
PAIR 1 -> 2
PAIR 2 -> 2
ENTRY i
EXIT o
";

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cnet = parse_native(TEXT)?;
    println!("{}: {} places, {} transitions", cnet.name(), cnet.net().place_count(), cnet.net().transition_count());
    let emitted = emit_native(&cnet);
    print!("{emitted}");
    assert_eq!(parse_native(&emitted)?, cnet);

    // Errors carry positions.
    match parse_native("NET broken\nPLACE i\nTRANS t i -> o\n") {
        Err(e @ FormatError::Syntax { .. }) => println!("error: {e}"),
        other => return Err(format!("expected a syntax error, got {other:?}").into()),
    }
    let partial = TEXT.replace("PAIR 2 -> 2\nTRANS", "TRANS");
    match parse_native(&partial) {
        Err(e) => println!("error: {e}"),
        Ok(_) => return Err("strict mode should reject a partial transformer".into()),
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
