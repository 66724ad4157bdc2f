// Union, composition and Kleene star of transformers over one place.

use std::error::Error;

use cwfnet::color::{
    compose_transformers, star_with_rounds, union_transformers, ColorSet, ColorValue, Port,
    Transformer,
};
use cwfnet::net::NodeId;

fn on_p(pairs: &[(i64, i64)]) -> Result<Transformer, Box<dyn Error>> {
    let port = Port::new(NodeId(0), ColorSet::range(0, 5));
    let pairs = pairs
        .iter()
        .map(|(a, b)| (vec![ColorValue::int(*a)], vec![ColorValue::int(*b)]));
    Ok(Transformer::new(vec![port.clone()], vec![port], pairs)?)
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // inc adds one below 5; dbl doubles below 3.
    let inc = on_p(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])?;
    let dbl = on_p(&[(0, 0), (1, 2), (2, 4)])?;

    let either = union_transformers(&inc, &dbl)?;
    println!("inc + dbl has {} pairs", either.len());
    // (1, 2) is in both.
    assert_eq!(either.len(), 7);

    let inc_then_dbl = compose_transformers(&inc, &dbl)?;
    println!("inc · dbl = {inc_then_dbl}");
    assert_eq!(inc_then_dbl.len(), 2);

    let (star, rounds) = star_with_rounds(&inc)?;
    println!("inc* has {} pairs after {rounds} rounds", star.len());
    // Every value reaches every value above it: 6 + 5 + ... + 1 pairs.
    assert_eq!(star.len(), 21);
    let (again, _) = star_with_rounds(&star)?;
    assert_eq!(again, star);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
