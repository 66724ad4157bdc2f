// Playing the colored token game on a small arithmetic net.

use std::error::Error;

use cwfnet::color::{enabled_bindings, fire_colored, ColorValue, ColoredMarking};
use cwfnet::models;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cnet = models::arithmetic_fragment();
    let net = cnet.net();
    let mut m = ColoredMarking::initial(net, ColorValue::unit());

    // start puts (x, y) on p1 and p5; pick x = 1, y = 2.
    let start = net.find("start").ok_or("no start")?;
    let binding = enabled_bindings(&cnet, &m, start)
        .into_iter()
        .find(|(_, v)| *v == vec![ColorValue::int(1), ColorValue::int(2)])
        .ok_or("binding not offered")?;
    m = fire_colored(&cnet, &m, start, &binding)?;

    // Every other transition is fired with whatever binding it offers first.
    for name in ["t1", "t2", "t3", "finish"] {
        let t = net.find(name).ok_or("missing transition")?;
        if name == "finish" {
            let (p4, v, _) = m.iter().next().ok_or("empty marking")?;
            println!("before finish: {} holds {v}", net.name(p4));
            assert_eq!(*v, ColorValue::int((1 + 1) + (1 + 2) * 2));
        }
        let binding = enabled_bindings(&cnet, &m, t)
            .into_iter()
            .next()
            .ok_or("transition not enabled")?;
        m = fire_colored(&cnet, &m, t, &binding)?;
        println!("fired {name}");
    }
    assert!(m.single_on(net.exit()).is_some());
    println!("a token reached o");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
