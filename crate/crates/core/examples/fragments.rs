// Potential synchronizers, their fragments and the two phases that make a
// fragment acyclic, shown on the insurance process with a parallel check.

use std::error::Error;

use cwfnet::models;
use cwfnet::net::is_acyclic;
use cwfnet::reduction::{
    compute_fragment, find_potential_synchronizers, reduce_fragment_to_synchronizers,
    reduce_synchronizer_only_fragment, select_minimal_fragment,
};
use cwfnet::rules::{NetSize, ReductionTrace};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cnet = models::extended_insurance();
    let net = cnet.net();
    let mut fragments = Vec::new();
    for c in find_potential_synchronizers(net) {
        match compute_fragment(net, &c) {
            Ok(f) => {
                println!("[{}]: {} nodes", net.name(c.rep()), f.len());
                fragments.push(f);
            }
            Err(e) => println!("[{}]: {e:?}", net.name(c.rep())),
        }
    }
    let f = select_minimal_fragment(&fragments).ok_or("no fragment")?;
    println!("minimal: [{}] {:?}", net.name(f.synchronizer), f.names(net));

    let mut trace = ReductionTrace::new(NetSize::of(net));
    let (after1, f1) = reduce_fragment_to_synchronizers(&cnet, f, &mut trace).map_err(|e| e.reason)?;
    println!("after phase 1: {:?}", f1.names(after1.net()));
    let (after2, _) =
        reduce_synchronizer_only_fragment(&after1, &f1, &mut trace).map_err(|e| e.reason)?;
    println!("after phase 2 the net is acyclic: {}", is_acyclic(after2.net()));
    assert!(is_acyclic(after2.net()));
    print!("{}", trace.render(&cnet));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
