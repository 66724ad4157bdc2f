// Deciding soundness and k-soundness by exploring the state space, with
// witnesses for unsound nets.

use std::error::Error;

use cwfnet::models;
use cwfnet::oracle::{oracle_is_k_sound, oracle_is_sound, verify_witness, Soundness, DEFAULT_CAP};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let small_loop = models::small_loop();
    let v = oracle_is_sound(small_loop.net(), DEFAULT_CAP);
    println!("small loop: {}", v.describe(small_loop.net()));

    // Sound with one case, but two cases can deadlock.
    let coupled = models::coupled_choice();
    let net = coupled.net();
    for k in 1..=3 {
        let v = oracle_is_k_sound(net, k, DEFAULT_CAP);
        println!("coupled choice, k = {k}: {} ({} states)", v.soundness, v.states);
    }
    assert!(oracle_is_k_sound(net, 1, DEFAULT_CAP).soundness.is_sound());
    assert!(oracle_is_k_sound(net, 2, DEFAULT_CAP).soundness.is_unsound());

    let err = models::insurance();
    let v = oracle_is_sound(err.net(), DEFAULT_CAP);
    println!("insurance (uncolored): {}", v.describe(err.net()));
    if let Soundness::Unsound(w) = &v.soundness {
        assert!(verify_witness(err.net(), w, DEFAULT_CAP));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
