//! Hand-built nets: the insurance-claim process (as written and with error
//! values completing every transformer), its extension with a parallel
//! check, the four-transition loop used to illustrate the rules, and the
//! small colored fragment used to illustrate colored firing.

use crate::color::{
    Atom, ColorSet, ColorValue, ColoredNetBuilder, ColoredWorkflowNet, Mode, Pair, Tuple,
};
use crate::net::NodeId;

fn sym(s: &str) -> Atom {
    Atom::sym(s)
}

fn int(n: i64) -> Atom {
    Atom::Int(n)
}

fn tup(atoms: &[Atom]) -> ColorValue {
    ColorValue::Tuple(atoms.to_vec())
}

fn unit() -> ColorValue {
    ColorValue::unit()
}

fn groups() -> Vec<Atom> {
    vec![sym("A"), sym("B")]
}

fn costs() -> Vec<Atom> {
    (1..=10).map(int).collect()
}

fn costs_err() -> Vec<Atom> {
    let mut v = costs();
    v.push(sym("ERR"));
    v
}

fn answers() -> Vec<Atom> {
    vec![sym("YES"), sym("NO"), sym("TO")]
}

fn set(factors: &[Vec<Atom>]) -> ColorSet {
    ColorSet::product(factors).expect("nonempty factors")
}

fn each(factors: &[Vec<Atom>]) -> Vec<Vec<Atom>> {
    set(factors)
        .iter()
        .map(|v| v.atoms().to_vec())
        .collect()
}

fn single(value: ColorValue) -> Tuple {
    vec![value]
}

/// The loop `i → t1 → c1 ⇄ c2 → t5 → o` with the parallel pair `t2`, `t3`
/// from `c1` to `c2` and the back edge `t4`; unit colors.
pub fn small_loop() -> ColoredWorkflowNet {
    let net = small_loop_structure("small-loop", ColorSet::unit(), |_, v| vec![v.clone()]);
    net.with_mode(Mode::Strict)
}

/// The same structure over the values `0..=3`: `t2` increments (capped at
/// 3), every other transition is the identity.
pub fn small_loop_colored() -> ColoredWorkflowNet {
    small_loop_structure("small-loop-colored", ColorSet::range(0, 3), |name, v| {
        let n = match v {
            ColorValue::Atom(Atom::Int(n)) => *n,
            _ => unreachable!(),
        };
        if name == "t2" {
            vec![ColorValue::int((n + 1).min(3))]
        } else {
            vec![v.clone()]
        }
    })
}

fn small_loop_structure(
    name: &str,
    colors: ColorSet,
    image: impl Fn(&str, &ColorValue) -> Vec<ColorValue>,
) -> ColoredWorkflowNet {
    let mut b = ColoredNetBuilder::new(name, Mode::Strict);
    let i = b.place("i", colors.clone());
    let c1 = b.place("c1", colors.clone());
    let c2 = b.place("c2", colors.clone());
    let o = b.place("o", colors.clone());
    let arcs: [(&str, NodeId, NodeId); 5] = [
        ("t1", i, c1),
        ("t2", c1, c2),
        ("t3", c1, c2),
        ("t4", c2, c1),
        ("t5", c2, o),
    ];
    for (tname, from, to) in arcs {
        let t = b.transition(tname, &[from], &[to]);
        for v in colors.iter() {
            for w in image(tname, v) {
                b.pair(t, (single(v.clone()), single(w)));
            }
        }
    }
    b.entry(i).exit(o);
    b.build().expect("small loop is consistent")
}

/// Which encoding of the insurance transformers to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Encoding {
    AsWritten,
    ErrCompleted,
}

/// The insurance claim process with its transformers exactly as tabulated:
/// several are partial, so the net is in permissive mode.
pub fn insurance() -> ColoredWorkflowNet {
    insurance_net(Encoding::AsWritten, false)
}

/// The insurance claim process with every transformer completed to a
/// left-total relation by routing unexpected inputs to `ERR` values that
/// propagate to `o`. Strict mode.
pub fn insurance_err() -> ColoredWorkflowNet {
    insurance_net(Encoding::ErrCompleted, false)
}

/// The error-completed insurance process where `process_complaint` and
/// `check_processing` are replaced by a parallel region: `process` forks to
/// `c10`/`c11`, `check1` and `check2` act on each branch and `combine`
/// joins them into `c9`.
pub fn extended_insurance() -> ColoredWorkflowNet {
    insurance_net(Encoding::ErrCompleted, true)
}

fn is_cost(a: &Atom) -> Option<i64> {
    match a {
        Atom::Int(n) => Some(*n),
        _ => None,
    }
}

/// `check_processing`: the revised value must be the full claim for group A
/// and half of it (integer division) for group B.
fn check_ok(x: &Atom, k: &Atom, v: &Atom) -> bool {
    match (is_cost(k), is_cost(v)) {
        (Some(k), Some(v)) if k >= 4 => {
            if *x == sym("A") {
                v == k
            } else {
                v == k / 2
            }
        }
        _ => false,
    }
}

fn insurance_net(enc: Encoding, extended: bool) -> ColoredWorkflowNet {
    let err = enc == Encoding::ErrCompleted;
    let (name, mode) = match (enc, extended) {
        (Encoding::AsWritten, _) => ("insurance", Mode::Permissive),
        (Encoding::ErrCompleted, false) => ("insurance-err", Mode::Strict),
        (Encoding::ErrCompleted, true) => ("insurance-extended", Mode::Strict),
    };
    let k_out = if err { costs_err() } else { costs() };

    let c_in = set(&[groups(), costs()]);
    let c_out = set(&[groups(), k_out.clone()]);
    let c4 = set(&[groups(), costs(), vec![sym("PR"), sym("NPR")]]);
    let c5 = ColorSet::new(answers().into_iter().map(ColorValue::Atom)).unwrap();
    let c7_f = vec![groups(), k_out.clone(), answers()];
    let c7 = set(&c7_f);
    let c8_f = if err {
        vec![groups(), costs_err(), answers(), costs_err()]
    } else {
        vec![groups(), costs(), answers(), costs()]
    };
    let c9_f = vec![groups(), k_out.clone(), answers(), costs_err()];

    let mut b = ColoredNetBuilder::new(name, mode);
    let i = b.place("i", c_in.clone());
    let c1 = b.place("c1", ColorSet::unit());
    let c2 = b.place("c2", c_in.clone());
    let c3 = b.place("c3", ColorSet::unit());
    let c4p = b.place("c4", c4.clone());
    let c5p = b.place("c5", c5.clone());
    let c6 = b.place("c6", c_out.clone());
    let c7p = b.place("c7", c7.clone());
    let (c8p, c10, c11, c12, c13) = if extended {
        let c10 = b.place("c10", set(&c8_f));
        let c11 = b.place("c11", ColorSet::unit());
        let c12 = b.place("c12", set(&c9_f));
        let c13 = b.place("c13", ColorSet::unit());
        (None, c10, c11, c12, c13)
    } else {
        let c8p = b.place("c8", set(&c8_f));
        (Some(c8p), c8p, c8p, c8p, c8p)
    };
    let c9 = b.place("c9", set(&c9_f));
    let o = b.place("o", c_out.clone());
    b.entry(i).exit(o);

    let t = b.transition("register", &[i], &[c1, c2]);
    for xk in each(&[groups(), costs()]) {
        b.pair(t, (single(tup(&xk)), vec![unit(), tup(&xk)]));
    }
    let t = b.transition("send_questionnaire", &[c1], &[c3]);
    b.pair(t, (single(unit()), single(unit())));
    let t = b.transition("process_questionnaire", &[c3], &[c5p]);
    b.pair(t, (single(unit()), single(ColorValue::sym("YES"))));
    b.pair(t, (single(unit()), single(ColorValue::sym("NO"))));
    let t = b.transition("time_out", &[c3], &[c5p]);
    b.pair(t, (single(unit()), single(ColorValue::sym("TO"))));

    let t = b.transition("evaluate", &[c2], &[c4p]);
    for xk in each(&[groups(), costs()]) {
        let k = is_cost(&xk[1]).unwrap();
        let verdict = if k <= 3 { "NPR" } else { "PR" };
        let out = tup(&[xk[0].clone(), xk[1].clone(), sym(verdict)]);
        b.pair(t, (single(tup(&xk)), single(out)));
    }

    let t_no = b.transition("no_processing", &[c4p, c5p], &[c6]);
    let t_req = b.transition("processing_required", &[c4p, c5p], &[c7p]);
    for xkr in each(&[groups(), costs(), vec![sym("PR"), sym("NPR")]]) {
        let (x, k, r) = (&xkr[0], &xkr[1], &xkr[2]);
        let small = is_cost(k).unwrap() <= 3;
        for q in answers() {
            let input = vec![tup(&xkr), ColorValue::Atom(q.clone())];
            if *r == sym("NPR") && small {
                b.pair(t_no, (input.clone(), single(tup(&[x.clone(), k.clone()]))));
            } else if err {
                b.pair(t_no, (input.clone(), single(tup(&[x.clone(), sym("ERR")]))));
            }
            if *r == sym("PR") && !small {
                b.pair(t_req, (input, single(tup(&[x.clone(), k.clone(), q.clone()]))));
            } else if err {
                b.pair(t_req, (input, single(tup(&[x.clone(), sym("ERR"), q.clone()]))));
            }
        }
    }

    // process_complaint lowers the estimate k to some v ≤ k; in the extended
    // variant `process` also forks a unit token to the second branch.
    let proc_outputs: Vec<NodeId> = if extended { vec![c10, c11] } else { vec![c10] };
    let proc_name = if extended { "process" } else { "process_complaint" };
    let t = b.transition(proc_name, &[c7p], &proc_outputs);
    for xkq in each(&c7_f) {
        let (x, k, q) = (&xkq[0], &xkq[1], &xkq[2]);
        let mut outs = Vec::new();
        match is_cost(k) {
            Some(kn) if kn >= 4 => {
                for v in 1..=kn {
                    outs.push(tup(&[x.clone(), k.clone(), q.clone(), int(v)]));
                }
            }
            _ if err => outs.push(tup(&[x.clone(), k.clone(), q.clone(), sym("ERR")])),
            _ => {}
        }
        for out in outs {
            let mut w = vec![out];
            if extended {
                w.push(unit());
            }
            b.pair(t, (single(tup(&xkq)), w));
        }
    }

    let check_target = if extended { c12 } else { c9 };
    let check_name = if extended { "check1" } else { "check_processing" };
    let t = b.transition(check_name, &[c8p.unwrap_or(c10)], &[check_target]);
    for xkqv in each(&c8_f) {
        let (x, k, q, v) = (&xkqv[0], &xkqv[1], &xkqv[2], &xkqv[3]);
        let out = if check_ok(x, k, v) {
            tup(&xkqv)
        } else {
            tup(&[x.clone(), k.clone(), q.clone(), sym("ERR")])
        };
        b.pair(t, (single(tup(&xkqv)), single(out)));
    }
    if extended {
        let t = b.transition("check2", &[c11], &[c13]);
        b.pair(t, (single(unit()), single(unit())));
        let t = b.transition("combine", &[c12, c13], &[c9]);
        for xkqw in each(&c9_f) {
            b.pair(t, (vec![tup(&xkqw), unit()], single(tup(&xkqw))));
        }
    }

    let t_nok = b.transition("processing_NOK", &[c9], &[c7p]);
    let t_ok = b.transition("processing_OK", &[c9], &[c6]);
    for xkqw in each(&c9_f) {
        let (x, k, q, w) = (&xkqw[0], &xkqw[1], &xkqw[2], &xkqw[3]);
        let back = tup(&[x.clone(), k.clone(), q.clone()]);
        let valid_k = matches!(is_cost(k), Some(kn) if kn >= 4);
        if err || (*w == sym("ERR") && valid_k) {
            b.pair(t_nok, (single(tup(&xkqw)), single(back)));
        }
        if valid_k && is_cost(w).is_some() {
            b.pair(t_ok, (single(tup(&xkqw)), single(tup(&[x.clone(), w.clone()]))));
        } else if err {
            b.pair(t_ok, (single(tup(&xkqw)), single(tup(&[x.clone(), sym("ERR")]))));
        }
    }

    let t = b.transition("archive", &[c6], &[o]);
    for v in c_out.iter() {
        b.pair(t, (single(v.clone()), single(v.clone())));
    }
    b.build().expect("insurance net is consistent")
}

/// The summary relation the insurance process is expected to compute,
/// restricted to outcomes without `ERR`: group A is paid its claim, group B
/// its claim up to 3 and half its claim (integer division) above 3.
pub fn insurance_expected_summary() -> Vec<(ColorValue, ColorValue)> {
    let mut out = Vec::new();
    for x in ["A", "B"] {
        for k in 1..=10i64 {
            let paid = if x == "B" && k >= 4 { k / 2 } else { k };
            out.push((
                tup(&[sym(x), int(k)]),
                tup(&[sym(x), int(paid)]),
            ));
        }
    }
    out
}

/// True iff a summary pair mentions `ERR`.
pub fn mentions_err(v: &ColorValue) -> bool {
    v.atoms().iter().any(|a| *a == sym("ERR"))
}

/// The colored fragment with `t1: p1 → p2, p3` computing `x+1`, `x+2`,
/// `t2: p3, p5 → p6` computing the product and `t3: p2, p6 → p4` computing
/// the sum, closed into a workflow net by `start: i → p1, p5` and
/// `finish: p4 → o`. Values are `0..=12`; pairs whose result would leave
/// that range are omitted, so the net is permissive.
pub fn arithmetic_fragment() -> ColoredWorkflowNet {
    let vals = ColorSet::range(0, 12);
    let n = |k: i64| ColorValue::int(k);
    let mut b = ColoredNetBuilder::new("arithmetic", Mode::Permissive);
    let i = b.place("i", ColorSet::unit());
    let p: Vec<NodeId> = (1..=6)
        .map(|k| b.place(&format!("p{k}"), vals.clone()))
        .collect();
    let o = b.place("o", ColorSet::unit());
    b.entry(i).exit(o);
    let start = b.transition("start", &[i], &[p[0], p[4]]);
    for x in 0..=12 {
        for y in 0..=12 {
            b.pair(start, (vec![unit()], vec![n(x), n(y)]));
        }
    }
    let t1 = b.transition("t1", &[p[0]], &[p[1], p[2]]);
    let t2 = b.transition("t2", &[p[2], p[4]], &[p[5]]);
    let t3 = b.transition("t3", &[p[1], p[5]], &[p[3]]);
    for x in 0..=12 {
        if x + 2 <= 12 {
            b.pair(t1, (vec![n(x)], vec![n(x + 1), n(x + 2)]));
        }
        for y in 0..=12 {
            if x * y <= 12 {
                b.pair(t2, (vec![n(x), n(y)], vec![n(x * y)]));
            }
            if x + y <= 12 {
                b.pair(t3, (vec![n(x), n(y)], vec![n(x + y)]));
            }
        }
    }
    let finish = b.transition("finish", &[p[3]], &[o]);
    for x in 0..=12 {
        b.pair(finish, (vec![n(x)], vec![unit()]));
    }
    b.build().expect("arithmetic fragment is consistent")
}

/// Pairs of a transformer restricted to single-place signatures, as values.
pub fn pairs_as_values(pairs: &std::collections::BTreeSet<Pair>) -> Vec<(ColorValue, ColorValue)> {
    pairs
        .iter()
        .filter(|(u, v)| u.len() == 1 && v.len() == 1)
        .map(|(u, v)| (u[0].clone(), v[0].clone()))
        .collect()
}

/// A non-free-choice net that is sound but not 2-sound. One branch picks
/// `x` or `y`; the other follows by reading whichever marker is present.
/// With two cases running, both followers can read the same marker and the
/// joins deadlock.
pub fn coupled_choice() -> ColoredWorkflowNet {
    let mut b = crate::net::WorkflowNet::builder();
    let i = b.place("i");
    let o = b.place("o");
    let p = b.place("p");
    let q = b.place("q");
    let px = b.place("px");
    let py = b.place("py");
    let qx = b.place("qx");
    let qy = b.place("qy");
    let split = b.transition("split");
    let pick_x = b.transition("pick_x");
    let pick_y = b.transition("pick_y");
    let follow_x = b.transition("follow_x");
    let follow_y = b.transition("follow_y");
    let join_x = b.transition("join_x");
    let join_y = b.transition("join_y");
    b.arc(i, split).arc(split, p).arc(split, q);
    b.arc(p, pick_x).arc(pick_x, px).arc(p, pick_y).arc(pick_y, py);
    b.arc(q, follow_x).arc(px, follow_x).arc(follow_x, px).arc(follow_x, qx);
    b.arc(q, follow_y).arc(py, follow_y).arc(follow_y, py).arc(follow_y, qy);
    b.arc(px, join_x).arc(qx, join_x).arc(join_x, o);
    b.arc(py, join_y).arc(qy, join_y).arc(join_y, o);
    b.entry(i).exit(o);
    ColoredWorkflowNet::unit("coupled-choice", b.build().expect("unique names"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color::check_left_total;
    use crate::net::{validate, is_free_choice_net};

    #[test]
    fn insurance_variants_are_valid_free_choice_nets() {
        for cnet in [insurance(), insurance_err(), extended_insurance()] {
            assert!(validate(cnet.net()).is_empty(), "{}", cnet.name());
            assert!(is_free_choice_net(cnet.net()), "{}", cnet.name());
        }
        assert_eq!(insurance().net().place_count(), 11);
        assert_eq!(insurance().net().transition_count(), 12);
        assert_eq!(extended_insurance().net().place_count(), 14);
    }

    #[test]
    fn err_completion_is_left_total() {
        let cnet = insurance_err();
        for (t, lambda) in cnet.transformers() {
            assert!(check_left_total(lambda), "{}", cnet.net().name(*t));
        }
        let plain = insurance();
        let no_proc = plain.net().find("no_processing").unwrap();
        assert!(!check_left_total(plain.transformer(no_proc)));
    }

    #[test]
    fn expected_summary_has_twenty_pairs() {
        let s = insurance_expected_summary();
        assert_eq!(s.len(), 20);
        let b = |k| tup(&[sym("B"), int(k)]);
        assert!(s.contains(&(b(3), b(3))));
        assert!(s.contains(&(b(4), b(2))));
    }

    #[test]
    fn coupled_choice_is_one_but_not_two_sound() {
        use crate::oracle::{oracle_is_k_sound, oracle_is_sound};
        let cnet = coupled_choice();
        let net = cnet.net();
        assert!(validate(net).is_empty());
        assert!(!is_free_choice_net(net));
        assert!(oracle_is_sound(net, 1000).soundness.is_sound());
        assert!(oracle_is_k_sound(net, 2, 1000).soundness.is_unsound());
    }

    #[test]
    fn small_loop_shapes() {
        for cnet in [small_loop(), small_loop_colored()] {
            assert!(validate(cnet.net()).is_empty());
            assert_eq!(cnet.net().transition_count(), 5);
        }
    }
}
