// Importing a place/transition net from PNML and checking it.

use std::error::Error;

use cwfnet::formats::import_pnml;
use cwfnet::reduction::reduce;

const PNML: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<pnml>
  <net id="n1" type="http://www.pnml.org/version-2009/grammar/ptnet">
    <page id="pg">
      <place id="p0"><name><text>start</text></name></place>
      <place id="p1"><name><text>waiting</text></name></place>
      <place id="p2"><name><text>end</text></name></place>
      <transition id="t0"><name><text>receive order</text></name></transition>
      <transition id="t1"><name><text>ship</text></name></transition>
      <transition id="t2"><name><text>cancel</text></name></transition>
      <arc id="a0" source="p0" target="t0"/>
      <arc id="a1" source="t0" target="p1"/>
      <arc id="a2" source="p1" target="t1"/>
      <arc id="a3" source="p1" target="t2"/>
      <arc id="a4" source="t1" target="p2"/>
      <arc id="a5" source="t2" target="p2"/>
    </page>
  </net>
</pnml>"#;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let cnet = import_pnml(PNML, "orders")?;
    let net = cnet.net();
    println!("entry {}, exit {}", net.name(net.entry()), net.name(net.exit()));
    let names: Vec<&str> = net.transitions().map(|t| net.name(t)).collect();
    println!("transitions: {}", names.join(", "));
    let r = reduce(&cnet);
    println!("verdict: {} after {} rules", r.verdict.label(), r.trace.len());
    assert!(r.verdict.is_reduced());

    let two_sinks = PNML.replace(
        r#"<arc id="a5" source="t2" target="p2"/>"#,
        r#"<place id="p3"/><arc id="a5" source="t2" target="p3"/>"#,
    );
    let e = import_pnml(&two_sinks, "broken").err().ok_or("two sinks accepted")?;
    println!("rejected: {e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
