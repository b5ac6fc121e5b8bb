//! Generates a random network with tables, abstracts it to signs and checks
//! that the document survives a write/read round trip.
//!
//! ```text
//! cargo run --example abstraction -- 7 5
//! ```

use qpn::format::{emit_network, parse_network};
use qpn::gen::{generate, GenOptions};
use qpn::Influence;

fn main() {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(7, |s| s.parse().expect("seed"));
    let nodes: usize = args.next().map_or(5, |s| s.parse().expect("node count"));
    let options = GenOptions {
        force_nonmonotone: true,
        ..GenOptions::new(nodes)
    };
    let doc = generate(seed, options).unwrap_or_else(|e| panic!("{e}"));

    println!("arcs:");
    for (arc, influence) in doc.network.arcs() {
        match influence {
            Influence::Regular(s) => println!("  {arc} {s}"),
            Influence::Situational(sit) => {
                let provokers = doc.network.provokers_of(arc).unwrap();
                let names: Vec<&str> = provokers.iter().map(|n| n.as_str()).collect();
                println!("  {arc} ?({})_{{{}}}", sit.current, names.join(","));
            }
        }
    }
    println!("synergies:");
    for s in doc.network.synergies() {
        let (a, b) = s.pair();
        println!("  {{{a},{b}}} on {} {}", s.child, s.sign);
    }

    let text = emit_network(&doc);
    let back = parse_network(&text).expect("emitted documents parse");
    assert_eq!(emit_network(&back), text);
    println!("round trip: {} bytes, identical", text.len());
}
