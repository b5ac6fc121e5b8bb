//! The four-node network with a situational arc A -> B whose sign depends on
//! C. Runs three observation sequences and prints the full propagation trace.
//!
//! ```text
//!      D
//!    -/ \-
//!    A   C
//!  ?(+)\ /+
//!      B
//! ```
//!
//! ```text
//! cargo run --example situational_walkthrough
//! ```

use qpn::engine::run_sequence;
use qpn::network::provoker_example_network;
use qpn::{NodeId, Sign};

fn run(title: &str, observations: &[(&str, Sign)]) {
    let net = provoker_example_network();
    let obs: Vec<(NodeId, Sign)> = observations
        .iter()
        .map(|(n, s)| (NodeId::new(*n), *s))
        .collect();
    let reports = run_sequence(&net, &obs).expect("valid observations");
    println!("## {title}");
    for report in &reports {
        let (node, sign) = &report.observation;
        println!("observe {node} = {sign}");
        for event in &report.trace {
            println!("  {event}");
        }
        let signs: Vec<String> = report
            .node_signs
            .iter()
            .map(|(n, s)| format!("{n}:{s}"))
            .collect();
        println!(
            "  signs {}  restarts {}",
            signs.join(" "),
            report.restart_count
        );
    }
    println!();
}

fn main() {
    // A and C both rise, and C keeps A -> B positive
    run("D false", &[("D", Sign::Minus)]);
    // C falls, which turns A -> B ambiguous and forces one restart
    run("D true", &[("D", Sign::Plus)]);
    // C observed false: A -> B is fixed to - before propagation starts
    run(
        "D true then C false",
        &[("D", Sign::Plus), ("C", Sign::Minus)],
    );
}
