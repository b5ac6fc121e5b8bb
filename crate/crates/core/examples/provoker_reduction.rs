//! Reduction of a situational arc once its provokers are observed, compared
//! with the exact per-configuration differences.
//!
//! ```text
//! cargo run --example provoker_reduction
//! ```

use std::collections::BTreeMap;

use qpn::engine::{try_reduce, Engine, EngineOptions};
use qpn::oracle::{abstract_network, grouped_differences, provoker_example_bayes_net, Assignment};
use qpn::{Arc, NodeId, Sign};

fn main() {
    let bn = provoker_example_bayes_net();
    let net = abstract_network(&bn, &Assignment::new()).unwrap();
    let arc = Arc::new("A", "B");
    let provokers = net.provokers_of(&arc).unwrap();

    let groups = grouped_differences(&bn, &arc.from, &arc.to, &provokers).unwrap();
    for (config, differences) in &groups {
        let observed: BTreeMap<NodeId, Sign> = config
            .0
            .iter()
            .map(|(n, v)| (n.clone(), Sign::from_bool(*v)))
            .collect();
        let reduced = try_reduce(&net, &arc, &observed).unwrap().unwrap();
        println!("{config}: differences {differences:?}, reduced to {reduced}");
    }
    println!();

    // with and without reduction on the same sequence
    let obs: Vec<(NodeId, Sign)> = [("D", Sign::Plus), ("C", Sign::Minus), ("B", Sign::Plus)]
        .iter()
        .map(|(n, s)| (NodeId::new(*n), *s))
        .collect();
    for reduction in [true, false] {
        let reports = Engine::new(EngineOptions { reduction })
            .run_sequence(&net, &obs)
            .unwrap();
        let last = reports.last().unwrap();
        println!(
            "reduction {reduction:<5}: after B observed, A is {}",
            last.sign("A")
        );
    }
}
