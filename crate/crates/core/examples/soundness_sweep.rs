//! Runs one random observation on many random networks and checks every node
//! sign against exact inference. Ends with a small network where a
//! situational sign does not compose along the next arc.
//!
//! ```text
//! cargo run --release --example soundness_sweep -- 5000
//! ```

use std::collections::BTreeMap;

use qpn::engine::run_sequence;
use qpn::gen::random_bayes_net;
use qpn::oracle::{abstract_network, soundness_report, Assignment, BinaryBayesNet, Cpt};
use qpn::{NodeId, Sign};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn counterexample() -> BinaryBayesNet {
    let id = NodeId::new;
    let mut cpts = BTreeMap::new();
    cpts.insert(id("C"), Cpt::prior(0.55).unwrap());
    cpts.insert(id("E"), Cpt::prior(0.06).unwrap());
    cpts.insert(id("F"), Cpt::prior(0.29).unwrap());
    cpts.insert(
        id("A"),
        Cpt::new(vec![id("C"), id("F")], vec![0.13, 0.88, 0.27, 0.78]).unwrap(),
    );
    cpts.insert(
        id("B"),
        Cpt::new(vec![id("A"), id("C")], vec![0.74, 0.44, 0.9, 0.16]).unwrap(),
    );
    cpts.insert(id("D"), Cpt::new(vec![id("F")], vec![0.65, 0.82]).unwrap());
    let nodes = ["A", "B", "C", "D", "E", "F"].map(id).to_vec();
    BinaryBayesNet::new(nodes, cpts).unwrap()
}

fn main() {
    let count: u64 = std::env::args()
        .nth(1)
        .map_or(1000, |s| s.parse().expect("network count"));
    let (mut unsound, mut regular_only_unsound, mut regular_only) = (0, 0, 0);
    for seed in 0..count {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(4..=6);
        let bn = random_bayes_net(&mut rng, n, 3);
        let net = abstract_network(&bn, &Assignment::new()).unwrap();
        let node = bn.nodes().choose(&mut rng).unwrap().clone();
        let value = rng.gen_bool(0.5);
        let reports = run_sequence(&net, &[(node.clone(), Sign::from_bool(value))]).unwrap();
        let report = soundness_report(&bn, &[(node, value)], &reports).unwrap();
        let regular = net.situational_arcs().is_empty();
        regular_only += usize::from(regular);
        if !report.is_sound() {
            unsound += 1;
            regular_only_unsound += usize::from(regular);
        }
    }
    println!("{count} networks: {unsound} unsound");
    println!("{regular_only} without situational arcs: {regular_only_unsound} unsound");
    println!();

    // F -> A is '+' on average over C, but rises with C false and falls with
    // C true; C also feeds B, so B moves against the propagated sign.
    let bn = counterexample();
    let net = abstract_network(&bn, &Assignment::new()).unwrap();
    let observation = (NodeId::new("D"), true);
    let reports = run_sequence(&net, &[(observation.0.clone(), Sign::Plus)]).unwrap();
    println!("counterexample, observe D = true:");
    print!(
        "{}",
        soundness_report(&bn, &[observation], &reports).unwrap()
    );
}
