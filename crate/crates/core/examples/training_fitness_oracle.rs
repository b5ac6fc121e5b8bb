//! Exact queries on the training/fitness network: the influence of training
//! (T) on winning (W) flips with the probability of being fit (F).
//!
//! ```text
//! cargo run --example training_fitness_oracle
//! ```

use std::collections::BTreeMap;

use qpn::oracle::{
    averaged_difference, conditional_difference, example_network, influence_sign, provoker_set,
    situational_sign, synergy_sign, Assignment, BinaryBayesNet, Cpt,
};
use qpn::NodeId;

fn with_fitness(bn: &BinaryBayesNet, p: f64) -> BinaryBayesNet {
    let mut cpts: BTreeMap<NodeId, Cpt> = bn
        .nodes()
        .iter()
        .map(|n| (n.clone(), bn.cpt(n).unwrap().clone()))
        .collect();
    cpts.insert(NodeId::new("F"), Cpt::prior(p).unwrap());
    BinaryBayesNet::new(bn.nodes().to_vec(), cpts).unwrap()
}

fn main() {
    let bn = example_network();
    let (t, f, w) = (NodeId::new("T"), NodeId::new("F"), NodeId::new("W"));
    let none = Assignment::new();
    let given_t = |v: bool| {
        bn.query((&w, true), &[(t.clone(), v)].into_iter().collect())
            .unwrap()
    };

    println!("Pr(w | t)  = {:.4}", given_t(true));
    println!("Pr(w | ~t) = {:.4}", given_t(false));
    println!(
        "difference = {:+.4}",
        conditional_difference(&bn, &t, &w, &none).unwrap()
    );
    println!("F -> W        {}", influence_sign(&bn, &f, &w).unwrap());
    println!("T -> W        {}", influence_sign(&bn, &t, &w).unwrap());
    println!(
        "  now         {}",
        situational_sign(&bn, &t, &w, &none).unwrap()
    );
    let provokers: Vec<String> = provoker_set(&bn, &t, &w)
        .unwrap()
        .iter()
        .map(ToString::to_string)
        .collect();
    println!("  provokers   {{{}}}", provokers.join(","));
    println!("{{T,F}} on W   {}", synergy_sign(&bn, &t, &f, &w).unwrap());
    println!();

    // the averaged difference is a line in Pr(f)
    println!("Pr(f)  difference  sign");
    for step in 0..=10 {
        let p = f64::from(step) / 10.0;
        let d = averaged_difference(&with_fitness(&bn, p), &t, &w, &none).unwrap();
        println!(
            "{p:>5.1}  {d:>+10.4}  {}",
            qpn::Sign::of_difference(d, 1e-9)
        );
    }
    let d0 = averaged_difference(&with_fitness(&bn, 0.0), &t, &w, &none).unwrap();
    let d1 = averaged_difference(&with_fitness(&bn, 1.0), &t, &w, &none).unwrap();
    println!("zero crossing at Pr(f) = {:.4}", -d0 / (d1 - d0));
}
