//! Seeded random binary networks.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::format::NetworkDocument;
use crate::network::NodeId;
use crate::oracle::{abstract_network, influence_sign, Assignment, BinaryBayesNet, Cpt};
use crate::sign::Sign;

/// Largest network `generate` will produce.
pub const MAX_GENERATED_NODES: usize = 12;

const NAMES: [&str; MAX_GENERATED_NODES] =
    ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L"];

/// Attempts made to find a network with a non-monotonic influence.
const REJECTION_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("at most {MAX_GENERATED_NODES} nodes can be generated, asked for {0}")]
    TooManyNodes(usize),
    #[error("a non-monotonic influence needs at least 3 nodes, asked for {0}")]
    TooFewNodes(usize),
    #[error("no network with a non-monotonic influence found in {REJECTION_LIMIT} attempts")]
    NoNonMonotonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenOptions {
    pub nodes: usize,
    pub max_parents: usize,
    pub force_nonmonotone: bool,
}

impl GenOptions {
    pub fn new(nodes: usize) -> GenOptions {
        GenOptions {
            nodes,
            max_parents: 3,
            force_nonmonotone: false,
        }
    }
}

/// A table entry in `[0.05, 0.95]` with two decimals.
fn probability<R: Rng>(rng: &mut R) -> f64 {
    f64::from(rng.gen_range(5u32..=95)) / 100.0
}

/// A random DAG over the first `nodes` letters in a shuffled topological
/// order, each node taking up to `max_parents` parents among its
/// predecessors, with random tables.
pub fn random_bayes_net<R: Rng>(rng: &mut R, nodes: usize, max_parents: usize) -> BinaryBayesNet {
    assert!(nodes <= MAX_GENERATED_NODES, "too many nodes");
    let mut order: Vec<NodeId> = NAMES[..nodes].iter().map(|n| NodeId::new(*n)).collect();
    order.shuffle(rng);
    let mut cpts = BTreeMap::new();
    for (i, node) in order.iter().enumerate() {
        let k = rng.gen_range(0..=max_parents.min(i));
        let mut parents: Vec<NodeId> = order[..i].choose_multiple(rng, k).cloned().collect();
        parents.sort();
        let rows = (0..1usize << parents.len())
            .map(|_| probability(rng))
            .collect();
        cpts.insert(
            node.clone(),
            Cpt::new(parents, rows).expect("generated rows are valid"),
        );
    }
    let mut names = order;
    names.sort();
    BinaryBayesNet::new(names, cpts).expect("generated graph is acyclic")
}

/// Whether some arc of `bn` carries a non-monotonic influence.
pub fn has_nonmonotonic_arc(bn: &BinaryBayesNet) -> bool {
    bn.arcs()
        .iter()
        .any(|(from, to)| influence_sign(bn, from, to) == Ok(Sign::Ambiguous))
}

/// A random network with `rng`; with `force_nonmonotone`, draws until some
/// influence is non-monotonic.
pub fn generate_with<R: Rng>(rng: &mut R, options: GenOptions) -> Result<BinaryBayesNet, GenError> {
    if options.nodes > MAX_GENERATED_NODES {
        return Err(GenError::TooManyNodes(options.nodes));
    }
    if !options.force_nonmonotone {
        return Ok(random_bayes_net(rng, options.nodes, options.max_parents));
    }
    if options.nodes < 3 || options.max_parents < 2 {
        return Err(GenError::TooFewNodes(options.nodes));
    }
    for _ in 0..REJECTION_LIMIT {
        let bn = random_bayes_net(rng, options.nodes, options.max_parents);
        if has_nonmonotonic_arc(&bn) {
            return Ok(bn);
        }
    }
    Err(GenError::NoNonMonotonic)
}

/// The document for `seed`: the random network's tables together with its
/// prior-state abstraction.
pub fn generate(seed: u64, options: GenOptions) -> Result<NetworkDocument, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bn = generate_with(&mut rng, options)?;
    let network = abstract_network(&bn, &Assignment::new())
        .expect("generated networks are within the oracle's limits");
    Ok(NetworkDocument {
        network,
        bayes: Some(bn),
    })
}
