//! Exact ground truth for the qualitative engine.
//!
//! Small binary Bayesian networks are solved by full enumeration of the joint
//! distribution. On top of that sit the definition-level sign extractions
//! (influences, additive synergies, situational signs, provoker sets), the
//! abstraction of a numeric network into a [`QpnNetwork`], and a checker that
//! compares propagated node signs with exact posterior movements.

mod bayes;
mod soundness;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::format::{self, FormatError};
use crate::network::{AdditiveSynergy, Arc, NodeId, QpnNetwork, Situational};
use crate::sign::Sign;

pub use bayes::{
    Assignment, BinaryBayesNet, Cpt, JointTable, ParentConfiguration, MAX_ENUMERATION_NODES,
};
pub use soundness::{soundness_report, SoundnessReport, Violation};

/// Differences with absolute value at most this are read as zero.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("invalid table: {0}")]
    InvalidCpt(String),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("network has {0} nodes; enumeration is capped at {MAX_ENUMERATION_NODES}")]
    TooLarge(usize),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("no arc {0}")]
    MissingArc(Arc),
    #[error("{a} and {b} are not both parents of {child}")]
    NotCoParents { a: NodeId, b: NodeId, child: NodeId },
    #[error("assignment does not give a value for {0}")]
    IncompleteAssignment(NodeId),
    #[error("conditioning evidence has probability zero")]
    ZeroProbability,
    #[error("influence {0} is monotonic")]
    NotSituational(Arc),
    #[error("mismatched inputs: {0}")]
    Mismatch(String),
}

/// Sign holding for every value under the weak reading: `0` if all values are
/// zero, `+` if none is negative, `-` if none is positive, `?` otherwise.
pub fn sign_of_values(values: &[f64]) -> Sign {
    let positive = values.iter().any(|v| *v > TOLERANCE);
    let negative = values.iter().any(|v| *v < -TOLERANCE);
    match (positive, negative) {
        (false, false) => Sign::Zero,
        (true, false) => Sign::Plus,
        (false, true) => Sign::Minus,
        (true, true) => Sign::Ambiguous,
    }
}

fn differences(bn: &BinaryBayesNet, from: &NodeId, to: &NodeId) -> Result<Vec<f64>, OracleError> {
    bn.cpt(to)
        .and_then(|cpt| cpt.differences(from))
        .ok_or_else(|| OracleError::MissingArc(Arc::new(from.clone(), to.clone())))
}

/// Sign of `Pr(b | a x) - Pr(b | ¬a x)` over all configurations `x` of the
/// other parents of `to`.
pub fn influence_sign(
    bn: &BinaryBayesNet,
    from: &NodeId,
    to: &NodeId,
) -> Result<Sign, OracleError> {
    Ok(sign_of_values(&differences(bn, from, to)?))
}

/// Sign of `Pr(c | a b x) + Pr(c | ¬a ¬b x) - Pr(c | ¬a b x) - Pr(c | a ¬b x)`
/// over all configurations `x` of the remaining parents of `child`.
pub fn synergy_sign(
    bn: &BinaryBayesNet,
    a: &NodeId,
    b: &NodeId,
    child: &NodeId,
) -> Result<Sign, OracleError> {
    bn.cpt(child)
        .and_then(|cpt| cpt.interactions(a, b))
        .map(|v| sign_of_values(&v))
        .ok_or_else(|| OracleError::NotCoParents {
            a: a.clone(),
            b: b.clone(),
            child: child.clone(),
        })
}

/// `Σ_x Pr(x | state) · (Pr(b | a x) - Pr(b | ¬a x))` over the configurations
/// `x` of the other parents of `to`. Linear in the co-parent probabilities,
/// with the additive synergies as gradients. It coincides with
/// [`conditional_difference`] whenever `from` is independent of its co-parents
/// in the state.
pub fn averaged_difference(
    bn: &BinaryBayesNet,
    from: &NodeId,
    to: &NodeId,
    state: &Assignment,
) -> Result<f64, OracleError> {
    let cpt = bn
        .cpt(to)
        .filter(|c| c.parents().contains(from))
        .ok_or_else(|| OracleError::MissingArc(Arc::new(from.clone(), to.clone())))?;
    let others: Vec<NodeId> = cpt
        .parents()
        .iter()
        .filter(|p| *p != from)
        .cloned()
        .collect();
    let mut total = 0.0;
    for (x, weight) in bn.joint_table()?.distribution(&others, state)? {
        let mut with = x.clone();
        with.insert(from.clone(), true);
        let hi = cpt.prob_true(&with).expect("all parents assigned");
        with.insert(from.clone(), false);
        let lo = cpt.prob_true(&with).expect("all parents assigned");
        total += weight * (hi - lo);
    }
    Ok(total)
}

/// Current sign of a non-monotonic influence in the given state: the sign of
/// [`conditional_difference`].
pub fn situational_sign(
    bn: &BinaryBayesNet,
    from: &NodeId,
    to: &NodeId,
    state: &Assignment,
) -> Result<Sign, OracleError> {
    if influence_sign(bn, from, to)? != Sign::Ambiguous {
        return Err(OracleError::NotSituational(Arc::new(
            from.clone(),
            to.clone(),
        )));
    }
    let d = conditional_difference(bn, from, to, state)?;
    Ok(Sign::of_difference(d, TOLERANCE))
}

/// `Pr(b | a, state) - Pr(b | ¬a, state)` by enumeration.
pub fn conditional_difference(
    bn: &BinaryBayesNet,
    from: &NodeId,
    to: &NodeId,
    state: &Assignment,
) -> Result<f64, OracleError> {
    conditional_difference_in(&bn.joint_table()?, from, to, state)
}

pub(crate) fn conditional_difference_in(
    joint: &JointTable,
    from: &NodeId,
    to: &NodeId,
    state: &Assignment,
) -> Result<f64, OracleError> {
    let mut with = state.clone();
    with.insert(from.clone(), true);
    let hi = joint.query((to, true), &with)?;
    with.insert(from.clone(), false);
    let lo = joint.query((to, true), &with)?;
    Ok(hi - lo)
}

/// Per-configuration differences `Pr(b | a p y) - Pr(b | ¬a p y)` grouped by
/// the configuration `p` of `fixed`, each group ranging over the remaining
/// co-parents `y`.
pub fn grouped_differences(
    bn: &BinaryBayesNet,
    from: &NodeId,
    to: &NodeId,
    fixed: &BTreeSet<NodeId>,
) -> Result<BTreeMap<ParentConfiguration, Vec<f64>>, OracleError> {
    let cpt = bn
        .cpt(to)
        .filter(|c| c.parents().contains(from))
        .ok_or_else(|| OracleError::MissingArc(Arc::new(from.clone(), to.clone())))?;
    let mut groups: BTreeMap<ParentConfiguration, Vec<f64>> = BTreeMap::new();
    for (config, p_true) in cpt.entries() {
        if !config.get(from).unwrap_or(false) {
            continue;
        }
        let mut low = config.0.clone();
        low.insert(from.clone(), false);
        let p_false = cpt.prob_true(&low).expect("all parents assigned");
        let key = ParentConfiguration(
            config
                .0
                .iter()
                .filter(|(n, _)| fixed.contains(*n))
                .map(|(n, v)| (n.clone(), *v))
                .collect(),
        );
        groups.entry(key).or_default().push(p_true - p_false);
    }
    Ok(groups)
}

/// Provoker set of a non-monotonic influence: the first subset of the
/// co-parents, by increasing size and then lexicographically, that meets both
/// conditions below. The full co-parent set always meets the second; it is
/// returned when no subset meets both.
///
/// * every member `P_i` has a configuration `z` of the other members under
///   which the difference is `>= 0` for all residual `y` with `P_i` at one
///   value and `<= 0` for all `y` with `P_i` at the other;
/// * every configuration of the set makes the difference single-signed over
///   the residual co-parents.
pub fn provoker_set(
    bn: &BinaryBayesNet,
    from: &NodeId,
    to: &NodeId,
) -> Result<BTreeSet<NodeId>, OracleError> {
    if influence_sign(bn, from, to)? != Sign::Ambiguous {
        return Err(OracleError::NotSituational(Arc::new(
            from.clone(),
            to.clone(),
        )));
    }
    let co_parents: Vec<NodeId> = bn
        .parents(to)
        .iter()
        .filter(|p| *p != from)
        .cloned()
        .collect();
    let n = co_parents.len();
    let mut subsets: Vec<usize> = (1..1usize << n).collect();
    subsets.sort_by_key(|m| {
        let members: Vec<&NodeId> = (0..n)
            .filter(|k| m & (1 << k) != 0)
            .map(|k| &co_parents[k])
            .collect();
        (m.count_ones(), members)
    });
    for mask in subsets {
        let set: BTreeSet<NodeId> = (0..n)
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| co_parents[k].clone())
            .collect();
        if is_provoker_set(bn, from, to, &set)? {
            return Ok(set);
        }
    }
    Ok(co_parents.into_iter().collect())
}

/// Whether `set` meets both provoker-set conditions for `from -> to`.
pub fn is_provoker_set(
    bn: &BinaryBayesNet,
    from: &NodeId,
    to: &NodeId,
    set: &BTreeSet<NodeId>,
) -> Result<bool, OracleError> {
    let groups = grouped_differences(bn, from, to, set)?;
    if groups
        .values()
        .any(|g| sign_of_values(g) == Sign::Ambiguous)
    {
        return Ok(false);
    }
    let group_sign =
        |config: &Assignment| sign_of_values(&groups[&ParentConfiguration(config.clone())]);
    for member in set {
        let witnessed = groups.keys().any(|p| {
            if p.get(member) != Some(true) {
                return false;
            }
            let on = p.0.clone();
            let mut off = on.clone();
            off.insert(member.clone(), false);
            let (s_on, s_off) = (group_sign(&on), group_sign(&off));
            let nonneg = |s: Sign| matches!(s, Sign::Plus | Sign::Zero);
            let nonpos = |s: Sign| matches!(s, Sign::Minus | Sign::Zero);
            (nonneg(s_on) && nonpos(s_off)) || (nonpos(s_on) && nonneg(s_off))
        });
        if !witnessed {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Qualitative abstraction of `bn` in the given state: influence signs for
/// monotonic arcs, situational annotations (current sign in `state`, provoker
/// set) for the others, and an additive synergy for every pair of parents of
/// every node.
pub fn abstract_network(
    bn: &BinaryBayesNet,
    state: &Assignment,
) -> Result<QpnNetwork, OracleError> {
    let joint = bn.joint_table()?;
    let mut net = QpnNetwork::new();
    for n in bn.nodes() {
        net.add_node(n.clone());
    }
    for (from, to) in bn.arcs() {
        let sign = influence_sign(bn, &from, &to)?;
        if sign == Sign::Ambiguous {
            let d = conditional_difference_in(&joint, &from, &to, state)?;
            let provokers = provoker_set(bn, &from, &to)?;
            let current = Sign::of_difference(d, TOLERANCE);
            net.add_arc(from, to, Situational::with_provokers(current, provokers));
        } else {
            net.add_arc(from, to, sign);
        }
    }
    for child in bn.nodes() {
        let parents = bn.parents(child);
        for (i, a) in parents.iter().enumerate() {
            for b in &parents[i + 1..] {
                let sign = synergy_sign(bn, a, b, child)?;
                net.add_synergy(AdditiveSynergy::new(
                    a.clone(),
                    b.clone(),
                    child.clone(),
                    sign,
                ));
            }
        }
    }
    Ok(net)
}

fn load_fixture(text: &str) -> BinaryBayesNet {
    let doc =
        format::parse_network(text).unwrap_or_else(|e: FormatError| panic!("bundled fixture: {e}"));
    doc.bayes.expect("bundled fixture carries tables")
}

/// The three-node training/fitness network `T -> W <- F` with `Pr(f) = 0.4`,
/// `Pr(w | t) = 0.39`, `Pr(w | ¬t) = 0.51` and the influence of `T` on `W`
/// changing sign at `Pr(f) = 0.67`. The tables are a reconstruction from those
/// constraints with `Pr(w | ¬t ¬f) = 0.45` chosen freely; see
/// `examples/derive_training_fitness.rs`.
pub fn example_network() -> BinaryBayesNet {
    load_fixture(include_str!("../../fixtures/training_fitness.json"))
}

/// A numeric instance of the four-node provoker example
/// (`D -> A`, `D -> C`, `A -> B`, `C -> B`).
pub fn provoker_example_bayes_net() -> BinaryBayesNet {
    load_fixture(include_str!("../../fixtures/provoker_example.json"))
}

/// `Σ_x Pr(x)` over all full assignments; `1` up to rounding.
pub fn total_probability(bn: &BinaryBayesNet) -> Result<f64, OracleError> {
    Ok(bn.joint_table()?.total())
}
