//! Property tests over seeded random networks.

use std::collections::BTreeSet;

use proptest::prelude::*;
use qpn::engine::{run_sequence, Engine, EngineOptions};
use qpn::format::{emit_network, parse_network};
use qpn::gen::{generate, GenOptions};
use qpn::oracle::{abstract_network, soundness_report, total_probability, Assignment};
use qpn::sign::{sum_all, ALL_SIGNS};
use qpn::{NodeId, QpnNetwork, Sign};

fn sign() -> impl Strategy<Value = Sign> {
    prop::sample::select(ALL_SIGNS.to_vec())
}

/// A generated network and an observation sequence over distinct nodes.
fn scenario() -> impl Strategy<Value = (u64, usize, Vec<(usize, bool)>)> {
    (any::<u64>(), 3usize..=7).prop_flat_map(|(seed, n)| {
        let obs = prop::collection::vec((0..n, any::<bool>()), 1..=3);
        (Just(seed), Just(n), obs)
    })
}

fn observations(net: &QpnNetwork, picks: &[(usize, bool)]) -> Vec<(NodeId, bool)> {
    let nodes: Vec<NodeId> = net.nodes().cloned().collect();
    let mut seen = BTreeSet::new();
    picks
        .iter()
        .filter(|(i, _)| seen.insert(*i))
        .map(|(i, v)| (nodes[*i].clone(), *v))
        .collect()
}

fn signed(obs: &[(NodeId, bool)]) -> Vec<(NodeId, Sign)> {
    obs.iter()
        .map(|(n, v)| (n.clone(), Sign::from_bool(*v)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sum_is_commutative_and_associative(a in sign(), b in sign(), c in sign()) {
        prop_assert_eq!(a.sum(b), b.sum(a));
        prop_assert_eq!(a.sum(b).sum(c), a.sum(b.sum(c)));
        prop_assert_eq!(a.product(b), b.product(a));
        prop_assert_eq!(a.product(b).product(c), a.product(b.product(c)));
    }

    #[test]
    fn sum_all_ignores_order(mut signs in prop::collection::vec(sign(), 0..8)) {
        let forward = sum_all(signs.iter().copied());
        signs.reverse();
        prop_assert_eq!(forward, sum_all(signs.iter().copied()));
        prop_assert_eq!(forward, signs.iter().fold(Sign::Zero, |acc, s| acc.sum(*s)));
    }

    #[test]
    fn documents_round_trip(seed in any::<u64>(), n in 1usize..=8) {
        let doc = generate(seed, GenOptions::new(n)).unwrap();
        let text = emit_network(&doc);
        let back = parse_network(&text).unwrap();
        prop_assert_eq!(emit_network(&back), text);
        let bn = back.bayes.unwrap();
        prop_assert!((total_probability(&bn).unwrap() - 1.0).abs() < 1e-9);
        prop_assert_eq!(abstract_network(&bn, &Assignment::new()).unwrap(), back.network);
    }

    #[test]
    fn inference_is_deterministic((seed, n, picks) in scenario()) {
        let doc = generate(seed, GenOptions::new(n)).unwrap();
        let obs = signed(&observations(&doc.network, &picks));
        let a = run_sequence(&doc.network, &obs).unwrap();
        let b = run_sequence(&doc.network, &obs).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert_eq!(&x.node_signs, &y.node_signs);
            prop_assert_eq!(&x.trace, &y.trace);
        }
    }

    #[test]
    fn restarts_are_bounded_and_updates_one_shot((seed, n, picks) in scenario(), reduction in any::<bool>()) {
        let doc = generate(seed, GenOptions::new(n)).unwrap();
        let obs = signed(&observations(&doc.network, &picks));
        let reports = Engine::new(EngineOptions { reduction }).run_sequence(&doc.network, &obs).unwrap();
        let mut updated = BTreeSet::new();
        for r in &reports {
            prop_assert!(r.restart_count <= r.situational_arcs);
            for (arc, before, after) in r.updates() {
                prop_assert!(updated.insert(arc.clone()), "{} updated twice", arc);
                prop_assert_ne!(before, after);
            }
        }
    }

    #[test]
    fn observed_node_keeps_its_evidence_sign((seed, n, picks) in scenario()) {
        let doc = generate(seed, GenOptions::new(n)).unwrap();
        let obs = signed(&observations(&doc.network, &picks));
        let reports = run_sequence(&doc.network, &obs).unwrap();
        for (i, (r, (node, s))) in reports.iter().zip(&obs).enumerate() {
            prop_assert_eq!(r.node_signs[node], *s);
            for (earlier, _) in &obs[..i] {
                prop_assert_eq!(r.node_signs[earlier], Sign::Zero);
            }
        }
    }

    #[test]
    fn regular_networks_are_sound_for_one_observation(seed in any::<u64>(), n in 3usize..=6, pick in any::<prop::sample::Index>(), value in any::<bool>()) {
        let doc = generate(seed, GenOptions::new(n)).unwrap();
        prop_assume!(doc.network.situational_arcs().is_empty());
        let nodes: Vec<NodeId> = doc.network.nodes().cloned().collect();
        let node = pick.get(&nodes).clone();
        let reports = run_sequence(&doc.network, &[(node.clone(), Sign::from_bool(value))]).unwrap();
        let report = soundness_report(doc.bayes.as_ref().unwrap(), &[(node, value)], &reports).unwrap();
        prop_assert!(report.is_sound(), "{}", report);
    }
}
