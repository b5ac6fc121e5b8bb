//! Acceptance suite. Prints one `[PASS]`/`[FAIL]` line per criterion and exits
//! non-zero if any fails. Run with `cargo test -p qpn --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use qpn::engine::{run_sequence, try_reduce, Engine, EngineOptions, StepReport, TraceEvent};
use qpn::gen::{generate_with, random_bayes_net, GenOptions};
use qpn::network::provoker_example_network;
use qpn::oracle::{
    abstract_network, averaged_difference, conditional_difference, example_network,
    grouped_differences, influence_sign, provoker_set, sign_of_values, situational_sign,
    soundness_report, synergy_sign, Assignment, BinaryBayesNet, ParentConfiguration, TOLERANCE,
};
use qpn::sign::{product, sum};
use qpn::{Arc, Influence, NodeId, QpnNetwork, Sign};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use Sign::{Ambiguous as Q, Minus as M, Plus as P, Zero as Z};

fn id(s: &str) -> NodeId {
    NodeId::new(s)
}

/// Restart and one-shot bookkeeping shared by every suite.
#[derive(Default)]
struct OneShot {
    steps: usize,
    sequences: usize,
    failures: Vec<String>,
}

impl OneShot {
    fn record(&mut self, context: &str, reports: &[StepReport]) {
        self.sequences += 1;
        let mut updated = BTreeSet::new();
        for (i, r) in reports.iter().enumerate() {
            self.steps += 1;
            if r.restart_count > r.situational_arcs {
                self.failures.push(format!(
                    "{context} step {}: {} restarts with {} situational arcs",
                    i + 1,
                    r.restart_count,
                    r.situational_arcs
                ));
            }
            for (arc, _, _) in r.updates() {
                if !updated.insert(arc.clone()) {
                    self.failures.push(format!(
                        "{context} step {}: {arc} updated a second time",
                        i + 1
                    ));
                }
            }
        }
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn verdict(failures: &[String], detail: String) -> Outcome {
    let mut detail = detail;
    for f in failures.iter().take(5) {
        detail.push_str("\n       ");
        detail.push_str(f);
    }
    if failures.len() > 5 {
        detail.push_str(&format!("\n       ... {} more", failures.len() - 5));
    }
    Outcome {
        passed: failures.is_empty(),
        detail,
    }
}

fn observe(
    net: &QpnNetwork,
    obs: &[(&str, bool)],
    shots: &mut OneShot,
    context: &str,
) -> Vec<StepReport> {
    let signed: Vec<(NodeId, Sign)> = obs
        .iter()
        .map(|(n, v)| (id(n), Sign::from_bool(*v)))
        .collect();
    let reports = run_sequence(net, &signed).expect("fixture observations are valid");
    shots.record(context, &reports);
    reports
}

fn expect_signs(report: &StepReport, expected: &[(&str, Sign)], failures: &mut Vec<String>) {
    for (node, sign) in expected {
        let got = report.sign(node);
        if got != *sign {
            failures.push(format!("{node}: expected {sign}, got {got}"));
        }
    }
}

// 1. Operator tables, exhaustively and literally.
fn operators() -> Outcome {
    let start = Instant::now();
    let order = [P, M, Z, Q];
    let product_rows = [[P, M, Z, Q], [M, P, Z, Q], [Z, Z, Z, Z], [Q, Q, Z, Q]];
    let sum_rows = [[P, Q, P, Q], [Q, M, M, Q], [P, M, Z, Q], [Q, Q, Q, Q]];
    let mut failures = Vec::new();
    for (i, a) in order.iter().enumerate() {
        for (j, b) in order.iter().enumerate() {
            if product(*a, *b) != product_rows[i][j] || a.product(*b) != product_rows[i][j] {
                failures.push(format!("{a} (x) {b} should be {}", product_rows[i][j]));
            }
            if sum(*a, *b) != sum_rows[i][j] || a.sum(*b) != sum_rows[i][j] {
                failures.push(format!("{a} (+) {b} should be {}", sum_rows[i][j]));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed >= Duration::from_secs(1) {
        failures.push(format!("took {elapsed:?}"));
    }
    verdict(&failures, format!("32 entries checked in {elapsed:?}"))
}

// 2. D = false on the provoker example.
fn scenario_one(shots: &mut OneShot) -> Outcome {
    let net = provoker_example_network();
    let r = &observe(&net, &[("D", false)], shots, "scenario 1")[0];
    let mut failures = Vec::new();
    expect_signs(r, &[("A", P), ("B", P), ("C", P), ("D", M)], &mut failures);
    if r.restart_count != 0 {
        failures.push(format!("{} restarts", r.restart_count));
    }
    let keep = r
        .trace
        .iter()
        .any(|e| matches!(e, TraceEvent::VerifyKeep { arc, .. } if *arc == Arc::new("A", "B")));
    if !keep {
        failures.push("no verify-keep event for A->B".into());
    }
    verdict(
        &failures,
        format!(
            "signs A:{} B:{} C:{} D:{}, {} restarts",
            r.sign("A"),
            r.sign("B"),
            r.sign("C"),
            r.sign("D"),
            r.restart_count
        ),
    )
}

// 3. D = true: the situational sign is revised and propagation restarts once.
fn scenario_two(shots: &mut OneShot) -> Outcome {
    let net = provoker_example_network();
    let r = &observe(&net, &[("D", true)], shots, "scenario 2")[0];
    let mut failures = Vec::new();
    expect_signs(r, &[("A", M), ("B", Q), ("C", M), ("D", P)], &mut failures);
    if r.restart_count != 1 {
        failures.push(format!("{} restarts, expected 1", r.restart_count));
    }
    match r.network.influence(&Arc::new("A", "B")) {
        Ok(Influence::Situational(sit))
            if sit.current == Q
                && sit.reduced.is_none()
                && sit.provokers == Some([id("C")].into_iter().collect()) => {}
        other => failures.push(format!("A->B is {other:?}, expected ?(?)_{{C}}")),
    }
    verdict(
        &failures,
        format!(
            "signs A:{} B:{} C:{} D:{}, {} restart",
            r.sign("A"),
            r.sign("B"),
            r.sign("C"),
            r.sign("D"),
            r.restart_count
        ),
    )
}

// 4. C = false after D = true reduces A->B to '-' before propagating.
fn scenario_three(shots: &mut OneShot) -> Outcome {
    let net = provoker_example_network();
    let reports = observe(&net, &[("D", true), ("C", false)], shots, "scenario 3");
    let r = &reports[1];
    let mut failures = Vec::new();
    match r.trace.first() {
        Some(TraceEvent::Reduce { arc, sign }) if *arc == Arc::new("A", "B") && *sign == M => {}
        other => failures.push(format!("first event {other:?}, expected REDUCE A->B -")),
    }
    if r.network
        .influence(&Arc::new("A", "B"))
        .map(|i| i.link_sign())
        != Ok(M)
    {
        failures.push("A->B does not carry '-'".into());
    }
    let left = r.network.situational_arcs();
    if !left.is_empty() {
        failures.push(format!("situational arcs remain: {left:?}"));
    }
    verdict(
        &failures,
        format!(
            "reduced A->B to {}",
            r.network
                .influence(&Arc::new("A", "B"))
                .map(|i| i.link_sign())
                .unwrap_or(Q)
        ),
    )
}

// 5. Numeric anchors of the training/fitness network.
fn anchors() -> Outcome {
    let bn = example_network();
    let (t, f, w) = (id("T"), id("F"), id("W"));
    let none = Assignment::new();
    let given = |v: bool| {
        bn.query((&w, true), &[(t.clone(), v)].into_iter().collect())
            .unwrap()
    };
    let mut failures = Vec::new();
    let mut close = |name: &str, got: f64, want: f64, tol: f64| {
        if (got - want).abs() > tol {
            failures.push(format!("{name} = {got}, expected {want} +/- {tol}"));
        }
    };
    close("Pr(w|t)", given(true), 0.39, 1e-9);
    close("Pr(w|~t)", given(false), 0.51, 1e-9);
    close(
        "prior difference",
        conditional_difference(&bn, &t, &w, &none).unwrap(),
        -0.12,
        1e-9,
    );
    // the difference is linear in Pr(f); find its zero from two points
    let at = |pf: f64| {
        let mut shifted = BTreeMap::new();
        for n in bn.nodes() {
            shifted.insert(n.clone(), bn.cpt(n).unwrap().clone());
        }
        shifted.insert(f.clone(), qpn::oracle::Cpt::prior(pf).unwrap());
        let moved = BinaryBayesNet::new(bn.nodes().to_vec(), shifted).unwrap();
        averaged_difference(&moved, &t, &w, &none).unwrap()
    };
    let (d0, d1) = (at(0.0), at(1.0));
    let crossing = -d0 / (d1 - d0);
    close("zero crossing", crossing, 0.67, 0.01);
    let checks = [
        (
            "situational_sign(T->W)",
            situational_sign(&bn, &t, &w, &none).ok(),
            M,
        ),
        ("influence_sign(F->W)", influence_sign(&bn, &f, &w).ok(), P),
        (
            "synergy_sign({T,F},W)",
            synergy_sign(&bn, &t, &f, &w).ok(),
            P,
        ),
    ];
    for (name, got, want) in checks {
        if got != Some(want) {
            failures.push(format!("{name} = {got:?}, expected {want}"));
        }
    }
    let provokers = provoker_set(&bn, &t, &w).unwrap();
    if provokers != [f.clone()].into_iter().collect() {
        failures.push(format!("provoker_set(T->W) = {provokers:?}"));
    }
    verdict(&failures, format!("crossing at Pr(f) = {crossing:.4}"))
}

fn random_network(seed: u64) -> (BinaryBayesNet, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=6);
    (random_bayes_net(&mut rng, n, 3), rng)
}

fn nonmonotone_network(seed: u64) -> (BinaryBayesNet, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(4..=6);
    let options = GenOptions {
        force_nonmonotone: true,
        ..GenOptions::new(n)
    };
    (
        generate_with(&mut rng, options).expect("4-6 nodes always generate"),
        rng,
    )
}

const SOUNDNESS_NETWORKS: u64 = 1000;

// 6. One random observation on random networks, checked against the oracle.
fn soundness(shots: &mut OneShot) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut violations = 0;
    let mut with_situational = 0;
    for seed in 0..SOUNDNESS_NETWORKS {
        let (bn, mut rng) = random_network(seed);
        let net = abstract_network(&bn, &Assignment::new()).unwrap();
        let node = bn.nodes().choose(&mut rng).unwrap().clone();
        let value = rng.gen_bool(0.5);
        let reports = run_sequence(&net, &[(node.clone(), Sign::from_bool(value))]).unwrap();
        shots.record(&format!("soundness seed {seed}"), &reports);
        let report = soundness_report(&bn, &[(node.clone(), value)], &reports).unwrap();
        if !report.is_sound() {
            violations += report.violations.len();
            if !net.situational_arcs().is_empty() {
                with_situational += 1;
            }
            failures.push(format!(
                "seed {seed} {node}={value}: {}",
                report
                    .violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            ));
        }
    }
    let elapsed = start.elapsed();
    let unsound = failures.len();
    if elapsed >= Duration::from_secs(60) {
        failures.push(format!("took {elapsed:?}"));
    }
    verdict(
        &failures,
        format!(
            "{SOUNDNESS_NETWORKS} networks in {elapsed:.1?}: {unsound} unsound ({with_situational} with situational arcs), {violations} node violations"
        ),
    )
}

const VERIFY_NETWORKS: u64 = 500;

// 7. Re-verification after a co-parent moves, and symmetry of the
// conditional differences.
fn verification(shots: &mut OneShot) -> Outcome {
    let mut failures = Vec::new();
    let (mut verified, mut informative, mut symmetric) = (0, 0, 0);
    let e = id("EV");
    for seed in 0..VERIFY_NETWORKS {
        let (base, mut rng) = nonmonotone_network(seed);
        let base_net = abstract_network(&base, &Assignment::new()).unwrap();
        let arcs = base_net.situational_arcs();
        let arc = arcs.choose(&mut rng).unwrap().clone();
        let co_parents: Vec<NodeId> = base_net.co_parents(&arc).unwrap().into_iter().collect();
        let target = co_parents.choose(&mut rng).unwrap().clone();
        let hi = f64::from(rng.gen_range(60u32..=95)) / 100.0;
        let lo = f64::from(rng.gen_range(5u32..=40)) / 100.0;
        let bn = base.with_evidence_parent(&e, &target, 0.5, hi, lo).unwrap();
        let net = abstract_network(&bn, &Assignment::new()).unwrap();
        let value = rng.gen_bool(0.5);
        let state: Assignment = [(e.clone(), value)].into_iter().collect();
        let reports = run_sequence(&net, &[(e.clone(), Sign::from_bool(value))]).unwrap();
        shots.record(&format!("verification seed {seed}"), &reports);

        for event in &reports[0].trace {
            let (arc, output) = match event {
                TraceEvent::VerifyKeep { arc, current } => (arc, *current),
                TraceEvent::VerifyUpdate { arc, after, .. } => (arc, *after),
                _ => continue,
            };
            verified += 1;
            if output == Q {
                continue;
            }
            informative += 1;
            let truth = situational_sign(&bn, &arc.from, &arc.to, &state).unwrap();
            if output != truth {
                failures.push(format!(
                    "seed {seed} {arc}: verified {output}, oracle {truth} given EV={value}"
                ));
            }
        }

        for (from, to) in bn.arcs() {
            for s in [Assignment::new(), state.clone()] {
                if s.contains_key(&from) || s.contains_key(&to) {
                    continue;
                }
                let forward = conditional_difference(&bn, &from, &to, &s).unwrap();
                let backward = conditional_difference(&bn, &to, &from, &s).unwrap();
                symmetric += 1;
                if Sign::of_difference(forward, TOLERANCE)
                    != Sign::of_difference(backward, TOLERANCE)
                {
                    failures.push(format!(
                        "seed {seed} {from}->{to}: {forward} vs reverse {backward}"
                    ));
                }
            }
        }
    }
    verdict(
        &failures,
        format!("{VERIFY_NETWORKS} networks: {verified} verifications ({informative} signed), {symmetric} symmetry pairs"),
    )
}

fn configurations(nodes: &BTreeSet<NodeId>) -> Vec<Assignment> {
    let nodes: Vec<&NodeId> = nodes.iter().collect();
    (0..1usize << nodes.len())
        .map(|m| {
            nodes
                .iter()
                .enumerate()
                .map(|(k, n)| ((*n).clone(), m & (1 << k) != 0))
                .collect()
        })
        .collect()
}

const REDUCTION_NETWORKS: u64 = 500;

/// Provokers of every situational arc, then one other node, in random order
/// and with random values.
fn reduction_sequence(
    bn: &BinaryBayesNet,
    net: &QpnNetwork,
    rng: &mut ChaCha8Rng,
) -> Vec<(NodeId, Sign)> {
    let mut provokers: Vec<NodeId> = net
        .situational_arcs()
        .iter()
        .flat_map(|a| net.provokers_of(a).unwrap())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    provokers.shuffle(rng);
    let rest: Vec<&NodeId> = bn
        .nodes()
        .iter()
        .filter(|n| !provokers.contains(n))
        .collect();
    if let Some(n) = rest.choose(rng) {
        provokers.push((*n).clone());
    }
    provokers
        .into_iter()
        .map(|n| (n, Sign::from_bool(rng.gen_bool(0.5))))
        .collect()
}

// 8. Reduced signs against the per-configuration differences.
fn reduction(shots: &mut OneShot) -> Outcome {
    let mut failures = Vec::new();
    let (mut arcs, mut reduced, mut unsigned) = (0, 0, 0);
    for seed in 0..REDUCTION_NETWORKS {
        let (bn, mut rng) = nonmonotone_network(seed);
        let net = abstract_network(&bn, &Assignment::new()).unwrap();
        for arc in net.situational_arcs() {
            arcs += 1;
            let provokers = provoker_set(&bn, &arc.from, &arc.to).unwrap();
            if net.provokers_of(&arc).unwrap() != provokers {
                failures.push(format!(
                    "seed {seed} {arc}: abstraction disagrees on provokers"
                ));
            }
            let groups = grouped_differences(&bn, &arc.from, &arc.to, &provokers).unwrap();
            for config in configurations(&provokers) {
                let observed: BTreeMap<NodeId, Sign> = config
                    .iter()
                    .map(|(n, v)| (n.clone(), Sign::from_bool(*v)))
                    .collect();
                let sign = try_reduce(&net, &arc, &observed)
                    .unwrap()
                    .expect("all provokers observed");
                if sign == Q {
                    unsigned += 1;
                    continue;
                }
                reduced += 1;
                let truth = sign_of_values(&groups[&ParentConfiguration(config.clone())]);
                if sign != truth {
                    failures.push(format!(
                        "seed {seed} {arc} with {}: reduced to {sign}, differences {truth}",
                        ParentConfiguration(config)
                    ));
                }
            }
        }
        let sequence = reduction_sequence(&bn, &net, &mut rng);
        let reports = run_sequence(&net, &sequence).unwrap();
        shots.record(&format!("reduction seed {seed}"), &reports);
    }
    verdict(
        &failures,
        format!("{REDUCTION_NETWORKS} networks, {arcs} situational arcs: {reduced} signed reductions, {unsigned} '?'"),
    )
}

// 10. Reduction never leaves more '?' node signs, and helps on the fixture.
fn informativeness(shots: &mut OneShot) -> Outcome {
    let count = |reports: &[StepReport]| {
        reports
            .iter()
            .flat_map(|r| r.node_signs.values())
            .filter(|s| **s == Q)
            .count()
    };
    let with = Engine::new(EngineOptions { reduction: true });
    let without = Engine::new(EngineOptions { reduction: false });
    let mut failures = Vec::new();
    let (mut total_with, mut total_without, mut better, mut worse) = (0, 0, 0, 0);
    for seed in 0..REDUCTION_NETWORKS {
        let (bn, mut rng) = nonmonotone_network(seed);
        let net = abstract_network(&bn, &Assignment::new()).unwrap();
        let sequence = reduction_sequence(&bn, &net, &mut rng);
        let a = with.run_sequence(&net, &sequence).unwrap();
        let b = without.run_sequence(&net, &sequence).unwrap();
        shots.record(&format!("informativeness seed {seed} reduced"), &a);
        shots.record(&format!("informativeness seed {seed} unreduced"), &b);
        let (qa, qb) = (count(&a), count(&b));
        total_with += qa;
        total_without += qb;
        better += usize::from(qa < qb);
        worse += usize::from(qa > qb);
    }
    if total_with > total_without {
        failures.push(format!(
            "{total_with} '?' with reduction, {total_without} without"
        ));
    }

    let net = provoker_example_network();
    let sequence: Vec<(NodeId, Sign)> = [("D", P), ("C", M), ("B", P)]
        .iter()
        .map(|(n, s)| (id(n), *s))
        .collect();
    let a = with.run_sequence(&net, &sequence).unwrap();
    let b = without.run_sequence(&net, &sequence).unwrap();
    shots.record("fixture reduced", &a);
    shots.record("fixture unreduced", &b);
    let (ra, rb) = (a[2].sign("A"), b[2].sign("A"));
    if ra != M || rb != Q {
        failures.push(format!(
            "fixture: A is {ra} with reduction and {rb} without, expected - and ?"
        ));
    }
    verdict(
        &failures,
        format!(
            "'?' signs {total_with} with reduction vs {total_without} without ({better} networks better, {worse} worse); fixture A: {ra} vs {rb}"
        ),
    )
}

fn main() -> ExitCode {
    let mut shots = OneShot::default();
    let results = [
        ("AC1 operator tables", operators()),
        ("AC2 scenario 1, D=false", scenario_one(&mut shots)),
        ("AC3 scenario 2, D=true", scenario_two(&mut shots)),
        (
            "AC4 scenario 3, C=false reduces A->B",
            scenario_three(&mut shots),
        ),
        ("AC5 training/fitness anchors", anchors()),
        ("AC6 soundness on random networks", soundness(&mut shots)),
        ("AC7 verification and symmetry", verification(&mut shots)),
        ("AC8 reduction against the oracle", reduction(&mut shots)),
    ];
    let ten = informativeness(&mut shots);
    let nine = verdict(
        &shots.failures,
        format!("{} sequences, {} steps", shots.sequences, shots.steps),
    );
    let mut all = Vec::from(results);
    all.push(("AC9 restart bound and one-shot updates", nine));
    all.push(("AC10 reduction is at least as informative", ten));

    let mut failed = 0;
    for (name, outcome) in &all {
        let tag = if outcome.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {name}: {}", outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!("{} of {} criteria passed", all.len() - failed, all.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
