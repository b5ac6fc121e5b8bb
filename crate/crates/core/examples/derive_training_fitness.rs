//! Rebuilds `fixtures/training_fitness.json`.
//!
//! The target quantities are `Pr(f) = 0.4`, `Pr(w | t) = 0.39`,
//! `Pr(w | ¬t) = 0.51` and a sign change of the influence of T on W at
//! `Pr(f) ≈ 0.67`. With `Pr(w | ¬t ¬f)` chosen as 0.45 the four table entries
//! of W follow:
//!
//! ```text
//! 0.4·w(¬t f) + 0.6·w(¬t ¬f) = 0.51
//! the difference line g·Pr(f) + c passes through (0.4, -0.12) and (0.67, 0)
//!   c = w(t ¬f) - w(¬t ¬f),  g = w(t f) - w(t ¬f) - w(¬t f) + w(¬t ¬f)
//! ```
//!
//! Run with a path to write the fixture, or without to print it:
//!
//! ```text
//! cargo run --example derive_training_fitness -- crates/core/fixtures/training_fitness.json
//! ```

use std::collections::BTreeMap;

use qpn::format::{emit_network, NetworkDocument};
use qpn::oracle::{
    abstract_network, conditional_difference, influence_sign, provoker_set, synergy_sign,
    Assignment, BinaryBayesNet, Cpt,
};
use qpn::{NodeId, Sign};

// All quantities in hundredths, so each table entry is one exact integer
// ratio and a single rounding.
const PR_F: i64 = 40;
const PR_T: i64 = 50;
const W_GIVEN_T: i64 = 39;
const W_GIVEN_NOT_T: i64 = 51;
const DIFFERENCE_AT_PRIOR: i64 = -12;
const CROSSOVER: i64 = 67;
const W_NOT_T_NOT_F: i64 = 45;

fn ratio(num: i64, den: i64) -> f64 {
    num as f64 / den as f64
}

fn main() {
    // w(¬t f) = (51 - 0.6·45) / 0.4
    let w_not_t_f = ratio(
        W_GIVEN_NOT_T * 100 - (100 - PR_F) * W_NOT_T_NOT_F,
        PR_F * 100,
    );
    // the line through (0.4, -0.12) and (0.67, 0) has c = -0.12·0.67 / 0.27
    // and g = 0.12 / 0.27
    let span = CROSSOVER - PR_F;
    let w_t_not_f = ratio(
        W_NOT_T_NOT_F * span + DIFFERENCE_AT_PRIOR * CROSSOVER,
        100 * span,
    );
    // w(t f) = w(¬t f) + c + g
    let w_not_t_f_scaled = (W_GIVEN_NOT_T * 100 - (100 - PR_F) * W_NOT_T_NOT_F) * span / PR_F;
    let w_t_f = ratio(
        w_not_t_f_scaled + DIFFERENCE_AT_PRIOR * (CROSSOVER - 100),
        100 * span,
    );
    let p = |x: i64| ratio(x, 100);
    assert!((p(PR_F) * w_t_f + (1.0 - p(PR_F)) * w_t_not_f - p(W_GIVEN_T)).abs() < 1e-12);

    let (t, f, w) = (NodeId::new("T"), NodeId::new("F"), NodeId::new("W"));
    // parents [F, T]: row index bit 0 is F, bit 1 is T
    let rows = vec![p(W_NOT_T_NOT_F), w_not_t_f, w_t_not_f, w_t_f];
    assert!(rows.iter().all(|p| (0.0..=1.0).contains(p)));
    let mut cpts = BTreeMap::new();
    cpts.insert(t.clone(), Cpt::prior(p(PR_T)).unwrap());
    cpts.insert(f.clone(), Cpt::prior(p(PR_F)).unwrap());
    cpts.insert(
        w.clone(),
        Cpt::new(vec![f.clone(), t.clone()], rows).unwrap(),
    );
    let bn = BinaryBayesNet::new(vec![f.clone(), t.clone(), w.clone()], cpts).unwrap();

    let none = Assignment::new();
    let given = |value: bool| {
        bn.query((&w, true), &[(t.clone(), value)].into_iter().collect())
            .unwrap()
    };
    assert!((given(true) - p(W_GIVEN_T)).abs() < 1e-9);
    assert!((given(false) - p(W_GIVEN_NOT_T)).abs() < 1e-9);
    assert!(
        (conditional_difference(&bn, &t, &w, &none).unwrap() - p(DIFFERENCE_AT_PRIOR)).abs() < 1e-9
    );
    assert_eq!(influence_sign(&bn, &f, &w).unwrap(), Sign::Plus);
    assert_eq!(influence_sign(&bn, &t, &w).unwrap(), Sign::Ambiguous);
    assert_eq!(synergy_sign(&bn, &t, &f, &w).unwrap(), Sign::Plus);
    assert_eq!(
        provoker_set(&bn, &t, &w)
            .unwrap()
            .into_iter()
            .collect::<Vec<_>>(),
        vec![f.clone()]
    );

    let network = abstract_network(&bn, &none).unwrap();
    let text = emit_network(&NetworkDocument {
        network,
        bayes: Some(bn),
    });
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, text).unwrap();
            eprintln!("wrote {path}");
        }
        None => print!("{text}"),
    }
}
