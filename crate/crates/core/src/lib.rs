//! Qualitative probabilistic networks with situational signs.
//!
//! A [`QpnNetwork`] summarises a binary Bayesian network by the signs of its
//! influences and additive synergies. Influences that are not monotonic carry
//! a situational sign, valid in the current state of the network, together
//! with the set of co-parents whose observation fixes the influence for good.
//! The [`engine`] propagates observation signs through such a network, keeping
//! situational signs up to date, and the [`oracle`] solves small numeric
//! networks exactly to abstract them and to check the engine's answers.
//!
//! ```
//! use qpn::{network::provoker_example_network, engine::process_observation, NodeId, Sign};
//! use std::collections::BTreeMap;
//!
//! let net = provoker_example_network();
//! let step = process_observation(&net, &BTreeMap::new(), (NodeId::new("D"), Sign::Minus)).unwrap();
//! assert_eq!(step.sign("B"), Sign::Plus);
//! assert_eq!(step.restart_count, 0);
//! ```

pub mod cli;
pub mod engine;
pub mod format;
pub mod gen;
pub mod network;
pub mod oracle;
pub mod sign;

pub use engine::{Engine, EngineOptions, InferenceError, StepReport, TraceEvent};
pub use network::{AdditiveSynergy, Arc, Influence, NodeId, QpnNetwork, Situational};
pub use sign::Sign;
