//! JSON network and evidence documents.
//!
//! ```json
//! {
//!   "nodes": ["F", "T", "W"],
//!   "arcs": [
//!     { "from": "F", "to": "W", "sign": "+" },
//!     { "from": "T", "to": "W", "situational": { "current": "-", "provokers": ["F"] } }
//!   ],
//!   "synergies": [{ "parents": ["F", "T"], "child": "W", "sign": "+" }],
//!   "priors": { "F": 0.4, "T": 0.5 },
//!   "cpts": { "W": { "F=0,T=0": 0.45, "F=0,T=1": 0.15, "F=1,T=0": 0.6, "F=1,T=1": 0.75 } }
//! }
//! ```
//!
//! `priors` and `cpts` are optional but come together: when present, every root
//! needs a prior and every other node a table row for each configuration of
//! its parents. Evidence is an array of `{ "node": "D", "value": true }`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{
    AdditiveSynergy, Influence, NodeId, QpnNetwork, Situational, ValidationReport,
};
use crate::oracle::{BinaryBayesNet, Cpt, ParentConfiguration};
use crate::sign::Sign;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormatError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Field { path: String, message: String },
    #[error("network is invalid:\n{0}")]
    Invalid(ValidationReport),
}

impl FormatError {
    fn field(path: impl Into<String>, message: impl fmt::Display) -> FormatError {
        FormatError::Field {
            path: path.into(),
            message: message.to_string(),
        }
    }

    fn syntax(e: serde_json::Error) -> FormatError {
        FormatError::Syntax {
            line: e.line(),
            column: e.column(),
            message: strip_position(&e.to_string()),
        }
    }
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNetwork {
    #[serde(default)]
    nodes: Vec<String>,
    #[serde(default)]
    arcs: Vec<RawArc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    synergies: Vec<RawSynergy>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    priors: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    cpts: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawArc {
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sign: Option<Sign>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    situational: Option<RawSituational>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSituational {
    current: Sign,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provokers: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reduced: Option<Sign>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSynergy {
    parents: Vec<String>,
    child: String,
    sign: Sign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObservation {
    node: String,
    value: bool,
}

/// A parsed network file: the qualitative network and, when the file carries
/// probabilities, the numeric network over the same graph.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkDocument {
    pub network: QpnNetwork,
    pub bayes: Option<BinaryBayesNet>,
}

impl NetworkDocument {
    pub fn qualitative(network: QpnNetwork) -> NetworkDocument {
        NetworkDocument {
            network,
            bayes: None,
        }
    }
}

fn node_id(path: &str, name: &str) -> Result<NodeId, FormatError> {
    NodeId::try_new(name).ok_or_else(|| FormatError::field(path, "node name must not be empty"))
}

/// Parses and validates a network document.
pub fn parse_network(text: &str) -> Result<NetworkDocument, FormatError> {
    let raw: RawNetwork = serde_json::from_str(text).map_err(FormatError::syntax)?;

    let mut net = QpnNetwork::new();
    let mut seen = BTreeSet::new();
    for (i, name) in raw.nodes.iter().enumerate() {
        let path = format!("nodes[{i}]");
        let id = node_id(&path, name)?;
        if !seen.insert(id.clone()) {
            return Err(FormatError::field(path, format!("duplicate node {id}")));
        }
        net.add_node(id);
    }

    let mut arcs_seen = BTreeSet::new();
    for (i, arc) in raw.arcs.iter().enumerate() {
        let path = format!("arcs[{i}]");
        let from = node_id(&format!("{path}.from"), &arc.from)?;
        let to = node_id(&format!("{path}.to"), &arc.to)?;
        if !arcs_seen.insert((from.clone(), to.clone())) {
            return Err(FormatError::field(
                path,
                format!("duplicate arc {from}->{to}"),
            ));
        }
        let influence = match (&arc.sign, &arc.situational) {
            (Some(s), None) => Influence::Regular(*s),
            (None, Some(sit)) => {
                let provokers = match &sit.provokers {
                    None => None,
                    Some(list) => Some(
                        list.iter()
                            .enumerate()
                            .map(|(k, p)| node_id(&format!("{path}.situational.provokers[{k}]"), p))
                            .collect::<Result<BTreeSet<_>, _>>()?,
                    ),
                };
                Influence::Situational(Situational {
                    current: sit.current,
                    provokers,
                    reduced: sit.reduced,
                })
            }
            _ => {
                return Err(FormatError::field(
                    path,
                    "an arc needs exactly one of \"sign\" and \"situational\"",
                ))
            }
        };
        net.add_arc(from, to, influence);
    }

    for (i, syn) in raw.synergies.iter().enumerate() {
        let path = format!("synergies[{i}]");
        let [a, b] = syn.parents.as_slice() else {
            return Err(FormatError::field(
                format!("{path}.parents"),
                format!("expected two parents, got {}", syn.parents.len()),
            ));
        };
        let a = node_id(&format!("{path}.parents[0]"), a)?;
        let b = node_id(&format!("{path}.parents[1]"), b)?;
        let child = node_id(&format!("{path}.child"), &syn.child)?;
        net.add_synergy(AdditiveSynergy::new(a, b, child, syn.sign));
    }

    let report = net.validate();
    if !report.is_valid() {
        return Err(FormatError::Invalid(report));
    }

    let bayes = if raw.priors.is_empty() && raw.cpts.is_empty() {
        None
    } else {
        Some(parse_bayes(&net, &raw.priors, &raw.cpts)?)
    };
    Ok(NetworkDocument {
        network: net,
        bayes,
    })
}

fn parse_bayes(
    net: &QpnNetwork,
    priors: &BTreeMap<String, f64>,
    cpts: &BTreeMap<String, BTreeMap<String, f64>>,
) -> Result<BinaryBayesNet, FormatError> {
    for name in priors.keys() {
        let id = node_id("priors", name)?;
        if !net.contains(&id) {
            return Err(FormatError::field(format!("priors.{name}"), "unknown node"));
        }
        if !net.parents(&id).is_empty() {
            return Err(FormatError::field(
                format!("priors.{name}"),
                "node has parents; give its table under \"cpts\"",
            ));
        }
    }
    for name in cpts.keys() {
        let id = node_id("cpts", name)?;
        if !net.contains(&id) {
            return Err(FormatError::field(format!("cpts.{name}"), "unknown node"));
        }
    }

    let mut tables = BTreeMap::new();
    for node in net.nodes() {
        let parents: Vec<NodeId> = net.parents(node).into_iter().collect();
        let cpt = if parents.is_empty() {
            let path = format!("priors.{node}");
            let p = priors
                .get(node.as_str())
                .ok_or_else(|| FormatError::field(&path, "root node needs a prior"))?;
            Cpt::prior(*p).map_err(|e| FormatError::field(&path, e))?
        } else {
            let path = format!("cpts.{node}");
            let rows = cpts
                .get(node.as_str())
                .ok_or_else(|| FormatError::field(&path, "node needs a table"))?;
            let mut entries = BTreeMap::new();
            for (key, p) in rows {
                let row_path = format!("{path}[\"{key}\"]");
                let config = ParentConfiguration::parse(key)
                    .map_err(|e| FormatError::field(&row_path, e))?;
                if entries.insert(config, *p).is_some() {
                    return Err(FormatError::field(&row_path, "configuration given twice"));
                }
            }
            Cpt::from_configurations(parents, &entries).map_err(|e| FormatError::field(&path, e))?
        };
        tables.insert(node.clone(), cpt);
    }
    BinaryBayesNet::new(net.nodes().cloned().collect(), tables)
        .map_err(|e| FormatError::field("cpts", e))
}

/// Canonical text of a document: sorted, pretty-printed, newline-terminated.
pub fn emit_network(doc: &NetworkDocument) -> String {
    let net = &doc.network;
    let arcs = net
        .arcs()
        .map(|(arc, influence)| {
            let (sign, situational) = match influence {
                Influence::Regular(s) => (Some(*s), None),
                Influence::Situational(sit) => (
                    None,
                    Some(RawSituational {
                        current: sit.current,
                        provokers: sit
                            .provokers
                            .as_ref()
                            .map(|p| p.iter().map(|n| n.to_string()).collect()),
                        reduced: sit.reduced,
                    }),
                ),
            };
            RawArc {
                from: arc.from.to_string(),
                to: arc.to.to_string(),
                sign,
                situational,
            }
        })
        .collect();
    let mut synergies: Vec<&AdditiveSynergy> = net.synergies().iter().collect();
    synergies.sort_by(|a, b| (&a.child, a.pair()).cmp(&(&b.child, b.pair())));
    let synergies = synergies
        .into_iter()
        .map(|s| {
            let (a, b) = s.pair();
            RawSynergy {
                parents: vec![a.to_string(), b.to_string()],
                child: s.child.to_string(),
                sign: s.sign,
            }
        })
        .collect();

    let mut priors = BTreeMap::new();
    let mut cpts = BTreeMap::new();
    if let Some(bn) = &doc.bayes {
        for node in bn.nodes() {
            let cpt = bn.cpt(node).expect("every node has a table");
            if cpt.parents().is_empty() {
                priors.insert(node.to_string(), cpt.rows()[0]);
            } else {
                let rows = cpt.entries().map(|(c, p)| (c.to_string(), p)).collect();
                cpts.insert(node.to_string(), rows);
            }
        }
    }

    let raw = RawNetwork {
        nodes: net.nodes().map(|n| n.to_string()).collect(),
        arcs,
        synergies,
        priors,
        cpts,
    };
    let mut text = serde_json::to_string_pretty(&raw).expect("documents always serialize");
    text.push('\n');
    text
}

/// Parses an evidence document into an ordered observation list.
pub fn parse_evidence(text: &str) -> Result<Vec<(NodeId, bool)>, FormatError> {
    let raw: Vec<RawObservation> = serde_json::from_str(text).map_err(FormatError::syntax)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(raw.len());
    for (i, obs) in raw.iter().enumerate() {
        let path = format!("[{i}].node");
        let id = node_id(&path, &obs.node)?;
        if !seen.insert(id.clone()) {
            return Err(FormatError::field(
                path,
                format!("node {id} observed twice"),
            ));
        }
        out.push((id, obs.value));
    }
    Ok(out)
}

pub fn emit_evidence(observations: &[(NodeId, bool)]) -> String {
    let raw: Vec<RawObservation> = observations
        .iter()
        .map(|(n, v)| RawObservation {
            node: n.to_string(),
            value: *v,
        })
        .collect();
    let mut text = serde_json::to_string_pretty(&raw).expect("evidence always serializes");
    text.push('\n');
    text
}
