//! Binary Bayesian networks with exact inference by enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::network::NodeId;
use crate::oracle::OracleError;

/// Largest network the enumerator accepts (2^20 joint entries).
pub const MAX_ENUMERATION_NODES: usize = 20;

/// A full or partial assignment of truth values.
pub type Assignment = BTreeMap<NodeId, bool>;

/// Values for exactly the parents of some node.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParentConfiguration(pub Assignment);

impl ParentConfiguration {
    pub fn get(&self, node: &NodeId) -> Option<bool> {
        self.0.get(node).copied()
    }

    /// Parses `"A=1,C=0"`; the empty string is the configuration of a root.
    pub fn parse(text: &str) -> Result<ParentConfiguration, String> {
        let mut out = Assignment::new();
        if text.trim().is_empty() {
            return Ok(ParentConfiguration(out));
        }
        for part in text.split(',') {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected <node>=<0|1>, got {part:?}"))?;
            let node = NodeId::try_new(name.trim())
                .ok_or_else(|| format!("empty node name in {part:?}"))?;
            let value = match value.trim() {
                "1" => true,
                "0" => false,
                v => return Err(format!("value for {node} must be 0 or 1, got {v:?}")),
            };
            if out.insert(node.clone(), value).is_some() {
                return Err(format!("node {node} assigned twice"));
            }
        }
        Ok(ParentConfiguration(out))
    }
}

impl fmt::Display for ParentConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(n, v)| format!("{n}={}", u8::from(*v)))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// Conditional probability table of a binary node: `Pr(node = true | parents)`.
///
/// Row `i` holds the configuration in which parent `k` is true iff bit `k` of
/// `i` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    parents: Vec<NodeId>,
    rows: Vec<f64>,
}

impl Cpt {
    pub fn new(parents: Vec<NodeId>, rows: Vec<f64>) -> Result<Cpt, OracleError> {
        if rows.len() != 1usize << parents.len() {
            return Err(OracleError::InvalidCpt(format!(
                "{} parents need {} rows, got {}",
                parents.len(),
                1usize << parents.len(),
                rows.len()
            )));
        }
        if let Some(p) = rows.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(OracleError::InvalidCpt(format!(
                "probability {p} outside [0, 1]"
            )));
        }
        let unique: BTreeSet<&NodeId> = parents.iter().collect();
        if unique.len() != parents.len() {
            return Err(OracleError::InvalidCpt("repeated parent".into()));
        }
        Ok(Cpt { parents, rows })
    }

    /// A root's table.
    pub fn prior(p: f64) -> Result<Cpt, OracleError> {
        Cpt::new(Vec::new(), vec![p])
    }

    /// Builds a table from one entry per configuration of `parents`.
    pub fn from_configurations(
        parents: Vec<NodeId>,
        entries: &BTreeMap<ParentConfiguration, f64>,
    ) -> Result<Cpt, OracleError> {
        let mut rows = vec![f64::NAN; 1usize << parents.len()];
        for (config, p) in entries {
            let keys: BTreeSet<&NodeId> = config.0.keys().collect();
            let expected: BTreeSet<&NodeId> = parents.iter().collect();
            if keys != expected {
                return Err(OracleError::InvalidCpt(format!(
                    "configuration {config} does not cover exactly the parents"
                )));
            }
            let index = parents
                .iter()
                .enumerate()
                .filter(|(_, n)| config.0[*n])
                .fold(0usize, |acc, (k, _)| acc | (1 << k));
            rows[index] = *p;
        }
        if let Some(i) = rows.iter().position(|p| p.is_nan()) {
            let missing = Cpt::configuration_of(&parents, i);
            return Err(OracleError::InvalidCpt(format!("missing row {missing}")));
        }
        Cpt::new(parents, rows)
    }

    fn configuration_of(parents: &[NodeId], index: usize) -> ParentConfiguration {
        ParentConfiguration(
            parents
                .iter()
                .enumerate()
                .map(|(k, n)| (n.clone(), index & (1 << k) != 0))
                .collect(),
        )
    }

    pub fn parents(&self) -> &[NodeId] {
        &self.parents
    }

    pub fn rows(&self) -> &[f64] {
        &self.rows
    }

    /// `(configuration, Pr(true | configuration))` for every row.
    pub fn entries(&self) -> impl Iterator<Item = (ParentConfiguration, f64)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, p)| (Cpt::configuration_of(&self.parents, i), *p))
    }

    /// `Pr(true | values)`; `values` must assign every parent.
    pub fn prob_true(&self, values: &Assignment) -> Option<f64> {
        let mut index = 0;
        for (k, parent) in self.parents.iter().enumerate() {
            if *values.get(parent)? {
                index |= 1 << k;
            }
        }
        Some(self.rows[index])
    }

    fn position(&self, node: &NodeId) -> Option<usize> {
        self.parents.iter().position(|p| p == node)
    }

    /// Row indices of the configurations of the parents other than `fixed`,
    /// each with the given parents' bits cleared.
    fn other_configurations(&self, fixed: &[usize]) -> Vec<usize> {
        let mask: usize = fixed.iter().map(|k| 1usize << k).sum();
        (0..self.rows.len()).filter(|i| i & mask == 0).collect()
    }

    /// `Pr(true | parent, x) - Pr(true | ¬parent, x)` for every configuration
    /// `x` of the remaining parents.
    pub fn differences(&self, parent: &NodeId) -> Option<Vec<f64>> {
        let k = self.position(parent)?;
        Some(
            self.other_configurations(&[k])
                .into_iter()
                .map(|i| self.rows[i | (1 << k)] - self.rows[i])
                .collect(),
        )
    }

    /// `Pr(c|abx) + Pr(c|¬a¬bx) - Pr(c|¬abx) - Pr(c|a¬bx)` for every
    /// configuration `x` of the remaining parents.
    pub fn interactions(&self, a: &NodeId, b: &NodeId) -> Option<Vec<f64>> {
        let ka = self.position(a)?;
        let kb = self.position(b)?;
        if ka == kb {
            return None;
        }
        let (ba, bb) = (1usize << ka, 1usize << kb);
        Some(
            self.other_configurations(&[ka, kb])
                .into_iter()
                .map(|i| {
                    self.rows[i | ba | bb] + self.rows[i] - self.rows[i | bb] - self.rows[i | ba]
                })
                .collect(),
        )
    }
}

/// A Bayesian network over binary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryBayesNet {
    nodes: Vec<NodeId>,
    cpts: BTreeMap<NodeId, Cpt>,
}

impl BinaryBayesNet {
    /// Checks that every node has a table, every parent exists and the graph
    /// is acyclic.
    pub fn new(
        nodes: Vec<NodeId>,
        cpts: BTreeMap<NodeId, Cpt>,
    ) -> Result<BinaryBayesNet, OracleError> {
        let known: BTreeSet<&NodeId> = nodes.iter().collect();
        if known.len() != nodes.len() {
            return Err(OracleError::InvalidNetwork("duplicate node".into()));
        }
        for n in &nodes {
            let cpt = cpts
                .get(n)
                .ok_or_else(|| OracleError::InvalidNetwork(format!("node {n} has no table")))?;
            if let Some(p) = cpt.parents.iter().find(|p| !known.contains(p)) {
                return Err(OracleError::InvalidNetwork(format!(
                    "parent {p} of {n} is not a node"
                )));
            }
        }
        if let Some(extra) = cpts.keys().find(|k| !known.contains(k)) {
            return Err(OracleError::InvalidNetwork(format!(
                "table for unknown node {extra}"
            )));
        }
        let net = BinaryBayesNet { nodes, cpts };
        if net.topological_order().is_none() {
            return Err(OracleError::InvalidNetwork(
                "graph has a directed cycle".into(),
            ));
        }
        Ok(net)
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn cpt(&self, node: &NodeId) -> Option<&Cpt> {
        self.cpts.get(node)
    }

    pub fn parents(&self, node: &NodeId) -> &[NodeId] {
        self.cpts.get(node).map(|c| c.parents()).unwrap_or(&[])
    }

    pub fn children(&self, node: &NodeId) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|n| self.parents(n).contains(node))
            .cloned()
            .collect()
    }

    pub fn has_arc(&self, from: &NodeId, to: &NodeId) -> bool {
        self.parents(to).contains(from)
    }

    /// Arcs `(parent, child)` in lexicographic order.
    pub fn arcs(&self) -> Vec<(NodeId, NodeId)> {
        let mut out: Vec<(NodeId, NodeId)> = self
            .cpts
            .iter()
            .flat_map(|(child, cpt)| cpt.parents.iter().map(move |p| (p.clone(), child.clone())))
            .collect();
        out.sort();
        out
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.cpts.contains_key(node)
    }

    pub fn topological_order(&self) -> Option<Vec<NodeId>> {
        let mut order = Vec::with_capacity(self.nodes.len());
        let mut placed = BTreeSet::new();
        while order.len() < self.nodes.len() {
            let next = self.nodes.iter().find(|n| {
                !placed.contains(*n) && self.parents(n).iter().all(|p| placed.contains(p))
            })?;
            placed.insert(next.clone());
            order.push(next.clone());
        }
        Some(order)
    }

    /// Adds a root `name` with prior `prior` as an extra parent of `target`.
    /// Each existing row `r` of the target's table becomes
    /// `(r + p_given_true) / 2` when the new parent is true and
    /// `(r + p_given_false) / 2` when it is false, so observing the new parent
    /// shifts the target's marginal without touching the rest of the network.
    pub fn with_evidence_parent(
        &self,
        name: &NodeId,
        target: &NodeId,
        prior: f64,
        p_given_true: f64,
        p_given_false: f64,
    ) -> Result<BinaryBayesNet, OracleError> {
        if self.contains(name) {
            return Err(OracleError::InvalidNetwork(format!(
                "node {name} already exists"
            )));
        }
        let old = self
            .cpt(target)
            .ok_or_else(|| OracleError::UnknownNode(target.clone()))?;
        let mut parents = old.parents.clone();
        parents.push(name.clone());
        let k = old.parents.len();
        let mut rows = vec![0.0; 1 << parents.len()];
        for (i, r) in old.rows.iter().enumerate() {
            rows[i | (1 << k)] = 0.5 * (r + p_given_true);
            rows[i] = 0.5 * (r + p_given_false);
        }
        let mut cpts = self.cpts.clone();
        cpts.insert(target.clone(), Cpt::new(parents, rows)?);
        cpts.insert(name.clone(), Cpt::prior(prior)?);
        let mut nodes = self.nodes.clone();
        nodes.push(name.clone());
        BinaryBayesNet::new(nodes, cpts)
    }

    /// Exhaustive joint table over `nodes()` order: entry `m` is the
    /// probability of the assignment where node `k` is true iff bit `k` of `m`
    /// is set.
    pub fn joint_table(&self) -> Result<JointTable, OracleError> {
        let n = self.nodes.len();
        if n > MAX_ENUMERATION_NODES {
            return Err(OracleError::TooLarge(n));
        }
        let index: BTreeMap<&NodeId, usize> =
            self.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let factors: Vec<(usize, Vec<usize>, &[f64])> = self
            .nodes
            .iter()
            .map(|node| {
                let cpt = &self.cpts[node];
                let parents = cpt.parents.iter().map(|p| index[p]).collect();
                (index[node], parents, cpt.rows.as_slice())
            })
            .collect();
        let probs = (0..1usize << n)
            .map(|mask| {
                factors
                    .iter()
                    .map(|(node, parents, rows)| {
                        let row = parents
                            .iter()
                            .enumerate()
                            .filter(|(_, p)| mask & (1 << **p) != 0)
                            .fold(0usize, |acc, (k, _)| acc | (1 << k));
                        if mask & (1 << node) != 0 {
                            rows[row]
                        } else {
                            1.0 - rows[row]
                        }
                    })
                    .product()
            })
            .collect();
        Ok(JointTable {
            nodes: self.nodes.clone(),
            probs,
        })
    }

    /// Chain-rule probability of a full assignment.
    pub fn joint_probability(&self, assignment: &Assignment) -> Result<f64, OracleError> {
        let mut p = 1.0;
        for node in &self.nodes {
            let value = *assignment
                .get(node)
                .ok_or_else(|| OracleError::IncompleteAssignment(node.clone()))?;
            let t = self.cpts[node]
                .prob_true(assignment)
                .ok_or_else(|| OracleError::IncompleteAssignment(node.clone()))?;
            p *= if value { t } else { 1.0 - t };
        }
        Ok(p)
    }

    /// `Pr(target = value | evidence)` by enumeration.
    pub fn query(
        &self,
        target: (&NodeId, bool),
        evidence: &Assignment,
    ) -> Result<f64, OracleError> {
        self.joint_table()?.query(target, evidence)
    }
}

/// Joint distribution of a [`BinaryBayesNet`], for repeated exact queries.
#[derive(Debug, Clone)]
pub struct JointTable {
    nodes: Vec<NodeId>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn bit(&self, node: &NodeId) -> Result<usize, OracleError> {
        self.nodes
            .iter()
            .position(|n| n == node)
            .map(|i| 1 << i)
            .ok_or_else(|| OracleError::UnknownNode(node.clone()))
    }

    /// `(care, value)` masks selecting assignments consistent with `evidence`.
    fn masks(&self, evidence: &Assignment) -> Result<(usize, usize), OracleError> {
        let mut care = 0;
        let mut value = 0;
        for (node, v) in evidence {
            let b = self.bit(node)?;
            care |= b;
            if *v {
                value |= b;
            }
        }
        Ok((care, value))
    }

    /// `Pr(evidence)`.
    pub fn probability(&self, evidence: &Assignment) -> Result<f64, OracleError> {
        let (care, value) = self.masks(evidence)?;
        Ok(self
            .probs
            .iter()
            .enumerate()
            .filter(|(m, _)| m & care == value)
            .map(|(_, p)| p)
            .sum())
    }

    /// `Pr(target = value | evidence)`.
    pub fn query(
        &self,
        target: (&NodeId, bool),
        evidence: &Assignment,
    ) -> Result<f64, OracleError> {
        let denominator = self.probability(evidence)?;
        if denominator <= 0.0 {
            return Err(OracleError::ZeroProbability);
        }
        let mut joint = evidence.clone();
        match joint.insert(target.0.clone(), target.1) {
            Some(v) if v != target.1 => return Ok(0.0),
            _ => {}
        }
        Ok(self.probability(&joint)? / denominator)
    }

    /// Posterior distribution over the joint values of `nodes` given
    /// `evidence`, keyed by configuration.
    pub fn distribution(
        &self,
        nodes: &[NodeId],
        evidence: &Assignment,
    ) -> Result<Vec<(Assignment, f64)>, OracleError> {
        let denominator = self.probability(evidence)?;
        if denominator <= 0.0 {
            return Err(OracleError::ZeroProbability);
        }
        let (care, value) = self.masks(evidence)?;
        let bits: Vec<usize> = nodes
            .iter()
            .map(|n| self.bit(n))
            .collect::<Result<_, _>>()?;
        let mut weights = vec![0.0; 1 << nodes.len()];
        for (m, p) in self.probs.iter().enumerate() {
            if m & care != value {
                continue;
            }
            let key = bits
                .iter()
                .enumerate()
                .filter(|(_, b)| m & **b != 0)
                .fold(0usize, |acc, (k, _)| acc | (1 << k));
            weights[key] += p;
        }
        Ok(weights
            .into_iter()
            .enumerate()
            .map(|(key, w)| {
                let config = nodes
                    .iter()
                    .enumerate()
                    .map(|(k, n)| (n.clone(), key & (1 << k) != 0))
                    .collect();
                (config, w / denominator)
            })
            .collect())
    }
}
