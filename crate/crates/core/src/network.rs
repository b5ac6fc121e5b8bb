//! Qualitative network data model.
//!
//! A [`QpnNetwork`] is a DAG of binary nodes. Each arc carries an
//! [`Influence`]: either a regular sign or a situational annotation
//! `?(δ)_X` for a non-monotonic influence, where `δ` is the sign valid in
//! the current network state. Additive synergies are kept per
//! (unordered parent pair, child).
//!
//! All collections are ordered by [`NodeId`] so every traversal is
//! reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::sign::Sign;

/// Identifier of a binary variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(String);

impl NodeId {
    /// Panics on an empty identifier; use [`NodeId::try_new`] for untrusted input.
    pub fn new(id: impl Into<String>) -> NodeId {
        NodeId::try_new(id).expect("node identifiers must be non-empty")
    }

    pub fn try_new(id: impl Into<String>) -> Option<NodeId> {
        let id = id.into();
        if id.is_empty() {
            None
        } else {
            Some(NodeId(id))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId::new(s)
    }
}

/// A directed arc `(from, to)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub from: NodeId,
    pub to: NodeId,
}

impl Arc {
    pub fn new(from: impl Into<NodeId>, to: impl Into<NodeId>) -> Arc {
        Arc {
            from: from.into(),
            to: to.into(),
        }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.from, self.to)
    }
}

/// Annotation of a non-monotonic influence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Situational {
    /// The sign valid in the current state.
    pub current: Sign,
    /// Declared provoker set; `None` means "all co-parents".
    pub provokers: Option<BTreeSet<NodeId>>,
    /// Fixed sign once every provoker has been observed.
    pub reduced: Option<Sign>,
}

impl Situational {
    pub fn new(current: Sign) -> Situational {
        Situational {
            current,
            provokers: None,
            reduced: None,
        }
    }

    pub fn with_provokers<I, N>(current: Sign, provokers: I) -> Situational
    where
        I: IntoIterator<Item = N>,
        N: Into<NodeId>,
    {
        Situational {
            current,
            provokers: Some(provokers.into_iter().map(Into::into).collect()),
            reduced: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Influence {
    Regular(Sign),
    Situational(Situational),
}

impl Influence {
    /// The plain sign used when propagating over this influence.
    pub fn link_sign(&self) -> Sign {
        match self {
            Influence::Regular(s) => *s,
            Influence::Situational(sit) => sit.reduced.unwrap_or(sit.current),
        }
    }

    /// True for situational annotations that have not been reduced.
    pub fn is_situational(&self) -> bool {
        matches!(self, Influence::Situational(sit) if sit.reduced.is_none())
    }
}

impl From<Sign> for Influence {
    fn from(s: Sign) -> Self {
        Influence::Regular(s)
    }
}

impl From<Situational> for Influence {
    fn from(s: Situational) -> Self {
        Influence::Situational(s)
    }
}

/// `Y^sign({a, b}, child)`. The pair is stored sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AdditiveSynergy {
    pair: (NodeId, NodeId),
    pub child: NodeId,
    pub sign: Sign,
}

impl AdditiveSynergy {
    pub fn new(
        a: impl Into<NodeId>,
        b: impl Into<NodeId>,
        child: impl Into<NodeId>,
        sign: Sign,
    ) -> Self {
        let (a, b) = (a.into(), b.into());
        let pair = if a <= b { (a, b) } else { (b, a) };
        AdditiveSynergy {
            pair,
            child: child.into(),
            sign,
        }
    }

    pub fn pair(&self) -> (&NodeId, &NodeId) {
        (&self.pair.0, &self.pair.1)
    }

    fn matches(&self, a: &NodeId, b: &NodeId, child: &NodeId) -> bool {
        &self.child == child
            && ((&self.pair.0 == a && &self.pair.1 == b)
                || (&self.pair.0 == b && &self.pair.1 == a))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("no arc {0}")]
    MissingArc(Arc),
    #[error("arc {0} does not carry a situational influence")]
    NotSituational(Arc),
    #[error("situational influence on arc {0} has already been reduced")]
    AlreadyReduced(Arc),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
}

/// One structural problem found by [`QpnNetwork::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationIssue {
    /// The arcs contain a directed cycle through these nodes.
    Cycle(Vec<NodeId>),
    DanglingArc {
        arc: Arc,
        node: NodeId,
    },
    SelfLoop(NodeId),
    ProvokerNotCoParent {
        arc: Arc,
        provoker: NodeId,
    },
    SynergyParentMissing {
        synergy: AdditiveSynergy,
        node: NodeId,
    },
    SynergyPairDegenerate(AdditiveSynergy),
    DuplicateSynergy(AdditiveSynergy),
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::Cycle(nodes) => {
                let names: Vec<&str> = nodes.iter().map(NodeId::as_str).collect();
                write!(f, "acyclicity: cycle through {}", names.join(" -> "))
            }
            ValidationIssue::DanglingArc { arc, node } => {
                write!(f, "dangling reference: arc {arc} names unknown node {node}")
            }
            ValidationIssue::SelfLoop(n) => write!(f, "acyclicity: self-loop on {n}"),
            ValidationIssue::ProvokerNotCoParent { arc, provoker } => {
                write!(f, "provokers: {provoker} is not a co-parent for arc {arc}")
            }
            ValidationIssue::SynergyParentMissing { synergy, node } => {
                let (a, b) = synergy.pair();
                write!(
                    f,
                    "synergy: {node} is not a parent of {} in Y({{{a},{b}}},{})",
                    synergy.child, synergy.child
                )
            }
            ValidationIssue::SynergyPairDegenerate(s) => {
                let (a, _) = s.pair();
                write!(f, "synergy: pair on {} repeats node {a}", s.child)
            }
            ValidationIssue::DuplicateSynergy(s) => {
                let (a, b) = s.pair();
                write!(f, "synergy: duplicate Y({{{a},{b}}},{})", s.child)
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return writeln!(f, "valid");
        }
        for issue in &self.issues {
            writeln!(f, "invalid: {issue}")?;
        }
        Ok(())
    }
}

/// A qualitative probabilistic network.
///
/// Immutable in use: inference runs clone the network and mutate their own copy.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QpnNetwork {
    nodes: BTreeSet<NodeId>,
    arcs: BTreeMap<Arc, Influence>,
    synergies: Vec<AdditiveSynergy>,
}

impl QpnNetwork {
    pub fn new() -> QpnNetwork {
        QpnNetwork::default()
    }

    pub fn add_node(&mut self, id: impl Into<NodeId>) -> &mut Self {
        self.nodes.insert(id.into());
        self
    }

    /// Inserts or replaces the influence on `from -> to`. Endpoints are not
    /// added implicitly; [`validate`](Self::validate) reports dangling arcs.
    pub fn add_arc(
        &mut self,
        from: impl Into<NodeId>,
        to: impl Into<NodeId>,
        influence: impl Into<Influence>,
    ) -> &mut Self {
        self.arcs.insert(Arc::new(from, to), influence.into());
        self
    }

    pub fn add_synergy(&mut self, synergy: AdditiveSynergy) -> &mut Self {
        self.synergies.push(synergy);
        self
    }

    pub fn nodes(&self) -> impl Iterator<Item = &NodeId> {
        self.nodes.iter()
    }

    pub fn contains(&self, node: &NodeId) -> bool {
        self.nodes.contains(node)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn arcs(&self) -> impl Iterator<Item = (&Arc, &Influence)> {
        self.arcs.iter()
    }

    pub fn synergies(&self) -> &[AdditiveSynergy] {
        &self.synergies
    }

    pub fn influence(&self, arc: &Arc) -> Result<&Influence, ModelError> {
        self.arcs
            .get(arc)
            .ok_or_else(|| ModelError::MissingArc(arc.clone()))
    }

    pub fn influence_mut(&mut self, arc: &Arc) -> Result<&mut Influence, ModelError> {
        self.arcs
            .get_mut(arc)
            .ok_or_else(|| ModelError::MissingArc(arc.clone()))
    }

    pub fn has_arc(&self, from: &NodeId, to: &NodeId) -> bool {
        self.arcs.contains_key(&Arc {
            from: from.clone(),
            to: to.clone(),
        })
    }

    pub fn parents(&self, node: &NodeId) -> BTreeSet<NodeId> {
        self.arcs
            .keys()
            .filter(|a| &a.to == node)
            .map(|a| a.from.clone())
            .collect()
    }

    pub fn children(&self, node: &NodeId) -> BTreeSet<NodeId> {
        self.arcs
            .keys()
            .filter(|a| &a.from == node)
            .map(|a| a.to.clone())
            .collect()
    }

    /// Parents and children, lexicographically.
    pub fn neighbours(&self, node: &NodeId) -> BTreeSet<NodeId> {
        let mut out = self.parents(node);
        out.extend(self.children(node));
        out
    }

    /// Sign of the synergy of `{a, b}` on `child`, if one is declared.
    pub fn synergy(&self, a: &NodeId, b: &NodeId, child: &NodeId) -> Option<Sign> {
        self.synergies
            .iter()
            .find(|s| s.matches(a, b, child))
            .map(|s| s.sign)
    }

    /// Like [`synergy`](Self::synergy), with an absent synergy read as `?`.
    pub fn synergy_or_ambiguous(&self, a: &NodeId, b: &NodeId, child: &NodeId) -> Sign {
        self.synergy(a, b, child).unwrap_or(Sign::Ambiguous)
    }

    /// Sign to use when propagating over `arc`, in either direction.
    pub fn effective_link_sign(&self, arc: &Arc) -> Result<Sign, ModelError> {
        Ok(self.influence(arc)?.link_sign())
    }

    /// All parents of `arc.to` other than `arc.from`.
    pub fn co_parents(&self, arc: &Arc) -> Result<BTreeSet<NodeId>, ModelError> {
        self.influence(arc)?;
        let mut parents = self.parents(&arc.to);
        parents.remove(&arc.from);
        Ok(parents)
    }

    /// Declared provokers of a situational arc, or every co-parent when none
    /// were declared.
    pub fn provokers_of(&self, arc: &Arc) -> Result<BTreeSet<NodeId>, ModelError> {
        match self.influence(arc)? {
            Influence::Situational(sit) => match &sit.provokers {
                Some(p) => Ok(p.clone()),
                None => self.co_parents(arc),
            },
            Influence::Regular(_) => Err(ModelError::NotSituational(arc.clone())),
        }
    }

    /// Arcs carrying an unreduced situational influence (A_nm).
    pub fn situational_arcs(&self) -> Vec<Arc> {
        self.arcs
            .iter()
            .filter(|(_, inf)| inf.is_situational())
            .map(|(a, _)| a.clone())
            .collect()
    }

    /// Co-parents of situational arcs, that is, the other parents of their heads (C_nm).
    pub fn situational_co_parents(&self) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        for arc in self.situational_arcs() {
            if let Ok(cp) = self.co_parents(&arc) {
                out.extend(cp);
            }
        }
        out
    }

    /// Situational arcs exerted by co-parents of `node` (A_nm(node)).
    ///
    /// The set is defined through an undefined σ(V); σ(V) is read here as the
    /// children of V, so this collects situational arcs `X -> Y` with `Y` a child
    /// of `node` and `X != node`.
    pub fn situational_arcs_around(&self, node: &NodeId) -> Vec<Arc> {
        let children = self.children(node);
        self.situational_arcs()
            .into_iter()
            .filter(|a| children.contains(&a.to) && &a.from != node)
            .collect()
    }

    /// Structural checks. A network that passes satisfies every model invariant.
    pub fn validate(&self) -> ValidationReport {
        let mut issues = Vec::new();

        for arc in self.arcs.keys() {
            for end in [&arc.from, &arc.to] {
                if !self.nodes.contains(end) {
                    issues.push(ValidationIssue::DanglingArc {
                        arc: arc.clone(),
                        node: end.clone(),
                    });
                }
            }
            if arc.from == arc.to {
                issues.push(ValidationIssue::SelfLoop(arc.from.clone()));
            }
        }

        if let Some(cycle) = self.find_cycle() {
            issues.push(ValidationIssue::Cycle(cycle));
        }

        for (arc, inf) in &self.arcs {
            if let Influence::Situational(sit) = inf {
                if let Some(provokers) = &sit.provokers {
                    let co = self.co_parents(arc).unwrap_or_default();
                    for p in provokers {
                        if !co.contains(p) {
                            issues.push(ValidationIssue::ProvokerNotCoParent {
                                arc: arc.clone(),
                                provoker: p.clone(),
                            });
                        }
                    }
                }
            }
        }

        let mut seen: BTreeSet<(NodeId, NodeId, NodeId)> = BTreeSet::new();
        for syn in &self.synergies {
            let (a, b) = syn.pair();
            if a == b {
                issues.push(ValidationIssue::SynergyPairDegenerate(syn.clone()));
            }
            let parents = self.parents(&syn.child);
            for n in [a, b] {
                if !parents.contains(n) {
                    issues.push(ValidationIssue::SynergyParentMissing {
                        synergy: syn.clone(),
                        node: n.clone(),
                    });
                }
            }
            if !seen.insert((a.clone(), b.clone(), syn.child.clone())) {
                issues.push(ValidationIssue::DuplicateSynergy(syn.clone()));
            }
        }

        ValidationReport { issues }
    }

    fn find_cycle(&self) -> Option<Vec<NodeId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Fresh,
            Active,
            Done,
        }
        let mut all: BTreeSet<NodeId> = self.nodes.clone();
        for a in self.arcs.keys() {
            all.insert(a.from.clone());
            all.insert(a.to.clone());
        }
        let mut marks: BTreeMap<NodeId, Mark> =
            all.iter().map(|n| (n.clone(), Mark::Fresh)).collect();

        fn visit(
            net: &QpnNetwork,
            node: &NodeId,
            marks: &mut BTreeMap<NodeId, Mark>,
            stack: &mut Vec<NodeId>,
        ) -> Option<Vec<NodeId>> {
            marks.insert(node.clone(), Mark::Active);
            stack.push(node.clone());
            for child in net.children(node) {
                match marks[&child] {
                    Mark::Active => {
                        if &child == node {
                            // self-loops are reported separately
                            continue;
                        }
                        let start = stack.iter().position(|n| n == &child).unwrap();
                        let mut cycle = stack[start..].to_vec();
                        cycle.push(child);
                        return Some(cycle);
                    }
                    Mark::Fresh => {
                        if let Some(c) = visit(net, &child, marks, stack) {
                            return Some(c);
                        }
                    }
                    Mark::Done => {}
                }
            }
            stack.pop();
            marks.insert(node.clone(), Mark::Done);
            None
        }

        for n in &all {
            if marks[n] == Mark::Fresh {
                let mut stack = Vec::new();
                if let Some(c) = visit(self, n, &mut marks, &mut stack) {
                    return Some(c);
                }
            }
        }
        None
    }
}

/// Evidence entered so far plus the observation being processed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvidenceState {
    pub old_observations: BTreeMap<NodeId, Sign>,
    pub new_observation: Option<(NodeId, Sign)>,
}

impl EvidenceState {
    pub fn is_observed(&self, node: &NodeId) -> bool {
        self.old_observations.contains_key(node)
            || self
                .new_observation
                .as_ref()
                .is_some_and(|(n, _)| n == node)
    }

    /// Evidence sign of `node`, whether old or new.
    pub fn sign_of(&self, node: &NodeId) -> Option<Sign> {
        if let Some((n, s)) = &self.new_observation {
            if n == node {
                return Some(*s);
            }
        }
        self.old_observations.get(node).copied()
    }

    /// Old and new observations together.
    pub fn all(&self) -> BTreeMap<NodeId, Sign> {
        let mut all = self.old_observations.clone();
        if let Some((n, s)) = &self.new_observation {
            all.insert(n.clone(), *s);
        }
        all
    }
}

/// The network of the situational example with a single non-monotonic arc:
/// `D -> A : -`, `D -> C : -`, `A -> B : ?(+)_{C}`, `C -> B : +` and
/// `Y+({A, C}, B)`.
pub fn provoker_example_network() -> QpnNetwork {
    let mut net = QpnNetwork::new();
    for n in ["A", "B", "C", "D"] {
        net.add_node(n);
    }
    net.add_arc("D", "A", Sign::Minus)
        .add_arc("D", "C", Sign::Minus)
        .add_arc("A", "B", Situational::with_provokers(Sign::Plus, ["C"]))
        .add_arc("C", "B", Sign::Plus)
        .add_synergy(AdditiveSynergy::new("A", "C", "B", Sign::Plus));
    net
}
