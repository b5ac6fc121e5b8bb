//! Sign propagation over situational qualitative networks.
//!
//! Each observation is processed in three phases:
//!
//! 1. every situational arc whose provokers are now all observed is reduced to
//!    a fixed regular sign;
//! 2. all node signs are reset to `0` and the observed node is seeded with its
//!    evidence sign;
//! 3. signs are passed between neighbours along active trails. Whenever the
//!    sign of a co-parent of a situational arc changes, that arc's situational
//!    sign is re-verified; if it must change, the new sign is stored in the
//!    run's network and propagation of the current observation restarts from
//!    scratch.
//!
//! Earlier observations are not re-propagated on restart. Their effect
//! persists only through the arc signs they updated or reduced.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::network::{
    Arc, EvidenceState, Influence, ModelError, NodeId, QpnNetwork, ValidationReport,
};
use crate::sign::{sum_all, Sign};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InferenceError {
    #[error("network is invalid:\n{0}")]
    InvalidNetwork(ValidationReport),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("node {0} has already been observed")]
    AlreadyObserved(NodeId),
    #[error("evidence sign for {node} must be + or -, got {sign}")]
    InvalidEvidenceSign { node: NodeId, sign: Sign },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One entry of the execution log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEvent {
    Reduce {
        arc: Arc,
        sign: Sign,
    },
    Message {
        from: NodeId,
        to: NodeId,
        sign: Sign,
    },
    NodeUpdate {
        node: NodeId,
        old: Sign,
        message: Sign,
        new: Sign,
    },
    VerifyKeep {
        arc: Arc,
        current: Sign,
    },
    VerifyUpdate {
        arc: Arc,
        before: Sign,
        after: Sign,
    },
    Restart {
        count: usize,
    },
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Reduce { arc, sign } => write!(f, "REDUCE {arc} {sign}"),
            TraceEvent::Message { from, to, sign } => write!(f, "MSG {from}->{to} {sign}"),
            TraceEvent::NodeUpdate {
                node,
                old,
                message,
                new,
            } => write!(f, "NODE {node} {old}(+){message}={new}"),
            TraceEvent::VerifyKeep { arc, current } => write!(f, "VERIFY {arc} keep {current}"),
            TraceEvent::VerifyUpdate { arc, before, after } => {
                write!(f, "UPDATE {arc} {before}->{after}")
            }
            TraceEvent::Restart { count } => write!(f, "RESTART {count}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineOptions {
    /// Reduce situational arcs once all their provokers are observed.
    pub reduction: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { reduction: true }
    }
}

/// Whether propagation ran to quiescence or must restart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Restart,
}

/// A neighbour reachable by extending the current trail by one active step.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Step {
    target: NodeId,
    /// Observed head-to-head node crossed on the way, if any.
    via: Option<NodeId>,
    link: Sign,
}

/// Per-run state. Owns its copy of the network so situational signs can be
/// updated and reduced without touching the caller's network.
#[derive(Debug, Clone)]
pub struct InferenceState {
    network: QpnNetwork,
    evidence: EvidenceState,
    node_signs: BTreeMap<NodeId, Sign>,
    restart_count: usize,
    trace: Vec<TraceEvent>,
    updated: BTreeSet<Arc>,
}

impl InferenceState {
    pub fn new(network: QpnNetwork, evidence: EvidenceState) -> InferenceState {
        let node_signs = network.nodes().map(|n| (n.clone(), Sign::Zero)).collect();
        InferenceState {
            network,
            evidence,
            node_signs,
            restart_count: 0,
            trace: Vec::new(),
            updated: BTreeSet::new(),
        }
    }

    pub fn network(&self) -> &QpnNetwork {
        &self.network
    }

    pub fn evidence(&self) -> &EvidenceState {
        &self.evidence
    }

    pub fn node_sign(&self, node: &NodeId) -> Sign {
        self.node_signs.get(node).copied().unwrap_or(Sign::Zero)
    }

    pub fn node_signs(&self) -> &BTreeMap<NodeId, Sign> {
        &self.node_signs
    }

    pub fn restart_count(&self) -> usize {
        self.restart_count
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn reset_signs(&mut self) {
        for s in self.node_signs.values_mut() {
            *s = Sign::Zero;
        }
    }

    /// Reduces every situational arc whose provokers are all among the old and
    /// new observations.
    pub fn fix_signs(&mut self) -> Result<(), ModelError> {
        let observations = self.evidence.all();
        for arc in self.network.situational_arcs() {
            if let Some(sign) = try_reduce(&self.network, &arc, &observations)? {
                if let Influence::Situational(sit) = self.network.influence_mut(&arc)? {
                    sit.reduced = Some(sign);
                }
                self.trace.push(TraceEvent::Reduce { arc, sign });
            }
        }
        Ok(())
    }

    fn steps(&self, trail: &[NodeId]) -> Vec<Step> {
        let Some(to) = trail.last() else {
            return Vec::new();
        };
        let prev = trail.len().checked_sub(2).map(|i| &trail[i]);
        let arrived_from_parent = prev.is_some_and(|p| self.network.has_arc(p, to));
        let on_trail = |n: &NodeId| trail.contains(n);

        let mut steps = Vec::new();
        for v in self.network.neighbours(to) {
            if on_trail(&v) || self.evidence.is_observed(&v) {
                continue;
            }
            let arc = if self.network.has_arc(&v, to) {
                // v -> to <- prev is head-to-head at `to`. An observed
                // descendant opens it; the induced influence is unsigned.
                if arrived_from_parent {
                    if self.has_observed_descendant(to) {
                        steps.push(Step {
                            target: v,
                            via: None,
                            link: Sign::Ambiguous,
                        });
                    }
                    continue;
                }
                Arc {
                    from: v.clone(),
                    to: to.clone(),
                }
            } else {
                Arc {
                    from: to.clone(),
                    to: v.clone(),
                }
            };
            let link = self
                .network
                .effective_link_sign(&arc)
                .unwrap_or(Sign::Ambiguous);
            steps.push(Step {
                target: v,
                via: None,
                link,
            });
        }

        // An observed child unblocks the head-to-head trail to its other
        // parents. No product synergies are modelled, so the induced
        // influence is signed '?'.
        for h in self.network.children(to) {
            if on_trail(&h) || !self.evidence.is_observed(&h) {
                continue;
            }
            for v in self.network.parents(&h) {
                if &v == to || on_trail(&v) || self.evidence.is_observed(&v) {
                    continue;
                }
                steps.push(Step {
                    target: v,
                    via: Some(h.clone()),
                    link: Sign::Ambiguous,
                });
            }
        }

        steps.sort_by(|a, b| (&a.target, &a.via).cmp(&(&b.target, &b.via)));
        steps
    }

    fn has_observed_descendant(&self, node: &NodeId) -> bool {
        let mut stack: Vec<NodeId> = self.network.children(node).into_iter().collect();
        let mut seen = BTreeSet::new();
        while let Some(n) = stack.pop() {
            if !seen.insert(n.clone()) {
                continue;
            }
            if self.evidence.is_observed(&n) {
                return true;
            }
            stack.extend(self.network.children(&n));
        }
        false
    }

    /// Neighbours of `to` that may receive a message when `trail` (which ends
    /// at `to`) is extended by one step, in lexicographic order.
    ///
    /// A head-to-head node on the trail must be observed, or have an observed
    /// descendant, for the trail to continue through it; observed nodes never
    /// receive messages.
    pub fn eligible_neighbours(&self, to: &NodeId, trail: &[NodeId]) -> Vec<NodeId> {
        let mut path = trail.to_vec();
        if path.last() != Some(to) {
            path.push(to.clone());
        }
        let mut out: Vec<NodeId> = self.steps(&path).into_iter().map(|s| s.target).collect();
        out.dedup();
        out
    }

    /// Combines `message` into the sign of `to` and passes the change on.
    /// `trail` holds the nodes visited before `to`, in order.
    pub fn propagate(&mut self, trail: &[NodeId], to: &NodeId, message: Sign) -> Flow {
        let old = self.node_sign(to);
        let new = old.sum(message);
        if new == old {
            return Flow::Continue;
        }
        self.node_signs.insert(to.clone(), new);
        self.trace.push(TraceEvent::NodeUpdate {
            node: to.clone(),
            old,
            message,
            new,
        });

        let mut path = trail.to_vec();
        path.push(to.clone());

        if self.determine_effect_on(to) == Flow::Restart {
            return Flow::Restart;
        }

        for step in self.steps(&path) {
            let message = self.node_sign(to).product(step.link);
            let current = self.node_sign(&step.target);
            if current == current.sum(message) {
                continue;
            }
            self.trace.push(TraceEvent::Message {
                from: to.clone(),
                to: step.target.clone(),
                sign: message,
            });
            let mut next = path.clone();
            if let Some(h) = &step.via {
                next.push(h.clone());
            }
            if self.propagate(&next, &step.target, message) == Flow::Restart {
                return Flow::Restart;
            }
        }
        Flow::Continue
    }

    /// Re-verifies the situational arcs sharing a child with `node` after its
    /// sign changed. Any update is written into the run's network and signals
    /// a restart.
    ///
    /// Every co-parent's current sign takes part in the check, so the update
    /// is the full multi-parent rule, not only the term for `node`.
    pub fn determine_effect_on(&mut self, node: &NodeId) -> Flow {
        if !self.network.situational_co_parents().contains(node) {
            return Flow::Continue;
        }
        let mut changed = false;
        for arc in self.network.situational_arcs_around(node) {
            let Ok(Influence::Situational(sit)) = self.network.influence(&arc) else {
                continue;
            };
            let before = sit.current;
            let co_parents = self.network.co_parents(&arc).unwrap_or_default();
            let effects: Vec<(Sign, Sign)> = co_parents
                .iter()
                .map(|c| {
                    (
                        self.node_sign(c),
                        self.network.synergy_or_ambiguous(&arc.from, c, &arc.to),
                    )
                })
                .collect();
            let verified = verify_update(before, &effects);
            if verified == before {
                self.trace.push(TraceEvent::VerifyKeep {
                    arc,
                    current: before,
                });
                continue;
            }
            // A zero sign could otherwise move to +/- and later to '?'; widening
            // straight to '?' keeps every arc to a single update.
            let after = if before == Sign::Zero {
                Sign::Ambiguous
            } else {
                verified
            };
            debug_assert!(!self.updated.contains(&arc), "second update of {arc}");
            if let Ok(Influence::Situational(sit)) = self.network.influence_mut(&arc) {
                sit.current = after;
            }
            self.updated.insert(arc.clone());
            self.trace
                .push(TraceEvent::VerifyUpdate { arc, before, after });
            changed = true;
        }
        if changed {
            Flow::Restart
        } else {
            Flow::Continue
        }
    }
}

/// `δ ⊕ (⊕_i sign[C_i] ⊗ δ_i)` for the co-parents `C_i` of a situational arc,
/// given as `(node sign, synergy sign)` pairs.
pub fn verify_update(current: Sign, co_parent_effects: &[(Sign, Sign)]) -> Sign {
    current.sum(sum_all(
        co_parent_effects
            .iter()
            .map(|(node, synergy)| node.product(*synergy)),
    ))
}

/// Fixed sign for a situational arc once every provoker is observed:
/// `⊕_j (evidence[P_j] ⊗ δ_j)` with `δ_j` the synergy of `{from, P_j}` on `to`.
/// Returns `None` while some provoker is unobserved.
pub fn try_reduce(
    net: &QpnNetwork,
    arc: &Arc,
    observations: &BTreeMap<NodeId, Sign>,
) -> Result<Option<Sign>, ModelError> {
    match net.influence(arc)? {
        Influence::Regular(_) => return Err(ModelError::NotSituational(arc.clone())),
        Influence::Situational(sit) if sit.reduced.is_some() => {
            return Err(ModelError::AlreadyReduced(arc.clone()))
        }
        Influence::Situational(_) => {}
    }
    let provokers = net.provokers_of(arc)?;
    let mut terms = Vec::with_capacity(provokers.len());
    for p in &provokers {
        let Some(evidence) = observations.get(p) else {
            return Ok(None);
        };
        terms.push(evidence.product(net.synergy_or_ambiguous(&arc.from, p, &arc.to)));
    }
    Ok(Some(sum_all(terms)))
}

/// Outcome of processing one observation.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub observation: (NodeId, Sign),
    /// Direction of change of every node occasioned by this observation.
    /// Previously observed nodes do not change and report `0`.
    pub node_signs: BTreeMap<NodeId, Sign>,
    /// The network after reductions and situational-sign updates.
    pub network: QpnNetwork,
    pub trace: Vec<TraceEvent>,
    pub restart_count: usize,
    /// Unreduced situational arcs when the step began.
    pub situational_arcs: usize,
}

impl StepReport {
    pub fn sign(&self, node: &str) -> Sign {
        self.node_signs
            .get(&NodeId::new(node))
            .copied()
            .unwrap_or(Sign::Zero)
    }

    pub fn reductions(&self) -> impl Iterator<Item = (&Arc, Sign)> {
        self.trace.iter().filter_map(|e| match e {
            TraceEvent::Reduce { arc, sign } => Some((arc, *sign)),
            _ => None,
        })
    }

    pub fn updates(&self) -> impl Iterator<Item = (&Arc, Sign, Sign)> {
        self.trace.iter().filter_map(|e| match e {
            TraceEvent::VerifyUpdate { arc, before, after } => Some((arc, *before, *after)),
            _ => None,
        })
    }
}

/// Runs observations through a network.
#[derive(Debug, Clone, Copy, Default)]
pub struct Engine {
    pub options: EngineOptions,
}

impl Engine {
    pub fn new(options: EngineOptions) -> Engine {
        Engine { options }
    }

    pub fn process_observation(
        &self,
        net: &QpnNetwork,
        old_observations: &BTreeMap<NodeId, Sign>,
        observation: (NodeId, Sign),
    ) -> Result<StepReport, InferenceError> {
        let report = net.validate();
        if !report.is_valid() {
            return Err(InferenceError::InvalidNetwork(report));
        }
        let (node, sign) = observation;
        for n in old_observations.keys().chain(std::iter::once(&node)) {
            if !net.contains(n) {
                return Err(InferenceError::UnknownNode(n.clone()));
            }
        }
        for (n, s) in old_observations
            .iter()
            .chain(std::iter::once((&node, &sign)))
        {
            if !s.is_strict() {
                return Err(InferenceError::InvalidEvidenceSign {
                    node: n.clone(),
                    sign: *s,
                });
            }
        }
        if old_observations.contains_key(&node) {
            return Err(InferenceError::AlreadyObserved(node));
        }

        let evidence = EvidenceState {
            old_observations: old_observations.clone(),
            new_observation: Some((node.clone(), sign)),
        };
        let situational_arcs = net.situational_arcs().len();
        let mut state = InferenceState::new(net.clone(), evidence);
        if self.options.reduction {
            state.fix_signs()?;
        }
        loop {
            state.reset_signs();
            match state.propagate(&[], &node, sign) {
                Flow::Continue => break,
                Flow::Restart => {
                    state.restart_count += 1;
                    let count = state.restart_count;
                    state.trace.push(TraceEvent::Restart { count });
                }
            }
        }

        Ok(StepReport {
            observation: (node, sign),
            node_signs: state.node_signs,
            network: state.network,
            trace: state.trace,
            restart_count: state.restart_count,
            situational_arcs,
        })
    }

    /// Applies observations in order, threading the updated network and the
    /// accumulated evidence from one step to the next.
    pub fn run_sequence(
        &self,
        net: &QpnNetwork,
        observations: &[(NodeId, Sign)],
    ) -> Result<Vec<StepReport>, InferenceError> {
        let mut seen = BTreeSet::new();
        for (n, _) in observations {
            if !seen.insert(n) {
                return Err(InferenceError::AlreadyObserved(n.clone()));
            }
        }
        let mut network = net.clone();
        let mut old = BTreeMap::new();
        let mut reports = Vec::with_capacity(observations.len());
        for (node, sign) in observations {
            let report = self.process_observation(&network, &old, (node.clone(), *sign))?;
            network = report.network.clone();
            old.insert(node.clone(), *sign);
            reports.push(report);
        }
        Ok(reports)
    }
}

/// [`Engine::process_observation`] with default options.
pub fn process_observation(
    net: &QpnNetwork,
    old_observations: &BTreeMap<NodeId, Sign>,
    observation: (NodeId, Sign),
) -> Result<StepReport, InferenceError> {
    Engine::default().process_observation(net, old_observations, observation)
}

/// [`Engine::run_sequence`] with default options.
pub fn run_sequence(
    net: &QpnNetwork,
    observations: &[(NodeId, Sign)],
) -> Result<Vec<StepReport>, InferenceError> {
    Engine::default().run_sequence(net, observations)
}
