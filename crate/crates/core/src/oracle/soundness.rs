//! Checks propagated node signs against exact posterior movements.

use std::fmt;

use crate::engine::StepReport;
use crate::network::NodeId;
use crate::oracle::{Assignment, BinaryBayesNet, OracleError, TOLERANCE};
use crate::sign::Sign;

/// A node whose propagated sign is contradicted by the exact posteriors.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Zero-based index of the observation step.
    pub step: usize,
    pub node: NodeId,
    pub claimed: Sign,
    /// Marginal of the node's true value before the step's observation.
    pub prior: f64,
    /// Marginal after it.
    pub posterior: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "step {} node {}: claimed {} but Pr moved {:.12} -> {:.12}",
            self.step + 1,
            self.node,
            self.claimed,
            self.prior,
            self.posterior
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SoundnessReport {
    /// Node signs compared, over all steps.
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl SoundnessReport {
    pub fn is_sound(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SoundnessReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "oracle: {} node signs checked, {} violations",
            self.checked,
            self.violations.len()
        )?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}

/// Compares each step's node signs with the exact change in every node's
/// marginal between the evidence before and after that step. `+` requires
/// the marginal not to fall, `-` not to rise, `0` to stay put; `?` always
/// passes.
pub fn soundness_report(
    bn: &BinaryBayesNet,
    observations: &[(NodeId, bool)],
    outputs: &[StepReport],
) -> Result<SoundnessReport, OracleError> {
    if observations.len() != outputs.len() {
        return Err(OracleError::Mismatch(format!(
            "{} observations but {} engine steps",
            observations.len(),
            outputs.len()
        )));
    }
    let joint = bn.joint_table()?;
    let mut report = SoundnessReport::default();
    let mut before = Assignment::new();
    for (step, ((node, value), output)) in observations.iter().zip(outputs).enumerate() {
        if output.observation != (node.clone(), Sign::from_bool(*value)) {
            return Err(OracleError::Mismatch(format!(
                "step {} observed {}={} but the engine processed {}={}",
                step + 1,
                node,
                value,
                output.observation.0,
                output.observation.1
            )));
        }
        let mut after = before.clone();
        after.insert(node.clone(), *value);
        for n in bn.nodes() {
            let claimed = *output
                .node_signs
                .get(n)
                .ok_or_else(|| OracleError::Mismatch(format!("engine reports no sign for {n}")))?;
            let prior = joint.query((n, true), &before)?;
            let posterior = joint.query((n, true), &after)?;
            report.checked += 1;
            if !claimed.admits(Sign::of_difference(posterior - prior, TOLERANCE)) {
                report.violations.push(Violation {
                    step,
                    node: n.clone(),
                    claimed,
                    prior,
                    posterior,
                });
            }
        }
        before = after;
    }
    Ok(report)
}
