//! JSON renderings of library results.

use nlt_core::diffusion::MonteCarloEstimate;
use nlt_core::optimize::Solution;
use nlt_core::verify::{
    witness_violation, Counterexample, EquivalenceReport, HardnessReport, HardnessSweep, SubmodularityReport,
    SweepReport, Violation, ViolationKind, MIN_VIOLATION,
};
use nlt_core::{InfoNetwork, NodeId};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::io::{network_json, IoError, NetworkFile};

/// Tolerance for reproducing a serialized witness.
pub const REVERIFY_TOLERANCE: f64 = 1e-9;

fn labels(net: &InfoNetwork, nodes: &[NodeId]) -> Vec<String> {
    nodes.iter().map(|&v| net.label(v).to_string()).collect()
}

pub fn estimate_json(e: &MonteCarloEstimate, horizon: usize) -> Value {
    json!({
        "mean": e.mean,
        "stderr": e.stderr,
        "samples": e.samples,
        "seed": e.seed,
        "horizon": horizon,
    })
}

pub fn solution_json(net: &InfoNetwork, s: &Solution) -> Value {
    json!({
        "k": s.k,
        "k_hat": s.k_hat,
        "transient": s.transient_labels(net),
        "permanent": s.permanent_labels(net),
        "value": s.value,
        "evaluator": s.evaluator,
        "evaluations": s.evaluations,
    })
}

fn violation_json(net: &InfoNetwork, v: &Violation) -> Value {
    json!({
        "kind": match v.kind {
            ViolationKind::Submodularity => "submodularity",
            ViolationKind::Monotonicity => "monotonicity",
        },
        "argument": v.argument.tag(),
        "context": labels(net, &v.context),
        "small": labels(net, &v.small),
        "large": labels(net, &v.large),
        "element": net.label(v.element),
        "gap_small": v.gap_small,
        "gap_large": v.gap_large,
        "magnitude": v.magnitude,
    })
}

pub fn submodularity_json(net: &InfoNetwork, r: &SubmodularityReport) -> Value {
    json!({
        "nodes": r.nodes,
        "edges": r.edges,
        "horizon": r.horizon,
        "evaluator": r.evaluator,
        "scope": r.scope.tag(),
        "tolerance": r.tolerance,
        "sigma_multiplier": r.sigma_multiplier,
        "exhaustive": r.exhaustive,
        "triples": r.triples,
        "monotone_checks": r.monotone_checks,
        "violation_count": r.violation_count,
        "max_violation": r.max_violation,
        "violations": r.violations.iter().map(|v| violation_json(net, v)).collect::<Vec<_>>(),
        "passed": r.passed(),
    })
}

pub fn sweep_json(r: &SweepReport) -> Value {
    json!({
        "instances": r.instances,
        "max_nodes": r.max_nodes,
        "max_horizon": r.max_horizon,
        "seed": r.seed,
        "evaluator": "exact-dag",
        "tolerance": nlt_core::verify::EXACT_TOLERANCE,
        "triples": r.triples,
        "monotone_checks": r.monotone_checks,
        "violation_count": r.violation_count,
        "max_violation": r.max_violation,
        "failed_instances": r.failures.iter().map(|(i, _)| *i).collect::<Vec<_>>(),
        "passed": r.passed(),
    })
}

pub fn equivalence_json(r: &EquivalenceReport) -> Value {
    json!({
        "horizon": r.horizon,
        "samples": r.samples,
        "seed": r.seed,
        "acyclic": r.acyclic,
        "exact_tolerance": r.exact_tolerance,
        "sigma_multiplier": r.sigma_multiplier,
        "checks": r.checks.iter().map(|c| json!({
            "name": c.name,
            "passed": c.passed,
            "comparisons": c.comparisons,
            "max_deviation": c.max_deviation,
            "max_z": c.max_z,
            "samples": c.samples,
            "retried": c.retried,
        })).collect::<Vec<_>>(),
        "passed": r.passed(),
    })
}

pub fn hardness_json(graph_labels: &[String], r: &HardnessReport) -> Value {
    json!({
        "vertices": r.vertices,
        "edges": r.edges,
        "k": r.k,
        "cover": r.cover.as_ref().map(|c| c.iter().map(|&i| graph_labels[i].clone()).collect::<Vec<_>>()),
        "seeds": r.seeds.as_ref().map(|s| labels(&r.network, s)),
        "target": r.target,
        "best_value": r.best_value,
        "consistent": r.consistent,
    })
}

pub fn hardness_sweep_json(r: &HardnessSweep) -> Value {
    json!({
        "max_vertices": r.max_vertices,
        "graphs": r.graphs,
        "instances": r.instances,
        "failures": r.failures.iter().map(|(g, k)| json!({
            "vertices": g.vertex_count(),
            "edges": g.edges(),
            "k": k,
        })).collect::<Vec<_>>(),
        "passed": r.passed(),
    })
}

/// The amplified network in the network format, plus a `witness` block.
pub fn counterexample_json(ce: &Counterexample) -> Value {
    let net = &ce.network;
    let mut doc = network_json(net);
    doc["witness"] = json!({
        "family": ce.family.tag(),
        "oracle": ce.oracle,
        "target": net.label(ce.target),
        "horizon": ce.amplified_horizon,
        "small": labels(net, &ce.small),
        "large": labels(net, &ce.large),
        "element": net.label(ce.element),
        "violation": ce.violation,
        "leaves": ce.leaves,
        "base_violation": ce.base_violation,
        "indicator": {
            "horizon": ce.horizon,
            "violation": ce.indicator_violation,
            "gaps": ce.gaps.iter().map(|g| json!({
                "t": g.time,
                "gain_small": g.gain_small,
                "gain_large": g.gain_large,
            })).collect::<Vec<_>>(),
        },
        "base_network": network_json(&ce.base),
        "networks_examined": ce.networks_examined,
    });
    doc
}

#[derive(Debug, Deserialize)]
struct WitnessBlock {
    horizon: usize,
    small: Vec<String>,
    large: Vec<String>,
    element: String,
    violation: f64,
}

#[derive(Debug, Deserialize)]
struct WitnessFile {
    #[serde(flatten)]
    network: NetworkFile,
    witness: WitnessBlock,
}

/// Result of re-evaluating a serialized counterexample.
#[derive(Debug, Clone, PartialEq)]
pub struct Reverification {
    pub recorded: f64,
    pub measured: f64,
    pub horizon: usize,
}

impl Reverification {
    pub fn passed(&self) -> bool {
        (self.measured - self.recorded).abs() <= REVERIFY_TOLERANCE && self.measured > MIN_VIOLATION
    }

    pub fn to_json(&self) -> Value {
        json!({
            "recorded": self.recorded,
            "measured": self.measured,
            "horizon": self.horizon,
            "tolerance": REVERIFY_TOLERANCE,
            "passed": self.passed(),
        })
    }
}

/// Rebuilds the network from a counterexample document and recomputes the
/// witness's second difference with the cell oracle.
pub fn reverify_counterexample(text: &str, cell_budget: u64) -> Result<Reverification, IoError> {
    let file: WitnessFile = serde_json::from_str(text).map_err(|e| IoError::Parse {
        what: "counterexample JSON".into(),
        message: e.to_string(),
    })?;
    let net = file.network.build()?;
    let resolve = |ls: &[String]| -> Result<Vec<NodeId>, IoError> {
        ls.iter().map(|l| net.resolve(l).map_err(IoError::Network)).collect()
    };
    let w = &file.witness;
    let measured = witness_violation(
        &net,
        w.horizon,
        &resolve(&w.small)?,
        &resolve(&w.large)?,
        net.resolve(&w.element).map_err(IoError::Network)?,
        cell_budget,
    )
    .map_err(IoError::Network)?;
    Ok(Reverification {
        recorded: w.violation,
        measured,
        horizon: w.horizon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nlt_core::verify::{search_counterexample, Family, SearchParams};

    #[test]
    fn witness_survives_serialization() {
        let ce = search_counterexample(&SearchParams::new(Family::SelfLoopOnly)).unwrap();
        let text = serde_json::to_string_pretty(&counterexample_json(&ce)).unwrap();
        let r = reverify_counterexample(&text, 1_000_000).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.measured, ce.violation);
        // The document also reads as a plain network.
        let net = crate::io::parse_network_json(&text).unwrap();
        assert_eq!(net.node_count(), ce.network.node_count());
    }

    #[test]
    fn tampered_witness_fails() {
        let ce = search_counterexample(&SearchParams::new(Family::GeneralCycles)).unwrap();
        let mut doc = counterexample_json(&ce);
        doc["witness"]["violation"] = json!(ce.violation + 1e-3);
        let r = reverify_counterexample(&doc.to_string(), 1_000_000).unwrap();
        assert!(!r.passed());
    }
}
