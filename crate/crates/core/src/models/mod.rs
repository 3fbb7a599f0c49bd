//! Concrete Gibbs families: brute-force builders, bounds, Glauber-dynamics
//! oracles, uniqueness utilities and the random cluster machinery.

pub mod glauber;
pub mod graph;
pub mod ising;
pub mod matchings;
pub mod random_cluster;
pub mod two_spin;
pub mod uniqueness;

pub use glauber::{oracle_from_glauber, GlauberOracle, SpinModelSpec};
pub use graph::{Graph, UnionFind};
pub use ising::{enumerate_ising, IsingSpec};
pub use matchings::{enumerate_matchings, matching_bounds};
pub use random_cluster::{RandomClusterSpec, RcOverrides};
pub use two_spin::{enumerate_two_spin, two_spin_bounds, Interval, TwoSpinSpec};
pub use uniqueness::{lambda_c, uniqueness_check, Threshold};

use crate::bounds::Bounds;
use crate::error::{Error, Result};
use crate::model::GrossGibbsModel;

/// A graph together with a model on it, at its target activity.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub graph: Graph,
    pub model: SpinModelSpec,
}

impl Instance {
    pub fn new(graph: Graph, model: SpinModelSpec) -> Result<Self> {
        if let SpinModelSpec::Ising { spec } = &model {
            IsingSpec::new(&graph, spec.gamma.clone(), spec.lambda.clone(), spec.delta)?;
        }
        Ok(Instance { graph, model })
    }

    /// The annealing histogram for this instance.
    pub fn gross_model(&self) -> Result<GrossGibbsModel> {
        match &self.model {
            SpinModelSpec::TwoSpin { spec, interval } => {
                enumerate_two_spin(&self.graph, spec, *interval == Interval::Second)
            }
            SpinModelSpec::Matchings { .. } => enumerate_matchings(&self.graph),
            SpinModelSpec::Ising { spec } => Ok(enumerate_ising(&self.graph, spec)?.0),
        }
    }

    /// The theorem-level `(q, h, β_min, β_max)` for this instance.
    pub fn bounds(&self) -> Result<Bounds> {
        match &self.model {
            SpinModelSpec::TwoSpin { spec, interval } => two_spin_bounds(&self.graph, spec, spec.lambda, *interval),
            SpinModelSpec::Matchings { lambda } => matching_bounds(&self.graph, *lambda),
            SpinModelSpec::Ising { spec } => Ok(enumerate_ising(&self.graph, spec)?.1),
        }
    }

    /// `ln Z` of the original model given `ln Q` and `ln Z(-∞) = ln c₀`.
    pub fn log_partition_from_log_q(&self, log_q: f64, log_c0: f64) -> f64 {
        match &self.model {
            SpinModelSpec::TwoSpin {
                spec,
                interval: Interval::Second,
            } => log_q + log_c0 + self.graph.n() as f64 * spec.lambda.ln(),
            _ => log_q + log_c0,
        }
    }

    /// `ln Z` of the original model by direct configuration sum.
    pub fn exact_log_partition(&self) -> Result<f64> {
        match &self.model {
            SpinModelSpec::TwoSpin { spec, .. } => two_spin::two_spin_log_partition(&self.graph, spec),
            SpinModelSpec::Matchings { lambda } => {
                let c = matchings::matching_counts(&self.graph)?;
                let terms: Vec<f64> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c > 0)
                    .map(|(s, &c)| (c as f64).ln() + s as f64 * lambda.ln())
                    .collect();
                Ok(crate::numeric::log_sum_exp(&terms))
            }
            SpinModelSpec::Ising { spec } => ising::ising_log_partition(&self.graph, spec),
        }
    }
}

/// Names accepted by [`named_instance`].
pub const NAMED_INSTANCES: &[&str] = &[
    "k2_hardcore",
    "p4_hardcore",
    "c5_two_spin",
    "triangle_matchings",
    "p4_matchings",
    "k2_ising",
    "p3_ising",
];

/// Small built-in instances used by examples and tests.
pub fn named_instance(name: &str) -> Result<Instance> {
    let (graph, model) = match name {
        "k2_hardcore" => (Graph::complete(2), hardcore(1.0)?),
        "p4_hardcore" => (Graph::path(4), hardcore(1.0)?),
        "c5_two_spin" => (
            Graph::cycle(5)?,
            SpinModelSpec::TwoSpin {
                spec: TwoSpinSpec::new(0.2, 0.9, 1.5)?,
                interval: Interval::First,
            },
        ),
        "triangle_matchings" => (Graph::complete(3), SpinModelSpec::Matchings { lambda: 1.0 }),
        "p4_matchings" => (Graph::path(4), SpinModelSpec::Matchings { lambda: 1.0 }),
        "k2_ising" => {
            let g = Graph::complete(2);
            let spec = IsingSpec::uniform(&g, 2.0, 0.5, 0.5)?;
            (g, SpinModelSpec::Ising { spec })
        }
        "p3_ising" => {
            let g = Graph::path(3);
            let spec = IsingSpec::new(&g, vec![2.0, 3.0], vec![0.5, 0.25, 0.0], 0.5)?;
            (g, SpinModelSpec::Ising { spec })
        }
        other => {
            return Err(Error::param(format!(
                "unknown model {other:?}; known: {}",
                NAMED_INSTANCES.join(", ")
            )))
        }
    };
    Instance::new(graph, model)
}

fn hardcore(lambda: f64) -> Result<SpinModelSpec> {
    Ok(SpinModelSpec::TwoSpin {
        spec: TwoSpinSpec::hardcore(lambda)?,
        interval: Interval::First,
    })
}
