//! Exact solvers: Held-Karp dynamic programs for the single-robot variants
//! and a set-partitioning branch-and-bound for the multi-robot ones.

mod gtsp;
mod held_karp;
mod partition;

use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::routing::{build_distance_matrix, ObjectiveValue, ProblemInstance, Solution, VariantKind};

pub use gtsp::{solve_gtsp, MAX_GTSP_CLUSTERS};
pub use held_karp::{solve_btsp, solve_ktsp, solve_tsp, MAX_SINGLE_ROBOT_N};
pub use partition::{solve_multirobot, solve_multirobot_with, MAX_MULTI_ROBOT_N};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertificateStatus {
    ProvenOptimal,
    /// The time budget ran out; `value` is the best incumbent and
    /// `lower_bound` the best proven bound.
    BoundOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalCertificate {
    pub value: ObjectiveValue,
    pub solution: Solution,
    pub status: CertificateStatus,
    pub lower_bound: f64,
    /// Wall-clock seconds.
    pub solve_time: f64,
}

impl OptimalCertificate {
    pub fn is_proven(&self) -> bool {
        self.status == CertificateStatus::ProvenOptimal
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("instance has {n} locations but the exact {what} solver handles at most {limit}; use the heuristic module instead")]
    TooLarge { what: &'static str, n: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("instance has no feasible solution: {0}")]
    Infeasible(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactOptions {
    /// Wall-clock budget for the multi-robot search.
    pub time_budget: Duration,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            time_budget: Duration::from_secs(600),
        }
    }
}

/// Dispatches on the instance's variant.
pub fn solve_instance(instance: &ProblemInstance, options: &ExactOptions) -> Result<OptimalCertificate, ExactError> {
    let dm = build_distance_matrix(instance);
    let depot = instance.depot();
    match instance.kind() {
        VariantKind::Tsp => solve_tsp(&dm, depot),
        VariantKind::Btsp => solve_btsp(&dm, depot),
        VariantKind::Ktsp => solve_ktsp(&dm, depot, instance.variant.k.unwrap_or(0)),
        VariantKind::Gtsp => solve_gtsp(&dm, depot, instance.variant.clusters.as_deref().unwrap_or(&[])),
        _ => solve_multirobot_with(instance, options),
    }
}
