//! Static inspection of generated programs: optimization-library imports
//! and a keyword guess at the algorithm family.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LibraryTag {
    Gurobi,
    Pulp,
    OrTools,
    Pyomo,
    Mip,
    Docplex,
}

impl LibraryTag {
    pub const ALL: [LibraryTag; 6] = [
        LibraryTag::Gurobi,
        LibraryTag::Pulp,
        LibraryTag::OrTools,
        LibraryTag::Pyomo,
        LibraryTag::Mip,
        LibraryTag::Docplex,
    ];

    pub fn display_name(self) -> &'static str {
        match self {
            LibraryTag::Gurobi => "Gurobi",
            LibraryTag::Pulp => "PuLP",
            LibraryTag::OrTools => "OR-Tools",
            LibraryTag::Pyomo => "Pyomo",
            LibraryTag::Mip => "MIP",
            LibraryTag::Docplex => "Docplex",
        }
    }

    fn from_module(root: &str) -> Option<Self> {
        Some(match root {
            "gurobipy" | "gurobi" => LibraryTag::Gurobi,
            "pulp" => LibraryTag::Pulp,
            "ortools" => LibraryTag::OrTools,
            "pyomo" => LibraryTag::Pyomo,
            "mip" => LibraryTag::Mip,
            "docplex" => LibraryTag::Docplex,
            _ => return None,
        })
    }
}

impl fmt::Display for LibraryTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// Top-level module names imported by `source`.
pub fn imported_modules(source: &str) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for line in source.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if let Some(rest) = line.strip_prefix("import ") {
            for item in rest.split(',') {
                if let Some(name) = item.split_whitespace().next() {
                    out.insert(name.split('.').next().unwrap_or(name).to_string());
                }
            }
        } else if let Some(rest) = line.strip_prefix("from ") {
            if let Some(name) = rest.split_whitespace().next() {
                if !name.starts_with('.') {
                    out.insert(name.split('.').next().unwrap_or(name).to_string());
                }
            }
        }
    }
    out
}

pub fn scan_imports(source: &str) -> BTreeSet<LibraryTag> {
    imported_modules(source)
        .iter()
        .filter_map(|m| LibraryTag::from_module(m))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ApproachTag {
    Exact,
    Heuristic,
    Approximation,
    Unknown,
}

/// Keyword lists per approach plus per-program overrides keyed by the
/// SHA-256 of the source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ApproachRules {
    pub exact: Vec<String>,
    pub heuristic: Vec<String>,
    pub approximation: Vec<String>,
    pub overrides: BTreeMap<String, ApproachTag>,
}

impl Default for ApproachRules {
    fn default() -> Self {
        let v = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self {
            exact: v(&[
                "held-karp",
                "held_karp",
                "heldkarp",
                "permutations(",
                "brute force",
                "brute_force",
                "branch and bound",
                "branch_and_bound",
                "dynamic programming",
                "bitmask",
                "1 << n",
                "lpsolve",
                "milp",
                "linear_solver",
                "cp_model",
            ]),
            heuristic: v(&[
                "nearest neighbor",
                "nearest_neighbor",
                "nearest neighbour",
                "2-opt",
                "two_opt",
                "2opt",
                "simulated annealing",
                "genetic",
                "greedy",
                "savings",
                "local search",
                "local_search",
                "tabu",
                "pywrapcp",
                "routing_enums",
                "random.shuffle",
            ]),
            approximation: v(&["christofides", "minimum spanning tree", "minimum_spanning_tree", "approximation"]),
            overrides: BTreeMap::new(),
        }
    }
}

impl ApproachRules {
    /// Default keywords with overrides from a JSON object `{sha256: tag}`.
    pub fn with_overrides_file(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let overrides = serde_json::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        Ok(Self {
            overrides,
            ..Self::default()
        })
    }
}

pub fn source_digest(source: &str) -> String {
    hex::encode(Sha256::digest(source.as_bytes()))
}

/// Mathematical-programming imports count as exact. Otherwise the class
/// with the most keyword hits wins; ties and no hits give `Unknown`.
pub fn classify_approach(source: &str, rules: &ApproachRules) -> ApproachTag {
    if let Some(&tag) = rules.overrides.get(&source_digest(source)) {
        return tag;
    }
    let libs = scan_imports(source);
    let routing_solver = source.contains("pywrapcp") || source.contains("routing_enums");
    if libs.iter().any(|&l| l != LibraryTag::OrTools) || (libs.contains(&LibraryTag::OrTools) && !routing_solver) {
        return ApproachTag::Exact;
    }
    let lower = source.to_lowercase();
    let hits = |words: &[String]| words.iter().filter(|w| lower.contains(&w.to_lowercase())).count();
    let scores = [
        (ApproachTag::Exact, hits(&rules.exact)),
        (ApproachTag::Heuristic, hits(&rules.heuristic)),
        (ApproachTag::Approximation, hits(&rules.approximation)),
    ];
    let best = scores.iter().map(|s| s.1).max().unwrap_or(0);
    let mut winners = scores.iter().filter(|s| s.1 == best);
    match (best, winners.next(), winners.next()) {
        (0, _, _) | (_, _, Some(_)) => ApproachTag::Unknown,
        (_, Some(&(tag, _)), None) => tag,
        _ => ApproachTag::Unknown,
    }
}
