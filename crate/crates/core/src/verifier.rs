//! Ground-truth feasibility checking for all eight variants.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::routing::{ProblemInstance, Solution, VariantKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConstraintId {
    RouteCount,
    Endpoint,
    Coverage,
    DepotInterior,
    Capacity,
    EmptyRoute,
    UnknownId,
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConstraintId::RouteCount => "ROUTE_COUNT",
            ConstraintId::Endpoint => "ENDPOINT",
            ConstraintId::Coverage => "COVERAGE",
            ConstraintId::DepotInterior => "DEPOT_INTERIOR",
            ConstraintId::Capacity => "CAPACITY",
            ConstraintId::EmptyRoute => "EMPTY_ROUTE",
            ConstraintId::UnknownId => "UNKNOWN_ID",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: ConstraintId,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

impl VerdictReport {
    fn from_violations(violations: Vec<Violation>) -> Self {
        Self {
            feasible: violations.is_empty(),
            violations,
        }
    }

    pub fn has(&self, constraint: ConstraintId) -> bool {
        self.violations.iter().any(|v| v.constraint == constraint)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifierConfig {
    /// Every robot must visit at least one location.
    pub require_nonempty_routes: bool,
}

impl VerifierConfig {
    /// m-TSP, MinMax and MD m-TSP require nonempty tours; CVRP allows idle
    /// vehicles.
    pub fn for_variant(kind: VariantKind) -> Self {
        Self {
            require_nonempty_routes: matches!(
                kind,
                VariantKind::Mtsp | VariantKind::MinmaxMtsp | VariantKind::MdMtsp
            ),
        }
    }
}

pub fn check_feasible(instance: &ProblemInstance, solution: &Solution) -> VerdictReport {
    check_feasible_with(instance, solution, VerifierConfig::for_variant(instance.kind()))
}

/// Evaluates the full constraint set and reports every violated rule.
pub fn check_feasible_with(
    instance: &ProblemInstance,
    solution: &Solution,
    config: VerifierConfig,
) -> VerdictReport {
    let mut out = Vec::new();
    let mut violate = |constraint, detail: String| out.push(Violation { constraint, detail });
    let variant = &instance.variant;
    let n = instance.n();
    let kind = variant.kind;

    let expected = variant.route_count();
    if solution.routes.len() != expected {
        violate(
            ConstraintId::RouteCount,
            format!("expected {expected} route(s), found {}", solution.routes.len()),
        );
    }

    // visits per non-depot location
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for (r, route) in solution.routes.iter().enumerate() {
        let visits = &route.visits;
        for &id in visits {
            if id >= n {
                violate(
                    ConstraintId::UnknownId,
                    format!("route {r} visits unknown location {id}"),
                );
            }
        }
        let depot = variant.depot_of_robot(r);
        if visits.len() < 2 || visits[0] != depot || visits[visits.len() - 1] != depot {
            violate(
                ConstraintId::Endpoint,
                format!("route {r} must start and end at depot {depot}"),
            );
        }
        let interior: &[usize] = if visits.len() > 2 {
            &visits[1..visits.len() - 1]
        } else {
            &[]
        };
        for &id in interior.iter().filter(|&&id| id < n) {
            if variant.is_depot(id) {
                violate(
                    ConstraintId::DepotInterior,
                    format!("route {r} passes through depot {id} mid-route"),
                );
            } else {
                *counts.entry(id).or_default() += 1;
            }
        }
        let served: Vec<usize> = interior
            .iter()
            .copied()
            .filter(|&id| id < n && !variant.is_depot(id))
            .collect();
        if kind.is_multi_robot() && config.require_nonempty_routes && served.is_empty() {
            violate(ConstraintId::EmptyRoute, format!("route {r} visits no location"));
        }
        if let Some(q) = variant.capacity {
            let load: u64 = served.iter().map(|&id| instance.locations[id].demand as u64).sum();
            if load > q as u64 {
                violate(
                    ConstraintId::Capacity,
                    format!("route {r} serves demand {load} > capacity {q}"),
                );
            }
        }
    }

    for (&id, &c) in &counts {
        if c > 1 {
            violate(ConstraintId::Coverage, format!("location {id} visited {c} times"));
        }
    }

    match kind {
        VariantKind::Ktsp => {
            let k = variant.k.unwrap_or(n);
            // the depot counts toward k
            let visited = counts.len() + 1;
            if visited != k {
                violate(
                    ConstraintId::Coverage,
                    format!("expected exactly {k} locations including the depot, visited {visited}"),
                );
            }
        }
        VariantKind::Gtsp => {
            for (ci, cluster) in variant.clusters.iter().flatten().enumerate() {
                let hit = cluster.iter().filter(|id| counts.contains_key(id)).count();
                if hit != 1 {
                    violate(
                        ConstraintId::Coverage,
                        format!("cluster {ci} visited {hit} times, expected exactly once"),
                    );
                }
            }
        }
        _ => {
            for id in instance.customers() {
                if !counts.contains_key(&id) {
                    violate(ConstraintId::Coverage, format!("location {id} is not visited"));
                }
            }
        }
    }

    VerdictReport::from_violations(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance_io::{derive_variant_instance, generate_random_instance, parse_tsplib};
    use crate::routing::{Location, Metric, Route, VariantSpec};
    use proptest::prelude::*;

    fn square() -> ProblemInstance {
        let locations = vec![
            Location::new(0, 0.0, 0.0),
            Location::new(1, 0.0, 10.0),
            Location::new(2, 10.0, 10.0),
            Location::new(3, 10.0, 0.0),
        ];
        ProblemInstance::new(
            "square",
            VariantSpec::single(VariantKind::Tsp, 0),
            locations,
            Metric::ExactEuclidean,
            None,
        )
        .unwrap()
    }

    fn p_n21_k2() -> ProblemInstance {
        parse_tsplib(include_str!("../../../data/cvrplib/P-n21-k2.vrp")).unwrap()
    }

    #[test]
    fn square_tour_feasible() {
        let r = check_feasible(&square(), &Solution::single(vec![0, 1, 2, 3, 0]));
        assert!(r.feasible, "{r:?}");
        assert!(r.violations.is_empty());
    }

    #[test]
    fn cvrp_missing_location_two() {
        let inst = p_n21_k2();
        // every customer except 2, split into two capacity-feasible halves
        let mut a = vec![0];
        let mut b = vec![0];
        for c in inst.customers().into_iter().filter(|&c| c != 2) {
            if c <= 10 {
                a.push(c)
            } else {
                b.push(c)
            }
        }
        a.push(0);
        b.push(0);
        let r = check_feasible(&inst, &Solution::new(vec![a.into(), b.into()]));
        assert!(!r.feasible);
        assert!(r.has(ConstraintId::Coverage));
        assert!(r.violations.iter().any(|v| v.detail.contains("location 2 ")));
        assert!(!r.has(ConstraintId::Capacity));
    }

    #[test]
    fn cvrp_capacity_overflow() {
        let locs = vec![
            Location::new(0, 0.0, 0.0),
            Location { id: 1, x: 1.0, y: 0.0, demand: 6 },
            Location { id: 2, x: 2.0, y: 0.0, demand: 5 },
        ];
        let spec = VariantSpec {
            kind: VariantKind::Cvrp,
            k: None,
            clusters: None,
            num_robots: Some(1),
            capacity: Some(10),
            depot_ids: vec![0],
        };
        let inst = ProblemInstance::new("c", spec, locs, Metric::TsplibRounded, None).unwrap();
        let r = check_feasible(&inst, &Solution::single(vec![0, 1, 2, 0]));
        assert!(!r.feasible);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].constraint, ConstraintId::Capacity);
    }

    #[test]
    fn reports_every_violation() {
        let r = check_feasible(&square(), &Solution::single(vec![1, 1, 9, 0]));
        assert!(r.has(ConstraintId::Endpoint));
        assert!(r.has(ConstraintId::UnknownId));
        assert!(r.has(ConstraintId::Coverage));
    }

    #[test]
    fn repeated_visit_is_coverage_violation() {
        let r = check_feasible(&square(), &Solution::single(vec![0, 1, 2, 3, 1, 0]));
        assert!(!r.feasible);
        assert!(r.violations.iter().any(|v| v.detail.contains("visited 2 times")));
    }

    #[test]
    fn ktsp_counts_depot() {
        let inst = generate_random_instance(VariantKind::Ktsp, 10, 1).unwrap();
        let k = inst.variant.k.unwrap();
        let mut tour: Vec<usize> = (0..k).collect();
        tour.push(0);
        assert!(check_feasible(&inst, &Solution::single(tour.clone())).feasible);
        tour.insert(1, k);
        assert!(check_feasible(&inst, &Solution::single(tour)).has(ConstraintId::Coverage));
    }

    #[test]
    fn gtsp_one_per_cluster() {
        let inst = generate_random_instance(VariantKind::Gtsp, 10, 1).unwrap();
        let clusters = inst.variant.clusters.clone().unwrap();
        let mut tour = vec![0];
        tour.extend(clusters.iter().map(|c| c[0]));
        tour.push(0);
        assert!(check_feasible(&inst, &Solution::single(tour.clone())).feasible);
        tour.insert(1, clusters[0][1]);
        assert!(!check_feasible(&inst, &Solution::single(tour)).feasible);
    }

    #[test]
    fn md_depots_and_empty_routes() {
        let base = parse_tsplib(include_str!("../../../data/cvrplib/P-n19-k2.vrp")).unwrap();
        let md = derive_variant_instance(&base, VariantKind::MdMtsp).unwrap();
        let second = md.variant.depot_ids[1];
        let customers = md.customers();
        let mut a = vec![0];
        a.extend_from_slice(&customers[..9]);
        a.push(0);
        let mut b = vec![second];
        b.extend_from_slice(&customers[9..]);
        b.push(second);
        let good = Solution::new(vec![a.clone().into(), b.clone().into()]);
        assert!(check_feasible(&md, &good).feasible);

        // robot 1 belongs to the second depot
        let swapped = Solution::new(vec![b.clone().into(), a.clone().into()]);
        assert!(check_feasible(&md, &swapped).has(ConstraintId::Endpoint));

        let mut all = vec![0];
        all.extend_from_slice(&customers);
        all.push(0);
        let idle = Solution::new(vec![all.into(), vec![second, second].into()]);
        let r = check_feasible(&md, &idle);
        assert!(r.has(ConstraintId::EmptyRoute));
        let relaxed = check_feasible_with(&md, &idle, VerifierConfig { require_nonempty_routes: false });
        assert!(relaxed.feasible, "{relaxed:?}");
    }

    #[test]
    fn cvrp_allows_idle_vehicles() {
        let inst = p_n21_k2();
        let mut all = vec![0];
        all.extend(inst.customers());
        all.push(0);
        let sol = Solution::new(vec![all.into(), vec![0, 0].into()]);
        let r = check_feasible(&inst, &sol);
        assert!(!r.has(ConstraintId::EmptyRoute));
        assert!(r.has(ConstraintId::Capacity));
    }

    proptest! {
        #[test]
        fn route_permutation_keeps_verdict(seed in 0u64..50, rot in 0usize..2) {
            let base = p_n21_k2();
            let inst = derive_variant_instance(&base, VariantKind::Mtsp).unwrap();
            let mut customers = inst.customers();
            // deterministic shuffle
            let len = customers.len();
            for i in 0..len {
                let j = (i * 7 + seed as usize) % len;
                customers.swap(i, j);
            }
            let cut = 1 + (seed as usize % (len - 1));
            let mk = |part: &[usize]| {
                let mut v = vec![0];
                v.extend_from_slice(part);
                v.push(0);
                Route::new(v)
            };
            let mut routes = vec![mk(&customers[..cut]), mk(&customers[cut..])];
            let before = check_feasible(&inst, &Solution::new(routes.clone()));
            routes.rotate_left(rot);
            let after = check_feasible(&inst, &Solution::new(routes));
            prop_assert_eq!(before.feasible, after.feasible);
        }

        #[test]
        fn removing_a_location_breaks_tsp(n in 4usize..12, seed in 0u64..100, drop in 1usize..11) {
            let inst = generate_random_instance(VariantKind::Tsp, n, seed).unwrap();
            let mut tour: Vec<usize> = (0..n).collect();
            tour.push(0);
            prop_assert!(check_feasible(&inst, &Solution::single(tour.clone())).feasible);
            let idx = 1 + (drop % (n - 1));
            tour.remove(idx);
            let r = check_feasible(&inst, &Solution::single(tour));
            prop_assert!(!r.feasible);
            prop_assert!(r.has(ConstraintId::Coverage));
        }
    }
}
