//! Domain types shared by every other module: locations, variant
//! parameters, instances, distance matrices, solutions and objective
//! evaluation.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance used when comparing objective values on
/// floating-point metrics.
pub const FLOAT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Location {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub demand: u32,
}

impl Location {
    pub fn new(id: usize, x: f64, y: f64) -> Self {
        Self { id, x, y, demand: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VariantKind {
    Tsp,
    Btsp,
    Ktsp,
    Gtsp,
    Mtsp,
    MinmaxMtsp,
    MdMtsp,
    Cvrp,
}

impl VariantKind {
    pub const ALL: [VariantKind; 8] = [
        VariantKind::Tsp,
        VariantKind::Btsp,
        VariantKind::Ktsp,
        VariantKind::Gtsp,
        VariantKind::Mtsp,
        VariantKind::MinmaxMtsp,
        VariantKind::MdMtsp,
        VariantKind::Cvrp,
    ];

    pub const SINGLE_ROBOT: [VariantKind; 4] = [
        VariantKind::Tsp,
        VariantKind::Btsp,
        VariantKind::Ktsp,
        VariantKind::Gtsp,
    ];

    pub const MULTI_ROBOT: [VariantKind; 4] = [
        VariantKind::Mtsp,
        VariantKind::MinmaxMtsp,
        VariantKind::MdMtsp,
        VariantKind::Cvrp,
    ];

    pub fn is_multi_robot(self) -> bool {
        Self::MULTI_ROBOT.contains(&self)
    }

    pub fn objective_kind(self) -> ObjectiveKind {
        match self {
            VariantKind::Btsp => ObjectiveKind::Bottleneck,
            VariantKind::MinmaxMtsp => ObjectiveKind::Minmax,
            _ => ObjectiveKind::Sum,
        }
    }

    /// Short lowercase name used in file names and CLI flags.
    pub fn slug(self) -> &'static str {
        match self {
            VariantKind::Tsp => "tsp",
            VariantKind::Btsp => "btsp",
            VariantKind::Ktsp => "ktsp",
            VariantKind::Gtsp => "gtsp",
            VariantKind::Mtsp => "mtsp",
            VariantKind::MinmaxMtsp => "minmax-mtsp",
            VariantKind::MdMtsp => "md-mtsp",
            VariantKind::Cvrp => "cvrp",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.slug() == s)
    }

    /// Human-readable task name as printed in report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            VariantKind::Tsp => "TSP",
            VariantKind::Btsp => "BTSP",
            VariantKind::Ktsp => "k-TSP",
            VariantKind::Gtsp => "GTSP",
            VariantKind::Mtsp => "m-TSP",
            VariantKind::MinmaxMtsp => "MinMax m-TSP",
            VariantKind::MdMtsp => "MD m-TSP",
            VariantKind::Cvrp => "CVRP",
        }
    }
}

impl fmt::Display for VariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

/// Variant tag plus exactly the parameters that variant needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSpec {
    pub kind: VariantKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clusters: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_robots: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity: Option<u32>,
    pub depot_ids: Vec<usize>,
}

impl VariantSpec {
    pub fn single(kind: VariantKind, depot: usize) -> Self {
        Self {
            kind,
            k: None,
            clusters: None,
            num_robots: None,
            capacity: None,
            depot_ids: vec![depot],
        }
    }

    /// Number of routes a solution must contain.
    pub fn route_count(&self) -> usize {
        if self.kind.is_multi_robot() {
            self.num_robots.unwrap_or(1)
        } else {
            1
        }
    }

    /// Depot that robot `robot` starts and ends at. Robots are assigned to
    /// depots round-robin.
    pub fn depot_of_robot(&self, robot: usize) -> usize {
        self.depot_ids[robot % self.depot_ids.len()]
    }

    pub fn is_depot(&self, id: usize) -> bool {
        self.depot_ids.contains(&id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Metric {
    ExactEuclidean,
    TsplibRounded,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("instance must have at least 2 locations, found {0}")]
    TooFewLocations(usize),
    #[error("locations[{index}].id: expected {index}, found {found}")]
    NonContiguousId { index: usize, found: usize },
    #[error("locations[{0}]: coordinates must be finite")]
    NonFiniteCoordinate(usize),
    #[error("variant.{field}: {message}")]
    Variant { field: &'static str, message: String },
}

fn variant_err(field: &'static str, message: impl Into<String>) -> InstanceError {
    InstanceError::Variant {
        field,
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemInstance {
    pub name: String,
    pub variant: VariantSpec,
    pub locations: Vec<Location>,
    pub metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ProblemInstance {
    /// Builds an instance and checks every type invariant.
    pub fn new(
        name: impl Into<String>,
        variant: VariantSpec,
        locations: Vec<Location>,
        metric: Metric,
        seed: Option<u64>,
    ) -> Result<Self, InstanceError> {
        let instance = Self {
            name: name.into(),
            variant,
            locations,
            metric,
            seed,
        };
        instance.validate()?;
        Ok(instance)
    }

    pub fn n(&self) -> usize {
        self.locations.len()
    }

    pub fn kind(&self) -> VariantKind {
        self.variant.kind
    }

    pub fn depot(&self) -> usize {
        self.variant.depot_ids[0]
    }

    /// Non-depot location ids in increasing order.
    pub fn customers(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| !self.variant.is_depot(i)).collect()
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        let n = self.locations.len();
        if n < 2 {
            return Err(InstanceError::TooFewLocations(n));
        }
        for (index, loc) in self.locations.iter().enumerate() {
            if loc.id != index {
                return Err(InstanceError::NonContiguousId {
                    index,
                    found: loc.id,
                });
            }
            if !loc.x.is_finite() || !loc.y.is_finite() {
                return Err(InstanceError::NonFiniteCoordinate(index));
            }
        }

        let v = &self.variant;
        let kind = v.kind;
        if v.depot_ids.is_empty() {
            return Err(variant_err("depot_ids", "at least one depot is required"));
        }
        let mut seen = BTreeSet::new();
        for &d in &v.depot_ids {
            if d >= n {
                return Err(variant_err("depot_ids", format!("depot {d} does not exist")));
            }
            if !seen.insert(d) {
                return Err(variant_err("depot_ids", format!("depot {d} listed twice")));
            }
            if self.locations[d].demand != 0 {
                return Err(variant_err(
                    "depot_ids",
                    format!("depot {d} must have zero demand"),
                ));
            }
        }

        let wants = |field: &'static str, present: bool, needed: bool| {
            if present && !needed {
                Err(variant_err(field, format!("not allowed for {}", kind.slug())))
            } else if !present && needed {
                Err(variant_err(field, format!("required for {}", kind.slug())))
            } else {
                Ok(())
            }
        };
        wants("k", v.k.is_some(), kind == VariantKind::Ktsp)?;
        wants("clusters", v.clusters.is_some(), kind == VariantKind::Gtsp)?;
        wants("num_robots", v.num_robots.is_some(), kind.is_multi_robot())?;
        wants("capacity", v.capacity.is_some(), kind == VariantKind::Cvrp)?;

        if kind != VariantKind::Cvrp {
            if let Some(loc) = self.locations.iter().find(|l| l.demand != 0) {
                return Err(variant_err(
                    "demand",
                    format!("location {} has demand but {} has no demands", loc.id, kind.slug()),
                ));
            }
        }

        if let Some(k) = v.k {
            if k <= 1 || k > n {
                return Err(variant_err("k", format!("need 1 < k <= {n}, got {k}")));
            }
        }
        if let Some(m) = v.num_robots {
            if m == 0 {
                return Err(variant_err("num_robots", "need at least one robot"));
            }
        }
        if let Some(q) = v.capacity {
            if q == 0 {
                return Err(variant_err("capacity", "capacity must be positive"));
            }
        }

        if kind == VariantKind::MdMtsp {
            let m = v.num_robots.unwrap_or(0);
            if v.depot_ids.len() > m {
                return Err(variant_err(
                    "depot_ids",
                    format!("{} depots exceed {m} robots", v.depot_ids.len()),
                ));
            }
        } else if v.depot_ids.len() != 1 {
            return Err(variant_err(
                "depot_ids",
                format!("{} requires exactly one depot", kind.slug()),
            ));
        }

        if let Some(clusters) = &v.clusters {
            let mut covered = BTreeSet::new();
            for (ci, cluster) in clusters.iter().enumerate() {
                if cluster.is_empty() {
                    return Err(variant_err("clusters", format!("cluster {ci} is empty")));
                }
                for &id in cluster {
                    if id >= n {
                        return Err(variant_err(
                            "clusters",
                            format!("cluster {ci} references unknown location {id}"),
                        ));
                    }
                    if v.is_depot(id) {
                        return Err(variant_err(
                            "clusters",
                            format!("cluster {ci} contains the depot {id}"),
                        ));
                    }
                    if !covered.insert(id) {
                        return Err(variant_err(
                            "clusters",
                            format!("location {id} belongs to more than one cluster"),
                        ));
                    }
                }
            }
            let expected: BTreeSet<usize> = self.customers().into_iter().collect();
            if covered != expected {
                return Err(variant_err(
                    "clusters",
                    "clusters must cover every non-depot location",
                ));
            }
        }
        Ok(())
    }
}

/// Dense symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Total length of a closed or open walk.
    pub fn path_length(&self, visits: &[usize]) -> f64 {
        visits.windows(2).map(|w| self.get(w[0], w[1])).sum()
    }

    pub fn max_hop(&self, visits: &[usize]) -> f64 {
        visits
            .windows(2)
            .map(|w| self.get(w[0], w[1]))
            .fold(0.0, f64::max)
    }
}

/// TSPLIB `nint`: round half up.
pub fn nint(x: f64) -> f64 {
    (x + 0.5).floor()
}

pub fn build_distance_matrix(instance: &ProblemInstance) -> DistanceMatrix {
    let locs = &instance.locations;
    let rounded = instance.metric == Metric::TsplibRounded;
    DistanceMatrix::from_fn(locs.len(), |i, j| {
        let d = (locs[i].x - locs[j].x).hypot(locs[i].y - locs[j].y);
        if rounded {
            nint(d)
        } else {
            d
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Route {
    pub visits: Vec<usize>,
}

impl Route {
    pub fn new(visits: Vec<usize>) -> Self {
        Self { visits }
    }

    /// Locations strictly between the two endpoints.
    pub fn interior(&self) -> &[usize] {
        if self.visits.len() <= 2 {
            &[]
        } else {
            &self.visits[1..self.visits.len() - 1]
        }
    }

    pub fn reversed(&self) -> Self {
        let mut visits = self.visits.clone();
        visits.reverse();
        Self { visits }
    }
}

impl From<Vec<usize>> for Route {
    fn from(visits: Vec<usize>) -> Self {
        Self { visits }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Solution {
    pub routes: Vec<Route>,
}

impl Solution {
    pub fn new(routes: Vec<Route>) -> Self {
        Self { routes }
    }

    pub fn single(visits: Vec<usize>) -> Self {
        Self {
            routes: vec![Route::new(visits)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ObjectiveKind {
    Sum,
    Bottleneck,
    Minmax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValue {
    pub value: f64,
    pub kind: ObjectiveKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("expected {expected} route(s), found {found}")]
    RouteCount { expected: usize, found: usize },
    #[error("route {route} has fewer than two visits")]
    RouteTooShort { route: usize },
    #[error("route {route} must start and end at depot {depot}")]
    Endpoint { route: usize, depot: usize },
    #[error("route {route} references unknown location {id}")]
    UnknownId { route: usize, id: usize },
}

/// Checks route count, depot endpoints and id range. Coverage and capacity
/// are the verifier's business.
pub fn check_structure(instance: &ProblemInstance, solution: &Solution) -> Result<(), EvalError> {
    let expected = instance.variant.route_count();
    if solution.routes.len() != expected {
        return Err(EvalError::RouteCount {
            expected,
            found: solution.routes.len(),
        });
    }
    let n = instance.n();
    for (r, route) in solution.routes.iter().enumerate() {
        if route.visits.len() < 2 {
            return Err(EvalError::RouteTooShort { route: r });
        }
        if let Some(&id) = route.visits.iter().find(|&&id| id >= n) {
            return Err(EvalError::UnknownId { route: r, id });
        }
        let depot = instance.variant.depot_of_robot(r);
        if route.visits[0] != depot || *route.visits.last().unwrap() != depot {
            return Err(EvalError::Endpoint { route: r, depot });
        }
    }
    Ok(())
}

pub fn evaluate(instance: &ProblemInstance, solution: &Solution) -> Result<ObjectiveValue, EvalError> {
    evaluate_with(instance, &build_distance_matrix(instance), solution)
}

pub fn evaluate_with(
    instance: &ProblemInstance,
    dm: &DistanceMatrix,
    solution: &Solution,
) -> Result<ObjectiveValue, EvalError> {
    check_structure(instance, solution)?;
    let kind = instance.kind().objective_kind();
    let value = match kind {
        ObjectiveKind::Sum => solution.routes.iter().map(|r| dm.path_length(&r.visits)).sum(),
        ObjectiveKind::Bottleneck => solution
            .routes
            .iter()
            .map(|r| dm.max_hop(&r.visits))
            .fold(0.0, f64::max),
        ObjectiveKind::Minmax => solution
            .routes
            .iter()
            .map(|r| dm.path_length(&r.visits))
            .fold(0.0, f64::max),
    };
    Ok(ObjectiveValue { value, kind })
}

/// Objective equality: exact on integer metrics, relative `FLOAT_REL_TOL`
/// otherwise.
pub fn objectives_equal(a: f64, b: f64, metric: Metric) -> bool {
    match metric {
        Metric::TsplibRounded => a == b,
        Metric::ExactEuclidean => (a - b).abs() <= FLOAT_REL_TOL * a.abs().max(b.abs()).max(1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    pub(crate) fn square(kind: VariantKind) -> ProblemInstance {
        let locations = vec![
            Location::new(0, 0.0, 0.0),
            Location::new(1, 0.0, 10.0),
            Location::new(2, 10.0, 10.0),
            Location::new(3, 10.0, 0.0),
        ];
        ProblemInstance::new("square", VariantSpec::single(kind, 0), locations, Metric::ExactEuclidean, None)
            .unwrap()
    }

    #[test]
    fn three_four_five() {
        let inst = ProblemInstance::new(
            "pair",
            VariantSpec::single(VariantKind::Tsp, 0),
            vec![Location::new(0, 0.0, 0.0), Location::new(1, 3.0, 4.0)],
            Metric::ExactEuclidean,
            None,
        )
        .unwrap();
        let dm = build_distance_matrix(&inst);
        assert_eq!(dm.get(0, 1), 5.0);
        assert_eq!(dm.get(1, 0), 5.0);
        assert_eq!(dm.get(0, 0), 0.0);
    }

    #[test]
    fn tsplib_rounding() {
        let mut inst = ProblemInstance::new(
            "pair",
            VariantSpec::single(VariantKind::Tsp, 0),
            vec![Location::new(0, 0.0, 0.0), Location::new(1, 1.0, 1.0)],
            Metric::TsplibRounded,
            None,
        )
        .unwrap();
        assert_eq!(build_distance_matrix(&inst).get(0, 1), 1.0);
        inst.locations[1] = Location::new(1, 0.0, 2.5);
        assert_eq!(build_distance_matrix(&inst).get(0, 1), 3.0);
    }

    #[test]
    fn square_objectives() {
        let tour = Solution::single(vec![0, 1, 2, 3, 0]);
        let tsp = evaluate(&square(VariantKind::Tsp), &tour).unwrap();
        assert_eq!(tsp.value, 40.0);
        assert_eq!(tsp.kind, ObjectiveKind::Sum);
        let btsp = evaluate(&square(VariantKind::Btsp), &tour).unwrap();
        assert_eq!(btsp.value, 10.0);
        assert_eq!(btsp.kind, ObjectiveKind::Bottleneck);
    }

    #[test]
    fn minmax_of_two_routes() {
        // depot at origin, customers on the x axis at 15 and 25
        let locations = vec![
            Location::new(0, 0.0, 0.0),
            Location::new(1, 15.0, 0.0),
            Location::new(2, 25.0, 0.0),
        ];
        let mut spec = VariantSpec::single(VariantKind::MinmaxMtsp, 0);
        spec.num_robots = Some(2);
        let inst = ProblemInstance::new("line", spec, locations, Metric::ExactEuclidean, None).unwrap();
        let sol = Solution::new(vec![vec![0, 1, 0].into(), vec![0, 2, 0].into()]);
        let v = evaluate(&inst, &sol).unwrap();
        assert_eq!(v.value, 50.0);
        assert_eq!(v.kind, ObjectiveKind::Minmax);
    }

    #[test]
    fn empty_route_contributes_zero() {
        let mut spec = VariantSpec::single(VariantKind::Mtsp, 0);
        spec.num_robots = Some(2);
        let inst = ProblemInstance::new(
            "pair",
            spec,
            vec![Location::new(0, 0.0, 0.0), Location::new(1, 3.0, 4.0)],
            Metric::ExactEuclidean,
            None,
        )
        .unwrap();
        let sol = Solution::new(vec![vec![0, 1, 0].into(), vec![0, 0].into()]);
        assert_eq!(evaluate(&inst, &sol).unwrap().value, 10.0);
    }

    #[test]
    fn structural_errors() {
        let inst = square(VariantKind::Tsp);
        let two = Solution::new(vec![vec![0, 1, 0].into(), vec![0, 2, 0].into()]);
        assert_eq!(
            evaluate(&inst, &two),
            Err(EvalError::RouteCount { expected: 1, found: 2 })
        );
        let bad_end = Solution::single(vec![1, 2, 3, 0]);
        assert_eq!(
            evaluate(&inst, &bad_end),
            Err(EvalError::Endpoint { route: 0, depot: 0 })
        );
        let unknown = Solution::single(vec![0, 9, 0]);
        assert_eq!(
            evaluate(&inst, &unknown),
            Err(EvalError::UnknownId { route: 0, id: 9 })
        );
    }

    #[test]
    fn variant_parameter_rules() {
        let locs = || {
            vec![
                Location::new(0, 0.0, 0.0),
                Location::new(1, 1.0, 0.0),
                Location::new(2, 2.0, 0.0),
            ]
        };
        let mut spec = VariantSpec::single(VariantKind::Tsp, 0);
        spec.k = Some(2);
        assert!(ProblemInstance::new("x", spec, locs(), Metric::ExactEuclidean, None).is_err());

        let spec = VariantSpec::single(VariantKind::Ktsp, 0);
        assert!(ProblemInstance::new("x", spec, locs(), Metric::ExactEuclidean, None).is_err());

        let mut spec = VariantSpec::single(VariantKind::Gtsp, 0);
        spec.clusters = Some(vec![vec![1]]);
        let err = ProblemInstance::new("x", spec, locs(), Metric::ExactEuclidean, None).unwrap_err();
        assert!(err.to_string().contains("clusters"));

        let mut spec = VariantSpec::single(VariantKind::MdMtsp, 0);
        spec.num_robots = Some(1);
        spec.depot_ids = vec![0, 2];
        assert!(ProblemInstance::new("x", spec, locs(), Metric::ExactEuclidean, None).is_err());
    }

    fn arb_points() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((0.0..100.0f64, 0.0..100.0f64), 3..9)
    }

    fn instance_from(points: &[(f64, f64)], kind: VariantKind) -> ProblemInstance {
        let locations = points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| Location::new(i, x, y))
            .collect();
        let mut spec = VariantSpec::single(kind, 0);
        if kind.is_multi_robot() {
            spec.num_robots = Some(2);
        }
        ProblemInstance::new("p", spec, locations, Metric::ExactEuclidean, None).unwrap()
    }

    proptest! {
        #[test]
        fn matrix_symmetric_and_metric(points in arb_points()) {
            let inst = instance_from(&points, VariantKind::Tsp);
            let dm = build_distance_matrix(&inst);
            let n = dm.n();
            for i in 0..n {
                prop_assert_eq!(dm.get(i, i), 0.0);
                for j in 0..n {
                    prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                    for k in 0..n {
                        prop_assert!(dm.get(i, k) <= dm.get(i, j) + dm.get(j, k) + 1e-9);
                    }
                }
            }
            prop_assert_eq!(build_distance_matrix(&inst), dm);
        }

        #[test]
        fn reversal_invariance(points in arb_points()) {
            let n = points.len();
            let mut visits: Vec<usize> = (0..n).collect();
            visits.push(0);
            let sol = Solution::single(visits);
            let rev = Solution::new(vec![sol.routes[0].reversed()]);
            for kind in [VariantKind::Tsp, VariantKind::Btsp] {
                let inst = instance_from(&points, kind);
                let a = evaluate(&inst, &sol).unwrap().value;
                let b = evaluate(&inst, &rev).unwrap().value;
                prop_assert!(objectives_equal(a, b, Metric::ExactEuclidean));
            }
        }

        #[test]
        fn multi_robot_sum_is_sum_of_routes(points in arb_points(), split in 1usize..7) {
            let inst = instance_from(&points, VariantKind::Mtsp);
            let customers: Vec<usize> = (1..points.len()).collect();
            let cut = split.min(customers.len());
            let mut a = vec![0];
            a.extend_from_slice(&customers[..cut]);
            a.push(0);
            let mut b = vec![0];
            b.extend_from_slice(&customers[cut..]);
            b.push(0);
            let dm = build_distance_matrix(&inst);
            let sol = Solution::new(vec![a.clone().into(), b.clone().into()]);
            let total = evaluate(&inst, &sol).unwrap().value;
            let parts = dm.path_length(&a) + dm.path_length(&b);
            prop_assert!(objectives_equal(total, parts, Metric::ExactEuclidean));
        }
    }
}
