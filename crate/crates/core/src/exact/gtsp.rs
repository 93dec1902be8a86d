use std::time::Instant;

use super::{CertificateStatus, ExactError, OptimalCertificate};
use crate::routing::{DistanceMatrix, ObjectiveKind, ObjectiveValue, Solution};

pub const MAX_GTSP_CLUSTERS: usize = 20;

const INF: f64 = f64::INFINITY;

/// Shortest closed tour from `depot` visiting exactly one member of every
/// cluster. Table over (visited-cluster set, last location).
pub fn solve_gtsp(dm: &DistanceMatrix, depot: usize, clusters: &[Vec<usize>]) -> Result<OptimalCertificate, ExactError> {
    let started = Instant::now();
    let n = dm.n();
    let c = clusters.len();
    if c == 0 {
        return Err(ExactError::Parameter("at least one cluster is required".into()));
    }
    if c > MAX_GTSP_CLUSTERS {
        return Err(ExactError::TooLarge {
            what: "GTSP (clusters)",
            n: c,
            limit: MAX_GTSP_CLUSTERS,
        });
    }
    if n > 256 {
        return Err(ExactError::TooLarge {
            what: "GTSP",
            n,
            limit: 256,
        });
    }
    let mut owner = vec![usize::MAX; n];
    for (ci, cluster) in clusters.iter().enumerate() {
        if cluster.is_empty() {
            return Err(ExactError::Parameter(format!("cluster {ci} is empty")));
        }
        for &id in cluster {
            if id >= n || id == depot {
                return Err(ExactError::Parameter(format!("cluster {ci} has invalid member {id}")));
            }
            if owner[id] != usize::MAX {
                return Err(ExactError::Parameter(format!("location {id} is in two clusters")));
            }
            owner[id] = ci;
        }
    }
    if let Some(id) = (0..n).find(|&i| i != depot && owner[i] == usize::MAX) {
        return Err(ExactError::Parameter(format!("location {id} is in no cluster")));
    }

    let mut members: Vec<Vec<usize>> = clusters.to_vec();
    for m in &mut members {
        m.sort_unstable();
    }
    let states = 1usize << c;
    let mut cost = vec![INF; states * n];
    let mut parent = vec![u8::MAX; states * n];
    for (ci, ms) in members.iter().enumerate() {
        for &l in ms {
            cost[(1 << ci) * n + l] = dm.get(depot, l);
        }
    }
    for mask in 1..states {
        for ci in 0..c {
            if mask & (1 << ci) == 0 {
                continue;
            }
            for &j in &members[ci] {
                let base = cost[mask * n + j];
                if base == INF {
                    continue;
                }
                for (cn, ms) in members.iter().enumerate() {
                    if mask & (1 << cn) != 0 {
                        continue;
                    }
                    let next = mask | (1 << cn);
                    for &l in ms {
                        let v = base + dm.get(j, l);
                        let slot = next * n + l;
                        // strict `<` with ascending (cluster, id) keeps the smaller predecessor
                        if v < cost[slot] || (v == cost[slot] && (j as u8) < parent[slot]) {
                            cost[slot] = v;
                            parent[slot] = j as u8;
                        }
                    }
                }
            }
        }
    }

    let full = states - 1;
    let mut best = INF;
    let mut last = usize::MAX;
    for l in 0..n {
        let v = cost[full * n + l];
        if v == INF {
            continue;
        }
        let total = v + dm.get(l, depot);
        if total < best {
            best = total;
            last = l;
        }
    }

    let mut rev = Vec::with_capacity(c);
    let mut mask = full;
    let mut cur = last;
    loop {
        rev.push(cur);
        let p = parent[mask * n + cur];
        mask &= !(1 << owner[cur]);
        if mask == 0 {
            break;
        }
        cur = p as usize;
    }
    let mut visits = vec![depot];
    visits.extend(rev.into_iter().rev());
    visits.push(depot);

    Ok(OptimalCertificate {
        value: ObjectiveValue {
            value: best,
            kind: ObjectiveKind::Sum,
        },
        solution: Solution::single(visits),
        status: CertificateStatus::ProvenOptimal,
        lower_bound: best,
        solve_time: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::solve_tsp;
    use crate::instance_io::generate_random_instance;
    use crate::routing::{build_distance_matrix, evaluate_with, VariantKind};
    use crate::verifier::check_feasible;
    use proptest::prelude::*;

    #[test]
    fn singleton_clusters_match_tsp() {
        let inst = generate_random_instance(VariantKind::Tsp, 10, 7).unwrap();
        let dm = build_distance_matrix(&inst);
        let singles: Vec<Vec<usize>> = (1..10).map(|i| vec![i]).collect();
        assert_eq!(
            solve_gtsp(&dm, 0, &singles).unwrap().value.value,
            solve_tsp(&dm, 0).unwrap().value.value
        );
    }

    #[test]
    fn one_cluster_picks_nearer_member() {
        let pts = [(0.0, 0.0), (5.0, 0.0), (0.0, 9.0)];
        let dm = DistanceMatrix::from_fn(3, |i, j| {
            let (a, b): ((f64, f64), (f64, f64)) = (pts[i], pts[j]);
            (a.0 - b.0).hypot(a.1 - b.1)
        });
        let cert = solve_gtsp(&dm, 0, &[vec![1, 2]]).unwrap();
        assert_eq!(cert.value.value, 10.0);
        assert_eq!(cert.solution.routes[0].visits, vec![0, 1, 0]);
    }

    #[test]
    fn malformed_partitions() {
        let dm = DistanceMatrix::from_fn(4, |_, _| 1.0);
        assert!(solve_gtsp(&dm, 0, &[vec![1, 2]]).is_err());
        assert!(solve_gtsp(&dm, 0, &[vec![1, 2], vec![2, 3]]).is_err());
        assert!(solve_gtsp(&dm, 0, &[vec![0, 1], vec![2, 3]]).is_err());
        assert!(solve_gtsp(&dm, 0, &[vec![1, 2, 3], vec![]]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn certificate_feasible(n in 3usize..21, seed in 0u64..300) {
            let inst = generate_random_instance(VariantKind::Gtsp, n, seed).unwrap();
            let dm = build_distance_matrix(&inst);
            let cert = solve_gtsp(&dm, 0, inst.variant.clusters.as_ref().unwrap()).unwrap();
            prop_assert!(check_feasible(&inst, &cert.solution).feasible);
            let v = evaluate_with(&inst, &dm, &cert.solution).unwrap().value;
            prop_assert!((v - cert.value.value).abs() <= 1e-9 * v.max(1.0));
        }
    }
}
