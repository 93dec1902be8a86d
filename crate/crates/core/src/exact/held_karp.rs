//! Layered Held-Karp. Only two cost layers live in memory at a time;
//! subsets of a layer are indexed by colex rank, which is also the order
//! Gosper's hack enumerates them in.

use std::time::Instant;

use super::{CertificateStatus, ExactError, OptimalCertificate};
use crate::routing::{DistanceMatrix, ObjectiveKind, ObjectiveValue, Solution};

/// Largest location count the single-robot table handles.
pub const MAX_SINGLE_ROBOT_N: usize = 24;

const INF: f64 = f64::INFINITY;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Combine {
    Sum,
    Max,
}

impl Combine {
    #[inline(always)]
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Combine::Sum => a + b,
            Combine::Max => a.max(b),
        }
    }
}

pub(crate) struct Binomial(Vec<Vec<usize>>);

impl Binomial {
    pub(crate) fn new(n: usize) -> Self {
        let mut t = vec![vec![0usize; n + 2]; n + 1];
        for i in 0..=n {
            t[i][0] = 1;
            for k in 1..=i {
                t[i][k] = t[i - 1][k - 1] + if k < i { t[i - 1][k] } else { 0 };
            }
        }
        Self(t)
    }

    #[inline(always)]
    pub(crate) fn get(&self, n: usize, k: usize) -> usize {
        if k > n {
            0
        } else {
            self.0[n][k]
        }
    }

    /// Colex rank of `mask` among masks with the same popcount.
    pub(crate) fn rank(&self, mask: u32) -> usize {
        let mut r = 0;
        let mut m = mask;
        let mut q = 0;
        while m != 0 {
            r += self.get(m.trailing_zeros() as usize, q + 1);
            q += 1;
            m &= m - 1;
        }
        r
    }
}

#[inline]
pub(crate) fn next_same_popcount(x: u64) -> u64 {
    let c = x & x.wrapping_neg();
    let r = x + c;
    (((r ^ x) >> 2) / c) | r
}

/// Held-Karp over `nodes` starting from `start`. Positions `0..m` index
/// `nodes`; a subset is a bitmask over positions.
pub(crate) struct Layered {
    m: usize,
    from_start: Vec<f64>,
    to_end: Vec<f64>,
    local: Vec<f64>,
    combine: Combine,
    binom: Binomial,
}

/// Per-layer predecessor positions, indexed `rank * t + last`.
pub(crate) struct Parents(Vec<Vec<u8>>);

impl Layered {
    pub(crate) fn new(dm: &DistanceMatrix, start: usize, nodes: &[usize], combine: Combine) -> Self {
        let m = nodes.len();
        assert!(m < 32);
        let mut local = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                local[a * m + b] = dm.get(nodes[a], nodes[b]);
            }
        }
        let from_start: Vec<f64> = nodes.iter().map(|&j| dm.get(start, j)).collect();
        Self {
            m,
            to_end: from_start.clone(),
            from_start,
            local,
            combine,
            binom: Binomial::new(m.max(1)),
        }
    }

    /// Fills layers `1..=max_layer`. For every subset passing `allowed`,
    /// `visit(t, mask, rank, closed, last)` receives the cost of the best
    /// walk start → subset → start and the position visited last. Ties go to
    /// the smaller position.
    pub(crate) fn run(
        &self,
        max_layer: usize,
        keep_parents: bool,
        allowed: impl Fn(u32) -> bool,
        mut visit: impl FnMut(usize, u32, usize, f64, usize),
    ) -> Parents {
        let m = self.m;
        let comb = self.combine;
        let mut parents = vec![Vec::new()];
        let mut prev: Vec<f64> = Vec::new();
        let mut bits = [0usize; 32];
        let mut without = [0usize; 32];
        for t in 1..=max_layer.min(m) {
            let count = self.binom.get(m, t);
            let mut cur = vec![INF; count * t];
            let mut par = if keep_parents { vec![0u8; count * t] } else { Vec::new() };
            let mut mask: u64 = (1u64 << t) - 1;
            let mut rank = 0usize;
            while mask < (1u64 << m) {
                let mk = mask as u32;
                if allowed(mk) {
                    let mut x = mk;
                    for b in bits.iter_mut().take(t) {
                        *b = x.trailing_zeros() as usize;
                        x &= x - 1;
                    }
                    if t > 1 {
                        // rank of mask minus bits[p]
                        let mut suffix = 0;
                        for p in (0..t).rev() {
                            without[p] = suffix;
                            suffix += self.binom.get(bits[p], p);
                        }
                        let mut prefix = 0;
                        for p in 0..t {
                            without[p] += prefix;
                            prefix += self.binom.get(bits[p], p + 1);
                        }
                    }
                    let row = rank * t;
                    for p in 0..t {
                        let j = bits[p];
                        if t == 1 {
                            cur[row] = self.from_start[j];
                            continue;
                        }
                        let base = without[p] * (t - 1);
                        let mut best = INF;
                        let mut arg = 0;
                        for q in 0..t {
                            if q == p {
                                continue;
                            }
                            let pos = if q < p { q } else { q - 1 };
                            let v = prev[base + pos];
                            if v == INF {
                                continue;
                            }
                            let c = comb.apply(v, self.local[bits[q] * m + j]);
                            if c < best {
                                best = c;
                                arg = q;
                            }
                        }
                        cur[row + p] = best;
                        if keep_parents {
                            par[row + p] = arg as u8;
                        }
                    }
                    let mut closed = INF;
                    let mut last = 0;
                    for p in 0..t {
                        let v = cur[row + p];
                        if v == INF {
                            continue;
                        }
                        let c = comb.apply(v, self.to_end[bits[p]]);
                        if c < closed {
                            closed = c;
                            last = p;
                        }
                    }
                    visit(t, mk, rank, closed, last);
                }
                mask = next_same_popcount(mask);
                rank += 1;
            }
            parents.push(par);
            prev = cur;
        }
        Parents(parents)
    }

    /// Positions of the best walk ending at position `last` of `mask`, in
    /// visiting order.
    pub(crate) fn path(&self, parents: &Parents, mask: u32, last: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut mask = mask;
        let mut p = last;
        let mut t = mask.count_ones() as usize;
        while t > 0 {
            let mut x = mask;
            for _ in 0..p {
                x &= x - 1;
            }
            let bit = x.trailing_zeros() as usize;
            out.push(bit);
            if t == 1 {
                break;
            }
            let q = parents.0[t][self.binom.rank(mask) * t + p] as usize;
            mask &= !(1u32 << bit);
            p = if q < p { q } else { q - 1 };
            t -= 1;
        }
        out.reverse();
        out
    }
}

fn check_size(n: usize) -> Result<(), ExactError> {
    if n > MAX_SINGLE_ROBOT_N {
        return Err(ExactError::TooLarge {
            what: "single-robot",
            n,
            limit: MAX_SINGLE_ROBOT_N,
        });
    }
    if n < 2 {
        return Err(ExactError::Parameter(format!("need at least 2 locations, got {n}")));
    }
    Ok(())
}

fn others(n: usize, depot: usize) -> Vec<usize> {
    (0..n).filter(|&i| i != depot).collect()
}

fn tour(depot: usize, nodes: &[usize], positions: &[usize]) -> Vec<usize> {
    let mut v = Vec::with_capacity(positions.len() + 2);
    v.push(depot);
    v.extend(positions.iter().map(|&p| nodes[p]));
    v.push(depot);
    v
}

fn full_tour(dm: &DistanceMatrix, depot: usize, combine: Combine, kind: ObjectiveKind) -> Result<OptimalCertificate, ExactError> {
    let started = Instant::now();
    let n = dm.n();
    check_size(n)?;
    if depot >= n {
        return Err(ExactError::Parameter(format!("depot {depot} out of range")));
    }
    let nodes = others(n, depot);
    let engine = Layered::new(dm, depot, &nodes, combine);
    let full = ((1u64 << nodes.len()) - 1) as u32;
    let mut best = (INF, 0);
    let parents = engine.run(nodes.len(), true, |_| true, |t, _, _, closed, last| {
        if t == nodes.len() {
            best = (closed, last);
        }
    });
    let visits = tour(depot, &nodes, &engine.path(&parents, full, best.1));
    Ok(OptimalCertificate {
        value: ObjectiveValue { value: best.0, kind },
        solution: Solution::single(visits),
        status: CertificateStatus::ProvenOptimal,
        lower_bound: best.0,
        solve_time: started.elapsed().as_secs_f64(),
    })
}

pub fn solve_tsp(dm: &DistanceMatrix, depot: usize) -> Result<OptimalCertificate, ExactError> {
    full_tour(dm, depot, Combine::Sum, ObjectiveKind::Sum)
}

pub fn solve_btsp(dm: &DistanceMatrix, depot: usize) -> Result<OptimalCertificate, ExactError> {
    full_tour(dm, depot, Combine::Max, ObjectiveKind::Bottleneck)
}

/// Shortest closed tour through the depot and exactly `k - 1` other
/// locations.
pub fn solve_ktsp(dm: &DistanceMatrix, depot: usize, k: usize) -> Result<OptimalCertificate, ExactError> {
    let started = Instant::now();
    let n = dm.n();
    check_size(n)?;
    if k <= 1 || k > n {
        return Err(ExactError::Parameter(format!("need 1 < k <= {n}, got k = {k}")));
    }
    let nodes = others(n, depot);
    let engine = Layered::new(dm, depot, &nodes, Combine::Sum);
    let layer = k - 1;
    // (value, last location id, rank, mask, last position)
    let mut best: (f64, usize, usize, u32, usize) = (INF, usize::MAX, usize::MAX, 0, 0);
    let parents = engine.run(layer, true, |_| true, |t, mask, rank, closed, last| {
        if t != layer {
            return;
        }
        let mut x = mask;
        for _ in 0..last {
            x &= x - 1;
        }
        let last_id = nodes[x.trailing_zeros() as usize];
        if closed < best.0 || (closed == best.0 && (last_id, rank) < (best.1, best.2)) {
            best = (closed, last_id, rank, mask, last);
        }
    });
    let visits = tour(depot, &nodes, &engine.path(&parents, best.3, best.4));
    Ok(OptimalCertificate {
        value: ObjectiveValue {
            value: best.0,
            kind: ObjectiveKind::Sum,
        },
        solution: Solution::single(visits),
        status: CertificateStatus::ProvenOptimal,
        lower_bound: best.0,
        solve_time: started.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance_io::generate_random_instance;
    use crate::routing::{build_distance_matrix, evaluate_with, VariantKind};
    use crate::verifier::check_feasible;
    use proptest::prelude::*;

    fn points_dm(pts: &[(f64, f64)]) -> DistanceMatrix {
        DistanceMatrix::from_fn(pts.len(), |i, j| (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1))
    }

    fn square() -> DistanceMatrix {
        points_dm(&[(0.0, 0.0), (0.0, 10.0), (10.0, 10.0), (10.0, 0.0)])
    }

    #[test]
    fn binomial_rank_matches_enumeration() {
        let b = Binomial::new(10);
        for t in 1..=10 {
            let mut mask: u64 = (1 << t) - 1;
            let mut r = 0;
            while mask < 1 << 10 {
                assert_eq!(b.rank(mask as u32), r);
                mask = next_same_popcount(mask);
                r += 1;
            }
            assert_eq!(r, b.get(10, t));
        }
    }

    #[test]
    fn square_values() {
        assert_eq!(solve_tsp(&square(), 0).unwrap().value.value, 40.0);
        assert_eq!(solve_btsp(&square(), 0).unwrap().value.value, 10.0);
    }

    #[test]
    fn two_locations_out_and_back() {
        let dm = points_dm(&[(0.0, 0.0), (3.0, 4.0)]);
        let c = solve_tsp(&dm, 0).unwrap();
        assert_eq!(c.value.value, 10.0);
        assert_eq!(c.solution.routes[0].visits, vec![0, 1, 0]);
    }

    #[test]
    fn collinear_bottleneck_is_closing_edge() {
        let dm = points_dm(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        assert_eq!(solve_btsp(&dm, 0).unwrap().value.value, 2.0);
    }

    #[test]
    fn ktsp_edges() {
        let inst = generate_random_instance(VariantKind::Tsp, 9, 3).unwrap();
        let dm = build_distance_matrix(&inst);
        let tsp = solve_tsp(&dm, 0).unwrap().value.value;
        assert_eq!(solve_ktsp(&dm, 0, 9).unwrap().value.value, tsp);
        let nearest = (1..9).map(|j| dm.get(0, j)).fold(INF, f64::min);
        assert_eq!(solve_ktsp(&dm, 0, 2).unwrap().value.value, 2.0 * nearest);
        assert!(matches!(solve_ktsp(&dm, 0, 1), Err(ExactError::Parameter(_))));
        assert!(matches!(solve_ktsp(&dm, 0, 10), Err(ExactError::Parameter(_))));
    }

    #[test]
    fn size_budget() {
        let dm = DistanceMatrix::from_fn(25, |i, j| (i + j) as f64);
        assert!(matches!(solve_tsp(&dm, 0), Err(ExactError::TooLarge { n: 25, .. })));
    }

    #[test]
    fn nonzero_depot() {
        let dm = square();
        let c = solve_tsp(&dm, 2).unwrap();
        assert_eq!(c.value.value, 40.0);
        assert_eq!(c.solution.routes[0].visits[0], 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn certificates_are_feasible_and_consistent(n in 3usize..12, seed in 0u64..500) {
            for kind in [VariantKind::Tsp, VariantKind::Btsp, VariantKind::Ktsp] {
                let inst = generate_random_instance(kind, n, seed).unwrap();
                let dm = build_distance_matrix(&inst);
                let cert = match kind {
                    VariantKind::Tsp => solve_tsp(&dm, 0),
                    VariantKind::Btsp => solve_btsp(&dm, 0),
                    _ => solve_ktsp(&dm, 0, inst.variant.k.unwrap()),
                }.unwrap();
                prop_assert!(check_feasible(&inst, &cert.solution).feasible);
                let v = evaluate_with(&inst, &dm, &cert.solution).unwrap().value;
                prop_assert!((v - cert.value.value).abs() <= 1e-9 * v.max(1.0));
                prop_assert_eq!(cert.lower_bound, cert.value.value);
            }
        }

        #[test]
        fn ktsp_monotone_in_k(n in 3usize..11, seed in 0u64..500) {
            let inst = generate_random_instance(VariantKind::Tsp, n, seed).unwrap();
            let dm = build_distance_matrix(&inst);
            let mut last = 0.0;
            for k in 2..=n {
                let v = solve_ktsp(&dm, 0, k).unwrap().value.value;
                prop_assert!(v + 1e-9 >= last);
                last = v;
            }
        }

        #[test]
        fn btsp_below_tsp_max_hop(n in 3usize..12, seed in 0u64..500) {
            let inst = generate_random_instance(VariantKind::Tsp, n, seed).unwrap();
            let dm = build_distance_matrix(&inst);
            let tsp = solve_tsp(&dm, 0).unwrap();
            let b = solve_btsp(&dm, 0).unwrap().value.value;
            prop_assert!(b <= dm.max_hop(&tsp.solution.routes[0].visits) + 1e-12);
        }

        #[test]
        fn deterministic(n in 3usize..12, seed in 0u64..500) {
            let inst = generate_random_instance(VariantKind::Tsp, n, seed).unwrap();
            let dm = build_distance_matrix(&inst);
            let a = solve_tsp(&dm, 0).unwrap();
            let b = solve_tsp(&dm, 0).unwrap();
            prop_assert_eq!(a.solution, b.solution);
            prop_assert_eq!(a.value.value.to_bits(), b.value.value.to_bits());
        }
    }
}
