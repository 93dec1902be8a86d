//! Multi-robot exact solver. Route costs for every customer subset come from
//! a layered Held-Karp per depot; the search partitions the customers into
//! routes, branching on the lowest uncovered customer.
//!
//! Lower bounds come from Lagrangian multipliers on the covering
//! constraints: for multipliers `u`, any partition of `S` into `k_d` routes
//! at each depot `d` costs at least `sum_{i in S} u_i` plus the `k_d`
//! smallest reduced costs `g_d(R) - u(R)` over all routes at `d`.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use super::held_karp::{Combine, Layered};
use super::{CertificateStatus, ExactError, ExactOptions, OptimalCertificate};
use crate::heuristic::{nearest_neighbor_over, savings_cvrp, split_tour, two_opt_route, DepotSlot, SplitParams};
use crate::routing::{
    build_distance_matrix, evaluate_with, DistanceMatrix, ObjectiveKind, ProblemInstance, Route, Solution, VariantKind,
};
use crate::verifier::VerifierConfig;

/// Largest location count (depots included) the exact multi-robot solver
/// accepts.
pub const MAX_MULTI_ROBOT_N: usize = 23;

const INF: f64 = f64::INFINITY;
const MEMO_LIMIT: usize = 6_000_000;
const SUBGRADIENT_ITERS: usize = 600;
/// Iterations run even when the budget is already spent, so a cut-short
/// search still reports a useful bound.
const MIN_SUBGRADIENT_ITERS: usize = 32;

pub fn solve_multirobot(instance: &ProblemInstance) -> Result<OptimalCertificate, ExactError> {
    solve_multirobot_with(instance, &ExactOptions::default())
}

struct Problem {
    c: usize,
    /// Location id of each customer position.
    customers: Vec<usize>,
    depots: Vec<usize>,
    /// Robots stationed at each depot.
    kd: Vec<usize>,
    /// `g[d][mask]`: cheapest closed route from depot `d` through `mask`.
    g: Vec<Vec<f64>>,
    load: Option<(Vec<u32>, u64)>,
    exact_fleet: bool,
    minmax: bool,
    /// Cheapest out-and-back to each customer from any depot.
    out_back: Vec<f64>,
}

impl Problem {
    fn combine(&self, a: f64, b: f64) -> f64 {
        if self.minmax {
            a.max(b)
        } else {
            a + b
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Column {
    /// Reduced cost under the first multiplier vector (sum objective) or
    /// the route cost (minmax).
    key: f64,
    mask: u32,
    depot: u32,
}

#[derive(Clone, Copy, Debug)]
enum Memo {
    Exact(f64, Option<(u32, u32)>),
    AtLeast(f64),
}

struct Duals {
    u: Vec<f64>,
    /// `prefix[d][j]`: sum of the `j` smallest admissible reduced costs at
    /// depot `d`.
    prefix: Vec<Vec<f64>>,
}

impl Duals {
    fn bound(&self, s: u32, ks: &[usize]) -> f64 {
        let mut total = 0.0;
        let mut x = s;
        while x != 0 {
            total += self.u[x.trailing_zeros() as usize];
            x &= x - 1;
        }
        for (d, &k) in ks.iter().enumerate() {
            total += self.prefix[d][k];
        }
        total
    }
}

fn tol(x: f64) -> f64 {
    1e-9 * x.abs().max(1.0)
}

pub fn solve_multirobot_with(instance: &ProblemInstance, options: &ExactOptions) -> Result<OptimalCertificate, ExactError> {
    let started = Instant::now();
    let deadline = started + options.time_budget;
    let kind = instance.kind();
    if !kind.is_multi_robot() {
        return Err(ExactError::Parameter(format!("{} is not a multi-robot variant", kind.slug())));
    }
    let n = instance.n();
    if n > MAX_MULTI_ROBOT_N {
        return Err(ExactError::TooLarge {
            what: "multi-robot",
            n,
            limit: MAX_MULTI_ROBOT_N,
        });
    }
    let dm = build_distance_matrix(instance);
    let problem = build_problem(instance, &dm)?;
    let p = &problem;
    let m: usize = p.kd.iter().sum();

    let incumbent = incumbent(instance, &dm, p);
    let inc_value = incumbent.as_ref().map(|(v, _)| *v).unwrap_or(INF);

    if p.c == 0 {
        // only reachable for CVRP; every route is empty
        let sol = assemble(instance, &dm, p, &[]);
        return Ok(certificate(instance, &dm, sol, CertificateStatus::ProvenOptimal, None, started));
    }

    let ub_sum = incumbent
        .as_ref()
        .map(|(_, cols)| cols.iter().map(|&(mask, d)| p.g[d as usize][mask as usize]).sum())
        .unwrap_or(INF);
    let sub_deadline = started + (options.time_budget / 10).min(Duration::from_secs(60));
    let duals = lagrangian_duals(p, ub_sum, sub_deadline);
    let columns = build_columns(p, &duals[0]);

    let mut stride = vec![1u32; p.kd.len()];
    for d in 1..p.kd.len() {
        stride[d] = stride[d - 1] * (p.kd[d - 1] as u32 + 1);
    }
    let full_code: u32 = p.kd.iter().zip(&stride).map(|(&k, &s)| k as u32 * s).sum();
    let full_mask = ((1u64 << p.c) - 1) as u32;

    let mut search = Search {
        p,
        cols: &columns,
        duals: &duals,
        stride,
        memo: HashMap::new(),
        deadline,
        ignore_deadline: false,
        aborted: false,
        nodes: 0,
        root_key: (full_mask as u64) << 32 | full_code as u64,
        root_best: None,
    };
    let mut ks = p.kd.clone();
    let root_lb = search.lower_bound(full_mask, &ks, m);
    search.search(full_mask, &mut ks, full_code, m, inc_value);

    let aborted = search.aborted;
    let best_cols = match (search.root_best.take(), incumbent) {
        (Some((v, cols)), _) if v < inc_value => Some(cols),
        (_, Some((_, cols))) => Some(cols),
        (Some((_, cols)), None) => Some(cols),
        (None, None) => None,
    };
    let Some(cols) = best_cols else {
        return Err(if aborted {
            ExactError::Infeasible("no feasible solution found within the time budget".into())
        } else {
            ExactError::Infeasible(format!("no assignment of customers to {m} robot(s) satisfies the constraints"))
        });
    };
    let sol = assemble(instance, &dm, p, &cols);
    let value = evaluate_with(instance, &dm, &sol).expect("assembled solution is structurally valid").value;
    // a root bound that meets the incumbent is a proof even when the search was cut short
    if aborted && root_lb < value - tol(value) {
        Ok(certificate(instance, &dm, sol, CertificateStatus::BoundOnly, Some(root_lb), started))
    } else {
        Ok(certificate(instance, &dm, sol, CertificateStatus::ProvenOptimal, None, started))
    }
}

fn certificate(
    instance: &ProblemInstance,
    dm: &DistanceMatrix,
    solution: Solution,
    status: CertificateStatus,
    lower_bound: Option<f64>,
    started: Instant,
) -> OptimalCertificate {
    let value = evaluate_with(instance, dm, &solution).expect("assembled solution is structurally valid");
    OptimalCertificate {
        value,
        solution,
        status,
        lower_bound: lower_bound.map(|lb| lb.min(value.value)).unwrap_or(value.value),
        solve_time: started.elapsed().as_secs_f64(),
    }
}

fn build_problem(instance: &ProblemInstance, dm: &DistanceMatrix) -> Result<Problem, ExactError> {
    let kind = instance.kind();
    let depots = instance.variant.depot_ids.clone();
    let customers = instance.customers();
    let c = customers.len();
    let m = instance.variant.route_count();
    let nd = depots.len();
    let kd: Vec<usize> = (0..nd).map(|d| (0..m).filter(|r| r % nd == d).count()).collect();
    let exact_fleet = VerifierConfig::for_variant(kind).require_nonempty_routes;
    let minmax = kind.objective_kind() == ObjectiveKind::Minmax;

    if exact_fleet && c < m {
        return Err(ExactError::Infeasible(format!(
            "{m} robots need nonempty routes but there are only {c} customers"
        )));
    }

    let load = if kind == VariantKind::Cvrp {
        let q = instance.variant.capacity.unwrap_or(u32::MAX) as u64;
        let dem: Vec<u32> = customers.iter().map(|&i| instance.locations[i].demand).collect();
        if let Some(pos) = dem.iter().position(|&x| x as u64 > q) {
            return Err(ExactError::Infeasible(format!(
                "location {} has demand {} above capacity {q}",
                customers[pos], dem[pos]
            )));
        }
        let total: u64 = dem.iter().map(|&x| x as u64).sum();
        if total > q * m as u64 {
            return Err(ExactError::Infeasible(format!(
                "total demand {total} exceeds fleet capacity {}",
                q * m as u64
            )));
        }
        let mut load = vec![0u32; 1 << c];
        for mask in 1usize..1 << c {
            let low = mask.trailing_zeros() as usize;
            load[mask] = load[mask & (mask - 1)] + dem[low];
        }
        Some((load, q))
    } else {
        None
    };

    let mut g = Vec::with_capacity(nd);
    for &depot in &depots {
        let mut costs = vec![INF; 1 << c];
        costs[0] = 0.0;
        let engine = Layered::new(dm, depot, &customers, Combine::Sum);
        let allowed = |mask: u32| match &load {
            Some((l, q)) => l[mask as usize] as u64 <= *q,
            None => true,
        };
        engine.run(c, false, allowed, |_, mask, _, closed, _| costs[mask as usize] = closed);
        g.push(costs);
    }
    let out_back = (0..c)
        .map(|i| (0..nd).map(|d| g[d][1 << i]).fold(INF, f64::min))
        .collect();

    Ok(Problem {
        c,
        customers,
        depots,
        kd,
        g,
        load,
        exact_fleet,
        minmax,
        out_back,
    })
}

/// Best heuristic partition as `(objective, [(mask, depot index)])`, with
/// route costs taken from the exact per-subset table.
fn incumbent(instance: &ProblemInstance, dm: &DistanceMatrix, p: &Problem) -> Option<(f64, Vec<(u32, u32)>)> {
    let mut pos = vec![usize::MAX; instance.n()];
    for (i, &id) in p.customers.iter().enumerate() {
        pos[id] = i;
    }
    let to_mask = |route: &[usize]| route.iter().fold(0u32, |m, &id| m | 1 << pos[id]);
    let mut candidates: Vec<Vec<(u32, u32)>> = Vec::new();

    if let Some((_, q)) = &p.load {
        let res = savings_cvrp(instance, dm);
        if res.fleet_feasible {
            candidates.push(
                res.solution
                    .routes
                    .iter()
                    .filter(|r| !r.interior().is_empty())
                    .map(|r| (to_mask(r.interior()), 0))
                    .collect(),
            );
        }
        let demands: Vec<u32> = instance.locations.iter().map(|l| l.demand).collect();
        for &depot in &p.depots {
            let order = giant_order(dm, depot, &p.customers);
            let slots = [DepotSlot { depot, robots: p.kd[0] }];
            let params = SplitParams {
                slots: &slots,
                objective: ObjectiveKind::Sum,
                require_nonempty: false,
                capacity: Some((&demands, *q)),
            };
            if let Some(split) = split_tour(dm, &order, &params) {
                candidates.push(split[0].iter().map(|r| (to_mask(r), 0)).collect());
            }
        }
    } else {
        let objective = if p.minmax { ObjectiveKind::Minmax } else { ObjectiveKind::Sum };
        let slots: Vec<DepotSlot> = p
            .depots
            .iter()
            .zip(&p.kd)
            .map(|(&depot, &robots)| DepotSlot { depot, robots })
            .collect();
        for &depot in &p.depots {
            let order = giant_order(dm, depot, &p.customers);
            let params = SplitParams {
                slots: &slots,
                objective,
                require_nonempty: p.exact_fleet,
                capacity: None,
            };
            if let Some(split) = split_tour(dm, &order, &params) {
                let mut cols = Vec::new();
                for (d, routes) in split.iter().enumerate() {
                    cols.extend(routes.iter().map(|r| (to_mask(r), d as u32)));
                }
                candidates.push(cols);
            }
        }
    }

    let mut best: Option<(f64, Vec<(u32, u32)>)> = None;
    for cols in candidates {
        let v = cols
            .iter()
            .map(|&(mask, d)| p.g[d as usize][mask as usize])
            .fold(0.0, |a, b| p.combine(a, b));
        if v < best.as_ref().map(|b| b.0).unwrap_or(INF) {
            best = Some((v, cols));
        }
    }
    best
}

/// Customer visiting order of a nearest-neighbor tour improved by 2-opt.
fn giant_order(dm: &DistanceMatrix, depot: usize, customers: &[usize]) -> Vec<usize> {
    let tour = two_opt_route(dm, &nearest_neighbor_over(dm, depot, customers));
    tour[1..tour.len() - 1].to_vec()
}

/// Subgradient ascent on the Lagrangian dual of the covering constraints.
/// Returns the best multiplier vector first.
fn lagrangian_duals(p: &Problem, ub: f64, deadline: Instant) -> Vec<Duals> {
    let c = p.c;
    let nd = p.kd.len();
    let mut u: Vec<f64> = p.out_back.iter().map(|&x| x / 2.0).collect();
    let mut su = vec![0.0f64; 1 << c];
    let mut best_l = -INF;
    let mut best_u = u.clone();
    let mut theta = 2.0;
    let mut stall = 0;

    // k smallest reduced costs per depot as (rc, mask), ascending
    let smallest = |su: &[f64], d: usize, k: usize| -> Vec<(f64, u32)> {
        let mut out: Vec<(f64, u32)> = Vec::with_capacity(k + 1);
        if k == 0 {
            return out;
        }
        let g = &p.g[d];
        for mask in 1..(1usize << c) {
            let gv = g[mask];
            if gv == INF {
                continue;
            }
            let rc = gv - su[mask];
            if out.len() == k && rc >= out[k - 1].0 {
                continue;
            }
            let at = out.partition_point(|e| e.0 <= rc);
            out.insert(at, (rc, mask as u32));
            out.truncate(k);
        }
        out
    };
    let fill_su = |u: &[f64], su: &mut [f64]| {
        for mask in 1usize..su.len() {
            su[mask] = su[mask & (mask - 1)] + u[mask.trailing_zeros() as usize];
        }
    };
    let admissible = |rc: f64| if p.exact_fleet { rc } else { rc.min(0.0) };

    for iter in 0..SUBGRADIENT_ITERS {
        fill_su(&u, &mut su);
        let mut l: f64 = u.iter().sum();
        let mut cover = vec![0i32; c];
        for d in 0..nd {
            for (rc, mask) in smallest(&su, d, p.kd[d]) {
                if !p.exact_fleet && rc >= 0.0 {
                    break;
                }
                l += rc;
                let mut x = mask;
                while x != 0 {
                    cover[x.trailing_zeros() as usize] += 1;
                    x &= x - 1;
                }
            }
        }
        if l > best_l + tol(l) * 1e-3 {
            best_l = l;
            best_u.clone_from(&u);
            stall = 0;
        } else {
            stall += 1;
            if stall >= 20 {
                theta /= 2.0;
                stall = 0;
            }
        }
        let norm: f64 = cover.iter().map(|&k| ((1 - k) as f64).powi(2)).sum();
        if norm == 0.0 || theta < 1e-3 || (iter >= MIN_SUBGRADIENT_ITERS && iter % 16 == 0 && Instant::now() >= deadline) {
            break;
        }
        let target = if ub.is_finite() { ub } else { best_l.abs() * 1.1 + 1.0 };
        let gap = (target - l).max(tol(target));
        if ub.is_finite() && best_l >= ub - tol(ub) {
            break;
        }
        let step = theta * gap / norm;
        for i in 0..c {
            u[i] += step * (1 - cover[i]) as f64;
        }
    }

    let make = |u: Vec<f64>, su: &mut Vec<f64>| {
        fill_su(&u, su);
        let prefix = (0..nd)
            .map(|d| {
                let mut acc = vec![0.0];
                let list = smallest(su, d, p.kd[d]);
                for j in 0..p.kd[d] {
                    // fewer routes than robots only happens without an exact fleet
                    let rc = list.get(j).map(|e| admissible(e.0)).unwrap_or(0.0);
                    acc.push(acc[j] + rc);
                }
                acc
            })
            .collect();
        Duals { u, prefix }
    };
    vec![make(best_u, &mut su)]
}

/// Routes grouped by their lowest customer, sorted by key.
fn build_columns(p: &Problem, duals: &Duals) -> Vec<Vec<Column>> {
    let c = p.c;
    let mut su = vec![0.0f64; 1 << c];
    for mask in 1usize..su.len() {
        su[mask] = su[mask & (mask - 1)] + duals.u[mask.trailing_zeros() as usize];
    }
    let mut cols: Vec<Vec<Column>> = vec![Vec::new(); c];
    for (d, g) in p.g.iter().enumerate() {
        if p.kd[d] == 0 {
            continue;
        }
        for mask in 1usize..1 << c {
            if g[mask] == INF {
                continue;
            }
            let key = if p.minmax { g[mask] } else { g[mask] - su[mask] };
            cols[mask.trailing_zeros() as usize].push(Column {
                key,
                mask: mask as u32,
                depot: d as u32,
            });
        }
    }
    for list in &mut cols {
        list.sort_by(|a, b| a.key.total_cmp(&b.key).then(a.mask.cmp(&b.mask)).then(a.depot.cmp(&b.depot)));
        list.shrink_to_fit();
    }
    cols
}

struct Search<'a> {
    p: &'a Problem,
    cols: &'a [Vec<Column>],
    duals: &'a [Duals],
    stride: Vec<u32>,
    memo: HashMap<u64, Memo>,
    deadline: Instant,
    ignore_deadline: bool,
    aborted: bool,
    nodes: u64,
    root_key: u64,
    root_best: Option<(f64, Vec<(u32, u32)>)>,
}

impl Search<'_> {
    fn lower_bound(&self, s: u32, ks: &[usize], ktot: usize) -> f64 {
        let sum_lb = self.duals.iter().map(|d| d.bound(s, ks)).fold(0.0, f64::max);
        if !self.p.minmax {
            return sum_lb;
        }
        let mut lb = sum_lb / ktot.max(1) as f64;
        let mut x = s;
        while x != 0 {
            lb = lb.max(self.p.out_back[x.trailing_zeros() as usize]);
            x &= x - 1;
        }
        lb
    }

    fn note_at_least(&mut self, key: u64, v: f64) {
        let e = self.memo.entry(key).or_insert(Memo::AtLeast(v));
        if let Memo::AtLeast(old) = e {
            *old = old.max(v);
        }
    }

    /// Optimal value of covering `s` with the robots in `ks`, if it is
    /// below `budget`.
    fn search(&mut self, s: u32, ks: &mut [usize], kcode: u32, ktot: usize, budget: f64) -> Option<f64> {
        let p = self.p;
        if s == 0 {
            if p.exact_fleet && ktot > 0 {
                return None;
            }
            return (0.0 < budget).then_some(0.0);
        }
        if ktot == 0 {
            return None;
        }
        let size = s.count_ones() as usize;
        if p.exact_fleet && size < ktot {
            return None;
        }
        if let Some((load, q)) = &p.load {
            if load[s as usize] as u64 > ktot as u64 * q {
                return None;
            }
        }
        let key = (s as u64) << 32 | kcode as u64;
        match self.memo.get(&key) {
            Some(Memo::Exact(v, _)) => return (*v < budget).then_some(*v),
            Some(Memo::AtLeast(b)) if *b >= budget => return None,
            _ => {}
        }
        self.nodes += 1;
        if self.nodes & 1023 == 1 {
            if !self.ignore_deadline && Instant::now() >= self.deadline {
                self.aborted = true;
            }
            if self.memo.len() > MEMO_LIMIT {
                self.memo.clear();
            }
        }
        if self.aborted {
            return None;
        }
        let lb = self.lower_bound(s, ks, ktot);
        if lb - tol(lb) >= budget {
            self.note_at_least(key, lb - tol(lb));
            return None;
        }

        // bound pieces for the first multiplier vector
        let d0 = &self.duals[0];
        let lb0 = d0.bound(s, ks);
        let drops: Vec<f64> = (0..ks.len())
            .map(|d| if ks[d] > 0 { d0.prefix[d][ks[d]] - d0.prefix[d][ks[d] - 1] } else { -INF })
            .collect();
        let max_drop = drops.iter().copied().fold(-INF, f64::max);

        let lowest = s.trailing_zeros() as usize;
        let min_rest = if p.exact_fleet { ktot - 1 } else { 0 };
        let is_root = key == self.root_key;
        let mut best = budget;
        let mut choice = None;
        let cols = self.cols;
        for col in &cols[lowest] {
            if p.minmax {
                if col.key >= best {
                    break;
                }
            } else {
                let floor = lb0 + col.key - max_drop;
                if floor - tol(floor) >= best {
                    break;
                }
            }
            if col.mask & !s != 0 {
                continue;
            }
            let d = col.depot as usize;
            if ks[d] == 0 {
                continue;
            }
            let rest = s & !col.mask;
            if (rest.count_ones() as usize) < min_rest {
                continue;
            }
            if let Some((load, q)) = &p.load {
                if load[rest as usize] as u64 > (ktot as u64 - 1) * q {
                    continue;
                }
            }
            let g = p.g[d][col.mask as usize];
            let child_budget = if p.minmax {
                best
            } else {
                let floor = lb0 + col.key - drops[d];
                if floor - tol(floor) >= best {
                    continue;
                }
                best - g
            };
            ks[d] -= 1;
            let r = self.search(rest, ks, kcode - self.stride[d], ktot - 1, child_budget);
            ks[d] += 1;
            if self.aborted {
                return None;
            }
            if let Some(v) = r {
                let val = p.combine(g, v);
                if val < best {
                    best = val;
                    choice = Some((col.mask, col.depot));
                    if is_root {
                        ks[d] -= 1;
                        let mut cols_out = self.reconstruct(rest, ks, kcode - self.stride[d], ktot - 1);
                        ks[d] += 1;
                        cols_out.push((col.mask, col.depot));
                        self.root_best = Some((val, cols_out));
                    }
                }
            }
        }
        match choice {
            Some(ch) => {
                self.memo.insert(key, Memo::Exact(best, Some(ch)));
                Some(best)
            }
            None => {
                self.note_at_least(key, budget);
                None
            }
        }
    }

    fn reconstruct(&mut self, s: u32, ks: &mut [usize], kcode: u32, ktot: usize) -> Vec<(u32, u32)> {
        let (mut s, mut kcode, mut ktot) = (s, kcode, ktot);
        let mut ks = ks.to_vec();
        let mut out = Vec::new();
        while s != 0 {
            let key = (s as u64) << 32 | kcode as u64;
            let ch = match self.memo.get(&key) {
                Some(Memo::Exact(_, Some(ch))) => *ch,
                _ => {
                    let saved = self.ignore_deadline;
                    self.ignore_deadline = true;
                    self.memo.remove(&key);
                    self.search(s, &mut ks, kcode, ktot, INF);
                    self.ignore_deadline = saved;
                    match self.memo.get(&key) {
                        Some(Memo::Exact(_, Some(ch))) => *ch,
                        _ => unreachable!("subproblem on an optimal path is feasible"),
                    }
                }
            };
            out.push(ch);
            let d = ch.1 as usize;
            s &= !ch.0;
            ks[d] -= 1;
            kcode -= self.stride[d];
            ktot -= 1;
        }
        out
    }
}

/// Turns chosen `(mask, depot index)` columns into a full solution with one
/// route per robot.
fn assemble(instance: &ProblemInstance, dm: &DistanceMatrix, p: &Problem, cols: &[(u32, u32)]) -> Solution {
    let nd = p.depots.len();
    let mut per_depot: Vec<Vec<Vec<usize>>> = vec![Vec::new(); nd];
    for &(mask, d) in cols {
        let depot = p.depots[d as usize];
        let nodes: Vec<usize> = (0..p.c).filter(|&i| mask & (1 << i) != 0).map(|i| p.customers[i]).collect();
        let engine = Layered::new(dm, depot, &nodes, Combine::Sum);
        let mut last = 0;
        let parents = engine.run(nodes.len(), true, |_| true, |t, _, _, _, l| {
            if t == nodes.len() {
                last = l;
            }
        });
        let full = ((1u64 << nodes.len()) - 1) as u32;
        let mut visits = vec![depot];
        visits.extend(engine.path(&parents, full, last).into_iter().map(|i| nodes[i]));
        visits.push(depot);
        per_depot[d as usize].push(visits);
    }
    for routes in &mut per_depot {
        routes.sort();
    }
    let m = instance.variant.route_count();
    let mut next = vec![0usize; nd];
    let routes = (0..m)
        .map(|r| {
            let d = r % nd;
            let depot = p.depots[d];
            let route = per_depot[d].get(next[d]).cloned().unwrap_or_else(|| vec![depot, depot]);
            next[d] += 1;
            Route::new(route)
        })
        .collect();
    Solution::new(routes)
}
