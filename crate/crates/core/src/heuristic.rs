//! Constructive and local-search heuristics. Used as branch-and-bound
//! incumbents and as sanity baselines in reports.

use crate::routing::{DistanceMatrix, ObjectiveKind, ProblemInstance, Route, Solution};

const IMPROVE_EPS: f64 = 1e-10;

/// Greedy tour over every location, starting and ending at `depot`.
/// Ties go to the smaller id.
pub fn nearest_neighbor(dm: &DistanceMatrix, depot: usize) -> Solution {
    let nodes: Vec<usize> = (0..dm.n()).filter(|&i| i != depot).collect();
    Solution::single(nearest_neighbor_over(dm, depot, &nodes))
}

/// Greedy closed walk from `depot` through exactly `nodes`.
pub fn nearest_neighbor_over(dm: &DistanceMatrix, depot: usize, nodes: &[usize]) -> Vec<usize> {
    let mut left: Vec<usize> = nodes.to_vec();
    left.sort_unstable();
    let mut tour = Vec::with_capacity(nodes.len() + 2);
    tour.push(depot);
    let mut cur = depot;
    while !left.is_empty() {
        let mut best = 0;
        for (idx, &c) in left.iter().enumerate() {
            if dm.get(cur, c) < dm.get(cur, left[best]) {
                best = idx;
            }
        }
        cur = left.remove(best);
        tour.push(cur);
    }
    tour.push(depot);
    tour
}

/// Best-improvement 2-opt on every route of `solution` until no exchange
/// shortens any route.
pub fn two_opt(dm: &DistanceMatrix, solution: &Solution) -> Solution {
    Solution::new(
        solution
            .routes
            .iter()
            .map(|r| Route::new(two_opt_route(dm, &r.visits)))
            .collect(),
    )
}

pub fn two_opt_route(dm: &DistanceMatrix, visits: &[usize]) -> Vec<usize> {
    let mut tour = visits.to_vec();
    let len = tour.len();
    if len < 5 {
        return tour;
    }
    loop {
        let mut best_gain = IMPROVE_EPS;
        let mut best = None;
        // reverse tour[i..=j]; endpoints stay fixed
        for i in 1..len - 2 {
            for j in (i + 1)..len - 1 {
                let (a, b, c, d) = (tour[i - 1], tour[i], tour[j], tour[j + 1]);
                let gain = dm.get(a, b) + dm.get(c, d) - dm.get(a, c) - dm.get(b, d);
                if gain > best_gain {
                    best_gain = gain;
                    best = Some((i, j));
                }
            }
        }
        match best {
            Some((i, j)) => tour[i..=j].reverse(),
            None => return tour,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SavingsResult {
    pub solution: Solution,
    /// False when more routes than robots were needed; the solution then
    /// has more than `m` routes and is not a valid fleet assignment.
    pub fleet_feasible: bool,
}

/// Clarke-Wright parallel savings for CVRP, followed by 2-opt on each route
/// and greedy merging of the lightest routes down to the fleet size.
pub fn savings_cvrp(instance: &ProblemInstance, dm: &DistanceMatrix) -> SavingsResult {
    let depot = instance.depot();
    let q = instance.variant.capacity.unwrap_or(u32::MAX) as u64;
    let m = instance.variant.route_count();
    let customers = instance.customers();
    let demand = |c: usize| instance.locations[c].demand as u64;

    // route id per customer; each route is a deque of customers
    let mut routes: Vec<Option<Vec<usize>>> = customers.iter().map(|&c| Some(vec![c])).collect();
    let mut loads: Vec<u64> = customers.iter().map(|&c| demand(c)).collect();
    let mut owner = vec![usize::MAX; instance.n()];
    for (r, &c) in customers.iter().enumerate() {
        owner[c] = r;
    }

    let mut savings = Vec::new();
    for (a, &i) in customers.iter().enumerate() {
        for &j in &customers[a + 1..] {
            savings.push((dm.get(depot, i) + dm.get(depot, j) - dm.get(i, j), i, j));
        }
    }
    savings.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));

    for &(s, i, j) in &savings {
        if s <= 0.0 {
            break;
        }
        let (ri, rj) = (owner[i], owner[j]);
        if ri == rj || loads[ri] + loads[rj] > q {
            continue;
        }
        let a = routes[ri].as_ref().unwrap();
        let b = routes[rj].as_ref().unwrap();
        let merged = if *a.last().unwrap() == i && b[0] == j {
            concat(a, b)
        } else if a[0] == i && *b.last().unwrap() == j {
            concat(b, a)
        } else if *a.last().unwrap() == i && *b.last().unwrap() == j {
            concat(a, &rev(b))
        } else if a[0] == i && b[0] == j {
            concat(&rev(a), b)
        } else {
            continue;
        };
        for &c in &merged {
            owner[c] = ri;
        }
        loads[ri] += loads[rj];
        routes[ri] = Some(merged);
        routes[rj] = None;
    }

    let mut built: Vec<(u64, Vec<usize>)> = routes
        .into_iter()
        .zip(loads)
        .filter_map(|(r, l)| r.map(|r| (l, r)))
        .collect();

    // merge lightest pairs while over the fleet size
    while built.len() > m {
        built.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
        if built[0].0 + built[1].0 > q {
            break;
        }
        let (l1, r1) = built.remove(0);
        let (l0, r0) = built.remove(0);
        built.push((l0 + l1, concat(&r0, &r1)));
    }
    let fleet_feasible = built.len() <= m;

    let mut out: Vec<Vec<usize>> = built
        .into_iter()
        .map(|(_, r)| {
            let mut v = vec![depot];
            v.extend(r);
            v.push(depot);
            two_opt_route(dm, &v)
        })
        .collect();
    out.sort();
    while out.len() < m {
        out.push(vec![depot, depot]);
    }
    SavingsResult {
        solution: Solution::new(out.into_iter().map(Route::new).collect()),
        fleet_feasible,
    }
}

fn concat(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().chain(b).copied().collect()
}

fn rev(a: &[usize]) -> Vec<usize> {
    a.iter().rev().copied().collect()
}

/// Robots stationed at one depot.
#[derive(Debug, Clone, Copy)]
pub struct DepotSlot {
    pub depot: usize,
    pub robots: usize,
}

pub struct SplitParams<'a> {
    pub slots: &'a [DepotSlot],
    pub objective: ObjectiveKind,
    /// Every robot gets at least one customer.
    pub require_nonempty: bool,
    /// Per-location demand and capacity.
    pub capacity: Option<(&'a [u32], u64)>,
}

/// Optimal split of a fixed customer order into contiguous segments, one per
/// robot. Returns per-slot lists of routes (without depots), or `None` when
/// no split satisfies the constraints.
pub fn split_tour(dm: &DistanceMatrix, order: &[usize], params: &SplitParams) -> Option<Vec<Vec<Vec<usize>>>> {
    let c = order.len();
    let slots = params.slots;
    let radix: Vec<usize> = slots.iter().map(|s| s.robots + 1).collect();
    let states: usize = radix.iter().product();
    let decode = |mut st: usize| -> Vec<usize> {
        radix
            .iter()
            .map(|&r| {
                let v = st % r;
                st /= r;
                v
            })
            .collect()
    };
    let mut stride = vec![1usize; slots.len()];
    for s in 1..slots.len() {
        stride[s] = stride[s - 1] * radix[s - 1];
    }

    let combine = |a: f64, b: f64| match params.objective {
        ObjectiveKind::Minmax => a.max(b),
        _ => a + b,
    };
    const INF: f64 = f64::INFINITY;
    let mut best = vec![vec![INF; states]; c + 1];
    let mut back: Vec<Vec<Option<(usize, usize, usize)>>> = vec![vec![None; states]; c + 1];
    best[0][0] = 0.0;
    for pos in 0..c {
        for st in 0..states {
            let base = best[pos][st];
            if base == INF {
                continue;
            }
            let used = decode(st);
            for (s, slot) in slots.iter().enumerate() {
                if used[s] >= slot.robots {
                    continue;
                }
                let mut load = 0u64;
                let mut inner = 0.0;
                for end in pos..c {
                    if let Some((dem, q)) = params.capacity {
                        load += dem[order[end]] as u64;
                        if load > q {
                            break;
                        }
                    }
                    if end > pos {
                        inner += dm.get(order[end - 1], order[end]);
                    }
                    let cost = dm.get(slot.depot, order[pos]) + inner + dm.get(order[end], slot.depot);
                    let v = combine(base, cost);
                    let nst = st + stride[s];
                    if v < best[end + 1][nst] {
                        best[end + 1][nst] = v;
                        back[end + 1][nst] = Some((pos, st, s));
                    }
                }
            }
        }
    }

    let full = slots.iter().enumerate().map(|(s, sl)| sl.robots * stride[s]).sum::<usize>();
    let end_state = if params.require_nonempty {
        (best[c][full] < INF).then_some(full)
    } else {
        (0..states)
            .filter(|&st| best[c][st] < INF)
            .min_by(|&a, &b| best[c][a].total_cmp(&best[c][b]).then(a.cmp(&b)))
    }?;

    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new(); slots.len()];
    let (mut pos, mut st) = (c, end_state);
    while pos > 0 {
        let (p, pst, s) = back[pos][st]?;
        out[s].push(order[p..pos].to_vec());
        pos = p;
        st = pst;
    }
    for routes in &mut out {
        routes.reverse();
    }
    Some(out)
}
