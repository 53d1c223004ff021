//! Exhaustive solvers used as test oracles, and a seeded instance generator.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AtspInstance, GtspInstance, GtspTour, Weight, WeightedArc};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::Vertex;

pub const GTSP_BRUTE_CAP: usize = 10;
/// Large enough for any conversion of a GTSP instance with at most nine
/// vertices (`2n - g + m <= 2n`).
pub const ATSP_BRUTE_CAP: usize = 18;

/// Weighted adjacency with vertices renumbered `0..n`.
struct Adjacency {
    succ: Vec<Vec<(usize, Weight)>>,
}

impl Adjacency {
    fn new(n: usize, arcs: &[WeightedArc]) -> Self {
        let mut succ = vec![Vec::new(); n];
        for a in arcs {
            succ[a.from as usize - 1].push((a.to as usize - 1, a.weight));
        }
        for s in &mut succ {
            s.sort_unstable();
        }
        Adjacency { succ }
    }

    fn weight(&self, u: usize, w: usize) -> Option<Weight> {
        self.succ[u].iter().find(|&&(x, _)| x == w).map(|&(_, c)| c)
    }
}

type Best = Option<(Weight, Vec<usize>)>;

fn better(candidate: &(Weight, Vec<usize>), best: &Best) -> bool {
    best.as_ref().is_none_or(|b| (candidate.0, &candidate.1) < (b.0, &b.1))
}

fn merge(results: Vec<Best>) -> Best {
    results.into_iter().flatten().min_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)))
}

/// Depth-first search over simple paths. `key(v)` is the bit a vertex
/// occupies in the visited mask (the vertex itself or its group), and the
/// search closes the cycle once `full` bits are set.
struct CycleSearch<'a> {
    adj: &'a Adjacency,
    key: &'a dyn Fn(usize) -> u64,
    full: u64,
    best: Best,
}

impl CycleSearch<'_> {
    fn extend(&mut self, path: &mut Vec<usize>, mask: u64, cost: Weight) {
        if self.best.as_ref().is_some_and(|b| cost > b.0) {
            return;
        }
        let last = *path.last().expect("non-empty path");
        if mask == self.full {
            if let Some(back) = self.adj.weight(last, path[0]) {
                let candidate = (cost + back, path.clone());
                if better(&candidate, &self.best) {
                    self.best = Some(candidate);
                }
            }
            return;
        }
        for &(next, w) in &self.adj.succ[last] {
            let bit = (self.key)(next);
            if mask & bit != 0 {
                continue;
            }
            path.push(next);
            self.extend(path, mask | bit, cost + w);
            path.pop();
        }
    }
}

/// Runs the search from every two-vertex prefix in parallel.
fn solve(adj: &Adjacency, starts: &[usize], key: &(dyn Fn(usize) -> u64 + Sync), full: u64, exec: Exec) -> Best {
    let prefixes: Vec<(usize, usize, Weight)> = starts
        .iter()
        .flat_map(|&s| adj.succ[s].iter().filter(move |&&(n, _)| key(n) & key(s) == 0).map(move |&(n, w)| (s, n, w)))
        .collect();
    let results = exec.map(&prefixes, |&(s, n, w)| {
        let mut search = CycleSearch { adj, key, full, best: None };
        search.extend(&mut vec![s, n], key(s) | key(n), w);
        search.best
    });
    merge(results)
}

/// Optimum of `inst`, or `None` when no tour exists. A tour needs at least
/// two groups. The returned tour starts in group 1; ties go to the
/// lexicographically smallest vertex sequence.
pub fn brute_force_gtsp(inst: &GtspInstance, exec: Exec) -> Result<Option<GtspTour>> {
    if inst.n > GTSP_BRUTE_CAP {
        return Err(Error::TooLarge { order: inst.n, cap: GTSP_BRUTE_CAP });
    }
    if inst.group_count() < 2 {
        return Ok(None);
    }
    let adj = Adjacency::new(inst.n, &inst.arcs);
    let locate = inst.locate();
    let key = |v: usize| 1u64 << locate[v + 1].0;
    let full = (1u64 << inst.group_count()) - 1;
    let starts: Vec<usize> = inst.groups[0].iter().map(|&v| v as usize - 1).collect();
    Ok(solve(&adj, &starts, &key, full, exec)
        .map(|(cost, path)| GtspTour { vertices: path.into_iter().map(|v| v as Vertex + 1).collect(), cost }))
}

/// Optimal Hamiltonian cycle of `inst` as `(cost, cycle starting at 1)`.
pub fn brute_force_atsp(inst: &AtspInstance, exec: Exec) -> Result<Option<(Weight, Vec<Vertex>)>> {
    if inst.order > ATSP_BRUTE_CAP {
        return Err(Error::TooLarge { order: inst.order, cap: ATSP_BRUTE_CAP });
    }
    if inst.order < 2 {
        return Ok(None);
    }
    let adj = Adjacency::new(inst.order, &inst.arcs);
    let key = |v: usize| 1u64 << v;
    let full = (1u64 << inst.order) - 1;
    Ok(solve(&adj, &[0], &key, full, exec).map(|(c, p)| (c, p.into_iter().map(|v| v as Vertex + 1).collect())))
}

/// Every Hamiltonian cycle of `inst`, each listed once starting at vertex 1,
/// stopping after `limit` cycles.
pub fn hamiltonian_cycles(inst: &AtspInstance, limit: usize) -> Result<Vec<Vec<Vertex>>> {
    if inst.order > ATSP_BRUTE_CAP {
        return Err(Error::TooLarge { order: inst.order, cap: ATSP_BRUTE_CAP });
    }
    let adj = Adjacency::new(inst.order, &inst.arcs);
    let mut out = Vec::new();
    if inst.order < 2 {
        return Ok(out);
    }
    fn go(adj: &Adjacency, path: &mut Vec<usize>, mask: u64, n: usize, limit: usize, out: &mut Vec<Vec<Vertex>>) {
        if out.len() >= limit {
            return;
        }
        let last = *path.last().expect("non-empty");
        if path.len() == n {
            if adj.weight(last, 0).is_some() {
                out.push(path.iter().map(|&v| v as Vertex + 1).collect());
            }
            return;
        }
        for &(next, _) in &adj.succ[last] {
            if mask & (1 << next) == 0 {
                path.push(next);
                go(adj, path, mask | (1 << next), n, limit, out);
                path.pop();
            }
        }
    }
    go(&adj, &mut vec![0], 1, inst.order, limit, &mut out);
    Ok(out)
}

/// Parameters of [`random_instance`]. Bounds are inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomParams {
    pub max_n: usize,
    pub min_groups: usize,
    pub max_groups: usize,
    pub max_weight: Weight,
    /// Each inter-group arc is present with a probability drawn uniformly
    /// from `[min_density, 1]`.
    pub min_density: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { max_n: 9, min_groups: 2, max_groups: 4, max_weight: 100, min_density: 0.6 }
    }
}

/// Deterministic random GTSP instance for `seed`.
pub fn random_instance(params: &RandomParams, seed: u64) -> GtspInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = rng.gen_range(params.min_groups..=params.max_groups);
    let n = rng.gen_range(g..=params.max_n.max(g));
    let mut vertices: Vec<Vertex> = (1..=n as Vertex).collect();
    vertices.shuffle(&mut rng);
    // Cut points split the shuffled vertices into g non-empty groups.
    let mut cuts: Vec<usize> = (1..n).collect();
    cuts.shuffle(&mut rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(g - 1).collect();
    cuts.sort_unstable();
    cuts.push(n);
    let mut groups = Vec::with_capacity(g);
    let mut start = 0;
    for c in cuts {
        groups.push(vertices[start..c].to_vec());
        start = c;
    }
    let density = rng.gen_range(params.min_density..=1.0);
    let mut group_of = vec![0; n + 1];
    for (gi, grp) in groups.iter().enumerate() {
        for &v in grp {
            group_of[v as usize] = gi;
        }
    }
    let mut arcs = Vec::new();
    for u in 1..=n as Vertex {
        for w in 1..=n as Vertex {
            if group_of[u as usize] != group_of[w as usize] && rng.gen_bool(density) {
                arcs.push(WeightedArc { from: u, to: w, weight: rng.gen_range(0..=params.max_weight) });
            }
        }
    }
    GtspInstance::new(format!("random-{seed}"), n, groups, arcs).expect("generator builds valid instances").0
}
