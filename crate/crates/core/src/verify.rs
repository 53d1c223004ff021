//! Exhaustive oracle for the in-out property.
//!
//! Both conditions are decided by depth-first search over bitmask graphs:
//! the paired vertices condition by enumerating every Hamiltonian path from
//! each incoming vertex, the single visit condition by searching for a cover
//! of all vertices by two or more in-to-out paths. Nothing here relies on how
//! a graph was constructed.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{satisfies_bipartite_shortcut, DiGraph, InOutGraph, Vertex};

/// Default largest order the oracle accepts.
pub const DEFAULT_ORACLE_CAP: usize = 25;
/// Bitmask width; the cap can never exceed it.
pub const MAX_ORACLE_ORDER: usize = 64;

/// How covers in the single visit search may be formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverRules {
    /// Paths must share no vertex. When false, paths need only share no arc
    /// and each path must reach a vertex not covered by the paths before it.
    pub vertex_disjoint: bool,
    /// A lone vertex that is both incoming and outgoing counts as a path.
    pub allow_trivial_paths: bool,
}

impl Default for CoverRules {
    fn default() -> Self {
        CoverRules { vertex_disjoint: true, allow_trivial_paths: true }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub oracle_cap: usize,
    /// Run the cover search even when the bipartite shortcut applies.
    pub paranoid: bool,
    pub cover_rules: CoverRules,
    pub exec: Exec,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            oracle_cap: DEFAULT_ORACLE_CAP,
            paranoid: false,
            cover_rules: CoverRules::default(),
            exec: Exec::default(),
        }
    }
}

impl VerifyOptions {
    pub fn paranoid() -> Self {
        VerifyOptions { paranoid: true, ..Self::default() }
    }
}

/// Dense bitmask view of a graph, vertices 0-indexed.
#[derive(Debug, Clone)]
pub(crate) struct BitGraph {
    pub n: usize,
    pub succ: Vec<u64>,
    pub pred: Vec<u64>,
}

#[inline]
fn bit(v: usize) -> u64 {
    1u64 << v
}

#[inline]
fn full_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        bit(n) - 1
    }
}

/// Iterates set bits in increasing order.
#[inline]
fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(v)
        }
    })
}

impl BitGraph {
    pub fn empty(n: usize) -> Self {
        BitGraph { n, succ: vec![0; n], pred: vec![0; n] }
    }

    pub fn from_digraph(g: &DiGraph) -> Self {
        let mut bg = BitGraph::empty(g.order());
        for &(u, w) in g.arcs() {
            bg.add(u as usize - 1, w as usize - 1);
        }
        bg
    }

    #[inline]
    pub fn add(&mut self, u: usize, w: usize) {
        self.succ[u] |= bit(w);
        self.pred[w] |= bit(u);
    }

    #[inline]
    pub fn remove(&mut self, u: usize, w: usize) {
        self.succ[u] &= !bit(w);
        self.pred[w] &= !bit(u);
    }

    fn full(&self) -> u64 {
        full_mask(self.n)
    }

    /// Vertices of `within` reachable from `from` moving only inside `within`.
    fn reach(&self, from: usize, within: u64) -> u64 {
        let mut seen = 0u64;
        let mut frontier = self.succ[from] & within;
        while frontier != 0 {
            seen |= frontier;
            let mut next = 0;
            for v in bits(frontier) {
                next |= self.succ[v];
            }
            frontier = next & within & !seen;
        }
        seen
    }
}

/// Incoming/outgoing labels, 0-indexed.
#[derive(Debug, Clone)]
pub(crate) struct Labels {
    pub incoming: Vec<usize>,
    pub outgoing: Vec<usize>,
    pub in_mask: u64,
    pub out_mask: u64,
}

impl Labels {
    pub fn new(incoming: Vec<usize>, outgoing: Vec<usize>) -> Self {
        let in_mask = incoming.iter().fold(0, |m, &v| m | bit(v));
        let out_mask = outgoing.iter().fold(0, |m, &v| m | bit(v));
        Labels { incoming, outgoing, in_mask, out_mask }
    }

    pub fn from_inout(g: &InOutGraph) -> Self {
        let z = |xs: &[Vertex]| xs.iter().map(|&v| v as usize - 1).collect();
        Labels::new(z(&g.incoming), z(&g.outgoing))
    }
}

struct PathSearch<'a, F> {
    bg: &'a BitGraph,
    full: u64,
    target: Option<usize>,
    path: Vec<usize>,
    visit: F,
}

impl<F: FnMut(&[usize]) -> ControlFlow<()>> PathSearch<'_, F> {
    fn dfs(&mut self, visited: u64) -> ControlFlow<()> {
        let cur = *self.path.last().expect("path starts non-empty");
        if visited == self.full {
            if self.target.is_none_or(|t| t == cur) {
                return (self.visit)(&self.path);
            }
            return ControlFlow::Continue(());
        }
        if self.target == Some(cur) {
            return ControlFlow::Continue(());
        }
        let open = self.full & !visited;
        let mut dead_ends = 0;
        for u in bits(open) {
            if self.bg.pred[u] & (open | bit(cur)) == 0 {
                return ControlFlow::Continue(());
            }
            if self.bg.succ[u] & open == 0 {
                if self.target.is_some_and(|t| t != u) {
                    return ControlFlow::Continue(());
                }
                dead_ends += 1;
            }
        }
        if dead_ends > 1 || self.bg.reach(cur, open) != open {
            return ControlFlow::Continue(());
        }
        for w in bits(self.bg.succ[cur] & open) {
            self.path.push(w);
            let flow = self.dfs(visited | bit(w));
            self.path.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
}

/// Calls `visit` for every Hamiltonian path starting at `start` (and ending
/// at `target`, when given). Returning `Break` stops the enumeration.
pub(crate) fn for_each_ham_path(
    bg: &BitGraph,
    start: usize,
    target: Option<usize>,
    visit: impl FnMut(&[usize]) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let mut search = PathSearch { bg, full: bg.full(), target, path: vec![start], visit };
    search.dfs(bit(start))
}

/// Hamiltonian-path census between incoming and outgoing vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathCensus {
    /// `exists[j][m]`: some Hamiltonian path runs from `i_{j+1}` to `o_{m+1}`.
    pub exists: Vec<Vec<bool>>,
    /// Number of such paths.
    pub counts: Vec<Vec<u64>>,
    /// One example path per entry, when any exists.
    pub examples: Vec<Vec<Option<Vec<Vertex>>>>,
}

fn check_cap(order: usize, cap: usize) -> Result<()> {
    let cap = cap.min(MAX_ORACLE_ORDER);
    if order > cap {
        return Err(Error::TooLarge { order, cap });
    }
    Ok(())
}

pub fn path_census(g: &InOutGraph, cap: usize, exec: Exec) -> Result<PathCensus> {
    check_cap(g.order(), cap)?;
    let bg = BitGraph::from_digraph(&g.graph);
    let labels = Labels::from_inout(g);
    let k = g.k();
    let rows = exec.map(&labels.incoming, |&start| {
        let mut counts = vec![0u64; k];
        let mut examples: Vec<Option<Vec<Vertex>>> = vec![None; k];
        let _ = for_each_ham_path(&bg, start, None, |path| {
            let end = *path.last().expect("non-empty");
            for (m, &o) in labels.outgoing.iter().enumerate() {
                if o == end {
                    counts[m] += 1;
                    if examples[m].is_none() {
                        examples[m] = Some(path.iter().map(|&v| v as Vertex + 1).collect());
                    }
                }
            }
            ControlFlow::Continue(())
        });
        (counts, examples)
    });
    let (counts, examples): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let exists = counts.iter().map(|row: &Vec<u64>| row.iter().map(|&c| c > 0).collect()).collect();
    Ok(PathCensus { exists, counts, examples })
}

/// `k x k` matrix whose entry `(j, m)` says whether a Hamiltonian path runs
/// from `i_j` to `o_m`.
pub fn ham_path_matrix(g: &InOutGraph, opts: &VerifyOptions) -> Result<Vec<Vec<bool>>> {
    Ok(path_census(g, opts.oracle_cap, opts.exec)?.exists)
}

/// Every Hamiltonian path of `g` from `from` to `to`.
pub fn paths_between(g: &DiGraph, from: Vertex, to: Vertex, cap: usize) -> Result<Vec<Vec<Vertex>>> {
    check_cap(g.order(), cap)?;
    let bg = BitGraph::from_digraph(g);
    let mut out = Vec::new();
    let _ = for_each_ham_path(&bg, from as usize - 1, Some(to as usize - 1), |p| {
        out.push(p.iter().map(|&v| v as Vertex + 1).collect());
        ControlFlow::Continue(())
    });
    Ok(out)
}

struct VertexCoverSearch<'a> {
    bg: &'a BitGraph,
    labels: &'a Labels,
    full: u64,
    allow_trivial: bool,
    paths: Vec<Vec<usize>>,
}

impl VertexCoverSearch<'_> {
    fn start_new(&mut self, covered: u64, min_start: usize) -> bool {
        let candidates = self.labels.in_mask & !covered & !(bit(min_start) - 1);
        for s in bits(candidates) {
            self.paths.push(vec![s]);
            if self.extend(covered | bit(s), s) {
                return true;
            }
            self.paths.pop();
        }
        false
    }

    fn hopeless(&self, covered: u64, tail: usize, start: usize) -> bool {
        let open = self.full & !covered;
        let later_starts = self.labels.in_mask & !(bit(start + 1) - 1);
        bits(open).any(|u| {
            let stuck = self.labels.out_mask & bit(u) == 0 && self.bg.succ[u] & open == 0;
            let unreachable = later_starts & bit(u) == 0 && self.bg.pred[u] & (open | bit(tail)) == 0;
            stuck || unreachable
        })
    }

    fn extend(&mut self, covered: u64, start: usize) -> bool {
        let path = self.paths.last().expect("current path");
        let tail = *path.last().expect("non-empty path");
        let len = path.len();
        if self.hopeless(covered, tail, start) {
            return false;
        }
        if self.labels.out_mask & bit(tail) != 0 && (len >= 2 || self.allow_trivial) {
            if covered == self.full {
                if self.paths.len() >= 2 {
                    return true;
                }
            } else if self.start_new(covered, start + 1) {
                return true;
            }
        }
        for w in bits(self.bg.succ[tail] & !covered) {
            self.paths.last_mut().expect("current path").push(w);
            if self.extend(covered | bit(w), start) {
                return true;
            }
            self.paths.last_mut().expect("current path").pop();
        }
        false
    }
}

struct ArcCoverSearch<'a> {
    bg: &'a BitGraph,
    labels: &'a Labels,
    full: u64,
    allow_trivial: bool,
    used: Vec<u64>,
    paths: Vec<Vec<usize>>,
}

impl ArcCoverSearch<'_> {
    fn start_new(&mut self, covered: u64, min_start: usize) -> bool {
        let candidates = self.labels.in_mask & !(bit(min_start) - 1);
        for s in bits(candidates) {
            self.paths.push(vec![s]);
            if self.extend(covered, covered | bit(s), bit(s), s) {
                return true;
            }
            self.paths.pop();
        }
        false
    }

    /// `before` is the coverage when the current path began; `on_path` holds
    /// the current path's own vertices.
    fn extend(&mut self, before: u64, covered: u64, on_path: u64, start: usize) -> bool {
        let path = self.paths.last().expect("current path");
        let tail = *path.last().expect("non-empty path");
        let len = path.len();
        let adds_new = covered != before;
        if adds_new && self.labels.out_mask & bit(tail) != 0 && (len >= 2 || self.allow_trivial) {
            if covered == self.full {
                if self.paths.len() >= 2 {
                    return true;
                }
            } else if self.start_new(covered, start) {
                return true;
            }
        }
        for w in bits(self.bg.succ[tail] & !self.used[tail] & !on_path) {
            self.used[tail] |= bit(w);
            self.paths.last_mut().expect("current path").push(w);
            if self.extend(before, covered | bit(w), on_path | bit(w), start) {
                return true;
            }
            self.paths.last_mut().expect("current path").pop();
            self.used[tail] &= !bit(w);
        }
        false
    }
}

/// Searches for two or more disjoint in-to-out paths covering every vertex.
pub(crate) fn find_cover(bg: &BitGraph, labels: &Labels, rules: CoverRules) -> Option<Vec<Vec<usize>>> {
    let full = bg.full();
    if rules.vertex_disjoint {
        let mut s = VertexCoverSearch { bg, labels, full, allow_trivial: rules.allow_trivial_paths, paths: Vec::new() };
        s.start_new(0, 0).then_some(s.paths)
    } else {
        let mut s = ArcCoverSearch {
            bg,
            labels,
            full,
            allow_trivial: rules.allow_trivial_paths,
            used: vec![0; bg.n],
            paths: Vec::new(),
        };
        s.start_new(0, 0).then_some(s.paths)
    }
}

fn one_based(paths: Vec<Vec<usize>>) -> Vec<Vec<Vertex>> {
    paths.into_iter().map(|p| p.into_iter().map(|v| v as Vertex + 1).collect()).collect()
}

/// Returns `(true, None)` when no multi-path cover exists, otherwise
/// `(false, Some(paths))`.
pub fn check_single_visit(g: &InOutGraph, opts: &VerifyOptions) -> Result<(bool, Option<Vec<Vec<Vertex>>>)> {
    check_cap(g.order(), opts.oracle_cap)?;
    let bg = BitGraph::from_digraph(&g.graph);
    let labels = Labels::from_inout(g);
    match find_cover(&bg, &labels, opts.cover_rules) {
        Some(paths) => Ok((false, Some(one_based(paths)))),
        None => Ok((true, None)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SingleVisitMethod {
    /// Exhaustive cover search.
    Search,
    /// Certified by the bipartite counting argument.
    BipartiteShortcut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A Hamiltonian path from `i_j` to `o_m` with `j != m` (1-based).
    ForbiddenPath { j: usize, m: usize, path: Vec<Vertex> },
    /// No Hamiltonian path from `i_j` to `o_j`.
    MissingPath { j: usize },
    /// Two or more disjoint in-to-out paths covering every vertex.
    Cover { paths: Vec<Vec<Vertex>> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub k: usize,
    pub order: usize,
    pub arcs: usize,
    pub paired_ok: bool,
    pub single_visit_ok: bool,
    pub single_visit_method: SingleVisitMethod,
    pub ham_path_matrix: Vec<Vec<bool>>,
    /// Number of Hamiltonian paths from `i_j` to `o_j`.
    pub diagonal_counts: Vec<u64>,
    /// Cover witness when single visit fails, else a paired-condition witness.
    pub witness: Option<Witness>,
}

impl VerificationReport {
    pub fn is_inout(&self) -> bool {
        self.paired_ok && self.single_visit_ok
    }
}

pub fn verify_inout(g: &InOutGraph, opts: &VerifyOptions) -> Result<VerificationReport> {
    let census = path_census(g, opts.oracle_cap, opts.exec)?;
    let k = g.k();
    let paired_ok = (0..k).all(|j| (0..k).all(|m| census.exists[j][m] == (j == m)));

    let (single_visit_ok, cover, method) = if !opts.paranoid && satisfies_bipartite_shortcut(g) {
        (true, None, SingleVisitMethod::BipartiteShortcut)
    } else {
        let (ok, cover) = check_single_visit(g, opts)?;
        (ok, cover, SingleVisitMethod::Search)
    };

    let paired_witness = || {
        for j in 0..k {
            for m in 0..k {
                if j != m {
                    if let Some(path) = &census.examples[j][m] {
                        return Some(Witness::ForbiddenPath { j: j + 1, m: m + 1, path: path.clone() });
                    }
                }
            }
        }
        (0..k).find(|&j| !census.exists[j][j]).map(|j| Witness::MissingPath { j: j + 1 })
    };
    let witness = match cover {
        Some(paths) => Some(Witness::Cover { paths }),
        None => paired_witness(),
    };

    Ok(VerificationReport {
        k,
        order: g.order(),
        arcs: g.graph.arc_count(),
        paired_ok,
        single_visit_ok,
        single_visit_method: method,
        diagonal_counts: (0..k).map(|j| census.counts[j][j]).collect(),
        ham_path_matrix: census.exists,
        witness,
    })
}

/// Lower bound on the order of a k-in-out graph: `2k - 1`.
pub fn bound_order(k: usize) -> usize {
    2 * k - 1
}

/// Lower bound on the arc count of a k-in-out graph of order `2k - 1`:
/// `4k - 4`.
pub fn bound_arcs(k: usize) -> usize {
    4 * k - 4
}
