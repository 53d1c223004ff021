//! Exhaustive search for in-out graphs with a given order and arc budget.
//!
//! Any k-in-out graph has a Hamiltonian path from `i_1` to `o_1`, so up to
//! relabelling it contains the backbone `1 -> 2 -> ... -> v` with `i_1 = 1`
//! and `o_1 = v`. The search fixes that backbone, enumerates the remaining
//! labels (pairs 2..k sorted by incoming vertex), and grows the arc set one
//! candidate arc at a time. Forbidden Hamiltonian paths and multi-path covers
//! can only appear as arcs are added, so a subset showing either one prunes
//! all of its supersets.

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graph::{DiGraph, InOutGraph, Vertex};
use crate::verify::{find_cover, for_each_ham_path, BitGraph, CoverRules, Labels, MAX_ORACLE_ORDER};

#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub time_budget: Option<Duration>,
    /// Stop collecting once this many non-isomorphic graphs were found.
    pub max_results: usize,
    pub cover_rules: CoverRules,
    pub exec: Exec,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { time_budget: None, max_results: 100, cover_rules: CoverRules::default(), exec: Exec::default() }
    }
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub order: usize,
    pub k: usize,
    pub max_arcs: usize,
    /// Found graphs, one per isomorphism class (for order <= 8), sorted.
    pub graphs: Vec<InOutGraph>,
    /// False when the time budget ran out before the space was exhausted.
    pub complete: bool,
    /// True when `max_results` cut the result list short.
    pub truncated: bool,
    pub labelings: usize,
    pub subsets_examined: u64,
    pub elapsed: Duration,
}

impl SearchOutcome {
    /// Exhaustive run that found nothing.
    pub fn is_none(&self) -> bool {
        self.complete && self.graphs.is_empty()
    }

    pub fn min_arcs(&self) -> Option<usize> {
        self.graphs.iter().map(|g| g.graph.arc_count()).min()
    }
}

#[derive(Debug, Serialize)]
pub struct SearchSummary {
    pub order: usize,
    pub k: usize,
    pub max_arcs: usize,
    pub found: usize,
    pub min_arcs: Option<usize>,
    pub complete: bool,
    pub truncated: bool,
    pub labelings: usize,
    pub subsets_examined: u64,
    pub elapsed_secs: f64,
}

impl From<&SearchOutcome> for SearchSummary {
    fn from(o: &SearchOutcome) -> Self {
        SearchSummary {
            order: o.order,
            k: o.k,
            max_arcs: o.max_arcs,
            found: o.graphs.len(),
            min_arcs: o.min_arcs(),
            complete: o.complete,
            truncated: o.truncated,
            labelings: o.labelings,
            subsets_examined: o.subsets_examined,
            elapsed_secs: o.elapsed.as_secs_f64(),
        }
    }
}

/// Label assignments with `i_1 = 0`, `o_1 = n - 1` (0-indexed), incoming
/// vertices of the other pairs increasing, and no outgoing vertex directly
/// followed by an incoming vertex on the backbone.
fn labelings(n: usize, k: usize) -> Vec<Labels> {
    if n == 1 {
        return if k == 1 { vec![Labels::new(vec![0], vec![0])] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut incoming = vec![0];
    combinations(1, n, k - 1, &mut incoming, &mut |inc| {
        let mut outgoing = vec![n - 1];
        let mut used = vec![false; n];
        used[n - 1] = true;
        arrangements(n - 1, k - 1, &mut outgoing, &mut used, &mut |outg| {
            let labels = Labels::new(inc.to_vec(), outg.to_vec());
            let o_before_i = (0..n - 1).any(|p| labels.out_mask >> p & 1 == 1 && labels.in_mask >> (p + 1) & 1 == 1);
            if !o_before_i {
                out.push(labels);
            }
        });
    });
    out
}

fn combinations(from: usize, to: usize, take: usize, acc: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if take == 0 {
        f(acc);
        return;
    }
    for v in from..to {
        if to - v < take {
            break;
        }
        acc.push(v);
        combinations(v + 1, to, take - 1, acc, f);
        acc.pop();
    }
}

fn arrangements(limit: usize, take: usize, acc: &mut Vec<usize>, used: &mut [bool], f: &mut dyn FnMut(&[usize])) {
    if take == 0 {
        f(acc);
        return;
    }
    for v in 0..limit {
        if !used[v] {
            used[v] = true;
            acc.push(v);
            arrangements(limit, take - 1, acc, used, f);
            acc.pop();
            used[v] = false;
        }
    }
}

struct Shared {
    deadline: Option<Instant>,
    timed_out: AtomicBool,
    subsets: AtomicU64,
}

struct LabelSearch<'a> {
    labels: &'a Labels,
    candidates: &'a [(usize, usize)],
    rules: CoverRules,
    shared: &'a Shared,
    max_results: usize,
    found: Vec<BitGraph>,
    local_subsets: u64,
}

impl LabelSearch<'_> {
    /// Returns `(monotone violation, all diagonal paths present)`.
    fn classify(&self, bg: &BitGraph) -> (bool, bool) {
        let mut diagonal = true;
        for (j, &start) in self.labels.incoming.iter().enumerate() {
            let own = self.labels.outgoing[j];
            let others = self.labels.out_mask & !(1u64 << own);
            let mut reached_own = false;
            let flow = for_each_ham_path(bg, start, None, |path| {
                let end = *path.last().expect("non-empty");
                if others >> end & 1 == 1 {
                    return ControlFlow::Break(());
                }
                reached_own |= end == own;
                ControlFlow::Continue(())
            });
            if flow.is_break() {
                return (true, false);
            }
            diagonal &= reached_own;
        }
        if find_cover(bg, self.labels, self.rules).is_some() {
            return (true, false);
        }
        (false, diagonal)
    }

    fn out_of_time(&mut self) -> bool {
        if self.shared.timed_out.load(Ordering::Relaxed) {
            return true;
        }
        if self.local_subsets.is_multiple_of(256) {
            if let Some(d) = self.shared.deadline {
                if Instant::now() >= d {
                    self.shared.timed_out.store(true, Ordering::Relaxed);
                    return true;
                }
            }
        }
        false
    }

    fn explore(&mut self, bg: &mut BitGraph, next: usize, remaining: usize) -> ControlFlow<()> {
        self.local_subsets += 1;
        if self.out_of_time() {
            return ControlFlow::Break(());
        }
        let (violated, diagonal) = self.classify(bg);
        if violated {
            return ControlFlow::Continue(());
        }
        if diagonal {
            self.found.push(bg.clone());
            if self.found.len() >= self.max_results {
                return ControlFlow::Break(());
            }
        }
        if remaining == 0 {
            return ControlFlow::Continue(());
        }
        for c in next..self.candidates.len() {
            let (u, w) = self.candidates[c];
            bg.add(u, w);
            let flow = self.explore(bg, c + 1, remaining - 1);
            bg.remove(u, w);
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn to_inout(bg: &BitGraph, labels: &Labels) -> InOutGraph {
    let mut arcs = Vec::new();
    for u in 0..bg.n {
        let mut m = bg.succ[u];
        while m != 0 {
            let w = m.trailing_zeros() as usize;
            m &= m - 1;
            arcs.push((u as Vertex + 1, w as Vertex + 1));
        }
    }
    let graph = DiGraph::new(bg.n, arcs).expect("search graphs are simple");
    let one = |xs: &[usize]| xs.iter().map(|&v| v as Vertex + 1).collect();
    InOutGraph::new(graph, one(&labels.incoming), one(&labels.outgoing)).expect("labels are valid")
}

/// Order-independent key identifying `g` up to vertex relabelling and
/// reordering of its (incoming, outgoing) pairs. Only computed for order <= 8.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    order: usize,
    arcs: u64,
    pairs: Vec<(u8, u8)>,
}

pub const CANONICAL_MAX_ORDER: usize = 8;

pub fn canonical_key(g: &InOutGraph) -> Option<CanonicalKey> {
    let n = g.order();
    if n > CANONICAL_MAX_ORDER {
        return None;
    }
    let arcs: Vec<(usize, usize)> = g.graph.arcs().iter().map(|&(u, w)| (u as usize - 1, w as usize - 1)).collect();
    let pairs: Vec<(usize, usize)> =
        g.incoming.iter().zip(&g.outgoing).map(|(&i, &o)| (i as usize - 1, o as usize - 1)).collect();
    let mut best: Option<CanonicalKey> = None;
    let mut perm: Vec<usize> = (0..n).collect();
    permute(&mut perm, 0, &mut |p| {
        let mask = arcs.iter().fold(0u64, |m, &(u, w)| m | 1u64 << (p[u] * 8 + p[w]));
        if let Some(b) = &best {
            if mask > b.arcs {
                return;
            }
        }
        let mut mapped: Vec<(u8, u8)> = pairs.iter().map(|&(i, o)| (p[i] as u8, p[o] as u8)).collect();
        mapped.sort_unstable();
        let key = CanonicalKey { order: n, arcs: mask, pairs: mapped };
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    });
    best
}

fn permute(p: &mut Vec<usize>, at: usize, f: &mut dyn FnMut(&[usize])) {
    if at == p.len() {
        f(p);
        return;
    }
    for i in at..p.len() {
        p.swap(at, i);
        permute(p, at + 1, f);
        p.swap(at, i);
    }
}

/// Isomorphism of in-out graphs (vertex relabelling plus pair reordering).
/// Returns `None` beyond [`CANONICAL_MAX_ORDER`].
pub fn is_isomorphic(a: &InOutGraph, b: &InOutGraph) -> Option<bool> {
    if a.order() != b.order() || a.k() != b.k() || a.graph.arc_count() != b.graph.arc_count() {
        return Some(false);
    }
    Some(canonical_key(a)? == canonical_key(b)?)
}

/// Every k-in-out graph with `order` vertices and at most `max_arcs` arcs,
/// up to isomorphism, subject to the budgets in `opts`.
pub fn search_min(order: usize, k: usize, max_arcs: usize, opts: &SearchOptions) -> Result<SearchOutcome> {
    if k == 0 {
        return Err(Error::InvalidK(0));
    }
    if order == 0 || order > MAX_ORACLE_ORDER {
        return Err(Error::TooLarge { order, cap: MAX_ORACLE_ORDER });
    }
    let started = Instant::now();
    let n = order;
    let all_labels = labelings(n, k);
    let backbone_len = n - 1;
    let mut outcome = SearchOutcome {
        order,
        k,
        max_arcs,
        graphs: Vec::new(),
        complete: true,
        truncated: false,
        labelings: all_labels.len(),
        subsets_examined: 0,
        elapsed: Duration::ZERO,
    };
    if max_arcs < backbone_len || all_labels.is_empty() {
        outcome.elapsed = started.elapsed();
        return Ok(outcome);
    }
    let candidates: Vec<(usize, usize)> =
        (0..n).flat_map(|u| (0..n).map(move |w| (u, w))).filter(|&(u, w)| u != w && w != u + 1).collect();
    let shared = Shared {
        deadline: opts.time_budget.map(|b| started + b),
        timed_out: AtomicBool::new(false),
        subsets: AtomicU64::new(0),
    };
    let max_results = opts.max_results.max(1);

    let per_label = opts.exec.map(&all_labels, |labels| {
        let mut bg = BitGraph::empty(n);
        for p in 0..backbone_len {
            bg.add(p, p + 1);
        }
        let mut s = LabelSearch {
            labels,
            candidates: &candidates,
            rules: opts.cover_rules,
            shared: &shared,
            max_results,
            found: Vec::new(),
            local_subsets: 0,
        };
        let _ = s.explore(&mut bg, 0, max_arcs - backbone_len);
        shared.subsets.fetch_add(s.local_subsets, Ordering::Relaxed);
        s.found.iter().map(|bg| to_inout(bg, labels)).collect::<Vec<_>>()
    });

    let mut seen = HashSet::new();
    let mut keyed = Vec::new();
    for g in per_label.into_iter().flatten() {
        match canonical_key(&g) {
            Some(key) => {
                if seen.insert(key.clone()) {
                    keyed.push((Some(key), g));
                }
            }
            None => keyed.push((None, g)),
        }
    }
    keyed.sort_by(|a, b| {
        (a.1.graph.arc_count(), &a.0, a.1.to_text()).cmp(&(b.1.graph.arc_count(), &b.0, b.1.to_text()))
    });
    if keyed.len() > max_results {
        keyed.truncate(max_results);
        outcome.truncated = true;
    }
    outcome.graphs = keyed.into_iter().map(|(_, g)| g).collect();
    outcome.complete = !shared.timed_out.load(Ordering::Relaxed);
    outcome.subsets_examined = shared.subsets.load(Ordering::Relaxed);
    outcome.elapsed = started.elapsed();
    Ok(outcome)
}
