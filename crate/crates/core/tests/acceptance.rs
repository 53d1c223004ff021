//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL
//! line per criterion and exits non-zero if any fails.

use std::collections::{BTreeSet, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use inout_core::constraints::{check_constraints, emit_constraints, incidence_from_tour, Family};
use inout_core::exec::Exec;
use inout_core::graph::bipartition;
use inout_core::gtsp::{
    brute_force_atsp, brute_force_gtsp, convert, gtsp_tour_cost, hamiltonian_cycles, random_instance, GtspInstance,
    RandomParams,
};
use inout_core::search::{is_isomorphic, search_min, SearchOptions};
use inout_core::{build_inout, canonical_path, layout, verify_inout, Arc, DiGraph, InOutGraph, VerifyOptions, Vertex};

const KS: std::ops::RangeInclusive<usize> = 1..=10;
const CRIT1_BUDGET: Duration = Duration::from_secs(60);
const CRIT6_FIRST_BUDGET: Duration = Duration::from_secs(5 * 60);
const CRIT6_SLOW_BUDGET: Duration = Duration::from_secs(2 * 60 * 60);
const CRIT7_INSTANCES: u64 = 40;
const CRIT7_BUDGET: Duration = Duration::from_secs(5 * 60);
const CRIT8_INSTANCES: usize = 12;
const CRIT9_BUDGET: Duration = Duration::from_secs(2 * 60);
/// Largest order for the unpruned cover oracle in this file (2^order DP).
const NAIVE_COVER_MAX_ORDER: usize = 13;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(started: Instant, budget: Duration) -> Result<Duration, String> {
    let t = started.elapsed();
    ensure(t <= budget, || format!("took {t:.2?}, budget {budget:?}"))?;
    Ok(t)
}

// Independent oracles: plain enumeration with no pruning.

fn succ_lists(g: &DiGraph) -> Vec<Vec<Vertex>> {
    let mut s = vec![Vec::new(); g.order() + 1];
    for &(u, w) in g.arcs() {
        s[u as usize].push(w);
    }
    s
}

/// Every simple path from `from`, reported as (vertex list).
fn simple_paths(succ: &[Vec<Vertex>], from: Vertex, visit: &mut dyn FnMut(&[Vertex])) {
    fn go(succ: &[Vec<Vertex>], path: &mut Vec<Vertex>, on: &mut Vec<bool>, visit: &mut dyn FnMut(&[Vertex])) {
        visit(path);
        let last = *path.last().unwrap() as usize;
        for &w in &succ[last] {
            if !on[w as usize] {
                on[w as usize] = true;
                path.push(w);
                go(succ, path, on, visit);
                path.pop();
                on[w as usize] = false;
            }
        }
    }
    let mut on = vec![false; succ.len()];
    on[from as usize] = true;
    go(succ, &mut vec![from], &mut on, visit);
}

/// Hamiltonian paths from `from` to `to`.
fn naive_ham_paths(g: &DiGraph, from: Vertex, to: Vertex) -> Vec<Vec<Vertex>> {
    let succ = succ_lists(g);
    let mut out = Vec::new();
    simple_paths(&succ, from, &mut |p| {
        if p.len() == g.order() && *p.last().unwrap() == to {
            out.push(p.to_vec());
        }
    });
    out
}

/// True when two or more vertex-disjoint in-to-out paths (a lone vertex that
/// is both counts) cover every vertex.
fn naive_has_cover(g: &InOutGraph) -> bool {
    let n = g.order();
    assert!(n <= NAIVE_COVER_MAX_ORDER);
    let succ = succ_lists(&g.graph);
    let mut masks = BTreeSet::new();
    for &i in &g.incoming {
        simple_paths(&succ, i, &mut |p| {
            if g.outgoing.contains(p.last().unwrap()) {
                masks.insert(p.iter().fold(0u32, |m, &v| m | 1 << (v - 1)));
            }
        });
    }
    let full = (1u32 << n) - 1;
    // parts[m]: the most paths any exact cover of m uses, or None.
    let mut parts: Vec<Option<u32>> = vec![None; 1 << n];
    parts[0] = Some(0);
    for m in 1..=full {
        let low = m & m.wrapping_neg();
        parts[m as usize] = masks
            .iter()
            .filter(|&&p| p & low != 0 && p & !m == 0)
            .filter_map(|&p| parts[(m & !p) as usize].map(|c| c + 1))
            .max();
    }
    parts[full as usize].is_some_and(|c| c >= 2)
}

fn expected_order(k: usize) -> usize {
    if k == 3 {
        6
    } else {
        2 * k - 1
    }
}

fn expected_arcs(k: usize) -> usize {
    match k {
        1 => 0,
        2 => 4,
        3 => 10,
        _ if k.is_multiple_of(2) => 4 * k - 4,
        _ => 4 * k - 3,
    }
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let opts = VerifyOptions::paranoid();
    for k in KS {
        let g = build_inout(k).map_err(|e| e.to_string())?;
        let r = verify_inout(&g, &opts).map_err(|e| e.to_string())?;
        ensure(r.paired_ok && r.single_visit_ok, || format!("S_{k}: {:?}", r.witness))?;
        for j in 0..k {
            for m in 0..k {
                ensure(r.ham_path_matrix[j][m] == (j == m), || format!("S_{k}: matrix entry ({j},{m})"))?;
            }
        }
        if g.order() <= NAIVE_COVER_MAX_ORDER {
            ensure(!naive_has_cover(&g), || format!("S_{k}: independent oracle found a cover"))?;
        }
    }
    let t = within(started, CRIT1_BUDGET)?;
    Ok(format!("S_1..S_10 certified by full search in {t:.2?}; unpruned cover oracle agrees up to order 13"))
}

fn criterion_2() -> Outcome {
    for k in KS.chain([11, 12, 25, 40]) {
        let g = build_inout(k).map_err(|e| e.to_string())?;
        ensure(g.order() == expected_order(k), || format!("S_{k} has order {}", g.order()))?;
        ensure(g.graph.arc_count() == expected_arcs(k), || format!("S_{k} has {} arcs", g.graph.arc_count()))?;
    }
    Ok("orders and arc counts exact for k = 1..12, 25, 40".into())
}

fn criterion_3() -> Outcome {
    for k in KS {
        let g = build_inout(k).map_err(|e| e.to_string())?;
        for j in 1..=k {
            let paths = naive_ham_paths(&g.graph, g.incoming[j - 1], g.outgoing[j - 1]);
            let canonical = canonical_path(k, j).map_err(|e| e.to_string())?.vertices;
            ensure(paths == vec![canonical], || format!("S_{k}, j={j}: {} paths found", paths.len()))?;
        }
    }
    Ok("exactly one Hamiltonian i_j -> o_j path per pair, equal to the canonical one".into())
}

fn criterion_4() -> Outcome {
    for k in KS {
        let g = build_inout(k).map_err(|e| e.to_string())?;
        let bp = bipartition(&g.graph).map_err(|e| e.to_string())?;
        if k == 3 {
            ensure(bp.is_none(), || "S_3 is bipartite".into())?;
            continue;
        }
        let bp = bp.ok_or_else(|| format!("S_{k} is not bipartite"))?;
        for &(u, w) in g.graph.arcs() {
            ensure(bp.part1.contains(&u) != bp.part1.contains(&w), || format!("S_{k}: arc ({u},{w}) inside a side"))?;
        }
        let (big, small) =
            if bp.part1.len() > bp.part2.len() { (&bp.part1, &bp.part2) } else { (&bp.part2, &bp.part1) };
        ensure(big.len() == small.len() + 1, || format!("S_{k}: sides {} and {}", big.len(), small.len()))?;
        ensure(g.incoming.iter().chain(&g.outgoing).all(|v| big.contains(v)), || format!("S_{k}: labels split"))?;
    }
    Ok("bipartite with |V1| = |V2| + 1 and labels in V1 for k != 3; S_3 not bipartite".into())
}

fn orient(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> i128 {
    (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128
}

fn recount_crossings(k: usize) -> Result<usize, String> {
    let l = layout(k).map_err(|e| e.to_string())?;
    let g = build_inout(k).map_err(|e| e.to_string())?;
    let edges: BTreeSet<Arc> = g.graph.arcs().iter().map(|&(u, w)| (u.min(w), u.max(w))).collect();
    let edges: Vec<Arc> = edges.into_iter().collect();
    let p = |v: Vertex| l.coords[v as usize - 1];
    let mut count = 0;
    for (i, &(a, b)) in edges.iter().enumerate() {
        for &(c, d) in &edges[i + 1..] {
            if [a, b].iter().any(|x| *x == c || *x == d) {
                continue;
            }
            let s1 = orient(p(a), p(b), p(c)).signum() * orient(p(a), p(b), p(d)).signum();
            let s2 = orient(p(c), p(d), p(a)).signum() * orient(p(c), p(d), p(b)).signum();
            if s1 < 0 && s2 < 0 {
                count += 1;
            }
        }
    }
    ensure(count == l.crossings, || format!("S_{k}: layout reports {} but recount gives {count}", l.crossings))?;
    Ok(count)
}

fn criterion_5() -> Outcome {
    for (k, expected) in [(5, 1), (9, 1), (2, 0), (3, 0), (4, 0), (6, 0), (7, 0), (8, 0), (10, 0), (11, 0)] {
        let got = recount_crossings(k)?;
        ensure(got == expected, || format!("S_{k}: {got} crossings, expected {expected}"))?;
    }
    Ok("1 crossing for k = 5, 9; 0 for k = 2, 3, 4, 6, 7, 8, 10, 11".into())
}

fn criterion_6() -> Outcome {
    let opts = SearchOptions { time_budget: Some(CRIT6_FIRST_BUDGET), ..SearchOptions::default() };
    let first = search_min(5, 3, 20, &opts).map_err(|e| e.to_string())?;
    ensure(first.complete, || "order 5 search ran out of budget".into())?;
    ensure(first.graphs.is_empty(), || format!("order 5: {} graphs found", first.graphs.len()))?;

    let opts = SearchOptions { time_budget: Some(CRIT6_SLOW_BUDGET), ..SearchOptions::default() };
    let nine = search_min(6, 3, 9, &opts).map_err(|e| e.to_string())?;
    ensure(nine.complete && nine.graphs.is_empty(), || format!("order 6, 9 arcs: {} graphs", nine.graphs.len()))?;
    let ten = search_min(6, 3, 10, &opts).map_err(|e| e.to_string())?;
    ensure(ten.complete, || "order 6, 10 arcs ran out of budget".into())?;
    ensure(!ten.graphs.is_empty(), || "order 6, 10 arcs: none found".into())?;
    let s3 = build_inout(3).map_err(|e| e.to_string())?;
    ensure(ten.graphs.iter().any(|g| is_isomorphic(g, &s3) == Some(true)), || "S_3 not among results".into())?;
    let opts = VerifyOptions::paranoid();
    for g in &ten.graphs {
        let r = verify_inout(g, &opts).map_err(|e| e.to_string())?;
        ensure(r.is_inout(), || format!("search returned a non-in-out graph:\n{}", g.to_text()))?;
    }
    Ok(format!(
        "order 5 none ({:.2?}); order 6 with 9 arcs none ({:.2?}); with 10 arcs {} classes incl. S_3 ({:.2?})",
        first.elapsed,
        nine.elapsed,
        ten.graphs.len(),
        ten.elapsed
    ))
}

/// GTSP optimum by enumerating group orders and representatives directly.
fn naive_gtsp_optimum(inst: &GtspInstance) -> Option<u64> {
    fn go(inst: &GtspInstance, tour: &mut Vec<Vertex>, used: &mut Vec<bool>, best: &mut Option<u64>) {
        if tour.len() == inst.group_count() {
            if let Some(c) = gtsp_tour_cost(inst, tour) {
                *best = Some(best.map_or(c, |b| b.min(c)));
            }
            return;
        }
        for g in 1..inst.group_count() {
            if !used[g] {
                used[g] = true;
                for &v in &inst.groups[g] {
                    tour.push(v);
                    go(inst, tour, used, best);
                    tour.pop();
                }
                used[g] = false;
            }
        }
    }
    if inst.group_count() < 2 {
        return None;
    }
    let mut best = None;
    for &v in &inst.groups[0] {
        let mut used = vec![false; inst.group_count()];
        used[0] = true;
        go(inst, &mut vec![v], &mut used, &mut best);
    }
    best
}

fn criterion_7() -> Outcome {
    let started = Instant::now();
    let params = RandomParams::default();
    let mut infeasible = 0;
    for seed in 0..CRIT7_INSTANCES {
        let inst = random_instance(&params, seed);
        ensure(inst.n <= 9 && (2..=4).contains(&inst.group_count()), || format!("seed {seed}: out of range"))?;
        let (atsp, _) = convert(&inst).map_err(|e| e.to_string())?;
        let m = inst.groups.iter().filter(|g| g.len() == 3).count();
        ensure(atsp.order == 2 * inst.n - inst.group_count() + m, || format!("seed {seed}: order {}", atsp.order))?;
        let max_orig = inst.arcs.iter().map(|a| a.weight).max().unwrap_or(0);
        let max_conv = atsp.arcs.iter().map(|a| a.weight).max().unwrap_or(0);
        ensure(max_conv == max_orig, || format!("seed {seed}: max weight {max_conv} vs {max_orig}"))?;
        let naive = naive_gtsp_optimum(&inst);
        let g = brute_force_gtsp(&inst, Exec::Parallel).map_err(|e| e.to_string())?.map(|t| t.cost);
        let a = brute_force_atsp(&atsp, Exec::Parallel).map_err(|e| e.to_string())?.map(|t| t.0);
        ensure(naive == g && g == a, || format!("seed {seed}: naive {naive:?}, GTSP {g:?}, ATSP {a:?}"))?;
        infeasible += usize::from(a.is_none());
    }
    let t = within(started, CRIT7_BUDGET)?;
    Ok(format!("{CRIT7_INSTANCES} instances agree ({infeasible} infeasible on both sides) in {t:.2?}"))
}

fn criterion_8() -> Outcome {
    let params = RandomParams { max_n: 7, ..RandomParams::default() };
    let mut checked = 0;
    let mut cycles_total = 0;
    for seed in 0.. {
        if checked == CRIT8_INSTANCES {
            break;
        }
        ensure(seed < 1000, || "not enough instances with a tour and a spare arc".into())?;
        let (host, map) = convert(&random_instance(&params, seed)).map_err(|e| e.to_string())?;
        let cycles = hamiltonian_cycles(&host, usize::MAX).map_err(|e| e.to_string())?;
        if cycles.is_empty() {
            continue;
        }
        // Pseudo-tour: a tour plus a second entry into a subgraph it already
        // visits. Instances whose tours use every inter-subgraph arc are skipped.
        let x = incidence_from_tour(&host, &cycles[0]).map_err(|e| e.to_string())?;
        let Some(extra) = map.arcs.iter().map(|l| (l.from, l.to)).find(|a| !x[a]) else {
            continue;
        };
        let set = emit_constraints(&host, &map).map_err(|e| e.to_string())?;
        for c in &cycles {
            let x = incidence_from_tour(&host, c).map_err(|e| e.to_string())?;
            let (ok, bad) = check_constraints(&set, &x).map_err(|e| e.to_string())?;
            ensure(ok, || format!("seed {seed}: cycle {c:?} violates {:?}", bad.map(|b| b.name())))?;
        }
        cycles_total += cycles.len();

        let target = map.group_of(extra.1).unwrap().group;
        let mut pseudo: HashMap<Arc, bool> = x.clone();
        pseudo.insert(extra, true);
        let violated = set
            .constraints
            .iter()
            .filter(|c| c.family == Family::In && c.subgraph == target)
            .any(|c| !c.holds(&pseudo).unwrap());
        ensure(violated, || format!("seed {seed}: double entry into subgraph {target} not caught"))?;
        checked += 1;
    }

    let s3 = GtspInstance::new(
        "s3",
        4,
        vec![vec![1, 2, 3], vec![4]],
        (1..=3)
            .flat_map(|v| [(v, 4), (4, v)])
            .map(|(from, to)| inout_core::gtsp::WeightedArc { from, to, weight: 1 })
            .collect(),
    )
    .map_err(|e| e.to_string())?
    .0;
    let (host, map) = convert(&s3).map_err(|e| e.to_string())?;
    let set = emit_constraints(&host, &map).map_err(|e| e.to_string())?;
    for c in set.constraints.iter().filter(|c| c.subgraph == 1 && matches!(c.family, Family::PathForce { .. })) {
        let positive: Vec<i64> = c.terms.iter().map(|t| t.0).filter(|&v| v > 0).collect();
        ensure(!positive.is_empty() && positive.iter().all(|&v| v == 5), || format!("{}: {positive:?}", c.name()))?;
    }
    Ok(format!("{checked} instances, {cycles_total} Hamiltonian cycles satisfy all rows; double entries violate (1); k = 3 coefficient 5"))
}

fn criterion_9() -> Outcome {
    let started = Instant::now();
    let opts = VerifyOptions::paranoid();
    let mut deleted = 0;
    for k in [4, 6] {
        let g = build_inout(k).map_err(|e| e.to_string())?;
        for &(u, w) in g.graph.arcs() {
            let h = InOutGraph::new(g.graph.without_arc(u, w), g.incoming.clone(), g.outgoing.clone())
                .map_err(|e| e.to_string())?;
            let r = verify_inout(&h, &opts).map_err(|e| e.to_string())?;
            ensure(!r.is_inout(), || format!("S_{k} minus ({u},{w}) still verifies"))?;
            deleted += 1;
        }
    }
    let t = within(started, CRIT9_BUDGET)?;
    Ok(format!("all {deleted} single-arc deletions from S_4 and S_6 fail verification ({t:.2?})"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("construction validity", criterion_1),
        ("size optimality", criterion_2),
        ("path uniqueness", criterion_3),
        ("bipartite structure", criterion_4),
        ("planarity of the drawings", criterion_5),
        ("extremal search", criterion_6),
        ("conversion correctness", criterion_7),
        ("constraint validity", criterion_8),
        ("edge-minimality", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("acceptance {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("acceptance {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
