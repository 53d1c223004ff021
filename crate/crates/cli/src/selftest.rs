//! The `selftest` subcommand: oracle checks over the constructions and a
//! batch of seeded random GTSP instances.

use std::time::Instant;

use serde_json::json;

use inout_core::constraints::{check_constraints, emit_constraints, incidence_from_tour};
use inout_core::graph::{bipartition, satisfies_bipartite_shortcut};
use inout_core::gtsp::{
    brute_force_atsp, brute_force_gtsp, convert, hamiltonian_cycles, map_tour_back, random_instance, RandomParams,
};
use inout_core::search::search_min;
use inout_core::verify::{paths_between, verify_inout, VerifyOptions};
use inout_core::{build_inout, canonical_path, layout, SearchOptions};

use crate::Ctx;

type Check = anyhow::Result<Option<String>>;
type Named<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn expected_arcs(k: usize) -> usize {
    match k {
        1 => 0,
        2 => 4,
        3 => 10,
        _ if k.is_multiple_of(2) => 4 * k - 4,
        _ => 4 * k - 3,
    }
}

/// Runs every check, printing one line each. Returns true when all pass.
pub fn run(ctx: &Ctx, kmax: usize, seed: u64, instances: usize) -> bool {
    let started = Instant::now();
    let opts = ctx.verify_options(true);
    let checks: Vec<Named> = vec![
        ("construction", Box::new(|| construction(kmax, &opts))),
        ("sizes", Box::new(|| sizes(kmax))),
        ("path-uniqueness", Box::new(|| uniqueness(kmax, &opts))),
        ("bipartite-structure", Box::new(|| bipartite(kmax))),
        ("crossings", Box::new(|| crossings(kmax))),
        ("search-order-5", Box::new(|| search_five(ctx))),
        ("conversion", Box::new(|| conversion(ctx, seed, instances))),
        ("constraints", Box::new(|| constraints(seed, instances.min(10)))),
    ];
    let mut all = true;
    for (name, check) in checks {
        let t = Instant::now();
        let (pass, detail) = match check() {
            Ok(None) => (true, String::new()),
            Ok(Some(why)) => (false, why),
            Err(e) => (false, format!("{e:#}")),
        };
        all &= pass;
        let secs = t.elapsed().as_secs_f64();
        ctx.emit(json!({ "check": name, "pass": pass, "seconds": secs, "detail": detail }), || {
            let mark = if pass { "PASS" } else { "FAIL" };
            if detail.is_empty() {
                format!("{mark} {name} ({secs:.3}s)")
            } else {
                format!("{mark} {name} ({secs:.3}s): {detail}")
            }
        });
    }
    let secs = started.elapsed().as_secs_f64();
    ctx.emit(json!({ "selftest": if all { "pass" } else { "fail" }, "seconds": secs }), || {
        format!("selftest {} in {secs:.3}s", if all { "passed" } else { "FAILED" })
    });
    all
}

fn construction(kmax: usize, opts: &VerifyOptions) -> Check {
    for k in 1..=kmax {
        let r = verify_inout(&build_inout(k)?, opts)?;
        if !r.is_inout() {
            return Ok(Some(format!("S_{k} failed: {:?}", r.witness)));
        }
    }
    Ok(None)
}

fn sizes(kmax: usize) -> Check {
    for k in 1..=kmax {
        let g = build_inout(k)?;
        let order = if k == 3 { 6 } else { 2 * k - 1 };
        if g.order() != order || g.graph.arc_count() != expected_arcs(k) {
            return Ok(Some(format!("S_{k} has order {} and {} arcs", g.order(), g.graph.arc_count())));
        }
    }
    Ok(None)
}

fn uniqueness(kmax: usize, opts: &VerifyOptions) -> Check {
    for k in 1..=kmax {
        let g = build_inout(k)?;
        for j in 1..=k {
            let paths = paths_between(&g.graph, g.incoming[j - 1], g.outgoing[j - 1], opts.oracle_cap)?;
            if paths != vec![canonical_path(k, j)?.vertices] {
                return Ok(Some(format!("S_{k}, j={j}: {} paths, expected the canonical one", paths.len())));
            }
        }
    }
    Ok(None)
}

fn bipartite(kmax: usize) -> Check {
    for k in 1..=kmax {
        let g = build_inout(k)?;
        let ok = if k == 3 { bipartition(&g.graph)?.is_none() } else { satisfies_bipartite_shortcut(&g) };
        if !ok {
            return Ok(Some(format!("S_{k} has the wrong bipartite structure")));
        }
    }
    Ok(None)
}

fn crossings(kmax: usize) -> Check {
    for k in 1..=kmax.max(11) {
        let expected = usize::from(k >= 5 && k % 4 == 1);
        let got = layout(k)?.crossings;
        if got != expected {
            return Ok(Some(format!("drawing of S_{k} has {got} crossings, expected {expected}")));
        }
    }
    Ok(None)
}

fn search_five(ctx: &Ctx) -> Check {
    let opts = SearchOptions { cover_rules: ctx.rules, exec: ctx.exec, ..SearchOptions::default() };
    let out = search_min(5, 3, 20, &opts)?;
    Ok((!out.is_none()).then(|| format!("found {} graphs on 5 vertices", out.graphs.len())))
}

fn conversion(ctx: &Ctx, seed: u64, instances: usize) -> Check {
    let params = RandomParams::default();
    for s in seed..seed + instances as u64 {
        let inst = random_instance(&params, s);
        let (atsp, map) = convert(&inst)?;
        let m = inst.groups_of_three();
        if atsp.order != 2 * inst.n - inst.group_count() + m {
            return Ok(Some(format!("seed {s}: order {} breaks 2n - g + m", atsp.order)));
        }
        if atsp.max_weight() != inst.max_weight() {
            return Ok(Some(format!("seed {s}: max weight grew to {}", atsp.max_weight())));
        }
        let g = brute_force_gtsp(&inst, ctx.exec)?;
        let a = brute_force_atsp(&atsp, ctx.exec)?;
        match (&g, &a) {
            (None, None) => {}
            (Some(g), Some((cost, tour))) => {
                if g.cost != *cost {
                    return Ok(Some(format!("seed {s}: GTSP optimum {} but ATSP optimum {cost}", g.cost)));
                }
                let back = map_tour_back(tour, &map)?;
                if back.cost != *cost {
                    return Ok(Some(format!("seed {s}: mapped tour costs {}", back.cost)));
                }
            }
            _ => return Ok(Some(format!("seed {s}: feasibility differs"))),
        }
    }
    Ok(None)
}

fn constraints(seed: u64, instances: usize) -> Check {
    let params = RandomParams { max_n: 7, ..RandomParams::default() };
    for s in seed..seed + instances as u64 {
        let (host, map) = convert(&random_instance(&params, s))?;
        let set = emit_constraints(&host, &map)?;
        for cycle in hamiltonian_cycles(&host, 500)? {
            let x = incidence_from_tour(&host, &cycle)?;
            if let (false, Some(c)) = check_constraints(&set, &x)? {
                return Ok(Some(format!("seed {s}: cycle violates {}", c.name())));
            }
        }
    }
    Ok(None)
}
