mod selftest;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use inout_core::constraints::{emit_constraints, write_lp};
use inout_core::exec::{init_threads, Exec};
use inout_core::gtsp::{self, ConversionMap};
use inout_core::search::{search_min, SearchOptions, SearchSummary};
use inout_core::verify::{verify_inout, CoverRules, SingleVisitMethod, VerifyOptions, Witness, DEFAULT_ORACLE_CAP};
use inout_core::{build_inout, layout, Error, InOutGraph, Vertex};

/// Build, verify and apply optimal k-in-out graphs.
#[derive(Debug, Parser)]
#[command(name = "inout", version)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Run every loop on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    /// Print one JSON object per result line instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(flatten)]
    oracle: OracleArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Largest graph order the exhaustive oracle accepts.
    #[arg(long, global = true, default_value_t = DEFAULT_ORACLE_CAP)]
    oracle_cap: usize,

    /// Let covering paths share vertices (but not arcs).
    #[arg(long, global = true)]
    arc_disjoint: bool,

    /// Do not count a lone in/out vertex as a covering path.
    #[arg(long, global = true)]
    no_trivial_paths: bool,
}

impl OracleArgs {
    fn rules(&self) -> CoverRules {
        CoverRules { vertex_disjoint: !self.arc_disjoint, allow_trivial_paths: !self.no_trivial_paths }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GraphFormat {
    Text,
    Dot,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print S_k as a graph file or a drawing.
    Construct {
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, value_enum, default_value_t = GraphFormat::Text)]
        format: GraphFormat,
    },
    /// Check the in-out property of a graph file.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Run the cover search even when the bipartite shortcut applies.
        #[arg(long)]
        paranoid: bool,
    },
    /// Exhaustively search for k-in-out graphs of a given order.
    Search {
        #[arg(long)]
        order: usize,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long)]
        max_arcs: usize,
        /// Wall-clock budget in seconds.
        #[arg(long)]
        time_budget: Option<f64>,
        #[arg(long, default_value_t = 100)]
        max_results: usize,
        /// Also print every graph found.
        #[arg(long)]
        show: bool,
    },
    /// Convert a GTSP instance into a sparse ATSP instance.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Write a dense TSPLIB FULL_MATRIX instead of the arc list.
        #[arg(long, requires = "sentinel")]
        tsplib: bool,
        /// Weight written for absent arcs in the dense matrix.
        #[arg(long, requires = "tsplib")]
        sentinel: Option<u64>,
        /// Where to write the conversion map (JSON lines).
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Translate an ATSP tour back to the GTSP tour it encodes.
    MapTour {
        #[arg(long)]
        map: PathBuf,
        /// One vertex id per line, cycle implied.
        #[arg(long)]
        tour: PathBuf,
    },
    /// Write the in-out subgraph constraints of a converted instance as LP.
    EmitConstraints {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run the oracle suite on the constructions and random instances.
    Selftest {
        #[arg(long, default_value_t = 8)]
        kmax: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Random GTSP instances to check.
        #[arg(long, default_value_t = 30)]
        instances: usize,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

struct Ctx {
    json: bool,
    exec: Exec,
    oracle_cap: usize,
    rules: CoverRules,
}

impl Ctx {
    fn emit(&self, value: serde_json::Value, text: impl FnOnce() -> String) {
        if self.json {
            println!("{value}");
        } else {
            println!("{}", text());
        }
    }

    fn warn(&self, msg: &str) {
        if self.json {
            eprintln!("{}", json!({ "warning": msg }));
        } else {
            eprintln!("warning: {msg}");
        }
    }

    fn verify_options(&self, paranoid: bool) -> VerifyOptions {
        VerifyOptions { oracle_cap: self.oracle_cap, paranoid, cover_rules: self.rules, exec: self.exec }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        init_threads(t);
    }
    let ctx = Ctx {
        json: cli.json,
        exec: if cli.sequential { Exec::Sequential } else { Exec::Parallel },
        oracle_cap: cli.oracle.oracle_cap,
        rules: cli.oracle.rules(),
    };
    match run(&ctx, cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            if ctx.json {
                eprintln!("{}", json!({ "error": format!("{err:#}") }));
            } else {
                eprintln!("error: {err:#}");
            }
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn positive_k(k: i64) -> anyhow::Result<usize> {
    if k < 1 {
        return Err(Error::InvalidK(k).into());
    }
    Ok(k as usize)
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(ctx: &Ctx, command: Command) -> anyhow::Result<u8> {
    match command {
        Command::Construct { k, format } => construct(ctx, positive_k(k)?, format),
        Command::Verify { input, paranoid } => {
            let g = InOutGraph::parse(&read(&input)?).with_context(|| format!("parsing {}", input.display()))?;
            verify(ctx, &g, paranoid)
        }
        Command::Search { order, k, max_arcs, time_budget, max_results, show } => {
            let k = positive_k(k)?;
            if order == 0 {
                bail!("--order must be positive");
            }
            if max_results == 0 {
                bail!("--max-results must be positive");
            }
            let time_budget = match time_budget {
                Some(s) if !s.is_finite() || s <= 0.0 => bail!("--time-budget must be a positive number of seconds"),
                Some(s) => Some(Duration::from_secs_f64(s)),
                None => None,
            };
            let opts = SearchOptions { time_budget, max_results, cover_rules: ctx.rules, exec: ctx.exec };
            search(ctx, order, k, max_arcs, &opts, show)
        }
        Command::Convert { input, output, tsplib, sentinel, map } => {
            convert(ctx, &input, &output, sentinel.filter(|_| tsplib), map.as_deref())
        }
        Command::MapTour { map, tour } => map_tour(ctx, &map, &tour),
        Command::EmitConstraints { instance, map, output } => {
            let host =
                gtsp::parse_atsp(&read(&instance)?).with_context(|| format!("parsing {}", instance.display()))?;
            let map =
                ConversionMap::from_json_lines(&read(&map)?).with_context(|| format!("parsing {}", map.display()))?;
            let set = emit_constraints(&host, &map)?;
            for w in &set.warnings {
                ctx.warn(w);
            }
            write(&output, &write_lp(&set))?;
            ctx.emit(
                json!({ "constraints": set.constraints.len(), "subgraphs": set.subgraphs.len(), "output": output }),
                || {
                    format!(
                        "wrote {} constraints for {} subgraphs to {}",
                        set.constraints.len(),
                        set.subgraphs.len(),
                        output.display()
                    )
                },
            );
            Ok(EXIT_OK)
        }
        Command::Selftest { kmax, seed, instances } => {
            if kmax == 0 {
                bail!("--kmax must be positive");
            }
            let ok = selftest::run(ctx, kmax, seed, instances);
            Ok(if ok { EXIT_OK } else { EXIT_FAIL })
        }
    }
}

fn construct(ctx: &Ctx, k: usize, format: GraphFormat) -> anyhow::Result<u8> {
    let g = build_inout(k)?;
    match format {
        GraphFormat::Text if ctx.json => println!(
            "{}",
            json!({ "k": k, "order": g.order(), "incoming": g.incoming, "outgoing": g.outgoing, "arcs": g.graph.arcs() })
        ),
        GraphFormat::Text => print!("{}", g.to_text()),
        GraphFormat::Dot => {
            let l = layout(k)?;
            if ctx.json {
                println!("{}", json!({ "k": k, "coords": l.coords, "arcs": g.graph.arcs(), "crossings": l.crossings }));
            } else {
                print!("{}", dot(&g, &l));
            }
        }
    }
    Ok(EXIT_OK)
}

fn dot(g: &InOutGraph, l: &inout_core::Layout) -> String {
    let mut out = format!("// crossings: {}\ndigraph S_{} {{\n  node [shape=circle];\n", l.crossings, l.k);
    for v in g.graph.vertices() {
        let (x, y) = l.position(v);
        let mut label = v.to_string();
        if let Some(j) = g.incoming.iter().position(|&x| x == v) {
            label.push_str(&format!(" i{}", j + 1));
        }
        if let Some(j) = g.outgoing.iter().position(|&x| x == v) {
            label.push_str(&format!(" o{}", j + 1));
        }
        out.push_str(&format!("  {v} [label=\"{label}\", pos=\"{x},{y}!\"];\n"));
    }
    for &(u, w) in g.graph.arcs() {
        out.push_str(&format!("  {u} -> {w};\n"));
    }
    out.push_str("}\n");
    out
}

fn verify(ctx: &Ctx, g: &InOutGraph, paranoid: bool) -> anyhow::Result<u8> {
    let report = verify_inout(g, &ctx.verify_options(paranoid))?;
    let ok = report.is_inout();
    let mut value = serde_json::to_value(&report)?;
    value["inout"] = json!(ok);
    ctx.emit(value, || {
        let yes = |b: bool| if b { "YES" } else { "NO" };
        let mut text = format!(
            "k-in-out: {}\nk: {}  order: {}  arcs: {}\npaired vertices: {}\nsingle visit: {} (by {})",
            yes(ok),
            report.k,
            report.order,
            report.arcs,
            yes(report.paired_ok),
            yes(report.single_visit_ok),
            match report.single_visit_method {
                SingleVisitMethod::Search => "cover search",
                SingleVisitMethod::BipartiteShortcut => "bipartite shortcut",
            }
        );
        match &report.witness {
            Some(Witness::ForbiddenPath { j, m, path }) => {
                text.push_str(&format!("\nwitness: Hamiltonian path i_{j} -> o_{m}: {}", join(path)));
            }
            Some(Witness::MissingPath { j }) => {
                text.push_str(&format!("\nwitness: no Hamiltonian path i_{j} -> o_{j}"))
            }
            Some(Witness::Cover { paths }) => {
                let ps: Vec<String> = paths.iter().map(|p| format!("[{}]", join(p))).collect();
                text.push_str(&format!("\nwitness: disjoint cover {}", ps.join(" ")));
            }
            None => {}
        }
        text
    });
    Ok(if ok { EXIT_OK } else { EXIT_FAIL })
}

fn join(vs: &[Vertex]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn search(ctx: &Ctx, order: usize, k: usize, max_arcs: usize, opts: &SearchOptions, show: bool) -> anyhow::Result<u8> {
    let outcome = search_min(order, k, max_arcs, opts)?;
    let summary = SearchSummary::from(&outcome);
    let status = if !outcome.graphs.is_empty() {
        "found"
    } else if outcome.complete {
        "none"
    } else {
        "budget exhausted"
    };
    let mut value = serde_json::to_value(&summary)?;
    value["status"] = json!(status);
    if show && ctx.json {
        value["graphs"] = json!(outcome.graphs.iter().map(|g| g.to_text()).collect::<Vec<_>>());
    }
    ctx.emit(value, || {
        let mut text = match status {
            "found" => format!(
                "found {} graph(s) (min arcs {}){}",
                outcome.graphs.len(),
                outcome.min_arcs().unwrap_or(0),
                if outcome.truncated { ", list truncated" } else { "" }
            ),
            "none" => "none found".to_string(),
            _ => "budget exhausted: search incomplete, none found so far".to_string(),
        };
        if !outcome.complete && !outcome.graphs.is_empty() {
            text.push_str(" (budget exhausted: search incomplete)");
        }
        text.push_str(&format!(
            "\norder {order}, k {k}, max arcs {max_arcs}: {} labelings, {} arc sets, {:.2}s",
            outcome.labelings,
            outcome.subsets_examined,
            outcome.elapsed.as_secs_f64()
        ));
        if show {
            for (i, g) in outcome.graphs.iter().enumerate() {
                text.push_str(&format!("\n# graph {}\n{}", i + 1, g.to_text().trim_end()));
            }
        }
        text
    });
    Ok(match status {
        "found" if outcome.complete => EXIT_OK,
        "found" | "budget exhausted" => EXIT_BUDGET,
        _ => EXIT_FAIL,
    })
}

fn convert(
    ctx: &Ctx,
    input: &Path,
    output: &Path,
    sentinel: Option<u64>,
    map_path: Option<&Path>,
) -> anyhow::Result<u8> {
    let parsed = gtsp::parse_gtsp(&read(input)?).with_context(|| format!("parsing {}", input.display()))?;
    for w in parsed.warnings.iter().chain(&gtsp::preflight_warnings(&parsed.instance)) {
        ctx.warn(w);
    }
    let inst = &parsed.instance;
    let (atsp, map) = gtsp::convert(inst)?;
    let text = match sentinel {
        Some(s) => {
            let (text, warning) = gtsp::write_tsplib_matrix(&atsp, s);
            ctx.warn(&format!("LARGE WEIGHTS REINTRODUCED: {warning}"));
            text
        }
        None => gtsp::write_atsp(&atsp),
    };
    write(output, &text)?;
    if let Some(p) = map_path {
        write(p, &map.to_json_lines())?;
    }
    ctx.emit(
        json!({
            "n": inst.n,
            "groups": inst.group_count(),
            "order": atsp.order,
            "arcs": atsp.arcs.len(),
            "max_weight": atsp.max_weight(),
            "output": output,
            "map": map_path,
        }),
        || {
            format!(
                "converted n={} g={} into order {} with {} arcs (max weight {}) -> {}",
                inst.n,
                inst.group_count(),
                atsp.order,
                atsp.arcs.len(),
                atsp.max_weight(),
                output.display()
            )
        },
    );
    Ok(EXIT_OK)
}

fn parse_tour(text: &str) -> anyhow::Result<Vec<Vertex>> {
    let mut tour = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line == "-1" || line == "EOF" {
            continue;
        }
        tour.push(
            line.parse()
                .map_err(|_| Error::Parse { line: i + 1, msg: format!("expected a vertex id, found {line:?}") })?,
        );
    }
    Ok(tour)
}

fn map_tour(ctx: &Ctx, map: &Path, tour: &Path) -> anyhow::Result<u8> {
    let map = ConversionMap::from_json_lines(&read(map)?).with_context(|| format!("parsing {}", map.display()))?;
    let tour = parse_tour(&read(tour)?)?;
    let back = gtsp::map_tour_back(&tour, &map)?;
    ctx.emit(serde_json::to_value(&back)?, || format!("tour: {}\ncost: {}", join(&back.vertices), back.cost));
    Ok(EXIT_OK)
}
