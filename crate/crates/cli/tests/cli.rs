use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn inout(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_inout")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const PAIR: &str = "NAME: pair
TYPE: GTSP
DIMENSION: 4
GTSP_SETS: 2
EDGE_DATA_SECTION
1 3 5
3 1 5
2 4 7
4 2 7
1 4 9
4 1 9
-1
GTSP_SET_SECTION
1 1 2 -1
2 3 4 -1
EOF
";

#[test]
fn construct_dot_reports_one_crossing_for_k9() {
    let o = inout(&["construct", "--k", "9", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("// crossings: 1\n"), "{out}");
    assert_eq!(out.matches("pos=").count(), 17);
    assert_eq!(out.matches(" -> ").count(), 33);

    let o = inout(&["--json", "construct", "--k", "9", "--format", "dot"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["crossings"], 1);
}

#[test]
fn construct_rejects_non_positive_k() {
    for k in ["-1", "0"] {
        let o = inout(&["construct", "--k", k]);
        assert_eq!(o.status.code(), Some(2));
        assert!(stderr(&o).contains("invalid k"), "{}", stderr(&o));
    }
}

#[test]
fn verify_constructed_graph() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s4.txt");
    let o = inout(&["construct", "--k", "4"]);
    fs::write(&file, stdout(&o)).unwrap();
    let o = inout(&["verify", "--input", path(&file)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("k-in-out: YES"));

    let o = inout(&["--json", "verify", "--input", path(&file), "--paranoid"]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["inout"], true);
    assert_eq!(v["single_visit_method"], "search");
}

#[test]
fn verify_reports_cover_witness() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("fig.txt");
    fs::write(&file, "4 2\n1 3\n2 4\n1 2\n2 3\n3 4\n").unwrap();
    let o = inout(&["verify", "--input", path(&file)]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("k-in-out: NO"));
    assert!(out.contains("disjoint cover [1 2] [3 4]"), "{out}");
}

#[test]
fn verify_bad_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.txt");
    fs::write(&file, "3 1\n1\n3\n1 x\n").unwrap();
    let o = inout(&["verify", "--input", path(&file)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4"), "{}", stderr(&o));
}

#[test]
fn search_order_five_finds_nothing() {
    let o = inout(&["search", "--order", "5", "--k", "3", "--max-arcs", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("none found"));
}

#[test]
fn search_budget_exhaustion_uses_exit_three() {
    let o = inout(&["--json", "search", "--order", "6", "--k", "3", "--max-arcs", "12", "--time-budget", "0.05"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["complete"], false);
}

#[test]
fn search_small_case_is_deterministic() {
    let a = inout(&["search", "--order", "3", "--k", "2", "--max-arcs", "4", "--show"]);
    let b = inout(&["--sequential", "search", "--order", "3", "--k", "2", "--max-arcs", "4", "--show"]);
    assert_eq!(a.status.code(), Some(0));
    let strip = |s: String| s.lines().filter(|l| !l.starts_with("order ")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(stdout(&a)), strip(stdout(&b)));
    assert!(stdout(&a).contains("# graph 1\n3 2\n"));
}

#[test]
fn convert_map_tour_and_constraints_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let (gtsp, atsp, map, lp, tour) =
        (d.join("p.gtsp"), d.join("p.atsp"), d.join("p.map"), d.join("p.lp"), d.join("tour.txt"));
    fs::write(&gtsp, PAIR.replace("4 1 9\n", "4 1 9\n1 2 3\n")).unwrap();

    let o = inout(&["convert", "--input", path(&gtsp), "--output", path(&atsp), "--map", path(&map)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("dropped arc (1,2)"));
    assert!(stdout(&o).contains("order 6"));
    let text = fs::read_to_string(&atsp).unwrap();
    assert!(text.contains("DIMENSION: 6\n") && text.contains("\n3 4 5\n"));

    fs::write(&tour, "1\n2\n3\n4\n5\n6\n").unwrap();
    let o = inout(&["--json", "map-tour", "--map", path(&map), "--tour", path(&tour)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["vertices"], serde_json::json!([1, 3]));
    assert_eq!(v["cost"], 10);

    fs::write(&tour, "1\n3\n2\n4\n5\n6\n").unwrap();
    let o = inout(&["map-tour", "--map", path(&map), "--tour", path(&tour)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("invalid tour"));

    let o = inout(&["emit-constraints", "--instance", path(&atsp), "--map", path(&map), "--output", path(&lp)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = fs::read_to_string(&lp).unwrap();
    assert!(first.contains("\n c_s1_in: x_4_1 + x_4_3 + x_6_1 = 1\n"), "{first}");
    assert_eq!(first.matches("\n c_s").count(), 20);
    let o = inout(&["emit-constraints", "--instance", path(&atsp), "--map", path(&map), "--output", path(&lp)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read_to_string(&lp).unwrap(), first);
}

#[test]
fn tsplib_output_needs_sentinel_and_warns() {
    let dir = tempfile::tempdir().unwrap();
    let (gtsp, out) = (dir.path().join("p.gtsp"), dir.path().join("p.tsp"));
    fs::write(&gtsp, PAIR).unwrap();
    let o = inout(&["convert", "--input", path(&gtsp), "--output", path(&out), "--tsplib"]);
    assert_eq!(o.status.code(), Some(2));
    let o = inout(&["convert", "--input", path(&gtsp), "--output", path(&out), "--tsplib", "--sentinel", "100000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("LARGE WEIGHTS REINTRODUCED"));
    assert!(fs::read_to_string(&out).unwrap().contains("EDGE_WEIGHT_FORMAT: FULL_MATRIX"));
}

#[test]
fn selftest_passes() {
    let o = inout(&["selftest", "--kmax", "6", "--instances", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS ")).count(), 8, "{out}");

    let o = inout(&["--json", "selftest", "--kmax", "4", "--instances", "3"]);
    for line in stdout(&o).lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(inout(&["search", "--order", "5"]).status.code(), Some(2));
    assert_eq!(inout(&["selftest", "--kmax", "0"]).status.code(), Some(2));
    assert_eq!(inout(&["--threads", "0", "construct", "--k", "2"]).status.code(), Some(2));
    assert_eq!(inout(&["frobnicate"]).status.code(), Some(2));
}
