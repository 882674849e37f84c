mod common;

use std::path::Path;
use std::process::Command;

use confweave::cli::{run, EXIT_INPUT, EXIT_OK, EXIT_UNSAT, EXIT_USAGE};
use confweave::emit::{check_minion, parse_report};

use common::{fixture, fixture_path};

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Outcome {
    let mut argv = vec!["confweave"];
    argv.extend_from_slice(args);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path(name: &str) -> String {
    fixture_path(name).display().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const GRID_LIB: &str = "
template A() { provides f; properties x; }
template B() { provides f; properties y; }
template C() { provides f; }
";
const GRID_PROBLEM: &str = "problem Grid { requires f a; requires f b; requires f c; }";

#[test]
fn solve_worked_example() {
    let (lib, prob) = (path("solver_library.adl"), path("sum_problem.adl"));
    let o = cli(&["solve", "--library", &lib, "--problem", &prob]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(o.stdout, fixture("sum_problem.golden.json"));
    assert_eq!(o.stderr, "");
}

#[test]
fn solve_is_first_of_all() {
    let (lib, prob) = (path("solver_library.adl"), path("sum_problem.adl"));
    let solve = parse_report(&cli(&["solve", "--library", &lib, "--problem", &prob]).stdout).unwrap();
    let all = parse_report(&cli(&["all", "--library", &lib, "--problem", &prob]).stdout).unwrap();
    assert_eq!(all.len(), 2);
    assert_eq!(solve[0], all[0]);
}

#[test]
fn limit_gives_a_prefix() {
    let dir = tempfile::tempdir().unwrap();
    let lib = write(dir.path(), "grid.adl", GRID_LIB);
    let prob = write(dir.path(), "grid_problem.adl", GRID_PROBLEM);
    let all = cli(&["all", "--library", &lib, "--problem", &prob]);
    let all = parse_report(&all.stdout).unwrap();
    assert_eq!(all.len(), 27);
    let some = cli(&["all", "--library", &lib, "--problem", &prob, "--limit", "5"]);
    assert_eq!(some.code, EXIT_OK);
    let some = parse_report(&some.stdout).unwrap();
    assert_eq!(some.len(), 5);
    assert_eq!(some[..], all[..5]);
}

#[test]
fn unresolved_facility_is_one_error() {
    let dir = tempfile::tempdir().unwrap();
    let lib = write(dir.path(), "grid.adl", GRID_LIB);
    let prob = write(dir.path(), "bad.adl", "problem P {\n    requires teleport t;\n}\n");
    let o = cli(&["check", "--library", &lib, "--problem", &prob]);
    assert_eq!(o.code, EXIT_INPUT);
    assert_eq!(o.stdout, "");
    let lines: Vec<&str> = o.stderr.lines().filter(|l| l.contains(": error: ")).collect();
    assert_eq!(lines.len(), 1, "{}", o.stderr);
    assert_eq!(
        lines[0],
        format!("{}:2:14: error: no implementation provides 'teleport'", prob)
    );
}

#[test]
fn check_is_quiet_on_success() {
    let (lib, prob) = (path("solver_library.adl"), path("sum_problem.adl"));
    let o = cli(&["check", "--library", &lib, "--problem", &prob]);
    assert_eq!((o.code, o.stdout.as_str(), o.stderr.as_str()), (EXIT_OK, "", ""));
}

#[test]
fn unsat_exits_1() {
    let (lib, prob) = (path("library_no_constant.adl"), path("bool_sum_no_constant.adl"));
    for mode in ["solve", "all"] {
        let o = cli(&[mode, "--library", &lib, "--problem", &prob]);
        assert_eq!(o.code, EXIT_UNSAT, "{}", o.stderr);
        assert!(parse_report(&o.stdout).unwrap().is_empty());
        assert!(o.stderr.contains("unsatisfiable"));
    }
}

#[test]
fn emit_minion_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("model.minion").display().to_string();
    let (lib, prob) = (path("solver_library.adl"), path("sum_problem.adl"));
    let o = cli(&["emit-minion", "--library", &lib, "--problem", &prob, "--out", &out]);
    assert_eq!(o.code, EXIT_OK);
    assert_eq!(o.stdout, "");
    let text = std::fs::read_to_string(&out).unwrap();
    check_minion(&text).unwrap();
    let direct = cli(&["emit-minion", "--library", &lib, "--problem", &prob]);
    assert_eq!(direct.stdout, text);
}

#[test]
fn order_file_changes_the_first_solution() {
    let dir = tempfile::tempdir().unwrap();
    let order = write(
        dir.path(),
        "order.json",
        r#"{"vars": ["pvz"], "values": {"pvz": ["DiscreteVar"]}}"#,
    );
    let (lib, prob) = (path("solver_library.adl"), path("sum_problem.adl"));
    let o = cli(&["solve", "--library", &lib, "--problem", &prob, "--order", &order]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    let c = parse_report(&o.stdout).unwrap();
    assert_eq!(c[0].get("pvz"), Some("DiscreteVar"));

    let bad = write(dir.path(), "bad.json", r#"{"values": {"pvz": ["GacSum"]}}"#);
    let o = cli(&["solve", "--library", &lib, "--problem", &prob, "--order", &bad]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.contains("GacSum"), "{}", o.stderr);

    let junk = write(dir.path(), "junk.json", "{\"vars\": 3}");
    let o = cli(&["solve", "--library", &lib, "--problem", &prob, "--order", &junk]);
    assert_eq!(o.code, EXIT_INPUT);
    assert_eq!(o.stdout, "");
}

#[test]
fn depth_limit() {
    let dir = tempfile::tempdir().unwrap();
    let lib = write(dir.path(), "loop.adl", "template A() { provides f; requires f inner; }");
    let prob = write(dir.path(), "p.adl", "problem P { requires f x; }");
    let o = cli(&["solve", "--library", &lib, "--problem", &prob, "--depth", "3"]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.contains("depth limit 3"), "{}", o.stderr);
    assert!(o.stderr.contains("warning: requirement cycle"), "{}", o.stderr);
}

#[test]
fn libraries_concatenate() {
    let dir = tempfile::tempdir().unwrap();
    let text = fixture("solver_library.adl");
    let split = text.find("template GacSum").unwrap();
    let first = write(dir.path(), "vars.adl", &text[..split]);
    let second = write(dir.path(), "sums.adl", &text[split..]);
    let prob = path("sum_problem.adl");
    let o = cli(&["solve", "--library", &first, "--library", &second, "--problem", &prob]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
    assert_eq!(o.stdout, fixture("sum_problem.golden.json"));

    let whole = path("solver_library.adl");
    let o = cli(&["check", "--library", &whole, "--library", &second, "--problem", &prob]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.contains("already defined"), "{}", o.stderr);
}

#[test]
fn syntax_errors_are_located() {
    let dir = tempfile::tempdir().unwrap();
    let lib = write(dir.path(), "broken.adl", "template A() {\n    provides f\n}\n");
    let prob = write(dir.path(), "p.adl", "problem P { requires f x; }");
    let o = cli(&["check", "--library", &lib, "--problem", &prob]);
    assert_eq!(o.code, EXIT_INPUT);
    assert!(o.stderr.starts_with(&format!("{}:3:1: error:", lib)), "{}", o.stderr);
}

#[test]
fn usage_errors() {
    assert_eq!(cli(&[]).code, EXIT_USAGE);
    assert_eq!(cli(&["solve"]).code, EXIT_USAGE);
    assert_eq!(cli(&["solve", "--library", "x", "--problem", "y", "--bogus"]).code, EXIT_USAGE);
    let help = cli(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("emit-minion"));
}

#[test]
fn binary_end_to_end() {
    let bin = env!("CARGO_BIN_EXE_confweave");
    let out = Command::new(bin)
        .args(["solve", "--library", &path("solver_library.adl"), "--problem", &path("sum_problem.adl")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap(), fixture("sum_problem.golden.json"));

    let out = Command::new(bin)
        .args(["all", "--library", &path("library_no_constant.adl"), "--problem", &path("bool_sum_no_constant.adl")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = Command::new(bin).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}
