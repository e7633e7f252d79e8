use std::io::Write;
use std::process::{Command, Output, Stdio};

fn respgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_respgap")).args(args).output().expect("binary runs")
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_respgap"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn gaps_of_two_person_rule() {
    let o = respgap(&["gaps", "--example", "two-person-rule", "--semantics", "counterfactual"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("counterfactual gap: {v1, v2}\n"), "{text}");
    assert!(text.contains("v3 (Yes): P @ u1"));
}

#[test]
fn strict_gaps_exit_one() {
    assert_eq!(respgap(&["gaps", "--example", "two-person-rule", "--strict"]).status.code(), Some(1));
    assert_eq!(respgap(&["gaps", "--example", "academic", "--strict"]).status.code(), Some(0));
    let epistemic = respgap(&["gaps", "--example", "mechanism-M", "--semantics", "epistemic", "--strict"]);
    assert_eq!(epistemic.status.code(), Some(0));
    assert!(stdout(&epistemic).starts_with("epistemic gap: {}\n"));
}

#[test]
fn classify_academic() {
    let o = respgap(&["classify", "--example", "academic"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("elected dictatorship: yes (D @ u1)\n"));
}

#[test]
fn classify_two_person_rule_has_no_dictators() {
    let o = respgap(&["classify", "--example", "two-person-rule"]);
    let text = stdout(&o);
    assert!(text.starts_with("elected dictatorship: no"), "{text}");
    assert!(text.ends_with("dictators: none\n"));
}

#[test]
fn solve_text_and_json() {
    let o = respgap(&["solve", "--example", "two-person-rule", "--agent", "P", "--outcome", "No", "--semantics", "win"]);
    assert!(stdout(&o).starts_with("win_P(No) = {u1, v1, v2}\n"));
    let o = respgap(&["--format", "json", "solve", "--example", "confusion", "--agent", "A", "--outcome", "Yes", "--semantics", "ewin"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let nodes: Vec<&str> = v["nodes"].as_array().unwrap().iter().map(|n| n.as_str().unwrap()).collect();
    assert!(nodes.contains(&"u4"));
    assert_eq!(v["semantics"], "ewin");
}

#[test]
fn unknown_agent_is_an_input_error() {
    let o = respgap(&["solve", "--example", "academic", "--agent", "Z", "--outcome", "Yes"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown agent"));
}

#[test]
fn verify_theorem1() {
    let o = respgap(&["verify", "--theorem", "1", "--max-depth", "2", "--agents", "2", "--max-actions", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.ends_with("failed: 0\n"), "{text}");
    assert!(text.contains("not a proof"));
}

#[test]
fn verify_json_is_identical_across_jobs() {
    let args = |jobs: &'static str| {
        vec!["--format", "json", "verify", "--theorem", "lemmas", "--max-depth", "3", "--mode", "sampled", "--samples", "400", "--partitions", "sampled", "--seed", "9", "--jobs", jobs]
    };
    let one = respgap(&args("1"));
    let eight = respgap(&args("8"));
    assert_eq!(one.status.code(), Some(0));
    assert!(!one.stdout.is_empty());
    assert_eq!(one.stdout, eight.stdout);
}

#[test]
fn verify_budget_is_an_input_error() {
    let o = respgap(&["verify", "--theorem", "1", "--max-depth", "3", "--budget", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--budget"));
}

#[test]
fn verify_rejects_bad_suite() {
    assert_eq!(respgap(&["verify", "--theorem", "4"]).status.code(), Some(2));
}

#[test]
fn input_from_stdin_and_files() {
    let source = stdout(&respgap(&["examples", "show", "senate"]));
    let o = with_stdin(&["validate", "-"], &source);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("ok: "));

    let dir = std::env::temp_dir().join(format!("respgap-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("senate.mech");
    std::fs::write(&path, &source).unwrap();
    let o = respgap(&["--format", "json", "validate", path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["valid"], true);
    assert_eq!(v["name"], "senate");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn input_errors_exit_two() {
    let o = with_stdin(&["validate", "-"], "agents: A\nroot: u1\nleaf u1 = Maybe\n");
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"));
    assert_eq!(respgap(&["validate", "/nonexistent/file.mech"]).status.code(), Some(2));
    assert_eq!(respgap(&["validate", "--example", "nope"]).status.code(), Some(2));
    assert_eq!(respgap(&["validate"]).status.code(), Some(2));
    assert_eq!(respgap(&["validate", "x.mech", "--example", "senate"]).status.code(), Some(2));
    assert_eq!(respgap(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn examples_list_and_show() {
    let list = stdout(&respgap(&["examples", "list"]));
    assert_eq!(list.lines().count(), 7);
    assert!(list.lines().any(|l| l.starts_with("drawing-straws ")));
    assert_eq!(stdout(&respgap(&["examples"])), list);
    let v: serde_json::Value = serde_json::from_slice(&respgap(&["--format", "json", "examples", "show", "academic"]).stdout).unwrap();
    assert!(v["source"].as_str().unwrap().contains("mechanism \"academic\""));
    assert_eq!(respgap(&["examples", "show", "nope"]).status.code(), Some(2));
}

#[test]
fn dot_export() {
    let o = respgap(&["dot", "--example", "drawing-straws"]);
    let text = stdout(&o);
    assert!(text.starts_with("digraph "));
    assert!(text.contains("style=dashed"));
}

#[test]
fn json_output_is_stable() {
    for args in [
        vec!["--format", "json", "classify", "--example", "mechanism-N"],
        vec!["--format", "json", "gaps", "--example", "mechanism-N", "--semantics", "epistemic"],
        vec!["--format", "json", "examples", "list"],
    ] {
        let a = respgap(&args);
        let b = respgap(&args);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
        serde_json::from_slice::<serde_json::Value>(&a.stdout).unwrap();
    }
    let gaps: serde_json::Value =
        serde_json::from_slice(&respgap(&["--format", "json", "gaps", "--example", "mechanism-N", "--semantics", "epistemic"]).stdout).unwrap();
    assert!(gaps["gap"].as_array().unwrap().iter().any(|v| v == "v2"));
}
