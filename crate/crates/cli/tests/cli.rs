use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tagderiv"))
        .current_dir(root())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const FIG1: &str = "grammars/adjectives.json";

#[test]
fn recognize_accepts_and_rejects() {
    let o = run(&["recognize", "-g", FIG1, "-i", "pepper"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "true\n");
    let o = run(&["recognize", "-g", FIG1, "-i", "pepper red"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn parse_prints_one_class_per_derivation() {
    let o = run(&["parse", "-g", FIG1, "-i", "roasted red pepper"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "alpha_pe(1:beta_re, 1:beta_ro)\n  derived: (NP (N roasted (N red (N pepper))))\n  frontier: roasted red pepper\n"
    );
}

#[test]
fn parse_agrees_with_the_oracle_byte_for_byte() {
    for (g, input, mode) in [
        (FIG1, "roasted red pepper", "extended"),
        (FIG1, "red red pepper", "extended"),
        (
            "grammars/adjectives-standard.json",
            "roasted red pepper",
            "standard",
        ),
        (
            "grammars/clauses.json",
            "John thinks Mary sleeps today",
            "extended",
        ),
    ] {
        for json in [false, true] {
            let mut args = vec![
                "parse",
                "-g",
                g,
                "-i",
                input,
                "--mode",
                mode,
                "--max-nodes",
                "6",
            ];
            if json {
                args.push("--json");
            }
            let a = run(&args);
            args.push("--oracle");
            let b = run(&args);
            assert_eq!(a.status.code(), b.status.code(), "{input}");
            assert_eq!(stdout(&a), stdout(&b), "{input}");
            assert!(!stdout(&a).is_empty());
        }
    }
}

#[test]
fn derive_reports_frontier() {
    let o = run(&[
        "derive",
        "-g",
        FIG1,
        "-d",
        "derivations/independent-reversed.json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("frontier: red roasted pepper\n"));
    let o = run(&[
        "derive",
        "-g",
        FIG1,
        "-d",
        "derivations/independent.json",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["frontier"], "roasted red pepper");
}

#[test]
fn derive_rejects_ill_formed_derivation() {
    let o = run(&[
        "derive",
        "--mode",
        "standard",
        "-g",
        "grammars/adjectives-standard.json",
        "-d",
        "derivations/independent.json",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("two sibling arcs at 1"));
}

#[test]
fn malformed_json_names_file_and_position() {
    let dir = std::env::temp_dir().join(format!("tagderiv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\n  \"name\": \"x\",\n  \"start\": ]\n}\n").unwrap();
    let o = run(&["validate", "-g", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains(&format!("{}:3:", bad.display())),
        "{}",
        stderr(&o)
    );
}

#[test]
fn unknown_token_is_an_input_error() {
    let o = run(&["parse", "-g", FIG1, "-i", "red tomato"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("\"tomato\""));
}

#[test]
fn canon_sorts_by_address() {
    let o = run(&["canon", "-d", "derivations/clause-unordered.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "alpha_sleeps(e:beta_thinks(1=alpha_john), 1=alpha_mary)\n"
    );
}

#[test]
fn enumerate_is_sorted() {
    let o = run(&["enumerate", "-g", FIG1, "--max-nodes", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    let mut sorted = lines.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(lines, sorted);
    assert!(lines.contains(&"red red pepper".to_string()));
    let std = run(&[
        "enumerate",
        "-g",
        FIG1,
        "--mode",
        "standard",
        "--max-nodes",
        "3",
    ]);
    assert!(stdout(&std).lines().any(|l| l == "red pepper"));
    assert!(!stdout(&std).lines().any(|l| l == "red red pepper"));
}

#[test]
fn validate_and_compile() {
    for g in [
        FIG1,
        "grammars/adjectives-standard.json",
        "grammars/clauses.json",
    ] {
        let o = run(&["validate", "-g", g]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o), "ok\n");
    }
    let o = run(&["compile", "-g", FIG1]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out
        .lines()
        .all(|l| l.contains(" -> ") && l.contains("# type=")));
    assert!(out.contains("# type=4b"));
    let o = run(&["compile", "-g", FIG1, "--mode", "standard"]);
    assert!(stdout(&o).contains("# type=4a") && !stdout(&o).contains("# type=4b"));
}

#[test]
fn chart_dump_goes_to_stderr() {
    let o = run(&["recognize", "-g", FIG1, "-i", "red pepper", "--chart"]);
    assert_eq!(stdout(&o), "true\n");
    assert!(stderr(&o).lines().count() > 20);
}
