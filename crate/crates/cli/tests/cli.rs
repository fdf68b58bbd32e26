use std::io::Write;
use std::process::{Command, Output, Stdio};

fn stratvote(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stratvote")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_exit_codes() {
    let yes = stratvote(&["--builtin", "ex1", "eval", "K2 a >_1 d"]);
    assert_eq!(stdout(&yes), "true\n");
    assert_eq!(yes.status.code(), Some(0));
    let no = stratvote(&["--builtin", "ex1", "--point", "t", "eval", "K2 a >_1 d"]);
    assert_eq!(stdout(&no), "false\n");
    assert_eq!(no.status.code(), Some(1));
    let bad = stratvote(&["--builtin", "ex1", "eval", "K2 a >_"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("1:8"));
}

#[test]
fn classify_ex2() {
    let o = stratvote(&["--builtin", "ex2", "classify", "--voter", "1"]);
    let text = stdout(&o);
    assert!(text.contains("de_dicto=true\n") && text.contains("de_re=false\n"), "{text}");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn matrix_is_tsv() {
    let o = stratvote(&["--builtin", "ex4", "matrix"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 17);
    assert!(text.starts_with("1\\2\ta\tb\tc\td\n"));
    assert!(text.contains("\nad\taaa\tbbb\taca\tada\n"), "{text}");
}

#[test]
fn winners_and_equilibria() {
    let o = stratvote(&["--builtin", "ex9", "winners", "--necessary"]);
    assert_eq!(stdout(&o), "a\n");
    let o = stratvote(&["--builtin", "ex3", "equilibria", "--reduce-ballots"]);
    assert!(stdout(&o).ends_with("2 equilibria\n"));
    let o = stratvote(&["--builtin", "ex9", "winners"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scenario_files_and_overrides() {
    let dir = std::env::temp_dir().join(format!("stratvote-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tiny.scn");
    std::fs::write(
        &path,
        "candidates: a b\nvoters: 1\nrule: plurality\ntiebreak: b a\nstate s: 1: a b\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let o = stratvote(&["--scenario", p, "eval", "win(a)"]);
    assert_eq!(stdout(&o), "true\n");
    let o = stratvote(&["--scenario", p, "--rule", "positional 1 1", "eval", "win(b)"]);
    assert_eq!(stdout(&o), "true\n");
    let o = stratvote(&["--scenario", "/nonexistent.scn", "show"]);
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&path, "candidates: a b\nvoters: 1\nstate s: 1: a b\npartition 1: s t\n").unwrap();
    let o = stratvote(&["--scenario", p, "show"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn declare_reports_the_declared_winner() {
    let o = stratvote(&["--builtin", "ex7", "declare", "1", "--vote", "b a c"]);
    assert!(stdout(&o).ends_with("declared winner at s: b\n"), "{}", stdout(&o));
    let o = stratvote(&["--builtin", "ex7", "declare", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn repl_keeps_state() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_stratvote"))
        .args(["--builtin", "ex6", "repl"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(b"point u\nannounce \"vote(1, u)\"\nshow\ntranscript\n")
        .unwrap();
    let o = child.wait_with_output().unwrap();
    let text = stdout(&o);
    assert!(text.contains("partition 1: u\n"), "{text}");
    assert!(text.ends_with("announce vote(1, u) | states: u\n"), "{text}");
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn examples_and_harness() {
    let o = stratvote(&["example", "ex1"]);
    assert!(stdout(&o).starts_with("# ex1: "));
    let o = stratvote(&["list"]);
    assert_eq!(stdout(&o).lines().count(), 10);
    let o = stratvote(&["harness", "roundtrip", "--seed", "5", "--trials", "200"]);
    assert_eq!(stdout(&o), "roundtrip: 200 formulas, 0 failures\n");
    let a = stratvote(&["harness", "weak", "--seed", "9", "--trials", "2000"]);
    let b = stratvote(&["harness", "weak", "--seed", "9", "--trials", "2000"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(a.status.code(), Some(0));
}
