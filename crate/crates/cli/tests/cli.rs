//! End-to-end tests that drive the compiled binary as a subprocess.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use parem_cli::bench::CSV_HEADER;

fn parem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parem"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn run_ok(args: &[&str]) -> String {
    let out = parem(args);
    assert!(
        out.status.success(),
        "expected success for {args:?}, got {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout should be UTF-8")
}

fn run_err(args: &[&str]) -> (i32, String) {
    let out = parem(args);
    let code = out.status.code().expect("process should exit normally");
    assert_ne!(code, 0, "expected failure for {args:?}");
    (code, String::from_utf8_lossy(&out.stderr).into_owned())
}

/// Value of a `key: value` line in command output.
fn field<'a>(stdout: &'a str, key: &str) -> &'a str {
    let prefix = format!("{key}: ");
    stdout
        .lines()
        .find_map(|line| line.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no `{key}:` line in output:\n{stdout}"))
}

fn count_occurrences(haystack: &[u8], needle: &[u8]) -> usize {
    if needle.is_empty() || haystack.len() < needle.len() {
        return 0;
    }
    haystack
        .windows(needle.len())
        .filter(|w| w == &needle)
        .count()
}

fn write_input(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn compile_reports_the_table_shape() {
    let stdout = run_ok(&["compile", "--literal", "parallel", "--alphabet", "parel"]);
    assert_eq!(field(&stdout, "states"), "9");
    assert_eq!(field(&stdout, "alphabet"), "parel");
    assert_eq!(field(&stdout, "complete"), "true");
}

#[test]
fn compile_writes_table_and_dot_files() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("search.dfa");
    run_ok(&[
        "compile",
        "--literal",
        "parallel",
        "--alphabet",
        "parel",
        "--out",
        table.to_str().unwrap(),
        "--dot",
    ]);
    let text = fs::read_to_string(&table).unwrap();
    assert!(
        text.starts_with("symbols\tp\ta\tr\te\tl\n"),
        "table:\n{text}"
    );
    assert!(text.contains("finals\t8\n"));
    let dot = fs::read_to_string(dir.path().join("search.dot")).unwrap();
    assert!(dot.starts_with("digraph dfa {"), "dot:\n{dot}");
    assert!(dot.contains("doublecircle"));
}

#[test]
fn compile_then_match_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("search.dfa");
    run_ok(&[
        "compile",
        "--literal",
        "parallel",
        "--alphabet",
        "parel",
        "-o",
        table.to_str().unwrap(),
    ]);
    let input = write_input(dir.path(), "in.txt", "plaraparallelapareparapl");
    let table = table.to_str().unwrap();

    let stdout = run_ok(&[
        "match",
        "--dfa",
        table,
        "--input",
        &input,
        "--engine",
        "parem",
        "--threads",
        "4",
    ]);
    assert_eq!(field(&stdout, "count"), "1");
    assert_eq!(field(&stdout, "end_state"), "0");
    assert_eq!(field(&stdout, "routes"), "5");

    let stdout = run_ok(&[
        "match",
        "--dfa",
        table,
        "--input",
        &input,
        "--engine",
        "enum",
        "--threads",
        "4",
    ]);
    assert_eq!(field(&stdout, "count"), "1");
    assert_eq!(field(&stdout, "end_state"), "0");
    assert_eq!(field(&stdout, "routes"), "28");

    let stdout = run_ok(&[
        "match", "--dfa", table, "--input", &input, "--engine", "seq",
    ]);
    assert_eq!(field(&stdout, "count"), "1");
    assert_eq!(field(&stdout, "end_state"), "0");
    assert_eq!(field(&stdout, "routes"), "1");
}

#[test]
fn match_accept_mode_answers_both_ways() {
    let dir = tempfile::tempdir().unwrap();
    let yes = write_input(dir.path(), "yes.txt", "abbb");
    let no = write_input(dir.path(), "no.txt", "ba");

    let stdout = run_ok(&[
        "match", "--regex", "ab*", "--input", &yes, "--mode", "accept",
    ]);
    assert_eq!(field(&stdout, "accepted"), "true");

    let stdout = run_ok(&[
        "match", "--regex", "ab*", "--input", &no, "--mode", "accept",
    ]);
    assert_eq!(field(&stdout, "accepted"), "false");
}

#[test]
fn invalid_pattern_exits_2() {
    let (code, stderr) = run_err(&["compile", "--regex", "(a"]);
    assert_eq!(code, 2);
    assert!(stderr.starts_with("error: "), "stderr:\n{stderr}");
}

#[test]
fn missing_input_file_exits_1() {
    let (code, stderr) = run_err(&["match", "--regex", "a", "--input", "/nonexistent/input.txt"]);
    assert_eq!(code, 1);
    assert!(
        stderr.contains("/nonexistent/input.txt"),
        "stderr:\n{stderr}"
    );
}

#[test]
fn foreign_input_byte_exits_2_with_its_offset() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "in.txt", "paz");
    let (code, stderr) = run_err(&[
        "match",
        "--literal",
        "parallel",
        "--alphabet",
        "parel",
        "--input",
        &input,
    ]);
    assert_eq!(code, 2);
    assert!(stderr.contains("0x7a"), "stderr:\n{stderr}");
    assert!(stderr.contains("offset 2"), "stderr:\n{stderr}");
}

#[test]
fn zero_threads_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_input(dir.path(), "in.txt", "a");
    let (code, _) = run_err(&["match", "--regex", "a", "--input", &input, "--threads", "0"]);
    assert_eq!(code, 2);
}

#[test]
fn gen_is_deterministic_and_plants_literals() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.bin");
    let second = dir.path().join("b.bin");
    let gen_into = |out: &Path| {
        run_ok(&[
            "gen",
            "500",
            "--alphabet",
            "pare",
            "--plant",
            "parallel",
            "--occurrences",
            "3",
            "--seed",
            "7",
            "-o",
            out.to_str().unwrap(),
        ])
    };
    let stdout = gen_into(&first);
    assert!(stdout.contains("wrote 500 bytes"), "stdout:\n{stdout}");
    gen_into(&second);

    let bytes_a = fs::read(&first).unwrap();
    let bytes_b = fs::read(&second).unwrap();
    assert_eq!(bytes_a, bytes_b, "same seed should give the same bytes");
    assert_eq!(bytes_a.len(), 500);
    // The background alphabet has no `l`, so every occurrence of the
    // literal is a planted one.
    assert_eq!(count_occurrences(&bytes_a, b"parallel"), 3);

    let stdout = run_ok(&[
        "match",
        "--literal",
        "parallel",
        "--alphabet",
        "parel",
        "--input",
        first.to_str().unwrap(),
        "--engine",
        "parem",
        "--threads",
        "3",
    ]);
    assert_eq!(field(&stdout, "count"), "3");
}

#[test]
fn bench_writes_a_csv_with_one_row_per_combination() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("bench.csv");
    run_ok(&[
        "bench",
        "--literal",
        "parallel",
        "--alphabet",
        "parel",
        "--engines",
        "seq,parem",
        "--threads",
        "1,2",
        "--lengths",
        "2000",
        "--reps",
        "3",
        "--seed",
        "5",
        "-o",
        csv_path.to_str().unwrap(),
    ]);
    let csv = fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4, "csv:\n{csv}");
    for row in &rows {
        assert_eq!(row.split(',').count(), 9, "row: {row}");
    }
    // Sequential rows are their own baseline.
    for row in rows.iter().filter(|r| r.starts_with("seq,")) {
        let speedup = row.split(',').nth(6).unwrap();
        assert_eq!(speedup, "1.0000", "row: {row}");
    }
}

#[cfg(unix)]
#[test]
fn closed_stdout_pipe_never_panics() {
    use std::os::unix::process::ExitStatusExt;
    use std::process::Stdio;

    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("big.bin");
    let status = parem(&[
        "gen",
        "2000000",
        "--alphabet",
        "parel",
        "--seed",
        "3",
        "-o",
        input.to_str().unwrap(),
    ]);
    assert!(status.status.success());

    let mut child = Command::new(env!("CARGO_BIN_EXE_parem"))
        .args([
            "match",
            "--literal",
            "parallel",
            "--alphabet",
            "parel",
            "--input",
            input.to_str().unwrap(),
        ])
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    // Close the read end before the child finishes its walk; its
    // later prints hit a dead pipe. Whether it wins the race and
    // exits cleanly or dies by SIGPIPE, it must never panic.
    drop(child.stdout.take());
    let output = child.wait_with_output().unwrap();
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(!stderr.contains("panicked"), "stderr:\n{stderr}");
    let clean_exit = output.status.code() == Some(0);
    let sigpipe = output.status.signal() == Some(libc::SIGPIPE);
    assert!(
        clean_exit || sigpipe,
        "unexpected status {:?}",
        output.status
    );
}

#[test]
fn bench_rejects_an_empty_engine_list() {
    let (code, _) = run_err(&[
        "bench",
        "--literal",
        "parallel",
        "--alphabet",
        "parel",
        "--engines",
        "",
    ]);
    assert_eq!(code, 2);
}
