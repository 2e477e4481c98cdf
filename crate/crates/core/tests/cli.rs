// Copyright 2026 The tpg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

mod common;

use std::process::{Command, Output};

use common::*;

fn tpg(args: &[&str], stdin: Option<&str>) -> Output {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_tpg"))
        .args(args)
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .stderr(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    input.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(input);
    child.wait_with_output().unwrap()
}

fn path(name: &str) -> String {
    fixture(name).display().to_string()
}

fn text(b: &[u8]) -> String {
    String::from_utf8_lossy(b).into_owned()
}

#[test]
fn check_accepts_the_arithmetic_specification() {
    let o = tpg(
        &[
            "check",
            &path("arith.gpg"),
            "--typesystem",
            &path("simple.gts"),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    assert!(o.stdout.is_empty() && o.stderr.is_empty());
}

#[test]
fn check_reports_diagnostics_with_file_names() {
    let o = tpg(
        &[
            "check",
            &path("arith_string.gpg"),
            "--typesystem",
            &path("simple.gts"),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(1));
    let err = text(&o.stderr);
    assert!(err.contains("arith_string.gpg:"), "{err}");
    assert!(
        err.ends_with("Incompatible types: String and Int\n"),
        "{err}"
    );
}

#[test]
fn check_prints_a_control_flow_graph() {
    let (spec, gts) = (path("arith.gpg"), path("simple.gts"));
    for name in ["expr", "term"] {
        let o = tpg(
            &["check", &spec, "--typesystem", &gts, "--dot-cfg", name],
            None,
        );
        assert_eq!(o.status.code(), Some(0));
        assert!(
            text(&o.stdout).starts_with("digraph"),
            "{}",
            text(&o.stdout)
        );
    }
    let o = tpg(
        &[
            "check",
            &path("arith.gpg"),
            "--typesystem",
            &path("simple.gts"),
            "--dot-cfg",
            "nothing",
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn emit_writes_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = tpg(
        &[
            "emit",
            &path("arith.gpg"),
            "--typesystem",
            &path("simple.gts"),
            "--profile",
            "ANTLRJavaBackend",
            "--out",
            out,
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    let g = std::fs::read_to_string(dir.path().join("ExpressionEvaluator.g")).unwrap();
    let j = std::fs::read_to_string(dir.path().join("ExpressionEvaluatorExternals.java")).unwrap();
    assert_eq!(g, GOLDEN_GRAMMAR);
    assert_eq!(j, GOLDEN_EXTERNALS);
}

#[test]
fn emit_with_unknown_profile_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = tpg(
        &[
            "emit",
            &path("arith.gpg"),
            "--typesystem",
            &path("simple.gts"),
            "--profile",
            "Nope",
            "--out",
            dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn missing_file_is_a_usage_error() {
    let o = tpg(&["check", "/nonexistent/spec.gpg"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn run_evaluates_input() {
    let args = [
        "run",
        &path("arith.gpg"),
        "--typesystem",
        &path("simple.gts"),
        "--env",
        "x=4",
    ];
    let o = tpg(&args, Some("x*(3+2)"));
    assert_eq!(o.status.code(), Some(0), "{}", text(&o.stderr));
    assert_eq!(text(&o.stdout), "20\n");

    let o = tpg(&args, Some("(x+*3)"));
    assert_eq!(o.status.code(), Some(3));
    assert!(
        text(&o.stderr).contains("parse error at 1:4"),
        "{}",
        text(&o.stderr)
    );

    let o = tpg(&args, Some(""));
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn run_on_a_failing_specification_reports_diagnostics() {
    let o = tpg(
        &[
            "run",
            &path("arith_uninit.gpg"),
            "--typesystem",
            &path("simple.gts"),
            "--bindings",
            "demo",
        ],
        Some("1"),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o.stderr).contains("E-FLOW-UNINIT"));
}

#[test]
fn run_reads_an_input_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.txt");
    std::fs::write(&input, "2 * (y - 1)\n").unwrap();
    let o = tpg(
        &[
            "run",
            &path("arith.gpg"),
            "--typesystem",
            &path("simple.gts"),
            "--start",
            "expr",
            "--env",
            "y=5",
            "--input",
            input.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(text(&o.stdout), "8\n", "{}", text(&o.stderr));
}
