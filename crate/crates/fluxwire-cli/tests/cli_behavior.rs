//! End-to-end tests driving the `fluxwire` binary: emission goldens, trace
//! goldens, the field table, the Reed-Solomon flows, and the exit-code
//! contract (0 success, 1 mismatch, 2 input error).

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

/// Runs the binary with `args`, working in `dir`.
fn run_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fluxwire"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).expect("utf-8 stderr")
}

fn assert_code(output: &Output, code: i32) {
    assert_eq!(
        output.status.code(),
        Some(code),
        "stdout:\n{}\nstderr:\n{}",
        stdout_of(output),
        stderr_of(output)
    );
}

/// The four reference messages with their parity words (lowest-degree
/// first) as the reference encoder computes them.
const REFERENCE: [([&str; 8], &str); 4] = [
    (
        ["0100", "1110", "0111", "1111", "0100", "0010", "0001", "1100"],
        "1000 0011 0011 1101",
    ),
    (
        ["0001", "0010", "0011", "0100", "0101", "0110", "0111", "1000"],
        "1010 1010 0001 0001",
    ),
    (
        ["1000", "1000", "1000", "1000", "1000", "1000", "1000", "1000"],
        "0101 0001 0110 0010",
    ),
    (
        ["0010", "0101", "0011", "0101", "0110", "0100", "0001", "0101"],
        "0000 0010 0100 0111",
    ),
];

/// Writes the reference messages as a word file with `blocks` blocks.
fn reference_file(dir: &Path, blocks: usize) -> std::path::PathBuf {
    let text = REFERENCE[..blocks]
        .iter()
        .map(|(message, _)| message.join("\n"))
        .collect::<Vec<_>>()
        .join("\n\n");
    let path = dir.join("messages.txt");
    fs::write(&path, text + "\n").expect("write messages");
    path
}

#[test]
fn emit_half_adder_reproduces_the_golden_netlist() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &["emit", "half-adder", "--format", "spice", "--out", "ha.cir"],
    );
    assert_code(&out, 0);
    let golden = "\
.subckt HalfAdder a b clk c s
XSPLIT1 clk _clk_0 _clk_1 THmitll_SPLIT
XSPLIT2 a _a_0 _a_1 THmitll_SPLIT
XSPLIT3 b _b_0 _b_1 THmitll_SPLIT
XAND4 _a_0 _b_0 _clk_0 c THmitll_AND2
XXOR5 _a_1 _b_1 _clk_1 s THmitll_XOR
.ends
";
    assert_eq!(fs::read_to_string(dir.path().join("ha.cir")).unwrap(), golden);
    assert!(stdout_of(&out).contains("ha.cir: 5 gates, 11 nets"));
}

#[test]
fn emit_writes_both_formats_for_a_delay_line() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["emit", "delay:5", "--format", "both"]);
    assert_code(&out, 0);
    let spice = fs::read_to_string(dir.path().join("delay5.cir")).unwrap();
    assert!(spice.contains(".subckt delay5 a q"));
    assert_eq!(spice.matches("THmitll_BUFF").count(), 5);
    let verilog = fs::read_to_string(dir.path().join("delay5.v")).unwrap();
    assert!(verilog.contains("module delay5"));
    assert_eq!(stdout_of(&out).matches("5 gates").count(), 2);
}

#[test]
fn emit_rs_encoder_includes_multiplier_subcircuits() {
    let dir = TempDir::new().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "emit",
            "rs-encoder",
            "--clocking",
            "counterflow",
            "--out",
            "enc.cir",
        ],
    );
    assert_code(&out, 0);
    let spice = fs::read_to_string(dir.path().join("enc.cir")).unwrap();
    for sub in ["mul7", "mul8", "mul12", "mul13"] {
        assert!(spice.contains(&format!(".subckt {sub}")), "missing {sub}");
    }
    assert!(spice.contains("cki"));
    assert!(spice.contains("cko"));
}

#[test]
fn emit_applies_cell_name_overrides() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("cells.txt"), "AND2=MYLIB_AND\n").unwrap();
    let out = run_in(
        dir.path(),
        &[
            "emit",
            "half-adder",
            "--out",
            "ha.cir",
            "--cells",
            "cells.txt",
        ],
    );
    assert_code(&out, 0);
    let spice = fs::read_to_string(dir.path().join("ha.cir")).unwrap();
    assert!(spice.contains("MYLIB_AND"));
    assert!(!spice.contains("THmitll_AND2"));
}

#[test]
fn emit_rejects_bad_circuit_ids() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["emit", "full-adder"]);
    assert_code(&out, 2);
    assert!(stderr_of(&out).contains("full-adder"));

    let out = run_in(dir.path(), &["emit", "delay:0"]);
    assert_code(&out, 2);
}

#[test]
fn sim_half_adder_emits_exactly_one_carry_pulse() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("ha.stim"),
        "pulse a 10\npulse b 12\nclock clk 50 100 2\n",
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "sim",
            "half-adder",
            "--stimulus",
            "ha.stim",
            "--watch",
            "c,s",
            "--horizon",
            "300",
        ],
    );
    assert_code(&out, 0);
    // Both inputs pulsed: one carry, no sum (the XOR flags cancel).
    assert_eq!(stdout_of(&out), "60\tc\n");
    assert!(stderr_of(&out).contains("pulses: 1"));
}

#[test]
fn sim_empty_stimulus_gives_an_empty_trace() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("empty.stim"), "# nothing\n").unwrap();
    let out = run_in(
        dir.path(),
        &["sim", "half-adder", "--stimulus", "empty.stim"],
    );
    assert_code(&out, 0);
    assert_eq!(stdout_of(&out), "");
    assert!(stderr_of(&out).contains("pulses: 0"));
}

#[test]
fn sim_counterflow_demo_matches_the_golden_trace() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("cf.stim"),
        "pulse din 10\nclock clkin 50 100 7\n",
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "sim",
            "counterflow-demo",
            "--stimulus",
            "cf.stim",
            "--watch",
            "dout",
            "--horizon",
            "700",
            "--out",
            "cf.tsv",
        ],
    );
    assert_code(&out, 0);
    // One injected token circulates the three-stage ring every two clock
    // cycles: the counter-flow clock lets the looped-back pulse reach the
    // OR gate within the same cycle that produced it.
    assert_eq!(
        fs::read_to_string(dir.path().join("cf.tsv")).unwrap(),
        "265\tdout\n465\tdout\n665\tdout\n"
    );
    assert!(stdout_of(&out).contains("pulses: 3"));
}

#[test]
fn sim_applies_delay_overrides() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("slow.delays"), "AND2=30\n").unwrap();
    fs::write(
        dir.path().join("ha.stim"),
        "pulse a 10\npulse b 12\nclock clk 50 100 1\n",
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "sim",
            "half-adder",
            "--stimulus",
            "ha.stim",
            "--delays",
            "slow.delays",
            "--watch",
            "c",
        ],
    );
    assert_code(&out, 0);
    assert_eq!(stdout_of(&out), "85\tc\n");
}

#[test]
fn sim_rejects_unknown_stimulus_nets() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.stim"), "pulse bogus 5\n").unwrap();
    let out = run_in(dir.path(), &["sim", "half-adder", "--stimulus", "bad.stim"]);
    assert_code(&out, 2);
    assert!(stderr_of(&out).contains("bogus"));
}

#[test]
fn gf_table_prints_all_sixteen_rows() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["gf-table"]);
    assert_code(&out, 0);
    let text = stdout_of(&out);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 16);
    assert_eq!(rows[0], "0 | 0 | 0000");
    assert!(rows.contains(&"α^4 | 1+α | 1100"));
    assert!(rows.contains(&"α^14 | 1+α^3 | 1001"));

    // Deterministic across runs.
    let again = run_in(dir.path(), &["gf-table"]);
    assert_eq!(stdout_of(&again), text);
}

#[test]
fn rs_encode_reproduces_the_reference_parities() {
    let dir = TempDir::new().unwrap();
    let path = reference_file(dir.path(), 4);
    let out = run_in(dir.path(), &["rs-encode", path.to_str().unwrap()]);
    assert_code(&out, 0);
    let expected: Vec<&str> = REFERENCE.iter().map(|(_, parity)| *parity).collect();
    assert_eq!(stdout_of(&out).lines().collect::<Vec<_>>(), expected);
}

#[test]
fn rs_encode_rejects_malformed_files() {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("bad.txt"), "10x0\n").unwrap();
    let out = run_in(dir.path(), &["rs-encode", "bad.txt"]);
    assert_code(&out, 2);

    fs::write(dir.path().join("short.txt"), "0001\n0010\n").unwrap();
    let out = run_in(dir.path(), &["rs-encode", "short.txt"]);
    assert_code(&out, 2);
    assert!(stderr_of(&out).contains("expected 8"));
}

#[test]
fn rs_run_matches_the_reference_batch() {
    let dir = TempDir::new().unwrap();
    let path = reference_file(dir.path(), 4);
    let out = run_in(dir.path(), &["rs-run", path.to_str().unwrap()]);
    assert_code(&out, 0);
    let text = stdout_of(&out);
    let mut lines = text.lines();
    for (_, parity) in &REFERENCE {
        assert_eq!(lines.next(), Some(*parity));
    }
    assert_eq!(lines.next(), Some("MATCH"));
}

#[test]
fn rs_run_pads_missing_streams_with_zero_messages() {
    let dir = TempDir::new().unwrap();
    let zeros = ["0000"; 8].join("\n") + "\n";
    fs::write(dir.path().join("zero.txt"), zeros).unwrap();
    let out = run_in(dir.path(), &["rs-run", "zero.txt"]);
    assert_code(&out, 0);
    assert_eq!(stdout_of(&out), "0000 0000 0000 0000\nMATCH\n");
}

#[test]
fn rs_run_counterflow_clocking_matches_too() {
    let dir = TempDir::new().unwrap();
    let path = reference_file(dir.path(), 1);
    let out = run_in(
        dir.path(),
        &[
            "rs-run",
            path.to_str().unwrap(),
            "--clocking",
            "counterflow",
        ],
    );
    assert_code(&out, 0);
    let text = stdout_of(&out);
    assert!(text.starts_with(REFERENCE[0].1));
    assert!(text.ends_with("MATCH\n"));
}

#[test]
fn rs_run_checks_seeded_random_batches() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["rs-run", "--random", "3", "--seed", "7"]);
    assert_code(&out, 0);
    assert_eq!(stdout_of(&out), "MATCH (3 random batches, seed 7)\n");
}

#[test]
fn rs_run_usage_errors_exit_with_code_two() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["rs-run"]);
    assert_code(&out, 2);

    let path = reference_file(dir.path(), 1);
    let out = run_in(
        dir.path(),
        &["rs-run", path.to_str().unwrap(), "--random", "2"],
    );
    assert_code(&out, 2);

    let out = run_in(dir.path(), &["rs-run", path.to_str().unwrap(), "--horizon", "500"]);
    assert_code(&out, 2);
    assert!(stderr_of(&out).contains("horizon"));
}

#[test]
fn unknown_flags_are_rejected() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), &["gf-table", "--frobnicate"]);
    assert_code(&out, 2);
}
