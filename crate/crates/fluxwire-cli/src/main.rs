//! Command-line front end for the fluxwire toolkit.
//!
//! Circuits are host-embedded programs, not runtime description files, so
//! the CLI exposes a fixed set of built-in circuits for reproduction and CI
//! scripting: netlist emission, pulse-level simulation, the field table,
//! and the Reed-Solomon encode/run flows.
//!
//! Exit codes: 0 success, 1 semantic mismatch (circuit disagrees with the
//! reference encoder), 2 input or usage error.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use fluxwire::builtins;
use fluxwire::circuit::{CircuitData, InstanceKind, SealedCircuit};
use fluxwire::encoder::{Clocking, Encoder, EncoderConfig};
use fluxwire::gf::FieldElement;
use fluxwire::netlist::{to_spice, to_verilog, CellNameMap};
use fluxwire::rs::RsParams;
use fluxwire::sim::{format_trace, parse_stimulus, simulate, DelayConfig};

#[derive(Parser)]
#[command(name = "fluxwire", version, about = "SFQ circuit toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Netlist format selector for `emit`.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Spice,
    Verilog,
    Both,
}

/// Clock-distribution style for the generated RS encoder.
#[derive(Clone, Copy, Default, ValueEnum)]
enum ClockingArg {
    #[default]
    Concurrent,
    Counterflow,
}

impl From<ClockingArg> for Clocking {
    fn from(arg: ClockingArg) -> Clocking {
        match arg {
            ClockingArg::Concurrent => Clocking::Concurrent,
            ClockingArg::Counterflow => Clocking::Counterflow,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Write a netlist for a built-in circuit.
    ///
    /// Circuit ids: half-adder, counterflow-demo, delay:<n>, rs-encoder.
    Emit {
        /// Circuit id.
        circuit: String,
        /// Netlist format(s) to write.
        #[arg(long, value_enum, default_value_t = Format::Spice)]
        format: Format,
        /// Output file (single format) or stem (`both` appends .cir/.v).
        /// Defaults to the circuit id in the current directory.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cell-name override file, one KEY=VALUE line per gate kind.
        #[arg(long)]
        cells: Option<PathBuf>,
        /// Clock distribution for rs-encoder.
        #[arg(long, value_enum, default_value_t)]
        clocking: ClockingArg,
    },
    /// Simulate a built-in circuit against a stimulus file.
    ///
    /// The trace is tab-separated `<time>\t<net>` lines, one per pulse.
    /// With --out the trace goes to the file and the summary to stdout;
    /// otherwise the trace goes to stdout and the summary to stderr.
    Sim {
        /// Circuit id (same set as `emit`).
        circuit: String,
        /// Stimulus file: `pulse <net> <time>` and
        /// `clock <net> <start> <period> <count>` lines.
        #[arg(long)]
        stimulus: PathBuf,
        /// Comma-separated nets to keep in the trace (default: all).
        #[arg(long)]
        watch: Option<String>,
        /// Simulation horizon in picoseconds.
        #[arg(long, default_value_t = 1000)]
        horizon: u64,
        /// Gate-delay override file, one KIND=PS line per gate kind.
        #[arg(long)]
        delays: Option<PathBuf>,
        /// Trace output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Clock distribution for rs-encoder.
        #[arg(long, value_enum, default_value_t)]
        clocking: ClockingArg,
    },
    /// Print the sixteen GF(2^4) elements as power, polynomial, and word.
    GfTable,
    /// Encode message blocks with the reference RS(12,8) encoder.
    ///
    /// The file holds one 4-bit word per line (lowest field coefficient
    /// first), blocks of eight words separated by blank lines. Each block's
    /// four parity words are printed on one line, lowest-degree first.
    RsEncode {
        /// Message word file.
        message: PathBuf,
    },
    /// Run messages through the simulated RS encoder and check them against
    /// the reference encoder.
    ///
    /// The file holds up to four blank-line-separated message blocks of
    /// eight words each; missing streams are padded with zero messages.
    /// Prints each stream's circuit parities (lowest-degree first) and a
    /// final MATCH/MISMATCH verdict. With --random the file is replaced by
    /// seeded random batches.
    RsRun {
        /// Message word file (omit when using --random).
        messages: Option<PathBuf>,
        /// Check this many random four-stream batches instead of a file.
        #[arg(long)]
        random: Option<usize>,
        /// Seed for --random batches.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Clock distribution for the generated encoder.
        #[arg(long, value_enum, default_value_t)]
        clocking: ClockingArg,
        /// Simulation horizon cap in picoseconds (default: schedule-derived).
        #[arg(long)]
        horizon: Option<u64>,
    },
}

/// A command failure: exit code plus a message for stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    /// Input or usage error (exit 2).
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    /// Semantic mismatch (exit 1).
    fn mismatch(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

/// Writes to stdout, exiting quietly when the reader has closed the pipe
/// (e.g. `fluxwire gf-table | head`).
fn say(text: &str) {
    let mut out = std::io::stdout().lock();
    if out.write_all(text.as_bytes()).is_err() || out.write_all(b"\n").is_err() {
        std::process::exit(0);
    }
}

/// Like [`say`] but without the trailing newline.
fn say_raw(text: &str) {
    if std::io::stdout().lock().write_all(text.as_bytes()).is_err() {
        std::process::exit(0);
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Emit {
            circuit,
            format,
            out,
            cells,
            clocking,
        } => cmd_emit(&circuit, format, out, cells, clocking),
        Command::Sim {
            circuit,
            stimulus,
            watch,
            horizon,
            delays,
            out,
            clocking,
        } => cmd_sim(&circuit, &stimulus, watch, horizon, delays, out, clocking),
        Command::GfTable => cmd_gf_table(),
        Command::RsEncode { message } => cmd_rs_encode(&message),
        Command::RsRun {
            messages,
            random,
            seed,
            clocking,
            horizon,
        } => cmd_rs_run(messages, random, seed, clocking, horizon),
    }
}

/// Builds one of the built-in circuits by id.
fn build_circuit(id: &str, clocking: ClockingArg) -> Result<SealedCircuit, Failure> {
    match id {
        "half-adder" => Ok(builtins::half_adder()),
        "counterflow-demo" => Ok(builtins::counterflow_demo()),
        "rs-encoder" => {
            let cfg = EncoderConfig {
                clocking: clocking.into(),
                ..EncoderConfig::default()
            };
            fluxwire::encoder::build_encoder(&cfg)
                .map_err(|e| Failure::usage(format!("generation fault: {e}")))
        }
        _ => match id.strip_prefix("delay:") {
            Some(count) => {
                let n: u32 = count
                    .parse()
                    .ok()
                    .filter(|n| *n >= 1)
                    .ok_or_else(|| {
                        Failure::usage(format!(
                            "delay:<n> needs a positive buffer count, got `{count}`"
                        ))
                    })?;
                Ok(builtins::delay(n))
            }
            None => Err(Failure::usage(format!(
                "unknown circuit `{id}`; expected half-adder, counterflow-demo, \
                 delay:<n>, or rs-encoder"
            ))),
        },
    }
}

/// Counts instances and distinct nets over a circuit and every distinct
/// subcircuit it uses, mirroring what the netlist file contains.
fn netlist_stats(data: &CircuitData) -> (usize, usize) {
    fn visit<'a>(data: &'a CircuitData, seen: &mut BTreeSet<&'a str>, totals: &mut (usize, usize)) {
        if !seen.insert(data.name()) {
            return;
        }
        let mut nets: BTreeSet<&str> = data.header_nets().into_iter().collect();
        for gate in data.gates() {
            for pin in &gate.pins {
                nets.insert(pin);
            }
            if let InstanceKind::Sub(sub) = &gate.kind {
                visit(sub, seen, totals);
            }
        }
        totals.0 += data.gates().len();
        totals.1 += nets.len();
    }
    let mut totals = (0, 0);
    visit(data, &mut BTreeSet::new(), &mut totals);
    totals
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn cmd_emit(
    circuit: &str,
    format: Format,
    out: Option<PathBuf>,
    cells: Option<PathBuf>,
    clocking: ClockingArg,
) -> Result<(), Failure> {
    let sealed = build_circuit(circuit, clocking)?;
    let map = match cells {
        Some(path) => CellNameMap::parse_overrides(&read_file(&path)?)
            .map_err(|e| Failure::usage(e.to_string()))?,
        None => CellNameMap::default(),
    };
    let (gates, nets) = netlist_stats(sealed.data());
    let stem = out.unwrap_or_else(|| PathBuf::from(circuit.replace(':', "")));
    let mut targets: Vec<(PathBuf, Vec<String>)> = Vec::new();
    if format != Format::Verilog {
        let path = if format == Format::Both {
            stem.with_extension("cir")
        } else {
            stem.clone()
        };
        targets.push((path, to_spice(sealed.data(), &map)));
    }
    if format != Format::Spice {
        let path = if format == Format::Both {
            stem.with_extension("v")
        } else {
            stem.clone()
        };
        targets.push((path, to_verilog(sealed.data(), &map)));
    }
    for (path, lines) in targets {
        write_file(&path, &(lines.join("\n") + "\n"))?;
        say(&format!("wrote {}: {gates} gates, {nets} nets", path.display()));
    }
    Ok(())
}

fn cmd_sim(
    circuit: &str,
    stimulus: &Path,
    watch: Option<String>,
    horizon: u64,
    delays: Option<PathBuf>,
    out: Option<PathBuf>,
    clocking: ClockingArg,
) -> Result<(), Failure> {
    let sealed = build_circuit(circuit, clocking)?;
    let events = parse_stimulus(&read_file(stimulus)?)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let config = match delays {
        Some(path) => DelayConfig::parse_overrides(&read_file(&path)?)
            .map_err(|e| Failure::usage(e.to_string()))?,
        None => DelayConfig::default(),
    };
    let trace = simulate(sealed.data(), &config, &events, horizon)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let trace = match &watch {
        Some(list) => trace.retain_nets(&list.split(',').collect::<Vec<_>>()),
        None => trace,
    };
    let summary = format!("pulses: {}", trace.pulses().len());
    match out {
        Some(path) => {
            write_file(&path, &format_trace(&trace))?;
            say(&format!("wrote {}: {summary}", path.display()));
        }
        None => {
            say_raw(&format_trace(&trace));
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn cmd_gf_table() -> Result<(), Failure> {
    for (power, poly, word) in RsParams::rs12_8().ctx().table_rows() {
        say(&format!("{power} | {poly} | {word}"));
    }
    Ok(())
}

/// Parses a word file: one binary word per line, `#` comments ignored,
/// blocks separated by blank lines. Every word must have `width` bits and
/// every block exactly `words_per_block` words.
fn parse_word_file(
    text: &str,
    params: &RsParams,
    words_per_block: usize,
) -> Result<Vec<Vec<FieldElement>>, Failure> {
    let mut blocks: Vec<Vec<FieldElement>> = Vec::new();
    let mut current: Vec<FieldElement> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('#') {
            continue;
        }
        if line.is_empty() {
            if !current.is_empty() {
                blocks.push(std::mem::take(&mut current));
            }
            continue;
        }
        current.push(
            params
                .ctx()
                .parse_word(line)
                .map_err(|e| Failure::usage(e.to_string()))?,
        );
    }
    if !current.is_empty() {
        blocks.push(current);
    }
    if blocks.is_empty() {
        return Err(Failure::usage("no message words in file"));
    }
    for (i, block) in blocks.iter().enumerate() {
        if block.len() != words_per_block {
            return Err(Failure::usage(format!(
                "block {i} has {} words, expected {words_per_block}",
                block.len()
            )));
        }
    }
    Ok(blocks)
}

/// Renders field elements as space-separated binary words.
fn words_line(params: &RsParams, words: &[FieldElement]) -> String {
    words
        .iter()
        .map(|&w| params.ctx().format_word(w))
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_rs_encode(message: &Path) -> Result<(), Failure> {
    let params = RsParams::rs12_8();
    let blocks = parse_word_file(&read_file(message)?, &params, params.k())?;
    for block in &blocks {
        let parity = params
            .rs_encode(block)
            .map_err(|e| Failure::usage(e.to_string()))?;
        say(&words_line(&params, &parity));
    }
    Ok(())
}

fn cmd_rs_run(
    messages: Option<PathBuf>,
    random: Option<usize>,
    seed: u64,
    clocking: ClockingArg,
    horizon: Option<u64>,
) -> Result<(), Failure> {
    let cfg = EncoderConfig {
        clocking: clocking.into(),
        ..EncoderConfig::default()
    };
    let params = cfg.params.clone();
    let encoder =
        Encoder::new(cfg).map_err(|e| Failure::usage(format!("generation fault: {e}")))?;
    let streams = encoder.config().interleave_depth;
    let k = params.k();

    // One batch: run the circuit, reverse its highest-degree-first words,
    // and compare with the reference encoder stream by stream.
    let check = |batch: &[Vec<FieldElement>], shown: usize, print: bool| {
        let run = encoder
            .run_bounded(batch, horizon)
            .map_err(|e| Failure::usage(e.to_string()))?;
        for (s, message) in batch.iter().enumerate().take(shown) {
            let mut circuit = run.parities[s].clone();
            circuit.reverse();
            let oracle = params
                .rs_encode(message)
                .map_err(|e| Failure::usage(e.to_string()))?;
            if print {
                say(&words_line(&params, &circuit));
            }
            if circuit != oracle {
                return Err(Failure::mismatch(format!(
                    "MISMATCH stream {s}: circuit {} vs reference {}",
                    words_line(&params, &circuit),
                    words_line(&params, &oracle)
                )));
            }
        }
        Ok(())
    };

    match (messages, random) {
        (Some(_), Some(_)) => Err(Failure::usage(
            "pass either a messages file or --random, not both",
        )),
        (None, None) => Err(Failure::usage("pass a messages file or --random <n>")),
        (Some(path), None) => {
            let mut blocks = parse_word_file(&read_file(&path)?, &params, k)?;
            if blocks.len() > streams {
                return Err(Failure::usage(format!(
                    "{} message blocks, but the encoder interleaves at most {streams}",
                    blocks.len()
                )));
            }
            let shown = blocks.len();
            blocks.resize(streams, vec![0; k]);
            check(&blocks, shown, true)?;
            say("MATCH");
            Ok(())
        }
        (None, Some(batches)) => {
            let mut rng = StdRng::seed_from_u64(seed);
            for _ in 0..batches {
                let batch: Vec<Vec<FieldElement>> = (0..streams)
                    .map(|_| (0..k).map(|_| rng.gen_range(0..16)).collect())
                    .collect();
                check(&batch, streams, false)?;
            }
            say(&format!("MATCH ({batches} random batches, seed {seed})"));
            Ok(())
        }
    }
}
