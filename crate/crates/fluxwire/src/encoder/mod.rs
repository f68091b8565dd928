//! Generator for a four-way interleaved Reed–Solomon encoder circuit.
//!
//! The encoder realizes the classic LFSR division circuit for a systematic
//! RS(n, k) code: per message symbol, the incoming word is added to the top
//! register, the sum is multiplied by each generator coefficient, and the
//! products are folded into the shifted register file. Because one symbol
//! takes four clocked stages to travel around that loop (input adder,
//! two multiplier stages, register update), the circuit is operated
//! *4-slow*: four independent symbol streams occupy the pipeline on
//! successive clock waves, and each register hops through three transport
//! DFFs between updates so that every stream sees its own register state
//! exactly one symbol step later. The input buffers feed the streams in
//! exactly that round-robin order.
//!
//! Gate placement and clock distribution are planned together. Every edge
//! from a clocked producer to a clocked consumer must deliver its pulse
//! inside the consumer's capture window — after the consumer's previous
//! clock, at most one period later. [`Clocking::Concurrent`] distributes
//! the clock through one balanced splitter tree so all gates fire in step
//! and every edge lands early in its window naturally.
//! [`Clocking::Counterflow`] threads a single clock trunk against the data
//! flow instead, which clocks consumers *before* their producers and so
//! gives the same one-cycle discipline on counter-flow edges for free;
//! edges that run with the trunk get delay buffers inserted until they,
//! too, land inside the window.

pub mod buffers;
pub mod gating;
pub mod multiplier;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::{
    CircuitBuilder, CircuitData, CircuitError, CounterWire, SealedCircuit, Wire,
};
use crate::gf::FieldElement;
use crate::rs::RsParams;
use crate::sim::{clock_train, decode_words, flatten, simulate, DelayConfig, PulseEvent, SimError};

pub use multiplier::{
    build_multiplier_circuit, clocked_depth, plan_chained_multiplier, plan_const_multiplier,
    MultiplierPlan, Node, Src,
};
pub use buffers::build_input_buffers;
pub use gating::build_gating_bank;

/// Clocked stages of the input adder path (the XOR bank itself plus the
/// register-update XOR bank).
pub const ADDER_STAGES: usize = 2;
/// Clocked stages inside every constant multiplier.
pub const MULTIPLIER_STAGES: usize = 2;
/// Clocked stages of the gating bank: NDRO reads are combinational.
pub const CONTROL_STAGES: usize = 0;

/// Default number of delay buffers on the feedback loop under counter-flow
/// clocking. The trunk tap of a top-register gate sits five taps downstream
/// of the matching input-adder tap, so the raw feedback pulse would arrive
/// 30 ps into the adder's 100 ps capture window; four buffers re-center it
/// at 50 ps, splitting the margin evenly. Concurrent clocking ignores this
/// knob (both banks fire together there, and the bare edge already lands
/// safely).
pub const FEEDBACK_DELAY_BUFFS: usize = 4;

/// How the datapath clock is distributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clocking {
    /// One balanced splitter tree; every clocked gate fires simultaneously.
    Concurrent,
    /// One serial trunk threaded against the data flow on `cki`/`cko`
    /// counter ports.
    Counterflow,
}

/// Everything that shapes a generated encoder.
#[derive(Debug, Clone)]
pub struct EncoderConfig {
    /// The Reed–Solomon code to implement.
    pub params: RsParams,
    /// Number of interleaved symbol streams. Must equal the clocked stage
    /// count of the datapath loop (four).
    pub interleave_depth: usize,
    /// Words of input buffering per stream. Must equal `params.k()` so one
    /// load fills a buffer with exactly one message.
    pub buffer_depth: usize,
    /// Clock distribution style.
    pub clocking: Clocking,
    /// Delay buffers on the register-to-adder feedback under
    /// [`Clocking::Counterflow`]; see [`FEEDBACK_DELAY_BUFFS`].
    pub feedback_delay_buffs: usize,
    /// Clock period in picoseconds.
    pub clock_period_ps: u64,
    /// Realize the α⁶ coefficient as two chained α³ multiplications
    /// instead of one direct two-stage plan.
    pub alpha6_as_chained_alpha3: bool,
}

impl Default for EncoderConfig {
    fn default() -> EncoderConfig {
        EncoderConfig {
            params: RsParams::rs12_8(),
            interleave_depth: 4,
            buffer_depth: 8,
            clocking: Clocking::Concurrent,
            feedback_delay_buffs: FEEDBACK_DELAY_BUFFS,
            clock_period_ps: 100,
            alpha6_as_chained_alpha3: false,
        }
    }
}

impl EncoderConfig {
    fn validate(&self) -> Result<(), EncoderError> {
        let stages = ADDER_STAGES + MULTIPLIER_STAGES + CONTROL_STAGES;
        if self.interleave_depth != stages {
            return Err(EncoderError::StageMismatch {
                expected: stages,
                got: self.interleave_depth,
            });
        }
        if self.buffer_depth != self.params.k() {
            return Err(EncoderError::InvalidConfig {
                reason: format!(
                    "buffer depth {} must equal the message length k = {}",
                    self.buffer_depth,
                    self.params.k()
                ),
            });
        }
        if self.params.ctx().width() > 4 {
            return Err(EncoderError::InvalidConfig {
                reason: "two-stage multiplier plans cover fields up to GF(2^4)".to_string(),
            });
        }
        if self.params.generator().iter().any(|&g| g == 0) {
            return Err(EncoderError::InvalidConfig {
                reason: "a zero generator coefficient has no multiplier circuit".to_string(),
            });
        }
        if self.clock_period_ps < 60 {
            return Err(EncoderError::InvalidConfig {
                reason: "the clock period must leave at least 60 ps for capture windows"
                    .to_string(),
            });
        }
        Ok(())
    }
}

/// Errors from encoder generation and simulation runs.
#[derive(Debug, Error)]
pub enum EncoderError {
    /// The interleave depth does not match the loop's clocked stage count,
    /// so the retimed circuit could not implement the LFSR recurrence.
    #[error(
        "the datapath loop has {expected} clocked stages per symbol, \
         so the interleave depth must be {expected}, not {got}"
    )]
    StageMismatch {
        /// Clocked stages around the feedback loop.
        expected: usize,
        /// Configured interleave depth.
        got: usize,
    },
    /// A configuration or message-shape problem, or a timing plan whose
    /// pulses cannot be placed inside their capture windows.
    #[error("invalid encoder configuration: {reason}")]
    InvalidConfig {
        /// Human-readable explanation.
        reason: String,
    },
    /// The simulation horizon ended before every parity window closed.
    #[error("simulation horizon of {horizon_ps} ps exhausted before all parities decoded")]
    Timeout {
        /// The horizon that was too short, in picoseconds.
        horizon_ps: u64,
    },
    /// Circuit construction failed.
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    /// Pulse simulation failed.
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Read-clock bookkeeping from one encoder run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunStats {
    /// Wave index on which the first message symbol reached the input adder.
    pub first_read_cycle: u64,
    /// Wave index on which the last parity word left the circuit.
    pub last_parity_cycle: u64,
}

impl RunStats {
    /// Read-clock cycles from pipeline start to the last parity, inclusive.
    pub fn read_cycles(&self) -> u64 {
        self.last_parity_cycle - self.first_read_cycle + 1
    }
}

/// Decoded output of one encoder run.
#[derive(Debug, Clone)]
pub struct EncoderRun {
    /// Per-stream parity words in emission order, which is
    /// highest-degree-first: `parities[s][0]` is the top parity
    /// coefficient of stream `s`.
    pub parities: Vec<Vec<FieldElement>>,
    /// Cycle accounting for the run.
    pub stats: RunStats,
}

/// `ceil(log2(n))` for tree sizing; 0 for `n <= 1`.
pub(crate) fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        u64::BITS - (n - 1).leading_zeros()
    }
}

/// Fans `src` out through splitters so that demand `i` gets its pulse
/// exactly `depth - extras[i]` gate delays after `src`, where `depth` is
/// the smallest tree depth that fits all demands (at least `min_depth`).
/// Lone chains are padded with buffers. A consumer that adds `extras[i]`
/// internal stages of its own therefore acts at the same total depth as
/// every other consumer, which is how subcircuits with internal clock
/// trees join a flat distribution tree without skew.
pub(crate) fn spread_clock(
    b: &mut CircuitBuilder,
    src: Wire,
    extras: &[u32],
    min_depth: u32,
) -> Result<(Vec<Wire>, u32), CircuitError> {
    assert!(!extras.is_empty());
    let max_extra = *extras.iter().max().unwrap();
    let weight_sum: u64 = extras.iter().map(|&e| 1u64 << e).sum();
    let mut depth = min_depth.max(max_extra).max(ceil_log2(weight_sum));
    if extras.len() > 1 && depth == max_extra {
        depth += 1; // the deepest demand still needs a splitter above it
    }
    let items: Vec<(usize, u32)> = extras.iter().enumerate().map(|(i, &e)| (i, depth - e)).collect();
    let mut out: Vec<Option<Wire>> = extras.iter().map(|_| None).collect();
    grow(b, src, items, &mut out)?;
    Ok((out.into_iter().map(|w| w.expect("every demand placed")).collect(), depth))
}

/// Recursive helper for [`spread_clock`]: places `src` so that item
/// `(index, need)` ends `need` gate delays below it.
fn grow(
    b: &mut CircuitBuilder,
    src: Wire,
    items: Vec<(usize, u32)>,
    out: &mut [Option<Wire>],
) -> Result<(), CircuitError> {
    if items.len() == 1 {
        let (idx, need) = items[0];
        let mut w = src;
        for _ in 0..need {
            w = b.buff(w, None)?;
        }
        out[idx] = Some(w);
        return Ok(());
    }
    debug_assert!(items.iter().all(|&(_, n)| n >= 1), "depth leaves room to split");
    let [w0, w1] = b.split(src, None, None)?;
    let max_need = items.iter().map(|&(_, n)| n).max().unwrap();
    // Heaviest demands first, each to the currently lighter side: with
    // power-of-two weights and a feasible total this never overflows a side.
    let mut sorted = items;
    sorted.sort_by_key(|&(_, n)| n);
    let (mut left, mut right) = (Vec::new(), Vec::new());
    let (mut lw, mut rw) = (0u64, 0u64);
    for (idx, need) in sorted {
        let w = 1u64 << (max_need - need);
        if lw <= rw {
            lw += w;
            left.push((idx, need - 1));
        } else {
            rw += w;
            right.push((idx, need - 1));
        }
    }
    debug_assert!(lw <= 1 << (max_need - 1) && rw <= 1 << (max_need - 1));
    grow(b, w0, left, out)?;
    grow(b, w1, right, out)
}

/// Fans one wire out to `n` leaves through a balanced splitter tree with no
/// depth padding. Returns each leaf with its splitter depth.
pub(crate) fn fan(
    b: &mut CircuitBuilder,
    src: Wire,
    n: usize,
) -> Result<Vec<(Wire, u32)>, CircuitError> {
    fn go(
        b: &mut CircuitBuilder,
        src: Wire,
        n: usize,
        depth: u32,
        out: &mut Vec<(Wire, u32)>,
    ) -> Result<(), CircuitError> {
        if n == 1 {
            out.push((src, depth));
            return Ok(());
        }
        let [w0, w1] = b.split(src, None, None)?;
        let half = n.div_ceil(2);
        go(b, w0, half, depth + 1, out)?;
        go(b, w1, n - half, depth + 1, out)
    }
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    go(b, src, n, 0, &mut out)?;
    Ok(out)
}

/// One clock consumer in the encoder, in data-upstream-to-downstream order.
///
/// The counter-flow trunk visits these in order from `cki` to `cko`, which
/// the builder therefore threads in reverse; the concurrent tree serves
/// them all from one root. `T(hop, level, bit)` is transport DFF `level`
/// (1 = freshest) of the chain carrying register `hop` toward register
/// `hop + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Tap {
    /// Clock pin of the multiplier for generator coefficient `reg`.
    Mult(usize),
    /// Input-adder XOR for one word bit.
    XorA(usize),
    /// Merge clock pin of the input buffers.
    Merge,
    /// Register-update gate (DFF bank for register 0, XOR banks above).
    D(usize, usize),
    /// Transport DFF on the register-to-register chain.
    T(usize, usize, usize),
}

/// Inserts delay buffers so the pulse leaving `w` at in-wave offset
/// `pulse_off` lands inside the capture window of a consumer firing at
/// `consumer_fire`, i.e. 0 < arrival − fire ≤ period relative to the
/// previous wave. `trailing` extra unclocked gate delays sit between the
/// buffered wire and the consumer's storage (a subcircuit's internal
/// fan-in). `forced` pins the buffer count instead of choosing one, for
/// loop edges whose delay is a calibrated configuration knob.
fn route(
    b: &mut CircuitBuilder,
    period: i64,
    w: Wire,
    pulse_off: i64,
    consumer_fire: i64,
    trailing: u32,
    forced: Option<usize>,
) -> Result<Wire, EncoderError> {
    let arr0 = pulse_off + 5 * trailing as i64 - consumer_fire;
    let buffs = match forced {
        Some(n) => n as i64,
        // Centering the late arrival halfway into the window splits the
        // margin between "before the previous clock" and "after my clock".
        None if arr0 <= 0 => (period / 2 - arr0 + 4) / 5,
        None => 0,
    };
    let arr = arr0 + 5 * buffs;
    if arr <= 0 || arr > period {
        return Err(EncoderError::InvalidConfig {
            reason: format!(
                "a pulse would reach its capturing gate {arr} ps after that gate's \
                 previous clock, outside the (0, {period}] ps capture window"
            ),
        });
    }
    let mut w = w;
    for _ in 0..buffs {
        w = b.buff(w, None)?;
    }
    Ok(w)
}

/// In-wave firing offsets recorded while building, consumed by the run
/// scheduler. All values are picoseconds relative to a clock edge entering
/// the clock port at time 0 of a wave.
#[derive(Debug, Clone)]
struct Timing {
    /// When the input-adder XOR for each bit fires.
    x_fire: Vec<i64>,
    /// When the merge ORs inside the buffers fire.
    merge_fire: i64,
    /// `sclk` port to FIFO DFF output delay.
    sclk_delay: i64,
    /// `set`/`reset` port to NDRO latch delay.
    gating_delay: i64,
}

/// A generated encoder: the sealed circuit plus the flattened copy and
/// timing data its run schedule needs. Building once and running many
/// message batches amortizes generation and flattening.
pub struct Encoder {
    cfg: EncoderConfig,
    sealed: SealedCircuit,
    flat: CircuitData,
    timing: Timing,
}

impl Encoder {
    /// Generates the encoder circuit for `cfg`.
    pub fn new(cfg: EncoderConfig) -> Result<Encoder, EncoderError> {
        cfg.validate()?;
        let ctx = cfg.params.ctx().clone();
        let a = ctx.width() as usize;
        let streams = cfg.interleave_depth;
        let np = cfg.params.num_parity();
        let period = cfg.clock_period_ps as i64;

        // Subcircuits. Equal generator coefficients share one sealed
        // multiplier so the netlist defines each cell once.
        let buffers = buffers::build_input_buffers(&cfg)?;
        let gating = gating::build_gating_bank(a)?;
        let alpha3 = ctx.exp(3);
        let alpha6 = ctx.mul(alpha3, alpha3);
        let mut mult_cache: BTreeMap<(FieldElement, bool), SealedCircuit> = BTreeMap::new();
        let mut mult_subs: Vec<SealedCircuit> = Vec::with_capacity(np);
        for r in 0..np {
            let c = cfg.params.generator()[r];
            let chained = cfg.alpha6_as_chained_alpha3 && c == alpha6;
            if !mult_cache.contains_key(&(c, chained)) {
                let plan = if chained {
                    plan_chained_multiplier(&ctx, alpha3)
                } else {
                    plan_const_multiplier(&ctx, c)
                };
                mult_cache.insert((c, chained), build_multiplier_circuit(&plan)?);
            }
            mult_subs.push(mult_cache[&(c, chained)].clone());
        }

        // Clock consumers in data order, upstream first. Under counter-flow
        // clocking this is the trunk's cki-to-cko visit order, so gates that
        // produce for a downstream consumer are clocked later than it and
        // every with-trunk edge waits exactly one wave by construction.
        let mut manifest: Vec<Tap> = Vec::new();
        for r in 0..np {
            manifest.push(Tap::Mult(r));
        }
        for bit in 0..a {
            manifest.push(Tap::XorA(bit));
        }
        manifest.push(Tap::Merge);
        for r in (0..np).rev() {
            for bit in 0..a {
                manifest.push(Tap::D(r, bit));
            }
        }
        for level in [3, 2, 1] {
            for hop in (0..np.saturating_sub(1)).rev() {
                for bit in 0..a {
                    manifest.push(Tap::T(hop, level, bit));
                }
            }
        }
        let merge_extra = buffers::merge_clock_depth(a, streams);
        let extra_of = |t: &Tap| -> u32 {
            match t {
                Tap::Mult(_) => multiplier::CLOCK_TREE_DEPTH,
                Tap::Merge => merge_extra,
                _ => 0,
            }
        };

        // Ports.
        let mut in_names: Vec<String> = Vec::new();
        for s in 0..streams {
            for bit in 0..a {
                in_names.push(format!("d{s}_{bit}"));
            }
        }
        in_names.extend((0..streams).map(|s| format!("sclk{s}")));
        in_names.push("set".to_string());
        in_names.push("reset".to_string());
        if cfg.clocking == Clocking::Concurrent {
            in_names.push("clk".to_string());
        }
        let out_names: Vec<String> = (0..a).map(|bit| format!("p{bit}")).collect();
        let loop_names: Vec<String> = (0..a).map(|bit| format!("fb{bit}")).collect();
        let ins: Vec<&str> = in_names.iter().map(String::as_str).collect();
        let outs: Vec<&str> = out_names.iter().map(String::as_str).collect();
        let lps: Vec<&str> = loop_names.iter().map(String::as_str).collect();
        let (co, ci): (&[&str], &[&str]) = match cfg.clocking {
            Clocking::Concurrent => (&[], &[]),
            Clocking::Counterflow => (&["cko"], &["cki"]),
        };
        let (mut b, mut inputs, loop_wires, mut counter_outs) =
            CircuitBuilder::create("rs_encoder", &ins, &outs, &lps, co, ci)?;

        let clk_wire = match cfg.clocking {
            Clocking::Concurrent => Some(inputs.pop().expect("clk port")),
            Clocking::Counterflow => None,
        };
        let reset_w = inputs.pop().expect("reset port");
        let set_w = inputs.pop().expect("set port");
        let sclk_wires = inputs.split_off(streams * a);
        let data_wires = inputs;

        // Clock phase: hand every consumer its tap and firing offset.
        let mut taps: BTreeMap<Tap, (Wire, i64)> = BTreeMap::new();
        let mut trunk_upstream: Option<CounterWire> = None;
        match cfg.clocking {
            Clocking::Concurrent => {
                let extras: Vec<u32> = manifest.iter().map(&extra_of).collect();
                let (tap_wires, depth) =
                    spread_clock(&mut b, clk_wire.expect("clk wire"), &extras, 0)?;
                let fire = 5 * depth as i64;
                for (key, w) in manifest.iter().zip(tap_wires) {
                    taps.insert(*key, (w, fire));
                }
            }
            Clocking::Counterflow => {
                let mut handle = counter_outs.pop().expect("cko handle");
                for i in (0..manifest.len()).rev() {
                    let (up, tap) = b.counter_split(handle, None, None)?;
                    handle = up;
                    let key = manifest[i];
                    let fire = 5 * (i as i64 + 1) + 5 * extra_of(&key) as i64;
                    taps.insert(key, (tap, fire));
                }
                trunk_upstream = Some(handle);
            }
        }

        // Input buffers.
        let (merge_tap, merge_fire) = taps.remove(&Tap::Merge).expect("merge tap");
        let mut buf_in = data_wires;
        buf_in.extend(sclk_wires);
        buf_in.push(merge_tap);
        let anon: Vec<Option<&str>> = vec![None; a];
        let (m_wires, _) = b.instantiate(&buffers, buf_in, vec![], &anon, &[])?;
        let m_off = merge_fire + 5;

        // Input adder: fold each merged bit into the looped-back top
        // register, then split the sum toward the parity port and the
        // gated multiplier feed.
        let mut x_fire = vec![0i64; a];
        let mut parity_wires = Vec::with_capacity(a);
        let mut gate_legs = Vec::with_capacity(a);
        for (bit, (m_w, loop_w)) in m_wires.into_iter().zip(loop_wires).enumerate() {
            let (xt, xf) = taps.remove(&Tap::XorA(bit)).expect("adder tap");
            x_fire[bit] = xf;
            let m_in = route(&mut b, period, m_w, m_off, xf, 0, None)?;
            let fb = b.xor(m_in, loop_w, xt, None)?;
            let [par, gate] = b.split(fb, None, None)?;
            parity_wires.push(par);
            gate_legs.push(gate);
        }

        let mut g_in = vec![set_w, reset_w];
        g_in.extend(gate_legs);
        let (gated, _) = b.instantiate(&gating, g_in, vec![], &anon, &[])?;

        // Fan the gated word out to all multipliers.
        let mut leaves_per_bit: Vec<Vec<(Wire, i64)>> = Vec::with_capacity(a);
        for (bit, g_w) in gated.into_iter().enumerate() {
            let base = x_fire[bit] + 15; // adder XOR + split + NDRO read
            let leaves = fan(&mut b, g_w, np)?
                .into_iter()
                .map(|(w, d)| (w, base + 5 * d as i64))
                .collect();
            leaves_per_bit.push(leaves);
        }
        let mut prods: Vec<Vec<(Wire, i64)>> = Vec::with_capacity(np);
        for (r, sub) in mult_subs.iter().enumerate() {
            let (mt, mf) = taps.remove(&Tap::Mult(r)).expect("multiplier tap");
            let mut xs = Vec::with_capacity(a + 1);
            for leaves in &mut leaves_per_bit {
                let (w, off) = leaves.remove(0);
                xs.push(route(&mut b, period, w, off, mf, multiplier::INPUT_TREE_DEPTH, None)?);
            }
            xs.push(mt);
            let (ys, _) = b.instantiate(sub, xs, vec![], &anon, &[])?;
            prods.push(ys.into_iter().map(|w| (w, mf + 5)).collect());
        }

        // Register file: update gates plus the three-DFF transport chains
        // that carry each register to the next update one symbol later.
        let mut carry: Option<Vec<(Wire, i64)>> = None;
        let mut feedback: Vec<(Wire, i64)> = Vec::new();
        for (r, row) in prods.into_iter().enumerate() {
            let mut bank = Vec::with_capacity(a);
            for (bit, (y_w, y_off)) in row.into_iter().enumerate() {
                let (dt, df) = taps.remove(&Tap::D(r, bit)).expect("register tap");
                let y_in = route(&mut b, period, y_w, y_off, df, 0, None)?;
                let out = match &mut carry {
                    None => b.dff(y_in, dt, None)?,
                    Some(lower) => {
                        let (t_w, t_off) = lower.remove(0);
                        let t_in = route(&mut b, period, t_w, t_off, df, 0, None)?;
                        b.xor(y_in, t_in, dt, None)?
                    }
                };
                bank.push((out, df + 5));
            }
            if r + 1 < np {
                let mut level_in = bank;
                for level in [1, 2, 3] {
                    let mut next = Vec::with_capacity(a);
                    for (bit, (w, off)) in level_in.into_iter().enumerate() {
                        let (tt, tf) = taps.remove(&Tap::T(r, level, bit)).expect("transport tap");
                        let w_in = route(&mut b, period, w, off, tf, 0, None)?;
                        next.push((b.dff(w_in, tt, None)?, tf + 5));
                    }
                    level_in = next;
                }
                carry = Some(level_in);
            } else {
                feedback = bank;
            }
        }
        debug_assert!(taps.is_empty(), "every planned tap is consumed");

        // Close the loop: the top register re-enters the input adder.
        let forced = match cfg.clocking {
            Clocking::Concurrent => Some(0),
            Clocking::Counterflow => Some(cfg.feedback_delay_buffs),
        };
        let mut loop_binds = Vec::with_capacity(a);
        for (bit, (w, off)) in feedback.into_iter().enumerate() {
            loop_binds.push(route(&mut b, period, w, off, x_fire[bit], 0, forced)?);
        }
        b.set_loops(loop_binds)?;
        b.set_outputs(parity_wires)?;
        if let Some(h) = trunk_upstream {
            b.set_counter_inputs(vec![h])?;
        }
        let sealed = b.finalize()?;
        let flat = flatten(sealed.data())?;

        let timing = Timing {
            x_fire,
            merge_fire,
            sclk_delay: 5 * (buffers::sclk_tree_depth(&cfg) as i64 + 1),
            gating_delay: 5 * gating::ctl_tree_depth(a) as i64,
        };
        Ok(Encoder { cfg, sealed, flat, timing })
    }

    /// The generated circuit.
    pub fn circuit(&self) -> &SealedCircuit {
        &self.sealed
    }

    /// The flattened copy used for simulation.
    pub fn flat(&self) -> &CircuitData {
        &self.flat
    }

    /// The configuration this encoder was generated from.
    pub fn config(&self) -> &EncoderConfig {
        &self.cfg
    }

    /// Encodes one message per stream by pulse simulation, with the
    /// default, automatically sufficient horizon.
    pub fn run(&self, messages: &[Vec<FieldElement>]) -> Result<EncoderRun, EncoderError> {
        self.run_bounded(messages, None)
    }

    /// Like [`Encoder::run`], but with an explicit simulation horizon in
    /// picoseconds. Fails with [`EncoderError::Timeout`] if the horizon
    /// closes before the last parity window.
    pub fn run_bounded(
        &self,
        messages: &[Vec<FieldElement>],
        horizon_ps: Option<u64>,
    ) -> Result<EncoderRun, EncoderError> {
        let cfg = &self.cfg;
        let ctx = cfg.params.ctx();
        let a = ctx.width() as usize;
        let streams = cfg.interleave_depth;
        let k = cfg.params.k();
        let np = cfg.params.num_parity();
        let p = cfg.clock_period_ps as i64;

        if messages.len() != streams {
            return Err(EncoderError::InvalidConfig {
                reason: format!("expected {streams} stream messages, got {}", messages.len()),
            });
        }
        for (s, m) in messages.iter().enumerate() {
            if m.len() != k {
                return Err(EncoderError::InvalidConfig {
                    reason: format!("stream {s} message has {} words, expected k = {k}", m.len()),
                });
            }
            if let Some(w) = m.iter().find(|&&w| w >> a != 0) {
                return Err(EncoderError::InvalidConfig {
                    reason: format!("stream {s} word {w} does not fit {a} bits"),
                });
            }
        }

        // Load phase: all four FIFOs load in parallel, highest-degree
        // symbol first. Word j's data pulses set the back DFFs directly,
        // and k-1 interleaved shifts walk the earlier words forward, so
        // after loading the first word waits unemitted at the front.
        let data_t = |j: usize| self.timing.sclk_delay.max(10) + 40 * j as i64;
        let shift_t = |j: usize| data_t(j) + 20 - self.timing.sclk_delay;
        let load_end = data_t(k - 1) + 40;

        // Pop phase: stream s presents symbol j to the merge on wave
        // w0 + s + streams*j; the front pulse must land just before that
        // wave's merge clock.
        let pop_t =
            |w: i64| w * p + self.timing.merge_fire - 50 - self.timing.sclk_delay;
        let mut w0 = 2;
        while pop_t(w0) < load_end + 10 {
            w0 += 1;
        }

        let mut stim: Vec<PulseEvent> = Vec::new();
        for (s, message) in messages.iter().enumerate() {
            let sclk = format!("sclk{s}");
            for j in 0..k {
                if j + 1 < k {
                    stim.push(PulseEvent::new(&sclk, shift_t(j) as u64));
                }
                let word = message[k - 1 - j];
                for bit in 0..a {
                    if word >> bit & 1 == 1 {
                        stim.push(PulseEvent::new(&format!("d{s}_{bit}"), data_t(j) as u64));
                    }
                }
                let w = w0 + s as i64 + (streams * j) as i64;
                stim.push(PulseEvent::new(&sclk, pop_t(w) as u64));
            }
        }

        // Gating: open before the first symbol, shut in the gap between
        // the last message wave and the first drain wave.
        stim.push(PulseEvent::new("set", 5));
        let x_max = *self.timing.x_fire.iter().max().expect("word bits");
        let x_min = *self.timing.x_fire.iter().min().expect("word bits");
        let w_last_msg = w0 + 2 + (streams - 1) as i64 + (streams * (k - 1)) as i64;
        let reset_arr = w_last_msg * p + x_max + 55;
        stim.push(PulseEvent::new("reset", (reset_arr - self.timing.gating_delay) as u64));

        // Datapath clock: one pulse per wave from load start through the
        // last drain wave plus slack for in-flight transport.
        let w_last = w0 + 2 + (streams - 1) as i64 + (streams * (k + np - 1)) as i64;
        let clk_net = match cfg.clocking {
            Clocking::Concurrent => "clk",
            Clocking::Counterflow => "cki",
        };
        stim.extend(clock_train(clk_net, 0, p as u64, (w_last + 3) as usize));

        let last_window_end = (w_last * p + x_min + 10 - 40) as u64 + p as u64;
        let horizon = horizon_ps.unwrap_or(last_window_end + 100);
        if horizon < last_window_end {
            return Err(EncoderError::Timeout { horizon_ps: horizon });
        }
        let trace = simulate(&self.flat, &DelayConfig::default(), &stim, horizon)?;

        // Decode: stream s drains parity slot t (top coefficient first) on
        // wave w0 + 2 + s + streams*(k + t). A one-period window around
        // each wave's parity pulses isolates it from the neighbors.
        let port_names: Vec<String> = (0..a).map(|bit| format!("p{bit}")).collect();
        let ports: Vec<&str> = port_names.iter().map(String::as_str).collect();
        let mut parities: Vec<Vec<FieldElement>> = vec![Vec::new(); streams];
        for (s, words) in parities.iter_mut().enumerate() {
            for slot in 0..np {
                let wave = w0 + 2 + s as i64 + (streams * (k + slot)) as i64;
                let start = (wave * p + x_min + 10 - 40) as u64;
                words.push(decode_words(&trace, &ports, start, p as u64, 1)?[0]);
            }
        }
        Ok(EncoderRun {
            parities,
            stats: RunStats {
                first_read_cycle: (w0 + 2) as u64,
                last_parity_cycle: w_last as u64,
            },
        })
    }
}

/// Generates the encoder circuit for `cfg`.
pub fn build_encoder(cfg: &EncoderConfig) -> Result<SealedCircuit, EncoderError> {
    Encoder::new(cfg.clone()).map(|e| e.sealed)
}

/// Generates the encoder for `cfg` and encodes one message per stream by
/// pulse simulation. For repeated runs build one [`Encoder`] instead.
pub fn run_encoder(
    cfg: &EncoderConfig,
    messages: &[Vec<FieldElement>],
) -> Result<EncoderRun, EncoderError> {
    Encoder::new(cfg.clone())?.run(messages)
}
