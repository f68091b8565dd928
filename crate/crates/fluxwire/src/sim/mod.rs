//! Discrete-event pulse simulation.
//!
//! Time is integer picoseconds. A pulse is an event on a net; because sealed
//! circuits guarantee one driver and one receiver per net, delivering a
//! pulse is a single lookup. Clocked gates latch arrival flags and decide
//! when their clock pin fires; unclocked gates repeat pulses after their
//! configured delay.
//!
//! Simultaneous events are ordered data and set first, then reset, then
//! clock and read, so a pulse arriving in the same picosecond as the clock
//! edge still belongs to that cycle. Within a class, insertion order breaks
//! ties, making runs fully deterministic.

mod flatten;
mod io;

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::circuit::{CircuitData, GateKind, InstanceKind};
use crate::gf::FieldElement;

pub use flatten::{flatten, MAX_DEPTH};
pub use io::{format_trace, parse_stimulus};

/// Errors from simulation, stimulus handling, and decoding.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SimError {
    /// Stimulus was addressed to a net that is not an input or counter
    /// input of the circuit.
    #[error("net {net:?} is not an input or counter input of circuit {circuit:?}")]
    UnknownNet {
        /// The unknown net.
        net: String,
        /// The circuit being simulated.
        circuit: String,
    },
    /// Subcircuit nesting exceeded [`MAX_DEPTH`]; hand-assembled data has
    /// probably been wired into a cycle.
    #[error("subcircuit hierarchy exceeds {limit} levels; the instance graph may be cyclic")]
    CyclicHierarchy {
        /// The depth limit that was exceeded.
        limit: usize,
    },
    /// A net pulsed more than once inside one decode window, so the window
    /// does not represent a single bit.
    #[error(
        "net {net:?} pulsed {count} times in the decode window starting at {window_start} ps"
    )]
    AmbiguousDecode {
        /// The net with multiple pulses.
        net: String,
        /// Start of the offending window.
        window_start: u64,
        /// Number of pulses seen in it.
        count: usize,
    },
    /// A stimulus or configuration line did not parse.
    #[error("malformed {what} line {line:?}")]
    Parse {
        /// What was being parsed.
        what: String,
        /// The offending line.
        line: String,
    },
}

/// One stimulus pulse: a pulse injected on `net` at `time` (ps).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulseEvent {
    /// Target net (must be an input or counter input).
    pub net: String,
    /// Injection time in picoseconds.
    pub time: u64,
}

impl PulseEvent {
    /// Convenience constructor.
    pub fn new(net: impl Into<String>, time: u64) -> PulseEvent {
        PulseEvent {
            net: net.into(),
            time,
        }
    }
}

/// A periodic pulse train: `count` pulses on `net` starting at `start`,
/// spaced `period` apart.
pub fn clock_train(net: &str, start: u64, period: u64, count: usize) -> Vec<PulseEvent> {
    (0..count)
        .map(|i| PulseEvent::new(net, start + period * i as u64))
        .collect()
}

/// Per-gate-kind propagation delays in picoseconds (clock-to-output for
/// clocked gates, input-to-output otherwise). Every kind defaults to 5 ps.
#[derive(Debug, Clone)]
pub struct DelayConfig {
    delays: Vec<(GateKind, u64)>,
}

impl Default for DelayConfig {
    fn default() -> DelayConfig {
        DelayConfig {
            delays: GateKind::ALL.iter().map(|&k| (k, 5)).collect(),
        }
    }
}

impl DelayConfig {
    /// The delay for a gate kind.
    pub fn delay(&self, kind: GateKind) -> u64 {
        self.delays
            .iter()
            .find(|(k, _)| *k == kind)
            .expect("every gate kind has a delay")
            .1
    }

    /// Sets the delay for a gate kind.
    pub fn set(&mut self, kind: GateKind, ps: u64) {
        let entry = self
            .delays
            .iter_mut()
            .find(|(k, _)| *k == kind)
            .expect("every gate kind has a delay");
        entry.1 = ps;
    }

    /// Applies one `KIND=PS` override (kind keys as in cell-name maps).
    pub fn apply_override(&mut self, entry: &str) -> Result<(), SimError> {
        let bad = || SimError::Parse {
            what: "delay override".to_string(),
            line: entry.to_string(),
        };
        let (key, value) = entry.split_once('=').ok_or_else(bad)?;
        let kind = crate::netlist::CellNameMap::kind_for_key(key.trim()).ok_or_else(bad)?;
        let ps: u64 = value.trim().parse().map_err(|_| bad())?;
        self.set(kind, ps);
        Ok(())
    }

    /// Parses a whole override file: one `KIND=PS` per line, `#` comments
    /// and blank lines ignored. Starts from the defaults.
    pub fn parse_overrides(text: &str) -> Result<DelayConfig, SimError> {
        let mut config = DelayConfig::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            config.apply_override(line)?;
        }
        Ok(config)
    }
}

/// The recorded result of a simulation: every pulse on every net, in
/// chronological delivery order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimTrace {
    pulses: Vec<(u64, String)>,
}

impl SimTrace {
    /// Builds a trace directly from `(time, net)` pairs.
    pub fn from_pulses(pulses: Vec<(u64, String)>) -> SimTrace {
        SimTrace { pulses }
    }

    /// All pulses as `(time, net)` pairs.
    pub fn pulses(&self) -> &[(u64, String)] {
        &self.pulses
    }

    /// The pulse times on one net.
    pub fn pulses_on(&self, net: &str) -> Vec<u64> {
        self.pulses
            .iter()
            .filter(|(_, n)| n == net)
            .map(|(t, _)| *t)
            .collect()
    }

    /// A trace restricted to the given nets, preserving order.
    pub fn retain_nets(&self, nets: &[&str]) -> SimTrace {
        SimTrace {
            pulses: self
                .pulses
                .iter()
                .filter(|(_, n)| nets.contains(&n.as_str()))
                .cloned()
                .collect(),
        }
    }
}

/// Event class for same-time ordering: data and set pulses land before
/// reset, reset before clock and read.
fn pin_class(kind: GateKind, pin: usize) -> u8 {
    match kind {
        GateKind::And2 | GateKind::Or2 | GateKind::Xor => {
            if pin == 2 {
                2
            } else {
                0
            }
        }
        GateKind::Not | GateKind::Dff => {
            if pin == 1 {
                2
            } else {
                0
            }
        }
        GateKind::Buff | GateKind::Split => 0,
        GateKind::Ndro => match pin {
            0 => 0,
            1 => 1,
            _ => 2,
        },
    }
}

#[derive(Debug, Clone, Copy)]
enum Sink {
    /// Delivered to pin `pin` of flat gate `gate`.
    Gate { gate: usize, pin: usize },
    /// Leaves the circuit through an output port; recorded only.
    Port,
}

#[derive(Debug, Clone, Copy)]
enum GateState {
    TwoFlags { a: bool, b: bool },
    OneFlag { a: bool },
    Latch { set: bool },
    Stateless,
}

#[derive(Default)]
struct NetTable {
    ids: BTreeMap<String, usize>,
    names: Vec<String>,
}

impl NetTable {
    fn id(&mut self, net: &str) -> usize {
        if let Some(&id) = self.ids.get(net) {
            return id;
        }
        let id = self.names.len();
        self.names.push(net.to_string());
        self.ids.insert(net.to_string(), id);
        id
    }
}

/// Runs a discrete-event simulation.
///
/// Hierarchical circuits are flattened first, so trace net names follow the
/// flattened naming (`<instance>/<net>`). Stimulus may only target input
/// and counter-input ports. Pulses that would appear after `horizon` are
/// dropped.
pub fn simulate(
    data: &CircuitData,
    delays: &DelayConfig,
    stimulus: &[PulseEvent],
    horizon: u64,
) -> Result<SimTrace, SimError> {
    let flat;
    let circuit = if data
        .gates()
        .iter()
        .any(|g| matches!(g.kind, InstanceKind::Sub(_)))
    {
        flat = flatten(data)?;
        &flat
    } else {
        data
    };

    let mut nets = NetTable::default();
    for port in circuit.header_nets() {
        nets.id(port);
    }

    let mut gate_kind: Vec<GateKind> = Vec::with_capacity(circuit.gates().len());
    let mut gate_outs: Vec<Vec<usize>> = Vec::with_capacity(circuit.gates().len());
    let mut state: Vec<GateState> = Vec::with_capacity(circuit.gates().len());
    let mut sinks: Vec<Option<Sink>> = vec![None; nets.names.len()];

    let sink_at = |sinks: &mut Vec<Option<Sink>>, id: usize, sink: Sink| {
        if sinks.len() <= id {
            sinks.resize(id + 1, None);
        }
        sinks[id] = Some(sink);
    };

    for net in circuit.outputs().iter().chain(circuit.counter_outputs()) {
        let id = nets.id(net);
        sink_at(&mut sinks, id, Sink::Port);
    }

    for (gi, gate) in circuit.gates().iter().enumerate() {
        let kind = match gate.kind {
            InstanceKind::Gate(kind) => kind,
            InstanceKind::Sub(_) => unreachable!("flattened circuits hold primitives only"),
        };
        let split = kind.input_count();
        let mut outs = Vec::with_capacity(kind.pin_count() - split);
        for (pin, net) in gate.pins.iter().enumerate() {
            let id = nets.id(net);
            if pin < split {
                sink_at(&mut sinks, id, Sink::Gate { gate: gi, pin });
            } else {
                outs.push(id);
            }
        }
        gate_kind.push(kind);
        gate_outs.push(outs);
        state.push(match kind {
            GateKind::And2 | GateKind::Or2 | GateKind::Xor => {
                GateState::TwoFlags { a: false, b: false }
            }
            GateKind::Not | GateKind::Dff => GateState::OneFlag { a: false },
            GateKind::Ndro => GateState::Latch { set: false },
            GateKind::Buff | GateKind::Split => GateState::Stateless,
        });
    }
    if sinks.len() < nets.names.len() {
        sinks.resize(nets.names.len(), None);
    }

    // Event class per net, derived from its sink.
    let classes: Vec<u8> = sinks
        .iter()
        .map(|sink| match sink {
            Some(Sink::Gate { gate, pin }) => pin_class(gate_kind[*gate], *pin),
            _ => 0,
        })
        .collect();

    // Min-heap on (time, class, seq): chronological, data before clock,
    // insertion order within a class.
    let mut heap: BinaryHeap<Reverse<(u64, u8, u64, usize)>> = BinaryHeap::new();
    let mut seq: u64 = 0;

    let allowed: Vec<&str> = circuit.stimulus_nets();
    for pulse in stimulus {
        if !allowed.contains(&pulse.net.as_str()) {
            return Err(SimError::UnknownNet {
                net: pulse.net.clone(),
                circuit: circuit.name().to_string(),
            });
        }
        if pulse.time > horizon {
            continue;
        }
        let id = nets.ids[&pulse.net];
        heap.push(Reverse((pulse.time, classes[id], seq, id)));
        seq += 1;
    }

    let mut trace: Vec<(u64, String)> = Vec::new();
    while let Some(Reverse((time, _class, _seq, net))) = heap.pop() {
        trace.push((time, nets.names[net].clone()));

        let Some(Sink::Gate { gate, pin }) = sinks[net] else {
            continue;
        };
        let kind = gate_kind[gate];
        let delay = delays.delay(kind);
        let mut fire = false;
        match (&mut state[gate], kind, pin) {
            (GateState::Stateless, GateKind::Split | GateKind::Buff, _) => fire = true,
            (GateState::TwoFlags { a, .. }, _, 0) => *a = true,
            (GateState::TwoFlags { b, .. }, _, 1) => *b = true,
            (GateState::TwoFlags { a, b }, k, 2) => {
                fire = match k {
                    GateKind::And2 => *a && *b,
                    GateKind::Or2 => *a || *b,
                    GateKind::Xor => *a ^ *b,
                    _ => unreachable!(),
                };
                *a = false;
                *b = false;
            }
            (GateState::OneFlag { a }, _, 0) => *a = true,
            (GateState::OneFlag { a }, k, 1) => {
                fire = match k {
                    GateKind::Dff => *a,
                    GateKind::Not => !*a,
                    _ => unreachable!(),
                };
                *a = false;
            }
            (GateState::Latch { set }, GateKind::Ndro, 0) => *set = true,
            (GateState::Latch { set }, GateKind::Ndro, 1) => *set = false,
            (GateState::Latch { set }, GateKind::Ndro, 2) => fire = *set,
            _ => unreachable!("pin/state mismatch"),
        }
        if fire {
            let at = time + delay;
            if at <= horizon {
                for &out in &gate_outs[gate] {
                    heap.push(Reverse((at, classes[out], seq, out)));
                    seq += 1;
                }
            }
        }
    }

    Ok(SimTrace { pulses: trace })
}

/// Decodes field elements from pulse positions: word `w` collects bit `j`
/// from a pulse on `bit_nets[j]` inside the half-open window
/// `[start + w*window, start + (w+1)*window)`.
///
/// More than one pulse on a bit net inside one window is reported as
/// [`SimError::AmbiguousDecode`].
pub fn decode_words(
    trace: &SimTrace,
    bit_nets: &[&str],
    start: u64,
    window: u64,
    count: usize,
) -> Result<Vec<FieldElement>, SimError> {
    let mut words = Vec::with_capacity(count);
    for w in 0..count {
        let lo = start + window * w as u64;
        let hi = lo + window;
        let mut word: FieldElement = 0;
        for (bit, net) in bit_nets.iter().enumerate() {
            let hits = trace
                .pulses_on(net)
                .into_iter()
                .filter(|&t| t >= lo && t < hi)
                .count();
            match hits {
                0 => {}
                1 => word |= 1 << bit,
                n => {
                    return Err(SimError::AmbiguousDecode {
                        net: net.to_string(),
                        window_start: lo,
                        count: n,
                    });
                }
            }
        }
        words.push(word);
    }
    Ok(words)
}
