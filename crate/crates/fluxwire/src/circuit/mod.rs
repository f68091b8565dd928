//! Circuit description core: single-use wire handles, gate placement, and
//! finalize-time validation.
//!
//! An SFQ pulse is a physical token: every pulse a gate emits must be
//! consumed by exactly one downstream gate, and fan-out requires an explicit
//! splitter. The builder mirrors that rule in the type system. [`Wire`] and
//! [`CounterWire`] are handles without `Clone` or `Copy`; every gate
//! operation takes its inputs by value, so using a wire twice is a move error
//! at compile time:
//!
//! ```compile_fail
//! use fluxwire::circuit::Circuit;
//!
//! let (mut c, [a, b], [], []) =
//!     Circuit::create(["a", "b"], ["q", "r"], [], [], [], "Bad");
//! let q = c.buff(a, None);
//! let r = c.buff(b, None);
//! let r2 = c.buff(b, None); // error[E0382]: use of moved value: `b`
//! # c.set_outputs([q, r]);
//! # let _ = r2;
//! ```
//!
//! The same holds for the counter-flow handles:
//!
//! ```compile_fail
//! use fluxwire::circuit::Circuit;
//!
//! let (mut c, [a], [], [cko]) =
//!     Circuit::create(["a"], ["q"], [], ["cko"], ["cki"], "Bad");
//! let (cw, tap) = c.counter_split(cko, None, None);
//! let (cw2, tap2) = c.counter_split(cko, None, None); // use of moved value: `cko`
//! ```
//!
//! Mistakes the type system cannot see (a wire that is never consumed, an
//! output port never bound) are caught when the circuit is sealed:
//!
//! ```
//! use fluxwire::circuit::Circuit;
//!
//! let (mut c, [a, b, clk], [], []) =
//!     Circuit::create(["a", "b", "clk"], ["c", "s"], [], [], [], "HalfAdder");
//! let [clk0, clk1] = c.split(clk, None, None);
//! let [a0, a1] = c.split(a, None, None);
//! let [b0, b1] = c.split(b, None, None);
//! let carry = c.and(a0, b0, clk0, Some("c"));
//! let sum = c.xor(a1, b1, clk1, Some("s"));
//! c.set_outputs([carry, sum]);
//! let netlist = c.to_spice();
//! assert_eq!(netlist[0], ".subckt HalfAdder a b clk c s");
//! assert_eq!(netlist[4], "XAND4 _a_0 _b_0 _clk_0 c THmitll_AND2");
//! ```

mod naming;
mod typed;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use naming::{NameTable, NameUse, PortSlot};

pub use typed::Circuit;

/// Everything that can go wrong while describing or sealing a circuit.
///
/// Misuse that Rust's move semantics already rule out (consuming a wire
/// twice, touching a sealed builder's wires) has no variant here: it never
/// reaches runtime.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    /// User-chosen names must be non-empty and must not start with `_`,
    /// which is reserved for auto-generated nets.
    #[error("name {name:?} is reserved: user names must not start with '_'")]
    ReservedName {
        /// The offending name.
        name: String,
    },
    /// A name is already in use in this circuit and is not claimable here.
    #[error("name {name:?} is already in use in this circuit")]
    NameCollision {
        /// The duplicated name.
        name: String,
    },
    /// A wire handle from one builder was passed to a different builder.
    #[error("wire {net:?} belongs to circuit {owner:?}, not {user:?}")]
    ForeignWire {
        /// Net name carried by the foreign handle.
        net: String,
        /// Name of the circuit that created the handle.
        owner: String,
        /// Name of the circuit the handle was passed to.
        user: String,
    },
    /// A port list or pin list has the wrong length.
    #[error("{what}: expected {expected}, got {got}")]
    ArityMismatch {
        /// What was being counted.
        what: String,
        /// Expected count.
        expected: usize,
        /// Actual count.
        got: usize,
    },
    /// `set_outputs`, `set_loops`, or `set_counter_inputs` was called twice.
    #[error("{what} of circuit {circuit:?} are already bound")]
    AlreadyBound {
        /// Which binding was repeated.
        what: String,
        /// The circuit being built.
        circuit: String,
    },
    /// A declared port net was passed to a bind operation for a different
    /// port. Ports connect to the outside; tying two of them to the same net
    /// (for example binding an input wire directly as an output) would alias
    /// them instead of placing any gate.
    #[error("net {net:?} is a declared port of circuit {circuit:?} and cannot be re-bound")]
    DirectPortAlias {
        /// The declared net.
        net: String,
        /// The circuit being built.
        circuit: String,
    },
    /// `finalize` was called before every output/loop/counter-input port was
    /// bound to a wire.
    #[error("circuit {circuit:?} has unbound {missing}")]
    UnboundPorts {
        /// The circuit being sealed.
        circuit: String,
        /// Which binding is missing (`"outputs"`, `"loops"`, or
        /// `"counter inputs"`).
        missing: String,
    },
    /// A pulse is produced but never consumed: a live wire handle was
    /// dropped, or a net has no receiver.
    #[error("net {net:?} dangles: its pulse is never consumed")]
    DanglingWire {
        /// The dangling net.
        net: String,
    },
    /// A net is consumed but nothing produces it.
    #[error("net {net:?} has no driver")]
    NoDriver {
        /// The undriven net.
        net: String,
    },
    /// Two producers share one net.
    #[error("net {net:?} has more than one driver")]
    DoubleDriver {
        /// The multiply-driven net.
        net: String,
    },
    /// Two consumers share one net (fan-out without a splitter).
    #[error("net {net:?} has more than one receiver; fan out through a splitter")]
    DoubleReceiver {
        /// The multiply-consumed net.
        net: String,
    },
}

/// A single-use handle to a net that carries data in the description
/// direction: its driver is known, its receiver is still open.
///
/// Deliberately neither `Clone` nor `Copy`; gate operations take wires by
/// value, so each pulse is routed exactly once.
#[must_use = "an SFQ pulse must be consumed exactly once: route this wire into a gate or bind it to a port"]
#[derive(Debug)]
pub struct Wire {
    owner: u64,
    net: String,
}

/// A single-use handle to a clock net threaded against the data direction:
/// its receiver is known, its driver is still open upstream.
///
/// Counter operations consume the downstream end and return the next handle
/// upstream, so the clock tree is described while walking from the circuit's
/// clock exit back to its entry.
#[must_use = "a counter-flow clock net must be driven exactly once: extend it with a counter operation or bind it to a counter input"]
#[derive(Debug)]
pub struct CounterWire {
    owner: u64,
    net: String,
}

impl Wire {
    /// The net name this handle refers to.
    pub fn net(&self) -> &str {
        &self.net
    }
}

impl CounterWire {
    /// The net name this handle refers to.
    pub fn net(&self) -> &str {
        &self.net
    }
}

/// The primitive SFQ cells a circuit can place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateKind {
    /// Clocked AND: stores arrivals on `a`/`b`, emits on `clk` if both seen.
    And2,
    /// Clocked OR: stores arrivals on `a`/`b`, emits on `clk` if either seen.
    Or2,
    /// Clocked XOR: emits on `clk` if exactly one of `a`/`b` arrived.
    Xor,
    /// Clocked NOT: emits on `clk` if `a` did not arrive this cycle.
    Not,
    /// D flip-flop: emits on `clk` if `d` arrived this cycle.
    Dff,
    /// Unclocked buffer: repeats every pulse after a delay.
    Buff,
    /// Unclocked splitter: repeats every pulse on both outputs.
    Split,
    /// Non-destructive read-out: `set`/`reset` latch one bit; each `read`
    /// pulse passes through to `q` only while the latch is set.
    Ndro,
}

impl GateKind {
    /// All primitive kinds, in a fixed order.
    pub const ALL: [GateKind; 8] = [
        GateKind::And2,
        GateKind::Or2,
        GateKind::Xor,
        GateKind::Not,
        GateKind::Dff,
        GateKind::Buff,
        GateKind::Split,
        GateKind::Ndro,
    ];

    /// Short token used in instance labels (`XAND4`, `XSPLIT1`, ...).
    pub fn token(self) -> &'static str {
        match self {
            GateKind::And2 => "AND",
            GateKind::Or2 => "OR",
            GateKind::Xor => "XOR",
            GateKind::Not => "NOT",
            GateKind::Dff => "DFF",
            GateKind::Buff => "BUFF",
            GateKind::Split => "SPLIT",
            GateKind::Ndro => "NDRO",
        }
    }

    /// Pin names in pin order (inputs first, then outputs).
    pub fn pin_names(self) -> &'static [&'static str] {
        match self {
            GateKind::And2 | GateKind::Or2 | GateKind::Xor => &["a", "b", "clk", "q"],
            GateKind::Not => &["a", "clk", "q"],
            GateKind::Dff => &["d", "clk", "q"],
            GateKind::Buff => &["a", "q"],
            GateKind::Split => &["a", "q0", "q1"],
            GateKind::Ndro => &["set", "reset", "read", "q"],
        }
    }

    /// Number of pins.
    pub fn pin_count(self) -> usize {
        self.pin_names().len()
    }

    /// How many of the leading pins are inputs; the rest are outputs.
    pub fn input_count(self) -> usize {
        match self {
            GateKind::And2 | GateKind::Or2 | GateKind::Xor | GateKind::Ndro => 3,
            GateKind::Not | GateKind::Dff => 2,
            GateKind::Buff | GateKind::Split => 1,
        }
    }

    /// Default library cell name used in netlists.
    pub fn default_cell(self) -> &'static str {
        match self {
            GateKind::And2 => "THmitll_AND2",
            GateKind::Or2 => "THmitll_OR2",
            GateKind::Xor => "THmitll_XOR",
            GateKind::Not => "THmitll_NOT",
            GateKind::Dff => "THmitll_DFF",
            GateKind::Buff => "THmitll_BUFF",
            GateKind::Split => "THmitll_SPLIT",
            GateKind::Ndro => "THmitll_NDRO",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// What a placed instance is: a primitive gate or a sealed subcircuit.
#[derive(Debug, Clone)]
pub enum InstanceKind {
    /// A primitive cell.
    Gate(GateKind),
    /// An instance of another sealed circuit.
    Sub(Arc<CircuitData>),
}

/// One placed instance: label, pin nets, and what it instantiates.
///
/// For primitives the pins follow [`GateKind::pin_names`]. For subcircuit
/// instances the pins follow the sub's header order: inputs, outputs,
/// counter outputs, counter inputs.
#[derive(Debug, Clone)]
pub struct GateInstance {
    /// Unique instance label, `X` + kind token (or sub name) + ordinal.
    pub label: String,
    /// Primitive kind or subcircuit reference.
    pub kind: InstanceKind,
    /// Net attached to each pin, in pin order.
    pub pins: Vec<String>,
}

impl GateInstance {
    /// Pin count expected for this instance's kind.
    pub fn expected_pins(&self) -> usize {
        match &self.kind {
            InstanceKind::Gate(kind) => kind.pin_count(),
            InstanceKind::Sub(sub) => sub.header_len(),
        }
    }

    /// Splits the pins into (receiving, driving) position ranges.
    ///
    /// For a subcircuit instance the counter ports swap roles relative to
    /// the sub's inside view: the instance *drives* the parent nets on its
    /// counter outputs (the clock comes out of the sub there) and *receives*
    /// on its counter inputs.
    pub fn pin_roles(&self) -> (Vec<usize>, Vec<usize>) {
        match &self.kind {
            InstanceKind::Gate(kind) => {
                let split = kind.input_count();
                ((0..split).collect(), (split..kind.pin_count()).collect())
            }
            InstanceKind::Sub(sub) => {
                let n = sub.inputs.len();
                let m = sub.outputs.len();
                let o = sub.counter_outputs.len();
                let p = sub.counter_inputs.len();
                let mut receives: Vec<usize> = (0..n).collect();
                receives.extend(n + m + o..n + m + o + p);
                let drives: Vec<usize> = (n..n + m + o).collect();
                (receives, drives)
            }
        }
    }
}

/// The immutable description of a sealed circuit: port lists and placed
/// instances. This is what netlist emission, flattening, and simulation
/// consume.
#[derive(Debug, Clone)]
pub struct CircuitData {
    name: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    loops: Vec<String>,
    counter_outputs: Vec<String>,
    counter_inputs: Vec<String>,
    gates: Vec<GateInstance>,
}

impl CircuitData {
    /// Assembles circuit data directly from parts, without going through the
    /// builder. No validation happens here; call [`CircuitData::check_consistency`]
    /// to apply the same graph checks `finalize` uses.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        name: impl Into<String>,
        inputs: Vec<String>,
        outputs: Vec<String>,
        loops: Vec<String>,
        counter_outputs: Vec<String>,
        counter_inputs: Vec<String>,
        gates: Vec<GateInstance>,
    ) -> CircuitData {
        CircuitData {
            name: name.into(),
            inputs,
            outputs,
            loops,
            counter_outputs,
            counter_inputs,
            gates,
        }
    }

    /// Circuit name, used as the netlist cell name.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Input port nets.
    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    /// Output port nets.
    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    /// Internal loop nets (not ports; listed for documentation and checks).
    pub fn loops(&self) -> &[String] {
        &self.loops
    }

    /// Counter-output port nets: where a counter-flow clock leaves the
    /// circuit (driven from inside).
    pub fn counter_outputs(&self) -> &[String] {
        &self.counter_outputs
    }

    /// Counter-input port nets: where a counter-flow clock enters the
    /// circuit (consumed inside).
    pub fn counter_inputs(&self) -> &[String] {
        &self.counter_inputs
    }

    /// Placed instances in description order.
    pub fn gates(&self) -> &[GateInstance] {
        &self.gates
    }

    /// Header nets in port order: inputs, outputs, counter outputs, counter
    /// inputs. This is the pin order subcircuit instances use.
    pub fn header_nets(&self) -> Vec<&str> {
        self.inputs
            .iter()
            .chain(&self.outputs)
            .chain(&self.counter_outputs)
            .chain(&self.counter_inputs)
            .map(String::as_str)
            .collect()
    }

    /// Number of header nets.
    pub fn header_len(&self) -> usize {
        self.inputs.len()
            + self.outputs.len()
            + self.counter_outputs.len()
            + self.counter_inputs.len()
    }

    /// Nets that accept external stimulus: inputs and counter inputs (both
    /// are driven from outside the circuit).
    pub fn stimulus_nets(&self) -> Vec<&str> {
        self.inputs
            .iter()
            .chain(&self.counter_inputs)
            .map(String::as_str)
            .collect()
    }
}

/// A finalized circuit. Wraps immutable [`CircuitData`] behind an `Arc` so
/// instantiation and flattening share one copy.
#[derive(Debug, Clone)]
pub struct SealedCircuit {
    data: Arc<CircuitData>,
}

impl SealedCircuit {
    /// The shared data.
    pub fn data(&self) -> &Arc<CircuitData> {
        &self.data
    }
}

impl Deref for SealedCircuit {
    type Target = CircuitData;

    fn deref(&self) -> &CircuitData {
        &self.data
    }
}

static NEXT_BUILDER_ID: AtomicU64 = AtomicU64::new(1);

/// The dynamic circuit builder.
///
/// This is the arity-checked-at-runtime core; [`Circuit`] wraps it in a
/// const-generic facade whose port counts are checked at compile time.
/// Wires know which builder minted them, so crossing handles between two
/// builders fails with [`CircuitError::ForeignWire`].
#[derive(Debug)]
pub struct CircuitBuilder {
    id: u64,
    name: String,
    inputs: Vec<String>,
    outputs: Vec<String>,
    loops: Vec<String>,
    counter_outputs: Vec<String>,
    counter_inputs: Vec<String>,
    gates: Vec<GateInstance>,
    names: NameTable,
    /// Live handles keyed by mint order: net name and whether counter-flow.
    live: BTreeMap<u64, (String, bool)>,
    next_handle: u64,
    next_ordinal: usize,
    outputs_bound: bool,
    loops_bound: bool,
    counter_inputs_bound: bool,
}

impl CircuitBuilder {
    /// Starts a circuit with the given port names and returns the builder
    /// together with handles for the nets usable immediately: data inputs,
    /// the upper (consumable) end of each declared loop, and the downstream
    /// end of each counter-output clock net.
    pub fn create(
        name: &str,
        inputs: &[&str],
        outputs: &[&str],
        loops: &[&str],
        counter_outputs: &[&str],
        counter_inputs: &[&str],
    ) -> Result<(CircuitBuilder, Vec<Wire>, Vec<Wire>, Vec<CounterWire>), CircuitError> {
        if name.is_empty() || name.starts_with('_') {
            return Err(CircuitError::ReservedName {
                name: name.to_string(),
            });
        }
        let mut builder = CircuitBuilder {
            id: NEXT_BUILDER_ID.fetch_add(1, Ordering::Relaxed),
            name: name.to_string(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
            outputs: outputs.iter().map(|s| s.to_string()).collect(),
            loops: loops.iter().map(|s| s.to_string()).collect(),
            counter_outputs: counter_outputs.iter().map(|s| s.to_string()).collect(),
            counter_inputs: counter_inputs.iter().map(|s| s.to_string()).collect(),
            gates: Vec::new(),
            names: NameTable::default(),
            live: BTreeMap::new(),
            next_handle: 0,
            next_ordinal: 1,
            outputs_bound: outputs.is_empty(),
            loops_bound: loops.is_empty(),
            counter_inputs_bound: counter_inputs.is_empty(),
        };
        for port in inputs.iter().chain(counter_outputs) {
            builder.names.declare_fixed(port)?;
        }
        for (i, port) in outputs.iter().enumerate() {
            builder.names.declare_claimable(port, PortSlot::Output(i))?;
        }
        for (i, port) in loops.iter().enumerate() {
            builder.names.declare_claimable(port, PortSlot::Loop(i))?;
        }
        for (i, port) in counter_inputs.iter().enumerate() {
            builder
                .names
                .declare_claimable(port, PortSlot::CounterInput(i))?;
        }
        let input_handles = inputs
            .iter()
            .map(|net| builder.mint_wire(net))
            .collect::<Vec<_>>();
        let loop_handles = loops
            .iter()
            .map(|net| builder.mint_wire(net))
            .collect::<Vec<_>>();
        let counter_handles = counter_outputs
            .iter()
            .map(|net| builder.mint_counter(net))
            .collect::<Vec<_>>();
        Ok((builder, input_handles, loop_handles, counter_handles))
    }

    /// Circuit name.
    pub fn name(&self) -> &str {
        &self.name
    }

    fn mint_wire(&mut self, net: &str) -> Wire {
        let id = self.next_handle;
        self.next_handle += 1;
        self.live.insert(id, (net.to_string(), false));
        Wire {
            owner: self.id,
            net: net.to_string(),
        }
    }

    fn mint_counter(&mut self, net: &str) -> CounterWire {
        let id = self.next_handle;
        self.next_handle += 1;
        self.live.insert(id, (net.to_string(), true));
        CounterWire {
            owner: self.id,
            net: net.to_string(),
        }
    }

    fn check_owner(&self, owner: u64, net: &str) -> Result<(), CircuitError> {
        if owner != self.id {
            return Err(CircuitError::ForeignWire {
                net: net.to_string(),
                owner: format!("builder #{owner}"),
                user: self.name.clone(),
            });
        }
        Ok(())
    }

    fn consume(&mut self, wire: Wire) -> Result<String, CircuitError> {
        self.check_owner(wire.owner, &wire.net)?;
        self.retire_live(&wire.net, false);
        Ok(wire.net)
    }

    fn consume_counter(&mut self, wire: CounterWire) -> Result<String, CircuitError> {
        self.check_owner(wire.owner, &wire.net)?;
        self.retire_live(&wire.net, true);
        Ok(wire.net)
    }

    fn retire_live(&mut self, net: &str, counter: bool) {
        let key = self
            .live
            .iter()
            .find(|(_, (n, c))| n == net && *c == counter)
            .map(|(k, _)| *k)
            .expect("live handle must be tracked until consumed");
        self.live.remove(&key);
    }

    fn next_label(&mut self, token: &str) -> String {
        let label = format!("X{token}{}", self.next_ordinal);
        self.next_ordinal += 1;
        label
    }

    /// Resolves a driven-net name: explicit (mint or claim) or auto from base.
    fn driven_net(&mut self, base: &str, name: Option<&str>) -> Result<String, CircuitError> {
        match name {
            Some(n) => self.names.claim_explicit(n, NameUse::Driven),
            None => Ok(self.names.fresh_auto(&naming::base_of(base))),
        }
    }

    fn push_gate(&mut self, kind: GateKind, pins: Vec<String>) {
        let label = self.next_label(kind.token());
        self.gates.push(GateInstance {
            label,
            kind: InstanceKind::Gate(kind),
            pins,
        });
    }

    fn two_input_clocked(
        &mut self,
        kind: GateKind,
        a: Wire,
        b: Wire,
        clk: Wire,
        name: Option<&str>,
    ) -> Result<Wire, CircuitError> {
        self.check_owner(a.owner, &a.net)?;
        self.check_owner(b.owner, &b.net)?;
        self.check_owner(clk.owner, &clk.net)?;
        let pa = self.consume(a)?;
        let pb = self.consume(b)?;
        let pclk = self.consume(clk)?;
        let q = self.driven_net(&pa, name)?;
        let wire = self.mint_wire(&q);
        self.push_gate(kind, vec![pa, pb, pclk, q]);
        Ok(wire)
    }

    /// Places a clocked AND gate and returns its output wire.
    pub fn and(
        &mut self,
        a: Wire,
        b: Wire,
        clk: Wire,
        name: Option<&str>,
    ) -> Result<Wire, CircuitError> {
        self.two_input_clocked(GateKind::And2, a, b, clk, name)
    }

    /// Places a clocked OR gate and returns its output wire.
    pub fn or(
        &mut self,
        a: Wire,
        b: Wire,
        clk: Wire,
        name: Option<&str>,
    ) -> Result<Wire, CircuitError> {
        self.two_input_clocked(GateKind::Or2, a, b, clk, name)
    }

    /// Places a clocked XOR gate and returns its output wire.
    pub fn xor(
        &mut self,
        a: Wire,
        b: Wire,
        clk: Wire,
        name: Option<&str>,
    ) -> Result<Wire, CircuitError> {
        self.two_input_clocked(GateKind::Xor, a, b, clk, name)
    }

    /// Places a clocked NOT gate and returns its output wire.
    pub fn not(&mut self, a: Wire, clk: Wire, name: Option<&str>) -> Result<Wire, CircuitError> {
        self.check_owner(a.owner, &a.net)?;
        self.check_owner(clk.owner, &clk.net)?;
        let pa = self.consume(a)?;
        let pclk = self.consume(clk)?;
        let q = self.driven_net(&pa, name)?;
        let wire = self.mint_wire(&q);
        self.push_gate(GateKind::Not, vec![pa, pclk, q]);
        Ok(wire)
    }

    /// Places a D flip-flop and returns its output wire.
    pub fn dff(&mut self, d: Wire, clk: Wire, name: Option<&str>) -> Result<Wire, CircuitError> {
        self.check_owner(d.owner, &d.net)?;
        self.check_owner(clk.owner, &clk.net)?;
        let pd = self.consume(d)?;
        let pclk = self.consume(clk)?;
        let q = self.driven_net(&pd, name)?;
        let wire = self.mint_wire(&q);
        self.push_gate(GateKind::Dff, vec![pd, pclk, q]);
        Ok(wire)
    }

    /// Places an unclocked buffer and returns its output wire.
    pub fn buff(&mut self, a: Wire, name: Option<&str>) -> Result<Wire, CircuitError> {
        self.check_owner(a.owner, &a.net)?;
        let pa = self.consume(a)?;
        let q = self.driven_net(&pa, name)?;
        let wire = self.mint_wire(&q);
        self.push_gate(GateKind::Buff, vec![pa, q]);
        Ok(wire)
    }

    /// Places a splitter, the only fan-out primitive, and returns both
    /// output wires.
    pub fn split(
        &mut self,
        a: Wire,
        name0: Option<&str>,
        name1: Option<&str>,
    ) -> Result<[Wire; 2], CircuitError> {
        self.check_owner(a.owner, &a.net)?;
        let pa = self.consume(a)?;
        let q0 = self.driven_net(&pa, name0)?;
        let q1 = self.driven_net(&pa, name1)?;
        let w0 = self.mint_wire(&q0);
        let w1 = self.mint_wire(&q1);
        self.push_gate(GateKind::Split, vec![pa, q0, q1]);
        Ok([w0, w1])
    }

    /// Places a non-destructive read-out cell and returns its output wire.
    /// `set` and `reset` write the latch; each `read` pulse is passed to the
    /// output only while the latch is set.
    pub fn ndro(
        &mut self,
        set: Wire,
        reset: Wire,
        read: Wire,
        name: Option<&str>,
    ) -> Result<Wire, CircuitError> {
        self.check_owner(set.owner, &set.net)?;
        self.check_owner(reset.owner, &reset.net)?;
        self.check_owner(read.owner, &read.net)?;
        let pset = self.consume(set)?;
        let preset = self.consume(reset)?;
        let pread = self.consume(read)?;
        let q = self.driven_net(&pread, name)?;
        let wire = self.mint_wire(&q);
        self.push_gate(GateKind::Ndro, vec![pset, preset, pread, q]);
        Ok(wire)
    }

    /// Resolves the upstream net of a counter operation: explicit names may
    /// claim a declared counter-input port.
    fn counter_upstream_net(
        &mut self,
        base: &str,
        name: Option<&str>,
    ) -> Result<String, CircuitError> {
        match name {
            Some(n) => self.names.claim_explicit(n, NameUse::CounterUpstream),
            None => Ok(self.names.fresh_auto(&naming::base_of(base))),
        }
    }

    /// Places a splitter on a counter-flow clock net. Consumes the
    /// downstream end and returns the next upstream handle plus a forward
    /// tap wire that clocks one gate.
    ///
    /// The clock flows opposite to the description order: the first
    /// `counter_split` taps the clock *last* on the physical path, so gates
    /// described early (data-upstream) are clocked late, which is exactly
    /// the counter-flow discipline.
    pub fn counter_split(
        &mut self,
        downstream: CounterWire,
        upstream_name: Option<&str>,
        tap_name: Option<&str>,
    ) -> Result<(CounterWire, Wire), CircuitError> {
        self.check_owner(downstream.owner, &downstream.net)?;
        let down = self.consume_counter(downstream)?;
        let base = naming::base_of(&down);
        let up = self.counter_upstream_net(&base, upstream_name)?;
        let tap = self.driven_net(&base, tap_name)?;
        let up_handle = self.mint_counter(&up);
        let tap_handle = self.mint_wire(&tap);
        self.push_gate(GateKind::Split, vec![up.clone(), tap, down]);
        Ok((up_handle, tap_handle))
    }

    /// Places a buffer on a counter-flow clock net: consumes the downstream
    /// end and returns the next upstream handle.
    pub fn counter_buff(
        &mut self,
        downstream: CounterWire,
        upstream_name: Option<&str>,
    ) -> Result<CounterWire, CircuitError> {
        self.check_owner(downstream.owner, &downstream.net)?;
        let down = self.consume_counter(downstream)?;
        let base = naming::base_of(&down);
        let up = self.counter_upstream_net(&base, upstream_name)?;
        let up_handle = self.mint_counter(&up);
        self.push_gate(GateKind::Buff, vec![up, down]);
        Ok(up_handle)
    }

    /// Instantiates a sealed circuit.
    ///
    /// Like a single gate, the instance *receives* on the sub's inputs and
    /// counter inputs and *drives* on the sub's outputs and counter outputs,
    /// so the argument/return split follows the flow direction on the parent
    /// side:
    ///
    /// * `inputs` — data wires consumed by the instance, one per sub input;
    /// * `counter_sinks` — counter-flow handles whose pending driver becomes
    ///   the instance, one per sub *counter output* (the clock leaves the
    ///   sub there and continues into the parent's already-described
    ///   downstream chain);
    /// * returned data wires — one per sub output, freshly named (or named
    ///   by `output_names`);
    /// * returned counter handles — one per sub *counter input*: the clock
    ///   enters the sub there, so the parent keeps threading upstream,
    ///   exactly as after a [`CircuitBuilder::counter_split`].
    pub fn instantiate(
        &mut self,
        sub: &SealedCircuit,
        inputs: Vec<Wire>,
        counter_sinks: Vec<CounterWire>,
        output_names: &[Option<&str>],
        counter_input_names: &[Option<&str>],
    ) -> Result<(Vec<Wire>, Vec<CounterWire>), CircuitError> {
        let data = sub.data();
        if inputs.len() != data.inputs.len() {
            return Err(CircuitError::ArityMismatch {
                what: format!("inputs of subcircuit {:?}", data.name()),
                expected: data.inputs.len(),
                got: inputs.len(),
            });
        }
        if counter_sinks.len() != data.counter_outputs.len() {
            return Err(CircuitError::ArityMismatch {
                what: format!("counter outputs of subcircuit {:?}", data.name()),
                expected: data.counter_outputs.len(),
                got: counter_sinks.len(),
            });
        }
        if output_names.len() != data.outputs.len() {
            return Err(CircuitError::ArityMismatch {
                what: format!("output names for subcircuit {:?}", data.name()),
                expected: data.outputs.len(),
                got: output_names.len(),
            });
        }
        if counter_input_names.len() != data.counter_inputs.len() {
            return Err(CircuitError::ArityMismatch {
                what: format!("counter input names for subcircuit {:?}", data.name()),
                expected: data.counter_inputs.len(),
                got: counter_input_names.len(),
            });
        }
        for wire in &inputs {
            self.check_owner(wire.owner, &wire.net)?;
        }
        for wire in &counter_sinks {
            self.check_owner(wire.owner, &wire.net)?;
        }

        let mut pins = Vec::with_capacity(data.header_len());
        for wire in inputs {
            pins.push(self.consume(wire)?);
        }
        // Auto-name base: the first data input's net, or the first counter
        // sink's net, or the sub's name lowercased for port-free subs.
        let base = pins
            .first()
            .cloned()
            .or_else(|| counter_sinks.first().map(|w| w.net.clone()))
            .map(|net| naming::base_of(&net))
            .unwrap_or_else(|| data.name().to_lowercase());

        let mut out_handles = Vec::with_capacity(data.outputs.len());
        for name in output_names {
            let net = self.driven_net(&base, *name)?;
            out_handles.push(self.mint_wire(&net));
            pins.push(net);
        }
        for sink in counter_sinks {
            pins.push(self.consume_counter(sink)?);
        }
        let mut counter_handles = Vec::with_capacity(data.counter_inputs.len());
        for name in counter_input_names {
            let net = self.counter_upstream_net(&base, *name)?;
            counter_handles.push(self.mint_counter(&net));
            pins.push(net);
        }

        let label = self.next_label(data.name());
        self.gates.push(GateInstance {
            label,
            kind: InstanceKind::Sub(Arc::clone(data)),
            pins,
        });
        Ok((out_handles, counter_handles))
    }

    /// Renames a gate-driven (or gate-received, for counter nets) net to a
    /// declared port name at bind time.
    fn rebind_net(
        &mut self,
        from: &str,
        to: &str,
        slot: PortSlot,
    ) -> Result<(), CircuitError> {
        if from == to {
            return Ok(());
        }
        let declared = self
            .inputs
            .iter()
            .chain(&self.outputs)
            .chain(&self.loops)
            .chain(&self.counter_outputs)
            .chain(&self.counter_inputs)
            .any(|p| p == from);
        if declared {
            return Err(CircuitError::DirectPortAlias {
                net: from.to_string(),
                circuit: self.name.clone(),
            });
        }
        match self.names.pending_claim(to) {
            Some(pending) if pending == slot => {}
            _ => {
                return Err(CircuitError::NameCollision {
                    name: to.to_string(),
                });
            }
        }
        self.names.take_claim(to);
        self.names.forget(from);
        for gate in &mut self.gates {
            for pin in &mut gate.pins {
                if pin == from {
                    *pin = to.to_string();
                }
            }
        }
        for (net, _) in self.live.values_mut() {
            if net == from {
                *net = to.to_string();
            }
        }
        Ok(())
    }

    /// Binds the circuit's output ports, in declaration order.
    pub fn set_outputs(&mut self, wires: Vec<Wire>) -> Result<(), CircuitError> {
        if self.outputs_bound {
            return Err(CircuitError::AlreadyBound {
                what: "outputs".to_string(),
                circuit: self.name.clone(),
            });
        }
        if wires.len() != self.outputs.len() {
            return Err(CircuitError::ArityMismatch {
                what: format!("outputs of circuit {:?}", self.name),
                expected: self.outputs.len(),
                got: wires.len(),
            });
        }
        for wire in &wires {
            self.check_owner(wire.owner, &wire.net)?;
        }
        for (i, wire) in wires.into_iter().enumerate() {
            let net = self.consume(wire)?;
            let target = self.outputs[i].clone();
            self.rebind_net(&net, &target, PortSlot::Output(i))?;
        }
        self.outputs_bound = true;
        Ok(())
    }

    /// Closes the circuit's feedback loops: each wire passed here is unified
    /// with the loop net of the same index, whose upper end was handed out
    /// by [`CircuitBuilder::create`].
    pub fn set_loops(&mut self, wires: Vec<Wire>) -> Result<(), CircuitError> {
        if self.loops_bound {
            return Err(CircuitError::AlreadyBound {
                what: "loops".to_string(),
                circuit: self.name.clone(),
            });
        }
        if wires.len() != self.loops.len() {
            return Err(CircuitError::ArityMismatch {
                what: format!("loops of circuit {:?}", self.name),
                expected: self.loops.len(),
                got: wires.len(),
            });
        }
        for wire in &wires {
            self.check_owner(wire.owner, &wire.net)?;
        }
        for (i, wire) in wires.into_iter().enumerate() {
            let net = self.consume(wire)?;
            let target = self.loops[i].clone();
            self.rebind_net(&net, &target, PortSlot::Loop(i))?;
        }
        self.loops_bound = true;
        Ok(())
    }

    /// Binds the circuit's counter-input ports: the pending upstream ends of
    /// the counter-flow clock chains, where the clock enters from outside.
    pub fn set_counter_inputs(&mut self, wires: Vec<CounterWire>) -> Result<(), CircuitError> {
        if self.counter_inputs_bound {
            return Err(CircuitError::AlreadyBound {
                what: "counter inputs".to_string(),
                circuit: self.name.clone(),
            });
        }
        if wires.len() != self.counter_inputs.len() {
            return Err(CircuitError::ArityMismatch {
                what: format!("counter inputs of circuit {:?}", self.name),
                expected: self.counter_inputs.len(),
                got: wires.len(),
            });
        }
        for wire in &wires {
            self.check_owner(wire.owner, &wire.net)?;
        }
        for (i, wire) in wires.into_iter().enumerate() {
            let net = self.consume_counter(wire)?;
            let target = self.counter_inputs[i].clone();
            self.rebind_net(&net, &target, PortSlot::CounterInput(i))?;
        }
        self.counter_inputs_bound = true;
        Ok(())
    }

    /// Seals the circuit, checking that every port is bound, no live handle
    /// was dropped, and every net has exactly one driver and one receiver.
    pub fn finalize(self) -> Result<SealedCircuit, CircuitError> {
        if !self.outputs_bound {
            return Err(CircuitError::UnboundPorts {
                circuit: self.name.clone(),
                missing: "outputs".to_string(),
            });
        }
        if !self.counter_inputs_bound {
            return Err(CircuitError::UnboundPorts {
                circuit: self.name.clone(),
                missing: "counter inputs".to_string(),
            });
        }
        // Loops left unbound fall through to the graph scan: the loop net
        // then has a consumer but no driver, which NoDriver reports.
        if let Some((net, _)) = self.live.values().next() {
            return Err(CircuitError::DanglingWire { net: net.clone() });
        }
        let data = CircuitData {
            name: self.name,
            inputs: self.inputs,
            outputs: self.outputs,
            loops: self.loops,
            counter_outputs: self.counter_outputs,
            counter_inputs: self.counter_inputs,
            gates: self.gates,
        };
        data.check_consistency()?;
        Ok(SealedCircuit {
            data: Arc::new(data),
        })
    }
}
