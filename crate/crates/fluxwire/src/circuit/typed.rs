//! Const-generic facade over [`CircuitBuilder`]: port counts live in the
//! type, so binding the wrong number of outputs or instantiating a
//! subcircuit with the wrong number of wires is a compile error, not a
//! runtime one.

use std::cell::RefCell;

use super::{CircuitBuilder, CircuitError, CounterWire, SealedCircuit, Wire};
use crate::netlist::{self, CellNameMap};

enum State {
    Building(CircuitBuilder),
    Sealed(SealedCircuit),
    /// A finalize attempt consumed the builder and failed.
    Spent,
}

/// A circuit under construction with `N` inputs, `M` outputs, `L` loops,
/// `O` counter outputs, and `P` counter inputs.
///
/// Gate operations panic on invalid use (name collisions, foreign wires);
/// [`Circuit::try_sealed`] reports finalize-time wiring faults as values.
/// See the [module docs](crate::circuit) for a worked example.
pub struct Circuit<const N: usize, const M: usize, const L: usize, const O: usize, const P: usize>
{
    state: RefCell<State>,
}

fn expect_op<T>(result: Result<T, CircuitError>) -> T {
    result.unwrap_or_else(|e| panic!("invalid circuit operation: {e}"))
}

fn into_array<T: std::fmt::Debug, const K: usize>(items: Vec<T>) -> [T; K] {
    items
        .try_into()
        .expect("builder port arity always matches the const parameters")
}

impl<const N: usize, const M: usize, const L: usize, const O: usize, const P: usize>
    Circuit<N, M, L, O, P>
{
    /// Starts a circuit and hands out the wires available from the start:
    /// one per input, the upper end of each loop, and the downstream end of
    /// each counter-output clock net.
    pub fn create(
        inputs: [&str; N],
        outputs: [&str; M],
        loops: [&str; L],
        counter_outputs: [&str; O],
        counter_inputs: [&str; P],
        name: &str,
    ) -> (Self, [Wire; N], [Wire; L], [CounterWire; O]) {
        let (builder, ins, lps, couts) = expect_op(CircuitBuilder::create(
            name,
            &inputs,
            &outputs,
            &loops,
            &counter_outputs,
            &counter_inputs,
        ));
        (
            Circuit {
                state: RefCell::new(State::Building(builder)),
            },
            into_array(ins),
            into_array(lps),
            into_array(couts),
        )
    }

    fn building(&mut self) -> &mut CircuitBuilder {
        match self.state.get_mut() {
            State::Building(builder) => builder,
            _ => panic!("circuit can no longer be described: it was already sealed"),
        }
    }

    /// Places a splitter and returns both output wires.
    pub fn split(&mut self, a: Wire, name0: Option<&str>, name1: Option<&str>) -> [Wire; 2] {
        expect_op(self.building().split(a, name0, name1))
    }

    /// Places a clocked AND gate.
    pub fn and(&mut self, a: Wire, b: Wire, clk: Wire, name: Option<&str>) -> Wire {
        expect_op(self.building().and(a, b, clk, name))
    }

    /// Places a clocked OR gate.
    pub fn or(&mut self, a: Wire, b: Wire, clk: Wire, name: Option<&str>) -> Wire {
        expect_op(self.building().or(a, b, clk, name))
    }

    /// Places a clocked XOR gate.
    pub fn xor(&mut self, a: Wire, b: Wire, clk: Wire, name: Option<&str>) -> Wire {
        expect_op(self.building().xor(a, b, clk, name))
    }

    /// Places a clocked NOT gate.
    pub fn not(&mut self, a: Wire, clk: Wire, name: Option<&str>) -> Wire {
        expect_op(self.building().not(a, clk, name))
    }

    /// Places a D flip-flop.
    pub fn dff(&mut self, d: Wire, clk: Wire, name: Option<&str>) -> Wire {
        expect_op(self.building().dff(d, clk, name))
    }

    /// Places an unclocked buffer.
    pub fn buff(&mut self, a: Wire, name: Option<&str>) -> Wire {
        expect_op(self.building().buff(a, name))
    }

    /// Places a non-destructive read-out cell.
    pub fn ndro(&mut self, set: Wire, reset: Wire, read: Wire, name: Option<&str>) -> Wire {
        expect_op(self.building().ndro(set, reset, read, name))
    }

    /// Splits a counter-flow clock net: consumes the downstream end,
    /// returns the next upstream handle and a forward tap for one gate's
    /// clock pin.
    pub fn counter_split(
        &mut self,
        downstream: CounterWire,
        upstream_name: Option<&str>,
        tap_name: Option<&str>,
    ) -> (CounterWire, Wire) {
        expect_op(
            self.building()
                .counter_split(downstream, upstream_name, tap_name),
        )
    }

    /// Buffers a counter-flow clock net: consumes the downstream end and
    /// returns the next upstream handle.
    pub fn counter_buff(
        &mut self,
        downstream: CounterWire,
        upstream_name: Option<&str>,
    ) -> CounterWire {
        expect_op(self.building().counter_buff(downstream, upstream_name))
    }

    /// Binds the output ports, in declaration order.
    pub fn set_outputs(&mut self, wires: [Wire; M]) {
        expect_op(self.building().set_outputs(wires.into_iter().collect()))
    }

    /// Closes the feedback loops declared at creation.
    pub fn set_loops(&mut self, wires: [Wire; L]) {
        expect_op(self.building().set_loops(wires.into_iter().collect()))
    }

    /// Binds the counter-input ports: where the clock enters from outside.
    pub fn set_counter_inputs(&mut self, wires: [CounterWire; P]) {
        expect_op(
            self.building()
                .set_counter_inputs(wires.into_iter().collect()),
        )
    }

    /// Instantiates another circuit, sealing it first if necessary.
    ///
    /// The instance receives `inputs` on the sub's data inputs and becomes
    /// the pending driver of each wire in `counter_sinks` (one per sub
    /// counter output). It returns one fresh wire per sub data output and
    /// one fresh counter-flow handle per sub counter input, so a clocked
    /// subcircuit threads into the parent's clock chain exactly like a
    /// single counter gate.
    #[allow(clippy::type_complexity)]
    pub fn subcircuit<
        const N2: usize,
        const M2: usize,
        const L2: usize,
        const O2: usize,
        const P2: usize,
    >(
        &mut self,
        sub: &Circuit<N2, M2, L2, O2, P2>,
        inputs: [Wire; N2],
        counter_sinks: [CounterWire; O2],
        output_names: [Option<&str>; M2],
        counter_input_names: [Option<&str>; P2],
    ) -> ([Wire; M2], [CounterWire; P2]) {
        let sealed = sub.sealed();
        let (outs, counter_ups) = expect_op(self.building().instantiate(
            &sealed,
            inputs.into_iter().collect(),
            counter_sinks.into_iter().collect(),
            &output_names,
            &counter_input_names,
        ));
        (into_array(outs), into_array(counter_ups))
    }

    /// Seals the circuit (idempotent), panicking if it is inconsistent.
    pub fn sealed(&self) -> SealedCircuit {
        self.try_sealed()
            .unwrap_or_else(|e| panic!("circuit is not consistent: {e}"))
    }

    /// Seals the circuit (idempotent), reporting wiring faults as values.
    ///
    /// Finalizing consumes the builder, so after an `Err` the circuit
    /// cannot be described further; inspect the error instead.
    pub fn try_sealed(&self) -> Result<SealedCircuit, CircuitError> {
        let mut state = self.state.borrow_mut();
        if let State::Sealed(sealed) = &*state {
            return Ok(sealed.clone());
        }
        match std::mem::replace(&mut *state, State::Spent) {
            State::Building(builder) => {
                let sealed = builder.finalize()?;
                *state = State::Sealed(sealed.clone());
                Ok(sealed)
            }
            State::Sealed(_) => unreachable!("handled above"),
            State::Spent => panic!("circuit was consumed by an earlier failed seal"),
        }
    }

    /// Emits the SPICE netlist (sealing on demand) with default cell names.
    pub fn to_spice(&self) -> Vec<String> {
        netlist::to_spice(&self.sealed(), &CellNameMap::default())
    }

    /// Emits the structural Verilog netlist (sealing on demand) with
    /// default cell names.
    pub fn to_verilog(&self) -> Vec<String> {
        netlist::to_verilog(&self.sealed(), &CellNameMap::default())
    }
}
