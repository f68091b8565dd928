//! Ready-made demonstration circuits used by the command-line tool and the
//! test suite: a half adder, a counter-flow clocked shift stage with a
//! feedback loop, and parametrized delay lines.

use crate::circuit::{Circuit, SealedCircuit};

/// A clocked half adder: `c = a AND b`, `s = a XOR b`.
///
/// Each input fans out through one splitter; the AND and XOR gates share
/// the split clock.
pub fn half_adder() -> SealedCircuit {
    let inputs = ["a", "b", "clk"];
    let outputs = ["c", "s"];
    let (mut circuit, [a, b, clk], [], []) =
        Circuit::create(inputs, outputs, [], [], [], "HalfAdder");
    let [clk1, clk2] = circuit.split(clk, None, None);
    let [a1, a2] = circuit.split(a, None, None);
    let [b1, b2] = circuit.split(b, None, None);
    let c = circuit.and(a1, b1, clk1, Some("c"));
    let s = circuit.xor(a2, b2, clk2, Some("s"));
    circuit.set_outputs([c, s]);
    circuit.sealed()
}

/// A counter-flow clocked pipeline stage with a feedback loop: an OR gate
/// merges the input with its own looped-back output, followed by two D
/// flip-flops.
///
/// The clock is threaded against the data direction: it enters at `clkin`,
/// clocks the most data-downstream flip-flop first, and leaves at `clkout`.
/// The loop is declared up front (`loop0`), consumed by the OR gate, and
/// closed by `set_loops` once the splitter that drives it exists.
pub fn counterflow_demo() -> SealedCircuit {
    let (mut c, [din], [loop0], [clkout]) = Circuit::create(
        ["din"],
        ["dout"],
        ["loop0"],
        ["clkout"],
        ["clkin"],
        "Advanced",
    );

    let (clk, clk0) = c.counter_split(clkout, None, None);
    let d = c.or(din, loop0, clk0, None);
    let (clk, clk0) = c.counter_split(clk, None, None);
    let d = c.dff(d, clk0, None);
    let (clkin, clk0) = c.counter_split(clk, Some("clkin"), None);
    let d = c.dff(d, clk0, None);
    let [dout, loop0] = c.split(d, Some("dout"), Some("loop0"));
    c.set_outputs([dout]);
    c.set_loops([loop0]);
    c.set_counter_inputs([clkin]);
    c.sealed()
}

/// A delay line of `n` chained BUFF gates (named `delay<n>`), still under
/// construction so it can be instantiated into other circuits.
pub fn delay_circuit(n: u32) -> Circuit<1, 1, 0, 0, 0> {
    assert!(n >= 1, "a delay line needs at least one buffer");
    let name = format!("delay{n}");
    let (mut c, [mut a], [], []) = Circuit::create(["a"], ["q"], [], [], [], &name);
    for i in 0..n {
        let name = if i == n - 1 { Some("q") } else { None };
        a = c.buff(a, name);
    }
    c.set_outputs([a]);
    c
}

/// A sealed delay line of `n` BUFF gates.
pub fn delay(n: u32) -> SealedCircuit {
    delay_circuit(n).sealed()
}

/// A two-stage shift register whose clock is delayed by five buffers before
/// each stage, built by instantiating the same `delay5` subcircuit twice.
pub fn delay_demo() -> SealedCircuit {
    let delay5 = delay_circuit(5);
    let (mut c, [d, clk], [], []) =
        Circuit::create(["din", "clk"], ["dout"], [], [], [], "main");
    let ([clk], []) = c.subcircuit(&delay5, [clk], [], [None], []);
    let [clk, clk1] = c.split(clk, None, None);
    let d = c.dff(d, clk1, None);
    let ([clk], []) = c.subcircuit(&delay5, [clk], [], [None], []);
    let d = c.dff(d, clk, Some("dout"));
    c.set_outputs([d]);
    c.sealed()
}
