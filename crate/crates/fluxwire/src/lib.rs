//! Toolkit for single-flux-quantum (SFQ) circuit design.
//!
//! SFQ logic carries information as picosecond voltage pulses, and a pulse
//! emitted by one gate must be received by exactly one downstream gate. This
//! crate enforces that discipline at the type level: circuits are described
//! through affine wire handles that are consumed on use, so double-driving a
//! net is a compile error and a dangling net is caught when the circuit is
//! sealed.
//!
//! The crate is organized as a pipeline:
//!
//! * [`circuit`] — circuit construction: gates, splitter fan-out, feedback
//!   loops, counter-flow clock lines, and subcircuit instantiation.
//! * [`netlist`] — serialization of sealed circuits to SPICE subcircuit
//!   netlists and structural Verilog.
//! * [`sim`] — a discrete-event pulse simulator over flattened circuits.
//! * [`gf`] — arithmetic over GF(2^a) binary extension fields.
//! * [`rs`] — a software reference Reed–Solomon systematic encoder.
//! * [`encoder`] — a generated SFQ Reed–Solomon encoder circuit, verified
//!   against the software reference through pulse simulation.
//! * [`builtins`] — small ready-made example circuits.

pub mod builtins;
pub mod circuit;
pub mod encoder;
pub mod gf;
pub mod netlist;
pub mod rs;
pub mod sim;
