//! Word-wide datapath gating built from NDRO cells.
//!
//! One `set` pulse opens the bank and one `reset` pulse shuts it; while
//! open, each data pulse passes straight through the clockless NDRO read
//! path. The encoder uses this to cut the multiplier feed after the last
//! message symbol so the registers drain their parity remainder undisturbed.

use crate::circuit::{CircuitBuilder, CircuitError, SealedCircuit};

use super::{ceil_log2, spread_clock};

/// Splitter depth of the `set`/`reset` fan-out for a bank of `width` cells.
/// A control pulse reaches every latch this many gate delays after the port.
pub(crate) fn ctl_tree_depth(width: usize) -> u32 {
    ceil_log2(width as u64)
}

/// Builds a sealed `width`-bit gating bank.
///
/// Ports: inputs `set`, `reset`, `d0..d{width-1}`; outputs `q0..q{width-1}`.
/// The control pulses fan out through balanced splitter trees so that all
/// latches switch together; the data pins go straight into the NDRO read
/// inputs, adding a single gate delay and no clocked stage.
pub fn build_gating_bank(width: usize) -> Result<SealedCircuit, CircuitError> {
    assert!(width >= 1);
    let mut in_names = vec!["set".to_string(), "reset".to_string()];
    in_names.extend((0..width).map(|i| format!("d{i}")));
    let out_names: Vec<String> = (0..width).map(|i| format!("q{i}")).collect();
    let ins: Vec<&str> = in_names.iter().map(String::as_str).collect();
    let outs: Vec<&str> = out_names.iter().map(String::as_str).collect();
    let name = format!("gating{width}");
    let (mut b, mut inputs, _, _) = CircuitBuilder::create(&name, &ins, &outs, &[], &[], &[])?;

    let data_wires = inputs.split_off(2);
    let reset = inputs.pop().expect("reset port");
    let set = inputs.pop().expect("set port");
    let (set_taps, _) = spread_clock(&mut b, set, &vec![0; width], 0)?;
    let (reset_taps, _) = spread_clock(&mut b, reset, &vec![0; width], 0)?;

    let mut outputs = Vec::with_capacity(width);
    for ((d, s), r) in data_wires.into_iter().zip(set_taps).zip(reset_taps) {
        outputs.push(b.ndro(s, r, d, None)?);
    }
    b.set_outputs(outputs)?;
    b.finalize()
}
