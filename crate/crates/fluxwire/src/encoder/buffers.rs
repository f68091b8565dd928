//! Word-interleaving input buffers.
//!
//! Each of the four data streams gets its own FIFO of DFF chains, one chain
//! per bit, loaded and drained by that stream's private `sclk`. A clocked
//! OR merge tree driven by the shared datapath clock then combines the four
//! stream fronts onto one word bus: the run schedule pops the streams
//! round-robin, one stream per clock wave, so the merge never sees two
//! words at once and the bus carries the streams perfectly interleaved.

use crate::circuit::{CircuitBuilder, CircuitError, SealedCircuit, Wire};

use super::{ceil_log2, spread_clock, EncoderConfig};

/// Splitter depth of one stream's shift-clock tree: `sclk` reaches every
/// DFF of that stream this many gate delays after the port.
pub(crate) fn sclk_tree_depth(cfg: &EncoderConfig) -> u32 {
    let a = cfg.params.ctx().width() as usize;
    ceil_log2((a * cfg.buffer_depth) as u64)
}

/// Splitter depth of the merge-clock tree over the `width * (streams - 1)`
/// OR gates in the merge.
pub(crate) fn merge_clock_depth(width: usize, streams: usize) -> u32 {
    ceil_log2((width * (streams - 1)) as u64)
}

/// Builds the sealed buffer bank for `cfg`.
///
/// Ports: inputs `d{s}_{b}` for stream `s` bit `b`, then `sclk0..3`, then
/// `mclk`; outputs `m0..m{a-1}`. A pulse on `sclk{s}` shifts stream `s` by
/// one word. Data pulses load straight into the rearmost DFFs, so filling
/// a buffer interleaves `buffer_depth` data words with `buffer_depth - 1`
/// shifts (one fewer, or the oldest word would fall out the front during
/// loading); each later shift emits the oldest stored word at the chain
/// fronts into the merge, whose ORs capture it for the next `mclk` wave.
pub fn build_input_buffers(cfg: &EncoderConfig) -> Result<SealedCircuit, CircuitError> {
    let a = cfg.params.ctx().width() as usize;
    let streams = cfg.interleave_depth;
    let depth = cfg.buffer_depth;
    assert!(streams.is_power_of_two(), "merge pairs streams level by level");
    assert!(depth >= 1);

    let mut in_names: Vec<String> = Vec::new();
    for s in 0..streams {
        for bit in 0..a {
            in_names.push(format!("d{s}_{bit}"));
        }
    }
    in_names.extend((0..streams).map(|s| format!("sclk{s}")));
    in_names.push("mclk".to_string());
    let out_names: Vec<String> = (0..a).map(|bit| format!("m{bit}")).collect();
    let ins: Vec<&str> = in_names.iter().map(String::as_str).collect();
    let outs: Vec<&str> = out_names.iter().map(String::as_str).collect();
    let (mut b, mut inputs, _, _) = CircuitBuilder::create("buffers", &ins, &outs, &[], &[], &[])?;

    let mclk = inputs.pop().expect("mclk port");
    let sclks = inputs.split_off(streams * a);
    let data = inputs;

    // Per-stream FIFO: a DFF chain per bit, every stage clocked from one
    // balanced tree so the whole stream shifts as a unit.
    let mut fronts: Vec<Vec<Wire>> = Vec::with_capacity(streams);
    let mut data = data.into_iter();
    for sclk in sclks {
        let (taps, _) = spread_clock(&mut b, sclk, &vec![0; a * depth], 0)?;
        let mut taps = taps.into_iter();
        let mut front = Vec::with_capacity(a);
        for _bit in 0..a {
            let mut w = data.next().expect("one data port per bit");
            for _stage in 0..depth {
                w = b.dff(w, taps.next().expect("one tap per stage"), None)?;
            }
            front.push(w);
        }
        fronts.push(front);
    }

    // Merge: pair the stream fronts bit-wise through clocked OR levels.
    let n_or = a * (streams - 1);
    let (mtaps, _) = spread_clock(&mut b, mclk, &vec![0; n_or], 0)?;
    let mut mtaps = mtaps.into_iter();
    let mut outputs = Vec::with_capacity(a);
    for _bit in 0..a {
        // Taking index 0 each round hands out the fronts bit 0 first.
        let mut level: Vec<Wire> = fronts.iter_mut().map(|f| f.remove(0)).collect();
        debug_assert_eq!(level.len(), streams);
        while level.len() > 1 {
            let mut next = Vec::with_capacity(level.len() / 2);
            let mut it = level.into_iter();
            while let (Some(x), Some(y)) = (it.next(), it.next()) {
                next.push(b.or(x, y, mtaps.next().expect("one tap per OR"), None)?);
            }
            level = next;
        }
        outputs.push(level.pop().expect("merged bit"));
    }
    b.set_outputs(outputs)?;
    b.finalize()
}
