//! Hierarchy flattening: subcircuit instances are inlined recursively until
//! only primitive gates remain.

use std::collections::BTreeMap;

use crate::circuit::{CircuitData, GateInstance, InstanceKind};

use super::SimError;

/// Subcircuit nesting deeper than this aborts flattening; legitimately
/// built hierarchies never approach it, so hitting the limit means the data
/// was assembled into a cycle by hand.
pub const MAX_DEPTH: usize = 64;

/// Inlines every subcircuit instance, producing an equivalent circuit of
/// primitive gates only.
///
/// Nets and labels internal to an instance are prefixed with the instance
/// label and a slash (`Xdelay51/_a_0`); nets bound to the instance's ports
/// take the parent net name unchanged, so the flat circuit's ports and port
///-adjacent connectivity read exactly like the hierarchical one.
pub fn flatten(data: &CircuitData) -> Result<CircuitData, SimError> {
    let mut gates = Vec::new();
    let mut loops = data.loops().to_vec();
    inline(data, &BTreeMap::new(), "", 0, &mut gates, &mut loops)?;
    Ok(CircuitData::from_parts(
        data.name(),
        data.inputs().to_vec(),
        data.outputs().to_vec(),
        loops,
        data.counter_outputs().to_vec(),
        data.counter_inputs().to_vec(),
        gates,
    ))
}

fn inline(
    data: &CircuitData,
    port_map: &BTreeMap<String, String>,
    prefix: &str,
    depth: usize,
    gates: &mut Vec<GateInstance>,
    loops: &mut Vec<String>,
) -> Result<(), SimError> {
    if depth > MAX_DEPTH {
        return Err(SimError::CyclicHierarchy { limit: MAX_DEPTH });
    }
    let resolve = |net: &str| -> String {
        port_map
            .get(net)
            .cloned()
            .unwrap_or_else(|| format!("{prefix}{net}"))
    };
    for gate in data.gates() {
        match &gate.kind {
            InstanceKind::Gate(kind) => {
                gates.push(GateInstance {
                    label: format!("{prefix}{}", gate.label),
                    kind: InstanceKind::Gate(*kind),
                    pins: gate.pins.iter().map(|p| resolve(p)).collect(),
                });
            }
            InstanceKind::Sub(sub) => {
                let sub_prefix = format!("{prefix}{}/", gate.label);
                let sub_map: BTreeMap<String, String> = sub
                    .header_nets()
                    .into_iter()
                    .zip(&gate.pins)
                    .map(|(port, pin)| (port.to_string(), resolve(pin)))
                    .collect();
                for name in sub.loops() {
                    loops.push(format!("{sub_prefix}{name}"));
                }
                inline(sub, &sub_map, &sub_prefix, depth + 1, gates, loops)?;
            }
        }
    }
    Ok(())
}
