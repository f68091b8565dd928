//! Finalize-time graph checks: every net must have exactly one driver and
//! exactly one receiver once port contributions are counted in.

use std::collections::BTreeMap;

use super::{CircuitData, CircuitError};

#[derive(Default, Clone, Copy)]
struct NetUse {
    drivers: usize,
    receivers: usize,
}

impl CircuitData {
    /// Verifies the one-driver/one-receiver invariant over the whole
    /// circuit.
    ///
    /// Ports count from the outside's perspective: inputs and counter inputs
    /// drive their net (a pulse enters the circuit there), outputs and
    /// counter outputs receive theirs. Subcircuit instances count like
    /// gates: they receive on the sub's inputs and counter inputs and drive
    /// on its outputs and counter outputs.
    ///
    /// `finalize` runs this automatically; it is public so that circuit data
    /// assembled by hand (or deliberately corrupted, in tests) can be put
    /// through the same checks.
    pub fn check_consistency(&self) -> Result<(), CircuitError> {
        let mut seen_ports = BTreeMap::new();
        for port in self.header_nets() {
            if seen_ports.insert(port, ()).is_some() {
                return Err(CircuitError::NameCollision {
                    name: port.to_string(),
                });
            }
        }

        // Net usage counts, visited in first-appearance order so error
        // reports are deterministic.
        let mut order: Vec<String> = Vec::new();
        let mut usage: BTreeMap<String, NetUse> = BTreeMap::new();
        fn touch<'a>(
            order: &mut Vec<String>,
            usage: &'a mut BTreeMap<String, NetUse>,
            net: &str,
        ) -> &'a mut NetUse {
            if !usage.contains_key(net) {
                order.push(net.to_string());
            }
            usage.entry(net.to_string()).or_default()
        }

        for net in self.inputs().iter().chain(self.counter_inputs()) {
            touch(&mut order, &mut usage, net).drivers += 1;
        }
        for net in self.outputs().iter().chain(self.counter_outputs()) {
            touch(&mut order, &mut usage, net).receivers += 1;
        }

        for gate in self.gates() {
            if gate.pins.len() != gate.expected_pins() {
                return Err(CircuitError::ArityMismatch {
                    what: format!("pins of instance {:?}", gate.label),
                    expected: gate.expected_pins(),
                    got: gate.pins.len(),
                });
            }
            let (receives, drives) = gate.pin_roles();
            for idx in receives {
                touch(&mut order, &mut usage, &gate.pins[idx]).receivers += 1;
            }
            for idx in drives {
                touch(&mut order, &mut usage, &gate.pins[idx]).drivers += 1;
            }
        }

        // A declared loop net must actually exist in the graph.
        for name in self.loops() {
            if !usage.contains_key(name) {
                return Err(CircuitError::NoDriver { net: name.clone() });
            }
        }

        for net in &order {
            let count = usage[net];
            if count.drivers == 0 {
                return Err(CircuitError::NoDriver { net: net.clone() });
            }
            if count.drivers > 1 {
                return Err(CircuitError::DoubleDriver { net: net.clone() });
            }
            if count.receivers == 0 {
                return Err(CircuitError::DanglingWire { net: net.clone() });
            }
            if count.receivers > 1 {
                return Err(CircuitError::DoubleReceiver { net: net.clone() });
            }
        }
        Ok(())
    }
}
