//! Netlist emission: SPICE subcircuit decks and structural Verilog.
//!
//! Both emitters work on sealed [`CircuitData`], walk the subcircuit
//! hierarchy in dependency order (each definition before its first use,
//! deduplicated by name), and map primitive gates to library cell names
//! through a [`CellNameMap`].

mod models;

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::circuit::{CircuitData, GateKind, InstanceKind};

pub use models::emit_verilog_cell_models;

/// Errors from cell-name override parsing.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetlistError {
    /// An override referred to a gate kind that does not exist.
    #[error("unknown cell key {key:?}; expected one of AND2, OR2, XOR, NOT, DFF, BUFF, SPLIT, NDRO")]
    UnknownCellKey {
        /// The unrecognized key.
        key: String,
    },
    /// An override line was not of the form `KEY=VALUE`.
    #[error("malformed cell override {line:?}; expected KEY=VALUE")]
    BadOverride {
        /// The offending line.
        line: String,
    },
}

/// Maps each primitive gate kind to the library cell name used in emitted
/// netlists. Defaults to the `THmitll_*` cell family.
#[derive(Debug, Clone)]
pub struct CellNameMap {
    cells: Vec<(GateKind, String)>,
}

impl Default for CellNameMap {
    fn default() -> CellNameMap {
        CellNameMap {
            cells: GateKind::ALL
                .iter()
                .map(|&kind| (kind, kind.default_cell().to_string()))
                .collect(),
        }
    }
}

impl CellNameMap {
    /// The cell name for a gate kind.
    pub fn cell(&self, kind: GateKind) -> &str {
        &self
            .cells
            .iter()
            .find(|(k, _)| *k == kind)
            .expect("every gate kind has a default cell")
            .1
    }

    /// Replaces the cell name for a gate kind.
    pub fn set(&mut self, kind: GateKind, name: impl Into<String>) {
        let entry = self
            .cells
            .iter_mut()
            .find(|(k, _)| *k == kind)
            .expect("every gate kind has a default cell");
        entry.1 = name.into();
    }

    /// The override key naming a gate kind (`AND2`, `OR2`, `XOR`, `NOT`,
    /// `DFF`, `BUFF`, `SPLIT`, `NDRO`).
    pub fn kind_for_key(key: &str) -> Option<GateKind> {
        match key {
            "AND2" => Some(GateKind::And2),
            "OR2" => Some(GateKind::Or2),
            "XOR" => Some(GateKind::Xor),
            "NOT" => Some(GateKind::Not),
            "DFF" => Some(GateKind::Dff),
            "BUFF" => Some(GateKind::Buff),
            "SPLIT" => Some(GateKind::Split),
            "NDRO" => Some(GateKind::Ndro),
            _ => None,
        }
    }

    /// Applies one `KEY=VALUE` override.
    pub fn apply_override(&mut self, entry: &str) -> Result<(), NetlistError> {
        let (key, value) = entry.split_once('=').ok_or_else(|| NetlistError::BadOverride {
            line: entry.to_string(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(NetlistError::BadOverride {
                line: entry.to_string(),
            });
        }
        let kind = CellNameMap::kind_for_key(key).ok_or_else(|| NetlistError::UnknownCellKey {
            key: key.to_string(),
        })?;
        self.set(kind, value);
        Ok(())
    }

    /// Parses a whole override file: one `KEY=VALUE` per line, `#` comments
    /// and blank lines ignored. Starts from the defaults.
    pub fn parse_overrides(text: &str) -> Result<CellNameMap, NetlistError> {
        let mut map = CellNameMap::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            map.apply_override(line)?;
        }
        Ok(map)
    }
}

/// Collects the subcircuit definitions a circuit depends on, each before its
/// first use, deduplicated by circuit name. The top circuit itself is not
/// included.
fn dependencies(top: &CircuitData) -> Vec<Arc<CircuitData>> {
    let mut seen: BTreeSet<String> = BTreeSet::new();
    seen.insert(top.name().to_string());
    let mut ordered = Vec::new();
    collect_deps(top, &mut seen, &mut ordered, 0);
    ordered
}

fn collect_deps(
    data: &CircuitData,
    seen: &mut BTreeSet<String>,
    ordered: &mut Vec<Arc<CircuitData>>,
    depth: usize,
) {
    assert!(depth <= 64, "subcircuit hierarchy deeper than 64 levels");
    for gate in data.gates() {
        if let InstanceKind::Sub(sub) = &gate.kind {
            if seen.insert(sub.name().to_string()) {
                collect_deps(sub, seen, ordered, depth + 1);
                ordered.push(Arc::clone(sub));
            }
        }
    }
}

fn spice_block(data: &CircuitData, cells: &CellNameMap, out: &mut Vec<String>) {
    let mut header = format!(".subckt {}", data.name());
    for net in data.header_nets() {
        header.push(' ');
        header.push_str(net);
    }
    out.push(header);
    for gate in data.gates() {
        let cell = match &gate.kind {
            InstanceKind::Gate(kind) => cells.cell(*kind).to_string(),
            InstanceKind::Sub(sub) => sub.name().to_string(),
        };
        let mut line = gate.label.clone();
        for pin in &gate.pins {
            line.push(' ');
            line.push_str(pin);
        }
        line.push(' ');
        line.push_str(&cell);
        out.push(line);
    }
    out.push(".ends".to_string());
}

/// Emits a SPICE netlist for a sealed circuit: any subcircuit definitions
/// first (dependency order), then the circuit itself, blocks separated by a
/// blank line.
pub fn to_spice(data: &CircuitData, cells: &CellNameMap) -> Vec<String> {
    let mut out = Vec::new();
    for dep in dependencies(data) {
        spice_block(&dep, cells, &mut out);
        out.push(String::new());
    }
    spice_block(data, cells, &mut out);
    out
}

/// Internal nets of a circuit (not ports), in first-appearance order.
fn internal_nets(data: &CircuitData) -> Vec<String> {
    let ports: BTreeSet<&str> = data.header_nets().into_iter().collect();
    let mut seen = BTreeSet::new();
    let mut nets = Vec::new();
    for gate in data.gates() {
        for pin in &gate.pins {
            if !ports.contains(pin.as_str()) && seen.insert(pin.clone()) {
                nets.push(pin.clone());
            }
        }
    }
    nets
}

fn decl_lines(keyword: &str, nets: &[String], out: &mut Vec<String>) {
    // Chunked so wide circuits stay readable.
    for chunk in nets.chunks(10) {
        out.push(format!("  {keyword} {};", chunk.join(", ")));
    }
}

fn verilog_module(data: &CircuitData, cells: &CellNameMap, out: &mut Vec<String>) {
    let header = data.header_nets().join(", ");
    out.push(format!("module {} ({});", data.name(), header));

    let dir_in: Vec<String> = data
        .inputs()
        .iter()
        .chain(data.counter_inputs())
        .cloned()
        .collect();
    let dir_out: Vec<String> = data
        .outputs()
        .iter()
        .chain(data.counter_outputs())
        .cloned()
        .collect();
    decl_lines("input", &dir_in, out);
    decl_lines("output", &dir_out, out);
    decl_lines("wire", &internal_nets(data), out);

    if !data.gates().is_empty() {
        out.push(String::new());
    }
    for gate in data.gates() {
        let (cell, pin_names): (String, Vec<String>) = match &gate.kind {
            InstanceKind::Gate(kind) => (
                cells.cell(*kind).to_string(),
                kind.pin_names().iter().map(|s| s.to_string()).collect(),
            ),
            InstanceKind::Sub(sub) => (
                sub.name().to_string(),
                sub.header_nets().iter().map(|s| s.to_string()).collect(),
            ),
        };
        let conns: Vec<String> = pin_names
            .iter()
            .zip(&gate.pins)
            .map(|(name, net)| format!(".{name}({net})"))
            .collect();
        out.push(format!("  {cell} {} ({});", gate.label, conns.join(", ")));
    }
    out.push("endmodule".to_string());
}

/// Emits a structural Verilog netlist for a sealed circuit: any subcircuit
/// modules first (dependency order), then the circuit itself.
///
/// Port directions follow the pulse flow seen from outside: inputs and
/// counter inputs are `input` (pulses enter there), outputs and counter
/// outputs are `output` (pulses leave there).
pub fn to_verilog(data: &CircuitData, cells: &CellNameMap) -> Vec<String> {
    let mut out = Vec::new();
    for dep in dependencies(data) {
        verilog_module(&dep, cells, &mut out);
        out.push(String::new());
    }
    verilog_module(data, cells, &mut out);
    out
}
