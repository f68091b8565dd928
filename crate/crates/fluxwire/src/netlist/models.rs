//! Behavioral Verilog stand-ins for the primitive cells, so a structural
//! netlist elaborates without the foundry library. Pulses are modeled as
//! short `1'b1` spikes on positive edges; clocked cells latch arrival flags
//! and decide on the clock edge, like their SFQ counterparts.

use crate::circuit::GateKind;

use super::CellNameMap;

/// Emission delay from clock (or input, for unclocked cells) to output
/// pulse, in Verilog time units.
const OUT_DELAY: u32 = 5;

fn pulse(target: &str, indent: &str, out: &mut Vec<String>) {
    out.push(format!("{indent}{target} <= #{OUT_DELAY} 1'b1;"));
    out.push(format!("{indent}{target} <= #{} 1'b0;", OUT_DELAY + 1));
}

fn two_input_clocked(name: &str, decide: &str, out: &mut Vec<String>) {
    out.push(format!("module {name} (a, b, clk, q);"));
    out.push("  input a, b, clk;".to_string());
    out.push("  output reg q;".to_string());
    out.push("  reg fa, fb;".to_string());
    out.push("  initial begin fa = 1'b0; fb = 1'b0; q = 1'b0; end".to_string());
    out.push("  always @(posedge a) fa <= 1'b1;".to_string());
    out.push("  always @(posedge b) fb <= 1'b1;".to_string());
    out.push("  always @(posedge clk) begin".to_string());
    out.push(format!("    if ({decide}) begin"));
    pulse("q", "      ", out);
    out.push("    end".to_string());
    out.push("    fa <= 1'b0;".to_string());
    out.push("    fb <= 1'b0;".to_string());
    out.push("  end".to_string());
    out.push("endmodule".to_string());
}

fn model(kind: GateKind, cells: &CellNameMap, out: &mut Vec<String>) {
    let name = cells.cell(kind);
    match kind {
        GateKind::And2 => two_input_clocked(name, "fa && fb", out),
        GateKind::Or2 => two_input_clocked(name, "fa || fb", out),
        GateKind::Xor => two_input_clocked(name, "fa ^ fb", out),
        GateKind::Not => {
            out.push(format!("module {name} (a, clk, q);"));
            out.push("  input a, clk;".to_string());
            out.push("  output reg q;".to_string());
            out.push("  reg fa;".to_string());
            out.push("  initial begin fa = 1'b0; q = 1'b0; end".to_string());
            out.push("  always @(posedge a) fa <= 1'b1;".to_string());
            out.push("  always @(posedge clk) begin".to_string());
            out.push("    if (!fa) begin".to_string());
            pulse("q", "      ", out);
            out.push("    end".to_string());
            out.push("    fa <= 1'b0;".to_string());
            out.push("  end".to_string());
            out.push("endmodule".to_string());
        }
        GateKind::Dff => {
            out.push(format!("module {name} (d, clk, q);"));
            out.push("  input d, clk;".to_string());
            out.push("  output reg q;".to_string());
            out.push("  reg fd;".to_string());
            out.push("  initial begin fd = 1'b0; q = 1'b0; end".to_string());
            out.push("  always @(posedge d) fd <= 1'b1;".to_string());
            out.push("  always @(posedge clk) begin".to_string());
            out.push("    if (fd) begin".to_string());
            pulse("q", "      ", out);
            out.push("    end".to_string());
            out.push("    fd <= 1'b0;".to_string());
            out.push("  end".to_string());
            out.push("endmodule".to_string());
        }
        GateKind::Buff => {
            out.push(format!("module {name} (a, q);"));
            out.push("  input a;".to_string());
            out.push("  output reg q;".to_string());
            out.push("  initial q = 1'b0;".to_string());
            out.push("  always @(posedge a) begin".to_string());
            pulse("q", "    ", out);
            out.push("  end".to_string());
            out.push("endmodule".to_string());
        }
        GateKind::Split => {
            out.push(format!("module {name} (a, q0, q1);"));
            out.push("  input a;".to_string());
            out.push("  output reg q0, q1;".to_string());
            out.push("  initial begin q0 = 1'b0; q1 = 1'b0; end".to_string());
            out.push("  always @(posedge a) begin".to_string());
            pulse("q0", "    ", out);
            pulse("q1", "    ", out);
            out.push("  end".to_string());
            out.push("endmodule".to_string());
        }
        GateKind::Ndro => {
            out.push(format!("module {name} (set, reset, read, q);"));
            out.push("  input set, reset, read;".to_string());
            out.push("  output reg q;".to_string());
            out.push("  reg state;".to_string());
            out.push("  initial begin state = 1'b0; q = 1'b0; end".to_string());
            out.push("  always @(posedge set) state <= 1'b1;".to_string());
            out.push("  always @(posedge reset) state <= 1'b0;".to_string());
            out.push("  always @(posedge read) begin".to_string());
            out.push("    if (state) begin".to_string());
            pulse("q", "      ", out);
            out.push("    end".to_string());
            out.push("  end".to_string());
            out.push("endmodule".to_string());
        }
    }
}

/// Emits behavioral Verilog modules for all eight primitive cells under the
/// names a [`CellNameMap`] assigns them, separated by blank lines.
pub fn emit_verilog_cell_models(cells: &CellNameMap) -> Vec<String> {
    let mut out = Vec::new();
    for (i, kind) in GateKind::ALL.iter().enumerate() {
        if i > 0 {
            out.push(String::new());
        }
        model(*kind, cells, &mut out);
    }
    out
}
