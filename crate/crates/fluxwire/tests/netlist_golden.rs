//! Netlist emission against known-good outputs: SPICE decks, structural
//! Verilog, hierarchy ordering, and cell-name overrides.

use fluxwire::builtins;
use fluxwire::circuit::CircuitData;
use fluxwire::netlist::{self, emit_verilog_cell_models, CellNameMap, NetlistError};

#[test]
fn half_adder_spice_matches_reference() {
    let expected = [
        ".subckt HalfAdder a b clk c s",
        "XSPLIT1 clk _clk_0 _clk_1 THmitll_SPLIT",
        "XSPLIT2 a _a_0 _a_1 THmitll_SPLIT",
        "XSPLIT3 b _b_0 _b_1 THmitll_SPLIT",
        "XAND4 _a_0 _b_0 _clk_0 c THmitll_AND2",
        "XXOR5 _a_1 _b_1 _clk_1 s THmitll_XOR",
        ".ends",
    ];
    let lines = netlist::to_spice(&builtins::half_adder(), &CellNameMap::default());
    assert_eq!(lines, expected);
}

#[test]
fn delay_line_spice_matches_reference() {
    let expected = [
        ".subckt delay5 a q",
        "XBUFF1 a _a_0 THmitll_BUFF",
        "XBUFF2 _a_0 _a_1 THmitll_BUFF",
        "XBUFF3 _a_1 _a_2 THmitll_BUFF",
        "XBUFF4 _a_2 _a_3 THmitll_BUFF",
        "XBUFF5 _a_3 q THmitll_BUFF",
        ".ends",
    ];
    let lines = netlist::to_spice(&builtins::delay(5), &CellNameMap::default());
    assert_eq!(lines, expected);
}

/// A circuit that instantiates the same subcircuit twice emits its
/// definition once, before the parent, separated by a blank line.
#[test]
fn hierarchy_emits_each_definition_once() {
    let expected = [
        ".subckt delay5 a q",
        "XBUFF1 a _a_0 THmitll_BUFF",
        "XBUFF2 _a_0 _a_1 THmitll_BUFF",
        "XBUFF3 _a_1 _a_2 THmitll_BUFF",
        "XBUFF4 _a_2 _a_3 THmitll_BUFF",
        "XBUFF5 _a_3 q THmitll_BUFF",
        ".ends",
        "",
        ".subckt main din clk dout",
        "Xdelay51 clk _clk_0 delay5",
        "XSPLIT2 _clk_0 _clk_1 _clk_2 THmitll_SPLIT",
        "XDFF3 din _clk_2 _din_0 THmitll_DFF",
        "Xdelay54 _clk_1 _clk_3 delay5",
        "XDFF5 _din_0 _clk_3 dout THmitll_DFF",
        ".ends",
    ];
    let lines = netlist::to_spice(&builtins::delay_demo(), &CellNameMap::default());
    assert_eq!(lines, expected);
}

#[test]
fn counterflow_demo_spice_threads_the_clock_backwards() {
    let expected = [
        ".subckt Advanced din dout clkout clkin",
        "XSPLIT1 _clkout_0 _clkout_1 clkout THmitll_SPLIT",
        "XOR2 din loop0 _clkout_1 _din_0 THmitll_OR2",
        "XSPLIT3 _clkout_2 _clkout_3 _clkout_0 THmitll_SPLIT",
        "XDFF4 _din_0 _clkout_3 _din_1 THmitll_DFF",
        "XSPLIT5 clkin _clkout_4 _clkout_2 THmitll_SPLIT",
        "XDFF6 _din_1 _clkout_4 _din_2 THmitll_DFF",
        "XSPLIT7 _din_2 dout loop0 THmitll_SPLIT",
        ".ends",
    ];
    let lines = netlist::to_spice(&builtins::counterflow_demo(), &CellNameMap::default());
    assert_eq!(lines, expected);
}

/// Verilog port directions follow pulse flow: data inputs and counter
/// inputs are `input` (the clock enters at clkin), outputs and counter
/// outputs are `output` (the clock leaves at clkout).
#[test]
fn verilog_directions_follow_pulse_flow() {
    let lines = netlist::to_verilog(&builtins::counterflow_demo(), &CellNameMap::default());
    assert_eq!(lines[0], "module Advanced (din, dout, clkout, clkin);");
    assert_eq!(lines[1], "  input din, clkin;");
    assert_eq!(lines[2], "  output dout, clkout;");
    assert!(lines[3].starts_with("  wire "));
    assert!(lines[3].contains("loop0"));
    assert!(lines
        .iter()
        .any(|l| l == "  THmitll_OR2 XOR2 (.a(din), .b(loop0), .clk(_clkout_1), .q(_din_0));"));
    assert_eq!(lines.last().unwrap(), "endmodule");
}

#[test]
fn verilog_hierarchy_uses_port_name_connections() {
    let lines = netlist::to_verilog(&builtins::delay_demo(), &CellNameMap::default());
    // The delay5 module comes first, then the parent references it by
    // its port names.
    assert_eq!(lines[0], "module delay5 (a, q);");
    assert!(lines
        .iter()
        .any(|l| l == "  delay5 Xdelay51 (.a(clk), .q(_clk_0));"));
    assert!(lines
        .iter()
        .any(|l| l == "  delay5 Xdelay54 (.a(_clk_1), .q(_clk_3));"));
}

/// SPICE and Verilog list the same instances with the same pin nets.
#[test]
fn spice_and_verilog_agree_on_connectivity() {
    let sealed = builtins::counterflow_demo();
    let cells = CellNameMap::default();
    let spice = netlist::to_spice(&sealed, &cells);
    let verilog = netlist::to_verilog(&sealed, &cells);

    // SPICE: "<label> <pins...> <cell>" on every X line.
    let mut spice_insts: Vec<(String, Vec<String>)> = spice
        .iter()
        .filter(|l| l.starts_with('X'))
        .map(|l| {
            let mut toks: Vec<String> = l.split_whitespace().map(|s| s.to_string()).collect();
            let label = toks.remove(0);
            toks.pop();
            (label, toks)
        })
        .collect();

    // Verilog: "  <cell> <label> (.pin(net), ...);"
    let mut verilog_insts: Vec<(String, Vec<String>)> = verilog
        .iter()
        .filter(|l| l.trim_start().starts_with("THmitll_"))
        .map(|l| {
            let trimmed = l.trim();
            let label = trimmed.split_whitespace().nth(1).unwrap().to_string();
            let nets: Vec<String> = trimmed
                .split('(')
                .skip(2)
                .map(|part| part.split(')').next().unwrap().to_string())
                .collect();
            (label, nets)
        })
        .collect();

    spice_insts.sort();
    verilog_insts.sort();
    assert_eq!(spice_insts, verilog_insts);
}

/// Emission works on raw circuit data too, including port shapes the
/// builder API cannot produce (a bare input-to-output feedthrough).
#[test]
fn emission_does_not_require_builder_constructibility() {
    let data = CircuitData::from_parts(
        "E",
        vec!["a".to_string()],
        vec!["q".to_string()],
        vec![],
        vec![],
        vec![],
        vec![],
    );
    let lines = netlist::to_spice(&data, &CellNameMap::default());
    assert_eq!(lines, [".subckt E a q", ".ends"]);
}

#[test]
fn cell_name_overrides_apply_everywhere() {
    let mut cells = CellNameMap::parse_overrides("AND2=LIB_AND\n# comment\n\nXOR = LIB_XOR\n").unwrap();
    cells.apply_override("SPLIT=LIB_SPL").unwrap();
    let lines = netlist::to_spice(&builtins::half_adder(), &cells);
    assert_eq!(lines[1], "XSPLIT1 clk _clk_0 _clk_1 LIB_SPL");
    assert_eq!(lines[4], "XAND4 _a_0 _b_0 _clk_0 c LIB_AND");
    assert_eq!(lines[5], "XXOR5 _a_1 _b_1 _clk_1 s LIB_XOR");

    assert_eq!(
        CellNameMap::default().apply_override("NAND=X").unwrap_err(),
        NetlistError::UnknownCellKey {
            key: "NAND".to_string()
        }
    );
    assert!(matches!(
        CellNameMap::default().apply_override("DFF"),
        Err(NetlistError::BadOverride { .. })
    ));
}

#[test]
fn cell_models_cover_all_primitives() {
    let lines = emit_verilog_cell_models(&CellNameMap::default());
    for name in [
        "THmitll_AND2",
        "THmitll_OR2",
        "THmitll_XOR",
        "THmitll_NOT",
        "THmitll_DFF",
        "THmitll_BUFF",
        "THmitll_SPLIT",
        "THmitll_NDRO",
    ] {
        assert!(
            lines.iter().any(|l| l.starts_with(&format!("module {name} ("))),
            "missing model for {name}"
        );
    }
    assert_eq!(
        lines.iter().filter(|l| *l == "endmodule").count(),
        8
    );

    let mut renamed = CellNameMap::default();
    renamed.set(fluxwire::circuit::GateKind::Ndro, "MY_NDRO");
    let lines = emit_verilog_cell_models(&renamed);
    assert!(lines
        .iter()
        .any(|l| l.starts_with("module MY_NDRO (set, reset, read, q);")));
}
