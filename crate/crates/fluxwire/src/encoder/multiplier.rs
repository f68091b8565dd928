//! Constant-coefficient GF(2^a) multipliers as two-stage clocked pipelines.
//!
//! Multiplying by a fixed nonzero constant is linear over GF(2), so each
//! output bit is the XOR of a fixed subset of input bits (a row of the
//! multiplication matrix). With 2-input gates and fields up to GF(2^4) a
//! row never needs more than four terms, which always fits a two-level
//! XOR tree. Rows with fewer terms are padded with DFFs so that *every*
//! output takes exactly two clocked stages: the surrounding pipeline can
//! then treat any constant multiplier as a uniform two-cycle element.

use crate::circuit::{CircuitBuilder, CircuitData, CircuitError, GateKind, InstanceKind, SealedCircuit, Wire};
use crate::gf::{FieldContext, FieldElement};

use super::{fan, spread_clock};

/// Unclocked splitter depth of the padded per-input fan-out trees. Every
/// path from an input port to a first-stage gate crosses exactly this many
/// splitter/buffer levels, so a parent circuit sees one fixed propagation
/// offset regardless of how often each bit is tapped.
pub(crate) const INPUT_TREE_DEPTH: u32 = 2;

/// Depth of the internal clock distribution tree. A clock pulse entering
/// the `clk` port reaches every first-stage gate after exactly this many
/// splitter/buffer delays.
pub(crate) const CLOCK_TREE_DEPTH: u32 = 4;

/// Where a gate input comes from: an input bit or a first-stage result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Src {
    /// Input bit `x_i`.
    In(usize),
    /// Output of first-stage node `i`.
    Mid(usize),
}

/// One clocked gate in a multiplier stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Node {
    /// A DFF that forwards its operand one cycle later (tree padding).
    Pass(Src),
    /// An XOR of two operands.
    Xor(Src, Src),
}

impl Node {
    fn eval(self, input: impl Fn(Src) -> bool) -> bool {
        match self {
            Node::Pass(s) => input(s),
            Node::Xor(s, t) => input(s) ^ input(t),
        }
    }
}

/// A gate-level schedule for one constant multiplier: two stages of clocked
/// nodes, first-stage nodes reading input bits and second-stage nodes
/// (one per output bit) reading first-stage results.
#[derive(Debug, Clone)]
pub struct MultiplierPlan {
    constant: FieldElement,
    matrix: Vec<FieldElement>,
    stage1: Vec<Node>,
    stage2: Vec<Node>,
    chained: bool,
}

impl MultiplierPlan {
    /// The constant this plan multiplies by.
    pub fn constant(&self) -> FieldElement {
        self.constant
    }

    /// The multiplication matrix, one column per input bit: column `i`
    /// holds `c * alpha^i`, so output bit `j` XORs the inputs whose column
    /// has bit `j` set.
    pub fn matrix(&self) -> &[FieldElement] {
        &self.matrix
    }

    /// First-stage nodes (operands are input bits).
    pub fn stage1(&self) -> &[Node] {
        &self.stage1
    }

    /// Second-stage nodes, one per output bit (operands are stage-1 results).
    pub fn stage2(&self) -> &[Node] {
        &self.stage2
    }

    /// Evaluates the schedule on a word, bit 0 in the least significant
    /// position. Used to cross-check plans against the field arithmetic.
    pub fn eval(&self, x: FieldElement) -> FieldElement {
        let mids: Vec<bool> = self
            .stage1
            .iter()
            .map(|n| {
                n.eval(|s| match s {
                    Src::In(i) => x >> i & 1 == 1,
                    Src::Mid(_) => unreachable!("stage 1 reads inputs only"),
                })
            })
            .collect();
        let mut y = 0;
        for (j, n) in self.stage2.iter().enumerate() {
            let bit = n.eval(|s| match s {
                Src::In(_) => unreachable!("stage 2 reads stage-1 results only"),
                Src::Mid(m) => mids[m],
            });
            if bit {
                y |= 1 << j;
            }
        }
        y
    }
}

/// Plans a two-stage multiplier for `c` directly from the rows of its
/// multiplication matrix.
///
/// Panics if `c` is zero (the matrix would be singular and the output
/// ports could never pulse) or if the field is wider than GF(2^4), where a
/// row could need more than four terms and a third stage.
pub fn plan_const_multiplier(ctx: &FieldContext, c: FieldElement) -> MultiplierPlan {
    assert!(c != 0, "a zero constant has no pulse representation");
    let a = ctx.width() as usize;
    assert!(a <= 4, "two-stage plans cover fields up to GF(2^4)");
    let matrix = ctx.mul_matrix(c);
    let mut stage1 = Vec::new();
    let mut stage2 = Vec::new();
    for j in 0..a {
        let taps: Vec<usize> = (0..a).filter(|&i| matrix[i] >> j & 1 == 1).collect();
        // c != 0 makes the matrix invertible, so no row is empty.
        let mid = stage1.len();
        match taps[..] {
            [i] => {
                stage1.push(Node::Pass(Src::In(i)));
                stage2.push(Node::Pass(Src::Mid(mid)));
            }
            [i, k] => {
                stage1.push(Node::Xor(Src::In(i), Src::In(k)));
                stage2.push(Node::Pass(Src::Mid(mid)));
            }
            [i, k, l] => {
                stage1.push(Node::Xor(Src::In(i), Src::In(k)));
                stage1.push(Node::Pass(Src::In(l)));
                stage2.push(Node::Xor(Src::Mid(mid), Src::Mid(mid + 1)));
            }
            [i, k, l, m] => {
                stage1.push(Node::Xor(Src::In(i), Src::In(k)));
                stage1.push(Node::Xor(Src::In(l), Src::In(m)));
                stage2.push(Node::Xor(Src::Mid(mid), Src::Mid(mid + 1)));
            }
            _ => unreachable!("row weight is 1..=4 in fields up to GF(2^4)"),
        }
    }
    MultiplierPlan {
        constant: c,
        matrix,
        stage1,
        stage2,
        chained: false,
    }
}

/// Plans a multiplier for `h * h` as two chained single-stage
/// multiplications by `h`: stage 1 computes `h * x`, stage 2 multiplies the
/// intermediate by `h` again. The result computes the same product as a
/// direct plan for `h * h` but reuses one matrix twice.
///
/// Panics if any row of the matrix of `h` has more than two terms, since
/// each chained stage must fit a single gate level.
pub fn plan_chained_multiplier(ctx: &FieldContext, h: FieldElement) -> MultiplierPlan {
    assert!(h != 0, "a zero constant has no pulse representation");
    let a = ctx.width() as usize;
    let half = ctx.mul_matrix(h);
    let c = ctx.mul(h, h);
    let row_node = |j: usize, src: fn(usize) -> Src| -> Node {
        let taps: Vec<usize> = (0..a).filter(|&i| half[i] >> j & 1 == 1).collect();
        match taps[..] {
            [i] => Node::Pass(src(i)),
            [i, k] => Node::Xor(src(i), src(k)),
            _ => panic!(
                "chaining needs every row of the half constant to fit one gate; \
                 row {j} has {} terms",
                taps.len()
            ),
        }
    };
    let stage1 = (0..a).map(|j| row_node(j, Src::In)).collect();
    let stage2 = (0..a).map(|j| row_node(j, Src::Mid)).collect();
    MultiplierPlan {
        constant: c,
        matrix: ctx.mul_matrix(c),
        stage1,
        stage2,
        chained: true,
    }
}

/// Builds a sealed multiplier circuit from a plan.
///
/// Ports: inputs `x0..x{a-1}` then `clk`; outputs `y0..y{a-1}`. Internally
/// the clock fans out through a tree of fixed depth [`CLOCK_TREE_DEPTH`]
/// and each input bit through a splitter tree padded to
/// [`INPUT_TREE_DEPTH`], so all instances of any constant present identical
/// port-to-gate timing to the enclosing circuit.
pub fn build_multiplier_circuit(plan: &MultiplierPlan) -> Result<SealedCircuit, CircuitError> {
    let a = plan.matrix.len();
    let name = if plan.chained {
        format!("mul{}c", plan.constant)
    } else {
        format!("mul{}", plan.constant)
    };
    let in_names: Vec<String> = (0..a).map(|i| format!("x{i}")).chain(["clk".to_string()]).collect();
    let out_names: Vec<String> = (0..a).map(|j| format!("y{j}")).collect();
    let ins: Vec<&str> = in_names.iter().map(String::as_str).collect();
    let outs: Vec<&str> = out_names.iter().map(String::as_str).collect();
    let (mut b, mut input_wires, _, _) = CircuitBuilder::create(&name, &ins, &outs, &[], &[], &[])?;

    let clk = input_wires.pop().expect("clk port");
    let n_clocked = plan.stage1.len() + plan.stage2.len();
    let (clk_taps, depth) = spread_clock(&mut b, clk, &vec![0; n_clocked], CLOCK_TREE_DEPTH)?;
    debug_assert_eq!(depth, CLOCK_TREE_DEPTH);
    let mut clk_taps = clk_taps.into_iter();

    // Padded fan-out per input bit: one leaf per stage-1 use, all at the
    // same splitter depth.
    let mut in_leaves: Vec<Vec<Wire>> = Vec::with_capacity(a);
    for (i, w) in input_wires.into_iter().enumerate() {
        let uses = plan
            .stage1
            .iter()
            .flat_map(|n| match *n {
                Node::Pass(s) => vec![s],
                Node::Xor(s, t) => vec![s, t],
            })
            .filter(|s| *s == Src::In(i))
            .count();
        // An invertible matrix has no zero column, so every bit is used.
        let (leaves, d) = spread_clock(&mut b, w, &vec![0; uses], INPUT_TREE_DEPTH)?;
        debug_assert_eq!(d, INPUT_TREE_DEPTH);
        let mut leaves = leaves;
        leaves.reverse(); // pop() hands them out in allocation order
        in_leaves.push(leaves);
    }
    let mut take_in = |s: Src| -> Wire {
        match s {
            Src::In(i) => in_leaves[i].pop().expect("one leaf per use"),
            Src::Mid(_) => unreachable!("stage 1 reads inputs only"),
        }
    };

    let mut mid_wires = Vec::with_capacity(plan.stage1.len());
    for node in &plan.stage1 {
        let tap = clk_taps.next().expect("one clock tap per gate");
        let wire = match *node {
            Node::Pass(s) => b.dff(take_in(s), tap, None)?,
            Node::Xor(s, t) => b.xor(take_in(s), take_in(t), tap, None)?,
        };
        mid_wires.push(wire);
    }

    // Stage-2 fan-out: unpadded, since both stages fire on the same clock
    // tree and a one-or-two splitter difference stays inside the cycle.
    let mut mid_leaves: Vec<Vec<Wire>> = Vec::with_capacity(mid_wires.len());
    for (m, w) in mid_wires.into_iter().enumerate() {
        let uses = plan
            .stage2
            .iter()
            .flat_map(|n| match *n {
                Node::Pass(s) => vec![s],
                Node::Xor(s, t) => vec![s, t],
            })
            .filter(|s| *s == Src::Mid(m))
            .count();
        debug_assert!(uses >= 1, "every stage-1 result feeds stage 2");
        let mut leaves: Vec<Wire> = fan(&mut b, w, uses)?.into_iter().map(|(w, _)| w).collect();
        leaves.reverse();
        mid_leaves.push(leaves);
    }
    let mut take_mid = |s: Src| -> Wire {
        match s {
            Src::In(_) => unreachable!("stage 2 reads stage-1 results only"),
            Src::Mid(m) => mid_leaves[m].pop().expect("one leaf per use"),
        }
    };

    let mut outputs = Vec::with_capacity(a);
    for node in &plan.stage2 {
        let tap = clk_taps.next().expect("one clock tap per gate");
        let wire = match *node {
            Node::Pass(s) => b.dff(take_mid(s), tap, None)?,
            Node::Xor(s, t) => b.xor(take_mid(s), take_mid(t), tap, None)?,
        };
        outputs.push(wire);
    }
    b.set_outputs(outputs)?;
    b.finalize()
}

/// The largest number of clocked gates (AND/OR/XOR/NOT/DFF) on any
/// input-to-output path of an acyclic circuit. Splitters, buffers, and
/// NDRO read paths count as zero because they pass pulses combinationally.
///
/// Panics if the circuit contains a combinational cycle (loop ports cannot
/// appear, since they never occur in the flattened acyclic circuits this
/// is meant for).
pub fn clocked_depth(data: &CircuitData) -> usize {
    use std::collections::BTreeMap;
    let mut depth: BTreeMap<&str, usize> = BTreeMap::new();
    for net in data.inputs().iter().chain(data.counter_inputs()) {
        depth.insert(net, 0);
    }
    // Gates are recorded in description order, which is topological for
    // everything except loops; sweep to a fixpoint to stay order-agnostic.
    let mut changed = true;
    let mut sweeps = 0;
    while changed {
        changed = false;
        sweeps += 1;
        assert!(
            sweeps <= data.gates().len() + 2,
            "clocked_depth expects an acyclic circuit"
        );
        for gate in data.gates() {
            let kind = match &gate.kind {
                InstanceKind::Gate(kind) => *kind,
                InstanceKind::Sub(_) => panic!("clocked_depth expects a flat circuit"),
            };
            let inc = match kind {
                GateKind::And2 | GateKind::Or2 | GateKind::Xor | GateKind::Not | GateKind::Dff => 1,
                GateKind::Buff | GateKind::Split | GateKind::Ndro => 0,
            };
            let n_in = kind.input_count();
            let Some(best) = gate.pins[..n_in].iter().filter_map(|p| depth.get(p.as_str())).max().copied()
            else {
                continue;
            };
            for pin in &gate.pins[n_in..] {
                let d = best + inc;
                let entry = depth.entry(pin).or_insert(0);
                if d > *entry {
                    *entry = d;
                    changed = true;
                }
            }
        }
    }
    depth.values().copied().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::apply_matrix;

    #[test]
    fn plans_agree_with_field_multiplication() {
        let ctx = FieldContext::gf16();
        for c in 1..16 {
            let plan = plan_const_multiplier(&ctx, c);
            for x in 0..16 {
                assert_eq!(plan.eval(x), ctx.mul(c, x), "c={c} x={x}");
                assert_eq!(apply_matrix(plan.matrix(), x), ctx.mul(c, x));
            }
        }
    }

    #[test]
    fn stage_sizes_follow_row_weights() {
        let ctx = FieldContext::gf16();
        // alpha^3 has row weights (1, 2, 2, 2): four single-gate rows.
        let plan = plan_const_multiplier(&ctx, ctx.exp(3));
        assert_eq!(plan.stage1().len(), 4);
        assert_eq!(plan.stage2().len(), 4);
        // alpha^10 has row weights (3, 3, 4, 3): three rows need a pad.
        let plan = plan_const_multiplier(&ctx, ctx.exp(10));
        assert_eq!(plan.stage1().len(), 8);
        assert_eq!(plan.stage2().len(), 4);
    }

    #[test]
    fn chained_plan_squares_the_half_constant() {
        let ctx = FieldContext::gf16();
        let plan = plan_chained_multiplier(&ctx, ctx.exp(3));
        assert_eq!(plan.constant(), ctx.exp(6));
        for x in 0..16 {
            assert_eq!(plan.eval(x), ctx.mul(ctx.exp(6), x), "x={x}");
        }
    }

    #[test]
    #[should_panic(expected = "zero constant")]
    fn zero_constant_is_rejected() {
        plan_const_multiplier(&FieldContext::gf16(), 0);
    }
}
