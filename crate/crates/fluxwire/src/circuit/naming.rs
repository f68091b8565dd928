//! Net-name bookkeeping: uniqueness, auto-name generation, and the
//! claim-once rule for declared output/loop/counter-input port names.
//!
//! Auto names have the shape `_<base>_<k>`: `base` is the driving net of the
//! gate being placed with one leading underscore and one trailing `_<digits>`
//! suffix stripped, and `k` is a per-base counter starting at 0. Splitting
//! `clk` therefore yields `_clk_0` and `_clk_1`, and splitting `_a_1` later
//! continues the `a` family with `_a_2`, `_a_3`. User names must not start
//! with an underscore, so the two namespaces never collide.

use std::collections::{BTreeMap, BTreeSet};

use super::CircuitError;

/// Which declared port a claimable name belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum PortSlot {
    /// Declared output port at this index: claimable by a gate output.
    Output(usize),
    /// Declared loop name at this index: claimable by a gate output (the
    /// loop's lower end), to be unified with the upper end by `set_loops`.
    Loop(usize),
    /// Declared counter-input port at this index: claimable by the upstream
    /// end of a counter operation.
    CounterInput(usize),
}

/// What kind of net a name is being requested for, which decides which
/// declared port names it may claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NameUse {
    /// A gate (or subcircuit instance) output: may claim outputs and loops.
    Driven,
    /// The upstream end of a counter operation: may claim counter inputs.
    CounterUpstream,
}

/// Per-circuit name table.
#[derive(Debug, Default)]
pub(crate) struct NameTable {
    used: BTreeSet<String>,
    counters: BTreeMap<String, usize>,
    claimable: BTreeMap<String, PortSlot>,
}

/// Derives the auto-name base from a net name: strip one leading underscore,
/// then one trailing `_<digits>` suffix. `"_a_1"` and `"a"` share the base
/// `"a"`, so fan-out chains keep numbering one family.
pub(crate) fn base_of(net: &str) -> String {
    let trimmed = net.strip_prefix('_').unwrap_or(net);
    match trimmed.rfind('_') {
        Some(pos)
            if pos + 1 < trimmed.len()
                && trimmed[pos + 1..].bytes().all(|b| b.is_ascii_digit()) =>
        {
            trimmed[..pos].to_string()
        }
        _ => trimmed.to_string(),
    }
}

impl NameTable {
    /// Registers a declared port name (inputs and counter outputs, whose nets
    /// exist immediately and are never re-claimed).
    pub(crate) fn declare_fixed(&mut self, name: &str) -> Result<(), CircuitError> {
        Self::check_user_name(name)?;
        if !self.used.insert(name.to_string()) {
            return Err(CircuitError::NameCollision {
                name: name.to_string(),
            });
        }
        Ok(())
    }

    /// Registers a declared name that a later operation may claim (outputs,
    /// loops, counter inputs).
    pub(crate) fn declare_claimable(
        &mut self,
        name: &str,
        slot: PortSlot,
    ) -> Result<(), CircuitError> {
        self.declare_fixed(name)?;
        self.claimable.insert(name.to_string(), slot);
        Ok(())
    }

    fn check_user_name(name: &str) -> Result<(), CircuitError> {
        if name.is_empty() || name.starts_with('_') {
            return Err(CircuitError::ReservedName {
                name: name.to_string(),
            });
        }
        Ok(())
    }

    /// Resolves an explicit user-chosen net name: either mints a brand-new
    /// name or claims a matching declared port name exactly once.
    pub(crate) fn claim_explicit(
        &mut self,
        name: &str,
        usage: NameUse,
    ) -> Result<String, CircuitError> {
        Self::check_user_name(name)?;
        if !self.used.contains(name) {
            self.used.insert(name.to_string());
            return Ok(name.to_string());
        }
        let allowed = match (self.claimable.get(name), usage) {
            (Some(PortSlot::Output(_) | PortSlot::Loop(_)), NameUse::Driven) => true,
            (Some(PortSlot::CounterInput(_)), NameUse::CounterUpstream) => true,
            _ => false,
        };
        if !allowed {
            return Err(CircuitError::NameCollision {
                name: name.to_string(),
            });
        }
        self.claimable.remove(name);
        Ok(name.to_string())
    }

    /// Mints the next free auto name `_<base>_<k>` for the given base.
    pub(crate) fn fresh_auto(&mut self, base: &str) -> String {
        let counter = self.counters.entry(base.to_string()).or_insert(0);
        loop {
            let candidate = format!("_{base}_{counter}");
            *counter += 1;
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    /// Whether a declared name is still waiting for the given slot (used by
    /// the bind operations to decide between unify and rename).
    pub(crate) fn pending_claim(&self, name: &str) -> Option<PortSlot> {
        self.claimable.get(name).copied()
    }

    /// Marks a declared name as claimed during a bind-time rename.
    pub(crate) fn take_claim(&mut self, name: &str) {
        self.claimable.remove(name);
    }

    /// Removes a name as part of a bind-time rename (the replacement name is
    /// already registered as a declared port).
    pub(crate) fn forget(&mut self, name: &str) {
        self.used.remove(name);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_strips_one_prefix_and_one_suffix() {
        assert_eq!(base_of("clk"), "clk");
        assert_eq!(base_of("_clk_0"), "clk");
        assert_eq!(base_of("_a_12"), "a");
        assert_eq!(base_of("a_b"), "a_b");
        assert_eq!(base_of("_a_b_0"), "a_b");
        assert_eq!(base_of("q2"), "q2");
        assert_eq!(base_of("a_"), "a_");
    }

    #[test]
    fn auto_names_count_per_base() {
        let mut t = NameTable::default();
        t.declare_fixed("clk").unwrap();
        assert_eq!(t.fresh_auto("clk"), "_clk_0");
        assert_eq!(t.fresh_auto("clk"), "_clk_1");
        assert_eq!(t.fresh_auto("a"), "_a_0");
        assert_eq!(t.fresh_auto("clk"), "_clk_2");
    }

    #[test]
    fn claims_are_single_use_and_slot_checked() {
        let mut t = NameTable::default();
        t.declare_claimable("c", PortSlot::Output(0)).unwrap();
        t.declare_claimable("clkin", PortSlot::CounterInput(0))
            .unwrap();
        assert!(t.claim_explicit("clkin", NameUse::Driven).is_err());
        assert_eq!(t.claim_explicit("c", NameUse::Driven).unwrap(), "c");
        assert!(t.claim_explicit("c", NameUse::Driven).is_err());
        assert_eq!(
            t.claim_explicit("clkin", NameUse::CounterUpstream).unwrap(),
            "clkin"
        );
    }

    #[test]
    fn reserved_and_duplicate_names_are_rejected() {
        let mut t = NameTable::default();
        assert!(matches!(
            t.declare_fixed("_x"),
            Err(CircuitError::ReservedName { .. })
        ));
        t.declare_fixed("x").unwrap();
        assert!(matches!(
            t.declare_fixed("x"),
            Err(CircuitError::NameCollision { .. })
        ));
        assert!(matches!(
            t.claim_explicit("_q", NameUse::Driven),
            Err(CircuitError::ReservedName { .. })
        ));
    }
}
