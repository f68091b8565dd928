//! Stimulus and trace text formats.
//!
//! Stimulus files hold one directive per line (`#` comments and blank lines
//! ignored):
//!
//! ```text
//! pulse <net> <time>
//! clock <net> <start> <period> <count>
//! ```
//!
//! Traces are emitted as tab-separated `<time>\t<net>` lines.

use super::{clock_train, PulseEvent, SimError, SimTrace};

/// Parses a stimulus file into pulse events, expanding `clock` directives.
pub fn parse_stimulus(text: &str) -> Result<Vec<PulseEvent>, SimError> {
    let mut events = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || SimError::Parse {
            what: "stimulus".to_string(),
            line: line.to_string(),
        };
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("pulse") => {
                let net = tokens.next().ok_or_else(bad)?;
                let time: u64 = tokens
                    .next()
                    .ok_or_else(bad)?
                    .parse()
                    .map_err(|_| bad())?;
                if tokens.next().is_some() {
                    return Err(bad());
                }
                events.push(PulseEvent::new(net, time));
            }
            Some("clock") => {
                let net = tokens.next().ok_or_else(bad)?;
                let mut num = || -> Result<u64, SimError> {
                    tokens.next().ok_or_else(bad)?.parse().map_err(|_| bad())
                };
                let start = num()?;
                let period = num()?;
                let count = num()?;
                if tokens.next().is_some() {
                    return Err(bad());
                }
                events.extend(clock_train(net, start, period, count as usize));
            }
            _ => return Err(bad()),
        }
    }
    Ok(events)
}

/// Formats a trace as tab-separated `<time>\t<net>` lines.
pub fn format_trace(trace: &SimTrace) -> String {
    let mut out = String::new();
    for (time, net) in trace.pulses() {
        out.push_str(&format!("{time}\t{net}\n"));
    }
    out
}
