//! Simulation waveforms (per-tick logic levels) and per-cycle stimuli.

use indexmap::IndexMap;
use thiserror::Error;

use crate::types::LogicLevel;

/// Per-signal sequences of logic levels sampled once per quarter-cycle tick.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    signals: IndexMap<String, Vec<LogicLevel>>,
}

impl Trace {
    pub fn new(names: impl IntoIterator<Item = String>) -> Self {
        Trace { signals: names.into_iter().map(|n| (n, Vec::new())).collect() }
    }

    pub fn push(&mut self, name: &str, level: LogicLevel) {
        self.signals
            .get_mut(name)
            .unwrap_or_else(|| panic!("unknown trace signal `{name}`"))
            .push(level);
    }

    pub fn get(&self, name: &str) -> Option<&[LogicLevel]> {
        self.signals.get(name).map(|v| v.as_slice())
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.signals.keys().map(|s| s.as_str())
    }

    pub fn signals(&self) -> &IndexMap<String, Vec<LogicLevel>> {
        &self.signals
    }

    /// Number of recorded ticks (all signals have equal length).
    pub fn n_ticks(&self) -> usize {
        self.signals.values().next().map_or(0, |v| v.len())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StimuliError {
    #[error("stimulus sequences have unequal lengths")]
    RaggedLengths,
    #[error("no input `{0}` in stimuli (cycle {1})")]
    MissingInput(String, usize),
    #[error("stimuli cover {have} cycles, {want} requested")]
    TooShort { have: usize, want: usize },
}

/// Per-clock-cycle input values. Values are applied for whole clock cycles.
///
/// The input named `CLK` gets special treatment: an explicit override
/// waveform wins over the map, and if neither is present a default square
/// wave 0,1,0,1,… is synthesized.
#[derive(Debug, Clone, Default)]
pub struct Stimuli {
    inputs: IndexMap<String, Vec<bool>>,
    clock_override: Option<Vec<bool>>,
}

pub const CLOCK_NAME: &str = "CLK";

impl Stimuli {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(pairs: &[(&str, &[u8])]) -> Self {
        let mut s = Stimuli::new();
        for (name, bits) in pairs {
            s.set(name, bits.iter().map(|&b| b != 0).collect());
        }
        s
    }

    /// All named inputs held constant for `cycles` cycles.
    pub fn constant(pairs: &[(&str, bool)], cycles: usize) -> Self {
        let mut s = Stimuli::new();
        for &(name, v) in pairs {
            s.set(name, vec![v; cycles]);
        }
        s
    }

    pub fn set(&mut self, name: &str, bits: Vec<bool>) {
        self.inputs.insert(name.to_string(), bits);
    }

    pub fn set_clock_override(&mut self, bits: Vec<bool>) {
        self.clock_override = Some(bits);
    }

    pub fn inputs(&self) -> &IndexMap<String, Vec<bool>> {
        &self.inputs
    }

    pub fn has(&self, name: &str) -> bool {
        self.inputs.contains_key(name) || (name == CLOCK_NAME && self.clock_override.is_some())
    }

    /// Checks all sequences share one length and that it covers `want`.
    pub fn check_cycles(&self, want: usize) -> Result<(), StimuliError> {
        let mut len: Option<usize> = None;
        for seq in self.inputs.values().chain(self.clock_override.iter()) {
            match len {
                None => len = Some(seq.len()),
                Some(l) if l != seq.len() => return Err(StimuliError::RaggedLengths),
                _ => {}
            }
        }
        match len {
            Some(have) if have < want => Err(StimuliError::TooShort { have, want }),
            None if want > 0 => Err(StimuliError::TooShort { have: 0, want }),
            _ => Ok(()),
        }
    }

    /// Value of `name` during clock cycle `cycle`. `CLK` falls back to a
    /// square wave when not given explicitly.
    pub fn value(&self, name: &str, cycle: usize) -> Result<bool, StimuliError> {
        if name == CLOCK_NAME {
            if let Some(clk) = &self.clock_override {
                return clk
                    .get(cycle)
                    .copied()
                    .ok_or_else(|| StimuliError::MissingInput(name.into(), cycle));
            }
        }
        match self.inputs.get(name) {
            Some(seq) => seq
                .get(cycle)
                .copied()
                .ok_or_else(|| StimuliError::MissingInput(name.into(), cycle)),
            None if name == CLOCK_NAME => Ok(cycle % 2 == 1),
            None => Err(StimuliError::MissingInput(name.into(), cycle)),
        }
    }
}
