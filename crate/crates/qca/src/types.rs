//! Shared domain types: polarization, three-valued logic levels, clock
//! phases and clock zones.

use std::fmt;

use thiserror::Error;

/// Default cutoff below which a polarization is considered undriven.
pub const DEFAULT_SATURATION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("polarization {0} outside [-1, +1]")]
pub struct PolarizationRange(pub f64);

/// Continuous cell state in [-1, +1]. +1 encodes logic 1, -1 logic 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarization(f64);

impl Polarization {
    pub const PLUS_ONE: Polarization = Polarization(1.0);
    pub const MINUS_ONE: Polarization = Polarization(-1.0);

    pub fn new(value: f64) -> Result<Self, PolarizationRange> {
        if value.is_finite() && (-1.0..=1.0).contains(&value) {
            Ok(Polarization(value))
        } else {
            Err(PolarizationRange(value))
        }
    }

    /// Clamps into [-1, +1]; used by the relaxation engine where rounding
    /// can step a hair outside the interval.
    pub fn clamped(value: f64) -> Self {
        Polarization(value.clamp(-1.0, 1.0))
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Polarization::PLUS_ONE
        } else {
            Polarization::MINUS_ONE
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Boolean interpretation of a polarization, with `X` for undriven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LogicLevel {
    Zero,
    One,
    X,
}

impl LogicLevel {
    pub fn from_bool(b: bool) -> Self {
        if b {
            LogicLevel::One
        } else {
            LogicLevel::Zero
        }
    }

    pub fn to_bool(self) -> Option<bool> {
        match self {
            LogicLevel::Zero => Some(false),
            LogicLevel::One => Some(true),
            LogicLevel::X => None,
        }
    }

    pub fn is_x(self) -> bool {
        self == LogicLevel::X
    }

    pub fn not(self) -> Self {
        match self {
            LogicLevel::Zero => LogicLevel::One,
            LogicLevel::One => LogicLevel::Zero,
            LogicLevel::X => LogicLevel::X,
        }
    }

    /// Kleene AND: a known 0 dominates an X.
    pub fn and(self, other: Self) -> Self {
        match (self, other) {
            (LogicLevel::Zero, _) | (_, LogicLevel::Zero) => LogicLevel::Zero,
            (LogicLevel::One, LogicLevel::One) => LogicLevel::One,
            _ => LogicLevel::X,
        }
    }

    /// Kleene OR: a known 1 dominates an X.
    pub fn or(self, other: Self) -> Self {
        match (self, other) {
            (LogicLevel::One, _) | (_, LogicLevel::One) => LogicLevel::One,
            (LogicLevel::Zero, LogicLevel::Zero) => LogicLevel::Zero,
            _ => LogicLevel::X,
        }
    }

    pub fn xor(self, other: Self) -> Self {
        match (self.to_bool(), other.to_bool()) {
            (Some(a), Some(b)) => LogicLevel::from_bool(a ^ b),
            _ => LogicLevel::X,
        }
    }

    /// Two equal non-X inputs decide the majority even if the third is X.
    pub fn majority(a: Self, b: Self, c: Self) -> Self {
        let ones = [a, b, c].iter().filter(|&&v| v == LogicLevel::One).count();
        let zeros = [a, b, c].iter().filter(|&&v| v == LogicLevel::Zero).count();
        if ones >= 2 {
            LogicLevel::One
        } else if zeros >= 2 {
            LogicLevel::Zero
        } else {
            LogicLevel::X
        }
    }

    /// Three-valued select: `sel ? a : b`. An X select still resolves when
    /// both legs agree.
    pub fn mux(sel: Self, a: Self, b: Self) -> Self {
        match sel {
            LogicLevel::One => a,
            LogicLevel::Zero => b,
            LogicLevel::X => {
                if a == b {
                    a
                } else {
                    LogicLevel::X
                }
            }
        }
    }
}

impl fmt::Display for LogicLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            LogicLevel::Zero => '0',
            LogicLevel::One => '1',
            LogicLevel::X => 'x',
        };
        write!(f, "{c}")
    }
}

/// Sign-based readout of a polarization: positive side is logic 1, negative
/// side logic 0, magnitudes under `threshold` are undriven.
pub fn logic_of(p: Polarization, threshold: f64) -> LogicLevel {
    let v = p.value();
    if v.abs() < threshold {
        LogicLevel::X
    } else if v > 0.0 {
        LogicLevel::One
    } else {
        LogicLevel::Zero
    }
}

/// One quarter of the clock cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClockPhase {
    Switch,
    Hold,
    Release,
    Relax,
}

impl ClockPhase {
    pub fn from_index(i: usize) -> Self {
        match i % 4 {
            0 => ClockPhase::Switch,
            1 => ClockPhase::Hold,
            2 => ClockPhase::Release,
            _ => ClockPhase::Relax,
        }
    }

    pub fn index(self) -> usize {
        match self {
            ClockPhase::Switch => 0,
            ClockPhase::Hold => 1,
            ClockPhase::Release => 2,
            ClockPhase::Relax => 3,
        }
    }
}

impl fmt::Display for ClockPhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClockPhase::Switch => "switch",
            ClockPhase::Hold => "hold",
            ClockPhase::Release => "release",
            ClockPhase::Relax => "relax",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq,Error)]
#[error("clock zone {0} outside 0..=3")]
pub struct ZoneRange(pub u8);

/// One of the four 90-degree phase-shifted clock zones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClockZone(u8);

impl ClockZone {
    pub const Z0: ClockZone = ClockZone(0);
    pub const Z1: ClockZone = ClockZone(1);
    pub const Z2: ClockZone = ClockZone(2);
    pub const Z3: ClockZone = ClockZone(3);
    pub const ALL: [ClockZone; 4] = [Self::Z0, Self::Z1, Self::Z2, Self::Z3];

    pub fn new(z: u8) -> Result<Self, ZoneRange> {
        if z < 4 {
            Ok(ClockZone(z))
        } else {
            Err(ZoneRange(z))
        }
    }

    /// Zone reached one quarter-cycle downstream.
    pub fn next(self) -> Self {
        ClockZone((self.0 + 1) % 4)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// True when an edge from `self` into `downstream` respects the clocking
    /// discipline: same zone (combinational) or a one-quarter-cycle advance.
    pub fn feeds(self, downstream: ClockZone) -> bool {
        self == downstream || self.next() == downstream
    }
}

impl fmt::Display for ClockZone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
