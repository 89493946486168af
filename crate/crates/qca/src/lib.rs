//! Gate- and cell-level simulation of clocked quantum-dot cellular automata
//! (QCA) circuits, with reference models and verification for a family of
//! configurable sequential elements: a configurable flip-flop (D/T/JK by
//! control inputs), a clock pulse generator with selectable edge
//! sensitivity, a delay control circuit, their edge-triggered composition,
//! a 1-bit RAM cell and an n-bit combined counter/shift register.
//!
//! Layers:
//! - [`types`], [`clocking`]: polarization, three-valued logic, the
//!   four-phase zone clock;
//! - [`netlist`], [`behavioral`]: zone-annotated majority/inverter netlists
//!   and a tick-accurate three-valued simulator;
//! - [`cell`]: a bistable cell-array engine that relaxes real layouts under
//!   the zone clock;
//! - [`circuits`]: builders for the circuit catalog;
//! - [`oracle`]: independent reference automata and the verification
//!   harness;
//! - [`metrics`], [`textio`]: cost reporting and text formats (netlists,
//!   stimuli, layouts, CSV/VCD dumps).

pub mod behavioral;
pub mod cell;
pub mod circuits;
pub mod clocking;
pub mod metrics;
pub mod netlist;
pub mod oracle;
pub mod textio;
pub mod trace;
pub mod types;

pub use types::{ClockPhase, ClockZone, LogicLevel, Polarization};
