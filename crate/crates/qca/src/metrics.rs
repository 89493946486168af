//! Cost figures: cell counts and areas of physical layouts, gate counts
//! and latencies of netlists, and comparison against the figures reported
//! for the original reference layouts of each catalog circuit.

use std::fmt;

use crate::cell::CellLayout;
use crate::circuits::CircuitHandle;
use crate::netlist::GateKind;

/// Cost summary of one circuit. Layout-derived fields are `None` when the
/// record was produced from a netlist alone.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub circuit: String,
    pub cell_count: Option<usize>,
    pub area_um2: Option<f64>,
    pub majority_gates: Option<usize>,
    pub inverters: Option<usize>,
    pub latency_cycles: Option<f64>,
}

impl MetricsRecord {
    fn empty(circuit: impl Into<String>) -> Self {
        MetricsRecord {
            circuit: circuit.into(),
            cell_count: None,
            area_um2: None,
            majority_gates: None,
            inverters: None,
            latency_cycles: None,
        }
    }
}

/// Bounding-box area of a layout in µm², counting a full pitch per
/// occupied row and column.
pub fn layout_area_um2(layout: &CellLayout, pitch_nm: f64) -> f64 {
    let xs: Vec<i32> = layout.cells.iter().map(|c| c.x).collect();
    let ys: Vec<i32> = layout.cells.iter().map(|c| c.y).collect();
    let (Some(&xmin), Some(&xmax)) = (xs.iter().min(), xs.iter().max()) else {
        return 0.0;
    };
    let (ymin, ymax) = (*ys.iter().min().unwrap(), *ys.iter().max().unwrap());
    let w = (xmax - xmin + 1) as f64 * pitch_nm * 1e-3;
    let h = (ymax - ymin + 1) as f64 * pitch_nm * 1e-3;
    w * h
}

/// Cell count and area of a physical layout.
pub fn layout_metrics(circuit: &str, layout: &CellLayout, pitch_nm: f64) -> MetricsRecord {
    MetricsRecord {
        cell_count: Some(layout.cells.len()),
        area_um2: Some(layout_area_um2(layout, pitch_nm)),
        ..MetricsRecord::empty(circuit)
    }
}

/// Gate counts and worst-case latency of a built netlist.
pub fn netlist_metrics(handle: &CircuitHandle) -> MetricsRecord {
    let mut majority = 0usize;
    let mut inverters = 0usize;
    for (_, node) in handle.netlist.nodes() {
        match node.kind {
            GateKind::Majority(_) => majority += 1,
            GateKind::Inverter(_) => inverters += 1,
            _ => {}
        }
    }
    MetricsRecord {
        majority_gates: Some(majority),
        inverters: Some(inverters),
        latency_cycles: Some(handle.declared_latency as f64 / 4.0),
        ..MetricsRecord::empty(&handle.name)
    }
}

/// Published cost figures of the reference physical designs this library's
/// circuits reproduce behaviorally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceCosts {
    pub circuit: &'static str,
    pub cell_count: usize,
    pub area_um2: f64,
    pub latency_cycles: Option<f64>,
}

pub const REFERENCE_COSTS: [ReferenceCosts; 5] = [
    ReferenceCosts { circuit: "cff", cell_count: 159, area_um2: 0.20, latency_cycles: Some(2.75) },
    ReferenceCosts { circuit: "ecff", cell_count: 242, area_um2: 0.38, latency_cycles: Some(3.75) },
    ReferenceCosts { circuit: "ram1", cell_count: 209, area_um2: 0.31, latency_cycles: None },
    ReferenceCosts {
        circuit: "counter_shift:2",
        cell_count: 464,
        area_um2: 0.67,
        latency_cycles: Some(5.75),
    },
    ReferenceCosts {
        circuit: "counter_shift:3",
        cell_count: 786,
        area_um2: 1.18,
        latency_cycles: Some(7.75),
    },
];

pub fn reference_costs(circuit: &str) -> Option<&'static ReferenceCosts> {
    REFERENCE_COSTS.iter().find(|r| r.circuit == circuit)
}

/// Checks a netlist-derived record against the reference figures. Only
/// latency is comparable at the gate level; cell count and area require a
/// layout.
pub fn latency_matches_reference(record: &MetricsRecord) -> Option<bool> {
    let reference = reference_costs(&record.circuit)?;
    let want = reference.latency_cycles?;
    let got = record.latency_cycles?;
    Some((got - want).abs() < 1e-9)
}

fn opt_usize(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |x| x.to_string())
}

fn opt_f64(v: Option<f64>, prec: usize) -> String {
    v.map_or_else(|| "-".into(), |x| format!("{x:.prec$}"))
}

/// Human-readable table of metric records.
pub fn render_table(records: &[MetricsRecord]) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "{:<18} {:>7} {:>10} {:>9} {:>9} {:>9}\n",
        "circuit", "cells", "area/um2", "majority", "inverter", "latency"
    ));
    for r in records {
        s.push_str(&format!(
            "{:<18} {:>7} {:>10} {:>9} {:>9} {:>9}\n",
            r.circuit,
            opt_usize(r.cell_count),
            opt_f64(r.area_um2, 4),
            opt_usize(r.majority_gates),
            opt_usize(r.inverters),
            opt_f64(r.latency_cycles, 2),
        ));
    }
    s
}

/// Machine-readable CSV with a fixed header.
pub fn render_csv(records: &[MetricsRecord]) -> String {
    let mut s = String::from("circuit,cell_count,area_um2,majority_gates,inverters,latency_cycles\n");
    for r in records {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.circuit,
            opt_usize(r.cell_count),
            opt_f64(r.area_um2, 6),
            opt_usize(r.majority_gates),
            opt_usize(r.inverters),
            opt_f64(r.latency_cycles, 4),
        ));
    }
    s
}

impl fmt::Display for MetricsRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_table(std::slice::from_ref(self)))
    }
}
