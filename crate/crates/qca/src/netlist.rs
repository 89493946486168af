//! Clock-zone-annotated gate netlists of majority/inverter/buffer nodes,
//! a builder with forward references for feedback loops, and the netlist
//! validator enforcing the clocking discipline.

use std::fmt;

use indexmap::IndexMap;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use petgraph::visit::EdgeRef;
use thiserror::Error;

use crate::types::{ClockZone, Polarization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeId(pub(crate) usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Input,
    /// Named output tap; transparent read of its single fan-in.
    Output(NodeId),
    /// Constant driver, polarization strictly ±1. Fixed-source edges are
    /// exempt from the zone-adjacency rule: constants are always available.
    Fixed(Polarization),
    Majority([NodeId; 3]),
    Inverter(NodeId),
    Buffer(NodeId),
}

impl GateKind {
    pub fn fanins(&self) -> &[NodeId] {
        match self {
            GateKind::Input | GateKind::Fixed(_) => &[],
            GateKind::Output(a) | GateKind::Inverter(a) | GateKind::Buffer(a) => {
                std::slice::from_ref(a)
            }
            GateKind::Majority(abc) => abc,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GateNode {
    pub name: String,
    pub kind: GateKind,
    pub zone: ClockZone,
}

#[derive(Debug, Clone)]
pub struct GateNetlist {
    nodes: Vec<GateNode>,
    by_name: IndexMap<String, NodeId>,
    inputs: Vec<NodeId>,
    outputs: Vec<NodeId>,
}

impl GateNetlist {
    pub fn node(&self, id: NodeId) -> &GateNode {
        &self.nodes[id.0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &GateNode)> {
        self.nodes.iter().enumerate().map(|(i, n)| (NodeId(i), n))
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn id_of(&self, name: &str) -> Option<NodeId> {
        self.by_name.get(name).copied()
    }

    pub fn inputs(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    pub fn input_names(&self) -> Vec<&str> {
        self.inputs.iter().map(|&id| self.node(id).name.as_str()).collect()
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.outputs.iter().map(|&id| self.node(id).name.as_str()).collect()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BuildError {
    #[error("duplicate node name `{0}`")]
    DuplicateName(String),
    #[error("node `{0}` was reserved but never defined")]
    UndefinedReserved(String),
}

/// Incremental netlist constructor. `reserve`/`define` support feedback
/// loops; `finish` checks every reserved slot was filled.
#[derive(Debug, Default)]
pub struct NetlistBuilder {
    nodes: Vec<GateNode>,
    by_name: IndexMap<String, NodeId>,
    inputs: Vec<NodeId>,
    outputs: Vec<NodeId>,
    pending: Vec<NodeId>,
    const_m1: Option<NodeId>,
    const_p1: Option<NodeId>,
}

impl NetlistBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn add(&mut self, name: &str, kind: GateKind, zone: ClockZone) -> NodeId {
        let id = NodeId(self.nodes.len());
        let prev = self.by_name.insert(name.to_string(), id);
        assert!(prev.is_none(), "duplicate node name `{name}`");
        self.nodes.push(GateNode { name: name.to_string(), kind, zone });
        id
    }

    pub fn input(&mut self, name: &str, zone: ClockZone) -> NodeId {
        let id = self.add(name, GateKind::Input, zone);
        self.inputs.push(id);
        id
    }

    pub fn fixed(&mut self, name: &str, p: Polarization) -> NodeId {
        self.add(name, GateKind::Fixed(p), ClockZone::Z0)
    }

    /// Shared logic-0 constant (P = −1), created on first use.
    pub fn const_zero(&mut self) -> NodeId {
        if let Some(id) = self.const_m1 {
            return id;
        }
        let id = self.fixed("const_m1", Polarization::MINUS_ONE);
        self.const_m1 = Some(id);
        id
    }

    /// Shared logic-1 constant (P = +1), created on first use.
    pub fn const_one(&mut self) -> NodeId {
        if let Some(id) = self.const_p1 {
            return id;
        }
        let id = self.fixed("const_p1", Polarization::PLUS_ONE);
        self.const_p1 = Some(id);
        id
    }

    pub fn majority(&mut self, name: &str, a: NodeId, b: NodeId, c: NodeId, zone: ClockZone) -> NodeId {
        self.add(name, GateKind::Majority([a, b, c]), zone)
    }

    pub fn inverter(&mut self, name: &str, a: NodeId, zone: ClockZone) -> NodeId {
        self.add(name, GateKind::Inverter(a), zone)
    }

    pub fn buffer(&mut self, name: &str, a: NodeId, zone: ClockZone) -> NodeId {
        self.add(name, GateKind::Buffer(a), zone)
    }

    /// MV(a, b, −1) — 2-input AND.
    pub fn and2(&mut self, name: &str, a: NodeId, b: NodeId, zone: ClockZone) -> NodeId {
        let z = self.const_zero();
        self.majority(name, a, b, z, zone)
    }

    /// MV(a, b, +1) — 2-input OR.
    pub fn or2(&mut self, name: &str, a: NodeId, b: NodeId, zone: ClockZone) -> NodeId {
        let o = self.const_one();
        self.majority(name, a, b, o, zone)
    }

    /// Chain of `hops` buffers advancing one zone per hop.
    pub fn buffer_chain(&mut self, prefix: &str, src: NodeId, hops: usize) -> NodeId {
        let mut cur = src;
        let mut zone = self.nodes[cur.0].zone;
        for i in 0..hops {
            zone = zone.next();
            cur = self.buffer(&format!("{prefix}_{i}"), cur, zone);
        }
        cur
    }

    /// Reserves a named slot to be filled by `define` later (feedback).
    pub fn reserve(&mut self, name: &str, zone: ClockZone) -> NodeId {
        let id = self.add(name, GateKind::Input, zone);
        self.pending.push(id);
        id
    }

    pub fn define(&mut self, id: NodeId, kind: GateKind) {
        assert!(
            self.pending.contains(&id),
            "define() on a node that was not reserved"
        );
        self.pending.retain(|&p| p != id);
        self.nodes[id.0].kind = kind;
    }

    pub fn output(&mut self, name: &str, src: NodeId) -> NodeId {
        let zone = self.nodes[src.0].zone;
        let id = self.add(name, GateKind::Output(src), zone);
        self.outputs.push(id);
        id
    }

    pub fn zone_of(&self, id: NodeId) -> ClockZone {
        self.nodes[id.0].zone
    }

    pub fn finish(self) -> Result<GateNetlist, BuildError> {
        if let Some(&id) = self.pending.first() {
            return Err(BuildError::UndefinedReserved(self.nodes[id.0].name.clone()));
        }
        Ok(GateNetlist {
            nodes: self.nodes,
            by_name: self.by_name,
            inputs: self.inputs,
            outputs: self.outputs,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    ZoneAdjacency { from: String, to: String, from_zone: ClockZone, to_zone: ClockZone },
    CombinationalCycle { zone: ClockZone, members: Vec<String> },
    LoopZoneCrossings { member: String },
    BadFanin { node: String, expected: usize, got: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZoneAdjacency { from, to, from_zone, to_zone } => write!(
                f,
                "zone adjacency: edge {from}@{from_zone} -> {to}@{to_zone}"
            ),
            Violation::CombinationalCycle { zone, members } => write!(
                f,
                "combinational cycle in zone {zone}: {}",
                members.join(", ")
            ),
            Violation::LoopZoneCrossings { member } => write!(
                f,
                "feedback loop through `{member}` crosses zones a non-multiple-of-4 number of times"
            ),
            Violation::BadFanin { node, expected, got } => {
                write!(f, "node `{node}` has {got} fan-ins, expected {expected}")
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Informational only, e.g. deep same-zone combinational chains.
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            writeln!(f, "ok")?;
        }
        for v in &self.violations {
            writeln!(f, "violation: {v}")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}

fn is_fixed(net: &GateNetlist, id: NodeId) -> bool {
    matches!(net.node(id).kind, GateKind::Fixed(_))
}

/// Checks the clocking discipline: zone-adjacent edges only, no same-zone
/// combinational cycles, and every feedback loop crossing zone boundaries a
/// multiple-of-4 number of times.
pub fn validate_netlist(net: &GateNetlist) -> ValidationReport {
    let mut report = ValidationReport::default();

    // Edge zone adjacency (constants exempt).
    for (id, node) in net.nodes() {
        for &src in node.kind.fanins() {
            if is_fixed(net, src) {
                continue;
            }
            let fz = net.node(src).zone;
            let tz = node.zone;
            let ok = if matches!(node.kind, GateKind::Output(_)) {
                fz == tz
            } else {
                fz.feeds(tz)
            };
            if !ok {
                report.violations.push(Violation::ZoneAdjacency {
                    from: net.node(src).name.clone(),
                    to: net.node(id).name.clone(),
                    from_zone: fz,
                    to_zone: tz,
                });
            }
        }
    }

    // Same-zone combinational acyclicity, via Kahn's algorithm per zone.
    for zone in ClockZone::ALL {
        let members: Vec<NodeId> = net
            .nodes()
            .filter(|(_, n)| n.zone == zone && !matches!(n.kind, GateKind::Fixed(_)))
            .map(|(id, _)| id)
            .collect();
        let mut indeg: IndexMap<NodeId, usize> = members.iter().map(|&id| (id, 0)).collect();
        for &id in &members {
            for &src in net.node(id).kind.fanins() {
                if indeg.contains_key(&src) {
                    *indeg.get_mut(&id).unwrap() += 1;
                }
            }
        }
        let mut queue: Vec<NodeId> =
            indeg.iter().filter(|(_, &d)| d == 0).map(|(&id, _)| id).collect();
        let mut seen = 0usize;
        let mut depth: IndexMap<NodeId, usize> = IndexMap::new();
        while let Some(id) = queue.pop() {
            seen += 1;
            let d = *depth.get(&id).unwrap_or(&0);
            for (&other, deg) in indeg.iter_mut() {
                if *deg > 0 && net.node(other).kind.fanins().contains(&id) {
                    *deg -= 1;
                    let e = depth.entry(other).or_insert(0);
                    *e = (*e).max(d + 1);
                    if *deg == 0 {
                        queue.push(other);
                    }
                }
            }
        }
        if seen < members.len() {
            let leftover: Vec<String> = indeg
                .iter()
                .filter(|(_, &d)| d > 0)
                .map(|(&id, _)| net.node(id).name.clone())
                .collect();
            report.violations.push(Violation::CombinationalCycle { zone, members: leftover });
        } else if let Some(max) = depth.values().max() {
            if *max > 8 {
                report
                    .notes
                    .push(format!("zone {zone} has same-zone combinational depth {max}"));
            }
        }
    }

    // Feedback loops must cross zones a multiple-of-4 number of times.
    // Within each strongly connected component, all cycles satisfy this
    // iff a consistent mod-4 potential exists.
    let mut graph: DiGraph<NodeId, usize> = DiGraph::new();
    let mut gid = Vec::with_capacity(net.len());
    for (id, _) in net.nodes() {
        gid.push(graph.add_node(id));
    }
    for (id, node) in net.nodes() {
        for &src in node.kind.fanins() {
            if is_fixed(net, src) {
                continue;
            }
            let w = usize::from(net.node(src).zone != node.zone);
            graph.add_edge(gid[src.0], gid[id.0], w);
        }
    }
    for scc in tarjan_scc(&graph) {
        if scc.len() < 2 {
            continue;
        }
        let in_scc: std::collections::HashSet<_> = scc.iter().copied().collect();
        let mut potential: IndexMap<petgraph::graph::NodeIndex, usize> = IndexMap::new();
        let mut stack = vec![scc[0]];
        potential.insert(scc[0], 0);
        let mut ok = true;
        'bfs: while let Some(v) = stack.pop() {
            let pv = potential[&v];
            for e in graph.edges(v) {
                let t = e.target();
                if !in_scc.contains(&t) {
                    continue;
                }
                let want = (pv + e.weight()) % 4;
                match potential.get(&t) {
                    Some(&p) if p != want => {
                        ok = false;
                        break 'bfs;
                    }
                    Some(_) => {}
                    None => {
                        potential.insert(t, want);
                        stack.push(t);
                    }
                }
            }
        }
        if !ok {
            let member = net.node(graph[scc[0]]).name.clone();
            report.violations.push(Violation::LoopZoneCrossings { member });
        }
    }

    report
}
