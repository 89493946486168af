//! Deterministic zone-pipelined simulator for gate netlists.
//!
//! Each node computes during its zone's Switch tick from the latched values
//! of its fan-ins (same-zone fan-ins in topological order, cross-zone
//! fan-ins from the previous tick) and holds the result for a full cycle.

use thiserror::Error;

use crate::clocking::switching_zone;
use crate::netlist::{GateKind, GateNetlist, NodeId};
use crate::trace::{Stimuli, StimuliError, Trace};
use crate::types::{logic_of, ClockZone, LogicLevel, DEFAULT_SATURATION_THRESHOLD};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("combinational cycle in zone {0}")]
    CombinationalCycle(ClockZone),
    #[error(transparent)]
    Stimuli(#[from] StimuliError),
    #[error("no input named `{0}`")]
    NoSuchInput(String),
    #[error("no output named `{0}`")]
    NoSuchOutput(String),
    #[error("output `{0}` not reachable from input `{1}`")]
    Unreachable(String, String),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SimOptions {
    /// Start latches at 0 instead of X.
    pub init_zero: bool,
}

#[derive(Debug, Clone)]
pub struct SimState {
    pub latched: Vec<LogicLevel>,
    pub tick: usize,
}

/// Reusable per-netlist evaluation context (per-zone topological orders).
pub struct Engine<'a> {
    net: &'a GateNetlist,
    zone_order: [Vec<NodeId>; 4],
}

impl<'a> Engine<'a> {
    pub fn new(net: &'a GateNetlist) -> Result<Self, SimError> {
        let mut zone_order: [Vec<NodeId>; 4] = Default::default();
        for zone in ClockZone::ALL {
            zone_order[zone.index()] = topo_order(net, zone)?;
        }
        Ok(Engine { net, zone_order })
    }

    pub fn initial_state(&self, opts: SimOptions) -> SimState {
        let init = if opts.init_zero { LogicLevel::Zero } else { LogicLevel::X };
        let mut latched = vec![init; self.net.len()];
        for (id, node) in self.net.nodes() {
            if let GateKind::Fixed(p) = node.kind {
                latched[id.index()] = logic_of(p, DEFAULT_SATURATION_THRESHOLD);
            }
        }
        SimState { latched, tick: 0 }
    }

    /// Evaluates the zone switching at `state.tick`, then advances the tick.
    pub fn step(&self, state: &mut SimState, stimuli: &Stimuli) -> Result<(), SimError> {
        let tick = state.tick;
        let zone = switching_zone(tick);
        let cycle = tick / 4;
        for &id in &self.zone_order[zone.index()] {
            let value = match &self.net.node(id).kind {
                GateKind::Input => LogicLevel::from_bool(
                    stimuli.value(&self.net.node(id).name, cycle)?,
                ),
                GateKind::Fixed(p) => logic_of(*p, DEFAULT_SATURATION_THRESHOLD),
                GateKind::Buffer(a) | GateKind::Output(a) => state.latched[a.index()],
                GateKind::Inverter(a) => state.latched[a.index()].not(),
                GateKind::Majority([a, b, c]) => LogicLevel::majority(
                    state.latched[a.index()],
                    state.latched[b.index()],
                    state.latched[c.index()],
                ),
            };
            state.latched[id.index()] = value;
        }
        state.tick += 1;
        Ok(())
    }

    /// Current value of an output tap: transparent read of its fan-in.
    pub fn read_output(&self, state: &SimState, id: NodeId) -> LogicLevel {
        match self.net.node(id).kind {
            GateKind::Output(src) => state.latched[src.index()],
            _ => state.latched[id.index()],
        }
    }
}

fn topo_order(net: &GateNetlist, zone: ClockZone) -> Result<Vec<NodeId>, SimError> {
    let members: Vec<NodeId> = net
        .nodes()
        .filter(|(_, n)| n.zone == zone && !matches!(n.kind, GateKind::Fixed(_)))
        .map(|(id, _)| id)
        .collect();
    let in_zone = |id: NodeId| net.node(id).zone == zone && !matches!(net.node(id).kind, GateKind::Fixed(_));
    let mut indeg = vec![0usize; net.len()];
    for &id in &members {
        indeg[id.index()] =
            net.node(id).kind.fanins().iter().filter(|&&s| in_zone(s)).count();
    }
    let mut order = Vec::with_capacity(members.len());
    let mut queue: Vec<NodeId> = members.iter().copied().filter(|id| indeg[id.index()] == 0).collect();
    queue.reverse();
    while let Some(id) = queue.pop() {
        order.push(id);
        for &m in &members {
            if indeg[m.index()] > 0 && net.node(m).kind.fanins().contains(&id) {
                indeg[m.index()] -= 1;
                if indeg[m.index()] == 0 {
                    queue.push(m);
                }
            }
        }
    }
    if order.len() < members.len() {
        return Err(SimError::CombinationalCycle(zone));
    }
    Ok(order)
}

/// Runs `4 * n_cycles` ticks and records every named input and output once
/// per tick.
pub fn simulate(
    net: &GateNetlist,
    stimuli: &Stimuli,
    n_cycles: usize,
    opts: SimOptions,
) -> Result<Trace, SimError> {
    for &id in net.inputs() {
        let name = &net.node(id).name;
        if !stimuli.has(name) && name != crate::trace::CLOCK_NAME {
            // fails fast with a per-cycle error below if truly absent
            stimuli.value(name, 0)?;
        }
    }
    stimuli.check_cycles(if stimuli.inputs().is_empty() { 0 } else { n_cycles })?;

    let engine = Engine::new(net)?;
    let mut state = engine.initial_state(opts);
    let names: Vec<String> = net
        .inputs()
        .iter()
        .chain(net.outputs())
        .map(|&id| net.node(id).name.clone())
        .collect();
    let mut trace = Trace::new(names);
    for _ in 0..4 * n_cycles {
        engine.step(&mut state, stimuli)?;
        for &id in net.inputs() {
            trace.push(&net.node(id).name, state.latched[id.index()]);
        }
        for &id in net.outputs() {
            trace.push(&net.node(id).name, engine.read_output(&state, id));
        }
    }
    Ok(trace)
}

/// Longest input→output path length in zone hops (cross-zone edges only),
/// over simple paths. Latency in cycles is `hops / 4`.
///
/// Feedback is handled exactly: a simple path traverses each strongly
/// connected component at most once, so longest distances are propagated
/// over the SCC condensation with a brute-force longest simple path inside
/// each (small) component.
pub fn latency_quarter_cycles(
    net: &GateNetlist,
    from: &str,
    to: &str,
) -> Result<usize, SimError> {
    let src = net
        .inputs()
        .iter()
        .copied()
        .find(|&id| net.node(id).name == from)
        .ok_or_else(|| SimError::NoSuchInput(from.into()))?;
    let dst = net
        .outputs()
        .iter()
        .copied()
        .find(|&id| net.node(id).name == to)
        .ok_or_else(|| SimError::NoSuchOutput(to.into()))?;
    longest_from(net, src)[dst.index()]
        .ok_or_else(|| SimError::Unreachable(to.into(), from.into()))
}

/// Max latency over all reachable input→output pairs.
pub fn max_latency_quarter_cycles(net: &GateNetlist) -> usize {
    let mut best = 0;
    for &i in net.inputs() {
        let dist = longest_from(net, i);
        for &o in net.outputs() {
            if let Some(d) = dist[o.index()] {
                best = best.max(d);
            }
        }
    }
    best
}

fn longest_from(net: &GateNetlist, src: NodeId) -> Vec<Option<usize>> {
    use petgraph::algo::tarjan_scc;
    use petgraph::graph::DiGraph;

    let mut graph: DiGraph<(), usize> = DiGraph::new();
    let gids: Vec<_> = (0..net.len()).map(|_| graph.add_node(())).collect();
    for (id, node) in net.nodes() {
        for &s in node.kind.fanins() {
            let w = usize::from(net.node(s).zone != node.zone);
            graph.add_edge(gids[s.index()], gids[id.index()], w);
        }
    }

    let sccs = tarjan_scc(&graph); // reverse topological order
    let mut comp_of = vec![0usize; net.len()];
    for (ci, comp) in sccs.iter().enumerate() {
        for &n in comp {
            comp_of[n.index()] = ci;
        }
    }

    let mut dist: Vec<Option<usize>> = vec![None; net.len()];
    dist[src.index()] = Some(0);
    // process components in topological order
    for comp in sccs.iter().rev() {
        let members: Vec<usize> = comp.iter().map(|n| n.index()).collect();
        // pull in cross-component contributions
        for &v in &members {
            for &s in net.node(NodeId(v)).kind.fanins() {
                if comp_of[s.index()] != comp_of[v] {
                    if let Some(d) = dist[s.index()] {
                        let w = usize::from(net.node(s).zone != net.node(NodeId(v)).zone);
                        let cand = d + w;
                        if dist[v].map_or(true, |cur| cand > cur) {
                            dist[v] = Some(cand);
                        }
                    }
                }
            }
        }
        if members.len() > 1 {
            // longest simple paths inside the component from every entry
            let entries: Vec<(usize, usize)> = members
                .iter()
                .filter_map(|&v| dist[v].map(|d| (v, d)))
                .collect();
            for (entry, d0) in entries {
                let mut visited = vec![false; members.len()];
                let local: IndexMapLocal = members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
                scc_dfs(net, &members, &local, entry, d0, &mut visited, &mut dist);
            }
        }
    }
    dist
}

type IndexMapLocal = std::collections::HashMap<usize, usize>;

fn scc_dfs(
    net: &GateNetlist,
    members: &[usize],
    local: &IndexMapLocal,
    cur: usize,
    d: usize,
    visited: &mut [bool],
    dist: &mut [Option<usize>],
) {
    visited[local[&cur]] = true;
    if dist[cur].map_or(true, |x| d > x) {
        dist[cur] = Some(d);
    }
    for &v in members {
        if visited[local[&v]] {
            continue;
        }
        if net.node(NodeId(v)).kind.fanins().contains(&NodeId(cur)) {
            let w = usize::from(net.node(NodeId(cur)).zone != net.node(NodeId(v)).zone);
            scc_dfs(net, members, local, v, d + w, visited, dist);
        }
    }
    visited[local[&cur]] = false;
}
