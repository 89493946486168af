//! Bistable cell-array engine: relaxes polarizations of a physical cell
//! layout under the four-phase zone clock.
//!
//! Each cell is a four-dot square on a uniform grid. Standard cells carry
//! their charge dots on the corners, rotated cells on the edge midpoints;
//! a cell's two-electron configuration is summarized by a single
//! polarization in [−1, +1]. Neighboring cells interact through the kink
//! energy — the electrostatic cost of opposing polarizations — and each
//! cell's steady state follows the nonlinear response
//! `P = s / sqrt(1 + s²)` with `s = Σ E_kink·P_neighbor / 2γ`, where γ is
//! the tunneling energy imposed by that cell's clock zone.

use indexmap::IndexMap;
use thiserror::Error;

use crate::clocking::phase_at;
use crate::trace::{Stimuli, StimuliError, Trace};
use crate::types::{logic_of, ClockPhase, ClockZone, LogicLevel, Polarization};

/// Coulomb constant times e²/4 over ε₀, folded to eV·nm units. Only
/// ratios of kink energies matter to the response, but keeping physical
/// units makes the numbers recognizable.
const E_SQUARED_OVER_4_EV_NM: f64 = 1.44 / 4.0; // e²/(4πε₀) = 1.44 eV·nm

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Dots on the cell corners.
    Standard,
    /// Dots on the edge midpoints (45° cell).
    Rotated,
}

/// What drives a cell.
#[derive(Debug, Clone, PartialEq)]
pub enum CellRole {
    /// Relaxes freely under its clock zone.
    Normal,
    /// Driven every tick from the stimulus waveform of the named signal.
    Input(String),
    /// Relaxes freely; its polarization is reported under the given name.
    Output(String),
    /// Pinned to a constant polarization.
    Fixed(Polarization),
}

/// One cell on the grid; `x`, `y` are in units of the cell pitch.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
    pub zone: ClockZone,
    pub role: CellRole,
    pub orientation: Orientation,
}

impl Cell {
    pub fn normal(x: i32, y: i32, zone: ClockZone) -> Self {
        Cell { x, y, zone, role: CellRole::Normal, orientation: Orientation::Standard }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellLayout {
    pub cells: Vec<Cell>,
}

impl CellLayout {
    pub fn input_names(&self) -> Vec<&str> {
        self.cells
            .iter()
            .filter_map(|c| match &c.role {
                CellRole::Input(n) => Some(n.as_str()),
                _ => None,
            })
            .collect()
    }

    pub fn output_names(&self) -> Vec<&str> {
        self.cells
            .iter()
            .filter_map(|c| match &c.role {
                CellRole::Output(n) => Some(n.as_str()),
                _ => None,
            })
            .collect()
    }
}

/// Physical and numerical parameters of the relaxation.
#[derive(Debug, Clone, Copy)]
pub struct EngineParams {
    /// Center-to-center spacing of adjacent cells, nm.
    pub pitch_nm: f64,
    /// Dot offset from the cell center, nm (half the cell size).
    pub dot_offset_nm: f64,
    /// Interaction cutoff, in pitches.
    pub radius_pitches: f64,
    /// Relative permittivity of the substrate.
    pub eps_r: f64,
    /// Ratio of the largest tunneling energy to the strongest adjacent
    /// kink energy (Relax phase).
    pub gamma_max_factor: f64,
    /// Ratio at the bottom of the Switch ramp.
    pub gamma_min_factor: f64,
    /// Sub-steps of the γ ramp within one tick.
    pub ramp_steps: usize,
    /// Convergence threshold on the largest polarization change in one
    /// sweep.
    pub tolerance: f64,
    /// Hard cap on Gauss-Seidel sweeps per sub-step.
    pub max_sweeps: usize,
}

impl Default for EngineParams {
    fn default() -> Self {
        EngineParams {
            pitch_nm: 20.0,
            dot_offset_nm: 9.0,
            radius_pitches: 4.0,
            eps_r: 12.9,
            gamma_max_factor: 10.0,
            gamma_min_factor: 0.01,
            ramp_steps: 10,
            tolerance: 1e-3,
            max_sweeps: 100,
        }
    }
}

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("layout has no cells")]
    Empty,
    #[error("two cells occupy ({0}, {1})")]
    Overlap(i32, i32),
    #[error("duplicate signal name `{0}`")]
    DuplicateName(String),
    #[error(transparent)]
    Stimuli(#[from] StimuliError),
}

/// Dot positions and charge signs for one orientation. Sign +1 marks the
/// dot pair occupied at polarization +1.
fn dots(orientation: Orientation, off: f64) -> [(f64, f64, f64); 4] {
    match orientation {
        Orientation::Standard => [
            (off, off, 1.0),
            (-off, -off, 1.0),
            (-off, off, -1.0),
            (off, -off, -1.0),
        ],
        Orientation::Rotated => [
            (off, 0.0, 1.0),
            (-off, 0.0, 1.0),
            (0.0, off, -1.0),
            (0.0, -off, -1.0),
        ],
    }
}

/// Electrostatic cost of opposing polarizations minus that of agreeing
/// ones, in eV. Positive means the pair prefers to align; adjacent
/// side-by-side cells come out positive, diagonal ones negative.
pub fn kink_energy(a: &Cell, b: &Cell, params: &EngineParams) -> f64 {
    let da = dots(a.orientation, params.dot_offset_nm);
    let db = dots(b.orientation, params.dot_offset_nm);
    let (ax, ay) = (a.x as f64 * params.pitch_nm, a.y as f64 * params.pitch_nm);
    let (bx, by) = (b.x as f64 * params.pitch_nm, b.y as f64 * params.pitch_nm);
    // E(Pa, Pb) = S·Pa·Pb with S the σσ'/r sum; kink = E(+,−) − E(+,+) = −2S
    let mut s = 0.0;
    for (xa, ya, sa) in da {
        for (xb, yb, sb) in db {
            let dx = bx + xb - (ax + xa);
            let dy = by + yb - (ay + ya);
            let r = (dx * dx + dy * dy).sqrt();
            s += sa * sb / r;
        }
    }
    -2.0 * s * E_SQUARED_OVER_4_EV_NM / params.eps_r
}

/// Result of a layout run: raw polarizations per tick plus the
/// thresholded logic waveforms of all named cells.
#[derive(Debug, Clone)]
pub struct LayoutRun {
    /// `polarizations[tick][cell_index]`, after that tick's relaxation.
    pub polarizations: Vec<Vec<f64>>,
    /// Three-valued waveforms of input and output cells.
    pub logic: Trace,
    /// Largest number of Gauss-Seidel sweeps any sub-step needed; equal to
    /// `max_sweeps` if some sub-step ran out of its budget before meeting
    /// the tolerance.
    pub max_sweeps_used: usize,
}

pub struct CellEngine {
    layout: CellLayout,
    params: EngineParams,
    /// Per cell: list of (neighbor index, kink energy) within the cutoff.
    couplings: Vec<Vec<(usize, f64)>>,
    /// Strongest adjacent kink magnitude; sets the γ scale.
    e_scale: f64,
}

impl CellEngine {
    pub fn new(layout: CellLayout, params: EngineParams) -> Result<Self, LayoutError> {
        if layout.cells.is_empty() {
            return Err(LayoutError::Empty);
        }
        let mut seen = std::collections::HashSet::new();
        let mut names = std::collections::HashSet::new();
        for c in &layout.cells {
            if !seen.insert((c.x, c.y)) {
                return Err(LayoutError::Overlap(c.x, c.y));
            }
            if let CellRole::Input(n) | CellRole::Output(n) = &c.role {
                if !names.insert(n.clone()) {
                    return Err(LayoutError::DuplicateName(n.clone()));
                }
            }
        }
        let n = layout.cells.len();
        let cutoff = params.radius_pitches * params.pitch_nm;
        let mut couplings = vec![Vec::new(); n];
        let mut e_scale: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let (a, b) = (&layout.cells[i], &layout.cells[j]);
                let dx = (a.x - b.x) as f64 * params.pitch_nm;
                let dy = (a.y - b.y) as f64 * params.pitch_nm;
                let dist = (dx * dx + dy * dy).sqrt();
                if dist > cutoff {
                    continue;
                }
                let e = kink_energy(a, b, &params);
                if dist <= params.pitch_nm * 1.01 {
                    e_scale = e_scale.max(e.abs());
                }
                couplings[i].push((j, e));
            }
        }
        if e_scale == 0.0 {
            // single cell or pathological spacing; any positive scale works
            e_scale = 1.0;
        }
        Ok(CellEngine { layout, params, couplings, e_scale })
    }

    pub fn layout(&self) -> &CellLayout {
        &self.layout
    }

    /// Tunneling energy for a phase, at ramp sub-step `sub` of
    /// `ramp_steps`. Switch descends geometrically from γ_max to γ_min,
    /// Release climbs back, Hold pins γ_min, Relax pins γ_max.
    fn gamma(&self, phase: ClockPhase, sub: usize) -> f64 {
        let p = &self.params;
        let hi = p.gamma_max_factor * self.e_scale;
        let lo = p.gamma_min_factor * self.e_scale;
        let frac = (sub + 1) as f64 / p.ramp_steps as f64;
        match phase {
            ClockPhase::Switch => hi * (lo / hi).powf(frac),
            ClockPhase::Hold => lo,
            ClockPhase::Release => lo * (hi / lo).powf(frac),
            ClockPhase::Relax => hi,
        }
    }

    /// Runs the layout for `n_ticks` quarter-cycles. Input cells are
    /// re-clamped from the stimulus every tick (cycle = tick / 4); Hold
    /// freezes a zone's polarizations; Switch and Release ramp γ.
    pub fn run(&self, stimuli: &Stimuli, n_ticks: usize) -> Result<LayoutRun, LayoutError> {
        let cells = &self.layout.cells;
        let n = cells.len();
        let mut p = vec![0.0f64; n];
        for (i, c) in cells.iter().enumerate() {
            if let CellRole::Fixed(pol) = &c.role {
                p[i] = pol.value();
            }
        }

        let mut named: Vec<(usize, String)> = Vec::new();
        for (i, c) in cells.iter().enumerate() {
            match &c.role {
                CellRole::Input(nm) | CellRole::Output(nm) => named.push((i, nm.clone())),
                _ => {}
            }
        }
        let mut logic = Trace::new(named.iter().map(|(_, nm)| nm.clone()));
        let mut polarizations = Vec::with_capacity(n_ticks);
        let mut max_sweeps_used = 0usize;

        for tick in 0..n_ticks {
            let cycle = tick / 4;
            // clamp drivers for this cycle
            for (i, c) in cells.iter().enumerate() {
                if let CellRole::Input(nm) = &c.role {
                    p[i] = if stimuli.value(nm, cycle)? { 1.0 } else { -1.0 };
                }
            }
            let phases: [ClockPhase; 4] =
                std::array::from_fn(|z| phase_at(ClockZone::new(z as u8).unwrap(), tick));

            for sub in 0..self.params.ramp_steps {
                let gammas: [f64; 4] = std::array::from_fn(|z| self.gamma(phases[z], sub));
                for sweep in 0..self.params.max_sweeps {
                    max_sweeps_used = max_sweeps_used.max(sweep + 1);
                    let mut delta: f64 = 0.0;
                    for i in 0..n {
                        let c = &cells[i];
                        match &c.role {
                            CellRole::Input(_) | CellRole::Fixed(_) => continue,
                            _ => {}
                        }
                        let zi = c.zone.index() as usize;
                        if phases[zi] == ClockPhase::Hold {
                            continue;
                        }
                        let field: f64 =
                            self.couplings[i].iter().map(|&(j, e)| e * p[j]).sum();
                        let s = field / (2.0 * gammas[zi]);
                        let next = s / (1.0 + s * s).sqrt();
                        delta = delta.max((next - p[i]).abs());
                        p[i] = next;
                    }
                    if delta < self.params.tolerance {
                        break;
                    }
                }
            }

            for (i, nm) in &named {
                let pol = Polarization::clamped(p[*i]);
                logic.push(nm, logic_of(pol, crate::types::DEFAULT_SATURATION_THRESHOLD));
            }
            polarizations.push(p.clone());
        }
        Ok(LayoutRun { polarizations, logic, max_sweeps_used })
    }
}

/// Convenience wrapper: build the engine with default parameters and run.
pub fn simulate_layout(
    layout: CellLayout,
    stimuli: &Stimuli,
    n_ticks: usize,
) -> Result<LayoutRun, LayoutError> {
    CellEngine::new(layout, EngineParams::default())?.run(stimuli, n_ticks)
}

fn input(x: i32, y: i32, zone: ClockZone, name: &str) -> Cell {
    Cell { role: CellRole::Input(name.into()), ..Cell::normal(x, y, zone) }
}

fn output(x: i32, y: i32, zone: ClockZone, name: &str) -> Cell {
    Cell { role: CellRole::Output(name.into()), ..Cell::normal(x, y, zone) }
}

/// Built-in layout primitives. `wire:<len>` runs left to right with two
/// cells per clock zone; the other names are fixed shapes.
pub fn build_primitive(name: &str) -> Option<CellLayout> {
    use ClockZone as Z;
    let mut cells = Vec::new();
    match name {
        _ if name.starts_with("wire:") => {
            let len: usize = name["wire:".len()..].parse().ok().filter(|&l| l >= 2)?;
            for i in 0..len {
                let zone = Z::new(((i / 2) % 4) as u8).unwrap();
                let x = i as i32;
                if i == 0 {
                    cells.push(input(x, 0, zone, "in"));
                } else if i == len - 1 {
                    cells.push(output(x, 0, zone, "out"));
                } else {
                    cells.push(Cell::normal(x, 0, zone));
                }
            }
        }
        "corner" => {
            cells.push(input(0, 0, Z::Z0, "in"));
            cells.push(Cell::normal(1, 0, Z::Z0));
            cells.push(Cell::normal(2, 0, Z::Z0));
            cells.push(Cell::normal(2, 1, Z::Z0));
            cells.push(output(2, 2, Z::Z0, "out"));
        }
        "inverter_a" => {
            // fork into two parallel branches, recombine diagonally
            cells.push(input(0, 0, Z::Z0, "in"));
            cells.push(Cell::normal(1, 0, Z::Z0));
            cells.push(Cell::normal(1, 1, Z::Z0));
            cells.push(Cell::normal(1, -1, Z::Z0));
            cells.push(Cell::normal(2, 1, Z::Z0));
            cells.push(Cell::normal(2, -1, Z::Z0));
            cells.push(output(3, 0, Z::Z0, "out"));
        }
        "inverter_b" => {
            // minimal diagonal-displacement inverter
            cells.push(input(0, 0, Z::Z0, "in"));
            cells.push(Cell::normal(1, 0, Z::Z0));
            cells.push(output(2, 1, Z::Z0, "out"));
        }
        "majority" => {
            cells.push(input(1, 2, Z::Z0, "a"));
            cells.push(input(0, 1, Z::Z0, "b"));
            cells.push(input(1, 0, Z::Z0, "c"));
            cells.push(Cell::normal(1, 1, Z::Z0));
            cells.push(output(2, 1, Z::Z0, "out"));
        }
        "crossover" => {
            // coplanar crossing: a standard-cell horizontal wire with a
            // one-pitch gap, jumped at double distance, and a continuous
            // rotated-cell vertical wire through the junction. Rotated
            // and standard cells at right angles do not couple; the six
            // rotated hops invert an even number of times.
            for x in 0..=6 {
                if x == 3 {
                    continue;
                }
                let c = match x {
                    0 => input(x, 0, Z::Z0, "h_in"),
                    6 => output(x, 0, Z::Z0, "h_out"),
                    _ => Cell::normal(x, 0, Z::Z0),
                };
                cells.push(c);
            }
            for y in -3..=3 {
                let mut c = match y {
                    -3 => input(3, y, Z::Z0, "v_in"),
                    3 => output(3, y, Z::Z0, "v_out"),
                    _ => Cell::normal(3, y, Z::Z0),
                };
                c.orientation = Orientation::Rotated;
                cells.push(c);
            }
        }
        _ => return None,
    }
    Some(CellLayout { cells })
}

/// Names accepted by [`build_primitive`].
pub const PRIMITIVE_NAMES: [&str; 6] =
    ["wire:<len>", "corner", "inverter_a", "inverter_b", "majority", "crossover"];

/// Steady-state logic of a zone-0 layout for one combination of inputs:
/// runs a single Switch/Hold sequence and reads the named outputs at the
/// Hold tick.
pub fn settle_combinational(
    layout: &CellLayout,
    inputs: &[(&str, bool)],
    n_ticks: usize,
) -> Result<IndexMap<String, LogicLevel>, LayoutError> {
    let cycles = n_ticks / 4 + 1;
    let mut stim = Stimuli::new();
    for (name, val) in inputs {
        stim.set(name, vec![*val; cycles]);
    }
    let engine = CellEngine::new(layout.clone(), EngineParams::default())?;
    let run = engine.run(&stim, n_ticks)?;
    let mut out = IndexMap::new();
    for cell in &layout.cells {
        if let CellRole::Output(name) = &cell.role {
            // sample at the latest tick where this cell's zone holds;
            // during Release and Relax it depolarizes by design
            let tick = (0..n_ticks)
                .rev()
                .find(|&t| phase_at(cell.zone, t) == ClockPhase::Hold)
                .unwrap_or(n_ticks - 1);
            let wave = run.logic.get(name).unwrap();
            out.insert(name.to_string(), wave[tick]);
        }
    }
    Ok(out)
}
