//! Independent reference models and the verification harness.
//!
//! The references here never look at a netlist: they are direct
//! transcriptions of the circuits' defining equations, evaluated in the
//! same three-valued logic and in the per-cycle ("frame") time base. The
//! gate-level simulator is checked against them by sampling each output at
//! tick `4·c + offset` and comparing with the reference value for frame
//! `c`.

use indexmap::IndexMap;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;
use thiserror::Error;

use crate::behavioral::{simulate, SimError, SimOptions};
use crate::circuits::{build, CatalogError, CircuitHandle};
use crate::trace::Stimuli;
use crate::types::LogicLevel as L;

/// Flip-flop behavior selected by the control pair (C1, C2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlipFlopMode {
    D,
    T,
    Jk,
}

impl FlipFlopMode {
    /// (C1, C2) = (0,0) → D, (0,1) → T, (1,·) → JK.
    pub fn from_controls(c1: bool, c2: bool) -> Self {
        match (c1, c2) {
            (false, false) => FlipFlopMode::D,
            (false, true) => FlipFlopMode::T,
            (true, _) => FlipFlopMode::Jk,
        }
    }
}

/// Pulse polarity selected by the control pair (C3, C4).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeMode {
    None,
    Rising,
    Falling,
    Dual,
}

impl EdgeMode {
    /// C3 enables falling-edge pulses, C4 rising-edge pulses.
    pub fn from_controls(c3: bool, c4: bool) -> Self {
        match (c3, c4) {
            (false, false) => EdgeMode::None,
            (false, true) => EdgeMode::Rising,
            (true, false) => EdgeMode::Falling,
            (true, true) => EdgeMode::Dual,
        }
    }

    pub fn controls(self) -> (bool, bool) {
        match self {
            EdgeMode::None => (false, false),
            EdgeMode::Rising => (false, true),
            EdgeMode::Falling => (true, false),
            EdgeMode::Dual => (true, true),
        }
    }
}

fn lvl(b: bool) -> L {
    if b {
        L::One
    } else {
        L::Zero
    }
}

/// F1 = A·C2 + Ā·C̄2 (XNOR).
pub fn cff_f1(a: L, c2: L) -> L {
    a.and(c2).or(a.not().and(c2.not()))
}

/// F2 = B·C1 + F1·C̄1 (2:1 MUX on C1).
pub fn cff_f2(a: L, b: L, c1: L, c2: L) -> L {
    b.and(c1).or(cff_f1(a, c2).and(c1.not()))
}

/// Level-triggered JK law: Q⁺ = (J·Q̄ + K̄·Q)·CLK + C̄LK·Q.
pub fn jk_next(j: L, k: L, clk: L, q: L) -> L {
    let excited = j.and(q.not()).or(k.not().and(q));
    excited.and(clk).or(clk.not().and(q))
}

/// One frame of the configurable flip-flop: a JK with J = A, K = F2.
pub fn cff_next(a: L, b: L, c1: L, c2: L, clk: L, q: L) -> L {
    jk_next(a, cff_f2(a, b, c1, c2), clk, q)
}

/// The flip-flop characteristic equation in raw sum-of-products form,
/// written independently of the F1/F2 decomposition:
/// Q⁺ = {A·Q̄ + NOT(B·C1 + A·C2·C̄1 + Ā·C̄1·C̄2)·Q}·CLK + C̄LK·Q.
pub fn eval_cff_equation(a: bool, b: bool, c1: bool, c2: bool, clk: bool, q: bool) -> bool {
    let k = (b && c1) || (a && c2 && !c1) || (!a && !c1 && !c2);
    let excited = (a && !q) || (!k && q);
    (excited && clk) || (!clk && q)
}

/// Pulse extraction from consecutive clock samples:
/// Out1 = C̄LK·C3·CLKold (falling), Out2 = CLK·C4·C̄LKold (rising).
pub fn cpg_reference(c3: L, c4: L, prev_clk: L, clk: L) -> (L, L, L) {
    let out1 = clk.not().and(c3).and(prev_clk);
    let out2 = clk.and(c4).and(prev_clk.not());
    (out1, out2, out1.or(out2))
}

/// Convenience wrapper: the pulse a given edge mode produces for a clock
/// transition `prev → cur`.
pub fn edge_extract(mode: EdgeMode, prev: L, cur: L) -> L {
    let (c3, c4) = mode.controls();
    cpg_reference(lvl(c3), lvl(c4), prev, cur).2
}

/// Delay selector: Output = C3·CLK + C̄3·CLKold.
pub fn dcc_reference(c3: L, prev_clk: L, clk: L) -> L {
    clk.and(c3).or(prev_clk.and(c3.not()))
}

/// Input sampling for references: frame −1 and earlier read the
/// prehistory level (X by default, 0 when the simulator was started with
/// `init_zero`).
fn sv(stim: &Stimuli, name: &str, frame: isize, pre: L) -> Result<L, VerifyError> {
    if frame < 0 {
        Ok(pre)
    } else {
        Ok(lvl(stim.value(name, frame as usize)?))
    }
}

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Stimuli(#[from] crate::trace::StimuliError),
    #[error("no reference model for circuit `{0}`")]
    NoReference(String),
    #[error("circuit `{0}` has no output `{1}`")]
    NoSuchOutput(String, String),
}

/// Per-output reference waveforms in the frame time base: element `c` of
/// each vector is the value that should appear on that output at tick
/// `4·c + output_offset`.
pub fn reference_outputs(
    handle: &CircuitHandle,
    stim: &Stimuli,
    n_frames: usize,
    opts: SimOptions,
) -> Result<IndexMap<String, Vec<L>>, VerifyError> {
    let pre = if opts.init_zero { L::Zero } else { L::X };
    let name = handle.name.as_str();
    let g = |nm: &str, c: isize| sv(stim, nm, c, pre);
    let mut out: IndexMap<String, Vec<L>> = IndexMap::new();
    let mut push = |nm: &str, vals: Vec<L>| out.insert(nm.to_string(), vals);

    match name {
        "xnor" => {
            let mut f = Vec::new();
            for c in 0..n_frames as isize {
                f.push(cff_f1(g("A", c)?, g("C2", c)?));
            }
            push("F1", f);
        }
        "mux21" => {
            let mut f = Vec::new();
            for c in 0..n_frames as isize {
                // the F1 leg is an explicit input here
                let sel = g("C1", c)?;
                f.push(g("B", c)?.and(sel).or(g("F1", c)?.and(sel.not())));
            }
            push("F2", f);
        }
        "cpg" => {
            let (mut o1, mut o2, mut op) = (Vec::new(), Vec::new(), Vec::new());
            for c in 0..n_frames as isize {
                let (a, b, p) =
                    cpg_reference(g("C3", c)?, g("C4", c)?, g("CLK", c - 1)?, g("CLK", c)?);
                o1.push(a);
                o2.push(b);
                op.push(p);
            }
            push("Out1", o1);
            push("Out2", o2);
            push("Output", op);
        }
        "dcc" => {
            let mut o = Vec::new();
            for c in 0..n_frames as isize {
                o.push(dcc_reference(g("C3", c)?, g("CLK", c - 1)?, g("CLK", c)?));
            }
            push("Output", o);
        }
        "jk" => {
            let mut q = pre;
            let (mut qs, mut qbs) = (Vec::new(), Vec::new());
            for c in 0..n_frames as isize {
                qs.push(q);
                qbs.push(q.not());
                q = jk_next(g("J", c)?, g("K", c)?, g("CLK", c)?, q);
            }
            push("Q", qs);
            push("Qbar", qbs);
        }
        "cff" => {
            let mut q = pre;
            let (mut qs, mut qbs) = (Vec::new(), Vec::new());
            for c in 0..n_frames as isize {
                qs.push(q);
                qbs.push(q.not());
                q = cff_next(g("A", c)?, g("B", c)?, g("C1", c)?, g("C2", c)?, g("CLK", c)?, q);
            }
            push("Q", qs);
            push("Qbar", qbs);
        }
        "ecff" => {
            let mut q = pre;
            let (mut qs, mut qbs) = (Vec::new(), Vec::new());
            for c in 0..n_frames as isize {
                qs.push(q);
                qbs.push(q.not());
                let (_, _, pulse) =
                    cpg_reference(g("C3", c)?, g("C4", c)?, g("CLK", c - 1)?, g("CLK", c)?);
                q = cff_next(g("A", c)?, g("B", c)?, g("C1", c)?, g("C2", c)?, pulse, q);
            }
            push("Q", qs);
            push("Qbar", qbs);
        }
        "ram1" => {
            let mut q = pre;
            let mut os = Vec::new();
            for c in 0..n_frames as isize {
                let (inp, en, wr) = (g("Input", c)?, g("Enable", c)?, g("WriteRead", c)?);
                os.push(q.and(en.and(wr)));
                let wsel = en.and(wr.not());
                q = cff_next(inp.and(wsel), L::Zero, wsel.not(), L::Zero, L::One, q);
            }
            push("Out", os);
        }
        _ if name.starts_with("counter_shift:") => {
            let n: usize = name["counter_shift:".len()..].parse().unwrap();
            let mut q = vec![pre; n];
            let mut per_stage: Vec<Vec<L>> = vec![Vec::new(); n];
            for c in 0..n_frames as isize {
                for i in 0..n {
                    per_stage[i].push(q[i]);
                }
                let (mode, b, c1, c2) = (g("mode", c)?, g("B", c)?, g("C1", c)?, g("C2", c)?);
                let (_, _, trig) =
                    cpg_reference(g("C3", c)?, g("C4", c)?, g("CLK", c - 1)?, g("CLK", c)?);
                let mut next = q.clone();
                let mut carry = L::One;
                for i in 0..n {
                    let serial = if i == 0 { g("A", c)? } else { q[i - 1] };
                    if i > 0 {
                        carry = carry.and(q[i - 1]);
                    }
                    let ripple = if i == 0 { L::One } else { carry };
                    let data = ripple.and(mode).or(serial.and(mode.not()));
                    next[i] = cff_next(data, b, c1, c2, trig, q[i]);
                }
                q = next;
            }
            for (i, vals) in per_stage.into_iter().enumerate() {
                push(&format!("Q{i}"), vals);
            }
        }
        other => return Err(VerifyError::NoReference(other.to_string())),
    }
    Ok(out)
}

/// One verification check: a label plus pass/fail and a short diagnostic.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub label: String,
    pub pass: bool,
    pub detail: String,
}

/// Outcome of verifying one circuit.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub circuit: String,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new(circuit: impl Into<String>) -> Self {
        VerificationReport { circuit: circuit.into(), checks: Vec::new() }
    }

    pub fn record(&mut self, label: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(CheckResult { label: label.into(), pass, detail: detail.into() });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn n_failed(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    /// Stable line-oriented form: `circuit<TAB>label<TAB>PASS|FAIL<TAB>detail`.
    pub fn render_machine(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            s.push_str(&format!("{}\t{}\t{}\t{}\n", self.circuit, c.label, verdict, c.detail));
        }
        s
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.checks.len();
        let failed = self.n_failed();
        writeln!(
            f,
            "{}: {}/{} checks passed{}",
            self.circuit,
            n - failed,
            n,
            if failed == 0 { "" } else { " *** FAILURES ***" }
        )?;
        for c in &self.checks {
            if c.pass {
                writeln!(f, "  [ok] {}", c.label)?;
            } else {
                writeln!(f, "  [FAIL] {}: {}", c.label, c.detail)?;
            }
        }
        Ok(())
    }
}

/// One steady-state verification point: a stimulus, a frame at which to
/// sample, and the expected output levels at that frame.
#[derive(Debug, Clone)]
pub struct TruthDomainPoint {
    pub label: String,
    pub stimuli: Stimuli,
    pub read_frame: usize,
    pub expect: IndexMap<String, L>,
}

fn fmt_lvl(l: L) -> char {
    match l {
        L::Zero => '0',
        L::One => '1',
        L::X => 'X',
    }
}

/// Simulates each point and compares the listed outputs at tick
/// `4·read_frame + output_offset`.
pub fn verify_truth_table(
    handle: &CircuitHandle,
    points: &[TruthDomainPoint],
    opts: SimOptions,
) -> Result<VerificationReport, VerifyError> {
    let mut report = VerificationReport::new(handle.name.clone());
    let max_off = handle.output_offsets.values().copied().max().unwrap_or(0);
    for pt in points {
        let n_cycles = (4 * pt.read_frame + max_off) / 4 + 1;
        let trace = simulate(&handle.netlist, &pt.stimuli, n_cycles, opts)?;
        let mut pass = true;
        let mut detail = String::new();
        for (out, want) in &pt.expect {
            let off = *handle
                .output_offsets
                .get(out)
                .ok_or_else(|| VerifyError::NoSuchOutput(handle.name.clone(), out.clone()))?;
            let tick = 4 * pt.read_frame + off;
            let got = trace.get(out).unwrap()[tick];
            if got != *want {
                pass = false;
                detail.push_str(&format!(
                    "{out}: expected {}, observed {} at tick {tick}; ",
                    fmt_lvl(*want),
                    fmt_lvl(got)
                ));
            }
        }
        report.record(&pt.label, pass, detail.trim_end_matches("; ").to_string());
    }
    Ok(report)
}

/// Cycle-accurate equivalence between the gate-level simulation of a
/// stimulus and the reference automaton, skipping `skip_frames` of warm-up.
pub fn verify_sequence(
    handle: &CircuitHandle,
    stim: &Stimuli,
    n_cycles: usize,
    skip_frames: usize,
    opts: SimOptions,
    label: &str,
) -> Result<VerificationReport, VerifyError> {
    let mut report = VerificationReport::new(handle.name.clone());
    let trace = simulate(&handle.netlist, stim, n_cycles, opts)?;
    let refs = reference_outputs(handle, stim, n_cycles, opts)?;
    for (out, expected) in &refs {
        let off = handle.output_offsets[out.as_str()];
        let last_frame = if 4 * n_cycles > off { (4 * n_cycles - 1 - off) / 4 } else { 0 };
        let observed = trace.get(out).unwrap();
        let mut mismatches = 0usize;
        let mut first = String::new();
        let mut compared = 0usize;
        for c in skip_frames..=last_frame.min(expected.len().saturating_sub(1)) {
            let got = observed[4 * c + off];
            compared += 1;
            if got != expected[c] {
                if mismatches == 0 {
                    first = format!(
                        "first mismatch at frame {c}: expected {}, observed {}",
                        fmt_lvl(expected[c]),
                        fmt_lvl(got)
                    );
                }
                mismatches += 1;
            }
        }
        report.record(
            format!("{label}: {out} ({compared} frames)"),
            mismatches == 0,
            if mismatches == 0 { String::new() } else { format!("{mismatches} mismatches; {first}") },
        );
    }
    Ok(report)
}

/// Exhaustive 64-point domain for the flip-flop characteristic equation.
///
/// Each point preloads the present state through D-mode writes, applies the
/// point's inputs for one cycle, then parks the clock low and samples Q.
pub fn cff_truth_points() -> Vec<TruthDomainPoint> {
    let mut points = Vec::new();
    const PRELOAD: usize = 6;
    for bits in 0..64u32 {
        let a = bits & 1 != 0;
        let b = bits & 2 != 0;
        let c1 = bits & 4 != 0;
        let c2 = bits & 8 != 0;
        let clk = bits & 16 != 0;
        let q = bits & 32 != 0;
        let expect_q = eval_cff_equation(a, b, c1, c2, clk, q);

        let cycles = PRELOAD + 3;
        let col = |warm: bool, val: bool| -> Vec<bool> {
            let mut v = vec![warm; PRELOAD];
            v.extend([val, val, val]);
            v
        };
        let mut stim = Stimuli::new();
        stim.set("A", col(q, a));
        stim.set("B", col(false, b));
        stim.set("C1", col(false, c1));
        stim.set("C2", col(false, c2));
        // preload with the clock high (transparent D), then one cycle of
        // the point's clock level, then hold low while the value drains
        // through the output tail
        let mut clk_bits = vec![true; PRELOAD];
        clk_bits.extend([clk, false, false]);
        stim.set("CLK", clk_bits);
        debug_assert_eq!(stim.inputs()["A"].len(), cycles);

        let mut expect = IndexMap::new();
        expect.insert("Q".to_string(), lvl(expect_q));
        expect.insert("Qbar".to_string(), lvl(!expect_q));
        points.push(TruthDomainPoint {
            label: format!(
                "A={} B={} C1={} C2={} CLK={} Q={} -> Q'={}",
                a as u8, b as u8, c1 as u8, c2 as u8, clk as u8, q as u8, expect_q as u8
            ),
            stimuli: stim,
            read_frame: PRELOAD + 1,
            expect,
        });
    }
    points
}

/// Pulse table for the clock pulse generator: every edge mode crossed with
/// every clock transition, checked one transition at a time.
pub fn cpg_truth_points() -> Vec<TruthDomainPoint> {
    let mut points = Vec::new();
    for (c3, c4) in [(true, false), (false, true), (true, true), (false, false)] {
        for (prev, cur) in [(false, false), (false, true), (true, false), (true, true)] {
            let mode = EdgeMode::from_controls(c3, c4);
            let pulse = edge_extract(mode, lvl(prev), lvl(cur));
            let (o1, o2, _) = cpg_reference(lvl(c3), lvl(c4), lvl(prev), lvl(cur));
            let mut stim = Stimuli::new();
            stim.set("C3", vec![c3; 3]);
            stim.set("C4", vec![c4; 3]);
            stim.set("CLK", vec![prev, cur, cur]);
            let mut expect = IndexMap::new();
            expect.insert("Out1".to_string(), o1);
            expect.insert("Out2".to_string(), o2);
            expect.insert("Output".to_string(), pulse);
            points.push(TruthDomainPoint {
                label: format!(
                    "{mode:?} CLK {}->{}: pulse {}",
                    prev as u8,
                    cur as u8,
                    fmt_lvl(pulse)
                ),
                stimuli: stim,
                read_frame: 1,
                expect,
            });
        }
    }
    points
}

/// Delay-selector table: both C3 settings crossed with all clock
/// transitions.
pub fn dcc_truth_points() -> Vec<TruthDomainPoint> {
    let mut points = Vec::new();
    for c3 in [false, true] {
        for (prev, cur) in [(false, false), (false, true), (true, false), (true, true)] {
            let want = dcc_reference(lvl(c3), lvl(prev), lvl(cur));
            let mut stim = Stimuli::new();
            stim.set("C3", vec![c3; 3]);
            stim.set("CLK", vec![prev, cur, cur]);
            let mut expect = IndexMap::new();
            expect.insert("Output".to_string(), want);
            points.push(TruthDomainPoint {
                label: format!(
                    "C3={} CLK {}->{}: out {}",
                    c3 as u8,
                    prev as u8,
                    cur as u8,
                    fmt_lvl(want)
                ),
                stimuli: stim,
                read_frame: 1,
                expect,
            });
        }
    }
    points
}

/// All four input points of the XNOR stage.
pub fn xnor_truth_points() -> Vec<TruthDomainPoint> {
    let mut points = Vec::new();
    for a in [false, true] {
        for c2 in [false, true] {
            let want = lvl(a == c2);
            let mut stim = Stimuli::new();
            stim.set("A", vec![a]);
            stim.set("C2", vec![c2]);
            let mut expect = IndexMap::new();
            expect.insert("F1".to_string(), want);
            points.push(TruthDomainPoint {
                label: format!("A={} C2={}", a as u8, c2 as u8),
                stimuli: stim,
                read_frame: 0,
                expect,
            });
        }
    }
    points
}

/// All eight input points of the 2:1 multiplexer stage.
pub fn mux21_truth_points() -> Vec<TruthDomainPoint> {
    let mut points = Vec::new();
    for b in [false, true] {
        for f1 in [false, true] {
            for c1 in [false, true] {
                let want = lvl(if c1 { b } else { f1 });
                let mut stim = Stimuli::new();
                stim.set("B", vec![b]);
                stim.set("F1", vec![f1]);
                stim.set("C1", vec![c1]);
                let mut expect = IndexMap::new();
                expect.insert("F2".to_string(), want);
                points.push(TruthDomainPoint {
                    label: format!("B={} F1={} C1={}", b as u8, f1 as u8, c1 as u8),
                    stimuli: stim,
                    read_frame: 0,
                    expect,
                });
            }
        }
    }
    points
}

/// Uniform random bit stimulus over the circuit's declared inputs.
pub fn random_stimuli(rng: &mut ChaCha8Rng, inputs: &[String], n_cycles: usize) -> Stimuli {
    let mut stim = Stimuli::new();
    for name in inputs {
        stim.set(name, (0..n_cycles).map(|_| rng.gen_bool(0.5)).collect());
    }
    stim
}

/// Number of warm-up frames to skip before comparing a circuit against its
/// reference: enough for every internal delay chain to flush its initial
/// levels.
fn warmup_frames(name: &str) -> usize {
    if let Some(rest) = name.strip_prefix("counter_shift:") {
        let n: usize = rest.parse().unwrap_or(1);
        n + 2
    } else {
        2
    }
}

/// Runs the complete catalog verification: exhaustive steady-state tables
/// where they exist, plus seeded random sequence equivalence for every
/// circuit.
pub fn run_full_verification(seed: u64) -> Result<Vec<VerificationReport>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reports = Vec::new();
    let names = [
        "xnor",
        "mux21",
        "jk",
        "cff",
        "ram1",
        "cpg",
        "dcc",
        "ecff",
        "counter_shift:2",
        "counter_shift:3",
    ];
    for name in names {
        let handle = build(name)?;
        let opts_x = SimOptions::default();
        let opts0 = SimOptions { init_zero: true };

        let mut report = match name {
            "xnor" => verify_truth_table(&handle, &xnor_truth_points(), opts_x)?,
            "mux21" => verify_truth_table(&handle, &mux21_truth_points(), opts_x)?,
            "cff" => verify_truth_table(&handle, &cff_truth_points(), opts0)?,
            "cpg" => verify_truth_table(&handle, &cpg_truth_points(), opts_x)?,
            "dcc" => verify_truth_table(&handle, &dcc_truth_points(), opts_x)?,
            _ => VerificationReport::new(name),
        };

        let n_cycles = 40 + handle.declared_latency / 4 + 2;
        let skip = warmup_frames(name);
        for trial in 0..4 {
            let stim = random_stimuli(&mut rng, &handle.inputs, n_cycles);
            let seq =
                verify_sequence(&handle, &stim, n_cycles, skip, opts0, &format!("random #{trial}"))?;
            report.checks.extend(seq.checks);
        }
        reports.push(report);
    }
    Ok(reports)
}
