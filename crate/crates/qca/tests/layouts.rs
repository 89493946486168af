//! Physical-layer checks: every built-in layout primitive computes its
//! intended function from relaxed cell polarizations, and the coplanar
//! crossover keeps its two channels independent.

use qca::cell::{
    build_primitive, settle_combinational, simulate_layout, CellEngine, EngineParams,
};
use qca::trace::Stimuli;
use qca::types::LogicLevel as L;

fn lvl(b: bool) -> L {
    L::from_bool(b)
}

#[test]
fn wires_of_assorted_lengths_copy_input() {
    for len in [2, 3, 5, 7] {
        let layout = build_primitive(&format!("wire:{len}")).unwrap();
        for v in [false, true] {
            let out = settle_combinational(&layout, &[("in", v)], 8).unwrap();
            assert_eq!(out["out"], lvl(v), "wire:{len} driving {v}");
        }
    }
}

#[test]
fn corner_turns_the_signal() {
    let layout = build_primitive("corner").unwrap();
    for v in [false, true] {
        let out = settle_combinational(&layout, &[("in", v)], 4).unwrap();
        assert_eq!(out["out"], lvl(v), "driving {v}");
    }
}

#[test]
fn both_inverters_invert() {
    for name in ["inverter_a", "inverter_b"] {
        let layout = build_primitive(name).unwrap();
        for v in [false, true] {
            let out = settle_combinational(&layout, &[("in", v)], 4).unwrap();
            assert_eq!(out["out"], lvl(!v), "{name} driving {v}");
        }
    }
}

#[test]
fn majority_layout_matches_truth_table() {
    let layout = build_primitive("majority").unwrap();
    for bits in 0..8 {
        let a = bits & 1 != 0;
        let b = bits & 2 != 0;
        let c = bits & 4 != 0;
        let want = (a && b) || (b && c) || (a && c);
        let out = settle_combinational(&layout, &[("a", a), ("b", b), ("c", c)], 4).unwrap();
        assert_eq!(out["out"], lvl(want), "a={a} b={b} c={c}");
    }
}

/// Both crossover channels transmit, for all four combinations, without
/// influencing each other.
#[test]
fn crossover_channels_are_independent() {
    let layout = build_primitive("crossover").unwrap();
    for h in [false, true] {
        for v in [false, true] {
            let out =
                settle_combinational(&layout, &[("h_in", h), ("v_in", v)], 4).unwrap();
            assert_eq!(out["h_out"], lvl(h), "h={h} v={v} horizontal");
            assert_eq!(out["v_out"], lvl(v), "h={h} v={v} vertical");
        }
    }
}

/// A wire spanning all four zones moves data one zone per quarter cycle:
/// the far end reproduces the input a full cycle later.
#[test]
fn eight_cell_wire_pipelines_by_one_cycle() {
    let layout = build_primitive("wire:8").unwrap();
    let engine = CellEngine::new(layout, EngineParams::default()).unwrap();
    let bits = [true, false, true, true, false, false, true, false];
    let mut stim = Stimuli::new();
    stim.set("in", bits.to_vec());
    let run = engine.run(&stim, bits.len() * 4).unwrap();
    let out = run.logic.get("out").unwrap();
    // the zone-3 tail holds cycle c's bit during tick 4(c+1): sample at
    // its Hold phase (tick 4(c+1), zone 3 holds when tick % 4 == 0)
    for c in 0..bits.len() - 1 {
        assert_eq!(out[4 * (c + 1)], lvl(bits[c]), "cycle {c}");
    }
}

/// The relaxation is deterministic: identical runs give identical
/// polarization histories.
#[test]
fn layout_runs_are_deterministic() {
    let layout = build_primitive("majority").unwrap();
    let mut stim = Stimuli::new();
    stim.set("a", vec![true, false]);
    stim.set("b", vec![false, false]);
    stim.set("c", vec![true, true]);
    let a = simulate_layout(layout.clone(), &stim, 8).unwrap();
    let b = simulate_layout(layout, &stim, 8).unwrap();
    assert_eq!(a.polarizations, b.polarizations);
}
