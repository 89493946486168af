//! Four-phase clock schedule: phase queries per zone and tick, and the
//! 180-degree rule for clock-zone wire crossings.
//!
//! Convention: zone 0 is in Switch at tick 0; zone k runs 90°·k behind, so
//! at tick t zone k is in phase index (t − k) mod 4.

use crate::types::{ClockPhase, ClockZone};

/// Phase of `zone` at quarter-cycle tick `tick`.
pub fn phase_at(zone: ClockZone, tick: usize) -> ClockPhase {
    ClockPhase::from_index((tick + 4 - zone.index()) % 4)
}

/// The unique zone in Switch at `tick`.
pub fn switching_zone(tick: usize) -> ClockZone {
    ClockZone::new((tick % 4) as u8).unwrap()
}

/// True iff the two zones are 180° apart and may form a coplanar
/// clock-zone crossover.
pub fn zones_crossable(z1: ClockZone, z2: ClockZone) -> bool {
    (z1.index() + 4 - z2.index()) % 4 == 2
}

/// Precomputed phase table over a finite horizon of ticks.
#[derive(Debug, Clone)]
pub struct ClockSchedule {
    n_ticks: usize,
}

impl ClockSchedule {
    pub fn new(n_ticks: usize) -> Self {
        ClockSchedule { n_ticks }
    }

    pub fn n_ticks(&self) -> usize {
        self.n_ticks
    }

    pub fn phase(&self, zone: ClockZone, tick: usize) -> Option<ClockPhase> {
        (tick < self.n_ticks).then(|| phase_at(zone, tick))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phase_origin_and_stagger() {
        assert_eq!(phase_at(ClockZone::Z0, 0), ClockPhase::Switch);
        assert_eq!(phase_at(ClockZone::Z1, 1), ClockPhase::Switch);
        assert_eq!(phase_at(ClockZone::Z0, 1), ClockPhase::Hold);
        // zone k enters Switch one tick after zone k-1
        for k in 1..4u8 {
            let z = ClockZone::new(k).unwrap();
            assert_eq!(phase_at(z, k as usize), ClockPhase::Switch);
        }
    }

    #[test]
    fn crossable_pairs() {
        assert!(zones_crossable(ClockZone::Z0, ClockZone::Z2));
        assert!(zones_crossable(ClockZone::Z1, ClockZone::Z3));
        assert!(!zones_crossable(ClockZone::Z0, ClockZone::Z1));
        assert!(!zones_crossable(ClockZone::Z2, ClockZone::Z2));
    }

    proptest! {
        #[test]
        fn one_switch_four_distinct_phases(tick in 0usize..1000) {
            let phases: Vec<_> = ClockZone::ALL.iter().map(|&z| phase_at(z, tick)).collect();
            let switches = phases.iter().filter(|&&p| p == ClockPhase::Switch).count();
            prop_assert_eq!(switches, 1);
            for i in 0..4 {
                for j in (i + 1)..4 {
                    prop_assert_ne!(phases[i], phases[j]);
                }
            }
            prop_assert_eq!(phase_at(switching_zone(tick), tick), ClockPhase::Switch);
        }

        #[test]
        fn periodic_in_tick(tick in 0usize..1000, k in 0u8..4) {
            let z = ClockZone::new(k).unwrap();
            prop_assert_eq!(phase_at(z, tick), phase_at(z, tick + 4));
        }
    }
}
