//! Exact load planning under the lexicographic objective
//! (containers loaded ↑, railcar length used ↓, container length loaded ↑),
//! plus an exhaustive oracle and a solution checker.

mod brute;
mod counts;
mod exact;
mod verify;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fleet::{ContainerLength, Fleet, LoadingPattern, NUM_LENGTHS, NUM_RAILCAR_TYPES};
use crate::sampling::FullInstance;

pub use brute::{brute_force_lpp, brute_force_lpp_with, BruteForceLimits};
pub use counts::{count_feasible, count_feasible_dp, PlatformKind, PlatformKinds};
pub use verify::verify_solution;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slot {
    Bottom,
    Top,
}

/// One container placed in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub container: usize,
    pub length: ContainerLength,
    pub type_id: u8,
    pub railcar_index: u32,
    pub platform: usize,
    pub slot: Slot,
}

/// Pattern choice for every platform of one railcar.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RailcarLoad {
    pub type_id: u8,
    pub railcar_index: u32,
    pub patterns: Vec<LoadingPattern>,
}

/// Objective triple. `Ord` ranks better solutions higher.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LexObjective {
    pub loaded_containers: u32,
    pub used_railcar_length: u32,
    pub loaded_container_length: u32,
}

impl LexObjective {
    pub fn triple(&self) -> (u32, u32, u32) {
        (
            self.loaded_containers,
            self.used_railcar_length,
            self.loaded_container_length,
        )
    }
}

impl Ord for LexObjective {
    fn cmp(&self, other: &Self) -> Ordering {
        self.loaded_containers
            .cmp(&other.loaded_containers)
            .then(other.used_railcar_length.cmp(&self.used_railcar_length))
            .then(self.loaded_container_length.cmp(&other.loaded_container_length))
    }
}

impl PartialOrd for LexObjective {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Maps objective triples to integers `M²·loaded − M·used + length` with
/// `M` large enough that integer order equals lexicographic order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scalarizer {
    pub m: i64,
    pub max_used_length: u32,
    pub max_loaded_length: u32,
}

impl Scalarizer {
    pub fn new(max_used_length: u32, max_loaded_length: u32) -> Self {
        let m = max_used_length as i64 + max_loaded_length as i64 + 1;
        let s = Scalarizer {
            m,
            max_used_length,
            max_loaded_length,
        };
        s.assert_order_preserving();
        s
    }

    /// Bounds for one instance: all its railcars used, all its containers loaded.
    pub fn for_instance(sketch: &crate::sampling::InstanceSketch, fleet: &Fleet) -> Self {
        let used: u32 = sketch
            .railcar_counts
            .iter()
            .zip(fleet.lengths_per_type())
            .map(|(r, l)| r * l)
            .sum();
        let loaded: u32 = ContainerLength::ALL
            .iter()
            .map(|l| sketch.container_counts[l.index()] * l.feet())
            .sum();
        Scalarizer::new(used, loaded)
    }

    /// A change of one container must outweigh the whole span of the
    /// lower-priority terms, and a change of one foot of railcar length
    /// must outweigh the whole span of loaded length. Also rules out
    /// overflow at the largest attainable values.
    fn assert_order_preserving(&self) {
        let m = self.m as i128;
        let used = self.max_used_length as i128;
        let loaded = self.max_loaded_length as i128;
        assert!(m * m > m * used + loaded, "scalarization constant too small");
        assert!(m > loaded, "scalarization constant too small");
        let top = m * m * (loaded + 1) + loaded;
        assert!(top < i64::MAX as i128, "scalarized objective would overflow");
    }

    pub fn value(&self, o: &LexObjective) -> i64 {
        debug_assert!(o.used_railcar_length <= self.max_used_length);
        debug_assert!(o.loaded_container_length <= self.max_loaded_length);
        self.m * self.m * o.loaded_containers as i64 - self.m * o.used_railcar_length as i64
            + o.loaded_container_length as i64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetailedSolution {
    /// Railcars with at least one loaded slot, in (type, index) order.
    /// Railcars not listed carry the empty pattern on every platform.
    pub railcars: Vec<RailcarLoad>,
    pub placements: Vec<Placement>,
    pub objective: LexObjective,
    /// The search stopped at the node limit; the solution is feasible but
    /// may not be optimal.
    pub node_limit_hit: bool,
}

impl DetailedSolution {
    pub fn empty() -> Self {
        DetailedSolution {
            railcars: Vec::new(),
            placements: Vec::new(),
            objective: LexObjective::default(),
            node_limit_hit: false,
        }
    }

    pub fn loaded_per_length(&self) -> [u32; NUM_LENGTHS] {
        let mut c = [0; NUM_LENGTHS];
        for p in &self.placements {
            c[p.length.index()] += 1;
        }
        c
    }

    pub fn used_per_type(&self) -> [u32; NUM_RAILCAR_TYPES] {
        let mut u = [0; NUM_RAILCAR_TYPES];
        for r in &self.railcars {
            if r.patterns.iter().any(|p| !p.is_empty()) {
                u[r.type_id as usize - 1] += 1;
            }
        }
        u
    }
}

/// Objective of a set of placements, derived from the placements alone.
pub fn objective_of(placements: &[Placement], fleet: &Fleet) -> LexObjective {
    let mut cars: Vec<(u8, u32)> = placements.iter().map(|p| (p.type_id, p.railcar_index)).collect();
    cars.sort_unstable();
    cars.dedup();
    LexObjective {
        loaded_containers: placements.len() as u32,
        used_railcar_length: cars
            .iter()
            .map(|(t, _)| fleet.railcar_type(*t as usize - 1).total_length())
            .sum(),
        loaded_container_length: placements.iter().map(|p| p.length.feet()).sum(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SolveMode {
    Exact,
    /// Accept a solution whose scalarized value is within a relative gap
    /// of an upper bound.
    Gap(f64),
}

/// Tie-break rule for equally good solutions. Only one is implemented:
/// lower railcar type id, lower railcar index, lower platform index, lower
/// pattern index, heavier container first within a length, lower container
/// id on equal weights.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieBreak {
    #[default]
    Canonical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mode: SolveMode,
    pub tie_break: TieBreak,
    /// Search nodes allowed per solve before falling back to best-found.
    pub node_limit: Option<u64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            mode: SolveMode::Exact,
            tie_break: TieBreak::Canonical,
            node_limit: None,
        }
    }
}

impl SolverConfig {
    pub fn exact() -> Self {
        SolverConfig::default()
    }

    pub fn gap(epsilon: f64) -> Self {
        SolverConfig {
            mode: SolveMode::Gap(epsilon),
            ..SolverConfig::default()
        }
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = Some(limit);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let SolveMode::Gap(eps) = self.mode {
            if !(eps.is_finite() && eps >= 0.0) {
                return Err(Error::Config(format!(
                    "optimality gap must be a nonnegative number, got {eps}"
                )));
            }
        }
        Ok(())
    }
}

/// Solve one instance. Pure and deterministic in its arguments.
pub fn solve_lpp(instance: &FullInstance, fleet: &Fleet, config: &SolverConfig) -> Result<DetailedSolution> {
    config.validate()?;
    instance.validate(fleet)?;
    let scal = Scalarizer::for_instance(&instance.sketch, fleet);
    match config.mode {
        SolveMode::Exact => exact::solve(instance, fleet, config.node_limit),
        SolveMode::Gap(0.0) => exact::solve(instance, fleet, config.node_limit),
        SolveMode::Gap(eps) => {
            let bound = exact::upper_bound(instance, fleet);
            let quick = exact::solve(instance, fleet, Some(GAP_PROBE_NODES))?;
            let ub = scal.value(&bound) as f64;
            if scal.value(&quick.objective) as f64 >= (1.0 - eps) * ub {
                Ok(DetailedSolution {
                    node_limit_hit: false,
                    ..quick
                })
            } else {
                exact::solve(instance, fleet, config.node_limit)
            }
        }
    }
}

/// Node budget of the quick first pass in gap mode.
const GAP_PROBE_NODES: u64 = 2_000;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::InstanceSketch;

    fn single_type(fleet: &Fleet, type_id: usize) -> [u32; NUM_RAILCAR_TYPES] {
        let mut r = [0; NUM_RAILCAR_TYPES];
        r[type_id - 1] = 1;
        let _ = fleet;
        r
    }

    #[test]
    fn lexicographic_order() {
        let a = LexObjective {
            loaded_containers: 3,
            used_railcar_length: 200,
            loaded_container_length: 120,
        };
        let b = LexObjective {
            loaded_containers: 2,
            used_railcar_length: 40,
            loaded_container_length: 106,
        };
        let c = LexObjective {
            used_railcar_length: 160,
            ..a
        };
        let d = LexObjective {
            loaded_container_length: 133,
            ..a
        };
        assert!(a > b && c > a && d > a);
    }

    #[test]
    fn scalarization_preserves_order_on_extremes() {
        let s = Scalarizer::new(5300, 15900);
        let objs = [
            LexObjective {
                loaded_containers: 1,
                used_railcar_length: 5300,
                loaded_container_length: 40,
            },
            LexObjective {
                loaded_containers: 0,
                used_railcar_length: 0,
                loaded_container_length: 0,
            },
            LexObjective {
                loaded_containers: 300,
                used_railcar_length: 5300,
                loaded_container_length: 12000,
            },
            LexObjective {
                loaded_containers: 299,
                used_railcar_length: 0,
                loaded_container_length: 15900,
            },
            LexObjective {
                loaded_containers: 300,
                used_railcar_length: 5299,
                loaded_container_length: 0,
            },
        ];
        for a in &objs {
            for b in &objs {
                assert_eq!(a.cmp(b), s.value(a).cmp(&s.value(b)), "{a:?} {b:?}");
            }
        }
    }

    #[test]
    fn empty_instance() {
        let fleet = Fleet::default_fleet();
        let inst = FullInstance {
            sketch: InstanceSketch::new([2; 10], [0, 0]),
            weights: [vec![], vec![]],
        };
        let sol = solve_lpp(&inst, &fleet, &SolverConfig::exact()).unwrap();
        assert_eq!(sol.objective.triple(), (0, 0, 0));
        assert!(sol.railcars.is_empty() && sol.placements.is_empty());
    }

    #[test]
    fn single_fifty_three_platform_takes_both() {
        let fleet = Fleet::default_fleet();
        // type 5: one 53 ft platform, top slot 53-capable
        let inst = FullInstance {
            sketch: InstanceSketch::new(single_type(&fleet, 5), [1, 1]),
            weights: [vec![12_000.0], vec![11_000.0]],
        };
        let sol = solve_lpp(&inst, &fleet, &SolverConfig::exact()).unwrap();
        assert_eq!(sol.objective.triple(), (2, 53, 93));
        assert!(verify_solution(&inst, &fleet, &sol));
        let brute = brute_force_lpp(&inst, &fleet).unwrap();
        assert_eq!(brute.objective.triple(), (2, 53, 93));
    }

    #[test]
    fn inconsistent_instance_rejected() {
        let fleet = Fleet::default_fleet();
        let inst = FullInstance {
            sketch: InstanceSketch::new([1; 10], [2, 0]),
            weights: [vec![10_000.0], vec![]],
        };
        assert!(matches!(
            solve_lpp(&inst, &fleet, &SolverConfig::exact()),
            Err(Error::InvalidInput(_))
        ));
        assert!(SolverConfig::gap(-0.1).validate().is_err());
    }
}
