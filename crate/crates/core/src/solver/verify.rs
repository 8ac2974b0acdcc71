use std::collections::{HashMap, HashSet};

use crate::fleet::{enumerate_patterns, pattern_weight_feasible, Fleet, NUM_RAILCAR_TYPES};
use crate::sampling::FullInstance;

use super::{objective_of, DetailedSolution, Slot};

/// Whether `solution` is a feasible load plan for `instance`: every
/// container placed at most once into an existing slot of a matching
/// pattern, every pattern allowed on its platform, every loaded platform
/// within weight and center-of-mass limits, and the stated objective
/// matching the placements.
pub fn verify_solution(instance: &FullInstance, fleet: &Fleet, solution: &DetailedSolution) -> bool {
    if instance.validate(fleet).is_err() {
        return false;
    }
    let n = instance.num_containers();

    let mut patterns = HashMap::new();
    for car in &solution.railcars {
        let j = car.type_id as usize;
        if j == 0 || j > NUM_RAILCAR_TYPES || car.railcar_index >= instance.sketch.railcar_counts[j - 1] {
            return false;
        }
        let t = fleet.railcar_type(j - 1);
        if car.patterns.len() != t.platform_count() {
            return false;
        }
        for (pat, platform) in car.patterns.iter().zip(&t.platforms) {
            if !enumerate_patterns(platform).contains(pat) {
                return false;
            }
        }
        if patterns
            .insert((car.type_id, car.railcar_index), &car.patterns)
            .is_some()
        {
            return false;
        }
    }

    let mut seen = HashSet::new();
    let mut slots: HashMap<(u8, u32, usize), [Option<f64>; 2]> = HashMap::new();
    for p in &solution.placements {
        if p.container >= n || !seen.insert(p.container) {
            return false;
        }
        let Some(pats) = patterns.get(&(p.type_id, p.railcar_index)) else {
            return false;
        };
        let Some(pattern) = pats.get(p.platform) else {
            return false;
        };
        let expected = match p.slot {
            Slot::Bottom => pattern.bottom,
            Slot::Top => pattern.top,
        };
        if p.length != instance.container_length(p.container) || expected != Some(p.length) {
            return false;
        }
        let entry = slots.entry((p.type_id, p.railcar_index, p.platform)).or_default();
        let k = (p.slot == Slot::Top) as usize;
        if entry[k].is_some() {
            return false;
        }
        entry[k] = Some(instance.container_weight(p.container));
    }

    for ((type_id, index), pats) in &patterns {
        let t = fleet.railcar_type(*type_id as usize - 1);
        for (pos, pattern) in pats.iter().enumerate() {
            let w = slots.get(&(*type_id, *index, pos)).copied().unwrap_or_default();
            if w[0].is_some() != pattern.bottom.is_some() || w[1].is_some() != pattern.top.is_some() {
                return false;
            }
            let ok = pattern_weight_feasible(pattern, w[0].unwrap_or(0.0), w[1].unwrap_or(0.0), &t.platforms[pos]);
            if !matches!(ok, Ok(true)) {
                return false;
            }
        }
    }

    solution.objective == objective_of(&solution.placements, fleet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{generate_1s, DataClass};
    use crate::solver::{solve_lpp, SolverConfig};

    fn solved() -> (Fleet, FullInstance, DetailedSolution) {
        let fleet = Fleet::default_fleet();
        let class: DataClass = "A'".parse().unwrap();
        let inst = generate_1s(40, class, &fleet, 5)
            .unwrap()
            .into_iter()
            .find(|i| i.num_containers() >= 4 && i.sketch.total_platforms(&fleet) >= 3)
            .unwrap();
        let sol = solve_lpp(&inst, &fleet, &SolverConfig::exact()).unwrap();
        (fleet, inst, sol)
    }

    #[test]
    fn solver_output_verifies() {
        let (fleet, inst, sol) = solved();
        assert!(sol.objective.loaded_containers > 0);
        assert!(verify_solution(&inst, &fleet, &sol));
    }

    #[test]
    fn double_assignment_fails() {
        let (fleet, inst, mut sol) = solved();
        let first = sol.placements[0].container;
        sol.placements[1].container = first;
        assert!(!verify_solution(&inst, &fleet, &sol));
    }

    #[test]
    fn one_kilogram_over_capacity_fails() {
        let (fleet, mut inst, sol) = solved();
        let p = sol.placements[0];
        let platform = fleet.railcar_type(p.type_id as usize - 1).platforms[p.platform];
        let partner = sol
            .placements
            .iter()
            .find(|q| {
                q.container != p.container
                    && (q.type_id, q.railcar_index, q.platform) == (p.type_id, p.railcar_index, p.platform)
            })
            .map_or(0.0, |q| inst.container_weight(q.container));
        let new_weight = platform.weight_capacity - partner + 1.0;
        let len = inst.container_length(p.container);
        let n40 = inst.weights[0].len();
        let k = if len.index() == 0 {
            p.container
        } else {
            p.container - n40
        };
        inst.weights[len.index()][k] = new_weight;
        assert!(!verify_solution(&inst, &fleet, &sol));
        // one kilogram less is within capacity (the center of mass may still fail)
        inst.weights[len.index()][k] = new_weight - 1.0;
        let single = partner == 0.0;
        if single {
            assert!(verify_solution(&inst, &fleet, &sol));
        }
    }

    #[test]
    fn wrong_objective_fails() {
        let (fleet, inst, mut sol) = solved();
        sol.objective.loaded_container_length += 1;
        assert!(!verify_solution(&inst, &fleet, &sol));
    }
}
