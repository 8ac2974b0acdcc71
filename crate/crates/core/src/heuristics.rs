//! Two weight-blind greedy baselines that predict a summary straight from
//! the sketch.
//!
//! * [`heur_v`] fills railcars in type order and only counts slots.
//! * [`heur_s`] respects which slots take 53 ft containers and prefers
//!   short railcars whose capacity matches the remaining demand.

use crate::fleet::{ContainerLength, Fleet, LoadingPattern, NUM_RAILCAR_TYPES};
use crate::sampling::InstanceSketch;
use crate::summarize::Summary;

/// Railcars in type order, each filled slot by slot. Lengths alternate
/// (starting with 40 ft) while both remain; once one runs out the other
/// fills the rest.
pub fn heur_v(sketch: &InstanceSketch, fleet: &Fleet) -> Summary {
    let mut left = sketch.container_counts;
    let mut out = Summary::default();
    let mut next = 0usize;
    for j in 0..NUM_RAILCAR_TYPES {
        let slots = fleet.railcar_type(j).slots();
        for _ in 0..sketch.railcar_counts[j] {
            if left == [0, 0] {
                return out;
            }
            let mut placed = 0;
            while placed < slots && left != [0, 0] {
                let len = if left[next] > 0 { next } else { 1 - next };
                left[len] -= 1;
                out.containers_loaded[len] += 1;
                next = 1 - len;
                placed += 1;
            }
            out.railcars_used[j] += 1;
        }
    }
    out
}

/// Slot structure of one railcar type as the capability-aware heuristic
/// sees it.
#[derive(Debug, Clone)]
struct TypeProfile {
    length: u32,
    slots: u32,
    /// Per platform: (53 ft platform, top takes 53 ft).
    platforms: Vec<(bool, bool)>,
}

impl TypeProfile {
    fn of(fleet: &Fleet, j: usize) -> Self {
        let t = fleet.railcar_type(j);
        TypeProfile {
            length: t.total_length(),
            slots: t.slots(),
            platforms: t
                .platforms
                .iter()
                .map(|p| (p.length == ContainerLength::L53, p.top_53_capable))
                .collect(),
        }
    }

    /// 53 ft slots usable with `r40` 40 ft containers available to
    /// support tops on 40 ft platforms.
    fn usable_53(&self, r40: u32) -> u32 {
        let mut direct = 0;
        let mut over_40 = 0;
        for &(is53, top53) in &self.platforms {
            if is53 {
                direct += 1 + top53 as u32;
            } else if top53 {
                over_40 += 1;
            }
        }
        direct + over_40.min(r40)
    }

    /// Fill one railcar: 53 ft containers into usable 53 ft slots (53 ft
    /// bottoms, then 53 ft tops, then tops over a 40 ft bottom), then
    /// 40 ft containers into free bottoms, then free tops.
    fn fill(&self, r40: &mut u32, r53: &mut u32) -> Vec<LoadingPattern> {
        use ContainerLength::*;
        let mut pats = vec![LoadingPattern::EMPTY; self.platforms.len()];
        for (k, &(is53, _)) in self.platforms.iter().enumerate() {
            if is53 && *r53 > 0 {
                pats[k].bottom = Some(L53);
                *r53 -= 1;
            }
        }
        for (k, &(is53, top53)) in self.platforms.iter().enumerate() {
            if is53 && top53 && pats[k].bottom == Some(L53) && *r53 > 0 {
                pats[k].top = Some(L53);
                *r53 -= 1;
            }
        }
        for (k, &(is53, top53)) in self.platforms.iter().enumerate() {
            if !is53 && top53 && *r53 > 0 && *r40 > 0 {
                pats[k] = LoadingPattern::new(Some(L40), Some(L53));
                *r53 -= 1;
                *r40 -= 1;
            }
        }
        self.fill_40(&mut pats, r40);
        pats
    }

    fn fill_40(&self, pats: &mut [LoadingPattern], r40: &mut u32) {
        use ContainerLength::*;
        for p in pats.iter_mut() {
            if p.bottom.is_none() && *r40 > 0 {
                p.bottom = Some(L40);
                *r40 -= 1;
            }
        }
        for p in pats.iter_mut() {
            if p.bottom.is_some() && p.top.is_none() && *r40 > 0 {
                p.top = Some(L40);
                *r40 -= 1;
            }
        }
    }
}

/// Railcar fill chosen by [`heur_s`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeuristicLoad {
    pub type_index: usize,
    pub railcar_index: u32,
    pub patterns: Vec<LoadingPattern>,
}

/// Pick the shortest railcar among those whose capacity is the largest not
/// exceeding `demand`; failing that, the shortest among those with the
/// smallest capacity. Ties go to the lower type. Capacity zero never
/// qualifies.
fn choose(
    capacity: &[u32; NUM_RAILCAR_TYPES],
    lengths: &[u32; NUM_RAILCAR_TYPES],
    free: &[u32; NUM_RAILCAR_TYPES],
    demand: u32,
) -> Option<usize> {
    let candidates = || (0..NUM_RAILCAR_TYPES).filter(|&j| free[j] > 0 && capacity[j] > 0);
    let best_by = |pool: Vec<usize>, target: u32| {
        pool.into_iter()
            .filter(|&j| capacity[j] == target)
            .min_by_key(|&j| (lengths[j], j))
    };
    let fitting: Vec<usize> = candidates().filter(|&j| capacity[j] <= demand).collect();
    if let Some(&top) = fitting.iter().map(|j| &capacity[*j]).max() {
        return best_by(fitting, top);
    }
    let all: Vec<usize> = candidates().collect();
    let low = *all.iter().map(|j| &capacity[*j]).min()?;
    best_by(all, low)
}

/// Railcar-by-railcar plan of the capability-aware greedy heuristic.
pub fn heur_s_plan(sketch: &InstanceSketch, fleet: &Fleet) -> Vec<HeuristicLoad> {
    let profiles: Vec<TypeProfile> = (0..NUM_RAILCAR_TYPES).map(|j| TypeProfile::of(fleet, j)).collect();
    let lengths: [u32; NUM_RAILCAR_TYPES] = std::array::from_fn(|j| profiles[j].length);
    let mut free = sketch.railcar_counts;
    let [mut r40, mut r53] = sketch.container_counts;
    let mut plan = Vec::new();
    let mut take = |j: usize, free: &mut [u32; NUM_RAILCAR_TYPES], pats: Vec<LoadingPattern>| {
        plan.push(HeuristicLoad {
            type_index: j,
            railcar_index: sketch.railcar_counts[j] - free[j],
            patterns: pats,
        });
        free[j] -= 1;
    };

    while r53 > 0 {
        let usable: [u32; NUM_RAILCAR_TYPES] = std::array::from_fn(|j| profiles[j].usable_53(r40));
        let Some(j) = choose(&usable, &lengths, &free, r53) else {
            break;
        };
        let pats = profiles[j].fill(&mut r40, &mut r53);
        take(j, &mut free, pats);
    }
    while r40 > 0 {
        let slots: [u32; NUM_RAILCAR_TYPES] = std::array::from_fn(|j| profiles[j].slots);
        let Some(j) = choose(&slots, &lengths, &free, r40) else {
            break;
        };
        let mut pats = vec![LoadingPattern::EMPTY; profiles[j].platforms.len()];
        profiles[j].fill_40(&mut pats, &mut r40);
        take(j, &mut free, pats);
    }
    plan
}

pub fn heur_s(sketch: &InstanceSketch, fleet: &Fleet) -> Summary {
    let mut out = Summary::default();
    for load in heur_s_plan(sketch, fleet) {
        out.railcars_used[load.type_index] += 1;
        for p in &load.patterns {
            let c = p.counts();
            out.containers_loaded[0] += c[0];
            out.containers_loaded[1] += c[1];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fleet::enumerate_patterns;
    use proptest::prelude::*;

    fn one_of(j: usize) -> [u32; 10] {
        let mut r = [0; 10];
        r[j] = 1;
        r
    }

    #[test]
    fn zero_containers() {
        let fleet = Fleet::default_fleet();
        let s = InstanceSketch::new([3; 10], [0, 0]);
        assert_eq!(heur_v(&s, &fleet), Summary::default());
        assert_eq!(heur_s(&s, &fleet), Summary::default());
    }

    #[test]
    fn heur_v_alternates_on_a_two_platform_car() {
        let fleet = Fleet::default_fleet();
        let j = (0..10).find(|&j| fleet.railcar_type(j).platform_count() == 2).unwrap();
        let s = InstanceSketch::new(one_of(j), [3, 2]);
        let out = heur_v(&s, &fleet);
        assert_eq!(out.containers_loaded, [2, 2]);
        assert_eq!(out.railcars_used, one_of(j));
    }

    #[test]
    fn heur_s_hand_trace() {
        // X: one 40 ft platform whose top takes 53 ft; Y: one 53 ft platform.
        let mut cfg = Fleet::default_fleet().to_config();
        cfg.railcar_types[5].platforms[0].top_53_capable = true;
        let fleet = cfg.validate().unwrap();
        let mut r = [0; 10];
        r[5] = 1; // X
        r[7] = 1; // Y
        let s = InstanceSketch::new(r, [2, 1]);
        // Both cars offer one usable 53 ft slot; X is shorter and takes the
        // 53 ft container over a 40 ft one. The last 40 ft container goes to
        // Y, the only car left.
        let plan = heur_s_plan(&s, &fleet);
        use ContainerLength::*;
        assert_eq!(plan[0].type_index, 5);
        assert_eq!(plan[0].patterns, vec![LoadingPattern::new(Some(L40), Some(L53))]);
        assert_eq!(plan[1].type_index, 7);
        assert_eq!(plan[1].patterns, vec![LoadingPattern::new(Some(L40), None)]);
        let out = heur_s(&s, &fleet);
        assert_eq!(out.containers_loaded, [2, 1]);
        assert_eq!(out.railcars_used, r);
    }

    #[test]
    fn heur_s_prefers_matching_capacity() {
        let fleet = Fleet::default_fleet();
        // type 2 (five 53 ft platforms, 10 usable) and type 5 (one, 2 usable)
        let mut r = [0; 10];
        r[1] = 1;
        r[4] = 3;
        let s = InstanceSketch::new(r, [0, 4]);
        let out = heur_s(&s, &fleet);
        // demand 4: type 2 exceeds it, type 5 cars (2 each) fit twice
        assert_eq!(out.railcars_used[4], 2);
        assert_eq!(out.railcars_used[1], 0);
        assert_eq!(out.containers_loaded, [0, 4]);
    }

    proptest! {
        #[test]
        fn outputs_within_sketch(r in proptest::array::uniform10(0u32..4), c in proptest::array::uniform2(0u32..40)) {
            let fleet = Fleet::default_fleet();
            let s = InstanceSketch::new(r, c);
            prop_assert!(heur_v(&s, &fleet).fits_within(&s));
            prop_assert!(heur_s(&s, &fleet).fits_within(&s));
            prop_assert_eq!(heur_v(&s, &fleet), heur_v(&s, &fleet));
        }

        #[test]
        fn heur_s_patterns_respect_slot_rules(r in proptest::array::uniform10(0u32..4), c in proptest::array::uniform2(0u32..40)) {
            let fleet = Fleet::default_fleet();
            let s = InstanceSketch::new(r, c);
            let mut seen = std::collections::HashSet::new();
            for load in heur_s_plan(&s, &fleet) {
                prop_assert!(seen.insert((load.type_index, load.railcar_index)));
                prop_assert!(load.railcar_index < r[load.type_index]);
                let t = fleet.railcar_type(load.type_index);
                for (p, platform) in load.patterns.iter().zip(&t.platforms) {
                    prop_assert!(enumerate_patterns(platform).contains(p), "{p} on {platform:?}");
                }
                prop_assert!(load.patterns.iter().any(|p| !p.is_empty()));
            }
        }

        #[test]
        fn heur_v_loads_up_to_slots(r in proptest::array::uniform10(0u32..4), c in proptest::array::uniform2(0u32..40)) {
            let fleet = Fleet::default_fleet();
            let s = InstanceSketch::new(r, c);
            let out = heur_v(&s, &fleet);
            let loaded: u32 = out.containers_loaded.iter().sum();
            prop_assert_eq!(loaded, s.total_containers().min(s.total_slots(&fleet)));
        }
    }
}
