//! Exhaustive reference solver for tiny instances.
//!
//! Every platform tries every pattern with every assignment of distinct
//! containers; the only shortcut is memoizing the best completion of each
//! (platform, remaining containers, current railcar already used) state,
//! which does not change the set of solutions considered.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::fleet::{enumerate_patterns, pattern_weight_feasible, Fleet, LoadingPattern};
use crate::sampling::FullInstance;

use super::{DetailedSolution, LexObjective, Placement, RailcarLoad, Slot};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BruteForceLimits {
    pub max_platforms: u32,
    pub max_containers: u32,
}

impl Default for BruteForceLimits {
    fn default() -> Self {
        BruteForceLimits {
            max_platforms: 6,
            max_containers: 10,
        }
    }
}

struct Plat {
    type_idx: usize,
    car_index: u32,
    position: usize,
    car_length: u32,
    starts_car: bool,
    patterns: Vec<LoadingPattern>,
}

#[derive(Clone, Copy)]
struct Pick {
    pattern: LoadingPattern,
    bottom: Option<usize>,
    top: Option<usize>,
}

type Memo = HashMap<(usize, u64, bool), (LexObjective, Pick)>;

struct Enumerator<'a> {
    plats: Vec<Plat>,
    instance: &'a FullInstance,
    fleet: &'a Fleet,
    memo: Memo,
}

fn add(a: LexObjective, b: LexObjective) -> LexObjective {
    LexObjective {
        loaded_containers: a.loaded_containers + b.loaded_containers,
        used_railcar_length: a.used_railcar_length + b.used_railcar_length,
        loaded_container_length: a.loaded_container_length + b.loaded_container_length,
    }
}

impl<'a> Enumerator<'a> {
    /// Best objective of platforms `i..` with containers `free` still
    /// available; `car_used` says whether the railcar of platform `i`
    /// already carries a container.
    fn best(&mut self, i: usize, free: u64, car_used: bool) -> LexObjective {
        if i == self.plats.len() {
            return LexObjective::default();
        }
        let car_used = car_used && !self.plats[i].starts_car;
        if let Some((v, _)) = self.memo.get(&(i, free, car_used)) {
            return *v;
        }
        let n = self.instance.num_containers();
        let mut best: Option<(LexObjective, Pick)> = None;
        let patterns = self.plats[i].patterns.clone();
        let platform = self.fleet.railcar_type(self.plats[i].type_idx).platforms[self.plats[i].position];
        for pattern in patterns {
            let mut options: Vec<(Option<usize>, Option<usize>)> = Vec::new();
            match (pattern.bottom, pattern.top) {
                (None, _) => options.push((None, None)),
                (Some(bl), top) => {
                    for b in (0..n).filter(|&b| free >> b & 1 == 1 && self.instance.container_length(b) == bl) {
                        match top {
                            None => options.push((Some(b), None)),
                            Some(tl) => {
                                for t in (0..n).filter(|&t| {
                                    t != b && free >> t & 1 == 1 && self.instance.container_length(t) == tl
                                }) {
                                    options.push((Some(b), Some(t)));
                                }
                            }
                        }
                    }
                }
            }
            for (b, t) in options {
                let wb = b.map_or(0.0, |b| self.instance.container_weight(b));
                let wt = t.map_or(0.0, |t| self.instance.container_weight(t));
                if !pattern_weight_feasible(&pattern, wb, wt, &platform).expect("weights are valid") {
                    continue;
                }
                let mut rest = free;
                let mut gain = LexObjective::default();
                for c in [b, t].into_iter().flatten() {
                    rest &= !(1 << c);
                    gain.loaded_containers += 1;
                    gain.loaded_container_length += self.instance.container_length(c).feet();
                }
                let loads = gain.loaded_containers > 0;
                if loads && !car_used {
                    gain.used_railcar_length = self.plats[i].car_length;
                }
                let total = add(gain, self.best(i + 1, rest, car_used || loads));
                if best.is_none_or(|(v, _)| total > v) {
                    best = Some((
                        total,
                        Pick {
                            pattern,
                            bottom: b,
                            top: t,
                        },
                    ));
                }
            }
        }
        let entry = best.expect("the empty pattern is always available");
        self.memo.insert((i, free, car_used), entry);
        entry.0
    }
}

pub fn brute_force_lpp(instance: &FullInstance, fleet: &Fleet) -> Result<DetailedSolution> {
    brute_force_lpp_with(instance, fleet, BruteForceLimits::default())
}

pub fn brute_force_lpp_with(
    instance: &FullInstance,
    fleet: &Fleet,
    limits: BruteForceLimits,
) -> Result<DetailedSolution> {
    instance.validate(fleet)?;
    let platforms = instance.sketch.total_platforms(fleet);
    let containers = instance.num_containers() as u32;
    if platforms > limits.max_platforms || containers > limits.max_containers || containers > 63 {
        return Err(Error::TooLarge(format!(
            "{platforms} platforms and {containers} containers exceed the limits of {} and {}",
            limits.max_platforms, limits.max_containers
        )));
    }
    let mut plats = Vec::new();
    for (j, &count) in instance.sketch.railcar_counts.iter().enumerate() {
        let t = fleet.railcar_type(j);
        for k in 0..count {
            for (pos, p) in t.platforms.iter().enumerate() {
                plats.push(Plat {
                    type_idx: j,
                    car_index: k,
                    position: pos,
                    car_length: t.total_length(),
                    starts_car: pos == 0,
                    patterns: enumerate_patterns(p),
                });
            }
        }
    }
    let mut e = Enumerator {
        plats,
        instance,
        fleet,
        memo: HashMap::new(),
    };
    let all: u64 = if containers == 0 { 0 } else { (1u64 << containers) - 1 };
    let objective = e.best(0, all, false);

    // Walk the memo along the chosen picks.
    let mut railcars: Vec<RailcarLoad> = Vec::new();
    let mut placements = Vec::new();
    let (mut free, mut car_used) = (all, false);
    for i in 0..e.plats.len() {
        let p = &e.plats[i];
        car_used = car_used && !p.starts_car;
        let (_, pick) = e.memo[&(i, free, car_used)];
        if pick.pattern.is_empty() {
            continue;
        }
        let type_id = fleet.railcar_type(p.type_idx).id;
        if !car_used {
            railcars.push(RailcarLoad {
                type_id,
                railcar_index: p.car_index,
                patterns: vec![LoadingPattern::EMPTY; fleet.railcar_type(p.type_idx).platform_count()],
            });
        }
        railcars.last_mut().unwrap().patterns[p.position] = pick.pattern;
        for (c, slot) in [(pick.bottom, Slot::Bottom), (pick.top, Slot::Top)] {
            if let Some(c) = c {
                free &= !(1 << c);
                placements.push(Placement {
                    container: c,
                    length: instance.container_length(c),
                    type_id,
                    railcar_index: p.car_index,
                    platform: p.position,
                    slot,
                });
            }
        }
        car_used = true;
    }
    Ok(DetailedSolution {
        railcars,
        placements,
        objective,
        node_limit_hit: false,
    })
}
