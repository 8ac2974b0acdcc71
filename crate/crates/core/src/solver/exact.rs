//! Exact search.
//!
//! Feasibility is monotone in every weight, so when `n` containers of a
//! length are loaded, the `n` lightest ones can always be chosen. The search
//! therefore works level by level on counts:
//!
//! 1. the largest total `N` such that the lightest `n40` and `n53`
//!    containers with `n40 + n53 = N` fit on the whole train;
//! 2. the shortest set of railcars (lowest indices within a type) that
//!    holds `N` containers, and within that length the largest `n53`.
//!
//! Each "does this fit" question is a depth-first search over platforms in
//! canonical order. At a platform, only dominant container choices are
//! tried: the heaviest container that fits a lone bottom, and for a stacked
//! pair, the heaviest fitting top above each bottom, keeping the heaviest
//! bottom per top. Exchanging any other choice with a dominant one keeps the
//! rest of the assignment feasible.

use std::collections::HashSet;

use crate::fleet::{
    enumerate_patterns, loads_fit, ContainerLength, Fleet, LoadingPattern, PlatformType, NUM_RAILCAR_TYPES,
};
use crate::sampling::FullInstance;

use super::counts::{count_feasible, PlatformKind, PlatformKinds};
use super::{objective_of, DetailedSolution, LexObjective, Placement, RailcarLoad, Slot};
use crate::error::{Error, Result};

type Mask = [u64; 4];
const MAX_ITEMS: usize = 256;

/// Per-question node allowance once the global node limit is exhausted.
const FALLBACK_NODES: u64 = 5_000;

struct Budget {
    used: u64,
    limit: Option<u64>,
    hit: bool,
    check_used: u64,
}

impl Budget {
    fn new(limit: Option<u64>) -> Self {
        Budget {
            used: 0,
            limit,
            hit: false,
            check_used: 0,
        }
    }

    fn start_check(&mut self) {
        self.check_used = 0;
    }

    fn tick(&mut self) -> bool {
        self.used += 1;
        if self.hit {
            self.check_used += 1;
            return self.check_used <= FALLBACK_NODES;
        }
        if let Some(limit) = self.limit {
            if self.used > limit {
                self.hit = true;
                return false;
            }
        }
        true
    }
}

#[derive(Clone)]
struct Plat {
    platform: PlatformType,
    kind: PlatformKind,
    type_idx: usize,
    car_index: u32,
    position: usize,
    doubles: Vec<LoadingPattern>,
    singles: Vec<LoadingPattern>,
}

#[derive(Clone, Copy)]
struct Item {
    id: usize,
    weight: f64,
}

#[derive(Clone, Copy)]
struct Choice {
    plat: usize,
    pattern: LoadingPattern,
    bottom: usize,
    top: Option<usize>,
}

/// Platforms of railcar type `j`, in position order, with their patterns
/// split into stacked pairs and lone bottoms.
fn type_templates(fleet: &Fleet) -> Vec<Vec<Plat>> {
    (0..NUM_RAILCAR_TYPES)
        .map(|j| {
            fleet
                .railcar_type(j)
                .platforms
                .iter()
                .enumerate()
                .map(|(pos, p)| {
                    let pats = enumerate_patterns(p);
                    Plat {
                        platform: *p,
                        kind: PlatformKind::of(p),
                        type_idx: j,
                        car_index: 0,
                        position: pos,
                        doubles: pats.iter().copied().filter(|q| q.occupied() == 2).collect(),
                        singles: pats.iter().copied().filter(|q| q.occupied() == 1).collect(),
                    }
                })
                .collect()
        })
        .collect()
}

fn layout(templates: &[Vec<Plat>], use_counts: &[u32; NUM_RAILCAR_TYPES]) -> Vec<Plat> {
    let mut out = Vec::new();
    for (j, &u) in use_counts.iter().enumerate() {
        for k in 0..u {
            for t in &templates[j] {
                out.push(Plat {
                    car_index: k,
                    ..t.clone()
                });
            }
        }
    }
    out
}

fn kinds_of(templates: &[Vec<Plat>], use_counts: &[u32; NUM_RAILCAR_TYPES]) -> PlatformKinds {
    let mut k = [0; 4];
    for (j, &u) in use_counts.iter().enumerate() {
        for t in &templates[j] {
            k[t.kind.index()] += u;
        }
    }
    k
}

/// Containers sorted lightest first (lower id on ties), per length.
fn lightest_first(instance: &FullInstance) -> [Vec<Item>; 2] {
    let n40 = instance.weights[0].len();
    std::array::from_fn(|i| {
        let offset = if i == 0 { 0 } else { n40 };
        let mut v: Vec<Item> = instance.weights[i]
            .iter()
            .enumerate()
            .map(|(k, w)| Item {
                id: offset + k,
                weight: *w,
            })
            .collect();
        v.sort_by(|a, b| a.weight.total_cmp(&b.weight).then(a.id.cmp(&b.id)));
        v
    })
}

/// Does the lightest `n40` + `n53` containers fit on `plats`?
struct Question<'a> {
    plats: &'a [Plat],
    suffix: Vec<PlatformKinds>,
    items: Vec<Item>,
    /// Item index range per length; items are heaviest first within each.
    ranges: [(usize, usize); 2],
    failed: HashSet<(u16, Mask)>,
    path: Vec<Choice>,
}

impl<'a> Question<'a> {
    fn new(plats: &'a [Plat], light: &[Vec<Item>; 2], n40: usize, n53: usize) -> Self {
        let mut suffix = vec![[0u32; 4]; plats.len() + 1];
        for i in (0..plats.len()).rev() {
            suffix[i] = suffix[i + 1];
            suffix[i][plats[i].kind.index()] += 1;
        }
        let mut items: Vec<Item> = light[0][..n40].iter().rev().copied().collect();
        items.extend(light[1][..n53].iter().rev().copied());
        Question {
            plats,
            suffix,
            items,
            ranges: [(0, n40), (n40, n40 + n53)],
            failed: HashSet::new(),
            path: Vec::new(),
        }
    }

    fn full_mask(&self) -> Mask {
        let mut m = [0u64; 4];
        for k in 0..self.items.len() {
            m[k / 64] |= 1 << (k % 64);
        }
        m
    }

    fn run(&mut self, budget: &mut Budget) -> bool {
        budget.start_check();
        let mask = self.full_mask();
        let (x, y) = (self.ranges[0].1, self.ranges[1].1 - self.ranges[1].0);
        self.dfs(0, mask, x as u32, y as u32, budget)
    }

    fn range(&self, len: ContainerLength) -> std::ops::Range<usize> {
        let (a, b) = self.ranges[len.index()];
        a..b
    }

    fn dfs(&mut self, i: usize, mask: Mask, x: u32, y: u32, budget: &mut Budget) -> bool {
        if x + y == 0 {
            return true;
        }
        if i == self.plats.len() || !count_feasible(&self.suffix[i], x, y) {
            return false;
        }
        if self.failed.contains(&(i as u16, mask)) {
            return false;
        }
        if !budget.tick() {
            return false;
        }
        let p = self.plats[i].platform;
        let has = |m: &Mask, k: usize| m[k / 64] >> (k % 64) & 1 == 1;
        let dec = |len: ContainerLength, x: u32, y: u32| match len {
            ContainerLength::L40 => (x - 1, y),
            ContainerLength::L53 => (x, y - 1),
        };

        for di in 0..self.plats[i].doubles.len() {
            let pat = self.plats[i].doubles[di];
            let (bl, tl) = (pat.bottom.unwrap(), pat.top.unwrap());
            let mut tops_tried: Vec<usize> = Vec::new();
            let mut last_bottom_weight = f64::NAN;
            for b in self.range(bl) {
                if !has(&mask, b) {
                    continue;
                }
                let wb = self.items[b].weight;
                if wb == last_bottom_weight {
                    continue;
                }
                last_bottom_weight = wb;
                let top = self
                    .range(tl)
                    .find(|&t| t != b && has(&mask, t) && loads_fit(&p, wb, self.items[t].weight));
                let Some(t) = top else { continue };
                if tops_tried.contains(&t) {
                    continue;
                }
                tops_tried.push(t);
                let mut m = mask;
                m[b / 64] &= !(1 << (b % 64));
                m[t / 64] &= !(1 << (t % 64));
                let (x1, y1) = dec(bl, x, y);
                let (x2, y2) = dec(tl, x1, y1);
                self.path.push(Choice {
                    plat: i,
                    pattern: pat,
                    bottom: b,
                    top: Some(t),
                });
                if self.dfs(i + 1, m, x2, y2, budget) {
                    return true;
                }
                self.path.pop();
            }
        }

        for si in 0..self.plats[i].singles.len() {
            let pat = self.plats[i].singles[si];
            let bl = pat.bottom.unwrap();
            let pick = self
                .range(bl)
                .find(|&b| has(&mask, b) && loads_fit(&p, self.items[b].weight, 0.0));
            if let Some(b) = pick {
                let mut m = mask;
                m[b / 64] &= !(1 << (b % 64));
                let (x1, y1) = dec(bl, x, y);
                self.path.push(Choice {
                    plat: i,
                    pattern: pat,
                    bottom: b,
                    top: None,
                });
                if self.dfs(i + 1, m, x1, y1, budget) {
                    return true;
                }
                self.path.pop();
            }
        }

        if self.dfs(i + 1, mask, x, y, budget) {
            return true;
        }
        self.failed.insert((i as u16, mask));
        false
    }

    fn into_solution(self, fleet: &Fleet, hit: bool) -> DetailedSolution {
        let mut railcars: Vec<RailcarLoad> = Vec::new();
        let mut placements = Vec::new();
        for c in &self.path {
            let plat = &self.plats[c.plat];
            let type_id = fleet.railcar_type(plat.type_idx).id;
            let fresh = railcars
                .last()
                .is_none_or(|r| (r.type_id, r.railcar_index) != (type_id, plat.car_index));
            if fresh {
                railcars.push(RailcarLoad {
                    type_id,
                    railcar_index: plat.car_index,
                    patterns: vec![LoadingPattern::EMPTY; fleet.railcar_type(plat.type_idx).platform_count()],
                });
            }
            railcars.last_mut().unwrap().patterns[plat.position] = c.pattern;
            placements.push(Placement {
                container: self.items[c.bottom].id,
                length: c.pattern.bottom.unwrap(),
                type_id,
                railcar_index: plat.car_index,
                platform: plat.position,
                slot: Slot::Bottom,
            });
            if let Some(t) = c.top {
                placements.push(Placement {
                    container: self.items[t].id,
                    length: c.pattern.top.unwrap(),
                    type_id,
                    railcar_index: plat.car_index,
                    platform: plat.position,
                    slot: Slot::Top,
                });
            }
        }
        let objective = objective_of(&placements, fleet);
        DetailedSolution {
            railcars,
            placements,
            objective,
            node_limit_hit: hit,
        }
    }
}

/// Loaded-53 counts to try for a total of `n`, largest first.
fn split_range(n: u32, avail: [u32; 2]) -> impl Iterator<Item = u32> {
    let lo = n.saturating_sub(avail[0]);
    let hi = n.min(avail[1]);
    (lo..=hi).rev().filter(move |_| lo <= hi)
}

fn max_count_total(kinds: &PlatformKinds, avail: [u32; 2]) -> u32 {
    let upper = (avail[0] + avail[1]).min(2 * kinds.iter().sum::<u32>());
    (0..=upper)
        .rev()
        .find(|&n| split_range(n, avail).any(|y| count_feasible(kinds, n - y, y)))
        .unwrap_or(0)
}

struct Subset {
    use_counts: [u32; NUM_RAILCAR_TYPES],
    length: u32,
    kinds: PlatformKinds,
    key: Vec<(usize, u32)>,
}

/// Railcar subsets that can hold `n` containers by count, shortest first,
/// then by the sorted list of (type, index) pairs they use.
fn candidate_subsets(
    templates: &[Vec<Plat>],
    fleet: &Fleet,
    available: &[u32; NUM_RAILCAR_TYPES],
    n: u32,
    avail: [u32; 2],
) -> Result<Vec<Subset>> {
    let combos: u128 = available.iter().map(|r| *r as u128 + 1).product();
    if combos > 20_000_000 {
        return Err(Error::TooLarge(format!(
            "{combos} railcar subsets exceed the exact search's enumeration limit"
        )));
    }
    let lengths = fleet.lengths_per_type();
    let mut out = Vec::new();
    let mut u = [0u32; NUM_RAILCAR_TYPES];
    loop {
        let kinds = kinds_of(templates, &u);
        if split_range(n, avail).any(|y| count_feasible(&kinds, n - y, y)) {
            let key = (0..NUM_RAILCAR_TYPES)
                .flat_map(|j| (0..u[j]).map(move |k| (j, k)))
                .collect();
            out.push(Subset {
                use_counts: u,
                length: u.iter().zip(lengths).map(|(a, b)| a * b).sum(),
                kinds,
                key,
            });
        }
        // odometer increment
        let mut j = 0;
        loop {
            if j == NUM_RAILCAR_TYPES {
                out.sort_by(|a, b| a.length.cmp(&b.length).then_with(|| a.key.cmp(&b.key)));
                return Ok(out);
            }
            if u[j] < available[j] {
                u[j] += 1;
                break;
            }
            u[j] = 0;
            j += 1;
        }
    }
}

pub(super) fn solve(instance: &FullInstance, fleet: &Fleet, node_limit: Option<u64>) -> Result<DetailedSolution> {
    let avail = instance.sketch.container_counts;
    let templates = type_templates(fleet);
    let all = instance.sketch.railcar_counts;
    let full_kinds = kinds_of(&templates, &all);
    let loadable = (avail[0] + avail[1]).min(2 * full_kinds.iter().sum::<u32>());
    if loadable as usize > MAX_ITEMS {
        return Err(Error::TooLarge(format!(
            "up to {loadable} loaded containers exceed the exact search's limit of {MAX_ITEMS}"
        )));
    }
    let light = lightest_first(instance);
    let mut budget = Budget::new(node_limit);

    // Level 1: most containers on the whole train.
    let full_plats = layout(&templates, &all);
    let mut best_total = None;
    let upper = max_count_total(&full_kinds, avail);
    'outer: for n in (1..=upper).rev() {
        for y in split_range(n, avail) {
            if !count_feasible(&full_kinds, n - y, y) {
                continue;
            }
            let mut q = Question::new(&full_plats, &light, (n - y) as usize, y as usize);
            if q.run(&mut budget) {
                best_total = Some((n, q.into_solution(fleet, false)));
                break 'outer;
            }
        }
    }
    let Some((n, fallback)) = best_total else {
        return Ok(DetailedSolution {
            node_limit_hit: budget.hit,
            ..DetailedSolution::empty()
        });
    };

    // Level 2: shortest railcar subset, then most 53 ft containers.
    let subsets = candidate_subsets(&templates, fleet, &all, n, avail)?;
    let mut start = 0;
    while start < subsets.len() {
        let len = subsets[start].length;
        let end = start + subsets[start..].iter().take_while(|s| s.length == len).count();
        let group = &subsets[start..end];
        for y in split_range(n, avail) {
            for s in group {
                if !count_feasible(&s.kinds, n - y, y) {
                    continue;
                }
                let plats = layout(&templates, &s.use_counts);
                let mut q = Question::new(&plats, &light, (n - y) as usize, y as usize);
                if q.run(&mut budget) {
                    let hit = budget.hit;
                    return Ok(q.into_solution(fleet, hit));
                }
            }
        }
        start = end;
    }
    Ok(DetailedSolution {
        node_limit_hit: true,
        ..fallback
    })
}

/// Objective bound from counts alone (weights ignored).
pub(super) fn upper_bound(instance: &FullInstance, fleet: &Fleet) -> LexObjective {
    let avail = instance.sketch.container_counts;
    let templates = type_templates(fleet);
    let all = instance.sketch.railcar_counts;
    let full_kinds = kinds_of(&templates, &all);
    let n = max_count_total(&full_kinds, avail);
    if n == 0 {
        return LexObjective::default();
    }
    let y = split_range(n, avail)
        .find(|&y| count_feasible(&full_kinds, n - y, y))
        .unwrap_or(0);
    let shortest = match candidate_subsets(&templates, fleet, &all, n, avail) {
        Ok(s) => s.first().map_or(0, |s| s.length),
        Err(_) => 0,
    };
    LexObjective {
        loaded_containers: n,
        used_railcar_length: shortest,
        loaded_container_length: 40 * (n - y) + 53 * y,
    }
}
