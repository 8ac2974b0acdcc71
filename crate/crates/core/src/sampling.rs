//! Instance generation: sketches (counts available before weights are
//! known), container weights, data classes and the one- and two-stage
//! sampling protocols.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fleet::{ContainerLength, Fleet, RailcarType, NUM_LENGTHS, NUM_RAILCAR_TYPES};
use crate::rng::{label, substream};

/// Counts of railcars per type and containers per length.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InstanceSketch {
    pub railcar_counts: [u32; NUM_RAILCAR_TYPES],
    pub container_counts: [u32; NUM_LENGTHS],
}

impl InstanceSketch {
    pub fn new(railcar_counts: [u32; NUM_RAILCAR_TYPES], container_counts: [u32; NUM_LENGTHS]) -> Self {
        InstanceSketch {
            railcar_counts,
            container_counts,
        }
    }

    /// The twelve counts as one vector: railcar types then lengths.
    pub fn to_vector(&self) -> [u32; 12] {
        let mut v = [0; 12];
        v[..NUM_RAILCAR_TYPES].copy_from_slice(&self.railcar_counts);
        v[NUM_RAILCAR_TYPES..].copy_from_slice(&self.container_counts);
        v
    }

    pub fn from_vector(v: [u32; 12]) -> Self {
        let mut s = InstanceSketch::default();
        s.railcar_counts.copy_from_slice(&v[..NUM_RAILCAR_TYPES]);
        s.container_counts.copy_from_slice(&v[NUM_RAILCAR_TYPES..]);
        s
    }

    pub fn total_containers(&self) -> u32 {
        self.container_counts.iter().sum()
    }

    pub fn total_platforms(&self, fleet: &Fleet) -> u32 {
        self.railcar_counts
            .iter()
            .zip(fleet.platforms_per_type())
            .map(|(r, p)| r * p)
            .sum()
    }

    pub fn total_slots(&self, fleet: &Fleet) -> u32 {
        2 * self.total_platforms(fleet)
    }
}

impl fmt::Display for InstanceSketch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_vector();
        let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// A sketch together with the gross weight of every container.
///
/// Container ids run over the 40 ft containers first, then the 53 ft ones,
/// each group in the order of its weight vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullInstance {
    pub sketch: InstanceSketch,
    /// Gross weights in kg, indexed by length.
    pub weights: [Vec<f64>; NUM_LENGTHS],
}

impl FullInstance {
    pub fn num_containers(&self) -> usize {
        self.weights.iter().map(Vec::len).sum()
    }

    pub fn container_length(&self, id: usize) -> ContainerLength {
        if id < self.weights[0].len() {
            ContainerLength::L40
        } else {
            ContainerLength::L53
        }
    }

    pub fn container_weight(&self, id: usize) -> f64 {
        let n40 = self.weights[0].len();
        if id < n40 {
            self.weights[0][id]
        } else {
            self.weights[1][id - n40]
        }
    }

    /// Check that weight vectors match the sketch and respect tares.
    pub fn validate(&self, fleet: &Fleet) -> Result<()> {
        for len in ContainerLength::ALL {
            let i = len.index();
            if self.weights[i].len() != self.sketch.container_counts[i] as usize {
                return Err(Error::InvalidInput(format!(
                    "{} weights given for {} {len} containers",
                    self.weights[i].len(),
                    self.sketch.container_counts[i]
                )));
            }
            let tare = fleet.container_spec(len).tare;
            if let Some(w) = self.weights[i].iter().find(|w| !w.is_finite() || **w < tare) {
                return Err(Error::InvalidInput(format!(
                    "{len} container weight {w} is below its tare {tare} or not finite"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    A,
    B,
    C,
    D,
}

/// Full-size ranges or the one-fifth desk-size ranges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scale {
    Full,
    Desk,
}

/// Ranges of total containers and total platforms for one class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DataClass {
    pub tag: ClassTag,
    pub scale: Scale,
    pub container_range: (u32, u32),
    pub platform_range: (u32, u32),
}

impl DataClass {
    pub fn new(tag: ClassTag, scale: Scale) -> Self {
        let (small_c, large_c, small_p, large_p) = match scale {
            Scale::Full => ((1, 150), (151, 300), (1, 50), (51, 100)),
            Scale::Desk => ((1, 30), (31, 60), (1, 10), (11, 20)),
        };
        let (container_range, platform_range) = match tag {
            ClassTag::A => (small_c, small_p),
            ClassTag::B => (large_c, small_p),
            ClassTag::C => (small_c, large_p),
            ClassTag::D => (large_c, large_p),
        };
        DataClass {
            tag,
            scale,
            container_range,
            platform_range,
        }
    }

    pub fn contains(&self, sketch: &InstanceSketch, fleet: &Fleet) -> bool {
        let c = sketch.total_containers();
        let p = sketch.total_platforms(fleet);
        (self.container_range.0..=self.container_range.1).contains(&c)
            && (self.platform_range.0..=self.platform_range.1).contains(&p)
    }

    /// Largest railcar count per type and container count per length an
    /// instance of this class can have.
    pub fn max_counts(&self, fleet: &Fleet) -> [u32; 12] {
        let mut m = [0; 12];
        for (j, p) in fleet.platforms_per_type().iter().enumerate() {
            m[j] = self.platform_range.1 / p;
        }
        m[10] = self.container_range.1;
        m[11] = self.container_range.1;
        m
    }
}

impl fmt::Display for DataClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.tag {
            ClassTag::A => "A",
            ClassTag::B => "B",
            ClassTag::C => "C",
            ClassTag::D => "D",
        };
        match self.scale {
            Scale::Full => write!(f, "{t}"),
            Scale::Desk => write!(f, "{t}'"),
        }
    }
}

impl FromStr for DataClass {
    type Err = Error;

    /// `A`..`D` for full-size classes; a trailing `'` or `p` selects desk size.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, scale) = match s.strip_suffix('\'').or_else(|| s.strip_suffix(['p', 'P'])) {
            Some(h) => (h, Scale::Desk),
            None => (s, Scale::Full),
        };
        let tag = match head.to_ascii_uppercase().as_str() {
            "A" => ClassTag::A,
            "B" => ClassTag::B,
            "C" => ClassTag::C,
            "D" => ClassTag::D,
            _ => {
                return Err(Error::Config(format!(
                    "unknown data class {s:?}; expected A, B, C, D or a desk-size variant such as A'"
                )))
            }
        };
        Ok(DataClass::new(tag, scale))
    }
}

/// Distribution of container weights given the sketch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightModel {
    pub load_ratio_low: f64,
    pub load_ratio_high: f64,
    /// Range of the per-instance empty proportion, per length.
    pub empty_probability_bounds: [(f64, f64); NUM_LENGTHS],
    pub tare: [f64; NUM_LENGTHS],
    pub net_capacity: [f64; NUM_LENGTHS],
}

impl WeightModel {
    /// Loads between 10% and 90% of capacity; empty proportions within
    /// 0.10 of each spec's empty probability.
    pub fn from_fleet(fleet: &Fleet) -> Self {
        let specs = fleet.container_specs();
        WeightModel {
            load_ratio_low: 0.10,
            load_ratio_high: 0.90,
            empty_probability_bounds: std::array::from_fn(|i| {
                let p = specs[i].empty_probability;
                ((p - 0.10).max(0.0), (p + 0.10).min(1.0))
            }),
            tare: std::array::from_fn(|i| specs[i].tare),
            net_capacity: std::array::from_fn(|i| specs[i].net_capacity),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.load_ratio_low && self.load_ratio_low < self.load_ratio_high && self.load_ratio_high <= 1.0) {
            return Err(Error::Config(format!(
                "load ratios must satisfy 0 <= low < high <= 1, got {} and {}",
                self.load_ratio_low, self.load_ratio_high
            )));
        }
        for (lo, hi) in self.empty_probability_bounds {
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(Error::Config(format!(
                    "empty probability bounds must satisfy 0 <= lo <= hi <= 1, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Protocol {
    OneStage,
    TwoStage,
}

impl FromStr for Protocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "1s" | "one-stage" => Ok(Protocol::OneStage),
            "2s" | "two-stage" => Ok(Protocol::TwoStage),
            _ => Err(Error::Config(format!("unknown protocol {s:?}; expected 1s or 2s"))),
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Protocol::OneStage => "1s",
            Protocol::TwoStage => "2s",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub protocol: Protocol,
    pub second_stage_draws: u32,
    pub seed: u64,
    pub class: DataClass,
}

impl SamplingPlan {
    pub fn validate(&self) -> Result<()> {
        if self.protocol == Protocol::TwoStage && self.second_stage_draws == 0 {
            return Err(Error::Config(
                "two-stage sampling needs at least one draw per cohort".into(),
            ));
        }
        Ok(())
    }
}

/// Number of railcar compositions reaching each platform total, for the
/// types `j..` (row `j`). Used to draw compositions uniformly.
struct CompositionTable {
    platforms: [u32; NUM_RAILCAR_TYPES],
    ways: Vec<Vec<u128>>,
}

impl CompositionTable {
    fn new(fleet: &Fleet, max_total: u32) -> Self {
        let platforms = fleet.platforms_per_type();
        let width = max_total as usize + 1;
        let mut ways = vec![vec![0u128; width]; NUM_RAILCAR_TYPES + 1];
        ways[NUM_RAILCAR_TYPES][0] = 1;
        for j in (0..NUM_RAILCAR_TYPES).rev() {
            let p = platforms[j] as usize;
            for t in 0..width {
                let mut acc = 0u128;
                let mut r = 0;
                while r * p <= t {
                    acc = acc.saturating_add(ways[j + 1][t - r * p]);
                    r += 1;
                }
                ways[j][t] = acc;
            }
        }
        CompositionTable { platforms, ways }
    }

    fn count(&self, total: u32) -> u128 {
        self.ways[0][total as usize]
    }

    fn draw<R: Rng>(&self, total: u32, rng: &mut R) -> [u32; NUM_RAILCAR_TYPES] {
        let mut out = [0; NUM_RAILCAR_TYPES];
        let mut rem = total as usize;
        for j in 0..NUM_RAILCAR_TYPES {
            let p = self.platforms[j] as usize;
            let mut pick = rng.gen_range(0..self.ways[j][rem]);
            let mut r = 0;
            loop {
                let w = self.ways[j + 1][rem - r * p];
                if pick < w {
                    break;
                }
                pick -= w;
                r += 1;
            }
            out[j] = r as u32;
            rem -= r * p;
        }
        debug_assert_eq!(rem, 0);
        out
    }
}

/// Draws sketches for one class: the platform total uniformly among the
/// attainable totals, then a composition uniformly among those reaching it,
/// then the container total and its split uniformly.
pub struct SketchSampler {
    class: DataClass,
    table: CompositionTable,
    totals: Vec<u32>,
}

impl SketchSampler {
    pub fn new(class: DataClass, fleet: &Fleet) -> Result<Self> {
        let (plo, phi) = class.platform_range;
        let (clo, chi) = class.container_range;
        if plo > phi || clo > chi {
            return Err(Error::Config(format!("class {class} has an empty range")));
        }
        let table = CompositionTable::new(fleet, phi);
        let totals: Vec<u32> = (plo..=phi).filter(|&t| table.count(t) > 0).collect();
        if totals.is_empty() {
            return Err(Error::Config(format!(
                "no railcar composition of this fleet has a platform total in [{plo}, {phi}]"
            )));
        }
        Ok(SketchSampler { class, table, totals })
    }

    pub fn class(&self) -> DataClass {
        self.class
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> InstanceSketch {
        let total = self.totals[rng.gen_range(0..self.totals.len())];
        let railcar_counts = self.table.draw(total, rng);
        let (clo, chi) = self.class.container_range;
        let c = rng.gen_range(clo..=chi);
        let n40 = rng.gen_range(0..=c);
        InstanceSketch {
            railcar_counts,
            container_counts: [n40, c - n40],
        }
    }
}

pub fn sample_sketch<R: Rng>(class: DataClass, fleet: &Fleet, rng: &mut R) -> Result<InstanceSketch> {
    Ok(SketchSampler::new(class, fleet)?.sample(rng))
}

pub fn sample_weights<R: Rng>(sketch: &InstanceSketch, model: &WeightModel, rng: &mut R) -> FullInstance {
    let weights = std::array::from_fn(|i| {
        let n = sketch.container_counts[i] as usize;
        let (lo, hi) = model.empty_probability_bounds[i];
        let share = if hi > lo { rng.gen_range(lo..=hi) } else { lo };
        let n_empty = ((share * n as f64).round() as usize).min(n);
        let mut empty = vec![false; n];
        for k in index::sample(rng, n, n_empty) {
            empty[k] = true;
        }
        let tare = model.tare[i];
        let low = model.load_ratio_low * model.net_capacity[i];
        let high = model.load_ratio_high * model.net_capacity[i];
        empty
            .into_iter()
            .map(|e| if e { tare } else { tare + rng.gen_range(low..=high) })
            .collect()
    });
    FullInstance {
        sketch: *sketch,
        weights,
    }
}

/// One sketch with `k` independent weight draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cohort {
    pub index: usize,
    pub sketch: InstanceSketch,
    pub members: Vec<FullInstance>,
}

/// `n` independent instances. Instance `i` depends only on `(seed, i)`.
pub fn generate_1s(n: usize, class: DataClass, fleet: &Fleet, seed: u64) -> Result<Vec<FullInstance>> {
    let sampler = SketchSampler::new(class, fleet)?;
    let model = WeightModel::from_fleet(fleet);
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, &[label::INSTANCE, i as u64]);
            let sketch = sampler.sample(&mut rng);
            sample_weights(&sketch, &model, &mut rng)
        })
        .collect())
}

/// `n_first` cohorts of `k` members sharing a sketch.
pub fn generate_2s(n_first: usize, k: usize, class: DataClass, fleet: &Fleet, seed: u64) -> Result<Vec<Cohort>> {
    if k == 0 {
        return Err(Error::Config(
            "two-stage sampling needs at least one draw per cohort".into(),
        ));
    }
    let sampler = SketchSampler::new(class, fleet)?;
    let model = WeightModel::from_fleet(fleet);
    Ok((0..n_first)
        .into_par_iter()
        .map(|c| {
            let sketch = sampler.sample(&mut substream(seed, &[label::COHORT_SKETCH, c as u64]));
            let members = (0..k)
                .map(|m| {
                    let mut rng = substream(seed, &[label::COHORT_MEMBER, c as u64, m as u64]);
                    sample_weights(&sketch, &model, &mut rng)
                })
                .collect();
            Cohort {
                index: c,
                sketch,
                members,
            }
        })
        .collect())
}

/// Capacities and tares measured on individual railcars of one type.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RailcarObservation {
    pub type_id: u8,
    pub platform_capacities: Vec<f64>,
    pub platform_tares: Vec<f64>,
}

/// Lower median: the element of rank `ceil(n/2)` in ascending order.
pub fn lower_median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(v[(v.len() - 1) / 2])
}

/// Replace each platform's capacity and tare in `template` with the lower
/// median of the observations of its railcar type.
pub fn aggregate_railcar_inputs(template: &Fleet, observations: &[RailcarObservation]) -> Result<Fleet> {
    let mut types: Vec<RailcarType> = template.railcar_types().to_vec();
    for t in &mut types {
        let obs: Vec<&RailcarObservation> = observations.iter().filter(|o| o.type_id == t.id).collect();
        if obs.is_empty() {
            return Err(Error::Config(format!("no observations for railcar type {}", t.id)));
        }
        for (pi, platform) in t.platforms.iter_mut().enumerate() {
            let mut caps = Vec::with_capacity(obs.len());
            let mut tares = Vec::with_capacity(obs.len());
            for o in &obs {
                match (o.platform_capacities.get(pi), o.platform_tares.get(pi)) {
                    (Some(c), Some(w)) => {
                        caps.push(*c);
                        tares.push(*w);
                    }
                    _ => {
                        return Err(Error::Config(format!(
                            "observation of railcar type {} lacks platform {pi}",
                            t.id
                        )))
                    }
                }
            }
            platform.weight_capacity = lower_median(&caps).expect("nonempty");
            platform.tare = lower_median(&tares).expect("nonempty");
        }
    }
    Fleet::new(types, *template.container_specs())
}
