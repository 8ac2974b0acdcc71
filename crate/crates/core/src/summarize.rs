//! Solution summaries and labeled datasets.
//!
//! A summary keeps only what a planner needs before weights are known:
//! railcars used per type and containers loaded per length. Datasets pair
//! sketches with summaries under one of two aggregation methods:
//!
//! * [`Aggregation::OThrML`] feeds every solved instance (or one random
//!   member per two-stage cohort) to the learner as is;
//! * [`Aggregation::OBefML`] labels each cohort with the member whose
//!   objective is the cohort's lower median.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fleet::{Fleet, NUM_LENGTHS, NUM_RAILCAR_TYPES};
use crate::rng::{label, substream};
use crate::sampling::{FullInstance, InstanceSketch, SamplingPlan};
use crate::solver::{DetailedSolution, Scalarizer};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Summary {
    pub railcars_used: [u32; NUM_RAILCAR_TYPES],
    pub containers_loaded: [u32; NUM_LENGTHS],
}

impl Summary {
    pub fn to_vector(&self) -> [u32; 12] {
        let mut v = [0; 12];
        v[..NUM_RAILCAR_TYPES].copy_from_slice(&self.railcars_used);
        v[NUM_RAILCAR_TYPES..].copy_from_slice(&self.containers_loaded);
        v
    }

    pub fn from_vector(v: [u32; 12]) -> Self {
        let mut s = Summary::default();
        s.railcars_used.copy_from_slice(&v[..NUM_RAILCAR_TYPES]);
        s.containers_loaded.copy_from_slice(&v[NUM_RAILCAR_TYPES..]);
        s
    }

    /// Componentwise `self <= sketch`.
    pub fn fits_within(&self, sketch: &InstanceSketch) -> bool {
        self.to_vector().iter().zip(sketch.to_vector()).all(|(a, b)| *a <= b)
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_vector().iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Railcars used per type and containers loaded per length. Reads only
/// placements and patterns, never weights.
pub fn summarize(solution: &DetailedSolution) -> Summary {
    Summary {
        railcars_used: solution.used_per_type(),
        containers_loaded: solution.loaded_per_length(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[allow(clippy::upper_case_acronyms)]
pub enum Aggregation {
    /// Lower-median member of each cohort.
    OBefML,
    /// Raw pairs; one random member per cohort.
    OThrML,
}

impl FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "obefml" => Ok(Aggregation::OBefML),
            "othrml" => Ok(Aggregation::OThrML),
            _ => Err(Error::Config(format!(
                "unknown aggregation {s:?}; expected obefml or othrml"
            ))),
        }
    }
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::OBefML => "obefml",
            Aggregation::OThrML => "othrml",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample {
    pub input: InstanceSketch,
    pub target: Summary,
    /// Weights of the instance whose solution gave the target.
    pub weights: [Vec<f64>; NUM_LENGTHS],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn code(self) -> u8 {
        match self {
            Split::Train => 0,
            Split::Validation => 1,
            Split::Test => 2,
        }
    }

    pub fn from_code(c: u8) -> Option<Self> {
        match c {
            0 => Some(Split::Train),
            1 => Some(Split::Validation),
            2 => Some(Split::Test),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub plan: SamplingPlan,
    pub aggregation: Aggregation,
    pub split_seed: u64,
    pub fleet_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub examples: Vec<LabeledExample>,
    pub split: Vec<Split>,
    pub provenance: Vec<Provenance>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn part(&self, which: Split) -> Vec<&LabeledExample> {
        self.examples
            .iter()
            .zip(&self.split)
            .filter(|(_, s)| **s == which)
            .map(|(e, _)| e)
            .collect()
    }

    /// Concatenate datasets, keeping each example's split.
    pub fn merge(parts: Vec<Dataset>) -> Dataset {
        let mut out = Dataset {
            examples: Vec::new(),
            split: Vec::new(),
            provenance: Vec::new(),
        };
        for d in parts {
            out.examples.extend(d.examples);
            out.split.extend(d.split);
            out.provenance.extend(d.provenance);
        }
        out
    }
}

/// Seeded permutation cut into 64% training, 16% validation, 20% test.
pub fn split_examples(n: usize, seed: u64) -> Vec<Split> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut substream(seed, &[label::SPLIT]));
    let n_train = (0.64 * n as f64).round() as usize;
    let n_val = ((0.16 * n as f64).round() as usize).min(n - n_train);
    let mut out = vec![Split::Test; n];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = if rank < n_train {
            Split::Train
        } else if rank < n_train + n_val {
            Split::Validation
        } else {
            Split::Test
        };
    }
    out
}

/// Index of the lower-median value: rank `ceil(k/2)` after sorting by
/// value, then by index.
pub fn lower_median_index(values: &[i64]) -> Option<usize> {
    if values.is_empty() {
        return None;
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by_key(|&i| (values[i], i));
    Some(order[values.len().div_ceil(2) - 1])
}

/// A two-stage cohort whose members are solved.
#[derive(Debug, Clone, PartialEq)]
pub struct SolvedCohort {
    pub index: usize,
    pub sketch: InstanceSketch,
    pub members: Vec<(FullInstance, DetailedSolution)>,
}

impl SolvedCohort {
    /// Scalarized objective value of each member.
    pub fn values(&self, fleet: &Fleet) -> Vec<i64> {
        let s = Scalarizer::for_instance(&self.sketch, fleet);
        self.members.iter().map(|(_, sol)| s.value(&sol.objective)).collect()
    }

    pub fn median_member(&self, fleet: &Fleet) -> usize {
        lower_median_index(&self.values(fleet)).expect("cohorts are nonempty")
    }
}

fn example(instance: &FullInstance, solution: &DetailedSolution) -> LabeledExample {
    LabeledExample {
        input: instance.sketch,
        target: summarize(solution),
        weights: instance.weights.clone(),
    }
}

fn finish(examples: Vec<LabeledExample>, split_seed: u64, provenance: Option<Provenance>) -> Dataset {
    let split = split_examples(examples.len(), split_seed);
    Dataset {
        examples,
        split,
        provenance: provenance.into_iter().collect(),
    }
}

/// One example per solved one-stage instance, unchanged.
pub fn build_dataset_othrml(
    pairs: &[(FullInstance, DetailedSolution)],
    split_seed: u64,
    provenance: Option<Provenance>,
) -> Dataset {
    let examples = pairs.iter().map(|(i, s)| example(i, s)).collect();
    finish(examples, split_seed, provenance)
}

/// One uniformly chosen member per cohort. The choice for cohort `c`
/// depends only on `(pick_seed, c)`.
pub fn build_dataset_othrml_cohorts(
    cohorts: &[SolvedCohort],
    pick_seed: u64,
    split_seed: u64,
    provenance: Option<Provenance>,
) -> Dataset {
    let examples = cohorts
        .iter()
        .map(|c| {
            let m = substream(pick_seed, &[label::MEMBER_PICK, c.index as u64]).gen_range(0..c.members.len());
            let (inst, sol) = &c.members[m];
            example(inst, sol)
        })
        .collect();
    finish(examples, split_seed, provenance)
}

/// The lower-median member of each cohort.
pub fn build_dataset_obefml(
    cohorts: &[SolvedCohort],
    fleet: &Fleet,
    split_seed: u64,
    provenance: Option<Provenance>,
) -> Dataset {
    let examples = cohorts
        .iter()
        .map(|c| {
            let (inst, sol) = &c.members[c.median_member(fleet)];
            example(inst, sol)
        })
        .collect();
    finish(examples, split_seed, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{generate_1s, generate_2s, DataClass};
    use crate::solver::{solve_lpp, LexObjective, SolverConfig};
    use proptest::prelude::*;

    #[test]
    fn zero_solution_zero_summary() {
        assert_eq!(summarize(&DetailedSolution::empty()), Summary::default());
    }

    #[test]
    fn split_sizes_and_determinism() {
        let s = split_examples(100, 4);
        let count = |w| s.iter().filter(|x| **x == w).count();
        assert_eq!(
            (count(Split::Train), count(Split::Validation), count(Split::Test)),
            (64, 16, 20)
        );
        assert_eq!(s, split_examples(100, 4));
        assert_ne!(s, split_examples(100, 5));
        assert!(split_examples(0, 4).is_empty());
    }

    #[test]
    fn median_small_cases() {
        assert_eq!(lower_median_index(&[5]), Some(0));
        assert_eq!(lower_median_index(&[9, 1, 5]), Some(2));
        assert_eq!(lower_median_index(&[4, 1, 3, 2]), Some(3));
        // ties broken by lower index
        assert_eq!(lower_median_index(&[2, 2, 2, 2]), Some(1));
        assert_eq!(lower_median_index(&[]), None);
    }

    fn solve_all(xs: Vec<FullInstance>, fleet: &Fleet) -> Vec<(FullInstance, DetailedSolution)> {
        xs.into_iter()
            .map(|i| {
                let s = solve_lpp(&i, fleet, &SolverConfig::exact()).unwrap();
                (i, s)
            })
            .collect()
    }

    #[test]
    fn one_stage_dataset_keeps_every_instance() {
        let fleet = Fleet::default_fleet();
        let class: DataClass = "A'".parse().unwrap();
        let pairs = solve_all(generate_1s(30, class, &fleet, 2).unwrap(), &fleet);
        let d = build_dataset_othrml(&pairs, 1, None);
        assert_eq!(d.len(), 30);
        for (e, (i, s)) in d.examples.iter().zip(&pairs) {
            assert_eq!(e.input, i.sketch);
            assert_eq!(e.target, summarize(s));
            assert!(e.target.fits_within(&e.input));
        }
    }

    fn cohorts(n: usize, k: usize, seed: u64) -> (Fleet, Vec<SolvedCohort>) {
        let fleet = Fleet::default_fleet();
        let class: DataClass = "A'".parse().unwrap();
        let cs = generate_2s(n, k, class, &fleet, seed).unwrap();
        let solved = cs
            .into_iter()
            .map(|c| SolvedCohort {
                index: c.index,
                sketch: c.sketch,
                members: solve_all(c.members, &fleet),
            })
            .collect();
        (fleet, solved)
    }

    #[test]
    fn cohort_datasets() {
        let (fleet, cs) = cohorts(10, 20, 6);
        let thr = build_dataset_othrml_cohorts(&cs, 3, 1, None);
        assert_eq!(thr.len(), 10);
        for (e, c) in thr.examples.iter().zip(&cs) {
            let member = c.members.iter().find(|(i, _)| i.weights == e.weights).unwrap();
            assert_eq!(e.target, summarize(&member.1));
        }
        let bef = build_dataset_obefml(&cs, &fleet, 1, None);
        assert_eq!(bef.len(), 10);
        for (e, c) in bef.examples.iter().zip(&cs) {
            let values = c.values(&fleet);
            let chosen = c.members.iter().position(|(i, _)| i.weights == e.weights).unwrap();
            let v = values[chosen];
            assert!(values.iter().min().unwrap() <= &v && &v <= values.iter().max().unwrap());
            assert!(e.target.fits_within(&e.input));
        }
    }

    #[test]
    fn odd_cohort_with_distinct_values_picks_middle() {
        let fleet = Fleet::default_fleet();
        let sketch = InstanceSketch::new([1; 10], [3, 0]);
        let member = |loaded: u32| {
            let inst = FullInstance {
                sketch,
                weights: [vec![5000.0; 3], vec![]],
            };
            let sol = DetailedSolution {
                objective: LexObjective {
                    loaded_containers: loaded,
                    used_railcar_length: 40,
                    loaded_container_length: 40 * loaded,
                },
                ..DetailedSolution::empty()
            };
            (inst, sol)
        };
        let c = SolvedCohort {
            index: 0,
            sketch,
            members: vec![member(3), member(1), member(2)],
        };
        assert_eq!(c.median_member(&fleet), 2);
    }

    proptest! {
        #[test]
        fn lower_median_agrees_with_counting(values in proptest::collection::vec(-50i64..50, 1..120)) {
            let i = lower_median_index(&values).unwrap();
            let v = values[i];
            let rank = values.len().div_ceil(2);
            let below = values.iter().filter(|x| **x < v).count();
            let at_most = values.iter().filter(|x| **x <= v).count();
            prop_assert!(below < rank && rank <= at_most);
            // lowest index among members sharing the value and rank
            let same_before = values[..i].iter().filter(|x| **x == v).count();
            prop_assert_eq!(below + same_before + 1, rank);
        }

        #[test]
        fn split_fractions(n in 0usize..2000, seed in any::<u64>()) {
            let s = split_examples(n, seed);
            let train = s.iter().filter(|x| **x == Split::Train).count() as f64;
            let val = s.iter().filter(|x| **x == Split::Validation).count() as f64;
            prop_assert!((train - 0.64 * n as f64).abs() <= 1.0);
            prop_assert!((val - 0.16 * n as f64).abs() <= 1.0);
        }
    }
}
