//! Sampling, solving and aggregation in one call.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fleet::Fleet;
use crate::sampling::{generate_1s, generate_2s, DataClass, Protocol, SamplingPlan};
use crate::solver::{solve_lpp, SolverConfig};
use crate::summarize::{
    build_dataset_obefml, build_dataset_othrml, build_dataset_othrml_cohorts, Aggregation, Dataset, Provenance,
    SolvedCohort,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerateSpec {
    pub class: DataClass,
    pub protocol: Protocol,
    /// Instances (one-stage) or cohorts (two-stage).
    pub n: usize,
    /// Members per cohort; ignored for one-stage sampling.
    pub k: usize,
    pub aggregation: Aggregation,
    pub seed: u64,
    pub solver: SolverConfig,
}

impl GenerateSpec {
    pub fn plan(&self) -> SamplingPlan {
        SamplingPlan {
            protocol: self.protocol,
            second_stage_draws: if self.protocol == Protocol::TwoStage {
                self.k as u32
            } else {
                1
            },
            seed: self.seed,
            class: self.class,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.plan().validate()?;
        self.solver.validate()?;
        if self.protocol == Protocol::OneStage && self.aggregation == Aggregation::OBefML {
            return Err(Error::Config(
                "median aggregation needs cohorts; use two-stage sampling".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerateStats {
    pub solves: usize,
    pub node_limit_hits: usize,
}

/// Build a labeled dataset. The result depends only on `(fleet, spec)`,
/// not on the number of worker threads.
pub fn generate_dataset(fleet: &Fleet, spec: &GenerateSpec) -> Result<(Dataset, GenerateStats)> {
    spec.validate()?;
    let provenance = Provenance {
        plan: spec.plan(),
        aggregation: spec.aggregation,
        split_seed: spec.seed,
        fleet_hash: fleet.hash(),
    };
    let mut stats = GenerateStats::default();
    let dataset = match spec.protocol {
        Protocol::OneStage => {
            let instances = generate_1s(spec.n, spec.class, fleet, spec.seed)?;
            let pairs = instances
                .into_par_iter()
                .map(|i| solve_lpp(&i, fleet, &spec.solver).map(|s| (i, s)))
                .collect::<Result<Vec<_>>>()?;
            stats.solves = pairs.len();
            stats.node_limit_hits = pairs.iter().filter(|(_, s)| s.node_limit_hit).count();
            build_dataset_othrml(&pairs, spec.seed, Some(provenance))
        }
        Protocol::TwoStage => {
            let cohorts = generate_2s(spec.n, spec.k, spec.class, fleet, spec.seed)?;
            let solved = cohorts
                .into_par_iter()
                .map(|c| {
                    let members = c
                        .members
                        .into_iter()
                        .map(|i| solve_lpp(&i, fleet, &spec.solver).map(|s| (i, s)))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(SolvedCohort {
                        index: c.index,
                        sketch: c.sketch,
                        members,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            stats.solves = solved.iter().map(|c| c.members.len()).sum();
            stats.node_limit_hits = solved
                .iter()
                .flat_map(|c| &c.members)
                .filter(|(_, s)| s.node_limit_hit)
                .count();
            match spec.aggregation {
                Aggregation::OBefML => build_dataset_obefml(&solved, fleet, spec.seed, Some(provenance)),
                Aggregation::OThrML => build_dataset_othrml_cohorts(&solved, spec.seed, spec.seed, Some(provenance)),
            }
        }
    };
    Ok((dataset, stats))
}

/// Run `f` on a pool of `workers` threads (0 picks the default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {workers} worker threads: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(protocol: Protocol, aggregation: Aggregation) -> GenerateSpec {
        GenerateSpec {
            class: "A'".parse().unwrap(),
            protocol,
            n: 40,
            k: 5,
            aggregation,
            seed: 7,
            solver: SolverConfig::exact(),
        }
    }

    #[test]
    fn counts_and_constraints() {
        let fleet = Fleet::default_fleet();
        for (p, a) in [
            (Protocol::OneStage, Aggregation::OThrML),
            (Protocol::TwoStage, Aggregation::OThrML),
            (Protocol::TwoStage, Aggregation::OBefML),
        ] {
            let (d, stats) = generate_dataset(&fleet, &spec(p, a)).unwrap();
            assert_eq!(d.len(), 40);
            assert_eq!(stats.solves, if p == Protocol::OneStage { 40 } else { 200 });
            assert!(d.examples.iter().all(|e| e.target.fits_within(&e.input)));
        }
        assert!(generate_dataset(&fleet, &spec(Protocol::OneStage, Aggregation::OBefML)).is_err());
    }

    #[test]
    fn independent_of_worker_count() {
        let fleet = Fleet::default_fleet();
        let s = spec(Protocol::TwoStage, Aggregation::OBefML);
        let a = with_workers(1, || generate_dataset(&fleet, &s).unwrap().0).unwrap();
        let b = with_workers(3, || generate_dataset(&fleet, &s).unwrap().0).unwrap();
        assert_eq!(a, b);
    }
}
