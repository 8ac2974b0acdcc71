use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fleet::Fleet;
use crate::rng::{label, substream};
use crate::summarize::{Dataset, Split};

use super::train::{network_mae, split_arrays};
use super::{train, Network, NetworkConfig, TrainReport};

/// Ranges sampled uniformly by [`random_search`]; integer ranges are
/// inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpace {
    pub hidden_layers: (usize, usize),
    pub hidden_width: (usize, usize),
    pub l1: (f64, f64),
    pub l2: (f64, f64),
}

impl SearchSpace {
    /// Large networks, as used with full-size data.
    pub fn full() -> Self {
        SearchSpace {
            hidden_layers: (3, 13),
            hidden_width: (300, 1000),
            l1: (0.0, 1e-3),
            l2: (0.0, 1e-3),
        }
    }

    /// Small networks that train in seconds on desk-scale data. Penalties
    /// above about 1e-4 visibly underfit networks this small.
    pub fn desk() -> Self {
        SearchSpace {
            hidden_layers: (2, 4),
            hidden_width: (64, 128),
            l1: (0.0, 1e-5),
            l2: (0.0, 1e-5),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.hidden_layers.0 <= self.hidden_layers.1
            && self.hidden_width.0 <= self.hidden_width.1
            && (self.hidden_layers.0 == 0 || self.hidden_width.0 > 0)
            && 0.0 <= self.l1.0
            && self.l1.0 <= self.l1.1
            && 0.0 <= self.l2.0
            && self.l2.0 <= self.l2.1;
        if !ok {
            return Err(Error::Config(format!(
                "search space has an empty or negative range: {self:?}"
            )));
        }
        Ok(())
    }

    /// Configuration of trial `index`. Networks without hidden layers only
    /// draw the penalties.
    pub fn draw(&self, base: &NetworkConfig, seed: u64, index: usize) -> NetworkConfig {
        let mut rng = substream(seed, &[label::SEARCH, index as u64]);
        let mut cfg = *base;
        let layers = rng.gen_range(self.hidden_layers.0..=self.hidden_layers.1);
        let width = rng.gen_range(self.hidden_width.0..=self.hidden_width.1);
        if base.kind().has_hidden_layers() {
            cfg.hidden_layers = layers;
            cfg.hidden_width = width;
        }
        cfg.l1 = uniform(&mut rng, self.l1);
        cfg.l2 = uniform(&mut rng, self.l2);
        cfg.init_seed = rng.gen();
        cfg
    }
}

fn uniform<R: Rng>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

#[derive(Debug, Clone)]
pub struct Trial {
    pub config: NetworkConfig,
    pub network: Network,
    pub report: TrainReport,
    pub validation_mae: f64,
    /// MAE on the test split, when the dataset has one.
    pub test_mae: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub trials: Vec<Trial>,
    /// Index of the trial with the lowest validation MAE (first on ties).
    pub best: usize,
}

fn range(xs: impl Iterator<Item = f64>) -> Option<(f64, f64)> {
    xs.fold(None, |acc, x| match acc {
        None => Some((x, x)),
        Some((lo, hi)) => Some((lo.min(x), hi.max(x))),
    })
}

impl SearchResult {
    pub fn best_trial(&self) -> &Trial {
        &self.trials[self.best]
    }

    pub fn best_network(&self) -> &Network {
        &self.trials[self.best].network
    }

    pub fn validation_range(&self) -> (f64, f64) {
        range(self.trials.iter().map(|t| t.validation_mae)).expect("at least one trial")
    }

    pub fn test_range(&self) -> Option<(f64, f64)> {
        range(self.trials.iter().filter_map(|t| t.test_mae))
    }
}

/// Train `n_trials` configurations drawn from `space` around `base` and
/// keep the one with the lowest validation MAE. Trials run in parallel;
/// the outcome does not depend on the thread count.
pub fn random_search(
    base: &NetworkConfig,
    space: &SearchSpace,
    n_trials: usize,
    dataset: &Dataset,
    fleet: &Fleet,
    seed: u64,
) -> Result<SearchResult> {
    if n_trials == 0 {
        return Err(Error::Config("random search needs at least one trial".into()));
    }
    space.validate()?;
    let (tx, ty) = split_arrays(dataset, Split::Test);
    let trials = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let config = space.draw(base, seed, i);
            let (network, report) = train(config, dataset, fleet)?;
            let test_mae = if tx.is_empty() {
                None
            } else {
                Some(network_mae(&network, &tx, &ty, fleet)?)
            };
            Ok(Trial {
                config,
                validation_mae: report.validation_mae,
                network,
                report,
                test_mae,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, t) in trials.iter().enumerate() {
        if t.validation_mae < trials[best].validation_mae {
            best = i;
        }
    }
    Ok(SearchResult { trials, best })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neural::train::tests::identity_dataset;
    use crate::neural::ModelKind;

    const MAX: [u32; 12] = [2, 2, 3, 3, 6, 6, 3, 6, 2, 3, 4, 4];

    fn tiny_space() -> SearchSpace {
        SearchSpace {
            hidden_layers: (1, 2),
            hidden_width: (4, 8),
            l1: (0.0, 1e-4),
            l2: (0.0, 1e-4),
        }
    }

    #[test]
    fn draws_respect_ranges_and_are_reproducible() {
        let base = NetworkConfig::new(ModelKind::RegMlp, MAX);
        let space = SearchSpace::full();
        for i in 0..50 {
            let c = space.draw(&base, 9, i);
            assert!((3..=13).contains(&c.hidden_layers));
            assert!((300..=1000).contains(&c.hidden_width));
            assert!((0.0..1e-3).contains(&c.l1) && (0.0..1e-3).contains(&c.l2));
            assert_eq!(c, space.draw(&base, 9, i));
        }
        let lin = space.draw(&NetworkConfig::new(ModelKind::LinReg, MAX), 9, 0);
        assert_eq!((lin.hidden_layers, lin.hidden_width), (0, 0));
    }

    #[test]
    fn single_trial_is_the_answer() {
        let fleet = Fleet::default_fleet();
        let data = identity_dataset(300, MAX, 5);
        let mut base = NetworkConfig::new(ModelKind::RegMlp, MAX);
        base.max_epochs = 2;
        let r = random_search(&base, &tiny_space(), 1, &data, &fleet, 3).unwrap();
        assert_eq!(r.best, 0);
        assert_eq!(r.trials[0].config, tiny_space().draw(&base, 3, 0));
    }

    #[test]
    fn picks_lowest_validation_mae_and_reports_ranges() {
        let fleet = Fleet::default_fleet();
        let data = identity_dataset(300, MAX, 6);
        let mut base = NetworkConfig::new(ModelKind::RegMlp, MAX);
        base.max_epochs = 3;
        let r = random_search(&base, &tiny_space(), 4, &data, &fleet, 4).unwrap();
        let (lo, hi) = r.validation_range();
        assert_eq!(r.best_trial().validation_mae, lo);
        assert!(lo <= hi);
        let (tlo, thi) = r.test_range().unwrap();
        let chosen = r.best_trial().test_mae.unwrap();
        assert!(tlo <= chosen && chosen <= thi);
        let again = random_search(&base, &tiny_space(), 4, &data, &fleet, 4).unwrap();
        assert_eq!(again.best, r.best);
        assert_eq!(again.best_network(), r.best_network());
    }
}
