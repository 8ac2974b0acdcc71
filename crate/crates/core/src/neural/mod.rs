//! Feedforward networks that map a sketch to a summary.
//!
//! Two heads share one code path: a classification head with one masked
//! softmax block per summary coordinate, trained by pseudo-likelihood, and
//! a regression head with one scalar per coordinate, trained on absolute
//! error. With zero hidden layers they reduce to multinomial logistic
//! regression and linear regression.

mod adam;
mod checkpoint;
mod loss;
mod network;
mod search;
mod train;

pub use adam::{Adam, AdamParams};
pub use checkpoint::{load_checkpoint, read_checkpoint, save_checkpoint, write_checkpoint, Checkpoint};
pub use loss::{gradient_gap, kink_distance};
pub use network::Network;
pub use search::{random_search, SearchResult, SearchSpace, Trial};
pub use train::{network_mae, split_arrays, train, TrainReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fleet::NUM_FEATURES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Head {
    /// Block `j` has `max_counts[j] + 1` outcomes.
    Classification {
        max_counts: [u32; NUM_FEATURES],
    },
    Regression,
}

/// Which predictor family; `LogReg` and `LinReg` are the networks without
/// hidden layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    ClassMlp,
    RegMlp,
    LogReg,
    LinReg,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::ClassMlp,
        ModelKind::RegMlp,
        ModelKind::LogReg,
        ModelKind::LinReg,
    ];

    pub fn is_classification(self) -> bool {
        matches!(self, ModelKind::ClassMlp | ModelKind::LogReg)
    }

    pub fn has_hidden_layers(self) -> bool {
        matches!(self, ModelKind::ClassMlp | ModelKind::RegMlp)
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::ClassMlp => "ClassMLP",
            ModelKind::RegMlp => "RegMLP",
            ModelKind::LogReg => "LogReg",
            ModelKind::LinReg => "LinReg",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "classmlp" => Ok(ModelKind::ClassMlp),
            "regmlp" => Ok(ModelKind::RegMlp),
            "logreg" => Ok(ModelKind::LogReg),
            "linreg" => Ok(ModelKind::LinReg),
            _ => Err(Error::Config(format!(
                "unknown model {s:?}; expected classmlp, regmlp, logreg or linreg"
            ))),
        }
    }
}

/// Validation quantity that drives early stopping and checkpoint choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monitor {
    /// Mean data loss (likelihood or absolute error).
    Loss,
    /// Slot-weighted MAE of rounded, feasible predictions.
    Mae,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkConfig {
    pub hidden_layers: usize,
    pub hidden_width: usize,
    pub l1: f64,
    pub l2: f64,
    pub head: Head,
    /// Inputs are divided by these before the first layer.
    pub input_scale: [f64; NUM_FEATURES],
    pub learning_rate: f64,
    pub batch_size: usize,
    pub adam: AdamParams,
    pub patience: usize,
    pub max_epochs: usize,
    pub monitor: Monitor,
    pub init_seed: u64,
}

impl NetworkConfig {
    /// Defaults for a model family whose inputs stay within `max_counts`.
    pub fn new(kind: ModelKind, max_counts: [u32; NUM_FEATURES]) -> Self {
        let head = if kind.is_classification() {
            Head::Classification { max_counts }
        } else {
            Head::Regression
        };
        let (layers, width) = if kind.has_hidden_layers() { (2, 64) } else { (0, 0) };
        NetworkConfig {
            hidden_layers: layers,
            hidden_width: width,
            l1: 0.0,
            l2: 0.0,
            head,
            input_scale: std::array::from_fn(|j| max_counts[j].max(1) as f64),
            learning_rate: 1e-3,
            batch_size: 128,
            adam: AdamParams::default(),
            patience: 10,
            max_epochs: 200,
            monitor: Monitor::Mae,
            init_seed: 0,
        }
    }

    pub fn kind(&self) -> ModelKind {
        match (self.head, self.hidden_layers > 0) {
            (Head::Classification { .. }, true) => ModelKind::ClassMlp,
            (Head::Classification { .. }, false) => ModelKind::LogReg,
            (Head::Regression, true) => ModelKind::RegMlp,
            (Head::Regression, false) => ModelKind::LinReg,
        }
    }

    pub fn output_size(&self) -> usize {
        match self.head {
            Head::Classification { max_counts } => max_counts.iter().map(|&m| m as usize + 1).sum(),
            Head::Regression => NUM_FEATURES,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.hidden_layers > 0 && self.hidden_width == 0 {
            return bad("hidden_width must be positive when hidden layers are present".into());
        }
        if !(self.l1 >= 0.0 && self.l2 >= 0.0 && self.l1.is_finite() && self.l2.is_finite()) {
            return bad(format!(
                "l1 and l2 must be finite and nonnegative, got {} and {}",
                self.l1, self.l2
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad(format!("learning_rate must be positive, got {}", self.learning_rate));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be positive".into());
        }
        if self.input_scale.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
            return bad("input_scale entries must be positive".into());
        }
        self.adam.validate()
    }
}

/// Elementwise maximum, for sizing one network across several classes.
pub fn combine_max_counts(counts: &[[u32; NUM_FEATURES]]) -> [u32; NUM_FEATURES] {
    std::array::from_fn(|j| counts.iter().map(|c| c[j]).max().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn output_layer_for_full_ranges() {
        let mut max = [50u32; 12];
        max[10] = 150;
        max[11] = 150;
        let cfg = NetworkConfig::new(ModelKind::ClassMlp, max);
        assert_eq!(cfg.output_size(), 812);
        assert_eq!(NetworkConfig::new(ModelKind::RegMlp, max).output_size(), 12);
    }

    #[test]
    fn kinds_round_trip() {
        for k in ModelKind::ALL {
            assert_eq!(NetworkConfig::new(k, [3; 12]).kind(), k);
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
    }
}
