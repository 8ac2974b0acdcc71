use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::mae_metrics;
use crate::fleet::{Fleet, NUM_FEATURES};
use crate::rng::{label, substream};
use crate::summarize::{Dataset, Split, Summary};

use super::{Adam, ModelKind, Monitor, Network, NetworkConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub kind: ModelKind,
    pub config: NetworkConfig,
    pub epochs_run: usize,
    /// Epoch (from 1) whose parameters were kept.
    pub best_epoch: usize,
    /// Minimum over epochs of the monitored validation quantity.
    pub best_validation_loss: f64,
    /// Slot-weighted validation MAE of the kept parameters.
    pub validation_mae: f64,
    /// Mean training objective per epoch.
    pub train_loss: Vec<f64>,
    /// Mean validation data loss per epoch.
    pub validation_loss: Vec<f64>,
    /// Validation MAE per epoch.
    pub validation_mae_curve: Vec<f64>,
    /// Not stored in checkpoints so that they stay reproducible.
    #[serde(skip)]
    pub wall_clock_secs: f64,
}

pub type Arrays = (Vec<[u32; NUM_FEATURES]>, Vec<[u32; NUM_FEATURES]>);

/// Inputs and targets of one split as plain count vectors.
pub fn split_arrays(dataset: &Dataset, which: Split) -> Arrays {
    dataset
        .part(which)
        .into_iter()
        .map(|e| (e.input.to_vector(), e.target.to_vector()))
        .unzip()
}

/// Slot-weighted MAE of the network's predictions.
pub fn network_mae(
    net: &Network,
    inputs: &[[u32; NUM_FEATURES]],
    targets: &[[u32; NUM_FEATURES]],
    fleet: &Fleet,
) -> Result<f64> {
    let preds: Vec<Summary> = net
        .predict_batch(inputs)?
        .into_iter()
        .map(Summary::from_vector)
        .collect();
    let targets: Vec<Summary> = targets.iter().map(|t| Summary::from_vector(*t)).collect();
    Ok(mae_metrics(&preds, &targets, fleet)?.mae)
}

/// Mini-batch Adam with early stopping on the monitored validation
/// quantity. The
/// returned network carries the parameters of the best epoch. Results are
/// bit-for-bit reproducible for a fixed config.
pub fn train(config: NetworkConfig, dataset: &Dataset, fleet: &Fleet) -> Result<(Network, TrainReport)> {
    let started = Instant::now();
    let (xs, ys) = split_arrays(dataset, Split::Train);
    let (vx, vy) = split_arrays(dataset, Split::Validation);
    if xs.is_empty() || vx.is_empty() {
        return Err(Error::InvalidInput(format!(
            "training needs nonempty train and validation splits, got {} and {}",
            xs.len(),
            vx.len()
        )));
    }
    let mut net = Network::new(config)?;
    let mut adam = Adam::new(config.adam, net.num_parameters());
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut bx = Vec::with_capacity(config.batch_size);
    let mut by = Vec::with_capacity(config.batch_size);

    let mut best = (f64::INFINITY, 0usize, net.parameters().to_vec());
    let mut train_curve = Vec::new();
    let mut val_curve = Vec::new();
    let mut mae_curve = Vec::new();
    let mut wait = 0;
    for epoch in 1..=config.max_epochs {
        let mut rng = substream(config.init_seed, &[label::SHUFFLE, epoch as u64]);
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        let batches = order.len().div_ceil(config.batch_size);
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            bx.clear();
            by.clear();
            bx.extend(chunk.iter().map(|&i| xs[i]));
            by.extend(chunk.iter().map(|&i| ys[i]));
            let (loss, grad) = net.loss_and_gradient(&bx, &by)?;
            if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
                return Err(Error::TrainingDiverged { epoch, batch: b, loss });
            }
            adam.step(net.parameters_mut(), &grad, config.learning_rate);
            epoch_loss += loss;
        }
        train_curve.push(epoch_loss / batches as f64);
        let val = net.data_loss(&vx, &vy)?;
        if !val.is_finite() {
            return Err(Error::TrainingDiverged {
                epoch,
                batch: batches,
                loss: val,
            });
        }
        val_curve.push(val);
        let mae = network_mae(&net, &vx, &vy, fleet)?;
        mae_curve.push(mae);
        let score = match config.monitor {
            Monitor::Loss => val,
            Monitor::Mae => mae,
        };
        if score < best.0 {
            best = (score, epoch, net.parameters().to_vec());
            wait = 0;
        } else {
            wait += 1;
            if wait >= config.patience {
                break;
            }
        }
    }

    let (best_loss, best_epoch, params) = best;
    let net = Network::from_parameters(config, params)?;
    let validation_mae = mae_curve[best_epoch - 1];
    let report = TrainReport {
        kind: config.kind(),
        config,
        epochs_run: val_curve.len(),
        best_epoch,
        best_validation_loss: best_loss,
        validation_mae,
        train_loss: train_curve,
        validation_loss: val_curve,
        validation_mae_curve: mae_curve,
        wall_clock_secs: started.elapsed().as_secs_f64(),
    };
    Ok((net, report))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::sampling::InstanceSketch;
    use crate::summarize::{split_examples, LabeledExample};
    use rand::Rng;

    pub(crate) fn identity_dataset(n: usize, max: [u32; 12], seed: u64) -> Dataset {
        let mut rng = substream(seed, &[0]);
        let examples = (0..n)
            .map(|_| {
                let v: [u32; 12] = std::array::from_fn(|j| rng.gen_range(0..=max[j]));
                LabeledExample {
                    input: InstanceSketch::from_vector(v),
                    target: Summary::from_vector(v),
                    weights: [vec![], vec![]],
                }
            })
            .collect();
        Dataset {
            examples,
            split: split_examples(n, seed),
            provenance: vec![],
        }
    }

    const MAX: [u32; 12] = [6, 6, 10, 10, 30, 30, 10, 30, 6, 15, 10, 10];

    #[test]
    fn learns_the_identity() {
        let fleet = Fleet::default_fleet();
        let data = identity_dataset(8000, MAX, 1);
        let mut cfg = NetworkConfig::new(ModelKind::RegMlp, MAX);
        cfg.max_epochs = 50;
        let (net, report) = train(cfg, &data, &fleet).unwrap();
        assert!(report.validation_mae < 0.1, "{report:?}");
        let best = report
            .validation_mae_curve
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best, report.best_validation_loss);
        let (vx, vy) = split_arrays(&data, Split::Validation);
        assert_eq!(network_mae(&net, &vx, &vy, &fleet).unwrap(), report.validation_mae);
    }

    #[test]
    fn fixed_seed_is_bitwise_reproducible() {
        let fleet = Fleet::default_fleet();
        let data = identity_dataset(600, MAX, 2);
        let mut cfg = NetworkConfig::new(ModelKind::ClassMlp, MAX);
        cfg.max_epochs = 3;
        cfg.l1 = 1e-4;
        let (a, ra) = train(cfg, &data, &fleet).unwrap();
        let (b, rb) = train(cfg, &data, &fleet).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra.validation_loss, rb.validation_loss);
    }

    #[test]
    fn zero_patience_stops_at_first_non_improving_epoch() {
        let fleet = Fleet::default_fleet();
        let data = identity_dataset(600, MAX, 3);
        let mut cfg = NetworkConfig::new(ModelKind::LinReg, MAX);
        cfg.patience = 0;
        cfg.monitor = Monitor::Loss;
        cfg.learning_rate = 0.5;
        cfg.max_epochs = 100;
        let (_, r) = train(cfg, &data, &fleet).unwrap();
        let last = *r.validation_loss.last().unwrap();
        let before = r.validation_loss[..r.epochs_run - 1]
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(r.epochs_run < 100);
        assert!(last >= before);
        assert!(r.validation_loss[..r.epochs_run - 1].windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn empty_validation_split_is_rejected() {
        let fleet = Fleet::default_fleet();
        let mut data = identity_dataset(50, MAX, 4);
        data.split = vec![Split::Train; 50];
        let cfg = NetworkConfig::new(ModelKind::LinReg, MAX);
        assert!(matches!(train(cfg, &data, &fleet), Err(Error::InvalidInput(_))));
    }
}
