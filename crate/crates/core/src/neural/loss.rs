use crate::error::{Error, Result};
use crate::fleet::NUM_FEATURES;

use super::{Head, Network, NetworkConfig};

/// Start of each classification block in the output layer, plus the total.
pub(crate) fn block_offsets(max_counts: &[u32; NUM_FEATURES]) -> [usize; NUM_FEATURES + 1] {
    let mut o = [0; NUM_FEATURES + 1];
    for j in 0..NUM_FEATURES {
        o[j + 1] = o[j] + max_counts[j] as usize + 1;
    }
    o
}

/// Summed data loss of a batch from its raw output layer `z`
/// (rows × outputs). When `dz` is given it receives the gradient of that
/// sum with respect to `z`; when `terms` is given it receives the
/// individual per-example, per-block summands.
///
/// Classification: negative log-likelihood of each target count under a
/// softmax restricted to counts not above the input. Regression: absolute
/// error of the outputs, with subgradient 0 at equality.
pub(crate) fn head_loss(
    config: &NetworkConfig,
    z: &[f64],
    inputs: &[[u32; NUM_FEATURES]],
    targets: &[[u32; NUM_FEATURES]],
    mut dz: Option<&mut [f64]>,
    mut terms: Option<&mut Vec<f64>>,
) -> Result<f64> {
    let width = config.output_size();
    debug_assert_eq!(z.len(), inputs.len() * width);
    let mut total = 0.0;
    match config.head {
        Head::Regression => {
            for (r, t) in targets.iter().enumerate() {
                for j in 0..NUM_FEATURES {
                    let diff = z[r * width + j] - t[j] as f64;
                    total += diff.abs();
                    if let Some(ts) = terms.as_deref_mut() {
                        ts.push(diff.abs());
                    }
                    if let Some(d) = dz.as_deref_mut() {
                        d[r * width + j] = if diff > 0.0 {
                            1.0
                        } else if diff < 0.0 {
                            -1.0
                        } else {
                            0.0
                        };
                    }
                }
            }
        }
        Head::Classification { max_counts } => {
            let offsets = block_offsets(&max_counts);
            for (r, (x, t)) in inputs.iter().zip(targets).enumerate() {
                for j in 0..NUM_FEATURES {
                    if x[j] > max_counts[j] {
                        return Err(Error::UnsupportedInput {
                            coordinate: j,
                            count: x[j],
                            max: max_counts[j],
                        });
                    }
                    if t[j] > x[j] {
                        return Err(Error::InvalidInput(format!(
                            "target {} exceeds input {} at coordinate {j}",
                            t[j], x[j]
                        )));
                    }
                    let start = r * width + offsets[j];
                    let live = &z[start..start + x[j] as usize + 1];
                    let top = live.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let sum: f64 = live.iter().map(|v| (v - top).exp()).sum();
                    let log_norm = top + sum.ln();
                    total += log_norm - live[t[j] as usize];
                    if let Some(ts) = terms.as_deref_mut() {
                        ts.push(log_norm - live[t[j] as usize]);
                    }
                    if let Some(d) = dz.as_deref_mut() {
                        let block = &mut d[start..r * width + offsets[j + 1]];
                        for (c, g) in block.iter_mut().enumerate() {
                            *g = if c < live.len() {
                                (live[c] - log_norm).exp()
                            } else {
                                0.0
                            };
                        }
                        block[t[j] as usize] -= 1.0;
                    }
                }
            }
        }
    }
    Ok(total)
}

/// Distance of a batch from the points where the training objective is
/// not differentiable: the smallest |pre-activation| of any hidden unit,
/// the smallest |parameter| under an L1 penalty and, for a regression
/// head, the smallest |output - target|.
pub fn kink_distance(net: &Network, xs: &[[u32; NUM_FEATURES]], ys: &[[u32; NUM_FEATURES]]) -> f64 {
    let mut d = net.min_hidden_preactivation(xs);
    if net.config().l1 > 0.0 {
        d = net.parameters().iter().fold(d, |d, p| d.min(p.abs()));
    }
    if matches!(net.config().head, Head::Regression) {
        let acts = net.forward_batch(xs);
        for (z, y) in acts.output().chunks(NUM_FEATURES).zip(ys) {
            for j in 0..NUM_FEATURES {
                d = d.min((z[j] - y[j] as f64).abs());
            }
        }
    }
    d
}

/// Largest relative gap between the analytic gradient of the training
/// objective and central differences with step `h`. Relative gaps use
/// `max(|analytic|, |numeric|, 1e-6)` as the denominator.
///
/// The differences are taken summand by summand (per example and output
/// block, and per parameter for the penalty) before summing, so the
/// cancellation error stays near one rounding of a single summand.
pub fn gradient_gap(net: &Network, xs: &[[u32; NUM_FEATURES]], ys: &[[u32; NUM_FEATURES]], h: f64) -> Result<f64> {
    let (_, grad) = net.loss_and_gradient(xs, ys)?;
    let terms = |n: &Network| -> Result<Vec<f64>> {
        let mut t = Vec::new();
        head_loss(n.config(), n.forward_batch(xs).output(), xs, ys, None, Some(&mut t))?;
        Ok(t)
    };
    let (l1, l2) = (net.config().l1, net.config().l2);
    let penalty = |t: f64| l1 * t.abs() + l2 * t * t;
    let inv = 1.0 / xs.len() as f64;
    let mut worst: f64 = 0.0;
    let mut probe = net.clone();
    for (i, &g) in grad.iter().enumerate() {
        let orig = probe.parameters()[i];
        probe.parameters_mut()[i] = orig + h;
        let up = terms(&probe)?;
        probe.parameters_mut()[i] = orig - h;
        let down = terms(&probe)?;
        probe.parameters_mut()[i] = orig;
        let data: f64 = up.iter().zip(&down).map(|(u, d)| u - d).sum::<f64>() * inv;
        let numeric = (data + penalty(orig + h) - penalty(orig - h)) / (2.0 * h);
        let scale = g.abs().max(numeric.abs()).max(1e-6);
        worst = worst.max((g - numeric).abs() / scale);
    }
    Ok(worst)
}
