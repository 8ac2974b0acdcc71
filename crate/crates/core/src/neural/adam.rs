use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdamParams {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        AdamParams {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamParams {
    pub fn validate(&self) -> Result<()> {
        let unit = |b: f64| (0.0..1.0).contains(&b);
        if !unit(self.beta1) || !unit(self.beta2) || !(self.eps > 0.0) {
            return Err(Error::Config(format!(
                "adam needs beta1, beta2 in [0, 1) and eps > 0, got {:?}",
                self
            )));
        }
        Ok(())
    }
}

/// Bias-corrected adaptive moment estimation.
#[derive(Debug, Clone)]
pub struct Adam {
    pub params: AdamParams,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(params: AdamParams, n: usize) -> Self {
        Adam {
            params,
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
        }
    }

    pub fn steps(&self) -> i32 {
        self.t
    }

    pub fn step(&mut self, theta: &mut [f64], grad: &[f64], lr: f64) {
        assert_eq!(theta.len(), self.m.len());
        assert_eq!(grad.len(), self.m.len());
        let AdamParams { beta1, beta2, eps } = self.params;
        self.t += 1;
        let c1 = 1.0 - beta1.powi(self.t);
        let c2 = 1.0 - beta2.powi(self.t);
        for i in 0..theta.len() {
            let g = grad[i];
            self.m[i] = beta1 * self.m[i] + (1.0 - beta1) * g;
            self.v[i] = beta2 * self.v[i] + (1.0 - beta2) * g * g;
            let mhat = self.m[i] / c1;
            let vhat = self.v[i] / c2;
            theta[i] -= lr * mhat / (vhat.sqrt() + eps);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_keeps_parameters() {
        let mut a = Adam::new(AdamParams::default(), 3);
        let mut th = vec![1.0, -2.0, 0.5];
        for _ in 0..100 {
            a.step(&mut th, &[0.0; 3], 0.1);
        }
        assert_eq!(th, vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut a = Adam::new(AdamParams::default(), 2);
        let mut th = vec![0.0, 0.0];
        a.step(&mut th, &[3.0, -0.2], 0.01);
        assert!((th[0] + 0.01).abs() < 1e-8);
        assert!((th[1] - 0.01).abs() < 1e-8);
    }

    #[test]
    fn three_step_trace() {
        // gradients 1, -2, 0.5 with lr 0.1, beta 0.9/0.999, eps 1e-8:
        // m = 0.1, -0.11, -0.049; v = 0.001, 0.004999, 0.00524400...
        let p = AdamParams::default();
        let mut a = Adam::new(p, 1);
        let mut th = vec![0.0];
        let mut expect = 0.0;
        let (mut m, mut v) = (0.0f64, 0.0f64);
        let g = [1.0, -2.0, 0.5];
        let hand = [
            // step 1: mhat = 1, vhat = 1
            -0.1 / (1.0 + 1e-8),
            // step 2: m = -0.11, v = 0.004999; mhat = -0.11/0.19, vhat = 0.004999/0.001999
            -0.1 / (1.0 + 1e-8) + 0.1 * (0.11 / 0.19) / ((0.004999f64 / 0.001999).sqrt() + 1e-8),
        ];
        for (t, gt) in g.iter().enumerate() {
            a.step(&mut th, &[*gt], 0.1);
            m = 0.9 * m + 0.1 * gt;
            v = 0.999 * v + 0.001 * gt * gt;
            let k = t as i32 + 1;
            expect -= 0.1 * (m / (1.0 - 0.9f64.powi(k))) / ((v / (1.0 - 0.999f64.powi(k))).sqrt() + 1e-8);
            assert!((th[0] - expect).abs() < 1e-15);
            if t < 2 {
                assert!((th[0] - hand[t]).abs() < 1e-12, "step {k}: {} vs {}", th[0], hand[t]);
            }
        }
        // step 3: m = -0.049, v = 0.005244001; mhat = -0.049/0.271, vhat = 0.005244001/0.002997001
        let step3 = 0.1 * (0.049 / 0.271) / ((0.005244001f64 / 0.002997001).sqrt() + 1e-8);
        assert!((th[0] - (hand[1] + step3)).abs() < 1e-12);
        assert_eq!(a.steps(), 3);
    }
}
