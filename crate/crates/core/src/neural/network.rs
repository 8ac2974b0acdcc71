use rand::Rng;

use crate::error::{Error, Result};
use crate::fleet::NUM_FEATURES;
use crate::rng::{label, substream};
use crate::sampling::InstanceSketch;
use crate::summarize::Summary;

use super::loss::{block_offsets, head_loss};
use super::{Head, ModelKind, NetworkConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Layer {
    inputs: usize,
    outputs: usize,
    /// Start of the `inputs × outputs` row-major weight matrix; the bias
    /// vector follows it.
    offset: usize,
}

impl Layer {
    fn weights<'a>(&self, p: &'a [f64]) -> &'a [f64] {
        &p[self.offset..self.offset + self.inputs * self.outputs]
    }

    fn bias<'a>(&self, p: &'a [f64]) -> &'a [f64] {
        let s = self.offset + self.inputs * self.outputs;
        &p[s..s + self.outputs]
    }
}

/// Fully connected ReLU network with flat `f64` parameters. Immutable
/// networks are safe to share between threads for inference.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    config: NetworkConfig,
    layers: Vec<Layer>,
    params: Vec<f64>,
}

/// Per-layer values kept for backpropagation: the scaled input, each hidden
/// layer after ReLU, and the raw output layer.
pub(crate) struct Activations {
    rows: usize,
    values: Vec<Vec<f64>>,
}

impl Activations {
    pub(crate) fn output(&self) -> &[f64] {
        self.values.last().expect("at least one layer")
    }
}

/// `c = beta * c + a * b` for row-major `c` (m × n); `a` (m × k) and `b`
/// (k × n) are read through (row, column) strides so transposes are free.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    sa: (usize, usize),
    b: &[f64],
    sb: (usize, usize),
    beta: f64,
    c: &mut [f64],
) {
    if m == 0 || n == 0 {
        return;
    }
    assert!(c.len() >= m * n);
    if k > 0 {
        assert!((m - 1) * sa.0 + (k - 1) * sa.1 < a.len());
        assert!((k - 1) * sb.0 + (n - 1) * sb.1 < b.len());
    }
    // SAFETY: the asserts above keep every access of the kernel inside the
    // three slices, and `c` does not alias `a` or `b`.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            1.0,
            a.as_ptr(),
            sa.0 as isize,
            sa.1 as isize,
            b.as_ptr(),
            sb.0 as isize,
            sb.1 as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `z += a W` for row-major `W` (a.len() × z.len()), then ReLU when
/// `relu`. Zero inputs (common after a ReLU) are skipped; the others are
/// applied four rows at a time so `z` is streamed once per four rows.
#[inline(always)]
fn affine_body(z: &mut [f64], a: &[f64], w: &[f64], relu: bool) {
    let n = z.len();
    let row = |r: usize| &w[r * n..(r + 1) * n];
    let mut buf = [(0usize, 0.0f64); 4];
    let mut k = 0;
    for (r, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        buf[k] = (r, x);
        k += 1;
        if k == 4 {
            let [(r0, x0), (r1, x1), (r2, x2), (r3, x3)] = buf;
            let (w0, w1, w2, w3) = (row(r0), row(r1), row(r2), row(r3));
            for ((((zj, a0), a1), a2), a3) in z.iter_mut().zip(w0).zip(w1).zip(w2).zip(w3) {
                *zj += x0 * a0 + x1 * a1 + x2 * a2 + x3 * a3;
            }
            k = 0;
        }
    }
    for &(r, x) in &buf[..k] {
        for (zj, wj) in z.iter_mut().zip(row(r)) {
            *zj += x * wj;
        }
    }
    if relu {
        for v in z.iter_mut() {
            *v = v.max(0.0);
        }
    }
}

// Same arithmetic in wider registers. Without FMA contraction the result
// is bit-identical to the portable loop.
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn affine_avx2(z: &mut [f64], a: &[f64], w: &[f64], relu: bool) {
    affine_body(z, a, w, relu)
}

fn affine(z: &mut [f64], a: &[f64], w: &[f64], relu: bool) {
    #[cfg(target_arch = "x86_64")]
    if std::is_x86_feature_detected!("avx2") {
        // SAFETY: the CPU supports the enabled feature.
        return unsafe { affine_avx2(z, a, w, relu) };
    }
    affine_body(z, a, w, relu)
}

impl Network {
    /// Fresh network: hidden layers use He-uniform weights, the output
    /// layer LeCun-uniform, biases start at zero.
    pub fn new(config: NetworkConfig) -> Result<Self> {
        config.validate()?;
        let mut net = Network::zeros(config);
        let mut rng = substream(config.init_seed, &[label::INIT]);
        let last = net.layers.len() - 1;
        for (i, l) in net.layers.iter().enumerate() {
            let gain = if i == last { 3.0 } else { 6.0 };
            let bound = (gain / l.inputs as f64).sqrt();
            for w in &mut net.params[l.offset..l.offset + l.inputs * l.outputs] {
                *w = rng.gen_range(-bound..bound);
            }
        }
        Ok(net)
    }

    fn zeros(config: NetworkConfig) -> Self {
        let mut sizes = vec![NUM_FEATURES];
        sizes.extend(std::iter::repeat_n(config.hidden_width, config.hidden_layers));
        sizes.push(config.output_size());
        let mut layers = Vec::new();
        let mut offset = 0;
        for w in sizes.windows(2) {
            layers.push(Layer {
                inputs: w[0],
                outputs: w[1],
                offset,
            });
            offset += w[0] * w[1] + w[1];
        }
        Network {
            config,
            layers,
            params: vec![0.0; offset],
        }
    }

    pub fn from_parameters(config: NetworkConfig, params: Vec<f64>) -> Result<Self> {
        config.validate()?;
        let mut net = Network::zeros(config);
        if params.len() != net.params.len() {
            return Err(Error::InvalidInput(format!(
                "network needs {} parameters, got {}",
                net.params.len(),
                params.len()
            )));
        }
        net.params = params;
        Ok(net)
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn kind(&self) -> ModelKind {
        self.config.kind()
    }

    pub fn parameters(&self) -> &[f64] {
        &self.params
    }

    pub fn parameters_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_parameters(&self) -> usize {
        self.params.len()
    }

    pub fn output_size(&self) -> usize {
        self.config.output_size()
    }

    /// Reject sketches a classification head cannot represent.
    pub fn check_supported(&self, input: &[u32; NUM_FEATURES]) -> Result<()> {
        if let Head::Classification { max_counts } = self.config.head {
            for j in 0..NUM_FEATURES {
                if input[j] > max_counts[j] {
                    return Err(Error::UnsupportedInput {
                        coordinate: j,
                        count: input[j],
                        max: max_counts[j],
                    });
                }
            }
        }
        Ok(())
    }

    /// Raw output layer for one input.
    fn output_layer(&self, input: &[u32; NUM_FEATURES]) -> Vec<f64> {
        let mut a: Vec<f64> = (0..NUM_FEATURES)
            .map(|j| input[j] as f64 / self.config.input_scale[j])
            .collect();
        let last = self.layers.len() - 1;
        for (i, l) in self.layers.iter().enumerate() {
            let mut z = l.bias(&self.params).to_vec();
            affine(&mut z, &a, l.weights(&self.params), i < last);
            a = z;
        }
        a
    }

    /// Head output for one sketch: per-block probabilities for a
    /// classification head (with `mask`, counts above the sketch get zero
    /// mass), or the 12 unrounded estimates for a regression head.
    pub fn forward(&self, sketch: &InstanceSketch, mask: bool) -> Result<Vec<f64>> {
        let input = sketch.to_vector();
        self.check_supported(&input)?;
        let mut z = self.output_layer(&input);
        match self.config.head {
            Head::Regression => {}
            Head::Classification { max_counts } => {
                let offsets = block_offsets(&max_counts);
                for j in 0..NUM_FEATURES {
                    let block = &mut z[offsets[j]..offsets[j + 1]];
                    let live = if mask { input[j] as usize + 1 } else { block.len() };
                    let top = block[..live].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let mut sum = 0.0;
                    for v in &mut block[..live] {
                        *v = (*v - top).exp();
                        sum += *v;
                    }
                    for v in &mut block[..live] {
                        *v /= sum;
                    }
                    for v in &mut block[live..] {
                        *v = 0.0;
                    }
                }
            }
        }
        Ok(z)
    }

    /// Predicted summary; never exceeds the sketch.
    pub fn predict(&self, sketch: &InstanceSketch) -> Result<Summary> {
        let input = sketch.to_vector();
        self.check_supported(&input)?;
        let z = self.output_layer(&input);
        Ok(Summary::from_vector(self.decode(&input, &z)))
    }

    /// Predictions for many inputs at once; same results as [`Network::predict`].
    pub fn predict_batch(&self, inputs: &[[u32; NUM_FEATURES]]) -> Result<Vec<[u32; NUM_FEATURES]>> {
        let mut out = Vec::with_capacity(inputs.len());
        let width = self.output_size();
        for chunk in inputs.chunks(1024) {
            for x in chunk {
                self.check_supported(x)?;
            }
            let acts = self.forward_batch(chunk);
            for (x, z) in chunk.iter().zip(acts.output().chunks(width)) {
                out.push(self.decode(x, z));
            }
        }
        Ok(out)
    }

    /// Regression: round half away from zero, then clamp to the input.
    /// Classification: most likely count not above the input (lowest on
    /// ties).
    fn decode(&self, input: &[u32; NUM_FEATURES], z: &[f64]) -> [u32; NUM_FEATURES] {
        match self.config.head {
            Head::Regression => std::array::from_fn(|j| z[j].round().clamp(0.0, input[j] as f64) as u32),
            Head::Classification { max_counts } => {
                let offsets = block_offsets(&max_counts);
                std::array::from_fn(|j| {
                    let block = &z[offsets[j]..=offsets[j] + input[j] as usize];
                    let mut best = 0;
                    for (c, v) in block.iter().enumerate() {
                        if *v > block[best] {
                            best = c;
                        }
                    }
                    best as u32
                })
            }
        }
    }

    pub(crate) fn forward_batch(&self, inputs: &[[u32; NUM_FEATURES]]) -> Activations {
        let rows = inputs.len();
        let mut values = Vec::with_capacity(self.layers.len() + 1);
        let mut a0 = Vec::with_capacity(rows * NUM_FEATURES);
        for x in inputs {
            for j in 0..NUM_FEATURES {
                a0.push(x[j] as f64 / self.config.input_scale[j]);
            }
        }
        values.push(a0);
        let last = self.layers.len() - 1;
        for (i, l) in self.layers.iter().enumerate() {
            let b = l.bias(&self.params);
            let mut z = Vec::with_capacity(rows * l.outputs);
            for _ in 0..rows {
                z.extend_from_slice(b);
            }
            let a = values.last().unwrap();
            gemm(
                rows,
                l.inputs,
                l.outputs,
                a,
                (l.inputs, 1),
                l.weights(&self.params),
                (l.outputs, 1),
                1.0,
                &mut z,
            );
            if i < last {
                for v in &mut z {
                    *v = v.max(0.0);
                }
            }
            values.push(z);
        }
        Activations { rows, values }
    }

    /// Accumulate the parameter gradient given `dz`, the gradient with
    /// respect to the raw output layer (rows × outputs).
    pub(crate) fn backward(&self, acts: &Activations, mut dz: Vec<f64>, grad: &mut [f64]) {
        let rows = acts.rows;
        for (i, l) in self.layers.iter().enumerate().rev() {
            let a = &acts.values[i];
            let (gw, gb) =
                grad[l.offset..l.offset + l.inputs * l.outputs + l.outputs].split_at_mut(l.inputs * l.outputs);
            // dW = a^T dz
            gemm(
                l.inputs,
                rows,
                l.outputs,
                a,
                (1, l.inputs),
                &dz,
                (l.outputs, 1),
                1.0,
                gw,
            );
            for r in 0..rows {
                for (g, d) in gb.iter_mut().zip(&dz[r * l.outputs..(r + 1) * l.outputs]) {
                    *g += d;
                }
            }
            if i == 0 {
                break;
            }
            // da = dz W^T, then through the ReLU of the layer below
            let mut da = vec![0.0; rows * l.inputs];
            gemm(
                rows,
                l.outputs,
                l.inputs,
                &dz,
                (l.outputs, 1),
                l.weights(&self.params),
                (1, l.outputs),
                0.0,
                &mut da,
            );
            for (d, v) in da.iter_mut().zip(a) {
                if *v <= 0.0 {
                    *d = 0.0;
                }
            }
            dz = da;
        }
    }

    fn penalty(&self) -> f64 {
        let (l1, l2) = (self.config.l1, self.config.l2);
        if l1 == 0.0 && l2 == 0.0 {
            return 0.0;
        }
        self.params.iter().map(|t| l1 * t.abs() + l2 * t * t).sum()
    }

    fn add_penalty_gradient(&self, grad: &mut [f64]) {
        let (l1, l2) = (self.config.l1, self.config.l2);
        if l1 == 0.0 && l2 == 0.0 {
            return;
        }
        for (g, t) in grad.iter_mut().zip(&self.params) {
            let sign = if *t > 0.0 {
                1.0
            } else if *t < 0.0 {
                -1.0
            } else {
                0.0
            };
            *g += l1 * sign + 2.0 * l2 * t;
        }
    }

    fn check_batch(&self, inputs: &[[u32; NUM_FEATURES]], targets: &[[u32; NUM_FEATURES]]) -> Result<()> {
        if inputs.len() != targets.len() || inputs.is_empty() {
            return Err(Error::InvalidInput(format!(
                "batch needs matching nonempty inputs and targets, got {} and {}",
                inputs.len(),
                targets.len()
            )));
        }
        Ok(())
    }

    /// Mean data loss over the examples, without the penalty. Evaluated in
    /// chunks so large validation sets stay cheap on memory.
    pub fn data_loss(&self, inputs: &[[u32; NUM_FEATURES]], targets: &[[u32; NUM_FEATURES]]) -> Result<f64> {
        self.check_batch(inputs, targets)?;
        let mut total = 0.0;
        for (x, y) in inputs.chunks(1024).zip(targets.chunks(1024)) {
            let acts = self.forward_batch(x);
            total += head_loss(&self.config, acts.output(), x, y, None, None)?;
        }
        Ok(total / inputs.len() as f64)
    }

    /// Training objective: mean data loss plus the L1/L2 penalty.
    pub fn loss(&self, inputs: &[[u32; NUM_FEATURES]], targets: &[[u32; NUM_FEATURES]]) -> Result<f64> {
        Ok(self.data_loss(inputs, targets)? + self.penalty())
    }

    /// Training objective and its gradient over one batch.
    pub fn loss_and_gradient(
        &self,
        inputs: &[[u32; NUM_FEATURES]],
        targets: &[[u32; NUM_FEATURES]],
    ) -> Result<(f64, Vec<f64>)> {
        self.check_batch(inputs, targets)?;
        let acts = self.forward_batch(inputs);
        let mut dz = vec![0.0; acts.output().len()];
        let sum = head_loss(&self.config, acts.output(), inputs, targets, Some(&mut dz), None)?;
        let inv = 1.0 / inputs.len() as f64;
        for d in &mut dz {
            *d *= inv;
        }
        let mut grad = vec![0.0; self.params.len()];
        self.backward(&acts, dz, &mut grad);
        self.add_penalty_gradient(&mut grad);
        Ok((sum * inv + self.penalty(), grad))
    }

    /// Smallest absolute pre-activation over all hidden units for these
    /// inputs; gradient checks stay clear of ReLU kinks with it.
    pub fn min_hidden_preactivation(&self, inputs: &[[u32; NUM_FEATURES]]) -> f64 {
        let mut best = f64::INFINITY;
        let rows = inputs.len();
        let mut a: Vec<f64> = inputs
            .iter()
            .flat_map(|x| (0..NUM_FEATURES).map(move |j| x[j] as f64))
            .collect();
        for r in 0..rows {
            for j in 0..NUM_FEATURES {
                a[r * NUM_FEATURES + j] /= self.config.input_scale[j];
            }
        }
        for l in &self.layers[..self.layers.len() - 1] {
            let mut z = Vec::with_capacity(rows * l.outputs);
            for _ in 0..rows {
                z.extend_from_slice(l.bias(&self.params));
            }
            gemm(
                rows,
                l.inputs,
                l.outputs,
                &a,
                (l.inputs, 1),
                l.weights(&self.params),
                (l.outputs, 1),
                1.0,
                &mut z,
            );
            for v in &mut z {
                best = best.min(v.abs());
                *v = v.max(0.0);
            }
            a = z;
        }
        best
    }
}
