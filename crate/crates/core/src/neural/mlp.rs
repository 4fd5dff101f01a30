use rand::Rng;

use crate::error::{invalid, shape_err, Result};

/// Feedforward network with rectifier hidden layers and a linear output.
///
/// Parameters live in one flat vector: for each layer, the `out x in`
/// weight matrix in row-major order followed by the `out` biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
    offsets: Vec<usize>,
}

/// Flat gradient with the parameter layout of its network.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient(pub Vec<f64>);

impl Gradient {
    pub fn zeros(len: usize) -> Self {
        Gradient(vec![0.0; len])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

fn layer_offsets(sizes: &[usize]) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut at = 0;
    offsets.push(0);
    for w in sizes.windows(2) {
        at += w[0] * w[1] + w[1];
        offsets.push(at);
    }
    offsets
}

/// Activations of one forward pass, kept for backpropagation.
#[derive(Debug, Default, Clone)]
pub struct ForwardCache {
    acts: Vec<Vec<f64>>,
    delta: Vec<f64>,
    delta_prev: Vec<f64>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.acts.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

impl Mlp {
    /// All-zero network.
    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        if sizes.len() < 2 || sizes.contains(&0) {
            return Err(invalid("layer_sizes", "need at least input and output widths, all positive"));
        }
        let offsets = layer_offsets(sizes);
        Ok(Self { sizes: sizes.to_vec(), params: vec![0.0; *offsets.last().expect("non-empty")], offsets })
    }

    /// Weights and biases drawn uniformly from `±1/sqrt(fan_in)`.
    pub fn new(sizes: &[usize], rng: &mut impl Rng) -> Result<Self> {
        let mut net = Self::zeros(sizes)?;
        for l in 0..net.num_layers() {
            let bound = 1.0 / (net.sizes[l] as f64).sqrt();
            let (start, end) = (net.offsets[l], net.offsets[l + 1]);
            for p in &mut net.params[start..end] {
                *p = rng.random_range(-bound..bound);
            }
        }
        Ok(net)
    }

    pub fn from_params(sizes: &[usize], params: Vec<f64>) -> Result<Self> {
        let mut net = Self::zeros(sizes)?;
        if params.len() != net.params.len() {
            return Err(shape_err(format!("{} parameters for a network needing {}", params.len(), net.params.len())));
        }
        if let Some(i) = params.iter().position(|p| !p.is_finite()) {
            return Err(crate::Error::NonFinite(format!("parameter {i}")));
        }
        net.params = params;
        Ok(net)
    }

    /// Zeroes the final layer so every output starts at 0.
    pub fn zero_output_layer(&mut self) {
        let l = self.num_layers() - 1;
        let (start, end) = (self.offsets[l], self.offsets[l + 1]);
        self.params[start..end].fill(0.0);
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn input_width(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_width(&self) -> usize {
        *self.sizes.last().expect("non-empty")
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    pub(crate) fn check_input(&self, input: &[f64]) -> Result<()> {
        if input.len() != self.input_width() {
            return Err(shape_err(format!(
                "input width {} for a network expecting {}",
                input.len(),
                self.input_width()
            )));
        }
        Ok(())
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        self.check_input(input)?;
        let mut cache = ForwardCache::default();
        self.forward_cached(input, &mut cache);
        Ok(cache.acts.pop().expect("output layer"))
    }

    /// Forward pass recording every layer's activation; the input width is
    /// not checked.
    pub(crate) fn forward_cached(&self, input: &[f64], cache: &mut ForwardCache) {
        let layers = self.num_layers();
        cache.acts.resize_with(layers + 1, Vec::new);
        cache.acts[0].clear();
        cache.acts[0].extend_from_slice(input);
        for l in 0..layers {
            let (fan_in, fan_out) = (self.sizes[l], self.sizes[l + 1]);
            let w = &self.params[self.offsets[l]..self.offsets[l] + fan_in * fan_out];
            let b = &self.params[self.offsets[l] + fan_in * fan_out..self.offsets[l + 1]];
            let (before, after) = cache.acts.split_at_mut(l + 1);
            let x = &before[l];
            let out = &mut after[0];
            out.clear();
            for o in 0..fan_out {
                let row = &w[o * fan_in..(o + 1) * fan_in];
                let mut z = b[o];
                for (wi, xi) in row.iter().zip(x.iter()) {
                    z += wi * xi;
                }
                out.push(if l + 1 < layers { z.max(0.0) } else { z });
            }
        }
    }

    /// Adds `d loss / d params` to `grad` given `d loss / d output` for the
    /// pass stored in `cache`.
    pub(crate) fn backward(&self, cache: &mut ForwardCache, d_out: &[f64], grad: &mut [f64]) {
        let ForwardCache { acts, delta, delta_prev } = cache;
        delta.clear();
        delta.extend_from_slice(d_out);
        for l in (0..self.num_layers()).rev() {
            let (fan_in, fan_out) = (self.sizes[l], self.sizes[l + 1]);
            let w_start = self.offsets[l];
            let b_start = w_start + fan_in * fan_out;
            let x = &acts[l];
            for o in 0..fan_out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                let g = &mut grad[w_start + o * fan_in..w_start + (o + 1) * fan_in];
                for (gi, xi) in g.iter_mut().zip(x.iter()) {
                    *gi += d * xi;
                }
                grad[b_start + o] += d;
            }
            if l == 0 {
                break;
            }
            delta_prev.clear();
            delta_prev.resize(fan_in, 0.0);
            let w = &self.params[w_start..b_start];
            for o in 0..fan_out {
                let d = delta[o];
                if d == 0.0 {
                    continue;
                }
                for (dp, wi) in delta_prev.iter_mut().zip(&w[o * fan_in..(o + 1) * fan_in]) {
                    *dp += d * wi;
                }
            }
            for (dp, xi) in delta_prev.iter_mut().zip(x.iter()) {
                if *xi <= 0.0 {
                    *dp = 0.0;
                }
            }
            std::mem::swap(delta, delta_prev);
        }
    }
}
