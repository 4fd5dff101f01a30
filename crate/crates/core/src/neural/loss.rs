use super::mlp::{ForwardCache, Gradient, Mlp};
use crate::error::{invalid, shape_err, Result};
use crate::softmax::softmax_into;

/// One regression sample: the output for `action` should equal `target`.
#[derive(Debug, Clone, Copy)]
pub struct Regression<'a> {
    pub input: &'a [f64],
    pub action: usize,
    pub target: f64,
    /// Relative weight in the batch mean (1 for ordinary minibatches).
    pub weight: f64,
}

impl<'a> Regression<'a> {
    pub fn new(input: &'a [f64], action: usize, target: f64) -> Self {
        Self { input, action, target, weight: 1.0 }
    }
}

/// One classification sample: `action` was taken at `input`.
#[derive(Debug, Clone, Copy)]
pub struct Labeled<'a> {
    pub input: &'a [f64],
    pub action: usize,
}

fn check_sample(net: &Mlp, input: &[f64], action: usize) -> Result<()> {
    net.check_input(input)?;
    if action >= net.output_width() {
        return Err(shape_err(format!("action {action} for a network with {} outputs", net.output_width())));
    }
    Ok(())
}

/// Weighted mean squared error `sum_i w_i (Q(s_i, a_i) - T_i)^2 / sum_i w_i`
/// and its gradient. Only the selected output contributes per sample.
pub fn grad_squared_loss(net: &Mlp, batch: &[Regression<'_>]) -> Result<(f64, Gradient)> {
    if batch.is_empty() {
        return Err(invalid("batch", "must be non-empty"));
    }
    let total: f64 = batch.iter().map(|s| s.weight).sum();
    if !(total > 0.0) {
        return Err(invalid("batch", "weights must sum to a positive value"));
    }
    let mut grad = Gradient::zeros(net.num_params());
    let mut cache = ForwardCache::default();
    let mut d_out = vec![0.0; net.output_width()];
    let mut loss = 0.0;
    for s in batch {
        check_sample(net, s.input, s.action)?;
        net.forward_cached(s.input, &mut cache);
        let err = cache.output()[s.action] - s.target;
        loss += s.weight * err * err;
        d_out.fill(0.0);
        d_out[s.action] = 2.0 * s.weight * err / total;
        net.backward(&mut cache, &d_out, &mut grad.0);
    }
    Ok((loss / total, grad))
}

/// Mean negative log-likelihood of the recorded actions under
/// `softmax(logits)` and its gradient.
pub fn grad_cross_entropy(net: &Mlp, batch: &[Labeled<'_>]) -> Result<(f64, Gradient)> {
    if batch.is_empty() {
        return Err(invalid("batch", "must be non-empty"));
    }
    let scale = 1.0 / batch.len() as f64;
    let mut grad = Gradient::zeros(net.num_params());
    let mut cache = ForwardCache::default();
    let mut probs = vec![0.0; net.output_width()];
    let mut loss = 0.0;
    for s in batch {
        check_sample(net, s.input, s.action)?;
        net.forward_cached(s.input, &mut cache);
        softmax_into(cache.output(), 1.0, &mut probs);
        loss -= crate::types::floored_ln(probs[s.action]);
        for p in probs.iter_mut() {
            *p *= scale;
        }
        probs[s.action] -= scale;
        net.backward(&mut cache, &probs, &mut grad.0);
    }
    Ok((loss * scale, grad))
}
