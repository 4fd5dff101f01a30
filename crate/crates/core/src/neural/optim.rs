use super::mlp::{Gradient, Mlp};
use crate::error::{shape_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizerKind {
    #[default]
    Adam,
    /// Plain gradient descent.
    Sgd,
}

/// Moment accumulators and hyperparameters of a first-order optimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub kind: OptimizerKind,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    step: u64,
}

impl OptimizerState {
    pub fn new(kind: OptimizerKind, num_params: usize, learning_rate: f64) -> Self {
        Self {
            kind,
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            step: 0,
        }
    }

    pub fn adam(num_params: usize, learning_rate: f64) -> Self {
        Self::new(OptimizerKind::Adam, num_params, learning_rate)
    }

    pub fn sgd(num_params: usize, learning_rate: f64) -> Self {
        Self::new(OptimizerKind::Sgd, num_params, learning_rate)
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    /// Applies one update to `params`. A non-finite gradient leaves both the
    /// parameters and the state untouched.
    pub fn step_slice(&mut self, params: &mut [f64], grad: &[f64]) -> Result<()> {
        if params.len() != grad.len() || params.len() != self.m.len() {
            return Err(shape_err(format!(
                "{} parameters, {} gradient entries, optimizer sized for {}",
                params.len(),
                grad.len(),
                self.m.len()
            )));
        }
        if let Some(index) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient { index });
        }
        self.step += 1;
        match self.kind {
            OptimizerKind::Sgd => {
                for (p, g) in params.iter_mut().zip(grad) {
                    *p -= self.learning_rate * g;
                }
            }
            OptimizerKind::Adam => {
                let t = self.step as i32;
                let c1 = 1.0 - self.beta1.powi(t);
                let c2 = 1.0 - self.beta2.powi(t);
                for i in 0..params.len() {
                    let g = grad[i];
                    self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
                    self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
                    let m_hat = self.m[i] / c1;
                    let v_hat = self.v[i] / c2;
                    params[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.eps);
                }
            }
        }
        Ok(())
    }

    pub fn step(&mut self, net: &mut Mlp, grad: &Gradient) -> Result<()> {
        self.step_slice(net.params_mut(), grad.as_slice())
    }
}

/// One optimizer update of `net`.
pub fn optimizer_step(net: &mut Mlp, state: &mut OptimizerState, grad: &Gradient) -> Result<()> {
    state.step(net, grad)
}
