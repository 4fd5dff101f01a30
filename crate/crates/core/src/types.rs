//! Probability containers and value tables shared by every solver.
//!
//! All tables are stored flat in `(n, x, a)` row-major order with `n` running
//! over `0..=N_T`. Containers validate their invariants on construction and are
//! immutable afterwards unless explicitly rebuilt.

use crate::error::{invalid, shape_err, Error, Result};

/// Floor applied to every probability before it is passed to a logarithm.
pub const PROB_FLOOR: f64 = 1e-12;

/// Tolerance on the total mass of a distribution or policy row.
pub const MASS_TOL: f64 = 1e-9;

/// Entries above `-NEG_TOL` are accepted as non-negative.
const NEG_TOL: f64 = 1e-12;

/// `ln(max(p, PROB_FLOOR))`.
#[inline]
pub fn floored_ln(p: f64) -> f64 {
    p.max(PROB_FLOOR).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonSpec {
    n_t: usize,
    dt: f64,
}

impl HorizonSpec {
    pub fn new(n_t: usize, dt: f64) -> Result<Self> {
        if n_t < 1 {
            return Err(invalid("n_t", "horizon must have at least one step"));
        }
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", format!("time step must be positive, got {dt}")));
        }
        Ok(Self { n_t, dt })
    }

    /// Horizon with unit time step.
    pub fn steps(n_t: usize) -> Result<Self> {
        Self::new(n_t, 1.0)
    }

    /// The final decision time `N_T`.
    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of time slices, `N_T + 1`.
    pub fn len(&self) -> usize {
        self.n_t + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// A probability vector over the finite state set.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    mass: Vec<f64>,
}

/// Validates a raw mass vector of the expected length.
pub fn validate_distribution(raw: Vec<f64>, num_states: usize) -> Result<Distribution> {
    if raw.len() != num_states {
        return Err(shape_err(format!("distribution has {} entries, expected {num_states}", raw.len())));
    }
    Distribution::new(raw)
}

fn check_mass(values: &[f64]) -> Result<()> {
    let mut sum = 0.0;
    for (index, &value) in values.iter().enumerate() {
        if value.is_nan() || value < -NEG_TOL {
            return Err(Error::NegativeMass { index, value });
        }
        sum += value;
    }
    if !((sum - 1.0).abs() <= MASS_TOL) {
        return Err(Error::NotNormalized { sum });
    }
    Ok(())
}

impl Distribution {
    pub fn new(mass: Vec<f64>) -> Result<Self> {
        if mass.is_empty() {
            return Err(shape_err("distribution over an empty state set"));
        }
        check_mass(&mass)?;
        Ok(Self { mass })
    }

    pub fn uniform(len: usize) -> Self {
        Self { mass: vec![1.0 / len as f64; len] }
    }

    pub fn point(len: usize, at: usize) -> Self {
        let mut mass = vec![0.0; len];
        mass[at] = 1.0;
        Self { mass }
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.mass
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.mass
    }

    #[inline]
    pub fn get(&self, x: usize) -> f64 {
        self.mass[x]
    }

    pub fn sum(&self) -> f64 {
        self.mass.iter().sum()
    }

    /// First moment, treating state indices as positions on a line.
    pub fn mean_index(&self) -> f64 {
        self.mass.iter().enumerate().map(|(i, m)| i as f64 * m).sum()
    }

    pub fn total_variation(&self, other: &Distribution) -> f64 {
        0.5 * self.mass.iter().zip(&other.mass).map(|(a, b)| (a - b).abs()).sum::<f64>()
    }

    /// Draws an index by inverse-CDF sampling from a uniform `u` in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &m) in self.mass.iter().enumerate() {
            if m <= 0.0 {
                continue;
            }
            acc += m;
            last = i;
            if u < acc {
                return i;
            }
        }
        last
    }
}

/// The time-indexed population flow `(mu_0, ..., mu_{N_T})`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldFlow {
    flow: Vec<Distribution>,
}

impl MeanFieldFlow {
    pub fn new(flow: Vec<Distribution>, horizon: HorizonSpec) -> Result<Self> {
        if flow.len() != horizon.len() {
            return Err(shape_err(format!("flow has {} slices, horizon needs {}", flow.len(), horizon.len())));
        }
        let width = flow[0].len();
        if flow.iter().any(|d| d.len() != width) {
            return Err(shape_err("flow slices have differing state counts"));
        }
        Ok(Self { flow })
    }

    /// The flow that stays at `d` for every time slice.
    pub fn constant(d: &Distribution, horizon: HorizonSpec) -> Self {
        Self { flow: vec![d.clone(); horizon.len()] }
    }

    pub fn at(&self, n: usize) -> &Distribution {
        &self.flow[n]
    }

    pub fn len(&self) -> usize {
        self.flow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flow.is_empty()
    }

    pub fn num_states(&self) -> usize {
        self.flow[0].len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Distribution> {
        self.flow.iter()
    }

    /// Largest per-slice total-variation distance.
    pub fn max_tv(&self, other: &MeanFieldFlow) -> f64 {
        self.flow.iter().zip(&other.flow).map(|(a, b)| a.total_variation(b)).fold(0.0, f64::max)
    }
}

/// Dimensions of a `(N_T + 1) x |X| x |A|` table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableShape {
    pub steps: usize,
    pub states: usize,
    pub actions: usize,
}

impl TableShape {
    pub fn new(steps: usize, states: usize, actions: usize) -> Self {
        Self { steps, states, actions }
    }

    pub fn len(&self) -> usize {
        self.steps * self.states * self.actions
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn row_start(&self, n: usize, x: usize) -> usize {
        (n * self.states + x) * self.actions
    }

    #[inline]
    pub fn index(&self, n: usize, x: usize, a: usize) -> usize {
        self.row_start(n, x) + a
    }
}

/// A time-indexed stochastic policy; every `(n, x)` row is a distribution over actions.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    shape: TableShape,
    probs: Vec<f64>,
}

impl Policy {
    pub fn new(shape: TableShape, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != shape.len() || shape.actions == 0 {
            return Err(shape_err(format!("policy table has {} entries, shape needs {}", probs.len(), shape.len())));
        }
        for row in probs.chunks(shape.actions) {
            check_mass(row)?;
        }
        Ok(Self { shape, probs })
    }

    pub fn uniform(shape: TableShape) -> Self {
        Self { shape, probs: vec![1.0 / shape.actions as f64; shape.len()] }
    }

    /// A deterministic policy choosing `choose(n, x)` in every state.
    pub fn deterministic(shape: TableShape, mut choose: impl FnMut(usize, usize) -> usize) -> Self {
        let mut probs = vec![0.0; shape.len()];
        for n in 0..shape.steps {
            for x in 0..shape.states {
                let a = choose(n, x);
                probs[shape.index(n, x, a)] = 1.0;
            }
        }
        Self { shape, probs }
    }

    /// Builds a policy by filling each row; the row is validated afterwards.
    pub fn from_rows(shape: TableShape, mut fill: impl FnMut(usize, usize, &mut [f64])) -> Result<Self> {
        let mut probs = vec![0.0; shape.len()];
        for n in 0..shape.steps {
            for x in 0..shape.states {
                let s = shape.row_start(n, x);
                fill(n, x, &mut probs[s..s + shape.actions]);
            }
        }
        Self::new(shape, probs)
    }

    pub fn shape(&self) -> TableShape {
        self.shape
    }

    #[inline]
    pub fn row(&self, n: usize, x: usize) -> &[f64] {
        let s = self.shape.row_start(n, x);
        &self.probs[s..s + self.shape.actions]
    }

    #[inline]
    pub fn prob(&self, n: usize, x: usize, a: usize) -> f64 {
        self.probs[self.shape.index(n, x, a)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.probs
    }

    /// Largest absolute entrywise difference.
    pub fn sup_distance(&self, other: &Policy) -> f64 {
        self.probs.iter().zip(&other.probs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Smallest entry of the table.
    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// What a [`QTable`] holds; informational only.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QKind {
    Plain,
    Cumulative,
    Munchausen,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    shape: TableShape,
    values: Vec<f64>,
    kind: QKind,
}

impl QTable {
    pub fn zeros(shape: TableShape, kind: QKind) -> Self {
        Self { shape, values: vec![0.0; shape.len()], kind }
    }

    pub fn new(shape: TableShape, values: Vec<f64>, kind: QKind) -> Result<Self> {
        if values.len() != shape.len() {
            return Err(shape_err(format!("q-table has {} entries, shape needs {}", values.len(), shape.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("q-table entry {i}")));
        }
        Ok(Self { shape, values, kind })
    }

    pub fn shape(&self) -> TableShape {
        self.shape
    }

    pub fn kind(&self) -> QKind {
        self.kind
    }

    #[inline]
    pub fn get(&self, n: usize, x: usize, a: usize) -> f64 {
        self.values[self.shape.index(n, x, a)]
    }

    #[inline]
    pub fn row(&self, n: usize, x: usize) -> &[f64] {
        let s = self.shape.row_start(n, x);
        &self.values[s..s + self.shape.actions]
    }

    #[inline]
    pub fn row_mut(&mut self, n: usize, x: usize) -> &mut [f64] {
        let s = self.shape.row_start(n, x);
        &mut self.values[s..s + self.shape.actions]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// `self += scale * other`, entrywise.
    pub fn add_scaled(&mut self, other: &QTable, scale: f64) {
        for (s, o) in self.values.iter_mut().zip(&other.values) {
            *s += scale * o;
        }
    }

    pub fn sup_distance(&self, other: &QTable) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }
}

/// Linear exploration schedule: `start` decays to `end` over the first
/// `decay_fraction` of an inner loop and stays at `end` afterwards.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsilonSchedule {
    pub start: f64,
    pub end: f64,
    pub decay_fraction: f64,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        Self { start: 1.0, end: 0.1, decay_fraction: 0.5 }
    }
}

impl EpsilonSchedule {
    pub fn at(&self, step: usize, total: usize) -> f64 {
        let horizon = (self.decay_fraction * total as f64).max(1.0);
        let t = (step as f64 / horizon).min(1.0);
        self.start + (self.end - self.start) * t
    }
}

/// Iteration counts, temperatures and learning rates shared by all solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// OMD inverse learning rate and Munchausen temperature.
    pub tau: f64,
    /// Munchausen stabilizer in `[0, 1]`.
    pub alpha: f64,
    /// Boltzmann temperature, also used by the soft best-response variants.
    pub eta: f64,
    /// Use `softmax(Q / eta)` instead of the greedy policy in BP and PI.
    pub soft_br: bool,
    /// Outer iterations `K`.
    pub iterations: usize,
    /// Gradient steps per inner loop `L`.
    pub inner_steps: usize,
    /// Minibatch size `N_B`.
    pub batch_size: usize,
    pub epsilon: EpsilonSchedule,
    pub learning_rate: f64,
    /// Learning rate of the average-policy network.
    pub avg_learning_rate: f64,
    pub seed: u64,
    /// Keep a copy of every iterate's policy in the trace.
    pub record_policies: bool,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            tau: 1.0,
            alpha: 1.0,
            eta: 1.0,
            soft_br: false,
            iterations: 100,
            inner_steps: 2000,
            batch_size: 32,
            epsilon: EpsilonSchedule::default(),
            learning_rate: 1e-3,
            avg_learning_rate: 1e-3,
            seed: 0,
            record_policies: false,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(invalid("tau", format!("must be > 0, got {}", self.tau)));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(invalid("alpha", format!("must lie in [0, 1], got {}", self.alpha)));
        }
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(invalid("eta", format!("must be > 0, got {}", self.eta)));
        }
        if self.iterations == 0 {
            return Err(invalid("iterations", "must be at least 1"));
        }
        if self.inner_steps == 0 {
            return Err(invalid("inner_steps", "must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(invalid("batch_size", "must be at least 1"));
        }
        let e = self.epsilon;
        if !(0.0..=1.0).contains(&e.start) || !(0.0..=1.0).contains(&e.end) || e.decay_fraction < 0.0 {
            return Err(invalid("epsilon", "rates must lie in [0, 1]"));
        }
        if !(self.learning_rate > 0.0) || !(self.avg_learning_rate > 0.0) {
            return Err(invalid("learning_rate", "must be > 0"));
        }
        Ok(())
    }
}
